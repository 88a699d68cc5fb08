// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Text formats: edge lists, node metadata and plain key lists.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{CitationGraph, GraphBuilder, NodeMetadata};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Delimiter {
    #[default]
    Tab,
    Comma,
}

impl Delimiter {
    fn as_char(self) -> char {
        match self {
            Delimiter::Tab => '\t',
            Delimiter::Comma => ',',
        }
    }
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
}

/// Reads `citing<delim>cited` rows.
pub fn read_edges<R: BufRead>(reader: R, delimiter: Delimiter, origin: &str) -> Result<CitationGraph> {
    let mut builder = GraphBuilder::new();
    let sep = delimiter.as_char();
    for (line_no, line) in data_lines(reader) {
        let line = line?;
        let mut fields = line.trim_end_matches(['\r', '\n']).split(sep);
        let (citing, cited) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => (a.trim(), b.trim()),
            _ => {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!(
                        "expected two fields `citing{}cited`",
                        if sep == '\t' { "<TAB>" } else { "," }
                    ),
                ))
            }
        };
        builder.add_edge(citing, cited);
    }
    Ok(builder.build())
}

pub fn load_edges(path: &Path, delimiter: Delimiter) -> Result<CitationGraph> {
    let file = File::open(path)?;
    read_edges(BufReader::new(file), delimiter, &path.display().to_string())
}

pub fn write_edges<W: Write>(graph: &CitationGraph, mut out: W) -> Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.key(u), graph.key(v))?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_edges(graph: &CitationGraph, path: &Path) -> Result<()> {
    write_edges(graph, BufWriter::new(File::create(path)?))
}

/// `internal_id<TAB>node_key` rows in id order.
pub fn write_id_map<W: Write>(graph: &CitationGraph, mut out: W) -> Result<()> {
    for v in graph.nodes() {
        writeln!(out, "{}\t{}", v, graph.key(v))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct MetadataLoadReport {
    pub rows: usize,
    pub applied: usize,
    /// Rows whose key is not a node of the graph; skipped.
    pub unknown_keys: usize,
}

/// Reads `node_key<TAB>year[<TAB>doi]` rows against `graph`'s id map.
pub fn read_metadata<R: BufRead>(
    reader: R,
    graph: &CitationGraph,
    origin: &str,
) -> Result<(NodeMetadata, MetadataLoadReport)> {
    let mut meta = NodeMetadata::new(graph.node_count());
    let mut report = MetadataLoadReport::default();
    for (line_no, line) in data_lines(reader) {
        let line = line?;
        let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 || fields[0].is_empty() {
            return Err(Error::parse(origin, line_no, "expected `node_key<TAB>year[<TAB>doi]`"));
        }
        let year = if fields[1].is_empty() {
            None
        } else {
            Some(
                fields[1]
                    .parse::<i32>()
                    .map_err(|_| Error::parse(origin, line_no, format!("year `{}` is not an integer", fields[1])))?,
            )
        };
        let doi = fields.get(2).filter(|d| !d.is_empty()).map(|d| d.to_string());
        report.rows += 1;
        match graph.id_of(fields[0]) {
            Some(v) => {
                meta.set_year(v, year);
                meta.set_doi(v, doi);
                report.applied += 1;
            }
            None => report.unknown_keys += 1,
        }
    }
    Ok((meta, report))
}

pub fn load_metadata(path: &Path, graph: &CitationGraph) -> Result<(NodeMetadata, MetadataLoadReport)> {
    let file = File::open(path)?;
    read_metadata(BufReader::new(file), graph, &path.display().to_string())
}

/// One entry per non-comment line, trimmed. Used for DOI and marker lists.
pub fn read_key_list<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (_, line) in data_lines(reader) {
        out.push(line?.trim().to_string());
    }
    Ok(out)
}

pub fn load_key_list(path: &Path) -> Result<Vec<String>> {
    read_key_list(BufReader::new(File::open(path)?))
}
