//! SNAP-style edge lists and node-attribute CSV files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{Error, Result};

/// Load a whitespace-separated edge list. Lines starting with `#` are
/// comments. Node ids are remapped to `0..n` in ascending order of the
/// original ids. An optional third column is the edge probability; edges
/// without one get probability 1 until probabilities are assigned.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), directed, path)
}

pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool, label: &Path) -> Result<Graph> {
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(label, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: label.to_path_buf(),
            line: i + 1,
            msg,
        };
        let mut tokens = line.split_whitespace();
        let mut id = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| parse_err(format!("expected two node ids, got {line:?}")))?;
            tok.parse()
                .map_err(|_| parse_err(format!("bad node id {tok:?}")))
        };
        let u = id()?;
        let v = id()?;
        let p = match tokens.next() {
            None => 1.0,
            Some(tok) => match tok.parse::<f64>() {
                Ok(p) if p > 0.0 && p <= 1.0 => p,
                _ => return Err(parse_err(format!("bad edge probability {tok:?}"))),
            },
        };
        raw.push((u, v, p));
    }

    let mut ids = BTreeMap::new();
    for &(u, v, _) in &raw {
        ids.insert(u, 0usize);
        ids.insert(v, 0usize);
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    for (dense, slot) in ids.values_mut().enumerate() {
        *slot = dense;
    }
    let edges = raw.iter().map(|(u, v, p)| (ids[u], ids[v], *p));
    let g = Graph::from_edges(ids.len(), directed, edges)?;
    g.with_original_ids(ids.keys().copied().collect())
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let kind = if g.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    let mut body = || -> std::io::Result<()> {
        writeln!(
            w,
            "# {kind} nodes={} edges={} (u v probability)",
            g.node_count(),
            g.edge_count()
        )?;
        for (u, v, p) in g.edges() {
            writeln!(w, "{} {} {}", g.original_id(u), g.original_id(v), p)?;
        }
        w.flush()
    };
    body().map_err(|e| Error::io(path, e))
}

/// One row of a `node_id,cost,benefit,community` file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeRecord {
    pub node_id: u64,
    pub cost: f64,
    pub benefit: f64,
    pub community: usize,
}

/// Attribute overrides keyed by original node id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributeTable {
    rows: BTreeMap<u64, AttributeRecord>,
}

impl AttributeTable {
    pub fn new(records: impl IntoIterator<Item = AttributeRecord>) -> Self {
        AttributeTable {
            rows: records.into_iter().map(|r| (r.node_id, r)).collect(),
        }
    }

    pub fn get(&self, original_id: u64) -> Option<&AttributeRecord> {
        self.rows.get(&original_id)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &AttributeRecord> {
        self.rows.values()
    }
}

pub fn read_attribute_table(path: impl AsRef<Path>) -> Result<AttributeTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["node_id", "cost", "benefit", "community"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("expected header {}", expected.join(",")),
        });
    }
    let mut records = Vec::new();
    for (i, row) in reader.deserialize::<AttributeRecord>().enumerate() {
        let rec = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            msg: e.to_string(),
        })?;
        if !(rec.cost > 0.0 && rec.benefit > 0.0) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                msg: "cost and benefit must be positive".into(),
            });
        }
        records.push(rec);
    }
    Ok(AttributeTable::new(records))
}

pub fn write_attribute_table(
    path: impl AsRef<Path>,
    records: impl IntoIterator<Item = AttributeRecord>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))?;
    Ok(())
}
