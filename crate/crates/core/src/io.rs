//! Dataset loaders (temporal edge lists, static edge lists, Matrix Market
//! coordinate files) and experiment output writers.
//!
//! Loaders compact sparse original vertex ids into the dense `[0, |V|)`
//! universe in first-appearance order, which makes the mapping stable for a
//! given input file. The original ids are retained for rank dumps.

use crate::dynamics::TemporalStream;
use crate::graph::{DynGraph, Edge, VertexId};
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Supported dataset encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// Whitespace-separated `SRC DST` lines, `#` comments.
    EdgeList,
    /// Whitespace-separated `SRC DST UNIXTIME` lines, `#` comments.
    TemporalEdgeList,
    /// Matrix Market coordinate header, 1-based indices.
    MatrixMarket,
}

impl GraphFormat {
    /// Detects a static format from the file extension: `.mtx` is Matrix
    /// Market, anything else an edge list.
    pub fn detect(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") => GraphFormat::MatrixMarket,
            _ => GraphFormat::EdgeList,
        }
    }
}

/// A dataset reference: where it lives, how it is encoded, and whether the
/// edges are directed.
#[derive(Debug, Clone)]
pub struct DatasetDescriptor {
    pub path: std::path::PathBuf,
    pub format: GraphFormat,
    pub directed: bool,
}

impl DatasetDescriptor {
    /// Describes a static dataset, detecting the format from the extension.
    pub fn detect(path: impl Into<std::path::PathBuf>, directed: bool) -> Self {
        let path = path.into();
        let format = GraphFormat::detect(&path);
        DatasetDescriptor {
            path,
            format,
            directed,
        }
    }

    /// Loads the dataset as a static graph (temporal files collapse to
    /// their deduplicated static edges).
    pub fn load(&self) -> Result<LoadedGraph, IoError> {
        load_static(&self.path, self.format, self.directed)
    }
}

/// A parsed temporal stream plus the dense-to-original id mapping.
#[derive(Debug, Clone)]
pub struct LoadedTemporal {
    pub stream: TemporalStream,
    pub original_ids: Vec<u64>,
}

/// A parsed static graph (self-loops injected) plus the dense-to-original
/// id mapping.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DynGraph,
    pub original_ids: Vec<u64>,
}

struct IdCompactor {
    map: HashMap<u64, VertexId>,
    original: Vec<u64>,
}

impl IdCompactor {
    fn new() -> Self {
        IdCompactor {
            map: HashMap::new(),
            original: Vec::new(),
        }
    }

    fn intern(&mut self, id: u64) -> VertexId {
        *self.map.entry(id).or_insert_with(|| {
            self.original.push(id);
            (self.original.len() - 1) as VertexId
        })
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads a whitespace-separated `SRC DST UNIXTIME` file. Events are sorted
/// stably by timestamp; `#` comment lines and blank lines are skipped.
pub fn load_temporal(path: &Path) -> Result<LoadedTemporal, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut ids = IdCompactor::new();
    let mut events = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 'SRC DST UNIXTIME', got {} fields", fields.len()),
            ));
        }
        let src: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad source id '{}'", fields[0])))?;
        let dst: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad target id '{}'", fields[1])))?;
        let ts: i64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad timestamp '{}'", fields[2])))?;
        let u = ids.intern(src);
        let v = ids.intern(dst);
        events.push((u, v, ts));
    }
    let n = ids.original.len();
    Ok(LoadedTemporal {
        stream: TemporalStream::new(n, events),
        original_ids: ids.original,
    })
}

/// Loads a static graph, deduplicating edges and injecting self-loops.
/// `directed = false` mirrors every edge.
pub fn load_static(
    path: &Path,
    format: GraphFormat,
    directed: bool,
) -> Result<LoadedGraph, IoError> {
    match format {
        GraphFormat::EdgeList => load_edge_list(path, directed),
        GraphFormat::MatrixMarket => load_matrix_market(path, directed),
        GraphFormat::TemporalEdgeList => {
            let loaded = load_temporal(path)?;
            let n = loaded.stream.num_vertices();
            let mut edges: Vec<Edge> = loaded
                .stream
                .events()
                .iter()
                .map(|&(u, v, _)| (u, v))
                .collect();
            if !directed {
                let mirrored: Vec<Edge> = edges.iter().map(|&(u, v)| (v, u)).collect();
                edges.extend(mirrored);
            }
            let mut graph = DynGraph::from_edges(n, edges);
            graph.add_self_loops();
            Ok(LoadedGraph {
                graph,
                original_ids: loaded.original_ids,
            })
        }
    }
}

fn load_edge_list(path: &Path, directed: bool) -> Result<LoadedGraph, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut ids = IdCompactor::new();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 'SRC DST', got {} fields", fields.len()),
            ));
        }
        let src: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad source id '{}'", fields[0])))?;
        let dst: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("bad target id '{}'", fields[1])))?;
        let u = ids.intern(src);
        let v = ids.intern(dst);
        edges.push((u, v));
        if !directed && u != v {
            edges.push((v, u));
        }
    }
    let n = ids.original.len();
    let mut graph = DynGraph::from_edges(n, edges);
    graph.add_self_loops();
    Ok(LoadedGraph {
        graph,
        original_ids: ids.original,
    })
}

fn load_matrix_market(path: &Path, directed: bool) -> Result<LoadedGraph, IoError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() < 5
        || tokens[0] != "%%matrixmarket"
        || tokens[1] != "matrix"
        || tokens[2] != "coordinate"
    {
        return Err(parse_err(
            path,
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        ));
    }
    let has_values = match tokens[3].as_str() {
        "pattern" => false,
        "real" | "integer" => true,
        other => return Err(parse_err(path, 1, format!("unsupported field '{other}'"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(parse_err(
                path,
                1,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    // dimensions line: first non-comment line after the header
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match dims {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(path, lineno, "expected 'ROWS COLS NNZ'"));
                }
                let m: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad row count"))?;
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad column count"))?;
                let nnz: usize = fields[2]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad entry count"))?;
                dims = Some((m, n, nnz));
            }
            Some((m, n, _)) => {
                let expected = if has_values { 3 } else { 2 };
                if fields.len() != expected {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("expected {expected} fields, got {}", fields.len()),
                    ));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad row index"))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(path, lineno, "bad column index"))?;
                if i < 1 || i > m || j < 1 || j > n {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("entry ({i}, {j}) out of bounds"),
                    ));
                }
                let u = (i - 1) as VertexId;
                let v = (j - 1) as VertexId;
                edges.push((u, v));
                if (symmetric || !directed) && u != v {
                    edges.push((v, u));
                }
            }
        }
    }
    let (m, n, _) = dims.ok_or_else(|| parse_err(path, 2, "missing dimensions line"))?;
    let universe = m.max(n);
    let mut graph = DynGraph::from_edges(universe, edges);
    graph.add_self_loops();
    Ok(LoadedGraph {
        graph,
        original_ids: (1..=universe as u64).collect(),
    })
}

/// Formats a float with 17 significant digits, enough for an exact
/// round-trip through text.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes an RFC-4180-style CSV with a header row.
pub fn write_csv<P: AsRef<Path>>(
    path: P,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders rows as a CSV string (header first).
pub fn csv_string(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().expect("in-memory writer");
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Reads a CSV written by [`write_csv`] back into header and rows.
pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<(Vec<String>, Vec<Vec<String>>), IoError> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let header = r.headers()?.iter().map(str::to_string).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for record in r.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Dumps `original-id<TAB>rank` pairs, one vertex per line.
pub fn write_ranks_tsv<P: AsRef<Path>>(
    path: P,
    original_ids: &[u64],
    ranks: &[f64],
) -> Result<(), IoError> {
    assert_eq!(original_ids.len(), ranks.len(), "id/rank lengths differ");
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    writeln!(w, "vertex\trank")?;
    for (id, r) in original_ids.iter().zip(ranks) {
        writeln!(w, "{id}\t{}", fmt_float(*r))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the graph as a dense-id edge list (self-loops included), suitable
/// for reloading with [`load_static`].
pub fn write_edge_list<P: AsRef<Path>>(path: P, g: &DynGraph) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}
