//! CSV and JSON file formats.
//!
//! Edge lists: `edge_id,src,dst,timestamp,feat_0,..,feat_{k-1}` with the
//! `edge_id` column optional. Node columns hold either dense integer ids or
//! arbitrary names; names are mapped to ids in order of first appearance.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, GraphError};
use crate::graph::{DirectedMultigraph, EdgeInput, NodeId};
use crate::oracles::{LabelMatrix, TaskId};
use crate::ports::PortAssignment;

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn io_err(p: &Path, source: std::io::Error) -> DataError {
    DataError::Io {
        path: path_str(p),
        source,
    }
}

fn csv_err(p: &Path, source: csv::Error) -> DataError {
    DataError::Csv {
        path: path_str(p),
        source,
    }
}

/// A graph read from an edge-list file, with the node-name table when the
/// file used non-numeric node names.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: DirectedMultigraph,
    pub names: Option<Vec<String>>,
}

impl EdgeList {
    /// Resolves a node given by name or by integer id.
    pub fn resolve(&self, node: &str) -> Option<NodeId> {
        match &self.names {
            Some(names) => names.iter().position(|s| s == node),
            None => node
                .parse::<NodeId>()
                .ok()
                .filter(|&v| v < self.graph.num_nodes()),
        }
    }

    /// Pads the graph with isolated nodes up to `n` (ids in the file may
    /// not reach trailing isolated nodes).
    pub fn with_num_nodes(self, n: usize) -> Result<Self, GraphError> {
        if n <= self.graph.num_nodes() {
            return Ok(self);
        }
        let edges = self
            .graph
            .edges()
            .iter()
            .map(|e| {
                EdgeInput::new(e.src, e.dst, e.timestamp)
                    .with_features(e.features.clone())
                    .with_id(e.id)
            })
            .collect();
        let mut names = self.names;
        if let Some(names) = names.as_mut() {
            let start = names.len();
            names.extend((start..n).map(|i| format!("_{i}")));
        }
        Ok(Self {
            graph: DirectedMultigraph::build(n, edges)?,
            names,
        })
    }

    pub fn name(&self, v: NodeId) -> String {
        match &self.names {
            Some(names) => names[v].clone(),
            None => v.to_string(),
        }
    }
}

pub fn read_edge_csv(path: &Path) -> Result<EdgeList, DataError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    parse_edge_csv(file, &path_str(path))
}

/// Parses an edge list from any reader; `origin` names the source in errors.
pub fn parse_edge_csv<R: Read>(reader: R, origin: &str) -> Result<EdgeList, DataError> {
    let parse_err = |line: usize, msg: String| DataError::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| DataError::Csv {
            path: origin.to_string(),
            source: e,
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let id_col = col("edge_id");
    let src_col = col("src").ok_or_else(|| parse_err(1, "missing 'src' column".into()))?;
    let dst_col = col("dst").ok_or_else(|| parse_err(1, "missing 'dst' column".into()))?;
    let ts_col =
        col("timestamp").ok_or_else(|| parse_err(1, "missing 'timestamp' column".into()))?;
    let mut feat_cols = Vec::new();
    for k in 0.. {
        match col(&format!("feat_{k}")) {
            Some(c) => feat_cols.push(c),
            None => break,
        }
    }

    struct Row {
        id: Option<usize>,
        src: String,
        dst: String,
        ts: i64,
        feats: Vec<f64>,
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| DataError::Csv {
            path: origin.to_string(),
            source: e,
        })?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let id = match id_col {
            Some(c) if !field(c).is_empty() => Some(
                field(c)
                    .parse::<usize>()
                    .map_err(|_| parse_err(line, format!("bad edge_id '{}'", field(c))))?,
            ),
            _ => None,
        };
        let ts = field(ts_col)
            .parse::<i64>()
            .map_err(|_| parse_err(line, format!("bad timestamp '{}'", field(ts_col))))?;
        let feats = feat_cols
            .iter()
            .map(|&c| {
                field(c)
                    .parse::<f64>()
                    .map_err(|_| parse_err(line, format!("bad feature '{}'", field(c))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(Row {
            id,
            src: field(src_col).to_string(),
            dst: field(dst_col).to_string(),
            ts,
            feats,
        });
    }

    let numeric = rows
        .iter()
        .all(|r| r.src.parse::<usize>().is_ok() && r.dst.parse::<usize>().is_ok());
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut intern = |s: &str| -> NodeId {
        if let Some(&v) = index.get(s) {
            return v;
        }
        names.push(s.to_string());
        index.insert(s.to_string(), names.len() - 1);
        names.len() - 1
    };
    let mut edges = Vec::with_capacity(rows.len());
    let mut n = 0;
    for r in &rows {
        let (src, dst) = if numeric {
            (
                r.src.parse::<usize>().expect("checked"),
                r.dst.parse::<usize>().expect("checked"),
            )
        } else {
            (intern(&r.src), intern(&r.dst))
        };
        n = n.max(src + 1).max(dst + 1);
        let mut e = EdgeInput::new(src, dst, r.ts).with_features(r.feats.clone());
        e.id = r.id;
        edges.push(e);
    }
    let graph = DirectedMultigraph::build(n, edges).map_err(|source| DataError::Graph {
        path: origin.to_string(),
        source,
    })?;
    Ok(EdgeList {
        graph,
        names: (!numeric).then_some(names),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, DataError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_err(path, e))
}

pub fn write_edge_csv(path: &Path, g: &DirectedMultigraph) -> Result<(), DataError> {
    let mut w = create(path)?;
    write_edge_csv_to(&mut w, g).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_edge_csv_to<W: Write>(w: &mut W, g: &DirectedMultigraph) -> std::io::Result<()> {
    let k = g.edge_feature_dim();
    write!(w, "edge_id,src,dst,timestamp")?;
    for i in 0..k {
        write!(w, ",feat_{i}")?;
    }
    writeln!(w)?;
    for e in g.edges() {
        write!(w, "{},{},{},{}", e.id, e.src, e.dst, e.timestamp)?;
        for f in &e.features {
            write!(w, ",{f}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_ports_csv(path: &Path, p: &PortAssignment) -> Result<(), DataError> {
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(w, "edge_id,in_port,out_port")?;
        for e in 0..p.num_edges() {
            writeln!(w, "{},{},{}", e, p.in_port[e], p.out_port[e])?;
        }
        w.flush()
    };
    run(&mut w).map_err(|e| io_err(path, e))
}

pub fn read_ports_csv(path: &Path) -> Result<PortAssignment, DataError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<(usize, u32, u32)> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = || DataError::Parse {
            path: path_str(path),
            line: i + 2,
            msg: "malformed port row".into(),
        };
        let get = |c: usize| rec.get(c).ok_or_else(bad);
        rows.push((
            get(0)?.parse().map_err(|_| bad())?,
            get(1)?.parse().map_err(|_| bad())?,
            get(2)?.parse().map_err(|_| bad())?,
        ));
    }
    rows.sort_unstable();
    Ok(PortAssignment {
        in_port: rows.iter().map(|r| r.1).collect(),
        out_port: rows.iter().map(|r| r.2).collect(),
    })
}

pub fn write_labels_csv(path: &Path, labels: &LabelMatrix) -> Result<(), DataError> {
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        write!(w, "node_id")?;
        for t in TaskId::ALL {
            write!(w, ",{}", t.column())?;
        }
        writeln!(w)?;
        for v in 0..labels.num_nodes() {
            write!(w, "{v}")?;
            for y in labels.row(v) {
                write!(w, ",{y}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    run(&mut w).map_err(|e| io_err(path, e))
}

pub fn read_labels_csv(path: &Path) -> Result<LabelMatrix, DataError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = || DataError::Parse {
            path: path_str(path),
            line: i + 2,
            msg: "malformed label row".into(),
        };
        if rec.len() != 12 {
            return Err(bad());
        }
        let row = (1..12)
            .map(|c| match &rec[c] {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        rows.push(row);
    }
    let mut m = LabelMatrix::zeros(rows.len());
    for t in TaskId::ALL {
        let col: Vec<u8> = rows.iter().map(|r| r[t.index()]).collect();
        m.set_column(t, &col);
    }
    Ok(m)
}

/// Positive-ratio summary written next to label files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelStats {
    pub num_nodes: usize,
    pub positive_ratio: Vec<(String, f64)>,
}

impl LabelStats {
    pub fn new(labels: &LabelMatrix) -> Self {
        let r = labels.positive_ratios();
        Self {
            num_nodes: labels.num_nodes(),
            positive_ratio: TaskId::ALL
                .iter()
                .map(|t| (t.column().to_string(), r[t.index()]))
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DataError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| DataError::Json {
        path: path_str(path),
        source,
    })?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, DataError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| DataError::Json {
        path: path_str(path),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{label_all, Thresholds};

    #[test]
    fn padding_keeps_edges() {
        let el = parse_edge_csv("src,dst,timestamp\n0,1,5\n".as_bytes(), "mem").unwrap();
        let padded = el.clone().with_num_nodes(4).unwrap();
        assert_eq!(padded.graph.num_nodes(), 4);
        assert_eq!(padded.graph.edges(), el.graph.edges());
    }

    #[test]
    fn named_nodes_are_interned() {
        let text = "src,dst,timestamp\nA,B,1\nB,C,2\nA,C,0\n";
        let el = parse_edge_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(el.graph.num_nodes(), 3);
        assert_eq!(el.resolve("C"), Some(2));
        assert_eq!(el.name(1), "B");
        assert_eq!(el.graph.edge(2).src, 0);
    }

    #[test]
    fn numeric_nodes_and_features() {
        let text = "edge_id,src,dst,timestamp,feat_0,feat_1\n1,0,3,5,0.5,2\n0,2,1,4,1,-1\n";
        let el = parse_edge_csv(text.as_bytes(), "mem").unwrap();
        assert!(el.names.is_none());
        assert_eq!(el.graph.num_nodes(), 4);
        assert_eq!(el.graph.edge(0).features, vec![1.0, -1.0]);
        assert_eq!(el.graph.edge(1).dst, 3);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "src,dst,timestamp\n0,1,x\n";
        let err = parse_edge_csv(text.as_bytes(), "g.csv").unwrap_err();
        assert!(err.to_string().contains("g.csv, line 2"), "{err}");
        let err = parse_edge_csv("a,b\n".as_bytes(), "g.csv").unwrap_err();
        assert!(err.to_string().contains("src"));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = crate::generator::random_circulant(&crate::generator::GeneratorParams::new(
            50, 4.0, 3.0, 1,
        ));
        let p = dir.path().join("g.csv");
        write_edge_csv(&p, &g).unwrap();
        assert_eq!(read_edge_csv(&p).unwrap().graph.edges(), g.edges());

        let ports = crate::ports::assign_ports(&g);
        let pp = dir.path().join("p.csv");
        write_ports_csv(&pp, &ports).unwrap();
        assert_eq!(read_ports_csv(&pp).unwrap(), ports);

        let labels = label_all(&g, Thresholds::default());
        let lp = dir.path().join("l.csv");
        write_labels_csv(&lp, &labels).unwrap();
        assert_eq!(read_labels_csv(&lp).unwrap(), labels);
        let header = std::fs::read_to_string(&lp).unwrap();
        assert!(header.starts_with("node_id,deg_in,deg_out,fan_in,fan_out,c2,c3,c4,c5,c6,sg,bc\n"));
    }
}
