//! Plain-text edge lists and label files.
//!
//! Edge lists hold one `u v [w]` line per edge with 0-based node ids; lines
//! starting with `#` are comments, except `# nodes: N`, which fixes the node
//! count so isolated trailing nodes survive a round trip.

use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use super::{GraphSource, PlantedGraph};
use crate::error::{Error, Result};
use crate::linalg::SparseSymMatrix;

/// A symmetric simple graph read from an edge list, with ingestion counts.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub adjacency: SparseSymMatrix,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

impl LoadedGraph {
    /// Attaches labels (or a single group when absent).
    pub fn into_planted(self, path: &Path, labels: Option<Vec<usize>>) -> Result<PlantedGraph> {
        let n = self.adjacency.n();
        let labels = labels.unwrap_or_else(|| vec![0; n]);
        if labels.len() != n {
            return Err(Error::Infeasible(format!("{} labels for {n} nodes", labels.len())));
        }
        let q = labels.iter().max().map_or(1, |&m| m + 1);
        Ok(PlantedGraph {
            adjacency: self.adjacency,
            labels,
            q,
            source: GraphSource::EdgeList {
                path: path.display().to_string(),
            },
            injections: Vec::new(),
            seed: 0,
        })
    }
}

/// Reads an edge list, symmetrizing it, keeping the first weight of repeated
/// pairs and dropping self-loops.
pub fn load_edge_list(path: &Path) -> Result<LoadedGraph> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut declared = 0usize;
    let mut max_id = None::<usize>;
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut self_loops = 0;
    let mut duplicates = 0;
    for (idx, line) in file.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('#') {
            if let Some(rest) = comment.trim().strip_prefix("nodes:") {
                declared = rest.trim().parse().map_err(|e| err(lineno, format!("bad node count: {e}")))?;
            }
            continue;
        }
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(lineno, format!("expected `u v [w]`, got {t:?}")));
        }
        let u: usize = fields[0].parse().map_err(|e| err(lineno, format!("bad node id {:?}: {e}", fields[0])))?;
        let v: usize = fields[1].parse().map_err(|e| err(lineno, format!("bad node id {:?}: {e}", fields[1])))?;
        let w: f64 = match fields.get(2) {
            Some(s) => s.parse().map_err(|e| err(lineno, format!("bad weight {s:?}: {e}")))?,
            None => 1.0,
        };
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if edges.contains_key(&key) {
            duplicates += 1;
        } else {
            edges.insert(key, w);
        }
    }
    let n = declared.max(max_id.map_or(0, |m| m + 1));
    Ok(LoadedGraph {
        adjacency: SparseSymMatrix::from_undirected(n, edges.into_iter().map(|((u, v), w)| (u, v, w)))?,
        self_loops_dropped: self_loops,
        duplicates_collapsed: duplicates,
    })
}

/// A labelled graph read from GML.
#[derive(Debug, Clone, PartialEq)]
pub struct GmlGraph {
    pub adjacency: SparseSymMatrix,
    /// `value` attribute of each node (0 when absent), in file order.
    pub values: Vec<i64>,
}

/// Reads the subset of GML used by common network datasets: `node [ id ..
/// value .. ]` and `edge [ source .. target .. ]` blocks. Node ids may be
/// arbitrary integers; nodes are renumbered in file order. Edge direction,
/// self-loops and repeated pairs are discarded.
pub fn load_gml(path: &Path) -> Result<GmlGraph> {
    let text = std::fs::read_to_string(path)?;
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    // (token, line) pairs; quoted strings become a single token.
    let mut tokens: Vec<(&str, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut rest = line.trim_start();
        while !rest.is_empty() {
            let end = if let Some(body) = rest.strip_prefix('"') {
                body.find('"').map(|k| k + 2).ok_or_else(|| err(idx + 1, "unterminated string".into()))?
            } else {
                rest.find(char::is_whitespace).unwrap_or(rest.len())
            };
            tokens.push((&rest[..end], idx + 1));
            rest = rest[end..].trim_start();
        }
    }
    let mut ids: BTreeMap<i64, usize> = BTreeMap::new();
    let mut values = Vec::new();
    let mut raw_edges = Vec::new();
    let mut k = 0;
    while k < tokens.len() {
        let (tok, line) = tokens[k];
        if (tok == "node" || tok == "edge") && tokens.get(k + 1).map(|t| t.0) == Some("[") {
            let mut attrs: BTreeMap<&str, (&str, usize)> = BTreeMap::new();
            let mut j = k + 2;
            let mut depth = 0usize;
            while j < tokens.len() {
                match tokens[j].0 {
                    "[" => depth += 1,
                    "]" if depth == 0 => break,
                    "]" => depth -= 1,
                    key if depth == 0 && j + 1 < tokens.len() && tokens[j + 1].0 != "[" => {
                        attrs.entry(key).or_insert(tokens[j + 1]);
                        j += 1;
                    }
                    _ => {}
                }
                j += 1;
            }
            if j == tokens.len() {
                return Err(err(line, format!("unclosed {tok} block")));
            }
            let int = |key: &str| -> Result<Option<i64>> {
                attrs.get(key).map(|&(v, l)| v.parse::<i64>().map_err(|e| err(l, format!("bad {key} {v:?}: {e}")))).transpose()
            };
            if tok == "node" {
                let id = int("id")?.ok_or_else(|| err(line, "node without id".into()))?;
                if ids.insert(id, values.len()).is_some() {
                    return Err(err(line, format!("duplicate node id {id}")));
                }
                values.push(int("value")?.unwrap_or(0));
            } else {
                let s = int("source")?.ok_or_else(|| err(line, "edge without source".into()))?;
                let t = int("target")?.ok_or_else(|| err(line, "edge without target".into()))?;
                raw_edges.push((s, t, line));
            }
            k = j + 1;
        } else {
            k += 1;
        }
    }
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (s, t, line) in raw_edges {
        let lookup = |id: i64| ids.get(&id).copied().ok_or_else(|| err(line, format!("edge refers to unknown node {id}")));
        let (u, v) = (lookup(s)?, lookup(t)?);
        if u != v {
            edges.insert((u.min(v), u.max(v)), 1.0);
        }
    }
    Ok(GmlGraph {
        adjacency: SparseSymMatrix::from_undirected(values.len(), edges.into_iter().map(|((u, v), w)| (u, v, w)))?,
        values,
    })
}

/// Writes each undirected edge once as `u v` (or `u v w` for weighted graphs).
pub fn write_edge_list<W: Write>(a: &SparseSymMatrix, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# nodes: {}", a.n())?;
    let weighted = !a.is_unweighted();
    for (i, j, x) in a.upper_entries() {
        if weighted {
            writeln!(w, "{i} {j} {x:?}")?;
        } else {
            writeln!(w, "{i} {j}")?;
        }
    }
    Ok(())
}

/// One label per line; `#` comments and blank lines are skipped.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        labels.push(t.parse().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("bad label {t:?}: {e}"),
        })?);
    }
    Ok(labels)
}

pub fn write_labels<W: Write>(labels: &[usize], mut w: W) -> std::io::Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

/// Nodes of the largest connected component in increasing order (ties go to
/// the component containing the smallest node id).
pub fn largest_component(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.n();
    let mut comp = vec![usize::MAX; n];
    let mut best: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = start;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &v in a.row(u).0 {
                if comp[v] == usize::MAX {
                    comp[v] = start;
                    queue.push_back(v);
                }
            }
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best.sort_unstable();
    best
}

/// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
pub fn induced_subgraph(a: &SparseSymMatrix, nodes: &[usize]) -> Result<SparseSymMatrix> {
    let mut index = vec![usize::MAX; a.n()];
    for (k, &u) in nodes.iter().enumerate() {
        index[u] = k;
    }
    let entries = a.upper_entries().filter_map(|(i, j, w)| (index[i] != usize::MAX && index[j] != usize::MAX).then(|| (index[i], index[j], w)));
    SparseSymMatrix::from_undirected(nodes.len(), entries.collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn path_graph_from_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let g = load_edge_list(&write(&dir, "p3.txt", "0 1\n1 2\n")).unwrap();
        assert_eq!(g.adjacency.n(), 3);
        assert_eq!(g.adjacency.edge_count(), 2);
        assert!(g.adjacency.contains(1, 0) && g.adjacency.contains(2, 1));
    }

    #[test]
    fn duplicates_and_self_loops() {
        let dir = tempfile::tempdir().unwrap();
        let g = load_edge_list(&write(&dir, "d.txt", "# comment\n0 1\n0 1\n1 0\n2 2\n")).unwrap();
        assert_eq!(g.adjacency.edge_count(), 1);
        assert_eq!(g.duplicates_collapsed, 2);
        assert_eq!(g.self_loops_dropped, 1);
        assert_eq!(g.adjacency.n(), 3);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.txt", "0 1\n\n1 x\n");
        match load_edge_list(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weighted_round_trip_keeps_isolated_nodes() {
        let a = SparseSymMatrix::from_undirected(6, [(0, 1, 0.5), (2, 3, -1.25)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.txt");
        write_edge_list(&a, std::fs::File::create(&p).unwrap()).unwrap();
        assert_eq!(load_edge_list(&p).unwrap().adjacency, a);
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.txt");
        write_labels(&[0, 1, 1, 2], std::fs::File::create(&p).unwrap()).unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![0, 1, 1, 2]);
    }

    #[test]
    fn gml_blocks_and_quoted_labels() {
        let dir = tempfile::tempdir().unwrap();
        let text = "graph\n[\n  directed 1\n  node\n  [\n    id 10\n    label \"a [b] c\"\n    value 1\n  ]\n  node [ id 20 value 0 ]\n  node [ id 30 ]\n  edge [ source 10 target 20 ]\n  edge [ source 20 target 10 ]\n  edge [ source 30 target 30 ]\n]\n";
        let g = load_gml(&write(&dir, "g.gml", text)).unwrap();
        assert_eq!(g.values, vec![1, 0, 0]);
        assert_eq!(g.adjacency.n(), 3);
        assert_eq!(g.adjacency.edge_count(), 1);
        assert!(g.adjacency.contains(0, 1));
    }

    #[test]
    fn gml_unknown_endpoint() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.gml", "graph [\n node [ id 1 ]\n edge [ source 1 target 2 ]\n]\n");
        match load_gml(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn giant_component() {
        let a = SparseSymMatrix::from_undirected(7, [(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0)]).unwrap();
        assert_eq!(largest_component(&a), vec![2, 3, 4, 5]);
        let sub = induced_subgraph(&a, &[2, 3, 4, 5]).unwrap();
        assert_eq!(sub.n(), 4);
        assert_eq!(sub.edge_count(), 3);
        assert!(sub.contains(0, 1) && sub.contains(2, 3));
    }
}
