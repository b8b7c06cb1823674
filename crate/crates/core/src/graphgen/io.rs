use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;

/// A graph read from an edge list together with the original node ids.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SocialGraph,
    /// `ids[i]` is the id that agent `i` had in the file.
    pub ids: Vec<i64>,
}

/// Reads an edge list from a file. See [`read_edge_list`].
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_edge_list(BufReader::new(file), path)
}

/// Parses `u v` or `u v w` lines. Blank lines and lines starting with `#`
/// are ignored, repeated pairs keep their first weight, and self-loops are
/// dropped. Ids are renumbered `0..n` in increasing order of original id.
/// `source` only labels error messages.
pub fn read_edge_list<R: BufRead>(reader: R, source: impl Into<PathBuf>) -> Result<LoadedGraph> {
    let source = source.into();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.clone(),
        line,
        message,
    };
    let mut raw: Vec<(i64, i64, f64)> = Vec::new();
    let mut ids = BTreeSet::new();
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| Error::io(&source, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 2 or 3 fields, found {}", fields.len()),
            ));
        }
        let id = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| parse_err(lineno, format!("`{s}` is not an integer node id")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = match fields.get(2) {
            None => 1.0,
            Some(s) => {
                let w: f64 = s
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("`{s}` is not a number")))?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(parse_err(lineno, format!("weight {w} must be positive")));
                }
                w
            }
        };
        ids.insert(u);
        ids.insert(v);
        if u != v {
            raw.push((u, v, w));
        }
    }
    let ids: Vec<i64> = ids.into_iter().collect();
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut seen = HashMap::new();
    for (u, v, w) in raw {
        let (a, b) = (index[&u], index[&v]);
        let key = (a.min(b), a.max(b));
        seen.entry(key).or_insert(w);
    }
    let mut edges: Vec<_> = seen.into_iter().map(|((a, b), w)| (a, b, w)).collect();
    edges.sort_by_key(|&(a, b, _)| (a, b));
    let graph = SocialGraph::from_edges(ids.len(), edges)?;
    Ok(LoadedGraph { graph, ids })
}

/// Writes `u v` lines, or `u v w` lines when `weighted` is set.
pub fn write_edge_list<W: Write>(
    graph: &SocialGraph,
    mut out: W,
    weighted: bool,
) -> std::io::Result<()> {
    writeln!(
        out,
        "# {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    )?;
    for e in graph.edges() {
        if weighted {
            writeln!(out, "{} {} {}", e.u, e.v, e.w)?;
        } else {
            writeln!(out, "{} {}", e.u, e.v)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<LoadedGraph> {
        read_edge_list(text.as_bytes(), "test")
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = read("# c\n0 1\n\n1 2\n").unwrap();
        assert_eq!(g.graph.node_count(), 3);
        assert_eq!(g.graph.edge_count(), 2);
    }

    #[test]
    fn duplicates_collapse_and_loops_drop() {
        let g = read("0 1\n1 0\n2 2\n").unwrap();
        assert_eq!(g.graph.edge_count(), 1);
        assert_eq!(g.graph.node_count(), 3);
    }

    #[test]
    fn ids_are_renumbered() {
        let g = read("10 30\n30 20\n").unwrap();
        assert_eq!(g.ids, vec![10, 20, 30]);
        assert!(g.graph.weight(0, 2).is_some());
        assert!(g.graph.weight(1, 2).is_some());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match read("0 1\n# x\n1 two\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read("0 1 2 3\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read("0 1 -1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn weighted_round_trip() {
        let g = SocialGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 4.0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf, true).unwrap();
        let back = read_edge_list(buf.as_slice(), "buf").unwrap();
        assert_eq!(back.graph, g);
    }
}
