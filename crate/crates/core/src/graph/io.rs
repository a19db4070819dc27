//! Edge-list text format: a header line `n m`, then `m` lines `u v w` with
//! 0-based vertex ids. Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use super::WeightedGraph;
use crate::error::{Error, Result};

pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing header line".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            msg: format!("expected header `n m`, got {header:?}"),
        });
    }
    let n: usize = parse_field(fields[0], hline, "vertex count")?;
    let m: usize = parse_field(fields[1], hline, "edge count")?;

    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (line, body) in lines {
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected `u v w`, got {body:?}"),
            });
        }
        let u: usize = parse_field(fields[0], line, "vertex id")?;
        let v: usize = parse_field(fields[1], line, "vertex id")?;
        let w: f64 = parse_field(fields[2], line, "weight")?;
        for x in [u, v] {
            if x >= n {
                return Err(Error::Parse {
                    line,
                    msg: Error::VertexOutOfRange { vertex: x, n }.to_string(),
                });
            }
        }
        let problem = if u == v {
            Some(Error::SelfLoop(u))
        } else if !(w.is_finite() && w > 0.0) {
            Some(Error::BadWeight { u, v, w })
        } else if !seen.insert((u.min(v), u.max(v))) {
            Some(Error::DuplicateEdge(u.min(v), u.max(v)))
        } else {
            None
        };
        if let Some(err) = problem {
            return Err(Error::Parse {
                line,
                msg: err.to_string(),
            });
        }
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    WeightedGraph::new(n, edges)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} {s:?}"),
    })
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

/// Weights are written with Rust's shortest round-trip float formatting, so
/// `parse_edge_list(&write_edge_list(g))` reproduces `g` bit for bit.
pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {:?}", e.u, e.v, e.w);
    }
    out
}

pub fn save_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_edge_list(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_triangle() {
        let g = parse_edge_list("3 3\n0 1 1.0\n1 2 1.0\n0 2 1.0\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.has_edge(0, 2));
    }

    #[test]
    fn single_edge_and_comments() {
        let g = parse_edge_list("# a comment\n2 1\n\n# another\n0 1 0.25\n").unwrap();
        assert_eq!(g.weighted_degree(0), 0.25);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_edge_list("2 1\n0 0 1.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("self-loop"));

        let err = parse_edge_list("3 2\n0 1 1.0\n1 0 2.0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(err.to_string().contains("duplicate"));

        let err = parse_edge_list("2 1\n0 1 -1\n").unwrap_err();
        assert!(err.to_string().contains("invalid weight"));

        let err = parse_edge_list("2 1\n0 1 x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = parse_edge_list("2 1\n0 5 1\n").unwrap_err();
        assert!(err.to_string().contains("out of range"));

        let err = parse_edge_list("3 2\n0 1 1\n").unwrap_err();
        assert!(err.to_string().contains("declares 2 edges"));

        assert!(parse_edge_list("").is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.el");
        let g = WeightedGraph::new(4, [(0, 1, 0.1), (1, 2, 1.0 / 3.0), (2, 3, 7.5)]).unwrap();
        save_graph(&g, &path).unwrap();
        let h = load_graph(&path).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert!(load_graph(dir.path().join("missing.el")).is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip_is_exact(
            weights in prop::collection::vec(1e-300f64..1e300, 1..20)
        ) {
            let n = weights.len() + 1;
            let g = WeightedGraph::new(n, weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w))).unwrap();
            let h = parse_edge_list(&write_edge_list(&g)).unwrap();
            for (a, b) in g.edges().iter().zip(h.edges()) {
                prop_assert_eq!(a.w.to_bits(), b.w.to_bits());
            }
        }
    }
}
