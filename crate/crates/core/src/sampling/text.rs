//! Flat text serialization.
//!
//! ```text
//! # wdrcm-graph v1 d=2 domain=torus L=10 seed=42 root=17 params={...}
//! v 0 -1.25 3.5 0.731
//! e 0 4
//! ```
//!
//! `root=-` marks an unrooted graph. Floats are written with the shortest
//! representation that parses back to the same bits.

use std::fmt::Write as _;

use super::graph::{MarkedGraph, RootedGraph};
use crate::error::{Error, Result};
use crate::model::{DomainShape, ModelParams, SpatialDomain, Vertex};

const MAGIC: &str = "# wdrcm-graph v1";

pub fn to_text(graph: &MarkedGraph, root: Option<usize>) -> String {
    let dom = graph.domain();
    let params = serde_json::to_string(graph.params()).expect("params serialize");
    let mut s = String::with_capacity(32 * (graph.n_vertices() + graph.n_edges()) + 256);
    let root = root.map_or("-".to_string(), |r| r.to_string());
    let _ = writeln!(
        s,
        "{MAGIC} d={} domain={} L={} seed={} root={} params={}",
        dom.dim,
        dom.shape,
        dom.side,
        graph.rng_seed(),
        root,
        params
    );
    for (i, v) in graph.vertices().iter().enumerate() {
        let _ = write!(s, "v {i}");
        for x in &v.position {
            let _ = write!(s, " {x}");
        }
        let _ = writeln!(s, " {}", v.mark);
    }
    for (i, j) in graph.edges() {
        let _ = writeln!(s, "e {i} {j}");
    }
    s
}

pub fn rooted_to_text(g: &RootedGraph) -> String {
    to_text(&g.graph, Some(g.root_index))
}

/// Parsed graph and optional root index.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedGraph {
    pub graph: MarkedGraph,
    pub root: Option<usize>,
}

fn perr(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("bad {what}")))
}

pub fn from_text(text: &str) -> Result<ParsedGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| perr(1, "missing graph header"))?
        .trim_start();
    let (fields, params_json) = rest
        .split_once("params=")
        .ok_or_else(|| perr(1, "missing params"))?;
    let params: ModelParams =
        serde_json::from_str(params_json.trim()).map_err(|e| perr(1, e.to_string()))?;
    let (mut d, mut shape, mut side, mut seed, mut root) = (None, None, None, None, None);
    for kv in fields.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| perr(1, format!("bad field {kv}")))?;
        match k {
            "d" => d = Some(num::<usize>(Some(v), 1, "d")?),
            "domain" => shape = Some(v.parse::<DomainShape>().map_err(|e| perr(1, e.to_string()))?),
            "L" => side = Some(num::<f64>(Some(v), 1, "L")?),
            "seed" => seed = Some(num::<u64>(Some(v), 1, "seed")?),
            "root" => {
                root = Some(if v == "-" {
                    None
                } else {
                    Some(num::<usize>(Some(v), 1, "root")?)
                })
            }
            _ => return Err(perr(1, format!("unknown field {k}"))),
        }
    }
    let d = d.ok_or_else(|| perr(1, "missing d"))?;
    let domain = SpatialDomain::new(
        shape.ok_or_else(|| perr(1, "missing domain"))?,
        side.ok_or_else(|| perr(1, "missing L"))?,
        d,
    )
    .map_err(|e| perr(1, e.to_string()))?;
    let seed = seed.ok_or_else(|| perr(1, "missing seed"))?;
    let root = root.ok_or_else(|| perr(1, "missing root"))?;

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            None => continue,
            Some("v") => {
                if !edges.is_empty() {
                    return Err(perr(ln, "vertex after edges"));
                }
                let idx: usize = num(tok.next(), ln, "vertex index")?;
                if idx != vertices.len() {
                    return Err(perr(ln, "vertex indices must be consecutive"));
                }
                let mut position = Vec::with_capacity(d);
                for _ in 0..d {
                    position.push(num::<f64>(tok.next(), ln, "coordinate")?);
                }
                let mark: f64 = num(tok.next(), ln, "mark")?;
                if tok.next().is_some() {
                    return Err(perr(ln, "trailing tokens"));
                }
                vertices.push(Vertex::new(position, mark).map_err(|e| perr(ln, e.to_string()))?);
            }
            Some("e") => {
                let i: usize = num(tok.next(), ln, "edge endpoint")?;
                let j: usize = num(tok.next(), ln, "edge endpoint")?;
                if tok.next().is_some() {
                    return Err(perr(ln, "trailing tokens"));
                }
                edges.push((i, j));
            }
            Some(other) => return Err(perr(ln, format!("unknown record {other:?}"))),
        }
    }
    let graph = MarkedGraph::from_edges(domain, vertices, edges, seed, params)?;
    if let Some(r) = root {
        if r >= graph.n_vertices() {
            return Err(perr(1, "root index out of range"));
        }
    }
    Ok(ParsedGraph { graph, root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_rooted_graph;
    use proptest::prelude::*;

    #[test]
    fn round_trip_is_exact() {
        let p = ModelParams::pa_polynomial(2, 0.5, 1.0, 2.0).unwrap().with_p(0.3).unwrap();
        let dom = SpatialDomain::torus(12.0, 2).unwrap();
        let g = sample_rooted_graph(&p, &dom, 5, true).unwrap();
        let text = rooted_to_text(&g);
        let back = from_text(&text).unwrap();
        assert_eq!(back.graph, g.graph);
        assert_eq!(back.root, Some(g.root_index));
        assert_eq!(to_text(&back.graph, back.root), text);
    }

    #[test]
    fn rejects_garbage() {
        assert!(from_text("").is_err());
        assert!(from_text("hello\n").is_err());
        let p = ModelParams::pa_polynomial(1, 0.5, 1.0, 2.0).unwrap();
        let g = MarkedGraph::from_edges(
            SpatialDomain::cube(4.0, 1).unwrap(),
            vec![Vertex::new(vec![0.0], 0.5).unwrap()],
            vec![],
            0,
            p,
        )
        .unwrap();
        let good = to_text(&g, None);
        assert!(from_text(&good).is_ok());
        assert!(from_text(&format!("{good}e 0 0\n")).is_err());
        assert!(from_text(&format!("{good}x 1\n")).is_err());
        assert!(from_text(&good.replace("v 0 0 0.5", "v 0 0 1.5")).is_err());
    }

    proptest! {
        #[test]
        fn floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let s = format!("{x}");
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
