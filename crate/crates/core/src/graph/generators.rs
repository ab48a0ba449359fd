//! Synthetic graphs for tests and benchmarks.
//!
//! `path`, `star` and `power_law` are symmetric (every edge has its reverse),
//! so none of them has a vertex without out-edges when `n >= 2`.

use super::load::uniform_weight;
use super::Graph;
use crate::rng::SlotRng;

/// Path `0 - 1 - ... - (n-1)` with edges in both directions.
pub fn path(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * n.saturating_sub(1));
    for i in 1..n as u32 {
        edges.push((i - 1, i));
        edges.push((i, i - 1));
    }
    Graph::from_edges(n, &edges)
}

/// Star with centre 0 and `n - 1` spokes, edges in both directions.
pub fn star(n: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * n.saturating_sub(1));
    for i in 1..n as u32 {
        edges.push((0, i));
        edges.push((i, 0));
    }
    Graph::from_edges(n, &edges)
}

/// Preferential attachment: starts from a clique on `m + 1` vertices, then
/// each new vertex links to `m` distinct existing vertices chosen with
/// probability proportional to degree. Undirected.
pub fn power_law(n: usize, m: usize, seed: u64) -> Graph {
    let m = m.max(1);
    let core = (m + 1).min(n);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    // Each undirected edge contributes both endpoints here, so a uniform pick
    // from this list is a degree-proportional pick.
    let mut endpoints: Vec<u32> = Vec::new();
    for a in 0..core as u32 {
        for b in (a + 1)..core as u32 {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    let mut rng = SlotRng::seeded(seed, 0x5041);
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    for v in core as u32..n as u32 {
        chosen.clear();
        while chosen.len() < m.min(v as usize) {
            let u = endpoints[rng.below(endpoints.len())];
            if !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for &u in &chosen {
            edges.push((v, u));
            endpoints.extend([v, u]);
        }
    }
    let sym: Vec<(u32, u32)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    Graph::from_edges(n, &sym)
}

/// `n_edges` directed edges with uniformly random endpoints (self-loops allowed).
pub fn uniform_random(n: usize, n_edges: usize, seed: u64) -> Graph {
    let mut rng = SlotRng::seeded(seed, 0x5552);
    let edges: Vec<(u32, u32)> = (0..n_edges)
        .map(|_| (rng.below(n) as u32, rng.below(n) as u32))
        .collect();
    Graph::from_edges(n, &edges)
}

/// Copy of `graph` with each edge weight drawn uniformly from `range`.
pub fn with_random_weights(graph: &Graph, range: (f64, f64), seed: u64) -> Graph {
    let mut rng = SlotRng::seeded(seed, 0x5747);
    let mut src = Vec::with_capacity(graph.n_edges());
    let mut dst = Vec::with_capacity(graph.n_edges());
    let mut w = Vec::with_capacity(graph.n_edges());
    for (s, d, _) in graph.edges() {
        src.push(s.0);
        dst.push(d.0);
        w.push(uniform_weight(&mut rng, range.0, range.1));
    }
    let g = Graph::build(graph.n_vertices(), &src, &dst, Some(&w));
    match graph.remap() {
        Some(r) => g.with_remap(r.to_vec()),
        None => g,
    }
}
