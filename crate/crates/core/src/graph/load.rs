use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::Graph;
use crate::error::GraphError;
use crate::rng::SlotRng;

/// Edge-list ingest options.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Give every edge a weight; lines without one draw from `weight_range`.
    pub weighted: bool,
    /// Add the reverse of every non-loop edge.
    pub undirected: bool,
    /// Half-open range for generated weights.
    pub weight_range: (f64, f64),
    /// Seed for generated weights.
    pub seed: u64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            weighted: false,
            undirected: false,
            weight_range: (1.0, 5.0),
            seed: 0,
        }
    }
}

/// Reads a whitespace-separated `src dst [weight]` file. Lines starting with
/// `#` (or `%`) and blank lines are skipped. Vertex ids may be sparse; they
/// are compacted in ascending order and the original ids kept as the remap
/// table.
pub fn load_edge_list(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Graph, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_edge_list(BufReader::new(file), opts).map_err(|e| match e {
        GraphError::Io { source, .. } => GraphError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Opens `path` as a binary cache if it starts with the cache magic,
/// otherwise as an edge list. An unweighted cache gets generated weights
/// when `opts.weighted` is set.
pub fn open_graph(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Graph, GraphError> {
    let path = path.as_ref();
    let mut magic = [0u8; 4];
    let is_cache = File::open(path)
        .and_then(|mut f| std::io::Read::read_exact(&mut f, &mut magic))
        .is_ok()
        && &magic == super::CACHE_MAGIC;
    if !is_cache {
        return load_edge_list(path, opts);
    }
    let g = super::read_cache(path)?;
    if opts.weighted && !g.is_weighted() {
        let (low, high) = opts.weight_range;
        if !(low.is_finite() && high.is_finite() && low < high && low >= 0.0) {
            return Err(GraphError::BadWeightRange { low, high });
        }
        return Ok(super::generators::with_random_weights(&g, opts.weight_range, opts.seed));
    }
    Ok(g)
}

pub fn parse_edge_list<R: BufRead>(reader: R, opts: &LoadOptions) -> Result<Graph, GraphError> {
    let (low, high) = opts.weight_range;
    if opts.weighted && !(low.is_finite() && high.is_finite() && low < high && low >= 0.0) {
        return Err(GraphError::BadWeightRange { low, high });
    }

    let mut src = Vec::new();
    let mut dst = Vec::new();
    let mut weights: Vec<Option<f32>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| GraphError::Io {
            path: Default::default(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let bad = |message: String| GraphError::Parse {
            line: lineno + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let s = fields.next().ok_or_else(|| bad("missing source".into()))?;
        let d = fields
            .next()
            .ok_or_else(|| bad("expected \"src dst [weight]\"".into()))?;
        let s: u64 = s.parse().map_err(|_| bad(format!("bad source id {s:?}")))?;
        let d: u64 = d.parse().map_err(|_| bad(format!("bad target id {d:?}")))?;
        let w = match fields.next() {
            Some(w) => {
                let w: f32 = w.parse().map_err(|_| bad(format!("bad weight {w:?}")))?;
                if !(w.is_finite() && w >= 0.0) {
                    return Err(bad(format!("weight must be finite and non-negative, got {w}")));
                }
                Some(w)
            }
            None => None,
        };
        if fields.next().is_some() {
            return Err(bad("trailing fields".into()));
        }
        src.push(s);
        dst.push(d);
        weights.push(w);
    }
    if src.is_empty() {
        return Err(GraphError::Empty);
    }

    let mut ids: Vec<u64> = src.iter().chain(dst.iter()).copied().collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() >= u32::MAX as usize {
        return Err(GraphError::Parse {
            line: 0,
            message: "too many vertices for 32-bit ids".into(),
        });
    }
    let dense = |x: u64| ids.binary_search(&x).unwrap() as u32;

    let any_weight = weights.iter().any(Option::is_some);
    let resolved: Option<Vec<f32>> = if opts.weighted || any_weight {
        let mut rng = SlotRng::seeded(opts.seed, 0x5745_4947);
        Some(
            weights
                .iter()
                .map(|w| match w {
                    Some(w) => *w,
                    None if opts.weighted => uniform_weight(&mut rng, low, high),
                    None => 1.0,
                })
                .collect(),
        )
    } else {
        None
    };

    let mut s32: Vec<u32> = src.iter().map(|&x| dense(x)).collect();
    let mut d32: Vec<u32> = dst.iter().map(|&x| dense(x)).collect();
    let mut w32 = resolved;
    if opts.undirected {
        let n = s32.len();
        for e in 0..n {
            if s32[e] != d32[e] {
                s32.push(d32[e]);
                d32.push(s32[e]);
                if let Some(w) = w32.as_mut() {
                    w.push(w[e]);
                }
            }
        }
    }

    Ok(Graph::build(ids.len(), &s32, &d32, w32.as_deref()).with_remap(ids))
}

/// Uniform draw from `[low, high)` that stays strictly below `high` after
/// rounding to `f32`.
pub(crate) fn uniform_weight(rng: &mut SlotRng, low: f64, high: f64) -> f32 {
    let w = (low + rng.uniform() * (high - low)) as f32;
    let h = high as f32;
    if w >= h {
        // nearest f32 below `high`, even if `low` itself rounds up to it
        f32::from_bits(h.to_bits() - 1)
    } else {
        w
    }
}
