//! Binary graph cache.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic      4 bytes  "NDGR"
//! version    u32      1
//! n_vertices u64
//! n_edges    u64
//! flags      u32      bit 0: weights present, bit 1: remap present
//! offsets    u64 x (n_vertices + 1)
//! indices    u32 x n_edges
//! weights    f32 x n_edges          (if bit 0)
//! remap      u64 x n_vertices       (if bit 1)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Graph;
use crate::error::GraphError;

pub const CACHE_MAGIC: &[u8; 4] = b"NDGR";
pub const CACHE_VERSION: u32 = 1;

const HAS_WEIGHTS: u32 = 1;
const HAS_REMAP: u32 = 2;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> GraphError + '_ {
    move |source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_cache(graph: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    encode(graph, &mut w).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn encode(graph: &Graph, w: &mut impl Write) -> std::io::Result<()> {
    let mut flags = 0;
    if graph.is_weighted() {
        flags |= HAS_WEIGHTS;
    }
    if graph.remap().is_some() {
        flags |= HAS_REMAP;
    }
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(graph.n_vertices() as u64).to_le_bytes())?;
    w.write_all(&(graph.n_edges() as u64).to_le_bytes())?;
    w.write_all(&flags.to_le_bytes())?;
    for &o in graph.row_offsets() {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for v in graph.col_indices() {
        w.write_all(&v.0.to_le_bytes())?;
    }
    if let Some(weights) = graph.raw_weights() {
        for x in weights {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    if let Some(remap) = graph.remap() {
        for x in remap {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_cache(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = BufReader::new(file);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err(path))?;
    decode(&bytes)
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GraphError> {
        if self.buf.len() < n {
            return Err(GraphError::BadCache("truncated file".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }
    fn u32(&mut self) -> Result<u32, GraphError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, GraphError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f32(&mut self) -> Result<f32, GraphError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

fn decode(bytes: &[u8]) -> Result<Graph, GraphError> {
    let mut c = Cursor { buf: bytes };
    if c.take(4)? != CACHE_MAGIC {
        return Err(GraphError::BadCache("bad magic".into()));
    }
    let version = c.u32()?;
    if version != CACHE_VERSION {
        return Err(GraphError::BadCache(format!("unsupported version {version}")));
    }
    let n = c.u64()? as usize;
    let m = c.u64()? as usize;
    let flags = c.u32()?;

    let offsets = (0..=n).map(|_| c.u64().map(|x| x as usize)).collect::<Result<Vec<_>, _>>()?;
    if offsets[0] != 0 || offsets[n] != m || offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(GraphError::BadCache("inconsistent row offsets".into()));
    }
    let targets = (0..m).map(|_| c.u32()).collect::<Result<Vec<_>, _>>()?;
    if targets.iter().any(|&t| t as usize >= n) {
        return Err(GraphError::BadCache("target out of range".into()));
    }
    let weights = if flags & HAS_WEIGHTS != 0 {
        Some((0..m).map(|_| c.f32()).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let remap = if flags & HAS_REMAP != 0 {
        Some((0..n).map(|_| c.u64()).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };

    let mut sources = Vec::with_capacity(m);
    for v in 0..n {
        sources.extend(std::iter::repeat_n(v as u32, offsets[v + 1] - offsets[v]));
    }
    let g = Graph::build(n, &sources, &targets, weights.as_deref());
    Ok(match remap {
        Some(r) => g.with_remap(r),
        None => g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generators, load::parse_edge_list, LoadOptions};

    #[test]
    fn round_trip_weighted_with_remap() {
        let text = "3 9 1.5\n9 3 2.0\n9 12 0.5\n";
        let g = parse_edge_list(std::io::Cursor::new(text), &LoadOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.ndgr");
        write_cache(&g, &p).unwrap();
        assert_eq!(read_cache(&p).unwrap(), g);
    }

    #[test]
    fn round_trip_unweighted() {
        let g = generators::power_law(300, 2, 4);
        let mut buf = Vec::new();
        encode(&g, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"NDGR");
        assert_eq!(decode(&buf).unwrap(), g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(decode(b"XXXX"), Err(GraphError::BadCache(_))));
        let g = generators::path(5);
        let mut buf = Vec::new();
        encode(&g, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(decode(&buf), Err(GraphError::BadCache(_))));
    }
}
