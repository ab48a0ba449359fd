//! Unique-neighbour elimination and the two output layouts.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::graph::{Graph, VertexId};
use crate::sample::Sample;

/// Sorted distinct non-NULL values of `slots`.
pub fn dedup_vertices(slots: &[VertexId]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = slots.iter().copied().filter(|v| !v.is_null()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Replaces the slots of `step` with their sorted distinct non-NULL values.
pub fn dedup_step(sample: &mut Sample, step: usize) {
    if step >= sample.steps_taken() {
        return;
    }
    let unique = dedup_vertices(sample.step(step));
    sample.replace_step(step, unique);
}

/// Whether `sample` should take the sample-parallel path after `step`:
/// it produced some vertices at `step`, but fewer distinct ones than `m`.
pub fn fallback_check(sample: &Sample, step: usize, m: usize) -> bool {
    if step >= sample.steps_taken() {
        return false;
    }
    let distinct = dedup_vertices(sample.step(step)).len();
    distinct > 0 && distinct < m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One line per sample: roots then every step's vertices.
    FinalSamples,
    /// One block per step, each holding every sample's vertices of that step.
    PerStep,
}

impl Layout {
    pub fn as_str(self) -> &'static str {
        match self {
            Layout::FinalSamples => "final",
            Layout::PerStep => "per-step",
        }
    }

    fn code(self) -> u32 {
        match self {
            Layout::FinalSamples => 0,
            Layout::PerStep => 1,
        }
    }
}

impl std::str::FromStr for Layout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "final" => Ok(Layout::FinalSamples),
            "per-step" | "perstep" => Ok(Layout::PerStep),
            other => Err(format!("unknown layout '{other}' (expected final or per-step)")),
        }
    }
}

/// Vertices of one sample in original ids, NULL slots dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleRecord {
    pub id: u64,
    pub roots: Vec<u64>,
    pub steps: Vec<Vec<u64>>,
}

impl SampleRecord {
    /// Roots followed by every step in order.
    pub fn flat(&self) -> Vec<u64> {
        self.roots
            .iter()
            .chain(self.steps.iter().flatten())
            .copied()
            .collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len() + self.steps.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Final results of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSetOutput {
    pub layout: Layout,
    pub samples: Vec<SampleRecord>,
    /// Dense id to original id, when the loader compacted ids.
    pub remap: Option<Vec<u64>>,
}

impl SampleSetOutput {
    pub fn from_samples(samples: &[Sample], graph: &Graph, layout: Layout) -> Self {
        let map = |v: &VertexId| graph.original_id(*v);
        let records = samples
            .iter()
            .map(|s| SampleRecord {
                id: s.id,
                roots: s.initial_roots().iter().map(map).collect(),
                steps: s
                    .step_vertices()
                    .map(|st| st.iter().filter(|v| !v.is_null()).map(map).collect())
                    .collect(),
            })
            .collect();
        Self {
            layout,
            samples: records,
            remap: graph.remap().map(<[u64]>::to_vec),
        }
    }

    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    /// Largest number of steps any sample took.
    pub fn n_steps(&self) -> usize {
        self.samples.iter().map(|s| s.steps.len()).max().unwrap_or(0)
    }

    pub fn total_vertices(&self) -> usize {
        self.samples.iter().map(SampleRecord::len).sum()
    }

    /// Per-step view: `(sample id, vertices)` for samples that took `step`.
    pub fn step_block(&self, step: usize) -> Vec<(u64, &[u64])> {
        self.samples
            .iter()
            .filter_map(|s| s.steps.get(step).map(|v| (s.id, v.as_slice())))
            .collect()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        let line = |w: &mut W, id: u64, vs: &mut dyn Iterator<Item = &u64>| -> io::Result<()> {
            write!(w, "{id}:")?;
            for v in vs {
                write!(w, " {v}")?;
            }
            writeln!(w)
        };
        match self.layout {
            Layout::FinalSamples => {
                writeln!(w, "# layout=final samples={}", self.samples.len())?;
                for s in &self.samples {
                    line(&mut w, s.id, &mut s.roots.iter().chain(s.steps.iter().flatten()))?;
                }
            }
            Layout::PerStep => {
                writeln!(
                    w,
                    "# layout=per-step samples={} steps={}",
                    self.samples.len(),
                    self.n_steps()
                )?;
                if !self.samples.is_empty() {
                    writeln!(w, "roots:")?;
                    for s in &self.samples {
                        line(&mut w, s.id, &mut s.roots.iter())?;
                    }
                }
                for step in 0..self.n_steps() {
                    writeln!(w, "step {step}:")?;
                    for (id, vs) in self.step_block(step) {
                        line(&mut w, id, &mut vs.iter())?;
                    }
                }
            }
        }
        w.flush()
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("output is ASCII")
    }

    pub fn write_text_file(&self, path: &Path) -> io::Result<()> {
        self.write_text(BufWriter::new(File::create(path)?))
    }

    /// Writes the remap table as "dense original" lines; no-op without one.
    pub fn write_remap_file(&self, path: &Path) -> io::Result<()> {
        let Some(remap) = &self.remap else { return Ok(()) };
        let mut w = BufWriter::new(File::create(path)?);
        for (dense, orig) in remap.iter().enumerate() {
            writeln!(w, "{dense} {orig}")?;
        }
        w.flush()
    }

    /// Binary form: magic `NDSO`, version, layout, then per sample its id,
    /// roots and step arrays, all little-endian with u64 counts.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(SAMPLE_MAGIC)?;
        w.write_all(&SAMPLE_VERSION.to_le_bytes())?;
        w.write_all(&self.layout.code().to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        let put = |w: &mut W, vs: &[u64]| -> io::Result<()> {
            w.write_all(&(vs.len() as u64).to_le_bytes())?;
            for v in vs {
                w.write_all(&v.to_le_bytes())?;
            }
            Ok(())
        };
        for s in &self.samples {
            w.write_all(&s.id.to_le_bytes())?;
            put(&mut w, &s.roots)?;
            w.write_all(&(s.steps.len() as u64).to_le_bytes())?;
            for st in &s.steps {
                put(&mut w, st)?;
            }
        }
        w.flush()
    }

    pub fn read_binary<R: Read>(r: R) -> io::Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SAMPLE_MAGIC {
            return Err(invalid("bad magic"));
        }
        if read_u32(&mut r)? != SAMPLE_VERSION {
            return Err(invalid("unsupported version"));
        }
        let layout = match read_u32(&mut r)? {
            0 => Layout::FinalSamples,
            1 => Layout::PerStep,
            _ => return Err(invalid("bad layout")),
        };
        let n = read_u64(&mut r)?;
        let mut samples = Vec::new();
        for _ in 0..n {
            let id = read_u64(&mut r)?;
            let roots = read_ids(&mut r)?;
            let k = read_u64(&mut r)?;
            let steps = (0..k).map(|_| read_ids(&mut r)).collect::<io::Result<_>>()?;
            samples.push(SampleRecord { id, roots, steps });
        }
        if r.fill_buf()?.is_empty() {
            Ok(Self {
                layout,
                samples,
                remap: None,
            })
        } else {
            Err(invalid("trailing bytes"))
        }
    }
}

pub const SAMPLE_MAGIC: &[u8; 4] = b"NDSO";
pub const SAMPLE_VERSION: u32 = 1;

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("sample file: {msg}"))
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_ids<R: Read>(r: &mut R) -> io::Result<Vec<u64>> {
    let n = read_u64(r)?;
    if n > (1 << 40) {
        return Err(invalid("implausible length"));
    }
    (0..n).map(|_| read_u64(r)).collect()
}
