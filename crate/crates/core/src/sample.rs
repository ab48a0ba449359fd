//! The growing output unit.

use crate::graph::VertexId;

/// One sample: its roots plus the vertices added at every step so far.
///
/// `step(i)` holds one slot per `next` invocation issued at step `i`, in
/// `(transit_idx, slot)` order; a slot may hold [`VertexId::NULL`]. A sample
/// that was not alive at some step has no entry for it (and none after).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub id: u64,
    initial_roots: Vec<VertexId>,
    roots: Vec<VertexId>,
    slots: Vec<VertexId>,
    slot_offsets: Vec<usize>,
    null_counts: Vec<usize>,
    edges: Vec<(VertexId, VertexId)>,
    edge_offsets: Vec<usize>,
    sampled: usize,
    pub(crate) fallback: bool,
}

impl Sample {
    pub fn new(id: u64, roots: Vec<VertexId>) -> Self {
        Self {
            id,
            initial_roots: roots.clone(),
            roots,
            slots: Vec::new(),
            slot_offsets: vec![0],
            null_counts: Vec::new(),
            edges: Vec::new(),
            edge_offsets: vec![0],
            sampled: 0,
            fallback: false,
        }
    }

    /// Roots the sample started with.
    pub fn initial_roots(&self) -> &[VertexId] {
        &self.initial_roots
    }

    /// Current root set. Only root-replacing apps (MultiRW) change it.
    pub fn roots(&self) -> &[VertexId] {
        &self.roots
    }

    pub fn roots_mut(&mut self) -> &mut Vec<VertexId> {
        &mut self.roots
    }

    /// Number of steps this sample has taken part in.
    pub fn steps_taken(&self) -> usize {
        self.null_counts.len()
    }

    fn step_slice(&self, i: usize) -> Option<&[VertexId]> {
        (i < self.steps_taken()).then(|| &self.slots[self.slot_offsets[i]..self.slot_offsets[i + 1]])
    }

    /// Slots written at step `i`; empty if the sample was finished by then.
    pub fn step(&self, i: usize) -> &[VertexId] {
        self.step_slice(i).unwrap_or(&[])
    }

    /// Slots of every step taken, in step order.
    pub fn step_vertices(&self) -> impl ExactSizeIterator<Item = &[VertexId]> + '_ {
        (0..self.steps_taken()).map(|i| self.step(i))
    }

    /// Non-NULL slot count at step `i`.
    pub fn non_null_count(&self, i: usize) -> usize {
        match self.step_slice(i) {
            Some(s) => s.len() - self.null_counts[i],
            None => 0,
        }
    }

    /// Edges recorded at step `i`, as `(transit, sampled)` pairs.
    pub fn edges(&self, i: usize) -> &[(VertexId, VertexId)] {
        if i < self.steps_taken() {
            &self.edges[self.edge_offsets[i]..self.edge_offsets[i + 1]]
        } else {
            &[]
        }
    }

    /// Edges of every step taken, in step order.
    pub fn recorded_edges(&self) -> impl ExactSizeIterator<Item = &[(VertexId, VertexId)]> + '_ {
        (0..self.steps_taken()).map(|i| self.edges(i))
    }

    /// Roots plus every non-NULL sampled vertex (duplicates counted).
    pub fn vertex_count(&self) -> usize {
        self.initial_roots.len() + self.sampled
    }

    /// Number of non-NULL sampled vertices, roots excluded.
    pub fn sampled_count(&self) -> usize {
        self.sampled
    }

    /// Whether the last step was flagged for sample-parallel processing.
    pub fn fallback_flag(&self) -> bool {
        self.fallback
    }

    /// Appends the slots of the next step.
    pub fn push_step(&mut self, slots: impl AsRef<[VertexId]>, edges: impl AsRef<[(VertexId, VertexId)]>) {
        let slots = slots.as_ref();
        let nulls = slots.iter().filter(|v| v.is_null()).count();
        self.sampled += slots.len() - nulls;
        self.null_counts.push(nulls);
        self.slots.extend_from_slice(slots);
        self.slot_offsets.push(self.slots.len());
        self.edges.extend_from_slice(edges.as_ref());
        self.edge_offsets.push(self.edges.len());
    }

    /// Replaces the slots of step `i` (used by unique-neighbour elimination).
    pub(crate) fn replace_step(&mut self, i: usize, slots: impl AsRef<[VertexId]>) {
        let slots = slots.as_ref();
        let (lo, hi) = (self.slot_offsets[i], self.slot_offsets[i + 1]);
        let old = hi - lo - self.null_counts[i];
        let nulls = slots.iter().filter(|v| v.is_null()).count();
        self.sampled = self.sampled - old + slots.len() - nulls;
        self.null_counts[i] = nulls;
        self.slots.splice(lo..hi, slots.iter().copied());
        let shift = slots.len() as isize - (hi - lo) as isize;
        for o in &mut self.slot_offsets[i + 1..] {
            *o = (*o as isize + shift) as usize;
        }
    }

    /// Vertices a transit at `step` may be drawn from with `back = 1`: the
    /// roots at step 0, otherwise the non-NULL vertices of step `step - 1`.
    pub fn candidates(&self, step: usize, back: usize) -> CandidateIter<'_> {
        if back > step + 1 || back == 0 {
            return CandidateIter::Slice([].iter());
        }
        if back == step + 1 {
            return CandidateIter::Slice(self.roots.iter());
        }
        let i = step - back;
        match self.step_slice(i) {
            Some(s) if self.null_counts[i] == 0 => CandidateIter::Slice(s.iter()),
            Some(s) => CandidateIter::Filtered(s.iter()),
            None => CandidateIter::Slice([].iter()),
        }
    }

    /// Number of candidates, see [`Sample::candidates`].
    pub fn candidate_count(&self, step: usize, back: usize) -> usize {
        if back == 0 || back > step + 1 {
            0
        } else if back == step + 1 {
            self.roots.len()
        } else {
            self.non_null_count(step - back)
        }
    }

    /// `s.prevVertex(back, pos)` as seen from step `step`: the `pos`-th
    /// non-NULL vertex added `back` steps earlier, where the roots act as
    /// step `-1`.
    pub fn prev_vertex(&self, step: usize, back: usize, pos: usize) -> Option<VertexId> {
        if back == 0 || back > step + 1 {
            return None;
        }
        if back == step + 1 {
            return self.roots.get(pos).copied();
        }
        let i = step - back;
        let s = self.step_slice(i)?;
        if self.null_counts[i] == 0 {
            s.get(pos).copied()
        } else {
            s.iter().filter(|v| !v.is_null()).nth(pos).copied()
        }
    }

    /// Roots and every sampled vertex, NULLs skipped.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.initial_roots
            .iter()
            .chain(self.slots.iter())
            .copied()
            .filter(|v| !v.is_null())
    }

    /// Linear membership test over sampled vertices and roots. Recent steps
    /// are scanned first since transits usually come from the last one.
    pub fn contains(&self, v: VertexId) -> bool {
        !v.is_null()
            && (self.slots.iter().rev().any(|&s| s == v)
                || self.roots.contains(&v)
                || self.initial_roots.contains(&v))
    }

    /// Sorted, deduplicated members (roots included).
    pub fn sorted_members(&self) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self.vertices().chain(self.roots.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Iterator returned by [`Sample::candidates`].
pub enum CandidateIter<'a> {
    Slice(std::slice::Iter<'a, VertexId>),
    Filtered(std::slice::Iter<'a, VertexId>),
}

impl Iterator for CandidateIter<'_> {
    type Item = VertexId;

    fn next(&mut self) -> Option<VertexId> {
        match self {
            CandidateIter::Slice(it) => it.next().copied(),
            CandidateIter::Filtered(it) => it.by_ref().copied().find(|v| !v.is_null()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    #[test]
    fn prev_vertex_skips_nulls_and_treats_roots_as_step_minus_one() {
        let mut s = Sample::new(0, vec![v(5)]);
        s.push_step(vec![v(1), VertexId::NULL, v(2)], vec![]);
        s.push_step(vec![v(7)], vec![]);
        assert_eq!(s.prev_vertex(0, 1, 0), Some(v(5)));
        assert_eq!(s.prev_vertex(1, 1, 1), Some(v(2)));
        assert_eq!(s.prev_vertex(1, 2, 0), Some(v(5)));
        assert_eq!(s.prev_vertex(2, 1, 0), Some(v(7)));
        assert_eq!(s.prev_vertex(2, 2, 0), Some(v(1)));
        assert_eq!(s.prev_vertex(0, 2, 0), None);
        assert_eq!(s.candidate_count(1, 1), 2);
        assert_eq!(s.candidates(1, 1).collect::<Vec<_>>(), vec![v(1), v(2)]);
    }

    #[test]
    fn counts_track_nulls() {
        let mut s = Sample::new(3, vec![v(0), v(1)]);
        s.push_step(vec![VertexId::NULL, v(4), v(4)], vec![]);
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.non_null_count(0), 2);
        s.replace_step(0, vec![v(4)]);
        assert_eq!(s.vertex_count(), 3);
        assert_eq!(s.step(5), &[]);
    }

    #[test]
    fn membership() {
        let mut s = Sample::new(0, vec![v(9)]);
        s.push_step(vec![v(3), VertexId::NULL], vec![]);
        assert!(s.contains(v(9)) && s.contains(v(3)));
        assert!(!s.contains(v(4)) && !s.contains(VertexId::NULL));
        assert_eq!(s.sorted_members(), vec![v(3), v(9)]);
    }
}
