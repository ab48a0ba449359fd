//! Counter-based random numbers.
//!
//! Every random decision in a run is addressed by an [`RngKey`]: the run seed
//! plus the logical coordinates of the decision (sample, step, transit index,
//! slot). The uniform stream for a key is a pure function of the key, so the
//! engines draw identical values for a slot no matter which worker executes it
//! or in which order.

/// Slot value reserved for the `stepTransits` decision of a (sample, step, transit).
pub const TRANSIT_SLOT: u64 = u64::MAX;
/// Step value reserved for choosing a sample's initial roots.
pub const INIT_STEP: u64 = u64::MAX;
/// Step value reserved for per-vertex draws made while loading or generating graphs.
pub const GRAPH_STEP: u64 = u64::MAX - 1;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Logical address of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngKey {
    pub seed: u64,
    pub sample_id: u64,
    pub step: u64,
    pub transit_idx: u64,
    pub slot: u64,
}

impl RngKey {
    pub fn new(seed: u64, sample_id: u64, step: u64, transit_idx: u64, slot: u64) -> Self {
        Self {
            seed,
            sample_id,
            step,
            transit_idx,
            slot,
        }
    }

    /// Key for the `next` invocation at (sample, step, transit, slot).
    pub fn slot(seed: u64, sample_id: u64, step: usize, transit_idx: usize, slot: usize) -> Self {
        Self::new(seed, sample_id, step as u64, transit_idx as u64, slot as u64)
    }

    /// Key for the `stepTransits` call at (sample, step, transit).
    pub fn transit(seed: u64, sample_id: u64, step: usize, transit_idx: usize) -> Self {
        Self::new(seed, sample_id, step as u64, transit_idx as u64, TRANSIT_SLOT)
    }

    /// Key for drawing the initial roots of a sample.
    pub fn init(seed: u64, sample_id: u64) -> Self {
        Self::new(seed, sample_id, INIT_STEP, 0, 0)
    }

    fn stream_state(&self) -> u64 {
        let mut h = mix64(self.seed ^ 0x6A09_E667_F3BC_C909);
        for (i, field) in [self.sample_id, self.step, self.transit_idx, self.slot]
            .into_iter()
            .enumerate()
        {
            h = mix64(h ^ mix64(field.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1))));
        }
        h
    }

    /// Opens the stream addressed by this key.
    pub fn stream(&self) -> SlotRng {
        SlotRng::from_state(self.stream_state())
    }
}

/// The `draw_index`-th uniform value in `[0, 1)` of the stream addressed by `key`.
pub fn rng_uniform(key: RngKey, draw_index: u64) -> f64 {
    let state = key.stream_state();
    to_unit(mix64(state.wrapping_add(GOLDEN.wrapping_mul(draw_index + 1))))
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// SplitMix64 stream positioned at the start of a keyed stream.
///
/// `SlotRng` is cheap to create and is meant to live for a single `next` call.
#[derive(Debug, Clone)]
pub struct SlotRng {
    state: u64,
    counter: u64,
}

impl SlotRng {
    fn from_state(state: u64) -> Self {
        Self { state, counter: 0 }
    }

    /// Free-standing stream for graph generation and other seeded utilities.
    pub fn seeded(seed: u64, stream: u64) -> Self {
        RngKey::new(seed, stream, GRAPH_STEP, 0, 0).stream()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix64(self.state.wrapping_add(GOLDEN.wrapping_mul(self.counter)))
    }

    /// Number of values drawn so far.
    pub fn draws(&self) -> u64 {
        self.counter
    }

    /// Uniform real in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    ///
    /// Lemire's multiply-shift with rejection, so every value is exactly equiprobable.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        let mut m = (self.next_u64() as u128) * (n as u128);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = (self.next_u64() as u128) * (n as u128);
            }
        }
        (m >> 64) as usize
    }

    /// Half-open `randInt(lo, hi)`.
    #[inline]
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn same_key_same_value() {
        let key = RngKey::slot(7, 3, 2, 1, 0);
        assert_eq!(rng_uniform(key, 5), rng_uniform(key, 5));
        let mut a = key.stream();
        let mut b = key.stream();
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn stream_matches_indexed_draws() {
        let key = RngKey::slot(11, 0, 4, 2, 9);
        let mut s = key.stream();
        for i in 0..32 {
            assert_eq!(s.uniform(), rng_uniform(key, i));
        }
    }

    #[test]
    fn mean_of_a_million_draws() {
        // sigma of the mean is sqrt(1/12)/1000 ~= 2.9e-4; 0.002 is ~7 sigma.
        let key = RngKey::slot(42, 1, 0, 0, 0);
        let mut s = key.stream();
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn neighbouring_slots_are_uncorrelated() {
        // Pair the first draw of slot k with the first draw of slot k+1 and
        // bucket the pairs on a 16x16 grid.
        const B: usize = 16;
        let n = 200_000;
        let mut counts = vec![0u64; B * B];
        for i in 0..n {
            let a = rng_uniform(RngKey::slot(5, i, 3, 0, 0), 0);
            let b = rng_uniform(RngKey::slot(5, i, 3, 0, 1), 0);
            let (x, y) = ((a * B as f64) as usize, (b * B as f64) as usize);
            counts[x * B + y] += 1;
        }
        let expected = n as f64 / (B * B) as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new((B * B - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 {chi2}, p {p}");
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut s = SlotRng::seeded(1, 2);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let x = s.below(7);
            assert!(x < 7);
            seen[x] = true;
        }
        assert!(seen.iter().all(|&b| b));
        assert_eq!(s.below(1), 0);
    }

    #[test]
    fn keys_differ_in_every_field() {
        let base = RngKey::new(1, 2, 3, 4, 5);
        let variants = [
            RngKey::new(9, 2, 3, 4, 5),
            RngKey::new(1, 9, 3, 4, 5),
            RngKey::new(1, 2, 9, 4, 5),
            RngKey::new(1, 2, 3, 9, 5),
            RngKey::new(1, 2, 3, 4, 9),
        ];
        for v in variants {
            assert_ne!(rng_uniform(base, 0), rng_uniform(v, 0));
        }
    }
}
