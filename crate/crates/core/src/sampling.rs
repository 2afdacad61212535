//! Seeded instance streams.
//!
//! Random draws come from ChaCha20 keyed by the seed (little-endian `u64`
//! followed by 24 zero bytes, stream 0). A uniform draw is
//! `(next_u64 >> 11) · 2^-53`; Gaussians use Box–Muller on two uniforms
//! (`sqrt(-2 ln(1-u1)) · cos(2π u2)`); signs are `-1` when a uniform is
//! below `1/2`. The recipe is mirrored in the report schema.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::subsets::mask_sum;
use crate::weight::measure_slack;

/// Platform-independent random stream.
pub struct Stream(ChaCha20Rng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Stream(ChaCha20Rng::from_seed(key))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn sign(&mut self) -> f64 {
        if self.uniform() < 0.5 {
            -1.0
        } else {
            1.0
        }
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n.saturating_sub(1))
    }

    /// Fisher–Yates shuffle, swapping position `i` with `floor(u·(i+1))` from the top down.
    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i + 1);
            v.swap(i, j);
        }
    }
}

/// What to sample: structured proof-derived families plus seeded random vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_random_count")]
    pub random_count: usize,
    #[serde(default = "default_structured")]
    pub structured: bool,
}

fn default_random_count() -> usize {
    64
}

fn default_structured() -> bool {
    true
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan { seed: 0, random_count: default_random_count(), structured: true }
    }
}

/// One test vector and the family that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub family: &'static str,
    pub coefficients: Vec<f64>,
}

/// Perturbations used by the adversarial pair construction.
pub const ADVERSARIAL_DELTAS: [f64; 3] = [1e-3, 1e-1, 1.0];

impl SamplePlan {
    pub fn is_empty(&self) -> bool {
        self.random_count == 0 && !self.structured
    }

    /// All instances for dimension `dim`; `weights` is the weight prefix used
    /// to pair sets in the adversarial family.
    pub fn instances(&self, dim: usize, weights: &[f64]) -> Vec<Instance> {
        let mut out = Vec::new();
        if self.structured {
            structured_instances(dim, weights, &mut out);
        }
        let mut rng = Stream::new(self.seed);
        for k in 0..self.random_count {
            out.push(match k % 3 {
                0 => Instance { family: "gaussian", coefficients: (0..dim).map(|_| rng.gaussian()).collect() },
                1 => Instance {
                    family: "two-level",
                    coefficients: (0..dim)
                        .map(|_| {
                            let u = rng.uniform();
                            let s = rng.sign();
                            if u < 0.15 {
                                0.0
                            } else if u < 0.6 {
                                s
                            } else {
                                2.0 * s
                            }
                        })
                        .collect(),
                },
                _ => {
                    let ratio = 0.5 + 0.45 * rng.uniform();
                    let mut order: Vec<usize> = (0..dim).collect();
                    rng.shuffle(&mut order);
                    let mut v = vec![0.0; dim];
                    for (rank, &pos) in order.iter().enumerate() {
                        v[pos] = rng.sign() * ratio.powi(rank as i32);
                    }
                    Instance { family: "geometric-decay", coefficients: v }
                }
            });
        }
        out
    }
}

/// Index-set family used by the structured constructions, as bitmasks.
pub fn structured_sets(dim: usize) -> Vec<u32> {
    let mut sets = Vec::new();
    let seg = |lo: usize, hi: usize| -> u32 { (lo..=hi).fold(0u32, |m, i| m | (1 << (i - 1))) };
    for k in 1..=dim {
        sets.push(seg(1, k));
    }
    for k in 2..=dim {
        sets.push(seg(k, dim));
    }
    if dim >= 2 {
        sets.push((1..=dim).step_by(2).fold(0, |m, i| m | (1 << (i - 1))));
        sets.push((2..=dim).step_by(2).fold(0, |m, i| m | (1 << (i - 1))));
    }
    if dim >= 4 {
        let q = dim / 4;
        sets.push(seg(q + 1, dim - q));
    }
    let mut seen = std::collections::HashSet::new();
    sets.retain(|m| seen.insert(*m));
    sets
}

fn indicator(dim: usize, mask: u32, value: f64, v: &mut [f64]) {
    for i in 0..dim {
        if mask & (1 << i) != 0 {
            v[i] = value;
        }
    }
}

fn structured_instances(dim: usize, weights: &[f64], out: &mut Vec<Instance>) {
    if dim > 31 {
        return;
    }
    let sets = structured_sets(dim);
    let slack = measure_slack(weights);
    for n in 0..dim {
        let mut v = vec![0.0; dim];
        v[n] = 1.0;
        out.push(Instance { family: "basis", coefficients: v });
    }
    for &a in &sets {
        let mut v = vec![0.0; dim];
        indicator(dim, a, 1.0, &mut v);
        out.push(Instance { family: "indicator", coefficients: v });
    }
    // y = 1_A + (1+δ) 1_{B\A} for w(A) ≤ w(B)
    for &a in &sets {
        for &b in &sets {
            if a == b || b & !a == 0 {
                continue;
            }
            if mask_sum(weights, a) > mask_sum(weights, b) + slack {
                continue;
            }
            for delta in ADVERSARIAL_DELTAS {
                let mut v = vec![0.0; dim];
                indicator(dim, a, 1.0, &mut v);
                indicator(dim, b & !a, 1.0 + delta, &mut v);
                out.push(Instance { family: "adversarial-pair", coefficients: v });
            }
        }
    }
    // (1+ε) Σ_B ±e_n + Σ_E e_n with E to the right of B
    for k in 1..dim {
        let b = (1u32 << k) - 1;
        let e_hi = (2 * k).min(dim);
        let e = ((1u32 << e_hi) - 1) & !b;
        for pattern in 0..3 {
            let mut v = vec![0.0; dim];
            for i in 0..k {
                let s = match pattern {
                    0 => 1.0,
                    1 if i % 2 == 0 => 1.0,
                    _ => -1.0,
                };
                v[i] = 1.1 * s;
            }
            indicator(dim, e, 1.0, &mut v);
            out.push(Instance { family: "signed-block", coefficients: v });
        }
    }
    // Σ_A ±e_n + (1+ε)(e_{n0} + e_{n1}) with n1 > n0 > max A
    for &a in &sets {
        let top = 32 - a.leading_zeros() as usize;
        if top + 2 > dim {
            continue;
        }
        for alternate in [false, true] {
            let mut v = vec![0.0; dim];
            let mut flip = 1.0;
            for i in 0..dim {
                if a & (1 << i) != 0 {
                    v[i] = flip;
                    if alternate {
                        flip = -flip;
                    }
                }
            }
            v[top] = 1.001;
            v[top + 1] = 1.001;
            out.push(Instance { family: "tail-pair", coefficients: v });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let mut a = Stream::new(42);
        let mut b = Stream::new(42);
        for _ in 0..100 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
        let mut c = Stream::new(43);
        assert_ne!(Stream::new(42).next_u64(), c.next_u64());
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = Stream::new(7);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            assert!(s.gaussian().is_finite());
        }
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut s = Stream::new(3);
        let mut v: Vec<usize> = (0..20).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn plan_counts() {
        let w = vec![1.0; 6];
        let plan = SamplePlan { seed: 0, random_count: 30, structured: false };
        assert_eq!(plan.instances(6, &w).len(), 30);
        let full = SamplePlan { seed: 0, random_count: 0, structured: true };
        let inst = full.instances(6, &w);
        assert!(inst.iter().any(|i| i.family == "adversarial-pair"));
        assert!(inst.iter().all(|i| i.coefficients.len() == 6));
        assert!(inst.iter().all(|i| i.coefficients.iter().all(|a| a.is_finite())));
    }

    #[test]
    fn random_families_repeat_under_seed() {
        let w = vec![1.0; 5];
        let plan = SamplePlan { seed: 9, random_count: 12, structured: true };
        assert_eq!(plan.instances(5, &w), plan.instances(5, &w));
    }
}
