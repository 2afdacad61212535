//! Best coefficients on a fixed support.
//!
//! Minimizes `g(t) = ‖r(t)‖`, where `r(t)` equals `x` off the support and `t`
//! on it (so the coefficients are `x_n - t_n`). One coordinate is handled by
//! subgradient bisection; larger supports by a deep-cut ellipsoid method
//! started on a ball that provably contains a minimizer. Both keep a lower
//! bound on the minimum and stop once the gap is below the tolerance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{CoefficientVector, NormedSpace};
use crate::weight::IndexSet;

/// Largest support the solver accepts.
pub const MAX_SUPPORT: usize = 8;

/// Default relative tolerance used by the oracles and checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChebyshevResult {
    /// Coefficients on the support, in ascending index order.
    pub coefficients: Vec<f64>,
    pub value: f64,
    /// Certified upper bound on `value - min g`.
    pub gap: f64,
}

/// Minimizes `‖x − Σ_{n∈support} a_n e_n‖` over the coefficients `a`.
///
/// Flat optima are resolved per coordinate to the midpoint of the optimal
/// interval.
pub fn chebyshev_refine(
    space: &NormedSpace,
    x: &CoefficientVector,
    support: &IndexSet,
    tol: f64,
) -> Result<ChebyshevResult> {
    let a = x.as_slice();
    space.norm(x)?;
    if let Some(max) = support.max() {
        if max > a.len() {
            return Err(Error::IndexOutOfRange { index: max, len: a.len() });
        }
    }
    let positions: Vec<usize> = support.indices().iter().map(|i| i - 1).collect();
    solve(space, a, &positions, tol, true)
}

/// Solver entry with 0-based positions and no input validation beyond the guard.
pub(crate) fn solve(
    space: &NormedSpace,
    x: &[f64],
    positions: &[usize],
    tol: f64,
    polish: bool,
) -> Result<ChebyshevResult> {
    if positions.len() > MAX_SUPPORT {
        return Err(Error::GuardExceeded { what: "Chebyshev support size", limit: MAX_SUPPORT, got: positions.len() });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let mut g = Objective::new(space, x, positions);
    let k = positions.len();
    let g0 = g.value(&vec![0.0; k]);
    let coefficients_at = |t: &[f64]| -> Vec<f64> { positions.iter().zip(t).map(|(&p, ti)| x[p] - ti).collect() };
    if k == 0 || g0 == 0.0 {
        return Ok(ChebyshevResult { coefficients: coefficients_at(&vec![0.0; k]), value: g0, gap: 0.0 });
    }
    let abs_tol = tol * g0;
    // |t_k| = |r*_{p_k}| ≤ c_{p_k} ‖r*‖ ≤ c_{p_k} g0
    let bounds = space.coordinate_bounds();
    let radius = 1.01 * g0 * positions.iter().map(|&p| bounds[p] * bounds[p]).sum::<f64>().sqrt();
    let (mut t, mut value, gap) =
        if k == 1 { bisect(&mut g, radius, abs_tol) } else { ellipsoid(&mut g, k, radius, abs_tol) };
    if gap > abs_tol {
        return Err(Error::NotCertified {
            tol,
            support: k,
            rounds: if k == 1 { BISECT_ROUNDS } else { ellipsoid_rounds(k) },
        });
    }
    if polish {
        let level = value;
        for j in 0..k {
            let (lo, hi) = (g.extent(&t, j, level, -radius), g.extent(&t, j, level, radius));
            let mut cand = t.clone();
            cand[j] += 0.5 * (lo + hi);
            let v = g.value(&cand);
            if v <= value {
                t = cand;
                value = v;
            }
        }
    }
    Ok(ChebyshevResult { coefficients: coefficients_at(&t), value, gap })
}

struct Objective<'a> {
    space: &'a NormedSpace,
    positions: &'a [usize],
    r: Vec<f64>,
    grad: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(space: &'a NormedSpace, x: &[f64], positions: &'a [usize]) -> Self {
        let mut r = x.to_vec();
        for &p in positions {
            r[p] = 0.0;
        }
        Objective { space, positions, r, grad: vec![0.0; x.len()] }
    }

    fn load(&mut self, t: &[f64]) {
        for (&p, &v) in self.positions.iter().zip(t) {
            self.r[p] = v;
        }
    }

    fn value(&mut self, t: &[f64]) -> f64 {
        self.load(t);
        self.space.eval(&self.r)
    }

    /// Value and a subgradient restricted to the support.
    fn value_grad(&mut self, t: &[f64], s: &mut [f64]) -> f64 {
        self.load(t);
        self.space.subgradient(&self.r, &mut self.grad);
        for (sk, &p) in s.iter_mut().zip(self.positions) {
            *sk = self.grad[p];
        }
        self.space.eval(&self.r)
    }

    /// Largest step `s` toward `limit` along coordinate `j` keeping `g ≤ level`.
    fn extent(&mut self, t: &[f64], j: usize, level: f64, limit: f64) -> f64 {
        let mut p = t.to_vec();
        let at = |s: f64, p: &mut Vec<f64>, g: &mut Self| {
            p[j] = t[j] + s;
            g.value(p)
        };
        if at(limit, &mut p, self) <= level {
            return limit;
        }
        let (mut good, mut bad) = (0.0, limit);
        for _ in 0..80 {
            let mid = 0.5 * (good + bad);
            if at(mid, &mut p, self) <= level {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    }
}

const BISECT_ROUNDS: usize = 200;

fn bisect(g: &mut Objective<'_>, radius: f64, abs_tol: f64) -> (Vec<f64>, f64, f64) {
    let (mut lo, mut hi) = (-radius, radius);
    let mut s = [0.0];
    let mut best = (vec![0.0], g.value(&[0.0]));
    for _ in 0..BISECT_ROUNDS {
        let mid = 0.5 * (lo + hi);
        let v = g.value_grad(&[mid], &mut s);
        if v < best.1 {
            best = (vec![mid], v);
        }
        if s[0] > 0.0 {
            hi = mid;
        } else if s[0] < 0.0 {
            lo = mid;
        } else {
            return (vec![mid], v, 0.0);
        }
        // g is 1-Lipschitz in t since ‖e_n‖ = 1
        if hi - lo <= abs_tol {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let v = g.value(&[mid]);
    if v < best.1 {
        best = (vec![mid], v);
    }
    let lower = v - 0.5 * (hi - lo);
    let gap = (best.1 - lower).max(0.0);
    (best.0, best.1, gap)
}

fn ellipsoid_rounds(k: usize) -> usize {
    400 * k * k + 2000
}

fn ellipsoid(g: &mut Objective<'_>, k: usize, radius: f64, abs_tol: f64) -> (Vec<f64>, f64, f64) {
    let kf = k as f64;
    let mut c = vec![0.0; k];
    // the ellipsoid is {c + B u : |u| ≤ 1}; keeping B instead of B Bᵀ avoids
    // the cancellation that makes the shape matrix indefinite on flat optima
    let mut b = vec![0.0; k * k];
    for i in 0..k {
        b[i * k + i] = radius;
    }
    let mut s = vec![0.0; k];
    let mut p = vec![0.0; k];
    let mut bp = vec![0.0; k];
    let mut best_t = c.clone();
    let mut best = g.value(&c);
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..ellipsoid_rounds(k) {
        let norm_c = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha;
        let width;
        if norm_c > radius {
            // feasibility cut toward the ball
            for i in 0..k {
                s[i] = c[i] / norm_c;
            }
            transpose_mul(&b, &s, &mut p, k);
            width = norm(&p);
            alpha = 0.0;
        } else {
            let v = g.value_grad(&c, &mut s);
            if v < best {
                best = v;
                best_t.copy_from_slice(&c);
            }
            if s.iter().all(|&x| x == 0.0) {
                return (c, v, 0.0);
            }
            transpose_mul(&b, &s, &mut p, k);
            width = norm(&p);
            lower = lower.max(v - width);
            if best - lower.min(best) <= abs_tol {
                break;
            }
            alpha = ((v - best) / width).clamp(0.0, 0.99);
        }
        if !(width > 0.0) {
            break;
        }
        p.iter_mut().for_each(|v| *v /= width);
        for i in 0..k {
            bp[i] = (0..k).map(|j| b[i * k + j] * p[j]).sum();
        }
        let step = (1.0 + kf * alpha) / (kf + 1.0);
        for i in 0..k {
            c[i] -= step * bp[i];
        }
        let shrink = (kf * kf * (1.0 - alpha * alpha) / (kf * kf - 1.0)).sqrt();
        let rank = 2.0 * (1.0 + kf * alpha) / ((kf + 1.0) * (1.0 + alpha));
        let gamma = 1.0 - (1.0 - rank).max(0.0).sqrt();
        for i in 0..k {
            for j in 0..k {
                b[i * k + j] = shrink * (b[i * k + j] - gamma * bp[i] * p[j]);
            }
        }
    }
    let gap = (best - lower.min(best)).max(0.0);
    (best_t, best, gap)
}

/// `out = Bᵀ s`.
fn transpose_mul(b: &[f64], s: &[f64], out: &mut [f64], k: usize) {
    for j in 0..k {
        out[j] = (0..k).map(|i| b[i * k + j] * s[i]).sum();
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::Weight;

    fn cv(v: &[f64]) -> CoefficientVector {
        CoefficientVector::new(v.to_vec()).unwrap()
    }

    fn one() -> IndexSet {
        IndexSet::new(vec![1]).unwrap()
    }

    #[test]
    fn spec_examples() {
        let x = cv(&[3.0, 2.0, 1.0]);
        let l2 = chebyshev_refine(&NormedSpace::lp(2.0, 3).unwrap(), &x, &one(), 1e-10).unwrap();
        assert!((l2.coefficients[0] - 3.0).abs() < 1e-6);
        assert!((l2.value - 5f64.sqrt()).abs() < 1e-9);
        let l1 = chebyshev_refine(&NormedSpace::lp(1.0, 3).unwrap(), &x, &one(), 1e-10).unwrap();
        assert!((l1.coefficients[0] - 3.0).abs() < 1e-6);
        assert!((l1.value - 3.0).abs() < 1e-9);
        let sup = chebyshev_refine(&NormedSpace::sup(3).unwrap(), &x, &one(), 1e-10).unwrap();
        assert_eq!(sup.value, 2.0);
        assert!((sup.coefficients[0] - 3.0).abs() < 1e-6);
    }

    #[test]
    fn lattice_optimum_is_expansional() {
        let space = NormedSpace::sup(4).unwrap();
        let x = cv(&[3.0, -1.0, 2.0, 0.5]);
        let r = chebyshev_refine(&space, &x, &IndexSet::new(vec![2, 3]).unwrap(), 1e-10).unwrap();
        assert_eq!(r.value, 3.0);
    }

    #[test]
    fn improves_on_expansional_in_summing_norm() {
        use crate::space::{Component, CoordinateMap};
        let space = NormedSpace::custom(
            vec![
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::Identity },
                Component { p: f64::INFINITY, weights: None, map: CoordinateMap::TailSums },
            ],
            3,
        )
        .unwrap();
        let x = cv(&[1.0, 1.0, 1.0]);
        let support = IndexSet::new(vec![3]).unwrap();
        let r = chebyshev_refine(&space, &x, &support, 1e-10).unwrap();
        // residual (1, 1, -1) has tail sums (1, 0, -1)
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!((r.coefficients[0] - 2.0).abs() < 1e-6);
        let two = chebyshev_refine(&space, &x, &IndexSet::new(vec![2, 3]).unwrap(), 1e-10).unwrap();
        assert!((two.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_norm_multi_support() {
        let w = Weight::harmonic(5);
        let space = NormedSpace::remark_mixed(&w, 5).unwrap();
        let x = cv(&[2.0, -1.5, 0.7, 3.0, -0.2]);
        let support = IndexSet::new(vec![1, 2, 4]).unwrap();
        let r = chebyshev_refine(&space, &x, &support, 1e-10).unwrap();
        let mut y = x.as_slice().to_vec();
        for (k, &n) in support.indices().iter().enumerate() {
            y[n - 1] -= r.coefficients[k];
        }
        assert!((space.eval(&y) - r.value).abs() < 1e-12);
        // residual is at least the largest untouched coordinate
        assert!(r.value >= 0.7 - 1e-12);
        assert!(r.value <= space.eval(&[0.0, 0.0, 0.7, 0.0, -0.2]) + 1e-9);
    }

    #[test]
    fn guard_and_empty_support() {
        let space = NormedSpace::lp(2.0, 10).unwrap();
        let x = cv(&[1.0; 10]);
        let big = IndexSet::range(1, 9);
        assert!(matches!(chebyshev_refine(&space, &x, &big, 1e-9), Err(Error::GuardExceeded { .. })));
        let r = chebyshev_refine(&space, &x, &IndexSet::empty(), 1e-9).unwrap();
        assert_eq!(r.value, 10f64.sqrt());
        assert!(r.coefficients.is_empty());
    }
}
