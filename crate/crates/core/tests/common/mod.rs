//! Brute-force reference implementations, written without the library's
//! caches, pruning or solvers.

#![allow(dead_code)]

use wgreedy::{CoefficientVector, NormedSpace};

pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, a| m.max(a.abs()))
    } else {
        x.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `max(sup |a_n|, sqrt(Σ a_n² w_n))`.
pub fn mixed_norm(x: &[f64], w: &[f64]) -> f64 {
    let s = x.iter().zip(w).map(|(a, w)| a * a * w).sum::<f64>().sqrt();
    lp_norm(x, f64::INFINITY).max(s)
}

/// `max(sup |a_n|, sup_k |a_k + … + a_dim|)`.
pub fn summing_norm(x: &[f64]) -> f64 {
    let mut best = lp_norm(x, f64::INFINITY);
    let mut tail = 0.0;
    for a in x.iter().rev() {
        tail += a;
        best = best.max(f64::abs(tail));
    }
    best
}

pub fn indicator(dim: usize, set: &[usize]) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    for &i in set {
        v[i - 1] = 1.0;
    }
    v
}

pub fn members(mask: u32, dim: usize) -> Vec<usize> {
    (0..dim).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

pub fn measure(w: &[f64], mask: u32) -> f64 {
    (0..w.len()).filter(|i| mask & (1 << i) != 0).map(|i| w[i]).sum()
}

pub fn norm(space: &NormedSpace, x: &[f64]) -> f64 {
    space.norm(&CoefficientVector::new(x.to_vec()).unwrap()).unwrap()
}

/// `sup ‖1_A‖ / ‖1_B‖` over all pairs with `w(A) ≤ w(B)`, nonempty A, B.
pub fn democracy(dim: usize, w: &[f64], f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = 1u32 << dim;
    let norms: Vec<f64> = (0..n).map(|m| f(&indicator(dim, &members(m, dim)))).collect();
    let mut best: f64 = 0.0;
    for a in 1..n {
        for b in 1..n {
            if measure(w, a) <= measure(w, b) + 1e-12 {
                best = best.max(norms[a as usize] / norms[b as usize]);
            }
        }
    }
    best
}

/// `σ̃^w_u(x)` by scanning every subset.
pub fn expansional_sigma(x: &[f64], w: &[f64], u: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let dim = x.len();
    let mut best = f(x);
    for mask in 1..1u32 << dim {
        if measure(w, mask) <= u + 1e-12 {
            let mut r = x.to_vec();
            for i in members(mask, dim) {
                r[i - 1] = 0.0;
            }
            best = best.min(f(&r));
        }
    }
    best
}

/// Every m-subset whose smallest modulus is at least the largest modulus outside.
pub fn greedy_sets(x: &[f64], m: usize) -> Vec<u32> {
    let dim = x.len();
    (0..1u32 << dim)
        .filter(|s| s.count_ones() as usize == m)
        .filter(|&s| {
            let inside = (0..dim).filter(|i| s & (1 << i) != 0).map(|i| x[i].abs()).fold(f64::INFINITY, f64::min);
            let outside = (0..dim).filter(|i| s & (1 << i) == 0).map(|i| x[i].abs()).fold(0.0, f64::max);
            m == 0 || inside >= outside
        })
        .collect()
}

/// Minimum of a convex `g` on `R^k` by repeated grid zooming around the best point.
pub fn grid_min(k: usize, radius: f64, g: impl Fn(&[f64]) -> f64) -> f64 {
    let steps: i64 = match k {
        1 => 200,
        2 => 40,
        3 => 14,
        _ => 6,
    };
    let mut center = vec![0.0; k];
    let mut half = radius;
    let mut best = g(&center);
    let total = (2 * steps + 1).pow(k as u32);
    for _ in 0..200 {
        let h = half / steps as f64;
        let mut next = center.clone();
        let mut t = vec![0.0; k];
        for idx in 0..total {
            let mut r = idx;
            for (j, tj) in t.iter_mut().enumerate() {
                let d = (r % (2 * steps + 1)) - steps;
                r /= 2 * steps + 1;
                *tj = center[j] + d as f64 * h;
            }
            let v = g(&t);
            if v < best {
                best = v;
                next.copy_from_slice(&t);
            }
        }
        center = next;
        half = 2.0 * h;
        if half < 1e-12 * radius.max(1.0) {
            break;
        }
    }
    best
}

/// `min_a ‖x − Σ_{n∈support} a_n e_n‖` through [`grid_min`].
pub fn chebyshev_grid(f: impl Fn(&[f64]) -> f64, x: &[f64], support: &[usize]) -> f64 {
    let radius = 2.0 * f(x) + 1.0;
    grid_min(support.len(), radius, |t| {
        let mut r = x.to_vec();
        for (&n, tj) in support.iter().zip(t) {
            r[n - 1] = *tj;
        }
        f(&r)
    })
}
