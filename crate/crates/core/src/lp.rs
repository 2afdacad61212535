//! Feasibility of small systems `A x ≤ b`.
//!
//! [`fourier_motzkin`] is exact over rationals and meant for a handful of
//! variables. [`simplex_feasible`] is a dense Phase-I simplex with Bland's rule
//! for somewhat larger systems with nonnegative variables.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Q = Ratio<i128>;

/// One inequality `coeffs · x ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

fn normalize(row: Row<Q>) -> Row<Q> {
    match row.coeffs.iter().find(|c| !c.is_zero()) {
        Some(lead) => {
            let s = lead.abs();
            Row { coeffs: row.coeffs.iter().map(|c| c / s).collect(), rhs: row.rhs / s }
        }
        None => row,
    }
}

/// Drops duplicate rows, keeping the tightest right-hand side per direction.
fn dedup(rows: Vec<Row<Q>>) -> Vec<Row<Q>> {
    let mut best: std::collections::BTreeMap<Vec<Q>, Q> = std::collections::BTreeMap::new();
    for r in rows.into_iter().map(normalize) {
        best.entry(r.coeffs)
            .and_modify(|b| {
                if r.rhs < *b {
                    *b = r.rhs
                }
            })
            .or_insert(r.rhs);
    }
    best.into_iter().map(|(coeffs, rhs)| Row { coeffs, rhs }).collect()
}

/// Exact Fourier–Motzkin elimination. Returns a solution or `None` when the
/// system is infeasible.
pub fn fourier_motzkin(rows: &[Row<Q>], nvars: usize) -> Option<Vec<Q>> {
    // stages[k] constrains only x_0..x_{nvars-1-k}
    let mut stages = vec![dedup(rows.to_vec())];
    for k in (0..nvars).rev() {
        let cur = stages.last().unwrap();
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for r in cur {
            if r.coeffs[k].is_positive() {
                pos.push(r);
            } else if r.coeffs[k].is_negative() {
                neg.push(r);
            } else {
                next.push(r.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                let (cp, cn) = (p.coeffs[k], -n.coeffs[k]);
                let coeffs = p.coeffs.iter().zip(&n.coeffs).map(|(a, b)| a * cn + b * cp).collect();
                next.push(Row { coeffs, rhs: p.rhs * cn + n.rhs * cp });
            }
        }
        stages.push(dedup(next));
    }
    if stages.last().unwrap().iter().any(|r| r.rhs.is_negative()) {
        return None;
    }
    let mut x = vec![Q::zero(); nvars];
    for k in 0..nvars {
        let sys = &stages[nvars - 1 - k];
        let (mut lo, mut hi): (Option<Q>, Option<Q>) = (None, None);
        for r in sys {
            let c = r.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let rest: Q = (0..k).map(|j| r.coeffs[j] * x[j]).sum();
            let bound = (r.rhs - rest) / c;
            if c.is_positive() {
                hi = Some(hi.map_or(bound, |h| h.min(bound)));
            } else {
                lo = Some(lo.map_or(bound, |l| l.max(bound)));
            }
        }
        x[k] = match (lo, hi) {
            (Some(l), _) => l,
            (None, Some(h)) => h,
            (None, None) => Q::zero(),
        };
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h {
                return None;
            }
        }
    }
    Some(x)
}

/// Phase-I simplex for `A v ≤ b, v ≥ 0`. Returns a feasible point or `None`.
pub fn simplex_feasible(rows: &[Row<f64>], nvars: usize) -> Option<Vec<f64>> {
    const TOL: f64 = 1e-9;
    let m = rows.len();
    let n_art = rows.iter().filter(|r| r.rhs < 0.0).count();
    // columns: structural, slack, artificial, rhs
    let ncols = nvars + m + n_art + 1;
    let rhs_col = ncols - 1;
    let mut t = vec![vec![0.0; ncols]; m];
    let mut basis = vec![0usize; m];
    let mut art = nvars + m;
    for (i, r) in rows.iter().enumerate() {
        let s = if r.rhs < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nvars {
            t[i][j] = s * r.coeffs[j];
        }
        t[i][nvars + i] = s;
        t[i][rhs_col] = s * r.rhs;
        if r.rhs < 0.0 {
            t[i][art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = nvars + i;
        }
    }
    let is_art = |j: usize| j >= nvars + m && j < rhs_col;
    // reduced costs of Σ artificials
    let mut cost = vec![0.0; ncols];
    for (i, row) in t.iter().enumerate() {
        if is_art(basis[i]) {
            for j in 0..ncols {
                if !is_art(j) {
                    cost[j] -= row[j];
                }
            }
        }
    }
    let max_iter = 50 * (m + ncols);
    for _ in 0..max_iter {
        let Some(enter) = (0..rhs_col).find(|&j| cost[j] < -TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = t[i][enter];
            if a > TOL {
                let ratio = t[i][rhs_col] / a;
                let better = match leave {
                    None => true,
                    Some(l) => ratio < best - TOL || (ratio <= best + TOL && basis[i] < basis[l]),
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // unbounded direction cannot occur for a Phase-I objective bounded below by 0
        let l = leave?;
        let piv = t[l][enter];
        for v in t[l].iter_mut() {
            *v /= piv;
        }
        let prow = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != l {
                let f = row[enter];
                if f != 0.0 {
                    for j in 0..ncols {
                        row[j] -= f * prow[j];
                    }
                }
            }
        }
        let f = cost[enter];
        for j in 0..ncols {
            cost[j] -= f * prow[j];
        }
        basis[l] = enter;
    }
    let infeas: f64 = (0..m).filter(|&i| is_art(basis[i])).map(|i| t[i][rhs_col]).sum();
    let scale = rows.iter().map(|r| r.rhs.abs()).fold(1.0, f64::max);
    if infeas > 1e-7 * scale {
        return None;
    }
    let mut v = vec![0.0; nvars];
    for i in 0..m {
        if basis[i] < nvars {
            v[basis[i]] = t[i][rhs_col].max(0.0);
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Q {
        Q::from_integer(n)
    }

    #[test]
    fn fm_detects_infeasibility() {
        // x ≥ 1, y ≥ 1, x + y ≤ 1
        let rows = vec![
            Row { coeffs: vec![q(-1), q(0)], rhs: q(-1) },
            Row { coeffs: vec![q(0), q(-1)], rhs: q(-1) },
            Row { coeffs: vec![q(1), q(1)], rhs: q(1) },
        ];
        assert!(fourier_motzkin(&rows, 2).is_none());
    }

    #[test]
    fn fm_finds_point() {
        // x ≥ 1, y ≥ x + 1, x + y ≤ 10
        let rows = vec![
            Row { coeffs: vec![q(-1), q(0)], rhs: q(-1) },
            Row { coeffs: vec![q(1), q(-1)], rhs: q(-1) },
            Row { coeffs: vec![q(1), q(1)], rhs: q(10) },
        ];
        let x = fourier_motzkin(&rows, 2).unwrap();
        for r in &rows {
            let lhs: Q = r.coeffs.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(lhs <= r.rhs);
        }
    }

    #[test]
    fn simplex_agrees_on_small_systems() {
        let feasible = vec![
            Row { coeffs: vec![-1.0, 0.0], rhs: -1.0 },
            Row { coeffs: vec![1.0, -1.0], rhs: -1.0 },
            Row { coeffs: vec![1.0, 1.0], rhs: 10.0 },
        ];
        let v = simplex_feasible(&feasible, 2).unwrap();
        for r in &feasible {
            let lhs: f64 = r.coeffs.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(lhs <= r.rhs + 1e-9);
        }
        let infeasible = vec![
            Row { coeffs: vec![-1.0, 0.0], rhs: -1.0 },
            Row { coeffs: vec![0.0, -1.0], rhs: -1.0 },
            Row { coeffs: vec![1.0, 1.0], rhs: 1.0 },
        ];
        assert!(simplex_feasible(&infeasible, 2).is_none());
    }
}
