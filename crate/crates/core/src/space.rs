//! Coefficient vectors and finite-dimensional norm oracles.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sampling::SamplePlan;
use crate::weight::Weight;

/// Coefficients `(a_1, …, a_dim)` of `x = Σ a_n e_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if let Some(i) = entries.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        Ok(CoefficientVector(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        CoefficientVector(vec![0.0; dim.max(1)])
    }

    /// `e_n` (1-based).
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n == 0 || n > dim {
            return Err(Error::IndexOutOfRange { index: n, len: dim });
        }
        let mut v = vec![0.0; dim];
        v[n - 1] = 1.0;
        Ok(CoefficientVector(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Coefficient of `e_n` (1-based).
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

impl<'de> Deserialize<'de> for CoefficientVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        CoefficientVector::new(v).map_err(serde::de::Error::custom)
    }
}

/// Linear map applied to the coefficients before a component's lp norm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordinateMap {
    #[default]
    Identity,
    /// `y_k = a_1 + … + a_k`.
    PartialSums,
    /// `y_k = a_k + … + a_dim`.
    TailSums,
}

/// One term `(Σ_k c_k |y_k|^p)^{1/p}` of a custom norm; `p = ∞` gives `max_k c_k |y_k|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(serialize_with = "ser_exponent", deserialize_with = "de_exponent")]
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub map: CoordinateMap,
}

pub(crate) fn ser_exponent<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if p.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

pub(crate) fn de_exponent<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Str(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(p) => Ok(p),
        Raw::Str(s) if s == "inf" => Ok(f64::INFINITY),
        Raw::Str(s) => Err(serde::de::Error::custom(format!("exponent must be a number or \"inf\", got {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceKind {
    Lp {
        p: f64,
    },
    Sup,
    /// `max_n |a_n| ∨ (Σ a_n² w_n)^{1/2}`.
    RemarkMixed {
        weights: Vec<f64>,
    },
    /// Maximum of finitely many weighted lp components.
    CustomCombination {
        components: Vec<Component>,
    },
}

/// A norm on `R^dim` together with what is known analytically about its basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormedSpace {
    dim: usize,
    kind: SpaceKind,
    one_unconditional: bool,
    exact_quasi_greedy_constant: Option<f64>,
    /// `c_n` with `|a_n| ≤ c_n ‖x‖`.
    #[serde(skip)]
    coordinate_bounds: Vec<f64>,
}

/// Relative tolerance for the `‖e_n‖ = 1` check at construction.
const NORMALIZATION_TOL: f64 = 1e-12;

impl NormedSpace {
    pub fn make(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        let lattice = match &kind {
            SpaceKind::Lp { p } => {
                if !(*p >= 1.0) || p.is_nan() {
                    return Err(Error::InvalidSpace(format!("lp requires p >= 1, got {p}")));
                }
                true
            }
            SpaceKind::Sup => true,
            SpaceKind::RemarkMixed { weights } => {
                if weights.len() != dim {
                    return Err(Error::InvalidSpace(format!(
                        "remark-mixed weight has length {}, dimension is {dim}",
                        weights.len()
                    )));
                }
                if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
                    return Err(Error::InvalidSpace(format!(
                        "remark-mixed weight entry {} is {w}, must be positive",
                        i + 1
                    )));
                }
                true
            }
            SpaceKind::CustomCombination { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidSpace("custom-combination needs at least one component".into()));
                }
                for (c, comp) in components.iter().enumerate() {
                    if !(comp.p >= 1.0) {
                        return Err(Error::InvalidSpace(format!("component {c}: p must be >= 1, got {}", comp.p)));
                    }
                    if let Some(w) = &comp.weights {
                        if w.len() != dim {
                            return Err(Error::InvalidSpace(format!(
                                "component {c}: {} weights for dimension {dim}",
                                w.len()
                            )));
                        }
                        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                            return Err(Error::InvalidSpace(format!("component {c}: weights must be nonnegative")));
                        }
                    }
                }
                components.iter().all(|c| c.map == CoordinateMap::Identity)
            }
        };
        let coordinate_bounds = coordinate_bounds(&kind, dim)?;
        let space = NormedSpace {
            dim,
            kind,
            one_unconditional: lattice,
            // coordinate projections are contractions in lattice norms
            exact_quasi_greedy_constant: lattice.then_some(1.0),
            coordinate_bounds,
        };
        space.check_normalized()?;
        Ok(space)
    }

    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::make(SpaceKind::Lp { p }, dim)
    }

    pub fn sup(dim: usize) -> Result<Self> {
        Self::make(SpaceKind::Sup, dim)
    }

    pub fn remark_mixed(weight: &Weight, dim: usize) -> Result<Self> {
        Self::make(SpaceKind::RemarkMixed { weights: weight.prefix(dim)? }, dim)
    }

    pub fn custom(components: Vec<Component>, dim: usize) -> Result<Self> {
        Self::make(SpaceKind::CustomCombination { components }, dim)
    }

    fn check_normalized(&self) -> Result<()> {
        let mut e = vec![0.0; self.dim];
        for n in 0..self.dim {
            e[n] = 1.0;
            let v = self.eval(&e);
            e[n] = 0.0;
            if (v - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::InvalidSpace(format!(
                    "basis vector e_{} has norm {v}, the basis must be normalized",
                    n + 1
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn one_unconditional(&self) -> bool {
        self.one_unconditional
    }

    pub fn exact_quasi_greedy_constant(&self) -> Option<f64> {
        self.exact_quasi_greedy_constant
    }

    /// `c_n` with `|a_n| ≤ c_n ‖x‖`, 1 for lattice norms.
    pub fn coordinate_bounds(&self) -> &[f64] {
        &self.coordinate_bounds
    }

    pub fn label(&self) -> String {
        match &self.kind {
            SpaceKind::Lp { p } => format!("lp(p={p};dim={})", self.dim),
            SpaceKind::Sup => format!("sup(dim={})", self.dim),
            SpaceKind::RemarkMixed { weights } => {
                let w = Weight::new(weights.clone()).map(|w| describe_prefix(&w)).unwrap_or_else(|_| "invalid".into());
                format!("remark-mixed(w={w};dim={})", self.dim)
            }
            SpaceKind::CustomCombination { components } => {
                format!("custom-combination({} components;dim={})", components.len(), self.dim)
            }
        }
    }

    /// `‖x‖`, validating the input.
    pub fn norm(&self, x: &CoefficientVector) -> Result<f64> {
        self.norm_slice(x.as_slice())
    }

    pub fn norm_slice(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if let Some(i) = x.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { index: i + 1 });
        }
        Ok(self.eval(x))
    }

    /// `‖x‖` without validation; `x.len()` must equal `dim`.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            SpaceKind::Lp { p } => lp_norm(x, *p),
            SpaceKind::Sup => sup_norm(x),
            SpaceKind::RemarkMixed { weights } => {
                let s: f64 = x.iter().zip(weights).map(|(a, w)| a * a * w).sum();
                sup_norm(x).max(s.sqrt())
            }
            SpaceKind::CustomCombination { components } => {
                components.iter().map(|c| component_norm(c, x)).fold(0.0, f64::max)
            }
        }
    }

    /// A subgradient of `‖·‖` at `r` (a norming functional), written into `out`.
    pub fn subgradient(&self, r: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match &self.kind {
            SpaceKind::Lp { p } => lp_subgradient(r, *p, None, out),
            SpaceKind::Sup => lp_subgradient(r, f64::INFINITY, None, out),
            SpaceKind::RemarkMixed { weights } => {
                let s: f64 = r.iter().zip(weights).map(|(a, w)| a * a * w).sum::<f64>().sqrt();
                if sup_norm(r) >= s {
                    lp_subgradient(r, f64::INFINITY, None, out);
                } else {
                    for ((o, a), w) in out.iter_mut().zip(r).zip(weights) {
                        *o = w * a / s;
                    }
                }
            }
            SpaceKind::CustomCombination { components } => {
                let (best, _) = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, component_norm(c, r)))
                    .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
                let c = &components[best];
                let y = mapped(c.map, r);
                let mut d = vec![0.0; r.len()];
                lp_subgradient(&y, c.p, c.weights.as_deref(), &mut d);
                // transpose of the coordinate map
                match c.map {
                    CoordinateMap::Identity => out.copy_from_slice(&d),
                    CoordinateMap::PartialSums => {
                        let mut acc = 0.0;
                        for j in (0..r.len()).rev() {
                            acc += d[j];
                            out[j] = acc;
                        }
                    }
                    CoordinateMap::TailSums => {
                        let mut acc = 0.0;
                        for j in 0..r.len() {
                            acc += d[j];
                            out[j] = acc;
                        }
                    }
                }
            }
        }
    }
}

/// Per-coordinate bounds `|a_n| ≤ c_n ‖x‖` read off the component structure.
fn coordinate_bounds(kind: &SpaceKind, dim: usize) -> Result<Vec<f64>> {
    let SpaceKind::CustomCombination { components } = kind else {
        return Ok(vec![1.0; dim]);
    };
    let mut out = vec![f64::INFINITY; dim];
    for c in components {
        // |y_k| ≤ v_k^{-1/p} ‖x‖
        let inv = |k: usize| -> f64 {
            let v = c.weights.as_ref().map_or(1.0, |w| w[k]);
            if v <= 0.0 {
                f64::INFINITY
            } else if c.p.is_infinite() {
                1.0 / v
            } else {
                v.powf(-1.0 / c.p)
            }
        };
        for n in 0..dim {
            let b = match c.map {
                CoordinateMap::Identity => inv(n),
                CoordinateMap::PartialSums => inv(n) + if n > 0 { inv(n - 1) } else { 0.0 },
                CoordinateMap::TailSums => inv(n) + if n + 1 < dim { inv(n + 1) } else { 0.0 },
            };
            out[n] = out[n].min(b);
        }
    }
    if let Some(n) = out.iter().position(|b| !b.is_finite()) {
        return Err(Error::InvalidSpace(format!(
            "no component controls coordinate {}; the combination may not be a norm",
            n + 1
        )));
    }
    Ok(out)
}

fn lp_subgradient(y: &[f64], p: f64, weights: Option<&[f64]>, out: &mut [f64]) {
    let w = |k: usize| weights.map_or(1.0, |w| w[k]);
    if p.is_infinite() {
        let mut best = (0usize, -1.0);
        for (k, a) in y.iter().enumerate() {
            let v = w(k) * a.abs();
            if v > best.1 {
                best = (k, v);
            }
        }
        if best.1 > 0.0 {
            out[best.0] = w(best.0) * y[best.0].signum();
        }
    } else if p == 1.0 {
        for (k, a) in y.iter().enumerate() {
            if *a != 0.0 {
                out[k] = w(k) * a.signum();
            }
        }
    } else {
        let m = sup_norm(y);
        if m == 0.0 {
            return;
        }
        let s: f64 = y.iter().enumerate().map(|(k, a)| w(k) * (a.abs() / m).powf(p)).sum();
        let norm_scaled = s.powf(1.0 / p);
        for (k, a) in y.iter().enumerate() {
            // w |y|^{p-1} sign(y) / N^{p-1}, computed on y/m
            out[k] = w(k) * a.signum() * ((a.abs() / m) / norm_scaled).powf(p - 1.0);
        }
    }
}

fn mapped(map: CoordinateMap, x: &[f64]) -> Vec<f64> {
    let mut terms = Vec::with_capacity(x.len());
    match map {
        CoordinateMap::Identity => terms.extend_from_slice(x),
        CoordinateMap::PartialSums => {
            let mut s = 0.0;
            for &a in x {
                s += a;
                terms.push(s);
            }
        }
        CoordinateMap::TailSums => {
            terms.resize(x.len(), 0.0);
            let mut s = 0.0;
            for k in (0..x.len()).rev() {
                s += x[k];
                terms[k] = s;
            }
        }
    }
    terms
}

/// Compact description of a weight prefix for labels.
fn describe_prefix(w: &Weight) -> String {
    let e = w.entries();
    if e.iter().enumerate().all(|(i, &v)| v == 1.0 / (i + 1) as f64) {
        return "1/n".into();
    }
    if e.iter().all(|&v| v == e[0]) {
        return format!("const({})", e[0]);
    }
    if e.len() >= 2 {
        let r = e[1] / e[0];
        if e.windows(2).all(|p| p[1] == p[0] * r) {
            return format!("geom({},{r})", e[0]);
        }
    }
    format!("{e:?}")
}

#[inline]
fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, a| m.max(a.abs()))
}

#[inline]
fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        x.iter().map(|a| a.abs()).sum()
    } else if p == 2.0 {
        x.iter().map(|a| a * a).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        sup_norm(x)
    } else {
        let m = sup_norm(x);
        if m == 0.0 {
            return 0.0;
        }
        m * x.iter().map(|a| (a.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn component_norm(c: &Component, x: &[f64]) -> f64 {
    let mut acc_sum = 0.0;
    let mut max = 0.0f64;
    let terms = mapped(c.map, x);
    let weight = |k: usize| c.weights.as_ref().map_or(1.0, |w| w[k]);
    if c.p.is_infinite() {
        for (k, y) in terms.iter().enumerate() {
            max = max.max(weight(k) * y.abs());
        }
        max
    } else if c.p == 1.0 {
        for (k, y) in terms.iter().enumerate() {
            acc_sum += weight(k) * y.abs();
        }
        acc_sum
    } else {
        let m = sup_norm(&terms);
        if m == 0.0 {
            return 0.0;
        }
        for (k, y) in terms.iter().enumerate() {
            acc_sum += weight(k) * (y.abs() / m).powf(c.p);
        }
        m * acc_sum.powf(1.0 / c.p)
    }
}

/// Lower bound (or exact value) of the basis constant `sup_m ‖P_m‖`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisConstantEstimate {
    pub value: f64,
    pub exact: bool,
    /// Vector and split index `m` (1-based) attaining `value`.
    pub witness: Option<(Vec<f64>, usize)>,
}

/// Basis constant: exact for one-unconditional spaces, otherwise the maximum
/// of `‖P_m x‖/‖x‖` over the plan and every split `m`.
pub fn basis_constant(space: &NormedSpace, plan: &SamplePlan) -> Result<BasisConstantEstimate> {
    let dim = space.dim();
    let e1 = CoefficientVector::basis(dim, 1)?.into_vec();
    if space.one_unconditional() {
        return Ok(BasisConstantEstimate { value: 1.0, exact: true, witness: Some((e1, 1)) });
    }
    let instances = plan.instances(dim, &Weight::constant(dim).prefix(dim)?);
    if instances.is_empty() {
        return Err(Error::InvalidInput("sample plan is empty".into()));
    }
    let mut best = (1.0, e1, 1usize);
    let mut buf = vec![0.0; dim];
    for inst in &instances {
        let x = &inst.coefficients;
        let nx = space.eval(x);
        if nx == 0.0 {
            continue;
        }
        buf.iter_mut().for_each(|b| *b = 0.0);
        for m in 1..=dim {
            buf[m - 1] = x[m - 1];
            let r = space.eval(&buf) / nx;
            if r > best.0 {
                best = (r, x.clone(), m);
            }
        }
    }
    Ok(BasisConstantEstimate { value: best.0, exact: false, witness: Some((best.1, best.2)) })
}
