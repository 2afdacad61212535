//! Weights, index sets and the weighted measure `w(A) = Σ_{i∈A} w_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subsets;

/// Relative slack used when comparing measures, `w(A) ≤ w(B) + MEASURE_TOL·scale`.
///
/// Weights such as `1/n` produce distinct sets with equal measure
/// (`1/2 = 1/3 + 1/6`) whose floating sums differ in the last bit.
pub const MEASURE_TOL: f64 = 1e-12;

/// Finite set of positive (1-based) indices, kept sorted and distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::InvalidInput("indices are 1-based".into()));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(IndexSet(indices))
    }

    /// Contiguous range `lo..=hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        IndexSet((lo.max(1)..=hi).collect())
    }

    pub fn from_mask(mask: u32) -> Self {
        IndexSet(subsets::mask_indices(mask))
    }

    pub fn to_mask(&self) -> Result<u32> {
        let mut m = 0u32;
        for &i in &self.0 {
            if i > subsets::MAX_MASK_DIM {
                return Err(Error::GuardExceeded { what: "mask index", limit: subsets::MAX_MASK_DIM, got: i });
            }
            m |= 1 << (i - 1);
        }
        Ok(m)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Vec<usize> {
        s.0
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// How entries beyond the stored prefix are generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailRule {
    None,
    /// `w_{n+1} = ratio · w_n`.
    Geometric {
        ratio: f64,
    },
    /// `w_n = c / n`, with `c` fixed by the last stored entry.
    Harmonic,
}

/// Positive weight sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    entries: Vec<f64>,
    tail: TailRule,
}

impl Weight {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_tail(entries, TailRule::None)
    }

    pub fn with_tail(entries: Vec<f64>, tail: TailRule) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeight("at least one entry is required".into()));
        }
        if let Some((i, w)) = entries.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeight(format!("entry {} is {w}, weights must be positive and finite", i + 1)));
        }
        if let TailRule::Geometric { ratio } = tail {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::InvalidWeight(format!("geometric ratio must be positive, got {ratio}")));
            }
        }
        Ok(Weight { entries, tail })
    }

    /// `w ≡ 1`; `w(A) = |A|`.
    pub fn constant(len: usize) -> Self {
        Weight { entries: vec![1.0; len.max(1)], tail: TailRule::Geometric { ratio: 1.0 } }
    }

    /// `w_n = first · ratio^(n-1)`.
    pub fn geometric(first: f64, ratio: f64, len: usize) -> Result<Self> {
        let entries = (0..len.max(1)).map(|k| first * ratio.powi(k as i32)).collect();
        Self::with_tail(entries, TailRule::Geometric { ratio })
    }

    /// `w_n = 1/n`.
    pub fn harmonic(len: usize) -> Self {
        Weight { entries: (1..=len.max(1)).map(|n| 1.0 / n as f64).collect(), tail: TailRule::Harmonic }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn tail(&self) -> TailRule {
        self.tail
    }

    /// `w_n` for a 1-based index, extending through the tail rule.
    pub fn get(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidInput("indices are 1-based".into()));
        }
        let len = self.entries.len();
        if n <= len {
            return Ok(self.entries[n - 1]);
        }
        let last = self.entries[len - 1];
        match self.tail {
            TailRule::None => Err(Error::IndexOutOfRange { index: n, len }),
            TailRule::Geometric { ratio } => Ok(last * ratio.powi((n - len) as i32)),
            TailRule::Harmonic => Ok(last * len as f64 / n as f64),
        }
    }

    /// First `dim` entries.
    pub fn prefix(&self, dim: usize) -> Result<Vec<f64>> {
        (1..=dim).map(|n| self.get(n)).collect()
    }

    /// `w(A)`.
    pub fn measure(&self, set: &IndexSet) -> Result<f64> {
        let mut s = 0.0;
        for &i in set.indices() {
            s += self.get(i)?;
        }
        Ok(s)
    }

    /// True when the generating rule tends to zero.
    pub fn decays_to_zero(&self) -> bool {
        match self.tail {
            TailRule::Geometric { ratio } => ratio < 1.0,
            TailRule::Harmonic => true,
            TailRule::None => false,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self.tail {
            TailRule::Geometric { ratio } if ratio == 1.0 && self.entries.iter().all(|&w| w == 1.0) => {
                "constant".to_string()
            }
            TailRule::Harmonic if self.entries.iter().enumerate().all(|(i, &w)| w == 1.0 / (i + 1) as f64) => {
                "harmonic".to_string()
            }
            TailRule::Geometric { ratio } => format!("geometric(first={},ratio={ratio})", self.entries[0]),
            _ => format!("explicit{:?}", self.entries),
        }
    }
}

/// `w(A) = Σ_{i∈A} w_i`.
pub fn w_measure(w: &Weight, set: &IndexSet) -> Result<f64> {
    w.measure(set)
}

/// Comparison slack for measures drawn from `prefix`.
pub fn measure_slack(prefix: &[f64]) -> f64 {
    MEASURE_TOL * prefix.iter().sum::<f64>().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_examples() {
        let w = Weight::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(w_measure(&w, &IndexSet::new(vec![1, 3]).unwrap()).unwrap(), 2.0);
        assert_eq!(w_measure(&w, &IndexSet::empty()).unwrap(), 0.0);
        let g = Weight::geometric(1.0, 0.5, 4).unwrap();
        assert_eq!(g.measure(&IndexSet::new(vec![1, 3]).unwrap()).unwrap(), 1.25);
    }

    #[test]
    fn index_beyond_stored_prefix() {
        let w = Weight::new(vec![1.0, 2.0]).unwrap();
        assert!(matches!(w.get(3), Err(Error::IndexOutOfRange { index: 3, len: 2 })));
        let g = Weight::geometric(1.0, 0.5, 2).unwrap();
        assert_eq!(g.get(4).unwrap(), 0.125);
        let h = Weight::harmonic(2);
        assert_eq!(h.get(8).unwrap(), 0.125);
    }

    #[test]
    fn rejects_nonpositive_entries() {
        assert!(Weight::new(vec![1.0, 0.0]).is_err());
        assert!(Weight::new(vec![1.0, -2.0]).is_err());
        assert!(Weight::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn index_set_normalizes() {
        let s = IndexSet::new(vec![3, 1, 3]).unwrap();
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.to_mask().unwrap(), 0b101);
        assert_eq!(IndexSet::from_mask(0b101), s);
        assert!(IndexSet::new(vec![0]).is_err());
        assert_eq!(s.to_string(), "{1,3}");
    }

    #[test]
    fn labels() {
        assert_eq!(Weight::constant(3).label(), "constant");
        assert_eq!(Weight::harmonic(3).label(), "harmonic");
    }
}
