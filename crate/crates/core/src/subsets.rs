//! Bitmask subset enumeration.
//!
//! Bit `i` of a mask stands for the 1-based index `i + 1`. The canonical
//! enumeration order used everywhere (witness selection, tie-breaks) is by
//! cardinality first, then lexicographic on the sorted index list.

/// Largest dimension for which bitmask enumeration is allowed.
pub const MAX_MASK_DIM: usize = 20;

#[inline]
pub fn full_mask(dim: usize) -> u32 {
    if dim >= 32 {
        u32::MAX
    } else {
        (1u32 << dim) - 1
    }
}

/// Calls `f` on every `k`-subset of `{1..dim}` in lexicographic order.
pub fn for_each_k_subset(dim: usize, k: usize, mut f: impl FnMut(u32)) {
    if k > dim {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(idx.iter().fold(0u32, |m, &i| m | (1 << i)));
        // advance to the next combination in lexicographic order
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < dim - k + pos {
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                return;
            }
        }
    }
}

/// All subsets of `{1..dim}` in canonical order.
pub fn ordered_masks(dim: usize) -> Vec<u32> {
    assert!(dim <= MAX_MASK_DIM, "dimension {dim} too large for mask enumeration");
    let mut out = Vec::with_capacity(1usize << dim);
    for k in 0..=dim {
        for_each_k_subset(dim, k, |m| out.push(m));
    }
    out
}

/// Position of every mask in [`ordered_masks`], indexed by mask value.
pub fn order_positions(order: &[u32]) -> Vec<u32> {
    let mut pos = vec![0u32; order.len()];
    for (i, &m) in order.iter().enumerate() {
        pos[m as usize] = i as u32;
    }
    pos
}

/// Sorted 1-based indices of a mask.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i + 1);
        m &= m - 1;
    }
    out
}

/// Zero-based positions of the set bits.
pub fn mask_positions(mask: u32) -> Vec<usize> {
    mask_indices(mask).into_iter().map(|i| i - 1).collect()
}

/// Sum of `values` over the mask, accumulated in ascending index order.
///
/// Every weight comparison in the crate goes through this summation order,
/// so two calls on the same set produce bit-identical results.
#[inline]
pub fn mask_sum(values: &[f64], mask: u32) -> f64 {
    let mut s = 0.0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        s += values[i];
        m &= m - 1;
    }
    s
}

/// `mask_sum` for every mask of `{1..dim}`, indexed by mask value.
pub fn all_mask_sums(values: &[f64]) -> Vec<f64> {
    let dim = values.len();
    assert!(dim <= MAX_MASK_DIM);
    let n = 1usize << dim;
    let mut out = vec![0.0; n];
    for mask in 1..n {
        // dropping the highest bit leaves the ascending left fold of the rest
        let hi = 31 - (mask as u32).leading_zeros() as usize;
        out[mask] = out[mask & !(1 << hi)] + values[hi];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_subsets_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_k_subset(4, 2, |m| seen.push(mask_indices(m)));
        assert_eq!(seen, vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
    }

    #[test]
    fn ordered_masks_cover_everything_once() {
        let order = ordered_masks(6);
        assert_eq!(order.len(), 64);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 64);
        assert_eq!(order[0], 0);
        for w in order.windows(2) {
            assert!(w[0].count_ones() <= w[1].count_ones());
        }
    }

    #[test]
    fn table_sums_match_direct_sums() {
        let w = [1.0, 1.0 / 3.0, 1.0 / 7.0, 0.1, 2.5];
        let table = all_mask_sums(&w);
        for mask in 0..32u32 {
            assert_eq!(table[mask as usize].to_bits(), mask_sum(&w, mask).to_bits());
        }
    }
}
