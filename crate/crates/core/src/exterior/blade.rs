//! Basis blades `dx_{i1}∧…∧dx_{ik}` encoded as bitmasks with strictly
//! increasing indices. Within a fixed degree, blades are ordered by mask
//! value (colexicographic order).

/// Bitmask of a basis blade.
pub type Blade = u32;

pub fn degree(b: Blade) -> usize {
    b.count_ones() as usize
}

/// All blades of degree `k` over `n` coordinates, ascending.
pub fn blades(n: usize, k: usize) -> Vec<Blade> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut b: Blade = if k == 0 { 0 } else { (1 << k) - 1 };
    let limit: u64 = 1u64 << n;
    loop {
        if (b as u64) >= limit {
            break;
        }
        out.push(b);
        if k == 0 {
            break;
        }
        // Gosper's hack: next integer with the same popcount.
        let c = b & b.wrapping_neg();
        let r = b + c;
        b = (((r ^ b) >> 2) / c) | r;
        if r == 0 {
            break;
        }
    }
    out
}

/// Position of `b` within `blades(n, degree(b))`.
pub fn rank(b: Blade) -> usize {
    let mut r = 0;
    for (j, i) in indices(b).into_iter().enumerate() {
        r += binomial(i, j + 1);
    }
    r
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

pub fn indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|i| b >> i & 1 == 1).collect()
}

pub fn from_indices(idx: &[usize]) -> Blade {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

/// Sign of `e_a ∧ e_b` relative to `e_{a|b}`, or `None` when they overlap.
pub fn wedge_sign(a: Blade, b: Blade) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    // Count pairs (i in a, j in b) with i > j.
    let mut swaps = 0;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

/// Sign of the permutation sorting `idx` (distinct entries); `None` on repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(Blade, i32)> {
    let mut mask = 0;
    let mut inversions = 0;
    for (p, &i) in idx.iter().enumerate() {
        if mask >> i & 1 == 1 {
            return None;
        }
        mask |= 1 << i;
        inversions += idx[..p].iter().filter(|&&j| j > i).count();
    }
    Some((mask, if inversions % 2 == 0 { 1 } else { -1 }))
}

/// Name like `dx^dy` for display.
pub fn name(b: Blade, coords: &[String]) -> String {
    if b == 0 {
        return "1".to_string();
    }
    indices(b).iter().map(|&i| format!("d{}", coords[i])).collect::<Vec<_>>().join("^")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_and_rank() {
        for n in 0..7 {
            for k in 0..=n {
                let bs = blades(n, k);
                assert_eq!(bs.len(), binomial(n, k));
                for (i, &b) in bs.iter().enumerate() {
                    assert_eq!(degree(b), k);
                    assert_eq!(rank(b), i);
                }
            }
        }
    }

    #[test]
    fn signs() {
        // dz ∧ dx∧dy = dx∧dy∧dz
        assert_eq!(wedge_sign(0b100, 0b011), Some(1));
        // dy ∧ dx = -dx∧dy
        assert_eq!(wedge_sign(0b010, 0b001), Some(-1));
        assert_eq!(wedge_sign(0b010, 0b011), None);
        assert_eq!(sort_sign(&[2, 0, 1]), Some((0b111, 1)));
        assert_eq!(sort_sign(&[1, 0]), Some((0b11, -1)));
    }
}
