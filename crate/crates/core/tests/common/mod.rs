//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

/// Exhaustive search of normalized solutions with `z ≤ bound`. Solves the
/// quadratic in `z` for every admissible `(x, y)`; shares no code with the
/// tree.
pub fn brute_force_triples(bound: u64) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    // For fixed x ≤ y the equation is a quadratic in z with integer roots
    // z = (3xy ± √(9x²y² − 4(x² + y²))) / 2.
    let bound = bound as u128;
    let mut x: u128 = 1;
    // The larger root exceeds 3xy − 2y, and the smaller root is below y
    // except for (1, 1, 1), so x·y is bounded by roughly bound / 3.
    while 3 * x * x <= bound + 2 * x {
        let mut y = x;
        while 3 * x * y <= bound + 2 * y {
            let b = 3 * x * y;
            let c = x * x + y * y;
            if let Some(disc) = (b * b).checked_sub(4 * c) {
                let r = disc.isqrt();
                if r * r == disc && (b - r).is_multiple_of(2) {
                    for z in [(b - r) / 2, (b + r) / 2] {
                        if z >= y && z <= bound {
                            out.push((x as u64, y as u64, z as u64));
                        }
                    }
                }
            }
            y += 1;
        }
        x += 1;
    }
    out.sort_by_key(|&(x, y, z)| (z, y, x));
    out.dedup();
    out
}


/// Sorted distinct maxima of [`brute_force_triples`].
pub fn brute_force_markov_numbers(bound: u64) -> Vec<u64> {
    let mut v: Vec<u64> = brute_force_triples(bound).into_iter().map(|t| t.2).collect();
    v.dedup();
    v
}
