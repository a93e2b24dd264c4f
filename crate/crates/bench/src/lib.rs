//! Shared fixtures for the criterion benchmarks.

use besselrad::IntegralSpec;

/// Wavenumber / damping grid used by the benchmarks.
pub const GRID: [f64; 3] = [0.5, 1.0, 2.0];

/// Every bare integral with `λ1, λ2 <= max_l`, power `n <= max_n` and
/// parameters from [`GRID`].
pub fn integral_grid(max_l: u32, max_n: u32) -> Vec<IntegralSpec> {
    let mut out = Vec::new();
    for l1 in 0..=max_l {
        for l2 in 0..=max_l {
            for n in 1..=max_n {
                for &k1 in &GRID {
                    for &k2 in &GRID {
                        for &alpha in &GRID {
                            out.push(IntegralSpec::new(n, l1, l2, k1, k2, alpha).expect("valid grid"));
                        }
                    }
                }
            }
        }
    }
    out
}
