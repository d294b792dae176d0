//! Shared numerical machinery: deterministic reductions, grids, adaptive
//! quadrature, cubic splines, dense antiderivative tables and tail-limit
//! extrapolation.

pub mod limits;
pub mod ode;
pub mod quadrature;
pub mod spline;

/// Sums a slice in a fixed pairwise (tree) order.
///
/// The reduction order depends only on the slice layout, never on thread
/// count, so results are bit-identical across parallel configurations.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Log-spaced grid of `n >= 2` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                (la + s * (lb - la)).exp()
            }
        })
        .collect()
}

/// Linearly spaced grid of `n >= 2` points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    (0..n)
        .map(|k| {
            let s = k as f64 / (n - 1) as f64;
            if k == n - 1 { hi } else { lo + s * (hi - lo) }
        })
        .collect()
}

/// Stable arccosh for arguments `x >= 1`, accurate near 1.
///
/// Uses `ln_1p(u + sqrt(u (u + 2)))` with `u = x - 1`, which avoids the
/// cancellation of the naive `ln(x + sqrt(x^2 - 1))` form for near-pole
/// distance evaluations. Arguments slightly below 1 (floating-point noise
/// from dot products) are clamped.
pub fn stable_acosh(x: f64) -> f64 {
    let u = (x - 1.0).max(0.0);
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_uniform_data() {
        let v: Vec<f64> = (0..1000).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }

    #[test]
    fn pairwise_is_layout_deterministic() {
        let v: Vec<f64> = (0..4097).map(|i| (i as f64 * 0.7).sin()).collect();
        assert_eq!(pairwise_sum(&v).to_bits(), pairwise_sum(&v).to_bits());
    }

    #[test]
    fn grids_hit_endpoints_exactly() {
        let g = log_grid(1e-3, 50.0, 1000);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[999], 50.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linear_grid(1.0, 2.0, 11);
        assert_eq!(l[10], 2.0);
    }

    #[test]
    fn stable_acosh_near_one() {
        // acosh(1 + u) ~ sqrt(2u)(1 - u/12) to O(u^2); evaluate the expansion
        // at the representable argument actually passed in.
        for &u in &[1e-12, 1e-10, 1e-6] {
            let x = 1.0 + u;
            let ru = x - 1.0;
            let d = stable_acosh(x);
            let expect = (2.0 * ru).sqrt() * (1.0 - ru / 12.0);
            assert!((d - expect).abs() <= 1e-10 * expect, "u={u}: {d} vs {expect}");
        }
        assert_eq!(stable_acosh(1.0), 0.0);
        assert!((stable_acosh(2.0) - 2.0f64.acosh()).abs() < 1e-15);
    }
}
