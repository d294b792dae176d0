//! Tail-limit estimation for quotients evaluated along geometrically spaced
//! probe radii, with Aitken delta-squared acceleration.

use serde::Serialize;

/// Diagnostics of a limit estimate along a probe sequence.
#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    /// Probe radii and raw quotient values, in increasing radius order.
    pub probes: Vec<(f64, f64)>,
    /// Raw value at the largest probe radius.
    pub last_value: f64,
    /// Aitken-accelerated tail value.
    pub extrapolated: f64,
    /// Estimated limit error (difference of consecutive accelerated values).
    pub est_error: f64,
    /// Whether the tail met the relative tolerance.
    pub converged: bool,
}

/// Accelerates the tail of `values` (ordered by increasing radius) and
/// decides convergence at relative tolerance `rel_tol`.
///
/// A constant tail (deltas below rounding) is converged by definition; an
/// oscillating or growing tail reports `converged = false` and keeps the
/// raw last value as the estimate, so callers can refuse to fabricate a
/// limit.
pub fn tail_limit(radii: &[f64], values: &[f64], rel_tol: f64) -> LimitEstimate {
    assert_eq!(radii.len(), values.len());
    assert!(values.len() >= 3);
    let probes: Vec<(f64, f64)> = radii.iter().copied().zip(values.iter().copied()).collect();
    let last = *values.last().unwrap();

    let mut accelerated = Vec::new();
    for w in values.windows(3) {
        let (v0, v1, v2) = (w[0], w[1], w[2]);
        let d1 = v1 - v0;
        let d2 = v2 - v1;
        let denom = d2 - d1;
        let scale = v0.abs().max(v1.abs()).max(v2.abs()).max(1e-300);
        if denom.abs() <= 1e-14 * scale {
            // Flat or linearly drifting tail: delta-squared is singular, the
            // best available estimate is the latest value.
            accelerated.push(v2);
        } else {
            accelerated.push(v2 - d2 * d2 / denom);
        }
    }

    let a_last = *accelerated.last().unwrap();
    let a_prev = if accelerated.len() >= 2 {
        accelerated[accelerated.len() - 2]
    } else {
        last
    };
    let scale = a_last.abs().max(1.0);
    let est_error = (a_last - a_prev).abs();

    // The raw tail must itself be decaying (or already at the noise floor);
    // a plateaued oscillation is not a limit.
    let n = values.len();
    let raw_d_last = (values[n - 1] - values[n - 2]).abs();
    let raw_d_prev = (values[n - 2] - values[n - 3]).abs();
    let tail_settling = raw_d_last <= 0.75 * raw_d_prev + rel_tol * scale;

    let converged =
        values.iter().all(|v| v.is_finite()) && tail_settling && est_error <= rel_tol * scale;

    LimitEstimate {
        probes,
        last_value: last,
        extrapolated: a_last,
        est_error,
        converged,
    }
}

/// Geometric probe radii r_max / 2^k for k = count-1 .. 0, ascending.
pub fn geometric_probes(r_max: f64, count: usize) -> Vec<f64> {
    assert!(r_max > 0.0 && count >= 3);
    (0..count).map(|k| r_max / (1u64 << (count - 1 - k)) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_is_annihilated() {
        // v_k = 2 + c q^k with probes doubling: Aitken recovers 2 exactly.
        let radii = geometric_probes(40.0, 8);
        let values: Vec<f64> = radii.iter().map(|r| 2.0 + 3.0 / r).collect();
        let est = tail_limit(&radii, &values, 1e-6);
        assert!(est.converged);
        assert!((est.extrapolated - 2.0).abs() < 1e-9, "{}", est.extrapolated);
    }

    #[test]
    fn exponential_tail_converges() {
        let radii = geometric_probes(40.0, 8);
        let values: Vec<f64> = radii.iter().map(|r| 1.0 / (0.5 * r).tanh()).collect();
        let est = tail_limit(&radii, &values, 1e-6);
        assert!(est.converged);
        assert!((est.extrapolated - 1.0).abs() < 1e-8);
    }

    #[test]
    fn oscillating_tail_is_rejected() {
        let radii = geometric_probes(40.0, 8);
        let values: Vec<f64> =
            (0..8).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let est = tail_limit(&radii, &values, 1e-6);
        assert!(!est.converged);
    }
}
