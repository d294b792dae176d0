//! Dense integration of scalar initial value problems u' = g(r), u(0) = 0,
//! used as the ODE route for constructing comparison warping functions.
//!
//! The integrand has no u-dependence, so a classical RK4 step collapses to
//! Simpson's rule; the solution is stored on a uniform step grid (refined at
//! supplied knots) and evaluated with cubic Hermite interpolation using the
//! known slopes u' = g at the nodes.

#[derive(Debug, Clone)]
pub struct OdeTable {
    r: Vec<f64>,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl OdeTable {
    /// Integrates `g` from 0 to `r_end` with at least `min_steps` steps,
    /// inserting `knots` as mandatory nodes.
    pub fn integrate<G: Fn(f64) -> f64>(g: G, r_end: f64, min_steps: usize, knots: &[f64]) -> Self {
        assert!(r_end > 0.0);
        let mut nodes: Vec<f64> = (0..=min_steps)
            .map(|i| r_end * i as f64 / min_steps as f64)
            .collect();
        for &k in knots {
            if k > 0.0 && k < r_end {
                nodes.push(k);
            }
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();

        let mut u = Vec::with_capacity(nodes.len());
        let mut du = Vec::with_capacity(nodes.len());
        let mut acc = 0.0;
        u.push(0.0);
        du.push(g(0.0));
        for i in 1..nodes.len() {
            let (a, b) = (nodes[i - 1], nodes[i]);
            let h = b - a;
            let gb = g(b);
            acc += h / 6.0 * (du[i - 1] + 4.0 * g(0.5 * (a + b)) + gb);
            u.push(acc);
            du.push(gb);
        }
        OdeTable { r: nodes, u, du }
    }

    pub fn r_end(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Cubic Hermite evaluation of u(t) for t in [0, r_end].
    pub fn value(&self, t: f64) -> f64 {
        let i = match self.r.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => return self.u[i],
            Err(i) => i.saturating_sub(1).min(self.r.len() - 2),
        };
        let h = self.r[i + 1] - self.r[i];
        let s = (t - self.r[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.u[i]
            + (s3 - 2.0 * s2 + s) * h * self.du[i]
            + (-2.0 * s3 + 3.0 * s2) * self.u[i + 1]
            + (s3 - s2) * h * self.du[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_cosine() {
        let t = OdeTable::integrate(f64::cos, 10.0, 2048, &[]);
        for &x in &[0.1, 1.0, 5.43, 9.99] {
            assert!((t.value(x) - x.sin()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn exact_at_nodes_and_monotone_for_positive_integrand() {
        let t = OdeTable::integrate(|x| 1.0 + x * x, 2.0, 64, &[0.7]);
        assert!((t.value(2.0) - (2.0 + 8.0 / 3.0)).abs() < 1e-12);
        assert!(t.value(0.7) < t.value(0.71));
    }
}
