//! Error norms, convergence tables, and other run diagnostics.

pub mod nullspace;
pub mod residual_study;
pub mod riemann;
pub mod spectrum;

use crate::basis::gauss_legendre;
use crate::dg::{Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::euler::State;

pub use nullspace::{gradient_nullspace, NullspaceReport};
pub use residual_study::{residual_convergence_study, ResidualQuadrature, ResidualStudy};
pub use riemann::{exact_riemann, star_state, RiemannSolution};
pub use spectrum::{linearized_spectrum, SpectrumReport};

/// Least-squares slope of `log(e)` against `log(h)`.
pub fn least_squares_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|y| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub h: f64,
    pub n_elements: usize,
    pub error: f64,
}

/// Errors under mesh refinement for one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub degree: usize,
    /// Sorted by decreasing `h`.
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(degree: usize, mut rows: Vec<ConvergenceRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        Self { degree, rows }
    }

    /// Incremental rates `log(e_i / e_{i+1}) / log(h_i / h_{i+1})`; `None` for the first row.
    pub fn rates(&self) -> Vec<Option<f64>> {
        let mut out = vec![None];
        for w in self.rows.windows(2) {
            out.push(Some((w[0].error / w[1].error).ln() / (w[0].h / w[1].h).ln()));
        }
        out.truncate(self.rows.len());
        out
    }

    /// Least-squares slope over the finest three rows.
    pub fn slope(&self) -> f64 {
        self.slope_over(3)
    }

    /// Least-squares slope over the finest `n` rows (all rows if fewer).
    pub fn slope_over(&self, n: usize) -> f64 {
        let start = self.rows.len().saturating_sub(n);
        let tail = &self.rows[start..];
        let h: Vec<f64> = tail.iter().map(|r| r.h).collect();
        let e: Vec<f64> = tail.iter().map(|r| r.error).collect();
        least_squares_slope(&h, &e)
    }

    /// Least-squares slope over all rows.
    pub fn global_slope(&self) -> f64 {
        self.slope_over(self.rows.len())
    }
}

/// Quadrature-weighted L2 norm of `u_h - exact` over all conserved variables.
pub fn l2_error(disc: &Discretization, u: &SolutionField, exact: impl Fn(f64) -> Result<State>) -> Result<f64> {
    let rule = gauss_legendre(disc.ops.degree + 4)?;
    let jac = disc.mesh.jacobian();
    let mut sum = 0.0;
    for k in 0..disc.n_elements() {
        for (r, w) in rule.points.iter().zip(&rule.weights) {
            let x = disc.mesh.map(k, *r);
            let d = disc.eval(u, k, *r) - exact(x)?;
            sum += jac * w * d.norm_squared();
        }
    }
    Ok(sum.sqrt())
}

/// L1 norm of the density error, integrated on `sub` equal subintervals per
/// element so discontinuities in the reference are resolved.
pub fn l1_density_error(
    disc: &Discretization,
    u: &SolutionField,
    exact: impl Fn(f64) -> Result<State>,
    sub: usize,
) -> Result<f64> {
    if sub == 0 {
        return Err(Error::invalid("need at least one subinterval"));
    }
    let rule = gauss_legendre(disc.ops.degree + 2)?;
    let jac = disc.mesh.jacobian() / sub as f64;
    let mut sum = 0.0;
    for k in 0..disc.n_elements() {
        for s in 0..sub {
            let lo = -1.0 + 2.0 * s as f64 / sub as f64;
            let hi = -1.0 + 2.0 * (s + 1) as f64 / sub as f64;
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let r = 0.5 * (1.0 - p) * lo + 0.5 * (1.0 + p) * hi;
                let x = disc.mesh.map(k, r);
                sum += jac * w * (disc.eval(u, k, r)[0] - exact(x)?[0]).abs();
            }
        }
    }
    Ok(sum)
}

/// One logged point of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRecord {
    pub t: f64,
    pub total_entropy: f64,
    /// Semi-discrete entropy rate `sum_k (dS/dt, 1)_k` at the logged state.
    pub entropy_rate: f64,
    /// NaN when no exact solution is known.
    pub l2_error: f64,
    pub max_eps: f64,
}

/// Entropy time series with monotonicity checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntropyHistory {
    pub records: Vec<HistoryRecord>,
    /// Entropy leaving through ghost boundaries, integrated in time; zero on periodic meshes.
    pub boundary_outflow: Vec<f64>,
}

impl EntropyHistory {
    pub fn push(&mut self, record: HistoryRecord, boundary_outflow: f64) {
        self.records.push(record);
        self.boundary_outflow.push(boundary_outflow);
    }

    /// Largest increase of `S(t) + outflow(t)` between consecutive records.
    pub fn max_increase(&self) -> f64 {
        let budget: Vec<f64> = self
            .records
            .iter()
            .zip(&self.boundary_outflow)
            .map(|(r, b)| r.total_entropy + b)
            .collect();
        budget.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Entropy budget never grows by more than `tol` between records.
    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.records.len() < 2 || self.max_increase() <= tol
    }

    /// Largest deviation of the total entropy from its initial value.
    pub fn max_drift(&self) -> f64 {
        let s0 = self.records.first().map_or(0.0, |r| r.total_entropy);
        self.records
            .iter()
            .map(|r| (r.total_entropy - s0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{make_mesh, BoundaryMode, ElementOperators, Primitive};

    fn disc(n: usize, k: usize) -> Discretization {
        Discretization::new(
            ElementOperators::nodal(n).unwrap(),
            make_mesh(0.0, 1.0, k, BoundaryMode::Periodic).unwrap(),
        )
    }

    #[test]
    fn slope_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        assert!((least_squares_slope(&h, &e) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn table_sorts_and_rates() {
        let rows = [8usize, 4, 16]
            .iter()
            .map(|&k| ConvergenceRow {
                h: 1.0 / k as f64,
                n_elements: k,
                error: (1.0 / k as f64).powi(2),
            })
            .collect();
        let t = ConvergenceTable::new(1, rows);
        assert_eq!(t.rows[0].n_elements, 4);
        let rates = t.rates();
        assert!(rates[0].is_none());
        assert!((rates[2].unwrap() - 2.0).abs() < 1e-12);
        assert!((t.slope() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l2_error_vanishes_for_polynomials() {
        let d = disc(3, 4);
        let f = |x: f64| State::new(1.0 + x * x * x, 0.5 * x, 2.0 - x * x);
        let u = d.interpolate(f);
        assert!(l2_error(&d, &u, |x| Ok(f(x))).unwrap() < 1e-13);
    }

    #[test]
    fn l2_error_of_translated_wave_is_positive_and_converges() {
        let wave = |x: f64| Primitive::new(1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin(), 0.1, 10.0).to_conserved();
        let errs: Vec<f64> = [4usize, 8, 16]
            .iter()
            .map(|&k| {
                let d = disc(2, k);
                let u = d.project(wave).unwrap();
                l2_error(&d, &u, |x| Ok(wave(x))).unwrap()
            })
            .collect();
        assert!(errs.iter().all(|e| *e > 0.0 && e.is_finite()));
        let h = [0.25, 0.125, 0.0625];
        assert!((least_squares_slope(&h, &errs) - 3.0).abs() < 0.2);
    }

    #[test]
    fn l1_of_step_is_resolved_by_subintervals() {
        let d = disc(1, 2);
        let u = d.interpolate(|_| State::new(1.0, 0.0, 1.0));
        let step = |x: f64| Ok(State::new(if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0));
        let e = l1_density_error(&d, &u, step, 50).unwrap();
        assert!((e - 0.7).abs() < 1e-12);
    }

    #[test]
    fn history_flags() {
        let mut h = EntropyHistory::default();
        for (t, s) in [(0.0, 1.0), (0.1, 0.9), (0.2, 0.95)] {
            h.push(
                HistoryRecord {
                    t,
                    total_entropy: s,
                    entropy_rate: 0.0,
                    l2_error: f64::NAN,
                    max_eps: 0.0,
                },
                0.0,
            );
        }
        assert!(!h.is_nonincreasing(1e-10));
        assert!((h.max_increase() - 0.05).abs() < 1e-14);
        assert!((h.max_drift() - 0.1).abs() < 1e-14);
    }
}
