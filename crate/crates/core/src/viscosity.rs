//! Entropy correction artificial viscosity: BR-1 gradients, the volume entropy
//! residual, the minimal viscosity coefficients, and the local entropy
//! correction baselines.
//!
//! All functions act on a single element. Vectors indexed by `j` hold basis
//! coefficients, vectors indexed by `q` hold values at volume quadrature points.
//! `jac` is the element Jacobian `h/2`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::basis::ElementOperators;
use crate::dg::apply;
use crate::error::{Error, Result};
use crate::euler::{EntropyVars, State};

pub const DEFAULT_DELTA_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscosityMode {
    None,
    /// One coefficient per element.
    Elementwise,
    /// Norm-minimal coefficient varying within the element.
    Subcell,
    /// Mean-value local entropy correction.
    MvCorrection,
    /// Derivative-based local entropy correction.
    DerivCorrection,
    /// Elementwise coefficient enforcing the inequality with both the
    /// entropy-projected and the plain traces.
    TwoInequalities,
}

impl ViscosityMode {
    pub const ALL: [ViscosityMode; 6] = [
        ViscosityMode::None,
        ViscosityMode::Elementwise,
        ViscosityMode::Subcell,
        ViscosityMode::MvCorrection,
        ViscosityMode::DerivCorrection,
        ViscosityMode::TwoInequalities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ViscosityMode::None => "none",
            ViscosityMode::Elementwise => "elementwise",
            ViscosityMode::Subcell => "subcell",
            ViscosityMode::MvCorrection => "mv_correction",
            ViscosityMode::DerivCorrection => "deriv_correction",
            ViscosityMode::TwoInequalities => "two_inequalities",
        }
    }

    /// Modes that add a BR-1 viscous term.
    pub fn uses_br1(self) -> bool {
        matches!(
            self,
            ViscosityMode::Elementwise | ViscosityMode::Subcell | ViscosityMode::TwoInequalities
        )
    }
}

impl fmt::Display for ViscosityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ViscosityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ViscosityMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown viscosity mode '{s}'")))
    }
}

/// Where the viscous matrix `K = du/dv` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscousMatrix {
    /// Once per element, at the element average; `K` is then constant.
    ElementAverage,
    /// At every volume quadrature point.
    Pointwise,
}

impl ViscousMatrix {
    pub fn name(self) -> &'static str {
        match self {
            ViscousMatrix::ElementAverage => "average",
            ViscousMatrix::Pointwise => "pointwise",
        }
    }
}

impl fmt::Display for ViscousMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ViscousMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(ViscousMatrix::ElementAverage),
            "pointwise" => Ok(ViscousMatrix::Pointwise),
            _ => Err(Error::invalid(format!("unknown viscous matrix '{s}' (average, pointwise)"))),
        }
    }
}

/// Regularized ratio `a b / (tol + b^2)`, which approximates `a / b` and
/// vanishes with `b`.
#[inline]
pub fn reg_ratio(a: f64, b: f64, tol: f64) -> f64 {
    a * b / (tol + b * b)
}

/// BR-1 gradient coefficients `Theta` of the projected entropy variables.
///
/// `jumps` holds `[[v]] = v_ext - v_int` at the left and right element ends.
pub fn br1_gradient(
    ops: &ElementOperators,
    jac: f64,
    v_coeffs: &[EntropyVars],
    jumps: [EntropyVars; 2],
) -> Vec<EntropyVars> {
    let dv = apply(&ops.diff, v_coeffs);
    dv.iter()
        .enumerate()
        .map(|(j, d)| {
            // n = -1 on the left, +1 on the right
            let surf = 0.5 * (ops.lift[(j, 1)] * jumps[1] - ops.lift[(j, 0)] * jumps[0]);
            (d + surf) / jac
        })
        .collect()
}

/// Volume entropy residual `(-f(u_h), d v_h/dx) + psi_R - psi_L`.
///
/// `fluxes` are physical fluxes at the volume quadrature points and `psi` the
/// entropy potential at the left and right ends.
pub fn volume_entropy_residual(
    ops: &ElementOperators,
    fluxes: &[State],
    v_coeffs: &[EntropyVars],
    psi: [f64; 2],
) -> f64 {
    // the Jacobian cancels between dx and d/dx
    let dv_q = apply(&ops.grad_vandermonde, v_coeffs);
    let volume: f64 = fluxes
        .iter()
        .zip(&dv_q)
        .zip(&ops.rule.weights)
        .map(|((f, dv), w)| w * f.dot(dv))
        .sum();
    -volume + psi[1] - psi[0]
}

/// Pointwise dissipation density `a_q = Theta_q^T K_q Theta_q`, with one
/// viscous matrix per volume quadrature point.
pub fn dissipation_density(ops: &ElementOperators, theta: &[EntropyVars], k: &[Matrix3<f64>]) -> Vec<f64> {
    let tq = if ops.collocated {
        theta.to_vec()
    } else {
        apply(&ops.vandermonde, theta)
    };
    tq.iter().zip(k).map(|(t, kq)| t.dot(&(kq * t))).collect()
}

/// `sum_q J w_q a_q`, the element dissipation per unit viscosity.
pub fn integrate_density(ops: &ElementOperators, jac: f64, a: &[f64]) -> f64 {
    jac * a.iter().zip(&ops.rule.weights).map(|(x, w)| w * x).sum::<f64>()
}

/// Smallest constant coefficient with `eps d + min(0, delta) >= 0`, regularized.
pub fn viscosity_elementwise(delta: f64, d: f64, tol: f64) -> f64 {
    reg_ratio(-delta.min(0.0), d, tol)
}

/// Norm-minimal coefficient `eps_q = b a_q / ||a||^2` with `b = -min(0, delta)`.
pub fn viscosity_subcell(ops: &ElementOperators, jac: f64, delta: f64, a: &[f64], tol: f64) -> Vec<f64> {
    let b = -delta.min(0.0);
    let norm2 = jac * a.iter().zip(&ops.rule.weights).map(|(x, w)| w * x * x).sum::<f64>();
    let scale = reg_ratio(b, norm2, tol);
    a.iter().map(|x| scale * x).collect()
}

/// Coefficients of `sigma = Pi_N(eps K Theta)`; `eps` and `k` are given at the
/// volume quadrature points.
pub fn viscous_flux(ops: &ElementOperators, eps: &[f64], k: &[Matrix3<f64>], theta: &[EntropyVars]) -> Vec<State> {
    if eps.iter().all(|&e| e == eps[0]) && k.iter().all(|m| *m == k[0]) {
        // constant coefficient: the projection is exact
        return theta.iter().map(|t| eps[0] * (k[0] * t)).collect();
    }
    if ops.collocated {
        return theta.iter().zip(eps).zip(k).map(|((t, e), m)| *e * (m * t)).collect();
    }
    let tq = apply(&ops.vandermonde, theta);
    let sq: Vec<State> = tq.iter().zip(eps).zip(k).map(|((t, e), m)| *e * (m * t)).collect();
    apply(&ops.to_coeffs, &sq)
}

/// Weak divergence `(g, w) = -(sigma, dw/dx) + <{sigma} n, w>`.
///
/// `face_avg` holds the averaged `{sigma}` at the left and right ends.
pub fn viscous_divergence(
    ops: &ElementOperators,
    jac: f64,
    sigma: &[State],
    face_avg: [State; 2],
) -> Vec<State> {
    let sq = if ops.collocated {
        sigma.to_vec()
    } else {
        apply(&ops.vandermonde, sigma)
    };
    let vol = apply(&ops.volume, &sq);
    vol.iter()
        .enumerate()
        .map(|(j, v)| (-v + ops.lift[(j, 1)] * face_avg[1] - ops.lift[(j, 0)] * face_avg[0]) / jac)
        .collect()
}

/// A local entropy correction: RHS contribution and its coefficient.
#[derive(Debug, Clone)]
pub struct LocalCorrection {
    pub rhs: Vec<State>,
    pub eps: f64,
    /// Entropy dissipated per unit coefficient.
    pub dissipation: f64,
}

/// Mean-value correction `g = -eps A0 (v_h - mean(v_h))`.
pub fn local_correction_mv(
    ops: &ElementOperators,
    jac: f64,
    v_coeffs: &[EntropyVars],
    a0: &Matrix3<f64>,
    delta: f64,
    tol: f64,
) -> LocalCorrection {
    let w = &ops.rule.weights;
    let vq = if ops.collocated {
        v_coeffs.to_vec()
    } else {
        apply(&ops.vandermonde, v_coeffs)
    };
    let mean = vq.iter().zip(w).fold(EntropyVars::zeros(), |acc, (v, wq)| acc + *wq * v) / 2.0;
    let dev: Vec<EntropyVars> = vq.iter().map(|v| v - mean).collect();
    let dissipation = jac * dev.iter().zip(w).map(|(d, wq)| wq * d.dot(&(a0 * d))).sum::<f64>();
    let eps = reg_ratio(-delta.min(0.0), dissipation, tol);
    let gq: Vec<State> = dev.iter().map(|d| -eps * (a0 * d)).collect();
    let rhs = if ops.collocated { gq } else { apply(&ops.to_coeffs, &gq) };
    LocalCorrection { rhs, eps, dissipation }
}

/// Derivative-based correction `(g, w) = -eps (A0 dv_h/dx, dw/dx)`.
pub fn local_correction_deriv(
    ops: &ElementOperators,
    jac: f64,
    v_coeffs: &[EntropyVars],
    a0: &Matrix3<f64>,
    delta: f64,
    tol: f64,
) -> LocalCorrection {
    let w = &ops.rule.weights;
    // reference derivative at quadrature points
    let dr = apply(&ops.grad_vandermonde, v_coeffs);
    let dissipation = dr.iter().zip(w).map(|(d, wq)| wq * d.dot(&(a0 * d))).sum::<f64>() / jac;
    let eps = reg_ratio(-delta.min(0.0), dissipation, tol);
    let flux: Vec<State> = dr.iter().map(|d| a0 * d).collect();
    let rhs = apply(&ops.volume, &flux)
        .into_iter()
        .map(|g| -eps * g / (jac * jac))
        .collect();
    LocalCorrection { rhs, eps, dissipation }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reg_ratio_limits() {
        assert_eq!(reg_ratio(1.0, 0.0, 1e-14), 0.0);
        assert!((reg_ratio(2.0, 4.0, 1e-14) - 0.5).abs() < 1e-15);
        assert_eq!(viscosity_elementwise(0.3, 1.0, 1e-14), 0.0);
        assert_eq!(viscosity_elementwise(0.0, 0.0, 1e-14), 0.0);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in ViscosityMode::ALL {
            assert_eq!(m.name().parse::<ViscosityMode>().unwrap(), m);
        }
        assert!("lots".parse::<ViscosityMode>().is_err());
    }

    #[test]
    fn constant_entropy_variables_have_zero_gradient() {
        for ops in [ElementOperators::nodal(3).unwrap(), ElementOperators::modal(3).unwrap()] {
            let c = ops.to_coeffs.clone() * nalgebra::DVector::from_element(ops.n_quad(), 1.0);
            let v: Vec<EntropyVars> = c.iter().map(|&x| EntropyVars::new(2.0 * x, -x, -0.5 * x)).collect();
            let theta = br1_gradient(&ops, 0.1, &v, [EntropyVars::zeros(); 2]);
            assert!(theta.iter().all(|t| t.amax() < 1e-12));
        }
    }

    #[test]
    fn subcell_reduces_to_elementwise_for_constant_density() {
        let ops = ElementOperators::modal(4).unwrap();
        let a = vec![0.7; ops.n_quad()];
        let jac = 0.05;
        let d = integrate_density(&ops, jac, &a);
        let sub = viscosity_subcell(&ops, jac, -0.3, &a, DEFAULT_DELTA_TOL);
        let el = viscosity_elementwise(-0.3, d, DEFAULT_DELTA_TOL);
        // the two regularizations differ at the 1e-12 level
        assert!(sub.iter().all(|e| (e - el).abs() < 1e-10 * el));
    }
}
