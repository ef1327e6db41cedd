//! Pointwise physics of the 1D compressible Euler equations with an ideal gas.
//!
//! Conservative states are `(rho, rho*u, E)`. The entropy is `S = -rho*s` with
//! `s = log(p / rho^gamma)`, its entropy variables are `v = dS/du`, and the
//! entropy potential is `psi = (gamma-1) rho*u`.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub const GAMMA: f64 = 1.4;

/// Conservative variables `(rho, rho*u, E)`.
pub type State = Vector3<f64>;
/// Entropy variables `(v1, v2, v3)`.
pub type EntropyVars = Vector3<f64>;

/// Primitive variables, mostly for setting up initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl Primitive {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        Self { rho, u, p }
    }

    pub fn to_conserved(self) -> State {
        State::new(
            self.rho,
            self.rho * self.u,
            self.p / (GAMMA - 1.0) + 0.5 * self.rho * self.u * self.u,
        )
    }

    pub fn from_conserved(u: &State) -> Result<Self> {
        let rhoe = admissible_internal_energy(u)?;
        Ok(Self {
            rho: u[0],
            u: u[1] / u[0],
            p: (GAMMA - 1.0) * rhoe,
        })
    }
}

/// `rho*e = E - (rho*u)^2 / (2 rho)`; no admissibility check.
#[inline]
pub fn internal_energy(u: &State) -> f64 {
    u[2] - 0.5 * u[1] * u[1] / u[0]
}

/// Internal energy density, or an admissibility error if `rho <= 0` or `rho*e <= 0`.
#[inline]
pub fn admissible_internal_energy(u: &State) -> Result<f64> {
    let rhoe = internal_energy(u);
    // negated comparisons also reject NaN
    if !(u[0] > 0.0) || !(rhoe > 0.0) {
        return Err(Error::Inadmissible {
            rho: u[0],
            internal_energy: rhoe,
            location: None,
        });
    }
    Ok(rhoe)
}

pub fn is_admissible(u: &State) -> bool {
    admissible_internal_energy(u).is_ok()
}

pub fn pressure(u: &State) -> Result<f64> {
    Ok((GAMMA - 1.0) * admissible_internal_energy(u)?)
}

pub fn sound_speed(u: &State) -> Result<f64> {
    Ok((GAMMA * pressure(u)? / u[0]).sqrt())
}

/// Physical flux `(rho*u, rho*u^2 + p, u (E + p))`.
pub fn flux(u: &State) -> Result<State> {
    let p = pressure(u)?;
    Ok(flux_with_pressure(u, p))
}

#[inline]
pub(crate) fn flux_with_pressure(u: &State, p: f64) -> State {
    let vel = u[1] / u[0];
    State::new(u[1], u[1] * vel + p, vel * (u[2] + p))
}

/// Physical entropy `s = log(p / rho^gamma)`.
pub fn physical_entropy(u: &State) -> Result<f64> {
    let p = pressure(u)?;
    Ok(p.ln() - GAMMA * u[0].ln())
}

/// Mathematical entropy `S = -rho*s`.
pub fn entropy(u: &State) -> Result<f64> {
    Ok(-u[0] * physical_entropy(u)?)
}

/// Entropy potential `psi = v^T f - F`.
///
/// With `S = -rho*s` this is `(gamma-1) rho*u`; the familiar `rho*u` belongs to
/// the entropy normalized by `1/(gamma-1)`.
pub fn entropy_potential(u: &State) -> f64 {
    (GAMMA - 1.0) * u[1]
}

/// Entropy flux `F = -rho*s*u`.
pub fn entropy_flux(u: &State) -> Result<f64> {
    Ok(-u[1] * physical_entropy(u)?)
}

pub fn entropy_vars(u: &State) -> Result<EntropyVars> {
    let rhoe = admissible_internal_energy(u)?;
    let s = ((GAMMA - 1.0) * rhoe).ln() - GAMMA * u[0].ln();
    Ok(EntropyVars::new(
        (rhoe * (GAMMA + 1.0 - s) - u[2]) / rhoe,
        u[1] / rhoe,
        -u[0] / rhoe,
    ))
}

/// Inverse of [`entropy_vars`].
pub fn cons_vars(v: &EntropyVars) -> Result<State> {
    if !(v[2] < 0.0) || !v[0].is_finite() || !v[1].is_finite() {
        return Err(Error::Inadmissible {
            rho: f64::NAN,
            internal_energy: f64::NAN,
            location: None,
        });
    }
    let gm1 = GAMMA - 1.0;
    let s = GAMMA - v[0] + v[1] * v[1] / (2.0 * v[2]);
    let rhoe = (gm1 / (-v[2]).powf(GAMMA)).powf(1.0 / gm1) * (-s / gm1).exp();
    let u = State::new(
        -rhoe * v[2],
        rhoe * v[1],
        rhoe * (1.0 - v[1] * v[1] / (2.0 * v[2])),
    );
    if !(rhoe > 0.0) || !rhoe.is_finite() {
        return Err(Error::Inadmissible {
            rho: u[0],
            internal_energy: rhoe,
            location: None,
        });
    }
    Ok(u)
}

/// Symmetric positive definite Jacobian `du/dv` for the entropy `S = -rho*s`.
///
/// This is the classical symmetrizer (written for the entropy `-rho*s/(gamma-1)`)
/// divided by `gamma - 1`, since the entropy variables here are scaled by
/// `gamma - 1` relative to that normalization.
pub fn dudv(u: &State) -> Result<Matrix3<f64>> {
    let p = pressure(u)?;
    let rho = u[0];
    let vel = u[1] / rho;
    let e = u[2];
    let a2 = GAMMA * p / rho;
    let h = a2 / (GAMMA - 1.0) + 0.5 * vel * vel;
    let m = Matrix3::new(
        rho,
        u[1],
        e,
        u[1],
        u[1] * vel + p,
        vel * (e + p),
        e,
        vel * (e + p),
        rho * h * h - a2 * p / (GAMMA - 1.0),
    );
    Ok(m / (GAMMA - 1.0))
}

/// Davis estimate `max(|uL| + aL, |uR| + aR)`.
pub fn max_wavespeed(ul: &State, ur: &State) -> Result<f64> {
    let sl = (ul[1] / ul[0]).abs() + sound_speed(ul)?;
    let sr = (ur[1] / ur[0]).abs() + sound_speed(ur)?;
    Ok(sl.max(sr))
}
