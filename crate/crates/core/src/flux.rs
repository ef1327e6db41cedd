//! Numerical interface fluxes and the two-point entropy conservative volume flux.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::euler::{self, Primitive, State, GAMMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    /// Local Lax-Friedrichs with the Davis wavespeed estimate.
    LlfDavis,
    /// HLLC with Davis-type outer wavespeed bounds.
    Hllc,
    /// Ranocha's entropy conservative flux, no dissipation.
    EcRanocha,
    /// Entropy conservative flux plus a Roe-type matrix dissipation in entropy variables.
    EcMatrixDissipation,
}

impl FluxKind {
    pub const ALL: [FluxKind; 4] = [
        FluxKind::LlfDavis,
        FluxKind::Hllc,
        FluxKind::EcRanocha,
        FluxKind::EcMatrixDissipation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FluxKind::LlfDavis => "llf_davis",
            FluxKind::Hllc => "hllc",
            FluxKind::EcRanocha => "ec_ranocha",
            FluxKind::EcMatrixDissipation => "ec_plus_matrix_dissipation",
        }
    }
}

impl fmt::Display for FluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FluxKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FluxKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown flux kind '{s}'")))
    }
}

/// Flux through a face in the `+x` direction, `ul` on the left, `ur` on the right.
pub fn numerical_flux(kind: FluxKind, ul: &State, ur: &State) -> Result<State> {
    match kind {
        FluxKind::LlfDavis => llf_davis(ul, ur),
        FluxKind::Hllc => hllc(ul, ur),
        FluxKind::EcRanocha => ec_volume_flux(ul, ur),
        FluxKind::EcMatrixDissipation => ec_matrix_dissipation(ul, ur),
    }
}

/// Normal flux `f*_n(u_int, u_ext)` out of the element owning `u_int`, with
/// outward normal `n = ±1`.
///
/// Skew symmetric by construction: `f*_n(a, b) = -f*_{-n}(b, a)`.
pub fn interface_flux(kind: FluxKind, u_int: &State, u_ext: &State, n: f64) -> Result<State> {
    if n > 0.0 {
        numerical_flux(kind, u_int, u_ext)
    } else {
        Ok(-numerical_flux(kind, u_ext, u_int)?)
    }
}

fn llf_davis(ul: &State, ur: &State) -> Result<State> {
    let lambda = euler::max_wavespeed(ul, ur)?;
    let fl = euler::flux(ul)?;
    let fr = euler::flux(ur)?;
    Ok(0.5 * (fl + fr) - 0.5 * lambda * (ur - ul))
}

fn hllc(ul: &State, ur: &State) -> Result<State> {
    let pl = euler::pressure(ul)?;
    let pr = euler::pressure(ur)?;
    let (rl, rr) = (ul[0], ur[0]);
    let (vl, vr) = (ul[1] / rl, ur[1] / rr);
    let al = (GAMMA * pl / rl).sqrt();
    let ar = (GAMMA * pr / rr).sqrt();
    let sl = (vl - al).min(vr - ar);
    let sr = (vl + al).max(vr + ar);

    let fl = euler::flux_with_pressure(ul, pl);
    let fr = euler::flux_with_pressure(ur, pr);
    if sl >= 0.0 {
        return Ok(fl);
    }
    if sr <= 0.0 {
        return Ok(fr);
    }
    let s_star = (pr - pl + rl * vl * (sl - vl) - rr * vr * (sr - vr))
        / (rl * (sl - vl) - rr * (sr - vr));
    let star = |u: &State, rho: f64, v: f64, p: f64, s: f64| {
        let c = rho * (s - v) / (s - s_star);
        State::new(
            c,
            c * s_star,
            c * (u[2] / rho + (s_star - v) * (s_star + p / (rho * (s - v)))),
        )
    };
    if s_star >= 0.0 {
        Ok(fl + sl * (star(ul, rl, vl, pl, sl) - ul))
    } else {
        Ok(fr + sr * (star(ur, rr, vr, pr, sr) - ur))
    }
}

/// Logarithmic mean `(a - b) / (ln a - ln b)` with a series for nearly equal arguments.
pub fn ln_mean(a: f64, b: f64) -> f64 {
    let f = (a - b) / (a + b);
    let f2 = f * f;
    if f2 < 1e-4 {
        0.5 * (a + b) / (1.0 + f2 * (1.0 / 3.0 + f2 * (1.0 / 5.0 + f2 / 7.0)))
    } else {
        (a - b) / (a / b).ln()
    }
}

/// Ranocha's entropy conservative and kinetic energy preserving two-point flux.
pub fn ec_volume_flux(ul: &State, ur: &State) -> Result<State> {
    let pl = euler::pressure(ul)?;
    let pr = euler::pressure(ur)?;
    let (rl, rr) = (ul[0], ur[0]);
    let (vl, vr) = (ul[1] / rl, ur[1] / rr);

    let rho_mean = ln_mean(rl, rr);
    // 1 / logmean(rho/p), using homogeneity of the logarithmic mean
    let inv_rho_p_mean = pl * pr / ln_mean(rl * pr, rr * pl);
    let v_avg = 0.5 * (vl + vr);
    let p_avg = 0.5 * (pl + pr);
    let v2_avg = 0.5 * vl * vr;

    let f1 = rho_mean * v_avg;
    let f2 = f1 * v_avg + p_avg;
    let f3 = f1 * (v2_avg + inv_rho_p_mean / (GAMMA - 1.0)) + 0.5 * (pl * vr + pr * vl);
    Ok(State::new(f1, f2, f3))
}

/// Central two-point flux `(f(uL) + f(uR)) / 2`.
pub fn central_flux(ul: &State, ur: &State) -> Result<State> {
    Ok(0.5 * (euler::flux(ul)? + euler::flux(ur)?))
}

fn ec_matrix_dissipation(ul: &State, ur: &State) -> Result<State> {
    let f_ec = ec_volume_flux(ul, ur)?;
    let vl = euler::entropy_vars(ul)?;
    let vr = euler::entropy_vars(ur)?;
    let pl = euler::pressure(ul)?;
    let pr = euler::pressure(ur)?;

    // eigen-structure of df/du at an averaged state
    let avg = Primitive::new(
        ln_mean(ul[0], ur[0]),
        0.5 * (ul[1] / ul[0] + ur[1] / ur[0]),
        0.5 * (pl + pr),
    )
    .to_conserved();
    let vel = avg[1] / avg[0];
    let a = euler::sound_speed(&avg)?;
    let h = (avg[2] + euler::pressure(&avg)?) / avg[0];
    let r = Matrix3::new(
        1.0,
        1.0,
        1.0,
        vel - a,
        vel,
        vel + a,
        h - vel * a,
        0.5 * vel * vel,
        h + vel * a,
    );
    let lambda = Vector3::new((vel - a).abs(), vel.abs(), (vel + a).abs());
    let r_inv = r
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular eigenvector matrix"))?;
    // A0 = R T R^T with T diagonal for correctly scaled eigenvectors
    let t = r_inv * euler::dudv(&avg)? * r_inv.transpose();
    let scale = Matrix3::from_diagonal(&Vector3::from_fn(|i, _| lambda[i] * t[(i, i)]));
    let dissipation = r * scale * r.transpose();
    Ok(f_ec - 0.5 * dissipation * (vr - vl))
}
