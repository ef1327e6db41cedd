//! Exact solution of the Riemann problem for an ideal gas, used as a reference
//! for shock tubes.

use crate::error::{Error, Result};
use crate::euler::{Primitive, GAMMA};

const G1: f64 = (GAMMA - 1.0) / (2.0 * GAMMA);
const G2: f64 = (GAMMA + 1.0) / (2.0 * GAMMA);
const G3: f64 = 2.0 * GAMMA / (GAMMA - 1.0);
const G4: f64 = 2.0 / (GAMMA - 1.0);
const G5: f64 = 2.0 / (GAMMA + 1.0);
const G6: f64 = (GAMMA - 1.0) / (GAMMA + 1.0);
const G7: f64 = (GAMMA - 1.0) / 2.0;

fn sound(s: &Primitive) -> f64 {
    (GAMMA * s.p / s.rho).sqrt()
}

/// Pressure function of one side and its derivative.
fn pressure_function(p: f64, s: &Primitive) -> (f64, f64) {
    let a = sound(s);
    if p > s.p {
        let ak = G5 / s.rho;
        let bk = G6 * s.p;
        let q = (ak / (bk + p)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (bk + p)))
    } else {
        let r = p / s.p;
        (G4 * a * (r.powf(G1) - 1.0), r.powf(-G2) / (s.rho * a))
    }
}

/// Star-region residual `f_L(p) + f_R(p) + u_R - u_L`.
pub fn star_residual(left: &Primitive, right: &Primitive, p: f64) -> f64 {
    pressure_function(p, left).0 + pressure_function(p, right).0 + right.u - left.u
}

/// Star-region pressure and velocity by Newton iteration on the pressure.
pub fn star_state(left: &Primitive, right: &Primitive) -> Result<(f64, f64)> {
    for s in [left, right] {
        if !(s.rho > 0.0 && s.p > 0.0) {
            return Err(Error::invalid("riemann states need positive density and pressure"));
        }
    }
    let (al, ar) = (sound(left), sound(right));
    let du = right.u - left.u;
    if G4 * (al + ar) <= du {
        return Err(Error::Unsupported("riemann data generate vacuum".into()));
    }
    let floor = 1e-12 * left.p.min(right.p);
    let pv = 0.5 * (left.p + right.p) - 0.125 * du * (left.rho + right.rho) * (al + ar);
    let mut p = pv.max(floor);
    for _ in 0..100 {
        let (fl, dl) = pressure_function(p, left);
        let (fr, dr) = pressure_function(p, right);
        let next = (p - (fl + fr + du) / (dl + dr)).max(floor);
        let change = (next - p).abs() / (0.5 * (next + p));
        p = next;
        if change < 1e-15 {
            break;
        }
    }
    let (fl, _) = pressure_function(p, left);
    let (fr, _) = pressure_function(p, right);
    let scale = 1.0 + left.u.abs() + right.u.abs() + al + ar;
    if (fl + fr + du).abs() > 1e-12 * scale {
        return Err(Error::invalid("star pressure iteration did not converge"));
    }
    Ok((p, 0.5 * (left.u + right.u) + 0.5 * (fr - fl)))
}

/// Self-similar solution at `xi = (x - x0) / t`.
pub fn exact_riemann(left: &Primitive, right: &Primitive, xi: f64) -> Result<Primitive> {
    Ok(RiemannSolution::new(*left, *right)?.sample(xi))
}

/// A Riemann problem with its star state solved once, for repeated sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: Primitive,
    pub right: Primitive,
    pub p_star: f64,
    pub u_star: f64,
}

impl RiemannSolution {
    pub fn new(left: Primitive, right: Primitive) -> Result<Self> {
        let (p_star, u_star) = star_state(&left, &right)?;
        Ok(Self {
            left,
            right,
            p_star,
            u_star,
        })
    }

    pub fn sample(&self, xi: f64) -> Primitive {
        sample(&self.left, &self.right, self.p_star, self.u_star, xi)
    }
}

fn sample(l: &Primitive, r: &Primitive, ps: f64, us: f64, xi: f64) -> Primitive {
    if xi <= us {
        let al = sound(l);
        if ps > l.p {
            let sl = l.u - al * (G2 * ps / l.p + G1).sqrt();
            if xi < sl {
                *l
            } else {
                let q = ps / l.p;
                Primitive::new(l.rho * (q + G6) / (q * G6 + 1.0), us, ps)
            }
        } else {
            let head = l.u - al;
            let tail = us - al * (ps / l.p).powf(G1);
            if xi < head {
                *l
            } else if xi > tail {
                Primitive::new(l.rho * (ps / l.p).powf(1.0 / GAMMA), us, ps)
            } else {
                let c = G5 * (al + G7 * (l.u - xi));
                Primitive::new(
                    l.rho * (c / al).powf(G4),
                    G5 * (al + G7 * l.u + xi),
                    l.p * (c / al).powf(G3),
                )
            }
        }
    } else {
        let ar = sound(r);
        if ps > r.p {
            let sr = r.u + ar * (G2 * ps / r.p + G1).sqrt();
            if xi > sr {
                *r
            } else {
                let q = ps / r.p;
                Primitive::new(r.rho * (q + G6) / (q * G6 + 1.0), us, ps)
            }
        } else {
            let head = r.u + ar;
            let tail = us + ar * (ps / r.p).powf(G1);
            if xi > head {
                *r
            } else if xi < tail {
                Primitive::new(r.rho * (ps / r.p).powf(1.0 / GAMMA), us, ps)
            } else {
                let c = G5 * (ar - G7 * (r.u - xi));
                Primitive::new(
                    r.rho * (c / ar).powf(G4),
                    G5 * (-ar + G7 * r.u + xi),
                    r.p * (c / ar).powf(G3),
                )
            }
        }
    }
}
