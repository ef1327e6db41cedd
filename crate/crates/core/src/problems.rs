//! Benchmark problems: initial data, domains, boundary treatment and exact
//! solutions where available.

use std::f64::consts::PI;

use crate::diagnostics::riemann::exact_riemann;
use crate::error::{Error, Result};
use crate::euler::{Primitive, State, GAMMA};
use crate::mesh::BoundaryMode;

/// Two constant states separated at `x0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannData {
    pub left: Primitive,
    pub right: Primitive,
    pub x0: f64,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    /// `rho = 1 + A sin(2 pi x)`, `u = 0.1`, `p = 10` on the periodic unit interval.
    DensityWave { amplitude: f64 },
    ModifiedSod,
    ModifiedSodNearVacuum,
    ShuOsher,
    Riemann(RiemannData),
    /// Smooth periodic field on `[-1, 1]` used by the residual convergence study.
    SmoothField,
}

const SOD_LEFT: Primitive = Primitive { rho: 1.0, u: 0.75, p: 1.0 };
const SHU_OSHER_LEFT: Primitive = Primitive {
    rho: 3.857143,
    u: 2.629369,
    p: 10.33333,
};

impl Problem {
    pub fn name(&self) -> &'static str {
        match self {
            Problem::DensityWave { .. } => "density_wave",
            Problem::ModifiedSod => "modified_sod",
            Problem::ModifiedSodNearVacuum => "modified_sod_near_vacuum",
            Problem::ShuOsher => "shu_osher",
            Problem::Riemann(_) => "custom",
            Problem::SmoothField => "smooth_field",
        }
    }

    /// Riemann data for the shock tubes.
    pub fn riemann_data(&self) -> Option<RiemannData> {
        let sod = |right| RiemannData {
            left: SOD_LEFT,
            right,
            x0: 0.3,
            a: 0.0,
            b: 1.0,
            t_final: 0.2,
        };
        match *self {
            Problem::ModifiedSod => Some(sod(Primitive::new(0.125, 0.0, 0.1))),
            Problem::ModifiedSodNearVacuum => Some(sod(Primitive::new(0.0125, 0.0, 0.01))),
            Problem::Riemann(d) => Some(d),
            _ => None,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        if let Some(d) = self.riemann_data() {
            return (d.a, d.b);
        }
        match self {
            Problem::ShuOsher => (-5.0, 5.0),
            _ => (-1.0, 1.0),
        }
    }

    pub fn default_t_final(&self) -> f64 {
        if let Some(d) = self.riemann_data() {
            return d.t_final;
        }
        match self {
            Problem::ShuOsher => 1.8,
            _ => 1.0,
        }
    }

    pub fn boundary(&self) -> BoundaryMode {
        match self {
            Problem::DensityWave { .. } | Problem::SmoothField => BoundaryMode::Periodic,
            _ => BoundaryMode::DirichletGhost,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Problem::DensityWave { amplitude } if !(amplitude.abs() < 1.0) => {
                Err(Error::invalid(format!("density wave amplitude {amplitude} must satisfy |A| < 1")))
            }
            Problem::Riemann(d) => {
                if !(d.a < d.x0 && d.x0 < d.b) {
                    return Err(Error::invalid("riemann interface must lie inside the domain"));
                }
                for s in [d.left, d.right] {
                    if !(s.rho > 0.0 && s.p > 0.0) {
                        return Err(Error::invalid("riemann states must have positive density and pressure"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn initial(&self, x: f64) -> State {
        self.initial_primitive(x).to_conserved()
    }

    pub fn initial_primitive(&self, x: f64) -> Primitive {
        if let Some(d) = self.riemann_data() {
            return if x < d.x0 { d.left } else { d.right };
        }
        match *self {
            Problem::DensityWave { amplitude } => Primitive::new(1.0 + amplitude * (2.0 * PI * x).sin(), 0.1, 10.0),
            Problem::ShuOsher => {
                if x < -4.0 {
                    SHU_OSHER_LEFT
                } else {
                    Primitive::new(1.0 + 0.2 * (5.0 * x).sin(), 0.0, 1.0)
                }
            }
            _ => {
                let rho = 1.0 + 0.5 * (0.1 + PI * x).sin();
                Primitive::new(rho, 0.5 * (0.2 + PI * x).sin(), rho.powf(GAMMA))
            }
        }
    }

    /// Exterior states at the left and right ends for ghost boundaries.
    pub fn ghost_states(&self) -> Option<[State; 2]> {
        if self.boundary() == BoundaryMode::Periodic {
            return None;
        }
        let (a, b) = self.domain();
        Some([self.initial(a), self.initial(b)])
    }

    /// Exact solution where one is known.
    pub fn exact(&self, x: f64, t: f64) -> Option<Result<State>> {
        if let Some(d) = self.riemann_data() {
            if t <= 0.0 {
                return Some(Ok(self.initial(x)));
            }
            return Some(exact_riemann(&d.left, &d.right, (x - d.x0) / t).map(|p| p.to_conserved()));
        }
        match *self {
            Problem::DensityWave { .. } => Some(Ok(self.initial(x - 0.1 * t))),
            _ => None,
        }
    }
}
