//! Convergence of the volume entropy residual and the viscosity coefficient for
//! projected smooth data.

use std::fmt;
use std::str::FromStr;

use crate::basis::{build_operators, gauss_legendre, gauss_radau, ElementOperators, Variant};
use crate::dg::Discretization;
use crate::diagnostics::{ConvergenceRow, ConvergenceTable};
use crate::error::{Error, Result};
use crate::euler::State;
use crate::flux::FluxKind;
use crate::mesh::{make_mesh, BoundaryMode};
use crate::scheme::{SchemeOptions, Semidiscretization};

/// Volume quadrature used for the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualQuadrature {
    /// Collocated `N+1` point Lobatto rule of the nodal variant.
    Lobatto,
    /// Modal basis with the `N+1` point left Radau rule (exact to degree `2N`).
    Radau,
    /// Modal basis with an `N+1+extra` point Gauss rule.
    Gauss { extra: usize },
}

impl ResidualQuadrature {
    pub fn operators(self, degree: usize) -> Result<ElementOperators> {
        match self {
            ResidualQuadrature::Lobatto => ElementOperators::nodal(degree),
            ResidualQuadrature::Radau => build_operators(degree, Variant::ModalGauss, gauss_radau(degree + 1)?),
            ResidualQuadrature::Gauss { extra } => {
                build_operators(degree, Variant::ModalGauss, gauss_legendre(degree + 1 + extra)?)
            }
        }
    }
}

impl fmt::Display for ResidualQuadrature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResidualQuadrature::Lobatto => write!(f, "lobatto"),
            ResidualQuadrature::Radau => write!(f, "radau"),
            ResidualQuadrature::Gauss { extra } => write!(f, "gauss+{extra}"),
        }
    }
}

impl FromStr for ResidualQuadrature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lobatto" => return Ok(ResidualQuadrature::Lobatto),
            "radau" => return Ok(ResidualQuadrature::Radau),
            _ => {}
        }
        s.strip_prefix("gauss+")
            .and_then(|e| e.parse().ok())
            .map(|extra| ResidualQuadrature::Gauss { extra })
            .ok_or_else(|| Error::invalid(format!("unknown residual quadrature '{s}' (lobatto, radau or gauss+<extra>)")))
    }
}

#[derive(Debug, Clone)]
pub struct ResidualStudy {
    pub quadrature: ResidualQuadrature,
    /// `max_k |delta_k|` against `h`.
    pub delta: ConvergenceTable,
    /// `max eps` against `h`.
    pub eps: ConvergenceTable,
}

/// Project `field` on periodic meshes of `[a, b]` with each `K` in `ks` and
/// tabulate the largest residual and viscosity coefficient.
pub fn residual_convergence_study(
    degree: usize,
    ks: &[usize],
    quadrature: ResidualQuadrature,
    domain: (f64, f64),
    field: impl Fn(f64) -> State,
    options: Option<SchemeOptions>,
) -> Result<ResidualStudy> {
    if ks.is_empty() {
        return Err(Error::invalid("residual study needs at least one mesh"));
    }
    let options = options.unwrap_or_else(|| SchemeOptions::artificial_viscosity(FluxKind::LlfDavis));
    let ops = quadrature.operators(degree)?;
    let mut delta_rows = Vec::new();
    let mut eps_rows = Vec::new();
    for &k in ks {
        let mesh = make_mesh(domain.0, domain.1, k, BoundaryMode::Periodic)?;
        let h = mesh.h();
        let semi = Semidiscretization::new(Discretization::new(ops.clone(), mesh), options, None)?;
        let u = semi.disc.project(&field)?;
        let report = semi.evaluate(&u)?;
        let max_delta = report.viscosity.delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        delta_rows.push(ConvergenceRow {
            h,
            n_elements: k,
            error: max_delta,
        });
        eps_rows.push(ConvergenceRow {
            h,
            n_elements: k,
            error: report.viscosity.max_eps(),
        });
    }
    Ok(ResidualStudy {
        quadrature,
        delta: ConvergenceTable::new(degree, delta_rows),
        eps: ConvergenceTable::new(degree, eps_rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::Primitive;

    #[test]
    fn constant_field_has_no_residual() {
        let c = Primitive::new(1.2, 0.4, 2.0).to_conserved();
        for q in [ResidualQuadrature::Lobatto, ResidualQuadrature::Gauss { extra: 1 }] {
            let s = residual_convergence_study(2, &[4, 8], q, (-1.0, 1.0), |_| c, None).unwrap();
            assert!(s.delta.rows.iter().all(|r| r.error < 1e-13), "{q}: {:?}", s.delta.rows);
        }
    }

    #[test]
    fn quadrature_names_round_trip() {
        for q in [ResidualQuadrature::Lobatto, ResidualQuadrature::Radau, ResidualQuadrature::Gauss { extra: 3 }] {
            assert_eq!(q.to_string().parse::<ResidualQuadrature>().unwrap(), q);
        }
        assert!("gauss".parse::<ResidualQuadrature>().is_err());
    }

    #[test]
    fn empty_mesh_list() {
        assert!(residual_convergence_study(2, &[], ResidualQuadrature::Lobatto, (0.0, 1.0), |_| State::repeat(1.0), None).is_err());
    }
}
