//! The full semi-discretization: interface coupling, volume terms, artificial
//! viscosity, and the entropy bookkeeping of one right-hand-side evaluation.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::basis::Variant;
use crate::dg::{apply, compute_entropy_projection, Discretization, SolutionField};
use crate::error::{Error, Result};
use crate::euler::{self, EntropyVars, State};
use crate::flux::{numerical_flux, FluxKind};
use crate::flux_diff::{flux_diff_volume, VolumeFlux};
use crate::mesh::BoundaryMode;
use crate::viscosity::{self as visc, ViscosityMode, ViscousMatrix, DEFAULT_DELTA_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Standard weak form with a collocated volume flux.
    WeakDg,
    /// Flux differencing with a two-point volume flux (Lobatto nodes only).
    FluxDifferencing(VolumeFlux),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// Interface fluxes see `u(Pi_N v(u_h))`.
    EntropyProjection,
    /// Interface fluxes see the traces of `u_h`.
    Direct,
}

impl TraceMode {
    pub fn name(self) -> &'static str {
        match self {
            TraceMode::EntropyProjection => "entropy_projection",
            TraceMode::Direct => "direct",
        }
    }
}

impl fmt::Display for TraceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TraceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy_projection" => Ok(TraceMode::EntropyProjection),
            "direct" => Ok(TraceMode::Direct),
            _ => Err(Error::invalid(format!("unknown trace mode '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    pub form: Form,
    pub interface_flux: FluxKind,
    pub viscosity: ViscosityMode,
    pub trace_mode: TraceMode,
    pub delta_tol: f64,
    pub viscous_matrix: ViscousMatrix,
}

impl SchemeOptions {
    /// Weak-form DG with elementwise entropy correction viscosity.
    pub fn artificial_viscosity(interface_flux: FluxKind) -> Self {
        Self {
            form: Form::WeakDg,
            interface_flux,
            viscosity: ViscosityMode::Elementwise,
            trace_mode: TraceMode::EntropyProjection,
            delta_tol: DEFAULT_DELTA_TOL,
            viscous_matrix: ViscousMatrix::ElementAverage,
        }
    }

    /// Plain weak-form DG with direct traces.
    pub fn standard_dg(interface_flux: FluxKind) -> Self {
        Self {
            form: Form::WeakDg,
            interface_flux,
            viscosity: ViscosityMode::None,
            trace_mode: TraceMode::Direct,
            delta_tol: DEFAULT_DELTA_TOL,
            viscous_matrix: ViscousMatrix::ElementAverage,
        }
    }

    /// Flux differencing with the entropy conservative volume flux.
    pub fn flux_differencing(interface_flux: FluxKind) -> Self {
        Self {
            form: Form::FluxDifferencing(VolumeFlux::EcRanocha),
            interface_flux,
            viscosity: ViscosityMode::None,
            trace_mode: TraceMode::EntropyProjection,
            delta_tol: DEFAULT_DELTA_TOL,
            viscous_matrix: ViscousMatrix::ElementAverage,
        }
    }
}

/// Per-element viscosity data from one RHS evaluation.
#[derive(Debug, Clone, Default)]
pub struct ViscosityField {
    /// Volume entropy residual with entropy-projected traces.
    pub delta: Vec<f64>,
    /// Volume entropy residual with the traces of `u_h`.
    pub delta_second: Vec<f64>,
    /// Dissipation per unit coefficient, `sum (K Theta, Theta)` (or the
    /// local-correction analogue).
    pub dissipation: Vec<f64>,
    /// Coefficient at each volume quadrature point, `n_quad` per element.
    pub eps: Vec<f64>,
    /// Dissipation density `Theta^T K Theta` at each volume quadrature point
    /// (BR-1 modes only, otherwise zero).
    pub density: Vec<f64>,
    pub n_quad: usize,
    /// Entropy removed in each element, `(eps K Theta, Theta)` or the local
    /// correction analogue.
    pub viscous_dissipation: Vec<f64>,
}

impl ViscosityField {
    pub fn eps_at(&self, k: usize, q: usize) -> f64 {
        self.eps.get(k * self.n_quad + q).copied().unwrap_or(0.0)
    }

    pub fn element_eps(&self, k: usize) -> &[f64] {
        &self.eps[k * self.n_quad..(k + 1) * self.n_quad]
    }

    pub fn element_density(&self, k: usize) -> &[f64] {
        &self.density[k * self.n_quad..(k + 1) * self.n_quad]
    }

    pub fn max_eps(&self) -> f64 {
        self.eps.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Everything computed during one RHS evaluation.
#[derive(Debug, Clone)]
pub struct RhsReport {
    pub rhs: SolutionField,
    pub viscosity: ViscosityField,
    /// `sum_k (du/dt, v_h)_k`, the rate of change of the total entropy.
    pub entropy_rate: f64,
    /// `sum_k [(du/dt, v_h)_k + <v_h^T f*_n - psi(u~) n, 1>_k]`; nonpositive
    /// up to regularization slack for an entropy stable scheme.
    pub cell_entropy_rate: f64,
    /// Entropy flux through ghost boundaries, `sum (v_ext^T f*_n - psi_ext n)`.
    pub boundary_entropy_flux: f64,
    /// `1 + sum_k (|S(u_h)|, 1)_k`, a magnitude for relative tolerances.
    pub entropy_scale: f64,
    /// Entropy production `(v_R - v_L)^T f* - (psi_R - psi_L)` at each interior face.
    pub face_entropy_production: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Semidiscretization {
    pub disc: Discretization,
    pub options: SchemeOptions,
    /// Frozen exterior states at the left and right domain ends.
    pub ghost: Option<[State; 2]>,
}

impl Semidiscretization {
    pub fn new(disc: Discretization, options: SchemeOptions, ghost: Option<[State; 2]>) -> Result<Self> {
        if disc.mesh.boundary == BoundaryMode::DirichletGhost && ghost.is_none() {
            return Err(Error::invalid("ghost boundaries need exterior states"));
        }
        if let Form::FluxDifferencing(_) = options.form {
            if disc.ops.variant != Variant::NodalLobatto {
                return Err(Error::Unsupported(
                    "flux differencing is implemented for the nodal Lobatto variant only".into(),
                ));
            }
            if options.viscosity != ViscosityMode::None {
                return Err(Error::Unsupported(
                    "artificial viscosity is defined for the weak form only".into(),
                ));
            }
        }
        if !(options.delta_tol >= 0.0) {
            return Err(Error::invalid("delta_tol must be nonnegative"));
        }
        Ok(Self { disc, options, ghost })
    }

    pub fn rhs(&self, u: &SolutionField, out: &mut SolutionField) -> Result<()> {
        let report = self.evaluate(u)?;
        out.data.copy_from_slice(&report.rhs.data);
        Ok(())
    }

    /// Evaluate the right-hand side and all entropy diagnostics.
    pub fn evaluate(&self, u: &SolutionField) -> Result<RhsReport> {
        let disc = &self.disc;
        let ops = &disc.ops;
        let mesh = &disc.mesh;
        let ne = disc.n_elements();
        let jac = mesh.jacobian();
        let last = disc.n_basis() - 1;

        let proj = compute_entropy_projection(disc, u)?;
        let uq: Vec<Vec<State>> = (0..ne).map(|k| disc.quad_states(u, k)).collect();
        let direct: Vec<[State; 2]> = (0..ne).map(|k| disc.face_states(u, k)).collect();
        let traces: &[[State; 2]] = match self.options.trace_mode {
            TraceMode::EntropyProjection => &proj.face_states,
            TraceMode::Direct => {
                for (k, t) in direct.iter().enumerate() {
                    euler::admissible_internal_energy(&t[0]).map_err(|e| e.at(k, 0))?;
                    euler::admissible_internal_energy(&t[1]).map_err(|e| e.at(k, last))?;
                }
                &direct
            }
        };
        // entropy variables consistent with the traces used by the interface flux
        let trace_v: Vec<[EntropyVars; 2]> = match self.options.trace_mode {
            TraceMode::EntropyProjection => proj.face_v.clone(),
            TraceMode::Direct => traces
                .iter()
                .map(|t| Ok([euler::entropy_vars(&t[0])?, euler::entropy_vars(&t[1])?]))
                .collect::<Result<_>>()?,
        };

        // physical-orientation fluxes at faces 0..=ne; face f is the left end of element f
        let periodic = mesh.boundary == BoundaryMode::Periodic;
        let kind = self.options.interface_flux;
        let mut face_flux = Vec::with_capacity(ne + 1);
        let mut face_entropy_production = Vec::with_capacity(ne);
        for f in 0..=ne {
            if periodic && f == ne {
                face_flux.push(face_flux[0]);
                break;
            }
            let (ul, ur) = match (f, periodic) {
                (0, true) => (traces[ne - 1][1], traces[0][0]),
                (0, false) => (self.ghost.unwrap()[0], traces[0][0]),
                (f, false) if f == ne => (traces[ne - 1][1], self.ghost.unwrap()[1]),
                (f, _) => (traces[f - 1][1], traces[f][0]),
            };
            let flux = numerical_flux(kind, &ul, &ur)?;
            let interior = periodic || (f > 0 && f < ne);
            if interior {
                let (vl, vr) = (trace_v[(f + ne - 1) % ne][1], trace_v[f % ne][0]);
                let prod = (vr - vl).dot(&flux) - (euler::entropy_potential(&ur) - euler::entropy_potential(&ul));
                face_entropy_production.push(prod);
            }
            face_flux.push(flux);
        }

        let mut rhs = disc.zeros();
        let mut fluxes_q: Vec<Vec<State>> = Vec::with_capacity(ne);
        for k in 0..ne {
            let fq = uq[k]
                .iter()
                .enumerate()
                .map(|(q, s)| euler::flux(s).map_err(|e| e.at(k, q)))
                .collect::<Result<Vec<_>>>()?;
            let (fl, fr) = (face_flux[k], face_flux[k + 1]);
            let du: Vec<State> = match self.options.form {
                Form::WeakDg => apply(&ops.volume, &fq)
                    .iter()
                    .enumerate()
                    .map(|(j, v)| (v + ops.lift[(j, 0)] * fl - ops.lift[(j, 1)] * fr) / jac)
                    .collect(),
                Form::FluxDifferencing(vf) => {
                    let mut vol = flux_diff_volume(ops, &uq[k], vf).map_err(|e| e.at(k, 0))?;
                    vol[last] -= fr - fq[last];
                    vol[0] += fl - fq[0];
                    vol.iter()
                        .zip(&ops.rule.weights)
                        .map(|(v, w)| v / (jac * w))
                        .collect()
                }
            };
            rhs.set_element(k, &du);
            fluxes_q.push(fq);
        }

        let viscosity = self.add_viscosity(u, &proj, &uq, &fluxes_q, traces, &direct, &mut rhs)?;

        // entropy bookkeeping
        let mut entropy_rate = 0.0;
        let mut cell_entropy_rate = 0.0;
        let mut entropy_scale = 1.0;
        for k in 0..ne {
            let vc = proj.v_coeffs.element(k);
            let m_du = apply(&ops.mass, &rhs.element(k));
            let dsdt = jac * m_du.iter().zip(&vc).map(|(a, b)| a.dot(b)).sum::<f64>();
            let [vl, vr] = trace_v[k];
            let surface = vr.dot(&face_flux[k + 1]) - euler::entropy_potential(&traces[k][1])
                - vl.dot(&face_flux[k])
                + euler::entropy_potential(&traces[k][0]);
            entropy_rate += dsdt;
            cell_entropy_rate += dsdt + surface;
            for (q, s) in uq[k].iter().enumerate() {
                entropy_scale += jac * ops.rule.weights[q] * euler::entropy(s)?.abs();
            }
        }
        let mut boundary_entropy_flux = 0.0;
        if let (false, Some([gl, gr])) = (periodic, self.ghost) {
            let (vl, vr) = (euler::entropy_vars(&gl)?, euler::entropy_vars(&gr)?);
            // outward normals -1 at the left end, +1 at the right end
            boundary_entropy_flux += -vl.dot(&face_flux[0]) + euler::entropy_potential(&gl);
            boundary_entropy_flux += vr.dot(&face_flux[ne]) - euler::entropy_potential(&gr);
        }

        Ok(RhsReport {
            rhs,
            viscosity,
            entropy_rate,
            cell_entropy_rate,
            boundary_entropy_flux,
            entropy_scale,
            face_entropy_production,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn add_viscosity(
        &self,
        _u: &SolutionField,
        proj: &crate::dg::EntropyProjection,
        uq: &[Vec<State>],
        fluxes_q: &[Vec<State>],
        traces: &[[State; 2]],
        direct: &[[State; 2]],
        rhs: &mut SolutionField,
    ) -> Result<ViscosityField> {
        let disc = &self.disc;
        let ops = &disc.ops;
        let ne = disc.n_elements();
        let nq = ops.n_quad();
        let jac = disc.mesh.jacobian();
        let tol = self.options.delta_tol;
        let mode = self.options.viscosity;
        let mut field = ViscosityField {
            delta: vec![0.0; ne],
            delta_second: vec![0.0; ne],
            dissipation: vec![0.0; ne],
            eps: vec![0.0; ne * nq],
            density: vec![0.0; ne * nq],
            n_quad: nq,
            viscous_dissipation: vec![0.0; ne],
        };
        if let Form::FluxDifferencing(_) = self.options.form {
            return Ok(field);
        }

        let v_coeffs: Vec<Vec<EntropyVars>> = (0..ne).map(|k| proj.v_coeffs.element(k)).collect();
        for k in 0..ne {
            let psi = |t: &[State; 2]| [euler::entropy_potential(&t[0]), euler::entropy_potential(&t[1])];
            field.delta[k] = visc::volume_entropy_residual(ops, &fluxes_q[k], &v_coeffs[k], psi(&traces[k]));
            field.delta_second[k] =
                visc::volume_entropy_residual(ops, &fluxes_q[k], &v_coeffs[k], psi(&direct[k]));
        }
        if mode == ViscosityMode::None {
            return Ok(field);
        }

        // K = du/dv at the element average
        let k_mats: Vec<Matrix3<f64>> = (0..ne)
            .map(|k| {
                let avg = uq[k]
                    .iter()
                    .zip(&ops.rule.weights)
                    .fold(State::zeros(), |a, (s, w)| a + *w * s)
                    / 2.0;
                euler::dudv(&avg).map_err(|e| e.at(k, 0))
            })
            .collect::<Result<_>>()?;

        match mode {
            ViscosityMode::MvCorrection | ViscosityMode::DerivCorrection => {
                for k in 0..ne {
                    let corr = if mode == ViscosityMode::MvCorrection {
                        visc::local_correction_mv(ops, jac, &v_coeffs[k], &k_mats[k], field.delta[k], tol)
                    } else {
                        visc::local_correction_deriv(ops, jac, &v_coeffs[k], &k_mats[k], field.delta[k], tol)
                    };
                    field.dissipation[k] = corr.dissipation;
                    field.viscous_dissipation[k] = corr.eps * corr.dissipation;
                    field.eps[k * nq..(k + 1) * nq].fill(corr.eps);
                    if corr.eps != 0.0 {
                        let mut du = rhs.element(k);
                        for (d, g) in du.iter_mut().zip(&corr.rhs) {
                            *d += g;
                        }
                        rhs.set_element(k, &du);
                    }
                }
                return Ok(field);
            }
            _ => {}
        }

        // BR-1 gradient; jumps vanish at ghost boundaries
        let mesh = &disc.mesh;
        let thetas: Vec<Vec<EntropyVars>> = (0..ne)
            .map(|k| {
                let [vl, vr] = proj.face_v[k];
                let jl = mesh
                    .left_neighbor(k)
                    .map_or(EntropyVars::zeros(), |n| proj.face_v[n][1] - vl);
                let jr = mesh
                    .right_neighbor(k)
                    .map_or(EntropyVars::zeros(), |n| proj.face_v[n][0] - vr);
                visc::br1_gradient(ops, jac, &v_coeffs[k], [jl, jr])
            })
            .collect();

        let mut sigmas: Vec<Vec<State>> = Vec::with_capacity(ne);
        let mut any = false;
        for k in 0..ne {
            let kq: Vec<Matrix3<f64>> = match self.options.viscous_matrix {
                ViscousMatrix::ElementAverage => vec![k_mats[k]; nq],
                ViscousMatrix::Pointwise => uq[k]
                    .iter()
                    .enumerate()
                    .map(|(q, s)| euler::dudv(s).map_err(|e| e.at(k, q)))
                    .collect::<Result<_>>()?,
            };
            let a = visc::dissipation_density(ops, &thetas[k], &kq);
            let d = visc::integrate_density(ops, jac, &a);
            field.dissipation[k] = d;
            field.density[k * nq..(k + 1) * nq].copy_from_slice(&a);
            let eps: Vec<f64> = match mode {
                ViscosityMode::Elementwise => vec![visc::viscosity_elementwise(field.delta[k], d, tol); nq],
                ViscosityMode::TwoInequalities => {
                    let e1 = visc::viscosity_elementwise(field.delta[k], d, tol);
                    let e2 = visc::viscosity_elementwise(field.delta_second[k], d, tol);
                    vec![e1.max(e2); nq]
                }
                ViscosityMode::Subcell => visc::viscosity_subcell(ops, jac, field.delta[k], &a, tol),
                _ => unreachable!(),
            };
            if d > 0.0 && d < 1e-10 * field.delta[k].abs() {
                log::warn!("element {k}: BR-1 dissipation {d:.3e} is tiny relative to the entropy residual");
            }
            field.viscous_dissipation[k] =
                jac * eps.iter().zip(&a).zip(&ops.rule.weights).map(|((e, x), w)| w * e * x).sum::<f64>();
            any |= eps.iter().any(|&e| e != 0.0);
            field.eps[k * nq..(k + 1) * nq].copy_from_slice(&eps);
            sigmas.push(visc::viscous_flux(ops, &eps, &kq, &thetas[k]));
        }
        if !any {
            return Ok(field);
        }

        let sigma_faces: Vec<Vec<State>> = sigmas.iter().map(|s| apply(&ops.face_values, s)).collect();
        for k in 0..ne {
            let avg_l = mesh
                .left_neighbor(k)
                .map_or(State::zeros(), |n| 0.5 * (sigma_faces[n][1] + sigma_faces[k][0]));
            let avg_r = mesh
                .right_neighbor(k)
                .map_or(State::zeros(), |n| 0.5 * (sigma_faces[n][0] + sigma_faces[k][1]));
            let g = visc::viscous_divergence(ops, jac, &sigmas[k], [avg_l, avg_r]);
            let mut du = rhs.element(k);
            for (d, gj) in du.iter_mut().zip(&g) {
                *d += gj;
            }
            rhs.set_element(k, &du);
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementOperators;
    use crate::euler::Primitive;
    use crate::mesh::make_mesh;

    fn wave(a: f64) -> impl Fn(f64) -> State {
        move |x| Primitive::new(1.0 + a * (2.0 * std::f64::consts::PI * x).sin(), 0.1, 10.0).to_conserved()
    }

    fn scheme(modal: bool, n: usize, k: usize, options: SchemeOptions) -> Semidiscretization {
        let ops = if modal {
            ElementOperators::modal(n).unwrap()
        } else {
            ElementOperators::nodal(n).unwrap()
        };
        let mesh = make_mesh(0.0, 1.0, k, BoundaryMode::Periodic).unwrap();
        Semidiscretization::new(Discretization::new(ops, mesh), options, None).unwrap()
    }

    fn all_options() -> Vec<SchemeOptions> {
        let mut v = Vec::new();
        for kind in FluxKind::ALL {
            v.push(SchemeOptions::standard_dg(kind));
            v.push(SchemeOptions::flux_differencing(kind));
            for mode in ViscosityMode::ALL {
                v.push(SchemeOptions {
                    viscosity: mode,
                    ..SchemeOptions::artificial_viscosity(kind)
                });
            }
        }
        v
    }

    #[test]
    fn free_stream_preservation() {
        let c = Primitive::new(1.3, 0.4, 2.0).to_conserved();
        for modal in [false, true] {
            for k in [1, 5] {
                for opts in all_options() {
                    if modal && matches!(opts.form, Form::FluxDifferencing(_)) {
                        continue;
                    }
                    let s = scheme(modal, 3, k, opts);
                    let u = s.disc.project(|_| c).unwrap();
                    let r = s.evaluate(&u).unwrap();
                    assert!(r.rhs.data.iter().all(|x| x.abs() < 1e-12), "{opts:?}");
                }
            }
        }
    }

    #[test]
    fn global_conservation() {
        for modal in [false, true] {
            for opts in all_options() {
                if modal && matches!(opts.form, Form::FluxDifferencing(_)) {
                    continue;
                }
                let s = scheme(modal, 3, 6, opts);
                let u = s.disc.project(wave(0.9)).unwrap();
                let r = s.evaluate(&u).unwrap();
                let total = s.disc.integrate(&r.rhs);
                assert!(total.amax() < 1e-12, "{opts:?}: {total}");
            }
        }
    }

    #[test]
    fn modal_flux_differencing_is_unsupported() {
        let ops = ElementOperators::modal(3).unwrap();
        let mesh = make_mesh(0.0, 1.0, 4, BoundaryMode::Periodic).unwrap();
        let r = Semidiscretization::new(
            Discretization::new(ops, mesh),
            SchemeOptions::flux_differencing(FluxKind::LlfDavis),
            None,
        );
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn ghost_mesh_requires_states() {
        let ops = ElementOperators::nodal(2).unwrap();
        let mesh = make_mesh(0.0, 1.0, 4, BoundaryMode::DirichletGhost).unwrap();
        let r = Semidiscretization::new(
            Discretization::new(ops, mesh),
            SchemeOptions::standard_dg(FluxKind::LlfDavis),
            None,
        );
        assert!(r.is_err());
    }
}
