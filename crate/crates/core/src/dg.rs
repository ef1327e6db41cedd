//! Solution storage, initialization, and the entropy projection.

use nalgebra::DMatrix;

use crate::basis::{gauss_legendre, ElementOperators};
use crate::error::{Error, Result};
use crate::euler::{self, EntropyVars, State};
use crate::mesh::Mesh1D;

/// Conservative variables for every element, stored as basis coefficients.
///
/// For the nodal variant the coefficients are nodal values; for the modal
/// variant they are orthonormal Legendre coefficients. The flat layout is
/// `((k * n_basis + j) * 3 + c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub n_elements: usize,
    pub n_basis: usize,
    pub data: Vec<f64>,
}

impl SolutionField {
    pub fn zeros(n_elements: usize, n_basis: usize) -> Self {
        Self {
            n_elements,
            n_basis,
            data: vec![0.0; n_elements * n_basis * 3],
        }
    }

    pub fn from_data(n_elements: usize, n_basis: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_elements * n_basis * 3 {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                n_elements * n_basis * 3,
                data.len()
            )));
        }
        Ok(Self {
            n_elements,
            n_basis,
            data,
        })
    }

    #[inline]
    pub fn state(&self, k: usize, j: usize) -> State {
        let o = (k * self.n_basis + j) * 3;
        State::new(self.data[o], self.data[o + 1], self.data[o + 2])
    }

    #[inline]
    pub fn set_state(&mut self, k: usize, j: usize, s: &State) {
        let o = (k * self.n_basis + j) * 3;
        self.data[o..o + 3].copy_from_slice(s.as_slice());
    }

    pub fn element(&self, k: usize) -> Vec<State> {
        (0..self.n_basis).map(|j| self.state(k, j)).collect()
    }

    pub fn set_element(&mut self, k: usize, states: &[State]) {
        for (j, s) in states.iter().enumerate() {
            self.set_state(k, j, s);
        }
    }
}

/// `out[i] = sum_j m[i, j] x[j]` for vector-valued `x`.
pub(crate) fn apply(m: &DMatrix<f64>, x: &[State]) -> Vec<State> {
    debug_assert_eq!(m.ncols(), x.len());
    (0..m.nrows())
        .map(|i| {
            x.iter()
                .enumerate()
                .fold(State::zeros(), |acc, (j, xj)| acc + m[(i, j)] * xj)
        })
        .collect()
}

/// Element operators bound to a mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub ops: ElementOperators,
    pub mesh: Mesh1D,
}

impl Discretization {
    pub fn new(ops: ElementOperators, mesh: Mesh1D) -> Self {
        Self { ops, mesh }
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_elements
    }

    pub fn n_basis(&self) -> usize {
        self.ops.n_basis()
    }

    pub fn zeros(&self) -> SolutionField {
        SolutionField::zeros(self.n_elements(), self.n_basis())
    }

    pub fn quad_x(&self, k: usize, q: usize) -> f64 {
        self.mesh.map(k, self.ops.rule.points[q])
    }

    /// Solution values at the volume quadrature points of element `k`.
    pub fn quad_states(&self, u: &SolutionField, k: usize) -> Vec<State> {
        let coeffs = u.element(k);
        if self.ops.collocated {
            coeffs
        } else {
            apply(&self.ops.vandermonde, &coeffs)
        }
    }

    /// Values of the polynomial solution at the left and right element ends.
    pub fn face_states(&self, u: &SolutionField, k: usize) -> [State; 2] {
        if self.ops.collocated {
            [u.state(k, 0), u.state(k, self.n_basis() - 1)]
        } else {
            let f = apply(&self.ops.face_values, &u.element(k));
            [f[0], f[1]]
        }
    }

    /// Evaluate the polynomial on element `k` at reference coordinate `r`.
    pub fn eval(&self, u: &SolutionField, k: usize, r: f64) -> State {
        let phi = self.ops.basis.eval(r);
        (0..self.n_basis()).fold(State::zeros(), |acc, j| acc + phi[j] * u.state(k, j))
    }

    /// L2 projection of `f` with an over-integrated Gauss rule and exact mass matrix.
    pub fn project(&self, f: impl Fn(f64) -> State) -> Result<SolutionField> {
        let n = self.n_basis();
        let rule = gauss_legendre(n + 4)?;
        let mut vdm = DMatrix::zeros(rule.len(), n);
        for (g, &r) in rule.points.iter().enumerate() {
            for (j, phi) in self.ops.basis.eval(r).into_iter().enumerate() {
                vdm[(g, j)] = phi;
            }
        }
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(rule.weights.clone()));
        let mass = vdm.transpose() * &w * &vdm;
        let solve = mass
            .try_inverse()
            .ok_or_else(|| Error::invalid("singular mass matrix"))?
            * vdm.transpose()
            * &w;
        let mut u = self.zeros();
        for k in 0..self.n_elements() {
            let samples: Vec<State> = rule.points.iter().map(|&r| f(self.mesh.map(k, r))).collect();
            u.set_element(k, &apply(&solve, &samples));
        }
        Ok(u)
    }

    /// Interpolation at the volume quadrature points, followed by the
    /// quadrature-based projection (plain nodal interpolation for the nodal variant).
    pub fn interpolate(&self, f: impl Fn(f64) -> State) -> SolutionField {
        let mut u = self.zeros();
        for k in 0..self.n_elements() {
            let samples: Vec<State> = (0..self.ops.n_quad()).map(|q| f(self.quad_x(k, q))).collect();
            let coeffs = if self.ops.collocated {
                samples
            } else {
                apply(&self.ops.to_coeffs, &samples)
            };
            u.set_element(k, &coeffs);
        }
        u
    }

    /// Quadrature inner product `sum_k (a, b)_{D^k}` summed over components.
    pub fn inner(&self, a: &SolutionField, b: &SolutionField) -> f64 {
        let j = self.mesh.jacobian();
        (0..self.n_elements())
            .map(|k| {
                let (ea, eb) = (a.element(k), b.element(k));
                let ma = apply(&self.ops.mass, &ea);
                j * ma.iter().zip(&eb).map(|(x, y)| x.dot(y)).sum::<f64>()
            })
            .sum()
    }

    /// Integral of the solution over the domain, per conserved variable.
    pub fn integrate(&self, u: &SolutionField) -> State {
        let j = self.mesh.jacobian();
        let w = &self.ops.rule.weights;
        (0..self.n_elements()).fold(State::zeros(), |acc, k| {
            self.quad_states(u, k)
                .iter()
                .zip(w)
                .fold(acc, |a, (s, &wq)| a + j * wq * s)
        })
    }

    /// `sum_k (S(u_h), 1)_{D^k}` with the volume quadrature.
    pub fn total_entropy(&self, u: &SolutionField) -> Result<f64> {
        let j = self.mesh.jacobian();
        let mut total = 0.0;
        for k in 0..self.n_elements() {
            for (q, s) in self.quad_states(u, k).iter().enumerate() {
                total += j * self.ops.rule.weights[q] * euler::entropy(s).map_err(|e| e.at(k, q))?;
            }
        }
        Ok(total)
    }

    /// `sum_k (rhs, Pi_N v(u_h))_{D^k}`, the semi-discrete rate of change of the total entropy.
    pub fn entropy_rhs_test(&self, u: &SolutionField, rhs: &SolutionField) -> Result<f64> {
        let proj = compute_entropy_projection(self, u)?;
        Ok(self.inner(rhs, &proj.v_coeffs))
    }

    /// Check that the solution is admissible at every quadrature point.
    pub fn check_admissible(&self, u: &SolutionField) -> Result<()> {
        for k in 0..self.n_elements() {
            for (q, s) in self.quad_states(u, k).iter().enumerate() {
                euler::admissible_internal_energy(s).map_err(|e| e.at(k, q))?;
            }
        }
        Ok(())
    }
}

/// Projected entropy variables and the resulting interface states.
#[derive(Debug, Clone)]
pub struct EntropyProjection {
    /// Coefficients of `v_h = Pi_N v(u_h)` per element.
    pub v_coeffs: SolutionField,
    /// `v_h` at the left and right end of every element.
    pub face_v: Vec<[EntropyVars; 2]>,
    /// Entropy-projected conservative states `u(v_h)` at the element ends.
    pub face_states: Vec<[State; 2]>,
}

pub fn compute_entropy_projection(disc: &Discretization, u: &SolutionField) -> Result<EntropyProjection> {
    let ops = &disc.ops;
    let mut v_coeffs = disc.zeros();
    let mut face_v = Vec::with_capacity(disc.n_elements());
    let mut face_states = Vec::with_capacity(disc.n_elements());
    for k in 0..disc.n_elements() {
        let uq = disc.quad_states(u, k);
        let vq = uq
            .iter()
            .enumerate()
            .map(|(q, s)| euler::entropy_vars(s).map_err(|e| e.at(k, q)))
            .collect::<Result<Vec<_>>>()?;
        if ops.collocated {
            // projection is the identity on nodal values and u(v(u)) = u
            let last = vq.len() - 1;
            face_v.push([vq[0], vq[last]]);
            face_states.push([uq[0], uq[last]]);
            v_coeffs.set_element(k, &vq);
        } else {
            let vc = apply(&ops.to_coeffs, &vq);
            let vf = apply(&ops.face_values, &vc);
            let last = disc.n_basis() - 1;
            let ul = euler::cons_vars(&vf[0]).map_err(|e| e.at(k, 0))?;
            let ur = euler::cons_vars(&vf[1]).map_err(|e| e.at(k, last))?;
            face_v.push([vf[0], vf[1]]);
            face_states.push([ul, ur]);
            v_coeffs.set_element(k, &vc);
        }
    }
    Ok(EntropyProjection {
        v_coeffs,
        face_v,
        face_states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementOperators;
    use crate::euler::Primitive;
    use crate::mesh::{make_mesh, BoundaryMode};

    fn wave(x: f64) -> State {
        Primitive::new(1.0 + 0.98 * (2.0 * std::f64::consts::PI * x).sin(), 0.1, 10.0).to_conserved()
    }

    fn disc(modal: bool, n: usize, k: usize) -> Discretization {
        let ops = if modal {
            ElementOperators::modal(n).unwrap()
        } else {
            ElementOperators::nodal(n).unwrap()
        };
        Discretization::new(ops, make_mesh(0.0, 1.0, k, BoundaryMode::Periodic).unwrap())
    }

    #[test]
    fn constant_field_projection_is_exact() {
        let c = Primitive::new(1.2, 0.3, 2.0).to_conserved();
        for modal in [false, true] {
            let d = disc(modal, 3, 4);
            let u = d.project(|_| c).unwrap();
            let p = compute_entropy_projection(&d, &u).unwrap();
            for k in 0..4 {
                for s in p.face_states[k] {
                    assert!((s - c).amax() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn nodal_face_states_are_endpoint_values() {
        let d = disc(false, 4, 5);
        let u = d.project(wave).unwrap();
        let p = compute_entropy_projection(&d, &u).unwrap();
        for k in 0..5 {
            assert_eq!(p.face_states[k], d.face_states(&u, k));
        }
    }

    #[test]
    fn modal_projection_gap_shrinks_under_refinement() {
        let n = 3;
        let gap = |k: usize| {
            let d = disc(true, n, k);
            let u = d.project(wave).unwrap();
            let p = compute_entropy_projection(&d, &u).unwrap();
            (0..k)
                .flat_map(|e| {
                    let direct = d.face_states(&u, e);
                    let projected = p.face_states[e];
                    [(direct[0] - projected[0]).amax(), (direct[1] - projected[1]).amax()]
                })
                .fold(0.0f64, f64::max)
        };
        let hs: Vec<f64> = [256usize, 512, 1024].iter().map(|&k| 1.0 / k as f64).collect();
        let es: Vec<f64> = [256usize, 512, 1024].iter().map(|&k| gap(k)).collect();
        assert!(es[0] > 0.0);
        let slope = crate::diagnostics::least_squares_slope(&hs, &es);
        // the asymptotic rate N+1 is approached from below at this amplitude
        assert!(slope >= (n + 1) as f64 - 0.1, "slope {slope}, errors {es:?}");
    }

    #[test]
    fn projection_reproduces_polynomials() {
        for modal in [false, true] {
            let d = disc(modal, 3, 3);
            let poly = |x: f64| State::new(1.0 + x * x * x, x, 2.0 - x * x);
            let u = d.project(poly).unwrap();
            for k in 0..3 {
                for r in [-1.0, -0.3, 0.5, 1.0] {
                    let x = d.mesh.map(k, r);
                    assert!((d.eval(&u, k, r) - poly(x)).amax() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn integrate_matches_mass_inner_product() {
        let d = disc(true, 2, 3);
        let u = d.project(wave).unwrap();
        let one = d.project(|_| State::new(1.0, 0.0, 0.0)).unwrap();
        assert!((d.inner(&u, &one) - d.integrate(&u)[0]).abs() < 1e-14);
        assert!((d.integrate(&u)[0] - 1.0).abs() < 1e-12);
    }
}
