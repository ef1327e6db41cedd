//! Null space of the global BR-1 gradient on periodic meshes.

use nalgebra::{DMatrix, DVector};

use crate::dg::Discretization;
use crate::error::{Error, Result};
use crate::euler::EntropyVars;
use crate::mesh::BoundaryMode;
use crate::viscosity::br1_gradient;

#[derive(Debug, Clone)]
pub struct NullspaceReport {
    /// Dimension including the constant mode.
    pub dimension: usize,
    /// Null modes orthogonal to constants, as scalar coefficient vectors
    /// (`K * (N+1)` entries) with unit L2 norm.
    pub modes: Vec<Vec<f64>>,
    /// L2 norm of the BR-1 gradient of each returned mode.
    pub gradient_norms: Vec<f64>,
    pub singular_values: Vec<f64>,
}

/// Global BR-1 gradient acting on scalar coefficient vectors.
pub fn br1_matrix(disc: &Discretization) -> Result<DMatrix<f64>> {
    if disc.mesh.boundary != BoundaryMode::Periodic {
        return Err(Error::invalid("gradient null space probe needs a periodic mesh"));
    }
    let (ne, nb) = (disc.n_elements(), disc.n_basis());
    let n = ne * nb;
    let jac = disc.mesh.jacobian();
    let ops = &disc.ops;
    let face = |v: &[f64], k: usize, side: usize| -> f64 { (0..nb).map(|j| ops.face_values[(side, j)] * v[k * nb + j]).sum() };
    let mut g = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for col in 0..n {
        e.fill(0.0);
        e[col] = 1.0;
        for k in 0..ne {
            let (kl, kr) = ((k + ne - 1) % ne, (k + 1) % ne);
            let jumps = [
                face(&e, kl, 1) - face(&e, k, 0),
                face(&e, kr, 0) - face(&e, k, 1),
            ];
            let v: Vec<EntropyVars> = (0..nb).map(|j| EntropyVars::repeat(e[k * nb + j])).collect();
            let theta = br1_gradient(ops, jac, &v, [EntropyVars::repeat(jumps[0]), EntropyVars::repeat(jumps[1])]);
            for j in 0..nb {
                g[(k * nb + j, col)] = theta[j][0];
            }
        }
    }
    Ok(g)
}

/// Global mass matrix for scalar coefficient vectors.
fn global_mass(disc: &Discretization) -> DMatrix<f64> {
    let (ne, nb) = (disc.n_elements(), disc.n_basis());
    let jac = disc.mesh.jacobian();
    let mut m = DMatrix::zeros(ne * nb, ne * nb);
    for k in 0..ne {
        m.view_mut((k * nb, k * nb), (nb, nb)).copy_from(&(&disc.ops.mass * jac));
    }
    m
}

/// Null space of the BR-1 gradient beyond constants, computed by a dense SVD.
pub fn gradient_nullspace(disc: &Discretization) -> Result<NullspaceReport> {
    let g = br1_matrix(disc)?;
    let n = g.ncols();
    let mass = global_mass(disc);
    let norm = |x: &DVector<f64>| x.dot(&(&mass * x)).sqrt();

    let svd = g.clone().svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::invalid("svd failed"))?;
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(1.0);
    let null: Vec<DVector<f64>> = (0..n)
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| vt.row(i).transpose())
        .collect();

    // constant field in coefficient space
    let ones: DVector<f64> = {
        let c = disc.project(|_| crate::euler::State::repeat(1.0))?;
        DVector::from_iterator(n, (0..n).map(|i| c.data[3 * i]))
    };
    let ones = &ones / norm(&ones);

    // L2-orthonormalize the null vectors against constants and each other
    let mut modes: Vec<DVector<f64>> = Vec::new();
    for mut x in null {
        for b in std::iter::once(&ones).chain(modes.iter()) {
            let c = b.dot(&(&mass * &x));
            x -= c * b;
        }
        let nx = norm(&x);
        if nx > 1e-8 {
            modes.push(x / nx);
        }
    }
    let gradient_norms = modes.iter().map(|m| norm(&(&g * m))).collect();
    Ok(NullspaceReport {
        dimension: modes.len() + 1,
        modes: modes.iter().map(|m| m.iter().copied().collect()).collect(),
        gradient_norms,
        singular_values: svd.singular_values.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{make_mesh, ElementOperators};

    fn disc(n: usize, k: usize) -> Discretization {
        Discretization::new(
            ElementOperators::nodal(n).unwrap(),
            make_mesh(0.0, 1.0, k, BoundaryMode::Periodic).unwrap(),
        )
    }

    #[test]
    fn constants_are_in_the_null_space() {
        let d = disc(1, 5);
        let g = br1_matrix(&d).unwrap();
        let ones = DVector::repeat(g.ncols(), 1.0);
        assert!((&g * ones).amax() < 1e-12);
        let r = gradient_nullspace(&d).unwrap();
        assert!(r.dimension >= 1);
    }

    #[test]
    fn linear_field_has_constant_gradient() {
        // the BR-1 gradient is exact for globally continuous linears away from the wrap
        let d = disc(2, 4);
        let g = br1_matrix(&d).unwrap();
        let nb = d.n_basis();
        let x: DVector<f64> = DVector::from_iterator(
            4 * nb,
            (0..4).flat_map(|k| (0..nb).map(move |j| (k, j))).map(|(k, j)| d.quad_x(k, j)),
        );
        let gx = &g * x;
        // interior elements only
        for k in 1..3 {
            for j in 0..nb {
                assert!((gx[k * nb + j] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn even_mesh_quadratics_have_spurious_mode() {
        let r = gradient_nullspace(&disc(2, 6)).unwrap();
        assert!(r.dimension >= 2, "{:?}", r.singular_values);
        assert!(r.gradient_norms.iter().all(|&n| n < 1e-10));
    }

    #[test]
    fn odd_mesh_quadratics_have_only_constants() {
        let r = gradient_nullspace(&disc(2, 5)).unwrap();
        assert_eq!(r.dimension, 1);
    }

    #[test]
    fn ghost_mesh_is_rejected() {
        let d = Discretization::new(
            ElementOperators::nodal(2).unwrap(),
            make_mesh(0.0, 1.0, 4, BoundaryMode::DirichletGhost).unwrap(),
        );
        assert!(gradient_nullspace(&d).is_err());
    }
}
