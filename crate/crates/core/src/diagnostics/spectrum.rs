//! Eigenvalues of the linearized semi-discrete operator.

use nalgebra::{Complex, DMatrix};

use crate::dg::SolutionField;
use crate::error::{Error, Result};
use crate::scheme::Semidiscretization;

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real: f64,
    pub n_unknowns: usize,
}

/// Dense Jacobian of `rhs` at `u` by central differences with step
/// `sqrt(eps) (1 + |u_j|)`.
pub fn fd_jacobian(mut rhs: impl FnMut(&[f64], &mut [f64]) -> Result<()>, u: &[f64]) -> Result<DMatrix<f64>> {
    let n = u.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut up = u.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    let root_eps = f64::EPSILON.sqrt();
    for j in 0..n {
        let h = root_eps * (1.0 + u[j].abs());
        up[j] = u[j] + h;
        rhs(&up, &mut fp)?;
        up[j] = u[j] - h;
        rhs(&up, &mut fm)?;
        up[j] = u[j];
        // the actual step differs from h by rounding
        let width = (u[j] + h) - (u[j] - h);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / width;
        }
    }
    Ok(jac)
}

/// Spectrum of a dense matrix.
pub fn spectrum_of(jac: DMatrix<f64>) -> Result<SpectrumReport> {
    if !jac.is_square() {
        return Err(Error::invalid("jacobian must be square"));
    }
    let n = jac.nrows();
    if n == 0 {
        return Err(Error::invalid("empty jacobian"));
    }
    if jac.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("jacobian has non-finite entries"));
    }
    let eigenvalues: Vec<Complex<f64>> = jac.complex_eigenvalues().iter().copied().collect();
    let max_real = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumReport {
        eigenvalues,
        max_real,
        n_unknowns: n,
    })
}

/// Spectrum of the scheme's right-hand side linearized about `u`.
pub fn linearized_spectrum(semi: &Semidiscretization, u: &SolutionField) -> Result<SpectrumReport> {
    let (ne, nb) = (u.n_elements, u.n_basis);
    let mut field = u.clone();
    let mut out = u.clone();
    let jac = fd_jacobian(
        |x, f| {
            field.data.copy_from_slice(x);
            semi.rhs(&field, &mut out)?;
            f.copy_from_slice(&out.data);
            Ok(())
        },
        &u.data,
    )?;
    debug_assert_eq!(jac.nrows(), ne * nb * 3);
    spectrum_of(jac)
}
