//! Legendre/Lagrange bases, Gauss and Gauss-Lobatto quadrature, and the dense
//! reference-element operators shared by every discretization.
//!
//! All operators act on the reference interval `[-1, 1]`. A solution on an
//! element is stored as coefficients in the element basis: nodal values for the
//! Lobatto collocation variant, orthonormal Legendre coefficients for the modal
//! variant.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussLegendre,
    GaussLobatto,
    /// Left Gauss-Radau, including `-1`.
    GaussRadau,
}

/// A quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature1D {
    pub kind: RuleKind,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomials of degree `<= exactness_degree` are integrated exactly.
    pub exactness_degree: usize,
}

impl Quadrature1D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k, regular at the endpoints
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Orthonormal Legendre polynomial on `[-1, 1]` and its derivative.
pub fn legendre_orthonormal(n: usize, x: f64) -> (f64, f64) {
    let (p, dp) = legendre(n, x);
    let s = ((2 * n + 1) as f64 / 2.0).sqrt();
    (s * p, s * dp)
}

/// Gauss-Legendre rule with `n_points` interior nodes (exact to degree `2n-1`).
pub fn gauss_legendre(n_points: usize) -> Result<Quadrature1D> {
    if n_points < 1 {
        return Err(Error::invalid("gauss_legendre needs at least one point"));
    }
    let n = n_points;
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi-type initial guess, ascending order
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        points[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    symmetrize(&mut points, &mut weights);
    Ok(Quadrature1D {
        kind: RuleKind::GaussLegendre,
        points,
        weights,
        exactness_degree: 2 * n - 1,
    })
}

/// Gauss-Lobatto-Legendre rule with `n_points` nodes including `±1`
/// (exact to degree `2n-3`).
pub fn gauss_lobatto(n_points: usize) -> Result<Quadrature1D> {
    if n_points < 2 {
        return Err(Error::invalid("gauss_lobatto needs at least two points"));
    }
    let n = n_points - 1; // polynomial degree
    let nf = n as f64;
    let mut points = vec![0.0; n + 1];
    points[0] = -1.0;
    points[n] = 1.0;
    for (i, pt) in points.iter_mut().enumerate().take(n).skip(1) {
        // interior nodes are roots of P'_n; start from Chebyshev-Lobatto nodes
        let mut x = -(std::f64::consts::PI * i as f64 / nf).cos();
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, dp) = legendre(n, x);
            let d2p = (2.0 * x * dp - nf * (nf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        *pt = x;
    }
    let weights = points
        .iter()
        .map(|&x| {
            let (p, _) = legendre(n, x);
            2.0 / (nf * (nf + 1.0) * p * p)
        })
        .collect::<Vec<_>>();
    let mut weights = weights;
    symmetrize(&mut points, &mut weights);
    Ok(Quadrature1D {
        kind: RuleKind::GaussLobatto,
        points,
        weights,
        exactness_degree: 2 * n_points - 3,
    })
}

/// Left Gauss-Radau rule with `n_points` nodes including `-1` (exact to degree `2n-2`).
pub fn gauss_radau(n_points: usize) -> Result<Quadrature1D> {
    if n_points < 1 {
        return Err(Error::invalid("gauss_radau needs at least one point"));
    }
    let n = n_points;
    let nf = n as f64;
    let mut points = vec![-1.0; n];
    let mut weights = vec![2.0 / (nf * nf); n];
    for i in 1..n {
        // free nodes are the roots of (P_{n-1} + P_n) / (1 + x)
        let mut x = -(2.0 * std::f64::consts::PI * i as f64 / (2.0 * nf - 1.0)).cos();
        for _ in 0..NEWTON_MAX_ITERS {
            let (a, da) = legendre(n - 1, x);
            let (b, db) = legendre(n, x);
            let (q, dq) = (a + b, da + db);
            let dx = q * (1.0 + x) / (dq * (1.0 + x) - q);
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        let (p, _) = legendre(n - 1, x);
        points[i] = x;
        weights[i] = (1.0 - x) / (nf * nf * p * p);
    }
    Ok(Quadrature1D {
        kind: RuleKind::GaussRadau,
        points,
        weights,
        exactness_degree: 2 * n - 2,
    })
}

/// Enforce exact mirror symmetry of nodes and weights.
fn symmetrize(points: &mut [f64], weights: &mut [f64]) {
    let n = points.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (points[j] - points[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        points[i] = -x;
        points[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
}

/// Barycentric weights for Lagrange interpolation on `nodes`.
fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xi - xj)
                .product();
            1.0 / prod
        })
        .collect()
}

/// The polynomial basis of degree `N` used on each element.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// Lagrange polynomials through the given nodes.
    Lagrange { nodes: Vec<f64>, bary: Vec<f64> },
    /// Orthonormal Legendre polynomials of degree `0..=N`.
    Legendre { degree: usize },
}

impl Basis {
    pub fn lagrange(nodes: Vec<f64>) -> Self {
        let bary = barycentric_weights(&nodes);
        Basis::Lagrange { nodes, bary }
    }

    pub fn len(&self) -> usize {
        match self {
            Basis::Lagrange { nodes, .. } => nodes.len(),
            Basis::Legendre { degree } => degree + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values of all basis functions at `x`.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        match self {
            Basis::Legendre { degree } => (0..=*degree)
                .map(|j| legendre_orthonormal(j, x).0)
                .collect(),
            Basis::Lagrange { nodes, bary } => {
                if let Some(hit) = nodes.iter().position(|&xi| xi == x) {
                    let mut out = vec![0.0; nodes.len()];
                    out[hit] = 1.0;
                    return out;
                }
                let terms: Vec<f64> = nodes
                    .iter()
                    .zip(bary)
                    .map(|(&xi, &bi)| bi / (x - xi))
                    .collect();
                let denom: f64 = terms.iter().sum();
                terms.iter().map(|t| t / denom).collect()
            }
        }
    }

    /// Derivatives of all basis functions at `x`.
    pub fn eval_derivative(&self, x: f64) -> Vec<f64> {
        match self {
            Basis::Legendre { degree } => (0..=*degree)
                .map(|j| legendre_orthonormal(j, x).1)
                .collect(),
            Basis::Lagrange { nodes, bary } => {
                let n = nodes.len();
                if let Some(i) = nodes.iter().position(|&xi| xi == x) {
                    // row of the nodal differentiation matrix
                    let mut row = vec![0.0; n];
                    let mut diag = 0.0;
                    for j in 0..n {
                        if j != i {
                            row[j] = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                            diag -= row[j];
                        }
                    }
                    row[i] = diag;
                    return row;
                }
                // l_j'(x) = l_j(x) * sum_{m != j} 1/(x - x_m)
                let vals = self.eval(x);
                let inv: Vec<f64> = nodes.iter().map(|&xm| 1.0 / (x - xm)).collect();
                let total: f64 = inv.iter().sum();
                (0..n).map(|j| vals[j] * (total - inv[j])).collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// DGSEM: Lagrange basis collocated with `N+1` Gauss-Lobatto nodes.
    NodalLobatto,
    /// Orthonormal Legendre basis with a Gauss volume rule.
    ModalGauss,
}

/// Dense reference-element operators for one degree/variant/quadrature choice.
///
/// Shapes use `n = N+1` basis functions and `nq` volume quadrature points.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub degree: usize,
    pub variant: Variant,
    pub basis: Basis,
    pub rule: Quadrature1D,
    /// Basis values at quadrature points, `nq x n`.
    pub vandermonde: DMatrix<f64>,
    /// Basis derivatives at quadrature points, `nq x n`.
    pub grad_vandermonde: DMatrix<f64>,
    /// Basis values at `r = -1` (row 0) and `r = +1` (row 1), `2 x n`.
    pub face_values: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub mass_inv: DMatrix<f64>,
    /// Differentiation in coefficient space, `n x n`.
    pub diff: DMatrix<f64>,
    /// Weak differentiation `Q = M D`, `n x n`.
    pub weak_diff: DMatrix<f64>,
    /// Boundary matrix `B = e_R e_R^T - e_L e_L^T`, `n x n`.
    pub boundary: DMatrix<f64>,
    /// Quadrature-weighted L2 projection onto coefficients, `n x nq`.
    pub to_coeffs: DMatrix<f64>,
    /// The projection acting on quadrature values, `nq x nq`.
    pub projection: DMatrix<f64>,
    /// Face values of the projection of quadrature data, `2 x nq`.
    pub face_from_quad: DMatrix<f64>,
    /// Weak-form volume operator `M^{-1} Dr^T W`, `n x nq`.
    pub volume: DMatrix<f64>,
    /// Surface lift `M^{-1} Vf^T`, `n x 2`.
    pub lift: DMatrix<f64>,
    /// Quadrature points coincide with the nodal basis points.
    pub collocated: bool,
}

impl ElementOperators {
    /// DGSEM operators on `N+1` Lobatto nodes.
    pub fn nodal(degree: usize) -> Result<Self> {
        build_operators(degree, Variant::NodalLobatto, gauss_lobatto(degree + 1)?)
    }

    /// Modal operators with the default `N+2` point Gauss rule.
    pub fn modal(degree: usize) -> Result<Self> {
        build_operators(degree, Variant::ModalGauss, gauss_legendre(degree + 2)?)
    }

    pub fn n_basis(&self) -> usize {
        self.degree + 1
    }

    pub fn n_quad(&self) -> usize {
        self.rule.len()
    }

    /// Evaluate coefficients at quadrature points (`coeffs` is `n` entries per component).
    pub fn eval_at_quad(&self, coeffs: &[f64], q: usize) -> f64 {
        (0..self.n_basis())
            .map(|j| self.vandermonde[(q, j)] * coeffs[j])
            .sum()
    }
}

/// Assemble all element operators for degree `degree`.
pub fn build_operators(
    degree: usize,
    variant: Variant,
    volume_rule: Quadrature1D,
) -> Result<ElementOperators> {
    if degree == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    let n = degree + 1;
    let basis = match variant {
        Variant::NodalLobatto => {
            if volume_rule.kind != RuleKind::GaussLobatto || volume_rule.len() != n {
                return Err(Error::invalid(format!(
                    "nodal_lobatto of degree {degree} needs an {n}-point Lobatto rule"
                )));
            }
            Basis::lagrange(volume_rule.points.clone())
        }
        Variant::ModalGauss => {
            // any rule exact to degree 2N gives an exact mass matrix; N+2 Gauss is the default
            if volume_rule.kind == RuleKind::GaussLobatto || volume_rule.exactness_degree < 2 * degree {
                return Err(Error::invalid(format!(
                    "modal_gauss of degree {degree} needs a Gauss or Radau rule exact to degree {}",
                    2 * degree
                )));
            }
            Basis::Legendre { degree }
        }
    };
    let nq = volume_rule.len();
    let collocated = variant == Variant::NodalLobatto;

    let mut vdm = DMatrix::zeros(nq, n);
    let mut gvdm = DMatrix::zeros(nq, n);
    for (q, &x) in volume_rule.points.iter().enumerate() {
        let v = basis.eval(x);
        let dv = basis.eval_derivative(x);
        for j in 0..n {
            vdm[(q, j)] = v[j];
            gvdm[(q, j)] = dv[j];
        }
    }
    let mut vf = DMatrix::zeros(2, n);
    for (f, &x) in [-1.0, 1.0].iter().enumerate() {
        let v = basis.eval(x);
        for j in 0..n {
            vf[(f, j)] = v[j];
        }
    }
    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(volume_rule.weights.clone()));
    let mass = vdm.transpose() * &w * &vdm;
    let mass_inv = mass
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular mass matrix"))?;
    let weak_diff = vdm.transpose() * &w * &gvdm;
    let diff = &mass_inv * &weak_diff;
    let boundary = vf.row(1).transpose() * vf.row(1) - vf.row(0).transpose() * vf.row(0);
    let to_coeffs = &mass_inv * vdm.transpose() * &w;
    let projection = &vdm * &to_coeffs;
    let face_from_quad = &vf * &to_coeffs;
    let volume = &mass_inv * gvdm.transpose() * &w;
    let lift = &mass_inv * vf.transpose();

    Ok(ElementOperators {
        degree,
        variant,
        basis,
        rule: volume_rule,
        vandermonde: vdm,
        grad_vandermonde: gvdm,
        face_values: vf,
        mass,
        mass_inv,
        diff,
        weak_diff,
        boundary,
        to_coeffs,
        projection,
        face_from_quad,
        volume,
        lift,
        collocated,
    })
}
