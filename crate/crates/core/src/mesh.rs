//! Uniform 1D meshes with affine element maps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    Periodic,
    /// Exterior traces at the two domain ends come from frozen ghost states.
    DirichletGhost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub a: f64,
    pub b: f64,
    pub n_elements: usize,
    pub boundary: BoundaryMode,
}

impl Mesh1D {
    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n_elements as f64
    }

    /// Jacobian of the reference-to-physical map, `h/2`.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.h()
    }

    pub fn left_vertex(&self, k: usize) -> f64 {
        self.a + (self.b - self.a) * k as f64 / self.n_elements as f64
    }

    pub fn right_vertex(&self, k: usize) -> f64 {
        self.a + (self.b - self.a) * (k + 1) as f64 / self.n_elements as f64
    }

    /// Physical position of reference coordinate `r` in element `k`.
    pub fn map(&self, k: usize, r: f64) -> f64 {
        let (xl, xr) = (self.left_vertex(k), self.right_vertex(k));
        // convex combination so that r = -1 and r = 1 land exactly on the vertices
        0.5 * (1.0 - r) * xl + 0.5 * (1.0 + r) * xr
    }

    /// Left neighbour, `None` at a ghost boundary.
    pub fn left_neighbor(&self, k: usize) -> Option<usize> {
        match (k, self.boundary) {
            (0, BoundaryMode::Periodic) => Some(self.n_elements - 1),
            (0, BoundaryMode::DirichletGhost) => None,
            _ => Some(k - 1),
        }
    }

    /// Right neighbour, `None` at a ghost boundary.
    pub fn right_neighbor(&self, k: usize) -> Option<usize> {
        if k + 1 < self.n_elements {
            Some(k + 1)
        } else {
            match self.boundary {
                BoundaryMode::Periodic => Some(0),
                BoundaryMode::DirichletGhost => None,
            }
        }
    }
}

pub fn make_mesh(a: f64, b: f64, n_elements: usize, boundary: BoundaryMode) -> Result<Mesh1D> {
    if !(a < b) {
        return Err(Error::invalid(format!("domain [{a}, {b}] is empty")));
    }
    if n_elements == 0 {
        return Err(Error::invalid("mesh needs at least one element"));
    }
    Ok(Mesh1D {
        a,
        b,
        n_elements,
        boundary,
    })
}
