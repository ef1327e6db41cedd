//! Flux-differencing volume terms on Lobatto collocation nodes.

use std::fmt;
use std::str::FromStr;

use crate::basis::ElementOperators;
use crate::error::{Error, Result};
use crate::euler::{self, State};
use crate::flux;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeFlux {
    /// `(f(uL) + f(uR)) / 2`, which recovers the plain nodal DG volume term.
    Central,
    /// Ranocha's entropy conservative two-point flux.
    EcRanocha,
}

impl VolumeFlux {
    pub fn name(self) -> &'static str {
        match self {
            VolumeFlux::Central => "central",
            VolumeFlux::EcRanocha => "ec_ranocha",
        }
    }

    pub fn eval(self, ul: &State, ur: &State) -> Result<State> {
        match self {
            VolumeFlux::Central => flux::central_flux(ul, ur),
            VolumeFlux::EcRanocha => flux::ec_volume_flux(ul, ur),
        }
    }
}

impl fmt::Display for VolumeFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VolumeFlux {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [VolumeFlux::Central, VolumeFlux::EcRanocha]
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown volume flux '{s}'")))
    }
}

/// `-sum_j 2 Q_ij f_vol(u_i, u_j)` for every node `i`.
///
/// `Q` is the weak differentiation matrix of the Lobatto operators. The
/// two-point flux is symmetric, so each pair is evaluated once.
pub fn flux_diff_volume(ops: &ElementOperators, nodes: &[State], volume: VolumeFlux) -> Result<Vec<State>> {
    let q = &ops.weak_diff;
    let n = nodes.len();
    let mut out = vec![State::zeros(); n];
    for i in 0..n {
        out[i] -= 2.0 * q[(i, i)] * euler::flux(&nodes[i])?;
        for j in i + 1..n {
            let f = volume.eval(&nodes[i], &nodes[j])?;
            out[i] -= 2.0 * q[(i, j)] * f;
            out[j] -= 2.0 * q[(j, i)] * f;
        }
    }
    Ok(out)
}
