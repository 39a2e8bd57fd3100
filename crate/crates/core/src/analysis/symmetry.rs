use serde::{Deserialize, Serialize};

use super::spectrum::Spectrum;
use crate::error::{Error, Result};

/// Default tolerance for [`classify_symmetry`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralSymmetry {
    /// `T(i -> j)(omega) = T(i -> j)(-omega)`: same routing at `+-omega`.
    SymmetricInOmega,
    /// `T(i -> j)(omega) = T(j -> i)(-omega)`: routing reverses at `-omega`.
    AntisymmetricSwap,
    Neither,
}

/// Largest violation of each candidate relation over the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResiduals {
    pub symmetric: f64,
    pub swap: f64,
}

/// Compares every grid point with its mirror image. Pairs where either side
/// is a gap are skipped.
pub fn symmetry_residuals(spec: &Spectrum) -> Result<SymmetryResiduals> {
    if !spec.grid.is_symmetric() {
        return Err(Error::AsymmetricGrid);
    }
    let n = spec.points.len();
    let mut res = SymmetryResiduals {
        symmetric: 0.0,
        swap: 0.0,
    };
    for (k, point) in spec.points.iter().enumerate() {
        let mirror = &spec.points[n - 1 - k];
        let (Some(p), Some(q)) = (&point.probabilities, &mirror.probabilities) else {
            continue;
        };
        for ((r, c), v) in p
            .iter()
            .enumerate()
            .map(|(i, v)| ((i % p.nrows(), i / p.nrows()), v))
        {
            res.symmetric = res.symmetric.max((v - q[(r, c)]).abs());
            res.swap = res.swap.max((v - q[(c, r)]).abs());
        }
    }
    Ok(res)
}

/// Which of the two relations the spectrum satisfies within `tol`. When both
/// hold (a reciprocal, even spectrum) the answer is
/// [`SpectralSymmetry::SymmetricInOmega`].
pub fn classify_symmetry(spec: &Spectrum, tol: f64) -> Result<SpectralSymmetry> {
    let res = symmetry_residuals(spec)?;
    Ok(if res.symmetric <= tol {
        SpectralSymmetry::SymmetricInOmega
    } else if res.swap <= tol {
        SpectralSymmetry::AntisymmetricSwap
    } else {
        SpectralSymmetry::Neither
    })
}
