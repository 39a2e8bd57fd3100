use num_complex::Complex64;

use super::spectrum::Spectrum;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::scattering::scattering_matrix;

/// Reverse amplitudes at or below this magnitude count as exactly zero.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

/// Default relative threshold for [`bandwidth`].
pub const DEFAULT_BANDWIDTH_THRESHOLD: f64 = 0.5;

/// `t(src -> dest) / t(dest -> src)`. Unit magnitude means the two
/// directions transmit equally.
pub fn isolation_ratio(net: &Network, omega: f64, src: &str, dest: &str) -> Result<Complex64> {
    if src == dest {
        return Err(Error::InvalidParams(
            "isolation ratio needs two distinct ports".into(),
        ));
    }
    let s = scattering_matrix(net, omega)?;
    let forward = s.amplitude(src, dest)?;
    let reverse = s.amplitude(dest, src)?;
    if reverse.norm() <= ZERO_AMPLITUDE {
        return Err(Error::InfiniteIsolation);
    }
    Ok(forward / reverse)
}

/// Width of the contiguous frequency interval around the global maximum of
/// `T(src -> dest)` on which `T >= threshold * T_max`.
///
/// The run stops at the first grid point below the level or at a gap.
/// Returns 0 when `T_max < threshold` (including an all-zero curve), and the
/// full grid width when the curve never drops below the level.
pub fn bandwidth(spec: &Spectrum, src: &str, dest: &str, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParams(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let curve = spec.curve(src, dest)?;
    let mut peak: Option<(usize, f64)> = None;
    for (i, v) in curve.iter().enumerate() {
        if let Some(v) = *v {
            if peak.is_none_or(|(_, best)| v > best) {
                peak = Some((i, v));
            }
        }
    }
    let Some((i_max, t_max)) = peak else {
        return Ok(0.0);
    };
    if t_max < threshold {
        return Ok(0.0);
    }
    let level = threshold * t_max;
    let above = |i: usize| curve[i].is_some_and(|v| v >= level);
    let mut lo = i_max;
    while lo > 0 && above(lo - 1) {
        lo -= 1;
    }
    let mut hi = i_max;
    while hi + 1 < curve.len() && above(hi + 1) {
        hi += 1;
    }
    Ok(spec.points[hi].omega - spec.points[lo].omega)
}
