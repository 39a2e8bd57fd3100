use serde::{Deserialize, Serialize};

use crate::device::{DeviceKind, DeviceParams};
use crate::error::{Error, Result};

/// Extra emitter damping left behind when a strongly damped auxiliary cavity
/// is eliminated: `gamma_e_id` from the cavity's internal loss, `kappa_e_id`
/// from its port.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveDamping {
    pub gamma_e_id: f64,
    pub kappa_e_id: f64,
}

impl EffectiveDamping {
    pub fn total(&self) -> f64 {
        self.gamma_e_id + self.kappa_e_id
    }
}

/// `gamma_e_id = 4 g_c^2 gamma_c / (kappa_c3 + gamma_c)^2`,
/// `kappa_e_id = 4 g_c^2 kappa_c3 / (kappa_c3 + gamma_c)^2`.
pub fn effective_damping(g_c: f64, kappa_c3: f64, gamma_c: f64) -> Result<EffectiveDamping> {
    for (name, v) in [("g_c", g_c), ("kappa_c3", kappa_c3), ("gamma_c", gamma_c)] {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParams(format!(
                "`{name}` must be finite and nonnegative, got {v}"
            )));
        }
    }
    let total = kappa_c3 + gamma_c;
    if total <= 0.0 {
        return Err(Error::InvalidParams(
            "kappa_c3 + gamma_c must be positive".into(),
        ));
    }
    let scale = 4.0 * g_c * g_c / (total * total);
    Ok(EffectiveDamping {
        gamma_e_id: scale * gamma_c,
        kappa_e_id: scale * kappa_c3,
    })
}

/// Isolator parameters that approximate a symmetric circulator once its
/// auxiliary cavity `c2` is eliminated: the emitter damping grows by
/// `gamma_e_id + kappa_e_id` and port `c2` disappears.
pub fn reduce_auxiliary(p: &DeviceParams) -> Result<DeviceParams> {
    p.validate(DeviceKind::SymmetricCirculator)?;
    let eff = effective_damping(p.g_c, p.kappa_c(), p.gamma_c)?;
    Ok(DeviceParams {
        g_c: 0.0,
        gamma_e: p.gamma_e + eff.total(),
        kappa: p.kappa[..2].to_vec(),
        ..p.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_auxiliary() {
        let e = effective_damping(1.0, 10.0, 0.0).unwrap();
        assert_eq!(e.gamma_e_id, 0.0);
        assert!((e.kappa_e_id - 0.4).abs() < 1e-15);
    }

    #[test]
    fn zero_coupling() {
        let e = effective_damping(0.0, 3.0, 0.2).unwrap();
        assert_eq!((e.gamma_e_id, e.kappa_e_id), (0.0, 0.0));
    }

    #[test]
    fn rejects_undamped_auxiliary() {
        assert!(effective_damping(1.0, 0.0, 0.0).is_err());
        assert!(effective_damping(-1.0, 1.0, 0.0).is_err());
    }
}
