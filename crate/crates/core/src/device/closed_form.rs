//! Closed-form scattering elements for the three preset devices.
//!
//! These come from eliminating the internal modes (`a1`, `b1`, `c1`, `sigma`)
//! and leaving an effective 2x2 or 3x3 problem on the port cavities. Effective
//! frequencies carry damping as an imaginary part, `omega_eff = omega + i
//! gamma / 2`. With
//!
//! ```text
//!     H_eff = | F_a   -M_+   -G_ac |
//!             | -M_-   F_b   -G_bc |
//!             | -G_ac -G_bc   F_c  |
//! ```
//!
//! the port amplitudes satisfy `H_eff x = i sqrt(kappa) u`, and every entry
//! below is a cofactor of `H_eff` over `-det H_eff`.
//!
//! The generic solver in [`crate::scattering`] is the reference; these forms
//! exist to cross-check it and to expose the intermediate quantities.
//! Removable singularities (for example `omega_eff_2 = 0` when the atom is
//! lossless and `omega = 0`) are reported as
//! [`Error::SingularAtFrequency`] rather than resolved by a limit.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{DeviceKind, DeviceParams, A2, B2, C2};
use crate::error::{Error, Result};
use crate::scattering::ScatteringMatrix;

/// Intermediate quantities of the closed forms at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormContext {
    pub omega: f64,
    pub omega_eff_a: Complex64,
    pub omega_eff_b: Complex64,
    pub omega_eff_c: Complex64,
    /// Internal cavities `a1`, `b1`, `c1`.
    pub omega_eff_1: Complex64,
    /// The atom.
    pub omega_eff_2: Complex64,
    /// `omega_eff_1^2 - j_ab^2`
    pub d: Complex64,
    /// `omega_eff_1^2 - j_ac^2 - j_bc^2`
    pub d_prime: Complex64,
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub f_a: Complex64,
    pub f_b: Complex64,
    pub f_c: Complex64,
    pub g_ac: Complex64,
    pub g_bc: Complex64,
}

fn singular(omega: f64) -> Error {
    Error::SingularAtFrequency {
        omega,
        condition: f64::INFINITY,
        null_vector: Vec::new(),
    }
}

fn nonzero(z: Complex64, omega: f64) -> Result<Complex64> {
    if z.re == 0.0 && z.im == 0.0 {
        Err(singular(omega))
    } else {
        Ok(z)
    }
}

impl ClosedFormContext {
    /// Evaluates the intermediates for `kind`. Each kind's builder reads only
    /// the fields it uses; `kappa_c` is zero for the isolator.
    pub fn new(kind: DeviceKind, p: &DeviceParams, omega: f64) -> Result<Self> {
        p.validate(kind)?;
        let i = Complex64::i();
        let w = Complex64::new(omega, 0.0);
        let omega_eff_a = w + i * (p.kappa_a() + p.gamma_c) / 2.0;
        let omega_eff_b = w + i * (p.kappa_b() + p.gamma_c) / 2.0;
        let omega_eff_c = w + i * (p.kappa_c() + p.gamma_c) / 2.0;
        let omega_eff_1 = w + i * p.gamma_c / 2.0;
        let omega_eff_2 = nonzero(w + i * p.gamma_e / 2.0, omega)?;
        let d = omega_eff_1 * omega_eff_1 - p.j_ab * p.j_ab;
        let d_prime = omega_eff_1 * omega_eff_1 - p.j_ac * p.j_ac - p.j_bc * p.j_bc;

        let emitter_ab = p.g_a * p.g_b / omega_eff_2;
        let (m_plus, m_minus, f_a, f_b) = match kind {
            DeviceKind::Isolator | DeviceKind::SymmetricCirculator => {
                let d = nonzero(d, omega)?;
                let loop_amp = p.j_a * p.j_b * p.j_ab / d;
                (
                    loop_amp * Complex64::from_polar(1.0, p.phi1) + emitter_ab,
                    loop_amp * Complex64::from_polar(1.0, -p.phi1) + emitter_ab,
                    omega_eff_a - omega_eff_1 * p.j_a * p.j_a / d - p.g_a * p.g_a / omega_eff_2,
                    omega_eff_b - omega_eff_1 * p.j_b * p.j_b / d - p.g_b * p.g_b / omega_eff_2,
                )
            }
            DeviceKind::AntisymmetricCirculator => {
                let w1 = nonzero(omega_eff_1, omega)?;
                let dp = nonzero(d_prime, omega)?;
                let loop_amp = p.j_a * p.j_b * p.j_ac * p.j_bc / (w1 * dp);
                (
                    loop_amp * Complex64::from_polar(1.0, -p.phi2) + emitter_ab,
                    loop_amp * Complex64::from_polar(1.0, p.phi2) + emitter_ab,
                    omega_eff_a
                        - p.j_a * p.j_a / w1 * (1.0 + p.j_ac * p.j_ac / dp)
                        - p.g_a * p.g_a / omega_eff_2,
                    omega_eff_b
                        - p.j_b * p.j_b / w1 * (1.0 + p.j_bc * p.j_bc / dp)
                        - p.g_b * p.g_b / omega_eff_2,
                )
            }
        };
        let f_c = omega_eff_c - p.g_c * p.g_c / omega_eff_2;
        let g_ac = p.g_a * p.g_c / omega_eff_2;
        let g_bc = p.g_b * p.g_c / omega_eff_2;

        Ok(ClosedFormContext {
            omega,
            omega_eff_a,
            omega_eff_b,
            omega_eff_c,
            omega_eff_1,
            omega_eff_2,
            d,
            d_prime,
            m_plus,
            m_minus,
            f_a,
            f_b,
            f_c,
            g_ac,
            g_bc,
        })
    }

    /// `M_+ M_- - F_a F_b`
    pub fn two_port_denominator(&self) -> Complex64 {
        self.m_plus * self.m_minus - self.f_a * self.f_b
    }

    /// `F_c (M_+ M_- - F_a F_b) + G_bc^2 F_a + G_ac^2 F_b + G_ac G_bc (M_+ + M_-)`
    pub fn three_port_denominator(&self) -> Complex64 {
        self.f_c * self.two_port_denominator()
            + self.g_bc * self.g_bc * self.f_a
            + self.g_ac * self.g_ac * self.f_b
            + self.g_ac * self.g_bc * (self.m_plus + self.m_minus)
    }

    fn two_port(&self, p: &DeviceParams) -> Result<DMatrix<Complex64>> {
        let i = Complex64::i();
        let den = nonzero(self.two_port_denominator(), self.omega)?;
        let (ka, kb) = (p.kappa_a(), p.kappa_b());
        let kab = (ka * kb).sqrt();
        let mut s = DMatrix::zeros(2, 2);
        s[(0, 0)] = 1.0 + i * ka * self.f_b / den;
        s[(1, 1)] = 1.0 + i * kb * self.f_a / den;
        // a -> b lands in row b, column a
        s[(1, 0)] = i * kab * self.m_minus / den;
        s[(0, 1)] = i * kab * self.m_plus / den;
        Ok(s)
    }

    fn three_port(&self, p: &DeviceParams) -> Result<DMatrix<Complex64>> {
        let i = Complex64::i();
        let den = nonzero(self.three_port_denominator(), self.omega)?;
        let (ka, kb, kc) = (p.kappa_a(), p.kappa_b(), p.kappa_c());
        let (kab, kac, kbc) = ((ka * kb).sqrt(), (ka * kc).sqrt(), (kb * kc).sqrt());
        let (mp, mm) = (self.m_plus, self.m_minus);
        let (fa, fb, fc) = (self.f_a, self.f_b, self.f_c);
        let (gac, gbc) = (self.g_ac, self.g_bc);

        let mut s = DMatrix::zeros(3, 3);
        s[(0, 0)] = 1.0 + i * (fb * fc - gbc * gbc) * ka / den;
        s[(1, 1)] = 1.0 + i * (fa * fc - gac * gac) * kb / den;
        s[(2, 2)] = 1.0 + i * (fa * fb - mp * mm) * kc / den;
        s[(1, 0)] = i * (fc * mm + gac * gbc) * kab / den;
        s[(0, 1)] = i * (fc * mp + gac * gbc) * kab / den;
        s[(2, 0)] = i * (fb * gac + mm * gbc) * kac / den;
        s[(0, 2)] = i * (fb * gac + mp * gbc) * kac / den;
        s[(2, 1)] = i * (fa * gbc + mp * gac) * kbc / den;
        s[(1, 2)] = i * (fa * gbc + mm * gac) * kbc / den;
        Ok(s)
    }
}

fn labelled(omega: f64, ports: &[&str], s: DMatrix<Complex64>) -> ScatteringMatrix {
    ScatteringMatrix {
        frequency: omega,
        ports: ports.iter().map(|p| p.to_string()).collect(),
        s,
    }
}

/// Two-port isolator scattering matrix.
pub fn analytic_s1(p: &DeviceParams, omega: f64) -> Result<ScatteringMatrix> {
    let ctx = ClosedFormContext::new(DeviceKind::Isolator, p, omega)?;
    Ok(labelled(omega, &[A2, B2], ctx.two_port(p)?))
}

/// Symmetric (auxiliary-cavity) circulator scattering matrix.
pub fn analytic_s2(p: &DeviceParams, omega: f64) -> Result<ScatteringMatrix> {
    let ctx = ClosedFormContext::new(DeviceKind::SymmetricCirculator, p, omega)?;
    Ok(labelled(omega, &[A2, B2, C2], ctx.three_port(p)?))
}

/// Antisymmetric (transition-cavity) circulator scattering matrix.
pub fn analytic_s3(p: &DeviceParams, omega: f64) -> Result<ScatteringMatrix> {
    let ctx = ClosedFormContext::new(DeviceKind::AntisymmetricCirculator, p, omega)?;
    Ok(labelled(omega, &[A2, B2, C2], ctx.three_port(p)?))
}

/// Closed-form `t_ab / t_ba` for the isolator,
/// `((2w + i gamma_e) J e^{-i phi} + 2 D g_a g_b) / ((2w + i gamma_e) J e^{i phi} + 2 D g_a g_b)`
/// with `J = j_a j_b j_ab`.
pub fn isolation_ratio_closed_form(p: &DeviceParams, omega: f64) -> Result<Complex64> {
    p.validate(DeviceKind::Isolator)?;
    let i = Complex64::i();
    let w1 = Complex64::new(omega, p.gamma_c / 2.0);
    let d = w1 * w1 - p.j_ab * p.j_ab;
    let lead = (2.0 * omega + i * p.gamma_e) * (p.j_a * p.j_b * p.j_ab);
    let num = lead * Complex64::from_polar(1.0, -p.phi1) + 2.0 * d * p.g_a * p.g_b;
    let den = nonzero(
        lead * Complex64::from_polar(1.0, p.phi1) + 2.0 * d * p.g_a * p.g_b,
        omega,
    )?;
    Ok(num / den)
}

/// Forward amplitude `t_ab` at `omega = 0` for a lossless-cavity isolator
/// tuned to suppress `b -> a`:
/// `8 j_a j_b j_ab sqrt(k_1 k_2) / ((2 j_a j_b + j_ab k_1)(2 j_a j_b + j_ab k_2))`.
pub fn optimal_forward_amplitude(j_a: f64, j_b: f64, j_ab: f64, kappa_1: f64, kappa_2: f64) -> f64 {
    let x = 2.0 * j_a * j_b;
    8.0 * j_a * j_b * j_ab * (kappa_1 * kappa_2).sqrt()
        / ((x + j_ab * kappa_1) * (x + j_ab * kappa_2))
}

/// Forward amplitude `t_ab` at `omega = 0` with cavity loss `gamma_c`, equal
/// port dampings `kappa_c`, and the lossy suppression coupling:
/// `4 J0 J1 kappa_c / ((J1 + 4 gamma_c j_a^2 + J0 kappa_t)(J1 + 4 gamma_c j_b^2 + J0 kappa_t))`
/// where `J0 = 4 j_ab^2 + gamma_c^2`, `J1 = 8 j_a j_b j_ab`, `kappa_t = kappa_c + gamma_c`.
pub fn lossy_forward_amplitude(j_a: f64, j_b: f64, j_ab: f64, kappa_c: f64, gamma_c: f64) -> f64 {
    let j0 = 4.0 * j_ab * j_ab + gamma_c * gamma_c;
    let j1 = 8.0 * j_a * j_b * j_ab;
    let kappa_t = kappa_c + gamma_c;
    4.0 * j0 * j1 * kappa_c
        / ((j1 + 4.0 * gamma_c * j_a * j_a + j0 * kappa_t)
            * (j1 + 4.0 * gamma_c * j_b * j_b + j0 * kappa_t))
}
