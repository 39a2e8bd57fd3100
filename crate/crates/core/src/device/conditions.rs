//! Parameter conditions for optimal nonreciprocity.
//!
//! The `*_conditions` and [`dual_frequency_params`] functions solve for a
//! parameter set; [`evaluate_conditions`] goes the other way and reports how
//! far a given set is from satisfying them, including a direct check of the
//! suppressed transmission with the generic solver.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{build_device, DeviceKind, DeviceParams, A2, B2, C2};
use crate::error::{Error, Result};
use crate::scattering::scattering_matrix;

/// Probability below which a transmission counts as suppressed.
pub const SUPPRESSION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationDirection {
    AToB,
    BToA,
}

impl IsolationDirection {
    pub fn phase(self) -> f64 {
        match self {
            IsolationDirection::AToB => 3.0 * FRAC_PI_2,
            IsolationDirection::BToA => FRAC_PI_2,
        }
    }
}

/// Counterclockwise is `a -> b -> c -> a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Circulation {
    Counterclockwise,
    Clockwise,
}

impl Circulation {
    /// `(src, dest)` pairs that carry the signal.
    pub fn forward_pairs(self) -> [(&'static str, &'static str); 3] {
        match self {
            Circulation::Counterclockwise => [(A2, B2), (B2, C2), (C2, A2)],
            Circulation::Clockwise => [(A2, C2), (C2, B2), (B2, A2)],
        }
    }

    pub fn reversed(self) -> Circulation {
        match self {
            Circulation::Counterclockwise => Circulation::Clockwise,
            Circulation::Clockwise => Circulation::Counterclockwise,
        }
    }

    /// Loop phase giving this circulation at `omega = 0` for the
    /// auxiliary-cavity circulator tuned by [`symmetric_circulator_conditions`].
    pub fn resonant_phase(self) -> f64 {
        match self {
            Circulation::Counterclockwise => 3.0 * FRAC_PI_2,
            Circulation::Clockwise => FRAC_PI_2,
        }
    }
}

/// Which family of optimality conditions a parameter set is meant to meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionSet {
    /// Optimal routing at `omega = 0`.
    #[default]
    Resonant,
    /// Circulation at `omega = +-1`.
    DualFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub satisfied: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub derived: BTreeMap<String, f64>,
}

impl ConditionReport {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        ConditionReport {
            name: name.into(),
            satisfied: residual <= tolerance,
            residual,
            tolerance,
            derived: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.derived.insert(key.to_string(), value);
        self
    }
}

impl fmt::Display for ConditionReport {
    /// `key=value` lines, prefixed by the condition name.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}.satisfied={}", self.name, self.satisfied)?;
        writeln!(f, "{}.residual={:e}", self.name, self.residual)?;
        writeln!(f, "{}.tolerance={:e}", self.name, self.tolerance)?;
        for (k, v) in &self.derived {
            writeln!(f, "{}.{}={}", self.name, k, v)?;
        }
        Ok(())
    }
}

fn require_nonnegative(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !(*v >= 0.0) || !v.is_finite() {
            return Err(Error::InvalidParams(format!(
                "`{name}` must be finite and nonnegative, got {v}"
            )));
        }
    }
    Ok(())
}

fn require_positive_kappa(kappa_c: f64) -> Result<()> {
    if !(kappa_c > 0.0) || !kappa_c.is_finite() {
        return Err(Error::InvalidParams(format!(
            "kappa_c must be positive, got {kappa_c}"
        )));
    }
    Ok(())
}

/// Emitter coupling `g` (with `g_a = g_b = g`) that cancels `b -> a` at
/// `omega = 0` for phase `3pi/2`: `g^2 = 2 j_a j_b j_ab gamma_e / (4 j_ab^2 + gamma_c^2)`.
pub fn isolator_suppression_coupling(
    j_a: f64,
    j_b: f64,
    j_ab: f64,
    gamma_e: f64,
    gamma_c: f64,
) -> Result<f64> {
    require_nonnegative(&[
        ("j_a", j_a),
        ("j_b", j_b),
        ("j_ab", j_ab),
        ("gamma_e", gamma_e),
        ("gamma_c", gamma_c),
    ])?;
    let den = 4.0 * j_ab * j_ab + gamma_c * gamma_c;
    if den == 0.0 {
        return Err(Error::InfeasibleCondition(
            "suppression coupling diverges when j_ab and gamma_c both vanish".into(),
        ));
    }
    Ok((2.0 * j_a * j_b * j_ab * gamma_e / den).sqrt())
}

/// Optimal isolator parameters for equal port dampings `kappa_c`.
///
/// `j_ab = 2 j_a j_b / kappa_c` makes the forward transmission unity. The
/// emitter coupling is `sqrt(gamma_e kappa_c) / 2` for lossless cavities and
/// the loss-corrected [`isolator_suppression_coupling`] otherwise.
pub fn isolator_conditions(
    j_a: f64,
    j_b: f64,
    kappa_c: f64,
    gamma_e: f64,
    gamma_c: f64,
    direction: IsolationDirection,
) -> Result<DeviceParams> {
    require_nonnegative(&[
        ("j_a", j_a),
        ("j_b", j_b),
        ("gamma_e", gamma_e),
        ("gamma_c", gamma_c),
    ])?;
    require_positive_kappa(kappa_c)?;
    let j_ab = 2.0 * j_a * j_b / kappa_c;
    let g = if gamma_c > 0.0 {
        isolator_suppression_coupling(j_a, j_b, j_ab, gamma_e, gamma_c)?
    } else {
        (gamma_e * kappa_c).sqrt() / 2.0
    };
    Ok(DeviceParams {
        j_a,
        j_b,
        j_ab,
        g_a: g,
        g_b: g,
        phi1: direction.phase(),
        gamma_c,
        gamma_e,
        kappa: vec![kappa_c; 2],
        ..Default::default()
    })
}

/// Optimal resonant circulator with an auxiliary cavity. `g` is free; the
/// auxiliary coupling is pinned to `g_c^2 = (4 g^2 - gamma_e kappa_c) / 4`.
pub fn symmetric_circulator_conditions(
    j_a: f64,
    j_b: f64,
    kappa_c: f64,
    gamma_e: f64,
    g: f64,
    direction: Circulation,
) -> Result<DeviceParams> {
    require_nonnegative(&[("j_a", j_a), ("j_b", j_b), ("gamma_e", gamma_e), ("g", g)])?;
    require_positive_kappa(kappa_c)?;
    let g_c_sq = (4.0 * g * g - gamma_e * kappa_c) / 4.0;
    if g_c_sq < 0.0 {
        return Err(Error::InfeasibleCondition(format!(
            "auxiliary coupling needs 4 g^2 >= gamma_e kappa_c, got 4 g^2 = {} < {}",
            4.0 * g * g,
            gamma_e * kappa_c
        )));
    }
    Ok(DeviceParams {
        j_a,
        j_b,
        j_ab: 2.0 * j_a * j_b / kappa_c,
        g_a: g,
        g_b: g,
        g_c: g_c_sq.sqrt(),
        phi1: direction.resonant_phase(),
        gamma_e,
        kappa: vec![kappa_c; 3],
        ..Default::default()
    })
}

/// Parameter sets that circulate at both `omega = -1` and `omega = +1`.
///
/// Phases default to `pi/2`: the symmetric circulator then runs
/// counterclockwise at both frequencies, the antisymmetric one
/// counterclockwise at `-1` and clockwise at `+1`. Both need `kappa_c < 2`.
pub fn dual_frequency_params(kind: DeviceKind, kappa_c: f64, gamma_e: f64) -> Result<DeviceParams> {
    require_positive_kappa(kappa_c)?;
    require_nonnegative(&[("gamma_e", gamma_e)])?;
    if kind == DeviceKind::Isolator {
        return Err(Error::InvalidParams(
            "the isolator has no dual-frequency parameter set".into(),
        ));
    }
    if kappa_c >= 2.0 {
        return Err(Error::InfeasibleCondition(format!(
            "dual-frequency rail couplings vanish or turn imaginary for kappa_c >= 2, got {kappa_c}"
        )));
    }
    let g = (kappa_c * (kappa_c + gamma_e) / 4.0).sqrt();
    let g_c = ((4.0 + kappa_c * kappa_c) / 4.0).sqrt();
    let p = match kind {
        DeviceKind::SymmetricCirculator => {
            let j = ((4.0 - kappa_c * kappa_c) / 4.0).sqrt();
            DeviceParams {
                j_a: j,
                j_b: j,
                j_ab: kappa_c / 2.0,
                g_a: g,
                g_b: g,
                g_c,
                phi1: FRAC_PI_2,
                gamma_e,
                kappa: vec![kappa_c; 3],
                ..Default::default()
            }
        }
        DeviceKind::AntisymmetricCirculator => {
            let j = ((2.0 - kappa_c) / 2.0).sqrt();
            let j_t = (kappa_c / (2.0 + kappa_c)).sqrt();
            DeviceParams {
                j_a: j,
                j_b: j,
                j_ac: j_t,
                j_bc: j_t,
                g_a: g,
                g_b: g,
                g_c,
                phi2: FRAC_PI_2,
                gamma_e,
                kappa: vec![kappa_c; 3],
                ..Default::default()
            }
        }
        DeviceKind::Isolator => unreachable!(),
    };
    Ok(p)
}

/// Circular distance from `phase` to the nearer of `pi/2` and `3pi/2`, and
/// whether `3pi/2` is the nearer one.
fn quadrature(phase: f64) -> (f64, bool) {
    let r = phase.rem_euclid(TAU);
    let dist = |target: f64| {
        let d = (r - target).abs();
        d.min(TAU - d)
    };
    let (lo, hi) = (dist(FRAC_PI_2), dist(3.0 * FRAC_PI_2));
    if hi <= lo {
        (hi, true)
    } else {
        (lo, false)
    }
}

fn quadrature_report(name: &str, phase: f64, tol: f64) -> (ConditionReport, bool) {
    let (residual, upper) = quadrature(phase);
    let target = if upper { 3.0 * FRAC_PI_2 } else { FRAC_PI_2 };
    (
        ConditionReport::new(name, residual, tol).with("nearest_phase_over_pi", target / PI),
        upper,
    )
}

fn circulation_report(
    name: &str,
    kind: DeviceKind,
    p: &DeviceParams,
    omega: f64,
    circulation: Circulation,
) -> Result<ConditionReport> {
    let net = build_device(kind, p)?;
    let s = scattering_matrix(&net, omega)?;
    let mut reverse = 0.0f64;
    for (src, dest) in circulation.reversed().forward_pairs() {
        reverse = reverse.max(s.probability(src, dest)?);
    }
    let mut report =
        ConditionReport::new(name, reverse, SUPPRESSION_TOLERANCE).with("omega", omega);
    for (src, dest) in circulation.forward_pairs() {
        report = report.with(&format!("T_{src}_{dest}"), s.probability(src, dest)?);
    }
    Ok(report.with(
        "counterclockwise",
        if circulation == Circulation::Counterclockwise {
            1.0
        } else {
            0.0
        },
    ))
}

fn equal_ports_report(p: &DeviceParams, tol: f64) -> ConditionReport {
    let k0 = p.kappa_a();
    let spread = p.kappa.iter().map(|k| (k - k0).abs()).fold(0.0, f64::max);
    ConditionReport::new("equal_port_damping", spread, tol).with("kappa_c", k0)
}

fn loop_coupling_report(p: &DeviceParams, tol: f64) -> ConditionReport {
    let expected = 2.0 * p.j_a * p.j_b / (p.kappa_a() * p.kappa_b()).sqrt();
    ConditionReport::new("loop_coupling", (p.j_ab - expected).abs(), tol)
        .with("j_ab_expected", expected)
}

/// Reports how well `p` meets the chosen condition set for `kind`.
///
/// `tol` applies to algebraic residuals; the direct transmission checks
/// always use [`SUPPRESSION_TOLERANCE`]. Returns
/// [`Error::InfeasibleCondition`] when the set cannot be met at all.
pub fn evaluate_conditions(
    kind: DeviceKind,
    p: &DeviceParams,
    set: ConditionSet,
    tol: f64,
) -> Result<Vec<ConditionReport>> {
    p.validate(kind)?;
    let kc = p.kappa_a();
    let mut out = vec![equal_ports_report(p, tol)];
    match (kind, set) {
        (DeviceKind::Isolator, ConditionSet::Resonant) => {
            out.push(loop_coupling_report(p, tol));
            let den = 4.0 * p.j_ab * p.j_ab + p.gamma_c * p.gamma_c;
            let target = if den > 0.0 {
                2.0 * p.j_a * p.j_b * p.j_ab * p.gamma_e / den
            } else {
                f64::INFINITY
            };
            let mut supp =
                ConditionReport::new("reverse_suppression", (p.g_a * p.g_b - target).abs(), tol)
                    .with("g_expected", target.sqrt());
            if p.gamma_c == 0.0 {
                supp = supp.with("g_lossless_expected", (p.gamma_e * kc).sqrt() / 2.0);
            }
            out.push(supp);
            out.push(
                ConditionReport::new(
                    "nonreciprocity_requires_gamma_e_positive",
                    if p.gamma_e > 0.0 { 0.0 } else { 1.0 },
                    tol,
                )
                .with("gamma_e", p.gamma_e),
            );
            let (phase, a_to_b) = quadrature_report("quadrature_phase", p.phi1, tol);
            out.push(phase.with("a_to_b", if a_to_b { 1.0 } else { 0.0 }));

            let (src, dest) = if a_to_b { (A2, B2) } else { (B2, A2) };
            let s = scattering_matrix(&build_device(kind, p)?, 0.0)?;
            let mut report = ConditionReport::new(
                "reverse_transmission_zero",
                s.probability(dest, src)?,
                SUPPRESSION_TOLERANCE,
            )
            .with("T_forward", s.probability(src, dest)?);
            if p.kappa_a() == p.kappa_b() {
                let t = lossy_forward_or_nan(p);
                report = report.with("T_forward_closed_form", t * t);
            }
            out.push(report);
        }
        (DeviceKind::SymmetricCirculator, ConditionSet::Resonant) => {
            let g = p.g_a;
            if 4.0 * g * g < p.gamma_e * kc {
                return Err(Error::InfeasibleCondition(format!(
                    "auxiliary coupling needs 4 g^2 >= gamma_e kappa_c, got 4 g^2 = {} < {}",
                    4.0 * g * g,
                    p.gamma_e * kc
                )));
            }
            out.push(ConditionReport::new(
                "symmetric_emitter_coupling",
                (p.g_a - p.g_b).abs(),
                tol,
            ));
            out.push(loop_coupling_report(p, tol));
            let g_c_sq = (4.0 * g * g - p.gamma_e * kc) / 4.0;
            out.push(
                ConditionReport::new("auxiliary_coupling", (p.g_c * p.g_c - g_c_sq).abs(), tol)
                    .with("g_c_expected", g_c_sq.sqrt()),
            );
            let (phase, ccw) = quadrature_report("quadrature_phase", p.phi1, tol);
            out.push(phase);
            let circulation = if ccw {
                Circulation::Counterclockwise
            } else {
                Circulation::Clockwise
            };
            out.push(
                circulation_report("circulation_at_resonance", kind, p, 0.0, circulation)?.with(
                    "T_lossy_legs_expected",
                    1.0 - p.gamma_e * kc / (4.0 * g * g),
                ),
            );
        }
        (DeviceKind::Isolator, ConditionSet::DualFrequency) => {
            return Err(Error::InvalidParams(
                "the isolator has no dual-frequency condition set".into(),
            ));
        }
        (DeviceKind::AntisymmetricCirculator, ConditionSet::Resonant) => {
            return Err(Error::InvalidParams(
                "the antisymmetric circulator is only defined by its dual-frequency conditions"
                    .into(),
            ));
        }
        (_, ConditionSet::DualFrequency) => {
            let expected = dual_frequency_params(kind, kc, p.gamma_e)?;
            let fields: &[(&str, f64, f64)] = &[
                ("g_a", p.g_a, expected.g_a),
                ("g_b", p.g_b, expected.g_b),
                ("j_a", p.j_a, expected.j_a),
                ("j_b", p.j_b, expected.j_b),
                ("j_ab", p.j_ab, expected.j_ab),
                ("j_ac", p.j_ac, expected.j_ac),
                ("j_bc", p.j_bc, expected.j_bc),
                ("g_c", p.g_c, expected.g_c),
            ];
            for (name, actual, want) in fields {
                out.push(
                    ConditionReport::new(
                        format!("dual_frequency_{name}"),
                        (actual - want).abs(),
                        tol,
                    )
                    .with("expected", *want),
                );
            }
            let phase = if kind == DeviceKind::SymmetricCirculator {
                p.phi1
            } else {
                p.phi2
            };
            let (report, upper) = quadrature_report("quadrature_phase", phase, tol);
            out.push(report);
            let at_minus = if upper {
                Circulation::Clockwise
            } else {
                Circulation::Counterclockwise
            };
            let at_plus = if kind == DeviceKind::SymmetricCirculator {
                at_minus
            } else {
                at_minus.reversed()
            };
            out.push(circulation_report(
                "circulation_at_minus_kappa",
                kind,
                p,
                -1.0,
                at_minus,
            )?);
            out.push(circulation_report(
                "circulation_at_plus_kappa",
                kind,
                p,
                1.0,
                at_plus,
            )?);
        }
    }
    Ok(out)
}

fn lossy_forward_or_nan(p: &DeviceParams) -> f64 {
    super::lossy_forward_amplitude(p.j_a, p.j_b, p.j_ab, p.kappa_a(), p.gamma_c)
}
