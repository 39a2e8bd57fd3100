//! The three preset devices and the switchable superset that hosts them.
//!
//! All three share the same core: two rails of cavities (`a1-a2`, `b1-b2`)
//! whose port cavities `a2`, `b2` both couple to an artificial atom `sigma`.
//!
//! - [`DeviceKind::Isolator`] closes the loop with a phased `a1-b1` link.
//! - [`DeviceKind::SymmetricCirculator`] adds an auxiliary port cavity `c2`
//!   coupled only to `sigma`.
//! - [`DeviceKind::AntisymmetricCirculator`] replaces the `a1-b1` link with a
//!   transition cavity `c1` (`a1-c1`, `b1-c1` phased) and keeps `c2`.

mod closed_form;
mod conditions;

pub use closed_form::{
    analytic_s1, analytic_s2, analytic_s3, isolation_ratio_closed_form, lossy_forward_amplitude,
    optimal_forward_amplitude, ClosedFormContext,
};
pub use conditions::{
    dual_frequency_params, evaluate_conditions, isolator_conditions, isolator_suppression_coupling,
    symmetric_circulator_conditions, Circulation, ConditionReport, ConditionSet,
    IsolationDirection, SUPPRESSION_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{build_network, Coupling, Mode, Network, Port};

pub const A1: &str = "a1";
pub const A2: &str = "a2";
pub const B1: &str = "b1";
pub const B2: &str = "b2";
pub const C1: &str = "c1";
pub const C2: &str = "c2";
pub const SIGMA: &str = "sigma";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKind {
    Isolator,
    SymmetricCirculator,
    AntisymmetricCirculator,
}

impl DeviceKind {
    pub const ALL: [DeviceKind; 3] = [
        DeviceKind::Isolator,
        DeviceKind::SymmetricCirculator,
        DeviceKind::AntisymmetricCirculator,
    ];

    pub fn num_ports(self) -> usize {
        match self {
            DeviceKind::Isolator => 2,
            _ => 3,
        }
    }

    pub fn port_labels(self) -> &'static [&'static str] {
        match self {
            DeviceKind::Isolator => &[A2, B2],
            _ => &[A2, B2, C2],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DeviceKind::Isolator => "isolator",
            DeviceKind::SymmetricCirculator => "symmetric_circulator",
            DeviceKind::AntisymmetricCirculator => "antisymmetric_circulator",
        }
    }
}

/// Parameter bundle shared by all three devices. Rates are in units of kappa,
/// phases in radians. Only the fields a device uses may be nonzero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceParams {
    pub j_a: f64,
    pub j_b: f64,
    pub j_ab: f64,
    pub j_ac: f64,
    pub j_bc: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub g_c: f64,
    /// Loop phase on `a1-b1`.
    pub phi1: f64,
    /// Loop phase on `b1-c1`.
    pub phi2: f64,
    /// Intrinsic damping of every cavity.
    pub gamma_c: f64,
    /// Intrinsic damping of the atom.
    pub gamma_e: f64,
    /// External damping per port, in port order `a2, b2[, c2]`.
    pub kappa: Vec<f64>,
}

impl DeviceParams {
    pub fn kappa_a(&self) -> f64 {
        self.kappa.first().copied().unwrap_or(0.0)
    }

    pub fn kappa_b(&self) -> f64 {
        self.kappa.get(1).copied().unwrap_or(0.0)
    }

    pub fn kappa_c(&self) -> f64 {
        self.kappa.get(2).copied().unwrap_or(0.0)
    }

    /// Checks that `self` is a well-formed parameter set for `kind`.
    pub fn validate(&self, kind: DeviceKind) -> Result<()> {
        self.validate_values(kind.num_ports())?;
        let unused: &[(&str, f64)] = match kind {
            DeviceKind::Isolator => &[
                ("j_ac", self.j_ac),
                ("j_bc", self.j_bc),
                ("g_c", self.g_c),
                ("phi2", self.phi2),
            ],
            DeviceKind::SymmetricCirculator => &[
                ("j_ac", self.j_ac),
                ("j_bc", self.j_bc),
                ("phi2", self.phi2),
            ],
            DeviceKind::AntisymmetricCirculator => &[("j_ab", self.j_ab), ("phi1", self.phi1)],
        };
        if let Some((name, _)) = unused.iter().find(|(_, v)| *v != 0.0) {
            return Err(Error::InvalidParams(format!(
                "`{name}` is not used by the {} and must be zero",
                kind.name()
            )));
        }
        Ok(())
    }

    fn validate_values(&self, ports: usize) -> Result<()> {
        let rates = [
            ("j_a", self.j_a),
            ("j_b", self.j_b),
            ("j_ab", self.j_ab),
            ("j_ac", self.j_ac),
            ("j_bc", self.j_bc),
            ("g_a", self.g_a),
            ("g_b", self.g_b),
            ("g_c", self.g_c),
            ("gamma_c", self.gamma_c),
            ("gamma_e", self.gamma_e),
        ];
        for (name, v) in rates {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "`{name}` must be finite and nonnegative, got {v}"
                )));
            }
        }
        for (name, v) in [("phi1", self.phi1), ("phi2", self.phi2)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("`{name}` must be finite")));
            }
        }
        if self.kappa.len() != ports {
            return Err(Error::InvalidParams(format!(
                "expected {ports} port dampings, got {}",
                self.kappa.len()
            )));
        }
        if let Some(k) = self.kappa.iter().find(|k| !(**k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "port dampings must be positive, got {k}"
            )));
        }
        Ok(())
    }
}

fn modes(p: &DeviceParams, with_c2: bool, with_c1: bool) -> Vec<Mode> {
    let mut modes = vec![
        Mode::cavity(A1, p.gamma_c),
        Mode::cavity(A2, p.gamma_c),
        Mode::cavity(B1, p.gamma_c),
        Mode::cavity(B2, p.gamma_c),
        Mode::emitter(SIGMA, p.gamma_e),
    ];
    if with_c2 {
        modes.push(Mode::cavity(C2, p.gamma_c));
    }
    if with_c1 {
        modes.push(Mode::cavity(C1, p.gamma_c));
    }
    modes
}

fn ports(p: &DeviceParams, n: usize) -> Vec<Port> {
    [A2, B2, C2]
        .iter()
        .zip(&p.kappa)
        .take(n)
        .map(|(m, k)| Port::new(*m, *k))
        .collect()
}

/// Builds the network for one of the preset devices.
pub fn build_device(kind: DeviceKind, p: &DeviceParams) -> Result<Network> {
    p.validate(kind)?;
    let mut couplings = vec![
        Coupling::new(A1, A2, p.j_a),
        Coupling::new(B1, B2, p.j_b),
        Coupling::new(A2, SIGMA, p.g_a),
        Coupling::new(B2, SIGMA, p.g_b),
    ];
    let net = match kind {
        DeviceKind::Isolator => {
            couplings.push(Coupling::new(A1, B1, p.j_ab).with_phase(p.phi1));
            build_network(modes(p, false, false), couplings, ports(p, 2))
        }
        DeviceKind::SymmetricCirculator => {
            couplings.push(Coupling::new(A1, B1, p.j_ab).with_phase(p.phi1));
            couplings.push(Coupling::new(C2, SIGMA, p.g_c));
            build_network(modes(p, true, false), couplings, ports(p, 3))
        }
        DeviceKind::AntisymmetricCirculator => {
            couplings.push(Coupling::new(C2, SIGMA, p.g_c));
            couplings.push(Coupling::new(A1, C1, p.j_ac));
            couplings.push(Coupling::new(B1, C1, p.j_bc).with_phase(p.phi2));
            build_network(modes(p, true, true), couplings, ports(p, 3))
        }
    }?;
    Ok(net)
}

/// One physical circuit carrying every coupling of all three devices. Each
/// function is selected by switching couplings on and off, never by rewiring.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifunctionalDevice {
    network: Network,
}

impl MultifunctionalDevice {
    /// `p` may populate every field; `kappa` must list three port dampings.
    pub fn new(p: &DeviceParams) -> Result<Self> {
        p.validate_values(3)?;
        let couplings = vec![
            Coupling::new(A1, A2, p.j_a),
            Coupling::new(B1, B2, p.j_b),
            Coupling::new(A2, SIGMA, p.g_a),
            Coupling::new(B2, SIGMA, p.g_b),
            Coupling::new(A1, B1, p.j_ab).with_phase(p.phi1),
            Coupling::new(C2, SIGMA, p.g_c),
            Coupling::new(A1, C1, p.j_ac),
            Coupling::new(B1, C1, p.j_bc).with_phase(p.phi2),
        ];
        let network = build_network(modes(p, true, true), couplings, ports(p, 3))?;
        Ok(MultifunctionalDevice { network })
    }

    /// Superset network with the couplings of `kind` switched on and the rest
    /// switched off. All three ports stay attached; for the isolator, `c2`
    /// then only reflects.
    pub fn configure(&self, kind: DeviceKind) -> Result<Network> {
        let (a1b1, c2s, c1) = match kind {
            DeviceKind::Isolator => (true, false, false),
            DeviceKind::SymmetricCirculator => (true, true, false),
            DeviceKind::AntisymmetricCirculator => (false, true, true),
        };
        self.network
            .with_coupling_active(A1, B1, a1b1)?
            .with_coupling_active(C2, SIGMA, c2s)?
            .with_coupling_active(A1, C1, c1)?
            .with_coupling_active(B1, C1, c1)
    }

    /// [`Self::configure`] followed by dropping unused ports and the modes
    /// they leave disconnected.
    pub fn device(&self, kind: DeviceKind) -> Result<Network> {
        self.configure(kind)?.restrict_ports(kind.port_labels())
    }

    pub fn network(&self) -> &Network {
        &self.network
    }
}

/// Restricts a full parameter bundle to the fields `kind` reads.
pub fn params_for(kind: DeviceKind, p: &DeviceParams) -> DeviceParams {
    let mut q = p.clone();
    match kind {
        DeviceKind::Isolator => {
            q.j_ac = 0.0;
            q.j_bc = 0.0;
            q.g_c = 0.0;
            q.phi2 = 0.0;
            q.kappa.truncate(2);
        }
        DeviceKind::SymmetricCirculator => {
            q.j_ac = 0.0;
            q.j_bc = 0.0;
            q.phi2 = 0.0;
        }
        DeviceKind::AntisymmetricCirculator => {
            q.j_ab = 0.0;
            q.phi1 = 0.0;
        }
    }
    q
}
