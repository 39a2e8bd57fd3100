//! Coupled-mode network model.
//!
//! A [`Network`] is an immutable graph of modes joined by phase-carrying
//! beam-splitter couplings, with some modes opened to external transmission
//! lines (ports). Everything is expressed in the rotating frame: modes carry no
//! bare frequency, and the solver variable `omega` is the signal detuning.
//! All rates are dimensionless multiples of a reference linewidth `kappa = 1`.
//!
//! Mode order and port order are preserved from construction and define the
//! row/column order of every matrix derived from the network.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Cavity,
    /// Two-level artificial atom, treated as a linear mode in the
    /// single-excitation regime.
    Emitter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub label: String,
    pub kind: ModeKind,
    /// Loss into unobserved channels, in units of kappa.
    #[serde(default)]
    pub intrinsic_damping: f64,
}

impl Mode {
    pub fn cavity(label: impl Into<String>, intrinsic_damping: f64) -> Self {
        Mode {
            label: label.into(),
            kind: ModeKind::Cavity,
            intrinsic_damping,
        }
    }

    pub fn emitter(label: impl Into<String>, intrinsic_damping: f64) -> Self {
        Mode {
            label: label.into(),
            kind: ModeKind::Emitter,
            intrinsic_damping,
        }
    }
}

fn default_active() -> bool {
    true
}

/// Hopping term `magnitude * e^{i phase} x_a^dag x_b + h.c.`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub endpoint_a: String,
    pub endpoint_b: String,
    pub magnitude: f64,
    /// Radians; reduced to `[0, 2pi)` when the network is built.
    #[serde(default)]
    pub phase: f64,
    #[serde(default = "default_active")]
    pub active: bool,
}

impl Coupling {
    pub fn new(
        endpoint_a: impl Into<String>,
        endpoint_b: impl Into<String>,
        magnitude: f64,
    ) -> Self {
        Coupling {
            endpoint_a: endpoint_a.into(),
            endpoint_b: endpoint_b.into(),
            magnitude,
            phase: 0.0,
            active: true,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_active(mut self, active: bool) -> Self {
        self.active = active;
        self
    }

    /// Complex amplitude placed at `[endpoint_a, endpoint_b]`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    fn joins(&self, a: &str, b: &str) -> bool {
        (self.endpoint_a == a && self.endpoint_b == b)
            || (self.endpoint_a == b && self.endpoint_b == a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Port {
    pub mode: String,
    /// Coupling rate to the transmission line, in units of kappa.
    pub external_damping: f64,
}

impl Port {
    pub fn new(mode: impl Into<String>, external_damping: f64) -> Self {
        Port {
            mode: mode.into(),
            external_damping,
        }
    }

    pub fn label(&self) -> &str {
        &self.mode
    }
}

/// Plain serializable description; [`build_network`] turns it into a
/// validated [`Network`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDescription {
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
    #[serde(default)]
    pub ports: Vec<Port>,
}

impl NetworkDescription {
    pub fn build(self) -> Result<Network> {
        build_network(self.modes, self.couplings, self.ports)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NetworkDescription", into = "NetworkDescription")]
pub struct Network {
    modes: Vec<Mode>,
    couplings: Vec<Coupling>,
    ports: Vec<Port>,
    index: HashMap<String, usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.couplings == other.couplings && self.ports == other.ports
    }
}

impl TryFrom<NetworkDescription> for Network {
    type Error = Error;

    fn try_from(desc: NetworkDescription) -> Result<Self> {
        desc.build()
    }
}

impl From<Network> for NetworkDescription {
    fn from(net: Network) -> Self {
        NetworkDescription {
            modes: net.modes,
            couplings: net.couplings,
            ports: net.ports,
        }
    }
}

fn reduce_phase(phase: f64) -> f64 {
    let reduced = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if reduced >= TAU {
        0.0
    } else {
        reduced
    }
}

/// Validates and assembles a network.
///
/// Every invalid input maps to a specific [`Error`]; nothing here panics.
pub fn build_network(
    modes: Vec<Mode>,
    couplings: Vec<Coupling>,
    ports: Vec<Port>,
) -> Result<Network> {
    let mut index = HashMap::with_capacity(modes.len());
    for (i, mode) in modes.iter().enumerate() {
        if index.insert(mode.label.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(mode.label.clone()));
        }
        if !(mode.intrinsic_damping >= 0.0) || !mode.intrinsic_damping.is_finite() {
            return Err(Error::NegativeDamping {
                label: mode.label.clone(),
                value: mode.intrinsic_damping,
            });
        }
    }

    let mut seen_pairs: HashSet<(usize, usize)> = HashSet::with_capacity(couplings.len());
    let mut couplings = couplings;
    for c in couplings.iter_mut() {
        let a = *index
            .get(&c.endpoint_a)
            .ok_or_else(|| Error::UnknownEndpoint(c.endpoint_a.clone()))?;
        let b = *index
            .get(&c.endpoint_b)
            .ok_or_else(|| Error::UnknownEndpoint(c.endpoint_b.clone()))?;
        let invalid = |reason: &str| Error::InvalidCoupling {
            endpoint_a: c.endpoint_a.clone(),
            endpoint_b: c.endpoint_b.clone(),
            reason: reason.to_string(),
        };
        if a == b {
            return Err(invalid("a mode cannot couple to itself"));
        }
        if !(c.magnitude >= 0.0) || !c.magnitude.is_finite() {
            return Err(invalid("magnitude must be finite and nonnegative"));
        }
        if !c.phase.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        if !seen_pairs.insert((a.min(b), a.max(b))) {
            return Err(Error::DuplicatePair(
                c.endpoint_a.clone(),
                c.endpoint_b.clone(),
            ));
        }
        c.phase = reduce_phase(c.phase);
    }

    let mut port_modes = HashSet::with_capacity(ports.len());
    for p in &ports {
        if !index.contains_key(&p.mode) {
            return Err(Error::UnknownEndpoint(p.mode.clone()));
        }
        if !(p.external_damping > 0.0) || !p.external_damping.is_finite() {
            return Err(Error::InvalidPort {
                mode: p.mode.clone(),
                reason: format!(
                    "external damping must be positive, got {}",
                    p.external_damping
                ),
            });
        }
        if !port_modes.insert(p.mode.as_str()) {
            return Err(Error::InvalidPort {
                mode: p.mode.clone(),
                reason: "mode already carries a port".to_string(),
            });
        }
    }

    Ok(Network {
        modes,
        couplings,
        ports,
        index,
    })
}

impl Network {
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn ports(&self) -> &[Port] {
        &self.ports
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn num_ports(&self) -> usize {
        self.ports.len()
    }

    pub fn port_labels(&self) -> Vec<String> {
        self.ports.iter().map(|p| p.mode.clone()).collect()
    }

    pub fn mode_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn port_index(&self, label: &str) -> Result<usize> {
        self.ports
            .iter()
            .position(|p| p.mode == label)
            .ok_or_else(|| Error::UnknownPort(label.to_string()))
    }

    pub fn coupling(&self, a: &str, b: &str) -> Option<&Coupling> {
        self.couplings.iter().find(|c| c.joins(a, b))
    }

    /// External damping per mode, zero for modes without a port.
    pub fn external_dampings(&self) -> Vec<f64> {
        let mut kappa = vec![0.0; self.modes.len()];
        for p in &self.ports {
            kappa[self.index[&p.mode]] = p.external_damping;
        }
        kappa
    }

    pub fn description(&self) -> NetworkDescription {
        self.clone().into()
    }

    /// Hermitian coupling matrix: each active coupling places its amplitude at
    /// `[a, b]` and the conjugate at `[b, a]`. The diagonal is zero because
    /// detunings are carried by `omega`.
    pub fn coupling_matrix(&self) -> DMatrix<Complex64> {
        let n = self.modes.len();
        let mut c = DMatrix::zeros(n, n);
        for coupling in self.couplings.iter().filter(|c| c.active) {
            let a = self.index[&coupling.endpoint_a];
            let b = self.index[&coupling.endpoint_b];
            let amp = coupling.amplitude();
            c[(a, b)] = amp;
            c[(b, a)] = amp.conj();
        }
        c
    }

    /// Indices (ascending) of modes reachable from some port through active,
    /// nonzero couplings. Modes outside this set cannot influence the
    /// scattering matrix.
    pub fn port_connected_modes(&self) -> Vec<usize> {
        let n = self.modes.len();
        let mut adjacency = vec![Vec::new(); n];
        for c in self
            .couplings
            .iter()
            .filter(|c| c.active && c.magnitude != 0.0)
        {
            let a = self.index[&c.endpoint_a];
            let b = self.index[&c.endpoint_b];
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut reached = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for p in &self.ports {
            let i = self.index[&p.mode];
            if !reached[i] {
                reached[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !reached[j] {
                    reached[j] = true;
                    queue.push_back(j);
                }
            }
        }
        (0..n).filter(|&i| reached[i]).collect()
    }

    /// Copy with the `a`-`b` coupling switched on or off.
    pub fn with_coupling_active(&self, a: &str, b: &str, active: bool) -> Result<Network> {
        for label in [a, b] {
            if !self.index.contains_key(label) {
                return Err(Error::UnknownEndpoint(label.to_string()));
            }
        }
        let mut net = self.clone();
        let coupling = net
            .couplings
            .iter_mut()
            .find(|c| c.joins(a, b))
            .ok_or_else(|| Error::InvalidCoupling {
                endpoint_a: a.to_string(),
                endpoint_b: b.to_string(),
                reason: "no such coupling".to_string(),
            })?;
        coupling.active = active;
        Ok(net)
    }

    /// Keeps only the listed ports, drops inactive couplings, and prunes every
    /// mode no longer connected to a remaining port. Relative order of modes,
    /// couplings and ports is preserved.
    pub fn restrict_ports(&self, keep: &[&str]) -> Result<Network> {
        for label in keep {
            self.port_index(label)?;
        }
        let ports: Vec<Port> = self
            .ports
            .iter()
            .filter(|p| keep.contains(&p.mode.as_str()))
            .cloned()
            .collect();
        let couplings: Vec<Coupling> = self
            .couplings
            .iter()
            .filter(|c| c.active)
            .cloned()
            .collect();
        let staged = build_network(self.modes.clone(), couplings, ports)?;
        let connected: HashSet<usize> = staged.port_connected_modes().into_iter().collect();
        let modes: Vec<Mode> = staged
            .modes
            .iter()
            .enumerate()
            .filter(|(i, _)| connected.contains(i))
            .map(|(_, m)| m.clone())
            .collect();
        let kept: HashSet<&str> = modes.iter().map(|m| m.label.as_str()).collect();
        let couplings = staged
            .couplings
            .iter()
            .filter(|c| {
                kept.contains(c.endpoint_a.as_str()) && kept.contains(c.endpoint_b.as_str())
            })
            .cloned()
            .collect();
        build_network(modes, couplings, staged.ports.clone())
    }
}
