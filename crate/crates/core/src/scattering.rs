//! Frequency-domain scattering by direct linear solves.
//!
//! Sign conventions, fixed for the whole crate:
//! - couplings enter the equations of motion as `-i C x`,
//! - inputs enter with `+sqrt(kappa_p)`,
//! - outputs obey `out = in - sqrt(kappa_p) x`.
//!
//! Fourier transforming the equations of motion gives `A(omega) x = K u` with
//! `A = diag((gamma_m + kappa_m)/2 - i omega) + i C`, and the scattering matrix
//! is `S = I - K^T A^{-1} K`. Entries are indexed `s[dest, src]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::Network;

/// Condition-number bound above which a solve is reported as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    pub frequency: f64,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub frequency: f64,
    pub ports: Vec<String>,
    /// `s[(dest, src)]` multiplies the input at `src`.
    pub s: DMatrix<Complex64>,
}

impl ScatteringMatrix {
    pub fn dim(&self) -> usize {
        self.ports.len()
    }

    pub fn port_index(&self, label: &str) -> Result<usize> {
        self.ports
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownPort(label.to_string()))
    }

    /// Amplitude for a signal entering at `src` and leaving at `dest`.
    pub fn amplitude(&self, src: &str, dest: &str) -> Result<Complex64> {
        Ok(self.s[(self.port_index(dest)?, self.port_index(src)?)])
    }

    pub fn probability(&self, src: &str, dest: &str) -> Result<f64> {
        Ok(self.amplitude(src, dest)?.norm_sqr())
    }

    /// `|s[dest, src]|^2` for every entry.
    pub fn probabilities(&self) -> DMatrix<f64> {
        self.s.map(|z| z.norm_sqr())
    }

    pub fn max_singular_value(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.s.clone().singular_values().max()
    }

    /// `max |(S^dag S - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let gram = self.s.adjoint() * &self.s - DMatrix::<Complex64>::identity(n, n);
        gram.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |S_ij - S_ji|`.
    pub fn reciprocity_defect(&self) -> f64 {
        (&self.s - self.s.transpose())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Builds `A(omega)` over all modes of `net`, in network mode order.
pub fn dynamical_matrix(net: &Network, omega: f64) -> DynamicalMatrix {
    let i = Complex64::i();
    let kappa = net.external_dampings();
    let mut matrix = net.coupling_matrix().map(|c| i * c);
    for (m, mode) in net.modes().iter().enumerate() {
        matrix[(m, m)] = Complex64::new(0.5 * (mode.intrinsic_damping + kappa[m]), -omega);
    }
    DynamicalMatrix {
        frequency: omega,
        matrix,
    }
}

/// Solves for the full scattering matrix at `omega`.
///
/// Only modes connected to a port through active couplings take part: the
/// dynamical matrix is block diagonal over connected components, and
/// components without a port never reach the outputs. This keeps dark,
/// undamped spectator modes (an emitter with all couplings switched off,
/// say) from making an otherwise well-posed solve singular.
pub fn scattering_matrix(net: &Network, omega: f64) -> Result<ScatteringMatrix> {
    let ports = net.port_labels();
    let p = ports.len();
    let active = net.port_connected_modes();
    let n = active.len();

    let full = dynamical_matrix(net, omega).matrix;
    let a = DMatrix::from_fn(n, n, |r, c| full[(active[r], active[c])]);

    // K^{1/2}: sqrt(kappa_p) at (port-mode row, port column)
    let mut k = DMatrix::<Complex64>::zeros(n, p);
    for (col, port) in net.ports().iter().enumerate() {
        let mode = net.mode_index(&port.mode).expect("validated port");
        let row = active
            .binary_search(&mode)
            .expect("port modes are connected to themselves");
        k[(row, col)] = Complex64::new(port.external_damping.sqrt(), 0.0);
    }

    if n > 0 {
        check_conditioning(net, &active, &a, omega)?;
    }

    let x = if n > 0 {
        a.lu().solve(&k).ok_or(Error::SingularAtFrequency {
            omega,
            condition: f64::INFINITY,
            null_vector: Vec::new(),
        })?
    } else {
        DMatrix::zeros(0, p)
    };
    let s = DMatrix::<Complex64>::identity(p, p) - k.transpose() * x;
    Ok(ScatteringMatrix {
        frequency: omega,
        ports,
        s,
    })
}

fn check_conditioning(
    net: &Network,
    active: &[usize],
    a: &DMatrix<Complex64>,
    omega: f64,
) -> Result<()> {
    let sv = a.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition.is_finite() && condition <= CONDITION_LIMIT {
        return Ok(());
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let k = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    // row k of V^H is the conjugated right singular vector
    let mut null_vector = vec![Complex64::new(0.0, 0.0); net.num_modes()];
    for (j, &mode) in active.iter().enumerate() {
        null_vector[mode] = v_t[(k, j)].conj();
    }
    Err(Error::SingularAtFrequency {
        omega,
        condition,
        null_vector,
    })
}

/// `|s[dest, src]|^2` for distinct ports.
pub fn transmission(net: &Network, omega: f64, src: &str, dest: &str) -> Result<f64> {
    net.port_index(src)?;
    net.port_index(dest)?;
    if src == dest {
        return Err(Error::InvalidParams(format!(
            "transmission needs two distinct ports, got `{src}` twice"
        )));
    }
    scattering_matrix(net, omega)?.probability(src, dest)
}

/// `|s[port, port]|^2`.
pub fn reflection(net: &Network, omega: f64, port: &str) -> Result<f64> {
    net.port_index(port)?;
    scattering_matrix(net, omega)?.probability(port, port)
}
