use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::network::Network;
use crate::scattering::scattering_matrix;

/// Uniform grid of `points` frequencies from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        let grid = FrequencyGrid {
            start,
            stop,
            points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidGrid("grid ends must be finite".into()));
        }
        if self.start >= self.stop {
            return Err(Error::InvalidGrid(format!(
                "start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    /// Grid frequencies in ascending order. On a grid with `start == -stop`
    /// the values come in exact negation pairs and the middle point of an odd
    /// grid is exactly zero.
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.points - 1;
        let d = n as f64;
        (0..=n)
            .map(|i| (self.start * (n - i) as f64 + self.stop * i as f64) / d)
            .collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.start == -self.stop
    }
}

/// All scattering probabilities at one frequency. `None` marks a frequency
/// where the solve was singular.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    /// `|s[dest, src]|^2`, indexed like the scattering matrix.
    pub probabilities: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: FrequencyGrid,
    pub ports: Vec<String>,
    /// One per grid point, ascending in `omega`; empty when the network has
    /// no ports.
    pub points: Vec<SpectrumPoint>,
}

impl Spectrum {
    pub fn port_index(&self, label: &str) -> Result<usize> {
        self.ports
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownPort(label.to_string()))
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.omega).collect()
    }

    /// Probability from `src` to `dest` at every grid point, `None` at gaps.
    /// `src == dest` gives the reflection.
    pub fn curve(&self, src: &str, dest: &str) -> Result<Vec<Option<f64>>> {
        let (s, d) = (self.port_index(src)?, self.port_index(dest)?);
        Ok(self
            .points
            .iter()
            .map(|p| p.probabilities.as_ref().map(|m| m[(d, s)]))
            .collect())
    }

    pub fn gap_count(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.probabilities.is_none())
            .count()
    }

    /// Largest probability anywhere in the spectrum.
    pub fn max_probability(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.probabilities.as_ref())
            .flat_map(|m| m.iter().copied())
            .fold(0.0, f64::max)
    }
}

/// Scattering probabilities at each of `omegas`, in the order given.
pub fn sweep_points(net: &Network, omegas: &[f64], exec: Execution) -> Result<Vec<SpectrumPoint>> {
    if net.num_ports() == 0 {
        return Ok(Vec::new());
    }
    map_slice(omegas, exec, |&omega| match scattering_matrix(net, omega) {
        Ok(s) => Ok(SpectrumPoint {
            omega,
            probabilities: Some(s.probabilities()),
        }),
        Err(Error::SingularAtFrequency { .. }) => Ok(SpectrumPoint {
            omega,
            probabilities: None,
        }),
        Err(e) => Err(e),
    })
    .into_iter()
    .collect()
}

pub fn sweep_with(net: &Network, grid: FrequencyGrid, exec: Execution) -> Result<Spectrum> {
    grid.validate()?;
    let points = sweep_points(net, &grid.omegas(), exec)?;
    Ok(Spectrum {
        grid,
        ports: net.port_labels(),
        points,
    })
}

/// [`sweep_with`] using the default execution policy.
pub fn sweep(net: &Network, grid: FrequencyGrid) -> Result<Spectrum> {
    sweep_with(net, grid, Execution::default())
}
