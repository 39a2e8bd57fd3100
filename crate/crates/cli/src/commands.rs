//! The subcommands, as functions from a [`RunConfig`] to output text.

use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64;

use nonrecip::analysis::{classify_symmetry, sweep_with, symmetry_residuals, SpectralSymmetry};
use nonrecip::device::{
    analytic_s1, analytic_s2, analytic_s3, build_device, evaluate_conditions,
    isolator_suppression_coupling, lossy_forward_amplitude, DeviceKind, A2, B2,
};
use nonrecip::exec::map_indexed;
use nonrecip::{scattering_matrix, Error, Execution, ScatteringMatrix};

use crate::config::{OutputKind, RunConfig, Source};
use crate::format::{cell, num, row};

/// Entries smaller than this are compared absolutely rather than relatively
/// in `compare` tables: a relative error on an amplitude that is zero up to
/// rounding carries no information.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-3;

/// Text produced by a command. `ok` is false when the command ran but its
/// check failed (unsatisfied condition, comparison above tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub ok: bool,
    /// One-line summary meant for stderr.
    pub summary: Option<String>,
}

impl Output {
    fn data(text: String) -> Self {
        Output {
            text,
            ok: true,
            summary: None,
        }
    }
}

fn header(command: &str, cfg: &RunConfig) -> String {
    let g = cfg.grid;
    header_with(
        command,
        cfg,
        &format!("grid={},{},{}", g.start, g.stop, g.points),
    )
}

fn header_with(command: &str, cfg: &RunConfig, extent: &str) -> String {
    let mut line = format!(
        "# nonrecip {} {command} {}",
        env!("CARGO_PKG_VERSION"),
        cfg.source_label()
    );
    if cfg.device().is_some() {
        line.push_str(&format!(" derive={}", cfg.derive));
    }
    line.push_str(&format!(" {extent}\n"));
    line
}

fn device_or_bail(
    cfg: &RunConfig,
    command: &str,
) -> anyhow::Result<(DeviceKind, nonrecip::device::DeviceParams)> {
    match &cfg.source {
        Source::Device { kind, params } => Ok((*kind, params.clone())),
        Source::Network(_) => {
            bail!("`{command}` needs a `device` configuration, not a raw `network`")
        }
    }
}

/// Transmission and reflection probabilities over the grid.
pub fn spectrum(cfg: &RunConfig, exec: Execution) -> anyhow::Result<Output> {
    let net = cfg.network()?;
    let spec = sweep_with(&net, cfg.grid, exec)?;
    let ports = &spec.ports;
    let mut columns = vec!["omega".to_string()];
    let mut index = Vec::new();
    for (s, src) in ports.iter().enumerate() {
        for (d, dest) in ports.iter().enumerate() {
            if s != d {
                columns.push(format!("T_{src}_{dest}"));
                index.push((d, s));
            }
        }
    }
    for (p, port) in ports.iter().enumerate() {
        columns.push(format!("R_{port}"));
        index.push((p, p));
    }
    let mut text = header("sweep", cfg);
    text.push_str(&row(&columns));
    for point in &spec.points {
        let mut cells = vec![num(point.omega)];
        cells.extend(
            index
                .iter()
                .map(|&ij| cell(point.probabilities.as_ref().map(|m| m[ij]))),
        );
        text.push_str(&row(cells));
    }
    let gaps = spec.gap_count();
    Ok(Output {
        text,
        ok: true,
        summary: (gaps > 0).then(|| format!("{gaps} singular grid points left blank")),
    })
}

/// Condition reports as `key=value` lines.
pub fn check(cfg: &RunConfig) -> anyhow::Result<Output> {
    let (kind, params) = device_or_bail(cfg, "check")?;
    let reports = evaluate_conditions(kind, &params, cfg.condition_set, cfg.tolerances.conditions)?;
    let mut text = header("check", cfg);
    let mut failed = Vec::new();
    for r in &reports {
        text.push_str(&format!("{}.satisfied={}\n", r.name, r.satisfied));
        text.push_str(&format!("{}.residual={}\n", r.name, num(r.residual)));
        text.push_str(&format!("{}.tolerance={}\n", r.name, num(r.tolerance)));
        for (k, v) in &r.derived {
            text.push_str(&format!("{}.{}={}\n", r.name, k, num(*v)));
        }
        if !r.satisfied {
            failed.push(r.name.as_str());
        }
    }
    let ok = failed.is_empty();
    text.push_str(&format!("all_satisfied={ok}\n"));
    Ok(Output {
        text,
        ok,
        summary: (!ok).then(|| format!("unsatisfied: {}", failed.join(", "))),
    })
}

fn analytic(
    kind: DeviceKind,
    p: &nonrecip::device::DeviceParams,
    omega: f64,
) -> nonrecip::Result<ScatteringMatrix> {
    match kind {
        DeviceKind::Isolator => analytic_s1(p, omega),
        DeviceKind::SymmetricCirculator => analytic_s2(p, omega),
        DeviceKind::AntisymmetricCirculator => analytic_s3(p, omega),
    }
}

fn singular_as_none(
    r: nonrecip::Result<ScatteringMatrix>,
) -> anyhow::Result<Option<ScatteringMatrix>> {
    match r {
        Ok(s) => Ok(Some(s)),
        Err(Error::SingularAtFrequency { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `|a - g| / max(|g|, RELATIVE_ERROR_FLOOR)`.
pub fn relative_error(generic: Complex64, analytic: Complex64) -> f64 {
    (analytic - generic).norm() / generic.norm().max(RELATIVE_ERROR_FLOOR)
}

/// Closed-form against generic scattering matrices, entry by entry.
pub fn compare(cfg: &RunConfig, exec: Execution) -> anyhow::Result<Output> {
    let (kind, params) = device_or_bail(cfg, "compare")?;
    let net = build_device(kind, &params)?;
    let omegas = cfg.grid.omegas();
    let pairs = map_indexed(omegas.len(), exec, |i| {
        let omega = omegas[i];
        Ok::<_, anyhow::Error>((
            singular_as_none(scattering_matrix(&net, omega))?,
            singular_as_none(analytic(kind, &params, omega))?,
        ))
    });
    let ports = kind.port_labels();
    let mut text = header("compare", cfg);
    text.push_str(&row([
        "omega",
        "entry",
        "generic_re",
        "generic_im",
        "analytic_re",
        "analytic_im",
        "rel_err",
    ]));
    let mut max_err = 0.0f64;
    let mut skipped = 0usize;
    for (omega, pair) in omegas.iter().zip(pairs) {
        let (generic, closed) = pair?;
        if generic.is_none() || closed.is_none() {
            skipped += 1;
        }
        for (d, dest) in ports.iter().enumerate() {
            for (s, src) in ports.iter().enumerate() {
                let g = generic.as_ref().map(|m| m.s[(d, s)]);
                let a = closed.as_ref().map(|m| m.s[(d, s)]);
                let err = g.zip(a).map(|(g, a)| relative_error(g, a));
                if let Some(e) = err {
                    max_err = max_err.max(e);
                }
                text.push_str(&row([
                    num(*omega),
                    format!("S_{dest}_{src}"),
                    cell(g.map(|z| z.re)),
                    cell(g.map(|z| z.im)),
                    cell(a.map(|z| z.re)),
                    cell(a.map(|z| z.im)),
                    cell(err),
                ]));
            }
        }
    }
    let ok = max_err <= cfg.tolerances.compare;
    let mut summary = format!(
        "max rel_err={} tolerance={}",
        num(max_err),
        num(cfg.tolerances.compare)
    );
    if skipped > 0 {
        summary.push_str(&format!(" ({skipped} singular frequencies skipped)"));
    }
    Ok(Output {
        text,
        ok,
        summary: Some(summary),
    })
}

/// The network description as JSON.
pub fn device(cfg: &RunConfig) -> anyhow::Result<Output> {
    let net = cfg.network()?;
    let mut text = serde_json::to_string_pretty(&net.description())?;
    text.push('\n');
    Ok(Output::data(text))
}

fn symmetry_name(s: SpectralSymmetry) -> &'static str {
    match s {
        SpectralSymmetry::SymmetricInOmega => "symmetric_in_omega",
        SpectralSymmetry::AntisymmetricSwap => "antisymmetric_swap",
        SpectralSymmetry::Neither => "neither",
    }
}

/// Classification of the spectrum under `omega -> -omega`.
pub fn symmetry(cfg: &RunConfig, exec: Execution) -> anyhow::Result<Output> {
    let spec = sweep_with(&cfg.network()?, cfg.grid, exec)?;
    let tol = cfg.tolerances.symmetry;
    let class = classify_symmetry(&spec, tol)?;
    let res = symmetry_residuals(&spec)?;
    let mut text = header("symmetry", cfg);
    text.push_str(&format!("classification={}\n", symmetry_name(class)));
    text.push_str(&format!("residual_symmetric={}\n", num(res.symmetric)));
    text.push_str(&format!("residual_swap={}\n", num(res.swap)));
    text.push_str(&format!("tolerance={}\n", num(tol)));
    text.push_str(&format!("gaps={}\n", spec.gap_count()));
    Ok(Output::data(text))
}

/// Isolator transmissions over a two-parameter map at a fixed frequency.
pub fn scan(cfg: &RunConfig, exec: Execution) -> anyhow::Result<Output> {
    let Some(spec) = cfg.scan else {
        bail!("`scan` needs a `scan` block in the configuration");
    };
    let (kind, base) = device_or_bail(cfg, "scan")?;
    if kind != DeviceKind::Isolator {
        bail!("`scan` is only defined for the isolator");
    }
    let xs = spec.x.values()?;
    let ys = spec.y.values()?;
    let equal_ports = base.kappa_a() == base.kappa_b();
    let with_closed_form = spec.rederive_g && equal_ports;
    let rows = map_indexed(xs.len() * ys.len(), exec, |k| -> anyhow::Result<String> {
        let (x, y) = (xs[k / ys.len()], ys[k % ys.len()]);
        let mut p = base.clone();
        spec.x.param.set(&mut p, x);
        spec.y.param.set(&mut p, y);
        if spec.rederive_g {
            let g = isolator_suppression_coupling(p.j_a, p.j_b, p.j_ab, p.gamma_e, p.gamma_c)?;
            p.g_a = g;
            p.g_b = g;
        }
        let s = scattering_matrix(&build_device(kind, &p)?, spec.omega)?;
        let mut cells = vec![
            num(x),
            num(y),
            num(s.probability(A2, B2)?),
            num(s.probability(B2, A2)?),
        ];
        if with_closed_form {
            let t = lossy_forward_amplitude(p.j_a, p.j_b, p.j_ab, p.kappa_a(), p.gamma_c);
            cells.push(num(t * t));
        }
        Ok(row(cells))
    });
    let axis = |a: &crate::config::ScanAxis| {
        format!("{}={},{},{}", a.param.name(), a.start, a.stop, a.points)
    };
    let mut text = header_with(
        "scan",
        cfg,
        &format!("{} {} omega={}", axis(&spec.x), axis(&spec.y), spec.omega),
    );
    let mut columns = vec![
        spec.x.param.name(),
        spec.y.param.name(),
        "T_a2_b2",
        "T_b2_a2",
    ];
    if with_closed_form {
        columns.push("T_forward_closed_form");
    }
    text.push_str(&row(columns));
    for r in rows {
        text.push_str(&r?);
    }
    Ok(Output::data(text))
}

pub fn produce(kind: OutputKind, cfg: &RunConfig, exec: Execution) -> anyhow::Result<Output> {
    match kind {
        OutputKind::Spectrum => spectrum(cfg, exec),
        OutputKind::Conditions => check(cfg),
        OutputKind::Compare => compare(cfg, exec),
        OutputKind::Symmetry => symmetry(cfg, exec),
        OutputKind::Scan => scan(cfg, exec),
        OutputKind::Device => device(cfg),
    }
}

/// Outputs requested by `cfg`, defaulting to the spectrum (or the scan when
/// one is configured).
pub fn requested_outputs(cfg: &RunConfig) -> Vec<OutputKind> {
    if !cfg.outputs.is_empty() {
        cfg.outputs.clone()
    } else if cfg.scan.is_some() {
        vec![OutputKind::Scan]
    } else {
        vec![OutputKind::Spectrum]
    }
}

/// Writes every requested output into `dir`, one file each.
pub fn run(
    cfg: &RunConfig,
    dir: &Path,
    exec: Execution,
) -> anyhow::Result<Vec<(OutputKind, Output)>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut done = Vec::new();
    for kind in requested_outputs(cfg) {
        let out =
            produce(kind, cfg, exec).with_context(|| format!("producing {}", kind.file_name()))?;
        let path = dir.join(kind.file_name());
        std::fs::write(&path, &out.text).with_context(|| format!("writing {}", path.display()))?;
        done.push((kind, out));
    }
    Ok(done)
}
