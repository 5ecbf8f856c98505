//! Command-line front end.
//!
//! Inputs are JSON: either a bare [`ArrayConfig`] or a [`RunManifest`] that
//! wraps one with profile and sweep lists. Flags override manifest fields.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, Shift};
use crate::gaussian::{self, apply_loss, covariance_at, CovarianceMatrix, Route};
use crate::io::{self, VlfRow};
use crate::model::{self, ArrayConfig, PumpProfile};
use crate::propagate;
use crate::witness::{self, full_inseparability_check, partition_mode_sets};

pub const FIGURE2_MANIFEST: &str = include_str!("../../../manifests/fig2.json");
pub const FIGURE3_MANIFEST: &str = include_str!("../../../manifests/fig3.json");
pub const FIGURE4_MANIFEST: &str = include_str!("../../../manifests/fig4.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Covariance,
    VlfSweep,
    Verify,
    Figure(u8),
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Covariance => f.write_str("covariance"),
            Command::VlfSweep => f.write_str("vlf-sweep"),
            Command::Verify => f.write_str("verify"),
            Command::Figure(k) => write!(f, "figure-{k}"),
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "covariance" => Ok(Command::Covariance),
            "vlf-sweep" => Ok(Command::VlfSweep),
            "verify" => Ok(Command::Verify),
            "figure-2" => Ok(Command::Figure(2)),
            "figure-3" => Ok(Command::Figure(3)),
            "figure-4" => Ok(Command::Figure(4)),
            _ => Err(Error::InvalidArgument(format!("unknown command {s:?}"))),
        }
    }
}

impl Serialize for Command {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Command {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub config: ArrayConfig,
    /// Profile specs as accepted by `--profile`. Empty means `config.pump`.
    #[serde(default)]
    pub profiles: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_modes_sweep: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_sweep_per_mm: Option<Vec<f64>>,
    /// Propagation distance for `covariance`; defaults to `config.z_max_mm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_mm: Option<f64>,
    #[serde(default)]
    pub route: Route,
    pub output_dir: PathBuf,
}

impl RunManifest {
    pub fn new(command: Command, config: ArrayConfig, output_dir: impl Into<PathBuf>) -> Self {
        RunManifest {
            command,
            config,
            profiles: Vec::new(),
            n_modes_sweep: None,
            coupling_sweep_per_mm: None,
            z_mm: None,
            route: Route::Auto,
            output_dir: output_dir.into(),
        }
    }

    pub fn figure(k: u8) -> Result<Self> {
        let text = match k {
            2 => FIGURE2_MANIFEST,
            3 => FIGURE3_MANIFEST,
            4 => FIGURE4_MANIFEST,
            _ => return Err(Error::InvalidArgument(format!("no figure {k}; expected 2, 3 or 4"))),
        };
        Ok(serde_json::from_str(text)?)
    }
}

/// Reads a manifest, or wraps a bare config in one for `command`.
pub fn load_manifest(path: &Path, command: Command) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let mut manifest = if value.get("config").is_some() {
        serde_json::from_value::<RunManifest>(value)?
    } else {
        RunManifest::new(command, serde_json::from_value(value)?, "out")
    };
    // custom profile files are resolved relative to the manifest
    let base = path.parent().unwrap_or(Path::new("."));
    for spec in &mut manifest.profiles {
        if let Some(file) = spec.strip_prefix("custom:") {
            let p = Path::new(file);
            if p.is_relative() {
                *spec = format!("custom:{}", base.join(p).display());
            }
        }
    }
    Ok(manifest)
}

/// `r0 | rN2 | rN4 | general:<r> | custom:<file>`. A custom file holds a JSON
/// array of phases in radians, or `{"phases_rad": [...]}`.
pub fn parse_profile(spec: &str) -> Result<PumpProfile> {
    let Some(file) = spec.strip_prefix("custom:") else {
        return spec.parse();
    };
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(file)?)?;
    let phases = value.get("phases_rad").cloned().unwrap_or(value);
    Ok(PumpProfile::Custom {
        phases_rad: serde_json::from_value(phases)?,
    })
}

#[derive(Debug, Parser)]
#[command(name = "circarray", version, about = "SPDC Gaussian states in circular waveguide arrays")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Covariance matrix at z (default z_max) for each requested profile.
    Covariance(RunArgs),
    /// VLF values of the odd and even chains over the z grid.
    VlfSweep(RunArgs),
    /// Invariant suite; exits nonzero on any failure.
    Verify(RunArgs),
    /// Reproduce the data behind figure 2, 3 or 4.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(2..=4))]
        number: u8,
        #[command(flatten)]
        args: RunArgs,
    },
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// JSON config or run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// r0 | rN2 | rN4 | general:<r> | custom:<file>; repeatable.
    #[arg(long = "profile")]
    pub profiles: Vec<String>,
    /// Uniform transmittance T in [0, 1].
    #[arg(long)]
    pub loss: Option<f64>,
    /// Force the matrix-exponential path.
    #[arg(long, conflicts_with = "analytic")]
    pub oracle: bool,
    /// Force closed forms.
    #[arg(long)]
    pub analytic: bool,
    /// Propagation distance in mm for `covariance`.
    #[arg(long)]
    pub z: Option<f64>,
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    /// Human-readable report lines.
    pub lines: Vec<String>,
    pub success: bool,
}

fn resolve(command: Command, base: Option<RunManifest>, args: &RunArgs) -> Result<RunManifest> {
    let mut m = match (&args.config, base) {
        (Some(path), _) => load_manifest(path, command)?,
        (None, Some(m)) => m,
        (None, None) => {
            return Err(Error::InvalidArgument(format!("{command} needs --config <path>")));
        }
    };
    m.command = command;
    if let Some(out) = &args.out {
        m.output_dir = out.clone();
    }
    if !args.profiles.is_empty() {
        m.profiles = args.profiles.clone();
    }
    if let Some(t) = args.loss {
        m.config.transmittance = t;
    }
    if args.oracle {
        m.route = Route::Oracle;
    } else if args.analytic {
        m.route = Route::Analytic;
    }
    if args.z.is_some() {
        m.z_mm = args.z;
    }
    Ok(m)
}

pub fn run(cli: Cli) -> Result<RunOutput> {
    match cli.command {
        CliCommand::Covariance(a) => cmd_covariance(&resolve(Command::Covariance, None, &a)?),
        CliCommand::VlfSweep(a) => cmd_vlf_sweep(&resolve(Command::VlfSweep, None, &a)?),
        CliCommand::Verify(a) => {
            if a.config.is_none() {
                let mut m = RunManifest::new(Command::Verify, ArrayConfig::new(8, 0.45, 0.015, PumpProfile::UniformPhase), "");
                m.route = if a.oracle { Route::Oracle } else { Route::Auto };
                Ok(cmd_verify(&m, true))
            } else {
                Ok(cmd_verify(&resolve(Command::Verify, None, &a)?, false))
            }
        }
        CliCommand::Figure { number, args } => {
            let m = resolve(Command::Figure(number), Some(RunManifest::figure(number)?), &args)?;
            run_figure(&m, number)
        }
    }
}

pub fn run_figure(m: &RunManifest, number: u8) -> Result<RunOutput> {
    match number {
        2 => cmd_covariance(m),
        3 | 4 => cmd_vlf_sweep(m),
        _ => Err(Error::InvalidArgument(format!("no figure {number}"))),
    }
}

fn profiles(m: &RunManifest) -> Result<Vec<PumpProfile>> {
    if m.profiles.is_empty() {
        Ok(vec![m.config.pump.clone()])
    } else {
        m.profiles.iter().map(|s| parse_profile(s)).collect()
    }
}

fn checked(config: ArrayConfig, lines: &mut Vec<String>) -> Result<ArrayConfig> {
    let v = model::validate_config(&config);
    for w in &v.warnings {
        lines.push(format!("warning: {w}"));
    }
    config.validated()?;
    Ok(config)
}

pub fn cmd_covariance(m: &RunManifest) -> Result<RunOutput> {
    let mut out = RunOutput {
        success: true,
        ..Default::default()
    };
    let t = m.config.transmittance;
    for pump in profiles(m)? {
        let config = checked(m.config.with_pump(pump), &mut out.lines)?;
        let z = m.z_mm.unwrap_or(config.z_max_mm);
        let v = apply_loss(&covariance_at(&config, z, m.route)?, t)?;
        let stem = format!("covariance_{}_N{}", config.pump.label(), config.n_modes);
        let full = m.output_dir.join(format!("{stem}.csv"));
        let display = m.output_dir.join(format!("{stem}_display.csv"));
        io::write_file(&full, &io::covariance_to_csv(&config, &v))?;
        io::write_file(&display, &io::covariance_to_display_csv(&config, &v))?;
        let diag = gaussian::purity_and_symplectic_report(&v, None);
        out.lines.push(format!(
            "{}: N={} z={} T={} det={:.12} physical={}",
            config.pump.label(),
            config.n_modes,
            z,
            t,
            diag.determinant,
            diag.is_physical()
        ));
        out.files.extend([full, display]);
    }
    Ok(out)
}

/// Odd/even chain rows for every z of `config.z_grid()`, in z order.
pub fn sweep_rows(config: &ArrayConfig, route: Route) -> Result<Vec<VlfRow>> {
    let (odd, even) = partition_mode_sets(config.n_modes);
    let t = config.transmittance;
    let per_z: Vec<Result<Vec<VlfRow>>> = config
        .z_grid()
        .par_iter()
        .map(|&z| {
            let v = covariance_at(config, z, route)?;
            let lossy = apply_loss(&v, t)?;
            let mut rows = Vec::new();
            for (name, set) in [("odd", &odd), ("even", &even)] {
                if set.len() < 2 {
                    continue;
                }
                let lossless = witness::chain_values(&v, set, None)?;
                let pairs = witness::chain_values(&lossy, set, None)?;
                let set_inseparable = pairs.iter().all(witness::PairValue::violates);
                for (p, q) in pairs.iter().zip(&lossless) {
                    rows.push(VlfRow {
                        n_modes: config.n_modes,
                        coupling_per_mm: config.coupling_per_mm,
                        z,
                        set: name,
                        a: p.a,
                        b: p.b,
                        theta_a: p.theta_a,
                        theta_b: p.theta_b,
                        value: p.value,
                        lossless_value: q.value,
                        transmittance: t,
                        set_inseparable,
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_z {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Per-configuration digest of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub n_modes: usize,
    pub coupling_per_mm: f64,
    pub profile: String,
    /// Largest value over all pairs and all `z > 0`.
    pub max_value_positive_z: f64,
    /// Largest pair value at the last grid point.
    pub value_at_z_max: f64,
    pub inseparable_for_all_positive_z: bool,
    pub max_loss_law_residual: f64,
}

pub fn summarize(rows: &[VlfRow], profile: &str) -> Option<SweepSummary> {
    let first = rows.first()?;
    let z_max = rows.iter().map(|r| r.z).fold(f64::NEG_INFINITY, f64::max);
    let positive: Vec<&VlfRow> = rows.iter().filter(|r| r.z > 0.0).collect();
    Some(SweepSummary {
        n_modes: first.n_modes,
        coupling_per_mm: first.coupling_per_mm,
        profile: profile.to_owned(),
        max_value_positive_z: positive.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max),
        value_at_z_max: rows
            .iter()
            .filter(|r| r.z == z_max)
            .map(|r| r.value)
            .fold(f64::NEG_INFINITY, f64::max),
        inseparable_for_all_positive_z: positive.iter().all(|r| r.set_inseparable),
        max_loss_law_residual: rows.iter().map(|r| r.loss_law_residual().abs()).fold(0.0, f64::max),
    })
}

pub fn cmd_vlf_sweep(m: &RunManifest) -> Result<RunOutput> {
    let mut out = RunOutput {
        success: true,
        ..Default::default()
    };
    let ns = m.n_modes_sweep.clone().unwrap_or_else(|| vec![m.config.n_modes]);
    let js = m
        .coupling_sweep_per_mm
        .clone()
        .unwrap_or_else(|| vec![m.config.coupling_per_mm]);
    for pump in profiles(m)? {
        let mut configs = Vec::new();
        let mut rows = Vec::new();
        for &n in &ns {
            for &j in &js {
                let mut c = m.config.with_pump(pump.clone());
                c.n_modes = n;
                c.coupling_per_mm = j;
                let c = checked(c, &mut out.lines)?;
                let block = sweep_rows(&c, m.route)?;
                if let Some(s) = summarize(&block, &pump.label()) {
                    out.lines.push(format!(
                        "{}: N={} J={} max VLF(z>0)={:.6} VLF(z_max)={:.6} inseparable(z>0)={} loss-law residual={:.1e}",
                        s.profile,
                        s.n_modes,
                        s.coupling_per_mm,
                        s.max_value_positive_z,
                        s.value_at_z_max,
                        s.inseparable_for_all_positive_z,
                        s.max_loss_law_residual
                    ));
                }
                rows.extend(block);
                configs.push(c);
            }
        }
        let path = m.output_dir.join(format!("vlf_{}.csv", pump.label()));
        io::write_file(&path, &io::vlf_rows_to_csv(&configs, &rows))?;
        out.files.push(path);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn residual(name: impl Into<String>, value: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            passed: value.is_finite() && value <= tol,
            detail: format!("{value:.3e} (tol {tol:.0e})"),
        }
    }

    fn error(name: impl Into<String>, e: &Error) -> Check {
        Check {
            name: name.into(),
            passed: false,
            detail: e.to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<44} {}",
            if self.passed { "ok" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

pub fn check_orthonormality(n: usize, shift: Shift) -> Check {
    let name = format!("orthonormality N={n} shift={shift:?}");
    let result = fourier::dft_matrix(n).and_then(|b| {
        let r = fourier::verify_orthonormality(n, shift)?;
        Ok(b.unitarity_residual().max(r))
    });
    match result {
        Ok(r) => Check::residual(name, r, 1e-12),
        Err(e) => Check::error(name, &e),
    }
}

/// `exp(Δz)` of the supplied drift must be symplectic.
pub fn check_symplectic(label: &str, drift: &nalgebra::DMatrix<f64>, z: f64) -> Check {
    let name = format!("symplectic {label} z={z}");
    match propagate::numerical_propagator(drift, z) {
        Ok(p) => Check::residual(name, p.symplectic_residual(), gaussian::SYMPLECTIC_TOL),
        Err(e) => Check::error(name, &e),
    }
}

pub fn check_oracle(config: &ArrayConfig, z: f64) -> Check {
    let name = format!("oracle N={} {} z={z}", config.n_modes, config.pump.label());
    let diff = covariance_at(config, z, Route::Auto)
        .and_then(|a| Ok((a.matrix() - covariance_at(config, z, Route::Oracle)?.matrix()).amax()));
    match diff {
        Ok(d) => Check::residual(name, d, 1e-9),
        Err(e) => Check::error(name, &e),
    }
}

pub fn check_purity(config: &ArrayConfig, z: f64, route: Route) -> Check {
    let name = format!("purity N={} {} z={z}", config.n_modes, config.pump.label());
    match covariance_at(config, z, route) {
        Ok(v) => {
            let d = gaussian::purity_and_symplectic_report(&v, None);
            let mut c = Check::residual(name, (d.determinant - 1.0).abs(), gaussian::PURITY_TOL);
            c.passed &= d.is_physical();
            c
        }
        Err(e) => Check::error(name, &e),
    }
}

pub fn check_loss_law(v: &CovarianceMatrix, label: &str) -> Check {
    let name = format!("loss law {label}");
    let result = (|| -> Result<f64> {
        let n = v.n_modes();
        let mut worst: f64 = 0.0;
        for t in [0.0, 0.3, 0.7, 1.0] {
            let lossy = apply_loss(v, t)?;
            if gaussian::min_uncertainty_eigenvalue(lossy.matrix()) < -gaussian::PHYSICALITY_TOL {
                return Err(Error::InvalidArgument(format!("unphysical at T={t}")));
            }
            for b in 2..=n {
                for (ta, tb) in [(0.0, std::f64::consts::FRAC_PI_2), (0.4, 2.5)] {
                    let lossless = witness::vlf_pair(v, 1, b, ta, tb)?;
                    let val = witness::vlf_pair(&lossy, 1, b, ta, tb)?;
                    worst = worst.max((val - (t * lossless + 4.0 * (1.0 - t))).abs());
                }
            }
        }
        Ok(worst)
    })();
    match result {
        Ok(r) => Check::residual(name, r, 1e-12),
        Err(e) => Check::error(name, &e),
    }
}

/// Spread of the chain values across both parity sets.
pub fn check_ring_symmetry(v: &CovarianceMatrix, label: &str) -> Check {
    let name = format!("ring symmetry {label}");
    let (odd, even) = partition_mode_sets(v.n_modes());
    let result = (|| -> Result<f64> {
        let mut values = Vec::new();
        for set in [&odd, &even] {
            values.extend(full_inseparability_check(v, set, None)?.pairs.iter().map(|p| p.value));
        }
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(max - min)
    })();
    match result {
        Ok(r) => Check::residual(name, r, 1e-10),
        Err(e) => Check::error(name, &e),
    }
}

fn default_verify_configs() -> Vec<ArrayConfig> {
    let mut out = Vec::new();
    for n in [4, 8, 12] {
        for pump in [PumpProfile::UniformPhase, PumpProfile::AlternatingPi, PumpProfile::AlternatingHalfPi] {
            out.push(ArrayConfig::new(n, 0.45, 0.015, pump));
        }
    }
    out
}

/// Full invariant suite over `configs`.
pub fn verify_suite(configs: &[ArrayConfig], route: Route) -> Vec<Check> {
    let mut checks = Vec::new();
    for config in configs {
        let n = config.n_modes;
        let label = format!("N={n} {}", config.pump.label());
        if let Err(e) = config.validated() {
            checks.push(Check::error(format!("config {label}"), &e));
            continue;
        }
        if let Some(shift) = config.pump.shift() {
            checks.push(check_orthonormality(n, shift));
        }
        let z_max = config.z_max_mm;
        match model::build_drift_matrix(config) {
            Ok(d) => checks.push(check_symplectic(&label, &d, z_max)),
            Err(e) => checks.push(Check::error(format!("drift {label}"), &e)),
        }
        let closed_form = config.pump.shift().is_some() && config.is_homogeneous();
        for z in [0.0, 0.5 * z_max, z_max] {
            if closed_form && route != Route::Oracle {
                checks.push(check_oracle(config, z));
            }
            checks.push(check_purity(config, z, route));
        }
        match covariance_at(config, z_max, route) {
            Ok(v) => {
                checks.push(check_loss_law(&v, &label));
                let uniform = config.shift_index().and_then(|r| r.ok()) == Some(n);
                if uniform && n % 4 == 0 && config.is_homogeneous() {
                    checks.push(check_ring_symmetry(&v, &label));
                }
            }
            Err(e) => checks.push(Check::error(format!("covariance {label}"), &e)),
        }
    }
    checks
}

/// With `default_grid`, runs over N ∈ {4, 8, 12} and the three closed-form
/// profiles; otherwise over the manifest's config and profiles.
pub fn cmd_verify(m: &RunManifest, default_grid: bool) -> RunOutput {
    let configs = if default_grid {
        Ok(default_verify_configs())
    } else {
        profiles(m).map(|ps| ps.into_iter().map(|p| m.config.with_pump(p)).collect::<Vec<_>>())
    };
    let checks = match configs {
        Ok(cs) => verify_suite(&cs, m.route),
        Err(e) => vec![Check::error("profiles", &e)],
    };
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut lines: Vec<String> = checks.iter().map(Check::to_string).collect();
    lines.push(format!("{passed}/{} checks passed", checks.len()));
    RunOutput {
        files: Vec::new(),
        lines,
        success: passed == checks.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_names_round_trip() {
        for c in [Command::Covariance, Command::VlfSweep, Command::Verify, Command::Figure(3)] {
            assert_eq!(c.to_string().parse::<Command>().unwrap(), c);
        }
        assert!("figure-5".parse::<Command>().is_err());
    }

    #[test]
    fn shipped_manifests_parse() {
        let f2 = RunManifest::figure(2).unwrap();
        assert_eq!(f2.command, Command::Figure(2));
        assert_eq!(f2.config.n_modes, 8);
        assert_eq!(f2.profiles, ["r0", "rN2", "rN4"]);
        let f3 = RunManifest::figure(3).unwrap();
        assert_eq!(f3.n_modes_sweep.as_deref(), Some(&[4, 8][..]));
        assert_eq!(f3.coupling_sweep_per_mm.as_deref(), Some(&[0.45, 100.0][..]));
        let f4 = RunManifest::figure(4).unwrap();
        assert_eq!(f4.n_modes_sweep.as_deref(), Some(&[40, 60, 80][..]));
        assert!(RunManifest::figure(5).is_err());
    }

    #[test]
    fn profile_specs() {
        assert_eq!(parse_profile("rN4").unwrap(), PumpProfile::AlternatingHalfPi);
        assert_eq!(parse_profile("general:3").unwrap(), PumpProfile::GeneralShift { r: 3 });
        assert!(parse_profile("bogus").is_err());
        assert!(parse_profile("custom:/nonexistent/file.json").is_err());
    }

    #[test]
    fn flags_override_manifest() {
        let args = RunArgs {
            out: Some("elsewhere".into()),
            profiles: vec!["rN2".into()],
            loss: Some(0.5),
            oracle: true,
            ..Default::default()
        };
        let m = resolve(Command::Figure(2), Some(RunManifest::figure(2).unwrap()), &args).unwrap();
        assert_eq!(m.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(m.profiles, ["rN2"]);
        assert_eq!(m.config.transmittance, 0.5);
        assert_eq!(m.route, Route::Oracle);
        assert!(resolve(Command::Covariance, None, &RunArgs::default()).is_err());
    }

    #[test]
    fn flipped_drift_entry_breaks_symplecticity() {
        let c = ArrayConfig::new(4, 0.45, 0.015, PumpProfile::UniformPhase);
        let mut d = model::build_drift_matrix(&c).unwrap();
        assert!(check_symplectic("clean", &d, 20.0).passed);
        d[(0, 3)] = -d[(0, 3)];
        assert!(!check_symplectic("sign error", &d, 20.0).passed);
    }

    #[test]
    fn sweep_is_in_z_order() {
        let mut c = ArrayConfig::new(4, 0.45, 0.015, PumpProfile::UniformPhase);
        c.z_steps = 10;
        let rows = sweep_rows(&c, Route::Auto).unwrap();
        assert_eq!(rows.len(), 11 * 2);
        assert!(rows.windows(2).all(|w| w[0].z <= w[1].z));
        assert_eq!(rows[0].value, 4.0);
        assert_eq!(rows[1].set, "even");
    }
}
