//! Physical configuration of the ring and the real quadrature drift matrix.
//!
//! Conventions: quadratures `x = A + A†`, `y = i(A† − A)` with shot noise 1,
//! ordered `(x_1, y_1, …, x_N, y_N)`. Rates are in mm⁻¹ and lengths in mm.
//! The per-waveguide nonlinearity is `η_j = eta_per_mm · e^{iφ_j}` with
//! `φ_j = −2πjr/N` for the shift profiles, so the magnitude entering every
//! closed-form solution is exactly `eta_per_mm`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{self, Shift};

/// Tolerance used to call `|λ_p| = 2|η|` degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Individual,
    Fourier,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Individual => "individual",
            Basis::Fourier => "fourier",
        })
    }
}

/// Pump phase profile across the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpProfile {
    /// r = 0
    UniformPhase,
    /// r = N/2, η_j = (−1)^j |η|
    AlternatingPi,
    /// r = N/4, η_j = (−i)^j |η|
    AlternatingHalfPi,
    GeneralShift { r: usize },
    Custom { phases_rad: Vec<f64> },
}

impl PumpProfile {
    pub fn shift(&self) -> Option<Shift> {
        match self {
            PumpProfile::UniformPhase => Some(Shift::Zero),
            PumpProfile::AlternatingPi => Some(Shift::HalfN),
            PumpProfile::AlternatingHalfPi => Some(Shift::QuarterN),
            PumpProfile::GeneralShift { r } => Some(Shift::Index(*r)),
            PumpProfile::Custom { .. } => None,
        }
    }

    /// Phases `φ_j` for `j = 1..=N`.
    pub fn phases(&self, n_modes: usize) -> Result<Vec<f64>> {
        match self {
            PumpProfile::Custom { phases_rad } => {
                if phases_rad.len() != n_modes {
                    return Err(Error::DimensionMismatch {
                        expected: n_modes,
                        got: phases_rad.len(),
                    });
                }
                Ok(phases_rad.clone())
            }
            other => {
                let r = other.shift().expect("shift profile").resolve(n_modes)?;
                Ok((1..=n_modes)
                    .map(|j| -2.0 * PI * ((j * r) % n_modes) as f64 / n_modes as f64)
                    .collect())
            }
        }
    }

    /// Complex unit-modulus factors `e^{iφ_j}`, exact on quarter turns.
    pub(crate) fn phase_factors(&self, n_modes: usize) -> Result<Vec<Complex64>> {
        match self {
            PumpProfile::Custom { .. } => Ok(self
                .phases(n_modes)?
                .into_iter()
                .map(|phi| Complex64::from_polar(1.0, phi))
                .collect()),
            other => {
                let r = other.shift().expect("shift profile").resolve(n_modes)? as i64;
                Ok((1..=n_modes as i64)
                    .map(|j| fourier::unit_root(-j * r, n_modes))
                    .collect())
            }
        }
    }

    /// Short label used in file names and CLI flags.
    pub fn label(&self) -> String {
        match self {
            PumpProfile::UniformPhase => "r0".into(),
            PumpProfile::AlternatingPi => "rN2".into(),
            PumpProfile::AlternatingHalfPi => "rN4".into(),
            PumpProfile::GeneralShift { r } => format!("general-{r}"),
            PumpProfile::Custom { .. } => "custom".into(),
        }
    }
}

impl fmt::Display for PumpProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `r0`, `rN2`, `rN4` and `general:<r>`. Custom profiles need a file
/// and are resolved by the CLI.
impl FromStr for PumpProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r0" => Ok(PumpProfile::UniformPhase),
            "rN2" => Ok(PumpProfile::AlternatingPi),
            "rN4" => Ok(PumpProfile::AlternatingHalfPi),
            _ => {
                if let Some(r) = s.strip_prefix("general:") {
                    let r = r
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad shift index in {s:?}")))?;
                    Ok(PumpProfile::GeneralShift { r })
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown pump profile {s:?} (expected r0, rN2, rN4, general:<r> or custom:<file>)"
                    )))
                }
            }
        }
    }
}

fn default_transmittance() -> f64 {
    1.0
}

fn default_z_steps() -> usize {
    400
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub n_modes: usize,
    pub coupling_per_mm: f64,
    pub eta_per_mm: f64,
    pub pump: PumpProfile,
    pub z_max_mm: f64,
    #[serde(default = "default_z_steps")]
    pub z_steps: usize,
    #[serde(default = "default_transmittance")]
    pub transmittance: f64,
    /// Per-edge couplings `J_j` between waveguides `j` and `j+1`. Only the
    /// numerical path accepts these; closed forms require homogeneous `J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_couplings_per_mm: Option<Vec<f64>>,
}

impl ArrayConfig {
    pub fn new(n_modes: usize, coupling_per_mm: f64, eta_per_mm: f64, pump: PumpProfile) -> Self {
        ArrayConfig {
            n_modes,
            coupling_per_mm,
            eta_per_mm,
            pump,
            z_max_mm: 20.0,
            z_steps: default_z_steps(),
            transmittance: 1.0,
            edge_couplings_per_mm: None,
        }
    }

    pub fn with_pump(&self, pump: PumpProfile) -> Self {
        ArrayConfig {
            pump,
            ..self.clone()
        }
    }

    /// Resolved shift index `r ∈ 1..=N`, if the pump is a shift profile.
    pub fn shift_index(&self) -> Option<Result<usize>> {
        self.pump.shift().map(|s| s.resolve(self.n_modes))
    }

    /// `z_k = z_max · k / z_steps` for `k = 0..=z_steps`.
    pub fn z_grid(&self) -> Vec<f64> {
        (0..=self.z_steps)
            .map(|k| self.z_max_mm * k as f64 / self.z_steps as f64)
            .collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.edge_couplings_per_mm.is_none()
    }

    /// Coupling on edge `(j, j+1)`, 1-based, indices mod N.
    fn edge_coupling(&self, j: usize) -> f64 {
        match &self.edge_couplings_per_mm {
            Some(edges) => edges[fourier::wrap_index(j as i64, self.n_modes) - 1],
            None => self.coupling_per_mm,
        }
    }

    pub fn validated(&self) -> Result<()> {
        let v = validate_config(self);
        if v.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v.errors))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    fn warning(message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Validation {
    pub errors: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Collect every violation in `config`. Never panics.
pub fn validate_config(config: &ArrayConfig) -> Validation {
    let mut v = Validation::default();
    let n = config.n_modes;
    if n < 3 {
        v.errors.push(Diagnostic::error(format!(
            "a ring needs at least 3 waveguides, got N = {n}"
        )));
    }
    let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
    if !finite_nonneg(config.coupling_per_mm) {
        v.errors.push(Diagnostic::error(format!(
            "coupling must be finite and >= 0, got {}",
            config.coupling_per_mm
        )));
    }
    if !finite_nonneg(config.eta_per_mm) {
        v.errors.push(Diagnostic::error(format!(
            "nonlinearity magnitude must be finite and >= 0, got {}",
            config.eta_per_mm
        )));
    }
    if !(config.z_max_mm.is_finite() && config.z_max_mm > 0.0) {
        v.errors.push(Diagnostic::error(format!(
            "z_max must be > 0, got {}",
            config.z_max_mm
        )));
    }
    if config.z_steps == 0 {
        v.errors.push(Diagnostic::error("z_steps must be >= 1"));
    }
    if !(0.0..=1.0).contains(&config.transmittance) {
        v.errors.push(Diagnostic::error(format!(
            "transmittance {} out of [0, 1]",
            config.transmittance
        )));
    }
    match &config.pump {
        PumpProfile::AlternatingPi if !n.is_multiple_of(2) => {
            v.errors.push(Diagnostic::error(format!(
                "r = N/2 requires N even, got N = {n}"
            )));
        }
        PumpProfile::AlternatingHalfPi if !n.is_multiple_of(4) => {
            v.errors.push(Diagnostic::error(format!(
                "r = N/4 requires N ≡ 0 mod 4, got N = {n}"
            )));
        }
        PumpProfile::GeneralShift { r } if *r == 0 || *r > n => {
            v.errors.push(Diagnostic::error(format!(
                "shift index r = {r} outside 1..={n}"
            )));
        }
        PumpProfile::Custom { phases_rad } => {
            if phases_rad.len() != n {
                v.errors.push(Diagnostic::error(format!(
                    "custom pump has {} phases, expected N = {n}",
                    phases_rad.len()
                )));
            }
            if phases_rad.iter().any(|p| !p.is_finite()) {
                v.errors.push(Diagnostic::error("custom pump phases must be finite"));
            }
        }
        _ => {}
    }
    if let Some(edges) = &config.edge_couplings_per_mm {
        if edges.len() != n {
            v.errors.push(Diagnostic::error(format!(
                "{} edge couplings given, expected N = {n}",
                edges.len()
            )));
        }
        if edges.iter().any(|&j| !finite_nonneg(j)) {
            v.errors.push(Diagnostic::error("edge couplings must be finite and >= 0"));
        }
    }
    if !n.is_multiple_of(4) {
        v.warnings.push(Diagnostic::warning(format!(
            "N = {n} is not a multiple of 4: the ring has no zero Fourier modes, so odd/even \
             full inseparability is not expected"
        )));
    }
    v
}

/// Fixed ordering `(x_1, y_1, …, x_N, y_N)`, shot noise 1.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureOrdering;

impl QuadratureOrdering {
    pub const SHOT_NOISE: f64 = 1.0;

    pub fn x_index(mode: usize) -> usize {
        2 * (mode - 1)
    }

    pub fn y_index(mode: usize) -> usize {
        2 * (mode - 1) + 1
    }

    pub fn labels(n_modes: usize) -> Vec<String> {
        (1..=n_modes)
            .flat_map(|j| [format!("x{j}"), format!("y{j}")])
            .collect()
    }

    /// Block-diagonal `Ω` with blocks `[[0, 1], [−1, 0]]`.
    pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
        let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        omega
    }
}

/// Real `Δ` with `dξ/dz = Δξ`:
///
/// ```text
/// dx_j/dz =  2η_I x_j − 2η_R y_j + J(y_{j−1} + y_{j+1})
/// dy_j/dz = −2η_R x_j − 2η_I y_j − J(x_{j−1} + x_{j+1})
/// ```
pub fn build_drift_matrix(config: &ArrayConfig) -> Result<DMatrix<f64>> {
    config.validated()?;
    let n = config.n_modes;
    let factors = config.pump.phase_factors(n)?;
    let mut drift = DMatrix::zeros(2 * n, 2 * n);
    for j in 1..=n {
        let eta = factors[j - 1] * config.eta_per_mm;
        let (x, y) = (QuadratureOrdering::x_index(j), QuadratureOrdering::y_index(j));
        drift[(x, x)] = 2.0 * eta.im;
        drift[(x, y)] = -2.0 * eta.re;
        drift[(y, x)] = -2.0 * eta.re;
        drift[(y, y)] = -2.0 * eta.im;

        let prev = fourier::wrap_index(j as i64 - 1, n);
        let next = fourier::wrap_index(j as i64 + 1, n);
        for (k, coupling) in [(prev, config.edge_coupling(prev)), (next, config.edge_coupling(j))] {
            drift[(x, QuadratureOrdering::y_index(k))] += coupling;
            drift[(y, QuadratureOrdering::x_index(k))] -= coupling;
        }
    }
    Ok(drift)
}

/// Max entry of `ΔΩ + ΩΔᵀ`; zero for a generator of symplectic flow.
pub fn hamiltonian_residual(drift: &DMatrix<f64>) -> f64 {
    let omega = QuadratureOrdering::symplectic_form(drift.nrows() / 2);
    (drift * &omega + &omega * drift.transpose()).amax()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|λ_p| > 2|η|`, real `F_p`
    Oscillatory,
    /// `|λ_p| < 2|η|`
    Hyperbolic,
    /// `|λ_p| = 2|η|`, `F_p = 0`
    Degenerate,
}

pub(crate) fn classify(lambda_abs: f64, two_eta: f64) -> Regime {
    let gap = lambda_abs - two_eta;
    if gap.abs() <= DEGENERATE_TOL {
        Regime::Degenerate
    } else if gap > 0.0 {
        Regime::Oscillatory
    } else {
        Regime::Hyperbolic
    }
}

/// Regime of each Fourier mode `p = 1..=N` under the uniform pump.
pub fn regime_classify(config: &ArrayConfig) -> Result<Vec<Regime>> {
    if config.pump != PumpProfile::UniformPhase {
        return Err(Error::UnsupportedProfile {
            operation: "regime_classify",
            profile: config.pump.label(),
        });
    }
    config.validated()?;
    let ev = fourier::eigenvalues(config.n_modes, config.coupling_per_mm)?;
    Ok(ev
        .values()
        .iter()
        .map(|l| classify(l.abs(), 2.0 * config.eta_per_mm))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2(pump: PumpProfile) -> ArrayConfig {
        ArrayConfig::new(8, 0.45, 0.015, pump)
    }

    #[test]
    fn drift_is_hamiltonian() {
        for pump in [
            PumpProfile::UniformPhase,
            PumpProfile::AlternatingPi,
            PumpProfile::AlternatingHalfPi,
            PumpProfile::GeneralShift { r: 3 },
            PumpProfile::Custom {
                phases_rad: vec![0.1, -2.0, 0.7, 3.0, 1.1, 0.0, -0.4, 2.2],
            },
        ] {
            let d = build_drift_matrix(&fig2(pump)).unwrap();
            assert!(hamiltonian_residual(&d) < 1e-14);
        }
    }

    #[test]
    fn pure_coupling_has_empty_diagonal_blocks() {
        let mut cfg = fig2(PumpProfile::UniformPhase);
        cfg.eta_per_mm = 0.0;
        let d = build_drift_matrix(&cfg).unwrap();
        for j in 0..8 {
            for a in 0..2 {
                for b in 0..2 {
                    assert_eq!(d[(2 * j + a, 2 * j + b)], 0.0);
                }
            }
        }
        // antisymmetric generator -> orthogonal flow
        assert!((&d + d.transpose()).amax() < 1e-15);
    }

    #[test]
    fn uncoupled_uniform_pump_is_block_diagonal() {
        let mut cfg = fig2(PumpProfile::UniformPhase);
        cfg.coupling_per_mm = 0.0;
        let d = build_drift_matrix(&cfg).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                if r / 2 != c / 2 {
                    assert_eq!(d[(r, c)], 0.0);
                }
            }
        }
        // single-mode squeezer: dx = -2η y, dy = -2η x
        assert_eq!(d[(0, 1)], -0.03);
        assert_eq!(d[(1, 0)], -0.03);
    }

    #[test]
    fn coupling_lives_on_ring_neighbours() {
        let d = build_drift_matrix(&fig2(PumpProfile::AlternatingHalfPi)).unwrap();
        for j in 1..=8usize {
            for k in 1..=8usize {
                let neighbour = (j as i64 - k as i64).rem_euclid(8) == 1
                    || (k as i64 - j as i64).rem_euclid(8) == 1;
                let block_nonzero = (0..2)
                    .flat_map(|a| (0..2).map(move |b| (a, b)))
                    .any(|(a, b)| d[(2 * (j - 1) + a, 2 * (k - 1) + b)] != 0.0);
                if j != k {
                    assert_eq!(block_nonzero, neighbour, "j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn pump_phase_magnitudes() {
        for pump in [PumpProfile::AlternatingPi, PumpProfile::AlternatingHalfPi] {
            let f = pump.phase_factors(8).unwrap();
            assert!(f.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        }
        let f = PumpProfile::AlternatingPi.phase_factors(4).unwrap();
        assert_eq!(f[0], Complex64::new(-1.0, 0.0));
        assert_eq!(f[1], Complex64::new(1.0, 0.0));
        let f = PumpProfile::AlternatingHalfPi.phase_factors(4).unwrap();
        assert_eq!(f[0], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn validation_reports_everything() {
        let v = validate_config(&ArrayConfig::new(6, 0.45, 0.015, PumpProfile::AlternatingHalfPi));
        assert!(!v.is_ok());
        assert!(v.errors[0].message.contains("N ≡ 0 mod 4"));

        let mut cfg = fig2(PumpProfile::UniformPhase);
        cfg.transmittance = 1.2;
        let v = validate_config(&cfg);
        assert_eq!(v.errors.len(), 1);
        assert!(v.errors[0].message.contains("transmittance"));

        let mut cfg = ArrayConfig::new(2, -1.0, f64::NAN, PumpProfile::AlternatingPi);
        cfg.z_steps = 0;
        cfg.z_max_mm = 0.0;
        let v = validate_config(&cfg);
        assert_eq!(v.errors.len(), 5);
        assert_eq!(v.warnings.len(), 1);

        let v = validate_config(&fig2(PumpProfile::UniformPhase));
        assert!(v.is_ok());
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn non_multiple_of_four_warns() {
        let v = validate_config(&ArrayConfig::new(6, 0.45, 0.015, PumpProfile::UniformPhase));
        assert!(v.is_ok());
        assert_eq!(v.warnings.len(), 1);
    }

    #[test]
    fn invalid_config_error_lists_messages() {
        let err = ArrayConfig::new(6, 0.45, 0.015, PumpProfile::AlternatingHalfPi)
            .validated()
            .unwrap_err();
        assert!(err.to_string().contains("r = N/4 requires N ≡ 0 mod 4"));
    }

    #[test]
    fn regimes_of_four_ring() {
        let r = regime_classify(&ArrayConfig::new(4, 0.45, 0.015, PumpProfile::UniformPhase)).unwrap();
        assert_eq!(
            r,
            vec![Regime::Hyperbolic, Regime::Oscillatory, Regime::Hyperbolic, Regime::Oscillatory]
        );
        let r = regime_classify(&ArrayConfig::new(4, 0.45, 0.0, PumpProfile::UniformPhase)).unwrap();
        assert_eq!(r[0], Regime::Degenerate);
        assert_eq!(r[1], Regime::Oscillatory);
        // |λ_4| = 2J = 2|η| exactly
        let r = regime_classify(&ArrayConfig::new(4, 0.25, 0.25, PumpProfile::UniformPhase)).unwrap();
        assert_eq!(r[3], Regime::Degenerate);
        assert!(regime_classify(&fig2(PumpProfile::AlternatingPi)).is_err());
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("r0".parse::<PumpProfile>().unwrap(), PumpProfile::UniformPhase);
        assert_eq!("rN2".parse::<PumpProfile>().unwrap(), PumpProfile::AlternatingPi);
        assert_eq!(
            "general:3".parse::<PumpProfile>().unwrap(),
            PumpProfile::GeneralShift { r: 3 }
        );
        assert!("bogus".parse::<PumpProfile>().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let json = r#"{"n_modes": 8, "coupling_per_mm": 0.45, "eta_per_mm": 0.015,
                       "pump": {"kind": "alternating_half_pi"}, "z_max_mm": 20.0}"#;
        let cfg: ArrayConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.z_steps, 400);
        assert_eq!(cfg.transmittance, 1.0);
        assert_eq!(cfg.pump, PumpProfile::AlternatingHalfPi);
        let back: ArrayConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
