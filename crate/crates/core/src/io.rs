//! CSV serialization of covariance matrices and VLF sweeps.
//!
//! Every file starts with `#` comment lines carrying the SHA-256 of the
//! configuration's canonical JSON, followed by a header row. Floats are
//! written in Rust's shortest round-trip form, so output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::{ArrayConfig, Basis, QuadratureOrdering};

/// Entries below this magnitude are zeroed in display copies only.
pub const DISPLAY_THRESHOLD: f64 = 1e-2;

pub const VLF_HEADER: &str = "n_modes,coupling_per_mm,z_mm,set,pair,theta_a,theta_b,value,lossless_value,transmittance,loss_law_residual,below_threshold,set_inseparable";

/// Hex SHA-256 of the config's compact JSON (field order is fixed by the struct).
pub fn config_hash(config: &ArrayConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(json.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn config_comment(config: &ArrayConfig) -> String {
    format!(
        "# config_sha256={} config={}\n",
        config_hash(config),
        serde_json::to_string(config).expect("config serializes")
    )
}

/// Copy with `|v| < threshold` set to zero.
pub fn chop(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    m.map(|v| if v.abs() < threshold { 0.0 } else { v })
}

fn covariance_csv(config: &ArrayConfig, matrix: &DMatrix<f64>, basis: Basis, z: f64, transmittance: f64, chopped: bool) -> String {
    let n = matrix.nrows() / 2;
    let labels = QuadratureOrdering::labels(n);
    let mut out = config_comment(config);
    let _ = writeln!(
        out,
        "# kind=covariance basis={basis} ordering={} z_mm={z} transmittance={transmittance} display_threshold={}",
        labels.join(";"),
        if chopped { DISPLAY_THRESHOLD.to_string() } else { "none".into() }
    );
    let _ = writeln!(out, "row,{}", labels.join(","));
    for (r, label) in labels.iter().enumerate() {
        out.push_str(label);
        for c in 0..matrix.ncols() {
            let _ = write!(out, ",{}", matrix[(r, c)]);
        }
        out.push('\n');
    }
    out
}

/// Full-precision CSV text for `v`.
pub fn covariance_to_csv(config: &ArrayConfig, v: &CovarianceMatrix) -> String {
    covariance_csv(config, v.matrix(), v.basis(), v.z(), v.transmittance(), false)
}

/// Display copy with entries below [`DISPLAY_THRESHOLD`] zeroed.
pub fn covariance_to_display_csv(config: &ArrayConfig, v: &CovarianceMatrix) -> String {
    covariance_csv(config, &chop(v.matrix(), DISPLAY_THRESHOLD), v.basis(), v.z(), v.transmittance(), true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceCsv {
    pub basis: Basis,
    pub z: f64,
    pub transmittance: f64,
    pub config_sha256: String,
    pub matrix: DMatrix<f64>,
}

fn comment_field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')))
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(format!("malformed covariance CSV: {}", msg.into()))
}

pub fn parse_covariance_csv(text: &str) -> Result<CovarianceCsv> {
    let mut hash = None;
    let mut basis = None;
    let mut z = None;
    let mut transmittance = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut saw_header = false;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        if let Some(c) = line.strip_prefix('#') {
            hash = hash.or(comment_field(c, "config_sha256").map(str::to_owned));
            if let Some(b) = comment_field(c, "basis") {
                basis = Some(match b {
                    "individual" => Basis::Individual,
                    "fourier" => Basis::Fourier,
                    other => return Err(parse_err(format!("unknown basis {other}"))),
                });
            }
            if let Some(v) = comment_field(c, "z_mm") {
                z = Some(v.parse().map_err(|_| parse_err("bad z_mm"))?);
            }
            if let Some(v) = comment_field(c, "transmittance") {
                transmittance = Some(v.parse().map_err(|_| parse_err("bad transmittance"))?);
            }
            continue;
        }
        if !saw_header {
            saw_header = true;
            continue;
        }
        let row = line
            .split(',')
            .skip(1)
            .map(|v| v.trim().parse::<f64>().map_err(|_| parse_err(format!("bad value {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(parse_err("matrix is not square"));
    }
    Ok(CovarianceCsv {
        basis: basis.ok_or_else(|| parse_err("missing basis"))?,
        z: z.ok_or_else(|| parse_err("missing z_mm"))?,
        transmittance: transmittance.unwrap_or(1.0),
        config_sha256: hash.ok_or_else(|| parse_err("missing config_sha256"))?,
        matrix: DMatrix::from_fn(dim, dim, |r, c| rows[r][c]),
    })
}

/// One row of a VLF sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct VlfRow {
    pub n_modes: usize,
    pub coupling_per_mm: f64,
    pub z: f64,
    /// `odd` or `even`.
    pub set: &'static str,
    pub a: usize,
    pub b: usize,
    pub theta_a: f64,
    pub theta_b: f64,
    pub value: f64,
    pub lossless_value: f64,
    pub transmittance: f64,
    pub set_inseparable: bool,
}

impl VlfRow {
    /// `value − (T·lossless + 4(1 − T))`
    pub fn loss_law_residual(&self) -> f64 {
        self.value - (self.transmittance * self.lossless_value + 4.0 * (1.0 - self.transmittance))
    }

    fn write_to(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}-{},{},{},{},{},{},{:e},{},{}",
            self.n_modes,
            self.coupling_per_mm,
            self.z,
            self.set,
            self.a,
            self.b,
            self.theta_a,
            self.theta_b,
            self.value,
            self.lossless_value,
            self.transmittance,
            self.loss_law_residual(),
            self.value < 4.0,
            self.set_inseparable
        );
    }
}

/// `configs` lists every configuration that contributed rows.
pub fn vlf_rows_to_csv(configs: &[ArrayConfig], rows: &[VlfRow]) -> String {
    let mut out = String::new();
    for c in configs {
        out.push_str(&config_comment(c));
    }
    out.push_str("# kind=vlf_sweep threshold=4\n");
    out.push_str(VLF_HEADER);
    out.push('\n');
    for r in rows {
        r.write_to(&mut out);
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{covariance_at, Route};
    use crate::model::PumpProfile;

    fn cfg() -> ArrayConfig {
        ArrayConfig::new(4, 0.45, 0.015, PumpProfile::UniformPhase)
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&cfg());
        assert_eq!(a.len(), 64);
        assert_eq!(a, config_hash(&cfg()));
        assert_ne!(a, config_hash(&cfg().with_pump(PumpProfile::AlternatingPi)));
    }

    #[test]
    fn covariance_round_trip_is_exact() {
        let v = covariance_at(&cfg(), 20.0, Route::Auto).unwrap();
        let text = covariance_to_csv(&cfg(), &v);
        assert!(text.starts_with("# config_sha256="));
        let back = parse_covariance_csv(&text).unwrap();
        assert_eq!(&back.matrix, v.matrix());
        assert_eq!(back.basis, Basis::Individual);
        assert_eq!(back.z, 20.0);
        assert_eq!(back.config_sha256, config_hash(&cfg()));
    }

    #[test]
    fn display_copy_chops_small_entries() {
        let v = covariance_at(&cfg().with_pump(PumpProfile::AlternatingPi), 20.0, Route::Auto).unwrap();
        let back = parse_covariance_csv(&covariance_to_display_csv(&cfg(), &v)).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                if r / 2 != c / 2 {
                    assert_eq!(back.matrix[(r, c)], 0.0);
                }
            }
        }
        assert_eq!(back.matrix[(0, 0)], v.matrix()[(0, 0)]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_covariance_csv("").is_err());
        assert!(parse_covariance_csv("# basis=individual z_mm=0 config_sha256=x\nrow,a\nx1,1,2\n").is_err());
        assert!(parse_covariance_csv("# basis=weird z_mm=0\n").is_err());
    }

    #[test]
    fn vlf_rows() {
        let row = VlfRow {
            n_modes: 4,
            coupling_per_mm: 0.45,
            z: 1.5,
            set: "odd",
            a: 1,
            b: 3,
            theta_a: 0.0,
            theta_b: std::f64::consts::FRAC_PI_2,
            value: 3.5,
            lossless_value: 3.0,
            transmittance: 0.5,
            set_inseparable: true,
        };
        assert_eq!(row.loss_law_residual(), 0.0);
        let text = vlf_rows_to_csv(&[cfg()], &[row]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[2], VLF_HEADER);
        assert_eq!(lines[3].split(',').count(), VLF_HEADER.split(',').count());
        assert!(lines[3].starts_with("4,0.45,1.5,odd,1-3,0,"));
    }
}
