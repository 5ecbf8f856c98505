//! Pairwise van Loock–Furusawa inequalities on generalized quadratures and
//! the odd/even full-inseparability check.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, PURITY_TOL};
use crate::model::{Basis, QuadratureOrdering};

/// Two units of shot noise per variance sum.
pub const VLF_THRESHOLD: f64 = 4.0;
/// Angle-scan values closer than this count as ties.
pub const TIE_TOL: f64 = 1e-12;

pub const GENUINE_NOTE: &str = "pure state: full inseparability implies genuine multipartite entanglement";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairValue {
    pub a: usize,
    pub b: usize,
    pub theta_a: f64,
    pub theta_b: f64,
    pub value: f64,
}

impl PairValue {
    pub fn violates(&self) -> bool {
        self.value < VLF_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VlfReport {
    pub pairs: Vec<PairValue>,
    pub threshold: f64,
    pub set: Vec<usize>,
    pub fully_inseparable: bool,
    pub transmittance_applied: f64,
    /// `det V = 1` within tolerance.
    pub pure: bool,
}

impl VlfReport {
    /// Annotation for pure, fully inseparable states. No independent
    /// genuineness test is run.
    pub fn genuine_note(&self) -> Option<&'static str> {
        (self.pure && self.fully_inseparable).then_some(GENUINE_NOTE)
    }

    pub fn max_value(&self) -> f64 {
        self.pairs.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode == 0 || mode > n_modes {
        Err(Error::ModeIndex { index: mode, n_modes })
    } else {
        Ok(())
    }
}

fn check_individual(v: &CovarianceMatrix) -> Result<()> {
    if v.basis() != Basis::Individual {
        return Err(Error::BasisMismatch {
            expected: Basis::Individual,
            got: v.basis(),
        });
    }
    Ok(())
}

/// `V[x_a(θ_a) − x_b(θ_b)] + V[y_a(θ_a) + y_b(θ_b)]` with
/// `x(θ) = x cosθ + y sinθ`, `y(θ) = −x sinθ + y cosθ`.
pub fn vlf_pair(v: &CovarianceMatrix, a: usize, b: usize, theta_a: f64, theta_b: f64) -> Result<f64> {
    check_individual(v)?;
    let n = v.n_modes();
    check_mode(a, n)?;
    check_mode(b, n)?;
    if a == b {
        return Err(Error::InvalidArgument(format!("VLF pair needs distinct modes, got ({a}, {b})")));
    }
    Ok(pair_value(v.matrix(), a, b, theta_a, theta_b))
}

fn pair_value(m: &DMatrix<f64>, a: usize, b: usize, theta_a: f64, theta_b: f64) -> f64 {
    let idx = [
        QuadratureOrdering::x_index(a),
        QuadratureOrdering::y_index(a),
        QuadratureOrdering::x_index(b),
        QuadratureOrdering::y_index(b),
    ];
    let (sa, ca) = theta_a.sin_cos();
    let (sb, cb) = theta_b.sin_cos();
    let c = [ca, sa, -cb, -sb];
    let d = [-sa, ca, -sb, cb];
    let mut total = 0.0;
    for (i, &r) in idx.iter().enumerate() {
        for (k, &col) in idx.iter().enumerate() {
            total += (c[i] * c[k] + d[i] * d[k]) * m[(r, col)];
        }
    }
    total
}

/// `({1, 3, …}, {2, 4, …})`
pub fn partition_mode_sets(n_modes: usize) -> (Vec<usize>, Vec<usize>) {
    ((1..=n_modes).step_by(2).collect(), (2..=n_modes).step_by(2).collect())
}

/// `0, π/2, 0, π/2, …` along the set.
pub fn default_angles(len: usize) -> Vec<f64> {
    (0..len).map(|k| if k % 2 == 0 { 0.0 } else { FRAC_PI_2 }).collect()
}

/// Pair values along the chain `(s₁,s₂), (s₂,s₃), …` of the ordered set.
/// Angles default to [`default_angles`].
pub fn chain_values(v: &CovarianceMatrix, set: &[usize], angles: Option<&[f64]>) -> Result<Vec<PairValue>> {
    check_individual(v)?;
    if set.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "mode set needs at least 2 modes, got {}",
            set.len()
        )));
    }
    let n = v.n_modes();
    for &m in set {
        check_mode(m, n)?;
    }
    for (i, m) in set.iter().enumerate() {
        if set[..i].contains(m) {
            return Err(Error::InvalidArgument(format!("mode {m} repeated in set")));
        }
    }
    let defaults;
    let angles = match angles {
        Some(a) if a.len() != set.len() => {
            return Err(Error::DimensionMismatch {
                expected: set.len(),
                got: a.len(),
            })
        }
        Some(a) => a,
        None => {
            defaults = default_angles(set.len());
            &defaults
        }
    };
    Ok(set
        .windows(2)
        .zip(angles.windows(2))
        .map(|(m, t)| PairValue {
            a: m[0],
            b: m[1],
            theta_a: t[0],
            theta_b: t[1],
            value: pair_value(v.matrix(), m[0], m[1], t[0], t[1]),
        })
        .collect())
}

/// [`chain_values`] plus the set-level verdict and purity.
pub fn full_inseparability_check(
    v: &CovarianceMatrix,
    set: &[usize],
    angles: Option<&[f64]>,
) -> Result<VlfReport> {
    let pairs = chain_values(v, set, angles)?;
    let fully_inseparable = pairs.iter().all(PairValue::violates);
    Ok(VlfReport {
        pairs,
        threshold: VLF_THRESHOLD,
        set: set.to_vec(),
        fully_inseparable,
        transmittance_applied: v.transmittance(),
        pure: (v.matrix().clone().determinant() - 1.0).abs() <= PURITY_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleScan {
    pub theta_a: f64,
    pub theta_b: f64,
    pub value: f64,
}

/// Exhaustive search over the `grid_size × grid_size` grid `2πk/grid_size`,
/// plus the default angles `(0, π/2)`. Ties within [`TIE_TOL`] go to the
/// lexicographically smallest `(θ_a, θ_b)`.
pub fn angle_scan(v: &CovarianceMatrix, a: usize, b: usize, grid_size: usize) -> Result<AngleScan> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument(format!("grid_size must be >= 2, got {grid_size}")));
    }
    vlf_pair(v, a, b, 0.0, 0.0)?;
    let m = v.matrix();
    let step = TAU / grid_size as f64;
    let mut candidates: Vec<(f64, f64)> = (0..grid_size * grid_size)
        .map(|k| ((k / grid_size) as f64 * step, (k % grid_size) as f64 * step))
        .collect();
    candidates.push((0.0, FRAC_PI_2));

    let values: Vec<AngleScan> = candidates
        .par_iter()
        .map(|&(ta, tb)| AngleScan {
            theta_a: ta,
            theta_b: tb,
            value: pair_value(m, a, b, ta, tb),
        })
        .collect();

    let min = values.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let best = values
        .into_iter()
        .filter(|s| s.value <= min + TIE_TOL)
        .min_by(|x, y| x.theta_a.total_cmp(&y.theta_a).then(x.theta_b.total_cmp(&y.theta_b)))
        .expect("grid is non-empty");
    Ok(best)
}
