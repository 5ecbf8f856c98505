//! Symplectic propagators `ξ(z) = M(z) ξ(0)`, computed either numerically as
//! `exp(Δz)` or from the closed-form two-mode-squeezer solution of the
//! Fourier-mode equations
//!
//! ```text
//! dB_p/dz = −iλ_p B_p − 2i|η| B†_{p̄},   p̄ = N − (p + r) mod N.
//! ```
//!
//! A complex relation `B(z) = a B(0) + b B†(0)` maps onto the quadratures
//! `(x, y)` as the real block
//! `[[Re a + Re b, −Im a + Im b], [Im a + Im b, Re a − Re b]]`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{self, wrap_index, EigenvalueSet, FourierBasis};
use crate::model::{self, ArrayConfig, Basis, QuadratureOrdering, Regime};

/// Below this `|F z|` the trigonometric kernels switch to their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Numerical,
    AnalyticR0,
    AnalyticRN2,
    AnalyticRN4,
    AnalyticGeneralR,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub matrix: DMatrix<f64>,
    pub z: f64,
    pub basis: Basis,
    pub method: Method,
}

impl Propagator {
    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Max entry of `M Ω Mᵀ − Ω`.
    pub fn symplectic_residual(&self) -> f64 {
        symplectic_residual(&self.matrix)
    }

    /// Same propagator expressed in the other basis.
    pub fn in_basis(&self, target: Basis, basis: &FourierBasis) -> Result<Propagator> {
        if basis.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: 2 * basis.n_modes(),
                got: self.matrix.nrows(),
            });
        }
        let matrix = match (self.basis, target) {
            (a, b) if a == b => self.matrix.clone(),
            (Basis::Fourier, Basis::Individual) => basis.to_individual(&self.matrix),
            _ => basis.to_fourier(&self.matrix),
        };
        Ok(Propagator {
            matrix,
            basis: target,
            ..self.clone()
        })
    }
}

pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let omega = QuadratureOrdering::symplectic_form(m.nrows() / 2);
    (m * &omega * m.transpose() - omega).amax()
}

/// `exp(Δz)` by scaling and squaring with a Padé approximant.
pub fn numerical_propagator(drift: &DMatrix<f64>, z: f64) -> Result<Propagator> {
    if !drift.is_square() || !drift.nrows().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "drift matrix must be square with even dimension, got {}x{}",
            drift.nrows(),
            drift.ncols()
        )));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidArgument(format!("z must be finite and >= 0, got {z}")));
    }
    if drift.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("drift matrix"));
    }
    let matrix = if z == 0.0 {
        DMatrix::identity(drift.nrows(), drift.ncols())
    } else {
        (drift * z).exp()
    };
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(Propagator {
        matrix,
        z,
        basis: Basis::Individual,
        method: Method::Numerical,
    })
}

/// `(cos(F z), sin(F z)/F)` as analytic functions of `F²`: hyperbolic for
/// `F² < 0`, series near `F = 0`.
pub(crate) fn trig_kernels(f_squared: f64, z: f64) -> (f64, f64) {
    let w = f_squared * z * z;
    if w.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD {
        let cos = 1.0 - w / 2.0 + w * w / 24.0;
        let sinc = z * (1.0 - w / 6.0 + w * w / 120.0);
        (cos, sinc)
    } else if f_squared > 0.0 {
        let f = f_squared.sqrt();
        ((f * z).cos(), (f * z).sin() / f)
    } else {
        let f = (-f_squared).sqrt();
        ((f * z).cosh(), (f * z).sinh() / f)
    }
}

/// Coefficients of `B_p(z) = u B_p(0) + v B†_{p̄}(0)` for a two-mode squeezer
/// with propagation constants `λ_p`, `λ_{p̄}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PairCoefficients {
    pub u: Complex64,
    pub v: Complex64,
    pub f_squared: f64,
    /// Common phase `e^{−i(λ_p − λ_{p̄})z/2}`.
    pub phase: Complex64,
    /// `β̃ = cos(Fz) − i (λ_p + λ_{p̄}) sin(Fz)/(2F)`
    pub beta: Complex64,
    /// `δ̃ = 2i|η| sin(Fz)/F`
    pub delta: Complex64,
}

pub(crate) fn pair_coefficients(lambda_p: f64, lambda_partner: f64, eta: f64, z: f64) -> PairCoefficients {
    let mean = 0.5 * (lambda_p + lambda_partner);
    let f_squared = mean * mean - 4.0 * eta * eta;
    let (cos, sinc) = trig_kernels(f_squared, z);
    let phase = Complex64::from_polar(1.0, -0.5 * (lambda_p - lambda_partner) * z);
    let beta = Complex64::new(cos, -mean * sinc);
    let delta = I * (2.0 * eta * sinc);
    PairCoefficients {
        u: phase * beta,
        v: -phase * delta,
        f_squared,
        phase,
        beta,
        delta,
    }
}

/// `[[Re a + Re b, −Im a + Im b], [Im a + Im b, Re a − Re b]]`
pub(crate) fn quadrature_block(a: Complex64, b: Complex64) -> Matrix2<f64> {
    Matrix2::new(a.re + b.re, -a.im + b.im, a.im + b.im, a.re - b.re)
}

/// One Fourier mode together with its squeezing partner.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePairBlock {
    pub p: usize,
    pub partner: usize,
    /// `F_p²`; negative in the hyperbolic regime where `F_p` is imaginary.
    pub f_squared: f64,
    pub regime: Regime,
    pub block: Matrix2<f64>,
}

impl ModePairBlock {
    /// `|F_p|`, the real or imaginary magnitude.
    pub fn f_magnitude(&self) -> f64 {
        self.f_squared.abs().sqrt()
    }
}

fn check_inputs(n_modes: usize, eta: f64, z: f64) -> Result<()> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { got: 0, min: 1 });
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("|eta| must be finite and >= 0, got {eta}")));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::InvalidArgument(format!("z must be finite and >= 0, got {z}")));
    }
    Ok(())
}

/// Per-mode `2×2` blocks for the uniform pump.
///
/// With `r = 0` the modes `p` and `N − p` share `λ_p` and are two-mode
/// squeezed together. The block returned for `p` propagates the quadratures of
/// the standing-wave combination `(B_p + B_{N−p})/√2` (just `B_p` when
/// `p = N − p`):
///
/// ```text
/// [[cos F_p z,              (λ_p − 2|η|) sin F_p z / F_p],
///  [−(λ_p + 2|η|) sin F_p z / F_p,            cos F_p z]]
/// ```
///
/// which for `|λ_p| > 2|η|` is `[[cos, ±e^{−r_p} sin], [∓e^{r_p} sin, cos]]`
/// with `r_p = ½ ln[(λ_p + 2|η|)/(λ_p − 2|η|)]` and the upper sign for
/// `λ_p > 0`. The companion `(B_p − B_{N−p})/√2` follows the same block with
/// `|η| → −|η|`. Zero modes get the `cosh(2|η|z)`, `sinh(2|η|z)` form.
pub fn analytic_fourier_blocks_r0(
    n_modes: usize,
    coupling: f64,
    eta: f64,
    z: f64,
) -> Result<Vec<ModePairBlock>> {
    check_inputs(n_modes, eta, z)?;
    let ev = fourier::eigenvalues(n_modes, coupling)?;
    Ok((1..=n_modes)
        .map(|p| {
            let lambda = ev.get(p as i64);
            let f_squared = lambda * lambda - 4.0 * eta * eta;
            let (cos, sinc) = trig_kernels(f_squared, z);
            let block = Matrix2::new(
                cos,
                (lambda - 2.0 * eta) * sinc,
                -(lambda + 2.0 * eta) * sinc,
                cos,
            );
            ModePairBlock {
                p,
                partner: wrap_index(n_modes as i64 - p as i64, n_modes),
                f_squared,
                regime: model::classify(lambda.abs(), 2.0 * eta),
                block,
            }
        })
        .collect())
}

/// Fourier-basis propagator for the shift pump `η_j = |η| e^{−i2πjr/N}`.
///
/// Row pair `p` receives `quadrature_block(u_p, 0)` in column pair `p` and
/// `quadrature_block(0, v_p)` in column pair `p̄`; the two add up when `p̄ = p`.
pub fn analytic_general_r(n_modes: usize, coupling: f64, eta: f64, r: usize, z: f64) -> Result<Propagator> {
    check_inputs(n_modes, eta, z)?;
    let ev = fourier::eigenvalues(n_modes, coupling)?;
    let r = wrap_index(r as i64, n_modes);
    let zero = Complex64::new(0.0, 0.0);
    let mut matrix = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for p in 1..=n_modes {
        let partner = partner_of(p, r, n_modes);
        let c = pair_coefficients(ev.get(p as i64), ev.get(partner as i64), eta, z);
        let own = quadrature_block(c.u, zero);
        let cross = quadrature_block(zero, c.v);
        let (row, own_col, cross_col) = (2 * (p - 1), 2 * (p - 1), 2 * (partner - 1));
        for a in 0..2 {
            for b in 0..2 {
                matrix[(row + a, own_col + b)] += own[(a, b)];
                matrix[(row + a, cross_col + b)] += cross[(a, b)];
            }
        }
    }
    let method = if r == n_modes {
        Method::AnalyticR0
    } else {
        Method::AnalyticGeneralR
    };
    Ok(Propagator {
        matrix,
        z,
        basis: Basis::Fourier,
        method,
    })
}

/// `p̄ = N − (p + r)` wrapped into `1..=N`.
pub fn partner_of(p: usize, r: usize, n_modes: usize) -> usize {
    wrap_index(n_modes as i64 - (p as i64 + r as i64), n_modes)
}

/// Individual-basis solution `A_j(z) = Σ_{j'} [U_{j,j'} A_{j'}(0) − U'_{j,j'} A†_{j'}(0)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndividualSolution {
    pub direct: DMatrix<Complex64>,
    pub conjugate: DMatrix<Complex64>,
    pub method: Method,
}

impl IndividualSolution {
    /// `max_{j'} |Σ_j (|U_{j,j'}|² − |U'_{j,j'}|²) − 1|`
    pub fn normalization_residual(&self) -> f64 {
        let n = self.direct.ncols();
        (0..n)
            .map(|col| {
                let s: f64 = (0..n)
                    .map(|row| self.direct[(row, col)].norm_sqr() - self.conjugate[(row, col)].norm_sqr())
                    .sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_quadratures(&self) -> DMatrix<f64> {
        let n = self.direct.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let block = quadrature_block(self.direct[(j, k)], -self.conjugate[(j, k)]);
                m.fixed_view_mut::<2, 2>(2 * j, 2 * k).copy_from(&block);
            }
        }
        m
    }
}

/// `Σ_p S_{j,p} S*_{p,j'} f_p` for all `(j, j')`.
fn fourier_synthesis(basis: &FourierBasis, weights: &[Complex64]) -> DMatrix<Complex64> {
    let n = basis.n_modes();
    DMatrix::from_fn(n, n, |row, col| {
        let (j, jp) = ((row + 1) as i64, (col + 1) as i64);
        (1..=n as i64)
            .map(|p| basis.entry(j, p) * basis.entry(p, jp).conj() * weights[(p - 1) as usize])
            .sum()
    })
}

fn closed_form_shift(config: &ArrayConfig, operation: &'static str) -> Result<(usize, EigenvalueSet)> {
    config.validated()?;
    if !config.is_homogeneous() {
        return Err(Error::InvalidArgument(format!(
            "{operation} requires homogeneous coupling"
        )));
    }
    let unsupported = || Error::UnsupportedProfile {
        operation,
        profile: config.pump.label(),
    };
    let r = config.shift_index().ok_or_else(unsupported)??;
    let ev = fourier::eigenvalues(config.n_modes, config.coupling_per_mm)?;
    Ok((r, ev))
}

/// The `U`, `U'` (r = 0), `Ũ` (r = N/2) and `Ū`, `β̃`, `δ̃` (r = N/4) solutions.
pub fn individual_solution(config: &ArrayConfig, z: f64) -> Result<IndividualSolution> {
    let (r, ev) = closed_form_shift(config, "analytic_individual_propagator")?;
    let n = config.n_modes;
    let eta = config.eta_per_mm;
    check_inputs(n, eta, z)?;
    let basis = fourier::dft_matrix(n)?;

    if r == n {
        let mut direct_w = Vec::with_capacity(n);
        let mut conj_w = Vec::with_capacity(n);
        for p in 1..=n as i64 {
            let lambda = ev.get(p);
            let (cos, sinc) = trig_kernels(lambda * lambda - 4.0 * eta * eta, z);
            direct_w.push(Complex64::new(cos, -lambda * sinc));
            conj_w.push(I * (2.0 * eta * sinc));
        }
        Ok(IndividualSolution {
            direct: fourier_synthesis(&basis, &direct_w),
            conjugate: fourier_synthesis(&basis, &conj_w),
            method: Method::AnalyticR0,
        })
    } else if 2 * r == n {
        let linear: Vec<Complex64> = (1..=n as i64)
            .map(|p| Complex64::from_polar(1.0, -ev.get(p) * z))
            .collect();
        let u_tilde = fourier_synthesis(&basis, &linear);
        let (ch, sh) = ((2.0 * eta * z).cosh(), (2.0 * eta * z).sinh());
        let direct = u_tilde.map(|u| u * ch);
        // U' = (−1)^{j'} i sinh(2|η|z) Ũ
        let conjugate = DMatrix::from_fn(n, n, |row, col| {
            let sign = if (col + 1) % 2 == 0 { 1.0 } else { -1.0 };
            u_tilde[(row, col)] * I * (sign * sh)
        });
        Ok(IndividualSolution {
            direct,
            conjugate,
            method: Method::AnalyticRN2,
        })
    } else if 4 * r == n {
        let mut beta_w = Vec::with_capacity(n);
        let mut delta_w = Vec::with_capacity(n);
        for p in 1..=n {
            let partner = partner_of(p, r, n);
            let c = pair_coefficients(ev.get(p as i64), ev.get(partner as i64), eta, z);
            beta_w.push(c.phase * c.beta);
            delta_w.push(c.phase * c.delta);
        }
        let direct = fourier_synthesis(&basis, &beta_w);
        let u_bar_delta = fourier_synthesis(&basis, &delta_w);
        // U' = (−i)^{j'} Σ_p S S* e^{…} δ̃_p
        let conjugate = DMatrix::from_fn(n, n, |row, col| {
            u_bar_delta[(row, col)] * fourier::unit_root(-((col + 1) as i64), 4)
        });
        Ok(IndividualSolution {
            direct,
            conjugate,
            method: Method::AnalyticRN4,
        })
    } else {
        Err(Error::UnsupportedProfile {
            operation: "analytic_individual_propagator",
            profile: config.pump.label(),
        })
    }
}

/// Closed-form individual-basis propagator for `r ∈ {0, N/2, N/4}`.
pub fn analytic_individual_propagator(config: &ArrayConfig, z: f64) -> Result<Propagator> {
    let sol = individual_solution(config, z)?;
    Ok(Propagator {
        matrix: sol.to_quadratures(),
        z,
        basis: Basis::Individual,
        method: sol.method,
    })
}

/// Individual-basis propagator for any shift profile via the Fourier solution.
pub fn analytic_propagator(config: &ArrayConfig, z: f64) -> Result<Propagator> {
    let (r, _) = closed_form_shift(config, "analytic_propagator")?;
    let basis = fourier::dft_matrix(config.n_modes)?;
    analytic_general_r(config.n_modes, config.coupling_per_mm, config.eta_per_mm, r, z)?
        .in_basis(Basis::Individual, &basis)
}
