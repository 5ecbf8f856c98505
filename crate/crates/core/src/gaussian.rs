//! Zero-mean Gaussian states: covariance evolution, closed-form covariance
//! matrices for the three special pump profiles, uniform loss and physicality
//! diagnostics.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{self, unit_root, wrap_index, EigenvalueSet};
use crate::model::{self, ArrayConfig, Basis, QuadratureOrdering};
use crate::propagate::{self, pair_coefficients, partner_of, trig_kernels, Propagator};

/// Relative asymmetry accepted when constructing a covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// `|det V − 1|` below which a state counts as pure.
pub const PURITY_TOL: f64 = 1e-8;
/// `V + iΩ ⪰ −PHYSICALITY_TOL`.
pub const PHYSICALITY_TOL: f64 = 1e-9;
pub const SYMPLECTIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
    basis: Basis,
    z: f64,
    transmittance: f64,
}

impl CovarianceMatrix {
    /// Checks shape and symmetry, then stores the exactly symmetrised matrix.
    pub fn new(matrix: DMatrix<f64>, basis: Basis, z: f64) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_multiple_of(2) || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "covariance must be square with positive even dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * matrix.amax().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(CovarianceMatrix {
            matrix,
            basis,
            z,
            transmittance: 1.0,
        })
    }

    pub fn vacuum(n_modes: usize, basis: Basis, z: f64) -> Self {
        CovarianceMatrix {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            basis,
            z,
            transmittance: 1.0,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Cumulative transmittance applied through [`apply_loss`].
    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    pub fn ordering(&self) -> QuadratureOrdering {
        QuadratureOrdering
    }
}

/// `V(z) = M V(0) Mᵀ`
pub fn evolve_covariance(prop: &Propagator, v0: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if prop.basis != v0.basis {
        return Err(Error::BasisMismatch {
            expected: v0.basis,
            got: prop.basis,
        });
    }
    if prop.matrix.nrows() != v0.matrix.nrows() {
        return Err(Error::DimensionMismatch {
            expected: v0.matrix.nrows(),
            got: prop.matrix.nrows(),
        });
    }
    let m = &prop.matrix;
    let out = m * &v0.matrix * m.transpose();
    let mut cov = CovarianceMatrix::new(out, v0.basis, v0.z + prop.z)?;
    cov.transmittance = v0.transmittance;
    Ok(cov)
}

/// Kernel `K(d) = Σ_p e^{i2πpd/N} w_p / N`, so that
/// `Σ_p S_{i,p} S*_{p,j} w_p = K(i − j)` and `Σ_p S*_{i,p} S_{p,j} w_p = K(j − i)`.
///
/// The ring is translation invariant, so each printed sum over `p` depends on
/// `(i, j)` only through `i − j`; the kernel evaluates it once per offset.
fn ring_kernel(weights: &[Complex64]) -> Vec<Complex64> {
    let n = weights.len();
    let roots: Vec<Complex64> = (0..n as i64).map(|k| unit_root(k, n)).collect();
    (0..n)
        .map(|d| {
            (1..=n)
                .map(|p| roots[(p * d) % n] * weights[p - 1])
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

fn kernel_at(kernel: &[Complex64], d: i64) -> Complex64 {
    kernel[d.rem_euclid(kernel.len() as i64) as usize]
}

/// Assemble a complex `2N×2N` matrix from `V(x_i,x_j)`, `V(y_i,y_j)`,
/// `V(x_i,y_j)` element functions of 1-based `(i, j)`.
fn assemble(
    n: usize,
    xx: impl Fn(i64, i64) -> Complex64,
    yy: impl Fn(i64, i64) -> Complex64,
    xy: impl Fn(i64, i64) -> Complex64,
) -> DMatrix<Complex64> {
    let mut v = DMatrix::zeros(2 * n, 2 * n);
    for i in 1..=n as i64 {
        for j in 1..=n as i64 {
            let (r, c) = (2 * (i - 1) as usize, 2 * (j - 1) as usize);
            v[(r, c)] = xx(i, j);
            v[(r + 1, c + 1)] = yy(i, j);
            v[(r, c + 1)] = xy(i, j);
            v[(c + 1, r)] = xy(i, j);
        }
    }
    v
}

fn uniform_inputs(config: &ArrayConfig, operation: &'static str, want_r: fn(usize) -> usize) -> Result<EigenvalueSet> {
    config.validated()?;
    let unsupported = || Error::UnsupportedProfile {
        operation,
        profile: config.pump.label(),
    };
    let r = config.shift_index().ok_or_else(unsupported)??;
    if r != want_r(config.n_modes) {
        return Err(unsupported());
    }
    if !config.is_homogeneous() {
        return Err(Error::InvalidArgument(format!("{operation} requires homogeneous coupling")));
    }
    fourier::eigenvalues(config.n_modes, config.coupling_per_mm)
}

fn check_z(z: f64) -> Result<()> {
    if z.is_finite() && z >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("z must be finite and >= 0, got {z}")))
    }
}

/// Complex evaluation of the uniform-pump sums with
/// `ζ = cos² + (λ²/F²) sin²`, `β = (2i|η|/F) sin cos`, `γ = (2|η|λ/F²) sin²`,
/// `δ = (4|η|²/F²) sin²`. The imaginary parts cancel only after summation.
pub fn closed_form_sums_r0(config: &ArrayConfig, z: f64) -> Result<DMatrix<Complex64>> {
    let ev = uniform_inputs(config, "covariance_r0", |n| n)?;
    check_z(z)?;
    let n = config.n_modes;
    let eta = config.eta_per_mm;

    let mut zeta = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for &lambda in ev.values() {
        let (cos, sinc) = trig_kernels(lambda * lambda - 4.0 * eta * eta, z);
        zeta.push(Complex64::from(cos * cos + lambda * lambda * sinc * sinc));
        beta.push(Complex64::new(0.0, 2.0 * eta * sinc * cos));
        gamma.push(Complex64::from(2.0 * eta * lambda * sinc * sinc));
        delta.push(Complex64::from(4.0 * eta * eta * sinc * sinc));
    }
    let combine = |f: &dyn Fn(usize) -> Complex64| ring_kernel(&(0..n).map(f).collect::<Vec<_>>());
    let xx_a = combine(&|p| zeta[p] - beta[p] - gamma[p]);
    let xx_b = combine(&|p| beta[p] - gamma[p] + delta[p]);
    let yy_a = combine(&|p| zeta[p] + beta[p] + gamma[p]);
    let yy_b = combine(&|p| gamma[p] - beta[p] + delta[p]);
    let xy_a = combine(&|p| beta[p] + gamma[p]);
    let xy_b = combine(&|p| beta[p] - gamma[p]);
    let i = Complex64::new(0.0, 1.0);

    Ok(assemble(
        n,
        |a, b| kernel_at(&xx_a, a - b) + kernel_at(&xx_b, b - a),
        |a, b| kernel_at(&yy_a, a - b) + kernel_at(&yy_b, b - a),
        |a, b| i * (kernel_at(&xy_a, a - b) + kernel_at(&xy_b, b - a)),
    ))
}

/// Complex evaluation for the `(−i)^j` pump (`r = N/4`), partner
/// `p̄ = 3N/4 − p`, with `β̃_p` and `δ̃_p`:
///
/// ```text
/// ⟨A_i A_j⟩   = −(−i)^j Σ_p S_{i,p} S*_{p,j} β̃_p δ̃_p
/// ⟨A_i A_j†⟩  =          Σ_p S_{i,p} S*_{p,j} |β̃_p|²
/// ⟨A_i† A_j⟩  =          Σ_p S*_{i,p} S_{p,j} |δ̃_p|²
/// ```
///
/// The propagation phases of `p` and `p̄` cancel in `⟨A_i A_j⟩`, and `V(x, y)`
/// keeps the antisymmetric part of `⟨A_i† A_j⟩`.
pub fn closed_form_sums_rquarter(config: &ArrayConfig, z: f64) -> Result<DMatrix<Complex64>> {
    let ev = uniform_inputs(config, "covariance_rquarter", |n| n / 4)?;
    check_z(z)?;
    let n = config.n_modes;
    let r = n / 4;
    let eta = config.eta_per_mm;

    let mut beta_delta = Vec::with_capacity(n);
    let mut beta_sq = Vec::with_capacity(n);
    let mut delta_sq = Vec::with_capacity(n);
    for p in 1..=n {
        let partner = partner_of(p, r, n);
        let c = pair_coefficients(ev.get(p as i64), ev.get(partner as i64), eta, z);
        beta_delta.push(c.beta * c.delta);
        beta_sq.push(Complex64::from(c.beta.norm_sqr()));
        delta_sq.push(Complex64::from(c.delta.norm_sqr()));
    }
    let pair_k = ring_kernel(&beta_delta);
    let direct_k = ring_kernel(&beta_sq);
    let number_k = ring_kernel(&delta_sq);
    let minus_i_pow = |j: i64| unit_root(-j, 4);

    let anomalous = |a: i64, b: i64| -minus_i_pow(b) * kernel_at(&pair_k, a - b);
    let normal = |a: i64, b: i64| kernel_at(&direct_k, a - b) + kernel_at(&number_k, b - a);
    let number = |a: i64, b: i64| kernel_at(&number_k, b - a);
    let i = Complex64::new(0.0, 1.0);

    Ok(assemble(
        n,
        |a, b| anomalous(a, b) + anomalous(a, b).conj() + normal(a, b),
        |a, b| -anomalous(a, b) - anomalous(a, b).conj() + normal(a, b),
        |a, b| i * (number(b, a) - number(a, b)) + 2.0 * anomalous(a, b).im,
    ))
}

fn real_part(v: DMatrix<Complex64>, z: f64) -> Result<CovarianceMatrix> {
    let re = v.map(|c| c.re);
    let scale = re.amax().max(1.0);
    let im = v.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if im > 1e-10 * scale {
        return Err(Error::InvalidArgument(format!(
            "closed-form covariance has imaginary residue {im:.3e}"
        )));
    }
    CovarianceMatrix::new(re, Basis::Individual, z)
}

/// Max imaginary part left in the complex closed-form sums.
pub fn imaginary_residue(sums: &DMatrix<Complex64>) -> f64 {
    sums.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}

/// Individual-basis covariance for the uniform pump, vacuum input.
pub fn covariance_r0(config: &ArrayConfig, z: f64) -> Result<CovarianceMatrix> {
    let sums = closed_form_sums_r0(config, z)?;
    if z == 0.0 {
        return Ok(CovarianceMatrix::vacuum(config.n_modes, Basis::Individual, 0.0));
    }
    real_part(sums, z)
}

/// Alternating-π pump: a product of single-mode squeezed states,
/// `V(x_i,x_i) = V(y_i,y_i) = cosh(4|η|z)`, `V(x_i,y_i) = −(−1)^i sinh(4|η|z)`.
pub fn covariance_rhalf(config: &ArrayConfig, z: f64) -> Result<CovarianceMatrix> {
    uniform_inputs(config, "covariance_rhalf", |n| n / 2)?;
    check_z(z)?;
    let n = config.n_modes;
    let arg = 4.0 * config.eta_per_mm * z;
    let (ch, sh) = (arg.cosh(), arg.sinh());
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 1..=n {
        let (x, y) = (QuadratureOrdering::x_index(i), QuadratureOrdering::y_index(i));
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        m[(x, x)] = ch;
        m[(y, y)] = ch;
        m[(x, y)] = -sign * sh;
        m[(y, x)] = -sign * sh;
    }
    CovarianceMatrix::new(m, Basis::Individual, z)
}

pub fn covariance_rquarter(config: &ArrayConfig, z: f64) -> Result<CovarianceMatrix> {
    if !config.n_modes.is_multiple_of(4) {
        return Err(Error::Divisibility {
            relation: "r = N/4",
            divisor: 4,
            n_modes: config.n_modes,
        });
    }
    let sums = closed_form_sums_rquarter(config, z)?;
    if z == 0.0 {
        return Ok(CovarianceMatrix::vacuum(config.n_modes, Basis::Individual, 0.0));
    }
    real_part(sums, z)
}

/// Which evaluation path produces a covariance matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Closed form when one exists, else the Fourier solution, else `exp(Δz)`.
    #[default]
    Auto,
    /// Always `exp(Δz)`.
    Oracle,
    /// Closed forms only; fails for custom or inhomogeneous configurations.
    Analytic,
}

/// Lossless individual-basis covariance at `z` for vacuum input.
pub fn covariance_at(config: &ArrayConfig, z: f64, route: Route) -> Result<CovarianceMatrix> {
    config.validated()?;
    check_z(z)?;
    let n = config.n_modes;
    let vacuum = CovarianceMatrix::vacuum(n, Basis::Individual, 0.0);
    let oracle = || -> Result<CovarianceMatrix> {
        let drift = model::build_drift_matrix(config)?;
        evolve_covariance(&propagate::numerical_propagator(&drift, z)?, &vacuum)
    };
    if route == Route::Oracle {
        return oracle();
    }
    let shift = match config.shift_index() {
        Some(r) if config.is_homogeneous() => Some(r?),
        _ => None,
    };
    match shift {
        Some(r) if r == n => covariance_r0(config, z),
        Some(r) if 2 * r == n => covariance_rhalf(config, z),
        Some(r) if 4 * r == n => covariance_rquarter(config, z),
        Some(_) => evolve_covariance(&propagate::analytic_propagator(config, z)?, &vacuum),
        None if route == Route::Analytic => Err(Error::UnsupportedProfile {
            operation: "analytic covariance",
            profile: if config.is_homogeneous() {
                config.pump.label()
            } else {
                format!("{} with inhomogeneous coupling", config.pump.label())
            },
        }),
        None => oracle(),
    }
}

/// Uniform loss `V_T = T V + (1 − T) 𝟙`.
pub fn apply_loss(v: &CovarianceMatrix, transmittance: f64) -> Result<CovarianceMatrix> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(Error::Transmittance(transmittance));
    }
    let dim = v.matrix.nrows();
    let matrix = &v.matrix * transmittance + DMatrix::identity(dim, dim) * (1.0 - transmittance);
    Ok(CovarianceMatrix {
        matrix,
        basis: v.basis,
        z: v.z,
        transmittance: v.transmittance * transmittance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDiagnostics {
    pub determinant: f64,
    /// Smallest eigenvalue of `V + iΩ`.
    pub min_uncertainty_eigenvalue: f64,
    pub symmetry_residual: f64,
    pub symplectic_residual: Option<f64>,
    pub flags: Vec<String>,
}

impl GaussianDiagnostics {
    pub fn is_pure(&self) -> bool {
        (self.determinant - 1.0).abs() <= PURITY_TOL
    }

    pub fn is_physical(&self) -> bool {
        self.min_uncertainty_eigenvalue >= -PHYSICALITY_TOL
    }

    pub fn ok(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Smallest eigenvalue of the Hermitian `V + iΩ`, via its real symmetric
/// embedding `[[V, −Ω], [Ω, V]]` (same spectrum, doubled).
pub fn min_uncertainty_eigenvalue(v: &DMatrix<f64>) -> f64 {
    let dim = v.nrows();
    let omega = QuadratureOrdering::symplectic_form(dim / 2);
    let mut big = DMatrix::zeros(2 * dim, 2 * dim);
    big.view_mut((0, 0), (dim, dim)).copy_from(v);
    big.view_mut((dim, dim), (dim, dim)).copy_from(v);
    big.view_mut((0, dim), (dim, dim)).copy_from(&(-&omega));
    big.view_mut((dim, 0), (dim, dim)).copy_from(&omega);
    SymmetricEigen::new(big).eigenvalues.min()
}

pub fn purity_and_symplectic_report(v: &CovarianceMatrix, prop: Option<&Propagator>) -> GaussianDiagnostics {
    let m = v.matrix();
    let determinant = m.clone().determinant();
    let min_eig = min_uncertainty_eigenvalue(m);
    let symmetry_residual = (m - m.transpose()).amax();
    let symplectic_residual = prop.map(|p| p.symplectic_residual());

    let mut flags = Vec::new();
    if symmetry_residual > SYMMETRY_TOL * m.amax().max(1.0) {
        flags.push(format!("covariance asymmetric by {symmetry_residual:.3e}"));
    }
    if min_eig < -PHYSICALITY_TOL {
        flags.push(format!("V + iΩ has negative eigenvalue {min_eig:.3e}"));
    }
    if let Some(res) = symplectic_residual {
        if res > SYMPLECTIC_TOL {
            flags.push(format!("propagator symplectic residual {res:.3e}"));
        }
    }
    GaussianDiagnostics {
        determinant,
        min_uncertainty_eigenvalue: min_eig,
        symmetry_residual,
        symplectic_residual,
        flags,
    }
}

/// `(i, j)` index pairs in the same 2×2 mode block.
pub fn same_mode(row: usize, col: usize) -> bool {
    row / 2 == col / 2
}

/// Mode index (1-based) owning a quadrature row.
pub fn mode_of(row: usize, n_modes: usize) -> usize {
    wrap_index(row as i64 / 2 + 1, n_modes)
}
