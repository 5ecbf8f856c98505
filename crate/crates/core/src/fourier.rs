//! Discrete Fourier (supermode) machinery for the circulant coupling matrix of
//! a ring of identical, nearest-neighbour coupled waveguides.
//!
//! Waveguide and Fourier indices are 1-based and taken modulo `N`, so index `N`
//! plays the role of index `0`. Matrices are stored 0-based: waveguide `j`
//! lives in row `j - 1`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::Basis;

/// `e^{i 2π k / n}` with the quarter-turn points evaluated exactly.
pub(crate) fn unit_root(k: i64, n: usize) -> Complex64 {
    let n_i = n as i64;
    let k = k.rem_euclid(n_i);
    if (4 * k) % n_i == 0 {
        return match 4 * k / n_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * k as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Wrap a possibly out-of-range 1-based index into `1..=n`.
pub fn wrap_index(index: i64, n: usize) -> usize {
    let r = index.rem_euclid(n as i64) as usize;
    if r == 0 {
        n
    } else {
        r
    }
}

/// Pump shift `r` in the family `η_j ∝ e^{-i 2π j r / N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Zero,
    HalfN,
    QuarterN,
    Index(usize),
}

impl Shift {
    /// Resolve to a concrete index in `1..=N` (with `N` standing for zero).
    pub fn resolve(self, n_modes: usize) -> Result<usize> {
        match self {
            Shift::Zero => Ok(n_modes),
            Shift::HalfN => {
                if !n_modes.is_multiple_of(2) {
                    return Err(Error::Divisibility {
                        relation: "r = N/2",
                        divisor: 2,
                        n_modes,
                    });
                }
                Ok(n_modes / 2)
            }
            Shift::QuarterN => {
                if !n_modes.is_multiple_of(4) {
                    return Err(Error::Divisibility {
                        relation: "r = N/4",
                        divisor: 4,
                        n_modes,
                    });
                }
                Ok(n_modes / 4)
            }
            Shift::Index(r) => Ok(wrap_index(r as i64, n_modes)),
        }
    }
}

/// The unitary, symmetric `N×N` matrix `S_{j,p} = e^{i2πjp/N}/√N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBasis {
    n_modes: usize,
    entries: DMatrix<Complex64>,
}

impl FourierBasis {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `S_{j,p}` for 1-based indices taken modulo `N`.
    pub fn entry(&self, j: i64, p: i64) -> Complex64 {
        let n = self.n_modes;
        self.entries[(wrap_index(j, n) - 1, wrap_index(p, n) - 1)]
    }

    /// Maximum of `|Σ_j S_{j,p} S*_{j,q} − δ_{p,q}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.entries.adjoint() * &self.entries;
        max_identity_deviation(&gram)
    }

    /// Real `2N×2N` form of `S` acting on `(x_1, y_1, …, x_N, y_N)`: each entry
    /// `a + ib` becomes the block `[[a, −b], [b, a]]`. Orthogonal and symplectic.
    pub fn realified(&self) -> DMatrix<f64> {
        realify(&self.entries)
    }

    /// Individual-mode quadrature matrix from a Fourier-mode one: `R M Rᵀ`.
    pub fn to_individual(&self, fourier: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.realified();
        &r * fourier * r.transpose()
    }

    /// Fourier-mode quadrature matrix from an individual-mode one: `Rᵀ M R`.
    pub fn to_fourier(&self, individual: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.realified();
        r.transpose() * individual * &r
    }
}

pub(crate) fn realify(c: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (rows, cols) = c.shape();
    let mut out = DMatrix::zeros(2 * rows, 2 * cols);
    for i in 0..rows {
        for k in 0..cols {
            let z = c[(i, k)];
            out[(2 * i, 2 * k)] = z.re;
            out[(2 * i, 2 * k + 1)] = -z.im;
            out[(2 * i + 1, 2 * k)] = z.im;
            out[(2 * i + 1, 2 * k + 1)] = z.re;
        }
    }
    out
}

fn max_identity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for k in 0..m.ncols() {
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, k)] - target).norm());
        }
    }
    worst
}

pub fn dft_matrix(n_modes: usize) -> Result<FourierBasis> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { got: 0, min: 1 });
    }
    let scale = 1.0 / (n_modes as f64).sqrt();
    let entries = DMatrix::from_fn(n_modes, n_modes, |row, col| {
        let (j, p) = (row as i64 + 1, col as i64 + 1);
        unit_root(j * p, n_modes) * scale
    });
    Ok(FourierBasis { n_modes, entries })
}

/// Propagation constants `λ_p = 2J cos(2πp/N)` of the Fourier modes.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueSet {
    values: Vec<f64>,
    coupling: f64,
}

impl EigenvalueSet {
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Values in index order `p = 1..=N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `λ_p` for a 1-based index taken modulo `N`.
    pub fn get(&self, p: i64) -> f64 {
        self.values[wrap_index(p, self.values.len()) - 1]
    }
}

pub fn eigenvalues(n_modes: usize, coupling: f64) -> Result<EigenvalueSet> {
    if n_modes == 0 {
        return Err(Error::TooFewModes { got: 0, min: 1 });
    }
    let values = (1..=n_modes as i64)
        .map(|p| 2.0 * coupling * unit_root(p, n_modes).re)
        .collect();
    Ok(EigenvalueSet { values, coupling })
}

/// The two zero-eigenvalue Fourier modes `(N/4, 3N/4)`, present only when `N`
/// is a multiple of four.
pub fn zero_mode_indices(n_modes: usize) -> Option<(usize, usize)> {
    if n_modes == 0 || !n_modes.is_multiple_of(4) {
        return None;
    }
    Some((n_modes / 4, 3 * n_modes / 4))
}

/// Max residual of the triple-product identity
/// `√N Σ_j S_{j,r} S_{j,p} S_{j,q} = δ_{p, N−(q+r)}` over all `(p, q)`.
///
/// `Shift::Zero`, `HalfN` and `QuarterN` are the plain, alternating-sign and
/// `i^j`-weighted orthonormality relations.
pub fn verify_orthonormality(n_modes: usize, shift: Shift) -> Result<f64> {
    let basis = dft_matrix(n_modes)?;
    let r = shift.resolve(n_modes)? as i64;
    let n = n_modes as i64;
    let root_n = (n_modes as f64).sqrt();
    let weights: Vec<Complex64> = (1..=n).map(|j| basis.entry(j, r) * root_n).collect();

    let mut worst = 0.0_f64;
    for p in 1..=n {
        for q in 1..=n {
            let sum: Complex64 = (1..=n)
                .map(|j| weights[(j - 1) as usize] * basis.entry(j, p) * basis.entry(j, q))
                .sum();
            let partner = wrap_index(n - (q + r), n_modes) as i64;
            let target = if p == partner { 1.0 } else { 0.0 };
            worst = worst.max((sum - target).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChange {
    IndividualToFourier,
    FourierToIndividual,
}

pub fn change_basis(
    cov: &CovarianceMatrix,
    basis: &FourierBasis,
    direction: BasisChange,
) -> Result<CovarianceMatrix> {
    let dim = cov.matrix().nrows();
    if dim != 2 * basis.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: 2 * basis.n_modes(),
            got: dim,
        });
    }
    let (from, to) = match direction {
        BasisChange::IndividualToFourier => (Basis::Individual, Basis::Fourier),
        BasisChange::FourierToIndividual => (Basis::Fourier, Basis::Individual),
    };
    if cov.basis() != from {
        return Err(Error::BasisMismatch {
            expected: from,
            got: cov.basis(),
        });
    }
    let matrix = match direction {
        BasisChange::IndividualToFourier => basis.to_fourier(cov.matrix()),
        BasisChange::FourierToIndividual => basis.to_individual(cov.matrix()),
    };
    CovarianceMatrix::new(matrix, to, cov.z())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_mode_basis_is_one() {
        let s = dft_matrix(1).unwrap();
        assert_eq!(s.entry(1, 1), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn four_mode_entries() {
        let s = dft_matrix(4).unwrap();
        assert_eq!(s.entry(1, 1), Complex64::new(0.0, 0.5));
        assert_eq!(s.entry(2, 2), Complex64::new(0.5, 0.0));
        // index N is index 0
        assert_eq!(s.entry(4, 3), s.entry(0, 3));
    }

    #[test]
    fn rejects_zero_modes() {
        assert!(matches!(dft_matrix(0), Err(Error::TooFewModes { .. })));
        assert!(eigenvalues(0, 1.0).is_err());
    }

    #[test]
    fn basis_is_unitary_symmetric_and_flat() {
        for n in 1..=64 {
            let s = dft_matrix(n).unwrap();
            assert!(s.unitarity_residual() < 1e-12, "N={n}");
            let scale = 1.0 / (n as f64).sqrt();
            for j in 1..=n as i64 {
                for p in 1..=n as i64 {
                    assert_eq!(s.entry(j, p), s.entry(p, j));
                    assert_abs_diff_eq!(s.entry(j, p).norm(), scale, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn eigenvalues_of_four_ring() {
        let ev = eigenvalues(4, 0.45).unwrap();
        assert_eq!(ev.values(), &[0.0, -0.9, 0.0, 0.9]);
    }

    #[test]
    fn eigenvalue_symmetries() {
        let ev = eigenvalues(8, 1.0).unwrap();
        assert_abs_diff_eq!(ev.get(1), 2.0_f64.sqrt(), epsilon = 1e-15);
        let ev = eigenvalues(8, 0.37).unwrap();
        assert_abs_diff_eq!(ev.get(1), ev.get(7), epsilon = 1e-15);
        assert_abs_diff_eq!(ev.get(1), -ev.get(3), epsilon = 1e-15);
        for n in [6usize, 8, 10, 12] {
            let ev = eigenvalues(n, 0.8).unwrap();
            for p in 1..=n as i64 {
                assert_abs_diff_eq!(ev.get(p), ev.get(n as i64 - p), epsilon = 1e-14);
                assert_abs_diff_eq!(ev.get(p), -ev.get(n as i64 / 2 - p), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn zero_modes() {
        assert_eq!(zero_mode_indices(8), Some((2, 6)));
        assert_eq!(zero_mode_indices(4), Some((1, 3)));
        assert_eq!(zero_mode_indices(6), None);
        for n in (4..=64).step_by(4) {
            let ev = eigenvalues(n, 0.45).unwrap();
            let zeros: Vec<usize> = (1..=n).filter(|&p| ev.get(p as i64).abs() < 1e-12 * 0.45).collect();
            let (l, lp) = zero_mode_indices(n).unwrap();
            assert_eq!(zeros, vec![l, lp]);
        }
    }

    #[test]
    fn orthonormality_relations() {
        assert!(verify_orthonormality(8, Shift::Zero).unwrap() < 1e-12);
        assert!(verify_orthonormality(8, Shift::HalfN).unwrap() < 1e-12);
        assert!(verify_orthonormality(12, Shift::QuarterN).unwrap() < 1e-12);
        for n in [4usize, 8, 12, 16] {
            for r in 1..=n {
                assert!(verify_orthonormality(n, Shift::Index(r)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn orthonormality_divisibility() {
        assert!(matches!(
            verify_orthonormality(6, Shift::QuarterN),
            Err(Error::Divisibility { divisor: 4, .. })
        ));
        assert!(verify_orthonormality(7, Shift::HalfN).is_err());
        // r = N/4 checked as an explicit index is always fine
        assert!(verify_orthonormality(6, Shift::Index(3)).unwrap() < 1e-12);
    }

    #[test]
    fn realified_basis_is_orthogonal() {
        let r = dft_matrix(8).unwrap().realified();
        let gram = r.transpose() * &r;
        let eye = DMatrix::<f64>::identity(16, 16);
        assert!((gram - eye).amax() < 1e-13);
    }

    #[test]
    fn vacuum_is_basis_invariant() {
        let basis = dft_matrix(5).unwrap();
        let vac = CovarianceMatrix::vacuum(5, Basis::Individual, 0.0);
        let out = change_basis(&vac, &basis, BasisChange::IndividualToFourier).unwrap();
        assert!((out.matrix() - vac.matrix()).amax() < 1e-14);
        assert_eq!(out.basis(), Basis::Fourier);
    }

    #[test]
    fn change_basis_checks_inputs() {
        let basis = dft_matrix(4).unwrap();
        let vac = CovarianceMatrix::vacuum(5, Basis::Individual, 0.0);
        assert!(matches!(
            change_basis(&vac, &basis, BasisChange::IndividualToFourier),
            Err(Error::DimensionMismatch { .. })
        ));
        let vac = CovarianceMatrix::vacuum(4, Basis::Fourier, 0.0);
        assert!(matches!(
            change_basis(&vac, &basis, BasisChange::IndividualToFourier),
            Err(Error::BasisMismatch { .. })
        ));
    }
}
