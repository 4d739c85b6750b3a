//! Complex linear-algebra kernels shared by the rest of the crate.
//!
//! Everything operates on dense, dynamically sized matrices of
//! `Complex<f64>`. The solvers are small (network dimensions are a handful
//! of antennas), so a hand-rolled Cholesky factorization is used instead of
//! a general decomposition: it gives direct control over the pivot checks
//! that distinguish "not Hermitian", "not positive definite" and
//! "numerically singular" failure modes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Complex double-precision scalar.
pub type C64 = Complex<f64>;
/// Dense complex column vector.
pub type CVec = DVector<C64>;
/// Dense complex matrix.
pub type CMat = DMatrix<C64>;

/// Absolute tolerance on `|a_ij - conj(a_ji)|` before a matrix is rejected
/// as non-Hermitian.
const HERMITIAN_TOL: f64 = 1e-10;
/// A Cholesky pivot below this fraction of the Gram-matrix trace marks the
/// normal equations as numerically singular.
const SINGULAR_PIVOT_REL: f64 = 1e-12;
/// Vectors with norm below this cannot be meaningfully rescaled.
const ZERO_NORM_TOL: f64 = 1e-15;

/// Failure modes of the numeric kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    /// The matrix handed to a Hermitian solver was not Hermitian.
    #[error("matrix is not Hermitian: worst asymmetry {0:.3e}")]
    NotHermitian(f64),
    /// A Cholesky pivot came out non-positive.
    #[error("matrix is not positive definite: pivot {pivot:.3e} at row {index}")]
    NotPositiveDefinite { pivot: f64, index: usize },
    /// The (possibly regularized) normal equations are numerically singular.
    #[error("normal equations are numerically singular: pivot {0:.3e}")]
    Singular(f64),
    /// A vector with numerically zero norm cannot be scaled to a target power.
    #[error("cannot normalize a vector with zero norm")]
    ZeroVector,
}

/// Largest deviation of `a` from Hermitian symmetry, `max |a_ij - conj(a_ji)|`.
fn hermitian_asymmetry(a: &CMat) -> f64 {
    let d = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Lower-triangular Cholesky factor of a Hermitian matrix, `a = L Lᴴ`.
///
/// Fails with `(pivot, row)` as soon as a pivot drops to `floor` or below
/// (NaN pivots fail too). The caller maps the failure onto the error that
/// fits its contract.
fn factor_lower(a: &CMat, floor: f64) -> Result<CMat, (f64, usize)> {
    let d = a.nrows();
    let mut l = CMat::zeros(d, d);
    for j in 0..d {
        let mut pivot = a[(j, j)].re;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        if !(pivot > floor) {
            return Err((pivot, j));
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in (j + 1)..d {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L Lᴴ x = b` given the lower factor `L`.
fn solve_with_factor(l: &CMat, b: &CVec) -> CVec {
    let d = l.nrows();
    let mut y = b.clone();
    for i in 0..d {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = y;
    for i in (0..d).rev() {
        let mut s = x[i];
        for k in (i + 1)..d {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `a x = b` for Hermitian positive-definite `a`.
///
/// Rejects matrices whose asymmetry exceeds an absolute `1e-10` and fails
/// with [`NumericsError::NotPositiveDefinite`] on the first non-positive
/// Cholesky pivot.
pub fn hpd_solve(a: &CMat, b: &CVec) -> Result<CVec, NumericsError> {
    assert_eq!(a.nrows(), a.ncols(), "hpd_solve needs a square matrix");
    assert_eq!(a.nrows(), b.len(), "hpd_solve: dimension mismatch");
    let l = hpd_factor(a)?;
    Ok(solve_with_factor(&l, b))
}

/// Solves `a X = B` column-by-column for Hermitian positive-definite `a`,
/// reusing a single factorization.
pub fn hpd_solve_mat(a: &CMat, b: &CMat) -> Result<CMat, NumericsError> {
    assert_eq!(a.nrows(), a.ncols(), "hpd_solve_mat needs a square matrix");
    assert_eq!(a.nrows(), b.nrows(), "hpd_solve_mat: dimension mismatch");
    let l = hpd_factor(a)?;
    let mut x = CMat::zeros(b.nrows(), b.ncols());
    for c in 0..b.ncols() {
        let col = CVec::from_iterator(b.nrows(), b.column(c).iter().copied());
        x.set_column(c, &solve_with_factor(&l, &col));
    }
    Ok(x)
}

fn hpd_factor(a: &CMat) -> Result<CMat, NumericsError> {
    let asym = hermitian_asymmetry(a);
    if asym > HERMITIAN_TOL {
        return Err(NumericsError::NotHermitian(asym));
    }
    factor_lower(a, 0.0).map_err(|(pivot, index)| NumericsError::NotPositiveDefinite { pivot, index })
}

/// Ridge-regularized least squares for a row of training symbols.
///
/// Given received samples `y` (one column per symbol time) and the known
/// symbol row `b`, returns the filter `w` minimizing
/// `‖b - wᴴ y‖² + ridge ‖w‖²`, i.e. `w = (y yᴴ + ridge I)⁻¹ y bᴴ`.
///
/// Fails with [`NumericsError::Singular`] when a pivot of the (regularized)
/// Gram matrix falls below `1e-12` times its trace — in practice when
/// `ridge = 0` and `y yᴴ` is rank deficient.
pub fn ls_solve(y: &CMat, b: &CVec, ridge: f64) -> Result<CVec, NumericsError> {
    assert_eq!(y.ncols(), b.len(), "ls_solve: one sample column per symbol");
    assert!(ridge >= 0.0, "ls_solve: ridge must be non-negative");
    let d = y.nrows();
    let mut gram = y * y.adjoint();
    for i in 0..d {
        gram[(i, i)] += C64::from(ridge);
    }
    let trace: f64 = (0..d).map(|i| gram[(i, i)].re).sum();
    let l = factor_lower(&gram, SINGULAR_PIVOT_REL * trace)
        .map_err(|(pivot, _)| NumericsError::Singular(pivot))?;
    let bh = b.map(|z| z.conj());
    let rhs = y * bh;
    Ok(solve_with_factor(&l, &rhs))
}

/// Rescales `x` so that `‖x‖² = p`, preserving its direction.
pub fn normalize_power(x: &CVec, p: f64) -> Result<CVec, NumericsError> {
    assert!(p > 0.0, "normalize_power: target power must be positive");
    let n = x.norm();
    if n < ZERO_NORM_TOL {
        return Err(NumericsError::ZeroVector);
    }
    Ok(x * C64::from(p.sqrt() / n))
}

/// Matrix of i.i.d. circularly symmetric complex Gaussian entries with the
/// given per-entry variance (split evenly between real and imaginary parts).
pub fn cgauss<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, variance: f64) -> CMat {
    assert!(variance > 0.0, "cgauss: variance must be positive");
    let sigma = (variance / 2.0).sqrt();
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * sigma, im * sigma)
    })
}

/// Column-vector variant of [`cgauss`].
pub fn cgauss_vec<R: Rng + ?Sized>(rng: &mut R, dim: usize, variance: f64) -> CVec {
    assert!(variance > 0.0, "cgauss_vec: variance must be positive");
    let sigma = (variance / 2.0).sqrt();
    CVec::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * sigma, im * sigma)
    })
}
