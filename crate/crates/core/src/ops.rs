//! Dense operator algebra in a truncated Fock space.
//!
//! Everything downstream works in the fixed reference number basis: the
//! eigenbasis of `a0† a0` at mω = 1 with ħ = 1.  Matrices are stored dense
//! (`nalgebra::DMatrix<Complex64>`) and capped at desk scale.  Truncating the
//! Fock ladder corrupts only a band of rows/columns near the top of the
//! basis, so operator identities are asserted on the leading ⌊0.7·dim⌋ block
//! via [`leading_dim`] rather than on the full matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Hard cap on the Fock-space dimension (dense desk-scale storage).
pub const MAX_DIM: usize = 512;

/// Fraction of the basis trusted when asserting identities: truncation noise
/// stays inside the top band, the leading block is clean.
pub const LEADING_FRACTION: f64 = 0.7;

/// Default bound on the probability weight a state may carry in the top 10%
/// of basis indices before it is considered corrupted by truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Size of the leading block on which truncated identities are checked.
pub fn leading_dim(dim: usize) -> usize {
    (LEADING_FRACTION * dim as f64).floor() as usize
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim, min: 2 });
    }
    if dim > MAX_DIM {
        return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
    }
    Ok(())
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Annihilation operator in the reference basis: ⟨m|a₀|n⟩ = √n δ_{m,n-1}.
pub fn annihilator(dim: usize) -> Result<CMat> {
    check_dim(dim)?;
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = re((n as f64).sqrt());
    }
    Ok(a)
}

/// Creation operator a₀† (adjoint of [`annihilator`]).
pub fn creator(dim: usize) -> Result<CMat> {
    Ok(annihilator(dim)?.adjoint())
}

/// Diagonal operator f(1 + a₀†a₀), i.e. diag(f(1+n)) for n = 0..dim.
///
/// Returns a domain error if `f` produces a non-finite value anywhere on the
/// truncated spectrum.
pub fn number_function(f: impl Fn(f64) -> f64, dim: usize) -> Result<CMat> {
    check_dim(dim)?;
    let mut m = CMat::zeros(dim, dim);
    for n in 0..dim {
        let v = f(1.0 + n as f64);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "number function is not finite at argument {}",
                1 + n
            )));
        }
        m[(n, n)] = re(v);
    }
    Ok(m)
}

/// Maximum absolute column sum (the induced 1-norm).
pub fn one_norm(m: &CMat) -> f64 {
    let mut max = 0.0f64;
    for j in 0..m.ncols() {
        let s: f64 = (0..m.nrows()).map(|i| m[(i, j)].norm()).sum();
        max = max.max(s);
    }
    max
}

// Order-13 diagonal Padé coefficients for the matrix exponential.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest scaled norm at which the order-13 approximant keeps the backward
// error at the double-precision unit roundoff.
const PADE13_THETA: f64 = 4.25;

/// Matrix exponential by scaling and squaring with a fixed order-13 diagonal
/// Padé approximant.
///
/// The input is scaled by 2^-s until its 1-norm is below the order-13
/// threshold, the approximant is evaluated, and the result is squared s
/// times.  The backward error of the approximant itself is at unit-roundoff
/// level, so any `tol` down to ~4·eps is honoured; requesting less returns an
/// accuracy error carrying what is achievable.
pub fn matrix_exponential(m: &CMat, tol: f64) -> Result<CMat> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::DimensionMismatch {
            left: rows,
            right: cols,
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(
            "matrix exponential of non-finite entries".into(),
        ));
    }
    let achievable = 4.0 * f64::EPSILON;
    if tol < achievable {
        return Err(Error::Accuracy {
            requested: tol,
            achieved: achievable,
        });
    }

    let norm = one_norm(m);
    if norm == 0.0 {
        return Ok(CMat::identity(rows, rows));
    }
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let a = m.map(|z| z / re(2f64.powi(s)));
    let id = CMat::identity(rows, rows);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &PADE13;

    let u_high = &a2 * re(b[9]) + &a4 * re(b[11]) + &a6 * re(b[13]);
    let u_low = &id * re(b[1]) + &a2 * re(b[3]) + &a4 * re(b[5]) + &a6 * re(b[7]);
    let u = &a * &(&a6 * &u_high + u_low);
    let v_high = &a2 * re(b[8]) + &a4 * re(b[10]) + &a6 * re(b[12]);
    let v = &a6 * &v_high + &id * re(b[0]) + &a2 * re(b[2]) + &a4 * re(b[4]) + &a6 * re(b[6]);

    let numerator = &v + &u;
    let denominator = &v - &u;
    let mut exp = denominator.lu().solve(&numerator).ok_or(Error::Accuracy {
        requested: tol,
        achieved: f64::INFINITY,
    })?;
    for _ in 0..s {
        exp = &exp * &exp;
    }
    Ok(exp)
}

/// Commutator [A, B] = AB − BA.
pub fn commutator(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(a * b - b * a)
}

/// Hermitian adjoint (conjugate transpose).
pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

/// Which basis a state's amplitudes refer to: the reference Fock basis or the
/// sample points of a uniform position grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Fock,
    Grid,
}

/// A state with tagged basis.  Amplitudes over Fock indices or grid points.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub amplitudes: CVec,
    pub basis: Basis,
}

impl StateVector {
    pub fn fock(amplitudes: CVec) -> Self {
        StateVector {
            amplitudes,
            basis: Basis::Fock,
        }
    }

    pub fn grid(amplitudes: CVec) -> Self {
        StateVector {
            amplitudes,
            basis: Basis::Grid,
        }
    }

    /// The n-th reference basis vector |n⟩.
    pub fn basis_state(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(Error::Domain(format!(
                "basis index {n} outside dimension {dim}"
            )));
        }
        let mut v = CVec::zeros(dim);
        v[n] = re(1.0);
        Ok(StateVector::fock(v))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= re(n);
        }
        self
    }

    /// Probability weight in the top 10% of indices — the truncation
    /// diagnostic.  States that lean on the top band are unreliable.
    pub fn tail_mass(&self) -> f64 {
        let dim = self.dim();
        let tail = (dim as f64 * 0.1).ceil() as usize;
        let start = dim.saturating_sub(tail.max(1));
        (start..dim).map(|i| self.amplitudes[i].norm_sqr()).sum()
    }

    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let tail_mass = self.tail_mass();
        if tail_mass > tolerance {
            return Err(Error::Truncation {
                tail_mass,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Apply an operator: M|v⟩.
pub fn apply(m: &CMat, v: &StateVector) -> Result<StateVector> {
    if m.ncols() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: m.ncols(),
            right: v.dim(),
        });
    }
    Ok(StateVector {
        amplitudes: m * &v.amplitudes,
        basis: v.basis,
    })
}

/// Inner product ⟨u|v⟩ with conjugation on the first argument.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    if u.basis != v.basis {
        return Err(Error::BasisMismatch);
    }
    Ok(u.amplitudes.dotc(&v.amplitudes))
}

/// Largest |entry| over the leading `block` × `block` corner.
pub fn max_abs_block(m: &CMat, block: usize) -> f64 {
    let b = block.min(m.nrows()).min(m.ncols());
    let mut max = 0.0f64;
    for i in 0..b {
        for j in 0..b {
            max = max.max(m[(i, j)].norm());
        }
    }
    max
}

/// Largest entrywise deviation |A − B| over the leading block.
pub fn max_abs_diff_block(a: &CMat, b: &CMat, block: usize) -> f64 {
    let n = block
        .min(a.nrows())
        .min(b.nrows())
        .min(a.ncols())
        .min(b.ncols());
    let mut max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            max = max.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    max
}
