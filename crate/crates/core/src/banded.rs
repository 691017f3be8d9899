//! Banded operators and the action of their exponentials on vectors.
//!
//! Every generator used to build states along a parameter loop (squeezing,
//! displacement, the reference-basis change) couples Fock indices at most two
//! apart, so exp(A)·v is evaluated with scaled truncated-Taylor steps at
//! O(dim) cost per matrix–vector product instead of forming a dense
//! exponential at every loop point.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::{CMat, CVec};

/// Largest per-step 1-norm for the truncated Taylor evaluation.  At this size
/// the series reaches unit roundoff well inside [`MAX_TAYLOR_TERMS`] terms.
const TAYLOR_STEP_NORM: f64 = 3.0;
const MAX_TAYLOR_TERMS: usize = 64;

/// A square operator stored as (offset, diagonal) bands: `bands[(k, v)]`
/// holds the entries M[i, i+k] for k ≥ 0 and M[i-k... ] analogously below.
#[derive(Clone, Debug)]
pub struct Banded {
    dim: usize,
    bands: Vec<(i64, Vec<Complex64>)>,
}

impl Banded {
    pub fn new(dim: usize) -> Self {
        Banded {
            dim,
            bands: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Install the band at `offset` (positive = above the main diagonal).
    /// `values[j]` is the entry in row j (column j + offset) for offset ≥ 0,
    /// or in column j (row j − offset) for offset < 0.
    pub fn set_band(&mut self, offset: i64, values: Vec<Complex64>) {
        let expected = self.dim - offset.unsigned_abs() as usize;
        assert_eq!(values.len(), expected, "band length must be dim - |offset|");
        self.bands.push((offset, values));
    }

    pub fn matvec(&self, v: &CVec, out: &mut CVec) {
        out.fill(Complex64::new(0.0, 0.0));
        for (offset, vals) in &self.bands {
            if *offset >= 0 {
                let k = *offset as usize;
                for i in 0..self.dim - k {
                    out[i] += vals[i] * v[i + k];
                }
            } else {
                let k = (-offset) as usize;
                for j in 0..self.dim - k {
                    out[j + k] += vals[j] * v[j];
                }
            }
        }
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn one_norm(&self) -> f64 {
        let mut col_sums = vec![0.0f64; self.dim];
        for (offset, vals) in &self.bands {
            if *offset >= 0 {
                let k = *offset as usize;
                for i in 0..self.dim - k {
                    col_sums[i + k] += vals[i].norm();
                }
            } else {
                let k = (-offset) as usize;
                for j in 0..self.dim - k {
                    col_sums[j] += vals[j].norm();
                }
            }
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (offset, vals) in &self.bands {
            if *offset >= 0 {
                let k = *offset as usize;
                for i in 0..self.dim - k {
                    m[(i, i + k)] += vals[i];
                }
            } else {
                let k = (-offset) as usize;
                for j in 0..self.dim - k {
                    m[(j + k, j)] += vals[j];
                }
            }
        }
        m
    }

    /// exp(A)·v by uniform sub-steps: A is split into p pieces with 1-norm
    /// below [`TAYLOR_STEP_NORM`] and each step applies the truncated Taylor
    /// series of exp(A/p), stopping once a term falls below roundoff relative
    /// to the running sum.  Fully deterministic: same input, same bits.
    pub fn exp_apply(&self, v: &CVec) -> Result<CVec> {
        assert_eq!(v.len(), self.dim, "vector length must match operator dim");
        let norm = self.one_norm();
        if norm == 0.0 {
            return Ok(v.clone());
        }
        let steps = (norm / TAYLOR_STEP_NORM).ceil().max(1.0) as usize;
        let inv_steps = 1.0 / steps as f64;

        let mut state = v.clone();
        let mut term = CVec::zeros(self.dim);
        let mut scratch = CVec::zeros(self.dim);
        for _ in 0..steps {
            term.copy_from(&state);
            let mut sum = state.clone();
            let mut converged = false;
            for k in 1..=MAX_TAYLOR_TERMS {
                self.matvec(&term, &mut scratch);
                let factor = Complex64::new(inv_steps / k as f64, 0.0);
                term.copy_from(&scratch);
                term *= factor;
                sum += &term;
                if term.norm() <= f64::EPSILON * sum.norm() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Accuracy {
                    requested: f64::EPSILON,
                    achieved: term.norm() / sum.norm().max(f64::MIN_POSITIVE),
                });
            }
            state = sum;
        }
        Ok(state)
    }
}
