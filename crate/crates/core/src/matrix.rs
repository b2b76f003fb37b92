//! Dense complex matrices and the subsystem dimension bookkeeping shared by
//! every representation in the crate.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Dense complex matrix; carries states, unitaries and Choi matrices.
pub type CMat = DMatrix<Complex<f64>>;

/// Ordered list of odd subsystem dimensions, each at least 3.
///
/// The total Hilbert-space dimension is the product of the entries, and the
/// discrete phase space has one point per pair `(u1, u2)` in each subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimSpec {
    dims: Vec<usize>,
}

impl DimSpec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::ShapeMismatch("empty dimension list".into()));
        }
        for &d in &dims {
            if d < 3 || d % 2 == 0 {
                return Err(Error::BadDimension(d));
            }
        }
        Ok(Self { dims })
    }

    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    /// `copies`-fold repetition of this spec, in tensor order.
    pub fn repeat(&self, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::Domain("copies must be at least 1".into()));
        }
        Self::new(self.dims.repeat(copies))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension `D`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of phase-space points, `D^2`.
    pub fn num_points(&self) -> usize {
        self.total_dim() * self.total_dim()
    }

    /// Concatenation, used for the input (x) output space of Choi matrices.
    pub fn concat(&self, other: &DimSpec) -> DimSpec {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DimSpec { dims }
    }
}

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Kronecker product of a sequence of matrices, left factor most significant.
pub fn kron_all(ms: &[CMat]) -> CMat {
    let mut it = ms.iter();
    let first = it.next().expect("kron_all of empty slice").clone();
    it.fold(first, |acc, m| acc.kronecker(m))
}

/// `m`-fold tensor power.
pub fn tensor_power(m: &CMat, copies: usize) -> CMat {
    assert!(copies >= 1, "tensor power needs at least one copy");
    let mut out = m.clone();
    for _ in 1..copies {
        out = out.kronecker(m);
    }
    out
}

/// Largest absolute deviation of `m` from its adjoint.
pub fn hermiticity_residue(m: &CMat) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && hermiticity_residue(m) <= tol
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_hermitian(m: &CMat) -> f64 {
    let eig = m.clone().symmetric_eigen();
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Partial trace over the first tensor factor of an operator on
/// `C^{da} (x) C^{db}`.
pub fn partial_trace_first(m: &CMat, da: usize, db: usize) -> Result<CMat> {
    check_square(m, da * db)?;
    let mut out = CMat::zeros(db, db);
    for b in 0..db {
        for b2 in 0..db {
            let mut acc = c(0.0, 0.0);
            for a in 0..da {
                acc += m[(a * db + b, a * db + b2)];
            }
            out[(b, b2)] = acc;
        }
    }
    Ok(out)
}

/// Partial trace over the second tensor factor of an operator on
/// `C^{da} (x) C^{db}`.
pub fn partial_trace_second(m: &CMat, da: usize, db: usize) -> Result<CMat> {
    check_square(m, da * db)?;
    let mut out = CMat::zeros(da, da);
    for a in 0..da {
        for a2 in 0..da {
            let mut acc = c(0.0, 0.0);
            for b in 0..db {
                acc += m[(a * db + b, a2 * db + b)];
            }
            out[(a, a2)] = acc;
        }
    }
    Ok(out)
}

fn check_square(m: &CMat, n: usize) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "expected {n}x{n} matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Checks that `rho` is a density operator on the space described by `dims`:
/// Hermitian, unit trace, positive semidefinite (all up to tolerance).
pub fn check_state(rho: &CMat, dims: &DimSpec) -> Result<()> {
    let d = dims.total_dim();
    check_square(rho, d)?;
    let herm = hermiticity_residue(rho);
    if herm > 1e-8 {
        return Err(Error::NotAState(format!(
            "not Hermitian (residue {herm:.3e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-8 {
        return Err(Error::NotAState(format!("trace is {tr}, expected 1")));
    }
    let min_eig = min_eigenvalue_hermitian(rho);
    if min_eig < -1e-7 {
        return Err(Error::NotAState(format!(
            "negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}

/// Density operator of a computational basis ket `|k>` in dimension `d`.
pub fn basis_density(d: usize, k: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(k, k)] = c(1.0, 0.0);
    m
}

/// Density operator of a pure state given by its amplitude vector.
pub fn pure_density(amplitudes: &[Complex<f64>]) -> CMat {
    let d = amplitudes.len();
    CMat::from_fn(d, d, |i, j| amplitudes[i] * amplitudes[j].conj())
}
