//! Wigner and stochastic-Wigner representations of operators and linear
//! maps, and the mana magic monotone.
//!
//! A Hermitian operator `X` on a `D`-dimensional odd system is represented by
//! the real vector `W_X(u) = tr[A_u X] / D` over the `D^2` phase points, and
//! a Hermitian-preserving map by the real matrix
//! `W_N(v|u) = tr[((A_A^u)^T (x) A_B^v) J_N] / D_B` acting on such vectors.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::{c, check_state, CMat, DimSpec};
use crate::phase_space::PhaseSpaceBasis;

/// Tolerance below which floating-point imaginary residue is truncated when
/// realness is mathematically guaranteed.
pub const IMAG_TOL: f64 = 1e-10;

/// Real quasi-probability vector of length `D^2`; sums to 1 for states.
#[derive(Debug, Clone)]
pub struct WignerVector {
    pub values: DVector<f64>,
    pub dims: DimSpec,
}

impl WignerVector {
    /// l1 norm, the quantity whose logarithm is mana.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Real matrix mapping input Wigner vectors to output Wigner vectors;
/// column stochastic exactly when the represented map is PWPq.
#[derive(Debug, Clone)]
pub struct StochasticWignerMatrix {
    /// Shape `D_B^2 x D_A^2`, entry `(v, u)` is `W_N(v|u)`.
    pub values: DMatrix<f64>,
    pub input: DimSpec,
    pub output: DimSpec,
}

impl StochasticWignerMatrix {
    /// Whether all entries are nonnegative and every column sums to one,
    /// within `tol`.
    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        if self.values.iter().any(|&v| v < -tol) {
            return false;
        }
        (0..self.values.ncols())
            .all(|j| (self.values.column(j).sum() - 1.0).abs() <= tol)
    }
}

/// Choi representation `J_N = sum_ij |i><j|_A (x) N(|i><j|)_B` of a linear
/// map, so that `N(rho) = tr_A[(rho^T (x) I_B) J_N]`.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub matrix: CMat,
    pub input: DimSpec,
    pub output: DimSpec,
}

impl ChoiMatrix {
    pub fn new(matrix: CMat, input: DimSpec, output: DimSpec) -> Result<Self> {
        let n = input.total_dim() * output.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "Choi matrix must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, input, output })
    }
}

/// Wigner representation `W_X(u) = tr[A_u X] / D` of a square operator.
///
/// Errors with a complex Wigner vector when `X` is not Hermitian.
pub fn wigner_of_operator(x: &CMat, dims: &DimSpec) -> Result<WignerVector> {
    let d = dims.total_dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "operator is {}x{}, dims give {d}",
            x.nrows(),
            x.ncols()
        )));
    }
    let basis = PhaseSpaceBasis::new(dims)?;
    let mut values = DVector::zeros(basis.len());
    let mut residue: f64 = 0.0;
    for u in 0..basis.len() {
        let tr = (basis.op(u) * x).trace() / c(d as f64, 0.0);
        residue = residue.max(tr.im.abs());
        values[u] = tr.re;
    }
    if residue > IMAG_TOL {
        return Err(Error::NotHermitian { residue });
    }
    Ok(WignerVector { values, dims: dims.clone() })
}

/// Inverse of [`wigner_of_operator`] on Hermitian operators:
/// `X = sum_u w(u) A_u`.
pub fn operator_from_wigner(w: &WignerVector) -> Result<CMat> {
    let basis = PhaseSpaceBasis::new(&w.dims)?;
    if w.values.len() != basis.len() {
        return Err(Error::ShapeMismatch(format!(
            "Wigner vector has {} entries, dims give {}",
            w.values.len(),
            basis.len()
        )));
    }
    let d = w.dims.total_dim();
    let mut out = CMat::zeros(d, d);
    for u in 0..basis.len() {
        out += basis.op(u) * c(w.values[u], 0.0);
    }
    Ok(out)
}

/// Stochastic Wigner representation of a linear map from its Choi matrix:
/// `W_N(v|u) = tr[((A_A^u)^T (x) A_B^v) J_N] / D_B`.
///
/// Errors when the map is not Hermitian-preserving (entries come out
/// complex, Lemma-style).
pub fn wigner_of_map(j: &ChoiMatrix) -> Result<StochasticWignerMatrix> {
    let basis_a = PhaseSpaceBasis::new(&j.input)?;
    let basis_b = PhaseSpaceBasis::new(&j.output)?;
    let db = j.output.total_dim();
    let mut values = DMatrix::zeros(basis_b.len(), basis_a.len());
    let mut residue: f64 = 0.0;
    for u in 0..basis_a.len() {
        // (A_A^u)^T = A_A^{u'} by transpose closure.
        let au_t = basis_a.op(basis_a.transpose_perm(u));
        for v in 0..basis_b.len() {
            let op = au_t.kronecker(&basis_b.op(v));
            let tr = (op * &j.matrix).trace() / c(db as f64, 0.0);
            residue = residue.max(tr.im.abs());
            values[(v, u)] = tr.re;
        }
    }
    if residue > IMAG_TOL {
        return Err(Error::NotHermitianPreserving { residue });
    }
    Ok(StochasticWignerMatrix {
        values,
        input: j.input.clone(),
        output: j.output.clone(),
    })
}

/// Mana `M(rho) = log2 sum_u |W_rho(u)|` of a state.
pub fn mana(rho: &CMat, dims: &DimSpec) -> Result<f64> {
    check_state(rho, dims)?;
    let w = wigner_of_operator(rho, dims)?;
    Ok(w.l1_norm().log2())
}

/// Applies a stochastic Wigner matrix to a Wigner vector:
/// `W_N W_X = W_{N(X)}`.
pub fn apply_stochastic(
    w: &StochasticWignerMatrix,
    x: &WignerVector,
) -> Result<WignerVector> {
    if w.input != x.dims {
        return Err(Error::ShapeMismatch(format!(
            "matrix input dims {:?} do not match vector dims {:?}",
            w.input.dims(),
            x.dims.dims()
        )));
    }
    Ok(WignerVector {
        values: &w.values * &x.values,
        dims: w.output.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::basis_density;

    fn uniform_dims3() -> DimSpec {
        DimSpec::single(3).unwrap()
    }

    #[test]
    fn basis_state_has_positive_wigner_function() {
        let w = wigner_of_operator(&basis_density(3, 0), &uniform_dims3()).unwrap();
        assert!(w.values.iter().all(|&v| v >= -1e-12));
        assert!((w.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let rho = CMat::identity(3, 3) / c(3.0, 0.0);
        let w = wigner_of_operator(&rho, &uniform_dims3()).unwrap();
        for &v in w.values.iter() {
            assert!((v - 1.0 / 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_hermitian_operator_is_rejected() {
        let mut x = CMat::zeros(3, 3);
        x[(0, 1)] = c(1.0, 0.0);
        let err = wigner_of_operator(&x, &uniform_dims3()).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn indicator_vector_reproduces_point_operator() {
        let dims = uniform_dims3();
        let basis = PhaseSpaceBasis::new(&dims).unwrap();
        for u in [0usize, 4, 8] {
            let mut values = DVector::zeros(9);
            values[u] = 1.0;
            let w = WignerVector { values, dims: dims.clone() };
            let op = operator_from_wigner(&w).unwrap();
            assert!((op - basis.op(u)).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn uniform_vector_reproduces_maximally_mixed() {
        let dims = uniform_dims3();
        let w = WignerVector {
            values: DVector::from_element(9, 1.0 / 9.0),
            dims: dims.clone(),
        };
        let op = operator_from_wigner(&w).unwrap();
        let expect = CMat::identity(3, 3) / c(3.0, 0.0);
        assert!((op - expect).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn mana_of_basis_state_is_zero() {
        let m = mana(&basis_density(3, 1), &uniform_dims3()).unwrap();
        assert!(m.abs() < 1e-9);
    }

    #[test]
    fn apply_stochastic_shape_mismatch() {
        let dims = uniform_dims3();
        let w = StochasticWignerMatrix {
            values: DMatrix::identity(9, 9),
            input: DimSpec::new(vec![3, 3]).unwrap(),
            output: dims.clone(),
        };
        let x = WignerVector {
            values: DVector::from_element(9, 1.0 / 9.0),
            dims,
        };
        assert!(apply_stochastic(&w, &x).is_err());
    }
}
