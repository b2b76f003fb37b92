//! Classification of linear maps (HP / TP / CP / PWP) and reconstruction of
//! maps from their stochastic Wigner matrices.

use crate::error::{Error, Result};
use crate::matrix::{
    c, hermiticity_residue, min_eigenvalue_hermitian, partial_trace_first,
    partial_trace_second, CMat, DimSpec,
};
use crate::phase_space::PhaseSpaceBasis;
use crate::wigner::{wigner_of_map, ChoiMatrix, StochasticWignerMatrix};

/// Predicate flags of a linear map, evaluated on its Choi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapClass {
    pub hermitian_preserving: bool,
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub positive_wigner_preserving: bool,
}

impl MapClass {
    /// Hermitian-preserving, trace-preserving, positive-Wigner-preserving
    /// quasi-operation.
    pub fn pwpq(&self) -> bool {
        self.hermitian_preserving && self.trace_preserving && self.positive_wigner_preserving
    }

    /// A physical channel that additionally preserves Wigner positivity.
    pub fn cptp_pwp(&self) -> bool {
        self.pwpq() && self.completely_positive
    }
}

const CLASS_TOL: f64 = 1e-9;

/// Classifies the map represented by `j`.
///
/// HP is `J = J^dag`, TP is `tr_out J = I`, CP is `J >= 0` (eigenvalue
/// threshold `-1e-9`), PWP is entrywise nonnegativity of the stochastic
/// Wigner matrix.
pub fn classify(j: &ChoiMatrix) -> MapClass {
    let da = j.input.total_dim();
    let db = j.output.total_dim();

    let hermitian_preserving = hermiticity_residue(&j.matrix) <= CLASS_TOL;

    let trace_preserving = match partial_trace_second(&j.matrix, da, db) {
        Ok(t) => {
            let diff = t - CMat::identity(da, da);
            diff.iter().all(|z| z.norm() <= CLASS_TOL)
        }
        Err(_) => false,
    };

    let completely_positive =
        hermitian_preserving && min_eigenvalue_hermitian(&j.matrix) >= -CLASS_TOL;

    // Wigner entries are only real for HP maps; non-HP maps are not PWP.
    let positive_wigner_preserving = hermitian_preserving
        && wigner_of_map(j)
            .map(|w| w.values.iter().all(|&v| v >= -CLASS_TOL))
            .unwrap_or(false);

    MapClass {
        hermitian_preserving,
        trace_preserving,
        completely_positive,
        positive_wigner_preserving,
    }
}

/// The unique linear map with `N(A_u) = sum_v W(v|u) A_v`, in Choi form.
///
/// Uses the closed form `J = sum_{u,v} W(v|u) / D_A (A_A^u)^T (x) A_B^v`,
/// which follows from the orthogonality `tr[A_u A_v] = D delta_{uv}`.
pub fn map_from_wigner(w: &StochasticWignerMatrix) -> Result<ChoiMatrix> {
    let basis_a = PhaseSpaceBasis::new(&w.input)?;
    let basis_b = PhaseSpaceBasis::new(&w.output)?;
    if w.values.nrows() != basis_b.len() || w.values.ncols() != basis_a.len() {
        return Err(Error::ShapeMismatch(format!(
            "stochastic matrix is {}x{}, dims give {}x{}",
            w.values.nrows(),
            w.values.ncols(),
            basis_b.len(),
            basis_a.len()
        )));
    }
    let da = w.input.total_dim();
    let db = w.output.total_dim();
    let n = da * db;
    let mut j = CMat::zeros(n, n);
    for u in 0..basis_a.len() {
        let au_t = basis_a.op(basis_a.transpose_perm(u));
        for v in 0..basis_b.len() {
            let coeff = w.values[(v, u)] / da as f64;
            if coeff == 0.0 {
                continue;
            }
            j += au_t.kronecker(&basis_b.op(v)) * c(coeff, 0.0);
        }
    }
    ChoiMatrix::new(j, w.input.clone(), w.output.clone())
}

/// Applies a map to a state via its Choi matrix:
/// `N(rho) = tr_A[(rho^T (x) I_B) J_N]`.
pub fn apply_choi(j: &ChoiMatrix, rho: &CMat) -> Result<CMat> {
    let da = j.input.total_dim();
    let db = j.output.total_dim();
    if rho.nrows() != da || rho.ncols() != da {
        return Err(Error::ShapeMismatch(format!(
            "state is {}x{}, map input dimension is {da}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let lifted = rho.transpose().kronecker(&CMat::identity(db, db));
    partial_trace_first(&(lifted * &j.matrix), da, db)
}

/// Choi matrix of the identity channel on `dims`.
pub fn identity_choi(dims: &DimSpec) -> ChoiMatrix {
    let d = dims.total_dim();
    let n = d * d;
    let mut j = CMat::zeros(n, n);
    for i in 0..d {
        for k in 0..d {
            j[(i * d + i, k * d + k)] = c(1.0, 0.0);
        }
    }
    ChoiMatrix { matrix: j, input: dims.clone(), output: dims.clone() }
}

/// Choi matrix of the replacement map `X -> tr[X] sigma`.
pub fn replacement_choi(sigma: &CMat, input: &DimSpec, output: &DimSpec) -> Result<ChoiMatrix> {
    let da = input.total_dim();
    let db = output.total_dim();
    if sigma.nrows() != db || sigma.ncols() != db {
        return Err(Error::ShapeMismatch(format!(
            "replacement target is {}x{}, output dimension is {db}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let j = CMat::identity(da, da).kronecker(sigma);
    ChoiMatrix::new(j, input.clone(), output.clone())
}

/// Choi matrix of the fully depolarizing channel `X -> tr[X] I / D`.
pub fn depolarizing_choi(dims: &DimSpec) -> ChoiMatrix {
    let d = dims.total_dim();
    let sigma = CMat::identity(d, d) / c(d as f64, 0.0);
    replacement_choi(&sigma, dims, dims).expect("shape is consistent")
}

/// Choi matrix of conjugation by a unitary, `X -> U X U^dag`.
pub fn unitary_choi(u: &CMat, dims: &DimSpec) -> Result<ChoiMatrix> {
    let d = dims.total_dim();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "unitary is {}x{}, dims give {d}",
            u.nrows(),
            u.ncols()
        )));
    }
    let n = d * d;
    let mut j = CMat::zeros(n, n);
    for i in 0..d {
        for k in 0..d {
            for a in 0..d {
                for b in 0..d {
                    // <a| U |i> <k| U^dag |b> on the output slots.
                    j[(i * d + a, k * d + b)] += u[(a, i)] * u[(b, k)].conj();
                }
            }
        }
    }
    ChoiMatrix::new(j, dims.clone(), dims.clone())
}
