//! Narrow conic-solver contract: submit a linear objective with zero,
//! nonnegative and PSD-triangle cone constraints, receive a primal/dual
//! solution and gap. Backed by Clarabel; nothing outside this module talks
//! to the solver crate.

use clarabel::algebra as ca;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use crate::error::{Error, Result};
use crate::matrix::CMat;

/// Constraint cone blocks, in row order. A constraint block contributes rows
/// `s = b - A x` with `s` in the cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// Equality rows, `s = 0`.
    Zero(usize),
    /// Componentwise nonnegative rows.
    Nonnegative(usize),
    /// Scaled upper-triangle (svec) of an `n x n` PSD matrix; contributes
    /// `n (n + 1) / 2` rows.
    PsdTriangle(usize),
}

impl Cone {
    pub fn num_rows(&self) -> usize {
        match *self {
            Cone::Zero(n) | Cone::Nonnegative(n) => n,
            Cone::PsdTriangle(n) => n * (n + 1) / 2,
        }
    }
}

/// A conic program `min q.x  s.t.  b - A x in K`.
#[derive(Debug, Clone, Default)]
pub struct ConicProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    /// `(row, col, coeff)` triplets of `A`.
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConicProblem {
    pub fn new(num_vars: usize, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), num_vars);
        Self { num_vars, objective, ..Default::default() }
    }

    /// Current number of constraint rows.
    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    /// Appends a constraint block. `rows` holds per-row sparse coefficients
    /// of `A`; `rhs` the matching entries of `b`.
    pub fn add_block(&mut self, cone: Cone, rows: Vec<Vec<(usize, f64)>>, rhs: Vec<f64>) {
        assert_eq!(rows.len(), cone.num_rows());
        assert_eq!(rhs.len(), cone.num_rows());
        let base = self.num_rows();
        for (i, row) in rows.into_iter().enumerate() {
            for (col, v) in row {
                debug_assert!(col < self.num_vars);
                if v != 0.0 {
                    self.triplets.push((base + i, col, v));
                }
            }
        }
        self.rhs.extend(rhs);
        self.cones.push(cone);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConicStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: ConicStatus,
    /// Primal point; meaningful only for [`ConicStatus::Optimal`].
    pub x: Vec<f64>,
    pub objective: f64,
    pub objective_dual: f64,
    pub solve_time: f64,
    pub iterations: u32,
}

impl ConicSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.objective_dual).abs()
    }
}

/// Solves the program. Numerical failures are surfaced as
/// [`Error::Solver`], distinct from certified infeasibility.
pub fn solve(problem: &ConicProblem) -> Result<ConicSolution> {
    let m = problem.num_rows();
    let total: usize = problem.cones.iter().map(Cone::num_rows).sum();
    if total != m {
        return Err(Error::Solver(format!(
            "cone rows {total} do not match rhs length {m}"
        )));
    }

    let (rows, cols, vals): (Vec<usize>, Vec<usize>, Vec<f64>) = problem
        .triplets
        .iter()
        .map(|&(r, c, v)| (r, c, v))
        .fold((vec![], vec![], vec![]), |mut acc, (r, c, v)| {
            acc.0.push(r);
            acc.1.push(c);
            acc.2.push(v);
            acc
        });
    let a = ca::CscMatrix::new_from_triplets(m, problem.num_vars, rows, cols, vals);
    let p = ca::CscMatrix::zeros((problem.num_vars, problem.num_vars));

    let cones: Vec<SupportedConeT<f64>> = problem
        .cones
        .iter()
        .map(|c| match *c {
            Cone::Zero(n) => SupportedConeT::ZeroConeT(n),
            Cone::Nonnegative(n) => SupportedConeT::NonnegativeConeT(n),
            Cone::PsdTriangle(n) => SupportedConeT::PSDTriangleConeT(n),
        })
        .collect();

    let settings = DefaultSettings {
        verbose: false,
        tol_gap_abs: 1e-9,
        tol_gap_rel: 1e-9,
        tol_feas: 1e-9,
        tol_infeas_abs: 1e-7,
        tol_infeas_rel: 1e-7,
        max_iter: 500,
        ..DefaultSettings::default()
    };

    let mut solver =
        DefaultSolver::new(&p, &problem.objective, &a, &problem.rhs, &cones, settings)
            .map_err(|e| Error::Solver(format!("setup failed: {e}")))?;
    solver.solve();

    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => ConicStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            ConicStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            ConicStatus::Unbounded
        }
        other => return Err(Error::Solver(format!("solver terminated with {other:?}"))),
    };

    Ok(ConicSolution {
        status,
        x: sol.x.clone(),
        objective: sol.obj_val,
        objective_dual: sol.obj_val_dual,
        solve_time: sol.solve_time,
        iterations: sol.iterations,
    })
}

/// Length of the scaled-triangle vectorization of an `n x n` symmetric
/// matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Scaled upper-triangle vectorization (column-stacked, off-diagonal entries
/// times sqrt 2) of the real symmetric embedding `[[Re H, -Im H], [Im H,
/// Re H]]` of a Hermitian matrix. The embedding is PSD exactly when `H` is.
pub fn svec_hermitian_embed(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    debug_assert_eq!(h.ncols(), n);
    let entry = |i: usize, j: usize| -> f64 {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        match (bi, bj) {
            (0, 0) | (1, 1) => h[(ii, jj)].re,
            (0, 1) => -h[(ii, jj)].im,
            (1, 0) => h[(ii, jj)].im,
            _ => unreachable!(),
        }
    };
    let sqrt2 = 2f64.sqrt();
    let mut out = Vec::with_capacity(svec_len(2 * n));
    for j in 0..2 * n {
        for i in 0..=j {
            if i == j {
                out.push(entry(i, j));
            } else {
                out.push(sqrt2 * entry(i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    #[test]
    fn tiny_sdp_min_diagonal() {
        // min x s.t. [[x, 1], [1, x]] >= 0 over the complex embedding;
        // optimum is x = 1.
        let mut prob = ConicProblem::new(1, vec![1.0]);
        let h_const = CMat::from_fn(2, 2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let h_x = CMat::identity(2, 2);
        let b = svec_hermitian_embed(&h_const);
        let col = svec_hermitian_embed(&h_x);
        let rows: Vec<Vec<(usize, f64)>> = col.iter().map(|&v| vec![(0, -v)]).collect();
        prob.add_block(Cone::PsdTriangle(4), rows, b);
        let sol = solve(&prob).unwrap();
        assert_eq!(sol.status, ConicStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-6);
        assert!(sol.duality_gap() < 1e-7);
    }

    #[test]
    fn infeasible_equalities_are_certified() {
        // x >= 0 with x = -1.
        let mut prob = ConicProblem::new(1, vec![0.0]);
        prob.add_block(Cone::Zero(1), vec![vec![(0, 1.0)]], vec![-1.0]);
        prob.add_block(Cone::Nonnegative(1), vec![vec![(0, -1.0)]], vec![0.0]);
        let sol = solve(&prob).unwrap();
        assert_eq!(sol.status, ConicStatus::Infeasible);
    }

    #[test]
    fn svec_embed_of_identity() {
        let h = CMat::identity(2, 2);
        let v = svec_hermitian_embed(&h);
        assert_eq!(v.len(), svec_len(4));
        // Diagonal entries 1, off-diagonals 0.
        let expect = [1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(v, expect);
    }
}
