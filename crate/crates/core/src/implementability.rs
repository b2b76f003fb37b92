//! Physical implementability of PWPq operations.
//!
//! The quantity `nu(rho -> sigma)` is the log of the minimal total weight
//! `2c - 1` over decompositions `N = N_1 - N_2` of a PWPq map into a
//! nonnegative combination of PWP channels, subject to `N(rho)` landing
//! within operator-norm distance `eps` of `sigma`. The optimization is a
//! semidefinite program over the Choi matrices of `N_1` and `N_2`.
//!
//! The decision variables are the (real) Wigner coefficients of the two
//! Choi matrices, which makes every constraint linear:
//! trace-preservation and Wigner positivity become scalar rows, and the
//! PSD requirements act on matrices that are linear in the coefficients.

use crate::error::{Error, Result};
use crate::matrix::{c, check_state, CMat, DimSpec};
use crate::phase_space::PhaseSpaceBasis;
use crate::solver::{self, svec_hermitian_embed, svec_len, Cone, ConicProblem, ConicStatus};
use crate::wigner::{wigner_of_operator, ChoiMatrix};

/// The assembled SDP for one `(rho, sigma, eps)` triple.
#[derive(Debug, Clone)]
pub struct SdpModel {
    pub problem: ConicProblem,
    pub input: DimSpec,
    pub output: DimSpec,
    /// `None` for the phase-1 program, which optimizes over the error.
    pub eps: Option<f64>,
    num_coeffs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
}

/// Outcome of a physical-implementability solve.
#[derive(Debug, Clone)]
pub struct SdpOutcome {
    pub status: SdpStatus,
    /// Optimal `c`; `2c - 1` is the minimal decomposition weight.
    pub c_star: Option<f64>,
    /// `log2(2c - 1)`.
    pub nu: Option<f64>,
    /// Choi matrices of the recovered channel pair `(N_1, N_2)`.
    pub choi_pair: Option<(ChoiMatrix, ChoiMatrix)>,
    pub duality_gap: Option<f64>,
    pub solve_time: f64,
}

/// Builds the error-tolerant implementability SDP.
///
/// Objective `2c - 1`; variables are the Wigner coefficients of `J_1`,
/// `J_2` plus `c`; constraints are `J_i >= 0`, `tr_out J_1 = c I`,
/// `tr_out J_2 = (c - 1) I`, entrywise nonnegativity of the three
/// stochastic Wigner matrices, and the two-sided operator inequality
/// `-eps I <= N(rho) - sigma <= eps I`. With `eps = 0` this is the exact
/// transformation program.
pub fn build_sdp(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
    eps: f64,
) -> Result<SdpModel> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be nonnegative, got {eps}")));
    }
    assemble(rho, rho_dims, sigma, sigma_dims, ErrorBudget::Fixed(eps))
}

/// Error budget of the transformation constraint: either a fixed `eps`, or
/// a decision variable to be minimized (the phase-1 program behind
/// [`minimal_error`]).
#[derive(Clone, Copy)]
enum ErrorBudget {
    Fixed(f64),
    Variable,
}

fn assemble(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
    budget: ErrorBudget,
) -> Result<SdpModel> {
    check_state(rho, rho_dims)?;
    check_state(sigma, sigma_dims)?;

    let basis_a = PhaseSpaceBasis::new(rho_dims)?;
    let basis_b = PhaseSpaceBasis::new(sigma_dims)?;
    let da = rho_dims.total_dim();
    let db = sigma_dims.total_dim();
    let na = basis_a.len();
    let nb = basis_b.len();
    let num_coeffs = na * nb;

    // Variable layout: [x1 (num_coeffs) | x2 (num_coeffs) | c | (t)], with
    // the trailing error variable `t` present only in the phase-1 program.
    let minimize_error = matches!(budget, ErrorBudget::Variable);
    let num_vars = 2 * num_coeffs + 1 + usize::from(minimize_error);
    let c_var = 2 * num_coeffs;
    let t_var = c_var + 1;
    let x1 = |u: usize, v: usize| u * nb + v;
    let x2 = |u: usize, v: usize| num_coeffs + u * nb + v;

    let mut objective = vec![0.0; num_vars];
    if minimize_error {
        objective[t_var] = 1.0;
    } else {
        objective[c_var] = 2.0; // reported value is (2c) - 1
    }
    let mut prob = ConicProblem::new(num_vars, objective);

    // TP rows: in Wigner coefficients, tr_out J = sum_v x[u, v] per A-point
    // u (times D_A via the basis normalization), so the constraint
    // tr_out J_1 = c I reads sum_v x1[u, v] = c / D_A for every u.
    let mut eq_rows = Vec::with_capacity(2 * na);
    let mut eq_rhs = Vec::with_capacity(2 * na);
    for u in 0..na {
        let mut row: Vec<(usize, f64)> = (0..nb).map(|v| (x1(u, v), 1.0)).collect();
        row.push((c_var, -1.0 / da as f64));
        eq_rows.push(row);
        eq_rhs.push(0.0);
    }
    for u in 0..na {
        let mut row: Vec<(usize, f64)> = (0..nb).map(|v| (x2(u, v), 1.0)).collect();
        row.push((c_var, -1.0 / da as f64));
        eq_rows.push(row);
        eq_rhs.push(-1.0 / da as f64);
    }
    prob.add_block(Cone::Zero(2 * na), eq_rows, eq_rhs);

    // PWP rows: the stochastic Wigner matrices are entrywise rescaled
    // permutations of the coefficient vectors, so W_{N_1}, W_{N_2},
    // W_N >= 0 is x1 >= 0, x2 >= 0, x1 - x2 >= 0.
    let mut nn_rows = Vec::with_capacity(3 * num_coeffs);
    for k in 0..num_coeffs {
        nn_rows.push(vec![(k, -1.0)]);
    }
    for k in 0..num_coeffs {
        nn_rows.push(vec![(num_coeffs + k, -1.0)]);
    }
    for k in 0..num_coeffs {
        nn_rows.push(vec![(k, -1.0), (num_coeffs + k, 1.0)]);
    }
    prob.add_block(
        Cone::Nonnegative(3 * num_coeffs),
        nn_rows,
        vec![0.0; 3 * num_coeffs],
    );

    // PSD rows for J_1 >= 0 and J_2 >= 0 over the real embedding of the
    // (D_A D_B)-dimensional Choi space.
    let embed_rows = svec_len(2 * da * db);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(num_coeffs);
    for u in 0..na {
        let au = basis_a.op(u);
        for v in 0..nb {
            let g = au.kronecker(&basis_b.op(v));
            columns.push(svec_hermitian_embed(&g));
        }
    }
    for offset in [0, num_coeffs] {
        let rows: Vec<Vec<(usize, f64)>> = (0..embed_rows)
            .map(|r| {
                (0..num_coeffs)
                    .filter_map(|k| {
                        let v = columns[k][r];
                        (v != 0.0).then_some((offset + k, -v))
                    })
                    .collect()
            })
            .collect();
        prob.add_block(Cone::PsdTriangle(2 * da * db), rows, vec![0.0; embed_rows]);
    }

    // Transformation rows. In Wigner coefficients,
    //   N(rho) = sum_v (D_A sum_u W_rho(u~) x[u, v]) A_B^v,
    // where u~ is the transpose permutation, so both sides of
    // -eps I <= N(rho) - sigma <= eps I are linear in x.
    let w_rho = wigner_of_operator(rho, rho_dims)?;
    let rho_coeff: Vec<f64> = (0..na)
        .map(|u| da as f64 * w_rho.values[basis_a.transpose_perm(u)])
        .collect();
    let exact = matches!(budget, ErrorBudget::Fixed(e) if e == 0.0);
    match budget {
        ErrorBudget::Fixed(_) if exact => {
            // Exact output: equate Wigner coefficients of N(rho) and sigma
            // componentwise. The two-sided PSD form degenerates to an
            // equality at eps = 0, which conic solvers handle badly; the
            // coefficient form is the same constraint without the
            // degeneracy.
            let w_sigma = wigner_of_operator(sigma, sigma_dims)?;
            let mut rows = Vec::with_capacity(nb);
            let mut rhs = Vec::with_capacity(nb);
            for v in 0..nb {
                let mut row = Vec::with_capacity(2 * na);
                for u in 0..na {
                    if rho_coeff[u] != 0.0 {
                        row.push((x1(u, v), rho_coeff[u]));
                        row.push((x2(u, v), -rho_coeff[u]));
                    }
                }
                rows.push(row);
                rhs.push(w_sigma.values[v]);
            }
            prob.add_block(Cone::Zero(nb), rows, rhs);
        }
        _ => {
            let eps = match budget {
                ErrorBudget::Fixed(e) => e,
                ErrorBudget::Variable => 0.0,
            };
            let b_cols: Vec<Vec<f64>> = (0..nb)
                .map(|v| svec_hermitian_embed(&basis_b.op(v)))
                .collect();
            let out_rows = svec_len(2 * db);
            let eye = CMat::identity(db, db);
            let eye_svec = svec_hermitian_embed(&eye);

            // eps I - N(rho) + sigma >= 0
            let upper_b = svec_hermitian_embed(&(&eye * c(eps, 0.0) + sigma));
            // eps I + N(rho) - sigma >= 0
            let lower_b = svec_hermitian_embed(&(&eye * c(eps, 0.0) - sigma));

            for sign in [1.0f64, -1.0] {
                let rows: Vec<Vec<(usize, f64)>> = (0..out_rows)
                    .map(|r| {
                        let mut row = Vec::new();
                        for u in 0..na {
                            if rho_coeff[u] == 0.0 {
                                continue;
                            }
                            for v in 0..nb {
                                let coeff = sign * rho_coeff[u] * b_cols[v][r];
                                if coeff != 0.0 {
                                    row.push((x1(u, v), coeff));
                                    row.push((x2(u, v), -coeff));
                                }
                            }
                        }
                        if minimize_error && eye_svec[r] != 0.0 {
                            row.push((t_var, -eye_svec[r]));
                        }
                        row
                    })
                    .collect();
                let rhs = if sign > 0.0 { upper_b.clone() } else { lower_b.clone() };
                prob.add_block(Cone::PsdTriangle(2 * db), rows, rhs);
            }
            if minimize_error {
                prob.add_block(Cone::Nonnegative(1), vec![vec![(t_var, -1.0)]], vec![0.0]);
            }
        }
    }

    Ok(SdpModel {
        problem: prob,
        input: rho_dims.clone(),
        output: sigma_dims.clone(),
        eps: match budget {
            ErrorBudget::Fixed(e) => Some(e),
            ErrorBudget::Variable => None,
        },
        num_coeffs,
    })
}

/// Solves a built model.
pub fn solve_sdp(model: &SdpModel) -> Result<SdpOutcome> {
    let sol = solver::solve(&model.problem)?;
    match sol.status {
        ConicStatus::Optimal => {
            let gamma = sol.objective - 1.0; // objective vector carries 2c
            let c_star = (gamma + 1.0) / 2.0;
            let nu = gamma.max(f64::MIN_POSITIVE).log2();
            let choi_pair = recover_choi_pair(model, &sol.x)?;
            Ok(SdpOutcome {
                status: SdpStatus::Optimal,
                c_star: Some(c_star),
                nu: Some(nu),
                choi_pair: Some(choi_pair),
                duality_gap: Some(sol.duality_gap()),
                solve_time: sol.solve_time,
            })
        }
        ConicStatus::Infeasible => Ok(SdpOutcome {
            status: SdpStatus::Infeasible,
            c_star: None,
            nu: None,
            choi_pair: None,
            duality_gap: None,
            solve_time: sol.solve_time,
        }),
        ConicStatus::Unbounded => {
            Err(Error::Solver("implementability SDP reported unbounded".into()))
        }
    }
}

/// Tolerance added to the minimal achievable error when deciding whether a
/// given `eps` budget is feasible.
pub const FEASIBILITY_MARGIN: f64 = 1e-7;

/// Smallest operator-norm error achievable by any admissible decomposition,
/// found by the phase-1 program (minimize the error over the same constraint
/// set, with the decomposition weight free).
///
/// Unlike the weight-minimizing program this one is always feasible and
/// bounded, so it doubles as a reliable infeasibility detector: the budget
/// `eps` admits a solution exactly when `eps >= minimal_error`.
pub fn minimal_error(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
) -> Result<f64> {
    let model = assemble(rho, rho_dims, sigma, sigma_dims, ErrorBudget::Variable)?;
    let sol = solver::solve(&model.problem)?;
    match sol.status {
        ConicStatus::Optimal => Ok(sol.objective.max(0.0)),
        other => Err(Error::Solver(format!(
            "phase-1 error minimization ended with {other:?}"
        ))),
    }
}

/// `nu(rho -> sigma)` at transformation error `eps`.
///
/// Runs the phase-1 error minimization first; when `eps` is below the
/// minimal achievable error the outcome is reported infeasible without
/// attempting the (then infeasible) weight-minimizing solve.
pub fn physical_implementability(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
    eps: f64,
) -> Result<SdpOutcome> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be nonnegative, got {eps}")));
    }
    let start = std::time::Instant::now();
    let threshold = minimal_error(rho, rho_dims, sigma, sigma_dims)?;
    if eps + FEASIBILITY_MARGIN < threshold {
        return Ok(SdpOutcome {
            status: SdpStatus::Infeasible,
            c_star: None,
            nu: None,
            choi_pair: None,
            duality_gap: None,
            solve_time: start.elapsed().as_secs_f64(),
        });
    }
    let model = build_sdp(rho, rho_dims, sigma, sigma_dims, eps)?;
    solve_sdp(&model)
}

fn recover_choi_pair(model: &SdpModel, x: &[f64]) -> Result<(ChoiMatrix, ChoiMatrix)> {
    let basis_a = PhaseSpaceBasis::new(&model.input)?;
    let basis_b = PhaseSpaceBasis::new(&model.output)?;
    let na = basis_a.len();
    let nb = basis_b.len();
    let n = model.input.total_dim() * model.output.total_dim();
    let build = |offset: usize| -> CMat {
        let mut m = CMat::zeros(n, n);
        for u in 0..na {
            let au = basis_a.op(u);
            for v in 0..nb {
                let coeff = x[offset + u * nb + v];
                if coeff != 0.0 {
                    m += au.kronecker(&basis_b.op(v)) * c(coeff, 0.0);
                }
            }
        }
        m
    };
    Ok((
        ChoiMatrix::new(build(0), model.input.clone(), model.output.clone())?,
        ChoiMatrix::new(build(model.num_coeffs), model.input.clone(), model.output.clone())?,
    ))
}

/// Smallest `eps` in `[lo, hi]` at which the transformation becomes
/// feasible, from the phase-1 error minimization. Returns `None` when still
/// infeasible at `hi`.
pub fn feasibility_threshold(
    rho: &CMat,
    rho_dims: &DimSpec,
    sigma: &CMat,
    sigma_dims: &DimSpec,
    lo: f64,
    hi: f64,
) -> Result<Option<f64>> {
    let t = minimal_error(rho, rho_dims, sigma, sigma_dims)?;
    if t <= lo + FEASIBILITY_MARGIN {
        Ok(Some(lo))
    } else if t <= hi + FEASIBILITY_MARGIN {
        Ok(Some(t))
    } else {
        Ok(None)
    }
}

/// Hoeffding sampling-cost estimate: number of samples needed to estimate
/// to within `eps_est` with failure probability `delta`, given overhead
/// `nu`: `ceil(2 (2^nu)^2 ln(2 / delta) / eps_est^2)`.
pub fn sampling_cost(nu: f64, eps_est: f64, delta: f64) -> Result<u64> {
    if !(eps_est > 0.0) {
        return Err(Error::Domain(format!("eps_est must be positive, got {eps_est}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let gamma = 2f64.powf(nu);
    let raw = 2.0 * gamma * gamma * (2.0 / delta).ln() / (eps_est * eps_est);
    if !raw.is_finite() {
        return Err(Error::Domain("sampling cost overflowed".into()));
    }
    Ok(raw.ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{named_state, StateName};

    #[test]
    fn identity_transformation_is_free() {
        let (s, dims) = named_state(StateName::Strange, 1).unwrap();
        let out = physical_implementability(&s, &dims, &s, &dims, 0.0).unwrap();
        assert_eq!(out.status, SdpStatus::Optimal);
        assert!(out.nu.unwrap().abs() < 1e-5, "nu = {:?}", out.nu);
        assert!(out.duality_gap.unwrap() < 1e-7);
    }

    #[test]
    fn large_eps_is_trivially_feasible() {
        let (t, dims) = named_state(StateName::TMagic, 1).unwrap();
        let (s, _) = named_state(StateName::Strange, 1).unwrap();
        let out = physical_implementability(&t, &dims, &s, &dims, 1.0).unwrap();
        assert_eq!(out.status, SdpStatus::Optimal);
    }

    #[test]
    fn mana_increasing_direction_is_infeasible_at_zero_error() {
        let (h, dims) = named_state(StateName::HMagic, 1).unwrap();
        let (s, _) = named_state(StateName::Strange, 1).unwrap();
        let out = physical_implementability(&h, &dims, &s, &dims, 0.0).unwrap();
        assert_eq!(out.status, SdpStatus::Infeasible);
    }

    #[test]
    fn sampling_cost_reference_values() {
        assert_eq!(sampling_cost(0.0, 0.1, 0.05).unwrap(), 738);
        assert_eq!(sampling_cost(0.5, 0.1, 0.05).unwrap(), 1476);
        assert!(sampling_cost(0.0, 0.0, 0.05).is_err());
        assert!(sampling_cost(0.0, 0.1, 2.0).is_err());
    }
}
