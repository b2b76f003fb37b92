//! Seeded random generators for states, unitaries and channels. Used by the
//! test suites and benchmarks; exposed because sweep-style experiments want
//! the same distributions.

use nalgebra::{Complex, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::{c, CMat};

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-ish random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // Fix the phase ambiguity so the distribution does not depend on the
    // QR sign convention.
    for j in 0..d {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..d {
                q[(i, j)] *= phase.conj();
            }
        }
    }
    q
}

/// Random pure-state amplitude vector of dimension `d`.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<Complex<f64>> {
    let mut v = DVector::from_fn(d, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.iter().map(|z: &Complex<f64>| z.norm_sqr()).sum::<f64>().sqrt();
    v /= c(norm, 0.0);
    v
}

/// Random pure density operator.
pub fn random_pure_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let v = random_pure(rng, d);
    CMat::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

/// Random full-rank density operator (normalized Wishart).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()) / c(2.0, 0.0)
}

/// Random quasi-probability vector of length `n` with entries summing to 1.
pub fn random_quasi_prob<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let s: f64 = v.iter().sum();
        if s.abs() > 0.2 {
            return v.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Random column-stochastic matrix of shape `rows x cols`.
pub fn random_column_stochastic<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> nalgebra::DMatrix<f64> {
    let mut m = nalgebra::DMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>());
    for j in 0..cols {
        let s = m.column(j).sum();
        for i in 0..rows {
            m[(i, j)] /= s;
        }
    }
    m
}

/// Random CPTP Choi matrix on `da -> db` built from `kraus` Kraus operators.
pub fn random_cptp_choi<R: Rng + ?Sized>(
    rng: &mut R,
    da: usize,
    db: usize,
    kraus: usize,
) -> CMat {
    let gs: Vec<CMat> = (0..kraus).map(|_| ginibre(rng, db, da)).collect();
    // Normalize so the Kraus operators satisfy sum K^dag K = I.
    let mut s = CMat::zeros(da, da);
    for g in &gs {
        s += g.adjoint() * g;
    }
    let eig = s.symmetric_eigen();
    let mut inv_sqrt = CMat::zeros(da, da);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let scale = c(1.0 / lambda.sqrt(), 0.0);
        for i in 0..da {
            for j in 0..da {
                inv_sqrt[(i, j)] += col[i] * col[j].conj() * scale;
            }
        }
    }
    let mut j_mat = CMat::zeros(da * db, da * db);
    for g in &gs {
        let k = g * &inv_sqrt;
        // J += sum_ij |i><j| (x) K |i><j| K^dag
        for i in 0..da {
            for jcol in 0..da {
                for a in 0..db {
                    for b in 0..db {
                        j_mat[(i * db + a, jcol * db + b)] += k[(a, i)] * k[(b, jcol)].conj();
                    }
                }
            }
        }
    }
    j_mat
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{hermiticity_residue, partial_trace_second};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_unitary(&mut rng, 5);
        let prod = &u * u.adjoint();
        let diff = prod - CMat::identity(5, 5);
        assert!(diff.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn random_cptp_choi_is_tp_and_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = random_cptp_choi(&mut rng, 3, 3, 4);
        assert!(hermiticity_residue(&j) < 1e-10);
        let t = partial_trace_second(&j, 3, 3).unwrap();
        let diff = t - CMat::identity(3, 3);
        assert!(diff.iter().all(|z| z.norm() < 1e-9));
        assert!(crate::matrix::min_eigenvalue_hermitian(&j) > -1e-10);
    }

    #[test]
    fn quasi_prob_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let p = random_quasi_prob(&mut rng, 9);
            let s: f64 = p.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
