//! Heisenberg-Weyl operators and phase-space point operators for odd
//! dimensions.
//!
//! The discrete phase space of a single `d`-level system is `Z_d x Z_d`. At
//! each point `u = (u1, u2)` there is a Weyl operator `T_u` and a Hermitian
//! phase-point operator `A_u`; composite systems take tensor products of the
//! single-system operators. Phase points are flattened as `u1 * d + u2` per
//! subsystem, subsystems in row-major tensor order.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::matrix::{c, kron_all, CMat, DimSpec};

/// A point of the discrete phase space, one `(u1, u2)` pair per subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePoint {
    pub coords: Vec<(usize, usize)>,
}

impl PhasePoint {
    pub fn single(u1: usize, u2: usize) -> Self {
        Self { coords: vec![(u1, u2)] }
    }

    /// Flattened index in the canonical enumeration order.
    pub fn flat_index(&self, dims: &DimSpec) -> Result<usize> {
        if self.coords.len() != dims.dims().len() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} subsystems, dims has {}",
                self.coords.len(),
                dims.dims().len()
            )));
        }
        let mut idx = 0;
        for (&(u1, u2), &d) in self.coords.iter().zip(dims.dims()) {
            if u1 >= d || u2 >= d {
                return Err(Error::ShapeMismatch(format!(
                    "coordinate ({u1}, {u2}) out of range for dimension {d}"
                )));
            }
            idx = idx * d * d + u1 * d + u2;
        }
        Ok(idx)
    }

    pub fn from_flat(dims: &DimSpec, mut idx: usize) -> Result<Self> {
        if idx >= dims.num_points() {
            return Err(Error::ShapeMismatch(format!(
                "flat index {idx} out of range for {} phase points",
                dims.num_points()
            )));
        }
        let mut coords = vec![(0, 0); dims.dims().len()];
        for (slot, &d) in coords.iter_mut().zip(dims.dims()).rev() {
            let local = idx % (d * d);
            idx /= d * d;
            *slot = (local / d, local % d);
        }
        Ok(Self { coords })
    }
}

fn check_odd(d: usize) -> Result<()> {
    if d < 3 || d % 2 == 0 {
        return Err(Error::BadDimension(d));
    }
    Ok(())
}

/// The boost and shift pair `(X, Z)` with `X|j> = |j+1 mod d>` and
/// `Z|j> = w^j |j>`, `w = exp(2 pi i / d)`.
pub fn shift_boost(d: usize) -> Result<(CMat, CMat)> {
    check_odd(d)?;
    let mut x = CMat::zeros(d, d);
    for j in 0..d {
        x[((j + 1) % d, j)] = c(1.0, 0.0);
    }
    let z = CMat::from_fn(d, d, |i, j| {
        if i == j {
            c(0.0, 2.0 * PI * j as f64 / d as f64).exp()
        } else {
            c(0.0, 0.0)
        }
    });
    Ok((x, z))
}

/// Weyl operator `T_u = tau^{-u1 u2} Z^{u1} X^{u2}`, `tau = exp((d+1) pi i / d)`.
pub fn weyl_operator(d: usize, u: &PhasePoint) -> Result<CMat> {
    check_odd(d)?;
    if u.coords.len() != 1 {
        return Err(Error::ShapeMismatch(
            "weyl_operator takes a single-system point".into(),
        ));
    }
    let (u1, u2) = u.coords[0];
    if u1 >= d || u2 >= d {
        return Err(Error::ShapeMismatch(format!(
            "coordinate ({u1}, {u2}) out of range for dimension {d}"
        )));
    }
    let (x, z) = shift_boost(d)?;
    let tau_phase = -((d + 1) as f64) * PI / d as f64 * (u1 * u2) as f64;
    let phase = c(0.0, tau_phase).exp();
    let mut m = CMat::identity(d, d);
    for _ in 0..u1 {
        m = &z * m;
    }
    for _ in 0..u2 {
        m = m * &x;
    }
    Ok(m * phase)
}

/// Immutable set of the `d^2` phase-point operators of a single system,
/// together with the permutation realizing transpose closure.
#[derive(Debug)]
pub struct SingleBasis {
    pub d: usize,
    /// `A_u` indexed by `u1 * d + u2`.
    pub ops: Vec<CMat>,
    /// `transpose_perm[u] = v` such that `A_u^T = A_v`.
    pub transpose_perm: Vec<usize>,
}

fn build_single_basis(d: usize) -> Result<SingleBasis> {
    let mut a0 = CMat::zeros(d, d);
    for u1 in 0..d {
        for u2 in 0..d {
            a0 += weyl_operator(d, &PhasePoint::single(u1, u2))?;
        }
    }
    a0 /= c(d as f64, 0.0);

    let mut ops = Vec::with_capacity(d * d);
    for u1 in 0..d {
        for u2 in 0..d {
            let t = weyl_operator(d, &PhasePoint::single(u1, u2))?;
            ops.push(&t * &a0 * t.adjoint());
        }
    }

    let mut transpose_perm = vec![usize::MAX; d * d];
    for (u, op) in ops.iter().enumerate() {
        let t = op.transpose();
        let v = ops
            .iter()
            .position(|cand| (&t - cand).iter().all(|z| z.norm() <= 1e-10))
            .ok_or_else(|| {
                Error::Solver(format!("transpose closure failed for d = {d}, u = {u}"))
            })?;
        transpose_perm[u] = v;
    }

    Ok(SingleBasis { d, ops, transpose_perm })
}

/// Cached single-system basis for odd `d`. Construction is `O(d^3)` per
/// operator and reused heavily, so it runs once per dimension.
pub fn single_basis(d: usize) -> Result<Arc<SingleBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SingleBasis>>>> = OnceLock::new();
    check_odd(d)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    // Build outside the lock only if absent; a duplicate build is harmless.
    if let Some(b) = cache.lock().unwrap().get(&d) {
        return Ok(b.clone());
    }
    let built = Arc::new(build_single_basis(d)?);
    Ok(cache
        .lock()
        .unwrap()
        .entry(d)
        .or_insert(built)
        .clone())
}

/// Phase-point operator view over a (possibly composite) system.
#[derive(Debug, Clone)]
pub struct PhaseSpaceBasis {
    dims: DimSpec,
    factors: Vec<Arc<SingleBasis>>,
}

impl PhaseSpaceBasis {
    pub fn new(dims: &DimSpec) -> Result<Self> {
        let factors = dims
            .dims()
            .iter()
            .map(|&d| single_basis(d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dims: dims.clone(), factors })
    }

    pub fn dims(&self) -> &DimSpec {
        &self.dims
    }

    /// Number of phase points, `D^2`.
    pub fn len(&self) -> usize {
        self.dims.num_points()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The operator `A_u` for a flattened point index.
    pub fn op(&self, flat: usize) -> CMat {
        let point = PhasePoint::from_flat(&self.dims, flat).expect("index in range");
        if self.factors.len() == 1 {
            let (u1, u2) = point.coords[0];
            return self.factors[0].ops[u1 * self.factors[0].d + u2].clone();
        }
        let parts: Vec<CMat> = point
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&(u1, u2), f)| f.ops[u1 * f.d + u2].clone())
            .collect();
        kron_all(&parts)
    }

    /// Index `v` with `A_v = A_u^T`.
    pub fn transpose_perm(&self, flat: usize) -> usize {
        let point = PhasePoint::from_flat(&self.dims, flat).expect("index in range");
        let mut idx = 0;
        for (&(u1, u2), f) in point.coords.iter().zip(&self.factors) {
            let t = f.transpose_perm[u1 * f.d + u2];
            idx = idx * f.d * f.d + t;
        }
        idx
    }
}

/// The phase-point operator `A_u` (tensor product over subsystems).
pub fn phase_point_operator(dims: &DimSpec, u: &PhasePoint) -> Result<CMat> {
    let basis = PhaseSpaceBasis::new(dims)?;
    let flat = u.flat_index(dims)?;
    Ok(basis.op(flat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hermiticity_residue;

    #[test]
    fn rejects_even_or_small_dimension() {
        assert!(shift_boost(2).is_err());
        assert!(shift_boost(1).is_err());
        assert!(shift_boost(6).is_err());
        assert!(shift_boost(3).is_ok());
    }

    #[test]
    fn shift_is_cyclic_permutation_d3() {
        let (x, _) = shift_boost(3).unwrap();
        for j in 0..3 {
            for i in 0..3 {
                let expect = if i == (j + 1) % 3 { 1.0 } else { 0.0 };
                assert!((x[(i, j)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn boost_is_omega_diagonal_d3() {
        let (_, z) = shift_boost(3).unwrap();
        let omega = c(0.0, 2.0 * PI / 3.0).exp();
        assert!((z[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((z[(1, 1)] - omega).norm() < 1e-15);
        assert!((z[(2, 2)] - omega * omega).norm() < 1e-15);
    }

    #[test]
    fn fifth_powers_are_identity_d5() {
        let (x, z) = shift_boost(5).unwrap();
        let mut xp = CMat::identity(5, 5);
        let mut zp = CMat::identity(5, 5);
        for _ in 0..5 {
            xp = &x * xp;
            zp = &z * zp;
        }
        let id = CMat::identity(5, 5);
        assert!((&xp - &id).iter().all(|v| v.norm() < 1e-12));
        assert!((&zp - &id).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn weyl_special_cases_d3() {
        let id = weyl_operator(3, &PhasePoint::single(0, 0)).unwrap();
        assert!((&id - CMat::identity(3, 3)).iter().all(|v| v.norm() < 1e-15));

        let (_, z) = shift_boost(3).unwrap();
        let t10 = weyl_operator(3, &PhasePoint::single(1, 0)).unwrap();
        assert!((&t10 - &z).iter().all(|v| v.norm() < 1e-15));

        // T_(1,1) is unitary.
        let t11 = weyl_operator(3, &PhasePoint::single(1, 1)).unwrap();
        let prod = &t11 * t11.adjoint();
        assert!((&prod - CMat::identity(3, 3)).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn point_operators_orthogonal_and_complete_d3() {
        let basis = PhaseSpaceBasis::new(&DimSpec::single(3).unwrap()).unwrap();
        let mut sum = CMat::zeros(3, 3);
        for u in 0..9 {
            let au = basis.op(u);
            assert!(hermiticity_residue(&au) < 1e-10);
            assert!((au.trace() - c(1.0, 0.0)).norm() < 1e-10);
            for v in 0..9 {
                let tr = (&au * basis.op(v)).trace();
                let expect = if u == v { 3.0 } else { 0.0 };
                assert!((tr - c(expect, 0.0)).norm() < 1e-10);
            }
            sum += au;
        }
        sum /= c(3.0, 0.0);
        assert!((sum - CMat::identity(3, 3)).iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn composite_point_operator_is_tensor_product() {
        let dims = DimSpec::new(vec![3, 3]).unwrap();
        let d3 = DimSpec::single(3).unwrap();
        let u = PhasePoint { coords: vec![(1, 2), (0, 1)] };
        let a = phase_point_operator(&dims, &u).unwrap();
        let a1 = phase_point_operator(&d3, &PhasePoint::single(1, 2)).unwrap();
        let a2 = phase_point_operator(&d3, &PhasePoint::single(0, 1)).unwrap();
        let expect = a1.kronecker(&a2);
        assert!((&a - &expect).iter().all(|v| v.norm() < 1e-12));
        assert!((a.trace() - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn flat_index_round_trip() {
        let dims = DimSpec::new(vec![3, 5]).unwrap();
        for idx in 0..dims.num_points() {
            let p = PhasePoint::from_flat(&dims, idx).unwrap();
            assert_eq!(p.flat_index(&dims).unwrap(), idx);
        }
    }

    #[test]
    fn transpose_perm_matches_numeric_transpose() {
        for d in [3usize, 5] {
            let b = single_basis(d).unwrap();
            for u in 0..d * d {
                let v = b.transpose_perm[u];
                let diff = b.ops[u].transpose() - &b.ops[v];
                assert!(diff.iter().all(|z| z.norm() < 1e-10));
            }
        }
    }
}
