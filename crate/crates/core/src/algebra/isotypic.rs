//! Joint eigenspaces of subalgebra characters and restricted operators.

use nalgebra::DMatrix;

use super::presentation::NcPoly;
use super::rep::MatrixRep;
use crate::error::{Error, Result};
use crate::linalg::{exact_null_space, identity, null_space_abs, spectral_norm, to_float, vstack, CMat};
use crate::scalar::{Field, Qi, C64};

/// Character of a subalgebra: each element must act by the given scalar.
#[derive(Debug, Clone)]
pub struct IsotypicSpec<F> {
    pub entries: Vec<(NcPoly<F>, F)>,
}

/// Orthonormal basis of a subspace (columns).
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: CMat,
    /// Singular values of the stacked constraint matrix (descending).
    pub singular: Vec<f64>,
}

impl Subspace {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn whole(n: usize) -> Self {
        Self { ambient: n, basis: CMat::identity(n, n), singular: Vec::new() }
    }
}

/// Joint eigenspace computed by singular-value thresholding at
/// `tol · max(1, ‖stack‖)`.
pub fn isotypic_subspace(rep: &MatrixRep<C64>, spec: &IsotypicSpec<C64>, tol: f64) -> Result<Subspace> {
    let n = rep.dim();
    if spec.entries.is_empty() {
        return Ok(Subspace::whole(n));
    }
    let blocks: Vec<CMat> =
        spec.entries.iter().map(|(p, chi)| rep.eval(p) - CMat::identity(n, n).map(|x| x * chi)).collect();
    let stack = vstack(&blocks);
    let cut = tol * spectral_norm(&stack).max(1.0);
    let ns = null_space_abs(&stack, cut);
    if ns.basis.ncols() == 0 {
        return Err(Error::EmptySubspace);
    }
    Ok(Subspace { ambient: n, basis: ns.basis, singular: ns.singular })
}

/// Action of the central idempotent of the character on `rep`: the projector
/// onto the joint eigenspace along the sum of the other isotypic components.
/// Built from right eigenvectors `B` and left eigenvectors `L` as
/// `B (L B)^{-1} L`, which requires the subalgebra to act semisimply.
pub fn isotypic_projector(rep: &MatrixRep<C64>, spec: &IsotypicSpec<C64>, tol: f64) -> Result<CMat> {
    let n = rep.dim();
    let right = isotypic_subspace(rep, spec, tol)?;
    let blocks: Vec<CMat> = spec
        .entries
        .iter()
        .map(|(p, chi)| (rep.eval(p) - CMat::identity(n, n).map(|x| x * chi)).transpose())
        .collect();
    let stack = vstack(&blocks);
    let left = null_space_abs(&stack, tol * spectral_norm(&stack).max(1.0)).basis.transpose();
    if left.nrows() != right.rank() {
        return Err(Error::WrongIsotypicDimension { found: left.nrows(), expected: right.rank() });
    }
    let pairing = &left * &right.basis;
    let inv = crate::linalg::inverse(&pairing).ok_or(Error::EmptySubspace)?;
    Ok(&right.basis * inv * left)
}

/// Matrix of `A` on `S` in the orthonormal basis, with a leakage check.
pub fn restrict_matrix(a: &CMat, s: &Subspace, tol: f64) -> Result<CMat> {
    let aq = a * &s.basis;
    let c = s.basis.adjoint() * &aq;
    let leak = spectral_norm(&(&aq - &s.basis * &c));
    if leak > tol * spectral_norm(a).max(1.0) {
        return Err(Error::NotInvariant(leak));
    }
    Ok(c)
}

pub fn restricted_operator(rep: &MatrixRep<C64>, word: &NcPoly<C64>, s: &Subspace, tol: f64) -> Result<CMat> {
    restrict_matrix(&rep.eval(word), s, tol)
}

/// Exact joint eigenspace over `Qi`: basis columns plus the free coordinate
/// positions used to read coordinates.
#[derive(Debug, Clone)]
pub struct ExactSubspace {
    pub basis: DMatrix<Qi>,
    pub free: Vec<usize>,
}

pub fn exact_isotypic_subspace(rep: &MatrixRep<Qi>, spec: &IsotypicSpec<Qi>) -> Result<ExactSubspace> {
    let n = rep.dim();
    let mut rows: Vec<DMatrix<Qi>> = Vec::new();
    for (p, chi) in &spec.entries {
        rows.push(rep.eval(p) - identity::<Qi>(n).map(|x| x * chi.clone()));
    }
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    let mut stack = DMatrix::from_element(total.max(1), n, Qi::from_i64(0));
    let mut off = 0;
    for r in &rows {
        stack.view_mut((off, 0), (r.nrows(), n)).copy_from(r);
        off += r.nrows();
    }
    let (basis, free) = exact_null_space(&stack);
    if basis.ncols() == 0 {
        return Err(Error::EmptySubspace);
    }
    Ok(ExactSubspace { basis, free })
}

/// Exact restriction: coordinates of `A b_j` read at the free positions;
/// fails unless `A B = B C` holds exactly.
pub fn exact_restrict(a: &DMatrix<Qi>, s: &ExactSubspace) -> Result<DMatrix<Qi>> {
    let ab = a * &s.basis;
    let r = s.basis.ncols();
    let c = DMatrix::from_fn(r, r, |i, j| ab[(s.free[i], j)].clone());
    let check = &s.basis * &c;
    if check != ab {
        let leak = spectral_norm(&to_float(&(check - ab)));
        return Err(Error::NotInvariant(leak));
    }
    Ok(c)
}

/// Genericity guard for the cyclotomic algebra `B_{n,ℓ}(λ, ν)`: rejects
/// `λ_i = λ_j` and `λ_i - λ_j = kν` for `1 ≤ |k| ≤ 2n`.
pub fn check_generic_additive<F: Field>(lambda: &[F], nu: &F, n: usize, tol: f64) -> Result<()> {
    let small = |z: F| z.modulus() <= tol;
    for i in 0..lambda.len() {
        for j in 0..lambda.len() {
            if i == j {
                continue;
            }
            let d = lambda[i].clone() - lambda[j].clone();
            if small(d.clone()) {
                return Err(Error::NonGenericParameters(format!("λ_{} = λ_{}", i + 1, j + 1)));
            }
            for k in 1..=(2 * n) as i64 {
                if !nu.modulus().eq(&0.0) && small(d.clone() - nu.clone() * F::from_i64(k)) {
                    return Err(Error::NonGenericParameters(format!("λ_{} - λ_{} = {k}ν", i + 1, j + 1)));
                }
            }
        }
    }
    Ok(())
}

/// Multiplicative counterpart: rejects `v_i = v_j` and `v_i / v_j = t^{2k}`
/// for `1 ≤ |k| ≤ 2n`, plus `t^2` a root of unity of order `≤ n`.
pub fn check_generic_multiplicative(v: &[C64], t: C64, n: usize, tol: f64) -> Result<()> {
    let t2 = t * t;
    for k in 1..=n as i32 {
        if (t2.powi(k) - 1.0).norm() <= tol && (t2 - 1.0).norm() > tol {
            return Err(Error::NonGenericParameters(format!("t^2 is a root of unity of order {k}")));
        }
    }
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i == j {
                continue;
            }
            let r = v[i] / v[j];
            if (r - 1.0).norm() <= tol {
                return Err(Error::NonGenericParameters(format!("v_{} = v_{}", i + 1, j + 1)));
            }
            if (t2 - 1.0).norm() > tol {
                for k in 1..=(2 * n) as i32 {
                    if (r - t2.powi(k)).norm() <= tol {
                        return Err(Error::NonGenericParameters(format!("v_{}/v_{} = t^{}", i + 1, j + 1, 2 * k)));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The `n × n` matrix `T` with zero diagonal and ones elsewhere.
pub fn t_matrix<F: Field>(n: usize) -> DMatrix<F> {
    DMatrix::from_fn(n, n, |i, j| if i == j { F::zero() } else { F::one() })
}
