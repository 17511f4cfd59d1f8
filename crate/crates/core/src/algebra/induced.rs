//! Modules induced at `ν = 0` from rank-one data: the semidirect product
//! `C[S_n] ⋉ (M_1 ⊗ ⋯ ⊗ M_n)`.

use nalgebra::DMatrix;
use num_traits::Zero;

use super::presentation::{bn_presentation, bnl_presentation, s_label, y_label};
use super::regular::{compose, invert_perm, permutations, transposition, Perm};
use super::rep::MatrixRep;
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, to_float};
use crate::params::RationalParams;
use crate::scalar::{Field, Qi};

/// Tensor-slot layout for `C[S_n] ⊗ M_1 ⊗ ⋯ ⊗ M_n`.
struct Layout {
    perms: Vec<Perm>,
    dims: Vec<usize>,
    slot_size: usize,
}

impl Layout {
    fn new(dims: Vec<usize>) -> Self {
        let perms = permutations(dims.len());
        let slot_size = dims.iter().product();
        Self { perms, dims, slot_size }
    }

    fn dim(&self) -> usize {
        self.perms.len() * self.slot_size
    }

    fn perm_index(&self, p: &Perm) -> usize {
        self.perms.iter().position(|q| q == p).expect("permutation in table")
    }

    fn digits(&self, mut v: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, d) in self.dims.iter().enumerate().rev() {
            out[slot] = v % d;
            v /= d;
        }
        out
    }

    fn undigits(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (x, d)| acc * d + x)
    }

    /// Left multiplication by a permutation on the group factor.
    fn perm_matrix<F: Field>(&self, s: &Perm) -> DMatrix<F> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, F::zero());
        for (wi, w) in self.perms.iter().enumerate() {
            let target = self.perm_index(&compose(s, w));
            for v in 0..self.slot_size {
                m[(target * self.slot_size + v, wi * self.slot_size + v)] = F::one();
            }
        }
        m
    }

    /// `Y_i (w ⊗ v) = w ⊗ (op_{w^{-1}(i)} acting in slot w^{-1}(i)) v`, where
    /// `ops[p]` acts on slot `p`.
    fn slot_matrix<F: Field>(&self, i: usize, ops: &[&DMatrix<F>]) -> DMatrix<F> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, F::zero());
        for (wi, w) in self.perms.iter().enumerate() {
            let p = invert_perm(w)[i] as usize;
            let op = ops[p];
            for v in 0..self.slot_size {
                let dv = self.digits(v);
                for r in 0..self.dims[p] {
                    let c = &op[(r, dv[p])];
                    if c.is_zero() {
                        continue;
                    }
                    let mut d2 = dv.clone();
                    d2[p] = r;
                    m[(wi * self.slot_size + self.undigits(&d2), wi * self.slot_size + v)] = c.clone();
                }
            }
        }
        m
    }
}

fn check_rank_one_module<F: Field>(params: &RationalParams, module: &[DMatrix<F>], tol: f64) -> Result<()> {
    let m = params.m();
    if module.len() != m {
        return Err(Error::ShapeMismatch(format!("rank-one module has {} matrices, expected {m}", module.len())));
    }
    let d = module[0].nrows();
    if module.iter().any(|x| x.nrows() != d || x.ncols() != d) {
        return Err(Error::ShapeMismatch("rank-one module matrices must be square of equal size".into()));
    }
    let scale = module.iter().map(|x| spectral_norm(&to_float(x))).fold(1.0, f64::max);
    let sum = module.iter().skip(1).fold(module[0].clone(), |acc, x| acc + x);
    let s = spectral_norm(&to_float(&sum));
    if s > tol * scale {
        return Err(Error::SpecMismatch(format!("rank-one module does not sum to zero ({s:e})")));
    }
    for (k, x) in module.iter().enumerate() {
        let mut p = DMatrix::<F>::identity(d, d);
        for g in &params.gamma[k] {
            p *= x - DMatrix::<F>::identity(d, d).map(|e| e * F::from_qi(g));
        }
        let r = spectral_norm(&to_float(&p));
        if r > tol * scale.powi(params.graph.d(k) as i32) {
            return Err(Error::SpecMismatch(format!("leg {} spectrum disagrees with gamma ({r:e})", k + 1)));
        }
    }
    Ok(())
}

/// `B_n(γ, 0)`-module on `C[S_n] ⊗ M_1 ⊗ ⋯ ⊗ M_n` from `n` rank-one modules.
pub fn induced_rep_nu_zero<F: Field>(params: &RationalParams, modules: &[Vec<DMatrix<F>>], tol: f64) -> Result<MatrixRep<F>> {
    if !params.nu.is_zero() {
        return Err(Error::SpecMismatch("induced modules require nu = 0".into()));
    }
    let n = modules.len();
    if n == 0 {
        return Err(Error::ShapeMismatch("need at least one module".into()));
    }
    for module in modules {
        check_rank_one_module(params, module, tol)?;
    }
    let layout = Layout::new(modules.iter().map(|mm| mm[0].nrows()).collect());
    let pres = bn_presentation(params, n).map_coeffs(|c: &Qi| F::from_qi(c));
    let mut mats = vec![DMatrix::from_element(0, 0, F::zero()); pres.labels.len()];
    for i in 0..n {
        for j in i + 1..n {
            mats[pres.index_of(&s_label(i + 1, j + 1)).unwrap()] = layout.perm_matrix(&transposition(n, i, j));
        }
        for k in 0..params.m() {
            let ops: Vec<&DMatrix<F>> = modules.iter().map(|mm| &mm[k]).collect();
            mats[pres.index_of(&y_label(i + 1, k + 1)).unwrap()] = layout.slot_matrix(i, &ops);
        }
    }
    MatrixRep::new(pres, mats)
}

/// `C[S_n] ⋉ M^{⊗n}` as a `B_{n,ℓ}(λ, 0)`-module, for a single operator `y`
/// annihilated by `Π (y - λ_j)`.
pub fn semidirect_cyclotomic<F: Field>(n: usize, lambda: &[F], y: &DMatrix<F>) -> Result<MatrixRep<F>> {
    let layout = Layout::new(vec![y.nrows(); n]);
    let pres = bnl_presentation(lambda, &F::zero(), n);
    let ops: Vec<&DMatrix<F>> = vec![y; n];
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            mats.push(layout.perm_matrix(&transposition(n, i, j)));
        }
    }
    for i in 0..n {
        mats.push(layout.slot_matrix(i, &ops));
    }
    MatrixRep::new(pres, mats)
}
