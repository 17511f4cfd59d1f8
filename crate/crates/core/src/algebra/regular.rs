//! Left-regular representation of the degenerate cyclotomic Hecke algebra
//! `B_{n,ℓ}(λ, ν)` by straightening into the normal form
//! `w · Y_1^{a_1} ⋯ Y_n^{a_n}` with `w ∈ S_n` and `0 ≤ a_i < ℓ`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use super::presentation::{bnl_presentation, s_label};
use super::rep::MatrixRep;
use crate::error::Result;
use crate::linalg::sparse_mul;
use crate::scalar::Field;

/// Permutation in one-line notation: `p[i]` is the image of `i` (0-based).
pub type Perm = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    P(Perm),
    Y(u8),
}

/// Normal-form basis element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    pub perm: Perm,
    pub exps: Vec<u8>,
}

pub fn compose(a: &[u8], b: &[u8]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn invert_perm(a: &[u8]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u8;
    }
    out
}

pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
    let mut p: Perm = (0..n as u8).collect();
    p.swap(i, j);
    p
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Perm> {
    fn rec(cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Perm>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x as u8);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Straightening engine for fixed `(n, λ, ν)`.
pub struct Straightener<F: Field> {
    n: usize,
    ell: usize,
    nu: F,
    /// `Y^ℓ = Σ_{r<ℓ} reduce[r] Y^r`.
    reduce: Vec<F>,
}

enum Step<F> {
    Normal,
    Rewrite(Vec<(F, Vec<Sym>)>),
}

impl<F: Field> Straightener<F> {
    pub fn new(n: usize, lambda: &[F], nu: F) -> Self {
        // coefficients of Π (Y - λ_j), lowest degree first
        let mut c = vec![F::one()];
        for l in lambda {
            let mut next = vec![F::zero(); c.len() + 1];
            for (r, a) in c.iter().enumerate() {
                next[r + 1] += a.clone();
                next[r] -= a.clone() * l.clone();
            }
            c = next;
        }
        let ell = lambda.len();
        let reduce = c[..ell].iter().map(|x| -x.clone()).collect();
        Self { n, ell, nu, reduce }
    }

    fn step(&self, w: &[Sym]) -> Step<F> {
        for pos in 0..w.len().saturating_sub(1) {
            match (&w[pos], &w[pos + 1]) {
                (Sym::P(a), Sym::P(b)) => {
                    let mut out = w[..pos].to_vec();
                    out.push(Sym::P(compose(a, b)));
                    out.extend_from_slice(&w[pos + 2..]);
                    return Step::Rewrite(vec![(F::one(), out)]);
                }
                (Sym::Y(i), Sym::P(p)) => {
                    // Y_i w = w Y_{w^{-1}(i)}
                    let j = invert_perm(p)[*i as usize];
                    let mut out = w[..pos].to_vec();
                    out.push(Sym::P(p.clone()));
                    out.push(Sym::Y(j));
                    out.extend_from_slice(&w[pos + 2..]);
                    return Step::Rewrite(vec![(F::one(), out)]);
                }
                (Sym::Y(i), Sym::Y(j)) if i > j => {
                    // Y_i Y_j = Y_j Y_i + ν (Y_i - Y_j) s_ij
                    let (i, j) = (*i, *j);
                    let s = Sym::P(transposition(self.n, i as usize, j as usize));
                    let head = &w[..pos];
                    let tail = &w[pos + 2..];
                    let build = |mid: Vec<Sym>| {
                        let mut out = head.to_vec();
                        out.extend(mid);
                        out.extend_from_slice(tail);
                        out
                    };
                    let mut terms = vec![(F::one(), build(vec![Sym::Y(j), Sym::Y(i)]))];
                    if !self.nu.is_zero() {
                        terms.push((self.nu.clone(), build(vec![Sym::Y(i), s.clone()])));
                        terms.push((-self.nu.clone(), build(vec![Sym::Y(j), s])));
                    }
                    return Step::Rewrite(terms);
                }
                _ => {}
            }
        }
        // Y-part is sorted; reduce a run of length ℓ
        let mut run = 0;
        for pos in 0..w.len() {
            match (&w[pos], pos.checked_sub(1).map(|p| &w[p])) {
                (Sym::Y(i), Some(Sym::Y(prev))) if prev == i => run += 1,
                (Sym::Y(_), _) => run = 1,
                _ => run = 0,
            }
            if run == self.ell {
                let start = pos + 1 - self.ell;
                let Sym::Y(i) = w[pos] else { unreachable!() };
                let terms = (0..self.ell)
                    .filter(|&r| !self.reduce[r].is_zero())
                    .map(|r| {
                        let mut out = w[..start].to_vec();
                        out.extend(std::iter::repeat_n(Sym::Y(i), r));
                        out.extend_from_slice(&w[pos + 1..]);
                        (self.reduce[r].clone(), out)
                    })
                    .collect();
                return Step::Rewrite(terms);
            }
        }
        Step::Normal
    }

    fn to_basis(&self, w: &[Sym]) -> Basis {
        let mut perm: Perm = (0..self.n as u8).collect();
        let mut exps = vec![0u8; self.n];
        for s in w {
            match s {
                Sym::P(p) => perm = p.clone(),
                Sym::Y(i) => exps[*i as usize] += 1,
            }
        }
        Basis { perm, exps }
    }

    /// Straightens a linear combination of words into normal-form coordinates.
    /// Pending words are kept in a map so that equal words merge before
    /// being rewritten further.
    pub fn normalize(&self, input: Vec<(F, Vec<Sym>)>) -> BTreeMap<Basis, F> {
        let mut out: BTreeMap<Basis, F> = BTreeMap::new();
        let mut work: HashMap<Vec<Sym>, F> = HashMap::new();
        let push = |work: &mut HashMap<Vec<Sym>, F>, c: F, w: Vec<Sym>| {
            let e = work.entry(w).or_insert_with(F::zero);
            *e += c;
        };
        for (c, w) in input {
            push(&mut work, c, w);
        }
        while let Some(w) = work.keys().max_by_key(|w| w.len()).cloned() {
            let c = work.remove(&w).unwrap();
            if c.is_zero() {
                continue;
            }
            match self.step(&w) {
                Step::Normal => {
                    let e = out.entry(self.to_basis(&w)).or_insert_with(F::zero);
                    *e += c;
                }
                Step::Rewrite(terms) => {
                    for (a, t) in terms {
                        push(&mut work, a * c.clone(), t);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn basis(&self) -> Vec<Basis> {
        let mut out = Vec::new();
        for perm in permutations(self.n) {
            let total = self.ell.pow(self.n as u32);
            for code in 0..total {
                let mut exps = vec![0u8; self.n];
                let mut c = code;
                for e in exps.iter_mut().rev() {
                    *e = (c % self.ell) as u8;
                    c /= self.ell;
                }
                out.push(Basis { perm: perm.clone(), exps });
            }
        }
        out
    }

    pub fn word_of(&self, b: &Basis) -> Vec<Sym> {
        let mut w = vec![Sym::P(b.perm.clone())];
        for (i, &a) in b.exps.iter().enumerate() {
            w.extend(std::iter::repeat_n(Sym::Y(i as u8), a as usize));
        }
        w
    }

    /// Matrix of left multiplication by the word `g` in the normal basis.
    pub fn left_matrix(&self, g: &[Sym], basis: &[Basis]) -> DMatrix<F> {
        let index: BTreeMap<&Basis, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
        let dim = basis.len();
        let mut m = DMatrix::from_element(dim, dim, F::zero());
        for (col, b) in basis.iter().enumerate() {
            let mut w = g.to_vec();
            w.extend(self.word_of(b));
            for (nb, c) in self.normalize(vec![(F::one(), w)]) {
                m[(index[&nb], col)] = c;
            }
        }
        m
    }
}

/// Generator words of `B_{n,ℓ}` in presentation label order.
fn generator_words(n: usize) -> Vec<(String, Vec<Sym>)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((s_label(i + 1, j + 1), vec![Sym::P(transposition(n, i, j))]));
        }
    }
    for i in 0..n {
        out.push((format!("Y{}", i + 1), vec![Sym::Y(i as u8)]));
    }
    out
}

/// Left-regular representation of `B_{n,ℓ}(λ, ν)`, dimension `n! ℓ^n`.
pub fn degenerate_regular_rep<F: Field>(n: usize, lambda: &[F], nu: &F) -> Result<MatrixRep<F>> {
    let st = Straightener::new(n, lambda, nu.clone());
    let basis = st.basis();
    let presentation = bnl_presentation(lambda, nu, n);
    let mats = generator_words(n).iter().map(|(_, w)| st.left_matrix(w, &basis)).collect();
    MatrixRep::new(presentation, mats)
}

/// Checks `g·(h·b) = (gh)·b` over all generator pairs and basis elements.
/// Returns the number of failing triples.
pub fn associativity_failures<F: Field>(n: usize, lambda: &[F], nu: &F) -> usize {
    let st = Straightener::new(n, lambda, nu.clone());
    let basis = st.basis();
    let gens = generator_words(n);
    let mats: Vec<DMatrix<F>> = gens.iter().map(|(_, w)| st.left_matrix(w, &basis)).collect();
    let mut fails = 0;
    for (gi, (_, g)) in gens.iter().enumerate() {
        for (hi, (_, h)) in gens.iter().enumerate() {
            let mut gh = g.clone();
            gh.extend(h.iter().cloned());
            let direct = st.left_matrix(&gh, &basis);
            let composed = sparse_mul(&mats[gi], &mats[hi]);
            for col in 0..basis.len() {
                if direct.column(col) != composed.column(col) {
                    fails += 1;
                }
            }
        }
    }
    fails
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::exact_null_space;
    use crate::params::qr;
    use crate::scalar::Qi;

    fn lam(ell: usize) -> Vec<Qi> {
        [qr(1, 3), qr(-2, 7), qr(5, 11), qr(3, 13)][..ell].to_vec()
    }

    #[test]
    fn dimension_and_exact_relations() {
        for (n, ell) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let rep = degenerate_regular_rep(n, &lam(ell), &qr(2, 9)).unwrap();
            assert_eq!(rep.dim(), (1..=n).product::<usize>() * ell.pow(n as u32));
            let r = rep.relation_residuals();
            assert_eq!(r.exact_zero, Some(true), "{:?}", r.worst());
        }
    }

    #[test]
    fn n1_is_commutative_quotient() {
        let l = lam(3);
        let rep = degenerate_regular_rep(1, &l, &qr(1, 2)).unwrap();
        let y = rep.m("Y1").clone();
        for lj in &l {
            let shifted = &y - DMatrix::from_diagonal_element(3, 3, lj.clone());
            assert_eq!(exact_null_space(&shifted).0.ncols(), 1);
        }
    }

    #[test]
    fn associativity_holds() {
        assert_eq!(associativity_failures(2, &lam(3), &qr(1, 5)), 0);
        assert_eq!(associativity_failures(3, &lam(2), &qr(-3, 7)), 0);
    }

    #[test]
    fn nu_zero_is_semidirect_product() {
        // at ν = 0, Y_i acts by multiplication in the i-th tensor slot after
        // untwisting by w: w Y^a ↦ w Y^{a + e_{w^{-1}(i)}} (before reduction).
        let l = lam(2);
        let rep = degenerate_regular_rep(2, &l, &qr(0, 1)).unwrap();
        let y1 = rep.m("Y1");
        let y2 = rep.m("Y2");
        assert_eq!(y1 * y2, y2 * y1);
        let s = rep.m("s1,2");
        assert_eq!(s * y1, y2 * s);
    }

    #[test]
    fn permutation_helpers() {
        let p = vec![1u8, 2, 0];
        assert_eq!(compose(&p, &invert_perm(&p)), vec![0, 1, 2]);
        assert_eq!(permutations(3).len(), 6);
    }
}
