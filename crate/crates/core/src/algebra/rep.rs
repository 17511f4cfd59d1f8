//! Matrix realizations of presentations and their relation residuals.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use super::presentation::{Letter, NcPoly, Presentation, Word};
use crate::error::{Error, Result};
use crate::linalg::{exact_inverse, identity, inverse, kron, sparse_mul, spectral_norm, to_float};
use crate::scalar::{Field, C64};

/// A labeled map from generators to square matrices of one size.
#[derive(Debug, Clone)]
pub struct MatrixRep<F: Field> {
    presentation: Presentation<F>,
    mats: Vec<DMatrix<F>>,
    dim: usize,
    inverses: OnceLock<Vec<Option<DMatrix<F>>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub per_relation: Vec<(String, f64)>,
    pub max: f64,
    /// In exact mode: whether every relation evaluates to the zero matrix.
    pub exact_zero: Option<bool>,
}

impl ResidualReport {
    pub fn worst(&self) -> Option<&(String, f64)> {
        self.per_relation.iter().max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

fn invert<F: Field>(m: &DMatrix<F>) -> Option<DMatrix<F>> {
    if F::EXACT {
        exact_inverse(m)
    } else {
        // LU through the float view keeps pivoting decisions numerical.
        let f = to_float(m);
        let inv = inverse(&f)?;
        let back: Option<DMatrix<F>> = from_c64(&inv);
        back.or_else(|| exact_inverse(m))
    }
}

/// Reinterprets a float matrix in a float field (identity for `C64`).
fn from_c64<F: Field>(m: &DMatrix<C64>) -> Option<DMatrix<F>> {
    let any: &dyn std::any::Any = m;
    any.downcast_ref::<DMatrix<F>>().cloned()
}

impl<F: Field> MatrixRep<F> {
    pub fn new(presentation: Presentation<F>, mats: Vec<DMatrix<F>>) -> Result<Self> {
        if mats.len() != presentation.labels.len() {
            return Err(Error::SizeMismatch(format!(
                "{} matrices for {} generators",
                mats.len(),
                presentation.labels.len()
            )));
        }
        let dim = mats.first().map_or(0, |m| m.nrows());
        if mats.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::SizeMismatch("generator matrices must be square of equal size".into()));
        }
        let rep = Self { presentation, mats, dim, inverses: OnceLock::new() };
        for (i, need) in rep.presentation.invertible.iter().enumerate() {
            if *need && rep.inverses()[i].is_none() {
                return Err(Error::SizeMismatch(format!("generator {} is not invertible", rep.presentation.labels[i])));
            }
        }
        Ok(rep)
    }

    pub fn presentation(&self) -> &Presentation<F> {
        &self.presentation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.presentation.labels
    }

    pub fn mats(&self) -> &[DMatrix<F>] {
        &self.mats
    }

    pub fn get(&self, label: &str) -> Option<&DMatrix<F>> {
        self.presentation.index_of(label).map(|i| &self.mats[i])
    }

    /// Matrix of a generator; panics on unknown labels.
    pub fn m(&self, label: &str) -> &DMatrix<F> {
        self.get(label).unwrap_or_else(|| panic!("unknown generator {label}"))
    }

    /// Inverse of a generator (`None` if singular).
    pub fn inv(&self, label: &str) -> Option<&DMatrix<F>> {
        let i = self.presentation.index_of(label)?;
        self.inverses()[i].as_ref()
    }

    fn inverses(&self) -> &Vec<Option<DMatrix<F>>> {
        self.inverses.get_or_init(|| {
            self.mats.iter().zip(&self.presentation.invertible).map(|(m, need)| if *need { invert(m) } else { None }).collect()
        })
    }

    fn letter_matrix(&self, l: &Letter) -> DMatrix<F> {
        if l.inv {
            match &self.inverses()[l.gen] {
                Some(m) => m.clone(),
                None => invert(&self.mats[l.gen]).expect("inverse letter of a singular generator"),
            }
        } else {
            self.mats[l.gen].clone()
        }
    }

    pub fn eval_word(&self, w: &Word) -> DMatrix<F> {
        let mut it = w.iter();
        let Some(first) = it.next() else { return identity(self.dim) };
        let mut acc = self.letter_matrix(first);
        for l in it {
            acc = match (F::EXACT, l.inv) {
                (true, _) => sparse_mul(&acc, &self.letter_matrix(l)),
                (false, true) => acc * self.letter_matrix(l),
                (false, false) => &acc * &self.mats[l.gen],
            };
        }
        acc
    }

    pub fn eval(&self, p: &NcPoly<F>) -> DMatrix<F> {
        let mut out = DMatrix::from_element(self.dim, self.dim, F::zero());
        for (c, w) in &p.terms {
            if c.is_zero() {
                continue;
            }
            let mw = self.eval_word(w);
            if c.is_one() {
                out += mw;
            } else {
                out += mw.map(|x| x * c.clone());
            }
        }
        out
    }

    /// Derivative of `p` at this representation in the direction that moves
    /// generator `gen` by `e` (non-inverted occurrences only).
    pub fn eval_directional(&self, p: &NcPoly<F>, gen: usize, e: &DMatrix<F>) -> DMatrix<F> {
        let mut out = DMatrix::from_element(self.dim, self.dim, F::zero());
        for (c, w) in &p.terms {
            for (pos, l) in w.iter().enumerate() {
                if l.gen != gen {
                    continue;
                }
                assert!(!l.inv, "directional derivative through an inverse letter");
                let pre = self.eval_word(&w[..pos].to_vec());
                let post = self.eval_word(&w[pos + 1..].to_vec());
                out += (pre * e * post).map(|x| x * c.clone());
            }
        }
        out
    }

    pub fn relation_residuals(&self) -> ResidualReport {
        let mut per = Vec::with_capacity(self.presentation.relations.len());
        let mut all_zero = true;
        for r in &self.presentation.relations {
            let v = self.eval(&r.poly);
            let zero = v.iter().all(|x| x.is_zero());
            all_zero &= zero;
            let norm = if F::EXACT && zero { 0.0 } else { spectral_norm(&to_float(&v)) };
            per.push((r.name.clone(), norm));
        }
        let max = per.iter().map(|x| x.1).fold(0.0, f64::max);
        ResidualReport { per_relation: per, max, exact_zero: F::EXACT.then_some(all_zero) }
    }

    /// New representation with one generator replaced.
    pub fn with_generator(&self, label: &str, m: DMatrix<F>) -> Result<Self> {
        let i = self.presentation.index_of(label).ok_or_else(|| Error::ShapeMismatch(format!("unknown generator {label}")))?;
        let mut mats = self.mats.clone();
        mats[i] = m;
        Self::new(self.presentation.clone(), mats)
    }

    /// Same matrices under another presentation with identical labels.
    pub fn with_presentation(&self, presentation: Presentation<F>) -> Result<Self> {
        if presentation.labels != self.presentation.labels {
            return Err(Error::ShapeMismatch("presentation labels differ".into()));
        }
        Self::new(presentation, self.mats.clone())
    }

    pub fn to_float(&self) -> MatrixRep<C64> {
        MatrixRep::new(self.presentation.map_coeffs(|c| c.to_c64()), self.mats.iter().map(to_float).collect())
            .expect("float view of a valid representation")
    }

    /// Conjugates every generator: `g M g^{-1}`.
    pub fn conjugated(&self, g: &DMatrix<F>) -> Result<Self> {
        let gi = invert(g).ok_or_else(|| Error::SizeMismatch("conjugator not invertible".into()))?;
        Self::new(self.presentation.clone(), self.mats.iter().map(|m| g * m * &gi).collect())
    }
}

impl MatrixRep<C64> {
    /// Matrix of the linear map `vec(E) ↦ vec(D_E p)`, where `D_E p` is
    /// [`MatrixRep::eval_directional`], in column-major vectorization.
    pub fn directional_operator(&self, p: &NcPoly<C64>, gen: usize) -> DMatrix<C64> {
        let n2 = self.dim * self.dim;
        let mut out = DMatrix::zeros(n2, n2);
        for (c, w) in &p.terms {
            for (pos, l) in w.iter().enumerate() {
                if l.gen != gen {
                    continue;
                }
                assert!(!l.inv, "directional derivative through an inverse letter");
                let pre = self.eval_word(&w[..pos].to_vec());
                let post = self.eval_word(&w[pos + 1..].to_vec());
                out += kron(&post.transpose(), &pre) * *c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::presentation::bnl_presentation;
    use crate::params::qr;
    use crate::scalar::Qi;

    fn n1_rep() -> MatrixRep<Qi> {
        let lambda = [qr(1, 2), qr(-1, 3)];
        let p = bnl_presentation(&lambda, &qr(0, 1), 1);
        let mut y = DMatrix::from_element(2, 2, qr(0, 1));
        y[(0, 0)] = qr(1, 2);
        y[(1, 1)] = qr(-1, 3);
        y[(0, 1)] = qr(7, 1);
        MatrixRep::new(p, vec![y]).unwrap()
    }

    #[test]
    fn exact_relations_vanish() {
        let r = n1_rep().relation_residuals();
        assert_eq!(r.exact_zero, Some(true));
        assert_eq!(r.max, 0.0);
    }

    #[test]
    fn perturbation_is_detected() {
        let rep = n1_rep().to_float();
        let mut y = rep.m("Y1").clone();
        y[(1, 0)] += C64::new(1e-3, 0.0);
        let bad = rep.with_generator("Y1", y).unwrap();
        assert!(bad.relation_residuals().max >= 1e-4);
    }

    #[test]
    fn directional_derivative_matches_difference() {
        let rep = n1_rep().to_float();
        let p = &rep.presentation().relations[0].poly;
        let e = DMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let d = rep.eval_directional(p, 0, &e);
        let h = 1e-6;
        let plus = rep.with_generator("Y1", rep.m("Y1") + e.map(|x| x * h)).unwrap().eval(p);
        let minus = rep.with_generator("Y1", rep.m("Y1") - e.map(|x| x * h)).unwrap().eval(p);
        let fd = (plus - minus).map(|x| x / (2.0 * h));
        assert!((fd - &d).norm() < 1e-6);
        let op = rep.directional_operator(p, 0);
        let via_op = &op * nalgebra::DVector::from_column_slice(e.as_slice());
        assert!((via_op - nalgebra::DVector::from_column_slice(d.as_slice())).norm() < 1e-12);
    }
}
