//! Formal presentations: generator labels plus relations written as
//! noncommutative polynomials (with inverse letters) that must vanish.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::params::{MultiplicativeParams, RationalParams, SahiParams};
use crate::scalar::{Field, Qi, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

pub type Word = Vec<Letter>;

/// Finite linear combination of words.
#[derive(Debug, Clone, PartialEq)]
pub struct NcPoly<F> {
    pub terms: Vec<(F, Word)>,
}

impl<F: Field> NcPoly<F> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn scalar(c: F) -> Self {
        Self { terms: vec![(c, Vec::new())] }
    }

    pub fn one() -> Self {
        Self::scalar(F::one())
    }

    pub fn letter(gen: usize, inv: bool) -> Self {
        Self { terms: vec![(F::one(), vec![Letter { gen, inv }])] }
    }

    pub fn scale(&self, c: &F) -> Self {
        Self { terms: self.terms.iter().map(|(a, w)| (a.clone() * c.clone(), w.clone())).collect() }
    }

    /// `Π_j (self - roots_j)`.
    pub fn root_product(&self, roots: &[F]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| acc * (self.clone() - Self::scalar(r.clone())))
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc * self.clone())
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.clone() * b.clone() - b.clone() * a.clone()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.terms.iter().flat_map(|(_, w)| w.iter().map(|l| l.gen)).max()
    }

    pub fn map_coeffs<G: Field>(&self, f: &impl Fn(&F) -> G) -> NcPoly<G> {
        NcPoly { terms: self.terms.iter().map(|(c, w)| (f(c), w.clone())).collect() }
    }
}

impl<F: Field> Add for NcPoly<F> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.terms.extend(rhs.terms);
        self
    }
}

impl<F: Field> Neg for NcPoly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(c, w)| (-c, w)).collect() }
    }
}

impl<F: Field> Sub for NcPoly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Mul for NcPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (a, u) in &self.terms {
            for (b, v) in &rhs.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                terms.push((a.clone() * b.clone(), w));
            }
        }
        Self { terms }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation<F> {
    pub name: String,
    /// The relation reads `poly = 0`.
    pub poly: NcPoly<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Presentation<F> {
    pub name: String,
    pub labels: Vec<String>,
    /// Generators that must act invertibly.
    pub invertible: Vec<bool>,
    pub relations: Vec<Relation<F>>,
    index: HashMap<String, usize>,
}

impl<F: Field> Presentation<F> {
    pub fn new(name: impl Into<String>, labels: Vec<String>, invertible: bool) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let invertible = vec![invertible; labels.len()];
        Self { name: name.into(), labels, invertible, relations: Vec::new(), index }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Generator as a polynomial. Panics on unknown labels, which is a
    /// programming error in the presentation builders.
    pub fn g(&self, label: &str) -> NcPoly<F> {
        NcPoly::letter(self.index_of(label).unwrap_or_else(|| panic!("unknown generator {label}")), false)
    }

    /// Inverse of a generator.
    pub fn gi(&self, label: &str) -> NcPoly<F> {
        NcPoly::letter(self.index_of(label).unwrap_or_else(|| panic!("unknown generator {label}")), true)
    }

    pub fn add_relation(&mut self, name: impl Into<String>, poly: NcPoly<F>) {
        debug_assert!(poly.max_generator().is_none_or(|g| g < self.labels.len()));
        self.relations.push(Relation { name: name.into(), poly });
    }

    /// Declares `lhs = rhs`.
    pub fn add_eq(&mut self, name: impl Into<String>, lhs: NcPoly<F>, rhs: NcPoly<F>) {
        self.add_relation(name, lhs - rhs);
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> Presentation<G> {
        Presentation {
            name: self.name.clone(),
            labels: self.labels.clone(),
            invertible: self.invertible.clone(),
            relations: self.relations.iter().map(|r| Relation { name: r.name.clone(), poly: r.poly.map_coeffs(&f) }).collect(),
            index: self.index.clone(),
        }
    }

    /// Checks that every relation references declared generators only.
    pub fn is_well_formed(&self) -> bool {
        self.relations.iter().all(|r| r.poly.max_generator().is_none_or(|g| g < self.labels.len()))
    }
}

pub fn s_label(i: usize, j: usize) -> String {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    format!("s{a},{b}")
}

pub fn y_label(i: usize, k: usize) -> String {
    format!("Y{i},{k}")
}

fn transposition_labels(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(s_label(i, j));
        }
    }
    out
}

fn add_symmetric_group_relations<F: Field>(p: &mut Presentation<F>, n: usize) {
    for i in 1..=n {
        for j in i + 1..=n {
            let s = p.g(&s_label(i, j));
            p.add_eq(format!("s{i}{j}^2=1"), s.clone() * s, NcPoly::one());
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                let lhs = p.g(&s_label(i, j)) * p.g(&s_label(j, k)) * p.g(&s_label(i, j));
                p.add_eq(format!("s{i}{j}s{j}{k}s{i}{j}=s{i}{k}"), lhs, p.g(&s_label(i, k)));
                for l in k + 1..=n {
                    if l == i || l == j {
                        continue;
                    }
                    let (a, b) = (p.g(&s_label(i, j)), p.g(&s_label(k, l)));
                    p.add_relation(format!("[s{i}{j},s{k}{l}]=0"), NcPoly::commutator(&a, &b));
                }
            }
        }
    }
}

/// `Σ_{j≠i} s_ij`.
fn s_sum<F: Field>(p: &Presentation<F>, n: usize, i: usize) -> NcPoly<F> {
    (1..=n).filter(|&j| j != i).fold(NcPoly::zero(), |acc, j| acc + p.g(&s_label(i, j)))
}

/// The rational generalized DAHA `B_n(γ, ν)`; generators `s_ij` (`i < j`)
/// and `Y_{i,k}`.
pub fn bn_presentation(params: &RationalParams, n: usize) -> Presentation<Qi> {
    let m = params.m();
    let mut labels = transposition_labels(n);
    for i in 1..=n {
        for k in 1..=m {
            labels.push(y_label(i, k));
        }
    }
    let mut p = Presentation::new(format!("B_{n}"), labels, false);
    for i in 1..=n {
        for j in i + 1..=n {
            let idx = p.index_of(&s_label(i, j)).unwrap();
            p.invertible[idx] = true;
        }
    }
    add_symmetric_group_relations(&mut p, n);
    let nu = params.nu.clone();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let s = p.g(&s_label(i, j));
            for k in 1..=m {
                p.add_eq(format!("s{i}{j}Y{i},{k}=Y{j},{k}s{i}{j}"), s.clone() * p.g(&y_label(i, k)), p.g(&y_label(j, k)) * s.clone());
                for h in 1..=n {
                    if h != i && h != j && i < j {
                        p.add_relation(format!("[s{i}{j},Y{h},{k}]=0"), NcPoly::commutator(&s, &p.g(&y_label(h, k))));
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for k in 1..=m {
            p.add_relation(format!("poly(Y{i},{k})=0"), p.g(&y_label(i, k)).root_product(&params.gamma[k - 1]));
        }
        let sum = (1..=m).fold(NcPoly::zero(), |acc, k| acc + p.g(&y_label(i, k)));
        p.add_eq(format!("sum_k Y{i},k"), sum, s_sum(&p, n, i).scale(&nu));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let s = p.g(&s_label(i, j));
            for k in 1..=m {
                let (yi, yj) = (p.g(&y_label(i, k)), p.g(&y_label(j, k)));
                let rhs = (yi.clone() - yj.clone()).scale(&nu) * s.clone();
                p.add_eq(format!("[Y{i},{k},Y{j},{k}]"), NcPoly::commutator(&yi, &yj), rhs);
                for l in 1..=m {
                    if l != k {
                        p.add_relation(format!("[Y{i},{k},Y{j},{l}]=0"), NcPoly::commutator(&yi, &p.g(&y_label(j, l))));
                    }
                }
            }
        }
    }
    p
}

/// Degenerate cyclotomic Hecke algebra `B_{n,ℓ}(λ, ν)`; generators `s_ij`, `Y_i`.
pub fn bnl_presentation<F: Field>(lambda: &[F], nu: &F, n: usize) -> Presentation<F> {
    let mut labels = transposition_labels(n);
    labels.extend((1..=n).map(|i| format!("Y{i}")));
    let mut p = Presentation::new(format!("B_{n},{}", lambda.len()), labels, false);
    for i in 1..=n {
        for j in i + 1..=n {
            let idx = p.index_of(&s_label(i, j)).unwrap();
            p.invertible[idx] = true;
        }
    }
    add_symmetric_group_relations(&mut p, n);
    let y = |p: &Presentation<F>, i: usize| p.g(&format!("Y{i}"));
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let s = p.g(&s_label(i, j));
            p.add_eq(format!("s{i}{j}Y{i}=Y{j}s{i}{j}"), s.clone() * y(&p, i), y(&p, j) * s.clone());
            for h in 1..=n {
                if h != i && h != j && i < j {
                    p.add_relation(format!("[s{i}{j},Y{h}]=0"), NcPoly::commutator(&s, &y(&p, h)));
                }
            }
        }
    }
    for i in 1..=n {
        p.add_relation(format!("poly(Y{i})=0"), y(&p, i).root_product(lambda));
        for j in i + 1..=n {
            let (yi, yj) = (y(&p, i), y(&p, j));
            let rhs = (yi.clone() - yj.clone()).scale(nu) * p.g(&s_label(i, j));
            p.add_eq(format!("[Y{i},Y{j}]"), NcPoly::commutator(&yi, &yj), rhs);
        }
    }
    p
}

fn add_braid_relations(p: &mut Presentation<C64>, n: usize, t: C64) {
    let tt = |p: &Presentation<C64>, i: usize| p.g(&format!("T{i}"));
    for i in 1..n.saturating_sub(1) {
        let (a, b) = (tt(p, i), tt(p, i + 1));
        p.add_eq(format!("T{i}T{}T{i}", i + 1), a.clone() * b.clone() * a.clone(), b.clone() * a * b);
    }
    for i in 1..n {
        for j in i + 2..n {
            p.add_relation(format!("[T{i},T{j}]=0"), NcPoly::commutator(&tt(p, i), &tt(p, j)));
        }
    }
    for i in 1..n {
        let rhs = NcPoly::scalar(t - t.inv());
        p.add_eq(format!("T{i}-T{i}^-1"), tt(p, i) - p.gi(&format!("T{i}")), rhs);
    }
}

/// The generalized DAHA `H_n(u, t)`; generators `U_k`, `T_i`.
pub fn hn_presentation(mp: &MultiplicativeParams, n: usize) -> Presentation<C64> {
    let m = mp.graph.m();
    let mut labels: Vec<String> = (1..=m).map(|k| format!("U{k}")).collect();
    labels.extend((1..n).map(|i| format!("T{i}")));
    let mut p = Presentation::new(format!("H_{n}"), labels, true);
    let u = |p: &Presentation<C64>, k: usize| p.g(&format!("U{k}"));
    let tt = |p: &Presentation<C64>, i: usize| p.g(&format!("T{i}"));
    let uprod = (1..=m).fold(NcPoly::one(), |acc, k| acc * u(&p, k));
    // T_1 ⋯ T_{n-2} T_{n-1}^2 T_{n-2} ⋯ T_1
    let mut tw = NcPoly::one();
    for i in 1..n {
        tw = tw * tt(&p, i);
    }
    for i in (1..n).rev() {
        tw = tw * tt(&p, i);
    }
    p.add_eq("product", uprod * tw, NcPoly::one());
    add_braid_relations(&mut p, n, mp.t);
    for i in 2..n {
        for k in 1..=m {
            p.add_relation(format!("[U{k},T{i}]=0"), NcPoly::commutator(&u(&p, k), &tt(&p, i)));
        }
    }
    if n >= 2 {
        for j in 1..=m {
            let conj = tt(&p, 1) * u(&p, j) * tt(&p, 1);
            p.add_relation(format!("[U{j},T1U{j}T1]=0"), NcPoly::commutator(&u(&p, j), &conj));
            for k in 1..j {
                let conj = p.gi("T1") * u(&p, j) * tt(&p, 1);
                p.add_relation(format!("[U{k},T1^-1U{j}T1]=0"), NcPoly::commutator(&u(&p, k), &conj));
            }
        }
    }
    for k in 1..=m {
        p.add_relation(format!("poly(U{k})=0"), u(&p, k).root_product(&mp.u[k - 1]));
    }
    p
}

/// Ariki-Koike algebra `H_{n,ℓ}(v, t)`; generators `U`, `T_i`.
pub fn ariki_koike_presentation(v: &[C64], t: C64, n: usize) -> Presentation<C64> {
    let mut labels = vec!["U".to_string()];
    labels.extend((1..n).map(|i| format!("T{i}")));
    let mut p = Presentation::new(format!("H_{n},{}", v.len()), labels, true);
    add_braid_relations(&mut p, n, t);
    for j in 2..n {
        p.add_relation(format!("[U,T{j}]=0"), NcPoly::commutator(&p.g("U"), &p.g(&format!("T{j}"))));
    }
    if n >= 2 {
        let (uu, t1) = (p.g("U"), p.g("T1"));
        p.add_eq("UT1UT1", uu.clone() * t1.clone() * uu.clone() * t1.clone(), t1.clone() * uu.clone() * t1 * uu);
    }
    p.add_relation("poly(U)=0", p.g("U").root_product(v));
    p
}

/// Sahi's algebra; generators `T0..Tn`, `X1..Xn`.
pub fn sahi_presentation(sp: &SahiParams, t: C64, n: usize) -> Presentation<C64> {
    let mut labels: Vec<String> = (0..=n).map(|i| format!("T{i}")).collect();
    labels.extend((1..=n).map(|i| format!("X{i}")));
    let mut p = Presentation::new(format!("Sahi_{n}"), labels, true);
    let tt = |p: &Presentation<C64>, i: usize| p.g(&format!("T{i}"));
    let x = |p: &Presentation<C64>, i: usize| p.g(&format!("X{i}"));
    let quad = |z: C64| NcPoly::scalar(z - z.inv());
    let (t0, t1) = (tt(&p, 0), tt(&p, 1.min(n)));
    if n >= 2 {
        p.add_eq("T0T1T0T1", t0.clone() * t1.clone() * t0.clone() * t1.clone(), t1.clone() * t0.clone() * t1 * t0);
        let (a, b) = (tt(&p, n - 1), tt(&p, n));
        p.add_eq("Tn-1TnTn-1Tn", a.clone() * b.clone() * a.clone() * b.clone(), b.clone() * a.clone() * b * a);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            p.add_relation(format!("[X{i},X{j}]=0"), NcPoly::commutator(&x(&p, i), &x(&p, j)));
        }
    }
    for i in 1..n.saturating_sub(1) {
        let (a, b) = (tt(&p, i), tt(&p, i + 1));
        p.add_eq(format!("T{i}T{}T{i}", i + 1), a.clone() * b.clone() * a.clone(), b.clone() * a * b);
    }
    for i in 1..n {
        for j in i + 2..n {
            p.add_relation(format!("[T{i},T{j}]=0"), NcPoly::commutator(&tt(&p, i), &tt(&p, j)));
        }
        p.add_eq(format!("T{i}-T{i}^-1"), tt(&p, i) - p.gi(&format!("T{i}")), quad(t));
    }
    p.add_eq("T0-T0^-1", tt(&p, 0) - p.gi("T0"), quad(sp.t0));
    p.add_eq(format!("T{n}-T{n}^-1"), tt(&p, n) - p.gi(&format!("T{n}")), quad(sp.tn));
    for i in 0..=n {
        for j in 1..=n {
            if i.abs_diff(j) > 1 || (i == n && j + 1 == n) {
                p.add_relation(format!("[T{i},X{j}]=0"), NcPoly::commutator(&tt(&p, i), &x(&p, j)));
            }
        }
    }
    for i in 1..n {
        p.add_eq(format!("T{i}X{i}=X{}T{i}^-1", i + 1), tt(&p, i) * x(&p, i), x(&p, i + 1) * p.gi(&format!("T{i}")));
    }
    // T_n^∨ = X_n^{-1} T_n^{-1}, T_0^∨ = q^{-1} T_0^{-1} X_1
    let tnv = p.gi(&format!("X{n}")) * p.gi(&format!("T{n}"));
    let tnv_inv = tt(&p, n) * x(&p, n);
    p.add_eq("Tn_check", tnv - tnv_inv, quad(sp.un));
    let t0v = p.gi("T0") * x(&p, 1);
    let t0v_inv = p.gi("X1") * tt(&p, 0);
    p.add_eq("T0_check", t0v.scale(&sp.q.inv()) - t0v_inv.scale(&sp.q), quad(sp.u0));
    p
}
