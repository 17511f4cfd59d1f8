//! Star-shaped diagrams and the rational / multiplicative parameter packs.
//!
//! Leg `k` of a diagram has `d_k` vertices counting the node. Legs are kept
//! sorted by length so that the last leg is a longest one; its length is
//! `ℓ = d_m`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{qi_real, Field, Qi, C64};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Vertex {
    Node,
    /// `j`-th vertex (1-based, counted from the node) on leg `k` (0-based).
    Leg { k: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarGraph {
    legs: Vec<usize>,
    /// `input_order[k]` is the position of sorted leg `k` in the list the
    /// graph was built from.
    input_order: Vec<usize>,
    affine: bool,
}

impl StarGraph {
    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn m(&self) -> usize {
        self.legs.len()
    }

    pub fn d(&self, k: usize) -> usize {
        self.legs[k]
    }

    /// Length of the longest leg.
    pub fn ell(&self) -> usize {
        *self.legs.last().unwrap()
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn input_order(&self) -> &[usize] {
        &self.input_order
    }

    pub fn is_d4(&self) -> bool {
        self.legs == [2, 2, 2, 2]
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v = vec![Vertex::Node];
        for (k, &d) in self.legs.iter().enumerate() {
            v.extend((1..d).map(|j| Vertex::Leg { k, j }));
        }
        v
    }

    pub fn name(&self) -> String {
        match self.legs.as_slice() {
            [2, 2, 2, 2] => "D4~".into(),
            [3, 3, 3] => "E6~".into(),
            [2, 4, 4] => "E7~".into(),
            [2, 3, 6] => "E8~".into(),
            l => format!("star{l:?}"),
        }
    }
}

/// Validates a leg list and returns the sorted star graph.
pub fn build_star_graph(d: &[usize]) -> Result<StarGraph> {
    let m = d.len();
    if m < 3 || d.iter().any(|&x| x < 2) {
        return Err(Error::FiniteDynkin(d.to_vec()));
    }
    let inv_sum: BigRational = d.iter().map(|&x| BigRational::new(1.into(), (x as i64).into())).sum();
    let bound = BigRational::from_integer(((m - 2) as i64).into());
    if inv_sum > bound {
        return Err(Error::FiniteDynkin(d.to_vec()));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| d[i]);
    Ok(StarGraph { legs: order.iter().map(|&i| d[i]).collect(), input_order: order, affine: inv_sum == bound })
}

/// Rational parameters `(γ, ν)` together with the derived `(μ, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalParams {
    pub graph: StarGraph,
    /// `gamma[k][j-1] = γ_{kj}`, legs in sorted order.
    pub gamma: Vec<Vec<Qi>>,
    pub nu: Qi,
    pub mu_node: Qi,
    /// `mu_legs[k][j-1] = μ_{i_j(k)}` for `j = 1..d_k-1`.
    pub mu_legs: Vec<Vec<Qi>>,
    pub xi: Vec<Qi>,
}

fn check_gamma_shape<T>(graph: &StarGraph, gamma: &[Vec<T>]) -> Result<()> {
    if gamma.len() != graph.m() || gamma.iter().zip(graph.legs()).any(|(g, &d)| g.len() != d) {
        return Err(Error::ShapeMismatch(format!(
            "gamma has leg lengths {:?}, graph has {:?}",
            gamma.iter().map(|g| g.len()).collect::<Vec<_>>(),
            graph.legs()
        )));
    }
    Ok(())
}

/// Solves for the unique `(μ, ξ)` with `Σ ξ_k = 0` reproducing `γ`.
pub fn gamma_to_mu_xi(graph: &StarGraph, gamma: Vec<Vec<Qi>>, nu: Qi) -> Result<RationalParams> {
    check_gamma_shape(graph, &gamma)?;
    let m = graph.m();
    let mu_node: Qi = gamma.iter().map(|g| g[0].clone()).fold(Qi::zero(), |a, b| a + b);
    let mu_over_m = mu_node.clone() / Qi::from_i64(m as i64);
    let xi = gamma.iter().map(|g| g[0].clone() - mu_over_m.clone()).collect();
    let mu_legs = gamma.iter().map(|g| g.windows(2).map(|w| w[1].clone() - w[0].clone()).collect()).collect();
    Ok(RationalParams { graph: graph.clone(), gamma, nu, mu_node, mu_legs, xi })
}

/// Inverse of [`gamma_to_mu_xi`]: `γ_{kj} = Σ_{p<j} μ_{i_p(k)} + μ_{i_0}/m + ξ_k`.
pub fn mu_xi_to_gamma(graph: &StarGraph, mu_node: &Qi, mu_legs: &[Vec<Qi>], xi: &[Qi]) -> Result<Vec<Vec<Qi>>> {
    let m = graph.m();
    if xi.len() != m || mu_legs.len() != m || mu_legs.iter().zip(graph.legs()).any(|(l, &d)| l.len() + 1 != d) {
        return Err(Error::ShapeMismatch("mu/xi shape does not match graph".into()));
    }
    let xi_sum = xi.iter().cloned().fold(Qi::zero(), |a, b| a + b);
    if !xi_sum.is_zero() {
        return Err(Error::ShapeMismatch("xi must sum to zero".into()));
    }
    let base = mu_node.clone() / Qi::from_i64(m as i64);
    Ok((0..m)
        .map(|k| {
            let mut acc = base.clone() + xi[k].clone();
            let mut out = vec![acc.clone()];
            for mu in &mu_legs[k] {
                acc += mu.clone();
                out.push(acc.clone());
            }
            out
        })
        .collect())
}

impl RationalParams {
    /// Builds parameters from an unsorted leg list; `gamma` is aligned with `d`.
    pub fn new(d: &[usize], gamma: Vec<Vec<Qi>>, nu: Qi) -> Result<Self> {
        let graph = build_star_graph(d)?;
        if gamma.len() != d.len() {
            return Err(Error::ShapeMismatch("gamma must have one list per leg".into()));
        }
        let sorted: Vec<Vec<Qi>> = graph.input_order().iter().map(|&i| gamma[i].clone()).collect();
        gamma_to_mu_xi(&graph, sorted, nu)
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn ell(&self) -> usize {
        self.graph.ell()
    }

    /// `λ_j := γ_{mj}`, the parameters of the cyclotomic subalgebra on the longest leg.
    pub fn lambda(&self) -> &[Qi] {
        self.gamma.last().unwrap()
    }

    pub fn gamma_c64(&self) -> Vec<Vec<C64>> {
        self.gamma.iter().map(|g| g.iter().map(Field::to_c64).collect()).collect()
    }

    pub fn nu_c64(&self) -> C64 {
        self.nu.to_c64()
    }

    /// `ℏ = ℓ Σ_{k,j} γ_{kj} / d_k`; affine graphs only.
    pub fn hbar(&self) -> Result<Qi> {
        hbar_of(self)
    }

    /// Shifts `γ_{kj} → γ_{kj} + σ_k` with `Σ σ_k = 0`.
    pub fn shifted(&self, sigma: &[Qi]) -> Result<Self> {
        if sigma.len() != self.m() {
            return Err(Error::ShapeMismatch("one shift per leg".into()));
        }
        let gamma = self
            .gamma
            .iter()
            .zip(sigma)
            .map(|(g, s)| g.iter().map(|x| x.clone() + s.clone()).collect())
            .collect();
        gamma_to_mu_xi(&self.graph, gamma, self.nu.clone())
    }
}

pub fn hbar_of(params: &RationalParams) -> Result<Qi> {
    let g = &params.graph;
    if !g.is_affine() {
        return Err(Error::NotAffine);
    }
    let ell = g.ell() as i64;
    let mut acc = Qi::zero();
    for (k, row) in params.gamma.iter().enumerate() {
        let factor = Qi::from_i64(ell) / Qi::from_i64(g.d(k) as i64);
        for x in row {
            acc += x.clone() * factor.clone();
        }
    }
    Ok(acc)
}

/// Multiplicative parameters `(u, t)` and `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeParams {
    pub graph: StarGraph,
    /// `u[k][j-1] = u_{kj}`, legs in sorted order.
    pub u: Vec<Vec<C64>>,
    pub t: C64,
    pub q: C64,
}

fn cexp(z: C64) -> C64 {
    z.exp()
}

impl MultiplicativeParams {
    /// Builds `(u, t)` directly; `q` from the product formula (affine graphs),
    /// `1` otherwise.
    pub fn new(graph: StarGraph, u: Vec<Vec<C64>>, t: C64) -> Result<Self> {
        check_gamma_shape(&graph, &u)?;
        if u.iter().flatten().any(|z| z.norm() == 0.0) {
            return Err(Error::ZeroParameter("u"));
        }
        if t.norm() == 0.0 {
            return Err(Error::ZeroParameter("t"));
        }
        let q = if graph.is_affine() { q_from_u(&graph, &u) } else { C64::new(1.0, 0.0) };
        Ok(Self { graph, u, t, q })
    }

    /// `v_j := u_{mj}`.
    pub fn v(&self) -> &[C64] {
        self.u.last().unwrap()
    }

    pub fn q_from_u(&self) -> C64 {
        q_from_u(&self.graph, &self.u)
    }
}

/// `q = Π_{k,j} u_{kj}^{-ℓ/d_k}` (affine graphs, where `d_k | ℓ`).
pub fn q_from_u(graph: &StarGraph, u: &[Vec<C64>]) -> C64 {
    let ell = graph.ell();
    let mut q = C64::new(1.0, 0.0);
    for (k, row) in u.iter().enumerate() {
        let e = (ell / graph.d(k)) as i32;
        for z in row {
            q *= z.powi(-e);
        }
    }
    q
}

/// `u_{kj} = exp(2πi γ_{kj})`, `t = exp(-πi ν)`, `q = exp(-2πi ℏ)`.
pub fn exponentiate_params(params: &RationalParams) -> MultiplicativeParams {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let u = params.gamma.iter().map(|g| g.iter().map(|x| cexp(two_pi_i * x.to_c64())).collect()).collect();
    let t = cexp(C64::new(0.0, -PI) * params.nu.to_c64());
    let q = match params.hbar() {
        Ok(h) => cexp(-two_pi_i * h.to_c64()),
        Err(_) => C64::new(1.0, 0.0),
    };
    MultiplicativeParams { graph: params.graph.clone(), u, t, q }
}

/// Parameters of the rank-`n` Sahi algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SahiParams {
    pub t0: C64,
    pub tn: C64,
    pub u0: C64,
    pub un: C64,
    pub q: C64,
}

/// The `4 × 2` table `u_{kj}` specializing the D4 GDAHA to the Sahi algebra.
pub fn sahi_parameters(p: SahiParams) -> Result<Vec<Vec<C64>>> {
    for (name, z) in [("t0", p.t0), ("tn", p.tn), ("u0", p.u0), ("un", p.un), ("q", p.q)] {
        if z.norm() == 0.0 {
            return Err(Error::ZeroParameter(name));
        }
    }
    Ok(vec![
        vec![p.q * p.t0, -p.q / p.t0],
        vec![p.u0, -C64::new(1.0, 0.0) / p.u0],
        vec![p.un, -C64::new(1.0, 0.0) / p.un],
        vec![p.tn, -C64::new(1.0, 0.0) / p.tn],
    ])
}

/// Inverts [`sahi_parameters`]. The pair `(q, t0)` is only determined up to
/// a common sign; the branch with `q` closest to `q_hint` is returned.
/// Fails when `u` is not of the Sahi form within `tol`.
pub fn recover_sahi(u: &[Vec<C64>], q_hint: C64, tol: f64) -> Result<SahiParams> {
    if u.len() != 4 || u.iter().any(|r| r.len() != 2) {
        return Err(Error::NotD4);
    }
    for (k, row) in u.iter().enumerate().skip(1) {
        let defect = (row[0] * row[1] + 1.0).norm();
        if defect > tol {
            return Err(Error::SpecMismatch(format!("leg {k} not of the form (a, -1/a): defect {defect:e}")));
        }
    }
    let q0 = (-(u[0][0] * u[0][1])).sqrt();
    let q = if (q0 - q_hint).norm() <= (-q0 - q_hint).norm() { q0 } else { -q0 };
    Ok(SahiParams { t0: u[0][0] / q, tn: u[3][0], u0: u[1][0], un: u[2][0], q })
}

/// Convenience: exact real rational parameter from numerator / denominator.
pub fn qr(num: i64, den: i64) -> Qi {
    qi_real(BigRational::new(num.into(), den.into()))
}

pub fn qi_is_one(z: &Qi) -> bool {
    z.re.is_one() && z.im.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(d: &[usize], v: Qi) -> Vec<Vec<Qi>> {
        d.iter().map(|&x| vec![v.clone(); x]).collect()
    }

    #[test]
    fn affine_shapes_are_recognized() {
        let g = build_star_graph(&[2, 2, 2, 2]).unwrap();
        assert!(g.is_affine());
        assert_eq!(g.ell(), 2);
        for d in [[3, 3, 3], [4, 2, 4], [6, 3, 2]] {
            assert!(build_star_graph(&d).unwrap().is_affine());
        }
        let g = build_star_graph(&[6, 3, 2]).unwrap();
        assert_eq!(g.legs(), &[2, 3, 6]);
        assert_eq!(g.input_order(), &[2, 1, 0]);
    }

    #[test]
    fn finite_dynkin_rejected() {
        assert!(matches!(build_star_graph(&[2, 3, 5]), Err(Error::FiniteDynkin(_))));
        assert!(matches!(build_star_graph(&[2, 2, 7]), Err(Error::FiniteDynkin(_))));
        assert!(matches!(build_star_graph(&[3, 3]), Err(Error::FiniteDynkin(_))));
        assert!(matches!(build_star_graph(&[1, 3, 3, 3]), Err(Error::FiniteDynkin(_))));
    }

    #[test]
    fn non_affine_accepted() {
        let g = build_star_graph(&[3, 3, 4]).unwrap();
        assert!(!g.is_affine());
        assert!(matches!(hbar_of(&gamma_to_mu_xi(&g, uniform(&[3, 3, 4], Qi::zero()), Qi::zero()).unwrap()),
            Err(Error::NotAffine)));
    }

    #[test]
    fn zero_gamma_gives_zero_mu_xi() {
        let p = RationalParams::new(&[2, 2, 2, 2], uniform(&[2, 2, 2, 2], Qi::zero()), Qi::zero()).unwrap();
        assert!(p.mu_node.is_zero());
        assert!(p.xi.iter().all(|x| x.is_zero()));
        assert!(p.mu_legs.iter().flatten().all(|x| x.is_zero()));
        assert!(p.hbar().unwrap().is_zero());
    }

    #[test]
    fn d4_mu_xi_example() {
        let gamma = vec![vec![qr(1, 10), qr(2, 10)]; 4];
        let p = RationalParams::new(&[2, 2, 2, 2], gamma, Qi::zero()).unwrap();
        assert_eq!(p.mu_node, qr(4, 10));
        assert!(p.xi.iter().all(|x| x.is_zero()));
        assert!(p.mu_legs.iter().flatten().all(|x| *x == qr(1, 10)));
        let back = mu_xi_to_gamma(&p.graph, &p.mu_node, &p.mu_legs, &p.xi).unwrap();
        assert_eq!(back, p.gamma);
    }

    #[test]
    fn hbar_examples() {
        let p = RationalParams::new(&[2, 2, 2, 2], uniform(&[2, 2, 2, 2], qr(1, 10)), Qi::zero()).unwrap();
        assert_eq!(p.hbar().unwrap(), qr(8, 10));
        let g = vec![vec![qr(1, 3), qr(-1, 3)], vec![qr(2, 7), qr(-2, 7)], vec![qr(0, 1), qr(0, 1)], vec![
            qr(5, 11),
            qr(-5, 11),
        ]];
        let p = RationalParams::new(&[2, 2, 2, 2], g, Qi::zero()).unwrap();
        assert!(p.hbar().unwrap().is_zero());
    }

    #[test]
    fn exponentiation_at_zero_and_group_point() {
        let d = [3, 3, 3];
        let p = RationalParams::new(&d, uniform(&d, Qi::zero()), Qi::zero()).unwrap();
        let mp = exponentiate_params(&p);
        assert!(mp.u.iter().flatten().all(|z| (z - 1.0).norm() < 1e-15));
        assert!((mp.t - 1.0).norm() < 1e-15 && (mp.q - 1.0).norm() < 1e-15);

        let gamma: Vec<Vec<Qi>> = d.iter().map(|&dk| (1..=dk).map(|j| qr(j as i64, dk as i64)).collect()).collect();
        let p = RationalParams::new(&d, gamma, Qi::zero()).unwrap();
        let mp = exponentiate_params(&p);
        for (k, row) in mp.u.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                let expected = C64::from_polar(1.0, 2.0 * PI * (j + 1) as f64 / d[k] as f64);
                assert!((z - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn q_matches_hbar_exponential() {
        let gamma = vec![vec![qr(3, 17), qr(-2, 9)], vec![qr(1, 5), qr(7, 13)], vec![qr(-4, 11), qr(1, 8)], vec![
            qr(2, 3),
            qr(1, 19),
        ]];
        let p = RationalParams::new(&[2, 2, 2, 2], gamma, qr(1, 7)).unwrap();
        let mp = exponentiate_params(&p);
        let h = p.hbar().unwrap().to_c64();
        let expected = (C64::new(0.0, -2.0 * PI) * h).exp();
        assert!((mp.q - expected).norm() < 1e-13);
        assert!((mp.q_from_u() - expected).norm() < 1e-13);
    }

    #[test]
    fn sahi_table() {
        let one = C64::new(1.0, 0.0);
        let u = sahi_parameters(SahiParams { t0: one, tn: one, u0: one, un: one, q: one }).unwrap();
        for row in &u {
            assert!((row[0] - 1.0).norm() < 1e-15 && (row[1] + 1.0).norm() < 1e-15);
        }
        let p = SahiParams {
            t0: C64::new(0.3, 0.7),
            tn: C64::new(1.2, -0.1),
            u0: C64::new(-0.4, 0.9),
            un: C64::new(0.8, 0.8),
            q: C64::new(1.1, 0.2),
        };
        let u = sahi_parameters(p).unwrap();
        assert!((u[0][0] * u[0][1] + p.q * p.q).norm() < 1e-14);
        for row in &u[1..] {
            assert!((row[0] * row[1] + 1.0).norm() < 1e-14);
        }
        let i = C64::new(0.0, 1.0);
        let u = sahi_parameters(SahiParams { t0: i, tn: one, u0: one, un: one, q: one }).unwrap();
        assert!((u[0][0] - i).norm() < 1e-15 && (u[0][1] - i).norm() < 1e-15);
        let back = recover_sahi(&sahi_parameters(p).unwrap(), p.q, 1e-12).unwrap();
        assert!((back.q - p.q).norm() < 1e-13 && (back.t0 - p.t0).norm() < 1e-13);
        assert!((back.u0 - p.u0).norm() < 1e-15 && (back.un - p.un).norm() < 1e-15 && (back.tn - p.tn).norm() < 1e-15);
        assert!(matches!(
            sahi_parameters(SahiParams { q: C64::new(0.0, 0.0), ..p }),
            Err(Error::ZeroParameter("q"))
        ));
    }
}
