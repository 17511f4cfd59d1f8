//! Connections `Σ_i A_i(z) dz_i` whose coefficients are sums of simple
//! poles `M / (z_i - w)`, with `w` a fixed puncture or another moving point.

use serde::{Deserialize, Serialize};

use crate::algebra::presentation::{s_label, y_label};
use crate::algebra::MatrixRep;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMat};
use crate::scalar::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKind {
    Kz,
    Cherednik,
    Fuchsian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pole {
    Fixed(C64),
    Point(usize),
}

#[derive(Debug, Clone)]
pub struct PoleTerm {
    pub coeff: CMat,
    pub pole: Pole,
}

#[derive(Debug, Clone)]
pub struct Connection {
    pub kind: ConnectionKind,
    pub dim: usize,
    /// `terms[i]` lists the poles of `A_i` (0-based point index).
    pub terms: Vec<Vec<PoleTerm>>,
    pub punctures: Vec<C64>,
    /// `swaps[i-1]` is the action of `s_{i,i+1}` on the fiber.
    pub swaps: Vec<CMat>,
    /// Local exponents per puncture (eigenvalues of the residues) and `ν`.
    pub gamma: Vec<Vec<C64>>,
    pub nu: C64,
}

fn pole_value(pole: Pole, z: &[C64]) -> C64 {
    match pole {
        Pole::Fixed(w) => w,
        Pole::Point(p) => z[p],
    }
}

impl Connection {
    pub fn n(&self) -> usize {
        self.terms.len()
    }

    /// `A_i(z)`.
    pub fn component(&self, i: usize, z: &[C64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for t in &self.terms[i] {
            let w = C64::new(1.0, 0.0) / (z[i] - pole_value(t.pole, z));
            out.zip_apply(&t.coeff, |o, c| *o += c * w);
        }
        out
    }

    /// `Σ_i A_i(z) ż_i`.
    pub fn evaluate(&self, z: &[C64], zdot: &[C64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (i, terms) in self.terms.iter().enumerate() {
            if zdot[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for t in terms {
                let w = zdot[i] / (z[i] - pole_value(t.pole, z));
                out.zip_apply(&t.coeff, |o, c| *o += c * w);
            }
        }
        out
    }

    /// `∂A_i / ∂z_j`.
    pub fn derivative(&self, i: usize, j: usize, z: &[C64]) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for t in &self.terms[i] {
            let d = z[i] - pole_value(t.pole, z);
            let w = match t.pole {
                _ if i == j => -C64::new(1.0, 0.0) / (d * d),
                Pole::Point(p) if p == j => C64::new(1.0, 0.0) / (d * d),
                _ => continue,
            };
            out.zip_apply(&t.coeff, |o, c| *o += c * w);
        }
        out
    }

    /// Largest Frobenius norm of `∂_j A_i - ∂_i A_j + [A_i, A_j]`, the
    /// integrability defect of `∂_i F = A_i F`.
    pub fn curvature(&self, z: &[C64]) -> f64 {
        let n = self.n();
        let a: Vec<CMat> = (0..n).map(|i| self.component(i, z)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let f = self.derivative(i, j, z) - self.derivative(j, i, z) + &a[i] * &a[j] - &a[j] * &a[i];
                worst = worst.max(frobenius(&f));
            }
        }
        worst
    }
}

fn points_of(rep: &MatrixRep<C64>, per_point_suffix: &str) -> usize {
    rep.labels().iter().filter(|l| l.starts_with('Y') && l.ends_with(per_point_suffix)).count()
}

fn check_relations(rep: &MatrixRep<C64>, tol: f64) -> Result<()> {
    let scale = rep.mats().iter().map(frobenius).fold(1.0, f64::max);
    let r = rep.relation_residuals().max;
    if r > tol * scale {
        return Err(Error::RelationResidualTooLarge(r));
    }
    Ok(())
}

fn swap_terms(rep: &MatrixRep<C64>, n: usize, nu: C64) -> (Vec<Vec<PoleTerm>>, Vec<CMat>) {
    let mut terms = vec![Vec::new(); n];
    for i in 0..n {
        for p in 0..n {
            if p != i {
                terms[i].push(PoleTerm { coeff: rep.m(&s_label(i + 1, p + 1)) * (-nu), pole: Pole::Point(p) });
            }
        }
    }
    let swaps = (1..n).map(|i| rep.m(&s_label(i, i + 1)).clone()).collect();
    (terms, swaps)
}

/// `A_i = Σ_k Y_{i,k}/(z_i - α_k) - Σ_{p≠i} ν s_{ip}/(z_i - z_p)` on a
/// `B_n(γ, ν)`-module.
pub fn kz_connection(rep: &MatrixRep<C64>, gamma: &[Vec<C64>], nu: C64, alpha: &[f64], tol: f64) -> Result<Connection> {
    let n = points_of(rep, ",1");
    let m = alpha.len();
    if gamma.len() != m {
        return Err(Error::ShapeMismatch(format!("{} punctures for {} legs", m, gamma.len())));
    }
    check_relations(rep, tol)?;
    let (mut terms, swaps) = swap_terms(rep, n, nu);
    for (i, row) in terms.iter_mut().enumerate() {
        for (k, a) in alpha.iter().enumerate() {
            row.push(PoleTerm { coeff: rep.m(&y_label(i + 1, k + 1)).clone(), pole: Pole::Fixed(C64::new(*a, 0.0)) });
        }
    }
    Ok(Connection {
        kind: ConnectionKind::Kz,
        dim: rep.dim(),
        terms,
        punctures: alpha.iter().map(|&a| C64::new(a, 0.0)).collect(),
        swaps,
        gamma: gamma.to_vec(),
        nu,
    })
}

/// `A_i = Y_i / z_i - Σ_{p≠i} ν s_{ip}/(z_i - z_p)` on a `B_{n,ℓ}(λ, ν)`-module.
pub fn cherednik_connection(rep: &MatrixRep<C64>, lambda: &[C64], nu: C64, tol: f64) -> Result<Connection> {
    let n = rep.labels().iter().filter(|l| l.starts_with('Y')).count();
    check_relations(rep, tol)?;
    let (mut terms, swaps) = swap_terms(rep, n, nu);
    for (i, row) in terms.iter_mut().enumerate() {
        row.push(PoleTerm { coeff: rep.m(&format!("Y{}", i + 1)).clone(), pole: Pole::Fixed(C64::new(0.0, 0.0)) });
    }
    Ok(Connection {
        kind: ConnectionKind::Cherednik,
        dim: rep.dim(),
        terms,
        punctures: vec![C64::new(0.0, 0.0)],
        swaps,
        gamma: vec![lambda.to_vec()],
        nu,
    })
}

/// `A(z) = Σ_k x_k / (z - α_k)` in one variable.
pub fn fuchsian_connection(x: &[CMat], alpha: &[f64], tol: f64) -> Result<Connection> {
    let punctures: Vec<C64> = alpha.iter().map(|&a| C64::new(a, 0.0)).collect();
    fuchsian_connection_at(x, &punctures, tol)
}

/// [`fuchsian_connection`] with punctures anywhere in the plane.
pub fn fuchsian_connection_at(x: &[CMat], punctures: &[C64], tol: f64) -> Result<Connection> {
    if x.len() != punctures.len() || x.is_empty() {
        return Err(Error::ShapeMismatch(format!("{} residues for {} punctures", x.len(), punctures.len())));
    }
    let sum = x.iter().skip(1).fold(x[0].clone(), |a, b| a + b);
    let scale = x.iter().map(frobenius).fold(1.0, f64::max);
    let s = frobenius(&sum);
    if s > tol * scale {
        return Err(Error::SumNotZero(s));
    }
    let terms = vec![x.iter().zip(punctures).map(|(xk, &a)| PoleTerm { coeff: xk.clone(), pole: Pole::Fixed(a) }).collect()];
    Ok(Connection {
        kind: ConnectionKind::Fuchsian,
        dim: x[0].nrows(),
        terms,
        punctures: punctures.to_vec(),
        swaps: vec![],
        gamma: x.iter().map(crate::linalg::eigenvalues).collect(),
        nu: C64::new(0.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn derivative_matches_difference() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let conn = Connection {
            kind: ConnectionKind::Kz,
            dim: 2,
            terms: vec![
                vec![PoleTerm { coeff: a.clone(), pole: Pole::Point(1) }, PoleTerm { coeff: a.clone(), pole: Pole::Fixed(c(0.0, 0.0)) }],
                vec![PoleTerm { coeff: a.clone(), pole: Pole::Point(0) }],
            ],
            punctures: vec![c(0.0, 0.0)],
            swaps: vec![],
            gamma: vec![],
            nu: c(0.0, 0.0),
        };
        let z = [c(1.0, 0.3), c(2.0, -0.1)];
        let h = 1e-6;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut zp = z;
            zp[j] += h;
            let mut zm = z;
            zm[j] -= h;
            let fd = (conn.component(i, &zp) - conn.component(i, &zm)) / c(2.0 * h, 0.0);
            assert!(frobenius(&(fd - conn.derivative(i, j, &z))) < 1e-6);
        }
    }
}
