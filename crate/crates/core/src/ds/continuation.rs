//! Homotopy in `ν` for `B_n(γ, ν)`-modules, starting from a `ν = 0` module.

use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::presentation::{bn_presentation, s_label, y_label};
use crate::algebra::{MatrixRep, Presentation};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::params::RationalParams;
use crate::scalar::{Field, Qi, C64};

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationReport {
    /// Fraction of the way to the target `ν` that was reached.
    pub fraction_reached: f64,
    pub steps_taken: usize,
    /// Largest relation residual (spectral norm) of the output.
    pub residual: f64,
    /// `(fraction, residual, Gauss-Newton iterations)` per accepted step.
    pub history: Vec<(f64, f64, usize)>,
}

/// Largest `n!ℓ^n` accepted.
pub const MAX_REGULAR_DIM: usize = 16;

fn count_points(p: &Presentation<C64>) -> usize {
    p.labels.iter().filter(|l| l.starts_with('Y') && l.ends_with(",1")).count()
}

/// Continues `seed` (a `B_n(γ, 0)`-module) to `ν = params.nu` in `steps`
/// equal steps (halved on failure), keeping the `S_n` matrices fixed and
/// tying `Y_{i,k} = s_{1i} Y_{1,k} s_{1i}`.
pub fn continue_bn_representation(
    params: &RationalParams,
    seed: &MatrixRep<C64>,
    steps: usize,
    tol: f64,
) -> Result<(MatrixRep<C64>, ContinuationReport)> {
    let n = count_points(seed.presentation());
    let m = params.m();
    let regular: usize = (1..=n).product::<usize>() * params.ell().pow(n as u32);
    if regular > MAX_REGULAR_DIM {
        return Err(Error::SizeMismatch(format!("n!ℓ^n = {regular} exceeds {MAX_REGULAR_DIM}")));
    }
    let hbar = params.hbar()?;
    if !hbar.is_zero() {
        return Err(Error::NonZeroHbar(hbar.to_c64().norm()));
    }
    let at = |f: &BigRational| -> Presentation<C64> {
        let mut p = params.clone();
        p.nu = params.nu.clone() * Qi::new(f.clone(), BigRational::zero());
        bn_presentation(&p, n).map_coeffs(|c| c.to_c64())
    };
    let zero = BigRational::zero();
    let seed_rep = seed.with_presentation(at(&zero))?;
    let seed_res = seed_rep.relation_residuals().max;
    if seed_res > 1e-9 {
        return Err(Error::RelationResidualTooLarge(seed_res));
    }
    if params.nu.is_zero() {
        let report = ContinuationReport { fraction_reached: 1.0, steps_taken: 0, residual: seed_res, history: vec![] };
        return Ok((seed_rep, report));
    }
    let dim = seed.dim();
    let sigma: Vec<CMat> =
        (1..=n).map(|i| if i == 1 { CMat::identity(dim, dim) } else { seed.m(&s_label(1, i)).clone() }).collect();
    let mut unknowns: Vec<CMat> = (1..=m).map(|k| seed.m(&y_label(1, k)).clone()).collect();

    let steps = steps.max(1);
    let mut den = BigInt::from(steps);
    let mut num = BigInt::zero();
    let stride = BigInt::from(1);
    let mut history = Vec::new();
    let mut halvings = 0;
    while num < den {
        let next = (&num + &stride).min(den.clone());
        let f = BigRational::new(next.clone(), den.clone());
        let pres = at(&f);
        let mut trial = unknowns.clone();
        match gauss_newton(&pres, seed, &sigma, &mut trial, n, tol) {
            Ok((res, iters)) => {
                unknowns = trial;
                num = next;
                history.push((crate::scalar::rat_to_f64(&f), res, iters));
            }
            Err(_) if halvings < 6 => {
                halvings += 1;
                num *= 2;
                den *= 2;
            }
            Err(_) => {
                return Err(Error::NoConvergence {
                    best: history.last().map_or(f64::INFINITY, |h| h.1),
                    iterations: history.len(),
                });
            }
        }
    }
    let final_pres = at(&BigRational::from_integer(1.into()));
    let rep = assemble(&final_pres, seed, &sigma, &unknowns, n)?;
    let residual = rep.relation_residuals().max;
    let report = ContinuationReport { fraction_reached: 1.0, steps_taken: history.len(), residual, history };
    Ok((rep, report))
}

fn assemble(pres: &Presentation<C64>, seed: &MatrixRep<C64>, sigma: &[CMat], y1: &[CMat], n: usize) -> Result<MatrixRep<C64>> {
    let mut mats = seed.mats().to_vec();
    for i in 1..=n {
        for (k, y) in y1.iter().enumerate() {
            let idx = pres.index_of(&y_label(i, k + 1)).expect("Y generator");
            mats[idx] = &sigma[i - 1] * y * &sigma[i - 1];
        }
    }
    MatrixRep::new(pres.clone(), mats)
}

fn stacked_residual(rep: &MatrixRep<C64>) -> DVector<C64> {
    let parts: Vec<CMat> = rep.presentation().relations.iter().map(|r| rep.eval(&r.poly)).collect();
    let len: usize = parts.iter().map(|p| p.len()).sum();
    let mut out = DVector::zeros(len);
    let mut off = 0;
    for p in parts {
        out.rows_mut(off, p.len()).copy_from_slice(p.as_slice());
        off += p.len();
    }
    out
}

fn stacked_jacobian(rep: &MatrixRep<C64>, sigma: &[CMat], n: usize, m: usize) -> CMat {
    let pres = rep.presentation();
    let d2 = rep.dim() * rep.dim();
    let mut j = CMat::zeros(pres.relations.len() * d2, m * d2);
    let conj: Vec<CMat> = sigma.iter().map(|s| s.transpose().kronecker(s)).collect();
    for (r, rel) in pres.relations.iter().enumerate() {
        for k in 0..m {
            let mut block = CMat::zeros(d2, d2);
            for i in 1..=n {
                let gen = pres.index_of(&y_label(i, k + 1)).expect("Y generator");
                if !rel.poly.terms.iter().any(|(_, w)| w.iter().any(|l| l.gen == gen)) {
                    continue;
                }
                block += rep.directional_operator(&rel.poly, gen) * &conj[i - 1];
            }
            j.view_mut((r * d2, k * d2), (d2, d2)).copy_from(&block);
        }
    }
    j
}

/// Levenberg-Marquardt on the normal equations; returns the final
/// spectral-norm relation residual and the iteration count.
fn gauss_newton(
    pres: &Presentation<C64>,
    seed: &MatrixRep<C64>,
    sigma: &[CMat],
    y1: &mut [CMat],
    n: usize,
    tol: f64,
) -> Result<(f64, usize)> {
    let m = y1.len();
    let dim = seed.dim();
    let d2 = dim * dim;
    let mut rep = assemble(pres, seed, sigma, y1, n)?;
    let mut r = stacked_residual(&rep);
    let mut mu = 1e-6;
    for it in 0..60 {
        let norm = r.norm();
        if norm < tol * 0.1 {
            let res = rep.relation_residuals().max;
            if res < tol {
                return Ok((res, it));
            }
        }
        let j = stacked_jacobian(&rep, sigma, n, m);
        let jh = j.adjoint();
        let jtj = &jh * &j;
        let g = &jh * &r;
        let mut accepted = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            let scale = (0..a.nrows()).map(|i| a[(i, i)].re).fold(0.0, f64::max);
            for i in 0..a.nrows() {
                a[(i, i)] += C64::new(mu * scale.max(1.0), 0.0);
            }
            let Some(chol) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&g));
            let trial: Vec<CMat> = (0..m)
                .map(|k| &y1[k] + CMat::from_column_slice(dim, dim, &delta.as_slice()[k * d2..(k + 1) * d2]))
                .collect();
            let trep = assemble(pres, seed, sigma, &trial, n)?;
            let tr = stacked_residual(&trep);
            if tr.norm() < norm {
                y1.clone_from_slice(&trial);
                rep = trep;
                r = tr;
                mu = (mu / 10.0).max(1e-16);
                accepted = true;
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let res = rep.relation_residuals().max;
    if res < tol {
        Ok((res, 60))
    } else {
        Err(Error::NoConvergence { best: res, iterations: 60 })
    }
}
