//! Piecewise-smooth paths in the configuration space of `n` points in
//! `C \ {α_1, …, α_m}` and the braid generators `U_k`, `T_i`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::C64;

/// One smooth piece, parametrized by `s ∈ [0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub enum Segment {
    /// All points move on straight lines.
    Line { start: Vec<C64>, end: Vec<C64> },
    /// The points `movers` rotate about `center` by `angle` (counterclockwise
    /// when positive); the others stay put.
    Rotation { start: Vec<C64>, movers: Vec<usize>, center: C64, angle: f64 },
}

impl Segment {
    /// Positions and velocities at parameter `s`.
    pub fn eval(&self, s: f64) -> (Vec<C64>, Vec<C64>) {
        match self {
            Segment::Line { start, end } => {
                let z = start.iter().zip(end).map(|(a, b)| a + (b - a) * s).collect();
                let v = start.iter().zip(end).map(|(a, b)| b - a).collect();
                (z, v)
            }
            Segment::Rotation { start, movers, center, angle } => {
                let rot = C64::from_polar(1.0, angle * s);
                let mut z = start.clone();
                let mut v = vec![C64::new(0.0, 0.0); start.len()];
                for &p in movers {
                    z[p] = center + (start[p] - center) * rot;
                    v[p] = C64::new(0.0, *angle) * (z[p] - center);
                }
                (z, v)
            }
        }
    }

    pub fn start(&self) -> &[C64] {
        match self {
            Segment::Line { start, .. } | Segment::Rotation { start, .. } => start,
        }
    }

    pub fn end(&self) -> Vec<C64> {
        self.eval(1.0).0
    }

    /// The same piece traversed backwards.
    pub fn reversed(&self) -> Segment {
        match self {
            Segment::Line { start, end } => Segment::Line { start: end.clone(), end: start.clone() },
            Segment::Rotation { movers, center, angle, .. } => {
                Segment::Rotation { start: self.end(), movers: movers.clone(), center: *center, angle: -angle }
            }
        }
    }
}

/// A concatenation of segments traversed in order.
#[derive(Debug, Clone, Serialize)]
pub struct PathInConfig {
    pub segments: Vec<Segment>,
    pub base: Vec<C64>,
    pub punctures: Vec<C64>,
    /// Declared lower bound on the distance to the singular locus.
    pub r_min: f64,
}

/// Sampled winding data: `puncture[p][k]` is the winding of point `p`
/// around puncture `k`; `pairs[(p, q)]` the winding of `z_p - z_q`.
#[derive(Debug, Clone, Serialize)]
pub struct WindingCertificate {
    pub puncture: Vec<Vec<f64>>,
    pub pairs: Vec<((usize, usize), f64)>,
    pub min_distance: f64,
}

const SAMPLES: usize = 400;

impl PathInConfig {
    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn endpoint(&self) -> Vec<C64> {
        self.segments.last().map_or_else(|| self.base.clone(), |s| s.end())
    }

    /// First `self`, then `other`.
    pub fn then(mut self, other: &PathInConfig) -> Self {
        self.segments.extend(other.segments.iter().cloned());
        self.r_min = self.r_min.min(other.r_min);
        self
    }

    /// The inverse path, starting at the endpoint.
    pub fn reversed(&self) -> Self {
        Self {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            base: self.endpoint(),
            punctures: self.punctures.clone(),
            r_min: self.r_min,
        }
    }

    /// Points visited at `SAMPLES` parameter values per segment.
    fn samples(&self) -> Vec<Vec<C64>> {
        let mut out = vec![self.base.clone()];
        for seg in &self.segments {
            for i in 1..=SAMPLES {
                out.push(seg.eval(i as f64 / SAMPLES as f64).0);
            }
        }
        out
    }

    /// Accumulates arguments along the sampled path.
    pub fn winding(&self) -> WindingCertificate {
        let n = self.n();
        let pts = self.samples();
        let mut puncture = vec![vec![0.0; self.punctures.len()]; n];
        let mut pairs: Vec<((usize, usize), f64)> =
            (0..n).flat_map(|p| (p + 1..n).map(move |q| ((p, q), 0.0))).collect();
        let mut min_distance = f64::INFINITY;
        for w in pts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            for p in 0..n {
                for (k, alpha) in self.punctures.iter().enumerate() {
                    puncture[p][k] += ((b[p] - alpha) / (a[p] - alpha)).arg();
                    min_distance = min_distance.min((b[p] - alpha).norm());
                }
            }
            for ((p, q), acc) in pairs.iter_mut() {
                *acc += ((b[*p] - b[*q]) / (a[*p] - a[*q])).arg();
                min_distance = min_distance.min((b[*p] - b[*q]).norm());
            }
        }
        for row in &mut puncture {
            for x in row.iter_mut() {
                *x /= 2.0 * PI;
            }
        }
        for (_, x) in &mut pairs {
            *x /= 2.0 * PI;
        }
        WindingCertificate { puncture, pairs, min_distance }
    }
}

/// Braid group generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    /// `U_k`, `k = 1..m`: the first point encircles `α_k`.
    U(usize),
    /// `T_i`, `i = 1..n-1`: points `i` and `i+1` exchange counterclockwise.
    T(usize),
}

impl Generator {
    pub fn label(&self, single_puncture: bool) -> String {
        match self {
            Generator::U(_) if single_puncture => "U".into(),
            Generator::U(k) => format!("U{k}"),
            Generator::T(i) => format!("T{i}"),
        }
    }
}

/// Smallest gap between consecutive entries of `α_1 < ⋯ < α_m < z_1 < ⋯ < z_n`.
pub fn minimal_gap(alpha: &[f64], base: &[f64]) -> Result<f64> {
    let all: Vec<f64> = alpha.iter().chain(base).copied().collect();
    if all.iter().any(|x| !x.is_finite()) || all.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadOrdering);
    }
    Ok(all.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min))
}

/// The loop realizing `gen` at base point `base` with detour scale `δ`
/// (default: a quarter of the minimal gap).
pub fn braid_loop(alpha: &[f64], base: &[f64], gen: Generator, delta: Option<f64>) -> Result<PathInConfig> {
    let gap = minimal_gap(alpha, base)?;
    let delta = delta.unwrap_or(gap / 4.0);
    if !(delta > 0.0) || delta >= gap / 3.0 {
        return Err(Error::DeltaTooLarge { delta, gap });
    }
    let z0: Vec<C64> = base.iter().map(|&x| C64::new(x, 0.0)).collect();
    let punctures: Vec<C64> = alpha.iter().map(|&a| C64::new(a, 0.0)).collect();
    let n = base.len();
    let segments = match gen {
        Generator::U(k) => {
            if k == 0 || k > alpha.len() {
                return Err(Error::ShapeMismatch(format!("no puncture {k}")));
            }
            let ak = alpha[k - 1];
            let at = |w: C64| {
                let mut z = z0.clone();
                z[0] = w;
                z
            };
            let p0 = at(C64::new(base[0], 0.0));
            let p1 = at(C64::new(base[0], -delta));
            let p2 = at(C64::new(ak, -delta));
            vec![
                Segment::Line { start: p0.clone(), end: p1.clone() },
                Segment::Line { start: p1.clone(), end: p2.clone() },
                Segment::Rotation { start: p2.clone(), movers: vec![0], center: C64::new(ak, 0.0), angle: 2.0 * PI },
                Segment::Line { start: p2, end: p1.clone() },
                Segment::Line { start: p1, end: p0 },
            ]
        }
        Generator::T(i) => {
            if i == 0 || i >= n {
                return Err(Error::ShapeMismatch(format!("no generator T{i} for {n} points")));
            }
            let center = C64::new((base[i - 1] + base[i]) / 2.0, 0.0);
            vec![Segment::Rotation { start: z0.clone(), movers: vec![i - 1, i], center, angle: PI }]
        }
    };
    Ok(PathInConfig { segments, base: z0, punctures, r_min: delta / 2.0 })
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    if d.norm_sqr() == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Largest admissible detour scale for [`star_loop`]: a quarter of the
/// smallest puncture separation and a third of the smallest distance from a
/// puncture to another puncture's ray.
pub fn star_delta(punctures: &[C64], base: C64) -> f64 {
    let mut d = f64::INFINITY;
    for (k, &a) in punctures.iter().enumerate() {
        d = d.min((a - base).norm() / 4.0);
        for (j, &b) in punctures.iter().enumerate() {
            if j != k {
                d = d.min((a - b).norm() / 4.0).min(segment_distance(b, base, a) / 3.0);
            }
        }
    }
    d
}

/// Loop for one point based at `base`: straight to `α_k - iδ`, once
/// counterclockwise around `α_k`, and straight back. Punctures may be
/// anywhere off the rays; the rays must clear every other puncture by `2δ`.
pub fn star_loop(punctures: &[C64], base: C64, k: usize, delta: f64) -> Result<PathInConfig> {
    if k == 0 || k > punctures.len() {
        return Err(Error::ShapeMismatch(format!("no puncture {k}")));
    }
    let ak = punctures[k - 1];
    let foot = ak - C64::new(0.0, delta);
    for (j, &b) in punctures.iter().enumerate() {
        if j + 1 == k {
            continue;
        }
        let clearance = segment_distance(b, base, foot).min((b - ak).norm() - delta);
        if clearance < 2.0 * delta {
            return Err(Error::PathTooCoarse(format!("loop around puncture {k} passes within {clearance:e} of puncture {}", j + 1)));
        }
    }
    let segments = vec![
        Segment::Line { start: vec![base], end: vec![foot] },
        Segment::Rotation { start: vec![foot], movers: vec![0], center: ak, angle: 2.0 * PI },
        Segment::Line { start: vec![foot], end: vec![base] },
    ];
    Ok(PathInConfig { segments, base: vec![base], punctures: punctures.to_vec(), r_min: delta / 2.0 })
}
