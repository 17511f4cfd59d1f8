//! Dormand-Prince 8(5,3) for linear matrix equations `dF/ds = M(s) F`.
//!
//! Coefficients are those of Hairer's DOP853.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::C64;

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.845_494_793_282_861E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.703_703_703_703_703_5E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.531_943_774_862_440_2E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.360_892_629_446_941_4;
const A95: f64 = -8.682_193_468_417_26E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.348_988_418_106_996E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.488_114_619_971_667_7;
const A105: f64 = -5.902_908_268_368_43E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.328_821_096_898_486E1;
const A109: f64 = -2.033_120_170_850_862_7E-2;
const A111: f64 = -9.371_424_300_859_873E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.149_787_010_746_927;
const A117: f64 = -1.852_006_565_999_696E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.046_764_471_898_219_6;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.053_449_546_673_725E1;
const A125: f64 = -2.000_872_058_224_862_5;
const A126: f64 = -1.795_893_186_311_88E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.858_998_277_135_023_5;
const A129: f64 = -8.872_856_933_530_63;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.801_203_960_010_585;
const B9: f64 = 3.111_643_669_578_199E-1;
const B10: f64 = -1.521_609_496_625_161E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 1.312_004_499_419_488E-2;
const ER6: f64 = -1.225_156_446_376_204_4;
const ER7: f64 = -4.957_589_496_572_502E-1;
const ER8: f64 = 1.664_377_182_454_986_4;
const ER9: f64 = -3.503_288_487_499_736_6E-1;
const ER10: f64 = 3.341_791_187_130_175E-1;
const ER11: f64 = 8.192_320_648_511_571E-2;
const ER12: f64 = -2.235_530_786_388_629_4E-2;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_min: f64,
}

impl StepControl {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 200_000, h_min: 1e-14 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for IntegrationStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

fn lin(y: &CMat, h: f64, terms: &[(f64, &CMat)]) -> CMat {
    let mut out = y.clone();
    for (a, k) in terms {
        out.zip_apply(*k, |o, v| *o += v * (a * h));
    }
    out
}

/// One DOP853 step: the 8th-order update and the two embedded error
/// estimates (5th and 3rd order).
struct Step {
    y_new: CMat,
    err5: CMat,
    err3: CMat,
}

fn step(m: &impl Fn(f64) -> CMat, s: f64, y: &CMat, k1: &CMat, h: f64) -> Step {
    let f = |t: f64, v: &CMat| m(t) * v;
    let k2 = f(s + C2 * h, &lin(y, h, &[(A21, k1)]));
    let k3 = f(s + C3 * h, &lin(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(s + C4 * h, &lin(y, h, &[(A41, k1), (A43, &k3)]));
    let k5 = f(s + C5 * h, &lin(y, h, &[(A51, k1), (A53, &k3), (A54, &k4)]));
    let k6 = f(s + C6 * h, &lin(y, h, &[(A61, k1), (A64, &k4), (A65, &k5)]));
    let k7 = f(s + C7 * h, &lin(y, h, &[(A71, k1), (A74, &k4), (A75, &k5), (A76, &k6)]));
    let k8 = f(s + C8 * h, &lin(y, h, &[(A81, k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]));
    let k9 = f(s + C9 * h, &lin(y, h, &[(A91, k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]));
    let k10 = f(
        s + C10 * h,
        &lin(y, h, &[(A101, k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)]),
    );
    let k11 = f(
        s + C11 * h,
        &lin(
            y,
            h,
            &[(A111, k1), (A114, &k4), (A115, &k5), (A116, &k6), (A117, &k7), (A118, &k8), (A119, &k9), (A1110, &k10)],
        ),
    );
    let k12 = f(
        s + h,
        &lin(
            y,
            h,
            &[
                (A121, k1),
                (A124, &k4),
                (A125, &k5),
                (A126, &k6),
                (A127, &k7),
                (A128, &k8),
                (A129, &k9),
                (A1210, &k10),
                (A1211, &k11),
            ],
        ),
    );
    let zero = CMat::zeros(y.nrows(), y.ncols());
    let incr = lin(&zero, 1.0, &[(B1, k1), (B6, &k6), (B7, &k7), (B8, &k8), (B9, &k9), (B10, &k10), (B11, &k11), (B12, &k12)]);
    let y_new = lin(y, h, &[(1.0, &incr)]);
    let err3 = lin(&incr, 1.0, &[(-BHH1, k1), (-BHH2, &k9), (-BHH3, &k12)]);
    let err5 =
        lin(&zero, 1.0, &[(ER1, k1), (ER6, &k6), (ER7, &k7), (ER8, &k8), (ER9, &k9), (ER10, &k10), (ER11, &k11), (ER12, &k12)]);
    Step { y_new, err5, err3 }
}

/// Integrates `dF/ds = M(s) F` from `s = 0` to `s = 1` with `F(0) = y0`,
/// adapting the step to the local error control.
pub fn integrate_adaptive(m: impl Fn(f64) -> CMat, y0: &CMat, ctl: &StepControl) -> Result<(CMat, IntegrationStats)> {
    integrate_adaptive_mesh(m, y0, ctl).map(|(y, stats, _)| (y, stats))
}

/// [`integrate_adaptive`] that also returns the accepted step sizes, for
/// replay with [`integrate_on_mesh`].
pub fn integrate_adaptive_mesh(m: impl Fn(f64) -> CMat, y0: &CMat, ctl: &StepControl) -> Result<(CMat, IntegrationStats, Vec<f64>)> {
    let mut mesh = Vec::new();
    let mut stats = IntegrationStats::default();
    let mut s = 0.0;
    let mut y = y0.clone();
    let mut k1 = m(0.0) * &y;
    stats.evaluations += 1;
    let norm_m = m(0.0).norm().max(1.0);
    let mut h = (ctl.rtol.max(1e-16).powf(1.0 / 8.0) / norm_m).clamp(1e-6, 0.1);
    let mut last_rejected = false;
    while s < 1.0 {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(Error::StepUnderflow(s));
        }
        if s + h > 1.0 {
            h = 1.0 - s;
        }
        if h < ctl.h_min {
            return Err(Error::StepUnderflow(s));
        }
        let st = step(&m, s, &y, &k1, h);
        stats.evaluations += 11;
        let n = y.len() as f64;
        let (mut err, mut err2) = (0.0, 0.0);
        for i in 0..y.len() {
            let sk = ctl.atol + ctl.rtol * y[i].norm().max(st.y_new[i].norm());
            err2 += (st.err3[i].norm() / sk).powi(2);
            err += (st.err5[i].norm() / sk).powi(2);
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h * err * (1.0 / (deno * n)).sqrt();
        // step ratio bounded to [1/3, 6] with safety factor 0.9
        let fac11 = err.powf(1.0 / 8.0);
        let fac = (fac11 / 0.9).clamp(1.0 / 6.0, 1.0 / 0.333);
        let mut h_new = h / fac;
        if err <= 1.0 {
            stats.accepted += 1;
            mesh.push(h);
            s += h;
            y = st.y_new;
            k1 = m(s.min(1.0)) * &y;
            stats.evaluations += 1;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / (1.0 / 0.333f64).min(fac11 / 0.9);
            stats.rejected += 1;
            last_rejected = true;
        }
        h = h_new;
    }
    Ok((y, stats, mesh))
}

/// Replays a recorded sequence of DOP853 steps. On the coefficient function
/// that produced the mesh this reproduces [`integrate_adaptive`] exactly; on
/// nearby coefficient functions it is a smooth function of the coefficients.
pub fn integrate_on_mesh(m: impl Fn(f64) -> CMat, y0: &CMat, mesh: &[f64]) -> CMat {
    let mut s = 0.0;
    let mut y = y0.clone();
    let mut k1 = m(0.0) * &y;
    for &h in mesh {
        y = step(&m, s, &y, &k1, h).y_new;
        s += h;
        k1 = m(s.min(1.0)) * &y;
    }
    y
}

/// Integrates with `steps` equal DOP853 steps (no error control).
pub fn integrate_fixed(m: impl Fn(f64) -> CMat, y0: &CMat, steps: usize) -> CMat {
    let h = 1.0 / steps as f64;
    let mut y = y0.clone();
    for i in 0..steps {
        let s = i as f64 * h;
        let k1 = m(s) * &y;
        y = step(&m, s, &y, &k1, h).y_new;
    }
    y
}

/// Scalar helper for tests and oracles: `M(s) = a(s)` as a 1×1 matrix.
pub fn scalar_rhs(a: impl Fn(f64) -> C64) -> impl Fn(f64) -> CMat {
    move |s| CMat::from_element(1, 1, a(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let (y, stats) =
            integrate_adaptive(scalar_rhs(|_| C64::new(0.0, 2.0)), &CMat::identity(1, 1), &StepControl::with_tol(1e-12)).unwrap();
        assert!((y[(0, 0)] - C64::new(0.0, 2.0).exp()).norm() < 1e-11);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn fixed_step_is_eighth_order() {
        let rhs = |s: f64| CMat::from_element(1, 1, C64::new((3.0 * s).cos(), 1.0 + s));
        let exact = (C64::new((3.0f64).sin() / 3.0, 1.5)).exp();
        let e1 = (integrate_fixed(rhs, &CMat::identity(1, 1), 4)[(0, 0)] - exact).norm();
        let e2 = (integrate_fixed(rhs, &CMat::identity(1, 1), 8)[(0, 0)] - exact).norm();
        assert!(e1 / e2 > 100.0, "{e1} {e2}");
    }
}
