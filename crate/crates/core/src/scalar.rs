//! Scalar fields used by matrix realizations.
//!
//! Two coefficient fields are supported: `C64` (double precision complex) for
//! numerically produced data, and [`Qi`] (exact Gaussian rationals) for the
//! straightened regular representations, where relation checks must be exact.

use std::ops::{Div, Neg};

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Exact complex rational number `a + b i` with `a, b ∈ Q`.
pub type Qi = Complex<BigRational>;

/// Coefficient field for matrix realizations.
pub trait Field:
    nalgebra::Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + Neg<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    const EXACT: bool;

    fn to_c64(&self) -> C64;

    fn from_i64(v: i64) -> Self;

    /// Embeds an exact Gaussian rational (rounded for float fields).
    fn from_qi(v: &Qi) -> Self;

    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact zero test for exact fields, `|x| <= tol` otherwise.
    fn negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.modulus() <= tol
        }
    }
}

impl Field for C64 {
    const EXACT: bool = false;

    fn to_c64(&self) -> C64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn from_qi(v: &Qi) -> Self {
        v.to_c64()
    }
}

impl Field for Qi {
    const EXACT: bool = true;

    fn to_c64(&self) -> C64 {
        C64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    fn from_i64(v: i64) -> Self {
        Qi::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }

    fn from_qi(v: &Qi) -> Self {
        v.clone()
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Large numerators: scale down by shifting both parts.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(re: BigRational, im: BigRational) -> Qi {
    Qi::new(re, im)
}

pub fn qi_real(re: BigRational) -> Qi {
    Qi::new(re, BigRational::zero())
}

pub fn qi_frac(num: i64, den: i64) -> Qi {
    qi_real(rat(num, den))
}

/// Parses a decimal (`-0.125`, `3e-2`) or fraction (`-7/3`) string exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a decimal string as `f64`; accepts `p/q` too.
pub fn parse_f64(s: &str) -> Result<f64> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(v);
    }
    parse_rational(s).map(|r| rat_to_f64(&r))
}

pub fn qi_abs_is_small(z: &Qi, bound: &BigRational) -> bool {
    z.re.abs() <= *bound && z.im.abs() <= *bound
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("3e-2").unwrap(), rat(3, 100));
        assert_eq!(parse_rational("2.5E1").unwrap(), rat(25, 1));
        assert_eq!(parse_rational("-7/3").unwrap(), rat(-7, 3));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_fractions() {
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(-4, 2)), "-2");
    }

    #[test]
    fn exact_to_float() {
        let z = Qi::new(rat(1, 3), rat(-2, 5));
        let c = z.to_c64();
        assert!((c.re - 1.0 / 3.0).abs() < 1e-16);
        assert!((c.im + 0.4).abs() < 1e-16);
    }
}
