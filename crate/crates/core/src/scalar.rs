use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Number type used for probabilities, marginals and the LP.
///
/// Implemented for `f32`, `f64` and exact [`BigRational`]. Exact types have
/// zero tolerances so every comparison is decided exactly.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    /// Allowed deviation of a context's total probability from 1.
    fn normalization_tolerance() -> Self;

    /// Magnitude below which a pivot or reduced cost is treated as zero.
    fn pivot_tolerance() -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Lossy conversion used for reports. Exact values round to nearest.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion of a user tolerance into this type.
    fn tolerance(tol: f64) -> Self {
        Self::from_f64(tol).unwrap_or_else(Self::zero)
    }

    fn abs_diff_le(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= *tol
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn normalization_tolerance() -> Self {
        1e-9
    }

    fn pivot_tolerance() -> Self {
        1e-12
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn normalization_tolerance() -> Self {
        1e-5
    }

    fn pivot_tolerance() -> Self {
        1e-6
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        (numer as f64 / denom as f64) as f32
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn normalization_tolerance() -> Self {
        Self::zero()
    }

    fn pivot_tolerance() -> Self {
        Self::zero()
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }
}

/// Real floating scalars used by the state-vector code.
pub trait RealScalar: Scalar + Float {
    /// Tolerance for unit norms and orthonormality checks.
    fn norm_tolerance() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite float")
    }
}

impl RealScalar for f64 {
    fn norm_tolerance() -> Self {
        1e-12
    }
}

impl RealScalar for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
}

/// Parses `"p/q"`, integers and plain decimals (`"0.125"`, `"1e-3"`) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// `x` as a rational in lowest terms, printed `p/q` (or `p` when integral).
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
