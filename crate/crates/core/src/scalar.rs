//! Numeric type used for similarity scores, thresholds and ratios.
//!
//! Every similarity in this crate is a ratio of two trigram counts, so the
//! computation can be carried out in floating point or exactly as a rational.
//! The exact form is useful wherever a threshold comparison must not depend on
//! rounding (oracle tests, boundary cases such as 4/5 vs `0.8`).

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Exact rational scalar.
pub type Exact = Ratio<i64>;

/// A real-valued scalar that similarity scores can be expressed in.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + Display + Send + Sync + Serialize + DeserializeOwned + 'static
{
    /// `num / den`. `den` must be nonzero.
    fn from_ratio(num: u64, den: u64) -> Self;

    /// Nearest scalar to `value`, `None` for non-finite input.
    fn from_f64(value: f64) -> Option<Self>;

    fn to_f64(self) -> f64;

    /// True when `self` lies in the half-open interval `(0, 1]`.
    fn is_unit_threshold(self) -> bool {
        self > Self::zero() && self <= Self::one()
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_ratio(num: u64, den: u64) -> Self {
                debug_assert!(den != 0);
                (num as f64 / den as f64) as $t
            }

            fn from_f64(value: f64) -> Option<Self> {
                value.is_finite().then_some(value as $t)
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Exact {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(
            i64::try_from(num).expect("trigram count overflows i64"),
            i64::try_from(den).expect("trigram count overflows i64"),
        )
    }

    fn from_f64(value: f64) -> Option<Self> {
        // Shortest decimal representation first, so "0.8" becomes 4/5 rather
        // than the binary expansion of 0.8.
        if !value.is_finite() {
            return None;
        }
        let text = format!("{value}");
        parse_decimal(&text).or_else(|| Ratio::approximate_float(value))
    }

    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

fn parse_decimal(text: &str) -> Option<Exact> {
    let (negative, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(u32::try_from(frac_part.len()).ok()?)?;
    let int: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = int.checked_mul(den)?.checked_add(frac)?;
    Some(Ratio::new(if negative { -num } else { num }, den))
}
