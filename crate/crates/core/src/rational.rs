//! Exact rationals.
//!
//! Every length and coordinate is a [`Q`]. Denominators in this crate stay
//! small (powers of two, plus whatever the caller feeds in), so a 64-bit
//! numerator and denominator is plenty; overflow checks stay on in all
//! profiles of the workspace.

use core::fmt;
use core::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational number.
pub type Q = Ratio<i64>;

/// `n / d`, reduced.
#[inline]
pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

/// The integer `n` as a rational.
#[inline]
pub fn qi(n: i64) -> Q {
    Ratio::from_integer(n)
}

#[inline]
pub fn abs(x: Q) -> Q {
    x.abs()
}

#[inline]
pub fn half() -> Q {
    q(1, 2)
}

/// Converts to `f64` (lossy); used for reporting and drawing only.
#[inline]
pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Error produced by [`parse`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseRationalError {
    pub input: alloc::string::String,
    pub reason: &'static str,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational {:?}: {}", self.input, self.reason)
    }
}

/// Parses `"p/q"` or `"p"`.
///
/// Only the canonical spelling is accepted: lowest terms, positive
/// denominator, no `/1`. This keeps serialization bit-exact: `format(parse(s))
/// == s` for every accepted `s`.
pub fn parse(s: &str) -> Result<Q, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: s.into(),
        reason,
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = i64::from_str(n).map_err(|_| err("numerator is not an integer"))?;
    if n.starts_with('+') || (n.len() > 1 && n.trim_start_matches('-').starts_with('0')) {
        return Err(err("non-canonical numerator"));
    }
    match d {
        None => Ok(Ratio::from_integer(numer)),
        Some(d) => {
            if d.starts_with('+') || d.starts_with('0') || d.starts_with('-') {
                return Err(err("denominator must be a positive canonical integer"));
            }
            let denom = i64::from_str(d).map_err(|_| err("denominator is not an integer"))?;
            if denom == 1 {
                return Err(err("integers are written without a denominator"));
            }
            if numer.is_zero() || numer.gcd(&denom) != 1 {
                return Err(err("not in lowest terms"));
            }
            Ok(Ratio::new_raw(numer, denom))
        }
    }
}
