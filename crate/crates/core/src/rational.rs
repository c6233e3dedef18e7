//! Exact rational scalars.
//!
//! All geometry in this crate runs on arbitrary-precision rationals kept in
//! reduced form with a positive denominator. The text form is `"p/q"` (or
//! `"p"` when the denominator is one) and is shared by the JSON map schema,
//! the CSV exports, and the CLI flags.

use num::bigint::BigInt;
use num::traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num::rational::BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` from machine integers. Panics on a zero denominator; intended for
/// literals in code and tests.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse the `"p/q"` text form. Rejects empty parts, a zero denominator, and
/// anything that is not a plain (optionally signed) decimal integer pair.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::SchemaError(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer: BigInt = num_s.trim().parse().map_err(|_| bad())?;
    let denom: BigInt = match den_s {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(Error::SchemaError(format!("zero denominator: {s:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// Canonical text form, `"p/q"` or `"p"`.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Float approximation that survives numerators and denominators far beyond
/// the f64 exponent range (shifts both sides down before dividing).
pub fn rational_to_f64(r: &Rational) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    if numer.is_zero() {
        return 0.0;
    }
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    // keep roughly 80 significant bits on each side
    let shift_n = (nb - 80).max(0) as u64;
    let shift_d = (db - 80).max(0) as u64;
    let n = (numer >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift_d).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// Natural log of a positive rational, exact in the exponent: works for
/// values like 2^-400 that underflow a direct f64 conversion.
pub fn ln_rational(r: &Rational) -> f64 {
    assert!(r.is_positive(), "ln of a non-positive rational");
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let shift_n = (nb - 60).max(0) as u64;
    let shift_d = (db - 60).max(0) as u64;
    let n = (numer >> shift_n).to_f64().unwrap();
    let d = (denom >> shift_d).to_f64().unwrap();
    n.ln() - d.ln() + (shift_n as f64 - shift_d as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["-1/2", "3", "0", "7/3", "-4"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        // normalization
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert_eq!(format_rational(&parse_rational("1/-2").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/0", "a/b", "1.5", "1/2/3"] {
            assert!(parse_rational(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn ln_handles_tiny_values() {
        // (1/2)^400
        let r = rat(1, 2).pow(400);
        let ln = ln_rational(&r);
        assert!((ln - 400.0 * (0.5f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn to_f64_handles_huge_denominators() {
        let r = rat(3, 4).pow(300);
        let f = rational_to_f64(&r);
        assert!((f.ln() - 300.0 * (0.75f64).ln()).abs() < 1e-9);
    }
}
