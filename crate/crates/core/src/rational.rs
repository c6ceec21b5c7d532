//! Exact rational arithmetic used by every density comparison.
//!
//! All threshold inequalities in this crate are evaluated on `Rational`
//! (never on floats), so oracle comparisons are bit-exact. Floats appear only
//! where the parameter ladder involves `ln n`, and are converted here to
//! rationals rounded *down* so soundness-critical inequalities keep their
//! direction.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i128>;

/// Shorthand constructor; panics on a zero denominator.
pub fn ratio(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

pub fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q`, plain integers, and decimal literals such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational, RationalParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let bad = || RationalParseError::Invalid(t.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let num: i128 = p.trim().parse().map_err(|_| bad())?;
        let den: i128 = q.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(RationalParseError::ZeroDenominator(t.to_string()));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let w: i128 = if whole == "-" || whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let f: i128 = frac.parse().map_err(|_| bad())?;
        let den = 10i128.pow(frac.len() as u32);
        let frac_part = Ratio::new(f, den);
        let val = Ratio::from_integer(w.abs()) + frac_part;
        return Ok(if negative || w < 0 { -val } else { val });
    }
    let n: i128 = t.parse().map_err(|_| bad())?;
    Ok(Ratio::from_integer(n))
}

/// Exact rational value of a finite f64. Fails for values whose binary
/// exponent does not fit i128 arithmetic (far outside this crate's range).
pub fn f64_to_rational_exact(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational::zero());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1i128 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mantissa, e2) = if exp == 0 {
        (frac, -1074i64)
    } else {
        (frac + (1i128 << 52), exp - 1075)
    };
    let r = if e2 >= 0 {
        if e2 > 70 {
            return None;
        }
        Ratio::from_integer(mantissa << e2)
    } else {
        if e2 < -120 {
            return None;
        }
        Ratio::new(mantissa, 1i128 << (-e2))
    };
    Some(r * Ratio::from_integer(sign))
}

/// Best rational lower bound of `x` among denominators `<= max_den`
/// (Stern-Brocot walk; the result equals `x` when `x` itself qualifies).
pub fn best_rational_le(x: f64, max_den: i128) -> Option<Rational> {
    let exact = f64_to_rational_exact(x)?;
    if exact.is_negative() {
        return None;
    }
    if *exact.denom() <= max_den {
        return Some(exact);
    }
    let whole = exact.floor();
    let frac = exact - whole;
    debug_assert!(!frac.is_negative() && frac < Ratio::from_integer(1));
    let (mut pl, mut ql, mut ph, mut qh) = (0i128, 1i128, 1i128, 1i128);
    loop {
        let (pm, qm) = (pl + ph, ql + qh);
        if qm > max_den {
            break;
        }
        if Ratio::new(pm, qm) <= frac {
            pl = pm;
            ql = qm;
        } else {
            ph = pm;
            qh = qm;
        }
    }
    Some(whole + Ratio::new(pl, ql))
}

/// Floor of a rational as i128.
pub fn floor_i128(r: Rational) -> i128 {
    r.floor().to_integer()
}

/// Ceiling of a rational as i128.
pub fn ceil_i128(r: Rational) -> i128 {
    r.ceil().to_integer()
}

pub fn fmt_rational(r: Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde helper: rationals serialize as `"p/q"` strings in certificates.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("5").unwrap(), ratio(5, 1));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("2.5").unwrap(), ratio(5, 2));
        assert_eq!(parse_rational(" -1/3 ").unwrap(), ratio(-1, 3));
        assert!(matches!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for &x in &[0.5, 0.25, 3.0, 1.0 / 8000.0, 0.1] {
            let r = f64_to_rational_exact(x).unwrap();
            assert_eq!(rational_to_f64(r), x);
        }
    }

    #[test]
    fn best_lower_bound_never_exceeds_input() {
        for &x in &[0.1, 1.0 / 424.0, 0.9999, std::f64::consts::E, 1e-4] {
            let r = best_rational_le(x, 1_000_000).unwrap();
            let exact = f64_to_rational_exact(x).unwrap();
            assert!(r <= exact, "{r} > {x}");
            assert!(*r.denom() <= 1_000_000);
            // within 1/max_den of the target
            assert!(exact - r < ratio(1, 1_000_000));
        }
    }

    #[test]
    fn best_lower_bound_hits_small_denominators_exactly() {
        let r = best_rational_le(0.5, 100).unwrap();
        assert_eq!(r, ratio(1, 2));
        let r = best_rational_le(1.0 / 3.0, 1_000_000).unwrap();
        // f64(1/3) is slightly below 1/3, so the best lower bound stays below;
        // any p/q < 1/3 has |3p - q| >= 1, so the gap cannot beat 1/(3q)
        assert!(r <= f64_to_rational_exact(1.0 / 3.0).unwrap());
        assert!(ratio(1, 3) - r < ratio(1, 1_000_000));
    }
}
