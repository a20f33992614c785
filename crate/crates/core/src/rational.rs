//! Exact rational scalars and their text form.
//!
//! Every probability and every test margin in this crate is a
//! `BigRational`: always in lowest terms, positive denominator, no
//! rounding anywhere. Inputs may be written as integers (`"3"`),
//! fractions (`"3/4"`) or decimals (`"0.25"`); decimals convert exactly.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;
pub type Int = BigInt;

/// Shorthand for small rational constants in tests and tables.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(Int::from(numer), Int::from(denom))
}

pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Parse `"p/q"`, `"p"` or an exact decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational literal".into()));
    }
    if let Some((numer, denom)) = t.split_once('/') {
        let n: Int = numer
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
        let d: Int = denom
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
        if !d.is_positive() {
            return Err(Error::Parse(format!(
                "denominator must be a positive integer in {t:?}"
            )));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let (sign, whole_digits) = match whole.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if !whole_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(Error::Parse(format!("bad decimal literal {t:?}")));
        }
        let whole_part: Int = if whole_digits.is_empty() {
            Int::zero()
        } else {
            whole_digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad decimal literal {t:?}")))?
        };
        let frac_part: Int = if frac.is_empty() {
            Int::zero()
        } else {
            frac.parse()
                .map_err(|_| Error::Parse(format!("bad decimal literal {t:?}")))?
        };
        let scale = Int::from(10u32).pow(frac.len() as u32);
        let magnitude = whole_part * &scale + frac_part;
        return Ok(Rat::new(magnitude * Int::from(sign), scale));
    }
    let n: Int = t
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational literal {t:?}")))?;
    Ok(Rat::from_integer(n))
}

/// Lowest-terms text form: integers print bare, fractions as `p/q`.
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate decimal rendering for reports that opt into it.
pub fn approx_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // Good enough for display; decision paths never call this.
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Greatest common divisor of the absolute values of a slice, zero if all zero.
pub fn gcd_all(values: &[Int]) -> Int {
    let mut g = Int::zero();
    for v in values {
        g = num_integer::Integer::gcd(&g, v);
        if g.is_one() {
            break;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rat("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rat("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat(" 7 ").unwrap(), rat(7, 1));
        assert_eq!(parse_rat("2/6").unwrap(), rat(1, 3));
        assert_eq!(parse_rat("0.1").unwrap(), rat(1, 10));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "1/0", "1/-2", "a", "1.2.3", "--3", "1e3"] {
            assert!(parse_rat(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format_rat(&rat(4, 2)), "2");
        assert_eq!(format_rat(&rat(3, 4)), "3/4");
        assert_eq!(format_rat(&rat(-3, 4)), "-3/4");
        assert_eq!(format_rat(&rat(0, 5)), "0");
    }

    #[test]
    fn arithmetic_has_no_drift() {
        // (a+b)-b = a and (a*b)/b = a exactly.
        let a = rat(355, 113);
        let b = rat(-7, 39916801);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
    }
}
