//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Coefficient type used everywhere in the exact layer.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale down through the bit lengths.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n - d).clamp(-1000, 1000);
        let scaled = if shift >= 0 {
            q / Rational::from_integer(BigInt::one() << (shift as usize))
        } else {
            q * Rational::from_integer(BigInt::one() << ((-shift) as usize))
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Exact binary value of a finite double.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Text form `num/den`, or just `num` for integers.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num`, `num/den`, or a finite decimal literal such as `-0.25`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let neg = whole.starts_with('-');
        let whole = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if whole.is_empty() { "0" } else { whole }, frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// The rational with the smallest denominator in the closed interval `[lo, hi]`
/// (Stern–Brocot descent). Requires `lo <= hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    debug_assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Rational::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &fl + Rational::one() <= *hi {
        return lo.ceil();
    }
    // lo and hi share the integer part; recurse on reciprocals of the fractional parts.
    let frac_lo = lo - &fl;
    let frac_hi = hi - &fl;
    let inner = simplest_between(&frac_hi.recip(), &frac_lo.recip());
    fl + inner.recip()
}

/// Best approximation of `x` with denominator at most `max_den` (continued fractions).
pub fn best_approximation(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let (a, r) = n.div_mod_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            // semiconvergent check
            let k = (max_den - &q0) / &q1;
            let cand = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let conv = Rational::new(p1.clone(), q1.clone());
            return if (&cand - x).abs() < (&conv - x).abs() { cand } else { conv };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        if r.is_zero() {
            return Rational::new(p1, q1);
        }
        n = std::mem::replace(&mut d, r);
    }
}

/// Rounds a double to a nearby rational: the simplest rational within `tol`,
/// provided its denominator respects `max_den`; otherwise the best approximation.
pub fn round_simple(x: f64, tol: f64, max_den: &BigInt) -> Rational {
    let xr = from_f64(x);
    let t = from_f64(tol.abs());
    let s = simplest_between(&(&xr - &t), &(&xr + &t));
    if s.denom() <= max_den {
        s
    } else {
        best_approximation(&xr, max_den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse("-7").unwrap(), int(-7));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format(&ratio(4, -6)), "-2/3");
        assert_eq!(format(&int(5)), "5");
    }

    #[test]
    fn simplest_rational_in_interval() {
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(4, 10)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(-1, 10), &ratio(1, 10)), int(0));
        assert_eq!(simplest_between(&ratio(9, 10), &ratio(11, 10)), int(1));
        assert_eq!(simplest_between(&ratio(-4, 10), &ratio(-3, 10)), ratio(-1, 3));
    }

    #[test]
    fn rounding_recovers_thirds() {
        let big = BigInt::from(1u64 << 32);
        assert_eq!(round_simple(0.333_333_333_3, 1e-7, &big), ratio(1, 3));
        assert_eq!(round_simple(0.999_999_999_7, 1e-7, &big), int(1));
        assert_eq!(best_approximation(&from_f64(std::f64::consts::PI), &BigInt::from(113)), ratio(355, 113));
    }
}
