//! Exact integer scalars.
//!
//! Everything numeric in this crate is exact. Linear algebra is written
//! against [`ExactInt`], so the same routines run over machine integers
//! (`i64`, `i128`) or arbitrary precision [`num_bigint::BigInt`]. Rationals
//! are `num_rational::Ratio<T>` over the same integer type.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact, signed integer type usable as the ring of matrix entries.
pub trait ExactInt:
    Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("i64 fits in every ExactInt")
    }
}

impl<T> ExactInt for T where
    T: Integer + Signed + Clone + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

/// Least common multiple of the reduced denominators.
///
/// Returns one for an empty slice or an all-integer vector.
pub fn denominator_lcm<T: ExactInt>(values: &[Ratio<T>]) -> T {
    values.iter().fold(T::one(), |acc, q| acc.lcm(q.denom()))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_ratio<T: ExactInt>(q: &Ratio<T>) -> String {
    if q.denom().is_one() {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q` or `p`.
pub fn parse_ratio<T: ExactInt + std::str::FromStr>(s: &str) -> Option<Ratio<T>> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: T = p.trim().parse().ok()?;
            let q: T = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Ratio::new(p, q))
            }
        }
        None => s.parse().ok().map(Ratio::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn lcm_of_thirds() {
        let v = [Ratio::new(1i64, 3), Ratio::new(2, 3)];
        assert_eq!(denominator_lcm(&v), 3);
        let z = [Ratio::from_integer(0i64); 3];
        assert_eq!(denominator_lcm(&z), 1);
        assert_eq!(denominator_lcm::<i64>(&[]), 1);
    }

    #[test]
    fn ratio_text_roundtrip() {
        let q: Ratio<BigInt> = parse_ratio("-4/6").unwrap();
        assert_eq!(fmt_ratio(&q), "-2/3");
        assert_eq!(fmt_ratio(&Ratio::from_integer(5i64)), "5");
        assert!(parse_ratio::<i64>("1/0").is_none());
        assert!(parse_ratio::<i64>("x").is_none());
    }
}
