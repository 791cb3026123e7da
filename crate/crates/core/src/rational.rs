//! Exact rational scalars. Every payoff, value, and label in this crate is a
//! [`Q`]; there is no floating point anywhere.

use crate::error::{Error, Result};

/// The scalar type used throughout: a rational with 64-bit numerator and
/// denominator, always kept in lowest terms by `num-rational`.
pub type Q = num_rational::Rational64;

/// Parses the textual rational forms accepted in game files: an optionally
/// signed integer, or `p/q` in lowest terms with a positive denominator.
pub fn parse_rational(text: &str) -> Result<Q> {
    let bad = || Error::MalformedRational(text.to_string());
    match text.split_once('/') {
        None => {
            let n: i64 = text.trim().parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q <= 0 {
                return Err(bad());
            }
            let r = Q::new(p, q);
            // `Q::new` reduces; a changed representation means the input was
            // not in lowest terms, which the format rejects.
            if (*r.numer(), *r.denom()) != (p, q) {
                return Err(bad());
            }
            Ok(r)
        }
    }
}
