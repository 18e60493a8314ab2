use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Continuants;
use crate::error::{Error, Result};

/// A real quadratic irrational `(p + sqrt(d)) / q`, kept in the reduced form
/// where `q` divides `d - p^2` so that the digit recurrence stays integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    p: BigInt,
    q: BigInt,
    d: BigInt,
}

impl QuadraticSurd {
    /// `(a + b sqrt(d)) / c`. Fails with a cusp error when the value is rational.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, d: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let (a, b, d, c) = (a.into(), b.into(), d.into(), c.into());
        if c.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        if d.is_negative() {
            return Err(Error::Invalid("negative radicand".into()));
        }
        let root = d.sqrt();
        if b.is_zero() || &root * &root == d {
            return Err(Error::Cusp("surd is rational".into()));
        }
        // move b under the root, keeping the sign on the rational part
        let (p, q) = if b.is_positive() { (a, c) } else { (-a, -c) };
        let d = &b * &b * d;
        let qa = q.abs();
        Ok(QuadraticSurd { p: &p * &qa, d: &d * &q * &q, q: &q * &qa })
    }

    /// The fractional golden point `(sqrt(5) - 1) / 2 = [1, 1, 1, ...]`.
    pub fn golden() -> Self {
        QuadraticSurd::new(-1, 1, 5, 2).unwrap()
    }

    /// `sqrt(2) - 1 = [2, 2, 2, ...]`.
    pub fn silver() -> Self {
        QuadraticSurd::new(-1, 1, 2, 1).unwrap()
    }

    /// The purely periodic point `[a1, ..., am, a1, ..., am, ...]` in (0, 1).
    pub fn from_period(period: &[u64]) -> Result<Self> {
        if period.is_empty() || period.contains(&0) {
            return Err(Error::Invalid("period must be a nonempty list of digits >= 1".into()));
        }
        // x = (p_m + p_{m-1} x) / (q_m + q_{m-1} x)
        let c = Continuants::from_digits(period);
        let b = &c.q - &c.p_prev;
        let disc = &b * &b + BigInt::from(4) * &c.q_prev * &c.p;
        QuadraticSurd::new(-b, 1, disc, BigInt::from(2) * &c.q_prev)
    }

    pub fn floor(&self) -> BigInt {
        let s = self.d.sqrt();
        if self.q.is_positive() {
            (&self.p + &s).div_floor(&self.q)
        } else {
            (-&self.p - &s - BigInt::one()).div_floor(&(-&self.q))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let f = |v: &BigInt| v.to_f64().unwrap_or(f64::NAN);
        let root = f(&self.d).sqrt();
        if !self.p.is_negative() {
            (f(&self.p) + root) / f(&self.q)
        } else {
            // p + sqrt(d) = (d - p^2) / (sqrt(d) - p), free of cancellation
            let num = &self.d - &self.p * &self.p;
            f(&num) / ((root - f(&self.p)) * f(&self.q))
        }
    }

    /// `1 / self`.
    pub fn recip(&self) -> QuadraticSurd {
        let q = (&self.d - &self.p * &self.p) / &self.q;
        QuadraticSurd { p: -&self.p, q, d: self.d.clone() }
    }

    /// `self - n`.
    pub fn sub_int(&self, n: &BigInt) -> QuadraticSurd {
        QuadraticSurd { p: &self.p - n * &self.q, q: self.q.clone(), d: self.d.clone() }
    }

    pub fn is_in_unit_interval(&self) -> bool {
        self.floor().is_zero()
    }

    /// One Gauss shift of a point in (0, 1): returns the digit `[1/x]` and
    /// `1/x - [1/x]`.
    pub fn shift(&self) -> Result<(u64, QuadraticSurd)> {
        if !self.is_in_unit_interval() {
            return Err(Error::Domain(format!("{self} is not in (0, 1)")));
        }
        let inv = self.recip();
        let k = inv.floor();
        let digit = k.to_u64().ok_or_else(|| Error::Domain("digit exceeds u64".into()))?;
        Ok((digit, inv.sub_int(&k)))
    }

    /// First `n` digits of a point in (0, 1), computed exactly.
    pub fn digits(&self, n: usize) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(n);
        let mut x = self.clone();
        for _ in 0..n {
            let (k, next) = x.shift()?;
            out.push(k);
            x = next;
        }
        Ok(out)
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+sqrt({}))/{}", self.p, self.d, self.q)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s)).map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn is_balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}

fn strip_outer_parens(s: &str) -> &str {
    match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) if is_balanced(inner) => inner,
        _ => s,
    }
}

/// Splits a signed sum into terms, keeping `sqrt(...)` intact.
fn split_terms(s: &str) -> Vec<&str> {
    let mut terms = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '+' | '-' if depth == 0 && i > start => {
                terms.push(&s[start..i]);
                start = i;
            }
            _ => {}
        }
    }
    terms.push(&s[start..]);
    terms
}

impl FromStr for QuadraticSurd {
    type Err = Error;

    /// Accepts `golden`, `sqrt2m1`, and expressions of the form
    /// `(a + b*sqrt(d))/c` (any of `a`, `b`, `/c` may be omitted).
    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        match s.as_str() {
            "golden" | "phi" => return Ok(QuadraticSurd::golden()),
            "sqrt2m1" | "silver" => return Ok(QuadraticSurd::silver()),
            _ => {}
        }
        let (num, den) = match s.rfind('/') {
            Some(pos) if !s[pos + 1..].contains(')') => (&s[..pos], parse_int(&s[pos + 1..])?),
            _ => (s.as_str(), BigInt::one()),
        };
        let num = strip_outer_parens(num);
        let mut a = BigInt::zero();
        let mut root: Option<(BigInt, BigInt)> = None;
        for term in split_terms(num) {
            if let Some(pos) = term.find("sqrt(") {
                if root.is_some() {
                    return Err(Error::Parse("only one square root term is supported".into()));
                }
                let coef = term[..pos].trim_end_matches('*');
                let b = match coef {
                    "" | "+" => BigInt::one(),
                    "-" => -BigInt::one(),
                    c => parse_int(c)?,
                };
                let inner = term[pos + 5..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced sqrt in {term:?}")))?;
                root = Some((b, parse_int(inner)?));
            } else {
                a += parse_int(term)?;
            }
        }
        let (b, d) = root.ok_or_else(|| Error::Parse(format!("no sqrt term in {input:?}")))?;
        QuadraticSurd::new(a, b, d, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn golden_and_silver() {
        let g = QuadraticSurd::golden();
        assert!((g.to_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(g.digits(30).unwrap(), vec![1; 30]);
        assert_eq!(QuadraticSurd::silver().digits(30).unwrap(), vec![2; 30]);
    }

    #[test]
    fn periodic_construction() {
        let x = QuadraticSurd::from_period(&[3, 1, 2]).unwrap();
        assert_eq!(x.digits(9).unwrap(), vec![3, 1, 2, 3, 1, 2, 3, 1, 2]);
        let g = QuadraticSurd::from_period(&[1]).unwrap();
        assert!((g.to_f64() - QuadraticSurd::golden().to_f64()).abs() < 1e-16);
        assert!(QuadraticSurd::from_period(&[]).is_err());
    }

    #[test]
    fn parsing() {
        let g: QuadraticSurd = "(-1+sqrt(5))/2".parse().unwrap();
        assert!((g.to_f64() - QuadraticSurd::golden().to_f64()).abs() < 1e-16);
        let s: QuadraticSurd = "sqrt(2) - 1".parse().unwrap();
        assert!((s.to_f64() - (2f64.sqrt() - 1.0)).abs() < 1e-16);
        let t: QuadraticSurd = "(3 - 2*sqrt(2))".parse().unwrap();
        assert!((t.to_f64() - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!("golden".parse::<QuadraticSurd>().unwrap(), QuadraticSurd::golden());
        assert!(matches!("(1+sqrt(4))/3".parse::<QuadraticSurd>(), Err(Error::Cusp(_))));
        assert!("1/2".parse::<QuadraticSurd>().is_err());
    }

    #[test]
    fn negative_denominator_floor() {
        // (1 + sqrt(2)) / -3 = -0.8047...
        let x = QuadraticSurd::new(1, 1, 2, -3).unwrap();
        assert_eq!(x.floor(), BigInt::from(-1));
        let y = QuadraticSurd::new(1, -1, 2, 3).unwrap();
        assert_eq!(y.floor(), BigInt::from(-1));
        assert!((y.to_f64() - (1.0 - 2f64.sqrt()) / 3.0).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn floor_matches_float(a in -50i64..50, b in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]), d in 2u32..60, c in prop::sample::select(vec![-7i64, -3, -1, 1, 2, 5, 9])) {
            let r = (d as f64).sqrt();
            prop_assume!((r.round() * r.round()) as u32 != d);
            let x = QuadraticSurd::new(a, b, d, c).unwrap();
            let v = (a as f64 + b as f64 * r) / c as f64;
            prop_assert!((x.to_f64() - v).abs() < 1e-12);
            if (v - v.round()).abs() > 1e-9 {
                prop_assert_eq!(x.floor(), BigInt::from(v.floor() as i64));
            }
        }
    }
}
