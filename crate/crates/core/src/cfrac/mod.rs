//! Continued-fraction machinery: digit extraction, convergents, the Gauss
//! shift and the action of `PGL(2, Z)` on the three-point line `P1(F2)`.
//!
//! Convergents follow the convention `p_{-1}/q_{-1} = 1/0`, `p_0/q_0 = 0/1`,
//! so that the one-digit convergent matrix is `(0, 1; 1, k)`.

mod coset;
mod stream;
mod surd;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coset::{
    axis_permutation, branch_act, coset_act, shift_act, Axis, AxisPermutation, CosetPoint, IntMatrix2,
};
pub use stream::{DigitStream, Endpoint, StreamEnd, StreamItem};
pub use surd::QuadraticSurd;

/// Denominator ceiling for digits extracted from an `f64`.
pub const FLOAT_DENOMINATOR_LIMIT: u64 = 1 << 53;

/// A finite prefix `[k1, k2, ...]` of a continued-fraction expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Digits(Vec<u64>);

impl Digits {
    pub fn new(digits: Vec<u64>) -> Result<Self> {
        if let Some(pos) = digits.iter().position(|&k| k == 0) {
            return Err(Error::Domain(format!("digit {pos} is zero; digits must be >= 1")));
        }
        Ok(Digits(digits))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    /// Largest digit, or 0 for an empty prefix.
    pub fn max_digit(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl TryFrom<Vec<u64>> for Digits {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Digits::new(v)
    }
}

impl From<Digits> for Vec<u64> {
    fn from(d: Digits) -> Self {
        d.0
    }
}

impl fmt::Display for Digits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// Result of a digit extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expansion {
    pub digits: Digits,
    /// The input was rational and its expansion ended.
    pub terminated: bool,
    /// Extraction stopped early because the input carried no further
    /// reliable digits.
    pub precision_exhausted: bool,
}

fn check_unit_interval(x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is not in (0, 1)")));
    }
    Ok(())
}

/// Merges a trailing digit 1 into its predecessor so that terminating
/// expansions have a unique form.
fn canonicalize(digits: &mut Vec<u64>) {
    if digits.len() > 1 && *digits.last().unwrap() == 1 {
        digits.pop();
        *digits.last_mut().unwrap() += 1;
    }
}

/// First `n` continued-fraction digits of a floating-point `x` in (0, 1).
///
/// Digits stop once the convergent denominator would exceed 2^53, since
/// deeper digits of a double are not meaningful.
pub fn cf_digits(x: f64, n: usize) -> Result<Expansion> {
    check_unit_interval(x)?;
    if n == 0 {
        return Err(Error::Invalid("digit count must be >= 1".into()));
    }
    let limit = FLOAT_DENOMINATOR_LIMIT as f64;
    let (mut q_prev, mut q) = (0.0_f64, 1.0_f64);
    let mut digits = Vec::with_capacity(n);
    let mut x = x;
    let mut terminated = false;
    let mut exhausted = false;
    while digits.len() < n {
        let inv = 1.0 / x;
        let k = inv.floor();
        let q_next = k * q + q_prev;
        if q_next > limit || k >= u64::MAX as f64 {
            exhausted = true;
            break;
        }
        digits.push(k as u64);
        (q_prev, q) = (q, q_next);
        x = inv - k;
        if x <= 0.0 {
            terminated = true;
            break;
        }
    }
    if terminated {
        canonicalize(&mut digits);
    }
    Ok(Expansion { digits: Digits(digits), terminated, precision_exhausted: exhausted })
}

/// Exact digits of a rational in (0, 1) by the Euclidean algorithm.
pub fn cf_digits_rational(x: &BigRational, n: usize) -> Result<Expansion> {
    if !(x.is_positive() && x < &BigRational::one()) {
        return Err(Error::Domain(format!("x = {x} is not in (0, 1)")));
    }
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let mut digits = Vec::new();
    let mut terminated = false;
    while digits.len() < n {
        // x = num/den, digit = floor(den/num)
        let (k, r) = den.div_rem(&num);
        digits.push(k.to_u64().ok_or_else(|| Error::Domain("digit exceeds u64".into()))?);
        if r.is_zero() {
            terminated = true;
            break;
        }
        den = num;
        num = r;
    }
    Ok(Expansion { digits: Digits(digits), terminated, precision_exhausted: false })
}

/// Incremental numerators and denominators of the convergents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Continuants {
    pub p_prev: BigInt,
    pub p: BigInt,
    pub q_prev: BigInt,
    pub q: BigInt,
    pub len: usize,
}

impl Default for Continuants {
    fn default() -> Self {
        Continuants {
            p_prev: BigInt::one(),
            p: BigInt::zero(),
            q_prev: BigInt::zero(),
            q: BigInt::one(),
            len: 0,
        }
    }
}

impl Continuants {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, k: u64) {
        let p_next = &self.p * k + &self.p_prev;
        let q_next = &self.q * k + &self.q_prev;
        self.p_prev = std::mem::replace(&mut self.p, p_next);
        self.q_prev = std::mem::replace(&mut self.q, q_next);
        self.len += 1;
    }

    pub fn from_digits(d: &[u64]) -> Self {
        let mut c = Self::new();
        for &k in d {
            c.push(k);
        }
        c
    }
}

/// Denominators only, for long Birkhoff sums where numerators are unused.
#[derive(Debug, Clone)]
pub struct DenominatorGrowth {
    q_prev: BigUint,
    q: BigUint,
    len: usize,
}

impl Default for DenominatorGrowth {
    fn default() -> Self {
        DenominatorGrowth { q_prev: BigUint::zero(), q: BigUint::one(), len: 0 }
    }
}

impl DenominatorGrowth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, k: u64) {
        self.q_prev += &self.q * k;
        std::mem::swap(&mut self.q_prev, &mut self.q);
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    /// Natural logarithm of the current denominator.
    pub fn ln_q(&self) -> f64 {
        ln_biguint(&self.q)
    }
}

/// Natural logarithm of a positive big integer without overflow.
pub fn ln_biguint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::ln).unwrap_or(f64::NEG_INFINITY);
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact value `p_n/q_n` of a digit prefix.
pub fn cf_value(d: &Digits) -> Result<BigRational> {
    if d.is_empty() {
        return Err(Error::Invalid("empty digit sequence".into()));
    }
    let c = Continuants::from_digits(d.as_slice());
    Ok(BigRational::new(c.p, c.q))
}

/// The convergent matrix `g_n = (p_{n-1}, p_n; q_{n-1}, q_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergentMatrix {
    pub p_prev: BigInt,
    pub p: BigInt,
    pub q_prev: BigInt,
    pub q: BigInt,
}

impl ConvergentMatrix {
    pub fn det(&self) -> BigInt {
        &self.p_prev * &self.q - &self.p * &self.q_prev
    }

    /// Applies `g_n^{-1}` as a fractional-linear map; for `x = [k1, ..., kn, ...]`
    /// this is `T^n x`. The double is treated as the exact rational it encodes,
    /// so the only rounding happens in the final conversion.
    pub fn apply_inverse(&self, x: f64) -> f64 {
        match BigRational::from_float(x) {
            Some(r) => self.apply_inverse_exact(&r).to_f64().unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    /// Applies `g_n^{-1}` exactly to a rational argument.
    pub fn apply_inverse_exact(&self, x: &BigRational) -> BigRational {
        let num = x * BigRational::from(self.q.clone()) - BigRational::from(self.p.clone());
        let den = BigRational::from(self.p_prev.clone()) - x * BigRational::from(self.q_prev.clone());
        num / den
    }

    /// Action of `g_n^{-1}` on `P1(F2)`, which is the coset part of `T^n`.
    pub fn inverse_coset_act(&self, s: CosetPoint) -> CosetPoint {
        let m = |v: &BigInt| -> u8 { if v.is_odd() { 1 } else { 0 } };
        // the inverse agrees with the adjugate modulo 2
        coset::act_mod2([[m(&self.q), m(&self.p)], [m(&self.q_prev), m(&self.p_prev)]], s)
    }
}

pub fn convergent_matrix(d: &Digits) -> Result<ConvergentMatrix> {
    if d.is_empty() {
        return Err(Error::Invalid("empty digit sequence".into()));
    }
    let c = Continuants::from_digits(d.as_slice());
    Ok(ConvergentMatrix { p_prev: c.p_prev, p: c.p, q_prev: c.q_prev, q: c.q })
}

/// Exact Gauss shift of a rational in [0, 1]; zero is mapped to zero.
pub fn gauss_shift_exact(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let inv = x.recip();
    &inv - inv.floor()
}

/// The Gauss shift `x -> 1/x - [1/x]`; zero is mapped to zero.
pub fn gauss_shift(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let inv = 1.0 / x;
    inv - inv.floor()
}

/// A point of `[0, 1] x P1(F2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedPoint {
    pub x: f64,
    pub s: CosetPoint,
}

impl ExtendedPoint {
    pub fn new(x: f64, s: CosetPoint) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} is not in [0, 1]")));
        }
        Ok(ExtendedPoint { x, s })
    }
}

/// `T(x, s) = (1/x - [1/x], (-[1/x], 1; 1, 0) . s)`.
pub fn extended_shift(p: ExtendedPoint) -> Result<ExtendedPoint> {
    if p.x <= 0.0 {
        return Err(Error::Cusp("x = 0: orbit terminated".into()));
    }
    if p.x > 1.0 {
        return Err(Error::Domain(format!("x = {} is not in (0, 1]", p.x)));
    }
    let inv = 1.0 / p.x;
    let k = inv.floor();
    let s = coset::act_mod2(coset::shift_matrix_mod2(k as u64), p.s);
    Ok(ExtendedPoint { x: inv - k, s })
}
