use std::fmt;

use serde::{Deserialize, Serialize};

use super::{gauss_shift, Digits, QuadraticSurd, FLOAT_DENOMINATOR_LIMIT};
use crate::error::{Error, Result};

/// Number of tail digits used to evaluate a point given by explicit digits.
const DIGIT_WINDOW: usize = 64;

/// A forward endpoint in (0, 1), given numerically, exactly as a quadratic
/// surd, or as an explicit digit sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Endpoint {
    Float(f64),
    Surd(QuadraticSurd),
    Digits(Digits),
}

impl Endpoint {
    pub fn value(&self) -> f64 {
        match self {
            Endpoint::Float(x) => *x,
            Endpoint::Surd(s) => s.to_f64(),
            Endpoint::Digits(d) => window_value(d.as_slice()),
        }
    }

    /// True for exactly represented irrational endpoints.
    pub fn is_exact_irrational(&self) -> bool {
        matches!(self, Endpoint::Surd(_))
    }

    pub fn stream(&self) -> DigitStream {
        let state = match self {
            Endpoint::Float(x) => StreamState::Float { x: *x, q_prev: 0.0, q: 1.0 },
            Endpoint::Surd(s) => StreamState::Surd(s.clone()),
            Endpoint::Digits(d) => StreamState::Digits { digits: d.as_slice().to_vec(), pos: 0 },
        };
        DigitStream { state, end: None }
    }

    /// One step of the Gauss shift: the leading digit and the shifted endpoint.
    pub fn shift(&self) -> Result<(u64, Endpoint)> {
        match self {
            Endpoint::Float(x) => {
                if !(*x > 0.0 && *x < 1.0) {
                    return Err(Error::Cusp(format!("endpoint {x} has no further digits")));
                }
                let k = (1.0 / x).floor() as u64;
                Ok((k, Endpoint::Float(gauss_shift(*x))))
            }
            Endpoint::Surd(s) => {
                let (k, next) = s.shift()?;
                Ok((k, Endpoint::Surd(next)))
            }
            Endpoint::Digits(d) => match d.as_slice().split_first() {
                Some((&k, rest)) => Ok((k, Endpoint::Digits(Digits::new(rest.to_vec())?))),
                None => Err(Error::Cusp("digit list exhausted".into())),
            },
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Float(x) => write!(f, "{x}"),
            Endpoint::Surd(s) => write!(f, "{s}"),
            Endpoint::Digits(d) => write!(f, "{d}"),
        }
    }
}

fn window_value(d: &[u64]) -> f64 {
    d.iter().take(DIGIT_WINDOW).rev().fold(0.0, |x, &k| 1.0 / (k as f64 + x))
}

#[derive(Debug, Clone)]
enum StreamState {
    Float { x: f64, q_prev: f64, q: f64 },
    Surd(QuadraticSurd),
    Digits { digits: Vec<u64>, pos: usize },
}

/// Why a digit stream stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamEnd {
    /// The point is rational and its expansion ended.
    Cusp,
    /// No further reliable digits are available.
    Truncated,
}

/// A digit together with the point `x_n` whose leading digit it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamItem {
    pub digit: u64,
    pub x: f64,
}

/// Iterator over `(k_n, x_n)` with `x_{n+1} = T x_n`.
#[derive(Debug, Clone)]
pub struct DigitStream {
    state: StreamState,
    end: Option<StreamEnd>,
}

impl DigitStream {
    pub fn end(&self) -> Option<StreamEnd> {
        self.end
    }
}

impl Iterator for DigitStream {
    type Item = StreamItem;

    fn next(&mut self) -> Option<StreamItem> {
        if self.end.is_some() {
            return None;
        }
        match &mut self.state {
            StreamState::Float { x, q_prev, q } => {
                if *x <= 0.0 {
                    self.end = Some(StreamEnd::Cusp);
                    return None;
                }
                let inv = 1.0 / *x;
                let k = inv.floor();
                let q_next = k * *q + *q_prev;
                if q_next > FLOAT_DENOMINATOR_LIMIT as f64 {
                    self.end = Some(StreamEnd::Truncated);
                    return None;
                }
                let item = StreamItem { digit: k as u64, x: *x };
                (*q_prev, *q) = (*q, q_next);
                *x = gauss_shift(*x);
                Some(item)
            }
            StreamState::Surd(s) => match s.shift() {
                Ok((k, next)) => {
                    let item = StreamItem { digit: k, x: s.to_f64() };
                    *s = next;
                    Some(item)
                }
                Err(_) => {
                    self.end = Some(StreamEnd::Truncated);
                    None
                }
            },
            StreamState::Digits { digits, pos } => {
                if *pos >= digits.len() {
                    self.end = Some(StreamEnd::Truncated);
                    return None;
                }
                let item = StreamItem { digit: digits[*pos], x: window_value(&digits[*pos..]) };
                *pos += 1;
                Some(item)
            }
        }
    }
}
