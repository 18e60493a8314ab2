use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the projective line over F2, i.e. a coset of `Gamma_0(2)` in
/// `PGL(2, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CosetPoint {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Infinity,
}

impl CosetPoint {
    /// Canonical ordering `0, 1, inf`, used for state indexing.
    pub const ALL: [CosetPoint; 3] = [CosetPoint::Zero, CosetPoint::One, CosetPoint::Infinity];

    pub fn index(self) -> usize {
        match self {
            CosetPoint::Zero => 0,
            CosetPoint::One => 1,
            CosetPoint::Infinity => 2,
        }
    }

    pub fn from_index(i: usize) -> CosetPoint {
        Self::ALL[i % 3]
    }

    /// Homogeneous coordinates `[a : b]` over F2.
    fn coords(self) -> [u8; 2] {
        match self {
            CosetPoint::Zero => [0, 1],
            CosetPoint::One => [1, 1],
            CosetPoint::Infinity => [1, 0],
        }
    }

    fn from_coords(c: [u8; 2]) -> CosetPoint {
        match (c[0] & 1, c[1] & 1) {
            (0, 1) => CosetPoint::Zero,
            (1, 1) => CosetPoint::One,
            (1, 0) => CosetPoint::Infinity,
            _ => unreachable!("zero vector is not a projective point"),
        }
    }

    /// Space axis labelled by this point: `0 -> z`, `inf -> y`, `1 -> x`.
    pub fn axis(self) -> Axis {
        match self {
            CosetPoint::Zero => Axis::Z,
            CosetPoint::Infinity => Axis::Y,
            CosetPoint::One => Axis::X,
        }
    }

    pub fn from_axis(a: Axis) -> CosetPoint {
        match a {
            Axis::Z => CosetPoint::Zero,
            Axis::Y => CosetPoint::Infinity,
            Axis::X => CosetPoint::One,
        }
    }
}

impl fmt::Display for CosetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CosetPoint::Zero => "0",
            CosetPoint::One => "1",
            CosetPoint::Infinity => "inf",
        })
    }
}

impl std::str::FromStr for CosetPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(CosetPoint::Zero),
            "1" => Ok(CosetPoint::One),
            "inf" | "infinity" | "∞" => Ok(CosetPoint::Infinity),
            other => Err(Error::Parse(format!("unknown coset point {other:?}"))),
        }
    }
}

/// A 2x2 integer matrix `(a, b; c, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl IntMatrix2 {
    pub const fn new(a: i128, b: i128, c: i128, d: i128) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    /// `(0, 1; 1, k)`: the inverse branch `x -> 1/(x + k)`.
    pub fn branch(k: u64) -> Self {
        IntMatrix2::new(0, 1, 1, k as i128)
    }

    /// `(-k, 1; 1, 0)`: the coset part of the shift on a digit `k`.
    pub fn shift(k: u64) -> Self {
        IntMatrix2::new(-(k as i128), 1, 1, 0)
    }

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    fn mod2(&self) -> [[u8; 2]; 2] {
        let r = |v: i128| v.rem_euclid(2) as u8;
        [[r(self.a), r(self.b)], [r(self.c), r(self.d)]]
    }
}

pub(crate) fn act_mod2(m: [[u8; 2]; 2], s: CosetPoint) -> CosetPoint {
    let [u, v] = s.coords();
    CosetPoint::from_coords([(m[0][0] * u + m[0][1] * v) & 1, (m[1][0] * u + m[1][1] * v) & 1])
}

pub(crate) fn shift_matrix_mod2(k: u64) -> [[u8; 2]; 2] {
    [[(k & 1) as u8, 1], [1, 0]]
}

pub(crate) fn branch_matrix_mod2(k: u64) -> [[u8; 2]; 2] {
    [[0, 1], [1, (k & 1) as u8]]
}

/// Image of `s` under the branch matrix `(0, 1; 1, k)`.
pub fn branch_act(k: u64, s: CosetPoint) -> CosetPoint {
    act_mod2(branch_matrix_mod2(k), s)
}

/// Image of `s` under the shift matrix `(-k, 1; 1, 0)`.
pub fn shift_act(k: u64, s: CosetPoint) -> CosetPoint {
    act_mod2(shift_matrix_mod2(k), s)
}

/// Fractional-linear action of an integer matrix on `P1(F2)`; the matrix
/// must have odd determinant.
pub fn coset_act(m: &IntMatrix2, s: CosetPoint) -> Result<CosetPoint> {
    if m.det().rem_euclid(2) == 0 {
        return Err(Error::EvenDeterminant);
    }
    Ok(act_mod2(m.mod2(), s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// A permutation of the space axes, stored as the images of `x, y, z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisPermutation(pub [Axis; 3]);

impl AxisPermutation {
    pub const IDENTITY: AxisPermutation = AxisPermutation([Axis::X, Axis::Y, Axis::Z]);

    pub fn apply(&self, a: Axis) -> Axis {
        self.0[a.index()]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &AxisPermutation) -> AxisPermutation {
        AxisPermutation(Axis::ALL.map(|a| self.apply(first.apply(a))))
    }

    pub fn transposition(a: Axis, b: Axis) -> AxisPermutation {
        AxisPermutation(Axis::ALL.map(|c| if c == a { b } else if c == b { a } else { c }))
    }

    /// Transports a map on `P1(F2)` to the axes through `0 -> z, inf -> y, 1 -> x`.
    pub fn from_coset_map(f: impl Fn(CosetPoint) -> CosetPoint) -> AxisPermutation {
        AxisPermutation(Axis::ALL.map(|a| f(CosetPoint::from_axis(a)).axis()))
    }
}

impl fmt::Display for AxisPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.0 {
            write!(f, "{}", a.letter())?;
        }
        Ok(())
    }
}

/// Relabelling of the axes at the end of an era with `k` cycles: the swap
/// `(y z)` for even `k`, and `(y z)` after `(x y)` for odd `k`.
pub fn axis_permutation(k: u64) -> Result<AxisPermutation> {
    if k < 1 {
        return Err(Error::Domain("digit must be >= 1".into()));
    }
    let yz = AxisPermutation::transposition(Axis::Y, Axis::Z);
    if k % 2 == 0 {
        Ok(yz)
    } else {
        Ok(yz.compose(&AxisPermutation::transposition(Axis::X, Axis::Y)))
    }
}
