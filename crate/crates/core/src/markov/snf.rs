//! Smith normal form and determinants over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::BinaryMatrix;

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Diagonal of the Smith normal form: `d1 | d2 | ...`, nonnegative, with
/// zeros last; length `min(rows, cols)`.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.clone();
    let mut diag = Vec::with_capacity(rows.min(cols));
    for t in 0..rows.min(cols) {
        loop {
            // pivot: smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                for (j, v) in row.iter().enumerate().skip(t) {
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.resize(rows.min(cols), BigInt::zero());
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_floor(&p);
                if !q.is_zero() {
                    for j in t..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = a[t][j].div_floor(&p);
                if !q.is_zero() {
                    for i in t..rows {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility fix-up: fold an offending row into the pivot row
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&p)));
            match offending {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `I - A` over the integers.
pub fn identity_minus(m: &BinaryMatrix) -> IntMatrix {
    let n = m.size();
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32 - m.get(i, j) as i32)).collect())
        .collect()
}

fn ser_ints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_i64() {
            Some(i) => seq.serialize_element(&i)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

fn ser_int<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(i) => s.serialize_i64(i),
        None => s.serialize_str(&x.to_string()),
    }
}

/// `coker(I - A) = Z^{free_rank} + sum Z/d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BowenFranksResult {
    #[serde(serialize_with = "ser_ints")]
    pub divisors: Vec<BigInt>,
    pub free_rank: usize,
    #[serde(serialize_with = "ser_int")]
    pub det: BigInt,
}

impl BowenFranksResult {
    /// Divisors greater than 1.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| **d > BigInt::one()).cloned().collect()
    }

    /// Product of the nonzero divisors.
    pub fn torsion_order(&self) -> BigInt {
        self.divisors.iter().filter(|d| !d.is_zero()).product()
    }
}

fn cokernel(m: &IntMatrix) -> BowenFranksResult {
    let divisors = smith_normal_form(m);
    let free_rank = divisors.iter().filter(|d| d.is_zero()).count();
    BowenFranksResult { divisors, free_rank, det: bareiss_determinant(m) }
}

pub fn bowen_franks(m: &BinaryMatrix) -> BowenFranksResult {
    cokernel(&identity_minus(m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KTheory {
    /// `K0 = coker(I - A^T)`.
    pub k0: BowenFranksResult,
    #[serde(serialize_with = "ser_ints")]
    pub k0_torsion: Vec<BigInt>,
    /// `K1 = ker(I - A^T)`, free of this rank.
    pub k1_rank: usize,
}

pub fn k_theory(m: &BinaryMatrix) -> KTheory {
    let k0 = cokernel(&identity_minus(&m.transpose()));
    KTheory { k0_torsion: k0.torsion(), k1_rank: k0.free_rank, k0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(rows: &[&[i64]]) -> IntMatrix {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn textbook_examples() {
        assert_eq!(smith_normal_form(&int(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]])), ints(&[2, 6, 12]));
        assert_eq!(smith_normal_form(&int(&[&[6, 0], &[0, 4]])), ints(&[2, 12]));
        assert_eq!(smith_normal_form(&int(&[&[0, 0], &[0, 0]])), ints(&[0, 0]));
        assert_eq!(smith_normal_form(&int(&[&[1, 2, 3], &[2, 4, 6]])), ints(&[1, 0]));
    }

    #[test]
    fn zero_and_identity_matrices() {
        let z = bowen_franks(&BinaryMatrix::zeros(4));
        assert_eq!(z.divisors, ints(&[1, 1, 1, 1]));
        assert_eq!(z.det, BigInt::one());
        let i = bowen_franks(&BinaryMatrix::identity(5));
        assert_eq!(i.free_rank, 5);
        assert!(i.det.is_zero());
    }

    #[test]
    fn determinants() {
        assert_eq!(bareiss_determinant(&int(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(bareiss_determinant(&int(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]])), BigInt::from(4));
        assert_eq!(bareiss_determinant(&int(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    proptest! {
        #[test]
        fn snf_invariants(rows in prop::collection::vec(prop::collection::vec(-9i64..10, 4), 4)) {
            let m: IntMatrix = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let d = smith_normal_form(&m);
            for w in d.windows(2) {
                prop_assert!(w[1].is_zero() || (!w[0].is_zero() && w[1].is_multiple_of(&w[0])));
            }
            let det = bareiss_determinant(&m);
            prop_assert_eq!(det.clone(), BigInt::from(cofactor_det(&rows)));
            let prod: BigInt = d.iter().product();
            prop_assert_eq!(prod, det.abs());
            let t: IntMatrix = (0..4).map(|j| (0..4).map(|i| m[i][j].clone()).collect()).collect();
            prop_assert_eq!(smith_normal_form(&t), d);
        }
    }
}
