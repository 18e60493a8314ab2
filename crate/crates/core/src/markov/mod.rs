//! The Markov partition `{U_{k,t}}` of `E_N x P1(F2)`, its 0/1 matrix `A_N`
//! and graph, exact integer invariants of `I - A_N`, and KMS-state data.

mod kms;
mod snf;

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cfrac::{branch_act, CosetPoint};
use crate::error::{Error, Result};

pub use kms::{
    finite_level_state, gibbs_cylinder_mass, invariance_defect, kms_beta_bound, unchecked_model, uniqueness_probe,
    var0_h, words, CylinderWord, FiniteLevelState, KmsModel, KmsSpec, UniquenessProbe, Var0,
};
pub use snf::{bareiss_determinant, bowen_franks, k_theory, smith_normal_form, BowenFranksResult, KTheory};

/// `M1`, the block of an even digit.
pub const M1: [[u8; 3]; 3] = [[0, 0, 1], [0, 1, 0], [1, 0, 0]];
/// `M2`, the block of an odd digit.
pub const M2: [[u8; 3]; 3] = [[0, 0, 1], [1, 0, 0], [0, 1, 0]];

fn transpose3(m: [[u8; 3]; 3]) -> [[u8; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

/// Square 0/1 matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMatrix {
    n: usize,
    data: Vec<u8>,
}

impl BinaryMatrix {
    pub fn zeros(n: usize) -> Self {
        BinaryMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        (0..n).for_each(|i| m.set(i, i, true));
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n || r.iter().any(|&v| v > 1)) {
            return Err(Error::Invalid("expected a square 0/1 matrix".into()));
        }
        Ok(BinaryMatrix { n, data: rows.concat() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.n + j] == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.n + j] = v as u8;
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.data.chunks(self.n).map(|r| r.iter().map(|&v| v as usize).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.n).map(|j| (0..self.n).filter(|&i| self.get(i, j)).count()).collect()
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.get(i, j))
    }

    fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i, j))
    }

    /// `u v` per edge `u -> v`, one per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        for i in 0..self.n {
            for j in self.successors(i) {
                writeln!(w, "{i} {j}")?;
            }
        }
        Ok(())
    }
}

/// Which index of `A_N` the digit blocks vary along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Entry `((k,t),(l,s))` is 1 iff `(0, 1; 1, l) . s = t`: blocks vary with the column digit.
    Column,
    /// The transpose: blocks `M1`, `M2^T` vary with the row digit.
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct State {
    pub k: u64,
    pub t: CosetPoint,
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovSystem {
    #[serde(rename = "N")]
    pub n: u64,
    pub convention: Convention,
    #[serde(skip)]
    pub states: Vec<State>,
    #[serde(serialize_with = "ser_rows")]
    pub matrix: BinaryMatrix,
}

fn ser_rows<S: serde::Serializer>(m: &BinaryMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.rows().serialize(s)
}

/// `A_N` on the states `(k, t)`, ordered lexicographically with `t` in order `0, 1, inf`.
pub fn build_an(n: u64) -> Result<MarkovSystem> {
    if n < 1 {
        return Err(Error::Invalid("N must be >= 1".into()));
    }
    let states: Vec<State> =
        (1..=n).flat_map(|k| CosetPoint::ALL.into_iter().map(move |t| State { k, t })).collect();
    let size = states.len();
    let mut matrix = BinaryMatrix::zeros(size);
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            matrix.set(i, j, branch_act(b.k, b.t) == a.t);
        }
    }
    Ok(MarkovSystem { n, convention: Convention::Column, states, matrix })
}

impl MarkovSystem {
    pub fn size(&self) -> usize {
        self.states.len()
    }

    /// The 3x3 block `A_{kl}` (1-based digits).
    pub fn block(&self, k: u64, l: u64) -> [[u8; 3]; 3] {
        let mut b = [[0; 3]; 3];
        let (r0, c0) = (3 * (k - 1) as usize, 3 * (l - 1) as usize);
        for (t, row) in b.iter_mut().enumerate() {
            for (s, v) in row.iter_mut().enumerate() {
                *v = self.matrix.get(r0 + t, c0 + s) as u8;
            }
        }
        b
    }

    /// Every block is `M1` for even and `M2` for odd digits along the convention's index.
    pub fn check_block_structure(&self) -> bool {
        (1..=self.n).all(|k| {
            (1..=self.n).all(|l| {
                let (d, m2) = match self.convention {
                    Convention::Column => (l, M2),
                    Convention::Row => (k, transpose3(M2)),
                };
                self.block(k, l) == if d % 2 == 0 { M1 } else { m2 }
            })
        })
    }

    pub fn transpose(&self) -> MarkovSystem {
        let convention = match self.convention {
            Convention::Column => Convention::Row,
            Convention::Row => Convention::Column,
        };
        MarkovSystem { n: self.n, convention, states: self.states.clone(), matrix: self.matrix.transpose() }
    }
}

/// Evidence for or against strong connectivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// BFS trees from vertex 0 along edges and against them; `parent[v]` is
    /// the previous vertex on a shortest path (`None` for the root).
    Spanning { forward: Vec<Option<usize>>, backward: Vec<Option<usize>> },
    /// `closed` has no edge leaving it and misses `outside`.
    Separating { closed: Vec<usize>, outside: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub witness: Witness,
}

fn bfs<I: Iterator<Item = usize>>(n: usize, next: impl Fn(usize) -> I) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut parent = vec![None; n];
    let mut level = vec![None; n];
    let mut queue = VecDeque::from([0]);
    level[0] = Some(0);
    while let Some(u) = queue.pop_front() {
        for v in next(u) {
            if level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    (parent, level)
}

pub fn is_irreducible(m: &BinaryMatrix) -> Irreducibility {
    let n = m.size();
    if n == 0 {
        return Irreducibility { irreducible: false, witness: Witness::Separating { closed: vec![], outside: 0 } };
    }
    let (forward, fwd_level) = bfs(n, |u| m.successors(u));
    if let Some(outside) = fwd_level.iter().position(Option::is_none) {
        let closed = (0..n).filter(|&v| fwd_level[v].is_some()).collect();
        return Irreducibility { irreducible: false, witness: Witness::Separating { closed, outside } };
    }
    let (backward, bwd_level) = bfs(n, |u| m.predecessors(u));
    if bwd_level.iter().any(Option::is_none) {
        // everything that cannot reach 0 is closed under successors
        let closed = (0..n).filter(|&v| bwd_level[v].is_none()).collect();
        return Irreducibility { irreducible: false, witness: Witness::Separating { closed, outside: 0 } };
    }
    Irreducibility { irreducible: true, witness: Witness::Spanning { forward, backward } }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub period: u64,
    pub aperiodic: bool,
}

/// Period of an irreducible matrix: the gcd of `level(u) + 1 - level(v)`
/// over all edges `u -> v`, levels from a BFS.
pub fn is_aperiodic(m: &BinaryMatrix) -> Result<Periodicity> {
    if !is_irreducible(m).irreducible {
        return Err(Error::Invalid("period is only defined for irreducible matrices".into()));
    }
    let n = m.size();
    let (_, level) = bfs(n, |u| m.successors(u));
    let mut g = 0i64;
    for u in 0..n {
        for v in m.successors(u) {
            let d = level[u].unwrap() as i64 + 1 - level[v].unwrap() as i64;
            g = g.gcd(&d);
        }
    }
    let period = g.unsigned_abs();
    Ok(Periodicity { period, aperiodic: period == 1 })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralRadius {
    /// Exact value when all row sums agree.
    pub exact: Option<u64>,
    /// Power-iteration estimate.
    pub numeric: f64,
    pub iterations: usize,
}

impl SpectralRadius {
    pub fn value(&self) -> f64 {
        self.exact.map_or(self.numeric, |e| e as f64)
    }
}

pub fn spectral_radius(m: &BinaryMatrix) -> Result<SpectralRadius> {
    let sums = m.row_sums();
    let exact = sums.windows(2).all(|w| w[0] == w[1]).then(|| sums.first().copied().unwrap_or(0) as u64);
    let n = m.size();
    // a non-uniform start so the estimate does not come for free
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64 / 7.0).collect();
    let mut estimate = 0.0;
    for it in 1..=100_000 {
        let w: Vec<f64> = (0..n).map(|i| m.successors(i).map(|j| v[j]).sum()).collect();
        let norm: f64 = w.iter().sum();
        let prev: f64 = v.iter().sum();
        if norm == 0.0 {
            return Ok(SpectralRadius { exact, numeric: 0.0, iterations: it });
        }
        let next = norm / prev;
        v = w.into_iter().map(|x| x / norm).collect();
        if (next - estimate).abs() <= 1e-14 * next {
            let spread = (0..n)
                .map(|i| m.successors(i).map(|j| v[j]).sum::<f64>() - next * v[i])
                .fold(0.0f64, |a, r| a.max(r.abs()));
            if spread <= 1e-13 {
                return Ok(SpectralRadius { exact, numeric: next, iterations: it });
            }
        }
        estimate = next;
    }
    Err(Error::NoConvergence { iterations: 100_000, residual: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_are_m1_and_m2() {
        let a = build_an(4).unwrap();
        assert_eq!(a.block(1, 2), M1);
        assert_eq!(a.block(3, 1), M2);
        assert_eq!(a.block(2, 3), M2);
        assert!(a.check_block_structure());
        assert!(a.transpose().check_block_structure());
        assert!(a.matrix.row_sums().iter().chain(&a.matrix.col_sums()).all(|&s| s == 4));
    }

    #[test]
    fn two_digit_system() {
        let a = build_an(2).unwrap();
        assert_eq!(a.size(), 6);
        assert!(a.matrix.row_sums().iter().all(|&s| s == 2));
        assert!(is_irreducible(&a.matrix).irreducible);
        assert_eq!(is_aperiodic(&a.matrix).unwrap().period, 1);
        let r = spectral_radius(&a.matrix).unwrap();
        assert_eq!(r.exact, Some(2));
        assert!((r.numeric - 2.0).abs() < 1e-10);
    }

    #[test]
    fn all_m1_variant_is_reducible() {
        // every block M1: sheet 1 maps only to itself
        let n = 2;
        let mut m = BinaryMatrix::zeros(3 * n);
        for k in 0..n {
            for l in 0..n {
                for t in 0..3 {
                    for s in 0..3 {
                        m.set(3 * k + t, 3 * l + s, M1[t][s] == 1);
                    }
                }
            }
        }
        let r = is_irreducible(&m);
        assert!(!r.irreducible);
        let Witness::Separating { closed, outside } = r.witness else { panic!() };
        assert!(!closed.contains(&outside));
        for &u in &closed {
            assert!(m.successors(u).all(|v| closed.contains(&v)));
        }
        assert!(is_aperiodic(&m).is_err());
    }

    #[test]
    fn two_cycle_has_period_two() {
        let m = BinaryMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(is_aperiodic(&m).unwrap(), Periodicity { period: 2, aperiodic: false });
        let c3 = BinaryMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        assert_eq!(is_aperiodic(&c3).unwrap().period, 3);
    }

    #[test]
    fn spanning_witness_reaches_everything() {
        let a = build_an(3).unwrap();
        let Witness::Spanning { forward, backward } = is_irreducible(&a.matrix).witness else { panic!() };
        for v in 1..a.size() {
            let p = forward[v].unwrap();
            assert!(a.matrix.get(p, v));
            let q = backward[v].unwrap();
            assert!(a.matrix.get(v, q));
        }
    }

    #[test]
    fn json_and_edge_list() {
        let a = build_an(2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&a).unwrap();
        assert_eq!(v["N"], 2);
        assert_eq!(v["convention"], "column");
        assert_eq!(v["matrix"].as_array().unwrap().len(), 6);
        let mut buf = Vec::new();
        a.matrix.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert!(text.lines().all(|l| l.split(' ').count() == 2));
    }
}
