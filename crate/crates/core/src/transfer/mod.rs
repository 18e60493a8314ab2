//! Transfer operators `L_{beta,N}` of the Gauss shift, on `[0, 1]` or on the
//! three-sheeted space `[0, 1] x P1(F2)`:
//!
//! `(L f)(x, s) = sum_{k=1}^{N} (x + k)^{-beta} f(1/(x + k), (0, 1; 1, k) . s)`.

mod collocation;
mod eigen;
mod mc;
mod thermo;
mod ulam;
mod zeta;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfrac::{branch_act, CosetPoint};
use crate::error::{Error, Result};

pub use collocation::{Chebyshev, DIRECT_BRANCHES};
pub use eigen::{leading_eigen, subdominant_eigenvalue, SpectralResult};
pub use mc::{
    gauss_digits, lyapunov_mc, lyapunov_of_digits, sample_en, DigitSampler, GibbsChain, LyapunovEstimate,
    LyapunovSource, StartMeasure,
};
pub use thermo::{
    dimension_refinement, hausdorff_dim_spectral, hausdorff_dim_with, hensley_dim_asymptotic, invariant_density_full,
    lyapunov_spectral, pressure, pressure_with, write_eigenfunction_csv, default_spec, gauss_density, RefinementRow, DimensionResult, HensleyEstimate, InvariantDensity, LyapunovSpectral,
    RefinementTable, SpectralReport,
};
pub use ulam::{CylinderGrid, MAX_CELLS};
pub use zeta::hurwitz_zeta;

/// Digit bound `N`, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DigitBound {
    Finite(u64),
    Infinite,
}

impl DigitBound {
    pub fn finite(self) -> Option<u64> {
        match self {
            DigitBound::Finite(n) => Some(n),
            DigitBound::Infinite => None,
        }
    }
}

impl fmt::Display for DigitBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitBound::Finite(n) => write!(f, "{n}"),
            DigitBound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for DigitBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "unbounded" => Ok(DigitBound::Infinite),
            t => match t.parse::<u64>() {
                Ok(0) | Err(_) => Err(Error::Parse(format!("digit bound must be a positive integer or 'inf', got {s:?}"))),
                Ok(n) => Ok(DigitBound::Finite(n)),
            },
        }
    }
}

impl Serialize for DigitBound {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DigitBound::Finite(n) => ser.serialize_u64(*n),
            DigitBound::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for DigitBound {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Text(String),
        }
        match Repr::deserialize(de)? {
            Repr::Num(0) => Err(serde::de::Error::custom("digit bound must be positive")),
            Repr::Num(n) => Ok(DigitBound::Finite(n)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Depth-`d` cylinder cells of `E_N`, weights at cell midpoints.
    CylinderUlam,
    /// Polynomial interpolation at `M` Chebyshev points.
    AnalyticCollocation,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::CylinderUlam => "cylinder-ulam",
            Scheme::AnalyticCollocation => "analytic-collocation",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ulam" | "cylinder-ulam" => Ok(Scheme::CylinderUlam),
            "collocation" | "analytic-collocation" => Ok(Scheme::AnalyticCollocation),
            _ => Err(Error::Parse(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub beta: f64,
    pub bound: DigitBound,
    pub scheme: Scheme,
    /// Cylinder depth for Ulam, number of nodes for collocation.
    pub resolution: usize,
    pub coset_aware: bool,
}

impl OperatorSpec {
    pub fn collocation(beta: f64, bound: DigitBound, m: usize) -> Self {
        OperatorSpec { beta, bound, scheme: Scheme::AnalyticCollocation, resolution: m, coset_aware: false }
    }

    pub fn ulam(beta: f64, n: u64, depth: usize) -> Self {
        OperatorSpec { beta, bound: DigitBound::Finite(n), scheme: Scheme::CylinderUlam, resolution: depth, coset_aware: false }
    }

    pub fn with_cosets(mut self) -> Self {
        self.coset_aware = true;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() {
            return Err(Error::Invalid(format!("beta = {} is not finite", self.beta)));
        }
        if self.resolution < 1 {
            return Err(Error::Invalid("resolution must be >= 1".into()));
        }
        match (self.bound, self.scheme) {
            (DigitBound::Infinite, Scheme::CylinderUlam) => {
                Err(Error::Unsupported("the Ulam scheme needs a finite digit bound".into()))
            }
            (DigitBound::Infinite, _) if self.beta <= 1.0 => {
                Err(Error::Divergent(format!("sum of (x+k)^-beta diverges for beta = {} <= 1", self.beta)))
            }
            (DigitBound::Finite(0), _) => Err(Error::Invalid("digit bound must be >= 1".into())),
            _ => Ok(()),
        }
    }
}

/// Discretization basis on one sheet.
#[derive(Debug, Clone)]
pub enum Basis {
    Cylinders(CylinderGrid),
    Chebyshev(Chebyshev),
    /// A matrix given directly, with no function-space meaning.
    Raw,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<f64>),
    /// Fixed number of entries per row.
    Sparse { per_row: usize, cols: Vec<u32>, vals: Vec<f64> },
}

/// A finite matrix approximating a transfer operator. Coset-aware states are
/// ordered sheet-major: index `sheet * cells + cell`, sheets in order `0, 1, inf`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub spec: Option<OperatorSpec>,
    pub basis: Basis,
    sheets: usize,
    cells: usize,
    storage: Storage,
}

impl OperatorMatrix {
    /// Wraps a dense row-major square matrix.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Invalid(format!("expected {} entries, got {}", n * n, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        Ok(OperatorMatrix { spec: None, basis: Basis::Raw, sheets: 1, cells: n, storage: Storage::Dense(data) })
    }

    pub fn dim(&self) -> usize {
        self.sheets * self.cells
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn state(&self, sheet: CosetPoint, cell: usize) -> usize {
        if self.sheets == 1 {
            cell
        } else {
            sheet.index() * self.cells + cell
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        match &self.storage {
            Storage::Dense(a) => a.par_chunks(n).map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect(),
            Storage::Sparse { per_row, cols, vals } => cols
                .par_chunks(*per_row)
                .zip(vals.par_chunks(*per_row))
                .map(|(c, v)| c.iter().zip(v).map(|(&j, w)| w * x[j as usize]).sum())
                .collect(),
        }
    }

    /// `y = A^T x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        match &self.storage {
            Storage::Dense(a) => {
                for (row, xi) in a.chunks(n).zip(x) {
                    for (yj, aij) in y.iter_mut().zip(row) {
                        *yj += aij * xi;
                    }
                }
            }
            Storage::Sparse { per_row, cols, vals } => {
                for (i, xi) in x.iter().enumerate() {
                    let r = i * per_row..(i + 1) * per_row;
                    for (&j, w) in cols[r.clone()].iter().zip(&vals[r]) {
                        y[j as usize] += w * xi;
                    }
                }
            }
        }
        y
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.dim();
        match &self.storage {
            Storage::Dense(a) => a[i * n + j],
            Storage::Sparse { per_row, cols, vals } => (i * per_row..(i + 1) * per_row)
                .filter(|&e| cols[e] as usize == j)
                .map(|e| vals[e])
                .sum(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Sparse { per_row, cols, vals } => {
                let mut a = vec![0.0; n * n];
                for i in 0..n {
                    for e in i * per_row..(i + 1) * per_row {
                        a[i * n + cols[e] as usize] += vals[e];
                    }
                }
                a
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match &self.storage {
            Storage::Dense(a) => a.iter().all(|&v| v >= 0.0),
            Storage::Sparse { vals, .. } => vals.iter().all(|&v| v >= 0.0),
        }
    }

    /// Sample locations on one sheet: cell midpoints or interpolation nodes.
    pub fn sample_points(&self) -> Vec<f64> {
        match &self.basis {
            Basis::Cylinders(g) => (0..g.len()).map(|a| g.midpoint(a)).collect(),
            Basis::Chebyshev(c) => c.nodes.clone(),
            Basis::Raw => (0..self.cells).map(|i| i as f64).collect(),
        }
    }
}

pub fn build_operator(spec: &OperatorSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    match spec.scheme {
        Scheme::CylinderUlam => build_ulam(spec),
        Scheme::AnalyticCollocation => build_collocation(spec),
    }
}

fn build_ulam(spec: &OperatorSpec) -> Result<OperatorMatrix> {
    let n = spec.bound.finite().expect("validated");
    let grid = CylinderGrid::new(n, spec.resolution)?;
    let cells = grid.len();
    let sheets = if spec.coset_aware { 3 } else { 1 };
    let per_row = n as usize;
    let mut cols = Vec::with_capacity(sheets * cells * per_row);
    let mut vals = Vec::with_capacity(sheets * cells * per_row);
    for sheet in &CosetPoint::ALL[..sheets] {
        for a in 0..cells {
            let m = grid.midpoint(a);
            for k in 1..=n {
                let b = grid.preimage(k, a);
                let t = if sheets == 1 { 0 } else { branch_act(k, *sheet).index() };
                cols.push((t * cells + b) as u32);
                vals.push((m + k as f64).powf(-spec.beta));
            }
        }
    }
    Ok(OperatorMatrix {
        spec: Some(*spec),
        basis: Basis::Cylinders(grid),
        sheets,
        cells,
        storage: Storage::Sparse { per_row, cols, vals },
    })
}

fn build_collocation(spec: &OperatorSpec) -> Result<OperatorMatrix> {
    use collocation::{branch_block, Parity};
    let cheb = Chebyshev::new(spec.resolution);
    let m = cheb.len();
    let n = spec.bound.finite();
    let data = if !spec.coset_aware {
        branch_block(&cheb, spec.beta, n, Parity::All)
    } else {
        let even = branch_block(&cheb, spec.beta, n, Parity::Even);
        let odd = branch_block(&cheb, spec.beta, n, Parity::Odd);
        let dim = 3 * m;
        let mut a = vec![0.0; dim * dim];
        for s in CosetPoint::ALL {
            for (block, k) in [(&even, 2), (&odd, 1)] {
                let t = branch_act(k, s).index();
                for i in 0..m {
                    for j in 0..m {
                        a[(s.index() * m + i) * dim + t * m + j] += block[i * m + j];
                    }
                }
            }
        }
        a
    };
    Ok(OperatorMatrix {
        spec: Some(*spec),
        basis: Basis::Chebyshev(cheb),
        sheets: if spec.coset_aware { 3 } else { 1 },
        cells: m,
        storage: Storage::Dense(data),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        let bad = OperatorSpec::ulam(2.0, 2, 4);
        let inf_ulam = OperatorSpec { bound: DigitBound::Infinite, ..bad };
        assert!(matches!(build_operator(&inf_ulam), Err(Error::Unsupported(_))));
        let div = OperatorSpec::collocation(1.0, DigitBound::Infinite, 8);
        assert!(matches!(build_operator(&div), Err(Error::Divergent(_))));
        let zero = OperatorSpec::collocation(2.0, DigitBound::Infinite, 0);
        assert!(build_operator(&zero).is_err());
        assert!(build_operator(&OperatorSpec::collocation(0.5, DigitBound::Finite(3), 4)).is_ok());
    }

    #[test]
    fn bound_parsing_and_serde() {
        assert_eq!("inf".parse::<DigitBound>().unwrap(), DigitBound::Infinite);
        assert_eq!("7".parse::<DigitBound>().unwrap(), DigitBound::Finite(7));
        assert!("0".parse::<DigitBound>().is_err());
        assert_eq!(serde_json::to_string(&DigitBound::Infinite).unwrap(), "\"inf\"");
        let b: DigitBound = serde_json::from_str("12").unwrap();
        assert_eq!(b, DigitBound::Finite(12));
    }

    #[test]
    fn single_node_collocation_is_one_by_one() {
        let m = build_operator(&OperatorSpec::collocation(2.0, DigitBound::Infinite, 1)).unwrap();
        assert_eq!(m.dim(), 1);
        // sum_k (1/2 + k)^-2 = zeta(2, 3/2) = pi^2/2 - 4
        let want = std::f64::consts::PI.powi(2) / 2.0 - 4.0;
        assert!((m.entry(0, 0) - want).abs() < 1e-12);
        assert!((m.entry(0, 0) - 1.0).abs() < 0.1);
    }

    #[test]
    fn ulam_rows_hold_branch_weights() {
        let op = build_operator(&OperatorSpec::ulam(2.0, 2, 3)).unwrap();
        assert!(op.is_nonnegative());
        let Basis::Cylinders(g) = &op.basis else { panic!() };
        for a in 0..g.len() {
            let row: f64 = (0..op.dim()).map(|b| op.entry(a, b)).sum();
            let m = g.midpoint(a);
            assert!((row - (m + 1.0).powi(-2) - (m + 2.0).powi(-2)).abs() < 1e-15);
        }
    }

    #[test]
    fn coset_blocks_follow_branch_parity() {
        let op = build_operator(&OperatorSpec::ulam(1.5, 3, 2).with_cosets()).unwrap();
        let Basis::Cylinders(g) = &op.basis else { panic!() };
        for s in CosetPoint::ALL {
            for a in 0..g.len() {
                for k in 1..=3 {
                    let col = op.state(branch_act(k, s), g.preimage(k, a));
                    assert!(op.entry(op.state(s, a), col) > 0.0);
                }
            }
        }
        let dense = op.to_dense();
        let x: Vec<f64> = (0..op.dim()).map(|i| (i as f64).sin()).collect();
        let y = op.apply(&x);
        let yt = op.apply_transpose(&x);
        let n = op.dim();
        for i in 0..n {
            let d: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
            let dt: f64 = (0..n).map(|j| dense[j * n + i] * x[j]).sum();
            assert!((d - y[i]).abs() < 1e-14 && (dt - yt[i]).abs() < 1e-14);
        }
    }
}
