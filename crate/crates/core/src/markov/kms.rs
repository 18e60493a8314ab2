//! KMS data: the admissibility bound, the oscillation of the potential
//! `h = -beta/2 log |T'|`, and Gibbs cylinder masses from the coset-aware
//! Ulam eigenmeasure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{build_an, spectral_radius};
use crate::cfrac::{branch_act, CosetPoint, QuadraticSurd};
use crate::error::{Error, Result};
use crate::transfer::{build_operator, leading_eigen, Basis, CylinderGrid, OperatorMatrix, OperatorSpec, SpectralResult};

/// `2 log r(A_N) / log(N + 1)`.
pub fn kms_beta_bound(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Invalid("N must be >= 2".into()));
    }
    let r = spectral_radius(&build_an(n)?.matrix)?.value();
    Ok(2.0 * r.ln() / ((n + 1) as f64).ln())
}

#[derive(Debug, Clone, Serialize)]
pub struct Var0 {
    /// The closed form `(beta/2) log(N + 1)`.
    pub closed_form: f64,
    /// `beta (log x_max - log x_min)`, the oscillation of `h(x) = beta log x` on `E_N`.
    pub exact_value: f64,
    /// `[N, 1, N, 1, ...]`.
    pub x_min: f64,
    /// `[1, N, 1, N, ...]`.
    pub x_max: f64,
}

pub fn var0_h(beta: f64, n: u64) -> Result<Var0> {
    if !(beta > 0.0) || n < 2 {
        return Err(Error::Invalid("var0 needs beta > 0 and N >= 2".into()));
    }
    let x_min = QuadraticSurd::from_period(&[n, 1])?.to_f64();
    let x_max = QuadraticSurd::from_period(&[1, n])?.to_f64();
    Ok(Var0 {
        closed_form: beta / 2.0 * ((n + 1) as f64).ln(),
        exact_value: beta * (x_max.ln() - x_min.ln()),
        x_min,
        x_max,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KmsSpec {
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: u64,
    /// `u = P(beta) = log eta_beta`.
    pub u: f64,
    pub bound: f64,
    pub admissible: bool,
}

impl KmsSpec {
    /// Potential `h(x) = -beta/2 log |T'(x)| = beta log x`.
    pub fn h(&self, x: f64) -> f64 {
        self.beta * x.ln()
    }
}

/// A KMS spec with the eigendata of the coset-aware Ulam operator behind it.
#[derive(Debug, Clone)]
pub struct KmsModel {
    pub spec: KmsSpec,
    pub operator: OperatorMatrix,
    pub eigen: SpectralResult,
}

pub const EIGEN_TOL: f64 = 1e-13;

impl KmsModel {
    /// Fails with an inadmissibility error when `beta` is at or above the bound.
    pub fn new(beta: f64, n: u64, depth: usize) -> Result<Self> {
        let bound = kms_beta_bound(n)?;
        if !(beta < bound) {
            return Err(Error::Inadmissible { beta, n, bound });
        }
        Self::unchecked(beta, n, depth, bound)
    }

    fn unchecked(beta: f64, n: u64, depth: usize, bound: f64) -> Result<Self> {
        let operator = build_operator(&OperatorSpec::ulam(beta, n, depth).with_cosets())?;
        let eigen = leading_eigen(&operator, EIGEN_TOL)?;
        let spec = KmsSpec { beta, n, u: eigen.pressure(), bound, admissible: beta < bound };
        Ok(KmsModel { spec, operator, eigen })
    }

    pub fn grid(&self) -> &CylinderGrid {
        match &self.operator.basis {
            Basis::Cylinders(g) => g,
            _ => unreachable!("KMS models are built on cylinders"),
        }
    }

    pub fn depth(&self) -> usize {
        self.grid().depth
    }

    fn mass_of(&self, weights: &[f64], w: &CylinderWord) -> Result<f64> {
        let range = self.grid().prefix_range(&w.digits)?;
        let base = self.operator.state(w.sheet, 0);
        Ok(weights[base + range.start..base + range.end].iter().sum())
    }

    /// The invariant measure `nu = f mu` on states, normalized.
    pub fn invariant_weights(&self) -> Vec<f64> {
        let mut nu: Vec<f64> = self.eigen.left.iter().zip(&self.eigen.right).map(|(l, r)| l * r).collect();
        let total: f64 = nu.iter().sum();
        nu.iter_mut().for_each(|v| *v /= total);
        nu
    }
}

/// A cylinder `{x = [k1, ..., km, ...]} x {t}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CylinderWord {
    pub digits: Vec<u64>,
    pub sheet: CosetPoint,
}

impl CylinderWord {
    pub fn new(digits: Vec<u64>, sheet: CosetPoint, n: u64) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Invalid("cylinder word must be nonempty".into()));
        }
        if let Some(k) = digits.iter().find(|&&k| k < 1 || k > n) {
            return Err(Error::Domain(format!("digit {k} outside 1..={n}")));
        }
        let w = CylinderWord { digits, sheet };
        debug_assert!(w.is_admissible(n));
        Ok(w)
    }

    /// Sheets of a path through `A_N` spelling the word from `(k_1, t)`:
    /// the edge `(k, t) -> (l, s)` needs `(0, 1; 1, l) . s = t`.
    pub fn sheet_path(&self) -> Vec<CosetPoint> {
        let mut path = vec![self.sheet];
        for &k in &self.digits[1..] {
            path.push(crate::cfrac::shift_act(k, *path.last().unwrap()));
        }
        path
    }

    /// Every consecutive pair of states is an edge of `A_N`.
    pub fn is_admissible(&self, n: u64) -> bool {
        let Ok(a) = build_an(n) else { return false };
        let path = self.sheet_path();
        self.digits.windows(2).zip(path.windows(2)).all(|(k, t)| {
            let i = 3 * (k[0] - 1) as usize + t[0].index();
            let j = 3 * (k[1] - 1) as usize + t[1].index();
            a.matrix.get(i, j)
        })
    }
}

/// Eigenmeasure mass of a cylinder, with the eigenmeasure normalized to 1.
pub fn gibbs_cylinder_mass(w: &CylinderWord, model: &KmsModel) -> Result<f64> {
    if !model.spec.admissible {
        return Err(Error::Inadmissible { beta: model.spec.beta, n: model.spec.n, bound: model.spec.bound });
    }
    if w.digits.len() > model.depth() {
        return Err(Error::Invalid(format!(
            "word of length {} needs resolution >= {}, model has depth {}",
            w.digits.len(),
            w.digits.len(),
            model.depth()
        )));
    }
    model.mass_of(&model.eigen.left, w)
}

/// All words of length `k` on all sheets, digits varying fastest at the end.
pub fn words(n: u64, k: usize) -> Vec<CylinderWord> {
    let mut out = Vec::new();
    for sheet in CosetPoint::ALL {
        let mut w = vec![1u64; k];
        loop {
            out.push(CylinderWord { digits: w.clone(), sheet });
            let Some(pos) = w.iter().rposition(|&d| d < n) else { break };
            w[pos] += 1;
            w[pos + 1..].iter_mut().for_each(|d| *d = 1);
        }
    }
    out
}

/// Iterates `phi_k = e^{-u} L^* phi_{k-1}` from `start`, renormalizing to
/// total mass 1 at each level. Returns the limit and the normalizers.
fn eigenmeasure_iteration(model: &KmsModel, start: Vec<f64>, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let scale = (-model.spec.u).exp();
    let mut phi = start;
    let total: f64 = phi.iter().sum();
    phi.iter_mut().for_each(|v| *v /= total);
    let mut normalizers = Vec::new();
    for _ in 0..10_000 {
        let mut next = model.operator.apply_transpose(&phi);
        let c: f64 = next.iter().sum::<f64>() * scale;
        normalizers.push(c);
        next.iter_mut().for_each(|v| *v *= scale / c);
        let change = next.iter().zip(&phi).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        phi = next;
        if change <= tol {
            return Ok((phi, normalizers));
        }
    }
    Err(Error::NoConvergence { iterations: 10_000, residual: f64::NAN })
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteLevelState {
    pub level: usize,
    pub words: Vec<CylinderWord>,
    pub weights: Vec<f64>,
    /// Total mass of `e^{-u} L^* phi_{k-1}` before renormalizing, per iteration.
    pub normalizers: Vec<f64>,
}

/// The diagonal of the level-`k` state: weights of the words of length `k`,
/// from the fixed point of the `phi_k` recursion.
pub fn finite_level_state(k: usize, model: &KmsModel) -> Result<FiniteLevelState> {
    if !model.spec.admissible {
        return Err(Error::Inadmissible { beta: model.spec.beta, n: model.spec.n, bound: model.spec.bound });
    }
    if k < 1 || k > model.depth() {
        return Err(Error::Invalid(format!("level {k} outside 1..={}", model.depth())));
    }
    let start = vec![1.0; model.operator.dim()];
    let (phi, normalizers) = eigenmeasure_iteration(model, start, 1e-15)?;
    let words = words(model.spec.n, k);
    let weights = words.iter().map(|w| model.mass_of(&phi, w)).collect::<Result<Vec<_>>>()?;
    Ok(FiniteLevelState { level: k, words, weights, normalizers })
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessProbe {
    pub starts: usize,
    pub level: usize,
    /// Largest disagreement of any cylinder weight between two starts.
    pub max_deviation: f64,
}

/// Runs the eigenmeasure iteration from random positive starts and compares
/// the level-`k` cylinder weights.
pub fn uniqueness_probe(model: &KmsModel, starts: usize, level: usize, seed: u64) -> Result<UniquenessProbe> {
    if level > model.depth() {
        return Err(Error::Invalid(format!("level {level} deeper than the model depth {}", model.depth())));
    }
    let ws = words(model.spec.n, level);
    let mut runs = Vec::with_capacity(starts);
    for i in 0..starts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let start: Vec<f64> = (0..model.operator.dim()).map(|_| rng.random::<f64>() + 1e-3).collect();
        let (phi, _) = eigenmeasure_iteration(model, start, 1e-15)?;
        runs.push(ws.iter().map(|w| model.mass_of(&phi, w)).collect::<Result<Vec<_>>>()?);
    }
    let mut max_deviation = 0.0f64;
    for r in &runs[1..] {
        for (a, b) in r.iter().zip(&runs[0]) {
            max_deviation = max_deviation.max((a - b).abs());
        }
    }
    Ok(UniquenessProbe { starts, level, max_deviation })
}

/// `max_B |nu(T^{-1} B) - nu(B)|` over the cylinders `B` of length `level`,
/// where `T^{-1}(B x {t}) = U_k [k B] x {(0, 1; 1, k) . t}`.
pub fn invariance_defect(model: &KmsModel, level: usize) -> Result<f64> {
    if level + 1 > model.depth() {
        return Err(Error::Invalid(format!("level {level} needs depth >= {}", level + 1)));
    }
    let nu = model.invariant_weights();
    let mut worst = 0.0f64;
    for b in words(model.spec.n, level) {
        let direct = model.mass_of(&nu, &b)?;
        let mut pulled = 0.0;
        for k in 1..=model.spec.n {
            let mut digits = vec![k];
            digits.extend_from_slice(&b.digits);
            pulled += model.mass_of(&nu, &CylinderWord { digits, sheet: branch_act(k, b.sheet) })?;
        }
        worst = worst.max((pulled - direct).abs());
    }
    Ok(worst)
}

/// A model at any `beta`, bypassing the admissibility check; for diagnostics.
pub fn unchecked_model(beta: f64, n: u64, depth: usize) -> Result<KmsModel> {
    KmsModel::unchecked(beta, n, depth, kms_beta_bound(n)?)
}
