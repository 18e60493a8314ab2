//! Monte Carlo Lyapunov exponents and digit samplers.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Basis, OperatorMatrix, SpectralResult};
use crate::cfrac::{DenominatorGrowth, Digits, Endpoint};
use crate::error::{Error, Result};

/// Measure from which the starting point `x` is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartMeasure {
    Lebesgue,
    Gauss,
}

/// Draws the digits of a random `x` one at a time, exactly in distribution.
///
/// Given the first `n` digits, `x` is uniform on their cylinder, so
/// `t = T^n x` has density `(1 + r) / (1 + r t)^2` with `r = q_{n-1}/q_n`;
/// `t` is drawn by inverting this law and the next digit is `[1/t]`.
/// Starting from `r` distributed by the Gauss measure instead of `r = 0`
/// makes `x` Gauss distributed.
#[derive(Debug, Clone)]
pub struct DigitSampler {
    r: f64,
}

impl DigitSampler {
    pub fn new<R: Rng>(start: StartMeasure, rng: &mut R) -> Self {
        let r = match start {
            StartMeasure::Lebesgue => 0.0,
            StartMeasure::Gauss => 2f64.powf(rng.random::<f64>()) - 1.0,
        };
        DigitSampler { r }
    }

    pub fn next_digit<R: Rng>(&mut self, rng: &mut R) -> u64 {
        loop {
            let u: f64 = rng.random();
            let t = u / (1.0 + self.r - u * self.r);
            if t > 0.0 {
                let k = (1.0 / t).floor().max(1.0);
                let k = if k >= u64::MAX as f64 { u64::MAX } else { k as u64 };
                self.r = 1.0 / (k as f64 + self.r);
                return k;
            }
        }
    }
}

/// `n` digits of a Gauss-distributed point.
pub fn gauss_digits<R: Rng>(n: usize, rng: &mut R) -> Vec<u64> {
    let mut s = DigitSampler::new(StartMeasure::Gauss, rng);
    (0..n).map(|_| s.next_digit(rng)).collect()
}

/// Markov chain on depth-`d` cylinders approximating the Gibbs measure
/// `nu = f mu` of `L_{beta,N}`: from cell `b = [k, ...]` the chain moves to
/// `a` (the cells with `T b` as prefix) with probability `l_a L_{ab} / (eta l_b)`.
#[derive(Debug, Clone)]
pub struct GibbsChain {
    pub n: u64,
    pub depth: usize,
    pub beta: f64,
    /// Stationary law `l r`, normalized.
    pub stationary: Vec<f64>,
    /// Cumulative transition probabilities, `N` per cell.
    cumulative: Vec<f64>,
}

impl GibbsChain {
    pub fn new(op: &OperatorMatrix, eig: &SpectralResult) -> Result<Self> {
        let (Basis::Cylinders(grid), Some(spec)) = (&op.basis, op.spec) else {
            return Err(Error::Invalid("the Gibbs chain needs Ulam eigendata".into()));
        };
        if op.sheets() != 1 || eig.left.len() != op.dim() || eig.right.len() != op.dim() {
            return Err(Error::Invalid("eigendata does not match a scalar Ulam operator".into()));
        }
        let n = grid.n;
        let cells = grid.len();
        let nu = n as usize;
        let mut stationary: Vec<f64> = eig.left.iter().zip(&eig.right).map(|(l, r)| (l * r).max(0.0)).collect();
        let total: f64 = stationary.iter().sum();
        stationary.iter_mut().for_each(|p| *p /= total);
        let mut cumulative = vec![0.0; cells * nu];
        for b in 0..cells {
            let k = (b as u64 / n.pow(grid.depth as u32 - 1)) + 1;
            let base = (b * nu) % cells;
            let mut acc = 0.0;
            for j in 0..nu {
                let a = base + j;
                acc += eig.left[a].max(0.0) * (grid.midpoint(a) + k as f64).powf(-spec.beta);
                cumulative[b * nu + j] = acc;
            }
            cumulative[b * nu..(b + 1) * nu].iter_mut().for_each(|c| *c /= acc);
        }
        Ok(GibbsChain { n, depth: grid.depth, beta: spec.beta, stationary, cumulative })
    }

    /// Builds the chain at `beta = 2 dim_H(E_N)`, `dim` coming from a dimension solve.
    pub fn at_dimension(n: u64, depth: usize, dim: f64) -> Result<Self> {
        let op = super::build_operator(&super::OperatorSpec::ulam(2.0 * dim, n, depth))?;
        let eig = super::leading_eigen(&op, 1e-13)?;
        GibbsChain::new(&op, &eig)
    }

    fn first_digit(&self, cell: usize) -> u64 {
        cell as u64 / self.n.pow(self.depth as u32 - 1) + 1
    }

    fn pick(weights: impl Iterator<Item = f64>, u: f64) -> usize {
        let mut last = 0;
        for (i, c) in weights.enumerate() {
            last = i;
            if u < c {
                return i;
            }
        }
        last
    }

    pub fn sample<R: Rng>(&self, length: usize, rng: &mut R) -> Vec<u64> {
        let nu = self.n as usize;
        let cells = self.stationary.len();
        let mut acc = 0.0;
        let u: f64 = rng.random();
        let mut cell = Self::pick(
            self.stationary.iter().map(|p| {
                acc += p;
                acc
            }),
            u,
        );
        let mut out = Vec::with_capacity(length);
        for _ in 0..length {
            out.push(self.first_digit(cell));
            let j = Self::pick(self.cumulative[cell * nu..(cell + 1) * nu].iter().copied(), rng.random());
            cell = (cell * nu) % cells + j;
        }
        out
    }
}

/// A digit string from the Gibbs measure of `E_N`. The chain comes from the
/// dimension solve; without it there is nothing to sample from.
pub fn sample_en(chain: Option<&GibbsChain>, length: usize, seed: u64) -> Result<Digits> {
    let chain = chain.ok_or_else(|| {
        Error::Invalid("no eigendata for E_N: run the dimension solve and build a GibbsChain first".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Digits::new(chain.sample(length, &mut rng))
}

#[derive(Debug, Clone, Copy)]
pub enum LyapunovSource<'a> {
    /// A single point; needs at least `2 n` exact digits.
    Point(&'a Endpoint),
    Random(StartMeasure),
    Gibbs(&'a GibbsChain),
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovEstimate {
    /// Mean of `(2/n) log q_n`.
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub discarded: usize,
    pub n_digits: usize,
    /// Point sources only: `2 (log q_{2n} - log q_n) / n`, free of the `O(1/n)` offset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub differenced: Option<f64>,
}

/// `(2/n) log q_n` and, when `2n` digits are given, the differenced rate.
pub fn lyapunov_of_digits(digits: &[u64], n: usize) -> (f64, Option<f64>) {
    let mut g = DenominatorGrowth::new();
    for &k in &digits[..n] {
        g.push(k);
    }
    let ln_n = g.ln_q();
    let diff = (digits.len() >= 2 * n).then(|| {
        for &k in &digits[n..2 * n] {
            g.push(k);
        }
        2.0 * (g.ln_q() - ln_n) / n as f64
    });
    (2.0 * ln_n / n as f64, diff)
}

fn sample_stream(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

pub fn lyapunov_mc(source: LyapunovSource, n_digits: usize, n_samples: usize, seed: u64) -> Result<LyapunovEstimate> {
    if n_digits < 100 {
        return Err(Error::Invalid(format!("n_digits = {n_digits} must be >= 100")));
    }
    if n_samples == 0 {
        return Err(Error::Invalid("need at least one sample".into()));
    }
    if let LyapunovSource::Point(x) = source {
        let digits: Vec<u64> = x.stream().take(2 * n_digits).map(|it| it.digit).collect();
        if digits.len() < n_digits {
            warn!("expansion of {x} ended after {} digits; sample discarded", digits.len());
            return Err(Error::Cusp(format!("{x} has only {} digits, {n_digits} needed", digits.len())));
        }
        let (mean, differenced) = lyapunov_of_digits(&digits, n_digits);
        return Ok(LyapunovEstimate { mean, std_error: 0.0, samples: 1, discarded: 0, n_digits, differenced });
    }
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i);
            let digits = match source {
                LyapunovSource::Random(start) => {
                    let mut s = DigitSampler::new(start, &mut rng);
                    (0..n_digits).map(|_| s.next_digit(&mut rng)).collect::<Vec<_>>()
                }
                LyapunovSource::Gibbs(chain) => chain.sample(n_digits, &mut rng),
                LyapunovSource::Point(_) => unreachable!(),
            };
            lyapunov_of_digits(&digits, n_digits).0
        })
        .collect();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok(LyapunovEstimate { mean, std_error: (var / m).sqrt(), samples: values.len(), discarded: 0, n_digits, differenced: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::QuadraticSurd;

    #[test]
    fn lebesgue_sampler_matches_digit_law() {
        // P(k1 = k) = 1/k - 1/(k+1) for uniform x
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let k = DigitSampler::new(StartMeasure::Lebesgue, &mut rng).next_digit(&mut rng);
            if k <= 3 {
                counts[k as usize] += 1;
            }
        }
        for k in 1..=3 {
            let p = 1.0 / k as f64 - 1.0 / (k as f64 + 1.0);
            assert!((counts[k] as f64 / n as f64 - p).abs() < 4e-3);
        }
    }

    #[test]
    fn gauss_sampler_is_stationary() {
        // Gauss-Kuzmin: P(k_n = 1) = log2(4/3) at every position
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut first = 0;
        let mut fifth = 0;
        for _ in 0..n {
            let d = gauss_digits(5, &mut rng);
            first += (d[0] == 1) as usize;
            fifth += (d[4] == 1) as usize;
        }
        let p = (4f64 / 3.0).log2();
        assert!((first as f64 / n as f64 - p).abs() < 5e-3);
        assert!((fifth as f64 / n as f64 - p).abs() < 5e-3);
    }

    #[test]
    fn golden_and_silver_rates() {
        let g = Endpoint::Surd(QuadraticSurd::golden());
        let e = lyapunov_mc(LyapunovSource::Point(&g), 1000, 1, 0).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e.differenced.unwrap() - 2.0 * phi.ln()).abs() < 1e-9);
        assert!((e.mean - 2.0 * phi.ln()).abs() < 2e-3);
        let s = Endpoint::Surd(QuadraticSurd::silver());
        let e = lyapunov_mc(LyapunovSource::Point(&s), 1000, 1, 0).unwrap();
        assert!((e.differenced.unwrap() - 2.0 * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-9);
    }

    #[test]
    fn rational_point_is_rejected() {
        let x = Endpoint::Float(0.375);
        assert!(lyapunov_mc(LyapunovSource::Point(&x), 100, 1, 0).is_err());
        assert!(lyapunov_mc(LyapunovSource::Random(StartMeasure::Lebesgue), 99, 1, 0).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = lyapunov_mc(LyapunovSource::Random(StartMeasure::Gauss), 200, 16, 42).unwrap();
        let b = lyapunov_mc(LyapunovSource::Random(StartMeasure::Gauss), 200, 16, 42).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert!(sample_en(None, 10, 0).is_err());
    }

    #[test]
    fn gibbs_chain_emits_bounded_digits_with_cylinder_frequencies() {
        let dim = crate::transfer::hausdorff_dim_spectral(2, 1e-12).unwrap().dim;
        let chain = GibbsChain::at_dimension(2, 10, dim).unwrap();
        let d = sample_en(Some(&chain), 200_000, 3).unwrap();
        assert!(d.as_slice().iter().all(|&k| (1..=2).contains(&k)));
        let freq = d.as_slice().iter().filter(|&&k| k == 1).count() as f64 / d.len() as f64;
        let mass: f64 = chain.stationary[..chain.stationary.len() / 2].iter().sum();
        assert!((freq - mass).abs() < 1e-2, "{freq} vs {mass}");
    }
}
