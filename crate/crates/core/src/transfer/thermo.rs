//! Pressure, invariant density, Hausdorff dimension and Lyapunov exponents
//! from the leading eigenvalue.

use std::io::Write;

use serde::Serialize;

use super::{build_operator, leading_eigen, Basis, DigitBound, OperatorMatrix, OperatorSpec, Scheme, SpectralResult};
use crate::cfrac::CosetPoint;
use crate::error::{Error, Result};

/// Default collocation size, and the eigen-solver tolerance used internally.
pub const DEFAULT_NODES: usize = 32;
pub const EIGEN_TOL: f64 = 1e-13;

/// Spectral summary as exported to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub beta: f64,
    #[serde(rename = "N")]
    pub n: DigitBound,
    pub scheme: Scheme,
    pub resolution: usize,
    pub coset_aware: bool,
    pub eta: f64,
    pub pressure: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl SpectralReport {
    pub fn new(spec: &OperatorSpec, r: &SpectralResult) -> Self {
        SpectralReport {
            beta: spec.beta,
            n: spec.bound,
            scheme: spec.scheme,
            resolution: spec.resolution,
            coset_aware: spec.coset_aware,
            eta: r.eta,
            pressure: r.pressure(),
            residual: r.residual,
            iterations: r.iterations,
        }
    }
}

/// Writes `(x, f)` samples, one `f` column per sheet, sorted by `x`.
pub fn write_eigenfunction_csv<W: Write>(m: &OperatorMatrix, values: &[f64], out: W) -> Result<()> {
    let xs = m.sample_points();
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut w = csv::Writer::from_writer(out);
    if m.sheets() == 1 {
        w.write_record(["x", "f"])?;
    } else {
        w.write_record(["x", "f_0", "f_1", "f_inf"])?;
    }
    for i in order {
        let mut rec = vec![format!("{:.17e}", xs[i])];
        for s in &CosetPoint::ALL[..m.sheets()] {
            rec.push(format!("{:.17e}", values[m.state(*s, i)]));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Default discretization: collocation with 32 nodes.
pub fn default_spec(beta: f64, bound: DigitBound) -> OperatorSpec {
    OperatorSpec::collocation(beta, bound, DEFAULT_NODES)
}

/// `P(beta) = log eta_beta` for the default discretization.
pub fn pressure(beta: f64, bound: DigitBound) -> Result<f64> {
    pressure_with(&default_spec(beta, bound))
}

pub fn pressure_with(spec: &OperatorSpec) -> Result<f64> {
    let m = build_operator(spec)?;
    Ok(leading_eigen(&m, EIGEN_TOL)?.pressure())
}

/// The Gauss density `1 / (3 log 2 (1 + x))` on each sheet, checked against
/// the coset-aware collocation operator at `beta = 2`.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantDensity {
    pub nodes: Vec<f64>,
    /// Density samples per sheet, sheets in order `0, 1, inf`.
    pub density: [Vec<f64>; 3],
    pub sheet_masses: [f64; 3],
    /// `max |L f - f|` over all collocation states.
    pub sup_residual: f64,
    /// `(sum_s int (L f - f)^2)^{1/2}` by quadrature.
    pub l2_residual: f64,
}

pub fn gauss_density(x: f64) -> f64 {
    1.0 / (3.0 * std::f64::consts::LN_2 * (1.0 + x))
}

pub fn invariant_density_full(m: usize) -> Result<InvariantDensity> {
    let spec = OperatorSpec::collocation(2.0, DigitBound::Infinite, m).with_cosets();
    let op = build_operator(&spec)?;
    let Basis::Chebyshev(cheb) = &op.basis else { unreachable!() };
    let nodes = cheb.nodes.clone();
    let quad = cheb.quadrature();
    let sheet: Vec<f64> = nodes.iter().map(|&x| gauss_density(x)).collect();
    let f: Vec<f64> = sheet.iter().cycle().take(3 * m).copied().collect();
    let lf = op.apply(&f);
    let diff: Vec<f64> = lf.iter().zip(&f).map(|(a, b)| a - b).collect();
    let sup_residual = diff.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    let l2_residual = diff
        .chunks(m)
        .map(|d| d.iter().zip(&quad).map(|(d, w)| w * d * d).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let mass: f64 = sheet.iter().zip(&quad).map(|(f, w)| f * w).sum();
    Ok(InvariantDensity {
        nodes,
        density: [sheet.clone(), sheet.clone(), sheet],
        sheet_masses: [mass; 3],
        sup_residual,
        l2_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionResult {
    #[serde(rename = "N")]
    pub n: u64,
    pub dim: f64,
    /// `P(2 dim)` at the returned root.
    pub pressure: f64,
    pub iterations: usize,
    pub scheme: Scheme,
    pub resolution: usize,
    pub tol: f64,
}

const BRACKET: (f64, f64) = (0.1, 1.0);
const BISECTION_WIDTH: f64 = 1e-4;

/// Solves `P(2s) = 0` for `s` with the default discretization.
pub fn hausdorff_dim_spectral(n: u64, tol: f64) -> Result<DimensionResult> {
    hausdorff_dim_with(&default_spec(2.0, DigitBound::Finite(n)), tol)
}

/// Solves `P(2s) = 0` using `template` with its `beta` replaced by `2s`:
/// bisection down to width `1e-4`, then safeguarded secant steps.
pub fn hausdorff_dim_with(template: &OperatorSpec, tol: f64) -> Result<DimensionResult> {
    let n = match template.bound {
        DigitBound::Finite(n) if n >= 2 => n,
        _ => return Err(Error::Invalid("Hausdorff dimension needs a finite digit bound N >= 2".into())),
    };
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let p = |s: f64| pressure_with(&template.with_beta(2.0 * s));
    let (mut lo, mut hi) = BRACKET;
    let (mut p_lo, mut p_hi) = (p(lo)?, p(hi)?);
    if !(p_lo > 0.0 && p_hi < 0.0) {
        return Err(Error::Bracket { lo, hi, p_lo, p_hi });
    }
    let mut iterations = 0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let pm = p(mid)?;
        iterations += 1;
        if pm > 0.0 {
            (lo, p_lo) = (mid, pm);
        } else {
            (hi, p_hi) = (mid, pm);
        }
    }
    // secant from the bracket ends, falling back to bisection if it leaves the bracket
    let (mut a, mut pa, mut b, mut pb) = (lo, p_lo, hi, p_hi);
    for _ in 0..60 {
        iterations += 1;
        let mut c = b - pb * (b - a) / (pb - pa);
        if !(c > lo && c < hi) {
            c = 0.5 * (lo + hi);
        }
        let pc = p(c)?;
        if pc > 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        let step = (c - b).abs();
        (a, pa, b, pb) = (b, pb, c, pc);
        if step <= tol || pc == 0.0 || hi - lo <= tol {
            return Ok(DimensionResult {
                n,
                dim: c,
                pressure: pc,
                iterations,
                scheme: template.scheme,
                resolution: template.resolution,
                tol,
            });
        }
    }
    Err(Error::NoConvergence { iterations, residual: pb.abs() })
}

/// Dimension estimates at increasing resolutions.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementTable {
    #[serde(rename = "N")]
    pub n: u64,
    pub scheme: Scheme,
    pub rows: Vec<RefinementRow>,
    /// Aitken extrapolation of the last three rows.
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementRow {
    pub resolution: usize,
    pub dim: f64,
    /// Difference from the previous row.
    pub delta: Option<f64>,
    /// Ratio of the previous difference to this one.
    pub ratio: Option<f64>,
}

pub fn dimension_refinement(template: &OperatorSpec, resolutions: &[usize], tol: f64) -> Result<RefinementTable> {
    let n = template.bound.finite().unwrap_or(0);
    let mut rows: Vec<RefinementRow> = Vec::new();
    for &res in resolutions {
        let d = hausdorff_dim_with(&OperatorSpec { resolution: res, ..*template }, tol)?.dim;
        let delta = rows.last().map(|r| d - r.dim);
        let ratio = match (rows.last().and_then(|r| r.delta), delta) {
            (Some(prev), Some(cur)) if cur != 0.0 => Some((prev / cur).abs()),
            _ => None,
        };
        rows.push(RefinementRow { resolution: res, dim: d, delta, ratio });
    }
    let extrapolated = match rows.as_slice() {
        [.., a, b, c] => {
            let (d1, d2) = (b.dim - a.dim, c.dim - b.dim);
            if d2 - d1 != 0.0 {
                Some(c.dim - d2 * d2 / (d2 - d1))
            } else {
                Some(c.dim)
            }
        }
        _ => None,
    };
    Ok(RefinementTable { n, scheme: template.scheme, rows, extrapolated })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HensleyEstimate {
    #[serde(rename = "N")]
    pub n: u64,
    pub value: f64,
    /// The leading correction `6/(pi^2 N)` is below 0.1.
    pub in_asymptotic_regime: bool,
}

/// `1 - 6/(pi^2 N) - 72 log N / (pi^4 N^2)`.
pub fn hensley_dim_asymptotic(n: u64) -> Result<HensleyEstimate> {
    if n < 2 {
        return Err(Error::Invalid("N must be >= 2".into()));
    }
    let pi2 = std::f64::consts::PI.powi(2);
    let nf = n as f64;
    let first = 6.0 / (pi2 * nf);
    let value = 1.0 - first - 72.0 * nf.ln() / (pi2 * pi2 * nf * nf);
    Ok(HensleyEstimate { n, value, in_asymptotic_regime: first < 0.1 })
}

#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpectral {
    #[serde(rename = "N")]
    pub n: DigitBound,
    pub dim: f64,
    pub beta_star: f64,
    pub h: f64,
    /// `-2 P'(beta*)` by central differences at steps `h` and `h/2`.
    pub lambda_h: f64,
    pub lambda_half: f64,
    /// Richardson combination of the two.
    pub lambda: f64,
}

/// `lambda = |2 d log eta / d beta|` at `beta* = 2 dim_H(E_N)` (`beta* = 2`
/// for the unbounded shift), by Richardson-extrapolated central differences.
pub fn lyapunov_spectral(bound: DigitBound, h: f64) -> Result<LyapunovSpectral> {
    if !(h >= 1e-6 && h <= 0.1) {
        return Err(Error::Invalid(format!(
            "step h = {h} outside [1e-6, 0.1]: smaller steps drown in eigen-solver noise"
        )));
    }
    let dim = match bound {
        DigitBound::Finite(n) => hausdorff_dim_spectral(n, 1e-12)?.dim,
        DigitBound::Infinite => 1.0,
    };
    let beta = 2.0 * dim;
    let p = |b: f64| pressure(b, bound);
    let diff = |step: f64| -> Result<f64> { Ok((p(beta + step)? - p(beta - step)?) / (2.0 * step)) };
    let d_h = diff(h)?;
    let d_half = diff(h / 2.0)?;
    let rich = (4.0 * d_half - d_h) / 3.0;
    Ok(LyapunovSpectral {
        n: bound,
        dim,
        beta_star: beta,
        h,
        lambda_h: (2.0 * d_h).abs(),
        lambda_half: (2.0 * d_half).abs(),
        lambda: (2.0 * rich).abs(),
    })
}
