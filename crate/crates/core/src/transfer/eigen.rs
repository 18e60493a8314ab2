use serde::Serialize;

use super::{Basis, OperatorMatrix};
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 20_000;

/// Leading eigendata of an operator matrix.
///
/// The left vector is normalized to total mass 1. The right vector is
/// normalized to integral 1: against the quadrature rule for collocation,
/// against the left vector for Ulam cells (whose Lebesgue length vanishes on
/// the Cantor set), and to unit sum for raw matrices.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub eta: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// `max(|A r - eta r|, |l A - eta l|)` relative to `eta` and the vector sizes.
    pub residual: f64,
    pub iterations: usize,
}

impl SpectralResult {
    pub fn pressure(&self) -> f64 {
        self.eta.ln()
    }

    pub fn min_right(&self) -> f64 {
        self.right.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_left(&self) -> f64 {
        self.left.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Power {
    value: f64,
    vector: Vec<f64>,
    residual: f64,
    iterations: usize,
}

/// Power iteration with per-step normalization; stops once the relative
/// residual `|A v - lambda v| / |lambda|` (unit `v`) is at most `tol`.
fn power_iteration(apply: impl Fn(&[f64]) -> Vec<f64>, start: Vec<f64>, tol: f64) -> Result<Power> {
    let mut v = start;
    let n = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n);
    let mut residual = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let w = apply(&v);
        let lambda = dot(&v, &w);
        residual = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt() / lambda.abs().max(1e-300);
        let nw = norm2(&w);
        if nw == 0.0 || !nw.is_finite() {
            return Err(Error::NoConvergence { iterations: it, residual: f64::NAN });
        }
        if residual <= tol {
            return Ok(Power { value: lambda, vector: v, residual, iterations: it });
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual })
}

fn orient(v: &mut [f64]) {
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Leading eigenvalue with left and right eigenvectors, by power iteration.
pub fn leading_eigen(m: &OperatorMatrix, tol: f64) -> Result<SpectralResult> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let n = m.dim();
    let start = vec![1.0; n];
    let right = power_iteration(|v| m.apply(v), start.clone(), tol)?;
    let left = power_iteration(|v| m.apply_transpose(v), start, tol)?;
    if right.value <= 0.0 {
        return Err(Error::Invalid(format!("leading eigenvalue {} is not positive", right.value)));
    }
    let (mut r, mut l) = (right.vector, left.vector);
    orient(&mut r);
    orient(&mut l);
    let mass: f64 = l.iter().sum();
    l.iter_mut().for_each(|x| *x /= mass);
    let scale = match &m.basis {
        Basis::Chebyshev(c) => {
            let w = c.quadrature();
            r.chunks(m.cells()).map(|sheet| dot(sheet, &w)).sum::<f64>()
        }
        Basis::Cylinders(_) => dot(&l, &r),
        Basis::Raw => r.iter().sum(),
    };
    r.iter_mut().for_each(|x| *x /= scale);
    Ok(SpectralResult {
        eta: right.value,
        right: r,
        left: l,
        residual: right.residual.max(left.residual),
        iterations: right.iterations.max(left.iterations),
    })
}

/// The next eigenvalue after `lead`, by power iteration on the deflated
/// operator `A - eta r l^T / (l . r)`. Returns the signed eigenvalue.
pub fn subdominant_eigenvalue(m: &OperatorMatrix, lead: &SpectralResult, tol: f64) -> Result<f64> {
    let lr = dot(&lead.left, &lead.right);
    let deflated = |v: &[f64]| {
        let c = lead.eta * dot(&lead.left, v) / lr;
        m.apply(v).iter().zip(&lead.right).map(|(a, r)| a - c * r).collect::<Vec<_>>()
    };
    let start: Vec<f64> = (0..m.dim()).map(|i| 1.0 + 0.5 * (i as f64 * 0.7).cos()).collect();
    Ok(power_iteration(deflated, start, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix() {
        let n = 5;
        let mut a = vec![0.0; n * n];
        (0..n).for_each(|i| a[i * n + i] = 1.0);
        let r = leading_eigen(&OperatorMatrix::from_dense(n, a).unwrap(), 1e-12).unwrap();
        assert!((r.eta - 1.0).abs() < 1e-15);
        assert!(r.right.iter().chain(&r.left).all(|&x| (x - 0.2).abs() < 1e-15));
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn two_by_two_against_closed_form() {
        // eigenvalues of (2, 1; 1, 3) are (5 +- sqrt 5) / 2
        let m = OperatorMatrix::from_dense(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let r = leading_eigen(&m, 1e-13).unwrap();
        assert!((r.eta - (5.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let s = subdominant_eigenvalue(&m, &r, 1e-12).unwrap();
        assert!((s - (5.0 - 5f64.sqrt()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn negative_subdominant_eigenvalue() {
        // eigenvalues 1 and -1/2 of a non-symmetric 2x2
        let m = OperatorMatrix::from_dense(2, vec![0.5, 0.5, 1.0, 0.0]).unwrap();
        let r = leading_eigen(&m, 1e-13).unwrap();
        assert!((r.eta - 1.0).abs() < 1e-12);
        let s = subdominant_eigenvalue(&m, &r, 1e-12).unwrap();
        assert!((s + 0.5).abs() < 1e-10);
    }

    #[test]
    fn rotation_does_not_converge() {
        let m = OperatorMatrix::from_dense(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let start_breaks_symmetry = power_iteration(|v| m.apply(v), vec![1.0, 0.0], 1e-12);
        assert!(matches!(start_breaks_symmetry, Err(Error::NoConvergence { .. })));
    }
}
