//! Polynomial collocation of the transfer operator at Chebyshev-Lobatto
//! points of [0, 1]. The branch sum is applied to the interpolant exactly for
//! `k <= K` and through a Taylor expansion at 0 plus Hurwitz zeta sums beyond.

use rayon::prelude::*;

use super::zeta::hurwitz_zeta;

/// Branches summed explicitly for the unbounded operator.
pub const DIRECT_BRANCHES: u64 = 4096;
const TAIL_ORDER: usize = 5;

#[derive(Debug, Clone)]
pub struct Chebyshev {
    pub nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Chebyshev {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        if m == 1 {
            return Chebyshev { nodes: vec![0.5], weights: vec![1.0] };
        }
        let n = (m - 1) as f64;
        let nodes = (0..m).map(|j| (1.0 - (j as f64 * std::f64::consts::PI / n).cos()) / 2.0).collect();
        let weights = (0..m)
            .map(|j| {
                let w = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == m - 1 { w / 2.0 } else { w }
            })
            .collect();
        Chebyshev { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of all Lagrange basis polynomials at `z`, added into `out` with factor `c`.
    fn add_basis(&self, z: f64, c: f64, out: &mut [f64]) {
        let m = self.len();
        if m == 1 {
            out[0] += c;
            return;
        }
        let mut denom = 0.0;
        for j in 0..m {
            let d = z - self.nodes[j];
            if d == 0.0 {
                out[j] += c;
                return;
            }
            denom += self.weights[j] / d;
        }
        for j in 0..m {
            out[j] += c * self.weights[j] / (z - self.nodes[j]) / denom;
        }
    }

    /// Evaluates the interpolant through `values` at `z`.
    pub fn interpolate(&self, values: &[f64], z: f64) -> f64 {
        let mut basis = vec![0.0; self.len()];
        self.add_basis(z, 1.0, &mut basis);
        basis.iter().zip(values).map(|(b, v)| b * v).sum()
    }

    /// Clenshaw-Curtis weights: `sum_j w_j f(y_j)` integrates the interpolant over [0, 1].
    pub fn quadrature(&self) -> Vec<f64> {
        let m = self.len();
        if m == 1 {
            return vec![1.0];
        }
        let n = m - 1;
        let nf = n as f64;
        let theta = |j: usize| j as f64 * std::f64::consts::PI / nf;
        let mut w = vec![0.0; m];
        let end = if n % 2 == 0 { 1.0 / (nf * nf - 1.0) } else { 1.0 / (nf * nf) };
        w[0] = end;
        w[n] = end;
        for (j, wj) in w.iter_mut().enumerate().take(n).skip(1) {
            let mut v = 1.0;
            for k in 1..=(n - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta(j)).cos() / (4.0 * kf * kf - 1.0);
            }
            if n % 2 == 0 {
                v -= (nf * theta(j)).cos() / (nf * nf - 1.0);
            }
            *wj = 2.0 * v / nf;
        }
        // map [-1, 1] to [0, 1]
        w.iter().map(|x| x / 2.0).collect()
    }

    /// Differentiation matrix on the nodes, row-major.
    fn differentiation(&self) -> Vec<f64> {
        let m = self.len();
        let mut d = vec![0.0; m * m];
        if m == 1 {
            return d;
        }
        for i in 0..m {
            let mut diag = 0.0;
            for j in 0..m {
                if i != j {
                    let v = self.weights[j] / self.weights[i] / (self.nodes[i] - self.nodes[j]);
                    d[i * m + j] = v;
                    diag -= v;
                }
            }
            d[i * m + i] = diag;
        }
        d
    }

    /// `c[r][j] = l_j^{(r)}(0) / r!` for `r < TAIL_ORDER`.
    fn taylor_at_zero(&self) -> Vec<Vec<f64>> {
        let m = self.len();
        let mut rows = Vec::with_capacity(TAIL_ORDER);
        let mut row = vec![0.0; m];
        self.add_basis(0.0, 1.0, &mut row);
        rows.push(row.clone());
        let d = self.differentiation();
        // (row * D) gives the derivative functional of the next order at 0
        let mut fact = 1.0;
        for r in 1..TAIL_ORDER {
            let mut next = vec![0.0; m];
            for (i, ri) in row.iter().enumerate() {
                for j in 0..m {
                    next[j] += ri * d[i * m + j];
                }
            }
            row = next;
            fact *= r as f64;
            rows.push(row.iter().map(|v| v / fact).collect());
        }
        rows
    }
}

/// Which branches a block sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    fn admits(self, k: u64) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => k % 2 == 0,
            Parity::Odd => k % 2 == 1,
        }
    }
}

/// `sum_{k > after, k admitted} (x + k)^{-s}`.
fn tail_sum(s: f64, x: f64, after: u64, parity: Parity) -> f64 {
    match parity {
        Parity::All => hurwitz_zeta(s, x + after as f64 + 1.0),
        _ => {
            let mut k0 = after + 1;
            if !parity.admits(k0) {
                k0 += 1;
            }
            2f64.powf(-s) * hurwitz_zeta(s, (x + k0 as f64) / 2.0)
        }
    }
}

/// Row-major `M x M` matrix of `f -> sum_{k admitted, k <= n} (x+k)^{-beta} f(1/(x+k))`
/// on the interpolation basis. `n = None` is the unbounded sum.
pub fn branch_block(cheb: &Chebyshev, beta: f64, n: Option<u64>, parity: Parity) -> Vec<f64> {
    let m = cheb.len();
    let direct = n.unwrap_or(DIRECT_BRANCHES);
    let taylor = if n.is_none() { Some(cheb.taylor_at_zero()) } else { None };
    let rows: Vec<Vec<f64>> = cheb
        .nodes
        .par_iter()
        .map(|&x| {
            let mut row = vec![0.0; m];
            for k in (1..=direct).filter(|&k| parity.admits(k)) {
                let z = x + k as f64;
                cheb.add_basis(1.0 / z, z.powf(-beta), &mut row);
            }
            if let Some(taylor) = &taylor {
                for (r, coeffs) in taylor.iter().enumerate() {
                    let t = tail_sum(beta + r as f64, x, direct, parity);
                    for (out, c) in row.iter_mut().zip(coeffs) {
                        *out += c * t;
                    }
                }
            }
            row
        })
        .collect();
    rows.concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_on_polynomials() {
        let c = Chebyshev::new(8);
        let f = |x: f64| 3.0 * x.powi(5) - x * x + 0.25;
        let v: Vec<f64> = c.nodes.iter().map(|&x| f(x)).collect();
        for z in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!((c.interpolate(&v, z) - f(z)).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_integrates_log_density() {
        let c = Chebyshev::new(32);
        let w = c.quadrature();
        let integral: f64 = c.nodes.iter().zip(&w).map(|(x, w)| w / (1.0 + x)).sum();
        assert!((integral - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn taylor_coefficients_of_a_polynomial() {
        // p(x) = 1 + 2x - x^3 has Taylor coefficients 1, 2, 0, -1, 0
        let c = Chebyshev::new(10);
        let v: Vec<f64> = c.nodes.iter().map(|&x| 1.0 + 2.0 * x - x.powi(3)).collect();
        let t = c.taylor_at_zero();
        let coeff: Vec<f64> = t.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
        for (got, want) in coeff.iter().zip([1.0, 2.0, 0.0, -1.0, 0.0]) {
            assert!((got - want).abs() < 1e-9, "{coeff:?}");
        }
    }

    #[test]
    fn parity_tails_add_up() {
        for &(s, x) in &[(2.0, 0.0), (2.5, 0.7), (6.0, 1.0)] {
            let all = tail_sum(s, x, 100, Parity::All);
            let split = tail_sum(s, x, 100, Parity::Even) + tail_sum(s, x, 100, Parity::Odd);
            assert!((all - split).abs() < 1e-15 * all.max(1e-300) * 10.0);
        }
    }
}
