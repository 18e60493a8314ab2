//! Ulam discretization on the depth-`d` cylinders of `E_N`.

use crate::error::{Error, Result};

/// Largest number of cells the Ulam scheme will build.
pub const MAX_CELLS: usize = 1 << 22;

/// Depth-`d` cylinders `[k1, ..., kd]` with `1 <= ki <= N`, indexed in base `N`
/// as `sum (ki - 1) N^{d-i}`.
#[derive(Debug, Clone)]
pub struct CylinderGrid {
    pub n: u64,
    pub depth: usize,
    /// Cylinder endpoints `p_d/q_d` and `(p_d + p_{d-1})/(q_d + q_{d-1})`, ordered.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl CylinderGrid {
    pub fn new(n: u64, depth: usize) -> Result<Self> {
        if n < 1 || depth < 1 {
            return Err(Error::Invalid("cylinder grid needs N >= 1 and depth >= 1".into()));
        }
        let cells = (n as u128).checked_pow(depth as u32).filter(|&c| c <= MAX_CELLS as u128).ok_or_else(|| {
            Error::Invalid(format!("{n}^{depth} cylinders exceed the limit of {MAX_CELLS}"))
        })? as usize;
        let mut lo = Vec::with_capacity(cells);
        let mut hi = Vec::with_capacity(cells);
        let mut word = vec![1u64; depth];
        for _ in 0..cells {
            let (a, b) = endpoints(&word)?;
            lo.push(a.min(b));
            hi.push(a.max(b));
            // increment the base-N odometer, last digit fastest
            for slot in word.iter_mut().rev() {
                if *slot < n {
                    *slot += 1;
                    break;
                }
                *slot = 1;
            }
        }
        Ok(CylinderGrid { n, depth, lo, hi })
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn midpoint(&self, a: usize) -> f64 {
        0.5 * (self.lo[a] + self.hi[a])
    }

    pub fn word(&self, a: usize) -> Vec<u64> {
        let mut w = vec![0; self.depth];
        let mut r = a as u64;
        for slot in w.iter_mut().rev() {
            *slot = r % self.n + 1;
            r /= self.n;
        }
        w
    }

    pub fn index(&self, word: &[u64]) -> Result<usize> {
        if word.len() != self.depth {
            return Err(Error::Invalid(format!("word length {} != depth {}", word.len(), self.depth)));
        }
        let mut a = 0u64;
        for &k in word {
            if k < 1 || k > self.n {
                return Err(Error::Domain(format!("digit {k} outside 1..={}", self.n)));
            }
            a = a * self.n + (k - 1);
        }
        Ok(a as usize)
    }

    /// The cell `[k, a1, ..., a_{d-1}]` containing `1/(x + k)` for `x` in cell `a`.
    pub fn preimage(&self, k: u64, a: usize) -> usize {
        let top = self.n.pow(self.depth as u32 - 1);
        ((k - 1) * top + a as u64 / self.n) as usize
    }

    /// Range of cell indices whose words start with `prefix`.
    pub fn prefix_range(&self, prefix: &[u64]) -> Result<std::ops::Range<usize>> {
        if prefix.len() > self.depth {
            return Err(Error::Invalid(format!(
                "word of length {} is deeper than the resolution {}",
                prefix.len(),
                self.depth
            )));
        }
        let mut a = 0u64;
        for &k in prefix {
            if k < 1 || k > self.n {
                return Err(Error::Domain(format!("digit {k} outside 1..={}", self.n)));
            }
            a = a * self.n + (k - 1);
        }
        let span = self.n.pow((self.depth - prefix.len()) as u32);
        Ok((a * span) as usize..((a + 1) * span) as usize)
    }
}

fn endpoints(word: &[u64]) -> Result<(f64, f64)> {
    let (mut p_prev, mut p, mut q_prev, mut q) = (1u128, 0u128, 0u128, 1u128);
    for &k in word {
        let k = k as u128;
        let overflow = || Error::Invalid("cylinder denominators overflow".into());
        let pn = k.checked_mul(p).and_then(|v| v.checked_add(p_prev)).ok_or_else(overflow)?;
        let qn = k.checked_mul(q).and_then(|v| v.checked_add(q_prev)).ok_or_else(overflow)?;
        (p_prev, p, q_prev, q) = (p, pn, q, qn);
    }
    Ok((p as f64 / q as f64, (p + p_prev) as f64 / (q + q_prev) as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_cylinders_are_branch_intervals() {
        let g = CylinderGrid::new(3, 1).unwrap();
        for k in 1..=3u64 {
            let a = g.index(&[k]).unwrap();
            assert_eq!(g.lo[a], 1.0 / (k as f64 + 1.0));
            assert_eq!(g.hi[a], 1.0 / k as f64);
        }
    }

    #[test]
    fn preimage_prepends_the_digit() {
        let g = CylinderGrid::new(3, 4).unwrap();
        for a in 0..g.len() {
            let w = g.word(a);
            assert_eq!(g.index(&w).unwrap(), a);
            for k in 1..=3 {
                let b = g.preimage(k, a);
                let mut expect = vec![k];
                expect.extend_from_slice(&w[..3]);
                assert_eq!(g.word(b), expect);
                let x = g.midpoint(a);
                let y = 1.0 / (x + k as f64);
                assert!(g.lo[b] <= y && y <= g.hi[b]);
            }
        }
    }

    #[test]
    fn cylinders_nest() {
        let g = CylinderGrid::new(2, 6).unwrap();
        let top = CylinderGrid::new(2, 2).unwrap();
        for a in 0..top.len() {
            for b in g.prefix_range(&top.word(a)).unwrap() {
                assert!(top.lo[a] <= g.lo[b] && g.hi[b] <= top.hi[a]);
            }
        }
        assert!(g.prefix_range(&[1; 7]).is_err());
        assert!(CylinderGrid::new(2, 30).is_err());
    }
}
