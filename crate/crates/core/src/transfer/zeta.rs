//! Hurwitz zeta `zeta(s, a) = sum_{n >= 0} (a + n)^{-s}` for real `s > 1`, `a > 0`.

/// `B_{2j} / (2j)!` for `j = 1..=7`.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

const SHIFT: f64 = 20.0;

pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    let mut head = 0.0;
    let mut b = a;
    while b < SHIFT {
        head += b.powf(-s);
        b += 1.0;
    }
    // Euler-Maclaurin at b >= 20
    let mut tail = b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut power = b.powf(-s - 1.0);
    let inv_b2 = 1.0 / (b * b);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += c * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power *= inv_b2;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riemann_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((hurwitz_zeta(3.0, 1.0) - 1.2020569031595942).abs() < 1e-14);
    }

    #[test]
    fn half_shift() {
        // zeta(2, 1/2) = (2^2 - 1) zeta(2)
        assert!((hurwitz_zeta(2.0, 0.5) - 3.0 * PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn recurrence_and_large_argument() {
        for &(s, a) in &[(1.5, 0.3), (2.7, 7.2), (5.0, 4097.5), (2.0, 1e3)] {
            let d = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0);
            assert!((d / a.powf(-s) - 1.0).abs() < 1e-11, "{s} {a}");
        }
        // zeta(2, a) ~ 1/a + 1/(2 a^2)
        let a = 1e6;
        assert!((hurwitz_zeta(2.0, a) - (1.0 / a + 0.5 / (a * a))).abs() < 1e-18);
    }
}
