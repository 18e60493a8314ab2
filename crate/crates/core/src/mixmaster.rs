//! Discrete mixmaster evolution: Kasner eras and cycles driven by the
//! continued-fraction digits of the forward endpoint of a geodesic.
//!
//! An era with digit `k` runs `k` cycles at `u, u - 1, ..., u - k + 1` and
//! then bounces to `1/(u - k)`. The coset `s_n` labels the axis carrying the
//! dominant compression in era `n`; it moves by `(-k_n, 1; 1, 0)` between
//! eras. Inside an era that axis holds the exponent `p3` while the other two
//! axes trade `p1` and `p2` from cycle to cycle.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cfrac::{
    axis_permutation, cf_digits, shift_act, Axis, AxisPermutation, CosetPoint, Endpoint, Expansion, StreamEnd,
};
use crate::error::{Error, Result};

/// Kasner exponents `p1 <= p2 <= p3` for a parameter `u >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KasnerTriple {
    pub u: f64,
    pub p: [f64; 3],
}

impl KasnerTriple {
    pub fn sum(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn sum_squares(&self) -> f64 {
        self.p.iter().map(|p| p * p).sum()
    }
}

pub fn kasner_exponents(u: f64) -> Result<KasnerTriple> {
    if !(u >= 1.0) || !u.is_finite() {
        return Err(Error::Domain(format!("Kasner parameter u = {u} must be >= 1")));
    }
    // divide through by u^2 so that large u stays accurate
    let w = 1.0 / u;
    let den = 1.0 + w + w * w;
    let p = [-w / den, (w + w * w) / den, (1.0 + w) / den];
    Ok(KasnerTriple { u, p })
}

/// The bounce `u -> 1/u` closing an era once `u` has dropped into (0, 1).
pub fn era_transition(u: f64) -> Result<f64> {
    if u == 0.0 {
        return Err(Error::Cusp("u = 0: the orbit ends at a cusp".into()));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("bounce needs u in (0, 1), got {u}")));
    }
    Ok(1.0 / u)
}

/// `y -> 1/(y + k)`, equivalently `v -> k + 1/v` for `v = 1/y`.
pub fn v_evolution(y: f64, k: u64) -> Result<f64> {
    if !(y > 0.0) || k < 1 {
        return Err(Error::Domain(format!("need y > 0 and k >= 1, got y = {y}, k = {k}")));
    }
    Ok(1.0 / (y + k as f64))
}

/// Cycle amplitude recovered from `v_n = delta (1 + u_n) / (1 - delta)`.
pub fn delta_from_v(v: f64, u: f64) -> f64 {
    v / (v + 1.0 + u)
}

/// Geodesic coding of one universe: forward endpoint in (0, 1), backward
/// endpoint in (-inf, -1] and a coset label.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicData {
    pub omega_plus: Endpoint,
    pub omega_minus: f64,
    pub s: CosetPoint,
}

impl GeodesicData {
    pub fn new(omega_plus: Endpoint, omega_minus: f64, s: CosetPoint) -> Result<Self> {
        let x = omega_plus.value();
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain(format!("omega+ = {x} must lie in (0, 1)")));
        }
        if !(omega_minus <= -1.0) || !omega_minus.is_finite() {
            return Err(Error::Domain(format!("omega- = {omega_minus} must lie in (-inf, -1]")));
        }
        Ok(GeodesicData { omega_plus, omega_minus, s })
    }
}

/// Simultaneous shift of both endpoints with the digit `k = [1/omega+]`.
///
/// The backward endpoint moves by `omega- -> 1/omega- - k`; in the coordinate
/// `y = -1/omega-` this is `y -> 1/(y + k)`.
pub fn two_sided_shift(g: &GeodesicData) -> Result<GeodesicData> {
    let (k, omega_plus) = g.omega_plus.shift()?;
    if omega_plus.value() <= 0.0 {
        return Err(Error::Cusp("omega+ is rational".into()));
    }
    Ok(GeodesicData { omega_plus, omega_minus: backward_step(g.omega_minus, k), s: shift_act(k, g.s) })
}

fn backward_step(omega_minus: f64, k: u64) -> f64 {
    1.0 / omega_minus - k as f64
}

/// Digits `[k_{-1}; k_{-2}, ...]` of `-omega-`, i.e. the eras before time zero.
pub fn backward_digits(g: &GeodesicData, n: usize) -> Result<Expansion> {
    let w = -g.omega_minus;
    let lead = w.floor();
    let frac = w - lead;
    let mut digits = vec![lead as u64];
    let mut terminated = frac == 0.0;
    let mut exhausted = false;
    if !terminated && n > 1 {
        let rest = cf_digits(frac, n - 1)?;
        digits.extend_from_slice(rest.digits.as_slice());
        terminated = rest.terminated;
        exhausted = rest.precision_exhausted;
    }
    Ok(Expansion { digits: crate::cfrac::Digits::new(digits)?, terminated, precision_exhausted: exhausted })
}

/// Which axis carries each of `p1, p2, p3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisAssignment(pub [Axis; 3]);

impl AxisAssignment {
    /// Assignment in cycle `j` of an era whose dominant axis is labelled by `s`:
    /// `p3` sits on that axis, the remaining two axes take `p1, p2` in the
    /// order `0, 1, inf` of their labels, swapped on odd cycles.
    pub fn for_cycle(s: CosetPoint, j: u64) -> AxisAssignment {
        let mut rest = CosetPoint::ALL.iter().filter(|&&t| t != s).map(|t| t.axis());
        let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
        if j % 2 == 0 {
            AxisAssignment([a, b, s.axis()])
        } else {
            AxisAssignment([b, a, s.axis()])
        }
    }

    pub fn dominant(&self) -> Axis {
        self.0[2]
    }
}

impl fmt::Display for AxisAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.0 {
            write!(f, "{}", a.letter())?;
        }
        Ok(())
    }
}

impl Serialize for AxisAssignment {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    pub u: f64,
    pub p: [f64; 3],
    pub axes: AxisAssignment,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Era {
    pub n: usize,
    /// `u_n = 1/x_n > 1`.
    pub u: f64,
    pub x: f64,
    /// Number of cycles `k_n = [u_n]`.
    pub k: u64,
    pub s: CosetPoint,
    pub dominant: Axis,
    pub cycles: Vec<Cycle>,
    /// Cycles of this era not stored because of `EvolveOptions::max_cycles`.
    pub cycles_elided: u64,
    /// Relabelling applied to the axes at the bounce closing this era.
    #[serde(serialize_with = "ser_display")]
    pub transition: AxisPermutation,
    pub v: f64,
    pub y: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// `u_n` was an integer: the era ends at `u = 1` (rational endpoint).
    pub degenerate: bool,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixmasterTrajectory {
    pub initial_s: CosetPoint,
    pub eras: Vec<Era>,
    /// Fewer eras than requested were produced.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<StreamEnd>,
}

/// Recursion for the era start times `Omega_{n+1}(Omega_n, x_n, y_n)`.
pub type OmegaHook = fn(omega: f64, x: f64, y: f64) -> f64;

#[derive(Debug, Clone, Default)]
pub struct EvolveOptions {
    /// Overrides the initial `v_0` (default `-omega-`).
    pub v0: Option<f64>,
    pub omega0: f64,
    /// Disabled by default: no era start times are produced.
    pub omega_hook: Option<OmegaHook>,
    /// Store at most this many cycles per era. Gauss-typical digits are
    /// heavy-tailed, so long runs need a cap.
    pub max_cycles: Option<u64>,
}

pub fn evolve_universe(g: &GeodesicData, n_eras: usize) -> Result<MixmasterTrajectory> {
    evolve_universe_with(g, n_eras, &EvolveOptions::default())
}

pub fn evolve_universe_with(g: &GeodesicData, n_eras: usize, opts: &EvolveOptions) -> Result<MixmasterTrajectory> {
    if n_eras == 0 {
        return Err(Error::Invalid("need at least one era".into()));
    }
    // carried as the backward endpoint so it shifts exactly like two_sided_shift
    let mut w = match opts.v0 {
        Some(v) if v > 0.0 => -v,
        Some(v) => return Err(Error::Domain(format!("v0 = {v} must be positive"))),
        None => g.omega_minus,
    };
    let mut s = g.s;
    let mut omega = opts.omega_hook.map(|_| opts.omega0);
    let mut eras = Vec::with_capacity(n_eras);
    let mut stream = g.omega_plus.stream();
    let mut stop = None;

    for n in 0..n_eras {
        let Some(item) = stream.next() else {
            stop = stream.end();
            break;
        };
        let k = item.digit;
        let u = 1.0 / item.x;
        let degenerate = u == u.floor();
        let n_cycles = if degenerate { k - 1 } else { k };
        let stored = opts.max_cycles.map_or(n_cycles, |m| m.min(n_cycles));
        let cycles = (0..stored)
            .map(|j| {
                // rounding in 1/x may leave the last cycle a hair below 1
                let uj = (u - j as f64).max(1.0);
                let kt = kasner_exponents(uj)?;
                Ok(Cycle { u: uj, p: kt.p, axes: AxisAssignment::for_cycle(s, j) })
            })
            .collect::<Result<Vec<_>>>()?;
        let v = -w;
        let y = 1.0 / v;
        eras.push(Era {
            n,
            u,
            x: item.x,
            k,
            s,
            dominant: s.axis(),
            cycles,
            cycles_elided: n_cycles - stored,
            transition: axis_permutation(k)?,
            v,
            y,
            delta: delta_from_v(v, u),
            omega,
            degenerate,
        });
        if degenerate {
            stop = Some(StreamEnd::Cusp);
            break;
        }
        if let (Some(hook), Some(om)) = (opts.omega_hook, omega) {
            omega = Some(hook(om, item.x, y));
        }
        w = backward_step(w, k);
        s = shift_act(k, s);
    }
    Ok(MixmasterTrajectory { initial_s: g.s, truncated: eras.len() < n_eras, eras, stop })
}

/// Fraction of eras in which each of `x, y, z` carries the dominant compression.
pub fn axis_frequencies(t: &MixmasterTrajectory) -> Result<[f64; 3]> {
    if t.eras.is_empty() {
        return Err(Error::Invalid("empty trajectory".into()));
    }
    let mut counts = [0usize; 3];
    for e in &t.eras {
        counts[e.dominant.index()] += 1;
    }
    let n = t.eras.len() as f64;
    Ok(counts.map(|c| c as f64 / n))
}

impl MixmasterTrajectory {
    pub fn digits(&self) -> Vec<u64> {
        self.eras.iter().map(|e| e.k).collect()
    }

    /// One row per cycle.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["era", "cycle", "u", "p1", "p2", "p3", "axes", "s", "v", "delta"])?;
        for e in &self.eras {
            for (j, c) in e.cycles.iter().enumerate() {
                out.write_record([
                    e.n.to_string(),
                    j.to_string(),
                    c.u.to_string(),
                    c.p[0].to_string(),
                    c.p[1].to_string(),
                    c.p[2].to_string(),
                    c.axes.to_string(),
                    e.s.to_string(),
                    e.v.to_string(),
                    e.delta.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Era/cycle summary for terminal output.
    pub fn summary(&self) -> String {
        let mut out = String::from("era  k       u_n        s  dom  v_n        delta\n");
        for e in &self.eras {
            out.push_str(&format!(
                "{:<4} {:<7} {:<10.6} {:<3} {:<4} {:<10.6} {:.6}\n",
                e.n,
                e.k,
                e.u,
                e.s.to_string(),
                e.dominant.letter(),
                e.v,
                e.delta
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfrac::{Digits, QuadraticSurd};

    const PHI: f64 = 1.618_033_988_749_895;

    fn golden_geodesic(s: CosetPoint) -> GeodesicData {
        GeodesicData::new(Endpoint::Surd(QuadraticSurd::golden()), -PHI, s).unwrap()
    }

    #[test]
    fn kasner_examples() {
        let k = kasner_exponents(1.0).unwrap();
        for (a, b) in k.p.iter().zip([-1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let k = kasner_exponents(2.0).unwrap();
        for (a, b) in k.p.iter().zip([-2.0 / 7.0, 3.0 / 7.0, 6.0 / 7.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((k.sum() - 1.0).abs() < 1e-15 && (k.sum_squares() - 1.0).abs() < 1e-15);
        assert!(kasner_exponents(0.9).is_err());
    }

    #[test]
    fn kasner_large_u_tends_to_001() {
        let mut prev = kasner_exponents(1.0).unwrap();
        for e in 1..6 {
            let k = kasner_exponents(10f64.powi(e)).unwrap();
            assert!(k.p[0] > prev.p[0] && k.p[1] < prev.p[1] && k.p[2] > prev.p[2]);
            prev = k;
        }
        prev = kasner_exponents(1e11).unwrap();
        assert!(prev.p[0].abs() < 1e-10 && prev.p[1].abs() < 1e-10 && (prev.p[2] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bounce() {
        assert_eq!(era_transition(0.5).unwrap(), 2.0);
        assert_eq!(era_transition(0.4).unwrap(), 2.5);
        assert!(matches!(era_transition(0.0), Err(Error::Cusp(_))));
        assert!(era_transition(1.0).is_err());
        // u0 = 3.8: cycles at 3.8, 2.8, 1.8, then 0.8 bounces to 1.25
        let g = GeodesicData::new(Endpoint::Float(1.0 / 3.8), -2.0, CosetPoint::Zero).unwrap();
        let t = evolve_universe(&g, 2).unwrap();
        let us: Vec<f64> = t.eras[0].cycles.iter().map(|c| c.u).collect();
        assert_eq!(us.len(), 3);
        assert!((us[2] - 1.8).abs() < 1e-12);
        assert!((era_transition(us[2] - 1.0).unwrap() - 1.25).abs() < 1e-12);
        assert!((t.eras[1].u - 1.25).abs() < 1e-12);
    }

    #[test]
    fn v_evolution_examples() {
        assert_eq!(v_evolution(1.0, 1).unwrap(), 0.5);
        for k in 1..6u64 {
            let fixed = (((k * k + 4) as f64).sqrt() - k as f64) / 2.0;
            assert!((v_evolution(fixed, k).unwrap() - fixed).abs() < 1e-15);
        }
        assert_eq!(delta_from_v(3.0, 2.0), 0.5);
        assert!(v_evolution(-1.0, 1).is_err());
    }

    #[test]
    fn golden_universe_has_single_cycle_eras() {
        let t = evolve_universe(&golden_geodesic(CosetPoint::Zero), 10).unwrap();
        assert_eq!(t.eras.len(), 10);
        for e in &t.eras {
            assert_eq!(e.k, 1);
            assert_eq!(e.cycles.len(), 1);
            assert!((e.u - PHI).abs() < 1e-12);
            assert!((e.v - PHI).abs() < 1e-12);
        }
    }

    #[test]
    fn silver_universe_has_two_cycle_eras() {
        let g = GeodesicData::new(Endpoint::Surd(QuadraticSurd::silver()), -2.5, CosetPoint::One).unwrap();
        let t = evolve_universe(&g, 8).unwrap();
        for e in &t.eras {
            assert_eq!(e.cycles.len(), 2);
            assert!((e.u - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_assignment_is_identity_on_z_sheet() {
        let t = evolve_universe(&golden_geodesic(CosetPoint::Zero), 1).unwrap();
        assert_eq!(t.eras[0].cycles[0].axes.to_string(), "xyz");
    }

    #[test]
    fn period_three_axis_cycle() {
        // odd digits permute the three labels cyclically
        let t = evolve_universe(&golden_geodesic(CosetPoint::Zero), 30).unwrap();
        assert_eq!(axis_frequencies(&t).unwrap(), [1.0 / 3.0; 3]);
        let doms: Vec<Axis> = t.eras.iter().take(4).map(|e| e.dominant).collect();
        assert_eq!(doms, vec![Axis::Z, Axis::Y, Axis::X, Axis::Z]);
    }

    #[test]
    fn single_era_frequency() {
        let t = evolve_universe(&golden_geodesic(CosetPoint::One), 1).unwrap();
        assert_eq!(axis_frequencies(&t).unwrap(), [1.0, 0.0, 0.0]);
        let empty = MixmasterTrajectory { initial_s: CosetPoint::Zero, eras: vec![], truncated: true, stop: None };
        assert!(axis_frequencies(&empty).is_err());
    }

    #[test]
    fn two_sided_shift_fixes_golden_geodesic() {
        let g = golden_geodesic(CosetPoint::One);
        let h = two_sided_shift(&g).unwrap();
        assert!((h.omega_plus.value() - g.omega_plus.value()).abs() < 1e-15);
        assert!((h.omega_minus + PHI).abs() < 1e-12);
        assert_eq!(h.s, CosetPoint::Zero);
    }

    #[test]
    fn backward_endpoint_stays_below_minus_one() {
        let g = GeodesicData::new(Endpoint::Surd("(-3+sqrt(13))/2".parse().unwrap()), -1.5, CosetPoint::Zero).unwrap();
        let mut h = g;
        for _ in 0..20 {
            h = two_sided_shift(&h).unwrap();
            assert!(h.omega_minus <= -1.0);
        }
    }

    #[test]
    fn degenerate_integer_parameter() {
        let g = GeodesicData::new(Endpoint::Float(0.5), -2.0, CosetPoint::Zero).unwrap();
        let t = evolve_universe(&g, 5).unwrap();
        assert_eq!(t.eras.len(), 1);
        assert!(t.eras[0].degenerate);
        assert_eq!(t.eras[0].cycles.len(), 1);
        assert!(t.truncated);
        assert_eq!(t.stop, Some(StreamEnd::Cusp));
    }

    #[test]
    fn explicit_digits_drive_the_eras() {
        let g = GeodesicData::new(Endpoint::Digits(Digits::new(vec![3, 1, 2, 5, 1, 1, 1]).unwrap()), -1.2, CosetPoint::Zero).unwrap();
        let t = evolve_universe(&g, 3).unwrap();
        assert_eq!(t.digits(), vec![3, 1, 2]);
        assert_eq!(t.eras.iter().map(|e| e.cycles.len()).collect::<Vec<_>>(), vec![3, 1, 2]);
    }

    #[test]
    fn transitions_match_coset_action() {
        let g = GeodesicData::new(Endpoint::Surd("(-2+sqrt(7))/1".parse().unwrap()), -3.3, CosetPoint::Infinity).unwrap();
        let t = evolve_universe(&g, 30).unwrap();
        for pair in t.eras.windows(2) {
            let via = AxisPermutation::from_coset_map(|s| shift_act(pair[0].k, s));
            assert_eq!(pair[0].transition, via);
            assert_eq!(pair[0].transition.apply(pair[0].dominant), pair[1].dominant);
        }
    }

    #[test]
    fn omega_hook_is_opt_in() {
        let g = golden_geodesic(CosetPoint::Zero);
        let t = evolve_universe(&g, 3).unwrap();
        assert!(t.eras.iter().all(|e| e.omega.is_none()));
        let opts = EvolveOptions { v0: Some(2.0), omega0: 0.0, omega_hook: Some(|om, _x, _y| om + 1.0), ..Default::default() };
        let t = evolve_universe_with(&g, 3, &opts).unwrap();
        assert_eq!(t.eras.iter().map(|e| e.omega.unwrap()).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert_eq!(t.eras[0].v, 2.0);
    }

    #[test]
    fn backward_digit_expansion() {
        let g = golden_geodesic(CosetPoint::Zero);
        let b = backward_digits(&g, 6).unwrap();
        assert_eq!(b.digits.as_slice(), &[1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn trajectory_json_shape() {
        let t = evolve_universe(&golden_geodesic(CosetPoint::Zero), 2).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        let era = &v["eras"][0];
        for key in ["n", "u", "k", "cycles", "v", "delta"] {
            assert!(era.get(key).is_some(), "missing {key}");
        }
        assert_eq!(era["cycles"][0]["axes"], "xyz");
        assert_eq!(era["cycles"][0]["p"].as_array().unwrap().len(), 3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("era,cycle,u,p1,p2,p3,axes,s,v,delta\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
