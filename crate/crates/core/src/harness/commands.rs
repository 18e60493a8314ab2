use log::warn;
use serde_json::json;

use super::config::{Command, RunConfig};
use super::{FileKind, Outcome, OutputFile};
use num_rational::BigRational;

use crate::cfrac::{cf_digits_rational, CosetPoint, Endpoint, QuadraticSurd, StreamEnd};
use crate::error::{Error, Result};
use crate::markov::{
    build_an, bowen_franks, finite_level_state, is_aperiodic, is_irreducible, k_theory, kms_beta_bound,
    spectral_radius, uniqueness_probe, var0_h, KmsModel,
};
use crate::mixmaster::{evolve_universe_with, EvolveOptions, GeodesicData};
use crate::transfer::{
    build_operator, dimension_refinement, hensley_dim_asymptotic, leading_eigen, lyapunov_mc, lyapunov_spectral,
    write_eigenfunction_csv, DigitBound, GibbsChain, LyapunovSource, OperatorSpec, Scheme, SpectralReport,
    StartMeasure,
};

const CYCLE_CAP: u64 = 10_000;

pub fn dispatch(c: &RunConfig) -> Result<Outcome> {
    match c.command {
        Command::Simulate => simulate(c),
        Command::Spectrum => spectrum(c),
        Command::Dimension => dimension(c),
        Command::Lyapunov => lyapunov(c),
        Command::Markov => markov(c),
        Command::Bf => bf(c),
        Command::Kms => kms(c),
    }
}

fn csv_file(name: &str, bytes: Vec<u8>) -> OutputFile {
    OutputFile { name: name.to_string(), bytes, kind: FileKind::Csv }
}

fn json_file(name: &str, value: &impl serde::Serialize) -> Result<OutputFile> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(OutputFile { name: name.to_string(), bytes, kind: FileKind::Json })
}

fn endpoint(c: &RunConfig) -> Result<Option<Endpoint>> {
    if let Some(period) = &c.digits {
        return Ok(Some(Endpoint::Surd(QuadraticSurd::from_period(period)?)));
    }
    let Some(text) = &c.omega else { return Ok(None) };
    match text.parse::<QuadraticSurd>() {
        Ok(s) => Ok(Some(Endpoint::Surd(s))),
        Err(Error::Parse(_)) if !text.contains("sqrt") && text.contains('/') => {
            let x: BigRational =
                text.trim().parse().map_err(|_| Error::Invalid(format!("--omega {text:?} is not a surd or a fraction")))?;
            let e = cf_digits_rational(&x, usize::MAX)?;
            Err(Error::Cusp(format!("omega+ = {x} = {}", e.digits)))
        }
        Err(Error::Parse(_)) => {
            let x: f64 = text
                .parse()
                .map_err(|_| Error::Invalid(format!("--omega {text:?} is neither a surd nor a decimal")))?;
            warn!("decimal endpoint {x}: digits are exact only until the denominator passes 2^53");
            Ok(Some(Endpoint::Float(x)))
        }
        Err(e) => Err(e),
    }
}

fn bound_or(c: &RunConfig, default: DigitBound) -> DigitBound {
    c.n.unwrap_or(default)
}

fn finite_n(c: &RunConfig, default: u64, min: u64) -> Result<u64> {
    match c.n {
        None => Ok(default),
        Some(DigitBound::Finite(n)) if n >= min => Ok(n),
        Some(b) => Err(Error::Invalid(format!("--N must be a finite integer >= {min}, got {b}"))),
    }
}

fn simulate(c: &RunConfig) -> Result<Outcome> {
    let plus = endpoint(c)?.ok_or_else(|| Error::Invalid("simulate needs --omega or --digits".into()))?;
    let minus = c.omega_minus.unwrap_or(-(1.0 + 5f64.sqrt()) / 2.0);
    let g = GeodesicData::new(plus, minus, c.sheet.unwrap_or(CosetPoint::Zero))?;
    let eras = c.eras.unwrap_or(10);
    let opts = EvolveOptions { max_cycles: Some(CYCLE_CAP), ..Default::default() };
    let t = evolve_universe_with(&g, eras, &opts)?;
    if t.truncated && t.stop == Some(StreamEnd::Cusp) {
        return Err(Error::Cusp(format!(
            "orbit reached a cusp after {} of {eras} eras: the endpoint is rational",
            t.eras.len()
        )));
    }
    if t.truncated {
        warn!("endpoint precision exhausted after {} eras", t.eras.len());
    }
    let mut csv = Vec::new();
    t.write_csv(&mut csv)?;
    Ok(Outcome {
        results: json!({
            "eras": t.eras.len(),
            "digits": t.digits(),
            "truncated": t.truncated,
            "stop": t.stop,
            "trajectory_file": "simulate_trajectory.json",
            "cycles_file": "simulate_cycles.csv",
        }),
        diagnostics: json!({ "cycle_cap_per_era": CYCLE_CAP }),
        files: vec![json_file("simulate_trajectory.json", &t)?, csv_file("simulate_cycles.csv", csv)],
        summary: t.summary(),
    })
}

fn operator_template(c: &RunConfig, bound: DigitBound) -> Result<OperatorSpec> {
    let scheme = c.scheme.unwrap_or(if c.depth.is_some() { Scheme::CylinderUlam } else { Scheme::AnalyticCollocation });
    let spec = match scheme {
        Scheme::CylinderUlam => {
            let n = bound.finite().ok_or_else(|| Error::Unsupported("the Ulam scheme needs a finite --N".into()))?;
            OperatorSpec::ulam(2.0, n, c.depth.unwrap_or(12))
        }
        Scheme::AnalyticCollocation => OperatorSpec::collocation(2.0, bound, c.m.unwrap_or(32)),
    };
    Ok(if c.cosets { spec.with_cosets() } else { spec })
}

fn spectrum(c: &RunConfig) -> Result<Outcome> {
    let bound = bound_or(c, DigitBound::Infinite);
    let template = operator_template(c, bound)?;
    let tol = c.tol.unwrap_or(1e-12);
    let betas = if c.beta.is_empty() { vec![2.0] } else { c.beta.clone() };
    let mut reports = Vec::new();
    let mut files = Vec::new();
    let mut sweep = csv::Writer::from_writer(Vec::new());
    sweep.write_record(["beta", "eta", "pressure", "residual"])?;
    let mut summary = format!("{:>10} {:>22} {:>22}\n", "beta", "eta", "P(beta)");
    for &beta in &betas {
        let spec = template.with_beta(beta);
        let op = build_operator(&spec)?;
        let r = leading_eigen(&op, tol)?;
        if betas.len() == 1 {
            let mut buf = Vec::new();
            write_eigenfunction_csv(&op, &r.right, &mut buf)?;
            files.push(csv_file("spectrum_eigenfunction.csv", buf));
        }
        sweep.write_record(&[beta.to_string(), format!("{:.17e}", r.eta), format!("{:.17e}", r.pressure()), format!("{:.3e}", r.residual)])?;
        summary.push_str(&format!("{beta:>10} {:>22.15} {:>22.15e}\n", r.eta, r.pressure()));
        reports.push(SpectralReport::new(&spec, &r));
    }
    if betas.len() > 1 {
        files.push(csv_file("spectrum_sweep.csv", sweep.into_inner().map_err(|e| Error::Io(e.into_error()))?));
    }
    Ok(Outcome {
        results: json!({ "spectra": reports }),
        diagnostics: json!({ "eigen_tol": tol }),
        files,
        summary,
    })
}

fn dimension(c: &RunConfig) -> Result<Outcome> {
    let n = finite_n(c, 2, 2)?;
    let template = operator_template(c, DigitBound::Finite(n))?;
    let tol = c.tol.unwrap_or(1e-10);
    let top = template.resolution;
    let resolutions: Vec<usize> = match template.scheme {
        Scheme::CylinderUlam => [top.saturating_sub(4), top.saturating_sub(2), top].into_iter().filter(|&d| d >= 1).collect(),
        Scheme::AnalyticCollocation => [top / 2, 3 * top / 4, top].into_iter().filter(|&m| m >= 2).collect(),
    };
    let table = dimension_refinement(&template, &resolutions, tol)?;
    let dim = table.rows.last().map(|r| r.dim).ok_or_else(|| Error::Invalid("no resolutions to run".into()))?;
    let hensley = hensley_dim_asymptotic(n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["resolution", "dim", "delta"])?;
    let mut summary = format!("dim_H(E_{n}) with {}\n{:>10} {:>20} {:>12}\n", template.scheme, "resolution", "dim", "delta");
    for r in &table.rows {
        w.write_record(&[r.resolution.to_string(), format!("{:.15}", r.dim), r.delta.map_or(String::new(), |d| format!("{d:.3e}"))])?;
        summary.push_str(&format!(
            "{:>10} {:>20.15} {:>12}\n",
            r.resolution,
            r.dim,
            r.delta.map_or(String::from("-"), |d| format!("{d:.3e}"))
        ));
    }
    if let Some(x) = table.extrapolated {
        summary.push_str(&format!("extrapolated {x:.15}\n"));
    }
    summary.push_str(&format!("Hensley asymptotic {:.15}{}\n", hensley.value, if hensley.in_asymptotic_regime { "" } else { " (outside asymptotic regime)" }));
    Ok(Outcome {
        results: json!({ "N": n, "dim": dim, "refinement": table, "hensley": hensley }),
        diagnostics: json!({ "tol": tol }),
        files: vec![csv_file("dimension_refinement.csv", w.into_inner().map_err(|e| Error::Io(e.into_error()))?)],
        summary,
    })
}

fn auto_depth(n: u64) -> usize {
    (1..=12).rev().find(|&d| (n as u128).pow(d as u32) <= 1 << 16).unwrap_or(1)
}

fn lyapunov(c: &RunConfig) -> Result<Outcome> {
    if let Some(x) = endpoint(c)? {
        let length = c.length.unwrap_or(1000);
        let e = lyapunov_mc(LyapunovSource::Point(&x), length, 1, c.seed)?;
        let summary = format!("point {x}: (2/n) log q_n = {:.12}, differenced {:?}\n", e.mean, e.differenced);
        return Ok(Outcome { results: json!({ "point": x.to_string(), "mc": e }), summary, ..Default::default() });
    }
    let bound = bound_or(c, DigitBound::Infinite);
    let h = c.h.unwrap_or(1e-3);
    let spectral = lyapunov_spectral(bound, h)?;
    let samples = c.samples.unwrap_or(100);
    let length = c.length.unwrap_or(10_000);
    let (mc, depth) = match bound {
        DigitBound::Infinite => (lyapunov_mc(LyapunovSource::Random(StartMeasure::Lebesgue), length, samples, c.seed)?, None),
        DigitBound::Finite(n) => {
            let depth = c.depth.unwrap_or_else(|| auto_depth(n));
            let chain = GibbsChain::at_dimension(n, depth, spectral.dim)?;
            (lyapunov_mc(LyapunovSource::Gibbs(&chain), length, samples, c.seed)?, Some(depth))
        }
    };
    let rel = (mc.mean - spectral.lambda).abs() / spectral.lambda;
    let summary = format!(
        "N = {bound}: spectral {:.10} (h = {h}), Monte Carlo {:.10} +- {:.2e} ({samples} x {length}), relative gap {rel:.2e}\n",
        spectral.lambda, mc.mean, mc.std_error
    );
    Ok(Outcome {
        results: json!({ "spectral": spectral, "mc": mc, "relative_gap": rel, "gibbs_depth": depth }),
        diagnostics: json!({ "h": h }),
        summary,
        ..Default::default()
    })
}

fn markov(c: &RunConfig) -> Result<Outcome> {
    let n = finite_n(c, 2, 1)?;
    let a = build_an(n)?;
    let irr = is_irreducible(&a.matrix);
    let period = if irr.irreducible { Some(is_aperiodic(&a.matrix)?) } else { None };
    let radius = spectral_radius(&a.matrix)?;
    let mut edges = Vec::new();
    a.matrix.write_edge_list(&mut edges)?;
    let labels: Vec<String> = a.states.iter().map(|s| s.to_string()).collect();
    let summary = format!(
        "A_{n}: {}x{} states, blocks ok: {}, irreducible: {}, period: {}, spectral radius: {}\n",
        a.size(),
        a.size(),
        a.check_block_structure(),
        irr.irreducible,
        period.map_or("-".into(), |p| p.period.to_string()),
        radius.value()
    );
    Ok(Outcome {
        results: json!({
            "system": a,
            "states": labels,
            "block_structure": a.check_block_structure(),
            "irreducible": irr,
            "periodicity": period,
            "spectral_radius": radius,
            "edge_list": "markov_edges.txt",
        }),
        files: vec![OutputFile { name: "markov_edges.txt".into(), bytes: edges, kind: FileKind::Always }],
        summary,
        ..Default::default()
    })
}

fn bf(c: &RunConfig) -> Result<Outcome> {
    let n = finite_n(c, 2, 1)?;
    let a = build_an(n)?;
    let b = bowen_franks(&a.matrix);
    let k = k_theory(&a.matrix);
    let fmt = |v: &[num_bigint::BigInt]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ");
    let summary = format!(
        "I - A_{n}: divisors [{}], free rank {}, det {}\nK0 torsion [{}], K1 rank {}\n",
        fmt(&b.divisors),
        b.free_rank,
        b.det,
        fmt(&k.k0_torsion),
        k.k1_rank
    );
    Ok(Outcome { results: json!({ "N": n, "bowen_franks": b, "k_theory": k }), summary, ..Default::default() })
}

fn kms(c: &RunConfig) -> Result<Outcome> {
    let n = finite_n(c, 2, 2)?;
    let beta = *c.beta.first().ok_or_else(|| Error::Invalid("kms needs --beta".into()))?;
    let bound = kms_beta_bound(n)?;
    if !(beta < bound) {
        return Err(Error::Inadmissible { beta, n, bound });
    }
    let depth = c.depth.unwrap_or_else(|| auto_depth(n).min(10));
    let level = c.level.unwrap_or(2).min(depth);
    let model = KmsModel::new(beta, n, depth)?;
    let state = finite_level_state(level, &model)?;
    let probe = uniqueness_probe(&model, 5, depth.min(6), c.seed)?;
    let var0 = var0_h(beta, n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["word", "sheet", "mass"])?;
    let mut summary = format!("beta = {beta} < {bound:.6}: admissible; u = P(beta) = {:.12}\n", model.spec.u);
    for (word, mass) in state.words.iter().zip(&state.weights) {
        let label = word.digits.iter().map(u64::to_string).collect::<Vec<_>>().join(".");
        w.write_record(&[label.clone(), word.sheet.to_string(), format!("{mass:.15e}")])?;
        summary.push_str(&format!("  [{label}] x {:<3} {mass:.12}\n", word.sheet.to_string()));
    }
    summary.push_str(&format!("uniqueness probe: max deviation {:.2e} over {} starts\n", probe.max_deviation, probe.starts));
    Ok(Outcome {
        results: json!({
            "spec": model.spec,
            "depth": depth,
            "level_state": state,
            "uniqueness_probe": probe,
            "var0": var0,
        }),
        diagnostics: json!({ "eigen_residual": model.eigen.residual }),
        files: vec![csv_file("kms_masses.csv", w.into_inner().map_err(|e| Error::Io(e.into_error()))?)],
        summary,
    })
}
