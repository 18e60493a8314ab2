//! Lyapunov exponents three ways: a periodic orbit, Monte Carlo over
//! random points, and the derivative of the pressure.

use mixlab::cfrac::{Endpoint, QuadraticSurd};
use mixlab::transfer::{lyapunov_mc, lyapunov_spectral, DigitBound, GibbsChain, LyapunovSource, StartMeasure};

fn main() -> mixlab::Result<()> {
    let x = Endpoint::Surd(QuadraticSurd::from_period(&[1, 2])?);
    let e = lyapunov_mc(LyapunovSource::Point(&x), 1000, 1, 0)?;
    println!("[1,2,1,2,...]: {:.9} (differenced {:.9})", e.mean, e.differenced.unwrap());

    let s = lyapunov_spectral(DigitBound::Infinite, 1e-3)?;
    let mc = lyapunov_mc(LyapunovSource::Random(StartMeasure::Lebesgue), 10_000, 200, 1)?;
    println!("full shift: spectral {:.9}, Monte Carlo {:.6} +- {:.1e}", s.lambda, mc.mean, mc.std_error);
    println!("            pi^2/(6 log 2) = {:.9}", std::f64::consts::PI.powi(2) / (6.0 * std::f64::consts::LN_2));

    let s2 = lyapunov_spectral(DigitBound::Finite(2), 1e-3)?;
    let chain = GibbsChain::at_dimension(2, 14, s2.dim)?;
    let mc2 = lyapunov_mc(LyapunovSource::Gibbs(&chain), 5000, 200, 2)?;
    println!("E_2: spectral {:.9}, Gibbs chain {:.6} +- {:.1e}", s2.lambda, mc2.mean, mc2.std_error);
    Ok(())
}
