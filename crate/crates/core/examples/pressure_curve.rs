//! Pressure P(beta) of the full shift and of E_2, by collocation and by the
//! Ulam scheme, plus the Wirsing constant.

use mixlab::transfer::{
    build_operator, leading_eigen, pressure_with, subdominant_eigenvalue, DigitBound, OperatorSpec,
};

fn main() -> mixlab::Result<()> {
    println!("{:>5} {:>16} {:>16} {:>16}", "beta", "P full", "P E_2 colloc", "P E_2 ulam");
    for i in 0..=8 {
        let beta = 1.2 + 0.1 * i as f64;
        let full = pressure_with(&OperatorSpec::collocation(beta, DigitBound::Infinite, 32))?;
        let colloc = pressure_with(&OperatorSpec::collocation(beta, DigitBound::Finite(2), 32))?;
        let ulam = pressure_with(&OperatorSpec::ulam(beta, 2, 12))?;
        println!("{beta:>5.2} {full:>16.12} {colloc:>16.12} {ulam:>16.12}");
    }

    let op = build_operator(&OperatorSpec::collocation(2.0, DigitBound::Infinite, 40))?;
    let lead = leading_eigen(&op, 1e-14)?;
    println!("Wirsing constant {:.10}", subdominant_eigenvalue(&op, &lead, 1e-12)?);
    Ok(())
}
