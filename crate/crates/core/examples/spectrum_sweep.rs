//! Leading eigenfunction of the full-shift operator at several beta,
//! written as CSV to stdout.

use mixlab::transfer::{build_operator, leading_eigen, write_eigenfunction_csv, DigitBound, OperatorSpec};

fn main() -> mixlab::Result<()> {
    let beta = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2.0);
    let op = build_operator(&OperatorSpec::collocation(beta, DigitBound::Infinite, 24).with_cosets())?;
    let r = leading_eigen(&op, 1e-13)?;
    eprintln!("beta = {beta}: eta = {:.15}, pressure = {:.3e}", r.eta, r.pressure());
    write_eigenfunction_csv(&op, &r.right, std::io::stdout().lock())
}
