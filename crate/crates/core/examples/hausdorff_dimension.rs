//! dim_H(E_N) from P(2 dim) = 0, against the large-N asymptotic.

use mixlab::transfer::{dimension_refinement, hausdorff_dim_spectral, hensley_dim_asymptotic, OperatorSpec};

fn main() -> mixlab::Result<()> {
    let table = dimension_refinement(&OperatorSpec::ulam(1.0, 2, 14), &[6, 8, 10, 12, 14], 1e-12)?;
    for r in &table.rows {
        println!("depth {:>2}: {:.12}  ratio {:?}", r.resolution, r.dim, r.ratio);
    }
    println!("extrapolated {:.12}", table.extrapolated.unwrap_or(f64::NAN));

    println!("{:>4} {:>14} {:>14} {:>10}", "N", "spectral", "asymptotic", "gap N^2");
    for n in [2, 5, 10, 20, 50, 100] {
        let d = hausdorff_dim_spectral(n, 1e-12)?.dim;
        let h = hensley_dim_asymptotic(n)?.value;
        println!("{n:>4} {d:>14.10} {h:>14.10} {:>10.4}", (d - h).abs() * (n * n) as f64);
    }
    Ok(())
}
