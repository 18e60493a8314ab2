//! The Gauss density is a fixed point of the coset-aware transfer operator
//! at beta = 2, with mass 1/3 on each sheet.

use mixlab::transfer::invariant_density_full;

fn main() -> mixlab::Result<()> {
    for m in [8, 16, 32] {
        let d = invariant_density_full(m)?;
        println!(
            "M = {m:>2}: sup |L f - f| = {:.2e}, L2 = {:.2e}, sheet masses {:.12} {:.12} {:.12}",
            d.sup_residual, d.l2_residual, d.sheet_masses[0], d.sheet_masses[1], d.sheet_masses[2]
        );
    }
    Ok(())
}
