//! The 3N x 3N matrix A_N of the partition {U_(k,t)} and its graph.

use mixlab::markov::{build_an, is_aperiodic, is_irreducible, spectral_radius};

fn main() -> mixlab::Result<()> {
    let a = build_an(3)?;
    for (state, row) in a.states.iter().zip(a.matrix.rows()) {
        let cells: Vec<String> = row.iter().map(u8::to_string).collect();
        println!("{:<8} {}", state.to_string(), cells.join(" "));
    }
    println!("blocks M1/M2 by column parity: {}", a.check_block_structure());
    println!("transpose blocks by row parity: {}", a.transpose().check_block_structure());

    for n in [2, 5, 16, 64] {
        let a = build_an(n)?;
        let period = is_aperiodic(&a.matrix)?.period;
        println!(
            "N = {n:>2}: irreducible {}, period {period}, spectral radius {}",
            is_irreducible(&a.matrix).irreducible,
            spectral_radius(&a.matrix)?.value()
        );
    }
    let mut edges = Vec::new();
    build_an(2)?.matrix.write_edge_list(&mut edges)?;
    println!("A_2 edges:\n{}", String::from_utf8_lossy(&edges));
    Ok(())
}
