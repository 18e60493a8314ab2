//! Bowen-Franks groups coker(I - A_N) and the K-theory of O_(A_N).

use mixlab::markov::{bowen_franks, build_an, k_theory};

fn main() -> mixlab::Result<()> {
    for n in 1..=10 {
        let a = build_an(n)?;
        let bf = bowen_franks(&a.matrix);
        let k = k_theory(&a.matrix);
        let torsion: Vec<String> = bf.torsion().iter().map(|d| format!("Z/{d}")).collect();
        let group = match (torsion.is_empty(), bf.free_rank) {
            (true, 0) => "0".to_string(),
            (_, 0) => torsion.join(" + "),
            (true, r) => format!("Z^{r}"),
            (false, r) => format!("Z^{r} + {}", torsion.join(" + ")),
        };
        println!("N = {n:>2}: det(I - A) = {:>4}, BF = {group}, K1 rank {}", bf.det, k.k1_rank);
    }
    Ok(())
}
