//! Over Gauss-typical universes each axis takes the dominant compression in
//! a third of the eras.

use mixlab::cfrac::{CosetPoint, Digits, Endpoint};
use mixlab::mixmaster::{axis_frequencies, evolve_universe_with, EvolveOptions, GeodesicData};
use mixlab::transfer::gauss_digits;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> mixlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let opts = EvolveOptions { max_cycles: Some(8), ..Default::default() };
    for eras in [100, 1000, 10_000, 100_000] {
        let digits = Digits::new(gauss_digits(eras + 64, &mut rng))?;
        let g = GeodesicData::new(Endpoint::Digits(digits), -1.5, CosetPoint::Infinity)?;
        let f = axis_frequencies(&evolve_universe_with(&g, eras, &opts)?)?;
        println!("{eras:>6} eras: x {:.4}  y {:.4}  z {:.4}", f[0], f[1], f[2]);
    }
    Ok(())
}
