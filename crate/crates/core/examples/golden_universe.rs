//! A mixmaster universe on the golden geodesic: every era has a single
//! cycle, and the dominant axis runs through z, y, x periodically.

use mixlab::cfrac::{CosetPoint, Endpoint, QuadraticSurd};
use mixlab::mixmaster::{evolve_universe, two_sided_shift, GeodesicData};

fn main() -> mixlab::Result<()> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let g = GeodesicData::new(Endpoint::Surd(QuadraticSurd::golden()), -phi, CosetPoint::Zero)?;
    let t = evolve_universe(&g, 9)?;
    print!("{}", t.summary());

    // the shifted geodesic starts one era later
    let later = evolve_universe(&two_sided_shift(&g)?, 8)?;
    assert_eq!(later.eras[0].s, t.eras[1].s);
    println!("after one shift the sheet is {}", later.eras[0].s);
    Ok(())
}
