//! KMS data for E_2: the admissible range of beta, level-k masses and the
//! uniqueness probe.

use mixlab::markov::{finite_level_state, kms_beta_bound, uniqueness_probe, var0_h, KmsModel};
use mixlab::Error;

fn main() -> mixlab::Result<()> {
    let bound = kms_beta_bound(2)?;
    println!("beta < {bound:.9}");
    match KmsModel::new(1.3, 2, 8) {
        Err(Error::Inadmissible { .. }) => println!("beta = 1.3 rejected"),
        other => panic!("expected rejection, got {other:?}"),
    }

    let model = KmsModel::new(1.2, 2, 10)?;
    let state = finite_level_state(2, &model)?;
    for (w, m) in state.words.iter().zip(&state.weights) {
        println!("{:?} x {}: {m:.10}", w.digits, w.sheet);
    }
    let probe = uniqueness_probe(&model, 5, 6, 42)?;
    println!("five starts agree to {:.1e} on depth-6 cylinders", probe.max_deviation);
    let v = var0_h(1.2, 2)?;
    println!("var_0(h) = {:.9}", v.exact_value);
    Ok(())
}
