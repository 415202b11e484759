//! Giving a subcarrier to the stronger user never loses against splitting it
//! once the interference factor is at least one half.
//!
//! cargo run --release --example no_sharing_check

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcc_alloc::model::no_sharing_inequality;

fn main() -> rcc_alloc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for eta in [0.1, 0.2, 0.3, 0.5, 1.0] {
        let mut worst = f64::INFINITY;
        for _ in 0..20_000 {
            let zeta1 = 10f64.powf(rng.random_range(-3.0..3.0));
            let zeta2 = zeta1 * 10f64.powf(rng.random_range(0.0..3.0));
            let total = 10f64.powf(rng.random_range(-3.0..4.0));
            let delta = rng.random_range(0.0..=total);
            let (lhs, rhs) = no_sharing_inequality(zeta1, zeta2, total, delta, eta)?;
            worst = worst.min(lhs - rhs);
        }
        println!("eta {eta:.1}: min(lhs - rhs) = {worst:+.3e}");
    }
    Ok(())
}
