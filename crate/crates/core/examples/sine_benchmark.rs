//! Train on a synthetic sine wave and report held-out one-step error.
//!
//! Usage: `cargo run --release --example sine_benchmark [PERIOD] [BATCHING] [EPOCHS]`
//! where BATCHING is `per-sample` or `full-batch`.

use std::time::Instant;

use semitrend::dataset::sine_records;
use semitrend::forecast::{train, Batching, TrainingConfig};

fn main() -> semitrend::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let period: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let batching: Batching = args.get(2).and_then(|s| s.parse().ok()).unwrap_or_default();
    let epochs: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(2000);

    let records = sine_records(200, period);
    let config = TrainingConfig { validation_fraction: 0.2, batching, epochs, ..TrainingConfig::default() };
    let t = Instant::now();
    let (_, report) = train(&records, &config)?;
    let losses = report.epoch_losses();
    for e in [0, losses.len() / 4, losses.len() / 2, losses.len() - 1] {
        println!("epoch {:>5}  train loss {:.6}", e + 1, losses[e]);
    }
    let held_out = report.validation_loss().expect("validation split requested");
    println!("held-out one-step MSE {held_out:.6}  ({:.1?}, {batching})", t.elapsed());
    Ok(())
}
