//! Error rates of PC on simulated linear-Gaussian data.
//!
//! Usage: `cargo run --release --example monte_carlo [trials] [seed]`

use latentpc::bench::{monte_carlo_benchmark, BenchmarkConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let n_trials = args.next().map_or(100, |a| a.parse().expect("trials"));
    let seed = args.next().map_or(0, |a| a.parse().expect("seed"));
    let cfg = BenchmarkConfig {
        n_trials,
        seed,
        ..BenchmarkConfig::default()
    };
    let report = monte_carlo_benchmark(&cfg).expect("benchmark failed");
    print!("{}", report.to_table());
}
