//! From simulated linear-Gaussian data to a pattern, compared with the
//! pattern the true DAG implies.
//!
//! Usage: `cargo run --release --example data_discovery [seed]`

use latentpc::bench::compare_patterns;
use latentpc::citest::DataOracle;
use latentpc::format::{write_dag, write_pattern};
use latentpc::pc::{pc, DsepOracle};
use latentpc::sem::{random_sparse_dag, sample_linear_sem, CoefficientBand, LinearSem};
use latentpc::MarkedGraph;

fn main() {
    let seed = std::env::args().nth(1).map_or(4, |s| s.parse().expect("seed"));
    let g = random_sparse_dag(7, 2.0, seed).unwrap();
    let sem = LinearSem::random(g.clone(), CoefficientBand::default(), seed).unwrap();
    let data = sample_linear_sem(&sem, 5000, seed).unwrap();

    let all: Vec<_> = (0..g.vertex_count()).collect();
    println!("# generating DAG");
    print!("{}", write_dag(&g, &all));

    let oracle = DataOracle::new(&data, 0.01).unwrap();
    let est = pc(&oracle).expect("pc on data");
    println!("# estimated pattern ({} tests computed)", oracle.computations());
    print!("{}", write_pattern(&est.pattern));

    let truth = pc(&DsepOracle::new(&g)).unwrap().pattern;
    println!("# errors against the true pattern");
    println!("{:?}", compare_patterns(&truth, &est.pattern));
}
