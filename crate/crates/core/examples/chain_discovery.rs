//! PC on a small DAG with the exact d-separation oracle, printing the
//! trace of deletions and orientations.

use latentpc::format::write_pattern;
use latentpc::pc::{pc, pattern_represents, DsepOracle};
use latentpc::{Dag, MarkedGraph};

fn main() {
    // Two independent causes of X, which then drives a chain to W.
    let g = Dag::build(["A", "B", "X", "Z", "W"], &[("A", "X"), ("B", "X"), ("X", "Z"), ("Z", "W")]).unwrap();
    let out = pc(&DsepOracle::new(&g)).expect("pc failed");

    println!("# trace");
    print!("{}", out.trace.render(out.pattern.names()));
    println!("# pattern");
    print!("{}", write_pattern(&out.pattern));
    println!("represents the DAG: {}", pattern_represents(&out.pattern, &g).unwrap());

    let chain = Dag::build(["A", "B", "C"], &[("A", "B"), ("B", "C")]).unwrap();
    let out = pc(&DsepOracle::new(&chain)).unwrap();
    println!("# a bare chain stays undirected");
    print!("{}", write_pattern(&out.pattern));
}
