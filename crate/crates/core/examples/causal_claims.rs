//! Reading causal conclusions off a pattern: definite causes, definite
//! non-causes, and cases the pattern leaves open.

use latentpc::claims::{evaluate_auto, evaluate_claim, ClaimRule, PremiseReading};
use latentpc::format::parse_pattern;
use latentpc::MarkedGraph;

fn main() {
    let p = parse_pattern(
        "A -> X\nB -> X\nX -> Z\nZ -> W\nX <-> Q\nW -- R\n",
    )
    .unwrap();
    let v = |n: &str| p.vertex(n).unwrap();
    for (from, to) in [("X", "Z"), ("X", "W"), ("Z", "X"), ("X", "Q"), ("W", "R"), ("A", "B")] {
        let verdict = evaluate_auto(&p, v(from), v(to), PremiseReading::ArrowInto).unwrap();
        println!("{from} => {to}: {}", verdict.render(&p));
    }

    // The edge rule alone, with the stricter reading of the anchor.
    let strict = evaluate_claim(&p, v("X"), v("Z"), ClaimRule::Edge, PremiseReading::Directed).unwrap();
    println!("X => Z, edge rule, directed anchor: {}", strict.render(&p));
}
