//! A hidden common cause shows up as a bidirected edge in the pattern over
//! the observed variables.

use latentpc::format::write_pattern;
use latentpc::latent::{arrowhead_certificate, inducing_paths, restricted_pattern, ArrowCertificate, LatentInstance};
use latentpc::{Dag, MarkedGraph};

fn main() {
    let g = Dag::build(
        ["A", "B", "T", "X", "Y"],
        &[("A", "X"), ("T", "X"), ("T", "Y"), ("B", "Y")],
    )
    .unwrap();
    let inst = LatentInstance::by_names(g, &["A", "X", "Y", "B"]).unwrap();
    let p = restricted_pattern(&inst).expect("pattern");
    print!("{}", write_pattern(&p));

    let (x, y) = (inst.graph().vertex("X").unwrap(), inst.graph().vertex("Y").unwrap());
    for path in inducing_paths(&inst, x, y).unwrap() {
        println!("inducing path: {}", path.display(inst.graph()));
    }
    let (px, py) = (inst.pattern_id(x).unwrap(), inst.pattern_id(y).unwrap());
    match arrowhead_certificate(&inst, &p, x, y).unwrap() {
        Some(ArrowCertificate::InducedCollider { c }) => {
            println!("arrowhead at Y: {} also points into Y and is not adjacent to X", inst.graph().name(c))
        }
        Some(ArrowCertificate::Descendant { c }) => {
            println!("arrowhead at Y: {} points into X and Y descends from X", inst.graph().name(c))
        }
        None => println!("no certificate for an arrowhead at Y"),
    }
    println!("pattern mark at Y: {:?}", p.mark(py, px));
}
