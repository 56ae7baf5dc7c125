//! Searches small DAGs with one latent vertex for a directed pattern edge
//! that does not correspond to any directed path in the generating graph.

use latentpc::MarkedGraph;
use latentpc::search::{search_counterexample, verify_report};

fn main() {
    let (report, stats) = search_counterexample(6, 1).expect("search failed");
    println!(
        "found after {} instances ({} vertices, {} latent)",
        stats.instances, stats.vertices, stats.latents
    );
    print!("{report}");
    verify_report(&report).expect("report does not verify");
    if let Some((a, b, t)) = report.triangle_on_path() {
        let p = &report.pattern;
        println!("# triangle {} {} {}", p.name(a), p.name(b), p.name(t));
    }
}
