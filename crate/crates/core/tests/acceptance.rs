//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 regardless of outcome so that `cargo test` reports the harness
//! as run; set `LATENTPC_ACCEPTANCE_STRICT=1` to exit 1 on any FAIL.

mod common;

use std::fmt::Write as _;
use std::time::Instant;

use common::{brute_directed_path, dag_v_structures, moral_separated, pattern_skeleton, skeleton};
use latentpc::bench::{monte_carlo_benchmark, BenchmarkConfig};
use latentpc::claims::{definite_cause_edge, definite_cause_path, not_a_cause, PremiseReading, VerdictKind};
use latentpc::dsep::{d_separated_enum, d_separated_reach, SepQuery};
use latentpc::enumerate::labeled_dags;
use latentpc::graph::{Dag, EndpointMark, MarkedGraph, Pattern, VertexId};
use latentpc::latent::{
    arrowhead_oracle, inducing_path_exists, random_instance, restricted_pattern, separation_outcome, LatentError,
    LatentInstance,
};
use latentpc::pc::{pattern_represents, pc, DsepOracle, PcError};
use latentpc::search::{parse_report, search_counterexample, verify_report};
use latentpc::sem::random_sparse_dag;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURE: &str = include_str!("fixtures/counterexample_6_1.txt");

const MAX_ADJ_OMISSION: f64 = 0.05;
const MAX_ADJ_COMMISSION: f64 = 0.05;
const MAX_ARROW_OMISSION: f64 = 0.05;
const ARROW_COMMISSION_BAND: (f64, f64) = (0.05, 0.35);

const LATENT_INSTANCES: u64 = 1000;
const LATENT_EDGE_PROB: f64 = 0.35;

struct Outcome {
    pass: bool,
    summary: String,
    /// Deterministic record compared across runs.
    log: String,
}

fn pattern_colliders(p: &Pattern) -> Vec<(VertexId, VertexId, VertexId)> {
    let n = p.vertex_count();
    let mut out = Vec::new();
    for b in 0..n {
        for a in 0..n {
            for c in a + 1..n {
                if a != b && c != b && p.adjacent(a, b) && p.adjacent(c, b) && !p.adjacent(a, c) && p.arrow_into(a, b) && p.arrow_into(c, b) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out.sort();
    out
}

fn subsets(rest: &[VertexId]) -> impl Iterator<Item = Vec<VertexId>> + '_ {
    (0u32..1 << rest.len()).map(move |m| (0..rest.len()).filter(|&k| m >> k & 1 == 1).map(|k| rest[k]).collect())
}

fn pc_sound_on(g: &Dag) -> Result<(), String> {
    let p = pc(&DsepOracle::new(g)).map_err(|e| e.to_string())?.pattern;
    if pattern_skeleton(&p) != skeleton(g) {
        return Err("adjacencies differ".into());
    }
    if pattern_colliders(&p) != dag_v_structures(g) {
        return Err("unshielded colliders differ".into());
    }
    if !pattern_represents(&p, g).map_err(|e| e.to_string())? {
        return Err("pattern does not represent the graph".into());
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let mut log = String::new();
    let (mut checked, mut errors) = (0u64, 0u64);
    for n in 1..=5 {
        let mut layer_errors = 0;
        let dags = labeled_dags(n);
        for g in &dags {
            if n < 2 {
                continue;
            }
            checked += 1;
            if let Err(e) = pc_sound_on(g) {
                layer_errors += 1;
                let _ = writeln!(log, "n={n} {:?}: {e}", g.edges());
            }
        }
        errors += layer_errors;
        let _ = writeln!(log, "labeled n={n}: {} graphs, {layer_errors} errors", dags.len());
    }
    let mut random_errors = 0;
    for seed in 0..500 {
        let g = random_sparse_dag(10, 2.0, seed).unwrap();
        checked += 1;
        if let Err(e) = pc_sound_on(&g) {
            random_errors += 1;
            let _ = writeln!(log, "random seed={seed}: {e}");
        }
    }
    errors += random_errors;
    let _ = writeln!(log, "random 10-vertex: 500 graphs, {random_errors} errors");
    Outcome {
        pass: errors == 0,
        summary: format!("{checked} graphs, {errors} errors"),
        log,
    }
}

fn criterion_2() -> Outcome {
    let mut log = String::new();
    let (mut queries, mut disagreements) = (0u64, 0u64);
    let mut check = |g: &Dag, q: &SepQuery| {
        queries += 1;
        let e = d_separated_enum(g, q).unwrap();
        let r = d_separated_reach(g, q).unwrap();
        let m = moral_separated(g, q.x, q.y, &q.given);
        if e != r || e != m {
            disagreements += 1;
            let _ = writeln!(log, "{:?} {q:?}: enum={e} reach={r} moral={m}", g.edges());
        }
    };
    let mut exhaustive = 0u64;
    for n in 2..=5 {
        for g in labeled_dags(n) {
            for x in 0..n {
                for y in x + 1..n {
                    let rest: Vec<_> = (0..n).filter(|&v| v != x && v != y).collect();
                    for s in subsets(&rest) {
                        exhaustive += 1;
                        check(&g, &SepQuery::new(&g, x, y, &s).unwrap());
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..10_000u64 {
        let g = random_sparse_dag(20, 2.0, i / 100).unwrap();
        let mut vs: Vec<VertexId> = (0..20).collect();
        vs.shuffle(&mut rng);
        let k = rng.random_range(0..=6);
        let q = SepQuery::new(&g, vs[0], vs[1], &vs[2..2 + k]).unwrap();
        check(&g, &q);
    }
    let _ = writeln!(log, "exhaustive queries {exhaustive}, random queries {}", queries - exhaustive);
    let _ = writeln!(log, "disagreements {disagreements}");
    Outcome {
        pass: disagreements == 0,
        summary: format!("{queries} queries, {disagreements} disagreements"),
        log,
    }
}

/// Instance `i` of the shared random latent suite.
fn latent_instance(i: u64) -> LatentInstance {
    let observed = 2 + (i % 6) as usize;
    let latent = 1 + (i / 6 % 3) as usize;
    random_instance(observed, latent, LATENT_EDGE_PROB, i)
}

fn pattern_or_skip(inst: &LatentInstance, log: &mut String, i: u64) -> Option<Pattern> {
    match restricted_pattern(inst) {
        Ok(p) => Some(p),
        Err(LatentError::Pc(PcError::OrientationCycle { .. })) => {
            let _ = writeln!(log, "instance {i}: orientation cycle, skipped");
            None
        }
        Err(e) => panic!("instance {i}: {e}"),
    }
}

fn criterion_3() -> Outcome {
    let mut log = String::new();
    let (mut queries, mut failures, mut failing_instances, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..LATENT_INSTANCES {
        let inst = latent_instance(i);
        let Some(p) = pattern_or_skip(&inst, &mut log, i) else {
            skipped += 1;
            continue;
        };
        let obs = inst.observed().to_vec();
        let mut bad = 0;
        let mut first = None;
        for a in 0..obs.len() {
            for b in a + 1..obs.len() {
                let rest: Vec<_> = obs.iter().copied().filter(|&v| v != obs[a] && v != obs[b]).collect();
                for s in subsets(&rest) {
                    queries += 1;
                    let o = separation_outcome(&inst, &p, &[obs[a]], &[obs[b]], &s).unwrap();
                    if !o.holds() {
                        bad += 1;
                        first.get_or_insert((obs[a], obs[b], s.clone(), o.graph_separated));
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(i);
        for _ in 0..10 {
            if obs.len() < 3 {
                break;
            }
            let mut vs = obs.clone();
            vs.shuffle(&mut rng);
            let nx = rng.random_range(1..=vs.len() - 1);
            let ny = rng.random_range(1..=vs.len() - nx);
            let ns = rng.random_range(0..=vs.len() - nx - ny);
            let (xs, rest) = vs.split_at(nx);
            let (ys, rest) = rest.split_at(ny);
            let s = &rest[..ns];
            queries += 1;
            let o = separation_outcome(&inst, &p, xs, ys, s).unwrap();
            if !o.holds() {
                bad += 1;
                first.get_or_insert((xs[0], ys[0], s.to_vec(), o.graph_separated));
            }
        }
        if bad > 0 {
            failing_instances += 1;
            failures += bad;
            let (x, y, s, gsep) = first.unwrap();
            let g = inst.graph();
            let names: Vec<&str> = s.iter().map(|&v| g.name(v)).collect();
            let _ = writeln!(
                log,
                "instance {i}: {bad} failures; first {} vs {} given {{{}}}: graph separated={gsep}",
                g.name(x),
                g.name(y),
                names.join(",")
            );
        }
    }
    let _ = writeln!(log, "queries {queries}, failures {failures}, failing instances {failing_instances}, skipped {skipped}");
    Outcome {
        pass: failures == 0,
        summary: format!(
            "{} instances ({skipped} skipped), {queries} queries, {failures} failures in {failing_instances} instances",
            LATENT_INSTANCES
        ),
        log,
    }
}

fn criterion_4() -> Outcome {
    let mut log = String::new();
    let (mut instances, mut adj_mismatch, mut arrow_mismatch, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    for n in 3..=5 {
        let (mut layer_adj, mut layer_arrow) = (0u64, 0u64);
        for g in labeled_dags(n) {
            for hidden in 0..n {
                let obs: Vec<_> = (0..n).filter(|&v| v != hidden).collect();
                let inst = LatentInstance::new(g.clone(), &obs).unwrap();
                instances += 1;
                let p = match restricted_pattern(&inst) {
                    Ok(p) => p,
                    Err(LatentError::Pc(PcError::OrientationCycle { .. })) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => panic!("{e}"),
                };
                for a in 0..obs.len() {
                    for b in a + 1..obs.len() {
                        if p.adjacent(a, b) != inducing_path_exists(&inst, obs[a], obs[b]).unwrap() {
                            layer_adj += 1;
                        }
                        if !p.adjacent(a, b) {
                            continue;
                        }
                        for (u, v) in [(a, b), (b, a)] {
                            let mark = p.mark(v, u) == Some(EndpointMark::Arrow);
                            if mark != arrowhead_oracle(&inst, &p, obs[u], obs[v]).unwrap() {
                                layer_arrow += 1;
                            }
                        }
                    }
                }
            }
        }
        let _ = writeln!(log, "n={n}: adjacency mismatches {layer_adj}, arrowhead mismatches {layer_arrow}");
        adj_mismatch += layer_adj;
        arrow_mismatch += layer_arrow;
    }
    let _ = writeln!(log, "instances {instances}, skipped {skipped}");
    Outcome {
        pass: adj_mismatch == 0 && arrow_mismatch == 0,
        summary: format!(
            "{instances} instances ({skipped} skipped), adjacency mismatches {adj_mismatch}, arrowhead mismatches {arrow_mismatch}"
        ),
        log,
    }
}

fn criterion_5() -> Outcome {
    let mut log = String::new();
    let (mut semi_violations, mut unsound, mut definite, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..LATENT_INSTANCES {
        let inst = latent_instance(i);
        let Some(p) = pattern_or_skip(&inst, &mut log, i) else {
            skipped += 1;
            continue;
        };
        let g = inst.graph();
        let obs = inst.observed();
        for x in 0..obs.len() {
            for z in 0..obs.len() {
                if x == z {
                    continue;
                }
                let causal = brute_directed_path(g, obs[x], obs[z]);
                if causal && not_a_cause(&p, x, z).unwrap().kind == VerdictKind::NotACause {
                    semi_violations += 1;
                    let _ = writeln!(log, "instance {i}: {} -> {} has no semi-directed path", p.name(x), p.name(z));
                }
                for reading in [PremiseReading::ArrowInto, PremiseReading::Directed] {
                    for (rule, v) in [
                        ("edge", definite_cause_edge(&p, x, z, reading).unwrap()),
                        ("path", definite_cause_path(&p, x, z, reading).unwrap()),
                    ] {
                        if v.kind == VerdictKind::DefiniteCause {
                            definite += 1;
                            if !causal {
                                unsound += 1;
                                let _ = writeln!(log, "instance {i}: unsound {rule} {reading:?} {}", v.render(&p));
                            }
                        }
                    }
                }
            }
        }
    }
    let _ = writeln!(log, "definite verdicts {definite}, unsound {unsound}, semi-directed violations {semi_violations}, skipped {skipped}");
    Outcome {
        pass: semi_violations == 0 && unsound == 0,
        summary: format!(
            "{} instances ({skipped} skipped), {definite} definite verdicts, {unsound} unsound, {semi_violations} semi-directed violations",
            LATENT_INSTANCES
        ),
        log,
    }
}

fn criterion_6() -> Outcome {
    let mut log = String::new();
    let mut pass = true;
    let summary = match search_counterexample(6, 1) {
        Ok((report, stats)) => {
            let verified = verify_report(&report);
            let matches_fixture = report.to_string() == FIXTURE;
            let _ = writeln!(log, "found at vertices={} latents={} instance={}", stats.vertices, stats.latents, stats.instances);
            let _ = write!(log, "{report}");
            let _ = writeln!(log, "verified: {}", verified.is_ok());
            let _ = writeln!(log, "matches fixture: {matches_fixture}");
            pass &= verified.is_ok();
            format!(
                "found after {} instances ({} vertices, {} latent), verified={}",
                stats.instances,
                stats.vertices,
                stats.latents,
                verified.is_ok()
            )
        }
        Err(e) => {
            pass = false;
            let _ = writeln!(log, "search: {e}");
            e.to_string()
        }
    };
    let t = Instant::now();
    let fixture = parse_report(FIXTURE).and_then(|r| verify_report(&r));
    let quick = t.elapsed().as_secs_f64() < 1.0;
    let _ = writeln!(log, "fixture verified: {}", fixture.is_ok());
    pass &= fixture.is_ok() && quick;
    Outcome {
        pass,
        summary: format!("{summary}; fixture verified={} under 1 s={quick}", fixture.is_ok()),
        log,
    }
}

fn criterion_7() -> Outcome {
    let cfg = BenchmarkConfig::default();
    let r = monte_carlo_benchmark(&cfg).unwrap();
    let (ao, ac, ho, hc) = (
        r.adjacency_omission_rate(),
        r.adjacency_commission_rate(),
        r.arrowhead_omission_rate(),
        r.arrowhead_commission_rate(),
    );
    let checks = [
        ("adjacency omission", ao <= MAX_ADJ_OMISSION),
        ("adjacency commission", ac <= MAX_ADJ_COMMISSION),
        ("arrowhead omission", ho <= MAX_ARROW_OMISSION),
        ("arrowhead commission", (ARROW_COMMISSION_BAND.0..=ARROW_COMMISSION_BAND.1).contains(&hc)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Outcome {
        pass: failed.is_empty(),
        summary: format!(
            "adjacency omission {:.2}%, commission {:.2}%, arrowhead omission {:.2}%, commission {:.2}%, failed trials {}{}",
            ao * 100.0,
            ac * 100.0,
            ho * 100.0,
            hc * 100.0,
            r.failed_trials,
            if failed.is_empty() { String::new() } else { format!("; out of bounds: {}", failed.join(", ")) }
        ),
        log: r.to_kv(),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 7] = [
    (1, "exact-oracle PC recovers adjacencies and colliders", criterion_1),
    (2, "d-separation engines agree", criterion_2),
    (3, "separation in the graph matches separation in the restricted pattern", criterion_3),
    (4, "adjacency and arrowhead marks match the path oracles", criterion_4),
    (5, "causal-claim rules are sound", criterion_5),
    (6, "counterexample to the triangle-free strengthening", criterion_6),
    (7, "Monte Carlo error rates", criterion_7),
];

fn main() {
    let mut all_pass = true;
    let mut logs = Vec::new();
    for (id, name, run) in CRITERIA {
        let t = Instant::now();
        let o = run();
        all_pass &= o.pass;
        println!(
            "{} criterion {id} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary,
            t.elapsed().as_secs_f64()
        );
        logs.push(o.log);
    }
    let t = Instant::now();
    let differing: Vec<u32> = CRITERIA
        .iter()
        .zip(&logs)
        .filter(|((_, _, run), log)| run().log != **log)
        .map(|((id, _, _), _)| *id)
        .collect();
    let deterministic = differing.is_empty();
    all_pass &= deterministic;
    println!(
        "{} criterion 8 (repeat run gives identical logs): {} [{:.1}s]",
        if deterministic { "PASS" } else { "FAIL" },
        if deterministic { "criteria 1-7 identical".to_string() } else { format!("logs differ for {differing:?}") },
        t.elapsed().as_secs_f64()
    );
    if std::env::var_os("LATENTPC_ACCEPTANCE_VERBOSE").is_some() {
        for ((id, _, _), log) in CRITERIA.iter().zip(&logs) {
            println!("--- criterion {id} log\n{log}");
        }
    }
    if !all_pass && std::env::var_os("LATENTPC_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
