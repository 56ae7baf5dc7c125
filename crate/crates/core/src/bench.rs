//! Monte Carlo error rates of PC on simulated linear-Gaussian data.
//!
//! Each trial draws a sparse DAG, a linear SEM and a dataset, runs PC with
//! the Fisher z oracle and compares the result with the exact-oracle
//! pattern of the true DAG.
//!
//! Adjacency errors are counted over vertex pairs. Arrowhead errors are
//! counted only on edges present in both patterns: an omitted arrowhead is
//! an Arrow mark of the true pattern missing from the estimate, an added
//! arrowhead the converse. Omission rates divide by the true count;
//! commission rates divide by the estimated count by default.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::citest::DataOracle;
use crate::graph::{EndpointMark, MarkedGraph, Pattern};
use crate::pc::{pc, DsepOracle, PcError};
use crate::sem::{random_sparse_dag_with, sample_linear_sem_with, CoefficientBand, LinearSem, SemError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sem(#[from] SemError),
}

/// The estimated-side denominator of commission rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CommissionBase {
    /// Errors among everything the estimate asserts.
    #[default]
    Estimated,
    /// Errors among the opportunities the truth leaves open: non-adjacent
    /// true pairs, or Plain true marks on shared edges.
    TrueComplement,
}

/// Which oracle the estimate is computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimateOracle {
    #[default]
    FisherZ,
    /// d-separation in the true DAG; every rate is then zero.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkConfig {
    pub n_vars: usize,
    pub avg_degree: f64,
    pub n_samples: usize,
    pub alpha: f64,
    pub n_trials: usize,
    pub coeff_band: CoefficientBand,
    pub seed: u64,
    pub commission_base: CommissionBase,
    pub oracle: EstimateOracle,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            n_vars: 10,
            avg_degree: 2.0,
            n_samples: 5000,
            alpha: 0.01,
            n_trials: 100,
            coeff_band: CoefficientBand::default(),
            seed: 0,
            commission_base: CommissionBase::Estimated,
            oracle: EstimateOracle::FisherZ,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidConfig(m));
        if self.n_vars < 2 {
            return bad(format!("vars must be at least 2, got {}", self.n_vars));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree.is_finite()) {
            return bad(format!("degree must be positive, got {}", self.avg_degree));
        }
        if self.n_trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.oracle == EstimateOracle::FisherZ && self.n_samples <= self.n_vars + 1 {
            return bad(format!(
                "samples must exceed vars + 1 for the Fisher z test, got {}",
                self.n_samples
            ));
        }
        self.coeff_band.validate()?;
        Ok(())
    }
}

/// Summed error counts and their denominators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorCounts {
    pub adjacency_omitted: u64,
    pub adjacency_added: u64,
    pub true_adjacencies: u64,
    pub true_nonadjacencies: u64,
    pub estimated_adjacencies: u64,
    pub arrowhead_omitted: u64,
    pub arrowhead_added: u64,
    pub true_arrowheads: u64,
    pub true_plain_marks: u64,
    pub estimated_arrowheads: u64,
}

impl ErrorCounts {
    fn add(&mut self, o: &ErrorCounts) {
        self.adjacency_omitted += o.adjacency_omitted;
        self.adjacency_added += o.adjacency_added;
        self.true_adjacencies += o.true_adjacencies;
        self.true_nonadjacencies += o.true_nonadjacencies;
        self.estimated_adjacencies += o.estimated_adjacencies;
        self.arrowhead_omitted += o.arrowhead_omitted;
        self.arrowhead_added += o.arrowhead_added;
        self.true_arrowheads += o.true_arrowheads;
        self.true_plain_marks += o.true_plain_marks;
        self.estimated_arrowheads += o.estimated_arrowheads;
    }
}

/// Compares an estimated pattern with the true one over the same vertices.
pub fn compare_patterns(truth: &Pattern, est: &Pattern) -> ErrorCounts {
    let mut c = ErrorCounts::default();
    let n = truth.vertex_count();
    let arrow = |p: &Pattern, at: usize, other: usize| p.mark(at, other) == Some(EndpointMark::Arrow);
    for a in 0..n {
        for b in a + 1..n {
            let (t, e) = (truth.adjacent(a, b), est.adjacent(a, b));
            c.true_adjacencies += t as u64;
            c.true_nonadjacencies += !t as u64;
            c.estimated_adjacencies += e as u64;
            c.adjacency_omitted += (t && !e) as u64;
            c.adjacency_added += (!t && e) as u64;
            if t && e {
                for (at, other) in [(a, b), (b, a)] {
                    let (ta, ea) = (arrow(truth, at, other), arrow(est, at, other));
                    c.true_arrowheads += ta as u64;
                    c.true_plain_marks += !ta as u64;
                    c.estimated_arrowheads += ea as u64;
                    c.arrowhead_omitted += (ta && !ea) as u64;
                    c.arrowhead_added += (!ta && ea) as u64;
                }
            }
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub config: BenchmarkConfig,
    pub counts: ErrorCounts,
    pub trial_count: usize,
    /// Trials whose estimate could not be computed; excluded from counts.
    pub failed_trials: usize,
    /// `(trial index, reason)` for each failed trial.
    pub failures: Vec<(usize, String)>,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ErrorReport {
    fn commission_den(&self, estimated: u64, complement: u64) -> u64 {
        match self.config.commission_base {
            CommissionBase::Estimated => estimated,
            CommissionBase::TrueComplement => complement,
        }
    }

    pub fn adjacency_omission_rate(&self) -> f64 {
        ratio(self.counts.adjacency_omitted, self.counts.true_adjacencies)
    }

    pub fn adjacency_commission_rate(&self) -> f64 {
        let c = &self.counts;
        ratio(c.adjacency_added, self.commission_den(c.estimated_adjacencies, c.true_nonadjacencies))
    }

    pub fn arrowhead_omission_rate(&self) -> f64 {
        ratio(self.counts.arrowhead_omitted, self.counts.true_arrowheads)
    }

    pub fn arrowhead_commission_rate(&self) -> f64 {
        let c = &self.counts;
        ratio(c.arrowhead_added, self.commission_den(c.estimated_arrowheads, c.true_plain_marks))
    }

    fn rows(&self) -> [(&'static str, f64, u64, u64); 4] {
        let c = &self.counts;
        [
            ("adjacency_omission", self.adjacency_omission_rate(), c.adjacency_omitted, c.true_adjacencies),
            (
                "adjacency_commission",
                self.adjacency_commission_rate(),
                c.adjacency_added,
                self.commission_den(c.estimated_adjacencies, c.true_nonadjacencies),
            ),
            ("arrowhead_omission", self.arrowhead_omission_rate(), c.arrowhead_omitted, c.true_arrowheads),
            (
                "arrowhead_commission",
                self.arrowhead_commission_rate(),
                c.arrowhead_added,
                self.commission_den(c.estimated_arrowheads, c.true_plain_marks),
            ),
        ]
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let cfg = &self.config;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "vars={} degree={} samples={} alpha={} trials={} seed={}",
            cfg.n_vars, cfg.avg_degree, cfg.n_samples, cfg.alpha, cfg.n_trials, cfg.seed
        );
        let _ = writeln!(s, "{:<22} {:>8} {:>8} {:>8}", "metric", "rate", "errors", "of");
        for (name, rate, num, den) in self.rows() {
            let _ = writeln!(s, "{name:<22} {:>7.2}% {num:>8} {den:>8}", rate * 100.0);
        }
        let _ = writeln!(
            s,
            "arrowheads counted on edges shared by both patterns; commission over {}",
            match cfg.commission_base {
                CommissionBase::Estimated => "estimated marks",
                CommissionBase::TrueComplement => "true complement",
            }
        );
        let _ = writeln!(s, "failed trials: {}", self.failed_trials);
        s
    }

    /// One `key=value` per line.
    pub fn to_kv(&self) -> String {
        let cfg = &self.config;
        let mut s = String::new();
        for (k, v) in [
            ("vars", cfg.n_vars.to_string()),
            ("degree", cfg.avg_degree.to_string()),
            ("samples", cfg.n_samples.to_string()),
            ("alpha", cfg.alpha.to_string()),
            ("trials", self.trial_count.to_string()),
            ("failed_trials", self.failed_trials.to_string()),
            ("seed", cfg.seed.to_string()),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        for (name, rate, num, den) in self.rows() {
            let _ = writeln!(s, "{name}_rate={rate}");
            let _ = writeln!(s, "{name}_errors={num}");
            let _ = writeln!(s, "{name}_denominator={den}");
        }
        s
    }
}

fn run_trial(cfg: &BenchmarkConfig, trial: usize) -> Result<Result<ErrorCounts, String>, SemError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ trial as u64);
    let dag = random_sparse_dag_with(cfg.n_vars, cfg.avg_degree, &mut rng)?;
    let truth = match pc(&DsepOracle::new(&dag)) {
        Ok(out) => out.pattern,
        Err(e) => return Ok(Err(e.to_string())),
    };
    let est = match cfg.oracle {
        EstimateOracle::Exact => pc(&DsepOracle::new(&dag)),
        EstimateOracle::FisherZ => {
            let sem = LinearSem::random_with(dag, cfg.coeff_band, &mut rng)?;
            let data = sample_linear_sem_with(&sem, cfg.n_samples, &mut rng)?;
            let oracle = match DataOracle::new(&data, cfg.alpha) {
                Ok(o) => o,
                Err(e) => return Ok(Err(e.to_string())),
            };
            pc(&oracle)
        }
    };
    Ok(est.map(|e| compare_patterns(&truth, &e.pattern)).map_err(|e: PcError| e.to_string()))
}

/// Runs all trials on the current rayon pool; results are aggregated in
/// trial order, so the report does not depend on scheduling.
pub fn monte_carlo_benchmark(cfg: &BenchmarkConfig) -> Result<ErrorReport, BenchError> {
    cfg.validate()?;
    let results: Vec<_> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<_, _>>()?;
    let mut counts = ErrorCounts::default();
    let mut failures = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(c) => counts.add(&c),
            Err(e) => failures.push((t, e)),
        }
    }
    Ok(ErrorReport {
        config: *cfg,
        counts,
        trial_count: cfg.n_trials,
        failed_trials: failures.len(),
        failures,
    })
}
