//! Random sparse DAGs, linear-Gaussian structural equation models, and the
//! CSV dataset format.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::graph::{Dag, MarkedGraph, VertexId};

#[derive(Debug, Error)]
pub enum SemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dataset: {0}")]
    Shape(String),
    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coefficient magnitudes are drawn uniformly from `[lo, hi]` with a random sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBand {
    pub lo: f64,
    pub hi: f64,
}

impl Default for CoefficientBand {
    fn default() -> Self {
        CoefficientBand { lo: 0.5, hi: 1.5 }
    }
}

impl CoefficientBand {
    pub fn validate(&self) -> Result<(), SemError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && 0.0 <= self.lo && self.lo <= self.hi) {
            return Err(SemError::InvalidParameter(format!(
                "coefficient band [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn contains(&self, c: f64) -> bool {
        (self.lo..=self.hi).contains(&c.abs())
    }
}

/// Vertex names `X1`..`Xn`, zero-padded so that name order is index order.
pub fn variable_names(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("X{i:0width$}")).collect()
}

/// Each forward pair of a random vertex order becomes an edge with
/// probability `avg_degree / (n - 1)`.
pub fn random_sparse_dag(n: usize, avg_degree: f64, seed: u64) -> Result<Dag, SemError> {
    random_sparse_dag_with(n, avg_degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_sparse_dag_with<R: Rng>(n: usize, avg_degree: f64, rng: &mut R) -> Result<Dag, SemError> {
    if n < 2 {
        return Err(SemError::InvalidParameter(format!("need at least 2 vertices, got {n}")));
    }
    if !(avg_degree > 0.0) || !avg_degree.is_finite() {
        return Err(SemError::InvalidParameter(format!("avg_degree must be positive, got {avg_degree}")));
    }
    let p = (avg_degree / (n - 1) as f64).min(1.0);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Ok(Dag::from_ids(variable_names(n), &edges).expect("forward edges are acyclic"))
}

/// `v = Σ coefficient(u, v) · u + noise_sd(v) · ε` for each parent `u` of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSem {
    dag: Dag,
    coefficients: BTreeMap<(VertexId, VertexId), f64>,
    noise_sd: Vec<f64>,
}

impl LinearSem {
    pub fn new(
        dag: Dag,
        coefficients: BTreeMap<(VertexId, VertexId), f64>,
        noise_sd: Vec<f64>,
    ) -> Result<LinearSem, SemError> {
        let edges = dag.edges();
        if coefficients.len() != edges.len() || edges.iter().any(|e| !coefficients.contains_key(e)) {
            return Err(SemError::InvalidParameter("coefficients must key exactly the edges".into()));
        }
        if coefficients.values().any(|c| !c.is_finite()) {
            return Err(SemError::InvalidParameter("non-finite coefficient".into()));
        }
        if noise_sd.len() != dag.vertex_count() || noise_sd.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(SemError::InvalidParameter("noise sds must be positive, one per vertex".into()));
        }
        Ok(LinearSem {
            dag,
            coefficients,
            noise_sd,
        })
    }

    /// Coefficients from `band`, unit noise.
    pub fn random(dag: Dag, band: CoefficientBand, seed: u64) -> Result<LinearSem, SemError> {
        LinearSem::random_with(dag, band, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn random_with<R: Rng>(dag: Dag, band: CoefficientBand, rng: &mut R) -> Result<LinearSem, SemError> {
        band.validate()?;
        let mut coefficients = BTreeMap::new();
        for e in dag.edges() {
            let mag = rng.random_range(band.lo..=band.hi);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            coefficients.insert(e, sign * mag);
        }
        let n = dag.vertex_count();
        LinearSem::new(dag, coefficients, vec![1.0; n])
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn coefficient(&self, tail: VertexId, head: VertexId) -> Option<f64> {
        self.coefficients.get(&(tail, head)).copied()
    }

    pub fn coefficients(&self) -> &BTreeMap<(VertexId, VertexId), f64> {
        &self.coefficients
    }

    pub fn noise_sd(&self, v: VertexId) -> f64 {
        self.noise_sd[v]
    }
}

/// Draws `n` rows, each variable evaluated in topological order.
pub fn sample_linear_sem(sem: &LinearSem, n: usize, seed: u64) -> Result<Dataset, SemError> {
    sample_linear_sem_with(sem, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_linear_sem_with<R: Rng>(sem: &LinearSem, n: usize, rng: &mut R) -> Result<Dataset, SemError> {
    if n == 0 {
        return Err(SemError::InvalidParameter("sample count must be at least 1".into()));
    }
    let g = &sem.dag;
    let p = g.vertex_count();
    let parents: Vec<Vec<(VertexId, f64)>> = (0..p)
        .map(|v| g.parents(v).into_iter().map(|u| (u, sem.coefficients[&(u, v)])).collect())
        .collect();
    let order = g.topological_order().to_vec();
    let mut data = DMatrix::<f64>::zeros(n, p);
    let mut row = vec![0.0; p];
    for r in 0..n {
        for &v in &order {
            let eps: f64 = rng.sample(StandardNormal);
            row[v] = parents[v].iter().map(|&(u, c)| c * row[u]).sum::<f64>() + sem.noise_sd[v] * eps;
        }
        for (v, &x) in row.iter().enumerate() {
            data[(r, v)] = x;
        }
    }
    Ok(Dataset {
        columns: g.names().to_vec(),
        data,
    })
}

/// Named columns of real samples, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    data: DMatrix<f64>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: &[Vec<f64>]) -> Result<Dataset, SemError> {
        if rows.is_empty() {
            return Err(SemError::Shape("at least one row is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &columns {
            if !seen.insert(c) {
                return Err(SemError::Shape(format!("duplicate column `{c}`")));
            }
        }
        let p = columns.len();
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(SemError::Shape(format!("row {} has {} fields, expected {p}", i + 1, rows[i].len())));
        }
        let data = DMatrix::from_fn(rows.len(), p, |r, c| rows[r][c]);
        Ok(Dataset { columns, data })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn n_samples(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.data.ncols()
    }

    /// Samples as an `n × columns` matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    /// Columns reordered by name, so ids match a graph over the same names.
    pub fn sorted_by_name(&self) -> Dataset {
        let mut idx: Vec<usize> = (0..self.columns.len()).collect();
        idx.sort_by(|&a, &b| self.columns[a].cmp(&self.columns[b]));
        Dataset {
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            data: self.data.select_columns(&idx),
        }
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Dataset, SemError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let csv_err = |e: csv::Error| SemError::Csv {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        };
        let columns: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| SemError::Csv {
                        line,
                        message: format!("`{f}` is not a number"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Dataset::new(columns, &rows)
    }

    /// Values are written with shortest round-trip precision.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SemError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| SemError::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for r in 0..self.n_samples() {
            w.write_record((0..self.n_columns()).map(|c| self.data[(r, c)].to_string()))
                .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}
