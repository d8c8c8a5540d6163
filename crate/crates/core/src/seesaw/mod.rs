//! Alternating maximization of Bell values over observables and (product)
//! states. Values found are lower bounds on the corresponding maxima.

mod engine;
mod partition;

pub use partition::Partition;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bellexpr::{bell_value, BellExpression};
use crate::error::{Error, Result};
use crate::qcore::{tensor_product, top_eigenpair, CMatrix, HermitianOperator, ObservableAssignment, StateVector, C64, MAX_DENSE_LOG2_DIM};
use engine::{Engine, Strategy};

/// Largest total dimension for which [`bell_operator`] builds a dense matrix.
pub const MAX_BELL_OPERATOR_DIM: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop once a sweep gains less than this.
    pub tol: f64,
    pub seed: u64,
    /// Let the sign step return `±I`. When false, qubit observables stay on
    /// the Bloch sphere.
    pub allow_trivial: bool,
    /// Largest number of partitions optimized by
    /// [`kproducible_lower_bound`].
    pub partition_cap: usize,
    /// Over the cap, optimize a seeded sample of `partition_cap` partitions
    /// instead of failing.
    pub sample_partitions: bool,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_sweeps: 500,
            tol: 1e-9,
            seed: 0,
            allow_trivial: true,
            partition_cap: 1000,
            sample_partitions: false,
        }
    }
}

impl SeesawConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_restarts(self, restarts: usize) -> Self {
        Self { restarts, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_sweeps == 0 || self.partition_cap == 0 {
            return Err(Error::InvalidParameter("restarts, sweeps and partition cap must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Best strategy found by a see-saw run.
#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub value: f64,
    pub observables: ObservableAssignment,
    /// One state per partition group, over that group's parties in order.
    pub states: Vec<StateVector>,
    pub partition: Partition,
    pub sweeps: usize,
    pub seed: u64,
    /// Index of the winning (partition, restart) task.
    pub task: usize,
    pub converged: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ObservableRecord {
    /// `(c0, cx, cy, cz)` in the Pauli basis.
    Qubit([f64; 4]),
    Matrix { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

#[derive(Serialize)]
struct ResultRecord<'a> {
    value: f64,
    partition: String,
    seed: u64,
    task: usize,
    sweeps: usize,
    converged: bool,
    observables: Vec<Vec<ObservableRecord>>,
    states: Vec<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expression: Option<&'a str>,
}

impl OptimizationResult {
    /// Full product state with parties in their original order.
    pub fn state(&self) -> Result<StateVector> {
        let product = StateVector::product(&self.states);
        let order: Vec<usize> = self.partition.groups().iter().flatten().copied().collect();
        let mut inverse = vec![0; order.len()];
        for (pos, &p) in order.iter().enumerate() {
            inverse[p] = pos;
        }
        product.permuted(&inverse)
    }

    /// Recomputes the Bell value from the stored state and observables.
    pub fn reevaluate(&self, expr: &BellExpression) -> Result<f64> {
        bell_value(expr, &self.state()?, &self.observables)
    }

    pub fn to_json(&self) -> Result<String> {
        self.to_json_named(None)
    }

    pub(crate) fn to_json_named(&self, expression: Option<&str>) -> Result<String> {
        let observables = (0..self.observables.n())
            .map(|p| {
                self.observables
                    .party(p)
                    .iter()
                    .map(|op| match op.bloch() {
                        Some(b) => ObservableRecord::Qubit(b),
                        None => matrix_record(op.matrix()),
                    })
                    .collect()
            })
            .collect();
        let states = self
            .states
            .iter()
            .map(|s| s.amplitudes().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        let record = ResultRecord {
            value: self.value,
            partition: self.partition.to_string(),
            seed: self.seed,
            task: self.task,
            sweeps: self.sweeps,
            converged: self.converged,
            observables,
            states,
            expression,
        };
        Ok(serde_json::to_string_pretty(&record)?)
    }
}

fn matrix_record(m: &CMatrix) -> ObservableRecord {
    let rows = |f: fn(&C64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
    ObservableRecord::Matrix {
        re: rows(|z| z.re),
        im: rows(|z| z.im),
    }
}

fn task_rng(seed: u64, task: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task as u64);
    rng
}

fn check_dims(expr: &BellExpression, dims: &[usize]) -> Result<()> {
    if dims.len() != expr.n() {
        return Err(Error::DimensionMismatch {
            expected: expr.n(),
            actual: dims.len(),
        });
    }
    if dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter("local dimensions must be at least 2".into()));
    }
    let log2: f64 = dims.iter().map(|&d| (d as f64).log2()).sum();
    if log2 > MAX_DENSE_LOG2_DIM + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "total dimension 2^{log2:.1} exceeds 2^{MAX_DENSE_LOG2_DIM}"
        )));
    }
    Ok(())
}

struct TaskResult {
    task: usize,
    partition: usize,
    outcome: engine::Outcome,
}

/// Runs every `(partition, restart)` task and keeps the best, ties going to
/// the lowest task index.
fn run_tasks(
    expr: &BellExpression,
    dims: &[usize],
    partitions: &[Partition],
    fixed_state: Option<&[C64]>,
    config: &SeesawConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    let engines = partitions
        .iter()
        .map(|p| Engine::new(expr, dims, p, config.allow_trivial))
        .collect::<Result<Vec<_>>>()?;
    let tasks = partitions.len() * config.restarts;
    let results = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let pi = task / config.restarts;
            let engine = &engines[pi];
            let mut rng = task_rng(config.seed, task);
            let mut start = engine.random_strategy(&mut rng);
            if let Some(s) = fixed_state {
                start.states = vec![s.to_vec()];
            }
            let outcome = engine.optimize(start, fixed_state.is_some(), config.max_sweeps, config.tol)?;
            Ok(TaskResult {
                task,
                partition: pi,
                outcome,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = results
        .into_iter()
        .reduce(|a, b| if b.outcome.value > a.outcome.value { b } else { a })
        .expect("at least one task");
    let partition = partitions[best.partition].clone();
    let Strategy { obs, states } = best.outcome.strategy;
    let states = partition
        .groups()
        .iter()
        .zip(states)
        .map(|(g, amps)| StateVector::normalized(g.iter().map(|&p| dims[p]).collect(), DVector::from_vec(amps)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OptimizationResult {
        value: best.outcome.value,
        observables: ObservableAssignment::from_ops_unchecked(obs),
        states,
        partition,
        sweeps: best.outcome.sweeps,
        seed: config.seed,
        task: best.task,
        converged: best.outcome.converged,
    })
}

/// Maximizes over observables for a fixed state.
pub fn optimize_observables(state: &StateVector, expr: &BellExpression, config: &SeesawConfig) -> Result<OptimizationResult> {
    if state.n() != expr.n() {
        return Err(Error::DimensionMismatch {
            expected: expr.n(),
            actual: state.n(),
        });
    }
    let amps: Vec<C64> = state.amplitudes().iter().copied().collect();
    run_tasks(expr, state.dims(), &[Partition::whole(expr.n())], Some(&amps), config)
}

/// `Σ_t c_t ⊗_p A_{p, s_t(p)}` as a dense matrix.
pub fn bell_operator(expr: &BellExpression, observables: &ObservableAssignment) -> Result<HermitianOperator> {
    let n = expr.n();
    if observables.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: observables.n(),
        });
    }
    let dims = observables.dims();
    let dim: usize = dims.iter().product();
    if dim > MAX_BELL_OPERATOR_DIM {
        return Err(Error::InvalidParameter(format!(
            "Bell operator of dimension {dim} exceeds {MAX_BELL_OPERATOR_DIM}"
        )));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for t in expr.terms() {
        let factors = (0..n)
            .map(|p| match t.settings.get(p) {
                None => Ok(HermitianOperator::identity(dims[p])),
                Some(x) => observables.get(p, x).cloned().ok_or(Error::SettingOutOfRange {
                    party: p + 1,
                    setting: x,
                    count: observables.party(p).len(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        m += tensor_product(&factors).matrix() * C64::new(t.coeff, 0.0);
    }
    HermitianOperator::symmetrized(m, 1e-9)
}

/// Top eigenvector and eigenvalue of the Bell operator.
pub fn optimize_state(expr: &BellExpression, observables: &ObservableAssignment) -> Result<(StateVector, f64)> {
    let op = bell_operator(expr, observables)?;
    let (value, v) = top_eigenpair(op.matrix())?;
    Ok((StateVector::normalized(observables.dims(), v)?, value))
}

/// Best value over observables and unrestricted pure states.
pub fn full_seesaw(expr: &BellExpression, dims: &[usize], config: &SeesawConfig) -> Result<OptimizationResult> {
    check_dims(expr, dims)?;
    run_tasks(expr, dims, &[Partition::whole(expr.n())], None, config)
}

/// Best value over states that are products across groups of at most `k`
/// parties. `k ≥ n` is unrestricted.
pub fn kproducible_lower_bound(expr: &BellExpression, k: usize, dims: &[usize], config: &SeesawConfig) -> Result<OptimizationResult> {
    check_dims(expr, dims)?;
    let n = expr.n();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut partitions = Partition::maximal(n, k.min(n));
    if partitions.len() > config.partition_cap {
        if !config.sample_partitions {
            return Err(Error::EnumerationCap {
                size: partitions.len() as u128,
                cap: config.partition_cap as u128,
            });
        }
        use rand::seq::SliceRandom;
        partitions.shuffle(&mut task_rng(config.seed, usize::MAX));
        partitions.truncate(config.partition_cap);
    }
    run_tasks(expr, dims, &partitions, None, config)
}

/// Effective operator of observable `(party, setting)` against a fixed
/// state: the value equals `Tr(A_{party,setting} · H)` plus terms not
/// involving that observable.
pub fn effective_operator(
    state: &StateVector,
    expr: &BellExpression,
    observables: &ObservableAssignment,
    party: usize,
    setting: usize,
) -> Result<HermitianOperator> {
    if party >= expr.n() || setting == 0 || setting > expr.settings_per_party()[party] {
        return Err(Error::InvalidParameter(format!("no observable slot ({party}, {setting})")));
    }
    if observables.settings_per_party() != expr.settings_per_party() || observables.dims() != state.dims() {
        return Err(Error::InvalidParameter("observables do not match the expression and state".into()));
    }
    let engine = Engine::new(expr, state.dims(), &Partition::whole(expr.n()), true)?;
    let strategy = Strategy {
        obs: (0..expr.n()).map(|p| observables.party(p).to_vec()).collect(),
        states: vec![state.amplitudes().iter().copied().collect()],
    };
    engine.effective_operator(&strategy, party, setting)
}

/// The sign of [`effective_operator`], with kernel directions set to +1.
pub fn sign_update(
    state: &StateVector,
    expr: &BellExpression,
    observables: &ObservableAssignment,
    party: usize,
    setting: usize,
) -> Result<ObservableAssignment> {
    let h = effective_operator(state, expr, observables, party, setting)?;
    let mut out = observables.clone();
    out.set(party, setting, h.sign(engine::KERNEL_TOL));
    Ok(out)
}
