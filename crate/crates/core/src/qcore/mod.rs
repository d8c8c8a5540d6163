//! Dense complex linear algebra, standard multipartite states, Born-rule
//! probabilities and correlators.
//!
//! Everything here is a pure function of its inputs. States are stored as
//! dense amplitude vectors with party 0 as the most significant factor.

mod eigen;
mod operator;
mod state;

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;

pub use operator::{hermiticity_defect, tensor_product, top_eigenpair, HermitianOperator};
pub use state::StateVector;
pub(crate) use state::{apply_local, reduced_cross};

use crate::bellexpr::SettingVector;
use crate::error::{Error, Result};
use crate::graphwit::{generator, Graph};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Default absolute tolerance for expectation values and eigenvalue checks.
pub const DEFAULT_TOL: f64 = 1e-10;
pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;

/// Largest dense qudit-GHZ instance stored explicitly, as `n·log2(d)`.
pub const MAX_DENSE_LOG2_DIM: f64 = 22.0;

/// Per party, per nontrivial setting, a Hermitian observable with spectrum
/// in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableAssignment {
    ops: Vec<Vec<HermitianOperator>>,
}

impl ObservableAssignment {
    pub fn new(ops: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("assignment needs at least one party".into()));
        }
        for (party, settings) in ops.iter().enumerate() {
            let Some(first) = settings.first() else {
                return Err(Error::InvalidParameter(format!(
                    "party {} has no settings",
                    party + 1
                )));
            };
            for op in settings {
                if op.dim() != first.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: first.dim(),
                        actual: op.dim(),
                    });
                }
                if !op.is_contraction(DEFAULT_TOL) {
                    return Err(Error::InvalidParameter(format!(
                        "observable of party {} has eigenvalues outside [-1, 1]",
                        party + 1
                    )));
                }
            }
        }
        Ok(Self { ops })
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<Vec<HermitianOperator>>) -> Self {
        Self { ops }
    }

    /// Every party gets the same list of observables.
    pub fn uniform(n: usize, per_party: Vec<HermitianOperator>) -> Result<Self> {
        Self::new(vec![per_party; n])
    }

    pub fn n(&self) -> usize {
        self.ops.len()
    }

    pub fn settings_per_party(&self) -> Vec<usize> {
        self.ops.iter().map(Vec::len).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.ops.iter().map(|s| s[0].dim()).collect()
    }

    /// Observable for a 1-based setting label.
    pub fn get(&self, party: usize, label: usize) -> Option<&HermitianOperator> {
        label
            .checked_sub(1)
            .and_then(|s| self.ops.get(party).and_then(|p| p.get(s)))
    }

    pub(crate) fn set(&mut self, party: usize, label: usize, op: HermitianOperator) {
        self.ops[party][label - 1] = op;
    }

    pub fn party(&self, party: usize) -> &[HermitianOperator] {
        &self.ops[party]
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn make_ghz(n: usize) -> Result<StateVector> {
    make_ghz_theta(n, std::f64::consts::FRAC_PI_4)
}

/// `cos θ |0…0⟩ + sin θ |1…1⟩` for `θ ∈ (0, π/4]`.
pub fn make_ghz_theta(n: usize, theta: f64) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("GHZ state needs n >= 2, got {n}")));
    }
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_4 + 1e-15) {
        return Err(Error::InvalidParameter(format!("theta {theta} outside (0, pi/4]")));
    }
    let dim = 1usize << n;
    let mut amps = DVector::zeros(dim);
    if (theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15 {
        amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    } else {
        amps[0] = C64::new(theta.cos(), 0.0);
        amps[dim - 1] = C64::new(theta.sin(), 0.0);
    }
    StateVector::new(vec![2; n], amps)
}

/// `Σ_i |i⟩^{⊗n} / √d`.
pub fn make_ghz_nd(n: usize, d: usize) -> Result<StateVector> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidParameter(format!("qudit GHZ needs n >= 2, d >= 2 (got n={n}, d={d})")));
    }
    if n as f64 * (d as f64).log2() > MAX_DENSE_LOG2_DIM {
        return Err(Error::InvalidParameter(format!(
            "qudit GHZ with n={n}, d={d} is too large to store densely"
        )));
    }
    if d == 2 {
        return make_ghz(n);
    }
    let dim = d.pow(n as u32);
    // Index of |i…i⟩ is i·(d^{n-1} + … + 1).
    let step: usize = (0..n).map(|k| d.pow(k as u32)).sum();
    let mut amps = DVector::zeros(dim);
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * step] = a;
    }
    StateVector::normalized(vec![d; n], amps)
}

/// Equal-weight superposition of the `n` single-excitation basis states.
pub fn make_w(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("W state needs n >= 2, got {n}")));
    }
    let mut amps = DVector::zeros(1usize << n);
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1usize << k] = a;
    }
    StateVector::normalized(vec![2; n], amps)
}

/// Graph state: `∏ (I + g_i)/2` applied to `|0…0⟩`, renormalized.
pub fn make_graph_state(graph: &Graph) -> Result<StateVector> {
    let n = graph.n();
    if n == 0 {
        return Err(Error::InvalidParameter("graph has no vertices".into()));
    }
    if n > 22 {
        return Err(Error::InvalidParameter(format!("graph state with {n} qubits is too large")));
    }
    let dims = vec![2; n];
    let mut v: Vec<C64> = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = C64::new(1.0, 0.0);
    for i in 0..n {
        let g = generator(graph, i + 1)?;
        let gv = g.apply(&dims, &v);
        for (a, b) in v.iter_mut().zip(gv) {
            *a = (*a + b) * 0.5;
        }
    }
    StateVector::normalized(dims, DVector::from_vec(v))
}

fn apply_ops(state: &StateVector, ops: &[(usize, &CMatrix)]) -> Vec<C64> {
    let dims = state.dims();
    let mut cur: Vec<C64> = state.amplitudes().iter().copied().collect();
    let mut buf = cur.clone();
    for &(party, op) in ops {
        apply_local(dims, party, op, &cur, &mut buf);
        std::mem::swap(&mut cur, &mut buf);
    }
    cur
}

/// `⟨ψ| ⊗_i effect_i |ψ⟩`, one effect per party.
pub fn born_probability(state: &StateVector, effects: &[HermitianOperator]) -> Result<f64> {
    if effects.len() != state.n() {
        return Err(Error::DimensionMismatch {
            expected: state.n(),
            actual: effects.len(),
        });
    }
    for (e, &d) in effects.iter().zip(state.dims()) {
        if e.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: e.dim(),
            });
        }
        if !e.is_effect(DEFAULT_TOL) {
            return Err(Error::InvalidParameter("effect must have eigenvalues in [0, 1]".into()));
        }
    }
    let ops: Vec<(usize, &CMatrix)> = effects.iter().enumerate().map(|(p, e)| (p, e.matrix())).collect();
    let out = apply_ops(state, &ops);
    let amps = state.amplitudes();
    Ok(amps.iter().zip(&out).map(|(a, b)| (a.conj() * b).re).sum())
}

/// `⟨ψ| ⊗_i A_{x_i} |ψ⟩`, with trivial settings contributing the identity.
pub fn correlator(state: &StateVector, assignment: &ObservableAssignment, settings: &SettingVector) -> Result<f64> {
    let n = state.n();
    if assignment.n() != n || settings.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if assignment.n() != n { assignment.n() } else { settings.len() },
        });
    }
    let mut ops = Vec::with_capacity(n);
    for party in 0..n {
        let Some(label) = settings.get(party) else { continue };
        let op = assignment.get(party, label).ok_or(Error::SettingOutOfRange {
            party: party + 1,
            setting: label,
            count: assignment.party(party).len(),
        })?;
        if op.dim() != state.dims()[party] {
            return Err(Error::DimensionMismatch {
                expected: state.dims()[party],
                actual: op.dim(),
            });
        }
        ops.push((party, op.matrix()));
    }
    if ops.is_empty() {
        return Ok(1.0);
    }
    let out = apply_ops(state, &ops);
    Ok(state
        .amplitudes()
        .iter()
        .zip(&out)
        .map(|(a, b)| (a.conj() * b).re)
        .sum())
}
