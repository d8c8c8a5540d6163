use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;

use super::Partition;
use crate::bellexpr::BellExpression;
use crate::error::{Error, Result};
use crate::qcore::{apply_local, reduced_cross, tensor_product, top_eigenpair, CMatrix, HermitianOperator, C64};

/// Eigenvalues below this magnitude count as kernel in the sign step.
pub(crate) const KERNEL_TOL: f64 = 1e-12;

/// Groups up to this dimension get a dense eigensolve in the state step;
/// larger ones use shifted power iteration.
pub(crate) const DENSE_STATE_DIM: usize = 1 << 10;

const POWER_ITERATIONS: usize = 200;
const EFFECTIVE_HERMITIAN_TOL: f64 = 1e-8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

struct Group {
    parties: Vec<usize>,
    dims: Vec<usize>,
    dim: usize,
}

/// Observables and per-group state vectors being optimized.
#[derive(Clone)]
pub(crate) struct Strategy {
    pub obs: Vec<Vec<HermitianOperator>>,
    pub states: Vec<Vec<C64>>,
}

pub(crate) struct Outcome {
    pub value: f64,
    pub strategy: Strategy,
    pub sweeps: usize,
    pub converged: bool,
}

/// Bell expression laid out for alternating optimization over a product of
/// group states.
pub(crate) struct Engine {
    coeffs: Vec<f64>,
    /// `settings[t][p]`, 0 for the identity.
    settings: Vec<Vec<usize>>,
    groups: Vec<Group>,
    /// Party to `(group, position within group)`.
    place: Vec<(usize, usize)>,
    /// Terms that use setting `x` of party `p`, at `[p][x - 1]`.
    touching: Vec<Vec<Vec<usize>>>,
    dims: Vec<usize>,
    allow_trivial: bool,
}

impl Engine {
    pub fn new(expr: &BellExpression, dims: &[usize], partition: &Partition, allow_trivial: bool) -> Result<Self> {
        let n = expr.n();
        if dims.len() != n || partition.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: if dims.len() != n { dims.len() } else { partition.n() },
            });
        }
        let settings: Vec<Vec<usize>> = expr
            .terms()
            .iter()
            .map(|t| (0..n).map(|p| t.settings.get(p).unwrap_or(0)).collect())
            .collect();
        let spp = expr.settings_per_party();
        let mut touching: Vec<Vec<Vec<usize>>> = spp.iter().map(|&m| vec![Vec::new(); m]).collect();
        for (t, s) in settings.iter().enumerate() {
            for (p, &x) in s.iter().enumerate() {
                if x > 0 {
                    touching[p][x - 1].push(t);
                }
            }
        }
        let mut place = vec![(0, 0); n];
        let groups = partition
            .groups()
            .iter()
            .enumerate()
            .map(|(g, parties)| {
                for (i, &p) in parties.iter().enumerate() {
                    place[p] = (g, i);
                }
                let gd: Vec<usize> = parties.iter().map(|&p| dims[p]).collect();
                Group {
                    parties: parties.clone(),
                    dim: gd.iter().product(),
                    dims: gd,
                }
            })
            .collect();
        Ok(Self {
            coeffs: expr.terms().iter().map(|t| t.coeff).collect(),
            settings,
            groups,
            place,
            touching,
            dims: dims.to_vec(),
            allow_trivial,
        })
    }

    pub fn settings_per_party(&self) -> Vec<usize> {
        self.touching.iter().map(Vec::len).collect()
    }

    /// Random unit observables on every party and Haar-random group states.
    pub fn random_strategy<R: Rng>(&self, rng: &mut R) -> Strategy {
        let obs = self
            .settings_per_party()
            .iter()
            .zip(&self.dims)
            .map(|(&m, &d)| (0..m).map(|_| random_observable(rng, d)).collect())
            .collect();
        let states = self.groups.iter().map(|g| random_unit_vector(rng, g.dim)).collect();
        Strategy { obs, states }
    }

    /// `(⊗_{p ∈ g, p ≠ skip} A_{p, s_t(p)}) φ_g`.
    fn group_apply(&self, g: usize, t: usize, st: &Strategy, skip: Option<usize>) -> Vec<C64> {
        let group = &self.groups[g];
        let mut cur = st.states[g].clone();
        let mut buf = vec![zero(); cur.len()];
        for (i, &p) in group.parties.iter().enumerate() {
            let x = self.settings[t][p];
            if x == 0 || Some(p) == skip {
                continue;
            }
            apply_local(&group.dims, i, st.obs[p][x - 1].matrix(), &cur, &mut buf);
            std::mem::swap(&mut cur, &mut buf);
        }
        cur
    }

    fn group_expectation(&self, g: usize, t: usize, st: &Strategy) -> f64 {
        dotc(&st.states[g], &self.group_apply(g, t, st, None)).re
    }

    /// `E[g][t]` for every group and term.
    fn expectations(&self, st: &Strategy) -> Vec<Vec<f64>> {
        (0..self.groups.len())
            .map(|g| (0..self.coeffs.len()).map(|t| self.group_expectation(g, t, st)).collect())
            .collect()
    }

    fn value_from(&self, e: &[Vec<f64>]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, c)| c * e.iter().map(|eg| eg[t]).product::<f64>())
            .sum()
    }

    fn weight(&self, e: &[Vec<f64>], g: usize, t: usize) -> f64 {
        e.iter()
            .enumerate()
            .filter(|(h, _)| *h != g)
            .fold(self.coeffs[t], |w, (_, eh)| w * eh[t])
    }

    /// The Hermitian operator `H` with value `= Tr(A_{p,x} H) + const`, plus
    /// the per-term contraction matrices used to refresh expectations.
    fn effective(&self, st: &Strategy, e: &[Vec<f64>], p: usize, x: usize) -> Result<(HermitianOperator, Vec<(usize, CMatrix)>)> {
        let (g, i) = self.place[p];
        let d = self.dims[p];
        let mut h = CMatrix::zeros(d, d);
        let mut ks = Vec::with_capacity(self.touching[p][x - 1].len());
        for &t in &self.touching[p][x - 1] {
            let chi = self.group_apply(g, t, st, Some(p));
            let k = reduced_cross(&self.groups[g].dims, i, &st.states[g], &chi);
            let w = self.weight(e, g, t);
            if w != 0.0 {
                h += k.transpose() * C64::new(w, 0.0);
            }
            ks.push((t, k));
        }
        let scale = 1.0 + h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let op = HermitianOperator::symmetrized(h, EFFECTIVE_HERMITIAN_TOL * scale)?;
        Ok((op, ks))
    }

    /// Effective operator of a single observable slot for the given strategy.
    pub fn effective_operator(&self, st: &Strategy, p: usize, x: usize) -> Result<HermitianOperator> {
        let e = self.expectations(st);
        Ok(self.effective(st, &e, p, x)?.0)
    }

    fn observable_step(&self, st: &mut Strategy, e: &mut [Vec<f64>], p: usize, x: usize) -> Result<()> {
        let (h, ks) = self.effective(st, e, p, x)?;
        let new = match h.bloch() {
            Some([_, hx, hy, hz]) if !self.allow_trivial => {
                let r = (hx * hx + hy * hy + hz * hz).sqrt();
                if r < KERNEL_TOL {
                    return Ok(());
                }
                HermitianOperator::from_bloch([0.0, hx / r, hy / r, hz / r])
            }
            _ => h.sign(KERNEL_TOL),
        };
        let g = self.place[p].0;
        let a = new.matrix();
        for (t, k) in ks {
            e[g][t] = a.iter().zip(k.iter()).map(|(u, v)| u * v).sum::<C64>().re;
        }
        st.obs[p][x - 1] = new;
        Ok(())
    }

    /// Group operator weights keyed by the restricted setting tuple.
    fn group_terms(&self, e: &[Vec<f64>], g: usize) -> BTreeMap<Vec<usize>, f64> {
        let mut map = BTreeMap::new();
        for t in 0..self.coeffs.len() {
            let w = self.weight(e, g, t);
            if w == 0.0 {
                continue;
            }
            let key: Vec<usize> = self.groups[g].parties.iter().map(|&p| self.settings[t][p]).collect();
            *map.entry(key).or_insert(0.0) += w;
        }
        map
    }

    fn group_matrix(&self, st: &Strategy, g: usize, terms: &BTreeMap<Vec<usize>, f64>) -> CMatrix {
        let group = &self.groups[g];
        let mut m = CMatrix::zeros(group.dim, group.dim);
        for (key, &w) in terms {
            let factors: Vec<HermitianOperator> = group
                .parties
                .iter()
                .zip(key)
                .map(|(&p, &x)| if x == 0 { HermitianOperator::identity(self.dims[p]) } else { st.obs[p][x - 1].clone() })
                .collect();
            m += tensor_product(&factors).matrix() * C64::new(w, 0.0);
        }
        m
    }

    fn group_apply_sum(&self, st: &Strategy, g: usize, terms: &BTreeMap<Vec<usize>, f64>, v: &[C64]) -> Vec<C64> {
        let group = &self.groups[g];
        let mut out = vec![zero(); v.len()];
        let mut cur = vec![zero(); v.len()];
        let mut buf = vec![zero(); v.len()];
        for (key, &w) in terms {
            cur.copy_from_slice(v);
            for (i, (&p, &x)) in group.parties.iter().zip(key).enumerate() {
                if x > 0 {
                    apply_local(&group.dims, i, st.obs[p][x - 1].matrix(), &cur, &mut buf);
                    std::mem::swap(&mut cur, &mut buf);
                }
            }
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += c * w;
            }
        }
        out
    }

    fn state_step(&self, st: &mut Strategy, e: &mut [Vec<f64>], g: usize) -> Result<()> {
        let terms = self.group_terms(e, g);
        if terms.is_empty() {
            return Ok(());
        }
        let next = if self.groups[g].dim <= DENSE_STATE_DIM {
            let m = self.group_matrix(st, g, &terms);
            let (_, v) = top_eigenpair(&m)?;
            v.iter().copied().collect()
        } else {
            // (M + s·I) is positive semidefinite, so its Rayleigh quotient
            // never decreases along power iterates.
            let shift: f64 = terms.values().map(|w| w.abs()).sum();
            let mut v = st.states[g].clone();
            let mut last = f64::NEG_INFINITY;
            for _ in 0..POWER_ITERATIONS {
                let mut w = self.group_apply_sum(st, g, &terms, &v);
                let rq = dotc(&v, &w).re;
                for (a, b) in w.iter_mut().zip(&v) {
                    *a += b * shift;
                }
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 || !norm.is_finite() {
                    return Err(Error::Numerical("power iteration collapsed".into()));
                }
                v = w.into_iter().map(|z| z / norm).collect();
                if rq - last < 1e-14 * (1.0 + rq.abs()) {
                    break;
                }
                last = rq;
            }
            v
        };
        st.states[g] = next;
        for t in 0..self.coeffs.len() {
            e[g][t] = self.group_expectation(g, t, st);
        }
        Ok(())
    }

    /// Alternates state and observable updates until the value gains less
    /// than `tol` in a sweep. With `fixed_states` only observables move.
    pub fn optimize(&self, mut st: Strategy, fixed_states: bool, max_sweeps: usize, tol: f64) -> Result<Outcome> {
        let mut e = self.expectations(&st);
        let mut value = self.value_from(&e);
        let spp = self.settings_per_party();
        for sweep in 1..=max_sweeps {
            if !fixed_states {
                for g in 0..self.groups.len() {
                    self.state_step(&mut st, &mut e, g)?;
                }
            }
            for (p, &m) in spp.iter().enumerate() {
                for x in 1..=m {
                    self.observable_step(&mut st, &mut e, p, x)?;
                }
            }
            // Refresh from scratch so rounding does not accumulate.
            e = self.expectations(&st);
            let next = self.value_from(&e);
            if !next.is_finite() {
                return Err(Error::Numerical("see-saw value is not finite".into()));
            }
            if next < value - 1e-9 * (1.0 + value.abs()) {
                return Err(Error::Numerical(format!(
                    "see-saw value decreased from {value} to {next} in sweep {sweep}"
                )));
            }
            let gain = next - value;
            value = value.max(next);
            if gain < tol {
                return Ok(Outcome {
                    value,
                    strategy: st,
                    sweeps: sweep,
                    converged: true,
                });
            }
        }
        Ok(Outcome {
            value,
            strategy: st,
            sweeps: max_sweeps,
            converged: false,
        })
    }
}

/// Unit-vector qubit observable, or the sign of a random Hermitian matrix
/// for larger dimensions.
pub(crate) fn random_observable<R: Rng>(rng: &mut R, d: usize) -> HermitianOperator {
    if d == 2 {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        return HermitianOperator::unit_vector(z.acos(), phi);
    }
    let mut m = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    let adj = m.adjoint();
    HermitianOperator::symmetrized((m + adj) * C64::new(0.5, 0.0), 1e-12)
        .expect("symmetrized matrix is Hermitian")
        .sign(KERNEL_TOL)
}

/// Haar-random unit vector.
pub(crate) fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
