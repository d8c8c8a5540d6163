use nalgebra::DVector;

use super::{C64, CMatrix, NORM_TOL};
use crate::error::{Error, Result};

/// A normalized pure state over parties with the given local dimensions.
/// Party 0 is the most significant tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: DVector<C64>) -> Result<Self> {
        check_shape(&dims, amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(Self { dims, amps })
    }

    /// Normalizes `amps`; fails on a zero vector.
    pub fn normalized(dims: Vec<usize>, mut amps: DVector<C64>) -> Result<Self> {
        check_shape(&dims, amps.len())?;
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("cannot normalize a zero vector".into()));
        }
        amps /= C64::new(norm, 0.0);
        Ok(Self { dims, amps })
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range {dim}"
            )));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Self::new(dims, amps)
    }

    /// Tensor product of states in the given party order.
    pub fn product(factors: &[StateVector]) -> Self {
        let mut dims = Vec::new();
        let mut amps = DVector::from_element(1, C64::new(1.0, 0.0));
        for f in factors {
            dims.extend_from_slice(&f.dims);
            amps = amps.kronecker(&f.amps);
        }
        Self { dims, amps }
    }

    pub fn n(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: op.nrows(),
            });
        }
        Ok(self.amps.dotc(&(op * &self.amps)).re)
    }

    /// Multiplies every amplitude by `e^{i·phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let f = C64::from_polar(1.0, phase);
        Self {
            dims: self.dims.clone(),
            amps: &self.amps * f,
        }
    }

    /// Reorders tensor factors: party `j` of the result is party `order[j]`
    /// of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("order must be a permutation".into()));
        }
        let new_dims: Vec<usize> = order.iter().map(|&p| self.dims[p]).collect();
        let old_strides = strides(&self.dims);
        let mut out = DVector::zeros(self.dim());
        let mut digits = vec![0usize; n];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rem = idx;
            for j in (0..n).rev() {
                digits[j] = rem % new_dims[j];
                rem /= new_dims[j];
            }
            let old: usize = order
                .iter()
                .zip(&digits)
                .map(|(&p, &dgt)| dgt * old_strides[p])
                .sum();
            *slot = self.amps[old];
        }
        Ok(Self {
            dims: new_dims,
            amps: out,
        })
    }

    /// Projects party `party` onto `vector` (unnormalized), returning the
    /// remaining parties' vector and its squared norm.
    pub fn project_party(&self, party: usize, vector: &[C64]) -> Result<(Vec<usize>, DVector<C64>, f64)> {
        if party >= self.n() {
            return Err(Error::InvalidParameter(format!("party {party} out of range")));
        }
        let d = self.dims[party];
        if vector.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: vector.len(),
            });
        }
        let inner: usize = self.dims[party + 1..].iter().product();
        let outer: usize = self.dims[..party].iter().product();
        let mut out = DVector::zeros(outer * inner);
        for o in 0..outer {
            for i in 0..inner {
                let mut acc = C64::new(0.0, 0.0);
                for (a, va) in vector.iter().enumerate() {
                    acc += va.conj() * self.amps[o * d * inner + a * inner + i];
                }
                out[o * inner + i] = acc;
            }
        }
        let mut dims = self.dims.clone();
        dims.remove(party);
        let p = out.norm_squared();
        Ok((dims, out, p))
    }
}

fn check_shape(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter("dimensions must be positive".into()));
    }
    let dim: usize = dims.iter().product();
    if dim != len {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: len,
        });
    }
    Ok(())
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for j in (0..dims.len().saturating_sub(1)).rev() {
        s[j] = s[j + 1] * dims[j + 1];
    }
    s
}

/// Applies `op` to tensor factor `party` of `input`, writing into `out`.
pub(crate) fn apply_local(dims: &[usize], party: usize, op: &CMatrix, input: &[C64], out: &mut [C64]) {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let block = d * inner;
    let mut col = vec![C64::new(0.0, 0.0); d];
    for o in 0..outer {
        let base_o = o * block;
        for i in 0..inner {
            let base = base_o + i;
            for (c, slot) in col.iter_mut().enumerate() {
                *slot = input[base + c * inner];
            }
            for r in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for (c, v) in col.iter().enumerate() {
                    acc += op[(r, c)] * v;
                }
                out[base + r * inner] = acc;
            }
        }
    }
}

/// `K[a][b] = Σ conj(bra[.., a, ..]) · ket[.., b, ..]` summed over every
/// index except that of `party`.
pub(crate) fn reduced_cross(dims: &[usize], party: usize, bra: &[C64], ket: &[C64]) -> CMatrix {
    let d = dims[party];
    let inner: usize = dims[party + 1..].iter().product();
    let outer: usize = dims[..party].iter().product();
    let mut k = CMatrix::zeros(d, d);
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for a in 0..d {
                let ba = bra[base + a * inner].conj();
                if ba == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..d {
                    k[(a, b)] += ba * ket[base + b * inner];
                }
            }
        }
    }
    k
}
