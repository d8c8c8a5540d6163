use nalgebra::{DMatrix, DVector};

use super::eigen::hermitian_embedding_eigen;
use super::{C64, CMatrix, HERMITIAN_TOL};
use crate::error::{Error, Result};

/// A dense Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest absolute entry of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for col in r..m.ncols() {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    worst
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidParameter(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = hermiticity_defect(&mat);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { mat })
    }

    /// Replaces `m` by `(m + m†)/2`, failing when the defect exceeds `tol`.
    pub fn symmetrized(mat: CMatrix, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidParameter("operator must be square".into()));
        }
        let defect = hermiticity_defect(&mat);
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let adj = mat.adjoint();
        Ok(Self {
            mat: (mat + adj) * c(0.5, 0.0),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_bloch([0.0, 1.0, 0.0, 0.0])
    }

    pub fn pauli_y() -> Self {
        Self::from_bloch([0.0, 0.0, 1.0, 0.0])
    }

    pub fn pauli_z() -> Self {
        Self::from_bloch([0.0, 0.0, 0.0, 1.0])
    }

    /// `c0·I + cx·σx + cy·σy + cz·σz`.
    pub fn from_bloch(coeffs: [f64; 4]) -> Self {
        let [c0, x, y, z] = coeffs;
        let mat = CMatrix::from_row_slice(
            2,
            2,
            &[c(c0 + z, 0.0), c(x, -y), c(x, y), c(c0 - z, 0.0)],
        );
        Self { mat }
    }

    /// The ±1 qubit observable along the unit vector with the given polar and
    /// azimuthal angles.
    pub fn unit_vector(polar: f64, azimuth: f64) -> Self {
        Self::from_bloch([
            0.0,
            polar.sin() * azimuth.cos(),
            polar.sin() * azimuth.sin(),
            polar.cos(),
        ])
    }

    /// `cos(angle)·σx + sin(angle)·σy`.
    pub fn equatorial(angle: f64) -> Self {
        Self::from_bloch([0.0, angle.cos(), angle.sin(), 0.0])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, v) in values.iter().enumerate() {
            mat[(i, i)] = c(*v, 0.0);
        }
        Self { mat }
    }

    /// Block-diagonal direct sum in the given order.
    pub fn direct_sum(blocks: &[HermitianOperator]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut mat = CMatrix::zeros(dim, dim);
        let mut offset = 0;
        for b in blocks {
            let d = b.dim();
            mat.view_mut((offset, offset), (d, d)).copy_from(&b.mat);
            offset += d;
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * c(factor, 0.0),
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = hermitian_embedding_eigen(&self.mat);
        let mut v: Vec<f64> = eig.values.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        // Every eigenvalue appears twice in the real embedding.
        v.into_iter().step_by(2).collect()
    }

    /// Whether every eigenvalue lies in `[-1, 1]` within `tol`.
    pub fn is_contraction(&self, tol: f64) -> bool {
        self.eigenvalues().iter().all(|l| l.abs() <= 1.0 + tol)
    }

    /// Whether the operator is an effect: eigenvalues in `[0, 1]` within `tol`.
    pub fn is_effect(&self, tol: f64) -> bool {
        self.eigenvalues()
            .iter()
            .all(|l| *l >= -tol && *l <= 1.0 + tol)
    }

    /// Coefficients `(c0, cx, cy, cz)` of a qubit operator in the Pauli basis.
    pub fn bloch(&self) -> Option<[f64; 4]> {
        if self.dim() != 2 {
            return None;
        }
        let m = &self.mat;
        Some([
            0.5 * (m[(0, 0)].re + m[(1, 1)].re),
            m[(1, 0)].re,
            m[(1, 0)].im,
            0.5 * (m[(0, 0)].re - m[(1, 1)].re),
        ])
    }

    /// Operator sign: eigenvalues mapped to ±1, with magnitudes below
    /// `kernel_tol` mapped to +1.
    pub fn sign(&self, kernel_tol: f64) -> Self {
        if self.dim() == 2 {
            let [h0, x, y, z] = self.bloch().expect("qubit");
            let r = (x * x + y * y + z * z).sqrt();
            let lo = h0 - r;
            let hi = h0 + r;
            let s = |l: f64| if l.abs() < kernel_tol || l > 0.0 { 1.0 } else { -1.0 };
            let (s_lo, s_hi) = (s(lo), s(hi));
            if s_lo == s_hi || r == 0.0 {
                return Self::from_bloch([s_hi, 0.0, 0.0, 0.0]);
            }
            // s_hi = +1, s_lo = -1: the projector difference along the Bloch direction.
            return Self::from_bloch([0.0, x / r, y / r, z / r]);
        }
        let eig = hermitian_embedding_eigen(&self.mat);
        let signs = eig.values.map(|l| if l.abs() < kernel_tol || l > 0.0 { 1.0 } else { -1.0 });
        let v = &eig.vectors;
        let real = v * DMatrix::from_diagonal(&signs) * v.transpose();
        let d = self.dim();
        let mat = CMatrix::from_fn(d, d, |r, col| c(real[(r, col)], real[(r + d, col)]));
        let adj = mat.adjoint();
        Self {
            mat: (mat + adj) * c(0.5, 0.0),
        }
    }

    /// Real part of `tr(self · other)`.
    pub fn trace_product(&self, other: &CMatrix) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim() {
            for k in 0..self.dim() {
                acc += (self.mat[(r, k)] * other[(k, r)]).re;
            }
        }
        acc
    }
}

/// Kronecker product in the given order.
pub fn tensor_product(factors: &[HermitianOperator]) -> HermitianOperator {
    let mut acc = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for f in factors {
        acc = acc.kronecker(&f.mat);
    }
    HermitianOperator { mat: acc }
}

/// Top eigenpair of a Hermitian matrix: (eigenvalue, normalized eigenvector).
pub fn top_eigenpair(mat: &CMatrix) -> Result<(f64, nalgebra::DVector<C64>)> {
    if mat.nrows() == 0 {
        return Err(Error::Numerical("empty matrix".into()));
    }
    let d = mat.nrows();
    let eig = hermitian_embedding_eigen(mat);
    let (idx, val) = eig
        .values
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |best, (i, v)| {
            if *v > best.1 {
                (i, *v)
            } else {
                best
            }
        });
    if !val.is_finite() {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let col = eig.vectors.column(idx);
    let mut v = DVector::from_fn(d, |r, _| c(col[r], col[r + d]));
    // Fix the global phase so the largest-magnitude entry is real positive.
    let (pivot, _) = v
        .iter()
        .enumerate()
        .fold((0usize, -1.0f64), |best, (i, z)| {
            if z.norm() > best.1 + 1e-12 {
                (i, z.norm())
            } else {
                best
            }
        });
    let phase = v[pivot] / C64::new(v[pivot].norm(), 0.0);
    v.iter_mut().for_each(|z| *z /= phase);
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    Ok((val, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zz_is_diag() {
        let zz = tensor_product(&[HermitianOperator::pauli_z(), HermitianOperator::pauli_z()]);
        let expected = HermitianOperator::diagonal(&[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn identity_tensor() {
        let i = HermitianOperator::identity(2);
        assert_eq!(tensor_product(&[i.clone(), i.clone(), i]), HermitianOperator::identity(8));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sign_of_qubit_operator() {
        let h = HermitianOperator::from_bloch([0.2, 0.0, 0.0, 0.5]);
        let s = h.sign(1e-12);
        assert_eq!(s.bloch().unwrap(), [0.0, 0.0, 0.0, 1.0]);
        let h = HermitianOperator::from_bloch([0.7, 0.3, 0.0, 0.0]);
        assert_eq!(h.sign(1e-12).bloch().unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let h = HermitianOperator::from_bloch([-0.7, 0.3, 0.0, 0.0]);
        assert_eq!(h.sign(1e-12).bloch().unwrap(), [-1.0, 0.0, 0.0, 0.0]);
        // Zero eigenvalue maps to +1.
        let h = HermitianOperator::from_bloch([0.5, 0.5, 0.0, 0.0]);
        assert_eq!(h.sign(1e-12).bloch().unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sign_general_matches_qubit_path() {
        let h = HermitianOperator::from_bloch([0.1, 0.3, -0.4, 0.2]);
        let big = HermitianOperator::direct_sum(&[h.clone(), HermitianOperator::diagonal(&[-0.5])]);
        let s = big.sign(1e-12);
        let small = h.sign(1e-12);
        for r in 0..2 {
            for k in 0..2 {
                assert_abs_diff_eq!(s.matrix()[(r, k)].re, small.matrix()[(r, k)].re, epsilon = 1e-12);
                assert_abs_diff_eq!(s.matrix()[(r, k)].im, small.matrix()[(r, k)].im, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(s.matrix()[(2, 2)].re, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_vector_is_dichotomic() {
        let a = HermitianOperator::unit_vector(0.3, 1.1);
        let ev = a.eigenvalues();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-12);
    }
}
