use nalgebra::{DMatrix, DVector};

use super::CMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues and orthonormal eigenvectors (as columns) of a real
/// symmetric matrix.
pub(crate) struct SymmetricDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi rotations. Slower than QR iteration, but the eigenvectors
/// stay accurate inside degenerate eigenspaces, which the state step of the
/// see-saw depends on.
pub(crate) fn jacobi(mut a: DMatrix<f64>) -> SymmetricDecomposition {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (r + 1..n).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)] * a[(r, c)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    SymmetricDecomposition {
        values: a.diagonal(),
        vectors: v,
    }
}

/// Decomposition of the real embedding `[[Re, −Im], [Im, Re]]` of a
/// Hermitian matrix. An eigenvector `(u, w)` of the embedding gives the
/// eigenvector `u + i·w` of the original with the same eigenvalue; every
/// eigenvalue appears twice.
pub(crate) fn hermitian_embedding_eigen(mat: &CMatrix) -> SymmetricDecomposition {
    let d = mat.nrows();
    let real = DMatrix::from_fn(2 * d, 2 * d, |r, col| {
        let z = mat[(r % d, col % d)];
        match (r < d, col < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    jacobi(real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_spectrum_has_exact_vectors() {
        // diag(2, 2, -1) rotated by a fixed orthogonal matrix.
        let q = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 2.0, 2.0, 2.0, -1.0, -1.0, 2.0, 2.0]) / 3.0;
        let a = &q * DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, -1.0])) * q.transpose();
        let dec = jacobi(a.clone());
        for i in 0..3 {
            let v = dec.vectors.column(i);
            assert!((&a * v - v * dec.values[i]).norm() < 1e-13);
        }
        let mut vals: Vec<f64> = dec.values.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-13 && (vals[2] - 2.0).abs() < 1e-13);
    }
}
