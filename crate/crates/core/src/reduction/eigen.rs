use std::cmp::Ordering;

use super::ReductionError;
use crate::matrix::Matrix;

pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Stop once the off-diagonal Frobenius norm falls below this fraction of ‖A‖_F.
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-9;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`, sign-normalized so its
    /// largest-magnitude entry is positive.
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i)
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Rotations sweep all `(p, q)` pairs in row order until the off-diagonal mass
/// drops below `1e-12 · ‖A‖_F`, for at most [`JACOBI_MAX_SWEEPS`] sweeps.
/// Eigenvalues come back descending; runs of equal eigenvalues (within
/// `1e-12 · ‖A‖_F`) are ordered by the lexicographic order of their
/// sign-normalized vectors.
pub fn eigh_symmetric(a: &Matrix) -> Result<SymmetricEigen, ReductionError> {
    let n = a.rows();
    let asym = a.asymmetry();
    let scale = a.as_slice().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if !(asym <= SYMMETRY_TOL * scale) {
        return Err(ReductionError::NotSymmetric(asym));
    }

    let mut m = Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Matrix::identity(n);
    let norm = m.frobenius_norm();
    let mut sweeps = 0;

    if norm > 0.0 {
        loop {
            if off_diagonal_norm(&m) <= OFF_DIAGONAL_TOL * norm {
                break;
            }
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(ReductionError::NoConvergence(JACOBI_MAX_SWEEPS));
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
            sweeps += 1;
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|i| {
            let mut col = v.column(i);
            normalize_sign(&mut col);
            (m[(i, i)], col)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let tie_tol = OFF_DIAGONAL_TOL * norm;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && (pairs[end - 1].0 - pairs[end].0).abs() <= tie_tol {
            end += 1;
        }
        if end - start > 1 {
            // values within the group are indistinguishable at this tolerance:
            // keep them descending and order only the vectors
            let values: Vec<f64> = pairs[start..end].iter().map(|p| p.0).collect();
            pairs[start..end].sort_by(|x, y| lexicographic(&x.1, &y.1));
            for (p, v) in pairs[start..end].iter_mut().zip(values) {
                p.0 = v;
            }
        }
        start = end;
    }

    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Applies the rotation that zeroes `m[p][q]` as `Jᵀ M J`, accumulating `V J`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    let tau = (aqq - app) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + tau.hypot(1.0))
    } else {
        -1.0 / (-tau + tau.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    let n = m.rows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        m[(k, p)] = new_kp;
        m[(p, k)] = new_kp;
        m[(k, q)] = new_kq;
        m[(q, k)] = new_kq;
    }
    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Flips `v` so its largest-magnitude entry (first one on ties) is positive.
pub(crate) fn normalize_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}
