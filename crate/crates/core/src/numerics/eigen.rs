use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector};
use crate::error::{invalid, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, `vectors[i]` pairs with `values[i]`.
    pub vectors: Vec<ComplexVector>,
}

impl HermitianEigen {
    /// Eigenpair with the largest eigenvalue.
    pub fn dominant(&self) -> (f64, &ComplexVector) {
        let last = self.values.len() - 1;
        (self.values[last], &self.vectors[last])
    }
}

const MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi eigensolver for small Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies a
/// real Givens rotation to the resulting real-symmetric 2×2 block.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.rows();
    if n != a.cols() {
        return invalid(format!("eigen-decomposition needs a square matrix, got {}x{}", n, a.cols()));
    }
    let scale = a.frobenius_norm();
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > 1e-12 * scale.max(1.0) {
                return invalid(format!("matrix is not Hermitian at ({i}, {j})"));
            }
        }
    }

    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = order.iter().map(|&i| v.column(i)).collect();
    Ok(HermitianEigen { values, vectors })
}

fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] on the (p, q) plane.
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = m.rows();
    // M ← M U
    for r in 0..n {
        let (x, y) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = x * upp + y * uqp;
        m[(r, q)] = x * upq + y * uqq;
    }
    // M ← U^H M
    for col in 0..n {
        let (x, y) = (m[(p, col)], m[(q, col)]);
        m[(p, col)] = upp.conj() * x + uqp.conj() * y;
        m[(q, col)] = upq.conj() * x + uqq.conj() * y;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    for r in 0..n {
        let (x, y) = (v[(r, p)], v[(r, q)]);
        v[(r, p)] = x * upp + y * uqp;
        v[(r, q)] = x * upq + y * uqq;
    }
}
