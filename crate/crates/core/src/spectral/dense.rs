//! Dense Hermitian eigensolves of scalar operators.

use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::operator::ScalarOperator;
use crate::Scalar;

/// Largest matrix order accepted by the dense path.
pub const DENSE_LIMIT: usize = 8192;
/// Imaginary parts below this fraction of the largest entry are dropped and
/// the real symmetric solver is used.
const REAL_CUTOFF: f64 = 1e-13;

/// All eigenvalues (ascending) and the first `k` eigenvectors.
pub struct DenseEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<Scalar>>,
    /// Largest `|A_ij - conj(A_ji)|` over `max |A_ij|` before symmetrization.
    pub hermiticity_defect: f64,
}

fn unit(n: usize, j: usize) -> Vec<Scalar> {
    let mut e = vec![Scalar::new(0.0, 0.0); n];
    e[j] = Scalar::new(1.0, 0.0);
    e
}

/// Solves the operator's matrix, built column by column from unit vectors.
pub fn dense_eigen(op: &ScalarOperator, k: usize) -> Result<DenseEigen> {
    let n = op.grid().len();
    if n > DENSE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dense eigensolve limited to order {DENSE_LIMIT}, operator has order {n}"
        )));
    }
    let k = k.min(n);
    // Real parts first; the complex matrix is only built if it is needed.
    let mut re = Mat::<f64>::zeros(n, n);
    let mut max_im = 0.0f64;
    let mut max_abs = 0.0f64;
    for j in 0..n {
        let col = op.apply_slice(&unit(n, j));
        for (i, v) in col.iter().enumerate() {
            re[(i, j)] = v.re;
            max_im = max_im.max(v.im.abs());
            max_abs = max_abs.max(v.norm());
        }
    }
    let scale = max_abs.max(f64::MIN_POSITIVE);
    if max_im <= REAL_CUTOFF * scale {
        let mut defect = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                defect = defect.max((re[(i, j)] - re[(j, i)]).abs());
                let avg = 0.5 * (re[(i, j)] + re[(j, i)]);
                re[(i, j)] = avg;
                re[(j, i)] = avg;
            }
        }
        let evd = re
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::ConvergenceFailure { achieved: 0, requested: k })?;
        let s = evd.S();
        let u = evd.U();
        return Ok(DenseEigen {
            eigenvalues: (0..n).map(|i| s[i]).collect(),
            vectors: (0..k).map(|c| (0..n).map(|i| Scalar::new(u[(i, c)], 0.0)).collect()).collect(),
            hermiticity_defect: defect / scale,
        });
    }
    drop(re);
    let mut a = Mat::<Scalar>::zeros(n, n);
    for j in 0..n {
        let col = op.apply_slice(&unit(n, j));
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let mut defect = 0.0f64;
    for j in 0..n {
        a[(j, j)] = Scalar::new(a[(j, j)].re, 0.0);
        for i in 0..j {
            defect = defect.max((a[(i, j)] - a[(j, i)].conj()).norm());
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure { achieved: 0, requested: k })?;
    let s = evd.S();
    let u = evd.U();
    Ok(DenseEigen {
        eigenvalues: (0..n).map(|i| s[i].re).collect(),
        vectors: (0..k).map(|c| (0..n).map(|i| u[(i, c)]).collect()).collect(),
        hermiticity_defect: defect / scale,
    })
}

/// Eigen-decomposition of a small Hermitian matrix given row-major.
pub(crate) fn small_hermitian_eigen(h: &[Scalar], m: usize) -> Result<(Vec<f64>, Vec<Vec<Scalar>>)> {
    let a = Mat::<Scalar>::from_fn(m, m, |i, j| {
        if i == j {
            Scalar::new(h[i * m + i].re, 0.0)
        } else {
            (h[i * m + j] + h[j * m + i].conj()) * 0.5
        }
    });
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure { achieved: 0, requested: m })?;
    let s = evd.S();
    let u = evd.U();
    Ok((
        (0..m).map(|i| s[i].re).collect(),
        (0..m).map(|c| (0..m).map(|i| u[(i, c)]).collect()).collect(),
    ))
}
