//! Restarted block Krylov iteration with Rayleigh-Ritz extraction for the
//! lowest eigenpairs of a Hermitian operator.

use rand::Rng;

use super::dense::small_hermitian_eigen;
use crate::error::{Error, Result};
use crate::operator::ScalarOperator;
use crate::{random, Scalar};

#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Residual target `|A x - t x| <= tol * max(1, |t|)` for unit `x`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Extra Ritz vectors carried beyond `k`, so clusters are not split.
    pub guard: usize,
    /// Basis size at which the iteration restarts.
    pub max_basis: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_restarts: 2000,
            guard: 4,
            max_basis: 96,
        }
    }
}

pub struct KrylovEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<Scalar>>,
    pub residuals: Vec<f64>,
    pub restarts: usize,
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Scalar]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthogonalizes `v` against `basis` twice and normalizes it. Returns
/// `false` if nothing independent is left.
fn orthonormalize(v: &mut [Scalar], basis: &[Vec<Scalar>]) -> bool {
    let before = norm(v);
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
    let after = norm(v);
    if after <= 1e-10 * before.max(f64::MIN_POSITIVE) || after == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= after);
    true
}

/// Lowest `k` eigenpairs of the Hermitian operator `op`.
///
/// Each cycle grows a block Krylov basis from the current Ritz vectors until
/// it reaches `max_basis`, then restarts from the best `k + guard` Ritz
/// vectors. Start vectors depend only on `seed`.
pub fn krylov_lowest(op: &ScalarOperator, k: usize, seed: u64, opts: &KrylovOptions) -> Result<KrylovEigen> {
    let n = op.grid().len();
    let block = (k + opts.guard).min(n);
    let max_basis = opts.max_basis.max(3 * block).min(n);
    let mut rng = random::rng(seed, 7000);
    let mut start: Vec<Vec<Scalar>> = Vec::with_capacity(block);
    while start.len() < block {
        let mut v: Vec<Scalar> = (0..n)
            .map(|_| Scalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if orthonormalize(&mut v, &start) {
            start.push(v);
        }
    }

    let mut achieved = 0;
    for restart in 0..opts.max_restarts {
        let mut basis: Vec<Vec<Scalar>> = Vec::with_capacity(max_basis);
        let mut images: Vec<Vec<Scalar>> = Vec::with_capacity(max_basis);
        let mut frontier = start;
        for mut v in frontier.drain(..) {
            if orthonormalize(&mut v, &basis) {
                images.push(op.apply_slice(&v));
                basis.push(v);
            }
        }
        let mut last = 0;
        while basis.len() < max_basis {
            let end = basis.len();
            let mut grew = false;
            for j in last..end {
                if basis.len() >= max_basis {
                    break;
                }
                let mut v = images[j].clone();
                if orthonormalize(&mut v, &basis) {
                    images.push(op.apply_slice(&v));
                    basis.push(v);
                    grew = true;
                }
            }
            last = end;
            if !grew {
                break;
            }
        }

        let m = basis.len();
        let mut h = vec![Scalar::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in i..m {
                let v = dot(&basis[i], &images[j]);
                h[i * m + j] = v;
                h[j * m + i] = v.conj();
            }
        }
        let (theta, y) = small_hermitian_eigen(&h, m)?;
        let keep = block.min(m);
        let mut ritz = Vec::with_capacity(keep);
        let mut residuals = Vec::with_capacity(keep);
        for c in 0..keep {
            let mut x = vec![Scalar::new(0.0, 0.0); n];
            let mut ax = vec![Scalar::new(0.0, 0.0); n];
            for (j, coef) in y[c].iter().enumerate() {
                for ((xi, axi), (b, ab)) in x.iter_mut().zip(ax.iter_mut()).zip(basis[j].iter().zip(&images[j])) {
                    *xi += coef * b;
                    *axi += coef * ab;
                }
            }
            let r: f64 = ax
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - theta[c] * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            residuals.push(r / norm(&x));
            ritz.push(x);
        }
        achieved = (0..k.min(keep))
            .take_while(|&c| residuals[c] <= opts.tol * theta[c].abs().max(1.0))
            .count();
        if achieved >= k || m == n {
            return Ok(KrylovEigen {
                eigenvalues: theta[..k.min(keep)].to_vec(),
                vectors: ritz.into_iter().take(k).collect(),
                residuals: residuals.into_iter().take(k).collect(),
                restarts: restart,
            });
        }
        start = ritz;
    }
    Err(Error::ConvergenceFailure { achieved, requested: k })
}
