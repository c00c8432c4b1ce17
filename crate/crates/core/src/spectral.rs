//! Dense symmetric eigensolver (cyclic Jacobi) and power iteration for the
//! dominant eigenvalue of a positive semidefinite operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Entries farther than this from their transpose are rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the matrix Frobenius norm.
pub const JACOBI_REL_TOL: f64 = 1e-11;
pub const JACOBI_MAX_SWEEPS: usize = 100;

pub const POWER_SEED: u64 = 0x5EED;
pub const POWER_TOL: f64 = 1e-9;
pub const POWER_MAX_ITERS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NonSymmetric { i: usize, j: usize, gap: f64 },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("matrix must have order at least 1")]
    Empty,
    #[error("expected {expected} entries, got {got}")]
    BadShape { expected: usize, got: usize },
}

/// Square matrix stored densely in row-major order, symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, SpectralError> {
        if data.len() != n * n {
            return Err(SpectralError::BadShape {
                expected: n * n,
                got: data.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (data[i * n + j] - data[j * n + i]).abs();
                // NaN gaps fail here too.
                if !(gap <= SYMMETRY_TOL) {
                    return Err(SpectralError::NonSymmetric { i, j, gap });
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds from the upper triangle of `f`; the lower triangle mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `self - other`, entrywise.
    pub fn difference(&self, other: &Self) -> Result<Self, SpectralError> {
        if self.n != other.n {
            return Err(SpectralError::BadShape {
                expected: self.data.len(),
                got: other.data.len(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { n: self.n, data })
    }
}

/// Something that can compute `y = A x` for a symmetric `A`.
pub trait SymmetricOperator {
    fn order(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for SymmetricMatrix {
    fn order(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` (stored as `eigenvectors[k]`) pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `max_k ||A v_k - lambda_k v_k||_inf`.
    pub residual: f64,
    pub sweeps: usize,
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn eigs_symmetric(m: &SymmetricMatrix) -> Result<EigenResult, SpectralError> {
    let (values, vectors, sweeps) = jacobi(m, true)?;
    let n = m.order();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residual: f64 = 0.0;
    let mut av = vec![0.0; n];
    for &k in &order {
        let v: Vec<f64> = (0..n).map(|i| vectors[i * n + k]).collect();
        m.apply(&v, &mut av);
        for i in 0..n {
            residual = residual.max((av[i] - values[k] * v[i]).abs());
        }
        eigenvalues.push(values[k]);
        eigenvectors.push(v);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
        residual,
        sweeps,
    })
}

/// Eigenvalues only (ascending); skips accumulating the rotations.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>, SpectralError> {
    let (mut values, _, _) = jacobi(m, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn jacobi(
    m: &SymmetricMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Vec<f64>, usize), SpectralError> {
    let n = m.order();
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    let mut a = m.as_slice().to_vec();
    let mut v = if want_vectors {
        SymmetricMatrix::identity(n).data
    } else {
        Vec::new()
    };
    let threshold = JACOBI_REL_TOL * m.frobenius_norm();

    let mut sweeps = 0;
    loop {
        if off_diagonal_norm(&a, n) <= threshold {
            let diag = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((diag, v, sweeps));
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(SpectralError::NoConvergence(sweeps));
        }
        sweeps += 1;

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
}

/// Unit start vector drawn from a fixed ChaCha stream. The all-ones vector
/// lies in the null space of every Laplacian, so it is never used.
pub fn power_start_vector(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    x
}

/// Dominant eigenvalue of a PSD operator by power iteration with Rayleigh
/// quotients. Stops when successive estimates differ by less than `tol`.
/// With a narrow gap between the two largest eigenvalues the estimate can
/// still be short of the limit by much more than `tol` at that point.
/// Returns `(lambda_max, iterations)`.
pub fn power_iteration_lambda_max<A: SymmetricOperator + ?Sized>(
    op: &A,
    tol: f64,
    max_iters: usize,
) -> Result<(f64, usize), SpectralError> {
    let n = op.order();
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    let mut x = power_start_vector(n);
    power_iterate(op, &mut x, tol, max_iters)
}

/// Power iteration from the unit vector `x`, which is left holding the last
/// normalized iterate, so a run that ran out of steps can be resumed.
pub fn power_iterate<A: SymmetricOperator + ?Sized>(
    op: &A,
    x: &mut [f64],
    tol: f64,
    max_iters: usize,
) -> Result<(f64, usize), SpectralError> {
    let n = op.order();
    if n == 0 {
        return Err(SpectralError::Empty);
    }
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    for iter in 1..=max_iters {
        op.apply(x, &mut y);
        let lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // x is in the null space; for a PSD operator reached from a
            // generic start this only happens for the zero operator.
            return Ok((0.0, iter));
        }
        if (lambda - prev).abs() < tol {
            return Ok((lambda, iter));
        }
        prev = lambda;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    Err(SpectralError::NoConvergence(max_iters))
}
