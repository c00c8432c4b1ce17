//! Von Neumann entropy of graphs.
//!
//! The density matrix of a graph with `m >= 1` edges is `rho = L / (2m)`,
//! where `L = D - A`. Its eigenvalues form a probability distribution and the
//! entropy is their Shannon entropy in nats. Three routes are provided:
//!
//! * [`vne_exact`]: full eigendecomposition, `O(n^3)`.
//! * [`vne_quadratic`]: `Q = Tr(rho (I - rho))`, from degrees alone.
//! * [`vne_approx`]: `H_hat = -Q ln(lambda_max)`, with `lambda_max` from
//!   power iteration on the sparse Laplacian. Never exceeds the exact value.
//!
//! Graphs without edges have no density matrix; their entropy, `Q`, `H_hat`
//! and `lambda_max` are all reported as zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, LaplacianView};
use crate::spectral::{
    power_iterate, power_start_vector, symmetric_eigenvalues, SpectralError, SymmetricMatrix,
    SymmetricOperator, POWER_MAX_ITERS, POWER_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error("graphs differ in size: {0} vs {1} nodes")]
    SizeMismatch(usize, usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `x ln x` with `0 ln 0 = 0`. Tiny negative rounding noise counts as zero.
fn x_ln_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Shannon entropy (nats) of a list of probabilities.
pub fn shannon(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| x_ln_x(p)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub edge_count: usize,
    pub matrix: SymmetricMatrix,
}

impl DensityMatrix {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }
}

pub fn density_matrix(g: &Graph) -> Result<DensityMatrix, EntropyError> {
    let m = g.edge_count();
    if m == 0 {
        return Err(EntropyError::EdgelessGraph);
    }
    let lap = g.laplacian();
    let scale = 1.0 / (2.0 * m as f64);
    let matrix = SymmetricMatrix::from_fn(g.node_count(), |i, j| lap.get(i, j) * scale);
    Ok(DensityMatrix {
        edge_count: m,
        matrix,
    })
}

/// `rho = L / (2m)` applied matrix-free.
struct SparseDensity<'a> {
    laplacian: LaplacianView<'a>,
    scale: f64,
    shift: f64,
}

impl SymmetricOperator for SparseDensity<'_> {
    fn order(&self) -> usize {
        self.laplacian.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.laplacian.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = *yi * self.scale - self.shift * xi;
        }
    }
}

/// Eigenvalues of `rho(L)`, ascending. Empty for edgeless graphs.
pub fn density_spectrum(g: &Graph) -> Result<Vec<f64>, EntropyError> {
    match density_matrix(g) {
        Ok(rho) => Ok(symmetric_eigenvalues(&rho.matrix)?),
        Err(EntropyError::EdgelessGraph) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

/// Exact Von Neumann entropy in nats.
pub fn vne_exact(g: &Graph) -> Result<f64, EntropyError> {
    Ok(shannon(&density_spectrum(g)?))
}

/// `Q = 1 - 1/(2m) - (1/(4m^2)) sum_i d_i^2`.
pub fn vne_quadratic(g: &Graph) -> Result<f64, EntropyError> {
    let m = g.edge_count();
    if m == 0 {
        return Err(EntropyError::EdgelessGraph);
    }
    let m = m as f64;
    let sum_sq: f64 = g.degrees().iter().map(|&d| (d * d) as f64).sum();
    Ok(1.0 - 1.0 / (2.0 * m) - sum_sq / (4.0 * m * m))
}

/// Plain power steps before switching to the shifted operator.
const POWER_SHIFT_AFTER: usize = 64;

/// Fraction of the `lambda_max(L) >= d_max + 1` bound subtracted once the
/// plain iteration is slow. Below one half, so the shifted spectrum's largest
/// magnitude still belongs to the top eigenvalue.
const POWER_SHIFT: f64 = 0.45;

/// Dominant eigenvalue of `rho(L)` by power iteration, without building a
/// dense matrix. Zero for edgeless graphs. If the plain iteration has not
/// settled after a few dozen steps, it continues on `rho - cI`, which has the
/// same top eigenvector and a larger relative gap.
pub fn density_lambda_max(g: &Graph) -> Result<f64, EntropyError> {
    let m = g.edge_count();
    if m == 0 {
        return Ok(0.0);
    }
    let scale = 1.0 / (2.0 * m as f64);
    let mut op = SparseDensity {
        laplacian: g.laplacian(),
        scale,
        shift: 0.0,
    };
    let mut x = power_start_vector(g.node_count());
    match power_iterate(&op, &mut x, POWER_TOL, POWER_SHIFT_AFTER) {
        Err(SpectralError::NoConvergence(_)) => {}
        done => return Ok(done?.0),
    }
    let d_max = g.degrees().iter().copied().max().unwrap_or(0);
    op.shift = POWER_SHIFT * (d_max + 1) as f64 * scale;
    let (lambda, _) = power_iterate(&op, &mut x, POWER_TOL, POWER_MAX_ITERS - POWER_SHIFT_AFTER)
        .map_err(|e| match e {
            SpectralError::NoConvergence(_) => SpectralError::NoConvergence(POWER_MAX_ITERS),
            e => e,
        })?;
    Ok(lambda + op.shift)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub h_exact: Option<f64>,
    pub q: f64,
    pub lambda_max: f64,
    pub h_hat: f64,
}

/// Approximate entropy `H_hat = -Q ln(lambda_max)`. `h_exact` stays `None`.
pub fn vne_approx(g: &Graph) -> Result<EntropyEstimate, EntropyError> {
    if g.edge_count() == 0 {
        return Ok(EntropyEstimate {
            h_exact: None,
            q: 0.0,
            lambda_max: 0.0,
            h_hat: 0.0,
        });
    }
    let q = vne_quadratic(g)?;
    let lambda_max = density_lambda_max(g)?;
    Ok(EntropyEstimate {
        h_exact: None,
        q,
        lambda_max,
        h_hat: -q * lambda_max.ln(),
    })
}

/// [`vne_approx`] with the exact entropy filled in as well.
pub fn vne_estimate_with_exact(g: &Graph) -> Result<EntropyEstimate, EntropyError> {
    let mut est = vne_approx(g)?;
    est.h_exact = Some(vne_exact(g)?);
    Ok(est)
}

/// Cross-check of the quadratic entropy: `Tr(rho (I - rho))` evaluated on the
/// dense matrix, paired with the degree-only formula. The two must agree.
pub fn trace_identity_check(g: &Graph) -> Result<(f64, f64), EntropyError> {
    let rho = density_matrix(g)?;
    let n = rho.order();
    let trace = rho.matrix.trace();
    // Tr(rho^2) = sum_ij rho_ij^2 for symmetric rho
    let trace_sq: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| rho.matrix.get(i, j).powi(2))
        .sum();
    Ok((trace - trace_sq, vne_quadratic(g)?))
}

/// Binary entropy `S(t) = -t ln t - (1 - t) ln(1 - t)` for `t` in `[0, 1]`.
/// Above 1 the expression is undefined; its maximum `ln 2` is returned, which
/// keeps the bound below valid (it dominates the binary entropy of any
/// argument).
pub fn binary_entropy(t: f64) -> f64 {
    if t > 1.0 {
        std::f64::consts::LN_2
    } else {
        -x_ln_x(t) - x_ln_x(1.0 - t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationBound {
    /// Trace distance `||rho' - rho||_1`.
    pub t: f64,
    pub s_t: f64,
    /// `(1/2) t ln(n - 1) + S(t)`.
    pub bound: f64,
    /// Observed `|H(rho') - H(rho)|`.
    pub delta_h: f64,
}

impl PerturbationBound {
    pub fn holds(&self) -> bool {
        self.delta_h <= self.bound + 1e-12
    }
}

/// Fannes–Audenaert bound on the entropy change between two graphs on the
/// same node set, nodes aligned by id.
pub fn fannes_audenaert_bound(
    g: &Graph,
    g_perturbed: &Graph,
) -> Result<PerturbationBound, EntropyError> {
    let n = g.node_count();
    if n != g_perturbed.node_count() {
        return Err(EntropyError::SizeMismatch(n, g_perturbed.node_count()));
    }
    let rho = density_or_zero(g)?;
    let rho_p = density_or_zero(g_perturbed)?;
    let t = if n == 0 {
        0.0
    } else {
        let diff = rho_p.difference(&rho)?;
        symmetric_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum()
    };
    let s_t = binary_entropy(t);
    let log_term = if n >= 2 { ((n - 1) as f64).ln() } else { 0.0 };
    let delta_h = (vne_exact(g_perturbed)? - vne_exact(g)?).abs();
    Ok(PerturbationBound {
        t,
        s_t,
        bound: 0.5 * t * log_term + s_t,
        delta_h,
    })
}

// Edgeless graphs contribute the zero matrix.
fn density_or_zero(g: &Graph) -> Result<SymmetricMatrix, EntropyError> {
    match density_matrix(g) {
        Ok(rho) => Ok(rho.matrix),
        Err(EntropyError::EdgelessGraph) => {
            Ok(SymmetricMatrix::from_fn(g.node_count(), |_, _| 0.0))
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::new(2, &[(0, 1)]).unwrap()
    }
    fn k3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }
    fn s3() -> Graph {
        Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }
    fn path3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    // S3 spectrum {0, 1/6, 1/6, 2/3}
    fn s3_entropy() -> f64 {
        (1.0 / 3.0) * 6f64.ln() + (2.0 / 3.0) * 1.5f64.ln()
    }

    #[test]
    fn density_matrices() {
        let rho = density_matrix(&k2()).unwrap().matrix;
        assert_eq!(rho.as_slice(), &[0.5, -0.5, -0.5, 0.5]);

        let rho = density_matrix(&k3()).unwrap().matrix;
        for i in 0..3 {
            assert_eq!(rho.get(i, i), 1.0 / 3.0);
        }

        let rho = density_matrix(&s3()).unwrap().matrix;
        let diag: Vec<f64> = (0..4).map(|i| rho.get(i, i)).collect();
        assert_eq!(diag, vec![0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0]);
        assert!((rho.trace() - 1.0).abs() < 1e-15);

        assert_eq!(
            density_matrix(&Graph::empty(3)),
            Err(EntropyError::EdgelessGraph)
        );
    }

    #[test]
    fn exact_entropy_known_values() {
        assert!(vne_exact(&k2()).unwrap().abs() < 1e-12);
        assert!((vne_exact(&k3()).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((vne_exact(&s3()).unwrap() - s3_entropy()).abs() < 1e-12);
        assert!((s3_entropy() - 0.867563).abs() < 1e-6);
        assert_eq!(vne_exact(&Graph::empty(1)).unwrap(), 0.0);
        assert_eq!(vne_exact(&Graph::empty(4)).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_known_values() {
        assert_eq!(vne_quadratic(&k2()).unwrap(), 0.0);
        assert!((vne_quadratic(&k3()).unwrap() - 0.5).abs() < 1e-15);
        assert!((vne_quadratic(&s3()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            vne_quadratic(&Graph::empty(2)),
            Err(EntropyError::EdgelessGraph)
        );
    }

    #[test]
    fn approx_known_values() {
        let e = vne_approx(&k2()).unwrap();
        assert!((e.lambda_max - 1.0).abs() < 1e-9);
        assert_eq!(e.h_hat, 0.0);

        let e = vne_estimate_with_exact(&k3()).unwrap();
        assert!((e.h_hat - (-0.5 * 0.5f64.ln())).abs() < 1e-9);
        assert!((e.h_hat - 0.346574).abs() < 1e-6);
        assert!(e.h_hat <= e.h_exact.unwrap());

        let e = vne_estimate_with_exact(&s3()).unwrap();
        assert!((e.lambda_max - 2.0 / 3.0).abs() < 1e-9);
        assert!((e.h_hat - 0.202733).abs() < 1e-6);
        assert!(e.h_hat <= e.h_exact.unwrap());

        let e = vne_approx(&Graph::empty(5)).unwrap();
        assert_eq!((e.q, e.lambda_max, e.h_hat), (0.0, 0.0, 0.0));
        assert_eq!(e.h_exact, None);
    }

    #[test]
    fn trace_identity_small_graphs() {
        let (lhs, rhs) = trace_identity_check(&k3()).unwrap();
        assert!((lhs - 0.5).abs() < 1e-15 && (rhs - 0.5).abs() < 1e-15);
        let (lhs, rhs) = trace_identity_check(&k2()).unwrap();
        assert!(lhs.abs() < 1e-15 && rhs.abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_edges() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(binary_entropy(1.5), 2f64.ln());
    }

    #[test]
    fn bound_identical_graphs() {
        let b = fannes_audenaert_bound(&k3(), &k3()).unwrap();
        assert!(b.t.abs() < 1e-14);
        assert!(b.bound.abs() < 1e-12);
        assert!(b.delta_h.abs() < 1e-14);
    }

    #[test]
    fn bound_triangle_vs_path() {
        // 12 (rho(P3) - rho(K3)) = [[-1,-1,2],[-1,2,-1],[2,-1,-1]], whose
        // eigenvalues are {0, -3, 3}; so T = 6/12.
        let b = fannes_audenaert_bound(&k3(), &path3()).unwrap();
        assert!((b.t - 0.5).abs() < 1e-12);
        assert!((b.bound - 1.25 * 2f64.ln()).abs() < 1e-12);
        let h_path = shannon(&[0.25, 0.75]);
        assert!((b.delta_h - (2f64.ln() - h_path)).abs() < 1e-12);
        assert!(b.holds(), "{b:?}");
    }

    #[test]
    fn bound_size_mismatch() {
        assert_eq!(
            fannes_audenaert_bound(&k2(), &k3()),
            Err(EntropyError::SizeMismatch(2, 3))
        );
    }
}
