//! Dense Hermitian helpers over `faer`, plus a Lanczos solver for the
//! extremal eigenvalue of large real symmetric operators.

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = Mat<c64>;

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error("Lanczos iteration stalled with residual {residual:e} after {iterations} steps")]
    LanczosStalled { residual: f64, iterations: usize },
}

/// Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat), LinalgError> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(m: &CMat) -> Result<Vec<f64>, LinalgError> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)
}

pub fn real_symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>, LinalgError> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(
        n,
        n,
        |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) },
    )
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm_l2()
}

pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm_l2()
}

/// `‖M − M*‖_F`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    (m - m.adjoint()).norm_l2()
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> Result<f64, LinalgError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let sv = m.singular_values().map_err(|_| LinalgError::NoConvergence)?;
    Ok(sv.first().copied().unwrap_or(0.0))
}

pub fn trace(m: &CMat) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Orthogonal projection onto the span of eigenvectors whose eigenvalue is
/// at least `threshold`, and the number of such eigenvectors.
pub fn spectral_projection(values: &[f64], vectors: &CMat, threshold: f64) -> (CMat, usize) {
    let cols: Vec<usize> = (0..values.len()).filter(|&k| values[k] >= threshold).collect();
    let n = vectors.nrows();
    let basis = Mat::from_fn(n, cols.len(), |i, k| vectors[(i, cols[k])]);
    (&basis * basis.adjoint(), cols.len())
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iterations: 400,
            tolerance: 1e-10,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Unit Ritz vector for `value`.
    pub vector: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for q in against {
        let c = dot(q, v);
        axpy(-c, q, v);
    }
}

/// Largest eigenvalue of a real symmetric operator restricted to the
/// orthogonal complement of `deflate` (orthonormal vectors spanning an
/// invariant subspace). Full reorthogonalization; stops once the Ritz
/// residual drops below the tolerance.
pub fn lanczos_top<F>(
    n: usize,
    mut apply: F,
    deflate: &[Vec<f64>],
    opts: LanczosOptions,
) -> Result<LanczosResult, LinalgError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut v, deflate);
    orthogonalize(&mut v, deflate);
    let norm = dot(&v, &v).sqrt();
    if norm == 0.0 {
        return Ok(LanczosResult {
            value: f64::NEG_INFINITY,
            residual: 0.0,
            iterations: 0,
            vector: Vec::new(),
        });
    }
    v.iter_mut().for_each(|x| *x /= norm);

    let max_iter = opts.max_iterations.min(n.saturating_sub(deflate.len())).max(1);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last: Option<(f64, f64, usize, Vec<f64>)> = None;

    for k in 0..max_iter {
        w.iter_mut().for_each(|x| *x = 0.0);
        apply(&basis[k], &mut w);
        let alpha = dot(&basis[k], &w);
        alphas.push(alpha);
        for _ in 0..2 {
            orthogonalize(&mut w, deflate);
            orthogonalize(&mut w, &basis);
        }
        let beta = dot(&w, &w).sqrt();

        let steps = k + 1;
        let breakdown = beta < 1e-13;
        if breakdown || steps % 10 == 0 || steps == max_iter {
            let (value, y) = tridiagonal_top(&alphas, &betas)?;
            let residual = if breakdown { 0.0 } else { (beta * y[k]).abs() };
            let converged = residual <= opts.tolerance;
            last = Some((value, residual, steps, y));
            if converged {
                break;
            }
        }
        if breakdown {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    let (value, residual, iterations, y) = last.expect("at least one Ritz check");
    if residual > opts.tolerance {
        return Err(LinalgError::LanczosStalled { residual, iterations });
    }
    let mut vector = vec![0.0; n];
    for (q, &c) in basis.iter().zip(&y) {
        axpy(c, q, &mut vector);
    }
    let norm = dot(&vector, &vector).sqrt();
    vector.iter_mut().for_each(|x| *x /= norm);
    Ok(LanczosResult {
        value,
        residual,
        iterations,
        vector,
    })
}

/// Top eigenvalue of the Lanczos tridiagonal and its unit eigenvector.
fn tridiagonal_top(alphas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>), LinalgError> {
    let k = alphas.len();
    let t = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LinalgError::NoConvergence)?;
    let top = k - 1;
    let u = evd.U();
    Ok((evd.S().column_vector()[top], (0..k).map(|i| u[(i, top)]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_dimensions_and_entries() {
        let a = Mat::from_fn(2, 2, |i, j| c64::new((i * 2 + j) as f64, 0.0));
        let b = identity(3);
        let k = kron(&a, &b);
        assert_eq!((k.nrows(), k.ncols()), (6, 6));
        assert_eq!(k[(3, 0)], c64::new(2.0, 0.0));
        assert_eq!(k[(4, 1)], c64::new(2.0, 0.0));
        assert_eq!(k[(4, 0)], c64::new(0.0, 0.0));
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                c64::new([2.0, -1.0, 0.5][i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let (vals, _) = hermitian_eigen(&m).unwrap();
        assert_eq!(vals, vec![-1.0, 0.5, 2.0]);
        let (p, rank) = {
            let (v, u) = hermitian_eigen(&m).unwrap();
            spectral_projection(&v, &u, 0.4)
        };
        assert_eq!(rank, 2);
        assert!((trace(&p).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lanczos_finds_cycle_second_eigenvalue() {
        // normalized adjacency of the 60-cycle: eigenvalues cos(2πk/60)
        let n = 60;
        let ones = vec![1.0 / (n as f64).sqrt(); n];
        let res = lanczos_top(
            n,
            |x, y| {
                for i in 0..n {
                    y[i] = 0.5 * (x[(i + 1) % n] + x[(i + n - 1) % n]);
                }
            },
            &[ones],
            LanczosOptions::default(),
        )
        .unwrap();
        let expected = (2.0 * std::f64::consts::PI / n as f64).cos();
        assert!((res.value - expected).abs() < 1e-9, "{} vs {}", res.value, expected);
    }

    #[test]
    fn operator_norm_of_rank_one() {
        let n = 4;
        let j = Mat::from_fn(n, n, |_, _| c64::new(1.0, 0.0));
        assert!((operator_norm(&j).unwrap() - 4.0).abs() < 1e-12);
    }
}
