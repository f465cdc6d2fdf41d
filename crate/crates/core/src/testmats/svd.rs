use crate::error::{Error, Result};
use crate::matcore::kernels::{dot, gemv, norm2, Trans};
use crate::matcore::{GaussianRng, MatRef, Matrix};

/// Largest `min(m, n)` the Jacobi oracle accepts.
pub const JACOBI_MAX_DIM: usize = 1024;
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 30;

/// Singular values in descending order by one-sided (Hestenes) Jacobi.
///
/// Column pairs are rotated until every pair satisfies
/// `|a_pᵀa_q| ≤ 1e-14·‖a_p‖·‖a_q‖`; at most 30 sweeps.
pub fn jacobi_svd_values(a: &Matrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if m.min(n) > JACOBI_MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "Jacobi oracle is limited to min(m, n) <= {JACOBI_MAX_DIM}, got {m}x{n}"
        )));
    }
    let mut w = if m < n { a.transpose() } else { a.clone() };
    let cols = w.cols();
    let mut worst = 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        worst = 0.0_f64;
        // Squared norms are refreshed every sweep and tracked through the
        // rotations in between.
        let mut sq: Vec<f64> = (0..cols).map(|j| dot(w.col(j), w.col(j))).collect();
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta) = (sq[p], sq[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(w.col(p), w.col(q));
                let off = gamma.abs() / (alpha * beta).sqrt();
                worst = worst.max(off);
                if off <= JACOBI_TOL {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                sq[p] = (alpha - t * gamma).max(0.0);
                sq[q] = beta + t * gamma;
            }
        }
        if worst <= JACOBI_TOL {
            let mut sv: Vec<f64> = (0..cols).map(|j| norm2(w.col(j))).collect();
            sv.sort_by(|x, y| y.total_cmp(x));
            return Ok(sv);
        }
    }
    Err(Error::NoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        residual: worst,
    })
}

fn rotate(w: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = w.rows();
    let data = w.data_mut();
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

const POWER_STEPS: usize = 50;
const POWER_RTOL: f64 = 1e-6;

/// Spectral norm estimate by power iteration on `AᵀA` from a seeded
/// Gaussian start: at most 50 steps, stopping once the estimate changes by
/// less than `1e-6` relative.
pub fn spectral_norm(a: MatRef<'_>, seed: u64) -> f64 {
    let (m, n) = (a.rows(), a.cols());
    if m == 0 || n == 0 {
        return 0.0;
    }
    let mut rng = GaussianRng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let mut y = vec![0.0; m];
    let mut est = 0.0;
    for _ in 0..POWER_STEPS {
        let nx = norm2(&x);
        if nx == 0.0 {
            return est;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        gemv(1.0, a, Trans::No, &x, 0.0, &mut y, None);
        let next = norm2(&y);
        gemv(1.0, a, Trans::Yes, &y, 0.0, &mut x, None);
        let done = (next - est).abs() <= POWER_RTOL * next;
        est = next;
        if done {
            break;
        }
    }
    est
}
