use crate::error::{Error, Result};
use crate::householder::{form_q, QrFactors};
use crate::matcore::{frobenius_norm, Matrix};

use super::svd::{jacobi_svd_values, spectral_norm};

/// Largest `n` for which the explicit residual `‖AP − Q_k R_k‖_F` is also
/// evaluated.
pub const EXPLICIT_RESIDUAL_MAX_N: usize = 128;

/// Trailing blocks whose smaller dimension is at most this get their
/// spectral norm from the Jacobi oracle; larger ones use power iteration.
pub const EXACT_SPECTRAL_MAX_DIM: usize = 256;

/// Power iteration only approaches `‖T‖₂` from below and stalls on
/// clustered leading singular values, so small blocks use the oracle.
fn block_spectral_norm(t: &Matrix, seed: u64) -> f64 {
    if t.rows().min(t.cols()) <= EXACT_SPECTRAL_MAX_DIM {
        if let Ok(sv) = jacobi_svd_values(t) {
            return sv.first().copied().unwrap_or(0.0);
        }
    }
    spectral_norm(t.as_ref(), seed)
}

/// Truncation errors of one factorization at a set of ranks.
///
/// `e_frob[i]` is the Frobenius norm of the trailing block
/// `R(ks[i].., ks[i]..)`, which equals the error of the rank-`ks[i]`
/// approximation `Q(:, ..k)·R(..k, :)` of `A·P`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QualityReport {
    pub ks: Vec<usize>,
    pub e_frob: Vec<f64>,
    pub e_spec: Option<Vec<f64>>,
    /// `|R_ii|` for every `i`.
    pub r_diag: Vec<f64>,
    /// `sqrt(Σ_{j≥k} σ_j²)` (0-based `σ`), the best possible Frobenius error.
    pub sv_bound_frob: Option<Vec<f64>>,
    /// `σ_k` (0-based), the best possible spectral error.
    pub sv_bound_spec: Option<Vec<f64>>,
    /// `‖AP − Q(:, ..k)·R(..k, :)‖_F`, for small problems only.
    pub e_frob_explicit: Option<Vec<f64>>,
    pub algo_label: String,
    pub seed: u64,
}

/// Even grid `0, b, 2b, …` up to `steps`.
pub fn k_grid(steps: usize, b: usize) -> Vec<usize> {
    (0..=steps).step_by(b.max(1)).collect()
}

fn trailing_block(f: &QrFactors, k: usize) -> Matrix {
    let n = f.packed.cols();
    let steps = f.steps();
    Matrix::from_fn(steps - k, n - k, |i, j| {
        if i <= j {
            f.packed[(k + i, k + j)]
        } else {
            0.0
        }
    })
}

/// Evaluates the truncation errors of `f` (a factorization of `a`) at the
/// ranks `ks`; `sigmas`, when known, adds the singular-value floors.
pub fn truncation_errors(
    a: &Matrix,
    f: &QrFactors,
    ks: &[usize],
    with_spectral: bool,
    sigmas: Option<&[f64]>,
) -> Result<QualityReport> {
    let steps = f.steps();
    if let Some(&k) = ks.iter().find(|&&k| k > steps) {
        return Err(Error::InvalidArgument(format!(
            "rank {k} exceeds the {steps} computed steps"
        )));
    }
    if a.shape() != f.packed.shape() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{} but the factorization is {}x{}",
            a.rows(),
            a.cols(),
            f.packed.rows(),
            f.packed.cols()
        )));
    }
    let blocks: Vec<Matrix> = ks.iter().map(|&k| trailing_block(f, k)).collect();
    let e_frob = blocks.iter().map(|t| frobenius_norm(t.as_ref())).collect();
    let e_spec = with_spectral.then(|| {
        blocks
            .iter()
            .enumerate()
            .map(|(i, t)| block_spectral_norm(t, i as u64))
            .collect()
    });
    let e_frob_explicit = if a.cols() <= EXPLICIT_RESIDUAL_MAX_N {
        let ap = f.permute(a)?;
        let q = form_q(f, steps)?;
        let r = f.r();
        let mut out = Vec::with_capacity(ks.len());
        for &k in ks {
            let qk = q.submatrix(0, 0, q.rows(), k);
            let rk = r.submatrix(0, 0, k, r.cols());
            out.push(frobenius_norm(ap.sub(&qk.matmul(&rk)).as_ref()));
        }
        Some(out)
    } else {
        None
    };
    let mut report = QualityReport {
        ks: ks.to_vec(),
        e_frob,
        e_spec,
        r_diag: f.r_diag().iter().map(|x| x.abs()).collect(),
        e_frob_explicit,
        ..Default::default()
    };
    if let Some(s) = sigmas {
        report.attach_bounds(s);
    }
    Ok(report)
}

impl QualityReport {
    /// Fills the singular-value floors from `sigmas` (descending).
    pub fn attach_bounds(&mut self, sigmas: &[f64]) {
        let mut tail_sq = vec![0.0; sigmas.len() + 1];
        for j in (0..sigmas.len()).rev() {
            tail_sq[j] = tail_sq[j + 1] + sigmas[j] * sigmas[j];
        }
        let at = |k: usize| k.min(sigmas.len());
        self.sv_bound_frob = Some(self.ks.iter().map(|&k| tail_sq[at(k)].sqrt()).collect());
        self.sv_bound_spec = Some(
            self.ks
                .iter()
                .map(|&k| sigmas.get(k).copied().unwrap_or(0.0))
                .collect(),
        );
    }
}
