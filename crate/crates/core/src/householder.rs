//! Householder reflectors and unpivoted QR.
//!
//! A reflector is `H(u) = I - (1/τ)·u·uᵀ` with `u = [1; u_tail]` and
//! `τ = uᵀu / 2`. Accumulating reflectors `u_0, ..., u_{b-1}` (stored as the
//! unit lower-trapezoidal columns of `U`) gives the UT transform
//!
//! ```text
//! H(u_{b-1}) ··· H(u_0) = I - U T⁻ᵀ Uᵀ,   H(u_0) ··· H(u_{b-1}) = I - U T⁻¹ Uᵀ,
//! ```
//!
//! where `T` is the strictly upper part of `UᵀU` with `τ_0, ..., τ_{b-1}` on
//! its diagonal.

use crate::error::{Error, Result};
use crate::matcore::kernels::{self, norm2, Trans};
use crate::matcore::{frobenius_norm, FlopCounter, MatMut, MatRef, Matrix, PivotTrail};

/// Householder vector `u = [1; u_tail]` with scalar `τ` such that
/// `H(u)·x = ρ·e_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflector {
    pub rho: f64,
    pub u_tail: Vec<f64>,
    pub tau: f64,
}

impl Reflector {
    /// Explicit `n x n` matrix `I - (1/τ)·u·uᵀ`.
    pub fn to_matrix(&self) -> Matrix {
        let n = self.u_tail.len() + 1;
        let u = |i: usize| if i == 0 { 1.0 } else { self.u_tail[i - 1] };
        Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - u(i) * u(j) / self.tau
        })
    }
}

/// Computes the reflector that maps `x` onto a multiple of `e_0`.
///
/// `ρ = -sign(x_0)·‖x‖₂` with `sign(0) = +1`. A zero vector yields the
/// degenerate reflector `u_tail = 0`, `τ = 1/2`, `ρ = 0`.
pub fn housev(x: &[f64]) -> Result<Reflector> {
    let (&head, tail) = x
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("housev on an empty vector".into()))?;
    let mut rho = head;
    let mut u_tail = tail.to_vec();
    let tau = housev_in_place(&mut rho, &mut u_tail);
    Ok(Reflector { rho, u_tail, tau })
}

/// In-place form of [`housev`]: `alpha` is overwritten by `ρ` and `tail`
/// by `u_tail`. Returns `τ`.
pub fn housev_in_place(alpha: &mut f64, tail: &mut [f64]) -> f64 {
    let tail_norm = norm2(tail);
    let norm = norm2(&[*alpha, tail_norm]);
    if norm == 0.0 {
        *alpha = 0.0;
        return 0.5;
    }
    let sign = if *alpha >= 0.0 { 1.0 } else { -1.0 };
    let rho = -sign * norm;
    let nu = *alpha - rho;
    tail.iter_mut().for_each(|v| *v /= nu);
    *alpha = rho;
    let scaled = tail_norm / nu.abs();
    (1.0 + scaled * scaled) / 2.0
}

pub(crate) fn apply_reflector_left(
    u_tail: &[f64],
    tau: f64,
    b: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    kernels::reflect_left(u_tail, tau, b, flops);
}

/// Packed result of a (possibly pivoted) Householder QR factorization.
///
/// `packed` stores `R` on and above the diagonal and the Householder tails
/// below it. `t_blocks` holds one upper-triangular `T` per panel, in
/// factorization order; their orders sum to `taus.len()`.
#[derive(Clone, Debug)]
pub struct QrFactors {
    pub packed: Matrix,
    pub t_blocks: Vec<Matrix>,
    pub taus: Vec<f64>,
    pub trail: PivotTrail,
}

impl QrFactors {
    /// Number of reflectors (`min(m, n)` for complete factorizations).
    pub fn steps(&self) -> usize {
        self.taus.len()
    }

    /// The `steps x n` upper-trapezoidal factor `R`.
    pub fn r(&self) -> Matrix {
        let k = self.steps();
        Matrix::from_fn(k, self.packed.cols(), |i, j| {
            if i <= j {
                self.packed[(i, j)]
            } else {
                0.0
            }
        })
    }

    pub fn r_diag(&self) -> Vec<f64> {
        (0..self.steps()).map(|i| self.packed[(i, i)]).collect()
    }

    /// Starting column of each `T` block.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.t_blocks
            .iter()
            .scan(0, |acc, t| {
                let start = *acc;
                *acc += t.rows();
                Some(start)
            })
            .collect()
    }

    /// `A·P` for the column order chosen by the factorization.
    pub fn permute(&self, a: &Matrix) -> Result<Matrix> {
        let mut ap = a.clone();
        self.trail
            .apply_to(&mut ap, crate::matcore::Direction::Forward)?;
        Ok(ap)
    }

    /// Returns `(‖Q·R - A·P‖_F, ‖QᵀQ - I‖_F)` using the thin `Q`.
    pub fn residuals(&self, a: &Matrix) -> Result<(f64, f64)> {
        if a.shape() != self.packed.shape() {
            return Err(Error::Dimension(format!(
                "original {:?} vs factored {:?}",
                a.shape(),
                self.packed.shape()
            )));
        }
        let q = form_q(self, self.steps())?;
        let recon = q.matmul(&self.r()).sub(&self.permute(a)?);
        let orth = q.t_matmul(&q).sub(&Matrix::identity(q.cols()));
        Ok((
            frobenius_norm(recon.as_ref()),
            frobenius_norm(orth.as_ref()),
        ))
    }
}

/// Unblocked Householder QR of `a` that also accumulates the UT factor `t`.
///
/// Runs `min(m, n)` steps; `t` must be square of that order. On return `a`
/// holds `U\R` and the `τ`s are returned.
pub fn hqr_unb_form_t(
    mut a: MatMut<'_>,
    mut t: MatMut<'_>,
    flops: Option<&FlopCounter>,
) -> Result<Vec<f64>> {
    let steps = a.rows().min(a.cols());
    if t.rows() != steps || t.cols() != steps {
        return Err(Error::Dimension(format!(
            "T is {}x{} but the panel needs order {steps}",
            t.rows(),
            t.cols()
        )));
    }
    let mut taus = Vec::with_capacity(steps);
    for j in 0..steps {
        let (mut left, right) = a.rb_mut().split_at_col(j + 1);
        let tau = {
            let col = left.col_mut(j);
            let (head, tail) = col[j..].split_at_mut(1);
            housev_in_place(&mut head[0], tail)
        };
        taus.push(tau);
        let left = left.rb();
        let u21 = &left.col(j)[j + 1..];
        apply_reflector_left(u21, tau, right.rows_from(j), flops);

        // t01 = U20ᵀ u21 + a10, the new column of T.
        let below = left.sub(j + 1, 0, left.rows() - j - 1, j);
        let mut t01: Vec<f64> = (0..j).map(|i| left.get(j, i)).collect();
        kernels::gemv(1.0, below, Trans::Yes, u21, 1.0, &mut t01, flops);
        for (i, v) in t01.into_iter().enumerate() {
            t.set(i, j, v);
        }
        t.set(j, j, tau);
        for i in j + 1..steps {
            t.set(i, j, 0.0);
        }
    }
    Ok(taus)
}

/// Applies the block reflector defined by `u` (unit lower trapezoidal,
/// `rows x k`) and `t` to `b` from the left.
///
/// With `Trans::Yes` this computes `b := (I - U T⁻¹ Uᵀ)ᵀ b`, i.e.
/// `b := b - U·W` with `W = T⁻ᵀ(Uᵀ b)`; with `Trans::No` it applies
/// `I - U T⁻¹ Uᵀ` itself.
pub fn apply_block_reflector(
    u: MatRef<'_>,
    t: MatRef<'_>,
    b: MatMut<'_>,
    trans: Trans,
    flops: Option<&FlopCounter>,
) -> Result<()> {
    let k = u.cols();
    if t.rows() != k || t.cols() != k {
        return Err(Error::Dimension(format!(
            "T is {}x{} for {k} reflectors",
            t.rows(),
            t.cols()
        )));
    }
    if u.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "reflectors have {} rows, target has {}",
            u.rows(),
            b.rows()
        )));
    }
    if u.rows() < k {
        return Err(Error::Dimension(format!(
            "{k} reflectors need at least {k} rows, got {}",
            u.rows()
        )));
    }
    if k == 0 || b.cols() == 0 {
        return Ok(());
    }
    let mut w = Matrix::zeros(k, b.cols());
    kernels::unit_lower_trans_mul(u, b.rb(), w.as_mut(), flops);
    match trans {
        Trans::Yes => kernels::trsm_upper_trans_left(t, w.as_mut(), flops),
        Trans::No => kernels::trsm_upper_left(t, w.as_mut(), flops),
    }
    kernels::unit_lower_mul_sub(u, w.as_ref(), b, flops);
    Ok(())
}

/// `b := (I - U T⁻¹ Uᵀ)ᵀ b`, the trailing update of blocked HQR.
pub fn apply_block_qt(
    u: MatRef<'_>,
    t: MatRef<'_>,
    b: MatMut<'_>,
    flops: Option<&FlopCounter>,
) -> Result<()> {
    apply_block_reflector(u, t, b, Trans::Yes, flops)
}

/// Unblocked HQR of the whole matrix as a single panel.
pub fn hqr_unb(mut a: Matrix, flops: Option<&FlopCounter>) -> Result<QrFactors> {
    let steps = a.rows().min(a.cols());
    let mut t = Matrix::zeros(steps, steps);
    let taus = hqr_unb_form_t(a.as_mut(), t.as_mut(), flops)?;
    Ok(QrFactors {
        packed: a,
        t_blocks: vec![t],
        taus,
        trail: PivotTrail::new(),
    })
}

/// Blocked HQR: each `b`-column panel is factored by [`hqr_unb_form_t`],
/// then the trailing columns are updated with one UT block reflector.
/// The final panel may be narrower than `b`.
pub fn hqr_blk(mut a: Matrix, b: usize, flops: Option<&FlopCounter>) -> Result<QrFactors> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let steps = a.rows().min(a.cols());
    let mut t_blocks = Vec::new();
    let mut taus = Vec::with_capacity(steps);
    let mut k = 0;
    while k < steps {
        let kb = b.min(steps - k);
        let mut t = Matrix::zeros(kb, kb);
        let (left, right) = a.as_mut().rows_from(k).split_at_col(k + kb);
        let rows = left.rows();
        let mut panel = left.sub_mut(0, k, rows, kb);
        taus.extend(hqr_unb_form_t(panel.rb_mut(), t.as_mut(), flops)?);
        apply_block_qt(panel.rb(), t.as_ref(), right, flops)?;
        t_blocks.push(t);
        k += kb;
    }
    Ok(QrFactors {
        packed: a,
        t_blocks,
        taus,
        trail: PivotTrail::new(),
    })
}

/// First `k` columns of `Q = H(u_0)·H(u_1) ··· H(u_{r-1})`.
pub fn form_q(f: &QrFactors, k: usize) -> Result<Matrix> {
    let m = f.packed.rows();
    if k > m {
        return Err(Error::InvalidArgument(format!(
            "requested {k} columns of Q but it has only {m}"
        )));
    }
    let mut q = Matrix::eye(m, k);
    for j in (0..f.steps()).rev() {
        let u_tail = &f.packed.col(j)[j + 1..];
        apply_reflector_left(u_tail, f.taus[j], q.as_mut().rows_from(j), None);
    }
    Ok(q)
}
