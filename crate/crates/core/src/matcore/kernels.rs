//! BLAS-like kernels on column-major views.
//!
//! Every kernel takes an optional [`FlopCounter`]. Counts use the usual
//! floating-point operation convention: a fused multiply-add contributes
//! two operations, so `C += A·B` with inner dimension `k` costs `2·m·n·k`.
//! Vector norms, scalings and swaps are bookkeeping and are not counted.

use std::cell::Cell;

use super::matrix::{MatMut, MatRef};

/// Accumulates floating-point operation counts across kernel calls.
#[derive(Debug, Default)]
pub struct FlopCounter {
    count: Cell<u64>,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&self, n: u64) {
        self.count.set(self.count.get() + n);
    }

    pub fn get(&self) -> u64 {
        self.count.get()
    }

    pub fn reset(&self) {
        self.count.set(0);
    }
}

#[inline]
fn count(flops: Option<&FlopCounter>, n: usize) {
    if let Some(f) = flops {
        f.add(n as u64);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trans {
    No,
    Yes,
}

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean norm, scaled by the largest magnitude to avoid overflow.
pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * ssq.sqrt()
}

/// `c := alpha·op(a)·op(b) + beta·c`.
#[allow(clippy::too_many_arguments)]
pub fn gemm(
    alpha: f64,
    a: MatRef<'_>,
    ta: Trans,
    b: MatRef<'_>,
    tb: Trans,
    beta: f64,
    mut c: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    let (m, k) = match ta {
        Trans::No => (a.rows(), a.cols()),
        Trans::Yes => (a.cols(), a.rows()),
    };
    let (kb, n) = match tb {
        Trans::No => (b.rows(), b.cols()),
        Trans::Yes => (b.cols(), b.rows()),
    };
    assert_eq!(k, kb, "gemm inner dimension");
    assert_eq!((c.rows(), c.cols()), (m, n), "gemm output shape");
    if m == 0 || n == 0 {
        return;
    }
    if beta != 1.0 {
        for j in 0..n {
            let cj = c.col_mut(j);
            if beta == 0.0 {
                cj.fill(0.0);
            } else {
                cj.iter_mut().for_each(|x| *x *= beta);
            }
        }
    }
    if k == 0 || alpha == 0.0 {
        return;
    }
    count(flops, 2 * m * n * k);
    match (ta, tb) {
        (Trans::No, Trans::No) => {
            for j in 0..n {
                let bj = b.col(j);
                let cj = c.col_mut(j);
                for (p, &bpj) in bj.iter().enumerate() {
                    if bpj != 0.0 {
                        axpy(alpha * bpj, a.col(p), cj);
                    }
                }
            }
        }
        (Trans::Yes, Trans::No) => {
            for j in 0..n {
                let bj = b.col(j);
                let cj = c.col_mut(j);
                for (i, cij) in cj.iter_mut().enumerate() {
                    *cij += alpha * dot(a.col(i), bj);
                }
            }
        }
        (Trans::No, Trans::Yes) => {
            for p in 0..k {
                let ap = a.col(p);
                let bp = b.col(p);
                for (j, &bjp) in bp.iter().enumerate() {
                    if bjp != 0.0 {
                        axpy(alpha * bjp, ap, c.col_mut(j));
                    }
                }
            }
        }
        (Trans::Yes, Trans::Yes) => {
            for j in 0..n {
                for i in 0..m {
                    let s: f64 = (0..k).map(|p| a.get(p, i) * b.get(j, p)).sum();
                    *c.at_mut(i, j) += alpha * s;
                }
            }
        }
    }
}

/// `y := alpha·op(a)·x + beta·y`.
pub fn gemv(
    alpha: f64,
    a: MatRef<'_>,
    ta: Trans,
    x: &[f64],
    beta: f64,
    y: &mut [f64],
    flops: Option<&FlopCounter>,
) {
    let (m, n) = (a.rows(), a.cols());
    match ta {
        Trans::No => assert!(x.len() == n && y.len() == m, "gemv shape"),
        Trans::Yes => assert!(x.len() == m && y.len() == n, "gemv shape"),
    }
    if beta != 1.0 {
        if beta == 0.0 {
            y.fill(0.0);
        } else {
            y.iter_mut().for_each(|v| *v *= beta);
        }
    }
    if m == 0 || n == 0 || alpha == 0.0 {
        return;
    }
    count(flops, 2 * m * n);
    match ta {
        Trans::No => {
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0.0 {
                    axpy(alpha * xj, a.col(j), y);
                }
            }
        }
        Trans::Yes => {
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += alpha * dot(a.col(j), x);
            }
        }
    }
}

/// Rank-one update `a := a + alpha·x·yᵀ`.
pub fn ger(alpha: f64, x: &[f64], y: &[f64], mut a: MatMut<'_>, flops: Option<&FlopCounter>) {
    assert!(x.len() == a.rows() && y.len() == a.cols(), "ger shape");
    if a.rows() == 0 || a.cols() == 0 || alpha == 0.0 {
        return;
    }
    count(flops, 2 * a.rows() * a.cols());
    for (j, &yj) in y.iter().enumerate() {
        if yj != 0.0 {
            axpy(alpha * yj, x, a.col_mut(j));
        }
    }
}

/// `b := t⁻ᵀ·b` for upper-triangular `t` (forward substitution with `tᵀ`).
pub fn trsm_upper_trans_left(t: MatRef<'_>, mut b: MatMut<'_>, flops: Option<&FlopCounter>) {
    let k = t.rows();
    assert!(t.cols() == k && b.rows() == k, "trsm shape");
    count(flops, k * k * b.cols());
    for j in 0..b.cols() {
        let bj = b.col_mut(j);
        for i in 0..k {
            let ti = t.col(i);
            let s = bj[i] - dot(&ti[..i], &bj[..i]);
            bj[i] = s / ti[i];
        }
    }
}

/// `b := t⁻¹·b` for upper-triangular `t` (back substitution).
pub fn trsm_upper_left(t: MatRef<'_>, mut b: MatMut<'_>, flops: Option<&FlopCounter>) {
    let k = t.rows();
    assert!(t.cols() == k && b.rows() == k, "trsm shape");
    count(flops, k * k * b.cols());
    for j in 0..b.cols() {
        let bj = b.col_mut(j);
        for i in (0..k).rev() {
            bj[i] /= t.get(i, i);
            let bi = bj[i];
            if bi != 0.0 {
                let ti = t.col(i);
                axpy(-bi, &ti[..i], &mut bj[..i]);
            }
        }
    }
}

/// `b := b·t⁻¹` for upper-triangular `t`.
pub fn trsm_upper_right(t: MatRef<'_>, mut b: MatMut<'_>, flops: Option<&FlopCounter>) {
    let k = t.rows();
    assert!(t.cols() == k && b.cols() == k, "trsm shape");
    count(flops, k * k * b.rows());
    for j in 0..k {
        let (done, mut rest) = b.rb_mut().split_at_col(j);
        let bj = rest.col_mut(0);
        for i in 0..j {
            let tij = t.get(i, j);
            if tij != 0.0 {
                axpy(-tij, done.col(i), bj);
            }
        }
        let d = t.get(j, j);
        bj.iter_mut().for_each(|x| *x /= d);
    }
}

/// `w := uᵀ·b` where `u` is `rows x k` unit lower trapezoidal: ones on the
/// diagonal, the stored strictly lower part below it, and the diagonal and
/// upper part of the storage ignored.
pub fn unit_lower_trans_mul(
    u: MatRef<'_>,
    b: MatRef<'_>,
    mut w: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    let (rows, k) = (u.rows(), u.cols());
    assert!(rows >= k && b.rows() == rows && w.rows() == k && w.cols() == b.cols());
    count(flops, k * (2 * rows - k - 1) * b.cols());
    for j in 0..b.cols() {
        let bj = b.col(j);
        let wj = w.col_mut(j);
        for (i, wij) in wj.iter_mut().enumerate() {
            *wij = bj[i] + dot(&u.col(i)[i + 1..], &bj[i + 1..]);
        }
    }
}

/// `b := b - u·w` with `u` unit lower trapezoidal as in
/// [`unit_lower_trans_mul`].
pub fn unit_lower_mul_sub(
    u: MatRef<'_>,
    w: MatRef<'_>,
    mut b: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    let (rows, k) = (u.rows(), u.cols());
    assert!(rows >= k && b.rows() == rows && w.rows() == k && w.cols() == b.cols());
    count(flops, k * (2 * rows - k - 1) * b.cols());
    for j in 0..b.cols() {
        let wj = w.col(j);
        let bj = b.col_mut(j);
        for (i, &wij) in wj.iter().enumerate() {
            if wij != 0.0 {
                bj[i] -= wij;
                axpy(-wij, &u.col(i)[i + 1..], &mut bj[i + 1..]);
            }
        }
    }
}

/// `x := g·u` with `u` unit lower trapezoidal (`g` has `u.rows()` columns).
pub fn mul_unit_lower(
    g: MatRef<'_>,
    u: MatRef<'_>,
    mut x: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    let (rows, k) = (u.rows(), u.cols());
    assert!(rows >= k && g.cols() == rows && x.rows() == g.rows() && x.cols() == k);
    count(flops, k * (2 * rows - k - 1) * g.rows());
    for i in 0..k {
        let xi = x.col_mut(i);
        xi.copy_from_slice(g.col(i));
        let ui = u.col(i);
        for (r, &uri) in ui.iter().enumerate().skip(i + 1) {
            if uri != 0.0 {
                axpy(uri, g.col(r), xi);
            }
        }
    }
}

/// `g := g - x·uᵀ` with `u` unit lower trapezoidal (`g` has `u.rows()`
/// columns, `x` has `u.cols()`).
pub fn sub_mul_unit_lower_trans(
    x: MatRef<'_>,
    u: MatRef<'_>,
    mut g: MatMut<'_>,
    flops: Option<&FlopCounter>,
) {
    let (rows, k) = (u.rows(), u.cols());
    assert!(rows >= k && g.cols() == rows && x.rows() == g.rows() && x.cols() == k);
    count(flops, k * (2 * rows - k - 1) * g.rows());
    for c in 0..rows {
        let gc = g.col_mut(c);
        if c < k {
            axpy(-1.0, x.col(c), gc);
        }
        for i in 0..c.min(k) {
            let uci = u.get(c, i);
            if uci != 0.0 {
                axpy(-uci, x.col(i), gc);
            }
        }
    }
}

/// Applies the reflector `I - (1/τ)·[1; u_tail]·[1; u_tail]ᵀ` from the left
/// to every column of `b`.
pub fn reflect_left(u_tail: &[f64], tau: f64, mut b: MatMut<'_>, flops: Option<&FlopCounter>) {
    assert_eq!(b.rows(), u_tail.len() + 1, "reflector length");
    count(flops, 4 * u_tail.len() * b.cols());
    for j in 0..b.cols() {
        let bj = b.col_mut(j);
        let (head, tail) = bj.split_at_mut(1);
        let w = (head[0] + dot(u_tail, tail)) / tau;
        if w != 0.0 {
            head[0] -= w;
            axpy(-w, u_tail, tail);
        }
    }
}
