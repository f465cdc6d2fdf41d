//! Classical column pivoting.
//!
//! Column weights are squared 2-norms. After a row `r` of `R` is produced,
//! every remaining weight is downdated as `ν_j − r_j²` instead of being
//! recomputed; when a downdated weight has lost too much relative to the
//! last exactly computed value it is recomputed from the column itself.

use crate::error::{Error, Result};
use crate::householder::{apply_reflector_left, housev_in_place, QrFactors};
use crate::matcore::kernels::{self, dot, norm2, Trans};
use crate::matcore::{FlopCounter, MatMut, MatRef, Matrix, PivotTrail};

/// Relative threshold below which a downdated weight is recomputed.
pub const TOL_SAFE: f64 = 1e-8;

/// Squared column norms together with the value each one had when it was
/// last computed exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    pub v: Vec<f64>,
    pub v_orig: Vec<f64>,
}

/// Mutable window onto the trailing entries of a [`WeightVector`].
#[derive(Debug)]
pub struct Weights<'a> {
    v: &'a mut [f64],
    v_orig: &'a mut [f64],
}

/// `v[j] = ‖a(:, j)‖₂²`.
pub fn compute_weights(a: MatRef<'_>) -> WeightVector {
    let v: Vec<f64> = (0..a.cols()).map(|j| squared_norm(a.col(j))).collect();
    WeightVector {
        v_orig: v.clone(),
        v,
    }
}

fn squared_norm(x: &[f64]) -> f64 {
    let n = norm2(x);
    n * n
}

/// Index of the largest entry of `v` at or after `offset`; ties go to the
/// smallest index.
pub fn determine_pivot(v: &[f64], offset: usize) -> usize {
    let mut best = offset;
    for (j, &x) in v.iter().enumerate().skip(offset + 1) {
        if x > v[best] {
            best = j;
        }
    }
    best
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn tail(&mut self, from: usize) -> Weights<'_> {
        Weights {
            v: &mut self.v[from..],
            v_orig: &mut self.v_orig[from..],
        }
    }

    pub fn all(&mut self) -> Weights<'_> {
        self.tail(0)
    }

    /// Plain downdate `v[offset + j] -= r_row[j]²`, clamped at zero.
    pub fn downdate(&mut self, offset: usize, r_row: &[f64]) {
        self.tail(offset)
            .downdate_with(r_row, None::<fn(usize) -> f64>);
    }
}

impl Weights<'_> {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        self.v
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.v.swap(i, j);
        self.v_orig.swap(i, j);
    }

    pub fn pivot(&self, offset: usize) -> usize {
        determine_pivot(self.v, offset)
    }

    /// Downdates entries `offset..offset + r_row.len()` and, when `exact` is
    /// given, recomputes any entry that fell below `TOL_SAFE` times its
    /// reference value. `exact` receives the index relative to this window.
    fn downdate_with<F: FnMut(usize) -> f64>(&mut self, r_row: &[f64], mut exact: Option<F>) {
        self.downdate_at(0, r_row, exact.as_mut());
    }

    fn downdate_at<F: FnMut(usize) -> f64>(
        &mut self,
        offset: usize,
        r_row: &[f64],
        mut exact: Option<&mut F>,
    ) {
        for (c, &r) in r_row.iter().enumerate() {
            let j = offset + c;
            let nv = (self.v[j] - r * r).max(0.0);
            self.v[j] = nv;
            if let Some(f) = exact.as_deref_mut() {
                if nv < TOL_SAFE * self.v_orig[j] {
                    let fresh = f(j);
                    self.v[j] = fresh;
                    self.v_orig[j] = fresh;
                }
            }
        }
    }

    /// Downdate with the recomputation safeguard.
    pub fn downdate_safe(
        &mut self,
        offset: usize,
        r_row: &[f64],
        mut exact: impl FnMut(usize) -> f64,
    ) {
        self.downdate_at(offset, r_row, Some(&mut exact));
    }
}

/// Result of MGS with column pivoting: `A·P = Q·R` with `Q` `m x rank`
/// orthonormal and `R` `rank x n` upper trapezoidal.
#[derive(Clone, Debug)]
pub struct Mgsp {
    pub q: Matrix,
    pub r: Matrix,
    pub trail: PivotTrail,
    pub rank: usize,
}

/// Modified Gram–Schmidt with column pivoting.
///
/// Stops early once the largest remaining weight drops to
/// `m·eps·max_j ‖a_j‖²`; the rank is then the number of completed steps.
pub fn mgsp(a: &Matrix) -> Result<Mgsp> {
    if a.rows() == 0 {
        return Err(Error::InvalidArgument("mgsp needs at least one row".into()));
    }
    Ok(mgsp_steps(a.clone(), a.rows().min(a.cols()), None))
}

/// Runs at most `max_steps` MGSP steps on `a` (overwritten by `Q`).
pub(crate) fn mgsp_steps(mut a: Matrix, max_steps: usize, flops: Option<&FlopCounter>) -> Mgsp {
    let (m, n) = a.shape();
    let max_steps = max_steps.min(m).min(n);
    let mut w = compute_weights(a.as_ref());
    let floor = m as f64 * f64::EPSILON * w.v.iter().cloned().fold(0.0, f64::max);
    let mut r = Matrix::zeros(max_steps, n);
    let mut trail = PivotTrail::new();
    let mut rank = 0;
    for i in 0..max_steps {
        let p = determine_pivot(&w.v, i);
        if w.v[p] <= floor {
            break;
        }
        a.swap_cols(i, p);
        r.swap_cols(i, p);
        w.all().swap(i, p);
        trail.push(p);

        let (mut left, mut right) = a.as_mut().split_at_col(i + 1);
        let q = left.col_mut(i);
        let rho = norm2(q);
        if rho == 0.0 {
            break;
        }
        q.iter_mut().for_each(|x| *x /= rho);
        r[(i, i)] = rho;
        let q: &[f64] = q;

        let mut r12 = vec![0.0; n - i - 1];
        kernels::gemv(1.0, right.rb(), Trans::Yes, q, 0.0, &mut r12, flops);
        kernels::ger(-1.0, q, &r12, right.rb_mut(), flops);
        for (c, &x) in r12.iter().enumerate() {
            r[(i, i + 1 + c)] = x;
        }
        let right = right.rb();
        w.tail(i + 1)
            .downdate_safe(0, &r12, |c| squared_norm(right.col(c)));
        rank = i + 1;
    }
    // Columns beyond the rank are not orthonormal directions; drop them.
    let q = a.submatrix(0, 0, m, rank);
    let r = r.submatrix(0, 0, rank, n);
    Mgsp { q, r, trail, rank }
}

/// HQRP, unblocked variant 1: pivot, reflect, and fully update the trailing
/// columns at every step.
///
/// `a` spans every row of the working columns; factorization rows start at
/// `row0`, and rows above it only take part in the column swaps. Swaps are
/// appended to `trail` relative to `a`'s first column. `weights` must cover
/// `a`'s columns and reflect the current trailing norms.
pub fn hqrp_unb_var1(
    mut a: MatMut<'_>,
    row0: usize,
    mut t: MatMut<'_>,
    trail: &mut Vec<usize>,
    mut weights: Weights<'_>,
    steps: usize,
    flops: Option<&FlopCounter>,
) -> Result<Vec<f64>> {
    check_steps(&a, row0, &t, &weights, steps)?;
    let mut taus = Vec::with_capacity(steps);
    for j in 0..steps {
        let rj = row0 + j;
        let p = weights.pivot(j);
        a.swap_cols(j, p);
        weights.swap(j, p);
        trail.push(p);

        let (mut left, mut right) = a.rb_mut().split_at_col(j + 1);
        let tau = {
            let col = left.col_mut(j);
            let (head, tail) = col[rj..].split_at_mut(1);
            housev_in_place(&mut head[0], tail)
        };
        taus.push(tau);
        let left = left.rb();
        let u21 = &left.col(j)[rj + 1..];
        let nrows = right.rows();
        let ncols = right.cols();
        apply_reflector_left(
            u21,
            tau,
            right.rb_mut().sub_mut(rj, 0, nrows - rj, ncols),
            flops,
        );

        let below = left.sub(rj + 1, 0, nrows - rj - 1, j);
        let mut t01: Vec<f64> = (0..j).map(|i| left.get(rj, i)).collect();
        kernels::gemv(1.0, below, Trans::Yes, u21, 1.0, &mut t01, flops);
        write_t_column(&mut t, j, &t01, tau);

        let right = right.rb();
        let r_row: Vec<f64> = (0..right.cols()).map(|c| right.get(rj, c)).collect();
        weights.downdate_safe(j + 1, &r_row, |c| {
            squared_norm(&right.col(c - j - 1)[rj + 1..])
        });
    }
    Ok(taus)
}

fn check_steps(
    a: &MatMut<'_>,
    row0: usize,
    t: &MatMut<'_>,
    weights: &Weights<'_>,
    steps: usize,
) -> Result<()> {
    if row0 > a.rows() || steps > (a.rows() - row0).min(a.cols()) {
        return Err(Error::Dimension(format!(
            "{steps} steps do not fit a {}x{} block starting at row {row0}",
            a.rows(),
            a.cols()
        )));
    }
    if t.rows() != steps || t.cols() != steps {
        return Err(Error::Dimension(format!(
            "T is {}x{} for {steps} steps",
            t.rows(),
            t.cols()
        )));
    }
    if weights.len() != a.cols() {
        return Err(Error::Dimension(format!(
            "{} weights for {} columns",
            weights.len(),
            a.cols()
        )));
    }
    Ok(())
}

fn write_t_column(t: &mut MatMut<'_>, j: usize, t01: &[f64], tau: f64) {
    for (i, &v) in t01.iter().enumerate() {
        t.set(i, j, v);
    }
    t.set(j, j, tau);
    for i in j + 1..t.rows() {
        t.set(i, j, 0.0);
    }
}

/// HQRP, unblocked variant 3 (delayed update).
///
/// Completes `r` rows and columns of the factorization while leaving the
/// trailing block `A₂₂` at its original contents `Â₂₂`. Rows of `W` are
/// accumulated so that the updated trailing block is `Â₂₂ − U₂₁·W₂`, with
/// `W = T⁻ᵀ Uᵀ Â`; the caller performs that rank-`r` update once. Only
/// columns to the right of each step are kept in `W`.
///
/// Layout conventions are the same as [`hqrp_unb_var1`]; `w` must be at
/// least `r x a.cols()`.
#[allow(clippy::too_many_arguments)]
pub fn hqrp_panel_var3(
    mut a: MatMut<'_>,
    row0: usize,
    mut t: MatMut<'_>,
    trail: &mut Vec<usize>,
    mut weights: Weights<'_>,
    mut w: MatMut<'_>,
    r: usize,
    flops: Option<&FlopCounter>,
) -> Result<Vec<f64>> {
    check_steps(&a, row0, &t, &weights, r)?;
    if w.rows() < r || w.cols() != a.cols() {
        return Err(Error::Dimension(format!(
            "W is {}x{}, need at least {r}x{}",
            w.rows(),
            w.cols(),
            a.cols()
        )));
    }
    let nrows = a.rows();
    let mut taus = Vec::with_capacity(r);
    for j in 0..r {
        let rj = row0 + j;
        let p = weights.pivot(j);
        a.swap_cols(j, p);
        w.swap_cols(j, p);
        weights.swap(j, p);
        trail.push(p);

        let (mut left, mut right) = a.rb_mut().split_at_col(j + 1);
        let w_done = w.rb().sub(0, 0, j, w.cols());

        // Bring column j up to date: a(rj.., j) -= U(rj.., 0..j) · W(0..j, j).
        {
            let (prev, mut cur) = left.rb_mut().split_at_col(j);
            let u_prev = prev.rb().sub(rj, 0, nrows - rj, j);
            let wj: Vec<f64> = (0..j).map(|i| w_done.get(i, j)).collect();
            kernels::gemv(
                -1.0,
                u_prev,
                Trans::No,
                &wj,
                1.0,
                &mut cur.col_mut(0)[rj..],
                flops,
            );
        }
        let tau = {
            let col = left.col_mut(j);
            let (head, tail) = col[rj..].split_at_mut(1);
            housev_in_place(&mut head[0], tail)
        };
        taus.push(tau);
        let left = left.rb();
        let u21 = &left.col(j)[rj + 1..];
        let u10: Vec<f64> = (0..j).map(|i| left.get(rj, i)).collect();
        let u20 = left.sub(rj + 1, 0, nrows - rj - 1, j);
        let ncols = right.cols();
        let w_right = w_done.sub(0, j + 1, j, ncols);

        // Row j of Ã: â12ᵀ − u10ᵀ W02.
        let mut a12: Vec<f64> = (0..ncols).map(|c| right.get(rj, c)).collect();
        kernels::gemv(-1.0, w_right, Trans::Yes, &u10, 1.0, &mut a12, flops);

        // s = U20ᵀ u21 also gives the new column of T.
        let mut s = vec![0.0; j];
        kernels::gemv(1.0, u20, Trans::Yes, u21, 0.0, &mut s, flops);

        // w12ᵀ = (ã12ᵀ + u21ᵀ Â22 − sᵀ W02) / τ.
        let a22 = right.rb().sub(rj + 1, 0, nrows - rj - 1, ncols);
        let mut z = a12.clone();
        kernels::gemv(1.0, a22, Trans::Yes, u21, 1.0, &mut z, flops);
        kernels::gemv(-1.0, w_right, Trans::Yes, &s, 1.0, &mut z, flops);
        z.iter_mut().for_each(|x| *x /= tau);
        for (c, &zc) in z.iter().enumerate() {
            w.set(j, j + 1 + c, zc);
            let rv = a12[c] - zc;
            right.set(rj, c, rv);
            a12[c] = rv;
        }

        let t01: Vec<f64> = u10.iter().zip(&s).map(|(x, y)| x + y).collect();
        write_t_column(&mut t, j, &t01, tau);

        // Exact trailing norm of column c: ‖Â(rj+1.., c) − U(rj+1.., 0..=j)·W(0..=j, c)‖².
        let right = right.rb();
        let w_now = w.rb();
        let u_all = left.sub(rj + 1, 0, nrows - rj - 1, j + 1);
        weights.downdate_safe(j + 1, &a12, |c| {
            let col = c;
            let mut x = right.col(col - j - 1)[rj + 1..].to_vec();
            let wc: Vec<f64> = (0..=j).map(|i| w_now.get(i, col)).collect();
            kernels::gemv(-1.0, u_all, Trans::No, &wc, 1.0, &mut x, None);
            dot(&x, &x)
        });
    }
    Ok(taus)
}

/// Unblocked HQRP (variant 1) over the whole matrix.
pub fn hqrp_unb(mut a: Matrix, flops: Option<&FlopCounter>) -> Result<QrFactors> {
    let steps = a.rows().min(a.cols());
    let mut weights = compute_weights(a.as_ref());
    let mut t = Matrix::zeros(steps, steps);
    let mut swaps = Vec::with_capacity(steps);
    let taus = hqrp_unb_var1(
        a.as_mut(),
        0,
        t.as_mut(),
        &mut swaps,
        weights.all(),
        steps,
        flops,
    )?;
    Ok(QrFactors {
        packed: a,
        t_blocks: vec![t],
        taus,
        trail: PivotTrail::from_swaps(swaps)?,
    })
}

/// Blocked HQRP in the style of LAPACK's `geqp3`: each panel is produced by
/// [`hqrp_panel_var3`] over the whole remaining matrix, followed by a single
/// rank-`b` update `A₂₂ −= U₂₁·W₂`.
pub fn hqrp_blk(mut a: Matrix, b: usize, flops: Option<&FlopCounter>) -> Result<QrFactors> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let (m, n) = a.shape();
    let steps = m.min(n);
    let mut weights = compute_weights(a.as_ref());
    let mut trail = PivotTrail::new();
    let mut t_blocks = Vec::new();
    let mut taus = Vec::with_capacity(steps);
    let mut w = Matrix::zeros(b.min(steps.max(1)), n);
    let mut k = 0;
    while k < steps {
        let kb = b.min(steps - k);
        let mut t = Matrix::zeros(kb, kb);
        let mut swaps = Vec::with_capacity(kb);
        let (_, mut cols) = a.as_mut().split_at_col(k);
        let nk = cols.cols();
        let wbuf = w.as_mut().sub_mut(0, 0, kb, nk);
        taus.extend(hqrp_panel_var3(
            cols.rb_mut(),
            k,
            t.as_mut(),
            &mut swaps,
            weights.tail(k),
            wbuf,
            kb,
            flops,
        )?);
        trail.extend_offset(&swaps, k);

        // A22 -= U21 · W2
        let (panel, rest) = cols.split_at_col(kb);
        let u21 = panel.into_ref().sub(k + kb, 0, m - k - kb, kb);
        let w2 = w.as_ref().sub(0, kb, kb, nk - kb);
        let a22 = rest.rows_from(k + kb);
        kernels::gemm(-1.0, u21, Trans::No, w2, Trans::No, 1.0, a22, flops);

        t_blocks.push(t);
        k += kb;
    }
    Ok(QrFactors {
        packed: a,
        t_blocks,
        taus,
        trail,
    })
}
