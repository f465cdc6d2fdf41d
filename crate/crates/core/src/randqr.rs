//! Randomized blocked column-pivoted QR.
//!
//! Each panel's pivots are chosen all at once by running a pivoted
//! factorization on a small sample `Y = G·A₂₂`, with `G` a `(b+p) x m`
//! Gaussian matrix. In [`SketchMode::Downdate`] the sample is carried across
//! panels: after a panel with reflectors `Q₁` has been applied, the
//! effective sampling matrix becomes `G·Q₁`, and the new sample of the
//! trailing block follows from the old one as `Ȳ₂ − G̃₁·R₁₂`, where `Ȳ` is
//! the old sample with the panel's column interchanges applied and `G̃₁` the
//! leading columns of `G·Q₁`.

use crate::error::{Error, Result};
use crate::householder::{apply_block_qt, QrFactors};
use crate::matcore::kernels::{self, Trans};
use crate::matcore::{
    gaussian_matrix, Direction, FlopCounter, GaussianRng, MatRef, Matrix, PivotTrail,
};
use crate::pivoting::{compute_weights, hqrp_unb_var1, mgsp_steps};

pub const DEFAULT_OVERSAMPLING: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchMode {
    /// Draw a fresh `G` and form `Y = G·A₂₂` for every panel.
    Basic,
    /// Form `Y = G·A` once and downdate it after every panel.
    Downdate,
}

/// Sampling matrix `g` (`(b+p) x m`) and sample `y` (`(b+p) x n`).
///
/// Columns of `y` before `col_offset` belong to finished panels and are
/// stale; from `col_offset` on, `y = g·A₂₂` up to rounding, with the
/// columns of `g` before `col_offset` multiplying rows of `A` that are
/// already finished.
#[derive(Clone, Debug)]
pub struct Sketch {
    pub g: Matrix,
    pub y: Matrix,
    pub b: usize,
    pub p: usize,
    pub col_offset: usize,
}

impl Sketch {
    pub fn rows(&self) -> usize {
        self.b + self.p
    }
}

/// Draws `G` (column by column from `rng`) and forms `Y = G·A`.
pub fn build_sketch(
    rng: &mut GaussianRng,
    a: &Matrix,
    b: usize,
    p: usize,
    flops: Option<&FlopCounter>,
) -> Result<Sketch> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let (m, n) = a.shape();
    let g = gaussian_matrix(rng, b + p, m);
    let mut y = Matrix::zeros(b + p, n);
    kernels::gemm(
        1.0,
        g.as_ref(),
        Trans::No,
        a.as_ref(),
        Trans::No,
        0.0,
        y.as_mut(),
        flops,
    );
    Ok(Sketch {
        g,
        y,
        b,
        p,
        col_offset: 0,
    })
}

/// Pivots for the next `b` columns, chosen by `b` steps of MGS with column
/// pivoting on a copy of `y`. If `y` runs out of rank first, the remaining
/// steps keep their columns in place.
pub fn select_block_pivots(
    y: MatRef<'_>,
    b: usize,
    flops: Option<&FlopCounter>,
) -> Result<PivotTrail> {
    if b > y.cols() {
        return Err(Error::Dimension(format!(
            "cannot select {b} pivots from {} columns",
            y.cols()
        )));
    }
    let mut swaps = if y.rows() == 0 {
        Vec::new()
    } else {
        mgsp_steps(y.to_owned(), b, flops).trail.swaps().to_vec()
    };
    while swaps.len() < b {
        swaps.push(swaps.len());
    }
    PivotTrail::from_swaps(swaps)
}

/// Carries the sketch across one finished panel.
///
/// `u` holds the panel's reflectors (rows `col_offset..m` of the panel
/// columns, unit lower trapezoidal), `t` their triangular factor, `r12` the
/// panel rows of `R` right of the panel, and `trail` the interchanges this
/// iteration applied to columns `col_offset..n`.
pub fn downdate_sketch(
    sk: &mut Sketch,
    u: MatRef<'_>,
    t: MatRef<'_>,
    r12: MatRef<'_>,
    trail: &PivotTrail,
    flops: Option<&FlopCounter>,
) -> Result<()> {
    let k = sk.col_offset;
    let kb = u.cols();
    let (m, n) = (sk.g.cols(), sk.y.cols());
    if u.rows() + k != m || t.rows() != kb || t.cols() != kb {
        return Err(Error::Dimension(format!(
            "panel {}x{kb} with T {}x{} does not fit a sketch at offset {k} of width {m}",
            u.rows(),
            t.rows(),
            t.cols()
        )));
    }
    if k + kb > n || r12.rows() != kb || r12.cols() != n - k - kb {
        return Err(Error::Dimension(format!(
            "R12 is {}x{}, expected {kb}x{}",
            r12.rows(),
            r12.cols(),
            n.saturating_sub(k + kb)
        )));
    }
    if kb == 0 {
        return Ok(());
    }
    let l = sk.rows();
    let (_, y_rest) = sk.y.as_mut().split_at_col(k);
    trail.apply(y_rest, Direction::Forward)?;

    // X = G₍ₖ₎·U·T⁻¹, then G₍ₖ₎ := G₍ₖ₎·Q = G₍ₖ₎ − X·Uᵀ.
    let mut x = Matrix::zeros(l, kb);
    let g_k = sk.g.as_mut().split_at_col(k).1;
    kernels::mul_unit_lower(g_k.rb(), u, x.as_mut(), flops);
    kernels::trsm_upper_right(t, x.as_mut(), flops);
    kernels::sub_mul_unit_lower_trans(x.as_ref(), u, g_k, flops);

    let g1 = sk.g.as_ref().cols_range(k, kb);
    let y2 = sk.y.as_mut().split_at_col(k + kb).1;
    kernels::gemm(-1.0, g1, Trans::No, r12, Trans::No, 1.0, y2, flops);
    sk.col_offset = k + kb;
    Ok(())
}

/// State exposed to observers at the head of each panel that uses the
/// sketch, before its pivots are selected.
#[derive(Debug)]
pub struct PanelState<'a> {
    pub k: usize,
    pub packed: &'a Matrix,
    pub sketch: &'a Sketch,
    pub trail: &'a PivotTrail,
    pub t_blocks: &'a [Matrix],
    pub taus: &'a [f64],
}

/// Randomized blocked pivoted Householder QR.
pub fn hqrrp_blk(
    a: Matrix,
    b: usize,
    p: usize,
    mode: SketchMode,
    rng: &mut GaussianRng,
    flops: Option<&FlopCounter>,
) -> Result<QrFactors> {
    hqrrp_blk_observed(a, b, p, mode, rng, flops, |_| {})
}

/// [`hqrrp_blk`] with a callback at every panel head that consults the
/// sketch.
///
/// Each panel: choose `b` columns from the sketch, move them to the front,
/// factor them with local pivoting ([`hqrp_unb_var1`] on a copy), record the
/// combined interchanges, update the trailing matrix with the panel's block
/// reflector, and bring the sketch up to date. When no more than `b`
/// columns remain they are all selected and no sketch is consulted.
pub fn hqrrp_blk_observed(
    mut a: Matrix,
    b: usize,
    p: usize,
    mode: SketchMode,
    rng: &mut GaussianRng,
    flops: Option<&FlopCounter>,
    mut observe: impl FnMut(&PanelState<'_>),
) -> Result<QrFactors> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "block size must be at least 1".into(),
        ));
    }
    let (m, n) = a.shape();
    let steps = m.min(n);
    let needs_sketch = |k: usize| k < steps && n - k > b.min(steps - k);

    let mut sketch: Option<Sketch> = None;
    let mut trail = PivotTrail::new();
    let mut t_blocks = Vec::new();
    let mut taus = Vec::with_capacity(steps);
    let mut k = 0;
    while k < steps {
        let kb = b.min(steps - k);
        let nrem = n - k;

        let mut order: Vec<usize> = (0..nrem).collect();
        if needs_sketch(k) {
            let sk = match (mode, sketch.as_mut()) {
                (SketchMode::Downdate, Some(sk)) => sk,
                (SketchMode::Downdate, None) => sketch.insert(build_sketch(rng, &a, b, p, flops)?),
                (SketchMode::Basic, _) => {
                    let sk = sketch.get_or_insert_with(|| Sketch {
                        g: Matrix::zeros(b + p, m),
                        y: Matrix::zeros(b + p, n),
                        b,
                        p,
                        col_offset: 0,
                    });
                    resample(sk, rng, &a, k, flops);
                    sk
                }
            };
            observe(&PanelState {
                k,
                packed: &a,
                sketch: sk,
                trail: &trail,
                t_blocks: &t_blocks,
                taus: &taus,
            });
            let sel = select_block_pivots(sk.y.as_ref().cols_range(k, nrem), kb, flops)?;
            sel.apply_slice(&mut order)?;
        }

        // Factor the selected columns on a copy with panel-local pivoting.
        let mut panel = Matrix::zeros(m - k, kb);
        for (i, &c) in order[..kb].iter().enumerate() {
            panel.col_mut(i).copy_from_slice(&a.col(k + c)[k..]);
        }
        let mut t = Matrix::zeros(kb, kb);
        let mut local = Vec::with_capacity(kb);
        let mut weights = compute_weights(panel.as_ref());
        taus.extend(hqrp_unb_var1(
            panel.as_mut(),
            0,
            t.as_mut(),
            &mut local,
            weights.all(),
            kb,
            flops,
        )?);
        for (i, &s) in local.iter().enumerate() {
            order.swap(i, s);
        }
        let merged = PivotTrail::from_permutation_prefix(&order, kb);
        merged.apply(a.as_mut().split_at_col(k).1, Direction::Forward)?;
        trail.extend_offset(merged.swaps(), k);

        let (left, right) = a.as_mut().rows_from(k).split_at_col(k + kb);
        let rows = left.rows();
        let mut dst = left.sub_mut(0, k, rows, kb);
        dst.copy_from(panel.as_ref());
        apply_block_qt(dst.rb(), t.as_ref(), right, flops)?;

        if mode == SketchMode::Downdate && needs_sketch(k + kb) {
            if let Some(sk) = sketch.as_mut() {
                let u = a.as_ref().sub(k, k, m - k, kb);
                let r12 = a.as_ref().sub(k, k + kb, kb, n - k - kb);
                downdate_sketch(sk, u, t.as_ref(), r12, &merged, flops)?;
            }
        }
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

/// Basic mode: fresh `G` for the trailing rows and `Y = G·A₂₂`.
fn resample(
    sk: &mut Sketch,
    rng: &mut GaussianRng,
    a: &Matrix,
    k: usize,
    flops: Option<&FlopCounter>,
) {
    let (m, n) = a.shape();
    let l = sk.rows();
    let fresh = gaussian_matrix(rng, l, m - k);
    let mut g_k = sk.g.as_mut().split_at_col(k).1;
    g_k.copy_from(fresh.as_ref());
    let a22 = a.as_ref().sub(k, k, m - k, n - k);
    let y2 = sk.y.as_mut().split_at_col(k).1;
    kernels::gemm(1.0, g_k.rb(), Trans::No, a22, Trans::No, 0.0, y2, flops);
    sk.col_offset = k;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::householder::form_q;
    use crate::matcore::frobenius_norm;
    use crate::pivoting::hqrp_unb;

    fn rand(m: usize, n: usize, seed: u64) -> Matrix {
        gaussian_matrix(&mut GaussianRng::seed_from_u64(seed), m, n)
    }

    fn fro(a: &Matrix) -> f64 {
        frobenius_norm(a.as_ref())
    }

    #[test]
    fn sketch_of_zero_and_identity() {
        let mut rng = GaussianRng::seed_from_u64(3);
        let sk = build_sketch(&mut rng, &Matrix::zeros(6, 4), 2, 1, None).unwrap();
        assert_eq!(sk.y, Matrix::zeros(3, 4));
        assert_eq!(sk.rows(), 3);

        let mut rng = GaussianRng::seed_from_u64(3);
        let sk = build_sketch(&mut rng, &Matrix::identity(5), 2, 1, None).unwrap();
        assert_eq!(sk.y, sk.g);
        assert!(build_sketch(&mut rng, &Matrix::identity(2), 0, 1, None).is_err());
    }

    #[test]
    fn sketch_preserves_column_energy_on_average() {
        let a = rand(60, 400, 4);
        let mut rng = GaussianRng::seed_from_u64(5);
        let sk = build_sketch(&mut rng, &a, 32, 5, None).unwrap();
        let ratio: f64 = (0..400)
            .map(|j| {
                let y = sk.y.col(j);
                let x = a.col(j);
                kernels::dot(y, y) / (37.0 * kernels::dot(x, x))
            })
            .sum::<f64>()
            / 400.0;
        assert!((ratio - 1.0).abs() < 0.05, "mean ratio {ratio}");
    }

    #[test]
    fn selection_examples() {
        let mut y = rand(6, 5, 6);
        y.col_mut(3).iter_mut().for_each(|x| *x *= 10.0);
        let t = select_block_pivots(y.as_ref(), 1, None).unwrap();
        assert_eq!(t.swaps(), &[3]);

        let y = Matrix::diag(&[1.0, 2.0, 3.0]);
        let t = select_block_pivots(y.as_ref(), 3, None).unwrap();
        assert_eq!(t.to_permutation(3), vec![2, 1, 0]);
        assert!(select_block_pivots(y.as_ref(), 4, None).is_err());
    }

    #[test]
    fn selection_pads_after_rank_runs_out() {
        let y = Matrix::from_rows(&[&[0.0, 2.0, 0.0, 0.0]]);
        let t = select_block_pivots(y.as_ref(), 3, None).unwrap();
        assert_eq!(t.swaps(), &[1, 1, 2]);
    }

    fn sketch_gap(state: &PanelState<'_>, a0: &Matrix, g0: &Matrix) -> f64 {
        let (m, n) = a0.shape();
        let k = state.k;
        let partial = QrFactors {
            packed: state.packed.clone(),
            t_blocks: state.t_blocks.to_vec(),
            taus: state.taus.to_vec(),
            trail: state.trail.clone(),
        };
        let q = form_q(&partial, m).unwrap();
        let mut ap = a0.clone();
        state.trail.apply_to(&mut ap, Direction::Forward).unwrap();
        let a22 = q.t_matmul(&ap).submatrix(k, k, m - k, n - k);
        let g2 = g0.matmul(&q).submatrix(0, k, g0.rows(), m - k);
        let y2 = state.sketch.y.submatrix(0, k, g0.rows(), n - k);
        fro(&y2.sub(&g2.matmul(&a22)))
    }

    #[test]
    fn downdated_sketch_matches_fresh_product() {
        let a = rand(64, 64, 7);
        let norm = fro(&a);
        let mut g0 = None;
        let mut gaps = Vec::new();
        let mut rng = GaussianRng::seed_from_u64(8);
        hqrrp_blk_observed(a.clone(), 8, 4, SketchMode::Downdate, &mut rng, None, |s| {
            let g = g0.get_or_insert_with(|| s.sketch.g.clone());
            gaps.push((s.k, sketch_gap(s, &a, g)));
        })
        .unwrap();
        assert_eq!(
            gaps.iter().map(|g| g.0).collect::<Vec<_>>(),
            (0..7).map(|i| 8 * i).collect::<Vec<_>>()
        );
        for (k, gap) in gaps {
            assert!(gap <= 1e-11 * norm, "k={k}: {gap}");
        }
    }

    #[test]
    fn downdate_rejects_mismatched_panels() {
        let a = rand(6, 6, 9);
        let mut rng = GaussianRng::seed_from_u64(1);
        let mut sk = build_sketch(&mut rng, &a, 2, 1, None).unwrap();
        let u = Matrix::zeros(5, 2);
        let t = Matrix::identity(2);
        let r12 = Matrix::zeros(2, 4);
        let trail = PivotTrail::identity(2);
        assert!(
            downdate_sketch(&mut sk, u.as_ref(), t.as_ref(), r12.as_ref(), &trail, None).is_err()
        );
        let u = Matrix::zeros(6, 0);
        let t = Matrix::zeros(0, 0);
        let r12 = Matrix::zeros(0, 6);
        let before = sk.y.clone();
        downdate_sketch(
            &mut sk,
            u.as_ref(),
            t.as_ref(),
            r12.as_ref(),
            &PivotTrail::new(),
            None,
        )
        .unwrap();
        assert_eq!(sk.y, before);
    }

    #[test]
    fn single_panel_equals_classical() {
        let a = rand(20, 20, 10);
        let mut rng = GaussianRng::seed_from_u64(11);
        let r = hqrrp_blk(a.clone(), 32, 0, SketchMode::Downdate, &mut rng, None).unwrap();
        let c = hqrp_unb(a.clone(), None).unwrap();
        assert_eq!(r.trail, c.trail);
        assert_eq!(r.packed, c.packed);
    }

    #[test]
    fn both_modes_factor_validly_with_blockwise_ordering() {
        for (mode, seed) in [(SketchMode::Downdate, 12), (SketchMode::Basic, 13)] {
            for (m, n) in [(90, 70), (70, 90), (64, 64)] {
                let a = rand(m, n, seed);
                let mut rng = GaussianRng::seed_from_u64(seed);
                let f = hqrrp_blk(a.clone(), 8, 5, mode, &mut rng, None).unwrap();
                let (recon, orth) = f.residuals(&a).unwrap();
                let tol = 50.0 * m.max(n) as f64 * f64::EPSILON;
                assert!(recon <= tol * fro(&a) && orth <= tol, "{mode:?} {m}x{n}");
                let d = f.r_diag();
                let mut edges = f.block_offsets();
                edges.push(f.steps());
                for w in edges.windows(2) {
                    for i in w[0] + 1..w[1] {
                        assert!(d[i].abs() <= d[i - 1].abs() * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn same_seed_same_pivots() {
        let a = rand(50, 50, 14);
        let run = |seed| {
            let mut rng = GaussianRng::seed_from_u64(seed);
            hqrrp_blk(a.clone(), 8, 5, SketchMode::Downdate, &mut rng, None)
                .unwrap()
                .trail
        };
        assert_eq!(run(1), run(1));
    }

    #[test]
    fn rank_deficient_input_is_revealed() {
        let a = rand(60, 4, 15).matmul(&rand(4, 50, 16));
        let mut rng = GaussianRng::seed_from_u64(17);
        let f = hqrrp_blk(a.clone(), 8, 5, SketchMode::Downdate, &mut rng, None).unwrap();
        let r = f.r();
        assert!(fro(&r.submatrix(4, 4, 46, 46)) <= 1e-10 * fro(&a));
    }
}
