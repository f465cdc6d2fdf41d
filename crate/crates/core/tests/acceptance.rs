//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line before asserting.
//!
//! Run with `cargo test -p hqrrp --test acceptance -- --nocapture
//! --test-threads 1` to see the lines in order.

use hqrrp::householder::{apply_block_qt, hqr_unb_form_t, Reflector};
use hqrrp::matcore::kernels::trsm_upper_left;
use hqrrp::matcore::{frobenius_norm, gaussian_matrix, Direction};
use hqrrp::pivoting::{compute_weights, hqrp_unb_var1};
use hqrrp::randqr::{hqrrp_blk_observed, PanelState};
use hqrrp::testmats::{
    gen_bie_single_layer, gen_fast_decay, gen_kahan, gen_s_shape, jacobi_svd_values,
    truncation_errors, Curve, QualityReport,
};
use hqrrp::{
    hqr_blk, hqr_unb, hqrp_blk, hqrp_unb, hqrrp_blk, FlopCounter, GaussianRng, Matrix, QrFactors,
    SketchMode,
};

const EPS: f64 = f64::EPSILON;

fn report(n: u32, ok: bool, detail: String) {
    println!(
        "criterion {n}: {} {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn fro(a: &Matrix) -> f64 {
    frobenius_norm(a.as_ref())
}

fn rand(m: usize, n: usize, seed: u64) -> Matrix {
    gaussian_matrix(&mut GaussianRng::seed_from_u64(seed), m, n)
}

#[derive(Clone, Copy, Debug)]
enum Algo {
    Hqr,
    HqrBlk(usize),
    HqrpUnb,
    HqrpBlk(usize),
    HqrrpBasic(usize, usize),
    Hqrrp(usize, usize),
}

impl Algo {
    fn run(self, a: &Matrix, seed: u64) -> QrFactors {
        let mut rng = GaussianRng::seed_from_u64(seed);
        let a = a.clone();
        match self {
            Algo::Hqr => hqr_unb(a, None),
            Algo::HqrBlk(b) => hqr_blk(a, b, None),
            Algo::HqrpUnb => hqrp_unb(a, None),
            Algo::HqrpBlk(b) => hqrp_blk(a, b, None),
            Algo::HqrrpBasic(b, p) => hqrrp_blk(a, b, p, SketchMode::Basic, &mut rng, None),
            Algo::Hqrrp(b, p) => hqrrp_blk(a, b, p, SketchMode::Downdate, &mut rng, None),
        }
        .unwrap()
    }
}

#[test]
fn criterion_1_factorization_validity() {
    let algos = [
        Algo::Hqr,
        Algo::HqrBlk(8),
        Algo::HqrBlk(32),
        Algo::HqrpUnb,
        Algo::HqrpBlk(32),
        Algo::HqrrpBasic(32, 5),
        Algo::Hqrrp(8, 0),
        Algo::Hqrrp(8, 5),
        Algo::Hqrrp(32, 0),
        Algo::Hqrrp(32, 5),
    ];
    let shapes = [(64, 64), (200, 120), (120, 200), (257, 130)];
    let mut worst_recon: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut failures = Vec::new();
    for (si, &(m, n)) in shapes.iter().enumerate() {
        let scale = 50.0 * m.max(n) as f64 * EPS;
        for seed in 0..20u64 {
            let a = rand(m, n, 1000 * si as u64 + seed);
            let norm = fro(&a);
            for algo in algos {
                let f = algo.run(&a, seed);
                let (recon, orth) = f.residuals(&a).unwrap();
                let (r, o) = (recon / (scale * norm), orth / scale);
                worst_recon = worst_recon.max(r);
                worst_orth = worst_orth.max(o);
                if r > 1.0 || o > 1.0 {
                    failures.push(format!("{algo:?} {m}x{n} seed {seed}"));
                }
            }
        }
    }
    let ok = failures.is_empty();
    report(
        1,
        ok,
        format!(
            "(worst recon {worst_recon:.3} and orth {worst_orth:.3} of the 50*max(m,n)*eps budget)"
        ),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn criterion_2_ut_transform_identity() {
    let mut worst: f64 = 0.0;
    for b in [1, 2, 3, 8] {
        let m = 12;
        let mut a = rand(m, b, 20 + b as u64);
        let mut t = Matrix::zeros(b, b);
        hqr_unb_form_t(a.as_mut(), t.as_mut(), None).unwrap();
        let u = Matrix::from_fn(m, b, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => a[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        });
        // Explicit H(u_{b-1}) ··· H(u_0).
        let mut prod = Matrix::identity(m);
        for j in 0..b {
            let mut full = Matrix::identity(m);
            let h = Reflector {
                rho: 0.0,
                u_tail: u.col(j)[j + 1..].to_vec(),
                tau: t[(j, j)],
            }
            .to_matrix();
            for r in 0..m - j {
                for c in 0..m - j {
                    full[(j + r, j + c)] = h[(r, c)];
                }
            }
            prod = full.matmul(&prod);
        }
        // I - U T⁻ᵀ Uᵀ, with T⁻ᵀUᵀ = (U T⁻¹)ᵀ formed by a triangular solve.
        let mut tinv = Matrix::identity(b);
        trsm_upper_left(t.as_ref(), tinv.as_mut(), None);
        let wy = u.matmul(&tinv.transpose()).matmul(&u.transpose());
        let compact = Matrix::identity(m).sub(&wy);
        worst = worst.max(fro(&prod.sub(&compact)));
    }
    let ok = worst <= 1e-13;
    report(
        2,
        ok,
        format!("(max ‖explicit − compact‖_F = {worst:.2e}, tol 1e-13)"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_oracle_equivalences() {
    let mut worst_hqr: f64 = 0.0;
    let mut worst_hqrp: f64 = 0.0;
    let mut trails_equal = true;
    let cases = [
        (128, 128, 16),
        (100, 60, 8),
        (60, 100, 32),
        (97, 97, 5),
        (128, 128, 1),
    ];
    for (i, &(m, n, b)) in cases.iter().enumerate() {
        let a = rand(m, n, 300 + i as u64);
        let norm = fro(&a);
        let blk = hqr_blk(a.clone(), b, None).unwrap();
        let unb = hqr_unb(a.clone(), None).unwrap();
        worst_hqr = worst_hqr.max(fro(&blk.packed.sub(&unb.packed)) / norm);

        let blk = hqrp_blk(a.clone(), b, None).unwrap();
        let unb = hqrp_unb(a.clone(), None).unwrap();
        trails_equal &= blk.trail == unb.trail;
        worst_hqrp = worst_hqrp.max(fro(&blk.packed.sub(&unb.packed)) / norm);
    }
    let ok = worst_hqr <= 1e-12 && worst_hqrp <= 1e-12 && trails_equal;
    report(
        3,
        ok,
        format!(
            "(hqr blk/unb {worst_hqr:.2e}, hqrp blk/unb {worst_hqrp:.2e}, identical trails: {trails_equal})"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_weight_downdating() {
    let mut worst: f64 = 0.0;
    for (seed, m) in [(40u64, 200usize), (41, 200), (42, 260)] {
        let n = 200;
        let mut a = rand(m, n, seed);
        let mut weights = compute_weights(a.as_ref());
        let mut swaps = Vec::new();
        for k in 0..n.min(m) {
            let mut t = Matrix::zeros(1, 1);
            let (_, cols) = a.as_mut().split_at_col(k);
            hqrp_unb_var1(cols, k, t.as_mut(), &mut swaps, weights.tail(k), 1, None).unwrap();
            for j in k + 1..n {
                let col = &a.col(j)[k + 1..];
                let exact: f64 = col.iter().map(|x| x * x).sum();
                if exact > 0.0 {
                    worst = worst.max((weights.v[j] - exact).abs() / exact);
                }
            }
        }
    }
    let ok = worst <= 1e-8;
    report(
        4,
        ok,
        format!("(max relative weight error {worst:.2e}, tol 1e-8)"),
    );
    assert!(ok);
}

/// `‖Y₂ − G̃₂·A₂₂‖_F` with `G̃₂` and `A₂₂` rebuilt from the original `G`,
/// the original `A`, and the reflectors finished so far.
fn sketch_gap(state: &PanelState<'_>, a0: &Matrix, g0: &Matrix) -> f64 {
    let (m, n) = a0.shape();
    let k = state.k;
    let mut ap = a0.clone();
    state.trail.apply_to(&mut ap, Direction::Forward).unwrap();
    let mut b = ap.submatrix(0, k, m, n - k);
    let mut gt = g0.transpose();
    let mut off = 0;
    for t in state.t_blocks {
        let kb = t.rows();
        let u = state.packed.as_ref().sub(off, off, m - off, kb);
        apply_block_qt(u, t.as_ref(), b.as_mut().rows_from(off), None).unwrap();
        apply_block_qt(u, t.as_ref(), gt.as_mut().rows_from(off), None).unwrap();
        off += kb;
    }
    assert_eq!(off, k);
    let a22 = b.submatrix(k, 0, m - k, n - k);
    let g2 = gt.transpose().submatrix(0, k, g0.rows(), m - k);
    let y2 = state.sketch.y.submatrix(0, k, g0.rows(), n - k);
    fro(&y2.sub(&g2.matmul(&a22)))
}

#[test]
fn criterion_5_sketch_downdating_identity() {
    let (n, b, p) = (256, 16, 5);
    let mut worst: f64 = 0.0;
    let mut heads = 0;
    for seed in 0..5u64 {
        let a = rand(n, n, 500 + seed);
        let norm = fro(&a);
        let mut g0: Option<Matrix> = None;
        let mut rng = GaussianRng::seed_from_u64(seed);
        hqrrp_blk_observed(a.clone(), b, p, SketchMode::Downdate, &mut rng, None, |s| {
            let g = g0.get_or_insert_with(|| s.sketch.g.clone());
            worst = worst.max(sketch_gap(s, &a, g) / ((b + p) as f64 * norm));
            heads += 1;
        })
        .unwrap();
    }
    let ok = worst <= 1e-10 && heads == 5 * 15;
    report(
        5,
        ok,
        format!(
            "(max ‖Y₂ − G̃₂A₂₂‖_F/((b+p)‖A‖_F) = {worst:.2e} over {heads} panel heads, tol 1e-10)"
        ),
    );
    assert!(ok);
}

fn quality(a: &Matrix, algo: Algo, ks: &[usize], seed: u64) -> QualityReport {
    truncation_errors(a, &algo.run(a, seed), ks, false, None).unwrap()
}

#[test]
fn criterion_6_quality_desk_scaled() {
    let (n, b, p) = (400, 50, 5);
    let ks: Vec<usize> = (1..=7).map(|i| 50 * i).collect();
    let mut rng = GaussianRng::seed_from_u64(2016);
    let mats = [
        ("fast-decay", gen_fast_decay(n, 1e-5, &mut rng).unwrap().0),
        ("s-shape", gen_s_shape(n, &mut rng).unwrap().0),
        ("bie", gen_bie_single_layer(n, Curve::Star).unwrap()),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a) in &mats {
        let cp = quality(a, Algo::HqrpBlk(b), &ks, 0);
        let rp = quality(a, Algo::Hqrrp(b, p), &ks, 7);
        let worst = cp
            .e_frob
            .iter()
            .zip(&rp.e_frob)
            .map(|(c, r)| r / c)
            .fold(0.0, f64::max);
        ok &= worst <= 2.0;
        parts.push(format!("{name} max ratio {worst:.3}"));
    }

    let kn = 128;
    let zeta = 0.1f64.powf(1.0 / kn as f64);
    let kahan = gen_kahan(kn, zeta).unwrap();
    let kks: Vec<usize> = (1..kn / 8).map(|i| 8 * i).collect();
    let cp = quality(&kahan, Algo::HqrpBlk(16), &kks, 0);
    let rp = quality(&kahan, Algo::Hqrrp(16, 5), &kks, 7);
    let good = cp
        .e_frob
        .iter()
        .zip(&rp.e_frob)
        .filter(|(c, r)| **r <= 1.1 * **c)
        .count();
    let frac = good as f64 / kks.len() as f64;
    ok &= frac >= 0.9;
    parts.push(format!("kahan {good}/{} ranks within 1.1x", kks.len()));

    report(6, ok, format!("({})", parts.join("; ")));
    assert!(ok);
}

#[test]
fn criterion_7_eckart_young_floors() {
    let n = 256;
    let b = 32;
    let ks: Vec<usize> = (0..n / 32).map(|i| 32 * i).collect();
    let mut rng = GaussianRng::seed_from_u64(77);
    let (m1, s1) = gen_fast_decay(n, 1e-5, &mut rng).unwrap();
    let (m2, s2) = gen_s_shape(n, &mut rng).unwrap();
    let g = rand(128, 128, 78);
    let sg = jacobi_svd_values(&g).unwrap();
    let gks: Vec<usize> = (0..128 / 8).map(|i| 8 * i).collect();
    let algos = [
        Algo::Hqr,
        Algo::HqrBlk(b),
        Algo::HqrpBlk(b),
        Algo::HqrrpBasic(b, 5),
        Algo::Hqrrp(b, 5),
    ];
    let mut worst_spec = f64::INFINITY;
    let mut worst_frob = f64::INFINITY;
    for (a, sig, ks) in [(&m1, &s1, &ks), (&m2, &s2, &ks), (&g, &sg, &gks)] {
        for algo in algos {
            let rep = truncation_errors(a, &algo.run(a, 3), ks, true, Some(sig)).unwrap();
            let spec = rep.e_spec.as_ref().unwrap();
            let bs = rep.sv_bound_spec.as_ref().unwrap();
            let bf = rep.sv_bound_frob.as_ref().unwrap();
            for i in 0..ks.len() {
                if bs[i] > 0.0 {
                    worst_spec = worst_spec.min(spec[i] / bs[i]);
                }
                if bf[i] > 0.0 {
                    worst_frob = worst_frob.min(rep.e_frob[i] / bf[i]);
                }
            }
        }
    }
    let ok = worst_spec >= 1.0 - 1e-8 && worst_frob >= 1.0 - 1e-8;
    report(
        7,
        ok,
        format!("(min e_spec/σ_(k+1) = {worst_spec:.10}, min e_frob/floor = {worst_frob:.10}, need ≥ 1-1e-8)"),
    );
    assert!(ok);
}

#[test]
fn criterion_8_flop_count() {
    let n = 512;
    let a = rand(n, n, 800);
    let base = 4.0 / 3.0 * (n as f64).powi(3);

    let c = FlopCounter::new();
    hqr_blk(a.clone(), 32, Some(&c)).unwrap();
    let hqr_ratio = c.get() as f64 / base;

    let c = FlopCounter::new();
    let mut rng = GaussianRng::seed_from_u64(801);
    hqrrp_blk(a.clone(), 32, 5, SketchMode::Downdate, &mut rng, Some(&c)).unwrap();
    let rr_ratio = c.get() as f64 / base;

    let hqr_ok = (0.95..=1.10).contains(&hqr_ratio);
    let rr_ok = (1.0..=1.35).contains(&rr_ratio);
    report(
        8,
        hqr_ok && rr_ok,
        format!(
            "(hqr-blk {hqr_ratio:.4} in [0.95, 1.10]: {hqr_ok}; hqrrp {rr_ratio:.4} in [1.00, 1.35]: {rr_ok}; units of (4/3)n^3)"
        ),
    );
    assert!(hqr_ok, "hqr-blk ratio {hqr_ratio}");
    assert!(rr_ok, "hqrrp ratio {rr_ratio}");
}

/// Largest relative increase `(|r_ii| − |r_{i−1,i−1}|)/|r_{i−1,i−1}|` over
/// consecutive diagonal entries inside the given blocks.
fn worst_increase(f: &QrFactors, blockwise: bool) -> f64 {
    let d: Vec<f64> = f.r_diag().iter().map(|x| x.abs()).collect();
    let mut edges = if blockwise {
        f.block_offsets()
    } else {
        vec![0]
    };
    edges.push(d.len());
    let mut worst: f64 = 0.0;
    for w in edges.windows(2) {
        for i in w[0] + 1..w[1] {
            if d[i - 1] > 0.0 {
                worst = worst.max((d[i] - d[i - 1]) / d[i - 1]);
            }
        }
    }
    worst
}

/// Relative slack for the diagonal ordering checks: downdated weights may
/// misorder columns whose norms agree to within the downdating error.
const ORDER_SLACK: f64 = 1e-10;

#[test]
fn criterion_9_diagonal_ordering() {
    let n = 256;
    let mut rng = GaussianRng::seed_from_u64(900);
    let mats = [
        gen_fast_decay(n, 1e-5, &mut rng).unwrap().0,
        gen_s_shape(n, &mut rng).unwrap().0,
        gen_bie_single_layer(n, Curve::Star).unwrap(),
        gen_kahan(128, 0.1f64.powf(1.0 / 128.0)).unwrap(),
        gen_kahan(200, 0.99999).unwrap(),
        rand(200, 150, 901),
        rand(150, 200, 902),
    ];
    let mut worst_cp: f64 = 0.0;
    let mut worst_rr: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        for cp in [Algo::HqrpUnb, Algo::HqrpBlk(32)] {
            worst_cp = worst_cp.max(worst_increase(&cp.run(a, 0), false));
        }
        for rr in [
            Algo::Hqrrp(32, 5),
            Algo::HqrrpBasic(16, 5),
            Algo::Hqrrp(8, 0),
        ] {
            worst_rr = worst_rr.max(worst_increase(&rr.run(a, i as u64), true));
        }
    }
    let ok = worst_cp <= ORDER_SLACK && worst_rr <= ORDER_SLACK;
    report(
        9,
        ok,
        format!(
            "(max relative increase: classical global {worst_cp:.2e}, randomized within blocks {worst_rr:.2e}, slack {ORDER_SLACK:.0e})"
        ),
    );
    assert!(ok);
}
