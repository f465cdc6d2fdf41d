use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use hqrrp::matcore::{frobenius_norm, gaussian_matrix, io};
use hqrrp::testmats::{
    gen_bie_single_layer, gen_fast_decay, gen_kahan, gen_s_shape, jacobi_svd_values, k_grid,
    truncation_errors, Curve, JACOBI_MAX_DIM,
};
use hqrrp::{
    form_q, hqr_blk, hqr_unb, hqrp_blk, hqrrp_blk, FlopCounter, GaussianRng, Matrix, QrFactors,
    SketchMode,
};

use crate::output::{opt, read_sv_csv, write_csv};
use crate::{BenchArgs, FactorArgs, GenArgs, QualityArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    /// Unblocked Householder QR, no pivoting.
    Hqr,
    /// Blocked Householder QR, no pivoting.
    HqrBlk,
    /// Blocked classical column pivoting.
    Hqrp,
    /// Randomized pivoting with a fresh sketch per panel.
    HqrrpBasic,
    /// Randomized pivoting with a downdated sketch.
    Hqrrp,
}

impl Algo {
    fn label(self) -> &'static str {
        match self {
            Algo::Hqr => "hqr",
            Algo::HqrBlk => "hqr-blk",
            Algo::Hqrp => "hqrp",
            Algo::HqrrpBasic => "hqrrp-basic",
            Algo::Hqrrp => "hqrrp",
        }
    }

    fn run(
        self,
        a: Matrix,
        b: usize,
        p: usize,
        seed: u64,
        flops: Option<&FlopCounter>,
    ) -> Result<QrFactors> {
        let mut rng = GaussianRng::seed_from_u64(seed);
        let f = match self {
            Algo::Hqr => hqr_unb(a, flops),
            Algo::HqrBlk => hqr_blk(a, b, flops),
            Algo::Hqrp => hqrp_blk(a, b, flops),
            Algo::HqrrpBasic => hqrrp_blk(a, b, p, SketchMode::Basic, &mut rng, flops),
            Algo::Hqrrp => hqrrp_blk(a, b, p, SketchMode::Downdate, &mut rng, flops),
        };
        f.with_context(|| format!("{} failed", self.label()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    FastDecay,
    SShape,
    Bie,
    Kahan,
    Gaussian,
}

struct Generated {
    a: Matrix,
    sigmas: Option<Vec<f64>>,
}

fn generate(
    kind: Kind,
    n: usize,
    m: Option<usize>,
    seed: u64,
    zeta: f64,
    beta: f64,
) -> Result<Generated> {
    if let Some(m) = m {
        if m != n && kind != Kind::Gaussian {
            bail!("only gaussian matrices may be rectangular (got --m {m} --n {n})");
        }
    }
    let mut rng = GaussianRng::seed_from_u64(seed);
    let (a, sigmas) = match kind {
        Kind::FastDecay => {
            let (a, s) = gen_fast_decay(n, beta, &mut rng)?;
            (a, Some(s))
        }
        Kind::SShape => {
            let (a, s) = gen_s_shape(n, &mut rng)?;
            (a, Some(s))
        }
        Kind::Bie => (gen_bie_single_layer(n, Curve::Star)?, None),
        Kind::Kahan => (gen_kahan(n, zeta)?, None),
        Kind::Gaussian => (gaussian_matrix(&mut rng, m.unwrap_or(n), n), None),
    };
    Ok(Generated { a, sigmas })
}

pub fn gen(args: &GenArgs) -> Result<()> {
    let g = generate(args.kind, args.n, args.m, args.seed, args.zeta, args.beta)?;
    let mtx = format!("{}.mtx", args.output);
    io::save(&mtx, &g.a).with_context(|| format!("cannot write {mtx}"))?;
    let mut written = vec![mtx];
    if let Some(s) = &g.sigmas {
        let path = format!("{}.sv.csv", args.output);
        write_csv(
            &path,
            "j,sigma",
            s.iter().enumerate().map(|(j, v)| format!("{j},{v:e}")),
        )?;
        written.push(path);
    }
    println!("{}", written.join(","));
    Ok(())
}

pub fn factor(args: &FactorArgs) -> Result<()> {
    let a = io::load(&args.input).with_context(|| format!("cannot read {}", args.input))?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        bail!("{} is empty ({m}x{n})", args.input);
    }
    let b = args.b as usize;
    let counter = FlopCounter::new();
    let f = args
        .algo
        .run(a.clone(), b, args.p, args.seed, Some(&counter))?;
    let (recon, _) = f.residuals(&a)?;
    let relerr = recon / frobenius_norm(a.as_ref());

    let out = &args.output;
    io::save(format!("{out}.R.mtx"), &f.r())
        .with_context(|| format!("cannot write {out}.R.mtx"))?;
    // Unpivoted algorithms record no interchanges; write the identity.
    let swaps: Vec<usize> = if f.trail.is_empty() {
        (0..f.steps()).collect()
    } else {
        f.trail.swaps().to_vec()
    };
    write_csv(
        &format!("{out}.piv.csv"),
        "step,swap_index",
        swaps.iter().enumerate().map(|(i, s)| format!("{i},{s}")),
    )?;
    if let Some(k) = args.form_q {
        let q = form_q(&f, k)?;
        io::save(format!("{out}.Q.mtx"), &q)
            .with_context(|| format!("cannot write {out}.Q.mtx"))?;
    }
    println!(
        "{},{n},{m},{b},{},{},{relerr:e},{}",
        args.algo.label(),
        args.p,
        args.seed,
        counter.get()
    );
    Ok(())
}

pub fn quality(args: &QualityArgs) -> Result<()> {
    let (a, mut sigmas) = match (args.kind, &args.input) {
        (Some(kind), _) => {
            let n = args.n.context("--n is required with --kind")?;
            let g = generate(kind, n, None, args.seed, args.zeta, args.beta)?;
            (g.a, g.sigmas)
        }
        (None, Some(path)) => {
            let a = io::load(path).with_context(|| format!("cannot read {path}"))?;
            let s = args.sv.as_deref().map(read_sv_csv).transpose()?;
            (a, s)
        }
        (None, None) => bail!("either --kind or --input is required"),
    };
    let (m, n) = a.shape();
    if sigmas.is_none() {
        if m.min(n) <= JACOBI_MAX_DIM {
            sigmas = Some(jacobi_svd_values(&a)?);
        } else {
            eprintln!(
                "warning: singular values unavailable for a {m}x{n} matrix; bound columns left empty"
            );
        }
    }
    let b = args.b as usize;
    let mut qrows = Vec::new();
    let mut drows = Vec::new();
    for &algo in &args.algos {
        let f = algo.run(a.clone(), b, args.p, args.seed, None)?;
        let ks = k_grid(f.steps(), b);
        let rep = truncation_errors(&a, &f, &ks, !args.no_spectral, sigmas.as_deref())?;
        for (i, &k) in rep.ks.iter().enumerate() {
            qrows.push(format!(
                "{},{k},{:e},{},{},{}",
                algo.label(),
                rep.e_frob[i],
                opt(rep.e_spec.as_ref().map(|v| v[i])),
                opt(rep.sv_bound_frob.as_ref().map(|v| v[i])),
                opt(rep.sv_bound_spec.as_ref().map(|v| v[i])),
            ));
        }
        drows.extend(
            rep.r_diag
                .iter()
                .enumerate()
                .map(|(i, d)| format!("{},{i},{d:e}", algo.label())),
        );
    }
    let qpath = format!("{}.quality.csv", args.output);
    let dpath = format!("{}.rdiag.csv", args.output);
    write_csv(&qpath, "algo,k,e_frob,e_spec,bound_frob,bound_spec", qrows)?;
    write_csv(&dpath, "algo,i,abs_rii", drows)?;
    println!("{qpath},{dpath}");
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let b = args.b as usize;
    let mut rows = Vec::new();
    for &n in &args.ns {
        if n == 0 {
            bail!("matrix size must be positive");
        }
        let a = gaussian_matrix(&mut GaussianRng::seed_from_u64(args.seed), n, n);
        let standard = 4.0 / 3.0 * (n as f64).powi(3);
        for &algo in &args.algos {
            let counter = FlopCounter::new();
            let start = Instant::now();
            algo.run(a.clone(), b, args.p, args.seed, Some(&counter))?;
            let seconds = start.elapsed().as_secs_f64();
            rows.push(format!(
                "{},{n},{b},{},{seconds:.6},{:.4},{}",
                algo.label(),
                args.p,
                standard / seconds * 1e-9,
                counter.get()
            ));
        }
    }
    let path = format!("{}.bench.csv", args.output);
    write_csv(&path, "algo,n,b,p,seconds,std_gflops,counted_flops", rows)?;
    println!("{path}");
    Ok(())
}
