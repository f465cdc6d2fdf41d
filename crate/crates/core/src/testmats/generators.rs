use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::householder::{form_q, hqr_blk};
use crate::matcore::{gaussian_matrix, GaussianRng, Matrix};

/// Haar-distributed orthogonal matrix: `Q` from the QR factorization of a
/// Gaussian matrix, with column signs fixed so that `R` has a positive
/// diagonal.
pub fn random_orthogonal(rng: &mut GaussianRng, n: usize) -> Matrix {
    let g = gaussian_matrix(rng, n, n);
    let f = hqr_blk(g, 32, None).expect("block size is positive");
    let mut q = form_q(&f, n).expect("Q is square");
    for (j, d) in f.r_diag().into_iter().enumerate() {
        if d < 0.0 {
            q.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    q
}

/// `U·diag(d)·Vᵀ` with `U`, `V` drawn (in that order) by
/// [`random_orthogonal`].
pub fn with_singular_values(rng: &mut GaussianRng, d: &[f64]) -> Matrix {
    let n = d.len();
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let mut ud = u;
    for (j, &s) in d.iter().enumerate() {
        ud.col_mut(j).iter_mut().for_each(|x| *x *= s);
    }
    ud.matmul(&v.transpose())
}

/// Singular values `β^(j/(n-1))`, `j = 0..n`, decaying from 1 to `β`.
pub fn fast_decay_profile(n: usize, beta: f64) -> Vec<f64> {
    (0..n)
        .map(|j| beta.powf(j as f64 / (n - 1) as f64))
        .collect()
}

/// Matrix with exponentially decaying singular values; returns the matrix
/// and its singular values.
pub fn gen_fast_decay(n: usize, beta: f64, rng: &mut GaussianRng) -> Result<(Matrix, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "fast-decay needs n >= 2, got {n}"
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must lie in (0, 1], got {beta}"
        )));
    }
    let d = fast_decay_profile(n, beta);
    Ok((with_singular_values(rng, &d), d))
}

pub const S_SHAPE_FLOOR: f64 = 1e-6;
const S_SHAPE_STEEPNESS: f64 = 40.0;

/// Logistic step `1/(1 + exp(40(j - n/2)/n))`, rescaled so the first value
/// is 1 and the last is `1e-6`.
pub fn s_shape_profile(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let raw: Vec<f64> = (0..n)
        .map(|j| 1.0 / (1.0 + (S_SHAPE_STEEPNESS * (j as f64 - nf / 2.0) / nf).exp()))
        .collect();
    let (hi, lo) = (raw[0], raw[n - 1]);
    raw.iter()
        .map(|&f| S_SHAPE_FLOOR + (1.0 - S_SHAPE_FLOOR) * (f - lo) / (hi - lo))
        .collect()
}

/// Singular values that stay near 1, drop sharply mid-spectrum, and level
/// out at `1e-6`.
pub fn gen_s_shape(n: usize, rng: &mut GaussianRng) -> Result<(Matrix, Vec<f64>)> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "s-shape needs n >= 4, got {n}"
        )));
    }
    let d = s_shape_profile(n);
    Ok((with_singular_values(rng, &d), d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Curve {
    /// `r(θ) = 0.8 + 0.2·cos 3θ`
    #[default]
    Star,
    Circle,
}

impl Curve {
    /// Point and speed `|x'(θ)|`.
    fn eval(self, theta: f64) -> ([f64; 2], f64) {
        let (r, dr) = match self {
            Curve::Star => (0.8 + 0.2 * (3.0 * theta).cos(), -0.6 * (3.0 * theta).sin()),
            Curve::Circle => (1.0, 0.0),
        };
        let (s, c) = theta.sin_cos();
        let x = [r * c, r * s];
        let dx = [dr * c - r * s, dr * s + r * c];
        (x, dx[0].hypot(dx[1]))
    }
}

/// Trapezoidal discretization of the 2-D single layer operator
/// `−(1/2π)·log|x − y|` on `n` equispaced parameter points of `curve`.
///
/// Off-diagonal entries are `−(1/2π)·log|x_i − x_j|·w_j` with `w_j` the
/// arc-length weight of node `j`; the singular diagonal is replaced by
/// `−(1/2π)·log(w_i/2π)·w_i`.
pub fn gen_bie_single_layer(n: usize, curve: Curve) -> Result<Matrix> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("BIE needs n >= 8, got {n}")));
    }
    let h = 2.0 * PI / n as f64;
    let nodes: Vec<([f64; 2], f64)> = (0..n)
        .map(|j| {
            let (x, speed) = curve.eval(j as f64 * h);
            (x, speed * h)
        })
        .collect();
    let c = -1.0 / (2.0 * PI);
    Ok(Matrix::from_fn(n, n, |i, j| {
        let (xi, wi) = nodes[i];
        if i == j {
            c * (wi / (2.0 * PI)).ln() * wi
        } else {
            let (xj, wj) = nodes[j];
            c * (xi[0] - xj[0]).hypot(xi[1] - xj[1]).ln() * wj
        }
    }))
}

/// Upper triangular `diag(ζ^i)·K` with `K` unit upper triangular and `−φ`
/// above the diagonal, `φ = sqrt(1 − ζ²)`.
pub fn gen_kahan(n: usize, zeta: f64) -> Result<Matrix> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "zeta must lie in (0, 1), got {zeta}"
        )));
    }
    let phi = (1.0 - zeta * zeta).sqrt();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let s = zeta.powi(i as i32);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => s,
            std::cmp::Ordering::Less => -s * phi,
            std::cmp::Ordering::Greater => 0.0,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::frobenius_norm;

    #[test]
    fn orthogonal_factor_is_orthogonal() {
        let q = random_orthogonal(&mut GaussianRng::seed_from_u64(1), 40);
        let e = q.t_matmul(&q).sub(&Matrix::identity(40));
        assert!(frobenius_norm(e.as_ref()) < 1e-13);
    }

    #[test]
    fn fast_decay_endpoints() {
        let d = fast_decay_profile(2, 1e-5);
        assert_eq!(d, vec![1.0, 1e-5]);
        let d = fast_decay_profile(50, 1e-5);
        assert_eq!(d[0], 1.0);
        assert!((d[49] - 1e-5).abs() < 1e-20);
        assert!(d.windows(2).all(|w| w[1] < w[0]));
        assert!(gen_fast_decay(1, 1e-5, &mut GaussianRng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn s_shape_profile_shape() {
        let d = s_shape_profile(100);
        assert_eq!(d[0], 1.0);
        assert!((d[99] - 1e-6).abs() < 1e-18);
        assert!(d.windows(2).all(|w| w[1] <= w[0]));
        assert!(d.iter().filter(|&&x| x > 0.5).count() >= 10);
        assert!(d.iter().filter(|&&x| x < 2e-6).count() >= 10);
        assert!(gen_s_shape(3, &mut GaussianRng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_fast_decay(20, 1e-5, &mut GaussianRng::seed_from_u64(9)).unwrap();
        let b = gen_fast_decay(20, 1e-5, &mut GaussianRng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            gen_bie_single_layer(16, Curve::Star).unwrap(),
            gen_bie_single_layer(16, Curve::Star).unwrap()
        );
    }

    #[test]
    fn bie_on_circle_is_symmetric() {
        let a = gen_bie_single_layer(64, Curve::Circle).unwrap();
        let asym = a.sub(&a.transpose());
        assert!(frobenius_norm(asym.as_ref()) <= 1e-12 * frobenius_norm(a.as_ref()));
        assert!(gen_bie_single_layer(7, Curve::Star).is_err());
    }

    #[test]
    fn kahan_entries() {
        let a = gen_kahan(2, 0.6).unwrap();
        assert_eq!(a[(0, 0)], 1.0);
        assert!((a[(0, 1)] + 0.8).abs() < 1e-15);
        assert_eq!(a[(1, 1)], 0.6);
        assert_eq!(a[(1, 0)], 0.0);
        let a = gen_kahan(16, 0.9).unwrap();
        for i in 1..16 {
            assert!(a[(i, i)] < a[(i - 1, i - 1)]);
        }
        assert!(gen_kahan(3, 1.0).is_err());
        assert!(gen_kahan(3, 0.0).is_err());
    }
}
