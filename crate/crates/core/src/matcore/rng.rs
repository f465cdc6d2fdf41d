use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::matrix::Matrix;

/// Seeded source of standard normal variates.
///
/// Uniforms come from xoshiro256++ (seeded through SplitMix64 from a `u64`);
/// normals are produced in pairs by the Box–Muller transform. Both
/// algorithms are fixed so that a seed reproduces the same matrices across
/// runs.
#[derive(Clone, Debug)]
pub struct GaussianRng {
    inner: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianRng {
    pub fn seed_from_u64(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// `rows x cols` matrix of i.i.d. standard normal entries, filled in
/// column-major order.
pub fn gaussian_matrix(rng: &mut GaussianRng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    m.data_mut().iter_mut().for_each(|x| *x = rng.normal());
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_matrix() {
        let a = gaussian_matrix(&mut GaussianRng::seed_from_u64(11), 7, 5);
        let b = gaussian_matrix(&mut GaussianRng::seed_from_u64(11), 7, 5);
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn different_seeds_differ() {
        let a = gaussian_matrix(&mut GaussianRng::seed_from_u64(1), 4, 4);
        let b = gaussian_matrix(&mut GaussianRng::seed_from_u64(2), 4, 4);
        assert!(a.data().iter().zip(b.data()).any(|(x, y)| x != y));
    }

    #[test]
    fn sample_moments_at_fixed_seed() {
        let g = gaussian_matrix(&mut GaussianRng::seed_from_u64(2016), 1000, 1000);
        let n = g.data().len() as f64;
        let mean = g.data().iter().sum::<f64>() / n;
        let var = g
            .data()
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .sum::<f64>()
            / (n - 1.0);
        assert!(mean.abs() <= 0.01, "mean {mean}");
        assert!((0.99..=1.01).contains(&var), "variance {var}");
    }
}
