use std::f64::consts::{PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A collective polarization transformation `Omega = exp(-i alpha) S` with
/// `S = [[a, b], [-conj(b), conj(a)]]` in SU(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct U2Element {
    alpha: f64,
    a: Complex64,
    b: Complex64,
}

impl U2Element {
    /// Validates `|a|^2 + |b|^2 = 1` to `1e-12`.
    pub fn new(alpha: f64, a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "Cayley-Klein parameters must satisfy |a|^2 + |b|^2 = 1, got {norm}"
            )));
        }
        Ok(U2Element {
            alpha: alpha.rem_euclid(TAU),
            a,
            b,
        })
    }

    pub fn identity() -> Self {
        U2Element {
            alpha: 0.0,
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// `exp(i phi) * I`.
    pub fn global_phase(phi: f64) -> Self {
        let m = Matrix2::identity() * Complex64::from_polar(1.0, phi);
        Self::from_matrix(&m).expect("phase times identity is unitary")
    }

    /// Splits a unitary into phase and SU(2) part with
    /// `alpha = -arg(det Omega) / 2` taken in `[0, pi)`. The SU(2) part is
    /// then fixed up to the sign that this choice of branch absorbs.
    pub fn from_matrix(m: &Matrix2<Complex64>) -> Result<Self> {
        let err = (m.adjoint() * m - Matrix2::identity()).norm();
        if err > 1e-10 {
            return Err(Error::domain(format!(
                "matrix is not unitary (|M^dag M - I| = {err:e})"
            )));
        }
        let det = m.determinant();
        let alpha = (-det.arg() / 2.0).rem_euclid(PI);
        let s = m * Complex64::from_polar(1.0, alpha);
        let (a, b) = (s[(0, 0)], s[(0, 1)]);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        Ok(U2Element {
            alpha,
            a: a / norm,
            b: b / norm,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn su2_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.a, self.b, -self.b.conj(), self.a.conj())
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        self.su2_matrix() * Complex64::from_polar(1.0, -self.alpha)
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &U2Element) -> U2Element {
        Self::from_matrix(&(self.matrix() * other.matrix())).expect("product of unitaries")
    }
}

/// Counter-based Haar sampler on U(2).
///
/// Sample `i` is drawn from a ChaCha generator keyed by `(seed, stream, i)`,
/// so any sample can be regenerated on its own and parallel consumers see
/// the same sequence as serial ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HaarSampler {
    seed: u64,
    stream: u64,
}

impl HaarSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        HaarSampler { seed, stream }
    }

    pub(crate) fn rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        key[16..24].copy_from_slice(&index.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }

    /// Uniform phase times a Haar SU(2) element, the latter from a uniformly
    /// random point on the unit 3-sphere.
    pub fn sample(&self, index: u64) -> U2Element {
        let mut rng = Self::rng(self.seed, self.stream, index);
        let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = rng.random::<f64>() * TAU;
        U2Element {
            alpha,
            a: Complex64::new(x[0] / r, x[1] / r),
            b: Complex64::new(x[2] / r, x[3] / r),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = U2Element> + '_ {
        (0u64..).map(move |i| self.sample(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_hold_for_samples() {
        let s = HaarSampler::new(11, 0);
        for u in s.iter().take(200) {
            assert!((u.a.norm_sqr() + u.b.norm_sqr() - 1.0).abs() < 1e-12);
            let m = u.matrix();
            assert!((m.adjoint() * m - Matrix2::identity()).norm() < 1e-12);
            let det = m.determinant();
            assert!((det - Complex64::from_polar(1.0, -2.0 * u.alpha)).norm() < 1e-12);
            assert!((0.0..TAU).contains(&u.alpha));
        }
    }

    #[test]
    fn haar_moments() {
        let s = HaarSampler::new(2024, 0);
        let n = 100_000;
        let mut mean = Matrix2::<Complex64>::zeros();
        let mut a2 = 0.0;
        for u in s.iter().take(n) {
            mean += u.matrix();
            a2 += u.a.norm_sqr();
        }
        mean /= Complex64::from(n as f64);
        let tol = 5.0 / (n as f64).sqrt();
        for z in mean.iter() {
            assert!(z.re.abs() < tol && z.im.abs() < tol, "{mean}");
        }
        assert!((a2 / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampling_is_deterministic_and_random_access() {
        let s = HaarSampler::new(7, 3);
        let seq: Vec<_> = s.iter().take(20).collect();
        let again: Vec<_> = s.iter().take(20).collect();
        assert_eq!(seq, again);
        assert_eq!(s.sample(13), seq[13]);
        assert_ne!(HaarSampler::new(7, 4).sample(0), seq[0]);
    }

    #[test]
    fn split_round_trips() {
        for u in HaarSampler::new(5, 0).iter().take(50) {
            let v = U2Element::from_matrix(&u.matrix()).unwrap();
            assert!((v.matrix() - u.matrix()).norm() < 1e-12);
            assert!((0.0..PI).contains(&v.alpha));
        }
        let p = U2Element::global_phase(0.7);
        let expect = Matrix2::identity() * Complex64::from_polar(1.0, 0.7);
        assert!((p.matrix() - expect).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(U2Element::new(0.0, Complex64::new(1.0, 0.0), Complex64::new(0.1, 0.0)).is_err());
        let not_unitary = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        assert!(U2Element::from_matrix(&not_unitary).is_err());
    }
}
