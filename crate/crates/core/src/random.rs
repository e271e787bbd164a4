//! Seeded random fixtures: Gaussian matrices, unitaries and maps with a
//! prescribed condition number.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lattice::{CoefField, Universe};
use crate::C64;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Circular complex Gaussian with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> DVector<C64> {
    DVector::from_fn(len, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary (QR of a Gaussian matrix with phase-corrected R).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    if dim == 0 {
        return DMatrix::zeros(0, 0);
    }
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Invertible map `Q₁ diag(s) Q₂*` with singular values drawn log-uniformly
/// from `[1, cond]`, the extremes pinned so that the condition number is
/// exactly `cond` when `dim ≥ 2`.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, dim: usize, cond: f64) -> DMatrix<C64> {
    assert!(cond >= 1.0, "condition number must be at least 1");
    let q1 = random_unitary(rng, dim);
    let q2 = random_unitary(rng, dim);
    let log_c = cond.ln();
    let s: Vec<f64> = (0..dim)
        .map(|k| match k {
            0 => 1.0,
            k if k + 1 == dim => cond,
            _ => (rng.random::<f64>() * log_c).exp(),
        })
        .collect();
    let mut scaled = q1;
    for (k, &sk) in s.iter().enumerate() {
        let mut col = scaled.column_mut(k);
        col *= C64::new(sk, 0.0);
    }
    scaled * q2.adjoint()
}

pub fn random_field<R: Rng + ?Sized>(rng: &mut R, u: &Universe) -> CoefField {
    let data = (0..u.dim()).map(|_| complex_gaussian(rng)).collect();
    CoefField::from_data(*u, data).expect("length matches universe")
}
