#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use schatten_core::{CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `diag(R)` removed.
pub fn haar(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = gaussian(rng, d, d).into_nalgebra();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            let z = r[(i, i)];
            if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    CMatrix::from_nalgebra(q * phases)
}

pub fn family(rng: &mut impl Rng, len: usize, d: usize) -> Vec<CMatrix> {
    (0..len).map(|_| gaussian(rng, d, d)).collect()
}

/// Log-uniform on `[1e-2, 1e2]`.
pub fn weights(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect()
}

pub fn psd(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = gaussian(rng, d, d);
    &g * &g.adjoint()
}

/// `U·diag(σ)·V` with singular values in `[0, radius]`.
pub fn contraction(rng: &mut impl Rng, d: usize, radius: f64) -> CMatrix {
    let u = haar(rng, d);
    let v = haar(rng, d);
    let sigma: Vec<f64> = (0..d).map(|_| radius * rng.random::<f64>()).collect();
    &(&u * &CMatrix::diag(&sigma)) * &v
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
