//! Seeded random sources. Every randomized routine takes an explicit seed so
//! that runs are reproducible; independent jobs get their own ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numkernel::{CMatrix, C64};

/// Name of the generator recorded in reports.
pub const GENERATOR: &str = "ChaCha8";

/// Generator for job `stream` under `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Entries with real and imaginary parts i.i.d. uniform on [-1, 1].
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    })
}

/// Entries uniform on the complex unit square [0, 1] x [0, 1].
pub fn unit_square_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen::<f64>(), rng.gen::<f64>())
    })
}

pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// A random matrix that is comfortably invertible (diagonally shifted).
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    random_matrix(rng, n, n) + CMatrix::identity(n, n) * C64::new(n as f64, 0.0)
}
