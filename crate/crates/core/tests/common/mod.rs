#![allow(dead_code)]

use mptk::matcore::{ComplexMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    gaussian(rng, n, n).hermitian_part()
}

pub fn with_norm(m: &ComplexMatrix, fro: f64) -> ComplexMatrix {
    m.scale(fro / m.frobenius_norm())
}

pub fn real_sym(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows)
}
