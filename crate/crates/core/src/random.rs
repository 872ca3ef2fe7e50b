//! Seeded random instances for tests, sweeps and the experiment runner.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::spectral::{Phase, SpectralUnitary};

pub type InstanceRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> ComplexVector {
    ComplexVector::new((0..dim).map(|_| gaussian(rng)).collect())
}

pub fn random_unit_vector(rng: &mut impl Rng, dim: usize) -> ComplexVector {
    random_vector(rng, dim).normalized()
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Orthonormal basis of `ℂ^dim` from Gram-Schmidt on Gaussian vectors.
pub fn random_orthonormal_basis(rng: &mut impl Rng, dim: usize) -> Vec<ComplexVector> {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = random_vector(rng, dim);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c = v.inner(b);
                v.axpy(-c, b);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v.scale(Complex64::new(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Which phases [`random_spectral_unitary`] draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseDraw {
    /// Distinct float turns in `[0, 1)`.
    Float,
    /// Distinct exact fractions `p/den`.
    Rational { den: u64 },
}

/// A unitary on `ℂ^dim` with `count` distinct eigenphases and a random
/// eigenbasis split into nonempty blocks.
///
/// # Panics
/// If `count` is zero, exceeds `dim`, or exceeds `den` for rational draws.
pub fn random_spectral_unitary(rng: &mut impl Rng, dim: usize, count: usize, draw: PhaseDraw) -> SpectralUnitary {
    assert!(count >= 1 && count <= dim, "need 1 <= count <= dim");
    let mut phases: Vec<Phase> = Vec::with_capacity(count);
    match draw {
        PhaseDraw::Float => {
            while phases.len() < count {
                let p = Phase::turns(rng.random::<f64>()).expect("finite turns");
                if phases.iter().all(|q| q.distance(&p) > 1e-3) {
                    phases.push(p);
                }
            }
        }
        PhaseDraw::Rational { den } => {
            assert!(count as u64 <= den, "not enough fractions with this denominator");
            let mut nums: Vec<u64> = (0..den).collect();
            for i in (1..nums.len()).rev() {
                nums.swap(i, rng.random_range(0..=i));
            }
            phases.extend(nums[..count].iter().map(|&p| Phase::rational(p as i64, den).expect("den >= 1")));
        }
    }
    // block sizes: one vector each, the rest scattered at random
    let mut sizes = vec![1usize; count];
    for _ in count..dim {
        sizes[rng.random_range(0..count)] += 1;
    }
    let mut basis = random_orthonormal_basis(rng, dim).into_iter();
    let pairs = phases.into_iter().zip(sizes).map(|(p, s)| (p, basis.by_ref().take(s).collect())).collect();
    SpectralUnitary::from_eigensystem(pairs).expect("orthonormal blocks with distinct phases")
}

/// A uniformly random pair-partition word of `2k` positions (not canonical).
pub fn random_pair_word(rng: &mut impl Rng, k: usize) -> Vec<usize> {
    let mut word: Vec<usize> = (1..=k).flat_map(|j| [j, j]).collect();
    for i in (1..word.len()).rev() {
        let j = rng.random_range(0..=i);
        word.swap(i, j);
    }
    word
}
