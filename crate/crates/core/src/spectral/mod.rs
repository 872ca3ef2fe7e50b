//! Unitaries given by their spectral resolution.
//!
//! A [`SpectralUnitary`] stores each eigenphase together with an orthonormal
//! basis of its eigenspace; powers, eigenprojections and Cesàro averages are
//! all evaluated from that resolution, never by numerical diagonalization.

mod lemmas;
mod phase;

pub use lemmas::{double_average_bound, double_average_defect, psd_average_bound_defect};
pub use phase::{cesaro_kernel, Phase, PHASE_TOLERANCE};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gram_deviation, projector_from_vectors, ComplexMatrix, ComplexVector, ORTHONORMAL_TOLERANCE};

#[derive(Clone, Debug)]
pub struct Eigenspace {
    phase: Phase,
    basis: Vec<ComplexVector>,
    projection: ComplexMatrix,
}

impl Eigenspace {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }

    /// The eigenprojection `E_z`.
    pub fn projection(&self) -> &ComplexMatrix {
        &self.projection
    }

    pub fn multiplicity(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralUnitary {
    dim: usize,
    spaces: Vec<Eigenspace>,
}

impl SpectralUnitary {
    /// Validates and assembles a unitary from `(phase, eigenbasis)` pairs.
    ///
    /// The bases must be jointly orthonormal and complete, and the phases
    /// pairwise distinct.
    pub fn from_eigensystem(pairs: Vec<(Phase, Vec<ComplexVector>)>) -> Result<Self> {
        let dim = pairs
            .iter()
            .flat_map(|(_, b)| b.first())
            .map(ComplexVector::dim)
            .next()
            .ok_or(Error::EmptyInput("eigensystem"))?;
        for (i, (z, basis)) in pairs.iter().enumerate() {
            if basis.is_empty() {
                return Err(Error::EmptyInput("eigenbasis"));
            }
            if pairs[..i].iter().any(|(w, _)| w.same(z)) {
                return Err(Error::DuplicatePhase(z.to_string()));
            }
        }
        let all: Vec<ComplexVector> = pairs.iter().flat_map(|(_, b)| b.iter().cloned()).collect();
        if let Some(v) = all.iter().find(|v| v.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: v.dim() });
        }
        let deviation = gram_deviation(&all);
        if deviation > ORTHONORMAL_TOLERANCE {
            return Err(Error::NonOrthonormalInput { deviation });
        }
        if all.len() != dim {
            return Err(Error::IncompleteBasis { expected: dim, found: all.len() });
        }
        let spaces = pairs
            .into_iter()
            .map(|(phase, basis)| {
                let projection = projector_from_vectors(dim, &basis)?;
                Ok(Eigenspace { phase, basis, projection })
            })
            .collect::<Result<Vec<_>>>()?;
        let u = Self { dim, spaces };
        debug_assert!(u.matrix().is_unitary());
        Ok(u)
    }

    /// The identity on `ℂ^dim`.
    pub fn identity(dim: usize) -> Self {
        let basis = (0..dim).map(|i| ComplexVector::basis(dim, i)).collect();
        Self::from_eigensystem(vec![(Phase::ZERO, basis)]).expect("standard basis is orthonormal")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenspaces(&self) -> &[Eigenspace] {
        &self.spaces
    }

    /// `σ_pp(U)` in construction order.
    pub fn point_spectrum(&self) -> Vec<Phase> {
        self.spaces.iter().map(|s| s.phase).collect()
    }

    pub fn index_of(&self, z: &Phase) -> Option<usize> {
        self.spaces.iter().position(|s| s.phase.same(z))
    }

    /// Dense matrix `Σ_z z E_z`.
    pub fn matrix(&self) -> ComplexMatrix {
        self.power_matrix(1)
    }

    /// Dense matrix `Uⁿ = Σ_z zⁿ E_z`.
    pub fn power_matrix(&self, n: i64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for s in &self.spaces {
            out.axpy(s.phase.pow(n).to_complex(), &s.projection);
        }
        out
    }

    /// `Uⁿ x = Σ_z zⁿ E_z x`.
    pub fn power_apply(&self, n: i64, x: &ComplexVector) -> Result<ComplexVector> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let mut out = ComplexVector::zeros(self.dim);
        for s in &self.spaces {
            out.axpy(s.phase.pow(n).to_complex(), &s.projection.apply(x));
        }
        Ok(out)
    }

    /// `E_z`, the zero matrix when `z` is not an eigenphase.
    pub fn eig_projection(&self, z: &Phase) -> ComplexMatrix {
        match self.index_of(z) {
            Some(i) => self.spaces[i].projection.clone(),
            None => ComplexMatrix::zeros(self.dim, self.dim),
        }
    }

    /// `E_1`, the projection onto the invariant vectors.
    pub fn mean_ergodic_projection(&self) -> ComplexMatrix {
        self.eig_projection(&Phase::ZERO)
    }

    /// `(1/N) Σ_{n<N} Uⁿ x` by summing powers one at a time.
    pub fn cesaro_average_direct(&self, x: &ComplexVector, n: u64) -> Result<ComplexVector> {
        let mut acc = ComplexVector::zeros(self.dim);
        for j in 0..n {
            acc.axpy(Complex64::new(1.0, 0.0), &self.power_apply(j as i64, x)?);
        }
        Ok(acc.scale(Complex64::new(1.0 / n as f64, 0.0)))
    }

    /// `Σ_z c_N(z) E_z x`, the closed form of the Cesàro average.
    pub fn cesaro_average_spectral(&self, x: &ComplexVector, n: u64) -> Result<ComplexVector> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.dim() });
        }
        let mut acc = ComplexVector::zeros(self.dim);
        for s in &self.spaces {
            acc.axpy(cesaro_kernel(&s.phase, n), &s.projection.apply(x));
        }
        Ok(acc)
    }

    /// `‖Σ_{z≠1} c_N(z) E_z x‖`, which equals `‖(1/N)Σ Uⁿx − E_1 x‖`.
    pub fn cesaro_remainder_norm(&self, x: &ComplexVector, n: u64) -> f64 {
        let mut acc = ComplexVector::zeros(self.dim);
        for s in self.spaces.iter().filter(|s| !s.phase.is_one()) {
            acc.axpy(cesaro_kernel(&s.phase, n), &s.projection.apply(x));
        }
        acc.norm()
    }

    /// `σ_pp^a(U) = {z ∈ σ_pp(U) : z̄ ∈ σ_pp(U)}`.
    pub fn asymmetric_point_spectrum(&self) -> Vec<Phase> {
        self.spaces.iter().map(|s| s.phase).filter(|z| self.index_of(&z.conj()).is_some()).collect()
    }

    /// Least common multiple of the eigenphase denominators, `None` if any
    /// phase is a float.
    pub fn common_denominator(&self) -> Option<u64> {
        self.spaces.iter().try_fold(1u64, |acc, s| {
            let d = s.phase.denominator()?;
            Some(acc / gcd(acc, d) * d)
        })
    }

    /// Smallest circle distance in turns between `1` and a nontrivial eigenphase.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.spaces.iter().filter(|s| !s.phase.is_one()).map(|s| s.phase.distance(&Phase::ZERO)).min_by(f64::total_cmp)
    }

    /// `U^a ⊗ V^b` on `ℂ^{dim·dim'}`, eigenvectors grouped by product phase.
    pub fn tensor_power(&self, a: i64, other: &SpectralUnitary, b: i64) -> SpectralUnitary {
        let mut groups: Vec<(Phase, Vec<ComplexVector>)> = Vec::new();
        for s in &self.spaces {
            for t in &other.spaces {
                let phase = s.phase.pow(a).add(&t.phase.pow(b));
                let vectors = s.basis.iter().flat_map(|x| t.basis.iter().map(move |y| x.kron(y)));
                match groups.iter_mut().find(|(z, _)| z.same(&phase)) {
                    Some((_, basis)) => basis.extend(vectors),
                    None => groups.push((phase, vectors.collect())),
                }
            }
        }
        Self::from_eigensystem(groups).expect("tensor products of orthonormal bases are orthonormal")
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
