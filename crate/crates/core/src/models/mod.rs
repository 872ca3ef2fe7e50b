//! Concrete ergodic systems in their GNS form.
//!
//! Both models are commutative with `M′ = M`, so the reference vector `Ω` is
//! standard and the support of the state is central without further work.
//!
//! * [`CyclicRotationSystem`]: rotation on `ℤ_m`, almost periodic and ergodic.
//! * [`BernoulliShiftSystem`]: the Bernoulli shift on `ℤ_q^ℤ` in its
//!   character (cylinder-word) basis, weakly mixing.

mod bernoulli;
mod cyclic;

pub use bernoulli::{
    combined_width, BernoulliShiftSystem, Coefficient, CylinderOperator, CylinderVector, CylinderWord, ExactComplex,
};
pub use cyclic::CyclicRotationSystem;

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{Phase, SpectralUnitary};

/// A unitarily implemented dynamical system `(H, M, U, Ω)` with `UΩ = Ω`.
pub trait DynamicalSystem {
    type Vector: Clone;
    type Operator: Clone;

    /// The invariant reference vector `Ω`.
    fn omega(&self) -> Self::Vector;
    fn zero_vector(&self) -> Self::Vector;
    fn identity_operator(&self) -> Self::Operator;

    /// `Uⁿ v`.
    fn evolve(&self, v: &Self::Vector, n: i64) -> Self::Vector;
    fn act(&self, op: &Self::Operator, v: &Self::Vector) -> Self::Vector;
    fn adjoint(&self, op: &Self::Operator) -> Self::Operator;

    /// `⟨a, b⟩`, linear in `a`.
    fn inner(&self, a: &Self::Vector, b: &Self::Vector) -> Complex64;
    /// `acc += c · v`
    fn axpy(&self, acc: &mut Self::Vector, c: Complex64, v: &Self::Vector);

    fn point_spectrum(&self) -> Vec<Phase>;

    /// `Σ_{z^d = 1} E_z v`, the projection onto the invariant vectors of `U^d`.
    fn power_invariant_part(&self, d: u64, v: &Self::Vector) -> Self::Vector;

    /// `V(x ⊗ y)` for the limit map attached to `Ad_{U^m1} ⊗ Ad_{U^m2}`:
    /// it sends `V_zΩ ⊗ W_wΩ` to `V_z W_w Ω` whenever `z^m1 w^m2 = 1` and
    /// vanishes on the rest.
    fn diagonal_limit_map(&self, m1: u64, m2: u64, x: &Self::Vector, y: &Self::Vector) -> Self::Vector;

    /// The spectral resolution, when the model is finite-dimensional.
    fn spectral_unitary(&self) -> Option<&SpectralUnitary>;

    fn scale(&self, v: &Self::Vector, c: Complex64) -> Self::Vector {
        let mut out = self.zero_vector();
        self.axpy(&mut out, c, v);
        out
    }

    fn norm(&self, v: &Self::Vector) -> f64 {
        self.inner(v, v).re.max(0.0).sqrt()
    }

    fn distance(&self, a: &Self::Vector, b: &Self::Vector) -> f64 {
        let mut d = a.clone();
        self.axpy(&mut d, Complex64::new(-1.0, 0.0), b);
        self.norm(&d)
    }

    /// `ω(A) = ⟨AΩ, Ω⟩`.
    fn state(&self, op: &Self::Operator) -> Complex64 {
        let omega = self.omega();
        self.inner(&self.act(op, &omega), &omega)
    }
}

/// A finite sum `Σ_j A_j ⊗ B_j` in the algebraic tensor product `M ⊗ M′`.
pub type TensorOperator<O> = [(O, O)];

/// `(1/N) Σ_{n<N} ψ(γⁿ(B))` for `γ = Ad_{U^m1} ⊗ Ad_{U^m2}` and the diagonal
/// state `ψ(A ⊗ B) = ⟨ABΩ, Ω⟩`, which expands to
/// `(1/N) Σ_j Σ_n ⟨A_j U^{n(m2−m1)} B_j Ω, Ω⟩`.
///
/// The diagonal state is generic for the product state when this converges
/// to [`product_state`] for every `B`.
pub fn generic_state_average<S: DynamicalSystem>(
    sys: &S,
    tensor: &TensorOperator<S::Operator>,
    m1: u64,
    m2: u64,
    n: u64,
) -> Complex64 {
    assert!(n >= 1 && m1 < m2, "need N >= 1 and m1 < m2");
    let d = (m2 - m1) as i64;
    let omega = sys.omega();
    let mut total = Complex64::new(0.0, 0.0);
    for (a, b) in tensor {
        let a_star_omega = sys.act(&sys.adjoint(a), &omega);
        let mut v = sys.act(b, &omega);
        for _ in 0..n {
            total += sys.inner(&v, &a_star_omega);
            v = sys.evolve(&v, d);
        }
    }
    total / n as f64
}

/// `φ(Σ A_j ⊗ B_j) = Σ ⟨A_jΩ, Ω⟩⟨B_jΩ, Ω⟩`.
pub fn product_state<S: DynamicalSystem>(sys: &S, tensor: &TensorOperator<S::Operator>) -> Complex64 {
    tensor.iter().map(|(a, b)| sys.state(a) * sys.state(b)).sum()
}

/// `ψ(Σ A_j ⊗ B_j) = Σ ⟨A_j B_j Ω, Ω⟩`.
pub fn diagonal_state<S: DynamicalSystem>(sys: &S, tensor: &TensorOperator<S::Operator>) -> Complex64 {
    let omega = sys.omega();
    tensor.iter().map(|(a, b)| sys.inner(&sys.act(a, &sys.act(b, &omega)), &omega)).sum()
}

/// Builds either model from its configuration parameters.
pub enum Model {
    Cyclic(CyclicRotationSystem),
    Bernoulli(BernoulliShiftSystem),
}

impl Model {
    pub fn cyclic(m: usize) -> Result<Self> {
        Ok(Model::Cyclic(CyclicRotationSystem::new(m)?))
    }

    pub fn bernoulli(q: u32) -> Result<Self> {
        Ok(Model::Bernoulli(BernoulliShiftSystem::new(q)?))
    }
}
