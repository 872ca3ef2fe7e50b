//! Seeded fixtures shared by the criterion benches.

use entangle_core::diagonal::TensorDynamics;
use entangle_core::entangled::EntangledInstance;
use entangle_core::models::{CylinderOperator, CylinderVector};
use entangle_core::partitions::PairPartition;
use entangle_core::random::{random_matrix, random_orthonormal_basis, seeded};
use entangle_core::{BernoulliShiftSystem, Complex64, CyclicRotationSystem, Phase, SpectralUnitary};

/// Dimension-6 unitary with golden-ratio phases and doubly degenerate blocks,
/// carrying random operators for the partition `word`.
pub fn golden_instance(word: &[usize], seed: u64) -> EntangledInstance {
    let mut rng = seeded(seed);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let phases = [Phase::ZERO, Phase::turns(g).unwrap(), Phase::turns((2.0 * g).fract()).unwrap()];
    let mut basis = random_orthonormal_basis(&mut rng, 6).into_iter();
    let pairs = phases.into_iter().map(|p| (p, basis.by_ref().take(2).collect())).collect();
    let u = SpectralUnitary::from_eigensystem(pairs).unwrap();
    let partition = PairPartition::from_word(word).unwrap();
    let ops = (0..(2 * partition.k()).saturating_sub(1)).map(|_| random_matrix(&mut rng, 6, 6)).collect();
    EntangledInstance::new(u, partition, ops).unwrap()
}

pub fn cyclic_dynamics(m: usize) -> TensorDynamics<CyclicRotationSystem> {
    TensorDynamics::standard(CyclicRotationSystem::new(m).unwrap())
}

/// A three-term cylinder operator and a vector with words spread over `spread` sites.
pub fn bernoulli_operands(
    q: u32,
    spread: i64,
) -> (BernoulliShiftSystem, CylinderOperator<Complex64>, CylinderVector<Complex64>) {
    let sys = BernoulliShiftSystem::new(q).unwrap();
    let op = sys.operator_from_terms(&[
        (0, 0, Complex64::new(0.5, 0.0)),
        (0, 1, Complex64::new(0.25, 0.5)),
        (1, q - 1, Complex64::new(-0.5, 0.0)),
    ]);
    let mut v = CylinderVector::omega();
    for s in 0..spread {
        v.add_term(sys.word(&[(s, 1), (s + 2, q - 1)]), Complex64::new(1.0 / (s + 1) as f64, 0.0));
    }
    (sys, op, v)
}
