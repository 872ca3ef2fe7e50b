//! Entangled Cesàro means
//!
//! ```text
//! avg_N = (1/N^k) Σ_{n_1..n_k < N} U^{n_α(1)} A_1 U^{n_α(2)} ⋯ A_{2k−1} U^{n_α(2k)}
//! ```
//!
//! for a pair-partition `α`, evaluated two independent ways: literally in the
//! time domain, and through the spectral expansion `Uⁿ = Σ zⁿ E_z`, where the
//! class sums collapse to Cesàro kernels `c_N(ζ ζ')`. The strong limit is
//!
//! ```text
//! S_α = Σ_{z_1..z_k ∈ σ_pp^a(U)} E_{z#_α(1)} A_1 E_{z#_α(2)} ⋯ A_{2k−1} E_{z#_α(2k)}
//! ```
//!
//! with `z#` alternating between `z_j` and `z̄_j` along each class.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::partitions::PairPartition;
use crate::report::ConvergenceReport;
use crate::spectral::{cesaro_kernel, Phase, SpectralUnitary};

/// Cap on `N^k` for the time-domain evaluation.
pub const TIME_DOMAIN_BUDGET: u128 = 10_000_000;
/// Cap on eigenphase tuples for the spectral evaluations.
pub const TUPLE_BUDGET: u128 = 10_000_000;
/// Largest `k` accepted by the time-domain evaluation.
pub const MAX_TIME_DOMAIN_K: usize = 3;
/// Residual accepted for an eigenvector in [`EntangledInstance::zaz_reduction_check`].
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug)]
pub struct EntangledInstance {
    u: SpectralUnitary,
    partition: PairPartition,
    ops: Vec<ComplexMatrix>,
}

impl EntangledInstance {
    /// `ops` must hold `2k − 1` square matrices of the unitary's dimension
    /// (none for the empty partition).
    pub fn new(u: SpectralUnitary, partition: PairPartition, ops: Vec<ComplexMatrix>) -> Result<Self> {
        let expected = (2 * partition.k()).saturating_sub(1);
        if ops.len() != expected {
            return Err(Error::OperatorCount { expected, found: ops.len() });
        }
        for a in &ops {
            if a.rows() != u.dim() || a.cols() != u.dim() {
                return Err(Error::DimensionMismatch { expected: u.dim(), found: a.rows().max(a.cols()) });
            }
        }
        Ok(Self { u, partition, ops })
    }

    pub fn unitary(&self) -> &SpectralUnitary {
        &self.u
    }

    pub fn partition(&self) -> &PairPartition {
        &self.partition
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// The literal multi-index average with powers `U⁰..U^{N−1}` cached.
    pub fn average_time_domain(&self, n: u64) -> Result<ComplexMatrix> {
        assert!(n >= 1, "N must be positive");
        let k = self.partition.k();
        let dim = self.dim();
        if k == 0 {
            return Ok(ComplexMatrix::identity(dim));
        }
        let work = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if k > MAX_TIME_DOMAIN_K || work > TIME_DOMAIN_BUDGET {
            return Err(Error::BudgetExceeded { work, limit: TIME_DOMAIN_BUDGET });
        }
        let dense = self.u.matrix();
        let mut powers = Vec::with_capacity(n as usize);
        powers.push(ComplexMatrix::identity(dim));
        for j in 1..n as usize {
            powers.push(&dense * &powers[j - 1]);
        }
        let word = self.partition.word();
        let n = n as usize;

        // One chunk per value of n_1, summed in index order.
        let chunks: Vec<ComplexMatrix> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut acc = ComplexMatrix::zeros(dim, dim);
                let mut index = vec![0usize; k];
                index[0] = first;
                loop {
                    let mut prod = powers[index[word[0] - 1]].clone();
                    for (op, &class) in self.ops.iter().zip(&word[1..]) {
                        prod = &(&prod * op) * &powers[index[class - 1]];
                    }
                    acc.axpy(ONE, &prod);
                    // odometer over n_2..n_k
                    let mut slot = k - 1;
                    loop {
                        if slot == 0 {
                            return acc;
                        }
                        index[slot] += 1;
                        if index[slot] < n {
                            break;
                        }
                        index[slot] = 0;
                        slot -= 1;
                    }
                }
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for c in &chunks {
            total.axpy(ONE, c);
        }
        Ok(total.scale(Complex64::new(1.0 / (n as f64).powi(k as i32), 0.0)))
    }

    /// The same average through the spectral expansion: a sum over eigenphase
    /// tuples `(ζ_1..ζ_2k)` weighted by `Π_j c_N(ζ_p(j) ζ_p'(j))`.
    pub fn average_spectral(&self, n: u64) -> Result<ComplexMatrix> {
        assert!(n >= 1, "N must be positive");
        let phases = self.u.point_spectrum();
        let table: Vec<Vec<Complex64>> =
            phases.iter().map(|a| phases.iter().map(|b| cesaro_kernel(&a.add(b), n)).collect()).collect();
        self.walk_pair_weights(&table)
    }

    /// Sums `Π_j w[ζ_first(j)][ζ_second(j)] · E_ζ1 A_1 ⋯ A_{2k−1} E_ζ2k` over all
    /// tuples, pruning zero weights and exactly vanishing prefixes.
    fn walk_pair_weights(&self, table: &[Vec<Complex64>]) -> Result<ComplexMatrix> {
        let dim = self.dim();
        let positions = self.partition.len();
        if positions == 0 {
            return Ok(ComplexMatrix::identity(dim));
        }
        let r = self.u.eigenspaces().len();
        let work = (r as u128).checked_pow(positions as u32).unwrap_or(u128::MAX);
        if work > TUPLE_BUDGET {
            return Err(Error::BudgetExceeded { work, limit: TUPLE_BUDGET });
        }
        let mut partner = vec![None; positions];
        for (a, b) in self.partition.class_positions() {
            partner[b] = Some(a);
        }
        let walker = Walker { inst: self, table, partner };
        let chunks: Vec<ComplexMatrix> = (0..r)
            .into_par_iter()
            .map(|e| {
                let mut acc = ComplexMatrix::zeros(dim, dim);
                let mut choice = vec![0usize; positions];
                choice[0] = e;
                let prefix = self.u.eigenspaces()[e].projection().clone();
                walker.descend(1, &mut choice, &prefix, ONE, &mut acc);
                acc
            })
            .collect();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for c in &chunks {
            total.axpy(ONE, c);
        }
        Ok(total)
    }

    /// `S_α`, summed over `σ_pp^a(U)^k` with the alternating conjugation rule.
    pub fn entangled_limit(&self) -> Result<ComplexMatrix> {
        let dim = self.dim();
        let k = self.partition.k();
        if k == 0 {
            return Ok(ComplexMatrix::identity(dim));
        }
        let symmetric = self.u.asymmetric_point_spectrum();
        let work = (symmetric.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if work > TUPLE_BUDGET {
            return Err(Error::BudgetExceeded { work, limit: TUPLE_BUDGET });
        }
        let signs = self.partition.sign_assignment();
        let mut total = ComplexMatrix::zeros(dim, dim);
        if symmetric.is_empty() {
            return Ok(total);
        }
        let mut pick = vec![0usize; k];
        loop {
            let z: Vec<Phase> = pick.iter().map(|&i| symmetric[i]).collect();
            let projection = |pos: usize| {
                let (class, conjugate) = signs[pos];
                let phase = if conjugate { z[class - 1].conj() } else { z[class - 1] };
                self.u.eig_projection(&phase)
            };
            let mut prod = projection(0);
            for (i, op) in self.ops.iter().enumerate() {
                prod = &(&prod * op) * &projection(i + 1);
            }
            total.axpy(ONE, &prod);

            let mut slot = k;
            loop {
                if slot == 0 {
                    return Ok(total);
                }
                slot -= 1;
                pick[slot] += 1;
                if pick[slot] < symmetric.len() {
                    break;
                }
                pick[slot] = 0;
            }
        }
    }

    /// `‖S_β x − R x‖` for an eigenvector `x` of phase `z0`, where `R` is the
    /// reduced form obtained by deleting the class that holds the last
    /// position: the partner slot is pinned to `E_{z̄0}` and fused into its
    /// neighbouring operators, and `A_{2k+1}` acts on `x` directly.
    pub fn zaz_reduction_check(&self, x: &ComplexVector, z0: &Phase) -> Result<f64> {
        let dim = self.dim();
        if x.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: x.dim() });
        }
        let residual = self.u.power_apply(1, x)?.distance(&x.scale(z0.to_complex()));
        if residual > EIGENVECTOR_TOLERANCE * x.norm().max(1.0) {
            return Err(Error::NotAnEigenvector { residual });
        }
        let reduction = self.partition.reduce_at_last()?;
        let lhs = self.entangled_limit()?.apply(x);

        // ops are A_1..A_{2k+1}; slot f (1-based) sits between A_{f−1} and A_f
        let f = reduction.k_beta;
        let last_op = self.ops.len();
        let pinned = self.u.eig_projection(&z0.conj());
        let trailing = self.ops.last().cloned().unwrap_or_else(|| ComplexMatrix::identity(dim));

        let (prefix, reduced_ops, trailing) = if f == 1 {
            // E_{z̄0} A_1 stands to the left of the reduced limit
            let prefix = match self.ops.first() {
                Some(a1) if last_op > 1 => &pinned * a1,
                _ => pinned.clone(),
            };
            let inner = if last_op > 1 { self.ops[1..last_op - 1].to_vec() } else { Vec::new() };
            (Some(prefix), inner, trailing)
        } else if f == last_op {
            // adjacent to the last slot: A_{2k} E_{z̄0} A_{2k+1} acts on x
            let fused = &(&self.ops[f - 2] * &pinned) * &trailing;
            (None, self.ops[..f - 2].to_vec(), fused)
        } else {
            let mut inner: Vec<ComplexMatrix> = self.ops[..f - 2].to_vec();
            inner.push(&(&self.ops[f - 2] * &pinned) * &self.ops[f - 1]);
            inner.extend_from_slice(&self.ops[f..last_op - 1]);
            (None, inner, trailing)
        };
        let reduced = EntangledInstance::new(self.u.clone(), reduction.alpha_beta, reduced_ops)?;
        let mut rhs = reduced.entangled_limit()?.apply(&trailing.apply(x));
        if let Some(p) = prefix {
            rhs = p.apply(&rhs);
        }
        Ok(lhs.distance(&rhs))
    }

    /// `max_x ‖avg_N x − S_α x‖` along `n_grid`, with a log-log slope fit.
    pub fn convergence_report(&self, n_grid: &[u64], probes: &[ComplexVector]) -> Result<ConvergenceReport> {
        if n_grid.is_empty() {
            return Err(Error::EmptyInput("n_grid"));
        }
        if probes.is_empty() {
            return Err(Error::EmptyInput("probes"));
        }
        let limit = self.entangled_limit()?;
        let targets: Vec<ComplexVector> = probes.iter().map(|x| limit.apply(x)).collect();
        let mut rows = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            let avg = self.average_spectral(n)?;
            let dev = probes.iter().zip(&targets).map(|(x, t)| avg.apply(x).distance(t)).fold(0.0, f64::max);
            rows.push((n, dev));
        }
        Ok(ConvergenceReport::new(rows, probes.len()))
    }
}

struct Walker<'a> {
    inst: &'a EntangledInstance,
    table: &'a [Vec<Complex64>],
    partner: Vec<Option<usize>>,
}

impl Walker<'_> {
    fn descend(
        &self,
        pos: usize,
        choice: &mut [usize],
        prefix: &ComplexMatrix,
        weight: Complex64,
        acc: &mut ComplexMatrix,
    ) {
        if pos == choice.len() {
            acc.axpy(weight, prefix);
            return;
        }
        let with_op = prefix * &self.inst.ops[pos - 1];
        if with_op.is_exact_zero() {
            return;
        }
        for (e, space) in self.inst.u.eigenspaces().iter().enumerate() {
            let w = match self.partner[pos] {
                Some(first) => weight * self.table[choice[first]][e],
                None => weight,
            };
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            let next = &with_op * space.projection();
            if next.is_exact_zero() {
                continue;
            }
            choice[pos] = e;
            self.descend(pos + 1, choice, &next, w, acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_pair_partitions;
    use crate::random::{random_matrix, random_orthonormal_basis, random_unit_vector, seeded, InstanceRng};
    use rand::Rng;

    fn pp(word: &[usize]) -> PairPartition {
        PairPartition::from_word(word).unwrap()
    }

    fn random_rational_unitary(rng: &mut InstanceRng, dim: usize, levels: usize) -> SpectralUnitary {
        let basis = random_orthonormal_basis(rng, dim);
        let mut phases: Vec<Phase> = Vec::new();
        while phases.len() < levels.min(dim) {
            let q = rng.random_range(1..=6u64);
            let z = Phase::rational(rng.random_range(0..q as i64), q).unwrap();
            if !phases.iter().any(|w| w.same(&z)) {
                phases.push(z);
            }
        }
        let mut pairs: Vec<(Phase, Vec<ComplexVector>)> = phases.iter().map(|z| (*z, Vec::new())).collect();
        for (i, v) in basis.into_iter().enumerate() {
            let slot = if i < pairs.len() { i } else { rng.random_range(0..pairs.len()) };
            pairs[slot].1.push(v);
        }
        SpectralUnitary::from_eigensystem(pairs).unwrap()
    }

    fn random_instance(rng: &mut InstanceRng, dim: usize, levels: usize, word: &[usize]) -> EntangledInstance {
        let u = random_rational_unitary(rng, dim, levels);
        let p = pp(word);
        let ops = (0..(2 * p.k()).saturating_sub(1)).map(|_| random_matrix(rng, dim, dim)).collect();
        EntangledInstance::new(u, p, ops).unwrap()
    }

    /// Literal sum with fresh powers computed by repeated multiplication for
    /// every term; no caching, no spectral data beyond the dense matrix.
    fn naive_average(inst: &EntangledInstance, n: u64) -> ComplexMatrix {
        let dense = inst.unitary().matrix();
        let power = |e: u64| {
            let mut p = ComplexMatrix::identity(inst.dim());
            for _ in 0..e {
                p = &p * &dense;
            }
            p
        };
        let word = inst.partition().word();
        let k = inst.partition().k();
        let mut total = ComplexMatrix::zeros(inst.dim(), inst.dim());
        let count = n.pow(k as u32);
        for flat in 0..count {
            let mut idx = vec![0u64; k];
            let mut rest = flat;
            for slot in idx.iter_mut() {
                *slot = rest % n;
                rest /= n;
            }
            let mut prod = power(idx[word[0] - 1]);
            for (op, &class) in inst.ops().iter().zip(&word[1..]) {
                prod = &(&prod * op) * &power(idx[class - 1]);
            }
            total.axpy(ONE, &prod);
        }
        total.scale(Complex64::new(1.0 / count as f64, 0.0))
    }

    #[test]
    fn empty_partition_is_identity() {
        let mut rng = seeded(31);
        let inst = random_instance(&mut rng, 3, 2, &[]);
        for n in 1..5 {
            assert_eq!(inst.average_time_domain(n).unwrap(), ComplexMatrix::identity(3));
        }
        assert_eq!(inst.entangled_limit().unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn single_pair_hand_sum() {
        let u = SpectralUnitary::from_eigensystem(vec![
            (Phase::ZERO, vec![ComplexVector::basis(2, 0)]),
            (Phase::rational(1, 2).unwrap(), vec![ComplexVector::basis(2, 1)]),
        ])
        .unwrap();
        let inst = EntangledInstance::new(u, pp(&[1, 1]), vec![ComplexMatrix::identity(2)]).unwrap();
        let avg = inst.average_time_domain(2).unwrap();
        assert!(avg.frobenius_distance(&ComplexMatrix::identity(2)) <= 1e-15);
    }

    #[test]
    fn time_domain_matches_naive_oracle() {
        let mut rng = seeded(32);
        let inst = random_instance(&mut rng, 4, 3, &[1, 2, 1, 2]);
        let fast = inst.average_time_domain(3).unwrap();
        let naive = naive_average(&inst, 3);
        assert!(fast.frobenius_distance(&naive) <= 1e-10);
    }

    #[test]
    fn spectral_matches_time_domain() {
        let mut rng = seeded(33);
        for trial in 0..12 {
            let k = 1 + trial % 2;
            let word = crate::random::random_pair_word(&mut rng, k);
            let dim = rng.random_range(2..=6);
            let spaces = rng.random_range(1..=4);
            let inst = random_instance(&mut rng, dim, spaces, &word);
            for n in [1, 2, 5, 7] {
                let t = inst.average_time_domain(n).unwrap();
                let s = inst.average_spectral(n).unwrap();
                assert!(t.frobenius_distance(&s) <= 1e-9, "trial {trial} n {n}");
            }
        }
    }

    #[test]
    fn identity_unitary_gives_plain_product() {
        let mut rng = seeded(34);
        let ops: Vec<_> = (0..3).map(|_| random_matrix(&mut rng, 3, 3)).collect();
        let product = &(&ops[0] * &ops[1]) * &ops[2];
        let inst = EntangledInstance::new(SpectralUnitary::identity(3), pp(&[1, 2, 2, 1]), ops).unwrap();
        for n in [1, 3, 10] {
            assert!(inst.average_spectral(n).unwrap().frobenius_distance(&product) <= 1e-12);
        }
        assert!(inst.entangled_limit().unwrap().frobenius_distance(&product) <= 1e-12);
    }

    #[test]
    fn common_denominator_gives_exact_limit() {
        let mut rng = seeded(35);
        for word in [&[1, 2, 1, 2][..], &[1, 1, 2, 2], &[1, 2, 2, 1], &[1, 2, 3, 1, 3, 2]] {
            let inst = random_instance(&mut rng, 5, 4, word);
            let q = inst.unitary().common_denominator().unwrap();
            let limit = inst.entangled_limit().unwrap();
            for mult in 1..4 {
                let avg = inst.average_spectral(q * mult).unwrap();
                assert!(avg.frobenius_distance(&limit) <= 1e-10, "{word:?}");
            }
        }
    }

    #[test]
    fn footnote_example_two_crossing_pairs() {
        let mut rng = seeded(36);
        let inst = random_instance(&mut rng, 4, 4, &[1, 2, 1, 2]);
        let u = inst.unitary();
        let (a, b, c) = (&inst.ops()[0], &inst.ops()[1], &inst.ops()[2]);
        let mut want = ComplexMatrix::zeros(4, 4);
        for z in u.asymmetric_point_spectrum() {
            for w in u.asymmetric_point_spectrum() {
                let term = crate::linalg::chain_product(&[
                    u.eig_projection(&z),
                    a.clone(),
                    u.eig_projection(&w),
                    b.clone(),
                    u.eig_projection(&z.conj()),
                    c.clone(),
                    u.eig_projection(&w.conj()),
                ])
                .unwrap();
                want.axpy(ONE, &term);
            }
        }
        assert!(inst.entangled_limit().unwrap().frobenius_distance(&want) <= 1e-12);
    }

    #[test]
    fn flip_on_two_cycle() {
        // U = shift on ℂ², A = σ_x
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = SpectralUnitary::from_eigensystem(vec![
            (Phase::ZERO, vec![ComplexVector::from_real(&[s, s])]),
            (Phase::rational(1, 2).unwrap(), vec![ComplexVector::from_real(&[s, -s])]),
        ])
        .unwrap();
        let flip =
            ComplexMatrix::from_rows(&[vec![Complex64::new(0.0, 0.0), ONE], vec![ONE, Complex64::new(0.0, 0.0)]])
                .unwrap();
        let e1 = u.eig_projection(&Phase::ZERO);
        let em = u.eig_projection(&Phase::rational(1, 2).unwrap());
        let want = &(&(&e1 * &flip) * &e1) + &(&(&em * &flip) * &em);
        let inst = EntangledInstance::new(u, pp(&[1, 1]), vec![flip]).unwrap();
        let limit = inst.entangled_limit().unwrap();
        assert!(limit.frobenius_distance(&want) <= 1e-14);
        assert!(limit.frobenius_distance(&inst.average_time_domain(2).unwrap()) <= 1e-14);
    }

    #[test]
    fn relabeling_is_invisible() {
        let mut rng = seeded(37);
        let inst = random_instance(&mut rng, 4, 3, &[1, 2, 1, 2]);
        let relabeled = EntangledInstance::new(inst.unitary().clone(), pp(&[2, 1, 2, 1]), inst.ops().to_vec()).unwrap();
        assert_eq!(inst.entangled_limit().unwrap(), relabeled.entangled_limit().unwrap());
    }

    #[test]
    fn zaz_examples() {
        let mut rng = seeded(38);
        for word in [&[1, 1][..], &[1, 2, 1, 2], &[1, 2, 2, 1], &[1, 1, 2, 2], &[1, 2, 3, 1, 3, 2]] {
            for _ in 0..3 {
                let inst = random_instance(&mut rng, 4, 4, word);
                for space in inst.unitary().eigenspaces() {
                    for v in space.basis() {
                        let d = inst.zaz_reduction_check(v, &space.phase()).unwrap();
                        assert!(d <= 1e-9, "{word:?}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn zaz_rejects_non_eigenvectors() {
        let mut rng = seeded(39);
        let inst = random_instance(&mut rng, 4, 4, &[1, 1]);
        let x = random_unit_vector(&mut rng, 4);
        assert!(matches!(inst.zaz_reduction_check(&x, &Phase::ZERO), Err(Error::NotAnEigenvector { .. })));
    }

    #[test]
    fn budget_guard() {
        let mut rng = seeded(40);
        let inst = random_instance(&mut rng, 2, 2, &[1, 2, 1, 2]);
        assert!(matches!(inst.average_time_domain(4000), Err(Error::BudgetExceeded { .. })));
        let four = random_instance(&mut rng, 2, 2, &[1, 2, 3, 4, 1, 2, 3, 4]);
        assert!(matches!(four.average_time_domain(2), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn wrong_operator_count() {
        let err = EntangledInstance::new(SpectralUnitary::identity(2), pp(&[1, 1]), vec![]);
        assert!(matches!(err, Err(Error::OperatorCount { expected: 1, found: 0 })));
    }

    #[test]
    fn operator_norm_bound_propagates() {
        let mut rng = seeded(41);
        for p in enumerate_pair_partitions(2).unwrap() {
            let inst = random_instance(&mut rng, 4, 3, p.word());
            let bound: f64 = inst.ops().iter().map(ComplexMatrix::operator_norm).product();
            for n in [1, 3, 6] {
                let avg = inst.average_time_domain(n).unwrap();
                assert!(avg.operator_norm() <= bound * (1.0 + 1e-6));
            }
        }
    }

    #[test]
    fn identity_unitary_report_is_flat_zero() {
        let mut rng = seeded(42);
        let ops: Vec<_> = (0..3).map(|_| random_matrix(&mut rng, 3, 3)).collect();
        let inst = EntangledInstance::new(SpectralUnitary::identity(3), pp(&[1, 2, 1, 2]), ops).unwrap();
        let probes: Vec<_> = (0..3).map(|_| random_unit_vector(&mut rng, 3)).collect();
        let report = inst.convergence_report(&[1, 2, 4, 8], &probes).unwrap();
        assert!(report.rows().iter().all(|r| r.1 <= 1e-12));
        assert_eq!(report.fitted_slope(), None);
    }
}
