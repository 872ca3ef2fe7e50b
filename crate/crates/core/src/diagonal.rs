//! Averages along `γ = Ad_{U^m1} ⊗ Ad_{U^m2}` on `M ⊗ M′` and their limits.
//!
//! In the representation of the diagonal state `ψ(A ⊗ B) = ⟨ABΩ, Ω⟩` the
//! automorphism `γ` is implemented by `ABΩ ↦ U^{m1} A U^{m2−m1} BΩ`, so the
//! Cesàro means of `γ` become `(1/N) Σ U^{nm1} A U^{n(m2−m1)} BΩ`. Their limit
//! is `V(AΩ ⊗ BΩ)`, where `V` sends `V_zΩ ⊗ W_wΩ ↦ V_z W_w Ω` on the pairs
//! with `z^{m1} w^{m2} = 1`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, ComplexVector};
use crate::models::{BernoulliShiftSystem, CyclicRotationSystem, DynamicalSystem};
use crate::report::ConvergenceReport;
use crate::spectral::{Phase, SpectralUnitary};

/// Tolerance for `V*V = E₁`.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;

/// Eigenphase pairs `(z, w)` with `z^{m1} w^{m2} = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSet {
    pairs: Vec<(Phase, Phase)>,
}

impl SigmaSet {
    pub fn pairs(&self) -> &[(Phase, Phase)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, z: &Phase, w: &Phase) -> bool {
        self.pairs.iter().any(|(a, b)| a.same(z) && b.same(w))
    }
}

/// `V` as a `dim × dim²` matrix together with the product basis of its
/// initial space and the images of that basis.
#[derive(Clone, Debug)]
pub struct PartialIsometryV {
    domain_basis: Vec<ComplexVector>,
    images: Vec<ComplexVector>,
    matrix: ComplexMatrix,
}

impl PartialIsometryV {
    pub fn domain_basis(&self) -> &[ComplexVector] {
        &self.domain_basis
    }

    pub fn images(&self) -> &[ComplexVector] {
        &self.images
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        self.matrix.apply(x)
    }

    /// `V*V`.
    pub fn initial_projection(&self) -> ComplexMatrix {
        &self.matrix.adjoint() * &self.matrix
    }

    /// `VV*`.
    pub fn final_projection(&self) -> ComplexMatrix {
        &self.matrix * &self.matrix.adjoint()
    }
}

/// A base system together with the exponents `0 < m1 < m2`.
#[derive(Clone, Debug)]
pub struct TensorDynamics<S> {
    base: S,
    m1: u64,
    m2: u64,
}

impl<S> TensorDynamics<S>
where
    S: DynamicalSystem + Sync,
    S::Vector: Send + Sync,
    S::Operator: Sync,
{
    pub fn new(base: S, m1: u64, m2: u64) -> Result<Self> {
        if m1 == 0 || m1 >= m2 {
            return Err(Error::InvalidModel(format!("need 0 < m1 < m2, got m1 = {m1}, m2 = {m2}")));
        }
        Ok(Self { base, m1, m2 })
    }

    /// `γ = Ad_U ⊗ Ad_{U²}`.
    pub fn standard(base: S) -> Self {
        Self { base, m1: 1, m2: 2 }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn sigma_pairs(&self) -> SigmaSet {
        let spectrum = self.base.point_spectrum();
        let mut pairs = Vec::new();
        for z in &spectrum {
            for w in &spectrum {
                if z.pow(self.m1 as i64).add(&w.pow(self.m2 as i64)).is_one() {
                    pairs.push((*z, *w));
                }
            }
        }
        SigmaSet { pairs }
    }

    /// `U^{nm1} A U^{n(m2−m1)} ξ`, the `n`-th power of the implementing unitary
    /// applied to `ξ` with `A` in front.
    fn gamma_term(&self, a: &S::Operator, xi: &S::Vector, n: u64) -> S::Vector {
        let d = (self.m2 - self.m1) as i64 * n as i64;
        let inner = self.base.act(a, &self.base.evolve(xi, d));
        self.base.evolve(&inner, self.m1 as i64 * n as i64)
    }

    /// `(1/N) Σ_{n<N} U^{nm1} A U^{n(m2−m1)} ξ`.
    pub fn diagonal_cesaro_apply(&self, a: &S::Operator, xi: &S::Vector, n: u64) -> S::Vector {
        assert!(n >= 1, "N must be positive");
        let mut acc = self.base.zero_vector();
        for j in 0..n {
            self.base.axpy(&mut acc, Complex64::new(1.0, 0.0), &self.gamma_term(a, xi, j));
        }
        self.base.scale(&acc, Complex64::new(1.0 / n as f64, 0.0))
    }

    /// `(1/N) Σ_{n<N} U^{nm1} A U^{n(m2−m1)} BΩ`.
    pub fn diagonal_cesaro_vector(&self, a: &S::Operator, b: &S::Operator, n: u64) -> S::Vector {
        let b_omega = self.base.act(b, &self.base.omega());
        self.diagonal_cesaro_apply(a, &b_omega, n)
    }

    /// `V(AΩ ⊗ ξ)`.
    pub fn diagonal_limit(&self, a: &S::Operator, xi: &S::Vector) -> S::Vector {
        let a_omega = self.base.act(a, &self.base.omega());
        self.base.diagonal_limit_map(self.m1, self.m2, &a_omega, xi)
    }

    /// Deviation `max_ξ ‖(1/N) Σ U^{nm1} A U^{n(m2−m1)} ξ − V(AΩ ⊗ ξ)‖` on
    /// each `N` of the grid.
    pub fn diagonal_cesaro_operator(&self, a: &S::Operator, n_grid: &[u64], probes: &[S::Vector]) -> ConvergenceReport {
        let limits: Vec<S::Vector> = probes.iter().map(|xi| self.diagonal_limit(a, xi)).collect();
        let rows = n_grid
            .par_iter()
            .map(|&n| {
                let dev = probes
                    .iter()
                    .zip(&limits)
                    .map(|(xi, lim)| self.base.distance(&self.diagonal_cesaro_apply(a, xi, n), lim))
                    .fold(0.0, f64::max);
                (n, dev)
            })
            .collect();
        ConvergenceReport::new(rows, probes.len())
    }

    /// `(1/N) Σ_{n<N} ω(A₀ α^{nm1}(A₁) α^{nm2}(A₂))`.
    pub fn triple_correlation(&self, a0: &S::Operator, a1: &S::Operator, a2: &S::Operator, n: u64) -> Complex64 {
        assert!(n >= 1, "N must be positive");
        let omega = self.base.omega();
        let a2_omega = self.base.act(a2, &omega);
        let target = self.base.act(&self.base.adjoint(a0), &omega);
        let total: Complex64 = (0..n).map(|j| self.base.inner(&self.gamma_term(a1, &a2_omega, j), &target)).sum();
        total / n as f64
    }

    /// `⟨V(A₁Ω ⊗ A₂Ω), A₀*Ω⟩`.
    pub fn triple_correlation_limit(&self, a0: &S::Operator, a1: &S::Operator, a2: &S::Operator) -> Complex64 {
        let omega = self.base.omega();
        let lim = self.diagonal_limit(a1, &self.base.act(a2, &omega));
        self.base.inner(&lim, &self.base.act(&self.base.adjoint(a0), &omega))
    }

    /// `((1/N) Σ_{n<N} ⟨A U^{n(m2−m1)} BΩ, Ω⟩, Σ_{z^{m2−m1}=1} ⟨A E_z BΩ, Ω⟩)`.
    pub fn general_exponent_average(&self, a: &S::Operator, b: &S::Operator, n: u64) -> (Complex64, Complex64) {
        assert!(n >= 1, "N must be positive");
        let d = self.m2 - self.m1;
        let omega = self.base.omega();
        let a_star_omega = self.base.act(&self.base.adjoint(a), &omega);
        let b_omega = self.base.act(b, &omega);
        let finite: Complex64 = (0..n)
            .map(|j| self.base.inner(&self.base.evolve(&b_omega, (d * j) as i64), &a_star_omega))
            .sum::<Complex64>()
            / n as f64;
        let limit = self.base.inner(&self.base.power_invariant_part(d, &b_omega), &a_star_omega);
        (finite, limit)
    }

    /// `|finite − limit|` of [`general_exponent_average`](Self::general_exponent_average)
    /// along the grid. Reports behaviour; asserts nothing.
    pub fn general_exponent_report(&self, a: &S::Operator, b: &S::Operator, n_grid: &[u64]) -> ConvergenceReport {
        let rows = n_grid
            .par_iter()
            .map(|&n| {
                let (finite, limit) = self.general_exponent_average(a, b, n);
                (n, (finite - limit).norm())
            })
            .collect();
        ConvergenceReport::new(rows, 1)
    }

    /// `‖(1/N) Σ_{n<N} U^{nm1} A U^{nm2} ξ − ⟨AΩ,Ω⟩⟨ξ,Ω⟩Ω‖`.
    pub fn weak_mixing_deviation(&self, a: &S::Operator, xi: &S::Vector, n: u64) -> f64 {
        assert!(n >= 1, "N must be positive");
        let mut acc = self.base.zero_vector();
        for j in 0..n as i64 {
            let v = self.base.act(a, &self.base.evolve(xi, j * self.m2 as i64));
            self.base.axpy(&mut acc, Complex64::new(1.0, 0.0), &self.base.evolve(&v, j * self.m1 as i64));
        }
        let avg = self.base.scale(&acc, Complex64::new(1.0 / n as f64, 0.0));
        let omega = self.base.omega();
        let coeff = self.base.state(a) * self.base.inner(xi, &omega);
        self.base.distance(&avg, &self.base.scale(&omega, coeff))
    }

    pub fn weak_mixing_report(&self, a: &S::Operator, n_grid: &[u64], probes: &[S::Vector]) -> ConvergenceReport {
        let rows = n_grid
            .par_iter()
            .map(|&n| {
                let dev = probes.iter().map(|xi| self.weak_mixing_deviation(a, xi, n)).fold(0.0, f64::max);
                (n, dev)
            })
            .collect();
        ConvergenceReport::new(rows, probes.len())
    }
}

impl TensorDynamics<CyclicRotationSystem> {
    /// `U^{m1} ⊗ U^{m2}` on `ℂ^{m²}`.
    pub fn tensor_unitary(&self) -> SpectralUnitary {
        let u = self.base.unitary();
        u.tensor_power(self.m1 as i64, u, self.m2 as i64)
    }

    /// `E₁ = Σ_{(z,w)∈Σ} E_z ⊗ E_w`.
    pub fn invariant_projection_tensor(&self) -> Result<ComplexMatrix> {
        let u = self.base.unitary();
        let dim = u.dim();
        let mut e1 = ComplexMatrix::zeros(dim * dim, dim * dim);
        for (z, w) in self.sigma_pairs().pairs() {
            e1.axpy(Complex64::new(1.0, 0.0), &kron(&u.eig_projection(z), &u.eig_projection(w)));
        }
        Ok(e1)
    }

    fn numerator(&self, z: &Phase) -> i64 {
        (z.as_turns() * self.base.m() as f64).round() as i64
    }

    /// `V` with `V(V_zΩ ⊗ W_wΩ) = V_z W_w Ω` on `Σ`, zero on the complement
    /// of `E₁`. Fails unless `V*V = E₁`.
    pub fn build_partial_isometry(&self) -> Result<PartialIsometryV> {
        let m = self.base.m();
        let omega = self.base.omega();
        let mut domain_basis = Vec::new();
        let mut images = Vec::new();
        let mut matrix = ComplexMatrix::zeros(m, m * m);
        for (z, w) in self.sigma_pairs().pairs() {
            let (p, l) = (self.numerator(z), self.numerator(w));
            let vz = self.base.generator(p);
            let ww = self.base.generator(l);
            let domain = vz.apply(&omega).kron(&ww.apply(&omega));
            let image = vz.apply(&ww.apply(&omega));
            matrix.axpy(Complex64::new(1.0, 0.0), &ComplexMatrix::outer(&image, &domain));
            domain_basis.push(domain);
            images.push(image);
        }
        let v = PartialIsometryV { domain_basis, images, matrix };
        let defect = v.initial_projection().frobenius_distance(&self.invariant_projection_tensor()?);
        if defect > ISOMETRY_TOLERANCE {
            return Err(Error::NotPartialIsometry { defect });
        }
        Ok(v)
    }

    /// `Σ_{(z,w)∈Σ} E_{zw} A E_w`, the strong limit of
    /// `(1/N) Σ U^{nm1} A U^{n(m2−m1)}`.
    pub fn spectral_limit_operator(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let u = self.base.unitary();
        let mut out = ComplexMatrix::zeros(u.dim(), u.dim());
        for (z, w) in self.sigma_pairs().pairs() {
            let term = &(&u.eig_projection(&z.add(w)) * a) * &u.eig_projection(w);
            out.axpy(Complex64::new(1.0, 0.0), &term);
        }
        out
    }

    /// `⟨Σ_{(z,w)∈Σ} E_{zw} A₁ E_w A₂Ω, A₀*Ω⟩`.
    pub fn triple_correlation_spectral(&self, a0: &ComplexMatrix, a1: &ComplexMatrix, a2: &ComplexMatrix) -> Complex64 {
        let omega = self.base.omega();
        let v = self.spectral_limit_operator(a1).apply(&a2.apply(&omega));
        v.inner(&a0.adjoint().apply(&omega))
    }
}

impl TensorDynamics<BernoulliShiftSystem> {
    /// `E₁` is the rank-one projection onto `Ω ⊗ Ω` on an infinite-dimensional
    /// space and is only applied symbolically.
    pub fn invariant_projection_tensor(&self) -> Result<ComplexMatrix> {
        Err(Error::ModelNotMaterializable)
    }

    pub fn build_partial_isometry(&self) -> Result<PartialIsometryV> {
        Err(Error::ModelNotMaterializable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{combined_width, CylinderOperator, CylinderVector};
    use crate::random::{random_matrix, random_vector, seeded};

    const TOL: f64 = 1e-10;

    fn cyclic(m: usize) -> TensorDynamics<CyclicRotationSystem> {
        TensorDynamics::standard(CyclicRotationSystem::new(m).unwrap())
    }

    fn numerators(sigma: &SigmaSet, m: u64) -> Vec<(u64, u64)> {
        let num = |z: &Phase| (z.as_turns() * m as f64).round() as u64;
        sigma.pairs().iter().map(|(z, w)| (num(z), num(w))).collect()
    }

    #[test]
    fn exponents_are_validated() {
        let sys = CyclicRotationSystem::new(3).unwrap();
        assert!(TensorDynamics::new(sys.clone(), 0, 2).is_err());
        assert!(TensorDynamics::new(sys.clone(), 2, 2).is_err());
        assert!(TensorDynamics::new(sys, 2, 5).is_ok());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(numerators(&cyclic(3).sigma_pairs(), 3), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(numerators(&cyclic(2).sigma_pairs(), 2), vec![(0, 0), (0, 1)]);
        let ber = TensorDynamics::standard(BernoulliShiftSystem::new(3).unwrap());
        let sigma = ber.sigma_pairs();
        assert_eq!(sigma.len(), 1);
        assert!(sigma.contains(&Phase::ZERO, &Phase::ZERO));
    }

    #[test]
    fn sigma_matches_brute_force() {
        for m in 1..=7u64 {
            for (m1, m2) in [(1, 2), (1, 3), (2, 3), (2, 5)] {
                let td = TensorDynamics::new(CyclicRotationSystem::new(m as usize).unwrap(), m1, m2).unwrap();
                let want: Vec<(u64, u64)> = (0..m)
                    .flat_map(|p| (0..m).map(move |l| (p, l)))
                    .filter(|&(p, l)| (m1 * p + m2 * l) % m == 0)
                    .collect();
                assert_eq!(numerators(&td.sigma_pairs(), m), want);
            }
        }
    }

    #[test]
    fn invariant_projection_examples() {
        let e1 = cyclic(3).invariant_projection_tensor().unwrap();
        assert!(e1.is_projection());
        assert!((e1.trace().re - 3.0).abs() <= TOL);
        let direct = cyclic(3).tensor_unitary().mean_ergodic_projection();
        assert!(e1.frobenius_distance(&direct) <= TOL);

        let e1 = cyclic(1).invariant_projection_tensor().unwrap();
        assert!(e1.frobenius_distance(&ComplexMatrix::identity(1)) <= TOL);

        let ber = TensorDynamics::standard(BernoulliShiftSystem::new(2).unwrap());
        assert_eq!(ber.invariant_projection_tensor(), Err(Error::ModelNotMaterializable));
        assert!(matches!(ber.build_partial_isometry(), Err(Error::ModelNotMaterializable)));
    }

    #[test]
    fn invariant_projection_agrees_with_mean_ergodic_projection() {
        for m in 1..=5 {
            for (m1, m2) in [(1, 2), (1, 3), (2, 3)] {
                let td = TensorDynamics::new(CyclicRotationSystem::new(m).unwrap(), m1, m2).unwrap();
                let e1 = td.invariant_projection_tensor().unwrap();
                let direct = td.tensor_unitary().mean_ergodic_projection();
                assert!(e1.frobenius_distance(&direct) <= TOL);
                assert!((e1.trace().re - td.sigma_pairs().len() as f64).abs() <= TOL);
            }
        }
    }

    #[test]
    fn partial_isometry_examples() {
        let v = cyclic(1).build_partial_isometry().unwrap();
        assert!(v.matrix().frobenius_distance(&ComplexMatrix::identity(1)) <= TOL);

        let td = cyclic(3);
        let v = td.build_partial_isometry().unwrap();
        let sys = td.base();
        let omega = sys.omega();
        for j in 0..3i64 {
            for l in 0..3i64 {
                let x = sys.character(j).apply(&omega).kron(&sys.character(l).apply(&omega));
                let image = v.apply(&x);
                // V_jΩ lies in the eigenspace of phase −j
                if (-j - 2 * l).rem_euclid(3) == 0 {
                    assert!(image.distance(&sys.character(j + l).apply(&omega)) <= TOL);
                } else {
                    assert!(image.norm() <= TOL);
                }
            }
        }
        assert!(v.final_projection().is_projection());
    }

    #[test]
    fn partial_isometry_is_isometric_on_its_initial_space() {
        let mut rng = seeded(41);
        for m in [2, 3, 5] {
            let td = cyclic(m);
            let v = td.build_partial_isometry().unwrap();
            let e1 = td.invariant_projection_tensor().unwrap();
            for _ in 0..20 {
                let x = e1.apply(&random_vector(&mut rng, m * m));
                assert!((v.apply(&x).norm() - x.norm()).abs() <= TOL);
            }
        }
    }

    #[test]
    fn colliding_images_are_rejected() {
        let td = TensorDynamics::new(CyclicRotationSystem::new(4).unwrap(), 1, 3).unwrap();
        assert!(matches!(td.build_partial_isometry(), Err(Error::NotPartialIsometry { .. })));
    }

    #[test]
    fn diagonal_vector_examples() {
        let td = cyclic(3);
        let sys = td.base();
        let id = sys.identity_operator();
        for n in 1..8 {
            assert!(td.diagonal_cesaro_vector(&id, &id, n).distance(&sys.omega()) <= TOL);
        }
        let v1 = sys.character(1);
        let avg = td.diagonal_cesaro_vector(v1, v1, 3);
        let want = sys.character(2).apply(&sys.omega());
        assert!(avg.distance(&want) <= TOL);
        assert!(td.diagonal_limit(v1, &v1.apply(&sys.omega())).distance(&want) <= TOL);
    }

    #[test]
    fn diagonal_vector_is_exact_at_multiples_of_m() {
        let mut rng = seeded(42);
        for m in [2, 3, 4, 5] {
            for (m1, m2) in [(1, 2), (2, 3)] {
                let td = TensorDynamics::new(CyclicRotationSystem::new(m).unwrap(), m1, m2).unwrap();
                let sys = td.base();
                let diag = |rng: &mut _| {
                    let d = random_vector(rng, m);
                    ComplexMatrix::from_diagonal(d.entries())
                };
                let (a, b) = (diag(&mut rng), diag(&mut rng));
                let lim = td.diagonal_limit(&a, &b.apply(&sys.omega()));
                for n in (m as u64..=6 * m as u64).step_by(m) {
                    assert!(td.diagonal_cesaro_vector(&a, &b, n).distance(&lim) <= TOL);
                }
            }
        }
    }

    #[test]
    fn closing_display_matches_limit_map() {
        let mut rng = seeded(43);
        for m in [2, 3, 5] {
            let td = cyclic(m);
            let sys = td.base();
            let u = sys.unitary();
            for _ in 0..5 {
                let a = ComplexMatrix::from_diagonal(random_vector(&mut rng, m).entries());
                let xi = random_vector(&mut rng, m);
                let mut display = ComplexVector::zeros(m);
                for w in u.point_spectrum() {
                    let term = u.eig_projection(&w.conj()).apply(&a.apply(&u.eig_projection(&w).apply(&xi)));
                    display.axpy(Complex64::new(1.0, 0.0), &term);
                }
                assert!(display.distance(&td.diagonal_limit(&a, &xi)) <= TOL);
                assert!(td.spectral_limit_operator(&a).apply(&xi).distance(&display) <= TOL);
            }
        }
    }

    #[test]
    fn operator_report_with_identity_is_the_square_average() {
        let td = cyclic(4);
        let sys = td.base();
        let xi = random_vector(&mut seeded(44), 4);
        let id = sys.identity_operator();
        let report = td.diagonal_cesaro_operator(&id, &[1, 2, 3, 4, 8], std::slice::from_ref(&xi));
        for &(n, dev) in report.rows() {
            let mut acc = ComplexVector::zeros(4);
            for j in 0..n as i64 {
                acc.axpy(Complex64::new(1.0, 0.0), &sys.unitary().power_apply(2 * j, &xi).unwrap());
            }
            let avg = acc.scale(Complex64::new(1.0 / n as f64, 0.0));
            let want = avg.distance(&sys.power_invariant_part(2, &xi));
            assert!((dev - want).abs() <= 1e-12);
        }
        assert!(report.rows()[3].1 <= TOL && report.rows()[4].1 <= TOL);
    }

    #[test]
    fn vector_and_operator_forms_agree() {
        let mut rng = seeded(45);
        let td = cyclic(5);
        let sys = td.base();
        let a = ComplexMatrix::from_diagonal(random_vector(&mut rng, 5).entries());
        let b = ComplexMatrix::from_diagonal(random_vector(&mut rng, 5).entries());
        let b_omega = b.apply(&sys.omega());
        for n in [1, 3, 7, 10] {
            let lhs = td.diagonal_cesaro_vector(&a, &b, n);
            let rhs = td.diagonal_cesaro_apply(&a, &b_omega, n);
            assert!(lhs.distance(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn triple_correlation_examples() {
        let td = cyclic(3);
        let sys = td.base();
        let id = sys.identity_operator();
        assert!((td.triple_correlation(&id, &id, &id, 5) - Complex64::new(1.0, 0.0)).norm() <= TOL);

        let v1 = sys.character(1);
        let lim = td.triple_correlation_limit(v1, v1, v1);
        assert!((td.triple_correlation(v1, v1, v1, 3) - lim).norm() <= TOL);
        assert!((td.triple_correlation_spectral(v1, v1, v1) - lim).norm() <= TOL);
    }

    #[test]
    fn triple_correlation_limit_three_ways() {
        let mut rng = seeded(46);
        for m in [2, 3, 4, 5] {
            let td = cyclic(m);
            let ops: Vec<ComplexMatrix> =
                (0..3).map(|_| ComplexMatrix::from_diagonal(random_vector(&mut rng, m).entries())).collect();
            let via_v = td.triple_correlation_limit(&ops[0], &ops[1], &ops[2]);
            let spectral = td.triple_correlation_spectral(&ops[0], &ops[1], &ops[2]);
            let direct = td.triple_correlation(&ops[0], &ops[1], &ops[2], 3 * (m * m) as u64);
            assert!((via_v - spectral).norm() <= TOL);
            assert!((via_v - direct).norm() <= TOL);
        }
    }

    #[test]
    fn bernoulli_triple_correlation_rate() {
        let sys = BernoulliShiftSystem::new(3).unwrap();
        let td = TensorDynamics::standard(sys);
        let a0: CylinderOperator<Complex64> = sys.character(0, 1);
        let a1 = sys.character(1, 2);
        let a2 = sys.character(0, 1);
        let width = combined_width(&[&a0, &a1, &a2]) as f64;
        let target = a0.state() * a1.state() * a2.state();
        assert_eq!(td.triple_correlation_limit(&a0, &a1, &a2), target);
        for n in [8, 9, 16, 33, 64, 128, 512] {
            let gap = (td.triple_correlation(&a0, &a1, &a2, n) - target).norm();
            assert!(gap <= 4.0 * width / n as f64, "N = {n}: {gap}");
        }
    }

    #[test]
    fn general_exponent_examples() {
        let mut rng = seeded(47);
        let td = TensorDynamics::new(CyclicRotationSystem::new(5).unwrap(), 2, 3).unwrap();
        let sys = td.base();
        let a = ComplexMatrix::from_diagonal(random_vector(&mut rng, 5).entries());
        let b = ComplexMatrix::from_diagonal(random_vector(&mut rng, 5).entries());
        let (finite, limit) = td.general_exponent_average(&a, &b, 10);
        assert!((limit - sys.state(&a) * sys.state(&b)).norm() <= TOL);
        assert!((finite - limit).norm() <= TOL);

        let td = TensorDynamics::new(CyclicRotationSystem::new(4).unwrap(), 1, 3).unwrap();
        let sys = td.base();
        let v2 = sys.character(2);
        let product = sys.state(v2) * sys.state(v2);
        for n in [4, 8, 12] {
            let (finite, limit) = td.general_exponent_average(v2, v2, n);
            assert!((finite - limit).norm() <= TOL);
            assert!((limit - product).norm() > 0.1);
        }
        let report = td.general_exponent_report(v2, v2, &[4, 8, 12]);
        assert!(report.max_deviation() <= TOL);
    }

    #[test]
    fn general_exponent_matches_generic_state_average() {
        let mut rng = seeded(48);
        let td = TensorDynamics::new(CyclicRotationSystem::new(6).unwrap(), 1, 3).unwrap();
        let sys = td.base();
        let a = ComplexMatrix::from_diagonal(random_vector(&mut rng, 6).entries());
        let b = ComplexMatrix::from_diagonal(random_vector(&mut rng, 6).entries());
        let tensor = [(a.clone(), b.clone())];
        for n in [1, 5, 9] {
            let (finite, _) = td.general_exponent_average(&a, &b, n);
            let generic = crate::models::generic_state_average(sys, &tensor, 1, 3, n);
            assert!((finite - generic).norm() <= 1e-12);
        }
    }

    #[test]
    fn bernoulli_scalar_average_is_exact_beyond_width() {
        let sys = BernoulliShiftSystem::new(3).unwrap();
        let td = TensorDynamics::new(sys, 1, 3).unwrap();
        let a = sys.operator_from_terms(&[(0, 0, Complex64::new(0.5, 0.0)), (0, 1, Complex64::new(1.0, -1.0))]);
        let b = sys.operator_from_terms(&[(0, 0, Complex64::new(-0.25, 0.0)), (1, 2, Complex64::new(2.0, 0.0))]);
        for n in [4, 16, 64, 256] {
            let (finite, limit) = td.general_exponent_average(&a, &b, n);
            assert_eq!(limit, a.state() * b.state());
            let w = combined_width(&[&a, &b]) as f64;
            assert!((finite - limit).norm() <= 2.0 * w * a.mass() * b.mass() / n as f64);
        }
    }

    #[test]
    fn bernoulli_vector_averages_decay_like_inverse_square_root() {
        // distinct n give orthonormal words, so the average has norm 1/√N
        let sys = BernoulliShiftSystem::new(3).unwrap();
        let td = TensorDynamics::standard(sys);
        let a = sys.character::<Complex64>(0, 1);
        let b = sys.character::<Complex64>(0, 2);
        let zero = CylinderVector::zero();
        assert_eq!(td.diagonal_limit(&a, &sys.multiply(&b, &CylinderVector::omega())), zero);
        for n in [1, 4, 16, 64] {
            let avg = td.diagonal_cesaro_vector(&a, &b, n);
            let dev = sys.distance(&avg, &zero);
            assert!((dev - 1.0 / (n as f64).sqrt()).abs() <= 1e-12, "N = {n}");
            let probe = td.weak_mixing_deviation(&a, &CylinderVector::omega(), n);
            assert!((probe - 1.0 / (n as f64).sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn weak_mixing_scalar_form_converges() {
        let sys = BernoulliShiftSystem::new(2).unwrap();
        let td = TensorDynamics::new(sys, 2, 3).unwrap();
        let a = sys.operator_from_terms(&[(0, 0, Complex64::new(1.0, 0.0)), (1, 1, Complex64::new(0.5, 0.0))]);
        let b = sys.character::<Complex64>(0, 1);
        let report = td.general_exponent_report(&a, &b, &[8, 16, 32]);
        assert!(report.max_deviation() <= 2.0 * 2.0 * 1.5 / 8.0);
    }

    #[test]
    fn cyclic_operator_report_is_exact_on_multiples() {
        let mut rng = seeded(49);
        let td = cyclic(5);
        let a = random_matrix(&mut rng, 5, 5);
        let a = ComplexMatrix::from_diagonal(&(0..5).map(|i| a.get(i, i)).collect::<Vec<_>>());
        let probes: Vec<ComplexVector> = (0..10).map(|_| random_vector(&mut rng, 5)).collect();
        let report = td.diagonal_cesaro_operator(&a, &[5, 10, 15, 20], &probes);
        assert!(report.max_deviation() <= TOL);
        assert_eq!(report.probe_count(), 10);
    }
}
