//! One function per experiment kind. Each returns a [`ConvergenceReport`] and
//! the checks derived from it; randomness comes only from the config seed.

use rand::Rng;

use entangle_core::diagonal::TensorDynamics;
use entangle_core::entangled::EntangledInstance;
use entangle_core::models::{combined_width, CylinderOperator, CylinderVector};
use entangle_core::partitions::PairPartition;
use entangle_core::random::{
    gaussian, random_matrix, random_orthonormal_basis, random_pair_word, random_spectral_unitary, random_unit_vector,
    random_vector, seeded, InstanceRng, PhaseDraw,
};
use entangle_core::spectral::{double_average_bound, double_average_defect, psd_average_bound_defect};
use entangle_core::{
    BernoulliShiftSystem, Complex64, ComplexMatrix, ComplexVector, ConvergenceReport, CyclicRotationSystem,
    DynamicalSystem, Error, SpectralUnitary,
};

use crate::config::{ConfigError, ExperimentConfig, ModelSpec, OperatorSpec, Tolerances};
use crate::kinds::Kind;

/// Tolerance used when a kind is expected to be exact.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Tolerance for comparisons of two independent evaluations of the same sum.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub kind: Kind,
    pub report: ConvergenceReport,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn lib_error(field: &str) -> impl Fn(Error) -> ConfigError + '_ {
    move |e| ConfigError::new(field, e.to_string())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, ConfigError> {
    let mut rng = seeded(config.seed);
    let (report, defaults, mut checks, notes) = match config.kind {
        Kind::EntangledConvergence => entangled_convergence(config, &mut rng)?,
        Kind::Zaz => zaz(config, &mut rng)?,
        Kind::OracleEquivalence => oracle_equivalence(config, &mut rng)?,
        Kind::DiagVector => diag_vector(config, &mut rng)?,
        Kind::DiagOperator => diag_operator(config, &mut rng)?,
        Kind::Triple => triple(config, &mut rng)?,
        Kind::GeneralExponent => general_exponent(config, &mut rng)?,
        Kind::LemmaChecks => lemma_checks(config, &mut rng)?,
    };
    let mut all = tolerance_checks(&report, &merge(&config.tolerances, &defaults));
    all.append(&mut checks);
    Ok(Outcome { kind: config.kind, report, checks: all, notes })
}

type KindResult = Result<(ConvergenceReport, Tolerances, Vec<Check>, Vec<String>), ConfigError>;

fn merge(given: &Tolerances, defaults: &Tolerances) -> Tolerances {
    Tolerances {
        max_deviation: given.max_deviation.or(defaults.max_deviation),
        rate_constant: given.rate_constant.or(defaults.rate_constant),
        slope_min: given.slope_min.or(defaults.slope_min),
        slope_max: given.slope_max.or(defaults.slope_max),
    }
}

fn tolerance_checks(report: &ConvergenceReport, tol: &Tolerances) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Some(t) = tol.max_deviation {
        let max = report.max_deviation();
        checks.push(Check {
            name: "max deviation".into(),
            passed: max <= t,
            detail: format!("max {max:.3e}, tolerance {t:.1e}"),
        });
    }
    if let Some(c) = tol.rate_constant {
        let worst = report.rows().iter().map(|&(n, d)| d * n as f64).fold(0.0, f64::max);
        checks.push(Check {
            name: "rate C/N".into(),
            passed: report.rows().iter().all(|&(n, d)| d <= c / n as f64),
            detail: format!("max N*deviation {worst:.3e}, C = {c:.3e}"),
        });
    }
    if tol.slope_min.is_some() || tol.slope_max.is_some() {
        let lo = tol.slope_min.unwrap_or(f64::NEG_INFINITY);
        let hi = tol.slope_max.unwrap_or(f64::INFINITY);
        let (passed, detail) = match report.fitted_slope() {
            Some(s) => (lo <= s && s <= hi, format!("slope {s:.4}, range [{lo}, {hi}]")),
            None => (false, "slope undefined (fewer than two nonzero rows)".into()),
        };
        checks.push(Check { name: "log-log slope".into(), passed, detail });
    }
    checks
}

fn exact_when(all_multiples: bool) -> Tolerances {
    Tolerances { max_deviation: all_multiples.then_some(EXACT_TOLERANCE), ..Tolerances::default() }
}

fn divisible(grid: &[u64], d: Option<u64>) -> bool {
    d.is_some_and(|d| grid.iter().all(|n| n % d == 0))
}

// ---------------------------------------------------------------------------
// models and operators

enum Built {
    Matrix { u: SpectralUnitary, cyclic: Option<CyclicRotationSystem> },
    Bernoulli(BernoulliShiftSystem),
}

fn build_model(spec: &ModelSpec, rng: &mut InstanceRng) -> Result<Built, ConfigError> {
    match spec {
        ModelSpec::Cyclic { m } => {
            let sys = CyclicRotationSystem::new(*m).map_err(lib_error("model"))?;
            Ok(Built::Matrix { u: sys.unitary().clone(), cyclic: Some(sys) })
        }
        ModelSpec::Bernoulli { q } => Ok(Built::Bernoulli(BernoulliShiftSystem::new(*q).map_err(lib_error("model"))?)),
        ModelSpec::Spectral { eigenspaces } => {
            if eigenspaces.is_empty() {
                return Err(ConfigError::new("model.eigenspaces", "must not be empty"));
            }
            let explicit = eigenspaces.iter().filter(|e| e.vectors.is_some()).count();
            if explicit != 0 && explicit != eigenspaces.len() {
                return Err(ConfigError::new(
                    "model.eigenspaces",
                    "give vectors for every eigenspace or for none of them",
                ));
            }
            let mut pairs = Vec::new();
            if explicit == 0 {
                let sizes: Vec<usize> = eigenspaces.iter().map(|e| e.multiplicity.unwrap_or(1)).collect();
                if sizes.contains(&0) {
                    return Err(ConfigError::new("model.eigenspaces.multiplicity", "must be positive"));
                }
                let mut basis = random_orthonormal_basis(rng, sizes.iter().sum()).into_iter();
                for (i, (e, s)) in eigenspaces.iter().zip(sizes).enumerate() {
                    let phase = e.phase.to_phase(&format!("model.eigenspaces[{i}].phase"))?;
                    pairs.push((phase, basis.by_ref().take(s).collect()));
                }
            } else {
                for (i, e) in eigenspaces.iter().enumerate() {
                    let phase = e.phase.to_phase(&format!("model.eigenspaces[{i}].phase"))?;
                    let vectors = e.vectors.as_ref().expect("checked above");
                    let vs =
                        vectors.iter().map(|v| ComplexVector::new(v.iter().map(|c| c.value()).collect())).collect();
                    pairs.push((phase, vs));
                }
            }
            let u = SpectralUnitary::from_eigensystem(pairs).map_err(lib_error("model.eigenspaces"))?;
            Ok(Built::Matrix { u, cyclic: None })
        }
    }
}

fn require_model(config: &ExperimentConfig) -> Result<&ModelSpec, ConfigError> {
    config.model.as_ref().ok_or_else(|| ConfigError::new("model", "required for this kind"))
}

fn matrix_model(
    config: &ExperimentConfig,
    rng: &mut InstanceRng,
) -> Result<(SpectralUnitary, Option<CyclicRotationSystem>), ConfigError> {
    match build_model(require_model(config)?, rng)? {
        Built::Matrix { u, cyclic } => Ok((u, cyclic)),
        Built::Bernoulli(_) => {
            Err(ConfigError::new("model", "this kind needs pure point spectrum: use a cyclic or spectral model"))
        }
    }
}

fn operator_specs(config: &ExperimentConfig, count: usize) -> Result<Vec<OperatorSpec>, ConfigError> {
    match &config.operators {
        None => Ok(vec![OperatorSpec::Named("random".into()); count]),
        Some(ops) if ops.len() == count => Ok(ops.clone()),
        Some(ops) => Err(ConfigError::new("operators", format!("expected {count} operators, found {}", ops.len()))),
    }
}

fn check_random_name(name: &str, field: &str) -> Result<(), ConfigError> {
    if name == "random" {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("unknown operator name {name:?}; only \"random\" is defined")))
    }
}

fn matrix_operator(
    spec: &OperatorSpec,
    dim: usize,
    cyclic: Option<&CyclicRotationSystem>,
    diagonal_only: bool,
    rng: &mut InstanceRng,
    field: &str,
) -> Result<ComplexMatrix, ConfigError> {
    let a = match spec {
        OperatorSpec::Named(name) => {
            check_random_name(name, field)?;
            if diagonal_only {
                ComplexMatrix::from_diagonal(random_vector(rng, dim).entries())
            } else {
                random_matrix(rng, dim, dim)
            }
        }
        OperatorSpec::Matrix { matrix } => {
            let rows: Vec<Vec<Complex64>> = matrix.iter().map(|r| r.iter().map(|c| c.value()).collect()).collect();
            let a = ComplexMatrix::from_rows(&rows).map_err(lib_error(field))?;
            if a.rows() != dim || a.cols() != dim {
                return Err(ConfigError::new(field, format!("expected a {dim}x{dim} matrix")));
            }
            a
        }
        OperatorSpec::Diagonal { diagonal } => {
            if diagonal.len() != dim {
                return Err(ConfigError::new(field, format!("expected {dim} diagonal entries")));
            }
            ComplexMatrix::from_diagonal(&diagonal.iter().map(|c| c.value()).collect::<Vec<_>>())
        }
        OperatorSpec::Character { character, site } => {
            let sys = cyclic.ok_or_else(|| ConfigError::new(field, "characters need the cyclic model"))?;
            if *site != 0 {
                return Err(ConfigError::new(field, "the cyclic model has no sites; drop \"site\""));
            }
            sys.character(*character).clone()
        }
        OperatorSpec::Cylinder { .. } => {
            return Err(ConfigError::new(field, "cylinder operators need the bernoulli model"));
        }
    };
    if diagonal_only && cyclic.is_some_and(|s| !s.in_algebra(&a)) {
        return Err(ConfigError::new(field, "operator must be diagonal (an element of the model's algebra)"));
    }
    Ok(a)
}

fn random_cylinder_operator(sys: &BernoulliShiftSystem, rng: &mut InstanceRng) -> CylinderOperator<Complex64> {
    let mut terms = vec![(0, 0, gaussian(rng))];
    for _ in 0..rng.random_range(1..=2) {
        terms.push((rng.random_range(0..=1), rng.random_range(1..sys.q()), gaussian(rng)));
    }
    sys.operator_from_terms(&terms)
}

fn cylinder_operator(
    spec: &OperatorSpec,
    sys: &BernoulliShiftSystem,
    rng: &mut InstanceRng,
    field: &str,
) -> Result<CylinderOperator<Complex64>, ConfigError> {
    match spec {
        OperatorSpec::Named(name) => {
            check_random_name(name, field)?;
            Ok(random_cylinder_operator(sys, rng))
        }
        OperatorSpec::Character { character, site } => {
            Ok(sys.character(*site, character.rem_euclid(sys.q() as i64) as u32))
        }
        OperatorSpec::Cylinder { cylinder } => {
            let terms: Vec<(i64, u32, Complex64)> =
                cylinder.iter().map(|&(s, k, re, im)| (s, k, Complex64::new(re, im))).collect();
            Ok(sys.operator_from_terms(&terms))
        }
        OperatorSpec::Matrix { .. } | OperatorSpec::Diagonal { .. } => {
            Err(ConfigError::new(field, "dense operators need a cyclic or spectral model"))
        }
    }
}

fn random_cylinder_probe(sys: &BernoulliShiftSystem, rng: &mut InstanceRng) -> CylinderVector<Complex64> {
    let mut v = CylinderVector::from_word(sys.word(&[]), gaussian(rng));
    for _ in 0..2 {
        let word = sys.word(&[(rng.random_range(0..=2), rng.random_range(1..sys.q())), (rng.random_range(0..=2), 1)]);
        v.add_term(word, gaussian(rng));
    }
    let norm = v.norm();
    v.scale(&Complex64::new(1.0 / norm, 0.0))
}

fn grid_or(config: &ExperimentConfig, default: Vec<u64>) -> Vec<u64> {
    config.n_grid.clone().unwrap_or(default)
}

fn partition_from(word: &[usize]) -> Result<PairPartition, ConfigError> {
    PairPartition::from_word(word).map_err(lib_error("partition"))
}

fn phases_note(u: &SpectralUnitary) -> String {
    let phases: Vec<String> =
        u.eigenspaces().iter().map(|e| format!("{} (x{})", e.phase(), e.multiplicity())).collect();
    format!("dimension {}, eigenphases {}", u.dim(), phases.join(", "))
}

// ---------------------------------------------------------------------------
// kinds

fn entangled_convergence(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let (u, cyclic) = matrix_model(config, rng)?;
    let word = config.partition.as_ref().ok_or_else(|| ConfigError::new("partition", "required for this kind"))?;
    let partition = partition_from(word)?;
    let specs = operator_specs(config, (2 * partition.k()).saturating_sub(1))?;
    let ops = specs
        .iter()
        .enumerate()
        .map(|(i, s)| matrix_operator(s, u.dim(), cyclic.as_ref(), false, rng, &format!("operators[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let probes: Vec<ComplexVector> =
        (0..config.probes.unwrap_or(5)).map(|_| random_unit_vector(rng, u.dim())).collect();
    let grid = grid_or(config, vec![4, 8, 16, 32, 64, 128]);
    let notes = vec![phases_note(&u), format!("partition {partition}")];
    let denominator = u.common_denominator();
    let checks = vec![mean_ergodic_check(&u, &probes, &grid)?];
    let inst = EntangledInstance::new(u, partition, ops).map_err(lib_error("operators"))?;
    let report = inst.convergence_report(&grid, &probes).map_err(lib_error("n_grid"))?;
    Ok((report, exact_when(divisible(&grid, denominator)), checks, notes))
}

/// Single-index baseline: `‖(1/N)Σ Uⁿx − E_1 x‖` against `‖Σ_{z≠1} c_N(z) E_z x‖`.
fn mean_ergodic_check(u: &SpectralUnitary, probes: &[ComplexVector], grid: &[u64]) -> Result<Check, ConfigError> {
    let e1 = u.mean_ergodic_projection();
    let mut gap: f64 = 0.0;
    for x in probes {
        let fixed = e1.apply(x);
        for &n in grid {
            let direct = u.cesaro_average_direct(x, n).map_err(lib_error("probes"))?.distance(&fixed);
            gap = gap.max((direct - u.cesaro_remainder_norm(x, n)).abs());
        }
    }
    Ok(Check {
        name: "mean ergodic baseline".into(),
        passed: gap <= 1e-12,
        detail: format!("direct and spectral remainders agree to {gap:.3e}"),
    })
}

fn zaz(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let (u, cyclic) = matrix_model(config, rng)?;
    let fixed = config.partition.as_ref().map(|w| partition_from(w)).transpose()?;
    if fixed.as_ref().is_some_and(|p| p.k() == 0) {
        return Err(ConfigError::new("partition", "needs at least one class"));
    }
    let classes = config.k.unwrap_or(2);
    if classes == 0 {
        return Err(ConfigError::new("k", "must be at least 1"));
    }
    let trials = if config.operators.is_some() { 1 } else { config.trials.unwrap_or(10) };
    let mut rows = Vec::new();
    for _ in 0..trials {
        let partition = match &fixed {
            Some(p) => p.clone(),
            None => partition_from(&random_pair_word(rng, classes))?,
        };
        let specs = operator_specs(config, 2 * partition.k() - 1)?;
        let ops = specs
            .iter()
            .enumerate()
            .map(|(i, s)| matrix_operator(s, u.dim(), cyclic.as_ref(), false, rng, &format!("operators[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = EntangledInstance::new(u.clone(), partition, ops).map_err(lib_error("operators"))?;
        for space in u.eigenspaces() {
            for x in space.basis() {
                let defect = inst.zaz_reduction_check(x, &space.phase()).map_err(lib_error("model"))?;
                rows.push((rows.len() as u64 + 1, defect));
            }
        }
    }
    let notes = vec![phases_note(&u), format!("{trials} trial(s); N column is the running check index")];
    let defaults = Tolerances { max_deviation: Some(ORACLE_TOLERANCE), ..Tolerances::default() };
    Ok((ConvergenceReport::new(rows, u.dim()), defaults, Vec::new(), notes))
}

fn oracle_equivalence(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let fixed = match &config.model {
        Some(spec) => match build_model(spec, rng)? {
            Built::Matrix { u, cyclic } => Some((u, cyclic)),
            Built::Bernoulli(_) => return Err(ConfigError::new("model", "needs a cyclic or spectral model")),
        },
        None => None,
    };
    let dim = config.dim.unwrap_or(4);
    let count = config.eigenvalues.unwrap_or(dim.min(3));
    if fixed.is_none() && (dim == 0 || count == 0 || count > dim) {
        return Err(ConfigError::new("eigenvalues", "need 1 <= eigenvalues <= dim"));
    }
    let fixed_partition = config.partition.as_ref().map(|w| partition_from(w)).transpose()?;
    let classes = config.k.unwrap_or(2);
    let grid = grid_or(config, (1..=20).collect());
    let trials = config.trials.unwrap_or(25);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (u, cyclic) = match &fixed {
            Some((u, c)) => (u.clone(), c.clone()),
            None => (random_spectral_unitary(rng, dim, count, PhaseDraw::Float), None),
        };
        let partition = match &fixed_partition {
            Some(p) => p.clone(),
            None => partition_from(&random_pair_word(rng, classes))?,
        };
        let specs = operator_specs(config, (2 * partition.k()).saturating_sub(1))?;
        let ops = specs
            .iter()
            .enumerate()
            .map(|(i, s)| matrix_operator(s, u.dim(), cyclic.as_ref(), false, rng, &format!("operators[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let inst = EntangledInstance::new(u, partition, ops).map_err(lib_error("operators"))?;
        let mut worst: f64 = 0.0;
        for &n in &grid {
            let t = inst.average_time_domain(n).map_err(lib_error("n_grid"))?;
            let s = inst.average_spectral(n).map_err(lib_error("n_grid"))?;
            worst = worst.max(t.frobenius_distance(&s));
        }
        rows.push((trial as u64 + 1, worst));
    }
    let notes = vec![format!(
        "{trials} trial(s); N column is the trial index, deviation the worst Frobenius gap over the grid"
    )];
    let defaults = Tolerances { max_deviation: Some(ORACLE_TOLERANCE), ..Tolerances::default() };
    Ok((ConvergenceReport::new(rows, 0), defaults, Vec::new(), notes))
}

fn diagonal_model(config: &ExperimentConfig) -> Result<Built, ConfigError> {
    // the dense generator is not needed for these models, so no seed is consumed
    match require_model(config)? {
        ModelSpec::Cyclic { m } => {
            let sys = CyclicRotationSystem::new(*m).map_err(lib_error("model"))?;
            Ok(Built::Matrix { u: sys.unitary().clone(), cyclic: Some(sys) })
        }
        ModelSpec::Bernoulli { q } => Ok(Built::Bernoulli(BernoulliShiftSystem::new(*q).map_err(lib_error("model"))?)),
        ModelSpec::Spectral { .. } => Err(ConfigError::new(
            "model",
            "diagonal averages need an operator algebra: use the cyclic or bernoulli model",
        )),
    }
}

fn cyclic_tensor(
    config: &ExperimentConfig,
    sys: CyclicRotationSystem,
) -> Result<TensorDynamics<CyclicRotationSystem>, ConfigError> {
    let (m1, m2) = config.exponents();
    TensorDynamics::new(sys, m1, m2).map_err(lib_error("m1"))
}

fn bernoulli_tensor(
    config: &ExperimentConfig,
    sys: BernoulliShiftSystem,
) -> Result<TensorDynamics<BernoulliShiftSystem>, ConfigError> {
    let (m1, m2) = config.exponents();
    TensorDynamics::new(sys, m1, m2).map_err(lib_error("m1"))
}

/// Each `E_z` of the rotation is spanned by `V_z Ω`, with `(V_z)* Ω` in `E_z̄`.
fn eigenspace_check(sys: &CyclicRotationSystem) -> Check {
    let omega = sys.omega();
    let u = sys.unitary();
    let mut gap: f64 = 0.0;
    for p in 0..sys.m() as i64 {
        let z = sys.phase(p);
        let v = sys.generator(p).apply(&omega);
        gap = gap.max(u.eig_projection(&z).apply(&v).distance(&v)).max((v.norm() - 1.0).abs());
        let w = sys.generator(p).adjoint().apply(&omega);
        gap = gap.max(u.eig_projection(&z.conj()).apply(&w).distance(&w));
    }
    Check {
        name: "eigenspaces spanned by generators".into(),
        passed: gap <= EXACT_TOLERANCE,
        detail: format!("max defect {gap:.3e} over {} phases", sys.m()),
    }
}

fn isometry_check(td: &TensorDynamics<CyclicRotationSystem>) -> Check {
    match td.build_partial_isometry() {
        Ok(_) => {
            Check { name: "V*V = E1".into(), passed: true, detail: format!("|Sigma| = {}", td.sigma_pairs().len()) }
        }
        Err(e) => Check { name: "V*V = E1".into(), passed: false, detail: e.to_string() },
    }
}

fn cyclic_grid(config: &ExperimentConfig, m: usize) -> Vec<u64> {
    grid_or(config, (1..=8).map(|j| j * m as u64).collect())
}

fn bernoulli_grid(config: &ExperimentConfig) -> Vec<u64> {
    grid_or(config, vec![8, 16, 32, 64, 128, 256, 512])
}

fn mixing_note() -> String {
    "Bernoulli vector averages are sums of orthonormal words and decay like N^(-1/2); \
     no rate is asserted unless tolerances.rate_constant is set"
        .into()
}

fn diag_vector(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let specs = operator_specs(config, 2)?;
    match diagonal_model(config)? {
        Built::Matrix { cyclic, .. } => {
            let sys = cyclic.expect("diagonal models are cyclic here");
            let m = sys.m();
            let a = matrix_operator(&specs[0], m, Some(&sys), true, rng, "operators[0]")?;
            let b = matrix_operator(&specs[1], m, Some(&sys), true, rng, "operators[1]")?;
            let td = cyclic_tensor(config, sys)?;
            let grid = cyclic_grid(config, m);
            let limit = td.diagonal_limit(&a, &b.apply(&td.base().omega()));
            let rows = grid.iter().map(|&n| (n, td.diagonal_cesaro_vector(&a, &b, n).distance(&limit))).collect();
            let checks = vec![eigenspace_check(td.base()), isometry_check(&td)];
            let notes = vec![format!("cyclic m = {m}, (m1, m2) = {:?}", config.exponents())];
            Ok((ConvergenceReport::new(rows, 1), exact_when(divisible(&grid, Some(m as u64))), checks, notes))
        }
        Built::Bernoulli(sys) => {
            let a = cylinder_operator(&specs[0], &sys, rng, "operators[0]")?;
            let b = cylinder_operator(&specs[1], &sys, rng, "operators[1]")?;
            let td = bernoulli_tensor(config, sys)?;
            let grid = bernoulli_grid(config);
            let b_omega = sys.act(&b, &sys.omega());
            let limit = td.diagonal_limit(&a, &b_omega);
            let rows = grid.iter().map(|&n| (n, sys.distance(&td.diagonal_cesaro_vector(&a, &b, n), &limit))).collect();
            let notes = vec![
                format!(
                    "bernoulli q = {}, (m1, m2) = {:?}, combined width {}",
                    sys.q(),
                    config.exponents(),
                    combined_width(&[&a, &b])
                ),
                mixing_note(),
            ];
            Ok((ConvergenceReport::new(rows, 1), Tolerances::default(), Vec::new(), notes))
        }
    }
}

fn diag_operator(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let specs = operator_specs(config, 1)?;
    let probe_count = config.probes.unwrap_or(10);
    match diagonal_model(config)? {
        Built::Matrix { cyclic, .. } => {
            let sys = cyclic.expect("diagonal models are cyclic here");
            let m = sys.m();
            let a = matrix_operator(&specs[0], m, Some(&sys), true, rng, "operators[0]")?;
            let probes: Vec<ComplexVector> = (0..probe_count).map(|_| random_unit_vector(rng, m)).collect();
            let td = cyclic_tensor(config, sys)?;
            let grid = cyclic_grid(config, m);
            let report = td.diagonal_cesaro_operator(&a, &grid, &probes);
            let spectral = td.spectral_limit_operator(&a);
            let gap =
                probes.iter().map(|xi| spectral.apply(xi).distance(&td.diagonal_limit(&a, xi))).fold(0.0, f64::max);
            let checks = vec![
                eigenspace_check(td.base()),
                isometry_check(&td),
                Check {
                    name: "spectral limit operator".into(),
                    passed: gap <= EXACT_TOLERANCE,
                    detail: format!("max |sum E_(zw) A E_w xi - V(A Omega x xi)| = {gap:.3e}"),
                },
            ];
            let notes = vec![format!("cyclic m = {m}, (m1, m2) = {:?}", config.exponents())];
            Ok((report, exact_when(divisible(&grid, Some(m as u64))), checks, notes))
        }
        Built::Bernoulli(sys) => {
            let a = cylinder_operator(&specs[0], &sys, rng, "operators[0]")?;
            let probes: Vec<_> = (0..probe_count).map(|_| random_cylinder_probe(&sys, rng)).collect();
            let td = bernoulli_tensor(config, sys)?;
            let grid = bernoulli_grid(config);
            let report = td.diagonal_cesaro_operator(&a, &grid, &probes);
            let notes = vec![format!("bernoulli q = {}, (m1, m2) = {:?}", sys.q(), config.exponents()), mixing_note()];
            Ok((report, Tolerances::default(), Vec::new(), notes))
        }
    }
}

fn triple(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let specs = operator_specs(config, 3)?;
    match diagonal_model(config)? {
        Built::Matrix { cyclic, .. } => {
            let sys = cyclic.expect("diagonal models are cyclic here");
            let m = sys.m();
            let ops = specs
                .iter()
                .enumerate()
                .map(|(i, s)| matrix_operator(s, m, Some(&sys), true, rng, &format!("operators[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let td = cyclic_tensor(config, sys)?;
            let grid = cyclic_grid(config, m);
            let limit = td.triple_correlation_limit(&ops[0], &ops[1], &ops[2]);
            let rows = grid
                .iter()
                .map(|&n| (n, (td.triple_correlation(&ops[0], &ops[1], &ops[2], n) - limit).norm()))
                .collect();
            let spectral = td.triple_correlation_spectral(&ops[0], &ops[1], &ops[2]);
            let direct = td.triple_correlation(&ops[0], &ops[1], &ops[2], 3 * (m * m) as u64);
            let gap = (limit - spectral).norm().max((limit - direct).norm());
            let checks = vec![Check {
                name: "limit three ways".into(),
                passed: gap <= EXACT_TOLERANCE,
                detail: format!("V-formula, spectral sum and N = 3m^2 average agree to {gap:.3e}"),
            }];
            let notes = vec![format!("cyclic m = {m}, (m1, m2) = {:?}, limit {limit:.6}", config.exponents())];
            Ok((ConvergenceReport::new(rows, 1), exact_when(divisible(&grid, Some(m as u64))), checks, notes))
        }
        Built::Bernoulli(sys) => {
            let ops = specs
                .iter()
                .enumerate()
                .map(|(i, s)| cylinder_operator(s, &sys, rng, &format!("operators[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let td = bernoulli_tensor(config, sys)?;
            let grid = bernoulli_grid(config);
            let limit = td.triple_correlation_limit(&ops[0], &ops[1], &ops[2]);
            let rows = grid
                .iter()
                .map(|&n| (n, (td.triple_correlation(&ops[0], &ops[1], &ops[2], n) - limit).norm()))
                .collect();
            let width = combined_width(&[&ops[0], &ops[1], &ops[2]]) as f64;
            let mass: f64 = ops.iter().map(|a| a.mass()).product();
            let defaults = Tolerances { rate_constant: Some(4.0 * width * mass), ..Tolerances::default() };
            let notes = vec![format!(
                "bernoulli q = {}, (m1, m2) = {:?}, combined width {width}, limit {limit:.6}",
                sys.q(),
                config.exponents()
            )];
            Ok((ConvergenceReport::new(rows, 1), defaults, Vec::new(), notes))
        }
    }
}

fn general_exponent(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let specs = operator_specs(config, 2)?;
    match diagonal_model(config)? {
        Built::Matrix { cyclic, .. } => {
            let sys = cyclic.expect("diagonal models are cyclic here");
            let m = sys.m();
            let a = matrix_operator(&specs[0], m, Some(&sys), true, rng, "operators[0]")?;
            let b = matrix_operator(&specs[1], m, Some(&sys), true, rng, "operators[1]")?;
            let product = sys.state(&a) * sys.state(&b);
            let td = cyclic_tensor(config, sys)?;
            let grid = cyclic_grid(config, m);
            let report = td.general_exponent_report(&a, &b, &grid);
            let (_, limit) = td.general_exponent_average(&a, &b, grid[0]);
            let notes = vec![
                format!("cyclic m = {m}, (m1, m2) = {:?}", config.exponents()),
                format!("spectral sum {limit:.6}, product state {product:.6}, gap {:.3e}", (limit - product).norm()),
            ];
            Ok((report, exact_when(divisible(&grid, Some(m as u64))), Vec::new(), notes))
        }
        Built::Bernoulli(sys) => {
            let a = cylinder_operator(&specs[0], &sys, rng, "operators[0]")?;
            let b = cylinder_operator(&specs[1], &sys, rng, "operators[1]")?;
            let td = bernoulli_tensor(config, sys)?;
            let grid = bernoulli_grid(config);
            let report = td.general_exponent_report(&a, &b, &grid);
            let width = combined_width(&[&a, &b]) as f64;
            let defaults =
                Tolerances { rate_constant: Some(2.0 * width * a.mass() * b.mass()), ..Tolerances::default() };
            let (_, limit) = td.general_exponent_average(&a, &b, grid[0]);
            let notes = vec![format!(
                "bernoulli q = {}, (m1, m2) = {:?}, combined width {width}, limit {limit:.6}",
                sys.q(),
                config.exponents()
            )];
            Ok((report, defaults, Vec::new(), notes))
        }
    }
}

fn lemma_checks(config: &ExperimentConfig, rng: &mut InstanceRng) -> KindResult {
    let trials = config.trials.unwrap_or(100);
    let mut rows = Vec::with_capacity(trials);
    let mut min_psd = f64::INFINITY;
    let mut violations = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for t in 0..trials {
        let count = rng.random_range(1..=6);
        let dim = rng.random_range(1..=6);
        let batch: Vec<ComplexMatrix> = (0..count).map(|_| random_matrix(rng, dim, dim)).collect();
        let psd = psd_average_bound_defect(&batch).map_err(lib_error("trials"))?;
        min_psd = min_psd.min(psd);

        let n = rng.random_range(1..=60);
        let m = rng.random_range(1..=10);
        let seq: Vec<Complex64> = (0..n + m).map(|_| gaussian(rng)).collect();
        let defect = double_average_defect(&seq, n, m).map_err(lib_error("trials"))?;
        let bound = double_average_bound(&seq, n, m).map_err(lib_error("trials"))?;
        if defect > bound {
            violations += 1;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(defect / bound);
        }
        rows.push((t as u64 + 1, (-psd).max(0.0) + (defect - bound).max(0.0)));
    }
    let checks = vec![
        Check {
            name: "operator convexity".into(),
            passed: min_psd >= -EXACT_TOLERANCE,
            detail: format!("smallest eigenvalue of the gap {min_psd:.3e}"),
        },
        Check {
            name: "double-average bound".into(),
            passed: violations == 0,
            detail: format!("{violations} violation(s), largest defect/bound ratio {worst_ratio:.3}"),
        },
    ];
    let notes = vec![format!("{trials} trial(s); deviation is the total violation of both bounds")];
    let defaults = Tolerances { max_deviation: Some(EXACT_TOLERANCE), ..Tolerances::default() };
    Ok((ConvergenceReport::new(rows, 0), defaults, checks, notes))
}
