use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::models::DynamicalSystem;
use crate::spectral::{Phase, SpectralUnitary};

/// Rotation `x ↦ x + 1` on `ℤ_m` acting on `ℓ²(ℤ_m)` with the uniform state.
///
/// `U e_x = e_{x+1}`. The algebra is the diagonal matrices, spanned by the
/// characters `V_j = diag(e^{2πijx/m})`, and it is its own commutant.
#[derive(Clone, Debug)]
pub struct CyclicRotationSystem {
    m: usize,
    unitary: SpectralUnitary,
    omega: ComplexVector,
    characters: Vec<ComplexMatrix>,
}

fn root_of_unity(num: i64, m: usize) -> Complex64 {
    let r = num.rem_euclid(m as i64) as u64;
    Phase::rational(r as i64, m as u64).expect("m >= 1").to_complex()
}

impl CyclicRotationSystem {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidModel("cyclic order m must be at least 1".into()));
        }
        let scale = 1.0 / (m as f64).sqrt();
        let fourier =
            |p: usize| ComplexVector::new((0..m).map(|x| root_of_unity(-((p * x) as i64), m) * scale).collect());
        let pairs =
            (0..m).map(|p| Ok((Phase::rational(p as i64, m as u64)?, vec![fourier(p)]))).collect::<Result<Vec<_>>>()?;
        let unitary = SpectralUnitary::from_eigensystem(pairs)?;
        let omega = ComplexVector::new(vec![Complex64::new(scale, 0.0); m]);
        let characters = (0..m)
            .map(|j| {
                let diag: Vec<Complex64> = (0..m).map(|x| root_of_unity((j * x) as i64, m)).collect();
                ComplexMatrix::from_diagonal(&diag)
            })
            .collect();
        Ok(Self { m, unitary, omega, characters })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn unitary(&self) -> &SpectralUnitary {
        &self.unitary
    }

    /// The eigenphase `p/m`.
    pub fn phase(&self, p: i64) -> Phase {
        Phase::rational(p, self.m as u64).expect("m >= 1")
    }

    /// `V_j`, multiplication by `x ↦ e^{2πijx/m}`; `j` is taken mod `m`.
    pub fn character(&self, j: i64) -> &ComplexMatrix {
        &self.characters[j.rem_euclid(self.m as i64) as usize]
    }

    /// The unitary spanning `M_z` for `z = e^{2πip/m}`, meaning
    /// `U V U* = z V`. It is the character `V_{−p}`.
    pub fn generator(&self, p: i64) -> &ComplexMatrix {
        self.character(-p)
    }

    /// `V_zΩ` for `z = e^{2πip/m}`, the unit eigenvector of `U` at phase `p/m`.
    pub fn fourier_vector(&self, p: i64) -> ComplexVector {
        self.generator(p).apply(&self.omega)
    }

    /// `U` as an explicit permutation matrix.
    pub fn shift_matrix(&self) -> ComplexMatrix {
        let m = self.m;
        ComplexMatrix::from_fn(
            m,
            m,
            |i, j| {
                if i == (j + 1) % m {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            },
        )
    }

    /// `true` when `a` lies in `M = M′`, i.e. is diagonal.
    pub fn in_algebra(&self, a: &ComplexMatrix) -> bool {
        a.rows() == self.m
            && a.cols() == self.m
            && (0..self.m).all(|i| (0..self.m).all(|j| i == j || a.get(i, j) == Complex64::new(0.0, 0.0)))
    }

    /// `Ad_{Uⁿ}(a) = Uⁿ a U^{−n}`.
    pub fn ad(&self, a: &ComplexMatrix, n: i64) -> ComplexMatrix {
        let m = self.m as i64;
        ComplexMatrix::from_fn(self.m, self.m, |i, j| {
            let si = (i as i64 - n).rem_euclid(m) as usize;
            let sj = (j as i64 - n).rem_euclid(m) as usize;
            a.get(si, sj)
        })
    }

    /// Numerators `p ∈ 0..m` of the phases `z` with `z^d = 1`.
    pub fn roots_of_power(&self, d: u64) -> Vec<usize> {
        let m = self.m as u64;
        (0..self.m).filter(|&p| (p as u64 * d).is_multiple_of(m)).collect()
    }
}

impl DynamicalSystem for CyclicRotationSystem {
    type Vector = ComplexVector;
    type Operator = ComplexMatrix;

    fn omega(&self) -> ComplexVector {
        self.omega.clone()
    }

    fn zero_vector(&self) -> ComplexVector {
        ComplexVector::zeros(self.m)
    }

    fn identity_operator(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.m)
    }

    fn evolve(&self, v: &ComplexVector, n: i64) -> ComplexVector {
        let m = self.m as i64;
        let src = v.entries();
        ComplexVector::new((0..m).map(|x| src[(x - n).rem_euclid(m) as usize]).collect())
    }

    fn act(&self, op: &ComplexMatrix, v: &ComplexVector) -> ComplexVector {
        op.apply(v)
    }

    fn adjoint(&self, op: &ComplexMatrix) -> ComplexMatrix {
        op.adjoint()
    }

    fn inner(&self, a: &ComplexVector, b: &ComplexVector) -> Complex64 {
        a.inner(b)
    }

    fn axpy(&self, acc: &mut ComplexVector, c: Complex64, v: &ComplexVector) {
        acc.axpy(c, v);
    }

    fn point_spectrum(&self) -> Vec<Phase> {
        self.unitary.point_spectrum()
    }

    fn power_invariant_part(&self, d: u64, v: &ComplexVector) -> ComplexVector {
        let mut out = self.zero_vector();
        for p in self.roots_of_power(d) {
            let f = self.fourier_vector(p as i64);
            out.axpy(v.inner(&f), &f);
        }
        out
    }

    fn diagonal_limit_map(&self, m1: u64, m2: u64, x: &ComplexVector, y: &ComplexVector) -> ComplexVector {
        let m = self.m as u64;
        let mut out = self.zero_vector();
        for p in 0..m {
            let cx = x.inner(&self.fourier_vector(p as i64));
            if cx == Complex64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..m {
                if !(m1 % m * p + m2 % m * l).is_multiple_of(m) {
                    continue;
                }
                let cy = y.inner(&self.fourier_vector(l as i64));
                let image = self.generator(p as i64).apply(&self.generator(l as i64).apply(&self.omega));
                out.axpy(cx * cy, &image);
            }
        }
        out
    }

    fn spectral_unitary(&self) -> Option<&SpectralUnitary> {
        Some(&self.unitary)
    }
}
