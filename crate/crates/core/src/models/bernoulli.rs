//! The Bernoulli shift on `ℤ_q^ℤ` with the uniform product measure.
//!
//! `L²` has the orthonormal basis of finite character products
//! `Π_s χ_{k_s}(x_s)`, one per [`CylinderWord`]. Multiplication by a
//! character adds indices mod `q`, and `U` translates sites by `+1`. Nothing
//! is ever materialized beyond the finitely many words a vector touches.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::models::DynamicalSystem;
use crate::spectral::{Phase, SpectralUnitary};

/// Complex numbers with exact rational parts.
pub type ExactComplex = Complex<Rational64>;

/// Scalars a cylinder vector can carry.
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(&self) -> Self;
    fn to_complex64(&self) -> Complex64;
}

impl Coefficient for Complex64 {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_complex64(&self) -> Complex64 {
        *self
    }
}

impl Coefficient for ExactComplex {
    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn to_complex64(&self) -> Complex64 {
        let f = |r: &Rational64| r.to_f64().expect("rational fits in f64");
        Complex64::new(f(&self.re), f(&self.im))
    }
}

/// A finite character product: site ↦ index in `1..q`. Sites carrying the
/// trivial character are absent, so the empty word is the constant `1 = Ω`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylinderWord {
    sites: BTreeMap<i64, u32>,
}

impl CylinderWord {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Multiplies the given characters together; indices are reduced mod `q`.
    pub fn from_sites(sites: &[(i64, u32)], q: u32) -> Self {
        let mut word = Self::empty();
        for &(s, k) in sites {
            word.add_at(s, k, q);
        }
        word
    }

    fn add_at(&mut self, site: i64, index: u32, q: u32) {
        let current = self.sites.get(&site).copied().unwrap_or(0);
        let next = ((current as u64 + index as u64) % q as u64) as u32;
        if next == 0 {
            self.sites.remove(&site);
        } else {
            self.sites.insert(site, next);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn index_at(&self, site: i64) -> u32 {
        self.sites.get(&site).copied().unwrap_or(0)
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.sites.iter().map(|(&s, &k)| (s, k))
    }

    /// Smallest and largest occupied site.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.sites.keys().next()?, *self.sites.keys().next_back()?))
    }

    /// Pointwise product of the two character products.
    pub fn multiply(&self, other: &Self, q: u32) -> Self {
        let mut out = self.clone();
        for (s, k) in other.sites() {
            out.add_at(s, k, q);
        }
        out
    }

    /// Complex conjugate, `k ↦ q − k` at every site.
    pub fn conj(&self, q: u32) -> Self {
        Self { sites: self.sites.iter().map(|(&s, &k)| (s, q - k)).collect() }
    }

    pub fn translate(&self, n: i64) -> Self {
        Self { sites: self.sites.iter().map(|(&s, &k)| (s + n, k)).collect() }
    }
}

fn merge_support(acc: Option<(i64, i64)>, next: Option<(i64, i64)>) -> Option<(i64, i64)> {
    match (acc, next) {
        (None, x) | (x, None) => x,
        (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
    }
}

/// A finite combination of cylinder words.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderVector<T> {
    terms: BTreeMap<CylinderWord, T>,
}

impl<T: Coefficient> CylinderVector<T> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    /// `Ω`, the constant function `1`.
    pub fn omega() -> Self {
        Self::from_word(CylinderWord::empty(), T::one())
    }

    pub fn from_word(word: CylinderWord, c: T) -> Self {
        let mut v = Self::zero();
        v.add_term(word, c);
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CylinderWord, &T)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &CylinderWord) -> T {
        self.terms.get(word).cloned().unwrap_or_else(T::zero)
    }

    /// Adds `c · word`, dropping coefficients that cancel to zero.
    pub fn add_term(&mut self, word: CylinderWord, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(existing) => {
                *existing = existing.clone() + c;
                if existing.is_zero() {
                    self.terms.remove(&word);
                }
            }
            None => {
                self.terms.insert(word, c);
            }
        }
    }

    /// `self += c · other`
    pub fn axpy(&mut self, c: &T, other: &Self) {
        for (w, d) in &other.terms {
            self.add_term(w.clone(), c.clone() * d.clone());
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero();
        out.axpy(c, self);
        out
    }

    /// `⟨self, other⟩ = Σ_w a_w · conj(b_w)`.
    pub fn inner(&self, other: &Self) -> T {
        let (small, large, flip) =
            if self.terms.len() <= other.terms.len() { (self, other, false) } else { (other, self, true) };
        let mut acc = T::zero();
        for (w, a) in &small.terms {
            if let Some(b) = large.terms.get(w) {
                let (x, y) = if flip { (b, a) } else { (a, b) };
                acc = acc + x.clone() * y.conj();
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_complex64().norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn translate(&self, n: i64) -> Self {
        Self { terms: self.terms.iter().map(|(w, c)| (w.translate(n), c.clone())).collect() }
    }

    /// Smallest and largest site touched by any word.
    pub fn support(&self) -> Option<(i64, i64)> {
        self.terms.keys().map(CylinderWord::support).fold(None, merge_support)
    }

    pub fn to_complex64(&self) -> CylinderVector<Complex64> {
        CylinderVector { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.to_complex64())).collect() }
    }
}

/// Multiplication by the cylinder function whose character expansion is
/// `symbol`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderOperator<T> {
    symbol: CylinderVector<T>,
}

impl<T: Coefficient> CylinderOperator<T> {
    pub fn identity() -> Self {
        Self { symbol: CylinderVector::omega() }
    }

    pub fn from_symbol(symbol: CylinderVector<T>) -> Self {
        Self { symbol }
    }

    pub fn symbol(&self) -> &CylinderVector<T> {
        &self.symbol
    }

    /// `ω(A) = ⟨AΩ, Ω⟩`, the coefficient of the empty word.
    pub fn state(&self) -> T {
        self.symbol.coefficient(&CylinderWord::empty())
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        self.symbol.support()
    }

    /// Number of sites from the leftmost to the rightmost occupied one; `0`
    /// for a constant.
    pub fn width(&self) -> u64 {
        self.support().map_or(0, |(a, b)| (b - a + 1) as u64)
    }

    /// `Σ |c_w|`, an upper bound for the operator norm.
    pub fn mass(&self) -> f64 {
        self.symbol.terms().map(|(_, c)| c.to_complex64().norm()).sum()
    }

    pub fn to_complex64(&self) -> CylinderOperator<Complex64> {
        CylinderOperator { symbol: self.symbol.to_complex64() }
    }
}

/// Width of the smallest interval covering the supports of all `ops`.
pub fn combined_width<T: Coefficient>(ops: &[&CylinderOperator<T>]) -> u64 {
    ops.iter().map(|a| a.support()).fold(None, merge_support).map_or(0, |(a, b)| (b - a + 1) as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BernoulliShiftSystem {
    q: u32,
}

impl BernoulliShiftSystem {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidModel(format!("Bernoulli alphabet size must be at least 2, got {q}")));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn word(&self, sites: &[(i64, u32)]) -> CylinderWord {
        CylinderWord::from_sites(sites, self.q)
    }

    /// `χ_{k@s}`: multiplication by `x ↦ e^{2πi k x_s / q}`. Index `0` gives
    /// the identity.
    pub fn character<T: Coefficient>(&self, site: i64, index: u32) -> CylinderOperator<T> {
        CylinderOperator::from_symbol(CylinderVector::from_word(self.word(&[(site, index)]), T::one()))
    }

    /// `Σ c · χ_{k@s}` over `(s, k, c)`.
    pub fn operator_from_terms<T: Coefficient>(&self, terms: &[(i64, u32, T)]) -> CylinderOperator<T> {
        let mut symbol = CylinderVector::zero();
        for (s, k, c) in terms {
            symbol.add_term(self.word(&[(*s, *k)]), c.clone());
        }
        CylinderOperator::from_symbol(symbol)
    }

    /// `Uⁿ v`.
    pub fn apply_u<T: Coefficient>(&self, v: &CylinderVector<T>, n: i64) -> CylinderVector<T> {
        v.translate(n)
    }

    /// `A v` for the multiplication operator `A`.
    pub fn multiply<T: Coefficient>(&self, op: &CylinderOperator<T>, v: &CylinderVector<T>) -> CylinderVector<T> {
        let mut out = CylinderVector::zero();
        for (a, c) in op.symbol.terms() {
            for (w, d) in v.terms() {
                out.add_term(a.multiply(w, self.q), c.clone() * d.clone());
            }
        }
        out
    }

    /// `A B`.
    pub fn compose<T: Coefficient>(&self, a: &CylinderOperator<T>, b: &CylinderOperator<T>) -> CylinderOperator<T> {
        CylinderOperator::from_symbol(self.multiply(a, &b.symbol))
    }

    /// `A*`, multiplication by the complex-conjugate function.
    pub fn star<T: Coefficient>(&self, a: &CylinderOperator<T>) -> CylinderOperator<T> {
        let mut symbol = CylinderVector::zero();
        for (w, c) in a.symbol.terms() {
            symbol.add_term(w.conj(self.q), c.conj());
        }
        CylinderOperator::from_symbol(symbol)
    }

    /// `αⁿ(A) = Uⁿ A U^{−n}`, the operator with every site moved by `n`.
    pub fn alpha<T: Coefficient>(&self, a: &CylinderOperator<T>, n: i64) -> CylinderOperator<T> {
        CylinderOperator::from_symbol(a.symbol.translate(n))
    }
}

impl DynamicalSystem for BernoulliShiftSystem {
    type Vector = CylinderVector<Complex64>;
    type Operator = CylinderOperator<Complex64>;

    fn omega(&self) -> Self::Vector {
        CylinderVector::omega()
    }

    fn zero_vector(&self) -> Self::Vector {
        CylinderVector::zero()
    }

    fn identity_operator(&self) -> Self::Operator {
        CylinderOperator::identity()
    }

    fn evolve(&self, v: &Self::Vector, n: i64) -> Self::Vector {
        self.apply_u(v, n)
    }

    fn act(&self, op: &Self::Operator, v: &Self::Vector) -> Self::Vector {
        self.multiply(op, v)
    }

    fn adjoint(&self, op: &Self::Operator) -> Self::Operator {
        self.star(op)
    }

    fn inner(&self, a: &Self::Vector, b: &Self::Vector) -> Complex64 {
        a.inner(b)
    }

    fn axpy(&self, acc: &mut Self::Vector, c: Complex64, v: &Self::Vector) {
        acc.axpy(&c, v);
    }

    /// Only `1`: the sole invariant vectors are multiples of `Ω`.
    fn point_spectrum(&self) -> Vec<Phase> {
        vec![Phase::ZERO]
    }

    fn power_invariant_part(&self, _d: u64, v: &Self::Vector) -> Self::Vector {
        CylinderVector::from_word(CylinderWord::empty(), v.coefficient(&CylinderWord::empty()))
    }

    fn diagonal_limit_map(&self, _m1: u64, _m2: u64, x: &Self::Vector, y: &Self::Vector) -> Self::Vector {
        let empty = CylinderWord::empty();
        CylinderVector::from_word(empty.clone(), x.coefficient(&empty) * y.coefficient(&empty))
    }

    fn spectral_unitary(&self) -> Option<&SpectralUnitary> {
        None
    }
}
