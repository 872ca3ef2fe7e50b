use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used to compare float phases, in turns.
pub const PHASE_TOLERANCE: f64 = 1e-12;

/// A point `e^{2πi t}` of the unit circle, stored in turns `t ∈ [0, 1)`.
///
/// Rational phases are kept reduced with `0 ≤ num < den`; arithmetic between
/// two rational phases stays exact. Anything touching a float phase yields a
/// float phase.
#[derive(Clone, Copy, Debug)]
pub enum Phase {
    Rational { num: u64, den: u64 },
    Float(f64),
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn wrap_turns(t: f64) -> f64 {
    let w = t.rem_euclid(1.0);
    if w >= 1.0 - PHASE_TOLERANCE || w <= PHASE_TOLERANCE {
        0.0
    } else {
        w
    }
}

impl Phase {
    pub const ZERO: Phase = Phase::Rational { num: 0, den: 1 };

    /// `e^{2πi p/q}`, reduced to lowest terms.
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidPhase(format!("{p}/0")));
        }
        let num = (p as i128).rem_euclid(q as i128) as u128;
        Ok(Self::reduced(num, q as u128))
    }

    fn reduced(num: u128, den: u128) -> Self {
        let num = num % den;
        let g = gcd(num, den);
        let g = if g == 0 { den } else { g };
        let (num, den) = if num == 0 { (0, 1) } else { (num / g, den / g) };
        Phase::Rational { num: num as u64, den: den as u64 }
    }

    /// `e^{2πi t}` from float turns; wrapped into `[0, 1)`.
    pub fn turns(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidPhase(t.to_string()));
        }
        Ok(Phase::Float(wrap_turns(t)))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Phase::Rational { .. })
    }

    /// Denominator of a rational phase.
    pub fn denominator(&self) -> Option<u64> {
        match *self {
            Phase::Rational { den, .. } => Some(den),
            Phase::Float(_) => None,
        }
    }

    pub fn as_turns(&self) -> f64 {
        match *self {
            Phase::Rational { num, den } => num as f64 / den as f64,
            Phase::Float(t) => t,
        }
    }

    /// Whether this is the eigenvalue 1.
    pub fn is_one(&self) -> bool {
        match *self {
            Phase::Rational { num, .. } => num == 0,
            Phase::Float(t) => t == 0.0,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            Phase::Rational { num, den } => match (num, den) {
                (0, _) => Complex64::new(1.0, 0.0),
                (1, 2) => Complex64::new(-1.0, 0.0),
                (1, 4) => Complex64::new(0.0, 1.0),
                (3, 4) => Complex64::new(0.0, -1.0),
                _ => Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64),
            },
            Phase::Float(t) => Complex64::from_polar(1.0, 2.0 * PI * t),
        }
    }

    /// Product of the two circle points.
    pub fn add(&self, other: &Phase) -> Phase {
        match (*self, *other) {
            (Phase::Rational { num: a, den: b }, Phase::Rational { num: c, den: d }) => {
                let (b, d) = (b as u128, d as u128);
                Self::reduced(a as u128 * d + c as u128 * b, b * d)
            }
            _ => Phase::Float(wrap_turns(self.as_turns() + other.as_turns())),
        }
    }

    /// Complex conjugate (the inverse on the circle).
    pub fn conj(&self) -> Phase {
        match *self {
            Phase::Rational { num, den } => Self::reduced((den - num) as u128, den as u128),
            Phase::Float(t) => Phase::Float(wrap_turns(-t)),
        }
    }

    /// The `n`-th power, `n` may be negative.
    pub fn pow(&self, n: i64) -> Phase {
        match *self {
            Phase::Rational { num, den } => {
                let r = (num as i128 * n as i128).rem_euclid(den as i128);
                Self::reduced(r as u128, den as u128)
            }
            Phase::Float(t) => Phase::Float(wrap_turns(t * n as f64)),
        }
    }

    /// Circle distance in turns, in `[0, 1/2]`.
    pub fn distance(&self, other: &Phase) -> f64 {
        let d = (self.as_turns() - other.as_turns()).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    /// Equality: exact between rationals, within [`PHASE_TOLERANCE`] otherwise.
    pub fn same(&self, other: &Phase) -> bool {
        match (*self, *other) {
            (Phase::Rational { num: a, den: b }, Phase::Rational { num: c, den: d }) => a == c && b == d,
            _ => self.distance(other) <= PHASE_TOLERANCE,
        }
    }

    /// Ordering by turns, for sorting spectra.
    pub fn cmp_turns(&self, other: &Phase) -> Ordering {
        self.as_turns().total_cmp(&other.as_turns())
    }

    /// `(n · t) mod 2`, exact before the final division for rationals.
    fn half_turn_multiple(&self, n: u64) -> f64 {
        match *self {
            Phase::Rational { num, den } => {
                let r = (num as u128 * n as u128) % (2 * den as u128);
                r as f64 / den as f64
            }
            Phase::Float(t) => (t * n as f64).rem_euclid(2.0),
        }
    }
}

impl PartialEq for Phase {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Phase::Rational { num, den } => write!(f, "{num}/{den}"),
            Phase::Float(t) => write!(f, "{t}"),
        }
    }
}

impl FromStr for Phase {
    type Err = Error;

    /// `"p/q"` and bare integers are exact; anything else is float turns.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| Error::InvalidPhase(s.to_string()))?;
            let q: u64 = q.trim().parse().map_err(|_| Error::InvalidPhase(s.to_string()))?;
            return Phase::rational(p, q);
        }
        if let Ok(p) = s.parse::<i64>() {
            return Phase::rational(p, 1);
        }
        let t: f64 = s.parse().map_err(|_| Error::InvalidPhase(s.to_string()))?;
        Phase::turns(t)
    }
}

/// `c_N(w) = (1/N) Σ_{j<N} w^j`.
///
/// Exactly `1` at `w = 1` and exactly `0` when `w ≠ 1` is rational with
/// denominator dividing `N`.
pub fn cesaro_kernel(w: &Phase, n: u64) -> Complex64 {
    assert!(n >= 1, "Cesaro kernel needs N >= 1");
    if w.is_one() {
        return Complex64::new(1.0, 0.0);
    }
    if let Phase::Rational { den, .. } = *w {
        if n.is_multiple_of(den) {
            return Complex64::new(0.0, 0.0);
        }
    }
    // c_N(w) = e^{iπ(N−1)t} sin(πNt) / (N sin(πt))
    let t = w.as_turns();
    let numerator = (PI * w.half_turn_multiple(n)).sin();
    let denominator = n as f64 * (PI * t).sin();
    let rotation = Complex64::from_polar(1.0, PI * w.half_turn_multiple(n - 1));
    rotation * (numerator / denominator)
}
