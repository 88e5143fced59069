//! Scalar fields the engine is generic over.
//!
//! Every algebraic object (structure constants, forms, products, curvature)
//! is parameterized by a [`Scalar`]. Two families are supported:
//!
//! * exact rationals ([`Rational`], arbitrary precision, always in lowest
//!   terms with a positive denominator), for which every certificate is an
//!   exact equality test;
//! * IEEE floats (`f64`, and `f32` for completeness), for which every
//!   certificate is a thresholded residual.
//!
//! Mixing modes is a type error. Promotion exact → float is explicit and
//! one-way (see [`Scalar::to_f64`] and the `to_f64` conversions on the
//! algebraic containers).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::linalg::{exact, float, Inertia, Matrix};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Arithmetic mode of a computation. Reported alongside every verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// A field the engine can compute over.
///
/// The linear-algebra kernels that genuinely differ between exact and
/// approximate arithmetic (span bases, kernels, inertia) are hooks on the
/// trait; everything else is written once against `Num + Signed`.
pub trait Scalar:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Nearest binary64 value.
    fn to_f64(&self) -> f64;

    /// Relative threshold used for approximate zero tests. Zero for exact
    /// scalars.
    fn rel_tol() -> f64;

    /// Basis of the span of `rows` (each row one vector).
    fn row_basis(rows: &Matrix<Self>) -> Vec<Vec<Self>>;

    /// Basis of `{ x : m x = 0 }`.
    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>>;

    /// Sylvester inertia of a symmetric matrix.
    fn inertia(sym: &Matrix<Self>) -> Inertia;

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Zero test: exact equality for rationals, `|x| <= rel_tol * scale`
    /// otherwise.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::is_exact() {
            self.is_zero()
        } else {
            self.magnitude() <= Self::rel_tol() * scale
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// Text used by the file formats: `"p/q"` for rationals, 17 significant
    /// digits in scientific notation for floats.
    fn render(&self) -> String {
        format!("{:.16e}", self.to_f64())
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn rel_tol() -> f64 {
        1e-9
    }

    fn row_basis(rows: &Matrix<Self>) -> Vec<Vec<Self>> {
        float::row_basis(rows, Self::rel_tol())
    }

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        float::null_space(m, Self::rel_tol())
    }

    fn inertia(sym: &Matrix<Self>) -> Inertia {
        float::inertia(sym, Self::rel_tol())
    }
}

impl Scalar for f32 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    // 1e-9 is below f32 resolution.
    fn rel_tol() -> f64 {
        1e-4
    }

    fn row_basis(rows: &Matrix<Self>) -> Vec<Vec<Self>> {
        float::row_basis(rows, Self::rel_tol() as f32)
    }

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        float::null_space(m, Self::rel_tol() as f32)
    }

    fn inertia(sym: &Matrix<Self>) -> Inertia {
        float::inertia(sym, Self::rel_tol() as f32)
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn rel_tol() -> f64 {
        0.0
    }

    fn row_basis(rows: &Matrix<Self>) -> Vec<Vec<Self>> {
        exact::row_basis(rows)
    }

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        exact::null_space(m)
    }

    fn inertia(sym: &Matrix<Self>) -> Inertia {
        exact::inertia(sym)
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

/// Parse a coefficient string as an exact rational: `"3"`, `"-7/4"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Render an exact rational the way the file formats expect (`"p/q"` or
/// `"p"`).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Largest magnitude in a slice, as f64.
pub fn max_magnitude<T: Scalar>(xs: &[T]) -> f64 {
    xs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

/// Largest absolute value in a slice, kept in the scalar type.
pub fn max_abs<T: Scalar>(xs: &[T]) -> T {
    let mut best = T::zero();
    for x in xs {
        let a = x.abs();
        if a > best {
            best = a;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_normalized() {
        let r = Rational::from_ratio(6, -4);
        assert_eq!(format_rational(&r), "-3/2");
        assert!(r.denom() > &BigInt::zero());
        assert_eq!(format_rational(&Rational::from_int(5)), "5");
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("-7/4"), Some(Rational::from_ratio(-7, 4)));
        assert_eq!(parse_rational(" 12 "), Some(Rational::from_int(12)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
    }

    #[test]
    fn negligible_depends_on_mode() {
        assert!(!Rational::from_ratio(1, 1_000_000_000_000).is_negligible(1.0));
        assert!(1e-12_f64.is_negligible(1.0));
        assert!(!1e-6_f64.is_negligible(1.0));
    }
}
