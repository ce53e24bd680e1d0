//! Complex, dual and double numbers.
//!
//! All three systems are `re + i·im` with `i² = σ`. Arithmetic between
//! numbers of different systems is a contract violation and panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{Error, Result};

/// Absolute tolerance of the invertibility test used by [`HNumber::checked_div`].
pub const EPS_DIV: f64 = 1e-12;

/// Which of the three geometries, i.e. the value of `σ = i²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// σ = -1, complex numbers.
    Elliptic,
    /// σ = 0, dual numbers.
    Parabolic,
    /// σ = +1, double numbers.
    Hyperbolic,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 3] = [
        GeometryKind::Elliptic,
        GeometryKind::Parabolic,
        GeometryKind::Hyperbolic,
    ];

    pub fn sigma(self) -> i8 {
        match self {
            GeometryKind::Elliptic => -1,
            GeometryKind::Parabolic => 0,
            GeometryKind::Hyperbolic => 1,
        }
    }

    pub fn sigma_f64(self) -> f64 {
        f64::from(self.sigma())
    }

    pub fn from_sigma(sigma: i8) -> Option<Self> {
        match sigma {
            -1 => Some(GeometryKind::Elliptic),
            0 => Some(GeometryKind::Parabolic),
            1 => Some(GeometryKind::Hyperbolic),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Elliptic => "elliptic",
            GeometryKind::Parabolic => "parabolic",
            GeometryKind::Hyperbolic => "hyperbolic",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point `(u, v)` of the plane, independent of any number system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub const I: Point = Point { u: 0.0, v: 1.0 };

    pub const fn new(u: f64, v: f64) -> Self {
        Point { u, v }
    }

    pub fn is_upper(&self) -> bool {
        self.v > 0.0 && self.u.is_finite() && self.v.is_finite()
    }

    pub fn require_upper(self) -> Result<Self> {
        if self.is_upper() {
            Ok(self)
        } else {
            Err(Error::NotInUpperHalfPlane {
                u: self.u,
                v: self.v,
            })
        }
    }
}

impl From<(f64, f64)> for Point {
    fn from((u, v): (f64, f64)) -> Self {
        Point { u, v }
    }
}

/// A number `re + i·im` in the system selected by `kind`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HNumber {
    pub re: f64,
    pub im: f64,
    pub kind: GeometryKind,
}

impl HNumber {
    pub const fn new(kind: GeometryKind, re: f64, im: f64) -> Self {
        HNumber { re, im, kind }
    }

    pub const fn complex(re: f64, im: f64) -> Self {
        Self::new(GeometryKind::Elliptic, re, im)
    }

    pub const fn dual(re: f64, im: f64) -> Self {
        Self::new(GeometryKind::Parabolic, re, im)
    }

    pub const fn double(re: f64, im: f64) -> Self {
        Self::new(GeometryKind::Hyperbolic, re, im)
    }

    pub const fn real(kind: GeometryKind, re: f64) -> Self {
        Self::new(kind, re, 0.0)
    }

    /// The imaginary unit `i`, `ε` or `j`.
    pub const fn unit(kind: GeometryKind) -> Self {
        Self::new(kind, 0.0, 1.0)
    }

    pub fn from_point(kind: GeometryKind, p: Point) -> Self {
        Self::new(kind, p.u, p.v)
    }

    pub fn point(&self) -> Point {
        Point::new(self.re, self.im)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// `re - i·im`.
    pub fn conj(self) -> Self {
        Self::new(self.kind, self.re, -self.im)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.kind, self.re * s, self.im * s)
    }

    /// `|z|²_σ = re² - σ·im²`; negative for time-like double numbers.
    pub fn modulus_sq(&self) -> f64 {
        self.re * self.re - self.kind.sigma_f64() * self.im * self.im
    }

    /// Whether `self` has a multiplicative inverse, up to [`EPS_DIV`].
    pub fn is_invertible(&self) -> bool {
        match self.kind {
            GeometryKind::Elliptic => self.re.hypot(self.im) > EPS_DIV,
            GeometryKind::Parabolic => self.re.abs() > EPS_DIV,
            GeometryKind::Hyperbolic => (self.re.abs() - self.im.abs()).abs() > EPS_DIV,
        }
    }

    /// Division through the σ-conjugate: `a/b = a·b̄ / |b|²_σ`.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        same_kind(&self, &rhs);
        if !rhs.is_invertible() {
            return Err(Error::ZeroDivisor(format!(
                "{rhs} is not invertible in {} numbers",
                rhs.kind.name()
            )));
        }
        let norm = rhs.modulus_sq();
        Ok((self * rhs.conj()).scale(1.0 / norm))
    }

    pub fn recip(self) -> Result<Self> {
        Self::real(self.kind, 1.0).checked_div(self)
    }
}

#[track_caller]
fn same_kind(a: &HNumber, b: &HNumber) {
    assert_eq!(
        a.kind, b.kind,
        "arithmetic between {} and {} numbers",
        a.kind, b.kind
    );
}

impl Add for HNumber {
    type Output = HNumber;

    #[track_caller]
    fn add(self, rhs: Self) -> Self {
        same_kind(&self, &rhs);
        Self::new(self.kind, self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for HNumber {
    type Output = HNumber;

    #[track_caller]
    fn sub(self, rhs: Self) -> Self {
        same_kind(&self, &rhs);
        Self::new(self.kind, self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for HNumber {
    type Output = HNumber;

    fn neg(self) -> Self {
        Self::new(self.kind, -self.re, -self.im)
    }
}

impl Mul for HNumber {
    type Output = HNumber;

    #[track_caller]
    fn mul(self, rhs: Self) -> Self {
        same_kind(&self, &rhs);
        let sigma = self.kind.sigma_f64();
        Self::new(
            self.kind,
            self.re * rhs.re + sigma * self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl fmt::Display for HNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = match self.kind {
            GeometryKind::Elliptic => "i",
            GeometryKind::Parabolic => "ε",
            GeometryKind::Hyperbolic => "j",
        };
        if self.im < 0.0 {
            write!(f, "{}-{}{}", self.re, -self.im, unit)
        } else {
            write!(f, "{}+{}{}", self.re, self.im, unit)
        }
    }
}
