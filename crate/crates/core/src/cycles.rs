//! Cycles `k·Q(u, v) - 2l·u - 2n·v + m = 0` and the geodesic families.
//!
//! `Q` is `u²` for parabolas, `u² + v²` for circles and `u² - v²` for
//! hyperbolas, i.e. `|w|²_σ` in the matching number system. The same
//! quadruple thus describes the geodesics of all three geometries.

use std::fmt;

use crate::moebius::normalizer_to_i;
use crate::numbers::{GeometryKind, Point};
use crate::{Error, Result};

/// Tolerance of comparisons made on canonicalized cycles.
pub const CYCLE_TOL: f64 = 1e-9;

/// The parabolic sub-flavor `σ̆`: P_e (-1), P_p (0) or P_h (+1).
///
/// Independent of the geometry's `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParabolicFlavor {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl ParabolicFlavor {
    pub const ALL: [ParabolicFlavor; 3] = [
        ParabolicFlavor::Elliptic,
        ParabolicFlavor::Parabolic,
        ParabolicFlavor::Hyperbolic,
    ];

    pub fn sigma_breve(self) -> i8 {
        match self {
            ParabolicFlavor::Elliptic => -1,
            ParabolicFlavor::Parabolic => 0,
            ParabolicFlavor::Hyperbolic => 1,
        }
    }

    pub fn sigma_breve_f64(self) -> f64 {
        f64::from(self.sigma_breve())
    }

    pub fn from_sigma_breve(s: i8) -> Option<Self> {
        match s {
            -1 => Some(ParabolicFlavor::Elliptic),
            0 => Some(ParabolicFlavor::Parabolic),
            1 => Some(ParabolicFlavor::Hyperbolic),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ParabolicFlavor::Elliptic => "P_e",
            ParabolicFlavor::Parabolic => "P_p",
            ParabolicFlavor::Hyperbolic => "P_h",
        }
    }
}

impl fmt::Display for ParabolicFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Quadratic term of a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleShape {
    /// `k·u²`
    Parabola,
    /// `k·(u² + v²)`
    Circle,
    /// `k·(u² - v²)`
    Hyperbola,
}

impl CycleShape {
    /// The cycles natural to a geometry: `k·|w|²_σ`.
    pub fn of_geometry(kind: GeometryKind) -> Self {
        match kind {
            GeometryKind::Elliptic => CycleShape::Circle,
            GeometryKind::Parabolic => CycleShape::Parabola,
            GeometryKind::Hyperbolic => CycleShape::Hyperbola,
        }
    }

    /// Coefficient of `v²` in `Q`.
    pub fn v2_coefficient(self) -> f64 {
        match self {
            CycleShape::Parabola => 0.0,
            CycleShape::Circle => 1.0,
            CycleShape::Hyperbola => -1.0,
        }
    }
}

/// A projective quadruple `(k, l, n, m)` with a quadratic-term shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub k: f64,
    pub l: f64,
    pub n: f64,
    pub m: f64,
    pub shape: CycleShape,
}

impl Cycle {
    pub fn new(shape: CycleShape, k: f64, l: f64, n: f64, m: f64) -> Result<Self> {
        let c = Cycle { k, l, n, m, shape };
        if c.coefficients().iter().all(|x| *x == 0.0) {
            return Err(Error::DegenerateCycle("all coefficients are zero".into()));
        }
        if !c.coefficients().iter().all(|x| x.is_finite()) {
            return Err(Error::DegenerateCycle("non-finite coefficient".into()));
        }
        Ok(c)
    }

    pub fn parabola(k: f64, l: f64, n: f64, m: f64) -> Result<Self> {
        Self::new(CycleShape::Parabola, k, l, n, m)
    }

    /// The vertical line `u = u0`.
    pub fn vertical_line(shape: CycleShape, u0: f64) -> Self {
        Cycle {
            k: 0.0,
            l: 1.0,
            n: 0.0,
            m: 2.0 * u0,
            shape,
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.k, self.l, self.n, self.m]
    }

    /// Scaled so the largest-magnitude coefficient is `+1`.
    pub fn canonical(&self) -> Cycle {
        let c = self.coefficients();
        let pivot = c
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let s = 1.0 / pivot;
        Cycle {
            k: self.k * s,
            l: self.l * s,
            n: self.n * s,
            m: self.m * s,
            shape: self.shape,
        }
    }

    /// Same shape and same canonical coefficients within [`CYCLE_TOL`].
    pub fn same_as(&self, other: &Cycle, tol: f64) -> bool {
        if self.shape != other.shape {
            return false;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.coefficients()
            .iter()
            .zip(b.coefficients())
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    /// `k·Q(u, v) - 2l·u - 2n·v + m`.
    pub fn eval(&self, p: Point) -> f64 {
        let q = p.u * p.u + self.shape.v2_coefficient() * p.v * p.v;
        self.k * q - 2.0 * self.l * p.u - 2.0 * self.n * p.v + self.m
    }

    /// [`Cycle::eval`] on the canonical form, a scale-free membership test.
    pub fn residual(&self, p: Point) -> f64 {
        self.canonical().eval(p)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.residual(p).abs() <= tol
    }

    /// Whether the cycle is a line `u = const` (no `u²`, `v` or `v²` terms).
    pub fn is_vertical_line(&self) -> bool {
        let c = self.canonical();
        c.k.abs() <= CYCLE_TOL && c.n.abs() <= CYCLE_TOL && c.l.abs() > CYCLE_TOL
    }

    /// The cycle in coordinates `(U, V) = ((u - u0)/v0, v/v0)` pulled back
    /// to `(u, v)`; i.e. the image under `w ↦ u0 + v0·w` of `self`.
    pub fn pull_back_affine(&self, u0: f64, v0: f64) -> Cycle {
        // k((u-u0)² + s v²)/v0² - 2l(u-u0)/v0 - 2n v/v0 + m, times v0²
        let k = self.k;
        let l = self.k * u0 + self.l * v0;
        let n = self.n * v0;
        let m = self.k * u0 * u0 + 2.0 * self.l * v0 * u0 + self.m * v0 * v0;
        Cycle {
            k,
            l,
            n,
            m,
            shape: self.shape,
        }
    }

    /// The parabola `v = a u² + b u + c` with `a = k/2n`, `b = -l/n`, `c = m/2n`.
    pub fn graph_coefficients(&self) -> Result<(f64, f64, f64)> {
        if self.shape != CycleShape::Parabola {
            return Err(Error::DegenerateCycle("not a parabola".into()));
        }
        if self.n.abs() <= f64::EPSILON * self.coefficients().iter().map(|x| x.abs()).fold(0.0, f64::max) {
            return Err(Error::DegenerateCycle("n = 0: no graph over u".into()));
        }
        Ok((
            self.k / (2.0 * self.n),
            -self.l / self.n,
            self.m / (2.0 * self.n),
        ))
    }

    /// The parabolic cycle through three points with distinct `u`.
    pub fn parabola_through(points: [Point; 3]) -> Result<Cycle> {
        // rows (u², -2u, -2v, 1) · (k, l, n, m) = 0; the null vector is the
        // generalized cross product of the three rows.
        let rows: Vec<[f64; 4]> = points
            .iter()
            .map(|p| [p.u * p.u, -2.0 * p.u, -2.0 * p.v, 1.0])
            .collect();
        let minor = |skip: usize| {
            let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
            let e = |r: usize, c: usize| rows[r][cols[c]];
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
                - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        };
        let x = [minor(0), -minor(1), minor(2), -minor(3)];
        Cycle::parabola(x[0], x[1], x[2], x[3])
    }
}

impl fmt::Display for Cycle {
    /// `(k, [l, n], m)`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(3);
        write!(
            f,
            "({:.p$}, [{:.p$}, {:.p$}], {:.p$})",
            self.k, self.l, self.n, self.m
        )
    }
}

pub fn eval_cycle(c: &Cycle, p: Point) -> f64 {
    c.eval(p)
}

/// The parabola `(σ̆ + 4t²)u² - 8tu - 4v + 4 = 0` through `i`.
pub fn geodesic_family(flavor: ParabolicFlavor, t: f64) -> Cycle {
    Cycle {
        k: flavor.sigma_breve_f64() + 4.0 * t * t,
        l: 4.0 * t,
        n: 2.0,
        m: 4.0,
        shape: CycleShape::Parabola,
    }
}

/// The Lobachevsky geodesic `(u² + v²) sin 2t - 2u cos 2t - sin 2t = 0` through `i`.
pub fn elliptic_geodesic_through_i(t: f64) -> Cycle {
    let (s, c) = (2.0 * t).sin_cos();
    Cycle {
        k: s,
        l: c,
        n: 0.0,
        m: -s,
        shape: CycleShape::Circle,
    }
}

/// The space-like `u² - v² - 2tu + 1 = 0` and time-like
/// `(u² - v²) sinh 2t - 2u cosh 2t + sinh 2t = 0` geodesics through `i`.
pub fn hyperbolic_geodesics_through_i(t: f64) -> (Cycle, Cycle) {
    let spacelike = Cycle {
        k: 1.0,
        l: t,
        n: 0.0,
        m: 1.0,
        shape: CycleShape::Hyperbola,
    };
    let (s, c) = ((2.0 * t).sinh(), (2.0 * t).cosh());
    let timelike = Cycle {
        k: s,
        l: c,
        n: 0.0,
        m: s,
        shape: CycleShape::Hyperbola,
    };
    (spacelike, timelike)
}

/// `l² + σ̆n² - mk` on the canonical form.
pub fn f_orthogonality_residual(c: &Cycle, flavor: ParabolicFlavor) -> f64 {
    let c = c.canonical();
    c.l * c.l + flavor.sigma_breve_f64() * c.n * c.n - c.m * c.k
}

pub fn is_f_orthogonal(c: &Cycle, flavor: ParabolicFlavor) -> bool {
    f_orthogonality_residual(c, flavor).abs() <= CYCLE_TOL
}

/// Geodesics through a pair of points.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGeodesics {
    /// Family members through both points, smaller `|t|` first.
    pub cycles: Vec<Cycle>,
    /// The family parameter `t` of each cycle in the frame where `w1 = i`.
    pub params: Vec<f64>,
    /// The points share a real part; `cycles` holds the vertical line.
    pub degenerate: bool,
}

/// Family members through `w1` and `w2`: map `w1 ↦ i`, solve the quadratic
/// for `t` (both signs of the root), and map the cycles back.
pub fn geodesics_through_pair(w1: Point, w2: Point, flavor: ParabolicFlavor) -> Result<PairGeodesics> {
    let w1 = w1.require_upper()?;
    let w2 = w2.require_upper()?;
    if w1 == w2 {
        return Err(Error::CoincidentPoints);
    }
    let g = normalizer_to_i(w1)?;
    let image = g
        .apply(crate::numbers::HNumber::dual(w2.u, w2.v))
        .expect("affine map is defined everywhere");
    let (big_u, big_v) = (image.re, image.im);

    if big_u.abs() <= 1e-12 {
        return Ok(PairGeodesics {
            cycles: vec![Cycle::vertical_line(CycleShape::Parabola, w1.u)],
            params: vec![],
            degenerate: true,
        });
    }

    // 4U²t² - 8Ut + (σ̆U² - 4V + 4) = 0, discriminant 16U²(4V - σ̆U²)
    let reduced = 4.0 * big_v - flavor.sigma_breve_f64() * big_u * big_u;
    if reduced < -1e-12 * (4.0 * big_v).max(1.0) {
        return Err(Error::NoRealSolution(16.0 * big_u * big_u * reduced));
    }
    let root = reduced.max(0.0).sqrt();
    let mut params = if root <= 1e-12 {
        vec![1.0 / big_u]
    } else {
        vec![(2.0 - root) / (2.0 * big_u), (2.0 + root) / (2.0 * big_u)]
    };
    params.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let cycles = params
        .iter()
        .map(|&t| geodesic_family(flavor, t).pull_back_affine(w1.u, w1.v))
        .collect();
    Ok(PairGeodesics {
        cycles,
        params,
        degenerate: false,
    })
}

/// Notions of a distinguished point of a parabola.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FocusNotion {
    UsualFocus,
    Vertex,
    /// Foot of the axis on the directrix.
    DirectrixNearest,
}

impl FocusNotion {
    pub const ALL: [FocusNotion; 3] = [
        FocusNotion::UsualFocus,
        FocusNotion::Vertex,
        FocusNotion::DirectrixNearest,
    ];
}

pub fn parabola_focus(c: &Cycle, notion: FocusNotion) -> Result<Point> {
    if c.k.abs() <= CYCLE_TOL * c.coefficients().iter().map(|x| x.abs()).fold(0.0, f64::max) {
        return Err(Error::DegenerateCycle("k = 0: not a parabola".into()));
    }
    let (a, b, cc) = c.graph_coefficients()?;
    let u0 = -b / (2.0 * a);
    let v0 = cc - b * b / (4.0 * a);
    let focal = 1.0 / (4.0 * a);
    Ok(match notion {
        FocusNotion::Vertex => Point::new(u0, v0),
        FocusNotion::UsualFocus => Point::new(u0, v0 + focal),
        FocusNotion::DirectrixNearest => Point::new(u0, v0 - focal),
    })
}

/// Which focus notions of `geodesic_family(flavor, t)` land on the real axis.
pub fn foci_on_axis(flavor: ParabolicFlavor, t: f64) -> Result<Vec<(FocusNotion, Point, bool)>> {
    let c = geodesic_family(flavor, t);
    FocusNotion::ALL
        .iter()
        .map(|&notion| {
            parabola_focus(&c, notion).map(|p| (notion, p, p.v.abs() <= CYCLE_TOL))
        })
        .collect()
}
