//! Geodesics as curves of additive distance: the additivity ODE, fitting to
//! the parabola family, a grid shortest-path oracle and the triangle
//! inequality regions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::cycles::{geodesic_family, geodesics_through_pair, Cycle, ParabolicFlavor};
use crate::distance::{distance_points, DistanceSpec};
use crate::metric::{metric_at, PolyCurve};
use crate::numbers::{GeometryKind, Point};
use crate::{Error, Result};

/// Half-width of the band where the triangle inequality counts as equality.
pub const EPS_EQ: f64 = 1e-9;
/// Largest local error estimate accepted per integration step.
pub const MAX_STEP_ERROR: f64 = 1e-6;

/// Slope at `w2` of the geodesic through `w1` and `w2`:
/// `2v₂/Δu - √|4v₁v₂ - σ̆Δu²| / Δu` with `Δu = u₂ - u₁`.
pub fn additivity_slope(w1: Point, w2: Point, flavor: ParabolicFlavor) -> Result<f64> {
    let du = w2.u - w1.u;
    if du == 0.0 {
        return Err(Error::VerticalPair);
    }
    let root = (4.0 * w1.v * w2.v - flavor.sigma_breve_f64() * du * du).abs().sqrt();
    Ok(2.0 * w2.v / du - root / du)
}

/// Integrates `v' = additivity_slope(i, (u, v))` from `i` outward with
/// classical RK4 and step doubling.
///
/// `u = 0` is a node of the ODE: every `v = 1 + c₁u + (σ̆ + c₁²)u²/4 + …`
/// solves it, so the initial slope `c₁` picks the solution. The first step
/// uses that series. The curve parameter is `|u|`.
pub fn integrate_geodesic(
    flavor: ParabolicFlavor,
    direction: f64,
    initial_slope: f64,
    u_max: f64,
    step: f64,
) -> Result<PolyCurve> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(u_max > step && u_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("u_max must exceed the step, got {u_max}")));
    }
    if direction != 1.0 && direction != -1.0 {
        return Err(Error::InvalidArgument(format!("direction must be ±1, got {direction}")));
    }
    let s = flavor.sigma_breve_f64();
    let slope = |u: f64, v: f64| -> Result<f64> {
        if v <= 0.0 {
            return Err(Error::NotInUpperHalfPlane { u, v });
        }
        additivity_slope(Point::I, Point::new(u, v), flavor)
    };
    let rk4 = |u: f64, v: f64, h: f64| -> Result<f64> {
        let k1 = slope(u, v)?;
        let k2 = slope(u + h / 2.0, v + h * k1 / 2.0)?;
        let k3 = slope(u + h / 2.0, v + h * k2 / 2.0)?;
        let k4 = slope(u + h, v + h * k3)?;
        Ok(v + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
    };

    let mut samples = vec![(0.0, Point::I)];
    let mut a = step;
    let mut u = direction * a;
    let mut v = 1.0 + initial_slope * u + (s + initial_slope * initial_slope) * u * u / 4.0;
    samples.push((a, Point::new(u, v).require_upper()?));
    while a < u_max {
        let h_abs = step.min(u_max - a);
        let h = direction * h_abs;
        let full = rk4(u, v, h)?;
        let half = rk4(u, v, h / 2.0)?;
        let twice = rk4(u + h / 2.0, half, h / 2.0)?;
        let estimate = (twice - full).abs() / 15.0;
        if estimate > MAX_STEP_ERROR {
            return Err(Error::StepTooLarge { estimate });
        }
        a = if u_max - a <= step { u_max } else { a + h_abs };
        u = direction * a;
        v = twice;
        samples.push((a, Point::new(u, v).require_upper()?));
    }
    PolyCurve::new(GeometryKind::Parabolic, samples)
}

/// Least-squares family parameter of a curve and its worst residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyFit {
    pub t: f64,
    /// Largest `|eval|` of `geodesic_family(σ̆, t)` over the samples.
    pub max_residual: f64,
}

/// Minimizes `Σ E(t)²` with `E = 4u²t² - 8ut + (σ̆u² - 4v + 4)` by solving
/// the cubic `dΣE²/dt = 0`.
pub fn fit_to_family(c: &PolyCurve, flavor: ParabolicFlavor) -> Result<FamilyFit> {
    let points: Vec<Point> = c.samples().iter().map(|s| s.point).collect();
    fit_points_to_family(&points, flavor)
}

pub fn fit_points_to_family(points: &[Point], flavor: ParabolicFlavor) -> Result<FamilyFit> {
    let s = flavor.sigma_breve_f64();
    let off_axis = points.iter().filter(|p| p.u.abs() > 1e-12).count();
    if off_axis < 3 {
        return Err(Error::DegenerateFit(format!(
            "{off_axis} samples off u = 0, need 3"
        )));
    }
    let terms: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (4.0 * p.u * p.u, -8.0 * p.u, s * p.u * p.u - 4.0 * p.v + 4.0))
        .collect();
    let mut cubic = [0.0; 4];
    for &(a, b, c) in &terms {
        cubic[3] += 2.0 * a * a;
        cubic[2] += 3.0 * a * b;
        cubic[1] += b * b + 2.0 * a * c;
        cubic[0] += b * c;
    }
    let objective = |t: f64| {
        terms
            .iter()
            .map(|&(a, b, c)| (a * t * t + b * t + c).powi(2))
            .sum::<f64>()
    };
    let t = real_cubic_roots(cubic)
        .into_iter()
        .min_by(|x, y| objective(*x).total_cmp(&objective(*y)))
        .ok_or_else(|| Error::DegenerateFit("no stationary point".into()))?;
    let member = geodesic_family(flavor, t);
    let max_residual = points
        .iter()
        .map(|p| member.eval(*p).abs())
        .fold(0.0, f64::max);
    Ok(FamilyFit { t, max_residual })
}

/// Real roots of `c₃t³ + c₂t² + c₁t + c₀` with `c₃ ≠ 0`, by bisection on
/// the monotone pieces between critical points.
fn real_cubic_roots(c: [f64; 4]) -> Vec<f64> {
    let p = |t: f64| ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
    let bound = 1.0 + c[..3].iter().map(|x| (x / c[3]).abs()).fold(0.0, f64::max);
    let mut knots = vec![-bound];
    // p' = 3c₃t² + 2c₂t + c₁
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let r = disc.sqrt();
        let mut crit = [(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)];
        crit.sort_by(f64::total_cmp);
        knots.extend(crit.iter().filter(|x| x.abs() < bound));
    }
    knots.push(bound);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (plo, phi) = (p(lo), p(hi));
        if plo == 0.0 {
            roots.push(lo);
            continue;
        }
        if plo.signum() == phi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if p(mid).signum() == plo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if p(bound) == 0.0 {
        roots.push(bound);
    }
    roots
}

/// The `u`-interval of the arc of `geodesic_family(σ̆, t)` that contains `i`
/// and stays in the upper half-plane, clipped to `[-u_max, u_max]`.
///
/// For `σ̆ = +1` the whole parabola lies above the axis, but `sin⁻¹` folds
/// back once two points are `π/2` apart along it. The arc is then limited to
/// the points within `π/4` of `i`, so that any triple on it is additive.
pub fn family_arc_interval(flavor: ParabolicFlavor, t: f64, u_max: f64) -> (f64, f64) {
    let mut lo = -u_max;
    let mut hi = u_max;
    let mut cut = |r: f64| {
        if r < 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
    };
    let s = flavor.sigma_breve_f64();
    // v = 0 where (σ̆ + 4t²)u² - 8tu + 4 = 0; for σ̆ = +1, F/2 = sin(π/4)
    // where (1/2 - 2t²)u² + 4tu - 2 = 0
    let (a, b, c) = if flavor == ParabolicFlavor::Hyperbolic {
        (0.5 - 2.0 * t * t, 4.0 * t, -2.0)
    } else {
        (s + 4.0 * t * t, -8.0 * t, 4.0)
    };
    if a == 0.0 {
        if b != 0.0 {
            cut(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            cut((-b - r) / (2.0 * a));
            cut((-b + r) / (2.0 * a));
        }
    }
    (lo, hi)
}

/// Largest `|d(w₁,w₃) - d(w₁,w₂) - d(w₂,w₃)|` over triples on `c`.
pub fn additivity_check(spec: &DistanceSpec, c: &Cycle, triples: &[[Point; 3]]) -> Result<f64> {
    let mut worst = 0.0f64;
    for triple in triples {
        for p in triple {
            let residual = c.residual(*p);
            if !(residual.abs() <= 1e-9) {
                return Err(Error::PointsNotOnCycle {
                    u: p.u,
                    v: p.v,
                    residual,
                });
            }
        }
        let [w1, w2, w3] = *triple;
        if !(w1.u <= w2.u && w2.u <= w3.u) {
            return Err(Error::InvalidArgument("triple points must be ordered by u".into()));
        }
        let d = |a, b| distance_points(spec, a, b).map(|o| o.value);
        let defect = d(w1, w3)? - d(w1, w2)? - d(w2, w3)?;
        worst = worst.max(defect.abs());
    }
    Ok(worst)
}

/// Points of the Lobachevsky geodesic from `z` to `w`, `n` chords equally
/// spaced in angle (or in `log v` on a vertical line).
pub fn elliptic_geodesic_arc(z: Point, w: Point, n: usize) -> Result<PolyCurve> {
    let z = z.require_upper()?;
    let w = w.require_upper()?;
    if z == w {
        return Err(Error::CoincidentPoints);
    }
    let n = n.max(1);
    let point_at: Box<dyn Fn(f64) -> Point> = if z.u == w.u {
        let (l0, l1) = (z.v.ln(), w.v.ln());
        Box::new(move |s| Point::new(z.u, (l0 + s * (l1 - l0)).exp()))
    } else {
        let x0 = (z.u * z.u + z.v * z.v - w.u * w.u - w.v * w.v) / (2.0 * (z.u - w.u));
        let r = (z.u - x0).hypot(z.v);
        let (a0, a1) = (z.v.atan2(z.u - x0), w.v.atan2(w.u - x0));
        Box::new(move |s| {
            let (sin, cos) = (a0 + s * (a1 - a0)).sin_cos();
            Point::new(x0 + r * cos, r * sin)
        })
    };
    let samples = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            (s, point_at(s))
        })
        .collect();
    PolyCurve::new(GeometryKind::Elliptic, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STENCIL: [(i64, i64); 16] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
    (2, 1),
    (2, -1),
    (-2, 1),
    (-2, -1),
    (1, 2),
    (1, -2),
    (-1, 2),
    (-1, -2),
];

/// Shortest-path length from `z` to `w` on a square grid with 16-neighbour
/// connectivity, edges weighted by the metric at their midpoints.
///
/// The grid has `resolution` nodes along the longer side of a box around
/// both points and the Euclidean semicircle through them, and is aligned so
/// that `z` is a node. `w` is joined by straight edges to the nodes within
/// two cells. Only the elliptic metric is definite, so other geometries are
/// rejected.
pub fn grid_shortest_path(kind: GeometryKind, z: Point, w: Point, resolution: usize) -> Result<f64> {
    if kind != GeometryKind::Elliptic {
        return Err(Error::UnsupportedGeometry(format!(
            "{kind} metric is not positive definite"
        )));
    }
    if resolution < 64 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} is below 64")));
    }
    let z = z.require_upper()?;
    let w = w.require_upper()?;
    if z == w {
        return Ok(0.0);
    }

    let (mut umin, mut umax) = (z.u.min(w.u), z.u.max(w.u));
    let mut vmax = z.v.max(w.v);
    if z.u != w.u {
        let x0 = (z.u * z.u + z.v * z.v - w.u * w.u - w.v * w.v) / (2.0 * (z.u - w.u));
        let r = (z.u - x0).hypot(z.v);
        if x0 > umin && x0 < umax {
            vmax = vmax.max(r);
        }
    }
    let vmin = 0.5 * z.v.min(w.v);
    let span = (umax - umin).max(vmax - vmin);
    umin -= 0.25 * span;
    umax += 0.25 * span;
    vmax += 0.25 * span;
    let h = (umax - umin).max(vmax - vmin) / (resolution - 1) as f64;

    // node (i, j) sits at (z.u + i h, z.v + j h)
    let i_lo = ((umin - z.u) / h).floor() as i64;
    let i_hi = ((umax - z.u) / h).ceil() as i64;
    let j_lo = ((vmin - z.v) / h).ceil() as i64;
    let j_hi = ((vmax - z.v) / h).ceil() as i64;
    let (nx, ny) = ((i_hi - i_lo + 1) as usize, (j_hi - j_lo + 1) as usize);
    let pos = |node: usize| {
        let (i, j) = ((node % nx) as i64 + i_lo, (node / nx) as i64 + j_lo);
        Point::new(z.u + i as f64 * h, z.v + j as f64 * h)
    };
    let edge = |a: Point, b: Point| -> f64 {
        let mid = Point::new(0.5 * (a.u + b.u), 0.5 * (a.v + b.v));
        let m = metric_at(mid, kind).expect("grid lies in the upper half-plane");
        m.eval(b.u - a.u, b.v - a.v).sqrt()
    };

    let start = ((0 - j_lo) as usize) * nx + (0 - i_lo) as usize;
    let mut dist = vec![f64::INFINITY; nx * ny];
    let mut heap = BinaryHeap::new();
    dist[start] = 0.0;
    heap.push(HeapEntry { cost: 0.0, node: start });
    while let Some(HeapEntry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        let (i, j) = ((node % nx) as i64, (node / nx) as i64);
        let p = pos(node);
        for (di, dj) in STENCIL {
            let (a, b) = (i + di, j + dj);
            if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                continue;
            }
            let next = b as usize * nx + a as usize;
            let c = cost + edge(p, pos(next));
            if c < dist[next] {
                dist[next] = c;
                heap.push(HeapEntry { cost: c, node: next });
            }
        }
    }

    let wi = ((w.u - z.u) / h).round() as i64 - i_lo;
    let wj = ((w.v - z.v) / h).round() as i64 - j_lo;
    let mut best = f64::INFINITY;
    for a in wi - 2..=wi + 2 {
        for b in wj - 2..=wj + 2 {
            if a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64 {
                continue;
            }
            let node = b as usize * nx + a as usize;
            best = best.min(dist[node] + edge(pos(node), w));
        }
    }
    Ok(best)
}

/// Outcome of comparing `d(w₁, w₂)` with `d(w₁, z) + d(z, w₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangleClass {
    /// `d(w₁, w₂) < d(w₁, z) + d(z, w₂)`
    StrictTriangle,
    /// `d(w₁, w₂) > d(w₁, z) + d(z, w₂)`
    ReverseTriangle,
    Equality,
    OutsideStrip,
    /// `z` shares a real part with `w₁` or `w₂`.
    Degenerate,
}

impl TriangleClass {
    pub fn name(self) -> &'static str {
        match self {
            TriangleClass::StrictTriangle => "strict",
            TriangleClass::ReverseTriangle => "reverse",
            TriangleClass::Equality => "equality",
            TriangleClass::OutsideStrip => "outside-strip",
            TriangleClass::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for TriangleClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which of the (up to two) geodesics through a pair bounds the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Branch {
    #[default]
    SmallerAbsT,
    LargerAbsT,
}

fn require_parabolic(spec: &DistanceSpec) -> Result<()> {
    if spec.geometry != GeometryKind::Parabolic {
        return Err(Error::UnsupportedGeometry(format!(
            "triangle regions are defined for parabolic distances, got {}",
            spec.geometry
        )));
    }
    Ok(())
}

/// The geodesic through `w1`, `w2` selected by `branch`.
pub fn branch_geodesic(flavor: ParabolicFlavor, w1: Point, w2: Point, branch: Branch) -> Result<Cycle> {
    let pair = geodesics_through_pair(w1, w2, flavor)?;
    Ok(match branch {
        Branch::SmallerAbsT => pair.cycles[0],
        Branch::LargerAbsT => *pair.cycles.last().expect("at least one cycle"),
    })
}

/// Compares the sides of the triangle `w₁ z w₂` regardless of the strip.
fn relation(spec: &DistanceSpec, w1: Point, w2: Point, z: Point) -> Result<TriangleClass> {
    let d = |a, b| distance_points(spec, a, b).map(|o| o.value);
    let direct = d(w1, w2)?;
    let detour = d(w1, z)? + d(z, w2)?;
    Ok(if (direct - detour).abs() <= EPS_EQ {
        TriangleClass::Equality
    } else if direct < detour {
        TriangleClass::StrictTriangle
    } else {
        TriangleClass::ReverseTriangle
    })
}

/// Classifies `z` against the triangle inequality for `w₁`, `w₂`, using a
/// monotone parabolic distance.
pub fn classify_triangle(spec: &DistanceSpec, w1: Point, w2: Point, z: Point, branch: Branch) -> Result<TriangleClass> {
    require_parabolic(spec)?;
    if !(w1.u < w2.u) {
        return Err(Error::InvalidArgument("need Re w1 < Re w2".into()));
    }
    let z = z.require_upper()?;
    if z.u == w1.u || z.u == w2.u {
        return Ok(TriangleClass::Degenerate);
    }
    if z.u < w1.u || z.u > w2.u {
        return Ok(TriangleClass::OutsideStrip);
    }
    let geodesic = branch_geodesic(spec.flavor, w1, w2, branch)?;
    if geodesic.contains(z, EPS_EQ) {
        return Ok(TriangleClass::Equality);
    }
    relation(spec, w1, w2, z)
}

/// [`classify_triangle`] at the center `z` of a `du × dv` cell, except that
/// cells crossed by `geodesic` inside the strip count as [`TriangleClass::Equality`].
pub fn classify_cell(
    spec: &DistanceSpec,
    w1: Point,
    w2: Point,
    geodesic: &Cycle,
    z: Point,
    du: f64,
    dv: f64,
) -> Result<TriangleClass> {
    require_parabolic(spec)?;
    if !(w1.u < w2.u) {
        return Err(Error::InvalidArgument("need Re w1 < Re w2".into()));
    }
    let z = z.require_upper()?;
    if z.u == w1.u || z.u == w2.u {
        return Ok(TriangleClass::Degenerate);
    }
    if z.u < w1.u || z.u > w2.u {
        return Ok(TriangleClass::OutsideStrip);
    }
    // a corner exactly on the geodesic counts as crossing
    let corners = [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
        .map(|(a, b)| geodesic.eval(Point::new(z.u + 0.5 * a * du, z.v + 0.5 * b * dv)));
    let (lo, hi) = corners.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if (lo <= 0.0 && hi >= 0.0) || geodesic.contains(z, EPS_EQ) {
        return Ok(TriangleClass::Equality);
    }
    relation(spec, w1, w2, z)
}

/// Axis-aligned box in the `(u, v)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bbox {
    pub umin: f64,
    pub umax: f64,
    pub vmin: f64,
    pub vmax: f64,
}

impl Bbox {
    pub fn new(umin: f64, umax: f64, vmin: f64, vmax: f64) -> Result<Self> {
        if !(umin < umax && vmin < vmax) || ![umin, umax, vmin, vmax].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "empty box [{umin}, {umax}] x [{vmin}, {vmax}]"
            )));
        }
        if vmin < 0.0 {
            return Err(Error::NotInUpperHalfPlane { u: umin, v: vmin });
        }
        Ok(Bbox { umin, umax, vmin, vmax })
    }
}

/// Cell classes over a box, row-major from the bottom-left.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub bbox: Bbox,
    pub nx: usize,
    pub ny: usize,
    /// `classify_triangle` at each cell; `None` where a distance is undefined.
    pub cells: Vec<Option<TriangleClass>>,
    /// The side comparison at each cell, ignoring the strip.
    pub relation: Vec<Option<TriangleClass>>,
    /// All geodesics through `w1`, `w2`, the chosen branch first.
    pub bounding: Vec<Cycle>,
}

impl Raster {
    pub fn center(&self, i: usize, j: usize) -> Point {
        let du = (self.bbox.umax - self.bbox.umin) / self.nx as f64;
        let dv = (self.bbox.vmax - self.bbox.vmin) / self.ny as f64;
        Point::new(
            self.bbox.umin + (i as f64 + 0.5) * du,
            self.bbox.vmin + (j as f64 + 0.5) * dv,
        )
    }

    pub fn class(&self, i: usize, j: usize) -> Option<TriangleClass> {
        self.cells[j * self.nx + i]
    }

    pub fn count(&self, class: TriangleClass) -> usize {
        self.cells.iter().filter(|c| **c == Some(class)).count()
    }
}

/// Classifies every cell of an `nx × ny` raster in parallel. Cells crossed by
/// the chosen geodesic inside the strip form the equality band.
pub fn region_raster(
    spec: &DistanceSpec,
    w1: Point,
    w2: Point,
    bbox: Bbox,
    nx: usize,
    ny: usize,
    branch: Branch,
) -> Result<Raster> {
    require_parabolic(spec)?;
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument("raster needs at least one cell".into()));
    }
    if !(w1.u < w2.u) {
        return Err(Error::InvalidArgument("need Re w1 < Re w2".into()));
    }
    let pair = geodesics_through_pair(w1, w2, spec.flavor)?;
    let chosen = branch_geodesic(spec.flavor, w1, w2, branch)?;
    let mut bounding = vec![chosen];
    bounding.extend(pair.cycles.iter().filter(|c| **c != chosen));

    let du = (bbox.umax - bbox.umin) / nx as f64;
    let dv = (bbox.vmax - bbox.vmin) / ny as f64;
    let (cells, relation): (Vec<_>, Vec<_>) = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let z = Point::new(bbox.umin + (i as f64 + 0.5) * du, bbox.vmin + (j as f64 + 0.5) * dv);
            let rel = relation(spec, w1, w2, z).ok();
            (classify_cell(spec, w1, w2, &chosen, z, du, dv).ok(), rel)
        })
        .unzip();
    Ok(Raster {
        bbox,
        nx,
        ny,
        cells,
        relation,
        bounding,
    })
}
