//! The invariant metric `ds² = (du² - σ dv²)/v²` and curve lengths.

use crate::moebius::MoebiusMap;
use crate::numbers::{GeometryKind, HNumber, Point};
use crate::{Error, Result};

/// Relative agreement of successive Romberg diagonals that counts as converged.
pub const LENGTH_RTOL: f64 = 1e-8;

/// Coefficients of `E du² + F du dv + G dv²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl MetricForm {
    pub fn eval(&self, du: f64, dv: f64) -> f64 {
        self.e * du * du + self.f * du * dv + self.g * dv * dv
    }
}

pub fn metric_at(p: Point, kind: GeometryKind) -> Result<MetricForm> {
    let p = p.require_upper()?;
    let s = 1.0 / (p.v * p.v);
    Ok(MetricForm {
        e: s,
        f: 0.0,
        g: -kind.sigma_f64() * s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub point: Point,
}

/// A curve in the upper half-plane sampled at strictly increasing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    kind: GeometryKind,
    samples: Vec<CurveSample>,
}

impl PolyCurve {
    pub fn new(kind: GeometryKind, samples: Vec<(f64, Point)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidCurve(format!(
                "{} samples, need at least 2",
                samples.len()
            )));
        }
        for (i, (t, p)) in samples.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::InvalidCurve(format!("parameter {i} is not finite")));
            }
            p.require_upper()?;
            if i > 0 && !(*t > samples[i - 1].0) {
                return Err(Error::InvalidCurve(format!(
                    "parameter not strictly increasing at sample {i}"
                )));
            }
        }
        Ok(PolyCurve {
            kind,
            samples: samples
                .into_iter()
                .map(|(t, point)| CurveSample { t, point })
                .collect(),
        })
    }

    /// Samples `f` at `n` equally spaced parameters on `[t0, t1]`.
    pub fn sample(
        kind: GeometryKind,
        t0: f64,
        t1: f64,
        n: usize,
        f: impl Fn(f64) -> Point,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCurve(format!("{n} samples, need at least 2")));
        }
        let step = (t1 - t0) / (n - 1) as f64;
        let samples = (0..n)
            .map(|i| {
                let t = if i == n - 1 { t1 } else { t0 + step * i as f64 };
                (t, f(t))
            })
            .collect();
        Self::new(kind, samples)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The image curve under `g`, keeping the parameters.
    pub fn map(&self, g: &MoebiusMap) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                g.apply(HNumber::from_point(self.kind, s.point))
                    .map(|w| (s.t, w.point()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.kind, samples)
    }

    /// Joins `other` after `self`; the end of `self` must equal the start of
    /// `other`, and the parameters of `other` are shifted to continue.
    pub fn concat(&self, other: &PolyCurve) -> Result<Self> {
        let last = self.samples.last().expect("non-empty");
        let first = other.samples[0];
        if last.point != first.point || self.kind != other.kind {
            return Err(Error::InvalidCurve("curves do not join".into()));
        }
        let shift = last.t - first.t;
        let mut samples: Vec<(f64, Point)> = self.samples.iter().map(|s| (s.t, s.point)).collect();
        samples.extend(other.samples[1..].iter().map(|s| (s.t + shift, s.point)));
        Self::new(self.kind, samples)
    }
}

/// Which sign of the quadratic form goes under the square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Causality {
    /// `√(du² - σ dv²)`.
    SpaceLike,
    /// `√(σ dv² - du²)`; for time-like hyperbolic curves.
    TimeLike,
}

/// Length estimate together with its convergence status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthEstimate {
    pub value: f64,
    /// Difference between the last two Romberg diagonals.
    pub error: f64,
    pub converged: bool,
}

/// `∫ √(du² - σ dv²) / v` along `c`.
pub fn curve_length(c: &PolyCurve) -> Result<f64> {
    curve_length_with(c, Causality::SpaceLike).map(|e| e.value)
}

/// The time-like length `∫ √(σ dv² - du²) / v`.
pub fn curve_length_timelike(c: &PolyCurve) -> Result<f64> {
    curve_length_with(c, Causality::TimeLike).map(|e| e.value)
}

/// Length by Romberg extrapolation over polyline sums.
///
/// Each chord is integrated exactly (the integrand along a straight chord is
/// `const / v(s)` with `v` linear), giving an `O(h²)` polyline estimate whose
/// error expands in even powers of the spacing when the samples are equally
/// spaced in a smooth parameter. Coarser estimates use every `2^j`-th sample.
pub fn curve_length_with(c: &PolyCurve, causality: Causality) -> Result<LengthEstimate> {
    let sigma = c.kind.sigma_f64();
    let pts: Vec<Point> = c.samples.iter().map(|s| s.point).collect();
    let n = pts.len() - 1;

    for (i, w) in pts.windows(2).enumerate() {
        let (du, dv) = (w[1].u - w[0].u, w[1].v - w[0].v);
        let q = chord_form(du, dv, sigma, causality);
        if q < -1e-12 * (du * du + dv * dv) {
            return Err(Error::ImaginaryLength { segment: i });
        }
    }

    let levels = n.trailing_zeros() as usize;
    // sums[j] uses stride 2^j
    let sums: Vec<f64> = (0..=levels)
        .map(|j| polyline_length(&pts, 1 << j, sigma, causality))
        .collect();

    // Romberg table from the coarsest stride to the finest.
    let mut prev_row: Vec<f64> = vec![sums[levels]];
    let mut best = sums[levels];
    let mut error = f64::INFINITY;
    let mut converged = levels == 0 && n == 1;
    for m in 1..=levels {
        let mut row = vec![sums[levels - m]];
        let mut factor = 1.0;
        for k in 1..=m {
            factor *= 4.0;
            let r = row[k - 1] + (row[k - 1] - prev_row[k - 1]) / (factor - 1.0);
            row.push(r);
        }
        let diag = row[m];
        error = (diag - best).abs();
        best = diag;
        if error <= LENGTH_RTOL * diag.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev_row = row;
    }
    if levels == 0 {
        error = 0.0;
    }
    Ok(LengthEstimate {
        value: best,
        error,
        converged,
    })
}

fn chord_form(du: f64, dv: f64, sigma: f64, causality: Causality) -> f64 {
    match causality {
        Causality::SpaceLike => du * du - sigma * dv * dv,
        Causality::TimeLike => sigma * dv * dv - du * du,
    }
}

fn polyline_length(pts: &[Point], stride: usize, sigma: f64, causality: Causality) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i + stride < pts.len() {
        total += chord_length(pts[i], pts[i + stride], sigma, causality);
        i += stride;
    }
    total
}

/// `∫₀¹ √Q / (v₀ + s Δv) ds` along the straight chord.
fn chord_length(p0: Point, p1: Point, sigma: f64, causality: Causality) -> f64 {
    let (du, dv) = (p1.u - p0.u, p1.v - p0.v);
    let q = chord_form(du, dv, sigma, causality).max(0.0);
    let x = dv / p0.v;
    let weight = if x.abs() < 1e-300 {
        1.0
    } else {
        x.ln_1p() / x
    };
    q.sqrt() * weight / p0.v
}

/// Residuals `(r1, r2)` of the Euler-Lagrange system
/// `d/dT(γ̇₁/v²) = 0` and `d/dT(σγ̇₂/v²) = (γ̇₁² - σγ̇₂²)/v³`
/// at the sample nearest to `t`, by nested central differences over the
/// curve's own samples (two on each side are required).
pub fn el_residual(c: &PolyCurve, t: f64) -> Result<(f64, f64)> {
    let s = &c.samples;
    let i = s
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.t - t).abs().total_cmp(&(b.1.t - t).abs()))
        .map(|(i, _)| i)
        .expect("non-empty");
    if i < 2 || i + 2 >= s.len() {
        return Err(Error::InsufficientSamples(format!(
            "T = {t} needs two samples on each side"
        )));
    }
    let sigma = c.kind.sigma_f64();
    let ts: Vec<f64> = s.iter().map(|x| x.t).collect();
    let us: Vec<f64> = s.iter().map(|x| x.point.u).collect();
    let vs: Vec<f64> = s.iter().map(|x| x.point.v).collect();
    let du = |j: usize| derivative(&ts, &us, j);
    let dv = |j: usize| derivative(&ts, &vs, j);

    let p1 = |j: usize| du(j) / (vs[j] * vs[j]);
    let p2 = |j: usize| sigma * dv(j) / (vs[j] * vs[j]);
    let lhs1 = derivative_of(&ts, i, p1(i - 1), p1(i), p1(i + 1));
    let lhs2 = derivative_of(&ts, i, p2(i - 1), p2(i), p2(i + 1));
    let (ud, vd) = (du(i), dv(i));
    let rhs2 = (ud * ud - sigma * vd * vd) / vs[i].powi(3);
    Ok((lhs1, lhs2 - rhs2))
}

fn derivative(ts: &[f64], ys: &[f64], j: usize) -> f64 {
    derivative_of(ts, j, ys[j - 1], ys[j], ys[j + 1])
}

/// Three-point derivative on a possibly non-uniform grid.
fn derivative_of(ts: &[f64], j: usize, ym: f64, y0: f64, yp: f64) -> f64 {
    let h1 = ts[j] - ts[j - 1];
    let h2 = ts[j + 1] - ts[j];
    -h2 / (h1 * (h1 + h2)) * ym + (h2 - h1) / (h1 * h2) * y0 + h1 / (h2 * (h1 + h2)) * yp
}

/// `∫_{t0}^{t1} dt / (a t² + b t + c)` in closed form.
///
/// Along the graph `v = a u² + b u + c` this is the parabolic (σ = 0)
/// length. The antiderivative is an arctangent, a rational function or a
/// logarithm according to the sign of the discriminant `b² - 4ac`.
pub fn parabola_segment_length(a: f64, b: f64, c: f64, t0: f64, t1: f64) -> Result<f64> {
    let den = |t: f64| (a * t + b) * t + c;
    let pole = || Error::PoleOnSegment { t0, t1 };
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let root_inside = |r: f64| r >= lo && r <= hi;
    if den(t0) == 0.0 || den(t1) == 0.0 {
        return Err(pole());
    }

    if a == 0.0 {
        if b == 0.0 {
            return Ok((t1 - t0) / c);
        }
        if root_inside(-c / b) {
            return Err(pole());
        }
        return Ok(((b * t1 + c) / (b * t0 + c)).abs().ln() / b);
    }

    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    if disc.abs() <= 1e-14 * scale {
        // a (t - r)², r = -b/2a
        let r = -b / (2.0 * a);
        if root_inside(r) {
            return Err(pole());
        }
        let anti = |t: f64| -1.0 / (a * (t - r));
        return Ok(anti(t1) - anti(t0));
    }
    if disc < 0.0 {
        let q = (-disc).sqrt();
        let anti = |t: f64| 2.0 / q * ((2.0 * a * t + b) / q).atan();
        return Ok(anti(t1) - anti(t0));
    }
    let q = disc.sqrt();
    let r1 = (-b - q) / (2.0 * a);
    let r2 = (-b + q) / (2.0 * a);
    if root_inside(r1) || root_inside(r2) {
        return Err(pole());
    }
    let anti = |t: f64| ((2.0 * a * t + b - q) / (2.0 * a * t + b + q)).abs().ln() / q;
    Ok(anti(t1) - anti(t0))
}
