//! Invariant distances `h(sin_σ̆⁻¹(F/2))`, the Cayley transform to the
//! parabolic disk and the disk distance.

use std::fmt;

use crate::cycles::ParabolicFlavor;
use crate::numbers::{GeometryKind, HNumber, Point};
use crate::{Error, Result};

/// Below this `|Re² - Im²|` a hyperbolic pair counts as light-like.
pub const LIGHTLIKE_TOL: f64 = 1e-12;
/// Slack allowed in monotonicity checks of sampled labels.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Sign class of `Re[z-w]² - σ·Im[z-w]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalType {
    SpaceLike,
    TimeLike,
    LightLike,
}

impl IntervalType {
    pub fn name(self) -> &'static str {
        match self {
            IntervalType::SpaceLike => "space-like",
            IntervalType::TimeLike => "time-like",
            IntervalType::LightLike => "light-like",
        }
    }

    /// Non-hyperbolic pairs are always space-like.
    pub fn classify(kind: GeometryKind, du: f64, dv: f64) -> Self {
        if kind != GeometryKind::Hyperbolic {
            return IntervalType::SpaceLike;
        }
        let q = du * du - dv * dv;
        if q.abs() <= LIGHTLIKE_TOL {
            IntervalType::LightLike
        } else if q > 0.0 {
            IntervalType::SpaceLike
        } else {
            IntervalType::TimeLike
        }
    }
}

impl fmt::Display for IntervalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `F(z, w)` together with the interval type of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantF {
    pub value: f64,
    pub interval: IntervalType,
}

/// `F(z, w) = √|z - w|²_σ / √(Im z · Im w)` in the number system of `z`.
pub fn invariant_f(z: HNumber, w: HNumber) -> Result<InvariantF> {
    if z.kind != w.kind {
        return Err(Error::InvalidArgument(format!(
            "points from different number systems: {} and {}",
            z.kind, w.kind
        )));
    }
    invariant_f_points(z.kind, z.point(), w.point())
}

pub fn invariant_f_points(kind: GeometryKind, z: Point, w: Point) -> Result<InvariantF> {
    let z = z.require_upper()?;
    let w = w.require_upper()?;
    let (du, dv) = (z.u - w.u, z.v - w.v);
    let q = du * du - kind.sigma_f64() * dv * dv;
    Ok(InvariantF {
        value: q.abs().sqrt() / (z.v * w.v).sqrt(),
        interval: IntervalType::classify(kind, du, dv),
    })
}

/// `sinh⁻¹ t`, `2t` or `sin⁻¹ t` for `σ̆ = -1, 0, +1`.
pub fn sin_inv_flavor(flavor: ParabolicFlavor, t: f64) -> Result<f64> {
    match flavor {
        ParabolicFlavor::Elliptic => Ok(t.asinh()),
        ParabolicFlavor::Parabolic => Ok(2.0 * t),
        ParabolicFlavor::Hyperbolic => {
            if t.abs() > 1.0 {
                Err(Error::DomainExceeded {
                    function: "sin_inv",
                    value: t,
                })
            } else {
                Ok(t.asin())
            }
        }
    }
}

/// A strictly increasing piecewise-linear function through `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidLabel("a table needs at least two points".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::InvalidLabel("a table must start at (0, 0)".into()));
        }
        for pair in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
            if !(x1 > x0) || !x1.is_finite() || !y1.is_finite() {
                return Err(Error::InvalidLabel(format!("abscissae must increase: {x0} then {x1}")));
            }
            if y1 <= y0 - MONOTONE_SLACK {
                return Err(Error::NonMonotoneSamples(format!("h({x1}) = {y1} < h({x0}) = {y0}")));
            }
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(MonotoneTable { xs, ys })
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn domain_max(&self) -> f64 {
        *self.xs.last().expect("non-empty")
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.domain_max()).contains(&x) {
            return Err(Error::DomainExceeded {
                function: "label table",
                value: x,
            });
        }
        let j = self.xs.partition_point(|&xi| xi < x).clamp(1, self.xs.len() - 1);
        let (x0, x1, y0, y1) = (self.xs[j - 1], self.xs[j], self.ys[j - 1], self.ys[j]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }
}

/// The monotone relabeling `h` applied to the canonical core distance.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    Identity,
    SinhInv,
    /// Defined on `[0, 1]`.
    SinInv,
    Double,
    /// `h(t) = c·t` with `c > 0`.
    Scaled(f64),
    Table(MonotoneTable),
}

impl Label {
    pub fn apply(&self, t: f64) -> Result<f64> {
        match self {
            Label::Identity => Ok(t),
            Label::SinhInv => Ok(t.asinh()),
            Label::SinInv => {
                if t > 1.0 {
                    Err(Error::DomainExceeded {
                        function: "label sin_inv",
                        value: t,
                    })
                } else {
                    Ok(t.asin())
                }
            }
            Label::Double => Ok(2.0 * t),
            Label::Scaled(c) => Ok(c * t),
            Label::Table(table) => table.eval(t),
        }
    }

    /// Right end of the domain, `∞` for unbounded labels.
    pub fn domain_max(&self) -> f64 {
        match self {
            Label::SinInv => 1.0,
            Label::Table(t) => t.domain_max(),
            _ => f64::INFINITY,
        }
    }

    /// Checks `h(0) = 0` and strict increase on 10³ samples of the domain.
    pub fn validate(&self) -> Result<()> {
        if let Label::Scaled(c) = self {
            if !(*c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidLabel(format!("scale must be positive, got {c}")));
            }
        }
        if self.apply(0.0)? != 0.0 {
            return Err(Error::InvalidLabel("h(0) must be 0".into()));
        }
        let top = self.domain_max().min(1e3);
        let mut prev = 0.0;
        for i in 1..=1000 {
            let x = top * f64::from(i) / 1000.0;
            let y = self.apply(x)?;
            if y <= prev - MONOTONE_SLACK {
                return Err(Error::NonMonotoneSamples(format!("h({x}) = {y} below {prev}")));
            }
            prev = y;
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            Label::Identity => "identity".into(),
            Label::SinhInv => "sinh-inv".into(),
            Label::SinInv => "sin-inv".into(),
            Label::Double => "double".into(),
            Label::Scaled(c) => format!("scaled({c})"),
            Label::Table(t) => format!("table({} points)", t.xs.len()),
        }
    }
}

/// Geometry, parabolic flavor and relabeling of a concrete distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpec {
    pub geometry: GeometryKind,
    /// Only consulted in parabolic geometry.
    pub flavor: ParabolicFlavor,
    label: Label,
}

impl DistanceSpec {
    pub fn new(geometry: GeometryKind, flavor: ParabolicFlavor, label: Label) -> Result<Self> {
        label.validate()?;
        Ok(DistanceSpec {
            geometry,
            flavor,
            label,
        })
    }

    /// The canonical core distance with `h = id`.
    pub fn canonical(geometry: GeometryKind, flavor: ParabolicFlavor) -> Self {
        DistanceSpec {
            geometry,
            flavor,
            label: Label::Identity,
        }
    }

    pub fn elliptic() -> Self {
        Self::canonical(GeometryKind::Elliptic, ParabolicFlavor::Elliptic)
    }

    pub fn hyperbolic() -> Self {
        Self::canonical(GeometryKind::Hyperbolic, ParabolicFlavor::Hyperbolic)
    }

    pub fn parabolic(flavor: ParabolicFlavor) -> Self {
        Self::canonical(GeometryKind::Parabolic, flavor)
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn with_label(&self, label: Label) -> Result<Self> {
        Self::new(self.geometry, self.flavor, label)
    }
}

impl fmt::Display for DistanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.geometry {
            GeometryKind::Parabolic => write!(f, "parabolic {}", self.flavor)?,
            g => write!(f, "{g}")?,
        }
        write!(f, ", h = {}", self.label.name())
    }
}

/// Result of [`distance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceOutcome {
    pub value: f64,
    pub interval: IntervalType,
    /// Distinct parabolic points on a common vertical line, at distance 0.
    pub vertical: bool,
}

/// `sin_σ̆⁻¹(F/2)` without relabeling.
pub fn core_distance(geometry: GeometryKind, flavor: ParabolicFlavor, z: Point, w: Point) -> Result<(f64, IntervalType)> {
    let f = invariant_f_points(geometry, z, w)?;
    let half = f.value / 2.0;
    let value = match (geometry, f.interval) {
        (_, IntervalType::LightLike) => 0.0,
        (GeometryKind::Elliptic, _) => half.asinh(),
        (GeometryKind::Parabolic, _) => sin_inv_flavor(flavor, half)?,
        (GeometryKind::Hyperbolic, IntervalType::SpaceLike) => {
            sin_inv_flavor(ParabolicFlavor::Hyperbolic, half)?
        }
        (GeometryKind::Hyperbolic, IntervalType::TimeLike) => half.asinh(),
    };
    Ok((value, f.interval))
}

/// `h(sin_σ̆⁻¹(F(z, w)/2))` with `σ̆ = -1` in elliptic geometry, `spec.flavor`
/// in parabolic geometry and the interval type's branch in
/// hyperbolic geometry. Points are read in `spec.geometry` regardless of
/// their own number system.
pub fn distance(spec: &DistanceSpec, z: HNumber, w: HNumber) -> Result<DistanceOutcome> {
    distance_points(spec, z.point(), w.point())
}

pub fn distance_points(spec: &DistanceSpec, z: Point, w: Point) -> Result<DistanceOutcome> {
    let (d0, interval) = core_distance(spec.geometry, spec.flavor, z, w)?;
    Ok(DistanceOutcome {
        value: spec.label.apply(d0)?,
        interval,
        vertical: spec.geometry == GeometryKind::Parabolic && z.u == w.u && z.v != w.v,
    })
}

fn require_dual(w: HNumber) -> Result<()> {
    if w.kind != GeometryKind::Parabolic {
        return Err(Error::InvalidArgument(format!(
            "the Cayley transform acts on dual numbers, got {}",
            w.kind
        )));
    }
    Ok(())
}

/// `w ↦ (2w - ε)/(εσ̆w + 2)`.
pub fn cayley(w: HNumber, flavor: ParabolicFlavor) -> Result<HNumber> {
    require_dual(w)?;
    let eps = HNumber::unit(GeometryKind::Parabolic);
    let num = w.scale(2.0) - eps;
    let den = (eps * w).scale(flavor.sigma_breve_f64()) + HNumber::dual(2.0, 0.0);
    num.checked_div(den)
}

/// `w ↦ (2w + ε)/(-εσ̆w + 2)`.
pub fn cayley_inverse(w: HNumber, flavor: ParabolicFlavor) -> Result<HNumber> {
    require_dual(w)?;
    let eps = HNumber::unit(GeometryKind::Parabolic);
    let num = w.scale(2.0) + eps;
    let den = HNumber::dual(2.0, 0.0) - (eps * w).scale(flavor.sigma_breve_f64());
    num.checked_div(den)
}

/// `sin_σ̆⁻¹(|u₂ - u₁| / √(R₁R₂))` with `R = 1 + 2v + σ̆u²`.
pub fn disk_distance(flavor: ParabolicFlavor, p1: Point, p2: Point) -> Result<f64> {
    let s = flavor.sigma_breve_f64();
    let radicand = |p: Point| {
        let r = 1.0 + 2.0 * p.v + s * p.u * p.u;
        if r > 0.0 {
            Ok(r)
        } else {
            Err(Error::OutsideDisk { u: p.u, v: p.v })
        }
    };
    let (r1, r2) = (radicand(p1)?, radicand(p2)?);
    sin_inv_flavor(flavor, (p2.u - p1.u).abs() / (r1 * r2).sqrt())
}

/// Empirical `h` with `f = h(d₀)`, reconstructed from samples.
#[derive(Debug, Clone, PartialEq)]
pub struct RelabelFit {
    pub table: MonotoneTable,
    /// Largest error of predicting an interior sample from its neighbours.
    pub residual: f64,
    /// Least-squares `c` in `h(t) ≈ c·t`.
    pub scale: f64,
    /// Largest `|f - c·d₀|`.
    pub scale_residual: f64,
}

impl RelabelFit {
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.table.eval(t)
    }
}

/// Reconstructs `h` from samples `(z, w, f(z, w))`, `d₀` computed under `spec`
/// with the identity label. Needs at least 10 distinct `d₀` values and a
/// nondecreasing `f` (slack [`MONOTONE_SLACK`]).
pub fn relabeled_equals(samples: &[(Point, Point, f64)], spec: &DistanceSpec) -> Result<RelabelFit> {
    let mut xy = samples
        .iter()
        .map(|&(z, w, f)| core_distance(spec.geometry, spec.flavor, z, w).map(|(d, _)| (d, f)))
        .collect::<Result<Vec<_>>>()?;
    xy.sort_by(|a, b| a.0.total_cmp(&b.0));
    xy.dedup_by(|b, a| {
        if (b.0 - a.0).abs() <= MONOTONE_SLACK {
            a.1 = a.1.max(b.1);
            true
        } else {
            false
        }
    });
    if xy.len() < 10 {
        return Err(Error::InsufficientSamples(format!(
            "{} distinct distances, need 10",
            xy.len()
        )));
    }
    for pair in xy.windows(2) {
        if pair[1].1 < pair[0].1 - MONOTONE_SLACK {
            return Err(Error::NonMonotoneSamples(format!(
                "f = {} at d = {} after f = {} at d = {}",
                pair[1].1, pair[1].0, pair[0].1, pair[0].0
            )));
        }
    }
    let residual = xy
        .windows(3)
        .map(|w| {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let (x2, y2) = w[2];
            (y1 - (y0 + (y2 - y0) * (x1 - x0) / (x2 - x0))).abs()
        })
        .fold(0.0, f64::max);
    let (sxy, sxx) = xy
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x * y, b + x * x));
    let scale = sxy / sxx;
    let scale_residual = xy
        .iter()
        .map(|&(x, y)| (y - scale * x).abs())
        .fold(0.0, f64::max);

    let mut points = Vec::with_capacity(xy.len() + 1);
    if xy[0].0 > 0.0 {
        points.push((0.0, 0.0));
    }
    points.extend(xy);
    // f(z, z) = 0 always; anchor the table there
    points[0] = (0.0, 0.0);
    Ok(RelabelFit {
        table: MonotoneTable::new(points)?,
        residual,
        scale,
        scale_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::MoebiusMap;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(u: f64, v: f64) -> HNumber {
        HNumber::complex(u, v)
    }

    #[test]
    fn invariant_f_examples() {
        assert_eq!(invariant_f(c(0.0, 1.0), c(0.0, 1.0)).unwrap().value, 0.0);
        let f = invariant_f(HNumber::dual(0.0, 1.0), HNumber::dual(2.0, 1.0)).unwrap();
        assert_eq!(f.value, 2.0);
        assert!(matches!(
            invariant_f(c(0.0, -1.0), c(0.0, 1.0)),
            Err(Error::NotInUpperHalfPlane { .. })
        ));
        let f = invariant_f(HNumber::double(0.0, 1.0), HNumber::double(0.0, 3.0)).unwrap();
        assert_eq!(f.interval, IntervalType::TimeLike);
        assert!((f.value - 2.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sin_inv_examples() {
        assert_eq!(sin_inv_flavor(ParabolicFlavor::Parabolic, 0.7).unwrap(), 1.4);
        assert_eq!(sin_inv_flavor(ParabolicFlavor::Elliptic, 0.0).unwrap(), 0.0);
        assert_eq!(
            sin_inv_flavor(ParabolicFlavor::Hyperbolic, 1.0).unwrap(),
            std::f64::consts::FRAC_PI_2
        );
        assert!(matches!(
            sin_inv_flavor(ParabolicFlavor::Hyperbolic, 1.5),
            Err(Error::DomainExceeded { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let spec = DistanceSpec::parabolic(ParabolicFlavor::Parabolic);
        let d = distance(&spec, HNumber::dual(0.0, 1.0), HNumber::dual(2.0, 1.0)).unwrap();
        assert_eq!(d.value, 2.0);

        let d = distance(&DistanceSpec::elliptic(), c(0.0, 1.0), c(0.0, 2.0)).unwrap();
        assert!((d.value - (1.0 / (2.0 * 2f64.sqrt())).asinh()).abs() < 1e-15);
        assert!((d.value - 0.5 * 2f64.ln()).abs() < 1e-15);

        let d = distance(&DistanceSpec::hyperbolic(), HNumber::double(0.0, 1.0), HNumber::double(1.0, 2.0)).unwrap();
        assert_eq!((d.value, d.interval), (0.0, IntervalType::LightLike));

        let spec = DistanceSpec::parabolic(ParabolicFlavor::Hyperbolic);
        assert!(matches!(
            distance(&spec, HNumber::dual(0.0, 1.0), HNumber::dual(3.0, 1.0)),
            Err(Error::DomainExceeded { .. })
        ));
    }

    #[test]
    fn vertical_pairs_are_flagged() {
        for flavor in ParabolicFlavor::ALL {
            let d = distance_points(&DistanceSpec::parabolic(flavor), Point::new(0.5, 1.0), Point::new(0.5, 7.0)).unwrap();
            assert_eq!(d.value, 0.0);
            assert!(d.vertical);
        }
        let d = distance_points(&DistanceSpec::elliptic(), Point::new(0.5, 1.0), Point::new(0.5, 7.0)).unwrap();
        assert!(!d.vertical && d.value > 0.0);
    }

    #[test]
    fn labels() {
        let spec = DistanceSpec::parabolic(ParabolicFlavor::Parabolic);
        let double = spec.with_label(Label::Double).unwrap();
        let d = distance(&double, HNumber::dual(0.0, 1.0), HNumber::dual(2.0, 1.0)).unwrap();
        assert_eq!(d.value, 4.0);
        assert!(spec.with_label(Label::Scaled(-1.0)).is_err());
        assert!(spec.with_label(Label::SinhInv).is_ok());
        assert!(spec.with_label(Label::SinInv).is_ok());
        assert!(matches!(
            MonotoneTable::new(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)]),
            Err(Error::NonMonotoneSamples(_))
        ));
        let t = MonotoneTable::new(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(t.eval(2.0).unwrap(), 2.5);
        assert!(t.eval(3.5).is_err());
    }

    fn random_map(rng: &mut ChaCha8Rng) -> MoebiusMap {
        loop {
            let [a, b, c]: [f64; 3] = [(); 3].map(|_| rng.gen_range(-2.0..2.0));
            if a.abs() < 0.1 {
                continue;
            }
            // ad - bc = 1
            if let Ok(g) = MoebiusMap::new(a, b, c, (1.0 + b * c) / a) {
                return g;
            }
        }
    }

    fn all_specs() -> Vec<DistanceSpec> {
        let mut specs = vec![DistanceSpec::elliptic(), DistanceSpec::hyperbolic()];
        specs.extend(ParabolicFlavor::ALL.map(DistanceSpec::parabolic));
        specs
    }

    #[test]
    fn invariance_under_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in all_specs() {
            let kind = spec.geometry;
            let mut checked = 0;
            while checked < 300 {
                let g = random_map(&mut rng);
                let z = HNumber::new(kind, rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
                let w = HNumber::new(kind, rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0));
                let (Ok(gz), Ok(gw)) = (g.apply(z), g.apply(w)) else { continue };
                let Ok(before) = distance(&spec, z, w) else { continue };
                let Ok(after) = distance(&spec, gz, gw) else { continue };
                assert_eq!(before.interval, after.interval);
                let scale = 1.0 + before.value.abs();
                assert!(
                    (before.value - after.value).abs() <= 1e-9 * scale,
                    "{spec}: {} vs {}",
                    before.value,
                    after.value
                );
                checked += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_and_zero_on_diagonal(u1 in -5.0f64..5.0, v1 in 0.1f64..5.0, u2 in -5.0f64..5.0, v2 in 0.1f64..5.0) {
            for spec in all_specs() {
                let (z, w) = (Point::new(u1, v1), Point::new(u2, v2));
                match (distance_points(&spec, z, w), distance_points(&spec, w, z)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a.value, b.value),
                    (Err(_), Err(_)) => {}
                    _ => prop_assert!(false, "asymmetric domain"),
                }
                prop_assert_eq!(distance_points(&spec, z, z).unwrap().value, 0.0);
            }
        }
    }

    #[test]
    fn increasing_along_horizontal_ray() {
        for spec in all_specs() {
            let mut prev = 0.0;
            for i in 1..200 {
                let s = f64::from(i) * 0.01;
                let d = distance_points(&spec, Point::I, Point::new(s, 1.0)).unwrap().value;
                assert!(d > prev, "{spec} at s = {s}");
                prev = d;
            }
        }
    }

    #[test]
    fn cayley_examples() {
        let w = cayley(HNumber::dual(0.0, 1.0), ParabolicFlavor::Parabolic).unwrap();
        assert_eq!((w.re, w.im), (0.0, 0.5));
        assert!(cayley(c(0.0, 1.0), ParabolicFlavor::Parabolic).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for flavor in ParabolicFlavor::ALL {
            for _ in 0..100 {
                let w = HNumber::dual(rng.gen_range(-5.0..5.0), rng.gen_range(0.01..5.0));
                let back = cayley_inverse(cayley(w, flavor).unwrap(), flavor).unwrap();
                assert!((back.re - w.re).abs() <= 1e-10 && (back.im - w.im).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn cayley_sends_orthogonal_cycle_to_disk_axis() {
        // the cycle (σ̆, 0, 1, 1), v = (1 + σ̆u²)/2, lands on the disk's real line
        for flavor in ParabolicFlavor::ALL {
            let s = flavor.sigma_breve_f64();
            for i in -20..=20 {
                let u = f64::from(i) * 0.1;
                let v = (1.0 + s * u * u) / 2.0;
                let img = cayley(HNumber::dual(u, v), flavor).unwrap();
                assert!(img.im.abs() <= 1e-15, "{flavor}: {img}");
                assert_eq!(img.re, u);
            }
        }
    }

    #[test]
    fn disk_distance_examples() {
        for flavor in ParabolicFlavor::ALL {
            let p = Point::new(0.3, 0.1);
            assert_eq!(disk_distance(flavor, p, p).unwrap(), 0.0);
        }
        let d = disk_distance(ParabolicFlavor::Parabolic, Point::new(0.0, 0.0), Point::new(0.75, 0.0)).unwrap();
        assert_eq!(d, 1.5);
        assert!(matches!(
            disk_distance(ParabolicFlavor::Elliptic, Point::new(0.0, 0.0), Point::new(1.5, 0.0)),
            Err(Error::OutsideDisk { .. })
        ));
    }

    #[test]
    fn disk_distance_additive_on_real_axis() {
        for flavor in ParabolicFlavor::ALL {
            for (a, b) in [(0.1, 0.2), (0.3, 0.9), (0.05, 0.5)] {
                let d = |x: f64, y: f64| disk_distance(flavor, Point::new(x, 0.0), Point::new(y, 0.0)).unwrap();
                let defect = d(0.0, a) + d(a, b) - d(0.0, b);
                assert!(defect.abs() <= 1e-12, "{flavor}: {defect}");
            }
        }
    }

    #[test]
    fn disk_distance_is_pulled_back_half_plane_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for flavor in ParabolicFlavor::ALL {
            let spec = DistanceSpec::parabolic(flavor);
            for _ in 0..50 {
                let z = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..2.0));
                let w = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.2..2.0));
                let Ok(expected) = distance_points(&spec, z, w) else { continue };
                let to_disk = |p: Point| cayley(HNumber::dual(p.u, p.v), flavor).unwrap().point();
                let got = disk_distance(flavor, to_disk(z), to_disk(w)).unwrap();
                assert!((got - expected.value).abs() <= 1e-12, "{flavor}");
            }
        }
    }

    fn samples(spec: &DistanceSpec, f: impl Fn(f64) -> f64) -> Vec<(Point, Point, f64)> {
        (1..=40)
            .map(|i| {
                let w = Point::new(f64::from(i) * 0.04, 1.0 + f64::from(i) * 0.01);
                let d0 = core_distance(spec.geometry, spec.flavor, Point::I, w).unwrap().0;
                (Point::I, w, f(d0))
            })
            .collect()
    }

    #[test]
    fn relabel_recovers_identity_and_scaling() {
        for spec in all_specs() {
            let fit = relabeled_equals(&samples(&spec, |t| t), &spec).unwrap();
            assert!(fit.residual <= 1e-9 && (fit.scale - 1.0).abs() <= 1e-9);
            let fit = relabeled_equals(&samples(&spec, |t| 3.0 * t), &spec).unwrap();
            assert!(fit.residual <= 1e-9 && (fit.scale - 3.0).abs() <= 1e-9);
            assert!(fit.scale_residual <= 1e-9);
        }
    }

    #[test]
    fn relabel_recovers_square() {
        let spec = DistanceSpec::parabolic(ParabolicFlavor::Parabolic);
        let fit = relabeled_equals(&samples(&spec, |t| t * t), &spec).unwrap();
        for x in [0.1, 0.5, 1.0, 1.2] {
            assert!((fit.eval(x).unwrap() - x * x).abs() <= 1e-2);
        }
        let bad = samples(&spec, |t| (3.0 * t).sin());
        assert!(matches!(relabeled_equals(&bad, &spec), Err(Error::NonMonotoneSamples(_))));
        assert!(matches!(
            relabeled_equals(&samples(&spec, |t| t)[..5], &spec),
            Err(Error::InsufficientSamples(_))
        ));
    }
}
