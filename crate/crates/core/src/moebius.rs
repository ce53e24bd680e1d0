//! Determinant-one real matrices acting by fractional-linear maps.

use std::fmt;

use crate::metric::PolyCurve;
use crate::numbers::{GeometryKind, HNumber, Point};
use crate::{Error, Result};

/// Tolerance on `|ad - bc - 1|` accepted by [`MoebiusMap::new`].
pub const DET_TOLERANCE: f64 = 1e-9;

/// Drift of the determinant beyond which [`MoebiusMap::compose`] renormalizes.
const RENORMALIZE_DRIFT: f64 = 1e-12;

/// The matrix `[[a, b], [c, d]]` with `ad - bc = 1`, acting by
/// `w ↦ (a·w + b) / (c·w + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

/// A real 2×2 matrix `[[m00, m01], [m10, m11]]`.
pub type Mat2 = [[f64; 2]; 2];

/// The three one-parameter subgroups fixing `i` up to conjugacy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubgroupKind {
    /// Rotations `[[cos θ, -sin θ], [sin θ, cos θ]]`.
    K,
    /// `[[1, 0], [t, 1]]`.
    NPrime,
    /// Boosts `[[cosh α, sinh α], [sinh α, cosh α]]`.
    APrime,
}

impl SubgroupKind {
    pub const ALL: [SubgroupKind; 3] = [SubgroupKind::K, SubgroupKind::NPrime, SubgroupKind::APrime];

    /// The subgroup that fixes the imaginary unit of `kind`'s numbers.
    pub fn stabilizer_of(kind: GeometryKind) -> Self {
        match kind {
            GeometryKind::Elliptic => SubgroupKind::K,
            GeometryKind::Parabolic => SubgroupKind::NPrime,
            GeometryKind::Hyperbolic => SubgroupKind::APrime,
        }
    }

    /// The number system in which this subgroup fixes the imaginary unit.
    pub fn geometry(self) -> GeometryKind {
        match self {
            SubgroupKind::K => GeometryKind::Elliptic,
            SubgroupKind::NPrime => GeometryKind::Parabolic,
            SubgroupKind::APrime => GeometryKind::Hyperbolic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SubgroupKind::K => "K",
            SubgroupKind::NPrime => "N'",
            SubgroupKind::APrime => "A'",
        }
    }
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Validates the determinant-one invariant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det - 1.0).abs().le(&DET_TOLERANCE) {
            return Err(Error::InvalidDeterminant(det));
        }
        Ok(MoebiusMap { a, b, c, d })
    }

    /// Scales a matrix of positive determinant into `SL2(R)`.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0 && det.is_finite()) {
            return Err(Error::InvalidDeterminant(det));
        }
        let s = det.sqrt().recip();
        Ok(MoebiusMap {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · other`, i.e. apply `other` first.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let det = a * d - b * c;
        if (det - 1.0).abs() > RENORMALIZE_DRIFT && det > 0.0 {
            let s = det.sqrt().recip();
            MoebiusMap {
                a: a * s,
                b: b * s,
                c: c * s,
                d: d * s,
            }
        } else {
            MoebiusMap { a, b, c, d }
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// The conjugate `self · h · self⁻¹`.
    pub fn conjugate(&self, h: &MoebiusMap) -> MoebiusMap {
        self.compose(h).compose(&self.inverse())
    }

    /// `(a·w + b) / (c·w + d)` in the number system of `w`.
    pub fn apply(&self, w: HNumber) -> Result<HNumber> {
        let kind = w.kind;
        let num = w.scale(self.a) + HNumber::real(kind, self.b);
        let den = w.scale(self.c) + HNumber::real(kind, self.d);
        num.checked_div(den).map_err(|_| Error::PointAtInfinity)
    }

    /// Whether `self` fixes the imaginary unit of `kind` to within 1e-9.
    pub fn fixes_i(&self, kind: GeometryKind) -> bool {
        match self.apply(HNumber::unit(kind)) {
            Ok(w) => w.re.abs() <= 1e-9 && (w.im - 1.0).abs() <= 1e-9,
            Err(_) => false,
        }
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// The element of `kind` with parameter θ, t or α.
pub fn subgroup_element(kind: SubgroupKind, param: f64) -> MoebiusMap {
    match kind {
        SubgroupKind::K => {
            let (s, c) = param.sin_cos();
            MoebiusMap { a: c, b: -s, c: s, d: c }
        }
        SubgroupKind::NPrime => MoebiusMap {
            a: 1.0,
            b: 0.0,
            c: param,
            d: 1.0,
        },
        SubgroupKind::APrime => {
            let (s, c) = (param.sinh(), param.cosh());
            MoebiusMap { a: c, b: s, c: s, d: c }
        }
    }
}

/// The affine map `w ↦ (w - u₀)/v₀`, scaled to determinant one, sending `w0` to `i`.
pub fn normalizer_to_i(w0: Point) -> Result<MoebiusMap> {
    let w0 = w0.require_upper()?;
    let r = w0.v.sqrt();
    Ok(MoebiusMap {
        a: 1.0 / r,
        b: -w0.u / r,
        c: 0.0,
        d: r,
    })
}

/// Linear part at `i` of the rotation with parameter `param`, as displayed
/// for the metric computation: rotation by `2θ`, `[[1, 0], [2t, 1]]`, or the
/// boost by `2α`.
///
/// The derivative of `w ↦ subgroup_element(kind, p)·w` at `i` equals
/// `jacobian_at_i(kind, -p)`; both preserve `du² - σ dv²`.
pub fn jacobian_at_i(kind: SubgroupKind, param: f64) -> Mat2 {
    match kind {
        SubgroupKind::K => {
            let (s, c) = (2.0 * param).sin_cos();
            [[c, -s], [s, c]]
        }
        SubgroupKind::NPrime => [[1.0, 0.0], [2.0 * param, 1.0]],
        SubgroupKind::APrime => {
            let (s, c) = ((2.0 * param).sinh(), (2.0 * param).cosh());
            [[c, s], [s, c]]
        }
    }
}

/// Central-difference Jacobian of `(u, v) ↦ g·(u + i v)` at `p`, with the
/// number system of `kind`. Columns are `∂/∂u` and `∂/∂v`.
pub fn numeric_jacobian(g: &MoebiusMap, kind: GeometryKind, p: Point, step: f64) -> Result<Mat2> {
    let eval = |du: f64, dv: f64| g.apply(HNumber::new(kind, p.u + du, p.v + dv));
    let (up, um) = (eval(step, 0.0)?, eval(-step, 0.0)?);
    let (vp, vm) = (eval(0.0, step)?, eval(0.0, -step)?);
    let h2 = 2.0 * step;
    Ok([
        [(up.re - um.re) / h2, (vp.re - vm.re) / h2],
        [(up.im - um.im) / h2, (vp.im - vm.im) / h2],
    ])
}

/// The points `subgroup_element(kind, p)·w0` for each parameter.
pub fn orbit_points(kind: SubgroupKind, w0: HNumber, params: &[f64]) -> Result<Vec<HNumber>> {
    params
        .iter()
        .map(|&p| subgroup_element(kind, p).apply(w0))
        .collect()
}

/// [`orbit_points`] as a curve parameterized by the subgroup parameter;
/// `params` must be strictly increasing with at least two entries.
pub fn orbit_curve(kind: SubgroupKind, w0: HNumber, params: &[f64]) -> Result<PolyCurve> {
    let points = orbit_points(kind, w0, params)?;
    PolyCurve::new(
        w0.kind,
        params.iter().zip(points).map(|(&p, w)| (p, w.point())).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::invariant_f;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat_close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).abs() <= tol))
    }

    fn random_map(rng: &mut impl Rng) -> MoebiusMap {
        loop {
            let a: f64 = rng.gen_range(-2.0..2.0);
            if a.abs() < 0.3 {
                continue;
            }
            let b: f64 = rng.gen_range(-2.0..2.0);
            let c: f64 = rng.gen_range(-2.0..2.0);
            return MoebiusMap::new(a, b, c, (1.0 + b * c) / a).unwrap();
        }
    }

    #[test]
    fn rejects_bad_determinant() {
        assert!(matches!(
            MoebiusMap::new(2.0, 0.0, 0.0, 1.0),
            Err(Error::InvalidDeterminant(_))
        ));
        let g = MoebiusMap::normalized(2.0, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(g, MoebiusMap::IDENTITY);
    }

    #[test]
    fn composition_examples() {
        let g = MoebiusMap::new(2.0, 1.0, 3.0, 2.0).unwrap();
        assert_eq!(MoebiusMap::IDENTITY.compose(&g), g);
        let t = MoebiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let t_inv = MoebiusMap::new(1.0, -1.0, 0.0, 1.0).unwrap();
        assert_eq!(t.compose(&t_inv), MoebiusMap::IDENTITY);

        let (a, b) = (0.37, 1.91);
        let lhs = subgroup_element(SubgroupKind::K, a).compose(&subgroup_element(SubgroupKind::K, b));
        let rhs = subgroup_element(SubgroupKind::K, a + b);
        for (x, y) in lhs.entries().iter().zip(rhs.entries()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn compose_keeps_long_products_in_sl2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut g = MoebiusMap::IDENTITY;
        for i in 0..100_000 {
            let kind = SubgroupKind::ALL[i % 3];
            g = g.compose(&subgroup_element(kind, rng.gen_range(-0.01..0.01)));
        }
        assert!((g.det() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn subgroup_elements() {
        assert_eq!(
            subgroup_element(SubgroupKind::NPrime, 2.0),
            MoebiusMap::new(1.0, 0.0, 2.0, 1.0).unwrap()
        );
        assert_eq!(subgroup_element(SubgroupKind::K, 0.0), MoebiusMap::IDENTITY);
        assert_eq!(subgroup_element(SubgroupKind::APrime, 0.0), MoebiusMap::IDENTITY);
    }

    #[test]
    fn apply_examples() {
        let w = HNumber::complex(2.0, 3.0);
        assert_eq!(MoebiusMap::IDENTITY.apply(w).unwrap(), w);

        let n1 = subgroup_element(SubgroupKind::NPrime, 1.0);
        let img = n1.apply(HNumber::dual(1.0, 1.0)).unwrap();
        assert!((img.re - 0.5).abs() < 1e-15 && (img.im - 0.25).abs() < 1e-15);
        assert_eq!(n1.apply(HNumber::dual(-1.0, 1.0)), Err(Error::PointAtInfinity));
    }

    #[test]
    fn dual_action_matches_symbolic_expansion() {
        // N'(t)·(u + εv) = u/(tu+1) + ε v/(tu+1)²
        for &(t, u, v) in &[(0.3, 1.2, 0.7), (-2.0, 0.1, 3.0), (5.0, -0.15, 0.2)] {
            let w = subgroup_element(SubgroupKind::NPrime, t)
                .apply(HNumber::dual(u, v))
                .unwrap();
            let s = t * u + 1.0;
            assert!((w.re - u / s).abs() < 1e-14);
            assert!((w.im - v / (s * s)).abs() < 1e-13);
        }
    }

    #[test]
    fn fixes_i_examples() {
        assert!(subgroup_element(SubgroupKind::K, 0.7).fixes_i(GeometryKind::Elliptic));
        assert!(subgroup_element(SubgroupKind::NPrime, 0.5).fixes_i(GeometryKind::Parabolic));
        assert!(subgroup_element(SubgroupKind::APrime, -1.3).fixes_i(GeometryKind::Hyperbolic));
        let t = MoebiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(!t.fixes_i(GeometryKind::Elliptic));
        // K does not stabilize the dual unit
        assert!(!subgroup_element(SubgroupKind::K, 0.7).fixes_i(GeometryKind::Parabolic));
    }

    #[test]
    fn normalizer_examples() {
        for kind in GeometryKind::ALL {
            let g = normalizer_to_i(Point::new(2.0, 3.0)).unwrap();
            let w = g.apply(HNumber::new(kind, 2.0, 3.0)).unwrap();
            assert!(w.re.abs() <= 1e-12 && (w.im - 1.0).abs() <= 1e-12);
        }
        assert_eq!(normalizer_to_i(Point::I).unwrap(), MoebiusMap::IDENTITY);
        assert!(matches!(
            normalizer_to_i(Point::new(1.0, -1.0)),
            Err(Error::NotInUpperHalfPlane { .. })
        ));
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian_at_i(SubgroupKind::NPrime, 0.4), [[1.0, 0.0], [0.8, 1.0]]);
        assert_eq!(jacobian_at_i(SubgroupKind::K, 0.0), [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn jacobian_matches_finite_differences_with_reversed_parameter() {
        for kind in SubgroupKind::ALL {
            for &p in &[-0.9, -0.2, 0.35, 1.1] {
                let g = subgroup_element(kind, p);
                let fd = numeric_jacobian(&g, kind.geometry(), Point::I, 1e-6).unwrap();
                let displayed = jacobian_at_i(kind, -p);
                assert!(
                    mat_close(&fd, &displayed, 1e-6),
                    "{kind:?} p={p}: fd {fd:?} vs {displayed:?}"
                );
            }
        }
    }

    #[test]
    fn jacobian_preserves_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in SubgroupKind::ALL {
            let sigma = kind.geometry().sigma_f64();
            for _ in 0..100 {
                let j = jacobian_at_i(kind, rng.gen_range(-2.0..2.0));
                // Jᵀ·diag(1, -σ)·J
                let q = |r: usize, c: usize| j[0][r] * j[0][c] - sigma * j[1][r] * j[1][c];
                let scale = j.iter().flatten().map(|x| x * x).sum::<f64>();
                assert!((q(0, 0) - 1.0).abs() <= 1e-12 * scale);
                assert!(q(0, 1).abs() <= 1e-12 * scale);
                assert!((q(1, 1) + sigma).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for kind in GeometryKind::ALL {
            let mut checked = 0;
            while checked < 200 {
                let (g, h) = (random_map(&mut rng), random_map(&mut rng));
                let w = HNumber::new(kind, rng.gen_range(-2.0..2.0), rng.gen_range(0.1..3.0));
                let (Ok(a), Ok(hw)) = (g.compose(&h).apply(w), h.apply(w)) else {
                    continue;
                };
                let Ok(b) = g.apply(hw) else { continue };
                let scale = 1.0 + a.re.abs().max(a.im.abs());
                if scale > 1e3 {
                    continue;
                }
                assert!((a.re - b.re).abs() <= 1e-10 * scale, "{kind} {a} {b}");
                assert!((a.im - b.im).abs() <= 1e-10 * scale, "{kind} {a} {b}");
                checked += 1;
            }
        }
    }

    #[test]
    fn nprime_orbits_keep_u2_over_v() {
        let params: Vec<f64> = (0..50).map(|i| -0.9 + 0.03 * i as f64).collect();
        let w0 = HNumber::dual(0.8, 1.7);
        let orbit = orbit_points(SubgroupKind::NPrime, w0, &params).unwrap();
        let c0 = w0.re * w0.re / w0.im;
        for w in orbit {
            assert!((w.re * w.re / w.im - c0).abs() <= 1e-10);
        }
    }

    #[test]
    fn orbit_examples() {
        let params: Vec<f64> = (0..20).map(|i| i as f64 * 0.5 - 5.0).collect();
        let orbit = orbit_points(SubgroupKind::NPrime, HNumber::dual(0.0, 1.0), &params).unwrap();
        assert!(orbit.iter().all(|w| w.point() == Point::I));

        let single = orbit_points(SubgroupKind::NPrime, HNumber::dual(1.0, 1.0), &[0.0]).unwrap();
        assert_eq!(single, vec![HNumber::dual(1.0, 1.0)]);
        // a single sample is not a curve
        assert!(orbit_curve(SubgroupKind::NPrime, HNumber::dual(1.0, 1.0), &[0.0]).is_err());

        let params: Vec<f64> = (0..400).map(|i| i as f64 * std::f64::consts::PI / 399.0).collect();
        let w0 = HNumber::complex(0.0, 2.0);
        let orbit = orbit_curve(SubgroupKind::K, w0, &params).unwrap();
        let f0 = invariant_f(HNumber::complex(0.0, 1.0), w0).unwrap().value;
        for s in orbit.samples() {
            let f = invariant_f(HNumber::complex(0.0, 1.0), HNumber::from_point(GeometryKind::Elliptic, s.point))
                .unwrap()
                .value;
            assert!((f - f0).abs() <= 1e-9);
        }
        assert_eq!(
            orbit_points(SubgroupKind::NPrime, HNumber::dual(-1.0, 1.0), &[0.0, 1.0]),
            Err(Error::PointAtInfinity)
        );
    }
}
