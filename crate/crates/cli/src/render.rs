//! Panels of cycles, orbits and triangle rasters, written as SVG and CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ephgeo::cycles::{
    elliptic_geodesic_through_i, geodesic_family, geodesics_through_pair, hyperbolic_geodesics_through_i, Cycle,
};
use ephgeo::geodesics::{region_raster, Bbox, Raster, TriangleClass};
use ephgeo::distance::DistanceSpec;
use ephgeo::moebius::{normalizer_to_i, subgroup_element, SubgroupKind};
use ephgeo::numbers::{GeometryKind, HNumber, Point};

use crate::scene::{point, Panel, Scene};
use crate::CliError;

/// Columns sampled across the viewport when tracing a cycle.
const TRACE_COLUMNS: usize = 800;
/// Samples of each orbit.
const ORBIT_SAMPLES: usize = 721;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Geodesic,
    Orbit,
    PairGeodesic,
}

impl Role {
    fn color(self) -> &'static str {
        match self {
            Role::Geodesic | Role::PairGeodesic => "blue",
            Role::Orbit => "green",
        }
    }
}

/// A polyline with its curve parameter at each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub id: String,
    pub role: Role,
    pub label: Option<String>,
    pub points: Vec<(f64, Point)>,
}

#[derive(Debug, Clone)]
pub struct PanelRender {
    pub title: String,
    pub viewport: [f64; 4],
    pub pixels: [u32; 2],
    pub curves: Vec<Curve>,
    pub rasters: Vec<Raster>,
    pub markers: Vec<Point>,
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn cycle_label(c: &Cycle) -> String {
    let c = c.canonical();
    format!("({},[{},{}],{})", fmt_num(c.k), fmt_num(c.l), fmt_num(c.n), fmt_num(c.m))
}

/// Splits a run of candidate points into pieces of consecutive valid ones.
fn pieces(candidates: impl IntoIterator<Item = Option<(f64, Point)>>) -> Vec<Vec<(f64, Point)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for c in candidates {
        match c {
            Some(p) => current.push(p),
            None => {
                if current.len() >= 2 {
                    out.push(std::mem::take(&mut current));
                } else {
                    current.clear();
                }
            }
        }
    }
    if current.len() >= 2 {
        out.push(current);
    }
    out
}

/// Polylines of the part of `c` above the real axis near the viewport.
///
/// Solves `A v² + B v + C(u) = 0` column by column, `A` from the cycle's
/// quadratic term; turning points where the discriminant vanishes are
/// located by bisection and shared by both branches.
pub fn trace_cycle(c: &Cycle, viewport: [f64; 4]) -> Vec<Vec<(f64, Point)>> {
    let c = c.canonical();
    let [umin, umax, vmin, vmax] = viewport;
    let (width, height) = (umax - umin, vmax - vmin);
    let visible = |v: f64| v > 0.0 && v > vmin - 2.0 * height && v < vmax + 2.0 * height;
    let a = c.k * c.shape.v2_coefficient();
    let b = -2.0 * c.n;
    let cu = |u: f64| c.k * u * u - 2.0 * c.l * u + c.m;

    if a.abs() <= 1e-12 && b.abs() <= 1e-12 {
        // C(u) = 0 alone: vertical lines
        let mut roots = Vec::new();
        if c.k.abs() <= 1e-12 {
            roots.push(c.m / (2.0 * c.l));
        } else {
            let disc = c.l * c.l - c.k * c.m;
            if disc >= 0.0 {
                roots.push((c.l - disc.sqrt()) / c.k);
                roots.push((c.l + disc.sqrt()) / c.k);
            }
        }
        let v0 = vmin.max(0.0) + 1e-9 * height;
        return roots
            .into_iter()
            .filter(|u| (umin - width..=umax + width).contains(u))
            .map(|u| vec![(v0, Point::new(u, v0)), (vmax, Point::new(u, vmax))])
            .collect();
    }

    let us: Vec<f64> = (0..=TRACE_COLUMNS)
        .map(|i| umin - 0.5 * width + 2.0 * width * i as f64 / TRACE_COLUMNS as f64)
        .collect();
    if a.abs() <= 1e-12 {
        let branch = us.iter().map(|&u| {
            let v = -cu(u) / b;
            visible(v).then_some((u, Point::new(u, v)))
        });
        return pieces(branch);
    }

    let disc = |u: f64| b * b - 4.0 * a * cu(u);
    let roots = |d: f64| {
        let r = d.max(0.0).sqrt();
        let (v1, v2) = ((-b - r) / (2.0 * a), (-b + r) / (2.0 * a));
        (v1.min(v2), v1.max(v2))
    };
    let turning = |lo: f64, hi: f64| {
        let (mut lo, mut hi) = (lo, hi);
        let positive_lo = disc(lo) >= 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (disc(mid) >= 0.0) == positive_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if positive_lo { lo } else { hi }
    };

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (k, &u) in us.iter().enumerate() {
        let d = disc(u);
        if k > 0 {
            let prev = us[k - 1];
            if (disc(prev) >= 0.0) != (d >= 0.0) {
                let ut = turning(prev, u);
                let v = roots(disc(ut)).0;
                let p = visible(v).then_some((ut, Point::new(ut, v)));
                if d >= 0.0 {
                    lower.push(None);
                    upper.push(None);
                }
                lower.push(p);
                upper.push(p);
                if d < 0.0 {
                    lower.push(None);
                    upper.push(None);
                }
            }
        }
        if d < 0.0 {
            lower.push(None);
            upper.push(None);
            continue;
        }
        let (v1, v2) = roots(d);
        lower.push(visible(v1).then_some((u, Point::new(u, v1))));
        upper.push(visible(v2).then_some((u, Point::new(u, v2))));
    }
    let mut out = pieces(lower);
    out.extend(pieces(upper));
    out
}

/// Stabilizer orbit of `through` around `center`: the subgroup fixing `i`
/// conjugated by the map sending `center` to `i`.
pub fn equidistant_orbit(kind: GeometryKind, center: Point, through: Point, viewport: [f64; 4]) -> Result<Vec<Vec<(f64, Point)>>, CliError> {
    let n = normalizer_to_i(center)?;
    let n_inv = n.inverse();
    let sub = SubgroupKind::stabilizer_of(kind);
    let w0 = HNumber::from_point(kind, through);
    let [_, _, vmin, vmax] = viewport;
    let height = vmax - vmin;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let candidates = (0..ORBIT_SAMPLES).map(|i| {
        let theta = -half_pi + std::f64::consts::PI * (i as f64 + 0.5) / ORBIT_SAMPLES as f64;
        let param = match sub {
            SubgroupKind::K => theta,
            _ => theta.tan(),
        };
        let g = n_inv.compose(&subgroup_element(sub, param)).compose(&n);
        let w = g.apply(w0).ok().filter(HNumber::is_finite)?;
        let p = w.point();
        (p.v > 0.0 && p.v < vmax + 2.0 * height).then_some((param, p))
    });
    Ok(pieces(candidates))
}

fn through_i(panel: &Panel, t: f64) -> Result<Cycle, CliError> {
    Ok(match panel.kind()? {
        GeometryKind::Elliptic => elliptic_geodesic_through_i(t),
        GeometryKind::Parabolic => geodesic_family(panel.parabolic_flavor()?, t),
        GeometryKind::Hyperbolic => {
            let (space, time) = hyperbolic_geodesics_through_i(t);
            if panel.timelike { time } else { space }
        }
    })
}

pub fn build_panel(panel: &Panel, index: usize) -> Result<PanelRender, CliError> {
    let kind = panel.kind()?;
    let mut curves = Vec::new();
    let mut markers = Vec::new();
    let push = |curves: &mut Vec<Curve>, role: Role, tag: String, label: Option<String>, polylines: Vec<Vec<(f64, Point)>>| {
        for (k, points) in polylines.into_iter().enumerate() {
            curves.push(Curve {
                id: format!("p{index}-{tag}-{k}"),
                role,
                label: if k == 0 { label.clone() } else { None },
                points,
            });
        }
    };

    for (s, set) in panel.geodesics.iter().enumerate() {
        for (j, &t) in set.t.iter().enumerate() {
            let c = through_i(panel, t)?;
            let label = set.labels.then(|| cycle_label(&c));
            push(&mut curves, Role::Geodesic, format!("g{s}.{j}"), label, trace_cycle(&c, panel.viewport));
        }
    }
    for (s, set) in panel.orbits.iter().enumerate() {
        markers.push(point(set.center));
        for (j, &p) in set.through.iter().enumerate() {
            let lines = equidistant_orbit(kind, point(set.center), point(p), panel.viewport)?;
            push(&mut curves, Role::Orbit, format!("o{s}.{j}"), None, lines);
        }
    }
    let mut rasters = Vec::new();
    if kind == GeometryKind::Parabolic {
        let flavor = panel.parabolic_flavor()?;
        for (s, pair) in panel.pairs.iter().enumerate() {
            let (w1, w2) = (point(pair.w1), point(pair.w2));
            markers.extend([w1, w2]);
            for (j, c) in geodesics_through_pair(w1, w2, flavor)?.cycles.iter().enumerate() {
                push(&mut curves, Role::PairGeodesic, format!("w{s}.{j}"), Some(cycle_label(c)), trace_cycle(c, panel.viewport));
            }
        }
        let spec = DistanceSpec::parabolic(flavor);
        let [umin, umax, vmin, vmax] = panel.viewport;
        let bbox = Bbox::new(umin, umax, vmin.max(0.0), vmax)?;
        for (s, r) in panel.rasters.iter().enumerate() {
            let (w1, w2) = (point(r.w1), point(r.w2));
            markers.extend([w1, w2]);
            let raster = region_raster(&spec, w1, w2, bbox, r.cells[0], r.cells[1], r.branch.into())?;
            for (j, c) in raster.bounding.iter().enumerate() {
                push(&mut curves, Role::PairGeodesic, format!("r{s}.{j}"), Some(cycle_label(c)), trace_cycle(c, panel.viewport));
            }
            rasters.push(raster);
        }
    }
    Ok(PanelRender {
        title: panel.title.clone(),
        viewport: panel.viewport,
        pixels: panel.pixels,
        curves,
        rasters,
        markers,
    })
}

pub fn render_scene(scene: &Scene) -> Result<Vec<PanelRender>, CliError> {
    scene
        .panels
        .iter()
        .enumerate()
        .map(|(i, p)| build_panel(p, i + 1))
        .collect()
}

impl PanelRender {
    fn to_px(&self, p: Point) -> (f64, f64) {
        let [umin, umax, vmin, vmax] = self.viewport;
        let [w, h] = self.pixels;
        (
            (p.u - umin) / (umax - umin) * f64::from(w),
            f64::from(h) - (p.v - vmin) / (vmax - vmin) * f64::from(h),
        )
    }

    /// SVG elements of the panel in its own pixel frame.
    pub fn svg_body(&self, clip_id: &str) -> String {
        let [w, h] = self.pixels;
        let mut s = String::new();
        let _ = writeln!(s, "<defs><clipPath id=\"{clip_id}\"><rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\"/></clipPath></defs>");
        let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"white\" stroke=\"black\"/>");
        let _ = writeln!(s, "<g clip-path=\"url(#{clip_id})\">");
        for raster in &self.rasters {
            let du = (raster.bbox.umax - raster.bbox.umin) / raster.nx as f64;
            let dv = (raster.bbox.vmax - raster.bbox.vmin) / raster.ny as f64;
            for j in 0..raster.ny {
                for i in 0..raster.nx {
                    if raster.relation[j * raster.nx + i] != Some(TriangleClass::ReverseTriangle) {
                        continue;
                    }
                    let corner = Point::new(raster.bbox.umin + i as f64 * du, raster.bbox.vmin + (j + 1) as f64 * dv);
                    let far = Point::new(corner.u + du, corner.v - dv);
                    let (x0, y0) = self.to_px(corner);
                    let (x1, y1) = self.to_px(far);
                    let _ = writeln!(
                        s,
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"red\" fill-opacity=\"0.5\" stroke=\"none\"/>",
                        fmt_num(x0),
                        fmt_num(y0),
                        fmt_num(x1 - x0),
                        fmt_num(y1 - y0)
                    );
                }
            }
        }
        let [umin, umax, vmin, vmax] = self.viewport;
        if vmin <= 0.0 && vmax >= 0.0 {
            let (x0, y) = self.to_px(Point::new(umin, 0.0));
            let (x1, _) = self.to_px(Point::new(umax, 0.0));
            let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>", fmt_num(x0), fmt_num(y), fmt_num(x1), fmt_num(y));
        }
        if umin <= 0.0 && umax >= 0.0 {
            let (x, y0) = self.to_px(Point::new(0.0, vmin));
            let (_, y1) = self.to_px(Point::new(0.0, vmax));
            let _ = writeln!(s, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"2,2\"/>", fmt_num(x), fmt_num(y0), fmt_num(x), fmt_num(y1));
        }
        for c in &self.curves {
            let pts: Vec<String> = c
                .points
                .iter()
                .map(|(_, p)| {
                    let (x, y) = self.to_px(*p);
                    format!("{},{}", fmt_num(x), fmt_num(y))
                })
                .collect();
            let _ = writeln!(
                s,
                "<polyline id=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>",
                c.id,
                pts.join(" "),
                c.role.color()
            );
        }
        let mut placed = Vec::new();
        for c in &self.curves {
            let Some(label) = &c.label else { continue };
            // anchor at the highest visible point, kept clear of the right edge
            let top = c
                .points
                .iter()
                .map(|(_, p)| *p)
                .filter(|p| p.u > umin && p.u < umax && p.v > vmin && p.v < vmax)
                .max_by(|a, b| a.v.total_cmp(&b.v));
            if let Some(p) = top {
                let (x, y) = self.to_px(p);
                let x = (x + 2.0).min(f64::from(w) - 110.0).max(2.0);
                let mut y = (y - 2.0).max(26.0);
                // step down past labels already placed nearby
                while placed.iter().any(|&(px, py): &(f64, f64)| (px - x).abs() < 105.0 && (py - y).abs() < 10.0) {
                    y += 10.0;
                }
                placed.push((x, y));
                let _ = writeln!(
                    s,
                    "<text x=\"{}\" y=\"{}\" font-size=\"9\" fill=\"{}\">{}</text>",
                    fmt_num(x),
                    fmt_num(y),
                    c.role.color(),
                    label
                );
            }
        }
        for m in &self.markers {
            let (x, y) = self.to_px(*m);
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"black\"/>", fmt_num(x), fmt_num(y));
        }
        s.push_str("</g>\n");
        let _ = writeln!(s, "<text x=\"6\" y=\"14\" font-size=\"12\" fill=\"black\">{}</text>", xml_escape(&self.title));
        s
    }

    pub fn svg(&self) -> String {
        let [w, h] = self.pixels;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{}</svg>\n",
            self.svg_body("clip")
        )
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// All panels on a grid of at most three columns.
pub fn combined_svg(panels: &[PanelRender]) -> String {
    let cols = panels.len().min(3);
    let rows = panels.len().div_ceil(cols);
    let cell_w = panels.iter().map(|p| p.pixels[0]).max().unwrap_or(0);
    let cell_h = panels.iter().map(|p| p.pixels[1]).max().unwrap_or(0);
    let gap = 10;
    let width = cols as u32 * (cell_w + gap) + gap;
    let height = rows as u32 * (cell_h + gap) + gap;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    for (k, p) in panels.iter().enumerate() {
        let (col, row) = ((k % cols) as u32, (k / cols) as u32);
        let _ = writeln!(
            s,
            "<g transform=\"translate({},{})\">",
            gap + col * (cell_w + gap),
            gap + row * (cell_h + gap)
        );
        s.push_str(&p.svg_body(&format!("clip{}", k + 1)));
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `curve_id,T,u,v` rows.
pub fn write_curves_csv(panels: &[PanelRender], path: &Path) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["curve_id", "T", "u", "v"])?;
    for p in panels {
        for c in &p.curves {
            for (t, pt) in &c.points {
                w.write_record([c.id.clone(), t.to_string(), pt.u.to_string(), pt.v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `i,j,u,v,class` rows, `undefined` where a distance fails: one
/// file at `path` for a single raster, else `<stem>-N.csv` per raster.
pub fn write_raster_csvs(panels: &[PanelRender], path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rasters: Vec<&Raster> = panels.iter().flat_map(|p| p.rasters.iter()).collect();
    let paths: Vec<PathBuf> = if rasters.len() == 1 {
        vec![path.to_path_buf()]
    } else {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("raster");
        let dir = path.parent().unwrap_or(Path::new(""));
        (1..=rasters.len()).map(|k| dir.join(format!("{stem}-{k}.csv"))).collect()
    };
    for (r, path) in rasters.iter().zip(&paths) {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "u", "v", "class"])?;
        for j in 0..r.ny {
            for i in 0..r.nx {
                let c = r.center(i, j);
                let class = r.class(i, j).map_or("undefined", TriangleClass::name);
                w.write_record([i.to_string(), j.to_string(), c.u.to_string(), c.v.to_string(), class.to_string()])?;
            }
        }
        w.flush()?;
    }
    Ok(paths)
}

/// Writes the SVG output(s): `out` alone for one panel, otherwise
/// `<stem>-N.svg` per panel plus the combined grid at `out`.
pub fn write_svgs(panels: &[PanelRender], out: &Path) -> Result<Vec<PathBuf>, CliError> {
    if panels.len() == 1 {
        std::fs::write(out, panels[0].svg())?;
        return Ok(vec![out.to_path_buf()]);
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("figure");
    let dir = out.parent().unwrap_or(Path::new(""));
    let mut written = Vec::new();
    for (k, p) in panels.iter().enumerate() {
        let path = dir.join(format!("{stem}-{}.svg", k + 1));
        std::fs::write(&path, p.svg())?;
        written.push(path);
    }
    std::fs::write(out, combined_svg(panels))?;
    written.push(out.to_path_buf());
    Ok(written)
}
