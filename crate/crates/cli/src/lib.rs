//! The `eph` command line: distance and geodesic queries, triangle
//! classification, figure rendering and verification suites.

pub mod render;
pub mod scene;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ephgeo::cycles::{
    elliptic_geodesic_through_i, geodesic_family, geodesics_through_pair, hyperbolic_geodesics_through_i, Cycle,
    ParabolicFlavor,
};
use ephgeo::distance::{cayley, cayley_inverse, distance_points, DistanceSpec, Label};
use ephgeo::geodesics::{classify_triangle, fit_to_family, integrate_geodesic, Branch};
use ephgeo::metric::{curve_length_with, Causality, PolyCurve};
use ephgeo::moebius::{normalizer_to_i, subgroup_element, SubgroupKind};
use ephgeo::numbers::{GeometryKind, HNumber, Point};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {}", error_case(.0), .0)]
    Domain(#[from] ephgeo::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("malformed scene: {0}")]
    Scene(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for unusable input, 3 for domain and runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scene(_) | CliError::Csv(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 3,
        }
    }
}

/// The variant name of a library error, e.g. `NotInUpperHalfPlane`.
pub fn error_case(e: &ephgeo::Error) -> String {
    format!("{e:?}")
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

#[derive(Debug, Parser)]
#[command(name = "eph", version, about = "Invariant geometry of the upper half-plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant distance between two points.
    Distance(DistanceArgs),
    /// Geodesics through two points, through i, or by integrating the additivity ODE.
    Geodesic(GeodesicArgs),
    /// Orbit of a point under a rotation subgroup.
    Orbit(OrbitArgs),
    /// Triangle-inequality class of a point for a pair of endpoints.
    Classify(ClassifyArgs),
    /// Render a scene file to SVG (and optionally CSV).
    Render(RenderArgs),
    /// Cayley transform between the parabolic half-plane and disk.
    Cayley(CayleyArgs),
    /// Invariant length of a sampled curve read from CSV.
    Length(LengthArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GeometryArg {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl From<GeometryArg> for GeometryKind {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Elliptic => GeometryKind::Elliptic,
            GeometryArg::Parabolic => GeometryKind::Parabolic,
            GeometryArg::Hyperbolic => GeometryKind::Hyperbolic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelArg {
    Identity,
    SinhInv,
    SinInv,
    Double,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SubgroupArg {
    K,
    N,
    A,
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
pub enum BranchArg {
    #[default]
    Smaller,
    Larger,
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (u, v) = s
        .split_once(',')
        .ok_or_else(|| format!("expected 'u,v', got '{s}'"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad number '{x}': {e}"))
            .and_then(|x| if x.is_finite() { Ok(x) } else { Err(format!("non-finite '{x}'")) })
    };
    Ok(Point::new(parse(u)?, parse(v)?))
}

fn flavor_of(s: i8) -> ParabolicFlavor {
    ParabolicFlavor::from_sigma_breve(s).expect("range-checked by clap")
}

#[derive(Debug, Args)]
pub struct FlavorArg {
    /// Parabolic flavor σ̆: -1 (P_e), 0 (P_p) or 1 (P_h).
    #[arg(long, default_value_t = 0, allow_negative_numbers = true, value_parser = clap::value_parser!(i8).range(-1..=1))]
    pub flavor: i8,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long, value_enum)]
    pub geometry: GeometryArg,
    #[command(flatten)]
    pub flavor: FlavorArg,
    #[arg(long, value_enum, default_value = "identity")]
    pub label: LabelArg,
    /// Use `h(t) = c·t` instead of a named label.
    #[arg(long, conflicts_with = "label")]
    pub scale: Option<f64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub z: Point,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub w: Point,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, value_enum, default_value = "parabolic")]
    pub geometry: GeometryArg,
    #[command(flatten)]
    pub flavor: FlavorArg,
    /// First point of a pair.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "w2")]
    pub w1: Option<Point>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, requires = "w1")]
    pub w2: Option<Point>,
    /// Family parameter of a geodesic through i.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["w1", "integrate"])]
    pub t: Option<f64>,
    /// Integrate the additivity ODE from i and fit the result to the family.
    #[arg(long, conflicts_with = "w1")]
    pub integrate: bool,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub direction: f64,
    /// Initial slope `dv/du` at i (the ODE has a node there).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub slope: f64,
    #[arg(long, default_value_t = 3.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Write the integrated samples as `curve_id,T,u,v`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, value_enum)]
    pub subgroup: SubgroupArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: Point,
    /// Rotate about this point instead of i.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub center: Option<Point>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 21)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub flavor: FlavorArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub w1: Point,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub w2: Point,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub z: Point,
    #[arg(long, value_enum, default_value = "smaller")]
    pub branch: BranchArg,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub scene: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Curve samples as `curve_id,T,u,v`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Raster cells as `i,j,u,v,class`.
    #[arg(long)]
    pub raster_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CayleyArgs {
    #[command(flatten)]
    pub flavor: FlavorArg,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub w: Point,
    #[arg(long)]
    pub inverse: bool,
}

#[derive(Debug, Args)]
pub struct LengthArgs {
    #[arg(long, value_enum)]
    pub geometry: GeometryArg,
    /// CSV with columns `T`, `u`, `v` (others are ignored).
    #[arg(long)]
    pub curve: PathBuf,
    /// Only rows whose `curve_id` matches.
    #[arg(long)]
    pub curve_id: Option<String>,
    #[arg(long)]
    pub timelike: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run; all when omitted.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(verify::SUITES))]
    pub suite: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Runs a parsed command, writing its report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Distance(a) => cmd_distance(a, out),
        Command::Geodesic(a) => cmd_geodesic(a, out),
        Command::Orbit(a) => cmd_orbit(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Render(a) => cmd_render(a, out),
        Command::Cayley(a) => cmd_cayley(a, out),
        Command::Length(a) => cmd_length(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn cmd_distance(a: DistanceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let label = match (a.scale, a.label) {
        (Some(c), _) => Label::Scaled(c),
        (None, LabelArg::Identity) => Label::Identity,
        (None, LabelArg::SinhInv) => Label::SinhInv,
        (None, LabelArg::SinInv) => Label::SinInv,
        (None, LabelArg::Double) => Label::Double,
    };
    let spec = DistanceSpec::new(a.geometry.into(), flavor_of(a.flavor.flavor), label)?;
    let d = distance_points(&spec, a.z, a.w)?;
    writeln!(out, "value={}", d.value)?;
    writeln!(out, "interval={}", d.interval)?;
    writeln!(out, "degenerate={}", if d.vertical { "vertical" } else { "none" })?;
    Ok(0)
}

fn write_cycle(out: &mut dyn Write, c: &Cycle) -> std::io::Result<()> {
    writeln!(out, "cycle=({}, [{}, {}], {})", c.k, c.l, c.n, c.m)
}

fn cmd_geodesic(a: GeodesicArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let flavor = flavor_of(a.flavor.flavor);
    let kind: GeometryKind = a.geometry.into();
    if let (Some(w1), Some(w2)) = (a.w1, a.w2) {
        if kind != GeometryKind::Parabolic {
            return Err(CliError::Usage("geodesics through a pair are computed for parabolic geometry".into()));
        }
        let pair = geodesics_through_pair(w1, w2, flavor)?;
        writeln!(out, "degenerate={}", if pair.degenerate { "vertical" } else { "none" })?;
        for (i, c) in pair.cycles.iter().enumerate() {
            write_cycle(out, c)?;
            if let Some(t) = pair.params.get(i) {
                writeln!(out, "t={t}")?;
            }
        }
        return Ok(0);
    }
    if a.integrate {
        if kind != GeometryKind::Parabolic {
            return Err(CliError::Usage("the additivity ODE is parabolic".into()));
        }
        let curve = integrate_geodesic(flavor, a.direction, a.slope, a.u_max, a.step)?;
        let fit = fit_to_family(&curve, flavor)?;
        writeln!(out, "samples={}", curve.len())?;
        writeln!(out, "t={}", fit.t)?;
        writeln!(out, "max_residual={}", fit.max_residual)?;
        if let Some(path) = a.csv {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(["curve_id", "T", "u", "v"])?;
            for s in curve.samples() {
                w.write_record(["ode".to_string(), s.t.to_string(), s.point.u.to_string(), s.point.v.to_string()])?;
            }
            w.flush()?;
        }
        return Ok(0);
    }
    let Some(t) = a.t else {
        return Err(CliError::Usage("give --w1/--w2, --t or --integrate".into()));
    };
    match kind {
        GeometryKind::Elliptic => write_cycle(out, &elliptic_geodesic_through_i(t))?,
        GeometryKind::Parabolic => write_cycle(out, &geodesic_family(flavor, t))?,
        GeometryKind::Hyperbolic => {
            let (space, time) = hyperbolic_geodesics_through_i(t);
            write!(out, "space-like ")?;
            write_cycle(out, &space)?;
            write!(out, "time-like ")?;
            write_cycle(out, &time)?;
        }
    }
    Ok(0)
}

fn cmd_orbit(a: OrbitArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let sub = match a.subgroup {
        SubgroupArg::K => SubgroupKind::K,
        SubgroupArg::N => SubgroupKind::NPrime,
        SubgroupArg::A => SubgroupKind::APrime,
    };
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let kind = sub.geometry();
    let n = normalizer_to_i(a.center.unwrap_or(Point::I))?;
    let n_inv = n.inverse();
    let w0 = HNumber::from_point(kind, a.point);
    writeln!(out, "T,u,v")?;
    for i in 0..a.count {
        let p = if a.count == 1 {
            a.from
        } else {
            a.from + (a.to - a.from) * i as f64 / (a.count - 1) as f64
        };
        let g = n_inv.compose(&subgroup_element(sub, p)).compose(&n);
        let w = g.apply(w0)?;
        writeln!(out, "{p},{},{}", w.re, w.im)?;
    }
    Ok(0)
}

fn cmd_classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = DistanceSpec::parabolic(flavor_of(a.flavor.flavor));
    let branch = match a.branch {
        BranchArg::Smaller => Branch::SmallerAbsT,
        BranchArg::Larger => Branch::LargerAbsT,
    };
    let class = classify_triangle(&spec, a.w1, a.w2, a.z, branch)?;
    writeln!(out, "class={class}")?;
    Ok(0)
}

fn cmd_render(a: RenderArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let scene = scene::Scene::load(&a.scene)?;
    let panels = render::render_scene(&scene)?;
    for path in render::write_svgs(&panels, &a.out)? {
        writeln!(out, "wrote={}", path.display())?;
    }
    if let Some(path) = a.csv {
        render::write_curves_csv(&panels, &path)?;
        writeln!(out, "wrote={}", path.display())?;
    }
    if let Some(path) = a.raster_csv {
        for p in render::write_raster_csvs(&panels, &path)? {
            writeln!(out, "wrote={}", p.display())?;
        }
    }
    Ok(0)
}

fn cmd_cayley(a: CayleyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let flavor = flavor_of(a.flavor.flavor);
    let w = HNumber::dual(a.w.u, a.w.v);
    let image = if a.inverse { cayley_inverse(w, flavor)? } else { cayley(w, flavor)? };
    writeln!(out, "u={}", image.re)?;
    writeln!(out, "v={}", image.im)?;
    Ok(0)
}

/// Reads `(T, u, v)` rows from a CSV with a header naming those columns.
pub fn read_curve_csv(path: &std::path::Path, curve_id: Option<&str>) -> Result<Vec<(f64, Point)>, CliError> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Usage(format!("{}: no '{name}' column", path.display())))
    };
    let (ct, cu, cv) = (column("T")?, column("u")?, column("v")?);
    let cid = headers.iter().position(|h| h.trim() == "curve_id");
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if let (Some(want), Some(i)) = (curve_id, cid) {
            if record.get(i) != Some(want) {
                continue;
            }
        }
        let num = |i: usize| {
            let s = record.get(i).unwrap_or("").trim();
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{}: bad number '{s}'", path.display())))
        };
        rows.push((num(ct)?, Point::new(num(cu)?, num(cv)?)));
    }
    Ok(rows)
}

fn cmd_length(a: LengthArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rows = read_curve_csv(&a.curve, a.curve_id.as_deref())?;
    let curve = PolyCurve::new(a.geometry.into(), rows)?;
    let causality = if a.timelike { Causality::TimeLike } else { Causality::SpaceLike };
    let est = curve_length_with(&curve, causality)?;
    writeln!(out, "length={}", est.value)?;
    writeln!(out, "error={}", est.error)?;
    writeln!(out, "converged={}", est.converged)?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let suites: Vec<&str> = if a.suite.is_empty() {
        verify::SUITES.to_vec()
    } else {
        a.suite.iter().map(String::as_str).collect()
    };
    let mut first_failure = None;
    for name in suites {
        let checks = verify::run_suite(name, a.seed)
            .ok_or_else(|| CliError::Usage(format!("unknown suite '{name}'")))?;
        for c in checks {
            writeln!(out, "{c}")?;
            if !c.pass && first_failure.is_none() {
                first_failure = Some(c);
            }
        }
    }
    match first_failure {
        None => {
            writeln!(out, "result=pass")?;
            Ok(0)
        }
        Some(c) => {
            writeln!(out, "result=fail first={}/{}", c.suite, c.case)?;
            Ok(1)
        }
    }
}
