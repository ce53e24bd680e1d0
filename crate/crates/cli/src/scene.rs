//! TOML scene files describing figure panels.

use std::path::Path;

use serde::Deserialize;

use ephgeo::cycles::ParabolicFlavor;
use ephgeo::geodesics::Branch;
use ephgeo::numbers::{GeometryKind, Point};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(rename = "panel")]
    pub panels: Vec<Panel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Panel {
    pub title: String,
    pub geometry: String,
    /// `σ̆` of a parabolic panel.
    #[serde(default)]
    pub flavor: i8,
    /// Draw time-like instead of space-like geodesics (hyperbolic panels).
    #[serde(default)]
    pub timelike: bool,
    /// `[umin, umax, vmin, vmax]`
    pub viewport: [f64; 4],
    #[serde(default = "default_pixels")]
    pub pixels: [u32; 2],
    #[serde(default)]
    pub geodesics: Vec<GeodesicSet>,
    #[serde(default)]
    pub orbits: Vec<OrbitSet>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    #[serde(default)]
    pub rasters: Vec<RasterSpec>,
}

fn default_pixels() -> [u32; 2] {
    [400, 300]
}

/// Geodesics through `i` for the listed parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicSet {
    pub t: Vec<f64>,
    #[serde(default = "yes")]
    pub labels: bool,
}

fn yes() -> bool {
    true
}

/// Equidistant orbits around `center`, one through each listed point.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSet {
    pub center: [f64; 2],
    pub through: Vec<[f64; 2]>,
}

/// The geodesics through two points.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub w1: [f64; 2],
    pub w2: [f64; 2],
}

/// Triangle-inequality raster for a pair of points.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterSpec {
    pub w1: [f64; 2],
    pub w2: [f64; 2],
    #[serde(default = "default_cells")]
    pub cells: [usize; 2],
    #[serde(default)]
    pub branch: BranchName,
}

fn default_cells() -> [usize; 2] {
    [100, 100]
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    #[default]
    Smaller,
    Larger,
}

impl From<BranchName> for Branch {
    fn from(b: BranchName) -> Self {
        match b {
            BranchName::Smaller => Branch::SmallerAbsT,
            BranchName::Larger => Branch::LargerAbsT,
        }
    }
}

pub fn point(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

pub fn parse_geometry(name: &str) -> Result<GeometryKind, CliError> {
    match name {
        "elliptic" => Ok(GeometryKind::Elliptic),
        "parabolic" => Ok(GeometryKind::Parabolic),
        "hyperbolic" => Ok(GeometryKind::Hyperbolic),
        other => Err(CliError::Usage(format!("unknown geometry '{other}'"))),
    }
}

pub fn parse_flavor(s: i8) -> Result<ParabolicFlavor, CliError> {
    ParabolicFlavor::from_sigma_breve(s)
        .ok_or_else(|| CliError::Usage(format!("flavor must be -1, 0 or 1, got {s}")))
}

impl Panel {
    pub fn kind(&self) -> Result<GeometryKind, CliError> {
        parse_geometry(&self.geometry)
    }

    pub fn parabolic_flavor(&self) -> Result<ParabolicFlavor, CliError> {
        parse_flavor(self.flavor)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.kind()?;
        self.parabolic_flavor()?;
        let [umin, umax, vmin, vmax] = self.viewport;
        if !(umin < umax && vmin < vmax) {
            return Err(CliError::Scene(format!("panel '{}': empty viewport", self.title)));
        }
        if self.pixels[0] == 0 || self.pixels[1] == 0 {
            return Err(CliError::Scene(format!("panel '{}': zero pixel size", self.title)));
        }
        if (!self.pairs.is_empty() || !self.rasters.is_empty()) && self.kind()? != GeometryKind::Parabolic {
            return Err(CliError::Scene(format!(
                "panel '{}': pairs and rasters need a parabolic geometry",
                self.title
            )));
        }
        Ok(())
    }
}

impl Scene {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let scene: Scene = toml::from_str(text).map_err(|e| CliError::Scene(e.to_string()))?;
        if scene.panels.is_empty() {
            return Err(CliError::Scene("scene has no panels".into()));
        }
        for p in &scene.panels {
            p.validate()?;
        }
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Scene(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_panel() {
        let s = Scene::parse(
            r#"
            [[panel]]
            title = "P_p"
            geometry = "parabolic"
            viewport = [-2.0, 2.0, 0.0, 3.0]
            [[panel.geodesics]]
            t = [0.0, 0.5]
            "#,
        )
        .unwrap();
        assert_eq!(s.panels[0].pixels, [400, 300]);
        assert_eq!(s.panels[0].geodesics[0].t, vec![0.0, 0.5]);
    }

    #[test]
    fn rejects_bad_scenes() {
        assert!(Scene::parse("").is_err());
        let bad_geometry = "[[panel]]\ntitle='x'\ngeometry='spherical'\nviewport=[0.0,1.0,0.0,1.0]\n";
        assert!(Scene::parse(bad_geometry).is_err());
        let raster_on_elliptic = "[[panel]]\ntitle='x'\ngeometry='elliptic'\nviewport=[0.0,1.0,0.0,1.0]\n[[panel.rasters]]\nw1=[0.0,1.0]\nw2=[1.0,1.0]\n";
        assert!(Scene::parse(raster_on_elliptic).is_err());
        let unknown_key = "[[panel]]\ntitle='x'\ngeometry='elliptic'\nviewport=[0.0,1.0,0.0,1.0]\ncolour='red'\n";
        assert!(Scene::parse(unknown_key).is_err());
    }
}
