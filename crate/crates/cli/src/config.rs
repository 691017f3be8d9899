//! Loop-run configuration: the JSON schema, its validation rules, and the
//! construction of the parameter loop it describes.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use anholonomy::berry::{Coord, LissajousComponent, ParamLoop};
use anholonomy::deform::ParamPoint;
use anholonomy::position::GridSpec;

/// Fewest segments a configured loop may request.
pub const MIN_SEGMENTS: usize = 16;

/// Most level indices one run may request.
pub const MAX_LEVELS: usize = 6;

/// Largest level index one run may request; higher towers need dimensions
/// beyond what the convergence doubling can honor.
pub const MAX_LEVEL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Displaced squeezed eigenstates of the harmonic tower.
    Oscillator,
    /// Even squeezed states |2n; β⟩ of the photon-pair tower.
    Multiphoton,
}

/// Base parameter point; loop primitives move coordinates around it.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BasePoint {
    pub m: f64,
    pub omega: f64,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl BasePoint {
    pub fn to_point(self) -> Result<ParamPoint> {
        ParamPoint::new(
            self.m,
            self.omega,
            Complex64::new(self.alpha[0], self.alpha[1]),
            Complex64::new(self.beta[0], self.beta[1]),
        )
        .map_err(|e| anyhow::anyhow!("base point: {e}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordName {
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
    Lambda,
}

impl CoordName {
    pub fn to_coord(self) -> Coord {
        match self {
            CoordName::Alpha1 => Coord::Alpha1,
            CoordName::Alpha2 => Coord::Alpha2,
            CoordName::Beta1 => Coord::Beta1,
            CoordName::Beta2 => Coord::Beta2,
            CoordName::Lambda => Coord::Lambda,
        }
    }

    fn is_displacement(self) -> bool {
        matches!(self, CoordName::Alpha1 | CoordName::Alpha2)
    }

    fn name(self) -> &'static str {
        match self {
            CoordName::Alpha1 => "alpha1",
            CoordName::Alpha2 => "alpha2",
            CoordName::Beta1 => "beta1",
            CoordName::Beta2 => "beta2",
            CoordName::Lambda => "lambda",
        }
    }
}

fn default_true() -> bool {
    true
}

/// One oscillating coordinate of a lissajous loop.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub coord: CoordName,
    pub amplitude: f64,
    pub frequency: u32,
    #[serde(default)]
    pub phase: f64,
}

/// One explicit vertex of a polyline loop, as offsets in the loop
/// coordinates; mass is inherited from the base point.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "primitive", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoopSpec {
    /// Circle in the (x, y) coordinate plane, centered on the base point.
    Circle {
        x: CoordName,
        y: CoordName,
        radius: f64,
        segments: usize,
        #[serde(default = "default_true")]
        counterclockwise: bool,
    },
    /// Independent harmonic motion of any set of coordinates.
    Lissajous {
        components: Vec<ComponentSpec>,
        segments: usize,
    },
    /// Explicit vertex list; must be written closed (first point = last).
    Polyline { points: Vec<PointSpec> },
}

/// Optional position-grid settings; presence turns on the grid
/// cross-check of the ground-state phase.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridOptions {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl GridOptions {
    pub fn to_spec(self) -> Result<GridSpec> {
        GridSpec::new(self.x_min, self.x_max, self.points)
            .map_err(|e| anyhow::anyhow!("grid options: {e}"))
    }
}

/// A full run configuration as read from the JSON file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LoopConfig {
    pub mode: Mode,
    pub base: BasePoint,
    #[serde(rename = "loop")]
    pub loop_spec: LoopSpec,
    pub levels: Vec<usize>,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridOptions>,
}

impl LoopConfig {
    /// Read and validate a configuration file.  Parse errors keep
    /// serde_json's line/column anchor.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: LoopConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.to_point()?;
        if self.levels.is_empty() {
            bail!("levels must name at least one level");
        }
        if self.levels.len() > MAX_LEVELS {
            bail!(
                "levels lists {} entries, at most {MAX_LEVELS} are supported",
                self.levels.len()
            );
        }
        if let Some(&n) = self.levels.iter().find(|&&n| n > MAX_LEVEL) {
            bail!("level {n} exceeds the supported maximum of {MAX_LEVEL}");
        }
        match &self.loop_spec {
            LoopSpec::Circle {
                x,
                y,
                radius,
                segments,
                ..
            } => {
                if x == y {
                    bail!(
                        "circle coordinates must be distinct, got {} twice",
                        x.name()
                    );
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    bail!("circle radius must be positive and finite, got {radius}");
                }
                check_segments(*segments)?;
            }
            LoopSpec::Lissajous {
                components,
                segments,
            } => {
                if components.is_empty() {
                    bail!("lissajous loop needs at least one component");
                }
                let mut seen = Vec::new();
                for c in components {
                    if seen.contains(&c.coord) {
                        bail!(
                            "lissajous component coordinates must be distinct, got {} twice",
                            c.coord.name()
                        );
                    }
                    seen.push(c.coord);
                }
                check_segments(*segments)?;
            }
            LoopSpec::Polyline { points } => {
                if points.len() < 2 {
                    bail!("polyline needs at least two points");
                }
                if points.first() != points.last() {
                    bail!("polyline must be written closed: first point must equal the last");
                }
                // the closing duplicate is dropped when the loop is built
                check_segments(points.len() - 1)?;
            }
        }
        if self.mode == Mode::Multiphoton {
            if self.base.alpha != [0.0, 0.0] {
                bail!("multiphoton mode needs alpha = [0, 0] at the base point");
            }
            if let Some(coord) = self.moved_displacement_coord() {
                bail!(
                    "multiphoton mode only covers loops in (beta, lambda); \
                     the loop moves {coord}"
                );
            }
            if self.grid.is_some() {
                bail!("the grid cross-check covers only oscillator mode");
            }
        }
        Ok(())
    }

    fn moved_displacement_coord(&self) -> Option<&'static str> {
        match &self.loop_spec {
            LoopSpec::Circle { x, y, .. } => [*x, *y]
                .into_iter()
                .find(|c| c.is_displacement())
                .map(CoordName::name),
            LoopSpec::Lissajous { components, .. } => components
                .iter()
                .find(|c| c.coord.is_displacement() && c.amplitude != 0.0)
                .map(|c| c.coord.name()),
            LoopSpec::Polyline { points } => points
                .iter()
                .any(|p| p.alpha != [0.0, 0.0])
                .then_some("alpha"),
        }
    }

    /// Build the loop at the requested resolution.  `segments_override`
    /// replaces the configured sample count for parametric primitives;
    /// `k_doublings` then doubles it that many times (polylines are
    /// refined by inserting segment midpoints instead).
    pub fn build_loop(
        &self,
        segments_override: Option<usize>,
        k_doublings: u32,
    ) -> Result<ParamLoop> {
        let base = self.base.to_point()?;
        let lp = match &self.loop_spec {
            LoopSpec::Circle {
                x,
                y,
                radius,
                segments,
                counterclockwise,
            } => {
                let k = effective_segments(*segments, segments_override)? << k_doublings;
                ParamLoop::circle(
                    &base,
                    x.to_coord(),
                    y.to_coord(),
                    *radius,
                    k,
                    *counterclockwise,
                )
            }
            LoopSpec::Lissajous {
                components,
                segments,
            } => {
                let k = effective_segments(*segments, segments_override)? << k_doublings;
                let comps: Vec<LissajousComponent> = components
                    .iter()
                    .map(|c| LissajousComponent {
                        coord: c.coord.to_coord(),
                        amplitude: c.amplitude,
                        frequency: c.frequency,
                        phase: c.phase,
                    })
                    .collect();
                ParamLoop::lissajous(&base, &comps, k)
            }
            LoopSpec::Polyline { points } => {
                if segments_override.is_some() {
                    bail!("--segments does not apply to polyline loops; edit the point list");
                }
                let mut vertices: Vec<ParamPoint> = points[..points.len() - 1]
                    .iter()
                    .map(|p| {
                        base.with_alpha(Complex64::new(p.alpha[0], p.alpha[1]))
                            .with_beta(Complex64::new(p.beta[0], p.beta[1]))
                            .with_lambda(p.lambda)
                    })
                    .collect();
                for _ in 0..k_doublings {
                    vertices = subdivide(&vertices);
                }
                ParamLoop::from_points(vertices)
            }
        };
        lp.map_err(|e| anyhow::anyhow!("loop construction: {e}"))
    }
}

fn check_segments(segments: usize) -> Result<()> {
    if segments < MIN_SEGMENTS {
        bail!("loop has {segments} segments, the invariant requires K >= {MIN_SEGMENTS}");
    }
    Ok(())
}

fn effective_segments(configured: usize, replace: Option<usize>) -> Result<usize> {
    let k = replace.unwrap_or(configured);
    check_segments(k)?;
    Ok(k)
}

/// Insert the midpoint of every segment, halving the step while keeping
/// the polygonal contour; midpoints average α, β and λ.
fn subdivide(vertices: &[ParamPoint]) -> Vec<ParamPoint> {
    let k = vertices.len();
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        let a = vertices[i];
        let b = vertices[(i + 1) % k];
        out.push(a);
        out.push(
            a.with_alpha((a.alpha + b.alpha) * Complex64::new(0.5, 0.0))
                .with_beta((a.beta + b.beta) * Complex64::new(0.5, 0.0))
                .with_lambda(0.5 * (a.lambda() + b.lambda())),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn from_json(value: serde_json::Value) -> LoopConfig {
        serde_json::from_value(value).unwrap()
    }

    fn circle_json() -> serde_json::Value {
        json!({
            "mode": "oscillator",
            "base": { "m": 1.0, "omega": 1.0, "alpha": [0.0, 0.0], "beta": [0.0, 0.0] },
            "loop": { "primitive": "circle", "x": "beta1", "y": "beta2",
                      "radius": 0.3, "segments": 32 },
            "levels": [0, 1],
            "dim": 40
        })
    }

    fn closed_square(side: f64) -> serde_json::Value {
        let corners = [
            [0.0, 0.0],
            [side, 0.0],
            [side, side],
            [0.0, side],
            [0.0, 0.0],
            [side, 0.0],
            [side, side],
            [0.0, side],
            [0.0, 0.0],
            [side, 0.0],
            [side, side],
            [0.0, side],
            [0.0, 0.0],
            [side, 0.0],
            [side, side],
            [0.0, side],
            [0.0, 0.0],
        ];
        let points: Vec<_> = corners
            .iter()
            .map(|b| json!({ "alpha": [0.0, 0.0], "beta": b, "lambda": 0.0 }))
            .collect();
        json!({
            "mode": "oscillator",
            "base": { "m": 1.0, "omega": 1.0, "alpha": [0.0, 0.0], "beta": [0.0, 0.0] },
            "loop": { "primitive": "polyline", "points": points },
            "levels": [0],
            "dim": 40
        })
    }

    #[test]
    fn circle_orientation_defaults_to_counterclockwise() {
        let config = from_json(circle_json());
        config.validate().unwrap();
        match &config.loop_spec {
            LoopSpec::Circle {
                counterclockwise, ..
            } => assert!(*counterclockwise),
            other => panic!("parsed the wrong primitive: {other:?}"),
        }
    }

    #[test]
    fn duplicate_plane_coordinates_are_rejected() {
        let mut value = circle_json();
        value["loop"]["y"] = json!("beta1");
        let err = from_json(value).validate().unwrap_err();
        assert!(err.to_string().contains("distinct"), "{err}");

        let lissajous = json!({
            "mode": "oscillator",
            "base": { "m": 1.0, "omega": 1.0, "alpha": [0.0, 0.0], "beta": [0.0, 0.0] },
            "loop": { "primitive": "lissajous", "segments": 32, "components": [
                { "coord": "lambda", "amplitude": 0.1, "frequency": 1 },
                { "coord": "lambda", "amplitude": 0.2, "frequency": 2 }
            ]},
            "levels": [0],
            "dim": 40
        });
        let err = from_json(lissajous).validate().unwrap_err();
        assert!(err.to_string().contains("distinct"), "{err}");
    }

    #[test]
    fn segment_floor_applies_to_overrides_too() {
        let config = from_json(circle_json());
        let err = config.build_loop(Some(8), 0).unwrap_err();
        assert!(err.to_string().contains("16"), "{err}");
    }

    #[test]
    fn polyline_closing_point_is_dropped_when_built() {
        let config = from_json(closed_square(0.1));
        config.validate().unwrap();
        let lp = config.build_loop(None, 0).unwrap();
        assert_eq!(lp.segments(), 16);
    }

    #[test]
    fn polyline_doubling_inserts_exact_midpoints() {
        let config = from_json(closed_square(0.1));
        let coarse = config.build_loop(None, 0).unwrap();
        let fine = config.build_loop(None, 1).unwrap();
        assert_eq!(fine.segments(), 2 * coarse.segments());
        let a = coarse.points()[0];
        let b = coarse.points()[1];
        let mid = fine.points()[1];
        assert_eq!(mid.beta, (a.beta + b.beta) * Complex64::new(0.5, 0.0));
        assert_eq!(fine.points()[2].beta, b.beta);
    }

    #[test]
    fn polyline_rejects_the_segment_override() {
        let config = from_json(closed_square(0.1));
        let err = config.build_loop(Some(64), 0).unwrap_err();
        assert!(err.to_string().contains("point list"), "{err}");
    }

    #[test]
    fn multiphoton_mode_is_fenced_to_squeeze_loops() {
        let mut value = circle_json();
        value["mode"] = json!("multiphoton");
        from_json(value.clone()).validate().unwrap();

        let mut displaced = value.clone();
        displaced["base"]["alpha"] = json!([0.1, 0.0]);
        let err = from_json(displaced).validate().unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");

        let mut moving = value.clone();
        moving["loop"]["x"] = json!("alpha1");
        let err = from_json(moving).validate().unwrap_err();
        assert!(err.to_string().contains("alpha1"), "{err}");

        let mut gridded = value;
        gridded["grid"] = json!({ "x_min": -12.0, "x_max": 12.0, "points": 1024 });
        let err = from_json(gridded).validate().unwrap_err();
        assert!(err.to_string().contains("oscillator"), "{err}");
    }

    #[test]
    fn level_budget_is_enforced_on_count_and_index() {
        let mut value = circle_json();
        value["levels"] = json!([0, 1, 2, 3, 4, 5, 6]);
        let err = from_json(value).validate().unwrap_err();
        assert!(err.to_string().contains("6"), "{err}");

        let mut value = circle_json();
        value["levels"] = json!([7]);
        let err = from_json(value).validate().unwrap_err();
        assert!(err.to_string().contains("7"), "{err}");
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let mut value = circle_json();
        value["extra"] = json!(1);
        assert!(serde_json::from_value::<LoopConfig>(value).is_err());
    }
}
