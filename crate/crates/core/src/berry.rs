//! Geometric phases along closed loops in parameter space.
//!
//! Two independent routes to the same number live here.  The discrete
//! (gauge-invariant) route builds the eigenstate at every vertex of a closed
//! polygonal loop and accumulates the Wilson overlap product,
//!
//! ```text
//! γ = − Σ_k arg ⟨ψ(R_k) | ψ(R_{k+1})⟩
//! ```
//!
//! with indices wrapping around the loop.  The analytic route evaluates the
//! closed-form line integrals for the displacement and squeeze contributions
//! by composite trapezoid quadrature over the same vertices.  Both carry the
//! same orientation convention: counterclockwise loops in the (x, y)
//! coordinate planes used by [`ParamLoop::circle`] count as positive area,
//! and both routes flip sign under loop reversal.
//!
//! Phases are accumulated segment by segment without any modular folding, so
//! results outside (−π, π] are meaningful as long as every individual
//! segment stays well resolved.  Segments whose overlap modulus drops below
//! [`MIN_SEGMENT_OVERLAP`] abort the computation instead of silently
//! wrapping a branch.

use num_complex::Complex64;

use crate::deform::{eigenstate, sinhc, ParamPoint};
use crate::error::{Error, Result};
use crate::ops::{inner, StateVector};

/// Fewest segments a loop may carry; coarser polygons alias branch cuts.
pub const MIN_SEGMENTS: usize = 16;

/// Largest allowed change of any single coordinate across one segment.
/// Larger jumps make segment arguments ambiguous modulo 2π.
pub const MAX_COMPONENT_STEP: f64 = 0.2;

/// Smallest acceptable overlap modulus between consecutive loop states.
pub const MIN_SEGMENT_OVERLAP: f64 = 0.9;

/// Replace a signed zero by +0.0 so reports never print `-0`.
fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// One real coordinate of a [`ParamPoint`], addressable by loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    Alpha1,
    Alpha2,
    Beta1,
    Beta2,
    Lambda,
}

impl std::fmt::Display for Coord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Coord::Alpha1 => "alpha1",
            Coord::Alpha2 => "alpha2",
            Coord::Beta1 => "beta1",
            Coord::Beta2 => "beta2",
            Coord::Lambda => "lambda",
        };
        f.write_str(name)
    }
}

/// All five loop coordinates, in reporting order.
pub const ALL_COORDS: [Coord; 5] = [
    Coord::Alpha1,
    Coord::Alpha2,
    Coord::Beta1,
    Coord::Beta2,
    Coord::Lambda,
];

impl Coord {
    pub fn get(&self, p: &ParamPoint) -> f64 {
        match self {
            Coord::Alpha1 => p.alpha.re,
            Coord::Alpha2 => p.alpha.im,
            Coord::Beta1 => p.beta.re,
            Coord::Beta2 => p.beta.im,
            Coord::Lambda => p.lambda(),
        }
    }

    pub fn set(&self, p: ParamPoint, value: f64) -> ParamPoint {
        match self {
            Coord::Alpha1 => p.with_alpha(Complex64::new(value, p.alpha.im)),
            Coord::Alpha2 => p.with_alpha(Complex64::new(p.alpha.re, value)),
            Coord::Beta1 => p.with_beta(Complex64::new(value, p.beta.im)),
            Coord::Beta2 => p.with_beta(Complex64::new(p.beta.re, value)),
            Coord::Lambda => p.with_lambda(value),
        }
    }
}

/// One oscillating coordinate of a Lissajous-style loop: the coordinate
/// moves as `base + amplitude · cos(2π · frequency · k/K + phase)`.
#[derive(Clone, Copy, Debug)]
pub struct LissajousComponent {
    pub coord: Coord,
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

/// A closed polygonal loop in parameter space.  Vertex k connects to vertex
/// k+1 and the last vertex connects back to the first; the vertex count is
/// also the segment count.
#[derive(Clone, Debug)]
pub struct ParamLoop {
    points: Vec<ParamPoint>,
    description: String,
}

impl ParamLoop {
    pub fn from_points(points: Vec<ParamPoint>) -> Result<Self> {
        let description = format!("polyline(K={})", points.len());
        Self::with_description(points, description)
    }

    fn with_description(points: Vec<ParamPoint>, description: String) -> Result<Self> {
        if points.len() < MIN_SEGMENTS {
            return Err(Error::InvalidLoop(format!(
                "loop has {} segments, need at least {MIN_SEGMENTS}",
                points.len()
            )));
        }
        for (k, p) in points.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::InvalidLoop(format!("vertex {k}: {e}")))?;
        }
        let k_total = points.len();
        for k in 0..k_total {
            let next = &points[(k + 1) % k_total];
            for coord in ALL_COORDS {
                let step = (coord.get(next) - coord.get(&points[k])).abs();
                if step >= MAX_COMPONENT_STEP {
                    return Err(Error::InvalidLoop(format!(
                        "segment {k} moves {coord} by {step:.4}, at or above the \
                         {MAX_COMPONENT_STEP} step bound; refine the loop"
                    )));
                }
            }
        }
        Ok(ParamLoop {
            points,
            description,
        })
    }

    /// Circle of the given radius in the (x, y) coordinate plane, centered
    /// on the base point's coordinates.  Counterclockwise means x leads y by
    /// a quarter period.
    pub fn circle(
        base: &ParamPoint,
        x: Coord,
        y: Coord,
        radius: f64,
        segments: usize,
        counterclockwise: bool,
    ) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidLoop(format!(
                "circle radius must be positive, got {radius}"
            )));
        }
        let (cx, cy) = (x.get(base), y.get(base));
        let sign = if counterclockwise { 1.0 } else { -1.0 };
        let points = (0..segments)
            .map(|k| {
                let t = sign * 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
                y.set(x.set(*base, cx + radius * t.cos()), cy + radius * t.sin())
            })
            .collect();
        let orientation = if counterclockwise { "ccw" } else { "cw" };
        Self::with_description(
            points,
            format!("circle(x={x}, y={y}, r={radius}, K={segments}, {orientation})"),
        )
    }

    /// Loop in which each listed coordinate oscillates harmonically around
    /// its base value.  A circle is the special case of two components with
    /// equal amplitude, frequency 1 and a quarter-period phase offset.
    pub fn lissajous(
        base: &ParamPoint,
        components: &[LissajousComponent],
        segments: usize,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidLoop(
                "lissajous loop needs at least one component".into(),
            ));
        }
        for c in components {
            if !c.amplitude.is_finite() || !c.phase.is_finite() {
                return Err(Error::InvalidLoop(
                    "lissajous component must be finite".into(),
                ));
            }
        }
        let points = (0..segments)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
                let mut p = *base;
                for c in components {
                    let center = c.coord.get(base);
                    p = c.coord.set(
                        p,
                        center + c.amplitude * (c.frequency as f64 * t + c.phase).cos(),
                    );
                }
                p
            })
            .collect();
        let names: Vec<String> = components.iter().map(|c| c.coord.to_string()).collect();
        Self::with_description(
            points,
            format!("lissajous([{}], K={segments})", names.join(", ")),
        )
    }

    pub fn points(&self) -> &[ParamPoint] {
        &self.points
    }

    pub fn segments(&self) -> usize {
        self.points.len()
    }

    /// Human-readable provenance of the loop, echoed into reports.
    pub fn description(&self) -> &str {
        &self.description
    }

    /// The same loop traversed in the opposite direction, keeping the base
    /// vertex first.
    pub fn reversed(&self) -> Self {
        let mut points = Vec::with_capacity(self.points.len());
        points.push(self.points[0]);
        points.extend(self.points[1..].iter().rev().copied());
        ParamLoop {
            points,
            description: format!("reversed({})", self.description),
        }
    }
}

/// Outcome of a discrete Wilson-loop evaluation.
#[derive(Clone, Debug)]
pub struct WilsonPhase {
    /// The geometric phase, −Σ segment arguments, unwrapped.
    pub phase: f64,
    /// Smallest overlap modulus encountered along the loop.
    pub min_overlap: f64,
    /// Argument of each segment overlap, in (−π, π].
    pub segment_args: Vec<f64>,
}

/// Eigenstates of level n at every vertex of the loop.
pub fn loop_states(lp: &ParamLoop, n: usize, dim: usize) -> Result<Vec<StateVector>> {
    lp.points.iter().map(|p| eigenstate(n, p, dim)).collect()
}

/// Wilson overlap product over precomputed vertex states.  Errors out on
/// any segment whose overlap modulus falls below [`MIN_SEGMENT_OVERLAP`].
pub fn wilson_phase_from_states(states: &[StateVector]) -> Result<WilsonPhase> {
    if states.len() < MIN_SEGMENTS {
        return Err(Error::InvalidLoop(format!(
            "loop has {} segments, need at least {MIN_SEGMENTS}",
            states.len()
        )));
    }
    let k_total = states.len();
    let mut total = 0.0;
    let mut min_overlap = f64::INFINITY;
    let mut segment_args = Vec::with_capacity(k_total);
    for k in 0..k_total {
        let overlap = inner(&states[k], &states[(k + 1) % k_total])?;
        let modulus = overlap.norm();
        if modulus < MIN_SEGMENT_OVERLAP {
            return Err(Error::LoopResolution {
                segment: k,
                overlap: modulus,
                min: MIN_SEGMENT_OVERLAP,
            });
        }
        min_overlap = min_overlap.min(modulus);
        let arg = overlap.arg();
        segment_args.push(arg);
        total += arg;
    }
    Ok(WilsonPhase {
        phase: clean_zero(-total),
        min_overlap,
        segment_args,
    })
}

/// Discrete geometric phase of level n around the loop: build the state at
/// every vertex, then accumulate −Σ arg⟨ψ_k|ψ_{k+1}⟩.
pub fn wilson_loop(lp: &ParamLoop, n: usize, dim: usize) -> Result<WilsonPhase> {
    let states = loop_states(lp, n, dim)?;
    wilson_phase_from_states(&states)
}

/// Composite-trapezoid value of ∮ f dg over the closed vertex list.
fn cyclic_trapezoid(f: &[f64], g: &[f64]) -> f64 {
    let k_total = f.len();
    let mut sum = 0.0;
    for k in 0..k_total {
        let k1 = (k + 1) % k_total;
        sum += 0.5 * (f[k] + f[k1]) * (g[k1] - g[k]);
    }
    sum
}

/// Displacement contribution to the geometric phase,
/// ∮ (α₂ dα₁ − α₁ dα₂ − α₁ α₂ dλ), the same for every level n.
pub fn closed_form_displacement_phase(lp: &ParamLoop) -> f64 {
    let pts = lp.points();
    let a1: Vec<f64> = pts.iter().map(|p| p.alpha.re).collect();
    let a2: Vec<f64> = pts.iter().map(|p| p.alpha.im).collect();
    let lam: Vec<f64> = pts.iter().map(|p| p.lambda()).collect();
    let a1a2: Vec<f64> = pts.iter().map(|p| p.alpha.re * p.alpha.im).collect();
    let neg_a1: Vec<f64> = a1.iter().map(|x| -x).collect();
    let neg_a1a2: Vec<f64> = a1a2.iter().map(|x| -x).collect();
    clean_zero(
        cyclic_trapezoid(&a2, &a1)
            + cyclic_trapezoid(&neg_a1, &a2)
            + cyclic_trapezoid(&neg_a1a2, &lam),
    )
}

/// Squeeze contribution to the geometric phase of level n,
///
/// ```text
/// (n + ½) ∮ [ (sinh|β|/|β|)² (β₂ dβ₁ − β₁ dβ₂) − (β₂/|β|) sinh|β| cosh|β| dλ ]
/// ```
///
/// with the (n + ½) prefactor multiplying both terms.
pub fn closed_form_squeeze_phase(lp: &ParamLoop, n: usize) -> f64 {
    let pts = lp.points();
    let b1: Vec<f64> = pts.iter().map(|p| p.beta.re).collect();
    let b2: Vec<f64> = pts.iter().map(|p| p.beta.im).collect();
    let lam: Vec<f64> = pts.iter().map(|p| p.lambda()).collect();
    let f_b1: Vec<f64> = pts
        .iter()
        .map(|p| {
            let sc = sinhc(p.beta.norm());
            sc * sc * p.beta.im
        })
        .collect();
    let f_b2: Vec<f64> = pts
        .iter()
        .map(|p| {
            let sc = sinhc(p.beta.norm());
            -sc * sc * p.beta.re
        })
        .collect();
    let f_lam: Vec<f64> = pts
        .iter()
        .map(|p| {
            let b = p.beta.norm();
            -p.beta.im * sinhc(b) * b.cosh()
        })
        .collect();
    let integral = cyclic_trapezoid(&f_b1, &b1)
        + cyclic_trapezoid(&f_b2, &b2)
        + cyclic_trapezoid(&f_lam, &lam);
    clean_zero((n as f64 + 0.5) * integral)
}

/// Total closed-form geometric phase of level n: displacement part plus
/// squeeze part.
pub fn closed_form_phase(lp: &ParamLoop, n: usize) -> f64 {
    clean_zero(closed_form_displacement_phase(lp) + closed_form_squeeze_phase(lp, n))
}

/// Alternative squeeze-phase quadrature, −(n + ½) ∮ sinh²|β| d(arg β),
/// valid only while β stays away from the origin.  The increments of arg β
/// are wrapped to (−π, π] segment by segment, which unwinds the branch cut
/// for loops that encircle β = 0.
pub fn arg_beta_phase(lp: &ParamLoop, n: usize) -> Result<f64> {
    let pts = lp.points();
    let first = &pts[0];
    for (k, p) in pts.iter().enumerate() {
        if p.beta.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "arg β is undefined at vertex {k} where β = 0"
            )));
        }
        if (p.alpha - first.alpha).norm() > 1e-12 || (p.lambda() - first.lambda()).abs() > 1e-12 {
            return Err(Error::Precondition(
                "the arg β quadrature only covers loops with constant α and λ".into(),
            ));
        }
    }
    let k_total = pts.len();
    let mut sum = 0.0;
    for k in 0..k_total {
        let k1 = (k + 1) % k_total;
        let (bk, bk1) = (pts[k].beta, pts[k1].beta);
        // increment of arg β, wrapped into (−π, π]
        let dtheta = (bk1 * bk.conj()).arg();
        let f = 0.5 * (bk.norm().sinh().powi(2) + bk1.norm().sinh().powi(2));
        sum += f * dtheta;
    }
    Ok(clean_zero(-(n as f64 + 0.5) * sum))
}

/// Classical anholonomy angle of the loop, Δθ = γ₀ − γ₁, evaluated from the
/// discrete Wilson phases of the two lowest levels.
pub fn hannay_angle(lp: &ParamLoop, dim: usize) -> Result<f64> {
    let g0 = wilson_loop(lp, 0, dim)?.phase;
    let g1 = wilson_loop(lp, 1, dim)?.phase;
    Ok(clean_zero(g0 - g1))
}

/// The same level spacing evaluated from the closed-form quadratures; the
/// displacement part is level-independent and drops out exactly.
pub fn hannay_angle_closed_form(lp: &ParamLoop) -> f64 {
    clean_zero(closed_form_squeeze_phase(lp, 0) - closed_form_squeeze_phase(lp, 1))
}

/// Largest deviation of the Wilson phases γ₀..γ_n_max from their
/// least-squares line in n.  The analytic phases are affine in the level
/// index, so the residual measures how faithfully the discrete product
/// preserves that structure.  Supports n_max in 1..=6.
pub fn linearity_check(lp: &ParamLoop, n_max: usize, dim: usize) -> Result<f64> {
    if !(1..=6).contains(&n_max) {
        return Err(Error::Precondition(format!(
            "linearity check needs 1 ≤ n_max ≤ 6, got {n_max}"
        )));
    }
    let mut phases = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        phases.push(wilson_loop(lp, n, dim)?.phase);
    }
    let count = phases.len() as f64;
    let mean_n = n_max as f64 / 2.0;
    let mean_g: f64 = phases.iter().sum::<f64>() / count;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (i, g) in phases.iter().enumerate() {
        let dn = i as f64 - mean_n;
        sxx += dn * dn;
        sxy += dn * (g - mean_g);
    }
    let slope = sxy / sxx;
    let residual = phases
        .iter()
        .enumerate()
        .map(|(i, g)| (g - (mean_g + slope * (i as f64 - mean_n))).abs())
        .fold(0.0, f64::max);
    Ok(residual)
}

/// Everything the two routes say about one level on one loop.
#[derive(Clone, Debug)]
pub struct PhaseReport {
    pub n: usize,
    pub gamma_wilson: f64,
    pub gamma_closed: f64,
    pub gamma_displacement: f64,
    pub gamma_squeeze: f64,
    /// |gamma_wilson − gamma_closed|, with no modular folding.
    pub discrepancy: f64,
    pub dim: usize,
    pub segments: usize,
    pub min_overlap: f64,
}

/// Evaluate both routes for level n and assemble the comparison report.
pub fn total_phase(n: usize, lp: &ParamLoop, dim: usize) -> Result<PhaseReport> {
    let wilson = wilson_loop(lp, n, dim)?;
    let gamma_displacement = closed_form_displacement_phase(lp);
    let gamma_squeeze = closed_form_squeeze_phase(lp, n);
    let gamma_closed = clean_zero(gamma_displacement + gamma_squeeze);
    Ok(PhaseReport {
        n,
        gamma_wilson: wilson.phase,
        gamma_closed,
        gamma_displacement,
        gamma_squeeze,
        discrepancy: (wilson.phase - gamma_closed).abs(),
        dim,
        segments: lp.segments(),
        min_overlap: wilson.min_overlap,
    })
}

/// Coordinate plane in which a curvature density is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvaturePlane {
    /// The (α₁, α₂) plane.
    Displacement,
    /// The (β₁, β₂) plane.
    Squeeze,
}

/// Curvature density (phase per unit enclosed area, counterclockwise
/// positive) at the given parameter point.  The displacement plane carries
/// the constant −2; the squeeze plane carries −(n+½) sinh(2|β|)/|β|, which
/// the printed formula leaves undefined at β = 0.
pub fn curvature_at(point: &ParamPoint, plane: CurvaturePlane, n: usize) -> Result<f64> {
    point.validate()?;
    match plane {
        CurvaturePlane::Displacement => Ok(-2.0),
        CurvaturePlane::Squeeze => {
            let b = point.beta.norm();
            if b == 0.0 {
                return Err(Error::Domain(
                    "squeeze-plane curvature −(n+½)sinh(2|β|)/|β| is undefined at β = 0".into(),
                ));
            }
            Ok(-(n as f64 + 0.5) * (2.0 * b).sinh() / b)
        }
    }
}

/// Curvature density in the (α₁, α₂) plane: constant −2 for every level.
pub fn displacement_curvature() -> f64 {
    -2.0
}

/// Curvature density in the (β₁, β₂) plane at radius |β| for level n,
/// −(n + ½) sinh(2|β|)/|β|, continued through β = 0 by its limit −(2n+1).
pub fn squeeze_curvature(beta_abs: f64, n: usize) -> f64 {
    -(n as f64 + 0.5) * 2.0 * sinhc(2.0 * beta_abs)
}
