//! External image forces built from an edge map.
//!
//! Three models are provided: an electrostatic potential where edge cells act
//! as charges, a heat potential where the edge map diffuses as temperature,
//! and the united force, a weighted sum whose heat share decays with the
//! iteration count through [`k_schedule`]. In every model the force is the
//! gradient of the potential, so it points uphill toward the edges.

mod electro;
mod heat;

pub use electro::{
    electrostatic_potential, electrostatic_potential_direct, electrostatic_potential_fft,
    ElectroMethod,
};
pub use heat::{heat_potential, laplacian};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::grid::{gradient, ScalarField, VectorField};
use crate::snakes::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElectroParams {
    /// Falloff exponent of the kernel.
    pub lambda: f64,
    /// Kernel scale.
    pub k: f64,
    /// Softening offset in pixels; keeps `r > 0` on top of a charge.
    pub h: f64,
    pub method: ElectroMethod,
}

impl Default for ElectroParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            k: 1.0,
            h: 1.0,
            method: ElectroMethod::Fft,
        }
    }
}

impl ElectroParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.lambda > 0.0 && self.lambda.is_finite(), || {
            format!("electro.lambda must be > 0, got {}", self.lambda)
        })?;
        ensure(self.k > 0.0 && self.k.is_finite(), || {
            format!("electro.k must be > 0, got {}", self.k)
        })?;
        ensure(self.h > 0.0 && self.h.is_finite(), || {
            format!("electro.h must be > 0, got {}", self.h)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatParams {
    pub steps: usize,
    /// Explicit step; stable up to 0.25.
    pub dt: f64,
}

impl Default for HeatParams {
    fn default() -> Self {
        Self {
            steps: 400,
            dt: 0.0625,
        }
    }
}

impl HeatParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.dt > 0.0 && self.dt <= 0.25, || {
            format!("heat.dt must lie in (0, 0.25], got {}", self.dt)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UnitedParams {
    pub gamma_e: f64,
    pub gamma_h: f64,
}

impl Default for UnitedParams {
    fn default() -> Self {
        Self {
            gamma_e: 1.0,
            gamma_h: 1.0,
        }
    }
}

impl UnitedParams {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.gamma_e >= 0.0 && self.gamma_h >= 0.0 && self.gamma_e + self.gamma_h > 0.0,
            || {
                format!(
                    "united weights must be >= 0 with a positive sum, got ({}, {})",
                    self.gamma_e, self.gamma_h
                )
            },
        )
    }
}

/// Gradient of the potential, optionally scaled so the largest vector has
/// unit length. A flat potential yields the zero field either way.
pub fn force_from_potential(potential: &ScalarField, normalize: bool) -> VectorField {
    let f = gradient(potential);
    if !normalize {
        return f;
    }
    let m = f.max_magnitude();
    if m > 0.0 {
        f.scaled(1.0 / m)
    } else {
        f
    }
}

/// Heat weight decay `1 / (1 + ln n)`.
pub fn k_schedule(iteration: usize) -> Result<f64> {
    if iteration == 0 {
        return Err(Error::InvalidParameter(
            "k_schedule is defined for iterations >= 1".into(),
        ));
    }
    Ok(1.0 / (1.0 + (iteration as f64).ln()))
}

/// `gamma_e * f_elect + k(iteration) * gamma_h * f_heat`, cell by cell.
pub fn united_force(
    f_elect: &VectorField,
    f_heat: &VectorField,
    p: &UnitedParams,
    iteration: usize,
) -> Result<VectorField> {
    p.validate()?;
    if f_elect.shape() != f_heat.shape() {
        return Err(Error::DimensionMismatch(f_elect.shape(), f_heat.shape()));
    }
    let wh = k_schedule(iteration)? * p.gamma_h;
    let combine = |e: &ScalarField, h: &ScalarField| {
        let v = e
            .values()
            .iter()
            .zip(h.values())
            .map(|(a, b)| p.gamma_e * a + wh * b)
            .collect();
        ScalarField::new(e.width(), e.height(), v)
    };
    VectorField::new(
        combine(&f_elect.fx, &f_heat.fx)?,
        combine(&f_elect.fy, &f_heat.fy)?,
    )
}

/// A force field that may change with the iteration number.
///
/// Solvers query it once per vertex or cell; `iteration` starts at 1.
pub trait ForceSource {
    fn shape(&self) -> (usize, usize);

    /// Bilinear sample at a sub-pixel position (clamped to the raster).
    fn sample(&self, iteration: usize, p: Point) -> Point;
}

impl ForceSource for VectorField {
    fn shape(&self) -> (usize, usize) {
        VectorField::shape(self)
    }

    fn sample(&self, _iteration: usize, p: Point) -> Point {
        let (fx, fy) = VectorField::sample(self, p.x, p.y);
        Point::new(fx, fy)
    }
}

impl<T: ForceSource + ?Sized> ForceSource for &T {
    fn shape(&self) -> (usize, usize) {
        (**self).shape()
    }

    fn sample(&self, iteration: usize, p: Point) -> Point {
        (**self).sample(iteration, p)
    }
}

/// Potential and force of one model. The force is the gradient of
/// `potential` exactly; normalization rescales both together.
#[derive(Clone, Debug)]
pub struct ForceComponent {
    pub potential: ScalarField,
    pub force: VectorField,
}

impl ForceComponent {
    pub fn from_potential(potential: ScalarField, normalize: bool) -> Self {
        let raw = gradient(&potential);
        let m = raw.max_magnitude();
        if normalize && m > 0.0 {
            let s = 1.0 / m;
            Self {
                potential: potential.map(|v| v * s),
                force: raw.scaled(s),
            }
        } else {
            Self {
                potential,
                force: raw,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForceKind {
    Electrostatic,
    Heat,
    United,
}

impl ForceKind {
    pub fn name(self) -> &'static str {
        match self {
            ForceKind::Electrostatic => "electrostatic",
            ForceKind::Heat => "heat",
            ForceKind::United => "united",
        }
    }
}

/// Which model to build and its parameter blocks. Only the blocks the
/// model needs are required: `united` needs both `electro` and `heat`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceConfig {
    pub kind: ForceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electro: Option<ElectroParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heat: Option<HeatParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub united: Option<UnitedParams>,
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_true() -> bool {
    true
}

impl ForceConfig {
    pub fn electrostatic(p: ElectroParams) -> Self {
        Self {
            kind: ForceKind::Electrostatic,
            electro: Some(p),
            heat: None,
            united: None,
            normalize: true,
        }
    }

    pub fn heat(p: HeatParams) -> Self {
        Self {
            kind: ForceKind::Heat,
            electro: None,
            heat: Some(p),
            united: None,
            normalize: true,
        }
    }

    pub fn united(e: ElectroParams, h: HeatParams, u: UnitedParams) -> Self {
        Self {
            kind: ForceKind::United,
            electro: Some(e),
            heat: Some(h),
            united: Some(u),
            normalize: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let need_e = matches!(self.kind, ForceKind::Electrostatic | ForceKind::United);
        let need_h = matches!(self.kind, ForceKind::Heat | ForceKind::United);
        if need_e {
            self.electro
                .as_ref()
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "{} force requires an `electro` block",
                        self.kind.name()
                    ))
                })?
                .validate()?;
        }
        if need_h {
            self.heat
                .as_ref()
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "{} force requires a `heat` block",
                        self.kind.name()
                    ))
                })?
                .validate()?;
        }
        if self.kind == ForceKind::United {
            self.united.clone().unwrap_or_default().validate()?;
        }
        Ok(())
    }

    pub fn build(&self, edge: &ScalarField) -> Result<BuiltForce> {
        self.validate()?;
        let electro = match (&self.electro, self.kind) {
            (Some(p), ForceKind::Electrostatic | ForceKind::United) => Some(
                ForceComponent::from_potential(electrostatic_potential(edge, p)?, self.normalize),
            ),
            _ => None,
        };
        let heat = match (&self.heat, self.kind) {
            (Some(p), ForceKind::Heat | ForceKind::United) => Some(ForceComponent::from_potential(
                heat_potential(edge, p)?,
                self.normalize,
            )),
            _ => None,
        };
        Ok(BuiltForce {
            kind: self.kind,
            electro,
            heat,
            weights: self.united.clone().unwrap_or_default(),
        })
    }
}

/// Precomputed fields for one [`ForceConfig`].
#[derive(Clone, Debug)]
pub struct BuiltForce {
    pub kind: ForceKind,
    pub electro: Option<ForceComponent>,
    pub heat: Option<ForceComponent>,
    pub weights: UnitedParams,
}

impl BuiltForce {
    fn united_parts(&self) -> (&ForceComponent, &ForceComponent) {
        (
            self.electro
                .as_ref()
                .expect("united force has an electro part"),
            self.heat.as_ref().expect("united force has a heat part"),
        )
    }

    /// Potential whose gradient is the force at `iteration`.
    pub fn potential(&self, iteration: usize) -> Result<ScalarField> {
        match self.kind {
            ForceKind::Electrostatic => Ok(self.electro.as_ref().unwrap().potential.clone()),
            ForceKind::Heat => Ok(self.heat.as_ref().unwrap().potential.clone()),
            ForceKind::United => {
                let (e, h) = self.united_parts();
                let wh = k_schedule(iteration)? * self.weights.gamma_h;
                let ge = self.weights.gamma_e;
                let v = e
                    .potential
                    .values()
                    .iter()
                    .zip(h.potential.values())
                    .map(|(a, b)| ge * a + wh * b)
                    .collect();
                ScalarField::new(e.potential.width(), e.potential.height(), v)
            }
        }
    }

    /// Materialized force field at `iteration`.
    pub fn field(&self, iteration: usize) -> Result<VectorField> {
        match self.kind {
            ForceKind::Electrostatic => Ok(self.electro.as_ref().unwrap().force.clone()),
            ForceKind::Heat => Ok(self.heat.as_ref().unwrap().force.clone()),
            ForceKind::United => {
                let (e, h) = self.united_parts();
                united_force(&e.force, &h.force, &self.weights, iteration)
            }
        }
    }
}

impl ForceSource for BuiltForce {
    fn shape(&self) -> (usize, usize) {
        self.electro
            .as_ref()
            .or(self.heat.as_ref())
            .expect("at least one component")
            .force
            .shape()
    }

    fn sample(&self, iteration: usize, p: Point) -> Point {
        match self.kind {
            ForceKind::Electrostatic => {
                ForceSource::sample(&self.electro.as_ref().unwrap().force, iteration, p)
            }
            ForceKind::Heat => {
                ForceSource::sample(&self.heat.as_ref().unwrap().force, iteration, p)
            }
            ForceKind::United => {
                // bilinear sampling is linear, so combining samples equals
                // sampling the combined field
                let (e, h) = self.united_parts();
                let k = k_schedule(iteration.max(1)).expect("iteration >= 1");
                let fe = ForceSource::sample(&e.force, iteration, p);
                let fh = ForceSource::sample(&h.force, iteration, p);
                fe * self.weights.gamma_e + fh * (k * self.weights.gamma_h)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_field(w: usize, h: usize, seed: u64) -> ScalarField {
        let mut s = seed;
        ScalarField::from_fn(w, h, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .unwrap()
    }

    fn random_vectors(seed: u64) -> VectorField {
        VectorField::new(lcg_field(8, 8, seed), lcg_field(8, 8, seed ^ 0x9e37)).unwrap()
    }

    #[test]
    fn k_schedule_values() {
        assert_eq!(k_schedule(1).unwrap(), 1.0);
        assert!((k_schedule(10).unwrap() - 0.302793).abs() < 1e-6);
        assert!(k_schedule(0).is_err());
        let mut prev = k_schedule(1).unwrap();
        for n in 2..5000 {
            let k = k_schedule(n).unwrap();
            assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn constant_potential_has_no_force() {
        let p = ScalarField::from_fn(6, 6, |_, _| 2.0).unwrap();
        for norm in [false, true] {
            let f = force_from_potential(&p, norm);
            assert_eq!(f.max_magnitude(), 0.0);
        }
    }

    #[test]
    fn force_points_at_the_charge() {
        let mut e = ScalarField::zeros(16, 16).unwrap();
        e.set(5, 5, 1.0);
        let pot = electrostatic_potential(&e, &ElectroParams::default()).unwrap();
        let f = force_from_potential(&pot, false);
        let (fx, fy) = f.get(8, 5);
        assert!(fx < 0.0);
        assert!(fy.abs() < 1e-12);
    }

    #[test]
    fn normalized_force_has_unit_peak() {
        let mut e = ScalarField::zeros(16, 16).unwrap();
        e.set(5, 5, 1.0);
        e.set(10, 12, 0.5);
        let pot = electrostatic_potential(&e, &ElectroParams::default()).unwrap();
        let f = force_from_potential(&pot, true);
        assert!((f.max_magnitude() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn united_degenerate_weights() {
        let e = random_vectors(1);
        let h = random_vectors(2);
        let only_e = UnitedParams {
            gamma_e: 1.0,
            gamma_h: 0.0,
        };
        assert_eq!(united_force(&e, &h, &only_e, 7).unwrap(), e);
        let only_h = UnitedParams {
            gamma_e: 0.0,
            gamma_h: 1.0,
        };
        assert_eq!(united_force(&e, &h, &only_h, 1).unwrap(), h);
    }

    #[test]
    fn united_matches_componentwise_oracle() {
        let e = random_vectors(3);
        let h = random_vectors(4);
        let p = UnitedParams {
            gamma_e: 0.7,
            gamma_h: 0.5,
        };
        let got = united_force(&e, &h, &p, 10).unwrap();
        let k10 = 1.0 / (1.0 + 10f64.ln());
        for y in 0..8 {
            for x in 0..8 {
                let want_x = 0.7 * e.fx.get(x, y) + k10 * 0.5 * h.fx.get(x, y);
                let want_y = 0.7 * e.fy.get(x, y) + k10 * 0.5 * h.fy.get(x, y);
                assert!((got.fx.get(x, y) - want_x).abs() < 1e-12);
                assert!((got.fy.get(x, y) - want_y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn united_rejects_mismatch_and_iteration_zero() {
        let e = random_vectors(5);
        let h = VectorField::zeros(9, 8).unwrap();
        assert!(matches!(
            united_force(&e, &h, &UnitedParams::default(), 1),
            Err(Error::DimensionMismatch(..))
        ));
        assert!(united_force(&e, &e, &UnitedParams::default(), 0).is_err());
    }

    #[test]
    fn heat_residual_decays_with_iterations() {
        let e = random_vectors(6);
        let h = random_vectors(7);
        let p = UnitedParams {
            gamma_e: 0.8,
            gamma_h: 0.6,
        };
        let hmax = h.max_magnitude();
        for n in [1, 10, 100, 10_000, 1_000_000] {
            let u = united_force(&e, &h, &p, n).unwrap();
            let resid = VectorField::new(
                ScalarField::new(
                    8,
                    8,
                    u.fx.values()
                        .iter()
                        .zip(e.fx.values())
                        .map(|(a, b)| a - 0.8 * b)
                        .collect(),
                )
                .unwrap(),
                ScalarField::new(
                    8,
                    8,
                    u.fy.values()
                        .iter()
                        .zip(e.fy.values())
                        .map(|(a, b)| a - 0.8 * b)
                        .collect(),
                )
                .unwrap(),
            )
            .unwrap();
            let bound = 0.6 / (1.0 + (n as f64).ln()) * hmax;
            assert!(resid.max_magnitude() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn config_requires_blocks() {
        let mut cfg = ForceConfig::united(
            ElectroParams::default(),
            HeatParams::default(),
            UnitedParams::default(),
        );
        assert!(cfg.validate().is_ok());
        cfg.heat = None;
        assert!(cfg.validate().is_err());
        let cfg = ForceConfig {
            kind: ForceKind::Electrostatic,
            electro: None,
            heat: Some(HeatParams::default()),
            united: None,
            normalize: true,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn built_united_sample_matches_materialized_field() {
        let mut edge = ScalarField::zeros(24, 24).unwrap();
        for i in 6..18 {
            edge.set(i, 6, 1.0);
            edge.set(i, 17, 1.0);
        }
        let cfg = ForceConfig::united(
            ElectroParams::default(),
            HeatParams {
                steps: 20,
                dt: 0.25,
            },
            UnitedParams {
                gamma_e: 0.7,
                gamma_h: 0.5,
            },
        );
        let built = cfg.build(&edge).unwrap();
        let field = built.field(10).unwrap();
        for p in [
            Point::new(3.3, 4.7),
            Point::new(12.0, 12.0),
            Point::new(20.9, 1.1),
        ] {
            let a = built.sample(10, p);
            let (bx, by) = field.sample(p.x, p.y);
            assert!((a.x - bx).abs() < 1e-12 && (a.y - by).abs() < 1e-12);
        }
        // the united potential's gradient is the united force
        let pot = built.potential(10).unwrap();
        let g = gradient(&pot);
        for (a, b) in g.fx.values().iter().zip(field.fx.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
