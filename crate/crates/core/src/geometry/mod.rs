//! Channel cross-section profiles and the geometric factors derived from them.
//!
//! A profile is the limiting cross-section area `h(x) = g0(x)^2` of a thin
//! tubular channel over the unit interval. The flux formulas only see it
//! through `rho0 = ∫ 1/h`.

mod coordinates;
mod foliation;

pub use coordinates::{jacobian_products, JacobianProducts};
pub use foliation::{build_foliation, Foliation, FoliationOptions, WallFunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::interp::MonotoneCubic;
use crate::numerics::quadrature;

/// Absolute quadrature tolerance used when callers do not pick one.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

const POSITIVITY_SAMPLES: usize = 1001;

/// Parametric description of `h`. This is also the JSON schema (`kind` tag).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    /// `h(x) = value`
    Constant { value: f64 },
    /// `h(x) = a + b x`
    AffineArea { a: f64, b: f64 },
    /// `h(x) = base + amplitude * exp(-(x - 1/2)^2 / (2 width^2))`
    Bump {
        base: f64,
        amplitude: f64,
        width: f64,
    },
    /// Monotone cubic interpolant through `(nodes, values)`.
    Sampled { nodes: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileKind", into = "ProfileKind")]
pub struct ChannelProfile {
    kind: ProfileKind,
    interp: Option<MonotoneCubic>,
}

impl TryFrom<ProfileKind> for ChannelProfile {
    type Error = Error;

    fn try_from(kind: ProfileKind) -> Result<Self> {
        ChannelProfile::new(kind)
    }
}

impl From<ChannelProfile> for ProfileKind {
    fn from(p: ChannelProfile) -> Self {
        p.kind
    }
}

fn bump_shape(x: f64, width: f64) -> (f64, f64) {
    let z = (x - 0.5) / width;
    let e = (-0.5 * z * z).exp();
    (e, -z / width * e)
}

impl ChannelProfile {
    pub fn new(kind: ProfileKind) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        let interp = match &kind {
            ProfileKind::Constant { value } if !finite(&[*value]) => {
                return bad("constant value must be finite".into())
            }
            ProfileKind::AffineArea { a, b } if !finite(&[*a, *b]) => {
                return bad("affine coefficients must be finite".into())
            }
            ProfileKind::Bump {
                base,
                amplitude,
                width,
            } => {
                if !finite(&[*base, *amplitude, *width]) || *width <= 0.0 {
                    return bad(format!("bump width must be positive, got {width}"));
                }
                None
            }
            ProfileKind::Sampled { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return bad(format!(
                        "sampled profile needs >= 2 nodes and matching values ({} nodes, {} values)",
                        nodes.len(),
                        values.len()
                    ));
                }
                if !finite(nodes) || !finite(values) {
                    return bad("sampled data must be finite".into());
                }
                if nodes.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("sampled nodes must be strictly increasing".into());
                }
                if nodes[0] > 0.0 || nodes[nodes.len() - 1] < 1.0 {
                    return bad(format!(
                        "sampled nodes must cover [0, 1], got [{}, {}]",
                        nodes[0],
                        nodes[nodes.len() - 1]
                    ));
                }
                Some(MonotoneCubic::new(nodes.clone(), values.clone()))
            }
            _ => None,
        };
        let profile = Self { kind, interp };
        profile.check_positive()?;
        Ok(profile)
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { value })
    }

    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Self::new(ProfileKind::AffineArea { a, b })
    }

    pub fn bump(base: f64, amplitude: f64, width: f64) -> Result<Self> {
        Self::new(ProfileKind::Bump {
            base,
            amplitude,
            width,
        })
    }

    pub fn sampled(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(ProfileKind::Sampled { nodes, values })
    }

    /// Samples `f` at `n` equispaced nodes on `[0, 1]`.
    pub fn sample_from<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values = nodes.iter().map(|&x| f(x)).collect();
        Self::sampled(nodes, values)
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    fn check_positive(&self) -> Result<()> {
        // Sampled interpolants cannot dip below their smallest sample, so the
        // equispaced scan is enough for every kind.
        for k in 0..POSITIVITY_SAMPLES {
            let x = k as f64 / (POSITIVITY_SAMPLES - 1) as f64;
            let h = self.value_and_slope(x).0;
            if !(h > 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "h({x}) = {h} is not positive"
                )));
            }
        }
        if let ProfileKind::Sampled { values, .. } = &self.kind {
            if let Some(v) = values.iter().find(|v| **v <= 0.0) {
                return Err(Error::InvalidProfile(format!("sample value {v} is not positive")));
            }
        }
        Ok(())
    }

    /// `h(x)` and `h'(x)` without a domain check.
    pub fn value_and_slope(&self, x: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::Constant { value } => (*value, 0.0),
            ProfileKind::AffineArea { a, b } => (a + b * x, *b),
            ProfileKind::Bump {
                base,
                amplitude,
                width,
            } => {
                let (e, de) = bump_shape(x, *width);
                (base + amplitude * e, amplitude * de)
            }
            ProfileKind::Sampled { .. } => self
                .interp
                .as_ref()
                .expect("sampled profiles carry an interpolant")
                .eval_with_derivative(x),
        }
    }

    /// `h(x)` for `x` already known to be in range.
    #[inline]
    pub fn h(&self, x: f64) -> f64 {
        self.value_and_slope(x).0
    }

    /// `h(x)` with a domain check.
    pub fn eval_h(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        Ok(self.h(x))
    }

    pub fn eval_dh(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        Ok(self.value_and_slope(x).1)
    }

    /// `∫_a^b 1/h`.
    pub fn inverse_area_integral(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let breaks = self.breakpoints(a, b);
        let mut total = 0.0;
        let share = tol / (breaks.len() - 1) as f64;
        for w in breaks.windows(2) {
            total += quadrature::integrate(|x| 1.0 / self.h(x), w[0], w[1], share)?;
        }
        Ok(total)
    }

    pub fn area_integral(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let breaks = self.breakpoints(a, b);
        let mut total = 0.0;
        let share = tol / (breaks.len() - 1) as f64;
        for w in breaks.windows(2) {
            total += quadrature::integrate(|x| self.h(x), w[0], w[1], share)?;
        }
        Ok(total)
    }

    /// Interval endpoints plus any interpolation knots strictly inside.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        if let Some(p) = &self.interp {
            pts.extend(p.nodes().iter().copied().filter(|&x| x > a && x < b));
        }
        pts.push(b);
        pts
    }

    /// Same profile kind scaled so that `∫_0^1 h = 1`.
    pub fn normalize_volume(&self) -> Result<Self> {
        let vol = self.area_integral(0.0, 1.0, 1e-13)?;
        let s = 1.0 / vol;
        let kind = match &self.kind {
            ProfileKind::Constant { value } => ProfileKind::Constant { value: value * s },
            ProfileKind::AffineArea { a, b } => ProfileKind::AffineArea { a: a * s, b: b * s },
            ProfileKind::Bump {
                base,
                amplitude,
                width,
            } => ProfileKind::Bump {
                base: base * s,
                amplitude: amplitude * s,
                width: *width,
            },
            ProfileKind::Sampled { nodes, values } => ProfileKind::Sampled {
                nodes: nodes.clone(),
                values: values.iter().map(|v| v * s).collect(),
            },
        };
        Self::new(kind)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, ProfileKind::Constant { .. })
    }
}

/// `rho0 = ∫_0^1 1/h` and `∫_0^1 h` for one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub rho0: f64,
    pub volume_integral: f64,
}

pub fn geometry_factor(profile: &ChannelProfile, quadrature_tol: f64) -> Result<GeometrySummary> {
    Ok(GeometrySummary {
        rho0: profile.inverse_area_integral(0.0, 1.0, quadrature_tol)?,
        volume_integral: profile.area_integral(0.0, 1.0, quadrature_tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn eval_h_examples() {
        assert_eq!(ChannelProfile::constant(1.0).unwrap().eval_h(0.37).unwrap(), 1.0);
        assert_eq!(ChannelProfile::affine(1.0, 1.0).unwrap().eval_h(0.5).unwrap(), 1.5);
        let sampled = ChannelProfile::sample_from(|x| 1.0 + x, 11).unwrap();
        assert!((sampled.eval_h(0.25).unwrap() - 1.25).abs() < 1e-6);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let p = ChannelProfile::constant(1.0).unwrap();
        assert_eq!(p.eval_h(1.5), Err(Error::OutOfDomain { x: 1.5 }));
        assert!(p.eval_h(-1e-9).is_err());
        assert!(p.eval_h(f64::NAN).is_err());
    }

    #[test]
    fn construction_rejects_bad_profiles() {
        assert!(ChannelProfile::constant(0.0).is_err());
        assert!(ChannelProfile::affine(1.0, -1.5).is_err());
        assert!(ChannelProfile::bump(1.0, -1.2, 0.1).is_err());
        assert!(ChannelProfile::bump(1.0, 1.0, 0.0).is_err());
        assert!(ChannelProfile::sampled(vec![0.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(ChannelProfile::sampled(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(ChannelProfile::sampled(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn geometry_factor_examples() {
        let g = geometry_factor(&ChannelProfile::constant(1.0).unwrap(), 1e-10).unwrap();
        assert!((g.rho0 - 1.0).abs() < 1e-14 && (g.volume_integral - 1.0).abs() < 1e-14);
        let g = geometry_factor(&ChannelProfile::affine(1.0, 1.0).unwrap(), 1e-10).unwrap();
        assert!((g.rho0 - LN_2).abs() < 1e-12);
        assert!((g.volume_integral - 1.5).abs() < 1e-12);
    }

    #[test]
    fn normalize_volume_examples() {
        let p = ChannelProfile::constant(4.0).unwrap().normalize_volume().unwrap();
        assert_eq!(p.kind(), &ProfileKind::Constant { value: 1.0 });

        let p = ChannelProfile::affine(1.0, 1.0).unwrap().normalize_volume().unwrap();
        match p.kind() {
            ProfileKind::AffineArea { a, b } => {
                assert!((a - 2.0 / 3.0).abs() < 1e-12 && (b - 2.0 / 3.0).abs() < 1e-12)
            }
            other => panic!("unexpected kind {other:?}"),
        }
        let vol = geometry_factor(&p, 1e-12).unwrap().volume_integral;
        assert!((vol - 1.0).abs() < 1e-12);

        let again = p.normalize_volume().unwrap();
        match (p.kind(), again.kind()) {
            (ProfileKind::AffineArea { a, b }, ProfileKind::AffineArea { a: a2, b: b2 }) => {
                assert!((a - a2).abs() < 1e-12 && (b - b2).abs() < 1e-12)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn sampled_rho0_matches_analytic() {
        let sampled = ChannelProfile::sample_from(|x| 1.0 + x, 21).unwrap();
        let g = geometry_factor(&sampled, 1e-10).unwrap();
        assert!((g.rho0 - LN_2).abs() < 1e-5);
        let bump = ChannelProfile::bump(1.0, 0.5, 0.15).unwrap();
        let sampled = ChannelProfile::sample_from(|x| bump.h(x), 201).unwrap();
        let exact = geometry_factor(&bump, 1e-12).unwrap().rho0;
        assert!((geometry_factor(&sampled, 1e-10).unwrap().rho0 - exact).abs() < 1e-5);
    }
}
