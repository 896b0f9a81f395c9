//! Problem data shared by the asymptotic and numerical solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ChannelProfile;

/// Cation with valence `alpha1 > 0` and anion with valence `-alpha2 < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonSpecies {
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(default = "one")]
    pub d1: f64,
    #[serde(default = "one")]
    pub d2: f64,
}

fn one() -> f64 {
    1.0
}

impl IonSpecies {
    pub fn new(alpha1: f64, alpha2: f64, d1: f64, d2: f64) -> Result<Self> {
        let s = Self {
            alpha1,
            alpha2,
            d1,
            d2,
        };
        s.validate()?;
        Ok(s)
    }

    /// Unit valences and diffusivities.
    pub fn symmetric() -> Self {
        Self {
            alpha1: 1.0,
            alpha2: 1.0,
            d1: 1.0,
            d2: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("d1", self.d1),
            ("d2", self.d2),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidProblem(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha1 + self.alpha2
    }
}

/// Dirichlet data: `phi(0) = phi0`, `phi(1) = 0`, `c_k(0) = l_k`, `c_k(1) = r_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryData {
    pub phi0: f64,
    pub l1: f64,
    pub l2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl BoundaryData {
    pub fn new(phi0: f64, l1: f64, l2: f64, r1: f64, r2: f64) -> Result<Self> {
        let b = Self {
            phi0,
            l1,
            l2,
            r1,
            r2,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.phi0.is_finite() {
            return Err(Error::InvalidProblem("phi0 must be finite".into()));
        }
        for (name, v) in [("l1", self.l1), ("l2", self.l2), ("r1", self.r1), ("r2", self.r2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "boundary concentration {name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }

    /// `(c1, c2)` on one end.
    pub fn concentrations(&self, side: Side) -> (f64, f64) {
        match side {
            Side::Left => (self.l1, self.l2),
            Side::Right => (self.r1, self.r2),
        }
    }

    pub fn potential(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.phi0,
            Side::Right => 0.0,
        }
    }

    /// All four boundary charges equal a common value `k`; returns it.
    pub fn common_charge(&self, species: &IonSpecies) -> Option<f64> {
        let k = species.alpha1 * self.l1;
        let others = [
            species.alpha2 * self.l2,
            species.alpha1 * self.r1,
            species.alpha2 * self.r2,
        ];
        others
            .iter()
            .all(|v| (v - k).abs() <= 1e-12 * k.abs().max(v.abs()))
            .then_some(k)
    }

    /// Reflect `x -> 1 - x` and shift the potential so that `phi(1) = 0` again.
    pub fn mirrored(&self) -> Self {
        Self {
            phi0: -self.phi0,
            l1: self.r1,
            l2: self.r2,
            r1: self.l1,
            r2: self.l2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn position(self) -> f64 {
        match self {
            Side::Left => 0.0,
            Side::Right => 1.0,
        }
    }
}

/// Full steady-state problem; `mu^2 = 1/lambda` with `lambda` the Debye number.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyProblem {
    pub profile: ChannelProfile,
    pub species: IonSpecies,
    pub boundary: BoundaryData,
    pub mu: f64,
}

impl SteadyProblem {
    pub fn new(
        profile: ChannelProfile,
        species: IonSpecies,
        boundary: BoundaryData,
        mu: f64,
    ) -> Result<Self> {
        species.validate()?;
        boundary.validate()?;
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidProblem(format!("mu = {mu} must be >= 0")));
        }
        Ok(Self {
            profile,
            species,
            boundary,
            mu,
        })
    }

    /// `alpha = 1`, `D = 1`, `l = (1, 1)`, `r = (2, 2)`, `phi0 = 0`, `h = 1`.
    pub fn standard(mu: f64) -> Self {
        Self {
            profile: ChannelProfile::constant(1.0).expect("constant profile"),
            species: IonSpecies::symmetric(),
            boundary: BoundaryData {
                phi0: 0.0,
                l1: 1.0,
                l2: 1.0,
                r1: 2.0,
                r2: 2.0,
            },
            mu,
        }
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..self.clone() }
    }

    pub fn lambda(&self) -> f64 {
        1.0 / (self.mu * self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_failing_field() {
        let err = BoundaryData::new(0.0, -1.0, 1.0, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("l1"));
        assert!(IonSpecies::new(1.0, 0.0, 1.0, 1.0).is_err());
        let p = SteadyProblem::standard(0.01);
        assert!(SteadyProblem::new(p.profile, p.species, p.boundary, -0.1).is_err());
    }

    #[test]
    fn common_charge_detection() {
        let s = IonSpecies::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let b = BoundaryData::new(0.3, 0.5, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(b.common_charge(&s), Some(1.0));
        let b = BoundaryData::new(0.3, 0.5, 1.0, 0.5, 1.1).unwrap();
        assert_eq!(b.common_charge(&s), None);
    }
}
