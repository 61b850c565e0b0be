use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Physical constants shared by every formula in the crate.
///
/// `theta` is the noncommutativity of the position coordinates,
/// `{x, y} = theta` classically and `[x, y] = i hbar theta` in the quantum
/// theory. It may take any real value, including zero and negative values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NCParams {
    pub m: f64,
    pub omega: f64,
    pub theta: f64,
    pub hbar: f64,
    pub kb: f64,
}

impl Default for NCParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            omega: 1.0,
            theta: 0.0,
            hbar: 1.0,
            kb: 1.0,
        }
    }
}

impl NCParams {
    pub fn new(m: f64, omega: f64, theta: f64, hbar: f64, kb: f64) -> Result<Self> {
        let p = Self {
            m,
            omega,
            theta,
            hbar,
            kb,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit mass, frequency, hbar and kB with the given theta.
    pub fn unit(theta: f64) -> Self {
        Self {
            theta,
            ..Self::default()
        }
    }

    pub fn with_m(self, m: f64) -> Self {
        Self { m, ..self }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.m, self.omega, self.theta, self.hbar, self.kb]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return domain("physical parameters must be finite");
        }
        if self.m <= 0.0 {
            return domain(format!("mass must be positive, got {}", self.m));
        }
        if self.hbar <= 0.0 {
            return domain(format!("hbar must be positive, got {}", self.hbar));
        }
        if self.kb <= 0.0 {
            return domain(format!("kB must be positive, got {}", self.kb));
        }
        if self.omega < 0.0 {
            return domain(format!("omega must be non-negative, got {}", self.omega));
        }
        Ok(())
    }

    /// Checks the extra precondition of every oscillator-dependent formula.
    pub fn require_oscillator(&self) -> Result<()> {
        self.validate()?;
        if self.omega <= 0.0 {
            return domain(format!(
                "oscillator formulas need omega > 0, got {}",
                self.omega
            ));
        }
        Ok(())
    }

    /// `m^2 omega^2 theta^2 / 4`, the recurring deformation parameter of the
    /// NC oscillator.
    pub fn kappa(&self) -> f64 {
        let v = self.m * self.omega * self.theta;
        0.25 * v * v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_mass() {
        assert!(NCParams::new(0.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(NCParams::new(-1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_theta_is_allowed() {
        assert!(NCParams::new(1.0, 1.0, -0.3, 1.0, 1.0).is_ok());
    }

    #[test]
    fn oscillator_requires_positive_omega() {
        let p = NCParams::default().with_omega(0.0);
        assert!(p.validate().is_ok());
        assert!(p.require_oscillator().is_err());
    }
}
