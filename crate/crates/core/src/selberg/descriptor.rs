use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::provider::CoefficientProvider;
use crate::error::{Error, Result};

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaFactorTerm {
    pub lambda: f64,
    pub mu: C64,
}

impl GammaFactorTerm {
    pub fn new(lambda: f64, mu: C64) -> Self {
        GammaFactorTerm { lambda, mu }
    }
}

/// Laurent part sum_m gamma_m / (s-1)^m at s = 1; `gamma[m-1]` holds gamma_m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PolarPart {
    #[serde(rename = "m_F")]
    pub m_f: usize,
    #[serde(default)]
    pub gamma: Vec<C64>,
}

impl PolarPart {
    pub fn entire() -> Self {
        PolarPart::default()
    }

    pub fn new(gamma: Vec<C64>) -> Self {
        PolarPart {
            m_f: gamma.len(),
            gamma,
        }
    }

    /// gamma_m for 1 <= m <= m_F, zero otherwise.
    pub fn gamma_m(&self, m: usize) -> C64 {
        if m == 0 || m > self.gamma.len() {
            C64::new(0.0, 0.0)
        } else {
            self.gamma[m - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LFunctionDescriptor {
    pub name: String,
    pub omega: C64,
    #[serde(rename = "Q")]
    pub q_factor: f64,
    pub gamma_factors: Vec<GammaFactorTerm>,
    #[serde(default)]
    pub polar: PolarPart,
    pub coefficients: CoefficientProvider,
}

impl LFunctionDescriptor {
    /// Build and validate.
    pub fn new(
        name: impl Into<String>,
        omega: C64,
        q_factor: f64,
        gamma_factors: Vec<GammaFactorTerm>,
        polar: PolarPart,
        coefficients: CoefficientProvider,
    ) -> Result<Self> {
        let desc = LFunctionDescriptor {
            name: name.into(),
            omega,
            q_factor,
            gamma_factors,
            polar,
            coefficients,
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let desc: LFunctionDescriptor = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("descriptor JSON: {e}")))?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn degree(&self) -> f64 {
        2.0 * self.gamma_factors.iter().map(|g| g.lambda).sum::<f64>()
    }

    /// Standing hypotheses: r >= 1, lambda_j > 0, Re mu_j >= 0, Q > 0, |omega| = 1, d >= 1.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.gamma_factors.is_empty() {
            return bad("at least one gamma factor is required".into());
        }
        for (j, g) in self.gamma_factors.iter().enumerate() {
            if !(g.lambda.is_finite() && g.lambda > 0.0) {
                return bad(format!("gamma factor {}: lambda = {} must be > 0", j + 1, g.lambda));
            }
            if !(g.mu.re.is_finite() && g.mu.im.is_finite()) || g.mu.re < 0.0 {
                return bad(format!("gamma factor {}: Re(mu) = {} must be >= 0", j + 1, g.mu.re));
            }
        }
        if !(self.q_factor.is_finite() && self.q_factor > 0.0) {
            return bad(format!("Q = {} must be > 0", self.q_factor));
        }
        if (self.omega.norm() - 1.0).abs() > 1e-12 {
            return bad(format!("|omega| = {} must equal 1", self.omega.norm()));
        }
        let d = self.degree();
        if d < 1.0 - 1e-12 {
            return bad(format!("degree d = {d} must be >= 1"));
        }
        if self.polar.m_f != self.polar.gamma.len() {
            return bad(format!(
                "polar part: m_F = {} but {} coefficients given",
                self.polar.m_f,
                self.polar.gamma.len()
            ));
        }
        if self.polar.m_f > 0 && self.polar.gamma_m(self.polar.m_f).norm() == 0.0 {
            return bad("polar part: leading coefficient gamma_{m_F} must be nonzero".into());
        }
        self.coefficients.validate()
    }
}
