use serde::{Deserialize, Serialize};

use crate::controls::ControlPair;
use crate::error::{Error, Result};

/// The four splitting schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// First-order standard: coefficients frozen at `t + h`.
    S1,
    /// First-order generalized: exact coefficient integrals over the step.
    G1,
    /// Second-order standard (Strang) with midpoint coefficients.
    S2,
    /// Second-order generalized: kinetic integrals over each half step, potential over the full step.
    G2,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::S1, Scheme::G1, Scheme::S2, Scheme::G2];

    pub fn order(&self) -> usize {
        match self {
            Scheme::S1 | Scheme::G1 => 1,
            Scheme::S2 | Scheme::G2 => 2,
        }
    }

    pub fn is_generalized(&self) -> bool {
        matches!(self, Scheme::G1 | Scheme::G2)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Scheme::S1 => "s1",
            Scheme::G1 => "g1",
            Scheme::S2 => "s2",
            Scheme::G2 => "g2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Scheme::S1),
            "g1" => Ok(Scheme::G1),
            "s2" => Ok(Scheme::S2),
            "g2" => Ok(Scheme::G2),
            other => Err(Error::invalid(format!("unknown scheme '{other}' (expected s1, g1, s2 or g2)"))),
        }
    }

    /// Exponent angles of one step on `[t, t + h]`.
    pub fn factors(&self, controls: &ControlPair, t: f64, h: f64) -> Result<StepFactors> {
        if !(h >= 0.0) {
            return Err(Error::invalid(format!("step size must be non-negative, got {h}")));
        }
        let (f1, f2) = (&controls.f1, &controls.f2);
        Ok(match self {
            Scheme::S1 => StepFactors {
                kinetic_first: h * f1.eval(t + h, 0)?,
                potential: h * f2.eval(t + h, 0)?,
                kinetic_last: 0.0,
            },
            Scheme::G1 => StepFactors {
                kinetic_first: f1.integrate(t, t + h)?,
                potential: f2.integrate(t, t + h)?,
                kinetic_last: 0.0,
            },
            Scheme::S2 => {
                let half = 0.5 * h * f1.eval(t + 0.5 * h, 0)?;
                StepFactors { kinetic_first: half, potential: h * f2.eval(t + 0.5 * h, 0)?, kinetic_last: half }
            }
            Scheme::G2 => {
                let mid = t + 0.5 * h;
                StepFactors {
                    kinetic_first: f1.integrate(t, mid)?,
                    potential: f2.integrate(t, t + h)?,
                    kinetic_last: f1.integrate(mid, t + h)?,
                }
            }
        })
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Angles of one step `exp(-i c H1) exp(-i b H2) exp(-i a H1)`, applied right to left:
/// `a = kinetic_first`, `b = potential`, `c = kinetic_last`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFactors {
    pub kinetic_first: f64,
    pub potential: f64,
    pub kinetic_last: f64,
}
