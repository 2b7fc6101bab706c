use serde::{Deserialize, Serialize};

use super::OperatorNorms;
use crate::controls::ControlNorms;
use crate::discretization::{KineticOperator, StateVector};
use crate::error::{Error, Result};
use crate::propagators::Scheme;

/// Coefficients of the local operator-norm error bound `α h^{p+1} + β h^{p+2} + γ h^{p+3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preconstants {
    pub scheme: Scheme,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

fn need(value: Option<f64>, what: &str, scheme: Scheme) -> Result<f64> {
    value.ok_or_else(|| Error::MissingInput(format!("{what} is required for scheme {scheme}")))
}

fn need_pair(value: Option<(f64, f64)>, what: &str, scheme: Scheme) -> Result<(f64, f64)> {
    value.ok_or_else(|| Error::MissingInput(format!("{what} is required for scheme {scheme}")))
}

/// Evaluates the published preconstant formulas for `scheme`.
pub fn local_preconstants(scheme: Scheme, controls: &ControlNorms, ops: &OperatorNorms) -> Result<Preconstants> {
    let (f1, f2) = controls.value;
    let c12 = need(ops.c12, "norm of [H1, H2]", scheme)?;
    Ok(match scheme {
        Scheme::S1 => {
            let (d1, d2) = need_pair(controls.first, "sup-norms of f1', f2'", scheme)?;
            let h1 = need(ops.h1, "norm of H1", scheme)?;
            let h2 = need(ops.h2, "norm of H2", scheme)?;
            Preconstants {
                scheme,
                alpha: 0.5 * d1 * h1 + 0.5 * d2 * h2 + 0.5 * f1 * f2 * c12,
                beta: Some(f1 * d2 * c12 / 6.0),
                gamma: None,
            }
        }
        Scheme::G1 => Preconstants { scheme, alpha: 0.5 * f1 * f2 * c12, beta: None, gamma: None },
        Scheme::S2 => {
            let (d1, d2) = need_pair(controls.first, "sup-norms of f1', f2'", scheme)?;
            let (dd1, dd2) = need_pair(controls.second, "sup-norms of f1'', f2''", scheme)?;
            let h1 = need(ops.h1, "norm of H1", scheme)?;
            let h2 = need(ops.h2, "norm of H2", scheme)?;
            let c112 = need(ops.c112, "norm of [H1, [H1, H2]]", scheme)?;
            let c221 = need(ops.c221, "norm of [H2, [H2, H1]]", scheme)?;
            let alpha = 7.0 / 24.0 * dd1 * h1
                + d1 * f2 * h1 / 12.0
                + 7.0 / 24.0 * dd2 * h2
                + (d1 * f2 + f1 * d2) * c12 / 6.0
                + f1 * f1 * f2 * c112 / 24.0
                + f1 * f2 * f2 * c221 / 12.0;
            let beta = d1 * d2 * h1 / 64.0
                + (f1 * dd2 / 192.0 + dd1 * f2 / 192.0 + d1 * d2 / 48.0) * c12
                + f1 * d1 * f2 * c112 / 96.0
                + f1 * f2 * d2 * c221 / 48.0;
            let gamma = d1 * d1 * f2 * c112 / 960.0 + f1 * d2 * d2 * c221 / 480.0;
            Preconstants { scheme, alpha, beta: Some(beta), gamma: Some(gamma) }
        }
        Scheme::G2 => {
            let (d1, d2) = need_pair(controls.first, "sup-norms of f1', f2'", scheme)?;
            let c112 = need(ops.c112, "norm of [H1, [H1, H2]]", scheme)?;
            let c221 = need(ops.c221, "norm of [H2, [H2, H1]]", scheme)?;
            let alpha = (7.0 / 12.0 * f1 * d2 + 11.0 / 24.0 * d1 * f2) * c12
                + 3.0 / 8.0 * f1 * f1 * f2 * c112
                + f1 * f2 * f2 * c221 / 12.0;
            Preconstants { scheme, alpha, beta: None, gamma: None }
        }
    })
}

/// Global operator-norm bound after `L` equal steps over `[0, T]`.
pub fn global_operator_bound(pc: &Preconstants, horizon: f64, steps: usize) -> f64 {
    if steps == 0 {
        return f64::INFINITY;
    }
    let t = horizon;
    let l = steps as f64;
    let beta = pc.beta.unwrap_or(0.0);
    let gamma = pc.gamma.unwrap_or(0.0);
    match pc.scheme.order() {
        1 => pc.alpha * t.powi(2) / l + beta * t.powi(3) / l.powi(2),
        _ => pc.alpha * t.powi(3) / l.powi(2) + beta * t.powi(4) / l.powi(3) + gamma * t.powi(5) / l.powi(4),
    }
}

/// One-step bound `α h^{p+1} + β h^{p+2} + γ h^{p+3}`.
pub fn local_operator_bound(pc: &Preconstants, h: f64) -> f64 {
    global_operator_bound(pc, h, 1)
}

/// Serialized bound report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub scheme: Scheme,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "L")]
    pub steps: usize,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub bound: f64,
    pub inputs: BoundInputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub controls: ControlNorms,
    pub operators: OperatorNorms,
}

impl BoundsReport {
    pub fn evaluate(scheme: Scheme, controls: ControlNorms, operators: OperatorNorms, horizon: f64, steps: usize) -> Result<Self> {
        let pc = local_preconstants(scheme, &controls, &operators)?;
        Ok(Self {
            scheme,
            horizon,
            steps,
            alpha: pc.alpha,
            beta: pc.beta,
            gamma: pc.gamma,
            bound: global_operator_bound(&pc, horizon, steps),
            inputs: BoundInputs { controls, operators },
        })
    }
}

/// The constant-free factor of the vector-norm error bound along a trajectory.
///
/// The bound holds up to an unspecified constant, reported as 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorBoundReport {
    pub scheme: Scheme,
    /// `sup_t ‖H1 ψ(t)‖⋆` over the snapshots.
    pub sup_h1_psi: f64,
    /// `‖ψ(0)‖⋆`.
    pub psi0_norm: f64,
    /// Scheme-specific bracket: `sup ‖H1ψ‖⋆ + ‖ψ0‖⋆`, or `sup √(‖ψ0‖⋆ ‖H1ψ‖⋆) + ‖ψ0‖⋆` for G1.
    pub bracket: f64,
    /// `bracket · T²/L` (first order) or `bracket · T³/L²` (second order).
    pub bound_factor: f64,
    /// Always 1; the true constant is unknown.
    pub constant: f64,
    pub up_to_constant: bool,
    pub horizon: f64,
    pub steps: usize,
    pub snapshots: usize,
}

pub fn vector_bound_report(
    scheme: Scheme,
    snapshots: &[(f64, StateVector)],
    kinetic: &KineticOperator,
    horizon: f64,
    steps: usize,
) -> Result<VectorBoundReport> {
    let (_, first) = snapshots.first().ok_or_else(|| Error::invalid("empty trajectory"))?;
    if steps == 0 {
        return Err(Error::invalid("number of steps must be at least 1"));
    }
    let psi0_norm = first.rescaled_norm();
    let mut sup_h1 = 0.0f64;
    for (_, psi) in snapshots {
        sup_h1 = sup_h1.max(kinetic.apply(psi)?.rescaled_norm());
    }
    let bracket = match scheme {
        Scheme::G1 => (psi0_norm * sup_h1).sqrt() + psi0_norm,
        _ => sup_h1 + psi0_norm,
    };
    let l = steps as f64;
    let scale = match scheme.order() {
        1 => horizon.powi(2) / l,
        _ => horizon.powi(3) / l.powi(2),
    };
    Ok(VectorBoundReport {
        scheme,
        sup_h1_psi: sup_h1,
        psi0_norm,
        bracket,
        bound_factor: bracket * scale,
        constant: 1.0,
        up_to_constant: true,
        horizon,
        steps,
        snapshots: snapshots.len(),
    })
}

/// Largest step size allowed by the vector-bound hypothesis,
/// `(‖f1‖ + ‖f2‖)⁻¹ (C1 + ‖H2‖)⁻¹ / 2`, evaluated with an estimated `C1`.
pub fn vector_bound_step_cap(controls: &ControlNorms, c1: f64, h2_norm: f64) -> f64 {
    0.5 / ((controls.value.0 + controls.value.1) * (c1 + h2_norm))
}
