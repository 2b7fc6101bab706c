//! `trotter evolve`: one trajectory with a chosen scheme.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use trotter_core::analysis::{vector_bound_report, VectorBoundReport};
use trotter_core::controls::{ControlPair, ControlPreset};
use trotter_core::discretization::{KineticDiscretization, KineticOperator, Potential, PotentialOperator, SpatialGrid, StateVector};
use trotter_core::propagators::{EvolveOptions, Propagator, Scheme};
use trotter_experiments::PotentialChoice;

use crate::exit::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `ψ(x) = cos x` sampled on the grid.
    Cos,
    /// Seeded random unit vector.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    pub scheme: Scheme,
    pub discretization: KineticDiscretization,
    pub preset: String,
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub potential: PotentialChoice,
    pub potential_value: f64,
    pub horizon: f64,
    pub n: usize,
    pub steps: usize,
    /// Snapshot period in steps; 0 keeps only the final state.
    pub snapshot_every: usize,
    pub initial: InitialState,
    pub seed: u64,
    /// Also compute a converged reference and report the error against it.
    pub compare_reference: bool,
    pub reference_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

pub const OPTIONAL_KEYS: &[&str] = &["threads", "output"];

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::G2,
            discretization: KineticDiscretization::FiniteDifference,
            preset: "paper-sec7".into(),
            a: 1.0,
            c1: 1.0,
            c2: 1.0,
            potential: PotentialChoice::OneMinusCos,
            potential_value: 1.0,
            horizon: 1e-3,
            n: 64,
            steps: 10,
            snapshot_every: 1,
            initial: InitialState::Cos,
            seed: 20240501,
            compare_reference: true,
            reference_tol: 1e-11,
            threads: None,
            output: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReferenceComparison {
    pub steps: usize,
    pub last_difference: f64,
    /// `‖ψ_L - ψ_ref‖ / ‖ψ_0‖`.
    pub relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct EvolveSummary {
    pub scheme: Scheme,
    pub discretization: KineticDiscretization,
    pub n: usize,
    pub steps: usize,
    pub horizon: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub max_norm_drift: f64,
    pub reference: Option<ReferenceComparison>,
    pub vector_bound: Option<VectorBoundReport>,
}

pub struct EvolveOutput {
    pub summary: EvolveSummary,
    pub state_csv: String,
    pub trajectory_csv: Option<String>,
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 3 {
            return Err(CliError::config(format!("n must be at least 3, got {}", self.n)));
        }
        if self.steps == 0 {
            return Err(CliError::config("steps must be at least 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CliError::config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads must be at least 1"));
        }
        Ok(())
    }

    fn controls(&self) -> Result<ControlPair, CliError> {
        let params = BTreeMap::from([("a".to_string(), self.a), ("c1".to_string(), self.c1), ("c2".to_string(), self.c2)]);
        Ok(ControlPreset::from_id(&self.preset, &params)?.build(self.horizon)?)
    }

    fn operators(&self) -> Result<(KineticOperator, PotentialOperator), CliError> {
        let grid = SpatialGrid::symmetric_2pi(self.n)?;
        let potential = match self.potential {
            PotentialChoice::OneMinusCos => Potential::one_minus_cos(),
            PotentialChoice::Constant => Potential::constant(self.potential_value),
        };
        Ok((KineticOperator::build(grid, self.discretization)?, PotentialOperator::build(potential, grid)?))
    }

    fn initial_state(&self, grid: SpatialGrid) -> Result<StateVector, CliError> {
        Ok(match self.initial {
            InitialState::Cos => StateVector::sample_function(f64::cos, grid)?,
            InitialState::Random => StateVector::random_unit(grid, &mut ChaCha8Rng::seed_from_u64(self.seed)),
        })
    }
}

pub fn run_evolve(cfg: &EvolveConfig) -> Result<EvolveOutput, CliError> {
    cfg.validate()?;
    let controls = cfg.controls()?;
    let (kinetic, potential) = cfg.operators()?;
    let prop = Propagator::new(&controls, &kinetic, &potential)?;
    let psi0 = cfg.initial_state(*kinetic.grid())?;
    let options = if cfg.snapshot_every > 0 { EvolveOptions::snapshots(cfg.snapshot_every) } else { EvolveOptions::default() };
    let result = prop.evolve(cfg.scheme, &psi0, 0.0, cfg.horizon, cfg.steps, options)?;

    let initial_norm = psi0.norm2();
    let reference = if cfg.compare_reference {
        let r = prop.reference(&psi0, 0.0, cfg.horizon, cfg.reference_tol)?;
        Some(ReferenceComparison {
            steps: r.steps,
            last_difference: r.last_difference,
            relative_error: result.state.distance(&r.state)? / initial_norm,
        })
    } else {
        None
    };
    let vector_bound = if result.snapshots.is_empty() {
        None
    } else {
        Some(vector_bound_report(cfg.scheme, &result.snapshots, &kinetic, cfg.horizon, cfg.steps)?)
    };

    let mut state_csv = String::from("index,x,re,im\n");
    for (j, z) in result.state.amplitudes().iter().enumerate() {
        state_csv.push_str(&format!("{j},{},{},{}\n", kinetic.grid().node(j), z.re, z.im));
    }
    let trajectory_csv = (!result.snapshots.is_empty()).then(|| {
        let mut csv = String::from("t,norm,rescaled_norm\n");
        for (t, psi) in &result.snapshots {
            csv.push_str(&format!("{t},{},{}\n", psi.norm2(), psi.rescaled_norm()));
        }
        csv
    });

    Ok(EvolveOutput {
        summary: EvolveSummary {
            scheme: cfg.scheme,
            discretization: cfg.discretization,
            n: cfg.n,
            steps: cfg.steps,
            horizon: cfg.horizon,
            initial_norm,
            final_norm: result.state.norm2(),
            max_norm_drift: result.max_norm_drift,
            reference,
            vector_bound,
        },
        state_csv,
        trajectory_csv,
    })
}
