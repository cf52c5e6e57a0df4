//! Input-oriented CCR efficiency in multiplier form.
//!
//! For a target unit `0` with inputs `x0` and outputs `y0` the model is
//!
//! ```text
//! maximize   mu · y0
//! subject to nu · x0 = 1
//!            mu · y_i - nu · x_i <= 0   for every unit i in the set
//!            mu, nu >= 0
//! ```
//!
//! Variables are laid out as `(mu_1 .. mu_s, nu_1 .. nu_r)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, Relation};

/// Units scoring at or above `1 - EFFICIENCY_TOLERANCE` are classed efficient.
pub const EFFICIENCY_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeaError {
    #[error("no decision-making units supplied")]
    Empty,
    #[error("target index {index} out of range for {len} units")]
    TargetOutOfRange { index: usize, len: usize },
    #[error("unit {id}: input {position} must be finite and strictly positive (got {value})")]
    NonPositiveInput {
        id: String,
        position: usize,
        value: f64,
    },
    #[error("unit {id}: output {position} must be finite and nonnegative (got {value})")]
    NegativeOutput {
        id: String,
        position: usize,
        value: f64,
    },
    #[error("unit {id}: at least one output must be positive")]
    ZeroOutputs { id: String },
    #[error("unit {id}: has no inputs or no outputs")]
    MissingDimension { id: String },
    #[error("unit {id}: expected {expected_inputs} inputs and {expected_outputs} outputs, found {inputs} and {outputs}")]
    DimensionMismatch {
        id: String,
        expected_inputs: usize,
        expected_outputs: usize,
        inputs: usize,
        outputs: usize,
    },
    #[error("efficiency oracle not applicable: {0}")]
    OracleNotApplicable(String),
    #[error("internal solver failure for unit {id}: {reason}")]
    Internal { id: String, reason: String },
}

impl DeaError {
    pub fn is_internal(&self) -> bool {
        matches!(self, DeaError::Internal { .. })
    }
}

impl From<(String, LpError)> for DeaError {
    fn from((id, err): (String, LpError)) -> Self {
        DeaError::Internal {
            id,
            reason: err.to_string(),
        }
    }
}

/// A decision-making unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmu {
    pub id: String,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

impl Dmu {
    /// Builds a unit, rejecting zero or negative inputs and all-zero outputs.
    pub fn new(
        id: impl Into<String>,
        inputs: Vec<f64>,
        outputs: Vec<f64>,
    ) -> Result<Self, DeaError> {
        let dmu = Self {
            id: id.into(),
            inputs,
            outputs,
        };
        dmu.validate()?;
        Ok(dmu)
    }

    pub fn validate(&self) -> Result<(), DeaError> {
        if self.inputs.is_empty() || self.outputs.is_empty() {
            return Err(DeaError::MissingDimension {
                id: self.id.clone(),
            });
        }
        for (position, &value) in self.inputs.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(DeaError::NonPositiveInput {
                    id: self.id.clone(),
                    position,
                    value,
                });
            }
        }
        for (position, &value) in self.outputs.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DeaError::NegativeOutput {
                    id: self.id.clone(),
                    position,
                    value,
                });
            }
        }
        if self.outputs.iter().all(|&v| v == 0.0) {
            return Err(DeaError::ZeroOutputs {
                id: self.id.clone(),
            });
        }
        Ok(())
    }
}

fn validate_set(dmus: &[Dmu]) -> Result<(usize, usize), DeaError> {
    let first = dmus.first().ok_or(DeaError::Empty)?;
    let (r, s) = (first.inputs.len(), first.outputs.len());
    for dmu in dmus {
        dmu.validate()?;
        if dmu.inputs.len() != r || dmu.outputs.len() != s {
            return Err(DeaError::DimensionMismatch {
                id: dmu.id.clone(),
                expected_inputs: r,
                expected_outputs: s,
                inputs: dmu.inputs.len(),
                outputs: dmu.outputs.len(),
            });
        }
    }
    Ok((r, s))
}

/// Efficiency of one unit together with the multipliers that attain it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub id: String,
    pub theta: f64,
    pub output_weights: Vec<f64>,
    pub input_weights: Vec<f64>,
    pub is_efficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeaResult {
    pub units: Vec<Efficiency>,
}

impl DeaResult {
    pub fn thetas(&self) -> Vec<f64> {
        self.units.iter().map(|u| u.theta).collect()
    }
}

/// Builds the multiplier-form LP evaluating `dmus[target]` against the whole set.
pub fn build_ccr_multiplier(dmus: &[Dmu], target: usize) -> Result<LinearProgram, DeaError> {
    let (r, s) = validate_set(dmus)?;
    let t = dmus.get(target).ok_or(DeaError::TargetOutOfRange {
        index: target,
        len: dmus.len(),
    })?;

    let mut objective = t.outputs.clone();
    objective.resize(s + r, 0.0);
    let mut lp = LinearProgram::new(objective);

    let mut normalization = vec![0.0; s];
    normalization.extend_from_slice(&t.inputs);
    lp.push(normalization, Relation::Eq, 1.0);

    for dmu in dmus {
        let mut row = dmu.outputs.clone();
        row.extend(dmu.inputs.iter().map(|x| -x));
        lp.push(row, Relation::Le, 0.0);
    }
    Ok(lp)
}

/// CCR efficiency of `dmus[target]`: `(theta, output weights, input weights)`.
pub fn ccr_efficiency(
    dmus: &[Dmu],
    target: usize,
) -> Result<(f64, Vec<f64>, Vec<f64>), DeaError> {
    let lp = build_ccr_multiplier(dmus, target)?;
    let id = dmus[target].id.clone();
    let s = dmus[target].outputs.len();

    let solution = solve_lp(&lp).map_err(|e| DeaError::from((id.clone(), e)))?;
    if solution.status != LpStatus::Optimal {
        return Err(DeaError::Internal {
            id,
            reason: format!("multiplier model reported {:?}", solution.status),
        });
    }
    let weights = solution.primal.unwrap_or_default();
    let theta = solution.objective_value.unwrap_or(0.0);
    if !(theta > 0.0 && theta <= 1.0 + EFFICIENCY_TOLERANCE) {
        return Err(DeaError::Internal {
            id,
            reason: format!("efficiency {theta} outside (0, 1]"),
        });
    }
    let (mu, nu) = weights.split_at(s);
    Ok((theta.min(1.0), mu.to_vec(), nu.to_vec()))
}

/// Evaluates every unit of the set independently, preserving order.
pub fn ccr_efficiency_all(dmus: &[Dmu]) -> Result<DeaResult, DeaError> {
    validate_set(dmus)?;
    let units = (0..dmus.len())
        .map(|i| {
            let (theta, mu, nu) = ccr_efficiency(dmus, i)?;
            Ok(Efficiency {
                id: dmus[i].id.clone(),
                theta,
                output_weights: mu,
                input_weights: nu,
                is_efficient: theta >= 1.0 - EFFICIENCY_TOLERANCE,
            })
        })
        .collect::<Result<Vec<_>, DeaError>>()?;
    Ok(DeaResult { units })
}

/// Closed-form efficiencies for sets whose outputs are all multiples of one
/// profile and which contain a unit with componentwise-smallest inputs and the
/// largest effective output.
///
/// With outputs `y_i = s_i * p`, every constraint reduces to `u * s_i <= nu · x_i`
/// and the binding one belongs to that dominant unit `*`, so
/// `theta_0 = (s_0 / s_*) * max_k (x_*k / x_0k)`.
pub fn ratio_oracle(dmus: &[Dmu]) -> Result<Vec<f64>, DeaError> {
    validate_set(dmus)?;
    let not_applicable = |m: &str| DeaError::OracleNotApplicable(m.to_string());

    // Effective outputs relative to the first unit's profile.
    let profile = &dmus[0].outputs;
    let anchor = profile
        .iter()
        .position(|&v| v > 0.0)
        .expect("validated outputs have a positive entry");
    let mut scales = Vec::with_capacity(dmus.len());
    for dmu in dmus {
        let scale = dmu.outputs[anchor] / profile[anchor];
        let proportional = dmu
            .outputs
            .iter()
            .zip(profile)
            .all(|(y, p)| (y - scale * p).abs() <= 1e-12 * y.abs().max(1.0));
        if !proportional {
            return Err(not_applicable("outputs are not proportional to a common profile"));
        }
        scales.push(scale);
    }

    let best = (0..dmus.len())
        .find(|&i| {
            dmus.iter().zip(&scales).all(|(other, &s)| {
                scales[i] >= s
                    && dmus[i]
                        .inputs
                        .iter()
                        .zip(&other.inputs)
                        .all(|(a, b)| a <= b)
            })
        })
        .ok_or_else(|| not_applicable("no unit dominates all others"))?;
    let star = &dmus[best];

    Ok(dmus
        .iter()
        .zip(&scales)
        .map(|(dmu, &s)| {
            let corner = star
                .inputs
                .iter()
                .zip(&dmu.inputs)
                .map(|(a, b)| a / b)
                .fold(f64::NEG_INFINITY, f64::max);
            s / scales[best] * corner
        })
        .collect())
}
