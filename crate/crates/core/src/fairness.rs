//! Group parity measures: statistical parity, disparate impact and the
//! confusion-matrix based TPR/FPR parity and average absolute odds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance used by the `*_holds` wrappers.
pub const PARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FairnessError {
    #[error("unknown group {0}")]
    UnknownGroup(String),
    #[error("rate for group {group} must lie in [0, 1] (got {value})")]
    RateOutOfRange { group: String, value: f64 },
    #[error("at least two groups are required")]
    TooFewGroups,
    #[error("disparate impact undefined: reference group {0} has a zero rate")]
    UndefinedRatio(String),
    #[error("true positive rate undefined: tp + fn = 0")]
    UndefinedTpr,
    #[error("false positive rate undefined: fp + tn = 0")]
    UndefinedFpr,
}

/// Favorable-outcome probability per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRates(BTreeMap<String, f64>);

impl GroupRates {
    pub fn new<I, K>(rates: I) -> Result<Self, FairnessError>
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<String>,
    {
        let map: BTreeMap<String, f64> = rates.into_iter().map(|(k, v)| (k.into(), v)).collect();
        if map.len() < 2 {
            return Err(FairnessError::TooFewGroups);
        }
        for (group, &value) in &map {
            if !(0.0..=1.0).contains(&value) {
                return Err(FairnessError::RateOutOfRange {
                    group: group.clone(),
                    value,
                });
            }
        }
        Ok(Self(map))
    }

    pub fn rate(&self, group: &str) -> Result<f64, FairnessError> {
        self.0
            .get(group)
            .copied()
            .ok_or_else(|| FairnessError::UnknownGroup(group.to_string()))
    }

    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

/// `|p(a=1 | b) - p(a=1 | b')|`.
pub fn statistical_parity_gap(rates: &GroupRates, b: &str, b_ref: &str) -> Result<f64, FairnessError> {
    Ok((rates.rate(b)? - rates.rate(b_ref)?).abs())
}

pub fn statistical_parity_holds(
    rates: &GroupRates,
    b: &str,
    b_ref: &str,
    tolerance: f64,
) -> Result<bool, FairnessError> {
    Ok(statistical_parity_gap(rates, b, b_ref)? <= tolerance)
}

/// `p(a=1 | b) / p(a=1 | b')`.
pub fn disparate_impact(rates: &GroupRates, b: &str, b_ref: &str) -> Result<f64, FairnessError> {
    let numerator = rates.rate(b)?;
    let denominator = rates.rate(b_ref)?;
    if denominator == 0.0 {
        return Err(FairnessError::UndefinedRatio(b_ref.to_string()));
    }
    Ok(numerator / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn tpr(&self) -> Result<f64, FairnessError> {
        let positives = self.tp + self.fn_;
        if positives == 0 {
            return Err(FairnessError::UndefinedTpr);
        }
        Ok(self.tp as f64 / positives as f64)
    }

    pub fn fpr(&self) -> Result<f64, FairnessError> {
        let negatives = self.fp + self.tn;
        if negatives == 0 {
            return Err(FairnessError::UndefinedFpr);
        }
        Ok(self.fp as f64 / negatives as f64)
    }
}

pub fn tpr_parity_gap(m_b: &ConfusionMatrix, m_ref: &ConfusionMatrix) -> Result<f64, FairnessError> {
    Ok((m_b.tpr()? - m_ref.tpr()?).abs())
}

pub fn fpr_parity_gap(m_b: &ConfusionMatrix, m_ref: &ConfusionMatrix) -> Result<f64, FairnessError> {
    Ok((m_b.fpr()? - m_ref.fpr()?).abs())
}

/// Mean of the TPR and FPR gaps.
pub fn average_absolute_odds(
    m_b: &ConfusionMatrix,
    m_ref: &ConfusionMatrix,
) -> Result<f64, FairnessError> {
    Ok((tpr_parity_gap(m_b, m_ref)? + fpr_parity_gap(m_b, m_ref)?) / 2.0)
}

pub fn tpr_parity_holds(
    m_b: &ConfusionMatrix,
    m_ref: &ConfusionMatrix,
    tolerance: f64,
) -> Result<bool, FairnessError> {
    Ok(tpr_parity_gap(m_b, m_ref)? <= tolerance)
}

pub fn fpr_parity_holds(
    m_b: &ConfusionMatrix,
    m_ref: &ConfusionMatrix,
    tolerance: f64,
) -> Result<bool, FairnessError> {
    Ok(fpr_parity_gap(m_b, m_ref)? <= tolerance)
}
