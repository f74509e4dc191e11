use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::select::Policy;
use crate::ensemble::Confusion;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub venue: String,
    pub policy: Policy,
    /// `(iteration, f1)` with iterations counted from 1.
    pub points: Vec<(usize, f64)>,
    pub confusions: Vec<Confusion>,
    /// Unpadded sequence length per user.
    pub n_end: Vec<usize>,
    pub n_l_max: usize,
}

impl LearningCurve {
    pub fn f1(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn final_confusion(&self) -> Confusion {
        self.confusions.last().copied().unwrap_or_default()
    }
}

/// Right-pads every sequence with its last value up to the longest length.
pub fn pad_sequences(sequences: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n_l_max = sequences.iter().map(Vec::len).max().unwrap_or(0);
    sequences
        .iter()
        .map(|s| {
            let mut padded = s.clone();
            if let Some(&last) = s.last() {
                padded.resize(n_l_max, last);
            }
            padded
        })
        .collect()
}

/// Pointwise F1 of the padded prediction matrix against `labels`.
pub fn aggregate_curves(venue: &str, policy: Policy, sequences: &[Vec<bool>], labels: &[bool]) -> Result<LearningCurve> {
    if sequences.is_empty() || sequences.iter().any(Vec::is_empty) {
        return Err(Error::EmptyData);
    }
    if sequences.len() != labels.len() {
        return Err(Error::Dimension(format!("{} sequences vs {} labels", sequences.len(), labels.len())));
    }
    let padded = pad_sequences(sequences);
    let n_l_max = padded[0].len();
    let confusions: Vec<Confusion> = (0..n_l_max)
        .map(|col| Confusion::from_pairs(padded.iter().zip(labels).map(|(row, &y)| (row[col], y))))
        .collect();
    Ok(LearningCurve {
        venue: venue.to_owned(),
        policy,
        points: confusions.iter().enumerate().map(|(i, c)| (i + 1, c.f1())).collect(),
        confusions,
        n_end: sequences.iter().map(Vec::len).collect(),
        n_l_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SlopeClass {
    QuickToLearn,
    SlowToLearn,
    HardToLearn,
}

impl SlopeClass {
    pub const ALL: [SlopeClass; 3] = [SlopeClass::QuickToLearn, SlopeClass::SlowToLearn, SlopeClass::HardToLearn];

    pub fn as_str(self) -> &'static str {
        match self {
            SlopeClass::QuickToLearn => "quick",
            SlopeClass::SlowToLearn => "slow",
            SlopeClass::HardToLearn => "hard",
        }
    }
}

impl fmt::Display for SlopeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlopeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SlopeClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown slope class {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeThresholds {
    /// Minimum improvement over the first point to count as learnable.
    pub min_gain: f64,
    /// Share of the final level that marks convergence.
    pub plateau_share: f64,
    /// Quick-to-learn window cap, in iterations.
    pub quick_window: usize,
    /// Quick-to-learn window as a share of the curve length.
    pub quick_window_share: f64,
    /// Tail share averaged into the final level.
    pub tail_share: f64,
}

impl Default for SlopeThresholds {
    fn default() -> Self {
        SlopeThresholds {
            min_gain: 0.05,
            plateau_share: 0.95,
            quick_window: 750,
            quick_window_share: 0.25,
            tail_share: 0.05,
        }
    }
}

pub fn classify_slope(values: &[f64], thresholds: &SlopeThresholds) -> Result<SlopeClass> {
    let n = values.len();
    if n < 3 {
        return Err(Error::CurveTooShort(n));
    }
    let tail = ((thresholds.tail_share * n as f64).ceil() as usize).clamp(1, n);
    let f_final = values[n - tail..].iter().sum::<f64>() / tail as f64;
    let f_init = values[0];
    if f_final - f_init < thresholds.min_gain {
        return Ok(SlopeClass::HardToLearn);
    }
    let window = (thresholds.quick_window as f64).min(thresholds.quick_window_share * n as f64);
    let target = thresholds.plateau_share * f_final;
    let reached = values.iter().position(|&v| v >= target).map(|i| i + 1);
    Ok(match reached {
        Some(it) if it as f64 <= window => SlopeClass::QuickToLearn,
        _ => SlopeClass::SlowToLearn,
    })
}
