//! Serializable experiment reports. Field order is fixed by the struct
//! declarations and every float serializes as its shortest round-trip
//! decimal, so identical runs produce byte-identical JSON.

use serde::{Deserialize, Serialize};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModulusInfo {
    pub p: u64,
    pub n: u32,
}

/// One evaluated moment: the pair (s, t), its gap, and M_alpha(s, t).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MomentEntry {
    pub s: f64,
    pub t: f64,
    pub gap: f64,
    pub m_alpha: f64,
}

/// Per-gap aggregation over the sampled placements.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapSummary {
    pub gap: f64,
    /// Mean moment over the gap's placements; absent when every placement
    /// degenerated to zero.
    pub mean_m_alpha: Option<f64>,
    pub samples: u32,
    pub zero_samples: u32,
}

/// A point that violated the exact small-gap bound 2^alpha (t-s)^(alpha/2).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BoundViolation {
    pub s: f64,
    pub t: f64,
    pub gap: f64,
    pub m_alpha: f64,
    pub bound: f64,
}

/// Result of a moment scan over a gap grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub modulus: ModulusInfo,
    pub b0: u64,
    pub alpha: u32,
    pub gaps: Vec<GapSummary>,
    pub moments: Vec<MomentEntry>,
    /// Least-squares slope of log mean-moment against log gap; absent when
    /// fewer than two gaps carry a nonzero mean.
    pub fitted_slope: Option<f64>,
    /// Exponent forecast from the admissible window, when n >= 31 admits one.
    pub predicted_beta: Option<f64>,
    pub violations: Vec<BoundViolation>,
    pub seed: u64,
    pub version: String,
}

/// Kolmogorov-Smirnov distances at one time point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KsPoint {
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

/// Quantile summaries of one marginal at one time point, for both
/// populations; enough to redraw the empirical CDFs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CdfSummary {
    pub t: f64,
    /// "re" or "im".
    pub part: String,
    pub path_quantiles: Vec<f64>,
    pub limit_quantiles: Vec<f64>,
}

/// Result of a law comparison between path marginals and Monte Carlo samples
/// of the limiting series.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LawComparisonReport {
    pub modulus: ModulusInfo,
    pub b0: u64,
    pub t_points: Vec<f64>,
    pub truncation: u64,
    pub mc_samples: u64,
    pub ks: Vec<KsPoint>,
    pub cdf_summaries: Vec<CdfSummary>,
    /// Fraction of units whose full sum vanishes (checked at t = 1).
    pub zero_mass_fraction: f64,
    pub seed: u64,
    pub version: String,
}

/// Largest |step approximation| over a unit sweep and a time grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupReport {
    pub modulus: ModulusInfo,
    pub b0: u64,
    pub grid_points: u64,
    pub max_abs: f64,
    /// max_abs / log q.
    pub ratio_to_log_q: f64,
    pub argmax_a: u64,
    pub argmax_t: f64,
}

/// The unified report file: one experiment's fields populated, the rest
/// omitted.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub modulus: ModulusInfo,
    pub b0: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<GapSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<MomentEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<BoundViolation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<KsPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdf_summaries: Option<Vec<CdfSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_mass_fraction: Option<f64>,
    pub seed: u64,
    pub version: String,
}

impl Report {
    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serialization");
        bytes.push(b'\n');
        bytes
    }
}

impl From<MomentReport> for Report {
    fn from(r: MomentReport) -> Self {
        Report {
            modulus: r.modulus,
            b0: r.b0,
            alpha: Some(r.alpha),
            gaps: Some(r.gaps),
            moments: Some(r.moments),
            fitted_slope: r.fitted_slope,
            predicted_beta: r.predicted_beta,
            violations: Some(r.violations),
            ks: None,
            cdf_summaries: None,
            zero_mass_fraction: None,
            seed: r.seed,
            version: r.version,
        }
    }
}

impl From<LawComparisonReport> for Report {
    fn from(r: LawComparisonReport) -> Self {
        Report {
            modulus: r.modulus,
            b0: r.b0,
            alpha: None,
            gaps: None,
            moments: None,
            fitted_slope: None,
            predicted_beta: None,
            violations: None,
            ks: Some(r.ks),
            cdf_summaries: Some(r.cdf_summaries),
            zero_mass_fraction: Some(r.zero_mass_fraction),
            seed: r.seed,
            version: r.version,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serialization_is_stable() {
        let report: Report = MomentReport {
            modulus: ModulusInfo { p: 5, n: 2 },
            b0: 1,
            alpha: 4,
            gaps: vec![GapSummary { gap: 0.1, mean_m_alpha: Some(0.25), samples: 3, zero_samples: 0 }],
            moments: vec![MomentEntry { s: 0.1, t: 0.2, gap: 0.1, m_alpha: 0.25 }],
            fitted_slope: None,
            predicted_beta: None,
            violations: vec![],
            seed: 7,
            version: VERSION.to_string(),
        }
        .into();
        let a = report.to_json();
        let b = report.to_json();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(!text.contains("fitted_slope"), "absent fields must be omitted");
        let parsed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.modulus, ModulusInfo { p: 5, n: 2 });
    }
}
