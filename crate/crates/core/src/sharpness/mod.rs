//! Sweeps over `δ` that build a family member, a limit function and a tent
//! for each `δ`, measure the quotient and the diagnostics `l₀, l₁, l₂`, and
//! summarize the approach of `Q(δ)` to 1.

mod diagnostics;
mod oracle;

pub use diagnostics::{compute_l0, compute_l1, compute_l2};
pub use oracle::{compare_entries, run_oracle, OracleBaseline, OracleCase, OracleConfig, OracleEntry, OracleRow, BASELINE_VERSION};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HardyError;
use crate::families::{FamilyConfig, FamilyKind, RadialProfile};
use crate::hardy::{hardy_quotient_radial, QuotientBreakdown};
use crate::quadrature::QuadratureSpec;
use crate::riccati::{make_truncation, LimitFunction, PairConfig};

/// Knot schedule `δ ↦ (t₁, t₂, t₃, t₄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum KnotRule {
    /// `(δ/2, δ, δ², 2δ²)`.
    Hardy,
    /// `(δ, 2δ, 3δ, 4δ)`.
    Mckean,
    /// `(δ, 2δ, 3δ, 3δ + width)`: a right ramp of fixed width.
    FixedRamp { width: f64 },
    /// `(δ^{−a}/2, δ^{−a}, δ^{a}, 2δ^{a})`.
    Power { exponent: f64 },
}

impl KnotRule {
    pub fn knots(&self, d: f64) -> [f64; 4] {
        match *self {
            KnotRule::Hardy => [d / 2.0, d, d * d, 2.0 * d * d],
            KnotRule::Mckean => [d, 2.0 * d, 3.0 * d, 4.0 * d],
            KnotRule::FixedRamp { width } => [d, 2.0 * d, 3.0 * d, 3.0 * d + width],
            KnotRule::Power { exponent } => {
                let lo = d.powf(-exponent);
                let hi = d.powf(exponent);
                [lo / 2.0, lo, hi, 2.0 * hi]
            }
        }
    }

    /// Whether `t₂(δ) → 0` as `δ → ∞`.
    pub fn t2_vanishes(&self) -> bool {
        matches!(*self, KnotRule::Power { exponent } if exponent > 0.0)
    }
}

/// `ε(δ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsRule {
    /// `1/δ` when `t₂ ↛ 0`, else `t₂(δ)²`.
    #[default]
    Auto,
    InverseDelta,
    KnotSquare,
    Fixed { value: f64 },
}

impl EpsRule {
    pub fn eps(&self, d: f64, knots: &KnotRule) -> f64 {
        match *self {
            EpsRule::Auto if knots.t2_vanishes() => knots.knots(d)[1].powi(2),
            EpsRule::Auto | EpsRule::InverseDelta => 1.0 / d,
            EpsRule::KnotSquare => knots.knots(d)[1].powi(2),
            EpsRule::Fixed { value } => value,
        }
    }
}

/// Increasing list of `δ` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeltaSchedule {
    List(Vec<f64>),
    /// `start · ratio^k` for `k = 0..count`.
    Geometric { start: f64, ratio: f64, count: usize },
}

impl DeltaSchedule {
    pub fn values(&self) -> Vec<f64> {
        match self {
            DeltaSchedule::List(v) => v.clone(),
            DeltaSchedule::Geometric { start, ratio, count } => (0..*count).map(|k| start * ratio.powi(k as i32)).collect(),
        }
    }
}

fn default_anchor() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: FamilyConfig,
    pub pair: PairConfig,
    pub deltas: DeltaSchedule,
    pub knots: KnotRule,
    #[serde(default)]
    pub eps: EpsRule,
    /// `t_ref` with `v(t_ref) = 1`.
    #[serde(default = "default_anchor")]
    pub anchor: f64,
    /// Slack for the lower-bound and bound-chain verdicts.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HardyError> {
        let d = self.deltas.values();
        if d.is_empty() || d.windows(2).any(|w| !(w[1] > w[0])) || d.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(HardyError::Pair("delta schedule must be positive and strictly increasing".into()));
        }
        self.quadrature.validate().map_err(HardyError::Pair)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub eps: f64,
    /// Calibrated `k_ε` for the hyperbolic family.
    pub k_eps: Option<f64>,
    pub quotient: f64,
    pub gap: f64,
    pub breakdown: QuotientBreakdown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedRow {
    pub delta: f64,
    pub reason: String,
}

/// Least-squares fit `ln(Q−1) = ln A − β·g(δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub constant: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdicts {
    /// `Q ≥ 1 − tol` in every row.
    pub lower_bound: bool,
    /// `Q` strictly decreasing along the schedule.
    pub decreasing: bool,
    /// `Q ≤ upper bound + tol` wherever the bound is available.
    pub bound_chain: bool,
    /// `I_middle ≤ l₁ l₂ᵖ ∫ wWvᵖ` in every row.
    pub middle_chain: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub verdicts: Verdicts,
    pub min_quotient: f64,
    pub terminal_gap: f64,
    /// `Q − 1 ≈ A (ln δ)^{−β}`.
    pub log_power_fit: Option<DecayFit>,
    /// `Q − 1 ≈ A e^{−βδ}`.
    pub exponential_fit: Option<DecayFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedRow>,
    pub summary: SweepSummary,
}

/// One row of a sweep.
pub fn evaluate_row(config: &SweepConfig, delta: f64) -> Result<SweepRow, HardyError> {
    let eps = config.eps.eps(delta, &config.knots);
    let member = config.family.build(eps)?;
    let pair = config.pair.build()?;
    let kind = member.params().kind;
    if let FamilyKind::Hyperbolic { .. } = kind {
        // Rows with ε ≥ ε̃ fall outside the range of the ψ bounds.
        member.psi_bounds()?;
    }
    let knots = config.knots.knots(delta);
    let lf = LimitFunction::new(pair, config.anchor, config.quadrature)?;
    let tent = make_truncation(&lf, knots)?;
    let breakdown = hardy_quotient_radial(&member, &tent, &config.quadrature)?;
    let k_eps = match kind {
        FamilyKind::Hyperbolic { k_eps, .. } => Some(k_eps),
        FamilyKind::Flat => None,
    };
    Ok(SweepRow { delta, eps, k_eps, quotient: breakdown.quotient, gap: breakdown.quotient - 1.0, breakdown })
}

fn fit(points: &[(f64, f64)]) -> Option<DecayFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(DecayFit { constant: (my - slope * mx).exp(), exponent: -slope })
}

pub fn summarize(rows: &[SweepRow], tol: f64) -> SweepSummary {
    let verdicts = Verdicts {
        lower_bound: rows.iter().all(|r| r.quotient >= 1.0 - tol),
        decreasing: rows.windows(2).all(|w| w[1].quotient < w[0].quotient),
        bound_chain: rows.iter().all(|r| r.breakdown.upper_bound.map_or(true, |u| r.quotient <= u + tol)),
        middle_chain: rows.iter().all(|r| r.breakdown.middle_bound_holds(tol)),
    };
    let positive: Vec<&SweepRow> = rows.iter().filter(|r| r.gap > 0.0).collect();
    let log_power = fit(&positive.iter().map(|r| (r.delta.ln().ln(), r.gap.ln())).collect::<Vec<_>>());
    let exponential = fit(&positive.iter().map(|r| (r.delta, r.gap.ln())).collect::<Vec<_>>());
    SweepSummary {
        verdicts,
        min_quotient: rows.iter().map(|r| r.quotient).fold(f64::INFINITY, f64::min),
        terminal_gap: rows.last().map_or(f64::NAN, |r| r.gap),
        log_power_fit: log_power,
        exponential_fit: exponential,
    }
}

/// Evaluates every `δ` in parallel; failing rows are reported as skipped.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, HardyError> {
    config.validate()?;
    check_pair_dimension(config)?;
    config.pair.build()?;
    let deltas = config.deltas.values();
    let results: Vec<(f64, Result<SweepRow, HardyError>)> =
        deltas.par_iter().map(|&d| (d, evaluate_row(config, d))).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (delta, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                log::warn!("delta = {delta}: row skipped: {e}");
                skipped.push(SkippedRow { delta, reason: e.to_string() });
            }
        }
    }
    rows.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let summary = summarize(&rows, config.tolerance);
    Ok(SweepReport { config: config.clone(), rows, skipped, summary })
}

/// Verifies that the pair's order is consistent with the family.
pub fn check_pair_dimension(config: &SweepConfig) -> Result<(), HardyError> {
    let n = config.family.n();
    let pn = match &config.pair {
        PairConfig::Hardy { n, .. } | PairConfig::Mckean { n, .. } => Some(*n),
        PairConfig::Tabulated { .. } => None,
    };
    match pn {
        Some(m) if m != n => Err(HardyError::Pair(format!("pair dimension {m} differs from family dimension {n}"))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knot_rules_are_ordered() {
        for rule in [KnotRule::Hardy, KnotRule::Mckean, KnotRule::FixedRamp { width: 1.0 }, KnotRule::Power { exponent: 3.0 }] {
            for d in [2.0, 10.0, 1e3] {
                let k = rule.knots(d);
                assert!(k.windows(2).all(|w| w[0] < w[1]), "{rule:?} at {d}");
            }
        }
    }

    #[test]
    fn eps_rule_branches() {
        assert_eq!(EpsRule::Auto.eps(10.0, &KnotRule::Hardy), 0.1);
        let p = KnotRule::Power { exponent: 1.0 };
        assert!((EpsRule::Auto.eps(10.0, &p) - 0.01).abs() < 1e-16);
        assert!(EpsRule::Auto.eps(1e3, &p) < EpsRule::Auto.eps(10.0, &p));
    }

    #[test]
    fn fit_recovers_power() {
        let pts: Vec<(f64, f64)> = [2.0f64, 3.0, 5.0].iter().map(|&x| (x, (3.0f64).ln() - 1.5 * x)).collect();
        let f = fit(&pts).unwrap();
        assert!((f.constant - 3.0).abs() < 1e-12 && (f.exponent - 1.5).abs() < 1e-12);
    }
}
