use std::path::Path;

use finsler_hardy::families::{
    curvature_check, CalibrationBranch, Calibration, CurvatureCheck, FamilyConfig, FamilyMember, FamilyParams, FlatFamily,
    HyperbolicFamily, RadialProfile,
};
use finsler_hardy::hardy::{hardy_quotient_montecarlo, hardy_quotient_radial, MonteCarloQuotient, QuotientBreakdown};
use finsler_hardy::report::{self, ReportError};
use finsler_hardy::riccati::{make_truncation, residual_grid, residual_scan, LimitFunction, PairConfig, ResidualScan};
use finsler_hardy::sharpness::{check_pair_dimension, run_oracle, run_sweep};
use serde::Serialize;

use crate::config::{load, load_oracle, load_sweep, resolve_pair, CurvatureConfig, QuotientConfig, RiccatiConfig};
use crate::{CliError, Format, Outcome};

/// Common JSON wrapper of every artifact.
#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: Option<u64>,
    passed: bool,
    result: &'a T,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn numeric_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn report_err(e: ReportError) -> CliError {
    CliError::Output(e.to_string())
}

fn envelope<T: Serialize>(command: &'static str, seed: Option<u64>, passed: bool, result: &T) -> Result<String, CliError> {
    report::to_json(&Envelope { tool: "finsler-hardy", version: env!("CARGO_PKG_VERSION"), command, seed, passed, result })
        .map_err(report_err)
}

#[derive(Serialize)]
struct CurvatureOutput {
    params: FamilyParams,
    calibration: Option<Calibration>,
    max_rel_dual: f64,
    bounds_hold: bool,
    check: CurvatureCheck,
}

fn check_member<M: FamilyMember>(member: &M, cfg: &CurvatureConfig) -> Result<CurvatureCheck, CliError> {
    let radii = cfg.radii.nodes()?;
    curvature_check(member, &radii, cfg.bound_tolerance).map_err(numeric_err)
}

pub fn curvature(path: &Path, format: Format, seed: Option<u64>) -> Result<Outcome, CliError> {
    let cfg: CurvatureConfig = load(path)?;
    let (params, calibration, check) = match cfg.family {
        FamilyConfig::Flat { n, lambda } => {
            let m = FlatFamily::new(n, lambda, cfg.eps).map_err(config_err)?;
            (m.params(), None, check_member(&m, &cfg)?)
        }
        FamilyConfig::Hyperbolic { n, lambda, kappa, h } => {
            let m = HyperbolicFamily::new(n, lambda, kappa, h, cfg.eps).map_err(config_err)?;
            let cal = *m.calibration();
            if cal.branch == CalibrationBranch::Kappa {
                log::info!("eps = {} exceeds eps0 = {}: k_eps = kappa", cfg.eps, cal.eps0);
            }
            (m.params(), Some(cal), check_member(&m, &cfg)?)
        }
    };
    let passed = check.bounds_hold && check.max_rel_dual < cfg.oracle_tolerance;
    let out = CurvatureOutput { params, calibration, max_rel_dual: check.max_rel_dual, bounds_hold: check.bounds_hold, check };
    let body = match format {
        Format::Json => envelope("curvature", seed, passed, &out)?,
        Format::Csv => report::curvature_csv(&out.check).map_err(report_err)?,
    };
    Ok(Outcome { body, passed })
}

#[derive(Serialize)]
struct RiccatiOutput {
    pair: PairConfig,
    scan: ResidualScan,
    grid: Vec<(f64, f64)>,
}

pub fn riccati(path: &Path, format: Format, seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut cfg: RiccatiConfig = load(path)?;
    resolve_pair(&mut cfg.pair, path);
    let pair = cfg.pair.build().map_err(config_err)?;
    let nodes = cfg.grid.nodes()?;
    let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
    let grid = residual_grid(&pair, lo, hi, cfg.grid.count).map_err(numeric_err)?;
    let scan = residual_scan(&pair, lo, hi, cfg.grid.count).map_err(numeric_err)?;
    log::info!("max |residual| = {:e}, min residual = {:e} at t = {}", scan.max_abs, scan.min, scan.argmin);
    let passed = scan.valid(cfg.tolerance);
    let body = match format {
        Format::Json => envelope("riccati", seed, passed, &RiccatiOutput { pair: cfg.pair, scan, grid })?,
        Format::Csv => report::residual_csv(&grid).map_err(report_err)?,
    };
    Ok(Outcome { body, passed })
}

#[derive(Serialize)]
struct QuotientOutput {
    breakdown: QuotientBreakdown,
    monte_carlo: Option<MonteCarloQuotient>,
    /// `|Q_radial − Q_mc| / stderr`.
    monte_carlo_sigmas: Option<f64>,
}

fn quotient_member<M: FamilyMember>(member: &M, cfg: &QuotientConfig, seed: u64) -> Result<QuotientOutput, CliError> {
    let pair = cfg.pair.build().map_err(config_err)?;
    let lf = LimitFunction::new(pair, cfg.anchor, cfg.quadrature).map_err(config_err)?;
    let tent = make_truncation(&lf, cfg.knots).map_err(config_err)?;
    let breakdown = hardy_quotient_radial(member, &tent, &cfg.quadrature).map_err(numeric_err)?;
    let monte_carlo = cfg
        .monte_carlo
        .map(|mc| hardy_quotient_montecarlo(member, &tent, mc.samples, seed))
        .transpose()
        .map_err(numeric_err)?;
    let monte_carlo_sigmas = monte_carlo.map(|mc| (breakdown.quotient - mc.quotient).abs() / mc.std_error);
    Ok(QuotientOutput { breakdown, monte_carlo, monte_carlo_sigmas })
}

pub fn quotient(path: &Path, format: Format, seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut cfg: QuotientConfig = load(path)?;
    resolve_pair(&mut cfg.pair, path);
    cfg.quadrature.validate().map_err(config_err)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let out = match cfg.family {
        FamilyConfig::Flat { n, lambda } => quotient_member(&FlatFamily::new(n, lambda, cfg.eps).map_err(config_err)?, &cfg, seed)?,
        FamilyConfig::Hyperbolic { n, lambda, kappa, h } => {
            quotient_member(&HyperbolicFamily::new(n, lambda, kappa, h, cfg.eps).map_err(config_err)?, &cfg, seed)?
        }
    };
    let passed = match (out.monte_carlo_sigmas, cfg.monte_carlo) {
        (Some(s), Some(mc)) => s <= mc.sigmas,
        _ => true,
    };
    let body = match format {
        Format::Json => envelope("quotient", Some(seed), passed, &out)?,
        Format::Csv => report::quotient_csv(&out.breakdown).map_err(report_err)?,
    };
    Ok(Outcome { body, passed })
}

pub fn sweep(path: &Path, format: Format, seed: Option<u64>) -> Result<Outcome, CliError> {
    let cfg = load_sweep(path)?;
    cfg.validate().map_err(config_err)?;
    check_pair_dimension(&cfg).map_err(config_err)?;
    cfg.pair.build().map_err(config_err)?;
    let report = run_sweep(&cfg).map_err(numeric_err)?;
    for s in &report.skipped {
        log::warn!("delta = {}: {}", s.delta, s.reason);
    }
    let v = report.summary.verdicts;
    let passed = v.lower_bound && v.decreasing && v.bound_chain && !report.rows.is_empty();
    let body = match format {
        Format::Json => envelope("sweep", seed, passed, &report)?,
        Format::Csv => report::sweep_csv(&report).map_err(report_err)?,
    };
    Ok(Outcome { body, passed })
}

pub fn oracle(path: &Path, format: Format, seed: Option<u64>) -> Result<Outcome, CliError> {
    let cfg = load_oracle(path)?;
    for case in &cfg.cases {
        case.sweep.validate().map_err(config_err)?;
        check_pair_dimension(&case.sweep).map_err(config_err)?;
    }
    let baseline = run_oracle(&cfg).map_err(numeric_err)?;
    // The baseline itself is the artifact; a red sweep is still recorded.
    let body = match format {
        Format::Json => report::to_json(&baseline).map_err(report_err)?,
        Format::Csv => report::oracle_csv(&baseline).map_err(report_err)?,
    };
    let _ = seed;
    Ok(Outcome { body, passed: true })
}
