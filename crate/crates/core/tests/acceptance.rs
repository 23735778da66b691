//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! Sweep values are compared with `tests/fixtures/oracle_baseline.json`,
//! written by `finsler-hardy oracle --config configs/oracle.toml`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use finsler_hardy::families::{
    curvature_check, make_flat_family, make_hyperbolic_family, FamilyMember, RadialProfile,
};
use finsler_hardy::hardy::{hardy_quotient_montecarlo, hardy_quotient_radial, ReferenceMeasure};
use finsler_hardy::finsler::RandersMetric;
use finsler_hardy::quadrature::QuadratureSpec;
use finsler_hardy::riccati::{
    make_truncation, preset_hardy, preset_mckean, residual_grid, LimitFunction, RiccatiPair,
};
use finsler_hardy::sharpness::{compare_entries, run_oracle, OracleBaseline, OracleCase, OracleConfig, OracleEntry, SweepReport};
use finsler_hardy::sharpness::{run_sweep, SweepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("runtime {t:?} exceeds {limit:?}"))
    }
}

fn baseline() -> OracleBaseline {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/oracle_baseline.json"))
        .expect("oracle baseline fixture");
    serde_json::from_str(&text).expect("baseline schema")
}

/// Sweeps pre-registered in `configs/oracle.toml`; the baseline must have
/// been produced from the same configs.
fn pinned(name: &str) -> Result<SweepConfig, String> {
    let text = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/oracle.toml"));
    let cases: OracleConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    cases.cases.into_iter().find(|c| c.name == name).map(|c| c.sweep).ok_or_else(|| format!("no pinned case {name}"))
}

/// Runs a pinned sweep and compares it with the stored baseline entry.
fn sweep_against_baseline(name: &str) -> Result<(SweepReport, Vec<String>), String> {
    let config = pinned(name)?;
    let stored = baseline();
    let entry = stored.entry(name).ok_or_else(|| format!("baseline has no entry {name}"))?;
    if entry.config != config {
        return Err(format!("baseline entry {name} was produced by a different config"));
    }
    let report = run_sweep(&config).map_err(|e| e.to_string())?;
    let fresh = run_oracle(&OracleConfig { cases: vec![OracleCase { name: name.into(), sweep: config }] })
        .map_err(|e| e.to_string())?;
    let fresh: &OracleEntry = &fresh.entries[0];
    Ok((report, compare_entries(entry, fresh, 1e-6)))
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 && len <= 1.0 {
            return v.iter().map(|x| x * r / len).collect();
        }
    }
}

fn eikonal_error<M: FamilyMember>(
    metric: &RandersMetric<M>,
    member: &M,
    rng: &mut ChaCha8Rng,
    radius: impl Fn(&mut ChaCha8Rng) -> f64,
) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = radius(rng);
        let x = random_point(rng, member.params().n, member.coordinate_radius(s));
        let f = metric.eval_f_dual(&x, &member.distance_gradient(&x)).map_err(|e| e.to_string())?;
        worst = worst.max((f - 1.0).abs());
    }
    Ok(worst)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for eps in [0.1, 1.0] {
        let (metric, _, fam) = make_flat_family(3, 2.0, eps).map_err(|e| e.to_string())?;
        worst = worst.max(eikonal_error(&metric, &fam, &mut rng, |g| 10f64.powf(g.gen_range(-3.0..2.0)))?);
    }
    let (metric, _, hyp) = make_hyperbolic_family(2, 2.0, 1.0, 0.0, 0.1).map_err(|e| e.to_string())?;
    worst = worst.max(eikonal_error(&metric, &hyp, &mut rng, |g| 10f64.powf(g.gen_range(-3.0..0.7)))?);
    let t = within(Duration::from_secs(10), start)?;
    check(worst < 1e-9, format!("max |F*(Dρ) − 1| = {worst:.2e} over 300 points in {t:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let log_grid = |lo: f64, hi: f64| (0..50).map(|i| lo * (hi / lo).powf(i as f64 / 49.0)).collect::<Vec<_>>();
    let (_, _, flat) = make_flat_family(3, 2.0, 0.1).map_err(|e| e.to_string())?;
    let a = curvature_check(&flat, &log_grid(1e-3, 10.0), 1e-9).map_err(|e| e.to_string())?;
    let (_, _, hyp) = make_hyperbolic_family(2, 2.0, 1.0, 0.0, 0.1).map_err(|e| e.to_string())?;
    let b = curvature_check(&hyp, &log_grid(1e-3, 1.2), 1e-9).map_err(|e| e.to_string())?;
    let dual = a.max_rel_dual.max(b.max_rel_dual);
    let fd = a.max_rel_fd.max(b.max_rel_fd);
    let t = within(Duration::from_secs(60), start)?;
    check(dual < 1e-6 && fd < 1e-4, format!("max relative error dual {dual:.2e}, finite differences {fd:.2e} ({t:.2?})"))
}

fn criterion_3() -> Outcome {
    let r_grid = |lo: f64, hi: f64| (0..100).map(move |i| lo * (hi / lo).powf(i as f64 / 99.0));
    let eps_grid = (0..10).map(|j| 1e-3 * 1e4f64.powf(j as f64 / 9.0)).collect::<Vec<_>>();
    let lambda = 2.0;
    let mut violations = Vec::new();
    for &eps in &eps_grid {
        let (_, _, fam) = make_flat_family(3, lambda, eps).map_err(|e| e.to_string())?;
        for r in r_grid(1e-3, 1e3) {
            let c = fam.ray_curvature(r);
            if !(c.flag <= 0.0 && c.reduced_s <= 0.0 && c.rev <= lambda) {
                violations.push(format!("flat eps={eps} r={r}: {c:?}"));
            }
        }
        let (kappa, h) = (1.0, 0.0);
        let (_, _, hyp) = make_hyperbolic_family(2, lambda, kappa, h, eps).map_err(|e| e.to_string())?;
        for rb in r_grid(1e-3, 50.0) {
            let c = hyp.ray_curvature(rb);
            if !(c.flag <= -kappa * kappa + 1e-9 && c.reduced_s <= h + 1e-9 && c.rev <= lambda) {
                violations.push(format!("hyperbolic eps={eps} rb={rb}: {c:?}"));
            }
        }
    }
    let (metric, _, fam) = make_flat_family(3, lambda, 0.1).map_err(|e| e.to_string())?;
    let mut min_reverse = f64::INFINITY;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let radius = 10f64.powf(rng.gen_range(-2.0..1.0));
        let x = random_point(&mut rng, 3, radius);
        let back: Vec<f64> = x.iter().map(|v| -v).collect();
        let k = metric.flag_curvature_projective(&x, &back).map_err(|e| e.to_string())?;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (k / fam.reverse_flag_curvature(r) - 1.0).abs() > 1e-6 {
            violations.push(format!("K(x,−x) engine {k} vs closed form {}", fam.reverse_flag_curvature(r)));
        }
        min_reverse = min_reverse.min(k);
    }
    check(
        violations.is_empty() && min_reverse > 0.0,
        format!("2000 grid points, {} violations, min K(x,−x) = {min_reverse:.3e}{}", violations.len(), violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()),
    )
}

fn criterion_4() -> Outcome {
    let hardy = preset_hardy(3, 2.0, 0.0).map_err(|e| e.to_string())?;
    let worst_hardy = residual_grid(&hardy, 0.1, 1e3, 10_000).map_err(|e| e.to_string())?.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    // With L = (n−1)(κ−h) and constant G the residual is
    // G·(n−1)(κ−h) − (p−1)G^{p′} − c = 0 identically.
    let mckean = preset_mckean(2, 2.0, 1.0, 0.0).map_err(|e| e.to_string())?;
    let symbolic = 0.0;
    let worst_mckean = residual_grid(&mckean, 0.1, 1e3, 10_000).map_err(|e| e.to_string())?.iter().map(|p| (p.1 - symbolic).abs()).fold(0.0, f64::max);
    check(
        worst_hardy < 1e-12 && worst_mckean < 1e-12,
        format!("max |residual| Hardy {worst_hardy:.2e}, McKean {worst_mckean:.2e} vs symbolic {symbolic}"),
    )
}

fn criterion_5() -> Outcome {
    let spec = QuadratureSpec::default();
    let grid: Vec<f64> = (0..81).map(|i| 1e-2 * 10f64.powf(i as f64 / 10.0)).collect();
    let mut worst = 0.0f64;
    for (n, p, alpha) in [(3, 2.0, 0.0), (4, 1.5, 0.5)] {
        let lf = LimitFunction::new(preset_hardy(n, p, alpha).map_err(|e| e.to_string())?, 1.0, spec).map_err(|e| e.to_string())?;
        let exponent = n as f64 + alpha - p;
        for &t in &grid {
            let ln_vp = p * lf.ln_v(t).map_err(|e| e.to_string())?;
            worst = worst.max((ln_vp + exponent * t.ln()).exp_m1().abs());
        }
    }
    for (n, p, kappa, h) in [(2, 2.0, 1.0, 0.0), (3, 3.0, 0.7, 0.2)] {
        let lf = LimitFunction::new(preset_mckean(n, p, kappa, h).map_err(|e| e.to_string())?, 1.0, spec).map_err(|e| e.to_string())?;
        let rate = (n - 1) as f64 * (kappa - h);
        for &t in grid.iter().filter(|&&t| t <= 1e3) {
            let ln_vp = p * lf.ln_v(t).map_err(|e| e.to_string())?;
            worst = worst.max((ln_vp + rate * (t - 1.0)).exp_m1().abs());
        }
    }
    check(worst < 1e-8, format!("max relative deviation of vᵖ from the closed forms {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let spec = QuadratureSpec::default();
    let pair = preset_hardy(3, 2.0, 0.0).map_err(|e| e.to_string())?;
    let c = pair.hardy_weight(1.0);
    let lf = LimitFunction::new(pair, 1.0, spec).map_err(|e| e.to_string())?;
    let mu = ReferenceMeasure::flat(3);
    let mut worst = 0.0f64;
    for delta in [10.0f64, 100.0] {
        let i = mu
            .integral(|t| pair.weight(t).ln() + pair.hardy_weight(t).ln() + 2.0 * lf.ln_v(t).unwrap_or(f64::NAN), delta, delta * delta, &spec)
            .map_err(|e| e.to_string())?
            .value();
        worst = worst.max((i / (c * delta.ln()) - 1.0).abs());
    }
    check(worst < 1e-10, format!("max relative deviation from c·log δ {worst:.2e}"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let (report, mismatches) = sweep_against_baseline("hardy")?;
    let q: Vec<f64> = report.rows.iter().map(|r| r.quotient).collect();
    let lower = q.iter().all(|&x| x >= 1.0 - 1e-8);
    let decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let rate: Vec<f64> = report.rows.iter().rev().take(3).map(|r| r.gap * r.delta.ln()).collect();
    let (lo, hi) = rate.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let spread = hi / lo - 1.0;
    let t = within(Duration::from_secs(300), start)?;
    check(
        report.skipped.is_empty() && lower && decreasing && spread < 0.25 && mismatches.is_empty(),
        format!(
            "Q = {:?}; Q ≥ 1: {lower}; decreasing: {decreasing}; (Q−1)·log δ spread {:.1}%; baseline mismatches {} ({t:.2?})",
            q.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>(),
            100.0 * spread,
            mismatches.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let (report, mismatches) = sweep_against_baseline("mckean")?;
    let q: Vec<f64> = report.rows.iter().map(|r| r.quotient).collect();
    let l0: Vec<f64> = report.rows.iter().map(|r| r.breakdown.l0).collect();
    let l2: Vec<f64> = report.rows.iter().map(|r| r.breakdown.l2).collect();
    let lower = q.iter().all(|&x| x >= 1.0 - 1e-8);
    let decreasing = q.windows(2).all(|w| w[1] < w[0]);
    let l2_monotone = l2.windows(2).all(|w| (w[1] - 0.5).abs() < (w[0] - 0.5).abs()) && (l2[l2.len() - 1] - 0.5).abs() < 1e-6;
    let l0_drop = l0.windows(2).all(|w| w[1] * 4.0 <= w[0]);
    let t = within(Duration::from_secs(300), start)?;
    check(
        report.skipped.is_empty() && lower && decreasing && l2_monotone && l0_drop && mismatches.is_empty(),
        format!(
            "Q = {:?}; Q ≥ 1: {lower}; decreasing: {decreasing}; l₂ → 1/λ monotonically: {l2_monotone}; l₀ = {:?} drops ×4 per doubling: {l0_drop}; baseline mismatches {} ({t:.2?})",
            q.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>(),
            l0.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(),
            mismatches.len()
        ),
    )
}

/// `λᵖ l₂ᵖ l₁ + λᵖ (C/c) l₀` rebuilt from the row's diagnostics and the member's ψ bounds.
fn bound_chain_violations(name: &str) -> Result<(usize, f64), String> {
    let config = pinned(name)?;
    let report = run_sweep(&config).map_err(|e| e.to_string())?;
    let mut violations = 0;
    let mut worst_margin = f64::INFINITY;
    for row in &report.rows {
        let member = config.family.build(row.eps).map_err(|e| e.to_string())?;
        let bounds = member.psi_bounds().map_err(|e| e.to_string())?;
        let b = &row.breakdown;
        let lp = b.lambda.powf(b.p);
        let bound = lp * b.l2.powf(b.p) * b.l1 + lp * bounds.upper / bounds.lower * b.l0;
        if !(row.quotient <= bound + 1e-8) {
            violations += 1;
        }
        worst_margin = worst_margin.min(bound - row.quotient);
    }
    Ok((violations, worst_margin))
}

fn criterion_9() -> Outcome {
    let mut total = 0;
    let mut margin = f64::INFINITY;
    for name in ["hardy", "mckean", "mckean_fixed_ramp", "hardy_inflated"] {
        let (v, m) = bound_chain_violations(name)?;
        total += v;
        margin = margin.min(m);
    }
    check(total == 0, format!("{total} rows above the bound; smallest margin bound − Q = {margin:.3e}"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let samples = 100_000;
    let (_, _, flat) = make_flat_family(3, 2.0, 0.1).map_err(|e| e.to_string())?;
    let lf = LimitFunction::new(preset_hardy(3, 2.0, 0.0).map_err(|e| e.to_string())?, 1.0, spec).map_err(|e| e.to_string())?;
    let tent = make_truncation(&lf, [5.0, 10.0, 100.0, 200.0]).map_err(|e| e.to_string())?;
    let radial_flat = hardy_quotient_radial(&flat, &tent, &spec).map_err(|e| e.to_string())?.quotient;
    let mc_flat = hardy_quotient_montecarlo(&flat, &tent, samples, 10).map_err(|e| e.to_string())?;
    let z_flat = (radial_flat - mc_flat.quotient).abs() / mc_flat.std_error;

    let (_, _, hyp) = make_hyperbolic_family(2, 2.0, 0.2, 0.0, 0.1).map_err(|e| e.to_string())?;
    let lf = LimitFunction::new(preset_mckean(2, 2.0, 0.2, 0.0).map_err(|e| e.to_string())?, 1.0, spec).map_err(|e| e.to_string())?;
    let tent = make_truncation(&lf, [10.0, 20.0, 30.0, 40.0]).map_err(|e| e.to_string())?;
    let radial_hyp = hardy_quotient_radial(&hyp, &tent, &spec).map_err(|e| e.to_string())?.quotient;
    let mc_hyp = hardy_quotient_montecarlo(&hyp, &tent, samples, 10).map_err(|e| e.to_string())?;
    let z_hyp = (radial_hyp - mc_hyp.quotient).abs() / mc_hyp.std_error;
    let t = within(Duration::from_secs(120), start)?;
    check(
        z_flat < 3.0 && z_hyp < 3.0 && mc_flat.samples >= samples && mc_hyp.samples >= samples,
        format!(
            "flat {radial_flat:.5} vs {:.5} ± {:.5} ({z_flat:.2}σ); hyperbolic κ = 0.2: {radial_hyp:.5} vs {:.5} ± {:.5} ({z_hyp:.2}σ) ({t:.2?})",
            mc_flat.quotient, mc_flat.std_error, mc_hyp.quotient, mc_hyp.std_error
        ),
    )
}

fn criterion_11() -> Outcome {
    let (report, mismatches) = sweep_against_baseline("hardy_inflated")?;
    let scale = match &report.config.pair {
        finsler_hardy::riccati::PairConfig::Hardy { weight_scale, .. } => *weight_scale,
        _ => return Err("inflated sweep must use the Hardy preset".into()),
    };
    let below = report.rows.iter().find(|r| r.quotient < 1.0 && r.delta <= 1e6);
    let min_q = report.summary.min_quotient;
    check(
        below.is_some() && mismatches.is_empty() && !report.summary.verdicts.lower_bound,
        format!(
            "W × {scale}: min quotient {min_q:.5} (unscaled Q = {:.5}); first δ with Q < 1: {}",
            min_q * scale,
            below.map(|r| format!("{:e}", r.delta)).unwrap_or_else(|| "none".into())
        ),
    )
}

fn supplementary_fixed_ramp() -> Outcome {
    let (report, mismatches) = sweep_against_baseline("mckean_fixed_ramp")?;
    let q: Vec<f64> = report.rows.iter().map(|r| r.quotient).collect();
    let ok = q.iter().all(|&x| x >= 1.0 - 1e-8) && q.windows(2).all(|w| w[1] < w[0]) && mismatches.is_empty();
    check(ok, format!("McKean with right ramp of width 1: Q = {:?}", q.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("criterion 1 (eikonal identity)", criterion_1),
        ("criterion 2 (curvature oracle)", criterion_2),
        ("criterion 3 (bound triple)", criterion_3),
        ("criterion 4 (Riccati residuals)", criterion_4),
        ("criterion 5 (limit-function closed forms)", criterion_5),
        ("criterion 6 (reduced-integral identity)", criterion_6),
        ("criterion 7 (Hardy sharpness sweep)", criterion_7),
        ("criterion 8 (McKean sharpness sweep)", criterion_8),
        ("criterion 9 (bound-chain consistency)", criterion_9),
        ("criterion 10 (Monte-Carlo cross-check)", criterion_10),
        ("criterion 11 (constant falsification)", criterion_11),
        ("supplementary (McKean, fixed-width ramp)", supplementary_fixed_ramp),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} of {} checks pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
