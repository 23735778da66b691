use finsler_hardy::error::HardyError;
use finsler_hardy::families::{make_flat_family, make_hyperbolic_family, RadialProfile};
use finsler_hardy::hardy::{hardy_quotient_montecarlo, hardy_quotient_radial, ReferenceMeasure, MIN_SAMPLES};
use finsler_hardy::quadrature::QuadratureSpec;
use finsler_hardy::riccati::{make_truncation, preset_hardy, preset_mckean, LimitFunction, RiccatiPair};

/// Composite Simpson in `s = ln r` over `[a, b]` with `m` panels.
fn simpson_log(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let (lo, hi) = (a.ln(), b.ln());
    let h = (hi - lo) / m as f64;
    let g = |s: f64| {
        let r = s.exp();
        f(r) * r
    };
    let mut sum = g(lo) + g(hi);
    for k in 1..m {
        sum += g(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Flat-family Hardy quotient computed in the Euclidean radius from the
/// closed forms of the distance, density and `F*(−Dρ)`, with the Hardy
/// limit function `v = t^{−(n−p)/p}` written explicitly.
fn flat_hardy_oracle(n: usize, lambda: f64, eps: f64, knots: [f64; 4]) -> f64 {
    let p = 2.0;
    let theta = (lambda - 1.0) / (lambda + 1.0);
    let c = ((n as f64 - p) / p).powf(p);
    let rho = |r: f64| r * (r * (1.0 - theta) + eps) / (r + eps);
    let q = |r: f64| theta * r * (r + 2.0 * eps) / (r + eps).powi(2);
    let sigma = |r: f64| (1.0 - q(r).powi(2)).powf((n as f64 + 1.0) / 2.0);
    let back = |r: f64| (1.0 - q(r)) / (1.0 + q(r));
    let radius = |t: f64| {
        let b = t - eps;
        (b + (b * b + 4.0 * (1.0 - theta) * t * eps).sqrt()) / (2.0 * (1.0 - theta))
    };
    let e = (n as f64 - p) / p;
    let v = |t: f64| t.powf(-e);
    let dv = |t: f64| e * t.powf(-e - 1.0);
    let [t1, t2, t3, t4] = knots;
    let r: Vec<f64> = knots.iter().map(|&t| radius(t)).collect();
    let m = 20_000;
    let vol = |x: f64| sigma(x) * x.powi(n as i32 - 1);
    let num = simpson_log(|x| (v(t2) / (t2 - t1)).powf(p) * vol(x), r[0], r[1], m)
        + simpson_log(|x| (dv(rho(x)) * back(x)).powf(p) * vol(x), r[1], r[2], m)
        + simpson_log(|x| (v(t3) / (t4 - t3) * back(x)).powf(p) * vol(x), r[2], r[3], m);
    let tent = |t: f64| {
        if t < t2 {
            v(t2) * (t - t1) / (t2 - t1)
        } else if t <= t3 {
            v(t)
        } else {
            v(t3) * (t4 - t) / (t4 - t3)
        }
    };
    let den = [(0, 1), (1, 2), (2, 3)]
        .iter()
        .map(|&(a, b)| simpson_log(|x| c * rho(x).powf(-p) * tent(rho(x)).powf(p) * vol(x), r[a], r[b], m))
        .sum::<f64>();
    lambda.powf(p) * num / den
}

#[test]
fn radial_quotient_matches_independent_oracle() {
    let spec = QuadratureSpec::default();
    for (delta, eps) in [(10.0, 0.1), (30.0, 1.0 / 30.0)] {
        let knots = [delta / 2.0, delta, delta * delta, 2.0 * delta * delta];
        let (_, _, fam) = make_flat_family(3, 2.0, eps).unwrap();
        let lf = LimitFunction::new(preset_hardy(3, 2.0, 0.0).unwrap(), 1.0, spec).unwrap();
        let tent = make_truncation(&lf, knots).unwrap();
        let q = hardy_quotient_radial(&fam, &tent, &spec).unwrap().quotient;
        let oracle = flat_hardy_oracle(3, 2.0, eps, knots);
        assert!(((q - oracle) / oracle).abs() < 1e-8, "delta = {delta}: {q} vs {oracle}");
    }
}

#[test]
fn hardy_middle_denominator_is_logarithmic() {
    let spec = QuadratureSpec::default();
    let pair = preset_hardy(3, 2.0, 0.0).unwrap();
    let lf = LimitFunction::new(pair, 1.0, spec).unwrap();
    let c = pair.hardy_weight(1.0);
    for delta in [10.0f64, 100.0] {
        let mu = ReferenceMeasure::flat(3);
        let i = mu
            .integral(|t| pair.weight(t).ln() + pair.hardy_weight(t).ln() + 2.0 * lf.ln_v(t).unwrap(), delta, delta * delta, &spec)
            .unwrap()
            .value();
        assert!((i / (c * delta.ln()) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn breakdown_is_consistent() {
    let spec = QuadratureSpec::default();
    let (_, _, fam) = make_flat_family(3, 2.0, 0.1).unwrap();
    let lf = LimitFunction::new(preset_hardy(3, 2.0, 0.0).unwrap(), 1.0, spec).unwrap();
    let tent = make_truncation(&lf, [5.0, 10.0, 100.0, 200.0]).unwrap();
    let b = hardy_quotient_radial(&fam, &tent, &spec).unwrap();
    let i = b.ramp_left.value + b.middle.value + b.ramp_right.value;
    assert!((4.0 * i / b.denominator.value / b.quotient - 1.0).abs() < 1e-12);
    assert!(b.denominator_middle.value < b.denominator.value);
    assert!(b.quotient <= b.upper_bound.unwrap());
    assert!(b.middle_bound_holds(1e-10));
    assert!((b.l1 - 1.0).abs() < 1e-12);
    assert_eq!(b.l2, fam.h_eps(10.0));
    assert!(b.rel_error < 1e-9);
}

#[test]
fn monte_carlo_agrees_on_both_families() {
    let spec = QuadratureSpec::default();
    let (_, _, flat) = make_flat_family(3, 2.0, 0.1).unwrap();
    let lf = LimitFunction::new(preset_hardy(3, 2.0, 0.0).unwrap(), 1.0, spec).unwrap();
    let tent = make_truncation(&lf, [5.0, 10.0, 100.0, 200.0]).unwrap();
    let radial = hardy_quotient_radial(&flat, &tent, &spec).unwrap().quotient;
    let mc = hardy_quotient_montecarlo(&flat, &tent, 30_000, 11).unwrap();
    assert!((radial - mc.quotient).abs() < 4.0 * mc.std_error, "{radial} vs {mc:?}");

    let (_, _, hyp) = make_hyperbolic_family(2, 2.0, 0.2, 0.0, 0.1).unwrap();
    let lf = LimitFunction::new(preset_mckean(2, 2.0, 0.2, 0.0).unwrap(), 1.0, spec).unwrap();
    let tent = make_truncation(&lf, [10.0, 20.0, 30.0, 40.0]).unwrap();
    let radial = hardy_quotient_radial(&hyp, &tent, &spec).unwrap().quotient;
    let mc = hardy_quotient_montecarlo(&hyp, &tent, 30_000, 11).unwrap();
    assert!((radial - mc.quotient).abs() < 4.0 * mc.std_error, "{radial} vs {mc:?}");
}

#[test]
fn monte_carlo_is_reproducible_and_guarded() {
    let spec = QuadratureSpec::default();
    let (_, _, flat) = make_flat_family(3, 2.0, 0.1).unwrap();
    let lf = LimitFunction::new(preset_hardy(3, 2.0, 0.0).unwrap(), 1.0, spec).unwrap();
    let tent = make_truncation(&lf, [5.0, 10.0, 100.0, 200.0]).unwrap();
    let a = hardy_quotient_montecarlo(&flat, &tent, MIN_SAMPLES, 3).unwrap();
    let b = hardy_quotient_montecarlo(&flat, &tent, MIN_SAMPLES, 3).unwrap();
    assert_eq!(a, b);
    assert!(matches!(hardy_quotient_montecarlo(&flat, &tent, 100, 3), Err(HardyError::TooFewSamples { .. })));

    // Outer knot beyond the Klein radius that coordinates can represent.
    let (_, _, hyp) = make_hyperbolic_family(2, 2.0, 1.0, 0.0, 0.1).unwrap();
    let lf = LimitFunction::new(preset_mckean(2, 2.0, 1.0, 0.0).unwrap(), 1.0, spec).unwrap();
    let tent = make_truncation(&lf, [10.0, 20.0, 30.0, 40.0]).unwrap();
    assert!(matches!(hardy_quotient_montecarlo(&hyp, &tent, MIN_SAMPLES, 3), Err(HardyError::OutsideInterval { .. })));
    assert!(hardy_quotient_radial(&hyp, &tent, &spec).is_ok());
}
