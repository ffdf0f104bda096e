use ht_extremes::phi::{lt_limit_r, lt_limit_z, phi, phi_quadrature, phi_series, PhiMethod};

/// Reference values of φ_α(s) = s^α γ(1-α, s) - (1 - e^{-s}), evaluated at
/// 40 significant digits with mpmath and rounded to double precision.
const FROZEN: [(f64, f64, f64); 10] = [
    (0.5, 1.0, 0.861_527_706_796_296_4),
    (0.3, 1.0, 0.355_943_095_082_178_9),
    (0.7, 1.0, 2.107_181_849_809_344_4),
    (0.25, 2.0, 0.468_660_332_052_065_5),
    (0.9, 10.0, 74.568_481_237_840_2),
    (0.5, 100.0, 16.724_538_509_055_16),
    (0.75, 0.05, 0.149_256_884_804_767_73),
    (0.1, 0.01, 0.001_108_485_268_623_402_2),
    (0.95, 1000.0, 13_782.764_817_702_85),
    (0.5, 10000.0, 176.245_385_090_551_6),
];

/// Double-exponential (tanh-sinh) rule on (0, 1]. Endpoint singularities are
/// absorbed by the doubly exponential node clustering.
fn tanh_sinh_unit<F: Fn(f64) -> f64>(f: F, level: u32) -> f64 {
    let h = 0.5f64.powi(level as i32);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut sum = 0.0;
    let n = (6.0 / h) as i64;
    for k in -n..=n {
        let u = k as f64 * h;
        let v = half_pi * u.sinh();
        // t = 1 / (1 + e^{-2v}); dt/du = (π/2) cosh(u) / (2 cosh²(v))
        let t = 1.0 / (1.0 + (-2.0 * v).exp());
        if !(1e-300..=1.0).contains(&t) {
            continue;
        }
        let w = half_pi * u.cosh() / (2.0 * v.cosh().powi(2));
        if w == 0.0 || !w.is_finite() {
            continue;
        }
        sum += w * f(t);
    }
    sum * h
}

fn phi_oracle(alpha: f64, s: f64) -> f64 {
    alpha * tanh_sinh_unit(|t: f64| -(-s * t).exp_m1() / t * t.powf(-alpha), 8)
}

fn phi_incomplete_gamma(alpha: f64, s: f64) -> f64 {
    use statrs::function::gamma::{gamma, gamma_lr};
    s.powf(alpha) * gamma_lr(1.0 - alpha, s) * gamma(1.0 - alpha) + (-s).exp_m1()
}

#[test]
fn oracle_agrees_with_closed_form() {
    for &(a, s, expected) in &FROZEN[..4] {
        let o = phi_oracle(a, s);
        assert!((o - expected).abs() < 1e-9, "{a} {s}: {o} vs {expected}");
        assert!((phi_incomplete_gamma(a, s) - expected).abs() < 1e-12);
    }
}

#[test]
fn phi_half_at_one() {
    let p = phi(0.5, 1.0).unwrap();
    assert!((p.value - phi_oracle(0.5, 1.0)).abs() < 1e-6);
    assert!((p.value - 0.861528).abs() < 1e-6);
}

#[test]
fn frozen_values() {
    for &(a, s, expected) in &FROZEN {
        let p = phi(a, s).unwrap();
        let err = (p.value - expected).abs();
        assert!(err <= 1e-12 * expected.max(1.0), "phi({a},{s}) = {} vs {expected}", p.value);
        assert!(err <= p.abs_error_bound.max(1e-15) * 10.0, "bound {p:?} err {err}");
    }
}

#[test]
fn series_and_quadrature_agree_on_validation_grid() {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let a = i as f64 / 10.0;
        for s in [0.01, 0.1, 1.0, 5.0, 10.0] {
            let series = phi_series(a, s).unwrap().expect("series settles");
            let quad = phi_quadrature(a, s).unwrap();
            let d = (series.value - quad.value).abs();
            worst = worst.max(d);
            assert!(d <= 1e-10, "alpha={a} s={s}: {} vs {}", series.value, quad.value);
            assert!(series.abs_error_bound <= 1e-10 && quad.abs_error_bound <= 1e-10);
        }
    }
    eprintln!("max |series - quadrature| = {worst:e}");
}

#[test]
fn divergence_for_alpha_at_least_one() {
    // ∫_ε^1 (1 - e^{-t}) t^{-2} dt grows like ln(1/ε): no finite limit.
    let partial = |eps: f64| {
        let n = 200_000;
        let (lo, hi) = (eps.ln(), 0.0);
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|i| {
                let t = (lo + (i as f64 + 0.5) * h).exp();
                -(-t).exp_m1() / t
            })
            .sum::<f64>()
            * h
    };
    let d1 = partial(1e-6) - partial(1e-3);
    let d2 = partial(1e-9) - partial(1e-6);
    assert!((d1 - 1e3f64.ln()).abs() < 0.01 && (d2 - 1e3f64.ln()).abs() < 0.01);
    for a in [1.0, 1.5] {
        let p = phi(a, 1.0).unwrap();
        assert_eq!(p.method, PhiMethod::Infinite);
    }
}

#[test]
fn limit_transform_examples() {
    assert!((lt_limit_r(0.0, 1.0).unwrap() - 0.36787944117144233).abs() < 1e-15);
    assert!((lt_limit_r(0.5, 1.0).unwrap() - 0.1976223291376982).abs() < 1e-12);
    assert_eq!(lt_limit_r(2.0, 1.0).unwrap(), 0.0);
    assert!((lt_limit_z(0.5, 1.0).unwrap() - 0.5371931861927576).abs() < 1e-12);
    for s in [0.01, 1.0, 30.0] {
        assert_eq!(lt_limit_z(0.0, s).unwrap(), 1.0);
    }
    assert!(lt_limit_z(0.3, 1.0).unwrap() > lt_limit_z(0.7, 1.0).unwrap());
}

#[test]
fn phi_increases_with_alpha() {
    for s in [0.05, 0.5, 1.0, 4.0, 20.0, 300.0] {
        let mut prev = -1.0;
        for i in 0..20 {
            let a = i as f64 * 0.05;
            let v = phi(a, s).unwrap().value;
            assert!(v > prev, "s={s} alpha={a}");
            prev = v;
        }
    }
}

#[test]
fn phi_is_bernstein_on_a_grid() {
    // nonnegative, increasing and concave in s
    for a in [0.1, 0.5, 0.9] {
        let grid: Vec<f64> = (0..200).map(|i| 0.01 * 1.05f64.powi(i)).collect();
        let v: Vec<f64> = grid.iter().map(|&s| phi(a, s).unwrap().value).collect();
        for i in 1..grid.len() {
            assert!(v[i] >= 0.0 && v[i] > v[i - 1]);
        }
        for i in 1..grid.len() - 1 {
            let slope_l = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
            let slope_r = (v[i + 1] - v[i]) / (grid[i + 1] - grid[i]);
            assert!(slope_r <= slope_l * (1.0 + 1e-9), "alpha={a} s={}", grid[i]);
        }
        assert!(phi(a, 1e-10).unwrap().value < 1e-9);
    }
}

#[test]
fn lt_limit_r_monotone_in_s_and_alpha() {
    let grid: Vec<f64> = (0..60).map(|i| 1e-3 * 1.2f64.powi(i)).collect();
    for a in [0.0, 0.2, 0.5, 0.8, 1.2] {
        let mut prev = 1.0;
        for &s in &grid {
            let v = lt_limit_r(a, s).unwrap();
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
    }
    for &s in &grid {
        let mut prev = 2.0;
        for a in [0.0, 0.2, 0.5, 0.8, 1.2] {
            let v = lt_limit_r(a, s).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }
    for a in [0.0, 0.3, 0.9] {
        assert!((lt_limit_r(a, 1e-9).unwrap() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn finite_difference_mean_matches_closed_form() {
    // Central differences at s0 = δ and 2δ, then linear extrapolation to 0+.
    let f = |a: f64, s: f64| lt_limit_r(a, s).unwrap();
    for a in [0.0, 0.25, 0.5, 0.75] {
        let (delta, h) = (1e-5, 1e-6);
        let d = |s0: f64| (f(a, s0 + h) - f(a, s0 - h)) / (2.0 * h);
        let slope_at_zero = 2.0 * d(delta) - d(2.0 * delta);
        let mean = ht_extremes::phi::limit_mean_r(a).unwrap();
        assert!((-slope_at_zero - mean).abs() < 1e-6, "alpha={a}: {} vs {mean}", -slope_at_zero);
    }
}
