use std::f64::consts::PI;

use uwcap::{bound_fixed_narrowband, bound_wideband, Band, NarrowbandScenario, WidebandScenario};

fn thorp_linear(f: f64) -> f64 {
    let f2 = f * f;
    let db = 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
    10f64.powf(db / 10.0)
}

/// Solves T = K·exp(−z·T/K) on [0, K] by bisection.
fn implicit_transport(k: f64, z: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, k);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid - k * (-z * mid / k).exp() < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn lambert_closed_form_solves_implicit_bound() {
    let sep = 2.0 / PI.sqrt();
    for alpha in [1.0, 1.5, 2.0, 4.0] {
        for a_f in [1.5, 10.0, 1e3, 1e5] {
            for n in [1u64, 50, 10_000, 1_000_000_000] {
                let (beta, w) = (2.0, 3.0);
                let r = bound_fixed_narrowband(&NarrowbandScenario {
                    n,
                    alpha,
                    beta,
                    w_rate: w,
                    a_f,
                })
                .unwrap();
                let phi = 2f64.powf(1.0 / alpha) / PI.sqrt()
                    * ((beta + 1.0) / beta * a_f.powf(sep)).powf(1.0 / alpha);
                let nf = n as f64;
                let k = phi * w * nf.powf((alpha - 1.0) / alpha);
                let z = phi * 2.0 * a_f.ln() / alpha * nf.powf(-1.0 / alpha);
                let t = implicit_transport(k, z);
                assert!(
                    ((r.transport_bound - t) / t).abs() < 1e-12,
                    "alpha {alpha} a {a_f} n {n}"
                );
                assert!(((r.phi_or_theta - phi) / phi).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn wideband_theta_matches_trapezoid() {
    let beta = 2.0;
    let (lo, hi) = (10.0, 50.0);
    let sc = WidebandScenario::thorp(100, 1.0, Band::new(lo, hi).unwrap(), |_| beta);
    let r = bound_wideband(&sc).unwrap();

    let n = 100_000;
    let h = (hi - lo) / n as f64;
    let sep = 2.0 / PI.sqrt();
    let mean = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * thorp_linear(lo + h * i as f64).powf(sep)
        })
        .sum::<f64>()
        * h
        / (hi - lo);
    let theta = 2.0 / PI.sqrt() * (beta + 1.0) / beta * mean;
    assert!(
        ((r.phi_or_theta - theta) / theta).abs() < 1e-6,
        "{} vs {theta}",
        r.phi_or_theta
    );
}

#[test]
fn per_pair_curve_at_high_absorption_stays_high_at_small_n() {
    let per_pair = |n| {
        bound_fixed_narrowband(&NarrowbandScenario {
            n,
            alpha: 1.0,
            beta: 2.0,
            w_rate: 1.0,
            a_f: 1e4,
        })
        .unwrap()
        .per_pair_bound
    };
    let start = per_pair(1);
    assert!(per_pair(10) < start && per_pair(100) < per_pair(10));
    assert!(per_pair(100) / start >= 0.5);
    let classic = |n| {
        bound_fixed_narrowband(&NarrowbandScenario {
            n,
            alpha: 1.0,
            beta: 2.0,
            w_rate: 1.0,
            a_f: 1.0,
        })
        .unwrap()
        .per_pair_bound
    };
    assert!(per_pair(100) > classic(100));
}
