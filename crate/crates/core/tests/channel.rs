use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uwcap::{
    an_product, an_second_derivative, optimal_center_frequency, ChannelParams, DistanceKm,
    FrequencyKHz,
};

/// Brute force: A·N on a 1 Hz grid, written out from the dB formulas.
fn grid_argmin(l: f64, p: &ChannelParams) -> (f64, f64) {
    let ln_an = |f: f64| {
        let f2 = f * f;
        let thorp = 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
        let lf = f.log10();
        let noise: f64 = [
            17.0 - 30.0 * lf,
            40.0 + 20.0 * (p.shipping - 0.5) + 26.0 * lf - 60.0 * (f + 0.03).log10(),
            50.0 + 7.5 * p.wind.sqrt() + 20.0 * lf - 40.0 * (f + 0.4).log10(),
            -15.0 + 20.0 * lf,
        ]
        .iter()
        .map(|db| 10f64.powf(db / 10.0))
        .sum();
        p.alpha * (l / p.l_ref).ln() + l * thorp / 10.0 * std::f64::consts::LN_10 + noise.ln()
    };
    let steps = ((p.f_hi - p.f_lo) / 1e-3).round() as usize;
    (0..=steps)
        .map(|i| p.f_lo + i as f64 * 1e-3)
        .map(|f| (f, ln_an(f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[test]
fn center_frequency_matches_grid_scan() {
    let p = ChannelParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ls: Vec<f64> = (0..20)
        .map(|_| 10f64.powf(rng.gen_range(-1.0..2.0)))
        .collect();
    ls.push(100.0);
    for l in ls {
        let fc = optimal_center_frequency(DistanceKm::new(l).unwrap(), &p);
        let (f_grid, ln_grid) = grid_argmin(l, &p);
        assert!(
            (fc.khz() - f_grid).abs() <= 1e-3,
            "l = {l}: {} vs {f_grid}",
            fc.khz()
        );
        assert!(fc.ln_an_min <= ln_grid + 1e-12, "l = {l}");
        assert!(!fc.at_boundary);
    }
}

#[test]
fn center_frequency_at_100_km() {
    let fc = optimal_center_frequency(DistanceKm::new(100.0).unwrap(), &ChannelParams::default());
    let (f_grid, _) = grid_argmin(100.0, &ChannelParams::default());
    assert!((fc.khz() - f_grid).abs() <= 1e-3);
    assert!(fc.khz() < 1.0);
}

/// Plain central differences at shrinking steps converge on the returned Υ.
#[test]
fn curvature_step_sweep() {
    let p = ChannelParams::default();
    for l in [0.5, 1.0, 10.0, 50.0] {
        let d = DistanceKm::new(l).unwrap();
        let fc = optimal_center_frequency(d, &p).khz();
        let ups = an_second_derivative(d, &p).unwrap();
        let an = |f: f64| an_product(d, FrequencyKHz::new(f).unwrap(), &p).unwrap();
        let mut best = f64::INFINITY;
        for k in 2..8 {
            let h = fc * 10f64.powi(-k) * 3.0;
            let fd = (an(fc + h) - 2.0 * an(fc) + an(fc - h)) / (h * h);
            best = best.min(((fd - ups) / ups).abs());
        }
        assert!(ups > 0.0);
        assert!(best < 1e-5, "l = {l}: best rel gap {best}");
    }
}
