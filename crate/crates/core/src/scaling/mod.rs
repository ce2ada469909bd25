//! Upper bounds on the transport capacity λ·n·L̄ (bit·km/s) of n nodes
//! placed arbitrarily in a unit-area disk, under the SINR physical model with
//! frequency-dependent absorption.
//!
//! Every regime yields the same outer form
//!
//! ```text
//! λ n L̄ ≤ C · W · n^((α−1)/α) · exp(−W₀(C · 2 ln a_min / α · n^(−1/α)))
//! ```
//!
//! and differs only in the constant `C` (Φ for narrow bands, Θ for a wide
//! band) and in which absorption value enters the exponential.

mod lambert;

pub use lambert::lambert_w0;

use std::f64::consts::PI;

use serde::Serialize;

use crate::band::Band;
use crate::channel::ln_absorption;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, golden_section_min, log_space};

const QUAD_REL_TOL: f64 = 1e-10;

/// Exponent 2/√π: the largest separation in a unit-area disk, in km.
pub fn max_separation() -> f64 {
    2.0 / PI.sqrt()
}

/// One narrow band at a fixed absorption value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NarrowbandScenario {
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Per-node rate W = Δf·log2(1+β), bit/s.
    pub w_rate: f64,
    /// a(f) at the band, per km.
    pub a_f: f64,
}

/// Several disjoint narrow bands with multi-hop relaying across them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiBandScenario {
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Rate per band ΔW, bit/s.
    pub delta_w: f64,
    pub band_absorptions: Vec<f64>,
}

/// Single-hop networks layered by link distance, one per band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectScenario {
    pub alpha: f64,
    pub beta: f64,
    pub delta_w: f64,
    /// `(a(f_m), n_m)` per band.
    pub per_band: Vec<(f64, u64)>,
}

/// A wide band with a frequency-dependent SINR threshold.
pub struct WidebandScenario<B, A> {
    pub n: u64,
    pub alpha: f64,
    pub band: Band,
    pub beta_of_f: B,
    /// a(f) per km, f in kHz.
    pub absorption: A,
}

impl<B> WidebandScenario<B, fn(f64) -> f64>
where
    B: Fn(f64) -> f64,
{
    /// Wide band under Thorp absorption.
    pub fn thorp(n: u64, alpha: f64, band: Band, beta_of_f: B) -> Self {
        fn thorp_linear(f: f64) -> f64 {
            ln_absorption(f).exp()
        }
        Self {
            n,
            alpha,
            band,
            beta_of_f,
            absorption: thorp_linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    /// Upper bound on λ·n·L̄, bit·km/s.
    pub transport_bound: f64,
    /// Upper bound on λ·L̄ = transport_bound / n.
    pub per_pair_bound: f64,
    /// Φ or Θ.
    pub phi_or_theta: f64,
    /// Argument handed to W₀.
    pub lambert_arg: f64,
}

impl BoundResult {
    fn zero(constant: f64) -> Self {
        Self {
            transport_bound: 0.0,
            per_pair_bound: 0.0,
            phi_or_theta: constant,
            lambert_arg: 0.0,
        }
    }
}

fn check_common(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 1.0) {
        return Err(Error::domain(format!("alpha must be >= 1, got {alpha}")));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!("beta must be > 0, got {beta}")));
    }
    Ok(())
}

fn check_absorption(a: f64) -> Result<()> {
    if a.is_finite() && a >= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("absorption must be >= 1, got {a}")))
    }
}

fn check_rate(w: f64) -> Result<()> {
    if w.is_finite() && w > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("rate must be > 0, got {w}")))
    }
}

/// Φ for a mean absorption term `mean_a_pow = mean of a^(2/√π)`.
fn phi(alpha: f64, beta: f64, mean_a_pow: f64) -> f64 {
    let inv = 1.0 / alpha;
    2f64.powf(inv) / PI.sqrt() * ((beta + 1.0) / beta).powf(inv) * mean_a_pow.powf(inv)
}

fn outer_bound(
    constant: f64,
    w_rate: f64,
    n: u64,
    alpha: f64,
    ln_a_min: f64,
) -> Result<BoundResult> {
    if n == 0 {
        return Ok(BoundResult::zero(constant));
    }
    let n_f = n as f64;
    let lambert_arg = constant * 2.0 * ln_a_min / alpha * n_f.powf(-1.0 / alpha);
    let transport_bound =
        constant * w_rate * n_f.powf((alpha - 1.0) / alpha) * (-lambert_w0(lambert_arg)?).exp();
    Ok(BoundResult {
        transport_bound,
        per_pair_bound: transport_bound / n_f,
        phi_or_theta: constant,
        lambert_arg,
    })
}

/// Bound for an arbitrarily chosen narrow band.
pub fn bound_fixed_narrowband(sc: &NarrowbandScenario) -> Result<BoundResult> {
    check_common(sc.alpha, sc.beta)?;
    check_absorption(sc.a_f)?;
    check_rate(sc.w_rate)?;
    if sc.n == 0 {
        return Err(Error::domain("node count must be >= 1"));
    }
    let constant = phi(sc.alpha, sc.beta, sc.a_f.powf(max_separation()));
    outer_bound(constant, sc.w_rate, sc.n, sc.alpha, sc.a_f.ln())
}

/// Bound for disjoint narrow bands with relaying: Φ averages a^(2/√π) over
/// the bands, the exponential uses the smallest absorption.
pub fn bound_multiband(sc: &MultiBandScenario) -> Result<BoundResult> {
    check_common(sc.alpha, sc.beta)?;
    check_rate(sc.delta_w)?;
    if sc.band_absorptions.is_empty() {
        return Err(Error::domain("multi-band scenario needs at least one band"));
    }
    if sc.n == 0 {
        return Err(Error::domain("node count must be >= 1"));
    }
    for &a in &sc.band_absorptions {
        check_absorption(a)?;
    }
    let bands = sc.band_absorptions.len() as f64;
    let mean = sc
        .band_absorptions
        .iter()
        .map(|a| a.powf(max_separation()))
        .sum::<f64>()
        / bands;
    let a_min = sc
        .band_absorptions
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let constant = phi(sc.alpha, sc.beta, mean);
    outer_bound(constant, bands * sc.delta_w, sc.n, sc.alpha, a_min.ln())
}

/// Per-band bounds for direct (single-hop) transmissions; each band is its
/// own network of `n_m` nodes at rate ΔW. Bands with no nodes bound to zero.
pub fn bound_direct_per_band(sc: &DirectScenario) -> Result<Vec<BoundResult>> {
    check_common(sc.alpha, sc.beta)?;
    check_rate(sc.delta_w)?;
    sc.per_band
        .iter()
        .map(|&(a_f, n_m)| {
            check_absorption(a_f)?;
            if n_m == 0 {
                return Ok(BoundResult::zero(phi(
                    sc.alpha,
                    sc.beta,
                    a_f.powf(max_separation()),
                )));
            }
            bound_fixed_narrowband(&NarrowbandScenario {
                n: n_m,
                alpha: sc.alpha,
                beta: sc.beta,
                w_rate: sc.delta_w,
                a_f,
            })
        })
        .collect()
}

/// Rate W = ∫_B log2(1 + β(f)) df over the band, bit/s.
pub fn wideband_rate<B: Fn(f64) -> f64>(band: &Band, beta_of_f: B) -> Result<f64> {
    Ok(adaptive_simpson(
        |f| (1.0 + beta_of_f(f)).log2(),
        band.f_min,
        band.f_max,
        QUAD_REL_TOL,
    )? * crate::HZ_PER_KHZ)
}

/// Bound for a wide band with frequency-dependent threshold; Θ averages
/// `(β+1)/β · a^(2/√π)` weighted by the rate density.
pub fn bound_wideband<B, A>(sc: &WidebandScenario<B, A>) -> Result<BoundResult>
where
    B: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    if !(sc.alpha.is_finite() && sc.alpha >= 1.0) {
        return Err(Error::domain(format!(
            "alpha must be >= 1, got {}",
            sc.alpha
        )));
    }
    if sc.n == 0 {
        return Err(Error::domain("node count must be >= 1"));
    }
    let band = Band::new(sc.band.f_min, sc.band.f_max)?;
    for i in 0..=100 {
        let f = band.f_min + band.width() * i as f64 / 100.0;
        let b = (sc.beta_of_f)(f);
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!("beta({f}) must be > 0, got {b}")));
        }
        check_absorption((sc.absorption)(f))?;
    }
    let w_rate = wideband_rate(&band, &sc.beta_of_f)?;
    let weighted = adaptive_simpson(
        |f| {
            let b = (sc.beta_of_f)(f);
            (b + 1.0) / b * (sc.absorption)(f).powf(max_separation()) * (1.0 + b).log2()
        },
        band.f_min,
        band.f_max,
        QUAD_REL_TOL,
    )? * crate::HZ_PER_KHZ;
    let inv = 1.0 / sc.alpha;
    let theta = 2f64.powf(inv) / PI.sqrt() * (weighted / w_rate).powf(inv);
    let a_min = min_absorption(&band, &sc.absorption);
    outer_bound(theta, w_rate, sc.n, sc.alpha, a_min.ln())
}

/// Smallest a(f) over the band: grid scan refined by golden section.
fn min_absorption<A: Fn(f64) -> f64>(band: &Band, absorption: &A) -> f64 {
    const POINTS: usize = 257;
    let step = band.width() / (POINTS - 1) as f64;
    let grid: Vec<f64> = (0..POINTS).map(|i| band.f_min + step * i as f64).collect();
    let (best, mut a_min) = grid
        .iter()
        .enumerate()
        .map(|(i, &f)| (i, absorption(f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(POINTS - 1)];
    let f = golden_section_min(absorption, lo, hi, 1e-12);
    a_min = a_min.min(absorption(f));
    a_min
}

/// Curve family over a(f): fixed narrow band at several absorption values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFamily {
    pub alpha: f64,
    pub beta: f64,
    pub w_rate: f64,
    pub a_fs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub a_f: f64,
    pub n: u64,
    pub per_pair_bound: f64,
    pub transport_bound: f64,
    /// n^(−1/α), the large-n reference slope.
    pub reference: f64,
}

/// Per-pair bound at each n for each a(f), ordered by (a_f, n).
pub fn bound_curve(family: &CurveFamily, n_values: &[u64]) -> Result<Vec<CurveRow>> {
    let mut a_fs = family.a_fs.clone();
    a_fs.sort_by(f64::total_cmp);
    let mut ns = n_values.to_vec();
    ns.sort_unstable();
    let mut rows = Vec::with_capacity(a_fs.len() * ns.len());
    for &a_f in &a_fs {
        for &n in &ns {
            let r = bound_fixed_narrowband(&NarrowbandScenario {
                n,
                alpha: family.alpha,
                beta: family.beta,
                w_rate: family.w_rate,
                a_f,
            })?;
            rows.push(CurveRow {
                a_f,
                n,
                per_pair_bound: r.per_pair_bound,
                transport_bound: r.transport_bound,
                reference: (n as f64).powf(-1.0 / family.alpha),
            });
        }
    }
    Ok(rows)
}

/// Up to `count` distinct integers log-spaced over `[n_min, n_max]`.
pub fn log_spaced_counts(n_min: u64, n_max: u64, count: usize) -> Result<Vec<u64>> {
    if n_min == 0 || n_max < n_min || count == 0 {
        return Err(Error::domain(format!(
            "need 1 <= n_min <= n_max and count >= 1, got [{n_min}, {n_max}] x {count}"
        )));
    }
    if count == 1 || n_min == n_max {
        return Ok(vec![n_min]);
    }
    let mut ns: Vec<u64> = log_space(n_min as f64, n_max as f64, count)
        .into_iter()
        .map(|v| v.round() as u64)
        .collect();
    ns.dedup();
    Ok(ns)
}
