//! Underwater acoustic channel: Thorp absorption, ambient noise psd,
//! distance/frequency attenuation and the attenuation-noise product whose
//! minimizer sets the optimal carrier for a link.
//!
//! Every quantity that can overflow `f64` (attenuation grows like
//! `10^(l·a_dB/10)`) also has a natural-log form; the searches run on those.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_section_min, log_space};

/// Frequency in kHz, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FrequencyKHz(f64);

/// Distance in km, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DistanceKm(f64);

/// Power spectral density in linear µPa²/Hz, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PsdLinear(f64);

macro_rules! positive_scalar {
    ($name:ident, $what:literal) => {
        impl $name {
            pub fn new(value: f64) -> Result<Self> {
                if value.is_finite() && value > 0.0 {
                    Ok(Self(value))
                } else {
                    Err(Error::domain(format!(
                        "{} must be finite and > 0, got {value}",
                        $what
                    )))
                }
            }

            #[inline]
            pub fn get(self) -> f64 {
                self.0
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;
            fn try_from(value: f64) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for f64 {
            fn from(v: $name) -> f64 {
                v.0
            }
        }
    };
}

positive_scalar!(FrequencyKHz, "frequency");
positive_scalar!(DistanceKm, "distance");
positive_scalar!(PsdLinear, "psd");

/// Physical environment of the acoustic channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Spreading factor α (1 cylindrical, 2 spherical).
    pub alpha: f64,
    /// Shipping activity s in [0, 1].
    pub shipping: f64,
    /// Wind speed w in m/s.
    pub wind: f64,
    /// Reference distance for the spreading term, km.
    pub l_ref: f64,
    /// Lower edge of the usable spectrum, kHz.
    pub f_lo: f64,
    /// Upper edge of the usable spectrum, kHz.
    pub f_hi: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            shipping: 0.5,
            wind: 0.0,
            l_ref: 0.001,
            f_lo: 0.1,
            f_hi: 200.0,
        }
    }
}

impl ChannelParams {
    /// Validated constructor. `alpha` outside [1, 2] is accepted as long as it
    /// is at least 1; see [`ChannelParams::alpha_in_typical_range`].
    pub fn new(
        alpha: f64,
        shipping: f64,
        wind: f64,
        l_ref: f64,
        f_lo: f64,
        f_hi: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            shipping,
            wind,
            l_ref,
            f_lo,
            f_hi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return Err(Error::domain(format!(
                "alpha must be >= 1, got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.shipping) {
            return Err(Error::domain(format!(
                "shipping must lie in [0, 1], got {}",
                self.shipping
            )));
        }
        if !(self.wind.is_finite() && self.wind >= 0.0) {
            return Err(Error::domain(format!(
                "wind must be >= 0, got {}",
                self.wind
            )));
        }
        if !(self.l_ref.is_finite() && self.l_ref > 0.0) {
            return Err(Error::domain(format!(
                "l_ref must be > 0, got {}",
                self.l_ref
            )));
        }
        if !(self.f_lo > 0.0 && self.f_hi > self.f_lo && self.f_hi.is_finite()) {
            return Err(Error::domain(format!(
                "frequency domain must satisfy 0 < f_lo < f_hi, got [{}, {}]",
                self.f_lo, self.f_hi
            )));
        }
        Ok(())
    }

    /// Underwater spreading is between cylindrical and spherical.
    pub fn alpha_in_typical_range(&self) -> bool {
        (1.0..=2.0).contains(&self.alpha)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_lo && f <= self.f_hi
    }
}

/// Thorp absorption in dB/km, f in kHz.
pub fn absorption_db_per_km(f: FrequencyKHz) -> f64 {
    thorp_db(f.get())
}

#[inline]
pub(crate) fn thorp_db(f: f64) -> f64 {
    let f2 = f * f;
    0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
}

/// Natural log of the linear absorption factor a(f), per km.
#[inline]
pub(crate) fn ln_absorption(f: f64) -> f64 {
    thorp_db(f) * LN_10 / 10.0
}

/// Linear absorption factor a(f) per km; always > 1.
pub fn absorption_linear(f: FrequencyKHz) -> f64 {
    ln_absorption(f.get()).exp()
}

/// ln A(l, f) = α ln(l / l_ref) + l ln a(f).
pub fn ln_attenuation(l: DistanceKm, f: FrequencyKHz, params: &ChannelParams) -> f64 {
    ln_attenuation_raw(l.get(), f.get(), params)
}

#[inline]
fn ln_attenuation_raw(l: f64, f: f64, params: &ChannelParams) -> f64 {
    params.alpha * (l / params.l_ref).ln() + l * ln_absorption(f)
}

/// A(l, f) = (l / l_ref)^α · a(f)^l. Returns `+inf` where the linear value
/// exceeds the `f64` range; use [`ln_attenuation`] there.
pub fn attenuation(l: DistanceKm, f: FrequencyKHz, params: &ChannelParams) -> f64 {
    ln_attenuation(l, f, params).exp()
}

/// The four ambient noise contributions in dB re µPa²/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseComponents {
    pub turbulence: f64,
    pub shipping: f64,
    pub wind: f64,
    pub thermal: f64,
}

impl NoiseComponents {
    pub fn total_linear(&self) -> f64 {
        [self.turbulence, self.shipping, self.wind, self.thermal]
            .iter()
            .map(|db| 10f64.powf(db / 10.0))
            .sum()
    }

    pub fn total_db(&self) -> f64 {
        10.0 * self.total_linear().log10()
    }
}

pub fn noise_components(f: FrequencyKHz, params: &ChannelParams) -> NoiseComponents {
    noise_components_raw(f.get(), params)
}

fn noise_components_raw(f: f64, params: &ChannelParams) -> NoiseComponents {
    let lf = f.log10();
    NoiseComponents {
        turbulence: 17.0 - 30.0 * lf,
        shipping: 40.0 + 20.0 * (params.shipping - 0.5) + 26.0 * lf - 60.0 * (f + 0.03).log10(),
        wind: 50.0 + 7.5 * params.wind.sqrt() + 20.0 * lf - 40.0 * (f + 0.4).log10(),
        thermal: -15.0 + 20.0 * lf,
    }
}

/// Ambient noise psd N(f), linear µPa²/Hz.
pub fn noise_psd(f: FrequencyKHz, params: &ChannelParams) -> PsdLinear {
    PsdLinear(noise_components(f, params).total_linear())
}

#[inline]
fn ln_noise_raw(f: f64, params: &ChannelParams) -> f64 {
    noise_components_raw(f, params).total_linear().ln()
}

/// ln(A(l, f)·N(f)); finite for every positive l and f.
pub fn ln_an_product(l: DistanceKm, f: FrequencyKHz, params: &ChannelParams) -> f64 {
    ln_an_raw(l.get(), f.get(), params)
}

#[inline]
pub(crate) fn ln_an_raw(l: f64, f: f64, params: &ChannelParams) -> f64 {
    ln_attenuation_raw(l, f, params) + ln_noise_raw(f, params)
}

/// A(l, f)·N(f). Fails when the product is outside the `f64` range.
pub fn an_product(l: DistanceKm, f: FrequencyKHz, params: &ChannelParams) -> Result<f64> {
    let v = ln_an_product(l, f, params).exp();
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::numerical(format!(
            "A·N overflows at l = {} km, f = {} kHz",
            l.get(),
            f.get()
        )))
    }
}

/// Minimizer of A(l, ·)·N(·) over the channel's frequency domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterFrequency {
    pub freq: FrequencyKHz,
    /// ln of A·N at the minimizer.
    pub ln_an_min: f64,
    /// The minimizer sits on an edge of the frequency domain, so the optimal
    /// band would be clipped.
    pub at_boundary: bool,
}

impl CenterFrequency {
    pub fn khz(&self) -> f64 {
        self.freq.get()
    }

    pub fn an_min(&self) -> f64 {
        self.ln_an_min.exp()
    }
}

const FC_GRID_POINTS: usize = 256;
const FC_REL_TOL: f64 = 1e-9;

/// Optimal center frequency f_c(l): coarse log grid, then golden section
/// between the neighbours of the best grid point.
pub fn optimal_center_frequency(l: DistanceKm, params: &ChannelParams) -> CenterFrequency {
    let l = l.get();
    let obj = |f: f64| ln_an_raw(l, f, params);
    let grid = log_space(params.f_lo, params.f_hi, FC_GRID_POINTS);
    let best = grid
        .iter()
        .enumerate()
        .map(|(i, &f)| (i, obj(f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(FC_GRID_POINTS - 1)];
    let mut f = golden_section_min(obj, lo, hi, FC_REL_TOL);
    // golden section never evaluates the bracket ends themselves
    for edge in [params.f_lo, params.f_hi] {
        if (edge == lo || edge == hi) && obj(edge) <= obj(f) {
            f = edge;
        }
    }
    let tol = 1e-6 * f;
    let at_boundary = f - params.f_lo <= tol || params.f_hi - f <= tol;
    CenterFrequency {
        freq: FrequencyKHz(f),
        ln_an_min: obj(f),
        at_boundary,
    }
}

/// Υ = ∂²(A·N)/∂f² at f_c(l), in linear psd units per kHz².
///
/// Central differences with step halving until consecutive estimates agree
/// to four significant digits; the final two are Richardson-combined.
pub fn an_second_derivative(l: DistanceKm, params: &ChannelParams) -> Result<f64> {
    let fc = optimal_center_frequency(l, params);
    curvature_at(l.get(), &fc, params)
}

pub(crate) fn curvature_at(l: f64, fc: &CenterFrequency, params: &ChannelParams) -> Result<f64> {
    let f0 = fc.khz();
    let non_convex = |upsilon: f64| Error::NonConvex { f_khz: f0, upsilon };
    if fc.at_boundary {
        return Err(non_convex(f64::NAN));
    }
    let base = ln_an_raw(l, f0, params);
    let an0 = base.exp();
    if !an0.is_finite() {
        return Err(Error::numerical("A·N overflows at the center frequency"));
    }
    // (AN(f0+h) - 2 AN(f0) + AN(f0-h)) / h², with the differences taken in
    // log space to avoid cancellation
    let estimate = |h: f64| {
        let up = (ln_an_raw(l, f0 + h, params) - base).exp_m1();
        let down = (ln_an_raw(l, f0 - h, params) - base).exp_m1();
        an0 * (up + down) / (h * h)
    };
    let mut h = 0.05 * f0.min(f0 - params.f_lo).min(params.f_hi - f0);
    let mut prev = estimate(h);
    for _ in 0..40 {
        h *= 0.5;
        let cur = estimate(h);
        if (cur - prev).abs() <= 1e-4 * cur.abs() {
            let upsilon = (4.0 * cur - prev) / 3.0;
            if !(upsilon > 0.0) || !upsilon.is_finite() {
                return Err(non_convex(upsilon));
            }
            return Ok(upsilon);
        }
        prev = cur;
    }
    Err(Error::numerical(format!(
        "second-derivative estimate at {f0} kHz did not settle"
    )))
}
