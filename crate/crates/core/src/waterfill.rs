//! Single-link waterfilling against the colored floor A(l, f)·N(f).
//!
//! For a water level K the transmission band is `{f : A·N < K}`, the signal
//! psd is `K − A·N` on it, the power is the integral of that psd and the
//! capacity is the integral of `log2(K / A·N)`. The solvers invert either
//! integral for K by bisection.
//!
//! Internally the level is carried as `x = ln K − ln min(A·N) ≥ 0` so that
//! links whose floor is far outside the `f64` range still solve.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::band::Band;
use crate::channel::{
    curvature_at, ln_an_raw, optimal_center_frequency, CenterFrequency, ChannelParams, DistanceKm,
};
use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson, bisect_boundary, log_space};
use crate::HZ_PER_KHZ;

const BAND_GRID_POINTS: usize = 1024;
const QUAD_REL_TOL: f64 = 1e-10;
const SOLVE_REL_TOL: f64 = 1e-9;
/// Initial upper bracket for the level: K = min(A·N)·2^64.
const INITIAL_LEVEL_SPAN: f64 = 64.0 * LN_2;
const MAX_BRACKET_DOUBLINGS: u32 = 12;
/// Quadratic-model error above which the narrowband approximation is
/// reported as out of regime.
const NARROWBAND_MODEL_TOL: f64 = 0.2;

/// Optimal waterfilling allocation for one link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterfillSolution {
    pub distance_km: f64,
    pub center_khz: f64,
    /// Water level K, linear psd units.
    pub k_level: f64,
    /// Disjoint bands sorted by `f_min`, kHz.
    pub bands: Vec<Band>,
    /// Transmit power, psd units × Hz.
    pub power: f64,
    /// Capacity, bit/s.
    pub capacity: f64,
    /// The cubic narrowband law reproduces `power` within 20%.
    pub narrowband: bool,
    /// A band touches an edge of the frequency domain, or the requested
    /// target could not be bracketed.
    pub clipped: bool,
}

impl WaterfillSolution {
    pub fn total_bandwidth(&self) -> f64 {
        self.bands.iter().map(Band::width).sum()
    }
}

/// Cubic-law power estimate for a narrow band around f_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NarrowbandEstimate {
    pub delta_f: f64,
    /// Υ, psd units per kHz².
    pub upsilon: f64,
    /// Υ·Δf³/12 with Υ and Δf expressed in Hz, psd units × Hz.
    pub power: f64,
    /// The quadratic model of A·N stays within 20% of the true excess at the
    /// band edges f_c ± Δf/2.
    pub in_regime: bool,
}

/// A point-to-point link at a fixed distance, with its floor minimum and
/// search grid precomputed.
#[derive(Debug, Clone)]
pub struct Link {
    l: f64,
    params: ChannelParams,
    fc: CenterFrequency,
    grid: Vec<f64>,
    upsilon: Result<f64>,
}

impl Link {
    pub fn new(l: DistanceKm, params: &ChannelParams) -> Result<Self> {
        params.validate()?;
        let fc = optimal_center_frequency(l, params);
        let mut grid = log_space(params.f_lo, params.f_hi, BAND_GRID_POINTS);
        let at = grid.partition_point(|&f| f < fc.khz());
        if grid.get(at) != Some(&fc.khz()) {
            grid.insert(at, fc.khz());
        }
        let upsilon = curvature_at(l.get(), &fc, params);
        Ok(Self {
            l: l.get(),
            params: *params,
            fc,
            grid,
            upsilon,
        })
    }

    pub fn distance(&self) -> f64 {
        self.l
    }

    pub fn center(&self) -> &CenterFrequency {
        &self.fc
    }

    /// Υ at the center frequency.
    pub fn upsilon(&self) -> Result<f64> {
        self.upsilon.clone()
    }

    #[inline]
    fn ln_an(&self, f: f64) -> f64 {
        ln_an_raw(self.l, f, &self.params)
    }

    /// Sub-level set `{f : ln(A·N) < ln_k}` as sorted disjoint intervals.
    fn bands_at(&self, ln_k: f64) -> Vec<Band> {
        let below: Vec<bool> = self.grid.iter().map(|&f| self.ln_an(f) < ln_k).collect();
        let pred = |f: f64| self.ln_an(f) < ln_k;
        let mut bands = Vec::new();
        let mut i = 0;
        while i < self.grid.len() {
            if !below[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i + 1 < self.grid.len() && below[i + 1] {
                i += 1;
            }
            let end = i;
            let f_min = if start == 0 {
                self.grid[0]
            } else {
                bisect_boundary(self.grid[start], self.grid[start - 1], pred)
            };
            let f_max = if end + 1 == self.grid.len() {
                self.grid[end]
            } else {
                bisect_boundary(self.grid[end], self.grid[end + 1], pred)
            };
            if f_max > f_min {
                bands.push(Band { f_min, f_max });
            }
            i += 1;
        }
        bands
    }

    fn capacity_over(&self, ln_k: f64, bands: &[Band]) -> Result<f64> {
        let integrand = |f: f64| ((ln_k - self.ln_an(f)) / LN_2).max(0.0);
        let mut total = 0.0;
        for b in bands {
            total += adaptive_simpson(integrand, b.f_min, b.f_max, QUAD_REL_TOL)?;
        }
        Ok(total * HZ_PER_KHZ)
    }

    fn power_over(&self, ln_k: f64, bands: &[Band]) -> Result<f64> {
        // K − A·N = K · (1 − A·N / K)
        let integrand = |f: f64| (-(self.ln_an(f) - ln_k).exp_m1()).max(0.0);
        let mut total = 0.0;
        for b in bands {
            total += adaptive_simpson(integrand, b.f_min, b.f_max, QUAD_REL_TOL)?;
        }
        Ok(ln_k.exp() * total * HZ_PER_KHZ)
    }

    fn is_clipped(&self, bands: &[Band]) -> bool {
        bands
            .iter()
            .any(|b| b.f_min <= self.params.f_lo || b.f_max >= self.params.f_hi)
    }

    fn solution_at_level(&self, x: f64) -> Result<WaterfillSolution> {
        let ln_k = self.fc.ln_an_min + x;
        let bands = if x > 0.0 {
            self.bands_at(ln_k)
        } else {
            Vec::new()
        };
        let capacity = self.capacity_over(ln_k, &bands)?;
        let power = self.power_over(ln_k, &bands)?;
        let narrowband = match bands.as_slice() {
            [] => true,
            [b] => self
                .narrowband_power(b.width())
                .map(|est| est.in_regime && (est.power / power - 1.0).abs() <= NARROWBAND_MODEL_TOL)
                .unwrap_or(false),
            _ => false,
        };
        Ok(WaterfillSolution {
            distance_km: self.l,
            center_khz: self.fc.khz(),
            k_level: ln_k.exp(),
            clipped: self.is_clipped(&bands),
            bands,
            power,
            capacity,
            narrowband,
        })
    }

    fn zero_solution(&self) -> WaterfillSolution {
        WaterfillSolution {
            distance_km: self.l,
            center_khz: self.fc.khz(),
            k_level: self.fc.an_min(),
            bands: Vec::new(),
            power: 0.0,
            capacity: 0.0,
            narrowband: true,
            clipped: false,
        }
    }

    /// Capacity (bit/s) and bands for a given water level K.
    pub fn capacity_given_k(&self, k_level: f64) -> Result<(f64, Vec<Band>)> {
        if !(k_level > 0.0) || k_level.is_nan() {
            return Err(Error::domain(format!(
                "water level must be > 0, got {k_level}"
            )));
        }
        let ln_k = k_level.ln();
        if ln_k <= self.fc.ln_an_min {
            return Ok((0.0, Vec::new()));
        }
        let bands = self.bands_at(ln_k);
        Ok((self.capacity_over(ln_k, &bands)?, bands))
    }

    /// Level at which `measure` reaches `target`. Returns the level and
    /// whether the target was bracketed at all.
    fn solve_level<M>(&self, target: f64, measure: M) -> Result<(f64, bool)>
    where
        M: Fn(f64) -> Result<f64>,
    {
        let mut hi = INITIAL_LEVEL_SPAN;
        let mut doublings = 0;
        while measure(hi)? < target {
            if doublings == MAX_BRACKET_DOUBLINGS {
                return Ok((hi, false));
            }
            hi *= 2.0;
            doublings += 1;
        }
        let mut lo = 0.0;
        let mut best = (hi, f64::INFINITY);
        for _ in 0..400 {
            let mid = if lo == 0.0 {
                hi / 16.0
            } else if hi > 4.0 * lo {
                (lo * hi).sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            let m = measure(mid)?;
            let err = (m - target).abs() / target;
            if err < best.1 {
                best = (mid, err);
            }
            if err <= SOLVE_REL_TOL {
                return Ok((mid, true));
            }
            if m < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if best.1 <= 1e3 * SOLVE_REL_TOL {
            Ok((best.0, true))
        } else {
            Err(Error::numerical(format!(
                "water level bisection stalled at relative error {:e}",
                best.1
            )))
        }
    }

    fn finish(&self, x: f64, bracketed: bool) -> Result<WaterfillSolution> {
        let mut sol = self.solution_at_level(x)?;
        sol.clipped |= !bracketed;
        Ok(sol)
    }

    /// Minimum-power allocation achieving `target_c` bit/s.
    pub fn solve_for_capacity(&self, target_c: f64) -> Result<WaterfillSolution> {
        if !(target_c >= 0.0) || !target_c.is_finite() {
            return Err(Error::domain(format!(
                "target capacity must be >= 0, got {target_c}"
            )));
        }
        if target_c == 0.0 {
            return Ok(self.zero_solution());
        }
        let (x, ok) = self.solve_level(target_c, |x| {
            let ln_k = self.fc.ln_an_min + x;
            self.capacity_over(ln_k, &self.bands_at(ln_k))
        })?;
        self.finish(x, ok)
    }

    /// Capacity-maximizing allocation of `budget_p` (psd units × Hz).
    pub fn solve_for_power(&self, budget_p: f64) -> Result<WaterfillSolution> {
        if !(budget_p >= 0.0) || !budget_p.is_finite() {
            return Err(Error::domain(format!(
                "power budget must be >= 0, got {budget_p}"
            )));
        }
        if budget_p == 0.0 {
            return Ok(self.zero_solution());
        }
        let (x, ok) = self.solve_level(budget_p, |x| {
            let ln_k = self.fc.ln_an_min + x;
            self.power_over(ln_k, &self.bands_at(ln_k))
        })?;
        self.finish(x, ok)
    }

    /// Allocation whose total occupied bandwidth is `delta_f` kHz.
    pub fn solve_for_bandwidth(&self, delta_f: f64) -> Result<WaterfillSolution> {
        let span = self.params.f_hi - self.params.f_lo;
        if !(delta_f > 0.0 && delta_f < span) {
            return Err(Error::domain(format!(
                "bandwidth must lie in (0, {span}), got {delta_f}"
            )));
        }
        let (x, ok) = self.solve_level(delta_f, |x| {
            Ok(self
                .bands_at(self.fc.ln_an_min + x)
                .iter()
                .map(Band::width)
                .sum())
        })?;
        self.finish(x, ok)
    }

    /// P ≈ Υ·Δf³/12 for a band of width `delta_f` kHz centered on f_c.
    pub fn narrowband_power(&self, delta_f: f64) -> Result<NarrowbandEstimate> {
        if !(delta_f > 0.0) || !delta_f.is_finite() {
            return Err(Error::domain(format!(
                "bandwidth must be > 0, got {delta_f}"
            )));
        }
        let upsilon = self.upsilon()?;
        let upsilon_hz = upsilon / (HZ_PER_KHZ * HZ_PER_KHZ);
        let df_hz = delta_f * HZ_PER_KHZ;
        let power = upsilon_hz * df_hz.powi(3) / 12.0;

        let half = 0.5 * delta_f;
        let f0 = self.fc.khz();
        let model_excess = upsilon * half * half / 2.0;
        let in_regime = [f0 - half, f0 + half].iter().all(|&f| {
            if !self.params.contains(f) {
                return false;
            }
            let excess = self.fc.an_min() * (self.ln_an(f) - self.fc.ln_an_min).exp_m1();
            (excess / model_excess - 1.0).abs() <= NARROWBAND_MODEL_TOL
        });
        Ok(NarrowbandEstimate {
            delta_f,
            upsilon,
            power,
            in_regime,
        })
    }
}

pub fn capacity_given_k(
    l: DistanceKm,
    k_level: f64,
    params: &ChannelParams,
) -> Result<(f64, Vec<Band>)> {
    Link::new(l, params)?.capacity_given_k(k_level)
}

pub fn solve_for_capacity(
    l: DistanceKm,
    target_c: f64,
    params: &ChannelParams,
) -> Result<WaterfillSolution> {
    Link::new(l, params)?.solve_for_capacity(target_c)
}

pub fn solve_for_power(
    l: DistanceKm,
    budget_p: f64,
    params: &ChannelParams,
) -> Result<WaterfillSolution> {
    Link::new(l, params)?.solve_for_power(budget_p)
}

pub fn narrowband_power(
    l: DistanceKm,
    delta_f: f64,
    params: &ChannelParams,
) -> Result<NarrowbandEstimate> {
    Link::new(l, params)?.narrowband_power(delta_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{an_product, FrequencyKHz};

    fn link(l: f64) -> Link {
        Link::new(DistanceKm::new(l).unwrap(), &ChannelParams::default()).unwrap()
    }

    #[test]
    fn level_at_minimum_gives_nothing() {
        let lk = link(10.0);
        let (c, bands) = lk.capacity_given_k(lk.center().an_min()).unwrap();
        assert_eq!(c, 0.0);
        assert!(bands.is_empty());
        let (c, _) = lk.capacity_given_k(0.5 * lk.center().an_min()).unwrap();
        assert_eq!(c, 0.0);
        assert!(lk.capacity_given_k(-1.0).is_err());
    }

    #[test]
    fn capacity_grows_with_level() {
        let lk = link(10.0);
        let k = 1.3 * lk.center().an_min();
        let (c1, _) = lk.capacity_given_k(k).unwrap();
        let (c2, _) = lk.capacity_given_k(2.0 * k).unwrap();
        assert!(c2 > c1 && c1 > 0.0);
    }

    #[test]
    fn band_edges_sit_on_the_water_level() {
        let lk = link(10.0);
        let p = ChannelParams::default();
        for mult in [1.01, 2.0, 100.0] {
            let k = mult * lk.center().an_min();
            let (_, bands) = lk.capacity_given_k(k).unwrap();
            assert_eq!(bands.len(), 1);
            for edge in [bands[0].f_min, bands[0].f_max] {
                let an = an_product(
                    DistanceKm::new(10.0).unwrap(),
                    FrequencyKHz::new(edge).unwrap(),
                    &p,
                )
                .unwrap();
                assert!((an - k).abs() / k < 1e-6);
            }
            assert!(bands[0].contains(lk.center().khz()));
        }
    }

    #[test]
    fn zero_targets() {
        let lk = link(5.0);
        let s = lk.solve_for_capacity(0.0).unwrap();
        assert_eq!(s.power, 0.0);
        assert!(s.bands.is_empty());
        let s = lk.solve_for_power(0.0).unwrap();
        assert_eq!(s.capacity, 0.0);
        assert!(lk.solve_for_capacity(-1.0).is_err());
        assert!(lk.solve_for_power(f64::NAN).is_err());
    }

    #[test]
    fn power_increases_with_capacity() {
        let lk = link(10.0);
        let powers: Vec<f64> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&c| lk.solve_for_capacity(c).unwrap().power)
            .collect();
        assert!(powers[0] < powers[1] && powers[1] < powers[2]);
    }

    #[test]
    fn capacity_round_trip() {
        for l in [1.0, 10.0, 100.0] {
            let lk = link(l);
            for c in [50.0, 5_000.0] {
                let s = lk.solve_for_capacity(c).unwrap();
                assert!((s.capacity / c - 1.0).abs() < 1e-9);
                let back = lk.solve_for_power(s.power).unwrap();
                assert!((back.capacity / c - 1.0).abs() < 1e-6, "l = {l}, c = {c}");
            }
        }
    }

    #[test]
    fn small_budget_gives_narrow_band_around_fc() {
        let lk = link(10.0);
        let target = lk.narrowband_power(0.05 * lk.center().khz()).unwrap().power;
        let s = lk.solve_for_power(target).unwrap();
        assert_eq!(s.bands.len(), 1);
        assert!(s.bands[0].contains(lk.center().khz()));
        assert!(s.total_bandwidth() < 0.06 * lk.center().khz());
        assert!(s.narrowband);
        assert!(!s.clipped);
    }

    #[test]
    fn huge_capacity_clips_band() {
        let lk = link(100.0);
        let s = lk.solve_for_capacity(1e7).unwrap();
        assert!(s.clipped);
        assert!(!s.narrowband);
        assert!((s.capacity / 1e7 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cubic_law_scales_exactly() {
        let lk = link(10.0);
        let a = lk.narrowband_power(0.01).unwrap();
        let b = lk.narrowband_power(0.02).unwrap();
        assert_eq!(b.power / a.power, 8.0);
        assert!(a.in_regime);
        assert!(!lk.narrowband_power(50.0).unwrap().in_regime);
    }

    #[test]
    fn narrow_band_is_nearly_symmetric_about_fc() {
        let lk = link(10.0);
        let fc = lk.center().khz();
        let s = lk.solve_for_bandwidth(0.02 * fc).unwrap();
        let b = s.bands[0];
        let half = 0.5 * b.width();
        assert!(((b.f_max - fc) / half - 1.0).abs() < 0.05);
        assert!(((fc - b.f_min) / half - 1.0).abs() < 0.05);
    }

    #[test]
    fn signal_psd_non_negative_on_band() {
        let lk = link(3.0);
        let s = lk.solve_for_capacity(2_000.0).unwrap();
        let ln_k = s.k_level.ln();
        for b in &s.bands {
            for i in 0..=100 {
                let f = b.f_min + b.width() * i as f64 / 100.0;
                assert!(lk.ln_an(f) <= ln_k + 1e-9);
            }
        }
    }
}
