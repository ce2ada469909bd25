//! Frequency bands and the distance-to-band plan used by low-power networks:
//! the system spectrum is cut into equal-width disjoint bands and each link is
//! placed in the band holding its optimal center frequency.

use serde::{Deserialize, Serialize};

use crate::channel::{optimal_center_frequency, ChannelParams, DistanceKm};
use crate::error::{Error, Result};

/// A frequency interval `[f_min, f_max]` in kHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub f_min: f64,
    pub f_max: f64,
}

impl Band {
    pub fn new(f_min: f64, f_max: f64) -> Result<Self> {
        if f_min.is_finite() && f_max.is_finite() && f_min >= 0.0 && f_min < f_max {
            Ok(Self { f_min, f_max })
        } else {
            Err(Error::domain(format!("invalid band [{f_min}, {f_max}]")))
        }
    }

    pub fn width(&self) -> f64 {
        self.f_max - self.f_min
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.f_min + self.f_max)
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_min && f <= self.f_max
    }
}

/// Contiguous equal-width partition of `[f_lo, f_hi]`; the last band takes
/// the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    pub bands: Vec<Band>,
    pub delta_f: f64,
}

pub fn make_plan(f_lo: f64, f_hi: f64, delta_f: f64) -> Result<BandPlan> {
    if !(f_lo.is_finite() && f_hi.is_finite() && f_lo >= 0.0 && f_lo < f_hi) {
        return Err(Error::domain(format!(
            "invalid plan interval [{f_lo}, {f_hi}]"
        )));
    }
    let span = f_hi - f_lo;
    if !(delta_f > 0.0 && delta_f <= span) {
        return Err(Error::domain(format!(
            "band width {delta_f} must lie in (0, {span}]"
        )));
    }
    // a ratio a few ulps above an integer is still that integer
    let count = ((span / delta_f) * (1.0 - 4.0 * f64::EPSILON))
        .ceil()
        .max(1.0) as usize;
    let bands = (0..count)
        .map(|i| {
            let lo = f_lo + delta_f * i as f64;
            let hi = if i + 1 == count {
                f_hi
            } else {
                f_lo + delta_f * (i + 1) as f64
            };
            Band {
                f_min: lo,
                f_max: hi,
            }
        })
        .collect();
    Ok(BandPlan { bands, delta_f })
}

impl BandPlan {
    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn f_lo(&self) -> f64 {
        self.bands.first().map_or(0.0, |b| b.f_min)
    }

    pub fn f_hi(&self) -> f64 {
        self.bands.last().map_or(0.0, |b| b.f_max)
    }

    /// Band holding `f` under half-open `[f_min, f_max)` intervals with the
    /// top band closed. Frequencies outside the plan clamp to the nearest edge
    /// band and are reported as clamped.
    pub fn locate(&self, f: f64) -> BandAssignment {
        let last = self.bands.len() - 1;
        if f < self.f_lo() {
            return BandAssignment {
                index: 0,
                clamped: true,
            };
        }
        if f > self.f_hi() {
            return BandAssignment {
                index: last,
                clamped: true,
            };
        }
        let index = self.bands.partition_point(|b| b.f_max <= f).min(last);
        BandAssignment {
            index,
            clamped: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandAssignment {
    pub index: usize,
    /// f_c(l) fell outside the plan and was clamped to an edge band.
    pub clamped: bool,
}

/// Band of a link of length `l`: the one containing f_c(l).
pub fn assign_band(l: DistanceKm, plan: &BandPlan, params: &ChannelParams) -> BandAssignment {
    let fc = optimal_center_frequency(l, params);
    plan.locate(fc.khz())
}

/// Per-band link counts n_m for a population of link distances.
pub fn band_populations(
    distances: &[f64],
    plan: &BandPlan,
    params: &ChannelParams,
) -> Result<Vec<usize>> {
    let mut counts = vec![0; plan.len()];
    for &l in distances {
        counts[assign_band(DistanceKm::new(l)?, plan, params).index] += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::optimal_center_frequency;

    #[test]
    fn plan_counts() {
        let p = make_plan(0.0, 100.0, 10.0).unwrap();
        assert_eq!(p.len(), 10);
        assert!(p.bands.iter().all(|b| (b.width() - 10.0).abs() < 1e-12));

        let p = make_plan(0.0, 95.0, 10.0).unwrap();
        assert_eq!(p.len(), 10);
        assert!((p.bands[9].width() - 5.0).abs() < 1e-12);

        let p = make_plan(0.1, 200.0, 0.1).unwrap();
        assert_eq!(p.len(), 1999);
    }

    #[test]
    fn plan_is_contiguous() {
        let p = make_plan(0.3, 97.1, 3.3).unwrap();
        for w in p.bands.windows(2) {
            assert_eq!(w[0].f_max, w[1].f_min);
        }
        assert_eq!(p.f_lo(), 0.3);
        assert_eq!(p.f_hi(), 97.1);
    }

    #[test]
    fn plan_rejects_bad_input() {
        assert!(make_plan(10.0, 5.0, 1.0).is_err());
        assert!(make_plan(0.0, 5.0, 0.0).is_err());
        assert!(make_plan(0.0, 5.0, 6.0).is_err());
    }

    #[test]
    fn edge_ties_resolve_half_open() {
        let p = make_plan(0.0, 100.0, 10.0).unwrap();
        // f exactly on the 20 kHz edge belongs to [20, 30)
        assert_eq!(p.locate(20.0).index, 2);
        assert_eq!(p.locate(19.999).index, 1);
        // top band is closed
        assert_eq!(
            p.locate(100.0),
            BandAssignment {
                index: 9,
                clamped: false
            }
        );
        assert_eq!(
            p.locate(150.0),
            BandAssignment {
                index: 9,
                clamped: true
            }
        );
    }

    #[test]
    fn longer_links_get_lower_bands() {
        let params = ChannelParams::default();
        let plan = make_plan(0.1, 50.1, 1.0).unwrap();
        let mut prev = usize::MAX;
        for l in [0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0] {
            let a = assign_band(DistanceKm::new(l).unwrap(), &plan, &params);
            assert!(!a.clamped);
            assert!(a.index <= prev);
            let fc = optimal_center_frequency(DistanceKm::new(l).unwrap(), &params).khz();
            assert!(plan.bands[a.index].f_min <= fc && fc < plan.bands[a.index].f_max);
            prev = a.index;
        }
    }

    #[test]
    fn populations_sum_to_link_count() {
        let params = ChannelParams::default();
        let plan = make_plan(0.1, 50.1, 5.0).unwrap();
        let ds = [0.2, 0.3, 1.0, 1.1, 8.0, 40.0, 90.0];
        let counts = band_populations(&ds, &plan, &params).unwrap();
        assert_eq!(counts.iter().sum::<usize>(), ds.len());
    }
}
