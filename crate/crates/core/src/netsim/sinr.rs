use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::deploy::Deployment;
use crate::band::BandPlan;
use crate::channel::{absorption_linear, noise_psd, ChannelParams, FrequencyKHz};
use crate::error::{Error, Result};
use crate::scaling::max_separation;

/// Narrow-band propagation constants: absorption and noise at the band center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandMedium {
    /// a(f) per km.
    pub absorption: f64,
    /// N(f), linear psd.
    pub noise: f64,
}

/// Propagation for every band in use; attenuation of a band is taken at its
/// center frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub alpha: f64,
    pub l_ref: f64,
    pub bands: Vec<BandMedium>,
}

impl Medium {
    /// One band with a prescribed absorption value, l_ref = 1 m.
    pub fn narrowband(alpha: f64, a_f: f64, noise: f64) -> Result<Self> {
        let m = Self {
            alpha,
            l_ref: 0.001,
            bands: vec![BandMedium {
                absorption: a_f,
                noise,
            }],
        };
        m.validate()?;
        Ok(m)
    }

    /// Thorp absorption and ambient noise evaluated at each plan band center.
    pub fn from_plan(params: &ChannelParams, plan: &BandPlan) -> Result<Self> {
        params.validate()?;
        let bands = plan
            .bands
            .iter()
            .map(|b| {
                let f = FrequencyKHz::new(b.center())?;
                Ok(BandMedium {
                    absorption: absorption_linear(f),
                    noise: noise_psd(f, params).get(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Self {
            alpha: params.alpha,
            l_ref: params.l_ref,
            bands,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::domain(format!(
                "alpha must be >= 1, got {}",
                self.alpha
            )));
        }
        if !(self.l_ref > 0.0) {
            return Err(Error::domain("l_ref must be > 0"));
        }
        if self.bands.is_empty() {
            return Err(Error::domain("medium needs at least one band"));
        }
        for b in &self.bands {
            if !(b.absorption >= 1.0 && b.absorption.is_finite()) || !(b.noise >= 0.0) {
                return Err(Error::domain(format!("invalid band medium {b:?}")));
            }
        }
        Ok(())
    }

    /// A(l, f_band) = (l / l_ref)^α · a^l.
    pub fn attenuation(&self, band: usize, l: f64) -> f64 {
        (l / self.l_ref).powf(self.alpha) * self.bands[band].absorption.powf(l)
    }

    /// γ_α·(β+1)/β for a band: the per-slot budget on Σ l^α a^l.
    pub fn sum_budget(&self, band: usize, beta: f64) -> f64 {
        let d = max_separation();
        d.powf(self.alpha) * self.bands[band].absorption.powf(d) * (beta + 1.0) / beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transmission {
    pub tx: usize,
    pub rx: usize,
    pub band: usize,
    /// Transmit psd P_i(f) over the band.
    pub power: f64,
}

/// Transmissions sharing one time slot.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransmissionSet {
    pub members: Vec<Transmission>,
    pub slot: usize,
}

impl TransmissionSet {
    pub fn new(members: Vec<Transmission>, slot: usize) -> Result<Self> {
        for (i, m) in members.iter().enumerate() {
            if m.tx == m.rx {
                return Err(Error::domain(format!("transmission {i} sends to itself")));
            }
            if members[..i]
                .iter()
                .any(|o| o.tx == m.tx && o.band == m.band)
            {
                return Err(Error::domain(format!(
                    "node {} transmits twice in band {}",
                    m.tx, m.band
                )));
            }
        }
        Ok(Self { members, slot })
    }
}

/// SINR at each member's receiver; interference comes from the other members
/// in the same band.
pub fn sinr(ts: &TransmissionSet, d: &Deployment, medium: &Medium) -> Vec<f64> {
    ts.members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let signal = m.power / medium.attenuation(m.band, d.distance(m.tx, m.rx));
            let interference: f64 = ts
                .members
                .iter()
                .enumerate()
                .filter(|&(k, o)| k != i && o.band == m.band)
                .map(|(_, o)| o.power / medium.attenuation(o.band, d.distance(o.tx, m.rx)))
                .sum();
            let denom = medium.bands[m.band].noise + interference;
            if denom.is_infinite() {
                0.0
            } else {
                signal / denom
            }
        })
        .collect()
}

/// Whether each member meets SINR ≥ β.
pub fn sinr_feasible(
    ts: &TransmissionSet,
    d: &Deployment,
    medium: &Medium,
    beta: f64,
) -> Vec<bool> {
    sinr(ts, d, medium).into_iter().map(|s| s >= beta).collect()
}

pub fn all_feasible(ts: &TransmissionSet, d: &Deployment, medium: &Medium, beta: f64) -> bool {
    sinr(ts, d, medium).into_iter().all(|s| s >= beta)
}

/// Smallest per-band slack `γ_α(β+1)/β − Σ l^α a^l` (distances in km) over
/// all bands of the medium. Non-negative for every SINR-feasible set.
pub fn verify_sum_inequality(
    ts: &TransmissionSet,
    d: &Deployment,
    medium: &Medium,
    beta: f64,
) -> f64 {
    (0..medium.bands.len())
        .map(|band| {
            let a = medium.bands[band].absorption;
            let used: f64 = ts
                .members
                .iter()
                .filter(|m| m.band == band)
                .map(|m| {
                    let l = d.distance(m.tx, m.rx);
                    l.powf(medium.alpha) * a.powf(l)
                })
                .sum();
            medium.sum_budget(band, beta) - used
        })
        .fold(f64::INFINITY, f64::min)
}

/// [`verify_sum_inequality`] that reports a negative margin as an error.
pub fn check_sum_inequality(
    ts: &TransmissionSet,
    d: &Deployment,
    medium: &Medium,
    beta: f64,
) -> Result<f64> {
    let margin = verify_sum_inequality(ts, d, medium, beta);
    if margin < 0.0 {
        Err(Error::DerivationViolation { margin })
    } else {
        Ok(margin)
    }
}

/// Random SINR-feasible set in `band`: up to `max_size` node-disjoint pairs
/// with random powers (0–40 dB above the noise-limited minimum), pruned by
/// repeatedly dropping the member with the worst SINR. Half of the receivers
/// are drawn from the transmitter's three nearest free nodes, which keeps
/// multi-link sets common after pruning.
pub fn random_feasible_set<R: Rng + ?Sized>(
    rng: &mut R,
    d: &Deployment,
    medium: &Medium,
    beta: f64,
    band: usize,
    max_size: usize,
) -> TransmissionSet {
    let mut free: Vec<usize> = (0..d.len()).collect();
    free.shuffle(rng);
    let k = rng.gen_range(1..=max_size.min(d.len() / 2).max(1));
    let noise = medium.bands[band].noise;
    let mut members: Vec<Transmission> = Vec::with_capacity(k);
    while members.len() < k && free.len() >= 2 {
        let tx = free.pop().expect("at least two free nodes");
        let pick = if rng.gen_bool(0.5) {
            let mut near: Vec<usize> = (0..free.len()).collect();
            near.sort_by(|&a, &b| d.distance(tx, free[a]).total_cmp(&d.distance(tx, free[b])));
            near[rng.gen_range(0..near.len().min(3))]
        } else {
            rng.gen_range(0..free.len())
        };
        let rx = free.swap_remove(pick);
        let floor =
            beta * noise.max(f64::MIN_POSITIVE) * medium.attenuation(band, d.distance(tx, rx));
        members.push(Transmission {
            tx,
            rx,
            band,
            power: floor * 10f64.powf(rng.gen_range(0.0..4.0)),
        });
    }
    loop {
        let ts = TransmissionSet { members, slot: 0 };
        let s = sinr(&ts, d, medium);
        let worst = s
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (i, v));
        match worst {
            Some((i, v)) if v < beta => {
                members = ts.members;
                members.swap_remove(i);
            }
            _ => return ts,
        }
    }
}
