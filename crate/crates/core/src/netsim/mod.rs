//! Monte Carlo check of the narrow-band bound against the SINR model.
//!
//! Nodes are placed in the unit-area disk, transmission sets are tested for
//! SINR feasibility, the per-slot distance budget
//! `Σ l^α a^l ≤ γ_α (β+1)/β` is checked on every feasible set, and the
//! transport achieved by a greedy direct-link schedule is compared with the
//! closed-form bound.
//!
//! The slot-based bit accounting here is one concrete realization of the
//! per-bit, per-hop bookkeeping behind the bound: a slot lasts one second and
//! every active hop carries `W` bits in it.

mod deploy;
mod schedule;
mod sinr;

pub use deploy::{deploy, disk_radius, DeployMode, Deployment, Point};
pub use schedule::{
    direct_flows, greedy_feasible_set, greedy_schedule, measure_transport, Flow, TransportTally,
};
pub use sinr::{
    all_feasible, check_sum_inequality, random_feasible_set, sinr, sinr_feasible,
    verify_sum_inequality, BandMedium, Medium, Transmission, TransmissionSet,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::{bound_fixed_narrowband, NarrowbandScenario};

/// One simulation run on a single narrow band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// a(f) of the band, per km.
    pub a_f: f64,
    /// Rate W per active hop, bit/s.
    pub w_rate: f64,
    /// Horizon T in one-second slots.
    pub slots: usize,
    pub seed: u64,
    pub mode: DeployMode,
    /// Extra random feasible sets drawn to probe the distance budget.
    pub random_sets: usize,
    /// Noise psd in the band.
    pub noise: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 16,
            alpha: 1.0,
            beta: 2.0,
            a_f: 10.0,
            w_rate: 1.0,
            slots: 10,
            seed: 0,
            mode: DeployMode::UniformRandom,
            random_sets: 200,
            noise: 1.0,
        }
    }
}

/// Outcome of one run; serialized one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub a_f: f64,
    pub margin_min: f64,
    pub transport_achieved: f64,
    pub transport_bound: f64,
}

impl RunRecord {
    /// The run contradicts the derivation: a feasible set overdrew the
    /// distance budget or the schedule beat the bound.
    pub fn violates_bound(&self) -> bool {
        self.margin_min < 0.0 || self.transport_achieved > self.transport_bound
    }
}

pub fn run(cfg: &SimConfig) -> Result<RunRecord> {
    if cfg.slots == 0 {
        return Err(Error::domain("simulation needs at least one slot"));
    }
    let medium = Medium::narrowband(cfg.alpha, cfg.a_f, cfg.noise)?;
    let d = deploy(cfg.n, cfg.mode, cfg.seed)?;
    let bound = bound_fixed_narrowband(&NarrowbandScenario {
        n: cfg.n as u64,
        alpha: cfg.alpha,
        beta: cfg.beta,
        w_rate: cfg.w_rate,
        a_f: cfg.a_f,
    })?;

    let schedule = greedy_schedule(&d, &medium, cfg.beta, 0, cfg.slots);
    let tally = measure_transport(&schedule, &d, &direct_flows(&d), cfg.w_rate, 1.0, cfg.slots)?;

    let mut margin_min = schedule
        .iter()
        .map(|s| verify_sum_inequality(s, &d, &medium, cfg.beta))
        .fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    for _ in 0..cfg.random_sets {
        let ts = random_feasible_set(&mut rng, &d, &medium, cfg.beta, 0, cfg.n / 2);
        margin_min = margin_min.min(verify_sum_inequality(&ts, &d, &medium, cfg.beta));
    }

    Ok(RunRecord {
        seed: cfg.seed,
        n: cfg.n,
        alpha: cfg.alpha,
        beta: cfg.beta,
        a_f: cfg.a_f,
        margin_min,
        transport_achieved: tally.transport,
        transport_bound: bound.transport_bound,
    })
}
