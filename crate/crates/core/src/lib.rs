//! Numerical toolkit for underwater acoustic networks.
//!
//! The crate covers the frequency-dependent acoustic channel (Thorp absorption,
//! ambient noise, attenuation), single-link waterfilling, the transport-capacity
//! upper bounds for arbitrarily deployed networks in a unit-area disk, the
//! distance-to-band mapping used by low-power networks, and a small Monte Carlo
//! harness that checks the bounds against the SINR physical model.
//!
//! Units throughout: distances in km, frequencies in kHz, absorption per km,
//! noise psd in linear µPa²/Hz, rates in bit/s.

pub mod band;
pub mod channel;
pub mod error;
pub mod netsim;
pub mod numeric;
pub mod scaling;
pub mod waterfill;

pub use band::{assign_band, band_populations, make_plan, Band, BandAssignment, BandPlan};
pub use channel::{
    absorption_db_per_km, absorption_linear, an_product, an_second_derivative, attenuation,
    noise_psd, optimal_center_frequency, CenterFrequency, ChannelParams, DistanceKm, FrequencyKHz,
    PsdLinear,
};
pub use error::{Error, Result};
pub use scaling::{
    bound_curve, bound_direct_per_band, bound_fixed_narrowband, bound_multiband, bound_wideband,
    lambert_w0, log_spaced_counts, BoundResult, CurveFamily, CurveRow, DirectScenario,
    MultiBandScenario, NarrowbandScenario, WidebandScenario,
};
pub use waterfill::{
    capacity_given_k, narrowband_power, solve_for_capacity, solve_for_power, Link,
    NarrowbandEstimate, WaterfillSolution,
};

/// Hertz per kilohertz; rates and powers integrate over Hz while the channel
/// model is parameterized in kHz.
pub const HZ_PER_KHZ: f64 = 1e3;
