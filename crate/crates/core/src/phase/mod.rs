//! Periodic stationary phase, the Ϝ-function and the Step-3 main terms.

mod amplitude;
mod digamma;
mod main_term;
mod outside;
mod report;
mod vdc;

pub use amplitude::PeriodicAmplitude;
pub use digamma::{digamma_f, Digamma, MAX_PANELS};
pub use main_term::{
    main_term, taylor_remainder, FrequencyModulus, FrequencyRegion, MainTerm, MainTermInput, TaylorRemainder,
};
pub use outside::{
    avg_trans_bound, calibrate, outside_average, periodic_amplitudes, violation_rate, AvgTransBound, AvgTransSetup,
    OutsideAverage,
};
pub use report::{write_bound_records, BoundRecord};
pub use vdc::{vdc_estimate, VdcEstimate};
