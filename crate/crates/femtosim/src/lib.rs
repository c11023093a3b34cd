//! System-level simulator for integrated femtocell/macrocell networks.
//!
//! The library evaluates five downlink frequency-allocation schemes for
//! femtocells overlaid by a macrocellular network: a fully shared band, a
//! dedicated femto band, a sub-band carved out of the macro spectrum, and two
//! reuse-3 schemes (a static balanced split and a self-organizing dynamic
//! scheme that separates femtocell center and edge spectrum). Deployments are
//! randomized over a hexagonal macrocell cluster and compared through
//! signal-to-interference ratio, outage probability, and Shannon throughput.
//!
//! Modules mirror the simulation pipeline:
//!
//! * [`spectrum`] — exact integer-kHz band interval arithmetic.
//! * [`deployment`] — cluster geometry, random femtocell placement, the
//!   neighbor graph, and wall bookkeeping.
//! * [`channel`] — log-distance path loss with lognormal shadowing and
//!   Rayleigh fast fading.
//! * [`schemes`] — allocation plans for all five schemes, including the
//!   dynamic edge-band selection engine with install/remove/resize events.
//! * [`analysis`] — interference sums, outage probability (Monte Carlo and
//!   closed form), and throughput estimation.
//! * [`config`] / [`sweep`] — scenario configuration, density sweeps, and
//!   CSV emission.
//!
//! All randomness flows through explicitly seeded, splittable streams so
//! every result is reproducible bit-for-bit, including under concurrent
//! execution of Monte Carlo trials.

pub mod analysis;
pub mod channel;
pub mod config;
pub mod deployment;
pub mod rng;
pub mod schemes;
pub mod spectrum;
pub mod sweep;

pub use config::{ConfigError, ScenarioConfig};
pub use sweep::{run_sweep, SweepError, SweepResult};
