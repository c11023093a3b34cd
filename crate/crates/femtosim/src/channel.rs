//! Log-distance propagation with lognormal shadowing and Rayleigh fading.
//!
//! A received power is the product `P_T · P_0 · d^(−η) · ξ · Z` of the
//! transmit power, a reference gain, the distance decay, a lognormal
//! shadowing factor, and an exponential fast-fading factor, with an extra
//! multiplicative penalty per wall crossed. Three link classes bind the
//! constants: the serving indoor link, cross-femtocell links, and macrocell
//! downlinks. Everything is carried in linear watts; decibels appear only
//! at the interfaces.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use thiserror::Error;

/// Errors from propagation evaluation and parameter validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    /// The path loss law diverges at zero distance.
    #[error("link distance must be positive, got {d_m} m")]
    NonPositiveDistance { d_m: f64 },
    /// A channel parameter violated its invariant.
    #[error("channel parameter {field} is invalid: {detail}")]
    InvalidParameter { field: &'static str, detail: String },
}

/// The three modeled link classes, each binding one `(P_0, η, σ)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    /// User to its own serving femto access point, fully indoors. Shadowing
    /// is negligible on this short link and is forced to one.
    FemtoOwn,
    /// User to a neighboring femto access point, through house walls.
    FemtoCross,
    /// User to a macrocell base station.
    MacroDown,
}

/// Propagation constants for all three link classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Reference gain of femto links at 1 m (dimensionless, linear).
    pub p0_femto: f64,
    /// Fitted intercept of the macro-to-indoor decay law (dimensionless,
    /// linear). This is a model fit constant absorbing base-station antenna
    /// gain and outdoor-to-indoor effects, not a physical 1 m gain.
    pub p0_macro: f64,
    /// Path loss exponent of the serving indoor link.
    pub eta1: f64,
    /// Path loss exponent of cross-femtocell links.
    pub eta2: f64,
    /// Path loss exponent of macrocell downlinks.
    pub eta3: f64,
    pub shadow_sigma_femto_db: f64,
    pub shadow_sigma_macro_db: f64,
    /// Penetration loss per wall in dB.
    pub wall_loss_db: f64,
    pub carrier_mhz: f64,
    pub bs_height_m: f64,
    pub fap_height_m: f64,
}

impl ChannelParams {
    /// Checks the structural invariants: exponents at least 2, nonnegative
    /// deviations and wall loss, positive carrier and reference gains.
    pub fn validate(&self) -> Result<(), ChannelError> {
        let positive = [
            ("p0_femto", self.p0_femto),
            ("p0_macro", self.p0_macro),
            ("carrier_mhz", self.carrier_mhz),
            ("bs_height_m", self.bs_height_m),
            ("fap_height_m", self.fap_height_m),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ChannelError::InvalidParameter {
                    field,
                    detail: format!("must be positive and finite, got {value}"),
                });
            }
        }
        let exponents = [("eta1", self.eta1), ("eta2", self.eta2), ("eta3", self.eta3)];
        for (field, value) in exponents {
            if !(value >= 2.0) || !value.is_finite() {
                return Err(ChannelError::InvalidParameter {
                    field,
                    detail: format!("path loss exponent must be at least 2, got {value}"),
                });
            }
        }
        let nonnegative = [
            ("shadow_sigma_femto_db", self.shadow_sigma_femto_db),
            ("shadow_sigma_macro_db", self.shadow_sigma_macro_db),
            ("wall_loss_db", self.wall_loss_db),
        ];
        for (field, value) in nonnegative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ChannelError::InvalidParameter {
                    field,
                    detail: format!("must be nonnegative and finite, got {value}"),
                });
            }
        }
        Ok(())
    }

    fn p0(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::FemtoOwn | LinkClass::FemtoCross => self.p0_femto,
            LinkClass::MacroDown => self.p0_macro,
        }
    }

    fn eta(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::FemtoOwn => self.eta1,
            LinkClass::FemtoCross => self.eta2,
            LinkClass::MacroDown => self.eta3,
        }
    }

    /// Shadowing deviation for a link class; the serving indoor link has
    /// none by convention.
    pub fn shadow_sigma_db(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::FemtoOwn => 0.0,
            LinkClass::FemtoCross => self.shadow_sigma_femto_db,
            LinkClass::MacroDown => self.shadow_sigma_macro_db,
        }
    }
}

/// One random realization of a link: shadowing and fast fading factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRealization {
    /// Linear lognormal shadowing factor ξ.
    pub xi: f64,
    /// Linear exponential fast-fading factor Z.
    pub z: f64,
}

impl LinkRealization {
    /// The deterministic realization with both factors at their reference
    /// values (ξ = 1, Z = 1).
    pub const UNIT: LinkRealization = LinkRealization { xi: 1.0, z: 1.0 };

    /// Draws a realization for a link of the given class: first the
    /// shadowing factor, then the fading factor.
    pub fn sample<R: Rng>(class: LinkClass, params: &ChannelParams, rng: &mut R) -> LinkRealization {
        LinkRealization {
            xi: sample_shadowing(params.shadow_sigma_db(class), rng),
            z: sample_fast_fading(rng),
        }
    }
}

/// Free-space reference gain at 1 m for the given carrier, `(λ / 4π)²`.
///
/// This is the default femto-link `P_0`.
pub fn free_space_reference_gain(carrier_mhz: f64) -> f64 {
    let wavelength_m = 299_792_458.0 / (carrier_mhz * 1e6);
    let ratio = wavelength_m / (4.0 * std::f64::consts::PI);
    ratio * ratio
}

/// Deterministic part of the received power: `P_0 · d^(−η)` with the wall
/// penalty, for shadowing and fading fixed at one.
pub fn mean_path_gain(
    class: LinkClass,
    d_m: f64,
    walls: u32,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    if !(d_m > 0.0) || !d_m.is_finite() {
        return Err(ChannelError::NonPositiveDistance { d_m });
    }
    let wall_factor = 10f64.powf(-(f64::from(walls) * params.wall_loss_db) / 10.0);
    Ok(params.p0(class) * d_m.powf(-params.eta(class)) * wall_factor)
}

/// Draws a linear lognormal shadowing factor `ξ = 10^(G/10)` with `G`
/// zero-mean Gaussian of the given deviation.
///
/// A draw is consumed even for `sigma_db = 0`, where the result is exactly
/// one; this keeps streams aligned across configurations.
pub fn sample_shadowing<R: Rng>(sigma_db: f64, rng: &mut R) -> f64 {
    let gauss: f64 = StandardNormal.sample(rng);
    10f64.powf(sigma_db * gauss / 10.0)
}

/// Draws a unit-mean exponential fast-fading power factor (Rayleigh
/// envelope).
pub fn sample_fast_fading<R: Rng>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Full received power for one link realization.
///
/// The shadowing factor is forced to one for the serving indoor link
/// regardless of the realization, matching the link-class convention.
pub fn received_power(
    p_tx_w: f64,
    class: LinkClass,
    d_m: f64,
    walls: u32,
    params: &ChannelParams,
    realization: &LinkRealization,
) -> Result<f64, ChannelError> {
    let xi = match class {
        LinkClass::FemtoOwn => 1.0,
        _ => realization.xi,
    };
    Ok(p_tx_w * mean_path_gain(class, d_m, walls, params)? * xi * realization.z)
}
