//! Exact interval arithmetic over frequency bands.
//!
//! Frequencies are stored as integer kilohertz so that set operations and
//! width bookkeeping are exact: the disjointness and coverage identities the
//! allocation schemes rely on hold with zero tolerance instead of floating
//! point wiggle. Megahertz appear only at the constructors and accessors.

use std::fmt;
use thiserror::Error;

/// Kilohertz per megahertz, the only unit conversion used internally.
pub const KHZ_PER_MHZ: i64 = 1_000;

/// Errors from band construction and partitioning.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    /// Band endpoints were given in decreasing order.
    #[error("band endpoints reversed: lo {lo_khz} kHz > hi {hi_khz} kHz")]
    ReversedBand { lo_khz: i64, hi_khz: i64 },
    /// A megahertz endpoint was NaN or infinite.
    #[error("band endpoint is not finite: {value}")]
    NonFiniteBound { value: f64 },
    /// partition_equal was asked for zero parts.
    #[error("cannot partition a band into 0 parts")]
    ZeroParts,
    /// partition_equal was asked to split an empty band.
    #[error("cannot partition an empty band")]
    EmptyBand,
}

/// A half-open frequency interval `[lo, hi)` in integer kilohertz.
///
/// The empty band is a distinguished value with width 0; all empty bands
/// compare equal regardless of how they were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Band {
    lo_khz: i64,
    hi_khz: i64,
}

impl Band {
    /// The empty band.
    pub const EMPTY: Band = Band { lo_khz: 0, hi_khz: 0 };

    /// Builds a band from kilohertz endpoints. `lo == hi` yields the empty
    /// band; `lo > hi` is an error.
    pub fn from_khz(lo_khz: i64, hi_khz: i64) -> Result<Band, SpectrumError> {
        if lo_khz > hi_khz {
            return Err(SpectrumError::ReversedBand { lo_khz, hi_khz });
        }
        if lo_khz == hi_khz {
            return Ok(Band::EMPTY);
        }
        Ok(Band { lo_khz, hi_khz })
    }

    /// Builds a band from megahertz endpoints, rounding to the nearest
    /// kilohertz.
    pub fn from_mhz(lo_mhz: f64, hi_mhz: f64) -> Result<Band, SpectrumError> {
        for value in [lo_mhz, hi_mhz] {
            if !value.is_finite() {
                return Err(SpectrumError::NonFiniteBound { value });
            }
        }
        let lo = (lo_mhz * KHZ_PER_MHZ as f64).round() as i64;
        let hi = (hi_mhz * KHZ_PER_MHZ as f64).round() as i64;
        Band::from_khz(lo, hi)
    }

    /// Lower edge in kilohertz.
    pub fn lo_khz(&self) -> i64 {
        self.lo_khz
    }

    /// Upper edge in kilohertz.
    pub fn hi_khz(&self) -> i64 {
        self.hi_khz
    }

    /// Width in kilohertz.
    pub fn width_khz(&self) -> i64 {
        self.hi_khz - self.lo_khz
    }

    /// Width in hertz, for throughput formulas.
    pub fn width_hz(&self) -> f64 {
        self.width_khz() as f64 * 1e3
    }

    pub fn is_empty(&self) -> bool {
        self.lo_khz == self.hi_khz
    }

    /// Whether the frequency `khz` lies inside the half-open interval.
    pub fn contains_khz(&self, khz: i64) -> bool {
        self.lo_khz <= khz && khz < self.hi_khz
    }

    /// Whether two bands share any frequency.
    pub fn overlaps(&self, other: &Band) -> bool {
        self.lo_khz.max(other.lo_khz) < self.hi_khz.min(other.hi_khz)
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "(empty)")
        } else {
            write!(f, "[{},{})", self.lo_khz, self.hi_khz)
        }
    }
}

/// An ordered set of pairwise-disjoint, non-adjacent bands.
///
/// Construction normalizes the input: empty members are dropped, members are
/// sorted by lower edge, and overlapping or touching intervals are merged, so
/// two sets covering the same frequencies are always structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BandSet {
    bands: Vec<Band>,
}

impl BandSet {
    /// The empty set.
    pub fn empty() -> BandSet {
        BandSet { bands: Vec::new() }
    }

    /// Builds a normalized set from arbitrary bands.
    pub fn from_bands<I: IntoIterator<Item = Band>>(bands: I) -> BandSet {
        let mut members: Vec<Band> = bands.into_iter().filter(|b| !b.is_empty()).collect();
        members.sort();
        let mut normalized: Vec<Band> = Vec::with_capacity(members.len());
        for band in members {
            match normalized.last_mut() {
                Some(last) if band.lo_khz <= last.hi_khz => {
                    last.hi_khz = last.hi_khz.max(band.hi_khz);
                }
                _ => normalized.push(band),
            }
        }
        BandSet { bands: normalized }
    }

    /// The member bands, sorted and disjoint.
    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// Total width in kilohertz.
    pub fn width_khz(&self) -> i64 {
        self.bands.iter().map(Band::width_khz).sum()
    }

    /// Total width in hertz.
    pub fn width_hz(&self) -> f64 {
        self.width_khz() as f64 * 1e3
    }

    /// Whether the frequency `khz` lies in any member band.
    pub fn contains_khz(&self, khz: i64) -> bool {
        self.bands.iter().any(|b| b.contains_khz(khz))
    }

    /// Exact set intersection.
    pub fn intersect(&self, other: &BandSet) -> BandSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.bands.len() && j < other.bands.len() {
            let a = &self.bands[i];
            let b = &other.bands[j];
            let lo = a.lo_khz.max(b.lo_khz);
            let hi = a.hi_khz.min(b.hi_khz);
            if lo < hi {
                out.push(Band { lo_khz: lo, hi_khz: hi });
            }
            if a.hi_khz <= b.hi_khz {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces of disjoint inputs are already sorted and separated.
        BandSet { bands: out }
    }

    /// Exact set union with adjacent-interval merging.
    pub fn unite(&self, other: &BandSet) -> BandSet {
        BandSet::from_bands(self.bands.iter().chain(other.bands.iter()).copied())
    }

    /// Whether the sets share any frequency.
    pub fn overlaps(&self, other: &BandSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.bands.len() && j < other.bands.len() {
            let a = &self.bands[i];
            let b = &other.bands[j];
            if a.overlaps(b) {
                return true;
            }
            if a.hi_khz <= b.hi_khz {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    /// Whether the set shares any frequency with a single band.
    pub fn overlaps_band(&self, band: &Band) -> bool {
        self.bands.iter().any(|own| own.overlaps(band))
    }

    /// Whether every frequency of `self` also lies in `other`.
    pub fn is_subset_of(&self, other: &BandSet) -> bool {
        self.intersect(other) == *self
    }
}

impl From<Band> for BandSet {
    fn from(band: Band) -> BandSet {
        BandSet::from_bands([band])
    }
}

impl fmt::Display for BandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bands.is_empty() {
            return write!(f, "(empty)");
        }
        for (idx, band) in self.bands.iter().enumerate() {
            if idx > 0 {
                write!(f, "+")?;
            }
            write!(f, "{band}")?;
        }
        Ok(())
    }
}

/// Splits a nonempty band into `n` contiguous sub-bands of equal width.
///
/// When the width is not divisible by `n` after kilohertz quantization, the
/// last sub-band absorbs the remainder (at most `n - 1` kHz).
pub fn partition_equal(band: Band, n: usize) -> Result<Vec<Band>, SpectrumError> {
    if n == 0 {
        return Err(SpectrumError::ZeroParts);
    }
    if band.is_empty() {
        return Err(SpectrumError::EmptyBand);
    }
    let step = band.width_khz() / n as i64;
    let mut parts = Vec::with_capacity(n);
    for k in 0..n as i64 {
        let lo = band.lo_khz() + k * step;
        let hi = if k == n as i64 - 1 {
            band.hi_khz()
        } else {
            lo + step
        };
        parts.push(Band { lo_khz: lo, hi_khz: hi });
    }
    Ok(parts)
}
