use alloc::vec::Vec;

use crate::model::InductanceSpectrum;
use crate::{Error, Result};

/// Reference points with `|a| < NEAR_ZERO_FRACTION * max|a|` are excluded.
pub const NEAR_ZERO_FRACTION: f64 = 1e-3;

/// Relative discrepancy of spectrum `b` against reference `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// `|a - b| / |a|` per grid point; `None` where `a` is too close to zero.
    pub per_frequency_rel_error: Vec<Option<f64>>,
    /// Largest entry inside the band.
    pub max_rel_error: f64,
    /// First and last grid frequency that entered the statistic.
    pub max_rel_error_band: (f64, f64),
    pub band_filter: Option<(f64, f64)>,
    /// Frequency at which `max_rel_error` occurs.
    pub max_at_frequency: Option<f64>,
    /// Points skipped by the near-zero guard, whole grid.
    pub excluded_near_zero: usize,
    pub points_in_band: usize,
}

fn same_frequency(x: f64, y: f64) -> bool {
    libm::fabs(x - y) <= 1e-12 * libm::fabs(x).max(libm::fabs(y))
}

/// Compares `b` against the reference `a`, optionally restricting the
/// maximum to `band = (lo, hi)` inclusive.
///
/// The metric is not symmetric: swapping the arguments changes the
/// denominator.
pub fn compare(
    a: &InductanceSpectrum,
    b: &InductanceSpectrum,
    band: Option<(f64, f64)>,
) -> Result<EquivalenceReport> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch("spectra have different lengths"));
    }
    if !a
        .frequencies()
        .iter()
        .zip(b.frequencies())
        .all(|(&x, &y)| same_frequency(x, y))
    {
        return Err(Error::GridMismatch("frequency grids differ"));
    }
    if a.is_normalized() != b.is_normalized() {
        return Err(Error::GridMismatch("one spectrum is normalized and the other is not"));
    }
    if let Some((lo, hi)) = band {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid("band", "needs finite lo <= hi", lo));
        }
    }

    let peak = a.delta_l().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let guard = NEAR_ZERO_FRACTION * peak;
    let mut excluded = 0;
    let per_frequency: Vec<Option<f64>> = a
        .delta_l()
        .iter()
        .zip(b.delta_l())
        .map(|(&x, &y)| {
            if x == y {
                Some(0.0)
            } else if x.norm() < guard || x.norm() == 0.0 {
                excluded += 1;
                None
            } else {
                Some((x - y).norm() / x.norm())
            }
        })
        .collect();

    let in_band = |f: f64| band.is_none_or(|(lo, hi)| f >= lo && f <= hi);
    let mut points_in_band = 0;
    let mut span: Option<(f64, f64)> = None;
    let mut max: Option<(f64, f64)> = None;
    for (&f, e) in a.frequencies().iter().zip(&per_frequency) {
        if !in_band(f) {
            continue;
        }
        points_in_band += 1;
        if let Some(e) = *e {
            span = Some(span.map_or((f, f), |(lo, _)| (lo, f)));
            if max.is_none_or(|(m, _)| e > m) {
                max = Some((e, f));
            }
        }
    }
    if points_in_band == 0 {
        return Err(Error::GridMismatch("no grid frequency falls inside the band"));
    }
    Ok(EquivalenceReport {
        per_frequency_rel_error: per_frequency,
        max_rel_error: max.map_or(0.0, |(m, _)| m),
        max_rel_error_band: span.unwrap_or((f64::NAN, f64::NAN)),
        band_filter: band,
        max_at_frequency: max.map(|(_, f)| f),
        excluded_near_zero: excluded,
        points_in_band,
    })
}
