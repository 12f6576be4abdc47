//! Compact spectra as finite unions of closed intervals.
//!
//! A [`Spectrum`] is kept normalized: intervals are sorted, pairwise disjoint,
//! and non-degenerate. Touching intervals are merged on construction, which
//! leaves the measure unchanged and keeps the kernel formulas free of
//! zero-length segments. All frequencies are in radians per unit length, with
//! the Fourier transform fixed to `f^(t) = (2*pi)^(-1/2) Int e^{itx} f(x) dx`,
//! so `PW_[-pi,pi]` corresponds to unit-spaced sinc interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized finite union of closed intervals on the frequency line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Spectrum {
    intervals: Vec<(f64, f64)>,
}

impl Spectrum {
    /// Builds a spectrum from raw interval pairs, sorting and merging
    /// overlapping or touching inputs.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidSpectrum("empty interval list".into()));
        }
        for &(l, r) in raw {
            if !(l.is_finite() && r.is_finite()) {
                return Err(Error::InvalidSpectrum(format!(
                    "non-finite interval ({l}, {r})"
                )));
            }
            if l >= r {
                return Err(Error::InvalidSpectrum(format!(
                    "degenerate interval ({l}, {r}): left must be < right"
                )));
            }
        }
        let mut sorted: Vec<(f64, f64)> = raw.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (l, r) in sorted {
            match merged.last_mut() {
                // Closed intervals: touching endpoints merge as well.
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        Ok(Spectrum { intervals: merged })
    }

    /// Single interval `[left, right]`.
    pub fn interval(left: f64, right: f64) -> Result<Self> {
        Self::normalize(&[(left, right)])
    }

    /// Symmetric interval `[-a, a]`.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::interval(-a, a)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Total length `Sum (right - left)`; strictly positive by construction.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    /// Minkowski dilation `S + [-delta, delta]`, re-normalized so intervals
    /// within `2*delta` of each other merge.
    pub fn dilate(&self, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::invalid_parameter(
                "delta",
                format!("must be >= 0, got {delta}"),
            ));
        }
        let widened: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .map(|&(l, r)| (l - delta, r + delta))
            .collect();
        Self::normalize(&widened)
    }

    /// Smallest interval hull `[min left, max right]`.
    pub fn hull(&self) -> (f64, f64) {
        let lo = self.intervals.first().unwrap().0;
        let hi = self.intervals.last().unwrap().1;
        (lo, hi)
    }

    /// Largest absolute frequency contained in the spectrum.
    pub fn max_abs_frequency(&self) -> f64 {
        let (lo, hi) = self.hull();
        lo.abs().max(hi.abs())
    }

    /// True when the interval union is symmetric about the origin (up to
    /// `tol`), in which case the reproducing kernel is real.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.intervals.len();
        (0..n).all(|i| {
            let (l, r) = self.intervals[i];
            let (ml, mr) = self.intervals[n - 1 - i];
            (l + mr).abs() <= tol && (r + ml).abs() <= tol
        })
    }

    /// Whether `other` is contained in `self` as a point set.
    pub fn contains(&self, other: &Spectrum) -> bool {
        other.intervals.iter().all(|&(l, r)| {
            self.intervals
                .iter()
                .any(|&(sl, sr)| sl <= l + 1e-12 && r <= sr + 1e-12)
        })
    }

    /// Relative complement `self \ other` as an interval list; empty result
    /// is allowed (returned as a plain vector, not a `Spectrum`).
    pub fn set_minus(&self, other: &Spectrum) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(l, r) in &self.intervals {
            let mut cursor = l;
            for &(ol, or) in &other.intervals {
                if or <= cursor || ol >= r {
                    continue;
                }
                if ol > cursor {
                    out.push((cursor, ol));
                }
                cursor = cursor.max(or);
                if cursor >= r {
                    break;
                }
            }
            if cursor < r {
                out.push((cursor, r));
            }
        }
        out.retain(|&(a, b)| b - a > 1e-14);
        out
    }
}

impl TryFrom<Vec<(f64, f64)>> for Spectrum {
    type Error = Error;
    fn try_from(raw: Vec<(f64, f64)>) -> Result<Self> {
        Spectrum::normalize(&raw)
    }
}

impl From<Spectrum> for Vec<(f64, f64)> {
    fn from(s: Spectrum) -> Self {
        s.intervals
    }
}
