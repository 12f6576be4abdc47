//! Band-limited multiplier windows.
//!
//! Two window families are used by the verification pipelines, both with
//! spectrum inside `[-delta, delta]`, value 1 at the origin, and modulus at
//! most 1 everywhere:
//!
//! * [`FejerWindow`]: the squared sinc `(sin(delta x / 2) / (delta x / 2))^2`,
//!   nonnegative with polynomial decay;
//! * [`ProductWindow`]: a product of sincs with summable bandwidths,
//!   decaying like a stretched exponential `exp(-c |x|^beta)`.
//!
//! The two are interchangeable wherever a multiplier is needed, so they sit
//! behind the object-safe [`Window`] trait and are constructed by name
//! through [`window_by_name`]; pipelines select one at runtime from their
//! configuration.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pwkernel::{Evaluate, PWFunction};

/// Unnormalized sinc `sin(t) / t` with the removable singularity handled.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// A real multiplier window: band-limited, bounded by 1, equal to 1 at 0.
pub trait Window: Send + Sync {
    fn name(&self) -> &'static str;
    /// The window's spectrum is contained in `[-bandwidth, bandwidth]`.
    fn bandwidth(&self) -> f64;
    fn eval(&self, x: f64) -> f64;
    /// Upper bound for the squared tail mass `Int_{|u| >= dist} w(u)^2 du`.
    fn tail_mass_bound(&self, dist: f64) -> f64;
}

/// Squared sinc with bandwidth `delta`.
///
/// Vanishes at `x = 4 pi k / delta` for nonzero integers `k`, takes values in
/// `[0, 1]`, and is dominated by the envelope `min(1, 4 / (delta x)^2)`.
#[derive(Debug, Clone, Copy)]
pub struct FejerWindow {
    delta: f64,
}

impl FejerWindow {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::invalid_parameter(
                "delta",
                format!("must be > 0, got {delta}"),
            ));
        }
        Ok(FejerWindow { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Pointwise envelope `min(1, 4 / (delta x)^2)`.
    pub fn envelope(&self, x: f64) -> f64 {
        let t = self.delta * x;
        if t == 0.0 {
            1.0
        } else {
            (4.0 / (t * t)).min(1.0)
        }
    }
}

impl Window for FejerWindow {
    fn name(&self) -> &'static str {
        "fejer"
    }

    fn bandwidth(&self) -> f64 {
        self.delta
    }

    fn eval(&self, x: f64) -> f64 {
        let s = sinc(self.delta * x / 2.0);
        s * s
    }

    /// `w^2 <= (2/(delta u))^4`, so the tail integrates to
    /// `32 / (3 delta^4 dist^3)`.
    fn tail_mass_bound(&self, dist: f64) -> f64 {
        assert!(dist > 0.0);
        32.0 / (3.0 * self.delta.powi(4) * dist.powi(3))
    }
}

/// Product of sincs `prod_j sinc(delta_j x)` with `sum_j delta_j <= delta`.
///
/// Bandwidths decay polynomially, `delta_j = delta j^{-s} / zeta(s)` with
/// `s = 1 / beta`, which yields stretched-exponential decay with target
/// exponent `beta` in `(0, 1)`. The sequence is truncated once `delta_j`
/// drops below `1e-8`; truncation installs a floor on the achievable decay
/// that is far below anything the finite evaluation grids can see.
#[derive(Debug, Clone)]
pub struct ProductWindow {
    delta: f64,
    beta: f64,
    deltas: Vec<f64>,
    /// Suffix sums of `delta_j^2` and `delta_j^4` from each index on, so the
    /// long tail of near-unit factors collapses to one exponential.
    suffix_sq: Vec<f64>,
    suffix_quad: Vec<f64>,
}

const PRODUCT_TRUNCATION: f64 = 1e-8;
const PRODUCT_MAX_TERMS: usize = 200_000;

impl ProductWindow {
    pub fn new(delta: f64, beta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::invalid_parameter(
                "delta",
                format!("must be > 0, got {delta}"),
            ));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid_parameter(
                "beta",
                format!("must lie in (0, 1), got {beta}"),
            ));
        }
        let s = 1.0 / beta;
        let z = zeta(s);
        let mut deltas = Vec::new();
        for j in 1..=PRODUCT_MAX_TERMS {
            let dj = delta * (j as f64).powf(-s) / z;
            if dj < PRODUCT_TRUNCATION {
                break;
            }
            deltas.push(dj);
        }
        Self::from_deltas(delta, beta, deltas)
    }

    /// Explicit bandwidth sequence; used by tests and by callers that want a
    /// single-factor sinc.
    pub fn with_deltas(deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::invalid_parameter(
                "deltas",
                "must be a nonempty list of positive bandwidths".into(),
            ));
        }
        let total: f64 = deltas.iter().sum();
        Self::from_deltas(total, 0.5, deltas)
    }

    fn from_deltas(delta: f64, beta: f64, deltas: Vec<f64>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::invalid_parameter(
                "delta",
                "bandwidth budget too small: no factor survives truncation".into(),
            ));
        }
        let n = deltas.len();
        let mut suffix_sq = vec![0.0; n + 1];
        let mut suffix_quad = vec![0.0; n + 1];
        for i in (0..n).rev() {
            suffix_sq[i] = suffix_sq[i + 1] + deltas[i] * deltas[i];
            suffix_quad[i] = suffix_quad[i + 1] + deltas[i].powi(4);
        }
        Ok(ProductWindow {
            delta,
            beta,
            deltas,
            suffix_sq,
            suffix_quad,
        })
    }

    /// Total bandwidth budget the sequence was derived from.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn terms(&self) -> usize {
        self.deltas.len()
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// Tail-free envelope: `min over m of prod_{j<=m} 1/(delta_j |x|)`,
    /// including `m = 0` (the trivial bound 1). An upper bound for `|psi|`.
    pub fn envelope(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax == 0.0 {
            return 1.0;
        }
        let mut best = 1.0f64;
        let mut running = 1.0f64;
        for &d in &self.deltas {
            let factor = 1.0 / (d * ax);
            if factor >= 1.0 {
                break;
            }
            running *= factor;
            best = best.min(running);
        }
        best
    }
}

impl Window for ProductWindow {
    fn name(&self) -> &'static str {
        "sinc-product"
    }

    fn bandwidth(&self) -> f64 {
        self.deltas.iter().sum()
    }

    fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax == 0.0 {
            return 1.0;
        }
        // Factors with delta_j |x| below the cutoff are within 1e-12 of
        // exp(-t^2/6 - t^4/180); sum them through the precomputed suffixes.
        let cutoff = 1e-4 / ax;
        let split = self.deltas.partition_point(|&d| d >= cutoff);
        let mut prod = 1.0;
        for &d in &self.deltas[..split] {
            prod *= sinc(d * x);
        }
        let x2 = x * x;
        let tail = -x2 / 6.0 * self.suffix_sq[split] - x2 * x2 / 180.0 * self.suffix_quad[split];
        prod * tail.exp()
    }

    /// Numeric overestimate of the squared tail mass via the monotone
    /// envelope: left-endpoint sums on a geometric mesh, plus a cap for the
    /// far tail where at least two inverse factors are active.
    fn tail_mass_bound(&self, dist: f64) -> f64 {
        assert!(dist > 0.0);
        let mut total = 0.0;
        let mut u = dist;
        loop {
            let next = u * 1.09;
            let e = self.envelope(u);
            total += e * e * (next - u);
            u = next;
            if e < 1e-12 || u > dist * 1e6 {
                break;
            }
        }
        // Beyond the mesh the envelope decays at least like u^-2 once two
        // factors are active, so the remainder is under e^2 * u / 3.
        let e = self.envelope(u);
        2.0 * (total + e * e * u / 3.0)
    }
}

/// Riemann zeta for real `s > 1` by Euler-Maclaurin.
fn zeta(s: f64) -> f64 {
    assert!(s > 1.0);
    let n = 10_000usize;
    let mut sum = 0.0;
    for j in 1..n {
        sum += (j as f64).powf(-s);
    }
    let nf = n as f64;
    sum + nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
}

/// Window registry: construction by name, as selected from configuration.
pub fn window_by_name(name: &str, delta: f64, beta: Option<f64>) -> Result<Arc<dyn Window>> {
    match name {
        "fejer" => Ok(Arc::new(FejerWindow::new(delta)?)),
        "sinc-product" => {
            let beta = beta.ok_or_else(|| {
                Error::invalid_parameter("beta", "required for the sinc-product window".into())
            })?;
            Ok(Arc::new(ProductWindow::new(delta, beta)?))
        }
        other => Err(Error::invalid_parameter(
            "window",
            format!(
                "unknown window `{other}`; available: {}",
                AVAILABLE_WINDOWS.join(", ")
            ),
        )),
    }
}

pub const AVAILABLE_WINDOWS: &[&str] = &["fejer", "sinc-product"];

/// A band-limited function multiplied by a window translated to `center`.
pub struct WindowedFunction {
    pub inner: PWFunction,
    pub center: f64,
    pub window: Arc<dyn Window>,
}

impl Evaluate for WindowedFunction {
    fn eval(&self, x: f64) -> Complex64 {
        self.inner.eval(x) * self.window.eval(x - self.center)
    }
}

/// Windowed family `g_j(x) = f_j(x) w(x - center_j)`.
///
/// Because `|w| <= 1` and `w(0) = 1`, each restriction vector of `g_j` stays
/// entrywise at least as close to `e_j` as the restriction of `f_j`, and the
/// product's spectrum lies in the `bandwidth`-dilation of the original
/// spectrum.
pub fn windowed_family(
    functions: Vec<PWFunction>,
    centers: &[f64],
    window: Arc<dyn Window>,
) -> Result<Vec<WindowedFunction>> {
    if functions.len() != centers.len() {
        return Err(Error::invalid_parameter(
            "centers",
            format!(
                "expected one center per function ({} functions, {} centers)",
                functions.len(),
                centers.len()
            ),
        ));
    }
    Ok(functions
        .into_iter()
        .zip(centers)
        .map(|(inner, &center)| WindowedFunction {
            inner,
            center,
            window: window.clone(),
        })
        .collect())
}

/// Relative spectral energy of a window outside `[-band, band]`, measured by
/// a slow discrete-time Fourier transform of samples on `[-half_len,
/// half_len]` with spacing `step`. Total energy comes from Parseval; in-band
/// energy from trapezoid integration of `|F(omega)|^2` over the band.
pub fn band_energy_ratio_outside(w: &dyn Window, band: f64, half_len: f64, step: f64) -> f64 {
    let n = (2.0 * half_len / step).round() as usize;
    let samples: Vec<f64> = (0..=n)
        .map(|i| w.eval(-half_len + i as f64 * step))
        .collect();
    let total: f64 = samples.iter().map(|v| v * v).sum::<f64>() * step;

    // DTFT period is 2 pi / step; the band must fit well inside.
    assert!(band < std::f64::consts::PI / step);
    let d_omega = std::f64::consts::PI / (n as f64 * step);
    let m = (band / d_omega).ceil() as i64 + 1;
    let mut in_band = 0.0;
    let mut prev: Option<f64> = None;
    for k in -m..=m {
        let omega = k as f64 * d_omega;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &v) in samples.iter().enumerate() {
            let x = -half_len + i as f64 * step;
            acc += Complex64::new(0.0, -omega * x).exp() * v;
        }
        let power = (acc * step).norm_sqr();
        if let Some(p) = prev {
            in_band += 0.5 * (p + power) * d_omega;
        }
        prev = Some(power);
    }
    in_band /= 2.0 * std::f64::consts::PI;
    ((total - in_band) / total).max(0.0)
}

/// Result of fitting `log |w(x)| ~ -c x^b` through the local maxima of
/// `|w|` on a grid.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub peaks_used: usize,
}

/// Least-squares fit of the log-envelope maxima of `|w|` over `[x_lo, x_hi]`:
/// regresses `log(-log |w|)` on `log x` over local maxima of the evaluation
/// grid. Peaks below the truncation floor are excluded.
pub fn fit_envelope_exponent(
    w: &dyn Window,
    x_lo: f64,
    x_hi: f64,
    grid: usize,
) -> Result<DecayFit> {
    if !(x_lo > 0.0 && x_hi > x_lo) || grid < 16 {
        return Err(Error::invalid_parameter(
            "fit range",
            "need 0 < x_lo < x_hi and at least 16 grid points".into(),
        ));
    }
    let h = (x_hi - x_lo) / grid as f64;
    let vals: Vec<f64> = (0..=grid)
        .map(|i| w.eval(x_lo + i as f64 * h).abs())
        .collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..grid {
        let v = vals[i];
        if v > vals[i - 1] && v >= vals[i + 1] && v < 1.0 && v > 1e-13 {
            let x = x_lo + i as f64 * h;
            xs.push(x.ln());
            ys.push((-v.ln()).ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} envelope peaks in [{x_lo}, {x_hi}]",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let log_c = my - b * mx;
    Ok(DecayFit {
        exponent: b,
        coefficient: log_c.exp(),
        peaks_used: xs.len(),
    })
}
