//! Click statistics of an ensemble of independent single-photon emitters.
//!
//! Each of `m` emitters delivers one photon to the detector with probability
//! `η` and nothing otherwise. Background light is an independent Poissonian
//! field carrying `n̄` photons per emitter on average (`m n̄` in total). A
//! transmission `T` in front of the detector maps `η → Tη` and `n̄ → Tn̄`.
//! Emitters escape their trap with time constant `τ_s`, which scales both by
//! `e^{-t/τ_s}` at time `t`; statistics collected over the window
//! `[t_0, t_0 + t_M]` are the time average over that window.
//!
//! On a symmetric `N`-channel detector, `k` given channels all stay dark with
//! probability
//!
//! ```text
//! R_{0,k} = (1 - ηk/N)^m exp(-m n̄ k/N)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criteria::{asymptote, CriterionOrder, GaussianBound};
use crate::detector::{binomial, click_stats, validate_subset, ClickProbabilities, NoClickProfile};
use crate::error::{finite, in_unit_interval, QngError, Result};
use crate::hermite::hermite;

/// Absolute resolution of the threshold bisections (in units of `τ_s` for
/// durations).
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Lower end of the efficiency and transmission brackets.
pub const BRACKET_MIN: f64 = 1e-4;

/// Upper end of the duration bracket, in units of `τ_s`.
pub const DURATION_BRACKET: f64 = 10.0;

const QUAD_ABS_TOL: f64 = 1e-13;
const QUAD_REL_TOL: f64 = 1e-12;

/// Emitter ensemble, channel losses and measurement window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleFile", into = "EnsembleFile")]
pub struct EnsembleParams {
    emitters: usize,
    efficiency: f64,
    noise_mean: f64,
    transmission: f64,
    storage_time: f64,
    window_start: f64,
    window_length: f64,
}

impl EnsembleParams {
    /// Lossless ensemble that never escapes, observed instantaneously.
    pub fn new(emitters: usize, efficiency: f64, noise_mean: f64) -> Result<Self> {
        if emitters == 0 {
            return Err(QngError::OutOfRange {
                name: "m",
                value: 0.0,
                expected: "[1, inf)",
            });
        }
        let p = Self {
            emitters,
            efficiency: 0.0,
            noise_mean: 0.0,
            transmission: 1.0,
            storage_time: f64::INFINITY,
            window_start: 0.0,
            window_length: 0.0,
        };
        p.with_efficiency(efficiency)?.with_noise_mean(noise_mean)
    }

    pub fn with_efficiency(mut self, efficiency: f64) -> Result<Self> {
        self.efficiency = in_unit_interval("eta", efficiency)?;
        Ok(self)
    }

    pub fn with_noise_mean(mut self, noise_mean: f64) -> Result<Self> {
        self.noise_mean = non_negative("nbar", noise_mean)?;
        Ok(self)
    }

    pub fn with_transmission(mut self, transmission: f64) -> Result<Self> {
        self.transmission = in_unit_interval("T", transmission)?;
        Ok(self)
    }

    /// `τ_s`; `f64::INFINITY` switches escape off.
    pub fn with_storage_time(mut self, storage_time: f64) -> Result<Self> {
        if storage_time.is_nan() || storage_time <= 0.0 {
            return Err(QngError::OutOfRange {
                name: "tau_s",
                value: storage_time,
                expected: "(0, inf]",
            });
        }
        self.storage_time = storage_time;
        Ok(self)
    }

    pub fn with_window(mut self, start: f64, length: f64) -> Result<Self> {
        self.window_start = non_negative("t0", start)?;
        self.window_length = non_negative("tM", length)?;
        Ok(self)
    }

    pub fn emitters(&self) -> usize {
        self.emitters
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn noise_mean(&self) -> f64 {
        self.noise_mean
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn storage_time(&self) -> f64 {
        self.storage_time
    }

    pub fn window_start(&self) -> f64 {
        self.window_start
    }

    pub fn window_length(&self) -> f64 {
        self.window_length
    }

    /// Parses `{"m", "eta", "nbar", "T", "tau_s", "t0", "tM"}`; all but `m`
    /// and `eta` are optional.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QngError::Parse {
            what: "ensemble parameters".into(),
            message: e.to_string(),
        })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value < 0.0 {
        return Err(QngError::OutOfRange {
            name,
            value,
            expected: "[0, inf)",
        });
    }
    Ok(value)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    m: usize,
    eta: f64,
    #[serde(default)]
    nbar: f64,
    #[serde(rename = "T", default = "unit")]
    transmission: f64,
    #[serde(default)]
    tau_s: StorageTime,
    #[serde(default)]
    t0: f64,
    #[serde(rename = "tM", default)]
    t_m: f64,
}

fn unit() -> f64 {
    1.0
}

/// A number, or `"inf"` for emitters that never escape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum StorageTime {
    Finite(f64),
    Named(String),
}

impl Default for StorageTime {
    fn default() -> Self {
        StorageTime::Named("inf".into())
    }
}

impl TryFrom<EnsembleFile> for EnsembleParams {
    type Error = QngError;

    fn try_from(f: EnsembleFile) -> Result<Self> {
        let tau = match f.tau_s {
            StorageTime::Finite(t) => t,
            StorageTime::Named(s) if s.eq_ignore_ascii_case("inf") => f64::INFINITY,
            StorageTime::Named(s) => {
                return Err(QngError::Parse {
                    what: "ensemble parameters".into(),
                    message: format!("`tau_s` must be a number or \"inf\", got {s:?}"),
                })
            }
        };
        EnsembleParams::new(f.m, f.eta, f.nbar)?
            .with_transmission(f.transmission)?
            .with_storage_time(tau)?
            .with_window(f.t0, f.t_m)
    }
}

impl From<EnsembleParams> for EnsembleFile {
    fn from(p: EnsembleParams) -> Self {
        EnsembleFile {
            m: p.emitters,
            eta: p.efficiency,
            nbar: p.noise_mean,
            transmission: p.transmission,
            tau_s: if p.storage_time.is_finite() {
                StorageTime::Finite(p.storage_time)
            } else {
                StorageTime::default()
            },
            t0: p.window_start,
            t_m: p.window_length,
        }
    }
}

/// Which parts of the ensemble model enter the click statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceMode {
    /// Emitters only.
    Ideal,
    /// Emitters plus background noise.
    Noisy,
    /// Emitters plus noise, averaged over the measurement window.
    Escape,
}

impl fmt::Display for SourceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceMode::Ideal => "ideal",
            SourceMode::Noisy => "noisy",
            SourceMode::Escape => "escape",
        })
    }
}

impl FromStr for SourceMode {
    type Err = QngError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(SourceMode::Ideal),
            "noisy" => Ok(SourceMode::Noisy),
            "escape" => Ok(SourceMode::Escape),
            _ => Err(QngError::Parse {
                what: "source mode".into(),
                message: format!("expected ideal, noisy or escape, got {s:?}"),
            }),
        }
    }
}

/// Source seen by the detector at one instant: each emitter lands in a given
/// channel with probability `photon`, and each channel receives Poissonian
/// noise of mean `noise`.
#[derive(Debug, Clone, Copy)]
struct Snapshot {
    emitters: usize,
    photon: f64,
    noise: f64,
}

impl Snapshot {
    fn new(p: &EnsembleParams, channels: usize, noisy: bool, survival: f64) -> Self {
        let n = channels as f64;
        let noise = if noisy {
            p.emitters as f64 * p.transmission * p.noise_mean * survival / n
        } else {
            0.0
        };
        Self {
            emitters: p.emitters,
            photon: p.transmission * p.efficiency * survival / n,
            noise,
        }
    }

    fn ln_no_click(&self, k: usize) -> f64 {
        let k = k as f64;
        self.emitters as f64 * (-self.photon * k).ln_1p() - self.noise * k
    }

    fn click_complement(&self, k: usize) -> f64 {
        -self.ln_no_click(k).exp_m1()
    }

    /// Probability that `j` given channels all click. Channels fire on noise
    /// independently; the rest must each receive an emitter photon. Every
    /// term is nonnegative.
    fn all_click(&self, j: usize) -> f64 {
        let p = -(-self.noise).exp_m1();
        let q = (-self.noise).exp();
        (0..=j)
            .map(|s| binomial(j, s) * p.powi(s as i32) * q.powi((j - s) as i32) * self.cover(j - s))
            .sum()
    }

    /// Probability that the emitters put a photon into each of `j` given
    /// channels.
    fn cover(&self, j: usize) -> f64 {
        if j == 0 {
            return 1.0;
        }
        if j > self.emitters {
            return 0.0;
        }
        // covered[c]: exactly c of the j channels hold a photon so far
        let mut covered = vec![0.0; j + 1];
        covered[0] = 1.0;
        for _ in 0..self.emitters {
            for c in (0..=j).rev() {
                let fresh = (j - c) as f64 * self.photon;
                let stay = covered[c] * (1.0 - fresh);
                let arrive = if c > 0 {
                    covered[c - 1] * (j - c + 1) as f64 * self.photon
                } else {
                    0.0
                };
                covered[c] = stay + arrive;
            }
        }
        covered[j]
    }
}

/// Average of `f(survival)` over the measurement window, where the survival
/// probability at time `t` is `e^{-t/τ_s}`.
fn window_average<F: Fn(f64) -> f64>(p: &EnsembleParams, f: F) -> Result<f64> {
    if !p.storage_time.is_finite() {
        return Ok(f(1.0));
    }
    let u0 = p.window_start / p.storage_time;
    if p.window_length == 0.0 {
        return Ok(f((-u0).exp()));
    }
    let width = p.window_length / p.storage_time;
    let g = |u: f64| f((-u).exp());
    let scale = g(u0).abs().max(g(u0 + width).abs());
    let target = (width * QUAD_ABS_TOL.min(QUAD_REL_TOL * scale)).max(f64::MIN_POSITIVE);
    let out = quadrature::integrate(g, u0, u0 + width, target);
    if out.error_estimate > 1e3 * target {
        return Err(QngError::Quadrature {
            estimate: out.error_estimate,
            target,
        });
    }
    Ok(out.integral / width)
}

fn check_size(k: usize, channels: usize) -> Result<()> {
    if channels == 0 {
        return Err(QngError::InvalidDetector("at least one channel is required".into()));
    }
    if k > channels {
        return Err(QngError::InvalidSubset(format!(
            "subset size {k} exceeds {channels} channels"
        )));
    }
    Ok(())
}

/// `(1 - Tηk/N)^m` on a symmetric `N`-channel detector.
pub fn ideal_no_click(params: &EnsembleParams, k: usize, channels: usize) -> Result<f64> {
    check_size(k, channels)?;
    Ok(Snapshot::new(params, channels, false, 1.0).ln_no_click(k).exp())
}

/// `(1 - Tηk/N)^m exp(-m T n̄ k/N)`.
pub fn noisy_no_click(params: &EnsembleParams, k: usize, channels: usize) -> Result<f64> {
    check_size(k, channels)?;
    Ok(Snapshot::new(params, channels, true, 1.0).ln_no_click(k).exp())
}

/// Window average of the noisy no-click probability with `η` and `n̄` both
/// decaying as `e^{-t/τ_s}`. A zero-length window gives the instantaneous
/// value at `t_0`.
pub fn escape_averaged_no_click(params: &EnsembleParams, k: usize, channels: usize) -> Result<f64> {
    check_size(k, channels)?;
    let complement = window_average(params, |s| Snapshot::new(params, channels, true, s).click_complement(k))?;
    Ok(1.0 - complement)
}

/// No-click profile of an ensemble on a symmetric detector.
#[derive(Debug, Clone, Copy)]
pub struct EmitterProfile {
    params: EnsembleParams,
    channels: usize,
    mode: SourceMode,
}

impl EmitterProfile {
    pub fn new(params: EnsembleParams, channels: usize, mode: SourceMode) -> Result<Self> {
        check_size(0, channels)?;
        Ok(Self { params, channels, mode })
    }

    fn snapshot(&self, survival: f64) -> Snapshot {
        Snapshot::new(&self.params, self.channels, self.mode != SourceMode::Ideal, survival)
    }
}

impl NoClickProfile for EmitterProfile {
    fn channels(&self) -> usize {
        self.channels
    }

    fn ln_no_click(&self, subset: &[usize]) -> Result<f64> {
        validate_subset(subset, self.channels)?;
        self.ln_no_click_size(subset.len())
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn ln_no_click_size(&self, k: usize) -> Result<f64> {
        check_size(k, self.channels)?;
        match self.mode {
            SourceMode::Ideal | SourceMode::Noisy => Ok(self.snapshot(1.0).ln_no_click(k)),
            SourceMode::Escape => {
                let complement = window_average(&self.params, |s| self.snapshot(s).click_complement(k))?;
                Ok((-complement).ln_1p())
            }
        }
    }

    fn direct_click(&self, group: &[usize]) -> Option<f64> {
        let j = group.len();
        match self.mode {
            SourceMode::Ideal | SourceMode::Noisy => Some(self.snapshot(1.0).all_click(j)),
            SourceMode::Escape => window_average(&self.params, |s| self.snapshot(s).all_click(j)).ok(),
        }
    }
}

/// Success `R_n` and error `R_{n+1}` of the ensemble on a symmetric
/// `(n + 1)`-channel detector.
pub fn source_click_stats(
    params: &EnsembleParams,
    order: CriterionOrder,
    mode: SourceMode,
) -> Result<ClickProbabilities> {
    let profile = EmitterProfile::new(*params, order.channels(), mode)?;
    click_stats(&profile, order.get())
}

/// Leading-order weak-source statistics at order `n = m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxStats {
    /// `R_m ≈ m!/(m+1)^m η^m`.
    pub success: f64,
    /// `R_{m+1} ≈ R_m · m n̄`.
    pub error: f64,
    /// `m n̄ / η`; the expansion needs this to be small.
    pub validity: f64,
}

fn check_emitters(m: usize) -> Result<CriterionOrder> {
    CriterionOrder::new(m).map_err(|_| QngError::OutOfRange {
        name: "m",
        value: 0.0,
        expected: "[1, inf)",
    })
}

fn check_positive_efficiency(eta: f64) -> Result<f64> {
    in_unit_interval("eta", eta)?;
    if eta == 0.0 {
        return Err(QngError::OutOfRange {
            name: "eta",
            value: eta,
            expected: "(0, 1]",
        });
    }
    Ok(eta)
}

pub fn approx_success_error(m: usize, eta: f64, nbar: f64) -> Result<ApproxStats> {
    check_emitters(m)?;
    in_unit_interval("eta", eta)?;
    non_negative("nbar", nbar)?;
    // m!/(m+1)^m as a product of factors below one
    let prefactor: f64 = (1..=m).map(|i| i as f64 / (m + 1) as f64).product();
    let success = prefactor * eta.powi(m as i32);
    let mn = m as f64 * nbar;
    Ok(ApproxStats {
        success,
        error: success * mn,
        validity: if eta > 0.0 { mn / eta } else { f64::INFINITY },
    })
}

/// `H_m(x)^{4/m} / ((m+1) (m!)^{2/m})` at the asymptote's root of `H_{m+1}`.
fn noise_coefficient(order: CriterionOrder) -> f64 {
    let m = order.get();
    let mf = m as f64;
    let h = hermite(m, asymptote(order).root).abs();
    let ln_fact: f64 = (1..=m).map(|i| (i as f64).ln()).sum();
    (4.0 / mf * h.ln() - 2.0 / mf * ln_fact).exp() / (mf + 1.0)
}

/// Smallest efficiency at which order `m` detects the ensemble under weak
/// noise: `η > H_m(x)^{2/m} (m!)^{-1/m} sqrt(m n̄ / (2(m+1)))`.
pub fn min_efficiency_analytic(m: usize, nbar: f64) -> Result<f64> {
    let order = check_emitters(m)?;
    non_negative("nbar", nbar)?;
    Ok((m as f64 * nbar * noise_coefficient(order) / 2.0).sqrt())
}

/// Smallest transmission at which detection survives:
/// `T > m n̄ H_m(x)^{4/m} / (2η² (m+1) (m!)^{2/m})`.
pub fn loss_tolerance_analytic(m: usize, eta: f64, nbar: f64) -> Result<f64> {
    let order = check_emitters(m)?;
    check_positive_efficiency(eta)?;
    non_negative("nbar", nbar)?;
    Ok(m as f64 * nbar * noise_coefficient(order) / (2.0 * eta * eta))
}

/// Bound on the measurement duration with the two expansion terms whose
/// smallness it relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DurationBound {
    pub t_max: f64,
    /// `(t_max/τ_s)² / 12`.
    pub quadratic_term: f64,
    /// `m³ (t_max/τ_s)⁴ / 1440`.
    pub quartic_term: f64,
}

impl DurationBound {
    fn new(m: usize, tau_s: f64, ratio: f64) -> Self {
        Self {
            t_max: tau_s * ratio,
            quadratic_term: ratio * ratio / 12.0,
            quartic_term: (m as f64).powi(3) * ratio.powi(4) / 1440.0,
        }
    }
}

fn duration_inputs(m: usize, eta: f64, nbar: f64, tau_s: f64) -> Result<(CriterionOrder, f64)> {
    let order = check_emitters(m)?;
    check_positive_efficiency(eta)?;
    non_negative("nbar", nbar)?;
    if tau_s.is_nan() || tau_s <= 0.0 {
        return Err(QngError::OutOfRange {
            name: "tau_s",
            value: tau_s,
            expected: "(0, inf]",
        });
    }
    Ok((order, m as f64 * nbar * noise_coefficient(order) / (eta * eta)))
}

/// Second-order closed-form duration bound
/// `t_M < (τ_s/2) [1 - m n̄ H_m(x)^{4/m} / (4 (m+1) (m!)^{2/m} η²)]`.
///
/// Fails with [`QngError::NotDetectable`] when the bracket is not positive.
pub fn max_duration_analytic(m: usize, eta: f64, nbar: f64, tau_s: f64) -> Result<DurationBound> {
    let (_, noise) = duration_inputs(m, eta, nbar, tau_s)?;
    let factor = 1.0 - noise / 4.0;
    if factor <= 0.0 {
        return Err(QngError::NotDetectable(format!(
            "no measurement duration works at m = {m}, eta = {eta}, nbar = {nbar}"
        )));
    }
    Ok(DurationBound::new(m, tau_s, 0.5 * factor))
}

/// Duration bound from expanding the window-averaged statistics to first
/// order in `t_M/τ_s`: `t_M < 2 τ_s (1 - η_*²/η²)` with `η_*` from
/// [`min_efficiency_analytic`].
pub fn max_duration_first_order(m: usize, eta: f64, nbar: f64, tau_s: f64) -> Result<DurationBound> {
    let (_, noise) = duration_inputs(m, eta, nbar, tau_s)?;
    let factor = 1.0 - noise / 2.0;
    if factor <= 0.0 {
        return Err(QngError::NotDetectable(format!(
            "no measurement duration works at m = {m}, eta = {eta}, nbar = {nbar}"
        )));
    }
    Ok(DurationBound::new(m, tau_s, 2.0 * factor))
}

/// Result of a threshold bisection over a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// Witnessed everywhere in the bracket.
    Always,
    /// The decision flips here, to within [`THRESHOLD_TOL`].
    At(f64),
    /// Witnessed nowhere in the bracket.
    Never,
}

impl Crossing {
    pub fn value(&self) -> Option<f64> {
        match self {
            Crossing::At(x) => Some(*x),
            _ => None,
        }
    }
}

fn emitter_bound(bound: &GaussianBound) -> Result<()> {
    if !bound.config().is_symmetric() {
        return Err(QngError::InvalidDetector(
            "emitter statistics need a symmetric detector".into(),
        ));
    }
    Ok(())
}

fn witnessed(params: &EnsembleParams, mode: SourceMode, bound: &GaussianBound) -> Result<bool> {
    let stats = source_click_stats(params, bound.order(), mode)?;
    Ok(bound.witness(&stats)?.witnessed)
}

/// Smallest `x` in `[lo, hi]` where `pred` holds, for `pred` false below and
/// true above the crossing.
fn lowest_true<F: FnMut(f64) -> Result<bool>>(lo: f64, hi: f64, tol: f64, mut pred: F) -> Result<Crossing> {
    if pred(lo)? {
        return Ok(Crossing::Always);
    }
    if !pred(hi)? {
        return Ok(Crossing::Never);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossing::At(hi))
}

/// Largest `x` in `[lo, hi]` where `pred` holds, for `pred` true below and
/// false above the crossing.
fn highest_true<F: FnMut(f64) -> Result<bool>>(lo: f64, hi: f64, tol: f64, mut pred: F) -> Result<Crossing> {
    if pred(hi)? {
        return Ok(Crossing::Always);
    }
    if !pred(lo)? {
        return Ok(Crossing::Never);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing::At(lo))
}

/// Smallest efficiency `η* ∈ [10⁻⁴, 1]` at which the noisy ensemble is
/// witnessed by `bound`. The efficiency in `params` is ignored.
pub fn min_detectable_efficiency(params: &EnsembleParams, bound: &GaussianBound) -> Result<Crossing> {
    emitter_bound(bound)?;
    lowest_true(BRACKET_MIN, 1.0, THRESHOLD_TOL, |eta| {
        witnessed(&params.with_efficiency(eta)?, SourceMode::Noisy, bound)
    })
}

/// Smallest transmission `T* ∈ [10⁻⁴, 1]` at which the noisy ensemble is
/// still witnessed, i.e. the largest tolerated loss is `1 - T*`. The
/// transmission in `params` is ignored.
pub fn max_tolerated_loss(params: &EnsembleParams, bound: &GaussianBound) -> Result<Crossing> {
    emitter_bound(bound)?;
    lowest_true(BRACKET_MIN, 1.0, THRESHOLD_TOL, |t| {
        witnessed(&params.with_transmission(t)?, SourceMode::Noisy, bound)
    })
}

/// Largest window length `t_M* ∈ [0, 10 τ_s]` for which the escape-averaged
/// statistics stay witnessed. Needs a finite `τ_s`; the window length in
/// `params` is ignored.
pub fn max_measurement_duration(params: &EnsembleParams, bound: &GaussianBound) -> Result<Crossing> {
    emitter_bound(bound)?;
    let tau = params.storage_time();
    if !tau.is_finite() {
        return Err(QngError::OutOfRange {
            name: "tau_s",
            value: tau,
            expected: "(0, inf)",
        });
    }
    let start = params.window_start();
    highest_true(0.0, DURATION_BRACKET * tau, THRESHOLD_TOL * tau, |t| {
        witnessed(&params.with_window(start, t)?, SourceMode::Escape, bound)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{click_success_by_size, NoClickProfile};
    use approx::assert_abs_diff_eq;

    fn ord(n: usize) -> CriterionOrder {
        CriterionOrder::new(n).unwrap()
    }

    #[test]
    fn no_click_examples() {
        let p = EnsembleParams::new(2, 0.3, 0.0).unwrap();
        assert_abs_diff_eq!(ideal_no_click(&p, 1, 3).unwrap(), 0.81, epsilon = 1e-15);
        assert_eq!(ideal_no_click(&p, 0, 3).unwrap(), 1.0);
        let dark = EnsembleParams::new(3, 0.0, 0.0).unwrap();
        for k in 0..=4 {
            assert_eq!(ideal_no_click(&dark, k, 4).unwrap(), 1.0);
        }
        let q = EnsembleParams::new(1, 0.3, 0.01).unwrap();
        assert_abs_diff_eq!(
            noisy_no_click(&q, 1, 2).unwrap(),
            0.85 * (-0.005f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(noisy_no_click(&q, 1, 2).unwrap(), 0.845760, epsilon = 1e-6);
        let lost = q.with_transmission(0.0).unwrap();
        assert_eq!(noisy_no_click(&lost, 2, 2).unwrap(), 1.0);
        assert!(ideal_no_click(&p, 4, 3).is_err());
    }

    #[test]
    fn escape_average_examples() {
        let p = EnsembleParams::new(1, 0.3, 0.0)
            .unwrap()
            .with_storage_time(1.0)
            .unwrap()
            .with_window(0.0, 1.0)
            .unwrap();
        let expected = 1.0 - 0.15 * (1.0 - (-1.0f64).exp());
        assert_abs_diff_eq!(escape_averaged_no_click(&p, 1, 2).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.905182, epsilon = 1e-6);

        let q = EnsembleParams::new(3, 0.4, 0.02).unwrap();
        let instant = q.with_storage_time(2.0).unwrap();
        let slow = q.with_storage_time(1e12).unwrap().with_window(0.0, 1e3).unwrap();
        for k in 0..=3 {
            let noisy = noisy_no_click(&q, k, 3).unwrap();
            assert_eq!(escape_averaged_no_click(&instant, k, 3).unwrap(), noisy);
            assert_abs_diff_eq!(escape_averaged_no_click(&slow, k, 3).unwrap(), noisy, epsilon = 1e-9);
        }
    }

    #[test]
    fn json_schema() {
        let p = EnsembleParams::from_json_str(
            r#"{"m": 2, "eta": 0.3, "nbar": 0.01, "T": 0.5, "tau_s": "inf", "t0": 0, "tM": 0}"#,
        )
        .unwrap();
        assert_eq!(p.emitters(), 2);
        assert_eq!(p.transmission(), 0.5);
        assert!(p.storage_time().is_infinite());
        let q = EnsembleParams::from_json_str(r#"{"m": 1, "eta": 0.2, "tau_s": 3.5, "tM": 1}"#).unwrap();
        assert_eq!(q.storage_time(), 3.5);
        assert_eq!(q.noise_mean(), 0.0);
        let back: EnsembleParams = serde_json::from_value(serde_json::to_value(p).unwrap()).unwrap();
        assert_eq!(back, p);
        for bad in [
            r#"{"m": 0, "eta": 0.3}"#,
            r#"{"m": 1, "eta": 1.3}"#,
            r#"{"m": 1, "eta": 0.3, "nbar": -1}"#,
            r#"{"m": 1, "eta": 0.3, "tau_s": "forever"}"#,
            r#"{"m": 1, "eta": 0.3, "tau_s": 0}"#,
            r#"{"m": 1, "eta": 0.3, "extra": 1}"#,
            r#"{"eta": 0.3}"#,
        ] {
            assert!(EnsembleParams::from_json_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn click_stats_examples() {
        let p = EnsembleParams::new(2, 0.3, 0.0).unwrap();
        let s = source_click_stats(&p, ord(2), SourceMode::Ideal).unwrap();
        assert_abs_diff_eq!(s.success, 0.02, epsilon = 1e-15);
        assert_eq!(s.error, 0.0);
        let q = EnsembleParams::new(1, 0.3, 0.01).unwrap();
        let s = source_click_stats(&q, ord(1), SourceMode::Noisy).unwrap();
        assert_abs_diff_eq!(s.success, 1.0 - 0.85 * (-0.005f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn direct_and_inclusion_exclusion_agree() {
        for mode in [SourceMode::Ideal, SourceMode::Noisy, SourceMode::Escape] {
            let p = EnsembleParams::new(3, 0.6, 0.05)
                .unwrap()
                .with_storage_time(2.0)
                .unwrap()
                .with_window(0.5, 1.5)
                .unwrap();
            let profile = EmitterProfile::new(p, 5, mode).unwrap();
            for j in 1..=5 {
                let group: Vec<usize> = (0..j).collect();
                let direct = profile.direct_click(&group).unwrap();
                let summed = click_success_by_size(&profile, j).unwrap();
                assert!((direct - summed).abs() < 1e-13, "{mode} j={j}: {direct} vs {summed}");
            }
        }
    }

    #[test]
    fn approximation_examples() {
        let a = approx_success_error(1, 0.1, 0.0).unwrap();
        assert_abs_diff_eq!(a.success, 0.05, epsilon = 1e-16);
        assert_eq!(a.error, 0.0);
        let b = approx_success_error(2, 0.1, 0.0).unwrap();
        assert_abs_diff_eq!(b.success, 2.0 / 9.0 * 0.01, epsilon = 1e-16);
        let c = approx_success_error(3, 0.2, 0.01).unwrap();
        assert_abs_diff_eq!(c.error, c.success * 0.03, epsilon = 1e-18);
        assert_abs_diff_eq!(c.validity, 0.15, epsilon = 1e-15);
    }

    #[test]
    fn analytic_bounds() {
        for nbar in [0.0, 1e-4, 0.01, 0.3] {
            assert_abs_diff_eq!(min_efficiency_analytic(1, nbar).unwrap(), nbar.sqrt(), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(min_efficiency_analytic(1, 0.01).unwrap(), 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(loss_tolerance_analytic(1, 0.3, 0.009).unwrap(), 0.1, epsilon = 1e-14);
        // applying the loss to (η, n̄) lands exactly on the efficiency bound
        for m in 1..=4 {
            let (eta, nbar) = (0.3, 0.002);
            let t = loss_tolerance_analytic(m, eta, nbar).unwrap();
            let bound = min_efficiency_analytic(m, t * nbar).unwrap();
            assert_abs_diff_eq!(t * eta, bound, epsilon = 1e-14);
        }
        let d = max_duration_analytic(1, 0.3, 0.045, 1.0).unwrap();
        assert_abs_diff_eq!(d.t_max, 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(d.quadratic_term, 0.375f64.powi(2) / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            max_duration_analytic(1, 0.3, 0.0, 4.0).unwrap().t_max,
            2.0,
            epsilon = 1e-14
        );
        assert!(matches!(
            max_duration_analytic(1, 0.3, 0.5, 1.0),
            Err(QngError::NotDetectable(_))
        ));
        let f = max_duration_first_order(1, 0.3, 0.045, 1.0).unwrap();
        assert_abs_diff_eq!(f.t_max, 1.0, epsilon = 1e-14);
    }
}
