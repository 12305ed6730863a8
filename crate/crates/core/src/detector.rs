//! Multi-channel on/off detector and inclusion–exclusion click statistics.
//!
//! Light is split over `N` channels, each ending in a detector that only
//! tells vacuum from "something". For a chosen group of channels the
//! probability that all of them click follows from the no-click probabilities
//! of its subsets:
//!
//! ```text
//! P(all of G click) = Σ_{S ⊆ G} (-1)^{|S|} R_{0,S}
//! ```
//!
//! For a symmetric detector `R_{0,S}` only depends on `|S| = k`, and the sum
//! collapses to `1 + Σ_k C(n,k) (-1)^k R_{0,k}`.
//!
//! Terms cancel down to the size of the result, so the sum is formed from the
//! click complements `1 - R_{0,S}` (computed as `-expm1(ln R_{0,S})`) with
//! compensated summation. Where even that loses the result, profiles can supply
//! a cancellation-free expression instead (see [`NoClickProfile::direct_click`]);
//! for very weak Gaussian light this is a power series in the attenuation.

use serde::{Deserialize, Serialize};

use crate::error::{QngError, Result};
use crate::gaussian::SqueezedCoherent;

/// Slack allowed on computed probabilities before they are clamped to `[0, 1]`.
pub const PROBABILITY_TOL: f64 = 1e-12;

const SPLITTING_SUM_TOL: f64 = 1e-12;

/// Channel geometry of the multiplexed detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorFile", into = "DetectorFile")]
pub struct DetectorConfig {
    splitting: Vec<f64>,
    efficiencies: Vec<f64>,
    success_group: Vec<usize>,
}

impl DetectorConfig {
    /// Equal splitting over `channels` ideal detectors.
    pub fn symmetric(channels: usize) -> Result<Self> {
        if channels == 0 {
            return Err(QngError::InvalidDetector("at least one channel is required".into()));
        }
        let share = 1.0 / channels as f64;
        Self::new(vec![share; channels], vec![1.0; channels], None)
    }

    /// Detector with explicit splitting ratios and per-channel efficiencies.
    ///
    /// `success_group` names the `N - 1` channels whose joint click counts as
    /// success; it defaults to the first `N - 1` channels.
    pub fn new(splitting: Vec<f64>, efficiencies: Vec<f64>, success_group: Option<Vec<usize>>) -> Result<Self> {
        let n = splitting.len();
        if n == 0 {
            return Err(QngError::InvalidDetector("at least one channel is required".into()));
        }
        if efficiencies.len() != n {
            return Err(QngError::InvalidDetector(format!(
                "{} splitting ratios but {} efficiencies",
                n,
                efficiencies.len()
            )));
        }
        if let Some(bad) = splitting.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(QngError::InvalidDetector(format!(
                "splitting ratio {bad} is negative or not finite"
            )));
        }
        let total: f64 = splitting.iter().sum();
        if (total - 1.0).abs() > SPLITTING_SUM_TOL {
            return Err(QngError::InvalidDetector(format!(
                "splitting ratios sum to {total}, expected 1"
            )));
        }
        if let Some(bad) = efficiencies.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(QngError::InvalidDetector(format!("efficiency {bad} outside [0, 1]")));
        }
        let success_group = match success_group {
            Some(g) => {
                if g.len() != n - 1 {
                    return Err(QngError::InvalidDetector(format!(
                        "success group must name {} channels, got {}",
                        n - 1,
                        g.len()
                    )));
                }
                validate_subset(&g, n)?;
                g
            }
            None => (0..n - 1).collect(),
        };
        Ok(Self {
            splitting,
            efficiencies,
            success_group,
        })
    }

    pub fn channels(&self) -> usize {
        self.splitting.len()
    }

    pub fn splitting(&self) -> &[f64] {
        &self.splitting
    }

    pub fn efficiencies(&self) -> &[f64] {
        &self.efficiencies
    }

    pub fn success_group(&self) -> &[usize] {
        &self.success_group
    }

    /// True when every channel receives the same share at the same efficiency,
    /// so no-click probabilities depend only on the subset size.
    pub fn is_symmetric(&self) -> bool {
        let s0 = self.splitting[0];
        let e0 = self.efficiencies[0];
        self.splitting.iter().all(|&s| s == s0) && self.efficiencies.iter().all(|&e| e == e0)
    }

    /// Fraction of the input mode seen by the detectors in `subset`:
    /// `Σ_{i∈S} splitting_i · efficiency_i`.
    pub fn effective_attenuation(&self, subset: &[usize]) -> Result<f64> {
        validate_subset(subset, self.channels())?;
        Ok(self.attenuation_unchecked(subset))
    }

    fn attenuation_unchecked(&self, subset: &[usize]) -> f64 {
        let t: f64 = subset.iter().map(|&i| self.splitting[i] * self.efficiencies[i]).sum();
        t.clamp(0.0, 1.0)
    }

    /// Parses the JSON detector description.
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| QngError::Parse {
            what: "detector configuration".into(),
            message: e.to_string(),
        })
    }
}

/// On-disk form. Either `{"symmetric": N}` or explicit ratios.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetric: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    splitting: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    efficiencies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    success_group: Option<Vec<usize>>,
}

impl TryFrom<DetectorFile> for DetectorConfig {
    type Error = QngError;

    fn try_from(f: DetectorFile) -> Result<Self> {
        let splitting = match (f.symmetric, f.splitting) {
            (Some(_), Some(_)) => {
                return Err(QngError::InvalidDetector(
                    "`symmetric` and `splitting` are mutually exclusive".into(),
                ))
            }
            (Some(0), None) => return Err(QngError::InvalidDetector("at least one channel is required".into())),
            (Some(n), None) => vec![1.0 / n as f64; n],
            (None, Some(s)) => s,
            (None, None) => {
                return Err(QngError::InvalidDetector(
                    "either `symmetric` or `splitting` is required".into(),
                ))
            }
        };
        let n = splitting.len();
        if let Some(c) = f.channels {
            if c != n {
                return Err(QngError::InvalidDetector(format!(
                    "`channels` = {c} but {n} splitting ratios given"
                )));
            }
        }
        let efficiencies = f.efficiencies.unwrap_or_else(|| vec![1.0; n]);
        DetectorConfig::new(splitting, efficiencies, f.success_group)
    }
}

impl From<DetectorConfig> for DetectorFile {
    fn from(c: DetectorConfig) -> Self {
        DetectorFile {
            symmetric: None,
            channels: Some(c.channels()),
            splitting: Some(c.splitting),
            efficiencies: Some(c.efficiencies),
            success_group: Some(c.success_group),
        }
    }
}

pub(crate) fn validate_subset(subset: &[usize], channels: usize) -> Result<()> {
    let mut seen = vec![false; channels];
    for &i in subset {
        if i >= channels {
            return Err(QngError::InvalidSubset(format!(
                "channel {i} out of range for {channels} channels"
            )));
        }
        if seen[i] {
            return Err(QngError::InvalidSubset(format!("channel {i} listed twice")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// No-click probabilities `R_{0,S}` of some light source on a fixed detector.
///
/// Implementors return logarithms so that both `R_{0,S}` and `1 - R_{0,S}`
/// stay accurate for weak light. Required invariants: `R_{0,∅} = 1` and
/// `R_{0,S}` nonincreasing as `S` grows.
pub trait NoClickProfile {
    fn channels(&self) -> usize;

    /// `ln R_{0,S}` for a set of distinct, valid channel indices.
    fn ln_no_click(&self, subset: &[usize]) -> Result<f64>;

    /// Whether `R_{0,S}` depends on `|S|` only.
    fn is_symmetric(&self) -> bool {
        false
    }

    /// `ln R_{0,k}` for any subset of size `k`. Meaningful for symmetric
    /// profiles; the default evaluates the first `k` channels.
    fn ln_no_click_size(&self, k: usize) -> Result<f64> {
        let subset: Vec<usize> = (0..k).collect();
        self.ln_no_click(&subset)
    }

    /// Channels whose joint click is the success event.
    fn success_group(&self) -> Vec<usize> {
        (0..self.channels().saturating_sub(1)).collect()
    }

    fn no_click(&self, subset: &[usize]) -> Result<f64> {
        Ok(self.ln_no_click(subset)?.exp())
    }

    /// Probability that all of a nonempty, valid `group` clicks, evaluated
    /// without inclusion–exclusion. `None` when the profile has no such
    /// evaluation at this point; [`click_success`] then falls back to the sum.
    fn direct_click(&self, _group: &[usize]) -> Option<f64> {
        None
    }
}

/// No-click profile of a squeezed coherent state on a given detector.
#[derive(Debug, Clone)]
pub struct GaussianProfile<'a> {
    state: SqueezedCoherent,
    config: &'a DetectorConfig,
    symmetric: bool,
}

impl<'a> GaussianProfile<'a> {
    pub fn new(state: SqueezedCoherent, config: &'a DetectorConfig) -> Self {
        Self {
            state,
            config,
            symmetric: config.is_symmetric(),
        }
    }
}

/// Profile `S ↦ <(1 - t_S)^n>` for the given state.
pub fn gaussian_no_click_profile(state: SqueezedCoherent, config: &DetectorConfig) -> GaussianProfile<'_> {
    GaussianProfile::new(state, config)
}

impl NoClickProfile for GaussianProfile<'_> {
    fn channels(&self) -> usize {
        self.config.channels()
    }

    fn ln_no_click(&self, subset: &[usize]) -> Result<f64> {
        let t = self.config.effective_attenuation(subset)?;
        Ok(self.state.ln_no_click_unchecked(t))
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn ln_no_click_size(&self, k: usize) -> Result<f64> {
        let n = self.channels();
        if k > n {
            return Err(QngError::InvalidSubset(format!("subset size {k} exceeds {n} channels")));
        }
        if !self.symmetric {
            let subset: Vec<usize> = (0..k).collect();
            return self.ln_no_click(&subset);
        }
        let t = (k as f64 * self.config.splitting[0] * self.config.efficiencies[0]).clamp(0.0, 1.0);
        Ok(self.state.ln_no_click_unchecked(t))
    }

    fn success_group(&self) -> Vec<usize> {
        self.config.success_group().to_vec()
    }

    /// With `<(1 - t)^n̂> = Σ_j b_j t^j`,
    /// `P(all of G click) = (-1)^{|G|} Σ_j b_j d_j` where `d_j / j!` are the
    /// Taylor coefficients of `Π_{i∈G} (e^{w_i x} - 1)`. The `d_j` are
    /// positive and the series decays geometrically for weak states.
    fn direct_click(&self, group: &[usize]) -> Option<f64> {
        let weights: Vec<f64> = group
            .iter()
            .map(|&i| self.config.splitting[i] * self.config.efficiencies[i])
            .collect();
        let t: f64 = weights.iter().sum();
        let ratio = self.state.series_ratio(t);
        if ratio > SERIES_MAX_RATIO {
            return None;
        }
        let extra = if ratio > 0.0 {
            (SERIES_TRUNCATION.ln() / ratio.ln()).ceil() as usize + 4
        } else {
            0
        };
        let terms = (group.len() + extra + 1).min(SERIES_MAX_TERMS);
        let b = self.state.vacuum_response_taylor(terms);
        let d = surjection_weights(&weights, terms);
        let sum = compensated_sum((group.len()..terms).map(|j| b[j] * d[j]));
        Some(if group.len().is_multiple_of(2) { sum } else { -sum })
    }
}

const SERIES_MAX_RATIO: f64 = 0.25;
const SERIES_TRUNCATION: f64 = 1e-18;
const SERIES_MAX_TERMS: usize = 96;

/// `d_j = j! [x^j] Π_i (e^{w_i x} - 1)` for `j < terms`.
fn surjection_weights(weights: &[f64], terms: usize) -> Vec<f64> {
    let mut c = vec![0.0; terms];
    if terms == 0 {
        return c;
    }
    c[0] = 1.0;
    let mut factor = vec![0.0; terms];
    let mut next = vec![0.0; terms];
    for &w in weights {
        // w^k / k!
        let mut f = 1.0;
        for (k, slot) in factor.iter_mut().enumerate().skip(1) {
            f *= w / k as f64;
            *slot = f;
        }
        for j in 0..terms {
            next[j] = (1..=j).map(|k| factor[k] * c[j - k]).sum();
        }
        std::mem::swap(&mut c, &mut next);
    }
    let mut fact = 1.0;
    for (j, v) in c.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *v *= fact;
    }
    c
}

/// Success and error probabilities for a criterion of order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickProbabilities {
    pub order: usize,
    /// `R_n`: the designated `n` channels all click.
    pub success: f64,
    /// `R_{n+1}`: all `n + 1` channels click.
    pub error: f64,
}

impl ClickProbabilities {
    pub fn new(order: usize, success: f64, error: f64) -> Result<Self> {
        let success = crate::error::in_unit_interval("success", success)?;
        let error = crate::error::in_unit_interval("error", error)?;
        Ok(Self { order, success, error })
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

fn checked_probability(what: &'static str, value: f64) -> Result<f64> {
    if !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&value) {
        return Err(QngError::ProbabilityOutOfBounds { what, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Probability that every channel in `group` clicks.
///
/// Uses the size-indexed sum for symmetric profiles and the explicit subset
/// expansion otherwise.
pub fn click_success<P: NoClickProfile + ?Sized>(profile: &P, group: &[usize]) -> Result<f64> {
    validate_subset(group, profile.channels())?;
    if group.is_empty() {
        return Ok(1.0);
    }
    if let Some(p) = profile.direct_click(group) {
        return checked_probability("click success", p);
    }
    if profile.is_symmetric() {
        click_success_by_size(profile, group.len())
    } else {
        click_success_by_subsets(profile, group)
    }
}

/// `R_n = 1 + Σ_{k=1}^n C(n,k) (-1)^k R_{0,k}` for a symmetric profile.
pub fn click_success_by_size<P: NoClickProfile + ?Sized>(profile: &P, n: usize) -> Result<f64> {
    if n > profile.channels() {
        return Err(QngError::InvalidSubset(format!(
            "group of {n} channels on a {}-channel profile",
            profile.channels()
        )));
    }
    // Σ_k C(n,k)(-1)^k = 0 for n ≥ 1, so R_n = -Σ_{k≥1} C(n,k)(-1)^k (1 - R_{0,k}).
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let bright = -profile.ln_no_click_size(k)?.exp_m1();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        terms.push(sign * binomial(n, k) * bright);
    }
    checked_probability("click success", compensated_sum(terms))
}

/// Inclusion–exclusion over every nonempty subset of `group`.
pub fn click_success_by_subsets<P: NoClickProfile + ?Sized>(profile: &P, group: &[usize]) -> Result<f64> {
    validate_subset(group, profile.channels())?;
    let n = group.len();
    if n >= usize::BITS as usize - 1 {
        return Err(QngError::InvalidSubset("group too large for subset expansion".into()));
    }
    let mut terms = Vec::with_capacity((1usize << n) - 1);
    let mut subset = Vec::with_capacity(n);
    for mask in 1usize..(1 << n) {
        subset.clear();
        subset.extend((0..n).filter(|b| mask & (1 << b) != 0).map(|b| group[b]));
        let bright = -profile.ln_no_click(&subset)?.exp_m1();
        let sign = if subset.len() % 2 == 1 { 1.0 } else { -1.0 };
        terms.push(sign * bright);
    }
    checked_probability("click success", compensated_sum(terms))
}

/// Success `R_n` over the profile's designated group and error `R_{n+1}`
/// over all `n + 1` channels.
pub fn click_stats<P: NoClickProfile + ?Sized>(profile: &P, order: usize) -> Result<ClickProbabilities> {
    if order == 0 {
        return Err(QngError::ZeroOrder);
    }
    if profile.channels() != order + 1 {
        return Err(QngError::OrderMismatch {
            order,
            channels: profile.channels(),
        });
    }
    let group = profile.success_group();
    let all: Vec<usize> = (0..=order).collect();
    let success = click_success(profile, &group)?;
    let error = click_success(profile, &all)?;
    Ok(ClickProbabilities { order, success, error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn attenuation_examples() {
        let d4 = DetectorConfig::symmetric(4).unwrap();
        assert_abs_diff_eq!(d4.effective_attenuation(&[0, 1]).unwrap(), 0.5, epsilon = 1e-15);
        let d3 = DetectorConfig::symmetric(3).unwrap();
        assert_abs_diff_eq!(d3.effective_attenuation(&[0]).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let d = DetectorConfig::new(vec![0.5, 0.3, 0.2], vec![1.0, 0.5, 1.0], None).unwrap();
        assert_abs_diff_eq!(d.effective_attenuation(&[1, 2]).unwrap(), 0.35, epsilon = 1e-15);
        assert!(!d.is_symmetric());
        assert!(matches!(d.effective_attenuation(&[3]), Err(QngError::InvalidSubset(_))));
        assert!(matches!(
            d.effective_attenuation(&[1, 1]),
            Err(QngError::InvalidSubset(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(DetectorConfig::new(vec![0.5, 0.6], vec![1.0, 1.0], None).is_err());
        assert!(DetectorConfig::new(vec![0.5, 0.5], vec![1.0, 1.2], None).is_err());
        assert!(DetectorConfig::new(vec![0.5, 0.5], vec![1.0], None).is_err());
        assert!(DetectorConfig::new(vec![1.5, -0.5], vec![1.0, 1.0], None).is_err());
        assert!(DetectorConfig::new(vec![0.5, 0.5], vec![1.0, 1.0], Some(vec![0, 1])).is_err());
        let d = DetectorConfig::new(vec![0.5, 0.5], vec![1.0, 1.0], Some(vec![1])).unwrap();
        assert_eq!(d.success_group(), &[1]);
        let s = DetectorConfig::symmetric(5).unwrap();
        assert!(s.is_symmetric());
        assert_eq!(s.success_group(), &[0, 1, 2, 3]);
    }

    #[test]
    fn json_schema() {
        let d = DetectorConfig::from_json_str(r#"{"symmetric": 3}"#).unwrap();
        assert_eq!(d, DetectorConfig::symmetric(3).unwrap());
        let d = DetectorConfig::from_json_str(
            r#"{"channels": 3, "splitting": [0.5, 0.3, 0.2], "efficiencies": [1, 0.5, 1]}"#,
        )
        .unwrap();
        assert_eq!(d.efficiencies(), &[1.0, 0.5, 1.0]);
        let back: DetectorConfig = serde_json::from_value(serde_json::to_value(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        for bad in [
            r#"{"channels": 2, "splitting": [0.5, 0.3, 0.2]}"#,
            r#"{"symmetric": 2, "splitting": [0.5, 0.5]}"#,
            r#"{"symmetric": 0}"#,
            r#"{}"#,
            r#"{"symmetric": 2, "bogus": 1}"#,
        ] {
            assert!(DetectorConfig::from_json_str(bad).is_err(), "{bad}");
        }
        let err = DetectorConfig::from_json_str("{\n  \"symmetric\": 2,\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn gaussian_profile_examples() {
        let d5 = DetectorConfig::symmetric(5).unwrap();
        let vac = gaussian_no_click_profile(SqueezedCoherent::vacuum(), &d5);
        for k in 0..=5 {
            assert_eq!(vac.ln_no_click_size(k).unwrap().exp(), 1.0);
        }
        let d2 = DetectorConfig::symmetric(2).unwrap();
        let coh = gaussian_no_click_profile(SqueezedCoherent::coherent(1.0).unwrap(), &d2);
        assert_abs_diff_eq!(coh.no_click(&[0]).unwrap(), (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(coh.no_click(&[0, 1]).unwrap(), 0.367879, epsilon = 1e-6);
        let sq = gaussian_no_click_profile(SqueezedCoherent::squeezed_vacuum(0.5).unwrap(), &d2);
        assert_abs_diff_eq!(sq.ln_no_click_size(2).unwrap().exp(), 0.94281, epsilon = 1e-5);
    }

    #[test]
    fn click_success_examples() {
        let d2 = DetectorConfig::symmetric(2).unwrap();
        let coh = gaussian_no_click_profile(SqueezedCoherent::coherent(1.0).unwrap(), &d2);
        let h = (-0.5f64).exp();
        assert_abs_diff_eq!(click_success(&coh, &[0]).unwrap(), 1.0 - h, epsilon = 1e-15);
        assert_eq!(click_success(&coh, &[]).unwrap(), 1.0);
        let r2 = click_success(&coh, &[0, 1]).unwrap();
        assert_abs_diff_eq!(r2, 1.0 - 2.0 * h + h * h, epsilon = 1e-15);
        assert_abs_diff_eq!(r2, 0.154818, epsilon = 1e-6);

        let stats = click_stats(&coh, 1).unwrap();
        assert_abs_diff_eq!(stats.success, 0.393469, epsilon = 1e-6);
        assert_abs_diff_eq!(stats.error, 0.154818, epsilon = 1e-6);
        assert!(matches!(click_stats(&coh, 2), Err(QngError::OrderMismatch { .. })));
        assert!(matches!(click_stats(&coh, 0), Err(QngError::ZeroOrder)));
    }

    #[test]
    fn vacuum_never_clicks() {
        for n in 1..5 {
            let d = DetectorConfig::symmetric(n + 1).unwrap();
            let p = gaussian_no_click_profile(SqueezedCoherent::vacuum(), &d);
            let s = click_stats(&p, n).unwrap();
            assert_eq!((s.success, s.error), (0.0, 0.0));
        }
    }

    #[test]
    fn designated_group_is_used() {
        let d = DetectorConfig::new(vec![0.5, 0.3, 0.2], vec![1.0, 1.0, 1.0], Some(vec![1, 2])).unwrap();
        let state = SqueezedCoherent::coherent(1.2).unwrap();
        let p = gaussian_no_click_profile(state, &d);
        let s = click_stats(&p, 2).unwrap();
        let a2: f64 = 1.44;
        let expected = (1.0 - (-0.3 * a2).exp()) * (1.0 - (-0.2 * a2).exp());
        assert_abs_diff_eq!(s.success, expected, epsilon = 1e-14);
    }

    #[test]
    fn out_of_bounds_is_an_error() {
        struct Broken;
        impl NoClickProfile for Broken {
            fn channels(&self) -> usize {
                2
            }
            // R_{0,{0}} = 0.2 but R_{0,{0,1}} = 0.9 breaks monotonicity
            fn ln_no_click(&self, subset: &[usize]) -> Result<f64> {
                Ok(match subset.len() {
                    0 => 0.0,
                    1 => 0.2f64.ln(),
                    _ => 0.9f64.ln(),
                })
            }
        }
        assert!(matches!(
            click_success(&Broken, &[0, 1]),
            Err(QngError::ProbabilityOutOfBounds { .. })
        ));
    }

    #[test]
    fn compensated_sum_recovers_small_residual() {
        let terms = [1.0, 1e-17, -1.0, 1e-17];
        assert_eq!(compensated_sum(terms), 2e-17);
    }

    #[test]
    fn weak_series_matches_inclusion_exclusion() {
        let d = DetectorConfig::new(vec![0.4, 0.25, 0.2, 0.15], vec![0.9, 1.0, 0.8, 1.0], None).unwrap();
        for (amp, angle, v) in [(0.2, 0.3, 0.95), (0.1, 1.2, 0.9), (0.0, 0.0, 0.8), (0.3, 0.0, 1.0)] {
            let state = SqueezedCoherent::new(amp, angle, v).unwrap();
            let p = gaussian_no_click_profile(state, &d);
            for group in [vec![0], vec![1, 3], vec![0, 2, 3], vec![0, 1, 2, 3]] {
                let series = p.direct_click(&group).expect("weak state");
                let direct = click_success_by_subsets(&p, &group).unwrap();
                assert!(
                    (series - direct).abs() < 1e-15 + 1e-9 * direct,
                    "{group:?}: {series} vs {direct}"
                );
            }
        }
        let bright = gaussian_no_click_profile(SqueezedCoherent::coherent(2.0).unwrap(), &d);
        assert!(bright.direct_click(&[0, 1]).is_none());
    }

    /// `R_n` for `n` equal channels of share `h` from the photon-number
    /// distribution: `Σ_m p_m Σ_j C(m,j) h^j (1 - nh)^{m-j} n! S(j,n)`.
    fn fock_symmetric_click(state: &SqueezedCoherent, n: usize, h: f64) -> f64 {
        let p = crate::gaussian::photon_number_distribution(state, 0).unwrap();
        let m_max = p.len();
        // surj[j] = n! S(j, n)
        let mut stirling = vec![vec![0.0f64; n + 1]; m_max];
        stirling[0][0] = 1.0;
        for j in 1..m_max {
            for k in 1..=n {
                stirling[j][k] = k as f64 * stirling[j - 1][k] + stirling[j - 1][k - 1];
            }
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let rest = 1.0 - n as f64 * h;
        let mut total = 0.0;
        for (m, pm) in p.iter().enumerate() {
            let mut c = 0.0;
            for (j, row) in stirling.iter().enumerate().take(m + 1).skip(n) {
                c += binomial(m, j) * h.powi(j as i32) * rest.powi((m - j) as i32) * fact * row[n];
            }
            total += pm * c;
        }
        total
    }

    #[test]
    fn weak_series_matches_fock_oracle() {
        for n in 2..=4 {
            let d = DetectorConfig::symmetric(n + 1).unwrap();
            let h = 1.0 / (n + 1) as f64;
            for (amp, angle, v) in [(0.01, 0.3, 0.999), (0.003, 0.0, 0.9995), (1e-3, 1.4, 0.99999)] {
                let state = SqueezedCoherent::new(amp, angle, v).unwrap();
                let p = gaussian_no_click_profile(state, &d);
                let all: Vec<usize> = (0..=n).collect();
                let series = click_success(&p, &all).unwrap();
                let oracle = fock_symmetric_click(&state, n + 1, h);
                assert!(oracle > 0.0);
                assert!(
                    (series - oracle).abs() < 1e-9 * oracle,
                    "n={n}: {series:e} vs {oracle:e}"
                );
            }
        }
    }
}
