//! Hierarchy of non-Gaussianity criteria for multi-channel click statistics.
//!
//! For order `n` and a penalty `a < 0`, the functional `R_n + a·R_{n+1}` is
//! maximized over pure squeezed coherent states. Mixtures of Gaussian states
//! cannot exceed that maximum `F_n(a)` since the functional is linear in the
//! state. Observed statistics with `R_n + a·R_{n+1} > F_n(a)` for some `a`
//! therefore certify non-Gaussianity. Sweeping `a` traces the boundary of the
//! Gaussian-attainable region in the `(R_{n+1}, R_n)` plane.
//!
//! Maximization runs a box-constrained simplex search in the coordinates
//! `(ln |α|, φ, ln 2r)` from a fixed seed grid plus optional seeded random
//! starts. Logarithmic coordinates keep the search well scaled for the very
//! weak states that dominate at large `|a|`.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{click_stats, ClickProbabilities, DetectorConfig, GaussianProfile};
use crate::error::{QngError, Result};
use crate::gaussian::SqueezedCoherent;
use crate::hermite::{hermite, hermite_roots};
use crate::optimize::{Bounds, NelderMead};

/// Margin a witness must exceed, relative to the magnitude of its terms.
pub const DECISION_TOL: f64 = 1e-9;

/// Target accuracy of `F_n(a)`.
pub const OPT_TOL: f64 = 1e-9;

const AMP_FLOOR: f64 = 1e-9;
const SQUEEZE_FLOOR: f64 = 1e-14;

/// Order `n ≥ 1` of a criterion; the detector has `n + 1` channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct CriterionOrder(usize);

impl CriterionOrder {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            Err(QngError::ZeroOrder)
        } else {
            Ok(Self(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn channels(self) -> usize {
        self.0 + 1
    }
}

impl TryFrom<usize> for CriterionOrder {
    type Error = QngError;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<CriterionOrder> for usize {
    fn from(o: CriterionOrder) -> usize {
        o.0
    }
}

fn check_detector(order: CriterionOrder, config: &DetectorConfig) -> Result<()> {
    if config.channels() != order.channels() {
        return Err(QngError::OrderMismatch {
            order: order.get(),
            channels: config.channels(),
        });
    }
    Ok(())
}

/// `R_n + a·R_{n+1}` for one squeezed coherent state.
pub fn functional_value(
    a: f64,
    order: CriterionOrder,
    state: &SqueezedCoherent,
    config: &DetectorConfig,
) -> Result<f64> {
    crate::error::finite("a", a)?;
    check_detector(order, config)?;
    let stats = click_stats(&GaussianProfile::new(*state, config), order.get())?;
    Ok(stats.success + a * stats.error)
}

/// Search settings for [`maximize_functional`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    pub amp_max: f64,
    pub min_var_min: f64,
    pub amp_seeds: usize,
    pub angle_seeds: usize,
    pub squeeze_seeds: usize,
    /// Extra uniformly drawn starts on top of the grid.
    pub random_starts: usize,
    pub seed: u64,
    /// Number of best-scoring starts that get a full simplex search.
    pub refined_starts: usize,
    /// How often the box may double before a boundary argmax is reported.
    pub max_expansions: usize,
    pub simplex: NelderMead,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            amp_max: 10.0,
            min_var_min: 1e-3,
            amp_seeds: 5,
            angle_seeds: 5,
            squeeze_seeds: 7,
            random_starts: 4,
            seed: 0,
            refined_starts: 24,
            max_expansions: 4,
            simplex: NelderMead::default(),
        }
    }
}

impl OptimizerSettings {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn bounds(&self) -> Bounds<3> {
        Bounds {
            lower: [AMP_FLOOR.ln(), 0.0, SQUEEZE_FLOOR.ln()],
            upper: [self.amp_max.ln(), FRAC_PI_2, (-self.min_var_min.ln()).ln()],
        }
    }

    fn starts(&self) -> Vec<[f64; 3]> {
        // amp² log-spaced over [1e-6, amp_max²]; 2r log-spaced over [1e-6, -ln V_min]
        let lin = |lo: f64, hi: f64, k: usize, i: usize| {
            if k <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (k - 1) as f64
            }
        };
        let (amp_lo, amp_hi) = (1e-6f64.ln() / 2.0, self.amp_max.ln());
        let (sq_lo, sq_hi) = (1e-6f64.ln(), (-self.min_var_min.ln()).ln());
        let mut starts = Vec::new();
        for i in 0..self.amp_seeds {
            for j in 0..self.angle_seeds {
                for k in 0..self.squeeze_seeds {
                    starts.push([
                        lin(amp_lo, amp_hi, self.amp_seeds, i),
                        lin(0.0, FRAC_PI_2, self.angle_seeds, j),
                        lin(sq_lo, sq_hi, self.squeeze_seeds, k),
                    ]);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_starts {
            starts.push([
                rng.gen_range(amp_lo..=amp_hi),
                rng.gen_range(0.0..=FRAC_PI_2),
                rng.gen_range(sq_lo..=sq_hi),
            ]);
        }
        starts
    }

    /// Indices of the starts that get a full search: the best squeezing seed
    /// of every (amplitude, angle) seed pair, then the overall best
    /// `refined_starts`. Ordered by value, ties by index.
    fn select_starts(&self, values: &[f64]) -> Vec<usize> {
        let by_value = |p: &usize, q: &usize| values[*q].total_cmp(&values[*p]).then(p.cmp(q));
        let mut chosen = Vec::new();
        let column = self.squeeze_seeds.max(1);
        let mut grid = self.amp_seeds * self.angle_seeds * self.squeeze_seeds;
        if values.len() < grid {
            // warm starts only
            grid = 0;
        }
        for c in (0..grid).step_by(column) {
            let best = (c..c + column).min_by(by_value).expect("nonempty column");
            chosen.push(best);
        }
        let mut ranked: Vec<usize> = (0..values.len()).collect();
        ranked.sort_by(by_value);
        chosen.extend(ranked.into_iter().take(self.refined_starts));
        chosen.sort_by(by_value);
        chosen.dedup();
        chosen
    }
}

fn state_from_coords(x: &[f64; 3]) -> SqueezedCoherent {
    let amp = x[0].exp();
    let min_var = (-x[2].exp()).exp();
    SqueezedCoherent::new(amp, x[1], min_var).unwrap_or_else(|_| SqueezedCoherent::vacuum())
}

fn coords_from_state(s: &SqueezedCoherent) -> [f64; 3] {
    let two_r = (-s.min_var().ln()).max(SQUEEZE_FLOOR);
    [s.amp().max(AMP_FLOOR).ln(), s.angle(), two_r.ln()]
}

/// Maximum of the functional over the searched family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMaximum {
    pub a: f64,
    /// `F_n(a)`.
    pub value: f64,
    pub state: SqueezedCoherent,
    pub stats: ClickProbabilities,
    /// The argmax stayed on the search box edge after all expansions.
    pub at_boundary: bool,
}

struct Objective<'a> {
    a: f64,
    order: usize,
    config: &'a DetectorConfig,
}

impl Objective<'_> {
    fn stats(&self, state: SqueezedCoherent) -> Result<ClickProbabilities> {
        click_stats(&GaussianProfile::new(state, self.config), self.order)
    }

    fn value(&self, x: &[f64; 3]) -> f64 {
        match self.stats(state_from_coords(x)) {
            Ok(s) => s.success + self.a * s.error,
            Err(_) => f64::NAN,
        }
    }

    fn search(&self, starts: &[[f64; 3]], settings: &OptimizerSettings) -> [f64; 3] {
        let bounds = settings.bounds();
        let step = [1.0, 0.2, 1.0];
        let values: Vec<f64> = starts
            .iter()
            .map(|x| {
                let v = self.value(x);
                if v.is_nan() {
                    f64::NEG_INFINITY
                } else {
                    v
                }
            })
            .collect();
        let chosen = settings.select_starts(&values);
        let mut best = (f64::NEG_INFINITY, starts[chosen[0]]);
        for x0 in chosen.iter().map(|&i| &starts[i]) {
            let m = settings.simplex.minimize(|x| -self.value(x), *x0, step, &bounds);
            // strict improvement keeps the earliest start on ties
            if -m.f > best.0 {
                best = (-m.f, m.x);
            }
        }
        self.polish(best, settings)
    }

    /// Reruns the simplex from the best point with shrinking initial steps,
    /// which walks narrow ridges a large simplex steps over.
    fn polish(&self, mut best: (f64, [f64; 3]), settings: &OptimizerSettings) -> [f64; 3] {
        let bounds = settings.bounds();
        for scale in [1e-2, 1e-4] {
            let step = [scale, 0.2 * scale, scale];
            let m = settings.simplex.minimize(|x| -self.value(x), best.1, step, &bounds);
            if -m.f > best.0 {
                best = (-m.f, m.x);
            }
        }
        best.1
    }

    fn finish(&self, x: [f64; 3], at_boundary: bool) -> Result<GaussianMaximum> {
        let state = state_from_coords(&x);
        let stats = self.stats(state)?;
        Ok(GaussianMaximum {
            a: self.a,
            value: stats.success + self.a * stats.error,
            state,
            stats,
            at_boundary,
        })
    }
}

fn check_a(a: f64) -> Result<()> {
    crate::error::finite("a", a)?;
    if a >= 0.0 {
        return Err(QngError::NonNegativeA(a));
    }
    Ok(())
}

/// `F_n(a) = max R_n + a·R_{n+1}` over pure squeezed coherent states.
///
/// The search box is `|α| ≤ amp_max`, `V ≥ min_var_min`; it is doubled
/// whenever the argmax lies within 1% of its edge, up to `max_expansions`
/// times, after which the result carries `at_boundary = true`.
pub fn maximize_functional(
    a: f64,
    order: CriterionOrder,
    config: &DetectorConfig,
    settings: &OptimizerSettings,
) -> Result<GaussianMaximum> {
    check_a(a)?;
    check_detector(order, config)?;
    let objective = Objective {
        a,
        order: order.get(),
        config,
    };
    let mut s = settings.clone();
    for expansion in 0..=settings.max_expansions {
        let x = objective.search(&s.starts(), &s);
        let state = state_from_coords(&x);
        let near_amp = state.amp() >= 0.99 * s.amp_max;
        let near_var = state.min_var() <= 1.01 * s.min_var_min;
        if !(near_amp || near_var) {
            return objective.finish(x, false);
        }
        if expansion == settings.max_expansions {
            return objective.finish(x, true);
        }
        if near_amp {
            s.amp_max *= 2.0;
        }
        if near_var {
            s.min_var_min /= 2.0;
        }
    }
    unreachable!("loop returns on its last iteration")
}

/// Grid of penalties and the witness decision tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSettings {
    pub a_min: f64,
    pub a_max: f64,
    pub grid_points: usize,
    /// Golden-section stopping width in `log10 |a|`.
    pub refine_tol: f64,
    pub decision_tol: f64,
}

impl Default for WitnessSettings {
    fn default() -> Self {
        Self {
            a_min: -1e7,
            a_max: -1e-3,
            grid_points: 200,
            refine_tol: 1e-5,
            decision_tol: DECISION_TOL,
        }
    }
}

impl WitnessSettings {
    /// Log-spaced negative grid from `a_min` to `a_max`, ascending.
    pub fn a_grid(&self) -> Result<Vec<f64>> {
        log_a_grid(self.a_min, self.a_max, self.grid_points)
    }
}

/// `points` penalties `-10^u` with `u` evenly spaced, ordered from `a_min`
/// (most negative) to `a_max`.
pub fn log_a_grid(a_min: f64, a_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(a_min.is_finite() && a_max.is_finite()) || a_max >= 0.0 || a_min > a_max || points == 0 {
        return Err(QngError::InvalidGrid(format!(
            "need a_min <= a_max < 0 and at least one point, got [{a_min}, {a_max}] x {points}"
        )));
    }
    if points == 1 {
        return Ok(vec![a_min]);
    }
    let (hi, lo) = ((-a_min).log10(), (-a_max).log10());
    Ok((0..points)
        .map(|i| -(10f64.powf(hi + (lo - hi) * i as f64 / (points - 1) as f64)))
        .collect())
}

/// Outcome of testing observed statistics against the Gaussian bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub witnessed: bool,
    /// Certifying penalty; `-inf` when the error probability is exactly zero.
    pub best_a: f64,
    /// `R_n + a·R_{n+1} - F_n(a)` at `best_a`.
    pub margin: f64,
    /// Largest `R_n` a Gaussian mixture reaches at the observed `R_{n+1}`,
    /// as certified by `best_a`.
    pub threshold_success: f64,
    /// Tolerance the margin was compared against.
    pub tolerance: f64,
}

/// `F_n(a)` tabulated on a penalty grid for one order and detector, reused
/// across witness tests.
#[derive(Debug, Clone)]
pub struct GaussianBound {
    order: CriterionOrder,
    config: DetectorConfig,
    optimizer: OptimizerSettings,
    settings: WitnessSettings,
    table: Vec<GaussianMaximum>,
}

impl GaussianBound {
    pub fn new(
        order: CriterionOrder,
        config: DetectorConfig,
        optimizer: OptimizerSettings,
        settings: WitnessSettings,
    ) -> Result<Self> {
        check_detector(order, &config)?;
        let grid = settings.a_grid()?;
        let table = grid
            .par_iter()
            .map(|&a| maximize_functional(a, order, &config, &optimizer))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order,
            config,
            optimizer,
            settings,
            table,
        })
    }

    /// Bound for a symmetric `(n + 1)`-channel detector with default settings.
    pub fn symmetric(order: CriterionOrder) -> Result<Self> {
        Self::new(
            order,
            DetectorConfig::symmetric(order.channels())?,
            OptimizerSettings::default(),
            WitnessSettings::default(),
        )
    }

    pub fn order(&self) -> CriterionOrder {
        self.order
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn table(&self) -> &[GaussianMaximum] {
        &self.table
    }

    /// `F_n(a)` at an arbitrary penalty. Inside the grid the search starts
    /// from the maximizers at the two neighbouring grid points.
    pub fn value_at(&self, a: f64) -> Result<GaussianMaximum> {
        check_a(a)?;
        let hi = self.table.partition_point(|m| m.a < a);
        if hi < self.table.len() && self.table[hi].a == a {
            return Ok(self.table[hi]);
        }
        if hi == 0 || hi == self.table.len() {
            return maximize_functional(a, self.order, &self.config, &self.optimizer);
        }
        let objective = Objective {
            a,
            order: self.order.get(),
            config: &self.config,
        };
        let starts = [
            coords_from_state(&self.table[hi - 1].state),
            coords_from_state(&self.table[hi].state),
        ];
        let x = objective.search(&starts, &self.optimizer);
        let at_boundary = self.table[hi - 1].at_boundary || self.table[hi].at_boundary;
        objective.finish(x, at_boundary)
    }

    /// Tests `R_n + a·R_{n+1} > F_n(a)` over the penalty grid, then refines
    /// the best penalty by golden-section search on `log10 |a|`.
    pub fn witness(&self, stats: &ClickProbabilities) -> Result<WitnessResult> {
        if stats.order != self.order.get() {
            return Err(QngError::OrderMismatch {
                order: stats.order,
                channels: self.config.channels(),
            });
        }
        let s = crate::error::in_unit_interval("success", stats.success)?;
        let e = crate::error::in_unit_interval("error", stats.error)?;
        if e == 0.0 {
            // F_n(a) -> 0 as a -> -inf, so the supremum of the margin is R_n itself
            let tolerance = self.settings.decision_tol * s.max(f64::MIN_POSITIVE);
            return Ok(WitnessResult {
                witnessed: s > tolerance,
                best_a: f64::NEG_INFINITY,
                margin: s,
                threshold_success: 0.0,
                tolerance,
            });
        }
        let margin_of = |m: &GaussianMaximum| s + m.a * e - m.value;

        let (mut best_idx, mut best_margin) = (0, f64::NEG_INFINITY);
        for (i, m) in self.table.iter().enumerate() {
            let v = margin_of(m);
            if v > best_margin {
                best_idx = i;
                best_margin = v;
            }
        }
        let mut best = self.table[best_idx];

        if self.table.len() > 1 {
            let u = |m: &GaussianMaximum| (-m.a).log10();
            let lo_idx = best_idx.saturating_sub(1);
            let hi_idx = (best_idx + 1).min(self.table.len() - 1);
            // u decreases along the table
            let (mut lo, mut hi) = (u(&self.table[hi_idx]), u(&self.table[lo_idx]));
            let eval = |uu: f64| -> Result<(f64, GaussianMaximum)> {
                let m = self.value_at(-(10f64.powf(uu)))?;
                Ok((margin_of(&m), m))
            };
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = hi - g * (hi - lo);
            let mut x2 = lo + g * (hi - lo);
            let mut f1 = eval(x1)?;
            let mut f2 = eval(x2)?;
            while hi - lo > self.settings.refine_tol {
                if f1.0 >= f2.0 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = eval(x1)?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = eval(x2)?;
                }
            }
            for (v, m) in [f1, f2] {
                if v > best_margin {
                    best_margin = v;
                    best = m;
                }
            }
        }

        let scale = (s + best.a.abs() * e + best.value.abs()).max(f64::MIN_POSITIVE);
        let tolerance = self.settings.decision_tol * scale;
        Ok(WitnessResult {
            witnessed: best_margin > tolerance,
            best_a: best.a,
            margin: best_margin,
            threshold_success: (s - best_margin).clamp(0.0, 1.0),
            tolerance,
        })
    }
}

/// One-shot witness test on a fresh default bound. Prefer building a
/// [`GaussianBound`] once when testing many statistics.
pub fn witness(stats: &ClickProbabilities, order: CriterionOrder, config: &DetectorConfig) -> Result<WitnessResult> {
    GaussianBound::new(
        order,
        config.clone(),
        OptimizerSettings::default(),
        WitnessSettings::default(),
    )?
    .witness(stats)
}

/// Boundary point of the Gaussian-attainable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub a: f64,
    pub error: f64,
    pub success_bound: f64,
    pub optimal_state: SqueezedCoherent,
    pub at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub order: CriterionOrder,
    /// Sorted by error, starting at the vacuum point `(0, 0)`.
    pub points: Vec<ThresholdPoint>,
}

impl ThresholdCurve {
    /// Gaussian bound on `R_n` at the given error, interpolated linearly
    /// between curve points. `None` beyond the last point.
    pub fn success_bound_at(&self, error: f64) -> Option<f64> {
        let i = self.points.partition_point(|p| p.error < error);
        if i == 0 {
            return self.points.first().map(|p| p.success_bound);
        }
        let hi = self.points.get(i)?;
        let lo = &self.points[i - 1];
        let w = (error - lo.error) / (hi.error - lo.error);
        Some(lo.success_bound + w * (hi.success_bound - lo.success_bound))
    }
}

/// Parametric boundary `(R_{n+1}(ρ*(a)), R_n(ρ*(a)))` over `a_grid`.
///
/// The vacuum limit `(0, 0)` (reached as `a → -∞`) is always included.
/// Points dominated by another point (larger error, smaller success) cannot
/// be boundary points and are dropped.
pub fn threshold_curve(
    order: CriterionOrder,
    a_grid: &[f64],
    config: &DetectorConfig,
    settings: &OptimizerSettings,
) -> Result<ThresholdCurve> {
    if a_grid.is_empty() {
        return Err(QngError::InvalidGrid("empty penalty grid".into()));
    }
    if a_grid.iter().any(|a| !a.is_finite() || *a >= 0.0) {
        return Err(QngError::InvalidGrid("penalties must be finite and negative".into()));
    }
    if a_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(QngError::InvalidGrid("penalty grid must be sorted ascending".into()));
    }
    check_detector(order, config)?;
    let maxima = a_grid
        .par_iter()
        .map(|&a| maximize_functional(a, order, config, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(curve_from_maxima(order, &maxima))
}

pub(crate) fn curve_from_maxima(order: CriterionOrder, maxima: &[GaussianMaximum]) -> ThresholdCurve {
    let mut raw: Vec<ThresholdPoint> = maxima
        .iter()
        .map(|m| ThresholdPoint {
            a: m.a,
            error: m.stats.error,
            success_bound: m.stats.success,
            optimal_state: m.state,
            at_boundary: m.at_boundary,
        })
        .collect();
    raw.sort_by(|p, q| {
        p.error
            .total_cmp(&q.error)
            .then(p.success_bound.total_cmp(&q.success_bound))
    });

    let mut points = vec![ThresholdPoint {
        a: f64::NEG_INFINITY,
        error: 0.0,
        success_bound: 0.0,
        optimal_state: SqueezedCoherent::vacuum(),
        at_boundary: false,
    }];
    for p in raw {
        let last = points.last().expect("curve starts with the vacuum point");
        if p.success_bound < last.success_bound {
            continue;
        }
        if p.error == last.error && p.success_bound == last.success_bound {
            continue;
        }
        points.push(p);
    }
    ThresholdCurve { order, points }
}

/// Weak-light asymptote `R_n^{n+2} > C_n R_{n+1}^n` of the threshold curve,
/// with `C_n = H_n(x)^4 / (2(n+1)^3)^n` and `x` a root of `H_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub order: usize,
    pub root: f64,
    pub coefficient: f64,
}

impl Asymptote {
    fn at_root(order: usize, root: f64) -> Self {
        let n = order as i32;
        let denom = (2.0 * ((order + 1) as f64).powi(3)).powi(n);
        Self {
            order,
            root,
            coefficient: hermite(order, root).powi(4) / denom,
        }
    }

    /// Asymptotic Gaussian bound `(C_n R_{n+1}^n)^{1/(n+2)}` on `R_n`.
    pub fn success_bound(&self, error: f64) -> f64 {
        let n = self.order as f64;
        (self.coefficient * error.powf(n)).powf(1.0 / (n + 2.0))
    }

    /// `C_n^{1/n}`, the form entering the emitter-ensemble bounds.
    pub fn coefficient_root(&self) -> f64 {
        self.coefficient.powf(1.0 / self.order as f64)
    }
}

/// One candidate per distinct `|root|` of `H_{n+1}` (the coefficient is even
/// in the root), ordered by decreasing coefficient.
pub fn asymptote_candidates(order: CriterionOrder) -> Vec<Asymptote> {
    let n = order.get();
    let mut out: Vec<Asymptote> = hermite_roots(n + 1)
        .into_iter()
        .filter(|&r| r >= 0.0)
        .map(|r| Asymptote::at_root(n, r))
        .collect();
    out.sort_by(|p, q| q.coefficient.total_cmp(&p.coefficient));
    out
}

/// Asymptote at the root of `H_{n+1}` maximizing `H_n(x)^4`.
pub fn asymptote(order: CriterionOrder) -> Asymptote {
    asymptote_candidates(order)[0]
}

/// `C_n` of the selected asymptote.
pub fn approx_threshold_coefficient(order: CriterionOrder) -> f64 {
    asymptote(order).coefficient
}
