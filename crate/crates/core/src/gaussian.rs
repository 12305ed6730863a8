//! Pure single-mode squeezed coherent states and their vacuum response.
//!
//! A state is described by its coherent amplitude `|α|`, the angle between the
//! amplitude and the minimal-variance quadrature axis, and the minimal
//! quadrature variance `V` in shot-noise units (`V = 1` for coherent light).
//! The anti-squeezed variance is `1/V`, and `V = e^{-2r}` for squeeze
//! parameter `r`.
//!
//! The vacuum response `<(1 - t)^n>` is the probability that an on/off
//! detector seeing a fraction `t` of the mode stays dark. It is evaluated in
//! closed form from the covariance matrix and mean vector. [`no_click_oracle`]
//! recomputes the same quantity from a truncated photon-number expansion and
//! exists to cross-check the closed form.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{finite, in_unit_interval, QngError, Result};

/// Accepted probability mass missing from a truncated Fock expansion.
pub const TAIL_TOL: f64 = 1e-12;

/// First cutoff tried by the adaptive Fock expansion.
pub const INITIAL_CUTOFF: usize = 32;

const MAX_CUTOFF: usize = 1 << 16;

/// Pure squeezed coherent state, kept in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherent {
    amp: f64,
    angle: f64,
    min_var: f64,
}

impl SqueezedCoherent {
    /// Builds a state and folds the angle into `[0, π/2]`.
    ///
    /// A variance above one is interpreted as the anti-squeezed quadrature:
    /// the pair is swapped and the angle is measured from the other axis.
    pub fn new(amp: f64, angle: f64, min_var: f64) -> Result<Self> {
        finite("amp", amp)?;
        finite("angle", angle)?;
        finite("min_var", min_var)?;
        if amp < 0.0 {
            return Err(QngError::OutOfRange {
                name: "amp",
                value: amp,
                expected: "[0, inf)",
            });
        }
        if min_var <= 0.0 {
            return Err(QngError::OutOfRange {
                name: "min_var",
                value: min_var,
                expected: "(0, inf)",
            });
        }
        let (angle, min_var) = if min_var > 1.0 {
            (angle + FRAC_PI_2, 1.0 / min_var)
        } else {
            (angle, min_var)
        };
        Ok(Self {
            amp,
            angle: canonical_angle(angle),
            min_var,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            amp: 0.0,
            angle: 0.0,
            min_var: 1.0,
        }
    }

    pub fn coherent(amp: f64) -> Result<Self> {
        Self::new(amp, 0.0, 1.0)
    }

    pub fn squeezed_vacuum(min_var: f64) -> Result<Self> {
        Self::new(0.0, 0.0, min_var)
    }

    pub fn amp(&self) -> f64 {
        self.amp
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn min_var(&self) -> f64 {
        self.min_var
    }

    /// Squeeze parameter `r` with `min_var = e^{-2r}`.
    pub fn squeeze_param(&self) -> f64 {
        -0.5 * self.min_var.ln()
    }

    pub fn is_vacuum(&self) -> bool {
        self.amp == 0.0 && self.min_var == 1.0
    }

    /// Mean photon number `|α|² + sinh² r`.
    pub fn mean_photons(&self) -> f64 {
        let s = self.squeeze_param().sinh();
        self.amp * self.amp + s * s
    }

    /// Natural log of the vacuum response at transmitted fraction `t`.
    ///
    /// Working in log space lets callers form both the no-click probability
    /// and its complement (via `exp_m1`) without cancellation.
    pub fn ln_no_click(&self, attenuation: f64) -> Result<f64> {
        let t = in_unit_interval("attenuation", attenuation)?;
        Ok(self.ln_no_click_unchecked(t))
    }

    /// Same as [`ln_no_click`](Self::ln_no_click) without range checks.
    /// Callers guarantee `t ∈ [0, 1]`.
    pub(crate) fn ln_no_click_unchecked(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let v = self.min_var;
        // Eigenvalues of t·σ + (2 - t)·I along the squeezed and anti-squeezed axes,
        // each divided by 2.
        let d_sq = 0.5 * t * (v - 1.0);
        let d_anti = 0.5 * t * (1.0 / v - 1.0);
        let (sin, cos) = self.angle.sin_cos();
        let a2 = self.amp * self.amp;
        let displacement = t * a2 * (cos * cos / (1.0 + d_sq) + sin * sin / (1.0 + d_anti));
        -0.5 * (d_sq.ln_1p() + d_anti.ln_1p()) - displacement
    }

    /// First `terms` Taylor coefficients `b_j` of `t ↦ <(1 - t)^n̂>` about
    /// `t = 0`; `(-1)^j b_j` is the `j`-th factorial moment over `j!`.
    pub fn vacuum_response_taylor(&self, terms: usize) -> Vec<f64> {
        if terms == 0 {
            return Vec::new();
        }
        let v = self.min_var;
        let (u_sq, u_anti) = (0.5 * (v - 1.0), 0.5 * (1.0 / v - 1.0));
        let (sin, cos) = self.angle.sin_cos();
        let a2 = self.amp * self.amp;
        let (w_sq, w_anti) = (a2 * cos * cos, a2 * sin * sin);

        // log-response ℓ(t) = -½ ln(1 + u t) per axis - w t / (1 + u t) per axis
        let mut log_coeff = vec![0.0; terms];
        let (mut p_sq, mut p_anti) = (1.0, 1.0); // (-u)^{j-1}
        for (j, l) in log_coeff.iter_mut().enumerate().skip(1) {
            let jf = j as f64;
            let (q_sq, q_anti) = (-u_sq * p_sq, -u_anti * p_anti); // (-u)^j
            *l = 0.5 * (q_sq + q_anti) / jf - w_sq * p_sq - w_anti * p_anti;
            p_sq = q_sq;
            p_anti = q_anti;
        }
        // exp of a power series: j b_j = Σ_k k ℓ_k b_{j-k}
        let mut b = vec![0.0; terms];
        b[0] = 1.0;
        for j in 1..terms {
            let s: f64 = (1..=j).map(|k| k as f64 * log_coeff[k] * b[j - k]).sum();
            b[j] = s / j as f64;
        }
        b
    }

    /// Rough ratio between successive Taylor terms of the vacuum response
    /// evaluated at `t`; the expansion is only used when this is small.
    pub(crate) fn series_ratio(&self, t: f64) -> f64 {
        let v = self.min_var;
        let u = (0.5 * (1.0 - v)).max(0.5 * (1.0 / v - 1.0));
        t * u.max(self.amp * self.amp)
    }
}

/// Folds any angle onto `[0, π/2]` using the invariance under `φ → -φ` and
/// `φ → φ + π`.
pub fn canonical_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(PI);
    if a > FRAC_PI_2 {
        a = PI - a;
    }
    a.clamp(0.0, FRAC_PI_2)
}

/// Probability that an on/off detector receiving fraction `t` of the mode
/// registers nothing.
pub fn no_click_expectation(state: &SqueezedCoherent, attenuation: f64) -> Result<f64> {
    Ok(state.ln_no_click(attenuation)?.exp())
}

/// Truncated photon-number amplitudes `c_0..c_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coefficients: Vec<Complex64>,
}

impl FockVector {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn cutoff(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// Expands `D(α) S(r) |0⟩` in the number basis.
///
/// With `cutoff == 0` the cutoff starts at [`INITIAL_CUTOFF`] and doubles
/// until the captured norm reaches `1 - TAIL_TOL`. A nonzero cutoff is used
/// as given and fails with [`QngError::Truncation`] if too small.
pub fn fock_coefficients(state: &SqueezedCoherent, cutoff: usize) -> Result<FockVector> {
    if cutoff > 0 {
        let v = expand(state, cutoff);
        return check_norm(v);
    }
    let mut k = INITIAL_CUTOFF;
    loop {
        let v = expand(state, k);
        match check_norm(v) {
            Ok(v) => return Ok(v),
            Err(e) if k >= MAX_CUTOFF => return Err(e),
            Err(_) => k *= 2,
        }
    }
}

fn check_norm(v: FockVector) -> Result<FockVector> {
    let norm = v.norm_sqr();
    if norm >= 1.0 - TAIL_TOL {
        Ok(v)
    } else {
        Err(QngError::Truncation {
            cutoff: v.cutoff(),
            norm,
            tail_tol: TAIL_TOL,
        })
    }
}

// The state is annihilated by μ(a - α) + ν(a† - α*) with μ = cosh r, ν = sinh r
// (squeezing along the quadrature the amplitude angle is measured from). Projecting
// onto ⟨k| gives μ√(k+1) c_{k+1} + ν√k c_{k-1} = β c_k, β = μα + να*.
fn expand(state: &SqueezedCoherent, cutoff: usize) -> FockVector {
    let r = state.squeeze_param();
    let (mu, nu) = (r.cosh(), r.sinh());
    let alpha = Complex64::from_polar(state.amp, state.angle);
    let beta = alpha * mu + alpha.conj() * nu;

    let mut c = Vec::with_capacity(cutoff + 1);
    let c0 = (-0.5 * alpha.norm_sqr() - 0.5 * alpha.conj() * alpha.conj() * r.tanh()).exp() / mu.sqrt();
    c.push(c0);
    for k in 0..cutoff {
        let prev = if k == 0 { Complex64::new(0.0, 0.0) } else { c[k - 1] };
        let next = (beta * c[k] - prev * (nu * (k as f64).sqrt())) / (mu * ((k + 1) as f64).sqrt());
        c.push(next);
    }
    FockVector { coefficients: c }
}

/// Photon-number distribution `p_n = |c_n|²`.
pub fn photon_number_distribution(state: &SqueezedCoherent, cutoff: usize) -> Result<Vec<f64>> {
    Ok(fock_coefficients(state, cutoff)?.probabilities())
}

/// Vacuum response from the truncated expansion: `Σ p_n (1 - t)^n`.
pub fn no_click_oracle(state: &SqueezedCoherent, attenuation: f64, cutoff: usize) -> Result<f64> {
    let t = in_unit_interval("attenuation", attenuation)?;
    let p = photon_number_distribution(state, cutoff)?;
    let keep = 1.0 - t;
    let mut weight = 1.0;
    let mut sum = 0.0;
    for pn in p {
        sum += pn * weight;
        weight *= keep;
    }
    Ok(sum)
}
