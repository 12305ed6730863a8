//! Box-constrained Nelder–Mead simplex search.
//!
//! Trial points are projected onto the box. A converged run is restarted from
//! its best vertex with a fresh simplex until a restart stops improving, which
//! recovers from simplices that collapsed onto a face of the box.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_evals: usize,
    /// Simplex diameter (max-norm) at which a run stops.
    pub xtol: f64,
    /// Relative spread of vertex values at which a run stops.
    pub ftol_rel: f64,
    pub ftol_abs: f64,
    pub max_restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            xtol: 1e-9,
            ftol_rel: 1e-13,
            ftol_abs: 1e-300,
            max_restarts: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<const D: usize> {
    pub x: [f64; D],
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Bounds<const D: usize> {
    pub lower: [f64; D],
    pub upper: [f64; D],
}

impl<const D: usize> Bounds<D> {
    pub fn project(&self, x: &mut [f64; D]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }
}

impl NelderMead {
    /// Minimizes `f` starting at `x0` with initial edge lengths `step`.
    /// NaN values are treated as `+inf`.
    pub fn minimize<const D: usize, F>(&self, mut f: F, x0: [f64; D], step: [f64; D], bounds: &Bounds<D>) -> Minimum<D>
    where
        F: FnMut(&[f64; D]) -> f64,
    {
        let mut evals = 0usize;
        let mut eval = |x: &[f64; D], evals: &mut usize| {
            *evals += 1;
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };

        let mut start = x0;
        bounds.project(&mut start);
        let mut best = Minimum {
            x: start,
            f: eval(&start, &mut evals),
            evals: 0,
            converged: false,
        };
        for restart in 0..=self.max_restarts {
            let run = self.run(&mut eval, &mut evals, best.x, best.f, step, bounds);
            let improved = best.f - run.f > self.ftol_abs + self.ftol_rel * best.f.abs();
            let converged = run.converged;
            if run.f <= best.f {
                best.x = run.x;
                best.f = run.f;
            }
            best.converged = converged;
            if (restart > 0 && !improved) || evals >= self.max_evals {
                break;
            }
        }
        best.evals = evals;
        best
    }

    fn run<const D: usize, E>(
        &self,
        eval: &mut E,
        evals: &mut usize,
        x0: [f64; D],
        f0: f64,
        step: [f64; D],
        bounds: &Bounds<D>,
    ) -> Minimum<D>
    where
        E: FnMut(&[f64; D], &mut usize) -> f64,
    {
        let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
        simplex.push((x0, f0));
        for i in 0..D {
            let mut x = x0;
            x[i] += step[i];
            bounds.project(&mut x);
            if x[i] == x0[i] {
                // pinned against the upper bound: step inward
                x[i] = x0[i] - step[i];
                bounds.project(&mut x);
            }
            let fx = eval(&x, evals);
            simplex.push((x, fx));
        }

        let mut converged = false;
        while *evals < self.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (f_best, f_worst) = (simplex[0].1, simplex[D].1);
            let spread = f_worst - f_best;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(simplex[0].0.iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if diameter <= self.xtol || spread <= self.ftol_abs + self.ftol_rel * f_best.abs() {
                converged = true;
                break;
            }

            let mut centroid = [0.0; D];
            for (x, _) in &simplex[..D] {
                for i in 0..D {
                    centroid[i] += x[i] / D as f64;
                }
            }
            let along = |t: f64| {
                let mut p = [0.0; D];
                for i in 0..D {
                    p[i] = centroid[i] + t * (simplex[D].0[i] - centroid[i]);
                }
                bounds.project(&mut p);
                p
            };

            let xr = along(-1.0);
            let fr = eval(&xr, evals);
            if fr < simplex[0].1 {
                let xe = along(-2.0);
                let fe = eval(&xe, evals);
                simplex[D] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[D - 1].1 {
                simplex[D] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[D].1 {
                    let xc = along(-0.5);
                    (xc, eval(&xc, evals))
                } else {
                    let xc = along(0.5);
                    (xc, eval(&xc, evals))
                };
                if fc < simplex[D].1.min(fr) {
                    simplex[D] = (xc, fc);
                } else {
                    let x_best = simplex[0].0;
                    for v in simplex.iter_mut().skip(1) {
                        for (vi, bi) in v.0.iter_mut().zip(x_best) {
                            *vi = bi + 0.5 * (*vi - bi);
                        }
                        v.1 = eval(&v.0, evals);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        Minimum {
            x: simplex[0].0,
            f: simplex[0].1,
            evals: *evals,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64; 2]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let b = Bounds {
            lower: [-5.0, -5.0],
            upper: [5.0, 5.0],
        };
        let m = NelderMead::default().minimize(rosenbrock, [-1.2, 1.0], [0.5, 0.5], &b);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn respects_bounds() {
        let b = Bounds {
            lower: [2.0, -1.0, 0.0],
            upper: [3.0, 1.0, 1.0],
        };
        let f = |x: &[f64; 3]| x[0] * x[0] + (x[1] - 0.3).powi(2) + (x[2] + 4.0).powi(2);
        let m = NelderMead::default().minimize(f, [2.5, 0.0, 0.5], [0.2, 0.2, 0.2], &b);
        assert!((m.x[0] - 2.0).abs() < 1e-8);
        assert!((m.x[1] - 0.3).abs() < 1e-6);
        assert!(m.x[2].abs() < 1e-8);
    }

    #[test]
    fn nan_is_rejected() {
        let b = Bounds {
            lower: [-1.0],
            upper: [1.0],
        };
        let f = |x: &[f64; 1]| if x[0] > 0.5 { f64::NAN } else { (x[0] - 0.4).powi(2) };
        let m = NelderMead::default().minimize(f, [0.0], [0.3], &b);
        assert!((m.x[0] - 0.4).abs() < 1e-6);
    }
}
