use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use qng::gaussian::{
    canonical_angle, no_click_expectation, no_click_oracle, photon_number_distribution, SqueezedCoherent, TAIL_TOL,
};

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

const ANGLES: [f64; 5] = [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];

#[test]
fn closed_form_matches_fock_oracle_on_grid() {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for amp in linspace(0.0, 4.0, 9) {
        for angle in ANGLES {
            for min_var in [0.05, 0.2, 0.5, 0.8, 1.0] {
                let s = SqueezedCoherent::new(amp, angle, min_var).unwrap();
                for t in linspace(0.0, 1.0, 5) {
                    let closed = no_click_expectation(&s, t).unwrap();
                    let oracle = no_click_oracle(&s, t, 0).unwrap();
                    worst = worst.max((closed - oracle).abs());
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 500);
    assert!(worst <= 1e-10, "largest deviation {worst:e}");
}

#[test]
fn distributions_are_normalized() {
    for amp in linspace(0.0, 4.0, 5) {
        for angle in ANGLES {
            for min_var in [0.05, 0.3, 1.0] {
                let s = SqueezedCoherent::new(amp, angle, min_var).unwrap();
                let total: f64 = photon_number_distribution(&s, 0).unwrap().iter().sum();
                assert!((total - 1.0).abs() <= TAIL_TOL, "{s:?}: {total}");
            }
        }
    }
}

#[test]
fn photon_number_moments() {
    let s = SqueezedCoherent::new(1.2, 0.7, 0.4).unwrap();
    let p = photon_number_distribution(&s, 0).unwrap();
    let mean: f64 = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
    assert_abs_diff_eq!(mean, s.mean_photons(), epsilon = 1e-10);
}

#[test]
fn weak_light_taylor_coefficients_match_factorial_moments() {
    let s = SqueezedCoherent::new(0.8, 0.5, 0.6).unwrap();
    let p = photon_number_distribution(&s, 0).unwrap();
    let b = s.vacuum_response_taylor(6);
    let mut binom_row = vec![1.0f64; p.len()];
    for (j, bj) in b.iter().enumerate() {
        // <C(n, j)> = Σ_n C(n, j) p_n
        let moment: f64 = p.iter().zip(&binom_row).map(|(pn, c)| pn * c).sum();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        assert_abs_diff_eq!(*bj, sign * moment, epsilon = 1e-10);
        for (n, c) in binom_row.iter_mut().enumerate() {
            *c = if n > j {
                *c * (n - j) as f64 / (j + 1) as f64
            } else {
                0.0
            };
        }
    }
}

proptest! {
    #[test]
    fn angle_symmetry(amp in 0.0f64..3.0, angle in -10.0f64..10.0, min_var in 0.05f64..1.0, t in 0.0f64..=1.0) {
        let s = SqueezedCoherent::new(amp, angle, min_var).unwrap();
        let mirrored = SqueezedCoherent::new(amp, PI - angle, min_var).unwrap();
        let shifted = SqueezedCoherent::new(amp, angle + PI, min_var).unwrap();
        prop_assert!((0.0..=FRAC_PI_2).contains(&s.angle()));
        prop_assert!((s.angle() - canonical_angle(angle)).abs() < 1e-12);
        let p = no_click_expectation(&s, t).unwrap();
        prop_assert!((p - no_click_expectation(&mirrored, t).unwrap()).abs() < 1e-12);
        prop_assert!((p - no_click_expectation(&shifted, t).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn response_is_a_probability_nonincreasing_in_t(
        amp in 0.0f64..5.0,
        angle in 0.0f64..FRAC_PI_2,
        min_var in 1e-3f64..1.0,
        t1 in 0.0f64..=1.0,
        t2 in 0.0f64..=1.0,
    ) {
        let s = SqueezedCoherent::new(amp, angle, min_var).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (p_lo, p_hi) = (no_click_expectation(&s, lo).unwrap(), no_click_expectation(&s, hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
        prop_assert!(p_hi <= p_lo + 1e-15);
    }

    #[test]
    fn inverted_variance_is_the_same_state(amp in 0.0f64..3.0, angle in 0.0f64..FRAC_PI_2, min_var in 0.05f64..1.0, t in 0.0f64..=1.0) {
        let s = SqueezedCoherent::new(amp, angle, min_var).unwrap();
        let swapped = SqueezedCoherent::new(amp, angle + FRAC_PI_2, 1.0 / min_var).unwrap();
        let d = no_click_expectation(&s, t).unwrap() - no_click_expectation(&swapped, t).unwrap();
        prop_assert!(d.abs() < 1e-12);
    }
}
