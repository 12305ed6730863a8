//! Physicists' Hermite polynomials and their roots.

/// `H_n(x)` from `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Real roots of `H_n`, ascending.
///
/// Roots of `H_n` interlace those of `H_{n-1}`, so each one is bracketed by
/// consecutive roots of the previous order (plus the bound `|x| < √(2n+1)`),
/// bisected, then polished with one Newton step using `H_n' = 2n H_{n-1}`.
pub fn hermite_roots(n: usize) -> Vec<f64> {
    let mut roots: Vec<f64> = Vec::new();
    for k in 1..=n {
        let bound = (2.0 * k as f64 + 1.0).sqrt();
        let mut edges = Vec::with_capacity(k + 1);
        edges.push(-bound);
        edges.extend_from_slice(&roots);
        edges.push(bound);
        roots = edges.windows(2).map(|w| polish(k, bisect(k, w[0], w[1]))).collect();
    }
    roots
}

fn bisect(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = hermite(n, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = hermite(n, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn polish(n: usize, x: f64) -> f64 {
    let d = 2.0 * n as f64 * hermite(n - 1, x);
    if d == 0.0 {
        return x;
    }
    let step = hermite(n, x) / d;
    let y = x - step;
    if hermite(n, y).abs() <= hermite(n, x).abs() {
        y
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn low_orders() {
        for x in [-1.3, 0.0, 0.4, 2.0] {
            assert_eq!(hermite(0, x), 1.0);
            assert_eq!(hermite(1, x), 2.0 * x);
        }
        assert_abs_diff_eq!(hermite(2, FRAC_1_SQRT_2), 0.0, epsilon = 1e-15);
        assert_eq!(hermite(3, 2.0), 40.0);
        // H_4 = 16x⁴ - 48x² + 12
        assert_abs_diff_eq!(hermite(4, 1.5), 16.0 * 5.0625 - 48.0 * 2.25 + 12.0, epsilon = 1e-12);
    }

    #[test]
    fn root_examples() {
        assert_eq!(hermite_roots(1), vec![0.0]);
        let r2 = hermite_roots(2);
        assert_abs_diff_eq!(r2[0], -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(r2[1], FRAC_1_SQRT_2, epsilon = 1e-15);
        let r4 = hermite_roots(4);
        let expected = [-1.650680, -0.524648, 0.524648, 1.650680];
        for (r, e) in r4.iter().zip(expected) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-6);
        }
    }

    #[test]
    fn roots_are_accurate_and_sorted() {
        for n in 1..=12 {
            let roots = hermite_roots(n);
            assert_eq!(roots.len(), n);
            assert!(roots.windows(2).all(|w| w[0] < w[1]));
            for &r in &roots {
                let scale = (2.0 * n as f64 * hermite(n - 1, r)).abs().max(1.0);
                assert!(hermite(n, r).abs() < 1e-14 * scale, "n={n} r={r}");
                if n <= 8 {
                    assert!(hermite(n, r).abs() < 1e-10);
                }
            }
            // symmetric about zero
            for (a, b) in roots.iter().zip(roots.iter().rev()) {
                assert_abs_diff_eq!(*a, -*b, epsilon = 1e-13);
            }
        }
    }
}
