//! Laguerre polynomials and displacement-operator matrix elements.

/// Laguerre polynomial `L_n(x)`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    assoc_laguerre(n, 0, x)
}

/// Generalized Laguerre polynomial `L_n^(a)(x)` by upward recurrence in `n`.
pub fn assoc_laguerre(n: u32, a: u32, x: f64) -> f64 {
    let a = a as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `d/dx L_n(x) = -L_{n-1}^(1)(x)`.
pub fn laguerre_derivative(n: u32, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -assoc_laguerre(n - 1, 1, x)
    }
}

/// `1F1(-n; 1; z)`, which reduces to `L_n(z)`.
pub fn kummer_1f1_neg_n(n: u32, z: f64) -> f64 {
    laguerre(n, z)
}

/// `<m| D(alpha) |n>` for real `alpha`, `D(alpha) = exp(alpha a^dag - alpha a)`.
///
/// For `m >= n` this is `sqrt(n!/m!) alpha^(m-n) e^(-alpha^2/2) L_n^(m-n)(alpha^2)`;
/// the other triangle follows from `<m|D|n> = (-1)^(m-n) <n|D|m>`. The
/// prefactor is assembled in log space so large `m - n` underflows to zero
/// instead of overflowing.
pub fn displacement_element(m: usize, n: usize, alpha: f64) -> f64 {
    if m < n {
        let sign = if (n - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        return sign * displacement_element(n, m, alpha);
    }
    let diff = m - n;
    let x = alpha * alpha;
    let lag = assoc_laguerre(n as u32, diff as u32, x);
    if diff == 0 {
        return (-0.5 * x).exp() * lag;
    }
    if alpha == 0.0 {
        return 0.0;
    }
    let log_fact_ratio: f64 = ((n + 1)..=m).map(|j| (j as f64).ln()).sum();
    let log_pref = -0.5 * x + diff as f64 * alpha.abs().ln() - 0.5 * log_fact_ratio;
    let sign = if alpha < 0.0 && diff % 2 == 1 { -1.0 } else { 1.0 };
    sign * log_pref.exp() * lag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_closed_forms() {
        for x in [0.0, 0.3, 4.0, 17.5] {
            assert_eq!(laguerre(0, x), 1.0);
            assert!((laguerre(1, x) - (1.0 - x)).abs() < 1e-14);
            let l2 = 1.0 - 2.0 * x + x * x / 2.0;
            assert!((laguerre(2, x) - l2).abs() < 1e-12 * l2.abs().max(1.0));
        }
        assert!((laguerre(2, 4.0) - 1.0).abs() < 1e-14);
        // L_1^(a)(x) = 1 + a - x
        assert!((assoc_laguerre(1, 3, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn kummer_reduction() {
        assert_eq!(kummer_1f1_neg_n(0, 3.3), 1.0);
        assert!((kummer_1f1_neg_n(1, 4.0) + 3.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-5;
        for n in 1..8 {
            let x = 2.7;
            let fd = (laguerre(n, x + h) - laguerre(n, x - h)) / (2.0 * h);
            assert!((fd - laguerre_derivative(n, x)).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn vacuum_overlap() {
        for a in [0.0, 0.5, 1.7, -2.2] {
            let want = (-(a * a) / 2.0f64).exp();
            assert!((displacement_element(0, 0, a) - want).abs() < 1e-15);
        }
        // <1|D(a)|0> = a e^{-a^2/2}, <0|D(a)|1> = -a e^{-a^2/2}
        let a = 0.8;
        let c = a * (-(a * a) / 2.0f64).exp();
        assert!((displacement_element(1, 0, a) - c).abs() < 1e-15);
        assert!((displacement_element(0, 1, a) + c).abs() < 1e-15);
    }

    #[test]
    fn negative_alpha_is_adjoint() {
        // D(-a) = D(a)^T for real a
        for (m, n) in [(3, 1), (0, 4), (5, 5), (7, 2)] {
            let a = 1.3;
            assert!((displacement_element(m, n, -a) - displacement_element(n, m, a)).abs() < 1e-14);
        }
    }

    #[test]
    fn rows_are_normalized() {
        for n in 0..=5 {
            for a in [0.5, 1.0, 2.0, 3.0] {
                let upper = (a * a + 10.0 * a + 20.0) as usize;
                let s: f64 = (0..=upper).map(|m| displacement_element(m, n, a).powi(2)).sum();
                assert!((s - 1.0).abs() < 1e-10, "n={n} a={a} sum={s}");
            }
        }
    }
}
