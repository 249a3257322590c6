//! Special functions: erf and its bisection inverse, log-gamma, the
//! regularized incomplete beta function and Student-t tails.

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Inverse error function on `[−1, 1]` by bisection on [`erf`], absolute
/// tolerance `1e−10` in the argument. Returns `±∞` at `±1`.
pub fn erfinv(y: f64) -> f64 {
    if y.is_nan() || !(-1.0..=1.0).contains(&y) {
        return f64::NAN;
    }
    if y == 1.0 {
        return f64::INFINITY;
    }
    if y == -1.0 {
        return f64::NEG_INFINITY;
    }
    if y == 0.0 {
        return 0.0;
    }
    let (target, sign) = if y < 0.0 { (-y, -1.0) } else { (y, 1.0) };
    // erf(6) rounds to 1 in double precision
    let (mut lo, mut hi) = (0.0f64, 6.0f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if erf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    sign * 0.5 * (lo + hi)
}

/// Lanczos approximation (g = 7, n = 9), accurate to ~1e−15 for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz evaluation.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Upper tail `P(T > t)` of Student's t with `df` degrees of freedom.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() || df.is_nan() || df <= 0.0 {
        return f64::NAN;
    }
    if t == f64::INFINITY {
        return 0.0;
    }
    if t == f64::NEG_INFINITY {
        return 1.0;
    }
    let tail = 0.5 * inc_beta(df / 2.0, 0.5, df / (df + t * t));
    if t >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Quantile of Student's t, by bisection on [`student_t_sf`].
pub fn student_t_quantile(p: f64, df: f64) -> f64 {
    if !(0.0..1.0).contains(&p) || p == 0.0 {
        return f64::NAN;
    }
    let (mut lo, mut hi) = (-1e3f64, 1e3f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - student_t_sf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series, independent of libm.
    fn erf_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 {
            sum += term / (2.0 * n + 1.0);
            n += 1.0;
            term *= -x * x / n;
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn erf_agrees_with_series() {
        for i in 0..=30 {
            let x = i as f64 * 0.1;
            assert!((erf(x) - erf_series(x)).abs() < 1e-12, "x={x}");
        }
        assert!((erf(2.5) - 0.999_593_047_982_555).abs() < 1e-12);
    }

    #[test]
    fn erfinv_inverts_erf() {
        for i in -19..=19 {
            let y = i as f64 / 20.0;
            let x = erfinv(y);
            assert!((erf(x) - y).abs() < 1e-9, "y={y}");
        }
        assert_eq!(erfinv(0.0), 0.0);
        assert!(erfinv(1.0).is_infinite());
        assert!(erfinv(1.5).is_nan());
        // erf(0.370807) = 0.4
        assert!((erfinv(0.4) - 0.370_807_158_593_557_9).abs() < 1e-9);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!(ln_gamma(2.0).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn inc_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 − (1 − x)^b
        for &x in &[0.1, 0.37, 0.5, 0.9] {
            assert!((inc_beta(1.0, 1.0, x) - x).abs() < 1e-13);
            assert!((inc_beta(3.0, 1.0, x) - x.powi(3)).abs() < 1e-13);
            assert!((inc_beta(1.0, 4.0, x) - (1.0 - (1.0 - x).powi(4))).abs() < 1e-13);
        }
    }

    #[test]
    fn t_tail_known_values() {
        assert_eq!(student_t_sf(0.0, 5.0), 0.5);
        // df = 1 is Cauchy: P(T > 1) = 1/4
        assert!((student_t_sf(1.0, 1.0) - 0.25).abs() < 1e-12);
        // df = 2: P(T > t) = 1/2 − t / (2√(t² + 2))
        for &t in &[0.5, 1.0, 3.0] {
            let exact = 0.5 - t / (2.0 * (t * t + 2.0f64).sqrt());
            assert!((student_t_sf(t, 2.0) - exact).abs() < 1e-12);
        }
        assert!((student_t_quantile(0.975, 2.0) - 4.302_652_729_749_464).abs() < 1e-9);
    }
}
