//! Welch's unequal-variance t-test.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Welch {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Compares the means of `a` and `b`.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<Welch> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateSample("each sample needs at least two values".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSample("non-finite value".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 <= 0.0 {
        return Err(Error::DegenerateSample("both samples have zero variance".into()));
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let p = if t == 0.0 { 1.0 } else { regularized_beta(df / (df + t * t), df / 2.0, 0.5) };
    Ok(Welch { t, df, p: p.clamp(0.0, 1.0) })
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
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
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut s = C[0];
    for (i, &c) in C.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_fraction(1.0 - x, b, a) / b
    }
}

fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let guard = |v: f64| if v.abs() < TINY { TINY } else { v };
    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - (a + b) * x / (a + 1.0));
    let mut h = d;
    for m in 1..1000 {
        let m = m as f64;
        let even = m * (b - m) * x / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        d = 1.0 / guard(1.0 + even * d);
        c = guard(1.0 + even / c);
        h *= d * c;
        let odd = -(a + m) * (a + b + m) * x / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 / guard(1.0 + odd * d);
        c = guard(1.0 + odd / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, StudentsT};
    use statrs::function::beta::beta_reg;
    use statrs::function::gamma::ln_gamma as ln_gamma_ref;

    #[test]
    fn shifted_samples() {
        let w = welch_t(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!((w.t + 1.0).abs() < 1e-12);
        assert!((w.df - 8.0).abs() < 1e-12);
    }

    #[test]
    fn identical_samples() {
        let a = [0.3, 1.2, 0.7];
        let w = welch_t(&a, &a).unwrap();
        assert_eq!((w.t, w.p), (0.0, 1.0));
    }

    #[test]
    fn degenerate_samples_are_rejected() {
        assert!(welch_t(&[0.0; 4], &[1.0; 4]).is_err());
        assert!(welch_t(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn special_functions_match_reference() {
        for &x in &[0.1, 0.5, 1.0, 2.5, 7.3, 42.0, 170.5] {
            assert!((ln_gamma(x) - ln_gamma_ref(x)).abs() < 1e-10 * ln_gamma_ref(x).abs().max(1.0), "{x}");
        }
        for &(x, a, b) in &[(0.2, 0.5, 0.5), (0.9, 4.0, 0.5), (0.5, 10.0, 3.0), (0.01, 2.0, 5.0), (0.999, 30.0, 0.5)] {
            assert!((regularized_beta(x, a, b) - beta_reg(a, b, x)).abs() < 1e-10, "{x} {a} {b}");
        }
    }

    #[test]
    fn matches_textbook_evaluation() {
        let pairs: [(&[f64], &[f64]); 5] = [
            (&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]),
            (&[10.0, 12.0, 9.5, 11.0], &[7.0, 8.5, 7.5, 9.0, 8.0, 6.5]),
            (&[0.1, 0.4, 0.2], &[3.0, -1.0, 5.0, 2.0]),
            (&[100.0, 102.0, 98.0, 101.0, 99.0, 100.5], &[100.2, 100.1, 99.9]),
            (&[5.0, 5.5], &[1.0, 9.0, 4.0, 2.0, 8.0]),
        ];
        for (a, b) in pairs {
            let w = welch_t(a, b).unwrap();
            let (ma, mb) = (a.iter().sum::<f64>() / a.len() as f64, b.iter().sum::<f64>() / b.len() as f64);
            let var = |x: &[f64], m: f64| x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64;
            let (qa, qb) = (var(a, ma) / a.len() as f64, var(b, mb) / b.len() as f64);
            let t = (ma - mb) / (qa + qb).sqrt();
            let df = (qa + qb).powi(2) / (qa * qa / (a.len() - 1) as f64 + qb * qb / (b.len() - 1) as f64);
            let p = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
            assert!((w.t - t).abs() < 1e-9 && (w.df - df).abs() < 1e-9);
            assert!((w.p - p).abs() < 1e-9, "{} vs {p}", w.p);
        }
    }
}
