use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// sin(πx) with the argument reduced exactly, so zeros at integers are exact.
pub fn sin_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0);
    let (y, sign) = if y > 1.0 { (y - 1.0, -1.0) } else { (y, 1.0) };
    let v = if y < 0.25 {
        (PI * y).sin()
    } else if y < 0.75 {
        (PI * (0.5 - y)).cos()
    } else {
        (PI * (1.0 - y)).sin()
    };
    sign * v
}

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Γ(x).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "gamma", at: x });
    }
    if x == x.round() && x <= 171.0 {
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return Ok(p);
    }
    if x < 0.5 {
        return Ok(PI / (sin_pi(x) * gamma_fn(1.0 - x)?));
    }
    if x > 171.7 {
        return Ok(f64::INFINITY);
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (xm + 0.5));
    Ok((2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(xm))
}

/// (ln|Γ(x)|, sign Γ(x)).
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "ln_gamma", at: x });
    }
    if x < 0.5 {
        let s = sin_pi(x);
        let (lg, _) = ln_gamma(1.0 - x)?;
        return Ok(((PI / s.abs()).ln() - lg, s.signum()));
    }
    if (1.0..=30.0).contains(&x) && x == x.round() {
        return Ok((gamma_fn(x)?.ln(), 1.0));
    }
    let xm = x - 1.0;
    let t = xm + LANCZOS_G + 0.5;
    Ok((LN_SQRT_2PI + (xm + 0.5) * t.ln() - t + lanczos_sum(xm).ln(), 1.0))
}

/// 1/Γ(x), zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x.abs() < 170.0 {
        return 1.0 / gamma_fn(x).expect("pole excluded");
    }
    let (lg, s) = ln_gamma(x).expect("pole excluded");
    s * (-lg).exp()
}

/// ψ(x) = Γ'(x)/Γ(x).
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { func: "digamma", at: x });
    }
    if x < 0.5 {
        let c = sin_pi(x + 0.5) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * c);
    }
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv = 1.0 / (y * y);
    let series = inv
        * (1.0 / 12.0
            - inv
                * (1.0 / 120.0
                    - inv
                        * (1.0 / 252.0
                            - inv
                                * (1.0 / 240.0
                                    - inv * (1.0 / 132.0 - inv * (691.0 / 32760.0 - inv / 12.0))))));
    Ok(acc + y.ln() - 0.5 / y - series)
}

/// (a)_n = a (a+1) ... (a+n-1).
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |p, j| p * (a + j as f64))
}

/// Generalized binomial coefficient C(x, k).
pub fn binomial(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |p, j| p * (x - j as f64) / (j + 1) as f64)
}

/// Γ(a1)Γ(a2).../(Γ(b1)Γ(b2)...) evaluated in logarithms. Poles in the
/// denominator give zero; poles in the numerator are an error.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    if den.iter().any(|&b| is_nonpositive_integer(b)) {
        for &a in num {
            if is_nonpositive_integer(a) {
                return Err(Error::Pole { func: "gamma_ratio", at: a });
            }
        }
        return Ok(0.0);
    }
    let mut lg = 0.0;
    let mut sign = 1.0;
    for &a in num {
        let (l, s) = ln_gamma(a)?;
        lg += l;
        sign *= s;
    }
    for &b in den {
        let (l, s) = ln_gamma(b)?;
        lg -= l;
        sign *= s;
    }
    Ok(sign * lg.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_are_exact() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
    }

    #[test]
    fn half_integer_and_reflection() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma_fn(0.5).unwrap() / sqrt_pi - 1.0).abs() < 1e-14);
        assert!((gamma_fn(-0.5).unwrap() / (-2.0 * sqrt_pi) - 1.0).abs() < 1e-14);
        // Γ(-2.5) = -8√π/15
        assert!((gamma_fn(-2.5).unwrap() / (-8.0 * sqrt_pi / 15.0) - 1.0).abs() < 1e-13);
        let (lg, s) = ln_gamma(-2.5).unwrap();
        assert_eq!(s, -1.0);
        assert!((lg - (8.0 * sqrt_pi / 15.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0).unwrap() + euler).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - 1.0 + euler).abs() < 1e-14);
        assert!((digamma(3.5).unwrap() - digamma(2.5).unwrap() - 0.4).abs() < 1e-14);
        // ψ(1/2) = -γ - 2 ln 2
        assert!((digamma(0.5).unwrap() + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        // ψ(-0.5) = ψ(0.5) + 2
        assert!((digamma(-0.5).unwrap() - digamma(0.5).unwrap() - 2.0).abs() < 1e-13);
        assert!(digamma(-2.0).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(0.7, 0), 1.0);
        assert_eq!(pochhammer(0.25, 2), 0.3125);
        assert_eq!(pochhammer(3.0, 3), 60.0);
    }

    #[test]
    fn rgamma_at_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-4.0), 0.0);
        assert!((rgamma(3.0) - 0.5).abs() < 1e-16);
        assert!((ln_gamma(200.5).unwrap().0 - 860.582_203_509_782_5).abs() < 1e-10);
        assert!((rgamma(150.5) * gamma_fn(150.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((rgamma(-170.5) / (sin_pi(-170.5) * gamma_fn(171.5).unwrap() / PI) - 1.0).abs() < 1e-10);
    }
}
