use super::gamma::{digamma, gamma_fn, is_nonpositive_integer, rgamma};
use super::SeriesConfig;
use crate::error::{Error, Result};
use crate::jet::Real;

/// Tolerance for routing c−a−b to the logarithmic formulas.
pub const DEGENERATE_THRESHOLD: f64 = 1e-9;

/// How [`hyp2f1_route`] evaluated a given point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Terminating,
    Series,
    Pfaff,
    UnitArgument,
    Connection,
    LogEqual,
    LogShiftUp(u32),
    LogShiftDown(u32),
}

/// ₂F₁(a, b; c; z) for real z ≤ 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    hyp2f1_c(a, b, c, z, 1.0 - z, cfg)
}

/// As [`hyp2f1`], with `omz` = 1 − z supplied by the caller so that points
/// close to z = 1 keep full relative accuracy.
pub fn hyp2f1_c(a: f64, b: f64, c: f64, z: f64, omz: f64, cfg: &SeriesConfig) -> Result<f64> {
    hyp2f1_route(a, b, c, z, omz, cfg).map(|(v, _)| v)
}

pub fn hyp2f1_route(
    a: f64,
    b: f64,
    c: f64,
    z: f64,
    omz: f64,
    cfg: &SeriesConfig,
) -> Result<(f64, Route)> {
    if is_nonpositive_integer(c) {
        return Err(Error::Pole { func: "hyp2f1", at: c });
    }
    if !(z <= 1.0) {
        return Err(Error::Domain(format!("hyp2f1 requires z <= 1, got {z}")));
    }
    if z == 0.0 {
        return Ok((1.0, Route::Series));
    }
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Ok((terminating(a, b, c, z), Route::Terminating));
    }
    if z < 0.0 {
        // Pfaff: (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)).
        let w = z / (z - 1.0);
        let omw = 1.0 / omz;
        let (v, _) = hyp2f1_route(a, c - b, c, w, omw, cfg)?;
        return Ok((omz.powf(-a) * v, Route::Pfaff));
    }
    if z <= 0.5 {
        return Ok((gauss_series(a, b, c, z, cfg)?, Route::Series));
    }
    let s = c - a - b;
    if omz == 0.0 {
        if s <= 0.0 {
            return Err(Error::Domain(format!(
                "hyp2f1 at z = 1 needs c−a−b > 0, got {s}"
            )));
        }
        let v = gamma_fn(c)? * gamma_fn(s)? * rgamma(c - a) * rgamma(c - b);
        return Ok((v, Route::UnitArgument));
    }
    let m = s.round();
    if (s - m).abs() >= DEGENERATE_THRESHOLD {
        return Ok((connection(a, b, c, z, omz, cfg)?, Route::Connection));
    }
    let mi = m as i64;
    if mi == 0 {
        Ok((log_equal(a, b, omz, cfg)?, Route::LogEqual))
    } else if mi > 0 {
        let mu = mi as u32;
        Ok((log_shift_up(a, b, mu, omz, cfg)?, Route::LogShiftUp(mu)))
    } else {
        let mu = (-mi) as u32;
        Ok((log_shift_down(a, b, mu, omz, cfg)?, Route::LogShiftDown(mu)))
    }
}

fn terminating(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let n = if is_nonpositive_integer(a) && (!is_nonpositive_integer(b) || a >= b) {
        -a
    } else {
        -b
    } as u64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..n {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    sum
}

/// Direct Gauss series, valid for |z| < 1.
pub fn gauss_series(a: f64, b: f64, c: f64, z: f64, cfg: &SeriesConfig) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for k in 0..cfg.max_terms {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.abs() <= cfg.rel_tol * sum.abs() || term.abs() <= cfg.abs_tol {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        func: "hyp2f1",
        terms: cfg.max_terms,
    })
}

fn connection(a: f64, b: f64, c: f64, z: f64, omz: f64, cfg: &SeriesConfig) -> Result<f64> {
    let s = c - a - b;
    let gc = gamma_fn(c)?;
    let t1 = gc * gamma_fn(s)? * rgamma(c - a) * rgamma(c - b);
    let t2 = gc * gamma_fn(-s)? * rgamma(a) * rgamma(b);
    let mut v = 0.0;
    if t1 != 0.0 {
        v += t1 * hyp2f1_c(a, b, 1.0 - s, omz, z, cfg)?;
    }
    if t2 != 0.0 {
        v += t2 * omz.powf(s) * hyp2f1_c(c - a, c - b, 1.0 + s, omz, z, cfg)?;
    }
    Ok(v)
}

struct PsiSeries<'a> {
    cfg: &'a SeriesConfig,
}

impl PsiSeries<'_> {
    /// Σ_n coef_n [ψ-combination_n + log] w^n, with coef and ψ terms
    /// advanced by the supplied closures.
    fn sum(
        &self,
        mut coef: impl FnMut(u32) -> f64,
        mut bracket: impl FnMut(u32) -> Result<f64>,
        w: f64,
    ) -> Result<f64> {
        let mut sum = 0.0;
        let mut wn = 1.0;
        let mut small = 0;
        for n in 0..self.cfg.max_terms as u32 {
            let t = coef(n) * bracket(n)? * wn;
            sum += t;
            if t.abs() <= self.cfg.rel_tol * sum.abs() || t.abs() <= self.cfg.abs_tol {
                small += 1;
                if small >= 2 && n > 2 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            wn *= w;
        }
        Err(Error::NonConvergence {
            func: "hyp2f1",
            terms: self.cfg.max_terms,
        })
    }
}

fn log_equal(a: f64, b: f64, omz: f64, cfg: &SeriesConfig) -> Result<f64> {
    let pre = gamma_fn(a + b)? * rgamma(a) * rgamma(b);
    let ln = omz.ln();
    let mut coef = 1.0;
    let series = PsiSeries { cfg }.sum(
        |n| {
            if n > 0 {
                let k = (n - 1) as f64;
                coef *= (a + k) * (b + k) / ((k + 1.0) * (k + 1.0));
            }
            coef
        },
        |n| {
            let n = n as f64;
            Ok(2.0 * digamma(n + 1.0)? - digamma(a + n)? - digamma(b + n)? - ln)
        },
        omz,
    )?;
    Ok(pre * series)
}

fn log_shift_up(a: f64, b: f64, m: u32, omz: f64, cfg: &SeriesConfig) -> Result<f64> {
    let mf = m as f64;
    let c = a + b + mf;
    let mut finite = 0.0;
    let mut t = 1.0;
    for n in 0..m {
        if n > 0 {
            let k = (n - 1) as f64;
            t *= (a + k) * (b + k) / ((k + 1.0) * (1.0 - mf + k)) * omz;
        }
        finite += t;
    }
    let finite = gamma_fn(mf)? * gamma_fn(c)? * rgamma(a + mf) * rgamma(b + mf) * finite;
    let pre = gamma_fn(c)? * rgamma(a) * rgamma(b);
    if pre == 0.0 {
        return Ok(finite);
    }
    let ln = omz.ln();
    let mut coef = 1.0 / gamma_fn(mf + 1.0)?;
    let series = PsiSeries { cfg }.sum(
        |n| {
            if n > 0 {
                let k = (n - 1) as f64;
                coef *= (a + mf + k) * (b + mf + k) / ((k + 1.0) * (mf + k + 1.0));
            }
            coef
        },
        |n| {
            let n = n as f64;
            Ok(-digamma(n + 1.0)? - digamma(n + mf + 1.0)?
                + digamma(a + n + mf)?
                + digamma(b + n + mf)?
                + ln)
        },
        omz,
    )?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - pre * sign * omz.powi(m as i32) * series)
}

fn log_shift_down(a: f64, b: f64, m: u32, omz: f64, cfg: &SeriesConfig) -> Result<f64> {
    let mf = m as f64;
    let c = a + b - mf;
    let mut finite = 0.0;
    let mut t = 1.0;
    for n in 0..m {
        if n > 0 {
            let k = (n - 1) as f64;
            t *= (a - mf + k) * (b - mf + k) / ((k + 1.0) * (1.0 - mf + k)) * omz;
        }
        finite += t;
    }
    let finite =
        gamma_fn(mf)? * gamma_fn(c)? * rgamma(a) * rgamma(b) * omz.powi(-(m as i32)) * finite;
    let pre = gamma_fn(c)? * rgamma(a - mf) * rgamma(b - mf);
    if pre == 0.0 {
        return Ok(finite);
    }
    let ln = omz.ln();
    let mut coef = 1.0 / gamma_fn(mf + 1.0)?;
    let series = PsiSeries { cfg }.sum(
        |n| {
            if n > 0 {
                let k = (n - 1) as f64;
                coef *= (a + k) * (b + k) / ((k + 1.0) * (mf + k + 1.0));
            }
            coef
        },
        |n| {
            let n = n as f64;
            Ok(-digamma(n + 1.0)? - digamma(n + mf + 1.0)? + digamma(a + n)? + digamma(b + n)? + ln)
        },
        omz,
    )?;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - sign * pre * series)
}

/// ₂F₁(a, b; c; x) composed with a [`Real`] argument `x`, whose value and
/// complement `1 − x` are given accurately by `x0`, `omx0`.
pub fn hyp2f1_t<T: Real>(
    a: f64,
    b: f64,
    c: f64,
    x: T,
    x0: f64,
    omx0: f64,
    cfg: &SeriesConfig,
) -> Result<T> {
    let mut d = [0.0; crate::jet::ORDER + 1];
    d[0] = hyp2f1_c(a, b, c, x0, omx0, cfg)?;
    let mut scale = 1.0;
    for n in 1..=T::TAYLOR_ORDER {
        let k = (n - 1) as f64;
        scale *= (a + k) * (b + k) / ((c + k) * n as f64);
        if scale == 0.0 {
            break;
        }
        let nf = n as f64;
        d[n] = scale * hyp2f1_c(a + nf, b + nf, c + nf, x0, omx0, cfg)?;
    }
    Ok(x.compose(&|n| d[n]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn trivial_and_log_identity() {
        assert_eq!(hyp2f1(0.3, 0.7, 1.1, 0.0, &cfg()).unwrap(), 1.0);
        let v = hyp2f1(1.0, 1.0, 2.0, 0.5, &cfg()).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-15);
        for &z in &[0.6, 0.8, 0.95, -0.7, -3.0] {
            let v = hyp2f1(1.0, 1.0, 2.0, z, &cfg()).unwrap();
            let exact = -(1.0 - z).ln() / z;
            assert!((v / exact - 1.0).abs() < 1e-13, "z={z}");
        }
    }

    #[test]
    fn quarter_parameters() {
        let v = hyp2f1(0.25, 0.75, 1.0, 0.25, &cfg()).unwrap();
        assert!((v - 1.054_648_614_831_467).abs() < 1e-14);
    }

    #[test]
    fn routing() {
        let c = cfg();
        assert_eq!(hyp2f1_route(0.3, 0.4, 1.75, 0.8, 0.2, &c).unwrap().1, Route::Connection);
        assert_eq!(hyp2f1_route(0.3, 0.4, 0.7, 0.8, 0.2, &c).unwrap().1, Route::LogEqual);
        assert_eq!(hyp2f1_route(0.3, 0.4, 2.7, 0.8, 0.2, &c).unwrap().1, Route::LogShiftUp(2));
        assert_eq!(hyp2f1_route(0.3, 0.4, -0.3, 0.8, 0.2, &c).unwrap().1, Route::LogShiftDown(1));
        assert_eq!(hyp2f1_route(-3.0, 0.4, 0.5, 0.9, 0.1, &c).unwrap().1, Route::Terminating);
        assert!(hyp2f1(0.3, 0.4, -2.0, 0.3, &c).is_err());
        assert!(hyp2f1(0.3, 0.4, 0.5, 1.0, &c).is_err());
        assert!(hyp2f1(0.3, 0.4, 0.5, 1.2, &c).is_err());
    }

    #[test]
    fn reference_values_across_routes() {
        let cases = [
            (0.3, 0.4, 0.7, 0.8, 1.288_866_619_090_227_1),
            (0.3, 0.4, 2.7, 0.93, 1.058_078_121_038_547_7),
            (0.3, 0.4, -0.3, 0.75, -0.597_197_379_690_036_1),
            (1.25, 1.75, 1.0, 0.9, 117.851_154_089_938_67),
            (0.6, 1.9, 0.5, 0.99, 12_357.756_709_358_009),
            (2.2, -0.7, 3.5, 0.97, 0.498_536_646_421_953_4),
            (1.5, 2.5, 0.3, 0.6, 194.901_133_421_983_4),
            (0.3, 0.4, 1.75, 0.8, 1.081_331_793_750_184_4),
            (0.5, 0.5, 1.3, -5.0, 0.663_732_026_771_983_4),
            (1.25, 1.75, 2.0, 0.999, 1_198.904_537_772_670_3),
        ];
        for (a, b, c, z, want) in cases {
            let v = hyp2f1(a, b, c, z, &cfg()).unwrap();
            assert!((v / want - 1.0).abs() < 1e-12, "({a},{b},{c},{z}): {v} vs {want}");
        }
    }

    #[test]
    fn unit_argument_is_gauss_sum() {
        let v = hyp2f1(0.3, 0.4, 1.9, 1.0, &cfg()).unwrap();
        let g = |x: f64| gamma_fn(x).unwrap();
        assert!((v - g(1.9) * g(1.2) / (g(1.6) * g(1.5))).abs() < 1e-13);
    }
}
