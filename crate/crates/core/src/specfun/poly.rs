use super::gamma::binomial;
use crate::jet::Real;

/// Jacobi polynomial P_k^{(α,β)}(x) by the three-term recurrence.
pub fn jacobi_p(k: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    jacobi_p_t(k, alpha, beta, x)
}

/// Jacobi polynomial over any [`Real`] argument.
///
/// When a recurrence denominator vanishes (α+β a negative integer ≤ −2) the
/// explicit binomial sum is used instead.
pub fn jacobi_p_t<T: Real>(k: u32, alpha: f64, beta: f64, x: T) -> T {
    if k == 0 {
        return T::cst(1.0);
    }
    let ab = alpha + beta;
    let p1 = x * (0.5 * (ab + 2.0)) + 0.5 * (alpha - beta);
    if k == 1 {
        return p1;
    }
    let singular = (2..=k).any(|n| {
        let n = n as f64;
        (n + ab).abs() < 1e-12 || (2.0 * n + ab - 2.0).abs() < 1e-12
    });
    if singular {
        return jacobi_explicit(k, alpha, beta, x);
    }
    let mut pm = T::cst(1.0);
    let mut p = p1;
    for n in 2..=k {
        let n = n as f64;
        let c = 2.0 * n + ab;
        let a1 = 2.0 * n * (n + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 1.0) * c * (c - 2.0);
        let a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * c;
        let next = (p * x * a3 + p * a2 - pm * a4) / a1;
        pm = p;
        p = next;
    }
    p
}

/// P_0, …, P_kmax at one point, in a single recurrence pass.
pub fn jacobi_sequence(kmax: u32, alpha: f64, beta: f64, x: f64) -> Vec<f64> {
    let ab = alpha + beta;
    let singular = (2..=kmax).any(|n| {
        let n = n as f64;
        (n + ab).abs() < 1e-12 || (2.0 * n + ab - 2.0).abs() < 1e-12
    });
    if singular {
        return (0..=kmax).map(|k| jacobi_p(k, alpha, beta, x)).collect();
    }
    let mut out = Vec::with_capacity(kmax as usize + 1);
    out.push(1.0);
    if kmax == 0 {
        return out;
    }
    out.push(x * (0.5 * (ab + 2.0)) + 0.5 * (alpha - beta));
    for n in 2..=kmax as usize {
        let nf = n as f64;
        let c = 2.0 * nf + ab;
        let a1 = 2.0 * nf * (nf + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 1.0) * c * (c - 2.0);
        let a4 = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * c;
        out.push((out[n - 1] * (x * a3 + a2) - out[n - 2] * a4) / a1);
    }
    out
}

fn jacobi_explicit<T: Real>(k: u32, alpha: f64, beta: f64, x: T) -> T {
    let xm = (x - 1.0) * 0.5;
    let xp = (x + 1.0) * 0.5;
    let kf = k as f64;
    let mut sum = T::cst(0.0);
    for s in 0..=k {
        let c = binomial(kf + alpha, k - s) * binomial(kf + beta, s);
        sum = sum + xm.powi(s as i32) * xp.powi((k - s) as i32) * c;
    }
    sum
}

/// Gegenbauer polynomial C_n^{(α)}(x).
pub fn gegenbauer_c(n: u32, alpha: f64, x: f64) -> f64 {
    gegenbauer_c_t(n, alpha, x)
}

pub fn gegenbauer_c_t<T: Real>(n: u32, alpha: f64, x: T) -> T {
    if n == 0 {
        return T::cst(1.0);
    }
    let mut pm = T::cst(1.0);
    let mut p = x * (2.0 * alpha);
    for m in 2..=n {
        let m = m as f64;
        let next = (p * x * (2.0 * (m + alpha - 1.0)) - pm * (m + 2.0 * alpha - 2.0)) / m;
        pm = p;
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_matches_pointwise() {
        for &(a, b, x) in &[(0.5, 0.0, 0.3), (-0.5, 1.0, -0.7), (2.0, -1.0, 0.99), (-1.5, 0.5, 0.2)] {
            let seq = jacobi_sequence(30, a, b, x);
            for (k, v) in seq.iter().enumerate() {
                let p = jacobi_p(k as u32, a, b, x);
                assert!((v - p).abs() <= 1e-12 * p.abs().max(1.0));
            }
        }
    }
    use crate::specfun::pochhammer;

    #[test]
    fn low_degree_forms() {
        assert_eq!(jacobi_p(0, 2.0, -1.0, 0.3), 1.0);
        let (a, b, x) = (0.7, -0.4, 0.35);
        assert!((jacobi_p(1, a, b, x) - ((a - b) / 2.0 + (a + b + 2.0) * x / 2.0)).abs() < 1e-15);
        assert_eq!(gegenbauer_c(0, 1.3, 0.2), 1.0);
        assert!((gegenbauer_c(1, 1.3, 0.2) - 2.0 * 1.3 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn beta_minus_one_identity() {
        for &x in &[-0.9, -0.3, 0.0, 0.4, 0.95] {
            let lhs = jacobi_p(1, 2.0, -1.0, x);
            assert!((lhs - 1.5 * (1.0 + x)).abs() < 1e-14);
            for k in 0..6u32 {
                let alpha = 1.5;
                let lhs = jacobi_p(k + 1, alpha, -1.0, x);
                let rhs = (alpha / (k + 1) as f64 + 1.0) * (1.0 + x) / 2.0 * jacobi_p(k, alpha, 1.0, x);
                assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for k in 0..9 {
            for &(a, b) in &[(0.5, 0.0), (-0.5, 1.5), (2.5, -1.0), (1.0, 1.0)] {
                let x = 0.37;
                let r = jacobi_p(k, a, b, x);
                let e = jacobi_explicit(k, a, b, x);
                assert!((r - e).abs() < 1e-12 * (1.0 + e.abs()), "k={k} a={a} b={b}");
            }
        }
    }

    #[test]
    fn singular_recurrence_falls_back() {
        let v = jacobi_p(3, -1.5, -1.5, 0.2);
        assert!((v - jacobi_explicit(3, -1.5, -1.5, 0.2)).abs() < 1e-14);
        assert!(v.is_finite());
    }

    #[test]
    fn gegenbauer_is_proportional_to_jacobi() {
        for n in 0..8u32 {
            for &lam in &[0.5, 1.0, 2.5] {
                let x = -0.61;
                let ratio = pochhammer(2.0 * lam, n) / pochhammer(lam + 0.5, n);
                let j = jacobi_p(n, lam - 0.5, lam - 0.5, x);
                assert!((gegenbauer_c(n, lam, x) - ratio * j).abs() < 1e-12);
            }
        }
    }
}
