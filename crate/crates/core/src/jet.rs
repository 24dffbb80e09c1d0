//! Truncated Taylor arithmetic used to differentiate radial profiles exactly.
//!
//! A [`Jet`] stores `f(r0 + h) = c0 + c1 h + ... + c4 h^4`, so profiles written
//! once against [`Real`] yield values (with `f64`) or the first four
//! derivatives (with `Jet`).

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;
const N: usize = ORDER + 1;

pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Highest derivative order carried (0 for plain values).
    const TAYLOR_ORDER: usize;
    fn cst(x: f64) -> Self;
    fn value(self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self {
        self.powf(0.5)
    }
    fn powf(self, p: f64) -> Self;
    fn powi(self, n: i32) -> Self;
    /// Composes with a function whose Taylor coefficients at `self.value()`
    /// are `taylor(0), taylor(1), ...`.
    fn compose(self, taylor: &dyn Fn(usize) -> f64) -> Self;
}

impl Real for f64 {
    const TAYLOR_ORDER: usize = 0;
    fn cst(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn compose(self, taylor: &dyn Fn(usize) -> f64) -> Self {
        taylor(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet(pub [f64; N]);

impl Jet {
    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        Jet(c)
    }

    /// The independent variable at `x`.
    pub fn var(x: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x;
        c[1] = 1.0;
        Jet(c)
    }

    /// n-th derivative.
    pub fn deriv(&self, n: usize) -> f64 {
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        self.0[n] * fact[n]
    }

    /// Derivative as a jet; the top coefficient is lost and set to zero.
    pub fn d(&self) -> Self {
        let mut c = [0.0; N];
        for k in 0..ORDER {
            c[k] = (k + 1) as f64 * self.0[k + 1];
        }
        Jet(c)
    }

    /// Reinterprets the coefficients through `sin`/`cos` of the same base
    /// point, returning both at once.
    pub fn sin_cos(self) -> (Self, Self) {
        let a = self.0;
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for k in 1..N {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                ss += j as f64 * a[j] * c[k - j];
                cc += j as f64 * a[j] * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// `(sin r, cos r)` jets at `r` whose values are the supplied, possibly
    /// more accurate, pair.
    pub fn trig_pair(s: f64, c: f64) -> (Self, Self) {
        let mut sj = [0.0; N];
        let mut cj = [0.0; N];
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        let ds = [s, c, -s, -c, s];
        let dc = [c, -s, -c, s, c];
        for k in 0..N {
            sj[k] = ds[k] / fact[k];
            cj[k] = dc[k] / fact[k];
        }
        (Jet(sj), Jet(cj))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.0;
        for k in 0..N {
            c[k] += o.0[k];
        }
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = self.0;
        for k in 0..N {
            c[k] -= o.0[k];
        }
        Jet(c)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; N];
        for i in 0..N {
            for j in 0..N - i {
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Jet(c)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        let b = o.0;
        let mut q = [0.0; N];
        for k in 0..N {
            let mut acc = self.0[k];
            for i in 1..=k {
                acc -= b[i] * q[k - i];
            }
            q[k] = acc / b[0];
        }
        Jet(q)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x = -*x;
        }
        Jet(c)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, o: f64) -> Jet {
        let mut c = self.0;
        c[0] += o;
        Jet(c)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, o: f64) -> Jet {
        let mut c = self.0;
        c[0] -= o;
        Jet(c)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, o: f64) -> Jet {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x *= o;
        }
        Jet(c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, o: f64) -> Jet {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x /= o;
        }
        Jet(c)
    }
}

impl Real for Jet {
    const TAYLOR_ORDER: usize = ORDER;
    fn cst(x: f64) -> Self {
        Jet::constant(x)
    }
    fn value(self) -> f64 {
        self.0[0]
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
    fn exp(self) -> Self {
        let a = self.0;
        let mut e = [0.0; N];
        e[0] = a[0].exp();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet(e)
    }
    fn ln(self) -> Self {
        let a = self.0;
        let mut l = [0.0; N];
        l[0] = a[0].ln();
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Jet(l)
    }
    fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Jet::constant(1.0);
        }
        if p.fract() == 0.0 && p.abs() < 64.0 {
            return self.powi(p as i32);
        }
        let a = self.0;
        let mut g = [0.0; N];
        g[0] = a[0].powf(p);
        for k in 1..N {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * a[j] * g[k - j];
            }
            g[k] = acc / (k as f64 * a[0]);
        }
        Jet(g)
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Jet::constant(1.0) / self.powi(-n);
        }
        let mut acc = Jet::constant(1.0);
        let mut base = self;
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
    fn compose(self, taylor: &dyn Fn(usize) -> f64) -> Self {
        let mut delta = self;
        delta.0[0] = 0.0;
        let mut out = Jet::constant(taylor(0));
        let mut pow = Jet::constant(1.0);
        for n in 1..N {
            pow = pow * delta;
            out = out + pow * taylor(n);
        }
        out
    }
}
