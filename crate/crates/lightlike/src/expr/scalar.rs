//! Number types that expression trees can be evaluated over.
//!
//! Besides `f64` there are two truncated Taylor jets in two variables:
//! [`Jet1`] carries a value and gradient, [`Jet2`] adds the Hessian. They
//! give exact derivatives of composite maps without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// First-order jet in two variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub v: f64,
    pub g: [f64; 2],
}

impl Jet1 {
    pub fn variable(v: f64, k: usize) -> Self {
        let mut g = [0.0; 2];
        g[k] = 1.0;
        Jet1 { v, g }
    }

    /// Apply a scalar function given its value and first derivative at `self.v`.
    fn chain(self, f: f64, df: f64) -> Self {
        Jet1 { v: f, g: [df * self.g[0], df * self.g[1]] }
    }
}

impl Add for Jet1 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet1 { v: self.v + o.v, g: [self.g[0] + o.g[0], self.g[1] + o.g[1]] }
    }
}

impl Sub for Jet1 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet1 { v: self.v - o.v, g: [self.g[0] - o.g[0], self.g[1] - o.g[1]] }
    }
}

impl Neg for Jet1 {
    type Output = Self;
    fn neg(self) -> Self {
        Jet1 { v: -self.v, g: [-self.g[0], -self.g[1]] }
    }
}

impl Mul for Jet1 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Jet1 { v: self.v * o.v, g: [self.g[0] * o.v + self.v * o.g[0], self.g[1] * o.v + self.v * o.g[1]] }
    }
}

impl Div for Jet1 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.chain(1.0 / o.v, -1.0 / (o.v * o.v));
        self * inv
    }
}

impl Scalar for Jet1 {
    fn constant(c: f64) -> Self {
        Jet1 { v: c, g: [0.0; 2] }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v)
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet1::constant(1.0);
        }
        self.chain(self.v.powi(n), n as f64 * self.v.powi(n - 1))
    }
}

/// Second-order jet in two variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 2],
    pub h: [[f64; 2]; 2],
}

impl Jet2 {
    pub fn variable(v: f64, k: usize) -> Self {
        let mut g = [0.0; 2];
        g[k] = 1.0;
        Jet2 { v, g, h: [[0.0; 2]; 2] }
    }

    /// Truncate to first order.
    pub fn first(&self) -> Jet1 {
        Jet1 { v: self.v, g: self.g }
    }

    /// Partial derivative along variable `k`, one order lower.
    pub fn partial(&self, k: usize) -> Jet1 {
        Jet1 { v: self.g[k], g: self.h[k] }
    }

    fn chain(self, f: f64, df: f64, ddf: f64) -> Self {
        let mut h = [[0.0; 2]; 2];
        for (a, row) in h.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x = ddf * self.g[a] * self.g[b] + df * self.h[a][b];
            }
        }
        Jet2 { v: f, g: [df * self.g[0], df * self.g[1]], h }
    }

    fn zip(self, o: Self, s: f64) -> Self {
        let mut h = self.h;
        for a in 0..2 {
            for b in 0..2 {
                h[a][b] += s * o.h[a][b];
            }
        }
        Jet2 { v: self.v + s * o.v, g: [self.g[0] + s * o.g[0], self.g[1] + s * o.g[1]], h }
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.zip(o, 1.0)
    }
}

impl Sub for Jet2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.zip(o, -1.0)
    }
}

impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        Jet2::constant(0.0).zip(self, -1.0)
    }
}

impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut h = [[0.0; 2]; 2];
        for (a, row) in h.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x = self.h[a][b] * o.v + self.g[a] * o.g[b] + o.g[a] * self.g[b] + self.v * o.h[a][b];
            }
        }
        Jet2 { v: self.v * o.v, g: [self.g[0] * o.v + self.v * o.g[0], self.g[1] * o.v + self.v * o.g[1]], h }
    }
}

impl Div for Jet2 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let x = o.v;
        self * o.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}

impl Scalar for Jet2 {
    fn constant(c: f64) -> Self {
        Jet2 { v: c, g: [0.0; 2], h: [[0.0; 2]; 2] }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Jet2::constant(1.0);
        }
        let x = self.v;
        let nf = n as f64;
        let ddf = if n == 1 { 0.0 } else { nf * (nf - 1.0) * x.powi(n - 2) };
        self.chain(x.powi(n), nf * x.powi(n - 1), ddf)
    }
}
