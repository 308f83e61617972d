//! Symbolic scalar functions on `R^m`.
//!
//! An [`Expr`] is an immutable tree shared through `Arc`, so clones are cheap
//! and evaluation from several threads needs no locking. Arithmetic through the
//! operator traits folds constants (`0*x`, `x+0`, `1*x`, constant subtrees) and
//! nothing else.

mod parse;
mod scalar;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use parse::parse;
pub use scalar::{Jet1, Jet2, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Constant(f64),
    /// 1-based coordinate index.
    Coordinate(usize),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    IntPow(Arc<Expr>, i32),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Sinh(Arc<Expr>),
    Cosh(Arc<Expr>),
}

use Expr::*;

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Constant(c)
    }

    pub fn zero() -> Expr {
        Constant(0.0)
    }

    pub fn one() -> Expr {
        Constant(1.0)
    }

    pub fn coord(k: usize) -> Expr {
        assert!(k >= 1, "coordinates are 1-based");
        Coordinate(k)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Constant(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(1.0)
    }

    /// Largest coordinate index referenced, 0 for a constant tree.
    pub fn max_coordinate(&self) -> usize {
        match self {
            Constant(_) => 0,
            Coordinate(k) => *k,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.max_coordinate().max(b.max_coordinate()),
            Neg(a) | IntPow(a, _) | Exp(a) | Log(a) | Sin(a) | Cos(a) | Sinh(a) | Cosh(a) => a.max_coordinate(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Constant(_) | Coordinate(_) => 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => 1 + a.size() + b.size(),
            Neg(a) | IntPow(a, _) | Exp(a) | Log(a) | Sin(a) | Cos(a) | Sinh(a) | Cosh(a) => 1 + a.size(),
        }
    }

    pub fn powi(&self, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => self.clone(),
            _ => match self.as_constant() {
                Some(c) if c != 0.0 || n > 0 => fold(c.powi(n), || IntPow(self.arc(), n)),
                _ => IntPow(self.arc(), n),
            },
        }
    }

    pub fn exp(&self) -> Expr {
        self.unary(Exp, f64::exp)
    }

    pub fn ln(&self) -> Expr {
        match self.as_constant() {
            Some(c) if c > 0.0 => Constant(c.ln()),
            _ => Log(self.arc()),
        }
    }

    pub fn sin(&self) -> Expr {
        self.unary(Sin, f64::sin)
    }

    pub fn cos(&self) -> Expr {
        self.unary(Cos, f64::cos)
    }

    pub fn sinh(&self) -> Expr {
        self.unary(Sinh, f64::sinh)
    }

    pub fn cosh(&self) -> Expr {
        self.unary(Cosh, f64::cosh)
    }

    fn unary(&self, node: fn(Arc<Expr>) -> Expr, f: fn(f64) -> f64) -> Expr {
        match self.as_constant() {
            Some(c) => fold(f(c), || node(self.arc())),
            None => node(self.arc()),
        }
    }

    fn arc(&self) -> Arc<Expr> {
        Arc::new(self.clone())
    }

    pub fn eval(&self, p: &[f64]) -> Result<f64> {
        self.eval_with(p)
    }

    /// Evaluate over any [`Scalar`], with domain checks on the real part.
    pub fn eval_with<T: Scalar>(&self, p: &[T]) -> Result<T> {
        let r = match self {
            Constant(c) => T::constant(*c),
            Coordinate(k) => match p.get(k - 1) {
                Some(x) => *x,
                None => {
                    return Err(Error::DimensionMismatch(format!("x{k} evaluated at a point of dimension {}", p.len())))
                }
            },
            Add(a, b) => a.eval_with(p)? + b.eval_with(p)?,
            Sub(a, b) => a.eval_with(p)? - b.eval_with(p)?,
            Mul(a, b) => a.eval_with(p)? * b.eval_with(p)?,
            Div(a, b) => {
                let d = b.eval_with(p)?;
                if d.value() == 0.0 {
                    return Err(Error::Domain { op: "division", value: 0.0 });
                }
                a.eval_with(p)? / d
            }
            Neg(a) => -a.eval_with(p)?,
            IntPow(a, n) => {
                let x = a.eval_with(p)?;
                if *n < 0 && x.value() == 0.0 {
                    return Err(Error::Domain { op: "power", value: 0.0 });
                }
                x.powi(*n)
            }
            Exp(a) => a.eval_with(p)?.exp(),
            Log(a) => {
                let x = a.eval_with(p)?;
                if x.value() <= 0.0 {
                    return Err(Error::Domain { op: "log", value: x.value() });
                }
                x.ln()
            }
            Sin(a) => a.eval_with(p)?.sin(),
            Cos(a) => a.eval_with(p)?.cos(),
            Sinh(a) => a.eval_with(p)?.sinh(),
            Cosh(a) => a.eval_with(p)?.cosh(),
        };
        if !r.value().is_finite() {
            return Err(Error::Domain { op: self.op_name(), value: r.value() });
        }
        Ok(r)
    }

    fn op_name(&self) -> &'static str {
        match self {
            Constant(_) => "constant",
            Coordinate(_) => "coordinate",
            Add(..) => "addition",
            Sub(..) => "subtraction",
            Mul(..) => "multiplication",
            Div(..) => "division",
            Neg(_) => "negation",
            IntPow(..) => "power",
            Exp(_) => "exp",
            Log(_) => "log",
            Sin(_) => "sin",
            Cos(_) => "cos",
            Sinh(_) => "sinh",
            Cosh(_) => "cosh",
        }
    }

    /// Exact partial derivative with respect to the 1-based coordinate `k`.
    pub fn partial(&self, k: usize) -> Expr {
        match self {
            Constant(_) => Expr::zero(),
            Coordinate(j) => {
                if *j == k {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Add(a, b) => a.partial(k) + b.partial(k),
            Sub(a, b) => a.partial(k) - b.partial(k),
            Mul(a, b) => a.partial(k) * (**b).clone() + (**a).clone() * b.partial(k),
            Div(a, b) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                a.partial(k) / b.clone() - a * b.partial(k) / b.powi(2)
            }
            Neg(a) => -a.partial(k),
            IntPow(a, n) => Expr::constant(*n as f64) * a.powi(n - 1) * a.partial(k),
            Exp(a) => self.clone() * a.partial(k),
            Log(a) => a.partial(k) / (**a).clone(),
            Sin(a) => a.cos() * a.partial(k),
            Cos(a) => -(a.sin() * a.partial(k)),
            Sinh(a) => a.cosh() * a.partial(k),
            Cosh(a) => a.sinh() * a.partial(k),
        }
    }

    /// Replace each coordinate `x_k` by `subs[k-1]`.
    pub fn substitute(&self, subs: &[Expr]) -> Result<Expr> {
        let rec = |a: &Arc<Expr>| a.substitute(subs);
        Ok(match self {
            Constant(c) => Constant(*c),
            Coordinate(k) => {
                subs.get(k - 1).cloned().ok_or_else(|| Error::DimensionMismatch(format!("no substitution for x{k}")))?
            }
            Add(a, b) => rec(a)? + rec(b)?,
            Sub(a, b) => rec(a)? - rec(b)?,
            Mul(a, b) => rec(a)? * rec(b)?,
            Div(a, b) => rec(a)? / rec(b)?,
            Neg(a) => -rec(a)?,
            IntPow(a, n) => rec(a)?.powi(*n),
            Exp(a) => rec(a)?.exp(),
            Log(a) => rec(a)?.ln(),
            Sin(a) => rec(a)?.sin(),
            Cos(a) => rec(a)?.cos(),
            Sinh(a) => rec(a)?.sinh(),
            Cosh(a) => rec(a)?.cosh(),
        })
    }
}

/// Use a folded constant only when it is finite; otherwise keep the node.
fn fold(c: f64, keep: impl FnOnce() -> Expr) -> Expr {
    if c.is_finite() {
        Constant(c)
    } else {
        keep()
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, b: Expr) -> Expr {
        match (self.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => fold(x + y, || Add(self.arc(), b.arc())),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => self,
            _ => Add(Arc::new(self), Arc::new(b)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, b: Expr) -> Expr {
        match (self.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => fold(x - y, || Sub(self.arc(), b.arc())),
            (Some(x), _) if x == 0.0 => -b,
            (_, Some(y)) if y == 0.0 => self,
            _ => Sub(Arc::new(self), Arc::new(b)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, b: Expr) -> Expr {
        if self.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        match (self.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) => fold(x * y, || Mul(self.arc(), b.arc())),
            _ if self.is_one() => b,
            _ if b.is_one() => self,
            _ => Mul(Arc::new(self), Arc::new(b)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, b: Expr) -> Expr {
        match (self.as_constant(), b.as_constant()) {
            (Some(x), Some(y)) if y != 0.0 => fold(x / y, || Div(self.arc(), b.arc())),
            _ if b.is_one() => self,
            _ => Div(Arc::new(self), Arc::new(b)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Constant(c) => Constant(-c),
            Neg(a) => (*a).clone(),
            e => Neg(Arc::new(e)),
        }
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, b: &Expr) -> Expr {
                $tr::$m(self.clone(), b.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, b: Expr) -> Expr {
                $tr::$m(self.clone(), b)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, b: &Expr) -> Expr {
                $tr::$m(self, b.clone())
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $m(self, b: f64) -> Expr {
                $tr::$m(self, Expr::constant(b))
            }
        }
    )*};
}
ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Constant(c)
    }
}

/// Fully parenthesized output that [`parse`] reads back to an equal value.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant(c) if c.is_sign_negative() => write!(f, "(-{})", -c),
            Constant(c) => write!(f, "{c}"),
            Coordinate(k) => write!(f, "x{k}"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "(-{a})"),
            IntPow(a, n) => match **a {
                Constant(_) | Coordinate(_) => write!(f, "{a}^{n}"),
                _ => write!(f, "({a})^{n}"),
            },
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Sinh(a) => write!(f, "sinh({a})"),
            Cosh(a) => write!(f, "cosh({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_rules() {
        let x = Expr::coord(1);
        assert_eq!(Expr::zero() * x.clone(), Expr::zero());
        assert_eq!(x.clone() + Expr::zero(), x);
        assert_eq!(Expr::one() * x.clone(), x);
        assert_eq!(Expr::constant(2.0) * Expr::constant(3.0), Expr::constant(6.0));
        assert_eq!(-(-x.clone()), x);
    }

    #[test]
    fn partial_of_coordinate() {
        assert_eq!(Expr::coord(1).partial(1), Expr::one());
        assert_eq!(Expr::coord(1).partial(2), Expr::zero());
    }

    #[test]
    fn domain_errors_are_reported() {
        let d = Expr::one() / Expr::coord(1);
        assert!(matches!(d.eval(&[0.0]), Err(Error::Domain { op: "division", .. })));
        let l = Expr::coord(1).ln();
        assert!(matches!(l.eval(&[-1.0]), Err(Error::Domain { op: "log", .. })));
        let e = Expr::coord(1).exp();
        assert!(e.eval(&[1000.0]).unwrap_err().is_domain());
    }

    #[test]
    fn short_point_is_a_dimension_error() {
        let e = Expr::coord(3);
        assert!(matches!(e.eval(&[1.0, 2.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn jets_match_symbolic_partials() {
        let e = parse("exp(x1)*sin(x2) + x1^3/x2", 2).unwrap();
        let p = [0.3, 0.7];
        let j = e.eval_with(&[Jet2::variable(p[0], 0), Jet2::variable(p[1], 1)]).unwrap();
        for a in 0..2 {
            let da = e.partial(a + 1);
            assert!((j.g[a] - da.eval(&p).unwrap()).abs() < 1e-12);
            for b in 0..2 {
                let dab = da.partial(b + 1).eval(&p).unwrap();
                assert!((j.h[a][b] - dab).abs() < 1e-11);
            }
        }
    }
}
