//! Scalar expressions over chart coordinates.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' integer)*
//! integer := '-'? digits
//! atom    := number | coordinate | 'pi' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | tan | cot | exp | log | sqrt
//! ```
//!
//! Binary operators are left-associative, so `x^2^3` is `(x^2)^3`. Exponents
//! are integer literals only; fractional powers must be spelled with
//! `sqrt`, or `exp`/`log`.
//!
//! Evaluation returns either a plain `f64` or a second-order [`Jet`] with
//! exact gradient and Hessian.

mod jet;
mod parse;

pub use jet::{Dual, Jet};
pub use parse::parse_expression;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Cot,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// `(f(u), f'(u), f''(u))`, or a reason the point is outside the domain.
    fn derivatives(self, u: f64) -> Result<(f64, f64, f64), &'static str> {
        Ok(match self {
            Func::Sin => (u.sin(), u.cos(), -u.sin()),
            Func::Cos => (u.cos(), -u.sin(), -u.cos()),
            Func::Tan => {
                if u.cos() == 0.0 {
                    return Err("tan at a pole");
                }
                let t = u.tan();
                let d = 1.0 + t * t;
                (t, d, 2.0 * t * d)
            }
            Func::Cot => {
                if u.sin() == 0.0 {
                    return Err("cot at a pole");
                }
                let c = 1.0 / u.tan();
                let d = 1.0 + c * c;
                (c, -d, 2.0 * c * d)
            }
            Func::Exp => {
                let e = u.exp();
                (e, e, e)
            }
            Func::Log => {
                if u <= 0.0 {
                    return Err("log of a nonpositive value");
                }
                (u.ln(), 1.0 / u, -1.0 / (u * u))
            }
            Func::Sqrt => {
                if u <= 0.0 {
                    return Err("sqrt of a nonpositive value");
                }
                let s = u.sqrt();
                (s, 0.5 / s, -0.25 / (s * u))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Immutable expression tree. Subtrees are shared, so composed expressions
/// (metric flips, conformal rescalings) stay compact in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    /// Numeric literal. Negative values become `Neg(Num(|v|))` so that
    /// printed output parses back to the same tree.
    pub fn num(v: f64) -> Self {
        if v < 0.0 {
            Expr::new(Node::Neg(Expr::new(Node::Num(-v))))
        } else {
            Expr::new(Node::Num(v))
        }
    }

    pub fn var(index: usize) -> Self {
        Expr::new(Node::Var(index))
    }

    pub fn zero() -> Self {
        Expr::num(0.0)
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.node() {
            Node::Num(v) => Some(*v),
            Node::Neg(e) => e.constant_value().map(|v| -v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant_value() == Some(0.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self.node() {
            Node::Num(_) => None,
            Node::Var(i) => Some(*i),
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.max_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    // Builders used when composing expressions. They fold literal zeros and
    // ones so that composed metrics do not drag dead terms around.

    pub fn add(&self, other: &Expr) -> Expr {
        match (self.constant_value(), other.constant_value()) {
            (Some(a), Some(b)) => Expr::num(a + b),
            (Some(0.0), _) => other.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Expr::new(Node::Add(self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        match (self.constant_value(), other.constant_value()) {
            (Some(a), Some(b)) => Expr::num(a - b),
            (Some(0.0), _) => other.neg(),
            (_, Some(0.0)) => self.clone(),
            _ => Expr::new(Node::Sub(self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        match (self.constant_value(), other.constant_value()) {
            (Some(a), Some(b)) => Expr::num(a * b),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(0.0)) => Expr::zero(),
            (Some(1.0), _) => other.clone(),
            (_, Some(1.0)) => self.clone(),
            _ => Expr::new(Node::Mul(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        match (self.constant_value(), other.constant_value()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::num(a / b),
            (Some(0.0), _) => Expr::zero(),
            (_, Some(1.0)) => self.clone(),
            _ => Expr::new(Node::Div(self.clone(), other.clone())),
        }
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Neg(inner) => inner.clone(),
            Node::Num(v) if *v == 0.0 => self.clone(),
            _ => Expr::new(Node::Neg(self.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> Expr {
        Expr::new(Node::Pow(self.clone(), k))
    }

    pub fn call(f: Func, arg: &Expr) -> Expr {
        Expr::new(Node::Call(f, arg.clone()))
    }

    /// Render with the given coordinate names. The output parses back to an
    /// identical tree.
    pub fn to_text(&self, coords: &[String]) -> String {
        let mut out = String::new();
        write_expr(self, coords, 0, &mut out);
        out
    }

    pub fn eval(&self, point: &[f64], coords: &[String]) -> Result<f64, ExprError> {
        let mut memo = Memo::default();
        eval_node::<f64>(self, point, coords, &mut memo)
    }

    /// Like [`Expr::eval`], reusing `memo` across expressions that share nodes.
    pub fn eval_shared(
        &self,
        point: &[f64],
        coords: &[String],
        memo: &mut Memo<f64>,
    ) -> Result<f64, ExprError> {
        eval_node::<f64>(self, point, coords, memo)
    }

    /// Value and gradient, reusing `memo` across expressions that share nodes.
    pub fn eval_dual_shared(
        &self,
        point: &[f64],
        coords: &[String],
        memo: &mut Memo<Dual>,
    ) -> Result<Dual, ExprError> {
        eval_node::<Dual>(self, point, coords, memo)
    }

    pub fn eval_jet(&self, point: &[f64], coords: &[String]) -> Result<Jet, ExprError> {
        let mut memo = Memo::default();
        self.eval_jet_shared(point, coords, &mut memo)
    }

    /// Jet evaluation reusing a cache across several expressions that share
    /// subtrees.
    pub fn eval_jet_shared(
        &self,
        point: &[f64],
        coords: &[String],
        memo: &mut Memo<Jet>,
    ) -> Result<Jet, ExprError> {
        eval_node::<Jet>(self, point, coords, memo)
    }
}

/// Per-evaluation cache keyed by shared-node identity.
pub struct Memo<T>(HashMap<usize, T>);

impl<T> Default for Memo<T> {
    fn default() -> Self {
        Memo(HashMap::new())
    }
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;

fn write_expr(e: &Expr, coords: &[String], min_prec: u8, out: &mut String) {
    let (prec, body) = match e.node() {
        Node::Num(v) => (u8::MAX, format_number(*v)),
        Node::Var(i) => (u8::MAX, coords[*i].clone()),
        Node::Call(f, a) => {
            let mut s = format!("{}(", f.name());
            write_expr(a, coords, 0, &mut s);
            s.push(')');
            (u8::MAX, s)
        }
        Node::Pow(a, k) => {
            let mut s = String::new();
            write_expr(a, coords, PREC_POWER, &mut s);
            s.push('^');
            s.push_str(&k.to_string());
            (PREC_POWER, s)
        }
        Node::Neg(a) => {
            let mut s = String::from("-");
            write_expr(a, coords, PREC_UNARY, &mut s);
            (PREC_UNARY, s)
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            let op = if matches!(e.node(), Node::Add(..)) {
                " + "
            } else {
                " - "
            };
            let mut s = String::new();
            write_expr(a, coords, PREC_SUM, &mut s);
            s.push_str(op);
            write_expr(b, coords, PREC_PRODUCT, &mut s);
            (PREC_SUM, s)
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            let op = if matches!(e.node(), Node::Mul(..)) {
                "*"
            } else {
                "/"
            };
            let mut s = String::new();
            write_expr(a, coords, PREC_PRODUCT, &mut s);
            s.push_str(op);
            write_expr(b, coords, PREC_UNARY, &mut s);
            (PREC_PRODUCT, s)
        }
    };
    if prec < min_prec {
        out.push('(');
        out.push_str(&body);
        out.push(')');
    } else {
        out.push_str(&body);
    }
}

fn format_number(v: f64) -> String {
    // `{:?}` is the shortest representation that round-trips exactly.
    format!("{v:?}")
}

impl fmt::Display for Expr {
    /// Renders coordinates positionally as `x0, x1, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.max_var().map_or(0, |m| m + 1);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_text(&names))
    }
}

/// Arithmetic needed by the evaluator; implemented for plain values and jets.
trait Scalar: Clone {
    fn constant(n: usize, v: f64) -> Self;
    fn variable(n: usize, i: usize, v: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn chain(&self, d: (f64, f64, f64)) -> Self;
    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn constant(_: usize, v: f64) -> Self {
        v
    }
    fn variable(_: usize, _: usize, v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn chain(&self, d: (f64, f64, f64)) -> Self {
        d.0
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Dual {
    fn constant(n: usize, v: f64) -> Self {
        Dual::constant(n, v)
    }
    fn variable(n: usize, i: usize, v: f64) -> Self {
        Dual::variable(n, i, v)
    }
    fn value(&self) -> f64 {
        Dual::value(self)
    }
    fn add(&self, o: &Self) -> Self {
        Dual::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Dual::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Dual::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Dual::div(self, o)
    }
    fn neg(&self) -> Self {
        Dual::neg(self)
    }
    fn powi(&self, k: i32) -> Self {
        Dual::powi(self, k)
    }
    fn chain(&self, d: (f64, f64, f64)) -> Self {
        Dual::chain(self, d.0, d.1)
    }
    fn is_finite(&self) -> bool {
        Dual::is_finite(self)
    }
}

impl Scalar for Jet {
    fn constant(n: usize, v: f64) -> Self {
        Jet::constant(n, v)
    }
    fn variable(n: usize, i: usize, v: f64) -> Self {
        Jet::variable(n, i, v)
    }
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn powi(&self, k: i32) -> Self {
        Jet::powi(self, k)
    }
    fn chain(&self, d: (f64, f64, f64)) -> Self {
        Jet::chain(self, d.0, d.1, d.2)
    }
    fn is_finite(&self) -> bool {
        Jet::is_finite(self)
    }
}

fn eval_node<S: Scalar>(
    e: &Expr,
    point: &[f64],
    coords: &[String],
    memo: &mut Memo<S>,
) -> Result<S, ExprError> {
    let key = Arc::as_ptr(&e.0) as usize;
    if let Some(v) = memo.0.get(&key) {
        return Ok(v.clone());
    }
    let n = point.len();
    let domain = |reason: &str| ExprError::Domain {
        subexpression: e.to_text(coords),
        reason: reason.to_string(),
    };
    let result = match e.node() {
        Node::Num(v) => S::constant(n, *v),
        Node::Var(i) => {
            if *i >= n {
                return Err(ExprError::PointDimension {
                    expected: i + 1,
                    found: n,
                });
            }
            S::variable(n, *i, point[*i])
        }
        Node::Neg(a) => eval_node(a, point, coords, memo)?.neg(),
        Node::Add(a, b) => {
            let a = eval_node(a, point, coords, memo)?;
            a.add(&eval_node(b, point, coords, memo)?)
        }
        Node::Sub(a, b) => {
            let a = eval_node(a, point, coords, memo)?;
            a.sub(&eval_node(b, point, coords, memo)?)
        }
        Node::Mul(a, b) => {
            let a = eval_node(a, point, coords, memo)?;
            a.mul(&eval_node(b, point, coords, memo)?)
        }
        Node::Div(a, b) => {
            let a = eval_node(a, point, coords, memo)?;
            let b = eval_node(b, point, coords, memo)?;
            if b.value() == 0.0 {
                return Err(domain("division by zero"));
            }
            a.div(&b)
        }
        Node::Pow(a, k) => {
            let a = eval_node(a, point, coords, memo)?;
            if *k < 0 && a.value() == 0.0 {
                return Err(domain("negative power of zero"));
            }
            a.powi(*k)
        }
        Node::Call(f, a) => {
            let a = eval_node(a, point, coords, memo)?;
            let d = f.derivatives(a.value()).map_err(domain)?;
            a.chain(d)
        }
    };
    if !result.is_finite() {
        return Err(domain("non-finite result"));
    }
    memo.0.insert(key, result.clone());
    Ok(result)
}
