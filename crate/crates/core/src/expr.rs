//! Expressions shared by trigger guards and structural equations.
//!
//! Values are plain integers; booleans are the integers 0 and 1 and any
//! non-zero value counts as true where a truth value is needed.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }

    fn apply(self, l: i64, r: i64) -> Result<i64, ExprError> {
        let truth = |b: bool| i64::from(b);
        Ok(match self {
            BinOp::Or => truth(l != 0 || r != 0),
            BinOp::And => truth(l != 0 && r != 0),
            BinOp::Eq => truth(l == r),
            BinOp::Ne => truth(l != r),
            BinOp::Lt => truth(l < r),
            BinOp::Le => truth(l <= r),
            BinOp::Gt => truth(l > r),
            BinOp::Ge => truth(l >= r),
            BinOp::Add => l.checked_add(r).ok_or(ExprError::Overflow)?,
            BinOp::Sub => l.checked_sub(r).ok_or(ExprError::Overflow)?,
            BinOp::Mul => l.checked_mul(r).ok_or(ExprError::Overflow)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Name(String),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("unresolved name `{0}`")]
    Unresolved(String),
    #[error("integer overflow")]
    Overflow,
    #[error("{0}() needs at least one argument")]
    EmptyCall(&'static str),
}

impl Expr {
    pub fn name(n: impl Into<String>) -> Self {
        Expr::Name(n.into())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Every name referenced, in sorted order.
    pub fn names(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Name(n) => {
                out.insert(n);
            }
            Expr::Not(e) | Expr::Neg(e) => e.collect_names(out),
            Expr::Binary(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_names(out)),
        }
    }

    /// Evaluates with `lookup` resolving names. The lookup's error wins over
    /// evaluation errors of sibling subexpressions evaluated later.
    pub fn eval<E, F>(&self, lookup: &F) -> Result<i64, E>
    where
        F: Fn(&str) -> Result<i64, E>,
        E: From<ExprError>,
    {
        Ok(match self {
            Expr::Int(v) => *v,
            Expr::Bool(b) => i64::from(*b),
            Expr::Name(n) => lookup(n)?,
            Expr::Not(e) => i64::from(e.eval(lookup)? == 0),
            Expr::Neg(e) => e.eval(lookup)?.checked_neg().ok_or(ExprError::Overflow)?,
            Expr::Binary(op, l, r) => {
                let l = l.eval(lookup)?;
                let r = r.eval(lookup)?;
                op.apply(l, r)?
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(|a| a.eval(lookup)).collect::<Result<Vec<_>, E>>()?;
                let v = match f {
                    Func::Min => vals.into_iter().min(),
                    Func::Max => vals.into_iter().max(),
                };
                v.ok_or(ExprError::EmptyCall(f.name()))?
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Not(_) => 3,
            Expr::Neg(_) => 7,
            _ => 8,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Name(n) => f.write_str(n),
            Expr::Not(e) => {
                f.write_str("not ")?;
                write_operand(f, e, e.precedence() < 3)
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                // `-1` is reserved for the negative literal
                write_operand(f, e, !matches!(**e, Expr::Name(_)))
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let left_parens = l.precedence() < p
                    || (op.is_comparison() && matches!(**l, Expr::Binary(o, ..) if o.is_comparison()));
                let right_parens = r.precedence() <= p;
                write_operand(f, l, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r, right_parens)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}
