use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// Which half of phase space a variable lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Q,
    P,
}

/// A phase-space coordinate. `index` is zero-based; it prints as `q1`, `p1`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn q(index: usize) -> Self {
        Var { kind: VarKind::Q, index }
    }

    pub fn p(index: usize) -> Self {
        Var { kind: VarKind::P, index }
    }

    /// Position of this coordinate in (q1..qn, p1..pn) ordering.
    pub fn slot(&self, n: usize) -> usize {
        match self.kind {
            VarKind::Q => self.index,
            VarKind::P => n + self.index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.kind {
            VarKind::Q => 'q',
            VarKind::P => 'p',
        };
        write!(f, "{}{}", c, self.index + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            _ => return None,
        })
    }

    /// Applies the function, returning `None` outside its real domain.
    pub fn apply(self, x: f64) -> Option<f64> {
        match self {
            Func::Sin => Some(x.sin()),
            Func::Cos => Some(x.cos()),
            Func::Exp => Some(x.exp()),
            Func::Sqrt if x >= 0.0 => Some(x.sqrt()),
            Func::Ln if x > 0.0 => Some(x.ln()),
            Func::Sqrt | Func::Ln => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree over phase-space variables.
///
/// Children are reference counted so derivative and bracket constructions can
/// share subtrees freely; trees are never mutated after construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Var(Var),
    Neg(Arc<Expr>),
    Binary(BinOp, Arc<Expr>, Arc<Expr>),
    /// Integer power; the exponent is part of the node, never an expression.
    Pow(Arc<Expr>, i32),
    Call(Func, Arc<Expr>),
}

impl Expr {
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Pi => Some(std::f64::consts::PI),
            _ => None,
        }
    }

    pub fn is_const(&self, value: f64) -> bool {
        matches!(self, Expr::Const(c) if *c == value)
    }

    pub fn is_zero(&self) -> bool {
        self.is_const(0.0)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Calls `visit` on every variable leaf.
    pub fn for_each_var(&self, visit: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) | Expr::Pi => {}
            Expr::Var(v) => visit(*v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.for_each_var(visit),
            Expr::Binary(_, a, b) => {
                a.for_each_var(visit);
                b.for_each_var(visit);
            }
        }
    }

    pub fn contains_kind(&self, kind: VarKind) -> bool {
        let mut found = false;
        self.for_each_var(&mut |v| found |= v.kind == kind);
        found
    }

    pub fn count_var_leaves(&self) -> usize {
        let mut count = 0;
        self.for_each_var(&mut |_| count += 1);
        count
    }

    fn rank(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Pi => 1,
            Expr::Var(_) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Call(..) => 5,
            Expr::Binary(..) => 6,
        }
    }

    /// Total structural order used to canonicalize commutative operands.
    pub fn structural_cmp(&self, other: &Expr) -> Ordering {
        match (self, other) {
            (Expr::Const(a), Expr::Const(b)) => a.total_cmp(b),
            (Expr::Var(a), Expr::Var(b)) => a.cmp(b),
            (Expr::Neg(a), Expr::Neg(b)) => a.structural_cmp(b),
            (Expr::Pow(a, j), Expr::Pow(b, k)) => a.structural_cmp(b).then(j.cmp(k)),
            (Expr::Call(f, a), Expr::Call(g, b)) => f.cmp(g).then_with(|| a.structural_cmp(b)),
            (Expr::Binary(o, a1, b1), Expr::Binary(p, a2, b2)) => o
                .cmp(p)
                .then_with(|| a1.structural_cmp(a2))
                .then_with(|| b1.structural_cmp(b2)),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Expr {
    /// Canonical, fully parenthesized form. Re-parses to an expression that
    /// evaluates identically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{}", c)
                }
            }
            Expr::Pi => f.write_str("pi"),
            Expr::Var(v) => write!(f, "{}", v),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Binary(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
            Expr::Pow(a, k) => {
                if *k < 0 {
                    write!(f, "({}^(-{}))", a, k.unsigned_abs())
                } else {
                    write!(f, "({}^{})", a, k)
                }
            }
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), a),
        }
    }
}
