// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::rc::Rc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    In,
    NotIn,
    Is,
    IsNot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Pos,
    Not,
}

#[derive(Debug, Clone)]
pub enum Expr {
    Int(i64),
    Float(f64),
    Str(Rc<str>),
    Bool(bool),
    None,
    Name(String),
    List(Vec<Expr>),
    Tuple(Vec<Expr>),
    Dict(Vec<(Expr, Expr)>),
    Binary(Box<Expr>, BinOp, Box<Expr>),
    Unary(UnaryOp, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Compare(Box<Expr>, Vec<(CmpOp, Expr)>),
    IfElse { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Call { func: Box<Expr>, args: Vec<Expr>, kwargs: Vec<(String, Expr)> },
    Attribute(Box<Expr>, String),
    Index(Box<Expr>, Box<Expr>),
    Slice { target: Box<Expr>, lower: Option<Box<Expr>>, upper: Option<Box<Expr>>, step: Option<Box<Expr>> },
    ListComp { element: Box<Expr>, target: Target, iter: Box<Expr>, conds: Vec<Expr> },
}

#[derive(Debug, Clone)]
pub enum Target {
    Name(String),
    Index(Box<Expr>, Box<Expr>),
    Tuple(Vec<Target>),
}

impl Target {
    pub fn bound_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Target::Name(n) => {
                out.insert(n.clone());
            }
            Target::Index(..) => {}
            Target::Tuple(items) => items.iter().for_each(|t| t.bound_names(out)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Stmt {
    pub line: usize,
    pub kind: StmtKind,
}

#[derive(Debug, Clone)]
pub enum StmtKind {
    Expr(Expr),
    Assign(Vec<Target>, Expr),
    AugAssign(Target, BinOp, Expr),
    If(Expr, Vec<Stmt>, Vec<Stmt>),
    While(Expr, Vec<Stmt>),
    For(Target, Expr, Vec<Stmt>),
    Def(Rc<FuncDef>),
    Return(Option<Expr>),
    Assert(Expr, Option<Expr>),
    Global(Vec<String>),
    Break,
    Continue,
    Pass,
}

#[derive(Debug)]
pub struct FuncDef {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    /// Names assigned anywhere in the body (minus `global` declarations).
    pub locals: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct Param {
    pub name: String,
    pub default: Option<Expr>,
}

/// Collects names a function body binds, which makes them local for the call.
pub fn collect_locals(params: &[Param], body: &[Stmt]) -> BTreeSet<String> {
    fn walk(stmts: &[Stmt], out: &mut BTreeSet<String>, globals: &mut BTreeSet<String>) {
        for stmt in stmts {
            match &stmt.kind {
                StmtKind::Assign(targets, _) => targets.iter().for_each(|t| t.bound_names(out)),
                StmtKind::AugAssign(t, _, _) => t.bound_names(out),
                StmtKind::For(t, _, body) => {
                    t.bound_names(out);
                    walk(body, out, globals);
                }
                StmtKind::If(_, a, b) => {
                    walk(a, out, globals);
                    walk(b, out, globals);
                }
                StmtKind::While(_, body) => walk(body, out, globals),
                StmtKind::Def(f) => {
                    out.insert(f.name.clone());
                }
                StmtKind::Global(names) => globals.extend(names.iter().cloned()),
                _ => {}
            }
        }
    }
    let mut out: BTreeSet<String> = params.iter().map(|p| p.name.clone()).collect();
    let mut globals = BTreeSet::new();
    walk(body, &mut out, &mut globals);
    out.retain(|n| !globals.contains(n));
    out
}
