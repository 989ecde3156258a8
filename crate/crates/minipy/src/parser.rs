// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser producing [`Stmt`] trees.

use std::rc::Rc;

use crate::ast::*;
use crate::error::Exception;
use crate::lexer::{tokenize, Tok, Token};

const KEYWORDS: &[&str] = &[
    "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del", "elif", "else", "except",
    "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise",
    "return", "try", "while", "with", "yield", "True", "False", "None",
];

pub fn parse_program(source: &str) -> Result<Vec<Stmt>, Exception> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0, func_depth: 0 };
    let mut out = Vec::new();
    while !parser.at(&Tok::Eof) {
        if parser.eat(&Tok::Newline) {
            continue;
        }
        out.extend(parser.statement()?);
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    func_depth: usize,
}

type PResult<T> = Result<T, Exception>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn line(&self) -> usize {
        self.tokens[self.pos].line
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: impl Into<String>) -> Exception {
        Exception::new("SyntaxError", msg).at(self.line())
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}', found {}", describe(self.peek()))))
        }
    }

    fn expect_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Name(n) if !KEYWORDS.contains(&n.as_str()) => {
                self.advance();
                Ok(n)
            }
            other => Err(self.error(format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn end_of_simple(&mut self) -> PResult<()> {
        if self.eat(&Tok::Newline) || self.at(&Tok::Eof) || self.at(&Tok::Dedent) {
            Ok(())
        } else {
            Err(self.error(format!("invalid syntax near {}", describe(self.peek()))))
        }
    }

    fn statement(&mut self) -> PResult<Vec<Stmt>> {
        let line = self.line();
        let kind = match self.peek().clone() {
            Tok::Name(kw) => match kw.as_str() {
                "if" => {
                    self.advance();
                    return Ok(vec![self.if_rest(line)?]);
                }
                "while" => {
                    self.advance();
                    let cond = self.expr()?;
                    self.expect_op(":")?;
                    let body = self.suite()?;
                    StmtKind::While(cond, body)
                }
                "for" => {
                    self.advance();
                    let target = self.target_list()?;
                    if !self.eat_kw("in") {
                        return Err(self.error("expected 'in'"));
                    }
                    let iter = self.expr_list()?;
                    self.expect_op(":")?;
                    let body = self.suite()?;
                    StmtKind::For(target, iter, body)
                }
                "def" => {
                    self.advance();
                    StmtKind::Def(Rc::new(self.funcdef()?))
                }
                "class" | "try" | "with" | "lambda" | "async" | "yield" | "raise" | "del" | "nonlocal" => {
                    return Err(self.error(format!("'{kw}' is not supported")));
                }
                "import" | "from" => {
                    return Err(
                        Exception::new("ModuleNotFoundError", "imports are unavailable in this sandbox").at(line)
                    );
                }
                _ => return self.simple_line(),
            },
            Tok::Indent => return Err(Exception::new("IndentationError", "unexpected indent").at(line)),
            _ => return self.simple_line(),
        };
        Ok(vec![Stmt { line, kind }])
    }

    fn simple_line(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.simple_stmt()?];
        while self.eat_op(";") {
            if self.at(&Tok::Newline) || self.at(&Tok::Eof) {
                break;
            }
            out.push(self.simple_stmt()?);
        }
        self.end_of_simple()?;
        Ok(out)
    }

    fn simple_stmt(&mut self) -> PResult<Stmt> {
        let line = self.line();
        let kind = if self.eat_kw("pass") {
            StmtKind::Pass
        } else if self.eat_kw("break") {
            StmtKind::Break
        } else if self.eat_kw("continue") {
            StmtKind::Continue
        } else if self.eat_kw("return") {
            if self.at(&Tok::Newline) || self.at(&Tok::Eof) || self.at_op(";") {
                StmtKind::Return(None)
            } else {
                StmtKind::Return(Some(self.expr_list()?))
            }
        } else if self.eat_kw("assert") {
            let cond = self.expr()?;
            let msg = if self.eat_op(",") { Some(self.expr()?) } else { None };
            StmtKind::Assert(cond, msg)
        } else if self.eat_kw("global") {
            let mut names = vec![self.expect_name()?];
            while self.eat_op(",") {
                names.push(self.expect_name()?);
            }
            StmtKind::Global(names)
        } else {
            let first = self.expr_list()?;
            if let Some(op) = self.aug_op() {
                self.advance();
                let target = to_target(first).map_err(|m| Exception::new("SyntaxError", m).at(line))?;
                if matches!(target, Target::Tuple(_)) {
                    return Err(Exception::new("SyntaxError", "illegal target for augmented assignment").at(line));
                }
                let value = self.expr_list()?;
                StmtKind::AugAssign(target, op, value)
            } else if self.at_op("=") {
                let mut targets = vec![first];
                let mut value;
                loop {
                    self.expect_op("=")?;
                    value = self.expr_list()?;
                    if self.at_op("=") {
                        targets.push(value);
                    } else {
                        break;
                    }
                }
                let targets = targets
                    .into_iter()
                    .map(to_target)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|m| Exception::new("SyntaxError", m).at(line))?;
                StmtKind::Assign(targets, value)
            } else {
                StmtKind::Expr(first)
            }
        };
        Ok(Stmt { line, kind })
    }

    fn aug_op(&self) -> Option<BinOp> {
        match self.peek() {
            Tok::Op("+=") => Some(BinOp::Add),
            Tok::Op("-=") => Some(BinOp::Sub),
            Tok::Op("*=") => Some(BinOp::Mul),
            Tok::Op("/=") => Some(BinOp::Div),
            Tok::Op("//=") => Some(BinOp::FloorDiv),
            Tok::Op("%=") => Some(BinOp::Mod),
            Tok::Op("**=") => Some(BinOp::Pow),
            _ => None,
        }
    }

    fn if_rest(&mut self, line: usize) -> PResult<Stmt> {
        let cond = self.expr()?;
        self.expect_op(":")?;
        let body = self.suite()?;
        let orelse = if self.at_kw("elif") {
            let elif_line = self.line();
            self.advance();
            vec![self.if_rest(elif_line)?]
        } else if self.eat_kw("else") {
            self.expect_op(":")?;
            self.suite()?
        } else {
            Vec::new()
        };
        Ok(Stmt { line, kind: StmtKind::If(cond, body, orelse) })
    }

    fn suite(&mut self) -> PResult<Vec<Stmt>> {
        if !self.eat(&Tok::Newline) {
            return self.simple_line();
        }
        if !self.eat(&Tok::Indent) {
            return Err(Exception::new("IndentationError", "expected an indented block").at(self.line()));
        }
        let mut body = Vec::new();
        while !self.eat(&Tok::Dedent) {
            if self.at(&Tok::Eof) {
                break;
            }
            if self.eat(&Tok::Newline) {
                continue;
            }
            body.extend(self.statement()?);
        }
        Ok(body)
    }

    fn funcdef(&mut self) -> PResult<FuncDef> {
        if self.func_depth > 0 {
            return Err(self.error("nested functions are not supported"));
        }
        let name = self.expect_name()?;
        self.expect_op("(")?;
        let mut params: Vec<Param> = Vec::new();
        while !self.at_op(")") {
            let pname = self.expect_name()?;
            if self.eat_op(":") {
                self.expr()?;
            }
            let default = if self.eat_op("=") { Some(self.expr()?) } else { None };
            if default.is_none() && params.iter().any(|p| p.default.is_some()) {
                return Err(self.error("non-default argument follows default argument"));
            }
            params.push(Param { name: pname, default });
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        if self.eat_op("->") {
            self.expr()?;
        }
        self.expect_op(":")?;
        self.func_depth += 1;
        let body = self.suite();
        self.func_depth -= 1;
        let body = body?;
        let locals = collect_locals(&params, &body);
        Ok(FuncDef { name, params, body, locals })
    }

    fn target_list(&mut self) -> PResult<Target> {
        let line = self.line();
        let mut items = vec![self.or_expr_no_in()?];
        let mut trailing = false;
        while self.eat_op(",") {
            if self.at_kw("in") {
                trailing = true;
                break;
            }
            items.push(self.or_expr_no_in()?);
        }
        let expr = if items.len() == 1 && !trailing { items.pop().unwrap() } else { Expr::Tuple(items) };
        to_target(expr).map_err(|m| Exception::new("SyntaxError", m).at(line))
    }

    /// Target expressions in `for` headers must not swallow the `in` keyword.
    fn or_expr_no_in(&mut self) -> PResult<Expr> {
        if self.eat_op("(") {
            let t = self.expr_list()?;
            self.expect_op(")")?;
            return Ok(t);
        }
        self.arith()
    }

    fn expr_list(&mut self) -> PResult<Expr> {
        let first = self.expr()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_expr_end() {
                break;
            }
            items.push(self.expr()?);
        }
        Ok(Expr::Tuple(items))
    }

    fn at_expr_end(&self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Op("=") | Tok::Op(")") | Tok::Op(":") | Tok::Op(";"))
            || self.aug_op().is_some()
    }

    fn expr(&mut self) -> PResult<Expr> {
        let value = self.or_test()?;
        if self.at_kw("if") {
            self.advance();
            let cond = self.or_test()?;
            if !self.eat_kw("else") {
                return Err(self.error("expected 'else' in conditional expression"));
            }
            let otherwise = self.expr()?;
            return Ok(Expr::IfElse { cond: Box::new(cond), then: Box::new(value), otherwise: Box::new(otherwise) });
        }
        Ok(value)
    }

    fn or_test(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_test()?;
        while self.eat_kw("or") {
            let rhs = self.and_test()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_test(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_test()?;
        while self.eat_kw("and") {
            let rhs = self.not_test()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_test(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            let inner = self.not_test()?;
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(inner)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.arith()?;
        let mut rest = Vec::new();
        loop {
            let op = match self.peek() {
                Tok::Op("<") => CmpOp::Lt,
                Tok::Op("<=") => CmpOp::Le,
                Tok::Op(">") => CmpOp::Gt,
                Tok::Op(">=") => CmpOp::Ge,
                Tok::Op("==") => CmpOp::Eq,
                Tok::Op("!=") => CmpOp::Ne,
                Tok::Name(n) if n == "in" => CmpOp::In,
                Tok::Name(n) if n == "is" => {
                    if matches!(self.peek_at(1), Tok::Name(m) if m == "not") {
                        self.advance();
                        CmpOp::IsNot
                    } else {
                        CmpOp::Is
                    }
                }
                Tok::Name(n) if n == "not" && matches!(self.peek_at(1), Tok::Name(m) if m == "in") => {
                    self.advance();
                    CmpOp::NotIn
                }
                _ => break,
            };
            self.advance();
            rest.push((op, self.arith()?));
        }
        if rest.is_empty() {
            Ok(lhs)
        } else {
            Ok(Expr::Compare(Box::new(lhs), rest))
        }
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Binary(Box::new(lhs), op, Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                _ => break,
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Binary(Box::new(lhs), op, Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<Expr> {
        if self.eat_op("-") {
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.factor()?)));
        }
        if self.eat_op("+") {
            return Ok(Expr::Unary(UnaryOp::Pos, Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(Expr::Binary(Box::new(base), BinOp::Pow, Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let mut expr = self.atom()?;
        loop {
            if self.eat_op("(") {
                let (args, kwargs) = self.call_args()?;
                expr = Expr::Call { func: Box::new(expr), args, kwargs };
            } else if self.eat_op("[") {
                expr = self.subscript(expr)?;
            } else if self.eat_op(".") {
                let name = self.expect_name()?;
                expr = Expr::Attribute(Box::new(expr), name);
            } else {
                break;
            }
        }
        Ok(expr)
    }

    fn call_args(&mut self) -> PResult<(Vec<Expr>, Vec<(String, Expr)>)> {
        let mut args = Vec::new();
        let mut kwargs = Vec::new();
        while !self.at_op(")") {
            if matches!(self.peek(), Tok::Name(_)) && matches!(self.peek_at(1), Tok::Op("=")) {
                let name = self.expect_name()?;
                self.expect_op("=")?;
                kwargs.push((name, self.expr()?));
            } else {
                if !kwargs.is_empty() {
                    return Err(self.error("positional argument follows keyword argument"));
                }
                let arg = self.expr()?;
                if self.at_kw("for") {
                    let comp = self.comprehension(arg)?;
                    args.push(comp);
                } else {
                    args.push(arg);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok((args, kwargs))
    }

    fn subscript(&mut self, target: Expr) -> PResult<Expr> {
        let mut parts: Vec<Option<Expr>> = vec![None];
        let mut colons = 0;
        loop {
            if self.eat_op("]") {
                break;
            }
            if self.eat_op(":") {
                colons += 1;
                if colons > 2 {
                    return Err(self.error("invalid slice"));
                }
                parts.push(None);
                continue;
            }
            let e = self.expr_list()?;
            let slot = parts.last_mut().unwrap();
            if slot.is_some() {
                return Err(self.error("invalid subscript"));
            }
            *slot = Some(e);
        }
        if colons == 0 {
            let index = parts.pop().flatten().ok_or_else(|| self.error("empty subscript"))?;
            return Ok(Expr::Index(Box::new(target), Box::new(index)));
        }
        let mut it = parts.into_iter();
        let lower = it.next().flatten().map(Box::new);
        let upper = it.next().flatten().map(Box::new);
        let step = it.next().flatten().map(Box::new);
        Ok(Expr::Slice { target: Box::new(target), lower, upper, step })
    }

    fn comprehension(&mut self, element: Expr) -> PResult<Expr> {
        if !self.eat_kw("for") {
            return Err(self.error("expected 'for'"));
        }
        let target = self.target_list()?;
        if !self.eat_kw("in") {
            return Err(self.error("expected 'in'"));
        }
        let iter = self.or_test()?;
        let mut conds = Vec::new();
        while self.eat_kw("if") {
            conds.push(self.or_test()?);
        }
        if self.at_kw("for") {
            return Err(self.error("nested comprehensions are not supported"));
        }
        Ok(Expr::ListComp { element: Box::new(element), target, iter: Box::new(iter), conds })
    }

    fn atom(&mut self) -> PResult<Expr> {
        let line = self.line();
        match self.advance() {
            Tok::Int(v) => Ok(Expr::Int(v)),
            Tok::Float(v) => Ok(Expr::Float(v)),
            Tok::Str(s) => {
                let mut s = s;
                while let Tok::Str(next) = self.peek().clone() {
                    self.advance();
                    s.push_str(&next);
                }
                Ok(Expr::Str(s.into()))
            }
            Tok::Name(n) => match n.as_str() {
                "True" => Ok(Expr::Bool(true)),
                "False" => Ok(Expr::Bool(false)),
                "None" => Ok(Expr::None),
                kw if KEYWORDS.contains(&kw) => {
                    Err(Exception::new("SyntaxError", format!("unexpected keyword '{kw}'")).at(line))
                }
                _ => Ok(Expr::Name(n)),
            },
            Tok::Op("(") => {
                if self.eat_op(")") {
                    return Ok(Expr::Tuple(Vec::new()));
                }
                let first = self.expr()?;
                if self.at_kw("for") {
                    let comp = self.comprehension(first)?;
                    self.expect_op(")")?;
                    return Ok(comp);
                }
                if self.eat_op(")") {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op(")") {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect_op(")")?;
                Ok(Expr::Tuple(items))
            }
            Tok::Op("[") => {
                if self.eat_op("]") {
                    return Ok(Expr::List(Vec::new()));
                }
                let first = self.expr()?;
                if self.at_kw("for") {
                    let comp = self.comprehension(first)?;
                    self.expect_op("]")?;
                    return Ok(comp);
                }
                let mut items = vec![first];
                while self.eat_op(",") {
                    if self.at_op("]") {
                        break;
                    }
                    items.push(self.expr()?);
                }
                self.expect_op("]")?;
                Ok(Expr::List(items))
            }
            Tok::Op("{") => {
                let mut items = Vec::new();
                while !self.at_op("}") {
                    let k = self.expr()?;
                    if !self.eat_op(":") {
                        return Err(self.error("set literals are not supported"));
                    }
                    let v = self.expr()?;
                    items.push((k, v));
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("}")?;
                Ok(Expr::Dict(items))
            }
            other => Err(Exception::new("SyntaxError", format!("invalid syntax near {}", describe(&other))).at(line)),
        }
    }
}

fn to_target(expr: Expr) -> Result<Target, String> {
    match expr {
        Expr::Name(n) => Ok(Target::Name(n)),
        Expr::Index(obj, idx) => Ok(Target::Index(obj, idx)),
        Expr::Tuple(items) | Expr::List(items) => {
            Ok(Target::Tuple(items.into_iter().map(to_target).collect::<Result<_, _>>()?))
        }
        _ => Err("cannot assign to expression".to_string()),
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Name(n) => format!("'{n}'"),
        Tok::Int(v) => format!("'{v}'"),
        Tok::Float(v) => format!("'{v}'"),
        Tok::Str(_) => "string literal".into(),
        Tok::Op(o) => format!("'{o}'"),
        Tok::Newline => "end of line".into(),
        Tok::Indent => "indent".into(),
        Tok::Dedent => "dedent".into(),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_function_with_control_flow() {
        let src = "def f(xs, k=2):\n    total = 0\n    for x in xs:\n        if x > k:\n            total += x\n        elif x == k:\n            continue\n        else:\n            break\n    return total\n";
        let prog = parse_program(src).unwrap();
        assert_eq!(prog.len(), 1);
        let StmtKind::Def(f) = &prog[0].kind else { panic!() };
        assert!(f.locals.contains("total"));
        assert!(f.locals.contains("x"));
    }

    #[test]
    fn missing_colon_is_syntax_error() {
        let err = parse_program("if x\n    y = 1\n").unwrap_err();
        assert_eq!(err.kind, "SyntaxError");
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn empty_block_is_indentation_error() {
        let err = parse_program("if x:\ny = 1\n").unwrap_err();
        assert_eq!(err.kind, "IndentationError");
    }

    #[test]
    fn tuple_unpacking_and_slices() {
        parse_program("a, b = b, a\nc = xs[1:-1]\nd = xs[::2]\n").unwrap();
    }

    #[test]
    fn rejects_nested_def() {
        let err = parse_program("def f():\n    def g():\n        return 1\n    return g()\n").unwrap_err();
        assert_eq!(err.kind, "SyntaxError");
    }
}
