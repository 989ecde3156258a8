// SPDX-License-Identifier: Apache-2.0

//! Tree-walking evaluator with a step budget and wall-clock deadline.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;
use std::time::Instant;

use crate::ast::*;
use crate::error::{type_error, value_error, Exception};
use crate::value::{py_cmp, py_eq, range_len, Function, Value};

pub(crate) const TIMEOUT_KIND: &str = "Timeout";
const MAX_DEPTH: usize = 200;
const MAX_STDOUT: usize = 1 << 20;

const BUILTINS: &[&str] = &[
    "print",
    "len",
    "range",
    "abs",
    "min",
    "max",
    "sum",
    "sorted",
    "reversed",
    "list",
    "tuple",
    "str",
    "int",
    "float",
    "bool",
    "enumerate",
    "zip",
    "input",
    "round",
    "any",
    "all",
    "dict",
    "divmod",
    "pow",
    "isinstance",
];

type R<T> = Result<T, Exception>;

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Value),
}

struct Frame {
    vars: HashMap<String, Value>,
    def: Rc<FuncDef>,
}

pub struct Interp {
    globals: HashMap<String, Value>,
    frames: Vec<Frame>,
    comp_scopes: Vec<HashMap<String, Value>>,
    fuel: u64,
    ticks: u64,
    deadline: Option<Instant>,
    max_len: usize,
    pub stdout: String,
    stdin: VecDeque<String>,
}

impl Interp {
    pub fn new(fuel: u64, deadline: Option<Instant>, max_len: usize, stdin: &str) -> Self {
        Interp {
            globals: HashMap::new(),
            frames: Vec::new(),
            comp_scopes: Vec::new(),
            fuel,
            ticks: 0,
            deadline,
            max_len,
            stdout: String::new(),
            stdin: stdin.lines().map(str::to_string).collect(),
        }
    }

    pub fn exec_module(&mut self, stmts: &[Stmt]) -> R<()> {
        match self.exec_block(stmts)? {
            Flow::Normal => Ok(()),
            Flow::Return(_) => Err(Exception::new("SyntaxError", "'return' outside function")),
            Flow::Break | Flow::Continue => Err(Exception::new("SyntaxError", "'break' outside loop")),
        }
    }

    fn tick(&mut self) -> R<()> {
        if self.fuel == 0 {
            return Err(Exception::new(TIMEOUT_KIND, "step budget exhausted"));
        }
        self.fuel -= 1;
        self.ticks += 1;
        if self.ticks.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(Exception::new(TIMEOUT_KIND, "time limit exceeded"));
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, n: usize) -> R<()> {
        if n > self.max_len {
            Err(Exception::new("MemoryError", format!("collection of {n} elements exceeds the sandbox limit")))
        } else {
            Ok(())
        }
    }

    fn exec_block(&mut self, stmts: &[Stmt]) -> R<Flow> {
        for stmt in stmts {
            let flow = self.exec(stmt).map_err(|e| e.at(stmt.line))?;
            if !matches!(flow, Flow::Normal) {
                return Ok(flow);
            }
        }
        Ok(Flow::Normal)
    }

    fn exec(&mut self, stmt: &Stmt) -> R<Flow> {
        self.tick()?;
        match &stmt.kind {
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::Assign(targets, value) => {
                let v = self.eval(value)?;
                for t in targets {
                    self.assign(t, v.clone())?;
                }
            }
            StmtKind::AugAssign(target, op, value) => {
                let current = match target {
                    Target::Name(n) => self.lookup(n)?,
                    Target::Index(obj, idx) => {
                        let o = self.eval(obj)?;
                        let i = self.eval(idx)?;
                        self.get_item(&o, &i)?
                    }
                    Target::Tuple(_) => return Err(Exception::new("SyntaxError", "illegal augmented assignment")),
                };
                let rhs = self.eval(value)?;
                let result = match (&current, op) {
                    (Value::List(items), BinOp::Add) => {
                        let extra = self.iterate(&rhs)?;
                        let new_len = items.borrow().len() + extra.len();
                        self.check_len(new_len)?;
                        items.borrow_mut().extend(extra);
                        current.clone()
                    }
                    _ => self.binary(&current, *op, &rhs)?,
                };
                self.assign(target, result)?;
            }
            StmtKind::If(cond, body, orelse) => {
                return if self.eval(cond)?.truthy() { self.exec_block(body) } else { self.exec_block(orelse) };
            }
            StmtKind::While(cond, body) => {
                while self.eval(cond)?.truthy() {
                    self.tick()?;
                    match self.exec_block(body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
            }
            StmtKind::For(target, iter, body) => {
                let iterable = self.eval(iter)?;
                return self.exec_for(target, &iterable, body);
            }
            StmtKind::Def(def) => {
                let defaults = def
                    .params
                    .iter()
                    .filter_map(|p| p.default.as_ref())
                    .map(|e| self.eval(e))
                    .collect::<R<Vec<_>>>()?;
                let f = Value::Func(Rc::new(Function { def: def.clone(), defaults }));
                self.store(&def.name, f);
            }
            StmtKind::Return(value) => {
                if self.frames.is_empty() {
                    return Err(Exception::new("SyntaxError", "'return' outside function"));
                }
                let v = match value {
                    Some(e) => self.eval(e)?,
                    None => Value::None,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Assert(cond, msg) => {
                if !self.eval(cond)?.truthy() {
                    let text = match msg {
                        Some(m) => self.eval(m)?.to_str(),
                        None => String::new(),
                    };
                    return Err(Exception::new("AssertionError", text));
                }
            }
            StmtKind::Global(_) => {}
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Pass => {}
        }
        Ok(Flow::Normal)
    }

    fn exec_for(&mut self, target: &Target, iterable: &Value, body: &[Stmt]) -> R<Flow> {
        let run = |this: &mut Self, item: Value| -> R<Option<Flow>> {
            this.tick()?;
            this.assign(target, item)?;
            Ok(match this.exec_block(body)? {
                Flow::Break => Some(Flow::Normal),
                Flow::Return(v) => Some(Flow::Return(v)),
                Flow::Normal | Flow::Continue => None,
            })
        };
        match iterable {
            Value::List(items) => {
                // Index-based so that mutation during iteration behaves like CPython.
                let mut i = 0;
                loop {
                    let item = match items.borrow().get(i) {
                        Some(v) => v.clone(),
                        None => break,
                    };
                    i += 1;
                    if let Some(flow) = run(self, item)? {
                        return Ok(flow);
                    }
                }
            }
            Value::Range(start, _, step) => {
                let n = range_len(iterable);
                for k in 0..n {
                    if let Some(flow) = run(self, Value::Int(start + k * step))? {
                        return Ok(flow);
                    }
                }
            }
            Value::Dict(entries) => {
                let keys: Vec<Value> = entries.borrow().iter().map(|(k, _)| k.clone()).collect();
                let size = keys.len();
                for k in keys {
                    if entries.borrow().len() != size {
                        return Err(Exception::new("RuntimeError", "dictionary changed size during iteration"));
                    }
                    if let Some(flow) = run(self, k)? {
                        return Ok(flow);
                    }
                }
            }
            other => {
                for item in self.iterate(other)? {
                    if let Some(flow) = run(self, item)? {
                        return Ok(flow);
                    }
                }
            }
        }
        Ok(Flow::Normal)
    }

    fn store(&mut self, name: &str, value: Value) {
        if let Some(scope) = self.comp_scopes.last_mut() {
            if scope.contains_key(name) {
                scope.insert(name.to_string(), value);
                return;
            }
        }
        if let Some(frame) = self.frames.last_mut() {
            if frame.def.locals.contains(name) {
                frame.vars.insert(name.to_string(), value);
                return;
            }
        }
        self.globals.insert(name.to_string(), value);
    }

    fn lookup(&self, name: &str) -> R<Value> {
        for scope in self.comp_scopes.iter().rev() {
            if let Some(v) = scope.get(name) {
                return Ok(v.clone());
            }
        }
        if let Some(frame) = self.frames.last() {
            if frame.def.locals.contains(name) {
                return frame.vars.get(name).cloned().ok_or_else(|| {
                    Exception::new("UnboundLocalError", format!("local variable '{name}' referenced before assignment"))
                });
            }
        }
        if let Some(v) = self.globals.get(name) {
            return Ok(v.clone());
        }
        if let Some(b) = BUILTINS.iter().find(|b| **b == name) {
            return Ok(Value::Builtin(b));
        }
        Err(Exception::new("NameError", format!("name '{name}' is not defined")))
    }

    fn assign(&mut self, target: &Target, value: Value) -> R<()> {
        match target {
            Target::Name(n) => {
                self.store(n, value);
                Ok(())
            }
            Target::Index(obj, idx) => {
                let o = self.eval(obj)?;
                let i = self.eval(idx)?;
                self.set_item(&o, i, value)
            }
            Target::Tuple(targets) => {
                let items = self.iterate(&value)?;
                if items.len() != targets.len() {
                    return Err(value_error(format!(
                        "not enough values to unpack (expected {}, got {})",
                        targets.len(),
                        items.len()
                    )));
                }
                for (t, v) in targets.iter().zip(items) {
                    self.assign(t, v)?;
                }
                Ok(())
            }
        }
    }

    pub fn eval(&mut self, expr: &Expr) -> R<Value> {
        Ok(match expr {
            Expr::Int(v) => Value::Int(*v),
            Expr::Float(v) => Value::Float(*v),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::None => Value::None,
            Expr::Name(n) => self.lookup(n)?,
            Expr::List(items) => {
                let vals = items.iter().map(|e| self.eval(e)).collect::<R<Vec<_>>>()?;
                Value::list(vals)
            }
            Expr::Tuple(items) => {
                let vals = items.iter().map(|e| self.eval(e)).collect::<R<Vec<_>>>()?;
                Value::tuple(vals)
            }
            Expr::Dict(items) => {
                let mut entries: Vec<(Value, Value)> = Vec::new();
                for (k, v) in items {
                    let key = self.eval(k)?;
                    let val = self.eval(v)?;
                    dict_set(&mut entries, key, val)?;
                }
                Value::Dict(Rc::new(std::cell::RefCell::new(entries)))
            }
            Expr::Binary(l, op, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                self.binary(&a, *op, &b)?
            }
            Expr::Unary(op, e) => {
                let v = self.eval(e)?;
                match op {
                    UnaryOp::Not => Value::Bool(!v.truthy()),
                    UnaryOp::Neg => match v {
                        Value::Float(f) => Value::Float(-f),
                        other => match other.as_int() {
                            Some(i) => Value::Int(i.checked_neg().ok_or_else(overflow)?),
                            None => {
                                return Err(type_error(format!(
                                    "bad operand type for unary -: '{}'",
                                    other.type_name()
                                )))
                            }
                        },
                    },
                    UnaryOp::Pos => match v {
                        Value::Float(_) | Value::Int(_) => v,
                        Value::Bool(b) => Value::Int(b as i64),
                        other => {
                            return Err(type_error(format!("bad operand type for unary +: '{}'", other.type_name())))
                        }
                    },
                }
            }
            Expr::And(l, r) => {
                let a = self.eval(l)?;
                if !a.truthy() {
                    a
                } else {
                    self.eval(r)?
                }
            }
            Expr::Or(l, r) => {
                let a = self.eval(l)?;
                if a.truthy() {
                    a
                } else {
                    self.eval(r)?
                }
            }
            Expr::Compare(first, rest) => {
                let mut lhs = self.eval(first)?;
                for (op, e) in rest {
                    let rhs = self.eval(e)?;
                    if !compare(&lhs, *op, &rhs)? {
                        return Ok(Value::Bool(false));
                    }
                    lhs = rhs;
                }
                Value::Bool(true)
            }
            Expr::IfElse { cond, then, otherwise } => {
                if self.eval(cond)?.truthy() {
                    self.eval(then)?
                } else {
                    self.eval(otherwise)?
                }
            }
            Expr::Call { func, args, kwargs } => {
                let f = self.eval(func)?;
                let argv = args.iter().map(|a| self.eval(a)).collect::<R<Vec<_>>>()?;
                let mut kw = Vec::with_capacity(kwargs.len());
                for (name, e) in kwargs {
                    kw.push((name.clone(), self.eval(e)?));
                }
                self.call(&f, argv, kw)?
            }
            Expr::Attribute(obj, name) => {
                let o = self.eval(obj)?;
                if !has_method(&o, name) {
                    return Err(Exception::new(
                        "AttributeError",
                        format!("'{}' object has no attribute '{name}'", o.type_name()),
                    ));
                }
                Value::Method(Box::new(o), Rc::from(name.as_str()))
            }
            Expr::Index(obj, idx) => {
                let o = self.eval(obj)?;
                let i = self.eval(idx)?;
                self.get_item(&o, &i)?
            }
            Expr::Slice { target, lower, upper, step } => {
                let o = self.eval(target)?;
                let mut bound = |e: &Option<Box<Expr>>| -> R<Option<i64>> {
                    match e {
                        None => Ok(None),
                        Some(e) => match self.eval(e)? {
                            Value::None => Ok(None),
                            v => v.as_int().map(Some).ok_or_else(|| type_error("slice indices must be integers")),
                        },
                    }
                };
                let lo = bound(lower)?;
                let hi = bound(upper)?;
                let st = bound(step)?;
                slice(&o, lo, hi, st)?
            }
            Expr::ListComp { element, target, iter, conds } => {
                let source = self.eval(iter)?;
                let items = self.iterate(&source)?;
                let mut names = std::collections::BTreeSet::new();
                target.bound_names(&mut names);
                self.comp_scopes.push(names.into_iter().map(|n| (n, Value::None)).collect());
                let result = (|| -> R<Vec<Value>> {
                    let mut out = Vec::new();
                    'items: for item in items {
                        self.tick()?;
                        self.assign(target, item)?;
                        for c in conds {
                            if !self.eval(c)?.truthy() {
                                continue 'items;
                            }
                        }
                        out.push(self.eval(element)?);
                        self.check_len(out.len())?;
                    }
                    Ok(out)
                })();
                self.comp_scopes.pop();
                Value::list(result?)
            }
        })
    }

    fn binary(&self, a: &Value, op: BinOp, b: &Value) -> R<Value> {
        if let (Some(x), Some(y)) = (a.as_int(), b.as_int()) {
            return int_binary(x, op, y);
        }
        if let (Some(x), Some(y)) = (a.as_float(), b.as_float()) {
            return float_binary(x, op, y);
        }
        match (a, op, b) {
            (Value::Str(x), BinOp::Add, Value::Str(y)) => {
                self.check_len(x.len() + y.len())?;
                Ok(Value::str(&format!("{x}{y}")))
            }
            (Value::List(x), BinOp::Add, Value::List(y)) => {
                let mut out = x.borrow().clone();
                out.extend(y.borrow().iter().cloned());
                self.check_len(out.len())?;
                Ok(Value::list(out))
            }
            (Value::Tuple(x), BinOp::Add, Value::Tuple(y)) => {
                let mut out = (**x).clone();
                out.extend(y.iter().cloned());
                Ok(Value::tuple(out))
            }
            (Value::Str(_) | Value::List(_) | Value::Tuple(_), BinOp::Mul, n) if n.as_int().is_some() => {
                self.repeat(a, n.as_int().unwrap())
            }
            (n, BinOp::Mul, Value::Str(_) | Value::List(_) | Value::Tuple(_)) if n.as_int().is_some() => {
                self.repeat(b, n.as_int().unwrap())
            }
            (Value::Str(s), BinOp::Mod, _) => Err(type_error(format!("string formatting is not supported: '{s}'"))),
            _ => Err(type_error(format!(
                "unsupported operand type(s) for {}: '{}' and '{}'",
                op_symbol(op),
                a.type_name(),
                b.type_name()
            ))),
        }
    }

    fn repeat(&self, seq: &Value, n: i64) -> R<Value> {
        let n = n.max(0) as usize;
        match seq {
            Value::Str(s) => {
                self.check_len(s.len().saturating_mul(n))?;
                Ok(Value::str(&s.repeat(n)))
            }
            Value::List(items) => {
                let items = items.borrow();
                self.check_len(items.len().saturating_mul(n))?;
                let mut out = Vec::with_capacity(items.len() * n);
                for _ in 0..n {
                    out.extend(items.iter().cloned());
                }
                Ok(Value::list(out))
            }
            Value::Tuple(items) => {
                self.check_len(items.len().saturating_mul(n))?;
                let mut out = Vec::with_capacity(items.len() * n);
                for _ in 0..n {
                    out.extend(items.iter().cloned());
                }
                Ok(Value::tuple(out))
            }
            _ => unreachable!("repeat called on non-sequence"),
        }
    }

    pub(crate) fn iterate(&self, v: &Value) -> R<Vec<Value>> {
        match v {
            Value::List(items) => Ok(items.borrow().clone()),
            Value::Tuple(items) => Ok((**items).clone()),
            Value::Str(s) => Ok(s.chars().map(|c| Value::str(&c.to_string())).collect()),
            Value::Dict(entries) => Ok(entries.borrow().iter().map(|(k, _)| k.clone()).collect()),
            Value::Range(start, _, step) => {
                let n = range_len(v);
                self.check_len(n as usize)?;
                Ok((0..n).map(|k| Value::Int(start + k * step)).collect())
            }
            other => Err(type_error(format!("'{}' object is not iterable", other.type_name()))),
        }
    }

    fn get_item(&self, obj: &Value, idx: &Value) -> R<Value> {
        match obj {
            Value::List(items) => {
                let items = items.borrow();
                let i = seq_index(idx, items.len(), "list")?;
                Ok(items[i].clone())
            }
            Value::Tuple(items) => {
                let i = seq_index(idx, items.len(), "tuple")?;
                Ok(items[i].clone())
            }
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                let i = seq_index(idx, chars.len(), "string")?;
                Ok(Value::str(&chars[i].to_string()))
            }
            Value::Range(start, _, step) => {
                let i = seq_index(idx, range_len(obj) as usize, "range object")?;
                Ok(Value::Int(start + i as i64 * step))
            }
            Value::Dict(entries) => {
                if !idx.is_hashable() {
                    return Err(type_error(format!("unhashable type: '{}'", idx.type_name())));
                }
                entries
                    .borrow()
                    .iter()
                    .find(|(k, _)| py_eq(k, idx))
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| Exception::new("KeyError", idx.repr()))
            }
            other => Err(type_error(format!("'{}' object is not subscriptable", other.type_name()))),
        }
    }

    fn set_item(&self, obj: &Value, idx: Value, value: Value) -> R<()> {
        match obj {
            Value::List(items) => {
                let mut items = items.borrow_mut();
                let i = seq_index(&idx, items.len(), "list assignment")?;
                items[i] = value;
                Ok(())
            }
            Value::Dict(entries) => {
                let mut entries = entries.borrow_mut();
                dict_set(&mut entries, idx, value)?;
                self.check_len(entries.len())
            }
            other => Err(type_error(format!("'{}' object does not support item assignment", other.type_name()))),
        }
    }

    fn call(&mut self, f: &Value, args: Vec<Value>, kwargs: Vec<(String, Value)>) -> R<Value> {
        self.tick()?;
        match f {
            Value::Func(func) => self.call_function(func, args, kwargs),
            Value::Builtin(name) => self.call_builtin(name, args, kwargs),
            Value::Method(recv, name) => self.call_method(recv, name, args, kwargs),
            other => Err(type_error(format!("'{}' object is not callable", other.type_name()))),
        }
    }

    fn call_function(&mut self, func: &Rc<Function>, args: Vec<Value>, kwargs: Vec<(String, Value)>) -> R<Value> {
        let def = &func.def;
        if self.frames.len() >= MAX_DEPTH {
            return Err(Exception::new("RecursionError", "maximum recursion depth exceeded"));
        }
        if args.len() > def.params.len() {
            return Err(type_error(format!(
                "{}() takes {} positional arguments but {} were given",
                def.name,
                def.params.len(),
                args.len()
            )));
        }
        let mut slots: Vec<Option<Value>> = args.into_iter().map(Some).collect();
        slots.resize(def.params.len(), None);
        for (name, v) in kwargs {
            let Some(pos) = def.params.iter().position(|p| p.name == name) else {
                return Err(type_error(format!("{}() got an unexpected keyword argument '{name}'", def.name)));
            };
            if slots[pos].is_some() {
                return Err(type_error(format!("{}() got multiple values for argument '{name}'", def.name)));
            }
            slots[pos] = Some(v);
        }
        let first_default = def.params.len() - func.defaults.len();
        let mut vars = HashMap::new();
        for (i, slot) in slots.into_iter().enumerate() {
            let v = match slot {
                Some(v) => v,
                None if i >= first_default => func.defaults[i - first_default].clone(),
                None => {
                    return Err(type_error(format!(
                        "{}() missing required positional argument: '{}'",
                        def.name, def.params[i].name
                    )))
                }
            };
            vars.insert(def.params[i].name.clone(), v);
        }
        self.frames.push(Frame { vars, def: def.clone() });
        let saved_comps = std::mem::take(&mut self.comp_scopes);
        let result = self.exec_block(&def.body);
        self.comp_scopes = saved_comps;
        self.frames.pop();
        match result? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Ok(Value::None),
            Flow::Break | Flow::Continue => Err(Exception::new("SyntaxError", "'break' outside loop")),
        }
    }

    fn call_builtin(&mut self, name: &str, args: Vec<Value>, kwargs: Vec<(String, Value)>) -> R<Value> {
        let reverse = take_kw(&kwargs, "reverse").map(|v| v.truthy()).unwrap_or(false);
        if let Some((k, _)) = kwargs.iter().find(|(k, _)| !(k == "reverse" && name == "sorted")) {
            if !(name == "print" && (k == "end" || k == "sep")) {
                return Err(type_error(format!("{name}() got an unexpected keyword argument '{k}'")));
            }
        }
        let arity = |n: usize| -> R<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(type_error(format!("{name}() takes exactly {n} argument(s) ({} given)", args.len())))
            }
        };
        match name {
            "print" => {
                let sep = take_kw(&kwargs, "sep").map(|v| v.to_str()).unwrap_or_else(|| " ".into());
                let end = take_kw(&kwargs, "end").map(|v| v.to_str()).unwrap_or_else(|| "\n".into());
                let text: Vec<String> = args.iter().map(Value::to_str).collect();
                self.stdout.push_str(&text.join(&sep));
                self.stdout.push_str(&end);
                if self.stdout.len() > MAX_STDOUT {
                    return Err(Exception::new("MemoryError", "output limit exceeded"));
                }
                Ok(Value::None)
            }
            "len" => {
                arity(1)?;
                let n = match &args[0] {
                    Value::Str(s) => s.chars().count(),
                    Value::List(l) => l.borrow().len(),
                    Value::Tuple(t) => t.len(),
                    Value::Dict(d) => d.borrow().len(),
                    r @ Value::Range(..) => range_len(r) as usize,
                    other => return Err(type_error(format!("object of type '{}' has no len()", other.type_name()))),
                };
                Ok(Value::Int(n as i64))
            }
            "range" => {
                let ints = args
                    .iter()
                    .map(|a| {
                        a.as_int().ok_or_else(|| {
                            type_error(format!("'{}' object cannot be interpreted as an integer", a.type_name()))
                        })
                    })
                    .collect::<R<Vec<_>>>()?;
                let (start, stop, step) = match ints.as_slice() {
                    [stop] => (0, *stop, 1),
                    [start, stop] => (*start, *stop, 1),
                    [start, stop, step] => (*start, *stop, *step),
                    _ => return Err(type_error("range expected 1 to 3 arguments")),
                };
                if step == 0 {
                    return Err(value_error("range() arg 3 must not be zero"));
                }
                Ok(Value::Range(start, stop, step))
            }
            "abs" => {
                arity(1)?;
                match &args[0] {
                    Value::Float(f) => Ok(Value::Float(f.abs())),
                    v => v
                        .as_int()
                        .map(|i| Value::Int(i.abs()))
                        .ok_or_else(|| type_error(format!("bad operand type for abs(): '{}'", v.type_name()))),
                }
            }
            "min" | "max" => {
                let items = if args.len() == 1 { self.iterate(&args[0])? } else { args };
                let mut it = items.into_iter();
                let mut best = it.next().ok_or_else(|| value_error(format!("{name}() arg is an empty sequence")))?;
                for v in it {
                    let ord = py_cmp(&v, &best)?;
                    if (name == "min" && ord.is_lt()) || (name == "max" && ord.is_gt()) {
                        best = v;
                    }
                }
                Ok(best)
            }
            "sum" => {
                let items = self.iterate(args.first().ok_or_else(|| type_error("sum() takes at least 1 argument"))?)?;
                let mut acc = args.get(1).cloned().unwrap_or(Value::Int(0));
                for v in items {
                    acc = self.binary(&acc, BinOp::Add, &v)?;
                }
                Ok(acc)
            }
            "sorted" => {
                arity(1)?;
                let mut items = self.iterate(&args[0])?;
                sort_values(&mut items)?;
                if reverse {
                    items.reverse();
                }
                Ok(Value::list(items))
            }
            "reversed" => {
                arity(1)?;
                let mut items = self.iterate(&args[0])?;
                items.reverse();
                Ok(Value::list(items))
            }
            "list" => match args.first() {
                None => Ok(Value::list(Vec::new())),
                Some(v) => Ok(Value::list(self.iterate(v)?)),
            },
            "tuple" => match args.first() {
                None => Ok(Value::tuple(Vec::new())),
                Some(v) => Ok(Value::tuple(self.iterate(v)?)),
            },
            "dict" => match args.first() {
                None => Ok(Value::Dict(Rc::new(std::cell::RefCell::new(Vec::new())))),
                Some(Value::Dict(d)) => Ok(Value::Dict(Rc::new(std::cell::RefCell::new(d.borrow().clone())))),
                Some(v) => {
                    let mut entries = Vec::new();
                    for pair in self.iterate(v)? {
                        let kv = self.iterate(&pair)?;
                        if kv.len() != 2 {
                            return Err(value_error("dictionary update sequence element has wrong length"));
                        }
                        let mut kv = kv.into_iter();
                        dict_set(&mut entries, kv.next().unwrap(), kv.next().unwrap())?;
                    }
                    Ok(Value::Dict(Rc::new(std::cell::RefCell::new(entries))))
                }
            },
            "str" => Ok(Value::str(&args.first().map(Value::to_str).unwrap_or_default())),
            "int" => {
                arity(1)?;
                match &args[0] {
                    Value::Float(f) => Ok(Value::Int(f.trunc() as i64)),
                    Value::Str(s) => s.trim().parse::<i64>().map(Value::Int).map_err(|_| {
                        value_error(format!("invalid literal for int() with base 10: {}", args[0].repr()))
                    }),
                    v => v.as_int().map(Value::Int).ok_or_else(|| {
                        type_error(format!("int() argument must be a string or a number, not '{}'", v.type_name()))
                    }),
                }
            }
            "float" => {
                arity(1)?;
                match &args[0] {
                    Value::Str(s) => s
                        .trim()
                        .parse::<f64>()
                        .map(Value::Float)
                        .map_err(|_| value_error(format!("could not convert string to float: {}", args[0].repr()))),
                    v => v
                        .as_float()
                        .map(Value::Float)
                        .ok_or_else(|| type_error("float() argument must be a string or a number")),
                }
            }
            "bool" => Ok(Value::Bool(args.first().map(Value::truthy).unwrap_or(false))),
            "enumerate" => {
                let items = self.iterate(args.first().ok_or_else(|| type_error("enumerate() missing argument"))?)?;
                let start = args.get(1).and_then(Value::as_int).unwrap_or(0);
                Ok(Value::list(
                    items
                        .into_iter()
                        .enumerate()
                        .map(|(i, v)| Value::tuple(vec![Value::Int(start + i as i64), v]))
                        .collect(),
                ))
            }
            "zip" => {
                let seqs = args.iter().map(|a| self.iterate(a)).collect::<R<Vec<_>>>()?;
                let n = seqs.iter().map(Vec::len).min().unwrap_or(0);
                Ok(Value::list((0..n).map(|i| Value::tuple(seqs.iter().map(|s| s[i].clone()).collect())).collect()))
            }
            "input" => self
                .stdin
                .pop_front()
                .map(|s| Value::str(&s))
                .ok_or_else(|| Exception::new("EOFError", "EOF when reading a line")),
            "round" => {
                let x =
                    args.first().and_then(Value::as_float).ok_or_else(|| type_error("round() requires a number"))?;
                match args.get(1).and_then(Value::as_int) {
                    None => Ok(Value::Int(round_half_even(x) as i64)),
                    Some(d) => {
                        let scale = 10f64.powi(d as i32);
                        Ok(Value::Float(round_half_even(x * scale) / scale))
                    }
                }
            }
            "any" | "all" => {
                arity(1)?;
                let items = self.iterate(&args[0])?;
                Ok(Value::Bool(if name == "any" {
                    items.iter().any(Value::truthy)
                } else {
                    items.iter().all(Value::truthy)
                }))
            }
            "divmod" => {
                arity(2)?;
                let q = self.binary(&args[0], BinOp::FloorDiv, &args[1])?;
                let r = self.binary(&args[0], BinOp::Mod, &args[1])?;
                Ok(Value::tuple(vec![q, r]))
            }
            "pow" => {
                arity(2)?;
                self.binary(&args[0], BinOp::Pow, &args[1])
            }
            "isinstance" => Err(type_error("isinstance() is not supported")),
            _ => Err(Exception::new("NameError", format!("name '{name}' is not defined"))),
        }
    }

    fn call_method(&mut self, recv: &Value, name: &str, args: Vec<Value>, kwargs: Vec<(String, Value)>) -> R<Value> {
        if let Some((k, _)) = kwargs.iter().find(|(k, _)| k != "reverse") {
            return Err(type_error(format!("{name}() got an unexpected keyword argument '{k}'")));
        }
        let argc = |lo: usize, hi: usize| -> R<()> {
            if args.len() < lo || args.len() > hi {
                Err(type_error(format!("{name}() takes {lo} to {hi} arguments ({} given)", args.len())))
            } else {
                Ok(())
            }
        };
        match recv {
            Value::List(items) => match name {
                "append" => {
                    argc(1, 1)?;
                    let len = items.borrow().len() + 1;
                    self.check_len(len)?;
                    items.borrow_mut().push(args[0].clone());
                    Ok(Value::None)
                }
                "extend" => {
                    argc(1, 1)?;
                    let extra = self.iterate(&args[0])?;
                    let len = items.borrow().len() + extra.len();
                    self.check_len(len)?;
                    items.borrow_mut().extend(extra);
                    Ok(Value::None)
                }
                "pop" => {
                    argc(0, 1)?;
                    let mut items = items.borrow_mut();
                    if items.is_empty() {
                        return Err(Exception::new("IndexError", "pop from empty list"));
                    }
                    let idx = match args.first() {
                        Some(i) => seq_index(i, items.len(), "pop")?,
                        None => items.len() - 1,
                    };
                    Ok(items.remove(idx))
                }
                "insert" => {
                    argc(2, 2)?;
                    let mut items = items.borrow_mut();
                    let len = items.len() as i64;
                    let mut i = args[0].as_int().ok_or_else(|| type_error("list indices must be integers"))?;
                    if i < 0 {
                        i = (i + len).max(0);
                    }
                    let i = i.min(len) as usize;
                    items.insert(i, args[1].clone());
                    Ok(Value::None)
                }
                "index" => {
                    argc(1, 1)?;
                    items
                        .borrow()
                        .iter()
                        .position(|v| py_eq(v, &args[0]))
                        .map(|i| Value::Int(i as i64))
                        .ok_or_else(|| value_error(format!("{} is not in list", args[0].repr())))
                }
                "count" => {
                    argc(1, 1)?;
                    Ok(Value::Int(items.borrow().iter().filter(|v| py_eq(v, &args[0])).count() as i64))
                }
                "remove" => {
                    argc(1, 1)?;
                    let mut items = items.borrow_mut();
                    let pos = items
                        .iter()
                        .position(|v| py_eq(v, &args[0]))
                        .ok_or_else(|| value_error("list.remove(x): x not in list"))?;
                    items.remove(pos);
                    Ok(Value::None)
                }
                "sort" => {
                    argc(0, 0)?;
                    let reverse = take_kw(&kwargs, "reverse").map(|v| v.truthy()).unwrap_or(false);
                    let mut sorted = items.borrow().clone();
                    sort_values(&mut sorted)?;
                    if reverse {
                        sorted.reverse();
                    }
                    *items.borrow_mut() = sorted;
                    Ok(Value::None)
                }
                "reverse" => {
                    argc(0, 0)?;
                    items.borrow_mut().reverse();
                    Ok(Value::None)
                }
                "copy" => {
                    argc(0, 0)?;
                    Ok(Value::list(items.borrow().clone()))
                }
                "clear" => {
                    argc(0, 0)?;
                    items.borrow_mut().clear();
                    Ok(Value::None)
                }
                _ => Err(no_attr(recv, name)),
            },
            Value::Str(s) => str_method(s, name, &args, self.max_len),
            Value::Dict(entries) => match name {
                "get" => {
                    argc(1, 2)?;
                    Ok(entries
                        .borrow()
                        .iter()
                        .find(|(k, _)| py_eq(k, &args[0]))
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(|| args.get(1).cloned().unwrap_or(Value::None)))
                }
                "keys" => Ok(Value::list(entries.borrow().iter().map(|(k, _)| k.clone()).collect())),
                "values" => Ok(Value::list(entries.borrow().iter().map(|(_, v)| v.clone()).collect())),
                "items" => Ok(Value::list(
                    entries.borrow().iter().map(|(k, v)| Value::tuple(vec![k.clone(), v.clone()])).collect(),
                )),
                "pop" => {
                    argc(1, 2)?;
                    let mut entries = entries.borrow_mut();
                    match entries.iter().position(|(k, _)| py_eq(k, &args[0])) {
                        Some(pos) => Ok(entries.remove(pos).1),
                        None => args.get(1).cloned().ok_or_else(|| Exception::new("KeyError", args[0].repr())),
                    }
                }
                "setdefault" => {
                    argc(1, 2)?;
                    let mut entries = entries.borrow_mut();
                    if let Some((_, v)) = entries.iter().find(|(k, _)| py_eq(k, &args[0])) {
                        return Ok(v.clone());
                    }
                    let default = args.get(1).cloned().unwrap_or(Value::None);
                    dict_set(&mut entries, args[0].clone(), default.clone())?;
                    Ok(default)
                }
                "copy" => Ok(Value::Dict(Rc::new(std::cell::RefCell::new(entries.borrow().clone())))),
                _ => Err(no_attr(recv, name)),
            },
            _ => Err(no_attr(recv, name)),
        }
    }
}

fn no_attr(recv: &Value, name: &str) -> Exception {
    Exception::new("AttributeError", format!("'{}' object has no attribute '{name}'", recv.type_name()))
}

fn has_method(v: &Value, name: &str) -> bool {
    let names: &[&str] = match v {
        Value::List(_) => {
            &["append", "extend", "pop", "insert", "index", "count", "remove", "sort", "reverse", "copy", "clear"]
        }
        Value::Str(_) => &[
            "split",
            "strip",
            "lstrip",
            "rstrip",
            "join",
            "upper",
            "lower",
            "startswith",
            "endswith",
            "replace",
            "find",
            "isdigit",
            "isalpha",
            "isspace",
            "count",
            "index",
        ],
        Value::Dict(_) => &["get", "keys", "values", "items", "pop", "setdefault", "copy"],
        _ => &[],
    };
    names.contains(&name)
}

fn str_method(s: &Rc<str>, name: &str, args: &[Value], max_len: usize) -> R<Value> {
    let arg_str = |i: usize| -> R<Rc<str>> {
        match args.get(i) {
            Some(Value::Str(a)) => Ok(a.clone()),
            Some(other) => Err(type_error(format!("must be str, not {}", other.type_name()))),
            None => Err(type_error(format!("{name}() missing argument"))),
        }
    };
    match name {
        "split" => {
            let parts: Vec<Value> = match args.first() {
                None | Some(Value::None) => s.split_whitespace().map(Value::str).collect(),
                Some(_) => {
                    let sep = arg_str(0)?;
                    if sep.is_empty() {
                        return Err(value_error("empty separator"));
                    }
                    s.split(&*sep).map(Value::str).collect()
                }
            };
            Ok(Value::list(parts))
        }
        "strip" => Ok(Value::str(s.trim())),
        "lstrip" => Ok(Value::str(s.trim_start())),
        "rstrip" => Ok(Value::str(s.trim_end())),
        "upper" => Ok(Value::str(&s.to_uppercase())),
        "lower" => Ok(Value::str(&s.to_lowercase())),
        "isdigit" => Ok(Value::Bool(!s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))),
        "isalpha" => Ok(Value::Bool(!s.is_empty() && s.chars().all(char::is_alphabetic))),
        "isspace" => Ok(Value::Bool(!s.is_empty() && s.chars().all(char::is_whitespace))),
        "startswith" => Ok(Value::Bool(s.starts_with(&*arg_str(0)?))),
        "endswith" => Ok(Value::Bool(s.ends_with(&*arg_str(0)?))),
        "replace" => {
            let out = s.replace(&*arg_str(0)?, &arg_str(1)?);
            if out.len() > max_len {
                return Err(Exception::new("MemoryError", "string too large"));
            }
            Ok(Value::str(&out))
        }
        "find" | "index" => {
            let needle = arg_str(0)?;
            match s.find(&*needle) {
                Some(byte) => Ok(Value::Int(s[..byte].chars().count() as i64)),
                None if name == "find" => Ok(Value::Int(-1)),
                None => Err(value_error("substring not found")),
            }
        }
        "count" => {
            let needle = arg_str(0)?;
            if needle.is_empty() {
                return Ok(Value::Int(s.chars().count() as i64 + 1));
            }
            Ok(Value::Int(s.matches(&*needle).count() as i64))
        }
        "join" => {
            let items = match args.first() {
                Some(Value::List(l)) => l.borrow().clone(),
                Some(Value::Tuple(t)) => (**t).clone(),
                Some(other) => {
                    return Err(type_error(format!("can only join an iterable, not '{}'", other.type_name())))
                }
                None => return Err(type_error("join() takes exactly one argument")),
            };
            let mut parts = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    Value::Str(p) => parts.push(p.to_string()),
                    other => {
                        return Err(type_error(format!(
                            "sequence item: expected str instance, {} found",
                            other.type_name()
                        )))
                    }
                }
            }
            Ok(Value::str(&parts.join(s)))
        }
        _ => Err(Exception::new("AttributeError", format!("'str' object has no attribute '{name}'"))),
    }
}

fn take_kw<'a>(kwargs: &'a [(String, Value)], name: &str) -> Option<&'a Value> {
    kwargs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
}

fn sort_values(items: &mut [Value]) -> R<()> {
    let mut err = None;
    items.sort_by(|a, b| match py_cmp(a, b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            std::cmp::Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dict_set(entries: &mut Vec<(Value, Value)>, key: Value, value: Value) -> R<()> {
    if !key.is_hashable() {
        return Err(type_error(format!("unhashable type: '{}'", key.type_name())));
    }
    match entries.iter_mut().find(|(k, _)| py_eq(k, &key)) {
        Some(slot) => slot.1 = value,
        None => entries.push((key, value)),
    }
    Ok(())
}

fn seq_index(idx: &Value, len: usize, what: &str) -> R<usize> {
    let i =
        idx.as_int().ok_or_else(|| type_error(format!("{what} indices must be integers, not {}", idx.type_name())))?;
    let len = len as i64;
    let j = if i < 0 { i + len } else { i };
    if j < 0 || j >= len {
        return Err(Exception::new("IndexError", format!("{what} index out of range")));
    }
    Ok(j as usize)
}

fn slice(obj: &Value, lo: Option<i64>, hi: Option<i64>, step: Option<i64>) -> R<Value> {
    let step = step.unwrap_or(1);
    if step == 0 {
        return Err(value_error("slice step cannot be zero"));
    }
    let pick = |len: usize| -> Vec<usize> {
        let len = len as i64;
        let clamp = |v: i64, lo_b: i64, hi_b: i64| v.max(lo_b).min(hi_b);
        let norm = |v: i64| if v < 0 { v + len } else { v };
        let mut out = Vec::new();
        if step > 0 {
            let start = clamp(lo.map(norm).unwrap_or(0), 0, len);
            let stop = clamp(hi.map(norm).unwrap_or(len), 0, len);
            let mut i = start;
            while i < stop {
                out.push(i as usize);
                i += step;
            }
        } else {
            let start = clamp(lo.map(norm).unwrap_or(len - 1), -1, len - 1);
            let stop = clamp(hi.map(norm).unwrap_or(-1), -1, len - 1);
            let mut i = start;
            while i > stop {
                out.push(i as usize);
                i += step;
            }
        }
        out
    };
    match obj {
        Value::List(items) => {
            let items = items.borrow();
            Ok(Value::list(pick(items.len()).into_iter().map(|i| items[i].clone()).collect()))
        }
        Value::Tuple(items) => Ok(Value::tuple(pick(items.len()).into_iter().map(|i| items[i].clone()).collect())),
        Value::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            Ok(Value::str(&pick(chars.len()).into_iter().map(|i| chars[i]).collect::<String>()))
        }
        other => Err(type_error(format!("'{}' object is not subscriptable", other.type_name()))),
    }
}

fn compare(a: &Value, op: CmpOp, b: &Value) -> R<bool> {
    Ok(match op {
        CmpOp::Eq => py_eq(a, b),
        CmpOp::Ne => !py_eq(a, b),
        CmpOp::Lt => py_cmp(a, b)?.is_lt(),
        CmpOp::Le => py_cmp(a, b)?.is_le(),
        CmpOp::Gt => py_cmp(a, b)?.is_gt(),
        CmpOp::Ge => py_cmp(a, b)?.is_ge(),
        CmpOp::In => contains(b, a)?,
        CmpOp::NotIn => !contains(b, a)?,
        CmpOp::Is => identical(a, b),
        CmpOp::IsNot => !identical(a, b),
    })
}

fn identical(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::None, Value::None) => true,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::List(x), Value::List(y)) => Rc::ptr_eq(x, y),
        (Value::Dict(x), Value::Dict(y)) => Rc::ptr_eq(x, y),
        (Value::Tuple(x), Value::Tuple(y)) => Rc::ptr_eq(x, y),
        (Value::Int(x), Value::Int(y)) => x == y && (-5..=256).contains(x),
        (Value::Str(x), Value::Str(y)) => Rc::ptr_eq(x, y) || x == y,
        _ => false,
    }
}

fn contains(container: &Value, item: &Value) -> R<bool> {
    match container {
        Value::List(items) => Ok(items.borrow().iter().any(|v| py_eq(v, item))),
        Value::Tuple(items) => Ok(items.iter().any(|v| py_eq(v, item))),
        Value::Dict(entries) => Ok(entries.borrow().iter().any(|(k, _)| py_eq(k, item))),
        Value::Str(s) => match item {
            Value::Str(sub) => Ok(s.contains(&**sub)),
            other => {
                Err(type_error(format!("'in <string>' requires string as left operand, not {}", other.type_name())))
            }
        },
        Value::Range(start, stop, step) => Ok(match item.as_int() {
            Some(v) => {
                let inside = if *step > 0 { v >= *start && v < *stop } else { v <= *start && v > *stop };
                inside && (v - start) % step == 0
            }
            None => false,
        }),
        other => Err(type_error(format!("argument of type '{}' is not iterable", other.type_name()))),
    }
}

fn overflow() -> Exception {
    Exception::new("OverflowError", "integer result out of range for this sandbox")
}

fn int_binary(x: i64, op: BinOp, y: i64) -> R<Value> {
    let zero = || Exception::new("ZeroDivisionError", "integer division or modulo by zero");
    Ok(match op {
        BinOp::Add => Value::Int(x.checked_add(y).ok_or_else(overflow)?),
        BinOp::Sub => Value::Int(x.checked_sub(y).ok_or_else(overflow)?),
        BinOp::Mul => Value::Int(x.checked_mul(y).ok_or_else(overflow)?),
        BinOp::Div => {
            if y == 0 {
                return Err(Exception::new("ZeroDivisionError", "division by zero"));
            }
            Value::Float(x as f64 / y as f64)
        }
        BinOp::FloorDiv => {
            if y == 0 {
                return Err(zero());
            }
            Value::Int(x.checked_div_euclid(y).ok_or_else(overflow).map(|_| floor_div(x, y))?)
        }
        BinOp::Mod => {
            if y == 0 {
                return Err(zero());
            }
            Value::Int(x - floor_div(x, y) * y)
        }
        BinOp::Pow => {
            if y < 0 {
                Value::Float((x as f64).powf(y as f64))
            } else {
                let exp = u32::try_from(y).map_err(|_| overflow())?;
                Value::Int(x.checked_pow(exp).ok_or_else(overflow)?)
            }
        }
    })
}

fn floor_div(x: i64, y: i64) -> i64 {
    let q = x / y;
    if (x % y != 0) && ((x < 0) != (y < 0)) {
        q - 1
    } else {
        q
    }
}

fn float_binary(x: f64, op: BinOp, y: f64) -> R<Value> {
    let zero = || Exception::new("ZeroDivisionError", "float division by zero");
    Ok(Value::Float(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => {
            if y == 0.0 {
                return Err(zero());
            }
            x / y
        }
        BinOp::FloorDiv => {
            if y == 0.0 {
                return Err(zero());
            }
            (x / y).floor()
        }
        BinOp::Mod => {
            if y == 0.0 {
                return Err(zero());
            }
            x - (x / y).floor() * y
        }
        BinOp::Pow => x.powf(y),
    }))
}

fn round_half_even(x: f64) -> f64 {
    let r = x.round();
    if (x - x.trunc()).abs() == 0.5 && r % 2.0 != 0.0 {
        r - x.signum()
    } else {
        r
    }
}

fn op_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
        BinOp::FloorDiv => "//",
        BinOp::Mod => "%",
        BinOp::Pow => "**",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn run(src: &str) -> Result<Interp, Exception> {
        let prog = parse_program(src)?;
        let mut interp = Interp::new(1_000_000, None, 1_000_000, "");
        interp.exec_module(&prog)?;
        Ok(interp)
    }

    fn out(src: &str) -> String {
        run(src).unwrap().stdout
    }

    #[test]
    fn arithmetic_follows_python_rules() {
        assert_eq!(out("print(-7 // 2, -7 % 2, 7 / 2, 2 ** 10)"), "-4 1 3.5 1024\n");
    }

    #[test]
    fn functions_defaults_and_recursion() {
        let src = "def fact(n, acc=1):\n    if n <= 1:\n        return acc\n    return fact(n - 1, acc * n)\nprint(fact(10))\n";
        assert_eq!(out(src), "3628800\n");
    }

    #[test]
    fn mutable_default_is_shared() {
        let src = "def f(x, acc=[]):\n    acc.append(x)\n    return acc\nf(1)\nprint(f(2))\n";
        assert_eq!(out(src), "[1, 2]\n");
    }

    #[test]
    fn unbound_local() {
        let src = "x = 1\ndef f():\n    y = x\n    x = 2\n    return y\nf()\n";
        assert_eq!(run(src).err().unwrap().kind, "UnboundLocalError");
    }

    #[test]
    fn comprehension_and_slices() {
        assert_eq!(
            out("xs = [i * i for i in range(6) if i % 2 == 0]\nprint(xs[::-1], xs[1:])"),
            "[16, 4, 0] [4, 16]\n"
        );
    }

    #[test]
    fn chained_comparison() {
        assert_eq!(out("print(1 < 2 < 3, 1 < 3 < 2)"), "True False\n");
    }

    #[test]
    fn dict_operations() {
        let src = "d = {}\nfor w in 'a b a c a'.split():\n    d[w] = d.get(w, 0) + 1\nprint(sorted(d.items()))\n";
        assert_eq!(out(src), "[('a', 3), ('b', 1), ('c', 1)]\n");
    }

    #[test]
    fn fuel_exhaustion_is_timeout() {
        let prog = parse_program("while True:\n    pass\n").unwrap();
        let mut interp = Interp::new(10_000, None, 1000, "");
        assert_eq!(interp.exec_module(&prog).unwrap_err().kind, TIMEOUT_KIND);
    }

    #[test]
    fn memory_guard_stops_doubling() {
        let src = "xs = [1]\nwhile True:\n    xs = xs + xs\n";
        assert_eq!(run(src).err().unwrap().kind, "MemoryError");
    }

    #[test]
    fn tuple_swap_and_unpack() {
        assert_eq!(out("a, b = 1, 2\na, b = b, a\nprint(a, b)"), "2 1\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = run("x = 1\ny = [1][3]\n").err().unwrap();
        assert_eq!(err.kind, "IndexError");
        assert_eq!(err.line, Some(2));
    }
}
