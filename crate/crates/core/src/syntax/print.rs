//! Printers producing text the parsers read back to an α-equal value.

use std::collections::BTreeSet;
use std::fmt::{self, Display, Write};

use super::{Name, SetTerm, SetType, Term, TermKind, Type, TypeKind, UntypedKind, UntypedTerm, Var};

impl Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TypeKind::Base(n) => f.write_str(n),
            TypeKind::Arrow(d, c) => {
                if d.len() == 1 {
                    let t = &d.types()[0];
                    if t.is_base() {
                        write!(f, "{t}")?;
                    } else {
                        write!(f, "({t})")?;
                    }
                } else {
                    write!(f, "{d}")?;
                }
                write!(f, " -> {c}")
            }
        }
    }
}

impl Display for SetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (i, t) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_char('}')
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Binder names in scope plus the free names they must not capture.
struct Names {
    free: BTreeSet<Name>,
    env: Vec<String>,
}

impl Names {
    fn new(free: BTreeSet<Name>) -> Names {
        Names { free, env: Vec::new() }
    }

    fn taken(&self, s: &str) -> bool {
        self.free.contains(s) || self.env.iter().any(|e| e == s)
    }

    fn push(&mut self, hint: &str) -> String {
        let base = if is_identifier(hint) { hint.trim_end_matches(|c: char| c.is_ascii_digit()) } else { "v" };
        let base = if base.is_empty() { "v" } else { base };
        let mut name = if is_identifier(hint) { hint.to_string() } else { base.to_string() };
        let mut k = 1;
        while self.taken(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        self.env.push(name.clone());
        name
    }

    fn pop(&mut self) {
        self.env.pop();
    }

    fn var(&self, v: &Var) -> String {
        match v {
            Var::Free(n) => n.to_string(),
            Var::Bound(i) => {
                let i = *i as usize;
                if i < self.env.len() {
                    self.env[self.env.len() - 1 - i].clone()
                } else {
                    format!("#{}", i - self.env.len())
                }
            }
        }
    }
}

struct TermPrinter<'a> {
    names: Names,
    out: &'a mut String,
}

impl TermPrinter<'_> {
    fn top(&mut self, t: &Term) {
        match t.kind() {
            TermKind::Lam(h, b, body) => {
                let name = self.names.push(h.name());
                let _ = write!(self.out, "\\{name}:{b}. ");
                self.top(body);
                self.names.pop();
            }
            _ => self.app(t),
        }
    }

    fn app(&mut self, t: &Term) {
        match t.kind() {
            TermKind::App(f, s) => {
                if f.is_lam() {
                    self.parens(f);
                } else {
                    self.app(f);
                }
                self.out.push(' ');
                self.arg(s);
            }
            _ => self.post(t),
        }
    }

    fn arg(&mut self, s: &SetTerm) {
        if let [e] = s.elements() {
            if matches!(e.kind(), TermKind::Var(..) | TermKind::Wrap(..)) {
                return self.post(e);
            }
        }
        self.set(s, '{', '}');
    }

    fn set(&mut self, s: &SetTerm, open: char, close: char) {
        self.out.push(open);
        for (i, e) in s.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.top(e);
        }
        self.out.push(close);
    }

    fn post(&mut self, t: &Term) {
        match t.kind() {
            TermKind::Var(v, ty) => {
                let name = self.names.var(v);
                if ty.is_base() {
                    let _ = write!(self.out, "{name}^{ty}");
                } else {
                    let _ = write!(self.out, "{name}^({ty})");
                }
            }
            TermKind::Wrap(h, p) => {
                match h.kind() {
                    TermKind::Var(..) | TermKind::Wrap(..) => self.post(h),
                    _ => self.parens(h),
                }
                self.out.push(' ');
                self.set(p, '[', ']');
            }
            _ => self.parens(t),
        }
    }

    fn parens(&mut self, t: &Term) {
        self.out.push('(');
        self.top(t);
        self.out.push(')');
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        TermPrinter { names: Names::new(self.free_names()), out: &mut out }.top(self);
        f.write_str(&out)
    }
}

impl Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free = self.iter().flat_map(Term::free_names).collect();
        let mut out = String::new();
        TermPrinter { names: Names::new(free), out: &mut out }.set(self, '{', '}');
        f.write_str(&out)
    }
}

struct UntypedPrinter<'a> {
    names: Names,
    out: &'a mut String,
}

impl UntypedPrinter<'_> {
    fn top(&mut self, t: &UntypedTerm) {
        match t.kind() {
            UntypedKind::Lam(h, body) => {
                let name = self.names.push(h.name());
                let _ = write!(self.out, "\\{name}. ");
                self.top(body);
                self.names.pop();
            }
            _ => self.app(t),
        }
    }

    fn app(&mut self, t: &UntypedTerm) {
        match t.kind() {
            UntypedKind::App(f, a) => {
                match f.kind() {
                    UntypedKind::Lam(..) => self.parens(f),
                    _ => self.app(f),
                }
                self.out.push(' ');
                match a.kind() {
                    UntypedKind::Var(v) => self.out.push_str(&self.names.var(v)),
                    _ => self.parens(a),
                }
            }
            UntypedKind::Var(v) => self.out.push_str(&self.names.var(v)),
            UntypedKind::Lam(..) => self.parens(t),
        }
    }

    fn parens(&mut self, t: &UntypedTerm) {
        self.out.push('(');
        self.top(t);
        self.out.push(')');
    }
}

impl Display for UntypedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        UntypedPrinter { names: Names::new(self.free_names()), out: &mut out }.top(self);
        f.write_str(&out)
    }
}
