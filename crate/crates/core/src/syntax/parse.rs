//! Recursive-descent parsers for types, untyped terms and annotated terms.
//!
//! ```text
//! type   := base | setty "->" type | "(" type ")"
//! setty  := "{" type ("," type)* "}" | type
//! uterm  := "\" var "." uterm | uterm uterm | var | "(" uterm ")"
//! aterm  := "\" var ":" setty "." aterm | aterm aarg | post
//! post   := atom ("[" aterm ("," aterm)* "]")*
//! atom   := var "^" atype | "(" aterm ")"
//! atype  := base | "(" type ")"
//! aarg   := "{" aterm ("," aterm)* "}" | post
//! ```
//!
//! A trailing abstraction may also appear as the last bare argument.

use thiserror::Error;

use super::{Name, SetTerm, SetType, Term, Type, UntypedTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    Colon,
    Caret,
    Comma,
    Arrow,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '\\' | 'λ' => Tok::Lambda,
            '.' => Tok::Dot,
            ':' => Tok::Colon,
            '^' => Tok::Caret,
            ',' => Tok::Comma,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '-' => {
                bump(&mut chars);
                if chars.peek() != Some(&'>') {
                    return Err(ParseError { line: l, column: col, message: "expected `->`".into() });
                }
                Tok::Arrow
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    s.push(c);
                    bump(&mut chars);
                }
                out.push(Lexed { tok: Tok::Ident(s), line: l, column: col });
                continue;
            }
            other => {
                return Err(ParseError { line: l, column: col, message: format!("unexpected character `{other}`") })
            }
        };
        bump(&mut chars);
        out.push(Lexed { tok, line: l, column: col });
    }
    out.push(Lexed { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
    /// Enclosing binder names, innermost last.
    scope: Vec<Name>,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser { toks: lex(text)?, pos: 0, scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let l = &self.toks[self.pos];
        ParseError { line: l.line, column: l.column, message: message.into() }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn base_name(&mut self) -> Result<String, ParseError> {
        let name = self.ident()?;
        if !name.starts_with(|c: char| c.is_ascii_lowercase()) {
            return Err(self.error(format!("base type `{name}` must start with a lowercase letter")));
        }
        Ok(name)
    }

    // ---- types ----

    fn ty(&mut self) -> Result<Type, ParseError> {
        let domain = match self.peek() {
            Tok::LBrace => {
                let set = self.set_type_braced()?;
                if *self.peek() != Tok::Arrow {
                    return Err(self.unexpected("`->` after a set-type"));
                }
                set
            }
            _ => {
                let t = self.ty_atom()?;
                if *self.peek() != Tok::Arrow {
                    return Ok(t);
                }
                SetType::singleton(t)
            }
        };
        self.expect(Tok::Arrow)?;
        let codomain = self.ty()?;
        Ok(Type::arrow(domain, codomain))
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(Type::base(self.base_name()?)),
            _ => Err(self.unexpected("a type")),
        }
    }

    fn set_type_braced(&mut self) -> Result<SetType, ParseError> {
        self.expect(Tok::LBrace)?;
        if *self.peek() == Tok::RBrace {
            return Err(self.error("set-types must be non-empty"));
        }
        let mut tys = vec![self.ty()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            tys.push(self.ty()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(SetType::new(tys))
    }

    fn set_type(&mut self) -> Result<SetType, ParseError> {
        if *self.peek() == Tok::LBrace {
            self.set_type_braced()
        } else {
            Ok(SetType::singleton(self.ty()?))
        }
    }

    /// `atype := base | "(" type ")"`
    fn annotation(&mut self) -> Result<Type, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => Ok(Type::base(self.base_name()?)),
            _ => Err(self.unexpected("a base type or a parenthesized type")),
        }
    }

    // ---- annotated terms ----

    fn aterm(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.alam();
        }
        let mut t = self.apost()?;
        loop {
            match self.peek() {
                Tok::LBrace => {
                    let arg = self.aset_braced()?;
                    t = Term::app(t, arg);
                }
                Tok::Ident(_) | Tok::LParen => {
                    let arg = self.apost()?;
                    t = Term::app1(t, arg);
                }
                Tok::Lambda => {
                    let arg = self.alam()?;
                    return Ok(Term::app1(t, arg));
                }
                _ => return Ok(t),
            }
        }
    }

    fn alam(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda)?;
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let binder = self.set_type()?;
        self.expect(Tok::Dot)?;
        let name: Name = name.into();
        self.scope.push(name.clone());
        let body = self.aterm();
        self.scope.pop();
        Ok(Term::lam(name, binder, body?))
    }

    fn apost(&mut self) -> Result<Term, ParseError> {
        let mut t = self.aatom()?;
        while *self.peek() == Tok::LBracket {
            self.advance();
            let payload = self.aterm_list(Tok::RBracket)?;
            t = Term::wrap(t, payload);
        }
        Ok(t)
    }

    fn aatom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let t = self.aterm()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let name = self.ident()?;
                if *self.peek() != Tok::Caret {
                    return Err(self.unexpected(&format!("`^` and a type annotation after `{name}`")));
                }
                self.advance();
                let ty = self.annotation()?;
                Ok(match self.scope.iter().rev().position(|n| **n == *name) {
                    Some(i) => Term::bound(i as u32, ty),
                    None => Term::free(name, ty),
                })
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn aset_braced(&mut self) -> Result<SetTerm, ParseError> {
        self.expect(Tok::LBrace)?;
        self.aterm_list(Tok::RBrace)
    }

    fn aterm_list(&mut self, close: Tok) -> Result<SetTerm, ParseError> {
        if *self.peek() == close {
            return Err(self.error("set-terms must be non-empty"));
        }
        let mut elems = vec![self.aterm()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            elems.push(self.aterm()?);
        }
        self.expect(close)?;
        Ok(SetTerm::new(elems))
    }

    // ---- untyped terms ----

    fn uterm(&mut self) -> Result<UntypedTerm, ParseError> {
        if *self.peek() == Tok::Lambda {
            return self.ulam();
        }
        let mut t = self.uatom()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let a = self.uatom()?;
                    t = UntypedTerm::app(t, a);
                }
                Tok::Lambda => {
                    let a = self.ulam()?;
                    return Ok(UntypedTerm::app(t, a));
                }
                _ => return Ok(t),
            }
        }
    }

    fn ulam(&mut self) -> Result<UntypedTerm, ParseError> {
        self.expect(Tok::Lambda)?;
        let mut names = vec![self.ident()?];
        // `\x y. M` abbreviates `\x. \y. M`.
        while let Tok::Ident(_) = self.peek() {
            names.push(self.ident()?);
        }
        self.expect(Tok::Dot)?;
        let body = self.uterm()?;
        Ok(names.into_iter().rev().fold(body, |b, n| UntypedTerm::lam(n, &b)))
    }

    fn uatom(&mut self) -> Result<UntypedTerm, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.advance();
                let t = self.uterm()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                if *self.peek2() == Tok::Caret {
                    return Err(self.error("type annotations are not allowed in untyped terms"));
                }
                Ok(UntypedTerm::var(self.ident()?))
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_untyped(text: &str) -> Result<UntypedTerm, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.uterm()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_annotated(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.aterm()?;
    p.finish()?;
    Ok(t)
}

/// Parses `{t1, ..., tn}`.
pub fn parse_set_term(text: &str) -> Result<SetTerm, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.aset_braced()?;
    p.finish()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{TermKind, Var};

    fn a() -> Type {
        Type::base("a")
    }

    #[test]
    fn types_are_right_associative() {
        let t = parse_type("a -> b -> c").unwrap();
        let (d, c) = t.as_arrow().unwrap();
        assert_eq!(d, &SetType::singleton(a()));
        assert_eq!(c, &parse_type("b -> c").unwrap());
        assert_eq!(parse_type("{b, a, a} -> c").unwrap(), parse_type("{a,b}->c").unwrap());
        assert_eq!(parse_type("(a -> a) -> a").unwrap().height(), 2);
        assert!(parse_type("{} -> a").is_err());
        assert!(parse_type("{a, b}").is_err());
    }

    #[test]
    fn identity_parses_to_bound_occurrence() {
        let t = parse_annotated(r"\x:{a}. x^a").unwrap();
        match t.kind() {
            TermKind::Lam(h, b, body) => {
                assert_eq!(&**h.name(), "x");
                assert_eq!(b, &SetType::singleton(a()));
                assert!(matches!(body.kind(), TermKind::Var(Var::Bound(0), ty) if *ty == a()));
            }
            _ => panic!("expected an abstraction"),
        }
    }

    #[test]
    fn self_application_types() {
        let t = parse_annotated(r"\x:{{a,b}->c, a, b}. x^({a,b}->c) {x^a, x^b}").unwrap();
        assert_eq!(t.ty(), Some(&parse_type("{{a,b}->c, a, b} -> c").unwrap()));
    }

    #[test]
    fn wrappers_nest_and_bind_tighter_than_application() {
        let t = parse_annotated("y^b [z^a [w^b]]").unwrap();
        let TermKind::Wrap(h, p) = t.kind() else { panic!() };
        assert_eq!(h, &Term::free("y", Type::base("b")));
        let inner = &p.elements()[0];
        assert!(matches!(inner.kind(), TermKind::Wrap(..)));
        assert_eq!(t.weight(), 2);

        let t = parse_annotated("f^(a -> a) x^a [w^b]").unwrap();
        let TermKind::App(_, arg) = t.kind() else { panic!() };
        assert!(matches!(arg.elements()[0].kind(), TermKind::Wrap(..)));

        let t = parse_annotated("z^a [w^b] [z^a]").unwrap();
        let TermKind::Wrap(h, _) = t.kind() else { panic!() };
        assert!(matches!(h.kind(), TermKind::Wrap(..)));
    }

    #[test]
    fn errors_report_line_and_column() {
        let e = parse_annotated("x^a\n  {y}").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_annotated("x^A").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_annotated("f^(a->a) {}").is_err());
        assert!(parse_untyped("x^a").is_err());
    }

    #[test]
    fn untyped_multi_binder_sugar() {
        assert_eq!(parse_untyped(r"\x y. x").unwrap(), parse_untyped(r"\x. \y. x").unwrap());
        assert_eq!(parse_untyped("f x y").unwrap(), parse_untyped("(f x) y").unwrap());
    }
}
