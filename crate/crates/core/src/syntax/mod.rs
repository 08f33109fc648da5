//! Types, untyped λ-terms and annotated terms, with parsing and printing.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

mod lambda;
mod parse;
mod print;
mod term;
mod types;

pub use lambda::{UntypedKind, UntypedTerm};
pub use parse::{parse_annotated, parse_set_term, parse_type, parse_untyped, ParseError};
pub use term::{SetTerm, Term, TermKind, Var, WAbstraction, WrapperList};
pub use types::{SetType, Type, TypeKind};

/// Variable and base-type names.
pub type Name = Arc<str>;

/// The name a binder was written with. Only the printer reads it, so it is
/// invisible to equality, ordering and hashing.
#[derive(Clone)]
pub struct Hint(pub(crate) Name);

impl Hint {
    pub fn new(name: impl Into<Name>) -> Hint {
        Hint(name.into())
    }

    pub fn name(&self) -> &Name {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A path of child indices.
///
/// Abstraction body is child 0; an application's function is 0 and its
/// argument element `i` is `1 + i`; a wrapper's head is 0 and its payload
/// element `i` is `1 + i`. At the top of a set-term, element `i` is `i`.
/// Lexicographic order on paths is preorder traversal order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl FromStr for Position {
    type Err = String;

    /// Accepts `root`, the empty string, `0.1.2`, `0,1,2` or `[0,1,2]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let s = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).unwrap_or(s).trim();
        if s.is_empty() || s == "root" {
            return Ok(Position::root());
        }
        s.split(['.', ','])
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad position component `{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Position)
    }
}

/// α-equivalence. Binders are nameless, so this is structural equality.
pub fn alpha_eq<T: PartialEq>(x: &T, y: &T) -> bool {
    x == y
}
