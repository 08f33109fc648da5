//! Typing contexts: finite maps from variables to non-empty set-types.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Value};

use crate::syntax::{parse_type, Name, SetType, Type};

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypingContext(BTreeMap<Name, SetType>);

impl TypingContext {
    pub fn new() -> TypingContext {
        TypingContext::default()
    }

    /// `Γ(x)`, which is empty outside the domain.
    pub fn get(&self, x: &str) -> SetType {
        self.0.get(x).cloned().unwrap_or_default()
    }

    pub fn contains(&self, x: &str) -> bool {
        self.0.contains_key(x)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &SetType)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds `ty` to `Γ(x)`.
    pub fn add(&mut self, x: Name, ty: Type) {
        let cur = self.get(&x);
        self.0.insert(x, cur.union(&SetType::singleton(ty)));
    }

    /// `Γ, x:ā` when `x ∉ dom Γ`; an empty `ā` leaves the context unchanged.
    pub fn extend(&self, x: Name, tys: SetType) -> TypingContext {
        let mut out = self.clone();
        if !tys.is_empty() {
            out.0.insert(x, tys);
        }
        out
    }

    /// Removes `x` from the domain.
    pub fn without(&self, x: &str) -> TypingContext {
        let mut out = self.clone();
        out.0.remove(x);
        out
    }

    /// Pointwise union.
    pub fn union(&self, other: &TypingContext) -> TypingContext {
        let mut out = self.clone();
        for (x, tys) in &other.0 {
            let cur = out.get(x);
            out.0.insert(x.clone(), cur.union(tys));
        }
        out
    }

    /// Pointwise inclusion.
    pub fn is_subset(&self, other: &TypingContext) -> bool {
        self.0.iter().all(|(x, tys)| tys.is_subset(&other.get(x)))
    }

    /// `{"x": ["a", "b -> c"], ...}`
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (x, tys) in &self.0 {
            map.insert(x.to_string(), Value::Array(tys.iter().map(|t| Value::String(t.to_string())).collect()));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<TypingContext, String> {
        let obj = value.as_object().ok_or("context must be a JSON object")?;
        let mut out = TypingContext::new();
        for (x, tys) in obj {
            let arr = tys.as_array().ok_or_else(|| format!("types of `{x}` must be an array"))?;
            if arr.is_empty() {
                return Err(format!("`{x}` is mapped to an empty set-type"));
            }
            for t in arr {
                let s = t.as_str().ok_or_else(|| format!("types of `{x}` must be strings"))?;
                out.add(x.as_str().into(), parse_type(s).map_err(|e| e.to_string())?);
            }
        }
        Ok(out)
    }
}

impl FromIterator<(Name, Type)> for TypingContext {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Self {
        let mut out = TypingContext::new();
        for (x, t) in iter {
            out.add(x, t);
        }
        out
    }
}

impl fmt::Display for TypingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, tys)| format!("{x}:{tys}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl fmt::Debug for TypingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_inclusion_are_pointwise() {
        let a = Type::base("a");
        let b = Type::base("b");
        let g: TypingContext = [("x".into(), a.clone())].into_iter().collect();
        let d: TypingContext = [("x".into(), b.clone()), ("y".into(), a.clone())].into_iter().collect();
        let u = g.union(&d);
        assert_eq!(u.get("x"), SetType::new(vec![a, b]));
        assert!(g.is_subset(&u) && d.is_subset(&u));
        assert!(!u.is_subset(&g));
        assert!(u.get("z").is_empty());
    }

    #[test]
    fn json_round_trip() {
        let g: TypingContext = [("x".into(), parse_type("{a,b} -> c").unwrap()), ("x".into(), Type::base("a"))]
            .into_iter()
            .collect();
        assert_eq!(TypingContext::from_json(&g.to_json()).unwrap(), g);
        assert!(TypingContext::from_json(&serde_json::json!({"x": []})).is_err());
    }
}
