//! Strict intersection types and canonical set-types.

use std::fmt;
use std::sync::Arc;

use super::Name;

/// A strict type: a base type or an arrow whose domain is a non-empty set-type.
///
/// The derived order is the global structural order: every base type sorts
/// before every arrow, base names compare lexicographically, and arrows
/// compare by domain and then codomain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Type(Arc<TypeKind>);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeKind {
    Base(Name),
    Arrow(SetType, Type),
}

impl Type {
    pub fn base(name: impl Into<Name>) -> Type {
        Type(Arc::new(TypeKind::Base(name.into())))
    }

    /// Builds `domain -> codomain`.
    ///
    /// Panics if `domain` is empty: arrow domains are never empty.
    pub fn arrow(domain: SetType, codomain: Type) -> Type {
        assert!(!domain.is_empty(), "arrow domain must be a non-empty set-type");
        Type(Arc::new(TypeKind::Arrow(domain, codomain)))
    }

    /// `{a} -> b` shorthand.
    pub fn simple_arrow(domain: Type, codomain: Type) -> Type {
        Type::arrow(SetType::singleton(domain), codomain)
    }

    pub fn kind(&self) -> &TypeKind {
        &self.0
    }

    pub fn as_arrow(&self) -> Option<(&SetType, &Type)> {
        match &*self.0 {
            TypeKind::Arrow(d, c) => Some((d, c)),
            TypeKind::Base(_) => None,
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(&*self.0, TypeKind::Base(_))
    }

    /// `h(a) = 0`, `h(ā -> B) = 1 + max(h(ā), h(B))`.
    pub fn height(&self) -> usize {
        match &*self.0 {
            TypeKind::Base(_) => 0,
            TypeKind::Arrow(d, c) => 1 + d.height().max(c.height()),
        }
    }
}

/// A finite, duplicate-free set of types kept sorted in the structural order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetType(Arc<[Type]>);

impl SetType {
    /// Sorts and deduplicates.
    pub fn new(mut types: Vec<Type>) -> SetType {
        types.sort();
        types.dedup();
        SetType(types.into())
    }

    pub fn empty() -> SetType {
        SetType::default()
    }

    pub fn singleton(ty: Type) -> SetType {
        SetType(vec![ty].into())
    }

    pub fn types(&self) -> &[Type] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Type> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, ty: &Type) -> bool {
        self.0.binary_search(ty).is_ok()
    }

    pub fn is_subset(&self, other: &SetType) -> bool {
        self.0.iter().all(|t| other.contains(t))
    }

    pub fn union(&self, other: &SetType) -> SetType {
        SetType::new(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    /// Maximum height of the elements; 0 for the empty set.
    pub fn height(&self) -> usize {
        self.0.iter().map(Type::height).max().unwrap_or(0)
    }

    /// Strictly sorted, hence duplicate-free.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

impl FromIterator<Type> for SetType {
    fn from_iter<I: IntoIterator<Item = Type>>(iter: I) -> Self {
        SetType::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SetType {
    type Item = &'a Type;
    type IntoIter = std::slice::Iter<'a, Type>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for SetType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Type {
        Type::base("a")
    }
    fn b() -> Type {
        Type::base("b")
    }

    #[test]
    fn canonical_sets_drop_duplicates() {
        assert_eq!(SetType::new(vec![a(), a()]), SetType::singleton(a()));
        assert_eq!(SetType::new(vec![b(), a()]), SetType::new(vec![a(), b()]));
        assert!(SetType::new(vec![b(), a(), b()]).is_canonical());
    }

    #[test]
    fn base_sorts_before_arrow() {
        let arr = Type::simple_arrow(a(), a());
        assert!(b() < arr);
        let s = SetType::new(vec![arr.clone(), b(), a()]);
        assert_eq!(s.types(), &[a(), b(), arr]);
    }

    #[test]
    fn heights() {
        assert_eq!(a().height(), 0);
        let id = Type::simple_arrow(a(), a());
        assert_eq!(id.height(), 1);
        let two = Type::arrow(SetType::new(vec![id.clone(), a()]), id);
        assert_eq!(two.height(), 2);
        assert_eq!(SetType::empty().height(), 0);
    }

    #[test]
    #[should_panic]
    fn empty_arrow_domain_is_rejected() {
        let _ = Type::arrow(SetType::empty(), a());
    }
}
