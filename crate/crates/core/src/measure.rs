//! Degrees, weights, simplification by degree and the decreasing measure.
//!
//! `simp(t, d)` contracts in parallel every redex of degree exactly `d`;
//! contraction never creates redexes of degree `≥ d`, so iterating from the
//! maximal degree down to 1 reaches the memory normal form. The measure of a
//! wrapper-free term is the number of wrappers in that normal form.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::reduction::{develop, develop_set, redexes, redexes_set, Calculus, Redex, ReductionError};
use crate::syntax::{SetTerm, Term, WrapperList};
use crate::typing::{synthesize_set_type, synthesize_type, TypeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error(transparent)]
    IllTyped(#[from] TypeError),
    #[error("the measure is only defined on wrapper-free terms")]
    WrappersPresent,
    #[error("simplification degree must be at least 1")]
    DegreeZero,
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Redex counts per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeProfile {
    pub max_degree: usize,
    pub per_degree_redex_counts: BTreeMap<usize, usize>,
}

impl DegreeProfile {
    fn from_redexes(rs: &[Redex]) -> Result<DegreeProfile, MeasureError> {
        let mut counts = BTreeMap::new();
        for r in rs {
            let d = r
                .degree
                .ok_or_else(|| MeasureError::Internal(format!("untyped abstraction at {}", r.position)))?;
            *counts.entry(d).or_insert(0) += 1;
        }
        let max_degree = counts.keys().next_back().copied().unwrap_or(0);
        Ok(DegreeProfile { max_degree, per_degree_redex_counts: counts })
    }
}

pub fn degree_profile(t: &Term) -> Result<DegreeProfile, MeasureError> {
    synthesize_type(t)?;
    DegreeProfile::from_redexes(&redexes(t))
}

pub fn degree_profile_set(s: &SetTerm) -> Result<DegreeProfile, MeasureError> {
    synthesize_set_type(s)?;
    DegreeProfile::from_redexes(&redexes_set(s))
}

/// Largest redex degree in `t`, or 0 when `t` is normal.
pub fn max_degree(t: &Term) -> Result<usize, MeasureError> {
    Ok(degree_profile(t)?.max_degree)
}

pub fn max_degree_set(s: &SetTerm) -> Result<usize, MeasureError> {
    Ok(degree_profile_set(s)?.max_degree)
}

pub fn max_degree_wrappers(l: &WrapperList) -> Result<usize, MeasureError> {
    l.iter().try_fold(0, |m, p| Ok(m.max(max_degree_set(p)?)))
}

fn degree_selector(d: usize) -> impl FnMut(&Redex) -> bool {
    move |r| r.degree == Some(d)
}

/// Simplification of degree `d`.
pub fn simp(t: &Term, d: usize) -> Result<Term, MeasureError> {
    if d == 0 {
        return Err(MeasureError::DegreeZero);
    }
    synthesize_type(t)?;
    Ok(develop(t, Calculus::Im, &mut degree_selector(d))?)
}

pub fn simp_set(s: &SetTerm, d: usize) -> Result<SetTerm, MeasureError> {
    if d == 0 {
        return Err(MeasureError::DegreeZero);
    }
    synthesize_set_type(s)?;
    Ok(develop_set(s, Calculus::Im, &mut degree_selector(d))?)
}

pub fn simp_wrappers(l: &WrapperList, d: usize) -> Result<WrapperList, MeasureError> {
    Ok(WrapperList(l.iter().map(|p| simp_set(p, d)).collect::<Result<_, _>>()?))
}

/// `simp_1(… simp_D(t) …)` with `D = max_degree(t)`.
pub fn simp_full(t: &Term) -> Result<Term, MeasureError> {
    let d = max_degree(t)?;
    let mut cur = t.clone();
    for k in (1..=d).rev() {
        cur = simp(&cur, k)?;
    }
    Ok(cur)
}

/// The decreasing measure: the weight of the full simplification.
pub fn w_measure(t: &Term) -> Result<usize, MeasureError> {
    if !t.is_wrapper_free() {
        return Err(MeasureError::WrappersPresent);
    }
    Ok(simp_full(t)?.weight())
}

/// One intermediate of the full simplification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stage {
    /// The stage is `simp_k(… simp_D(t) …)`.
    pub after_degree: usize,
    #[serde(serialize_with = "display")]
    pub term: Term,
    pub max_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureReport {
    #[serde(rename = "formatVersion")]
    pub format_version: u32,
    #[serde(serialize_with = "display")]
    pub term: Term,
    #[serde(rename = "maxDegree")]
    pub max_degree: usize,
    pub stages: Vec<Stage>,
    #[serde(rename = "normalForm", serialize_with = "display")]
    pub normal_form: Term,
    #[serde(rename = "W")]
    pub w: usize,
}

fn display<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

impl MeasureReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// The full simplification with every intermediate stage, checking after
/// each stage `k` that no redex of degree `≥ k` is left.
pub fn measure_report(t: &Term) -> Result<MeasureReport, MeasureError> {
    if !t.is_wrapper_free() {
        return Err(MeasureError::WrappersPresent);
    }
    let d = max_degree(t)?;
    let mut stages = Vec::with_capacity(d);
    let mut cur = t.clone();
    for k in (1..=d).rev() {
        cur = simp(&cur, k)?;
        let m = max_degree(&cur)?;
        if m >= k {
            return Err(MeasureError::Internal(format!("degree {m} survives simplification of degree {k}")));
        }
        stages.push(Stage { after_degree: k, term: cur.clone(), max_degree: m });
    }
    if !redexes(&cur).is_empty() {
        return Err(MeasureError::Internal("full simplification left a redex".into()));
    }
    Ok(MeasureReport { format_version: 1, term: t.clone(), max_degree: d, stages, w: cur.weight(), normal_form: cur })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_annotated, parse_type};

    fn t(s: &str) -> Term {
        parse_annotated(s).unwrap()
    }

    #[test]
    fn heights() {
        assert_eq!(parse_type("a").unwrap().height(), 0);
        assert_eq!(parse_type("{a} -> a").unwrap().height(), 1);
        assert_eq!(parse_type("{{a}->a, a} -> {a}->a").unwrap().height(), 2);
    }

    #[test]
    fn weights() {
        assert_eq!(t("x^a").weight(), 0);
        assert_eq!(t("y^b [z^a [w^b]]").weight(), 2);
        assert_eq!(t("z^a [w^b] [z^a]").weight(), 2);
    }

    #[test]
    fn degrees() {
        assert_eq!(max_degree(&t("x^a")).unwrap(), 0);
        assert_eq!(max_degree(&t(r"(\x:{a}.x^a){y^a}")).unwrap(), 1);
        let nested = t(r"(\f:{{a}->a}. f^({a}->a) y^a) (\x:{a}.x^a)");
        let p = degree_profile(&nested).unwrap();
        assert_eq!(p.max_degree, 2);
        assert_eq!(p.per_degree_redex_counts, BTreeMap::from([(2, 1)]));
        assert!(matches!(max_degree(&t(r"x^({a}->b) y^c")), Err(MeasureError::IllTyped(_))));
    }

    #[test]
    fn simplification_examples() {
        let r = t(r"(\x:{a}.x^a){y^a}");
        assert_eq!(simp(&r, 1).unwrap(), t("y^a [y^a]"));
        assert_eq!(simp(&r, 2).unwrap(), r);
        assert_eq!(simp(&r, 0), Err(MeasureError::DegreeZero));
        let nf = t("y^a [y^a]");
        for d in 1..4 {
            assert_eq!(simp(&nf, d).unwrap(), nf);
        }
        assert_eq!(simp_full(&nf).unwrap(), nf);
        assert_eq!(simp_full(&r).unwrap(), nf);
    }

    #[test]
    fn created_redexes_wait_for_their_degree() {
        let nested = t(r"(\f:{{a}->a}. f^({a}->a) y^a) (\x:{a}.x^a)");
        let s2 = simp(&nested, 2).unwrap();
        assert_eq!(s2, t(r"((\x:{a}.x^a) y^a) [\x:{a}.x^a]"));
        assert_eq!(max_degree(&s2).unwrap(), 1);
        assert_eq!(simp_full(&nested).unwrap(), t(r"y^a [y^a] [\x:{a}.x^a]"));
    }

    #[test]
    fn measure_of_wrapper_examples() {
        assert_eq!(w_measure(&t(r"(\x:{a}.y^b){(\x:{b}.z^a) w^b}")).unwrap(), 2);
        assert_eq!(w_measure(&t(r"((\x:{a}.\y:{b}.x^a) z^a) w^b")).unwrap(), 2);
        assert_eq!(w_measure(&t("x^a")).unwrap(), 0);
        assert_eq!(w_measure(&t("x^a [y^b]")), Err(MeasureError::WrappersPresent));
    }

    #[test]
    fn reports() {
        let nf = measure_report(&t("x^a")).unwrap();
        assert!(nf.stages.is_empty());
        assert_eq!(nf.w, 0);
        let r = measure_report(&t(r"(\x:{a}.x^a){y^a}")).unwrap();
        assert_eq!(r.stages.len(), 1);
        assert_eq!(r.w, 1);
        let j = r.to_json();
        assert_eq!(j["W"], 1);
        assert_eq!(j["formatVersion"], 1);
        assert_eq!(j["stages"][0]["afterDegree"], 1);
        assert_eq!(j["normalForm"], "y^a [y^a]");
    }

    #[test]
    fn wrapper_lists_simplify_payloadwise() {
        let l = WrapperList(vec![crate::syntax::parse_set_term(r"{(\x:{a}.x^a){y^a}}").unwrap()]);
        assert_eq!(max_degree_wrappers(&l).unwrap(), 1);
        let s = simp_wrappers(&l, 1).unwrap();
        assert_eq!(s.0[0], crate::syntax::parse_set_term("{y^a [y^a]}").unwrap());
    }
}
