//! Signature pattern checking: pairs extraction facts across
//! (argument, return) and (argument, argument) positions and emits candidate
//! violations.
//!
//! Candidates are gated on a raw pointer taking part on at least one side —
//! either a projection in the fact's path dereferences a raw address type, or
//! the fact's own type is one. Signatures that never touch a raw pointer are
//! checked by the compiler itself.

use crate::extract::{decompose, derive_bounds, BoundSet, ExtractionFact};
use crate::model::{type_equal, FunctionModel, Lifetime, MatchPolicy, StructTable, SubjectType, ValuePath};

/// Hard cap on candidates per function; decomposition is exponential on
/// pathological structs.
pub const MAX_CANDIDATES_PER_FUNCTION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    UafArgReturn,
    UafArgArg,
    NemArgReturn,
}

impl ViolationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationKind::UafArgReturn => "uaf-arg-return",
            ViolationKind::UafArgArg => "uaf-arg-arg",
            ViolationKind::NemArgReturn => "nem-arg-return",
        }
    }

    pub fn from_str(s: &str) -> Option<Self> {
        match s {
            "uaf-arg-return" => Some(ViolationKind::UafArgReturn),
            "uaf-arg-arg" => Some(ViolationKind::UafArgArg),
            "nem-arg-return" => Some(ViolationKind::NemArgReturn),
            _ => None,
        }
    }
}

/// How far a candidate has made it through the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Candidate,
    AliasConfirmed,
    Filtered,
}

impl Stage {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Candidate => "candidate",
            Stage::AliasConfirmed => "alias-confirmed",
            Stage::Filtered => "filtered",
        }
    }
}

/// A potential violation between two extracted values of one signature.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateViolation {
    pub kind: ViolationKind,
    pub source: ExtractionFact,
    pub target: ExtractionFact,
    /// Value-level path the alias stage seeds.
    pub alias_source: ValuePath,
    /// Value-level path the alias stage checks membership at.
    pub alias_target: ValuePath,
    /// Arg-arg transfers can run either way; the alias stage tries both.
    pub bidirectional: bool,
    pub stage: Stage,
}

impl CandidateViolation {
    fn new(kind: ViolationKind, source: &ExtractionFact, target: &ExtractionFact) -> Self {
        CandidateViolation {
            kind,
            source: source.clone(),
            target: target.clone(),
            alias_source: source.path.clone(),
            alias_target: target.path.clone(),
            bidirectional: kind == ViolationKind::UafArgArg,
            stage: Stage::Candidate,
        }
    }

    fn with_alias_paths(mut self, source: ValuePath, target: ValuePath) -> Self {
        self.alias_source = source;
        self.alias_target = target;
        self
    }
}

/// Knobs for the checks; the defaults follow the shipped configuration.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub max_depth: usize,
    /// Bounded generics match any type in arg-arg pairing.
    pub arg_arg_wildcard: bool,
    /// Bounded generics match any type in arg-return pairing (off: generic
    /// conversions across the return boundary are accepted misses).
    pub arg_return_wildcard: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_depth: 8,
            arg_arg_wildcard: true,
            arg_return_wildcard: false,
        }
    }
}

fn raw_side(f: &ExtractionFact) -> bool {
    f.via_raw || f.ty.is_raw()
}

/// The raw-pointer gate: at least one side of a pair must involve a raw
/// address type. When the pair matched through a generic wildcard, the raw
/// side must be the concrete one.
fn gate(s: &ExtractionFact, t: &ExtractionFact, wildcard_used: bool) -> bool {
    if wildcard_used {
        let concrete_raw = |f: &ExtractionFact| !is_bounded_generic(&f.ty) && raw_side(f);
        concrete_raw(s) || concrete_raw(t)
    } else {
        raw_side(s) || raw_side(t)
    }
}

fn is_bounded_generic(ty: &SubjectType) -> bool {
    matches!(ty, SubjectType::Generic { lifetime_bounds, .. } if !lifetime_bounds.is_empty())
}

fn matched_via_wildcard(a: &SubjectType, b: &SubjectType) -> bool {
    (is_bounded_generic(a) || is_bounded_generic(b))
        && !type_equal(a, b, MatchPolicy { generic_wildcard: false })
}

/// Use-after-free between an argument and the return type: the types match
/// and the returned value's lifetime is not provably covered by the
/// argument's, or the returned value is owned outright.
///
/// Pairs in which both sides are direct targets of mutable pointers are the
/// business of the mutability check instead.
pub fn check_arg_return_uaf(
    arg_facts: &[ExtractionFact],
    ret_facts: &[ExtractionFact],
    bounds: &BoundSet,
    policy: MatchPolicy,
) -> Vec<CandidateViolation> {
    let mut out = Vec::new();
    for s in arg_facts {
        for t in ret_facts {
            if !type_equal(&s.ty, &t.ty, policy) {
                continue;
            }
            let wildcard = policy.generic_wildcard && matched_via_wildcard(&s.ty, &t.ty);
            if !gate(s, t, wildcard) {
                continue;
            }
            if s.mut_terminal && t.mut_terminal {
                continue;
            }
            let fires = match (&s.borrowed_for, &t.borrowed_for) {
                (Some(l1), Some(l2)) => !bounds.outlives(l1, l2),
                (Some(_), None) => true,
                _ => false,
            };
            if fires {
                out.push(CandidateViolation::new(ViolationKind::UafArgReturn, s, t));
            }
        }
    }
    dedup(out)
}

/// Use-after-free between two arguments: matching types, at least one side
/// writable, and a non-static source lifetime. The concrete borrow lifetimes
/// do not otherwise matter — equal annotations on two arguments say nothing
/// about their relative extents.
pub fn check_arg_arg_uaf(
    per_arg_facts: &[Vec<ExtractionFact>],
    _bounds: &BoundSet,
    policy: MatchPolicy,
) -> Vec<CandidateViolation> {
    let mut out = Vec::new();
    for i in 0..per_arg_facts.len() {
        for j in (i + 1)..per_arg_facts.len() {
            for a in &per_arg_facts[i] {
                for b in &per_arg_facts[j] {
                    if !type_equal(&a.ty, &b.ty, policy) {
                        continue;
                    }
                    let wildcard = policy.generic_wildcard && matched_via_wildcard(&a.ty, &b.ty);
                    if !gate(a, b, wildcard) {
                        continue;
                    }
                    // An assignment needs a writable side; the writable side
                    // receives the transfer. With two writable sides either
                    // direction is possible and the first with a non-static
                    // source is kept.
                    let directions: &[(&ExtractionFact, &ExtractionFact)] =
                        match (a.all_derefs_mut, b.all_derefs_mut) {
                            (true, false) => &[(b, a)],
                            (false, true) => &[(a, b)],
                            (true, true) => &[(a, b), (b, a)],
                            (false, false) => continue,
                        };
                    for &(src, tgt) in directions {
                        if src.borrowed_for == Some(Lifetime::Static) {
                            continue;
                        }
                        out.push(CandidateViolation::new(ViolationKind::UafArgArg, src, tgt));
                        break;
                    }
                }
            }
        }
    }
    dedup(out)
}

/// Non-exclusive mutability between an argument and the return type: a raw
/// `*mut T` pointer on one side against a mutably reachable `T` on the
/// other, or two mutably reachable values of the same type, with lifetimes
/// that may overlap.
pub fn check_arg_return_nem(
    arg_facts: &[ExtractionFact],
    ret_facts: &[ExtractionFact],
    bounds: &BoundSet,
    policy: MatchPolicy,
) -> Vec<CandidateViolation> {
    let mut_value = |f: &ExtractionFact| -> Option<Lifetime> {
        if f.mut_terminal {
            f.borrowed_for.clone()
        } else {
            None
        }
    };
    let raw_mut_pointer = |f: &ExtractionFact| -> Option<(SubjectType, Lifetime)> {
        if let SubjectType::RawUnique(inner) = &f.ty {
            f.borrowed_for.clone().map(|l| ((**inner).clone(), l))
        } else {
            None
        }
    };

    let mut out = Vec::new();
    for s in arg_facts {
        for t in ret_facts {
            if !gate(s, t, false) {
                continue;
            }
            // `*mut T` held by the argument, T mutably reachable from the
            // return.
            if let (Some((pointee, l1)), Some(l2)) = (raw_mut_pointer(s), mut_value(t)) {
                if type_equal(&pointee, &t.ty, policy) && !bounds.outlives(&l1, &l2) {
                    out.push(
                        CandidateViolation::new(ViolationKind::NemArgReturn, s, t)
                            .with_alias_paths(s.path.deref(), t.path.clone()),
                    );
                    continue;
                }
            }
            // `*mut T` held by the return, T mutably reachable from an
            // argument.
            if let (Some(l1), Some((pointee, l2))) = (mut_value(s), raw_mut_pointer(t)) {
                if type_equal(&s.ty, &pointee, policy) && !bounds.outlives(&l1, &l2) {
                    out.push(
                        CandidateViolation::new(ViolationKind::NemArgReturn, s, t)
                            .with_alias_paths(s.path.clone(), t.path.deref()),
                    );
                    continue;
                }
            }
            // Two direct targets of mutable pointers with matching types.
            if let (Some(l1), Some(l2)) = (mut_value(s), mut_value(t)) {
                if type_equal(&s.ty, &t.ty, policy) && !bounds.outlives(&l1, &l2) {
                    out.push(CandidateViolation::new(ViolationKind::NemArgReturn, s, t));
                }
            }
        }
    }
    dedup(out)
}

fn dedup(mut candidates: Vec<CandidateViolation>) -> Vec<CandidateViolation> {
    candidates.sort_by(|a, b| {
        (a.kind, a.source.path.render(), a.target.path.render()).cmp(&(
            b.kind,
            b.source.path.render(),
            b.target.path.render(),
        ))
    });
    candidates.dedup_by(|a, b| {
        a.kind == b.kind && a.source.path == b.source.path && a.target.path == b.target.path
    });
    candidates
}

/// Result of checking one function.
#[derive(Debug, Clone, Default)]
pub struct CheckOutcome {
    pub candidates: Vec<CandidateViolation>,
    /// Set when the candidate list hit [`MAX_CANDIDATES_PER_FUNCTION`].
    pub truncated: bool,
}

/// Runs extraction and all three checks over one function signature and
/// returns the deduplicated, deterministically ordered union.
pub fn check_function(
    func: &FunctionModel,
    structs: &StructTable,
    opts: &CheckOptions,
) -> CheckOutcome {
    let per_arg_facts: Vec<Vec<ExtractionFact>> = func
        .params
        .iter()
        .enumerate()
        .map(|(i, p)| decompose(func.path_root(i), &p.ty, structs, opts.max_depth))
        .collect();
    let arg_facts: Vec<ExtractionFact> = per_arg_facts.iter().flatten().cloned().collect();
    let arg_types: Vec<SubjectType> = func.params.iter().map(|p| p.ty.clone()).collect();
    let bounds = derive_bounds(&arg_types, structs, opts.max_depth);

    let mut all = Vec::new();
    if let Some(ret_ty) = &func.return_type {
        let ret_facts = decompose(crate::model::PathRoot::Ret, ret_ty, structs, opts.max_depth);
        all.extend(check_arg_return_uaf(
            &arg_facts,
            &ret_facts,
            &bounds,
            MatchPolicy {
                generic_wildcard: opts.arg_return_wildcard,
            },
        ));
        all.extend(check_arg_return_nem(
            &arg_facts,
            &ret_facts,
            &bounds,
            MatchPolicy {
                generic_wildcard: false,
            },
        ));
    }
    if per_arg_facts.len() >= 2 {
        all.extend(check_arg_arg_uaf(
            &per_arg_facts,
            &bounds,
            MatchPolicy {
                generic_wildcard: opts.arg_arg_wildcard,
            },
        ));
    }
    let mut candidates = dedup(all);
    let truncated = candidates.len() > MAX_CANDIDATES_PER_FUNCTION;
    candidates.truncate(MAX_CANDIDATES_PER_FUNCTION);
    CheckOutcome {
        candidates,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        ImplContext, Lifetime, Param, PathRoot, Span, StructDef, StructTable, SubjectType,
        TypeParam,
    };

    fn lt(n: &str) -> Lifetime {
        Lifetime::named(n)
    }

    fn figure_structs() -> StructTable {
        let mut t = StructTable::new();
        t.insert(StructDef {
            name: "Foo".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![],
            fields: vec![
                ("x".into(), SubjectType::raw_unique(SubjectType::adt("String"))),
                (
                    "w".into(),
                    SubjectType::unique(lt("a"), SubjectType::prim("i32")),
                ),
            ],
            opaque: false,
        });
        t.insert(StructDef {
            name: "Bar".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![
                ("y".into(), SubjectType::adt("String")),
                ("z".into(), SubjectType::raw_unique(SubjectType::prim("i32"))),
            ],
            opaque: false,
        });
        t
    }

    fn figure_fn() -> FunctionModel {
        FunctionModel {
            name: "bar".into(),
            impl_of: None,
            lifetime_params: vec!["a".into(), "b".into()],
            type_params: vec![],
            params: vec![
                Param {
                    name: "arg1".into(),
                    ty: SubjectType::unique(lt("a"), SubjectType::prim("i32")),
                    is_self: false,
                },
                Param {
                    name: "arg2".into(),
                    ty: SubjectType::unique(lt("b"), SubjectType::adt("Bar")),
                    is_self: false,
                },
            ],
            return_type: Some(SubjectType::Adt {
                name: "Foo".into(),
                lifetime_args: vec![lt("a")],
                type_args: vec![],
            }),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        }
    }

    fn rendered(c: &CandidateViolation) -> (ViolationKind, String, String) {
        (c.kind, c.source.path.render(), c.target.path.render())
    }

    #[test]
    fn motivating_signature_yields_exactly_four_candidates() {
        let outcome = check_function(&figure_fn(), &figure_structs(), &CheckOptions::default());
        let got: Vec<_> = outcome.candidates.iter().map(rendered).collect();
        let want = vec![
            (
                ViolationKind::UafArgReturn,
                "(*arg2).y".to_string(),
                "*(ret.x)".to_string(),
            ),
            (
                ViolationKind::UafArgArg,
                "*arg1".to_string(),
                "*(*arg2).z".to_string(),
            ),
            (
                ViolationKind::NemArgReturn,
                "(*arg2).z".to_string(),
                "*(ret.w)".to_string(),
            ),
            (
                ViolationKind::NemArgReturn,
                "*(*arg2).z".to_string(),
                "*(ret.w)".to_string(),
            ),
        ];
        assert_eq!(got, want);
        assert!(!outcome.truncated);
    }

    #[test]
    fn function_without_raw_types_is_clean() {
        let func = FunctionModel {
            name: "pick".into(),
            impl_of: None,
            lifetime_params: vec!["a".into(), "b".into()],
            type_params: vec![],
            params: vec![
                Param {
                    name: "a".into(),
                    ty: SubjectType::shared(lt("a"), SubjectType::adt("String")),
                    is_self: false,
                },
                Param {
                    name: "b".into(),
                    ty: SubjectType::unique(lt("b"), SubjectType::adt("String")),
                    is_self: false,
                },
            ],
            return_type: Some(SubjectType::shared(lt("a"), SubjectType::adt("String"))),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &StructTable::new(), &CheckOptions::default());
        assert!(outcome.candidates.is_empty());
    }

    #[test]
    fn matching_lifetimes_produce_no_candidate() {
        // fn id<'a>(x: &'a mut i32) -> &'a mut i32
        let func = FunctionModel {
            name: "id".into(),
            impl_of: None,
            lifetime_params: vec!["a".into()],
            type_params: vec![],
            params: vec![Param {
                name: "x".into(),
                ty: SubjectType::unique(lt("a"), SubjectType::prim("i32")),
                is_self: false,
            }],
            return_type: Some(SubjectType::unique(lt("a"), SubjectType::prim("i32"))),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &StructTable::new(), &CheckOptions::default());
        assert!(outcome.candidates.is_empty());
    }

    fn rulinalg_model() -> (FunctionModel, StructTable) {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "MatrixSliceMut".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "ptr".into(),
                SubjectType::raw_unique(SubjectType::generic("T")),
            )],
            opaque: false,
        });
        structs.insert(StructDef {
            name: "RowMut".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "row".into(),
                SubjectType::Adt {
                    name: "MatrixSliceMut".into(),
                    lifetime_args: vec![lt("a")],
                    type_args: vec![SubjectType::generic("T")],
                },
            )],
            opaque: false,
        });
        let func = FunctionModel {
            name: "raw_slice_mut".into(),
            impl_of: Some(ImplContext {
                struct_name: "RowMut".into(),
                trait_name: None,
                lifetime_args: vec![lt("a")],
                type_args: vec![SubjectType::generic("T")],
            }),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }, TypeParam { name: "a".into(), lifetime_bounds: vec![] }],
            }],
            params: vec![Param {
                name: "self".into(),
                ty: SubjectType::unique(
                    Lifetime::Anon(0),
                    SubjectType::Adt {
                        name: "RowMut".into(),
                        lifetime_args: vec![lt("a")],
                        type_args: vec![SubjectType::generic("T")],
                    },
                ),
                is_self: true,
            }],
            return_type: Some(SubjectType::unique(
                lt("a"),
                SubjectType::Slice(Box::new(SubjectType::generic("T"))),
            )),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        (func, structs)
    }

    #[test]
    fn mutable_reborrow_with_longer_return_is_one_mutability_candidate() {
        let (func, structs) = rulinalg_model();
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        let got: Vec<_> = outcome.candidates.iter().map(rendered).collect();
        assert_eq!(
            got,
            vec![(
                ViolationKind::NemArgReturn,
                "self.row.ptr".to_string(),
                "(*ret)[..]".to_string(),
            )]
        );
        // The alias query runs at the value level: the pointer side is
        // dereferenced once.
        let c = &outcome.candidates[0];
        assert_eq!(c.alias_source.render(), "*(self.row.ptr)");
        assert_eq!(c.alias_target.render(), "(*ret)[..]");
    }

    fn lru_model() -> (FunctionModel, StructTable) {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "LruEntry".into(),
            lifetime_params: vec![],
            type_params: vec![TypeParam { name: "K".into(), lifetime_bounds: vec![] }, TypeParam { name: "V".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "next".into(),
                SubjectType::raw_unique(SubjectType::Adt {
                    name: "LruEntry".into(),
                    lifetime_args: vec![],
                    type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
                }),
            )],
            opaque: false,
        });
        structs.insert(StructDef {
            name: "LruCache".into(),
            lifetime_params: vec![],
            type_params: vec![TypeParam { name: "K".into(), lifetime_bounds: vec![] }, TypeParam { name: "V".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "head".into(),
                SubjectType::raw_unique(SubjectType::Adt {
                    name: "LruEntry".into(),
                    lifetime_args: vec![],
                    type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
                }),
            )],
            opaque: false,
        });
        structs.insert(StructDef {
            name: "Iter".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "K".into(), lifetime_bounds: vec![] }, TypeParam { name: "V".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "ptr".into(),
                SubjectType::raw_shared(SubjectType::Adt {
                    name: "LruEntry".into(),
                    lifetime_args: vec![],
                    type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
                }),
            )],
            opaque: false,
        });
        let lru_ty = SubjectType::Adt {
            name: "LruCache".into(),
            lifetime_args: vec![],
            type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
        };
        let func = FunctionModel {
            name: "iter".into(),
            impl_of: Some(ImplContext {
                struct_name: "LruCache".into(),
                trait_name: None,
                lifetime_args: vec![],
                type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
            }),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "K".into(), lifetime_bounds: vec![] }],
                },
                TypeParam {
                    name: "V".into(),
                    lifetime_bounds: vec![],
                },
            ],
            params: vec![Param {
                name: "self".into(),
                ty: SubjectType::shared(Lifetime::Anon(0), lru_ty),
                is_self: true,
            }],
            return_type: Some(SubjectType::Adt {
                name: "Iter".into(),
                lifetime_args: vec![lt("a")],
                type_args: vec![SubjectType::generic("K"), SubjectType::generic("V")],
            }),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        (func, structs)
    }

    #[test]
    fn shared_receiver_with_longer_iterator_lifetime_is_use_after_free() {
        let (func, structs) = lru_model();
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        assert!(!outcome.candidates.is_empty());
        // Every candidate is a use-after-free; the return side exposes the
        // entries through a *const pointer, so no mutability pair arises.
        for c in &outcome.candidates {
            assert_eq!(c.kind, ViolationKind::UafArgReturn, "{:?}", rendered(c));
        }
        assert!(outcome
            .candidates
            .iter()
            .any(|c| c.source.path.render() == "*(self.head)"
                && c.target.path.render() == "*(ret.ptr)"));
    }

    #[test]
    fn bounded_generic_pairs_with_concrete_raw_fact_across_arguments() {
        // A shared receiver holding *mut sqlite3 against an owned generic
        // argument bounded by the receiver's lifetime.
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "InnerConnection".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![(
                "db".into(),
                SubjectType::raw_unique(SubjectType::adt("sqlite3")),
            )],
            opaque: false,
        });
        structs.insert(StructDef {
            name: "Connection".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![(
                "db".into(),
                SubjectType::Adt {
                    name: "RefCell".into(),
                    lifetime_args: vec![],
                    type_args: vec![SubjectType::adt("InnerConnection")],
                },
            )],
            opaque: false,
        });
        let func = FunctionModel {
            name: "update_hook".into(),
            impl_of: Some(ImplContext {
                struct_name: "Connection".into(),
                trait_name: None,
                lifetime_args: vec![],
                type_args: vec![],
            }),
            lifetime_params: vec!["c".into()],
            type_params: vec![TypeParam { name: "F".into(), lifetime_bounds: vec![] }, TypeParam { name: "c".into(), lifetime_bounds: vec![] }],
            }],
            params: vec![
                Param {
                    name: "self".into(),
                    ty: SubjectType::shared(lt("c"), SubjectType::adt("Connection")),
                    is_self: true,
                },
                Param {
                    name: "hook".into(),
                    ty: SubjectType::Adt {
                        name: "Option".into(),
                        lifetime_args: vec![],
                        type_args: vec![SubjectType::Generic {
                            name: "F".into(),
                            lifetime_bounds: vec![lt("c")],
                        }],
                    },
                    is_self: false,
                },
            ],
            return_type: None,
            where_bounds: vec![("F".into(), lt("c"))],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        assert!(!outcome.candidates.is_empty());
        for c in &outcome.candidates {
            assert_eq!(c.kind, ViolationKind::UafArgArg);
            assert_eq!(c.target.path.render(), "hook.0");
        }
        assert!(outcome
            .candidates
            .iter()
            .any(|c| c.source.path.render() == "self.db.0.db"));
        // Without the wildcard the generic no longer matches.
        let strict = check_function(
            &func,
            &structs,
            &CheckOptions {
                arg_arg_wildcard: false,
                ..CheckOptions::default()
            },
        );
        assert!(strict.candidates.is_empty());
    }

    #[test]
    fn both_sides_behind_shared_refs_are_skipped() {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "Holder".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![(
                "q".into(),
                SubjectType::raw_shared(SubjectType::prim("i32")),
            )],
            opaque: false,
        });
        let param = |n: &str, l: &str| Param {
            name: n.into(),
            ty: SubjectType::shared(lt(l), SubjectType::adt("Holder")),
            is_self: false,
        };
        let func = FunctionModel {
            name: "share".into(),
            impl_of: None,
            lifetime_params: vec!["a".into(), "b".into()],
            type_params: vec![],
            params: vec![param("a", "a"), param("b", "b")],
            return_type: None,
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        assert!(outcome.candidates.is_empty());
    }

    #[test]
    fn static_source_is_skipped_in_arg_arg() {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "Holder".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![(
                "q".into(),
                SubjectType::raw_unique(SubjectType::prim("i32")),
            )],
            opaque: false,
        });
        let func = FunctionModel {
            name: "keep".into(),
            impl_of: None,
            lifetime_params: vec!["b".into()],
            type_params: vec![],
            params: vec![
                Param {
                    name: "s".into(),
                    ty: SubjectType::unique(Lifetime::Static, SubjectType::adt("Holder")),
                    is_self: false,
                },
                Param {
                    name: "out".into(),
                    ty: SubjectType::unique(lt("b"), SubjectType::adt("Holder")),
                    is_self: false,
                },
            ],
            return_type: None,
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        // The static-rooted facts never act as a source, but the reverse
        // direction (out's facts into the static holder) still fires.
        assert!(!outcome.candidates.is_empty());
        for c in &outcome.candidates {
            assert_ne!(c.source.borrowed_for, Some(Lifetime::Static));
        }
    }

    #[test]
    fn candidate_list_is_capped_with_a_flag() {
        // A struct with many same-typed raw fields explodes combinatorially.
        let mut fields = Vec::new();
        for i in 0..24 {
            fields.push((
                format!("f{i}"),
                SubjectType::raw_unique(SubjectType::prim("i32")),
            ));
        }
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "Wide".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields,
            opaque: false,
        });
        let func = FunctionModel {
            name: "explode".into(),
            impl_of: None,
            lifetime_params: vec!["a".into(), "b".into()],
            type_params: vec![],
            params: vec![Param {
                name: "w".into(),
                ty: SubjectType::unique(lt("a"), SubjectType::adt("Wide")),
                is_self: false,
            }],
            return_type: Some(SubjectType::unique(lt("b"), SubjectType::adt("Wide"))),
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let outcome = check_function(&func, &structs, &CheckOptions::default());
        assert_eq!(outcome.candidates.len(), MAX_CANDIDATES_PER_FUNCTION);
        assert!(outcome.truncated);
    }

    #[test]
    fn determinism_identical_input_identical_output() {
        let a = check_function(&figure_fn(), &figure_structs(), &CheckOptions::default());
        let b = check_function(&figure_fn(), &figure_structs(), &CheckOptions::default());
        assert_eq!(a.candidates, b.candidates);
    }
}
