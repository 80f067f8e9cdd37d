//! Lifetime-bound extraction: for a given argument or return type, compute
//! every nested value reachable from it and the lifetime that value must
//! outlive, plus the outlives bounds implied by the argument types.
//!
//! The rules, informally:
//!
//! * an owned value contains itself, owned;
//! * the target of a borrow `&'l T` must outlive `'l`, and so must every
//!   field reachable from it by plain projections;
//! * an inner borrow keeps its own lifetime, an outer borrow lifetime does
//!   not re-attach to it;
//! * the target of a raw pointer stored in a struct *with* lifetime
//!   parameters must outlive each of those parameters;
//! * the target of a raw pointer stored in a struct *without* lifetime
//!   parameters is treated as owned by the structure object, so it inherits
//!   whatever governs that object.

use std::collections::BTreeSet;

use crate::model::{
    Lifetime, PathRoot, Projection, StructTable, SubjectType, ValuePath,
};

/// A value reachable from an argument or return type, together with the
/// lifetime it must outlive. `borrowed_for == None` means the value is owned
/// where it sits (no enclosing borrow governs it).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtractionFact {
    pub path: ValuePath,
    pub ty: SubjectType,
    pub borrowed_for: Option<Lifetime>,
    /// True iff some projection in `path` dereferences a raw address type.
    pub via_raw: bool,
    /// True iff the final non-index projection is a deref through a unique
    /// reference or a raw `*mut`: the value is the direct target of a
    /// mutable pointer.
    pub mut_terminal: bool,
    /// True iff every deref in `path` goes through a unique reference or a
    /// raw `*mut` (vacuously true without derefs): the value can be written
    /// through this path.
    pub all_derefs_mut: bool,
}

impl ExtractionFact {
    pub fn lifetime(&self) -> Option<&Lifetime> {
        self.borrowed_for.as_ref()
    }
}

/// Computes all extraction facts for a value of type `ty` rooted at `root`.
///
/// `max_depth` caps the number of projection steps per fact. Recursion into a
/// struct already being expanded through field projections is cut; crossing a
/// pointer starts a fresh object, so self-referential structs unroll up to
/// the depth cap.
pub fn decompose(
    root: PathRoot,
    ty: &SubjectType,
    structs: &StructTable,
    max_depth: usize,
) -> Vec<ExtractionFact> {
    let mut facts = Vec::new();
    let mut walk = Walk {
        structs,
        max_depth,
        facts: &mut facts,
    };
    walk.visit(
        ValuePath::root(root),
        ty,
        None,
        Flags {
            via_raw: false,
            mut_terminal: false,
            all_derefs_mut: true,
        },
        &mut Vec::new(),
    );
    facts
}

#[derive(Clone, Copy)]
struct Flags {
    via_raw: bool,
    mut_terminal: bool,
    all_derefs_mut: bool,
}

struct Walk<'a> {
    structs: &'a StructTable,
    max_depth: usize,
    facts: &'a mut Vec<ExtractionFact>,
}

impl Walk<'_> {
    fn visit(
        &mut self,
        path: ValuePath,
        ty: &SubjectType,
        governing: Option<Lifetime>,
        flags: Flags,
        visiting: &mut Vec<String>,
    ) {
        self.facts.push(ExtractionFact {
            path: path.clone(),
            ty: ty.clone(),
            borrowed_for: governing.clone(),
            via_raw: flags.via_raw,
            mut_terminal: flags.mut_terminal,
            all_derefs_mut: flags.all_derefs_mut,
        });
        if path.projections.len() >= self.max_depth {
            return;
        }
        match ty {
            SubjectType::SharedRef(l, inner) | SubjectType::UniqueRef(l, inner) => {
                let mutable = matches!(ty, SubjectType::UniqueRef(..));
                // Crossing a pointer reaches a new object: reset the
                // field-expansion cycle cut.
                let mut fresh = Vec::new();
                self.visit(
                    path.deref(),
                    inner,
                    Some(l.clone()),
                    Flags {
                        via_raw: flags.via_raw,
                        mut_terminal: mutable,
                        all_derefs_mut: flags.all_derefs_mut && mutable,
                    },
                    &mut fresh,
                );
            }
            SubjectType::RawShared(inner) | SubjectType::RawUnique(inner) => {
                let mutable = matches!(ty, SubjectType::RawUnique(_));
                let mut fresh = Vec::new();
                self.visit(
                    path.deref(),
                    inner,
                    governing,
                    Flags {
                        via_raw: true,
                        mut_terminal: mutable,
                        all_derefs_mut: flags.all_derefs_mut && mutable,
                    },
                    &mut fresh,
                );
            }
            SubjectType::Slice(elem) => {
                // A slice holds its elements as owned content.
                self.visit(
                    path.push(Projection::Index),
                    elem,
                    governing,
                    Flags {
                        mut_terminal: flags.mut_terminal,
                        ..flags
                    },
                    visiting,
                );
            }
            SubjectType::Adt {
                name,
                lifetime_args,
                type_args,
            } => {
                if visiting.iter().any(|v| v == name) {
                    return;
                }
                match self.structs.get(name) {
                    Some(def) if !def.opaque => {
                        visiting.push(name.clone());
                        for (fname, fty) in def.instantiated_fields(lifetime_args, type_args) {
                            self.visit_field(
                                path.field(&fname),
                                &fty,
                                governing.clone(),
                                lifetime_args,
                                flags,
                                visiting,
                            );
                        }
                        visiting.pop();
                    }
                    _ => {
                        // Unknown definition: the fields are invisible, but
                        // type arguments written at the use site are owned
                        // content of the object.
                        visiting.push(name.clone());
                        for (i, targ) in type_args.iter().enumerate() {
                            self.visit(
                                path.push(Projection::Content(i)),
                                targ,
                                governing.clone(),
                                Flags {
                                    mut_terminal: false,
                                    ..flags
                                },
                                visiting,
                            );
                        }
                        visiting.pop();
                    }
                }
            }
            SubjectType::Generic { .. } | SubjectType::Prim(_) => {}
        }
    }

    /// Visits one struct field. Raw-pointer fields are special: the pointee's
    /// governing lifetime comes from the struct's lifetime parameters when it
    /// has any (one fact per parameter), and from the object's own governing
    /// lifetime otherwise.
    fn visit_field(
        &mut self,
        path: ValuePath,
        fty: &SubjectType,
        governing: Option<Lifetime>,
        struct_lifetimes: &[Lifetime],
        flags: Flags,
        visiting: &mut Vec<String>,
    ) {
        let raw_inner = match fty {
            SubjectType::RawShared(inner) | SubjectType::RawUnique(inner) => Some(inner),
            _ => None,
        };
        if let Some(inner) = raw_inner {
            let mutable = matches!(fty, SubjectType::RawUnique(_));
            // The pointer value itself is an ordinary field.
            self.facts.push(ExtractionFact {
                path: path.clone(),
                ty: fty.clone(),
                borrowed_for: governing.clone(),
                via_raw: flags.via_raw,
                mut_terminal: false,
                all_derefs_mut: flags.all_derefs_mut,
            });
            if path.projections.len() >= self.max_depth {
                return;
            }
            let pointee_govs: Vec<Option<Lifetime>> = if struct_lifetimes.is_empty() {
                vec![governing]
            } else {
                struct_lifetimes.iter().map(|l| Some(l.clone())).collect()
            };
            for gov in pointee_govs {
                let mut fresh = Vec::new();
                self.visit(
                    path.deref(),
                    inner,
                    gov,
                    Flags {
                        via_raw: true,
                        mut_terminal: mutable,
                        all_derefs_mut: flags.all_derefs_mut && mutable,
                    },
                    &mut fresh,
                );
            }
        } else {
            self.visit(
                path,
                fty,
                governing,
                Flags {
                    mut_terminal: false,
                    ..flags
                },
                visiting,
            );
        }
    }
}

/// A derived fact that `longer` lives at least as long as `shorter`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OutlivesBound {
    pub longer: Lifetime,
    pub shorter: Lifetime,
}

/// The set of outlives bounds derivable from a signature's argument types,
/// closed under transitivity. Reflexive pairs and `'static`-outlives-anything
/// are axioms of the query and are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundSet {
    edges: BTreeSet<(Lifetime, Lifetime)>,
}

impl BoundSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, longer: Lifetime, shorter: Lifetime) {
        if longer != shorter {
            self.edges.insert((longer, shorter));
        }
    }

    /// Closes the stored edges under transitivity. Bound sets are tiny, so
    /// this just iterates to a fixed point.
    pub fn close(&mut self) {
        loop {
            let mut added = Vec::new();
            for (a, b) in &self.edges {
                for (c, d) in &self.edges {
                    if b == c && a != d && !self.edges.contains(&(a.clone(), d.clone())) {
                        added.push((a.clone(), d.clone()));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            self.edges.extend(added);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = OutlivesBound> + '_ {
        self.edges.iter().map(|(l, s)| OutlivesBound {
            longer: l.clone(),
            shorter: s.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True iff `l1` provably lives at least as long as `l2`.
    pub fn outlives(&self, l1: &Lifetime, l2: &Lifetime) -> bool {
        l1 == l2
            || *l1 == Lifetime::Static
            || self.edges.contains(&(l1.clone(), l2.clone()))
    }
}

/// Derives the outlives bounds implied by the argument types of a signature.
///
/// Each borrow layer `&'l T` contributes `L1 outlives 'l` for every lifetime
/// `L1` that extraction assigns to some value inside `T`; bounds nested in
/// contained types propagate out. We union over all arguments. Constraints
/// are only ever *inferred* from arguments, never from the return type.
pub fn derive_bounds(
    arg_types: &[SubjectType],
    structs: &StructTable,
    max_depth: usize,
) -> BoundSet {
    let mut set = BoundSet::new();
    for ty in arg_types {
        collect_bounds(ty, structs, max_depth, &mut set, &mut Vec::new());
    }
    set.close();
    set
}

fn collect_bounds(
    ty: &SubjectType,
    structs: &StructTable,
    max_depth: usize,
    set: &mut BoundSet,
    visiting: &mut Vec<String>,
) {
    match ty {
        SubjectType::SharedRef(l, inner) | SubjectType::UniqueRef(l, inner) => {
            for fact in decompose(PathRoot::Local("_".into()), inner, structs, max_depth) {
                if let Some(l1) = fact.borrowed_for {
                    set.insert(l1, l.clone());
                }
            }
            collect_bounds(inner, structs, max_depth, set, visiting);
        }
        SubjectType::RawShared(inner)
        | SubjectType::RawUnique(inner)
        | SubjectType::Slice(inner) => collect_bounds(inner, structs, max_depth, set, visiting),
        SubjectType::Adt {
            name,
            lifetime_args,
            type_args,
        } => {
            if visiting.iter().any(|v| v == name) {
                return;
            }
            visiting.push(name.clone());
            match structs.get(name) {
                Some(def) if !def.opaque => {
                    for (_, fty) in def.instantiated_fields(lifetime_args, type_args) {
                        collect_bounds(&fty, structs, max_depth, set, visiting);
                    }
                }
                _ => {
                    for targ in type_args {
                        collect_bounds(targ, structs, max_depth, set, visiting);
                    }
                }
            }
            visiting.pop();
        }
        SubjectType::Generic { .. } | SubjectType::Prim(_) => {}
    }
}

/// True iff `l1` provably outlives `l2` under `bounds`: reflexively, because
/// `l1` is `'static`, or through the transitive closure of the bound set.
pub fn outlives(bounds: &BoundSet, l1: &Lifetime, l2: &Lifetime) -> bool {
    bounds.outlives(l1, l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{StructDef, TypeParam};

    fn table(defs: Vec<StructDef>) -> StructTable {
        let mut t = StructTable::new();
        for d in defs {
            t.insert(d);
        }
        t
    }

    fn sdef(name: &str, lps: &[&str], fields: Vec<(&str, SubjectType)>) -> StructDef {
        StructDef {
            name: name.into(),
            lifetime_params: lps.iter().map(|s| s.to_string()).collect(),
            type_params: vec![],
            fields: fields
                .into_iter()
                .map(|(n, t)| (n.to_string(), t))
                .collect(),
            opaque: false,
        }
    }

    fn lt(n: &str) -> Lifetime {
        Lifetime::named(n)
    }

    fn arg(i: usize, n: &str) -> PathRoot {
        PathRoot::Arg {
            index: i,
            name: n.into(),
        }
    }

    fn find<'a>(facts: &'a [ExtractionFact], rendered: &str) -> &'a ExtractionFact {
        facts
            .iter()
            .find(|f| f.path.render() == rendered)
            .unwrap_or_else(|| panic!("no fact for path {rendered}"))
    }

    // An owned primitive contains itself and nothing else.
    #[test]
    fn owned_value_contains_itself() {
        let facts = decompose(arg(0, "x"), &SubjectType::prim("i32"), &table(vec![]), 8);
        assert_eq!(facts.len(), 1);
        assert_eq!(facts[0].path.render(), "x");
        assert_eq!(facts[0].borrowed_for, None);
        assert!(!facts[0].via_raw);
    }

    #[test]
    fn shared_borrow_target_outlives_the_borrow() {
        let ty = SubjectType::shared(lt("a"), SubjectType::prim("i32"));
        let facts = decompose(arg(0, "x"), &ty, &table(vec![]), 8);
        let deref = find(&facts, "*x");
        assert_eq!(deref.borrowed_for, Some(lt("a")));
        assert!(!deref.mut_terminal);
    }

    #[test]
    fn unique_borrow_target_outlives_the_borrow() {
        let ty = SubjectType::unique(lt("a"), SubjectType::prim("i32"));
        let facts = decompose(arg(0, "x"), &ty, &table(vec![]), 8);
        let deref = find(&facts, "*x");
        assert_eq!(deref.borrowed_for, Some(lt("a")));
        assert!(deref.mut_terminal);
        assert!(deref.all_derefs_mut);
    }

    #[test]
    fn struct_fields_transport_inner_lifetimes() {
        let structs = table(vec![sdef(
            "W",
            &[],
            vec![("f", SubjectType::shared(lt("b"), SubjectType::prim("i32")))],
        )]);
        let facts = decompose(arg(0, "w"), &SubjectType::adt("W"), &structs, 8);
        assert_eq!(find(&facts, "w.f").borrowed_for, None);
        assert_eq!(find(&facts, "*(w.f)").borrowed_for, Some(lt("b")));
    }

    #[test]
    fn plain_fields_of_an_owned_struct_stay_owned() {
        let structs = table(vec![sdef("W", &[], vec![("g", SubjectType::adt("String"))])]);
        let facts = decompose(arg(0, "w"), &SubjectType::adt("W"), &structs, 8);
        assert_eq!(find(&facts, "w.g").borrowed_for, None);
    }

    #[test]
    fn inner_borrow_keeps_its_own_lifetime() {
        let ty = SubjectType::shared(
            lt("a"),
            SubjectType::shared(lt("b"), SubjectType::prim("i32")),
        );
        let facts = decompose(arg(0, "x"), &ty, &table(vec![]), 8);
        assert_eq!(find(&facts, "*x").borrowed_for, Some(lt("a")));
        assert_eq!(find(&facts, "**x").borrowed_for, Some(lt("b")));
    }

    #[test]
    fn raw_const_pointee_in_plain_struct_is_owned_by_the_object() {
        let structs = table(vec![sdef(
            "S",
            &[],
            vec![("p", SubjectType::raw_shared(SubjectType::prim("i32")))],
        )]);
        let facts = decompose(arg(0, "s"), &SubjectType::adt("S"), &structs, 8);
        let pointee = find(&facts, "*(s.p)");
        assert_eq!(pointee.borrowed_for, None);
        assert!(pointee.via_raw);
        assert!(!pointee.mut_terminal);
    }

    #[test]
    fn raw_mut_pointee_in_plain_struct_is_owned_by_the_object() {
        let structs = table(vec![sdef(
            "S",
            &[],
            vec![("p", SubjectType::raw_unique(SubjectType::prim("i32")))],
        )]);
        let facts = decompose(arg(0, "s"), &SubjectType::adt("S"), &structs, 8);
        let pointee = find(&facts, "*(s.p)");
        assert_eq!(pointee.borrowed_for, None);
        assert!(pointee.via_raw);
        assert!(pointee.mut_terminal);
    }

    #[test]
    fn raw_const_pointee_binds_the_struct_lifetime() {
        let structs = table(vec![sdef(
            "S",
            &["s"],
            vec![("p", SubjectType::raw_shared(SubjectType::prim("i32")))],
        )]);
        let ty = SubjectType::Adt {
            name: "S".into(),
            lifetime_args: vec![lt("x")],
            type_args: vec![],
        };
        let facts = decompose(arg(0, "s"), &ty, &structs, 8);
        assert_eq!(find(&facts, "*(s.p)").borrowed_for, Some(lt("x")));
    }

    #[test]
    fn raw_mut_pointee_binds_the_struct_lifetime() {
        let structs = table(vec![sdef(
            "S",
            &["s"],
            vec![("p", SubjectType::raw_unique(SubjectType::prim("i32")))],
        )]);
        let ty = SubjectType::Adt {
            name: "S".into(),
            lifetime_args: vec![lt("x")],
            type_args: vec![],
        };
        let facts = decompose(arg(0, "s"), &ty, &structs, 8);
        let pointee = find(&facts, "*(s.p)");
        assert_eq!(pointee.borrowed_for, Some(lt("x")));
        assert!(pointee.mut_terminal);
    }

    // A raw pointee inside an annotated struct does not take the outer borrow
    // lifetime; the pointer field itself does.
    #[test]
    fn annotated_struct_overrides_outer_lifetime_for_raw_pointees() {
        let structs = table(vec![sdef(
            "S",
            &["s"],
            vec![("p", SubjectType::raw_unique(SubjectType::prim("i32")))],
        )]);
        let ty = SubjectType::unique(
            lt("o"),
            SubjectType::Adt {
                name: "S".into(),
                lifetime_args: vec![lt("x")],
                type_args: vec![],
            },
        );
        let facts = decompose(arg(0, "s"), &ty, &structs, 8);
        assert_eq!(find(&facts, "(*s).p").borrowed_for, Some(lt("o")));
        let pointees: Vec<_> = facts
            .iter()
            .filter(|f| f.path.render() == "*(*s).p")
            .collect();
        assert_eq!(pointees.len(), 1);
        assert_eq!(pointees[0].borrowed_for, Some(lt("x")));
    }

    #[test]
    fn multi_lifetime_struct_emits_one_pointee_fact_per_parameter() {
        let structs = table(vec![StructDef {
            name: "S".into(),
            lifetime_params: vec!["p".into(), "q".into()],
            type_params: vec![],
            fields: vec![("r".into(), SubjectType::raw_unique(SubjectType::prim("i32")))],
            opaque: false,
        }]);
        let ty = SubjectType::Adt {
            name: "S".into(),
            lifetime_args: vec![lt("p"), lt("q")],
            type_args: vec![],
        };
        let facts = decompose(arg(0, "s"), &ty, &structs, 8);
        let govs: Vec<_> = facts
            .iter()
            .filter(|f| f.path.render() == "*(s.r)")
            .map(|f| f.borrowed_for.clone())
            .collect();
        assert_eq!(govs, vec![Some(lt("p")), Some(lt("q"))]);
    }

    #[test]
    fn slice_contributes_its_element() {
        let ty = SubjectType::unique(
            lt("a"),
            SubjectType::Slice(Box::new(SubjectType::generic("T"))),
        );
        let facts = decompose(PathRoot::Ret, &ty, &table(vec![]), 8);
        let elem = find(&facts, "(*ret)[..]");
        assert_eq!(elem.borrowed_for, Some(lt("a")));
        assert_eq!(elem.ty, SubjectType::generic("T"));
        assert!(elem.mut_terminal);
    }

    #[test]
    fn opaque_struct_decomposes_to_itself_only() {
        let facts = decompose(arg(0, "w"), &SubjectType::adt("Waker"), &table(vec![]), 8);
        assert_eq!(facts.len(), 1);
    }

    #[test]
    fn opaque_type_arguments_are_owned_content() {
        let inner = SubjectType::Adt {
            name: "Inner".into(),
            lifetime_args: vec![],
            type_args: vec![],
        };
        let structs = table(vec![sdef(
            "Inner",
            &[],
            vec![("db", SubjectType::raw_unique(SubjectType::adt("sqlite3")))],
        )]);
        let ty = SubjectType::Adt {
            name: "RefCell".into(),
            lifetime_args: vec![],
            type_args: vec![inner],
        };
        let facts = decompose(arg(0, "c"), &ty, &structs, 8);
        assert_eq!(find(&facts, "c.0").ty, SubjectType::adt("Inner"));
        assert!(find(&facts, "c.0.db").ty.is_raw());
        assert!(find(&facts, "*(c.0.db)").via_raw);
    }

    // Hand-unrolled expectation for a self-referential struct:
    // e, e.next, *(e.next), (*(e.next)).next, ... up to eight projections.
    #[test]
    fn recursive_struct_unrolls_to_the_depth_cap() {
        let structs = table(vec![sdef(
            "Chain",
            &[],
            vec![("next", SubjectType::raw_unique(SubjectType::adt("Chain")))],
        )]);
        let facts = decompose(arg(0, "e"), &SubjectType::adt("Chain"), &structs, 8);
        assert_eq!(facts.len(), 9);
        let nested = facts.iter().filter(|f| !f.path.projections.is_empty());
        assert_eq!(nested.count(), 8);
        assert!(facts
            .iter()
            .all(|f| f.path.projections.len() <= 8));
        let deepest = facts
            .iter()
            .max_by_key(|f| f.path.projections.len())
            .unwrap();
        assert_eq!(deepest.path.projections.len(), 8);
    }

    #[test]
    fn decompose_is_monotone_in_depth() {
        let structs = table(vec![sdef(
            "Chain",
            &[],
            vec![("next", SubjectType::raw_unique(SubjectType::adt("Chain")))],
        )]);
        for d in 1..10 {
            let small = decompose(arg(0, "e"), &SubjectType::adt("Chain"), &structs, d);
            let big = decompose(arg(0, "e"), &SubjectType::adt("Chain"), &structs, d + 1);
            for f in &small {
                assert!(big.contains(f), "depth {d}: lost {}", f.path.render());
            }
        }
    }

    #[test]
    fn owned_field_recursion_is_cut() {
        let structs = table(vec![
            sdef("A", &[], vec![("b", SubjectType::adt("B"))]),
            sdef("B", &[], vec![("a", SubjectType::adt("A"))]),
        ]);
        let facts = decompose(arg(0, "x"), &SubjectType::adt("A"), &structs, 32);
        // x, x.b, x.b.a — then A is already on the expansion path.
        assert_eq!(facts.len(), 3);
    }

    #[test]
    fn bound_from_nested_borrow() {
        let ty = SubjectType::shared(
            lt("a"),
            SubjectType::shared(lt("b"), SubjectType::prim("i32")),
        );
        let bounds = derive_bounds(&[ty], &table(vec![]), 8);
        assert!(bounds.outlives(&lt("b"), &lt("a")));
        assert!(!bounds.outlives(&lt("a"), &lt("b")));
    }

    #[test]
    fn bound_through_struct_fields() {
        let structs = table(vec![sdef(
            "W",
            &[],
            vec![("f", SubjectType::shared(lt("b"), SubjectType::prim("i32")))],
        )]);
        let ty = SubjectType::shared(lt("c"), SubjectType::adt("W"));
        let bounds = derive_bounds(&[ty], &structs, 8);
        assert!(bounds.outlives(&lt("b"), &lt("c")));
    }

    #[test]
    fn bound_extracted_from_owned_container() {
        let structs = table(vec![sdef(
            "V",
            &[],
            vec![(
                "h",
                SubjectType::shared(
                    lt("a"),
                    SubjectType::shared(lt("b"), SubjectType::prim("i32")),
                ),
            )],
        )]);
        let bounds = derive_bounds(&[SubjectType::adt("V")], &structs, 8);
        assert!(bounds.outlives(&lt("b"), &lt("a")));
    }

    #[test]
    fn struct_annotation_bounds_the_outer_borrow() {
        // &'_ mut RowMut<'a, T> where RowMut's raw field binds 'a implies
        // 'a outlives '_.
        let structs = table(vec![StructDef {
            name: "RowMut".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }],
            fields: vec![(
                "ptr".into(),
                SubjectType::raw_unique(SubjectType::generic("T")),
            )],
            opaque: false,
        }]);
        let ty = SubjectType::unique(
            Lifetime::Anon(0),
            SubjectType::Adt {
                name: "RowMut".into(),
                lifetime_args: vec![lt("a")],
                type_args: vec![SubjectType::generic("T")],
            },
        );
        let bounds = derive_bounds(&[ty], &structs, 8);
        assert!(bounds.outlives(&lt("a"), &Lifetime::Anon(0)));
        assert!(!bounds.outlives(&Lifetime::Anon(0), &lt("a")));
    }

    #[test]
    fn no_relation_between_unconnected_arguments() {
        let structs = table(vec![sdef(
            "Bar",
            &[],
            vec![
                ("y", SubjectType::adt("String")),
                ("z", SubjectType::raw_unique(SubjectType::prim("i32"))),
            ],
        )]);
        let bounds = derive_bounds(
            &[
                SubjectType::unique(lt("a"), SubjectType::prim("i32")),
                SubjectType::unique(lt("b"), SubjectType::adt("Bar")),
            ],
            &structs,
            8,
        );
        assert!(!bounds.outlives(&lt("a"), &lt("b")));
        assert!(!bounds.outlives(&lt("b"), &lt("a")));
    }

    #[test]
    fn outlives_is_reflexive() {
        let empty = BoundSet::new();
        assert!(outlives(&empty, &lt("a"), &lt("a")));
        assert!(outlives(&empty, &Lifetime::Anon(3), &Lifetime::Anon(3)));
    }

    #[test]
    fn static_outlives_everything() {
        let empty = BoundSet::new();
        assert!(outlives(&empty, &Lifetime::Static, &lt("b")));
        assert!(outlives(&empty, &Lifetime::Static, &Lifetime::Anon(0)));
    }

    // The closure of {'a > '_} is just itself, so '_ does not outlive 'a.
    #[test]
    fn one_bound_does_not_imply_its_reverse() {
        let mut set = BoundSet::new();
        set.insert(lt("a"), Lifetime::Anon(0));
        set.close();
        assert_eq!(set.len(), 1);
        assert!(!outlives(&set, &Lifetime::Anon(0), &lt("a")));
        assert!(outlives(&set, &lt("a"), &Lifetime::Anon(0)));
    }

    #[test]
    fn closure_is_transitive() {
        let mut set = BoundSet::new();
        set.insert(lt("a"), lt("b"));
        set.insert(lt("b"), lt("c"));
        set.close();
        assert!(outlives(&set, &lt("a"), &lt("c")));
    }
}
