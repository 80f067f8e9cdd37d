//! Core model of the analyzed language: lifetimes, types, struct table,
//! function signatures, value paths and the basic-block body IR.
//!
//! Everything here is immutable once built; the later pipeline stages only
//! read these structures.

use std::collections::BTreeMap;
use std::fmt;

/// Sentinel struct name the parser leaves on an unresolved `self` parameter.
pub const SELF_SENTINEL: &str = "Self";

/// A lifetime label.
///
/// `Anon` covers both an explicit `'_` and a lifetime introduced by elision
/// expansion; ids are unique within one function model. `Elided` is a
/// placeholder for a lifetime omitted in source and must not survive past
/// [`crate::parse::expand_elision`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lifetime {
    Named(String),
    Static,
    Anon(u32),
    Elided(u32),
}

impl Lifetime {
    pub fn named(s: &str) -> Self {
        Lifetime::Named(s.to_string())
    }

    pub fn is_elided(&self) -> bool {
        matches!(self, Lifetime::Elided(_))
    }
}

impl fmt::Display for Lifetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lifetime::Named(n) => write!(f, "'{}", n),
            Lifetime::Static => write!(f, "'static"),
            Lifetime::Anon(_) => write!(f, "'_"),
            Lifetime::Elided(_) => write!(f, "'?"),
        }
    }
}

/// A type of the analyzed language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubjectType {
    /// `&'l T`
    SharedRef(Lifetime, Box<SubjectType>),
    /// `&'l mut T`
    UniqueRef(Lifetime, Box<SubjectType>),
    /// `*const T` — carries no lifetime.
    RawShared(Box<SubjectType>),
    /// `*mut T` — carries no lifetime.
    RawUnique(Box<SubjectType>),
    /// A named struct (or external/opaque type), possibly instantiated.
    Adt {
        name: String,
        lifetime_args: Vec<Lifetime>,
        type_args: Vec<SubjectType>,
    },
    /// `[T]`
    Slice(Box<SubjectType>),
    /// A type parameter together with its declared lifetime bounds.
    Generic {
        name: String,
        lifetime_bounds: Vec<Lifetime>,
    },
    /// A primitive type (`i32`, `usize`, `bool`, ...).
    Prim(String),
}

impl SubjectType {
    pub fn shared(l: Lifetime, inner: SubjectType) -> Self {
        SubjectType::SharedRef(l, Box::new(inner))
    }

    pub fn unique(l: Lifetime, inner: SubjectType) -> Self {
        SubjectType::UniqueRef(l, Box::new(inner))
    }

    pub fn raw_shared(inner: SubjectType) -> Self {
        SubjectType::RawShared(Box::new(inner))
    }

    pub fn raw_unique(inner: SubjectType) -> Self {
        SubjectType::RawUnique(Box::new(inner))
    }

    pub fn adt(name: &str) -> Self {
        SubjectType::Adt {
            name: name.to_string(),
            lifetime_args: Vec::new(),
            type_args: Vec::new(),
        }
    }

    pub fn prim(name: &str) -> Self {
        SubjectType::Prim(name.to_string())
    }

    pub fn generic(name: &str) -> Self {
        SubjectType::Generic {
            name: name.to_string(),
            lifetime_bounds: Vec::new(),
        }
    }

    pub fn is_raw(&self) -> bool {
        matches!(self, SubjectType::RawShared(_) | SubjectType::RawUnique(_))
    }

    pub fn is_ref(&self) -> bool {
        matches!(self, SubjectType::SharedRef(..) | SubjectType::UniqueRef(..))
    }

    /// All lifetimes mentioned anywhere in the type, in traversal order.
    pub fn lifetimes(&self) -> Vec<Lifetime> {
        let mut out = Vec::new();
        self.collect_lifetimes(&mut out);
        out
    }

    fn collect_lifetimes(&self, out: &mut Vec<Lifetime>) {
        match self {
            SubjectType::SharedRef(l, inner) | SubjectType::UniqueRef(l, inner) => {
                out.push(l.clone());
                inner.collect_lifetimes(out);
            }
            SubjectType::RawShared(inner)
            | SubjectType::RawUnique(inner)
            | SubjectType::Slice(inner) => inner.collect_lifetimes(out),
            SubjectType::Adt {
                lifetime_args,
                type_args,
                ..
            } => {
                out.extend(lifetime_args.iter().cloned());
                for t in type_args {
                    t.collect_lifetimes(out);
                }
            }
            SubjectType::Generic { .. } | SubjectType::Prim(_) => {}
        }
    }

    /// Rewrites every lifetime in the type through `f`.
    pub fn map_lifetimes(&self, f: &mut impl FnMut(&Lifetime) -> Lifetime) -> SubjectType {
        match self {
            SubjectType::SharedRef(l, inner) => {
                SubjectType::SharedRef(f(l), Box::new(inner.map_lifetimes(f)))
            }
            SubjectType::UniqueRef(l, inner) => {
                SubjectType::UniqueRef(f(l), Box::new(inner.map_lifetimes(f)))
            }
            SubjectType::RawShared(inner) => {
                SubjectType::RawShared(Box::new(inner.map_lifetimes(f)))
            }
            SubjectType::RawUnique(inner) => {
                SubjectType::RawUnique(Box::new(inner.map_lifetimes(f)))
            }
            SubjectType::Slice(inner) => SubjectType::Slice(Box::new(inner.map_lifetimes(f))),
            SubjectType::Adt {
                name,
                lifetime_args,
                type_args,
            } => SubjectType::Adt {
                name: name.clone(),
                lifetime_args: lifetime_args.iter().map(|l| f(l)).collect(),
                type_args: type_args.iter().map(|t| t.map_lifetimes(f)).collect(),
            },
            SubjectType::Generic {
                name,
                lifetime_bounds,
            } => SubjectType::Generic {
                name: name.clone(),
                lifetime_bounds: lifetime_bounds.iter().map(|l| f(l)).collect(),
            },
            SubjectType::Prim(_) => self.clone(),
        }
    }

    /// Substitutes struct parameters: lifetime names and generic names against
    /// the given argument lists.
    pub fn substitute(
        &self,
        lifetime_params: &[String],
        lifetime_args: &[Lifetime],
        type_params: &[String],
        type_args: &[SubjectType],
    ) -> SubjectType {
        match self {
            SubjectType::Generic { name, .. } => {
                if let Some(i) = type_params.iter().position(|p| p == name) {
                    if let Some(arg) = type_args.get(i) {
                        return arg.clone();
                    }
                }
                self.clone()
            }
            SubjectType::SharedRef(l, inner) => SubjectType::SharedRef(
                subst_lifetime(l, lifetime_params, lifetime_args),
                Box::new(inner.substitute(lifetime_params, lifetime_args, type_params, type_args)),
            ),
            SubjectType::UniqueRef(l, inner) => SubjectType::UniqueRef(
                subst_lifetime(l, lifetime_params, lifetime_args),
                Box::new(inner.substitute(lifetime_params, lifetime_args, type_params, type_args)),
            ),
            SubjectType::RawShared(inner) => SubjectType::RawShared(Box::new(
                inner.substitute(lifetime_params, lifetime_args, type_params, type_args),
            )),
            SubjectType::RawUnique(inner) => SubjectType::RawUnique(Box::new(
                inner.substitute(lifetime_params, lifetime_args, type_params, type_args),
            )),
            SubjectType::Slice(inner) => SubjectType::Slice(Box::new(
                inner.substitute(lifetime_params, lifetime_args, type_params, type_args),
            )),
            SubjectType::Adt {
                name,
                lifetime_args: las,
                type_args: tas,
            } => SubjectType::Adt {
                name: name.clone(),
                lifetime_args: las
                    .iter()
                    .map(|l| subst_lifetime(l, lifetime_params, lifetime_args))
                    .collect(),
                type_args: tas
                    .iter()
                    .map(|t| t.substitute(lifetime_params, lifetime_args, type_params, type_args))
                    .collect(),
            },
            SubjectType::Prim(_) => self.clone(),
        }
    }
}

fn subst_lifetime(l: &Lifetime, params: &[String], args: &[Lifetime]) -> Lifetime {
    if let Lifetime::Named(n) = l {
        if let Some(i) = params.iter().position(|p| p == n) {
            if let Some(arg) = args.get(i) {
                return arg.clone();
            }
        }
    }
    l.clone()
}

impl fmt::Display for SubjectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubjectType::SharedRef(l, inner) => write!(f, "&{} {}", l, inner),
            SubjectType::UniqueRef(l, inner) => write!(f, "&{} mut {}", l, inner),
            SubjectType::RawShared(inner) => write!(f, "*const {}", inner),
            SubjectType::RawUnique(inner) => write!(f, "*mut {}", inner),
            SubjectType::Slice(inner) => write!(f, "[{}]", inner),
            SubjectType::Adt {
                name,
                lifetime_args,
                type_args,
            } => {
                write!(f, "{}", name)?;
                if !lifetime_args.is_empty() || !type_args.is_empty() {
                    write!(f, "<")?;
                    let mut first = true;
                    for l in lifetime_args {
                        if !first {
                            write!(f, ", ")?;
                        }
                        first = false;
                        write!(f, "{}", l)?;
                    }
                    for t in type_args {
                        if !first {
                            write!(f, ", ")?;
                        }
                        first = false;
                        write!(f, "{}", t)?;
                    }
                    write!(f, ">")?;
                }
                Ok(())
            }
            SubjectType::Generic { name, .. } => write!(f, "{}", name),
            SubjectType::Prim(name) => write!(f, "{}", name),
        }
    }
}

/// Policy knobs for [`type_equal`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MatchPolicy {
    /// When set, a `Generic` carrying at least one lifetime bound matches any
    /// type.
    pub generic_wildcard: bool,
}

/// Structural type equality, ignoring lifetime labels.
///
/// Lifetimes are compared separately by the pattern checker through the facts'
/// `borrowed_for` field, so `&'a T` and `&'b T` are the same type here.
pub fn type_equal(t1: &SubjectType, t2: &SubjectType, policy: MatchPolicy) -> bool {
    if policy.generic_wildcard {
        let wild = |t: &SubjectType| {
            matches!(t, SubjectType::Generic { lifetime_bounds, .. } if !lifetime_bounds.is_empty())
        };
        if wild(t1) || wild(t2) {
            return true;
        }
    }
    match (t1, t2) {
        (SubjectType::SharedRef(_, a), SubjectType::SharedRef(_, b))
        | (SubjectType::UniqueRef(_, a), SubjectType::UniqueRef(_, b))
        | (SubjectType::RawShared(a), SubjectType::RawShared(b))
        | (SubjectType::RawUnique(a), SubjectType::RawUnique(b))
        | (SubjectType::Slice(a), SubjectType::Slice(b)) => type_equal(a, b, policy),
        (
            SubjectType::Adt {
                name: n1,
                type_args: a1,
                ..
            },
            SubjectType::Adt {
                name: n2,
                type_args: a2,
                ..
            },
        ) => {
            n1 == n2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| type_equal(x, y, policy))
        }
        (SubjectType::Generic { name: n1, .. }, SubjectType::Generic { name: n2, .. }) => n1 == n2,
        (SubjectType::Prim(n1), SubjectType::Prim(n2)) => n1 == n2,
        _ => false,
    }
}

/// One declared type parameter, together with any `T: 'a` lifetime bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeParam {
    pub name: String,
    pub lifetime_bounds: Vec<Lifetime>,
}

/// A struct declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructDef {
    pub name: String,
    pub lifetime_params: Vec<String>,
    pub type_params: Vec<TypeParam>,
    /// Field name -> type, in declaration order.
    pub fields: Vec<(String, SubjectType)>,
    /// True when the definition is unknown (external dependency); such a
    /// struct decomposes to nothing beyond itself.
    pub opaque: bool,
}

impl StructDef {
    /// Field types with the struct's parameters replaced by the given
    /// instantiation arguments.
    pub fn instantiated_fields(
        &self,
        lifetime_args: &[Lifetime],
        type_args: &[SubjectType],
    ) -> Vec<(String, SubjectType)> {
        let type_param_names: Vec<String> =
            self.type_params.iter().map(|p| p.name.clone()).collect();
        self.fields
            .iter()
            .map(|(n, t)| {
                (
                    n.clone(),
                    t.substitute(&self.lifetime_params, lifetime_args, &type_param_names, type_args),
                )
            })
            .collect()
    }
}

/// Table of declared structs; lookups that miss are treated as opaque types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructTable {
    defs: BTreeMap<String, StructDef>,
}

impl StructTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, def: StructDef) {
        self.defs.insert(def.name.clone(), def);
    }

    pub fn get(&self, name: &str) -> Option<&StructDef> {
        self.defs.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &StructDef> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

/// Root of a value path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathRoot {
    /// A positional argument; the name is kept for rendering only.
    Arg { index: usize, name: String },
    SelfArg,
    Ret,
    Local(String),
}

impl PathRoot {
    pub fn display_name(&self) -> &str {
        match self {
            PathRoot::Arg { name, .. } => name,
            PathRoot::SelfArg => "self",
            PathRoot::Ret => "ret",
            PathRoot::Local(n) => n,
        }
    }
}

/// One projection step applied to a path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Projection {
    /// `*p` — only valid on reference and raw address types.
    Deref,
    /// `.field` — only valid on a declared struct.
    Field(String),
    /// A slice element.
    Index,
    /// The i-th type argument's content of an opaque container type.
    Content(usize),
}

/// A value access path: a root plus projections.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuePath {
    pub root: PathRoot,
    pub projections: Vec<Projection>,
}

impl ValuePath {
    pub fn root(root: PathRoot) -> Self {
        ValuePath {
            root,
            projections: Vec::new(),
        }
    }

    pub fn local(name: &str) -> Self {
        ValuePath::root(PathRoot::Local(name.to_string()))
    }

    pub fn push(&self, p: Projection) -> Self {
        let mut projections = self.projections.clone();
        projections.push(p);
        ValuePath {
            root: self.root.clone(),
            projections,
        }
    }

    pub fn deref(&self) -> Self {
        self.push(Projection::Deref)
    }

    pub fn field(&self, name: &str) -> Self {
        self.push(Projection::Field(name.to_string()))
    }

    /// Renders the path the way it would be written in source.
    ///
    /// A deref of `self` that is immediately followed by a field access is
    /// folded into auto-deref style (`self.head` rather than `(*self).head`).
    pub fn render(&self) -> String {
        let mut s = self.root.display_name().to_string();
        let projs = &self.projections;
        for (i, p) in projs.iter().enumerate() {
            match p {
                Projection::Deref => {
                    let folds = self.root == PathRoot::SelfArg
                        && i == 0
                        && matches!(projs.get(1), Some(Projection::Field(_)));
                    if folds {
                        continue;
                    }
                    if s.chars().all(|c| c.is_alphanumeric() || c == '_') || s.starts_with('(') {
                        s = format!("*{}", s);
                    } else {
                        s = format!("*({})", s);
                    }
                }
                Projection::Field(name) => {
                    if s.starts_with('*') {
                        s = format!("({}).{}", s, name);
                    } else {
                        s = format!("{}.{}", s, name);
                    }
                }
                Projection::Index => {
                    if s.starts_with('*') {
                        s = format!("({})[..]", s);
                    } else {
                        s = format!("{}[..]", s);
                    }
                }
                Projection::Content(i) => {
                    if s.starts_with('*') {
                        s = format!("({}).{}", s, i);
                    } else {
                        s = format!("{}.{}", s, i);
                    }
                }
            }
        }
        s
    }

    /// Checks the projection chain against the root's type and returns the
    /// type of the addressed value.
    pub fn type_check(
        &self,
        root_ty: &SubjectType,
        structs: &StructTable,
    ) -> Result<SubjectType, PathTypeError> {
        let mut cur = root_ty.clone();
        for p in &self.projections {
            cur = match (p, &cur) {
                (Projection::Deref, SubjectType::SharedRef(_, inner))
                | (Projection::Deref, SubjectType::UniqueRef(_, inner))
                | (Projection::Deref, SubjectType::RawShared(inner))
                | (Projection::Deref, SubjectType::RawUnique(inner)) => (**inner).clone(),
                (Projection::Index, SubjectType::Slice(inner)) => (**inner).clone(),
                (
                    Projection::Field(name),
                    SubjectType::Adt {
                        name: adt,
                        lifetime_args,
                        type_args,
                    },
                ) => {
                    let def = structs.get(adt).ok_or_else(|| PathTypeError {
                        path: self.render(),
                        message: format!("field access `{}` on opaque type {}", name, adt),
                    })?;
                    def.instantiated_fields(lifetime_args, type_args)
                        .into_iter()
                        .find(|(n, _)| n == name)
                        .map(|(_, t)| t)
                        .ok_or_else(|| PathTypeError {
                            path: self.render(),
                            message: format!("no field `{}` on struct {}", name, adt),
                        })?
                }
                (Projection::Content(i), SubjectType::Adt { name, type_args, .. }) => type_args
                    .get(*i)
                    .cloned()
                    .ok_or_else(|| PathTypeError {
                        path: self.render(),
                        message: format!("{} has no type argument #{}", name, i),
                    })?,
                (p, t) => {
                    return Err(PathTypeError {
                        path: self.render(),
                        message: format!("projection {:?} does not apply to {}", p, t),
                    })
                }
            };
        }
        Ok(cur)
    }
}

impl fmt::Display for ValuePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathTypeError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for PathTypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for PathTypeError {}

/// A lexical span in the scanned file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub start_line: u32,
    pub end_line: u32,
}

/// The impl block a method belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplContext {
    pub struct_name: String,
    pub trait_name: Option<String>,
    pub lifetime_args: Vec<Lifetime>,
    pub type_args: Vec<SubjectType>,
}

/// A function parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: SubjectType,
    pub is_self: bool,
}

/// A parsed function signature plus its (optionally lowered) body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionModel {
    pub name: String,
    pub impl_of: Option<ImplContext>,
    /// Lifetime parameters in scope: the impl's followed by the function's.
    pub lifetime_params: Vec<String>,
    /// Type parameters in scope, with any declared lifetime bounds.
    pub type_params: Vec<TypeParam>,
    pub params: Vec<Param>,
    pub return_type: Option<SubjectType>,
    /// `where G: 'l` bounds.
    pub where_bounds: Vec<(String, Lifetime)>,
    pub body: Option<Body>,
    pub span: Span,
}

impl FunctionModel {
    pub fn path_root(&self, index: usize) -> PathRoot {
        let p = &self.params[index];
        if p.is_self {
            PathRoot::SelfArg
        } else {
            PathRoot::Arg {
                index,
                name: p.name.clone(),
            }
        }
    }
}

/// Errors raised while finishing a function model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    UnknownStruct { name: String, function: String },
    UndeclaredLifetime { lifetime: String, function: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownStruct { name, function } => {
                write!(f, "impl of undeclared struct `{}` in fn {}", name, function)
            }
            ModelError::UndeclaredLifetime { lifetime, function } => {
                write!(f, "undeclared lifetime '{} in fn {}", lifetime, function)
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Expands the declared `self` parameter of a method to its concrete type.
///
/// The parser leaves `self` typed as (a reference to) the [`SELF_SENTINEL`]
/// struct; this replaces the sentinel with the impl's struct instantiated with
/// the impl's own lifetime and type arguments. Free functions are returned
/// unchanged.
pub fn resolve_self(
    mut func: FunctionModel,
    structs: &StructTable,
) -> Result<FunctionModel, ModelError> {
    let Some(ctx) = func.impl_of.clone() else {
        return Ok(func);
    };
    if structs.get(&ctx.struct_name).is_none() {
        return Err(ModelError::UnknownStruct {
            name: ctx.struct_name.clone(),
            function: func.name.clone(),
        });
    }
    let concrete = SubjectType::Adt {
        name: ctx.struct_name.clone(),
        lifetime_args: ctx.lifetime_args.clone(),
        type_args: ctx.type_args.clone(),
    };
    for p in &mut func.params {
        if p.is_self {
            p.ty = replace_self_sentinel(&p.ty, &concrete);
        }
    }
    Ok(func)
}

fn replace_self_sentinel(ty: &SubjectType, concrete: &SubjectType) -> SubjectType {
    match ty {
        SubjectType::Adt { name, .. } if name == SELF_SENTINEL => concrete.clone(),
        SubjectType::SharedRef(l, inner) => SubjectType::SharedRef(
            l.clone(),
            Box::new(replace_self_sentinel(inner, concrete)),
        ),
        SubjectType::UniqueRef(l, inner) => SubjectType::UniqueRef(
            l.clone(),
            Box::new(replace_self_sentinel(inner, concrete)),
        ),
        _ => ty.clone(),
    }
}

// ---------------------------------------------------------------------------
// Body IR
// ---------------------------------------------------------------------------

/// A place is a value path whose root is a local, argument, `self` or the
/// return slot.
pub type Place = ValuePath;

/// Right-hand side of an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rvalue {
    Use(Place),
    RefTo { place: Place, mutable: bool },
    Aggregate { adt: String, fields: Vec<(String, Operand)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Place(Place),
    Const,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Assign { dst: Place, rv: Rvalue },
    Call { dst: Place, callee: String, args: Vec<Place> },
    Return(Option<Place>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BasicBlock {
    pub statements: Vec<Statement>,
    pub successors: Vec<usize>,
}

/// A function body lowered to basic blocks. Block 0 is the entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Body {
    pub blocks: Vec<BasicBlock>,
}

impl Body {
    /// A single-block straight-line body.
    pub fn straight_line(statements: Vec<Statement>) -> Self {
        Body {
            blocks: vec![BasicBlock {
                statements,
                successors: Vec::new(),
            }],
        }
    }

    /// Block indices in reverse postorder from the entry block.
    pub fn reverse_postorder(&self) -> Vec<usize> {
        let mut visited = vec![false; self.blocks.len()];
        let mut post = Vec::new();
        if !self.blocks.is_empty() {
            self.postorder(0, &mut visited, &mut post);
        }
        post.reverse();
        post
    }

    fn postorder(&self, b: usize, visited: &mut Vec<bool>, post: &mut Vec<usize>) {
        if visited[b] {
            return;
        }
        visited[b] = true;
        for &s in &self.blocks[b].successors {
            if s < self.blocks.len() {
                self.postorder(s, visited, post);
            }
        }
        post.push(b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> MatchPolicy {
        MatchPolicy::default()
    }

    #[test]
    fn identical_prims_are_equal() {
        assert!(type_equal(
            &SubjectType::prim("i32"),
            &SubjectType::prim("i32"),
            policy()
        ));
    }

    #[test]
    fn different_constructors_are_not_equal() {
        assert!(!type_equal(
            &SubjectType::raw_unique(SubjectType::prim("i32")),
            &SubjectType::prim("i32"),
            policy()
        ));
    }

    #[test]
    fn adts_compare_by_name_ignoring_lifetimes() {
        let a = SubjectType::Adt {
            name: "String".into(),
            lifetime_args: vec![Lifetime::named("a")],
            type_args: vec![],
        };
        let b = SubjectType::Adt {
            name: "String".into(),
            lifetime_args: vec![Lifetime::named("b")],
            type_args: vec![],
        };
        assert!(type_equal(&a, &b, policy()));
    }

    #[test]
    fn refs_with_different_lifetimes_are_equal() {
        let a = SubjectType::unique(Lifetime::named("a"), SubjectType::prim("i32"));
        let b = SubjectType::unique(Lifetime::named("b"), SubjectType::prim("i32"));
        assert!(type_equal(&a, &b, policy()));
        let c = SubjectType::shared(Lifetime::named("a"), SubjectType::prim("i32"));
        assert!(!type_equal(&a, &c, policy()));
    }

    #[test]
    fn bounded_generic_is_a_wildcard_only_under_policy() {
        let g = SubjectType::Generic {
            name: "F".into(),
            lifetime_bounds: vec![Lifetime::named("c")],
        };
        let raw = SubjectType::raw_unique(SubjectType::adt("sqlite3"));
        assert!(!type_equal(&g, &raw, policy()));
        assert!(type_equal(
            &g,
            &raw,
            MatchPolicy {
                generic_wildcard: true
            }
        ));
        // An unbounded generic never acts as a wildcard.
        let u = SubjectType::generic("G");
        assert!(!type_equal(
            &u,
            &raw,
            MatchPolicy {
                generic_wildcard: true
            }
        ));
    }

    #[test]
    fn slice_is_distinct_from_its_element() {
        let s = SubjectType::Slice(Box::new(SubjectType::prim("i32")));
        assert!(!type_equal(&s, &SubjectType::prim("i32"), policy()));
        assert!(type_equal(&s, &s, policy()));
    }

    fn arg(idx: usize, name: &str) -> ValuePath {
        ValuePath::root(PathRoot::Arg {
            index: idx,
            name: name.into(),
        })
    }

    #[test]
    fn paths_render_like_the_source_language() {
        assert_eq!(arg(0, "arg1").deref().render(), "*arg1");
        assert_eq!(arg(1, "arg2").deref().field("y").render(), "(*arg2).y");
        assert_eq!(
            arg(1, "arg2").deref().field("z").deref().render(),
            "*(*arg2).z"
        );
        let ret = ValuePath::root(PathRoot::Ret);
        assert_eq!(ret.field("x").deref().render(), "*(ret.x)");
        assert_eq!(ret.field("w").deref().render(), "*(ret.w)");
        let slf = ValuePath::root(PathRoot::SelfArg);
        assert_eq!(slf.deref().field("head").render(), "self.head");
        assert_eq!(slf.deref().field("head").deref().render(), "*(self.head)");
        assert_eq!(slf.deref().render(), "*self");
        assert_eq!(
            slf.deref().field("row").field("ptr").render(),
            "self.row.ptr"
        );
        assert_eq!(ret.deref().push(Projection::Index).render(), "(*ret)[..]");
    }

    #[test]
    fn path_type_check_walks_struct_fields() {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "Bar".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![
                ("y".into(), SubjectType::adt("String")),
                ("z".into(), SubjectType::raw_unique(SubjectType::prim("i32"))),
            ],
            opaque: false,
        });
        let root_ty = SubjectType::unique(Lifetime::named("b"), SubjectType::adt("Bar"));
        let p = arg(1, "arg2").deref().field("z").deref();
        assert_eq!(
            p.type_check(&root_ty, &structs).unwrap(),
            SubjectType::prim("i32")
        );
        let bad = arg(1, "arg2").deref().field("nope");
        assert!(bad.type_check(&root_ty, &structs).is_err());
        // Deref applies only to references and raw address types.
        let owned = arg(0, "x");
        assert!(owned
            .deref()
            .type_check(&SubjectType::prim("i32"), &structs)
            .is_err());
    }

    #[test]
    fn resolve_self_expands_the_receiver() {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "RowMut".into(),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }],
            fields: vec![],
            opaque: false,
        });
        let func = FunctionModel {
            name: "raw_slice_mut".into(),
            impl_of: Some(ImplContext {
                struct_name: "RowMut".into(),
                trait_name: None,
                lifetime_args: vec![Lifetime::named("a")],
                type_args: vec![SubjectType::generic("T")],
            }),
            lifetime_params: vec!["a".into()],
            type_params: vec![TypeParam { name: "T".into(), lifetime_bounds: vec![] }],
            }],
            params: vec![Param {
                name: "self".into(),
                ty: SubjectType::unique(Lifetime::Anon(0), SubjectType::adt(SELF_SENTINEL)),
                is_self: true,
            }],
            return_type: None,
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let resolved = resolve_self(func, &structs).unwrap();
        assert_eq!(
            resolved.params[0].ty,
            SubjectType::unique(
                Lifetime::Anon(0),
                SubjectType::Adt {
                    name: "RowMut".into(),
                    lifetime_args: vec![Lifetime::named("a")],
                    type_args: vec![SubjectType::generic("T")],
                }
            )
        );
    }

    #[test]
    fn resolve_self_rejects_unknown_structs() {
        let structs = StructTable::new();
        let func = FunctionModel {
            name: "m".into(),
            impl_of: Some(ImplContext {
                struct_name: "Ghost".into(),
                trait_name: None,
                lifetime_args: vec![],
                type_args: vec![],
            }),
            lifetime_params: vec![],
            type_params: vec![],
            params: vec![],
            return_type: None,
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        assert!(matches!(
            resolve_self(func, &structs),
            Err(ModelError::UnknownStruct { .. })
        ));
    }

    #[test]
    fn free_functions_pass_through_resolve_self() {
        let func = FunctionModel {
            name: "free".into(),
            impl_of: None,
            lifetime_params: vec![],
            type_params: vec![],
            params: vec![],
            return_type: None,
            where_bounds: vec![],
            body: None,
            span: Span::default(),
        };
        let same = resolve_self(func.clone(), &StructTable::new()).unwrap();
        assert_eq!(same, func);
    }

    #[test]
    fn reverse_postorder_visits_entry_first() {
        let body = Body {
            blocks: vec![
                BasicBlock {
                    statements: vec![],
                    successors: vec![1, 2],
                },
                BasicBlock {
                    statements: vec![],
                    successors: vec![3],
                },
                BasicBlock {
                    statements: vec![],
                    successors: vec![3],
                },
                BasicBlock::default(),
            ],
        };
        let rpo = body.reverse_postorder();
        assert_eq!(rpo[0], 0);
        assert_eq!(rpo.len(), 4);
        assert_eq!(*rpo.last().unwrap(), 3);
    }
}
