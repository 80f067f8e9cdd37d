//! Flow- and field-sensitive intra-procedural points-to analysis.
//!
//! The analysis seeds the source path with a fresh abstract location, runs a
//! single transfer pass over every statement of every block in reverse
//! postorder, and reports a may-flow when the seeded location is a member of
//! the target path's points-to set in the final environment. Sets only ever
//! grow (no strong updates). Each block is visited exactly once, so flows
//! that need a loop back edge are under-approximated by design.
//!
//! Keys are field-sensitive: `(base, field path)` where the base is either a
//! variable root or an abstract location. Dereferencing resolves through the
//! environment; dereferencing an empty set allocates a fresh location on both
//! read and write paths. Function calls are opaque: the locations reachable
//! from each pair of arguments are merged both ways, and the destination
//! receives the union of everything reachable from the arguments — but a
//! field of an argument takes part only if its key already exists in the
//! environment, unless the unknown-fields mode is enabled.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    Body, Operand, PathRoot, Place, Projection, Rvalue, Statement, StructTable, SubjectType,
    ValuePath,
};

/// Where an abstract location came from; kept for debugging output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocOrigin {
    SeededSource,
    FreshFromDeref(usize),
    ArgRoot(usize),
}

/// Base of a points-to key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Base {
    Var(PathRoot),
    Loc(u32),
}

/// A field-sensitive key: an l-value the analysis can track.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub base: Base,
    pub fields: Vec<String>,
}

impl Cell {
    fn var(root: PathRoot) -> Self {
        Cell {
            base: Base::Var(root),
            fields: Vec::new(),
        }
    }

    fn loc(id: u32) -> Self {
        Cell {
            base: Base::Loc(id),
            fields: Vec::new(),
        }
    }

    fn with_field(&self, name: &str, cap: usize) -> Self {
        let mut fields = self.fields.clone();
        // Deeper accesses collapse to the deepest tracked prefix.
        if fields.len() < cap {
            fields.push(name.to_string());
        }
        Cell {
            base: self.base.clone(),
            fields,
        }
    }
}

/// Configuration shared by one analysis run.
pub struct AliasContext<'a> {
    pub structs: &'a StructTable,
    /// Static types of path roots, used only to materialize declared fields
    /// in unknown-fields mode.
    pub root_types: BTreeMap<PathRoot, SubjectType>,
    /// Disable the unknown-field exclusion on calls.
    pub unknown_fields: bool,
    /// Cap on the field-path length of a key.
    pub max_field_depth: usize,
}

impl<'a> AliasContext<'a> {
    pub fn new(structs: &'a StructTable) -> Self {
        AliasContext {
            structs,
            root_types: BTreeMap::new(),
            unknown_fields: false,
            max_field_depth: 8,
        }
    }
}

/// The per-point points-to environment.
#[derive(Debug, Clone, Default)]
pub struct PointsToState {
    env: BTreeMap<Cell, BTreeSet<Cell>>,
    origins: Vec<LocOrigin>,
    stmt_index: usize,
}

impl PointsToState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn env(&self) -> &BTreeMap<Cell, BTreeSet<Cell>> {
        &self.env
    }

    fn alloc(&mut self, origin: LocOrigin) -> Cell {
        let id = self.origins.len() as u32;
        self.origins.push(origin);
        Cell::loc(id)
    }

    fn points_to(&self, cell: &Cell) -> BTreeSet<Cell> {
        self.env.get(cell).cloned().unwrap_or_default()
    }

    fn add(&mut self, cell: Cell, vals: impl IntoIterator<Item = Cell>) {
        self.env.entry(cell).or_default().extend(vals);
    }

    /// Resolves a place to the cells it denotes, allocating fresh locations
    /// when a deref finds an empty set.
    fn resolve(&mut self, place: &Place, ctx: &AliasContext, allocate: bool) -> Vec<Cell> {
        let mut cells = vec![Cell::var(place.root.clone())];
        for proj in &place.projections {
            match proj {
                Projection::Field(f) => {
                    cells = cells
                        .iter()
                        .map(|c| c.with_field(f, ctx.max_field_depth))
                        .collect();
                }
                Projection::Content(i) => {
                    let name = i.to_string();
                    cells = cells
                        .iter()
                        .map(|c| c.with_field(&name, ctx.max_field_depth))
                        .collect();
                }
                // Slice elements share the slice's storage.
                Projection::Index => {}
                Projection::Deref => {
                    let mut pointees: BTreeSet<Cell> = BTreeSet::new();
                    for c in &cells {
                        pointees.extend(self.points_to(c));
                    }
                    if pointees.is_empty() {
                        if !allocate {
                            return Vec::new();
                        }
                        let origin = match cells.first() {
                            Some(Cell {
                                base: Base::Var(PathRoot::Arg { index, .. }),
                                fields,
                            }) if fields.is_empty() => LocOrigin::ArgRoot(*index),
                            _ => LocOrigin::FreshFromDeref(self.stmt_index),
                        };
                        let fresh = self.alloc(origin);
                        for c in cells.clone() {
                            self.add(c, [fresh.clone()]);
                        }
                        pointees.insert(fresh);
                    }
                    cells = pointees.into_iter().collect();
                }
            }
        }
        cells
    }

    /// The value of a place: the union of its cells' points-to sets, plus the
    /// suffix map of already-tracked field extensions (so copying a struct
    /// copies its known fields).
    fn read_value(
        &mut self,
        place: &Place,
        ctx: &AliasContext,
    ) -> (BTreeSet<Cell>, Vec<(Vec<String>, BTreeSet<Cell>)>) {
        let cells = self.resolve(place, ctx, true);
        let mut direct = BTreeSet::new();
        let mut suffixes: Vec<(Vec<String>, BTreeSet<Cell>)> = Vec::new();
        for c in &cells {
            direct.extend(self.points_to(c));
            for (key, vals) in self.env.range(c.clone()..) {
                if key.base != c.base || !key.fields.starts_with(&c.fields) {
                    break;
                }
                if key.fields.len() > c.fields.len() {
                    suffixes.push((key.fields[c.fields.len()..].to_vec(), vals.clone()));
                }
            }
        }
        (direct, suffixes)
    }

    fn write_value(
        &mut self,
        dsts: &[Cell],
        direct: BTreeSet<Cell>,
        suffixes: Vec<(Vec<String>, BTreeSet<Cell>)>,
        cap: usize,
    ) {
        for d in dsts {
            self.add(d.clone(), direct.iter().cloned());
            for (ext, vals) in &suffixes {
                let mut cell = d.clone();
                for f in ext {
                    cell = cell.with_field(f, cap);
                }
                self.add(cell, vals.iter().cloned());
            }
        }
    }

    /// All cells transitively reachable from a call argument: the argument's
    /// own cells, their pointees, and field extensions. Field keys join only
    /// when already tracked, unless unknown-fields mode materializes the
    /// declared fields of a known struct type.
    fn reachable(&mut self, place: &Place, ctx: &AliasContext) -> Vec<Cell> {
        let start = self.resolve(place, ctx, true);
        let start_ty = place
            .root_type(ctx)
            .and_then(|rt| place_type(&rt, place, ctx.structs));
        let mut seen: BTreeSet<Cell> = BTreeSet::new();
        let mut work: Vec<(Cell, Option<SubjectType>)> = start
            .into_iter()
            .map(|c| (c, start_ty.clone()))
            .collect();
        while let Some((cell, ty)) = work.pop() {
            if !seen.insert(cell.clone()) {
                continue;
            }
            if seen.len() > 4096 {
                break;
            }
            // Pointees.
            let pointee_ty = ty.as_ref().and_then(deref_type);
            for p in self.points_to(&cell) {
                work.push((p, pointee_ty.clone()));
            }
            // Tracked field extensions.
            let existing: Vec<Cell> = self
                .env
                .keys()
                .filter(|k| {
                    k.base == cell.base
                        && k.fields.len() > cell.fields.len()
                        && k.fields.starts_with(&cell.fields)
                })
                .cloned()
                .collect();
            for e in existing {
                work.push((e, None));
            }
            // Unknown-fields mode: declared fields participate even when
            // never touched.
            if ctx.unknown_fields {
                if let Some(SubjectType::Adt {
                    name,
                    lifetime_args,
                    type_args,
                }) = &ty
                {
                    if let Some(def) = ctx.structs.get(name) {
                        for (fname, fty) in def.instantiated_fields(lifetime_args, type_args) {
                            let fcell = cell.with_field(&fname, ctx.max_field_depth);
                            self.env.entry(fcell.clone()).or_default();
                            work.push((fcell, Some(fty)));
                        }
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Applies one statement's effect. Sets only grow.
    pub fn transfer(&mut self, stmt: &Statement, ctx: &AliasContext) {
        self.stmt_index += 1;
        match stmt {
            Statement::Assign { dst, rv } => {
                let dcells = self.resolve(dst, ctx, true);
                match rv {
                    Rvalue::Use(src) => {
                        let (direct, suffixes) = self.read_value(src, ctx);
                        self.write_value(&dcells, direct, suffixes, ctx.max_field_depth);
                    }
                    Rvalue::RefTo { place, .. } => {
                        // `&*p` is `p` again.
                        if place.projections.last() == Some(&Projection::Deref) {
                            let mut inner = place.clone();
                            inner.projections.pop();
                            let (direct, suffixes) = self.read_value(&inner, ctx);
                            self.write_value(&dcells, direct, suffixes, ctx.max_field_depth);
                        } else {
                            let scells = self.resolve(place, ctx, true);
                            for d in &dcells {
                                self.add(d.clone(), scells.iter().cloned());
                            }
                        }
                    }
                    Rvalue::Aggregate { fields, .. } => {
                        for (fname, op) in fields {
                            if let Operand::Place(p) = op {
                                let (direct, suffixes) = self.read_value(p, ctx);
                                let fcells: Vec<Cell> = dcells
                                    .iter()
                                    .map(|d| d.with_field(fname, ctx.max_field_depth))
                                    .collect();
                                self.write_value(&fcells, direct, suffixes, ctx.max_field_depth);
                            }
                        }
                    }
                }
            }
            Statement::Call { dst, args, .. } => {
                let reach: Vec<Vec<Cell>> =
                    args.iter().map(|a| self.reachable(a, ctx)).collect();
                for i in 0..reach.len() {
                    for j in (i + 1)..reach.len() {
                        for x in &reach[i] {
                            for y in &reach[j] {
                                let mut u = self.points_to(x);
                                u.extend(self.points_to(y));
                                self.add(x.clone(), u.iter().cloned());
                                self.add(y.clone(), u);
                            }
                        }
                    }
                }
                let dcells = self.resolve(dst, ctx, true);
                let mut all = BTreeSet::new();
                for r in &reach {
                    for c in r {
                        all.extend(self.points_to(c));
                    }
                }
                for d in dcells {
                    self.add(d, all.iter().cloned());
                }
            }
            Statement::Return(Some(p)) => {
                let (direct, suffixes) = self.read_value(p, ctx);
                let ret = vec![Cell::var(PathRoot::Ret)];
                self.write_value(&ret, direct, suffixes, ctx.max_field_depth);
            }
            Statement::Return(None) => {}
        }
    }
}

trait RootTyped {
    fn root_type(&self, ctx: &AliasContext) -> Option<SubjectType>;
}

impl RootTyped for Place {
    fn root_type(&self, ctx: &AliasContext) -> Option<SubjectType> {
        ctx.root_types.get(&self.root).cloned()
    }
}

fn deref_type(ty: &SubjectType) -> Option<SubjectType> {
    match ty {
        SubjectType::SharedRef(_, inner)
        | SubjectType::UniqueRef(_, inner)
        | SubjectType::RawShared(inner)
        | SubjectType::RawUnique(inner) => Some((**inner).clone()),
        SubjectType::Slice(inner) => Some((**inner).clone()),
        _ => None,
    }
}

fn place_type(root_ty: &SubjectType, place: &Place, structs: &StructTable) -> Option<SubjectType> {
    place.type_check(root_ty, structs).ok()
}

/// Runs the analysis over `body` and reports whether a value stored at
/// `source` may reach `target`.
pub fn may_flow(body: &Body, source: &ValuePath, target: &ValuePath, structs: &StructTable) -> bool {
    may_flow_with(body, source, target, &AliasContext::new(structs))
}

/// [`may_flow`] with explicit configuration.
pub fn may_flow_with(
    body: &Body,
    source: &ValuePath,
    target: &ValuePath,
    ctx: &AliasContext,
) -> bool {
    let mut state = PointsToState::new();
    let seed = state.alloc(LocOrigin::SeededSource);
    let source_cells = state.resolve(source, ctx, true);
    for c in source_cells {
        state.add(c, [seed.clone()]);
    }
    for b in body.reverse_postorder() {
        for stmt in &body.blocks[b].statements {
            state.transfer(stmt, ctx);
        }
    }
    // Resolve the target through the final environment, without allocating.
    let mut cells = vec![Cell::var(target.root.clone())];
    for proj in &target.projections {
        match proj {
            Projection::Field(f) => {
                cells = cells
                    .iter()
                    .map(|c| c.with_field(f, ctx.max_field_depth))
                    .collect();
            }
            Projection::Content(i) => {
                let name = i.to_string();
                cells = cells
                    .iter()
                    .map(|c| c.with_field(&name, ctx.max_field_depth))
                    .collect();
            }
            Projection::Index => {}
            Projection::Deref => {
                let mut pointees = BTreeSet::new();
                for c in &cells {
                    pointees.extend(state.points_to(c));
                }
                if pointees.is_empty() {
                    return false;
                }
                cells = pointees.into_iter().collect();
            }
        }
    }
    // Membership check; an untracked field key falls back to its deepest
    // tracked prefix.
    for c in &cells {
        let set = if state.env.contains_key(c) {
            state.points_to(c)
        } else {
            let mut probe = c.clone();
            loop {
                if probe.fields.is_empty() {
                    break state.points_to(&probe);
                }
                probe.fields.pop();
                if state.env.contains_key(&probe) {
                    break state.points_to(&probe);
                }
            }
        };
        if set.contains(&seed) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Statement, StructDef};

    fn local(n: &str) -> ValuePath {
        ValuePath::local(n)
    }

    fn assign_use(dst: ValuePath, src: ValuePath) -> Statement {
        Statement::Assign {
            dst,
            rv: Rvalue::Use(src),
        }
    }

    fn assign_ref(dst: ValuePath, src: ValuePath) -> Statement {
        Statement::Assign {
            dst,
            rv: Rvalue::RefTo {
                place: src,
                mutable: true,
            },
        }
    }

    #[test]
    fn copy_merges_points_to_sets() {
        // c = a where a points at ℓ.
        let structs = StructTable::new();
        let ctx = AliasContext::new(&structs);
        let mut state = PointsToState::new();
        let l = state.alloc(LocOrigin::SeededSource);
        state.add(Cell::var(PathRoot::Local("a".into())), [l.clone()]);
        state.transfer(&assign_use(local("c"), local("a")), &ctx);
        assert!(state
            .points_to(&Cell::var(PathRoot::Local("c".into())))
            .contains(&l));
    }

    #[test]
    fn deref_write_through_empty_set_allocates() {
        // *p = b with S_p empty: p gains a fresh location whose set then
        // holds b's values.
        let structs = StructTable::new();
        let ctx = AliasContext::new(&structs);
        let mut state = PointsToState::new();
        let lb = state.alloc(LocOrigin::SeededSource);
        state.add(Cell::var(PathRoot::Local("b".into())), [lb.clone()]);
        state.transfer(&assign_use(local("p").deref(), local("b")), &ctx);
        let p_set = state.points_to(&Cell::var(PathRoot::Local("p".into())));
        assert_eq!(p_set.len(), 1);
        let fresh = p_set.into_iter().next().unwrap();
        assert!(state.points_to(&fresh).contains(&lb));
    }

    #[test]
    fn ref_then_copy_reaches_the_source() {
        // p = &x; q = p; value of x may reach *q.
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("p"), local("x")),
            assign_use(local("q"), local("p")),
        ]);
        assert!(may_flow(&body, &local("x"), &local("q").deref(), &structs));
        assert!(!may_flow(&body, &local("y"), &local("q").deref(), &structs));
    }

    #[test]
    fn reborrow_is_the_original_pointer() {
        // q = &*p is q = p.
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("p"), local("x")),
            assign_ref(local("q"), local("p").deref()),
        ]);
        assert!(may_flow(&body, &local("x"), &local("q").deref(), &structs));
    }

    #[test]
    fn struct_copy_carries_tracked_fields() {
        // t.f = &x; u = t; value of x reaches *(u.f).
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("t").field("f"), local("x")),
            assign_use(local("u"), local("t")),
        ]);
        assert!(may_flow(
            &body,
            &local("x"),
            &local("u").field("f").deref(),
            &structs
        ));
    }

    #[test]
    fn unknown_fields_are_not_linked_by_calls() {
        // r = f(a, b): with (a, .x) untracked there is no link between a.x
        // and b.
        let structs = StructTable::new();
        let ctx = AliasContext::new(&structs);
        let body = Body::straight_line(vec![
            Statement::Call {
                dst: local("r"),
                callee: "f".into(),
                args: vec![local("a"), local("b")],
            },
            assign_use(local("c"), local("a").field("x")),
        ]);
        let _ = ctx;
        assert!(!may_flow(
            &body,
            &local("b"),
            &local("c"),
            &structs
        ));
    }

    #[test]
    fn tracked_fields_are_linked_by_calls() {
        // Same shape, but a.x is tracked before the call.
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("a").field("x"), local("z")),
            Statement::Call {
                dst: local("r"),
                callee: "f".into(),
                args: vec![local("a"), local("b")],
            },
        ]);
        // b's value merges into the tracked key (a, .x).
        assert!(may_flow(
            &body,
            &local("b"),
            &local("a").field("x"),
            &structs
        ));
    }

    #[test]
    fn unknown_fields_mode_materializes_declared_fields() {
        let mut structs = StructTable::new();
        structs.insert(StructDef {
            name: "Pair".into(),
            lifetime_params: vec![],
            type_params: vec![],
            fields: vec![("x".into(), SubjectType::prim("i32"))],
            opaque: false,
        });
        let body = Body::straight_line(vec![Statement::Call {
            dst: local("r"),
            callee: "f".into(),
            args: vec![local("a"), local("b")],
        }]);
        let source = local("b");
        let target = local("a").field("x");
        // Excluded by default.
        let mut ctx = AliasContext::new(&structs);
        ctx.root_types
            .insert(PathRoot::Local("a".into()), SubjectType::adt("Pair"));
        assert!(!may_flow_with(&body, &source, &target, &ctx));
        ctx.unknown_fields = true;
        assert!(may_flow_with(&body, &source, &target, &ctx));
    }

    #[test]
    fn call_seeds_destination_with_reachable_sets() {
        // r = f(a): r may point at whatever a points at, transitively.
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("p"), local("x")),
            Statement::Call {
                dst: local("r"),
                callee: "f".into(),
                args: vec![local("p")],
            },
        ]);
        assert!(may_flow(&body, &local("x"), &local("r").deref(), &structs));
    }

    #[test]
    fn return_statement_assigns_the_return_slot() {
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("p"), local("x")),
            Statement::Return(Some(local("p"))),
        ]);
        let ret = ValuePath::root(PathRoot::Ret);
        assert!(may_flow(&body, &local("x"), &ret.deref(), &structs));
    }

    #[test]
    fn single_pass_misses_back_edge_flows() {
        // b0: p = &x; b1 (loop): q = r; r = p. A fixpoint analysis would
        // see x reach *q through the back edge; the single pass does not.
        let structs = StructTable::new();
        let body = Body {
            blocks: vec![
                crate::model::BasicBlock {
                    statements: vec![assign_ref(local("p"), local("x"))],
                    successors: vec![1],
                },
                crate::model::BasicBlock {
                    statements: vec![
                        assign_use(local("q"), local("r")),
                        assign_use(local("r"), local("p")),
                    ],
                    successors: vec![1, 2],
                },
                crate::model::BasicBlock::default(),
            ],
        };
        assert!(!may_flow(&body, &local("x"), &local("q").deref(), &structs));
        // The forward flow within the pass is still seen.
        assert!(may_flow(&body, &local("x"), &local("r").deref(), &structs));
    }

    #[test]
    fn union_only_growth() {
        let structs = StructTable::new();
        let ctx = AliasContext::new(&structs);
        let mut state = PointsToState::new();
        let seed = state.alloc(LocOrigin::SeededSource);
        state.add(Cell::var(PathRoot::Local("x".into())), [seed]);
        let stmts = vec![
            assign_ref(local("p"), local("x")),
            assign_use(local("q"), local("p")),
            assign_use(local("q").deref(), local("x")),
            assign_use(local("z"), local("q").deref()),
        ];
        for stmt in &stmts {
            let before = state.env.clone();
            state.transfer(stmt, &ctx);
            for (k, v) in &before {
                assert!(
                    state.points_to(k).is_superset(v),
                    "set shrank at {:?}",
                    k
                );
            }
        }
    }

    #[test]
    fn verdicts_are_deterministic() {
        let structs = StructTable::new();
        let body = Body::straight_line(vec![
            assign_ref(local("p"), local("x")),
            assign_use(local("q"), local("p")),
        ]);
        let a = may_flow(&body, &local("x"), &local("q").deref(), &structs);
        let b = may_flow(&body, &local("x"), &local("q").deref(), &structs);
        assert_eq!(a, b);
    }
}
