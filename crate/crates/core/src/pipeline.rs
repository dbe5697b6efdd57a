//! End-to-end computation for one cycle, and the comparison of two cycles.
//!
//! Reports are plain serde structs so that the text and JSON renderings come
//! from the same data.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianError, GroupElement};
use crate::braid::BraidError;
use crate::curve::{BezoutPair, CurveCombinatorics, CurveError};
use crate::fixture::{FixtureDocument, FixtureError};
use crate::invariant::{
    epsilon_signature, i_invariant, indeterminacy_subgroup, inner_cyclic_equivalence_check, is_ternary, linking_set, zariski_test,
    InvariantError, LinkingCase, LinkingSet, QuotientContext, Verdict, ZariskiOptions,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("{context}: {source}")]
    Invariant { context: String, source: InvariantError },
    #[error("no cycle named `{0}`")]
    NoSuchCycle(String),
}

impl PipelineError {
    fn at(context: impl Into<String>) -> impl FnOnce(InvariantError) -> PipelineError {
        let context = context.into();
        move |source| PipelineError::Invariant { context, source }
    }

    /// Whether the error signals a broken internal invariant rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            PipelineError::Invariant {
                source: InvariantError::Internal(_)
                    | InvariantError::Braid(BraidError::OddCrossingSum { .. })
                    | InvariantError::Group(AbelianError::Overflow(_)),
                ..
            }
        )
    }
}

fn curve_err(context: &str) -> impl Fn(CurveError) -> PipelineError + '_ {
    move |e| PipelineError::Invariant { context: context.to_string(), source: e.into() }
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Skip the Bezout check on the (completed) combinatorics.
    pub skip_bezout: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedClass {
    pub name: String,
    pub value: String,
    pub coefficients: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkingSetReport {
    pub case: LinkingCase,
    pub offset: String,
    pub subgroup_generators: Vec<String>,
    pub zero_excluded: bool,
    pub kernel_witness: Option<Vec<i64>>,
    /// Members when the set is finite, each as `[representative]`.
    pub members: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub element: String,
    pub counts: [usize; 3],
    /// Smallest cyclic rotation of `counts`.
    pub class: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerCyclicReport {
    pub quotient_nontrivial: bool,
    pub modulus: i64,
    pub characters_checked: u64,
    /// Witness character, one value in `Z_modulus` per line.
    pub witness: Option<Vec<i64>>,
    /// `xi_*([gamma])` for the witness, when the cycle's class is known.
    pub i_value: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub curve: String,
    pub cycle: String,
    pub deleted: Vec<String>,
    pub components: Vec<String>,
    pub singular_points: usize,
    pub bezout: Vec<BezoutPair>,
    pub walk: Vec<String>,
    pub internal_support: Vec<String>,
    pub support: Vec<String>,
    pub generators: Vec<String>,
    pub h1_complement: String,
    pub indeterminacy: Vec<String>,
    pub quotient: String,
    pub invariant_factors: Vec<i64>,
    pub contractible: bool,
    pub cycle_class: Option<NamedClass>,
    pub basis: Vec<NamedClass>,
    pub linking_set: LinkingSetReport,
    pub epsilon: Option<Vec<EpsilonRow>>,
    pub inner_cyclic: Option<InnerCyclicReport>,
    pub notes: Vec<String>,
}

/// Everything computed for one cycle, plus its report.
#[derive(Clone, Debug)]
pub struct Computation {
    pub context: QuotientContext,
    pub basis: Vec<(String, GroupElement)>,
    pub cycle_class: Option<GroupElement>,
    pub linking_set: LinkingSet,
    pub report: Report,
}

/// The curve a computation runs on: completed combinatorics minus `deleted`.
pub fn prepared_curve<S: AsRef<str>>(doc: &FixtureDocument, deleted: &[S], opts: &PipelineOptions) -> Result<CurveCombinatorics> {
    let ctx = "curve";
    let curve = doc.curve().map_err(curve_err(ctx))?;
    let curve = curve.without_components(deleted).map_err(curve_err(ctx))?;
    if !opts.skip_bezout {
        curve.validate_bezout().map_err(curve_err(ctx))?;
    }
    Ok(curve)
}

pub fn compute<S: AsRef<str>>(doc: &FixtureDocument, cycle_name: &str, deleted: &[S], opts: &PipelineOptions) -> Result<Computation> {
    let cycle = doc.cycle(cycle_name).ok_or_else(|| PipelineError::NoSuchCycle(cycle_name.to_string()))?;
    let context = format!("cycle `{cycle_name}`");
    for d in deleted {
        if cycle.internal_support.contains(d.as_ref()) {
            return Err(curve_err(&context)(CurveError::DeleteOnCycle(d.as_ref().to_string())));
        }
    }
    let curve = prepared_curve(doc, deleted, opts)?;
    let ctx = indeterminacy_subgroup(&curve, cycle, deleted).map_err(PipelineError::at(&context))?;
    let basis = ctx.basis_images().map_err(PipelineError::at(&context))?;
    let cycle_class = ctx.cycle_class().map_err(PipelineError::at(&context))?;
    let images: Vec<GroupElement> = basis.iter().map(|b| b.1.clone()).collect();
    let lks = linking_set(&ctx, cycle_class.as_ref(), &images).map_err(PipelineError::at(&context))?;
    let report = build_report(doc, &ctx, &basis, cycle_class.as_ref(), &lks, deleted).map_err(PipelineError::at(&context))?;
    Ok(Computation { context: ctx, basis, cycle_class, linking_set: lks, report })
}

pub fn run_pipeline<S: AsRef<str>>(doc: &FixtureDocument, cycle_name: &str, deleted: &[S]) -> Result<Report> {
    Ok(compute(doc, cycle_name, deleted, &PipelineOptions::default())?.report)
}

fn named(ctx: &QuotientContext, name: &str, e: &GroupElement) -> NamedClass {
    NamedClass { name: name.to_string(), value: ctx.display(e), coefficients: e.0.clone() }
}

fn bracket(ctx: &QuotientContext, e: &GroupElement) -> String {
    format!("[{}]", ctx.display(e))
}

fn build_report<S: AsRef<str>>(
    doc: &FixtureDocument,
    ctx: &QuotientContext,
    basis: &[(String, GroupElement)],
    cycle_class: Option<&GroupElement>,
    lks: &LinkingSet,
    deleted: &[S],
) -> std::result::Result<Report, InvariantError> {
    let curve = ctx.curve();
    let ids = |set: &BTreeSet<usize>| set.iter().map(|&c| curve.components()[c].id.clone()).collect::<Vec<_>>();
    let members = if lks.is_finite()? {
        Some(lks.enumerate()?.iter().map(|(_, e)| bracket(ctx, e)).collect::<Vec<_>>())
    } else {
        None
    };
    let mut notes = Vec::new();
    if let (LinkingCase::SingleComponent, Some(w)) = (lks.case(), lks.kernel_witness()) {
        notes.push(format!(
            "[0] belongs to the linking set: the nonzero coefficient tuple {w:?} on the basis maps to 0; \
             listings that keep only nonzero classes leave it out"
        ));
    }
    if lks.zero_excluded() {
        notes.push("the basis map is injective, so [0] is excluded".to_string());
    }
    let epsilon = if is_ternary(ctx)? {
        match lks.is_finite()? {
            true => Some(
                lks.enumerate()?
                    .iter()
                    .map(|(_, e)| {
                        let s = epsilon_signature(ctx, e)?;
                        Ok(EpsilonRow { element: bracket(ctx, e), counts: s.counts(), class: s.canonical() })
                    })
                    .collect::<std::result::Result<Vec<_>, InvariantError>>()?,
            ),
            false => None,
        }
    } else {
        None
    };
    let inner_cyclic = if curve.is_line_arrangement() {
        let check = inner_cyclic_equivalence_check(ctx)?;
        let i_value = match (&check.witness, cycle_class) {
            (Some(xi), Some(g)) => Some(i_invariant(ctx, xi, g)?),
            _ => None,
        };
        notes.push("inner-cyclic condition (3) is read as: the character values of the lines through the point sum to 0 mod m".into());
        Some(InnerCyclicReport {
            quotient_nontrivial: check.quotient_nontrivial,
            modulus: check.modulus,
            characters_checked: check.characters_checked,
            witness: check.witness.map(|x| x.values),
            i_value,
        })
    } else {
        None
    };
    Ok(Report {
        curve: doc.name.clone(),
        cycle: ctx.cycle().name.clone(),
        deleted: deleted.iter().map(|d| d.as_ref().to_string()).collect(),
        components: curve.components().iter().map(|c| c.id.clone()).collect(),
        singular_points: curve.points().len(),
        bezout: curve.bezout_pairs(),
        walk: ctx.walk().vertices().iter().map(|v| curve.vertex_id(*v).to_string()).collect(),
        internal_support: ids(ctx.internal_support()),
        support: ids(ctx.support()),
        generators: ctx.generator_names(),
        h1_complement: ctx.h1_complement().shape().to_string(),
        indeterminacy: ctx.indeterminacy_generators().iter().map(|g| ctx.display(g)).collect(),
        quotient: ctx.quotient().shape().to_string(),
        invariant_factors: ctx.quotient().moduli().to_vec(),
        contractible: lks.case() == LinkingCase::SingleComponent,
        cycle_class: ctx.cycle().cycle_class.as_ref().zip(cycle_class).map(|(n, g)| named(ctx, n, g)),
        basis: basis.iter().map(|(n, g)| named(ctx, n, g)).collect(),
        linking_set: LinkingSetReport {
            case: lks.case(),
            offset: ctx.display(lks.offset()),
            subgroup_generators: lks.subgroup().generators().iter().map(|g| ctx.display(g)).collect(),
            zero_excluded: lks.zero_excluded(),
            kernel_witness: lks.kernel_witness().map(<[i64]>::to_vec),
            members,
        },
        epsilon,
        inner_cyclic,
        notes,
    })
}

pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = write!(s, "curve: {}", r.curve);
    if !r.deleted.is_empty() {
        let _ = write!(s, " (deleted: {})", r.deleted.join(", "));
    }
    let _ = writeln!(s, "\n  components: {}  singular points: {}", r.components.join(" "), r.singular_points);
    let _ = writeln!(s, "cycle: {}", r.cycle);
    let _ = writeln!(s, "  walk: {}", r.walk.join(" "));
    let _ = writeln!(s, "  internal support: {}  support: {}", r.internal_support.join(" "), r.support.join(" "));
    let _ = writeln!(s, "H1 of complement: {}  on {}", r.h1_complement, r.generators.join(" "));
    let _ = writeln!(s, "indeterminacy subgroup: <{}>", r.indeterminacy.join(", "));
    let factors: Vec<String> = r.invariant_factors.iter().map(i64::to_string).collect();
    let _ = writeln!(s, "quotient: {}  invariant factors: ({})", r.quotient, factors.join(", "));
    let _ = writeln!(s, "projection: {}", if r.contractible { "contractible" } else { "not contractible" });
    if let Some(c) = &r.cycle_class {
        let _ = writeln!(s, "cycle class: {} = {}", c.name, c.value);
    }
    let _ = writeln!(s, "basis classes:");
    for b in &r.basis {
        let _ = writeln!(s, "  {} = {}", b.name, b.value);
    }
    let l = &r.linking_set;
    let case = match l.case {
        LinkingCase::NonContractible => "coset of the basis image",
        LinkingCase::SingleComponent => "images of nonzero coefficient tuples",
    };
    match &l.members {
        Some(m) => {
            let _ = writeln!(s, "linking set ({case}, {} elements):", m.len());
            for e in m {
                let _ = writeln!(s, "  {e}");
            }
        }
        None => {
            let _ = writeln!(s, "linking set ({case}, infinite): [{}] + <{}>", l.offset, l.subgroup_generators.join(", "));
        }
    }
    if let Some(eps) = &r.epsilon {
        let _ = writeln!(s, "epsilon:");
        for row in eps {
            let _ = writeln!(s, "  {:<28} ({},{},{})", row.element, row.counts[0], row.counts[1], row.counts[2]);
        }
    }
    if let Some(ic) = &r.inner_cyclic {
        let _ = writeln!(s, "inner-cyclic check (mod {}, {} characters): quotient nontrivial = {}", ic.modulus, ic.characters_checked, ic.quotient_nontrivial);
        if let Some(w) = &ic.witness {
            let _ = writeln!(s, "  witness character: {w:?}");
        }
        if let Some(v) = ic.i_value {
            let _ = writeln!(s, "  I-invariant: {v} (mod {})", ic.modulus);
        }
    }
    if !r.notes.is_empty() {
        let _ = writeln!(s, "notes:");
        for n in &r.notes {
            let _ = writeln!(s, "  - {n}");
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSummary {
    /// Images of the first curve's components, `A->B` pairs.
    pub map: Vec<String>,
    pub oriented_equal: bool,
    pub conjugate_equal: Option<bool>,
    pub missing: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonTable {
    pub a: Vec<EpsilonRow>,
    pub b: Vec<EpsilonRow>,
    /// Members of the first set whose rotation class occurs nowhere in the
    /// second set; each one alone rules out every permutation of meridians.
    pub separating: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: Report,
    pub b: Report,
    pub verdict: Verdict,
    pub oriented_only: bool,
    pub tried: usize,
    pub failed: usize,
    pub witness: Option<Vec<String>>,
    pub outcomes: Vec<SigmaSummary>,
    pub epsilon: Option<EpsilonTable>,
}

pub struct CompareInput<'a> {
    pub doc: &'a FixtureDocument,
    pub cycle: &'a str,
    pub deleted: &'a [String],
}

pub fn compare(a: CompareInput<'_>, b: CompareInput<'_>, zopts: ZariskiOptions, popts: &PipelineOptions) -> Result<CompareReport> {
    let ca = compute(a.doc, a.cycle, a.deleted, popts)?;
    let cb = compute(b.doc, b.cycle, b.deleted, popts)?;
    let z = zariski_test(&ca.context, &ca.linking_set, &cb.context, &cb.linking_set, zopts).map_err(PipelineError::at("comparison"))?;
    let (curve_a, curve_b) = (ca.context.curve(), cb.context.curve());
    let describe = |map: &[usize]| -> Vec<String> {
        map.iter().enumerate().map(|(i, &j)| format!("{}->{}", curve_a.components()[i].id, curve_b.components()[j].id)).collect()
    };
    let outcomes: Vec<SigmaSummary> = z
        .outcomes
        .iter()
        .map(|o| SigmaSummary {
            map: describe(&o.map),
            oriented_equal: o.oriented_equal,
            conjugate_equal: o.conjugate_equal,
            missing: o.missing.as_ref().map(|e| bracket(&cb.context, e)),
        })
        .collect();
    let epsilon = epsilon_table(&ca, &cb);
    Ok(CompareReport {
        tried: z.outcomes.len(),
        failed: z.failures(),
        witness: z.witness().map(|w| describe(&w.map)),
        verdict: z.verdict,
        oriented_only: zopts.oriented_only,
        outcomes,
        epsilon,
        a: ca.report,
        b: cb.report,
    })
}

fn epsilon_table(a: &Computation, b: &Computation) -> Option<EpsilonTable> {
    let (Some(ea), Some(eb)) = (&a.report.epsilon, &b.report.epsilon) else {
        return None;
    };
    let classes_b: BTreeSet<[usize; 3]> = eb.iter().map(|r| r.class).collect();
    let separating = ea.iter().filter(|r| !classes_b.contains(&r.class)).map(|r| r.element.clone()).collect();
    Some(EpsilonTable { a: ea.clone(), b: eb.clone(), separating })
}

pub fn render_compare_text(r: &CompareReport) -> String {
    let mut s = String::new();
    let side = |rep: &Report| {
        if rep.deleted.is_empty() {
            format!("{} / {}", rep.curve, rep.cycle)
        } else {
            format!("{} minus {} / {}", rep.curve, rep.deleted.join(","), rep.cycle)
        }
    };
    let _ = writeln!(s, "comparing {}  with  {}", side(&r.a), side(&r.b));
    for (label, rep) in [("A", &r.a), ("B", &r.b)] {
        let _ = writeln!(s, "{label}: quotient {}; linking set:", rep.quotient);
        match &rep.linking_set.members {
            Some(m) => {
                let _ = writeln!(s, "  {{{}}}", m.join(", "));
            }
            None => {
                let _ = writeln!(s, "  [{}] + <{}>", rep.linking_set.offset, rep.linking_set.subgroup_generators.join(", "));
            }
        }
    }
    let _ = writeln!(
        s,
        "isomorphisms tried: {}  failing: {}  ({})",
        r.tried,
        r.failed,
        if r.oriented_only { "oriented comparison only" } else { "conjugates allowed for single-component cycles" }
    );
    match &r.witness {
        Some(w) => {
            let _ = writeln!(s, "witness: {}", w.join(" "));
        }
        None => {
            for o in &r.outcomes {
                let why = o.missing.as_deref().map(|m| format!("{m} unmatched")).unwrap_or_else(|| "structure differs".into());
                let _ = writeln!(s, "  {}: {why}", o.map.join(" "));
            }
        }
    }
    if let Some(t) = &r.epsilon {
        let _ = writeln!(s, "epsilon table:");
        for (label, rows) in [("A", &t.a), ("B", &t.b)] {
            for row in rows {
                let _ = writeln!(s, "  {label} {:<28} ({},{},{})", row.element, row.counts[0], row.counts[1], row.counts[2]);
            }
        }
        if !t.separating.is_empty() {
            let _ = writeln!(s, "  separating (class absent from B): {}", t.separating.join(", "));
        }
    }
    let _ = writeln!(s, "verdict: {}", r.verdict);
    s
}
