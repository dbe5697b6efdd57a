//! The linking invariant: indeterminacy subgroup, homology quotient, linking
//! sets, the ternary signature used to separate them, the pair test over
//! combinatorial isomorphisms, and characters of line arrangements.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianError, Canonical, FgAbelianGroup, GroupElement, Homomorphism, IntMatrix, Subgroup};
use crate::braid::{hat_gamma, BraidError};
use crate::curve::{
    combinatorial_isomorphisms, is_contractible, supports, walk_maps_to, ComponentMap, CurveCombinatorics, CurveError,
    CycleSpec, Realization, Walk,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Group(#[from] AbelianError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error("cycle `{0}` has a contractible projection through several components; decompose it into subcycles first")]
    DecomposeCycle(String),
    #[error("cycle `{0}` has a non-contractible projection but no class for the cycle itself")]
    MissingCycleClass(String),
    #[error("realization `{name}` refers to `{component}`, which is not a component of the curve")]
    UnknownComponent { name: String, component: String },
    #[error("quotient is not (Z_3)^n / <sum x_k>: {0}")]
    NotTernary(String),
    #[error("combinatorics do not match: {0}")]
    CombinatoricsMismatch(String),
    #[error("input is not a line arrangement")]
    NotArrangement,
    #[error("character has {found} values, the arrangement has {expected} lines")]
    CharacterLength { expected: usize, found: usize },
    #[error("character modulus must be at least 1, got {0}")]
    CharacterModulus(i64),
    #[error("character enumeration would visit {0} candidates, refusing")]
    EnumerationTooLarge(u128),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, InvariantError>;

/// Everything the invariant of one cycle lives in.
///
/// Generator `k` of both groups is the meridian of `complement()[k]`, so the
/// generator order follows the curve's component order.
#[derive(Clone, Debug)]
pub struct QuotientContext {
    curve: CurveCombinatorics,
    cycle: CycleSpec,
    walk: Walk,
    deleted: Vec<String>,
    support: BTreeSet<usize>,
    internal_support: BTreeSet<usize>,
    complement: Vec<usize>,
    h1_complement: FgAbelianGroup,
    indeterminacy_generators: Vec<GroupElement>,
    indeterminacy: Subgroup,
    quotient: FgAbelianGroup,
}

/// Builds the quotient context of `cycle` on `curve`. `deleted` lists curve
/// components removed before this call; braid strands labelled with them
/// are dropped.
pub fn indeterminacy_subgroup<S: AsRef<str>>(
    curve: &CurveCombinatorics,
    cycle: &CycleSpec,
    deleted: &[S],
) -> Result<QuotientContext> {
    let (support, complement_set) = supports(cycle, curve)?;
    let walk = cycle.projection(curve)?;
    let internal_support = walk.components();
    let complement: Vec<usize> = complement_set.into_iter().collect();
    let n = complement.len();
    let position: BTreeMap<usize, usize> = complement.iter().enumerate().map(|(k, &c)| (c, k)).collect();

    let degrees: Vec<i64> = complement.iter().map(|&c| i64::from(curve.components()[c].degree)).collect();
    let relations = if n == 0 { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(n, &[degrees])? };
    let h1_complement = FgAbelianGroup::new(n, relations)?;

    let mut gens: Vec<GroupElement> = Vec::new();
    for &d in &internal_support {
        for p in curve.points().iter().filter(|p| p.contains(d)) {
            let mut g = GroupElement::zero(n);
            for &c in &p.incidences {
                if let Some(&k) = position.get(&c) {
                    let lk = p.lk(c, d).ok_or_else(|| InvariantError::Internal(format!("no linking number at {}", p.id)))?;
                    g.0[k] += i64::from(lk);
                }
            }
            if !g.is_zero_vector() && !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    let indeterminacy = Subgroup::new(&h1_complement, gens.clone())?;
    let quotient = indeterminacy.cokernel().clone();
    Ok(QuotientContext {
        curve: curve.clone(),
        cycle: cycle.clone(),
        walk,
        deleted: deleted.iter().map(|s| s.as_ref().to_string()).collect(),
        support,
        internal_support,
        complement,
        h1_complement,
        indeterminacy_generators: gens,
        indeterminacy,
        quotient,
    })
}

impl QuotientContext {
    pub fn curve(&self) -> &CurveCombinatorics {
        &self.curve
    }

    pub fn cycle(&self) -> &CycleSpec {
        &self.cycle
    }

    pub fn walk(&self) -> &Walk {
        &self.walk
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn internal_support(&self) -> &BTreeSet<usize> {
        &self.internal_support
    }

    /// Complement components, in curve order; index `k` is generator `k`.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn h1_complement(&self) -> &FgAbelianGroup {
        &self.h1_complement
    }

    pub fn indeterminacy(&self) -> &Subgroup {
        &self.indeterminacy
    }

    pub fn indeterminacy_generators(&self) -> &[GroupElement] {
        &self.indeterminacy_generators
    }

    pub fn quotient(&self) -> &FgAbelianGroup {
        &self.quotient
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.complement.iter().map(|&c| self.curve.components()[c].meridian_name()).collect()
    }

    pub fn generator_ids(&self) -> Vec<String> {
        self.complement.iter().map(|&c| self.curve.components()[c].id.clone()).collect()
    }

    pub fn display(&self, e: &GroupElement) -> String {
        e.display_with(&self.generator_names())
    }

    /// Unit meridian of each complement component, keyed by component id.
    pub fn meridians(&self) -> BTreeMap<String, GroupElement> {
        let n = self.complement.len();
        self.complement
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.curve.components()[c].id.clone(), GroupElement::unit(n, k)))
            .collect()
    }

    /// Components whose meridians vanish here: deleted ones and the support.
    fn vanishing_ids(&self) -> Vec<String> {
        let mut ids = self.deleted.clone();
        ids.extend(self.support.iter().map(|&c| self.curve.components()[c].id.clone()));
        ids
    }

    /// Class of a realization in the complement homology, in generator
    /// coordinates.
    pub fn realize(&self, name: &str, r: &Realization) -> Result<GroupElement> {
        let vanishing = self.vanishing_ids();
        let meridians = self.meridians();
        match r {
            Realization::Braid { word, labeling } => {
                let labeling = labeling.dropping(&vanishing);
                hat_gamma(word, &labeling, &self.h1_complement, &meridians).map_err(|e| match e {
                    BraidError::UnknownComponent(c) => InvariantError::UnknownComponent { name: name.to_string(), component: c },
                    other => other.into(),
                })
            }
            Realization::Class(coeffs) => {
                let mut acc = GroupElement::zero(self.complement.len());
                for (id, &k) in coeffs {
                    if let Some(m) = meridians.get(id) {
                        acc = acc.checked_add(&m.checked_scale(k)?)?;
                    } else if !vanishing.contains(id) {
                        return Err(InvariantError::UnknownComponent { name: name.to_string(), component: id.clone() });
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Classes of the genus basis, in [`CycleSpec::basis_names`] order.
    pub fn basis_images(&self) -> Result<Vec<(String, GroupElement)>> {
        self.cycle
            .basis_names(&self.curve)
            .into_iter()
            .map(|name| {
                let r = &self.cycle.realizations[&name];
                let e = self.realize(&name, r)?;
                Ok((name, e))
            })
            .collect()
    }

    /// Class of the cycle itself, when one is declared.
    pub fn cycle_class(&self) -> Result<Option<GroupElement>> {
        match &self.cycle.cycle_class {
            Some(name) => Ok(Some(self.realize(name, &self.cycle.realizations[name])?)),
            None => Ok(None),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkingCase {
    /// Projection not contractible: a full coset of the genus image.
    NonContractible,
    /// Internal support a single component: images of nonzero tuples.
    SingleComponent,
}

/// `offset + subgroup`, minus zero when `zero_excluded`.
#[derive(Clone, Debug)]
pub struct LinkingSet {
    case: LinkingCase,
    offset: GroupElement,
    subgroup: Subgroup,
    zero_excluded: bool,
    kernel_witness: Option<Vec<i64>>,
}

pub fn linking_set(ctx: &QuotientContext, gamma_hat: Option<&GroupElement>, basis_images: &[GroupElement]) -> Result<LinkingSet> {
    let q = ctx.quotient();
    let subgroup = Subgroup::new(q, basis_images.to_vec())?;
    let graph = ctx.curve().incidence_graph();
    if !is_contractible(ctx.walk(), &graph)? {
        let offset = gamma_hat.ok_or_else(|| InvariantError::MissingCycleClass(ctx.cycle().name.clone()))?;
        return Ok(LinkingSet {
            case: LinkingCase::NonContractible,
            offset: offset.clone(),
            subgroup,
            zero_excluded: false,
            kernel_witness: None,
        });
    }
    if ctx.internal_support().len() != 1 {
        return Err(InvariantError::DecomposeCycle(ctx.cycle().name.clone()));
    }
    let kernel = q.kernel_basis(basis_images)?;
    let kernel_witness = if kernel.is_empty() {
        None
    } else {
        // Prefer the plainest witness: a single basis class times its order.
        let k = basis_images.len();
        let mut simple = None;
        for (i, g) in basis_images.iter().enumerate() {
            if let Some(o) = q.element_order(g)? {
                let mut t = vec![0; k];
                t[i] = o;
                simple = Some(t);
                break;
            }
        }
        Some(simple.unwrap_or_else(|| kernel[0].clone()))
    };
    Ok(LinkingSet {
        case: LinkingCase::SingleComponent,
        offset: GroupElement::zero(q.generators()),
        subgroup,
        zero_excluded: kernel_witness.is_none(),
        kernel_witness,
    })
}

impl LinkingSet {
    pub fn case(&self) -> LinkingCase {
        self.case
    }

    pub fn offset(&self) -> &GroupElement {
        &self.offset
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn ambient(&self) -> &FgAbelianGroup {
        self.subgroup.ambient()
    }

    pub fn zero_excluded(&self) -> bool {
        self.zero_excluded
    }

    /// A nonzero coefficient tuple mapping to zero, when one exists.
    pub fn kernel_witness(&self) -> Option<&[i64]> {
        self.kernel_witness.as_deref()
    }

    pub fn contains(&self, e: &GroupElement) -> Result<bool> {
        let diff = e.checked_sub(&self.offset)?;
        if !self.subgroup.contains(&diff)? {
            return Ok(false);
        }
        Ok(!(self.zero_excluded && self.ambient().is_zero(e)?))
    }

    pub fn is_finite(&self) -> Result<bool> {
        Ok(self.subgroup.is_finite()?)
    }

    /// Members in canonical order, each with a short representative.
    pub fn enumerate(&self) -> Result<Vec<(Canonical, GroupElement)>> {
        let all = self.subgroup.coset_elements(&self.offset)?;
        Ok(all.into_iter().filter(|(c, _)| !(self.zero_excluded && c.is_zero())).collect())
    }

    fn zero_in_coset(&self) -> Result<bool> {
        Ok(self.subgroup.contains(&self.offset.checked_neg()?)?)
    }

    pub fn equals(&self, other: &LinkingSet) -> Result<bool> {
        if self.ambient() != other.ambient() {
            return Err(AbelianError::AmbientMismatch.into());
        }
        if self.is_finite()? && other.is_finite()? {
            let a: Vec<Canonical> = self.enumerate()?.into_iter().map(|p| p.0).collect();
            let b: Vec<Canonical> = other.enumerate()?.into_iter().map(|p| p.0).collect();
            return Ok(a == b);
        }
        if !self.subgroup.same_as(&other.subgroup)? {
            return Ok(false);
        }
        if !self.subgroup.contains(&self.offset.checked_sub(&other.offset)?)? {
            return Ok(false);
        }
        Ok(!self.zero_in_coset()? || self.zero_excluded == other.zero_excluded)
    }

    /// A member of `self` missing from `other`, when the sets are finite.
    pub fn first_missing_from(&self, other: &LinkingSet) -> Result<Option<GroupElement>> {
        if !self.is_finite()? {
            return Ok(None);
        }
        for (_, e) in self.enumerate()? {
            if !other.contains(&e)? {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    /// Image under an isomorphism of the ambient quotients.
    pub fn map(&self, phi: &Homomorphism) -> Result<LinkingSet> {
        if phi.source() != self.ambient() {
            return Err(AbelianError::AmbientMismatch.into());
        }
        let gens = self.subgroup.generators().iter().map(|g| phi.apply(g)).collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(LinkingSet {
            case: self.case,
            offset: phi.apply(&self.offset)?,
            subgroup: Subgroup::new(phi.target(), gens)?,
            zero_excluded: self.zero_excluded,
            kernel_witness: self.kernel_witness.clone(),
        })
    }

    /// The set of negatives; the subgroup is closed under negation.
    pub fn conjugate(&self) -> Result<LinkingSet> {
        Ok(LinkingSet { offset: self.offset.checked_neg()?, ..self.clone() })
    }
}

pub fn conjugate_linking_set(s: &LinkingSet) -> Result<LinkingSet> {
    s.conjugate()
}

/// Counts of coordinates equal to 0, 1 and -1 modulo 3, compared up to
/// cyclic rotation of the triple. The raw counts are kept for display.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EpsilonSignature {
    counts: [usize; 3],
}

impl EpsilonSignature {
    pub fn from_coordinates(coords: &[i64]) -> Self {
        let mut counts = [0usize; 3];
        for c in coords {
            counts[c.rem_euclid(3) as usize] += 1;
        }
        EpsilonSignature { counts }
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    /// Lexicographically smallest rotation.
    pub fn canonical(&self) -> [usize; 3] {
        let c = self.counts;
        [[c[0], c[1], c[2]], [c[1], c[2], c[0]], [c[2], c[0], c[1]]].into_iter().min().expect("three rotations")
    }
}

impl PartialEq for EpsilonSignature {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for EpsilonSignature {}

impl Hash for EpsilonSignature {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl PartialOrd for EpsilonSignature {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpsilonSignature {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical().cmp(&other.canonical())
    }
}

impl fmt::Display for EpsilonSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.counts[0], self.counts[1], self.counts[2])
    }
}

/// Whether the quotient is exactly `(Z_3)^n / <x_1 + ... + x_n>`.
pub fn is_ternary(ctx: &QuotientContext) -> Result<bool> {
    let q = ctx.quotient();
    let n = q.generators();
    if n == 0 {
        return Ok(false);
    }
    let mut rows: Vec<Vec<i64>> = (0..n).map(|k| GroupElement::unit(n, k).checked_scale(3).map(|e| e.0)).collect::<std::result::Result<_, _>>()?;
    rows.push(vec![1; n]);
    let model = FgAbelianGroup::new(n, IntMatrix::from_rows(n, &rows)?)?;
    for r in 0..q.relations().rows() {
        if !model.is_zero(&GroupElement(q.relations().row(r).to_vec()))? {
            return Ok(false);
        }
    }
    for r in rows {
        if !q.is_zero(&GroupElement(r))? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn epsilon_signature(ctx: &QuotientContext, e: &GroupElement) -> Result<EpsilonSignature> {
    if !is_ternary(ctx)? {
        return Err(InvariantError::NotTernary(format!("quotient is {}", ctx.quotient().shape())));
    }
    if e.len() != ctx.quotient().generators() {
        return Err(AbelianError::DimensionMismatch { expected: ctx.quotient().generators(), found: e.len() }.into());
    }
    Ok(EpsilonSignature::from_coordinates(e.coefficients()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "DISTINGUISHED")]
    Distinguished,
    #[serde(rename = "NOT_DISTINGUISHED")]
    NotDistinguished,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Distinguished => "DISTINGUISHED",
            Verdict::NotDistinguished => "NOT_DISTINGUISHED",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZariskiOptions {
    /// Never compare against the conjugate set.
    pub oriented_only: bool,
    /// Let isomorphisms move the internal support.
    pub full_automorphisms: bool,
}

/// Outcome for one component bijection.
#[derive(Clone, Debug)]
pub struct SigmaOutcome {
    pub map: ComponentMap,
    pub oriented_equal: bool,
    /// `None` when the conjugate comparison does not apply.
    pub conjugate_equal: Option<bool>,
    /// A member of the mapped set absent from the second set, in the second
    /// curve's generator coordinates.
    pub missing: Option<GroupElement>,
}

impl SigmaOutcome {
    pub fn matched(&self) -> bool {
        self.oriented_equal || self.conjugate_equal == Some(true)
    }
}

#[derive(Clone, Debug)]
pub struct ZariskiReport {
    pub verdict: Verdict,
    pub outcomes: Vec<SigmaOutcome>,
}

impl ZariskiReport {
    pub fn witness(&self) -> Option<&SigmaOutcome> {
        self.outcomes.iter().find(|o| o.matched())
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.matched()).count()
    }
}

/// The natural isomorphism of quotients induced by a component bijection,
/// sending meridian to meridian.
pub fn natural_isomorphism(a: &QuotientContext, b: &QuotientContext, map: &[usize]) -> Result<Homomorphism> {
    let pos_b: BTreeMap<usize, usize> = b.complement().iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let n = b.complement().len();
    let images = a
        .complement()
        .iter()
        .map(|&c| {
            pos_b
                .get(&map[c])
                .map(|&k| GroupElement::unit(n, k))
                .ok_or_else(|| InvariantError::Internal(format!("component {c} leaves the complement")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Homomorphism::new(a.quotient(), b.quotient(), images)?)
}

/// Isomorphisms of combinatorics carrying the first cycle's projection onto
/// the second's.
pub fn cycle_isomorphisms(a: &QuotientContext, b: &QuotientContext, full: bool) -> Result<Vec<ComponentMap>> {
    let pins: Vec<(usize, usize)> = if full {
        Vec::new()
    } else {
        if a.internal_support().len() != b.internal_support().len() {
            return Err(InvariantError::CombinatoricsMismatch("internal supports differ in size".into()));
        }
        a.internal_support().iter().copied().zip(b.internal_support().iter().copied()).collect()
    };
    let maps: Vec<ComponentMap> = combinatorial_isomorphisms(a.curve(), b.curve(), &pins)
        .into_iter()
        .filter(|m| walk_maps_to(m, a.curve(), a.walk(), b.curve(), b.walk()))
        .collect();
    if maps.is_empty() {
        return Err(InvariantError::CombinatoricsMismatch(structural_diff(a.curve(), b.curve())));
    }
    Ok(maps)
}

fn structural_diff(a: &CurveCombinatorics, b: &CurveCombinatorics) -> String {
    let mut out = Vec::new();
    if a.components().len() != b.components().len() {
        out.push(format!("{} vs {} components", a.components().len(), b.components().len()));
    }
    if a.points().len() != b.points().len() {
        out.push(format!("{} vs {} singular points", a.points().len(), b.points().len()));
    }
    let types = |c: &CurveCombinatorics| {
        let mut t: Vec<(u32, u32)> = c.components().iter().map(|x| (x.degree, x.genus)).collect();
        t.sort_unstable();
        t
    };
    if types(a) != types(b) {
        out.push(format!("(degree, genus) multisets {:?} vs {:?}", types(a), types(b)));
    }
    if out.is_empty() {
        out.push("no bijection preserves the incidence data and carries one cycle projection onto the other".into());
    }
    out.join("; ")
}

/// Tests every isomorphism of the combinatorics carrying one cycle to the
/// other. The pair is distinguished when no induced map of quotients sends
/// one linking set onto the other (or, for cycles inside one component,
/// onto the conjugate of the other).
pub fn zariski_test(
    a: &QuotientContext,
    lks_a: &LinkingSet,
    b: &QuotientContext,
    lks_b: &LinkingSet,
    opts: ZariskiOptions,
) -> Result<ZariskiReport> {
    let maps = cycle_isomorphisms(a, b, opts.full_automorphisms)?;
    let use_conjugate = !opts.oriented_only && a.internal_support().len() == 1 && b.internal_support().len() == 1;
    let mut outcomes = Vec::with_capacity(maps.len());
    for map in maps {
        let phi = natural_isomorphism(a, b, &map)?;
        let image = lks_a.map(&phi)?;
        let oriented_equal = image.equals(lks_b)?;
        let conjugate_equal = if use_conjugate && !oriented_equal { Some(image.conjugate()?.equals(lks_b)?) } else { None };
        let missing = if oriented_equal || conjugate_equal == Some(true) {
            None
        } else {
            match image.first_missing_from(lks_b)? {
                Some(e) => Some(e),
                None => lks_b.first_missing_from(&image)?,
            }
        };
        outcomes.push(SigmaOutcome { map, oriented_equal, conjugate_equal, missing });
    }
    let verdict = if outcomes.iter().any(SigmaOutcome::matched) { Verdict::NotDistinguished } else { Verdict::Distinguished };
    Ok(ZariskiReport { verdict, outcomes })
}

/// Character of a line arrangement's complement with values in `Z_m`,
/// one value per line; `v` stands for the root of unity `exp(2 pi i v / m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    pub modulus: i64,
    pub values: Vec<i64>,
}

impl Character {
    pub fn new(modulus: i64, values: Vec<i64>) -> Result<Self> {
        if modulus < 1 {
            return Err(InvariantError::CharacterModulus(modulus));
        }
        let values = values.into_iter().map(|v| v.rem_euclid(modulus)).collect();
        Ok(Character { modulus, values })
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Whether the values respect the relation `sum d_i x_i = 0`.
    pub fn respects(&self, curve: &CurveCombinatorics) -> bool {
        let total: i128 = curve.components().iter().zip(&self.values).map(|(c, &v)| i128::from(c.degree) * i128::from(v)).sum();
        total.rem_euclid(i128::from(self.modulus)) == 0
    }

    fn at(&self, line: usize) -> i64 {
        self.values[line]
    }
}

fn require_arrangement(arr: &CurveCombinatorics) -> Result<()> {
    if !arr.is_line_arrangement() {
        return Err(InvariantError::NotArrangement);
    }
    Ok(())
}

/// The three vanishing conditions on a graph cycle: lines on the cycle, lines
/// through points on the cycle, and the product of values around every
/// singular point of a line on the cycle (read additively in `Z_m`).
pub fn is_inner_cyclic(arr: &CurveCombinatorics, xi: &Character, sigma: &Walk) -> Result<bool> {
    require_arrangement(arr)?;
    if xi.values.len() != arr.components().len() {
        return Err(InvariantError::CharacterLength { expected: arr.components().len(), found: xi.values.len() });
    }
    sigma.validate(&arr.incidence_graph())?;
    let lines = sigma.components();
    if lines.iter().any(|&l| xi.at(l) != 0) {
        return Ok(false);
    }
    for p in sigma.points() {
        if arr.points()[p].incidences.iter().any(|&l| xi.at(l) != 0) {
            return Ok(false);
        }
    }
    for p in arr.points().iter().filter(|p| lines.iter().any(|&l| p.contains(l))) {
        let sum: i64 = p.incidences.iter().map(|&l| xi.at(l)).sum();
        if sum.rem_euclid(xi.modulus) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of cross-checking quotient nontriviality against characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceCheck {
    pub quotient_nontrivial: bool,
    pub modulus: i64,
    pub characters_checked: u64,
    /// First nontrivial inner-cyclic character found, if any.
    pub witness: Option<Character>,
}

const CHARACTER_LIMIT: u128 = 2_000_000;

/// Modulus used for character enumeration: the exponent of the quotient's
/// torsion, or 2 when there is no torsion. A free quotient of positive rank
/// has nontrivial `Z_2` characters and the trivial group has none, so 2 is
/// enough to decide nontriviality there.
pub fn character_modulus(q: &FgAbelianGroup) -> Result<i64> {
    let e = q.torsion_exponent()?;
    Ok(if e > 1 { e } else { 2 })
}

/// Decides whether the quotient is nontrivial, and checks the answer against
/// an exhaustive search for nontrivial inner-cyclic characters.
pub fn inner_cyclic_equivalence_check(ctx: &QuotientContext) -> Result<EquivalenceCheck> {
    let arr = ctx.curve();
    require_arrangement(arr)?;
    let quotient_nontrivial = !ctx.quotient().is_trivial();
    let m = character_modulus(ctx.quotient())?;
    let n = arr.components().len();
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > CHARACTER_LIMIT {
        return Err(InvariantError::EnumerationTooLarge(total));
    }
    let mut values = vec![0i64; n];
    let mut checked = 0u64;
    let mut witness = None;
    loop {
        let xi = Character { modulus: m, values: values.clone() };
        if xi.respects(arr) {
            checked += 1;
            if !xi.is_trivial() && is_inner_cyclic(arr, &xi, ctx.walk())? {
                witness = Some(xi);
                break;
            }
        }
        // Odometer increment.
        let mut i = 0;
        while i < n {
            values[i] += 1;
            if values[i] < m {
                break;
            }
            values[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    if witness.is_some() != quotient_nontrivial {
        return Err(InvariantError::Internal(format!(
            "quotient is {} but a nontrivial inner-cyclic character {}",
            ctx.quotient().shape(),
            if witness.is_some() { "exists" } else { "does not exist" }
        )));
    }
    Ok(EquivalenceCheck { quotient_nontrivial, modulus: m, characters_checked: checked, witness })
}

/// The value `xi_*([gamma])` in `Z_m`, for a character vanishing on the
/// support and on the indeterminacy subgroup.
pub fn i_invariant(ctx: &QuotientContext, xi: &Character, gamma_hat: &GroupElement) -> Result<i64> {
    let arr = ctx.curve();
    require_arrangement(arr)?;
    if !is_inner_cyclic(arr, xi, ctx.walk())? {
        return Err(InvariantError::Internal("character is not inner-cyclic for this cycle".into()));
    }
    let restricted: Vec<i64> = ctx.complement().iter().map(|&c| xi.at(c)).collect();
    let eval = |e: &GroupElement| -> i64 {
        let s: i128 = e.coefficients().iter().zip(&restricted).map(|(&a, &v)| i128::from(a) * i128::from(v)).sum();
        s.rem_euclid(i128::from(xi.modulus)) as i64
    };
    if let Some(g) = ctx.indeterminacy_generators().iter().find(|g| eval(g) != 0) {
        return Err(InvariantError::Internal(format!("character does not vanish on {}", ctx.display(g))));
    }
    Ok(eval(gamma_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{BraidWord, StrandLabel, StrandLabeling};
    use crate::curve::{Component, PointSpec};

    fn labels(spec: &[&str]) -> StrandLabeling {
        StrandLabeling::new(
            spec.iter()
                .map(|s| match *s {
                    "*" => StrandLabel::Cycle,
                    "0" => StrandLabel::Dropped,
                    c => StrandLabel::Component(c.to_string()),
                })
                .collect(),
        )
        .unwrap()
    }

    fn tangent_cubic() -> CurveCombinatorics {
        CurveCombinatorics::new(
            "T",
            vec![
                Component::new("C", 3, 1),
                Component::new("T1", 1, 0).with_meridian("x1"),
                Component::new("T2", 1, 0).with_meridian("x2"),
            ],
            &[PointSpec::new("P1", ["C", "T1"]).lk("C", "T1", 3), PointSpec::new("P2", ["C", "T2"]).lk("C", "T2", 3)],
        )
        .unwrap()
        .with_generic_nodes()
        .unwrap()
    }

    fn cubic_cycle() -> CycleSpec {
        let g1 = Realization::Braid { word: BraidWord::trivial(3).unwrap(), labeling: labels(&["T2", "*", "T1"]) };
        let g2 = Realization::Braid {
            word: BraidWord::from_signed(3, &[1, 2, -1, 2, 1, -2]).unwrap(),
            labeling: labels(&["T2", "*", "T1"]),
        };
        CycleSpec {
            name: "gamma".into(),
            walk: vec!["C".into()],
            internal_support: BTreeSet::from(["C".to_string()]),
            genus_basis: BTreeMap::from([("C".to_string(), vec!["g1".to_string(), "g2".to_string()])]),
            cycle_class: Some("g1".into()),
            realizations: BTreeMap::from([("g1".to_string(), g1), ("g2".to_string(), g2)]),
        }
    }

    #[test]
    fn tangent_cubic_quotient_and_linking_set() {
        let ctx = indeterminacy_subgroup(&tangent_cubic(), &cubic_cycle(), &[] as &[String]).unwrap();
        let shown: Vec<String> = ctx.indeterminacy_generators().iter().map(|g| ctx.display(g)).collect();
        assert_eq!(shown, ["3x1", "3x2"]);
        assert_eq!(ctx.quotient().shape().to_string(), "Z_3");
        let basis = ctx.basis_images().unwrap();
        assert_eq!(ctx.display(&basis[0].1), "0");
        assert_eq!(ctx.display(&basis[1].1), "x1 - x2");
        let imgs: Vec<GroupElement> = basis.into_iter().map(|b| b.1).collect();
        let lks = linking_set(&ctx, None, &imgs).unwrap();
        assert_eq!(lks.case(), LinkingCase::SingleComponent);
        assert!(!lks.zero_excluded());
        let members: Vec<String> = lks.enumerate().unwrap().iter().map(|(_, e)| ctx.display(e)).collect();
        assert_eq!(members.len(), 3);
        for want in ["0", "x1 - x2", "-x1 + x2"] {
            assert!(members.contains(&want.to_string()), "{members:?}");
        }
        assert!(lks.equals(&lks.conjugate().unwrap()).unwrap());
    }

    #[test]
    fn zero_excluded_when_injective() {
        let ctx = indeterminacy_subgroup(&tangent_cubic(), &cubic_cycle(), &[] as &[String]).unwrap();
        let g = GroupElement(vec![1, 0]);
        let lks = linking_set(&ctx, None, std::slice::from_ref(&g)).unwrap();
        // 3 * g = 0, so the kernel is nontrivial and zero stays.
        assert!(!lks.zero_excluded());
        assert_eq!(lks.kernel_witness(), Some(&[3][..]));
        let none = linking_set(&ctx, None, &[]).unwrap();
        assert!(none.zero_excluded());
        assert!(none.enumerate().unwrap().is_empty());
    }

    #[test]
    fn trivial_indeterminacy_when_disjoint() {
        let curve = CurveCombinatorics::new(
            "two",
            vec![Component::new("E", 3, 1), Component::new("Q", 2, 0)],
            &[],
        )
        .unwrap();
        // Bezout is not enforced here: the cubic meets nothing.
        let mut cyc = cubic_cycle();
        cyc.walk = vec!["E".into()];
        cyc.internal_support = BTreeSet::from(["E".to_string()]);
        cyc.genus_basis = BTreeMap::from([("E".to_string(), vec!["g1".to_string(), "g2".to_string()])]);
        cyc.realizations = BTreeMap::from([
            ("g1".to_string(), Realization::Class(BTreeMap::new())),
            ("g2".to_string(), Realization::Class(BTreeMap::new())),
        ]);
        let ctx = indeterminacy_subgroup(&curve, &cyc, &[] as &[String]).unwrap();
        assert!(ctx.indeterminacy_generators().is_empty());
        assert_eq!(ctx.quotient().shape().to_string(), "Z_2");
    }

    #[test]
    fn epsilon_rotation_classes() {
        let a = EpsilonSignature::from_coordinates(&[0, 1, 2, 0, 0]);
        assert_eq!(a.counts(), [3, 1, 1]);
        let shifted = EpsilonSignature::from_coordinates(&[1, 2, 0, 1, 1]);
        assert_eq!(a, shifted);
        let neg = EpsilonSignature::from_coordinates(&[0, 1, 1, 0, 2]);
        assert_eq!(neg.counts(), [2, 2, 1]);
        assert_ne!(EpsilonSignature::from_coordinates(&[0, 0, 1, 1, 1]), EpsilonSignature::from_coordinates(&[0, 0, 2, 2, 2]));
        assert_eq!(a.to_string(), "(3,1,1)");
    }

    #[test]
    fn epsilon_requires_ternary_shape() {
        let ctx = indeterminacy_subgroup(&tangent_cubic(), &cubic_cycle(), &[] as &[String]).unwrap();
        // (Z_3)^2 / <x1 + x2> is of the right form.
        assert!(is_ternary(&ctx).unwrap());
        let curve = CurveCombinatorics::new("two", vec![Component::new("E", 3, 1), Component::new("Q", 2, 0)], &[]).unwrap();
        let mut cyc = cubic_cycle();
        cyc.walk = vec!["E".into()];
        cyc.internal_support = BTreeSet::from(["E".to_string()]);
        cyc.genus_basis = BTreeMap::from([("E".to_string(), vec!["g1".to_string(), "g2".to_string()])]);
        let ctx = indeterminacy_subgroup(&curve, &cyc, &[] as &[String]).unwrap();
        assert!(matches!(epsilon_signature(&ctx, &GroupElement(vec![1])), Err(InvariantError::NotTernary(_))));
    }

    #[test]
    fn self_comparison_is_not_distinguished() {
        let ctx = indeterminacy_subgroup(&tangent_cubic(), &cubic_cycle(), &[] as &[String]).unwrap();
        let imgs: Vec<GroupElement> = ctx.basis_images().unwrap().into_iter().map(|b| b.1).collect();
        let lks = linking_set(&ctx, None, &imgs).unwrap();
        let report = zariski_test(&ctx, &lks, &ctx, &lks, ZariskiOptions::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NotDistinguished);
        assert_eq!(report.outcomes.len(), 2);
        assert_eq!(report.witness().unwrap().map, vec![0, 1, 2]);
    }

    fn triangle_with_extra() -> CurveCombinatorics {
        // Four general lines; the cycle runs around the triangle A, B, C.
        CurveCombinatorics::new(
            "quad",
            vec![Component::new("A", 1, 0), Component::new("B", 1, 0), Component::new("C", 1, 0), Component::new("D", 1, 0)],
            &[],
        )
        .unwrap()
        .with_generic_nodes()
        .unwrap()
    }

    fn triangle_cycle() -> CycleSpec {
        CycleSpec {
            name: "tri".into(),
            walk: ["A", "A.B", "B", "B.C", "C", "A.C"].iter().map(|s| s.to_string()).collect(),
            internal_support: ["A", "B", "C"].iter().map(|s| s.to_string()).collect(),
            genus_basis: BTreeMap::new(),
            cycle_class: Some("c".into()),
            realizations: BTreeMap::from([("c".to_string(), Realization::Class(BTreeMap::from([("D".to_string(), 1)])))]),
        }
    }

    #[test]
    fn general_lines_have_trivial_quotient() {
        let arr = triangle_with_extra();
        let ctx = indeterminacy_subgroup(&arr, &triangle_cycle(), &[] as &[String]).unwrap();
        assert!(ctx.quotient().is_trivial());
        let check = inner_cyclic_equivalence_check(&ctx).unwrap();
        assert!(!check.quotient_nontrivial);
        assert!(check.witness.is_none());
        let lks = linking_set(&ctx, ctx.cycle_class().unwrap().as_ref(), &[]).unwrap();
        assert_eq!(lks.case(), LinkingCase::NonContractible);
        assert_eq!(lks.enumerate().unwrap().len(), 1);
    }

    #[test]
    fn inner_cyclic_conditions() {
        let arr = triangle_with_extra();
        let walk = triangle_cycle().projection(&arr).unwrap();
        let trivial = Character::new(3, vec![0; 4]).unwrap();
        assert!(is_inner_cyclic(&arr, &trivial, &walk).unwrap());
        let on_support = Character::new(3, vec![1, 0, 0, 2]).unwrap();
        assert!(!is_inner_cyclic(&arr, &on_support, &walk).unwrap());
        // D meets A in a double point, so condition (3) forces its value to 0.
        let off = Character::new(3, vec![0, 0, 0, 1]).unwrap();
        assert!(!is_inner_cyclic(&arr, &off, &walk).unwrap());
        let conic = CurveCombinatorics::new("q", vec![Component::new("Q", 2, 0)], &[]).unwrap();
        assert!(matches!(is_inner_cyclic(&conic, &trivial, &walk), Err(InvariantError::NotArrangement)));
    }

    #[test]
    fn decompose_error_for_contractible_multi_component_walks() {
        let arr = triangle_with_extra();
        let mut cyc = triangle_cycle();
        cyc.walk = ["A", "A.B", "B", "A.B"].iter().map(|s| s.to_string()).collect();
        cyc.internal_support = ["A", "B"].iter().map(|s| s.to_string()).collect();
        let ctx = indeterminacy_subgroup(&arr, &cyc, &[] as &[String]).unwrap();
        assert!(matches!(linking_set(&ctx, None, &[]), Err(InvariantError::DecomposeCycle(_))));
    }
}
