//! Combinatorics of a plane curve: components, singular points with pairwise
//! local linking numbers, the bipartite incidence graph and closed walks on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{BraidWord, StrandLabeling};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("identifier `{0}` is defined twice")]
    DuplicateId(String),
    #[error("component `{0}` must have degree at least 1")]
    ZeroDegree(String),
    #[error("point `{point}` refers to unknown component `{component}`")]
    DanglingComponent { point: String, component: String },
    #[error("point `{0}` lies on no component")]
    EmptyPoint(String),
    #[error("point `{point}`: local linking number of `{a}` and `{b}` must be positive")]
    ZeroLinking { point: String, a: String, b: String },
    #[error("point `{point}`: linking pair `{a}`/`{b}` is not a pair of distinct incident components")]
    BadLinkingPair { point: String, a: String, b: String },
    #[error("Bezout fails for `{a}` and `{b}`: local linking numbers sum to {declared}, degrees give {expected}")]
    Bezout { a: String, b: String, declared: u64, expected: u64 },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("cycle `{cycle}`: declared internal support {declared:?} differs from the walk's components {walk:?}")]
    SupportMismatch { cycle: String, declared: Vec<String>, walk: Vec<String> },
    #[error("cycle `{cycle}`: component `{component}` of genus {genus} needs {expected} basis cycles, found {found}")]
    BasisSize { cycle: String, component: String, genus: u32, expected: usize, found: usize },
    #[error("cycle `{cycle}`: basis given for `{component}`, which is not in the internal support")]
    BasisOutsideSupport { cycle: String, component: String },
    #[error("cycle `{cycle}`: no braid or class realizes `{name}`")]
    MissingRealization { cycle: String, name: String },
    #[error("cannot delete `{0}`: it lies on the cycle")]
    DeleteOnCycle(String),
}

pub type Result<T> = std::result::Result<T, CurveError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub degree: u32,
    pub genus: u32,
    /// Display name of the meridian, e.g. `x3`.
    pub meridian: Option<String>,
}

impl Component {
    pub fn new(id: impl Into<String>, degree: u32, genus: u32) -> Self {
        Component { id: id.into(), degree, genus, meridian: None }
    }

    pub fn with_meridian(mut self, name: impl Into<String>) -> Self {
        self.meridian = Some(name.into());
        self
    }

    pub fn meridian_name(&self) -> String {
        self.meridian.clone().unwrap_or_else(|| format!("m_{}", self.id))
    }
}

/// A singular point as written in input: incident component ids and the
/// local linking numbers of incident pairs. Pairs left out default to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub id: String,
    pub components: Vec<String>,
    pub linking: Vec<(String, String, u32)>,
}

impl PointSpec {
    pub fn new<S: Into<String>>(id: impl Into<String>, components: impl IntoIterator<Item = S>) -> Self {
        PointSpec { id: id.into(), components: components.into_iter().map(Into::into).collect(), linking: Vec::new() }
    }

    pub fn lk(mut self, a: impl Into<String>, b: impl Into<String>, value: u32) -> Self {
        self.linking.push((a.into(), b.into(), value));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPoint {
    pub id: String,
    /// Incident components, sorted by index.
    pub incidences: Vec<usize>,
    /// Local linking number per incident pair `(i, j)` with `i < j`.
    pub linking: BTreeMap<(usize, usize), u32>,
    /// Added to fill a Bezout deficit rather than declared.
    pub generic: bool,
}

impl SingularPoint {
    pub fn lk(&self, a: usize, b: usize) -> Option<u32> {
        self.linking.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn contains(&self, c: usize) -> bool {
        self.incidences.binary_search(&c).is_ok()
    }

    /// Incidence data relabelled through a component map, in a canonical order.
    fn signature(&self, map: &[usize]) -> (Vec<usize>, Vec<(usize, usize, u32)>) {
        let mut inc: Vec<usize> = self.incidences.iter().map(|&c| map[c]).collect();
        inc.sort_unstable();
        let mut lks: Vec<(usize, usize, u32)> = self
            .linking
            .iter()
            .map(|(&(a, b), &v)| (map[a].min(map[b]), map[a].max(map[b]), v))
            .collect();
        lks.sort_unstable();
        (inc, lks)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutPair {
    pub a: String,
    pub b: String,
    pub declared: u64,
    pub expected: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveCombinatorics {
    name: String,
    components: Vec<Component>,
    points: Vec<SingularPoint>,
}

impl CurveCombinatorics {
    pub fn new(name: impl Into<String>, components: Vec<Component>, points: &[PointSpec]) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for c in &components {
            if !ids.insert(c.id.clone()) {
                return Err(CurveError::DuplicateId(c.id.clone()));
            }
            if c.degree == 0 {
                return Err(CurveError::ZeroDegree(c.id.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = components.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let mut resolved = Vec::with_capacity(points.len());
        for p in points {
            if !ids.insert(p.id.clone()) {
                return Err(CurveError::DuplicateId(p.id.clone()));
            }
            let lookup = |c: &str| {
                index.get(c).copied().ok_or_else(|| CurveError::DanglingComponent { point: p.id.clone(), component: c.to_string() })
            };
            let mut incidences = p.components.iter().map(|c| lookup(c)).collect::<Result<Vec<_>>>()?;
            incidences.sort_unstable();
            incidences.dedup();
            if incidences.is_empty() {
                return Err(CurveError::EmptyPoint(p.id.clone()));
            }
            let mut linking: BTreeMap<(usize, usize), u32> =
                incidences.iter().tuple_combinations().map(|(&a, &b)| ((a, b), 1)).collect();
            for (a, b, v) in &p.linking {
                let (ia, ib) = (lookup(a)?, lookup(b)?);
                let key = (ia.min(ib), ia.max(ib));
                if ia == ib || !linking.contains_key(&key) {
                    return Err(CurveError::BadLinkingPair { point: p.id.clone(), a: a.clone(), b: b.clone() });
                }
                if *v == 0 {
                    return Err(CurveError::ZeroLinking { point: p.id.clone(), a: a.clone(), b: b.clone() });
                }
                linking.insert(key, *v);
            }
            resolved.push(SingularPoint { id: p.id.clone(), incidences, linking, generic: false });
        }
        Ok(CurveCombinatorics { name: name.into(), components, points: resolved })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn points(&self) -> &[SingularPoint] {
        &self.points
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn vertex(&self, id: &str) -> Option<Vertex> {
        self.component_index(id)
            .map(Vertex::Component)
            .or_else(|| self.point_index(id).map(Vertex::Point))
    }

    pub fn vertex_id(&self, v: Vertex) -> &str {
        match v {
            Vertex::Component(c) => &self.components[c].id,
            Vertex::Point(p) => &self.points[p].id,
        }
    }

    pub fn is_line_arrangement(&self) -> bool {
        self.components.iter().all(|c| c.degree == 1 && c.genus == 0)
    }

    /// Sum of local linking numbers against the product of degrees, for every
    /// pair of distinct components.
    pub fn bezout_pairs(&self) -> Vec<BezoutPair> {
        let n = self.components.len();
        (0..n)
            .tuple_combinations()
            .map(|(a, b)| {
                let declared = self.points.iter().filter_map(|p| p.lk(a, b)).map(u64::from).sum();
                let expected = u64::from(self.components[a].degree) * u64::from(self.components[b].degree);
                BezoutPair { a: self.components[a].id.clone(), b: self.components[b].id.clone(), declared, expected }
            })
            .collect()
    }

    pub fn validate_bezout(&self) -> Result<()> {
        match self.bezout_pairs().into_iter().find(|p| p.declared != p.expected) {
            Some(p) => Err(CurveError::Bezout { a: p.a, b: p.b, declared: p.declared, expected: p.expected }),
            None => Ok(()),
        }
    }

    /// Completes the declared points with ordinary nodes: every pair of
    /// components whose local linking numbers fall short of the product of
    /// degrees meets in that many further transversal double points, named
    /// `A.B` (then `A.B#2`, ...).
    pub fn with_generic_nodes(&self) -> Result<Self> {
        let mut out = self.clone();
        for pair in self.bezout_pairs() {
            if pair.declared > pair.expected {
                return Err(CurveError::Bezout { a: pair.a, b: pair.b, declared: pair.declared, expected: pair.expected });
            }
            let a = self.component_index(&pair.a).expect("own component");
            let b = self.component_index(&pair.b).expect("own component");
            for k in 0..pair.expected - pair.declared {
                let id = if k == 0 { format!("{}.{}", pair.a, pair.b) } else { format!("{}.{}#{}", pair.a, pair.b, k + 1) };
                if out.vertex(&id).is_some() {
                    return Err(CurveError::DuplicateId(id));
                }
                out.points.push(SingularPoint {
                    id,
                    incidences: vec![a, b],
                    linking: BTreeMap::from([((a, b), 1)]),
                    generic: true,
                });
            }
        }
        Ok(out)
    }

    /// Removes components. Points left on a single component that were
    /// intersection points before the deletion are smooth and disappear.
    pub fn without_components<S: AsRef<str>>(&self, deleted: &[S]) -> Result<Self> {
        let mut drop = BTreeSet::new();
        for d in deleted {
            let i = self.component_index(d.as_ref()).ok_or_else(|| CurveError::UnknownComponent(d.as_ref().to_string()))?;
            drop.insert(i);
        }
        let remap: BTreeMap<usize, usize> = (0..self.components.len())
            .filter(|i| !drop.contains(i))
            .enumerate()
            .map(|(new, old)| (old, new))
            .collect();
        let components = self.components.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, c)| c.clone()).collect();
        let points = self
            .points
            .iter()
            .filter_map(|p| {
                let incidences: Vec<usize> = p.incidences.iter().filter_map(|c| remap.get(c).copied()).collect();
                if incidences.is_empty() || (incidences.len() == 1 && p.incidences.len() > 1) {
                    return None;
                }
                let linking = p
                    .linking
                    .iter()
                    .filter_map(|(&(a, b), &v)| Some(((*remap.get(&a)?, *remap.get(&b)?), v)))
                    .collect();
                Some(SingularPoint { id: p.id.clone(), incidences, linking, generic: p.generic })
            })
            .collect();
        Ok(CurveCombinatorics { name: self.name.clone(), components, points })
    }

    pub fn incidence_graph(&self) -> IncidenceGraph {
        incidence_graph(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Component(usize),
    Point(usize),
}

/// Bipartite graph with an edge between a component and a point whenever the
/// point lies on the component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceGraph {
    component_count: usize,
    point_count: usize,
    /// `(component, point)` pairs, sorted.
    edges: Vec<(usize, usize)>,
}

pub fn incidence_graph(c: &CurveCombinatorics) -> IncidenceGraph {
    let mut edges: Vec<(usize, usize)> = c
        .points()
        .iter()
        .enumerate()
        .flat_map(|(p, pt)| pt.incidences.iter().map(move |&comp| (comp, p)))
        .collect();
    edges.sort_unstable();
    IncidenceGraph { component_count: c.components().len(), point_count: c.points().len(), edges }
}

impl IncidenceGraph {
    pub fn component_vertices(&self) -> usize {
        self.component_count
    }

    pub fn point_vertices(&self) -> usize {
        self.point_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        match v {
            Vertex::Component(c) => c < self.component_count,
            Vertex::Point(p) => p < self.point_count,
        }
    }

    pub fn adjacent(&self, a: Vertex, b: Vertex) -> bool {
        match (a, b) {
            (Vertex::Component(c), Vertex::Point(p)) | (Vertex::Point(p), Vertex::Component(c)) => {
                self.edges.binary_search(&(c, p)).is_ok()
            }
            _ => false,
        }
    }
}

/// Closed walk, stored without repeating the base vertex and considered up
/// to cyclic rotation. A single vertex is the walk of a cycle that avoids the
/// singular points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    vertices: Vec<Vertex>,
}

impl Walk {
    /// Accepts the vertex sequence with or without the base vertex repeated
    /// at the end.
    pub fn closed(mut vertices: Vec<Vertex>) -> Self {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Walk { vertices }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn components(&self) -> BTreeSet<usize> {
        self.vertices
            .iter()
            .filter_map(|v| match v {
                Vertex::Component(c) => Some(*c),
                Vertex::Point(_) => None,
            })
            .collect()
    }

    pub fn points(&self) -> BTreeSet<usize> {
        self.vertices
            .iter()
            .filter_map(|v| match v {
                Vertex::Point(p) => Some(*p),
                Vertex::Component(_) => None,
            })
            .collect()
    }

    pub fn validate(&self, g: &IncidenceGraph) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(CurveError::InvalidWalk("empty walk".into()));
        }
        if let Some(v) = self.vertices.iter().find(|v| !g.contains_vertex(**v)) {
            return Err(CurveError::InvalidWalk(format!("vertex {v:?} is not in the graph")));
        }
        if self.vertices.len() == 1 {
            return match self.vertices[0] {
                Vertex::Component(_) => Ok(()),
                Vertex::Point(_) => Err(CurveError::InvalidWalk("a single-vertex walk must be a component".into())),
            };
        }
        for (a, b) in self.vertices.iter().circular_tuple_windows() {
            if !g.adjacent(*a, *b) {
                return Err(CurveError::InvalidWalk(format!("no edge between {a:?} and {b:?}")));
            }
        }
        Ok(())
    }
}

/// Whether the closed walk is null-homotopic in the graph: cancel immediate
/// backtracks `u, v, u` cyclically until nothing cancels. The fundamental
/// group of a graph is free, so the walk is contractible exactly when this
/// reduces it to one vertex.
pub fn is_contractible(w: &Walk, g: &IncidenceGraph) -> Result<bool> {
    w.validate(g)?;
    let mut cyc = w.vertices.clone();
    loop {
        match cyc.len() {
            1 => return Ok(true),
            2 => return Ok(true),
            n => match (0..n).find(|&i| cyc[(i + n - 1) % n] == cyc[(i + 1) % n]) {
                Some(i) => {
                    // Drop the turning vertex and the duplicate after it.
                    let j = (i + 1) % n;
                    let (first, second) = if i < j { (j, i) } else { (i, j) };
                    cyc.remove(first);
                    cyc.remove(second);
                }
                None => return Ok(false),
            },
        }
    }
}

/// How a cycle's own class or a basis cycle's class is obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realization {
    /// Braid of the link over the cycle, with its strand labels.
    Braid { word: BraidWord, labeling: StrandLabeling },
    /// Coefficients on meridians of curve components, given directly.
    Class(BTreeMap<String, i64>),
}

/// A minimal cycle, declared through its projection walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSpec {
    pub name: String,
    /// Vertex ids of the closed projection walk.
    pub walk: Vec<String>,
    /// Declared internal support; must equal the components on the walk.
    pub internal_support: BTreeSet<String>,
    /// Ordered basis-cycle names per internal-support component.
    pub genus_basis: BTreeMap<String, Vec<String>>,
    /// Realization name giving the class of the cycle itself.
    pub cycle_class: Option<String>,
    pub realizations: BTreeMap<String, Realization>,
}

impl CycleSpec {
    pub fn projection(&self, curve: &CurveCombinatorics) -> Result<Walk> {
        let vertices = self
            .walk
            .iter()
            .map(|id| curve.vertex(id).ok_or_else(|| CurveError::UnknownVertex(id.clone())))
            .collect::<Result<Vec<_>>>()?;
        let w = Walk::closed(vertices);
        w.validate(&curve.incidence_graph())?;
        Ok(w)
    }

    pub fn validate(&self, curve: &CurveCombinatorics) -> Result<()> {
        let w = self.projection(curve)?;
        let walk_ids: BTreeSet<String> = w.components().iter().map(|&c| curve.components()[c].id.clone()).collect();
        if walk_ids != self.internal_support {
            return Err(CurveError::SupportMismatch {
                cycle: self.name.clone(),
                declared: self.internal_support.iter().cloned().collect(),
                walk: walk_ids.into_iter().collect(),
            });
        }
        for comp in self.genus_basis.keys() {
            if !self.internal_support.contains(comp) {
                return Err(CurveError::BasisOutsideSupport { cycle: self.name.clone(), component: comp.clone() });
            }
        }
        for id in &self.internal_support {
            let c = &curve.components()[curve.component_index(id).expect("walk component")];
            let found = self.genus_basis.get(id).map_or(0, Vec::len);
            let expected = 2 * c.genus as usize;
            if found != expected {
                return Err(CurveError::BasisSize { cycle: self.name.clone(), component: id.clone(), genus: c.genus, expected, found });
            }
        }
        for name in self.genus_basis.values().flatten().chain(&self.cycle_class) {
            if !self.realizations.contains_key(name) {
                return Err(CurveError::MissingRealization { cycle: self.name.clone(), name: name.clone() });
            }
        }
        Ok(())
    }

    /// Basis names in order: components in curve order, then basis order.
    pub fn basis_names(&self, curve: &CurveCombinatorics) -> Vec<String> {
        curve
            .components()
            .iter()
            .filter_map(|c| self.genus_basis.get(&c.id))
            .flatten()
            .cloned()
            .collect()
    }
}

/// Support and complement of a cycle, as component index sets.
///
/// The support is the internal support together with every component through
/// a singular point the walk visits; the complement is everything else.
pub fn supports(spec: &CycleSpec, c: &CurveCombinatorics) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    spec.validate(c)?;
    let w = spec.projection(c)?;
    let mut support = w.components();
    for p in w.points() {
        support.extend(c.points()[p].incidences.iter().copied());
    }
    let complement = (0..c.components().len()).filter(|i| !support.contains(i)).collect();
    Ok((support, complement))
}

/// A component bijection, `map[i]` being the image of component `i`.
pub type ComponentMap = Vec<usize>;

fn point_signatures(c: &CurveCombinatorics, map: &[usize]) -> Vec<(Vec<usize>, Vec<(usize, usize, u32)>)> {
    let mut sigs: Vec<_> = c.points().iter().map(|p| p.signature(map)).collect();
    sigs.sort_unstable();
    sigs
}

/// All bijections `a -> b` preserving degree, genus and the multiset of
/// singular-point incidence data, extending the given pinned pairs. Brute
/// force over permutations, in lexicographic order of the free images.
pub fn combinatorial_isomorphisms(a: &CurveCombinatorics, b: &CurveCombinatorics, pinned: &[(usize, usize)]) -> Vec<ComponentMap> {
    let n = a.components().len();
    if n != b.components().len() || a.points().len() != b.points().len() {
        return Vec::new();
    }
    let identity: Vec<usize> = (0..n).collect();
    let target = point_signatures(b, &identity);
    let pinned_src: BTreeMap<usize, usize> = pinned.iter().copied().collect();
    let pinned_dst: BTreeSet<usize> = pinned.iter().map(|p| p.1).collect();
    if pinned_src.len() != pinned.len() || pinned_dst.len() != pinned.len() {
        return Vec::new();
    }
    let free_src: Vec<usize> = (0..n).filter(|i| !pinned_src.contains_key(i)).collect();
    let free_dst: Vec<usize> = (0..n).filter(|i| !pinned_dst.contains(i)).collect();
    let same = |i: usize, j: usize| {
        let (x, y) = (&a.components()[i], &b.components()[j]);
        x.degree == y.degree && x.genus == y.genus
    };
    if pinned.iter().any(|&(i, j)| i >= n || j >= n || !same(i, j)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for perm in free_dst.iter().copied().permutations(free_src.len()) {
        if !free_src.iter().zip(&perm).all(|(&i, &j)| same(i, j)) {
            continue;
        }
        let mut map = vec![0; n];
        for (&i, &j) in &pinned_src {
            map[i] = j;
        }
        for (&i, &j) in free_src.iter().zip(&perm) {
            map[i] = j;
        }
        if point_signatures(a, &map) == target {
            out.push(map);
        }
    }
    out
}

/// Automorphisms of the combinatorics fixing `fixed` pointwise.
pub fn combinatorial_automorphisms(c: &CurveCombinatorics, fixed: &BTreeSet<usize>) -> Vec<ComponentMap> {
    let pins: Vec<(usize, usize)> = fixed.iter().map(|&i| (i, i)).collect();
    combinatorial_isomorphisms(c, c, &pins)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum WalkStep {
    Component(usize),
    Point(Vec<usize>, Vec<(usize, usize, u32)>),
}

fn walk_steps(c: &CurveCombinatorics, w: &Walk, map: &[usize]) -> Vec<WalkStep> {
    w.vertices()
        .iter()
        .map(|v| match *v {
            Vertex::Component(i) => WalkStep::Component(map[i]),
            Vertex::Point(p) => {
                let (inc, lks) = c.points()[p].signature(map);
                WalkStep::Point(inc, lks)
            }
        })
        .collect()
}

/// Whether `map` carries walk `wa` on `a` onto walk `wb` on `b`, up to
/// rotation. Point vertices are matched through their incidence data.
pub fn walk_maps_to(map: &[usize], a: &CurveCombinatorics, wa: &Walk, b: &CurveCombinatorics, wb: &Walk) -> bool {
    let identity: Vec<usize> = (0..b.components().len()).collect();
    let sa = walk_steps(a, wa, map);
    let sb = walk_steps(b, wb, &identity);
    if sa.len() != sb.len() {
        return false;
    }
    (0..sb.len()).any(|r| sa.iter().enumerate().all(|(i, s)| *s == sb[(i + r) % sb.len()]))
}

impl fmt::Display for CurveCombinatorics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "curve {}", self.name)?;
        for c in &self.components {
            writeln!(f, "  {} deg {} genus {}", c.id, c.degree, c.genus)?;
        }
        for p in &self.points {
            let inc: Vec<&str> = p.incidences.iter().map(|&i| self.components[i].id.as_str()).collect();
            writeln!(f, "  {}: {}{}", p.id, inc.join(" "), if p.generic { " (node)" } else { "" })?;
        }
        Ok(())
    }
}
