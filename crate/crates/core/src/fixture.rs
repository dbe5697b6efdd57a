//! Line-oriented text format for curves, cycles and braids.
//!
//! ```text
//! # free-form comments are kept as metadata
//! [curve]
//! name = tangent cubic
//! implicit_nodes = true
//!
//! [components]
//! C = deg 3 genus 1
//! T1 = deg 1 meridian x1
//!
//! [points]
//! P1 = C T1 ; C:T1=3
//!
//! [braids]
//! b.strands = 3
//! b.word = 1 2 -1 2 1 -2
//! b.sigma = negative
//!
//! [rho]
//! b = T2 * T1
//!
//! [classes]
//! h = T1:1 T2:-1
//!
//! [cycles]
//! gamma.walk = C
//! gamma.support = C
//! gamma.basis.C = a b
//! gamma.class = a
//! ```
//!
//! See `docs/fixture-format.md` for the full grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{closure_components, BraidWord, SigmaSign, StrandLabel, StrandLabeling};
use crate::curve::{Component, CurveCombinatorics, CurveError, CycleSpec, PointSpec, Realization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    /// Malformed line or value.
    Syntax,
    /// Unknown section or key.
    UnknownKey,
    /// Reference to something never defined.
    Dangling,
    /// Braid word, strand count and labelling disagree.
    StrandCount,
    /// Something defined twice.
    Duplicate,
    /// Well-formed but rejected by curve validation.
    Invalid,
}

impl ErrorCode {
    pub fn code(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "E001",
            ErrorCode::UnknownKey => "E002",
            ErrorCode::Dangling => "E003",
            ErrorCode::StrandCount => "E004",
            ErrorCode::Duplicate => "E005",
            ErrorCode::Invalid => "E006",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}:{line}:{col}: {message}", code.code())]
pub struct FixtureError {
    pub code: ErrorCode,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl FixtureError {
    fn new(code: ErrorCode, pos: Pos, message: impl Into<String>) -> Self {
        FixtureError { code, line: pos.line, col: pos.col, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, FixtureError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

impl Pos {
    fn shift(self, by: usize) -> Pos {
        Pos { line: self.line, col: self.col + by }
    }
}

/// A braid with its strand count, crossing convention and strand labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidEntry {
    pub word: BraidWord,
    pub labeling: Option<StrandLabeling>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureDocument {
    pub name: String,
    pub implicit_nodes: bool,
    pub components: Vec<Component>,
    pub points: Vec<PointSpec>,
    pub braids: BTreeMap<String, BraidEntry>,
    pub classes: BTreeMap<String, BTreeMap<String, i64>>,
    pub cycles: Vec<CycleSpec>,
    pub metadata: Vec<String>,
}

impl FixtureDocument {
    /// Combinatorics exactly as declared.
    pub fn declared_curve(&self) -> std::result::Result<CurveCombinatorics, CurveError> {
        CurveCombinatorics::new(self.name.clone(), self.components.clone(), &self.points)
    }

    /// Declared combinatorics, completed with ordinary nodes when the
    /// document asks for it.
    pub fn curve(&self) -> std::result::Result<CurveCombinatorics, CurveError> {
        let c = self.declared_curve()?;
        if self.implicit_nodes {
            c.with_generic_nodes()
        } else {
            Ok(c)
        }
    }

    pub fn cycle(&self, name: &str) -> Option<&CycleSpec> {
        self.cycles.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Curve,
    Components,
    Points,
    Braids,
    Rho,
    Classes,
    Cycles,
}

impl Section {
    fn parse(s: &str) -> Option<Section> {
        Some(match s {
            "curve" => Section::Curve,
            "components" => Section::Components,
            "points" => Section::Points,
            "braids" => Section::Braids,
            "rho" => Section::Rho,
            "classes" => Section::Classes,
            "cycles" => Section::Cycles,
            _ => return None,
        })
    }
}

/// Whitespace-separated tokens with their starting position.
fn tokens(s: &str, at: Pos) -> Vec<(Pos, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() || ch == ',' {
            if let Some(b) = start.take() {
                out.push((at.shift(s[..b].chars().count()), &s[b..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push((at.shift(s[..b].chars().count()), &s[b..]));
    }
    out
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '\'' | '#'))
        && !s.starts_with('-')
        && s != "*"
        && s != "0"
}

fn ident(pos: Pos, s: &str) -> Result<String> {
    if is_ident(s) {
        Ok(s.to_string())
    } else {
        Err(FixtureError::new(ErrorCode::Syntax, pos, format!("`{s}` is not a valid identifier")))
    }
}

fn int<T: std::str::FromStr>(pos: Pos, s: &str) -> Result<T> {
    s.parse().map_err(|_| FixtureError::new(ErrorCode::Syntax, pos, format!("`{s}` is not a valid integer")))
}

#[derive(Default)]
struct BraidDraft {
    pos: Pos,
    strands: Option<(Pos, usize)>,
    word: Option<(Pos, Vec<i64>)>,
    sigma: Option<SigmaSign>,
}

#[derive(Default)]
struct CycleDraft {
    pos: Pos,
    walk: Option<(Pos, Vec<(Pos, String)>)>,
    support: Option<(Pos, Vec<(Pos, String)>)>,
    basis: Vec<(Pos, String, Vec<(Pos, String)>)>,
    class: Option<(Pos, String)>,
}

#[derive(Default)]
struct Draft {
    name: Option<String>,
    implicit_nodes: bool,
    components: Vec<(Pos, Component)>,
    points: Vec<(Pos, PointSpec, Vec<Pos>)>,
    braids: BTreeMap<String, BraidDraft>,
    rho: BTreeMap<String, (Pos, Vec<(Pos, String)>)>,
    classes: BTreeMap<String, (Pos, Vec<(Pos, String, i64)>)>,
    cycles: Vec<(String, CycleDraft)>,
    metadata: Vec<String>,
}

pub fn parse_fixture(text: &str) -> Result<FixtureDocument> {
    let mut d = Draft::default();
    let mut section: Option<Section> = None;
    let mut seen_sections = BTreeSet::new();
    let mut saw_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let indent = raw.len() - raw.trim_start().len();
        let line = raw.trim();
        let pos = Pos { line: line_no, col: indent + 1 };
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            d.metadata.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            continue;
        }
        saw_content = true;
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| FixtureError::new(ErrorCode::Syntax, pos, "section header must end with `]`"))?
                .trim();
            let s = Section::parse(name)
                .ok_or_else(|| FixtureError::new(ErrorCode::UnknownKey, pos.shift(1), format!("unknown section `{name}`")))?;
            if !seen_sections.insert(name.to_string()) {
                return Err(FixtureError::new(ErrorCode::Duplicate, pos, format!("section `{name}` appears twice")));
            }
            section = Some(s);
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(FixtureError::new(ErrorCode::Syntax, pos, "expected `key = value`"));
        };
        let key = line[..eq].trim();
        let value_offset = eq + 1 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        let value = line[eq + 1..].trim();
        let vpos = pos.shift(line[..value_offset].chars().count());
        if key.is_empty() {
            return Err(FixtureError::new(ErrorCode::Syntax, pos, "missing key before `=`"));
        }
        let Some(s) = section else {
            return Err(FixtureError::new(ErrorCode::Syntax, pos, "entry before any section header"));
        };
        match s {
            Section::Curve => parse_curve_entry(&mut d, pos, key, vpos, value)?,
            Section::Components => parse_component(&mut d, pos, key, vpos, value)?,
            Section::Points => parse_point(&mut d, pos, key, vpos, value)?,
            Section::Braids => parse_braid_entry(&mut d, pos, key, vpos, value)?,
            Section::Rho => {
                let name = ident(pos, key)?;
                if d.rho.contains_key(&name) {
                    return Err(FixtureError::new(ErrorCode::Duplicate, pos, format!("labels for `{name}` given twice")));
                }
                let labels = tokens(value, vpos).into_iter().map(|(p, t)| (p, t.to_string())).collect();
                d.rho.insert(name, (pos, labels));
            }
            Section::Classes => {
                let name = ident(pos, key)?;
                if d.classes.contains_key(&name) {
                    return Err(FixtureError::new(ErrorCode::Duplicate, pos, format!("class `{name}` given twice")));
                }
                let mut terms = Vec::new();
                for (p, t) in tokens(value, vpos) {
                    let (id, k) = t
                        .split_once(':')
                        .ok_or_else(|| FixtureError::new(ErrorCode::Syntax, p, format!("expected `component:coefficient`, found `{t}`")))?;
                    terms.push((p, ident(p, id)?, int(p.shift(id.len() + 1), k)?));
                }
                d.classes.insert(name, (pos, terms));
            }
            Section::Cycles => parse_cycle_entry(&mut d, pos, key, vpos, value)?,
        }
    }
    if !saw_content {
        return Err(FixtureError::new(ErrorCode::Syntax, Pos { line: 1, col: 1 }, "empty document"));
    }
    resolve(d)
}

fn parse_curve_entry(d: &mut Draft, pos: Pos, key: &str, vpos: Pos, value: &str) -> Result<()> {
    match key {
        "name" => {
            if d.name.is_some() {
                return Err(FixtureError::new(ErrorCode::Duplicate, pos, "curve name given twice"));
            }
            if value.is_empty() {
                return Err(FixtureError::new(ErrorCode::Syntax, vpos, "empty curve name"));
            }
            d.name = Some(value.to_string());
        }
        "implicit_nodes" => {
            d.implicit_nodes = match value {
                "true" => true,
                "false" => false,
                _ => return Err(FixtureError::new(ErrorCode::Syntax, vpos, "expected `true` or `false`")),
            }
        }
        _ => return Err(FixtureError::new(ErrorCode::UnknownKey, pos, format!("unknown key `{key}` in [curve]"))),
    }
    Ok(())
}

fn parse_component(d: &mut Draft, pos: Pos, key: &str, vpos: Pos, value: &str) -> Result<()> {
    let id = ident(pos, key)?;
    let toks = tokens(value, vpos);
    let (mut degree, mut genus, mut meridian) = (None, None, None);
    let mut it = toks.iter();
    while let Some(&(p, k)) = it.next() {
        let &(vp, v) = it
            .next()
            .ok_or_else(|| FixtureError::new(ErrorCode::Syntax, p, format!("`{k}` needs a value")))?;
        let slot_taken = |taken: bool| {
            if taken {
                Err(FixtureError::new(ErrorCode::Duplicate, p, format!("`{k}` given twice")))
            } else {
                Ok(())
            }
        };
        match k {
            "deg" => {
                slot_taken(degree.is_some())?;
                degree = Some(int::<u32>(vp, v)?);
            }
            "genus" => {
                slot_taken(genus.is_some())?;
                genus = Some(int::<u32>(vp, v)?);
            }
            "meridian" => {
                slot_taken(meridian.is_some())?;
                meridian = Some(ident(vp, v)?);
            }
            _ => return Err(FixtureError::new(ErrorCode::UnknownKey, p, format!("unknown component attribute `{k}`"))),
        }
    }
    let degree = degree.ok_or_else(|| FixtureError::new(ErrorCode::Syntax, vpos, "component needs `deg`"))?;
    let mut c = Component::new(id, degree, genus.unwrap_or(0));
    c.meridian = meridian;
    d.components.push((pos, c));
    Ok(())
}

fn parse_point(d: &mut Draft, pos: Pos, key: &str, vpos: Pos, value: &str) -> Result<()> {
    let id = ident(pos, key)?;
    let (inc, lks) = match value.find(';') {
        Some(i) => (&value[..i], Some((vpos.shift(value[..=i].chars().count()), &value[i + 1..]))),
        None => (value, None),
    };
    let mut spec = PointSpec::new(id, Vec::<String>::new());
    let mut refs = Vec::new();
    for (p, t) in tokens(inc, vpos) {
        spec.components.push(ident(p, t)?);
        refs.push(p);
    }
    if let Some((lpos, lks)) = lks {
        for (p, t) in tokens(lks, lpos) {
            let bad = || FixtureError::new(ErrorCode::Syntax, p, format!("expected `A:B=n`, found `{t}`"));
            let (pair, n) = t.split_once('=').ok_or_else(bad)?;
            let (a, b) = pair.split_once(':').ok_or_else(bad)?;
            spec.linking.push((ident(p, a)?, ident(p, b)?, int(p.shift(pair.len() + 1), n)?));
            refs.push(p);
        }
    }
    d.points.push((pos, spec, refs));
    Ok(())
}

fn parse_braid_entry(d: &mut Draft, pos: Pos, key: &str, vpos: Pos, value: &str) -> Result<()> {
    let (name, field) = key
        .split_once('.')
        .ok_or_else(|| FixtureError::new(ErrorCode::Syntax, pos, "braid keys look like `name.strands`, `name.word`, `name.sigma`"))?;
    let name = ident(pos, name)?;
    let entry = d.braids.entry(name.clone()).or_insert_with(|| BraidDraft { pos, ..BraidDraft::default() });
    let dup = || FixtureError::new(ErrorCode::Duplicate, pos, format!("`{key}` given twice"));
    match field {
        "strands" => {
            if entry.strands.is_some() {
                return Err(dup());
            }
            entry.strands = Some((vpos, int(vpos, value)?));
        }
        "word" => {
            if entry.word.is_some() {
                return Err(dup());
            }
            let letters = tokens(value, vpos).into_iter().map(|(p, t)| int::<i64>(p, t)).collect::<Result<Vec<_>>>()?;
            entry.word = Some((vpos, letters));
        }
        "sigma" => {
            if entry.sigma.is_some() {
                return Err(dup());
            }
            entry.sigma = Some(value.parse().map_err(|_| FixtureError::new(ErrorCode::Syntax, vpos, "expected `negative` or `positive`"))?);
        }
        _ => return Err(FixtureError::new(ErrorCode::UnknownKey, pos, format!("unknown braid field `{field}`"))),
    }
    Ok(())
}

fn parse_cycle_entry(d: &mut Draft, pos: Pos, key: &str, vpos: Pos, value: &str) -> Result<()> {
    let mut parts = key.splitn(3, '.');
    let name = ident(pos, parts.next().unwrap_or_default())?;
    let field = parts.next().ok_or_else(|| FixtureError::new(ErrorCode::Syntax, pos, "cycle keys look like `name.walk`"))?;
    let extra = parts.next();
    let idx = match d.cycles.iter().position(|(n, _)| *n == name) {
        Some(i) => i,
        None => {
            d.cycles.push((name, CycleDraft { pos, ..CycleDraft::default() }));
            d.cycles.len() - 1
        }
    };
    let c = &mut d.cycles[idx].1;
    let list = |s: &str| tokens(s, vpos).into_iter().map(|(p, t)| Ok((p, ident(p, t)?))).collect::<Result<Vec<_>>>();
    let dup = || FixtureError::new(ErrorCode::Duplicate, pos, format!("`{key}` given twice"));
    match (field, extra) {
        ("walk", None) => {
            if c.walk.is_some() {
                return Err(dup());
            }
            let w = list(value)?;
            if w.is_empty() {
                return Err(FixtureError::new(ErrorCode::Syntax, vpos, "empty walk"));
            }
            c.walk = Some((vpos, w));
        }
        ("support", None) => {
            if c.support.is_some() {
                return Err(dup());
            }
            c.support = Some((vpos, list(value)?));
        }
        ("basis", Some(comp)) => {
            let comp = ident(pos, comp)?;
            if c.basis.iter().any(|b| b.1 == comp) {
                return Err(dup());
            }
            c.basis.push((pos, comp, list(value)?));
        }
        ("class", None) => {
            if c.class.is_some() {
                return Err(dup());
            }
            c.class = Some((vpos, ident(vpos, value)?));
        }
        _ => return Err(FixtureError::new(ErrorCode::UnknownKey, pos, format!("unknown cycle key `{key}`"))),
    }
    Ok(())
}

fn resolve(d: Draft) -> Result<FixtureDocument> {
    let name = d.name.clone().unwrap_or_else(|| "curve".to_string());
    let mut ids: BTreeMap<String, Pos> = BTreeMap::new();
    for (pos, c) in &d.components {
        if ids.insert(c.id.clone(), *pos).is_some() {
            return Err(FixtureError::new(ErrorCode::Duplicate, *pos, format!("component `{}` defined twice", c.id)));
        }
    }
    let comp_ids: BTreeSet<String> = d.components.iter().map(|c| c.1.id.clone()).collect();
    for (pos, p, refs) in &d.points {
        if ids.insert(p.id.clone(), *pos).is_some() {
            return Err(FixtureError::new(ErrorCode::Duplicate, *pos, format!("identifier `{}` defined twice", p.id)));
        }
        let mut i = 0;
        for c in &p.components {
            if !comp_ids.contains(c) {
                return Err(FixtureError::new(ErrorCode::Dangling, refs[i], format!("unknown component `{c}`")));
            }
            i += 1;
        }
        for (a, b, _) in &p.linking {
            for x in [a, b] {
                if !comp_ids.contains(x) {
                    return Err(FixtureError::new(ErrorCode::Dangling, refs[i], format!("unknown component `{x}`")));
                }
            }
            if !p.components.contains(a) || !p.components.contains(b) || a == b {
                return Err(FixtureError::new(ErrorCode::Invalid, refs[i], format!("`{a}:{b}` is not a pair of components through `{}`", p.id)));
            }
            i += 1;
        }
    }
    let components: Vec<Component> = d.components.iter().map(|c| c.1.clone()).collect();
    let points: Vec<PointSpec> = d.points.iter().map(|p| p.1.clone()).collect();
    let curve = CurveCombinatorics::new(name.clone(), components.clone(), &points)
        .map_err(|e| FixtureError::new(ErrorCode::Invalid, Pos { line: 1, col: 1 }, e.to_string()))?;
    let mut known_vertices: BTreeSet<String> = ids.keys().cloned().collect();
    if d.implicit_nodes {
        let full = curve.with_generic_nodes().map_err(|e| FixtureError::new(ErrorCode::Invalid, Pos { line: 1, col: 1 }, e.to_string()))?;
        known_vertices.extend(full.points().iter().map(|p| p.id.clone()));
    }

    for (n, (pos, _)) in &d.rho {
        if !d.braids.contains_key(n) {
            return Err(FixtureError::new(ErrorCode::Dangling, *pos, format!("labels given for unknown braid `{n}`")));
        }
    }
    let mut braids = BTreeMap::new();
    for (n, b) in &d.braids {
        let (spos, strands) = b.strands.ok_or_else(|| FixtureError::new(ErrorCode::Syntax, b.pos, format!("braid `{n}` needs `{n}.strands`")))?;
        let (wpos, letters) = b.word.clone().unwrap_or((b.pos, Vec::new()));
        if strands == 0 {
            return Err(FixtureError::new(ErrorCode::StrandCount, spos, "a braid needs at least one strand"));
        }
        let word = BraidWord::from_signed(strands, &letters)
            .map_err(|e| FixtureError::new(ErrorCode::StrandCount, wpos, format!("braid `{n}`: {e}")))?
            .with_sigma_sign(b.sigma.unwrap_or_default());
        let labeling = match d.rho.get(n) {
            None => None,
            Some((rpos, labels)) => {
                let closure = closure_components(&word);
                if labels.len() != closure.len() {
                    return Err(FixtureError::new(
                        ErrorCode::StrandCount,
                        *rpos,
                        format!("braid `{n}` closes up into {} components, {} labels given", closure.len(), labels.len()),
                    ));
                }
                let mut out = Vec::new();
                for (p, t) in labels {
                    out.push(match t.as_str() {
                        "*" => StrandLabel::Cycle,
                        "0" => StrandLabel::Dropped,
                        c if comp_ids.contains(c) => StrandLabel::Component(c.to_string()),
                        c => return Err(FixtureError::new(ErrorCode::Dangling, *p, format!("unknown component `{c}`"))),
                    });
                }
                Some(StrandLabeling::new(out).map_err(|e| FixtureError::new(ErrorCode::Syntax, *rpos, format!("braid `{n}`: {e}")))?)
            }
        };
        braids.insert(n.clone(), BraidEntry { word, labeling });
    }

    let mut classes = BTreeMap::new();
    for (n, (pos, terms)) in &d.classes {
        if braids.contains_key(n) {
            return Err(FixtureError::new(ErrorCode::Duplicate, *pos, format!("`{n}` is both a braid and a class")));
        }
        let mut m = BTreeMap::new();
        for (p, id, k) in terms {
            if !comp_ids.contains(id) {
                return Err(FixtureError::new(ErrorCode::Dangling, *p, format!("unknown component `{id}`")));
            }
            if m.insert(id.clone(), *k).is_some() {
                return Err(FixtureError::new(ErrorCode::Duplicate, *p, format!("`{id}` appears twice in class `{n}`")));
            }
        }
        classes.insert(n.clone(), m);
    }

    let mut cycles = Vec::new();
    for (cname, c) in &d.cycles {
        let (_, walk) = c.walk.clone().ok_or_else(|| FixtureError::new(ErrorCode::Syntax, c.pos, format!("cycle `{cname}` needs `{cname}.walk`")))?;
        for (p, v) in &walk {
            if !known_vertices.contains(v) {
                return Err(FixtureError::new(ErrorCode::Dangling, *p, format!("unknown vertex `{v}`")));
            }
        }
        let walk_ids: Vec<String> = walk.into_iter().map(|w| w.1).collect();
        let internal_support: BTreeSet<String> = match &c.support {
            Some((_, s)) => {
                for (p, id) in s {
                    if !comp_ids.contains(id) {
                        return Err(FixtureError::new(ErrorCode::Dangling, *p, format!("unknown component `{id}`")));
                    }
                }
                s.iter().map(|x| x.1.clone()).collect()
            }
            None => walk_ids.iter().filter(|v| comp_ids.contains(*v)).cloned().collect(),
        };
        let mut realizations = BTreeMap::new();
        let mut realize = |p: Pos, r: &str| -> Result<()> {
            if let Some(b) = braids.get(r) {
                let labeling = b
                    .labeling
                    .clone()
                    .ok_or_else(|| FixtureError::new(ErrorCode::Dangling, p, format!("braid `{r}` has no [rho] labels")))?;
                realizations.insert(r.to_string(), Realization::Braid { word: b.word.clone(), labeling });
            } else if let Some(m) = classes.get(r) {
                realizations.insert(r.to_string(), Realization::Class(m.clone()));
            } else {
                return Err(FixtureError::new(ErrorCode::Dangling, p, format!("no braid or class named `{r}`")));
            }
            Ok(())
        };
        let mut genus_basis = BTreeMap::new();
        for (p, comp, names) in &c.basis {
            if !comp_ids.contains(comp) {
                return Err(FixtureError::new(ErrorCode::Dangling, *p, format!("unknown component `{comp}`")));
            }
            for (np, nm) in names {
                realize(*np, nm)?;
            }
            genus_basis.insert(comp.clone(), names.iter().map(|x| x.1.clone()).collect());
        }
        if let Some((p, r)) = &c.class {
            realize(*p, r)?;
        }
        let spec = CycleSpec {
            name: cname.clone(),
            walk: walk_ids,
            internal_support,
            genus_basis,
            cycle_class: c.class.as_ref().map(|x| x.1.clone()),
            realizations,
        };
        cycles.push(spec);
    }

    Ok(FixtureDocument {
        name,
        implicit_nodes: d.implicit_nodes,
        components,
        points,
        braids,
        classes,
        cycles,
        metadata: d.metadata,
    })
}

/// Normalized text form. Comments move to the top; sections come in a fixed
/// order.
pub fn serialize_fixture(doc: &FixtureDocument) -> String {
    let mut s = String::new();
    for m in &doc.metadata {
        let _ = writeln!(s, "# {m}");
    }
    let _ = writeln!(s, "[curve]\nname = {}\nimplicit_nodes = {}", doc.name, doc.implicit_nodes);
    let _ = writeln!(s, "\n[components]");
    for c in &doc.components {
        let _ = write!(s, "{} = deg {} genus {}", c.id, c.degree, c.genus);
        if let Some(m) = &c.meridian {
            let _ = write!(s, " meridian {m}");
        }
        s.push('\n');
    }
    if !doc.points.is_empty() {
        let _ = writeln!(s, "\n[points]");
        for p in &doc.points {
            let _ = write!(s, "{} = {}", p.id, p.components.join(" "));
            if !p.linking.is_empty() {
                let lks: Vec<String> = p.linking.iter().map(|(a, b, n)| format!("{a}:{b}={n}")).collect();
                let _ = write!(s, " ; {}", lks.join(" "));
            }
            s.push('\n');
        }
    }
    if !doc.braids.is_empty() {
        let _ = writeln!(s, "\n[braids]");
        for (n, b) in &doc.braids {
            let letters: Vec<String> = b.word.signed_letters().iter().map(i64::to_string).collect();
            let _ = writeln!(s, "{n}.strands = {}\n{n}.word = {}\n{n}.sigma = {}", b.word.strands(), letters.join(" "), b.word.sigma_sign());
        }
        if doc.braids.values().any(|b| b.labeling.is_some()) {
            let _ = writeln!(s, "\n[rho]");
            for (n, b) in &doc.braids {
                if let Some(l) = &b.labeling {
                    let labels: Vec<String> = l.labels().iter().map(ToString::to_string).collect();
                    let _ = writeln!(s, "{n} = {}", labels.join(" "));
                }
            }
        }
    }
    if !doc.classes.is_empty() {
        let _ = writeln!(s, "\n[classes]");
        for (n, m) in &doc.classes {
            let terms: Vec<String> = m.iter().map(|(id, k)| format!("{id}:{k}")).collect();
            let _ = writeln!(s, "{n} = {}", terms.join(" "));
        }
    }
    if !doc.cycles.is_empty() {
        let _ = writeln!(s, "\n[cycles]");
        for c in &doc.cycles {
            let _ = writeln!(s, "{}.walk = {}", c.name, c.walk.join(" "));
            let support: Vec<&str> = c.internal_support.iter().map(String::as_str).collect();
            let _ = writeln!(s, "{}.support = {}", c.name, support.join(" "));
            for (comp, names) in &c.genus_basis {
                let _ = writeln!(s, "{}.basis.{comp} = {}", c.name, names.join(" "));
            }
            if let Some(k) = &c.cycle_class {
                let _ = writeln!(s, "{}.class = {k}", c.name);
            }
        }
    }
    s
}

impl fmt::Display for FixtureDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_fixture(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two tangents to a cubic
[curve]
name = small
implicit_nodes = true

[components]
C = deg 3 genus 1
T1 = deg 1 meridian x1
T2 = deg 1 meridian x2

[points]
P1 = C T1 ; C:T1=3
P2 = C T2 ; C:T2=3

[braids]
a.strands = 3
a.word =
b.strands = 3
b.word = 1 2 -1 2 1 -2

[rho]
a = T2 * T1
b = T2 * T1

[cycles]
gamma.walk = C
gamma.basis.C = a b
gamma.class = a
";

    fn err(text: &str) -> FixtureError {
        parse_fixture(text).unwrap_err()
    }

    #[test]
    fn parses_small_document() {
        let doc = parse_fixture(SMALL).unwrap();
        assert_eq!(doc.components.len(), 3);
        assert_eq!(doc.points.len(), 2);
        assert_eq!(doc.metadata, ["two tangents to a cubic"]);
        let c = doc.cycle("gamma").unwrap();
        assert_eq!(c.internal_support, BTreeSet::from(["C".to_string()]));
        assert_eq!(c.realizations.len(), 2);
        assert_eq!(doc.curve().unwrap().points().len(), 3);
        assert_eq!(doc.braids["b"].word.sigma_sign(), SigmaSign::Negative);
    }

    #[test]
    fn round_trip_is_stable() {
        let doc = parse_fixture(SMALL).unwrap();
        let once = serialize_fixture(&doc);
        let again = parse_fixture(&once).unwrap();
        assert_eq!(again, doc);
        assert_eq!(serialize_fixture(&again), once);
    }

    #[test]
    fn error_codes_and_positions() {
        let e = err("");
        assert_eq!((e.code, e.line), (ErrorCode::Syntax, 1));
        let e = err("# only a comment\n");
        assert_eq!(e.code, ErrorCode::Syntax);
        let e = err("[nonsense]\n");
        assert_eq!(e.code, ErrorCode::UnknownKey);
        let e = err("[components]\nC = deg 3 colour red\n");
        assert_eq!((e.code, e.line, e.col), (ErrorCode::UnknownKey, 2, 11));
        let e = err("[components]\nC = deg x\n");
        assert_eq!((e.code, e.line, e.col), (ErrorCode::Syntax, 2, 9));
        let e = err("[components]\nC = deg 3\n[points]\nP = C Z\n");
        assert_eq!((e.code, e.line, e.col), (ErrorCode::Dangling, 4, 7));
        let e = err("[components]\nC = deg 3\nC = deg 1\n");
        assert_eq!((e.code, e.line), (ErrorCode::Duplicate, 3));
        let e = err("[components]\nC = deg 3\n[braids]\nb.strands = 2\nb.word = 1 2\n");
        assert_eq!((e.code, e.line), (ErrorCode::StrandCount, 5));
        let e = err("[components]\nC = deg 3\n[braids]\nb.strands = 2\nb.word = 1\n[rho]\nb = * C\n");
        assert_eq!((e.code, e.line), (ErrorCode::StrandCount, 7));
        let e = err("[components]\nC = deg 3\n[cycles]\ng.walk = C\ng.basis.C = nope\n");
        assert_eq!((e.code, e.line, e.col), (ErrorCode::Dangling, 5, 13));
        let e = err("C = deg 3\n");
        assert_eq!(e.code, ErrorCode::Syntax);
        let e = err("[components]\nC = deg 3\n[cycles]\ng.walk = C X\n");
        assert_eq!(e.code, ErrorCode::Dangling);
        assert!(e.to_string().starts_with("E003:4:"));
    }
}
