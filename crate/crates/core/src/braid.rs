//! Braid words, their closures and linking numbers between closure
//! components.
//!
//! Strand positions are numbered from 1 in the text format and in component
//! names (`s1`, `s2`, ...), and from 0 internally. Words are read left to
//! right; the closure is oriented by the word.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianError, FgAbelianGroup, GroupElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("braid needs at least one strand")]
    NoStrands,
    #[error("generator index {index} out of range for {strands} strands")]
    LetterOutOfRange { index: i64, strands: usize },
    #[error("closure component {0} does not exist")]
    NoSuchComponent(usize),
    #[error("linking number of a component with itself is undefined")]
    SameComponent,
    #[error("crossings between components {a} and {b} sum to odd value {sum}")]
    OddCrossingSum { a: usize, b: usize, sum: i64 },
    #[error("labeling has {found} entries, closure has {expected} components")]
    LabelingMismatch { expected: usize, found: usize },
    #[error("labeling must mark exactly one component as the cycle, found {0}")]
    CycleMarker(usize),
    #[error("no meridian image for curve component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Group(#[from] AbelianError),
}

pub type Result<T> = std::result::Result<T, BraidError>;

/// Sign of the crossing drawn for the positive generator `σ_i`.
///
/// Published braid words do not agree on this, so it travels with the word.
/// `Negative` is the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaSign {
    #[default]
    Negative,
    Positive,
}

impl SigmaSign {
    fn factor(self) -> i64 {
        match self {
            SigmaSign::Negative => -1,
            SigmaSign::Positive => 1,
        }
    }
}

impl fmt::Display for SigmaSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaSign::Negative => "negative",
            SigmaSign::Positive => "positive",
        })
    }
}

impl FromStr for SigmaSign {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "negative" => Ok(SigmaSign::Negative),
            "positive" => Ok(SigmaSign::Positive),
            other => Err(format!("expected `positive` or `negative`, found `{other}`")),
        }
    }
}

/// `σ_index^(±1)`, with `index` counted from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(index: usize, inverse: bool) -> Self {
        Letter { index, inverse }
    }

    pub fn signed(self) -> i64 {
        if self.inverse {
            -(self.index as i64)
        } else {
            self.index as i64
        }
    }

    fn exponent(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
    sigma_sign: SigmaSign,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        if let Some(l) = letters.iter().find(|l| l.index == 0 || l.index >= strands) {
            return Err(BraidError::LetterOutOfRange { index: l.signed(), strands });
        }
        Ok(BraidWord { strands, letters, sigma_sign: SigmaSign::default() })
    }

    /// Word from signed generator indices, `-2` meaning `σ_2^-1`.
    pub fn from_signed(strands: usize, word: &[i64]) -> Result<Self> {
        let letters = word
            .iter()
            .map(|&w| {
                if w == 0 {
                    return Err(BraidError::LetterOutOfRange { index: 0, strands });
                }
                Ok(Letter::new(w.unsigned_abs() as usize, w < 0))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(strands, letters)
    }

    pub fn trivial(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    pub fn with_sigma_sign(mut self, sign: SigmaSign) -> Self {
        self.sigma_sign = sign;
        self
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn sigma_sign(&self) -> SigmaSign {
        self.sigma_sign
    }

    pub fn signed_letters(&self) -> Vec<i64> {
        self.letters.iter().map(|l| l.signed()).collect()
    }

    /// Crossing sign contributed by a letter under this word's convention.
    pub fn crossing_sign(&self, l: Letter) -> i64 {
        l.exponent() * self.sigma_sign.factor()
    }

    /// Visits every crossing as `(sign, strand_a, strand_b)`, strands named by
    /// their start position.
    pub fn crossings(&self) -> impl Iterator<Item = (i64, usize, usize)> + '_ {
        let mut at: Vec<usize> = (0..self.strands).collect();
        self.letters.iter().map(move |&l| {
            let i = l.index - 1;
            let (a, b) = (at[i], at[i + 1]);
            at.swap(i, i + 1);
            (self.crossing_sign(l), a, b)
        })
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.signed_letters().iter().map(i64::to_string).collect();
        write!(f, "B{}[{}]", self.strands, w.join(" "))
    }
}

/// Components of the closure of a braid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosurePartition {
    /// `permutation[p]` is the final position of the strand starting at `p`.
    permutation: Vec<usize>,
    /// Start positions of each component, sorted; components ordered by their
    /// smallest start position.
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

impl ClosurePartition {
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component containing the strand that starts at `position` (0-based).
    pub fn component_of(&self, position: usize) -> usize {
        self.component_of[position]
    }

    /// `s<k>` with `k` the 1-based smallest start position.
    pub fn name(&self, component: usize) -> String {
        format!("s{}", self.components[component][0] + 1)
    }
}

pub fn closure_components(b: &BraidWord) -> ClosurePartition {
    let n = b.strands();
    let mut at: Vec<usize> = (0..n).collect();
    for l in b.letters() {
        at.swap(l.index - 1, l.index);
    }
    let mut permutation = vec![0; n];
    for (pos, &strand) in at.iter().enumerate() {
        permutation[strand] = pos;
    }
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut cycle = Vec::new();
        let mut p = start;
        while component_of[p] == usize::MAX {
            component_of[p] = id;
            cycle.push(p);
            p = permutation[p];
        }
        cycle.sort_unstable();
        components.push(cycle);
    }
    ClosurePartition { permutation, components, component_of }
}

/// Linking number of closure components `a` and `c`: half the signed count of
/// crossings between them.
pub fn linking_number(b: &BraidWord, p: &ClosurePartition, a: usize, c: usize) -> Result<i64> {
    for x in [a, c] {
        if x >= p.len() {
            return Err(BraidError::NoSuchComponent(x));
        }
    }
    if a == c {
        return Err(BraidError::SameComponent);
    }
    let doubled: i64 = b
        .crossings()
        .filter(|&(_, s, t)| {
            let (cs, ct) = (p.component_of(s), p.component_of(t));
            (cs == a && ct == c) || (cs == c && ct == a)
        })
        .map(|(sign, _, _)| sign)
        .sum();
    if doubled % 2 != 0 {
        return Err(BraidError::OddCrossingSum { a, b: c, sum: doubled });
    }
    Ok(doubled / 2)
}

/// Role of a closure component in the link.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrandLabel {
    /// The cycle itself.
    Cycle,
    /// A strand of the support other than the cycle; its meridian maps to 0.
    Dropped,
    /// A strand of the named curve component.
    Component(String),
}

impl fmt::Display for StrandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrandLabel::Cycle => f.write_str("*"),
            StrandLabel::Dropped => f.write_str("0"),
            StrandLabel::Component(c) => f.write_str(c),
        }
    }
}

/// One label per closure component, in closure-component order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrandLabeling {
    labels: Vec<StrandLabel>,
}

impl StrandLabeling {
    pub fn new(labels: Vec<StrandLabel>) -> Result<Self> {
        let cycles = labels.iter().filter(|l| **l == StrandLabel::Cycle).count();
        if cycles != 1 {
            return Err(BraidError::CycleMarker(cycles));
        }
        Ok(StrandLabeling { labels })
    }

    pub fn labels(&self) -> &[StrandLabel] {
        &self.labels
    }

    pub fn cycle(&self) -> usize {
        self.labels.iter().position(|l| *l == StrandLabel::Cycle).expect("checked at construction")
    }

    /// Marks strands of the given curve components as dropped.
    pub fn dropping<S: AsRef<str>>(&self, deleted: &[S]) -> Self {
        let labels = self
            .labels
            .iter()
            .map(|l| match l {
                StrandLabel::Component(c) if deleted.iter().any(|d| d.as_ref() == c) => StrandLabel::Dropped,
                other => other.clone(),
            })
            .collect();
        StrandLabeling { labels }
    }

    fn check(&self, p: &ClosurePartition) -> Result<()> {
        if self.labels.len() != p.len() {
            return Err(BraidError::LabelingMismatch { expected: p.len(), found: self.labels.len() });
        }
        Ok(())
    }
}

/// Linking numbers of the cycle with every other kept component.
pub fn gamma_dot(b: &BraidWord, p: &ClosurePartition, labeling: &StrandLabeling) -> Result<BTreeMap<usize, i64>> {
    labeling.check(p)?;
    let cycle = labeling.cycle();
    let mut out = BTreeMap::new();
    for (c, label) in labeling.labels().iter().enumerate() {
        if matches!(label, StrandLabel::Component(_)) {
            out.insert(c, linking_number(b, p, cycle, c)?);
        }
    }
    Ok(out)
}

/// Image of the cycle in the target group: the sum over kept components of
/// `lk(cycle, c)` times the meridian of the component labelling `c`.
pub fn hat_gamma(
    b: &BraidWord,
    labeling: &StrandLabeling,
    target: &FgAbelianGroup,
    meridians: &BTreeMap<String, GroupElement>,
) -> Result<GroupElement> {
    let p = closure_components(b);
    let dot = gamma_dot(b, &p, labeling)?;
    let mut acc = GroupElement::zero(target.generators());
    for (c, lk) in dot {
        let StrandLabel::Component(id) = &labeling.labels()[c] else { unreachable!() };
        let m = meridians.get(id).ok_or_else(|| BraidError::UnknownComponent(id.clone()))?;
        acc = acc.checked_add(&m.checked_scale(lk)?)?;
    }
    Ok(acc)
}
