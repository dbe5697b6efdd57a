//! Finitely generated abelian groups given by integer relation matrices.
//!
//! A group is `Z^n / R` where the rows of the relation matrix `R` span the
//! relation lattice. Elements are stored in generator coordinates and compared
//! through the Smith normal form of `R`: with `U R V = D`, an element `e` (a row
//! vector) has SNF coordinates `e V`, and each coordinate is reduced modulo the
//! matching diagonal entry of `D`. That reduced vector is the [`Canonical`]
//! form and is unique per coset.
//!
//! All arithmetic is checked `i64`; overflow surfaces as
//! [`AbelianError::Overflow`] instead of wrapping.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("integer overflow during {0}")]
    Overflow(&'static str),
    #[error("rows of a matrix must all have length {expected}, row {row} has {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator images violate relation {relation}: not a homomorphism")]
    NotHomomorphism { relation: usize },
    #[error("subgroup and element live in different groups")]
    AmbientMismatch,
    #[error("group is infinite, enumeration refused")]
    Infinite,
}

pub type Result<T> = std::result::Result<T, AbelianError>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(AbelianError::Overflow("addition"))
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(AbelianError::Overflow("multiplication"))
}

fn neg(a: i64) -> Result<i64> {
    a.checked_neg().ok_or(AbelianError::Overflow("negation"))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

fn lcm(a: i64, b: i64) -> Result<i64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    mul(a / gcd(a, b), b).map(i64::abs)
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// Builds a matrix from rows; `cols` fixes the width so that an empty
    /// list of rows still has a well-defined shape.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(AbelianError::Ragged { row: i, expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &IntMatrix) -> Result<Self> {
        if self.cols != below.cols {
            return Err(AbelianError::DimensionMismatch { expected: self.cols, found: below.cols });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(IntMatrix { rows: self.rows + below.rows, cols: self.cols, data })
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(AbelianError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, rhs[(k, j)])?)?;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.rows {
            return Err(AbelianError::DimensionMismatch { expected: self.rows, found: v.len() });
        }
        let mut out = vec![0i64; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = add(*o, mul(a, self[(i, j)])?)?;
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(AbelianError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> = self.row_vectors().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = a[i][j]
                        .checked_mul(a[k][k])
                        .zip(a[i][k].checked_mul(a[k][j]))
                        .and_then(|(x, y)| x.checked_sub(y))
                        .ok_or(AbelianError::Overflow("determinant"))?;
                    a[i][j] = t / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| AbelianError::Overflow("determinant"))
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for c in 0..self.cols {
            let v = add(self[(dst, c)], mul(k, self[(src, c)])?)?;
            self[(dst, c)] = v;
        }
        Ok(())
    }

    /// `col[dst] += k * col[src]`
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for r in 0..self.rows {
            let v = add(self[(r, dst)], mul(k, self[(r, src)])?)?;
            self[(r, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<()> {
        for c in 0..self.cols {
            self[(i, c)] = neg(self[(i, c)])?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:>4}")).collect();
            writeln!(f, "[{}]", row.join(""))?;
        }
        Ok(())
    }
}

/// Smith normal form `U A V = D` of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside it.
    pub v_inv: IntMatrix,
}

impl Snf {
    /// The `min(rows, cols)` diagonal entries of `D`.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|&&x| x != 0).count()
    }
}

/// Position of the nonzero entry of smallest absolute value in the
/// submatrix `a[t.., t..]`, ties broken by lowest row then lowest column.
fn smallest_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(u64, usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a[(i, j)].unsigned_abs();
            if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                best = Some((x, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Computes `U`, `D`, `V` with `U m V = D`, both transforms unimodular and
/// `D` diagonal with nonnegative entries forming a divisibility chain.
///
/// Pivots are chosen by smallest absolute value, then lowest index, so the
/// output is a deterministic function of the input.
pub fn smith_normal_form(m: &IntMatrix) -> Result<Snf> {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    let mut v_inv = IntMatrix::identity(m.cols());
    let steps = m.rows().min(m.cols());

    for t in 0..steps {
        let Some((pr, pc)) = smallest_pivot(&a, t) else { break };
        a.swap_rows(t, pr);
        u.swap_rows(t, pr);
        a.swap_cols(t, pc);
        v.swap_cols(t, pc);
        v_inv.swap_rows(t, pc);

        loop {
            let p = a[(t, t)];
            let mut clean = true;
            for i in t + 1..a.rows() {
                let q = a[(i, t)] / p;
                if q != 0 {
                    a.add_row_multiple(i, t, -q)?;
                    u.add_row_multiple(i, t, -q)?;
                }
                clean &= a[(i, t)] == 0;
            }
            for j in t + 1..a.cols() {
                let q = a[(t, j)] / p;
                if q != 0 {
                    a.add_col_multiple(j, t, -q)?;
                    v.add_col_multiple(j, t, -q)?;
                    v_inv.add_row_multiple(t, j, q)?;
                }
                clean &= a[(t, j)] == 0;
            }

            if !clean {
                // A remainder smaller than the pivot is left in row or column t.
                let mut best = (a[(t, t)].unsigned_abs(), t, t);
                for i in t + 1..a.rows() {
                    let x = a[(i, t)].unsigned_abs();
                    if x != 0 && x < best.0 {
                        best = (x, i, t);
                    }
                }
                for j in t + 1..a.cols() {
                    let x = a[(t, j)].unsigned_abs();
                    if x != 0 && x < best.0 {
                        best = (x, t, j);
                    }
                }
                let (_, i, j) = best;
                a.swap_rows(t, i);
                u.swap_rows(t, i);
                a.swap_cols(t, j);
                v.swap_cols(t, j);
                v_inv.swap_rows(t, j);
                continue;
            }

            let bad = (t + 1..a.rows())
                .flat_map(|i| (t + 1..a.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| a[(i, j)] % p != 0);
            match bad {
                Some((i, _)) => {
                    a.add_row_multiple(t, i, 1)?;
                    u.add_row_multiple(t, i, 1)?;
                }
                None => break,
            }
        }

        if a[(t, t)] < 0 {
            a.negate_row(t)?;
            u.negate_row(t)?;
        }
    }

    Ok(Snf { u, d: a, v, v_inv })
}

/// Element of a finitely generated abelian group, in generator coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn zero(n: usize) -> Self {
        GroupElement(vec![0; n])
    }

    pub fn unit(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        GroupElement(e)
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero_vector(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn checked_add(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.len() != other.len() {
            return Err(AbelianError::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        self.0.iter().zip(&other.0).map(|(&a, &b)| add(a, b)).collect::<Result<_>>().map(GroupElement)
    }

    pub fn checked_scale(&self, k: i64) -> Result<GroupElement> {
        self.0.iter().map(|&a| mul(a, k)).collect::<Result<_>>().map(GroupElement)
    }

    pub fn checked_neg(&self) -> Result<GroupElement> {
        self.checked_scale(-1)
    }

    pub fn checked_sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.checked_add(&other.checked_neg()?)
    }

    /// Formats as a signed linear combination of `names`, e.g. `x1 - x2`.
    pub fn display_with<S: AsRef<str>>(&self, names: &[S]) -> String {
        let mut out = String::new();
        for (c, name) in self.0.iter().zip(names) {
            if *c == 0 {
                continue;
            }
            let name = name.as_ref();
            let mag = c.unsigned_abs();
            let term = if mag == 1 { name.to_string() } else { format!("{mag}{name}") };
            if out.is_empty() {
                if *c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if *c < 0 { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// SNF-coordinate representative; unique per coset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Canonical(pub Vec<i64>);

impl Canonical {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// Invariant-factor decomposition `Z^free_rank x Z_{t1} x Z_{t2} x ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupShape {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl fmt::Display for GroupShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        for &t in &self.torsion {
            *counts.entry(t).or_default() += 1;
        }
        for (t, k) in counts {
            parts.push(if k == 1 { format!("Z_{t}") } else { format!("(Z_{t})^{k}") });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// `Z^n` modulo the row lattice of a relation matrix, with its SNF computed
/// eagerly at construction.
#[derive(Clone, Debug)]
pub struct FgAbelianGroup {
    generators: usize,
    relations: IntMatrix,
    snf: Snf,
    /// Modulus per SNF coordinate; 0 marks a free coordinate.
    moduli: Vec<i64>,
}

impl PartialEq for FgAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.relations == other.relations
    }
}

impl Eq for FgAbelianGroup {}

/// Quotient of the free abelian group on `n` generators by the rows of `relations`.
pub fn quotient(n: usize, relations: &IntMatrix) -> Result<FgAbelianGroup> {
    FgAbelianGroup::new(n, relations.clone())
}

impl FgAbelianGroup {
    pub fn new(n: usize, relations: IntMatrix) -> Result<Self> {
        if relations.cols() != n {
            return Err(AbelianError::DimensionMismatch { expected: n, found: relations.cols() });
        }
        let snf = smith_normal_form(&relations)?;
        let diag = snf.diagonal();
        let moduli = (0..n).map(|i| diag.get(i).copied().unwrap_or(0)).collect();
        Ok(FgAbelianGroup { generators: n, relations, snf, moduli })
    }

    pub fn free(n: usize) -> Self {
        Self::new(n, IntMatrix::zeros(0, n)).expect("empty relation matrix")
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn snf(&self) -> &Snf {
        &self.snf
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn shape(&self) -> GroupShape {
        GroupShape {
            free_rank: self.moduli.iter().filter(|&&d| d == 0).count(),
            torsion: self.moduli.iter().copied().filter(|&d| d > 1).collect(),
        }
    }

    pub fn free_rank(&self) -> usize {
        self.shape().free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.iter().all(|&d| d == 1)
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.moduli.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
    }

    /// Exponent of the torsion subgroup (1 when torsion-free).
    pub fn torsion_exponent(&self) -> Result<i64> {
        self.moduli.iter().filter(|&&d| d > 1).try_fold(1i64, |acc, &d| lcm(acc, d))
    }

    fn check_len(&self, e: &GroupElement) -> Result<()> {
        if e.len() != self.generators {
            return Err(AbelianError::DimensionMismatch { expected: self.generators, found: e.len() });
        }
        Ok(())
    }

    /// Canonical form in SNF coordinates: `e V` with coordinate `i` reduced
    /// into `[0, d_i)` where `d_i > 0`, and left untouched on free coordinates.
    pub fn canonicalize(&self, e: &GroupElement) -> Result<Canonical> {
        self.check_len(e)?;
        let mut y = self.snf.v.left_apply(&e.0)?;
        for (c, &d) in y.iter_mut().zip(&self.moduli) {
            if d > 0 {
                *c = c.rem_euclid(d);
            }
        }
        Ok(Canonical(y))
    }

    /// Generator-coordinate element whose canonical form is `c`.
    pub fn representative(&self, c: &Canonical) -> Result<GroupElement> {
        self.snf.v_inv.left_apply(&c.0).map(GroupElement)
    }

    pub fn is_zero(&self, e: &GroupElement) -> Result<bool> {
        Ok(self.canonicalize(e)?.is_zero())
    }

    pub fn equal(&self, a: &GroupElement, b: &GroupElement) -> Result<bool> {
        Ok(self.canonicalize(a)? == self.canonicalize(b)?)
    }

    /// Order of an element, `None` when it has infinite order.
    pub fn element_order(&self, e: &GroupElement) -> Result<Option<i64>> {
        let c = self.canonicalize(e)?;
        let mut order = 1i64;
        for (&y, &d) in c.0.iter().zip(&self.moduli) {
            if d == 0 {
                if y != 0 {
                    return Ok(None);
                }
            } else if y != 0 {
                order = lcm(order, d / gcd(d, y))?;
            }
        }
        Ok(Some(order))
    }

    /// Reduces each generator coordinate into a symmetric window modulo the
    /// order of that generator. The result lies in the same coset.
    pub fn short_representative(&self, e: &GroupElement) -> Result<GroupElement> {
        self.check_len(e)?;
        let mut out = e.0.clone();
        for (k, c) in out.iter_mut().enumerate() {
            if let Some(o) = self.element_order(&GroupElement::unit(self.generators, k))? {
                let mut r = c.rem_euclid(o);
                if 2 * r > o {
                    r -= o;
                }
                *c = r;
            }
        }
        Ok(GroupElement(out))
    }

    /// Quotient of this group by the subgroup generated by `extra`.
    pub fn quotient_by(&self, extra: &[GroupElement]) -> Result<FgAbelianGroup> {
        for e in extra {
            self.check_len(e)?;
        }
        let rows: Vec<Vec<i64>> = extra.iter().map(|e| e.0.clone()).collect();
        let more = IntMatrix::from_rows(self.generators, &rows)?;
        FgAbelianGroup::new(self.generators, self.relations.stack(&more)?)
    }

    /// Whether `a -> sum a_i images[i]` is injective on `Z^k`.
    pub fn is_injective(&self, images: &[GroupElement]) -> Result<bool> {
        Ok(self.kernel_basis(images)?.iter().all(|r| r.iter().all(|&x| x == 0)))
    }

    /// Lattice spanning the kernel of `Z^k -> self`, `a -> sum a_i images[i]`.
    ///
    /// Uses the left kernel of the stacked matrix `[images; relations]`: rows
    /// of `U` past the rank annihilate it, and their first `k` entries span
    /// the kernel.
    pub fn kernel_basis(&self, images: &[GroupElement]) -> Result<Vec<Vec<i64>>> {
        for e in images {
            self.check_len(e)?;
        }
        let k = images.len();
        let rows: Vec<Vec<i64>> = images.iter().map(|e| e.0.clone()).collect();
        let stacked = IntMatrix::from_rows(self.generators, &rows)?.stack(&self.relations)?;
        let snf = smith_normal_form(&stacked)?;
        let rank = snf.rank();
        Ok((rank..stacked.rows())
            .map(|i| snf.u.row(i)[..k].to_vec())
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect())
    }
}

/// Subgroup of an ambient group given by generators.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: FgAbelianGroup,
    generators: Vec<GroupElement>,
    cokernel: FgAbelianGroup,
}

impl Subgroup {
    pub fn new(ambient: &FgAbelianGroup, generators: Vec<GroupElement>) -> Result<Self> {
        let cokernel = ambient.quotient_by(&generators)?;
        Ok(Subgroup { ambient: ambient.clone(), generators, cokernel })
    }

    pub fn ambient(&self) -> &FgAbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Ambient group modulo this subgroup.
    pub fn cokernel(&self) -> &FgAbelianGroup {
        &self.cokernel
    }

    pub fn contains(&self, e: &GroupElement) -> Result<bool> {
        self.cokernel.is_zero(e)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        if self.ambient != other.ambient {
            return Err(AbelianError::AmbientMismatch);
        }
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Subgroup) -> Result<bool> {
        Ok(self.is_subgroup_of(other)? && other.is_subgroup_of(self)?)
    }

    pub fn is_finite(&self) -> Result<bool> {
        for g in &self.generators {
            if self.ambient.element_order(g)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All elements as `(canonical form, representative)` pairs, sorted by
    /// canonical form. Representatives come from a breadth-first walk over
    /// `+-generators`, so they are short combinations of the generators.
    pub fn elements(&self) -> Result<Vec<(Canonical, GroupElement)>> {
        self.coset_elements(&GroupElement::zero(self.ambient.generators()))
    }

    /// Elements of `offset + self`, same conventions as [`Subgroup::elements`].
    pub fn coset_elements(&self, offset: &GroupElement) -> Result<Vec<(Canonical, GroupElement)>> {
        if !self.is_finite()? {
            return Err(AbelianError::Infinite);
        }
        let mut seen: BTreeMap<Canonical, GroupElement> = BTreeMap::new();
        let mut queue = VecDeque::new();
        seen.insert(self.ambient.canonicalize(offset)?, offset.clone());
        queue.push_back(offset.clone());
        while let Some(cur) = queue.pop_front() {
            for g in &self.generators {
                for step in [g.clone(), g.checked_neg()?] {
                    let next = cur.checked_add(&step)?;
                    let key = self.ambient.canonicalize(&next)?;
                    if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(key) {
                        e.insert(next.clone());
                        queue.push_back(next);
                    }
                }
            }
        }
        seen.into_iter()
            .map(|(k, v)| Ok((k, self.ambient.short_representative(&v)?)))
            .collect()
    }
}

/// Homomorphism between presented groups, given by generator images.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Checks that every source relation maps to zero in the target.
    pub fn new(source: &FgAbelianGroup, target: &FgAbelianGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.generators() {
            return Err(AbelianError::DimensionMismatch { expected: source.generators(), found: images.len() });
        }
        for img in &images {
            target.check_len(img)?;
        }
        let hom = Homomorphism { source: source.clone(), target: target.clone(), images };
        for r in 0..source.relations().rows() {
            let image = hom.image_of(source.relations().row(r))?;
            if !target.is_zero(&image)? {
                return Err(AbelianError::NotHomomorphism { relation: r });
            }
        }
        Ok(hom)
    }

    pub fn identity(g: &FgAbelianGroup) -> Self {
        let n = g.generators();
        let images = (0..n).map(|k| GroupElement::unit(n, k)).collect();
        Homomorphism { source: g.clone(), target: g.clone(), images }
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    fn image_of(&self, coeffs: &[i64]) -> Result<GroupElement> {
        let mut acc = GroupElement::zero(self.target.generators());
        for (&c, img) in coeffs.iter().zip(&self.images) {
            if c != 0 {
                acc = acc.checked_add(&img.checked_scale(c)?)?;
            }
        }
        Ok(acc)
    }

    /// Linear extension applied to `e`, in target generator coordinates.
    pub fn apply(&self, e: &GroupElement) -> Result<GroupElement> {
        self.source.check_len(e)?;
        self.image_of(&e.0)
    }

    pub fn apply_canonical(&self, e: &GroupElement) -> Result<Canonical> {
        self.target.canonicalize(&self.apply(e)?)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Homomorphism) -> Result<Homomorphism> {
        let images = self.images.iter().map(|i| next.apply(i)).collect::<Result<Vec<_>>>()?;
        Homomorphism::new(&self.source, &next.target, images)
    }

    pub fn negated(&self) -> Result<Homomorphism> {
        let images = self.images.iter().map(GroupElement::checked_neg).collect::<Result<Vec<_>>>()?;
        Ok(Homomorphism { source: self.source.clone(), target: self.target.clone(), images })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn check_snf(a: &IntMatrix) -> Snf {
        let s = smith_normal_form(a).unwrap();
        assert_eq!(s.u.mul(a).unwrap().mul(&s.v).unwrap(), s.d);
        assert_eq!(s.u.determinant().unwrap().abs(), 1);
        assert_eq!(s.v.determinant().unwrap().abs(), 1);
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        s
    }

    #[test]
    fn identity_is_its_own_normal_form() {
        let s = check_snf(&IntMatrix::identity(2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn tangent_cubic_relations() {
        let a = m(2, &[&[3, 0], &[0, 3], &[1, 1]]);
        let s = check_snf(&a);
        assert_eq!(s.diagonal(), vec![1, 3]);
        let g = quotient(2, &a).unwrap();
        assert_eq!(g.shape(), GroupShape { free_rank: 0, torsion: vec![3] });
        let x1 = GroupElement(vec![1, 0]);
        let x2 = GroupElement(vec![0, 1]);
        assert!(g.is_zero(&x1.checked_add(&x2).unwrap()).unwrap());
        // x2 = -x1, so 2x1 = -x1 = x2 while 2x1 and -x2 = x1 differ.
        assert!(g.equal(&x1.checked_scale(2).unwrap(), &x2).unwrap());
        assert!(g.equal(&x1.checked_scale(2).unwrap(), &x1.checked_neg().unwrap()).unwrap());
        assert!(!g.equal(&x1.checked_scale(2).unwrap(), &x2.checked_neg().unwrap()).unwrap());
    }

    #[test]
    fn degree_relation_shapes() {
        let g = quotient(2, &m(2, &[&[1, 1]])).unwrap();
        assert_eq!(g.shape(), GroupShape { free_rank: 1, torsion: vec![] });
        let g = quotient(5, &m(5, &[&[1, 1, 1, 1, 1]])).unwrap();
        assert_eq!(g.shape(), GroupShape { free_rank: 4, torsion: vec![] });
        let g = quotient(0, &IntMatrix::zeros(0, 0)).unwrap();
        assert!(g.is_trivial());
        assert_eq!(g.order(), Some(1));
        let g = quotient(3, &m(3, &[&[4, 6, 2]])).unwrap();
        assert_eq!(g.shape(), GroupShape { free_rank: 2, torsion: vec![2] });
    }

    #[test]
    fn zero_rows_and_columns() {
        let s = check_snf(&IntMatrix::zeros(2, 3));
        assert_eq!(s.diagonal(), vec![0, 0]);
        let s = check_snf(&IntMatrix::zeros(0, 3));
        assert!(s.diagonal().is_empty());
    }

    #[test]
    fn divisibility_needs_row_mixing() {
        let s = check_snf(&m(2, &[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal(), vec![1, 6]);
        let s = check_snf(&m(3, &[&[6, 0, 0], &[0, 10, 0], &[0, 0, 15]]));
        assert_eq!(s.diagonal(), vec![1, 30, 30]);
    }

    #[test]
    fn snf_is_deterministic() {
        let a = m(3, &[&[4, -6, 2], &[7, 1, -3], &[0, 5, 5]]);
        assert_eq!(smith_normal_form(&a).unwrap(), smith_normal_form(&a).unwrap());
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX / 2 + 7;
        let a = m(2, &[&[big, big - 1], &[big - 3, big]]);
        let r = smith_normal_form(&a).and_then(|s| s.u.mul(&a));
        assert!(matches!(r, Err(AbelianError::Overflow(_))), "{r:?}");
    }

    #[test]
    fn canonical_form_is_idempotent_and_constant_on_cosets() {
        let g = quotient(3, &m(3, &[&[2, 4, 0], &[0, 3, 3]])).unwrap();
        assert!(g.canonicalize(&GroupElement::zero(3)).unwrap().is_zero());
        let e = GroupElement(vec![5, -7, 11]);
        let c = g.canonicalize(&e).unwrap();
        let rep = g.representative(&c).unwrap();
        assert_eq!(g.canonicalize(&rep).unwrap(), c);
        let shifted = e.checked_add(&GroupElement(vec![2, 4, 0])).unwrap().checked_sub(&GroupElement(vec![0, 6, 6])).unwrap();
        assert_eq!(g.canonicalize(&shifted).unwrap(), c);
        assert!(matches!(g.canonicalize(&GroupElement(vec![1])), Err(AbelianError::DimensionMismatch { .. })));
    }

    #[test]
    fn membership() {
        let g = quotient(5, &m(5, &[&[1, 1, 1, 1, 1], &[3, 0, 0, 0, 0], &[0, 3, 0, 0, 0], &[0, 0, 3, 0, 0], &[0, 0, 0, 3, 0], &[0, 0, 0, 0, 3]])).unwrap();
        let g1 = GroupElement(vec![0, 1, -1, 0, 0]);
        let g2 = GroupElement(vec![0, 0, 0, -1, 1]);
        let s = Subgroup::new(&g, vec![g1.clone(), g2.clone()]).unwrap();
        assert!(s.contains(&GroupElement::zero(5)).unwrap());
        assert!(s.contains(&g1).unwrap());
        assert!(s.contains(&GroupElement(vec![0, 1, -1, -1, 1])).unwrap());
        assert!(!s.contains(&GroupElement(vec![1, -1, 0, 0, 0])).unwrap());
        assert_eq!(s.elements().unwrap().len(), 9);
    }

    #[test]
    fn kernel_of_basis_map() {
        let g = quotient(2, &m(2, &[&[1, 1], &[3, 0], &[0, 3]])).unwrap();
        assert!(!g.is_injective(&[GroupElement(vec![0, 0]), GroupElement(vec![1, -1])]).unwrap());
        let z = FgAbelianGroup::free(2);
        assert!(z.is_injective(&[GroupElement(vec![1, 0]), GroupElement(vec![1, 1])]).unwrap());
        assert!(!z.is_injective(&[GroupElement(vec![1, 0]), GroupElement(vec![2, 0])]).unwrap());
        let basis = z.kernel_basis(&[GroupElement(vec![1, 0]), GroupElement(vec![2, 0])]).unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0], -2 * basis[0][1]);
    }

    #[test]
    fn homomorphisms() {
        let g = quotient(2, &m(2, &[&[1, 1], &[3, 0], &[0, 3]])).unwrap();
        let e = GroupElement(vec![2, 5]);
        let id = Homomorphism::identity(&g);
        assert_eq!(id.apply_canonical(&e).unwrap(), g.canonicalize(&e).unwrap());
        let neg = id.negated().unwrap();
        assert_eq!(neg.apply_canonical(&e).unwrap(), g.canonicalize(&e.checked_neg().unwrap()).unwrap());
        let swap = Homomorphism::new(&g, &g, vec![GroupElement(vec![0, 1]), GroupElement(vec![1, 0])]).unwrap();
        assert_eq!(swap.apply(&e).unwrap(), GroupElement(vec![5, 2]));
        let bad = Homomorphism::new(&g, &g, vec![GroupElement(vec![1, 0]), GroupElement(vec![1, 0])]);
        assert!(matches!(bad, Err(AbelianError::NotHomomorphism { .. })));
    }

    #[test]
    fn display() {
        let names = ["x1", "x2", "x3"];
        assert_eq!(GroupElement(vec![1, -1, 0]).display_with(&names), "x1 - x2");
        assert_eq!(GroupElement(vec![-1, 0, 2]).display_with(&names), "-x1 + 2x3");
        assert_eq!(GroupElement(vec![0, 0, 0]).display_with(&names), "0");
        assert_eq!(GroupShape { free_rank: 0, torsion: vec![3, 3, 3, 3] }.to_string(), "(Z_3)^4");
        assert_eq!(GroupShape { free_rank: 4, torsion: vec![] }.to_string(), "Z^4");
    }
}
