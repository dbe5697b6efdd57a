//! Independent oracles and generators shared by the integration suites.
//! Nothing here calls into the algorithms it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;

use rand::Rng;

use curvelink::curve::{Component, CurveCombinatorics, PointSpec, Vertex, Walk};
use curvelink::fixture::{parse_fixture, FixtureDocument};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str) -> FixtureDocument {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture readable");
    parse_fixture(&text).expect("fixture parses")
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn det(m: &[Vec<i128>]) -> i128 {
    // Laplace expansion; only used on minors of at most 5x5.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut total = 0;
    for c in 0..n {
        if m[0][c] == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect()).collect();
        let sign = if c % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][c] * det(&minor);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Invariant factors from determinantal divisors: `d_k = D_k / D_{k-1}` with
/// `D_k` the gcd of all `k x k` minors. Returns the nonzero factors.
pub fn invariant_factors_by_minors(rows: &[Vec<i64>], cols: usize) -> Vec<i64> {
    let m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let r = rows.len();
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=r.min(cols) {
        let mut g = 0i128;
        for rs in subsets(r, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                g = gcd(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push((g / prev) as i64);
        prev = g;
    }
    out
}

/// Diagonal of a Smith form by plain Euclidean elimination: first nonzero
/// pivot, Euclid steps on its row and column, then a gcd/lcm pass for the
/// divisibility chain.
pub fn invariant_factors_by_elimination(rows: &[Vec<i64>], cols: usize) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let nr = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(cols) {
        let Some((pi, pj)) = (t..nr).flat_map(|i| (t..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] != 0) else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            // Smallest entry of row t and column t becomes the pivot.
            let mut best = (a[t][t].abs(), t, t);
            for i in t + 1..nr {
                if a[i][t] != 0 && a[i][t].abs() < best.0 {
                    best = (a[i][t].abs(), i, t);
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 && a[t][j].abs() < best.0 {
                    best = (a[t][j].abs(), t, j);
                }
            }
            a.swap(t, best.1);
            for row in a.iter_mut() {
                row.swap(t, best.2);
            }
            let p = a[t][t];
            for i in t + 1..nr {
                let q = a[i][t].div_euclid(p);
                for j in t..cols {
                    a[i][j] -= q * a[t][j];
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                for row in a.iter_mut() {
                    row[j] -= q * row[t];
                }
            }
            if (t + 1..nr).all(|i| a[i][t] == 0) && (t + 1..cols).all(|j| a[t][j] == 0) {
                break;
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    // Divisibility chain: replace (a, b) by (gcd, lcm) until sorted by division.
    let mut done = false;
    while !done {
        done = true;
        for i in 0..diag.len() {
            for j in i + 1..diag.len() {
                let (x, y) = (diag[i], diag[j]);
                if y % x != 0 {
                    let g = gcd(x, y);
                    diag[i] = g;
                    diag[j] = x / g * y;
                    done = false;
                }
            }
        }
    }
    diag.into_iter().map(|x| x as i64).collect()
}

/// Elements of `Z_{m_1} x ... x Z_{m_k}` reachable from the generators.
pub fn brute_force_span(moduli: &[i64], gens: &[Vec<i64>]) -> BTreeSet<Vec<i64>> {
    let norm = |v: &[i64]| v.iter().zip(moduli).map(|(x, m)| x.rem_euclid(*m)).collect::<Vec<_>>();
    let mut seen = BTreeSet::new();
    let zero = vec![0; moduli.len()];
    seen.insert(zero.clone());
    let mut queue = VecDeque::from([zero]);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = norm(&cur.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<_>>());
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Null-homotopy of a closed walk by free reduction of its word in the
/// non-tree edges of a BFS spanning forest.
pub fn contractible_by_free_group(curve: &CurveCombinatorics, walk: &Walk) -> bool {
    let nc = curve.components().len();
    let id = |v: Vertex| match v {
        Vertex::Component(c) => c,
        Vertex::Point(p) => nc + p,
    };
    let total = nc + curve.points().len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (p, pt) in curve.points().iter().enumerate() {
        for &c in &pt.incidences {
            adj[c].push(nc + p);
            adj[nc + p].push(c);
        }
    }
    let mut tree: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut seen = vec![false; total];
    for root in 0..total {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    tree.insert((u.min(v), u.max(v)));
                    q.push_back(v);
                }
            }
        }
    }
    let vs = walk.vertices();
    if vs.len() <= 1 {
        return true;
    }
    let mut word: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..vs.len() {
        let (u, v) = (id(vs[i]), id(vs[(i + 1) % vs.len()]));
        let e = (u.min(v), u.max(v));
        if !tree.contains(&e) {
            let letter = (e.0, e.1, u < v);
            match word.last() {
                Some(&(a, b, dir)) if (a, b) == (e.0, e.1) && dir != letter.2 => {
                    word.pop();
                }
                _ => word.push(letter),
            }
        }
    }
    // Cyclic cancellation at the ends.
    while word.len() >= 2 {
        let (f, l) = (word[0], word[word.len() - 1]);
        if (f.0, f.1) == (l.0, l.1) && f.2 != l.2 {
            word.pop();
            word.remove(0);
        } else {
            break;
        }
    }
    word.is_empty()
}

/// Linking numbers by tracking which start strand sits at each position, and
/// pairing closure components through a union-find over the permutation.
pub fn linking_oracle(strands: usize, word: &[i64], positive: bool) -> (Vec<usize>, BTreeMap<(usize, usize), i64>) {
    let mut at: Vec<usize> = (0..strands).collect();
    let mut twice: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut crossings: Vec<(usize, usize, i64)> = Vec::new();
    for &l in word {
        let i = l.unsigned_abs() as usize;
        let s = if (l > 0) == positive { 1 } else { -1 };
        crossings.push((at[i - 1], at[i], s));
        at.swap(i - 1, i);
    }
    // at[pos] = start strand ending at pos; the strand starting at pos continues
    // from there, so start strand at[pos] is followed by start strand pos.
    let mut parent: Vec<usize> = (0..strands).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for pos in 0..strands {
        let (a, b) = (find(&mut parent, at[pos]), find(&mut parent, pos));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let comp: Vec<usize> = (0..strands).map(|s| find(&mut parent, s)).collect();
    for (a, b, s) in crossings {
        let (ca, cb) = (comp[a], comp[b]);
        if ca != cb {
            *twice.entry((ca.min(cb), ca.max(cb))).or_default() += s;
        }
    }
    (comp, twice)
}

/// Random braid word in `B_strands`.
pub fn random_word<R: Rng>(rng: &mut R, strands: usize, len: usize) -> Vec<i64> {
    (0..len)
        .map(|_| {
            let i = rng.gen_range(1..strands) as i64;
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect()
}

/// Random combinatorics with components of degree 1..=2 and points chosen
/// so that the result is a valid curve. Not Bezout-complete.
pub fn random_curve<R: Rng>(rng: &mut R, components: usize, points: usize) -> CurveCombinatorics {
    let comps: Vec<Component> = (0..components).map(|i| Component::new(format!("K{i}"), rng.gen_range(1..=2), 0)).collect();
    let pts: Vec<PointSpec> = (0..points)
        .map(|p| {
            let size = rng.gen_range(1..=components.min(3));
            let mut inc: Vec<usize> = (0..components).collect();
            for i in (1..inc.len()).rev() {
                inc.swap(i, rng.gen_range(0..=i));
            }
            inc.truncate(size);
            PointSpec::new(format!("P{p}"), inc.iter().map(|i| format!("K{i}")))
        })
        .collect();
    CurveCombinatorics::new("random", comps, &pts).expect("valid random curve")
}

/// Random closed walk of about `len` steps: a random path that returns to
/// its start by retracing or by an edge back.
pub fn random_walk<R: Rng>(rng: &mut R, curve: &CurveCombinatorics, len: usize) -> Option<Walk> {
    let nc = curve.components().len();
    let starts: Vec<usize> = (0..nc).filter(|&c| curve.points().iter().any(|p| p.contains(c))).collect();
    if starts.is_empty() {
        return None;
    }
    let mut path = vec![Vertex::Component(starts[rng.gen_range(0..starts.len())])];
    for _ in 0..len {
        let cur = *path.last().unwrap();
        let next: Vec<Vertex> = match cur {
            Vertex::Component(c) => curve.points().iter().enumerate().filter(|(_, p)| p.contains(c)).map(|(i, _)| Vertex::Point(i)).collect(),
            Vertex::Point(p) => curve.points()[p].incidences.iter().map(|&c| Vertex::Component(c)).collect(),
        };
        path.push(next[rng.gen_range(0..next.len())]);
    }
    // Close up: walk back along the path, or stop at a component vertex that
    // shares a point with the start.
    let start = path[0];
    if path.len() % 2 == 0 {
        path.pop();
    }
    let last = *path.last().unwrap();
    if last != start {
        let Vertex::Component(s) = start else { unreachable!() };
        let Vertex::Component(l) = last else { unreachable!() };
        match curve.points().iter().position(|p| p.contains(s) && p.contains(l)) {
            Some(p) if rng.gen_bool(0.7) => path.push(Vertex::Point(p)),
            _ => {
                let back: Vec<Vertex> = path[..path.len() - 1].iter().rev().copied().collect();
                path.extend(back);
                path.pop();
            }
        }
    } else {
        path.pop();
    }
    if path.is_empty() {
        path.push(start);
    }
    Some(Walk::closed(path))
}

/// Random line arrangement: `n` lines, a few multiple points on disjoint
/// pairs, completed with nodes.
pub fn random_arrangement<R: Rng>(rng: &mut R, n: usize) -> CurveCombinatorics {
    let comps: Vec<Component> = (0..n).map(|i| Component::new(format!("L{i}"), 1, 0)).collect();
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut pts = Vec::new();
    for k in 0..rng.gen_range(0..=3) {
        let size = rng.gen_range(3..=n.min(4));
        let mut inc: Vec<usize> = (0..n).collect();
        for i in (1..inc.len()).rev() {
            inc.swap(i, rng.gen_range(0..=i));
        }
        inc.truncate(size);
        inc.sort_unstable();
        let pairs: Vec<(usize, usize)> = inc.iter().enumerate().flat_map(|(i, &a)| inc[i + 1..].iter().map(move |&b| (a, b))).collect();
        if pairs.iter().any(|p| used.contains(p)) {
            continue;
        }
        used.extend(pairs);
        pts.push(PointSpec::new(format!("M{k}"), inc.iter().map(|i| format!("L{i}"))));
    }
    CurveCombinatorics::new("arrangement", comps, &pts).expect("valid").with_generic_nodes().expect("Bezout deficit")
}

/// A closed walk around three lines meeting in three distinct points, or a
/// single line when there is no such triangle.
pub fn triangle_walk(arr: &CurveCombinatorics) -> Vec<String> {
    let n = arr.components().len();
    let meet = |a: usize, b: usize| arr.points().iter().position(|p| p.contains(a) && p.contains(b));
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (Some(ab), Some(bc), Some(ca)) = (meet(a, b), meet(b, c), meet(c, a)) else { continue };
                if ab != bc && bc != ca && ab != ca {
                    let id = |i: usize| arr.components()[i].id.clone();
                    let pid = |p: usize| arr.points()[p].id.clone();
                    return vec![id(a), pid(ab), id(b), pid(bc), id(c), pid(ca)];
                }
            }
        }
    }
    vec![arr.components()[0].id.clone()]
}

/// Exact product in i128, for checking transforms whose i64 product may overflow.
pub fn mat_mul_i128(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter().map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect()).collect()
}

pub fn widen(rows: &[Vec<i64>]) -> Vec<Vec<i128>> {
    rows.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect()
}

/// Determinant modulo a prime by Gaussian elimination over `Z_p`.
pub fn det_mod(rows: &[Vec<i64>], p: i128) -> i128 {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| i128::from(x).rem_euclid(p)).collect()).collect();
    let n = a.len();
    let mut det = 1i128;
    let inv = |x: i128| {
        // Fermat inverse.
        let (mut base, mut e, mut acc) = (x, p - 2, 1i128);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r][c] != 0) else { return 0 };
        if r != c {
            a.swap(r, c);
            det = (p - det) % p;
        }
        det = det * a[c][c] % p;
        let iv = inv(a[c][c]);
        for r in c + 1..n {
            let f = a[r][c] * iv % p;
            for k in c..n {
                a[r][k] = (a[r][k] - f * a[c][k]).rem_euclid(p);
            }
        }
    }
    det
}
