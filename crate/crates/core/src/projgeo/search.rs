//! Backtracking search for factorizations of small projective and affine geometries.
//!
//! The search keeps, for every point, its role (free, in `U`, in `V`) and whether it is
//! already covered by a joining line. The smallest free uncovered point `x` is resolved by
//! branching: `x` joins `U`, `x` joins `V`, or `x` is covered by one specific pair `(u, v)`
//! on a line through `x`. Adding a point immediately covers the interiors of its new joining
//! lines; a branch dies as soon as a point would be covered twice or a joining line would
//! pass through `U` or `V`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use super::point_count;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::linalg::{key_order, FVec, Space};

/// Largest geometry searched without an explicit override.
pub const DEFAULT_SEARCH_CEILING: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    /// PG(n-1, q): points are 1-dimensional subspaces, lines have `q + 1` points.
    Projective,
    /// AG(n, q): points are vectors, lines are cosets of 1-dimensional subspaces.
    Affine,
}

impl GeometryKind {
    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Projective => "projective",
            GeometryKind::Affine => "affine",
        }
    }
}

/// `(a + b + a b (k - 2), point count)` where `k` is the number of points on a line.
///
/// Each joining line contributes `k - 2` covered points, so a factorization with `|U| = a` and
/// `|V| = b` needs the two sides equal.
pub fn counting_identity(kind: GeometryKind, q: u32, n: usize, a: u128, b: u128) -> Option<(u128, u128)> {
    let (inner, total) = match kind {
        GeometryKind::Projective => (q as u128 - 1, point_count(q, n)?),
        GeometryKind::Affine => (q as u128 - 2, (q as u128).checked_pow(n as u32)?),
    };
    let lhs = a.checked_mul(b)?.checked_mul(inner)?.checked_add(a)?.checked_add(b)?;
    Some((lhs, total))
}

/// Points of a geometry together with the interior of every line through two of them.
pub struct Geometry {
    kind: GeometryKind,
    field: FieldSpec,
    n: usize,
    points: Vec<FVec>,
    width: usize,
    // interior[(i * len + j) * width ..]: the other points on the line through i and j
    interior: Vec<u32>,
    // through[x]: pairs i < j whose line has x in its interior
    through: Vec<Vec<(u32, u32)>>,
}

impl Geometry {
    pub fn new(kind: GeometryKind, field: &FieldSpec, n: usize) -> Result<Self> {
        let space = Space::new(field.clone(), n);
        let points = match kind {
            GeometryKind::Projective => space.projective_points()?,
            GeometryKind::Affine => space.vectors()?.collect(),
        };
        let q = field.q() as usize;
        let width = match kind {
            GeometryKind::Projective => q - 1,
            GeometryKind::Affine => q - 2,
        };
        let len = points.len();
        let mut g = Geometry {
            kind,
            field: field.clone(),
            n,
            points,
            width,
            interior: vec![0; len * len * width],
            through: vec![Vec::new(); len],
        };
        let mut w = vec![0; n];
        for i in 0..len {
            for j in 0..len {
                if i == j {
                    continue;
                }
                let (a, b) = (g.points[i].coords(), g.points[j].coords());
                let base = (i * len + j) * width;
                let mut slot = 0;
                for lambda in field.elements() {
                    match kind {
                        // a + lambda b with lambda != 0
                        GeometryKind::Projective if lambda != 0 => {
                            for (t, (&x, &y)) in w.iter_mut().zip(a.iter().zip(b)) {
                                *t = field.add(x, field.mul(lambda, y));
                            }
                            let lead = *w.iter().find(|&&c| c != 0).unwrap();
                            let inv = field.inv(lead)?;
                            for t in w.iter_mut() {
                                *t = field.mul(inv, *t);
                            }
                        }
                        // a + lambda (b - a) with lambda not in {0, 1}
                        GeometryKind::Affine if lambda > 1 => {
                            for (t, (&x, &y)) in w.iter_mut().zip(a.iter().zip(b)) {
                                *t = field.add(x, field.mul(lambda, field.sub(y, x)));
                            }
                        }
                        _ => continue,
                    }
                    g.interior[base + slot] = g.index_of(&w).expect("point of the geometry") as u32;
                    slot += 1;
                }
                if i < j {
                    for s in 0..width {
                        let x = g.interior[base + s] as usize;
                        g.through[x].push((i as u32, j as u32));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in key order: normalized representatives, or vectors for affine geometries.
    pub fn points(&self) -> &[FVec] {
        &self.points
    }

    pub fn index_of(&self, coords: &[Elem]) -> Option<usize> {
        self.points.binary_search_by(|p| key_order(p.coords(), coords)).ok()
    }

    /// Points strictly between `i` and `j` on their line.
    pub fn interior(&self, i: usize, j: usize) -> &[u32] {
        let base = (i * self.len() + j) * self.width;
        &self.interior[base..base + self.width]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Stop at the first solution in depth-first order.
    pub first_only: bool,
    /// Place the smallest point in `U` at the root (when `U` is nonempty). Every
    /// factorization is equivalent under a collineation to one found this way.
    pub fix_root: bool,
    /// Refuse geometries with more points than this.
    pub max_points: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { first_only: false, fix_root: true, max_points: DEFAULT_SEARCH_CEILING }
    }
}

/// Point indices of one solution, each list ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SearchSolution {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub geometry: Geometry,
    pub sizes: (usize, usize),
    /// Sorted by `(u, v)`.
    pub solutions: Vec<SearchSolution>,
    pub nodes: u64,
}

impl Clone for Geometry {
    fn clone(&self) -> Self {
        Geometry {
            kind: self.kind,
            field: self.field.clone(),
            n: self.n,
            points: self.points.clone(),
            width: self.width,
            interior: self.interior.clone(),
            through: self.through.clone(),
        }
    }
}

impl std::fmt::Debug for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} geometry over {:?}^{} ({} points)", self.kind.name(), self.field, self.n, self.len())
    }
}

const FREE: u8 = 0;
const IN_U: u8 = 1;
const IN_V: u8 = 2;

#[derive(Clone)]
struct State {
    role: Vec<u8>,
    covered: Vec<bool>,
    us: Vec<u32>,
    vs: Vec<u32>,
    // points that are neither assigned nor covered
    open: usize,
}

impl State {
    fn new(len: usize) -> Self {
        State { role: vec![FREE; len], covered: vec![false; len], us: Vec::new(), vs: Vec::new(), open: len }
    }

    fn is_open(&self, p: usize) -> bool {
        self.role[p] == FREE && !self.covered[p]
    }

    /// Puts `p` into `U` or `V` and covers its new joining lines; false on any conflict.
    fn add(&mut self, g: &Geometry, p: usize, role: u8) -> bool {
        if !self.is_open(p) {
            return false;
        }
        self.role[p] = role;
        self.open -= 1;
        let others = if role == IN_U { self.vs.len() } else { self.us.len() };
        for k in 0..others {
            let o = if role == IN_U { self.vs[k] } else { self.us[k] } as usize;
            for &w in g.interior(p, o) {
                let w = w as usize;
                if !self.is_open(w) {
                    return false;
                }
                self.covered[w] = true;
                self.open -= 1;
            }
        }
        if role == IN_U { self.us.push(p as u32) } else { self.vs.push(p as u32) }
        true
    }

    fn ensure(&mut self, g: &Geometry, p: usize, role: u8) -> bool {
        self.role[p] == role || self.add(g, p, role)
    }
}

enum Step {
    Solution(SearchSolution),
    DeadEnd,
    Branch(Vec<State>),
}

struct Searcher<'g> {
    g: &'g Geometry,
    a: usize,
    b: usize,
    nodes: AtomicU64,
}

impl Searcher<'_> {
    fn step(&self, st: &State) -> Step {
        self.nodes.fetch_add(1, Ordering::Relaxed);
        let (nu, nv) = (st.us.len(), st.vs.len());
        if nu > self.a || nv > self.b || st.open < (self.a - nu) + (self.b - nv) {
            return Step::DeadEnd;
        }
        let Some(x) = (0..st.role.len()).find(|&p| st.is_open(p)) else {
            if nu == self.a && nv == self.b {
                let mut u: Vec<usize> = st.us.iter().map(|&p| p as usize).collect();
                let mut v: Vec<usize> = st.vs.iter().map(|&p| p as usize).collect();
                u.sort_unstable();
                v.sort_unstable();
                return Step::Solution(SearchSolution { u, v });
            }
            return Step::DeadEnd;
        };
        let mut children = Vec::new();
        for role in [IN_U, IN_V] {
            let room = if role == IN_U { nu < self.a } else { nv < self.b };
            let mut c = st.clone();
            if room && c.add(self.g, x, role) {
                children.push(c);
            }
        }
        for &(s, t) in &self.g.through[x] {
            for (p, q) in [(s, t), (t, s)] {
                let mut c = st.clone();
                if c.ensure(self.g, p as usize, IN_U) && c.ensure(self.g, q as usize, IN_V) {
                    children.push(c);
                }
            }
        }
        Step::Branch(children)
    }

    /// Depth-first; returns true once `first_only` is satisfied.
    fn dfs(&self, st: &State, first_only: bool, out: &mut Vec<SearchSolution>) -> bool {
        match self.step(st) {
            Step::Solution(s) => {
                out.push(s);
                first_only
            }
            Step::DeadEnd => false,
            Step::Branch(children) => children.iter().any(|c| self.dfs(c, first_only, out)),
        }
    }
}

/// All factorizations `(U, V)` with `|U| = a` and `|V| = b` of the given geometry.
///
/// The counting identity is checked first, then the size ceiling; both refusals happen
/// before any search work.
pub fn exhaustive_search(
    kind: GeometryKind,
    field: &FieldSpec,
    n: usize,
    a: usize,
    b: usize,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    let q = field.q();
    let (lhs, rhs) = counting_identity(kind, q, n, a as u128, b as u128).ok_or(Error::SpaceTooLarge { q, n })?;
    if lhs != rhs {
        return Err(Error::CountingIdentity { lhs, rhs });
    }
    if rhs > opts.max_points as u128 {
        return Err(Error::SearchCeiling { points: rhs, ceiling: opts.max_points });
    }
    let g = Geometry::new(kind, field, n)?;
    let searcher = Searcher { g: &g, a, b, nodes: AtomicU64::new(0) };
    let mut root = State::new(g.len());
    if opts.fix_root && a > 0 && !g.is_empty() {
        root.add(&g, 0, IN_U);
    }
    let mut solutions = Vec::new();
    if opts.first_only {
        searcher.dfs(&root, true, &mut solutions);
    } else {
        match searcher.step(&root) {
            Step::Solution(s) => solutions.push(s),
            Step::DeadEnd => {}
            Step::Branch(children) => {
                let parts: Vec<Vec<SearchSolution>> = children
                    .par_iter()
                    .map(|c| {
                        let mut out = Vec::new();
                        searcher.dfs(c, false, &mut out);
                        out
                    })
                    .collect();
                solutions = parts.into_iter().flatten().collect();
            }
        }
        solutions.sort();
    }
    let nodes = searcher.nodes.into_inner();
    Ok(SearchOutcome { geometry: g, sizes: (a, b), solutions, nodes })
}
