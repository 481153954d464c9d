//! Two-dimensional rate-region machinery.
//!
//! Every region handled by this crate lives in the closed positive quadrant
//! and is downward closed. A [`RateRegionPolytope`] is a finite list of
//! [`LinearBound`]s `c1·R1 + c2·R2 ≤ rhs` with `c1, c2 ≥ 0` plus `R1, R2 ≥ 0`.
//! A [`Region`] is either the convex hull of a point set (the inner bound) or
//! the union of several such hulls sampled on a shared `R1` grid (the outer
//! bound).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Feasibility slack used when filtering candidate vertices.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Resolution of the per-point bisection in [`deflation_gap`], in bits.
pub const BISECTION_TOL: f64 = 1e-4;
pub const DEFAULT_FRONTIER_SAMPLES: usize = 512;

const DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub r1: f64,
    pub r2: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { r1: 0.0, r2: 0.0 };

    pub fn new(r1: f64, r2: f64) -> Self {
        Point { r1, r2 }
    }

    /// `((r1 - xi)⁺, (r2 - xi)⁺)`
    pub fn deflate(self, xi: f64) -> Point {
        Point {
            r1: (self.r1 - xi).max(0.0),
            r2: (self.r2 - xi).max(0.0),
        }
    }

    fn dominated_by(self, other: Point, tol: f64) -> bool {
        self.r1 <= other.r1 + tol && self.r2 <= other.r2 + tol
    }

    fn close_to(self, other: Point, tol: f64) -> bool {
        (self.r1 - other.r1).abs() <= tol && (self.r2 - other.r2).abs() <= tol
    }
}

/// z-component of `(a - o) × (b - o)`.
fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

/// `c1·R1 + c2·R2 ≤ rhs` with non-negative, not-both-zero coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearBound {
    pub c1: f64,
    pub c2: f64,
    pub rhs: f64,
}

impl LinearBound {
    pub fn new(c1: f64, c2: f64, rhs: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::invalid("c1/c2", format!("coefficients must be finite and >= 0, got ({c1}, {c2})")));
        }
        if c1 == 0.0 && c2 == 0.0 {
            return Err(Error::invalid("c1/c2", "coefficients must not both be zero"));
        }
        if rhs.is_nan() {
            return Err(Error::invalid("rhs", "must not be NaN"));
        }
        Ok(LinearBound { c1, c2, rhs })
    }

    pub(crate) fn r1(rhs: f64) -> Self {
        LinearBound { c1: 1.0, c2: 0.0, rhs }
    }

    pub(crate) fn r2(rhs: f64) -> Self {
        LinearBound { c1: 0.0, c2: 1.0, rhs }
    }

    pub(crate) fn sum(rhs: f64) -> Self {
        LinearBound { c1: 1.0, c2: 1.0, rhs }
    }

    pub(crate) fn weighted(c1: f64, c2: f64, rhs: f64) -> Self {
        LinearBound { c1, c2, rhs }
    }

    pub fn lhs(&self, p: Point) -> f64 {
        self.c1 * p.r1 + self.c2 * p.r2
    }

    pub fn satisfied_by(&self, p: Point, tol: f64) -> bool {
        self.lhs(p) <= self.rhs + tol
    }
}

/// Intersection of finitely many [`LinearBound`]s with the positive quadrant.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RateRegionPolytope {
    bounds: Vec<LinearBound>,
}

impl RateRegionPolytope {
    pub fn new(bounds: Vec<LinearBound>) -> Self {
        RateRegionPolytope { bounds }
    }

    pub fn bounds(&self) -> &[LinearBound] {
        &self.bounds
    }

    pub fn push(&mut self, b: LinearBound) {
        self.bounds.push(b);
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.r1 >= -tol && p.r2 >= -tol && self.bounds.iter().all(|b| b.satisfied_by(p, tol))
    }

    /// Empty when some right-hand side is negative (or NaN).
    pub fn is_empty(&self) -> bool {
        !self.contains(Point::ORIGIN, FEASIBILITY_TOL)
    }

    pub fn vertices(&self) -> Vec<Point> {
        polytope_vertices(self)
    }

    /// Tightest right-hand side per coefficient pair; bounds with an infinite
    /// right-hand side are dropped.
    fn reduced(&self) -> Vec<LinearBound> {
        let mut out: Vec<LinearBound> = Vec::new();
        for b in self.bounds.iter().filter(|b| b.rhs.is_finite()) {
            match out.iter_mut().find(|o| o.c1 == b.c1 && o.c2 == b.c2) {
                Some(o) => o.rhs = o.rhs.min(b.rhs),
                None => out.push(*b),
            }
        }
        out
    }
}

/// Extreme points of the feasible set, counterclockwise from the origin.
///
/// Every pairwise intersection of bound lines and the two axes is tested
/// for feasibility. The result is empty for an infeasible polytope. The set
/// must be bounded (some bound caps each rate) for the list to describe it.
pub fn polytope_vertices(poly: &RateRegionPolytope) -> Vec<Point> {
    if poly.is_empty() {
        return Vec::new();
    }
    let mut lines = poly.reduced();
    let constraints = lines.clone();
    lines.push(LinearBound { c1: 1.0, c2: 0.0, rhs: 0.0 });
    lines.push(LinearBound { c1: 0.0, c2: 1.0, rhs: 0.0 });

    let mut pts: Vec<Point> = Vec::with_capacity(lines.len() * lines.len() / 2);
    for (k, a) in lines.iter().enumerate() {
        for b in &lines[k + 1..] {
            let det = a.c1 * b.c2 - a.c2 * b.c1;
            if det == 0.0 {
                continue;
            }
            let p = Point {
                r1: (a.rhs * b.c2 - a.c2 * b.rhs) / det,
                r2: (a.c1 * b.rhs - a.rhs * b.c1) / det,
            };
            if p.r1 < -FEASIBILITY_TOL || p.r2 < -FEASIBILITY_TOL {
                continue;
            }
            if constraints.iter().all(|c| c.satisfied_by(p, FEASIBILITY_TOL)) {
                let p = Point::new(p.r1.max(0.0), p.r2.max(0.0));
                if !pts.iter().any(|q| q.close_to(p, DEDUP_TOL)) {
                    pts.push(p);
                }
            }
        }
    }
    convex_hull(&pts)
}

/// Counterclockwise convex hull (Andrew's monotone chain).
///
/// Starts from the lexicographically smallest point; collinear and repeated
/// points are dropped. One or two input points come back unchanged (deduped).
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.iter().copied().filter(|p| p.r1.is_finite() && p.r2.is_finite()).collect();
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Uniform `R1` grid `0, h, 2h, …, r1_max` with `samples` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierGrid {
    pub r1_max: f64,
    pub samples: usize,
}

impl FrontierGrid {
    pub fn new(r1_max: f64, samples: usize) -> Result<Self> {
        if !(r1_max.is_finite() && r1_max >= 0.0) {
            return Err(Error::invalid("r1_max", format!("must be finite and >= 0, got {r1_max}")));
        }
        if samples < 2 {
            return Err(Error::invalid("frontier_samples", "need at least 2 samples"));
        }
        Ok(FrontierGrid { r1_max, samples })
    }

    pub fn r1(&self, k: usize) -> f64 {
        if k + 1 == self.samples {
            self.r1_max
        } else {
            self.r1_max * k as f64 / (self.samples - 1) as f64
        }
    }

    pub fn step(&self) -> f64 {
        self.r1_max / (self.samples - 1) as f64
    }
}

/// `R1 ↦ max R2` sampled on a [`FrontierGrid`]; `-∞` where the region has
/// no point with that `R1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledFrontier {
    grid: FrontierGrid,
    r2: Vec<f64>,
}

impl SampledFrontier {
    pub fn new(grid: FrontierGrid, r2: Vec<f64>) -> Result<Self> {
        if r2.len() != grid.samples {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}-sample grid",
                r2.len(),
                grid.samples
            )));
        }
        Ok(SampledFrontier { grid, r2 })
    }

    pub fn grid(&self) -> FrontierGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.r2
    }

    /// Finite samples as points.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.r2
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(k, &v)| Point::new(self.grid.r1(k), v))
    }

    /// Linear interpolation between neighbouring samples; `None` outside the
    /// grid or where a neighbour is missing.
    pub fn value_at(&self, r1: f64) -> Option<f64> {
        let g = self.grid;
        if r1 < 0.0 || r1 > g.r1_max || !r1.is_finite() {
            return None;
        }
        if g.r1_max == 0.0 {
            return self.r2.iter().copied().find(|v| v.is_finite());
        }
        let pos = r1 / g.step();
        let k = (pos.floor() as usize).min(g.samples - 2);
        let (a, b) = (self.r2[k], self.r2[k + 1]);
        let t = (pos - k as f64).clamp(0.0, 1.0);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => Some(a + t * (b - a)),
            (true, false) if t == 0.0 => Some(a),
            (false, true) if t == 1.0 => Some(b),
            _ => None,
        }
    }
}

/// A downward-closed 2-D rate region.
///
/// The convex form stores its counterclockwise hull and answers membership
/// exactly. The envelope form (a union of convex pieces) stores the extreme
/// points of its pieces that lie on the upper envelope, answering
/// membership from the sampled frontier and those points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    vertices: Vec<Point>,
    frontier: SampledFrontier,
    convex: bool,
}

impl Region {
    /// Hull of `points` together with the origin, sampled on `grid`.
    pub fn convex_hull_on(points: &[Point], grid: FrontierGrid) -> Region {
        let mut all = Vec::with_capacity(points.len() + 1);
        all.push(Point::ORIGIN);
        all.extend_from_slice(points);
        let vertices = convex_hull(&all);
        let r2 = (0..grid.samples)
            .map(|k| upper_boundary(&vertices, grid.r1(k)).unwrap_or(f64::NEG_INFINITY))
            .collect();
        Region {
            vertices,
            frontier: SampledFrontier { grid, r2 },
            convex: true,
        }
    }

    /// Hull of `points` together with the origin, sampled over its own `R1` range.
    pub fn convex_hull(points: &[Point], samples: usize) -> Result<Region> {
        let r1_max = points.iter().map(|p| p.r1).fold(0.0, f64::max);
        Ok(Self::convex_hull_on(points, FrontierGrid::new(r1_max, samples)?))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn frontier(&self) -> &SampledFrontier {
        &self.frontier
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Largest `R2` with `(r1, R2)` in the region. Exact for convex regions,
    /// interpolated from the samples otherwise.
    pub fn max_r2_at(&self, r1: f64) -> Option<f64> {
        if self.convex {
            upper_boundary(&self.vertices, r1)
        } else {
            let from_frontier = self.frontier.value_at(r1);
            let from_vertices = self
                .vertices
                .iter()
                .filter(|v| r1 <= v.r1)
                .map(|v| v.r2)
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            match (from_frontier, from_vertices) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            }
        }
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        contains(self, p, tol)
    }

    /// Fails unless the region holds the origin and its frontier is
    /// non-increasing and reaches down to the `R1` axis.
    pub fn check_downward_closed(&self, tol: f64) -> Result<()> {
        if !self.contains(Point::ORIGIN, tol) {
            return Err(Error::NotDownwardClosed("origin is not in the region".into()));
        }
        let vals = self.frontier.values();
        if vals.iter().any(|v| !v.is_finite() || *v < -tol) {
            return Err(Error::NotDownwardClosed("frontier has gaps or negative samples".into()));
        }
        if let Some(k) = vals.windows(2).position(|w| w[1] > w[0] + tol) {
            return Err(Error::NotDownwardClosed(format!(
                "frontier increases at R1 = {}",
                self.frontier.grid.r1(k + 1)
            )));
        }
        if self.convex {
            let g = self.frontier.grid;
            let corner_r1 = Point::new(g.r1_max, 0.0);
            let corner_r2 = Point::new(0.0, vals[0]);
            let top = self.vertices.iter().map(|v| v.r2).fold(0.0, f64::max);
            if !self.contains(corner_r1, tol) || !self.contains(corner_r2, tol) || vals[0] + tol < top {
                return Err(Error::NotDownwardClosed("hull does not reach both axes".into()));
            }
        }
        Ok(())
    }
}

/// Upper boundary of a convex polygon at `x`. Queries within the
/// feasibility slack of the polygon's `R1` range are clamped onto it.
fn upper_boundary(hull: &[Point], x: f64) -> Option<f64> {
    let lo = hull.iter().map(|p| p.r1).fold(f64::INFINITY, f64::min);
    let hi = hull.iter().map(|p| p.r1).fold(f64::NEG_INFINITY, f64::max);
    if x < lo - FEASIBILITY_TOL || x > hi + FEASIBILITY_TOL {
        return None;
    }
    let x = x.clamp(lo, hi);
    let mut best: Option<f64> = None;
    let mut take = |y: f64| best = Some(best.map_or(y, |b: f64| b.max(y)));
    match hull.len() {
        0 => {}
        1 => {
            if x == hull[0].r1 {
                take(hull[0].r2);
            }
        }
        n => {
            for k in 0..n {
                let a = hull[k];
                let b = hull[(k + 1) % n];
                let (lo, hi) = if a.r1 <= b.r1 { (a, b) } else { (b, a) };
                if x < lo.r1 || x > hi.r1 {
                    continue;
                }
                if hi.r1 == lo.r1 {
                    take(lo.r2.max(hi.r2));
                } else {
                    let t = (x - lo.r1) / (hi.r1 - lo.r1);
                    take(lo.r2 + t * (hi.r2 - lo.r2));
                }
            }
        }
    }
    best
}

/// Point-in-region test with slack `tol`.
pub fn contains(r: &Region, p: Point, tol: f64) -> bool {
    if p.r1 < -tol || p.r2 < -tol {
        return false;
    }
    if r.convex {
        let h = &r.vertices;
        match h.len() {
            0 => false,
            1 => p.close_to(h[0], tol),
            2 => segment_distance(h[0], h[1], p) <= tol,
            n => (0..n).all(|k| {
                let a = h[k];
                let b = h[(k + 1) % n];
                let len = ((b.r1 - a.r1).powi(2) + (b.r2 - a.r2).powi(2)).sqrt();
                cross(a, b, p) >= -tol * len
            }),
        }
    } else {
        if r.vertices.iter().any(|v| p.dominated_by(*v, tol)) {
            return true;
        }
        let g = r.frontier.grid;
        if p.r1 > g.r1_max + tol {
            return false;
        }
        let x = p.r1.clamp(0.0, g.r1_max);
        r.frontier.value_at(x).is_some_and(|y| p.r2 <= y + tol)
    }
}

fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let (dx, dy) = (b.r1 - a.r1, b.r2 - a.r2);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.r1 + t * dx, a.r2 + t * dy);
    ((p.r1 - qx).powi(2) + (p.r2 - qy).powi(2)).sqrt()
}

/// Union of regions sampled on one shared grid, as a pointwise maximum.
///
/// Extreme points of the members are kept when no member reaches above them
/// (by more than the feasibility slack) at the same `R1`.
pub fn envelope_union(members: &[Region]) -> Result<Region> {
    let first = members.first().ok_or(Error::EmptyInput("envelope_union needs at least one region"))?;
    let grid = first.frontier.grid;
    if let Some(m) = members.iter().find(|m| m.frontier.grid != grid) {
        return Err(Error::GridMismatch(format!(
            "expected r1_max={} samples={}, found r1_max={} samples={}",
            grid.r1_max, grid.samples, m.frontier.grid.r1_max, m.frontier.grid.samples
        )));
    }
    let r2: Vec<f64> = (0..grid.samples)
        .map(|k| members.iter().map(|m| m.frontier.r2[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();

    let mut vertices: Vec<Point> = Vec::new();
    for v in members.iter().flat_map(|m| m.vertices.iter().copied()) {
        let on_envelope = members
            .iter()
            .all(|m| m.max_r2_at(v.r1).is_none_or(|y| y <= v.r2 + FEASIBILITY_TOL));
        if on_envelope && !vertices.iter().any(|q| q.close_to(v, DEDUP_TOL)) {
            vertices.push(v);
        }
    }
    vertices.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(a.r2.total_cmp(&b.r2)));
    if vertices.is_empty() {
        vertices.push(Point::ORIGIN);
    }
    Ok(Region {
        vertices,
        frontier: SampledFrontier { grid, r2 },
        convex: false,
    })
}

/// Smallest Definition-style deflation that maps `outer` into `inner`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deflation {
    pub gap: f64,
    pub witness: Point,
}

/// Smallest `ξ` (to within `tol`) such that every candidate point `t` of
/// `outer` satisfies `((t1 - ξ)⁺, (t2 - ξ)⁺) ∈ inner`.
///
/// Candidates are the frontier samples and extreme points of `outer`, plus
/// the points where the diagonal through each inner vertex leaves `outer`.
/// The required deflation is piecewise linear along a straight piece of the
/// outer boundary with breaks only at those diagonal crossings, so for a
/// convex `outer` the maximum is attained at a candidate.
///
/// Each candidate is bisected on `[0, max coordinate of outer]`; the
/// membership predicate is monotone in `ξ` for downward-closed `inner`.
pub fn deflation_gap(inner: &Region, outer: &Region, tol: f64) -> Result<Deflation> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "bisection tolerance must be positive"));
    }
    inner.check_downward_closed(FEASIBILITY_TOL.max(1e-7))?;
    outer.check_downward_closed(FEASIBILITY_TOL.max(1e-7))?;

    let mut candidates: Vec<Point> = outer.frontier.points().chain(outer.vertices.iter().copied()).collect();
    let upper = candidates.iter().map(|p| p.r1.max(p.r2)).fold(0.0, f64::max);
    candidates.extend(
        inner
            .vertices
            .iter()
            .filter(|v| outer.contains(**v, FEASIBILITY_TOL))
            .map(|&v| diagonal_exit(outer, v, upper, tol)),
    );

    let best = candidates
        .par_iter()
        .enumerate()
        .map(|(k, &t)| (required_deflation(inner, t, upper, tol), k))
        .reduce(
            || (0.0, usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let witness = candidates.get(best.1).copied().unwrap_or(Point::ORIGIN);
    Ok(Deflation { gap: best.0, witness })
}

/// Last point of `v + s (1, 1)`, `s ∈ [0, upper]`, inside `outer`.
fn diagonal_exit(outer: &Region, v: Point, upper: f64, tol: f64) -> Point {
    let at = |s: f64| Point::new(v.r1 + s, v.r2 + s);
    let (mut lo, mut hi) = (0.0, upper);
    while hi - lo > tol * 1e-2 {
        let mid = 0.5 * (lo + hi);
        if outer.contains(at(mid), FEASIBILITY_TOL) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

/// Bisection for the smallest `ξ ∈ [0, upper]` with `t` deflated by `ξ` in `inner`.
pub fn required_deflation(inner: &Region, t: Point, upper: f64, tol: f64) -> f64 {
    if inner.contains(t, FEASIBILITY_TOL) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, upper.max(t.r1).max(t.r2));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if inner.contains(t.deflate(mid), FEASIBILITY_TOL) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
