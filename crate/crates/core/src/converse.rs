//! Outer bound.
//!
//! The channel is first placed into one of five orderings of `SNR_j`,
//! `INR_ij`, `INR_ji` and `INR_ij·INR_ji` for each user `i`; that pair of
//! events picks which sum-rate (`κ6`) and weighted sum-rate (`κ7`) bound
//! applies. For a correlation `ρ ∈ [0, 1]` the bounds form a polytope, and the
//! converse region is the union of those polytopes over `ρ`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::achievability::{b1, uniform_grid};
use crate::channel::{ChannelParameters, PerUser, User};
use crate::error::{Error, Result};
use crate::gap::GridSpec;
use crate::geometry::{envelope_union, FrontierGrid, LinearBound, RateRegionPolytope, Region};

/// `log2(2πe)`
pub const LOG2_2PI_E: f64 = 4.094_191_170_361_282;

/// Ordering of `SNR_j` against the interference terms, seen from user `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Event {
    /// `SNR_j < min(INR_ij, INR_ji)`
    S1,
    /// `INR_ji ≤ SNR_j < INR_ij`
    S2,
    /// `INR_ij ≤ SNR_j < INR_ji`
    S3,
    /// `max(INR_ij, INR_ji) ≤ SNR_j < INR_ij·INR_ji`
    S4,
    /// `SNR_j ≥ max(INR_ij, INR_ji, INR_ij·INR_ji)`
    S5,
}

impl Event {
    pub const ALL: [Event; 5] = [Event::S1, Event::S2, Event::S3, Event::S4, Event::S5];

    pub fn index(self) -> u8 {
        match self {
            Event::S1 => 1,
            Event::S2 => 2,
            Event::S3 => 3,
            Event::S4 => 4,
            Event::S5 => 5,
        }
    }

    pub fn from_index(l: u8) -> Result<Event> {
        Event::ALL
            .get(usize::from(l).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::invalid("event", format!("index must be in 1..=5, got {l}")))
    }

    /// `S1 ∨ S2 ∨ S5`: selects the first `κ7` form.
    fn is_outer(self) -> bool {
        matches!(self, Event::S1 | Event::S2 | Event::S5)
    }

    /// Truth value of each inequality system, evaluated as written.
    pub fn holds(self, snr_j: f64, inr_ij: f64, inr_ji: f64) -> bool {
        match self {
            Event::S1 => snr_j < inr_ij.min(inr_ji),
            Event::S2 => inr_ji <= snr_j && snr_j < inr_ij,
            Event::S3 => inr_ij <= snr_j && snr_j < inr_ji,
            Event::S4 => inr_ij.max(inr_ji) <= snr_j && snr_j < inr_ij * inr_ji,
            Event::S5 => snr_j >= inr_ij.max(inr_ji).max(inr_ij * inr_ji),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.index())
    }
}

/// The scenario `(S_{l1,1}, S_{l2,2})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EventPair {
    first: Event,
    second: Event,
}

impl EventPair {
    /// Rejects the two infeasible scenarios `(S2, S2)` and `(S3, S3)`.
    pub fn new(first: Event, second: Event) -> Result<Self> {
        if first == second && matches!(first, Event::S2 | Event::S3) {
            return Err(Error::invalid("event_pair", format!("({first}, {second}) is not a feasible scenario")));
        }
        Ok(EventPair { first, second })
    }

    pub fn from_indices(l1: u8, l2: u8) -> Result<Self> {
        Self::new(Event::from_index(l1)?, Event::from_index(l2)?)
    }

    pub fn event(&self, u: User) -> Event {
        match u {
            User::One => self.first,
            User::Two => self.second,
        }
    }

    /// All 23 feasible scenarios in lexicographic order.
    pub fn all_feasible() -> Vec<EventPair> {
        Event::ALL
            .iter()
            .flat_map(|&a| Event::ALL.iter().filter_map(move |&b| EventPair::new(a, b).ok()))
            .collect()
    }

    pub fn kappa6_variant(&self) -> u8 {
        match (self.second.is_outer(), self.first.is_outer()) {
            (true, true) => 1,
            (true, false) => 2,
            (false, true) => 3,
            (false, false) => 4,
        }
    }

    pub fn kappa7_variant(&self, u: User) -> u8 {
        if self.event(u).is_outer() {
            1
        } else {
            2
        }
    }
}

impl fmt::Display for EventPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

/// Every event that holds for user `i`. Exactly one for any valid channel.
pub fn events_holding(p: &ChannelParameters, i: User) -> Vec<Event> {
    let j = i.other();
    let (snr_j, inr_ij, inr_ji) = (p.snr_fwd(j), p.inr_at(i), p.inr_at(j));
    Event::ALL.into_iter().filter(|e| e.holds(snr_j, inr_ij, inr_ji)).collect()
}

pub fn classify_events(p: &ChannelParameters) -> EventPair {
    let pick = |i: User| {
        let hits = events_holding(p, i);
        assert_eq!(hits.len(), 1, "events must partition the parameter space, got {hits:?} for user {i}");
        hits[0]
    };
    EventPair::new(pick(User::One), pick(User::Two)).expect("(S2,S2) and (S3,S3) cannot both hold")
}

/// `(b3_i, b4_i(ρ), b5_i(ρ), b6_i(ρ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConverseB {
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
}

pub fn b_conv(p: &ChannelParameters, i: User, rho: f64) -> Result<ConverseB> {
    if p.snr_fwd(i) <= 0.0 {
        return Err(Error::DegenerateChannel(format!("forward SNR_{i} is zero")));
    }
    Ok(b_conv_unchecked(p, i, rho))
}

fn b_conv_unchecked(p: &ChannelParameters, i: User, rho: f64) -> ConverseB {
    let j = i.other();
    let s = p.snr_fwd(i);
    let inr_ij = p.inr_at(i);
    let inr_ji = p.inr_at(j);
    let damp = 1.0 - rho * rho;
    let b6 = s
        + inr_ij
        + 2.0 * rho * inr_ij.sqrt() * (s.sqrt() - inr_ji.sqrt())
        + inr_ij * inr_ji.sqrt() / s * (inr_ji.sqrt() - 2.0 * s.sqrt());
    ConverseB {
        b3: s - 2.0 * (s * inr_ji).sqrt() + inr_ji,
        b4: damp * s,
        b5: damp * inr_ij,
        b6,
    }
}

/// All `κ` values at one `ρ`, with the case-selected `κ6` and `κ7` forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaValues {
    pub k1: PerUser<f64>,
    pub k2: PerUser<f64>,
    pub k3: PerUser<f64>,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    /// Which of the four `κ6` forms was used.
    pub k6_variant: u8,
    pub k7: PerUser<f64>,
    /// Which of the two `κ7,i` forms was used for each user.
    pub k7_variant: PerUser<u8>,
}

fn half_log(x: f64) -> f64 {
    0.5 * x.log2()
}

/// Shared sub-expressions of the `κ` bounds at one `ρ`.
struct Terms<'a> {
    p: &'a ChannelParameters,
    rho: f64,
    b: PerUser<ConverseB>,
    b1_rho: PerUser<f64>,
    /// `b1_i(1) + 1`
    b1_full: PerUser<f64>,
}

impl<'a> Terms<'a> {
    fn new(p: &'a ChannelParameters, rho: f64) -> Self {
        Terms {
            p,
            rho,
            b: PerUser::from_fn(|i| b_conv_unchecked(p, i, rho)),
            b1_rho: PerUser::from_fn(|i| b1(p, i, rho)),
            b1_full: PerUser::from_fn(|i| b1(p, i, 1.0) + 1.0),
        }
    }

    fn inr(&self, i: User) -> f64 {
        self.p.inr_at(i)
    }

    fn snr(&self, i: User) -> f64 {
        self.p.snr_fwd(i)
    }

    fn k1(&self, i: User) -> f64 {
        half_log(self.b1_rho[i] + 1.0)
    }

    fn k2(&self, i: User) -> f64 {
        let b5j = self.b[i.other()].b5;
        half_log(1.0 + b5j) + half_log(1.0 + self.b[i].b4 / (1.0 + b5j))
    }

    fn k3(&self, i: User) -> f64 {
        let j = i.other();
        let b4i = self.b[i].b4;
        let b5j = self.b[j].b5;
        half_log(self.p.snr_bwd(j) * (b4i + b5j + 1.0) / (self.b1_full[j] * (b4i + 1.0)) + 1.0) + half_log(b4i + 1.0)
    }

    /// `κ4` for `i = 1`, `κ5` for `i = 2`.
    fn k45(&self, i: User) -> f64 {
        let j = i.other();
        half_log(1.0 + self.b[i].b4 / (1.0 + self.b[j].b5)) + half_log(self.b1_rho[j] + 1.0)
    }

    /// `½log(1 + b5_k(ρ)·SNR_bwd_k / (b1_k(1) + 1))`
    fn feedback_gain(&self, k: User) -> f64 {
        half_log(1.0 + self.b[k].b5 * self.p.snr_bwd(k) / self.b1_full[k])
    }

    /// `b5_1(ρ)·INR_21`. Every printed `κ6` form uses this leakage term,
    /// including the user-2 positions.
    fn k6_leak(&self) -> f64 {
        self.b[User::One].b5 * self.inr(User::Two)
    }

    /// `½log(b6_k(ρ) + leak/SNR_k·(SNR_k + b3_k))`
    fn k6_b6_term(&self, k: User) -> f64 {
        let s = self.snr(k);
        half_log(self.b[k].b6 + self.k6_leak() / s * (s + self.b[k].b3))
    }

    /// `½log(1 + b5_k(ρ)/SNR_k·(INR_lk + b3_k·SNR_bwd_k/(b1_k(1)+1)))` with
    /// `l` the other user.
    fn b3_feedback_term(&self, k: User) -> f64 {
        let s = self.snr(k);
        let b = self.b[k];
        half_log(1.0 + b.b5 / s * (self.inr(k.other()) + b.b3 * self.p.snr_bwd(k) / self.b1_full[k]))
    }

    fn k6(&self, variant: u8) -> f64 {
        use User::{One as U1, Two as U2};
        let leak = self.k6_leak();
        let leak_over = |k: User| half_log(1.0 + leak / self.snr(k));
        let received = |k: User| half_log(self.b1_rho[k] + leak);
        let body = match variant {
            1 => received(U1) + self.feedback_gain(U2) + received(U2) + self.feedback_gain(U1),
            2 => {
                self.k6_b6_term(U2) + self.feedback_gain(U1) + received(U1) + self.b3_feedback_term(U2)
                    - leak_over(U2)
            }
            3 => {
                self.k6_b6_term(U1) + self.feedback_gain(U2) + received(U2) + self.b3_feedback_term(U1)
                    - leak_over(U1)
            }
            4 => {
                self.k6_b6_term(U1) + self.b3_feedback_term(U2) - leak_over(U2) - leak_over(U1)
                    + self.k6_b6_term(U2)
                    + self.b3_feedback_term(U1)
            }
            _ => unreachable!("kappa6 variant is 1..=4"),
        };
        body - half_log(1.0 + self.inr(U1)) - half_log(1.0 + self.inr(U2)) + LOG2_2PI_E
    }

    fn k7(&self, i: User, variant: u8) -> f64 {
        let j = i.other();
        let b4i = self.b[i].b4;
        let b5i = self.b[i].b5;
        let b5j = self.b[j].b5;
        let common = half_log(self.b1_rho[i] + 1.0) - half_log(1.0 + self.inr(i)) + half_log(1.0 + b4i + b5j)
            - half_log(1.0 + b5j);
        let body = match variant {
            1 => self.feedback_gain(j) + half_log(self.b1_rho[j] + b5i * self.inr(j)),
            2 => {
                let snr_j = self.snr(j);
                let bj = self.b[j];
                half_log(
                    1.0 + (1.0 - self.rho * self.rho) * self.inr(j) / snr_j
                        * (self.inr(i) + bj.b3 * self.p.snr_bwd(j) / self.b1_full[j]),
                ) - half_log(1.0 + b5i * self.inr(j) / snr_j)
                    + half_log(bj.b6 + b5i * self.inr(j) / snr_j * (snr_j + bj.b3))
            }
            _ => unreachable!("kappa7 variant is 1..=2"),
        };
        common + body + 2.0 * LOG2_2PI_E
    }
}

pub fn kappa(p: &ChannelParameters, rho: f64, ev: EventPair) -> Result<KappaValues> {
    p.require_positive_snr_fwd()?;
    Ok(kappa_unchecked(p, rho, ev))
}

fn kappa_unchecked(p: &ChannelParameters, rho: f64, ev: EventPair) -> KappaValues {
    let t = Terms::new(p, rho);
    let k6_variant = ev.kappa6_variant();
    let k7_variant = PerUser::from_fn(|i| ev.kappa7_variant(i));
    KappaValues {
        k1: PerUser::from_fn(|i| t.k1(i)),
        k2: PerUser::from_fn(|i| t.k2(i)),
        k3: PerUser::from_fn(|i| t.k3(i)),
        k4: t.k45(User::One),
        k5: t.k45(User::Two),
        k6: t.k6(k6_variant),
        k6_variant,
        k7: PerUser::from_fn(|i| t.k7(i, k7_variant[i])),
        k7_variant,
    }
}

/// Bounds on `R1` (three), `R2` (three), `R1+R2` (three), `2R1+R2`, `R1+2R2`.
pub fn converse_bounds(k: &KappaValues) -> [LinearBound; 11] {
    use User::{One as U1, Two as U2};
    [
        LinearBound::r1(k.k1[U1]),
        LinearBound::r1(k.k2[U1]),
        LinearBound::r1(k.k3[U1]),
        LinearBound::r2(k.k1[U2]),
        LinearBound::r2(k.k2[U2]),
        LinearBound::r2(k.k3[U2]),
        LinearBound::sum(k.k4),
        LinearBound::sum(k.k5),
        LinearBound::sum(k.k6),
        LinearBound::weighted(2.0, 1.0, k.k7[U1]),
        LinearBound::weighted(1.0, 2.0, k.k7[U2]),
    ]
}

pub fn converse_polytope(p: &ChannelParameters, rho: f64) -> Result<RateRegionPolytope> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid("rho", format!("must lie in [0, 1], got {rho}")));
    }
    p.require_positive_snr_fwd()?;
    let k = kappa_unchecked(p, rho, classify_events(p));
    Ok(RateRegionPolytope::new(sanitize(converse_bounds(&k)).to_vec()))
}

/// A `-∞` or NaN right-hand side (a log of zero at a boundary `ρ`) makes the
/// polytope empty; keep that outcome explicit.
fn sanitize<const N: usize>(mut b: [LinearBound; N]) -> [LinearBound; N] {
    for x in b.iter_mut() {
        if x.rhs.is_nan() {
            x.rhs = f64::NEG_INFINITY;
        }
    }
    b
}

/// Vertices of the per-`ρ` polytopes on the `ρ` grid, in grid order.
pub fn converse_vertex_sets(p: &ChannelParameters, grid: &GridSpec) -> Result<Vec<Vec<crate::geometry::Point>>> {
    p.require_positive_snr_fwd()?;
    let ev = classify_events(p);
    let rhos = uniform_grid(1.0, grid.converse_rho_points);
    Ok(rhos
        .par_iter()
        .map(|&rho| {
            let k = kappa_unchecked(p, rho, ev);
            RateRegionPolytope::new(sanitize(converse_bounds(&k)).to_vec()).vertices()
        })
        .collect())
}

/// Union over the `ρ` grid as a pointwise-maximum envelope (not convexified).
pub fn converse_region(p: &ChannelParameters, grid: &GridSpec) -> Result<Region> {
    let sets = converse_vertex_sets(p, grid)?;
    let r1_max = sets.iter().flatten().map(|v| v.r1).fold(0.0, f64::max);
    let fgrid = FrontierGrid::new(r1_max, grid.frontier_samples)?;
    converse_region_on(&sets, fgrid)
}

/// Envelope of precomputed per-`ρ` vertex sets on a given frontier grid.
pub fn converse_region_on(sets: &[Vec<crate::geometry::Point>], fgrid: FrontierGrid) -> Result<Region> {
    let members: Vec<Region> = sets
        .iter()
        .filter(|v| !v.is_empty())
        .map(|v| Region::convex_hull_on(v, fgrid))
        .collect();
    if members.is_empty() {
        return Ok(Region::convex_hull_on(&[], fgrid));
    }
    envelope_union(&members)
}
