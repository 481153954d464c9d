//! Gap between the inner and outer regions.
//!
//! The headline number is the exact deflation gap `ξ*`: the smallest `ξ`
//! for which every outer point moved down by `ξ` in both coordinates (and
//! clamped at zero) lies in the achievable region. A cheaper closed-form
//! estimate compares the active bounds family by family; it is reported
//! next to `ξ*` for reference only.

use rayon::prelude::*;
use serde::Serialize;

use crate::achievability::{
    a_coeff, achievable_bounds, achievable_region, rho_domain_sup, uniform_grid, AchievabilityParams,
};
use crate::channel::{symmetric_params, ChannelParameters, PerUser, SymmetricPoint, User};
use crate::converse::{classify_events, converse_region, kappa, EventPair};
use crate::error::{Error, Result};
use crate::geometry::{deflation_gap, Point, BISECTION_TOL, DEFAULT_FRONTIER_SAMPLES};

/// Discretization of the parameter sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    /// Points on the achievable `ρ ∈ [0, ρ_sup]`.
    pub rho_points: usize,
    /// Points on each of `μ1, μ2 ∈ [0, 1]`.
    pub mu_points: usize,
    /// Points on the converse `ρ ∈ [0, 1]`.
    pub converse_rho_points: usize,
    /// Samples of each frontier along `R1`.
    pub frontier_samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rho_points: 33,
            mu_points: 17,
            converse_rho_points: 65,
            frontier_samples: DEFAULT_FRONTIER_SAMPLES,
        }
    }
}

impl GridSpec {
    /// A small grid for quick checks.
    pub fn coarse() -> Self {
        GridSpec {
            rho_points: 9,
            mu_points: 5,
            converse_rho_points: 17,
            frontier_samples: 128,
        }
    }

    /// Twice the resolution on every axis. Parameter grids go from `n` to
    /// `2n - 1` points so the old grid is a subset of the new one.
    pub fn refined(&self) -> Self {
        GridSpec {
            rho_points: 2 * self.rho_points - 1,
            mu_points: 2 * self.mu_points - 1,
            converse_rho_points: 2 * self.converse_rho_points - 1,
            frontier_samples: 2 * self.frontier_samples,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("rho_points", self.rho_points),
            ("mu_points", self.mu_points),
            ("converse_rho_points", self.converse_rho_points),
            ("frontier_samples", self.frontier_samples),
        ];
        for (field, v) in checks {
            if v < 2 {
                return Err(Error::invalid(field, format!("need at least 2 points, got {v}")));
            }
        }
        Ok(())
    }
}

/// Per-family differences between the tightest outer and inner bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaComponents {
    pub r1: f64,
    pub r2: f64,
    /// `R1 + R2` family.
    pub sum: f64,
    /// `2R1 + R2` family.
    pub weighted_1: f64,
    /// `R1 + 2R2` family.
    pub weighted_2: f64,
}

impl DeltaComponents {
    /// `max(δ_R1, δ_R2, δ_2R/2, δ_3R1/3, δ_3R2/3)`
    pub fn combined(&self) -> f64 {
        self.r1
            .max(self.r2)
            .max(self.sum / 2.0)
            .max(self.weighted_1 / 3.0)
            .max(self.weighted_2 / 3.0)
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.r1, self.r2, self.sum, self.weighted_1, self.weighted_2]
    }
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

/// Converse minimum minus achievable minimum for each bound family, with
/// one `ρ` shared by both sides.
pub fn analytic_deltas(p: &ChannelParameters, rho: f64, mu_1: f64, mu_2: f64) -> Result<DeltaComponents> {
    require_nondegenerate(p)?;
    let params = AchievabilityParams::new(p, rho, mu_1, mu_2)?;
    Ok(deltas_unchecked(p, &params, classify_events(p)))
}

fn deltas_unchecked(p: &ChannelParameters, params: &AchievabilityParams, ev: EventPair) -> DeltaComponents {
    let a = a_coeff(p, params).expect("INR checked by caller");
    let k = kappa(p, params.rho(), ev).expect("SNR checked by caller");
    let ach = achievable_bounds(&a);
    let rhs = |r: std::ops::Range<usize>| min_of(ach[r].iter().map(|b| b.rhs));
    let (u1, u2) = (User::One, User::Two);
    DeltaComponents {
        r1: min_of([k.k1[u1], k.k2[u1], k.k3[u1]]) - rhs(0..3),
        r2: min_of([k.k1[u2], k.k2[u2], k.k3[u2]]) - rhs(3..6),
        sum: min_of([k.k4, k.k5, k.k6]) - rhs(6..11),
        weighted_1: k.k7[u1] - rhs(11..14),
        weighted_2: k.k7[u2] - rhs(14..17),
    }
}

/// The closed-form estimate and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticGap {
    pub bound: f64,
    pub rho: f64,
    pub mu: PerUser<f64>,
    pub deltas: DeltaComponents,
}

/// Maximum over the `ρ` grid of the minimum over the `(μ1, μ2)` grid of
/// [`DeltaComponents::combined`].
pub fn analytic_gap(p: &ChannelParameters, grid: &GridSpec) -> Result<AnalyticGap> {
    require_nondegenerate(p)?;
    grid.validate()?;
    let ev = classify_events(p);
    let rhos = uniform_grid(rho_domain_sup(p)?, grid.rho_points);
    let mus = uniform_grid(1.0, grid.mu_points);
    let per_rho: Vec<AnalyticGap> = rhos
        .par_iter()
        .map(|&rho| {
            let mut best: Option<AnalyticGap> = None;
            for &m1 in &mus {
                for &m2 in &mus {
                    let params = AchievabilityParams::unchecked(rho, m1, m2);
                    let deltas = deltas_unchecked(p, &params, ev);
                    let v = deltas.combined();
                    if best.is_none_or(|b| v < b.bound) {
                        best = Some(AnalyticGap {
                            bound: v,
                            rho,
                            mu: PerUser::new(m1, m2),
                            deltas,
                        });
                    }
                }
            }
            best.expect("mu grid is never empty")
        })
        .collect();
    let mut out = per_rho[0];
    for g in &per_rho[1..] {
        if g.bound > out.bound {
            out = *g;
        }
    }
    Ok(out)
}

pub fn analytic_gap_bound(p: &ChannelParameters, grid: &GridSpec) -> Result<f64> {
    Ok(analytic_gap(p, grid)?.bound)
}

fn require_nondegenerate(p: &ChannelParameters) -> Result<()> {
    p.require_positive_inr()?;
    p.require_positive_snr_fwd()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    /// `ξ*` in bits per channel use, accurate to the bisection tolerance.
    pub exact_gap: f64,
    pub analytic_bound: f64,
    /// Outer-region point that needed the largest deflation.
    pub witness: Point,
    pub delta_components: DeltaComponents,
    pub event_pair: EventPair,
}

pub fn exact_gap(p: &ChannelParameters, grid: &GridSpec) -> Result<GapReport> {
    require_nondegenerate(p)?;
    grid.validate()?;
    let inner = achievable_region(p, grid)?;
    let outer = converse_region(p, grid)?;
    let d = deflation_gap(&inner, &outer, BISECTION_TOL)?;
    let analytic = analytic_gap(p, grid)?;
    Ok(GapReport {
        exact_gap: d.gap,
        analytic_bound: analytic.bound,
        witness: d.witness,
        delta_components: analytic.deltas,
        event_pair: classify_events(p),
    })
}

/// Exact gap only, skipping the closed-form estimate.
pub fn exact_gap_value(p: &ChannelParameters, grid: &GridSpec) -> Result<f64> {
    require_nondegenerate(p)?;
    grid.validate()?;
    let inner = achievable_region(p, grid)?;
    let outer = converse_region(p, grid)?;
    Ok(deflation_gap(&inner, &outer, BISECTION_TOL)?.gap)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SweepCell {
    Ok(f64),
    Missing(String),
}

impl SweepCell {
    pub fn value(&self) -> Option<f64> {
        match self {
            SweepCell::Ok(v) => Some(*v),
            SweepCell::Missing(_) => None,
        }
    }
}

/// Exact gap over an `(α, β)` grid of symmetric channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSurface {
    pub snr: f64,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    /// Row-major: `cells[ia * beta_grid.len() + ib]`.
    pub cells: Vec<SweepCell>,
}

impl GapSurface {
    pub fn cell(&self, ia: usize, ib: usize) -> &SweepCell {
        &self.cells[ia * self.beta_grid.len() + ib]
    }

    /// `(α, β, cell)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &SweepCell)> + '_ {
        let nb = self.beta_grid.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, c)| (self.alpha_grid[k / nb], self.beta_grid[k % nb], c))
    }

    /// Largest gap and its `(α, β)`; first occurrence wins ties.
    pub fn max(&self) -> Option<(f64, f64, f64)> {
        let mut best: Option<(f64, f64, f64)> = None;
        for (a, b, c) in self.iter() {
            if let Some(v) = c.value() {
                if best.is_none_or(|(bv, _, _)| v > bv) {
                    best = Some((v, a, b));
                }
            }
        }
        best
    }
}

/// Never aborts on a bad cell: per-point errors are recorded as
/// [`SweepCell::Missing`].
pub fn sweep_symmetric(snr: f64, alpha_grid: &[f64], beta_grid: &[f64], grid: &GridSpec) -> Result<GapSurface> {
    if !(snr.is_finite() && snr > 1.0) {
        return Err(Error::invalid("snr", format!("must be finite and > 1, got {snr}")));
    }
    grid.validate()?;
    let nb = beta_grid.len();
    let cells = (0..alpha_grid.len() * nb)
        .into_par_iter()
        .map(|k| {
            let point = SymmetricPoint::new(snr, alpha_grid[k / nb], beta_grid[k % nb]);
            match point.and_then(|s| exact_gap_value(&symmetric_params(&s), grid)) {
                Ok(v) => SweepCell::Ok(v),
                Err(e) => SweepCell::Missing(e.to_string()),
            }
        })
        .collect();
    Ok(GapSurface {
        snr,
        alpha_grid: alpha_grid.to_vec(),
        beta_grid: beta_grid.to_vec(),
        cells,
    })
}
