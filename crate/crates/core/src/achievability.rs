//! Inner bound: rate splitting with noisy feedback.
//!
//! For a fixed coding parameter triple `(ρ, μ1, μ2)` the achievable rates form
//! a polytope with seventeen bounds on `R1`, `R2`, `R1+R2`, `2R1+R2` and
//! `R1+2R2`. The achievable region is the convex hull of the union of those
//! polytopes over `ρ ∈ [0, ρ_sup]` and `μ1, μ2 ∈ [0, 1]`.
//!
//! Notation: for user `i` with other user `j`, `SNR_i` is the forward SNR,
//! `INR_ij` the interference at receiver `i` and `INR_ji` the interference
//! user `i` causes at receiver `j`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelParameters, PerUser, User};
use crate::error::{Error, Result};
use crate::gap::GridSpec;
use crate::geometry::{FrontierGrid, LinearBound, Point, RateRegionPolytope, Region};

/// `(b1_i(ρ), b2_i(ρ))`.
///
/// `b1_i(ρ) = SNR_i + 2ρ√(SNR_i·INR_ij) + INR_ij` is the received power at
/// receiver `i` under input correlation `ρ`; `b2_i(ρ) = (1-ρ)·INR_ij - 1`.
pub fn b_basic(p: &ChannelParameters, i: User, rho: f64) -> (f64, f64) {
    (b1(p, i, rho), b2(p, i, rho))
}

pub(crate) fn b1(p: &ChannelParameters, i: User, rho: f64) -> f64 {
    let s = p.snr_fwd(i);
    let inr = p.inr_at(i);
    s + 2.0 * rho * (s * inr).sqrt() + inr
}

pub(crate) fn b2(p: &ChannelParameters, i: User, rho: f64) -> f64 {
    (1.0 - rho) * p.inr_at(i) - 1.0
}

fn half_log(x: f64) -> f64 {
    0.5 * x.log2()
}

/// `SNR_i / INR_ji`
fn snr_over_caused_inr(p: &ChannelParameters, i: User) -> f64 {
    p.snr_fwd(i) / p.inr_at(i.other())
}

pub fn a1(p: &ChannelParameters, i: User) -> f64 {
    half_log(2.0 + snr_over_caused_inr(p, i)) - 0.5
}

pub fn a2(p: &ChannelParameters, i: User, rho: f64) -> f64 {
    half_log(b1(p, i, rho) + 1.0) - 0.5
}

/// The only term that depends on the feedback SNR.
pub fn a3(p: &ChannelParameters, i: User, rho: f64, mu: f64) -> f64 {
    let fb = p.snr_bwd(i);
    let b2 = b2(p, i, rho);
    let tail = b1(p, i, 1.0) + 1.0;
    half_log((fb * (b2 + 2.0) + tail) / (fb * ((1.0 - mu) * b2 + 2.0) + tail))
}

pub fn a4(p: &ChannelParameters, i: User, rho: f64, mu: f64) -> f64 {
    half_log((1.0 - mu) * b2(p, i, rho) + 2.0) - 0.5
}

pub fn a5(p: &ChannelParameters, i: User, rho: f64, mu: f64) -> f64 {
    half_log(2.0 + snr_over_caused_inr(p, i) + (1.0 - mu) * b2(p, i, rho)) - 0.5
}

pub fn a6(p: &ChannelParameters, i: User, rho: f64, mu: f64) -> f64 {
    let j = i.other();
    half_log(snr_over_caused_inr(p, i) * ((1.0 - mu) * b2(p, j, rho) + 1.0) + 2.0) - 0.5
}

/// `mu` is `(μ1, μ2)`; user `i` uses `μ_i` on the other user's `b2` and `μ_j`
/// on its own.
pub fn a7(p: &ChannelParameters, i: User, rho: f64, mu: PerUser<f64>) -> f64 {
    let j = i.other();
    half_log(
        snr_over_caused_inr(p, i) * ((1.0 - mu[i]) * b2(p, j, rho) + 1.0) + (1.0 - mu[j]) * b2(p, i, rho) + 2.0,
    ) - 0.5
}

/// `(1 - max(1/INR_12, 1/INR_21))⁺`
pub fn rho_domain_sup(p: &ChannelParameters) -> Result<f64> {
    p.require_positive_inr()?;
    let worst = (1.0 / p.inr_at(User::One)).max(1.0 / p.inr_at(User::Two));
    Ok((1.0 - worst).max(0.0))
}

/// Coding parameters `(ρ, μ1, μ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AchievabilityParams {
    rho: f64,
    mu: PerUser<f64>,
}

impl AchievabilityParams {
    /// Checks `0 ≤ ρ ≤ ρ_sup(p)` and `μ1, μ2 ∈ [0, 1]`.
    pub fn new(p: &ChannelParameters, rho: f64, mu_1: f64, mu_2: f64) -> Result<Self> {
        let sup = rho_domain_sup(p)?;
        // Grid endpoints are computed as sup * k / (n - 1); allow their rounding.
        if !(rho >= 0.0 && rho <= sup * (1.0 + 1e-12)) {
            return Err(Error::invalid("rho", format!("must lie in [0, {sup}], got {rho}")));
        }
        for (field, mu) in [("mu_1", mu_1), ("mu_2", mu_2)] {
            if !(0.0..=1.0).contains(&mu) {
                return Err(Error::invalid(field, format!("must lie in [0, 1], got {mu}")));
            }
        }
        Ok(Self::unchecked(rho, mu_1, mu_2))
    }

    pub(crate) fn unchecked(rho: f64, mu_1: f64, mu_2: f64) -> Self {
        AchievabilityParams {
            rho,
            mu: PerUser::new(mu_1, mu_2),
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self, u: User) -> f64 {
        self.mu[u]
    }
}

/// The fourteen `a` values at one `(ρ, μ1, μ2)`, with each `μ` argument
/// paired as the bound list uses it: `a3_i`, `a4_i`, `a5_i` take `μ_j`,
/// `a6_i` takes `μ_i`, and `a7_i` takes both. Values are the positive parts
/// of the scalar functions above, which go negative only when some SNR or INR
/// is below one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ACoefficients {
    pub a1: PerUser<f64>,
    pub a2: PerUser<f64>,
    pub a3: PerUser<f64>,
    pub a4: PerUser<f64>,
    pub a5: PerUser<f64>,
    pub a6: PerUser<f64>,
    pub a7: PerUser<f64>,
}

pub fn a_coeff(p: &ChannelParameters, params: &AchievabilityParams) -> Result<ACoefficients> {
    p.require_positive_inr()?;
    Ok(a_coeff_unchecked(p, params))
}

fn a_coeff_unchecked(p: &ChannelParameters, params: &AchievabilityParams) -> ACoefficients {
    let rho = params.rho;
    let mu = params.mu;
    ACoefficients {
        a1: PerUser::from_fn(|i| a1(p, i)),
        a2: PerUser::from_fn(|i| a2(p, i, rho).max(0.0)),
        a3: PerUser::from_fn(|i| a3(p, i, rho, mu[i.other()]).max(0.0)),
        a4: PerUser::from_fn(|i| a4(p, i, rho, mu[i.other()]).max(0.0)),
        a5: PerUser::from_fn(|i| a5(p, i, rho, mu[i.other()]).max(0.0)),
        a6: PerUser::from_fn(|i| a6(p, i, rho, mu[i]).max(0.0)),
        a7: PerUser::from_fn(|i| a7(p, i, rho, mu).max(0.0)),
    }
}

/// The seventeen right-hand sides in bound order: three on `R1`, three on
/// `R2`, five on `R1+R2`, three on `2R1+R2`, three on `R1+2R2`.
pub fn achievable_bounds(a: &ACoefficients) -> [LinearBound; 17] {
    use User::{One as U1, Two as U2};
    let (a1, a2, a3, a4, a5, a6, a7) = (a.a1, a.a2, a.a3, a.a4, a.a5, a.a6, a.a7);
    [
        LinearBound::r1(a2[U1]),
        LinearBound::r1(a6[U1] + a3[U2]),
        LinearBound::r1(a1[U1] + a3[U2] + a4[U2]),
        LinearBound::r2(a2[U2]),
        LinearBound::r2(a3[U1] + a6[U2]),
        LinearBound::r2(a3[U1] + a4[U1] + a1[U2]),
        LinearBound::sum(a2[U1] + a1[U2]),
        LinearBound::sum(a1[U1] + a2[U2]),
        LinearBound::sum(a3[U1] + a1[U1] + a3[U2] + a7[U2]),
        LinearBound::sum(a3[U1] + a5[U1] + a3[U2] + a5[U2]),
        LinearBound::sum(a3[U1] + a7[U1] + a3[U2] + a1[U2]),
        LinearBound::weighted(2.0, 1.0, a2[U1] + a1[U1] + a3[U2] + a7[U2]),
        LinearBound::weighted(2.0, 1.0, a3[U1] + a1[U1] + a7[U1] + 2.0 * a3[U2] + a5[U2]),
        LinearBound::weighted(2.0, 1.0, a2[U1] + a1[U1] + a3[U2] + a5[U2]),
        LinearBound::weighted(1.0, 2.0, a3[U1] + a5[U1] + a2[U2] + a1[U2]),
        LinearBound::weighted(1.0, 2.0, a3[U1] + a7[U1] + a2[U2] + a1[U2]),
        LinearBound::weighted(1.0, 2.0, 2.0 * a3[U1] + a5[U1] + a3[U2] + a1[U2] + a7[U2]),
    ]
}

/// Inner-bound polytope for one coding parameter triple.
pub fn achievable_polytope(p: &ChannelParameters, params: &AchievabilityParams) -> Result<RateRegionPolytope> {
    let a = a_coeff(p, params)?;
    Ok(RateRegionPolytope::new(achievable_bounds(&a).to_vec()))
}

/// `n` uniform points on `[0, hi]`, or just `{0}` when `hi == 0`.
pub(crate) fn uniform_grid(hi: f64, n: usize) -> Vec<f64> {
    if hi == 0.0 || n < 2 {
        return vec![0.0];
    }
    (0..n)
        .map(|k| if k + 1 == n { hi } else { hi * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Every `(ρ, μ1, μ2)` of the sweep, `ρ` outermost.
pub fn parameter_grid(p: &ChannelParameters, grid: &GridSpec) -> Result<Vec<AchievabilityParams>> {
    let rhos = uniform_grid(rho_domain_sup(p)?, grid.rho_points);
    let mus = uniform_grid(1.0, grid.mu_points);
    let mut out = Vec::with_capacity(rhos.len() * mus.len() * mus.len());
    for &rho in &rhos {
        for &m1 in &mus {
            for &m2 in &mus {
                out.push(AchievabilityParams::unchecked(rho, m1, m2));
            }
        }
    }
    Ok(out)
}

/// Convex hull of the origin and every polytope vertex over the parameter grid.
pub fn achievable_region(p: &ChannelParameters, grid: &GridSpec) -> Result<Region> {
    let params = parameter_grid(p, grid)?;
    let points: Vec<Point> = params
        .par_iter()
        .flat_map_iter(|q| {
            let a = a_coeff_unchecked(p, q);
            RateRegionPolytope::new(achievable_bounds(&a).to_vec()).vertices()
        })
        .collect();
    Region::convex_hull(&points, grid.frontier_samples)
}

/// Same hull, sampled on a caller-chosen grid.
pub fn achievable_region_on(p: &ChannelParameters, grid: &GridSpec, frontier: FrontierGrid) -> Result<Region> {
    let r = achievable_region(p, grid)?;
    Ok(Region::convex_hull_on(r.vertices(), frontier))
}
