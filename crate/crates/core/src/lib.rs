//! Rate regions for the two-user Gaussian interference channel with noisy
//! channel-output feedback.
//!
//! The crate evaluates an achievable (inner) region and a converse (outer)
//! region for a channel described by six linear-scale parameters, and measures
//! how far apart the two are: every point of the outer region, pulled back by
//! `ξ` bits in each coordinate (clamped at zero), must land in the inner
//! region. The smallest such `ξ` is the exact gap.
//!
//! Module map:
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`channel`] | coefficients, derived SNR/INR parameters, symmetric `(α, β)` points |
//! | [`simulate`] | seedable Monte-Carlo simulator of the channel equations |
//! | [`achievability`] | the `a`/`b` functions and the inner-bound polytope and region |
//! | [`converse`] | event classification, `κ` functions, outer-bound polytope and region |
//! | [`geometry`] | 2-D polytopes, hulls, frontiers, envelopes, deflation gap |
//! | [`gap`] | exact and analytic gaps, symmetric gap surfaces |
//!
//! All rates are in bits per channel use and all logarithms are base 2.

pub mod achievability;
pub mod channel;
pub mod converse;
pub mod error;
pub mod gap;
pub mod geometry;
pub mod simulate;

pub use achievability::{achievable_polytope, achievable_region, AchievabilityParams};
pub use channel::{ChannelCoefficients, ChannelParameters, PerUser, SymmetricPoint, User};
pub use converse::{classify_events, converse_polytope, converse_region, EventPair};
pub use error::{Error, Result};
pub use gap::{exact_gap, sweep_symmetric, GapReport, GapSurface, GridSpec};
pub use geometry::{Point, RateRegionPolytope, Region};
