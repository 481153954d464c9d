//! Channel coefficients and the six derived power ratios.
//!
//! Receiver `i` observes `Y_i = h_ii X_i + h_ij X_j + Z_i`, and transmitter
//! `i` observes a scaled noisy copy of `Y_i` one or more channel uses later.
//! The channel is fully described by
//!
//! * `SNR_fwd_i = h_ii²`
//! * `INR_ij = h_ij²` (interference from transmitter `j` at receiver `i`)
//! * `SNR_bwd_i = hb_ii² (h_ii² + 2 h_ii h_ij + h_ij² + 1)`
//!
//! Everything here is linear scale. Decibel values are converted with
//! [`db_to_linear`] at the edge of the program.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two transmitter-receiver pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub const BOTH: [User; 2] = [User::One, User::Two];

    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 0,
            User::Two => 1,
        }
    }
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

/// A value per user, indexed by [`User`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerUser<T>(pub [T; 2]);

impl<T> PerUser<T> {
    pub fn new(first: T, second: T) -> Self {
        PerUser([first, second])
    }

    pub fn from_fn(mut f: impl FnMut(User) -> T) -> Self {
        PerUser([f(User::One), f(User::Two)])
    }
}

impl<T: Copy> PerUser<T> {
    pub fn splat(v: T) -> Self {
        PerUser([v, v])
    }
}

impl<T> Index<User> for PerUser<T> {
    type Output = T;
    fn index(&self, u: User) -> &T {
        &self.0[u.index()]
    }
}

impl<T> IndexMut<User> for PerUser<T> {
    fn index_mut(&mut self, u: User) -> &mut T {
        &mut self.0[u.index()]
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_nonneg(field: &'static str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::invalid(field, format!("must be finite, got {v}")));
    }
    if v < 0.0 {
        return Err(Error::invalid(field, format!("must be non-negative, got {v}")));
    }
    Ok(v)
}

/// Amplitude gains of the six links, all finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficients", into = "RawCoefficients")]
pub struct ChannelCoefficients {
    h_fwd: PerUser<f64>,
    /// `h_cross[i]` is `h_ij`, the gain from transmitter `j` into receiver `i`.
    h_cross: PerUser<f64>,
    h_bwd: PerUser<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawCoefficients {
    h_fwd_11: f64,
    h_fwd_22: f64,
    h_12: f64,
    h_21: f64,
    h_bwd_11: f64,
    h_bwd_22: f64,
}

impl TryFrom<RawCoefficients> for ChannelCoefficients {
    type Error = Error;
    fn try_from(r: RawCoefficients) -> Result<Self> {
        ChannelCoefficients::new(r.h_fwd_11, r.h_fwd_22, r.h_12, r.h_21, r.h_bwd_11, r.h_bwd_22)
    }
}

impl From<ChannelCoefficients> for RawCoefficients {
    fn from(c: ChannelCoefficients) -> Self {
        RawCoefficients {
            h_fwd_11: c.h_fwd[User::One],
            h_fwd_22: c.h_fwd[User::Two],
            h_12: c.h_cross[User::One],
            h_21: c.h_cross[User::Two],
            h_bwd_11: c.h_bwd[User::One],
            h_bwd_22: c.h_bwd[User::Two],
        }
    }
}

impl ChannelCoefficients {
    pub fn new(
        h_fwd_11: f64,
        h_fwd_22: f64,
        h_12: f64,
        h_21: f64,
        h_bwd_11: f64,
        h_bwd_22: f64,
    ) -> Result<Self> {
        Ok(ChannelCoefficients {
            h_fwd: PerUser::new(check_nonneg("h_fwd_11", h_fwd_11)?, check_nonneg("h_fwd_22", h_fwd_22)?),
            h_cross: PerUser::new(check_nonneg("h_12", h_12)?, check_nonneg("h_21", h_21)?),
            h_bwd: PerUser::new(check_nonneg("h_bwd_11", h_bwd_11)?, check_nonneg("h_bwd_22", h_bwd_22)?),
        })
    }

    /// Same gains on both sides.
    pub fn symmetric(h_fwd: f64, h_cross: f64, h_bwd: f64) -> Result<Self> {
        Self::new(h_fwd, h_fwd, h_cross, h_cross, h_bwd, h_bwd)
    }

    pub fn h_fwd(&self, u: User) -> f64 {
        self.h_fwd[u]
    }

    /// Gain from the other transmitter into receiver `u`.
    pub fn h_cross(&self, u: User) -> f64 {
        self.h_cross[u]
    }

    pub fn h_bwd(&self, u: User) -> f64 {
        self.h_bwd[u]
    }

    /// `h_ii² + 2 h_ii h_ij + h_ij² + 1`: the power of `Y_i` under fully
    /// correlated unit-power inputs.
    fn output_power_correlated(&self, u: User) -> f64 {
        let d = self.h_fwd[u];
        let c = self.h_cross[u];
        d * d + 2.0 * d * c + c * c + 1.0
    }

    pub fn to_params(&self) -> ChannelParameters {
        params_from_coefficients(self)
    }
}

/// The six linear power ratios that determine every bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParameters", into = "RawParameters")]
pub struct ChannelParameters {
    snr_fwd: PerUser<f64>,
    /// `inr[i]` is `INR_ij`, the interference power at receiver `i`.
    inr: PerUser<f64>,
    snr_bwd: PerUser<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawParameters {
    snr_fwd_1: f64,
    snr_fwd_2: f64,
    inr_12: f64,
    inr_21: f64,
    snr_bwd_1: f64,
    snr_bwd_2: f64,
}

impl TryFrom<RawParameters> for ChannelParameters {
    type Error = Error;
    fn try_from(r: RawParameters) -> Result<Self> {
        ChannelParameters::new(r.snr_fwd_1, r.snr_fwd_2, r.inr_12, r.inr_21, r.snr_bwd_1, r.snr_bwd_2)
    }
}

impl From<ChannelParameters> for RawParameters {
    fn from(p: ChannelParameters) -> Self {
        RawParameters {
            snr_fwd_1: p.snr_fwd[User::One],
            snr_fwd_2: p.snr_fwd[User::Two],
            inr_12: p.inr[User::One],
            inr_21: p.inr[User::Two],
            snr_bwd_1: p.snr_bwd[User::One],
            snr_bwd_2: p.snr_bwd[User::Two],
        }
    }
}

impl ChannelParameters {
    pub fn new(
        snr_fwd_1: f64,
        snr_fwd_2: f64,
        inr_12: f64,
        inr_21: f64,
        snr_bwd_1: f64,
        snr_bwd_2: f64,
    ) -> Result<Self> {
        Ok(ChannelParameters {
            snr_fwd: PerUser::new(check_nonneg("snr_fwd_1", snr_fwd_1)?, check_nonneg("snr_fwd_2", snr_fwd_2)?),
            inr: PerUser::new(check_nonneg("inr_12", inr_12)?, check_nonneg("inr_21", inr_21)?),
            snr_bwd: PerUser::new(check_nonneg("snr_bwd_1", snr_bwd_1)?, check_nonneg("snr_bwd_2", snr_bwd_2)?),
        })
    }

    pub fn symmetric(snr_fwd: f64, inr: f64, snr_bwd: f64) -> Result<Self> {
        Self::new(snr_fwd, snr_fwd, inr, inr, snr_bwd, snr_bwd)
    }

    pub fn snr_fwd(&self, u: User) -> f64 {
        self.snr_fwd[u]
    }

    /// `INR_ij` for `u = i`: interference seen at receiver `u`.
    pub fn inr_at(&self, u: User) -> f64 {
        self.inr[u]
    }

    pub fn snr_bwd(&self, u: User) -> f64 {
        self.snr_bwd[u]
    }

    /// The six values in file order:
    /// `snr_fwd_1, snr_fwd_2, inr_12, inr_21, snr_bwd_1, snr_bwd_2`.
    pub fn to_array(&self) -> [f64; 6] {
        [
            self.snr_fwd[User::One],
            self.snr_fwd[User::Two],
            self.inr[User::One],
            self.inr[User::Two],
            self.snr_bwd[User::One],
            self.snr_bwd[User::Two],
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn with_snr_bwd(&self, snr_bwd_1: f64, snr_bwd_2: f64) -> Result<Self> {
        let [s1, s2, i12, i21, _, _] = self.to_array();
        Self::new(s1, s2, i12, i21, snr_bwd_1, snr_bwd_2)
    }

    pub(crate) fn require_positive_inr(&self) -> Result<()> {
        for u in User::BOTH {
            if self.inr[u] <= 0.0 {
                let j = u.other();
                return Err(Error::DegenerateChannel(format!("INR_{u}{j} is zero")));
            }
        }
        Ok(())
    }

    pub(crate) fn require_positive_snr_fwd(&self) -> Result<()> {
        for u in User::BOTH {
            if self.snr_fwd[u] <= 0.0 {
                return Err(Error::DegenerateChannel(format!("forward SNR_{u} is zero")));
            }
        }
        Ok(())
    }

    pub fn to_coefficients(&self) -> ChannelCoefficients {
        coefficients_from_params(self)
    }
}

pub fn params_from_coefficients(c: &ChannelCoefficients) -> ChannelParameters {
    ChannelParameters {
        snr_fwd: PerUser::from_fn(|u| c.h_fwd[u] * c.h_fwd[u]),
        inr: PerUser::from_fn(|u| c.h_cross[u] * c.h_cross[u]),
        snr_bwd: PerUser::from_fn(|u| c.h_bwd[u] * c.h_bwd[u] * c.output_power_correlated(u)),
    }
}

pub fn coefficients_from_params(p: &ChannelParameters) -> ChannelCoefficients {
    let h_fwd = PerUser::from_fn(|u| p.snr_fwd[u].sqrt());
    let h_cross = PerUser::from_fn(|u| p.inr[u].sqrt());
    let h_bwd = PerUser::from_fn(|u| {
        let denom = p.snr_fwd[u] + 2.0 * h_fwd[u] * h_cross[u] + p.inr[u] + 1.0;
        (p.snr_bwd[u] / denom).sqrt()
    });
    ChannelCoefficients {
        h_fwd,
        h_cross,
        h_bwd,
    }
}

/// A symmetric channel given by its forward SNR and the exponents
/// `α = log INR / log SNR` and `β = log SNR_bwd / log SNR`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPoint {
    snr: f64,
    alpha: f64,
    beta: f64,
}

impl SymmetricPoint {
    pub fn new(snr: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(snr.is_finite() && snr > 1.0) {
            return Err(Error::invalid("snr", format!("must be finite and > 1, got {snr}")));
        }
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !beta.is_finite() {
            return Err(Error::invalid("beta", "must be finite"));
        }
        Ok(SymmetricPoint { snr, alpha, beta })
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub fn symmetric_params(s: &SymmetricPoint) -> ChannelParameters {
    let inr = s.snr.powf(s.alpha);
    let snr_bwd = s.snr.powf(s.beta);
    ChannelParameters {
        snr_fwd: PerUser::splat(s.snr),
        inr: PerUser::splat(inr),
        snr_bwd: PerUser::splat(snr_bwd),
    }
}
