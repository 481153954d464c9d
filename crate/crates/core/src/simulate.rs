//! Monte-Carlo simulation of the channel equations.
//!
//! Forward: `Y_i[n] = h_ii X_i[n] + h_ij X_j[n] + Z_i[n]`.
//! Feedback: `Yb_i[n]` is pure noise for the first `d` uses, then
//! `hb_ii Y_i[n - d] + Zb_i[n]`.
//!
//! All noise is unit-variance Gaussian drawn from ChaCha20 seeded with
//! [`SimulationConfig::seed`]. Block `k` of [`simulate_blocks`] uses stream
//! `k` of the same seed, so blocks are independent and reproducible
//! regardless of thread scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelCoefficients, ChannelParameters, PerUser, User};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// `X_1` and `X_2` drawn independently.
    Independent,
    /// `X_1 = X_2` sample by sample.
    FullyCorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub block_length: usize,
    pub delay: usize,
    pub seed: u64,
    pub input_mode: InputMode,
}

impl SimulationConfig {
    /// Delay of one channel use.
    pub fn new(block_length: usize, seed: u64, input_mode: InputMode) -> Self {
        SimulationConfig {
            block_length,
            delay: 1,
            seed,
            input_mode,
        }
    }

    pub fn with_delay(self, delay: usize) -> Self {
        SimulationConfig { delay, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_length == 0 {
            return Err(Error::invalid("block_length", "must be positive"));
        }
        if self.delay == 0 {
            return Err(Error::invalid("delay", "must be positive"));
        }
        if self.delay >= self.block_length {
            return Err(Error::invalid(
                "delay",
                format!("must be less than block_length {}, got {}", self.block_length, self.delay),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalBlock {
    pub x: PerUser<Vec<f64>>,
    pub y_fwd: PerUser<Vec<f64>>,
    pub y_bwd: PerUser<Vec<f64>>,
    pub delay: usize,
    pub input_mode: InputMode,
}

impl SignalBlock {
    pub fn len(&self) -> usize {
        self.x[User::One].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn gaussian(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Gaussian sequence scaled to unit average power over the block.
fn unit_power_input(rng: &mut ChaCha20Rng, n: usize) -> Vec<f64> {
    let mut g = gaussian(rng, n);
    let power = g.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if power > 0.0 {
        let s = power.sqrt().recip();
        g.iter_mut().for_each(|v| *v *= s);
    }
    g
}

pub fn simulate_block(c: &ChannelCoefficients, cfg: &SimulationConfig) -> Result<SignalBlock> {
    simulate_stream(c, cfg, 0)
}

/// `count` independent blocks, simulated in parallel.
pub fn simulate_blocks(c: &ChannelCoefficients, cfg: &SimulationConfig, count: usize) -> Result<Vec<SignalBlock>> {
    cfg.validate()?;
    (0..count as u64).into_par_iter().map(|k| simulate_stream(c, cfg, k)).collect()
}

fn simulate_stream(c: &ChannelCoefficients, cfg: &SimulationConfig, stream: u64) -> Result<SignalBlock> {
    cfg.validate()?;
    let n = cfg.block_length;
    let d = cfg.delay;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);

    let x1 = unit_power_input(&mut rng, n);
    let x2 = match cfg.input_mode {
        InputMode::Independent => unit_power_input(&mut rng, n),
        InputMode::FullyCorrelated => x1.clone(),
    };
    let x = PerUser::new(x1, x2);

    let y_fwd = PerUser::from_fn(|i| {
        let z = gaussian(&mut rng, n);
        let (own, other) = (&x[i], &x[i.other()]);
        let (hd, hc) = (c.h_fwd(i), c.h_cross(i));
        (0..n).map(|k| hd * own[k] + hc * other[k] + z[k]).collect::<Vec<_>>()
    });
    let y_bwd = PerUser::from_fn(|i| {
        let mut y = gaussian(&mut rng, n);
        let hb = c.h_bwd(i);
        for k in d..n {
            y[k] += hb * y_fwd[i][k - d];
        }
        y
    });

    Ok(SignalBlock {
        x,
        y_fwd,
        y_bwd,
        delay: d,
        input_mode: cfg.input_mode,
    })
}

/// Running mean, second and fourth central moments of a pooled sample.
#[derive(Debug, Default)]
struct Moments {
    values: Vec<f64>,
}

impl Moments {
    fn extend(&mut self, v: &[f64]) {
        self.values.extend_from_slice(v);
    }

    /// Sample variance and its standard error `sqrt((m4 - s²) / n)`.
    fn variance(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in &self.values {
            let d2 = (v - mean) * (v - mean);
            m2 += d2;
            m4 += d2 * d2;
        }
        let s = m2 / (n - 1.0);
        let se = ((m4 / n - s * s).max(0.0) / n).sqrt();
        (s, se)
    }

    /// Mean square and its standard error.
    fn power(&self) -> (f64, f64) {
        let n = self.values.len() as f64;
        let mean = self.values.iter().map(|v| v * v).sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v * v - mean).powi(2)).sum::<f64>() / n;
        (mean, (var / n).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterEstimate {
    pub estimate: ChannelParameters,
    pub std_error: ChannelParameters,
    pub samples: usize,
}

/// Empirical parameters from fully correlated blocks.
///
/// The forward SNR and INR are the measured power of the direct and cross
/// path components. The feedback SNR is the sample variance of the
/// feedback observations, after the delay, minus the unit noise power.
pub fn estimate_parameters(blocks: &[SignalBlock], c: &ChannelCoefficients) -> Result<ParameterEstimate> {
    if blocks.iter().all(|b| b.is_empty()) {
        return Err(Error::EmptyInput("signal blocks"));
    }
    if let Some(b) = blocks.iter().find(|b| b.input_mode != InputMode::FullyCorrelated) {
        return Err(Error::invalid(
            "input_mode",
            format!("estimation needs fully correlated blocks, got {:?}", b.input_mode),
        ));
    }
    let mut inputs = PerUser::<Moments>::default();
    let mut feedback = PerUser::<Moments>::default();
    for b in blocks {
        for i in User::BOTH {
            inputs[i].extend(&b.x[i]);
            feedback[i].extend(&b.y_bwd[i][b.delay.min(b.len())..]);
        }
    }
    if feedback.0.iter().any(|m| m.values.len() < 2) {
        return Err(Error::EmptyInput("feedback samples after the delay"));
    }

    let power = PerUser::from_fn(|i| inputs[i].power());
    let fb = PerUser::from_fn(|i| feedback[i].variance());
    let (u1, u2) = (User::One, User::Two);
    let sq = |h: f64| h * h;
    let est = [
        sq(c.h_fwd(u1)) * power[u1].0,
        sq(c.h_fwd(u2)) * power[u2].0,
        sq(c.h_cross(u1)) * power[u2].0,
        sq(c.h_cross(u2)) * power[u1].0,
        (fb[u1].0 - 1.0).max(0.0),
        (fb[u2].0 - 1.0).max(0.0),
    ];
    let se = [
        sq(c.h_fwd(u1)) * power[u1].1,
        sq(c.h_fwd(u2)) * power[u2].1,
        sq(c.h_cross(u1)) * power[u2].1,
        sq(c.h_cross(u2)) * power[u1].1,
        fb[u1].1,
        fb[u2].1,
    ];
    Ok(ParameterEstimate {
        estimate: ChannelParameters::from_array(est)?,
        std_error: ChannelParameters::from_array(se)?,
        samples: feedback[u1].values.len(),
    })
}
