//! Analytic cost model: maps a metered protocol execution to milliseconds
//! and a scalar security score.
//!
//! Time has two independent parts. Network time charges one latency per
//! sequential round (optionally jittered) plus serialized bytes over a
//! fixed bandwidth. Compute time charges per-operation constants scaled by
//! a ring-width factor `w(k) = ceil(k/64)^2`, so 128-bit arithmetic costs
//! four times its 64-bit counterpart.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::protocol::{BusLedger, ProtocolParams};
use crate::seed::rng_from;
use crate::{Error, Result};

/// Link parameters of the simulated network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    /// Per-round latency in milliseconds, `> 0`.
    pub latency_ms: f64,
    /// Bandwidth in bytes per millisecond, `> 0`.
    pub bandwidth_bpms: f64,
    /// Relative half-width of the per-round latency jitter, in `[0, 1)`.
    pub jitter_pct: f64,
}

impl Default for NetworkModel {
    fn default() -> Self {
        NetworkModel {
            latency_ms: 1.0,
            bandwidth_bpms: 1000.0,
            jitter_pct: 0.0,
        }
    }
}

impl NetworkModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.latency_ms > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "latency_ms must be > 0, got {}",
                self.latency_ms
            )));
        }
        if !(self.bandwidth_bpms > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "bandwidth_bpms must be > 0, got {}",
                self.bandwidth_bpms
            )));
        }
        if !(0.0..1.0).contains(&self.jitter_pct) {
            return Err(Error::InvalidConfig(format!(
                "jitter_pct must be in [0, 1), got {}",
                self.jitter_pct
            )));
        }
        Ok(())
    }

    /// Milliseconds spent on the wire: `rounds * latency + bytes / bandwidth`.
    ///
    /// With `jitter_pct > 0` each round's latency is scaled by `1 + u` with
    /// `u` uniform in `(-jitter, +jitter)` from the seeded stream; with
    /// jitter 0 no random draw happens and the result is a pure function of
    /// the ledger.
    pub fn network_time(&self, ledger: &BusLedger, seed: u64) -> f64 {
        let latency_total = if self.jitter_pct == 0.0 {
            ledger.sequential_rounds as f64 * self.latency_ms
        } else {
            let mut rng = rng_from(seed);
            (0..ledger.sequential_rounds)
                .map(|_| {
                    let u: f64 = rng.gen_range(-self.jitter_pct..self.jitter_pct);
                    self.latency_ms * (1.0 + u)
                })
                .sum()
        };
        latency_total + ledger.total_bytes as f64 / self.bandwidth_bpms
    }
}

/// Per-operation compute constants, all in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComputeModel {
    pub c_share: f64,
    pub c_mul: f64,
    pub c_check: f64,
}

impl Default for ComputeModel {
    fn default() -> Self {
        ComputeModel {
            c_share: 0.001,
            c_mul: 0.002,
            c_check: 0.001,
        }
    }
}

impl ComputeModel {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("c_share", self.c_share),
            ("c_mul", self.c_mul),
            ("c_check", self.c_check),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("{key} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// `(c_share * n * L + c_mul * L + c_check * R * L) * w(k)`.
    pub fn compute_time(&self, params: &ProtocolParams) -> f64 {
        let n = params.parties as f64;
        let l = params.workload_len as f64;
        let r = params.verify_rounds as f64;
        (self.c_share * n * l + self.c_mul * l + self.c_check * r * l)
            * width_factor(params.security_bits)
    }
}

/// Arithmetic slowdown of a `k`-bit ring relative to one machine word.
pub fn width_factor(security_bits: u32) -> f64 {
    let words = security_bits.div_ceil(64) as f64;
    words * words
}

/// Scalar in `[0, 1]`: each verification round contributes
/// `min(k, 40)` bits of confidence, capped at 128.
pub fn security_score(params: &ProtocolParams) -> f64 {
    let per_round = params.security_bits.min(40) as u64;
    let total = (params.verify_rounds as u64 * per_round).min(128);
    total as f64 / 128.0
}

/// Everything the tuner observes about one protocol execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecutionMetrics {
    /// `compute_time + network_time`, milliseconds.
    pub time_ms: f64,
    pub bytes: u64,
    pub messages: u64,
    pub rounds: u64,
    pub security_score: f64,
}
