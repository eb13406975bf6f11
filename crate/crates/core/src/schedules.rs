//! Silver, constant and restarted step-size schedules.
//!
//! Entries are stored unscaled; the optimizer divides by the smoothness
//! constant `L` when it applies step `n`.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// The silver ratio `1 + √2`.
pub const RHO: f64 = 1.0 + SQRT_2;

/// Largest level accepted by [`silver_schedule`].
pub const MAX_LEVEL: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleMode {
    Silver,
    Constant,
    /// Silver blocks of length `inner`, each restarting at index 0.
    RestartedSilver { inner: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepSchedule {
    pub mode: ScheduleMode,
    pub entries: Vec<f64>,
    pub smoothness: f64,
}

impl StepSchedule {
    /// Unscaled step `η_i`. Silver and restarted schedules extend past
    /// `entries` through [`silver_step`]; constant schedules repeat.
    pub fn eta(&self, i: usize) -> f64 {
        if let Some(&e) = self.entries.get(i) {
            return e;
        }
        match self.mode {
            ScheduleMode::Silver => silver_step(i as u64),
            ScheduleMode::Constant => self.entries.first().copied().unwrap_or(1.0),
            ScheduleMode::RestartedSilver { inner } => silver_step((i % inner) as u64),
        }
    }

    /// Applied step `η_i / L`.
    pub fn applied(&self, i: usize) -> f64 {
        self.eta(i) / self.smoothness
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same entries, divided by `smoothness` at application time.
    pub fn with_smoothness(mut self, smoothness: f64) -> Result<Self> {
        if !(smoothness.is_finite() && smoothness > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "smoothness must be positive, got {smoothness}"
            )));
        }
        self.smoothness = smoothness;
        Ok(self)
    }

    pub fn label(&self) -> String {
        match self.mode {
            ScheduleMode::Silver => "silver".into(),
            ScheduleMode::Constant => format!("constant({})", self.eta(0)),
            ScheduleMode::RestartedSilver { inner } => format!("restart(m={inner})"),
        }
    }
}

/// `η^{(k)}` of length `2^k − 1`, built as `[η^{(k−1)}, 1 + ρ^{k−2}, η^{(k−1)}]`.
pub fn silver_schedule(k: u32) -> Result<StepSchedule> {
    if k == 0 || k > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "silver level must be in 1..={MAX_LEVEL}, got {k}"
        )));
    }
    let mut entries = Vec::with_capacity((1usize << k) - 1);
    entries.push(SQRT_2);
    for level in 1..k {
        let mid = 1.0 + RHO.powi(level as i32 - 1);
        let prev = entries.clone();
        entries.push(mid);
        entries.extend_from_slice(&prev);
    }
    Ok(StepSchedule {
        mode: ScheduleMode::Silver,
        entries,
        smoothness: 1.0,
    })
}

/// The first `n` entries of the infinite silver sequence, for budgets that
/// are not of the form `2^k − 1`.
pub fn silver_prefix(n: usize) -> StepSchedule {
    StepSchedule {
        mode: ScheduleMode::Silver,
        entries: (0..n as u64).map(silver_step).collect(),
        smoothness: 1.0,
    }
}

/// Entry `n` of the infinite silver sequence: `1 + ρ^{v−1}` where `2^v` is the
/// largest power of two dividing `n + 1`.
pub fn silver_step(n: u64) -> f64 {
    let v = (n + 1).trailing_zeros();
    if v == 0 {
        SQRT_2
    } else {
        1.0 + RHO.powi(v as i32 - 1)
    }
}

/// Symbolic form of [`silver_step`]`(n)`.
pub fn silver_step_label(n: u64) -> String {
    match (n + 1).trailing_zeros() {
        0 => "√2".into(),
        1 => "2".into(),
        2 => "2+√2".into(),
        v => format!("1+ρ^{}", v - 1),
    }
}

/// Rate constant `r_k = 1 / (1 + √(4ρ^{2k} − 3))`.
pub fn rate_r(k: u32) -> f64 {
    let p = RHO.powi(2 * k as i32);
    1.0 / (1.0 + (4.0 * p - 3.0).sqrt())
}

/// `n` copies of the unscaled step `eta`.
pub fn constant_schedule(eta: f64, n: usize) -> Result<StepSchedule> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "constant step must be positive, got {eta}"
        )));
    }
    Ok(StepSchedule {
        mode: ScheduleMode::Constant,
        entries: vec![eta; n],
        smoothness: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartPlan {
    pub k_star: u32,
    pub inner_iters: usize,
    pub cycles: usize,
    pub total: usize,
}

impl RestartPlan {
    pub fn schedule(&self) -> StepSchedule {
        self.schedule_prefix(self.total)
    }

    /// Restarted schedule with only the first `n` entries materialized.
    pub fn schedule_prefix(&self, n: usize) -> StepSchedule {
        let entries = (0..n.min(self.inner_iters)).map(|i| silver_step(i as u64)).collect();
        StepSchedule {
            mode: ScheduleMode::RestartedSilver {
                inner: self.inner_iters,
            },
            entries,
            smoothness: 1.0,
        }
    }
}

/// `k* = ⌈log_ρ κ⌉ + 1`, blocks of `2^{k*} − 1` steps repeated `cycles` times.
pub fn restart_plan(kappa: f64, cycles: usize) -> Result<RestartPlan> {
    if !(kappa.is_finite() && kappa > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "condition number must exceed 1, got {kappa}"
        )));
    }
    if cycles == 0 {
        return Err(Error::InvalidArgument("cycles must be positive".into()));
    }
    let k_star = (kappa.ln() / RHO.ln()).ceil() as u32 + 1;
    if k_star > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "condition number {kappa} needs level {k_star} > {MAX_LEVEL}"
        )));
    }
    let contraction = 2.0 * kappa * rate_r(k_star);
    if !(contraction <= 2.0 / RHO) {
        return Err(Error::InvalidArgument(format!(
            "restart contraction 2κr = {contraction} exceeds 2/ρ"
        )));
    }
    let inner_iters = (1usize << k_star) - 1;
    Ok(RestartPlan {
        k_star,
        inner_iters,
        cycles,
        total: inner_iters * cycles,
    })
}

/// As many whole cycles as fit in `budget` iterations, at least one.
pub fn restart_plan_for_budget(kappa: f64, budget: usize) -> Result<RestartPlan> {
    let probe = restart_plan(kappa, 1)?;
    restart_plan(kappa, (budget / probe.inner_iters).max(1))
}
