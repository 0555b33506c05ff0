//! Finite-difference time domain solver for the coupled strings.
//!
//! A single uniform node array covers `[-1, 1]` with the mass at the middle
//! node. Interior nodes use the flux form `(σ wₓ)ₓ` with face-centred `σ`.
//! The junction node is a half-cell balance that carries the point mass:
//!
//! `(M + Δx/2·(ρ₁(0)+ρ₂(0))) z̈ = σ₊(w₊ - z)/Δx - σ₋(z - w₋)/Δx - Δx/2·(q₁+q₂) z`.
//!
//! Time stepping is explicit leapfrog, which conserves the staggered energy
//! `½ vᵀMv + ½ wₖᵀ K wₖ₊₁` exactly in the absence of control.

use crate::coefficients::{Side, SystemConfig};
use crate::control::ControlSignal;
use crate::error::{Error, Result};
use crate::modes::SampledState;

/// Stability margin on the CFL bound.
pub const CFL_SAFETY: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationParams {
    pub dx: f64,
    /// Requested step; defaults to half the CFL-limited step when absent.
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Keep every `k`-th level as a snapshot (0 disables snapshots).
    pub snapshot_every: usize,
}

impl SimulationParams {
    pub fn new(dx: f64, dt: Option<f64>, t_end: f64) -> Self {
        Self { dx, dt, t_end, snapshot_every: 0 }
    }
}

pub enum Boundary<'a> {
    /// `v(1, t) = 0`.
    Fixed,
    /// `v(1, t) = p(t)` through the cubic interpolant of the samples.
    Controlled(&'a ControlSignal),
}

/// Spatial operator: lumped masses, face conductances and potential weights.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub n_per_side: usize,
    pub dx: f64,
    pub x: Vec<f64>,
    pub mass: Vec<f64>,
    /// `σ` at the face between nodes `j` and `j + 1`.
    pub face_sigma: Vec<f64>,
    pub potential: Vec<f64>,
}

impl Discretization {
    pub fn new(config: &SystemConfig, n_per_side: usize) -> Result<Self> {
        if n_per_side < 4 {
            return Err(Error::InvalidConfig(format!("grid with {n_per_side} cells per string is too coarse")));
        }
        let n = n_per_side;
        let dx = 1.0 / n as f64;
        let x: Vec<f64> = (0..=2 * n).map(|j| -1.0 + j as f64 * dx).collect();
        let side_of = |j: usize| if j < n { Side::Left } else { Side::Right };
        let mut mass = vec![0.0; 2 * n + 1];
        let mut potential = vec![0.0; 2 * n + 1];
        for j in 1..2 * n {
            let c = config.side(side_of(j));
            mass[j] = c.rho.value(x[j]) * dx;
            potential[j] = c.q.value(x[j]) * dx;
        }
        let (l, r) = (config.left(), config.right());
        mass[n] = config.mass() + 0.5 * dx * (l.rho.value(0.0) + r.rho.value(0.0));
        potential[n] = 0.5 * dx * (l.q.value(0.0) + r.q.value(0.0));
        let face_sigma = (0..2 * n).map(|f| config.side(side_of(f)).sigma.value(x[f] + 0.5 * dx)).collect();
        Ok(Self { n_per_side: n, dx, x, mass, face_sigma, potential })
    }

    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    /// `0.9·Δx·min √(ρ/σ)` over nodes and faces of both strings.
    pub fn cfl_limit(&self, config: &SystemConfig) -> f64 {
        let mut slowest = f64::INFINITY;
        for side in [Side::Left, Side::Right] {
            let c = config.side(side);
            let (a, _) = side.interval();
            for i in 0..=2 * self.n_per_side {
                let x = a + 0.5 * i as f64 * self.dx;
                slowest = slowest.min((c.rho.value(x) / c.sigma.value(x)).sqrt());
            }
        }
        CFL_SAFETY * self.dx * slowest
    }

    /// `-(K w)_j` at interior nodes; boundary entries are left at zero.
    pub fn force(&self, w: &[f64], out: &mut [f64]) {
        let last = w.len() - 1;
        let inv = 1.0 / self.dx;
        out[0] = 0.0;
        out[last] = 0.0;
        for j in 1..last {
            out[j] = (self.face_sigma[j] * (w[j + 1] - w[j]) - self.face_sigma[j - 1] * (w[j] - w[j - 1])) * inv
                - self.potential[j] * w[j];
        }
    }

    /// Staggered energy of two consecutive levels.
    pub fn energy(&self, prev: &[f64], next: &[f64], dt: f64) -> f64 {
        let last = prev.len() - 1;
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for j in 1..last {
            let v = (next[j] - prev[j]) / dt;
            kinetic += self.mass[j] * v * v;
            potential += self.potential[j] * prev[j] * next[j];
        }
        for f in 0..last {
            potential += self.face_sigma[f] * (prev[f + 1] - prev[f]) * (next[f + 1] - next[f]) / self.dx;
        }
        0.5 * (kinetic + potential)
    }

    pub fn pack(&self, state: &SampledState) -> Result<Vec<f64>> {
        let n = self.n_per_side;
        if state.intervals() != n {
            return Err(Error::InvalidConfig(format!(
                "state sampled with {} cells per string, grid has {n}",
                state.intervals()
            )));
        }
        let mut w = Vec::with_capacity(2 * n + 1);
        w.extend_from_slice(&state.u[..n]);
        w.push(state.z);
        w.extend_from_slice(&state.v[1..]);
        Ok(w)
    }

    pub fn unpack(&self, w: &[f64]) -> SampledState {
        let n = self.n_per_side;
        SampledState { u: w[..=n].to_vec(), v: w[n..].to_vec(), z: w[n] }
    }

    /// `(3w_N - 4w_{N-1} + w_{N-2})/(2Δx)`.
    pub fn right_trace(&self, w: &[f64]) -> f64 {
        let l = w.len() - 1;
        (3.0 * w[l] - 4.0 * w[l - 1] + w[l - 2]) / (2.0 * self.dx)
    }
}

/// Two consecutive time levels of the leapfrog scheme.
#[derive(Debug, Clone)]
pub struct Leapfrog<'a> {
    disc: &'a Discretization,
    pub dt: f64,
    pub prev: Vec<f64>,
    pub curr: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Leapfrog<'a> {
    pub fn new(disc: &'a Discretization, dt: f64, prev: Vec<f64>, curr: Vec<f64>) -> Self {
        let scratch = vec![0.0; prev.len()];
        Self { disc, dt, prev, curr, scratch }
    }

    /// Starts from displacement and velocity with a second-order Taylor step;
    /// `boundary` is the right end value at `t = Δt`.
    pub fn start(disc: &'a Discretization, dt: f64, w0: Vec<f64>, w1: &[f64], boundary: f64) -> Self {
        let mut f = vec![0.0; w0.len()];
        disc.force(&w0, &mut f);
        let mut next: Vec<f64> =
            (0..w0.len()).map(|j| w0[j] + dt * w1[j] + 0.5 * dt * dt * f[j] / disc.mass[j].max(f64::MIN_POSITIVE)).collect();
        let last = next.len() - 1;
        next[0] = 0.0;
        next[last] = boundary;
        Self::new(disc, dt, w0, next)
    }

    /// Advances one step; `boundary` is the right end value at the new level.
    pub fn advance(&mut self, boundary: f64) {
        let dt2 = self.dt * self.dt;
        self.disc.force(&self.curr, &mut self.scratch);
        let last = self.curr.len() - 1;
        for j in 1..last {
            self.scratch[j] = 2.0 * self.curr[j] - self.prev[j] + dt2 * self.scratch[j] / self.disc.mass[j];
        }
        self.scratch[0] = 0.0;
        self.scratch[last] = boundary;
        std::mem::swap(&mut self.prev, &mut self.curr);
        std::mem::swap(&mut self.curr, &mut self.scratch);
    }

    pub fn energy(&self) -> f64 {
        self.disc.energy(&self.prev, &self.curr, self.dt)
    }

    /// Time-reversed scheme: swapping the levels runs the recurrence backwards.
    pub fn reversed(self) -> Self {
        Self { disc: self.disc, dt: self.dt, prev: self.curr, curr: self.prev, scratch: self.scratch }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dx: f64,
    pub dt: f64,
    pub x: Vec<f64>,
    /// Level times `t_k = kΔt`.
    pub t: Vec<f64>,
    /// `vₓ(1, t_k)`.
    pub trace: Vec<f64>,
    /// `z(t_k)`.
    pub junction: Vec<f64>,
    /// Staggered energy at `t_{k+½}`.
    pub energy: Vec<(f64, f64)>,
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub final_displacement: SampledState,
    pub final_velocity: SampledState,
}

impl Trajectory {
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energy[0].1;
        self.energy.iter().fold(0.0f64, |m, (_, e)| m.max((e - e0).abs())) / e0.abs().max(f64::MIN_POSITIVE)
    }
}

/// Step count and step size that land exactly on `t_end`.
pub fn time_grid(disc: &Discretization, config: &SystemConfig, params: &SimulationParams) -> Result<(usize, f64)> {
    let limit = disc.cfl_limit(config);
    let requested = params.dt.unwrap_or(limit / CFL_SAFETY * 0.5);
    if !(requested > 0.0) || requested > limit {
        return Err(Error::CflViolation { dt: requested, limit });
    }
    let steps = ((params.t_end / requested).ceil() as usize).max(2);
    Ok((steps, params.t_end / steps as f64))
}

pub fn simulate(
    config: &SystemConfig,
    displacement: &SampledState,
    velocity: &SampledState,
    boundary: Boundary<'_>,
    params: &SimulationParams,
) -> Result<Trajectory> {
    let n = (1.0 / params.dx).round() as usize;
    let disc = Discretization::new(config, n)?;
    let (steps, dt) = time_grid(&disc, config, params)?;
    let spline = match boundary {
        Boundary::Fixed => None,
        Boundary::Controlled(sig) => Some(sig.interpolant()?),
    };
    let edge = |t: f64| spline.as_ref().map_or(0.0, |s| s.value(t));
    let mut w0 = disc.pack(displacement)?;
    let last = w0.len() - 1;
    w0[0] = 0.0;
    w0[last] = edge(0.0);
    let w1 = disc.pack(velocity)?;

    let mut t = Vec::with_capacity(steps + 1);
    let mut trace = Vec::with_capacity(steps + 1);
    let mut junction = Vec::with_capacity(steps + 1);
    let mut energy = Vec::with_capacity(steps);
    let mut snapshots = Vec::new();
    let mut record = |k: usize, w: &[f64], t: &mut Vec<f64>, trace: &mut Vec<f64>, junction: &mut Vec<f64>| {
        let tk = k as f64 * dt;
        t.push(tk);
        trace.push(disc.right_trace(w));
        junction.push(w[n]);
        if params.snapshot_every > 0 && k % params.snapshot_every == 0 {
            snapshots.push((tk, w.to_vec()));
        }
    };
    record(0, &w0, &mut t, &mut trace, &mut junction);
    let mut lf = Leapfrog::start(&disc, dt, w0, &w1, edge(dt));
    energy.push((0.5 * dt, lf.energy()));
    record(1, &lf.curr, &mut t, &mut trace, &mut junction);
    let mut older = lf.prev.clone();
    for k in 2..=steps {
        older.copy_from_slice(&lf.prev);
        lf.advance(edge(k as f64 * dt));
        if lf.curr.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState(format!("displacement at t = {}", k as f64 * dt)));
        }
        energy.push(((k as f64 - 0.5) * dt, lf.energy()));
        record(k, &lf.curr, &mut t, &mut trace, &mut junction);
    }
    // one-sided second-order velocity at the final level
    let vel: Vec<f64> =
        (0..lf.curr.len()).map(|j| (3.0 * lf.curr[j] - 4.0 * lf.prev[j] + older[j]) / (2.0 * dt)).collect();
    Ok(Trajectory {
        dx: disc.dx,
        dt,
        x: disc.x.clone(),
        t,
        trace,
        junction,
        energy,
        snapshots,
        final_displacement: disc.unpack(&lf.curr),
        final_velocity: disc.unpack(&vel),
    })
}

/// Angular frequency from upward zero crossings of a sampled signal.
pub fn zero_crossing_frequency(t: &[f64], values: &[f64]) -> Option<f64> {
    let mut crossings = Vec::new();
    for i in 1..values.len() {
        let (a, b) = (values[i - 1], values[i]);
        if a < 0.0 && b >= 0.0 {
            crossings.push(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let periods = (crossings.len() - 1) as f64;
    Some(2.0 * std::f64::consts::PI * periods / (crossings[crossings.len() - 1] - crossings[0]))
}
