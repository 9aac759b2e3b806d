//! Disturbance observers for the lumped velocity disturbance.
//!
//! [`asmdob_step`] is the adaptive sliding-mode observer. A surrogate state
//! `z` is driven towards the measured pose by a finite-time sliding law; the
//! switching signal that keeps `σ = z − q` at zero carries the disturbance
//! (equivalent output injection), which is low-pass filtered into `ζ` and
//! then tracked by the estimate `d̂` with an adaptive switching gain `β̂`.
//!
//! [`eso_step`] is the linear extended state observer baseline: one
//! second-order observer per axis with both poles at `−ω_o`.
//!
//! Internal states advance once per loop step, mostly by explicit Euler; see
//! [`asmdob_step`] for the exceptions.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{nominal_increment, wrap_angle, ControlInput, DisturbanceVec, RobotPose};

/// `sign(x)` with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `|x|^a · sign(x)`.
#[inline]
pub fn sig_pow(x: f64, a: f64) -> f64 {
    x.abs().powf(a) * sign(x)
}

/// Elementwise `|xᵢ|^a · sign(xᵢ)`.
pub fn sgn_alpha<const N: usize>(x: &[f64; N], a: f64) -> [f64; N] {
    x.map(|xi| sig_pow(xi, a))
}

pub(crate) fn sgn_alpha_vec(x: &Vector3<f64>, a: f64) -> Vector3<f64> {
    x.map(|xi| sig_pow(xi, a))
}

/// Discontinuous switching term, optionally smoothed to `tanh(x / width)`.
/// A width of zero keeps the sign.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Switching {
    #[default]
    Sign,
    BoundaryLayer(f64),
}

impl Switching {
    pub fn from_width(width: Option<f64>) -> Self {
        match width {
            Some(w) if w > 0.0 => Switching::BoundaryLayer(w),
            _ => Switching::Sign,
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Switching::Sign => sign(x),
            Switching::BoundaryLayer(w) => (x / w).tanh(),
        }
    }

    fn apply_vec(&self, x: &Vector3<f64>) -> Vector3<f64> {
        x.map(|xi| self.apply(xi))
    }
}

/// Gains of the adaptive sliding-mode observer.
///
/// `k_d` must dominate the per-axis disturbance bound for the sliding
/// variable to reach zero. `k_s` nominally exceeds `λ₂‖s − d̃‖`, which cannot
/// be evaluated online; `λ₂·d_max` is a reasonable starting point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsmdobGains {
    pub c1: f64,
    pub c2: f64,
    pub alpha1: f64,
    pub k_d: f64,
    /// Filter time constant, seconds.
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Leak of the adaptive gain.
    pub lambda3: f64,
    pub k_s: f64,
    /// Width of the optional `tanh` boundary layer replacing `sgn(s)`.
    pub boundary_layer: Option<f64>,
    /// Advance the surrogate error with a backward-Euler step instead of a
    /// forward one. The explicit step chatters at `k_d·dt` around `σ = 0`.
    pub implicit_surrogate: bool,
}

impl Default for AsmdobGains {
    fn default() -> Self {
        Self {
            c1: 5.0,
            c2: 5.0,
            alpha1: 0.5,
            k_d: 1.0,
            lambda0: 0.002,
            lambda1: 5.0,
            lambda2: 500.0,
            lambda3: 1.0,
            k_s: 0.5,
            boundary_layer: None,
            implicit_surrogate: true,
        }
    }
}

impl AsmdobGains {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("c1", self.c1),
            ("c2", self.c2),
            ("k_d", self.k_d),
            ("lambda0", self.lambda0),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "observer.asmdob.{name} must be positive"
                )));
            }
        }
        if !(self.alpha1 > 0.0 && self.alpha1 < 1.0) {
            return Err(Error::Config(
                "observer.asmdob.alpha1 must lie in (0, 1)".into(),
            ));
        }
        if !(self.k_s.is_finite() && self.k_s >= 0.0) {
            return Err(Error::Config(
                "observer.asmdob.k_s must be non-negative".into(),
            ));
        }
        if let Some(w) = self.boundary_layer {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Config(
                    "observer.asmdob.boundary_layer must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Rate constants of the finite-time bound on `½‖σ‖²`:
    /// `(κ₁, κ₂, γ) = (2c, 2^((1+α₁)/2)·c, (1+α₁)/2)` with `c = min(c₁, c₂)`.
    pub fn sliding_rates(&self) -> (f64, f64, f64) {
        let c_min = self.c1.min(self.c2);
        let gamma = 0.5 * (1.0 + self.alpha1);
        (2.0 * c_min, 2f64.powf(gamma) * c_min, gamma)
    }
}

/// Internal state of the adaptive sliding-mode observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsmdobState {
    pub z: Vector3<f64>,
    /// `z − q` for the pose passed to the latest update.
    pub sigma: Vector3<f64>,
    pub zeta: Vector3<f64>,
    pub d_hat: Vector3<f64>,
    pub beta_hat: f64,
    /// Latest sliding variable `s = σ̇ + λ₁σ`.
    pub s: Vector3<f64>,
}

impl AsmdobState {
    /// `z(0) = q(0)`, everything else zero.
    pub fn new(q0: &RobotPose) -> Self {
        Self::with_sigma(q0, Vector3::zeros())
    }

    /// Starts the surrogate at `q(0) + σ₀`.
    pub fn with_sigma(q0: &RobotPose, sigma0: Vector3<f64>) -> Self {
        Self {
            z: q0.as_vector() + sigma0,
            sigma: sigma0,
            zeta: Vector3::zeros(),
            d_hat: Vector3::zeros(),
            beta_hat: 0.0,
            s: Vector3::zeros(),
        }
    }

    pub fn estimate(&self) -> DisturbanceVec {
        DisturbanceVec::from_vector(&self.d_hat)
    }

    fn is_finite(&self) -> bool {
        self.z.iter().all(|v| v.is_finite())
            && self.zeta.iter().all(|v| v.is_finite())
            && self.d_hat.iter().all(|v| v.is_finite())
            && self.beta_hat.is_finite()
    }
}

/// Heading differences are taken modulo 2π so a wrapped `θ` does not show up
/// as a 2π jump in `σ₃`.
fn pose_residual(z: &Vector3<f64>, q: &RobotPose) -> Vector3<f64> {
    Vector3::new(z[0] - q.x, z[1] - q.y, wrap_angle(z[2] - q.theta))
}

const RESIDUAL_FLOOR: f64 = 1e-12;

/// `μ(σ) = −c₁σ − c₂ sgn^α₁(σ) − k_d sgn(σ)`.
pub fn surrogate_rate(sigma: &Vector3<f64>, gains: &AsmdobGains) -> Vector3<f64> {
    -sigma * gains.c1 - sgn_alpha_vec(sigma, gains.alpha1) * gains.c2 - sigma.map(sign) * gains.k_d
}

/// Solves `x = σ + dt·μ(x)` for one axis, taking `sgn(0)` as the set
/// `[−1, 1]`: `x` is exactly zero once `|σ| ≤ k_d·dt`.
pub fn implicit_surrogate_step(sigma: f64, gains: &AsmdobGains, dt: f64) -> f64 {
    let target = sigma.abs() - dt * gains.k_d;
    if target <= 0.0 {
        return 0.0;
    }
    // y(1 + c₁dt) + c₂dt·y^α = target is increasing in y ≥ 0.
    let f = |y: f64| y * (1.0 + gains.c1 * dt) + gains.c2 * dt * y.powf(gains.alpha1) - target;
    let (mut lo, mut hi) = (0.0, target / (1.0 + gains.c1 * dt));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    sigma.signum() * 0.5 * (lo + hi)
}

/// One update of the adaptive sliding-mode observer.
///
/// The filter, estimate and adaptive gain take explicit-Euler steps. The
/// surrogate error takes a backward-Euler step when
/// [`AsmdobGains::implicit_surrogate`] is set, and the `Tu` part of `ż` is
/// integrated exactly under the held input.
///
/// `u` is the input applied over the coming step. Returns the advanced state
/// and the estimate it now holds.
pub fn asmdob_step(
    state: &AsmdobState,
    q: &RobotPose,
    u: &ControlInput,
    gains: &AsmdobGains,
    dt: f64,
) -> Result<(AsmdobState, DisturbanceVec)> {
    if !(dt > 0.0) {
        return Err(Error::Config("dt must be positive".into()));
    }
    // Sub-picometre residuals are integrator roundoff, not disturbance, and
    // would otherwise trip the sign terms.
    let sigma = pose_residual(&state.z, q).map(|x| if x.abs() < RESIDUAL_FLOOR { 0.0 } else { x });
    let mu = if gains.implicit_surrogate {
        sigma.map(|x| (implicit_surrogate_step(x, gains, dt) - x) / dt)
    } else {
        surrogate_rate(&sigma, gains)
    };
    let zeta_dot = (mu - state.zeta) / gains.lambda0;

    // With q̇ replaced by Tu + d̂, the surrogate rate is σ̇ = μ − d̂.
    let sigma_dot = mu - state.d_hat;
    let s = sigma_dot + sigma * gains.lambda1;

    // s ≈ d̃ once σ slides, so the switching term pushes d̂ towards d.
    let switch = Switching::from_width(gains.boundary_layer);
    let d_hat_dot = (state.zeta + sigma * gains.lambda1 - state.d_hat) * gains.lambda2
        + switch.apply_vec(&s) * (gains.k_s + state.beta_hat);
    let beta_dot = -gains.lambda3 * state.beta_hat + s.norm();

    // The Tu part of ż is integrated exactly over the step so that an
    // undisturbed robot leaves σ at zero.
    let z = state.z + nominal_increment(q.theta, u, dt) + mu * dt;
    let next = AsmdobState {
        z,
        sigma: pose_residual(&z, q),
        zeta: state.zeta + zeta_dot * dt,
        d_hat: state.d_hat + d_hat_dot * dt,
        beta_hat: (state.beta_hat + beta_dot * dt).max(0.0),
        s,
    };
    if !next.is_finite() {
        return Err(Error::NonFinite("observer state"));
    }
    Ok((next, next.estimate()))
}

/// Bandwidth of the per-axis linear extended state observer, rad/s.
///
/// The default gives the same steady position-channel error as the default
/// ASMDOB on the reference scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsoGains {
    pub omega_o: [f64; 3],
}

impl Default for EsoGains {
    fn default() -> Self {
        Self {
            omega_o: [333.0; 3],
        }
    }
}

impl EsoGains {
    pub fn uniform(omega_o: f64) -> Self {
        Self {
            omega_o: [omega_o; 3],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega_o.iter().all(|w| w.is_finite() && *w > 0.0) {
            Ok(())
        } else {
            Err(Error::Config(
                "observer.eso.omega_o must be positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsoState {
    pub q_hat: Vector3<f64>,
    pub d_hat: Vector3<f64>,
}

impl EsoState {
    pub fn new(q0: &RobotPose) -> Self {
        Self {
            q_hat: q0.as_vector(),
            d_hat: Vector3::zeros(),
        }
    }

    pub fn estimate(&self) -> DisturbanceVec {
        DisturbanceVec::from_vector(&self.d_hat)
    }
}

/// One explicit-Euler update of the extended state observer
/// `q̂̇ = Tu + d̂ + 2ω_o(q − q̂)`, `d̂̇ = ω_o²(q − q̂)`.
pub fn eso_step(
    state: &EsoState,
    q: &RobotPose,
    u: &ControlInput,
    gains: &EsoGains,
    dt: f64,
) -> Result<(EsoState, DisturbanceVec)> {
    if !(dt > 0.0) {
        return Err(Error::Config("dt must be positive".into()));
    }
    let innovation = -pose_residual(&state.q_hat, q);
    let w = Vector3::from(gains.omega_o);
    let l1 = w * 2.0;
    let l2 = w.component_mul(&w);

    let q_hat_dot = state.d_hat + l1.component_mul(&innovation);
    let d_hat_dot = l2.component_mul(&innovation);
    let next = EsoState {
        q_hat: state.q_hat + nominal_increment(q.theta, u, dt) + q_hat_dot * dt,
        d_hat: state.d_hat + d_hat_dot * dt,
    };
    if !(next
        .q_hat
        .iter()
        .chain(next.d_hat.iter())
        .all(|v| v.is_finite()))
    {
        return Err(Error::NonFinite("observer state"));
    }
    Ok((next, next.estimate()))
}

/// Observer selection for a closed-loop run.
#[derive(Debug, Clone)]
pub enum DisturbanceObserver {
    Asmdob {
        gains: AsmdobGains,
        state: AsmdobState,
    },
    Eso {
        gains: EsoGains,
        state: EsoState,
    },
    /// Passes the true disturbance through; simulation only.
    Oracle(DisturbanceVec),
    None,
}

impl DisturbanceObserver {
    /// Estimate available to the controller at the current step.
    pub fn estimate(&self) -> DisturbanceVec {
        match self {
            DisturbanceObserver::Asmdob { state, .. } => state.estimate(),
            DisturbanceObserver::Eso { state, .. } => state.estimate(),
            DisturbanceObserver::Oracle(d) => *d,
            DisturbanceObserver::None => DisturbanceVec::ZERO,
        }
    }

    /// Feeds the oracle with the true disturbance for the current step.
    pub fn observe_truth(&mut self, d: DisturbanceVec) {
        if let DisturbanceObserver::Oracle(slot) = self {
            *slot = d;
        }
    }

    pub fn beta_hat(&self) -> f64 {
        match self {
            DisturbanceObserver::Asmdob { state, .. } => state.beta_hat,
            _ => 0.0,
        }
    }

    /// `z − q` against the given pose; zero for observers without a surrogate.
    pub fn residual(&self, q: &RobotPose) -> Vector3<f64> {
        match self {
            DisturbanceObserver::Asmdob { state, .. } => pose_residual(&state.z, q),
            _ => Vector3::zeros(),
        }
    }

    pub fn sigma(&self) -> Vector3<f64> {
        match self {
            DisturbanceObserver::Asmdob { state, .. } => state.sigma,
            _ => Vector3::zeros(),
        }
    }

    /// Advances the observer over one step with the applied input.
    pub fn update(&mut self, q: &RobotPose, u: &ControlInput, dt: f64) -> Result<()> {
        match self {
            DisturbanceObserver::Asmdob { gains, state } => {
                *state = asmdob_step(state, q, u, gains, dt)?.0;
            }
            DisturbanceObserver::Eso { gains, state } => {
                *state = eso_step(state, q, u, gains, dt)?.0;
            }
            DisturbanceObserver::Oracle(_) | DisturbanceObserver::None => {}
        }
        Ok(())
    }
}
