//! Tracking controllers.
//!
//! The main law is a prescribed-performance backstepping controller. Each
//! tracking error is kept inside a shrinking envelope `|eᵢ| < εᵢρᵢ(t)` by
//! working on the transformed error `ηᵢ = ½ ln((εᵢρᵢ + eᵢ)/(εᵢρᵢ − eᵢ))`,
//! whose dynamics are `η̇ = Φ + Λ(Tu + d − q̇_d)`. The position step produces
//! the world-frame velocity `(m₁, m₂)`, realised as speed `v = |m|` and an
//! auxiliary heading `φ = atan2(m₂, m₁)`; the heading step then drives `θ`
//! onto `φ`.
//!
//! SMC and PID baselines reuse the same `(m₁, m₂) → (v, φ)` decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observers::{sig_pow, sign, Switching};
use crate::scenarios::ReferenceSample;
use crate::sim::{wrap_angle, ControlInput, DisturbanceVec, RobotPose};

/// Fraction of the envelope an error is clamped to before transforming.
pub const CLAMP_FRACTION: f64 = 1.0 - 1e-9;

/// Performance function parameters, per axis `(x, y, heading)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeParams {
    pub eps: [f64; 3],
    pub rho0: [f64; 3],
    pub rho_inf: [f64; 3],
    pub k_rho: f64,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        Self {
            eps: [1.0, 1.0, 1.0],
            rho0: [2.0, 2.0, 2.0],
            rho_inf: [0.01, 0.01, 0.05],
            k_rho: 1.0,
        }
    }
}

impl EnvelopeParams {
    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if !(self.eps[i] > 0.0 && self.eps[i] <= 1.0) {
                return Err(Error::Config(format!(
                    "envelope.eps[{i}] must lie in (0, 1]"
                )));
            }
            if !(self.rho_inf[i].is_finite() && self.rho_inf[i] > 0.0) {
                return Err(Error::Config(format!(
                    "envelope.rho_inf[{i}] must be positive"
                )));
            }
            if !(self.rho0[i].is_finite() && self.rho0[i] > self.rho_inf[i]) {
                return Err(Error::Config(format!(
                    "envelope.rho0[{i}] must exceed envelope.rho_inf[{i}]"
                )));
            }
        }
        if !(self.k_rho.is_finite() && self.k_rho > 0.0) {
            return Err(Error::Config("envelope.k_rho must be positive".into()));
        }
        Ok(())
    }

    /// Checks that the initial errors start strictly inside the envelope.
    pub fn check_initial(&self, e0: &[f64; 3]) -> Result<()> {
        for i in 0..3 {
            let bound = self.eps[i] * self.rho0[i];
            if !(e0[i].abs() < bound) {
                return Err(Error::Config(format!(
                    "initial error e{} = {:.6} lies outside the envelope eps*rho0 = {:.6}",
                    i + 1,
                    e0[i],
                    bound
                )));
            }
        }
        Ok(())
    }
}

/// `ρᵢ(t) = (ρᵢ₀ − ρᵢ∞) e^{−k_ρ t} + ρᵢ∞` and its time derivative.
pub fn envelope(t: f64, params: &EnvelopeParams) -> ([f64; 3], [f64; 3]) {
    let decay = (-params.k_rho * t).exp();
    let mut rho = [0.0; 3];
    let mut rho_dot = [0.0; 3];
    for i in 0..3 {
        let span = params.rho0[i] - params.rho_inf[i];
        rho[i] = span * decay + params.rho_inf[i];
        rho_dot[i] = -params.k_rho * span * decay;
    }
    (rho, rho_dot)
}

/// Clamps `e` to `±CLAMP_FRACTION·ε·ρ`. The flag is set when the raw error
/// was on or outside the envelope.
pub fn clamp_to_envelope(e: f64, rho: f64, eps: f64) -> (f64, bool) {
    let bound = eps * rho;
    let violated = !(e.abs() < bound);
    let lim = CLAMP_FRACTION * bound;
    (e.clamp(-lim, lim), violated)
}

/// `η = ½ ln((ερ + e)/(ερ − e))`; `e` must already be inside the envelope.
pub fn transform_error(e: f64, rho: f64, eps: f64) -> f64 {
    // Evaluated on |e| so that η(−e) = −η(e) holds bit for bit.
    let a = e.abs() / (eps * rho);
    e.signum() * 0.5 * (2.0 * a / (1.0 - a)).ln_1p()
}

/// `e = ερ·tanh(η)`.
pub fn inverse_transform(eta: f64, rho: f64, eps: f64) -> f64 {
    eps * rho * eta.tanh()
}

/// `φᵢ = −εᵢρ̇ᵢeᵢ/(εᵢ²ρᵢ² − eᵢ²)` and `Λᵢ = εᵢ/(εᵢ²ρᵢ² − eᵢ²)`.
pub fn phi_lambda(
    e: &[f64; 3],
    rho: &[f64; 3],
    rho_dot: &[f64; 3],
    eps: &[f64; 3],
) -> ([f64; 3], [f64; 3]) {
    let mut phi = [0.0; 3];
    let mut lambda = [0.0; 3];
    for i in 0..3 {
        let den = eps[i] * eps[i] * rho[i] * rho[i] - e[i] * e[i];
        phi[i] = -eps[i] * rho_dot[i] * e[i] / den;
        lambda[i] = eps[i] / den;
    }
    (phi, lambda)
}

/// Envelope bookkeeping for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransformedError {
    /// Raw errors `(x − x_d, y − y_d, wrap(θ − φ))`.
    pub e: [f64; 3],
    pub eta: [f64; 3],
    pub phi_vec: [f64; 3],
    pub lambda_diag: [f64; 3],
    pub rho: [f64; 3],
    pub rho_dot: [f64; 3],
    /// Per-axis envelope violation before clamping.
    pub violation: [bool; 3],
}

impl TransformedError {
    pub fn evaluate(t: f64, e: [f64; 3], params: &EnvelopeParams) -> Self {
        let (rho, rho_dot) = envelope(t, params);
        let mut clamped = [0.0; 3];
        let mut violation = [false; 3];
        let mut eta = [0.0; 3];
        for i in 0..3 {
            let (c, v) = clamp_to_envelope(e[i], rho[i], params.eps[i]);
            clamped[i] = c;
            violation[i] = v;
            eta[i] = transform_error(c, rho[i], params.eps[i]);
        }
        let (phi_vec, lambda_diag) = phi_lambda(&clamped, &rho, &rho_dot, &params.eps);
        Self {
            e,
            eta,
            phi_vec,
            lambda_diag,
            rho,
            rho_dot,
            violation,
        }
    }

    pub fn any_violation(&self) -> bool {
        self.violation.iter().any(|v| *v)
    }
}

/// Gains of the prescribed-performance controller.
///
/// `k3` should exceed the worst residual `|d̃₁|, |d̃₂|` and `k3_prime` the
/// worst `|d̃₃|`; neither can be checked at runtime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpcGains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k3_prime: f64,
    pub p: f64,
    /// `tanh` boundary-layer width replacing `sgn(η)`; `0` for pure sign.
    pub boundary_layer: Option<f64>,
    /// Time constant of the `φ̇` filter, seconds.
    pub tau_f: f64,
    pub lambda_form: LambdaForm,
}

/// Which `Λ` the control laws invert.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaForm {
    /// `∂η/∂e = ερ/(ε²ρ² − e²)`, so that `η̇ = Φ + Λ(q̇ − q̇_d)` holds exactly.
    #[default]
    ChainRule,
    /// `ε/(ε²ρ² − e²)` as returned by [`phi_lambda`]; off by a factor `ρ`.
    Printed,
}

impl LambdaForm {
    pub fn apply(&self, lambda_diag: &[f64; 3], rho: &[f64; 3]) -> [f64; 3] {
        match self {
            LambdaForm::ChainRule => std::array::from_fn(|i| lambda_diag[i] * rho[i]),
            LambdaForm::Printed => *lambda_diag,
        }
    }
}

fn default_boundary_layer() -> Option<f64> {
    Some(0.01)
}

fn default_tau_f() -> f64 {
    0.001
}

fn baseline_tau_f() -> f64 {
    0.02
}

impl Default for PpcGains {
    fn default() -> Self {
        Self {
            k1: 2.0,
            k2: 1.0,
            k3: 0.2,
            k3_prime: 0.2,
            p: 0.6,
            boundary_layer: default_boundary_layer(),
            tau_f: default_tau_f(),
            lambda_form: LambdaForm::ChainRule,
        }
    }
}

impl PpcGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k3_prime", self.k3_prime),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "controller.ppc.{name} must be positive"
                )));
            }
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Config("controller.ppc.p must lie in (0, 1)".into()));
        }
        validate_filter(self.boundary_layer, self.tau_f, "ppc")
    }

    fn switching(&self) -> Switching {
        Switching::from_width(self.boundary_layer)
    }
}

fn validate_filter(boundary_layer: Option<f64>, tau_f: f64, name: &str) -> Result<()> {
    if let Some(w) = boundary_layer {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Config(format!(
                "controller.{name}.boundary_layer must be non-negative"
            )));
        }
    }
    if !(tau_f.is_finite() && tau_f >= 0.0) {
        return Err(Error::Config(format!(
            "controller.{name}.tau_f must be non-negative"
        )));
    }
    Ok(())
}

/// World-frame velocity command and its polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionCommand {
    pub m1: f64,
    pub m2: f64,
    pub v: f64,
    pub varphi: f64,
}

/// `v = |m|`, `φ = atan2(m₂, m₁)`. A zero vector has no direction, so the
/// previous heading command (or `fallback`) is held.
pub fn polar_command(m1: f64, m2: f64, fallback: f64) -> PositionCommand {
    if m1 == 0.0 && m2 == 0.0 {
        return PositionCommand {
            m1,
            m2,
            v: 0.0,
            varphi: fallback,
        };
    }
    PositionCommand {
        m1,
        m2,
        v: m1.hypot(m2),
        varphi: m2.atan2(m1),
    }
}

/// Position step of the backstepping design:
/// `mᵢ = q̇_dᵢ + Λᵢ⁻¹[−φᵢ − k₁ηᵢ − k₂ sgnᵖ(ηᵢ) − k₃ sgn(ηᵢ)] − d̂ᵢ` for `i = 1, 2`.
///
/// `prev_varphi` is returned as `φ` when `m = 0`.
#[allow(clippy::too_many_arguments)]
pub fn ppc_position_law(
    eta: &[f64; 3],
    phi_vec: &[f64; 3],
    lambda_diag: &[f64; 3],
    qd_dot: (f64, f64),
    d_hat: &DisturbanceVec,
    gains: &PpcGains,
    prev_varphi: f64,
) -> PositionCommand {
    let sw = gains.switching();
    let axis = |i: usize| {
        (-phi_vec[i]
            - gains.k1 * eta[i]
            - gains.k2 * sig_pow(eta[i], gains.p)
            - gains.k3 * sw.apply(eta[i]))
            / lambda_diag[i]
    };
    let m1 = qd_dot.0 + axis(0) - d_hat.d1;
    let m2 = qd_dot.1 + axis(1) - d_hat.d2;
    polar_command(m1, m2, prev_varphi)
}

/// Heading step: `ω = φ̇ − d̂₃ + Λ₃⁻¹[−φ₃ − k₁η₃ − k₂ sgnᵖ(η₃) − k₃′ sgn(η₃)]`.
pub fn ppc_heading_law(
    eta3: f64,
    phi3: f64,
    lambda3: f64,
    varphi_dot: f64,
    d_hat3: f64,
    gains: &PpcGains,
) -> f64 {
    let sw = gains.switching();
    varphi_dot - d_hat3
        + (-phi3
            - gains.k1 * eta3
            - gains.k2 * sig_pow(eta3, gains.p)
            - gains.k3_prime * sw.apply(eta3))
            / lambda3
}

/// State of the filtered `φ̇` estimator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PpcState {
    pub varphi_prev: f64,
    pub varphi_dot_filt: f64,
    pub initialized: bool,
}

/// Backward difference of `φ`, unwrapped across ±π, passed through a
/// first-order lag with time constant `tau_f`. The first call returns 0.
pub fn varphi_derivative(state: &PpcState, varphi: f64, dt: f64, tau_f: f64) -> (PpcState, f64) {
    if !state.initialized {
        let next = PpcState {
            varphi_prev: varphi,
            varphi_dot_filt: 0.0,
            initialized: true,
        };
        return (next, 0.0);
    }
    let raw = wrap_angle(varphi - state.varphi_prev) / dt;
    let a = dt / (tau_f + dt);
    let filt = state.varphi_dot_filt + a * (raw - state.varphi_dot_filt);
    let next = PpcState {
        varphi_prev: varphi,
        varphi_dot_filt: filt,
        initialized: true,
    };
    (next, filt)
}

/// Output of one controller evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlStep {
    pub u: ControlInput,
    /// Commanded heading `φ`, wrapped.
    pub varphi: f64,
    pub varphi_dot: f64,
}

fn position_errors(q: &RobotPose, r: &ReferenceSample) -> (f64, f64) {
    (q.x - r.xd, q.y - r.yd)
}

/// Prescribed-performance backstepping controller with its `φ̇` state.
#[derive(Debug, Clone)]
pub struct PpcController {
    pub gains: PpcGains,
    pub envelope: EnvelopeParams,
    state: PpcState,
    last: TransformedError,
}

impl PpcController {
    pub fn new(gains: PpcGains, envelope: EnvelopeParams) -> Self {
        Self {
            gains,
            envelope,
            state: PpcState::default(),
            last: TransformedError::default(),
        }
    }

    /// Envelope bookkeeping from the latest evaluation.
    pub fn last_transform(&self) -> &TransformedError {
        &self.last
    }

    pub fn control(
        &mut self,
        t: f64,
        q: &RobotPose,
        r: &ReferenceSample,
        d_hat: &DisturbanceVec,
        dt: f64,
    ) -> ControlStep {
        let (ex, ey) = position_errors(q, r);
        // The heading slot is filled after φ is known.
        let pos = TransformedError::evaluate(t, [ex, ey, 0.0], &self.envelope);
        let fallback = if self.state.initialized {
            self.state.varphi_prev
        } else {
            q.theta
        };
        let cmd = ppc_position_law(
            &pos.eta,
            &pos.phi_vec,
            &self.gains.lambda_form.apply(&pos.lambda_diag, &pos.rho),
            (r.xd_dot, r.yd_dot),
            d_hat,
            &self.gains,
            fallback,
        );
        let (state, varphi_dot) = varphi_derivative(&self.state, cmd.varphi, dt, self.gains.tau_f);
        self.state = state;

        let e3 = wrap_angle(q.theta - cmd.varphi);
        let full = TransformedError::evaluate(t, [ex, ey, e3], &self.envelope);
        let omega = ppc_heading_law(
            full.eta[2],
            full.phi_vec[2],
            self.gains.lambda_form.apply(&full.lambda_diag, &full.rho)[2],
            varphi_dot,
            d_hat.d3,
            &self.gains,
        );
        self.last = full;
        ControlStep {
            u: ControlInput::new(cmd.v, omega),
            varphi: cmd.varphi,
            varphi_dot,
        }
    }
}

/// Gains of the kinematic sliding-mode baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmcGains {
    /// Linear reaching gain on `s = e`.
    pub k_a: f64,
    /// Switching gain; should exceed the disturbance bound.
    pub k_b: f64,
    pub k_heading: f64,
    pub k_heading_switch: f64,
    pub tau_f: f64,
}

impl Default for SmcGains {
    fn default() -> Self {
        Self {
            k_a: 1.0,
            k_b: 0.5,
            k_heading: 10.0,
            k_heading_switch: 0.3,
            tau_f: baseline_tau_f(),
        }
    }
}

impl SmcGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_a", self.k_a),
            ("k_b", self.k_b),
            ("k_heading", self.k_heading),
            ("k_heading_switch", self.k_heading_switch),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "controller.smc.{name} must be non-negative"
                )));
            }
        }
        validate_filter(None, self.tau_f, "smc")
    }
}

/// Sliding-mode baseline: `m = q̇_d − k_a e − k_b sgn(e)` on position,
/// `ω = φ̇ − k_h e₃ − k_hs sgn(e₃)` on heading with `e₃ = wrap(θ − φ)`.
#[derive(Debug, Clone)]
pub struct SmcController {
    pub gains: SmcGains,
    state: PpcState,
}

impl SmcController {
    pub fn new(gains: SmcGains) -> Self {
        Self {
            gains,
            state: PpcState::default(),
        }
    }

    pub fn control(&mut self, q: &RobotPose, r: &ReferenceSample, dt: f64) -> ControlStep {
        let g = &self.gains;
        let (ex, ey) = position_errors(q, r);
        let m1 = r.xd_dot - g.k_a * ex - g.k_b * sign(ex);
        let m2 = r.yd_dot - g.k_a * ey - g.k_b * sign(ey);
        let fallback = if self.state.initialized {
            self.state.varphi_prev
        } else {
            q.theta
        };
        let cmd = polar_command(m1, m2, fallback);
        let (state, varphi_dot) = varphi_derivative(&self.state, cmd.varphi, dt, g.tau_f);
        self.state = state;
        let e3 = wrap_angle(q.theta - cmd.varphi);
        let omega = varphi_dot - g.k_heading * e3 - g.k_heading_switch * sign(e3);
        ControlStep {
            u: ControlInput::new(cmd.v, omega),
            varphi: cmd.varphi,
            varphi_dot,
        }
    }
}

/// Gains of the PID baseline. Position axes share one gain set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Anti-windup clamp on each position integral, m·s.
    pub i_max: f64,
    pub kp_heading: f64,
    pub ki_heading: f64,
    pub kd_heading: f64,
    /// Anti-windup clamp on the heading integral, rad·s.
    pub i_max_heading: f64,
    /// Time constant of the derivative filters, seconds.
    pub tau_d: f64,
    pub tau_f: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self {
            kp: 1.5,
            ki: 0.5,
            kd: 0.05,
            i_max: 1.0,
            kp_heading: 10.0,
            ki_heading: 1.0,
            kd_heading: 0.05,
            i_max_heading: 0.5,
            tau_d: baseline_tau_f(),
            tau_f: baseline_tau_f(),
        }
    }
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kp", self.kp),
            ("ki", self.ki),
            ("kd", self.kd),
            ("kp_heading", self.kp_heading),
            ("ki_heading", self.ki_heading),
            ("kd_heading", self.kd_heading),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "controller.pid.{name} must be non-negative"
                )));
            }
        }
        for (name, v) in [("i_max", self.i_max), ("i_max_heading", self.i_max_heading)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "controller.pid.{name} must be positive"
                )));
            }
        }
        if !(self.tau_d.is_finite() && self.tau_d >= 0.0) {
            return Err(Error::Config(
                "controller.pid.tau_d must be non-negative".into(),
            ));
        }
        validate_filter(None, self.tau_f, "pid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: [f64; 3],
    pub prev_error: [f64; 3],
    pub deriv_filt: [f64; 3],
    pub initialized: bool,
    pub varphi: PpcState,
}

/// PID baseline. Errors are `e = q − q_d` and `e₃ = wrap(θ − φ)`;
/// `m = q̇_d − (k_p e + k_i ∫e + k_d ė)` and `ω = φ̇ − (…)` on `e₃`.
#[derive(Debug, Clone)]
pub struct PidController {
    pub gains: PidGains,
    pub state: PidState,
}

impl PidController {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            state: PidState::default(),
        }
    }

    pub fn control(&mut self, q: &RobotPose, r: &ReferenceSample, dt: f64) -> ControlStep {
        let g = self.gains;
        let (ex, ey) = position_errors(q, r);

        let mut pos_terms = [0.0; 2];
        for (i, e) in [ex, ey].into_iter().enumerate() {
            pos_terms[i] = self.pid_axis(i, e, dt, g.kp, g.ki, g.kd, g.i_max);
        }
        let m1 = r.xd_dot - pos_terms[0];
        let m2 = r.yd_dot - pos_terms[1];
        let fallback = if self.state.varphi.initialized {
            self.state.varphi.varphi_prev
        } else {
            q.theta
        };
        let cmd = polar_command(m1, m2, fallback);
        let (vs, varphi_dot) = varphi_derivative(&self.state.varphi, cmd.varphi, dt, g.tau_f);
        self.state.varphi = vs;

        let e3 = wrap_angle(q.theta - cmd.varphi);
        let heading = self.pid_axis(
            2,
            e3,
            dt,
            g.kp_heading,
            g.ki_heading,
            g.kd_heading,
            g.i_max_heading,
        );
        self.state.initialized = true;
        ControlStep {
            u: ControlInput::new(cmd.v, varphi_dot - heading),
            varphi: cmd.varphi,
            varphi_dot,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn pid_axis(
        &mut self,
        i: usize,
        e: f64,
        dt: f64,
        kp: f64,
        ki: f64,
        kd: f64,
        i_max: f64,
    ) -> f64 {
        let st = &mut self.state;
        let raw_deriv = if st.initialized {
            let diff = if i == 2 {
                wrap_angle(e - st.prev_error[i])
            } else {
                e - st.prev_error[i]
            };
            diff / dt
        } else {
            0.0
        };
        let a = dt / (self.gains.tau_d + dt);
        st.deriv_filt[i] += a * (raw_deriv - st.deriv_filt[i]);
        st.prev_error[i] = e;
        let out = kp * e + ki * st.integral[i] + kd * st.deriv_filt[i];
        st.integral[i] = (st.integral[i] + e * dt).clamp(-i_max, i_max);
        out
    }
}

/// Controller selection for a closed-loop run.
#[derive(Debug, Clone)]
pub enum TrackingController {
    Ppc(PpcController),
    Smc(SmcController),
    Pid(PidController),
}

impl TrackingController {
    pub fn control(
        &mut self,
        t: f64,
        q: &RobotPose,
        r: &ReferenceSample,
        d_hat: &DisturbanceVec,
        dt: f64,
    ) -> ControlStep {
        match self {
            TrackingController::Ppc(c) => c.control(t, q, r, d_hat, dt),
            TrackingController::Smc(c) => c.control(q, r, dt),
            TrackingController::Pid(c) => c.control(q, r, dt),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrackingController::Ppc(_) => "ppc",
            TrackingController::Smc(_) => "smc",
            TrackingController::Pid(_) => "pid",
        }
    }
}
