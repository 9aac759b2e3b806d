//! Unicycle kinematics with additive fixed-frame velocity disturbances.
//!
//! The plant is `q̇ = T(θ)·u + d`, with `q = (x, y, θ)`, `u = (v, ω)` and
//! `T(θ) = [[cos θ, 0], [sin θ, 0], [0, 1]]`. The input is held constant over
//! a step; the disturbance is sampled at whatever times the integrator needs.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Robot configuration in the fixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotPose {
    pub x: f64,
    pub y: f64,
    /// Heading, kept in `(-π, π]`.
    pub theta: f64,
}

impl RobotPose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.theta)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

/// Body-frame velocity command.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub v: f64,
    pub omega: f64,
}

impl ControlInput {
    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }

    /// Clamps each channel to its symmetric limit, when one is configured.
    pub fn saturate(self, limits: &InputLimits) -> Self {
        let clamp = |x: f64, lim: Option<f64>| match lim {
            Some(m) => x.clamp(-m, m),
            None => x,
        };
        Self {
            v: clamp(self.v, limits.v_max),
            omega: clamp(self.omega, limits.omega_max),
        }
    }

    /// `T(θ)·u` as a fixed-frame rate.
    pub fn fixed_frame_rate(&self, theta: f64) -> Vector3<f64> {
        Vector3::new(self.v * theta.cos(), self.v * theta.sin(), self.omega)
    }
}

/// Optional actuator limits applied at the plant boundary.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputLimits {
    pub v_max: Option<f64>,
    pub omega_max: Option<f64>,
}

/// Lumped velocity disturbance, added directly to the pose rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisturbanceVec {
    /// Fixed-frame x velocity, m/s.
    pub d1: f64,
    /// Fixed-frame y velocity, m/s.
    pub d2: f64,
    /// Heading rate, rad/s.
    pub d3: f64,
}

impl DisturbanceVec {
    pub const ZERO: Self = Self {
        d1: 0.0,
        d2: 0.0,
        d3: 0.0,
    };

    pub fn new(d1: f64, d2: f64, d3: f64) -> Self {
        Self { d1, d2, d3 }
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.d1, self.d2, self.d3)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn max_abs(&self) -> f64 {
        self.d1.abs().max(self.d2.abs()).max(self.d3.abs())
    }
}

/// Time derivative of a [`RobotPose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseRate {
    pub x_dot: f64,
    pub y_dot: f64,
    pub theta_dot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

/// Time stepping for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub initial_pose: RobotPose,
    pub integrator: Integrator,
    pub limits: InputLimits,
}

/// Heading of the reference start point; facing −y, towards the reference.
pub const DEFAULT_THETA0: f64 = -std::f64::consts::FRAC_PI_2;

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 30.0,
            initial_pose: RobotPose::new(1.3, 1.2, DEFAULT_THETA0),
            integrator: Integrator::Rk4,
            limits: InputLimits::default(),
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config("dt must be positive".into()));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::Config("t_final must be at least dt".into()));
        }
        if !self.initial_pose.is_finite() {
            return Err(Error::Config("initial_pose must be finite".into()));
        }
        for lim in [self.limits.v_max, self.limits.omega_max]
            .into_iter()
            .flatten()
        {
            if !(lim.is_finite() && lim > 0.0) {
                return Err(Error::Config("input limits must be positive".into()));
            }
        }
        Ok(())
    }

    /// Number of whole steps covering `t_final`. The small guard absorbs
    /// representation error in ratios such as `30.0 / 0.001`.
    pub fn step_count(&self) -> usize {
        (self.t_final / self.dt + 1e-9).floor() as usize
    }
}

/// Pose rate `T(θ)u + d`.
pub fn plant_derivative(q: &RobotPose, u: &ControlInput, d: &DisturbanceVec) -> Result<PoseRate> {
    ensure_finite(&[q.x, q.y, q.theta], "pose")?;
    ensure_finite(&[u.v, u.omega], "control input")?;
    ensure_finite(&[d.d1, d.d2, d.d3], "disturbance")?;
    Ok(rate(q.theta, u, d))
}

#[inline]
fn rate(theta: f64, u: &ControlInput, d: &DisturbanceVec) -> PoseRate {
    PoseRate {
        x_dot: u.v * theta.cos() + d.d1,
        y_dot: u.v * theta.sin() + d.d2,
        theta_dot: u.omega + d.d3,
    }
}

/// Exact pose change over `dt` of the undisturbed unicycle with `u` held
/// constant, starting from heading `theta`.
pub fn nominal_increment(theta: f64, u: &ControlInput, dt: f64) -> Vector3<f64> {
    let half = 0.5 * u.omega * dt;
    // sin(h)/h, with its series near zero
    let sinc = if half.abs() < 1e-4 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    let chord = u.v * dt * sinc;
    let mid = theta + half;
    Vector3::new(chord * mid.cos(), chord * mid.sin(), u.omega * dt)
}

/// Advances `q` from `t` to `t + dt` with `u` held constant.
///
/// Heading is integrated unwrapped within the step and wrapped on output.
pub fn integrate_step<F>(
    q: &RobotPose,
    u: &ControlInput,
    d_fn: F,
    t: f64,
    dt: f64,
    method: Integrator,
) -> Result<RobotPose>
where
    F: Fn(f64) -> DisturbanceVec,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config("dt must be positive".into()));
    }
    ensure_finite(&[q.x, q.y, q.theta], "pose")?;
    ensure_finite(&[u.v, u.omega], "control input")?;

    let s = Vector3::new(q.x, q.y, q.theta);
    let f = |tt: f64, s: &Vector3<f64>| {
        let r = rate(s[2], u, &d_fn(tt));
        Vector3::new(r.x_dot, r.y_dot, r.theta_dot)
    };

    let next = match method {
        Integrator::Euler => s + f(t, &s) * dt,
        Integrator::Rk4 => {
            let half = 0.5 * dt;
            let k1 = f(t, &s);
            let k2 = f(t + half, &(s + k1 * half));
            let k3 = f(t + half, &(s + k2 * half));
            let k4 = f(t + dt, &(s + k3 * dt));
            s + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0)
        }
    };

    if !next.iter().all(|v| v.is_finite()) {
        return Err(Error::Diverged { t });
    }
    Ok(RobotPose::new(next[0], next[1], next[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn derivative_examples() {
        let r = plant_derivative(
            &RobotPose::new(0.0, 0.0, 0.0),
            &ControlInput::new(1.0, 0.5),
            &DisturbanceVec::ZERO,
        )
        .unwrap();
        assert_eq!((r.x_dot, r.y_dot, r.theta_dot), (1.0, 0.0, 0.5));

        let r = plant_derivative(
            &RobotPose::new(0.0, 0.0, PI / 2.0),
            &ControlInput::new(1.0, 0.0),
            &DisturbanceVec::ZERO,
        )
        .unwrap();
        assert_abs_diff_eq!(r.x_dot, 0.0, epsilon = 1e-16);
        assert_eq!(r.y_dot, 1.0);
        assert_eq!(r.theta_dot, 0.0);

        let r = plant_derivative(
            &RobotPose::new(0.0, 0.0, 0.0),
            &ControlInput::new(0.0, 0.0),
            &DisturbanceVec::new(0.0, 0.5, 0.1),
        )
        .unwrap();
        assert_eq!((r.x_dot, r.y_dot, r.theta_dot), (0.0, 0.5, 0.1));
    }

    #[test]
    fn derivative_rejects_nan() {
        let q = RobotPose {
            x: f64::NAN,
            y: 0.0,
            theta: 0.0,
        };
        assert!(matches!(
            plant_derivative(&q, &ControlInput::default(), &DisturbanceVec::ZERO),
            Err(Error::NonFinite(_))
        ));
        assert!(plant_derivative(
            &RobotPose::new(0.0, 0.0, 0.0),
            &ControlInput::new(f64::INFINITY, 0.0),
            &DisturbanceVec::ZERO
        )
        .is_err());
    }

    #[test]
    fn wrap_examples() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(0.1), 0.1);
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(-0.1), -0.1);
    }

    #[test]
    fn straight_line_step() {
        let q = integrate_step(
            &RobotPose::new(0.0, 0.0, 0.0),
            &ControlInput::new(1.0, 0.0),
            |_| DisturbanceVec::ZERO,
            0.0,
            1e-3,
            Integrator::Rk4,
        )
        .unwrap();
        assert_abs_diff_eq!(q.x, 1e-3, epsilon = 1e-15);
        assert_eq!(q.y, 0.0);
        assert_eq!(q.theta, 0.0);
    }

    #[test]
    fn blow_up_reports_time() {
        let err = integrate_step(
            &RobotPose::new(0.0, 0.0, 0.0),
            &ControlInput::new(f64::MAX, 0.0),
            |_| DisturbanceVec::new(f64::MAX, 0.0, 0.0),
            1.5,
            10.0,
            Integrator::Euler,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Diverged { t } if t == 1.5));
    }

    #[test]
    fn step_count_guard() {
        let cfg = SimConfig {
            dt: 1e-3,
            t_final: 30.0,
            initial_pose: RobotPose::new(0.0, 0.0, 0.0),
            integrator: Integrator::Rk4,
            limits: InputLimits::default(),
        };
        assert_eq!(cfg.step_count(), 30_000);
        let bad = SimConfig { dt: 0.0, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn saturation_clamps() {
        let lim = InputLimits {
            v_max: Some(1.0),
            omega_max: None,
        };
        let u = ControlInput::new(-3.0, 40.0).saturate(&lim);
        assert_eq!(u, ControlInput::new(-1.0, 40.0));
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_congruent(a in -1e3f64..1e3) {
            let w = wrap_angle(a);
            prop_assert!(w > -PI && w <= PI);
            prop_assert_eq!(wrap_angle(w), w);
            let k = ((a - w) / TAU).round();
            prop_assert!((a - w - k * TAU).abs() < 1e-9);
        }

        #[test]
        fn derivative_is_affine_in_disturbance(
            th in -PI..PI, v in -3.0f64..3.0, w in -3.0f64..3.0,
            a in prop::array::uniform3(-1.0f64..1.0),
            b in prop::array::uniform3(-1.0f64..1.0),
        ) {
            let q = RobotPose::new(0.3, -0.2, th);
            let u = ControlInput::new(v, w);
            let da = DisturbanceVec::new(a[0], a[1], a[2]);
            let db = DisturbanceVec::new(b[0], b[1], b[2]);
            let dab = DisturbanceVec::new(a[0] + b[0], a[1] + b[1], a[2] + b[2]);
            let f = |d| plant_derivative(&q, &u, &d).unwrap();
            let (fa, fb, fab, f0) = (f(da), f(db), f(dab), f(DisturbanceVec::ZERO));
            prop_assert!((fab.x_dot - (fa.x_dot + fb.x_dot - f0.x_dot)).abs() < 1e-12);
            prop_assert!((fab.y_dot - (fa.y_dot + fb.y_dot - f0.y_dot)).abs() < 1e-12);
            prop_assert!((fab.theta_dot - (fa.theta_dot + fb.theta_dot - f0.theta_dot)).abs() < 1e-12);
        }
    }
}
