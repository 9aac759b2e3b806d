//! Reference trajectories and disturbance profiles.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::DisturbanceVec;

/// Desired position and its first two derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReferenceSample {
    pub xd: f64,
    pub yd: f64,
    pub xd_dot: f64,
    pub yd_dot: f64,
    pub xd_ddot: f64,
    pub yd_ddot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    /// `center + radius·(cos ωt, sin ωt)`.
    Circle {
        radius: f64,
        rate: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    /// `start + velocity·t`.
    Line { start: [f64; 2], velocity: [f64; 2] },
    /// Figure-eight `(a sin ωt, (a/2) sin 2ωt)`.
    Lemniscate { scale: f64, rate: f64 },
}

impl Default for Reference {
    fn default() -> Self {
        Reference::Circle {
            radius: 1.0,
            rate: 1.0,
            center: [0.0, 0.0],
        }
    }
}

impl Reference {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Reference::Circle {
                radius,
                rate,
                center,
            } => {
                radius.is_finite()
                    && *radius > 0.0
                    && rate.is_finite()
                    && center.iter().all(|c| c.is_finite())
            }
            Reference::Line { start, velocity } => {
                start.iter().chain(velocity).all(|c| c.is_finite())
            }
            Reference::Lemniscate { scale, rate } => {
                scale.is_finite() && *scale > 0.0 && rate.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(
                "scenario.reference has invalid parameters".into(),
            ))
        }
    }

    pub fn sample(&self, t: f64) -> ReferenceSample {
        match *self {
            Reference::Circle {
                radius: r,
                rate: w,
                center: [cx, cy],
            } => {
                let (s, c) = (w * t).sin_cos();
                ReferenceSample {
                    xd: cx + r * c,
                    yd: cy + r * s,
                    xd_dot: -r * w * s,
                    yd_dot: r * w * c,
                    xd_ddot: -r * w * w * c,
                    yd_ddot: -r * w * w * s,
                }
            }
            Reference::Line { start, velocity } => ReferenceSample {
                xd: start[0] + velocity[0] * t,
                yd: start[1] + velocity[1] * t,
                xd_dot: velocity[0],
                yd_dot: velocity[1],
                xd_ddot: 0.0,
                yd_ddot: 0.0,
            },
            Reference::Lemniscate { scale: a, rate: w } => {
                let (s1, c1) = (w * t).sin_cos();
                let (s2, c2) = (2.0 * w * t).sin_cos();
                ReferenceSample {
                    xd: a * s1,
                    yd: 0.5 * a * s2,
                    xd_dot: a * w * c1,
                    yd_dot: a * w * c2,
                    xd_ddot: -a * w * w * s1,
                    yd_ddot: -2.0 * a * w * w * s2,
                }
            }
        }
    }
}

/// Reference sample at time `t`.
pub fn reference(t: f64, spec: &Reference) -> ReferenceSample {
    spec.sample(t)
}

/// Disturbance selection as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    /// `(0.5 sin t, 0.5 cos t + 0.1 cos(t + π/2), 0.1)`.
    #[default]
    Sinusoidal,
    None,
    Constant {
        value: [f64; 3],
    },
    /// CSV with columns `t,d1,d2,d3`, linearly interpolated and held
    /// constant outside its time range. Relative paths resolve against the
    /// config file's directory.
    Table {
        path: PathBuf,
    },
}

impl DisturbanceSpec {
    pub fn load(&self, base_dir: &Path) -> Result<DisturbanceProfile> {
        Ok(match self {
            DisturbanceSpec::Sinusoidal => DisturbanceProfile::Sinusoidal,
            DisturbanceSpec::None => DisturbanceProfile::None,
            DisturbanceSpec::Constant { value } => {
                if !value.iter().all(|v| v.is_finite()) {
                    return Err(Error::Config(
                        "scenario.disturbance.value must be finite".into(),
                    ));
                }
                DisturbanceProfile::Constant(DisturbanceVec::new(value[0], value[1], value[2]))
            }
            DisturbanceSpec::Table { path } => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    base_dir.join(path)
                };
                DisturbanceProfile::Table(DisturbanceTable::from_csv_path(&full)?)
            }
        })
    }
}

/// Piecewise-linear disturbance samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceTable {
    times: Vec<f64>,
    values: Vec<DisturbanceVec>,
}

impl DisturbanceTable {
    pub fn new(times: Vec<f64>, values: Vec<DisturbanceVec>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Config(
                "disturbance table needs matching, non-empty columns".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "disturbance table times must be strictly increasing".into(),
            ));
        }
        let finite = times.iter().all(|t| t.is_finite())
            && values
                .iter()
                .all(|d| d.d1.is_finite() && d.d2.is_finite() && d.d3.is_finite());
        if !finite {
            return Err(Error::Config(
                "disturbance table contains non-finite values".into(),
            ));
        }
        Ok(Self { times, values })
    }

    pub fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            t: f64,
            d1: f64,
            d2: f64,
            d3: f64,
        }
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row?;
            times.push(row.t);
            values.push(DisturbanceVec::new(row.d1, row.d2, row.d3));
        }
        Self::new(times, values)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::from_reader(std::fs::File::open(path)?)
    }

    pub fn sample(&self, t: f64) -> DisturbanceVec {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let hi = self.times.partition_point(|&ti| ti <= t);
        let (t0, t1) = (self.times[hi - 1], self.times[hi]);
        let (a, b) = (self.values[hi - 1], self.values[hi]);
        let w = (t - t0) / (t1 - t0);
        let lerp = |x: f64, y: f64| x + w * (y - x);
        DisturbanceVec::new(lerp(a.d1, b.d1), lerp(a.d2, b.d2), lerp(a.d3, b.d3))
    }
}

/// Disturbance profile ready for sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceProfile {
    Sinusoidal,
    None,
    Constant(DisturbanceVec),
    Table(DisturbanceTable),
}

impl DisturbanceProfile {
    pub fn sample(&self, t: f64) -> DisturbanceVec {
        match self {
            DisturbanceProfile::Sinusoidal => DisturbanceVec::new(
                0.5 * t.sin(),
                0.5 * t.cos() + 0.1 * (t + std::f64::consts::FRAC_PI_2).cos(),
                0.1,
            ),
            DisturbanceProfile::None => DisturbanceVec::ZERO,
            DisturbanceProfile::Constant(d) => *d,
            DisturbanceProfile::Table(table) => table.sample(t),
        }
    }
}

/// Disturbance at time `t`.
pub fn disturbance(t: f64, profile: &DisturbanceProfile) -> DisturbanceVec {
    profile.sample(t)
}

/// Reference plus disturbance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default)]
    pub reference: Reference,
    #[serde(default)]
    pub disturbance: DisturbanceSpec,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn circle_examples() {
        let c = Reference::default();
        let r = c.sample(0.0);
        assert_eq!((r.xd, r.yd, r.xd_dot, r.yd_dot), (1.0, 0.0, -0.0, 1.0));
        let r = c.sample(PI);
        assert_abs_diff_eq!(r.xd, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.yd, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-4;
        let refs = [
            Reference::default(),
            Reference::Circle {
                radius: 2.0,
                rate: 0.5,
                center: [1.0, -1.0],
            },
            Reference::Line {
                start: [0.0, 1.0],
                velocity: [0.3, -0.2],
            },
            Reference::Lemniscate {
                scale: 1.5,
                rate: 0.7,
            },
        ];
        for spec in &refs {
            for i in 0..200 {
                let t = 0.05 * i as f64 + h;
                let (a, m, b) = (spec.sample(t - h), spec.sample(t), spec.sample(t + h));
                assert!(((b.xd - a.xd) / (2.0 * h) - m.xd_dot).abs() < 1e-6);
                assert!(((b.yd - a.yd) / (2.0 * h) - m.yd_dot).abs() < 1e-6);
                assert!(((b.xd_dot - a.xd_dot) / (2.0 * h) - m.xd_ddot).abs() < 1e-6);
                assert!(((b.yd_dot - a.yd_dot) / (2.0 * h) - m.yd_ddot).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sinusoidal_disturbance_values() {
        let p = DisturbanceProfile::Sinusoidal;
        let d0 = p.sample(0.0);
        assert_abs_diff_eq!(d0.d1, 0.0);
        assert_abs_diff_eq!(d0.d2, 0.5, epsilon = 1e-16);
        assert_eq!(d0.d3, 0.1);
        let d = p.sample(PI / 2.0);
        assert_abs_diff_eq!(d.d1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.d2, -0.1, epsilon = 1e-15);
        for i in 0..1000 {
            let d = p.sample(0.037 * i as f64);
            assert_eq!(d.d3, 0.1);
            assert!(d.max_abs() <= 0.6);
        }
    }

    #[test]
    fn table_interpolates_and_holds() {
        let csv = "t,d1,d2,d3\n0,0,0,0\n1,1,-2,0.5\n# trailing comment\n";
        let table = DisturbanceTable::from_reader(csv.as_bytes()).unwrap();
        let p = DisturbanceProfile::Table(table);
        assert_eq!(p.sample(0.5), DisturbanceVec::new(0.5, -1.0, 0.25));
        assert_eq!(p.sample(-1.0), DisturbanceVec::ZERO);
        assert_eq!(p.sample(7.0), DisturbanceVec::new(1.0, -2.0, 0.5));
        assert!(
            DisturbanceTable::from_reader("t,d1,d2,d3\n1,0,0,0\n0,0,0,0\n".as_bytes()).is_err()
        );
    }
}
