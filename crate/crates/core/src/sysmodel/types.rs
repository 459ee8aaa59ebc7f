use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::SystemConfig;

/// State of one component: regime `E`, age `A` (downtime when broken) and the
/// elapsed times since its last `D` failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentState {
    pub regime: f64,
    pub age: f64,
    pub last_failures: Vec<f64>,
}

impl ComponentState {
    /// As-good-as-new: healthy, age 0, no failure recorded.
    pub fn new(cfg: &SystemConfig) -> Self {
        ComponentState {
            regime: 1.0,
            age: 0.0,
            last_failures: vec![cfg.delta_default; cfg.supply_delay],
        }
    }

    pub fn from_packed(x: &[f64]) -> Self {
        ComponentState {
            regime: x[0],
            age: x[1],
            last_failures: x[2..].to_vec(),
        }
    }

    pub fn write_packed(&self, out: &mut [f64]) {
        out[0] = self.regime;
        out[1] = self.age;
        out[2..].copy_from_slice(&self.last_failures);
    }

    pub fn packed(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.last_failures.len() + 2];
        self.write_packed(&mut v);
        v
    }

    pub fn is_broken(&self) -> bool {
        self.regime == 0.0
    }
}

/// All component states plus the stock at one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub components: Vec<ComponentState>,
    pub stock: f64,
}

impl SystemState {
    pub fn initial(cfg: &SystemConfig) -> Self {
        SystemState {
            components: vec![ComponentState::new(cfg); cfg.n],
            stock: cfg.s_init as f64,
        }
    }
}

/// An `n × T` matrix stored component-major: row `i` is the control sequence
/// of component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    horizon: usize,
    data: Vec<f64>,
}

impl Matrix {
    fn filled(n: usize, horizon: usize, v: f64) -> Self {
        Matrix {
            n,
            horizon,
            data: vec![v; n * horizon],
        }
    }

    fn from_vec(n: usize, horizon: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * horizon {
            return Err(Error::Dimension(format!(
                "{} entries for a {n}x{horizon} matrix",
                data.len()
            )));
        }
        Ok(Matrix { n, horizon, data })
    }
}

macro_rules! matrix_type {
    ($name:ident, $what:literal) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Matrix);

        impl $name {
            pub fn filled(n: usize, horizon: usize, v: f64) -> Self {
                $name(Matrix::filled(n, horizon, v))
            }

            pub fn zeros(n: usize, horizon: usize) -> Self {
                Self::filled(n, horizon, 0.0)
            }

            /// Build from component-major data, checking entries lie in [0, 1].
            pub fn from_vec(n: usize, horizon: usize, data: Vec<f64>) -> Result<Self> {
                if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::Domain(format!(concat!($what, " entry {} outside [0, 1]"), v)));
                }
                Ok($name(Matrix::from_vec(n, horizon, data)?))
            }

            pub fn n(&self) -> usize {
                self.0.n
            }

            pub fn horizon(&self) -> usize {
                self.0.horizon
            }

            #[inline]
            pub fn get(&self, i: usize, t: usize) -> f64 {
                self.0.data[i * self.0.horizon + t]
            }

            #[inline]
            pub fn set(&mut self, i: usize, t: usize, v: f64) {
                self.0.data[i * self.0.horizon + t] = v;
            }

            /// Row `i`, indexed by `t`.
            #[inline]
            pub fn row(&self, i: usize) -> &[f64] {
                let h = self.0.horizon;
                &self.0.data[i * h..(i + 1) * h]
            }

            #[inline]
            pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
                let h = self.0.horizon;
                &mut self.0.data[i * h..(i + 1) * h]
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0.data
            }

            pub fn as_mut_slice(&mut self) -> &mut [f64] {
                &mut self.0.data
            }

            pub fn check_dims(&self, cfg: &SystemConfig) -> Result<()> {
                if self.n() != cfg.n || self.horizon() != cfg.horizon {
                    return Err(Error::Dimension(format!(
                        concat!($what, " is {}x{}, config expects {}x{}"),
                        self.n(),
                        self.horizon(),
                        cfg.n,
                        cfg.horizon
                    )));
                }
                Ok(())
            }
        }
    };
}

matrix_type!(Strategy, "strategy");
matrix_type!(Scenario, "scenario");

impl Strategy {
    /// Controls `≥ ν` become 1, the rest 0.
    pub fn project(&self, nu: f64) -> Strategy {
        let mut s = self.clone();
        for v in s.as_mut_slice() {
            *v = if *v >= nu { 1.0 } else { 0.0 };
        }
        s
    }

    /// Number of controls at or above `ν`.
    pub fn scheduled_pms(&self, nu: f64) -> usize {
        self.as_slice().iter().filter(|&&v| v >= nu).count()
    }
}

/// A simulated path: packed states for `t = 0..=T` plus event logs.
///
/// Event flags are indexed `[t * n + i]` with `t = 0..=T`:
/// `pm` and `cm` mark maintenance carried out during step `t -> t+1`,
/// `failure` marks a component that is in `(E, A) = (0, 0)` at `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub horizon: usize,
    pub dim: usize,
    /// Packed states, `[(t * n + i) * dim + k]`.
    pub x: Vec<f64>,
    pub stock: Vec<f64>,
    pub pm: Vec<bool>,
    pub cm: Vec<bool>,
    pub failure: Vec<bool>,
    /// At least one component broken and waiting for a part at `t`.
    pub forced_outage: Vec<bool>,
}

impl Trajectory {
    pub fn new(cfg: &SystemConfig) -> Self {
        let (n, h, dim) = (cfg.n, cfg.horizon, cfg.state_dim());
        let mut tr = Trajectory {
            n,
            horizon: h,
            dim,
            x: vec![0.0; (h + 1) * n * dim],
            stock: vec![0.0; h + 1],
            pm: vec![false; (h + 1) * n],
            cm: vec![false; (h + 1) * n],
            failure: vec![false; (h + 1) * n],
            forced_outage: vec![false; h + 1],
        };
        tr.reset(cfg);
        tr
    }

    pub(crate) fn reset(&mut self, cfg: &SystemConfig) {
        let init = ComponentState::new(cfg).packed();
        for c in self.x[..self.n * self.dim].chunks_mut(self.dim) {
            c.copy_from_slice(&init);
        }
        self.stock[0] = cfg.s_init as f64;
        self.pm.fill(false);
        self.cm.fill(false);
        self.failure.fill(false);
        self.forced_outage.fill(false);
    }

    #[inline]
    pub fn comp(&self, t: usize, i: usize) -> &[f64] {
        let o = (t * self.n + i) * self.dim;
        &self.x[o..o + self.dim]
    }

    #[inline]
    pub fn regime(&self, t: usize, i: usize) -> f64 {
        self.x[(t * self.n + i) * self.dim]
    }

    #[inline]
    pub fn age(&self, t: usize, i: usize) -> f64 {
        self.x[(t * self.n + i) * self.dim + 1]
    }

    /// All packed component states at `t`.
    #[inline]
    pub fn layer(&self, t: usize) -> &[f64] {
        let w = self.n * self.dim;
        &self.x[t * w..(t + 1) * w]
    }

    pub fn state(&self, t: usize) -> SystemState {
        SystemState {
            components: (0..self.n)
                .map(|i| ComponentState::from_packed(self.comp(t, i)))
                .collect(),
            stock: self.stock[t],
        }
    }

    pub fn broken_count(&self, t: usize) -> usize {
        (0..self.n).filter(|&i| self.regime(t, i) == 0.0).count()
    }

    /// Failures whose replacement part has been ordered but has not yet
    /// reached the stock at `t`.
    pub fn in_flight(&self, t: usize, delay: usize) -> usize {
        let lo = (t + 1).saturating_sub(delay);
        (lo..=t)
            .map(|s| (0..self.n).filter(|&i| self.failure[s * self.n + i]).count())
            .sum()
    }
}
