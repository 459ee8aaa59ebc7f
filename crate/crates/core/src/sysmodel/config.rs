use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-component costs and Weibull failure law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentParams {
    /// PM cost (k€).
    pub c_p: f64,
    /// CM cost (k€).
    pub c_c: f64,
    pub weibull_shape: f64,
    /// Weibull scale, in years.
    pub weibull_scale: f64,
}

/// Fleet, stock and cost parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n: usize,
    /// Number of time steps T.
    pub horizon: usize,
    /// Step length in years.
    pub dt: f64,
    /// Supply delay D, in steps.
    pub supply_delay: usize,
    pub s_init: u32,
    /// Sentinel for "no failure recorded" in the P vector.
    pub delta_default: f64,
    pub tau: f64,
    pub nu: f64,
    /// Forced-outage cost per step (k€/yr).
    pub c_f: f64,
    /// Number of optimization scenarios.
    pub q: usize,
    pub components: Vec<ComponentParams>,
}

impl SystemConfig {
    pub const CASE1_COMPONENT: ComponentParams = ComponentParams {
        c_p: 50.0,
        c_c: 200.0,
        weibull_shape: 3.0,
        weibull_scale: 10.0,
    };

    /// Homogeneous fleet with the shared defaults (T=40, D=2, τ=0.08, ν=0.9,
    /// C_F=10000, δ=−1).
    pub fn homogeneous(n: usize, s_init: u32, q: usize, comp: ComponentParams) -> Self {
        SystemConfig {
            n,
            horizon: 40,
            dt: 1.0,
            supply_delay: 2,
            s_init,
            delta_default: -1.0,
            tau: 0.08,
            nu: 0.9,
            c_f: 10000.0,
            q,
            components: vec![comp; n],
        }
    }

    /// 80 components, 16 spares, Weibull(3, 10), Q=100.
    pub fn case1() -> Self {
        Self::homogeneous(80, 16, 100, Self::CASE1_COMPONENT)
    }

    /// 80 components, 5 spares, Weibull(3, 20), Q=300.
    pub fn case2() -> Self {
        Self::homogeneous(
            80,
            5,
            300,
            ComponentParams {
                weibull_scale: 20.0,
                ..Self::CASE1_COMPONENT
            },
        )
    }

    /// The downscaled tuning system: case 1 with 10 components and 2 spares.
    pub fn small() -> Self {
        Self::homogeneous(10, 2, 100, Self::CASE1_COMPONENT)
    }

    /// Length of a packed component state `[E, A, P^1..P^D]`.
    #[inline]
    pub fn state_dim(&self) -> usize {
        self.supply_delay + 2
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.horizon == 0 {
            return bad("T must be at least 1");
        }
        if self.supply_delay == 0 {
            return bad("D must be at least 1");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad("nu must lie in (0, 1)");
        }
        if !(self.delta_default < 0.0) {
            return bad("delta must be negative");
        }
        if !(self.tau > -1.0 && self.tau.is_finite()) {
            return bad("tau must exceed -1");
        }
        if !(self.c_f >= 0.0) {
            return bad("C_F must be nonnegative");
        }
        if self.components.len() != self.n {
            return Err(Error::Config(format!(
                "{} component records for n = {}",
                self.components.len(),
                self.n
            )));
        }
        for (i, c) in self.components.iter().enumerate() {
            if !(c.c_p >= 0.0 && c.c_c >= 0.0) {
                return Err(Error::Config(format!("component {}: negative cost", i + 1)));
            }
            if !(c.weibull_shape > 0.0 && c.weibull_scale > 0.0) {
                return Err(Error::Config(format!(
                    "component {}: Weibull parameters must be positive",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Copy with a different component count, broadcasting component 1.
    pub fn with_n(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.n = n;
        c.components = vec![self.components[0]; n];
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for c in [SystemConfig::case1(), SystemConfig::case2(), SystemConfig::small()] {
            c.validate().unwrap();
            assert_eq!(c.state_dim(), 4);
        }
        assert_eq!(SystemConfig::small().s_init, 2);
        assert_eq!(SystemConfig::case2().components[0].weibull_scale, 20.0);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = SystemConfig::small();
        c.nu = 1.0;
        assert!(c.validate().is_err());
        let mut c = SystemConfig::small();
        c.delta_default = 0.0;
        assert!(c.validate().is_err());
        let mut c = SystemConfig::small();
        c.components.pop();
        assert!(c.validate().is_err());
        let mut c = SystemConfig::small();
        c.components[3].weibull_shape = 0.0;
        assert!(c.validate().is_err());
    }
}
