use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sysmodel::Scenario;

/// Which family a scenario set belongs to. Sets with the same seed but a
/// different domain share no stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioDomain {
    Optimization,
    Validation,
}

impl ScenarioDomain {
    fn tag(self) -> u64 {
        match self {
            ScenarioDomain::Optimization => 0x6f70_7469_6d69_7a65,
            ScenarioDomain::Validation => 0x7661_6c69_6461_7465,
        }
    }
}

/// A lazily generated set of scenarios. Scenario `q` depends only on
/// `(seed, domain, q)`, so sets can be evaluated in any order or in chunks
/// without materializing them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub n: usize,
    pub horizon: usize,
    pub count: usize,
    pub seed: u64,
    pub domain: ScenarioDomain,
}

impl ScenarioSet {
    pub fn new(n: usize, horizon: usize, count: usize, seed: u64, domain: ScenarioDomain) -> Result<Self> {
        if count == 0 {
            return Err(Error::Config("scenario count must be at least 1".into()));
        }
        Ok(ScenarioSet {
            n,
            horizon,
            count,
            seed,
            domain,
        })
    }

    /// ChaCha8 keyed by `(seed, domain)`, stream `q`; entries drawn in
    /// component-major order.
    pub fn get(&self, q: usize) -> Scenario {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.domain.tag().to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(q as u64);
        let data: Vec<f64> = (0..self.n * self.horizon).map(|_| rng.random::<f64>()).collect();
        Scenario::from_vec(self.n, self.horizon, data).expect("uniform draws lie in [0, 1)")
    }

    pub fn materialize(&self) -> Vec<Scenario> {
        (0..self.count).map(|q| self.get(q)).collect()
    }
}

/// Anything that can hand out scenarios by index.
pub trait ScenarioSource: Sync {
    fn count(&self) -> usize;
    fn scenario(&self, q: usize) -> Scenario;
}

impl ScenarioSource for ScenarioSet {
    fn count(&self) -> usize {
        self.count
    }

    fn scenario(&self, q: usize) -> Scenario {
        self.get(q)
    }
}

impl ScenarioSource for [Scenario] {
    fn count(&self) -> usize {
        self.len()
    }

    fn scenario(&self, q: usize) -> Scenario {
        self[q].clone()
    }
}

impl ScenarioSource for Vec<Scenario> {
    fn count(&self) -> usize {
        self.len()
    }

    fn scenario(&self, q: usize) -> Scenario {
        self[q].clone()
    }
}

/// `count` optimization scenarios for an `n × T` system.
pub fn generate_scenarios(n: usize, horizon: usize, count: usize, seed: u64) -> Result<Vec<Scenario>> {
    Ok(ScenarioSet::new(n, horizon, count, seed, ScenarioDomain::Optimization)?.materialize())
}
