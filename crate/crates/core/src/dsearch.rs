//! Bound-constrained derivative-free minimization by a simplified
//! mesh-adaptive direct search.
//!
//! Each iteration sweeps the `2d` directions `±h_k`, where `h_k` are the
//! columns of a random Householder reflection `I − 2vvᵀ`, in shuffled order,
//! scaled by the mesh size and the box width. Along each `h_k` the first
//! improving sign is accepted and the poll centre moves there before the next
//! column is tried. A sweep with any success doubles the mesh, a sweep without
//! one halves it. Poll points are clipped to the box.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Cap on objective evaluations, including the one at `x0`.
    pub max_evals: usize,
    pub seed: u64,
    /// Initial mesh size, as a fraction of each coordinate's box width.
    pub initial_mesh: f64,
    /// Stop once the mesh falls below this.
    pub min_mesh: f64,
    /// After a successful sweep, keep repeating its net displacement while
    /// that improves.
    pub speculative: bool,
}

impl SearchBudget {
    pub fn new(max_evals: usize, seed: u64) -> Self {
        SearchBudget {
            max_evals,
            seed,
            initial_mesh: 1.0,
            min_mesh: 1e-9,
            speculative: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub final_mesh: f64,
}

/// Largest mesh the doubling rule can reach, relative to the box width.
const MAX_MESH: f64 = 1.0;

/// Minimize `f` over the box `bounds` starting from `x0`.
///
/// The returned value is never above `f(x0)` and at most
/// `budget.max_evals` evaluations are made (at least one).
pub fn minimize<F>(mut f: F, x0: &[f64], bounds: &[(f64, f64)], budget: &SearchBudget) -> Result<SearchResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    if d == 0 || bounds.len() != d {
        return Err(Error::Dimension(format!(
            "{} bounds for a {}-dimensional start",
            bounds.len(),
            d
        )));
    }
    for (k, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!("empty bounds [{lo}, {hi}] at coordinate {k}")));
        }
        if !(lo <= x0[k] && x0[k] <= hi) {
            return Err(Error::Domain(format!(
                "x0[{k}] = {} outside [{lo}, {hi}]",
                x0[k]
            )));
        }
    }
    if !(budget.min_mesh > 0.0 && budget.min_mesh <= budget.initial_mesh) {
        return Err(Error::Domain("need 0 < min_mesh <= initial_mesh".into()));
    }

    let width: Vec<f64> = bounds.iter().map(|&(lo, hi)| hi - lo).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1usize;
    let mut mesh = budget.initial_mesh;

    let mut basis = vec![0.0; d * d];
    let mut v = vec![0.0; d];
    let mut cols: Vec<usize> = (0..d).collect();
    let mut dir = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut start = vec![0.0; d];

    let trial = |x: &[f64], dir: &[f64], step: f64, y: &mut [f64]| -> bool {
        let mut moved = false;
        for k in 0..d {
            let (lo, hi) = bounds[k];
            let t = (x[k] + step * width[k] * dir[k]).clamp(lo, hi);
            moved |= t != x[k];
            y[k] = t;
        }
        moved
    };

    'outer: while evals < budget.max_evals && mesh >= budget.min_mesh {
        householder(&mut rng, &mut v, &mut basis);
        cols.shuffle(&mut rng);
        start.copy_from_slice(&x);
        let mut improved = false;

        for &k in &cols {
            let first = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for sign in [first, -first] {
                if evals >= budget.max_evals {
                    break 'outer;
                }
                for (j, dj) in dir.iter_mut().enumerate() {
                    *dj = sign * basis[j * d + k];
                }
                if !trial(&x, &dir, mesh, &mut y) {
                    continue;
                }
                let fy = f(&y);
                evals += 1;
                if fy < fx {
                    x.copy_from_slice(&y);
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }

        if improved {
            if budget.speculative {
                // Keep repeating the net move of this sweep while it helps.
                for (j, dj) in dir.iter_mut().enumerate() {
                    *dj = x[j] - start[j];
                }
                while evals < budget.max_evals {
                    let mut moved = false;
                    for k in 0..d {
                        let t = (x[k] + dir[k]).clamp(bounds[k].0, bounds[k].1);
                        moved |= t != x[k];
                        y[k] = t;
                    }
                    if !moved {
                        break;
                    }
                    let fy = f(&y);
                    evals += 1;
                    if fy >= fx {
                        break;
                    }
                    x.copy_from_slice(&y);
                    fx = fy;
                }
            }
            mesh = (2.0 * mesh).min(MAX_MESH.max(budget.initial_mesh));
        } else {
            mesh *= 0.5;
        }
    }

    Ok(SearchResult {
        x,
        value: fx,
        evals,
        final_mesh: mesh,
    })
}

/// Fill `basis` (row-major `d × d`) with `I − 2vvᵀ` for a uniformly random
/// unit vector `v`. Its columns form an orthonormal basis.
fn householder(rng: &mut ChaCha8Rng, v: &mut [f64], basis: &mut [f64]) {
    let d = v.len();
    loop {
        for vi in v.iter_mut() {
            *vi = StandardNormal.sample(rng);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            v.iter_mut().for_each(|a| *a /= norm);
            break;
        }
    }
    for r in 0..d {
        for c in 0..d {
            basis[r * d + c] = if r == c { 1.0 } else { 0.0 } - 2.0 * v[r] * v[c];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|a| a * a).sum()
    }

    #[test]
    fn householder_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = 7;
        let mut v = vec![0.0; d];
        let mut b = vec![0.0; d * d];
        householder(&mut rng, &mut v, &mut b);
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| b[k * d + i] * b[k * d + j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_evaluation_returns_start() {
        let x0 = vec![0.3, -0.2];
        let r = minimize(sphere, &x0, &[(-1.0, 1.0); 2], &SearchBudget::new(1, 0)).unwrap();
        assert_eq!(r.x, x0);
        assert_eq!(r.value, sphere(&x0));
        assert_eq!(r.evals, 1);
        let r = minimize(sphere, &x0, &[(-1.0, 1.0); 2], &SearchBudget::new(0, 0)).unwrap();
        assert_eq!(r.evals, 1);
    }

    #[test]
    fn errors() {
        let b = SearchBudget::new(10, 0);
        assert!(minimize(sphere, &[2.0], &[(-1.0, 1.0)], &b).is_err());
        assert!(minimize(sphere, &[0.0], &[(1.0, -1.0)], &b).is_err());
        assert!(minimize(sphere, &[0.0, 0.0], &[(-1.0, 1.0)], &b).is_err());
        assert!(minimize(sphere, &[], &[], &b).is_err());
    }

    #[test]
    fn sphere_40d() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x0: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let b = SearchBudget::new(10_000, 5);
        let r = minimize(sphere, &x0, &[(-1.0, 1.0); 40], &b).unwrap();
        assert!(r.value <= 1e-3, "value {}", r.value);
        assert!(r.evals <= 10_000);
        let again = minimize(sphere, &x0, &[(-1.0, 1.0); 40], &b).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn sphere_40d_other_seeds() {
        for seed in 0..6u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let x0: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..=1.0)).collect();
            for speculative in [false, true] {
                let b = SearchBudget {
                    speculative,
                    ..SearchBudget::new(10_000, seed)
                };
                let r = minimize(sphere, &x0, &[(-1.0, 1.0); 40], &b).unwrap();
                assert!(r.value <= 1e-3, "seed {seed}: {}", r.value);
            }
        }
    }

    #[test]
    fn shifted_quadratic_in_a_skewed_box() {
        let c = [0.3, 7.0, -40.0];
        let f = |x: &[f64]| (x[0] - c[0]).powi(2) + 1e-2 * (x[1] - c[1]).powi(2) + 1e-4 * (x[2] - c[2]).powi(2);
        let bounds = [(0.0, 1.0), (0.0, 10.0), (-100.0, 0.0)];
        let r = minimize(f, &[1.0, 0.0, 0.0], &bounds, &SearchBudget::new(3000, 1)).unwrap();
        assert!(r.value < 1e-8, "{}", r.value);
    }

    #[test]
    fn stays_in_bounds_and_is_monotone() {
        let bounds = [(0.0, 1.0), (-2.0, 0.5), (3.0, 3.0)];
        let mut best = f64::INFINITY;
        let mut seen = Vec::new();
        let f = |x: &[f64]| {
            let v = (x[0] - 2.0).powi(2) + (x[1] + 5.0).powi(2) + x[2];
            seen.push(x.to_vec());
            v
        };
        let r = minimize(f, &[0.5, 0.0, 3.0], &bounds, &SearchBudget::new(500, 9)).unwrap();
        for p in &seen {
            for (k, &(lo, hi)) in bounds.iter().enumerate() {
                assert!(lo <= p[k] && p[k] <= hi);
            }
        }
        assert_eq!(r.x[0], 1.0);
        assert_eq!(r.x[1], -2.0);
        best = best.min(r.value);
        assert!(best <= (0.5f64 - 2.0).powi(2) + 25.0 + 3.0);
    }
}
