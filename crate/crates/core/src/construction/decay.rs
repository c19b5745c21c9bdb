use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::gf2::{sample_subspace, Gf2Subspace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecayError {
    #[error("need 0 < ℓ < m ≤ 24, got ℓ = {ell}, m = {m}")]
    Domain { m: usize, ell: usize },
    #[error("need degree d ≥ 2, got {0}")]
    Degree(u64),
    #[error("need r ≥ 1 and at least one trial")]
    Empty,
    #[error("tree has {paths} paths, over the budget of 2^26")]
    Budget { paths: u128 },
    #[error("d^m = {d}^{m} is too large to accumulate exactly")]
    Magnitude { d: u64, m: usize },
}

const PATH_BUDGET: u128 = 1 << 26;

/// Per-step statistics of `X_i = Σ_P (d^{m − dim span(P)} − 1)` over the
/// length-`i` paths `P` leaving a root edge of a `d`-regular tree, with a
/// fresh random ℓ-dimensional subspace on every tree edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecayTrace {
    pub m: usize,
    pub ell: usize,
    pub d: u64,
    pub r: usize,
    pub trials: u64,
    pub seed: u64,
    /// Indexed by step − 1.
    pub sums: Vec<u128>,
    pub sums_sq: Vec<u128>,
    /// Trials with `X_i = 0`.
    pub zeros: Vec<u64>,
}

impl DecayTrace {
    pub fn exact_mean(&self, step: usize) -> BigRational {
        BigRational::new(BigInt::from(self.sums[step - 1]), BigInt::from(self.trials))
    }

    pub fn mean(&self, step: usize) -> f64 {
        self.sums[step - 1] as f64 / self.trials as f64
    }

    /// Standard error of the mean; zero for a single trial.
    pub fn std_err(&self, step: usize) -> f64 {
        let n = self.trials as f64;
        if self.trials < 2 {
            return 0.0;
        }
        let mean = self.mean(step);
        let var = (self.sums_sq[step - 1] as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }

    /// Steps `i` whose mean exceeds the mean at `i − 1`.
    pub fn inversions(&self) -> Vec<usize> {
        (2..=self.r)
            .filter(|&i| self.sums[i - 1] > self.sums[i - 2])
            .collect()
    }

    /// Means never increase, except for at most one step whose rise is within
    /// `k` combined standard errors.
    pub fn nonincreasing_within(&self, k: f64) -> bool {
        let inv = self.inversions();
        match inv.as_slice() {
            [] => true,
            [i] => {
                let rise = self.mean(*i) - self.mean(i - 1);
                rise <= k * (self.std_err(*i) + self.std_err(i - 1))
            }
            _ => false,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let steps: Vec<_> = (1..=self.r)
            .map(|i| {
                json!({
                    "step": i,
                    "mean": self.mean(i),
                    "exact_mean": self.exact_mean(i).to_string(),
                    "std_err": self.std_err(i),
                    "zero_fraction": self.zeros[i - 1] as f64 / self.trials as f64,
                })
            })
            .collect();
        json!({
            "m": self.m,
            "ell": self.ell,
            "d": self.d,
            "r": self.r,
            "trials": self.trials,
            "seed": self.seed,
            "steps": steps,
        })
    }
}

struct Walk<'a> {
    m: usize,
    ell: usize,
    branches: u64,
    r: usize,
    weights: &'a [u128],
    rng: ChaCha8Rng,
    x: Vec<u128>,
}

impl Walk<'_> {
    fn visit(&mut self, depth: usize, span: &Gf2Subspace) {
        self.x[depth - 1] += self.weights[span.dim()];
        if depth == self.r || span.is_full() {
            return;
        }
        for _ in 0..self.branches {
            let z = sample_subspace(self.m, self.ell, &mut self.rng).expect("domain checked");
            let next = span.join(&z).expect("same ambient dimension");
            self.visit(depth + 1, &next);
        }
    }
}

/// Monte Carlo estimate of the decay of `E[X_i]` along `i = 1..=r`. Trial `t`
/// draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `t`, so results do
/// not depend on thread count.
pub fn decay_simulation(
    m: usize,
    ell: usize,
    d: u64,
    r: usize,
    trials: u64,
    seed: u64,
) -> Result<DecayTrace, DecayError> {
    if ell == 0 || ell >= m || m > 24 {
        return Err(DecayError::Domain { m, ell });
    }
    if d < 2 {
        return Err(DecayError::Degree(d));
    }
    if r == 0 || trials == 0 {
        return Err(DecayError::Empty);
    }
    let paths = (d as u128 - 1)
        .checked_pow(r as u32 - 1)
        .and_then(|p| p.checked_mul(2));
    let paths = match paths {
        Some(p) if p <= PATH_BUDGET => p,
        _ => {
            return Err(DecayError::Budget {
                paths: paths.unwrap_or(u128::MAX),
            })
        }
    };
    // X ≤ paths·d^m must square and sum over all trials without overflow.
    let top = (d as u128)
        .checked_pow(m as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or(DecayError::Magnitude { d, m })?;
    if (paths * top).pow(2).checked_mul(trials as u128).is_none() {
        return Err(DecayError::Magnitude { d, m });
    }
    let weights: Vec<u128> = (0..=m)
        .map(|dim| top / (d as u128).pow(dim as u32) - 1)
        .collect();

    let (sums, sums_sq, zeros) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let root = sample_subspace(m, ell, &mut rng).expect("domain checked");
            let mut walk = Walk {
                m,
                ell,
                branches: d - 1,
                r,
                weights: &weights,
                rng,
                x: vec![0; r],
            };
            walk.visit(1, &root);
            walk.visit(1, &root);
            walk.x
        })
        .fold(
            || (vec![0u128; r], vec![0u128; r], vec![0u64; r]),
            |(mut s, mut q, mut z), x| {
                for i in 0..r {
                    s[i] += x[i];
                    q[i] += x[i] * x[i];
                    z[i] += (x[i] == 0) as u64;
                }
                (s, q, z)
            },
        )
        .reduce(
            || (vec![0u128; r], vec![0u128; r], vec![0u64; r]),
            |(mut s, mut q, mut z), (s2, q2, z2)| {
                for i in 0..r {
                    s[i] += s2[i];
                    q[i] += q2[i];
                    z[i] += z2[i];
                }
                (s, q, z)
            },
        );
    Ok(DecayTrace {
        m,
        ell,
        d,
        r,
        trials,
        seed,
        sums,
        sums_sq,
        zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_deterministic() {
        let t = decay_simulation(3, 1, 3, 6, 200, 1).unwrap();
        assert_eq!(t.exact_mean(1), BigRational::from_integer(16.into()));
        assert_eq!(t.std_err(1), 0.0);
    }

    #[test]
    fn reproducible() {
        assert_eq!(
            decay_simulation(3, 1, 3, 4, 50, 9).unwrap(),
            decay_simulation(3, 1, 3, 4, 50, 9).unwrap()
        );
    }

    #[test]
    fn budget_and_domain() {
        assert!(matches!(
            decay_simulation(3, 1, 3, 40, 1, 0),
            Err(DecayError::Budget { .. })
        ));
        assert!(matches!(
            decay_simulation(3, 3, 3, 4, 1, 0),
            Err(DecayError::Domain { .. })
        ));
    }
}
