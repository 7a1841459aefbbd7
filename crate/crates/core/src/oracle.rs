//! Steady-state analysis of the threshold algorithm under a two-level
//! workload: one designated site accessing with probability `x_s`, every
//! other site with `x_d = (1 - x_s) / (n - 1)`.
//!
//! Sampled at access instants, the fragment's `(location, counter)` pair is a
//! Markov chain. Because the non-designated sites are exchangeable, their
//! identities can be lumped into a single "other" location, leaving
//! `2 (t + 1)` states. [`brute_force_stationary`] solves the unlumped chain
//! over `(owner site, counter)` instead and exists to validate that reduction.

use thiserror::Error;

use crate::linalg::{stationary_direct, stationary_power};
use crate::num::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid probability {name} = {value}")]
    InvalidProbability { name: &'static str, value: String },
    #[error("chain needs at least two sites, got {0}")]
    TooFewSites(usize),
    #[error("row {row} of the transition matrix is not stochastic")]
    NonStochasticRow { row: usize },
    #[error("brute-force solver limited to n <= 6 and t <= 4 (got n = {n}, t = {t})")]
    ParamsTooLarge { n: usize, t: usize },
    #[error("stationary system is singular")]
    Singular,
    #[error("m must be at least 1")]
    ZeroRun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams<T> {
    pub n: usize,
    pub x_s: T,
    pub t: usize,
}

impl<T: Scalar> ChainParams<T> {
    pub fn new(n: usize, x_s: T, t: usize) -> Result<Self, OracleError> {
        if n < 2 {
            return Err(OracleError::TooFewSites(n));
        }
        if x_s < T::zero() || x_s > T::one() {
            return Err(OracleError::InvalidProbability {
                name: "x_s",
                value: x_s.to_string(),
            });
        }
        Ok(ChainParams { n, x_s, t })
    }

    pub fn x_d(&self) -> T {
        (T::one() - self.x_s.clone()) / T::from_count(self.n - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    PowerIteration { iterations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryResult<T> {
    /// Steady-state probability that the fragment sits at the designated site.
    pub o_s: T,
    /// Lumped: index `loc * (t + 1) + c` with `loc` 0 designated, 1 other.
    /// Brute force: index `site * (t + 1) + c`, site 0 designated.
    pub pi: Vec<T>,
    pub method: SolveMethod,
}

impl<T: Scalar> StationaryResult<T> {
    pub fn o_d(&self) -> T {
        T::one() - self.o_s.clone()
    }
}

fn add<T: Scalar>(row: &mut [T], j: usize, p: T) {
    row[j] = row[j].clone() + p;
}

/// Lumped transition matrix over `(designated | other) x counter`.
pub fn lumped_transition_matrix<T: Scalar>(p: &ChainParams<T>) -> Vec<Vec<T>> {
    let levels = p.t + 1;
    let designated = |c: usize| c;
    let other = |c: usize| levels + c;
    let x_s = p.x_s.clone();
    let x_d = p.x_d();
    let remote_from_designated = T::from_count(p.n - 1) * x_d.clone();
    let third_party = T::from_count(p.n - 2) * x_d.clone();

    let mut m = vec![vec![T::zero(); 2 * levels]; 2 * levels];
    for c in 0..levels {
        let bumped = c < p.t;

        let row = &mut m[designated(c)];
        add(row, designated(0), x_s.clone());
        let to = if bumped { designated(c + 1) } else { other(0) };
        add(row, to, remote_from_designated.clone());

        let row = &mut m[other(c)];
        add(row, other(0), x_d.clone());
        let to = if bumped { other(c + 1) } else { designated(0) };
        add(row, to, x_s.clone());
        let to = if bumped { other(c + 1) } else { other(0) };
        add(row, to, third_party.clone());
    }
    m
}

fn check_stochastic<T: Scalar>(m: &[Vec<T>]) -> Result<(), OracleError> {
    for (i, row) in m.iter().enumerate() {
        let sum = row.iter().fold(T::zero(), |acc, x| acc + x.clone());
        if row.iter().any(|x| *x < T::zero()) || !sum.approx_eq(&T::one()) {
            return Err(OracleError::NonStochasticRow { row: i });
        }
    }
    Ok(())
}

fn designated_mass<T: Scalar>(pi: &[T], levels: usize) -> T {
    pi[..levels]
        .iter()
        .fold(T::zero(), |acc, x| acc + x.clone())
}

/// Stationary distribution of the lumped chain by direct linear solve.
pub fn threshold_stationary<T: Scalar>(
    p: &ChainParams<T>,
) -> Result<StationaryResult<T>, OracleError> {
    let m = lumped_transition_matrix(p);
    check_stochastic(&m)?;
    let pi = stationary_direct(&m).ok_or(OracleError::Singular)?;
    Ok(StationaryResult {
        o_s: designated_mass(&pi, p.t + 1),
        pi,
        method: SolveMethod::Direct,
    })
}

/// Power iteration from the uniform distribution down to the scalar's
/// iterative tolerance, at most `max_iter` steps, falling back to the direct
/// solve if it does not get there (or if the scalar is exact).
///
/// The stopping rule bounds the one-step change, not the error: for large `t`
/// the chain mixes slowly and the iterate can stop well short of the fixed
/// point. [`threshold_stationary`] is the accurate path.
pub fn threshold_stationary_power<T: Scalar>(
    p: &ChainParams<T>,
    max_iter: usize,
) -> Result<StationaryResult<T>, OracleError> {
    let m = lumped_transition_matrix(p);
    check_stochastic(&m)?;
    if let Some(tol) = T::iterative_tolerance() {
        if let Some((pi, iterations)) = stationary_power(&m, &tol, max_iter) {
            return Ok(StationaryResult {
                o_s: designated_mass(&pi, p.t + 1),
                pi,
                method: SolveMethod::PowerIteration { iterations },
            });
        }
    }
    threshold_stationary(p)
}

/// Stationary distribution of the full `(owner site, counter)` chain, built
/// by enumerating every requester from every state.
pub fn brute_force_stationary<T: Scalar>(
    p: &ChainParams<T>,
) -> Result<StationaryResult<T>, OracleError> {
    if p.n > 6 || p.t > 4 {
        return Err(OracleError::ParamsTooLarge { n: p.n, t: p.t });
    }
    let levels = p.t + 1;
    let x_d = p.x_d();
    let access: Vec<T> = (0..p.n)
        .map(|s| if s == 0 { p.x_s.clone() } else { x_d.clone() })
        .collect();
    let states = p.n * levels;
    let mut m = vec![vec![T::zero(); states]; states];
    for owner in 0..p.n {
        for c in 0..levels {
            let from = owner * levels + c;
            for (requester, q) in access.iter().enumerate() {
                let to = if requester == owner {
                    owner * levels
                } else if c < p.t {
                    owner * levels + c + 1
                } else {
                    requester * levels
                };
                add(&mut m[from], to, q.clone());
            }
        }
    }
    check_stochastic(&m)?;
    let pi = stationary_direct(&m).ok_or(OracleError::Singular)?;
    Ok(StationaryResult {
        o_s: designated_mass(&pi, levels),
        pi,
        method: SolveMethod::Direct,
    })
}

/// Probability that an owner with access probability `1 - (n - 1) x_d`
/// issues at least one of `m` successive accesses.
pub fn owner_access_probability<T: Scalar>(n: usize, x_d: T, m: usize) -> Result<T, OracleError> {
    if m == 0 {
        return Err(OracleError::ZeroRun);
    }
    if n < 1 {
        return Err(OracleError::TooFewSites(n));
    }
    let remote = T::from_count(n - 1) * x_d.clone();
    if x_d < T::zero() || remote > T::one() {
        return Err(OracleError::InvalidProbability {
            name: "x_d",
            value: x_d.to_string(),
        });
    }
    Ok(T::one() - num_traits::pow(remote, m))
}
