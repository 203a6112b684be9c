//! Counterclockwise differences and winding numbers on the cycle basis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CycleBasis;

/// Residual allowed between a winding sum and the nearest multiple of 2*pi.
pub const WINDING_TOL: f64 = 1e-9;

/// Representative of `a - b` modulo 2*pi in the half-open interval `[-pi, pi)`.
pub fn d_cc(a: f64, b: f64) -> f64 {
    let r = (a - b + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to exactly TAU for tiny negative inputs.
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Integer-valued winding vector, one entry per basis cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WindingVector(pub Vec<i64>);

impl WindingVector {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when every entry lies within `+/- bound`.
    pub fn within(&self, bound: i64) -> bool {
        self.0.iter().all(|k| k.abs() <= bound)
    }
}

impl std::fmt::Display for WindingVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Raw sum of counterclockwise differences `d_cc(theta[next], theta[cur])`
/// around a closed node sequence.
pub fn winding_sum(cycle: &[usize], theta: &[f64]) -> f64 {
    (0..cycle.len())
        .map(|k| {
            let cur = cycle[k];
            let next = cycle[(k + 1) % cycle.len()];
            d_cc(theta[next], theta[cur])
        })
        .sum()
}

/// Winding number of a closed node sequence.
pub fn winding_number(cycle: &[usize], theta: &[f64]) -> Result<i64> {
    if let Some(&bad) = cycle.iter().find(|&&i| i >= theta.len()) {
        return Err(Error::DimensionMismatch {
            expected: bad + 1,
            got: theta.len(),
        });
    }
    let sum = winding_sum(cycle, theta);
    let q = (sum / TAU).round();
    if !sum.is_finite() || (sum - q * TAU).abs() > WINDING_TOL {
        return Err(Error::NonIntegerWinding { sum });
    }
    Ok(q as i64)
}

pub fn winding_vector(basis: &CycleBasis, theta: &[f64]) -> Result<WindingVector> {
    basis
        .cycles()
        .iter()
        .map(|c| winding_number(c, theta))
        .collect::<Result<Vec<_>>>()
        .map(WindingVector)
}

/// True when every basis edge satisfies `|d_cc| < pi/2`.
pub fn is_phase_cohesive(basis: &CycleBasis, theta: &[f64]) -> bool {
    first_non_cohesive_edge(basis, theta).is_none()
}

fn first_non_cohesive_edge(basis: &CycleBasis, theta: &[f64]) -> Option<(usize, usize)> {
    (0..basis.len())
        .flat_map(|p| basis.directed_edges(p))
        .find(|&(a, b)| d_cc(theta[b], theta[a]).abs() >= FRAC_PI_2)
}

/// Checks `|q_p| <= ceil(n_c/4) - 1` on every cycle of a phase-cohesive state.
pub fn check_angle_law(basis: &CycleBasis, theta: &[f64], n_c: usize) -> Result<bool> {
    if let Some((a, b)) = first_non_cohesive_edge(basis, theta) {
        return Err(Error::NotPhaseCohesive(a + 1, b + 1));
    }
    let bound = (n_c.div_ceil(4) - 1) as i64;
    Ok(winding_vector(basis, theta)?.within(bound))
}
