//! ε-greedy action selection over a Q-vector.

use rand::Rng;

use crate::{Error, Result};

/// Picks an action id from `qvec`, restricted to `available` actions.
///
/// With probability `1 − epsilon` the highest-valued available action wins
/// (lowest id on ties, for determinism); with probability `epsilon` the
/// choice is uniform among available actions.
pub fn select_action<R: Rng + ?Sized>(
    qvec: &[f64],
    epsilon: f64,
    available: &[bool],
    rng: &mut R,
) -> Result<usize> {
    if qvec.len() != available.len() {
        return Err(Error::Shape(format!(
            "{} Q-values but {} availability flags",
            qvec.len(),
            available.len()
        )));
    }
    let candidates: Vec<usize> = (0..qvec.len()).filter(|&i| available[i]).collect();
    if candidates.is_empty() {
        return Err(Error::NoAction);
    }
    if rng.random::<f64>() < epsilon {
        return Ok(candidates[rng.random_range(0..candidates.len())]);
    }
    let mut best = candidates[0];
    for &i in &candidates[1..] {
        if qvec[i] > qvec[best] {
            best = i;
        }
    }
    Ok(best)
}
