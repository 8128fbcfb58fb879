//! Experience triples and the fixed-capacity replay buffer.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::State;
use crate::{Error, Result};

/// One observed transition: the state before a checkpoint, the configuration
/// adopted there, the reward measured over the following interval, and the
/// state at the next checkpoint (`None` once the run is over).
///
/// Storing the successor state goes beyond a bare (state, action, reward)
/// record; it is what lets training bootstrap future value into the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperienceTriple {
    pub state: State,
    pub action: usize,
    pub reward: f64,
    pub next_state: Option<State>,
}

/// Ring buffer of the most recent experiences.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: VecDeque<ExperienceTriple>,
}

impl ReplayBuffer {
    /// Creates an empty buffer.
    ///
    /// # Panics
    /// Panics if `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer needs capacity > 0");
        ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity),
        }
    }

    /// Appends a triple, evicting the oldest one at capacity.
    pub fn push(&mut self, triple: ExperienceTriple) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(triple);
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExperienceTriple> {
        self.items.iter()
    }

    /// Samples `n` distinct triples uniformly at random.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<ExperienceTriple>> {
        if n == 0 || n > self.items.len() {
            return Err(Error::Invalid(format!(
                "cannot sample {n} items from a buffer of {}",
                self.items.len()
            )));
        }
        Ok(rand::seq::index::sample(rng, self.items.len(), n)
            .into_iter()
            .map(|i| self.items[i])
            .collect())
    }
}
