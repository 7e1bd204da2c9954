use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::index;
use rand::Rng;

use crate::diffusion::SeedSet;
use crate::embedding::NodeEmbeddings;

/// One step of experience.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    /// Index into the training pool.
    pub instance: usize,
    pub before: SeedSet,
    pub action: usize,
    pub reward: f64,
    pub after: SeedSet,
    pub terminal: bool,
    /// Remaining budget when the action was chosen.
    pub budget_before: f64,
    /// Remaining budget after paying for the action.
    pub budget_after: f64,
    pub embeddings: Arc<NodeEmbeddings>,
}

/// Bounded FIFO store; the oldest transition is evicted first.
#[derive(Clone, Debug)]
pub struct ReplayBuffer<T = Transition> {
    items: VecDeque<T>,
    capacity: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
        }
    }

    pub fn push(&mut self, item: T) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
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

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.items.iter()
    }

    /// `k` distinct items drawn uniformly; `k` is capped at the buffer size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, k: usize) -> Vec<&T> {
        let k = k.min(self.items.len());
        index::sample(rng, self.items.len(), k)
            .into_iter()
            .map(|i| &self.items[i])
            .collect()
    }
}

impl<T> Extend<T> for ReplayBuffer<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for item in iter {
            self.push(item);
        }
    }
}
