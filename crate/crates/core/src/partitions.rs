//! Pair-partitions `α: {1..2k} → {1..k}` with every class hit exactly twice.
//!
//! Words are stored with classes relabeled by first appearance, so two
//! partitions are equal exactly when their words are.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `k` accepted by [`enumerate_pair_partitions`].
pub const MAX_ENUMERATION_K: usize = 5;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    word: Vec<usize>,
}

/// Result of deleting one class from a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    /// 1-based position of the first element of the deleted pair.
    pub k_beta: usize,
    /// Both 1-based positions of the deleted pair.
    pub deleted_pair: (usize, usize),
    /// The remaining partition on `2k` positions.
    pub alpha_beta: PairPartition,
}

impl PairPartition {
    /// Validates a word and relabels its classes by first appearance.
    pub fn from_word(word: &[usize]) -> Result<Self> {
        let mut labels: Vec<(usize, usize)> = Vec::new(); // (raw label, canonical)
        let mut counts: Vec<usize> = Vec::new();
        let mut canonical = Vec::with_capacity(word.len());
        for &raw in word {
            let class = match labels.iter().find(|(r, _)| *r == raw) {
                Some(&(_, c)) => c,
                None => {
                    labels.push((raw, labels.len() + 1));
                    counts.push(0);
                    labels.len()
                }
            };
            counts[class - 1] += 1;
            canonical.push(class);
        }
        if let Some(pos) = counts.iter().position(|&c| c != 2) {
            return Err(Error::NotAPairPartition(format!(
                "label {} occurs {} times in {:?}",
                labels[pos].0, counts[pos], word
            )));
        }
        Ok(Self { word: canonical })
    }

    /// The partition of the empty set.
    pub fn empty() -> Self {
        Self { word: Vec::new() }
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        self.word.len() / 2
    }

    /// Number of positions, `2k`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// The two 0-based positions of each class, indexed by `class − 1`.
    pub fn class_positions(&self) -> Vec<(usize, usize)> {
        let mut first = vec![usize::MAX; self.k()];
        let mut pairs = vec![(0, 0); self.k()];
        for (i, &c) in self.word.iter().enumerate() {
            if first[c - 1] == usize::MAX {
                first[c - 1] = i;
            } else {
                pairs[c - 1] = (first[c - 1], i);
            }
        }
        pairs
    }

    /// Per position, `(class, conjugate)`: the first occurrence of a class
    /// carries `z_j`, the second `z̄_j`.
    pub fn sign_assignment(&self) -> Vec<(usize, bool)> {
        let mut seen = vec![false; self.k()];
        self.word
            .iter()
            .map(|&c| {
                let conjugate = seen[c - 1];
                seen[c - 1] = true;
                (c, conjugate)
            })
            .collect()
    }

    /// Deletes the last class in canonical order.
    pub fn reduce(&self) -> Result<Reduction> {
        if self.k() == 0 {
            return Err(Error::NotAPairPartition("cannot reduce the empty partition".into()));
        }
        Ok(self.remove_class(self.k()))
    }

    /// Deletes the class holding the last position.
    pub fn reduce_at_last(&self) -> Result<Reduction> {
        let last =
            *self.word.last().ok_or_else(|| Error::NotAPairPartition("cannot reduce the empty partition".into()))?;
        Ok(self.remove_class(last))
    }

    /// Deletes both positions of `class` and renumbers what remains.
    pub fn remove_class(&self, class: usize) -> Reduction {
        assert!(class >= 1 && class <= self.k(), "class {class} out of range");
        let (a, b) = self.class_positions()[class - 1];
        let rest: Vec<usize> = self.word.iter().copied().filter(|&c| c != class).collect();
        let alpha_beta = Self::from_word(&rest).expect("deleting a full class keeps a pair-partition");
        Reduction { k_beta: a + 1, deleted_pair: (a + 1, b + 1), alpha_beta }
    }

    /// Inverse of [`remove_class`](Self::remove_class): inserts a fresh class at
    /// the given 1-based positions of the enlarged word.
    pub fn insert_pair(&self, positions: (usize, usize)) -> Result<Self> {
        let (a, b) = positions;
        let len = self.len() + 2;
        if !(1 <= a && a < b && b <= len) {
            return Err(Error::NotAPairPartition(format!("bad insertion positions {positions:?}")));
        }
        let fresh = self.k() + 1;
        let mut rest = self.word.iter().copied();
        let word: Vec<usize> = (1..=len).map(|i| if i == a || i == b { fresh } else { rest.next().unwrap() }).collect();
        Self::from_word(&word)
    }
}

impl fmt::Debug for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word)
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word)
    }
}

/// All canonical pair-partitions of `2k` positions, `(2k−1)!!` of them.
pub fn enumerate_pair_partitions(k: usize) -> Result<Vec<PairPartition>> {
    if k > MAX_ENUMERATION_K {
        return Err(Error::KTooLarge(k));
    }
    let mut out = Vec::new();
    let mut word = vec![0usize; 2 * k];
    fill(&mut word, 0, &mut out);
    Ok(out)
}

// Place the next unused class at the first free slot and pair it with every
// later free slot.
fn fill(word: &mut [usize], next_class: usize, out: &mut Vec<PairPartition>) {
    let Some(first) = word.iter().position(|&c| c == 0) else {
        out.push(PairPartition { word: word.to_vec() });
        return;
    };
    let class = next_class + 1;
    word[first] = class;
    for second in first + 1..word.len() {
        if word[second] == 0 {
            word[second] = class;
            fill(word, class, out);
            word[second] = 0;
        }
    }
    word[first] = 0;
}

pub fn double_factorial_odd(k: usize) -> usize {
    (1..=k).map(|j| 2 * j - 1).product()
}
