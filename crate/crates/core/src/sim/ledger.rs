use std::collections::HashSet;

use crate::qubit::PauliWord;

/// Identifies one parameter point. Tags only grow; equal tags mean the same `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaTag(u64);

impl ThetaTag {
    pub fn value(self) -> u64 {
        self.0
    }
}

/// Issues a new tag whenever the stamped `θ` differs bitwise from the previous one.
#[derive(Debug, Clone, Default)]
pub struct ThetaStamper {
    issued: u64,
    last: Option<(Vec<u64>, ThetaTag)>,
}

impl ThetaStamper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stamp(&mut self, theta: &[f64]) -> ThetaTag {
        let bits: Vec<u64> = theta.iter().map(|t| t.to_bits()).collect();
        if let Some((prev, tag)) = &self.last {
            if *prev == bits {
                return *tag;
            }
        }
        let tag = self.fresh();
        self.last = Some((bits, tag));
        tag
    }

    /// A tag unrelated to any stamped `θ`.
    pub fn fresh(&mut self) -> ThetaTag {
        self.issued += 1;
        self.last = None;
        ThetaTag(self.issued)
    }
}

/// Distinct non-identity Pauli words evaluated at the current `θ`, plus the running total
/// over the whole run.
#[derive(Debug, Clone, Default)]
pub struct EvalLedger {
    stamper: ThetaStamper,
    current: Option<ThetaTag>,
    evaluated: HashSet<PauliWord>,
    cumulative: u64,
}

impl EvalLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tag for `θ`; repeated calls with a bitwise-identical `θ` return the same tag.
    pub fn tag_for(&mut self, theta: &[f64]) -> ThetaTag {
        self.stamper.stamp(theta)
    }

    pub fn fresh_tag(&mut self) -> ThetaTag {
        self.stamper.fresh()
    }

    /// Records the words as evaluated under `tag`, returning how many were new.
    pub fn charge<'w>(
        &mut self,
        tag: ThetaTag,
        words: impl IntoIterator<Item = &'w PauliWord>,
    ) -> u64 {
        if self.current != Some(tag) {
            self.current = Some(tag);
            self.evaluated.clear();
        }
        let mut added = 0;
        for w in words {
            if !w.is_identity() && self.evaluated.insert(*w) {
                added += 1;
            }
        }
        self.cumulative += added;
        added
    }

    /// Words in `words` that a charge under `tag` would count.
    pub fn uncharged<'w>(
        &self,
        tag: ThetaTag,
        words: impl IntoIterator<Item = &'w PauliWord>,
    ) -> u64 {
        let fresh_set = self.current != Some(tag);
        let mut seen = HashSet::new();
        words
            .into_iter()
            .filter(|w| {
                !w.is_identity() && (fresh_set || !self.evaluated.contains(w)) && seen.insert(**w)
            })
            .count() as u64
    }

    pub fn cumulative_count(&self) -> u64 {
        self.cumulative
    }

    pub fn current_tag(&self) -> Option<ThetaTag> {
        self.current
    }

    pub fn evaluated_count(&self) -> usize {
        self.evaluated.len()
    }

    pub fn contains(&self, word: &PauliWord) -> bool {
        self.evaluated.contains(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    #[test]
    fn same_theta_same_tag() {
        let mut l = EvalLedger::new();
        let a = l.tag_for(&[0.1, 0.2]);
        assert_eq!(l.tag_for(&[0.1, 0.2]), a);
        let b = l.tag_for(&[0.1, 0.3]);
        assert!(b > a);
        // returning to an earlier θ is a new point in time
        assert!(l.tag_for(&[0.1, 0.2]) > b);
    }

    #[test]
    fn charges_reset_on_tag_change() {
        let mut l = EvalLedger::new();
        let t = l.tag_for(&[0.0]);
        let words = [w("ZI"), w("IZ"), w("II")];
        assert_eq!(l.charge(t, &words), 2);
        assert_eq!(l.charge(t, &words), 0);
        assert_eq!(l.charge(t, &[w("XX"), w("ZI")]), 1);
        assert_eq!(l.cumulative_count(), 3);
        let t2 = l.tag_for(&[1.0]);
        assert_eq!(l.uncharged(t2, &words), 2);
        assert_eq!(l.charge(t2, &words), 2);
        assert_eq!(l.cumulative_count(), 5);
        assert_eq!(l.evaluated_count(), 2);
    }

    #[test]
    fn duplicate_words_in_one_charge_count_once() {
        let mut l = EvalLedger::new();
        let t = l.fresh_tag();
        assert_eq!(l.uncharged(t, &[w("X"), w("X")]), 1);
        assert_eq!(l.charge(t, &[w("X"), w("X")]), 1);
    }
}
