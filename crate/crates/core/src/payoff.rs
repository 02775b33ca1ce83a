//! Payoff sets: predicates on finite outcomes.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Sequences of points.
    Points,
    /// Sequences of precompact-set ids (outcomes of the strong asymptotic game).
    Sets,
}

type Pred = Arc<dyn Fn(&[usize]) -> bool + Send + Sync>;

/// A clopen payoff of fixed length. Cloning is cheap.
#[derive(Clone)]
pub struct Payoff {
    name: String,
    len: usize,
    domain: Domain,
    pred: Pred,
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Payoff")
            .field("name", &self.name)
            .field("len", &self.len)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Payoff {
    pub fn new(name: impl Into<String>, len: usize, pred: impl Fn(&[usize]) -> bool + Send + Sync + 'static) -> Self {
        Payoff {
            name: name.into(),
            len,
            domain: Domain::Points,
            pred: Arc::new(pred),
        }
    }

    pub fn on_sets(
        name: impl Into<String>,
        len: usize,
        pred: impl Fn(&[usize]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Payoff {
            name: name.into(),
            len,
            domain: Domain::Sets,
            pred: Arc::new(pred),
        }
    }

    /// Accepts exactly the listed sequences.
    pub fn from_set(name: impl Into<String>, len: usize, accepted: HashSet<Vec<usize>>) -> Self {
        Payoff::new(name, len, move |s| accepted.contains(s))
    }

    pub fn constant(len: usize, value: bool) -> Self {
        Payoff::new(if value { "everything" } else { "nothing" }, len, move |_| value)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn accepts(&self, outcome: &[usize]) -> bool {
        (self.pred)(outcome)
    }

    pub fn complement(&self) -> Payoff {
        let inner = self.pred.clone();
        let name = match self.name.strip_prefix("not ") {
            Some(base) => base.to_string(),
            None => format!("not {}", self.name),
        };
        Payoff {
            name,
            len: self.len,
            domain: self.domain,
            pred: Arc::new(move |s| !inner(s)),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Payoff {
        self.name = name.into();
        self
    }

    /// Reads the payoff through a map from another point universe.
    pub fn pull_back(&self, map: Arc<Vec<usize>>) -> Payoff {
        let inner = self.pred.clone();
        Payoff {
            name: self.name.clone(),
            len: self.len,
            domain: self.domain,
            pred: Arc::new(move |s| {
                let mapped: Vec<usize> = s.iter().map(|&x| map[x]).collect();
                inner(&mapped)
            }),
        }
    }
}

/// Calls `f` on every sequence of length `len` over `0..alphabet`.
pub fn for_each_sequence(alphabet: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut s = vec![0usize; len];
    if len == 0 {
        f(&s);
        return;
    }
    if alphabet == 0 {
        return;
    }
    loop {
        f(&s);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            s[i] += 1;
            if s[i] < alphabet {
                break;
            }
            s[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_flips_and_names() {
        let even = Payoff::new("x0 even", 1, |s| s[0] % 2 == 0);
        let odd = even.complement();
        assert!(odd.accepts(&[3]));
        assert!(!odd.accepts(&[2]));
        assert_eq!(odd.name(), "not x0 even");
        assert_eq!(odd.complement().name(), "x0 even");
    }

    #[test]
    fn sequences_are_enumerated_lexicographically() {
        let mut seen = Vec::new();
        for_each_sequence(2, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let mut count = 0;
        for_each_sequence(5, 0, |_| count += 1);
        assert_eq!(count, 1);
    }
}
