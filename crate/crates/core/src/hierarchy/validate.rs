use std::fmt;

use super::{Dendrogram, Node};

/// A structural defect found by [`Dendrogram::validate`]. Merge numbers in
/// the messages are 1-based, matching the text format.
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    TooFewTerminals { n: usize },
    WrongMergeCount { expected: usize, found: usize },
    /// A child refers to a terminal beyond `n` or to a merge not yet made.
    UnknownChild { merge: usize, child: Node },
    SelfMerge { merge: usize, child: Node },
    /// The same node is used as a child twice.
    ReusedChild { child: Node, first: usize, second: usize },
    /// A node (other than the root) never becomes anyone's child.
    Orphan { node: Node },
    BadLevel { merge: usize, level: f64 },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::TooFewTerminals { n } => write!(f, "need at least 2 terminals, got {n}"),
            Issue::WrongMergeCount { expected, found } => {
                write!(f, "expected {expected} merges, found {found}")
            }
            Issue::UnknownChild { merge, child } => {
                write!(f, "merge q{merge} refers to unknown or later node {child}")
            }
            Issue::SelfMerge { merge, child } => {
                write!(f, "merge q{merge} joins node {child} with itself")
            }
            Issue::ReusedChild {
                child,
                first,
                second,
            } => write!(
                f,
                "node {child} is a child of both q{first} and q{second}"
            ),
            Issue::Orphan { node } => write!(f, "node {node} is never merged"),
            Issue::BadLevel { merge, level } => {
                write!(f, "merge q{merge} has invalid level {level}")
            }
        }
    }
}

/// Outcome of [`Dendrogram::validate`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    /// Structural problems; empty for a well-formed tree.
    pub issues: Vec<Issue>,
    /// Merges (zero-based) whose level is below the previous merge's level.
    pub inversions: Vec<usize>,
}

impl ValidationReport {
    pub fn is_wellformed(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.inversions.is_empty()
    }
}

impl Dendrogram {
    /// Checks tree shape, child coverage and level monotonicity. Never fails;
    /// every finding goes into the report.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.n;
        if n < 2 {
            report.issues.push(Issue::TooFewTerminals { n });
        }
        let expected = n.saturating_sub(1);
        if self.merges.len() != expected {
            report.issues.push(Issue::WrongMergeCount {
                expected,
                found: self.merges.len(),
            });
        }

        let total = n + self.merges.len();
        let mut used_by: Vec<Option<usize>> = vec![None; total];
        for (k, m) in self.merges.iter().enumerate() {
            if m.left == m.right {
                report.issues.push(Issue::SelfMerge {
                    merge: k + 1,
                    child: m.left,
                });
            }
            for child in [m.left, m.right] {
                let slot = match child {
                    Node::Leaf(i) if i < n => i,
                    Node::Merge(j) if j < k => n + j,
                    _ => {
                        report.issues.push(Issue::UnknownChild {
                            merge: k + 1,
                            child,
                        });
                        continue;
                    }
                };
                if m.left == m.right && child == m.right {
                    continue;
                }
                match used_by[slot] {
                    Some(first) => report.issues.push(Issue::ReusedChild {
                        child,
                        first: first + 1,
                        second: k + 1,
                    }),
                    None => used_by[slot] = Some(k),
                }
            }
            if !m.level.is_finite() || m.level < 0.0 {
                report.issues.push(Issue::BadLevel {
                    merge: k + 1,
                    level: m.level,
                });
            }
            if k > 0 && m.level < self.merges[k - 1].level {
                report.inversions.push(k);
            }
        }

        let root = total.checked_sub(1).filter(|_| !self.merges.is_empty());
        for (slot, user) in used_by.iter().enumerate() {
            if user.is_none() && Some(slot) != root {
                let node = if slot < n {
                    Node::Leaf(slot)
                } else {
                    Node::Merge(slot - n)
                };
                report.issues.push(Issue::Orphan { node });
            }
        }
        report
    }
}
