//! Finite symbol alphabets.

use std::fmt;

/// Index into a finite alphabet. Symbols are plain integers; labels live on
/// the [`Alphabet`] and are used for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub usize);

impl Symbol {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A named finite alphabet with human-readable labels per symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, labels: &[&str]) -> Self {
        assert!(!labels.is_empty(), "alphabet must have at least one symbol");
        Self {
            name: name.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Unnamed binary alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self::new("binary", &["0", "1"])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.0 < self.labels.len()
    }

    pub fn label(&self, s: Symbol) -> &str {
        &self.labels[s.0]
    }

    /// Looks a symbol up by label.
    pub fn symbol(&self, label: &str) -> Option<Symbol> {
        self.labels.iter().position(|l| l == label).map(Symbol)
    }
}
