//! Finite conditional probability tables keyed by exact symbol sequences.

use std::collections::HashMap;

use thiserror::Error;

/// Tolerance for the simplex constraint on stored rows.
pub const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TableError {
    #[error("row for context {context:?} is not a distribution: {reason}")]
    InvalidRow { context: Vec<usize>, reason: String },
    #[error("row length {got} does not match output alphabet size {expected}")]
    WrongLength { expected: usize, got: usize },
}

/// A map from history keys to probability vectors over a fixed output
/// alphabet. Keys are the exact interleaved symbol sequences produced by
/// [`crate::History`]; no hashing collisions are possible because keys are
/// compared by value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConditionalTable {
    output_size: usize,
    rows: HashMap<Vec<usize>, Vec<f64>>,
}

impl ConditionalTable {
    pub fn new(output_size: usize) -> Self {
        assert!(output_size > 0, "output alphabet must be nonempty");
        Self {
            output_size,
            rows: HashMap::new(),
        }
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Inserts a row after validating the simplex constraint.
    pub fn insert(&mut self, context: Vec<usize>, probs: Vec<f64>) -> Result<(), TableError> {
        if probs.len() != self.output_size {
            return Err(TableError::WrongLength {
                expected: self.output_size,
                got: probs.len(),
            });
        }
        if let Some(&bad) = probs.iter().find(|&&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(TableError::InvalidRow {
                context,
                reason: format!("entry {bad} is negative or not finite"),
            });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(TableError::InvalidRow {
                context,
                reason: format!("mass sums to {sum}"),
            });
        }
        self.rows.insert(context, probs);
        Ok(())
    }

    pub fn row(&self, context: &[usize]) -> Option<&[f64]> {
        self.rows.get(context).map(Vec::as_slice)
    }

    pub fn contexts(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.rows.keys()
    }
}
