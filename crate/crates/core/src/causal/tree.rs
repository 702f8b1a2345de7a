//! Shafer-style probability trees: every internal node is a causal
//! mechanism resolving one random variable, and a root-to-leaf path is one
//! sequential realization of mechanisms. The resolution order may differ
//! across branches, which is what lets one tree carry several causal
//! hypotheses at once.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RandomSource;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("variable {0} is not in the registry")]
    UnknownVariable(String),
    #[error("variable {variable} has no outcome {outcome}")]
    UnknownOutcome { variable: String, outcome: String },
    #[error("mechanism for {variable} has branch probabilities summing to {sum}, not 1")]
    UnnormalizedMechanism { variable: String, sum: String },
    #[error("variable {0} is resolved twice on one path")]
    DuplicateResolution(String),
    #[error("mechanisms for {variable} disagree on its outcome set")]
    InconsistentOutcomes { variable: String },
    #[error("evidence has probability zero in the (intervened) tree")]
    ImpossibleEvidence,
    #[error("serialization: {0}")]
    Serialization(String),
}

/// Exact rational from a small numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// One outcome of a mechanism: its value, exact probability, and the
/// subtree realized if it happens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub value: String,
    pub prob: BigRational,
    pub child: ProbTreeNode,
}

/// A node either resolves one random variable or marks the end of a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbTreeNode {
    Leaf,
    Mechanism {
        variable: String,
        branches: Vec<Branch>,
    },
}

impl ProbTreeNode {
    pub fn mechanism(variable: impl Into<String>, branches: Vec<Branch>) -> Self {
        Self::Mechanism {
            variable: variable.into(),
            branches,
        }
    }

    pub fn branch(value: impl Into<String>, prob: BigRational, child: ProbTreeNode) -> Branch {
        Branch {
            value: value.into(),
            prob,
            child,
        }
    }

    /// Replaces the distribution of every mechanism resolving `variable`
    /// with the point mass on `value`. All other mechanisms are untouched.
    pub(crate) fn clamp(&self, variable: &str, value: &str) -> ProbTreeNode {
        match self {
            ProbTreeNode::Leaf => ProbTreeNode::Leaf,
            ProbTreeNode::Mechanism {
                variable: var,
                branches,
            } => {
                let clamped: Vec<Branch> = branches
                    .iter()
                    .map(|b| Branch {
                        value: b.value.clone(),
                        prob: if var == variable {
                            if b.value == value {
                                BigRational::one()
                            } else {
                                BigRational::zero()
                            }
                        } else {
                            b.prob.clone()
                        },
                        child: b.child.clamp(variable, value),
                    })
                    .collect();
                ProbTreeNode::Mechanism {
                    variable: var.clone(),
                    branches: clamped,
                }
            }
        }
    }

    fn visit_paths(
        &self,
        assignment: &mut BTreeMap<String, String>,
        prob: BigRational,
        out: &mut Vec<(BTreeMap<String, String>, BigRational)>,
    ) {
        match self {
            ProbTreeNode::Leaf => out.push((assignment.clone(), prob)),
            ProbTreeNode::Mechanism { variable, branches } => {
                for b in branches {
                    assignment.insert(variable.clone(), b.value.clone());
                    b.child
                        .visit_paths(assignment, prob.clone() * &b.prob, out);
                    assignment.remove(variable);
                }
            }
        }
    }

    /// Samples one realization, walking mechanisms from this node down.
    pub(crate) fn sample_assignment(
        &self,
        rng: &mut RandomSource,
    ) -> BTreeMap<String, String> {
        let mut assignment = BTreeMap::new();
        let mut node = self;
        loop {
            match node {
                ProbTreeNode::Leaf => return assignment,
                ProbTreeNode::Mechanism { variable, branches } => {
                    let probs: Vec<f64> = branches
                        .iter()
                        .map(|b| b.prob.to_f64().expect("finite branch probability"))
                        .collect();
                    let branch = &branches[rng.sample_index(&probs)];
                    assignment.insert(variable.clone(), branch.value.clone());
                    node = &branch.child;
                }
            }
        }
    }

    fn validate(
        &self,
        on_path: &mut BTreeSet<String>,
        registry: &mut BTreeMap<String, Vec<String>>,
    ) -> Result<(), TreeError> {
        let ProbTreeNode::Mechanism { variable, branches } = self else {
            return Ok(());
        };
        if on_path.contains(variable) {
            return Err(TreeError::DuplicateResolution(variable.clone()));
        }
        let sum: BigRational = branches.iter().map(|b| b.prob.clone()).sum();
        if !sum.is_one() {
            return Err(TreeError::UnnormalizedMechanism {
                variable: variable.clone(),
                sum: sum.to_string(),
            });
        }
        if branches.iter().any(|b| b.prob < BigRational::zero()) {
            return Err(TreeError::UnnormalizedMechanism {
                variable: variable.clone(),
                sum: "negative branch".into(),
            });
        }
        let outcomes: Vec<String> = branches.iter().map(|b| b.value.clone()).collect();
        match registry.get(variable) {
            None => {
                registry.insert(variable.clone(), outcomes);
            }
            Some(known) => {
                let a: BTreeSet<&String> = known.iter().collect();
                let b: BTreeSet<&String> = outcomes.iter().collect();
                if a != b || known.len() != outcomes.len() {
                    return Err(TreeError::InconsistentOutcomes {
                        variable: variable.clone(),
                    });
                }
            }
        }
        on_path.insert(variable.clone());
        for branch in branches {
            branch.child.validate(on_path, registry)?;
        }
        on_path.remove(variable);
        Ok(())
    }
}

/// A validated probability tree plus the registry of its random variables
/// and their outcome alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbTree {
    root: ProbTreeNode,
    registry: BTreeMap<String, Vec<String>>,
}

impl ProbTree {
    /// Validates and wraps a tree: every mechanism's branch probabilities
    /// must sum to exactly one, no path may resolve a variable twice, and
    /// all mechanisms for one variable must share its outcome set.
    pub fn new(root: ProbTreeNode) -> Result<Self, TreeError> {
        let mut registry = BTreeMap::new();
        root.validate(&mut BTreeSet::new(), &mut registry)?;
        Ok(Self { root, registry })
    }

    pub fn root(&self) -> &ProbTreeNode {
        &self.root
    }

    pub fn registry(&self) -> &BTreeMap<String, Vec<String>> {
        &self.registry
    }

    pub fn outcomes(&self, variable: &str) -> Result<&[String], TreeError> {
        self.registry
            .get(variable)
            .map(Vec::as_slice)
            .ok_or_else(|| TreeError::UnknownVariable(variable.to_string()))
    }

    fn check_value(&self, variable: &str, value: &str) -> Result<(), TreeError> {
        let outcomes = self.outcomes(variable)?;
        if outcomes.iter().any(|o| o == value) {
            Ok(())
        } else {
            Err(TreeError::UnknownOutcome {
                variable: variable.to_string(),
                outcome: value.to_string(),
            })
        }
    }

    /// Leaf probabilities in depth-first branch order.
    pub fn leaf_probabilities(&self) -> Vec<BigRational> {
        self.paths().into_iter().map(|(_, p)| p).collect()
    }

    /// Complete root-to-leaf realizations with their exact probabilities.
    pub fn paths(&self) -> Vec<(BTreeMap<String, String>, BigRational)> {
        let mut out = Vec::new();
        self.root
            .visit_paths(&mut BTreeMap::new(), BigRational::one(), &mut out);
        out
    }

    /// Externally fixes `variable := value`: every mechanism resolving it
    /// is replaced by the point mass on `value`. Returns a new tree; the
    /// original is untouched.
    pub fn intervene(&self, variable: &str, value: &str) -> Result<ProbTree, TreeError> {
        self.check_value(variable, value)?;
        Ok(ProbTree {
            root: self.root.clamp(variable, value),
            registry: self.registry.clone(),
        })
    }

    /// Samples one complete realization of the tree.
    pub fn sample(&self, rng: &mut RandomSource) -> BTreeMap<String, String> {
        self.root.sample_assignment(rng)
    }

    /// Conditional distribution of `hypothesis` given the evidence, after
    /// applying the interventions (interventions first, conditioning
    /// second). The result is exact and listed in registry outcome order.
    pub fn posterior(
        &self,
        hypothesis: &str,
        evidence: &BTreeMap<String, String>,
        interventions: &[(String, String)],
    ) -> Result<Vec<(String, BigRational)>, TreeError> {
        let outcomes = self.outcomes(hypothesis)?.to_vec();
        for (var, value) in evidence {
            self.check_value(var, value)?;
        }
        let mut tree = self.clone();
        for (var, value) in interventions {
            tree = tree.intervene(var, value)?;
        }
        let mut mass: BTreeMap<&str, BigRational> = outcomes
            .iter()
            .map(|o| (o.as_str(), BigRational::zero()))
            .collect();
        let mut total = BigRational::zero();
        for (assignment, prob) in tree.paths() {
            if prob.is_zero() {
                continue;
            }
            let consistent = evidence
                .iter()
                .all(|(var, value)| assignment.get(var) == Some(value));
            if !consistent {
                continue;
            }
            let Some(outcome) = assignment.get(hypothesis) else {
                continue;
            };
            *mass.get_mut(outcome.as_str()).expect("registered outcome") += &prob;
            total += prob;
        }
        if total.is_zero() {
            return Err(TreeError::ImpossibleEvidence);
        }
        Ok(outcomes
            .iter()
            .map(|o| (o.clone(), mass[o.as_str()].clone() / &total))
            .collect())
    }

    pub fn to_json(&self) -> Result<String, TreeError> {
        let dto = node_to_dto(&self.root)?;
        serde_json::to_string_pretty(&dto).map_err(|e| TreeError::Serialization(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self, TreeError> {
        let dto: NodeDto =
            serde_json::from_str(json).map_err(|e| TreeError::Serialization(e.to_string()))?;
        ProbTree::new(dto_to_node(&dto)?)
    }
}

/// Wire format: nested mechanisms with exact integer numerator/denominator
/// pairs. A missing child marks a leaf.
#[derive(Debug, Serialize, Deserialize)]
struct NodeDto {
    variable: String,
    branches: Vec<BranchDto>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchDto {
    value: String,
    num: i64,
    den: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    child: Option<Box<NodeDto>>,
}

fn node_to_dto(node: &ProbTreeNode) -> Result<NodeDto, TreeError> {
    let ProbTreeNode::Mechanism { variable, branches } = node else {
        return Err(TreeError::Serialization(
            "a bare leaf cannot be serialized as a tree".into(),
        ));
    };
    let branches = branches
        .iter()
        .map(|b| {
            let as_i64 = |x: &BigInt| {
                x.to_i64().ok_or_else(|| {
                    TreeError::Serialization(format!("{x} does not fit in a 64-bit integer"))
                })
            };
            Ok(BranchDto {
                value: b.value.clone(),
                num: as_i64(b.prob.numer())?,
                den: as_i64(b.prob.denom())?,
                child: match &b.child {
                    ProbTreeNode::Leaf => None,
                    m => Some(Box::new(node_to_dto(m)?)),
                },
            })
        })
        .collect::<Result<Vec<_>, TreeError>>()?;
    Ok(NodeDto {
        variable: variable.clone(),
        branches,
    })
}

fn dto_to_node(dto: &NodeDto) -> Result<ProbTreeNode, TreeError> {
    let branches = dto
        .branches
        .iter()
        .map(|b| {
            if b.den == 0 {
                return Err(TreeError::Serialization(format!(
                    "branch {} has a zero denominator",
                    b.value
                )));
            }
            Ok(Branch {
                value: b.value.clone(),
                prob: ratio(b.num, b.den),
                child: match &b.child {
                    None => ProbTreeNode::Leaf,
                    Some(m) => dto_to_node(m)?,
                },
            })
        })
        .collect::<Result<Vec<_>, TreeError>>()?;
    Ok(ProbTreeNode::Mechanism {
        variable: dto.variable.clone(),
        branches,
    })
}
