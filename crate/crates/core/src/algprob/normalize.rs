//! Solomonoff normalization of lower-bound estimates and conditionals on the
//! binary tree.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::estimate::{explore, node_index, EstimateTable};
use super::AlgProbError;
use crate::bits::BitString;
use crate::mtm::MachineSpec;
use crate::rational::{self, Rational};

/// Anything that assigns exact values to the nodes of the binary tree.
pub trait NodeValues {
    fn node_value(&self, x: &BitString) -> Result<Rational, AlgProbError>;
}

impl NodeValues for EstimateTable {
    fn node_value(&self, x: &BitString) -> Result<Rational, AlgProbError> {
        self.m_lower(x).cloned().ok_or(AlgProbError::OutOfDepth { node: x.clone(), depth: self.depth })
    }
}

/// `m(y|x) = m(xy)/m(x)`.
pub fn conditional<V: NodeValues + ?Sized>(values: &V, y: &BitString, x: &BitString) -> Result<Rational, AlgProbError> {
    let mx = values.node_value(x)?;
    if mx.is_zero() {
        return Err(AlgProbError::ZeroConditioning(x.clone()));
    }
    let mxy = values.node_value(&x.concat(y))?;
    Ok(mxy / mx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NodeValue {
    Defined {
        #[serde(with = "rational::serde_str")]
        value: Rational,
    },
    /// An ancestor had `M_lower(x0) + M_lower(x1) = 0`.
    Undefined,
}

/// `P` on every node up to `depth`, built from the lower bounds of one
/// program-tree walk with fixed budgets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizedMeasure {
    pub depth: usize,
    pub max_program_length: usize,
    pub step_budget: usize,
    /// Node values in length-then-lexicographic order.
    pub values: Vec<NodeValue>,
    /// Nodes whose children both estimate to zero; everything below them is
    /// undefined.
    pub zero_denominator_nodes: Vec<BitString>,
    #[serde(skip)]
    pub estimates: Option<EstimateTable>,
}

impl NormalizedMeasure {
    pub fn value(&self, x: &BitString) -> Option<&NodeValue> {
        (x.len() <= self.depth).then(|| &self.values[node_index(x)])
    }

    pub fn defined(&self, x: &BitString) -> Option<&Rational> {
        match self.value(x)? {
            NodeValue::Defined { value } => Some(value),
            NodeValue::Undefined => None,
        }
    }
}

impl NodeValues for NormalizedMeasure {
    fn node_value(&self, x: &BitString) -> Result<Rational, AlgProbError> {
        match self.value(x) {
            None => Err(AlgProbError::OutOfDepth { node: x.clone(), depth: self.depth }),
            Some(NodeValue::Undefined) => Err(AlgProbError::UndefinedNode(x.clone())),
            Some(NodeValue::Defined { value }) => Ok(value.clone()),
        }
    }
}

/// Normalizes a table of lower bounds:
/// `P(ε) = 1`, `P(xa) = P(x)·M(xa)/(M(x0)+M(x1))`.
pub fn normalize_table(table: EstimateTable) -> NormalizedMeasure {
    let depth = table.depth;
    let mut values = vec![NodeValue::Undefined; (1usize << (depth + 1)) - 1];
    let mut zero_denominator_nodes = Vec::new();
    values[0] = NodeValue::Defined { value: Rational::one() };
    for x in BitString::all_up_to(depth.saturating_sub(1)) {
        if x.len() >= depth {
            break;
        }
        let px = match &values[node_index(&x)] {
            NodeValue::Defined { value } => value.clone(),
            NodeValue::Undefined => continue,
        };
        let (c0, c1) = (x.child(false), x.child(true));
        let m0 = table.m_lower(&c0).expect("within depth").clone();
        let m1 = table.m_lower(&c1).expect("within depth").clone();
        let denom = &m0 + &m1;
        if denom.is_zero() {
            zero_denominator_nodes.push(x);
            continue;
        }
        values[node_index(&c0)] = NodeValue::Defined { value: &px * m0 / &denom };
        values[node_index(&c1)] = NodeValue::Defined { value: px * m1 / denom };
    }
    NormalizedMeasure {
        depth,
        max_program_length: table.max_program_length,
        step_budget: table.step_budget,
        values,
        zero_denominator_nodes,
        estimates: Some(table),
    }
}

pub fn normalize(machine: &MachineSpec, depth: usize, max_len: usize, step_budget: usize) -> NormalizedMeasure {
    normalize_table(explore(machine, depth, max_len, step_budget))
}
