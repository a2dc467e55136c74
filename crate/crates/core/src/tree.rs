//! Rooted-tree representation of multiqubit states.
//!
//! A tree node is a leaf `α|0⟩ + β|1⟩` for one qubit, a weighted `+` gate, or
//! an ordered `⊗` gate. The *size* of a tree is its number of leaves. Every
//! operation here is a pure function; trees are immutable after construction.
//!
//! Well-formedness rules enforced by [`StateTree::validate`]:
//! - the support of a `⊗` node is the disjoint union of its children's
//!   supports, and all children of a `+` node share the same support;
//! - the root covers all of `1..=n`;
//! - no leaf is the zero vector;
//! - gates have at least two children, except that a `+` with one child of
//!   weight 1 is accepted as noncanonical (it folds away, see
//!   [`StateTree::canonicalize`]).

use num_complex::Complex64;
use rand::Rng;
use std::fmt;

use crate::dense::{DenseState, LocalOp};
use crate::{Error, Result};

/// One vertex of a state tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    /// `amp0·|0⟩ + amp1·|1⟩` on a single qubit (1-based index).
    Leaf {
        qubit: usize,
        amp0: Complex64,
        amp1: Complex64,
    },
    /// Weighted sum; the weight sits on the edge to each child.
    Plus { terms: Vec<(Complex64, TreeNode)> },
    /// Tensor product of children with pairwise disjoint supports.
    Tensor { children: Vec<TreeNode> },
}

impl TreeNode {
    pub fn leaf(qubit: usize, amp0: Complex64, amp1: Complex64) -> Self {
        TreeNode::Leaf { qubit, amp0, amp1 }
    }

    /// Leaf in the computational basis state `|bit⟩`.
    pub fn basis_leaf(qubit: usize, bit: usize) -> Self {
        if bit == 0 {
            Self::leaf(qubit, Complex64::ONE, Complex64::ZERO)
        } else {
            Self::leaf(qubit, Complex64::ZERO, Complex64::ONE)
        }
    }

    /// Leaf in the unnormalized `|+⟩ = |0⟩ + |1⟩` state.
    pub fn plus_leaf(qubit: usize) -> Self {
        Self::leaf(qubit, Complex64::ONE, Complex64::ONE)
    }

    pub fn plus(terms: Vec<(Complex64, TreeNode)>) -> Self {
        TreeNode::Plus { terms }
    }

    /// Unweighted sum (all edge weights 1).
    pub fn sum(children: Vec<TreeNode>) -> Self {
        TreeNode::Plus {
            terms: children.into_iter().map(|c| (Complex64::ONE, c)).collect(),
        }
    }

    pub fn tensor(children: Vec<TreeNode>) -> Self {
        TreeNode::Tensor { children }
    }

    fn count_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Plus { terms } => terms.iter().map(|(_, c)| c.count_leaves()).sum(),
            TreeNode::Tensor { children } => children.iter().map(|c| c.count_leaves()).sum(),
        }
    }
}

/// A rooted tree together with the register size it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTree {
    n: usize,
    root: TreeNode,
}

/// A single well-formedness violation, located by a `root.i.j…` path.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

/// Outcome of [`StateTree::validate`]; empty means the tree is well formed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "at {}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

/// Amplitudes over an explicit subset of qubits; intermediate result of
/// evaluation. `qubits` is sorted ascending and the first listed qubit is the
/// most significant bit of the local index.
struct Partial {
    qubits: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateTree {
    pub fn new(n: usize, root: TreeNode) -> Self {
        Self { n, root }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Checks every structural invariant, reporting all violations with the
    /// path of the offending node.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.n == 0 {
            report.violations.push(Violation {
                path: "root".into(),
                message: "qubit count must be positive".into(),
            });
            return report;
        }
        let support = check_node(&self.root, self.n, "root", &mut report);
        if let Some(mask) = support {
            let full = full_mask(self.n);
            if mask != full {
                report.violations.push(Violation {
                    path: "root".into(),
                    message: format!(
                        "support {{{}}} does not cover all qubits 1..={}",
                        mask_to_string(mask),
                        self.n
                    ),
                });
            }
        }
        report
    }

    fn checked(&self) -> Result<()> {
        let report = self.validate();
        if report.ok() {
            Ok(())
        } else {
            Err(Error::InvalidTree(report))
        }
    }

    /// Number of leaves — the size of this representation.
    pub fn leaf_count(&self) -> Result<usize> {
        self.checked()?;
        Ok(self.root.count_leaves())
    }

    /// Leaf count without validation, for use on trees already known valid.
    pub fn leaf_count_unchecked(&self) -> usize {
        self.root.count_leaves()
    }

    /// Evaluates the tree to its amplitude vector. No normalization is
    /// applied: leaves, weights and products contribute exactly as written.
    pub fn evaluate(&self) -> Result<DenseState> {
        self.checked()?;
        let part = eval_node(&self.root);
        debug_assert_eq!(part.qubits, (1..=self.n).collect::<Vec<_>>());
        DenseState::new(self.n, part.amps)
    }

    /// Applies invertible local operators at the leaves: every leaf of qubit
    /// `i` has its amplitude pair multiplied by `ops[i-1]`. The skeleton (and
    /// therefore the leaf count) is unchanged.
    pub fn apply_ilo(&self, ops: &[LocalOp]) -> Result<StateTree> {
        self.checked()?;
        if ops.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} local operators, got {}",
                self.n,
                ops.len()
            )));
        }
        for (i, op) in ops.iter().enumerate() {
            if !op.is_invertible() {
                return Err(Error::SingularOperator {
                    qubit: i + 1,
                    det: op.det().norm(),
                });
            }
        }
        Ok(StateTree::new(self.n, map_leaves(&self.root, ops)))
    }

    /// Folds away `+` gates with a single weight-1 child. Other structure is
    /// left untouched.
    pub fn canonicalize(&self) -> StateTree {
        StateTree::new(self.n, fold_trivial_plus(self.root.clone()))
    }
}

fn full_mask(n: usize) -> u64 {
    (1u64 << n) - 1
}

fn mask_to_string(mask: u64) -> String {
    let qubits: Vec<String> = (0..64)
        .filter(|q| mask >> q & 1 == 1)
        .map(|q| (q + 1).to_string())
        .collect();
    qubits.join(",")
}

/// Returns the support mask of the node, or `None` when the subtree is too
/// broken for a support to be meaningful.
fn check_node(
    node: &TreeNode,
    n: usize,
    path: &str,
    report: &mut ValidationReport,
) -> Option<u64> {
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => {
            if *qubit < 1 || *qubit > n {
                report.violations.push(Violation {
                    path: path.to_string(),
                    message: format!("leaf qubit {qubit} outside 1..={n}"),
                });
                return None;
            }
            if amp0.norm() == 0.0 && amp1.norm() == 0.0 {
                report.violations.push(Violation {
                    path: path.to_string(),
                    message: "zero leaf: (amp0, amp1) = (0, 0)".into(),
                });
            }
            Some(1u64 << (qubit - 1))
        }
        TreeNode::Plus { terms } => {
            if terms.is_empty() {
                report.violations.push(Violation {
                    path: path.to_string(),
                    message: "plus gate with no children".into(),
                });
                return None;
            }
            if terms.len() == 1 && terms[0].0 != Complex64::ONE {
                report.violations.push(Violation {
                    path: path.to_string(),
                    message: "plus gate with a single child requires weight 1".into(),
                });
            }
            let mut support: Option<u64> = None;
            for (i, (_, child)) in terms.iter().enumerate() {
                let child_path = format!("{path}.{i}");
                let child_support = check_node(child, n, &child_path, report);
                match (support, child_support) {
                    (None, s) => support = s,
                    (Some(_), None) => {}
                    (Some(s), Some(c)) if s != c => {
                        report.violations.push(Violation {
                            path: child_path,
                            message: format!(
                                "mismatched plus support: {{{}}} vs sibling {{{}}}",
                                mask_to_string(c),
                                mask_to_string(s)
                            ),
                        });
                    }
                    _ => {}
                }
            }
            support
        }
        TreeNode::Tensor { children } => {
            if children.len() < 2 {
                report.violations.push(Violation {
                    path: path.to_string(),
                    message: format!("tensor gate needs ≥ 2 children, has {}", children.len()),
                });
            }
            let mut union = 0u64;
            let mut any_bad = false;
            for (i, child) in children.iter().enumerate() {
                let child_path = format!("{path}.{i}");
                match check_node(child, n, &child_path, report) {
                    Some(c) => {
                        if union & c != 0 {
                            report.violations.push(Violation {
                                path: child_path,
                                message: format!(
                                    "overlapping support: {{{}}} intersects earlier siblings",
                                    mask_to_string(union & c)
                                ),
                            });
                            any_bad = true;
                        }
                        union |= c;
                    }
                    None => any_bad = true,
                }
            }
            if any_bad {
                None
            } else {
                Some(union)
            }
        }
    }
}

fn eval_node(node: &TreeNode) -> Partial {
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => Partial {
            qubits: vec![*qubit],
            amps: vec![*amp0, *amp1],
        },
        TreeNode::Plus { terms } => {
            let mut parts = terms.iter().map(|(w, c)| (*w, eval_node(c)));
            let (w0, first) = parts.next().expect("validated plus has children");
            let mut amps: Vec<Complex64> = first.amps.iter().map(|a| a * w0).collect();
            for (w, p) in parts {
                debug_assert_eq!(p.qubits, first.qubits);
                for (a, b) in amps.iter_mut().zip(&p.amps) {
                    *a += w * b;
                }
            }
            Partial {
                qubits: first.qubits,
                amps,
            }
        }
        TreeNode::Tensor { children } => {
            let parts: Vec<Partial> = children.iter().map(eval_node).collect();
            tensor_combine(parts)
        }
    }
}

/// Interleaves child amplitude blocks into the merged qubit ordering. The
/// result is independent of child order because qubit positions come from
/// the leaf labels, not from the argument order.
fn tensor_combine(parts: Vec<Partial>) -> Partial {
    let raw = parts.into_iter().map(|p| (p.qubits, p.amps)).collect();
    let (qubits, amps) = tensor_combine_raw(raw);
    Partial { qubits, amps }
}

/// Tuple form of the tensor interleave, shared with the fitting code in the
/// analysis module. Each part is a sorted qubit list (first qubit most
/// significant) with its `2^k` local amplitudes.
pub(crate) fn tensor_combine_raw(
    parts: Vec<(Vec<usize>, Vec<Complex64>)>,
) -> (Vec<usize>, Vec<Complex64>) {
    let mut qubits: Vec<usize> = parts.iter().flat_map(|p| p.0.iter().copied()).collect();
    qubits.sort_unstable();
    let k = qubits.len();
    // For child part p and its j-th qubit, the bit position (from the MSB)
    // inside the merged index.
    let placements: Vec<Vec<usize>> = parts
        .iter()
        .map(|p| {
            p.0.iter()
                .map(|q| qubits.binary_search(q).expect("qubit present in union"))
                .collect()
        })
        .collect();
    let mut amps = Vec::with_capacity(1 << k);
    for idx in 0..1usize << k {
        let mut v = Complex64::ONE;
        for (p, placement) in parts.iter().zip(&placements) {
            let mut sub = 0usize;
            for &pos in placement {
                sub = (sub << 1) | ((idx >> (k - 1 - pos)) & 1);
            }
            v *= p.1[sub];
        }
        amps.push(v);
    }
    (qubits, amps)
}

fn map_leaves(node: &TreeNode, ops: &[LocalOp]) -> TreeNode {
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => {
            let (b0, b1) = ops[qubit - 1].apply(*amp0, *amp1);
            TreeNode::Leaf {
                qubit: *qubit,
                amp0: b0,
                amp1: b1,
            }
        }
        TreeNode::Plus { terms } => TreeNode::Plus {
            terms: terms
                .iter()
                .map(|(w, c)| (*w, map_leaves(c, ops)))
                .collect(),
        },
        TreeNode::Tensor { children } => TreeNode::Tensor {
            children: children.iter().map(|c| map_leaves(c, ops)).collect(),
        },
    }
}

fn fold_trivial_plus(node: TreeNode) -> TreeNode {
    match node {
        TreeNode::Leaf { .. } => node,
        TreeNode::Plus { mut terms } => {
            if terms.len() == 1 && terms[0].0 == Complex64::ONE {
                fold_trivial_plus(terms.pop().unwrap().1)
            } else {
                TreeNode::Plus {
                    terms: terms
                        .into_iter()
                        .map(|(w, c)| (w, fold_trivial_plus(c)))
                        .collect(),
                }
            }
        }
        TreeNode::Tensor { children } => TreeNode::Tensor {
            children: children.into_iter().map(fold_trivial_plus).collect(),
        },
    }
}

/// Draws a random valid tree over all of `1..=n`, for property tests and
/// fuzz-style checks. Leaf amplitudes are generic (bounded away from zero)
/// and plus weights are generic nonzero complex numbers.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> StateTree {
    let support: Vec<usize> = (1..=n).collect();
    let root = random_node(&support, rng, 0);
    StateTree::new(n, root)
}

fn random_leaf(qubit: usize, rng: &mut impl Rng) -> TreeNode {
    loop {
        let a0 = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let a1 = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if a0.norm() + a1.norm() > 1e-3 {
            return TreeNode::leaf(qubit, a0, a1);
        }
    }
}

fn random_weight(rng: &mut impl Rng) -> Complex64 {
    loop {
        let w = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if w.norm() > 1e-3 {
            return w;
        }
    }
}

fn random_node(support: &[usize], rng: &mut impl Rng, depth: usize) -> TreeNode {
    if support.len() == 1 {
        return random_leaf(support[0], rng);
    }
    // Deep recursion tapers off into plain products.
    let allow_plus = depth < 3;
    if allow_plus && rng.gen_bool(0.4) {
        let arity = rng.gen_range(2..=3);
        let terms = (0..arity)
            .map(|_| (random_weight(rng), random_node(support, rng, depth + 1)))
            .collect();
        TreeNode::Plus { terms }
    } else {
        let mut shuffled = support.to_vec();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let blocks = rng.gen_range(2..=shuffled.len().min(3));
        let mut children = Vec::new();
        let mut start = 0;
        for b in 0..blocks {
            let remaining = shuffled.len() - start;
            let blocks_left = blocks - b;
            let take = if blocks_left == 1 {
                remaining
            } else {
                rng.gen_range(1..=remaining - (blocks_left - 1))
            };
            let mut block = shuffled[start..start + take].to_vec();
            block.sort_unstable();
            children.push(random_node(&block, rng, depth + 1));
            start += take;
        }
        TreeNode::Tensor { children }
    }
}
