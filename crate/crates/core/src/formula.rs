//! Multilinear formulas for the coefficient function of a state.
//!
//! A state tree turns into a binary `{+, ×}` tree over variables `x_i` and
//! complex constants by substituting `|0⟩_i → 1 − x_i` and `|1⟩_i → x_i`:
//! the resulting formula evaluates to the amplitude `α_x` at every bit
//! string `x`. Leaves of the same qubit combine their constants, so a leaf
//! `α|0⟩ + β|1⟩` compiles to the affine form `α + (β−α)·x_i` (at most three
//! formula leaves); apart from that and `Constant op Constant` folding, no
//! simplification is attempted — shrinking multilinear formulas is exactly
//! the hard problem.
//!
//! Size is the number of leaf vertices, constants included.

use num_complex::Complex64;
use std::fmt;

use crate::tree::{StateTree, TreeNode};
use crate::{Error, Result};

/// One vertex of a binary formula tree.
#[derive(Debug, Clone, PartialEq)]
pub enum FormulaNode {
    /// The variable `x_i` for qubit `i` (1-based).
    Var(usize),
    Const(Complex64),
    Add(Box<FormulaNode>, Box<FormulaNode>),
    Mul(Box<FormulaNode>, Box<FormulaNode>),
}

/// A binary `{+, ×}` tree in which no product joins two subformulas sharing
/// a variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearFormula {
    root: FormulaNode,
}

impl MultilinearFormula {
    pub fn new(root: FormulaNode) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &FormulaNode {
        &self.root
    }

    /// Number of leaf vertices (variables and constants).
    pub fn size(&self) -> usize {
        count_leaves(&self.root)
    }

    /// Evaluates at a bit string (`bits[i]` is `x_{i+1}`).
    pub fn evaluate(&self, bits: &[u8]) -> Result<Complex64> {
        eval(&self.root, bits)
    }

    /// Mask of variables appearing in the formula (bit `i−1` for `x_i`).
    pub fn variables(&self) -> u64 {
        vars(&self.root)
    }

    /// True when every `×` node joins variable-disjoint operands.
    pub fn is_multilinear(&self) -> bool {
        multilinear_mask(&self.root).is_some()
    }
}

impl fmt::Display for MultilinearFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_infix(&self.root, f)
    }
}

fn count_leaves(node: &FormulaNode) -> usize {
    match node {
        FormulaNode::Var(_) | FormulaNode::Const(_) => 1,
        FormulaNode::Add(l, r) | FormulaNode::Mul(l, r) => count_leaves(l) + count_leaves(r),
    }
}

fn eval(node: &FormulaNode, bits: &[u8]) -> Result<Complex64> {
    match node {
        FormulaNode::Var(i) => {
            if *i == 0 || *i > bits.len() {
                return Err(Error::InvalidArgument(format!(
                    "variable x{} out of range for a {}-bit input",
                    i,
                    bits.len()
                )));
            }
            Ok(Complex64::new((bits[*i - 1] & 1) as f64, 0.0))
        }
        FormulaNode::Const(c) => Ok(*c),
        FormulaNode::Add(l, r) => Ok(eval(l, bits)? + eval(r, bits)?),
        FormulaNode::Mul(l, r) => Ok(eval(l, bits)? * eval(r, bits)?),
    }
}

fn vars(node: &FormulaNode) -> u64 {
    match node {
        FormulaNode::Var(i) => 1u64 << (i - 1),
        FormulaNode::Const(_) => 0,
        FormulaNode::Add(l, r) | FormulaNode::Mul(l, r) => vars(l) | vars(r),
    }
}

fn multilinear_mask(node: &FormulaNode) -> Option<u64> {
    match node {
        FormulaNode::Var(i) => Some(1u64 << (i - 1)),
        FormulaNode::Const(_) => Some(0),
        FormulaNode::Add(l, r) => Some(multilinear_mask(l)? | multilinear_mask(r)?),
        FormulaNode::Mul(l, r) => {
            let (lm, rm) = (multilinear_mask(l)?, multilinear_mask(r)?);
            if lm & rm != 0 {
                None
            } else {
                Some(lm | rm)
            }
        }
    }
}

fn write_infix(node: &FormulaNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        FormulaNode::Var(i) => write!(f, "x{i}"),
        FormulaNode::Const(c) => {
            if c.im == 0.0 {
                write!(f, "{}", c.re)
            } else {
                write!(f, "({}{}{}i)", c.re, if c.im < 0.0 { "-" } else { "+" }, c.im.abs())
            }
        }
        FormulaNode::Add(l, r) => {
            write!(f, "(")?;
            write_infix(l, f)?;
            write!(f, " + ")?;
            write_infix(r, f)?;
            write!(f, ")")
        }
        FormulaNode::Mul(l, r) => {
            write!(f, "(")?;
            write_infix(l, f)?;
            write!(f, " * ")?;
            write_infix(r, f)?;
            write!(f, ")")
        }
    }
}

/// Compiles a valid state tree into a multilinear formula computing its
/// amplitudes: leaves become affine forms in their variable, `⊗` gates
/// become left-folded binary `×` chains, and `+` gates become binary `+`
/// chains with non-unit weights attached as `Constant ×` factors.
pub fn from_tree(tree: &StateTree) -> Result<MultilinearFormula> {
    let report = tree.validate();
    if !report.ok() {
        return Err(Error::InvalidTree(report));
    }
    Ok(MultilinearFormula::new(fold_constants(node_formula(
        tree.root(),
    ))))
}

fn node_formula(node: &TreeNode) -> FormulaNode {
    match node {
        TreeNode::Leaf { qubit, amp0, amp1 } => leaf_formula(*qubit, *amp0, *amp1),
        TreeNode::Tensor { children } => children
            .iter()
            .map(node_formula)
            .reduce(|acc, c| FormulaNode::Mul(Box::new(acc), Box::new(c)))
            .expect("validated tensor has children"),
        TreeNode::Plus { terms } => terms
            .iter()
            .map(|(w, c)| {
                let child = node_formula(c);
                if *w == Complex64::ONE {
                    child
                } else {
                    FormulaNode::Mul(Box::new(FormulaNode::Const(*w)), Box::new(child))
                }
            })
            .reduce(|acc, c| FormulaNode::Add(Box::new(acc), Box::new(c)))
            .expect("validated plus has children"),
    }
}

/// `α(1−x) + βx` with the constants combined: `α + (β−α)x`.
fn leaf_formula(qubit: usize, amp0: Complex64, amp1: Complex64) -> FormulaNode {
    let slope = amp1 - amp0;
    let var = FormulaNode::Var(qubit);
    if slope == Complex64::ZERO {
        return FormulaNode::Const(amp0);
    }
    let linear = if slope == Complex64::ONE {
        var
    } else {
        FormulaNode::Mul(Box::new(FormulaNode::Const(slope)), Box::new(var))
    };
    if amp0 == Complex64::ZERO {
        linear
    } else {
        FormulaNode::Add(Box::new(FormulaNode::Const(amp0)), Box::new(linear))
    }
}

fn fold_constants(node: FormulaNode) -> FormulaNode {
    match node {
        FormulaNode::Var(_) | FormulaNode::Const(_) => node,
        FormulaNode::Add(l, r) => {
            let (l, r) = (fold_constants(*l), fold_constants(*r));
            if let (FormulaNode::Const(a), FormulaNode::Const(b)) = (&l, &r) {
                FormulaNode::Const(a + b)
            } else {
                FormulaNode::Add(Box::new(l), Box::new(r))
            }
        }
        FormulaNode::Mul(l, r) => {
            let (l, r) = (fold_constants(*l), fold_constants(*r));
            if let (FormulaNode::Const(a), FormulaNode::Const(b)) = (&l, &r) {
                FormulaNode::Const(a * b)
            } else {
                FormulaNode::Mul(Box::new(l), Box::new(r))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::perm::SignFunction;
    use crate::states::{immanant_state_laplace_tree, QubitGrid};
    use crate::tree::random_tree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bell_tree(second_sign: f64) -> StateTree {
        let w = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateTree::new(
            2,
            TreeNode::plus(vec![
                (
                    w,
                    TreeNode::tensor(vec![TreeNode::basis_leaf(1, 0), TreeNode::basis_leaf(2, 0)]),
                ),
                (
                    w * second_sign,
                    TreeNode::tensor(vec![TreeNode::basis_leaf(1, 1), TreeNode::basis_leaf(2, 1)]),
                ),
            ]),
        )
    }

    #[test]
    fn bell_formula_computes_the_coefficients() {
        let f = from_tree(&bell_tree(1.0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.evaluate(&[0, 0]).unwrap() - c64(r, 0.0)).norm() < 1e-12);
        assert!(f.evaluate(&[0, 1]).unwrap().norm() < 1e-12);
        assert!(f.evaluate(&[1, 0]).unwrap().norm() < 1e-12);
        assert!((f.evaluate(&[1, 1]).unwrap() - c64(r, 0.0)).norm() < 1e-12);
        assert!(f.is_multilinear());
    }

    #[test]
    fn bell_formula_size_regression() {
        // Two weight constants, two 3-leaf |0⟩ forms, two bare variables.
        assert_eq!(from_tree(&bell_tree(1.0)).unwrap().size(), 10);
        assert_eq!(from_tree(&bell_tree(-1.0)).unwrap().size(), 10);
    }

    #[test]
    fn single_zero_leaf_gives_one_minus_x() {
        let t = StateTree::new(1, TreeNode::basis_leaf(1, 0));
        let f = from_tree(&t).unwrap();
        assert!((f.evaluate(&[0]).unwrap() - Complex64::ONE).norm() < 1e-12);
        assert!(f.evaluate(&[1]).unwrap().norm() < 1e-12);
        assert_eq!(f.size(), 3);
    }

    #[test]
    fn constant_formula_evaluates_to_itself() {
        let f = MultilinearFormula::new(FormulaNode::Const(c64(2.0, -1.0)));
        assert_eq!(f.size(), 1);
        assert_eq!(f.evaluate(&[1, 0]).unwrap(), c64(2.0, -1.0));
    }

    #[test]
    fn out_of_range_variable_is_an_error() {
        let f = MultilinearFormula::new(FormulaNode::Var(3));
        assert!(f.evaluate(&[0, 1]).is_err());
    }

    #[test]
    fn det3_formula_at_the_identity_matrix_is_one() {
        let tree = immanant_state_laplace_tree(3, &SignFunction::Determinant).unwrap();
        let f = from_tree(&tree).unwrap();
        let grid = QubitGrid::new(3);
        let mut bits = vec![0u8; 9];
        for d in 1..=3 {
            bits[grid.qubit(d, d) - 1] = 1;
        }
        assert!((f.evaluate(&bits).unwrap() - Complex64::ONE).norm() < 1e-9);
    }

    #[test]
    fn formula_matches_amplitudes_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let n = rng.gen_range(1..=5);
            let tree = random_tree(n, &mut rng);
            let state = tree.evaluate().unwrap();
            let f = from_tree(&tree).unwrap();
            assert!(f.is_multilinear());
            let scale = state.norm().max(1.0);
            for idx in 0..1usize << n {
                let bits: Vec<u8> = (1..=n).map(|q| state.bit(idx, q) as u8).collect();
                let value = f.evaluate(&bits).unwrap();
                assert!(
                    (value - state.amp(idx)).norm() / scale < 1e-9,
                    "n={n} idx={idx}"
                );
            }
        }
    }

    #[test]
    fn formula_size_is_structurally_bounded_by_the_tree_size() {
        // Each qubit leaf costs at most 3 formula leaves and each weighted
        // plus edge at most 1 constant; a tree with L leaves has at most
        // 2(L−1) plus edges, so size ≤ 3L + 2(L−1).
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let tree = random_tree(n, &mut rng);
            let leaves = tree.leaf_count().unwrap();
            let f = from_tree(&tree).unwrap();
            assert!(
                f.size() <= 3 * leaves + 2 * (leaves - 1).max(0),
                "size {} vs {} leaves",
                f.size(),
                leaves
            );
        }
    }

    #[test]
    fn plus_leaf_collapses_to_a_constant() {
        let t = StateTree::new(1, TreeNode::plus_leaf(1));
        let f = from_tree(&t).unwrap();
        assert_eq!(f.size(), 1);
        assert_eq!(f.evaluate(&[0]).unwrap(), Complex64::ONE);
        assert_eq!(f.evaluate(&[1]).unwrap(), Complex64::ONE);
    }
}
