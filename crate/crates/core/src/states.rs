//! Benchmark states and explicit tree decompositions.
//!
//! The immanant family lives on `n = m²` qubits arranged as an m×m grid:
//! qubit `(i−1)·m + j` holds matrix entry `(i, j)`, and the amplitude of a
//! basis string is the determinant / permanent / immanant of the (0,1)
//! matrix it spells out. Three routes to those states are provided — the
//! minor-expansion (Laplace) tree, the permutation-sum (Leibnitz) tree, and
//! the brute-force dense vector — and the test suites require all three to
//! agree.

use num_complex::Complex64;

use crate::dense::DenseState;
use crate::matrices::ZeroOneMatrix;
use crate::perm::{lex_permutations, SignFunction};
use crate::tree::{StateTree, TreeNode};
use crate::{c64, mps, Error, Result, PRUNE_TOL};

/// Default cap on the m!-term Leibnitz tree construction.
pub const LEIBNITZ_BUDGET: usize = 6;
/// Cap on dense immanant-state vectors (`m² ≤ 16` qubits).
pub const DENSE_GRID_BUDGET: usize = 16;

/// Square arrangement of `m²` qubits: qubit `(i−1)·m + j` sits at row `i`,
/// column `j` (all 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitGrid {
    m: usize,
}

impl QubitGrid {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.m * self.m
    }

    pub fn qubit(&self, row: usize, col: usize) -> usize {
        debug_assert!(row >= 1 && row <= self.m && col >= 1 && col <= self.m);
        (row - 1) * self.m + col
    }

    pub fn position(&self, qubit: usize) -> (usize, usize) {
        debug_assert!(qubit >= 1 && qubit <= self.n());
        ((qubit - 1) / self.m + 1, (qubit - 1) % self.m + 1)
    }
}

/// The built-in benchmark families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedKind {
    Ghz,
    W,
    ClusterChain,
}

impl NamedKind {
    pub fn name(&self) -> &'static str {
        match self {
            NamedKind::Ghz => "ghz",
            NamedKind::W => "w",
            NamedKind::ClusterChain => "cluster_chain",
        }
    }
}

/// Builds the named state as a tree together with an independently
/// constructed dense reference; the two agree up to normalization.
///
/// Leaf counts: GHZ has `2n`, W has `T(n) = T(n−1) + n + 1` with `T(1) = 1`
/// (the recursion `W_n = |0⟩W_{n−1} + |1⟩|0…0⟩`), and the cluster chain is
/// compiled from its bond-dimension-2 matrix product form.
pub fn named_state(kind: NamedKind, n: usize) -> Result<(StateTree, DenseState)> {
    if n < 2 {
        return Err(Error::BadQubitCount {
            constraint: "n ≥ 2",
            got: n,
        });
    }
    match kind {
        NamedKind::Ghz => {
            let tree = StateTree::new(
                n,
                TreeNode::sum(vec![
                    TreeNode::tensor((1..=n).map(|q| TreeNode::basis_leaf(q, 0)).collect()),
                    TreeNode::tensor((1..=n).map(|q| TreeNode::basis_leaf(q, 1)).collect()),
                ]),
            );
            let mut dense = DenseState::zero(n);
            dense.amps_mut()[0] = Complex64::ONE;
            dense.amps_mut()[(1 << n) - 1] = Complex64::ONE;
            Ok((tree, dense))
        }
        NamedKind::W => {
            let qubits: Vec<usize> = (1..=n).collect();
            let tree = StateTree::new(n, w_node(&qubits));
            let dense = DenseState::from_fn(n, |idx| {
                if idx.count_ones() == 1 {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            });
            Ok((tree, dense))
        }
        NamedKind::ClusterChain => {
            let tree = mps::cluster_mps(n)?.compile_to_tree()?;
            Ok((tree, cluster_chain_state(n)?))
        }
    }
}

fn w_node(qubits: &[usize]) -> TreeNode {
    if qubits.len() == 1 {
        return TreeNode::basis_leaf(qubits[0], 1);
    }
    let mut excited_first = vec![TreeNode::basis_leaf(qubits[0], 1)];
    excited_first.extend(qubits[1..].iter().map(|&q| TreeNode::basis_leaf(q, 0)));
    TreeNode::sum(vec![
        TreeNode::tensor(vec![TreeNode::basis_leaf(qubits[0], 0), w_node(&qubits[1..])]),
        TreeNode::tensor(excited_first),
    ])
}

/// The CZ-chain cluster state built by circuit simulation: start from
/// `|+⟩^n` and apply CZ to each neighboring pair. Serves as the oracle the
/// matrix-product construction is checked against.
pub fn cluster_chain_state(n: usize) -> Result<DenseState> {
    if n < 2 {
        return Err(Error::BadQubitCount {
            constraint: "n ≥ 2",
            got: n,
        });
    }
    let mut state = DenseState::from_fn(n, |_| Complex64::ONE);
    for q in 1..n {
        for idx in 0..1usize << n {
            if (idx >> (n - q)) & 1 == 1 && (idx >> (n - q - 1)) & 1 == 1 {
                state.amps_mut()[idx] = -state.amps_mut()[idx];
            }
        }
    }
    Ok(state)
}

/// One `+` gate over all nonzero computational-basis terms; each term is a
/// product of basis leaves, so the leaf count is `n × (#nonzero terms)`.
pub fn basis_expansion_tree(state: &DenseState) -> Result<StateTree> {
    let n = state.n();
    let support = state.support_indices(1e-12);
    if support.is_empty() {
        return Err(Error::ZeroState);
    }
    let term = |idx: usize, weight: Complex64| -> TreeNode {
        let leaves: Vec<TreeNode> = (1..=n)
            .map(|q| {
                let bit = state.bit(idx, q);
                if q == 1 {
                    // Fold the amplitude into the first leaf so single-term
                    // states need no + gate.
                    if bit == 0 {
                        TreeNode::leaf(q, weight, Complex64::ZERO)
                    } else {
                        TreeNode::leaf(q, Complex64::ZERO, weight)
                    }
                } else {
                    TreeNode::basis_leaf(q, bit)
                }
            })
            .collect();
        if leaves.len() == 1 {
            leaves.into_iter().next().unwrap()
        } else {
            TreeNode::tensor(leaves)
        }
    };
    let root = if support.len() == 1 {
        term(support[0], state.amp(support[0]))
    } else {
        TreeNode::sum(
            support
                .iter()
                .map(|&idx| term(idx, state.amp(idx)))
                .collect(),
        )
    };
    Ok(StateTree::new(n, root))
}

/// Recursive `|0⟩|χ₀⟩ + |1⟩|χ₁⟩` splitting on the leading qubit, with zero
/// branches pruned. The leaf count obeys `B_n = 2(B_{n−1} + 1)` when no
/// branch vanishes, i.e. at most `3·2^(n−1) − 2`.
pub fn split_decomposition_tree(state: &DenseState) -> Result<StateTree> {
    let normalized = state.normalized()?;
    let qubits: Vec<usize> = (1..=state.n()).collect();
    match split_node(&qubits, normalized.amps()) {
        Some(root) => Ok(StateTree::new(state.n(), root)),
        None => Err(Error::ZeroState),
    }
}

fn split_node(qubits: &[usize], amps: &[Complex64]) -> Option<TreeNode> {
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr.sqrt() < PRUNE_TOL {
        return None;
    }
    if qubits.len() == 1 {
        return Some(TreeNode::leaf(qubits[0], amps[0], amps[1]));
    }
    let q = qubits[0];
    let half = amps.len() / 2;
    let low = split_node(&qubits[1..], &amps[..half]);
    let high = split_node(&qubits[1..], &amps[half..]);
    match (low, high) {
        (Some(t0), Some(t1)) => Some(TreeNode::sum(vec![
            TreeNode::tensor(vec![TreeNode::basis_leaf(q, 0), t0]),
            TreeNode::tensor(vec![TreeNode::basis_leaf(q, 1), t1]),
        ])),
        (Some(t0), None) => Some(TreeNode::tensor(vec![TreeNode::basis_leaf(q, 0), t0])),
        (None, Some(t1)) => Some(TreeNode::tensor(vec![TreeNode::basis_leaf(q, 1), t1])),
        (None, None) => None,
    }
}

/// Minor-expansion tree for `|det_m⟩` / `|per_m⟩`, expanding along the first
/// active row: `Σ_j ±|1⟩_(1,j) |det_{m−1}⟩_(1,j) |+⟩^(2m−2)`. The leaf count
/// is exactly `S_m` with `S_m = m(S_{m−1} + 2m − 1)`, `S₁ = 1`.
pub fn immanant_state_laplace_tree(m: usize, sign: &SignFunction) -> Result<StateTree> {
    if m == 0 {
        return Err(Error::BadQubitCount {
            constraint: "m ≥ 1",
            got: 0,
        });
    }
    let alternate = match sign {
        SignFunction::Determinant => true,
        SignFunction::Permanent => false,
        SignFunction::Custom(_) => {
            return Err(Error::InvalidArgument(
                "minor expansion only applies to the determinant and permanent kinds".to_string(),
            ))
        }
    };
    let grid = QubitGrid::new(m);
    let rows: Vec<usize> = (1..=m).collect();
    let cols: Vec<usize> = (1..=m).collect();
    Ok(StateTree::new(
        grid.n(),
        laplace_node(&rows, &cols, &grid, alternate),
    ))
}

fn laplace_node(rows: &[usize], cols: &[usize], grid: &QubitGrid, alternate: bool) -> TreeNode {
    let k = rows.len();
    if k == 1 {
        return TreeNode::basis_leaf(grid.qubit(rows[0], cols[0]), 1);
    }
    let terms = cols
        .iter()
        .enumerate()
        .map(|(jpos, &col)| {
            // Sign (−1)^(1+j) for expansion along the first active row.
            let weight = if alternate && jpos % 2 == 1 {
                c64(-1.0, 0.0)
            } else {
                Complex64::ONE
            };
            let mut children = vec![TreeNode::basis_leaf(grid.qubit(rows[0], col), 1)];
            let sub_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| c != col)
                .collect();
            children.push(laplace_node(&rows[1..], &sub_cols, grid, alternate));
            // Crossed-out row and column become |+⟩ leaves.
            for &c in &sub_cols {
                children.push(TreeNode::plus_leaf(grid.qubit(rows[0], c)));
            }
            for &r in &rows[1..] {
                children.push(TreeNode::plus_leaf(grid.qubit(r, col)));
            }
            (weight, TreeNode::tensor(children))
        })
        .collect();
    TreeNode::plus(terms)
}

/// Permutation-sum tree: one product term per permutation σ with weight
/// c(σ), placing `|1⟩` at positions `(i, σ_i)` and `|+⟩` elsewhere. Exactly
/// `m!·m²` leaves. Budgeted to `m ≤ 6` unless `allow_large` is set.
pub fn immanant_state_leibnitz_tree(
    m: usize,
    sign: &SignFunction,
    allow_large: bool,
) -> Result<StateTree> {
    if m == 0 {
        return Err(Error::BadQubitCount {
            constraint: "m ≥ 1",
            got: 0,
        });
    }
    if m > LEIBNITZ_BUDGET && !allow_large {
        return Err(Error::Budget(format!(
            "m = {m} exceeds the m! term budget m ≤ {LEIBNITZ_BUDGET}; pass the override to proceed"
        )));
    }
    sign.validate_for(m)?;
    let grid = QubitGrid::new(m);
    if m == 1 {
        // Single term |1⟩ with its coefficient folded into the leaf.
        let c = sign.coefficient(&[1]);
        return Ok(StateTree::new(1, TreeNode::leaf(1, Complex64::ZERO, c)));
    }
    let terms = lex_permutations(m)
        .into_iter()
        .map(|perm| {
            let weight = sign.coefficient(&perm);
            let leaves = (1..=m)
                .flat_map(|i| {
                    let target = perm[i - 1];
                    (1..=m).map(move |j| (i, j, target))
                })
                .map(|(i, j, target)| {
                    if j == target {
                        TreeNode::basis_leaf(grid.qubit(i, j), 1)
                    } else {
                        TreeNode::plus_leaf(grid.qubit(i, j))
                    }
                })
                .collect();
            (weight, TreeNode::tensor(leaves))
        })
        .collect();
    Ok(StateTree::new(grid.n(), TreeNode::plus(terms)))
}

/// Brute-force dense immanant state: the amplitude at `|x⟩` is the immanant
/// of the (0,1) matrix spelled by `x`, evaluated matrix by matrix.
pub fn immanant_state_vector(m: usize, sign: &SignFunction) -> Result<DenseState> {
    if m == 0 {
        return Err(Error::BadQubitCount {
            constraint: "m ≥ 1",
            got: 0,
        });
    }
    let n = m * m;
    if n > DENSE_GRID_BUDGET {
        return Err(Error::Budget(format!(
            "m² = {n} qubits exceeds the dense budget of {DENSE_GRID_BUDGET}"
        )));
    }
    sign.validate_for(m)?;
    let mut state = DenseState::zero(n);
    for idx in 0..1usize << n {
        let mat = ZeroOneMatrix::from_index(m, idx as u64);
        state.amps_mut()[idx] = mat.immanant(sign)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn det2_reference() -> DenseState {
        // Frozen from the exhaustive 2×2 oracle (see matrices tests).
        let mut s = DenseState::zero(4);
        for idx in [0b1001, 0b1011, 0b1101] {
            s.amps_mut()[idx] = Complex64::ONE;
        }
        for idx in [0b0110, 0b0111, 0b1110] {
            s.amps_mut()[idx] = c64(-1.0, 0.0);
        }
        s
    }

    #[test]
    fn grid_mapping_is_a_bijection() {
        let grid = QubitGrid::new(3);
        let mut seen = vec![false; 9];
        for i in 1..=3 {
            for j in 1..=3 {
                let q = grid.qubit(i, j);
                assert!(!seen[q - 1]);
                seen[q - 1] = true;
                assert_eq!(grid.position(q), (i, j));
            }
        }
    }

    #[test]
    fn ghz3_tree_and_reference_agree() {
        let (tree, dense) = named_state(NamedKind::Ghz, 3).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 6);
        assert!(tree.evaluate().unwrap().proportional_to(&dense, 1e-9));
        let amps = tree.evaluate().unwrap();
        for idx in 1..7 {
            assert!(amps.amp(idx).norm() < 1e-12);
        }
    }

    #[test]
    fn w_tree_leaf_counts_follow_the_recursion() {
        // T(n) = T(n−1) + n + 1, T(1) = 1.
        let mut expected = 1usize;
        for n in 2..=6 {
            expected += n + 1;
            let (tree, dense) = named_state(NamedKind::W, n).unwrap();
            assert_eq!(tree.leaf_count().unwrap(), expected, "n={n}");
            assert!(tree.evaluate().unwrap().proportional_to(&dense, 1e-9));
        }
    }

    #[test]
    fn cluster_chain_tree_matches_cz_circuit() {
        for n in [2, 3, 4] {
            let (tree, dense) = named_state(NamedKind::ClusterChain, n).unwrap();
            assert!(tree.evaluate().unwrap().proportional_to(&dense, 1e-9));
        }
    }

    #[test]
    fn named_state_rejects_tiny_registers() {
        assert!(named_state(NamedKind::Ghz, 1).is_err());
    }

    #[test]
    fn basis_expansion_counts() {
        // |det₂⟩ has 6 nonzero terms → 24 leaves.
        let tree = basis_expansion_tree(&det2_reference()).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 24);
        assert!(tree
            .evaluate()
            .unwrap()
            .proportional_to(&det2_reference(), 1e-9));

        // A single basis term needs no + gate: 4 leaves.
        let product = DenseState::basis(4, 0b0110);
        let tree = basis_expansion_tree(&product).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 4);
        assert!(tree.evaluate().unwrap().proportional_to(&product, 1e-9));

        // The uniform 2-qubit state expands to 8 leaves even though |+⟩|+⟩
        // has size 2.
        let uniform = DenseState::from_fn(2, |_| Complex64::ONE);
        let tree = basis_expansion_tree(&uniform).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 8);
        let compact = StateTree::new(
            2,
            TreeNode::tensor(vec![TreeNode::plus_leaf(1), TreeNode::plus_leaf(2)]),
        );
        assert_eq!(compact.leaf_count().unwrap(), 2);
        assert!(compact.evaluate().unwrap().proportional_to(&uniform, 1e-9));
    }

    #[test]
    fn basis_expansion_rejects_zero_states() {
        assert!(matches!(
            basis_expansion_tree(&DenseState::zero(2)),
            Err(Error::ZeroState)
        ));
    }

    #[test]
    fn split_decomposition_on_generic_states_saturates_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=5usize {
            let state = DenseState::random(n, &mut rng);
            let tree = split_decomposition_tree(&state).unwrap();
            assert_eq!(tree.leaf_count().unwrap(), 3 * (1 << (n - 1)) - 2, "n={n}");
            assert!(tree.evaluate().unwrap().proportional_to(&state, 1e-9));
        }
    }

    #[test]
    fn split_decomposition_prunes_ghz4_to_eight_leaves() {
        let (_, ghz4) = named_state(NamedKind::Ghz, 4).unwrap();
        let tree = split_decomposition_tree(&ghz4).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 8);
        assert!(tree.evaluate().unwrap().proportional_to(&ghz4, 1e-9));
    }

    #[test]
    fn split_decomposition_single_qubit_is_one_leaf() {
        let s = DenseState::from_fn(1, |i| c64(1.0 + i as f64, -0.5));
        let tree = split_decomposition_tree(&s).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 1);
        assert!(tree.evaluate().unwrap().proportional_to(&s, 1e-9));
    }

    #[test]
    fn laplace_tree_matches_the_paper_m2_form() {
        let tree = immanant_state_laplace_tree(2, &SignFunction::Determinant).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 8);
        // |1⟩|+⟩|+⟩|1⟩ − |+⟩|1⟩|1⟩|+⟩
        let expect = det2_reference();
        assert!(tree.evaluate().unwrap().proportional_to(&expect, 1e-9));
    }

    #[test]
    fn laplace_leaf_counts_follow_s_recursion() {
        let mut s = 1usize;
        for m in 2..=4usize {
            s = m * (s + 2 * m - 1);
            let tree = immanant_state_laplace_tree(m, &SignFunction::Determinant).unwrap();
            assert_eq!(tree.leaf_count().unwrap(), s, "m={m}");
        }
    }

    #[test]
    fn laplace_m3_amplitude_at_odd_permutation_is_minus_one() {
        let tree = immanant_state_laplace_tree(3, &SignFunction::Determinant).unwrap();
        let state = tree.evaluate().unwrap();
        // Permutation matrix of σ = (2,1,3): ones at (1,2), (2,1), (3,3).
        let grid = QubitGrid::new(3);
        let mut idx = 0usize;
        for (row, col) in [(1, 2), (2, 1), (3, 3)] {
            idx |= 1 << (9 - grid.qubit(row, col));
        }
        assert!((state.amp(idx) - c64(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn laplace_rejects_custom_signs() {
        let mut map = HashMap::new();
        map.insert(vec![1], Complex64::ONE);
        let sf = SignFunction::custom(map).unwrap();
        assert!(immanant_state_laplace_tree(2, &sf).is_err());
    }

    #[test]
    fn leibnitz_tree_m1_is_a_single_leaf() {
        let tree = immanant_state_leibnitz_tree(1, &SignFunction::Determinant, false).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 1);
        let s = tree.evaluate().unwrap();
        assert!(s.amp(0).norm() < 1e-12);
        assert!((s.amp(1) - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn leibnitz_and_laplace_agree_for_both_kinds() {
        for sign in [SignFunction::Determinant, SignFunction::Permanent] {
            for m in 1..=3usize {
                let a = immanant_state_leibnitz_tree(m, &sign, false)
                    .unwrap()
                    .evaluate()
                    .unwrap();
                let b = immanant_state_laplace_tree(m, &sign)
                    .unwrap()
                    .evaluate()
                    .unwrap();
                assert!(a.proportional_to(&b, 1e-9), "m={m} {}", sign.name());
            }
        }
    }

    #[test]
    fn leibnitz_leaf_count_is_factorial_times_grid() {
        for m in 2..=3usize {
            let tree = immanant_state_leibnitz_tree(m, &SignFunction::Permanent, false).unwrap();
            let factorial: usize = (1..=m).product();
            assert_eq!(tree.leaf_count().unwrap(), factorial * m * m);
        }
    }

    #[test]
    fn leibnitz_budget_is_enforced() {
        assert!(matches!(
            immanant_state_leibnitz_tree(7, &SignFunction::Permanent, false),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn permanent_m2_amplitudes() {
        let tree = immanant_state_leibnitz_tree(2, &SignFunction::Permanent, false).unwrap();
        let state = tree.evaluate().unwrap();
        // per = ad + bc: +1 on the six single-product patterns, +2 on 1111.
        let scale = state.amp(0b1001);
        for idx in [0b1001, 0b0110, 0b1011, 0b1101, 0b0111, 0b1110] {
            assert!((state.amp(idx) - scale).norm() < 1e-9, "idx {idx:04b}");
        }
        assert!((state.amp(0b1111) - scale * 2.0).norm() < 1e-9);
        assert!(state.amp(0b0000).norm() < 1e-9);
    }

    #[test]
    fn vector_oracle_matches_trees_and_handles_custom() {
        let det = immanant_state_vector(2, &SignFunction::Determinant).unwrap();
        assert!(det.proportional_to(&det2_reference(), 1e-12));

        let m1 = immanant_state_vector(1, &SignFunction::Determinant).unwrap();
        assert!(m1.amp(0).norm() < 1e-12);
        assert!((m1.amp(1) - Complex64::ONE).norm() < 1e-12);

        // Custom all-ones coefficients coincide with the permanent.
        let map: HashMap<Vec<usize>, Complex64> = lex_permutations(2)
            .into_iter()
            .map(|p| (p, Complex64::ONE))
            .collect();
        let custom = SignFunction::custom(map).unwrap();
        let a = immanant_state_vector(2, &custom).unwrap();
        let b = immanant_state_vector(2, &SignFunction::Permanent).unwrap();
        for (x, y) in a.amps().iter().zip(b.amps()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn vector_budget_is_enforced() {
        assert!(matches!(
            immanant_state_vector(5, &SignFunction::Determinant),
            Err(Error::Budget(_))
        ));
    }
}
