//! Open-boundary matrix product states and their compilation to trees.
//!
//! A state `⊗_i (A₀^(i)|0⟩ + A₁^(i)|1⟩)` with `D_i × D_{i+1}` matrices and
//! `D₁ = D_{n+1} = 1` contracts, per basis string, to the scalar product of
//! the selected matrices taken in site order. Splitting the chain by an
//! identity insertion `I = Σ_s e_s e_sᵀ` turns the state into a `+` gate
//! over `D` tensor pairs and, applied recursively, yields a rooted tree with
//! at most `(2D)^(⌊log₂ n⌋+1)` leaves.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseState;
use crate::tree::{StateTree, TreeNode};
use crate::{Error, Result, PRUNE_TOL};

/// Largest chain contracted to a dense vector.
pub const CONTRACT_BUDGET: usize = 20;

/// The two matrices of one site.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsSite {
    pub a0: DMatrix<Complex64>,
    pub a1: DMatrix<Complex64>,
}

/// A matrix product state with open boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mps {
    sites: Vec<MpsSite>,
}

impl Mps {
    /// Validates shape compatibility: `a0`/`a1` agree per site, adjacent
    /// sites chain, and the boundary dimensions are 1.
    pub fn new(sites: Vec<MpsSite>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::BadMps("no sites".to_string()));
        }
        for (i, site) in sites.iter().enumerate() {
            if site.a0.shape() != site.a1.shape() {
                return Err(Error::BadMps(format!(
                    "site {}: a0 is {:?} but a1 is {:?}",
                    i + 1,
                    site.a0.shape(),
                    site.a1.shape()
                )));
            }
        }
        if sites[0].a0.nrows() != 1 {
            return Err(Error::BadMps(format!(
                "first site must have 1 row, has {}",
                sites[0].a0.nrows()
            )));
        }
        if sites[sites.len() - 1].a0.ncols() != 1 {
            return Err(Error::BadMps(format!(
                "last site must have 1 column, has {}",
                sites[sites.len() - 1].a0.ncols()
            )));
        }
        for i in 0..sites.len() - 1 {
            if sites[i].a0.ncols() != sites[i + 1].a0.nrows() {
                return Err(Error::BadMps(format!(
                    "bond mismatch between sites {} and {}: {} columns vs {} rows",
                    i + 1,
                    i + 2,
                    sites[i].a0.ncols(),
                    sites[i + 1].a0.nrows()
                )));
            }
        }
        Ok(Self { sites })
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[MpsSite] {
        &self.sites
    }

    /// Bond dimensions `D₁..D_{n+1}` (both boundaries are 1).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.sites[0].a0.nrows()];
        dims.extend(self.sites.iter().map(|s| s.a0.ncols()));
        dims
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Upper bound `(2D)^(⌊log₂ n⌋+1)` on the compiled leaf count, with
    /// `D = max D_i`.
    pub fn leaf_bound(&self) -> usize {
        let two_d = 2 * self.max_bond();
        two_d.pow(self.n().ilog2() + 1)
    }

    /// Contracts to the dense amplitude vector: the amplitude of
    /// `|x₁…x_n⟩` is the 1×1 product `A_{x₁}^(1) ⋯ A_{x_n}^(n)`.
    pub fn contract(&self) -> Result<DenseState> {
        let n = self.n();
        if n > CONTRACT_BUDGET {
            return Err(Error::Budget(format!(
                "n = {n} exceeds the dense contraction budget n ≤ {CONTRACT_BUDGET}"
            )));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n];
        let init = DMatrix::from_element(1, 1, Complex64::ONE);
        self.contract_rec(0, &init, 0, &mut amps);
        DenseState::new(n, amps)
    }

    fn contract_rec(
        &self,
        site: usize,
        acc: &DMatrix<Complex64>,
        prefix: usize,
        amps: &mut [Complex64],
    ) {
        if site == self.sites.len() {
            amps[prefix] = acc[(0, 0)];
            return;
        }
        let s = &self.sites[site];
        self.contract_rec(site + 1, &(acc * &s.a0), prefix << 1, amps);
        self.contract_rec(site + 1, &(acc * &s.a1), (prefix << 1) | 1, amps);
    }

    /// Compiles the chain into a state tree by recursive identity insertion.
    ///
    /// A segment of length `len` splits after its first `2^⌊log₂ len⌋`
    /// sites (after `len/2` when `len` is a power of two), producing a `+`
    /// gate over the bond dimension at the cut. Terms whose left or right
    /// half-state is numerically zero (norm < 1e−12) are dropped; pruning
    /// only removes leaves, so `leaf_count ≤ (2D)^(⌊log₂ n⌋+1)` still holds.
    pub fn compile_to_tree(&self) -> Result<StateTree> {
        let n = self.n();
        let boundary = DMatrix::from_element(1, 1, Complex64::ONE);
        match self.compile_range(0, n - 1, &boundary, &boundary) {
            Some(root) => Ok(StateTree::new(n, root)),
            None => Err(Error::ZeroState),
        }
    }

    fn compile_range(
        &self,
        lo: usize,
        hi: usize,
        left: &DMatrix<Complex64>,
        right: &DMatrix<Complex64>,
    ) -> Option<TreeNode> {
        if self.segment_norm_sqr(lo, hi, left, right) < PRUNE_TOL * PRUNE_TOL {
            return None;
        }
        if lo == hi {
            let site = &self.sites[lo];
            let amp0 = (left * &site.a0 * right)[(0, 0)];
            let amp1 = (left * &site.a1 * right)[(0, 0)];
            return Some(TreeNode::leaf(lo + 1, amp0, amp1));
        }
        let len = hi - lo + 1;
        let split = if len.is_power_of_two() {
            len / 2
        } else {
            1usize << len.ilog2()
        };
        let mid = lo + split;
        let bond = self.sites[mid].a0.nrows();
        let mut terms = Vec::new();
        for s in 0..bond {
            let mut e_col = DMatrix::zeros(bond, 1);
            e_col[(s, 0)] = Complex64::ONE;
            let mut e_row = DMatrix::zeros(1, bond);
            e_row[(0, s)] = Complex64::ONE;
            let left_half = self.compile_range(lo, mid - 1, left, &e_col);
            let right_half = self.compile_range(mid, hi, &e_row, right);
            if let (Some(l), Some(r)) = (left_half, right_half) {
                terms.push((Complex64::ONE, TreeNode::tensor(vec![l, r])));
            }
        }
        match terms.len() {
            0 => None,
            1 => Some(terms.pop().unwrap().1),
            _ => Some(TreeNode::plus(terms)),
        }
    }

    /// Exact squared norm of the boundary-projected segment, computed with
    /// doubled transfer matrices in `O(len·D⁴)` instead of `2^len` terms.
    fn segment_norm_sqr(
        &self,
        lo: usize,
        hi: usize,
        left: &DMatrix<Complex64>,
        right: &DMatrix<Complex64>,
    ) -> f64 {
        let conj = |m: &DMatrix<Complex64>| m.map(|c| c.conj());
        let mut w = left.kronecker(&conj(left));
        for site in &self.sites[lo..=hi] {
            let e = site.a0.kronecker(&conj(&site.a0)) + site.a1.kronecker(&conj(&site.a1));
            w *= e;
        }
        (w * right.kronecker(&conj(right)))[(0, 0)].re
    }
}

/// Bond-dimension-2 chain whose contraction is the CZ-chain cluster state.
///
/// The bond carries the previous site's bit: `A_b` maps carry `c` to carry
/// `b` with weight `(−1)^(c·b)`, so the chain of products accumulates
/// `(−1)^(Σ x_i x_{i+1})` — the cluster-state sign pattern on `|+⟩^n`. The
/// construction is always validated against the CZ circuit in tests rather
/// than trusted.
pub fn cluster_mps(n: usize) -> Result<Mps> {
    if n < 2 {
        return Err(Error::BadQubitCount {
            constraint: "n ≥ 2",
            got: n,
        });
    }
    let one = Complex64::ONE;
    let zero = Complex64::ZERO;
    let first = MpsSite {
        a0: DMatrix::from_row_slice(1, 2, &[one, zero]),
        a1: DMatrix::from_row_slice(1, 2, &[zero, one]),
    };
    let middle = MpsSite {
        a0: DMatrix::from_row_slice(2, 2, &[one, zero, one, zero]),
        a1: DMatrix::from_row_slice(2, 2, &[zero, one, zero, -one]),
    };
    let last = MpsSite {
        a0: DMatrix::from_row_slice(2, 1, &[one, one]),
        a1: DMatrix::from_row_slice(2, 1, &[one, -one]),
    };
    let mut sites = vec![first];
    for _ in 1..n - 1 {
        sites.push(middle.clone());
    }
    sites.push(last);
    Mps::new(sites)
}

/// Deterministic random chain with uniform internal bond dimension `d`;
/// entries are uniform on the complex box `[-1,1] × [-1,1]i`.
pub fn random_mps(n: usize, d: usize, seed: u64) -> Result<Mps> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "need n ≥ 1 sites and bond dimension ≥ 1".to_string(),
        ));
    }
    let mut bonds = Vec::with_capacity(n + 1);
    bonds.push(1);
    for _ in 1..n {
        bonds.push(d);
    }
    bonds.push(1);
    random_mps_with_bonds(&bonds, seed)
}

/// Random chain with explicit per-bond dimensions (`bonds.len() == n + 1`,
/// boundaries must be 1), for exercising site-varying shapes.
pub fn random_mps_with_bonds(bonds: &[usize], seed: u64) -> Result<Mps> {
    if bonds.len() < 2 {
        return Err(Error::BadMps("need at least one site".to_string()));
    }
    if bonds[0] != 1 || bonds[bonds.len() - 1] != 1 {
        return Err(Error::BadMps("boundary bond dimensions must be 1".to_string()));
    }
    if bonds.iter().any(|&d| d == 0) {
        return Err(Error::BadMps("bond dimensions must be positive".to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |rows: usize, cols: usize| {
        DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        })
    };
    let sites = (0..bonds.len() - 1)
        .map(|i| MpsSite {
            a0: draw(bonds[i], bonds[i + 1]),
            a1: draw(bonds[i], bonds[i + 1]),
        })
        .collect();
    Mps::new(sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::cluster_chain_state;

    /// Right-associated contraction, an independent evaluation order.
    fn reference_contract(mps: &Mps) -> Vec<Complex64> {
        let n = mps.n();
        let mut suffix: Vec<DMatrix<Complex64>> =
            vec![DMatrix::from_element(1, 1, Complex64::ONE)];
        for site in mps.sites().iter().rev() {
            let mut next = Vec::with_capacity(suffix.len() * 2);
            for col in &suffix {
                next.push(&site.a0 * col);
            }
            for col in &suffix {
                next.push(&site.a1 * col);
            }
            suffix = next;
        }
        // suffix[b₁·2^(n−1)·… ] — index order: first site's bit varies in
        // the high half because it was processed last.
        (0..1usize << n).map(|x| suffix[x][(0, 0)]).collect()
    }

    #[test]
    fn trivial_product_chain_is_uniform() {
        let scalar = || MpsSite {
            a0: DMatrix::from_element(1, 1, Complex64::ONE),
            a1: DMatrix::from_element(1, 1, Complex64::ONE),
        };
        let mps = Mps::new(vec![scalar(), scalar()]).unwrap();
        let dense = mps.contract().unwrap();
        for i in 0..4 {
            assert!((dense.amp(i) - Complex64::ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn cluster_chain_contraction_matches_cz_circuit() {
        for n in [2, 3, 4, 6] {
            let mps = cluster_mps(n).unwrap();
            let dense = mps.contract().unwrap();
            let oracle = cluster_chain_state(n).unwrap();
            assert!(dense.proportional_to(&oracle, 1e-9), "n={n}");
        }
    }

    #[test]
    fn contraction_orders_agree() {
        let mps = random_mps(6, 3, 42).unwrap();
        let dense = mps.contract().unwrap();
        let reference = reference_contract(&mps);
        let scale = dense.norm().max(1.0);
        for (a, b) in dense.amps().iter().zip(&reference) {
            assert!((a - b).norm() / scale < 1e-9);
        }
    }

    #[test]
    fn same_seed_reproduces_the_chain() {
        assert_eq!(random_mps(5, 2, 7).unwrap(), random_mps(5, 2, 7).unwrap());
    }

    #[test]
    fn product_chain_compiles_to_a_pure_tensor() {
        let mps = random_mps(4, 1, 3).unwrap();
        let tree = mps.compile_to_tree().unwrap();
        assert_eq!(tree.leaf_count().unwrap(), 4);
        assert!(tree
            .evaluate()
            .unwrap()
            .proportional_to(&mps.contract().unwrap(), 1e-9));
    }

    #[test]
    fn compiled_trees_match_contraction_within_the_leaf_bound() {
        for (n, d, seed) in [(3usize, 2usize, 1u64), (5, 3, 2), (8, 2, 3), (6, 3, 4)] {
            let mps = random_mps(n, d, seed).unwrap();
            let tree = mps.compile_to_tree().unwrap();
            assert!(
                tree.leaf_count().unwrap() <= mps.leaf_bound(),
                "n={n} d={d}: {} > {}",
                tree.leaf_count().unwrap(),
                mps.leaf_bound()
            );
            assert!(tree
                .evaluate()
                .unwrap()
                .proportional_to(&mps.contract().unwrap(), 1e-9));
        }
    }

    #[test]
    fn site_varying_bonds_respect_the_bound() {
        let bonds = [1usize, 2, 3, 1, 2, 1];
        let mps = random_mps_with_bonds(&bonds, 11).unwrap();
        let tree = mps.compile_to_tree().unwrap();
        assert!(tree.leaf_count().unwrap() <= mps.leaf_bound());
        assert!(tree
            .evaluate()
            .unwrap()
            .proportional_to(&mps.contract().unwrap(), 1e-9));
    }

    #[test]
    fn cluster_leaf_counts_follow_the_square_law() {
        for (n, expected) in [(4usize, 16usize), (8, 64), (16, 256)] {
            let tree = cluster_mps(n).unwrap().compile_to_tree().unwrap();
            assert_eq!(tree.leaf_count().unwrap(), expected, "n={n}");
        }
    }

    #[test]
    fn odd_length_cluster_compiles_correctly() {
        let mps = cluster_mps(3).unwrap();
        let tree = mps.compile_to_tree().unwrap();
        assert!(tree
            .evaluate()
            .unwrap()
            .proportional_to(&cluster_chain_state(3).unwrap(), 1e-9));
        assert!(tree.leaf_count().unwrap() <= mps.leaf_bound());
    }

    #[test]
    fn zero_chain_is_rejected_at_compile_time() {
        let zero_site = MpsSite {
            a0: DMatrix::zeros(1, 1),
            a1: DMatrix::zeros(1, 1),
        };
        let mps = Mps::new(vec![zero_site.clone(), zero_site]).unwrap();
        assert!(matches!(mps.compile_to_tree(), Err(Error::ZeroState)));
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let a = MpsSite {
            a0: DMatrix::zeros(1, 2),
            a1: DMatrix::zeros(1, 2),
        };
        let b = MpsSite {
            a0: DMatrix::zeros(3, 1),
            a1: DMatrix::zeros(3, 1),
        };
        assert!(matches!(Mps::new(vec![a, b]), Err(Error::BadMps(_))));
    }

    #[test]
    fn contraction_budget_is_enforced() {
        let mps = random_mps(21, 1, 0).unwrap();
        assert!(matches!(mps.contract(), Err(Error::Budget(_))));
    }
}
