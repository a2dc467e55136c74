//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with its runtime (visible under `--nocapture`). Each
//! criterion pins its tolerance and its wall-clock budget.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use treesize::analysis::{
    enumerate_skeletons, fit_skeleton, minimize_tree_size, schmidt_rank,
    slocc_tree_size_consistency, symmetry_eigencheck, EigenCheck, GridSymmetryOp, MinimizeConfig,
    MinimizeOutcome, Skeleton,
};
use treesize::circuit::ProtocolInstance;
use treesize::dense::LocalOp;
use treesize::formula::from_tree;
use treesize::matrices::{hadamard_bound, max_abs_determinant, nonsingular_fraction};
use treesize::mps::{cluster_mps, random_mps};
use treesize::states::{
    immanant_state_laplace_tree, immanant_state_leibnitz_tree, immanant_state_vector, named_state,
    split_decomposition_tree, NamedKind,
};
use treesize::tree::{random_tree, StateTree, TreeNode};
use treesize::{DenseState, SignFunction};

const TOL: f64 = 1e-9;

struct Criterion {
    label: &'static str,
    budget_secs: f64,
    start: Instant,
}

impl Criterion {
    fn new(label: &'static str, budget_secs: f64) -> Self {
        Self {
            label,
            budget_secs,
            start: Instant::now(),
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        if elapsed > self.budget_secs {
            println!(
                "ACCEPTANCE {}: FAIL (runtime {elapsed:.2}s exceeds {}s)",
                self.label, self.budget_secs
            );
            panic!(
                "{} exceeded its runtime budget: {elapsed:.2}s > {}s",
                self.label, self.budget_secs
            );
        }
        println!("ACCEPTANCE {}: PASS ({elapsed:.2}s)", self.label);
    }
}

fn bell_tree() -> StateTree {
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateTree::new(
        2,
        TreeNode::plus(vec![
            (
                w,
                TreeNode::tensor(vec![TreeNode::basis_leaf(1, 0), TreeNode::basis_leaf(2, 0)]),
            ),
            (
                w,
                TreeNode::tensor(vec![TreeNode::basis_leaf(1, 1), TreeNode::basis_leaf(2, 1)]),
            ),
        ]),
    )
}

#[test]
fn c01_construction_equivalence() {
    let c = Criterion::new("c01 determinant/permanent construction equivalence", 5.0);
    for sign in [SignFunction::Determinant, SignFunction::Permanent] {
        for m in 1..=3usize {
            let laplace = immanant_state_laplace_tree(m, &sign)
                .unwrap()
                .evaluate()
                .unwrap();
            let leibnitz = immanant_state_leibnitz_tree(m, &sign, false)
                .unwrap()
                .evaluate()
                .unwrap();
            let oracle = immanant_state_vector(m, &sign).unwrap();
            assert!(
                laplace.proportional_to(&oracle, TOL),
                "laplace vs oracle, m={m} {}",
                sign.name()
            );
            assert!(
                leibnitz.proportional_to(&oracle, TOL),
                "leibnitz vs oracle, m={m} {}",
                sign.name()
            );
            assert!(
                laplace.proportional_to(&leibnitz, TOL),
                "laplace vs leibnitz, m={m} {}",
                sign.name()
            );
        }
    }
    c.finish();
}

#[test]
fn c02_size_recursions_exact() {
    let c = Criterion::new("c02 Laplace size recursion and 3e limit", 1.0);
    let expected = [1usize, 8, 39, 184];
    let mut s = 1usize;
    let mut prev_lambda = 0.0f64;
    let three_e = 3.0 * std::f64::consts::E;
    for m in 1..=4usize {
        if m > 1 {
            s = m * (s + 2 * m - 1);
        }
        assert_eq!(s, expected[m - 1], "S_{m}");
        let tree = immanant_state_laplace_tree(m, &SignFunction::Determinant).unwrap();
        assert_eq!(tree.leaf_count().unwrap(), s, "tree leaf count at m={m}");
        let per = immanant_state_laplace_tree(m, &SignFunction::Permanent).unwrap();
        assert_eq!(per.leaf_count().unwrap(), s, "permanent variant at m={m}");

        let factorial: usize = (1..=m).product();
        let lambda = s as f64 / factorial as f64;
        assert!(lambda > prev_lambda, "λ must increase at m={m}");
        assert!(lambda < three_e, "λ stays below 3e at m={m}");
        prev_lambda = lambda;
        if m == 4 {
            let relative = (three_e - lambda) / three_e;
            assert!(
                relative < 0.06,
                "λ₄ = {lambda} is {relative:.4} away from 3e"
            );
        }
    }
    c.finish();
}

#[test]
fn c03_generic_split_bound() {
    let c = Criterion::new("c03 split decomposition bound", 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for n in 2..=6usize {
        let bound = 3 * (1 << (n - 1)) - 2;
        for trial in 0..20 {
            let state = DenseState::random(n, &mut rng);
            let tree = split_decomposition_tree(&state).unwrap();
            let leaves = tree.leaf_count().unwrap();
            assert!(leaves <= bound, "n={n} trial={trial}: {leaves} > {bound}");
            // Generic states never lose a branch, so the bound is met with
            // equality.
            assert_eq!(leaves, bound, "n={n} trial={trial}");
            assert!(
                tree.evaluate().unwrap().proportional_to(&state, TOL),
                "n={n} trial={trial}: reconstruction failed"
            );
        }
    }
    c.finish();
}

#[test]
fn c04_formula_correctness() {
    let c = Criterion::new("c04 multilinear formula correctness", 30.0);
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..50 {
        let n = rng.gen_range(1..=6);
        let tree = random_tree(n, &mut rng);
        let state = tree.evaluate().unwrap();
        let formula = from_tree(&tree).unwrap();
        assert!(formula.is_multilinear(), "trial={trial}");
        let scale = state.norm().max(1.0);
        for idx in 0..1usize << n {
            let bits: Vec<u8> = (1..=n).map(|q| state.bit(idx, q) as u8).collect();
            let value = formula.evaluate(&bits).unwrap();
            assert!(
                (value - state.amp(idx)).norm() / scale < TOL,
                "trial={trial} n={n} idx={idx}"
            );
        }
    }
    c.finish();
}

#[test]
fn c05_mps_compilation() {
    let c = Criterion::new("c05 MPS compilation bound and cluster law", 60.0);
    let mut seed = 500u64;
    for d in 1..=3usize {
        for n in [3usize, 4, 5, 8, 16] {
            seed += 1;
            let mps = random_mps(n, d, seed).unwrap();
            let tree = mps.compile_to_tree().unwrap();
            let leaves = tree.leaf_count().unwrap();
            assert!(
                leaves <= mps.leaf_bound(),
                "n={n} D={d}: {leaves} > {}",
                mps.leaf_bound()
            );
            assert!(
                tree.evaluate()
                    .unwrap()
                    .proportional_to(&mps.contract().unwrap(), TOL),
                "n={n} D={d}: compiled tree does not match contraction"
            );
        }
    }
    for (n, expected) in [(4usize, 16usize), (8, 64), (16, 256)] {
        let tree = cluster_mps(n).unwrap().compile_to_tree().unwrap();
        assert_eq!(tree.leaf_count().unwrap(), expected, "cluster n={n}");
    }
    c.finish();
}

#[test]
fn c06_circuit_protocol() {
    let c = Criterion::new("c06 preparation protocol outcomes", 30.0);
    // m = 2: both outcomes verified and equal to the permanent/determinant
    // states exactly.
    let p2 = ProtocolInstance::new(2).unwrap();
    let report = p2.verify_all_outcomes().unwrap();
    assert_eq!(report.outcomes.len(), 2);
    assert!(report.all_matched(), "m=2 outcomes must verify");
    let joint = p2.prepare_superposition();
    let plus = p2.measure_ancillas(&joint, &[0]).unwrap();
    let minus = p2.measure_ancillas(&joint, &[1]).unwrap();
    let per = immanant_state_vector(2, &SignFunction::Permanent).unwrap();
    let det = immanant_state_vector(2, &SignFunction::Determinant).unwrap();
    assert!(plus.proportional_to(&per, TOL));
    assert!(minus.proportional_to(&det, TOL));

    // m = 3: all 8 outcomes.
    let p3 = ProtocolInstance::new(3).unwrap();
    let report = p3.verify_all_outcomes().unwrap();
    assert_eq!(report.outcomes.len(), 8);
    assert!(report.all_matched(), "m=3 outcomes must verify");
    let matched = report.outcomes.iter().filter(|o| o.matched).count();
    assert_eq!(matched, 8);
    c.finish();
}

#[test]
fn c07_matrix_census() {
    let c = Criterion::new("c07 exhaustive (0,1)-matrix census", 120.0);
    let expected_max = [1i64, 1, 2, 3];
    for m in 1..=4usize {
        let (count, fraction) = nonsingular_fraction(m, false).unwrap();
        assert!(count > 0);
        if m >= 2 {
            assert!(fraction > 0.3, "m={m}: fraction {fraction} ≤ 0.3");
        }
        let (max_det, witness) = max_abs_determinant(m, false).unwrap();
        assert_eq!(max_det, expected_max[m - 1], "max |det| at m={m}");
        assert_eq!(witness.det().abs(), max_det);
        let bound = hadamard_bound(m);
        assert!(
            max_det as f64 <= bound + 1e-12,
            "m={m}: bound {bound} violated"
        );
        // Tight exactly when a Hadamard matrix of order m+1 exists: orders
        // 2 and 4 do, orders 3 and 5 do not. (m = 3 is the interesting
        // nontrivial case; m = 1 is tight too since [1] meets 2^(−1)√4.)
        let tight = (max_det as f64 - bound).abs() < 1e-9;
        assert_eq!(tight, m == 1 || m == 3, "tightness pattern at m={m}");
    }
    c.finish();
}

#[test]
fn c08_symmetry_suite() {
    let c = Criterion::new("c08 grid symmetry eigenvalues", 5.0);
    let det3 = immanant_state_vector(3, &SignFunction::Determinant).unwrap();
    let per3 = immanant_state_vector(3, &SignFunction::Permanent).unwrap();
    let expect_eigen = |state: &DenseState, op: &GridSymmetryOp, want: f64, what: &str| {
        match symmetry_eigencheck(state, op).unwrap() {
            EigenCheck::Eigenvector(l) => assert!(
                (l - Complex64::new(want, 0.0)).norm() < TOL,
                "{what}: eigenvalue {l}"
            ),
            EigenCheck::NotEigenvector { overlap } => {
                panic!("{what}: not an eigenvector (overlap {overlap})")
            }
        }
    };
    for i in 1..=3usize {
        for j in i + 1..=3 {
            expect_eigen(&det3, &GridSymmetryOp::RowSwap(i, j), -1.0, "det3 row swap");
            expect_eigen(&det3, &GridSymmetryOp::ColSwap(i, j), -1.0, "det3 col swap");
            expect_eigen(&per3, &GridSymmetryOp::RowSwap(i, j), 1.0, "per3 row swap");
            expect_eigen(&per3, &GridSymmetryOp::ColSwap(i, j), 1.0, "per3 col swap");
        }
    }
    expect_eigen(&det3, &GridSymmetryOp::Transpose, 1.0, "det3 transpose");
    expect_eigen(&per3, &GridSymmetryOp::Transpose, 1.0, "per3 transpose");
    c.finish();
}

#[test]
fn c09_proposition1_suite() {
    let c = Criterion::new("c09 SLOCC invariance under random ILOs", 120.0);
    let (ghz3_tree, _) = named_state(NamedKind::Ghz, 3).unwrap();
    let (w3_tree, _) = named_state(NamedKind::W, 3).unwrap();
    let cases: Vec<(&str, StateTree)> = vec![
        ("bell", bell_tree()),
        ("ghz3", ghz3_tree),
        ("w3", w3_tree),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for (name, tree) in &cases {
        let state = tree.evaluate().unwrap();
        let leaves = tree.leaf_count().unwrap();
        for set in 0..10 {
            let ops: Vec<LocalOp> = (0..tree.n())
                .map(|_| LocalOp::random_invertible(&mut rng))
                .collect();
            // Representation level: identical skeleton, hence leaf count.
            let image_tree = tree.apply_ilo(&ops).unwrap();
            assert_eq!(
                image_tree.leaf_count().unwrap(),
                leaves,
                "{name} set={set}: leaf count changed"
            );
            // Evaluation commutes with the product operator.
            let via_tree = image_tree.evaluate().unwrap();
            let via_dense = state.apply_local_ops(&ops).unwrap();
            let scale = via_dense.norm().max(1.0);
            for (a, b) in via_tree.amps().iter().zip(via_dense.amps()) {
                assert!((a - b).norm() / scale < TOL, "{name} set={set}");
            }
            // Matched-budget minimization finds equal sizes.
            let config = MinimizeConfig {
                size_budget: 8,
                restarts: 24,
                seed: 42 + set as u64,
                ..MinimizeConfig::default()
            };
            let report = slocc_tree_size_consistency(&state, &ops, &config).unwrap();
            let base = report.state_outcome.found_size();
            let image = report.image_outcome.found_size();
            assert!(base.is_some(), "{name} set={set}: state search found nothing");
            assert_eq!(base, image, "{name} set={set}: sizes differ");
            assert_eq!(
                report.mapped_hit_ok,
                Some(true),
                "{name} set={set}: mapped hit failed"
            );
        }
    }
    c.finish();
}

#[test]
fn c10_minimizer_ground_truths() {
    let c = Criterion::new("c10 minimizer ground truths", 120.0);
    let config = MinimizeConfig::default();

    // Product 2-qubit state: 2 leaves.
    let product = DenseState::from_fn(2, |_| Complex64::ONE);
    match minimize_tree_size(&product, &config).unwrap() {
        MinimizeOutcome::Found(rep) => assert_eq!(rep.leaf_count, 2),
        other => panic!("product search failed: {other:?}"),
    }

    // Entangled 2-qubit states: exactly 4 leaves, with ≤3-leaf exhaustion.
    let bell = bell_tree().evaluate().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let ops: Vec<LocalOp> = (0..2).map(|_| LocalOp::random_invertible(&mut rng)).collect();
    let generic_entangled = bell.apply_local_ops(&ops).unwrap();
    for (name, state) in [("bell", &bell), ("ilo image", &generic_entangled)] {
        assert_eq!(schmidt_rank(state, &[1]).unwrap(), 2, "{name} must be entangled");
        match minimize_tree_size(state, &config).unwrap() {
            MinimizeOutcome::Found(rep) => {
                assert_eq!(rep.leaf_count, 4, "{name}");
                assert!(rep
                    .tree
                    .evaluate()
                    .unwrap()
                    .proportional_to(state, 1e-6));
            }
            other => panic!("{name} search failed: {other:?}"),
        }
        // No canonical skeleton of size 3 exists (any 3-leaf tree over two
        // qubits folds to the 2-leaf product)...
        assert!(enumerate_skeletons(2, 3)
            .iter()
            .all(|sk| sk.leaf_count() != 3));
        // ...and the explicit noncanonical 3-leaf shapes span only product
        // states, so they must be rejected by a wide margin.
        for shape in [
            Skeleton::Tensor(vec![
                Skeleton::Leaf(1),
                Skeleton::Plus(vec![Skeleton::Leaf(2), Skeleton::Leaf(2)]),
            ]),
            Skeleton::Tensor(vec![
                Skeleton::Plus(vec![Skeleton::Leaf(1), Skeleton::Leaf(1)]),
                Skeleton::Leaf(2),
            ]),
        ] {
            let (_, residual) = fit_skeleton(&shape, state, &config).unwrap();
            assert!(residual > 0.05, "{name}: 3-leaf fit residual {residual}");
        }
        // A budget of 3 leaves must come back empty-handed.
        let tight = MinimizeConfig {
            size_budget: 3,
            ..config
        };
        assert!(matches!(
            minimize_tree_size(state, &tight).unwrap(),
            MinimizeOutcome::NotFound { size_budget: 3 }
        ));
    }

    // GHZ₃: at most 6 leaves.
    let (_, ghz3) = named_state(NamedKind::Ghz, 3).unwrap();
    match minimize_tree_size(&ghz3, &config).unwrap() {
        MinimizeOutcome::Found(rep) => {
            assert!(rep.leaf_count <= 6, "ghz3 found {}", rep.leaf_count);
            assert!(rep
                .tree
                .evaluate()
                .unwrap()
                .proportional_to(&ghz3, 1e-6));
        }
        other => panic!("ghz3 search failed: {other:?}"),
    }
    c.finish();
}
