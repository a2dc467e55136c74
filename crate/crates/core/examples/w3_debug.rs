use treesize::analysis::{fit_skeleton, MinimizeConfig};
use treesize::dense::{DenseState, LocalOp};
use treesize::states::{named_state, NamedKind};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    // Symmetric-frame W3: fit the 6-leaf skeleton with many restarts/sweeps
    let (_, w3) = named_state(NamedKind::W, 3).unwrap();
    use treesize::analysis::Skeleton;
    let sk6 = Skeleton::Plus(vec![
        Skeleton::Tensor(vec![Skeleton::Leaf(1), Skeleton::Leaf(2), Skeleton::Leaf(3)]),
        Skeleton::Tensor(vec![Skeleton::Leaf(1), Skeleton::Leaf(2), Skeleton::Leaf(3)]),
    ]);
    for (restarts, sweeps) in [(24, 500), (24, 5000), (100, 2000)] {
        let cfg = MinimizeConfig { size_budget: 8, restarts, max_sweeps: sweeps, seed: 42 };
        let (_, res) = fit_skeleton(&sk6, &w3, &cfg).unwrap();
        println!("restarts {restarts} sweeps {sweeps}: residual {res:.3e}");
    }
    // And in a generic ILO frame:
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let ops: Vec<LocalOp> = (0..3).map(|_| LocalOp::random_invertible(&mut rng)).collect();
    let image = w3.apply_local_ops(&ops).unwrap();
    let cfg = MinimizeConfig { size_budget: 8, restarts: 24, max_sweeps: 500, seed: 42 };
    let (_, res) = fit_skeleton(&sk6, &image, &cfg).unwrap();
    println!("generic frame: residual {res:.3e}");
    let _ = Complex64::ONE;
    let _ = DenseState::basis(1, 0);
}
