//! Upper bounds on entanglement persistency by measurement search.
//!
//! Persistency is the smallest number of single-qubit projective
//! measurements that disentangles a state with certainty — every outcome
//! branch must end in a product state. Bases are continuous, so only upper
//! bounds are certified here: a sequence found by the search proves
//! persistency ≤ k, while failing to find one proves nothing.
//!
//! Search policy: sequences of length 0, 1, 2 are scanned exhaustively over
//! an angular grid (θ in steps of π/8, φ in steps of π/4) joined with
//! seeded random bases, and near misses trigger local grid refinement
//! around the best candidate. Longer sequences are sampled randomly.
//! Measuring `n − 1` qubits always disentangles the last one, so the
//! search never reports more than `n − 1`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseState;
use crate::{Error, Result};

/// Largest register searched.
pub const PERSISTENCY_QUBIT_BUDGET: usize = 6;

const PRODUCT_TOL: f64 = 1e-9;

/// One projective measurement: qubit index plus the basis
/// `{cosθ|0⟩ + e^{iφ}sinθ|1⟩, −e^{−iφ}sinθ|0⟩ + cosθ|1⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub qubit: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Measurement {
    /// The two orthonormal basis kets.
    pub fn basis(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let phase = Complex64::new(0.0, self.phi).exp();
        [
            [Complex64::new(c, 0.0), phase * s],
            [-phase.conj() * s, Complex64::new(c, 0.0)],
        ]
    }
}

/// Search result: `upper` is an upper bound on the persistency, witnessed
/// by the measurement sequence (empty for product states).
#[derive(Debug, Clone)]
pub struct PersistencyReport {
    pub upper: usize,
    pub witness: Vec<Measurement>,
    /// Lengths that were scanned exhaustively over the base grid without a
    /// hit (evidence, not certification, that they do not suffice).
    pub grid_exhausted: Vec<usize>,
}

/// Largest single-cut entanglement residual over all qubits:
/// `√(det Gram)/(tr Gram)` of the 2×(2^(n−1)) amplitude matrix, zero
/// exactly for product states.
fn entanglement_residual(state: &DenseState) -> f64 {
    let n = state.n();
    if n <= 1 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for q in 1..=n {
        let shift = n - q;
        let mut g00 = 0.0f64;
        let mut g11 = 0.0f64;
        let mut g01 = Complex64::ZERO;
        for y in 0..1usize << (n - 1) {
            let high = (y >> shift) << (shift + 1);
            let low = y & ((1 << shift) - 1);
            let a0 = state.amp(high | low);
            let a1 = state.amp(high | low | (1 << shift));
            g00 += a0.norm_sqr();
            g11 += a1.norm_sqr();
            g01 += a0.conj() * a1;
        }
        let trace = g00 + g11;
        if trace == 0.0 {
            continue;
        }
        let det = (g00 * g11 - g01.norm_sqr()).max(0.0);
        worst = worst.max(det.sqrt() / trace);
    }
    worst
}

fn is_product(state: &DenseState) -> bool {
    entanglement_residual(state) <= PRODUCT_TOL
}

/// Worst branch residual after applying the measurement sequence to every
/// outcome combination; zero-probability branches are skipped. Returns 0
/// exactly when the sequence disentangles with certainty.
fn sequence_residual(state: &DenseState, seq: &[Measurement]) -> f64 {
    match seq.split_first() {
        None => entanglement_residual(state),
        Some((meas, rest)) => {
            let kets = meas.basis();
            let mut worst = 0.0f64;
            for ket in kets {
                let branch = state
                    .project_qubit(meas.qubit, ket)
                    .expect("measurement qubit is in range");
                if branch.norm() < 1e-12 {
                    continue;
                }
                // Remaining measurements address qubits of the reduced
                // register; labels above the measured qubit shift down.
                let shifted: Vec<Measurement> = rest
                    .iter()
                    .map(|m| Measurement {
                        qubit: if m.qubit > meas.qubit {
                            m.qubit - 1
                        } else {
                            m.qubit
                        },
                        ..*m
                    })
                    .collect();
                worst = worst.max(sequence_residual(&branch, &shifted));
            }
            worst
        }
    }
}

fn base_angles(trials: usize, rng: &mut impl Rng) -> Vec<(f64, f64)> {
    let mut angles = Vec::new();
    for it in 0..=4 {
        let theta = it as f64 * std::f64::consts::FRAC_PI_8;
        for ip in 0..8 {
            let phi = ip as f64 * std::f64::consts::FRAC_PI_4;
            angles.push((theta, phi));
            if theta == 0.0 {
                break; // φ is irrelevant at the poles
            }
        }
    }
    for _ in 0..trials {
        angles.push((
            rng.gen_range(0.0..=std::f64::consts::FRAC_PI_2),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ));
    }
    angles
}

/// Ordered tuples of k distinct qubits out of 1..=n.
fn qubit_sequences(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for q in 1..=n {
            if !current.contains(&q) {
                current.push(q);
                rec(n, k, current, out);
                current.pop();
            }
        }
    }
    rec(n, k, &mut current, &mut out);
    out
}

/// Local refinement: rescan each measurement's angles over a shrinking grid
/// around the current best, keeping the others fixed.
fn refine(state: &DenseState, seq: &mut Vec<Measurement>, mut best: f64) -> f64 {
    for round in 1..=3 {
        let step = std::f64::consts::FRAC_PI_8 / (2f64.powi(round));
        for slot in 0..seq.len() {
            let center = seq[slot];
            for dt in -2i32..=2 {
                for dp in -2i32..=2 {
                    let cand = Measurement {
                        qubit: center.qubit,
                        theta: center.theta + dt as f64 * step,
                        phi: center.phi + dp as f64 * step,
                    };
                    let mut trial = seq.clone();
                    trial[slot] = cand;
                    let r = sequence_residual(state, &trial);
                    if r < best {
                        best = r;
                        seq[slot] = cand;
                    }
                }
            }
        }
        if best <= PRODUCT_TOL {
            break;
        }
    }
    best
}

/// Searches for the smallest k such that some fixed sequence of k
/// single-qubit measurements leaves a product state on every outcome
/// branch. The returned k is an upper bound on the persistency; the
/// fallback k = n − 1 (computational-basis measurements) always verifies.
pub fn persistency_upper(state: &DenseState, trials: usize, seed: u64) -> Result<PersistencyReport> {
    let n = state.n();
    if n > PERSISTENCY_QUBIT_BUDGET {
        return Err(Error::Budget(format!(
            "n = {n} exceeds the persistency search budget n ≤ {PERSISTENCY_QUBIT_BUDGET}"
        )));
    }
    let state = state.normalized()?;
    let mut grid_exhausted = Vec::new();

    if is_product(&state) {
        return Ok(PersistencyReport {
            upper: 0,
            witness: Vec::new(),
            grid_exhausted,
        });
    }
    grid_exhausted.push(0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles = base_angles(trials, &mut rng);

    // Exhaustive grid scan for short sequences.
    for k in 1..=2usize.min(n.saturating_sub(1)) {
        let mut best_residual = f64::INFINITY;
        let mut best_seq: Vec<Measurement> = Vec::new();
        for qubits in qubit_sequences(n, k) {
            let mut assignment = vec![0usize; k];
            loop {
                let seq: Vec<Measurement> = qubits
                    .iter()
                    .zip(&assignment)
                    .map(|(&qubit, &a)| Measurement {
                        qubit,
                        theta: angles[a].0,
                        phi: angles[a].1,
                    })
                    .collect();
                let residual = sequence_residual(&state, &seq);
                if residual < best_residual {
                    best_residual = residual;
                    best_seq = seq;
                }
                // Odometer over the angle grid.
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    assignment[pos] += 1;
                    if assignment[pos] < angles.len() {
                        break;
                    }
                    assignment[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
            if best_residual <= PRODUCT_TOL {
                break;
            }
        }
        if best_residual > PRODUCT_TOL && best_residual < 1e-2 {
            best_residual = refine(&state, &mut best_seq, best_residual);
        }
        if best_residual <= PRODUCT_TOL {
            return Ok(PersistencyReport {
                upper: k,
                witness: best_seq,
                grid_exhausted,
            });
        }
        grid_exhausted.push(k);
    }

    // Random sampling for longer sequences.
    for k in 3..n.saturating_sub(1) {
        for _ in 0..trials.max(1) {
            let mut qubits: Vec<usize> = (1..=n).collect();
            for i in (1..qubits.len()).rev() {
                qubits.swap(i, rng.gen_range(0..=i));
            }
            qubits.truncate(k);
            let seq: Vec<Measurement> = qubits
                .into_iter()
                .map(|qubit| {
                    let (theta, phi) = angles[rng.gen_range(0..angles.len())];
                    Measurement { qubit, theta, phi }
                })
                .collect();
            if sequence_residual(&state, &seq) <= PRODUCT_TOL {
                return Ok(PersistencyReport {
                    upper: k,
                    witness: seq,
                    grid_exhausted,
                });
            }
        }
    }

    // Fallback: measuring the first n − 1 qubits in the computational basis
    // always leaves a single qubit, which is trivially product.
    let witness: Vec<Measurement> = (1..n)
        .map(|qubit| Measurement {
            qubit,
            theta: 0.0,
            phi: 0.0,
        })
        .collect();
    debug_assert!(sequence_residual(&state, &witness) <= PRODUCT_TOL);
    Ok(PersistencyReport {
        upper: n - 1,
        witness,
        grid_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::SignFunction;
    use crate::states::immanant_state_vector;

    fn ghz(n: usize) -> DenseState {
        let mut s = DenseState::zero(n);
        s.amps_mut()[0] = Complex64::ONE;
        s.amps_mut()[(1 << n) - 1] = Complex64::ONE;
        s
    }

    #[test]
    fn product_states_have_persistency_zero() {
        let s = DenseState::basis(3, 0b010);
        let report = persistency_upper(&s, 5, 1).unwrap();
        assert_eq!(report.upper, 0);
        assert!(report.witness.is_empty());
    }

    #[test]
    fn ghz3_disentangles_with_one_measurement() {
        let report = persistency_upper(&ghz(3), 5, 1).unwrap();
        assert_eq!(report.upper, 1);
        assert_eq!(report.witness.len(), 1);
        // The witness must actually work.
        let normalized = ghz(3).normalized().unwrap();
        assert!(sequence_residual(&normalized, &report.witness) <= PRODUCT_TOL);
    }

    #[test]
    fn det2_search_reports_the_maximal_upper_bound() {
        let det2 = immanant_state_vector(2, &SignFunction::Determinant).unwrap();
        let report = persistency_upper(&det2, 10, 3).unwrap();
        assert_eq!(report.upper, 3);
        assert_eq!(report.grid_exhausted, vec![0, 1, 2]);
        let normalized = det2.normalized().unwrap();
        assert!(sequence_residual(&normalized, &report.witness) <= PRODUCT_TOL);
    }

    #[test]
    fn bell_needs_exactly_one_measurement() {
        let mut bell = DenseState::zero(2);
        bell.amps_mut()[0] = Complex64::ONE;
        bell.amps_mut()[3] = Complex64::ONE;
        let report = persistency_upper(&bell, 5, 2).unwrap();
        assert_eq!(report.upper, 1);
    }

    #[test]
    fn budget_is_enforced() {
        let s = DenseState::basis(7, 0);
        assert!(matches!(
            persistency_upper(&s, 1, 0),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn measurement_bases_are_orthonormal() {
        let m = Measurement {
            qubit: 1,
            theta: 0.7,
            phi: 2.1,
        };
        let [b0, b1] = m.basis();
        let ip = b0[0].conj() * b1[0] + b0[1].conj() * b1[1];
        assert!(ip.norm() < 1e-12);
        assert!((b0[0].norm_sqr() + b0[1].norm_sqr() - 1.0).abs() < 1e-12);
        assert!((b1[0].norm_sqr() + b1[1].norm_sqr() - 1.0).abs() < 1e-12);
    }
}
