//! Ancilla-measurement protocol preparing immanant states.
//!
//! With `s` the smallest integer such that `2^s ≥ m!`, the joint register
//! holds `s` ancillas (qubits `1..=s`, most significant) and `m²` main
//! qubits. Controlled preparation unitaries — simulated here as one block
//! per ancilla basis state, not decomposed into elementary gates — map
//! `|+⟩^s ⊗ |0…0⟩` to `Σ_{i≤m!} |i⟩|Φ_i⟩ + Σ_{i>m!} |i⟩|Φ₀⟩`, where `Φ_i`
//! is the i-th Leibnitz product term. Measuring every ancilla in the
//! `{+,−}` basis then leaves `Σ_i c(i)|Φ_i⟩ + (Σ_{i>m!} c(i))|Φ₀⟩` with
//! signs `c(i) = (−1)^(⟨i−1, outcome⟩)` — an immanant state with all
//! coefficients in `{+1, −1}`, whatever the outcome.

use num_complex::Complex64;

use crate::dense::DenseState;
use crate::perm::lex_permutations;
use crate::states::QubitGrid;
use crate::{Error, Result};

/// Largest grid side simulated densely (`s + m²` qubits; m = 3 gives 12).
pub const PROTOCOL_BUDGET: usize = 3;

/// Sizes and index conventions of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolInstance {
    m: usize,
    s: usize,
    factorial: usize,
}

/// Result of checking one measurement outcome.
#[derive(Debug, Clone)]
pub struct OutcomeCheck {
    pub outcome: Vec<u8>,
    /// `c(i)` for `i = 1..=2^s`, each ±1.
    pub signs: Vec<i64>,
    pub probability: f64,
    pub matched: bool,
}

/// Verification summary over every possible outcome string.
#[derive(Debug, Clone)]
pub struct ProtocolReport {
    pub m: usize,
    pub s: usize,
    pub outcomes: Vec<OutcomeCheck>,
}

impl ProtocolReport {
    pub fn all_matched(&self) -> bool {
        self.outcomes.iter().all(|o| o.matched)
    }
}

impl ProtocolInstance {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadQubitCount {
                constraint: "m ≥ 1",
                got: 0,
            });
        }
        if m > PROTOCOL_BUDGET {
            return Err(Error::Budget(format!(
                "m = {m} exceeds the dense protocol budget m ≤ {PROTOCOL_BUDGET}"
            )));
        }
        let factorial: usize = (1..=m).product();
        let mut s = 0usize;
        while (1usize << s) < factorial {
            s += 1;
        }
        Ok(Self { m, s, factorial })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Ancilla count `s = ⌈log₂ m!⌉` (0 for m = 1).
    pub fn ancilla_count(&self) -> usize {
        self.s
    }

    pub fn factorial(&self) -> usize {
        self.factorial
    }

    /// Total qubits in the joint register.
    pub fn joint_qubits(&self) -> usize {
        self.s + self.m * self.m
    }

    /// `Φ_i`: the normalized i-th Leibnitz product term for `1 ≤ i ≤ m!`
    /// (permutations in lexicographic order), or `Φ₀ = |0…0⟩` for `i = 0`.
    pub fn term_state(&self, i: usize) -> DenseState {
        let n = self.m * self.m;
        if i == 0 {
            return DenseState::basis(n, 0);
        }
        let perm = &lex_permutations(self.m)[i - 1];
        let grid = QubitGrid::new(self.m);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // Per-qubit amplitude pairs: |1⟩ at (row, σ_row), |+⟩ elsewhere.
        let pairs: Vec<[Complex64; 2]> = (1..=n)
            .map(|q| {
                let (row, col) = grid.position(q);
                if perm[row - 1] == col {
                    [Complex64::ZERO, Complex64::ONE]
                } else {
                    [Complex64::new(r, 0.0), Complex64::new(r, 0.0)]
                }
            })
            .collect();
        DenseState::from_fn(n, |idx| {
            let mut amp = Complex64::ONE;
            for (q, pair) in pairs.iter().enumerate() {
                amp *= pair[(idx >> (n - 1 - q)) & 1];
            }
            amp
        })
    }

    /// The joint state after the controlled preparation layer:
    /// `2^(−s/2) Σ_a |a⟩ ⊗ φ(a)` with `φ(a) = Φ_{a+1}` for `a + 1 ≤ m!`
    /// and `Φ₀` otherwise.
    pub fn prepare_superposition(&self) -> DenseState {
        let n_main = self.m * self.m;
        let blocks = 1usize << self.s;
        let scale = Complex64::new(1.0 / (blocks as f64).sqrt(), 0.0);
        let mut joint = DenseState::zero(self.joint_qubits());
        for a in 0..blocks {
            let term = if a + 1 <= self.factorial {
                self.term_state(a + 1)
            } else {
                self.term_state(0)
            };
            let base = a << n_main;
            for (y, amp) in term.amps().iter().enumerate() {
                joint.amps_mut()[base | y] = scale * amp;
            }
        }
        joint
    }

    /// Projects each ancilla onto `(|0⟩ ± |1⟩)/√2` — outcome bit 0 for `+`,
    /// 1 for `−` — and returns the post-measurement main-register state.
    pub fn measure_ancillas(&self, joint: &DenseState, outcome: &[u8]) -> Result<DenseState> {
        if outcome.len() != self.s {
            return Err(Error::InvalidArgument(format!(
                "outcome has {} bits, expected s = {}",
                outcome.len(),
                self.s
            )));
        }
        if joint.n() != self.joint_qubits() {
            return Err(Error::InvalidArgument(format!(
                "joint state has {} qubits, expected {}",
                joint.n(),
                self.joint_qubits()
            )));
        }
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut state = joint.clone();
        for &bit in outcome {
            let sign = if bit == 0 { 1.0 } else { -1.0 };
            // Always qubit 1: earlier projections have already removed the
            // preceding ancillas.
            state = state.project_qubit(1, [Complex64::new(r, 0.0), Complex64::new(sign * r, 0.0)])?;
        }
        // Every outcome has nonzero probability: the Φ terms are linearly
        // independent and each keeps a ±1 coefficient.
        assert!(
            state.norm() > 1e-12,
            "zero-probability outcome cannot occur in this protocol"
        );
        Ok(state)
    }

    /// Sign vector `c(i) = (−1)^(⟨i−1, outcome⟩)` for `i = 1..=2^s`.
    pub fn sign_vector(&self, outcome: &[u8]) -> Vec<i64> {
        let o = outcome
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
        (0..1usize << self.s)
            .map(|a| if (a & o).count_ones() % 2 == 0 { 1 } else { -1 })
            .collect()
    }

    /// Independent reconstruction of the predicted post-measurement state:
    /// `Σ_{i≤m!} c(i)Φ_i + (Σ_{i>m!} c(i)) Φ₀`.
    pub fn predicted_state(&self, outcome: &[u8]) -> DenseState {
        let signs = self.sign_vector(outcome);
        let n_main = self.m * self.m;
        let mut state = DenseState::zero(n_main);
        let mut residual = 0i64;
        for (a, &sign) in signs.iter().enumerate() {
            if a + 1 <= self.factorial {
                let term = self.term_state(a + 1);
                for (y, amp) in term.amps().iter().enumerate() {
                    state.amps_mut()[y] += Complex64::new(sign as f64, 0.0) * amp;
                }
            } else {
                residual += sign;
            }
        }
        state.amps_mut()[0] += Complex64::new(residual as f64, 0.0);
        state
    }

    /// Runs every outcome through measurement, compares against the
    /// independent prediction, and records probabilities and sign vectors.
    pub fn verify_all_outcomes(&self) -> Result<ProtocolReport> {
        let joint = self.prepare_superposition();
        let mut outcomes = Vec::new();
        for bits in 0..1usize << self.s {
            let outcome: Vec<u8> = (0..self.s)
                .map(|k| ((bits >> (self.s - 1 - k)) & 1) as u8)
                .collect();
            let measured = self.measure_ancillas(&joint, &outcome)?;
            let predicted = self.predicted_state(&outcome);
            outcomes.push(OutcomeCheck {
                signs: self.sign_vector(&outcome),
                probability: measured.norm_sqr(),
                matched: measured.proportional_to(&predicted, 1e-9),
                outcome,
            });
        }
        Ok(ProtocolReport {
            m: self.m,
            s: self.s,
            outcomes,
        })
    }
}
