//! Dense amplitude vectors and single-qubit operators.
//!
//! A [`DenseState`] stores the full `2^n` amplitude vector of an `n`-qubit
//! state. Qubit 1 is the most significant bit of the index: amplitude `x`
//! belongs to `|x₁x₂…x_n⟩`. States are in general unnormalized; equality of
//! states is tested up to a global factor with [`DenseState::proportional_to`].

use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result, SINGULAR_TOL};

/// Full amplitude vector of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    /// Wraps an amplitude vector; the length must be exactly `2^n`.
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << n;
        if amps.len() != expected {
            return Err(Error::BadAmplitudeLength {
                n,
                got: amps.len(),
                expected,
            });
        }
        Ok(Self { n, amps })
    }

    /// The all-zero vector (not a physical state until amplitudes are set).
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            amps: vec![Complex64::ZERO; 1 << n],
        }
    }

    /// Computational basis state `|x⟩`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut s = Self::zero(n);
        s.amps[index] = Complex64::ONE;
        s
    }

    /// Fills a state from a function of the basis index.
    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            n,
            amps: (0..1usize << n).map(f).collect(),
        }
    }

    /// State with every amplitude drawn uniformly from the complex box
    /// `[-1,1] × [-1,1]i`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(n, |_| {
            Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// Value of the bit for `qubit` (1-based) inside a basis index.
    pub fn bit(&self, index: usize, qubit: usize) -> usize {
        bit_of(index, qubit, self.n)
    }

    /// `⟨self|other⟩` with the conventional conjugation on the left.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.n, other.n, "qubit counts differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            n: self.n,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Rescales to unit norm. Errors on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    /// `|⟨self|other⟩| / (‖self‖·‖other‖)`, i.e. 1 exactly when the states
    /// are proportional. Zero if either vector vanishes.
    pub fn overlap(&self, other: &Self) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            return 0.0;
        }
        self.inner(other).norm() / denom
    }

    /// Proportionality test: `|⟨a|b⟩| / (‖a‖‖b‖) ≥ 1 − tol`.
    pub fn proportional_to(&self, other: &Self, tol: f64) -> bool {
        self.overlap(other) >= 1.0 - tol
    }

    /// Applies `ops[q-1]` to qubit `q` for every qubit, i.e. the product
    /// operator `A₁ ⊗ … ⊗ A_n`.
    pub fn apply_local_ops(&self, ops: &[LocalOp]) -> Result<Self> {
        if ops.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "expected {} local operators, got {}",
                self.n,
                ops.len()
            )));
        }
        let mut out = self.clone();
        for (q, op) in ops.iter().enumerate() {
            out.apply_local_in_place(q + 1, op);
        }
        Ok(out)
    }

    fn apply_local_in_place(&mut self, qubit: usize, op: &LocalOp) {
        let stride = 1usize << (self.n - qubit);
        let mut base = 0;
        while base < self.amps.len() {
            for low in base..base + stride {
                let i0 = low;
                let i1 = low + stride;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                let (b0, b1) = op.apply(a0, a1);
                self.amps[i0] = b0;
                self.amps[i1] = b1;
            }
            base += 2 * stride;
        }
    }

    /// Relabels qubits: `perm[q-1]` is the new index of qubit `q`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "permutation has length {}, expected {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p < 1 || p > self.n || seen[p - 1] {
                return Err(Error::InvalidArgument(format!(
                    "not a permutation of 1..={}: {:?}",
                    self.n, perm
                )));
            }
            seen[p - 1] = true;
        }
        let mut out = Self::zero(self.n);
        for (x, &a) in self.amps.iter().enumerate() {
            let mut y = 0usize;
            for q in 1..=self.n {
                if bit_of(x, q, self.n) == 1 {
                    y |= 1 << (self.n - perm[q - 1]);
                }
            }
            out.amps[y] = a;
        }
        Ok(out)
    }

    /// Projects qubit `q` onto the bra of `b₀|0⟩ + b₁|1⟩`, returning the
    /// (unnormalized) state of the remaining `n − 1` qubits in their original
    /// relative order.
    pub fn project_qubit(&self, qubit: usize, basis_ket: [Complex64; 2]) -> Result<Self> {
        if self.n < 1 || qubit < 1 || qubit > self.n {
            return Err(Error::InvalidArgument(format!(
                "cannot project qubit {qubit} of an {}-qubit state",
                self.n
            )));
        }
        let b0 = basis_ket[0].conj();
        let b1 = basis_ket[1].conj();
        let shift = self.n - qubit; // bit position of `qubit` from the LSB
        let mut out = Self::zero(self.n - 1);
        for y in 0..out.amps.len() {
            let high = (y >> shift) << (shift + 1);
            let low = y & ((1 << shift) - 1);
            let x0 = high | low;
            let x1 = x0 | (1 << shift);
            out.amps[y] = b0 * self.amps[x0] + b1 * self.amps[x1];
        }
        Ok(out)
    }

    /// Indices of amplitudes with `|a| > tol·max|a|`, with the shared scale.
    pub fn support_indices(&self, rel_tol: f64) -> Vec<usize> {
        let max = self
            .amps
            .iter()
            .map(|a| a.norm())
            .fold(0.0f64, f64::max);
        if max == 0.0 {
            return Vec::new();
        }
        (0..self.amps.len())
            .filter(|&i| self.amps[i].norm() > rel_tol * max)
            .collect()
    }
}

/// Bit of `qubit` (1-based, MSB-first) in `index` for an `n`-qubit register.
pub fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - qubit)) & 1
}

/// Basis index for an explicit bit pattern, MSB first.
pub fn index_of_bits(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
}

/// A 2×2 complex operator acting on a single qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOp {
    /// Row-major entries: `e[r][c]`.
    pub e: [[Complex64; 2]; 2],
}

impl LocalOp {
    pub fn new(e00: Complex64, e01: Complex64, e10: Complex64, e11: Complex64) -> Self {
        Self {
            e: [[e00, e01], [e10, e11]],
        }
    }

    pub fn identity() -> Self {
        Self::new(
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ONE,
        )
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(h, h, h, -h)
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn is_invertible(&self) -> bool {
        self.det().norm() > SINGULAR_TOL
    }

    /// Applies the operator to the column `(a₀, a₁)ᵀ`.
    pub fn apply(&self, a0: Complex64, a1: Complex64) -> (Complex64, Complex64) {
        (
            self.e[0][0] * a0 + self.e[0][1] * a1,
            self.e[1][0] * a0 + self.e[1][1] * a1,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() <= SINGULAR_TOL {
            return Err(Error::SingularOperator {
                qubit: 0,
                det: det.norm(),
            });
        }
        let inv = Complex64::ONE / det;
        Ok(Self::new(
            self.e[1][1] * inv,
            -self.e[0][1] * inv,
            -self.e[1][0] * inv,
            self.e[0][0] * inv,
        ))
    }

    /// Draws entries uniformly from the complex unit box until the matrix is
    /// comfortably invertible.
    pub fn random_invertible(rng: &mut impl Rng) -> Self {
        loop {
            let mut entry =
                || Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            let op = Self::new(entry(), entry(), entry(), entry());
            if op.det().norm() > 1e-3 {
                return op;
            }
        }
    }
}
