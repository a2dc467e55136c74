//! Exact oracles over m×m (0,1) matrices.
//!
//! Determinants are computed in integer arithmetic (fraction-free Bareiss
//! elimination), so singularity is never misclassified by rounding. The
//! permanent and custom immanants run the explicit sum over permutations at
//! desk scale; a Ryser inclusion-exclusion accelerator is kept alongside the
//! naive permanent sum and must agree with it wherever both run.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::perm::{lex_permutations, SignFunction};
use crate::{Error, Result};

/// Largest `m` for the `m!`-term immanant sums.
pub const FACTORIAL_BUDGET: usize = 8;
/// Largest `m` surveyed exhaustively without the long-run flag.
pub const CENSUS_BUDGET: usize = 4;
/// Largest `m` surveyed exhaustively with the long-run flag (2^25 matrices).
pub const CENSUS_BUDGET_LONG: usize = 5;

/// An m×m matrix with entries in {0, 1}.
///
/// Matrices are in bijection with integers `0..2^(m²)`: entry `(i, j)`
/// (1-based) is bit `m² − ((i−1)·m + j)` of the index, so entry (1,1) is the
/// most significant bit. This matches the qubit-grid labeling where qubit
/// `(i−1)·m + j` is bit `(i−1)·m + j` of a basis index, MSB first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    m: usize,
    entries: Vec<u8>, // row-major
}

impl ZeroOneMatrix {
    pub fn from_entries(m: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {m}×{m} matrix, got {}",
                m * m,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e > 1) {
            return Err(Error::InvalidArgument(
                "entries must be 0 or 1".to_string(),
            ));
        }
        Ok(Self { m, entries })
    }

    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::InvalidArgument("ragged rows".to_string()));
            }
            entries.extend_from_slice(row);
        }
        Self::from_entries(m, entries)
    }

    /// Decodes the canonical index (row-major bits, MSB first).
    pub fn from_index(m: usize, index: u64) -> Self {
        let nbits = m * m;
        let entries = (0..nbits)
            .map(|pos| ((index >> (nbits - 1 - pos)) & 1) as u8)
            .collect();
        Self { m, entries }
    }

    /// Inverse of [`ZeroOneMatrix::from_index`].
    pub fn to_index(&self) -> u64 {
        self.entries
            .iter()
            .fold(0u64, |acc, &e| (acc << 1) | e as u64)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Entry at 1-based `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> u8 {
        self.entries[(row - 1) * self.m + (col - 1)]
    }

    pub fn identity(m: usize) -> Self {
        let mut entries = vec![0u8; m * m];
        for i in 0..m {
            entries[i * m + i] = 1;
        }
        Self { m, entries }
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        let mut entries = vec![0u8; m * m];
        for i in 0..m {
            for j in 0..m {
                entries[j * m + i] = self.entries[i * m + j];
            }
        }
        Self { m, entries }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> i64 {
        let m = self.m;
        if m == 0 {
            return 1;
        }
        let mut a: Vec<i64> = self.entries.iter().map(|&e| e as i64).collect();
        let mut sign = 1i64;
        let mut prev = 1i64;
        for k in 0..m - 1 {
            if a[k * m + k] == 0 {
                let Some(p) = (k + 1..m).find(|&r| a[r * m + k] != 0) else {
                    return 0;
                };
                for j in 0..m {
                    a.swap(k * m + j, p * m + j);
                }
                sign = -sign;
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    // Exact division is guaranteed by the Bareiss identity.
                    a[i * m + j] = (a[i * m + j] * a[k * m + k] - a[i * m + k] * a[k * m + j]) / prev;
                }
                a[i * m + k] = 0;
            }
            prev = a[k * m + k];
        }
        sign * a[m * m - 1]
    }

    /// Permanent by the explicit sum over all `m!` permutations.
    pub fn permanent_naive(&self) -> Result<i64> {
        self.check_factorial_budget()?;
        let mut total = 0i64;
        for perm in lex_permutations(self.m) {
            let mut prod = 1i64;
            for (i, &j) in perm.iter().enumerate() {
                prod *= self.entry(i + 1, j) as i64;
                if prod == 0 {
                    break;
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Permanent by Ryser's inclusion-exclusion formula.
    pub fn permanent_ryser(&self) -> i64 {
        let m = self.m;
        if m == 0 {
            return 1;
        }
        let mut total = 0i64;
        for subset in 1u64..(1 << m) {
            let mut prod = 1i64;
            for i in 0..m {
                let mut row_sum = 0i64;
                for j in 0..m {
                    if subset >> j & 1 == 1 {
                        row_sum += self.entries[i * m + j] as i64;
                    }
                }
                prod *= row_sum;
                if prod == 0 {
                    break;
                }
            }
            let k = subset.count_ones() as usize;
            if (m - k) % 2 == 0 {
                total += prod;
            } else {
                total -= prod;
            }
        }
        total
    }

    /// Immanant `Σ_σ c(σ) Π_i M_{i,σ_i}` for the given coefficient map. The
    /// determinant kind takes the exact elimination path (any `m`); other
    /// kinds expand the `m!` sum and are budgeted to `m ≤ 8`.
    pub fn immanant(&self, sign: &SignFunction) -> Result<Complex64> {
        sign.validate_for(self.m)?;
        match sign {
            SignFunction::Determinant => Ok(Complex64::new(self.det() as f64, 0.0)),
            SignFunction::Permanent => {
                Ok(Complex64::new(self.permanent_naive()? as f64, 0.0))
            }
            SignFunction::Custom(_) => {
                self.check_factorial_budget()?;
                let mut total = Complex64::ZERO;
                for perm in lex_permutations(self.m) {
                    let mut prod = 1i64;
                    for (i, &j) in perm.iter().enumerate() {
                        prod *= self.entry(i + 1, j) as i64;
                        if prod == 0 {
                            break;
                        }
                    }
                    if prod != 0 {
                        total += sign.coefficient(&perm);
                    }
                }
                Ok(total)
            }
        }
    }

    fn check_factorial_budget(&self) -> Result<()> {
        if self.m > FACTORIAL_BUDGET {
            return Err(Error::Budget(format!(
                "m = {} exceeds the m! expansion budget m ≤ {FACTORIAL_BUDGET}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Exhaustive count of nonsingular m×m (0,1) matrices and the fraction of
/// all `2^(m²)` matrices they make up. `m = 5` (33.5M matrices) requires the
/// long-run flag.
pub fn nonsingular_fraction(m: usize, long_run: bool) -> Result<(u64, f64)> {
    check_census_budget(m, long_run)?;
    let total = 1u64 << (m * m);
    let count: u64 = (0..total)
        .into_par_iter()
        .filter(|&idx| ZeroOneMatrix::from_index(m, idx).det() != 0)
        .count() as u64;
    Ok((count, count as f64 / total as f64))
}

/// Exhaustive maximum of `|det|` with a witness matrix (the smallest index
/// attaining the maximum, so the result is deterministic).
pub fn max_abs_determinant(m: usize, long_run: bool) -> Result<(i64, ZeroOneMatrix)> {
    check_census_budget(m, long_run)?;
    let total = 1u64 << (m * m);
    let (best, best_idx) = (0..total)
        .into_par_iter()
        .map(|idx| (ZeroOneMatrix::from_index(m, idx).det().abs(), idx))
        .reduce(
            || (i64::MIN, u64::MAX),
            |a, b| {
                // Larger |det| wins; ties break toward the smaller index.
                match a.0.cmp(&b.0) {
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Equal => {
                        if a.1 <= b.1 {
                            a
                        } else {
                            b
                        }
                    }
                }
            },
        );
    Ok((best, ZeroOneMatrix::from_index(m, best_idx)))
}

/// The Hadamard-type bound `2^(−m)·√((m+1)^(m+1))` on `|det|` of an m×m
/// (0,1) matrix; attained exactly when a Hadamard matrix of order `m+1`
/// exists.
pub fn hadamard_bound(m: usize) -> f64 {
    ((m + 1) as f64).powi(m as i32 + 1).sqrt() / 2f64.powi(m as i32)
}

fn check_census_budget(m: usize, long_run: bool) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".to_string()));
    }
    let limit = if long_run {
        CENSUS_BUDGET_LONG
    } else {
        CENSUS_BUDGET
    };
    if m > limit {
        return Err(Error::Budget(format!(
            "m = {m} exceeds the exhaustive census budget m ≤ {limit}{}",
            if long_run { "" } else { " (pass the long-run flag for m = 5)" }
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_bijection_round_trips() {
        for idx in 0..512u64 {
            let mat = ZeroOneMatrix::from_index(3, idx);
            assert_eq!(mat.to_index(), idx);
        }
        // Entry (1,1) is the most significant bit.
        let mat = ZeroOneMatrix::from_index(2, 0b1000);
        assert_eq!(mat.entry(1, 1), 1);
        assert_eq!(mat.entry(2, 2), 0);
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(ZeroOneMatrix::identity(3).det(), 1);
        let upper = ZeroOneMatrix::from_rows(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(upper.det(), 1);
        let singular = ZeroOneMatrix::from_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(singular.det(), 0);
    }

    #[test]
    fn permanent_basics() {
        let ones = ZeroOneMatrix::from_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(ones.permanent_naive().unwrap(), 2);
        assert_eq!(ones.permanent_ryser(), 2);
        assert_eq!(ZeroOneMatrix::identity(4).permanent_naive().unwrap(), 1);
    }

    #[test]
    fn det2_oracle_amplitudes_frozen() {
        // Exhaustive 2×2 ground truth; the paper's explicit |det₂⟩ listing
        // has a typo, so this table is the reference used everywhere else.
        let expect = |idx: u64| -> i64 {
            match idx {
                0b1001 | 0b1011 | 0b1101 => 1,
                0b0110 | 0b0111 | 0b1110 => -1,
                _ => 0,
            }
        };
        for idx in 0..16u64 {
            assert_eq!(
                ZeroOneMatrix::from_index(2, idx).det(),
                expect(idx),
                "index {idx:04b}"
            );
        }
    }

    #[test]
    fn leibnitz_sum_agrees_with_elimination_exhaustively() {
        // Dual-route determinant check for every matrix with m ≤ 3.
        for m in 1..=3usize {
            let sgn_map: std::collections::HashMap<Vec<usize>, Complex64> =
                lex_permutations(m)
                    .into_iter()
                    .map(|p| {
                        let s = crate::perm::parity(&p) as f64;
                        (p, Complex64::new(s, 0.0))
                    })
                    .collect();
            let leibnitz = SignFunction::custom(sgn_map).unwrap();
            for idx in 0..1u64 << (m * m) {
                let mat = ZeroOneMatrix::from_index(m, idx);
                let via_sum = mat.immanant(&leibnitz).unwrap();
                assert!(
                    (via_sum.re - mat.det() as f64).abs() < 1e-12 && via_sum.im == 0.0,
                    "m={m} idx={idx}"
                );
            }
        }
    }

    #[test]
    fn ryser_matches_naive_everywhere_small() {
        for m in 1..=3usize {
            for idx in 0..1u64 << (m * m) {
                let mat = ZeroOneMatrix::from_index(m, idx);
                assert_eq!(mat.permanent_naive().unwrap(), mat.permanent_ryser());
            }
        }
    }

    #[test]
    fn census_counts_match_known_values() {
        assert_eq!(nonsingular_fraction(1, false).unwrap(), (1, 0.5));
        let (count, fraction) = nonsingular_fraction(2, false).unwrap();
        assert_eq!(count, 6);
        assert!((fraction - 0.375).abs() < 1e-15);
        for m in 2..=4 {
            let (_, fraction) = nonsingular_fraction(m, false).unwrap();
            assert!(fraction > 0.3, "m={m}: fraction {fraction}");
        }
    }

    #[test]
    fn census_budget_is_enforced() {
        assert!(matches!(nonsingular_fraction(5, false), Err(Error::Budget(_))));
        assert!(matches!(max_abs_determinant(6, true), Err(Error::Budget(_))));
    }

    #[test]
    fn max_determinants_and_hadamard_bound() {
        let expected = [1i64, 1, 2, 3];
        for m in 1..=4usize {
            let (value, witness) = max_abs_determinant(m, false).unwrap();
            assert_eq!(value, expected[m - 1], "m={m}");
            assert_eq!(witness.det().abs(), value);
            let bound = hadamard_bound(m);
            assert!(value as f64 <= bound + 1e-12);
            // The bound is tight exactly at m = 3 (a Hadamard matrix of
            // order 4 exists; orders 2+1=3 and 4+1=5 do not).
            if m == 3 {
                assert!((value as f64 - bound).abs() < 1e-12);
            } else if m >= 2 {
                assert!((bound - value as f64) > 0.2);
            }
        }
        assert!((hadamard_bound(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn immanant_budget_is_enforced() {
        let mat = ZeroOneMatrix::identity(9);
        assert!(matches!(
            mat.permanent_naive(),
            Err(Error::Budget(_))
        ));
        // Determinants are exempt from the factorial budget.
        assert_eq!(mat.det(), 1);
        assert_eq!(
            mat.immanant(&SignFunction::Determinant).unwrap(),
            Complex64::ONE
        );
    }
}
