//! Permutations of `{1..m}` and coefficient maps `σ ↦ c(σ)` over them.

use num_complex::Complex64;
use std::collections::HashMap;

use crate::{Error, Result};

/// All permutations of `1..=m` in lexicographic order. The identity comes
/// first; `m = 0` yields the single empty permutation.
pub fn lex_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut remaining: Vec<usize> = (1..=m).collect();
    let mut prefix = Vec::with_capacity(m);
    build(&mut remaining, &mut prefix, &mut out);
    out
}

fn build(remaining: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if remaining.is_empty() {
        out.push(prefix.clone());
        return;
    }
    for i in 0..remaining.len() {
        let v = remaining.remove(i);
        prefix.push(v);
        build(remaining, prefix, out);
        prefix.pop();
        remaining.insert(i, v);
    }
}

/// `+1` for even permutations, `-1` for odd ones.
pub fn parity(perm: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Coefficient map over permutations, selecting which immanant is computed:
/// `sgn(σ)` for the determinant, `1` for the permanent, or an arbitrary
/// nonzero assignment for a custom immanant.
#[derive(Debug, Clone, PartialEq)]
pub enum SignFunction {
    Determinant,
    Permanent,
    Custom(HashMap<Vec<usize>, Complex64>),
}

impl SignFunction {
    /// Builds a custom coefficient map, rejecting zero coefficients.
    pub fn custom(map: HashMap<Vec<usize>, Complex64>) -> Result<Self> {
        for (perm, c) in &map {
            if c.norm() == 0.0 {
                return Err(Error::BadSignFunction(format!(
                    "coefficient for {perm:?} is zero"
                )));
            }
        }
        Ok(SignFunction::Custom(map))
    }

    /// Checks that the map covers every permutation of `1..=m`.
    pub fn validate_for(&self, m: usize) -> Result<()> {
        if let SignFunction::Custom(map) = self {
            for perm in lex_permutations(m) {
                match map.get(&perm) {
                    None => {
                        return Err(Error::BadSignFunction(format!(
                            "missing coefficient for permutation {perm:?}"
                        )))
                    }
                    Some(c) if c.norm() == 0.0 => {
                        return Err(Error::BadSignFunction(format!(
                            "coefficient for {perm:?} is zero"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, perm: &[usize]) -> Complex64 {
        match self {
            SignFunction::Determinant => Complex64::new(parity(perm) as f64, 0.0),
            SignFunction::Permanent => Complex64::ONE,
            SignFunction::Custom(map) => map.get(perm).copied().unwrap_or(Complex64::ZERO),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignFunction::Determinant => "determinant",
            SignFunction::Permanent => "permanent",
            SignFunction::Custom(_) => "custom",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order_and_count() {
        let perms = lex_permutations(3);
        assert_eq!(perms.len(), 6);
        assert_eq!(perms[0], vec![1, 2, 3]);
        assert_eq!(perms[1], vec![1, 3, 2]);
        assert_eq!(perms[5], vec![3, 2, 1]);
    }

    #[test]
    fn parity_matches_transposition_count() {
        assert_eq!(parity(&[1, 2, 3]), 1);
        assert_eq!(parity(&[2, 1, 3]), -1);
        assert_eq!(parity(&[3, 1, 2]), 1);
        assert_eq!(parity(&[]), 1);
    }

    #[test]
    fn custom_rejects_zero_coefficients() {
        let mut map = HashMap::new();
        map.insert(vec![1, 2], Complex64::ZERO);
        map.insert(vec![2, 1], Complex64::ONE);
        assert!(SignFunction::custom(map).is_err());
    }

    #[test]
    fn custom_must_cover_all_permutations() {
        let mut map = HashMap::new();
        map.insert(vec![1, 2], Complex64::ONE);
        let sf = SignFunction::custom(map).unwrap();
        assert!(sf.validate_for(2).is_err());
        assert!(sf.validate_for(1).is_err());
    }
}
