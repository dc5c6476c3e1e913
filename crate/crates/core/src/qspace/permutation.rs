use crate::error::{Error, Result};

/// Sign `(-1)^t` of a permutation of `0..len`, where `t` is the number of
/// transpositions needed to sort it.
///
/// Computed from the cycle decomposition: a permutation of `L` elements with
/// `c` cycles factors into `L - c` transpositions, and the parity of that count
/// does not depend on the factorization chosen.
pub fn permutation_parity(perm: &[usize]) -> Result<i8> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n {
            return Err(Error::NotAPermutation(format!("element {p} out of range 0..{n}")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::NotAPermutation(format!("element {p} repeated")));
        }
    }
    seen.iter_mut().for_each(|s| *s = false);
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    Ok(if (n - cycles) % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    /// Independent route: count inversions by brute force.
    fn inversion_sign(perm: &[usize]) -> i8 {
        let mut inv = 0;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn small_examples() {
        assert_eq!(permutation_parity(&[0, 1, 2]).unwrap(), 1);
        assert_eq!(permutation_parity(&[1, 0, 2]).unwrap(), -1);
        assert_eq!(permutation_parity(&[1, 2, 0]).unwrap(), 1);
        assert_eq!(permutation_parity(&[]).unwrap(), 1);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(matches!(permutation_parity(&[0, 0, 1]), Err(Error::NotAPermutation(_))));
        assert!(matches!(permutation_parity(&[0, 3, 1]), Err(Error::NotAPermutation(_))));
    }

    #[test]
    fn agrees_with_inversion_count_exhaustively() {
        for n in 0..=6 {
            for p in (0..n).permutations(n) {
                assert_eq!(permutation_parity(&p).unwrap(), inversion_sign(&p), "{p:?}");
            }
        }
    }

    fn shuffled() -> impl Strategy<Value = Vec<usize>> {
        (2usize..9).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    }

    proptest! {
        #[test]
        fn transposition_flips_sign(mut p in shuffled(), a in 0usize..9, b in 0usize..9) {
            let n = p.len();
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let before = permutation_parity(&p).unwrap();
            p.swap(a, b);
            prop_assert_eq!(permutation_parity(&p).unwrap(), -before);
        }
    }
}
