use cavity_singlet::qspace::{singlet_ket, zeta_ket, BasisLabel, Ket};
use proptest::prelude::*;

fn swap_atoms(k: &Ket, a: usize, b: usize) -> Ket {
    k.map_labels(|l| {
        let mut levels = l.atom_levels.clone();
        levels.swap(a, b);
        BasisLabel::new(levels, l.photon_number)
    })
}

fn distance(x: &Ket, y: &Ket) -> f64 {
    let mut d = x.clone();
    d.axpy((-1.0).into(), y);
    d.norm()
}

proptest! {
    #[test]
    fn singlet_is_antisymmetric(n in 2usize..=6, a in 0usize..6, b in 0usize..6) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let s = singlet_ket(n).unwrap();
        let mut minus = s.clone();
        minus.scale((-1.0).into());
        prop_assert!(distance(&swap_atoms(&s, a, b), &minus) < 1e-12);
    }
}

#[test]
fn singlet_has_n_factorial_terms() {
    let mut fact = 1;
    for n in 2..=6 {
        fact *= n;
        let s = singlet_ket(n).unwrap();
        assert_eq!(s.len(), fact);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zeta_states_are_orthonormal() {
    for n in 2..=5 {
        let mut all = Vec::new();
        for j in 0..n {
            for m in 1..=n - j {
                all.push(zeta_ket(n, j, m).unwrap());
            }
        }
        assert_eq!(all.len(), n * (n + 1) / 2);
        for (i, x) in all.iter().enumerate() {
            for (k, y) in all.iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((x.inner(y).norm() - want).abs() < 1e-12, "N = {n}: <{i}|{k}>");
            }
        }
    }
}

#[test]
fn initial_state_overlaps_singlet_by_one_over_n() {
    for n in 2..=6 {
        let s = singlet_ket(n).unwrap();
        let z = zeta_ket(n, 0, n).unwrap();
        assert!((s.inner(&z).norm_sqr() - 1.0 / n as f64).abs() < 1e-12);
    }
    assert!(zeta_ket(3, 1, 3).is_err());
}
