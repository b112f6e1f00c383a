//! Labels of the synthetic generators checked against independent
//! re-statements of each formula.

use ari::dataset::FeatureId;
use ari::relevance::{dif_index, naive};
use ari::synthetic::{SyntheticFunction, SyntheticSpec};

fn sieve(limit: usize) -> Vec<bool> {
    let mut prime = vec![true; limit];
    prime[0] = false;
    prime[1] = false;
    for p in 2..limit {
        if prime[p] {
            for q in (p * p..limit).step_by(p) {
                prime[q] = false;
            }
        }
    }
    prime
}

fn reference(g: SyntheticFunction, x: &[u32], primes: &[bool]) -> u32 {
    let b = |i: usize| x[i - 1] != 0;
    let v = |i: usize| x[i - 1];
    let truth = match g {
        SyntheticFunction::G1 => b(1) && (b(2) || b(3)),
        SyntheticFunction::G2 => v(1) != v(2),
        SyntheticFunction::G3 => ((v(1) != v(2)) as u32) != (b(3) as u32),
        SyntheticFunction::G4 => x.iter().sum::<u32>() == 3,
        SyntheticFunction::G5 => (b(1) || b(2) || b(3)) && (b(4) || !b(5) || b(6)),
        SyntheticFunction::G6 => b(1) && (b(2) || !b(3)),
        SyntheticFunction::G7 => v(1) + v(2) + v(3) == 2,
        SyntheticFunction::G8 => {
            let value: usize = x.iter().enumerate().map(|(i, &bit)| (bit as usize) << (x.len() - 1 - i)).sum();
            primes[value]
        }
    };
    truth as u32
}

#[test]
fn binary_labels_match_reference() {
    let primes = sieve(1024);
    for g in SyntheticFunction::ALL {
        let ds = SyntheticSpec::new(g).generate().unwrap();
        assert_eq!(ds.n_rows(), 1024);
        for r in 0..ds.n_rows() {
            assert_eq!(ds.label(r), reference(g, ds.row(r), &primes), "{g} row {r}");
        }
    }
}

#[test]
fn ternary_labels_match_reference() {
    for g in SyntheticFunction::ALL.into_iter().filter(|&g| g != SyntheticFunction::G8) {
        let ds = SyntheticSpec::new(g).with_dimension(7).with_range(3).generate().unwrap();
        assert_eq!(ds.n_rows(), 2187);
        for r in 0..ds.n_rows() {
            assert_eq!(ds.label(r), reference(g, ds.row(r), &[]), "{g} row {r}");
        }
    }
}

#[test]
fn full_enumeration_has_no_duplicates() {
    let ds = SyntheticSpec::new(SyntheticFunction::G5).with_dimension(8).with_range(3).generate().unwrap();
    let rows: std::collections::HashSet<&[u32]> = ds.rows().collect();
    assert_eq!(rows.len(), 3usize.pow(8));
}

#[test]
fn g4_positive_count_is_ten_choose_three() {
    let ds = SyntheticSpec::new(SyntheticFunction::G4).generate().unwrap();
    let by_popcount = ds.rows().filter(|r| r.iter().filter(|&&b| b == 1).count() == 3).count();
    assert_eq!(by_popcount, 120);
    assert_eq!(ds.labels().iter().filter(|&&y| y == 1).count(), by_popcount);
}

#[test]
fn g8_prime_count() {
    let ds = SyntheticSpec::new(SyntheticFunction::G8).generate().unwrap();
    let expected = sieve(1024).iter().filter(|&&p| p).count();
    assert_eq!(expected, 172);
    assert_eq!(ds.labels().iter().filter(|&&y| y == 1).count(), expected);
}

#[test]
fn cube_val_sets_and_pair_counts_by_brute_force() {
    let ds = SyntheticSpec::new(SyntheticFunction::G2).generate().unwrap();
    for f in ds.feature_ids() {
        assert_eq!(ds.val_set(f).unwrap().into_iter().collect::<Vec<_>>(), [0, 1]);
    }
    for f in [FeatureId(0), FeatureId(4), FeatureId(9)] {
        let oracle = naive::dif_index(&ds, f).unwrap();
        assert_eq!(oracle.len(), 512);
        assert_eq!(dif_index(&ds, f).unwrap(), oracle);
    }
}
