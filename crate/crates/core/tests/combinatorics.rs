use horn_core::combinatorics::{complement_prefix, compose, insert_gaps, pi, subsets, sym};
use horn_core::spectra::q_splits;
use horn_core::{HornCatalog, HornSetKind, IndexSet};
use proptest::prelude::*;

fn index_set(max_n: usize) -> impl Strategy<Value = (usize, IndexSet)> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let elems = mask.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k + 1).collect();
            (n, IndexSet::new(elems).unwrap())
        })
    })
}

/// A set of size `len` drawn from `[n]`, `n ≥ len`.
fn sized_subset(len: usize, extra: usize) -> impl Strategy<Value = IndexSet> {
    proptest::sample::subsequence((1..=len + extra).collect::<Vec<_>>(), len).prop_map(|v| IndexSet::new(v).unwrap())
}

/// `(I, A, B)` with `A ⊆ [|I|]` and `B ⊆ [|A|]`.
fn chain() -> impl Strategy<Value = (IndexSet, IndexSet, IndexSet)> {
    (1usize..7, 0usize..4)
        .prop_flat_map(|(len, extra)| (sized_subset(len, extra), 0..=len))
        .prop_flat_map(|(i, a_len)| {
            let n = i.len();
            (Just(i), sized_subset(a_len, n - a_len), 0..=a_len)
        })
        .prop_flat_map(|(i, a, b_len)| {
            let n = a.len();
            (Just(i), Just(a), sized_subset(b_len, n - b_len))
        })
}

proptest! {
    #[test]
    fn sym_is_an_involution((n, set) in index_set(10)) {
        let once = sym(&set, n).unwrap();
        prop_assert_eq!(sym(&once, n).unwrap(), set);
    }

    #[test]
    fn complement_prefix_avoids_the_set((_n, set) in index_set(10), p in 0usize..8) {
        let c = complement_prefix(&set, p);
        prop_assert_eq!(c.len(), p);
        prop_assert!(c.iter().all(|x| !set.contains(x)));
        if let Some(top) = c.max_element() {
            prop_assert!((1..top).all(|x| set.contains(x) || c.contains(x)));
        }
    }

    #[test]
    fn compose_is_associative((i, a, b) in chain()) {
        let left = compose(&compose(&i, &a).unwrap(), &b).unwrap();
        let right = compose(&i, &compose(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }
}

#[test]
fn pi_weight_identity_exhaustive() {
    for n in 0..=8 {
        for r in 0..=n {
            for set in subsets(n, r) {
                let total = pi(&set).size() + pi(&sym(&set, n).unwrap()).size();
                assert_eq!(total, r * (n - r), "{set} in [{n}]");
            }
        }
    }
}

#[test]
fn inserted_gaps_stay_in_t() {
    let cat = HornCatalog::new(2);
    for n in 1..=4 {
        for r in 0..=n {
            for t in cat.enumerate(HornSetKind::T, n, r).unwrap().iter() {
                for shift in 0..=2 {
                    for q in q_splits(2, r) {
                        let lifted = insert_gaps(t, &q, shift).unwrap();
                        assert!(
                            cat.member(HornSetKind::T, &lifted).unwrap(),
                            "{t} with q = {q:?}, shift {shift} gives {lifted}"
                        );
                    }
                }
            }
        }
    }
}
