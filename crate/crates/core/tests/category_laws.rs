mod common;

use common::*;
use convexsem::diagram::LazyRelation;
use convexsem::domain::AtomicDomain;
use convexsem::relation::{Relation, Space};
use proptest::prelude::*;

#[test]
fn tree_shapes_are_counted_correctly() {
    // unlabelled rooted trees with 1..=8 nodes: 1, 1, 2, 4, 9, 20, 48, 115
    assert_eq!(all_tree_shapes(8).len(), 200);
    assert_eq!(all_tree_shapes(4).len(), 8);
}

#[test]
fn oracle_catches_a_wrong_composition() {
    // sanity check on the oracle itself: converse is not composition
    let mut rng = rng(7);
    let d = AtomicDomain::tree("t", random_tree(&mut rng, 8)).unwrap();
    let a = Space::new(vec![d]);
    let mut witnessed = false;
    for _ in 0..50 {
        let r = random_relation(&mut rng, &a, &a);
        let s = random_relation(&mut rng, &a, &a);
        let good = pairs(&r.compose(&s).unwrap());
        if good != pairs(&s.compose(&r).unwrap()) {
            witnessed = true;
            assert_eq!(good, oracle_compose(&pairs(&r), &pairs(&s)));
        }
    }
    assert!(witnessed, "composition looked commutative on 50 samples");
}

#[test]
fn snake_and_frobenius_on_the_sentence_lattice() {
    let s = Space::new(vec![AtomicDomain::tuple_max("sentence", 2).unwrap()]);
    snake_and_frobenius(&s).unwrap();
    snake_and_frobenius(&s.tensor(&s)).unwrap();
}

#[test]
fn empty_relation_is_absorbing() {
    let mut rng = rng(11);
    let d = AtomicDomain::tree("t", random_tree(&mut rng, 6)).unwrap();
    let a = Space::new(vec![d]);
    let r = random_relation(&mut rng, &a, &a);
    let e = Relation::empty(a.clone(), a.clone());
    assert!(r.compose(&e).unwrap().is_empty());
    assert!(e.compose(&r).unwrap().is_empty());
    assert!(pairs(&r.tensor(&e)).is_empty());
    let lazy = LazyRelation::from_relation(&e).compose(&LazyRelation::identity(&a)).unwrap();
    assert!(lazy_pairs(&lazy).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn category_laws_hold(seed in any::<u64>()) {
        prop_assert_eq!(check_category_laws(seed, 3), Ok(9));
    }
}
