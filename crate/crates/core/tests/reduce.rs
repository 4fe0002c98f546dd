use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tqf_core::algebra::TernaryForm;
use tqf_core::discriminant::{disc_eval, DiscEvaluator};
use tqf_core::reduce::{bounded_class_enum, dedup, norm, GeneratorAction, Word};
use tqf_core::search::CurveRecord;

fn quartic(s: &str) -> Vec<i64> {
    TernaryForm::parse(4, s).unwrap().to_i64().unwrap()
}

fn record(c: &[i64]) -> CurveRecord {
    CurveRecord {
        disc: DiscEvaluator::cached(4).unwrap().eval(c).unwrap(),
        coeffs: c.to_vec(),
    }
}

fn abs_disc(c: &[i64]) -> BigInt {
    disc_eval(&TernaryForm::from_i64(4, c).unwrap()).unwrap().abs()
}

/// A random walk from `f` whose every step stays within `bound`.
fn bounded_walk(a: &GeneratorAction, f: &[i64], bound: i64, len: usize, rng: &mut impl Rng) -> (Vec<i64>, Word) {
    let mut g = f.to_vec();
    let mut w = Word::default();
    for _ in 0..len {
        let k = rng.gen_range(0..4);
        let img = a.apply(k, &g);
        if norm(&img) <= bound {
            g = img;
            w.steps.push(k as u8);
        }
    }
    if rng.gen_bool(0.5) {
        g.iter_mut().for_each(|x| *x = -*x);
        w.negate = true;
    }
    (g, w)
}

#[test]
fn two_classes_with_equal_discriminant_stay_apart() {
    let f1 = quartic("x^3z + x^2z^2 + xy^3 - xz^3 + y^3z");
    let f2 = quartic("x^3z + y^4 + 2y^3z - yz^3");
    assert_eq!(abs_disc(&f1), BigInt::from(492_075));
    assert_eq!(abs_disc(&f2), BigInt::from(492_075));
    let a = GeneratorAction::new(4).unwrap();
    let orbit = bounded_class_enum(&a, &f1, 81).unwrap();
    assert!(!orbit.contains(&f2));
    let out = dedup(vec![record(&f1), record(&f2)], 81).unwrap();
    assert_eq!(out.kept.len(), 2);
    assert!(out.merges.is_empty());
}

#[test]
fn synthetic_orbit_collapses_to_one_record() {
    let a = GeneratorAction::new(4).unwrap();
    let f = quartic("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3");
    let bound = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut images = std::collections::BTreeSet::new();
    while images.len() < 20 {
        let len = rng.gen_range(1..10);
        let (g, w) = bounded_walk(&a, &f, bound, len, &mut rng);
        assert_eq!(w.apply(&a, &f), g);
        images.insert(g);
    }
    let mut records: Vec<CurveRecord> = images.iter().map(|g| record(g)).collect();
    records.shuffle(&mut rng);
    let out = dedup(records, bound).unwrap();
    assert_eq!(out.kept.len(), 1);
    assert_eq!(out.merges.len(), 19);
    let kept = &out.kept[0].coeffs;
    assert_eq!(kept, images.iter().min_by(|x, y| record(x).sort_key_cmp(&record(y))).unwrap());
    for m in &out.merges {
        assert_eq!(&m.kept.coeffs, kept);
        assert_eq!(m.word.apply(&a, kept), m.removed.coeffs);
    }
}

#[test]
fn a_form_and_its_negative_merge() {
    let f = quartic("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3");
    let g: Vec<i64> = f.iter().map(|x| -x).collect();
    let out = dedup(vec![record(&f), record(&g)], 1).unwrap();
    assert_eq!(out.kept.len(), 1);
    assert_eq!(out.merges[0].word.to_string(), "N");
}

#[test]
fn dedup_ignores_input_order() {
    let a = GeneratorAction::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bases = [
        quartic("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3"),
        quartic("x^3z + x^2yz + x^2z^2 + xy^3 - xy^2z + y^4 - y^3z - yz^3"),
        quartic("x^4 + y^4 + z^4"),
    ];
    let mut records = Vec::new();
    for f in &bases {
        for _ in 0..6 {
            let (g, _) = bounded_walk(&a, f, 2, 8, &mut rng);
            records.push(record(&g));
        }
    }
    let reference = dedup(records.clone(), 2).unwrap();
    assert_eq!(reference.kept.len(), 3);
    for _ in 0..5 {
        records.shuffle(&mut rng);
        assert_eq!(dedup(records.clone(), 2).unwrap(), reference);
    }
}

#[test]
fn records_over_the_bound_are_kept_unexplored() {
    let f = quartic("3x^4 + y^4 + z^4");
    let out = dedup(vec![record(&f)], 2).unwrap();
    assert_eq!(out.kept.len(), 1);
    assert_eq!(out.over_bound, 1);
}

fn small_quartic() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1i64..=1, 15).prop_filter("nonsingular", |c| {
        DiscEvaluator::cached(4).unwrap().eval(c).map(|d| d != BigInt::from(0)).unwrap_or(false)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn larger_bounds_give_larger_orbits(f in small_quartic()) {
        let a = GeneratorAction::new(4).unwrap();
        let small = bounded_class_enum(&a, &f, 3).unwrap();
        let large = bounded_class_enum(&a, &f, 9).unwrap();
        for g in small.members() {
            prop_assert!(large.contains(&g));
        }
    }

    #[test]
    fn members_replay_and_preserve_the_discriminant(f in small_quartic()) {
        let a = GeneratorAction::new(4).unwrap();
        let orbit = bounded_class_enum(&a, &f, 2).unwrap();
        let d = abs_disc(&f);
        for g in orbit.members().iter().take(200) {
            prop_assert!(norm(g) <= 2);
            prop_assert_eq!(orbit.word_to(g).unwrap().apply(&a, &f), g.clone());
            prop_assert_eq!(abs_disc(g), d.clone());
        }
    }
}
