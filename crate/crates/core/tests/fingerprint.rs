use num_bigint::BigInt;
use proptest::prelude::*;

use tqf_core::algebra::TernaryForm;
use tqf_core::discriminant::disc_eval;
use tqf_core::fingerprint::{
    count_points_hyperelliptic, count_points_quartic, fingerprint, good_primes, group, primes_up_to,
};
use tqf_core::reduce::{GeneratorAction, Word};
use tqf_core::search::CurveRecord;

fn q(s: &str) -> TernaryForm {
    TernaryForm::parse(4, s).unwrap()
}

fn record(f: &TernaryForm) -> CurveRecord {
    CurveRecord {
        disc: disc_eval(f).unwrap(),
        coeffs: f.to_i64().unwrap(),
    }
}

/// Zeros in `F_p³ \ {0}` divided by `p − 1`.
fn orbit_count(f: &TernaryForm, p: u64) -> u64 {
    let mut zeros = 0;
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                if (x, y, z) != (0, 0, 0) && f.evaluate_mod_p([x, y, z], p).unwrap() == 0 {
                    zeros += 1;
                }
            }
        }
    }
    zeros / (p - 1)
}

const C1: &str = "x^3z + x^2yz + x^2z^2 + xy^3 - xy^2z + y^4 - y^3z - yz^3";
const C2_H: [i64; 5] = [1, 0, 1, 1, 1];
const C2_F: [i64; 8] = [8, -16, -3, 18, -4, -8, 0, 1];

#[test]
fn the_324480_pair_collides() {
    let f = q("x^3y + x^3z + x^2y^2 - 2x^2yz - 4x^2z^2 - 4xy^3 + xz^3 + 2y^4 - 2yz^3 + z^4");
    let g = q("x^4 + x^3y + 2x^3z + 4x^2y^2 - xy^3 - 2xy^2z + y^4 + 3y^3z + 5y^2z^2 + 4yz^3 + 2z^4");
    let fp = fingerprint(&f, 256).unwrap();
    assert_eq!(fp.abs_disc, BigInt::from(324_480));
    assert_eq!(fp, fingerprint(&g, 256).unwrap());
    assert!(fp.counts.iter().any(|&(p, _)| p == 7));

    let other = q("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3");
    let records = [record(&f), record(&other), record(&g)];
    let grouping = group(&records, 256).unwrap();
    assert_eq!(grouping.classes, vec![vec![0, 2], vec![1]]);
    let collisions: Vec<_> = grouping.collisions().collect();
    assert_eq!(collisions, vec![&vec![0, 2]]);
    assert_eq!(group(&records, 256).unwrap(), grouping);
}

#[test]
fn plane_and_hyperelliptic_models_agree_up_to_1000() {
    let c1 = q(C1);
    assert_eq!(disc_eval(&c1).unwrap().magnitude(), BigInt::from(8233).magnitude());
    let primes = good_primes(&c1, 1000).unwrap();
    assert_eq!(primes, primes_up_to(1000));
    for p in primes {
        assert_eq!(
            count_points_quartic(&c1, p).unwrap(),
            count_points_hyperelliptic(&C2_H, &C2_F, p).unwrap(),
            "p = {p}"
        );
    }
}

#[test]
fn two_points_at_infinity_for_c2() {
    // T² + T has the two roots 0 and −1 in every F_p
    for p in [3u64, 5, 7, 11] {
        let with = count_points_hyperelliptic(&C2_H, &C2_F, p).unwrap();
        let affine: u64 = (0..p as i64)
            .map(|x| {
                let h: i64 = C2_H.iter().rev().fold(0, |a, &c| (a * x + c).rem_euclid(p as i64));
                let f: i64 = C2_F.iter().rev().fold(0, |a, &c| (a * x + c).rem_euclid(p as i64));
                (0..p as i64).filter(|y| (y * y + h * y - f).rem_euclid(p as i64) == 0).count() as u64
            })
            .sum();
        assert_eq!(with, affine + 2);
    }
}

#[test]
fn chart_count_matches_orbit_count() {
    let forms = [
        q("x^4 + y^4 + z^4"),
        q("x^3y + y^3z + z^3x"),
        q(C1),
        q("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3"),
    ];
    for f in &forms {
        for p in good_primes(f, 7).unwrap() {
            assert_eq!(count_points_quartic(f, p).unwrap(), orbit_count(f, p));
        }
    }
}

#[test]
fn distinct_discriminants_give_distinct_classes() {
    let a = q("x^3z + x^2z^2 + xy^3 - xy^2z + y^2z^2 - yz^3");
    let b = q(C1);
    let g = group(&[record(&a), record(&b)], 64).unwrap();
    assert_eq!(g.classes.len(), 2);
    assert_eq!(g.collisions().count(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_are_invariant_under_generator_words(
        coeffs in prop::collection::vec(-2i64..=2, 15),
        steps in prop::collection::vec(0u8..4, 0..6),
        negate in any::<bool>(),
    ) {
        let f = TernaryForm::from_i64(4, &coeffs).unwrap();
        let Ok(primes) = good_primes(&f, 50) else { return Ok(()) };
        let w = Word { steps, negate };
        let g = TernaryForm::from_i64(4, &w.apply(&GeneratorAction::new(4).unwrap(), &coeffs)).unwrap();
        for p in primes {
            prop_assert_eq!(count_points_quartic(&f, p).unwrap(), count_points_quartic(&g, p).unwrap());
        }
    }

    #[test]
    fn grouping_is_a_partition(seed in prop::collection::vec(prop::collection::vec(-1i64..=1, 15), 1..6)) {
        let records: Vec<CurveRecord> = seed
            .iter()
            .filter_map(|c| {
                let f = TernaryForm::from_i64(4, c).unwrap();
                let d = disc_eval(&f).unwrap();
                (d != BigInt::from(0)).then(|| CurveRecord { disc: d, coeffs: c.clone() })
            })
            .collect();
        let g = group(&records, 40).unwrap();
        let mut seen: Vec<usize> = g.classes.concat();
        seen.sort();
        prop_assert_eq!(seen, (0..records.len()).collect::<Vec<_>>());
    }
}
