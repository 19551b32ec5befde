use num_bigint::BigUint;
use num_integer::Integer;
use proptest::prelude::*;

use abelian_bf::abgroup::{linking_form_from_surgery, FgAbelianGroup, LinkingForm};
use abelian_bf::bfcs::{
    partition_bf, partition_delta_route, partition_hom, verify_back_to_cs, verify_gauss_delta_all, Convention,
};
use abelian_bf::homology::ChainComplex;
use abelian_bf::linalg::IntMatrix;
use abelian_bf::manifolds::{catalog, connected_sum, lens_space};
use abelian_bf::sectors::{delta_support, verify_order_independence, SectorModel};

#[test]
fn routes_agree_on_rational_homology_spheres() {
    for m in catalog().into_iter().filter(|m| m.h1().rank() == 0) {
        let h1 = m.h1();
        let form = m.require_form().unwrap();
        for k in 1..=30 {
            for conv in [Convention::TorsionOnly, Convention::IncludeFreeFactor] {
                let a = partition_bf(&h1, k, conv).value;
                assert_eq!(partition_hom(&h1, k, conv).value, a, "{} k={k}", m.name);
                assert_eq!(
                    partition_delta_route(&h1, form, k, conv).unwrap().value,
                    a,
                    "{} k={k}",
                    m.name
                );
            }
        }
    }
}

#[test]
fn lens_cw_complexes_match_surgery() {
    for p in 2..=30u64 {
        let cw = ChainComplex::lens_cw(p as i64).homology(1).unwrap();
        for q in (1..p).filter(|q| q.gcd(&p) == 1) {
            assert_eq!(lens_space(p, q).unwrap().h1(), cw);
        }
    }
}

#[test]
fn partition_multiplies_over_connected_sums() {
    let all = catalog();
    for a in &all {
        for b in &all {
            let sum = connected_sum(a, b).unwrap();
            for k in [1, 2, 3, 4, 6, 12] {
                for conv in [Convention::TorsionOnly, Convention::IncludeFreeFactor] {
                    let whole = partition_bf(&sum.h1(), k, conv).value;
                    let parts = partition_bf(&a.h1(), k, conv).value * partition_bf(&b.h1(), k, conv).value;
                    assert_eq!(whole, parts, "{}#{} k={k}", a.name, b.name);
                }
            }
        }
    }
}

#[test]
fn catalog_partitions_at_k_one_are_torsion_orders() {
    let expected = [
        ("S3", 1u64),
        ("RP3", 2),
        ("L7_1", 7),
        ("L2_1#L3_1", 6),
        ("L5_1#L3_1", 15),
        ("RP3#RP3", 4),
    ];
    let all = catalog();
    for (name, value) in expected {
        let m = all.iter().find(|m| m.name == name).unwrap();
        assert_eq!(
            partition_bf(&m.h1(), 1, Convention::TorsionOnly).value,
            BigUint::from(value)
        );
    }
}

#[allow(clippy::needless_range_loop)]
fn nonsingular_symmetric() -> impl Strategy<Value = IntMatrix> {
    (1usize..=3)
        .prop_flat_map(|n| proptest::collection::vec(-4i64..=4, n * (n + 1) / 2).prop_map(move |v| (n, v)))
        .prop_map(|(n, v)| {
            let mut rows = vec![vec![0i64; n]; n];
            let mut it = v.into_iter();
            for i in 0..n {
                for j in i..n {
                    let x = it.next().unwrap();
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            IntMatrix::from_rows(&rows)
        })
        .prop_filter("nonsingular, small torsion", |l| {
            l.determinant()
                .map(|d| d != 0.into() && d.magnitude() <= &BigUint::from(40u32))
                .unwrap_or(false)
        })
}

fn negated(l: &IntMatrix) -> IntMatrix {
    let rows: Vec<Vec<i64>> = l
        .to_i64_rows()
        .unwrap()
        .into_iter()
        .map(|r| r.into_iter().map(|x| -x).collect())
        .collect();
    IntMatrix::from_rows(&rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // reversing orientation negates the surgery matrix and the linking form;
    // none of the identities may notice
    #[test]
    fn identities_are_insensitive_to_orientation(l in nonsingular_symmetric()) {
        let (g, q) = linking_form_from_surgery(&l).unwrap();
        let (g_neg, q_neg) = linking_form_from_surgery(&negated(&l)).unwrap();
        prop_assert_eq!(&g, &g_neg);
        let t = g.torsion_subgroup();
        for x in t.torsion_elements() {
            for y in t.torsion_elements() {
                let s = q.pair(&x, &y) + q_neg.pair(&x, &y);
                prop_assert!(s.is_integer());
            }
        }
        let ks: Vec<u64> = (1..=6).collect();
        for (form, label) in [(&q, "L"), (&q_neg, "-L")] {
            for (k, r) in verify_gauss_delta_all(&t, form, &ks).unwrap() {
                prop_assert!(r.holds, "{} k={}", label, k);
            }
            if t.torsion_order() <= BigUint::from(24u32) {
                for k in 1..=4 {
                    prop_assert!(verify_back_to_cs(&t, form, k).unwrap().holds);
                }
            }
        }
        for k in 1..=6u64 {
            let a = partition_delta_route(&g, &q, k, Convention::TorsionOnly).unwrap();
            let b = partition_delta_route(&g, &q_neg, k, Convention::TorsionOnly).unwrap();
            prop_assert_eq!(a.value, b.value);
            let m = k * t.exponent();
            let model = SectorModel::new(0, t.clone(), q_neg.clone(), m).unwrap();
            prop_assert!(verify_order_independence(&model, k).unwrap());
            let model_pos = SectorModel::new(0, t.clone(), q.clone(), m).unwrap();
            prop_assert_eq!(delta_support(&model, k).unwrap(), delta_support(&model_pos, k).unwrap());
        }
    }

    #[test]
    fn random_forms_satisfy_gauss_iff_nondegenerate(
        chain in prop_oneof![Just(vec![2u64, 2]), Just(vec![2, 4]), Just(vec![3, 3]), Just(vec![2, 6]), Just(vec![4, 4])],
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        let t = FgAbelianGroup::new(0, chain).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let q = LinkingForm::random(&t, &mut rng);
        let reports = verify_gauss_delta_all(&t, &q, &[1]).unwrap();
        prop_assert_eq!(reports[0].1.holds, q.is_nondegenerate(&t));
    }
}
