use proptest::prelude::*;
use vdmac::bounds;
use vdmac::codes::LinearCode;
use vdmac::field::Field;
use vdmac::ks::{cover_check, ks_decode, ks_encode, stack, unstack_dense, FrameLayout};
use vdmac::Gf;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gf49_field_laws(a in 0u64..49, b in 0u64..49, c in 0u64..49) {
        let f = Field::extension(&Field::new(7, 1).unwrap(), 2).unwrap();
        let (a, b, c) = (f.element(a).unwrap(), f.element(b).unwrap(), f.element(c).unwrap());
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.sub(f.add(a, b), b), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Gf(1));
        }
    }

    #[test]
    fn rs_erasures_up_to_n_minus_k_are_corrected(
        msg in proptest::collection::vec(0u64..16, 4),
        erased in proptest::sample::subsequence((0..12usize).collect::<Vec<_>>(), 0..=8),
    ) {
        let f = Field::new(2, 4).unwrap();
        let code = LinearCode::reed_solomon(&f, 12, 4).unwrap();
        let msg: Vec<_> = msg.into_iter().map(|v| f.element(v).unwrap()).collect();
        let word = code.encode(&msg).unwrap();
        let mut received: Vec<_> = word.iter().copied().map(Some).collect();
        for &i in &erased {
            received[i] = None;
        }
        prop_assert_eq!(code.erasure_decode(&received).unwrap(), Some(word));
    }

    #[test]
    fn ks_and_stacking_round_trip(symbols in proptest::collection::vec(0usize..8, 12), m in prop_oneof![Just(1usize), Just(2), Just(3), Just(4), Just(6)]) {
        let f = Field::new(2, 3).unwrap();
        let word: Vec<_> = symbols.iter().map(|&i| f.element_at(i).unwrap()).collect();
        let ks = ks_encode(&f, &word);
        prop_assert_eq!(ks_decode(&f, &ks).unwrap(), word);
        let layout = FrameLayout::new(8, m, 12 / m, 8 * m + 5).unwrap();
        let block = stack(&ks, layout).unwrap();
        prop_assert_eq!(block.unstack(), ks.clone());
        prop_assert_eq!(unstack_dense(&block.to_dense(), layout).unwrap(), ks);
        prop_assert!(cover_check(&block, &block.to_dense()).unwrap());
    }

    #[test]
    fn beta_grows_with_users_and_load(q_sub in 8u64..512, m in 1u64..8, users in 1u64..200) {
        prop_assume!(m <= q_sub);
        let b = bounds::beta(q_sub, m, users).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
        prop_assert!(bounds::beta(q_sub, m, users + 1).unwrap() >= b);
        if m < q_sub {
            prop_assert!(bounds::beta(q_sub, m + 1, users).unwrap() >= b);
        }
    }

    #[test]
    fn required_distance_meets_target(k in 1u64..200, beta in 0.01f64..0.9, exp in 2i32..15) {
        let p_r = 10f64.powi(-exp);
        let d = bounds::required_d(k, 64, p_r, beta).unwrap();
        prop_assert!(bounds::log2_loose_bound(64, k, beta, d) <= p_r.log2() + 1e-9);
        if d > 1 {
            prop_assert!(bounds::log2_loose_bound(64, k, beta, d - 1) > p_r.log2() - 1e-9);
        }
    }
}
