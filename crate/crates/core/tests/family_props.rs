mod common;

use common::*;
use proptest::prelude::*;
use schatten_core::family::{rank_one_family, MaxNormWeighting, module_max_norm};
use schatten_core::spectral::op_norm;
use schatten_core::{CMatrix, Side, WeightedFamily, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn row_and_column_norms_match_block_oracles(seed in any::<u64>(), d in 1usize..9, len in 1usize..9) {
        let fam = WeightedFamily::unweighted(family(&mut rng(seed), len, d)).unwrap();
        let row = op_norm(&fam.block_row().unwrap()).unwrap();
        let col = op_norm(&fam.block_column().unwrap()).unwrap();
        prop_assert!(rel_close(fam.row_norm().unwrap(), row, 1e-9));
        prop_assert!(rel_close(fam.column_norm().unwrap(), col, 1e-9));
    }

    #[test]
    fn l1_imbedding(seed in any::<u64>(), d in 1usize..7, len in 1usize..9) {
        let mut g = rng(seed);
        let members = family(&mut g, len, d);
        let raw = weights(&mut g, len);
        let total: f64 = raw.iter().sum();
        let lambda: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let fam = WeightedFamily::new(members, lambda).unwrap();
        let left = op_norm(&fam.gram_left(1.0)).unwrap();
        let right = op_norm(&fam.gram_right(0.0)).unwrap();
        prop_assert!(left <= right * (1.0 + 1e-8) + 1e-10, "{left} > {right}");
    }

    #[test]
    fn tail_norm_non_increasing(seed in any::<u64>(), d in 1usize..7, len in 1usize..9) {
        let mut g = rng(seed);
        let members = family(&mut g, len, d);
        let fam = WeightedFamily::new(members, weights(&mut g, len)).unwrap();
        for side in [Side::Left, Side::Right] {
            let tails: Vec<f64> = (1..=len + 1).map(|k| fam.tail_norm(k, side, 1.0).unwrap()).collect();
            prop_assert!(tails.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-12), "{tails:?}");
            prop_assert_eq!(*tails.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn rank_one_identities(seed in any::<u64>(), d in 1usize..7) {
        let mut g = rng(seed);
        let e = haar(&mut g, d);
        let f = haar(&mut g, d);
        let lambda = weights(&mut g, d);
        let (fe, _) = rank_one_family(&e, &f, d).unwrap();
        // Σ Aₙ*Aₙ = I
        prop_assert!(fe.gram_right(0.0).max_abs_diff(&CMatrix::identity(d)) <= 1e-12);
        // Σ λₙ AₙAₙ* = (Σλₙ)·e₁e₁*
        let weighted = fe.with_primary(lambda.clone()).unwrap().gram_left(1.0);
        let e1 = e.col(0);
        let expected = (&e1 * &e1.adjoint()).scale(lambda.iter().sum());
        prop_assert!(weighted.max_abs_diff(&expected) <= 1e-12 * lambda.iter().sum::<f64>().max(1.0));
    }

    #[test]
    fn max_norm_dominates_member_norms(seed in any::<u64>(), d in 1usize..6, len in 1usize..6) {
        let mut g = rng(seed);
        let fam = WeightedFamily::unweighted(family(&mut g, len, d)).unwrap();
        let ones = vec![1.0; len];
        let m = module_max_norm(&fam, &ones, &ones, MaxNormWeighting::default()).unwrap();
        prop_assert!(fam.max_member_norm().unwrap() <= m * (1.0 + 1e-10));
    }
}

#[test]
fn rank_one_family_rejects_excess_count() {
    let id = CMatrix::identity(3);
    assert!(rank_one_family(&id, &id, 4).is_err());
    let (fe, ff) = rank_one_family(&id, &id, 3).unwrap();
    assert_eq!(fe.members()[2].get(0, 2), C64::new(1.0, 0.0));
    assert_eq!(ff.len(), 3);
}
