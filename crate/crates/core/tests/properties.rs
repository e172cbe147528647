use proptest::prelude::*;

use dhs_core::bloch::make_state;
use dhs_core::chsh::completability_scan;
use dhs_core::ensemble::{bit_string, from_qubit, rotate};
use dhs_core::invariant_sim::HelixEnsemble;
use dhs_core::mach_zehnder::si_scan;
use dhs_core::padic::{label_distance, PAdicLabel};
use dhs_core::spherical::survey_conforming_triangles;
use dhs_core::{DiscretisationParam, Execution, ExactRational};

fn p(v: u64) -> DiscretisationParam {
    DiscretisationParam::new(v).unwrap()
}

const PRIMES: [u64; 4] = [13, 17, 101, 1009];

proptest! {
    #[test]
    fn rotation_has_order_p(pi in 0usize..4, m_frac in 0.0f64..1.0, k in -5000i64..5000) {
        let pv = PRIMES[pi];
        let m = 1 + (m_frac * (pv - 1) as f64) as u64 % (pv - 1);
        let s = bit_string(p(pv), m).unwrap();
        prop_assert_eq!(rotate(&s, k) == s, k.rem_euclid(pv as i64) == 0);
        let r = rotate(&s, k);
        prop_assert_eq!(r.mean(), s.mean());
        prop_assert_eq!(r.variance(), s.variance());
    }

    #[test]
    fn qubit_string_mean_is_cos_theta(m in 0u64..=17, n in 0u64..=17) {
        let q = make_state(p(17), m, n).unwrap();
        let s = from_qubit(&q);
        prop_assert_eq!(s.mean(), q.cos_theta());
        prop_assert_eq!(s.variance(), ExactRational::one() - q.cos_theta().square());
    }

    #[test]
    fn refined_labels_extend_coarse_ones(m in 0u64..=13, n in 0u64..13, sub in 0u64..=13, idx in 0u128..169) {
        let h1 = HelixEnsemble::new(&make_state(p(13), m, n).unwrap());
        let h2 = h1.refine(sub, 5).unwrap();
        let fine = h2.label(idx).unwrap();
        let coarse = h1.label(idx / 13).unwrap();
        prop_assert!(coarse.is_prefix_of(&fine));
        prop_assert_eq!(h1.trajectory_outcomes(&coarse).unwrap()[0], h2.trajectory_outcomes(&fine).unwrap()[0]);
    }

    #[test]
    fn label_metric_is_ultrametric(a in prop::collection::vec(0u64..3, 6), b in prop::collection::vec(0u64..3, 6), c in prop::collection::vec(0u64..3, 6)) {
        let l = |d: Vec<u64>| PAdicLabel::new(p(17), d).unwrap();
        let (a, b, c) = (l(a), l(b), l(c));
        let ab = label_distance(&a, &b).unwrap();
        let bc = label_distance(&b, &c).unwrap();
        let ac = label_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab.clone().max(bc));
        prop_assert_eq!(label_distance(&b, &a).unwrap(), ab);
    }
}

#[test]
fn execution_modes_agree() {
    let (s, q) = (Execution::Sequential, Execution::Parallel);
    assert_eq!(completability_scan(p(101), 300, 5, s).unwrap(), completability_scan(p(101), 300, 5, q).unwrap());
    assert_eq!(si_scan(p(17), 500, 200, 5, s).unwrap(), si_scan(p(17), 500, 200, 5, q).unwrap());
    let a = survey_conforming_triangles(p(13), 50, 100, 1_000_000, 5, s).unwrap();
    let b = survey_conforming_triangles(p(13), 50, 100, 1_000_000, 5, q).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.triangle, y.triangle);
        assert_eq!(x.verdict, y.verdict);
    }
}
