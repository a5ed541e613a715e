use proptest::prelude::*;
use shearlet_embed::analytic::psi_in_ltheta;
use shearlet_embed::exponents::{gamma, theta_from};
use shearlet_embed::verdict::{exists_alpha, max_smoothness_k, same_embedding_behavior};
use shearlet_embed::{decide, Answer, ExtReal, GroupSpec, ParamTuple, Rational, WeightSpec};

fn rat(lo: i128, hi: i128, den: i128) -> impl Strategy<Value = Rational> {
    (lo * den..=hi * den).prop_map(move |n| Rational::new(n, den))
}

fn exponent() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        1 => Just(ExtReal::Infinite),
        6 => (1i128..=48, 1i128..=12).prop_map(|(n, d)| ExtReal::finite(Rational::new(n, d)).unwrap()),
    ]
}

fn exponent_up_to_two() -> impl Strategy<Value = ExtReal> {
    (1i128..=12).prop_flat_map(|d| (1..=2 * d).prop_map(move |n| ExtReal::finite(Rational::new(n, d)).unwrap()))
}

fn group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        3 => (rat(-2, 3, 4), rat(-2, 3, 4)).prop_map(|(a, b)| GroupSpec::standard(a, b)),
        1 => rat(-2, 2, 4).prop_map(GroupSpec::toeplitz),
    ]
}

fn tuple() -> impl Strategy<Value = ParamTuple> {
    (
        exponent(),
        exponent(),
        exponent(),
        rat(-2, 2, 8),
        rat(0, 6, 4),
        0u32..=4,
    )
        .prop_map(|(p, q, r, alpha, beta, k)| ParamTuple::new(p, q, r, WeightSpec::new(alpha, beta).unwrap(), k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn decide_reduces_to_membership_outside_gap(g in group(), t in tuple()) {
        prop_assume!(t.q <= ExtReal::int(2) || t.q.is_infinite());
        let a = t.weight.alpha + g.det_exponent() * gamma(t.p, t.q, t.r);
        let beta = t.weight.beta;
        let bk = beta - Rational::from_int(t.k as i128);
        let theta = theta_from(t.q, t.r);
        let member = t.p <= t.q
            && !bk.is_negative()
            && psi_in_ltheta(&g, a, beta, theta).unwrap().member
            && psi_in_ltheta(&g, a, bk, theta).unwrap().member;
        let v = decide(&g, &t).unwrap();
        prop_assert_eq!(v.answer == Answer::Embeds, member);
        prop_assert_eq!(v.failed_first.is_none(), member);
    }

    #[test]
    fn embedding_is_monotone_in_k(g in group(), t in tuple()) {
        let v = decide(&g, &t).unwrap();
        if v.answer == Answer::Embeds {
            for k in 0..t.k {
                let lower = ParamTuple { k, ..t };
                prop_assert_eq!(decide(&g, &lower).unwrap().answer, Answer::Embeds, "k = {}", k);
            }
        }
    }

    #[test]
    fn gap_answers_only_for_middle_q(g in group(), t in tuple()) {
        let v = decide(&g, &t).unwrap();
        if v.answer == Answer::IndeterminateGap {
            prop_assert!(t.q > ExtReal::int(2) && !t.q.is_infinite());
        }
    }

    #[test]
    fn equivalent_groups_decide_alike(l1 in rat(-2, 3, 4), l2 in rat(-2, 3, 4), t in tuple()) {
        let (g1, g2) = (GroupSpec::standard(l1, l2), GroupSpec::standard(l2, l1));
        prop_assert!(same_embedding_behavior(&g1, &g2));
        prop_assert_eq!(decide(&g1, &t).unwrap().answer, decide(&g2, &t).unwrap().answer);
    }

    #[test]
    fn no_alpha_means_no_embedding(
        g in group(),
        p in exponent_up_to_two(),
        q in exponent_up_to_two(),
        beta in rat(0, 6, 4),
        k in 0u32..=3,
    ) {
        prop_assume!(p <= q);
        match exists_alpha(&g, p, q, beta, k).unwrap() {
            Some(alpha) => {
                let t = ParamTuple::new(p, q, p, WeightSpec::new(alpha, beta).unwrap(), k);
                prop_assert_eq!(decide(&g, &t).unwrap().answer, Answer::Embeds);
            }
            None => {
                for n in -64..=64 {
                    let t = ParamTuple::new(p, q, p, WeightSpec::new(Rational::new(n, 4), beta).unwrap(), k);
                    prop_assert_ne!(decide(&g, &t).unwrap().answer, Answer::Embeds, "alpha = {}/4", n);
                }
            }
        }
    }

    // Groups with 1 <= lambda1 <= lambda2 and lambda2 > 1.
    #[test]
    fn smoothness_grows_as_p_shrinks(
        l1 in rat(1, 2, 4),
        extra in rat(0, 2, 4),
        alpha in rat(-2, 2, 4),
        beta in rat(0, 8, 4),
    ) {
        let l2 = l1 + extra;
        prop_assume!(l2 > Rational::ONE);
        let g = GroupSpec::standard(l1, l2);
        let ps = ["1/2", "1", "3/2", "2"].map(|s| s.parse::<ExtReal>().unwrap());
        let ks: Vec<Option<u32>> = ps.iter().map(|p| max_smoothness_k(&g, *p, alpha, beta).unwrap()).collect();
        // Shrinking p lowers the shifted exponent, which relaxes the upper
        // bound but can break the lower one; compare only from a p at which
        // some embedding exists.
        for w in ks.windows(2) {
            if w[0].is_some() {
                prop_assert!(w[1] <= w[0], "{:?} for p in 1/2, 1, 3/2, 2", ks);
            }
        }
    }
}

#[test]
fn isotropic_group_never_embeds_with_smoothness() {
    let g = GroupSpec::standard(Rational::ONE, Rational::ONE);
    let two = ExtReal::int(2);
    let w = WeightSpec::new(Rational::ZERO, Rational::ONE).unwrap();
    assert_eq!(
        decide(&g, &ParamTuple::new(two, two, two, w, 1)).unwrap().answer,
        Answer::DoesNotEmbed
    );
}
