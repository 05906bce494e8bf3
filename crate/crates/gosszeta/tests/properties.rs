//! Cross-module properties: the coefficient valuations of the Frobenius
//! series, the finite-valuation criterion for permutations of the Dwork
//! matrix, block-cyclic vanishing, and the curve route against the
//! predictor on a second host.

use gosszeta::curve::{zeta_curve, EllipticHost};
use gosszeta::dwork::{
    build_beta, char_series_stabilized, profile_for_precision, IndexJ1, PsiMatrix,
};
use gosszeta::minperm::{nu_sequence, predicted_polygon, r_value, EnrichedPermutation};
use gosszeta::padic::{random_q_full, DigitProfile, PadicExponent};
use gosszeta::series::Valuation;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn beta_coefficient_valuations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n_prec = 128;
    for (p, b) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
        for _ in 0..4 {
            let y = random_q_full(&mut rng, p, b);
            let prof = profile_for_precision(&y, b, n_prec).unwrap();
            let table = DigitProfile::covering(&y, b, 60).unwrap();
            for i in 1..=b as usize {
                let beta = build_beta(&prof, i, n_prec).unwrap();
                for n in 0..=60i64 {
                    let Ok(yn) = table.y_partial(i, n) else { break };
                    if yn >= BigUint::from(n_prec) {
                        assert!(beta.valuation(n).lower_bound() >= n_prec as u64);
                        continue;
                    }
                    let want = Valuation::Finite(u64::try_from(&yn).unwrap());
                    assert_eq!(beta.valuation(n), want, "y = {y}, i = {i}, n = {n}");
                }
            }
        }
    }
}

fn random_permutation(rng: &mut ChaCha8Rng, b: usize, max_m: u64) -> EnrichedPermutation {
    if rng.gen_bool(0.5) {
        // rotational: the same number of indices in every block, each block
        // sent onto the previous one
        let size = rng.gen_range(1..=2usize);
        let blocks: Vec<Vec<u64>> = (0..b)
            .map(|_| {
                let mut ms: Vec<u64> = (1..=max_m).collect();
                ms.shuffle(rng);
                ms.truncate(size);
                ms
            })
            .collect();
        let mut pairs = Vec::new();
        for i in 1..=b {
            let prev = if i == 1 { b } else { i - 1 };
            let mut targets = blocks[prev - 1].clone();
            targets.shuffle(rng);
            for (m, t) in blocks[i - 1].iter().zip(targets) {
                pairs.push((IndexJ1::new(i, *m), IndexJ1::new(prev, t)));
            }
        }
        return EnrichedPermutation::new(pairs).unwrap();
    }
    let size = rng.gen_range(1..=4usize);
    let mut pool: Vec<IndexJ1> = (1..=max_m)
        .flat_map(|m| (1..=b).map(move |i| IndexJ1::new(i, m)))
        .collect();
    pool.shuffle(rng);
    pool.truncate(size);
    let mut images = pool.clone();
    images.shuffle(rng);
    EnrichedPermutation::new(pool.into_iter().zip(images)).unwrap()
}

#[test]
fn finite_valuation_criterion() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (p, b) in [(2u32, 1u32), (3, 1), (2, 2), (3, 2), (2, 3)] {
        let y = random_q_full(&mut rng, p, b);
        let n_prec = 256;
        let prof = profile_for_precision(&y, b, n_prec).unwrap();
        let psi = PsiMatrix::new(&prof, n_prec).unwrap();
        let cover = DigitProfile::covering(&y, b, 64).unwrap();
        let mut finite_seen = 0;
        for _ in 0..400 {
            let sigma = random_permutation(&mut rng, b as usize, 5);
            let vals: Vec<Valuation> = sigma
                .pairs()
                .map(|(k, s)| psi.entry_valuation(k, s))
                .collect();
            let finite = vals.iter().all(|v| *v != Valuation::Infinite);
            let expected = sigma.is_rotational(b as usize) && sigma.is_p_bounded(p);
            assert_eq!(finite, expected, "{sigma:?}");
            if finite {
                finite_seen += 1;
                if vals.iter().all(|v| v.finite().is_some()) {
                    let total: u64 = vals.iter().map(|v| v.finite().unwrap()).sum();
                    let r = r_value(&cover, &sigma).unwrap().unwrap();
                    assert_eq!(BigUint::from(total), r);
                }
            }
        }
        assert!(finite_seen > 20, "sample too thin for ({p}, {b})");
    }
}

#[test]
fn char_series_is_block_cyclic() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (p, b) in [(2u32, 2u32), (2, 3), (3, 2)] {
        let y = random_q_full(&mut rng, p, b);
        let prof = profile_for_precision(&y, b, 30).unwrap();
        let cs = char_series_stabilized(&prof, 2, 30).unwrap();
        for (k, c) in cs.coeffs().iter().enumerate() {
            if k % b as usize != 0 {
                assert!(c.is_zero(), "c_{k} for q = {p}^{b}");
            }
        }
    }
}

#[test]
fn second_curve_host_matches_prediction() {
    // y^2 = x^3 + 3x + 4 over F_7
    let host = EllipticHost::new(7, 3, 4).unwrap();
    assert!(host.ordinary);
    let y = PadicExponent::from_int(7, -1).unwrap();
    let z = zeta_curve(&host, &y, 3, 64).unwrap();
    let np = z.newton_polygon();
    let prof = DigitProfile::covering(&y, 1, 64).unwrap();
    let pred = predicted_polygon(&nu_sequence(&prof, 2).unwrap(), 1, 1);
    let cert = np.certified_expanded();
    assert!(cert.len() >= 2);
    assert_eq!(cert[..], pred.expanded()[..cert.len()]);
    assert_eq!(z.mod_pi(), host.weil_zeta_mod_p(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn fredholm_congruence_stability(a in -300i64..300, u in 1i64..20) {
        // y and y + 9u agree modulo pi^9 in every coefficient of det(1 - x Psi)
        let n_prec = 9;
        let y1 = PadicExponent::from_int(3, a).unwrap();
        let y2 = PadicExponent::from_int(3, a + 9 * u).unwrap();
        let c1 = char_series_stabilized(&profile_for_precision(&y1, 1, n_prec).unwrap(), 3, n_prec).unwrap();
        let c2 = char_series_stabilized(&profile_for_precision(&y2, 1, n_prec).unwrap(), 3, n_prec).unwrap();
        prop_assert_eq!(c1.coeffs(), c2.coeffs());
    }
}
