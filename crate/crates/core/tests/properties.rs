use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walklab_core::error::WalkError;
use walklab_core::graph::lattice::kappa_global;
use walklab_core::graph::{build_random_strongly_connected, build_segment, divergence, reverse, DirectedGraph, EdgeWeights};
use walklab_core::identity::{check_interpretation, my_chain, my_chain_recursive, GammaField, IdentitySample, UField};
use walklab_core::markov::{absorption_prob, gambler_ruin, hitting_prob, invariant_measure, reversed_environment, Environment};
use walklab_core::special::GigLaw;
use walklab_core::tol::{rel_diff, IDENTITY_REL};

/// Strongly connected graph with `n` vertices, random weights and a random environment.
fn random_setup(seed: u64, n: usize) -> (Arc<DirectedGraph>, EdgeWeights, Environment, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Arc::new(build_random_strongly_connected(n, rng.random_range(0..=2 * n), &mut rng).unwrap());
    let alpha = EdgeWeights::new((0..g.edge_count()).map(|_| rng.random_range(0.1..4.0)).collect()).unwrap();
    let env = Environment::sample_dirichlet(g.clone(), &alpha, &mut rng).unwrap();
    (g, alpha, env, rng)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, rng_seed: RngSeed::Fixed(20240121), ..ProptestConfig::default() })]

    #[test]
    fn divergence_sums_to_zero(seed in any::<u64>(), n in 2usize..10) {
        let (g, alpha, _, _) = random_setup(seed, n);
        let div = divergence(&g, &alpha).unwrap();
        prop_assert!(div.total().abs() < 1e-12 * alpha.as_slice().iter().sum::<f64>());
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>(), n in 2usize..10) {
        let (g, alpha, _, _) = random_setup(seed, n);
        let (rg, ra) = reverse(&g, &alpha).unwrap();
        let d = divergence(&g, &alpha).unwrap().value;
        let rd = divergence(&rg, &ra).unwrap().value;
        prop_assert!(d.iter().zip(&rd).all(|(a, b)| (a + b).abs() < 1e-12 * alpha.as_slice().iter().sum::<f64>()));
        let (back, back_alpha) = reverse(&rg, &ra).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back_alpha, alpha);
    }

    #[test]
    fn time_reversal_twice_is_identity(seed in any::<u64>(), n in 2usize..8) {
        let (_, _, env, _) = random_setup(seed, n);
        let twice = reversed_environment(&reversed_environment(&env).unwrap()).unwrap();
        prop_assert_eq!(twice.graph().edges(), env.graph().edges());
        for (a, b) in env.prob().iter().zip(twice.prob()) {
            prop_assert!(rel_diff(*a, *b) < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn invariant_measure_balances_hitting(seed in any::<u64>(), n in 2usize..10) {
        let (_, _, env, mut rng) = random_setup(seed, n);
        let pi = invariant_measure(&env).unwrap();
        prop_assert!(pi.residual < 1e-12);
        let x = rng.random_range(0..n);
        let y = (x + rng.random_range(1..n)) % n;
        // π(x) P_x(H_y < H_x⁺) = π(y) P_y(H_x < H_y⁺)
        let lhs = pi.pi[x] * hitting_prob(&env, x, y).unwrap();
        let rhs = pi.pi[y] * hitting_prob(&env, y, x).unwrap();
        prop_assert!(rel_diff(lhs, rhs) < 1e-10);
    }

    #[test]
    fn gambler_ruin_matches_absorption(rho in prop::collection::vec(0.05f64..20.0, 2..40)) {
        let n = rho.len();
        // ω(i, i+1) = 1/(1+ρ), ω(i, i−1) = ρ/(1+ρ) inside; ρ[0] is unused
        let mut prob = Vec::with_capacity(2 * n);
        for i in 0..n {
            let right = if i == 0 { 1.0 } else { 1.0 / (1.0 + rho[i]) };
            let left = if i + 1 == n { 1.0 } else { rho[i + 1] / (1.0 + rho[i + 1]) };
            prob.extend([right, left]);
        }
        let env = Environment::new(Arc::new(build_segment(n).unwrap()), prob).unwrap();
        let (mut a, mut b) = (vec![false; n + 1], vec![false; n + 1]);
        a[0] = true;
        b[n] = true;
        let h = absorption_prob(&env, &a, &b).unwrap();
        for x in 0..=n {
            prop_assert!((h[x] - gambler_ruin(&rho, 0, x, n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn my_closed_form_and_recursion_agree(w in prop::collection::vec(0.01f64..50.0, 2..80)) {
        let len = w.len() / 2 * 2;
        prop_assume!(len >= 2);
        let field = GammaField::new(w[..len].to_vec()).unwrap();
        let closed = my_chain(&field).unwrap();
        let rec = my_chain_recursive(&field).unwrap();
        for (a, b) in closed.iter().zip(&rec) {
            prop_assert!(rel_diff(a.gamma, b.gamma) < 1e-10);
            prop_assert!((a.s - b.s).abs() < 1e-10 * a.s.abs().max(1.0));
        }
    }

    #[test]
    fn identity_sample_invariants(h_plus in 1e-8f64..1e8, h_minus in 1e-8f64..1e8) {
        let s = IdentitySample::from_h(h_plus, h_minus);
        prop_assert!(rel_diff(s.gamma_stat * s.gamma_stat, h_plus * h_minus) < 1e-12);
        prop_assert!(rel_diff((2.0 * s.s_stat).exp(), h_plus / h_minus) < 1e-12);
    }

    #[test]
    fn interpretation_routes_agree(seed in any::<u64>(), n in 2usize..9) {
        let (g, alpha, _, mut rng) = random_setup(seed, n);
        let w = GammaField::sample(&alpha, &mut rng).unwrap();
        let i0 = rng.random_range(0..n);
        let j0 = (i0 + rng.random_range(1..n)) % n;
        let u = UField::new((0..n).map(|_| rng.random_range(-3.0..3.0)).collect(), i0).unwrap();
        // tiny gamma weights can make Ĥ numerically singular, which is reported rather than solved
        let r = match check_interpretation(&g, &w, &u, i0, j0) {
            Err(WalkError::Precondition(_)) => return Err(TestCaseError::reject("Ĥ numerically singular")),
            r => r.unwrap(),
        };
        // the matrix route carries the conditioning of Ĥ, which grows with the spread of U
        let bound = IDENTITY_REL.max(100.0 * f64::EPSILON * r.condition);
        prop_assert!(r.max_discrepancy <= bound, "discrepancy {} with condition {:e}", r.max_discrepancy, r.condition);
    }

    #[test]
    fn gig_reflects_with_order(order in -6.0f64..6.0, coef in 0.05f64..30.0, s in -5.0f64..5.0) {
        let a = GigLaw::new(order, coef).unwrap();
        let b = GigLaw::new(-order, coef).unwrap();
        prop_assert!((a.logpdf_s(s) - b.logpdf_s(-s)).abs() < 1e-9 * a.logpdf_s(s).abs().max(1.0));
    }

    #[test]
    fn kappa_ignores_axis_orientation(alpha in prop::array::uniform4(0.01f64..10.0)) {
        let k = kappa_global(&alpha).unwrap();
        let flipped = [alpha[2], alpha[3], alpha[0], alpha[1]];
        let swapped = [alpha[1], alpha[0], alpha[3], alpha[2]];
        prop_assert!((kappa_global(&flipped).unwrap() - k).abs() < 1e-12);
        prop_assert!((kappa_global(&swapped).unwrap() - k).abs() < 1e-12);
    }
}
