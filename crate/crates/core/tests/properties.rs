mod common;

use common::{min_eigenvalue, random_density};
use hybrid_chsh_core::channels::{amplitude_damp, damp_product_form};
use hybrid_chsh_core::fockspace::{
    amplified_noon, mean_total_photons, squeeze_matrix, squeezed_two_photon_coeffs, squeezed_vacuum_coeffs,
};
use hybrid_chsh_core::measurement::{corr_nn, corr_nx, corr_xn, corr_xx, q_overlap, q_table};
use hybrid_chsh_core::oracle::{self, CorrelationKind, Mode};
use hybrid_chsh_core::{FockCutoff, Gain, Matrix, ProductFormDensity, Thresholds, TwoModeDensity};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const X0_SET: [f64; 5] = [0.1, 0.465, 1.0, 2.0, 8.0];

fn cutoff(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

#[test]
fn mean_photon_number_matches_closed_form() {
    for nmax in [40, 50] {
        for i in 0..=12 {
            let g = Gain::new(0.05 * i as f64).unwrap();
            let n = mean_total_photons(&amplified_noon(g, cutoff(nmax)).unwrap());
            let want = g.mean_total_photons_closed_form();
            assert!((n - want).abs() < 1e-6, "zeta={} nmax={nmax}: {n} vs {want}", g.zeta());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn noon_parity_and_swap_symmetry(zeta in 0.0f64..0.6) {
        let st = amplified_noon(Gain::new(zeta).unwrap(), cutoff(40)).unwrap();
        let norm: f64 = st.c.as_slice().iter().map(|x| x * x).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        for m in 0..=40 {
            for mb in 0..=40 {
                prop_assert_eq!(st.amplitude(m, mb), st.amplitude(mb, m));
                if m % 2 == 1 || mb % 2 == 1 {
                    prop_assert_eq!(st.amplitude(m, mb), 0.0);
                }
            }
        }
    }

    #[test]
    fn q_table_bounds_and_symmetry(x0 in 0.0f64..4.0) {
        let t = q_table(16, x0);
        for n in 0..=16 {
            prop_assert!(t.q[(n, n)] >= -1e-15 && t.q[(n, n)] <= 1.0 + 1e-12);
            for m in 0..=16 {
                prop_assert_eq!(t.q[(n, m)], t.q[(m, n)]);
            }
        }
    }
}

#[test]
fn squeeze_matrix_invariants() {
    for zeta in [0.1, 0.3, 0.55] {
        let g = Gain::new(zeta).unwrap();
        let c = cutoff(40);
        let s = squeeze_matrix(g, c).unwrap();
        assert!(s.interior_block >= 2);
        let v = squeezed_vacuum_coeffs(g, c).unwrap();
        let t = squeezed_two_photon_coeffs(g, c).unwrap();
        for m in 0..=40 {
            assert!((s.s[(m, 0)] - v.c[m]).abs() < 1e-8);
            assert!((s.s[(m, 2)] - t.c[m]).abs() < 1e-8);
            for n in 0..=40 {
                if (m + n) % 2 == 1 {
                    assert_eq!(s.s[(m, n)], 0.0);
                }
            }
        }
        let b = s.interior_block + 1;
        let block = s.s.block(41, b);
        let gram = block.transpose().matmul(&block);
        assert!(gram.max_abs_diff(&Matrix::identity(b)) < 1e-6, "zeta={zeta}");
    }
}

#[test]
fn q_table_symmetry_parity_and_limits() {
    for x0 in X0_SET {
        let t = q_table(20, x0);
        for n in 0..=20 {
            for m in 0..=20 {
                assert_eq!(t.q[(n, m)], t.q[(m, n)]);
                if (n + m) % 2 == 1 {
                    assert_eq!(t.q[(n, m)], 0.0);
                } else if x0 < 8.0 && n <= 6 && m <= 6 {
                    assert_ne!(t.q[(n, m)], 0.0, "even entry ({n},{m}) vanished at x0={x0}");
                }
            }
            assert!((0.0..=1.0 + 1e-12).contains(&t.q[(n, n)]));
        }
    }
    let wide = q_table(20, 8.0);
    assert!(wide.q.max_abs_diff(&Matrix::identity(21)) < 1e-8);
}

#[test]
fn vacuum_bin_probability_strictly_increasing() {
    let mut prev = q_overlap(0, 0, 0.0);
    for i in 1..=300 {
        let v = q_overlap(0, 0, 0.01 * i as f64);
        assert!(v > prev, "not increasing at x0={}", 0.01 * i as f64);
        prev = v;
    }
}

#[test]
fn q_overlap_matches_reference_quadrature() {
    let single = oracle::q_overlap_reference(1, 3, 0.7).unwrap();
    assert!((single - q_overlap(1, 3, 0.7)).abs() < 1e-9);
    for x0 in [0.1, 0.465, 0.7, 1.0, 2.0, 3.0] {
        for n in 0..=14 {
            for m in (n..=14).step_by(2) {
                let r = oracle::q_overlap_reference(n, m, x0).unwrap();
                let q = q_overlap(n, m, x0);
                assert!((r - q).abs() < 1e-9, "Q_{n}{m}({x0}): {q} vs {r}");
            }
        }
    }
    assert_eq!(oracle::q_overlap_reference(2, 5, 0.9).unwrap(), 0.0);
}

#[test]
fn correlations_bounded_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let d = 3 + trial % 4;
        let rho = random_density(&mut rng, d, 1 + trial % 3);
        let x0 = 0.05 + 0.07 * trial as f64;
        let q = q_table(d - 1, x0);
        let n0 = trial % d;
        for e in [corr_xx(&rho, &q), corr_xn(&rho, &q, n0), corr_nx(&rho, &q, n0), corr_nn(&rho, n0)] {
            assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e), "trial {trial}: {e}");
        }
    }
}

#[test]
fn nx_is_xn_of_swapped_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..10 {
        let rho = random_density(&mut rng, 5, 2);
        let q = q_table(4, 0.3 + 0.1 * trial as f64);
        assert_eq!(corr_nx(&rho, &q, trial % 3), corr_xn(&rho.swap_modes(), &q, trial % 3));
    }
}

#[test]
fn dense_operator_matches_closed_form_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let c = cutoff(10);
    let ops: Vec<_> = (0..5)
        .map(|k| {
            let t = Thresholds::new(k % 3, 0.2 + 0.3 * k as f64).unwrap();
            let table = q_table(10, t.x0);
            (t, table, [CorrelationKind::XX, CorrelationKind::XN, CorrelationKind::NX, CorrelationKind::NN]
                .map(|kind| oracle::build_correlation_operator(kind, t, c)))
        })
        .collect();
    for trial in 0..50 {
        let rho = random_density(&mut rng, 11, 1 + trial % 3);
        let (t, q, [xx, xn, nx, nn]) = &ops[trial % ops.len()];
        assert!((xx.expectation(&rho) - corr_xx(&rho, q)).abs() < 1e-8);
        assert!((xn.expectation(&rho) - corr_xn(&rho, q, t.n0)).abs() < 1e-8);
        assert!((nx.expectation(&rho) - corr_nx(&rho, q, t.n0)).abs() < 1e-8);
        assert!((nn.expectation(&rho) - corr_nn(&rho, t.n0)).abs() < 1e-8);
    }
}

#[test]
fn damping_preserves_trace_and_hermiticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for trial in 0..12 {
        let d = 4 + trial % 5;
        let rho = random_density(&mut rng, d, 2);
        for lam in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let out = amplitude_damp(&rho, lam, 1.0 - lam).unwrap();
            assert!((out.trace() - rho.trace()).abs() < 1e-9);
            assert!(out.hermiticity_defect() < 1e-14);
        }
    }
    let pf = ProductFormDensity::amplified_noon(Gain::new(0.3).unwrap(), cutoff(40)).unwrap();
    for lam in [0.0, 0.1, 0.5, 0.9, 1.0] {
        let out = damp_product_form(&pf, lam, lam).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-9, "lambda={lam}");
    }
}

#[test]
fn damping_keeps_states_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for trial in 0..6 {
        let rho = random_density(&mut rng, 5, 1 + trial % 2);
        let out = amplitude_damp(&rho, 0.3, 0.6).unwrap();
        assert!(min_eigenvalue(&out) > -1e-12);
    }
}

#[test]
fn damping_composes_multiplicatively() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for (l1, l2) in [(0.1, 0.2), (0.5, 0.5), (0.9, 0.3), (0.0, 0.7)] {
        let rho = random_density(&mut rng, 6, 2);
        let twice = amplitude_damp(&amplitude_damp(&rho, l1, l2).unwrap(), l2, l1).unwrap();
        let a = 1.0 - (1.0 - l1) * (1.0 - l2);
        let once = amplitude_damp(&rho, a, a).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-9);
    }
}

#[test]
fn kraus_path_matches_binomial_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..50 {
        let d = if trial < 40 { 9 } else { 11 };
        let rho = random_density(&mut rng, d, 1 + trial % 3);
        let lam = if trial == 0 { 0.3 } else { 0.02 * trial as f64 };
        let (mode, la, lb) = if trial % 2 == 0 { (Mode::A, lam, 0.0) } else { (Mode::B, 0.0, lam) };
        let kraus = oracle::damp_via_kraus(&rho, lam, mode).unwrap();
        let direct = amplitude_damp(&rho, la, lb).unwrap();
        assert!(kraus.max_abs_diff(&direct) < 1e-10, "trial {trial}");
    }
}

#[test]
fn lossy_noon_gains_odd_populations() {
    let pf = ProductFormDensity::amplified_noon(Gain::new(0.2).unwrap(), cutoff(20)).unwrap();
    let clean = pf.expand();
    let lossy = damp_product_form(&pf, 0.25, 0.25).unwrap();
    let odd = |rho: &TwoModeDensity| (0..21).filter(|m| m % 2 == 1).map(|m| rho.population(m, 0)).sum::<f64>();
    assert_eq!(odd(&clean), 0.0);
    assert!(odd(&lossy) > 0.0);
}
