use tablewalk::group::{move_delta, to_coordinates, GroupElement, MoveSet};
use tablewalk::spectral::{
    box_sum_profile, eigenvalue, enumerate_spectrum, exact_tv_from_spectrum, l2_bound, log_l2_sum,
    transition_matrix_oracle, tv_to_uniform, DEFAULT_ORACLE_CAP, DEFAULT_SPECTRUM_CAP,
};

/// `(1/|S|) sum_s cos(2pi <s, y> / q)` with generator coordinates from the
/// table picture.
fn character_sum(y: &GroupElement) -> f64 {
    let (n, q) = (y.n(), y.q());
    let set = MoveSet::new(n, q).unwrap();
    let total: f64 = set
        .iter()
        .map(|m| {
            let d: Vec<Vec<u32>> = move_delta(&m, n)
                .unwrap()
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.rem_euclid(q as i32) as u32).collect())
                .collect();
            let s = to_coordinates(q, &d).unwrap();
            let k = s.inner(y).unwrap();
            (2.0 * std::f64::consts::PI * k as f64 / q as f64).cos()
        })
        .sum();
    total / set.len() as f64
}

/// Box sums straight from the definition.
fn naive_profile(y: &GroupElement) -> Vec<u64> {
    let d = y.dim();
    let q = y.q();
    let mut counts = vec![0u64; q as usize];
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                for l in k..d {
                    let mut s = 0u64;
                    for a in i..=j {
                        for b in k..=l {
                            s += y.get(a, b) as u64;
                        }
                    }
                    counts[(s % q as u64) as usize] += 1;
                }
            }
        }
    }
    counts
}

#[test]
fn spectrum_matches_dense_eigensolver() {
    for (n, q) in [(3, 2), (4, 2), (3, 3)] {
        let formula = enumerate_spectrum(n, q, DEFAULT_SPECTRUM_CAP).unwrap().sorted();
        let dense = transition_matrix_oracle(n, q, DEFAULT_ORACLE_CAP).unwrap().eigenvalues();
        assert_eq!(formula.len(), dense.len());
        for (a, b) in formula.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-10, "({n},{q}): {a} vs {b}");
        }
    }
}

#[test]
fn eigenvalue_matches_character_sum() {
    for (n, q) in [(3, 2), (3, 3), (3, 4), (4, 2)] {
        let order = tablewalk::group::group_order(n, q).unwrap();
        let spec = enumerate_spectrum(n, q, DEFAULT_SPECTRUM_CAP).unwrap();
        for idx in 0..order {
            let y = GroupElement::from_index(n, q, idx).unwrap();
            let lam = spec.eigenvalues()[idx as usize];
            assert!((lam - character_sum(&y)).abs() < 1e-12);
            assert!((lam - eigenvalue(&box_sum_profile(&y))).abs() < 1e-15);
        }
    }
}

#[test]
fn profile_matches_naive_boxes() {
    for (n, q, idx) in [(3, 3, 40u128), (4, 5, 1_234_567), (5, 7, 98_765_432_123), (6, 2, 33_000_001)] {
        let y = GroupElement::from_index(n, q, idx).unwrap();
        assert_eq!(box_sum_profile(&y).counts, naive_profile(&y));
    }
}

#[test]
fn fourier_tv_matches_matrix_power() {
    for (n, q) in [(3, 2), (3, 3)] {
        let spec = enumerate_spectrum(n, q, DEFAULT_SPECTRUM_CAP).unwrap();
        let p = transition_matrix_oracle(n, q, DEFAULT_ORACLE_CAP).unwrap();
        let laws = p.distributions_up_to(100);
        let mut prev = f64::INFINITY;
        for (t, law) in laws.iter().enumerate() {
            let fourier = exact_tv_from_spectrum(&spec, t as u64);
            let power = tv_to_uniform(law);
            assert!((fourier - power).abs() <= 1e-10, "({n},{q}) t={t}");
            assert!(fourier <= prev + 1e-12);
            prev = fourier;
            let sum = log_l2_sum(&spec, t as u64).exp();
            assert!(4.0 * fourier * fourier <= sum + 1e-12);
            assert!(fourier <= l2_bound(&spec, t as u64) + 1e-12);
        }
    }
}

#[test]
fn spectrum_invariants() {
    for (n, q) in [(3, 2), (3, 5), (4, 3), (5, 2)] {
        let spec = enumerate_spectrum(n, q, DEFAULT_SPECTRUM_CAP).unwrap();
        let ev = spec.eigenvalues();
        assert_eq!(ev[0], 1.0);
        assert!(ev.iter().all(|&l| (-1.0..=1.0).contains(&l)));
        assert!(ev[1..].iter().all(|&l| l < 1.0 - 1e-12));
        assert!(spec.min() >= -28.0 / 29.0 - 1e-12);
        // The trace is |G| P(0, 0), and no generator is the identity.
        assert!(spec.trace().abs() < 1e-8);
    }
}
