use proptest::prelude::*;
use tablewalk::combinatorics::{
    build_psi, count_nonzero_boxes, count_nonzero_intervals, nonzero_intervals, skeleton,
    verify_lemma_3_3,
};
use tablewalk::group::GroupElement;

fn naive_s(u: &[u32], q: u32) -> u64 {
    let mut c = 0;
    for i in 0..u.len() {
        for j in i..u.len() {
            if u[i..=j].iter().map(|&v| v as u64).sum::<u64>() % q as u64 != 0 {
                c += 1;
            }
        }
    }
    c
}

fn naive_n(y: &GroupElement) -> u64 {
    let d = y.dim();
    let mut c = 0;
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
                    if s % y.q() as u64 != 0 {
                        c += 1;
                    }
                }
            }
        }
    }
    c
}

/// Greedy skeleton restated: walk left to right, take a nonzero position
/// unless the previous pick is adjacent.
fn naive_skeleton(u: &[u32]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (p, &v) in u.iter().enumerate() {
        let pos = p + 1;
        if v != 0 && out.last().is_none_or(|&l| pos - l >= 2) {
            out.push(pos);
        }
    }
    out
}

#[test]
fn s_fast_path_exhaustive() {
    for (len, q) in [(1usize, 7u32), (4, 3), (6, 2), (10, 2), (5, 4), (3, 11)] {
        let total = (q as u64).pow(len as u32);
        for idx in 0..total {
            let mut r = idx;
            let u: Vec<u32> = (0..len)
                .map(|_| {
                    let v = (r % q as u64) as u32;
                    r /= q as u64;
                    v
                })
                .collect();
            assert_eq!(count_nonzero_intervals(&u, q), naive_s(&u, q));
            assert_eq!(nonzero_intervals(&u, q).len() as u64, naive_s(&u, q));
            assert_eq!(skeleton(&u).indices, naive_skeleton(&u));
        }
    }
}

#[test]
fn n_fast_path_exhaustive() {
    for (n, q) in [(3, 2), (4, 2), (3, 3)] {
        let order = tablewalk::group::group_order(n, q).unwrap();
        for idx in 0..order {
            let y = GroupElement::from_index(n, q, idx).unwrap();
            assert_eq!(count_nonzero_boxes(&y), naive_n(&y));
        }
    }
}

fn element() -> impl Strategy<Value = GroupElement> {
    (3usize..=9, 2u32..=7).prop_flat_map(|(n, q)| {
        let d = n - 1;
        prop::collection::vec(prop_oneof![3 => Just(0u32), 1 => 0..q], d * d)
            .prop_map(move |c| GroupElement::from_flat(n, q, c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn s_matches_naive(u in prop::collection::vec(0u32..13, 1..40), q in 2u32..13) {
        let u: Vec<u32> = u.into_iter().map(|v| v % q).collect();
        prop_assert_eq!(count_nonzero_intervals(&u, q), naive_s(&u, q));
    }

    #[test]
    fn n_matches_naive(y in element()) {
        prop_assert_eq!(count_nonzero_boxes(&y), naive_n(&y));
    }

    #[test]
    fn lemma_3_2_bound(u in prop::collection::vec(0u32..101, 1..64), q in 2u32..=101) {
        let u: Vec<u32> = u.into_iter().map(|v| v % q).collect();
        let s = skeleton(&u).size() as u64;
        let n = u.len() as u64 + 1;
        prop_assert!(count_nonzero_intervals(&u, q) >= s * (n - s));
    }

    #[test]
    fn nonzero_boxes_floor(y in element()) {
        if !y.is_zero() {
            let d = y.dim() as u64;
            prop_assert!(count_nonzero_boxes(&y) >= d * d);
        }
    }

    #[test]
    fn lemma_3_3_every_other_row(y in element()) {
        let d = y.dim();
        let rows: Vec<usize> = (1..=d)
            .step_by(2)
            .filter(|&i| y.coords()[(i - 1) * d..i * d].iter().any(|&v| v != 0))
            .collect();
        prop_assert!(verify_lemma_3_3(&y, &rows).unwrap());
    }

    #[test]
    fn psi_family_bound(y in element()) {
        let psi = build_psi(&y);
        prop_assert!(psi.consecutive_disjoint());
        prop_assert!(2 * count_nonzero_boxes(&y) >= y.n() as u64 * psi.total() as u64);
    }
}
