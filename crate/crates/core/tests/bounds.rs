mod common;

use approx::assert_abs_diff_eq;
use cswiretap::bounds::{
    identity_secrecy, lb1_exact, lb1_sampled, lb2_expected, lb3, lb3_left_limit, ub1, ub2, ub3, ub3_branch_check,
};
use cswiretap::matrixcore::{binomial, sample_gaussian_matrix};
use cswiretap::{AsymptoticRatios, BoundKind, ChannelDims, Matrix, QuadratureSpec, SeededStream, SupportSearch};
use proptest::prelude::*;

fn dims(p: usize, m_b: usize, m_e: usize) -> ChannelDims {
    ChannelDims::new(p, m_b, m_e).unwrap()
}

fn ratios(rb: f64, re: f64) -> AsymptoticRatios {
    AsymptoticRatios::new(rb, re).unwrap()
}

#[test]
fn dims_invariants() {
    assert!(ChannelDims::new(10, 5, 1).is_err());
    assert!(ChannelDims::new(10, 4, 4).is_err());
    assert!(ChannelDims::new(10, 0, 0).is_err());
    assert!(ChannelDims::relaxed(10, 4, 7).is_ok());
    assert!(ChannelDims::relaxed(10, 5, 0).is_err());
}

#[test]
fn lb1_without_eavesdropper() {
    let d = dims(10, 4, 0);
    let a_e = Matrix::zeros(0, 10);
    let want = common::log2_binom(10, 3) / 10.0;
    let v = lb1_exact(&a_e, &d).unwrap();
    assert_abs_diff_eq!(v.bits_per_dim, want, epsilon = 1e-12);
    assert_eq!(v.kind, BoundKind::Lb1Exact);
    assert_eq!(v.std_error, None);
    let s = lb1_sampled(&a_e, &d, 10, &SeededStream::new(1, 0)).unwrap();
    assert_eq!(s.bits_per_dim, v.bits_per_dim);
    assert_eq!(s.std_error, Some(0.0));
}

#[test]
fn lb1_matches_explicit_two_by_two_oracle() {
    let d = dims(10, 4, 2);
    for seed in 0..5 {
        let a_e = sample_gaussian_matrix(2, 10, &SeededStream::new(seed, 0)).unwrap();
        // every 2x2 Gram by ad - bc over all C(10,3) supports
        let gram_det = |cols: &[usize], c: f64| {
            let s = |i: usize, j: usize| cols.iter().map(|&l| a_e.get(i, l) * a_e.get(j, l)).sum::<f64>() / c;
            (s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0)).log2()
        };
        let all: Vec<usize> = (0..10).collect();
        let sets = common::subsets(10, 3);
        assert_eq!(sets.len(), 120);
        let avg = sets.iter().map(|x| gram_det(x, 3.0)).sum::<f64>() / 120.0;
        let want = common::log2_binom(10, 3) / 10.0 - gram_det(&all, 10.0) / 20.0 + avg / 20.0;
        assert_abs_diff_eq!(lb1_exact(&a_e, &d).unwrap().bits_per_dim, want, epsilon = 1e-9);
    }
}

#[test]
fn oracle_equivalence_small_p() {
    let quad_free = [(5, 2, 1), (6, 2, 1), (7, 3, 1), (7, 3, 2), (8, 3, 2), (8, 3, 0)];
    for &(p, m_b, m_e) in &quad_free {
        let d = dims(p, m_b, m_e);
        for seed in 0..4 {
            let a_e = common::oracle_gaussian(m_e, p, 100 + seed);
            let got = lb1_exact(&a_e, &d).unwrap().bits_per_dim;
            assert_abs_diff_eq!(got, common::lb1_oracle(&a_e, p, m_b), epsilon = 1e-9);

            let a_b = common::oracle_gaussian(m_b, p, 200 + seed);
            let got = ub1(&a_b, &d, &SupportSearch::Enumerate).unwrap().bits_per_dim;
            assert_abs_diff_eq!(got, common::ub1_oracle(&a_b, p, m_b), epsilon = 1e-9);
        }
    }
}

#[test]
fn lb1_sampled_consistent_and_deterministic() {
    let d = dims(10, 4, 2);
    let a_e = sample_gaussian_matrix(2, 10, &SeededStream::new(9, 0)).unwrap();
    let exact = lb1_exact(&a_e, &d).unwrap().bits_per_dim;
    let s = SeededStream::new(9, 1);
    let est = lb1_sampled(&a_e, &d, 4000, &s).unwrap();
    let se = est.std_error.unwrap();
    assert!(se > 0.0);
    assert!((est.bits_per_dim - exact).abs() <= 3.0 * se, "{} vs {exact} (se {se})", est.bits_per_dim);
    assert_eq!(est, lb1_sampled(&a_e, &d, 4000, &s).unwrap());
    assert_eq!(est.kind, BoundKind::Lb1Sampled);
    assert_eq!(est.meta["n_samples"], "4000");
}

#[test]
fn lb1_sampled_converges() {
    let d = dims(12, 5, 3);
    let a_e = sample_gaussian_matrix(3, 12, &SeededStream::new(4, 0)).unwrap();
    let exact = lb1_exact(&a_e, &d).unwrap().bits_per_dim;
    let run = |n: usize| {
        let (mut err, mut se) = (0.0, 0.0);
        for rep in 0..100 {
            let v = lb1_sampled(&a_e, &d, n, &SeededStream::new(4, 1000 + rep)).unwrap();
            err += (v.bits_per_dim - exact).abs();
            se += v.std_error.unwrap();
        }
        (err / 100.0, se / 100.0)
    };
    let (err_n, se_n) = run(100);
    let (err_4n, se_4n) = run(400);
    assert!(err_4n < err_n, "mean abs error {err_n} -> {err_4n}");
    let ratio = se_4n / se_n;
    assert!((ratio - 0.5).abs() <= 0.1, "std_error ratio {ratio}");
}

#[test]
fn lb1_mean_matches_lb2() {
    // lb2 is the expectation of the lb1 expression over Gaussian A_e
    let d = dims(10, 4, 2);
    let stream = SeededStream::new(77, 0);
    let vals: Vec<f64> = (0..600)
        .map(|t| {
            let a_e = sample_gaussian_matrix(2, 10, &stream.child(t)).unwrap();
            lb1_exact(&a_e, &d).unwrap().bits_per_dim
        })
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let target = lb2_expected(&d).unwrap().bits_per_dim;
    assert!((mean - target).abs() <= 3.0 * sd / n.sqrt(), "{mean} vs {target}");
}

#[test]
fn lb2_cases() {
    let d0 = dims(100, 20, 0);
    assert_abs_diff_eq!(lb2_expected(&d0).unwrap().bits_per_dim, common::log2_binom(100, 19) / 100.0, epsilon = 1e-12);

    let curve: Vec<f64> = (1..20).map(|m_e| lb2_expected(&dims(100, 20, m_e)).unwrap().bits_per_dim).collect();
    assert!(curve.windows(2).all(|w| w[1] < w[0]));

    // digamma oracle
    let (p, m_b, m_e) = (40usize, 9usize, 5usize);
    let mut sum = 0.0;
    for i in 1..=m_e {
        sum += common::digamma((p - i + 1) as f64 / 2.0) - common::digamma((m_b - i) as f64 / 2.0);
    }
    let pf = p as f64;
    let want = common::log2_binom(40, 8) / pf
        - (m_e as f64 / (2.0 * pf)) * ((m_b - 1) as f64 / pf).log2()
        - std::f64::consts::LOG2_E / (2.0 * pf) * sum;
    assert_abs_diff_eq!(lb2_expected(&dims(p, m_b, m_e)).unwrap().bits_per_dim, want, epsilon = 1e-10);

    let big = lb2_expected(&dims(2000, 400, 200)).unwrap().bits_per_dim;
    let limit = lb3(&ratios(0.2, 0.1)).unwrap().bits_per_dim;
    assert!((big - limit).abs() < 0.02, "{big} vs {limit}");
}

#[test]
fn ub1_enumerate_equals_full_sampling() {
    let d = dims(6, 2, 0);
    let a_b = sample_gaussian_matrix(2, 6, &SeededStream::new(5, 0)).unwrap();
    let e = ub1(&a_b, &d, &SupportSearch::Enumerate).unwrap();
    let all = binomial(6, 3).unwrap() as usize;
    let s = ub1(&a_b, &d, &SupportSearch::Sample { n: all, stream: SeededStream::new(5, 1) }).unwrap();
    assert_eq!(e.bits_per_dim, s.bits_per_dim);
    assert!(!s.meta.contains_key("optimistic"));
    assert!(e.bits_per_dim >= common::log2_binom(6, 1) / 6.0);

    let few = ub1(&a_b, &d, &SupportSearch::Sample { n: 2, stream: SeededStream::new(5, 1) }).unwrap();
    assert_eq!(few.meta["optimistic"], "true");
}

#[test]
fn ub1_singular_gram_is_vacuous() {
    let d = dims(7, 3, 0);
    let v = ub1(&Matrix::identity_rows(3, 7), &d, &SupportSearch::Enumerate).unwrap();
    assert!(v.bits_per_dim.is_infinite());
    assert!(v.meta.contains_key("singular_k"));
    assert!(v.meta["finite_part_bits"].parse::<f64>().unwrap().is_finite());
}

#[test]
fn ub1_invariant_to_column_order() {
    let d = dims(7, 3, 0);
    let a = common::oracle_gaussian(3, 7, 31);
    let perm = [6usize, 2, 4, 0, 1, 5, 3];
    let data: Vec<f64> = (0..3).flat_map(|i| perm.iter().map(move |&j| (i, j))).map(|(i, j)| a.get(i, j)).collect();
    let b = Matrix::from_row_major(3, 7, data).unwrap();
    let u = ub1(&a, &d, &SupportSearch::Enumerate).unwrap().bits_per_dim;
    let v = ub1(&b, &d, &SupportSearch::Enumerate).unwrap().bits_per_dim;
    assert_abs_diff_eq!(u, v, epsilon = 1e-12);
}

#[test]
fn lb1_below_ub1_with_slack() {
    let (p, m_b, m_e) = (9, 4, 2);
    let d = dims(p, m_b, m_e);
    let slack = 2.0 * (p as f64).log2() / p as f64;
    let stream = SeededStream::new(2024, 0);
    let violations = (0..1000)
        .filter(|&t| {
            let s = stream.child(t);
            let a_b = sample_gaussian_matrix(m_b, p, &s.child(0)).unwrap();
            let a_e = sample_gaussian_matrix(m_e, p, &s.child(1)).unwrap();
            let lo = lb1_exact(&a_e, &d).unwrap().bits_per_dim;
            let hi = ub1(&a_b, &d, &SupportSearch::Enumerate).unwrap().bits_per_dim;
            lo > hi + slack
        })
        .count();
    assert!(violations <= 10, "{violations} violations in 1000 draws");
}

#[test]
fn identity_secrecy_cases() {
    assert_abs_diff_eq!(identity_secrecy(&dims(10, 2, 1)).bits_per_dim, 0.1, epsilon = 1e-15);
    assert_eq!(identity_secrecy(&ChannelDims::relaxed(10, 2, 2).unwrap()).bits_per_dim, 0.0);
    assert_eq!(identity_secrecy(&ChannelDims::relaxed(10, 2, 5).unwrap()).bits_per_dim, 0.0);
    assert_abs_diff_eq!(identity_secrecy(&dims(10, 3, 0)).bits_per_dim, 0.3, epsilon = 1e-15);
}

#[test]
fn lb3_values() {
    let h = common::h2(0.2);
    assert_eq!(lb3(&ratios(0.2, 0.0)).unwrap().bits_per_dim, cswiretap::specfun::binary_entropy(0.2).unwrap());
    let want = h - 0.5 * (0.9 * (1.0 / 0.9f64).log2() - 0.1 * 2f64.log2());
    assert_abs_diff_eq!(lb3(&ratios(0.2, 0.1)).unwrap().bits_per_dim, want, epsilon = 1e-12);
    assert_abs_diff_eq!(want, 0.703_526_8, epsilon = 1e-7);

    let limit = h - 0.5 * 0.8 * 1.25f64.log2();
    assert_abs_diff_eq!(lb3_left_limit(0.2).unwrap(), limit, epsilon = 1e-12);
    let near = lb3(&ratios(0.2, 0.2 - 1e-8)).unwrap().bits_per_dim;
    assert!((near - limit).abs() < 1e-6);
    assert!(lb3(&ratios(0.2, 0.2)).is_err());
}

#[test]
fn ub2_values() {
    assert_eq!(ub2(&ratios(0.5, 0.0)).unwrap().bits_per_dim, 1.0);
    assert_abs_diff_eq!(ub2(&ratios(0.2, 0.1)).unwrap().bits_per_dim, common::h2(0.2), epsilon = 1e-15);
    assert!(ub2(&ratios(1e-12, 0.0)).unwrap().bits_per_dim < 1e-9);
    assert!(AsymptoticRatios::new(0.6, 0.1).is_err());
    assert!(AsymptoticRatios::new(0.2, 0.3).is_err());
}

#[test]
fn ub3_cases() {
    let q = QuadratureSpec::default();
    let h = common::h2(0.2);
    let zero = ub3(&ratios(0.2, 0.0), &q).unwrap();
    assert_eq!(zero.kind, BoundKind::Ub3);
    assert_eq!(zero.meta["degenerate"], "true");
    assert_abs_diff_eq!(zero.bits_per_dim, h, epsilon = 1e-15);
    assert!((ub3(&ratios(0.2, 1e-6), &q).unwrap().bits_per_dim - h).abs() < 1e-3);
    assert!(ub3(&ratios(0.2, 0.2), &q).unwrap().bits_per_dim < h);
}

#[test]
fn asymptotic_ordering_grid() {
    let q = QuadratureSpec::default();
    for rb in [0.1, 0.2, 0.3, 0.4] {
        let mut last_lb3 = f64::INFINITY;
        for i in 0..40 {
            let re = rb * i as f64 / 40.0;
            let r = ratios(rb, re);
            let lo = lb3(&r).unwrap().bits_per_dim;
            let mid = ub3(&r, &q).unwrap().bits_per_dim;
            let hi = ub2(&r).unwrap().bits_per_dim;
            assert!(lo <= mid + 1e-6 && mid <= hi + 1e-6, "rb={rb} re={re}: {lo} {mid} {hi}");
            if re > 0.0 {
                assert!(mid < hi, "ub3 not strictly below ub2 at rb={rb} re={re}");
                assert!(lo > rb - re, "lb3 not above identity capacity at rb={rb} re={re}");
            }
            assert!(lo < last_lb3);
            last_lb3 = lo;
        }
    }
}

#[test]
fn branch_check_grid() {
    let q = QuadratureSpec::default();
    for i in 1..=9 {
        let rb = 0.05 * i as f64;
        for j in 1..=10 {
            let re = rb * j as f64 / 10.0;
            let c = ub3_branch_check(&ratios(rb, re), &q).unwrap();
            assert!(c.g_attains_max, "rb={rb} re={re}: g={} linear={}", c.g_value, c.linear_branch);
            assert!(c.g_attains_max_plain);
            assert_eq!(c, ub3_branch_check(&ratios(rb, re), &q).unwrap());
        }
        assert!(common::h2(rb) > rb * std::f64::consts::LOG2_E);
    }
    assert!(ub3_branch_check(&ratios(0.2, 0.0), &q).is_err());
}

proptest! {
    #[test]
    fn lb2_nonincreasing_in_me(p in 12usize..400, frac in 0.05f64..0.45) {
        let m_b = ((p as f64 * frac) as usize).clamp(2, (p - 1) / 2);
        let vals: Vec<f64> = (0..m_b).map(|m_e| lb2_expected(&dims(p, m_b, m_e)).unwrap().bits_per_dim).collect();
        prop_assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn lb3_strictly_decreasing(rb in 0.01f64..=0.5, a in 0.0f64..0.999, b in 0.0f64..0.999) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let v_lo = lb3(&ratios(rb, rb * lo)).unwrap().bits_per_dim;
        let v_hi = lb3(&ratios(rb, rb * hi)).unwrap().bits_per_dim;
        prop_assert!(v_hi < v_lo);
    }
}
