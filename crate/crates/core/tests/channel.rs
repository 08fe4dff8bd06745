mod common;

use approx::assert_abs_diff_eq;
use cswiretap::channel::{
    decode_support, decoding_error_rate, encode_message, message_of, transmit, ChannelInstance, SubspaceDecoder,
    DEFAULT_DECODE_TOL,
};
use cswiretap::matrixcore::{binomial, submatrix_columns};
use cswiretap::{ChannelDims, Error, Matrix, SeededStream, Support};
use proptest::prelude::*;
use rand::Rng;

fn dims(p: usize, m_b: usize, m_e: usize) -> ChannelDims {
    ChannelDims::new(p, m_b, m_e).unwrap()
}

#[test]
fn instance_shape_checks() {
    let d = dims(9, 3, 1);
    assert!(ChannelInstance::new(d, Matrix::zeros(3, 9), Matrix::zeros(1, 9)).is_ok());
    assert!(matches!(
        ChannelInstance::new(d, Matrix::zeros(3, 8), Matrix::zeros(1, 9)),
        Err(Error::DimensionMismatch(_))
    ));
    assert!(ChannelInstance::new(d, Matrix::zeros(3, 9), Matrix::zeros(2, 9)).is_err());
    let g = ChannelInstance::gaussian(dims(9, 3, 0), &SeededStream::new(1, 0)).unwrap();
    assert_eq!((g.a_e().rows(), g.a_e().cols()), (0, 9));
}

#[test]
fn encoding_round_trip() {
    let d = dims(10, 4, 1);
    assert_eq!(encode_message(0, &d).unwrap().indices(), &[0, 1, 2]);
    let count = binomial(10, 3).unwrap();
    for s in 0..count {
        assert_eq!(message_of(&encode_message(s, &d).unwrap()), s);
    }
    assert!(matches!(encode_message(count, &d), Err(Error::RankOutOfRange { .. })));
}

#[test]
fn encoding_uniform_messages_give_uniform_supports() {
    // weight-2 supports of 7 (m_b = 3 keeps m_b < p/2): 21 cells
    let d = dims(7, 3, 0);
    let mut rng = SeededStream::new(12, 0).rng();
    let mut counts = [0u64; 21];
    let draws = 100_000;
    for _ in 0..draws {
        let x = encode_message(rng.random_range(0..21u128), &d).unwrap();
        let cell = common::subsets(7, 2).iter().position(|c| c.as_slice() == x.indices()).unwrap();
        counts[cell] += 1;
    }
    let e = draws as f64 / 21.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // upper 0.001 quantile of chi-square with 20 degrees of freedom
    assert!(stat < 45.31, "chi-square statistic {stat}");
}

#[test]
fn transmit_trivial_cases() {
    let inst = ChannelInstance::gaussian(dims(8, 3, 2), &SeededStream::new(3, 0)).unwrap();
    let r = transmit(&inst, &Support::empty(8), &SeededStream::new(3, 1)).unwrap();
    assert!(r.y.iter().chain(&r.z).all(|&v| v == 0.0));
    assert_eq!(r.w_diag.len(), 8);

    let ident = ChannelInstance::identity_rows(dims(8, 3, 1));
    let x = Support::new(8, vec![0]).unwrap();
    let r = transmit(&ident, &x, &SeededStream::new(3, 2)).unwrap();
    assert_eq!(r.y, vec![r.w_diag[0], 0.0, 0.0]);
    assert_eq!(r.z, vec![r.w_diag[0]]);

    assert!(transmit(&inst, &Support::empty(9), &SeededStream::new(3, 1)).is_err());
}

#[test]
fn transmit_energy_matches_trace() {
    let inst = ChannelInstance::gaussian(dims(10, 4, 0), &SeededStream::new(4, 0)).unwrap();
    let x = Support::new(10, vec![1, 5, 8]).unwrap();
    let sub = submatrix_columns(inst.a_b(), &x).unwrap();
    let trace: f64 = sub.as_slice().iter().map(|v| v * v).sum();
    let stream = SeededStream::new(4, 1);
    let energies: Vec<f64> = (0..10_000)
        .map(|t| {
            let r = transmit(&inst, &x, &stream.child(t)).unwrap();
            r.y.iter().map(|v| v * v).sum()
        })
        .collect();
    let n = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let se = (energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
    assert!((mean - trace).abs() <= 3.0 * se, "{mean} +- {se} vs {trace}");
}

#[test]
fn decoder_recovers_gaussian_messages() {
    let d = dims(12, 4, 0);
    let inst = ChannelInstance::gaussian(d, &SeededStream::new(1, 0)).unwrap();
    let rep = decoding_error_rate(&inst, 10_000, &SeededStream::new(1, 1), DEFAULT_DECODE_TOL).unwrap();
    assert_eq!(rep.errors, 0, "{rep:?}");
    assert_eq!(rep.report.mean, 0.0);
    assert_eq!(rep, decoding_error_rate(&inst, 10_000, &SeededStream::new(1, 1), DEFAULT_DECODE_TOL).unwrap());
}

#[test]
fn identity_rows_collide() {
    // y = (w0, w1, 0, 0) lies in span{e0, e1, e_j} for each of the ten j >= 2
    let a_b = Matrix::identity_rows(4, 12);
    let y = [0.7, -1.3, 0.0, 0.0];
    let dec = SubspaceDecoder::new(&a_b, 3).unwrap();
    assert_eq!(dec.matches(&y, 1e-6).unwrap().len(), 10);
    assert!(matches!(decode_support(&a_b, &y, 3, 1e-6), Err(Error::AmbiguousDecode { candidates: 10, .. })));

    let ident = ChannelInstance::identity_rows(dims(12, 4, 0));
    let rep = decoding_error_rate(&ident, 2000, &SeededStream::new(2, 0), 1e-6).unwrap();
    assert!(rep.ambiguous > 0 && rep.report.mean > 0.0);
}

#[test]
fn zero_observation_has_no_candidate() {
    let a_b = common::oracle_gaussian(3, 8, 6);
    assert!(matches!(decode_support(&a_b, &[0.0; 3], 2, 1e-6), Err(Error::NoCandidate { .. })));
    assert!(decode_support(&a_b, &[1.0; 2], 2, 1e-6).is_err());
    assert!(decode_support(&a_b, &[1.0; 3], 2, 0.0).is_err());
}

#[test]
fn decoder_guard() {
    let a_b = Matrix::zeros(3, 40);
    assert!(matches!(SubspaceDecoder::new(&a_b, 10), Err(Error::TooManySupports { .. })));
}

#[test]
fn decoding_never_reads_eve() {
    // changing A_e leaves every decode untouched
    let d = dims(11, 4, 2);
    let a = ChannelInstance::gaussian(d, &SeededStream::new(9, 0)).unwrap();
    let b = ChannelInstance::new(d, a.a_b().clone(), Matrix::zeros(2, 11)).unwrap();
    let s = SeededStream::new(9, 1);
    assert_eq!(
        decoding_error_rate(&a, 500, &s, DEFAULT_DECODE_TOL).unwrap(),
        decoding_error_rate(&b, 500, &s, DEFAULT_DECODE_TOL).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transmit_is_self_consistent(seed in any::<u64>(), msg in 0u128..120) {
        let d = dims(10, 4, 3);
        let inst = ChannelInstance::gaussian(d, &SeededStream::new(seed, 0)).unwrap();
        let x = encode_message(msg, &d).unwrap();
        let r = transmit(&inst, &x, &SeededStream::new(seed, 1)).unwrap();
        prop_assert_eq!(&r.x, &x.indices().to_vec());
        let recompute = |m: &Matrix| -> Vec<f64> {
            (0..m.rows()).map(|i| x.indices().iter().map(|&j| m.get(i, j) * r.w_diag[j]).sum()).collect()
        };
        let y = recompute(inst.a_b());
        let z = recompute(inst.a_e());
        prop_assert!(y.iter().zip(&r.y).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert!(z.iter().zip(&r.z).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn decode_inverts_transmit_and_ignores_scale(seed in any::<u64>(), msg in 0u128..165, c in 1e-3f64..1e3) {
        let d = dims(11, 4, 0);
        let inst = ChannelInstance::gaussian(d, &SeededStream::new(seed, 0)).unwrap();
        let x = encode_message(msg, &d).unwrap();
        let r = transmit(&inst, &x, &SeededStream::new(seed, 1)).unwrap();
        let dec = SubspaceDecoder::new(inst.a_b(), 3).unwrap();
        let got = dec.decode(&r.y, DEFAULT_DECODE_TOL).unwrap();
        prop_assert_eq!(&got, &x);
        let scaled: Vec<f64> = r.y.iter().map(|v| c * v).collect();
        prop_assert_eq!(dec.matches(&scaled, 1e-6).unwrap(), dec.matches(&r.y, 1e-6).unwrap());
    }
}

#[test]
fn trace_identity_uses_support_columns_only() {
    let a = common::oracle_gaussian(2, 5, 3);
    let x = Support::new(5, vec![2]).unwrap();
    let sub = submatrix_columns(&a, &x).unwrap();
    assert_abs_diff_eq!(
        sub.as_slice().iter().map(|v| v * v).sum::<f64>(),
        a.get(0, 2).powi(2) + a.get(1, 2).powi(2),
        epsilon = 1e-15
    );
}
