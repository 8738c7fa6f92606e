mod common;

use pdeeg::ingest::{decode_i24, encode_i24, load_manifest, read_bdf, write_bdf, BdfWriteOptions, CohortLabel, EegRecording};
use proptest::prelude::*;

/// Little-endian 24-bit two's complement, decoded by sign extension.
fn oracle_decode(b: [u8; 3]) -> i32 {
    let u = b[0] as u32 | (b[1] as u32) << 8 | (b[2] as u32) << 16;
    if u & 0x80_0000 != 0 {
        u as i32 - (1 << 24)
    } else {
        u as i32
    }
}

proptest! {
    #[test]
    fn i24_codec(v in -(1i32 << 23)..(1i32 << 23)) {
        let b = encode_i24(v);
        prop_assert_eq!(oracle_decode(b), v);
        prop_assert_eq!(decode_i24(b), v);
    }
}

#[test]
fn i24_extremes() {
    assert_eq!(decode_i24([0xff, 0xff, 0x7f]), 8_388_607);
    assert_eq!(decode_i24([0x00, 0x00, 0x80]), -8_388_608);
    assert_eq!(decode_i24([0xff, 0xff, 0xff]), -1);
}

#[test]
fn write_then_read() {
    let fs = 64.0;
    // values on the quantisation grid survive exactly
    let gain = 524_287.0 / 16_777_215.0;
    let data: Vec<Vec<f64>> = (0..2)
        .map(|c| (0..128).map(|i| -262_144.0 + ((i * 977 + c * 13) % 16_000_000) as f64 * gain).collect())
        .collect();
    let rec = EegRecording::new("s1", CohortLabel::PdOnMedication, fs, vec!["C3".into(), "C4".into()], data).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s1.bdf");
    write_bdf(&path, &rec, &BdfWriteOptions::default()).unwrap();
    let bdf = read_bdf(&path).unwrap();
    assert_eq!(bdf.sampling_rate_hz, fs);
    assert_eq!(bdf.n_records, 2);
    let back = bdf.into_recording("s1", CohortLabel::PdOnMedication).unwrap();
    for (a, b) in rec.data().iter().zip(back.data()) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-6, "{x} {y}");
        }
    }
}

#[test]
fn shipped_fixture_loads() {
    let m = load_manifest(&common::fixture_dir().join("manifest.tsv")).unwrap();
    assert_eq!(m.len(), 10);
    for e in &m.entries {
        let (rec, warnings) = pdeeg::ingest::load_entry(e, 128.0).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(rec.sampling_rate_hz(), 128.0);
        assert_eq!(rec.n_channels(), 2);
        assert_eq!(rec.n_samples(), 30 * 128);
    }
}

#[test]
fn truncated_file_is_rejected() {
    let src = common::fixture_dir().join("pd01.bdf");
    let bytes = std::fs::read(src).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.bdf");
    std::fs::write(&path, &bytes[..bytes.len() - 100]).unwrap();
    assert!(read_bdf(&path).is_err());
}
