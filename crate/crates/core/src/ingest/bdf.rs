//! BioSemi 24-bit BDF reader, plus a minimal writer used for fixtures.

use std::fs;
use std::path::Path;

use super::{CohortLabel, EegRecording, IngestError};
use crate::warning::Warning;

const FIXED_HEADER: usize = 256;
const PER_SIGNAL_HEADER: usize = 256;
const MAGIC: &[u8; 8] = b"\xffBIOSEMI";
const STATUS_LABEL: &str = "Status";

/// Per-signal header fields.
#[derive(Clone, Debug, PartialEq)]
pub struct BdfSignalHeader {
    pub label: String,
    pub transducer: String,
    pub dimension: String,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub prefiltering: String,
    pub samples_per_record: usize,
}

impl BdfSignalHeader {
    fn gain(&self) -> f64 {
        (self.physical_max - self.physical_min) / f64::from(self.digital_max - self.digital_min)
    }

    fn to_physical(&self, digital: i32) -> f64 {
        self.physical_min + f64::from(digital - self.digital_min) * self.gain()
    }
}

/// Decoded contents of a BDF file. Annotation channels are dropped.
#[derive(Clone, Debug)]
pub struct BdfData {
    pub patient_id: String,
    pub recording_id: String,
    pub start_date: String,
    pub start_time: String,
    pub n_records: usize,
    pub record_duration_s: f64,
    pub signals: Vec<BdfSignalHeader>,
    pub samples: Vec<Vec<f64>>,
    pub sampling_rate_hz: f64,
    pub warnings: Vec<Warning>,
}

impl BdfData {
    /// Attach manifest labels. Header patient fields are not used.
    pub fn into_recording(
        self,
        subject_id: impl Into<String>,
        cohort: CohortLabel,
    ) -> Result<EegRecording, IngestError> {
        let names = self.signals.iter().map(|s| s.label.clone()).collect();
        EegRecording::new(subject_id, cohort, self.sampling_rate_hz, names, self.samples)
    }
}

/// Sign-extend a little-endian 24-bit two's-complement sample.
pub fn decode_i24(b: [u8; 3]) -> i32 {
    i32::from_le_bytes([b[0], b[1], b[2], if b[2] & 0x80 != 0 { 0xff } else { 0 }])
}

pub fn encode_i24(v: i32) -> [u8; 3] {
    let b = v.to_le_bytes();
    [b[0], b[1], b[2]]
}

fn field(bytes: &[u8], what: &str) -> Result<String, IngestError> {
    std::str::from_utf8(bytes)
        .map(|s| s.trim().to_string())
        .map_err(|_| IngestError::MalformedHeader(format!("{what} is not ASCII")))
}

fn number<T: std::str::FromStr>(bytes: &[u8], what: &str) -> Result<T, IngestError> {
    let s = field(bytes, what)?;
    s.parse()
        .map_err(|_| IngestError::MalformedHeader(format!("{what}: cannot parse {s:?}")))
}

pub fn read_bdf(path: &Path) -> Result<BdfData, IngestError> {
    let bytes = fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_bdf(&bytes)
}

fn parse_bdf(bytes: &[u8]) -> Result<BdfData, IngestError> {
    if bytes.len() < FIXED_HEADER {
        return Err(IngestError::MalformedHeader(format!(
            "file is {} bytes, shorter than the fixed header",
            bytes.len()
        )));
    }
    if &bytes[0..8] != MAGIC {
        return Err(IngestError::MalformedHeader("missing 0xFF BIOSEMI magic".into()));
    }
    let patient_id = field(&bytes[8..88], "patient id")?;
    let recording_id = field(&bytes[88..168], "recording id")?;
    let start_date = field(&bytes[168..176], "start date")?;
    let start_time = field(&bytes[176..184], "start time")?;
    let header_bytes: usize = number(&bytes[184..192], "header size")?;
    let n_records_raw: i64 = number(&bytes[236..244], "record count")?;
    let record_duration_s: f64 = number(&bytes[244..252], "record duration")?;
    let n_signals: usize = number(&bytes[252..256], "signal count")?;

    if n_signals == 0 {
        return Err(IngestError::MalformedHeader("header declares no signals".into()));
    }
    let expected_header = FIXED_HEADER + n_signals * PER_SIGNAL_HEADER;
    if header_bytes != expected_header {
        return Err(IngestError::MalformedHeader(format!(
            "header size field {header_bytes} does not match {n_signals} signals"
        )));
    }
    if bytes.len() < expected_header {
        return Err(IngestError::TruncatedFile {
            expected: expected_header as u64,
            actual: bytes.len() as u64,
        });
    }
    if !(record_duration_s.is_finite() && record_duration_s > 0.0) {
        return Err(IngestError::MalformedHeader(format!(
            "record duration {record_duration_s} is not positive"
        )));
    }

    // Per-signal fields are stored column-wise: all labels, then all transducers, ...
    let sig = &bytes[FIXED_HEADER..expected_header];
    let mut offset = 0usize;
    let mut column = |width: usize| {
        let start = offset;
        offset += width * n_signals;
        (0..n_signals)
            .map(move |i| start + i * width..start + (i + 1) * width)
            .collect::<Vec<_>>()
    };
    let labels = column(16);
    let transducers = column(80);
    let dimensions = column(8);
    let pmins = column(8);
    let pmaxs = column(8);
    let dmins = column(8);
    let dmaxs = column(8);
    let prefilters = column(80);
    let spr = column(8);

    let mut headers = Vec::with_capacity(n_signals);
    for i in 0..n_signals {
        let h = BdfSignalHeader {
            label: field(&sig[labels[i].clone()], "label")?,
            transducer: field(&sig[transducers[i].clone()], "transducer")?,
            dimension: field(&sig[dimensions[i].clone()], "dimension")?,
            physical_min: number(&sig[pmins[i].clone()], "physical minimum")?,
            physical_max: number(&sig[pmaxs[i].clone()], "physical maximum")?,
            digital_min: number(&sig[dmins[i].clone()], "digital minimum")?,
            digital_max: number(&sig[dmaxs[i].clone()], "digital maximum")?,
            prefiltering: field(&sig[prefilters[i].clone()], "prefiltering")?,
            samples_per_record: number(&sig[spr[i].clone()], "samples per record")?,
        };
        if h.digital_max <= h.digital_min {
            return Err(IngestError::MalformedHeader(format!(
                "signal {:?}: digital range [{}, {}] is empty",
                h.label, h.digital_min, h.digital_max
            )));
        }
        if h.samples_per_record == 0 {
            return Err(IngestError::MalformedHeader(format!(
                "signal {:?} has zero samples per record",
                h.label
            )));
        }
        headers.push(h);
    }

    let mut warnings = Vec::new();
    let record_bytes: usize = headers.iter().map(|h| h.samples_per_record * 3).sum();
    let available = (bytes.len() - expected_header) as u64;
    let n_records = if n_records_raw < 0 {
        let n = available as usize / record_bytes;
        warnings.push(Warning::new(
            "ingest",
            format!("record count unknown in header; inferred {n} from file size"),
        ));
        n
    } else {
        n_records_raw as usize
    };
    let needed = (n_records * record_bytes) as u64;
    if available < needed {
        return Err(IngestError::TruncatedFile {
            expected: expected_header as u64 + needed,
            actual: bytes.len() as u64,
        });
    }

    let keep: Vec<usize> = (0..n_signals)
        .filter(|&i| headers[i].label != STATUS_LABEL)
        .collect();
    let dropped = n_signals - keep.len();
    if dropped > 0 {
        warnings.push(Warning::new(
            "ingest",
            format!("excluded {dropped} annotation channel(s) labelled {STATUS_LABEL:?}"),
        ));
    }
    if keep.is_empty() {
        return Err(IngestError::MalformedHeader("no data signals besides Status".into()));
    }
    let spr0 = headers[keep[0]].samples_per_record;
    if let Some(&odd) = keep.iter().find(|&&i| headers[i].samples_per_record != spr0) {
        return Err(IngestError::InconsistentChannels(format!(
            "signal {:?} has {} samples per record, {:?} has {}",
            headers[odd].label, headers[odd].samples_per_record, headers[keep[0]].label, spr0
        )));
    }

    let mut samples: Vec<Vec<f64>> = keep
        .iter()
        .map(|_| Vec::with_capacity(n_records * spr0))
        .collect();
    let data = &bytes[expected_header..];
    let mut pos = 0usize;
    for _ in 0..n_records {
        let mut k = 0usize;
        for (i, h) in headers.iter().enumerate() {
            let n = h.samples_per_record;
            if keep.get(k) == Some(&i) {
                let out = &mut samples[k];
                for chunk in data[pos..pos + 3 * n].chunks_exact(3) {
                    out.push(h.to_physical(decode_i24([chunk[0], chunk[1], chunk[2]])));
                }
                k += 1;
            }
            pos += 3 * n;
        }
    }

    let signals = keep.iter().map(|&i| headers[i].clone()).collect();
    Ok(BdfData {
        patient_id,
        recording_id,
        start_date,
        start_time,
        n_records,
        record_duration_s,
        signals,
        samples,
        sampling_rate_hz: spr0 as f64 / record_duration_s,
        warnings,
    })
}

/// Options for [`write_bdf`].
#[derive(Clone, Debug)]
pub struct BdfWriteOptions {
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
    pub record_duration_s: usize,
    /// Append an all-zero `Status` channel, as BioSemi acquisition does.
    pub include_status: bool,
}

impl Default for BdfWriteOptions {
    fn default() -> Self {
        BdfWriteOptions {
            physical_min: -262_144.0,
            physical_max: 262_143.0,
            digital_min: -8_388_608,
            digital_max: 8_388_607,
            record_duration_s: 1,
            include_status: false,
        }
    }
}

fn put(buf: &mut Vec<u8>, s: &str, width: usize) -> Result<(), IngestError> {
    if s.len() > width || !s.is_ascii() {
        return Err(IngestError::MalformedHeader(format!(
            "field {s:?} does not fit {width} ASCII bytes"
        )));
    }
    buf.extend_from_slice(s.as_bytes());
    buf.extend(std::iter::repeat_n(b' ', width - s.len()));
    Ok(())
}

/// Write a recording as BDF. Samples are quantised to the digital range;
/// the sample count must fill whole records.
pub fn write_bdf(
    path: &Path,
    recording: &EegRecording,
    opts: &BdfWriteOptions,
) -> Result<(), IngestError> {
    let fs = recording.sampling_rate_hz();
    let spr_f = fs * opts.record_duration_s as f64;
    if opts.record_duration_s == 0 || spr_f.fract() != 0.0 {
        return Err(IngestError::InvalidRecording(format!(
            "sampling rate {fs} Hz does not give whole samples per {} s record",
            opts.record_duration_s
        )));
    }
    let spr = spr_f as usize;
    let n = recording.n_samples();
    if !n.is_multiple_of(spr) {
        return Err(IngestError::InvalidRecording(format!(
            "{n} samples do not fill whole {spr}-sample records"
        )));
    }
    let n_records = n / spr;
    let mut labels: Vec<&str> = recording.channel_names().iter().map(String::as_str).collect();
    if opts.include_status {
        labels.push(STATUS_LABEL);
    }
    let ns = labels.len();
    let header_bytes = FIXED_HEADER + ns * PER_SIGNAL_HEADER;

    let mut buf = Vec::with_capacity(header_bytes + n * ns * 3);
    buf.extend_from_slice(MAGIC);
    put(&mut buf, "X X X X", 80)?;
    put(&mut buf, "Startdate X X X X", 80)?;
    put(&mut buf, "01.01.00", 8)?;
    put(&mut buf, "00.00.00", 8)?;
    put(&mut buf, &header_bytes.to_string(), 8)?;
    put(&mut buf, "24BIT", 44)?;
    put(&mut buf, &n_records.to_string(), 8)?;
    put(&mut buf, &opts.record_duration_s.to_string(), 8)?;
    put(&mut buf, &ns.to_string(), 4)?;

    let is_status = |i: usize| opts.include_status && i == ns - 1;
    for l in &labels {
        put(&mut buf, l, 16)?;
    }
    for i in 0..ns {
        put(&mut buf, if is_status(i) { "Triggers and Status" } else { "Active Electrode" }, 80)?;
    }
    for i in 0..ns {
        put(&mut buf, if is_status(i) { "Boolean" } else { "uV" }, 8)?;
    }
    for i in 0..ns {
        put(&mut buf, &fmt_num(if is_status(i) { -8_388_608.0 } else { opts.physical_min }), 8)?;
    }
    for i in 0..ns {
        put(&mut buf, &fmt_num(if is_status(i) { 8_388_607.0 } else { opts.physical_max }), 8)?;
    }
    for i in 0..ns {
        put(&mut buf, &(if is_status(i) { -8_388_608 } else { opts.digital_min }).to_string(), 8)?;
    }
    for i in 0..ns {
        put(&mut buf, &(if is_status(i) { 8_388_607 } else { opts.digital_max }).to_string(), 8)?;
    }
    for i in 0..ns {
        put(&mut buf, if is_status(i) { "No filtering" } else { "HP:DC; LP:417 Hz" }, 80)?;
    }
    for _ in 0..ns {
        put(&mut buf, &spr.to_string(), 8)?;
    }
    for _ in 0..ns {
        put(&mut buf, "", 32)?;
    }
    debug_assert_eq!(buf.len(), header_bytes);

    let gain = (opts.physical_max - opts.physical_min)
        / f64::from(opts.digital_max - opts.digital_min);
    let quantise = |v: f64| -> i32 {
        let d = ((v - opts.physical_min) / gain).round() + f64::from(opts.digital_min);
        d.clamp(f64::from(opts.digital_min), f64::from(opts.digital_max)) as i32
    };
    for r in 0..n_records {
        for ch in recording.data() {
            for &v in &ch[r * spr..(r + 1) * spr] {
                buf.extend_from_slice(&encode_i24(quantise(v)));
            }
        }
        if opts.include_status {
            buf.extend(std::iter::repeat_n(0u8, spr * 3));
        }
    }
    fs::write(path, buf).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v}");
        s.chars().take(8).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i24_extremes() {
        assert_eq!(decode_i24([0x00, 0x00, 0x80]), -8_388_608);
        assert_eq!(decode_i24([0xff, 0xff, 0x7f]), 8_388_607);
        assert_eq!(decode_i24([0xff, 0xff, 0xff]), -1);
        assert_eq!(decode_i24([0x01, 0x00, 0x00]), 1);
        for v in [-8_388_608, -1, 0, 1, 12345, 8_388_607] {
            assert_eq!(decode_i24(encode_i24(v)), v);
        }
    }

    #[test]
    fn bad_magic_is_malformed() {
        let mut bytes = vec![b' '; 512];
        bytes[0..8].copy_from_slice(b"0       ");
        assert!(matches!(parse_bdf(&bytes), Err(IngestError::MalformedHeader(_))));
    }

    #[test]
    fn short_file_is_malformed() {
        assert!(matches!(parse_bdf(&[0xff, b'B']), Err(IngestError::MalformedHeader(_))));
    }
}
