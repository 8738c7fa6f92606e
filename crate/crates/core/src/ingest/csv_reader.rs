use std::path::Path;

use super::{CohortLabel, EegRecording, IngestError};

/// Read a sample-major CSV (header row of channel names, one row per
/// sample instant) into a channel-major recording.
///
/// Row and column numbers in errors are 1-based and count data rows only.
pub fn read_csv_recording(
    path: &Path,
    sampling_rate_hz: f64,
    cohort: CohortLabel,
    subject_id: &str,
) -> Result<EegRecording, IngestError> {
    let io_err = |source: std::io::Error| IngestError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(e.into()))?;

    let headers = reader.headers().map_err(|e| io_err(e.into()))?.clone();
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(IngestError::EmptyFile(path.to_path_buf()));
    }

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| io_err(e.into()))?;
        if record.len() != names.len() {
            return Err(IngestError::RaggedRows {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| IngestError::NonNumericCell {
                    row,
                    col: c + 1,
                    value: cell.to_string(),
                })?;
            data[c].push(v);
        }
    }
    if data[0].is_empty() {
        return Err(IngestError::EmptyFile(path.to_path_buf()));
    }
    EegRecording::new(subject_id, cohort, sampling_rate_hz, names, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn transposes_to_channel_major() {
        let f = write_tmp("C3,C4\n1,2\n3,4\n");
        let rec = read_csv_recording(f.path(), 128.0, CohortLabel::HealthyControl, "s1").unwrap();
        assert_eq!(rec.channel_names(), ["C3", "C4"]);
        assert_eq!(rec.data(), [vec![1.0, 3.0], vec![2.0, 4.0]]);
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let f = write_tmp("C3,C4\n1,x\n");
        let err = read_csv_recording(f.path(), 128.0, CohortLabel::HealthyControl, "s1").unwrap_err();
        match err {
            IngestError::NonNumericCell { row, col, value } => {
                assert_eq!((row, col), (1, 2));
                assert_eq!(value, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_empty() {
        let f = write_tmp("C3,C4\n1,2\n3\n");
        assert!(matches!(
            read_csv_recording(f.path(), 128.0, CohortLabel::HealthyControl, "s"),
            Err(IngestError::RaggedRows { row: 2, expected: 2, found: 1 })
        ));
        let f = write_tmp("");
        assert!(matches!(
            read_csv_recording(f.path(), 128.0, CohortLabel::HealthyControl, "s"),
            Err(IngestError::EmptyFile(_))
        ));
        let f = write_tmp("C3,C4\n");
        assert!(matches!(
            read_csv_recording(f.path(), 128.0, CohortLabel::HealthyControl, "s"),
            Err(IngestError::EmptyFile(_))
        ));
    }

    #[test]
    fn thirty_two_channels() {
        let header: Vec<String> = (0..32).map(|i| format!("E{i}")).collect();
        let mut s = header.join(",");
        s.push('\n');
        for t in 0..128 {
            let row: Vec<String> = (0..32).map(|c| format!("{}", c * 1000 + t)).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        let f = write_tmp(&s);
        let rec = read_csv_recording(f.path(), 128.0, CohortLabel::PdOffMedication, "s").unwrap();
        assert_eq!(rec.n_channels(), 32);
        assert_eq!(rec.n_samples(), 128);
        // sample t sits in file row t + 1
        assert_eq!(rec.data()[5][17], 5017.0);
    }
}
