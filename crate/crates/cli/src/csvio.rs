//! Dataset and curve CSV formats.
//!
//! Dataset schema: header `f0,...,f{d-1},label`, one sample per line, plain
//! decimal numbers, UTF-8, `\n` line endings. Labels are nonnegative
//! integers; the class count is the largest label plus one. Floats are
//! written with the shortest representation that round-trips exactly.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use vqsafe_core::eval::Dataset;
use vqsafe_core::matrix::Matrix;
use vqsafe_core::metrics::RgCurve;

/// Dataset parse errors. Row numbers count data rows from zero (the header
/// is not a data row); columns count from zero.
#[derive(Debug)]
pub enum CsvError {
    EmptyFile,
    MalformedHeader(String),
    NonNumericCell { row: usize, col: usize },
    LabelOutOfRange { row: usize },
    Io(std::io::Error),
    Invalid(vqsafe_core::Error),
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsvError::EmptyFile => write!(f, "file holds no data rows"),
            CsvError::MalformedHeader(reason) => write!(f, "malformed header: {}", reason),
            CsvError::NonNumericCell { row, col } => {
                write!(f, "non-numeric cell at data row {}, column {}", row, col)
            }
            CsvError::LabelOutOfRange { row } => {
                write!(f, "label at data row {} is not a nonnegative integer", row)
            }
            CsvError::Io(e) => write!(f, "io: {}", e),
            CsvError::Invalid(e) => write!(f, "invalid dataset: {}", e),
        }
    }
}

impl std::error::Error for CsvError {}

impl From<std::io::Error> for CsvError {
    fn from(e: std::io::Error) -> Self {
        CsvError::Io(e)
    }
}

/// Load a feature/label CSV into a dataset, inferring the feature count from
/// the header and the class count from the largest label.
pub fn load_dataset_csv(path: &Path) -> Result<Dataset, CsvError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or(CsvError::EmptyFile)?;

    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() < 2 {
        return Err(CsvError::MalformedHeader("need at least one feature and a label".into()));
    }
    let d = fields.len() - 1;
    for (j, field) in fields[..d].iter().enumerate() {
        let expected = format!("f{}", j);
        if field.trim() != expected {
            return Err(CsvError::MalformedHeader(format!(
                "expected column {} to be named {}, found {:?}",
                j, expected, field
            )));
        }
    }
    if fields[d].trim() != "label" {
        return Err(CsvError::MalformedHeader(format!(
            "expected final column to be named label, found {:?}",
            fields[d]
        )));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != d + 1 {
            // A missing or extra cell surfaces at the first bad position.
            return Err(CsvError::NonNumericCell { row, col: cells.len().min(d + 1) });
        }
        let mut features = Vec::with_capacity(d);
        for (col, cell) in cells[..d].iter().enumerate() {
            match cell.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => features.push(v),
                _ => return Err(CsvError::NonNumericCell { row, col }),
            }
        }
        let label_cell = cells[d].trim();
        match label_cell.parse::<usize>() {
            Ok(label) => labels.push(label),
            Err(_) => {
                // Numeric but not a nonnegative integer is a label-range
                // problem; anything else is a non-numeric cell.
                if label_cell.parse::<f64>().is_ok() {
                    return Err(CsvError::LabelOutOfRange { row });
                }
                return Err(CsvError::NonNumericCell { row, col: d });
            }
        }
        rows.push(features);
    }
    if rows.is_empty() {
        return Err(CsvError::EmptyFile);
    }

    let n_classes = labels.iter().max().copied().unwrap_or(0) + 1;
    let features = Matrix::from_rows(&rows);
    Dataset::new(features, labels, n_classes).map_err(CsvError::Invalid)
}

/// Write a dataset in the schema accepted by [`load_dataset_csv`].
pub fn save_dataset_csv(dataset: &Dataset, path: &Path) -> std::io::Result<()> {
    let mut out = String::new();
    for j in 0..dataset.n_features() {
        out.push_str(&format!("f{},", j));
    }
    out.push_str("label\n");
    for i in 0..dataset.len() {
        for v in dataset.features().row(i) {
            out.push_str(&format!("{},", v));
        }
        out.push_str(&format!("{}\n", dataset.labels()[i]));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Write a `level,score` CSV of one curve.
pub fn write_curve_csv(levels: &[f64], scores: &[f64], path: &Path) -> std::io::Result<()> {
    let mut out = String::from("level,score\n");
    for (l, s) in levels.iter().zip(scores) {
        out.push_str(&format!("{},{}\n", l, s));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

pub fn write_rg_curve_csv(curve: &RgCurve, path: &Path) -> std::io::Result<()> {
    write_curve_csv(&curve.levels, &curve.scores, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let file = tempfile::NamedTempFile::new().unwrap();
        fs::write(file.path(), content).unwrap();
        file
    }

    #[test]
    fn round_trips_bit_exactly() {
        let data = Dataset::new(
            Matrix::from_rows(&[
                vec![0.1, -2.5e-17],
                vec![std::f64::consts::PI, 1.0 / 3.0],
                vec![-0.0, 7.25],
            ]),
            vec![0, 1, 1],
            2,
        )
        .unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        save_dataset_csv(&data, file.path()).unwrap();
        let loaded = load_dataset_csv(file.path()).unwrap();
        assert_eq!(loaded.features().data(), data.features().data());
        assert_eq!(loaded.labels(), data.labels());
        assert_eq!(loaded.n_classes(), 2);
    }

    #[test]
    fn reports_missing_cell_coordinates() {
        let file = write_temp("f0,f1,label\n1.0,2.0,0\n1.0,1\n");
        match load_dataset_csv(file.path()) {
            Err(CsvError::NonNumericCell { row: 1, col: 2 }) => {}
            other => panic!("unexpected: {:?}", other.err()),
        }
    }

    #[test]
    fn reports_garbage_cell_coordinates() {
        let file = write_temp("f0,f1,label\n1.0,abc,0\n");
        match load_dataset_csv(file.path()) {
            Err(CsvError::NonNumericCell { row: 0, col: 1 }) => {}
            other => panic!("unexpected: {:?}", other.err()),
        }
    }

    #[test]
    fn rejects_bad_headers_and_labels() {
        let file = write_temp("x0,f1,label\n1.0,2.0,0\n");
        assert!(matches!(load_dataset_csv(file.path()), Err(CsvError::MalformedHeader(_))));

        let file = write_temp("f0,f1,label\n1.0,2.0,1.5\n");
        assert!(matches!(
            load_dataset_csv(file.path()),
            Err(CsvError::LabelOutOfRange { row: 0 })
        ));

        let file = write_temp("");
        assert!(matches!(load_dataset_csv(file.path()), Err(CsvError::EmptyFile)));

        let file = write_temp("f0,f1,label\n");
        assert!(matches!(load_dataset_csv(file.path()), Err(CsvError::EmptyFile)));
    }

    #[test]
    fn wide_feature_file_loads() {
        let d = 512;
        let header: String =
            (0..d).map(|j| format!("f{},", j)).collect::<String>() + "label\n";
        let mut content = header;
        for i in 0..6 {
            let row: String = (0..d).map(|j| format!("{},", (i * j) as f64 * 0.01)).collect();
            content.push_str(&format!("{}{}\n", row, i % 3));
        }
        let file = write_temp(&content);
        let data = load_dataset_csv(file.path()).unwrap();
        assert_eq!(data.n_features(), 512);
        assert_eq!(data.n_classes(), 3);
    }
}
