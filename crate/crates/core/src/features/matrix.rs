use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use super::FeatureVector;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("no feature vectors")]
    Empty,
    #[error("row {row} has {actual} values, expected {expected}")]
    LengthMismatch {
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("{labels} labels for {rows} rows")]
    LabelCount { labels: usize, rows: usize },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Rows are images, columns are attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledFeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    labels: Vec<String>,
    column_names: Vec<String>,
}

pub fn default_column_names(cols: usize) -> Vec<String> {
    (0..cols).map(|i| format!("f{i:03}")).collect()
}

impl LabeledFeatureMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        data: Vec<f64>,
        labels: Vec<String>,
        column_names: Vec<String>,
    ) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if labels.len() != rows {
            return Err(MatrixError::LabelCount {
                labels: labels.len(),
                rows,
            });
        }
        if data.len() != rows * cols {
            return Err(MatrixError::LengthMismatch {
                row: data.len() / cols,
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if column_names.len() != cols {
            return Err(MatrixError::LengthMismatch {
                row: 0,
                expected: cols,
                actual: column_names.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite {
                row: i / cols,
                col: i % cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            data,
            labels,
            column_names,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<String>) -> Result<Self, MatrixError> {
        let cols = rows.first().ok_or(MatrixError::Empty)?.len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::LengthMismatch {
                    row: i,
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data, labels, default_column_names(cols))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (m, v) in means.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= self.rows as f64);
        means
    }

    /// Sorted distinct labels.
    pub fn classes(&self) -> Vec<String> {
        let mut c = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn class_count(&self, label: &str) -> usize {
        self.labels.iter().filter(|l| *l == label).count()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            column_names: self.column_names.clone(),
        }
    }

    /// CSV with header `label,f000,...`; values at full precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), MatrixError> {
        let csv_err = |e: csv::Error| MatrixError::Csv {
            line: 0,
            message: e.to_string(),
        };
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label".to_string()];
        header.extend(self.column_names.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.rows {
            let mut rec = vec![self.labels[i].clone()];
            rec.extend(self.row(i).iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|source| MatrixError::Io {
            path: "<csv>".into(),
            source,
        })
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, MatrixError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = reader.headers().map_err(|e| MatrixError::Csv {
            line: 1,
            message: e.to_string(),
        })?;
        if header.get(0) != Some("label") || header.len() < 2 {
            return Err(MatrixError::Csv {
                line: 1,
                message: "header must be `label,<feature columns...>`".into(),
            });
        }
        let column_names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let cols = column_names.len();
        let mut data = Vec::new();
        let mut labels = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| MatrixError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != cols + 1 {
                return Err(MatrixError::Csv {
                    line,
                    message: format!("expected {} fields, found {}", cols + 1, rec.len()),
                });
            }
            labels.push(rec[0].to_string());
            for (j, field) in rec.iter().skip(1).enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| MatrixError::Csv {
                    line,
                    message: format!("column {}: {field:?} is not a number", column_names[j]),
                })?;
                if !v.is_finite() {
                    return Err(MatrixError::Csv {
                        line,
                        message: format!("column {}: non-finite value", column_names[j]),
                    });
                }
                data.push(v);
            }
        }
        Self::new(labels.len(), cols, data, labels, column_names)
    }

    pub fn save(&self, path: &Path) -> Result<(), MatrixError> {
        let file = std::fs::File::create(path).map_err(|source| MatrixError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn load(path: &Path) -> Result<Self, MatrixError> {
        let file = std::fs::File::open(path).map_err(|source| MatrixError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

/// Stacks feature vectors into a matrix, one row each, in input order.
pub fn assemble_matrix(vectors: &[FeatureVector]) -> Result<LabeledFeatureMatrix, MatrixError> {
    let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.values.clone()).collect();
    let labels = vectors.iter().map(|v| v.label.clone()).collect();
    LabeledFeatureMatrix::from_rows(&rows, labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(label: &str, n: usize, fill: f64) -> FeatureVector {
        FeatureVector {
            values: vec![fill; n],
            label: label.into(),
            degenerate_bands: vec![],
        }
    }

    #[test]
    fn assembles_113_by_75_matrix() {
        let mut vs: Vec<FeatureVector> = (0..53).map(|_| fv("NP", 75, 0.01)).collect();
        vs.extend((0..60).map(|_| fv("P", 75, 0.02)));
        let m = assemble_matrix(&vs).unwrap();
        assert_eq!((m.rows(), m.cols()), (113, 75));
        assert_eq!(m.class_count("NP"), 53);
        assert_eq!(m.class_count("P"), 60);
        assert_eq!(m.classes(), ["NP", "P"]);
        assert_eq!(m.column_names()[74], "f074");
    }

    #[test]
    fn single_vector_and_errors() {
        let m = assemble_matrix(&[fv("NP", 75, 0.0)]).unwrap();
        assert_eq!((m.rows(), m.cols()), (1, 75));
        assert!(matches!(
            assemble_matrix(&[fv("a", 75, 0.0), fv("b", 74, 0.0)]),
            Err(MatrixError::LengthMismatch { row: 1, .. })
        ));
        assert!(matches!(assemble_matrix(&[]), Err(MatrixError::Empty)));
        assert!(matches!(
            LabeledFeatureMatrix::from_rows(&[vec![f64::NAN]], vec!["a".into()]),
            Err(MatrixError::NonFinite { row: 0, col: 0 })
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = LabeledFeatureMatrix::from_rows(
            &[vec![0.1, 1.0 / 3.0, 1e-300], vec![0.0, 2.5e-17, 0.999]],
            vec!["NP".into(), "a,b".into()],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("label,f000,f001,f002\n"));
        assert_eq!(LabeledFeatureMatrix::read_csv(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn corrupt_row_names_its_line() {
        let text = "label,f000,f001\nNP,0.1,0.2\nP,0.3,oops\n";
        let err = LabeledFeatureMatrix::read_csv(text.as_bytes()).unwrap_err();
        assert!(matches!(err, MatrixError::Csv { line: 3, .. }), "{err}");
        let short = "label,f000,f001\nNP,0.1\n";
        let err = LabeledFeatureMatrix::read_csv(short.as_bytes()).unwrap_err();
        assert!(matches!(err, MatrixError::Csv { line: 2, .. }), "{err}");
        let bad_header = "name,f000\nNP,0.1\n";
        assert!(LabeledFeatureMatrix::read_csv(bad_header.as_bytes()).is_err());
    }
}
