use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix data",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.iter_rows().map(<[f64]>::to_vec).collect()
    }

    /// `self · v` for a vector of length `cols`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        self.iter_rows().map(|r| crate::norms::dot(r, v)).collect()
    }
}

/// Labelled sample `S ∈ (X × Y)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledSample {
    inputs: Matrix,
    targets: Vec<f64>,
    pub source_id: String,
}

impl LabelledSample {
    pub fn new(inputs: Matrix, targets: Vec<f64>, source_id: impl Into<String>) -> Result<Self> {
        if inputs.rows() != targets.len() {
            return Err(Error::DimensionMismatch {
                context: "labelled sample targets",
                expected: inputs.rows(),
                found: targets.len(),
            });
        }
        if inputs.rows() == 0 {
            return Err(Error::Empty("labelled sample"));
        }
        ensure_finite(inputs.as_slice(), "labelled sample inputs")?;
        ensure_finite(&targets, "labelled sample targets")?;
        Ok(LabelledSample {
            inputs,
            targets,
            source_id: source_id.into(),
        })
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }

    /// The inputs alone, e.g. for estimating sensitivity on the labelled points.
    pub fn to_unlabelled(&self) -> UnlabelledSample {
        UnlabelledSample {
            inputs: self.inputs.clone(),
            source_id: format!("{}#inputs", self.source_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnlabelledSample {
    inputs: Matrix,
    pub source_id: String,
}

impl UnlabelledSample {
    pub fn new(inputs: Matrix, source_id: impl Into<String>) -> Result<Self> {
        if inputs.rows() == 0 {
            return Err(Error::Empty("unlabelled sample"));
        }
        ensure_finite(inputs.as_slice(), "unlabelled sample inputs")?;
        Ok(UnlabelledSample {
            inputs,
            source_id: source_id.into(),
        })
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.inputs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.inputs.cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_targets() {
        let x = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            LabelledSample::new(x, vec![0.0], "s"),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        let empty = Matrix::zeros(0, 2);
        assert!(UnlabelledSample::new(empty, "u").is_err());
        let bad = Matrix::from_rows(&[vec![f64::NAN]]).unwrap();
        assert!(matches!(UnlabelledSample::new(bad, "u"), Err(Error::NonFinite(_))));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }
}
