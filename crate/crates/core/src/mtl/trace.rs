use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("sample {index} has length {got}, expected {expected}")]
    Ragged {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("trace must contain at least one sample")]
    Empty,
    #[error("position dimension must divide the sample length")]
    BadDim,
}

/// Finite sequence of stacked position samples `[y0, ŷ1, ..., ŷQ]`, taken
/// every `period` seconds. Indices run `0..=H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    dim: usize,
    period: f64,
    samples: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(dim: usize, period: f64, samples: Vec<Vec<f64>>) -> Result<Self, TraceError> {
        let first = samples.first().ok_or(TraceError::Empty)?;
        let expected = first.len();
        if dim == 0 || expected % dim != 0 || expected == 0 {
            return Err(TraceError::BadDim);
        }
        for (index, s) in samples.iter().enumerate() {
            if s.len() != expected {
                return Err(TraceError::Ragged {
                    index,
                    got: s.len(),
                    expected,
                });
            }
        }
        Ok(Trace {
            dim,
            period,
            samples,
        })
    }

    /// Position dimension `z` of a single agent.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Index of the last sample, `H`.
    pub fn last_index(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, j: usize) -> &[f64] {
        &self.samples[j]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    /// Number of agents stacked in each sample.
    pub fn agents(&self) -> usize {
        self.samples[0].len() / self.dim
    }

    pub fn push(&mut self, sample: Vec<f64>) -> Result<(), TraceError> {
        let expected = self.samples[0].len();
        if sample.len() != expected {
            return Err(TraceError::Ragged {
                index: self.samples.len(),
                got: sample.len(),
                expected,
            });
        }
        self.samples.push(sample);
        Ok(())
    }

    /// Prefix `0..=last`.
    pub fn prefix(&self, last: usize) -> Trace {
        Trace {
            dim: self.dim,
            period: self.period,
            samples: self.samples[..=last].to_vec(),
        }
    }
}
