use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grammar::{GrammarVector, FEATURE_NAMES, GRAMMAR_DIM, SCHEMA_VERSION};

/// Per-feature z-score parameters fitted on training grammar vectors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn is_fitted(&self) -> bool {
        self.mean.len() == GRAMMAR_DIM
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn from_parts(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != GRAMMAR_DIM || std.len() != GRAMMAR_DIM {
            return Err(Error::Shape {
                expected: GRAMMAR_DIM,
                actual: mean.len().min(std.len()),
            });
        }
        if std.iter().any(|s| !(*s > 0.0 && s.is_finite())) || mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::Input(
                "standardizer parameters must be finite with sigma > 0".into(),
            ));
        }
        Ok(Standardizer { mean, std })
    }

    fn require_fitted(&self) -> Result<()> {
        if self.is_fitted() {
            Ok(())
        } else {
            Err(Error::State("standardizer is not fitted".into()))
        }
    }

    /// `(v - mean) / std`, feature by feature.
    pub fn transform(&self, values: &[f64; GRAMMAR_DIM]) -> Result<[f64; GRAMMAR_DIM]> {
        self.require_fitted()?;
        let mut out = [0.0; GRAMMAR_DIM];
        for i in 0..GRAMMAR_DIM {
            out[i] = (values[i] - self.mean[i]) / self.std[i];
        }
        Ok(out)
    }

    pub fn inverse(&self, z: &[f64; GRAMMAR_DIM]) -> Result<[f64; GRAMMAR_DIM]> {
        self.require_fitted()?;
        let mut out = [0.0; GRAMMAR_DIM];
        for i in 0..GRAMMAR_DIM {
            out[i] = z[i] * self.std[i] + self.mean[i];
        }
        Ok(out)
    }

    /// CSV rows `schema_version,feature,mu,sigma`.
    pub fn render_csv(&self) -> Result<String> {
        self.require_fitted()?;
        let mut out = String::from("schema_version,feature,mu,sigma\n");
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            let _ = writeln!(
                out,
                "{SCHEMA_VERSION},{name},{},{}",
                self.mean[i], self.std[i]
            );
        }
        Ok(out)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next() != Some("schema_version,feature,mu,sigma") {
            return Err(Error::Schema("standardizer header mismatch".into()));
        }
        let mut mean = Vec::with_capacity(GRAMMAR_DIM);
        let mut std = Vec::with_capacity(GRAMMAR_DIM);
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').collect();
            let ok = cells.len() == 4
                && cells[0] == SCHEMA_VERSION
                && FEATURE_NAMES.get(i) == Some(&cells[1]);
            if !ok {
                return Err(Error::format(i + 2, "unexpected standardizer row"));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::format(i + 2, format!("bad number `{s}`")))
            };
            mean.push(num(cells[2])?);
            std.push(num(cells[3])?);
        }
        Standardizer::from_parts(mean, std)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render_csv()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text)
    }
}

/// Mean and population standard deviation per feature; a feature whose
/// spread is zero (up to rounding) gets sigma = 1.
pub fn fit_standardizer(train: &[GrammarVector]) -> Result<Standardizer> {
    fit_rows(train.iter().map(|v| &v.values), train.len())
}

pub(crate) fn fit_rows<'a>(
    rows: impl Iterator<Item = &'a [f64; GRAMMAR_DIM]> + Clone,
    n: usize,
) -> Result<Standardizer> {
    if n < 2 {
        return Err(Error::Size(format!(
            "need at least 2 vectors to fit, got {n}"
        )));
    }
    let nf = n as f64;
    let mut mean = vec![0.0; GRAMMAR_DIM];
    for r in rows.clone() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= nf);
    let mut var = vec![0.0; GRAMMAR_DIM];
    for r in rows {
        for i in 0..GRAMMAR_DIM {
            let d = r[i] - mean[i];
            var[i] += d * d;
        }
    }
    let std = var
        .into_iter()
        .zip(&mean)
        .map(|(v, m)| {
            let s = (v / nf).sqrt();
            if s <= 1e-12 * m.abs().max(1.0) {
                1.0
            } else {
                s
            }
        })
        .collect();
    Ok(Standardizer { mean, std })
}
