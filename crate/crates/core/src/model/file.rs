//! Plain-text model files.
//!
//! ```text
//! GFHEAD 1
//! schema_version grammar-v1
//! input_dim 50
//! ... (remaining HeadConfig keys)
//! fitted true
//! label <name>          (one per class, optional)
//! meta <key> <value>    (optional)
//! layer <fan_in> <fan_out>
//! <fan_in lines of fan_out weights>
//! <one line of fan_out biases>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::head::{Head, HeadConfig, Layer};
use crate::error::{Error, Result};
use crate::grammar::SCHEMA_VERSION;
use crate::matrix::Matrix;

const MAGIC: &str = "GFHEAD 1";

#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub head: Head,
    pub labels: Vec<String>,
    pub meta: BTreeMap<String, String>,
}

impl ModelFile {
    pub fn new(head: Head) -> Self {
        ModelFile {
            head,
            labels: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn render(&self) -> Result<String> {
        let c = &self.head.config;
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "schema_version {SCHEMA_VERSION}");
        let _ = writeln!(out, "input_dim {}", c.input_dim);
        let _ = writeln!(out, "hidden_dim {}", c.hidden_dim);
        let _ = writeln!(out, "class_count {}", c.class_count);
        let _ = writeln!(out, "learning_rate {}", c.learning_rate);
        let _ = writeln!(out, "epochs {}", c.epochs);
        let _ = writeln!(out, "batch_size {}", c.batch_size);
        let _ = writeln!(out, "l2 {}", c.l2);
        let _ = writeln!(out, "seed {}", c.seed);
        let _ = writeln!(out, "fitted {}", self.head.fitted);
        for l in &self.labels {
            check_text(l)?;
            let _ = writeln!(out, "label {l}");
        }
        for (k, v) in &self.meta {
            check_text(v)?;
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Error::Input(format!("bad meta key `{k}`")));
            }
            let _ = writeln!(out, "meta {k} {v}");
        }
        for layer in &self.head.layers {
            let w = &layer.weights;
            let _ = writeln!(out, "layer {} {}", w.rows(), w.cols());
            for row in w.iter_rows() {
                let _ = writeln!(out, "{}", join(row));
            }
            let _ = writeln!(out, "{}", join(&layer.bias));
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::format(0, format!("model file ends before {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::format(1, "not a GFHEAD 1 model file"));
        }

        let mut config = HeadConfig::default();
        let mut fitted = false;
        let mut labels = Vec::new();
        let mut meta = BTreeMap::new();
        let mut layers = Vec::new();
        while let Ok((line_no, line)) = next("end") {
            if line.trim().is_empty() {
                continue;
            }
            let (key, value) = line.split_once(' ').unwrap_or((line, ""));
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::format(line_no, format!("bad number `{v}`")))
            };
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::format(line_no, format!("bad integer `{v}`")))
            };
            match key {
                "schema_version" if value != SCHEMA_VERSION => {
                    return Err(Error::format(line_no, format!("unknown schema `{value}`")))
                }
                "schema_version" => {}
                "input_dim" => config.input_dim = int(value)? as usize,
                "hidden_dim" => config.hidden_dim = int(value)? as usize,
                "class_count" => config.class_count = int(value)? as usize,
                "learning_rate" => config.learning_rate = num(value)?,
                "epochs" => config.epochs = int(value)? as usize,
                "batch_size" => config.batch_size = int(value)? as usize,
                "l2" => config.l2 = num(value)?,
                "seed" => config.seed = int(value)?,
                "fitted" => fitted = value == "true",
                "label" => labels.push(value.to_string()),
                "meta" => {
                    let (k, v) = value.split_once(' ').unwrap_or((value, ""));
                    meta.insert(k.to_string(), v.to_string());
                }
                "layer" => {
                    let dims: Vec<&str> = value.split(' ').collect();
                    let [fan_in, fan_out] = dims.as_slice() else {
                        return Err(Error::format(
                            line_no,
                            "expected `layer <fan_in> <fan_out>`",
                        ));
                    };
                    let (fan_in, fan_out) = (int(fan_in)? as usize, int(fan_out)? as usize);
                    let mut data = Vec::with_capacity(fan_in * fan_out);
                    for _ in 0..fan_in {
                        let (n, row) = next("weights")?;
                        data.extend(parse_row(row, fan_out, n)?);
                    }
                    let (n, row) = next("bias")?;
                    let bias = parse_row(row, fan_out, n)?;
                    layers.push(Layer {
                        weights: Matrix::from_vec(fan_in, fan_out, data)?,
                        bias,
                    });
                }
                other => return Err(Error::format(line_no, format!("unknown key `{other}`"))),
            }
        }

        config.validate()?;
        let expected = config.layer_shapes();
        let actual: Vec<(usize, usize)> = layers
            .iter()
            .map(|l| (l.weights.rows(), l.weights.cols()))
            .collect();
        if expected != actual {
            return Err(Error::Input(format!(
                "layer shapes {actual:?} do not match config {expected:?}"
            )));
        }
        if !labels.is_empty() && labels.len() != config.class_count {
            return Err(Error::Input(format!(
                "{} labels for {} classes",
                labels.len(),
                config.class_count
            )));
        }
        let head = Head {
            config,
            layers,
            fitted,
        };
        if !head.is_finite() {
            return Err(Error::Input("model contains non-finite parameters".into()));
        }
        Ok(ModelFile { head, labels, meta })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.render()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn check_text(s: &str) -> Result<()> {
    if s.contains(['\n', '\r']) {
        return Err(Error::Input("model file text contains a newline".into()));
    }
    Ok(())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_row(line: &str, expected: usize, line_no: usize) -> Result<Vec<f64>> {
    let values = line
        .split_whitespace()
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::format(line_no, format!("bad number `{v}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::format(
            line_no,
            format!("expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}
