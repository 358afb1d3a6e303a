use serde::{Deserialize, Serialize};

use crate::corpus::LabelSet;
use crate::error::{Error, Result};

/// One-vs-rest counts for a single class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// `matrix[t][p]` counts samples of true class `t` predicted as `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<u64>>,
}

impl ConfusionCounts {
    pub fn class_count(&self) -> usize {
        self.labels.len()
    }

    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.class_count()).map(|i| self.matrix[i][i]).sum()
    }

    pub fn class(&self, c: usize) -> ClassCounts {
        let tp = self.matrix[c][c];
        let row: u64 = self.matrix[c].iter().sum();
        let col: u64 = self.matrix.iter().map(|r| r[c]).sum();
        let fp = col - tp;
        let fn_ = row - tp;
        ClassCounts {
            tp,
            fp,
            fn_,
            tn: self.total() - tp - fp - fn_,
        }
    }

    pub fn per_class(&self) -> Vec<ClassCounts> {
        (0..self.class_count()).map(|c| self.class(c)).collect()
    }
}

/// Tallies predictions against the truth; both are class indices into `classes`.
pub fn confusion(truth: &[usize], pred: &[usize], classes: &LabelSet) -> Result<ConfusionCounts> {
    if truth.len() != pred.len() {
        return Err(Error::Input(format!(
            "{} true labels but {} predictions",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::Input("no samples to evaluate".into()));
    }
    let c = classes.len();
    let mut matrix = vec![vec![0u64; c]; c];
    for (&t, &p) in truth.iter().zip(pred) {
        if t >= c || p >= c {
            return Err(Error::Input(format!(
                "label index {} outside the {c}-class set",
                t.max(p)
            )));
        }
        matrix[t][p] += 1;
    }
    Ok(ConfusionCounts {
        labels: classes.names().to_vec(),
        matrix,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    #[default]
    Macro,
    Micro,
}

impl std::fmt::Display for Averaging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Averaging::Macro => "macro",
            Averaging::Micro => "micro",
        })
    }
}

impl std::str::FromStr for Averaging {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Averaging::Macro),
            "micro" => Ok(Averaging::Micro),
            other => Err(Error::Config(format!("unknown averaging `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricOptions {
    pub averaging: Averaging,
    /// Count the `O` tag in the aggregate. Ignored when `O` is the only class.
    pub include_o: bool,
}

/// A ratio in percent. `undefined` marks a zero denominator; the value is then 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub undefined: bool,
}

impl Ratio {
    fn of(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Ratio {
                value: 0.0,
                undefined: true,
            }
        } else {
            Ratio {
                value: 100.0 * num / den,
                undefined: false,
            }
        }
    }

    /// Harmonic mean of two percentages.
    fn f1(p: Ratio, r: Ratio) -> Self {
        let (p, r) = (p.value / 100.0, r.value / 100.0);
        Ratio::of(2.0 * p * r, p + r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub support: u64,
    pub counts: ClassCounts,
    pub precision: Ratio,
    pub recall: Ratio,
    pub f1: Ratio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub averaging: Averaging,
    pub include_o: bool,
    /// Labels that enter the aggregate.
    pub averaged_over: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
}

pub fn class_metrics(c: &ConfusionCounts) -> Vec<ClassMetrics> {
    c.per_class()
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let precision = Ratio::of(k.tp as f64, (k.tp + k.fp) as f64);
            let recall = Ratio::of(k.tp as f64, (k.tp + k.fn_) as f64);
            ClassMetrics {
                label: c.labels[i].clone(),
                support: k.tp + k.fn_,
                counts: k,
                precision,
                recall,
                f1: Ratio::f1(precision, recall),
            }
        })
        .collect()
}

/// Accuracy is `trace / total`; the other three are aggregated per `opts`.
pub fn metrics(c: &ConfusionCounts, opts: MetricOptions) -> Result<Metrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Input("confusion matrix is empty".into()));
    }
    let per_class = class_metrics(c);
    let mut included: Vec<usize> = (0..per_class.len())
        .filter(|&i| opts.include_o || c.labels[i] != "O")
        .collect();
    if included.is_empty() {
        included = (0..per_class.len()).collect();
    }

    let (precision, recall, f1) = match opts.averaging {
        Averaging::Macro => {
            let n = included.len() as f64;
            let mean = |f: &dyn Fn(&ClassMetrics) -> f64| {
                included.iter().map(|&i| f(&per_class[i])).sum::<f64>() / n
            };
            (
                mean(&|m| m.precision.value),
                mean(&|m| m.recall.value),
                mean(&|m| m.f1.value),
            )
        }
        Averaging::Micro => {
            let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
            for &i in &included {
                let k = per_class[i].counts;
                tp += k.tp;
                fp += k.fp;
                fn_ += k.fn_;
            }
            let p = Ratio::of(tp as f64, (tp + fp) as f64);
            let r = Ratio::of(tp as f64, (tp + fn_) as f64);
            (p.value, r.value, Ratio::f1(p, r).value)
        }
    };

    Ok(Metrics {
        accuracy: 100.0 * c.trace() as f64 / total as f64,
        precision,
        recall,
        f1,
        averaging: opts.averaging,
        include_o: opts.include_o,
        averaged_over: included.iter().map(|&i| c.labels[i].clone()).collect(),
        per_class,
    })
}
