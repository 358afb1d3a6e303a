use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AnnotatedDocument;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Split each label group separately. Documents without a label form
    /// their own group.
    #[serde(default)]
    pub stratify: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 0,
            stratify: false,
        }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec {
            train_fraction,
            seed,
            stratify: false,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction {} is not in (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }

    fn train_size(&self, n: usize) -> usize {
        (self.train_fraction * n as f64).round() as usize
    }
}

/// Shuffles document indices with a seeded ChaCha8 stream and cuts the
/// first `round(fraction * n)` into the training side.
pub fn split(
    docs: &[AnnotatedDocument],
    spec: &SplitSpec,
) -> Result<(Vec<AnnotatedDocument>, Vec<AnnotatedDocument>)> {
    let (train, test) = split_indices(docs, spec)?;
    Ok((
        train.into_iter().map(|i| docs[i].clone()).collect(),
        test.into_iter().map(|i| docs[i].clone()).collect(),
    ))
}

/// Index form of [`split`].
pub fn split_indices(
    docs: &[AnnotatedDocument],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>)> {
    spec.check()?;
    if docs.len() < 2 {
        return Err(Error::Size(format!(
            "need at least 2 documents to split, got {}",
            docs.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if !spec.stratify {
        let mut order: Vec<usize> = (0..docs.len()).collect();
        order.shuffle(&mut rng);
        let test = order.split_off(spec.train_size(docs.len()));
        return Ok((order, test));
    }

    let mut groups: BTreeMap<Option<&str>, Vec<usize>> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        groups.entry(d.label.as_deref()).or_default().push(i);
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut members) in groups {
        members.shuffle(&mut rng);
        let rest = members.split_off(spec.train_size(members.len()));
        train.extend(members);
        test.extend(rest);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((train, test))
}
