use serde::{Deserialize, Serialize};

use super::point::{Label, LabeledExample, Point};
use super::traits::Hypothesis;
use crate::error::{Error, Result};

/// A multiset of labeled examples sharing one dimension.
///
/// Storage order is incidental: equality compares multiplicities.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Dataset {
    items: Vec<LabeledExample>,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset { items: Vec::new() }
    }

    pub fn from_items(items: Vec<LabeledExample>) -> Result<Self> {
        let mut d = Dataset::new();
        d.items.reserve(items.len());
        for it in items {
            d.push(it)?;
        }
        Ok(d)
    }

    /// Builds a dataset from raw `(coords, label)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Label)>,
    {
        let items = pairs
            .into_iter()
            .map(|(x, y)| LabeledExample::new(Point::new(x)?, y))
            .collect::<Result<Vec<_>>>()?;
        Dataset::from_items(items)
    }

    pub fn push(&mut self, item: LabeledExample) -> Result<()> {
        if let Some(d) = self.dim() {
            if item.x.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: item.x.dim() });
            }
        }
        self.items.push(item);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Dimension of the stored points; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.items.first().map(|e| e.x.dim())
    }

    pub fn items(&self) -> &[LabeledExample] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledExample> {
        self.items.iter()
    }

    pub fn into_items(self) -> Vec<LabeledExample> {
        self.items
    }

    pub fn count_label(&self, y: Label) -> usize {
        self.items.iter().filter(|e| e.y == y).count()
    }

    /// Multiset union; multiplicities add.
    pub fn union(&self, other: &Dataset) -> Result<Dataset> {
        if let (Some(a), Some(b)) = (self.dim(), other.dim()) {
            if a != b {
                return Err(Error::DimensionMismatch { expected: a, found: b });
            }
        }
        let mut items = Vec::with_capacity(self.len() + other.len());
        items.extend_from_slice(&self.items);
        items.extend_from_slice(&other.items);
        Ok(Dataset { items })
    }

    /// Indices of the items in canonical (coordinate, label) order.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.items.len()).collect();
        idx.sort_by(|&a, &b| self.items[a].total_cmp(&self.items[b]).then(a.cmp(&b)));
        idx
    }

    /// A copy with items sorted canonically.
    pub fn canonical(&self) -> Dataset {
        let items = self.canonical_order().into_iter().map(|i| self.items[i].clone()).collect();
        Dataset { items }
    }
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.items.iter().zip(&b.items).all(|(x, y)| x.total_cmp(y).is_eq())
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a LabeledExample;
    type IntoIter = std::slice::Iter<'a, LabeledExample>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// Multiset union of two datasets.
pub fn dataset_union(a: &Dataset, b: &Dataset) -> Result<Dataset> {
    a.union(b)
}

/// Fraction of items that `h` misclassifies, counting multiplicity.
pub fn empirical_error(h: &dyn Hypothesis, s: &Dataset) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let wrong = s.iter().filter(|e| h.predict(&e.x) != e.y).count();
    Ok(wrong as f64 / s.len() as f64)
}

/// True iff `h` labels every item of `s` correctly.
pub fn is_consistent(h: &dyn Hypothesis, s: &Dataset) -> bool {
    s.iter().all(|e| h.predict(&e.x) == e.y)
}
