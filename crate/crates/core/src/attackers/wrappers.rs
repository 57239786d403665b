use std::sync::Arc;

use super::AttackContext;
use crate::base::{flip, Attacker, Budget, Dataset, Hypothesis, LabeledExample, Point, RngStream};
use crate::error::{Error, Result};

/// Injects nothing.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullAttacker;

pub fn null_attacker() -> NullAttacker {
    NullAttacker
}

impl Attacker for NullAttacker {
    fn name(&self) -> String {
        "null_attacker".into()
    }

    fn budget(&self) -> Budget {
        Budget::Finite(0)
    }

    fn poison(&self, _: &dyn Hypothesis, _: &AttackContext, _: &Dataset, _: &Point, _: &mut RngStream) -> Result<Dataset> {
        Ok(Dataset::new())
    }
}

/// Keeps the first `t` items of the inner attacker's output in canonical order.
#[derive(Clone)]
pub struct BudgetWrapper {
    pub inner: Arc<dyn Attacker>,
    pub t: usize,
}

pub fn budget_wrapper(inner: Arc<dyn Attacker>, t: usize) -> BudgetWrapper {
    BudgetWrapper { inner, t }
}

impl Attacker for BudgetWrapper {
    fn name(&self) -> String {
        format!("budget_wrapper({}, t={})", self.inner.name(), self.t)
    }

    fn budget(&self) -> Budget {
        match self.inner.budget() {
            Budget::Finite(k) => Budget::Finite(k.min(self.t)),
            Budget::Unbounded => Budget::Finite(self.t),
        }
    }

    fn poison(
        &self,
        target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        rng: &mut RngStream,
    ) -> Result<Dataset> {
        let mut items = self.inner.poison(target, ctx, train, x0, rng)?.canonical().into_items();
        items.truncate(self.t);
        Dataset::from_items(items)
    }
}

/// Attacks an unseen star point `x_i` by adding every other star example
/// except `x_i` and `x_{i*}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HollowStarAttacker;

pub fn hollow_star_attacker() -> HollowStarAttacker {
    HollowStarAttacker
}

impl Attacker for HollowStarAttacker {
    fn name(&self) -> String {
        "hollow_star_attacker".into()
    }

    fn budget(&self) -> Budget {
        Budget::Unbounded
    }

    fn poison(
        &self,
        _target: &dyn Hypothesis,
        ctx: &AttackContext,
        train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        let AttackContext::HollowStar { class, star, target_row } = ctx else {
            return Err(Error::Context("hollow_star_attacker needs hollow-star metadata".into()));
        };
        let Some(i) = class.index_of(x0) else {
            return Ok(Dataset::new());
        };
        if i == *target_row || train.iter().any(|e| &e.x == x0) {
            return Ok(Dataset::new());
        }
        let items = (0..class.domain_size())
            .filter(|&j| j != i && j != *target_row)
            .map(|j| LabeledExample { x: class.point(j), y: star[j] })
            .collect();
        Dataset::from_items(items)
    }
}

/// Negative control: emits the test point with the wrong label.
#[derive(Clone, Copy, Debug, Default)]
pub struct LabelFlip;

pub fn label_flip_attacker() -> LabelFlip {
    LabelFlip
}

impl Attacker for LabelFlip {
    fn name(&self) -> String {
        "label_flip_attacker".into()
    }

    fn budget(&self) -> Budget {
        Budget::Finite(1)
    }

    fn poison(
        &self,
        target: &dyn Hypothesis,
        _ctx: &AttackContext,
        _train: &Dataset,
        x0: &Point,
        _rng: &mut RngStream,
    ) -> Result<Dataset> {
        Dataset::from_items(vec![LabeledExample { x: x0.clone(), y: flip(target.predict(x0)) }])
    }
}
