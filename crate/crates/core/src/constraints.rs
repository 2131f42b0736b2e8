//! Zero restrictions on marginal interactions.
//!
//! Every hypothesis in scope (graph Markov properties, additivity, invariant
//! association, user restrictions) is a set of coefficients forced to zero.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Block, MixedChainGraph};
use crate::param::{InteractionIndex, Layout, Target};
use crate::scheme::VariableScheme;
use crate::varset::VarSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Granger,
    Contemporaneous,
    Local,
    Emission,
    Additivity,
    InvariantAssociation,
    User,
}

impl Provenance {
    pub const ALL: [Provenance; 7] = [
        Provenance::Granger,
        Provenance::Contemporaneous,
        Provenance::Local,
        Provenance::Emission,
        Provenance::Additivity,
        Provenance::InvariantAssociation,
        Provenance::User,
    ];
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Granger => "granger",
            Provenance::Contemporaneous => "contemporaneous",
            Provenance::Local => "local",
            Provenance::Emission => "emission",
            Provenance::Additivity => "additivity",
            Provenance::InvariantAssociation => "invariant_association",
            Provenance::User => "user",
        })
    }
}

/// The two layouts of a model: transition (`delta`) and emission (`theta`).
#[derive(Debug, Clone)]
pub struct Schemes {
    pub latent: VariableScheme,
    pub observed: VariableScheme,
    pub transition: Layout,
    pub emission: Layout,
}

impl Schemes {
    pub fn new(latent: VariableScheme, observed: VariableScheme) -> Self {
        Schemes {
            transition: Layout::new(latent.clone(), latent.clone()),
            emission: Layout::new(observed.clone(), latent.clone()),
            latent,
            observed,
        }
    }

    pub fn layout(&self, target: Target) -> &Layout {
        match target {
            Target::Transition => &self.transition,
            Target::Emission => &self.emission,
        }
    }

    /// Total number of coefficients, `|E|(|E| - 1) + |E|(|F| - 1)`.
    pub fn total_parameters(&self) -> usize {
        self.transition.len() + self.emission.len()
    }
}

/// Coefficients restricted to zero, each with the hypotheses that restrict it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    zeroed: BTreeMap<InteractionIndex, BTreeSet<Provenance>>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, index: InteractionIndex, provenance: Provenance) {
        self.zeroed.entry(index).or_default().insert(provenance);
    }

    /// Zeroes every coefficient of the `(P, Q)` block.
    pub fn insert_block(&mut self, layout: &Layout, target: Target, p: VarSet, q: VarSet, provenance: Provenance) {
        for cell in layout.cells.iter().filter(|c| c.margin == p) {
            for combo in layout.combos.iter().filter(|k| k.set == q) {
                self.insert(
                    InteractionIndex {
                        target,
                        response: p,
                        condition: q,
                        response_categories: cell.categories.clone(),
                        condition_categories: combo.categories.clone(),
                    },
                    provenance,
                );
            }
        }
    }

    pub fn merge(&mut self, other: &ConstraintSet) {
        for (idx, provs) in &other.zeroed {
            self.zeroed.entry(idx.clone()).or_default().extend(provs.iter().copied());
        }
    }

    pub fn union(mut self, other: &ConstraintSet) -> Self {
        self.merge(other);
        self
    }

    pub fn len(&self) -> usize {
        self.zeroed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeroed.is_empty()
    }

    pub fn contains(&self, index: &InteractionIndex) -> bool {
        self.zeroed.contains_key(index)
    }

    pub fn provenance(&self, index: &InteractionIndex) -> Option<&BTreeSet<Provenance>> {
        self.zeroed.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InteractionIndex, &BTreeSet<Provenance>)> {
        self.zeroed.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = &InteractionIndex> {
        self.zeroed.keys()
    }

    /// Whether every index of `other` is also zeroed here.
    pub fn is_superset(&self, other: &ConstraintSet) -> bool {
        other.zeroed.keys().all(|k| self.zeroed.contains_key(k))
    }

    pub fn count_target(&self, target: Target) -> usize {
        self.zeroed.keys().filter(|k| k.target == target).count()
    }

    /// Number of indices carrying each provenance tag; an index with several
    /// tags counts under each of them.
    pub fn count_by_provenance(&self) -> BTreeMap<Provenance, usize> {
        let mut out = BTreeMap::new();
        for provs in self.zeroed.values() {
            for &p in provs {
                *out.entry(p).or_insert(0) += 1;
            }
        }
        out
    }

    /// Storage positions of zeroed coefficients of one target, as a mask.
    pub fn zero_mask(&self, layout: &Layout, target: Target) -> Vec<bool> {
        let mut mask = alloc::vec![false; layout.len()];
        for idx in self.zeroed.keys().filter(|k| k.target == target) {
            if let Some(pos) = layout.index_position(idx) {
                mask[pos] = true;
            }
        }
        mask
    }

    /// Whether every index refers to a valid coefficient of `schemes`.
    pub fn is_valid_for(&self, schemes: &Schemes) -> bool {
        self.zeroed
            .keys()
            .all(|k| schemes.layout(k.target).index_position(k).is_some())
    }
}

/// Zero restrictions equivalent to the Markov properties of the graph:
/// Granger noncausality and contemporaneous independence on `delta`, local
/// independence and emission restrictions on `theta`.
pub fn graph_constraints(graph: &MixedChainGraph, schemes: &Schemes) -> ConstraintSet {
    let mut out = ConstraintSet::new();
    let lat = graph.latent_block();
    let obs = graph.observed_block();
    let tl = &schemes.transition;
    let el = &schemes.emission;
    for p in lat.nonempty_subsets() {
        let pa = graph.latent_parents(p);
        let connected = graph.is_bi_connected(Block::Latent, p);
        for q in lat.subsets() {
            if !q.is_subset(pa) {
                out.insert_block(tl, Target::Transition, p, q, Provenance::Granger);
            }
            if !connected {
                out.insert_block(tl, Target::Transition, p, q, Provenance::Contemporaneous);
            }
        }
    }
    for p in obs.nonempty_subsets() {
        let pa = graph.emission_parents(p);
        let connected = graph.is_bi_connected(Block::Observed, p);
        for q in lat.subsets() {
            if !q.is_subset(pa) {
                out.insert_block(el, Target::Emission, p, q, Provenance::Emission);
            }
            if !connected {
                out.insert_block(el, Target::Emission, p, q, Provenance::Local);
            }
        }
    }
    out
}

/// Additive latent effects: every coefficient with `|Q| > 1` is zero.
pub fn additivity_constraints(schemes: &Schemes, target: Target) -> ConstraintSet {
    let layout = schemes.layout(target);
    let mut out = ConstraintSet::new();
    for (_, idx) in layout.canonical(target) {
        if idx.condition.len() > 1 {
            out.insert(idx, Provenance::Additivity);
        }
    }
    out
}

/// Invariant association: interactions with `|P| > 1` do not depend on the
/// conditioning state, so their coefficients with `Q` nonempty are zero.
/// The constant terms `theta^{P,∅}` stay free.
pub fn invariant_association_constraints(schemes: &Schemes, target: Target) -> ConstraintSet {
    let layout = schemes.layout(target);
    let mut out = ConstraintSet::new();
    for (_, idx) in layout.canonical(target) {
        if idx.response.len() > 1 && !idx.condition.is_empty() {
            out.insert(idx, Provenance::InvariantAssociation);
        }
    }
    out
}

/// Zeroes the whole `(P, Q)` block for all category choices.
pub fn user_zero_constraints(schemes: &Schemes, target: Target, p: VarSet, q: VarSet) -> ConstraintSet {
    let mut out = ConstraintSet::new();
    out.insert_block(schemes.layout(target), target, p, q, Provenance::User);
    out
}

/// Free parameters: all coefficients minus the distinct zeroed ones.
pub fn count_free_parameters(schemes: &Schemes, constraints: &ConstraintSet) -> usize {
    schemes.total_parameters() - constraints.len()
}
