//! Mixed-chain graphs: a mixed graph over the latent processes (directed edges
//! for lagged influence, bi-directed edges for contemporaneous association)
//! superimposed on a two-block chain graph whose directed edges point from
//! latent to observable variables.
//!
//! All node sets are [`VarSet`]s over one block. Nodes are 0-based internally
//! and printed 1-based (`E1`, `F1`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scheme::VariableScheme;
use crate::varset::{VarSet, MAX_BLOCK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Block {
    Latent,
    Observed,
}

impl Block {
    fn prefix(self) -> char {
        match self {
            Block::Latent => 'E',
            Block::Observed => 'F',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub kind: Block,
    pub index: usize,
}

impl NodeId {
    pub fn latent(index: usize) -> Self {
        NodeId {
            kind: Block::Latent,
            index,
        }
    }

    pub fn observed(index: usize) -> Self {
        NodeId {
            kind: Block::Observed,
            index,
        }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index + 1)
    }
}

/// Builder for [`MixedChainGraph`]. Duplicate edges are idempotent.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n_latent: usize,
    n_observed: usize,
    self_parents: bool,
    directed: Vec<(usize, usize)>,
    bidirected_latent: Vec<(usize, usize)>,
    emit: Vec<(usize, usize)>,
    bidirected_observed: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new(n_latent: usize, n_observed: usize) -> Self {
        GraphBuilder {
            n_latent,
            n_observed,
            self_parents: true,
            directed: Vec::new(),
            bidirected_latent: Vec::new(),
            emit: Vec::new(),
            bidirected_observed: Vec::new(),
        }
    }

    /// Disables the default `E_i -> E_i` self-loop on every latent node.
    pub fn no_self_parents(mut self) -> Self {
        self.self_parents = false;
        self
    }

    /// Directed latent edge `from -> to`: `from` is a parent of `to`.
    pub fn directed(mut self, from: usize, to: usize) -> Self {
        self.directed.push((from, to));
        self
    }

    pub fn bidirected_latent(mut self, a: usize, b: usize) -> Self {
        self.bidirected_latent.push((a, b));
        self
    }

    pub fn emit(mut self, latent: usize, observed: usize) -> Self {
        self.emit.push((latent, observed));
        self
    }

    pub fn bidirected_observed(mut self, a: usize, b: usize) -> Self {
        self.bidirected_observed.push((a, b));
        self
    }

    /// Adds every directed latent edge.
    pub fn complete_directed(mut self) -> Self {
        for u in 0..self.n_latent {
            for v in 0..self.n_latent {
                self.directed.push((u, v));
            }
        }
        self
    }

    pub fn complete_bidirected_latent(mut self) -> Self {
        for a in 0..self.n_latent {
            for b in a + 1..self.n_latent {
                self.bidirected_latent.push((a, b));
            }
        }
        self
    }

    pub fn complete_emit(mut self) -> Self {
        for u in 0..self.n_latent {
            for j in 0..self.n_observed {
                self.emit.push((u, j));
            }
        }
        self
    }

    pub fn complete_bidirected_observed(mut self) -> Self {
        for a in 0..self.n_observed {
            for b in a + 1..self.n_observed {
                self.bidirected_observed.push((a, b));
            }
        }
        self
    }

    pub fn build(self) -> Result<MixedChainGraph> {
        for (block, count) in [("latent", self.n_latent), ("observable", self.n_observed)] {
            if count > MAX_BLOCK {
                return Err(Error::Capacity {
                    block,
                    count,
                    limit: MAX_BLOCK,
                });
            }
        }
        let check = |node: NodeId| -> Result<()> {
            let limit = match node.kind {
                Block::Latent => self.n_latent,
                Block::Observed => self.n_observed,
            };
            if node.index < limit {
                Ok(())
            } else {
                Err(Error::UnknownNode(format!("{node}")))
            }
        };
        let mut latent_parents = alloc::vec![VarSet::EMPTY; self.n_latent];
        let mut latent_spouses = alloc::vec![VarSet::EMPTY; self.n_latent];
        let mut emit_parents = alloc::vec![VarSet::EMPTY; self.n_observed];
        let mut observed_spouses = alloc::vec![VarSet::EMPTY; self.n_observed];
        if self.self_parents {
            for (v, pa) in latent_parents.iter_mut().enumerate() {
                pa.insert(v);
            }
        }
        for &(u, v) in &self.directed {
            check(NodeId::latent(u))?;
            check(NodeId::latent(v))?;
            latent_parents[v].insert(u);
        }
        for &(a, b) in &self.bidirected_latent {
            check(NodeId::latent(a))?;
            check(NodeId::latent(b))?;
            if a != b {
                latent_spouses[a].insert(b);
                latent_spouses[b].insert(a);
            }
        }
        for &(u, j) in &self.emit {
            check(NodeId::latent(u))?;
            check(NodeId::observed(j))?;
            emit_parents[j].insert(u);
        }
        for &(a, b) in &self.bidirected_observed {
            check(NodeId::observed(a))?;
            check(NodeId::observed(b))?;
            if a != b {
                observed_spouses[a].insert(b);
                observed_spouses[b].insert(a);
            }
        }
        Ok(MixedChainGraph {
            n_latent: self.n_latent,
            n_observed: self.n_observed,
            latent_parents,
            latent_spouses,
            emit_parents,
            observed_spouses,
        })
    }
}

/// An immutable mixed-chain graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedChainGraph {
    n_latent: usize,
    n_observed: usize,
    /// Latent parents of each latent node.
    latent_parents: Vec<VarSet>,
    /// Bi-directed latent neighbours, self excluded.
    latent_spouses: Vec<VarSet>,
    /// Latent parents of each observable node.
    emit_parents: Vec<VarSet>,
    observed_spouses: Vec<VarSet>,
}

impl MixedChainGraph {
    pub fn builder(n_latent: usize, n_observed: usize) -> GraphBuilder {
        GraphBuilder::new(n_latent, n_observed)
    }

    pub fn n_latent(&self) -> usize {
        self.n_latent
    }

    pub fn n_observed(&self) -> usize {
        self.n_observed
    }

    pub fn latent_block(&self) -> VarSet {
        VarSet::full(self.n_latent)
    }

    pub fn observed_block(&self) -> VarSet {
        VarSet::full(self.n_observed)
    }

    /// Directed latent edges `(from, to)`, self-loops included.
    pub fn directed_latent(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (v, pa) in self.latent_parents.iter().enumerate() {
            for u in pa.iter() {
                out.insert((u, v));
            }
        }
        out
    }

    pub fn bidirected_latent(&self) -> BTreeSet<(usize, usize)> {
        undirected_pairs(&self.latent_spouses)
    }

    pub fn directed_emit(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (j, pa) in self.emit_parents.iter().enumerate() {
            for u in pa.iter() {
                out.insert((u, j));
            }
        }
        out
    }

    pub fn bidirected_observed(&self) -> BTreeSet<(usize, usize)> {
        undirected_pairs(&self.observed_spouses)
    }

    /// `pa_G(S)` for a set of latent nodes.
    pub fn latent_parents(&self, set: VarSet) -> VarSet {
        set.iter()
            .fold(VarSet::EMPTY, |acc, v| acc.union(self.latent_parents[v]))
    }

    /// `pa_{G*}(S)` for a set of observable nodes; a set of latent nodes.
    pub fn emission_parents(&self, set: VarSet) -> VarSet {
        set.iter()
            .fold(VarSet::EMPTY, |acc, j| acc.union(self.emit_parents[j]))
    }

    /// `sp_G(S)`, always containing `S`.
    pub fn latent_spouses(&self, set: VarSet) -> VarSet {
        set.iter()
            .fold(set, |acc, v| acc.union(self.latent_spouses[v]))
    }

    /// `sp_{G*}(S)` for observable nodes, always containing `S`.
    pub fn observed_spouses(&self, set: VarSet) -> VarSet {
        set.iter()
            .fold(set, |acc, j| acc.union(self.observed_spouses[j]))
    }

    fn spouse_lists(&self, block: Block) -> &[VarSet] {
        match block {
            Block::Latent => &self.latent_spouses,
            Block::Observed => &self.observed_spouses,
        }
    }

    fn block_size(&self, block: Block) -> usize {
        match block {
            Block::Latent => self.n_latent,
            Block::Observed => self.n_observed,
        }
    }

    fn check_nodes(&self, nodes: &[NodeId]) -> Result<()> {
        for n in nodes {
            if n.index >= self.block_size(n.kind) {
                return Err(Error::UnknownNode(format!("{n}")));
            }
        }
        Ok(())
    }

    /// Parents of a node set. Latent targets draw on the directed latent
    /// edges, observable targets on the emission edges.
    pub fn parents(&self, nodes: &[NodeId]) -> Result<BTreeSet<NodeId>> {
        if nodes.is_empty() {
            return Err(Error::UnknownNode("empty node set".into()));
        }
        self.check_nodes(nodes)?;
        let mut lat = VarSet::EMPTY;
        for n in nodes {
            lat = lat.union(match n.kind {
                Block::Latent => self.latent_parents[n.index],
                Block::Observed => self.emit_parents[n.index],
            });
        }
        Ok(lat.iter().map(NodeId::latent).collect())
    }

    /// Spouses of a node set within one block, the set itself included.
    pub fn spouses(&self, nodes: &[NodeId]) -> Result<BTreeSet<NodeId>> {
        let Some(first) = nodes.first() else {
            return Err(Error::UnknownNode("empty node set".into()));
        };
        if nodes.iter().any(|n| n.kind != first.kind) {
            return Err(Error::MixedBlock);
        }
        self.check_nodes(nodes)?;
        let set = VarSet::from_indices(nodes.iter().map(|n| n.index));
        let sp = match first.kind {
            Block::Latent => self.latent_spouses(set),
            Block::Observed => self.observed_spouses(set),
        };
        Ok(sp
            .iter()
            .map(|index| NodeId {
                kind: first.kind,
                index,
            })
            .collect())
    }

    /// Whether `set` induces a connected subgraph of the bi-directed edges.
    pub fn is_bi_connected(&self, block: Block, set: VarSet) -> bool {
        let Some(start) = set.iter().next() else {
            return false;
        };
        let adj = self.spouse_lists(block);
        let mut seen = VarSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(adj[v].intersection(set));
            }
            frontier = next.difference(seen);
            seen = seen.union(frontier);
        }
        seen == set
    }

    /// The family of bi-connected sets of a block, in canonical set order.
    pub fn bi_connected_family(&self, block: Block) -> Vec<VarSet> {
        let mut out: Vec<VarSet> = VarSet::full(self.block_size(block))
            .nonempty_subsets()
            .filter(|&s| self.is_bi_connected(block, s))
            .collect();
        out.sort();
        out
    }

    /// Statements for missing directed and bi-directed latent edges: Granger
    /// noncausality for every `T` with `U \ pa(T)` nonempty and
    /// contemporaneous independence for every `T` with `U \ sp(T)` nonempty.
    pub fn latent_independencies(&self, minimal_only: bool) -> Vec<IndependenceStatement> {
        let all = self.latent_block();
        let mut subsets: Vec<VarSet> = all.nonempty_subsets().collect();
        subsets.sort();
        let mut granger = Vec::new();
        let mut contemporaneous = Vec::new();
        for &t in &subsets {
            let pa = self.latent_parents(t);
            let rest = all.difference(pa);
            if !rest.is_empty() {
                granger.push((
                    pa,
                    IndependenceStatement {
                        kind: StatementKind::Granger,
                        left: TimedSet::latent_now(t),
                        right: TimedSet::latent_before(rest),
                        given: TimedSet::latent_before(pa),
                    },
                ));
            }
            let sp = self.latent_spouses(t);
            let rest = all.difference(sp);
            if !rest.is_empty() {
                contemporaneous.push((
                    sp,
                    IndependenceStatement {
                        kind: StatementKind::Contemporaneous,
                        left: TimedSet::latent_now(t),
                        right: TimedSet::latent_now(rest),
                        given: TimedSet::latent_before(all),
                    },
                ));
            }
        }
        let mut out = finish(granger, minimal_only);
        out.extend(finish(contemporaneous, minimal_only));
        out
    }

    /// Statements for missing bi-directed observable edges (local
    /// independence) and missing emission edges.
    pub fn observation_independencies(&self, minimal_only: bool) -> Vec<IndependenceStatement> {
        let lat = self.latent_block();
        let obs = self.observed_block();
        let mut subsets: Vec<VarSet> = obs.nonempty_subsets().collect();
        subsets.sort();
        let mut local = Vec::new();
        let mut emission = Vec::new();
        for &r in &subsets {
            let sp = self.observed_spouses(r);
            let rest = obs.difference(sp);
            if !rest.is_empty() {
                local.push((
                    sp,
                    IndependenceStatement {
                        kind: StatementKind::Local,
                        left: TimedSet::observed_now(r),
                        right: TimedSet::observed_now(rest),
                        given: TimedSet::latent_now(lat),
                    },
                ));
            }
            let pa = self.emission_parents(r);
            let rest = lat.difference(pa);
            if !rest.is_empty() {
                emission.push((
                    pa,
                    IndependenceStatement {
                        kind: StatementKind::Emission,
                        left: TimedSet::observed_now(r),
                        right: TimedSet::latent_now(rest),
                        given: TimedSet::latent_now(pa),
                    },
                ));
            }
        }
        let mut out = finish(local, minimal_only);
        out.extend(finish(emission, minimal_only));
        out
    }

    /// Both latent and observation statements.
    pub fn independencies(&self, minimal_only: bool) -> Vec<IndependenceStatement> {
        let mut out = self.latent_independencies(minimal_only);
        out.extend(self.observation_independencies(minimal_only));
        out
    }

    /// Linked/coupled classification against a pair of partitions with the
    /// same number of parts.
    pub fn classify_structure(
        &self,
        latent_partition: &[VarSet],
        observed_partition: &[VarSet],
    ) -> Result<Structure> {
        check_partition(latent_partition, self.latent_block(), "latent")?;
        check_partition(observed_partition, self.observed_block(), "observable")?;
        if latent_partition.len() != observed_partition.len() {
            return Err(Error::InvalidPartition(format!(
                "{} latent parts but {} observable parts",
                latent_partition.len(),
                observed_partition.len()
            )));
        }
        let mut emission_ok = true;
        let mut linked = true;
        let mut coupled = true;
        for (&t, &r) in latent_partition.iter().zip(observed_partition) {
            emission_ok &= self.emission_parents(r) == t && self.observed_spouses(r) == r;
            linked &= self.latent_parents(t) == t;
            coupled &= self.latent_spouses(t) == t;
        }
        Ok(match (emission_ok && linked, emission_ok && coupled) {
            (true, true) => Structure::Both,
            (true, false) => Structure::Linked,
            (false, true) => Structure::Coupled,
            (false, false) => Structure::Neither,
        })
    }

    /// Sufficient condition for `(E_T, F_R)` to remain a hidden Markov model:
    /// `pa_G(T) = T` and `pa_{G*}(R) ⊆ T`.
    pub fn marginal_preservation(&self, latent: VarSet, observed: VarSet) -> bool {
        self.latent_parents(latent) == latent && self.emission_parents(observed).is_subset(latent)
    }

    /// Searches for a relabelling `nu` of the latent nodes (`nu[i]` is the
    /// image of `E_i`) that preserves cardinalities, every latent edge type
    /// in both directions and every emission edge. Observable nodes stay fixed.
    pub fn equivalent_to(&self, other: &MixedChainGraph, cardinalities: &[usize]) -> Option<Vec<usize>> {
        if self.n_latent != other.n_latent
            || self.n_observed != other.n_observed
            || cardinalities.len() != self.n_latent
            || self.observed_spouses != other.observed_spouses
        {
            return None;
        }
        let mut nu = Vec::with_capacity(self.n_latent);
        let mut used = VarSet::EMPTY;
        if self.extend_bijection(other, cardinalities, &mut nu, &mut used) {
            Some(nu)
        } else {
            None
        }
    }

    fn extend_bijection(
        &self,
        other: &MixedChainGraph,
        cards: &[usize],
        nu: &mut Vec<usize>,
        used: &mut VarSet,
    ) -> bool {
        let i = nu.len();
        if i == self.n_latent {
            return true;
        }
        for j in 0..self.n_latent {
            if used.contains(j) || cards[i] != cards[j] {
                continue;
            }
            nu.push(j);
            if self.consistent_prefix(other, nu) {
                used.insert(j);
                if self.extend_bijection(other, cards, nu, used) {
                    return true;
                }
                *used = used.difference(VarSet::singleton(j));
            }
            nu.pop();
        }
        false
    }

    /// Checks every edge condition touching the newest mapped node.
    fn consistent_prefix(&self, other: &MixedChainGraph, nu: &[usize]) -> bool {
        let i = nu.len() - 1;
        let ni = nu[i];
        for (k, &nk) in nu.iter().enumerate() {
            if self.latent_parents[i].contains(k) != other.latent_parents[ni].contains(nk)
                || self.latent_parents[k].contains(i) != other.latent_parents[nk].contains(ni)
            {
                return false;
            }
            if k != i && self.latent_spouses[i].contains(k) != other.latent_spouses[ni].contains(nk) {
                return false;
            }
        }
        (0..self.n_observed)
            .all(|j| self.emit_parents[j].contains(i) == other.emit_parents[j].contains(ni))
    }
}

/// Free-function form of [`MixedChainGraph::equivalent_to`].
pub fn graphs_equivalent(
    g1: &MixedChainGraph,
    g2: &MixedChainGraph,
    cardinalities: &[usize],
) -> Option<Vec<usize>> {
    g1.equivalent_to(g2, cardinalities)
}

fn undirected_pairs(adj: &[VarSet]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (a, sp) in adj.iter().enumerate() {
        for b in sp.iter().filter(|&b| b > a) {
            out.insert((a, b));
        }
    }
    out
}

fn check_partition(parts: &[VarSet], block: VarSet, what: &str) -> Result<()> {
    let mut seen = VarSet::EMPTY;
    for &p in parts {
        if p.is_empty() {
            return Err(Error::InvalidPartition(format!("empty {what} part")));
        }
        if !p.is_disjoint(seen) {
            return Err(Error::InvalidPartition(format!("overlapping {what} parts")));
        }
        if !p.is_subset(block) {
            return Err(Error::InvalidPartition(format!("{what} part outside the block")));
        }
        seen = seen.union(p);
    }
    if seen != block {
        return Err(Error::InvalidPartition(format!("{what} parts do not cover the block")));
    }
    Ok(())
}

/// Keeps either everything or, per image class, the statement whose left set
/// is the union of the class (the maximal one).
fn finish(
    statements: Vec<(VarSet, IndependenceStatement)>,
    minimal_only: bool,
) -> Vec<IndependenceStatement> {
    if !minimal_only {
        return statements.into_iter().map(|(_, s)| s).collect();
    }
    let mut maximal: BTreeMap<u32, VarSet> = BTreeMap::new();
    for (image, st) in &statements {
        let e = maximal.entry(image.bits()).or_default();
        *e = e.union(st.left.vars);
    }
    statements
        .into_iter()
        .filter(|(image, st)| maximal[&image.bits()] == st.left.vars)
        .map(|(_, s)| s)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Structure {
    Linked,
    Coupled,
    Both,
    Neither,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Linked => "linked",
            Structure::Coupled => "coupled",
            Structure::Both => "both",
            Structure::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatementKind {
    Granger,
    Contemporaneous,
    Local,
    Emission,
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StatementKind::Granger => "granger",
            StatementKind::Contemporaneous => "contemporaneous",
            StatementKind::Local => "local",
            StatementKind::Emission => "emission",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeTag {
    /// Time `t`.
    Current,
    /// Time `t - 1`.
    Previous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimedSet {
    pub block: Block,
    pub vars: VarSet,
    pub time: TimeTag,
}

impl TimedSet {
    fn latent_now(vars: VarSet) -> Self {
        TimedSet {
            block: Block::Latent,
            vars,
            time: TimeTag::Current,
        }
    }
    fn latent_before(vars: VarSet) -> Self {
        TimedSet {
            block: Block::Latent,
            vars,
            time: TimeTag::Previous,
        }
    }
    fn observed_now(vars: VarSet) -> Self {
        TimedSet {
            block: Block::Observed,
            vars,
            time: TimeTag::Current,
        }
    }

    fn render(&self, names: Option<(&VariableScheme, &VariableScheme)>) -> String {
        let members: Vec<String> = self
            .vars
            .iter()
            .map(|i| match names {
                Some((lat, obs)) => {
                    let scheme = if self.block == Block::Latent { lat } else { obs };
                    scheme.variables()[i].name.clone()
                }
                None => format!("{}{}", self.block.prefix(), i + 1),
            })
            .collect();
        let time = match self.time {
            TimeTag::Current => "t",
            TimeTag::Previous => "t-1",
        };
        if members.is_empty() {
            format!("{{}}({time})")
        } else {
            format!("{{{}}}({time})", members.join(","))
        }
    }
}

/// `left ⫫ right | given`, with each variable set tagged by time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndependenceStatement {
    pub kind: StatementKind,
    pub left: TimedSet,
    pub right: TimedSet,
    pub given: TimedSet,
}

impl IndependenceStatement {
    /// Renders with variable names from the schemes.
    pub fn render(&self, latent: &VariableScheme, observed: &VariableScheme) -> String {
        let names = Some((latent, observed));
        format!(
            "{}: {} _||_ {} | {}",
            self.kind,
            self.left.render(names),
            self.right.render(names),
            self.given.render(names)
        )
    }
}

impl fmt::Display for IndependenceStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} _||_ {} | {}",
            self.kind,
            self.left.render(None),
            self.right.render(None),
            self.given.render(None)
        )
    }
}
