//! Glonek–McCullagh marginal interactions of conditional probability tables.
//!
//! For a response scheme observed given a conditioning scheme, each
//! conditional slice `p(. | e)` maps to baseline interactions
//! `eta^P(f_P | e)`, contrasts of log marginal probabilities over the margin
//! `P`. Their dependence on `e` is then expanded factorially with baseline
//! coding into coefficients `theta^{P,Q}(f_P | e_Q)`. Applied to emission
//! tables these are the `theta` parameters; applied to transition tables
//! (response = latent at `t`, condition = latent at `t - 1`) the `delta`
//! parameters.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scheme::{nonbaseline_combos, VariableScheme};
use crate::varset::{sorted_subsets, VarSet};

/// Smallest probability admitted anywhere in a table.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Which table an interaction belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// `delta` coefficients of the latent transition table.
    Transition,
    /// `theta` coefficients of the state-dependent observation table.
    Emission,
}

impl Target {
    pub fn tag(self) -> &'static str {
        match self {
            Target::Transition => "DELTA",
            Target::Emission => "THETA",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "DELTA" => Some(Target::Transition),
            "THETA" => Some(Target::Emission),
            _ => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Transition => "transition",
            Target::Emission => "emission",
        })
    }
}

/// A non-baseline cell `f_P` of the margin over `P`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResponseCell {
    pub margin: VarSet,
    /// 0-based categories of the members of `margin`, all non-baseline.
    pub categories: Vec<u8>,
}

/// A non-baseline conditioning combination `e_Q`; `Q` may be empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditionCombo {
    pub set: VarSet,
    pub categories: Vec<u8>,
}

/// Identifies one coefficient `theta^{P,Q}(f_P | e_Q)` or `delta^{P,Q}`.
///
/// Ordering is `(target, |P|, P, Q, f_P, e_Q)` with sets ordered by size and
/// then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InteractionIndex {
    pub target: Target,
    pub response: VarSet,
    pub condition: VarSet,
    pub response_categories: Vec<u8>,
    pub condition_categories: Vec<u8>,
}

impl InteractionIndex {
    fn new(target: Target, cell: &ResponseCell, combo: &ConditionCombo) -> Self {
        InteractionIndex {
            target,
            response: cell.margin,
            condition: combo.set,
            response_categories: cell.categories.clone(),
            condition_categories: combo.categories.clone(),
        }
    }
}

/// Cells and conditioning combinations of a (response, condition) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub response: VariableScheme,
    pub condition: VariableScheme,
    /// Ordered by `(|P|, P, f_P)`.
    pub cells: Vec<ResponseCell>,
    /// Ordered by `(|Q|, Q, e_Q)`, starting with the empty combination.
    pub combos: Vec<ConditionCombo>,
}

impl Layout {
    pub fn new(response: VariableScheme, condition: VariableScheme) -> Self {
        let mut cells = Vec::new();
        for margin in sorted_subsets(response.len()).into_iter().filter(|s| !s.is_empty()) {
            for categories in nonbaseline_combos(&response, margin) {
                cells.push(ResponseCell { margin, categories });
            }
        }
        let mut combos = Vec::new();
        for set in sorted_subsets(condition.len()) {
            for categories in nonbaseline_combos(&condition, set) {
                combos.push(ConditionCombo { set, categories });
            }
        }
        Layout {
            response,
            condition,
            cells,
            combos,
        }
    }

    /// Number of coefficients, `(|F| - 1) * |E|`.
    pub fn len(&self) -> usize {
        self.cells.len() * self.combos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, cell: usize, combo: usize) -> usize {
        cell * self.combos.len() + combo
    }

    pub fn cell_index(&self, margin: VarSet, categories: &[u8]) -> Option<usize> {
        self.cells
            .binary_search_by(|c| {
                c.margin
                    .cmp(&margin)
                    .then_with(|| c.categories.as_slice().cmp(categories))
            })
            .ok()
    }

    pub fn combo_index(&self, set: VarSet, categories: &[u8]) -> Option<usize> {
        self.combos
            .binary_search_by(|c| {
                c.set
                    .cmp(&set)
                    .then_with(|| c.categories.as_slice().cmp(categories))
            })
            .ok()
    }

    pub fn index_position(&self, index: &InteractionIndex) -> Option<usize> {
        let cell = self.cell_index(index.response, &index.response_categories)?;
        let combo = self.combo_index(index.condition, &index.condition_categories)?;
        Some(self.position(cell, combo))
    }

    /// `(position, index)` pairs in canonical index order.
    pub fn canonical(&self, target: Target) -> Vec<(usize, InteractionIndex)> {
        let mut out: Vec<(usize, InteractionIndex)> = Vec::with_capacity(self.len());
        for (ci, cell) in self.cells.iter().enumerate() {
            for (ki, combo) in self.combos.iter().enumerate() {
                out.push((self.position(ci, ki), InteractionIndex::new(target, cell, combo)));
            }
        }
        out.sort_by(|a, b| a.1.cmp(&b.1));
        out
    }

    /// Positions of every coefficient `(P, Q)` for all category choices.
    pub fn block_positions(&self, margin: VarSet, set: VarSet) -> Vec<usize> {
        let mut out = Vec::new();
        for (ci, _) in self.cells.iter().enumerate().filter(|(_, c)| c.margin == margin) {
            for (ki, _) in self.combos.iter().enumerate().filter(|(_, k)| k.set == set) {
                out.push(self.position(ci, ki));
            }
        }
        out
    }
}

/// Row-stochastic table `p(response | condition)`, one row per condition state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ConditionalTable {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "table of {rows}x{cols} given {} entries",
                data.len()
            )));
        }
        Ok(ConditionalTable { rows, cols, data })
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        ConditionalTable {
            rows,
            cols,
            data: vec![1.0 / cols as f64; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Checks strict positivity and that each row sums to one within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for r in 0..self.rows {
            let row = self.row(r);
            if let Some(c) = row.iter().position(|&p| !(p > 0.0)) {
                return Err(Error::ZeroProbability(format!("row {}, column {}", r + 1, c + 1)));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotNormalized { row: r + 1, sum });
            }
        }
        Ok(())
    }
}

/// Dense table of factorial coefficients for one target.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTable {
    pub target: Target,
    layout: Arc<Layout>,
    values: Vec<f64>,
}

impl InteractionTable {
    pub fn zeros(target: Target, layout: Arc<Layout>) -> Self {
        let n = layout.len();
        InteractionTable {
            target,
            layout,
            values: vec![0.0; n],
        }
    }

    pub fn from_values(target: Target, layout: Arc<Layout>, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} interaction values for a layout of {}",
                values.len(),
                layout.len()
            )));
        }
        Ok(InteractionTable {
            target,
            layout,
            values,
        })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    /// Values in storage order (`cell`-major, then combination).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, index: &InteractionIndex) -> Option<f64> {
        if index.target != self.target {
            return None;
        }
        self.layout.index_position(index).map(|p| self.values[p])
    }

    pub fn set(&mut self, index: &InteractionIndex, value: f64) -> Result<()> {
        let pos = self
            .layout
            .index_position(index)
            .filter(|_| index.target == self.target)
            .ok_or_else(|| Error::DimensionMismatch(format!("index not in table: {index:?}")))?;
        self.values[pos] = value;
        Ok(())
    }

    /// Entries in canonical order.
    pub fn entries(&self) -> Vec<(InteractionIndex, f64)> {
        self.layout
            .canonical(self.target)
            .into_iter()
            .map(|(pos, idx)| (idx, self.values[pos]))
            .collect()
    }

    pub fn sup_distance(&self, other: &InteractionTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Options for the iterative inverse map.
#[derive(Debug, Clone, Copy)]
pub struct InverseOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            tolerance: 1e-10,
            max_iterations: 200,
            max_halvings: 20,
        }
    }
}

#[derive(Debug, Clone)]
struct Margin {
    /// Local margin cell of every joint response state.
    projection: Vec<usize>,
    size: usize,
}

#[derive(Debug, Clone)]
struct CellContrast {
    margin: usize,
    /// `(sign, local cell)` pairs of the alternating sum over `K ⊆ P`.
    terms: Vec<(f64, usize)>,
}

/// Precomputed forward and inverse maps for one (response, condition) pair.
#[derive(Debug, Clone)]
pub struct Parameterization {
    target: Target,
    layout: Arc<Layout>,
    margins: Vec<Margin>,
    contrasts: Vec<CellContrast>,
    /// For each condition state, the combinations whose indicator is 1.
    active: Vec<Vec<usize>>,
    /// For each combination, `(sign, condition state)` of its Möbius inversion.
    expansion: Vec<Vec<(f64, usize)>>,
}

impl Parameterization {
    pub fn new(target: Target, response: VariableScheme, condition: VariableScheme) -> Self {
        let layout = Arc::new(Layout::new(response, condition));
        Self::from_layout(target, layout)
    }

    pub fn from_layout(target: Target, layout: Arc<Layout>) -> Self {
        let resp = &layout.response;
        let cond = &layout.condition;
        let mut margin_ids = vec![usize::MAX; 1 << resp.len()];
        let mut margins = Vec::new();
        let mut contrasts = Vec::with_capacity(layout.cells.len());
        for cell in &layout.cells {
            let p = cell.margin;
            if margin_ids[p.bits() as usize] == usize::MAX {
                margin_ids[p.bits() as usize] = margins.len();
                margins.push(Margin {
                    projection: (0..resp.state_count()).map(|x| resp.project(x, p)).collect(),
                    size: resp.margin_size(p),
                });
            }
            let members = p.to_vec();
            let mut terms = Vec::with_capacity(1 << members.len());
            for k in VarSet::full(members.len()).subsets() {
                // local index of (f_K, baseline on P \ K)
                let mut local = 0;
                for (pos, &var) in members.iter().enumerate() {
                    let c = if k.contains(pos) {
                        cell.categories[pos] as usize
                    } else {
                        0
                    };
                    local = local * resp.categories(var) + c;
                }
                let sign = if (members.len() - k.len()) % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((sign, local));
            }
            contrasts.push(CellContrast {
                margin: margin_ids[p.bits() as usize],
                terms,
            });
        }
        let mut active = Vec::with_capacity(cond.state_count());
        let mut cats = Vec::new();
        for e in 0..cond.state_count() {
            cond.decode_into(e, &mut cats);
            let support = cond.support(e);
            let list = layout
                .combos
                .iter()
                .enumerate()
                .filter(|(_, k)| {
                    k.set.is_subset(support)
                        && k.set.iter().zip(&k.categories).all(|(v, &c)| cats[v] == c as usize)
                })
                .map(|(i, _)| i)
                .collect();
            active.push(list);
        }
        let mut expansion = Vec::with_capacity(layout.combos.len());
        for combo in &layout.combos {
            let members = combo.set.to_vec();
            let mut terms = Vec::new();
            for s in VarSet::full(members.len()).subsets() {
                let mut state = vec![0usize; cond.len()];
                for (pos, &var) in members.iter().enumerate() {
                    if s.contains(pos) {
                        state[var] = combo.categories[pos] as usize;
                    }
                }
                let sign = if (members.len() - s.len()) % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((sign, cond.encode(&state)));
            }
            expansion.push(terms);
        }
        Parameterization {
            target,
            layout,
            margins,
            contrasts,
            active,
            expansion,
        }
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn response_states(&self) -> usize {
        self.layout.response.state_count()
    }

    pub fn condition_states(&self) -> usize {
        self.layout.condition.state_count()
    }

    pub fn cell_count(&self) -> usize {
        self.layout.cells.len()
    }

    /// Combinations contributing to the conditioning state `state`.
    pub fn active_combos(&self, state: usize) -> &[usize] {
        &self.active[state]
    }

    fn marginals(&self, p: &[f64]) -> Vec<Vec<f64>> {
        self.margins
            .iter()
            .map(|m| {
                let mut out = vec![0.0; m.size];
                for (x, &px) in p.iter().enumerate() {
                    out[m.projection[x]] += px;
                }
                out
            })
            .collect()
    }

    /// Baseline interactions `eta^P(f_P | e)` of one strictly positive slice.
    pub fn etas(&self, p: &[f64]) -> Result<Vec<f64>> {
        if let Some(x) = p.iter().position(|&v| !(v > 0.0)) {
            let cats: Vec<String> = self
                .layout
                .response
                .decode(x)
                .iter()
                .map(|c| format!("{}", c + 1))
                .collect();
            return Err(Error::ZeroProbability(format!("response cell ({})", cats.join(","))));
        }
        Ok(self.etas_unchecked(p))
    }

    fn etas_unchecked(&self, p: &[f64]) -> Vec<f64> {
        let marg = self.marginals(p);
        self.contrasts
            .iter()
            .map(|c| {
                let m = &marg[c.margin];
                c.terms.iter().map(|&(s, l)| s * m[l].ln()).sum()
            })
            .collect()
    }

    /// `d eta / d log p` for one slice, `cells x |F|`.
    fn jacobian_log(&self, p: &[f64]) -> DMatrix<f64> {
        let marg = self.marginals(p);
        let k = p.len();
        let mut jac = DMatrix::zeros(self.contrasts.len(), k);
        for (ci, c) in self.contrasts.iter().enumerate() {
            let m = &marg[c.margin];
            let mut coef = vec![0.0; m.len()];
            for &(s, l) in &c.terms {
                coef[l] += s / m[l];
            }
            let proj = &self.margins[c.margin].projection;
            for x in 0..k {
                jac[(ci, x)] = coef[proj[x]] * p[x];
            }
        }
        jac
    }

    /// Jacobian of `eta` with respect to the free log-probabilities
    /// (all cells but the baseline cell), a square matrix.
    pub fn free_jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let jac = self.jacobian_log(p);
        jac.columns(1, p.len() - 1).into_owned()
    }

    /// `eta` for every conditioning state: `cells x |E|`, cell-major.
    pub fn eta_table(&self, table: &ConditionalTable) -> Result<Vec<f64>> {
        self.check_table(table)?;
        let n = self.condition_states();
        let mut out = vec![0.0; self.cell_count() * n];
        for e in 0..n {
            let eta = self.etas(table.row(e)).map_err(|err| match err {
                Error::ZeroProbability(s) => {
                    Error::ZeroProbability(format!("{s} given condition state {}", e + 1))
                }
                other => other,
            })?;
            for (c, v) in eta.into_iter().enumerate() {
                out[c * n + e] = v;
            }
        }
        Ok(out)
    }

    fn check_table(&self, table: &ConditionalTable) -> Result<()> {
        if table.rows() != self.condition_states() || table.cols() != self.response_states() {
            return Err(Error::DimensionMismatch(format!(
                "table is {}x{}, parameterization expects {}x{}",
                table.rows(),
                table.cols(),
                self.condition_states(),
                self.response_states()
            )));
        }
        Ok(())
    }

    /// Factorial coefficients from an `eta` table (`cells x |E|`).
    pub fn expand(&self, eta: &[f64]) -> Vec<f64> {
        let n = self.condition_states();
        let nk = self.layout.combos.len();
        let mut out = vec![0.0; self.cell_count() * nk];
        for c in 0..self.cell_count() {
            let row = &eta[c * n..(c + 1) * n];
            for (k, terms) in self.expansion.iter().enumerate() {
                out[c * nk + k] = terms.iter().map(|&(s, e)| s * row[e]).sum();
            }
        }
        out
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn collapse(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.condition_states();
        let nk = self.layout.combos.len();
        let mut out = vec![0.0; self.cell_count() * n];
        for c in 0..self.cell_count() {
            for e in 0..n {
                out[c * n + e] = self.active[e].iter().map(|&k| theta[c * nk + k]).sum();
            }
        }
        out
    }

    /// `eta(. | e)` for a single conditioning state from coefficients.
    pub fn collapse_state(&self, theta: &[f64], e: usize) -> Vec<f64> {
        let nk = self.layout.combos.len();
        (0..self.cell_count())
            .map(|c| self.active[e].iter().map(|&k| theta[c * nk + k]).sum())
            .collect()
    }

    /// Forward map: probabilities to coefficients.
    pub fn interactions(&self, table: &ConditionalTable) -> Result<InteractionTable> {
        let eta = self.eta_table(table)?;
        InteractionTable::from_values(self.target, self.layout.clone(), self.expand(&eta))
    }

    /// Inverse map: coefficients to the unique strictly positive table.
    pub fn distribution(&self, table: &InteractionTable) -> Result<ConditionalTable> {
        self.distribution_with(table.values(), None, InverseOptions::default())
    }

    /// Inverse map from raw coefficient values with an optional warm start.
    pub fn distribution_with(
        &self,
        theta: &[f64],
        warm: Option<&ConditionalTable>,
        options: InverseOptions,
    ) -> Result<ConditionalTable> {
        let n = self.condition_states();
        let k = self.response_states();
        let mut data = Vec::with_capacity(n * k);
        for e in 0..n {
            let eta = self.collapse_state(theta, e);
            let p = self.invert(&eta, warm.map(|w| w.row(e)), options)?;
            data.extend_from_slice(&p);
        }
        ConditionalTable::new(n, k, data)
    }

    /// Solves `etas(p) = target` for one slice by damped Newton iteration on
    /// the free log-probabilities, starting from `warm` or the uniform slice.
    pub fn invert(&self, target: &[f64], warm: Option<&[f64]>, options: InverseOptions) -> Result<Vec<f64>> {
        let k = self.response_states();
        let mut u: Vec<f64> = match warm {
            Some(w) if w.iter().all(|&v| v > 0.0) => {
                let base = w[0].ln();
                w.iter().map(|v| v.ln() - base).collect()
            }
            _ => vec![0.0; k],
        };
        let mut p = softmax(&u);
        let mut resid = residual(target, &self.etas_unchecked(&p));
        let mut norm = l2(&resid);
        let mut sup = sup(&resid);
        if !sup.is_finite() {
            u = vec![0.0; k];
            p = softmax(&u);
            resid = residual(target, &self.etas_unchecked(&p));
            norm = l2(&resid);
            sup = self::sup(&resid);
        }
        let mut iterations = 0;
        while sup >= options.tolerance {
            if iterations == options.max_iterations {
                return Err(Error::NonConvergence {
                    context: "inverse interaction map",
                    iterations,
                    residual: sup,
                });
            }
            iterations += 1;
            let jac = self.free_jacobian(&p);
            let rhs = DVector::from_column_slice(&resid);
            let step = jac
                .lu()
                .solve(&rhs)
                .ok_or(Error::Singular("inverse interaction map"))?;
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..=options.max_halvings {
                let mut trial = u.clone();
                for (i, s) in step.iter().enumerate() {
                    trial[i + 1] += scale * s;
                }
                let tp = softmax(&trial);
                let tr = residual(target, &self.etas_unchecked(&tp));
                let tn = l2(&tr);
                if tn.is_finite() && tn < norm {
                    u = trial;
                    p = tp;
                    sup = self::sup(&tr);
                    resid = tr;
                    norm = tn;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                return Err(Error::NonConvergence {
                    context: "inverse interaction map",
                    iterations,
                    residual: sup,
                });
            }
        }
        let min = p.iter().copied().fold(f64::INFINITY, f64::min);
        if min < PROBABILITY_FLOOR {
            return Err(Error::ProbabilityUnderflow {
                floor: PROBABILITY_FLOOR,
                min,
            });
        }
        Ok(p)
    }
}

fn softmax(u: &[f64]) -> Vec<f64> {
    let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = u.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = p.iter().sum();
    for v in &mut p {
        *v /= s;
    }
    p
}

fn residual(target: &[f64], eta: &[f64]) -> Vec<f64> {
    target.iter().zip(eta).map(|(t, e)| t - e).collect()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// `eta^P(f_P | e)` for every cell of one conditional slice.
pub fn eta_from_distribution(param: &Parameterization, slice: &[f64]) -> Result<Vec<f64>> {
    check_slice(slice)?;
    param.etas(slice)
}

/// `lambda^P(e_P | e')` for one transition row; `param` must be a
/// transition parameterization.
pub fn lambda_from_transition(param: &Parameterization, row: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(param.target(), Target::Transition);
    eta_from_distribution(param, row)
}

fn check_slice(slice: &[f64]) -> Result<()> {
    let sum: f64 = slice.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { row: 1, sum });
    }
    Ok(())
}

/// Dense `eta` table (`cells x |E|`) to factorial coefficients.
pub fn expand_factorial(param: &Parameterization, eta: &[f64]) -> Result<InteractionTable> {
    if eta.len() != param.cell_count() * param.condition_states() {
        return Err(Error::DimensionMismatch("eta table size".into()));
    }
    InteractionTable::from_values(param.target(), param.layout().clone(), param.expand(eta))
}

pub fn collapse_factorial(param: &Parameterization, table: &InteractionTable) -> Vec<f64> {
    param.collapse(table.values())
}

pub fn distribution_from_interactions(
    param: &Parameterization,
    table: &InteractionTable,
) -> Result<ConditionalTable> {
    param.distribution(table)
}
