//! Constrained maximum likelihood by EM.
//!
//! The M-step works directly on the free interaction coordinates: every
//! hypothesis is a coordinate zero restriction, so the free coordinates form
//! an unconstrained chart. Each table is maximized by Fisher scoring with step
//! halving, falling back to gradient ascent after repeated scoring failures.
//!
//! The initial law is the invariant law of the current transition table. Its
//! dependence on the transition parameters is not differentiated in the
//! M-step; monotonicity of the likelihood is instead enforced by
//! backtracking each EM update towards the previous parameters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use alloc::sync::Arc;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{
    additivity_constraints, graph_constraints, invariant_association_constraints, user_zero_constraints,
    ConstraintSet, Schemes,
};
use crate::error::{Error, Result};
use crate::graph::MixedChainGraph;
use crate::model::{ExpectedCounts, MhmmModel, ObservedSeries};
use crate::param::{ConditionalTable, InteractionTable, InverseOptions, Parameterization, Target, PROBABILITY_FLOOR};
use crate::scheme::VariableScheme;
use crate::varset::VarSet;

/// Non-graph hypotheses that add zero restrictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hypothesis {
    Additivity(Target),
    InvariantAssociation(Target),
    /// Zeroes the whole block `(P, Q)` of one table.
    UserZero {
        target: Target,
        response: VarSet,
        condition: VarSet,
    },
}

/// A graph plus hypotheses, compiled into a constraint set.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    graph: MixedChainGraph,
    schemes: Schemes,
    constraints: ConstraintSet,
    transition: Parameterization,
    emission: Parameterization,
}

impl ModelSpec {
    pub fn new(
        graph: MixedChainGraph,
        latent: VariableScheme,
        observed: VariableScheme,
        hypotheses: &[Hypothesis],
    ) -> Result<Self> {
        if graph.n_latent() != latent.len() || graph.n_observed() != observed.len() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {}/{} latent/observable nodes, schemes have {}/{}",
                graph.n_latent(),
                graph.n_observed(),
                latent.len(),
                observed.len()
            )));
        }
        let schemes = Schemes::new(latent.clone(), observed.clone());
        let mut constraints = graph_constraints(&graph, &schemes);
        for h in hypotheses {
            let extra = match *h {
                Hypothesis::Additivity(t) => additivity_constraints(&schemes, t),
                Hypothesis::InvariantAssociation(t) => invariant_association_constraints(&schemes, t),
                Hypothesis::UserZero {
                    target,
                    response,
                    condition,
                } => {
                    let (resp, cond) = match target {
                        Target::Transition => (&latent, &latent),
                        Target::Emission => (&observed, &latent),
                    };
                    if response.is_empty() || !response.is_subset(resp.all()) || !condition.is_subset(cond.all()) {
                        return Err(Error::DimensionMismatch("user restriction outside the schemes".into()));
                    }
                    user_zero_constraints(&schemes, target, response, condition)
                }
            };
            constraints.merge(&extra);
        }
        let transition = Parameterization::from_layout(Target::Transition, Arc::new(schemes.transition.clone()));
        let emission = Parameterization::from_layout(Target::Emission, Arc::new(schemes.emission.clone()));
        Ok(ModelSpec {
            graph,
            schemes,
            constraints,
            transition,
            emission,
        })
    }

    pub fn graph(&self) -> &MixedChainGraph {
        &self.graph
    }

    pub fn schemes(&self) -> &Schemes {
        &self.schemes
    }

    pub fn latent(&self) -> &VariableScheme {
        &self.schemes.latent
    }

    pub fn observed(&self) -> &VariableScheme {
        &self.schemes.observed
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn transition_parameterization(&self) -> &Parameterization {
        &self.transition
    }

    pub fn emission_parameterization(&self) -> &Parameterization {
        &self.emission
    }

    pub fn free_parameters(&self) -> usize {
        crate::constraints::count_free_parameters(&self.schemes, &self.constraints)
    }

    fn param(&self, target: Target) -> &Parameterization {
        match target {
            Target::Transition => &self.transition,
            Target::Emission => &self.emission,
        }
    }

    fn mask(&self, target: Target) -> Vec<bool> {
        self.constraints.zero_mask(self.schemes.layout(target), target)
    }

    /// Builds a model from coefficient tables, zeroing restricted coordinates.
    pub fn model_from_interactions(&self, delta: &InteractionTable, theta: &InteractionTable) -> Result<MhmmModel> {
        let mut d = delta.values().to_vec();
        let mut t = theta.values().to_vec();
        apply_mask(&mut d, &self.mask(Target::Transition));
        apply_mask(&mut t, &self.mask(Target::Emission));
        let tr = self.transition.distribution_with(&d, None, InverseOptions::default())?;
        let em = self.emission.distribution_with(&t, None, InverseOptions::default())?;
        MhmmModel::new(self.latent().clone(), self.observed().clone(), tr, em)
    }
}

fn apply_mask(values: &mut [f64], mask: &[bool]) {
    for (v, &z) in values.iter_mut().zip(mask) {
        if z {
            *v = 0.0;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Relative log-likelihood change below which EM stops.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: 10,
            seed: 0,
            max_iter: 500,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub model: MhmmModel,
    /// `delta` coefficients of the transition table.
    pub transition_interactions: InteractionTable,
    /// `theta` coefficients of the emission table.
    pub emission_interactions: InteractionTable,
    pub constraints: ConstraintSet,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub em_trace: Vec<f64>,
    pub free_parameters: usize,
    pub data_fingerprint: u64,
    /// Index of the restart that produced this fit.
    pub restart: usize,
}

/// Settings of the per-table maximization.
#[derive(Debug, Clone, Copy)]
pub struct MStepOptions {
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Consecutive scoring failures before switching to gradient ascent.
    pub scoring_failures: usize,
}

impl Default for MStepOptions {
    fn default() -> Self {
        MStepOptions {
            gradient_tolerance: 1e-7,
            max_iterations: 100,
            max_halvings: 20,
            scoring_failures: 3,
        }
    }
}

const INNER_INVERSE: InverseOptions = InverseOptions {
    tolerance: 1e-12,
    max_iterations: 200,
    max_halvings: 20,
};

/// Outcome of maximizing one table.
#[derive(Debug, Clone)]
pub struct TableFit {
    pub interactions: InteractionTable,
    pub table: ConditionalTable,
    pub objective: f64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn objective(counts: &[f64], table: &ConditionalTable) -> f64 {
    counts
        .iter()
        .zip(table.as_slice())
        .map(|(&n, &p)| if n > 0.0 { n * p.ln() } else { 0.0 })
        .sum()
}

/// Row-normalized counts with the probability floor applied.
fn closed_form(counts: &[f64], rows: usize, cols: usize) -> Result<ConditionalTable> {
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let row = &counts[r * cols..(r + 1) * cols];
        let total: f64 = row.iter().sum();
        let mut p: Vec<f64> = if total > 0.0 {
            row.iter().map(|&n| (n / total).max(PROBABILITY_FLOOR)).collect()
        } else {
            vec![1.0 / cols as f64; cols]
        };
        let s: f64 = p.iter().sum();
        for v in &mut p {
            *v /= s;
        }
        data.extend(p);
    }
    ConditionalTable::new(rows, cols, data)
}

/// Score and expected information of the expected log-likelihood in the
/// coefficient coordinates, restricted to `free` positions.
fn score_and_information(
    param: &Parameterization,
    counts: &[f64],
    table: &ConditionalTable,
    free_of: &[Option<usize>],
    n_free: usize,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let k = param.response_states();
    let cells = param.cell_count();
    let ncombo = param.layout().combos.len();
    let mut score = DVector::zeros(n_free);
    let mut info = DMatrix::zeros(n_free, n_free);
    for e in 0..param.condition_states() {
        let p = table.row(e);
        let n = &counts[e * k..(e + 1) * k];
        let total: f64 = n.iter().sum();
        let jac = param.free_jacobian(p);
        let inv = jac.try_inverse().ok_or(Error::Singular("interaction jacobian"))?;
        let g_u = DVector::from_iterator(k - 1, (1..k).map(|y| n[y] - total * p[y]));
        let mut i_u = DMatrix::zeros(k - 1, k - 1);
        for a in 0..k - 1 {
            for b in 0..k - 1 {
                let d = if a == b { p[a + 1] } else { 0.0 };
                i_u[(a, b)] = total * (d - p[a + 1] * p[b + 1]);
            }
        }
        let g_eta = inv.transpose() * g_u;
        let i_eta = inv.transpose() * i_u * &inv;
        let active = param.active_combos(e);
        for c1 in 0..cells {
            for &k1 in active {
                let Some(a) = free_of[c1 * ncombo + k1] else { continue };
                score[a] += g_eta[c1];
                for c2 in 0..cells {
                    for &k2 in active {
                        if let Some(b) = free_of[c2 * ncombo + k2] {
                            info[(a, b)] += i_eta[(c1, c2)];
                        }
                    }
                }
            }
        }
    }
    Ok((score, info))
}

fn solve_spd(info: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = info.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    let n = info.nrows();
    let scale = (0..n).map(|i| info[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let ridged = info + DMatrix::identity(n, n) * (1e-10 * scale);
    ridged.cholesky().map(|ch| ch.solve(rhs))
}

/// Maximizes `sum counts * log p` over one table, holding zeroed coordinates
/// at 0. `start` must be feasible (its inverse map must exist).
pub fn maximize_table(
    param: &Parameterization,
    counts: &[f64],
    zero_mask: &[bool],
    start: &[f64],
    warm: Option<&ConditionalTable>,
    options: MStepOptions,
) -> Result<TableFit> {
    let rows = param.condition_states();
    let cols = param.response_states();
    if counts.len() != rows * cols || zero_mask.len() != param.layout().len() || start.len() != zero_mask.len() {
        return Err(Error::DimensionMismatch("m-step inputs".into()));
    }
    if counts.iter().any(|&c| !(c >= 0.0)) {
        return Err(Error::DimensionMismatch("counts must be nonnegative".into()));
    }
    if !zero_mask.iter().any(|&z| z) {
        let table = closed_form(counts, rows, cols)?;
        let interactions = param.interactions(&table)?;
        return Ok(TableFit {
            objective: objective(counts, &table),
            interactions,
            table,
            gradient_norm: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let mut free_of = vec![None; zero_mask.len()];
    let mut free = Vec::new();
    for (pos, &z) in zero_mask.iter().enumerate() {
        if !z {
            free_of[pos] = Some(free.len());
            free.push(pos);
        }
    }
    let mut theta = start.to_vec();
    apply_mask(&mut theta, zero_mask);
    let mut table = param.distribution_with(&theta, warm, INNER_INVERSE)?;
    let mut obj = objective(counts, &table);
    let mut failures = 0;
    let mut gradient_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        let (score, info) = score_and_information(param, counts, &table, &free_of, free.len())?;
        gradient_norm = score.norm();
        if gradient_norm < options.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let scoring = failures < options.scoring_failures;
        let (direction, mut step) = match (scoring, solve_spd(&info, &score)) {
            (true, Some(d)) => (d, 1.0),
            _ => {
                let diag = (0..info.nrows()).map(|i| info[(i, i)]).fold(1.0, f64::max);
                (score.clone(), 1.0 / diag)
            }
        };
        // The inverse map is exact only to its tolerance, so near the optimum
        // the objective carries noise of about this size.
        let slack = if scoring { 1e-12 * (1.0 + obj.abs()) } else { 0.0 };
        let mut accepted = false;
        for _ in 0..=options.max_halvings {
            let mut trial = theta.clone();
            for (a, &pos) in free.iter().enumerate() {
                trial[pos] += step * direction[a];
            }
            if let Ok(t) = param.distribution_with(&trial, Some(&table), INNER_INVERSE) {
                let o = objective(counts, &t);
                if o.is_finite() && o >= obj - slack {
                    theta = trial;
                    table = t;
                    obj = o;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if accepted {
            if scoring {
                failures = 0;
            }
        } else if scoring {
            failures += 1;
        } else {
            break;
        }
    }
    let interactions = InteractionTable::from_values(param.target(), param.layout().clone(), theta)?;
    Ok(TableFit {
        interactions,
        table,
        objective: obj,
        gradient_norm,
        converged,
        iterations,
    })
}

/// Result of a full M-step on both tables.
#[derive(Debug, Clone)]
pub struct MStep {
    pub transition: ConditionalTable,
    pub emission: ConditionalTable,
    pub delta: InteractionTable,
    pub theta: InteractionTable,
}

/// Maximizes the expected complete-data log-likelihood (initial term
/// excluded) over tables satisfying the spec's zero restrictions, starting
/// from uniform tables.
pub fn constrained_m_step(spec: &ModelSpec, counts: &ExpectedCounts) -> Result<MStep> {
    let options = MStepOptions::default();
    let mut fits = Vec::with_capacity(2);
    for (target, c) in [(Target::Transition, &counts.transition), (Target::Emission, &counts.emission)] {
        let param = spec.param(target);
        let start = vec![0.0; param.layout().len()];
        let fit = maximize_table(param, c, &spec.mask(target), &start, None, options)?;
        if !fit.converged {
            return Err(Error::LineSearch {
                halvings: options.max_halvings,
                gradient_norm: fit.gradient_norm,
                objective: fit.objective,
            });
        }
        fits.push(fit);
    }
    let em = fits.pop().expect("two fits");
    let tr = fits.pop().expect("two fits");
    Ok(MStep {
        transition: tr.table,
        emission: em.table,
        delta: tr.interactions,
        theta: em.interactions,
    })
}

struct State {
    delta: Vec<f64>,
    theta: Vec<f64>,
    model: MhmmModel,
    loglik: f64,
}

/// Fits the spec by EM from `options.restarts` random starts and keeps the
/// best final likelihood.
pub fn em_fit(spec: &ModelSpec, series: &ObservedSeries, options: &FitOptions) -> Result<FitResult> {
    if series.scheme() != spec.observed() {
        return Err(Error::DimensionMismatch("series scheme differs from the spec".into()));
    }
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for r in 0..options.restarts.max(1) {
        match fit_restart(spec, series, options, r) {
            Ok(fit) => {
                if best.as_ref().is_none_or(|b| fit.log_likelihood > b.log_likelihood) {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.expect("at least one restart ran"))
}

fn random_start(spec: &ModelSpec, rng: &mut ChaCha8Rng, target: Target) -> Result<(Vec<f64>, ConditionalTable)> {
    let param = spec.param(target);
    let mask = spec.mask(target);
    let mut last = None;
    for _ in 0..20 {
        let values: Vec<f64> = mask
            .iter()
            .map(|&z| if z { 0.0 } else { rng.random::<f64>() - 0.5 })
            .collect();
        match param.distribution_with(&values, None, INNER_INVERSE) {
            Ok(t) => return Ok((values, t)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("attempted"))
}

/// One EM run. Deterministic given `(options.seed, restart)`.
pub fn fit_restart(spec: &ModelSpec, series: &ObservedSeries, options: &FitOptions, restart: usize) -> Result<FitResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(restart as u64);
    let (delta, tr) = random_start(spec, &mut rng, Target::Transition)?;
    let (theta, em) = random_start(spec, &mut rng, Target::Emission)?;
    let model = MhmmModel::new(spec.latent().clone(), spec.observed().clone(), tr, em)?;
    let loglik = model.log_likelihood(series)?;
    let mut state = State {
        delta,
        theta,
        model,
        loglik,
    };
    let t_mask = spec.mask(Target::Transition);
    let e_mask = spec.mask(Target::Emission);
    let mut trace = vec![loglik];
    let mut converged = false;
    let mut iterations = 0;
    let m_options = MStepOptions::default();
    while iterations < options.max_iter {
        iterations += 1;
        let counts = state.model.expected_counts(series)?;
        let tr_fit = maximize_table(
            &spec.transition,
            &counts.transition,
            &t_mask,
            &state.delta,
            Some(state.model.transition()),
            m_options,
        );
        let em_fit = maximize_table(
            &spec.emission,
            &counts.emission,
            &e_mask,
            &state.theta,
            Some(state.model.emission()),
            m_options,
        );
        let (new_delta, new_tr) = match tr_fit {
            Ok(f) => (f.interactions.values().to_vec(), f.table),
            Err(_) => (state.delta.clone(), state.model.transition().clone()),
        };
        let (new_theta, new_em) = match em_fit {
            Ok(f) => (f.interactions.values().to_vec(), f.table),
            Err(_) => (state.theta.clone(), state.model.emission().clone()),
        };
        let improved = accept_update(spec, series, &state, new_delta, new_tr, new_theta, new_em);
        match improved {
            Some(next) => {
                let gain = next.loglik - state.loglik;
                state = next;
                trace.push(state.loglik);
                if gain <= options.tol * state.loglik.abs() {
                    converged = true;
                    break;
                }
            }
            None => {
                converged = true;
                break;
            }
        }
    }
    let mut fit = FitResult {
        transition_interactions: InteractionTable::from_values(
            Target::Transition,
            spec.transition.layout().clone(),
            state.delta,
        )?,
        emission_interactions: InteractionTable::from_values(Target::Emission, spec.emission.layout().clone(), state.theta)?,
        model: state.model,
        constraints: spec.constraints.clone(),
        log_likelihood: state.loglik,
        iterations,
        converged,
        em_trace: trace,
        free_parameters: spec.free_parameters(),
        data_fingerprint: series.fingerprint(),
        restart,
    };
    canonicalize_labels(spec, &mut fit);
    Ok(fit)
}

/// Accepts the M-step proposal if it does not lower the likelihood, otherwise
/// backtracks along the segment from the current coefficients.
fn accept_update(
    spec: &ModelSpec,
    series: &ObservedSeries,
    state: &State,
    delta: Vec<f64>,
    tr: ConditionalTable,
    theta: Vec<f64>,
    em: ConditionalTable,
) -> Option<State> {
    let try_tables = |delta: Vec<f64>, theta: Vec<f64>, tr: ConditionalTable, em: ConditionalTable| -> Option<State> {
        let model = MhmmModel::new(spec.latent().clone(), spec.observed().clone(), tr, em).ok()?;
        let loglik = model.log_likelihood(series).ok()?;
        (loglik.is_finite() && loglik >= state.loglik).then_some(State {
            delta,
            theta,
            model,
            loglik,
        })
    };
    if let Some(s) = try_tables(delta.clone(), theta.clone(), tr, em) {
        return Some(s);
    }
    let mut alpha = 0.5;
    for _ in 0..10 {
        let d: Vec<f64> = state.delta.iter().zip(&delta).map(|(a, b)| a + alpha * (b - a)).collect();
        let t: Vec<f64> = state.theta.iter().zip(&theta).map(|(a, b)| a + alpha * (b - a)).collect();
        let tables = spec
            .transition
            .distribution_with(&d, Some(state.model.transition()), INNER_INVERSE)
            .and_then(|tr| {
                spec.emission
                    .distribution_with(&t, Some(state.model.emission()), INNER_INVERSE)
                    .map(|em| (tr, em))
            });
        if let Ok((tr, em)) = tables {
            if let Some(s) = try_tables(d, t, tr, em) {
                return Some(s);
            }
        }
        alpha *= 0.5;
    }
    None
}

/// Relabels the states of each latent variable so that, under the invariant
/// law, the probability of the first category of the first observable
/// variable is non-increasing in the state index (ties broken by the next
/// observable variable). The relabelling is skipped when it would move a
/// restricted coefficient away from zero.
pub fn canonicalize_labels(spec: &ModelSpec, fit: &mut FitResult) {
    let latent = spec.latent();
    let observed = spec.observed();
    let model = &fit.model;
    let n = latent.state_count();
    let m = observed.state_count();
    let pi = model.initial();
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(latent.len());
    for i in 0..latent.len() {
        let k = latent.categories(i);
        // scores[s][j] = P(F_j = baseline | E_i = s)
        let mut scores = vec![vec![0.0; observed.len()]; k];
        let mut mass = vec![0.0; k];
        for e in 0..n {
            let s = latent.category_of(e, i);
            mass[s] += pi[e];
            for f in 0..m {
                let w = pi[e] * model.emission().get(e, f);
                for (j, sc) in scores[s].iter_mut().enumerate() {
                    if observed.category_of(f, j) == 0 {
                        *sc += w;
                    }
                }
            }
        }
        for s in 0..k {
            if mass[s] > 0.0 {
                for v in &mut scores[s] {
                    *v /= mass[s];
                }
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            for j in 0..observed.len() {
                match scores[b][j].partial_cmp(&scores[a][j]) {
                    Some(core::cmp::Ordering::Equal) | None => continue,
                    Some(o) => return o,
                }
            }
            a.cmp(&b)
        });
        // order[new] = old; invert to old -> new
        let mut perm = vec![0; k];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        perms.push(perm);
    }
    if perms.iter().all(|p| p.iter().enumerate().all(|(a, &b)| a == b)) {
        return;
    }
    let map: Vec<usize> = (0..n)
        .map(|e| {
            let cats: Vec<usize> = latent.decode(e).iter().enumerate().map(|(i, &c)| perms[i][c]).collect();
            latent.encode(&cats)
        })
        .collect();
    let mut tr = vec![0.0; n * n];
    let mut em = vec![0.0; n * m];
    let mut init = vec![0.0; n];
    for e in 0..n {
        init[map[e]] = pi[e];
        for e2 in 0..n {
            tr[map[e] * n + map[e2]] = model.transition().get(e, e2);
        }
        for f in 0..m {
            em[map[e] * m + f] = model.emission().get(e, f);
        }
    }
    let relabelled = (|| -> Result<(MhmmModel, InteractionTable, InteractionTable)> {
        let tr = ConditionalTable::new(n, n, tr)?;
        let em = ConditionalTable::new(n, m, em)?;
        let mut delta = spec.transition.interactions(&tr)?;
        let mut theta = spec.emission.interactions(&em)?;
        for (table, target) in [(&mut delta, Target::Transition), (&mut theta, Target::Emission)] {
            let mask = spec.mask(target);
            for (v, &z) in table.values_mut().iter_mut().zip(&mask) {
                if z {
                    if v.abs() > 1e-8 {
                        return Err(Error::DimensionMismatch("relabelling breaks a restriction".into()));
                    }
                    *v = 0.0;
                }
            }
        }
        let model = MhmmModel::with_initial(latent.clone(), observed.clone(), tr, em, init)?;
        Ok((model, delta, theta))
    })();
    if let Ok((model, delta, theta)) = relabelled {
        fit.model = model;
        fit.transition_interactions = delta;
        fit.emission_interactions = theta;
    }
}
