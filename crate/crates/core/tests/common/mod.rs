//! Random models and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use mhmm_core::graph::{StatementKind, TimeTag};
use mhmm_core::{
    ConditionalTable, GraphBuilder, IndependenceStatement, InteractionTable, MhmmModel, MixedChainGraph, ModelSpec,
    Target, VarSet, VariableScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick<'a, T: ?Sized>(rng: &mut ChaCha8Rng, items: &[&'a T]) -> &'a T {
    items[rng.random_range(0..items.len())]
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Strictly positive rows.
pub fn random_table(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ConditionalTable {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let raw: Vec<f64> = (0..cols).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        data.extend(raw.iter().map(|v| v / s));
    }
    ConditionalTable::new(rows, cols, data).unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng, latent: &[usize], observed: &[usize]) -> MhmmModel {
    let l = VariableScheme::anonymous("E", latent).unwrap();
    let o = VariableScheme::anonymous("F", observed).unwrap();
    let (n, m) = (l.state_count(), o.state_count());
    MhmmModel::new(l, o, random_table(rng, n, n), random_table(rng, n, m)).unwrap()
}

/// Sum over every latent path of the joint probability of path and data.
pub fn path_sum(model: &MhmmModel, joint: &[usize]) -> f64 {
    let n = model.state_count();
    let len = joint.len();
    let mut total = 0.0;
    let mut path = vec![0usize; len];
    loop {
        let mut p = model.initial()[path[0]] * model.emission().get(path[0], joint[0]);
        for t in 1..len {
            p *= model.transition().get(path[t - 1], path[t]) * model.emission().get(path[t], joint[t]);
        }
        total += p;
        let mut pos = len;
        loop {
            if pos == 0 {
                return total;
            }
            pos -= 1;
            path[pos] += 1;
            if path[pos] < n {
                break;
            }
            path[pos] = 0;
        }
    }
}

fn categories(scheme: &VariableScheme) -> Vec<usize> {
    scheme.variables().iter().map(|v| v.categories).collect()
}

/// Mixed-radix digits of `state`, first variable most significant.
fn digits(cards: &[usize], mut state: usize) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for i in (0..cards.len()).rev() {
        out[i] = state % cards[i];
        state /= cards[i];
    }
    out
}

/// Key of the projection of `digits` onto `set`.
fn key(cards: &[usize], digits: &[usize], set: VarSet) -> usize {
    set.iter().fold(0, |acc, i| acc * cards[i] + digits[i])
}

fn size(cards: &[usize], set: VarSet) -> usize {
    set.iter().map(|i| cards[i]).product()
}

/// Margin over `set` of one row of a table over a response with `cards`.
fn margin(cards: &[usize], row: &[f64], set: VarSet) -> Vec<f64> {
    let mut out = vec![0.0; size(cards, set)];
    for (s, p) in row.iter().enumerate() {
        out[key(cards, &digits(cards, s), set)] += p;
    }
    out
}

/// Largest deviation from the statement in the model's tables.
///
/// Statements conditioning on the complement of the right set reduce to
/// "the left margin does not depend on the right set"; the others reduce to
/// factorization of the joint margin row by row.
pub fn statement_violation(model: &MhmmModel, st: &IndependenceStatement) -> f64 {
    let lat = categories(model.latent_scheme());
    let obs = categories(model.observed_scheme());
    let (table, resp) = match st.kind {
        StatementKind::Granger | StatementKind::Contemporaneous => (model.transition(), &lat),
        StatementKind::Local | StatementKind::Emission => (model.emission(), &obs),
    };
    let mut worst = 0.0f64;
    match st.kind {
        StatementKind::Granger | StatementKind::Emission => {
            assert!(st.right.time == TimeTag::Previous || st.kind == StatementKind::Emission);
            let given = st.given.vars;
            assert_eq!(given.union(st.right.vars), VarSet::full(lat.len()));
            for a in 0..table.rows() {
                for b in 0..table.rows() {
                    if key(&lat, &digits(&lat, a), given) == key(&lat, &digits(&lat, b), given) {
                        let ma = margin(resp, table.row(a), st.left.vars);
                        let mb = margin(resp, table.row(b), st.left.vars);
                        worst = worst.max(sup_diff(&ma, &mb));
                    }
                }
            }
        }
        StatementKind::Contemporaneous | StatementKind::Local => {
            let (l, rt) = (st.left.vars, st.right.vars);
            for a in 0..table.rows() {
                let row = table.row(a);
                let joint = margin(resp, row, l.union(rt));
                let ml = margin(resp, row, l);
                let mr = margin(resp, row, rt);
                for s in 0..table.cols() {
                    let d = digits(resp, s);
                    let j = joint[key(resp, &d, l.union(rt))];
                    worst = worst.max((j - ml[key(resp, &d, l)] * mr[key(resp, &d, rt)]).abs());
                }
            }
        }
    }
    worst
}

pub fn random_graph(rng: &mut ChaCha8Rng, n_lat: usize, n_obs: usize, p: f64) -> MixedChainGraph {
    let mut b = GraphBuilder::new(n_lat, n_obs);
    for i in 0..n_lat {
        for j in 0..n_lat {
            if i != j && rng.random_bool(p) {
                b = b.directed(i, j);
            }
            if i < j && rng.random_bool(p) {
                b = b.bidirected_latent(i, j);
            }
        }
        for j in 0..n_obs {
            if rng.random_bool(p) {
                b = b.emit(i, j);
            }
        }
    }
    for i in 0..n_obs {
        for j in i + 1..n_obs {
            if rng.random_bool(p) {
                b = b.bidirected_observed(i, j);
            }
        }
    }
    b.build().unwrap()
}

pub fn random_spec(rng: &mut ChaCha8Rng) -> ModelSpec {
    let lat: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(2..=3)).collect();
    let obs: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(2..=3)).collect();
    let graph = random_graph(rng, lat.len(), obs.len(), 0.4);
    ModelSpec::new(
        graph,
        VariableScheme::anonymous("E", &lat).unwrap(),
        VariableScheme::anonymous("F", &obs).unwrap(),
        &[],
    )
    .unwrap()
}

/// Model from uniform `[-scale, scale]` coefficients with the spec's zeros.
///
/// Coefficient vectors are not variation independent, so draws that match
/// no distribution are rejected and redrawn.
pub fn random_restricted_model(rng: &mut ChaCha8Rng, spec: &ModelSpec, scale: f64) -> MhmmModel {
    for _ in 0..100 {
        let mut draw = |target, layout| {
            let mut t = InteractionTable::zeros(target, layout);
            for v in t.values_mut() {
                *v = rng.random_range(-scale..scale);
            }
            t
        };
        let delta = draw(Target::Transition, spec.transition_parameterization().layout().clone());
        let theta = draw(Target::Emission, spec.emission_parameterization().layout().clone());
        if let Ok(model) = spec.model_from_interactions(&delta, &theta) {
            return model;
        }
    }
    panic!("no compatible coefficients in 100 draws at scale {scale}");
}

fn random_groups(rng: &mut ChaCha8Rng, n: usize) -> Vec<VarSet> {
    let mut groups: Vec<VarSet> = Vec::new();
    for i in 0..n {
        let g = rng.random_range(0..=groups.len());
        if g == groups.len() {
            groups.push(VarSet::singleton(i));
        } else {
            groups[g].insert(i);
        }
    }
    groups
}

fn random_superset(rng: &mut ChaCha8Rng, base: VarSet, n: usize) -> VarSet {
    let mut s = base;
    for i in 0..n {
        if rng.random_bool(0.4) {
            s.insert(i);
        }
    }
    s
}

/// A graph whose bi-directed edges form cliques sharing a parent set, and
/// tables built as products of one factor per clique. Every independence
/// of the graph holds by construction.
pub fn product_model(rng: &mut ChaCha8Rng) -> (ModelSpec, MhmmModel) {
    let lat: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(2..=3)).collect();
    let obs: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| rng.random_range(2..=3)).collect();
    let lat_groups: Vec<(VarSet, VarSet)> = random_groups(rng, lat.len())
        .into_iter()
        .map(|g| (g, random_superset(rng, g, lat.len())))
        .collect();
    let obs_groups: Vec<(VarSet, VarSet)> = random_groups(rng, obs.len())
        .into_iter()
        .map(|g| (g, random_superset(rng, VarSet::EMPTY, lat.len())))
        .collect();
    let mut b = GraphBuilder::new(lat.len(), obs.len());
    for &(g, pa) in &lat_groups {
        for i in g.iter() {
            for j in g.iter().filter(|&j| j > i) {
                b = b.bidirected_latent(i, j);
            }
            for p in pa.iter().filter(|&p| p != i) {
                b = b.directed(p, i);
            }
        }
    }
    for &(g, pa) in &obs_groups {
        for i in g.iter() {
            for j in g.iter().filter(|&j| j > i) {
                b = b.bidirected_observed(i, j);
            }
            for p in pa.iter() {
                b = b.emit(p, i);
            }
        }
    }
    let graph = b.build().unwrap();
    let ls = VariableScheme::anonymous("E", &lat).unwrap();
    let os = VariableScheme::anonymous("F", &obs).unwrap();
    let n = ls.state_count();
    let product = |rng: &mut ChaCha8Rng, groups: &[(VarSet, VarSet)], resp: &[usize]| {
        let factors: Vec<ConditionalTable> = groups
            .iter()
            .map(|&(g, pa)| random_table(rng, size(&lat, pa), size(resp, g)))
            .collect();
        let cols: usize = resp.iter().product();
        let mut data = Vec::with_capacity(n * cols);
        for a in 0..n {
            let da = digits(&lat, a);
            for s in 0..cols {
                let ds = digits(resp, s);
                let p: f64 = groups
                    .iter()
                    .zip(&factors)
                    .map(|(&(g, pa), f)| f.get(key(&lat, &da, pa), key(resp, &ds, g)))
                    .product();
                data.push(p);
            }
        }
        ConditionalTable::new(n, cols, data).unwrap()
    };
    let transition = product(rng, &lat_groups, &lat);
    let emission = product(rng, &obs_groups, &obs);
    let model = MhmmModel::new(ls.clone(), os.clone(), transition, emission).unwrap();
    (ModelSpec::new(graph, ls, os, &[]).unwrap(), model)
}

/// A random graph with a latent set `T` closed under parents and an
/// observable set `R` whose emission parents lie in `T`.
pub fn preserving_spec(rng: &mut ChaCha8Rng) -> (ModelSpec, VarSet, VarSet) {
    let lat: Vec<usize> = (0..3).map(|_| rng.random_range(2..=3)).collect();
    let obs: Vec<usize> = (0..rng.random_range(2..=3)).map(|_| 2).collect();
    let t = loop {
        let t = VarSet::from_bits(rng.random_range(1..(1u32 << lat.len()) - 1));
        if !t.is_empty() {
            break t;
        }
    };
    let rset = loop {
        let r = VarSet::from_bits(rng.random_range(1..1u32 << obs.len()));
        if !r.is_empty() {
            break r;
        }
    };
    let mut b = GraphBuilder::new(lat.len(), obs.len());
    for i in 0..lat.len() {
        for j in 0..lat.len() {
            if i != j && rng.random_bool(0.5) && (!t.contains(j) || t.contains(i)) {
                b = b.directed(i, j);
            }
            if i < j && rng.random_bool(0.5) {
                b = b.bidirected_latent(i, j);
            }
        }
        for j in 0..obs.len() {
            if rng.random_bool(0.6) && (!rset.contains(j) || t.contains(i)) {
                b = b.emit(i, j);
            }
        }
    }
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            if rng.random_bool(0.5) {
                b = b.bidirected_observed(i, j);
            }
        }
    }
    let spec = ModelSpec::new(
        b.build().unwrap(),
        VariableScheme::anonymous("E", &lat).unwrap(),
        VariableScheme::anonymous("F", &obs).unwrap(),
        &[],
    )
    .unwrap();
    (spec, t, rset)
}

/// Sup distance between the exact law of `(E_T, F_R)` over three steps and
/// the law of the hidden Markov model built from the invariant-law
/// averages of the margins.
pub fn marginal_gap(model: &MhmmModel, t: VarSet, r: VarSet) -> f64 {
    let lat = categories(model.latent_scheme());
    let obs = categories(model.observed_scheme());
    let n = model.state_count();
    let m = model.observed_scheme().state_count();
    let (nt, nr) = (size(&lat, t), size(&obs, r));
    let pi = model.initial();
    let lt: Vec<usize> = (0..n).map(|a| key(&lat, &digits(&lat, a), t)).collect();
    let or: Vec<usize> = (0..m).map(|f| key(&obs, &digits(&obs, f), r)).collect();
    // emission of F_R given the full state
    let mut br = vec![0.0; n * nr];
    for a in 0..n {
        for f in 0..m {
            br[a * nr + or[f]] += model.emission().get(a, f);
        }
    }
    let mut exact = vec![0.0; (nt * nr).pow(3)];
    for e1 in 0..n {
        for e2 in 0..n {
            for e3 in 0..n {
                let w = pi[e1] * model.transition().get(e1, e2) * model.transition().get(e2, e3);
                for y1 in 0..nr {
                    for y2 in 0..nr {
                        for y3 in 0..nr {
                            let p = w * br[e1 * nr + y1] * br[e2 * nr + y2] * br[e3 * nr + y3];
                            let c1 = lt[e1] * nr + y1;
                            let c2 = lt[e2] * nr + y2;
                            let c3 = lt[e3] * nr + y3;
                            exact[(c1 * nt * nr + c2) * nt * nr + c3] += p;
                        }
                    }
                }
            }
        }
    }
    let mut pit = vec![0.0; nt];
    let mut at = vec![0.0; nt * nt];
    let mut bt = vec![0.0; nt * nr];
    for a in 0..n {
        pit[lt[a]] += pi[a];
        for b in 0..n {
            at[lt[a] * nt + lt[b]] += pi[a] * model.transition().get(a, b);
        }
        for y in 0..nr {
            bt[lt[a] * nr + y] += pi[a] * br[a * nr + y];
        }
    }
    for x in 0..nt {
        for v in &mut at[x * nt..(x + 1) * nt] {
            *v /= pit[x];
        }
        for v in &mut bt[x * nr..(x + 1) * nr] {
            *v /= pit[x];
        }
    }
    let mut worst = 0.0f64;
    for c1 in 0..nt * nr {
        for c2 in 0..nt * nr {
            for c3 in 0..nt * nr {
                let (x1, y1) = (c1 / nr, c1 % nr);
                let (x2, y2) = (c2 / nr, c2 % nr);
                let (x3, y3) = (c3 / nr, c3 % nr);
                let p = pit[x1] * bt[x1 * nr + y1] * at[x1 * nt + x2] * bt[x2 * nr + y2] * at[x2 * nt + x3] * bt[x3 * nr + y3];
                worst = worst.max((p - exact[(c1 * nt * nr + c2) * nt * nr + c3]).abs());
            }
        }
    }
    worst
}

/// Saturated and no-Granger specs over two binary latents and two binary
/// observables.
pub fn em_specs() -> (ModelSpec, ModelSpec) {
    let lat = VariableScheme::anonymous("E", &[2, 2]).unwrap();
    let obs = VariableScheme::anonymous("F", &[2, 2]).unwrap();
    let base = || {
        MixedChainGraph::builder(2, 2)
            .complete_bidirected_latent()
            .complete_emit()
            .complete_bidirected_observed()
    };
    let sat = ModelSpec::new(base().complete_directed().build().unwrap(), lat.clone(), obs.clone(), &[]).unwrap();
    let nog = ModelSpec::new(base().build().unwrap(), lat, obs, &[]).unwrap();
    (sat, nog)
}

/// Persistent latent chains (self effects `pers`) and informative
/// emissions (own-state effects `sep`), with mild pairwise associations.
pub fn structured_model(spec: &ModelSpec, pers: f64, sep: f64) -> MhmmModel {
    let fill = |target, layout, own: f64, pair: f64| {
        let mut t = InteractionTable::zeros(target, layout);
        for (idx, _) in t.entries() {
            let (p, q) = (idx.response, idx.condition);
            let v = if p.len() == 1 && q.to_vec() == p.to_vec() {
                own
            } else if p.len() == 1 && q.is_empty() {
                -own / 2.0
            } else if p.len() == 2 && q.is_empty() {
                pair
            } else {
                0.0
            };
            t.set(&idx, v).unwrap();
        }
        t
    };
    let delta = fill(Target::Transition, spec.transition_parameterization().layout().clone(), pers, 0.8);
    let theta = fill(Target::Emission, spec.emission_parameterization().layout().clone(), sep, 0.5);
    spec.model_from_interactions(&delta, &theta).unwrap()
}

/// `f(0..n)` spread over the available cores, results in index order.
pub fn parallel_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(n.max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<T>>> = (0..n).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let v = f(i);
                *slots[i].lock().unwrap() = Some(v);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}
