//! Acceptance checks. Each criterion prints one PASS/FAIL line with its
//! measured values; the test fails if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mhmm_core::fit::fit_restart;
use mhmm_core::selection::{aic_value, chi_square_quantile, lrt};
use mhmm_core::{
    em_fit, FitOptions, FitResult, GraphBuilder, ModelSpec, ObservedSeries, Parameterization, Target,
    VarSet, VariableScheme,
};
use rand::Rng;

const PAR_BUDGET: Duration = Duration::from_secs(1);
const LIKELIHOOD_TOL: f64 = 1e-10;
const LIKELIHOOD_BUDGET: Duration = Duration::from_secs(10);
const ROUND_TRIP_TOL: f64 = 1e-9;
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(30);
const INDEPENDENCE_TOL: f64 = 1e-8;
const INDEPENDENCE_BUDGET: Duration = Duration::from_secs(60);
const MARGINAL_TOL: f64 = 1e-9;
const MARGINAL_BUDGET: Duration = Duration::from_secs(30);
const TRACE_TOL: f64 = 1e-8;
const EM_BUDGET: Duration = Duration::from_secs(300);
const AIC_TOL: f64 = 0.01;

struct Report {
    failures: Vec<&'static str>,
}

impl Report {
    fn line(&mut self, name: &'static str, ok: bool, detail: String) {
        // Written straight to the stream so the lines survive output capture.
        let _ = writeln!(
            std::io::stderr(),
            "{} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(name);
        }
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mhmm"))
}

fn specs_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn free_count(spec: &std::path::Path) -> usize {
    let out = bin().args(["count-params", "--spec"]).arg(spec).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix("free "))
        .and_then(|v| v.parse().ok())
        .expect("free line")
}

fn parameter_counts(r: &mut Report) {
    let expected_par = [112, 109, 96, 92, 89, 36, 32, 29, 24, 20, 17];
    let expected_df = [4, 7, 20, 24, 27, 80, 84, 87, 92, 96, 99];
    let dir = specs_dir().join("soft_drink");
    let start = Instant::now();
    let total = free_count(&dir.join("00_saturated.spec"));
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.file_name().unwrap().to_string_lossy().starts_with("00"))
        .collect();
    files.sort();
    let par: Vec<usize> = files.iter().map(|f| free_count(f)).collect();
    let elapsed = start.elapsed();
    let df: Vec<usize> = par.iter().map(|p| total - p).collect();
    let ok = total == 116 && par == expected_par && df == expected_df && elapsed < PAR_BUDGET;
    r.line(
        "parameter counts",
        ok,
        format!("par {par:?}, df {df:?}, {:.3} s (budget {} s)", elapsed.as_secs_f64(), PAR_BUDGET.as_secs()),
    );
}

fn likelihood_oracle(r: &mut Report) {
    let mut rng = rng(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let lat = pick(&mut rng, &[&[2][..], &[3], &[4], &[2, 2]]);
        let obs: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(2..=3)).collect();
        let model = random_model(&mut rng, lat, &obs);
        let len = rng.random_range(1..=6);
        let m = model.observed_scheme().state_count();
        let joint: Vec<usize> = (0..len).map(|_| rng.random_range(0..m)).collect();
        let series = ObservedSeries::from_joint(model.observed_scheme().clone(), joint.clone()).unwrap();
        let forward = model.log_likelihood(&series).unwrap();
        let exact = path_sum(&model, &joint).ln();
        worst = worst.max((forward - exact).abs());
    }
    let elapsed = start.elapsed();
    r.line(
        "likelihood oracle",
        worst <= LIKELIHOOD_TOL && elapsed < LIKELIHOOD_BUDGET,
        format!("100 models, max |forward - path sum| {worst:.2e} (tol {LIKELIHOOD_TOL:e}), {:.2} s", elapsed.as_secs_f64()),
    );
}

fn round_trip(r: &mut Report) {
    let mut rng = rng(2);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let resp: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(2..=3)).collect();
        let cond = pick(&mut rng, &[&[2][..], &[3], &[4], &[2, 2]]);
        let resp = VariableScheme::anonymous("F", &resp).unwrap();
        let cond = VariableScheme::anonymous("E", cond).unwrap();
        let table = random_table(&mut rng, cond.state_count(), resp.state_count());
        let p = Parameterization::new(Target::Emission, resp, cond);
        let back = p.distribution(&p.interactions(&table).unwrap()).unwrap();
        worst = worst.max(sup_diff(table.as_slice(), back.as_slice()));
    }
    let elapsed = start.elapsed();
    r.line(
        "parameterization round trip",
        worst <= ROUND_TRIP_TOL && elapsed < ROUND_TRIP_BUDGET,
        format!("100 tables, max sup error {worst:.2e} (tol {ROUND_TRIP_TOL:e}), {:.2} s", elapsed.as_secs_f64()),
    );
}

fn zero_restrictions(r: &mut Report) {
    let mut rng = rng(3);
    let start = Instant::now();
    // zeros imply independencies
    let mut worst_stmt = 0.0f64;
    let mut statements = 0;
    for _ in 0..20 {
        let spec = random_spec(&mut rng);
        let model = random_restricted_model(&mut rng, &spec, 1.0);
        for st in spec.graph().independencies(false) {
            worst_stmt = worst_stmt.max(statement_violation(&model, &st));
            statements += 1;
        }
    }
    // independencies imply zeros
    let mut worst_coef = 0.0f64;
    let mut zeros = 0;
    for _ in 0..20 {
        let (spec, model) = product_model(&mut rng);
        let delta = spec.transition_parameterization().interactions(model.transition()).unwrap();
        let theta = spec.emission_parameterization().interactions(model.emission()).unwrap();
        for (idx, _) in spec.constraints().iter() {
            let table = if idx.target == Target::Transition { &delta } else { &theta };
            worst_coef = worst_coef.max(table.get(idx).unwrap().abs());
            zeros += 1;
        }
    }
    let elapsed = start.elapsed();
    r.line(
        "zero restrictions and independencies",
        worst_stmt <= INDEPENDENCE_TOL && worst_coef <= INDEPENDENCE_TOL && elapsed < INDEPENDENCE_BUDGET,
        format!(
            "{statements} statements max violation {worst_stmt:.2e}; {zeros} coefficients max |value| {worst_coef:.2e} \
             (tol {INDEPENDENCE_TOL:e}), {:.2} s",
            elapsed.as_secs_f64()
        ),
    );
}

fn marginal_process(r: &mut Report) {
    let mut rng = rng(4);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 10 {
        let (spec, t, rset) = preserving_spec(&mut rng);
        assert!(spec.graph().marginal_preservation(t, rset));
        let model = random_restricted_model(&mut rng, &spec, 1.0);
        worst = worst.max(marginal_gap(&model, t, rset));
        accepted += 1;
    }
    // E2 -> E1 breaks pa(T) = T for T = {E1}
    let graph = GraphBuilder::new(2, 2).directed(1, 0).emit(0, 0).emit(1, 1).build().unwrap();
    let lat = VariableScheme::anonymous("E", &[2, 2]).unwrap();
    let obs = VariableScheme::anonymous("F", &[2, 2]).unwrap();
    let spec = ModelSpec::new(graph, lat, obs, &[]).unwrap();
    let (t, rset) = (VarSet::singleton(0), VarSet::singleton(0));
    let flagged = !spec.graph().marginal_preservation(t, rset);
    let model = random_restricted_model(&mut rng, &spec, 2.0);
    let counter = marginal_gap(&model, t, rset);
    let elapsed = start.elapsed();
    r.line(
        "marginal process",
        worst <= MARGINAL_TOL && flagged && counter > MARGINAL_TOL && elapsed < MARGINAL_BUDGET,
        format!(
            "10 models max gap {worst:.2e} (tol {MARGINAL_TOL:e}); counterexample flagged {flagged}, gap {counter:.2e}; {:.2} s",
            elapsed.as_secs_f64()
        ),
    );
}

fn constraint_error(spec: &ModelSpec, fit: &FitResult) -> (bool, f64) {
    let mut exact = true;
    let delta = spec.transition_parameterization().interactions(fit.model.transition()).unwrap();
    let theta = spec.emission_parameterization().interactions(fit.model.emission()).unwrap();
    let mut worst = 0.0f64;
    for (idx, _) in fit.constraints.iter() {
        let (stored, implied) = if idx.target == Target::Transition {
            (&fit.transition_interactions, &delta)
        } else {
            (&fit.emission_interactions, &theta)
        };
        exact &= stored.get(idx) == Some(0.0);
        worst = worst.max(implied.get(idx).unwrap().abs());
    }
    (exact, worst)
}

fn em_properties(r: &mut Report) {
    let (sat, nog) = em_specs();
    let truth = structured_model(&nog, 1.5, 4.0);
    let start = Instant::now();
    let outcomes: Vec<(FitResult, FitResult)> = parallel_map(20, |k| {
        let (_, series) = truth.simulate(500, 100 + k as u64).unwrap();
        let options = FitOptions::default();
        (em_fit(&sat, &series, &options).unwrap(), em_fit(&nog, &series, &options).unwrap())
    });
    let elapsed = start.elapsed();
    let mut monotone = true;
    let mut exact = true;
    let mut worst_zero = 0.0f64;
    let mut below = 0;
    let mut stats = Vec::new();
    for (fs, fnog) in &outcomes {
        for (spec, fit) in [(&sat, fs), (&nog, fnog)] {
            monotone &= fit.em_trace.windows(2).all(|w| w[1] >= w[0] - TRACE_TOL);
            let (e, w) = constraint_error(spec, fit);
            exact &= e && fit.constraints == *spec.constraints();
            worst_zero = worst_zero.max(w);
        }
        let test = lrt(fnog, fs).unwrap();
        if test.statistic < chi_square_quantile(0.99, test.df as f64) {
            below += 1;
        }
        stats.push(test.statistic);
    }
    // monotonicity also holds for single restarts run to a tight tolerance
    let (_, series) = truth.simulate(500, 99).unwrap();
    let tight = FitOptions {
        max_iter: 2000,
        tol: 1e-12,
        ..FitOptions::default()
    };
    for restart in 0..3 {
        let fit = fit_restart(&sat, &series, &tight, restart).unwrap();
        monotone &= fit.em_trace.windows(2).all(|w| w[1] >= w[0] - TRACE_TOL);
    }
    let mean = stats.iter().sum::<f64>() / stats.len() as f64;
    r.line(
        "EM properties",
        monotone && exact && worst_zero <= INDEPENDENCE_TOL && below >= 18 && elapsed < EM_BUDGET,
        format!(
            "monotone {monotone} (tol {TRACE_TOL:e}); stored zeros exact {exact}, implied max {worst_zero:.1e}; \
             LRT below chi-square(4) 0.99 quantile in {below}/20 (need 18, mean {mean:.2}); {:.1} s (budget {} s)",
            elapsed.as_secs_f64(),
            EM_BUDGET.as_secs()
        ),
    );
}

fn aic_arithmetic(r: &mut Report) {
    let soft = aic_value(-739.0426, 17);
    let energy = aic_value(-2707.883, 22);
    let ok = format!("{soft:.3}") == "1512.085" && (energy - 5459.766).abs() < 1e-9 && (energy - 5459.77).abs() <= AIC_TOL;
    r.line(
        "AIC arithmetic",
        ok,
        format!("aic(-739.0426, 17) = {soft:.4}; aic(-2707.883, 22) = {energy:.4} vs 5459.77 (tol {AIC_TOL})"),
    );
}

fn equivalent(a: &str, b: &str) -> Option<Vec<(String, String)>> {
    let dir = specs_dir().join("equivalence");
    let out = bin()
        .arg("equivalent")
        .arg("--spec")
        .arg(dir.join(a))
        .arg("--spec")
        .arg(dir.join(b))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    if text.trim() == "not equivalent" {
        return None;
    }
    Some(
        text.lines()
            .map(|l| {
                let (x, y) = l.split_once(" -> ").unwrap();
                (x.to_string(), y.to_string())
            })
            .collect(),
    )
}

fn graph_equivalence(r: &mut Report) {
    let family = ["generic_e3.spec", "generic_e1.spec", "generic_e2.spec"];
    let mut pairs = 0;
    let mut ok = true;
    for a in family {
        for b in family {
            match equivalent(a, b) {
                Some(map) => {
                    let mut targets: Vec<_> = map.iter().map(|(_, y)| y.clone()).collect();
                    targets.sort();
                    ok &= targets == ["E1", "E2", "E3"];
                    pairs += 1;
                }
                None => ok = false,
            }
        }
    }
    let broken = equivalent("generic_e3.spec", "generic_e3_perturbed.spec").is_none()
        && equivalent("generic_e1.spec", "generic_e3_perturbed.spec").is_none();
    r.line(
        "graph equivalence",
        ok && broken,
        format!("{pairs}/9 ordered pairs equivalent with a bijection; perturbed emission edge breaks it: {broken}"),
    );
}

#[test]
fn acceptance() {
    let mut r = Report { failures: Vec::new() };
    parameter_counts(&mut r);
    likelihood_oracle(&mut r);
    round_trip(&mut r);
    zero_restrictions(&mut r);
    marginal_process(&mut r);
    em_properties(&mut r);
    aic_arithmetic(&mut r);
    graph_equivalence(&mut r);
    assert!(r.failures.is_empty(), "failed: {:?}", r.failures);
}
