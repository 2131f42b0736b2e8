//! Human-readable fit reports and comparison tables.

use std::fmt::Write as _;

use mhmm_core::selection::{aic, ModelComparison, COLUMNS};
use mhmm_core::{ConstraintSet, FitResult, Provenance, Schemes, Target};

pub fn fit_report(label: &str, fit: &FitResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model           {label}");
    let _ = writeln!(out, "loglike         {:.4}", fit.log_likelihood);
    let _ = writeln!(out, "par             {}", fit.free_parameters);
    let _ = writeln!(out, "AIC             {:.4}", aic(fit));
    let _ = writeln!(out, "iterations      {}", fit.iterations);
    let _ = writeln!(out, "converged       {}", fit.converged);
    let _ = writeln!(out, "restart         {}", fit.restart);
    let _ = writeln!(out, "data            {:016x}", fit.data_fingerprint);
    let _ = writeln!(out, "zeroed          {}", fit.constraints.len());
    for (p, n) in fit.constraints.count_by_provenance() {
        let _ = writeln!(out, "  {:<22}{n}", p.to_string());
    }
    out
}

/// Total, zeroed and free coefficient counts, then zeroed counts by origin.
///
/// A coefficient zeroed for several reasons is counted under each of them.
pub fn count_report(schemes: &Schemes, constraints: &ConstraintSet) -> String {
    let total = schemes.total_parameters();
    let mut out = String::new();
    let _ = writeln!(out, "total {total}");
    let _ = writeln!(out, "zeroed {}", constraints.len());
    let _ = writeln!(out, "free {}", total - constraints.len());
    for target in [Target::Transition, Target::Emission] {
        let n = schemes.layout(target).len();
        let z = constraints.count_target(target);
        let _ = writeln!(out, "{target} total {n} zeroed {z} free {}", n - z);
    }
    let by = constraints.count_by_provenance();
    for p in Provenance::ALL {
        let _ = writeln!(out, "zeroed by {p} {}", by.get(&p).copied().unwrap_or(0));
    }
    out
}

/// Comparison rows at full precision.
pub fn comparison_csv(table: &ModelComparison) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in &table.rows {
        w.write_record([
            r.label.clone(),
            r.lrt_statistic.to_string(),
            r.df.to_string(),
            r.p_value.to_string(),
            r.par.to_string(),
            r.log_likelihood.to_string(),
            r.aic.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
}
