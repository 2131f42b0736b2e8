mod common;

use common::*;
use mhmm_core::selection::{chi_square_quantile, lrt};
use mhmm_core::{
    em_fit, FitOptions, GraphBuilder, InteractionIndex, ModelSpec, ObservedSeries, Target, VarSet, VariableScheme,
};

#[test]
fn mle_dominates_truth_on_training_data() {
    let lat = VariableScheme::anonymous("E", &[2]).unwrap();
    let obs = VariableScheme::anonymous("F", &[3, 2]).unwrap();
    let graph = GraphBuilder::new(1, 2).complete_emit().complete_bidirected_observed().build().unwrap();
    let spec = ModelSpec::new(graph, lat, obs, &[]).unwrap();
    let mut rng = rng(11);
    let truth = random_restricted_model(&mut rng, &spec, 1.5);
    let (_, series) = truth.simulate(2000, 5).unwrap();
    let fit = em_fit(&spec, &series, &FitOptions::default()).unwrap();
    let true_ll = truth.log_likelihood(&series).unwrap();
    assert!(fit.log_likelihood >= true_ll, "{} < {true_ll}", fit.log_likelihood);
    assert_eq!(fit.model.log_likelihood(&series).unwrap(), fit.log_likelihood);
}

#[test]
fn fits_are_reproducible() {
    let (sat, nog) = em_specs();
    let truth = structured_model(&nog, 1.5, 4.0);
    let (_, series) = truth.simulate(300, 3).unwrap();
    let options = FitOptions {
        restarts: 3,
        seed: 42,
        ..FitOptions::default()
    };
    let a = em_fit(&sat, &series, &options).unwrap();
    let b = em_fit(&sat, &series, &options).unwrap();
    assert_eq!(a.em_trace, b.em_trace);
    assert_eq!(a.model, b.model);
    assert_eq!(a.restart, b.restart);
}

/// Data with F1 independent of F2 and of the latent chain, fitted with the
/// F1-F2 association left free. The estimated association must sit within
/// three bootstrap standard errors of zero.
#[test]
fn independence_estimate_within_bootstrap_error() {
    let lat = VariableScheme::anonymous("E", &[2]).unwrap();
    let obs = VariableScheme::anonymous("F", &[2, 3]).unwrap();
    let truth_graph = GraphBuilder::new(1, 2).build().unwrap();
    let truth_spec = ModelSpec::new(truth_graph, lat.clone(), obs.clone(), &[]).unwrap();
    let graph = GraphBuilder::new(1, 2).bidirected_observed(0, 1).build().unwrap();
    let spec = ModelSpec::new(graph, lat, obs, &[]).unwrap();
    let mut rng = rng(12);
    let truth = random_restricted_model(&mut rng, &truth_spec, 1.0);
    let options = FitOptions {
        restarts: 2,
        ..FitOptions::default()
    };
    let pair = VarSet::from_indices([0, 1]);
    let association = |fit: &mhmm_core::FitResult| -> Vec<f64> {
        fit.emission_interactions
            .entries()
            .into_iter()
            .filter(|(i, _): &(InteractionIndex, f64)| i.response == pair && i.condition.is_empty())
            .map(|(_, v)| v)
            .collect()
    };
    let (_, series) = truth.simulate(1000, 1).unwrap();
    let fit = em_fit(&spec, &series, &options).unwrap();
    let estimate = association(&fit);
    assert_eq!(estimate.len(), 2);
    let replicates: Vec<Vec<f64>> = (0..50)
        .map(|b| {
            let (_, s) = fit.model.simulate(1000, 1000 + b).unwrap();
            association(&em_fit(&spec, &s, &options).unwrap())
        })
        .collect();
    for (k, &est) in estimate.iter().enumerate() {
        let xs: Vec<f64> = replicates.iter().map(|r| r[k]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let se = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
        assert!(se > 0.0);
        assert!(est.abs() <= 3.0 * se, "coefficient {k}: {est} vs se {se}");
    }
}

#[test]
fn fitted_tables_satisfy_graph_independencies() {
    let mut rng = rng(13);
    let options = FitOptions {
        restarts: 2,
        ..FitOptions::default()
    };
    for _ in 0..6 {
        let spec = random_spec(&mut rng);
        let truth = random_restricted_model(&mut rng, &spec, 1.0);
        let (_, series) = truth.simulate(200, 7).unwrap();
        let fit = em_fit(&spec, &series, &options).unwrap();
        for (idx, _) in fit.constraints.iter() {
            let table = match idx.target {
                Target::Transition => &fit.transition_interactions,
                Target::Emission => &fit.emission_interactions,
            };
            assert_eq!(table.get(idx), Some(0.0));
        }
        for st in spec.graph().independencies(false) {
            let v = statement_violation(&fit.model, &st);
            assert!(v <= 1e-6, "{st}: {v}");
        }
        assert!(fit.em_trace.windows(2).all(|w| w[1] >= w[0] - 1e-8));
    }
}

/// noGranger versus saturated on noGranger data, 50 replicates.
#[test]
fn lrt_is_calibrated_under_no_granger() {
    let (sat, nog) = em_specs();
    let truth = structured_model(&nog, 1.5, 4.0);
    let below = parallel_map(50, |k| {
        let (_, series): (_, ObservedSeries) = truth.simulate(500, 500 + k as u64).unwrap();
        let options = FitOptions::default();
        let full = em_fit(&sat, &series, &options).unwrap();
        let restricted = em_fit(&nog, &series, &options).unwrap();
        let test = lrt(&restricted, &full).unwrap();
        assert_eq!(test.df, 4);
        test.statistic < chi_square_quantile(0.99, 4.0)
    })
    .into_iter()
    .filter(|&b| b)
    .count();
    assert!(below >= 45, "{below}/50 below the 0.99 quantile");
}
