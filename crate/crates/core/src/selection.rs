//! Likelihood ratio tests, AIC and comparison tables.
//!
//! p-values use the plain chi-square reference distribution. Zero
//! restrictions that put the true parameter on a boundary are not corrected
//! for.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fit::FitResult;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 10_000;

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
fn incomplete_gamma(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefix = a * libm::log(x) - x - libm::lgamma(a);
    if x < a + 1.0 {
        // series: P = e^{-x} x^a / Gamma(a+1) * sum x^n / (a+1)...(a+n)
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_TERMS {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        let p = (log_prefix + libm::log(sum)).exp_clamped();
        (p, 1.0 - p)
    } else {
        // modified Lentz continued fraction for Q
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_TERMS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        let q = (log_prefix + libm::log(h)).exp_clamped();
        (1.0 - q, q)
    }
}

trait ExpClamped {
    fn exp_clamped(self) -> f64;
}

impl ExpClamped for f64 {
    fn exp_clamped(self) -> f64 {
        libm::exp(self).clamp(0.0, 1.0)
    }
}

/// Upper tail `P(X > x)` of a chi-square variable with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    incomplete_gamma(df / 2.0, x / 2.0).1
}

/// Lower tail `P(X <= x)`.
pub fn chi_square_cdf(x: f64, df: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    incomplete_gamma(df / 2.0, x / 2.0).0
}

/// Quantile of the chi-square law by bisection on the distribution function.
pub fn chi_square_quantile(p: f64, df: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let mut hi = df.max(1.0);
    while chi_square_cdf(hi, df) < p {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `-2 loglike + 2 par`.
pub fn aic_value(log_likelihood: f64, par: usize) -> f64 {
    -2.0 * log_likelihood + 2.0 * par as f64
}

pub fn aic(fit: &FitResult) -> f64 {
    aic_value(fit.log_likelihood, fit.free_parameters)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lrt {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Test from summary values. `df = 0` is only meaningful for a model tested
/// against itself, which gives statistic 0 and p-value 1.
pub fn lrt_from_values(restricted_loglik: f64, full_loglik: f64, restricted_par: usize, full_par: usize) -> Result<Lrt> {
    let df = full_par as i64 - restricted_par as i64;
    if df < 0 {
        return Err(Error::NonPositiveDf(df));
    }
    let statistic = (2.0 * (full_loglik - restricted_loglik)).max(0.0);
    if df == 0 {
        if statistic > 0.0 {
            return Err(Error::NonPositiveDf(0));
        }
        return Ok(Lrt {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        });
    }
    Ok(Lrt {
        statistic,
        df: df as usize,
        p_value: chi_square_sf(statistic, df as f64),
    })
}

/// Likelihood ratio test of `restricted` within `full`. Both fits must be on
/// the same data and the restricted constraint set must contain the full one.
pub fn lrt(restricted: &FitResult, full: &FitResult) -> Result<Lrt> {
    if restricted.data_fingerprint != full.data_fingerprint {
        return Err(Error::DataMismatch);
    }
    if !restricted.constraints.is_superset(&full.constraints) {
        return Err(Error::NotNested("restricted model does not contain the full model's restrictions".into()));
    }
    if restricted.constraints == full.constraints {
        return Ok(Lrt {
            statistic: 0.0,
            df: 0,
            p_value: 1.0,
        });
    }
    let df = full.free_parameters as i64 - restricted.free_parameters as i64;
    if df <= 0 {
        return Err(Error::NonPositiveDf(df));
    }
    lrt_from_values(
        restricted.log_likelihood,
        full.log_likelihood,
        restricted.free_parameters,
        full.free_parameters,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub lrt_statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub par: usize,
    pub log_likelihood: f64,
    pub aic: f64,
}

/// Rows in input order, each tested against the same reference.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModelComparison {
    pub rows: Vec<ComparisonRow>,
}

pub const COLUMNS: [&str; 7] = ["model", "LRT", "df", "p-value", "par", "loglike", "AIC"];

pub fn model_table(fits: &[(String, &FitResult)], reference: &FitResult) -> Result<ModelComparison> {
    let mut rows = Vec::with_capacity(fits.len());
    for (label, fit) in fits {
        let test = lrt(fit, reference).map_err(|e| match e {
            Error::NotNested(_) => Error::NotNested(format!("reference does not nest '{label}'")),
            other => other,
        })?;
        rows.push(ComparisonRow {
            label: label.clone(),
            lrt_statistic: test.statistic,
            df: test.df,
            p_value: test.p_value,
            par: fit.free_parameters,
            log_likelihood: fit.log_likelihood,
            aic: aic(fit),
        });
    }
    Ok(ModelComparison { rows })
}

impl fmt::Display for ModelComparison {
    /// Aligned text with 4 decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.label.clone(),
                    format!("{:.4}", r.lrt_statistic),
                    format!("{}", r.df),
                    format!("{:.4}", r.p_value),
                    format!("{}", r.par),
                    format!("{:.4}", r.log_likelihood),
                    format!("{:.4}", r.aic),
                ]
            })
            .collect();
        let mut width = COLUMNS.map(str::len);
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        for (i, h) in COLUMNS.iter().enumerate() {
            if i == 0 {
                write!(f, "{:<w$}", h, w = width[0])?;
            } else {
                write!(f, "  {:>w$}", h, w = width[i])?;
            }
        }
        writeln!(f)?;
        for row in &cells {
            for (i, c) in row.iter().enumerate() {
                if i == 0 {
                    write!(f, "{:<w$}", c, w = width[0])?;
                } else {
                    write!(f, "  {:>w$}", c, w = width[i])?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
