//! The MHMM probability model over joint latent states `E` and joint
//! observations `F`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::param::ConditionalTable;
use crate::scheme::VariableScheme;

const ROW_TOLERANCE: f64 = 1e-10;

/// A categorical multivariate time series, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedSeries {
    scheme: VariableScheme,
    data: Vec<u8>,
    joint: Vec<usize>,
}

impl ObservedSeries {
    /// Builds a series from rows of 0-based categories.
    pub fn new(scheme: VariableScheme, rows: &[Vec<usize>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch("series needs at least one time point".into()));
        }
        let s = scheme.len();
        let mut data = Vec::with_capacity(rows.len() * s);
        let mut joint = Vec::with_capacity(rows.len());
        for (t, row) in rows.iter().enumerate() {
            if row.len() != s {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} values, expected {s}",
                    t + 1,
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                if c >= scheme.categories(j) {
                    return Err(Error::CategoryOutOfRange {
                        row: t + 1,
                        column: j + 1,
                        value: c + 1,
                        max: scheme.categories(j),
                    });
                }
                data.push(c as u8);
            }
            joint.push(scheme.encode(row));
        }
        Ok(ObservedSeries { scheme, data, joint })
    }

    /// Builds a series from joint observation indices.
    pub fn from_joint(scheme: VariableScheme, joint: Vec<usize>) -> Result<Self> {
        let rows: Vec<Vec<usize>> = joint
            .iter()
            .map(|&x| {
                if x < scheme.state_count() {
                    Ok(scheme.decode(x))
                } else {
                    Err(Error::DimensionMismatch(format!("joint observation {x} out of range")))
                }
            })
            .collect::<Result<_>>()?;
        Self::new(scheme, &rows)
    }

    pub fn scheme(&self) -> &VariableScheme {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.joint.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joint.is_empty()
    }

    /// 0-based categories at time `t`.
    pub fn row(&self, t: usize) -> &[u8] {
        let s = self.scheme.len();
        &self.data[t * s..(t + 1) * s]
    }

    pub fn joint(&self) -> &[usize] {
        &self.joint
    }

    /// Dimensions plus a SHA-256 digest of the contents, truncated to 64 bits.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        h.update((self.len() as u64).to_le_bytes());
        h.update((self.scheme.len() as u64).to_le_bytes());
        for v in self.scheme.variables() {
            h.update((v.categories as u64).to_le_bytes());
        }
        h.update(&self.data);
        let d = h.finalize();
        let mut b = [0u8; 8];
        b.copy_from_slice(&d[..8]);
        u64::from_le_bytes(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhmmModel {
    latent: VariableScheme,
    observed: VariableScheme,
    transition: ConditionalTable,
    emission: ConditionalTable,
    initial: Vec<f64>,
}

impl MhmmModel {
    /// Builds a model whose initial law is the invariant law of `transition`.
    pub fn new(
        latent: VariableScheme,
        observed: VariableScheme,
        transition: ConditionalTable,
        emission: ConditionalTable,
    ) -> Result<Self> {
        check_dims(&latent, &observed, &transition, &emission)?;
        transition.validate(ROW_TOLERANCE)?;
        emission.validate(ROW_TOLERANCE)?;
        let initial = stationary_distribution(&transition)?;
        Ok(MhmmModel {
            latent,
            observed,
            transition,
            emission,
            initial,
        })
    }

    /// Builds a model with an explicit initial law, which must be invariant.
    pub fn with_initial(
        latent: VariableScheme,
        observed: VariableScheme,
        transition: ConditionalTable,
        emission: ConditionalTable,
        initial: Vec<f64>,
    ) -> Result<Self> {
        check_dims(&latent, &observed, &transition, &emission)?;
        transition.validate(ROW_TOLERANCE)?;
        emission.validate(ROW_TOLERANCE)?;
        if initial.len() != transition.rows() {
            return Err(Error::DimensionMismatch("initial law length".into()));
        }
        let n = initial.len();
        let mut worst = (initial.iter().sum::<f64>() - 1.0).abs();
        for j in 0..n {
            let v: f64 = (0..n).map(|i| initial[i] * transition.get(i, j)).sum();
            worst = worst.max((v - initial[j]).abs());
        }
        if worst > ROW_TOLERANCE {
            return Err(Error::NotInvariant(worst));
        }
        Ok(MhmmModel {
            latent,
            observed,
            transition,
            emission,
            initial,
        })
    }

    pub fn latent_scheme(&self) -> &VariableScheme {
        &self.latent
    }

    pub fn observed_scheme(&self) -> &VariableScheme {
        &self.observed
    }

    pub fn transition(&self) -> &ConditionalTable {
        &self.transition
    }

    pub fn emission(&self) -> &ConditionalTable {
        &self.emission
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn state_count(&self) -> usize {
        self.initial.len()
    }

    fn check_series(&self, series: &ObservedSeries) -> Result<()> {
        if series.scheme() != &self.observed {
            return Err(Error::DimensionMismatch(
                "series scheme differs from the model's observable scheme".into(),
            ));
        }
        Ok(())
    }

    /// Log-likelihood by the normalized forward recursion.
    pub fn log_likelihood(&self, series: &ObservedSeries) -> Result<f64> {
        self.check_series(series)?;
        Ok(self.forward(series).1)
    }

    /// Normalized forward variables (`T x n`) and the log-likelihood.
    fn forward(&self, series: &ObservedSeries) -> (Vec<f64>, f64, Vec<f64>) {
        let n = self.state_count();
        let obs = series.joint();
        let mut alpha = vec![0.0; obs.len() * n];
        let mut scale = vec![0.0; obs.len()];
        let mut loglik = 0.0;
        for (t, &f) in obs.iter().enumerate() {
            let (done, rest) = alpha.split_at_mut(t * n);
            let cur = &mut rest[..n];
            if t == 0 {
                for e in 0..n {
                    cur[e] = self.initial[e] * self.emission.get(e, f);
                }
            } else {
                let prev = &done[(t - 1) * n..];
                for e in 0..n {
                    let mut s = 0.0;
                    for (ep, &a) in prev.iter().enumerate() {
                        s += a * self.transition.get(ep, e);
                    }
                    cur[e] = s * self.emission.get(e, f);
                }
            }
            let c: f64 = cur.iter().sum();
            for v in cur.iter_mut() {
                *v /= c;
            }
            scale[t] = c;
            loglik += c.ln();
        }
        (alpha, loglik, scale)
    }

    fn backward(&self, series: &ObservedSeries, scale: &[f64]) -> Vec<f64> {
        let n = self.state_count();
        let obs = series.joint();
        let len = obs.len();
        let mut beta = vec![0.0; len * n];
        for v in &mut beta[(len - 1) * n..] {
            *v = 1.0;
        }
        for t in (0..len - 1).rev() {
            let f = obs[t + 1];
            for ep in 0..n {
                let mut s = 0.0;
                for e in 0..n {
                    s += self.transition.get(ep, e) * self.emission.get(e, f) * beta[(t + 1) * n + e];
                }
                beta[t * n + ep] = s / scale[t + 1];
            }
        }
        beta
    }

    /// Smoothed posteriors of the latent chain.
    pub fn forward_backward(&self, series: &ObservedSeries) -> Result<Posteriors> {
        self.check_series(series)?;
        let n = self.state_count();
        let len = series.len();
        let obs = series.joint();
        let (alpha, loglik, scale) = self.forward(series);
        let beta = self.backward(series, &scale);
        let mut gamma = vec![0.0; len * n];
        for i in 0..len * n {
            gamma[i] = alpha[i] * beta[i];
        }
        let mut xi = vec![0.0; len.saturating_sub(1) * n * n];
        for t in 0..len.saturating_sub(1) {
            let f = obs[t + 1];
            for ep in 0..n {
                for e in 0..n {
                    xi[(t * n + ep) * n + e] = alpha[t * n + ep]
                        * self.transition.get(ep, e)
                        * self.emission.get(e, f)
                        * beta[(t + 1) * n + e]
                        / scale[t + 1];
                }
            }
        }
        Ok(Posteriors {
            states: n,
            gamma,
            xi,
            log_likelihood: loglik,
        })
    }

    /// Expected transition, emission and initial counts (E-step statistics).
    pub fn expected_counts(&self, series: &ObservedSeries) -> Result<ExpectedCounts> {
        let post = self.forward_backward(series)?;
        let n = self.state_count();
        let m = self.observed.state_count();
        let mut transition = vec![0.0; n * n];
        let mut emission = vec![0.0; n * m];
        for t in 0..series.len() {
            let f = series.joint()[t];
            for e in 0..n {
                emission[e * m + f] += post.gamma(t)[e];
            }
            if t + 1 < series.len() {
                for (acc, v) in transition.iter_mut().zip(post.xi(t)) {
                    *acc += v;
                }
            }
        }
        Ok(ExpectedCounts {
            states: n,
            observations: m,
            initial: post.gamma(0).to_vec(),
            transition,
            emission,
            log_likelihood: post.log_likelihood,
        })
    }

    /// Most probable latent path (joint state indices). Among equally
    /// probable paths the lexicographically smallest is returned.
    pub fn viterbi(&self, series: &ObservedSeries) -> Result<Vec<usize>> {
        self.check_series(series)?;
        let n = self.state_count();
        let obs = series.joint();
        let len = obs.len();
        let lt: Vec<f64> = self.transition.as_slice().iter().map(|p| p.ln()).collect();
        let le = |e: usize, f: usize| self.emission.get(e, f).ln();
        // best log-probability of the suffix after t, starting in state e at t
        let mut suffix = vec![0.0; len * n];
        for t in (0..len - 1).rev() {
            let f = obs[t + 1];
            for e in 0..n {
                let mut best = f64::NEG_INFINITY;
                for nx in 0..n {
                    let v = lt[e * n + nx] + le(nx, f) + suffix[(t + 1) * n + nx];
                    if v > best {
                        best = v;
                    }
                }
                suffix[t * n + e] = best;
            }
        }
        let pick = |scores: &mut dyn Iterator<Item = (usize, f64)>| -> usize {
            let all: Vec<(usize, f64)> = scores.collect();
            let best = all.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-12 * best.abs().max(1.0);
            all.iter().find(|x| x.1 >= best - tol).map(|x| x.0).unwrap_or(0)
        };
        let mut path = Vec::with_capacity(len);
        let first = pick(&mut (0..n).map(|e| (e, self.initial[e].ln() + le(e, obs[0]) + suffix[e])));
        path.push(first);
        for t in 1..len {
            let prev = path[t - 1];
            let next = pick(&mut (0..n).map(|e| (e, lt[prev * n + e] + le(e, obs[t]) + suffix[t * n + e])));
            path.push(next);
        }
        Ok(path)
    }

    /// Draws a latent path and an observed series of length `len`.
    pub fn simulate(&self, len: usize, seed: u64) -> Result<(Vec<usize>, ObservedSeries)> {
        if len == 0 {
            return Err(Error::DimensionMismatch("series length must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut path = Vec::with_capacity(len);
        let mut obs = Vec::with_capacity(len);
        let mut e = sample(&self.initial, &mut rng);
        for t in 0..len {
            if t > 0 {
                e = sample(self.transition.row(e), &mut rng);
            }
            path.push(e);
            obs.push(sample(self.emission.row(e), &mut rng));
        }
        Ok((path, ObservedSeries::from_joint(self.observed.clone(), obs)?))
    }
}

fn sample<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn check_dims(
    latent: &VariableScheme,
    observed: &VariableScheme,
    transition: &ConditionalTable,
    emission: &ConditionalTable,
) -> Result<()> {
    let n = latent.state_count();
    let m = observed.state_count();
    if transition.rows() != n || transition.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "transition table is {}x{}, expected {n}x{n}",
            transition.rows(),
            transition.cols()
        )));
    }
    if emission.rows() != n || emission.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "emission table is {}x{}, expected {n}x{m}",
            emission.rows(),
            emission.cols()
        )));
    }
    Ok(())
}

/// Invariant law of a strictly positive stochastic matrix.
pub fn stationary_distribution(transition: &ConditionalTable) -> Result<Vec<f64>> {
    let n = transition.rows();
    if transition.cols() != n || n == 0 {
        return Err(Error::DimensionMismatch("transition table must be square".into()));
    }
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = transition.get(i, j);
        }
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).ok_or(Error::Singular("stationary distribution"))?;
    let mut pi: Vec<f64> = pi.iter().copied().collect();
    let mut residual = 0.0f64;
    for j in 0..n {
        let v: f64 = (0..n).map(|i| pi[i] * transition.get(i, j)).sum();
        residual = residual.max((v - pi[j]).abs());
    }
    if !(residual < 1e-12) || pi.iter().any(|&p| !(p > -1e-14)) {
        return Err(Error::NonConvergence {
            context: "stationary distribution",
            iterations: 1,
            residual,
        });
    }
    for p in &mut pi {
        *p = p.max(0.0);
    }
    Ok(pi)
}

/// Per-time posteriors `gamma_t(e)` and pairwise posteriors `xi_t(e', e)`.
#[derive(Debug, Clone)]
pub struct Posteriors {
    states: usize,
    gamma: Vec<f64>,
    xi: Vec<f64>,
    pub log_likelihood: f64,
}

impl Posteriors {
    pub fn len(&self) -> usize {
        self.gamma.len() / self.states
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn gamma(&self, t: usize) -> &[f64] {
        &self.gamma[t * self.states..(t + 1) * self.states]
    }

    /// `xi_t` as an `n x n` row-major block (`e'` rows, `e` columns), `t < T - 1`.
    pub fn xi(&self, t: usize) -> &[f64] {
        let nn = self.states * self.states;
        &self.xi[t * nn..(t + 1) * nn]
    }
}

/// Sufficient statistics of one E-step.
#[derive(Debug, Clone)]
pub struct ExpectedCounts {
    pub states: usize,
    pub observations: usize,
    pub initial: Vec<f64>,
    /// `n x n`, rows indexed by the previous state.
    pub transition: Vec<f64>,
    /// `n x m`, rows indexed by the latent state.
    pub emission: Vec<f64>,
    pub log_likelihood: f64,
}
