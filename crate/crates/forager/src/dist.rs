//! Numerically stable categorical-distribution primitives and seeded
//! randomness.
//!
//! Everything downstream (models, inference, learning, environments) is
//! built out of three small pieces: [`Categorical`] probability vectors,
//! [`CondTable`] conditional probability tables whose axis 0 is the outcome
//! axis, and a reproducible [`SeededRng`]. All log-domain operations floor
//! probabilities at [`LOG_EPSILON`] so hard 0/1 entries (identity likelihood
//! matrices) never produce infinities.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor added inside every logarithm.
pub const LOG_EPSILON: f64 = 1e-16;

/// Tolerance for "sums to one" checks.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// A normalized probability vector over discrete outcomes.
///
/// Invariants: at least one entry, every entry non-negative, entries sum to
/// one within [`PROB_TOLERANCE`]. Constructors enforce this; deserialization
/// is lenient so that invalid models can be loaded and reported through
/// model validation instead of failing opaquely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Categorical {
    probs: Vec<f64>,
}

impl Categorical {
    /// Build from an already-normalized vector, checking the invariants.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "negative or non-finite entry in {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(Categorical { probs })
    }

    /// Uniform distribution over `n` outcomes.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform distribution needs at least one outcome");
        Categorical {
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on outcome `index`.
    pub fn one_hot(n: usize, index: usize) -> Self {
        assert!(index < n, "one-hot index {index} out of range {n}");
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Categorical { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// True when the invariants hold; used by model validation after
    /// deserializing untrusted data.
    pub fn is_valid(&self) -> bool {
        !self.probs.is_empty()
            && self.probs.iter().all(|&p| p.is_finite() && p >= 0.0)
            && (self.probs.iter().sum::<f64>() - 1.0).abs() <= PROB_TOLERANCE
    }

    /// Index of the largest entry, first one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate().skip(1) {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Normalize a vector of non-negative weights into a [`Categorical`].
pub fn normalize(weights: &[f64]) -> Result<Categorical> {
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("empty vector".into()));
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "negative or non-finite weight in {weights:?}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidDistribution("all-zero weights".into()));
    }
    Ok(Categorical {
        probs: weights.iter().map(|w| w / sum).collect(),
    })
}

/// Temperature-scaled softmax with max-subtraction for overflow safety.
pub fn softmax(logits: &[f64], temperature: f64) -> Result<Categorical> {
    if logits.is_empty() {
        return Err(Error::InvalidInput("softmax of empty vector".into()));
    }
    if !(temperature > 0.0) {
        return Err(Error::InvalidInput(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite logit in {logits:?}"
        )));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits
        .iter()
        .map(|l| ((l - max) / temperature).exp())
        .collect();
    let sum: f64 = exps.iter().sum();
    Ok(Categorical {
        probs: exps.iter().map(|e| e / sum).collect(),
    })
}

/// Entrywise `ln(p + LOG_EPSILON)`.
pub fn log_stable(p: &Categorical) -> Vec<f64> {
    p.probs().iter().map(|&x| (x + LOG_EPSILON).ln()).collect()
}

/// KL divergence `Σ p·(ln(p+ε) − ln(q+ε))` between equal-length categoricals.
pub fn kl_divergence(p: &Categorical, q: &Categorical) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "kl_divergence over lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&pi, &qi)| pi * ((pi + LOG_EPSILON).ln() - (qi + LOG_EPSILON).ln()))
        .sum())
}

/// Shannon entropy `−Σ p·ln(p+ε)` in nats.
pub fn entropy(p: &Categorical) -> f64 {
    -p.probs()
        .iter()
        .map(|&pi| pi * (pi + LOG_EPSILON).ln())
        .sum::<f64>()
}

/// Deterministic, seed-reproducible random stream.
///
/// Identical seeds yield identical draw sequences regardless of platform.
/// The struct is single-owner; parallel episodes each own a private stream.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn uniform01(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}

/// Draw an outcome index from `p`, advancing the rng state.
pub fn sample(rng: &mut SeededRng, p: &Categorical) -> usize {
    let u = rng.uniform01();
    let mut acc = 0.0;
    for (i, &pi) in p.probs().iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Sample from a Dirichlet distribution via per-component Gamma draws.
///
/// With all-ones concentrations the result is uniform on the simplex.
pub fn dirichlet_sample(rng: &mut SeededRng, alphas: &[f64]) -> Result<Categorical> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("empty concentration vector".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-positive concentration in {alphas:?}"
        )));
    }
    let mut draws = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let gamma =
            Gamma::new(a, 1.0).map_err(|e| Error::InvalidInput(format!("gamma({a}): {e}")))?;
        draws.push(gamma.sample(&mut rng.inner));
    }
    normalize(&draws)
}

/// Index of the maximum entry; ties are broken uniformly at random.
pub fn argmax_tiebreak(rng: &mut SeededRng, values: &[f64]) -> usize {
    assert!(!values.is_empty(), "argmax of empty vector");
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == max)
        .map(|(i, _)| i)
        .collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.inner.gen_range(0..ties.len())]
    }
}

/// Dense conditional probability table.
///
/// `shape[0]` is the outcome axis; the remaining axes condition the
/// distribution. Storage is row-major over the full shape, so serialized
/// data is the flattened row-major array. Every column (outcome vector for
/// one fixed conditioning multi-index) must be a valid categorical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondTable {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl CondTable {
    /// Build from a full row-major buffer.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!("degenerate shape {shape:?}")));
        }
        let expect: usize = shape.iter().product();
        if data.len() != expect {
            return Err(Error::Shape(format!(
                "shape {shape:?} needs {expect} entries, got {}",
                data.len()
            )));
        }
        Ok(CondTable { shape, data })
    }

    /// Build by evaluating `f(outcome, conditioning)` over the full table.
    pub fn from_fn(shape: Vec<usize>, f: impl Fn(usize, &[usize]) -> f64) -> Self {
        let num_outcomes = shape[0];
        let cond_shape: Vec<usize> = shape[1..].to_vec();
        let size: usize = shape.iter().product();
        let mut table = CondTable {
            shape,
            data: vec![0.0; size],
        };
        for cond in multi_indices(&cond_shape) {
            for out in 0..num_outcomes {
                let v = f(out, &cond);
                let idx = table.flat(out, &cond);
                table.data[idx] = v;
            }
        }
        table
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn num_outcomes(&self) -> usize {
        self.shape[0]
    }

    pub fn cond_shape(&self) -> &[usize] {
        &self.shape[1..]
    }

    /// Structural sanity: data length matches the shape product.
    pub fn is_well_formed(&self) -> bool {
        !self.shape.is_empty()
            && self.shape.iter().all(|&d| d > 0)
            && self.data.len() == self.shape.iter().product::<usize>()
    }

    fn flat(&self, out: usize, cond: &[usize]) -> usize {
        debug_assert_eq!(cond.len(), self.shape.len() - 1);
        let mut idx = out;
        for (c, d) in cond.iter().zip(&self.shape[1..]) {
            debug_assert!(c < d);
            idx = idx * d + c;
        }
        idx
    }

    pub fn get(&self, out: usize, cond: &[usize]) -> f64 {
        self.data[self.flat(out, cond)]
    }

    pub fn set(&mut self, out: usize, cond: &[usize], value: f64) {
        let idx = self.flat(out, cond);
        self.data[idx] = value;
    }

    /// The outcome vector for one conditioning multi-index.
    pub fn column(&self, cond: &[usize]) -> Vec<f64> {
        (0..self.num_outcomes())
            .map(|o| self.get(o, cond))
            .collect()
    }

    pub fn set_column(&mut self, cond: &[usize], column: &[f64]) {
        assert_eq!(column.len(), self.num_outcomes());
        for (o, &v) in column.iter().enumerate() {
            self.set(o, cond, v);
        }
    }

    /// Iterate every conditioning multi-index in row-major order.
    pub fn cond_indices(&self) -> impl Iterator<Item = Vec<usize>> {
        multi_indices(self.cond_shape())
    }

    /// Conditioning multi-indices whose column is not a valid categorical.
    pub fn stochastic_violations(&self) -> Vec<(Vec<usize>, String)> {
        let mut out = Vec::new();
        for cond in self.cond_indices() {
            let col = self.column(&cond);
            if col.iter().any(|&v| !v.is_finite() || v < 0.0) {
                out.push((cond, "negative or non-finite entry".into()));
                continue;
            }
            let sum: f64 = col.iter().sum();
            if (sum - 1.0).abs() > PROB_TOLERANCE {
                out.push((cond, format!("column sums to {sum}")));
            }
        }
        out
    }

    /// Reverse the outcome axis (axis 0).
    pub fn reversed_outcomes(&self) -> CondTable {
        let n = self.num_outcomes();
        let mut out = self.clone();
        for cond in self.cond_indices() {
            for o in 0..n {
                out.set(o, &cond, self.get(n - 1 - o, &cond));
            }
        }
        out
    }

    /// Reverse the last conditioning axis (by convention, the action axis).
    pub fn reversed_last_axis(&self) -> CondTable {
        let last = *self.shape.last().expect("non-empty shape");
        let mut out = self.clone();
        for cond in self.cond_indices() {
            let mut src = cond.clone();
            *src.last_mut().expect("conditioning axes present") =
                last - 1 - cond.last().expect("conditioning axes present");
            for o in 0..self.num_outcomes() {
                out.set(o, &cond, self.get(o, &src));
            }
        }
        out
    }
}

/// Row-major iteration over all multi-indices of `dims` (a single empty
/// index when `dims` is empty).
pub fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> {
    let dims = dims.to_vec();
    let total: usize = dims.iter().product();
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; dims.len()];
        for (i, &d) in dims.iter().enumerate().rev() {
            idx[i] = flat % d;
            flat /= d;
        }
        idx
    })
}
