//! Fuzzy ART primitives: complement coding, the fuzzy AND, and the category
//! choice / match / learning dynamics.
//!
//! All norms are city-block norms computed with [`ExactSum`]: a
//! complement-coded input has norm exactly `M`, and `|I ∧ w|` has one value
//! no matter which route computes it. Inputs remember the support of `x` so
//! that sparse inputs (tf-idf) are scored in `O(nnz)` per category.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ExactSum, Scalar};

/// Class identifier carried by a category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// An `M`-dimensional input with every coordinate in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T = f64>(Vec<T>);

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("feature vector"));
        }
        check_unit_interval(&values)?;
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![T::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> AsRef<[T]> for FeatureVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

fn check_unit_interval<T: Scalar>(values: &[T]) -> Result<()> {
    for (index, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < T::zero() || v > T::one() {
            return Err(Error::Domain {
                index,
                value: v.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

/// The `2M`-dimensional vector `[x, 1 - x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementCoded<T = f64> {
    values: Vec<T>,
    norm: T,
    /// Indices `i < M` with `x_i != 0`.
    support: Vec<usize>,
}

impl<T: Scalar> ComplementCoded<T> {
    /// Number of original features `M` (half the coded length).
    pub fn dim(&self) -> usize {
        self.values.len() / 2
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// City-block norm; equal to `M`.
    pub fn norm(&self) -> T {
        self.norm
    }

    /// Original (non-complement) half.
    pub fn features(&self) -> &[T] {
        &self.values[..self.dim()]
    }

    /// Indices of the non-zero original features.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    fn is_sparse(&self) -> bool {
        self.support.len() * 4 < self.dim()
    }
}

impl<T> AsRef<[T]> for ComplementCoded<T> {
    fn as_ref(&self) -> &[T] {
        &self.values
    }
}

/// Hyperparameters of the ART dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArtParams<T = f64> {
    /// Vigilance.
    pub rho: T,
    /// Learning rate; 1 is fast learning.
    pub beta: T,
    /// Choice parameter.
    pub alpha: T,
    /// Match-tracking increment.
    pub epsilon: T,
}

impl<T: Scalar> Default for ArtParams<T> {
    fn default() -> Self {
        Self {
            rho: T::lit(0.95),
            beta: T::one(),
            alpha: T::lit(0.001),
            epsilon: T::lit(1e-4),
        }
    }
}

impl<T: Scalar> ArtParams<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParam {
                name,
                reason: reason.to_owned(),
            })
        };
        if !(self.rho >= T::zero() && self.rho <= T::one()) {
            return bad("rho", "must lie in [0, 1]");
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return bad("beta", "must lie in (0, 1]");
        }
        if !(self.alpha > T::zero() && self.alpha.is_finite()) {
            return bad("alpha", "must be positive and finite");
        }
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return bad("epsilon", "must lie in (0, 1)");
        }
        Ok(())
    }
}

/// A learned category: weight vector, class label, and the number of inputs it coded.
#[derive(Debug, Clone, PartialEq)]
pub struct Category<T = f64> {
    weights: Vec<T>,
    norm: T,
    /// Exact expansion of the complement-half sum, seeds sparse evaluation.
    upper: ExactSum<T>,
    pub label: Label,
    pub count: u64,
}

impl<T: Scalar> Category<T> {
    /// Uncommitted category: all-ones weights.
    pub fn uncommitted(dim: usize, label: Label) -> Self {
        Self::with_weights(vec![T::one(); 2 * dim], label, 0)
    }

    fn with_weights(weights: Vec<T>, label: Label, count: u64) -> Self {
        let norm = norm_unchecked(&weights);
        let upper = weights[weights.len() / 2..].iter().copied().collect();
        Self {
            weights,
            norm,
            upper,
            label,
            count,
        }
    }

    /// Category committed to a single input (fast commit: `w = I`).
    pub fn from_input(input: &ComplementCoded<T>, label: Label) -> Self {
        Self::with_weights(input.values.clone(), label, 1)
    }

    /// Rebuilds a category from stored weights, e.g. when loading a model file.
    pub fn from_weights(weights: Vec<T>, label: Label, count: u64) -> Result<Self> {
        if weights.is_empty() || !weights.len().is_multiple_of(2) {
            return Err(Error::InvalidParam {
                name: "weights",
                reason: format!("expected a non-empty even length, got {}", weights.len()),
            });
        }
        check_unit_interval(&weights)?;
        Ok(Self::with_weights(weights, label, count))
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `|w|`, cached.
    pub fn norm(&self) -> T {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.weights.len() / 2
    }
}

/// Complement-codes `x` into `[x, 1 - x]`.
pub fn complement_code<T: Scalar>(x: &[T]) -> Result<ComplementCoded<T>> {
    if x.is_empty() {
        return Err(Error::Empty("feature vector"));
    }
    check_unit_interval(x)?;
    Ok(complement_code_unchecked(x))
}

pub(crate) fn complement_code_unchecked<T: Scalar>(x: &[T]) -> ComplementCoded<T> {
    let mut values = Vec::with_capacity(2 * x.len());
    values.extend_from_slice(x);
    values.extend(x.iter().map(|&v| T::one() - v));
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] != T::zero()).collect();
    // Zero coordinates contribute 0 + 1 each.
    let mut acc = ExactSum::new();
    acc.add(T::from_usize(x.len() - support.len()).expect("dimension fits the scalar type"));
    for &i in &support {
        acc.add(values[i]);
        acc.add(values[i + x.len()]);
    }
    ComplementCoded {
        values,
        norm: acc.total(),
        support,
    }
}

/// Complement-codes a sparse vector given as `(index, value)` pairs with strictly
/// increasing indices; omitted coordinates are zero.
pub fn complement_code_sparse<T: Scalar>(
    dim: usize,
    entries: &[(usize, T)],
) -> Result<ComplementCoded<T>> {
    if dim == 0 {
        return Err(Error::Empty("feature vector"));
    }
    let mut x = vec![T::zero(); dim];
    let mut last = None;
    for &(i, v) in entries {
        if i >= dim || last.is_some_and(|l| i <= l) {
            return Err(Error::InvalidParam {
                name: "entries",
                reason: format!("index {i} out of order or beyond dimension {dim}"),
            });
        }
        last = Some(i);
        x[i] = v;
    }
    complement_code(&x)
}

/// Elementwise minimum.
pub fn fuzzy_and<T: Scalar>(a: &[T], b: &[T]) -> Result<Vec<T>> {
    check_dims(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect())
}

/// City-block norm `|a|` of a non-negative vector.
pub fn norm1<T: Scalar>(a: &[T]) -> Result<T> {
    if a.is_empty() {
        return Err(Error::Empty("vector"));
    }
    if let Some((index, &v)) = a
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < T::zero())
    {
        return Err(Error::Domain {
            index,
            value: v.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(norm_unchecked(a))
}

#[inline]
fn norm_unchecked<T: Scalar>(a: &[T]) -> T {
    a.iter().copied().collect::<ExactSum<T>>().total()
}

/// `|I ∧ w|` without materialising the intersection; equal to
/// `norm1(fuzzy_and(I, w))` bit for bit.
#[inline]
pub(crate) fn and_norm<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> T {
    debug_assert_eq!(input.values.len(), c.weights.len());
    if input.is_sparse() {
        // Where x_i = 0: min(0, u_i) = 0 and min(1, w_i+M) = w_i+M, so start
        // from the complement-half sum and correct on the support only.
        let m = input.dim();
        let mut acc = c.upper.clone();
        for &i in &input.support {
            let upper = c.weights[i + m];
            acc.add(input.values[i].min(c.weights[i]));
            acc.add(input.values[i + m].min(upper));
            acc.add(-upper);
        }
        acc.total()
    } else {
        let mut acc = ExactSum::new();
        for (&x, &y) in input.values.iter().zip(&c.weights) {
            acc.add(x.min(y));
        }
        acc.total()
    }
}

fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

fn check_category<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> Result<()> {
    check_dims(c.weights.len(), input.values.len())
}

/// Category choice `T = |I ∧ w| / (alpha + |w|)`.
pub fn choice<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>, alpha: T) -> Result<T> {
    check_category(input, c)?;
    if alpha.is_nan() || alpha <= T::zero() {
        return Err(Error::InvalidParam {
            name: "alpha",
            reason: "must be positive".into(),
        });
    }
    Ok(choice_unchecked(input, c, alpha))
}

#[inline]
pub(crate) fn choice_unchecked<T: Scalar>(
    input: &ComplementCoded<T>,
    c: &Category<T>,
    alpha: T,
) -> T {
    and_norm(input, c) / (alpha + c.norm)
}

/// Match (and fuzzy subsethood of the input in the category): `|I ∧ w| / |I|`.
pub fn match_degree<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> Result<T> {
    check_category(input, c)?;
    Ok(match_unchecked(input, c))
}

#[inline]
pub(crate) fn match_unchecked<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> T {
    and_norm(input, c) / input.norm
}

/// Fuzzy subsethood of the category in the input, `|I ∧ w| / |w|`: exactly 1
/// when the input's point lies in the category box. A zero weight vector (the
/// whole unit cube) contains everything and yields 1.
pub fn category_subsethood<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> Result<T> {
    check_category(input, c)?;
    if c.norm == T::zero() {
        return Ok(T::one());
    }
    Ok(and_norm(input, c) / c.norm)
}

/// Learning step `w' = beta (I ∧ w) + (1 - beta) w`; increments the coding count.
pub fn learn<T: Scalar>(input: &ComplementCoded<T>, c: &mut Category<T>, beta: T) -> Result<()> {
    check_category(input, c)?;
    learn_unchecked(input, c, beta);
    Ok(())
}

pub(crate) fn learn_unchecked<T: Scalar>(input: &ComplementCoded<T>, c: &mut Category<T>, beta: T) {
    if beta == T::one() {
        for (w, &i) in c.weights.iter_mut().zip(&input.values) {
            *w = i.min(*w);
        }
    } else {
        // Same update as `beta (I ∧ w) + (1 - beta) w`, arranged so rounding
        // can never push a weight above its old value.
        for (w, &i) in c.weights.iter_mut().zip(&input.values) {
            *w = *w - beta * (*w - i.min(*w));
        }
    }
    c.norm = norm_unchecked(&c.weights);
    let m = c.weights.len() / 2;
    c.upper = c.weights[m..].iter().copied().collect();
    c.count += 1;
}

/// Category indices ordered by descending choice; ties keep creation order.
pub(crate) fn choice_order<T: Scalar>(
    input: &ComplementCoded<T>,
    categories: &[Category<T>],
    alpha: T,
) -> Vec<(usize, T)> {
    let mut ranked: Vec<(usize, T)> = categories
        .iter()
        .enumerate()
        .map(|(j, c)| (j, choice_unchecked(input, c, alpha)))
        .collect();
    // Stable sort: equal choices stay in ascending index order.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    ranked
}

/// ART search: visits categories by descending choice and returns the first whose
/// match reaches `rho_effective`.
pub fn search<T: Scalar>(
    input: &ComplementCoded<T>,
    categories: &[Category<T>],
    params: &ArtParams<T>,
    rho_effective: T,
) -> Result<Option<usize>> {
    if !(rho_effective >= T::zero() && rho_effective <= T::one()) {
        return Err(Error::InvalidParam {
            name: "rho_effective",
            reason: "must lie in [0, 1]".into(),
        });
    }
    for c in categories {
        check_category(input, c)?;
    }
    Ok(choice_order(input, categories, params.alpha)
        .into_iter()
        .find(|&(j, _)| match_unchecked(input, &categories[j]) >= rho_effective)
        .map(|(j, _)| j))
}
