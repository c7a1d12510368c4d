//! Reading a trained model back out: categories as hyper-rectangles and as
//! quantized If-Then rules over tf-idf terms.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::art::{Category, Label};
use crate::artmap::ArtmapModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Axis-aligned box `[u, v]` spanned by a category.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperRectangle<T = f64> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub label: Label,
    pub category_index: usize,
}

impl<T: Scalar> HyperRectangle<T> {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `|R| = |v - u|`.
    pub fn size(&self) -> T {
        self.u
            .iter()
            .zip(&self.v)
            .fold(T::zero(), |acc, (&a, &b)| acc + (b - a))
    }

    pub fn contains(&self, x: &[T], tolerance: T) -> bool {
        x.len() == self.u.len()
            && x.iter()
                .zip(self.u.iter().zip(&self.v))
                .all(|(&xi, (&lo, &hi))| xi >= lo - tolerance && xi <= hi + tolerance)
    }

    pub fn midpoint(&self) -> Vec<T> {
        let two = T::one() + T::one();
        self.u
            .iter()
            .zip(&self.v)
            .map(|(&a, &b)| (a + b) / two)
            .collect()
    }
}

/// Serialisable form of a rectangle (always `f64`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangleRecord {
    pub label: Label,
    pub category_index: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl<T: Scalar> From<&HyperRectangle<T>> for RectangleRecord {
    fn from(r: &HyperRectangle<T>) -> Self {
        let f = |xs: &[T]| xs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        Self {
            label: r.label.clone(),
            category_index: r.category_index,
            u: f(&r.u),
            v: f(&r.v),
        }
    }
}

/// `u` is the first half of the weights, `v` is one minus the second half.
///
/// `1 - (1 - x)` can land an ulp below `x`, so corners that cross by no more
/// than a few ulps are snapped together; anything larger is reported as corruption.
pub fn category_to_rectangle<T: Scalar>(
    c: &Category<T>,
    index: usize,
) -> Result<HyperRectangle<T>> {
    let m = c.dim();
    let w = c.weights();
    let tolerance = T::epsilon() * T::lit(8.0);
    let u = w[..m].to_vec();
    let mut v: Vec<T> = w[m..].iter().map(|&x| T::one() - x).collect();
    for (i, (lo, hi)) in u.iter().zip(v.iter_mut()).enumerate() {
        if *lo > *hi {
            if *lo - *hi > tolerance {
                return Err(Error::Integrity {
                    category: index,
                    coord: i,
                    lower: lo.to_f64().unwrap_or(f64::NAN),
                    upper: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
            *hi = *lo;
        }
    }
    Ok(HyperRectangle {
        u,
        v,
        label: c.label.clone(),
        category_index: index,
    })
}

pub fn model_rectangles<T: Scalar>(model: &ArtmapModel<T>) -> Result<Vec<HyperRectangle<T>>> {
    model
        .categories()
        .iter()
        .enumerate()
        .map(|(j, c)| category_to_rectangle(c, j))
        .collect()
}

pub fn rectangles_to_json<T: Scalar>(rects: &[HyperRectangle<T>]) -> Result<String> {
    let records: Vec<RectangleRecord> = rects.iter().map(RectangleRecord::from).collect();
    Ok(serde_json::to_string_pretty(&records)?)
}

/// Three-level prevalence scale used in rule antecedents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Rarely,
    Somewhat,
    Highly,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Rarely => "rarely",
            Level::Somewhat => "somewhat",
            Level::Highly => "highly",
        })
    }
}

/// Tertile quantization of a value in `[0, 1]`.
pub fn quantize_level<T: Scalar>(x: T) -> Level {
    let third = T::one() / T::lit(3.0);
    if x < third {
        Level::Rarely
    } else if x < third + third {
        Level::Somewhat
    } else {
        Level::Highly
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Antecedent {
    pub feature: String,
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub label: Label,
    pub antecedents: Vec<Antecedent>,
}

impl Rule {
    /// Builds a rule with antecedents in alphabetical feature order.
    pub fn new(label: Label, mut antecedents: Vec<Antecedent>) -> Self {
        antecedents.sort_by(|a, b| a.feature.cmp(&b.feature));
        Self { label, antecedents }
    }
}

/// What the coordinates of a feature vector mean.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSpace {
    /// One named term per coordinate (tf-idf).
    Terms(Vec<String>),
    /// Dense embedding dimensions; no human-readable names.
    Embedding { dim: usize },
}

impl FeatureSpace {
    pub fn dim(&self) -> usize {
        match self {
            FeatureSpace::Terms(t) => t.len(),
            FeatureSpace::Embedding { dim } => *dim,
        }
    }
}

/// Per-coordinate median over a set of feature vectors.
pub fn feature_medians(vectors: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let mut column = Vec::with_capacity(vectors.len());
    (0..first.len())
        .map(|i| {
            column.clear();
            column.extend(vectors.iter().map(|v| v[i]));
            crate::stats::median(&mut column)
        })
        .collect()
}

/// Turns a category into an If-Then rule.
///
/// Each feature's prevalence is the box midpoint `(u + v) / 2`, quantized to a
/// [`Level`]. With `max_antecedents = Some(n)`, the rule keeps the `n` features
/// whose midpoint deviates most from `medians` plus every `highly` feature;
/// `None` keeps all features.
pub fn category_to_rule<T: Scalar>(
    c: &Category<T>,
    index: usize,
    space: &FeatureSpace,
    medians: &[f64],
    max_antecedents: Option<usize>,
) -> Result<Rule> {
    let names = match space {
        FeatureSpace::Terms(names) => names,
        FeatureSpace::Embedding { .. } => {
            return Err(Error::Unsupported(
                "rules need named features; embedding dimensions have no term to name, \
                 export hyper-rectangles instead"
                    .into(),
            ))
        }
    };
    if names.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            actual: names.len(),
        });
    }
    if max_antecedents.is_some() && medians.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            actual: medians.len(),
        });
    }
    let rect = category_to_rectangle(c, index)?;
    let mids: Vec<f64> = rect
        .midpoint()
        .into_iter()
        .map(|x| x.to_f64().unwrap_or(f64::NAN))
        .collect();

    let mut keep: Vec<usize> = match max_antecedents {
        None => (0..mids.len()).collect(),
        Some(n) => {
            let mut by_dev: Vec<usize> = (0..mids.len()).collect();
            by_dev.sort_by(|&a, &b| {
                let da = (mids[a] - medians[a]).abs();
                let db = (mids[b] - medians[b]).abs();
                db.total_cmp(&da).then_with(|| names[a].cmp(&names[b]))
            });
            let mut keep: Vec<usize> = by_dev.into_iter().take(n).collect();
            for (i, &m) in mids.iter().enumerate() {
                if quantize_level(m) == Level::Highly && !keep.contains(&i) {
                    keep.push(i);
                }
            }
            keep
        }
    };
    keep.sort_unstable();
    let antecedents = keep
        .into_iter()
        .map(|i| Antecedent {
            feature: names[i].clone(),
            level: quantize_level(mids[i]),
        })
        .collect();
    Ok(Rule::new(rect.label, antecedents))
}

/// Rules for every category carrying `label`, in category order.
pub fn rules_for_label<T: Scalar>(
    model: &ArtmapModel<T>,
    label: &Label,
    space: &FeatureSpace,
    medians: &[f64],
    max_antecedents: Option<usize>,
) -> Result<Vec<Rule>> {
    model
        .categories()
        .iter()
        .enumerate()
        .filter(|(_, c)| &c.label == label)
        .map(|(j, c)| category_to_rule(c, j, space, medians, max_antecedents))
        .collect()
}

fn heading(label: &Label) -> String {
    let mut chars = label.as_str().chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Text layout: `Document is <Label>` followed by `IF ...` / `and ...` lines.
/// Rules are separated by a blank line.
pub fn render_rules_text(rules: &[Rule]) -> Result<String> {
    if rules.is_empty() {
        return Err(Error::Empty("rule set"));
    }
    let mut out = String::new();
    for (k, rule) in rules.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&format!("Document is {}\n", heading(&rule.label)));
        for (i, a) in rule.antecedents.iter().enumerate() {
            let lead = if i == 0 { "IF" } else { "and" };
            out.push_str(&format!(
                "{lead} {} is {} prevalent in document\n",
                a.feature, a.level
            ));
        }
    }
    Ok(out)
}

pub fn render_rules_json(rules: &[Rule]) -> Result<String> {
    if rules.is_empty() {
        return Err(Error::Empty("rule set"));
    }
    Ok(serde_json::to_string_pretty(rules)?)
}

pub fn rules_from_json(json: &str) -> Result<Vec<Rule>> {
    Ok(serde_json::from_str(json)?)
}
