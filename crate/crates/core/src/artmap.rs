//! Supervised Fuzzy ARTMAP: categories mapped to labels, match tracking on
//! predictive mismatch, and prediction scored by fuzzy subsethood.

use std::io::{BufRead, Write};

use crate::art::{
    self, choice_order, complement_code, learn_unchecked, match_unchecked, ArtParams, Category,
    ComplementCoded, Label,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MODEL_HEADER: &str = "fuzzy-artmap-model";
const MODEL_VERSION: u32 = 1;

/// Winning category for an input, with the input's subsethood in that category.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction<T = f64> {
    pub label: Label,
    pub score: T,
    pub category_index: usize,
}

/// What `train_one` did with an example.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingReport<T = f64> {
    pub category_index: usize,
    pub created: bool,
    /// Vigilance in force when the example was finally coded.
    pub final_vigilance: T,
    /// Categories examined, plus one when a new category had to be committed.
    pub search_rounds: usize,
}

/// A Fuzzy ARTMAP network. Category order is creation order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtmapModel<T = f64> {
    dim: usize,
    params: ArtParams<T>,
    categories: Vec<Category<T>>,
}

impl<T: Scalar> ArtmapModel<T> {
    pub fn new(dim: usize, params: ArtParams<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("model dimension"));
        }
        params.validate()?;
        Ok(Self {
            dim,
            params,
            categories: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &ArtParams<T> {
        &self.params
    }

    pub fn categories(&self) -> &[Category<T>] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    /// Distinct labels in order of first appearance.
    pub fn labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = Vec::new();
        for c in &self.categories {
            if !out.contains(&c.label) {
                out.push(c.label.clone());
            }
        }
        out
    }

    fn encode(&self, x: &[T]) -> Result<ComplementCoded<T>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        complement_code(x)
    }

    /// Presents one labelled example.
    ///
    /// Categories are visited by descending choice. A category passing vigilance
    /// with the wrong label raises the vigilance to its match plus epsilon and the
    /// search continues; when nothing passes, a new category is committed with
    /// `w = I`.
    pub fn train_one(&mut self, x: &[T], label: impl Into<Label>) -> Result<CodingReport<T>> {
        let input = self.encode(x)?;
        Ok(self.train_coded(&input, label.into()))
    }

    /// [`train_one`](Self::train_one) for an input that is already complement coded.
    pub fn train_encoded(
        &mut self,
        input: &ComplementCoded<T>,
        label: Label,
    ) -> Result<CodingReport<T>> {
        self.check_encoded(input)?;
        Ok(self.train_coded(input, label))
    }

    fn check_encoded(&self, input: &ComplementCoded<T>) -> Result<()> {
        if input.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: input.dim(),
            });
        }
        Ok(())
    }

    fn train_coded(&mut self, input: &ComplementCoded<T>, label: Label) -> CodingReport<T> {
        let mut rho = self.params.rho;
        let mut rounds = 0;
        for (j, _) in choice_order(input, &self.categories, self.params.alpha) {
            rounds += 1;
            let m = match_unchecked(input, &self.categories[j]);
            if m < rho {
                continue;
            }
            if self.categories[j].label == label {
                learn_unchecked(input, &mut self.categories[j], self.params.beta);
                return CodingReport {
                    category_index: j,
                    created: false,
                    final_vigilance: rho,
                    search_rounds: rounds,
                };
            }
            // Match tracking. Every category already passed over has match below
            // the new threshold, so continuing down the ranking is a re-search.
            rho = m + self.params.epsilon;
        }
        self.categories.push(Category::from_input(input, label));
        CodingReport {
            category_index: self.categories.len() - 1,
            created: true,
            final_vigilance: rho,
            search_rounds: rounds + 1,
        }
    }

    /// Presents examples once, in order.
    pub fn train_batch<'a, L>(
        &mut self,
        examples: impl IntoIterator<Item = (&'a [T], L)>,
    ) -> Result<()>
    where
        L: Into<Label>,
    {
        for (x, label) in examples {
            self.train_one(x, label)?;
        }
        Ok(())
    }

    /// Label of the highest-choice category (no vigilance gate) and the input's
    /// subsethood in it.
    pub fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        let input = self.encode(x)?;
        self.predict_coded(&input)
    }

    /// [`predict`](Self::predict) for an input that is already complement coded.
    pub fn predict_encoded(&self, input: &ComplementCoded<T>) -> Result<Prediction<T>> {
        self.check_encoded(input)?;
        self.predict_coded(input)
    }

    fn predict_coded(&self, input: &ComplementCoded<T>) -> Result<Prediction<T>> {
        let mut best: Option<(usize, T)> = None;
        for (j, c) in self.categories.iter().enumerate() {
            let t = art::choice_unchecked(input, c, self.params.alpha);
            // Strict comparison keeps the earliest category on ties.
            if best.is_none_or(|(_, bt)| t > bt) {
                best = Some((j, t));
            }
        }
        let (j, _) = best.ok_or(Error::EmptyModel)?;
        let c = &self.categories[j];
        Ok(Prediction {
            label: c.label.clone(),
            score: match_unchecked(input, c),
            category_index: j,
        })
    }

    /// Writes the model as versioned text. Weights use 17 significant digits.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{MODEL_HEADER} v{MODEL_VERSION}")?;
        writeln!(w, "dimension {}", self.dim)?;
        writeln!(w, "rho {:.16e}", self.params.rho)?;
        writeln!(w, "beta {:.16e}", self.params.beta)?;
        writeln!(w, "alpha {:.16e}", self.params.alpha)?;
        writeln!(w, "epsilon {:.16e}", self.params.epsilon)?;
        writeln!(w, "categories {}", self.categories.len())?;
        for c in &self.categories {
            write!(
                w,
                "{} {}",
                serde_json::to_string(c.label.as_str())?,
                c.count
            )?;
            for v in c.weights() {
                write!(w, " {v:.16e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, Ok(l))) => Ok((n, l)),
                Some((_, Err(e))) => Err(e.into()),
                None => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected end of file, expected {what}"),
                }),
            }
        };

        let (n, head) = next("header")?;
        if head.trim() != format!("{MODEL_HEADER} v{MODEL_VERSION}") {
            return Err(Error::Parse {
                line: n,
                msg: format!("unrecognised header `{head}`"),
            });
        }
        let dim: usize = keyed(next("dimension")?, "dimension")?;
        let params = ArtParams {
            rho: keyed(next("rho")?, "rho")?,
            beta: keyed(next("beta")?, "beta")?,
            alpha: keyed(next("alpha")?, "alpha")?,
            epsilon: keyed(next("epsilon")?, "epsilon")?,
        };
        let count: usize = keyed(next("categories")?, "categories")?;
        let mut model = Self::new(dim, params)?;
        for _ in 0..count {
            let (n, line) = next("category")?;
            model.categories.push(parse_category(n, &line, dim)?);
        }
        Ok(model)
    }
}

fn keyed<V: std::str::FromStr>((n, line): (usize, String), key: &str) -> Result<V> {
    let mut parts = line.split_whitespace();
    let bad = |msg: String| Error::Parse { line: n, msg };
    if parts.next() != Some(key) {
        return Err(bad(format!("expected `{key}`")));
    }
    let value = parts
        .next()
        .ok_or_else(|| bad(format!("missing value for `{key}`")))?;
    value
        .parse()
        .map_err(|_| bad(format!("invalid value `{value}` for `{key}`")))
}

fn parse_category<T: Scalar>(n: usize, line: &str, dim: usize) -> Result<Category<T>> {
    let bad = |msg: String| Error::Parse { line: n, msg };
    let mut de = serde_json::Deserializer::from_str(line).into_iter::<String>();
    let label = match de.next() {
        Some(Ok(l)) => l,
        _ => return Err(bad("expected a quoted label".into())),
    };
    let rest = &line[de.byte_offset()..];
    let mut fields = rest.split_whitespace();
    let count: u64 = fields
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("invalid coding count".into()))?;
    let weights = fields
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| bad(format!("invalid weight `{s}`")))
        })
        .collect::<Result<Vec<T>>>()?;
    if weights.len() != 2 * dim {
        return Err(bad(format!(
            "expected {} weights, found {}",
            2 * dim,
            weights.len()
        )));
    }
    Category::from_weights(weights, Label(label), count).map_err(|e| bad(e.to_string()))
}

/// Fuzzy subsethood of the input in the category, `|I ∧ w| / |I|`.
pub fn subsethood<T: Scalar>(input: &ComplementCoded<T>, c: &Category<T>) -> Result<T> {
    art::match_degree(input, c)
}
