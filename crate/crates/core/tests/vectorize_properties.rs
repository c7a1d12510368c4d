use fuzzy_artmap::vectorize::{
    fit_tfidf, stratified_downsample, Corpus, Document, EmbeddingTable, EmbeddingVectorizer,
    FeatureMatrix,
};
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "drive", "scsi", "ide", "bus", "card", "orbit", "moon", "nasa", "the", "and", "x1",
];

fn corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(
        (prop::collection::vec(0..WORDS.len(), 0..25), any::<bool>()),
        1..30,
    )
    .prop_map(|docs| {
        Corpus::new(
            docs.into_iter()
                .enumerate()
                .map(|(i, (words, hw))| Document {
                    id: format!("d{i}"),
                    text: words
                        .iter()
                        .map(|&w| WORDS[w])
                        .collect::<Vec<_>>()
                        .join(" "),
                    topics: if hw { vec!["hw".into()] } else { vec![] },
                })
                .collect(),
        )
        .unwrap()
    })
}

fn tfidf_matrix(c: &Corpus, max: usize) -> Option<FeatureMatrix> {
    let v = fit_tfidf(c, max).ok()?;
    let rows = c
        .documents()
        .iter()
        .map(|d| v.transform_sparse(&d.text))
        .collect();
    Some(FeatureMatrix::new(v.len(), rows, fuzzy_artmap::vectorize::Scaling::RowMax).unwrap())
}

proptest! {
    #[test]
    fn tfidf_rows_are_unit_scaled(c in corpus(), max in 1usize..12) {
        let Some(m) = tfidf_matrix(&c, max) else { return Ok(()) };
        prop_assert!(m.dim() <= max);
        for row in m.rows() {
            prop_assert!(row.values.iter().all(|v| *v > 0.0 && *v <= 1.0));
            if row.nnz() > 0 {
                prop_assert_eq!(row.values.iter().cloned().fold(0.0, f64::max), 1.0);
            }
        }
        prop_assert_eq!(tfidf_matrix(&c, max).unwrap(), m);
    }

    #[test]
    fn embeddings_land_in_the_unit_cube(c in corpus(), table in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), WORDS.len())) {
        let text: String = WORDS
            .iter()
            .zip(&table)
            .map(|(w, v)| format!("{w} {} {} {}\n", v[0], v[1], v[2]))
            .collect();
        let table = EmbeddingTable::from_reader(text.as_bytes()).unwrap();
        let texts = || c.documents().iter().map(|d| d.text.as_str());
        let m = EmbeddingVectorizer::fit(&table, texts()).transform_all(texts());
        prop_assert_eq!(m.len(), c.len());
        for i in 0..m.len() {
            prop_assert!(m.dense(i).iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn downsampling_is_deterministic_and_stratified(c in corpus(), f in 0.1f64..=1.0, seed: u64) {
        let a = stratified_downsample(&c, f, "hw", seed).unwrap();
        prop_assert_eq!(&a, &stratified_downsample(&c, f, "hw", seed).unwrap());
        let pos = c.relevance("hw").iter().filter(|&&r| r).count() as f64;
        let kept = a.relevance("hw").iter().filter(|&&r| r).count() as f64;
        prop_assert!((kept - f * pos).abs() <= 0.5 + 1e-9);
        let ids = c.ids();
        let mut last = None;
        for id in a.ids() {
            let at = ids.iter().position(|x| *x == id).unwrap();
            prop_assert!(last.is_none_or(|l| l < at));
            last = Some(at);
        }
    }
}

#[test]
fn matrix_file_round_trip() {
    let c = Corpus::new(vec![
        Document {
            id: "a".into(),
            text: "drive scsi drive".into(),
            topics: vec![],
        },
        Document {
            id: "b".into(),
            text: "orbit moon".into(),
            topics: vec![],
        },
        Document {
            id: "c".into(),
            text: "".into(),
            topics: vec![],
        },
    ])
    .unwrap();
    let m = tfidf_matrix(&c, 10).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.famx");
    m.write_to(std::fs::File::create(&path).unwrap()).unwrap();
    assert_eq!(
        FeatureMatrix::read_from(std::fs::File::open(&path).unwrap()).unwrap(),
        m
    );
}
