use fuzzy_artmap::{
    category_subsethood, choice, complement_code, fuzzy_and, learn, match_degree, norm1, Category,
    Label,
};
use proptest::prelude::*;

fn unit_vec(max_dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_dim)
}

fn pair(max_dim: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_dim).prop_flat_map(|m| {
        (
            prop::collection::vec(0.0f64..=1.0, m),
            prop::collection::vec(0.0f64..=1.0, m),
        )
    })
}

proptest! {
    #[test]
    fn complement_norm_is_exactly_m(x in unit_vec(300)) {
        let i = complement_code(&x).unwrap();
        prop_assert_eq!(i.norm(), x.len() as f64);
        prop_assert_eq!(norm1(i.values()).unwrap(), x.len() as f64);
    }

    #[test]
    fn complement_norm_f32(x in prop::collection::vec(0.0f32..=1.0, 1..=300)) {
        prop_assert_eq!(complement_code(&x).unwrap().norm(), x.len() as f32);
    }

    #[test]
    fn fuzzy_and_is_a_lower_bound((a, b) in pair(40)) {
        let c = fuzzy_and(&a, &b).unwrap();
        for k in 0..a.len() {
            prop_assert!(c[k] <= a[k] && c[k] <= b[k]);
            prop_assert!(c[k] == a[k] || c[k] == b[k]);
        }
        prop_assert_eq!(fuzzy_and(&a, &a).unwrap(), a);
    }

    #[test]
    fn fast_learn_contains_the_input((x, y) in pair(50)) {
        let i = complement_code(&x).unwrap();
        let mut c = Category::from_input(&complement_code(&y).unwrap(), Label::from("a"));
        let before = c.weights().to_vec();
        learn(&i, &mut c, 1.0).unwrap();
        prop_assert_eq!(category_subsethood(&i, &c).unwrap(), 1.0);
        prop_assert!(c.weights().iter().zip(&before).all(|(w, b)| w <= b));
        // Equivalent statement through the match: the input scores |w| / |I|.
        prop_assert_eq!(match_degree(&i, &c).unwrap(), c.norm() / i.norm());
    }

    #[test]
    fn slow_learn_never_raises_weights((x, y) in pair(20), beta in 0.01f64..=1.0) {
        let i = complement_code(&x).unwrap();
        let mut c = Category::from_input(&complement_code(&y).unwrap(), Label::from("a"));
        let before = c.weights().to_vec();
        learn(&i, &mut c, beta).unwrap();
        prop_assert!(c.weights().iter().zip(&before).all(|(w, b)| w <= b));
    }

    #[test]
    fn choice_decreases_in_alpha((x, y) in pair(10), a in 1e-4f64..10.0, factor in 1.01f64..100.0) {
        let i = complement_code(&x).unwrap();
        let c = Category::from_input(&complement_code(&y).unwrap(), Label::from("a"));
        prop_assume!(norm1(&fuzzy_and(i.values(), c.weights()).unwrap()).unwrap() > 0.0);
        prop_assert!(choice(&i, &c, a * factor).unwrap() < choice(&i, &c, a).unwrap());
    }

    #[test]
    fn match_is_bounded((x, y) in pair(30)) {
        let i = complement_code(&x).unwrap();
        let c = Category::from_input(&complement_code(&y).unwrap(), Label::from("a"));
        let m = match_degree(&i, &c).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
        prop_assert_eq!(match_degree(&i, &Category::uncommitted(x.len(), Label::from("a"))).unwrap(), 1.0);
    }

    #[test]
    fn sparse_and_dense_coding_agree(dense in prop::collection::vec(prop_oneof![3 => Just(0.0f64), 1 => 0.0f64..=1.0], 1..200), y in unit_vec(1)) {
        let _ = y;
        let pairs: Vec<(usize, f64)> = dense.iter().copied().enumerate().filter(|p| p.1 != 0.0).collect();
        let sparse = fuzzy_artmap::art::complement_code_sparse(dense.len(), &pairs).unwrap();
        let full = complement_code(&dense).unwrap();
        prop_assert_eq!(&sparse, &full);
        let c = Category::from_input(&complement_code(&vec![0.3; dense.len()]).unwrap(), Label::from("a"));
        prop_assert_eq!(match_degree(&sparse, &c).unwrap().to_bits(), match_degree(&full, &c).unwrap().to_bits());
        let and = norm1(&fuzzy_and(full.values(), c.weights()).unwrap()).unwrap();
        prop_assert_eq!(match_degree(&sparse, &c).unwrap(), and / full.norm());
    }
}
