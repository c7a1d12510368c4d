use fuzzy_artmap::explain::{
    category_to_rectangle, category_to_rule, quantize_level, render_rules_json, render_rules_text,
    rules_from_json, FeatureSpace, Level,
};
use fuzzy_artmap::{complement_code, Category, Label, Model, Params};
use proptest::prelude::*;

proptest! {
    #[test]
    fn quantization_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(quantize_level(lo) <= quantize_level(hi));
    }

    #[test]
    fn point_category_is_a_degenerate_box(x in prop::collection::vec(0.0f64..=1.0, 1..20)) {
        let c = Category::from_input(&complement_code(&x).unwrap(), Label::from("a"));
        let r = category_to_rectangle(&c, 0).unwrap();
        prop_assert_eq!(&r.u, &x);
        for (v, x) in r.v.iter().zip(&x) {
            prop_assert!((v - x).abs() <= f64::EPSILON);
        }
        prop_assert!(r.size() <= x.len() as f64 * f64::EPSILON);
        prop_assert!(r.contains(&x, 1e-12));
    }

    #[test]
    fn rules_round_trip_through_json(points in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 4), 1..15)) {
        let mut model = Model::new(4, Params { rho: 0.5, ..Params::default() }).unwrap();
        for p in &points {
            model.train_one(p, "relevant").unwrap();
        }
        let names: Vec<String> = ["disk", "bus", "card", "moon"].iter().map(|s| s.to_string()).collect();
        let space = FeatureSpace::Terms(names);
        let rules: Vec<_> = model
            .categories()
            .iter()
            .enumerate()
            .map(|(j, c)| category_to_rule(c, j, &space, &[0.5; 4], None).unwrap())
            .collect();
        for r in &rules {
            prop_assert_eq!(r.antecedents.len(), 4);
            prop_assert!(r.antecedents.windows(2).all(|w| w[0].feature < w[1].feature));
        }
        let back = rules_from_json(&render_rules_json(&rules).unwrap()).unwrap();
        prop_assert_eq!(render_rules_text(&back).unwrap(), render_rules_text(&rules).unwrap());
    }
}

#[test]
fn every_level_is_reachable() {
    assert_eq!(quantize_level(0.0), Level::Rarely);
    assert_eq!(quantize_level(0.5), Level::Somewhat);
    assert_eq!(quantize_level(1.0), Level::Highly);
}
