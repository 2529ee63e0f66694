use acro_core::matcher::{discover_candidates, KeyMatcher, KeySet, MatchOptions};
use acro_core::oracle;
use proptest::prelude::*;

// A tiny alphabet makes overlaps, shared prefixes and boundary cases common.
fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b', 'A', 'B', 's', ' ', '_', '1', '-', 'é', 'É']), 0..40)
        .prop_map(|c| c.into_iter().collect())
}

fn keys() -> impl Strategy<Value = KeySet> {
    prop::collection::vec(
        prop::collection::vec(prop::sample::select(vec!['a', 'b', 'B', 's', ' ', 'é', '1']), 1..5)
            .prop_map(|c| c.into_iter().collect::<String>()),
        0..6,
    )
    .prop_map(KeySet::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn trie_agrees_with_brute_force(t in text(), k in keys(), plural in any::<bool>()) {
        let opts = MatchOptions { match_plural: plural };
        prop_assert_eq!(KeyMatcher::new(&k, opts).find(&t), oracle::matches(&t, &k, opts));
    }

    #[test]
    fn spans_are_ordered_disjoint_and_faithful(t in text(), k in keys()) {
        let chars: Vec<char> = t.chars().collect();
        let found = KeyMatcher::new(&k, MatchOptions::default()).find(&t);
        for w in found.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        for m in &found {
            let surface: String = chars[m.start..m.end].iter().collect();
            prop_assert_eq!(&surface, &m.surface);
            prop_assert!(k.contains(&m.surface));
            prop_assert_eq!(k.canonical(&m.surface), Some(m.key.as_str()));
        }
    }

    #[test]
    fn candidates_are_unknown_and_shaped(t in "[A-Z0-9a-z ,.]{0,60}") {
        let known = KeySet::new(["CPU", "AB"]);
        for c in discover_candidates(&t, &known) {
            prop_assert!(!known.contains(&c));
            prop_assert!((2..=6).contains(&c.chars().count()));
            prop_assert!(c.chars().filter(|c| c.is_ascii_uppercase()).count() >= 2);
        }
    }
}
