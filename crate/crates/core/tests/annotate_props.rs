mod common;

use acro_core::annotate::{annotate, is_wrapper, strip_annotations, AnnotationPolicy};
use acro_core::dom::{parse_html, Node};
use proptest::prelude::*;

fn wrappers_under_excluded(nodes: &[Node], excluded: bool, policy: &AnnotationPolicy) -> bool {
    nodes.iter().any(|n| match n {
        Node::Element(e) if is_wrapper(e) => excluded,
        Node::Element(e) => wrappers_under_excluded(
            &e.children,
            excluded || policy.excluded_ancestors().contains(&e.name),
            policy,
        ),
        _ => false,
    })
}

fn policies() -> impl Strategy<Value = AnnotationPolicy> {
    (any::<bool>(), any::<bool>()).prop_map(|(every, plural)| {
        let mut p = AnnotationPolicy::default();
        p.annotate_every_occurrence = every;
        p.match_options.match_plural = plural;
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn annotation_invariants(t in common::tree(), policy in policies()) {
        let terms = common::terms();
        let out = annotate(&t, &terms, &policy);

        // Visible text is unchanged.
        prop_assert_eq!(out.tree.concat_text(), t.concat_text());
        // Stripping gives back the input exactly.
        prop_assert_eq!(strip_annotations(&out.tree), t.clone());
        // Annotating again changes nothing.
        prop_assert_eq!(annotate(&out.tree, &terms, &policy).tree, out.tree.clone());
        // The serialized result reparses to the same tree.
        prop_assert_eq!(parse_html(&out.tree.to_html()).unwrap(), out.tree.clone());
        prop_assert!(!wrappers_under_excluded(&out.tree.children, false, &policy));
        if !policy.annotate_every_occurrence {
            prop_assert!(out.annotations.iter().all(|(_, n)| *n == 1));
        }
    }
}
