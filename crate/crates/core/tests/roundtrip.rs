mod common;

use common::{sample, shape_classes};
use msplab::format::SyntaxCode;
use msplab::lab::gen_ugraph;
use msplab::{parse_instance, parse_ugraph, serialize_instance, serialize_ugraph, FormatError};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn instance_round_trip(class in 0usize..3, seed in any::<u64>()) {
        let g = sample(&shape_classes()[class].1, seed);
        let text = serialize_instance(&g);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn shuffled_lines_canonicalize(seed in any::<u64>(), rot in 0usize..1000) {
        let g = sample(&shape_classes()[1].1, seed);
        let text = serialize_instance(&g);
        let mut lines: Vec<&str> = text.lines().collect();
        // Keep the header and stage count in front; rotate everything else.
        let body = &mut lines[2..];
        let k = rot % body.len().max(1);
        body.rotate_left(k);
        let shuffled = lines.join("\n") + "\n";
        prop_assert_eq!(serialize_instance(&parse_instance(&shuffled).unwrap()), text);
    }

    #[test]
    fn ugraph_round_trip(n in 1u32..12, q in 0.0f64..=1.0, seed in any::<u64>()) {
        let ug = gen_ugraph(n, q, seed).unwrap();
        let text = serialize_ugraph(&ug);
        let back = parse_ugraph(&text).unwrap();
        prop_assert_eq!(&back, &ug);
        prop_assert_eq!(serialize_ugraph(&back), text);
    }
}

#[test]
fn empty_document_rejected() {
    for text in ["", "   \n# only a comment\n"] {
        match parse_instance(text) {
            Err(FormatError::Syntax { code, .. }) => assert_eq!(code, SyntaxCode::Empty),
            other => panic!("{other:?}"),
        }
    }
}
