use proptest::prelude::*;
use scenario_core::{extract_events, parse_definitions, Document, Graph, ThingKind};

const WORDS: [&str; 6] = ["bell", "rings", "the", "door", "opens", "Bell"];

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 0..12).prop_map(|w| w.join(" "))
}

fn events(defs: &str, text: &str) -> Vec<(Option<String>, String)> {
    let defs = parse_definitions(defs).unwrap();
    let mut g = Graph::new();
    extract_events(&defs, &Document::new(0, "test", text), &mut g).unwrap();
    let mut out: Vec<_> = g
        .things_of_kind(ThingKind::Event)
        .into_iter()
        .map(|e| {
            let matched = g.property(e, "matched").map(|v| format!("{v:?}")).unwrap_or_default();
            (g.name_of(e).map(str::to_string), matched)
        })
        .collect();
    out.sort();
    out
}

proptest! {
    // Counted independently of the matcher: one event per case-insensitive
    // occurrence of the single-word pattern.
    #[test]
    fn single_word_events_match_occurrence_count(text in sentence()) {
        let expected = text.split_whitespace().filter(|w| w.eq_ignore_ascii_case("bell")).count();
        prop_assert_eq!(events("There name bell.", &text).len(), expected);
    }

    #[test]
    fn implicit_pattern_equals_explicit_name(text in sentence()) {
        prop_assert_eq!(events("There name door.", &text), events("There name door patterns \"door\".", &text));
    }

    #[test]
    fn two_word_pattern_counts_adjacent_pairs(text in sentence()) {
        let words: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
        let expected = words.windows(2).filter(|w| w[0] == "door" && w[1] == "opens").count();
        prop_assert_eq!(events("There name opening patterns \"door opens\".", &text).len(), expected);
    }
}
