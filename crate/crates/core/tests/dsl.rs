use convexsem::dsl::{load_lexicon, parse_lexicon, print_lexicon};
use convexsem::error::Error;
use convexsem::semantics::{evaluate_phrase, Meaning};
use proptest::prelude::*;

const HEADER: &str = "domain d continuous 2 [0,10] [0,10]\nspace N = d\n";

fn syntax_at(text: &str) -> (usize, usize) {
    match parse_lexicon(text) {
        Err(Error::Syntax { line, column, .. }) => (line, column),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn syntax_errors_carry_positions() {
    assert_eq!(syntax_at("domain d continuous 1 [0,1"), (1, 1));
    assert_eq!(syntax_at(&format!("{HEADER}noun a = [1,2]x[1,2] *")).0, 3);
    assert_eq!(syntax_at(&format!("{HEADER}noun = [1,2]")), (3, 6));
    assert_eq!(syntax_at("\n\n  space"), (3, 8));
}

#[test]
fn reversed_interval_is_rejected() {
    assert!(matches!(parse_lexicon(&format!("{HEADER}noun a = [2,1]x[0,1]")), Err(Error::Syntax { line: 3, .. })));
}

#[test]
fn unknown_names_fail_validation() {
    let err = parse_lexicon(&format!("{HEADER}noun a = [1,2]x[1,2]\nadj big diag huge\n")).unwrap_err();
    assert!(matches!(err, Error::Validation { ref entry, .. } if entry == "big"), "{err}");
    let err = parse_lexicon("space N = nowhere\n").unwrap_err();
    assert!(matches!(err, Error::Validation { .. } | Error::Syntax { .. }), "{err}");
}

#[test]
fn missing_file_is_an_error() {
    assert!(load_lexicon("/nonexistent/lexicon.lex").is_err());
}

#[test]
fn a_small_lexicon_evaluates() {
    let text = format!(
        "{HEADER}property warm on d box [6,10]x[0,10]\nnoun stone = [0,8]x[0,2]\nadj warm diag warm\n"
    );
    let lex = parse_lexicon(&text).unwrap();
    let r = evaluate_phrase(&lex, "warm stone", "n").unwrap();
    assert_eq!(r.to_string(), "[6,8]×[0,2]");
    assert!(matches!(lex.entry("warm").unwrap().meaning, Meaning::Diagonal(_)));
}

proptest! {
    #[test]
    fn print_parse_is_stable(cells in prop::collection::vec((0u8..=9, 0u8..=9, 0u8..=9, 0u8..=9), 1..4), half in any::<bool>()) {
        let mut text = HEADER.to_string();
        for (i, (a, b, c, e)) in cells.iter().enumerate() {
            let (lo1, hi1) = (a.min(b), a.max(b));
            let (lo2, hi2) = (c.min(e), c.max(e));
            let tail = if half { ".5" } else { "" };
            text.push_str(&format!("noun w{i} = [{lo1},{hi1}{tail}]x[{lo2},{hi2}]\n"));
        }
        text.push_str("noun all = hull(w0 w0)\n");
        let lex = parse_lexicon(&text).unwrap();
        let printed = print_lexicon(&lex);
        let again = parse_lexicon(&printed).unwrap();
        prop_assert_eq!(&again, &lex);
        prop_assert_eq!(print_lexicon(&again), printed);
    }
}
