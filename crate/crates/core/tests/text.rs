use parroteval_core::text::{normalize, stem, stem_str, tokenize};
use parroteval_core::{Token, TokenSeq};
use proptest::prelude::*;

const PORTER_VOCAB: &str = include_str!("fixtures/porter_vocab.txt");

fn vocab() -> impl Iterator<Item = (&'static str, &'static str, &'static str)> {
    PORTER_VOCAB.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).map(|l| {
        let mut parts = l.split_whitespace();
        let word = parts.next().unwrap();
        let stemmed = parts.next().unwrap();
        let restemmed = parts.next().unwrap();
        (word, stemmed, restemmed)
    })
}

#[test]
fn porter_matches_fixture() {
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (word, expected, _) in vocab() {
        total += 1;
        let got = stem_str(word).unwrap();
        if got != expected {
            mismatches.push(format!("{word}: got {got}, want {expected}"));
        }
    }
    assert!(total > 1500);
    assert!(mismatches.is_empty(), "{} mismatches:\n{}", mismatches.len(), mismatches.join("\n"));
}

#[test]
fn porter_second_pass_matches_fixture() {
    for (_, stemmed, restemmed) in vocab() {
        assert_eq!(stem_str(stemmed).unwrap(), restemmed, "restem of {stemmed}");
    }
}

#[test]
fn porter_is_not_idempotent_in_general() {
    let unstable: Vec<_> = vocab().filter(|(_, s, r)| s != r).collect();
    assert!(unstable.iter().any(|&(w, _, _)| w == "agreed"));
    assert_eq!(stem_str("agre").as_deref(), Some("agr"));
}

#[test]
fn stem_examples() {
    let t = |s: &str| Token::new(s).unwrap();
    assert_eq!(stem(&t("running")), t("run"));
    assert_eq!(stem(&t("cats")), t("cat"));
    assert_eq!(stem(&t("?")), t("?"));
    assert_eq!(stem(&t("'s")), t("'s"));
    assert_eq!(stem(&t("oov3")), t("oov3"));
}

#[test]
fn tokenize_examples() {
    let words = |s: &str| tokenize(s).iter().map(|t| t.as_str().to_owned()).collect::<Vec<_>>();
    assert_eq!(words("what would happen?"), ["what", "would", "happen", "?"]);
    assert_eq!(words("i 'm able to pass a urine test ?"), ["i", "'m", "able", "to", "pass", "a", "urine", "test", "?"]);
    assert_eq!(words("a,b"), ["a", ",", "b"]);
    assert_eq!(words("i'm"), ["i", "'m"]);
    assert_eq!(words("don't"), ["do", "n't"]);
    assert_eq!(normalize("  Hello\tWORLD "), "hello world");
    assert_eq!(normalize("Cafe\u{301}"), "caf\u{e9}");
}

#[rustfmt::skip]
const PIECES: &[&str] = &[
    "a", "B", "cat", "Don't", "i'm", "'", "n't", "?", ".", ",", "(", ")", "[", "]", "\"", ";", ":", "!",
    " ", "  ", "\t", "\n", "é", "e\u{301}", "Ünïcödé", "x'y", "''", "rock'n'roll", "can't", "1'", "'s",
];

fn messy_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(PIECES), 0..24).prop_map(|v| v.concat())
}

proptest! {
    #[test]
    fn tokens_are_nonempty_and_whitespace_free(s in prop_oneof![messy_text(), any::<String>()]) {
        for token in tokenize(&normalize(&s)).iter() {
            prop_assert!(!token.as_str().is_empty());
            prop_assert!(!token.as_str().chars().any(char::is_whitespace));
        }
    }

    #[test]
    fn tokenize_is_deterministic(s in messy_text()) {
        let n = normalize(&s);
        prop_assert_eq!(tokenize(&n), tokenize(&n.clone()));
    }

    #[test]
    fn join_then_tokenize_round_trips(s in messy_text()) {
        let tokens = TokenSeq::parse(&s);
        prop_assert_eq!(tokenize(&tokens.join()), tokens);
    }

    #[test]
    fn normalize_is_idempotent(s in any::<String>()) {
        let once = normalize(&s);
        prop_assert_eq!(normalize(&once), once);
    }
}
