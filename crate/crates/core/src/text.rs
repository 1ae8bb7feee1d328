//! Text normalization, tokenization and stemming.
//!
//! Every metric consumes [`TokenSeq`] values produced by
//! `tokenize(&normalize(raw))`. The scheme is lowercase + NFC + whitespace
//! collapse, followed by whitespace splitting with punctuation detached and
//! English contraction suffixes (`'m`, `'s`, `n't`, ...) split off.

mod porter;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use unicode_normalization::UnicodeNormalization;

pub use porter::stem_str;

/// Characters detached from words as standalone tokens. The apostrophe is
/// handled separately so contraction suffixes stay attached to it.
const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '(', ')', '[', ']'];

/// A single non-empty, whitespace-free token.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Token(String);

impl Token {
    /// Returns `None` for empty surfaces or surfaces containing whitespace.
    pub fn new(surface: impl Into<String>) -> Option<Self> {
        let surface = surface.into();
        if surface.is_empty() || surface.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Token(surface))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Porter stem of this token; non-alphabetic tokens come back unchanged.
    pub fn stem(&self) -> Token {
        stem(self)
    }
}

impl fmt::Debug for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Token {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// An ordered sequence of tokens: one sentence as the metrics see it.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct TokenSeq(Vec<Token>);

impl TokenSeq {
    pub fn new(tokens: Vec<Token>) -> Self {
        TokenSeq(tokens)
    }

    /// `tokenize(&normalize(raw))`.
    pub fn parse(raw: &str) -> Self {
        tokenize(&normalize(raw))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }

    /// Tokens joined by single spaces. `tokenize` of the result gives back
    /// an equal sequence.
    pub fn join(&self) -> String {
        let mut out = String::new();
        for (i, token) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(token);
        }
        out
    }
}

impl Deref for TokenSeq {
    type Target = [Token];

    fn deref(&self) -> &[Token] {
        &self.0
    }
}

impl fmt::Debug for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join())
    }
}

impl FromIterator<Token> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().collect())
    }
}

impl<'a> From<&'a TokenSeq> for Vec<&'a str> {
    fn from(seq: &'a TokenSeq) -> Self {
        seq.iter().map(Token::as_str).collect()
    }
}

/// Lowercase, NFC-normalize, collapse whitespace runs and trim.
pub fn normalize(raw: &str) -> String {
    let lowered: String = raw.to_lowercase().nfc().collect();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Split normalized text into tokens.
pub fn tokenize(text: &str) -> TokenSeq {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    TokenSeq(tokens)
}

fn split_chunk(chunk: &str, out: &mut Vec<Token>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut current = String::new();
    let flush = |current: &mut String, out: &mut Vec<Token>| {
        if !current.is_empty() {
            out.push(Token(core::mem::take(current)));
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if PUNCTUATION.contains(&c) {
            flush(&mut current, out);
            out.push(Token(c.to_string()));
        } else if c == '\'' {
            let next = chars.get(i + 1).copied();
            if next.is_some_and(char::is_alphanumeric) {
                // "n't": the suffix takes the n with it, as in "do n't".
                let after = chars.get(i + 2).copied();
                let negation = next == Some('t')
                    && current.ends_with('n')
                    && !after.is_some_and(|a| a.is_alphanumeric() || a == '\'');
                if negation {
                    if current.len() > 1 {
                        current.pop();
                        flush(&mut current, out);
                        current.push('n');
                    }
                } else {
                    flush(&mut current, out);
                }
                current.push('\'');
            } else {
                flush(&mut current, out);
                out.push(Token("'".to_string()));
            }
        } else {
            current.push(c);
        }
        i += 1;
    }
    flush(&mut current, out);
}

/// Porter-stem a token. Tokens with any non-alphabetic character pass
/// through unchanged.
pub fn stem(token: &Token) -> Token {
    match stem_str(token.as_str()) {
        Some(stemmed) => Token(stemmed),
        None => token.clone(),
    }
}
