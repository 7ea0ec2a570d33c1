//! Whitespace tokenization with byte offsets.

use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("text is empty")]
pub struct EmptyText;

/// A token and its byte offset in the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    pub start: usize,
}

impl Token<'_> {
    pub fn end(&self) -> usize {
        self.start + self.text.len()
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    /// True when the token holds at least one letter.
    pub fn is_content(&self) -> bool {
        self.text.chars().any(char::is_alphabetic)
    }
}

fn is_terminal_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '\u{0964}' // devanagari danda
                | '\u{0965}'
                | '\u{0DF4}' // sinhala kunddaliya
                | '\u{3001}'
                | '\u{3002}'
                | '\u{FF01}'
                | '\u{FF0C}'
                | '\u{FF1A}'
                | '\u{FF1B}'
                | '\u{FF1F}'
                | '\u{2026}'
                | '\u{2018}'
                | '\u{2019}'
                | '\u{201C}'
                | '\u{201D}'
                | '\u{00AB}'
                | '\u{00BB}'
                | '\u{060C}' // arabic comma
                | '\u{061F}'
        )
}

/// Splits on whitespace and strips trailing punctuation from each token.
/// Tokens made only of punctuation are dropped.
pub fn tokenize_target(text: &str) -> Result<Vec<Token<'_>>, EmptyText> {
    if text.trim().is_empty() {
        return Err(EmptyText);
    }
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                let piece = text[s..i].trim_end_matches(is_terminal_punctuation);
                if !piece.is_empty() {
                    tokens.push(Token { text: piece, start: s });
                }
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    Ok(tokens)
}

/// Lowercased source-side words with surrounding ASCII punctuation removed.
pub fn source_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| c.is_ascii_punctuation() && c != '\'')
                .trim_matches('\'')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

pub fn nfc(text: &str) -> String {
    text.nfc().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinhala_sentence_has_four_tokens() {
        let toks = tokenize_target("ළමයි උද්‍යානයේ සෙල්ලම් කරනවා").unwrap();
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[3].text, "කරනවා");
    }

    #[test]
    fn trailing_punctuation_is_stripped() {
        let toks = tokenize_target("a b.").unwrap();
        let words: Vec<_> = toks.iter().map(|t| t.text).collect();
        assert_eq!(words, ["a", "b"]);
        assert_eq!(toks[1].start, 2);
    }

    #[test]
    fn blank_text_is_an_error() {
        assert_eq!(tokenize_target("   "), Err(EmptyText));
        assert_eq!(tokenize_target(""), Err(EmptyText));
    }

    #[test]
    fn punctuation_only_tokens_are_dropped() {
        let toks = tokenize_target("x ... y?!").unwrap();
        let words: Vec<_> = toks.iter().map(|t| t.text).collect();
        assert_eq!(words, ["x", "y"]);
    }

    #[test]
    fn offsets_point_into_text() {
        let text = "  ඔබ  යනවා.  ";
        for t in tokenize_target(text).unwrap() {
            assert_eq!(&text[t.start..t.end()], t.text);
        }
    }

    #[test]
    fn source_words_lowercase_and_trim() {
        assert_eq!(
            source_words("The children don't play, \"today\"."),
            ["the", "children", "don't", "play", "today"]
        );
    }
}
