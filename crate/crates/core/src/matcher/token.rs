use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenClass {
    Word,
    Number,
    Punct,
}

/// One lexical unit of a text. `span` is the byte range in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub norm: String,
    pub class: TokenClass,
    pub span: (usize, usize),
}

impl Token {
    fn new(source: &str, start: usize, end: usize, class: TokenClass) -> Self {
        let surface = source[start..end].to_string();
        let norm = surface.to_lowercase();
        Token { surface, norm, class, span: (start, end) }
    }
}

/// Splits text into word, number and punctuation tokens.
///
/// Letters group into words, digits group into numbers (a single `.` between
/// digits stays inside the number), every other non-space character is a
/// token on its own.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_alphabetic() {
                i += 1;
            }
            tokens.push(Token::new(text, byte_at(start), byte_at(i), TokenClass::Word));
        } else if c.is_ascii_digit() {
            let start = i;
            let mut seen_dot = false;
            while i < chars.len() {
                let c = chars[i].1;
                if c.is_ascii_digit() {
                    i += 1;
                } else if c == '.'
                    && !seen_dot
                    && chars.get(i + 1).is_some_and(|&(_, n)| n.is_ascii_digit())
                {
                    seen_dot = true;
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token::new(text, byte_at(start), byte_at(i), TokenClass::Number));
        } else {
            tokens.push(Token::new(text, byte_at(i), byte_at(i + 1), TokenClass::Punct));
            i += 1;
        }
    }
    tokens
}

/// Rebuilds the source text covered by consecutive tokens, keeping a single
/// space wherever the source had a gap.
pub fn surface_of(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (k, t) in tokens.iter().enumerate() {
        if k > 0 && tokens[k - 1].span.1 < t.span.0 {
            out.push(' ');
        }
        out.push_str(&t.surface);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.norm).collect()
    }

    #[test]
    fn sentence_with_final_period() {
        assert_eq!(norms("Obama forced the EU."), ["obama", "forced", "the", "eu", "."]);
    }

    #[test]
    fn price_keeps_decimal_inside_number() {
        let toks = tokenize("prices $3.50");
        let got: Vec<_> = toks.iter().map(|t| (t.norm.as_str(), t.class)).collect();
        assert_eq!(
            got,
            [("prices", TokenClass::Word), ("$", TokenClass::Punct), ("3.50", TokenClass::Number)]
        );
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n\t").is_empty());
    }

    #[test]
    fn web_address_is_three_tokens() {
        assert_eq!(norms("aigents.com"), ["aigents", ".", "com"]);
    }

    #[test]
    fn dots_between_digits() {
        assert_eq!(norms("1.2.3"), ["1.2", ".", "3"]);
        assert_eq!(norms("3."), ["3", "."]);
        assert_eq!(norms("v2.0"), ["v", "2.0"]);
    }

    #[test]
    fn spans_are_byte_ranges() {
        let toks = tokenize("héllo, wörld");
        assert_eq!(toks[0].span, (0, 6));
        assert_eq!(toks[1].surface, ",");
        assert_eq!(&"héllo, wörld"[toks[2].span.0..toks[2].span.1], "wörld");
    }

    #[test]
    fn surface_rebuild() {
        let toks = tokenize("the  p17 walks");
        assert_eq!(surface_of(&toks), "the p17 walks");
        assert_eq!(surface_of(&toks[1..3]), "p17");
    }
}
