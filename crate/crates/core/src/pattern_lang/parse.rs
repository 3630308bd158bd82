use thiserror::Error;

use super::ast::Pattern;
use crate::matcher::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("empty pattern")]
    Empty,
    #[error("unexpected `{found}` at byte {offset}")]
    Unbalanced { offset: usize, found: char },
    #[error("`{open}` at byte {offset} is never closed")]
    Unclosed { offset: usize, open: char },
    #[error("empty set at byte {offset}")]
    EmptySet { offset: usize },
    #[error("`$` without a variable name at byte {offset}")]
    BareDollar { offset: usize },
    #[error("unterminated quote at byte {offset}")]
    UnterminatedQuote { offset: usize },
    #[error("empty quoted phrase at byte {offset}")]
    EmptyPhrase { offset: usize },
}

impl PatternError {
    pub fn offset(&self) -> usize {
        match *self {
            PatternError::Empty => 0,
            PatternError::Unbalanced { offset, .. }
            | PatternError::Unclosed { offset, .. }
            | PatternError::EmptySet { offset }
            | PatternError::BareDollar { offset }
            | PatternError::UnterminatedQuote { offset }
            | PatternError::EmptyPhrase { offset } => offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delim {
    Brace,
    Paren,
    Bracket,
}

impl Delim {
    fn open_char(self) -> char {
        match self {
            Delim::Brace => '{',
            Delim::Paren => '(',
            Delim::Bracket => '[',
        }
    }
}

#[derive(Debug)]
enum Lexeme {
    Open(Delim),
    Close(Delim, char),
    /// Quoted text; never spliced into an enclosing sequence.
    Phrase(Vec<String>),
    /// Unquoted run of text; spliced into an enclosing sequence.
    Chunk(Vec<String>),
    Var(String),
}

pub(crate) fn is_single_quote(c: char) -> bool {
    matches!(c, '\'' | '\u{2018}' | '\u{2019}')
}

pub(crate) fn is_double_quote(c: char) -> bool {
    matches!(c, '"' | '\u{201C}' | '\u{201D}')
}

pub(crate) fn is_special(c: char) -> bool {
    matches!(c, '{' | '}' | '(' | ')' | '[' | ']' | '$') || is_single_quote(c) || is_double_quote(c)
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(source: &str) -> Result<Vec<(usize, Lexeme)>, PatternError> {
    let mut out = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some(&(at, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '(' | '[' => {
                chars.next();
                let d = match c {
                    '{' => Delim::Brace,
                    '(' => Delim::Paren,
                    _ => Delim::Bracket,
                };
                out.push((at, Lexeme::Open(d)));
            }
            '}' | ')' | ']' => {
                chars.next();
                let d = match c {
                    '}' => Delim::Brace,
                    ')' => Delim::Paren,
                    _ => Delim::Bracket,
                };
                out.push((at, Lexeme::Close(d, c)));
            }
            '$' => {
                chars.next();
                let start = at + 1;
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
                if end == start {
                    return Err(PatternError::BareDollar { offset: at });
                }
                out.push((at, Lexeme::Var(source[start..end].to_string())));
            }
            c if is_single_quote(c) || is_double_quote(c) => {
                chars.next();
                let closes: fn(char) -> bool =
                    if is_single_quote(c) { is_single_quote } else { is_double_quote };
                let start = at + c.len_utf8();
                let mut end = None;
                for (i, c) in chars.by_ref() {
                    if closes(c) {
                        end = Some(i);
                        break;
                    }
                }
                let end = end.ok_or(PatternError::UnterminatedQuote { offset: at })?;
                let words: Vec<String> =
                    tokenize(&source[start..end]).into_iter().map(|t| t.surface).collect();
                if words.is_empty() {
                    return Err(PatternError::EmptyPhrase { offset: at });
                }
                out.push((at, Lexeme::Phrase(words)));
            }
            _ => {
                let mut end = at;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || is_special(c) {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
                let words = tokenize(&source[at..end]).into_iter().map(|t| t.surface).collect();
                out.push((at, Lexeme::Chunk(words)));
            }
        }
    }
    Ok(out)
}

fn phrase(words: Vec<String>) -> Pattern {
    if words.len() == 1 {
        Pattern::Literal(words.into_iter().next().unwrap_or_default())
    } else {
        Pattern::Seq(words.into_iter().map(Pattern::Literal).collect())
    }
}

struct Parser {
    lexemes: std::vec::IntoIter<(usize, Lexeme)>,
}

impl Parser {
    /// Parses elements until the matching close delimiter (or end of input
    /// when `open` is `None`). Inside sequences unquoted chunks are spliced
    /// token by token.
    fn items(&mut self, open: Option<(usize, Delim)>, splice: bool) -> Result<Vec<Pattern>, PatternError> {
        let mut items = Vec::new();
        while let Some((at, lexeme)) = self.lexemes.next() {
            match lexeme {
                Lexeme::Open(d) => items.push(self.group(at, d)?),
                Lexeme::Close(d, found) => {
                    return match open {
                        Some((_, o)) if o == d => Ok(items),
                        _ => Err(PatternError::Unbalanced { offset: at, found }),
                    };
                }
                Lexeme::Phrase(words) => items.push(phrase(words)),
                Lexeme::Chunk(words) if splice => items.extend(words.into_iter().map(Pattern::Literal)),
                Lexeme::Chunk(words) => items.push(phrase(words)),
                Lexeme::Var(name) => items.push(Pattern::Variable(name)),
            }
        }
        match open {
            Some((offset, d)) => Err(PatternError::Unclosed { offset, open: d.open_char() }),
            None => Ok(items),
        }
    }

    fn group(&mut self, at: usize, d: Delim) -> Result<Pattern, PatternError> {
        let items = self.items(Some((at, d)), d == Delim::Bracket)?;
        if items.is_empty() {
            return Err(PatternError::EmptySet { offset: at });
        }
        Ok(match d {
            Delim::Brace => Pattern::Any(items),
            Delim::Paren => Pattern::And(items),
            Delim::Bracket => Pattern::Seq(items),
        })
    }
}

/// Parses pattern notation.
///
/// Top-level elements form an implicit sequence; a single top-level element
/// is returned as is. Typographic quotes are accepted in place of ASCII
/// quotes.
pub fn parse_pattern(source: &str) -> Result<Pattern, PatternError> {
    let mut parser = Parser { lexemes: lex(source)?.into_iter() };
    let mut items = parser.items(None, true)?;
    match items.len() {
        0 => Err(PatternError::Empty),
        1 => Ok(items.remove(0)),
        _ => Ok(Pattern::Seq(items)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(s: &str) -> Pattern {
        Pattern::literal(s)
    }

    #[test]
    fn alternatives_of_phrases() {
        let p = parse_pattern("{'john doe' 'jane roe'}").unwrap();
        assert_eq!(
            p,
            Pattern::Any(vec![
                Pattern::Seq(vec![lit("john"), lit("doe")]),
                Pattern::Seq(vec![lit("jane"), lit("roe")]),
            ])
        );
    }

    #[test]
    fn single_token() {
        assert_eq!(parse_pattern("abc").unwrap(), lit("abc"));
        assert_eq!(parse_pattern("  abc  ").unwrap(), lit("abc"));
    }

    #[test]
    fn sanctions_pattern() {
        let p = parse_pattern(
            "{obama trump} {forced suggested} $organization to {impose implement apply} sanctions against $target",
        )
        .unwrap();
        let any = |xs: &[&str]| Pattern::Any(xs.iter().map(|s| lit(s)).collect());
        assert_eq!(
            p,
            Pattern::Seq(vec![
                any(&["obama", "trump"]),
                any(&["forced", "suggested"]),
                Pattern::var("organization"),
                lit("to"),
                any(&["impose", "implement", "apply"]),
                lit("sanctions"),
                lit("against"),
                Pattern::var("target"),
            ])
        );
    }

    #[test]
    fn nested_alternatives() {
        let p = parse_pattern("{{said told} {wrote printed}}").unwrap();
        assert_eq!(
            p,
            Pattern::Any(vec![
                Pattern::Any(vec![lit("said"), lit("told")]),
                Pattern::Any(vec![lit("wrote"), lit("printed")]),
            ])
        );
    }

    #[test]
    fn punctuation_is_literal() {
        let p = parse_pattern("On sale: $item, quantity $amount, prices $cost").unwrap();
        let Pattern::Seq(items) = p else { panic!("expected a sequence") };
        assert_eq!(items[1], lit("sale"));
        assert_eq!(items[2], lit(":"));
        assert_eq!(items[4], lit(","));
        assert_eq!(items.len(), 10);
    }

    #[test]
    fn curly_quotes_equal_ascii() {
        assert_eq!(
            parse_pattern("{\u{2018}john doe\u{2019} \u{2018}jane roe\u{2019}}").unwrap(),
            parse_pattern("{'john doe' 'jane roe'}").unwrap()
        );
        assert_eq!(parse_pattern("\u{201C}a b\u{201D}").unwrap(), parse_pattern("\"a b\"").unwrap());
    }

    #[test]
    fn chunk_inside_set_is_one_alternative() {
        let p = parse_pattern("{aigents.com x}").unwrap();
        assert_eq!(
            p,
            Pattern::Any(vec![Pattern::Seq(vec![lit("aigents"), lit("."), lit("com")]), lit("x")])
        );
    }

    #[test]
    fn quoted_dollar_is_literal() {
        assert_eq!(parse_pattern("'$' $cost").unwrap(), Pattern::Seq(vec![lit("$"), Pattern::var("cost")]));
    }

    #[test]
    fn and_set_and_explicit_seq() {
        assert_eq!(
            parse_pattern("(a [b c])").unwrap(),
            Pattern::And(vec![lit("a"), Pattern::Seq(vec![lit("b"), lit("c")])])
        );
        assert_eq!(parse_pattern("[x]").unwrap(), Pattern::Seq(vec![lit("x")]));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(parse_pattern("   "), Err(PatternError::Empty));
        assert_eq!(parse_pattern("a {b c"), Err(PatternError::Unclosed { offset: 2, open: '{' }));
        assert_eq!(parse_pattern("a b}"), Err(PatternError::Unbalanced { offset: 3, found: '}' }));
        assert_eq!(parse_pattern("{a (b})"), Err(PatternError::Unbalanced { offset: 5, found: '}' }));
        assert_eq!(parse_pattern("x {}"), Err(PatternError::EmptySet { offset: 2 }));
        assert_eq!(parse_pattern("pay $ now"), Err(PatternError::BareDollar { offset: 4 }));
        assert_eq!(parse_pattern("'open"), Err(PatternError::UnterminatedQuote { offset: 0 }));
        assert_eq!(parse_pattern("a ''"), Err(PatternError::EmptyPhrase { offset: 2 }));
        assert_eq!(PatternError::BareDollar { offset: 4 }.offset(), 4);
    }
}
