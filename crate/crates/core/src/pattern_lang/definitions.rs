use thiserror::Error;

use super::ast::{list_variables, AtomicType, ThingDefinition, TypeRef};
use super::parse::{is_double_quote, is_single_quote, parse_pattern, PatternError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefinitionError {
    #[error("line {line}: unknown statement form")]
    UnknownStatement { line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid pattern: {source}")]
    Pattern { line: usize, source: PatternError },
    #[error("line {line}: unknown type `{name}`")]
    UnknownType { line: usize, name: String },
    #[error("line {line}: role `{role}` is not declared in any `has` list")]
    UndeclaredRole { line: usize, role: String },
    #[error("line {line}: composite type of role `{role}` must not contain variables")]
    VariableInType { line: usize, role: String },
}

impl DefinitionError {
    pub fn line(&self) -> usize {
        match self {
            DefinitionError::UnknownStatement { line }
            | DefinitionError::Syntax { line, .. }
            | DefinitionError::Pattern { line, .. }
            | DefinitionError::UnknownType { line, .. }
            | DefinitionError::UndeclaredRole { line, .. }
            | DefinitionError::VariableInType { line, .. } => *line,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Comma,
    Period,
}

fn syntax(line: usize, message: impl Into<String>) -> DefinitionError {
    DefinitionError::Syntax { line, message: message.into() }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn lex(source: &str) -> Result<Vec<(usize, Tok)>, DefinitionError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = source.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '#' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        break;
                    }
                }
            }
            ',' => out.push((line, Tok::Comma)),
            '.' => out.push((line, Tok::Period)),
            c if is_single_quote(c) || is_double_quote(c) => {
                // A string opened with a single quote may be closed by either
                // kind; double-quoted strings may contain single quotes.
                let start_line = line;
                let single = is_single_quote(c);
                let mut text = String::new();
                let mut closed = false;
                for c in chars.by_ref() {
                    if is_double_quote(c) || (single && is_single_quote(c)) {
                        closed = true;
                        break;
                    }
                    if c == '\n' {
                        line += 1;
                    }
                    text.push(c);
                }
                if !closed {
                    return Err(syntax(start_line, "unterminated string"));
                }
                out.push((start_line, Tok::Str(text)));
            }
            c if is_word_char(c) => {
                let mut word = c.to_string();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                out.push((line, Tok::Word(word)));
            }
            other => return Err(syntax(line, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Statement<'a> {
    line: usize,
    toks: &'a [(usize, Tok)],
    pos: usize,
}

impl Statement<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn line_here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.line, |(l, _)| *l)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), DefinitionError> {
        if self.keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.line_here(), format!("expected `{kw}`")))
        }
    }

    fn skip_commas(&mut self) {
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
        }
    }
}

struct Builder {
    defs: Vec<ThingDefinition>,
    first_lines: Vec<usize>,
    role_types: Vec<(usize, String, TypeRef)>,
}

impl Builder {
    fn def_mut(&mut self, name: &str) -> &mut ThingDefinition {
        match self.defs.iter().position(|d| d.name == name) {
            Some(i) => &mut self.defs[i],
            None => {
                self.defs.push(ThingDefinition::new(name));
                self.defs.last_mut().expect("just pushed")
            }
        }
    }

    fn statement(&mut self, st: &mut Statement) -> Result<(), DefinitionError> {
        if matches!(st.peek_at(1), Some(Tok::Word(w)) if w.eq_ignore_ascii_case("is")) {
            return self.role_type(st);
        }
        let introduces = st.keyword("there");
        if introduces {
            st.next();
            st.expect_keyword("name")?;
        } else if st.keyword("name") {
            st.next();
        } else {
            return Err(DefinitionError::UnknownStatement { line: st.line });
        }
        let name = match st.next() {
            Some(Tok::Word(w)) | Some(Tok::Str(w)) => w.clone(),
            _ => return Err(syntax(st.line, "expected a thing name")),
        };
        if !introduces && st.peek().is_none() {
            return Err(syntax(st.line, "expected `patterns` or `has`"));
        }
        if name.trim().is_empty() {
            return Err(syntax(st.line, "thing name is empty"));
        }
        if self.defs.iter().all(|d| d.name != name) {
            self.first_lines.push(st.line);
        }
        self.def_mut(&name);
        loop {
            st.skip_commas();
            if st.peek().is_none() {
                break;
            }
            if st.keyword("patterns") {
                st.next();
                self.patterns(st, &name)?;
            } else if st.keyword("has") {
                st.next();
                self.roles(st, &name)?;
            } else {
                return Err(syntax(st.line_here(), "expected `patterns` or `has`"));
            }
        }
        Ok(())
    }

    fn patterns(&mut self, st: &mut Statement, name: &str) -> Result<(), DefinitionError> {
        let mut found = false;
        while let Some(Tok::Str(src)) = st.peek() {
            let line = st.line_here();
            let pattern = parse_pattern(src).map_err(|source| DefinitionError::Pattern { line, source })?;
            self.def_mut(name).patterns.push(pattern);
            found = true;
            st.next();
            if st.peek() == Some(&Tok::Comma) && matches!(st.peek_at(1), Some(Tok::Str(_))) {
                st.next();
            } else {
                break;
            }
        }
        if found {
            Ok(())
        } else {
            Err(syntax(st.line_here(), "expected a quoted pattern after `patterns`"))
        }
    }

    fn roles(&mut self, st: &mut Statement, name: &str) -> Result<(), DefinitionError> {
        let mut found = false;
        loop {
            st.skip_commas();
            match st.peek() {
                Some(Tok::Word(w))
                    if !(w.eq_ignore_ascii_case("patterns") && matches!(st.peek_at(1), Some(Tok::Str(_)))) =>
                {
                    let role = w.to_lowercase();
                    let def = self.def_mut(name);
                    if !def.roles.contains(&role) {
                        def.roles.push(role);
                    }
                    found = true;
                    st.next();
                }
                _ => break,
            }
        }
        if found {
            Ok(())
        } else {
            Err(syntax(st.line_here(), "expected role names after `has`"))
        }
    }

    fn role_type(&mut self, st: &mut Statement) -> Result<(), DefinitionError> {
        let line = st.line;
        let role = match st.next() {
            Some(Tok::Word(w)) => w.to_lowercase(),
            _ => return Err(DefinitionError::UnknownStatement { line }),
        };
        st.next();
        let ty = match st.next() {
            Some(Tok::Word(w)) => TypeRef::Atomic(
                AtomicType::from_name(w).ok_or_else(|| DefinitionError::UnknownType { line, name: w.clone() })?,
            ),
            Some(Tok::Str(src)) => {
                let p = parse_pattern(src).map_err(|source| DefinitionError::Pattern { line, source })?;
                if !list_variables(&p).is_empty() {
                    return Err(DefinitionError::VariableInType { line, role });
                }
                TypeRef::Composite(p)
            }
            _ => return Err(syntax(line, "expected a type after `is`")),
        };
        if st.peek().is_some() {
            return Err(syntax(st.line_here(), "unexpected text after type"));
        }
        self.role_types.push((line, role, ty));
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<ThingDefinition>, DefinitionError> {
        for (def, &line) in self.defs.iter().zip(&self.first_lines) {
            // Without explicit patterns the name itself is the pattern.
            def.effective_patterns().map_err(|source| DefinitionError::Pattern { line, source })?;
        }
        for (line, role, ty) in std::mem::take(&mut self.role_types) {
            let mut declared = false;
            for def in self.defs.iter_mut().filter(|d| d.roles.contains(&role)) {
                def.role_types.insert(role.clone(), ty.clone());
                declared = true;
            }
            if !declared {
                return Err(DefinitionError::UndeclaredRole { line, role });
            }
        }
        Ok(self.defs)
    }
}

/// Parses a definitions file into one definition per thing name, in order
/// of first mention.
///
/// Statements end with `.` and keywords are case-insensitive:
///
/// - `There name X [patterns "p1", "p2"] [, has r1, r2].`
/// - `Name X patterns "p".` adds to an existing definition.
/// - `R is T.` types role `R` with `word`, `time`, `number`, `money` or a
///   quoted variable-free pattern.
///
/// `#` starts a comment running to the end of the line.
pub fn parse_definitions(source: &str) -> Result<Vec<ThingDefinition>, DefinitionError> {
    let toks = lex(source)?;
    let mut builder = Builder { defs: Vec::new(), first_lines: Vec::new(), role_types: Vec::new() };
    for chunk in toks.split(|(_, t)| *t == Tok::Period) {
        let Some(&(line, _)) = chunk.first() else { continue };
        let mut st = Statement { line, toks: chunk, pos: 0 };
        builder.statement(&mut st)?;
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern_lang::Pattern;

    #[test]
    fn typed_roles() {
        let defs = parse_definitions(
            "There name item_quantity_cost patterns \"On sale: $item, quantity $amount, prices $cost\", \
             has item, amount, cost. Cost is money. Amount is number. Item is word.",
        )
        .unwrap();
        assert_eq!(defs.len(), 1);
        let d = &defs[0];
        assert_eq!(d.name, "item_quantity_cost");
        assert_eq!(d.roles, ["item", "amount", "cost"]);
        assert_eq!(d.role_types["item"], TypeRef::Atomic(AtomicType::Word));
        assert_eq!(d.role_types["amount"], TypeRef::Atomic(AtomicType::Number));
        assert_eq!(d.role_types["cost"], TypeRef::Atomic(AtomicType::Money));
    }

    #[test]
    fn mixed_role_separators() {
        let defs = parse_definitions(
            "There name item_quantity_cost patterns \u{201C}On sale: $item, quantity $amount, prices $cost\u{201D}, \
             has item amount, cost. Cost is money.",
        )
        .unwrap();
        assert_eq!(defs[0].roles, ["item", "amount", "cost"]);
    }

    #[test]
    fn bare_name() {
        let defs = parse_definitions("There name person.").unwrap();
        assert_eq!(defs, vec![ThingDefinition::new("person")]);
    }

    #[test]
    fn patterns_accumulate() {
        let defs = parse_definitions("There name x patterns \"a\". Name x patterns \"b\".").unwrap();
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].patterns, vec![Pattern::literal("a"), Pattern::literal("b")]);
    }

    #[test]
    fn person_defined_three_ways() {
        let implicit = parse_definitions("There name \u{201C}{\u{2018}john doe\u{2019} \u{2018}jane roe\u{2019}}\u{201D}.")
            .unwrap();
        assert!(implicit[0].patterns.is_empty());
        let explicit =
            parse_definitions("There name person. Name person patterns \u{201C}{\u{2018}john doe\u{2019} \u{2018}jane roe\u{2019}}\u{201D}.")
                .unwrap();
        assert_eq!(implicit[0].effective_patterns().unwrap(), explicit[0].patterns);
        let multiple =
            parse_definitions("There name person. Name person patterns \u{201C}john doe\u{201D}, \u{201C}jane roe\u{201D}.")
                .unwrap();
        assert_eq!(multiple[0].patterns.len(), 2);
    }

    #[test]
    fn composite_type() {
        let defs = parse_definitions(
            "There name person_doing_something patterns \"$person $did $something\", has person, did, something. \
             Person is '{John Jane Joe Joi}'. Did is '{{said told} {wrote printed}}\u{201D}.",
        )
        .unwrap();
        let TypeRef::Composite(p) = &defs[0].role_types["person"] else { panic!("composite expected") };
        assert_eq!(p.children().len(), 4);
        assert!(matches!(defs[0].role_types["did"], TypeRef::Composite(_)));
    }

    #[test]
    fn undeclared_role_is_rejected() {
        // `doing` is not in the has-list (person, did, something).
        let err = parse_definitions(
            "There name person_doing_something patterns \"$person $did $something\", has person, did, something.\n\
             Doing is '{{said told} {wrote printed}}\u{201D}.",
        )
        .unwrap_err();
        assert_eq!(err, DefinitionError::UndeclaredRole { line: 2, role: "doing".into() });
        assert!(err.to_string().contains("doing"));
    }

    #[test]
    fn variables_in_type_rejected() {
        let err = parse_definitions("There name a patterns \"$x\", has x. X is '$y z'.").unwrap_err();
        assert!(matches!(err, DefinitionError::VariableInType { .. }));
    }

    #[test]
    fn unknown_statement_reports_line() {
        let err = parse_definitions("There name a.\n# comment\nfly away.").unwrap_err();
        assert_eq!(err, DefinitionError::UnknownStatement { line: 3 });
    }

    #[test]
    fn comments_and_case() {
        let defs = parse_definitions("# things\nTHERE NAME red-light PATTERNS \"red light\". # trailing\n").unwrap();
        assert_eq!(defs[0].name, "red-light");
    }

    #[test]
    fn unknown_type_and_bad_pattern() {
        assert!(matches!(
            parse_definitions("There name a patterns \"$x\", has x. X is colour."),
            Err(DefinitionError::UnknownType { .. })
        ));
        let err = parse_definitions("There name a patterns \"{x\".").unwrap_err();
        assert!(matches!(err, DefinitionError::Pattern { line: 1, .. }));
        assert!(matches!(parse_definitions("There name a patterns \"x"), Err(DefinitionError::Syntax { .. })));
    }
}
