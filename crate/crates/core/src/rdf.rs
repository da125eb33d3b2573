//! In-memory triple store with a Turtle reader for the subset of the grammar
//! used by building models: `@prefix`, the `a` keyword, predicate lists with
//! `;`, object lists with `,`, prefixed names, absolute IRIs and opaque
//! literals. Blank nodes are rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vocab;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdfError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix `{prefix}:` at {line}:{column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("unterminated statement starting at {line}:{column}")]
    Unterminated { line: usize, column: usize },
    #[error("invalid IRI `{0}`")]
    InvalidIri(String),
}

/// An absolute, prefix-expanded IRI.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            return Err(RdfError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `#` or `/`.
    pub fn local_name(&self) -> &str {
        let cut = self.0.rfind(['#', '/']).map(|i| i + 1).unwrap_or(0);
        &self.0[cut..]
    }

    /// Builds an IRI from a constant known to be valid.
    pub(crate) fn constant(value: &str) -> Self {
        Iri(value.to_owned())
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Iri {
    type Error = RdfError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl FromStr for Iri {
    type Err = RdfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

/// Object position of a triple. Literals keep their lexical token verbatim
/// (quotes, language tag and datatype included).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(String),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

/// Short prefix to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTable {
    map: BTreeMap<String, String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The namespaces of the example building model.
    pub fn building_defaults() -> Self {
        let mut table = Self::new();
        for (prefix, ns) in vocab::default_prefixes() {
            table.insert(prefix, ns);
        }
        table
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(p, n)| (p.as_str(), n.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn extend(&mut self, other: &PrefixTable) {
        for (p, n) in other.iter() {
            self.map.entry(p.to_owned()).or_insert_with(|| n.to_owned());
        }
    }

    /// Expands `prefix:local`; absolute IRIs (`<...>` or containing `://`)
    /// pass through.
    pub fn expand(&self, name: &str) -> Result<Iri, RdfError> {
        if let Some(inner) = name.strip_prefix('<').and_then(|n| n.strip_suffix('>')) {
            return Iri::new(inner);
        }
        if name.contains("://") {
            return Iri::new(name);
        }
        let (prefix, local) = name.split_once(':').ok_or_else(|| RdfError::InvalidIri(name.into()))?;
        let ns = self.namespace(prefix).ok_or_else(|| RdfError::UnknownPrefix {
            prefix: prefix.into(),
            line: 0,
            column: 0,
        })?;
        Iri::new(format!("{ns}{local}"))
    }

    /// Shortest `prefix:local` form, choosing the longest matching namespace.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        self.map
            .iter()
            .filter(|(_, ns)| iri.as_str().starts_with(ns.as_str()) && iri.as_str().len() > ns.len())
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| format!("{p}:{}", &iri.as_str()[ns.len()..]))
            .filter(|pname| is_valid_local(pname.split_once(':').map(|x| x.1).unwrap_or("")))
    }

    /// Compact form when possible, `<iri>` otherwise.
    pub fn display(&self, iri: &Iri) -> String {
        self.compact(iri).unwrap_or_else(|| format!("<{iri}>"))
    }
}

fn is_valid_local(local: &str) -> bool {
    !local.is_empty()
        && !local.ends_with('.')
        && local.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// A set of triples with subject, predicate and object indexes.
#[derive(Debug, Clone, Default)]
pub struct TripleGraph {
    triples: Vec<Triple>,
    by_subject: HashMap<Iri, Vec<usize>>,
    by_predicate: HashMap<Iri, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
    prefixes: PrefixTable,
}

impl TripleGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>, prefixes: PrefixTable) -> Self {
        let set: BTreeSet<Triple> = triples.into_iter().collect();
        let mut graph = TripleGraph {
            prefixes,
            ..Default::default()
        };
        for (i, t) in set.into_iter().enumerate() {
            graph.by_subject.entry(t.subject.clone()).or_default().push(i);
            graph.by_predicate.entry(t.predicate.clone()).or_default().push(i);
            graph.by_object.entry(t.object.clone()).or_default().push(i);
            graph.triples.push(t);
        }
        graph
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// All triples in sorted order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn prefixes(&self) -> &PrefixTable {
        &self.prefixes
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.binary_search(triple).is_ok()
    }

    /// Union of two graphs; prefixes of `self` win on conflicts.
    pub fn merge(&self, other: &TripleGraph) -> TripleGraph {
        let mut prefixes = self.prefixes.clone();
        prefixes.extend(&other.prefixes);
        TripleGraph::from_triples(self.triples.iter().chain(other.triples.iter()).cloned(), prefixes)
    }

    /// Triples matching every fixed position; `None` is a wildcard.
    pub fn match_pattern(&self, subject: Option<&Iri>, predicate: Option<&Iri>, object: Option<&Term>) -> Vec<&Triple> {
        let candidates: Box<dyn Iterator<Item = &Triple>> = match (subject, predicate, object) {
            (Some(s), _, _) => Box::new(self.indexed(self.by_subject.get(s))),
            (None, _, Some(o)) => Box::new(self.indexed(self.by_object.get(o))),
            (None, Some(p), None) => Box::new(self.indexed(self.by_predicate.get(p))),
            (None, None, None) => Box::new(self.triples.iter()),
        };
        candidates
            .filter(|t| subject.is_none_or(|s| &t.subject == s))
            .filter(|t| predicate.is_none_or(|p| &t.predicate == p))
            .filter(|t| object.is_none_or(|o| &t.object == o))
            .collect()
    }

    fn indexed<'a>(&'a self, idx: Option<&'a Vec<usize>>) -> impl Iterator<Item = &'a Triple> + 'a {
        idx.into_iter().flatten().map(move |&i| &self.triples[i])
    }

    /// IRI objects of `(subject, predicate, ?)`.
    pub fn objects(&self, subject: &Iri, predicate: &Iri) -> Vec<Iri> {
        self.match_pattern(Some(subject), Some(predicate), None)
            .into_iter()
            .filter_map(|t| t.object.as_iri().cloned())
            .collect()
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects(&self, predicate: &Iri, object: &Iri) -> Vec<Iri> {
        self.match_pattern(None, Some(predicate), Some(&Term::Iri(object.clone())))
            .into_iter()
            .map(|t| t.subject.clone())
            .collect()
    }

    pub fn types_of(&self, subject: &Iri) -> Vec<Iri> {
        self.objects(subject, &Iri::constant(vocab::RDF_TYPE))
    }

    /// Whether the IRI occurs in any position of any stored triple.
    pub fn mentions(&self, iri: &Iri) -> bool {
        self.by_subject.contains_key(iri)
            || self.by_predicate.contains_key(iri)
            || self.by_object.contains_key(&Term::Iri(iri.clone()))
    }

    /// Every class reachable from `class` by zero or more inverse
    /// `rdfs:subClassOf` hops, i.e. `class` and all of its subclasses.
    pub fn subclass_closure(&self, class: &Iri) -> BTreeSet<Iri> {
        let sub_class_of = Iri::constant(vocab::RDFS_SUBCLASS_OF);
        let mut seen = BTreeSet::new();
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            for sub in self.subjects(&sub_class_of, &c) {
                if !seen.contains(&sub) {
                    stack.push(sub);
                }
            }
        }
        seen
    }

    /// Every superclass of `class` including itself.
    pub fn superclass_closure(&self, class: &Iri) -> BTreeSet<Iri> {
        let sub_class_of = Iri::constant(vocab::RDFS_SUBCLASS_OF);
        let mut seen = BTreeSet::new();
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            if seen.insert(c.clone()) {
                stack.extend(self.objects(&c, &sub_class_of));
            }
        }
        seen
    }

    /// Turtle rendering grouped by subject. Reparsing yields the same
    /// triple set.
    pub fn to_turtle(&self) -> String {
        let mut out = String::new();
        for (p, ns) in self.prefixes.iter() {
            out.push_str(&format!("@prefix {p}: <{ns}> .\n"));
        }
        if !self.prefixes.is_empty() {
            out.push('\n');
        }
        let rdf_type = Iri::constant(vocab::RDF_TYPE);
        let mut by_subject: BTreeMap<&Iri, BTreeMap<&Iri, Vec<&Term>>> = BTreeMap::new();
        for t in &self.triples {
            by_subject
                .entry(&t.subject)
                .or_default()
                .entry(&t.predicate)
                .or_default()
                .push(&t.object);
        }
        for (subject, preds) in by_subject {
            out.push_str(&self.prefixes.display(subject));
            let mut first = true;
            for (predicate, objects) in preds {
                out.push_str(if first { " " } else { " ;\n    " });
                first = false;
                if *predicate == rdf_type {
                    out.push('a');
                } else {
                    out.push_str(&self.prefixes.display(predicate));
                }
                let rendered: Vec<String> = objects
                    .iter()
                    .map(|o| match o {
                        Term::Iri(iri) => self.prefixes.display(iri),
                        Term::Literal(lit) => lit.clone(),
                    })
                    .collect();
                out.push(' ');
                out.push_str(&rendered.join(",\n        "));
            }
            out.push_str(" .\n\n");
        }
        out
    }
}

impl PartialEq for TripleGraph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

/// Parses a Turtle document of the supported subset.
pub fn parse_turtle(text: &str) -> Result<TripleGraph, RdfError> {
    let mut parser = Parser::new(text);
    let mut prefixes = PrefixTable::new();
    let mut triples = Vec::new();
    parser.document(&mut prefixes, &mut triples)?;
    Ok(TripleGraph::from_triples(triples, prefixes))
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    PrefixDirective,
    IriRef(String),
    PName(String),
    A,
    Literal(String),
    Dot,
    Semicolon,
    Comma,
    BlankNode,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    peeked: Option<(Token, usize, usize)>,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            peeked: None,
        }
    }

    fn current(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.current()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn syntax(&self, line: usize, column: usize, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.current() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Result<Option<&(Token, usize, usize)>, RdfError> {
        if self.peeked.is_none() {
            self.peeked = self.lex()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn next(&mut self) -> Result<Option<(Token, usize, usize)>, RdfError> {
        if let Some(t) = self.peeked.take() {
            return Ok(Some(t));
        }
        self.lex()
    }

    fn lex(&mut self) -> Result<Option<(Token, usize, usize)>, RdfError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.column);
        let Some(c) = self.current() else {
            return Ok(None);
        };
        let token = match c {
            '.' => {
                self.bump();
                Token::Dot
            }
            ';' => {
                self.bump();
                Token::Semicolon
            }
            ',' => {
                self.bump();
                Token::Comma
            }
            '[' | '(' => {
                self.bump();
                Token::BlankNode
            }
            '<' => {
                self.bump();
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c.is_whitespace() => {
                            return Err(self.syntax(line, col, "whitespace inside IRI"));
                        }
                        Some(c) => iri.push(c),
                        None => return Err(self.syntax(line, col, "unterminated IRI")),
                    }
                }
                Token::IriRef(iri)
            }
            '"' | '\'' => Token::Literal(self.string_literal(line, col)?),
            '@' => {
                self.bump();
                let word = self.word();
                if word == "prefix" {
                    Token::PrefixDirective
                } else {
                    return Err(self.syntax(line, col, format!("unsupported directive @{word}")));
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => Token::Literal(self.number()),
            _ => {
                let word = self.word();
                if word.is_empty() {
                    return Err(self.syntax(line, col, format!("unexpected character `{c}`")));
                }
                if word == "a" {
                    Token::A
                } else if word.eq_ignore_ascii_case("prefix") {
                    Token::PrefixDirective
                } else if word == "true" || word == "false" {
                    Token::Literal(word)
                } else if word.starts_with("_:") {
                    Token::BlankNode
                } else if word.contains(':') {
                    Token::PName(word)
                } else {
                    return Err(self.syntax(line, col, format!("unexpected token `{word}`")));
                }
            }
        };
        Ok(Some((token, line, col)))
    }

    /// Reads a name up to a delimiter; a trailing `.` is left for the
    /// statement terminator.
    fn word(&mut self) -> String {
        let mut end = self.pos;
        while end < self.chars.len()
            && (self.chars[end].is_alphanumeric() || matches!(self.chars[end], '_' | '-' | ':' | '.'))
        {
            end += 1;
        }
        while end > self.pos && self.chars[end - 1] == '.' {
            end -= 1;
        }
        let mut word = String::new();
        while self.pos < end {
            word.push(self.bump().expect("in bounds"));
        }
        word
    }

    fn number(&mut self) -> String {
        let mut s = String::new();
        if let Some(c) = self.current() {
            if c == '+' || c == '-' {
                s.push(c);
                self.bump();
            }
        }
        let mut seen_dot = false;
        let mut seen_exp = false;
        while let Some(c) = self.current() {
            if c.is_ascii_digit() {
                s.push(c);
                self.bump();
            } else if c == '.' && !seen_dot && !seen_exp {
                // only part of the number when followed by a digit
                if self.chars.get(self.pos + 1).is_some_and(|d| d.is_ascii_digit()) {
                    seen_dot = true;
                    s.push(c);
                    self.bump();
                } else {
                    break;
                }
            } else if (c == 'e' || c == 'E') && !seen_exp {
                seen_exp = true;
                s.push(c);
                self.bump();
                if let Some(sign) = self.current() {
                    if sign == '+' || sign == '-' {
                        s.push(sign);
                        self.bump();
                    }
                }
            } else {
                break;
            }
        }
        s
    }

    fn string_literal(&mut self, line: usize, col: usize) -> Result<String, RdfError> {
        let quote = self.bump().expect("peeked quote");
        let mut lit = String::from(quote);
        loop {
            match self.bump() {
                Some('\\') => {
                    lit.push('\\');
                    match self.bump() {
                        Some(c) => lit.push(c),
                        None => return Err(self.syntax(line, col, "unterminated literal")),
                    }
                }
                Some('\n') | None => return Err(self.syntax(line, col, "unterminated literal")),
                Some(c) if c == quote => {
                    lit.push(c);
                    break;
                }
                Some(c) => lit.push(c),
            }
        }
        match self.current() {
            Some('@') => {
                self.bump();
                lit.push('@');
                lit.push_str(&self.word());
            }
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.syntax(self.line, self.column, "expected `^^`"));
                }
                lit.push_str("^^");
                if self.current() == Some('<') {
                    match self.lex()? {
                        Some((Token::IriRef(iri), _, _)) => lit.push_str(&format!("<{iri}>")),
                        _ => return Err(self.syntax(line, col, "bad datatype IRI")),
                    }
                } else {
                    lit.push_str(&self.word());
                }
            }
            _ => {}
        }
        Ok(lit)
    }

    fn document(&mut self, prefixes: &mut PrefixTable, out: &mut Vec<Triple>) -> Result<(), RdfError> {
        while let Some((token, line, col)) = self.next()? {
            match token {
                Token::PrefixDirective => self.prefix_directive(prefixes, line, col)?,
                Token::BlankNode => return Err(self.syntax(line, col, "blank nodes are not supported")),
                Token::IriRef(_) | Token::PName(_) => {
                    let subject = self.resolve(&token, prefixes, line, col)?;
                    self.predicate_object_list(&subject, prefixes, out, line, col)?;
                }
                other => return Err(self.syntax(line, col, format!("expected subject, found {other:?}"))),
            }
        }
        Ok(())
    }

    fn prefix_directive(&mut self, prefixes: &mut PrefixTable, line: usize, col: usize) -> Result<(), RdfError> {
        let name = match self.next()? {
            Some((Token::PName(p), ..)) if p.ends_with(':') && p.matches(':').count() == 1 => {
                p.trim_end_matches(':').to_owned()
            }
            _ => return Err(self.syntax(line, col, "expected prefix name after @prefix")),
        };
        let ns = match self.next()? {
            Some((Token::IriRef(iri), ..)) => iri,
            _ => return Err(self.syntax(line, col, "expected namespace IRI")),
        };
        prefixes.insert(name, ns);
        // the terminating dot is required for @prefix and optional for PREFIX
        if let Some((Token::Dot, ..)) = self.peek()? {
            self.next()?;
        }
        Ok(())
    }

    fn resolve(&self, token: &Token, prefixes: &PrefixTable, line: usize, col: usize) -> Result<Iri, RdfError> {
        match token {
            Token::IriRef(iri) => Iri::new(iri.clone()),
            Token::PName(name) => {
                let (prefix, local) = name.split_once(':').expect("pname has a colon");
                let ns = prefixes.namespace(prefix).ok_or_else(|| RdfError::UnknownPrefix {
                    prefix: prefix.into(),
                    line,
                    column: col,
                })?;
                Iri::new(format!("{ns}{local}"))
            }
            Token::A => Ok(Iri::constant(vocab::RDF_TYPE)),
            other => Err(self.syntax(line, col, format!("expected IRI, found {other:?}"))),
        }
    }

    fn predicate_object_list(
        &mut self,
        subject: &Iri,
        prefixes: &PrefixTable,
        out: &mut Vec<Triple>,
        start_line: usize,
        start_col: usize,
    ) -> Result<(), RdfError> {
        loop {
            let Some((token, line, col)) = self.next()? else {
                return Err(RdfError::Unterminated {
                    line: start_line,
                    column: start_col,
                });
            };
            let predicate = match token {
                Token::A | Token::IriRef(_) | Token::PName(_) => self.resolve(&token, prefixes, line, col)?,
                Token::Dot => return Ok(()),
                other => return Err(self.syntax(line, col, format!("expected predicate, found {other:?}"))),
            };
            loop {
                let Some((token, line, col)) = self.next()? else {
                    return Err(RdfError::Unterminated {
                        line: start_line,
                        column: start_col,
                    });
                };
                let object = match token {
                    Token::Literal(lit) => Term::Literal(lit),
                    Token::IriRef(_) | Token::PName(_) => Term::Iri(self.resolve(&token, prefixes, line, col)?),
                    Token::BlankNode => return Err(self.syntax(line, col, "blank nodes are not supported")),
                    other => return Err(self.syntax(line, col, format!("expected object, found {other:?}"))),
                };
                out.push(Triple::new(subject.clone(), predicate.clone(), object));
                match self.next()? {
                    Some((Token::Comma, ..)) => continue,
                    Some((Token::Semicolon, ..)) => {
                        // tolerate `;` directly before `.` or repeated `;`
                        while let Some((Token::Semicolon, ..)) = self.peek()? {
                            self.next()?;
                        }
                        if let Some((Token::Dot, ..)) = self.peek()? {
                            self.next()?;
                            return Ok(());
                        }
                        break;
                    }
                    Some((Token::Dot, ..)) => return Ok(()),
                    None => {
                        return Err(RdfError::Unterminated {
                            line: start_line,
                            column: start_col,
                        })
                    }
                    Some((other, line, col)) => {
                        if matches!(other, Token::IriRef(_) | Token::PName(_) | Token::PrefixDirective) {
                            return Err(RdfError::Unterminated {
                                line: start_line,
                                column: start_col,
                            });
                        }
                        return Err(self.syntax(line, col, format!("expected `,`, `;` or `.`, found {other:?}")));
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A1: &str = include_str!("../data/appendix-a1.ttl");

    fn b1(local: &str) -> Iri {
        Iri::new(format!("{}{local}", vocab::BUILDING1)).unwrap()
    }

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn appendix_fragment_vav() {
        let g = parse_turtle(A1).unwrap();
        let vav = b1("VAV-1-12");
        assert_eq!(g.types_of(&vav), vec![iri(&format!("{}VAV", vocab::BRICK))]);
        assert_eq!(g.objects(&vav, &iri(vocab::BF_HAS_POINT)).len(), 3);
        assert_eq!(g.objects(&vav, &iri(vocab::BF_FEEDS)), vec![b1("HVAC-Zone-1-12")]);
    }

    #[test]
    fn prefixes_only_document() {
        let g = parse_turtle("@prefix bf: <https://brickschema.org/schema/1.0.3/BrickFrame#> .\nPREFIX x: <http://x/>\n").unwrap();
        assert!(g.is_empty());
        assert_eq!(g.prefixes().namespace("bf"), Some(vocab::BF));
        assert_eq!(g.prefixes().namespace("x"), Some("http://x/"));
    }

    #[test]
    fn object_list_expands() {
        let g = parse_turtle("@prefix e: <http://e/> .\ne:s e:p e:a, e:b, e:c .").unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn a_keyword_and_literals() {
        let g = parse_turtle("@prefix e: <http://e/> .\ne:s a e:C ; e:label \"x y\"@en ; e:n 21.5, true .").unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.contains(&Triple::new(iri("http://e/s"), iri(vocab::RDF_TYPE), iri("http://e/C"))));
        assert!(g.contains(&Triple {
            subject: iri("http://e/s"),
            predicate: iri("http://e/n"),
            object: Term::Literal("21.5".into())
        }));
    }

    #[test]
    fn duplicate_triples_collapse() {
        let g = parse_turtle("<http://e/s> <http://e/p> <http://e/o> .\n<http://e/s> <http://e/p> <http://e/o> .").unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn unknown_prefix_reports_position() {
        let err = parse_turtle("@prefix e: <http://e/> .\ne:s q:p e:o .").unwrap_err();
        assert_eq!(
            err,
            RdfError::UnknownPrefix {
                prefix: "q".into(),
                line: 2,
                column: 5
            }
        );
    }

    #[test]
    fn unterminated_statement() {
        let err = parse_turtle("@prefix e: <http://e/> .\ne:s e:p e:o ;\n e:q e:r").unwrap_err();
        assert!(matches!(err, RdfError::Unterminated { line: 2, column: 1 }), "{err}");
    }

    #[test]
    fn blank_nodes_rejected() {
        for doc in ["_:b <http://e/p> <http://e/o> .", "<http://e/s> <http://e/p> [ <http://e/q> <http://e/o> ] ."] {
            assert!(matches!(parse_turtle(doc), Err(RdfError::Syntax { .. })), "{doc}");
        }
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse_turtle("<http://e/s> <http://e/p> <http://e/o> .\n  ! ").unwrap_err();
        assert!(matches!(err, RdfError::Syntax { line: 2, column: 3, .. }), "{err}");
    }

    #[test]
    fn match_adjacent_to_door() {
        let g = parse_turtle(A1).unwrap();
        let door = Term::Iri(b1("Door-1-1-12"));
        let hits = g.match_pattern(None, Some(&iri(vocab::BOT_ADJACENT_ELEMENT)), Some(&door));
        let subjects: Vec<_> = hits.iter().map(|t| t.subject.clone()).collect();
        assert_eq!(subjects, vec![b1("Room-1-1-120"), b1("Room-1-1-121")]);
        assert_eq!(g.match_pattern(None, None, None).len(), g.len());
        assert!(g.match_pattern(Some(&b1("Nonexistent")), None, None).is_empty());
    }

    #[test]
    fn closure_edge_cases() {
        let g = parse_turtle(
            "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n@prefix e: <http://e/> .\n\
             e:A rdfs:subClassOf e:B .\ne:B rdfs:subClassOf e:A .",
        )
        .unwrap();
        let closure = g.subclass_closure(&iri("http://e/A"));
        assert_eq!(closure.len(), 2);
        let leaf = iri("http://e/Leaf");
        assert_eq!(g.subclass_closure(&leaf), BTreeSet::from([leaf]));
    }

    #[test]
    fn prefix_compaction() {
        let table = PrefixTable::building_defaults();
        let room = b1("Room-1-1-1ST3");
        assert_eq!(table.compact(&room).as_deref(), Some("building1:Room-1-1-1ST3"));
        assert_eq!(table.expand("building1:Room-1-1-1ST3").unwrap(), room);
        assert_eq!(table.expand("<http://x/y>").unwrap(), iri("http://x/y"));
        assert!(table.expand("nope:x").is_err());
        assert!(Iri::new("has space").is_err());
        assert!(Iri::new("").is_err());
    }
}
