//! Text format for forests and forms.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)* | '0'
//! term     := [rational] forest
//! rational := ['-'] uint ['/' uint]
//! forest   := component+
//! component:= tree | aroma
//! aroma    := '<' tree (',' tree)* '>'
//! tree     := node ['[' tree (',' tree)* ']']
//! node     := '*' | 'o' uint
//! ```
//!
//! `*` is a vertex, `o3` the covertex with label 3.  `t[a,b]` makes `a` and
//! `b` point at `t`.  `<t1,...,tk>` is an aroma: the base nodes form a
//! directed cycle with an edge from the base of `t_i` to the base of
//! `t_(i+1)` and from the last back to the first.  Tree components are the
//! numbered roots, in order of appearance; aromas may sit anywhere in a
//! forest and are printed first.  Parsing applies the signed symmetrization,
//! so `parse(print(form)) == form` exactly, and printing expands each stored
//! representative into its full signed orbit (hence the `1/2 ... - 1/2 ...`
//! shape of alternating expressions).
//!
//! Concrete vector fields for the elementary-differential evaluator use a
//! separate one-line format: `d=2; f1 = x2^3 - 1/2*x1*x2; f2 = x1` with
//! `x<k>` variables, `^` powers, `*` products, and rational coefficients.

use std::collections::BTreeMap;

use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::elemdiff::{PolyVectorField, Polynomial};
use crate::error::{Error, Result, SourceSpan};
use crate::forest::{check_capacity, Forest, Grade, NodeKind, RawForest};
use crate::form::{Form, GradedForm, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Star,
    Cov(u32),
    Int(BigInt),
    Slash,
    Plus,
    Minus,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Comma,
}

fn parse_error(span: SourceSpan, message: impl Into<String>) -> Error {
    Error::Parse { span, message: message.into() }
}

fn tokenize(input: &str) -> Result<Vec<(Token, SourceSpan)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'*' => {
                out.push((Token::Star, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'<' => {
                out.push((Token::LAngle, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'>' => {
                out.push((Token::RAngle, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'[' => {
                out.push((Token::LBracket, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b']' => {
                out.push((Token::RBracket, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b',' => {
                out.push((Token::Comma, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'+' => {
                out.push((Token::Plus, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'-' => {
                out.push((Token::Minus, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'/' => {
                out.push((Token::Slash, SourceSpan { start, end: start + 1 }));
                i += 1;
            }
            b'o' => {
                i += 1;
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(parse_error(
                        SourceSpan { start, end: i },
                        "covertex marker 'o' must be followed by a label",
                    ));
                }
                let label: u32 = input[digits_start..i].parse().map_err(|_| {
                    parse_error(SourceSpan { start, end: i }, "covertex label out of range")
                })?;
                if label == 0 {
                    return Err(parse_error(
                        SourceSpan { start, end: i },
                        "covertex labels start at 1",
                    ));
                }
                out.push((Token::Cov(label), SourceSpan { start, end: i }));
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let value: BigInt = input[start..i].parse().expect("digit runs parse as integers");
                out.push((Token::Int(value), SourceSpan { start, end: i }));
            }
            _ => {
                return Err(parse_error(
                    SourceSpan { start, end: start + 1 },
                    format!("unexpected character {:?}", input[start..].chars().next().unwrap()),
                ));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(Token, SourceSpan)],
    pos: usize,
    input_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan { start: self.input_len, end: self.input_len })
    }

    fn bump(&mut self) -> Option<&(Token, SourceSpan)> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    /// uint ['/' uint] with an optional leading '-'; also consumes nothing if
    /// the next token does not start a rational.
    fn try_rational(&mut self) -> Result<Option<Rational>> {
        let negative = matches!(self.peek(), Some(Token::Minus));
        let probe = if negative { self.pos + 1 } else { self.pos };
        let numer = match self.tokens.get(probe) {
            Some((Token::Int(v), _)) => v.clone(),
            _ => return Ok(None),
        };
        self.pos = probe + 1;
        let mut value = Rational::from_integer(numer);
        if matches!(self.peek(), Some(Token::Slash)) {
            self.pos += 1;
            match self.bump() {
                Some((Token::Int(d), span)) => {
                    if d.is_zero() {
                        return Err(parse_error(*span, "zero denominator"));
                    }
                    value /= Rational::from_integer(d.clone());
                }
                other => {
                    let span = other.map(|(_, s)| *s).unwrap_or(self.span());
                    return Err(parse_error(span, "expected a denominator after '/'"));
                }
            }
        }
        if negative {
            value = -value;
        }
        Ok(Some(value))
    }

    fn starts_component(&self) -> bool {
        matches!(self.peek(), Some(Token::Star) | Some(Token::Cov(_)) | Some(Token::LAngle))
    }

    fn parse_tree(&mut self, raw: &mut RawForest, succ: Option<usize>) -> Result<usize> {
        let kind = match self.bump() {
            Some((Token::Star, _)) => NodeKind::Vertex,
            Some((Token::Cov(l), _)) => NodeKind::Covertex(*l),
            other => {
                let span = other.map(|(_, s)| *s).unwrap_or(self.span());
                return Err(parse_error(span, "expected a node ('*' or 'o<label>')"));
            }
        };
        let idx = raw.kinds.len();
        raw.kinds.push(kind);
        raw.succ.push(succ);
        if matches!(self.peek(), Some(Token::LBracket)) {
            self.pos += 1;
            loop {
                self.parse_tree(raw, Some(idx))?;
                match self.peek() {
                    Some(Token::Comma) => {
                        self.pos += 1;
                    }
                    Some(Token::RBracket) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(parse_error(self.span(), "expected ',' or ']'")),
                }
            }
        }
        Ok(idx)
    }

    /// One forest: at least one component.
    fn parse_forest(&mut self) -> Result<(Forest, SourceSpan)> {
        let start_span = self.span();
        let mut raw = RawForest::default();
        if !self.starts_component() {
            return Err(parse_error(start_span, "expected a forest"));
        }
        while self.starts_component() {
            if matches!(self.peek(), Some(Token::LAngle)) {
                self.pos += 1;
                let mut bases = Vec::new();
                loop {
                    bases.push(self.parse_tree(&mut raw, None)?);
                    match self.peek() {
                        Some(Token::Comma) => {
                            self.pos += 1;
                        }
                        Some(Token::RAngle) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(parse_error(self.span(), "expected ',' or '>'")),
                    }
                }
                let len = bases.len();
                for (i, &b) in bases.iter().enumerate() {
                    raw.succ[b] = Some(bases[(i + 1) % len]);
                }
            } else {
                let idx = self.parse_tree(&mut raw, None)?;
                raw.roots.push(idx);
            }
        }
        let end = self
            .tokens
            .get(self.pos.saturating_sub(1))
            .map(|(_, s)| s.end)
            .unwrap_or(start_span.end);
        let span = SourceSpan { start: start_span.start, end };
        check_capacity(raw.node_count()).map_err(|e| match e {
            Error::Capacity { requested, bound } => parse_error(
                span,
                format!("forest of order {requested} exceeds the capacity bound {bound}"),
            ),
            other => other,
        })?;
        let forest = raw.canonicalize().map_err(|e| parse_error(span, e.to_string()))?;
        Ok((forest, span))
    }
}

/// Parses an expression into a sum of homogeneous forms (one per grade).
/// All terms must agree on the number of roots.
pub fn parse_expr(input: &str) -> Result<GradedForm> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, input_len: input.len() };
    if parser.peek().is_none() {
        return Err(parse_error(SourceSpan { start: 0, end: input.len() }, "empty expression"));
    }
    // literal "0" denotes the zero form
    if tokens.len() == 1 {
        if let Token::Int(v) = &tokens[0].0 {
            if v.is_zero() {
                return Ok(GradedForm::zero());
            }
        }
    }

    let mut per_grade: BTreeMap<Grade, Vec<(Forest, Rational)>> = BTreeMap::new();
    let mut expected_roots: Option<usize> = None;
    let mut first = true;
    loop {
        let term_sign = match parser.peek() {
            Some(Token::Plus) => {
                parser.pos += 1;
                Rational::one()
            }
            Some(Token::Minus) => {
                parser.pos += 1;
                -Rational::one()
            }
            Some(_) if first => Rational::one(),
            Some(_) => return Err(parse_error(parser.span(), "expected '+' or '-' between terms")),
            None => break,
        };
        first = false;
        let coeff = parser.try_rational()?.unwrap_or_else(Rational::one) * term_sign;
        let (forest, span) = parser.parse_forest()?;
        let grade = forest.grade();
        match expected_roots {
            None => expected_roots = Some(grade.roots),
            Some(n) if n != grade.roots => {
                return Err(parse_error(
                    span,
                    format!("term has {} roots, previous terms have {n}", grade.roots),
                ));
            }
            Some(_) => {}
        }
        per_grade.entry(grade).or_default().push((forest, coeff));
        if parser.peek().is_none() {
            break;
        }
    }

    let mut out = GradedForm::zero();
    for (grade, combination) in per_grade {
        out.add_form(Form::wedge(grade, combination)?);
    }
    Ok(out)
}

/// Parses an expression that must be homogeneous (a single grade).
pub fn parse_form(input: &str) -> Result<Form> {
    let graded = parse_expr(input)?;
    let mut forms: Vec<&Form> = graded.components().collect();
    match forms.len() {
        0 => Err(Error::Grade("the zero expression has no grade; parse it with parse_expr".into())),
        1 => Ok(forms.pop().unwrap().clone()),
        k => Err(Error::Grade(format!("expression mixes {k} grades"))),
    }
}

fn print_tree(tree: &crate::forest::Tree, out: &mut String) {
    match tree.kind() {
        NodeKind::Vertex => out.push('*'),
        NodeKind::Covertex(l) => {
            out.push('o');
            out.push_str(&l.to_string());
        }
    }
    if !tree.children().is_empty() {
        out.push('[');
        for (i, child) in tree.children().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            print_tree(child, out);
        }
        out.push(']');
    }
}

/// Canonical text of a single forest: aromas first (sorted), then roots in
/// root-number order.
pub fn print_forest(forest: &Forest) -> String {
    let mut out = String::new();
    let mut first = true;
    for aroma in forest.aromas() {
        if !first {
            out.push(' ');
        }
        first = false;
        out.push('<');
        for (i, tree) in aroma.cycle().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            print_tree(tree, &mut out);
        }
        out.push('>');
    }
    for tree in forest.roots() {
        if !first {
            out.push(' ');
        }
        first = false;
        print_tree(tree, &mut out);
    }
    out
}

pub fn print_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn print_terms(terms: &BTreeMap<Forest, Rational>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (forest, coeff) in terms {
        let negative = coeff.is_negative();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let magnitude = coeff.abs();
        if !magnitude.is_one() {
            out.push_str(&print_rational(&magnitude));
            out.push(' ');
        }
        out.push_str(&print_forest(forest));
    }
    out
}

/// Canonical text of a form: the full forest-basis expansion, terms in
/// canonical forest order.
pub fn print_form(form: &Form) -> String {
    print_terms(&form.expand())
}

/// Canonical text of a graded sum of forms.
pub fn print_graded(graded: &GradedForm) -> String {
    let mut merged: BTreeMap<Forest, Rational> = BTreeMap::new();
    for component in graded.components() {
        for (forest, coeff) in component.expand() {
            merged.insert(forest, coeff);
        }
    }
    print_terms(&merged)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum FieldToken {
    /// A letter with an optional attached number: `d`, `f2`, `x1`.
    Name(char, Option<u32>),
    Int(BigInt),
    Equals,
    Semicolon,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

fn tokenize_field(input: &str) -> Result<Vec<(FieldToken, SourceSpan)>> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i];
        let token = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'=' => {
                i += 1;
                FieldToken::Equals
            }
            b';' => {
                i += 1;
                FieldToken::Semicolon
            }
            b'+' => {
                i += 1;
                FieldToken::Plus
            }
            b'-' => {
                i += 1;
                FieldToken::Minus
            }
            b'*' => {
                i += 1;
                FieldToken::Star
            }
            b'^' => {
                i += 1;
                FieldToken::Caret
            }
            b'/' => {
                i += 1;
                FieldToken::Slash
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                FieldToken::Int(digits.parse().expect("digits parse as an integer"))
            }
            c if c.is_ascii_alphabetic() => {
                i += 1;
                let digit_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let number = if i > digit_start {
                    let parsed = input[digit_start..i].parse().map_err(|_| {
                        parse_error(SourceSpan { start: digit_start, end: i }, "index out of range")
                    })?;
                    Some(parsed)
                } else {
                    None
                };
                FieldToken::Name(c as char, number)
            }
            _ => {
                return Err(parse_error(
                    SourceSpan { start, end: start + 1 },
                    format!("unexpected character {:?}", c as char),
                ))
            }
        };
        out.push((token, SourceSpan { start, end: i }));
    }
    Ok(out)
}

struct FieldParser<'a> {
    tokens: &'a [(FieldToken, SourceSpan)],
    pos: usize,
    end: usize,
}

impl<'a> FieldParser<'a> {
    fn peek(&self) -> Option<&FieldToken> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan { start: self.end, end: self.end })
    }

    fn bump(&mut self) -> Option<&FieldToken> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn expect(&mut self, token: FieldToken, what: &str) -> Result<()> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_error(self.here(), format!("expected {what}")))
        }
    }

    fn expect_uint(&mut self, what: &str) -> Result<BigInt> {
        match self.bump() {
            Some(FieldToken::Int(n)) => Ok(n.clone()),
            _ => {
                self.pos -= 1;
                Err(parse_error(self.here(), format!("expected {what}")))
            }
        }
    }

    fn parse_factor(&mut self, vars: usize) -> Result<Polynomial> {
        let span = self.here();
        match self.bump().cloned() {
            Some(FieldToken::Int(numer)) => {
                if self.peek() == Some(&FieldToken::Slash) {
                    self.pos += 1;
                    let denom_span = self.here();
                    let denom = self.expect_uint("a denominator")?;
                    if denom.is_zero() {
                        return Err(parse_error(denom_span, "zero denominator"));
                    }
                    Ok(Polynomial::constant(vars, Rational::new(numer, denom)))
                } else {
                    Ok(Polynomial::constant(vars, Rational::from_integer(numer)))
                }
            }
            Some(FieldToken::Name('x', Some(k))) => {
                if k == 0 || k as usize > vars {
                    return Err(parse_error(
                        span,
                        format!("variable x{k} is out of range for dimension {vars}"),
                    ));
                }
                let base = Polynomial::variable(vars, k as usize - 1);
                if self.peek() == Some(&FieldToken::Caret) {
                    self.pos += 1;
                    let exp_span = self.here();
                    let exp = self.expect_uint("an exponent")?;
                    let exp: u32 = exp
                        .try_into()
                        .map_err(|_| parse_error(exp_span, "exponent out of range"))?;
                    let mut power = Polynomial::constant(vars, Rational::one());
                    for _ in 0..exp {
                        power = power.mul(&base);
                    }
                    Ok(power)
                } else {
                    Ok(base)
                }
            }
            _ => {
                self.pos -= 1;
                Err(parse_error(span, "expected a rational or a variable"))
            }
        }
    }

    fn parse_polynomial(&mut self, vars: usize) -> Result<Polynomial> {
        let mut total = Polynomial::zero(vars);
        let mut negative = match self.peek() {
            Some(FieldToken::Minus) => {
                self.pos += 1;
                true
            }
            Some(FieldToken::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let mut term = self.parse_factor(vars)?;
            while self.peek() == Some(&FieldToken::Star) {
                self.pos += 1;
                term = term.mul(&self.parse_factor(vars)?);
            }
            if negative {
                term = term.neg();
            }
            total = total.add(&term);
            match self.peek() {
                Some(FieldToken::Plus) => {
                    self.pos += 1;
                    negative = false;
                }
                Some(FieldToken::Minus) => {
                    self.pos += 1;
                    negative = true;
                }
                _ => break,
            }
        }
        Ok(total)
    }
}

/// Parses the vector-field format `d=<uint>; f1 = <polynomial>; ...` with
/// variables `x1..xd`, `^` powers, `*` products, and rational coefficients.
/// Every component `f1..fd` must be assigned exactly once, in any order.
pub fn parse_vector_field(input: &str) -> Result<PolyVectorField> {
    let tokens = tokenize_field(input)?;
    let mut parser = FieldParser { tokens: &tokens, pos: 0, end: input.len() };
    match parser.bump() {
        Some(FieldToken::Name('d', None)) => {}
        _ => {
            parser.pos -= 1;
            return Err(parse_error(parser.here(), "expected the dimension assignment d=<uint>"));
        }
    }
    parser.expect(FieldToken::Equals, "'='")?;
    let dim_span = parser.here();
    let dims = parser.expect_uint("a dimension")?;
    let dims: usize =
        dims.try_into().map_err(|_| parse_error(dim_span, "dimension out of range"))?;
    if dims == 0 {
        return Err(parse_error(dim_span, "dimension must be at least 1"));
    }
    let mut components: Vec<Option<Polynomial>> = vec![None; dims];
    loop {
        parser.expect(FieldToken::Semicolon, "';'")?;
        if parser.peek().is_none() {
            break;
        }
        let name_span = parser.here();
        let index = match parser.bump().cloned() {
            Some(FieldToken::Name('f', Some(k))) => k as usize,
            _ => {
                parser.pos -= 1;
                return Err(parse_error(parser.here(), "expected a component assignment f<k>=..."));
            }
        };
        if index == 0 || index > dims {
            return Err(parse_error(
                name_span,
                format!("component f{index} is out of range for dimension {dims}"),
            ));
        }
        if components[index - 1].is_some() {
            return Err(parse_error(name_span, format!("component f{index} assigned twice")));
        }
        parser.expect(FieldToken::Equals, "'='")?;
        components[index - 1] = Some(parser.parse_polynomial(dims)?);
        if parser.peek().is_none() {
            break;
        }
    }
    let mut fields = Vec::with_capacity(dims);
    for (i, c) in components.into_iter().enumerate() {
        match c {
            Some(p) => fields.push(p),
            None => {
                return Err(parse_error(
                    SourceSpan { start: input.len(), end: input.len() },
                    format!("component f{} was never assigned", i + 1),
                ))
            }
        }
    }
    PolyVectorField::new(fields)
}
