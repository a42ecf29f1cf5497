use super::formula::{is_keyword, Formula, Prop, Unary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown operator {token:?} at byte {offset}")]
    UnknownOperator { offset: usize, token: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    And,
    Or,
    Not,
    Until,
    Unary(Unary),
    Ident(String),
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::And => "'&'".into(),
        Tok::Or => "'|'".into(),
        Tok::Not => "'!'".into(),
        Tok::Until => "'U'".into(),
        Tok::Unary(u) => format!("'{}'", u.token()),
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'!' => Tok::Not,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word == "U" {
                    Tok::Until
                } else if let Some(u) = Unary::from_token(word) {
                    Tok::Unary(u)
                } else {
                    Tok::Ident(word.to_string())
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let start = i;
                // Swallow a run of punctuation so "->" is reported as one token.
                while i < bytes.len()
                    && !bytes[i].is_ascii_alphanumeric()
                    && !b" \t\r\n()&|!".contains(&bytes[i])
                {
                    i += 1;
                }
                let end = if i == start { start + 1 } else { i };
                let end = (end..=text.len()).find(|&e| text.is_char_boundary(e)).unwrap_or(text.len());
                return Err(ParseError::UnknownOperator {
                    offset: start,
                    token: text[start..end].to_string(),
                });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Unary(u) = *self.peek() {
            self.bump();
            return Ok(Formula::unary(u, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let l = self.disj()?;
                let f = if *self.peek() == Tok::Until {
                    self.bump();
                    let r = self.disj()?;
                    Formula::until(l, r)
                } else {
                    l
                };
                if *self.peek() != Tok::RParen {
                    return self.err(format!("expected ')', found {}", describe(self.peek())));
                }
                self.bump();
                Ok(f)
            }
            Tok::Not => {
                self.bump();
                match self.peek().clone() {
                    Tok::Ident(name) => {
                        let p = self.ident(&name)?;
                        Ok(Formula::Lit(p, false))
                    }
                    other => self.err(format!(
                        "negation applies only to propositions, found {}",
                        describe(&other)
                    )),
                }
            }
            Tok::Ident(name) => {
                let p = self.ident(&name)?;
                Ok(Formula::Lit(p, true))
            }
            other => self.err(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn ident(&mut self, name: &str) -> Result<Prop, ParseError> {
        debug_assert!(!is_keyword(name));
        let p = Prop::new(name).or_else(|e| self.err(e.to_string()))?;
        self.bump();
        Ok(p)
    }
}

/// Parses the concrete syntax: `|` binds loosest, then `&`, then the prefix
/// operators. `U` only appears as `(l U r)`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.disj()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_formula("F(qt & O pt)").unwrap(),
            Formula::future(Formula::and(
                Formula::pos("qt"),
                Formula::once(Formula::pos("pt"))
            ))
        );
        assert_eq!(
            parse_formula("X !p | G p").unwrap(),
            Formula::or(
                Formula::next(Formula::neg("p")),
                Formula::globally(Formula::pos("p"))
            )
        );
        assert_eq!(parse_formula("((p))").unwrap(), Formula::pos("p"));
        assert_eq!(
            parse_formula("(a U b & c)").unwrap(),
            Formula::until(
                Formula::pos("a"),
                Formula::and(Formula::pos("b"), Formula::pos("c"))
            )
        );
        assert_eq!(
            parse_formula("a & b & c").unwrap(),
            Formula::and(
                Formula::and(Formula::pos("a"), Formula::pos("b")),
                Formula::pos("c")
            )
        );
        assert_eq!(
            parse_formula("wX wY !p").unwrap().to_string(),
            "wX wY !p"
        );
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_formula("p & ") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_formula("p -> q") {
            Err(ParseError::UnknownOperator { offset, token }) => {
                assert_eq!(offset, 2);
                assert_eq!(token, "->");
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("!X p").is_err());
        assert!(parse_formula("a U b").is_err());
        assert!(parse_formula("(a b)").is_err());
        assert!(parse_formula("").is_err());
    }
}
