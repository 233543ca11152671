use super::{Formula, Regular};
use crate::error::{Error, Result};
use crate::lts::ActionSet;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Quoted(String),
    Sym(&'static str),
    End,
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: &[&str] = &[
    "||", "&&", "=>", "(", ")", "{", "}", "<", ">", "[", "]", "!", ".", "+", "*", ",",
];

fn lex(src: &str) -> Result<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c == '\n' {
            line += 1;
            col = 1;
            chars.next();
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            chars.next();
            continue;
        }
        let start_col = col;
        if c.is_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_alphanumeric() || c == '_' || c == '\'' {
                    ident.push(c);
                    col += 1;
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Lexed {
                tok: Tok::Ident(ident),
                line,
                column: start_col,
            });
            continue;
        }
        if c == '"' {
            chars.next();
            col += 1;
            let mut s = String::new();
            let mut closed = false;
            while let Some((_, c)) = chars.next() {
                col += 1;
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => {
                        if let Some((_, e)) = chars.next() {
                            col += 1;
                            s.push(e);
                        }
                    }
                    '\n' => break,
                    c => s.push(c),
                }
            }
            if !closed {
                return Err(syntax(line, start_col, "unterminated quoted label"));
            }
            out.push(Lexed {
                tok: Tok::Quoted(s),
                line,
                column: start_col,
            });
            continue;
        }
        let rest = &src[i..];
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                for _ in 0..sym.len() {
                    chars.next();
                }
                col += sym.len();
                out.push(Lexed {
                    tok: Tok::Sym(sym),
                    line,
                    column: start_col,
                });
            }
            None => return Err(syntax(line, start_col, &format!("unexpected character {c:?}"))),
        }
    }
    out.push(Lexed {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

fn syntax(line: usize, column: usize, message: &str) -> Error {
    Error::Syntax {
        kind: "formula",
        line,
        column,
        message: message.to_string(),
    }
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> Error {
        let l = &self.toks[self.pos];
        let found = match &l.tok {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Quoted(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("'{s}'"),
            Tok::End => "end of input".to_string(),
        };
        syntax(l.line, l.column, &format!("{message}, found {found}"))
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{sym}'")))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.is_keyword("mu") || self.is_keyword("nu") {
            return self.binder();
        }
        let lhs = self.disjunction()?;
        if self.eat("=>") {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn binder(&mut self) -> Result<Formula> {
        let least = self.is_keyword("mu");
        self.bump();
        let name = match self.bump() {
            Tok::Ident(s) if !is_keyword(&s) => s,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected a variable name"));
            }
        };
        self.expect(".")?;
        let body = self.formula()?;
        Ok(if least {
            Formula::mu(name, body)
        } else {
            Formula::nu(name, body)
        })
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat("||") {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat("<") {
            let r = self.regular()?;
            self.expect(">")?;
            return Ok(Formula::diamond(r, self.unary()?));
        }
        if self.eat("[") {
            let r = self.regular()?;
            self.expect("]")?;
            return Ok(Formula::boxed(r, self.unary()?));
        }
        if self.is_keyword("mu") || self.is_keyword("nu") {
            return self.binder();
        }
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        match self.peek().clone() {
            Tok::Ident(s) if s == "tt" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "ff" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(Formula::Var(s))
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn regular(&mut self) -> Result<Regular> {
        let mut lhs = self.concat()?;
        while self.eat("+") {
            let rhs = self.concat()?;
            lhs = lhs.union(rhs);
        }
        Ok(lhs)
    }

    fn concat(&mut self) -> Result<Regular> {
        let mut lhs = self.starred()?;
        while self.eat(".") {
            let rhs = self.starred()?;
            lhs = lhs.concat(rhs);
        }
        Ok(lhs)
    }

    fn starred(&mut self) -> Result<Regular> {
        let mut r = self.regular_atom()?;
        while self.eat("*") {
            r = r.star();
        }
        Ok(r)
    }

    fn regular_atom(&mut self) -> Result<Regular> {
        if self.eat("(") {
            let r = self.regular()?;
            self.expect(")")?;
            return Ok(r);
        }
        if self.eat("!") {
            let set = if self.eat("{") {
                self.label_set()?
            } else {
                ActionSet::singleton(self.label()?)
            };
            return Ok(Regular::Actions(set.complement()));
        }
        if self.eat("{") {
            return Ok(Regular::Actions(self.label_set()?));
        }
        if self.is_keyword("eps") {
            self.bump();
            return Ok(Regular::Epsilon);
        }
        Ok(Regular::action(self.label()?))
    }

    fn label(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Quoted(s) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error("expected an action label")),
        }
    }

    /// Labels after an opening `{`, through the closing `}`.
    fn label_set(&mut self) -> Result<ActionSet> {
        let mut labels = Vec::new();
        if !self.eat("}") {
            loop {
                labels.push(self.label()?);
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(ActionSet::of(labels))
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "tt" | "ff" | "mu" | "nu" | "eps")
}

/// Parses a formula in the textual grammar.
pub fn parse_formula(src: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error("expected end of input"));
    }
    Ok(f)
}

/// Parses a regular formula in the textual grammar.
pub fn parse_regular(src: &str) -> Result<Regular> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let r = p.regular()?;
    if *p.peek() != Tok::End {
        return Err(p.error("expected end of input"));
    }
    Ok(r)
}
