use std::collections::BTreeSet;

use super::{Lts, Transition};
use crate::error::{Error, Result};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Aut {
        line,
        message: message.into(),
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.text.len() - trimmed.len();
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(err(self.line, format!("expected '{c}'")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(err(self.line, format!("expected '{kw}'")))
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(err(self.line, "expected a number"));
        }
        let n = self.rest()[..digits]
            .parse()
            .map_err(|_| err(self.line, "number out of range"))?;
        self.pos += digits;
        Ok(n)
    }

    fn quoted(&mut self) -> Result<String> {
        self.expect('"')?;
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(err(self.line, "unterminated quoted label"))
    }

    /// A quoted label, or a bare one running up to the next top-level comma.
    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        if self.rest().starts_with('"') {
            return self.quoted();
        }
        let end = self
            .rest()
            .rfind(',')
            .ok_or_else(|| err(self.line, "expected a label"))?;
        let label = self.rest()[..end].trim().to_string();
        if label.is_empty() {
            return Err(err(self.line, "empty label"));
        }
        self.pos += end;
        Ok(label)
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(err(self.line, format!("trailing input {:?}", self.rest())))
        }
    }
}

/// Parses the Aldebaran `.aut` format, including the optional
/// `%alphabet "a" "b"` line declaring labels without transitions.
pub fn parse_aut(text: &str) -> Result<Lts> {
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
    let mut c = Cursor::new(header, hline);
    c.keyword("des")?;
    c.expect('(')?;
    let initial = c.number()?;
    c.expect(',')?;
    let declared_transitions = c.number()?;
    c.expect(',')?;
    let num_states = c.number()?;
    c.expect(')')?;
    c.finish()?;
    if initial >= num_states {
        return Err(err(hline, format!("initial state {initial} out of range")));
    }

    let mut labels: BTreeSet<String> = BTreeSet::new();
    let mut raw: Vec<(usize, String, usize)> = Vec::new();
    for (line, text) in lines {
        let trimmed = text.trim_start();
        if let Some(rest) = trimmed.strip_prefix("%alphabet") {
            let mut c = Cursor::new(rest, line);
            loop {
                c.skip_ws();
                if c.rest().is_empty() {
                    break;
                }
                labels.insert(c.quoted()?);
            }
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let mut c = Cursor::new(text, line);
        c.expect('(')?;
        let from = c.number()?;
        c.expect(',')?;
        let label = c.label()?;
        c.expect(',')?;
        let to = c.number()?;
        c.expect(')')?;
        c.finish()?;
        for s in [from, to] {
            if s >= num_states {
                return Err(err(line, format!("state {s} out of range 0..{num_states}")));
            }
        }
        labels.insert(label.clone());
        raw.push((from, label, to));
    }
    if raw.len() != declared_transitions {
        return Err(err(
            hline,
            format!(
                "header declares {declared_transitions} transitions, found {}",
                raw.len()
            ),
        ));
    }

    let alphabet: Vec<String> = labels.into_iter().collect();
    let transitions = raw
        .into_iter()
        .map(|(source, label, target)| Transition {
            source,
            action: alphabet.binary_search(&label).unwrap(),
            target,
        })
        .collect();
    Lts::from_parts(num_states, initial, alphabet, transitions)
}
