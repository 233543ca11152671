use crate::error::{Error, Result};
use crate::lts::actions::read_label;
use crate::lts::{Lasso, Lts, Path, Run, StateId};

fn read_state(input: &str) -> std::result::Result<(StateId, &str), String> {
    let input = input.trim_start();
    let body = input.strip_prefix('s').unwrap_or(input);
    let end = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
    let state = body[..end]
        .parse()
        .map_err(|_| format!("expected a state, found {:?}", input.split_whitespace().next().unwrap_or("")))?;
    Ok((state, &body[end..]))
}

/// `s0 -a-> s1 -"b c"-> s2`
fn read_path(lts: &Lts, input: &str) -> std::result::Result<Path, String> {
    let (start, mut rest) = read_state(input)?;
    let mut hops: Vec<(String, StateId)> = Vec::new();
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let body = rest
            .strip_prefix('-')
            .ok_or_else(|| format!("expected '-', found {:?}", rest))?;
        let (label, after) = if body.trim_start().starts_with('"') {
            read_label(body)?
        } else {
            let end = body.find("->").ok_or("expected '->'")?;
            (body[..end].trim().to_string(), &body[end..])
        };
        let after = after
            .trim_start()
            .strip_prefix("->")
            .ok_or("expected '->'")?;
        let (target, r) = read_state(after)?;
        hops.push((label, target));
        rest = r;
    }
    let hops: Vec<(&str, StateId)> = hops.iter().map(|(l, t)| (l.as_str(), *t)).collect();
    Path::follow(lts, start, &hops).map_err(|e| e.to_string())
}

/// Parses a `stem:` line and an optional `cycle:` line.
pub fn parse_trace(lts: &Lts, text: &str) -> Result<Run> {
    let mut stem: Option<(usize, Path)> = None;
    let mut cycle: Option<(usize, Path)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Trace { line, message };
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (slot, rest) = if let Some(r) = body.strip_prefix("stem:") {
            (&mut stem, r)
        } else if let Some(r) = body.strip_prefix("cycle:") {
            (&mut cycle, r)
        } else {
            return Err(err("expected 'stem:' or 'cycle:'".into()));
        };
        if slot.is_some() {
            return Err(err("repeated line".into()));
        }
        *slot = Some((line, read_path(lts, rest).map_err(err)?));
    }
    let Some((_, stem)) = stem else {
        return Err(Error::Trace {
            line: 0,
            message: "missing 'stem:' line".into(),
        });
    };
    match cycle {
        None => Ok(Run::Finite(stem)),
        Some((line, cycle)) => Lasso::new(stem, cycle)
            .map(Run::Lasso)
            .map_err(|e| Error::Trace {
                line,
                message: e.to_string(),
            }),
    }
}
