use std::collections::BTreeMap;
use std::path::PathBuf;

use super::{instantiate_pattern, Behaviour, CriterionKind, CriterionSpec, PatternSpec, Scope, ViolationTemplate};
use crate::error::{Error, Result};
use crate::lts::actions::read_label_list;
use crate::lts::{ActionSet, ConcurrencyRelation, Lts};
use crate::mucalc::{parse_formula, Formula};

/// What a property file asks to check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertyBody {
    Pattern(PatternSpec),
    /// A closed formula checked as is, without any completeness criterion.
    Formula(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub body: PropertyBody,
    pub criterion: CriterionKind,
    pub blocking: ActionSet,
    pub concurrency_file: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "scope",
    "behaviour",
    "k",
    "Sa",
    "Sb",
    "Sq",
    "Sr",
    "chain_q",
    "chain_r",
    "criterion",
    "blocking",
    "concurrency_file",
    "formula",
];

/// Drops a `#` comment, leaving `#` inside quoted labels alone.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// `a, b`, `{a, b}`, `!{a}` or `!a`; `{}` is the empty set.
pub fn parse_action_set(text: &str) -> std::result::Result<ActionSet, String> {
    let text = text.trim();
    let (complemented, text) = match text.strip_prefix('!') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, text),
    };
    let inner = match text.strip_prefix('{') {
        Some(rest) => rest
            .strip_suffix('}')
            .ok_or_else(|| "unclosed '{'".to_string())?,
        None => text,
    };
    let set = ActionSet::of(read_label_list(inner, ',')?);
    Ok(if complemented { set.complement() } else { set })
}

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn raw(&self, key: &str) -> Option<&Entry> {
        self.0.get(key)
    }

    fn required(&self, key: &str, context: &str) -> Result<&Entry> {
        self.raw(key).ok_or_else(|| Error::Property {
            line: 0,
            message: format!("{context} requires '{key}'"),
        })
    }

    fn set(&self, key: &str, context: &str) -> Result<ActionSet> {
        let e = self.required(key, context)?;
        parse_action_set(&e.value).map_err(|message| Error::Property {
            line: e.line,
            message: format!("{key}: {message}"),
        })
    }

    fn chain(&self, key: &str) -> Result<Vec<ActionSet>> {
        let e = self.required(key, "chain-response")?;
        e.value
            .split(';')
            .map(|part| {
                parse_action_set(part).map_err(|message| Error::Property {
                    line: e.line,
                    message: format!("{key}: {message}"),
                })
            })
            .collect()
    }
}

fn parse_behaviour(entries: &Entries) -> Result<Behaviour> {
    let e = entries.required("behaviour", "a pattern property")?;
    let err = |message: String| Error::Property {
        line: e.line,
        message,
    };
    let (name, arg) = match e.value.split_once('(') {
        Some((name, rest)) => {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| err("unclosed '('".into()))?;
            (name.trim(), Some(arg.trim()))
        }
        None => (e.value.as_str(), None),
    };
    Ok(match name {
        "existence" => Behaviour::Existence {
            sr: entries.set("Sr", "existence")?,
        },
        "existence-at-least" | "at-least" => {
            let k = match (arg, entries.raw("k")) {
                (Some(a), _) => (a, e.line),
                (None, Some(k)) => (k.value.as_str(), k.line),
                (None, None) => return Err(err("existence-at-least requires 'k'".into())),
            };
            let k = k.0.parse::<usize>().map_err(|_| Error::Property {
                line: k.1,
                message: format!("k must be a natural number, got {:?}", k.0),
            })?;
            Behaviour::AtLeast {
                k,
                sr: entries.set("Sr", "existence-at-least")?,
            }
        }
        "response" => Behaviour::Response {
            sq: entries.set("Sq", "response")?,
            sr: entries.set("Sr", "response")?,
        },
        "chain-response" => Behaviour::ChainResponse {
            q: entries.chain("chain_q")?,
            r: entries.chain("chain_r")?,
        },
        other => return Err(err(format!("unknown behaviour {other:?}"))),
    })
}

fn parse_scope(entries: &Entries) -> Result<Scope> {
    let Some(e) = entries.raw("scope") else {
        return Ok(Scope::Global);
    };
    Ok(match e.value.as_str() {
        "global" => Scope::Global,
        "until" => Scope::Until {
            sb: entries.set("Sb", "until")?,
        },
        "after" => Scope::After {
            sa: entries.set("Sa", "after")?,
        },
        "after-until" => Scope::AfterUntil {
            sa: entries.set("Sa", "after-until")?,
            sb: entries.set("Sb", "after-until")?,
        },
        other => {
            return Err(Error::Property {
                line: e.line,
                message: format!("unknown scope {other:?}"),
            })
        }
    })
}

/// Parses a line-oriented `key = value` property file.
pub fn parse_property(text: &str) -> Result<Property> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| Error::Property {
            line,
            message: "expected 'key = value'".into(),
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Property {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        let entry = Entry {
            line,
            value: value.trim().to_string(),
        };
        if map.insert(key.to_string(), entry).is_some() {
            return Err(Error::Property {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
    }
    let entries = Entries(map);

    let body = match entries.raw("formula") {
        Some(e) => {
            if let Some(k) = ["scope", "behaviour"].iter().find(|k| entries.raw(k).is_some()) {
                return Err(Error::Property {
                    line: entries.raw(k).map_or(0, |x| x.line),
                    message: "a raw formula cannot be combined with a pattern".into(),
                });
            }
            let f = parse_formula(&e.value).map_err(|err| Error::Property {
                line: e.line,
                message: err.to_string(),
            })?;
            PropertyBody::Formula(f)
        }
        None => PropertyBody::Pattern(PatternSpec {
            scope: parse_scope(&entries)?,
            behaviour: parse_behaviour(&entries)?,
        }),
    };

    let criterion = match entries.raw("criterion") {
        Some(e) => e.value.parse().map_err(|_| Error::Property {
            line: e.line,
            message: format!("unknown criterion {:?}", e.value),
        })?,
        None => CriterionKind::Progress,
    };
    let blocking = match entries.raw("blocking") {
        Some(_) => entries.set("blocking", "")?,
        None => ActionSet::empty(),
    };
    Ok(Property {
        body,
        criterion,
        blocking,
        concurrency_file: entries.raw("concurrency_file").map(|e| PathBuf::from(&e.value)),
    })
}

impl Property {
    /// The violation templates of a pattern property; none for a raw formula.
    pub fn templates(&self, lts: &Lts) -> Result<Vec<ViolationTemplate>> {
        match &self.body {
            PropertyBody::Pattern(p) => instantiate_pattern(p, lts.alphabet()),
            PropertyBody::Formula(_) => Ok(Vec::new()),
        }
    }

    /// The property's criterion, with `blocking` replacing its own set when
    /// given.
    pub fn criterion_spec(
        &self,
        blocking: Option<&ActionSet>,
        conc: Option<ConcurrencyRelation>,
    ) -> CriterionSpec {
        let blocking = blocking.unwrap_or(&self.blocking).clone();
        CriterionSpec::named(self.criterion, blocking, conc)
    }

    /// The formulas to check: one per template, or the raw formula. The
    /// property holds iff all of them hold in the initial state.
    pub fn formulas(&self, lts: &Lts, spec: &CriterionSpec, subset_cap: usize) -> Result<Vec<Formula>> {
        match &self.body {
            PropertyBody::Formula(f) => Ok(vec![f.clone()]),
            PropertyBody::Pattern(_) => self
                .templates(lts)?
                .iter()
                .map(|t| spec.build_formula(lts, t, subset_cap))
                .collect(),
        }
    }
}
