use std::collections::BTreeSet;
use std::fmt;

/// A set of action labels, either listed literally or as the complement of a
/// listed set. Complements are always taken relative to the alphabet of the
/// LTS the set is eventually resolved against.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSet {
    members: BTreeSet<String>,
    complemented: bool,
}

impl ActionSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every action of the alphabet (`!{}`).
    pub fn all() -> Self {
        ActionSet {
            members: BTreeSet::new(),
            complemented: true,
        }
    }

    pub fn of<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ActionSet {
            members: labels.into_iter().map(Into::into).collect(),
            complemented: false,
        }
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        Self::of([label])
    }

    /// The complement of `{labels}`.
    pub fn all_except<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::of(labels).complement()
    }

    pub fn is_complemented(&self) -> bool {
        self.complemented
    }

    /// The listed labels; for a complemented set these are the excluded ones.
    pub fn listed(&self) -> &BTreeSet<String> {
        &self.members
    }

    /// True when the set is empty regardless of the alphabet.
    pub fn is_syntactically_empty(&self) -> bool {
        !self.complemented && self.members.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.members.contains(label) != self.complemented
    }

    pub fn complement(&self) -> Self {
        ActionSet {
            members: self.members.clone(),
            complemented: !self.complemented,
        }
    }

    pub fn union(&self, other: &ActionSet) -> Self {
        match (self.complemented, other.complemented) {
            (false, false) => ActionSet {
                members: self.members.union(&other.members).cloned().collect(),
                complemented: false,
            },
            (false, true) => ActionSet {
                members: other.members.difference(&self.members).cloned().collect(),
                complemented: true,
            },
            (true, false) => other.union(self),
            (true, true) => ActionSet {
                members: self.members.intersection(&other.members).cloned().collect(),
                complemented: true,
            },
        }
    }

    pub fn intersection(&self, other: &ActionSet) -> Self {
        // De Morgan over the union above.
        self.complement().union(&other.complement()).complement()
    }

    pub fn difference(&self, other: &ActionSet) -> Self {
        self.intersection(&other.complement())
    }

    /// The members of this set within `alphabet`, in alphabet order.
    pub fn members_in<'a>(&self, alphabet: &'a [String]) -> Vec<&'a str> {
        alphabet
            .iter()
            .filter(|a| self.contains(a))
            .map(String::as_str)
            .collect()
    }

    /// Resolves against `alphabet` into a literal set.
    pub fn materialize(&self, alphabet: &[String]) -> ActionSet {
        ActionSet::of(self.members_in(alphabet))
    }

    /// Listed labels that are not part of `alphabet`.
    pub fn labels_outside(&self, alphabet: &[String]) -> Vec<String> {
        self.members
            .iter()
            .filter(|l| alphabet.binary_search(l).is_err())
            .cloned()
            .collect()
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complemented {
            write!(f, "!")?;
        }
        write!(f, "{{")?;
        for (i, label) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write_label(f, label)?;
        }
        write!(f, "}}")
    }
}

const KEYWORDS: &[&str] = &["tt", "ff", "mu", "nu", "eps"];

/// Whether `label` can be written without quotes in the textual grammars.
pub fn is_plain_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !KEYWORDS.contains(&label)
}

/// Writes `label` bare when possible and quoted (with `\"` and `\\` escapes)
/// otherwise.
pub fn write_label(f: &mut impl fmt::Write, label: &str) -> fmt::Result {
    if is_plain_label(label) {
        f.write_str(label)
    } else {
        write_quoted(f, label)
    }
}

pub fn write_quoted(f: &mut impl fmt::Write, label: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in label.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// Reads one label from the start of `input`, quoted or bare, returning it
/// with the remaining input.
pub(crate) fn read_label(input: &str) -> Result<(String, &str), String> {
    let input = input.trim_start();
    if let Some(body) = input.strip_prefix('"') {
        let mut out = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => return Ok((out, &body[i + 1..])),
                '\\' => match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                c => out.push(c),
            }
        }
        return Err("unterminated quoted label".into());
    }
    let end = input
        .find(|c: char| c.is_whitespace() || ",;|!{}()\"".contains(c))
        .unwrap_or(input.len());
    if end == 0 {
        return Err(match input.chars().next() {
            Some(c) => format!("expected a label, found {c:?}"),
            None => "expected a label".into(),
        });
    }
    Ok((input[..end].to_string(), &input[end..]))
}

/// Parses a `sep`-separated list of labels; blank input is the empty list.
pub(crate) fn read_label_list(input: &str, sep: char) -> Result<Vec<String>, String> {
    let mut rest = input.trim();
    let mut out = Vec::new();
    if rest.is_empty() {
        return Ok(out);
    }
    loop {
        let (label, r) = read_label(rest)?;
        out.push(label);
        rest = r.trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest
            .strip_prefix(sep)
            .ok_or_else(|| format!("expected '{sep}' between labels"))?;
    }
}
