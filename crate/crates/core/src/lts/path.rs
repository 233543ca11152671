use std::fmt;

use super::{write_label, ActionId, Lts, StateId, TransitionId};
use crate::error::{Error, Result};

/// A finite path: a start state followed by consecutive transitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    states: Vec<StateId>,
    steps: Vec<TransitionId>,
    actions: Vec<ActionId>,
}

impl Path {
    pub fn empty(start: StateId) -> Path {
        Path {
            states: vec![start],
            steps: Vec::new(),
            actions: Vec::new(),
        }
    }

    pub fn new(lts: &Lts, start: StateId, steps: &[TransitionId]) -> Result<Path> {
        lts.check_state(start)?;
        let mut path = Path::empty(start);
        for &t in steps {
            path.push(lts, t)?;
        }
        Ok(path)
    }

    /// Follows `(label, target)` hops, picking the first matching transition.
    pub fn follow(lts: &Lts, start: StateId, hops: &[(&str, StateId)]) -> Result<Path> {
        lts.check_state(start)?;
        let mut path = Path::empty(start);
        for &(label, target) in hops {
            let action = lts
                .action_id(label)
                .ok_or_else(|| Error::UnknownAction(label.to_string()))?;
            let from = path.end();
            let t = lts
                .outgoing(from)
                .iter()
                .copied()
                .find(|&t| {
                    let tr = lts.transition(t);
                    tr.action == action && tr.target == target
                })
                .ok_or_else(|| {
                    Error::InvalidPath(format!("no transition {from} -{label}-> {target}"))
                })?;
            path.push(lts, t)?;
        }
        Ok(path)
    }

    pub fn push(&mut self, lts: &Lts, t: TransitionId) -> Result<()> {
        let tr = lts
            .transitions()
            .get(t)
            .ok_or_else(|| Error::InvalidPath(format!("unknown transition {t}")))?;
        if tr.source != self.end() {
            return Err(Error::InvalidPath(format!(
                "transition {t} leaves state {} but the path is at {}",
                tr.source,
                self.end()
            )));
        }
        self.steps.push(t);
        self.actions.push(tr.action);
        self.states.push(tr.target);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<TransitionId> {
        let t = self.steps.pop()?;
        self.actions.pop();
        self.states.pop();
        Some(t)
    }

    pub fn start(&self) -> StateId {
        self.states[0]
    }

    pub fn end(&self) -> StateId {
        *self.states.last().unwrap()
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The `len() + 1` visited states.
    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn steps(&self) -> &[TransitionId] {
        &self.steps
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    /// The subpath starting at position `from`.
    pub fn suffix(&self, from: usize) -> Path {
        Path {
            states: self.states[from..].to_vec(),
            steps: self.steps[from..].to_vec(),
            actions: self.actions[from..].to_vec(),
        }
    }

    /// The subpath of the first `len` transitions.
    pub fn prefix(&self, len: usize) -> Path {
        Path {
            states: self.states[..=len].to_vec(),
            steps: self.steps[..len].to_vec(),
            actions: self.actions[..len].to_vec(),
        }
    }

    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::InvalidPath(format!(
                "cannot append a path from {} to one ending in {}",
                other.start(),
                self.end()
            )));
        }
        let mut out = self.clone();
        out.steps.extend_from_slice(&other.steps);
        out.actions.extend_from_slice(&other.actions);
        out.states.extend_from_slice(&other.states[1..]);
        Ok(out)
    }

    pub fn display<'a>(&'a self, lts: &'a Lts) -> PathDisplay<'a> {
        PathDisplay { path: self, lts }
    }
}

pub struct PathDisplay<'a> {
    path: &'a Path,
    lts: &'a Lts,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.path.start())?;
        for (i, &a) in self.path.actions.iter().enumerate() {
            write!(f, " -")?;
            write_label(f, self.lts.action_name(a))?;
            write!(f, "-> s{}", self.path.states[i + 1])?;
        }
        Ok(())
    }
}

/// The infinite path `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    stem: Path,
    cycle: Path,
}

impl Lasso {
    pub fn new(stem: Path, cycle: Path) -> Result<Lasso> {
        if cycle.is_empty() {
            return Err(Error::InvalidPath("a lasso cycle needs a transition".into()));
        }
        if cycle.start() != cycle.end() {
            return Err(Error::InvalidPath("the cycle does not return to its start".into()));
        }
        if stem.end() != cycle.start() {
            return Err(Error::InvalidPath("the stem does not end where the cycle starts".into()));
        }
        Ok(Lasso { stem, cycle })
    }

    pub fn stem(&self) -> &Path {
        &self.stem
    }

    pub fn cycle(&self) -> &Path {
        &self.cycle
    }

    /// The same infinite path with the first stem step moved into the past,
    /// or the cycle rotated when the stem is empty.
    pub fn advance(&self) -> Lasso {
        if !self.stem.is_empty() {
            return Lasso {
                stem: self.stem.suffix(1),
                cycle: self.cycle.clone(),
            };
        }
        let c = &self.cycle;
        let mut states = c.states[1..].to_vec();
        states.push(c.states[1]);
        let mut steps = c.steps[1..].to_vec();
        steps.push(c.steps[0]);
        let mut actions = c.actions[1..].to_vec();
        actions.push(c.actions[0]);
        let cycle = Path {
            states,
            steps,
            actions,
        };
        Lasso {
            stem: Path::empty(cycle.start()),
            cycle,
        }
    }
}

/// A finite path or a lasso.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Run {
    Finite(Path),
    Lasso(Lasso),
}

impl Run {
    pub fn start(&self) -> StateId {
        match self {
            Run::Finite(p) => p.start(),
            Run::Lasso(l) => l.stem.start(),
        }
    }

    /// The finite part: the whole path, or the stem of a lasso.
    pub fn stem(&self) -> &Path {
        match self {
            Run::Finite(p) => p,
            Run::Lasso(l) => &l.stem,
        }
    }

    pub fn cycle(&self) -> Option<&Path> {
        match self {
            Run::Finite(_) => None,
            Run::Lasso(l) => Some(&l.cycle),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Run::Finite(_))
    }

    /// Whether `prefix` is a prefix of this run.
    pub fn has_prefix(&self, prefix: &Path) -> bool {
        if prefix.start() != self.start() {
            return false;
        }
        let mut steps = self.stem().steps().iter().copied();
        let cycle = self.cycle().map(|c| c.steps().to_vec()).unwrap_or_default();
        let mut unrolled = cycle.iter().copied().cycle();
        prefix.steps().iter().all(|&t| match steps.next() {
            Some(s) => s == t,
            None => !cycle.is_empty() && unrolled.next() == Some(t),
        })
    }

    /// Renders the run in the trace format (`stem:` line plus an optional
    /// `cycle:` line).
    pub fn to_trace(&self, lts: &Lts) -> String {
        match self {
            Run::Finite(p) => format!("stem: {}", p.display(lts)),
            Run::Lasso(l) => format!(
                "stem: {}\ncycle: {}",
                l.stem.display(lts),
                l.cycle.display(lts)
            ),
        }
    }
}

/// Concatenates a finite prefix with a path or lasso.
pub fn append_paths(prefix: &Path, suffix: &Run) -> Result<Run> {
    match suffix {
        Run::Finite(p) => Ok(Run::Finite(prefix.concat(p)?)),
        Run::Lasso(l) => Ok(Run::Lasso(Lasso::new(
            prefix.concat(&l.stem)?,
            l.cycle.clone(),
        )?)),
    }
}
