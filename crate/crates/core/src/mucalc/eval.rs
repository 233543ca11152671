use std::collections::BTreeMap;

use super::{check_syntactic_monotonicity, expand_regular_modalities, Formula, Regular};
use crate::error::{Error, Result};
use crate::lts::{Lts, StateId, StateSet};

/// Interpretation of free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Environment(BTreeMap<String, StateSet>);

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, name: impl Into<String>, states: StateSet) -> Self {
        self.0.insert(name.into(), states);
        self
    }

    pub fn get(&self, name: &str) -> Option<&StateSet> {
        self.0.get(name)
    }
}

enum Node {
    False,
    True,
    Slot(usize),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    And(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    /// Edges `(source, target)` labelled by the modality's action set.
    Diamond(Vec<(StateId, StateId)>, Box<Node>),
    Box(Vec<(StateId, StateId)>, Box<Node>),
    Mu(usize, Box<Node>),
    Nu(usize, Box<Node>),
}

struct Compiler<'a> {
    lts: &'a Lts,
    env: &'a Environment,
    scopes: Vec<(String, usize)>,
    initial: Vec<Option<StateSet>>,
}

impl Compiler<'_> {
    fn slot(&mut self, value: Option<StateSet>) -> usize {
        self.initial.push(value);
        self.initial.len() - 1
    }

    fn edges(&self, r: &Regular) -> Result<Vec<(StateId, StateId)>> {
        let Regular::Actions(set) = r else {
            unreachable!("regular modalities are expanded before compilation")
        };
        let mask = self.lts.mask(set)?;
        Ok(self
            .lts
            .transitions()
            .iter()
            .filter(|t| mask.contains(t.action))
            .map(|t| (t.source, t.target))
            .collect())
    }

    fn compile(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::False => Node::False,
            Formula::True => Node::True,
            Formula::Var(x) => {
                if let Some((_, s)) = self.scopes.iter().rev().find(|(n, _)| n == x) {
                    Node::Slot(*s)
                } else {
                    let v = self
                        .env
                        .get(x)
                        .ok_or_else(|| Error::UnboundVariable(x.clone()))?;
                    let mut v = v.clone();
                    v.grow(self.lts.num_states());
                    Node::Slot(self.slot(Some(v)))
                }
            }
            Formula::Not(g) => Node::Not(Box::new(self.compile(g)?)),
            Formula::Or(l, r) => Node::Or(Box::new(self.compile(l)?), Box::new(self.compile(r)?)),
            Formula::And(l, r) => {
                Node::And(Box::new(self.compile(l)?), Box::new(self.compile(r)?))
            }
            Formula::Implies(l, r) => {
                Node::Implies(Box::new(self.compile(l)?), Box::new(self.compile(r)?))
            }
            Formula::Diamond(r, g) => Node::Diamond(self.edges(r)?, Box::new(self.compile(g)?)),
            Formula::BoxOp(r, g) => Node::Box(self.edges(r)?, Box::new(self.compile(g)?)),
            Formula::Mu(x, g) | Formula::Nu(x, g) => {
                let s = self.slot(None);
                self.scopes.push((x.clone(), s));
                let body = self.compile(g);
                self.scopes.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::Mu(..)) {
                    Node::Mu(s, body)
                } else {
                    Node::Nu(s, body)
                }
            }
        })
    }
}

struct Machine<'a> {
    lts: &'a Lts,
    vals: Vec<StateSet>,
}

impl Machine<'_> {
    fn eval(&mut self, n: &Node) -> StateSet {
        match n {
            Node::False => self.lts.empty_state_set(),
            Node::True => self.lts.full_state_set(),
            Node::Slot(s) => self.vals[*s].clone(),
            Node::Not(g) => {
                let mut v = self.eval(g);
                v.toggle_range(..);
                v
            }
            Node::Or(l, r) => {
                let mut v = self.eval(l);
                v.union_with(&self.eval(r));
                v
            }
            Node::And(l, r) => {
                let mut v = self.eval(l);
                v.intersect_with(&self.eval(r));
                v
            }
            Node::Implies(l, r) => {
                let mut v = self.eval(l);
                v.toggle_range(..);
                v.union_with(&self.eval(r));
                v
            }
            Node::Diamond(edges, g) => {
                let inner = self.eval(g);
                let mut v = self.lts.empty_state_set();
                for &(s, t) in edges {
                    if inner.contains(t) {
                        v.insert(s);
                    }
                }
                v
            }
            Node::Box(edges, g) => {
                let inner = self.eval(g);
                let mut v = self.lts.full_state_set();
                for &(s, t) in edges {
                    if !inner.contains(t) {
                        v.set(s, false);
                    }
                }
                v
            }
            Node::Mu(s, g) => self.fixpoint(*s, g, self.lts.empty_state_set()),
            Node::Nu(s, g) => self.fixpoint(*s, g, self.lts.full_state_set()),
        }
    }

    fn fixpoint(&mut self, slot: usize, body: &Node, start: StateSet) -> StateSet {
        self.vals[slot] = start;
        loop {
            let next = self.eval(body);
            if next == self.vals[slot] {
                return next;
            }
            self.vals[slot] = next;
        }
    }
}

fn prepare<'a>(lts: &'a Lts, f: &Formula, env: &'a Environment) -> Result<(Node, Machine<'a>)> {
    if let Err(v) = check_syntactic_monotonicity(f) {
        let msg: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::NonMonotonic(msg.join("; ")));
    }
    let core = expand_regular_modalities(f);
    let mut c = Compiler {
        lts,
        env,
        scopes: Vec::new(),
        initial: Vec::new(),
    };
    let node = c.compile(&core)?;
    let vals = c
        .initial
        .into_iter()
        .map(|v| v.unwrap_or_else(|| lts.empty_state_set()))
        .collect();
    Ok((node, Machine { lts, vals }))
}

/// The set of states satisfying `f`, with free variables taken from `env`.
pub fn evaluate(lts: &Lts, f: &Formula, env: &Environment) -> Result<StateSet> {
    let (node, mut m) = prepare(lts, f, env)?;
    Ok(m.eval(&node))
}

/// Whether the initial state satisfies the closed formula `f`.
pub fn satisfies(lts: &Lts, f: &Formula) -> Result<bool> {
    Ok(evaluate(lts, f, &Environment::new())?.contains(lts.initial()))
}

/// The `i`-th approximant `T^i(∅)` of the least fixpoint formula `binder`.
pub fn least_fixpoint_approximant(
    lts: &Lts,
    binder: &Formula,
    i: usize,
    env: &Environment,
) -> Result<StateSet> {
    if !matches!(binder, Formula::Mu(..)) {
        return Err(Error::NotLeastFixpoint);
    }
    if i > lts.num_states() {
        return Err(Error::ApproximantOutOfRange {
            index: i,
            max: lts.num_states(),
        });
    }
    let (node, mut m) = prepare(lts, binder, env)?;
    let Node::Mu(slot, body) = node else {
        unreachable!("expansion keeps the outer binder")
    };
    m.vals[slot] = lts.empty_state_set();
    for _ in 0..i {
        m.vals[slot] = m.eval(&body);
    }
    Ok(m.vals[slot].clone())
}
