use fixedbitset::FixedBitSet;

use crate::lts::{ActionId, ActionMask, Lts, Path};
use crate::mucalc::Regular;

/// Position automaton of a regular formula: state 0 is initial, state `p + 1`
/// stands for position `p`. There are no epsilon moves.
#[derive(Clone, Debug)]
pub struct Nfa {
    /// `delta[q][a]`: successors of state `q` on action `a`.
    delta: Vec<Vec<FixedBitSet>>,
    accepting: FixedBitSet,
}

struct Info {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

struct Builder {
    masks: Vec<ActionMask>,
    follow: Vec<Vec<usize>>,
}

impl Builder {
    fn visit(&mut self, lts: &Lts, r: &Regular) -> Info {
        match r {
            Regular::Epsilon => Info {
                nullable: true,
                first: vec![],
                last: vec![],
            },
            Regular::Actions(set) => {
                self.masks.push(lts.mask_lenient(set));
                self.follow.push(Vec::new());
                let p = self.masks.len() - 1;
                Info {
                    nullable: false,
                    first: vec![p],
                    last: vec![p],
                }
            }
            Regular::Concat(l, r) => {
                let l = self.visit(lts, l);
                let r = self.visit(lts, r);
                for &p in &l.last {
                    self.follow[p].extend(&r.first);
                }
                let mut first = l.first;
                if l.nullable {
                    first.extend(&r.first);
                }
                let mut last = r.last;
                if r.nullable {
                    last.extend(&l.last);
                }
                Info {
                    nullable: l.nullable && r.nullable,
                    first,
                    last,
                }
            }
            Regular::Union(l, r) => {
                let mut l = self.visit(lts, l);
                let r = self.visit(lts, r);
                l.first.extend(r.first);
                l.last.extend(r.last);
                Info {
                    nullable: l.nullable || r.nullable,
                    first: l.first,
                    last: l.last,
                }
            }
            Regular::Star(inner) => {
                let i = self.visit(lts, inner);
                for &p in &i.last {
                    self.follow[p].extend(&i.first);
                }
                Info {
                    nullable: true,
                    first: i.first,
                    last: i.last,
                }
            }
        }
    }
}

impl Nfa {
    /// Labels outside the alphabet are dropped: they never occur on a path.
    pub fn new(lts: &Lts, r: &Regular) -> Nfa {
        let mut b = Builder {
            masks: Vec::new(),
            follow: Vec::new(),
        };
        let info = b.visit(lts, r);
        let n = b.masks.len() + 1;
        let empty = FixedBitSet::with_capacity(n);
        let mut delta = vec![vec![empty.clone(); lts.num_actions()]; n];
        let mut add = |from: usize, targets: &[usize]| {
            for &p in targets {
                for a in b.masks[p].ones() {
                    delta[from][a].insert(p + 1);
                }
            }
        };
        add(0, &info.first);
        for p in 0..b.masks.len() {
            add(p + 1, &b.follow[p]);
        }
        let mut accepting = empty;
        if info.nullable {
            accepting.insert(0);
        }
        for &p in &info.last {
            accepting.insert(p + 1);
        }
        Nfa { delta, accepting }
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.num_states());
        s.insert(0);
        s
    }

    pub fn step(&self, from: &FixedBitSet, a: ActionId) -> FixedBitSet {
        let mut next = FixedBitSet::with_capacity(self.num_states());
        for q in from.ones() {
            next.union_with(&self.delta[q][a]);
        }
        next
    }

    pub fn accepts(&self, set: &FixedBitSet) -> bool {
        !set.is_disjoint(&self.accepting)
    }

    pub fn accepting(&self) -> &FixedBitSet {
        &self.accepting
    }

    pub fn matches(&self, word: &[ActionId]) -> bool {
        let end = word.iter().fold(self.initial(), |s, &a| self.step(&s, a));
        self.accepts(&end)
    }
}

/// Whether the action sequence of `p` lies in the language of `r`.
pub fn matches_regular(lts: &Lts, p: &Path, r: &Regular) -> bool {
    Nfa::new(lts, r).matches(p.actions())
}
