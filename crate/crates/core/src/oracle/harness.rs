use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random::{random_blocking, random_lts, random_pattern, random_relation, RandomLtsParams};
use super::{cross_validate, SearchBounds};
use crate::error::{Error, Result};
use crate::lts::{ActionSet, ConcurrencyRelation, Lts};
use crate::templates::{instantiate_pattern, CriterionKind, CriterionSpec, PatternSpec, ViolationTemplate};

/// Settings of a randomised cross-validation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessConfig {
    pub seed: u64,
    pub instances: usize,
    pub params: RandomLtsParams,
    pub criteria: Vec<CriterionKind>,
    /// Overrides for the per-instance default bounds.
    pub bounds_stem: Option<usize>,
    pub bounds_cycle: Option<usize>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 0,
            instances: 200,
            params: RandomLtsParams::default(),
            criteria: CriterionKind::ALL.to_vec(),
            bounds_stem: None,
            bounds_cycle: None,
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults.
pub fn parse_harness_config(text: &str) -> Result<HarnessConfig> {
    let mut config = HarnessConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| Error::Config { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, found {body:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| err(format!("{key}: expected a number, found {value:?}")))
        };
        match key {
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|_| err(format!("seed: expected a number, found {value:?}")))?
            }
            "instances" => config.instances = number()?,
            "max_states" => config.params.max_states = number()?,
            "max_actions" => config.params.max_actions = number()?,
            "max_transitions" => config.params.max_transitions = number()?,
            "bounds_stem" => config.bounds_stem = Some(number()?),
            "bounds_cycle" => config.bounds_cycle = Some(number()?),
            "criteria" => {
                config.criteria = value
                    .split(',')
                    .map(|c| c.parse().map_err(|e: Error| err(e.to_string())))
                    .collect::<Result<_>>()?
            }
            _ => return Err(err(format!("unknown key {key:?}"))),
        }
    }
    if config.params.max_states == 0 || config.params.max_actions == 0 {
        return Err(Error::Config {
            line: 0,
            message: "max_states and max_actions must be positive".into(),
        });
    }
    Ok(config)
}

/// One formula-versus-oracle comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessLine {
    pub instance: usize,
    pub criterion: CriterionKind,
    pub blocking: String,
    pub relation: Option<String>,
    pub template: usize,
    pub states: usize,
    pub actions: usize,
    pub transitions: usize,
    /// `None` when a resource guard stopped the check.
    pub agree: Option<bool>,
    pub formula_verdict: Option<bool>,
    pub saturated: bool,
    pub detail: Option<String>,
}

impl fmt::Display for HarnessLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.agree {
            Some(true) => "AGREE",
            Some(false) => "DISAGREE",
            None => "SKIPPED",
        };
        write!(
            f,
            "{tag} instance={} states={} actions={} transitions={} criterion={} B={} template={}",
            self.instance,
            self.states,
            self.actions,
            self.transitions,
            self.criterion,
            self.blocking,
            self.template
        )?;
        if let Some(r) = &self.relation {
            write!(f, " relation={r}")?;
        }
        if let Some(v) = self.formula_verdict {
            write!(f, " formula={v}")?;
        }
        if self.saturated {
            f.write_str(" saturated")?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({})", d.replace('\n', " / "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct HarnessReport {
    pub lines: Vec<HarnessLine>,
    pub instances: usize,
    pub elapsed: Duration,
}

impl HarnessReport {
    pub fn agreed(&self) -> usize {
        self.lines.iter().filter(|l| l.agree == Some(true)).count()
    }

    pub fn disagreed(&self) -> usize {
        self.lines.iter().filter(|l| l.agree == Some(false)).count()
    }

    pub fn skipped(&self) -> usize {
        self.lines.iter().filter(|l| l.agree.is_none()).count()
    }

    pub fn saturated(&self) -> usize {
        self.lines.iter().filter(|l| l.saturated).count()
    }

    pub fn all_agree(&self) -> bool {
        self.disagreed() == 0 && self.skipped() == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "instances={} checks={} agree={} disagree={} skipped={} saturated={} elapsed={:.2}s",
            self.instances,
            self.lines.len(),
            self.agreed(),
            self.disagreed(),
            self.skipped(),
            self.saturated(),
            self.elapsed.as_secs_f64()
        )
    }
}

impl fmt::Display for HarnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        write!(f, "{}", self.summary())
    }
}

/// One generated model with everything a cross-validation run needs.
#[derive(Clone, Debug)]
pub struct HarnessInstance {
    pub lts: Lts,
    pub pattern: PatternSpec,
    pub templates: Vec<ViolationTemplate>,
    /// The nonempty blocking set used besides the empty one.
    pub blocking: ActionSet,
    /// The validated relation used for justness besides the empty one.
    pub relation: ConcurrencyRelation,
    pub bounds: SearchBounds,
}

/// The seeded instances of a run, in order.
pub fn generate_corpus(config: &HarnessConfig) -> Result<Vec<HarnessInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.instances)
        .map(|_| {
            let lts = random_lts(&mut rng, &config.params);
            let pattern = random_pattern(&mut rng, lts.alphabet());
            let templates = instantiate_pattern(&pattern, lts.alphabet())?;
            let blocking = random_blocking(&mut rng, lts.alphabet());
            let relation = random_relation(&mut rng, &lts);
            let mut bounds = SearchBounds::default_for(&lts);
            bounds.max_stem = config.bounds_stem.unwrap_or(bounds.max_stem);
            bounds.max_cycle = config.bounds_cycle.unwrap_or(bounds.max_cycle);
            Ok(HarnessInstance {
                lts,
                pattern,
                templates,
                blocking,
                relation,
                bounds,
            })
        })
        .collect()
}

fn relation_text(c: &ConcurrencyRelation) -> String {
    let pairs: Vec<String> = c.pairs().map(|(a, b)| format!("{a}~{b}")).collect();
    format!("{{{}}}", pairs.join(","))
}

/// Cross-validates every template of every corpus instance under every
/// configured criterion, with an empty and a random blocking set. Justness
/// is run with the empty and a random valid relation.
pub fn run_harness(config: &HarnessConfig) -> Result<HarnessReport> {
    let clock = Instant::now();
    let mut report = HarnessReport {
        instances: config.instances,
        ..HarnessReport::default()
    };
    for (instance, inst) in generate_corpus(config)?.iter().enumerate() {
        let lts = &inst.lts;
        for &kind in &config.criteria {
            for blocking in [ActionSet::empty(), inst.blocking.clone()] {
                let relations = if kind == CriterionKind::Justness {
                    vec![Some(ConcurrencyRelation::empty()), Some(inst.relation.clone())]
                } else {
                    vec![None]
                };
                for conc in relations {
                    let relation = conc.as_ref().map(relation_text);
                    let spec = CriterionSpec::named(kind, blocking.clone(), conc);
                    for (template, t) in inst.templates.iter().enumerate() {
                        let mut line = HarnessLine {
                            instance,
                            criterion: kind,
                            blocking: blocking.to_string(),
                            relation: relation.clone(),
                            template,
                            states: lts.num_states(),
                            actions: lts.num_actions(),
                            transitions: lts.transitions().len(),
                            agree: None,
                            formula_verdict: None,
                            saturated: false,
                            detail: None,
                        };
                        match cross_validate(lts, t, &spec, &inst.bounds) {
                            Ok(r) => {
                                line.agree = Some(r.agree);
                                line.formula_verdict = Some(r.formula_verdict);
                                line.saturated = r.saturated;
                                if !r.agree {
                                    line.detail = Some(match &r.counterexample {
                                        Some(run) => run.to_trace(lts),
                                        None => format!("no run found; lts: {}", lts.to_aut()),
                                    });
                                }
                            }
                            Err(e) if e.is_resource_guard() => line.detail = Some(e.to_string()),
                            Err(e) => return Err(e),
                        }
                        report.lines.push(line);
                    }
                }
            }
        }
    }
    report.elapsed = clock.elapsed();
    Ok(report)
}
