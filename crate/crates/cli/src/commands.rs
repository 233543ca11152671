use std::fmt;
use std::fs;
use std::path::Path;

use faircheck_core::lts::{
    parse_aut, parse_interference_list, validate_concurrency_relation, ActionSet, ConcurrencyRelation, Lts,
};
use faircheck_core::mucalc::{satisfies, simplify, Formula};
use faircheck_core::oracle::{
    oracle_admits_violating, parse_harness_config, run_harness, SearchBounds,
};
use faircheck_core::predicates::{is_violating, parse_trace, satisfies_progress, CriterionChecker};
use faircheck_core::templates::{parse_action_set, parse_property, CriterionKind, CriterionSpec, Property};
use faircheck_core::Error;

use crate::output::Output;
use crate::{BoundsArgs, Command, FormulaArgs};

/// A diagnostic and the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 2,
        }
    }

    /// A core error, attributed to `file` when it came from reading one.
    fn core(file: Option<&Path>, e: Error) -> Self {
        let code = if e.is_resource_guard() { 3 } else { 2 };
        let message = match file {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        };
        Failure { message, code }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_lts(path: &Path) -> Result<Lts, Failure> {
    parse_aut(&read(path)?).map_err(|e| Failure::core(Some(path), e))
}

fn load_property(path: &Path) -> Result<Property, Failure> {
    parse_property(&read(path)?).map_err(|e| Failure::core(Some(path), e))
}

fn load_relation(lts: &Lts, path: &Path) -> Result<ConcurrencyRelation, Failure> {
    parse_interference_list(&read(path)?, lts.alphabet()).map_err(|e| Failure::core(Some(path), e))
}

/// The property's own relation file, resolved next to the property file.
fn property_relation(lts: &Lts, property: &Property, at: &Path) -> Result<Option<ConcurrencyRelation>, Failure> {
    let Some(file) = &property.concurrency_file else {
        return Ok(None);
    };
    let path = match at.parent() {
        Some(dir) if file.is_relative() => dir.join(file),
        _ => file.clone(),
    };
    load_relation(lts, &path).map(Some)
}

fn blocking_flag(text: Option<&str>) -> Result<Option<ActionSet>, Failure> {
    text.map(|t| parse_action_set(t).map_err(|e| Failure::input(format!("--blocking: {e}"))))
        .transpose()
}

fn criteria_flag(text: Option<&str>) -> Result<Option<Vec<CriterionKind>>, Failure> {
    text.map(|t| {
        t.split(',')
            .map(|c| c.parse().map_err(|e: Error| Failure::input(format!("--criteria: {e}"))))
            .collect()
    })
    .transpose()
}

fn search_bounds(lts: &Lts, args: &BoundsArgs) -> SearchBounds {
    let mut bounds = SearchBounds::default_for(lts);
    bounds.max_stem = args.bounds_stem.unwrap_or(bounds.max_stem);
    bounds.max_cycle = args.bounds_cycle.unwrap_or(bounds.max_cycle);
    bounds
}

struct Prepared {
    lts: Lts,
    property: Property,
    spec: CriterionSpec,
    formulas: Vec<Formula>,
}

fn prepare(lts_path: &Path, prop_path: &Path, args: &FormulaArgs) -> Result<Prepared, Failure> {
    let lts = load_lts(lts_path)?;
    let property = load_property(prop_path)?;
    let conc = property_relation(&lts, &property, prop_path)?;
    let blocking = blocking_flag(args.blocking.as_deref())?;
    let spec = property.criterion_spec(blocking.as_ref(), conc);
    let formulas = property
        .formulas(&lts, &spec, args.subset_cap)
        .map_err(|e| Failure::core(Some(prop_path), e))?;
    let formulas = if args.simplify {
        formulas.iter().map(|f| simplify(f, lts.alphabet())).collect()
    } else {
        formulas
    };
    Ok(Prepared {
        lts,
        property,
        spec,
        formulas,
    })
}

pub fn run(command: Command, out: &mut Output) -> Outcome {
    match command {
        Command::Check {
            lts,
            property,
            formula,
            with_oracle,
            bounds,
        } => check(&lts, &property, &formula, with_oracle.then_some(&bounds), out),
        Command::Generate { lts, property, formula } => generate(&lts, &property, &formula, out),
        Command::ValidateConc { lts, relation } => validate_conc(&lts, &relation, out),
        Command::CheckTrace {
            lts,
            trace,
            criteria,
            blocking,
            conc,
            property,
        } => check_trace(
            &lts,
            &trace,
            criteria.as_deref(),
            blocking.as_deref(),
            conc.as_deref(),
            property.as_deref(),
            out,
        ),
        Command::Crossval {
            config,
            seed,
            criteria,
            bounds,
        } => crossval(&config, seed, criteria.as_deref(), &bounds, out),
    }
}

fn check(
    lts_path: &Path,
    prop_path: &Path,
    args: &FormulaArgs,
    oracle: Option<&BoundsArgs>,
    out: &mut Output,
) -> Outcome {
    let p = prepare(lts_path, prop_path, args)?;
    let raw = p.property.templates(&p.lts).map_err(|e| Failure::core(Some(prop_path), e))?.is_empty();
    if !raw {
        out.field("criterion", p.spec.name());
        out.field("blocking", &p.spec.blocking);
    }
    let mut satisfied = true;
    for (i, f) in p.formulas.iter().enumerate() {
        let holds = satisfies(&p.lts, f).map_err(|e| Failure::core(None, e))?;
        satisfied &= holds;
        out.field(&format!("formula {}", i + 1), f);
        out.field(&format!("holds {}", i + 1), holds);
    }
    out.verdict(if satisfied { "SATISFIED" } else { "VIOLATED" }, satisfied);

    let Some(bounds_args) = oracle else {
        return Ok(if satisfied { 0 } else { 1 });
    };
    if raw {
        out.field("oracle", "not applicable to a raw formula");
        return Ok(if satisfied { 0 } else { 1 });
    }
    let bounds = search_bounds(&p.lts, bounds_args);
    let templates = p.property.templates(&p.lts).map_err(|e| Failure::core(Some(prop_path), e))?;
    let mut witness = None;
    let mut saturated = false;
    for t in &templates {
        let o = oracle_admits_violating(&p.lts, t, &p.spec, &bounds).map_err(|e| Failure::core(None, e))?;
        saturated |= o.saturated;
        if o.witness.is_some() {
            witness = o.witness;
            break;
        }
    }
    let oracle_ok = witness.is_none();
    let verdict = if oracle_ok { "SATISFIED" } else { "VIOLATED" };
    let note = if oracle_ok && saturated { " (within bounds)" } else { "" };
    out.field("oracle", format!("{verdict}{note}"));
    if let Some(run) = &witness {
        out.field("counterexample", run.to_trace(&p.lts));
    }
    if oracle_ok != satisfied {
        out.field("crossval", "DISAGREE");
        return Ok(4);
    }
    out.field("crossval", "AGREE");
    Ok(if satisfied { 0 } else { 1 })
}

fn generate(lts_path: &Path, prop_path: &Path, args: &FormulaArgs, out: &mut Output) -> Outcome {
    let p = prepare(lts_path, prop_path, args)?;
    for f in &p.formulas {
        if out.porcelain() {
            out.field("formula", f);
        } else {
            out.text(f);
        }
    }
    Ok(0)
}

fn validate_conc(lts_path: &Path, rel_path: &Path, out: &mut Output) -> Outcome {
    let lts = load_lts(lts_path)?;
    let conc = load_relation(&lts, rel_path)?;
    let report = validate_concurrency_relation(&lts, &conc).map_err(|e| Failure::core(Some(rel_path), e))?;
    let text = report.display(&lts).to_string();
    if out.porcelain() {
        out.field("valid", report.is_valid());
        for line in text.lines().skip(1) {
            out.field("problem", line.trim());
        }
    } else {
        out.text(text.trim_end());
    }
    Ok(if report.is_valid() { 0 } else { 1 })
}

fn check_trace(
    lts_path: &Path,
    trace_path: &Path,
    criteria: Option<&str>,
    blocking: Option<&str>,
    conc_path: Option<&Path>,
    prop_path: Option<&Path>,
    out: &mut Output,
) -> Outcome {
    let lts = load_lts(lts_path)?;
    let run = parse_trace(&lts, &read(trace_path)?).map_err(|e| Failure::core(Some(trace_path), e))?;
    let kinds = criteria_flag(criteria)?.unwrap_or_else(|| CriterionKind::ALL.to_vec());
    let blocking = blocking_flag(blocking)?.unwrap_or_default();
    lts.mask(&blocking).map_err(|e| Failure::input(format!("--blocking: {e}")))?;
    let conc = conc_path.map(|p| load_relation(&lts, p)).transpose()?;

    let mut all_hold = true;
    for kind in kinds {
        let verdict = if kind == CriterionKind::Progress {
            satisfies_progress(&lts, &run, &blocking)
        } else {
            let spec = CriterionSpec::named(kind, blocking.clone(), conc.clone());
            let checker = CriterionChecker::new(&lts, &spec).map_err(|e| Failure::core(conc_path, e))?;
            checker.check(&lts, &run)
        };
        all_hold &= verdict.holds;
        let text = match &verdict.witness {
            None => "holds".to_string(),
            Some(w) => {
                let action = w.action.as_ref().map_or(String::new(), |a| format!("{a} "));
                format!("fails ({action}{}) from position {}", w.clause, w.position)
            }
        };
        out.field(kind.name(), text);
    }

    if let Some(prop_path) = prop_path {
        let property = load_property(prop_path)?;
        let templates = property.templates(&lts).map_err(|e| Failure::core(Some(prop_path), e))?;
        if templates.is_empty() {
            return Err(Failure::input(format!(
                "{}: a raw formula has no violation template",
                prop_path.display()
            )));
        }
        let violating = templates.iter().any(|t| is_violating(&lts, &run, t).holds);
        out.field("violating", if violating { "yes" } else { "no" });
    }
    Ok(if all_hold { 0 } else { 1 })
}

fn crossval(
    config_path: &Path,
    seed: Option<u64>,
    criteria: Option<&str>,
    bounds: &BoundsArgs,
    out: &mut Output,
) -> Outcome {
    let mut config = parse_harness_config(&read(config_path)?).map_err(|e| Failure::core(Some(config_path), e))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(c) = criteria_flag(criteria)? {
        config.criteria = c;
    }
    config.bounds_stem = bounds.bounds_stem.or(config.bounds_stem);
    config.bounds_cycle = bounds.bounds_cycle.or(config.bounds_cycle);
    let report = run_harness(&config).map_err(|e| Failure::core(None, e))?;
    if out.porcelain() {
        for (key, value) in [
            ("instances", report.instances),
            ("checks", report.lines.len()),
            ("agree", report.agreed()),
            ("disagree", report.disagreed()),
            ("skipped", report.skipped()),
            ("saturated", report.saturated()),
        ] {
            out.field(key, value);
        }
        for line in &report.lines {
            out.field("check", line);
        }
    } else {
        out.text(&report);
    }
    Ok(if report.disagreed() > 0 { 4 } else { 0 })
}
