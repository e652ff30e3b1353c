use std::fmt;

use anyhow::{Context, Result};
use uqrs::cache::Store;
use uqrs::cartan::Family;
use uqrs::classify::{classify_with_rank, isoclass_count_formula};
use uqrs::hopf::skew_primitive_space;
use uqrs::pbw::{build, build_cached, AlgebraHandle, AlgebraSpec, PbwMonomial, Scope};
use uqrs::radford::{dimension_distribution_cached, distribution_compare};
use uqrs::reference;

use crate::render::{self, DimensionReport, DistReport, PrimeCheck, RefComparison, SkewReport};
use crate::{ClassifyArgs, DimensionArgs, Params, SkewArgs, YdDistArgs};

/// Largest (n, L) accepted for the full algebra.
pub const FULL_BUDGET: (usize, u64) = (3, 6);
/// Largest (n, L) accepted for the Borel part.
pub const BOREL_BUDGET: (usize, u64) = (3, 8);

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CONSTRAINT: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;

/// Rendered output plus the exit status it should end with.
pub struct Report {
    pub text: String,
    pub code: u8,
    pub failure: Option<String>,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, code: 0, failure: None }
    }

    fn verification(text: String, msg: String) -> Self {
        Report {
            text,
            code: EXIT_VERIFICATION,
            failure: Some(msg),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl std::error::Error for Failure {}

fn fail(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Failure { code, msg: msg.into() }.into()
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return f.code;
        }
        if let Some(u) = cause.downcast_ref::<uqrs::Error>() {
            return match u {
                uqrs::Error::Constraint(_) | uqrs::Error::Unsupported(_) | uqrs::Error::Completion(_) => {
                    EXIT_CONSTRAINT
                }
                uqrs::Error::Verification(_) => EXIT_VERIFICATION,
                _ => EXIT_USAGE,
            };
        }
    }
    EXIT_USAGE
}

fn check_budget(p: &Params, scope: Scope) -> Result<()> {
    let (n, l) = match scope {
        Scope::Full => FULL_BUDGET,
        Scope::Borel => BOREL_BUDGET,
    };
    if p.rank > n || p.order > l {
        return Err(fail(
            EXIT_CONSTRAINT,
            format!(
                "sl_{} at L = {} ({scope}) is outside the budget n <= {n}, L <= {l}",
                p.rank, p.order
            ),
        ));
    }
    Ok(())
}

fn algebra_spec(p: &Params, scope: Scope) -> Result<AlgebraSpec> {
    check_budget(p, scope)?;
    Ok(AlgebraSpec::new(p.rank, p.order, p.x, p.y, scope)?)
}

pub fn classify(a: &ClassifyArgs) -> Result<Report> {
    let family: Family = a.family.parse()?;
    let table = classify_with_rank(family, a.order, a.rank);
    if let Some(reason) = &table.reason {
        return Err(fail(EXIT_CONSTRAINT, reason.clone()));
    }
    let check = match a.prime_check {
        Some(p) => {
            let formula = isoclass_count_formula(family, p)?;
            let enumerated = classify_with_rank(family, p, a.rank).classes.len() as u64;
            Some(PrimeCheck { p, formula, enumerated })
        }
        None => None,
    };
    let text = render::classify(&table, check.as_ref(), a.format)?;
    match check {
        Some(c) if c.formula != c.enumerated => Ok(Report::verification(
            text,
            format!("closed form gives {} classes at p = {}, enumeration {}", c.formula, c.p, c.enumerated),
        )),
        _ => Ok(Report::ok(text)),
    }
}

pub fn dimension(a: &DimensionArgs) -> Result<Report> {
    let scope: Scope = a.scope.parse()?;
    let spec = algebra_spec(&a.params, scope)?;
    let handle = build(spec)?;
    let counted = handle.counted_dimension()?;
    let n = spec.rank as u32;
    let exponent = match scope {
        Scope::Full => (n + 2) * (n - 1),
        Scope::Borel => (n + 2) * (n - 1) / 2,
    };
    let report = DimensionReport {
        command: "dimension",
        rank: spec.rank,
        order: spec.order,
        x: spec.x,
        y: spec.y,
        scope: scope.to_string(),
        counted,
        formula: spec.order.pow(exponent),
        exponent,
    };
    let text = render::dimension(&report, a.format)?;
    if report.counted != report.formula {
        return Ok(Report::verification(
            text,
            format!("counted {} but the formula gives {}", report.counted, report.formula),
        ));
    }
    Ok(Report::ok(text))
}

pub fn yd_dist(a: &YdDistArgs) -> Result<Report> {
    if !(2..=3).contains(&a.params.rank) {
        return Err(fail(EXIT_CONSTRAINT, format!("yd-dist supports n = 2 or 3, got {}", a.params.rank)));
    }
    let spec = algebra_spec(&a.params, Scope::Borel)?;
    if let Some(j) = a.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    let store = a.cache.clone().map(Store::new).unwrap_or_else(Store::from_env);
    let handle = build_cached(spec, &store)?;
    let dist = dimension_distribution_cached(&handle, &store)?;
    let comparison = if a.compare_paper {
        let pair = (spec.x as u64, spec.y as u64);
        Some(match reference::distribution(spec.order, pair).filter(|_| spec.rank == 3) {
            Some(r) => {
                let want = r.distribution();
                let diff = distribution_compare(&dist, &want);
                RefComparison {
                    available: true,
                    reference: Some(want.to_string()),
                    reference_total: Some(want.total()),
                    identical: Some(diff.is_empty()),
                    rows: diff.rows,
                }
            }
            None => RefComparison {
                available: false,
                reference: None,
                reference_total: None,
                identical: None,
                rows: Vec::new(),
            },
        })
    } else {
        None
    };
    let k = spec.simple_count() as u32;
    let report = DistReport {
        command: "yd-dist",
        rank: spec.rank,
        order: spec.order,
        x: spec.x,
        y: spec.y,
        distribution: dist.to_string(),
        entries: dist.entries().to_vec(),
        total: dist.total(),
        expected_total: spec.order.pow(2 * k),
        comparison,
    };
    Ok(Report::ok(render::distribution(&report, a.format)?))
}

/// Parses `1`, `w1`, `w'2^-1`, `w1^2*w'1` into a group-like monomial.
pub fn parse_grouplike(handle: &AlgebraHandle, text: &str) -> Result<PbwMonomial> {
    let text = text.trim();
    let mut word: Vec<(String, i64)> = Vec::new();
    if text != "1" {
        for tok in text.split('*').map(str::trim) {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<i64>().map_err(|_| fail(EXIT_USAGE, format!("bad exponent in {tok:?}")))?),
                None => (tok, 1),
            };
            word.push((name.to_string(), exp));
        }
    }
    let word_ref: Vec<(&str, i64)> = word.iter().map(|(n, e)| (n.as_str(), *e)).collect();
    let el = handle
        .normal_form(&word_ref)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read group-like {text:?}: {e}")))?;
    let mut terms = el.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if c.is_one() && handle.is_grouplike_monomial(m) => Ok(m.clone()),
        _ => Err(fail(EXIT_USAGE, format!("{text:?} is not a group-like"))),
    }
}

pub fn skew(a: &SkewArgs) -> Result<Report> {
    let spec = algebra_spec(&a.params, Scope::Full)?;
    let handle = build(spec)?;
    let g = parse_grouplike(&handle, &a.g)?;
    let h = parse_grouplike(&handle, &a.h)?;
    let space = skew_primitive_space(&handle, &g, &h)?;
    let report = SkewReport {
        command: "skew",
        rank: spec.rank,
        order: spec.order,
        x: spec.x,
        y: spec.y,
        g: handle.format_monomial(&g),
        h: handle.format_monomial(&h),
        dimension: space.dimension,
        basis: space.basis.iter().map(|b| handle.format_element(b)).collect(),
    };
    Ok(Report::ok(render::skew(&report, a.format)?))
}
