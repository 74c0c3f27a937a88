use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use mibound::bounds::{compare_baselines, negative_accuracy_bounds, positive_accuracy_bounds};
use mibound::figures::{build_figure, write_csv, write_svg_with, FigureId, FigureSpec, SvgOptions};
use mibound::gaussian::{
    max_overall_accuracy, overall_accuracy, positive_accuracy, positive_accuracy_supremum_demo, CounterexampleConfig,
    ThresholdAttack,
};
use mibound::oracle::{lemma1_check, simulate_mi_game, verify_bounds, OracleConfig};
use mibound::planner::{max_rate_for_target_with_base_prior, plan_with_base_prior, subsample, SubsampleRate};
use mibound::unlearning::{deletion_capacity, group_request_check, UnlearningPolicy};
use mibound::{Epsilon, Probability};
use serde::Serialize;

use crate::args::*;
use crate::reproduce::reproduce_all;
use crate::{CliError, FlagContext, Status};

pub(crate) fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<Status, CliError> {
    match cmd {
        Command::Bounds(a) => bounds(a, out),
        Command::Baselines(a) => baselines(a, out),
        Command::Plan(a) => plan(a, out),
        Command::Subsample(a) => subsample_ids(a, out),
        Command::Unlearn(a) => unlearn(a, out),
        Command::OracleVerify(a) => oracle_verify(a, out),
        Command::OracleSim(a) => oracle_sim(a, out),
        Command::Counterexample(a) => counterexample(a, out),
        Command::Figure(a) => figure(a, out),
        Command::Reproduce(a) => reproduce(a, out),
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, record: &T) -> Result<Status, CliError> {
    let line = serde_json::to_string(record).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{line}")?;
    Ok(Status::Ok)
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Internal(format!("CSV write failed: {e}"))
}

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn finite_or_none(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn eps_flag(v: f64) -> Result<Epsilon, CliError> {
    Epsilon::new(v).flag("--eps")
}

#[derive(Serialize)]
struct BoundsRecord {
    command: &'static str,
    eps: f64,
    prior: f64,
    pos_lower: f64,
    pos_upper: f64,
    neg_lower: f64,
    neg_upper: f64,
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let e = eps_flag(a.eps)?;
    let p = Probability::new(a.prior).flag("--prior")?;
    let pos = positive_accuracy_bounds(e, p);
    let neg = negative_accuracy_bounds(e, p);
    emit(
        out,
        &BoundsRecord {
            command: "bounds",
            eps: a.eps,
            prior: a.prior,
            pos_lower: pos.lower.value(),
            pos_upper: pos.upper.value(),
            neg_lower: neg.lower.value(),
            neg_upper: neg.upper.value(),
        },
    )
}

fn baselines(a: &BaselinesArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let p = Probability::new(a.prior).flag("--prior")?;
    let rows = a
        .eps
        .iter()
        .map(|&e| Ok(compare_baselines(eps_flag(e)?, p)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut w = csv_writer(out);
    w.write_record([
        "eps",
        "prior",
        "ours",
        "erlingsson",
        "sablayrolles",
        "sablayrolles_raw",
        "yeom",
        "yeom_raw",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            num(r.eps),
            num(r.prior),
            num(r.ours),
            num(r.erlingsson),
            num(r.sablayrolles),
            num(r.sablayrolles_raw),
            num(r.yeom),
            num(r.yeom_raw),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct PlanRecord {
    command: &'static str,
    eps: f64,
    target: Option<f64>,
    rate: f64,
    base_prior: f64,
    certified_upper: f64,
    size: Option<u64>,
    expected_size: Option<f64>,
}

fn plan(a: &PlanArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let e = eps_flag(a.eps)?;
    let base = Probability::new(a.base_prior).flag("--base-prior")?;
    let rate = match (a.target, a.rate) {
        (Some(t), _) => {
            let target = Probability::new(t).flag("--target")?;
            max_rate_for_target_with_base_prior(e, target, base).flag("--target")?
        }
        (None, Some(r)) => SubsampleRate::new(r).flag("--rate")?,
        (None, None) => unreachable!("clap requires --target or --rate"),
    };
    let p = plan_with_base_prior(e, rate, a.size.unwrap_or(0), base);
    emit(
        out,
        &PlanRecord {
            command: "plan",
            eps: a.eps,
            target: a.target,
            rate: rate.value(),
            base_prior: a.base_prior,
            certified_upper: p.certified_upper.value(),
            size: a.size,
            expected_size: a.size.map(|_| p.expected_size),
        },
    )
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Invalid {
        flag: "--input",
        source: mibound::Error::Io {
            path: path.to_path_buf(),
            source,
        },
    })?;
    Ok(text)
}

fn subsample_ids(a: &SubsampleArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let rate = SubsampleRate::new(a.rate).flag("--rate")?;
    let text = read_input(&a.input)?;
    let ids: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let kept = subsample(&ids, rate, a.seed).flag("--input")?;
    log::info!("kept {} of {} ids", kept.len(), ids.len());
    for id in kept {
        writeln!(out, "{id}")?;
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct UnlearnRecord {
    command: &'static str,
    eps: f64,
    b: f64,
    universe_size: u64,
    train_size: f64,
    per_request_lower: f64,
    capacity: Option<f64>,
    whole_requests: Option<u64>,
    unbounded: bool,
    requests: Option<u64>,
    requests_ok: Option<bool>,
}

fn unlearn(a: &UnlearnArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let e = eps_flag(a.eps)?;
    let b = Probability::new(a.b).flag("--b")?;
    let policy = UnlearningPolicy::new(b, e, a.universe_size, a.train_size).flag("--train-size")?;
    let r = deletion_capacity(&policy);
    let requests_ok = match a.requests {
        Some(n) => {
            let n = usize::try_from(n).map_err(|_| CliError::Internal("--requests too large".into()))?;
            Some(r.unbounded || group_request_check(&vec![r.per_request_lower; n], b).flag("--requests")?)
        }
        None => None,
    };
    emit(
        out,
        &UnlearnRecord {
            command: "unlearn",
            eps: a.eps,
            b: a.b,
            universe_size: a.universe_size,
            train_size: a.train_size,
            per_request_lower: r.per_request_lower.value(),
            capacity: finite_or_none(r.capacity),
            whole_requests: r.whole_requests(),
            unbounded: r.unbounded,
            requests: a.requests,
            requests_ok,
        },
    )
}

fn load_config(path: &Path) -> Result<(mibound::oracle::Universe, mibound::oracle::FiniteMechanism), CliError> {
    OracleConfig::from_path(path).flag("--config")?.build().flag("--config")
}

#[derive(Serialize)]
struct VerifyRecord {
    command: &'static str,
    config: String,
    points: usize,
    outcomes: usize,
    eps: Option<f64>,
    checked: usize,
    violations: usize,
    skipped_outcomes: usize,
    max_excess: f64,
    lemma1_max_residual: f64,
    lemma1_ok: bool,
}

fn write_reports(path: &Path, v: &mibound::oracle::BoundVerification) -> Result<(), CliError> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))?;
    let mut buf = std::io::BufWriter::new(file);
    let mut w = csv_writer(&mut buf);
    w.write_record([
        "point_index",
        "outcome_id",
        "prior",
        "posterior",
        "lower",
        "upper",
        "inside",
        "negative_lower",
        "negative_upper",
        "negative_inside",
    ])
    .map_err(csv_err)?;
    for r in &v.reports {
        w.write_record([
            r.point_index.to_string(),
            r.outcome_id.to_string(),
            num(r.prior.value()),
            num(r.posterior.value()),
            num(r.bound_interval.lower.value()),
            num(r.bound_interval.upper.value()),
            r.inside.to_string(),
            num(r.negative_interval.lower.value()),
            num(r.negative_interval.upper.value()),
            r.negative_inside.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    drop(w);
    buf.flush()?;
    Ok(())
}

fn oracle_verify(a: &OracleVerifyArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let (u, m) = load_config(&a.config)?;
    let v = verify_bounds(&u, &m).flag("--config")?;
    let mut lemma_residual: f64 = 0.0;
    let mut lemma_ok = true;
    for i in 0..u.len() {
        let r = lemma1_check(&u, i).internal()?;
        lemma_residual = lemma_residual.max(r.max_residual);
        lemma_ok &= r.holds;
    }
    if let Some(path) = &a.reports {
        write_reports(path, &v)?;
    }
    let violations = v.violations().count();
    emit(
        out,
        &VerifyRecord {
            command: "oracle-verify",
            config: a.config.display().to_string(),
            points: u.len(),
            outcomes: m.outcome_count(),
            eps: finite_or_none(v.eps),
            checked: v.reports.len(),
            violations,
            skipped_outcomes: v.skipped_outcomes.len(),
            max_excess: v.max_excess(),
            lemma1_max_residual: lemma_residual,
            lemma1_ok: lemma_ok,
        },
    )?;
    if violations > 0 || !lemma_ok {
        Ok(Status::Violation)
    } else {
        Ok(Status::Ok)
    }
}

fn oracle_sim(a: &OracleSimArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let (u, m) = load_config(&a.config)?;
    let r = simulate_mi_game(&u, &m, a.trials, a.seed).flag("--trials")?;
    let mut w = csv_writer(out);
    w.write_record([
        "point",
        "prior",
        "positive_predictions",
        "empirical_positive_accuracy",
        "exact_positive_accuracy",
        "positive_se",
        "negative_predictions",
        "empirical_negative_accuracy",
        "exact_negative_accuracy",
        "negative_se",
        "empirical_accuracy",
        "exact_accuracy",
        "accuracy_se",
        "max_z",
    ])
    .map_err(csv_err)?;
    for p in &r.points {
        w.write_record([
            p.point.to_string(),
            num(p.prior.value()),
            p.positive_predictions.to_string(),
            opt(p.empirical_positive_accuracy),
            opt(p.exact_positive_accuracy),
            opt(p.positive_se),
            p.negative_predictions.to_string(),
            opt(p.empirical_negative_accuracy),
            opt(p.exact_negative_accuracy),
            opt(p.negative_se),
            num(p.empirical_accuracy),
            num(p.exact_accuracy),
            num(p.accuracy_se),
            num(p.max_z()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CounterexampleRecord {
    command: &'static str,
    w0: f64,
    grad_step: f64,
    sigma: f64,
    prior_x2: f64,
    max_accuracy: f64,
    max_alpha_offset: f64,
    m: f64,
    witness_alpha_offset: f64,
    witness_positive_accuracy: f64,
}

fn counterexample(a: &CounterexampleArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let prior = Probability::new(a.prior_x2).flag("--prior-x2")?;
    let cfg = CounterexampleConfig::new(a.w0, a.grad_step, a.sigma, prior).flag("--prior-x2")?;
    if !a.alpha.is_empty() {
        let mut w = csv_writer(out);
        w.write_record(["alpha_offset", "positive_accuracy", "accuracy"])
            .map_err(csv_err)?;
        for &alpha in &a.alpha {
            let t = ThresholdAttack::new(alpha).flag("--alpha")?;
            w.write_record([
                num(alpha),
                num(positive_accuracy(t, &cfg).value()),
                num(overall_accuracy(t, &cfg).value()),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        return Ok(Status::Ok);
    }
    let m = Probability::new(a.m).flag("--m")?;
    let (best, acc) = max_overall_accuracy(&cfg);
    let witness = positive_accuracy_supremum_demo(&cfg, m).flag("--m")?;
    emit(
        out,
        &CounterexampleRecord {
            command: "counterexample",
            w0: a.w0,
            grad_step: a.grad_step,
            sigma: a.sigma,
            prior_x2: a.prior_x2,
            max_accuracy: acc.value(),
            max_alpha_offset: best.alpha_offset,
            m: a.m,
            witness_alpha_offset: witness.alpha_offset,
            witness_positive_accuracy: positive_accuracy(witness, &cfg).value(),
        },
    )
}

#[derive(Serialize)]
struct FigureRecord {
    command: &'static str,
    id: String,
    csv: Vec<String>,
    svg: String,
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))
}

fn figure(a: &FigureArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let id: FigureId = a.id.parse().flag("--id")?;
    let mut spec = FigureSpec::new(id);
    if !a.grid.is_empty() {
        spec.grid = Some(a.grid.clone());
    }
    if !a.eps.is_empty() {
        spec.eps_list = Some(a.eps.clone());
    }
    let series = build_figure(&spec).flag("--grid")?;
    ensure_dir(&a.out_dir)?;
    let csv_path = a.out_dir.join(format!("{id}.csv"));
    let svg_path = a.out_dir.join(format!("{id}.svg"));
    let written = write_csv(&series, &csv_path).internal()?;
    let opts = SvgOptions {
        log_x: a.log_x,
        log_y: a.log_y,
    };
    write_svg_with(&series, &svg_path, id.title(), &opts).map_err(|e| match e {
        mibound::Error::InvalidParameter { name: "x", .. } => CliError::Invalid {
            flag: "--log-x",
            source: e,
        },
        mibound::Error::InvalidParameter { name: "y", .. } => CliError::Invalid {
            flag: "--log-y",
            source: e,
        },
        e => CliError::Internal(e.to_string()),
    })?;
    emit(
        out,
        &FigureRecord {
            command: "figure",
            id: id.to_string(),
            csv: written.paths().iter().map(|p| p.display().to_string()).collect(),
            svg: svg_path.display().to_string(),
        },
    )
}

#[derive(Serialize)]
struct ReproduceRecord {
    command: &'static str,
    out_dir: String,
    files: Vec<String>,
}

fn reproduce(a: &ReproduceArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let files: Vec<PathBuf> = reproduce_all(&a.out_dir).internal()?;
    emit(
        out,
        &ReproduceRecord {
            command: "reproduce",
            out_dir: a.out_dir.display().to_string(),
            files: files
                .iter()
                .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
                .collect(),
        },
    )
}
