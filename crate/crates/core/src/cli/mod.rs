//! Command-line front end: instance files in, structured reports out.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal
//! invariant breach.

mod instance;
mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub use instance::{
    parse_instance, parse_instance_str, parse_vector, Diagnostic, Instance, InstanceError, InstanceOptions,
    Literal,
};
pub use report::{
    CertificateEntry, CommandResult, InstanceEcho, MembershipResult, NamedCheck, Parameters, Report,
    ScopedViolation, SCHEMA,
};

use crate::abelian::{GroupElement, GroupSpec};
use crate::conetop::{Atom, ConeSpace, DescribedSet, Sequence, Variant, Window, DEFAULT_PREFIX, DEFAULT_RADIUS};
use crate::error::Error;
use crate::fintop;
use crate::monoid::Monoid;
use crate::profile::{self, PropertyName};
use crate::witness::{self, Certificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable naming the default corpus directory.
pub const CORPUS_ENV: &str = "CONETOP_CORPUS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Cone,
    ConeStar,
    Both,
}

impl SpaceArg {
    fn variants(self) -> Vec<Variant> {
        match self {
            SpaceArg::Cone => vec![Variant::Cone],
            SpaceArg::ConeStar => vec![Variant::ConeStar],
            SpaceArg::Both => vec![Variant::Cone, Variant::ConeStar],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "conetop", version, about = "Cone topologies on finitely generated abelian groups")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Window radius R for finite checks.
    #[arg(long, global = true)]
    pub window: Option<u32>,
    /// Sequence prefix length N for finite checks.
    #[arg(long, global = true)]
    pub prefix: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Batch {
    /// Instance files.
    pub files: Vec<PathBuf>,
    /// Process every `.inst` file in DIR (default: $CONETOP_CORPUS).
    #[arg(long, num_args = 0..=1, value_name = "DIR")]
    pub all: Option<Option<PathBuf>>,
    #[arg(long, value_enum, default_value = "both")]
    pub space: SpaceArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Property profile of both topologies, with consistency checks.
    Profile(Batch),
    /// Monoid membership of group elements.
    Member {
        file: PathBuf,
        /// Element literal such as `[1,-2]`; repeatable.
        #[arg(long = "element", required = true, allow_hyphen_values = true)]
        elements: Vec<String>,
    },
    /// Closure of a finite union of atoms.
    Closure {
        file: PathBuf,
        /// Atoms separated by `;`: `[x]`, `[x]+S`, `[x]-S`, `[x]+<S>`.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, value_enum, default_value = "cone")]
        space: SpaceArg,
        /// Cone* neighborhood parameter in S; repeatable.
        #[arg(long = "probe", allow_hyphen_values = true)]
        probes: Vec<String>,
    },
    /// Limit points of a sequence.
    Limits {
        file: PathBuf,
        /// Explicit terms separated by `;`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "rule")]
        terms: Option<String>,
        /// Affine rule `START:STEP`; several rules interleave.
        #[arg(long = "rule", allow_hyphen_values = true)]
        rule: Vec<String>,
        #[arg(long, value_enum, default_value = "cone")]
        space: SpaceArg,
        #[arg(long = "probe", allow_hyphen_values = true)]
        probes: Vec<String>,
    },
    /// Certificate for a failing property, optionally verified.
    Certify {
        file: PathBuf,
        #[arg(long)]
        property: String,
        #[arg(long, value_enum, default_value = "cone")]
        space: SpaceArg,
        /// Verify the produced certificate on the window.
        #[arg(long)]
        verify: bool,
        /// Verify the certificate stored in this JSON file instead.
        #[arg(long = "verify-file")]
        verify_file: Option<PathBuf>,
    },
    /// Verify every certificate of the profile, plus window oracles.
    WindowCheck(Batch),
    /// Finite topologies.
    Fintop {
        #[command(subcommand)]
        action: FintopAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum FintopAction {
    /// Count (and optionally list) all topologies on n points.
    Enumerate {
        #[arg(long)]
        points: usize,
        #[arg(long)]
        list: bool,
    },
    /// Exhaustive check of the closure and regularization lemmas.
    VerifyLemmas {
        #[arg(long)]
        points: usize,
    },
}

/// Output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

struct Ctx {
    format: Format,
    window: Option<u32>,
    prefix: Option<usize>,
}

impl Ctx {
    fn params(&self, inst: Option<&Instance>) -> Parameters {
        let opts = inst.map(|i| i.options.clone()).unwrap_or_default();
        Parameters {
            radius: self.window.or(opts.window).unwrap_or(DEFAULT_RADIUS),
            prefix: self.prefix.or(opts.prefix).unwrap_or(DEFAULT_PREFIX),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    execute(cli)
}

pub fn execute(cli: Cli) -> Outcome {
    let ctx = Ctx {
        format: cli.format,
        window: cli.window,
        prefix: cli.prefix,
    };
    match dispatch(&ctx, cli.command) {
        Ok((report, code, stderr)) => {
            let stdout = match ctx.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.render_text(),
            };
            Outcome { code, stdout, stderr }
        }
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

type Dispatch = Result<(Report, i32, String), Failure>;

fn dispatch(ctx: &Ctx, command: Command) -> Dispatch {
    match command {
        Command::Profile(batch) => run_batch(ctx, &batch, "profile", profile_one),
        Command::WindowCheck(batch) => run_batch(ctx, &batch, "window-check", window_check_one),
        Command::Member { file, elements } => member(ctx, &file, &elements),
        Command::Closure {
            file,
            set,
            space,
            probes,
        } => closure(ctx, &file, &set, space, &probes),
        Command::Limits {
            file,
            terms,
            rule,
            space,
            probes,
        } => limits(ctx, &file, terms.as_deref(), &rule, space, &probes),
        Command::Certify {
            file,
            property,
            space,
            verify,
            verify_file,
        } => certify(ctx, &file, &property, space, verify, verify_file.as_deref()),
        Command::Fintop { action } => run_fintop(ctx, action),
    }
}

fn echo(inst: &Instance) -> InstanceEcho {
    InstanceEcho {
        name: inst.name.clone(),
        group: inst.group.clone(),
        monoid: inst.monoid.clone(),
    }
}

fn build_monoid(inst: &Instance) -> Result<Arc<Monoid>, Failure> {
    Ok(Arc::new(Monoid::new(inst.group.clone(), inst.monoid.clone())?))
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Failure::input(format!("cannot read corpus directory {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "inst"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::input(format!("no .inst files in {}", dir.display())));
    }
    Ok(files)
}

fn batch_files(batch: &Batch) -> Result<Vec<PathBuf>, Failure> {
    let mut files = batch.files.clone();
    if let Some(dir) = &batch.all {
        let dir = match dir {
            Some(d) => d.clone(),
            None => std::env::var_os(CORPUS_ENV)
                .map(PathBuf::from)
                .ok_or_else(|| Failure::input(format!("--all without a directory needs ${CORPUS_ENV}")))?,
        };
        files.extend(corpus_files(&dir)?);
    }
    if files.is_empty() {
        return Err(Failure::input("no instance files given"));
    }
    Ok(files)
}

type PerInstance = fn(&Ctx, &Instance, SpaceArg) -> Dispatch;

fn run_batch(ctx: &Ctx, batch: &Batch, command: &str, f: PerInstance) -> Dispatch {
    let files = batch_files(batch)?;
    let run_file = |path: &PathBuf| -> Dispatch {
        let inst = parse_instance(path)?;
        f(ctx, &inst, batch.space)
    };
    if files.len() == 1 {
        return run_file(&files[0]);
    }
    // Parallel over files; collect keeps filename order.
    let results: Vec<Dispatch> = files.par_iter().map(run_file).collect();
    let mut top = Report::new(command, ctx.params(None));
    let mut code = EXIT_OK;
    let mut stderr = String::new();
    for (path, r) in files.iter().zip(results) {
        match r {
            Ok((rep, c, err)) => {
                code = code.max(c);
                stderr.push_str(&err);
                top.reports.push(rep);
            }
            Err(fail) => {
                code = code.max(fail.code);
                stderr.push_str(&format!("error: {}\n", fail.message));
                top.diagnostics.push(format!("{}: {}", path.display(), fail.message));
            }
        }
    }
    Ok((top, code, stderr))
}

fn profile_one(ctx: &Ctx, inst: &Instance, space: SpaceArg) -> Dispatch {
    let monoid = build_monoid(inst)?;
    let mut report = Report::new("profile", ctx.params(Some(inst)));
    report.instance = Some(echo(inst));
    for v in space.variants() {
        let p = profile::evaluate(&ConeSpace::new(monoid.clone(), v));
        for violation in profile::check_implications(&p) {
            report.violations.push(ScopedViolation {
                scope: v.to_string(),
                violation,
            });
        }
        report.profiles.push(p);
    }
    if let [cone, star] = &report.profiles[..] {
        for violation in profile::cross_variant_check(cone, star) {
            report.violations.push(ScopedViolation {
                scope: "cross".into(),
                violation,
            });
        }
    }
    Ok(finish_with_violations(report))
}

fn finish_with_violations(report: Report) -> (Report, i32, String) {
    if report.violations.is_empty() {
        return (report, EXIT_OK, String::new());
    }
    let mut dump = String::new();
    for v in &report.violations {
        dump.push_str(&format!(
            "invariant breach [{}] {}: {}\n",
            v.scope, v.violation.rule, v.violation.detail
        ));
    }
    (report, EXIT_INTERNAL, dump)
}

fn window_check_one(ctx: &Ctx, inst: &Instance, space: SpaceArg) -> Dispatch {
    let params = ctx.params(Some(inst));
    let (mut report, code, mut stderr) = profile_one(ctx, inst, space)?;
    report.command = "window-check".into();
    let window = Window::new(params.radius);
    let monoid = build_monoid(inst)?;
    let mut checks = Vec::new();

    // Units against the two-sided membership test on the window.
    let points = window.points(&inst.group)?;
    let bad_unit = points.iter().find(|x| {
        let two_sided = monoid.member(x).unwrap_or(false) && monoid.member(&inst.group.neg(x)).unwrap_or(false);
        two_sided != monoid.units().contains(x).unwrap_or(false)
    });
    checks.push(NamedCheck {
        name: "units agree with S n -S on the window".into(),
        passed: bad_unit.is_none(),
        detail: bad_unit.map(|x| format!("mismatch at {x}")),
    });

    for p in report.profiles.clone() {
        let cs = ConeSpace::new(monoid.clone(), p.variant);
        for (name, verdict) in &p.verdicts {
            let Some(cert) = &verdict.certificate else { continue };
            let v = witness::verify(&cs, cert, &window, params.prefix)?;
            if !v.passed {
                stderr.push_str(&format!("verification failed: [{}] {name}\n", p.variant));
            }
            report.certificates.push(CertificateEntry {
                space: p.variant,
                property: Some(*name),
                holds: Some(verdict.holds),
                rule: Some(verdict.rule),
                certificate: Some(cert.clone()),
                verification: Some(v),
            });
        }
    }
    report.result = Some(CommandResult::WindowCheck { checks });
    let mut code = code;
    if code == EXIT_OK && report.has_failed_verification() {
        code = EXIT_VERIFY;
    }
    Ok((report, code, stderr))
}

fn element(group: &GroupSpec, text: &str) -> Result<GroupElement, Failure> {
    let coords = parse_vector(text).map_err(|e| Failure::input(format!("element '{text}': {e}")))?;
    group
        .element(coords)
        .map_err(|e| Failure::input(format!("element '{text}': {e}")))
}

fn member(ctx: &Ctx, file: &Path, elements: &[String]) -> Dispatch {
    let inst = parse_instance(file)?;
    let monoid = build_monoid(&inst)?;
    let mut results = Vec::new();
    for e in elements {
        let x = element(&inst.group, e)?;
        let member = monoid.member(&x)?;
        results.push(MembershipResult { element: x, member });
    }
    let mut report = Report::new("member", ctx.params(Some(&inst)));
    report.instance = Some(echo(&inst));
    report.result = Some(CommandResult::Membership { results });
    Ok((report, EXIT_OK, String::new()))
}

/// Parses `[1,0]+S; [2,2]; [0,1]-S; [0,0]+<S>`.
pub fn parse_set(group: &GroupSpec, text: &str) -> Result<DescribedSet, String> {
    let mut atoms = Vec::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (lit, ctor): (&str, fn(GroupElement) -> Atom) = if let Some(l) = item.strip_suffix("+<S>") {
            (l, Atom::PlusClosure)
        } else if let Some(l) = item.strip_suffix("+S") {
            (l, Atom::PlusS)
        } else if let Some(l) = item.strip_suffix("-S") {
            (l, Atom::MinusS)
        } else {
            (item, Atom::Point)
        };
        let coords = parse_vector(lit.trim()).map_err(|e| format!("atom '{item}': {e}"))?;
        let x = group.element(coords).map_err(|e| format!("atom '{item}': {e}"))?;
        atoms.push(ctor(x));
    }
    Ok(DescribedSet::new(atoms))
}

fn single_space(space: SpaceArg) -> Result<Variant, Failure> {
    match space {
        SpaceArg::Cone => Ok(Variant::Cone),
        SpaceArg::ConeStar => Ok(Variant::ConeStar),
        SpaceArg::Both => Err(Failure::input("this command takes --space cone or --space cone-star")),
    }
}

/// Parameters in `S` for cone* neighborhoods: the given ones, or `S` on the
/// radius-2 window.
fn probes(space: &ConeSpace, given: &[String]) -> Result<Vec<GroupElement>, Failure> {
    if !given.is_empty() {
        return given.iter().map(|p| element(space.group(), p)).collect();
    }
    let pts = Window::new(2).points(space.group())?;
    let m = space.monoid();
    Ok(pts.into_iter().filter(|x| m.member(x).unwrap_or(false)).collect())
}

fn closure(ctx: &Ctx, file: &Path, set: &str, space: SpaceArg, given: &[String]) -> Dispatch {
    let inst = parse_instance(file)?;
    let params = ctx.params(Some(&inst));
    let variant = single_space(space)?;
    let cs = ConeSpace::new(build_monoid(&inst)?, variant);
    let input = parse_set(&inst.group, set).map_err(Failure::input)?;
    let window = Window::new(params.radius);
    let (symbolic, window_trace, probes) = match variant {
        Variant::Cone => (Some(cs.closure(&input)?), None, Vec::new()),
        Variant::ConeStar => {
            let probes = probes(&cs, given)?;
            (None, Some(cs.window_closure(&input, &window, &probes)?), probes)
        }
    };
    let mut report = Report::new("closure", params);
    report.instance = Some(echo(&inst));
    report.result = Some(CommandResult::Closure {
        space: variant,
        input,
        symbolic,
        window_trace,
        probes,
    });
    Ok((report, EXIT_OK, String::new()))
}

fn limits(ctx: &Ctx, file: &Path, terms: Option<&str>, rules: &[String], space: SpaceArg, given: &[String]) -> Dispatch {
    let inst = parse_instance(file)?;
    let params = ctx.params(Some(&inst));
    let variant = single_space(space)?;
    let cs = ConeSpace::new(build_monoid(&inst)?, variant);
    let seq = match terms {
        Some(t) => Sequence::Explicit {
            terms: t
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| element(&inst.group, s))
                .collect::<Result<_, _>>()?,
        },
        None => {
            if rules.is_empty() {
                return Err(Failure::input("give --terms or at least one --rule START:STEP"));
            }
            let mut out = Vec::new();
            for r in rules {
                let (a, b) = r
                    .split_once(':')
                    .ok_or_else(|| Failure::input(format!("rule '{r}' is not START:STEP")))?;
                out.push(crate::conetop::AffineRule {
                    start: element(&inst.group, a.trim())?,
                    step: element(&inst.group, b.trim())?,
                });
            }
            Sequence::Periodic { rules: out }
        }
    };
    let probes = match variant {
        Variant::Cone => Vec::new(),
        Variant::ConeStar => probes(&cs, given)?,
    };
    let lr = cs.limits(&seq, &probes, params.prefix, &Window::new(params.radius))?;
    let mut report = Report::new("limits", params);
    report.instance = Some(echo(&inst));
    report.result = Some(CommandResult::Limits { report: lr });
    Ok((report, EXIT_OK, String::new()))
}

fn load_certificate(path: &Path) -> Result<Certificate, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(c) = serde_json::from_str::<Certificate>(&text) {
        return Ok(c);
    }
    // Also accept a report carrying a certificate.
    let report = Report::from_json(&text)
        .map_err(|e| Failure::input(format!("{}: not a certificate or report: {e}", path.display())))?;
    report
        .certificates
        .into_iter()
        .find_map(|c| c.certificate)
        .ok_or_else(|| Failure::input(format!("{}: report carries no certificate", path.display())))
}

fn certify(
    ctx: &Ctx,
    file: &Path,
    property: &str,
    space: SpaceArg,
    verify: bool,
    verify_file: Option<&Path>,
) -> Dispatch {
    let inst = parse_instance(file)?;
    let params = ctx.params(Some(&inst));
    let prop = PropertyName::parse(property).ok_or_else(|| {
        let names: Vec<&str> = PropertyName::ALL.iter().map(|p| p.as_str()).collect();
        Failure::input(format!("unknown property '{property}'; one of {}", names.join(", ")))
    })?;
    let monoid = build_monoid(&inst)?;
    let window = Window::new(params.radius);
    let supplied = verify_file.map(load_certificate).transpose()?;
    let mut report = Report::new("certify", params);
    report.instance = Some(echo(&inst));
    for v in space.variants() {
        let cs = ConeSpace::new(monoid.clone(), v);
        let p = profile::evaluate(&cs);
        let Some(verdict) = p.get(prop) else {
            return Err(Failure::input(format!("{prop} is not characterized for the {v} topology")));
        };
        let certificate = supplied.clone().or_else(|| verdict.certificate.clone());
        let verification = match &certificate {
            Some(c) if verify || supplied.is_some() => Some(witness::verify(&cs, c, &window, params.prefix)?),
            _ => None,
        };
        report.certificates.push(CertificateEntry {
            space: v,
            property: Some(prop),
            holds: Some(verdict.holds),
            rule: Some(verdict.rule),
            certificate,
            verification,
        });
    }
    let code = if report.has_failed_verification() {
        EXIT_VERIFY
    } else {
        EXIT_OK
    };
    let stderr = if code == EXIT_VERIFY {
        "verification failed\n".to_string()
    } else {
        String::new()
    };
    Ok((report, code, stderr))
}

fn run_fintop(ctx: &Ctx, action: FintopAction) -> Dispatch {
    let params = ctx.params(None);
    match action {
        FintopAction::Enumerate { points, list } => {
            let tops = fintop::enumerate_topologies(points)?;
            let topologies = if list {
                tops.iter()
                    .map(|t| {
                        t.opens()
                            .iter()
                            .map(|&m| (0..points).filter(|i| m >> i & 1 == 1).collect())
                            .collect()
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let mut report = Report::new("fintop enumerate", params);
            report.result = Some(CommandResult::Enumerate {
                points,
                count: tops.len(),
                topologies,
            });
            Ok((report, EXIT_OK, String::new()))
        }
        FintopAction::VerifyLemmas { points } => {
            let lemma = fintop::verify_lemmas(points)?;
            let mut report = Report::new("fintop verify-lemmas", params);
            let bad = !lemma.counterexamples.is_empty();
            report.result = Some(CommandResult::Lemmas { report: lemma });
            if bad {
                Ok((report, EXIT_INTERNAL, "lemma counterexample found\n".into()))
            } else {
                Ok((report, EXIT_OK, String::new()))
            }
        }
    }
}
