//! Command-line front end. [`run`] takes the argument list and output
//! streams so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 domain failure (invalid instance, infeasible
//! schedule, no solution), 2 usage or I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::instance::{
    check_feasibility, evaluate, generate_synthetic, parse_document, parse_instance, risk_matrix, to_document, validate,
    GeneratorParams, Instance, InstanceError, Schedule,
};
use crate::methods::{
    add_root_subset_cuts, build_base, build_full, report, risk_upper_bounds, run_general_subset_rounds,
    run_quantile_cut_loop, solve_method, Method, MethodConfig, MethodResult,
};
use crate::mip::{export_lp_format, to_bigm, BigMVariant};
use crate::polyhedral_cuts::{best_asymmetric_cut, best_symmetric_cut, BoxBounds};
use crate::subset_cuts::{
    general_subset_cut, generated_subset_cut, per_column_subsets, separate_subset_bestfirst, simple_generated_cut,
};

#[derive(Debug, Parser)]
#[command(name = "quantcut", version, about = "Quantile-objective maintenance scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance document.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Feasibility and objective of a schedule.
    Evaluate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve an instance with one method and write the schedule.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "cgen", value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print cuts of one family at the schedule in `--solution`.
    Separate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        timestep: usize,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Current value of `y_t`.
        #[arg(long, default_value_t = 0.0)]
        y: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a method's model in LP format.
    Export {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "full", value_parser = parse_method)]
        method: Method,
        #[arg(long, value_enum, default_value_t = VariantArg::Activate)]
        variant: VariantArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        interventions: usize,
        #[arg(long, default_value_t = 4)]
        horizon: usize,
        #[arg(long, default_value_t = 6)]
        scenarios: usize,
        #[arg(long, default_value_t = 1)]
        resources: usize,
        #[arg(long, default_value_t = 2)]
        max_duration: usize,
        #[arg(long, default_value_t = 1)]
        exclusions: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.8)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the planted feasible schedule here.
        #[arg(long)]
        planted: Option<PathBuf>,
    },
    /// Run a method × instance matrix and print the gap table.
    Bench {
        /// Instance files or glob patterns.
        #[arg(long, required = true, num_args = 1..)]
        instance: Vec<String>,
        #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "full,full+C,full+S,cgen,cgen+S,cgen+O")]
        method: Vec<Method>,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long)]
    node_limit: Option<usize>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Relative gap.
    #[arg(long)]
    gap: Option<f64>,
    /// Accepted for uniformity; every method is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Indicator,
    Activate,
    Deactivate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Symmetric,
    Asymmetric,
    Simple,
    Subset,
    GeneratedSubset,
    GeneralSubset,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

enum Failure {
    /// Exit 1.
    Domain(String),
    /// Exit 2.
    Usage(String),
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_schedule(path: &Path) -> Result<Schedule, Failure> {
    Schedule::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to `stdout` when absent.
fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn say(stdout: &mut dyn Write, text: &str) -> CmdResult {
    stdout.write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string()))
}

fn method_config(method: Method, limits: &LimitArgs) -> MethodConfig {
    let mut config = MethodConfig::new(method);
    if let Some(n) = limits.node_limit {
        config.mip.node_limit = n;
    }
    if let Some(t) = limits.time_limit {
        config.mip.time_limit = Some(Duration::from_secs_f64(t.max(0.0)));
    }
    if let Some(g) = limits.gap {
        config.mip.relative_gap = g;
    }
    config
}

/// Runs the CLI and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate { instance } => cmd_validate(&instance, stdout),
        Command::Evaluate { instance, solution, output } => cmd_evaluate(&instance, &solution, &output, stdout),
        Command::Solve { instance, method, limits, output } => cmd_solve(&instance, method, &limits, &output, stdout),
        Command::Separate { instance, solution, timestep, family, y, seed, out } => {
            cmd_separate(&instance, &solution, timestep, family, y, seed, out.as_deref(), stdout)
        }
        Command::Export { instance, method, variant, out } => cmd_export(&instance, method, variant, out.as_deref(), stdout),
        Command::Generate { seed, interventions, horizon, scenarios, resources, max_duration, exclusions, alpha, tau, out, planted } => {
            let params = GeneratorParams {
                interventions,
                horizon,
                min_scenarios: 1,
                max_scenarios: scenarios,
                resources,
                max_duration,
                exclusions,
                alpha,
                tau,
                ..GeneratorParams::default()
            };
            cmd_generate(&params, seed, out.as_deref(), planted.as_deref(), stdout)
        }
        Command::Bench { instance, method, limits, output } => cmd_bench(&instance, &method, &limits, &output, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

fn cmd_validate(path: &Path, stdout: &mut dyn Write) -> CmdResult {
    let inst = match parse_document(&read(path)?) {
        Ok(inst) => inst,
        Err(e @ InstanceError::Syntax { .. }) => {
            say(stdout, &format!("{e}\n"))?;
            return Err(Failure::Domain(format!("{}: invalid document", path.display())));
        }
        Err(e) => return Err(Failure::Domain(e.to_string())),
    };
    let report = validate(&inst);
    if report.is_empty() {
        say(stdout, "OK\n")
    } else {
        say(stdout, &report.to_string())?;
        Err(Failure::Domain(format!("{}: {} issue(s)", path.display(), report.issues.len())))
    }
}

fn cmd_evaluate(instance: &Path, solution: &Path, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    let inst = load_instance(instance)?;
    let sched = load_schedule(solution)?;
    let violations = check_feasibility(&inst, &sched).map_err(|e| Failure::Usage(e.to_string()))?;
    let b = evaluate(&inst, &sched).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut text = String::new();
    match output.format {
        Format::Csv => {
            text.push_str("t,mean,quantile,excess\n");
            for t in 0..inst.horizon {
                let _ = writeln!(text, "{},{},{},{}", t + 1, b.mean[t], b.quantile[t], b.excess[t]);
            }
        }
        Format::Markdown => {
            let _ = writeln!(text, "| t | mean | quantile | excess |\n|---:|---:|---:|---:|");
            for t in 0..inst.horizon {
                let _ = writeln!(text, "| {} | {:.6} | {:.6} | {:.6} |", t + 1, b.mean[t], b.quantile[t], b.excess[t]);
            }
            let _ = writeln!(text, "\nobj1 = {:.6}, obj2 = {:.6}, blended = {:.6}", b.obj1, b.obj2, b.blended);
        }
        Format::Text => {
            let _ = writeln!(text, "obj1    {:.6}\nobj2    {:.6}\nblended {:.6}", b.obj1, b.obj2, b.blended);
            let _ = writeln!(text, "{:>4} {:>12} {:>12} {:>12}", "t", "mean", "quantile", "excess");
            for t in 0..inst.horizon {
                let _ = writeln!(text, "{:>4} {:>12.6} {:>12.6} {:>12.6}", t + 1, b.mean[t], b.quantile[t], b.excess[t]);
            }
        }
    }
    emit(output.out.as_deref(), &text, stdout)?;
    if violations.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = violations.iter().map(|v| format!("- {v}")).collect();
        say(stdout, &format!("infeasible:\n{}\n", list.join("\n")))?;
        Err(Failure::Domain(format!("{} violation(s)", violations.len())))
    }
}

fn summary(result: &MethodResult) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "method     {}", result.method);
    let _ = writeln!(text, "status     {:?}", result.status);
    if let Some(b) = &result.breakdown {
        let _ = writeln!(text, "objective  {:.6}", b.blended);
    }
    let _ = writeln!(text, "bound      {:.6}", result.lower_bound);
    match result.gap_percent {
        Some(g) => {
            let _ = writeln!(text, "gap        {g:.2}%");
        }
        None => text.push_str("gap        -\n"),
    }
    let _ = writeln!(text, "nodes      {}", result.nodes);
    for (family, count) in &result.cuts {
        let _ = writeln!(text, "cuts       {family}: {count}");
    }
    text
}

fn cmd_solve(instance: &Path, method: Method, limits: &LimitArgs, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    let inst = load_instance(instance)?;
    let result = solve_method(&inst, &method_config(method, limits)).map_err(|e| Failure::Domain(e.to_string()))?;
    let mut text = summary(&result);
    if output.format == Format::Text {
        let _ = writeln!(text, "time       {:.3} s", result.elapsed.as_secs_f64());
    }
    say(stdout, &text)?;
    let Some(schedule) = &result.schedule else {
        return Err(Failure::Domain(format!("no feasible schedule ({:?})", result.status)));
    };
    match &output.out {
        Some(p) => emit(Some(p), &schedule.to_text(), stdout),
        None => say(stdout, &schedule.to_text()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_separate(
    instance: &Path,
    solution: &Path,
    t: usize,
    family: FamilyArg,
    y: f64,
    seed: u64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let inst = load_instance(instance)?;
    let sched = load_schedule(solution)?;
    if t == 0 || t > inst.horizon {
        return Err(Failure::Usage(format!("timestep {t} outside 1..={}", inst.horizon)));
    }
    let rm = risk_matrix(&inst, t);
    let a = &rm.matrix;
    let k = crate::instance::rank_at(&inst, t);
    let point: Vec<f64> = rm
        .columns
        .iter()
        .map(|&(i, s)| if sched.is_scheduled(&inst.interventions[i].name, s) { 1.0 } else { 0.0 })
        .collect();
    let fail = |e: crate::cut::CutError| Failure::Domain(e.to_string());
    let mut text = String::new();
    let render = |coefficients: &[f64], constant: f64, var: &str| {
        let mut s = String::from("y >=");
        for (j, c) in coefficients.iter().enumerate().filter(|(_, c)| **c != 0.0) {
            let _ = write!(s, " {c}·{var}[{j}] +");
        }
        let _ = write!(s, " {constant}");
        s
    };
    let columns: Vec<String> = rm
        .columns
        .iter()
        .enumerate()
        .map(|(j, &(i, s))| format!("x[{j}] = {} starts at {s}", inst.interventions[i].name))
        .collect();
    match family {
        FamilyArg::Symmetric => {
            // unit box: scenario risks divided by the largest upper bound
            let upper = &risk_upper_bounds(&inst)[t - 1];
            let scale = upper.iter().copied().fold(0.0, f64::max).max(1e-12);
            let x: Vec<f64> = a.apply(&point).iter().map(|v| v / scale).collect();
            let cut = best_symmetric_cut(&x, k).map_err(fail)?;
            let _ = writeln!(text, "# z[s] is the risk of scenario s divided by {scale}");
            let _ = writeln!(text, "{}", render(&cut.coefficients, cut.constant, "z"));
            let _ = writeln!(text, "# bound at point: {} (y = {y})", cut.bound_at(&x) * scale);
        }
        FamilyArg::Asymmetric => {
            let z = a.apply(&point);
            let upper = &risk_upper_bounds(&inst)[t - 1];
            let bounds = BoxBounds::new(vec![0.0; z.len()], upper.clone()).map_err(fail)?;
            match best_asymmetric_cut(&z, k, &bounds).map_err(fail)? {
                Some(cut) => {
                    let bound = cut.bound_at(&z);
                    let _ = writeln!(text, "# z[s] is the risk of scenario s; U = {}", cut.threshold);
                    let _ = writeln!(text, "{}", render(&cut.coefficients, cut.constant, "z"));
                    let _ = writeln!(text, "# bound at point: {bound} (y = {y}, violated: {})", bound > y + 1e-6);
                }
                None => text.push_str("# no threshold above the floor; no cut\n"),
            }
        }
        _ => {
            let cuts = match family {
                FamilyArg::Simple => vec![simple_generated_cut(a, k, &point).map_err(fail)?],
                FamilyArg::Subset => {
                    let mut cuts = per_column_subsets(a, k).map_err(fail)?;
                    if a.cols() > 0 {
                        cuts.push(separate_subset_bestfirst(a, k, &point, 64, seed).map_err(fail)?);
                    }
                    cuts
                }
                FamilyArg::GeneratedSubset => vec![generated_subset_cut(a, k, &point).map_err(fail)?],
                FamilyArg::GeneralSubset => {
                    let p = crate::quantile::top_k_indices(&a.apply(&point), k);
                    vec![general_subset_cut(a, k, &p, &point, &BoxBounds::unit(a.cols())).map_err(fail)?]
                }
                _ => unreachable!(),
            };
            for c in &columns {
                let _ = writeln!(text, "# {c}");
            }
            for cut in cuts {
                let _ = writeln!(text, "{}", render(&cut.coefficients, cut.constant, "x"));
                let _ = writeln!(text, "# {} cut, rhs at point: {} (y = {y})", cut.family, cut.rhs_at(&point));
            }
        }
    }
    emit(out, &text, stdout)
}

fn cmd_export(instance: &Path, method: Method, variant: VariantArg, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let inst = load_instance(instance)?;
    let domain = |e: crate::methods::MethodError| Failure::Domain(e.to_string());
    let config = MethodConfig::new(method);
    let mut f = if method.is_cgen() { build_base(&inst) } else { build_full(&inst) }.map_err(domain)?;
    match method {
        Method::FullS | Method::CGenS => {
            add_root_subset_cuts(&mut f).map_err(domain)?;
        }
        Method::FullC => {
            run_quantile_cut_loop(&mut f, &risk_upper_bounds(&inst), config.cut_rounds, config.variant).map_err(domain)?;
        }
        Method::CGenO => {
            run_general_subset_rounds(&mut f, config.cut_rounds, config.max_free_beta, config.variant, config.tolerance)
                .map_err(domain)?;
        }
        Method::Full | Method::CGen => {}
    }
    let model = match variant {
        VariantArg::Indicator => f.model,
        VariantArg::Activate => to_bigm(&f.model, BigMVariant::Activate).map_err(|e| Failure::Domain(e.to_string()))?,
        VariantArg::Deactivate => to_bigm(&f.model, BigMVariant::Deactivate).map_err(|e| Failure::Domain(e.to_string()))?,
    };
    let text = export_lp_format(&model).map_err(|e| Failure::Domain(e.to_string()))?;
    emit(out, &text, stdout)
}

fn cmd_generate(params: &GeneratorParams, seed: u64, out: Option<&Path>, planted: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    if params.interventions == 0 || params.horizon == 0 || params.max_scenarios == 0 {
        return Err(Failure::Usage("interventions, horizon and scenarios must be positive".into()));
    }
    let g = generate_synthetic(params, seed);
    emit(out, &to_document(&g.instance), stdout)?;
    if let Some(p) = planted {
        emit(Some(p), &g.planted.to_text(), stdout)?;
    }
    Ok(())
}

fn expand(patterns: &[String]) -> Result<Vec<PathBuf>, Failure> {
    let mut paths = Vec::new();
    for pattern in patterns {
        let matches: Vec<PathBuf> = glob::glob(pattern)
            .map_err(|e| Failure::Usage(format!("bad pattern `{pattern}`: {e}")))?
            .filter_map(Result::ok)
            .collect();
        if matches.is_empty() {
            return Err(Failure::Usage(format!("no instance matches `{pattern}`")));
        }
        paths.extend(matches);
    }
    paths.sort();
    paths.dedup();
    Ok(paths)
}

fn cmd_bench(patterns: &[String], methods: &[Method], limits: &LimitArgs, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    let paths = expand(patterns)?;
    let names: Vec<String> =
        paths.iter().map(|p| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())).collect();
    let instances: Vec<Result<Instance, String>> = paths
        .iter()
        .map(|p| std::fs::read_to_string(p).map_err(|e| e.to_string()).and_then(|t| parse_instance(&t).map_err(|e| e.to_string())))
        .collect();
    let cells: Vec<(usize, Method)> = (0..paths.len()).flat_map(|i| methods.iter().map(move |&m| (i, m))).collect();
    let results: Vec<(String, Method, Result<MethodResult, String>)> = cells
        .par_iter()
        .map(|&(i, m)| {
            let result = match &instances[i] {
                Ok(inst) => solve_method(inst, &method_config(m, limits)).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            };
            (names[i].clone(), m, result)
        })
        .collect();
    let table = report(&names, methods, &results);
    let text = match output.format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Markdown => table.to_markdown(),
    };
    emit(output.out.as_deref(), &text, stdout)
}
