use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use fracpoisson::export::{format_float, write_csv_to, write_json_to};
use fracpoisson::fields::{
    fprf_moments, fprf_pmf_mc, gergely_yezhov_counts, simulate_fprf, trace_along_path, trace_compensator, CellLaw,
    FieldSample, IncreasingPath,
};
use fracpoisson::processes::{
    fpp_moments, fpp_pmf, mfpp_moments, mfpp_pmf, simulate_fpp_renewal, simulate_fpp_timechange, simulate_mfpp,
    EventTimes, MfppPmfMethod, Pmf, DEFAULT_CONVOLUTION_STEPS,
};
use fracpoisson::sampling::RandomSource;
use fracpoisson::specfun::{ml_evaluate, Accuracy};
use fracpoisson::stats::{MomentReport, SuiteEntry};
use fracpoisson::subordinate::{invert_path, simulate_subordinator, InversePath, SubordinatorPath};
use fracpoisson::validation::run_named;
use fracpoisson::{Alpha, MixedParams, SubordinatorLaw};

use crate::args::*;
use crate::error::{usage, CliError};

/// Environment variable naming the default directory for simulation output.
pub const OUT_DIR_VAR: &str = "FPP_OUT_DIR";

/// Where results go: an explicit `--out`, a default file for simulations, or
/// standard output for evaluations.
pub struct Target {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Target {
    fn new(cli: &Cli, default_name: Option<&str>) -> Self {
        let path = cli.out.clone().or_else(|| {
            default_name.map(|name| {
                let dir = std::env::var_os(OUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                dir.join(format!("{name}.{}", extension(cli.format)))
            })
        });
        Self { format: cli.format, path }
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        writer_for(self.path.as_deref())
    }

    fn emit<T: Serialize>(&self, header: &[&str], rows: Vec<Vec<String>>, json: &T) -> Result<(), CliError> {
        match self.format {
            Format::Csv => write_csv_to(self.writer()?, header, rows)?,
            Format::Json => write_json_to(self.writer()?, json)?,
        }
        Ok(())
    }
}

fn writer_for(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Output(p.display().to_string(), e))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

/// Runs the parsed command. `Ok(false)` means a validation check failed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::MlEval(a) => ml_eval(cli, a),
        Command::SimulateSubordinator(a) => simulate_subordinator_cmd(cli, a, false),
        Command::SimulateInverse(a) => simulate_subordinator_cmd(cli, a, true),
        Command::SimulateFpp(a) => simulate_fpp(cli, a),
        Command::SimulateMfpp(a) => simulate_mfpp_cmd(cli, a),
        Command::SimulateFprf(a) => simulate_fprf_cmd(cli, a),
        Command::Pmf(a) => pmf(cli, a),
        Command::Moments(a) => moments(cli, a),
        Command::Trace(a) => trace(cli, a),
        Command::Records(a) => records(cli, a),
        Command::Validate(a) => validate(cli, a),
    }
    .map(|pass| pass.unwrap_or(true))
}

type Outcome = Result<Option<bool>, CliError>;

fn alpha(name: &str, v: f64) -> Result<Alpha, CliError> {
    Alpha::new(v).map_err(|e| usage(format!("--{name}: {e}")))
}

fn required(name: &str, v: Option<f64>, context: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| usage(format!("--{name} is required {context}")))
}

fn mixed(alpha1: Option<f64>, alpha2: Option<f64>, c1: Option<f64>, c2: Option<f64>) -> Result<MixedParams, CliError> {
    let ctx = "for the mixed process";
    MixedParams::new(
        required("alpha1", alpha1, ctx)?,
        required("alpha2", alpha2, ctx)?,
        required("c1", c1, ctx)?,
        required("c2", c2, ctx)?,
    )
    .map_err(|e| usage(e.to_string()))
}

fn mixed_args(m: &MixedArgs) -> Result<MixedParams, CliError> {
    mixed(Some(m.alpha1), Some(m.alpha2), Some(m.c1), Some(m.c2))
}

fn law(l: &LawArgs) -> Result<SubordinatorLaw, CliError> {
    match l.alpha {
        Some(a) => Ok(alpha("alpha", a)?.into()),
        None => Ok(mixed(l.alpha1, l.alpha2, l.c1, l.c2)
            .map_err(|e| usage(format!("give --alpha, or --alpha1 --alpha2 --c1 --c2 ({e})")))?
            .into()),
    }
}

fn ml_eval(cli: &Cli, a: &MlEvalArgs) -> Outcome {
    #[derive(Serialize)]
    struct Row {
        alpha: f64,
        beta: f64,
        gamma: f64,
        z: f64,
        value: f64,
        error: f64,
        regime: fracpoisson::specfun::MlRegime,
    }
    let mut out = Vec::new();
    for &z in &a.z {
        let v = ml_evaluate(a.alpha, a.beta, a.gamma, z, 0.0, Accuracy::default())?;
        out.push(Row {
            alpha: a.alpha,
            beta: a.beta,
            gamma: a.gamma,
            z,
            value: v.value,
            error: v.error,
            regime: v.regime,
        });
    }
    let rows = out
        .iter()
        .map(|r| [r.alpha, r.beta, r.gamma, r.z, r.value].iter().map(|&x| format_float(x)).collect())
        .collect();
    Target::new(cli, None).emit(&["alpha", "beta", "gamma", "z", "value"], rows, &out)?;
    Ok(None)
}

fn subordinator_rows(path: &SubordinatorPath) -> Vec<Vec<String>> {
    path.times().zip(&path.values).map(|(t, &l)| vec![format_float(t), format_float(l)]).collect()
}

fn inverse_rows(path: &InversePath) -> Vec<Vec<String>> {
    path.jump_times
        .iter()
        .enumerate()
        .map(|(n, &s)| vec![format_float(s), format_float(n as f64 * path.delta)])
        .collect()
}

fn simulate_subordinator_cmd(cli: &Cli, a: &SubordinatorArgs, inverse: bool) -> Outcome {
    let law = law(&a.law)?;
    let rng = &mut RandomSource::new(a.seed, 0);
    let path = simulate_subordinator(law, a.delta, a.t_end, rng)?;
    if inverse {
        let inv = invert_path(&path);
        Target::new(cli, Some("inverse")).emit(&["s", "Y"], inverse_rows(&inv), &inv)?;
    } else {
        Target::new(cli, Some("subordinator")).emit(&["t", "L"], subordinator_rows(&path), &path)?;
    }
    Ok(None)
}

fn event_rows(e: &EventTimes) -> Vec<Vec<String>> {
    e.times.iter().map(|&t| vec![format_float(t)]).collect()
}

fn simulate_fpp(cli: &Cli, a: &SimulateFppArgs) -> Outcome {
    let al = alpha("alpha", a.alpha)?;
    let rng = &mut RandomSource::new(a.seed, 0);
    let events = match a.method {
        FppMethod::Renewal => simulate_fpp_renewal(al, a.lambda, a.t_end, rng)?,
        FppMethod::Timechange => simulate_fpp_timechange(al, a.lambda, a.t_end, a.delta, rng)?.0,
    };
    Target::new(cli, Some("fpp_events")).emit(&["t"], event_rows(&events), &events)?;
    Ok(None)
}

fn simulate_mfpp_cmd(cli: &Cli, a: &SimulateMfppArgs) -> Outcome {
    let params = mixed_args(&a.mixed)?;
    let events = simulate_mfpp(&params, a.lambda, a.t_end, a.delta, &mut RandomSource::new(a.seed, 0))?;
    Target::new(cli, Some("mfpp_events")).emit(&["t"], event_rows(&events), &events)?;
    Ok(None)
}

fn field(f: &FieldArgs) -> Result<FieldSample, CliError> {
    let law = match f.cell_law {
        CellLawArg::Poisson => CellLaw::Poisson,
        CellLawArg::Bernoulli => CellLaw::Bernoulli,
    };
    let (a1, a2) = (alpha("alpha1", f.alpha1)?, alpha("alpha2", f.alpha2)?);
    Ok(simulate_fprf(a1, a2, f.lambda, f.window, f.delta, law, &mut RandomSource::new(f.seed, 0))?)
}

/// `dir/stem_suffix.ext` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "points".into());
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_{suffix}{ext}"))
}

fn simulate_fprf_cmd(cli: &Cli, a: &SimulateFprfArgs) -> Outcome {
    let sample = field(&a.field)?;
    let target = Target::new(cli, Some("fprf_points"));
    let path = target.path.clone().expect("simulations always write files");
    let points: Vec<Vec<String>> =
        sample.points.points.iter().map(|&(x, y)| vec![format_float(x), format_float(y)]).collect();
    target.emit(&["x", "y"], points, &sample.points)?;
    for (suffix, driver) in [("driver1", &sample.first), ("driver2", &sample.second)] {
        let t = Target { format: cli.format, path: Some(sibling(&path, suffix)) };
        t.emit(&["s", "Y"], inverse_rows(driver), driver)?;
    }
    Ok(None)
}

fn pmf_rows(p: &Pmf) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match &p.standard_errors {
        Some(se) => (
            vec!["k", "p", "se"],
            p.probs
                .iter()
                .zip(se)
                .enumerate()
                .map(|(k, (&v, &s))| vec![k.to_string(), format_float(v), format_float(s)])
                .collect(),
        ),
        None => {
            (vec!["k", "p"], p.probs.iter().enumerate().map(|(k, &v)| vec![k.to_string(), format_float(v)]).collect())
        }
    }
}

fn seed_for_mc(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| usage("--seed is required for Monte Carlo pmfs"))
}

fn pmf(cli: &Cli, a: &PmfArgs) -> Outcome {
    let method = a.method.unwrap_or(if a.process == Process::Fprf { PmfMethod::Montecarlo } else { PmfMethod::Exact });
    let p = match a.process {
        Process::Fpp => {
            if method != PmfMethod::Exact {
                return Err(usage("the fpp pmf supports --method exact only"));
            }
            let al = alpha("alpha", required("alpha", a.alpha, "for fpp")?)?;
            fpp_pmf(al, a.lambda, required("t", a.t, "for fpp")?, a.k_max)?
        }
        Process::Mfpp => {
            let params = mixed(a.alpha1, a.alpha2, a.c1, a.c2)?;
            let m = match method {
                PmfMethod::Exact => MfppPmfMethod::default(),
                PmfMethod::Convolution => MfppPmfMethod::Convolution { steps: DEFAULT_CONVOLUTION_STEPS },
                PmfMethod::Montecarlo => {
                    MfppPmfMethod::MonteCarlo { samples: a.n_mc, seed: seed_for_mc(a.seed)?, jobs: cli.jobs }
                }
            };
            mfpp_pmf(&params, a.lambda, required("t", a.t, "for mfpp")?, a.k_max, m)?
        }
        Process::Fprf => {
            if method != PmfMethod::Montecarlo {
                return Err(usage("the fprf pmf supports --method montecarlo only"));
            }
            let a1 = alpha("alpha1", required("alpha1", a.alpha1, "for fprf")?)?;
            let a2 = alpha("alpha2", required("alpha2", a.alpha2, "for fprf")?)?;
            let (t1, t2) = (required("t1", a.t1, "for fprf")?, required("t2", a.t2, "for fprf")?);
            fprf_pmf_mc(a1, a2, a.lambda, t1, t2, a.k_max, a.n_mc, seed_for_mc(a.seed)?, cli.jobs)?
        }
    };
    let (header, rows) = pmf_rows(&p);
    Target::new(cli, None).emit(&header, rows, &p)?;
    Ok(None)
}

fn moment_rows(r: &MomentReport) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["mean".into(), format_float(r.mean)], vec!["var".into(), format_float(r.variance)]];
    rows.extend(r.cov.iter().map(|c| vec!["cov".into(), format_float(c.value)]));
    rows
}

fn moments(cli: &Cli, a: &MomentsArgs) -> Outcome {
    let report = match a.process {
        Process::Fpp => {
            let t = required("t", a.t, "for fpp")?;
            fpp_moments(alpha("alpha", required("alpha", a.alpha, "for fpp")?)?, a.lambda, t, a.s.unwrap_or(t))?
        }
        Process::Mfpp => {
            let t = required("t", a.t, "for mfpp")?;
            mfpp_moments(&mixed(a.alpha1, a.alpha2, a.c1, a.c2)?, a.lambda, t, a.s.unwrap_or(t))?
        }
        Process::Fprf => {
            let a1 = alpha("alpha1", required("alpha1", a.alpha1, "for fprf")?)?;
            let a2 = alpha("alpha2", required("alpha2", a.alpha2, "for fprf")?)?;
            let t = (required("t1", a.t1, "for fprf")?, required("t2", a.t2, "for fprf")?);
            fprf_moments(a1, a2, a.lambda, t, (a.s1.unwrap_or(t.0), a.s2.unwrap_or(t.1)))?
        }
    };
    Target::new(cli, None).emit(&["quantity", "value"], moment_rows(&report), &report)?;
    Ok(None)
}

fn trace(cli: &Cli, a: &TraceArgs) -> Outcome {
    let sample = field(&a.field)?;
    let path = IncreasingPath::diagonal(a.field.window)?;
    let trace = trace_along_path(&sample.points, &path, a.n_eval)?;
    let rows = trace.samples.iter().map(|&(t, c)| vec![format_float(t), c.to_string()]).collect();
    let json: Vec<_> = trace.samples.iter().map(|&(t, c)| json!({ "t": t, "count": c })).collect();
    Target::new(cli, Some("trace")).emit(&["t", "count"], rows, &json)?;
    Ok(None)
}

fn records(cli: &Cli, a: &RecordsArgs) -> Outcome {
    if a.n_eval < 2 {
        return Err(usage("--n-eval must be at least 2"));
    }
    if !(a.t_end.is_finite() && a.t_end > 0.0) {
        return Err(usage("--t-end must be positive"));
    }
    let grid: Vec<f64> = (0..a.n_eval).map(|i| a.t_end * i as f64 / (a.n_eval - 1) as f64).collect();
    let rng = &mut RandomSource::new(a.seed, 0);
    let counts = match (a.alpha1, a.alpha2) {
        (Some(a1), Some(a2)) => {
            let (a1, a2) = (alpha("alpha1", a1)?, alpha("alpha2", a2)?);
            let sample = simulate_fprf(a1, a2, a.lambda, a.t_end, a.delta, CellLaw::Poisson, rng)?;
            let path = IncreasingPath::diagonal(a.t_end)?;
            gergely_yezhov_counts(|t| trace_compensator(&sample, &path, a.lambda, t), &grid, rng)?
        }
        _ => {
            if !(a.lambda.is_finite() && a.lambda >= 0.0) {
                return Err(usage("--lambda must be nonnegative"));
            }
            gergely_yezhov_counts(|t| a.lambda * t, &grid, rng)?
        }
    };
    let rows = grid.iter().zip(&counts).map(|(&t, &c)| vec![format_float(t), c.to_string()]).collect();
    let json: Vec<_> = grid.iter().zip(&counts).map(|(&t, &c)| json!({ "t": t, "count": c })).collect();
    Target::new(cli, Some("records")).emit(&["t", "count"], rows, &json)?;
    Ok(None)
}

fn validate(cli: &Cli, a: &ValidateArgs) -> Outcome {
    let entries: Vec<SuiteEntry> = run_named(&a.suite, a.seed, cli.jobs).map_err(|e| usage(e.to_string()))?;
    // the suite report is always JSON
    write_json_to(writer_for(cli.out.as_deref())?, &entries)?;
    Ok(Some(entries.iter().all(|e| e.pass)))
}
