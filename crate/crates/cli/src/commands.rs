//! Subcommand implementations. Each writes its artifacts under the output
//! directory and returns the paths it wrote.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use approx_sense::bounds::{
    self, balcan_guarantee_bound, joint_bounds, lambda_equivalence_bound, regularized_bound, srm_uniform_bound,
    stochastic_bound, stochastic_fixed_omega_bound, uniform_restricted_bound, BoundReport, JointErrors, Quantity,
    SrmLevel, ThresholdError,
};
use approx_sense::geometry::{
    exact_rademacher_pointset, mc_rademacher_pointset, GeometryModel, RadEstimate, SensitivityPointSet, EXACT_CAP,
};
use approx_sense::io::{read_labelled, read_matrix, read_unlabelled, write_labelled, write_unlabelled};
use approx_sense::learners::{
    analytic_lambda_erm, constrained_erm, lambda_erm, lambda_grid_srm, sensitivity_regularized_erm, srm_learner,
    GridRestrictedComplexity, LearnerOutput, LearnerSetup, SensitivityFn, ThresholdSchedule,
};
use approx_sense::model::{FeatureMap, Hypothesis, LabelledSample, SyntheticTask, UnlabelledSample};
use approx_sense::par::derive_seed;
use approx_sense::sensitivity::{
    analytic_sensitivity_upper, empirical_sensitivity, expected_sensitivity, true_sensitivity_mc_with,
    EstimateKind, SensitivityEstimate,
};
use approx_sense::validate::{run_suite, CoverageReport, Suite};
use approx_sense::Execution;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{
    parse_json, resolve_against, BoundSpec, Constituent, LearnerSpec, LoadedConfig, RegularizerSpec, SampleChoice,
    TaskSpec, COMPLEXITY_STREAM, DOMAIN_STREAM, OMEGA_STREAM, RADEMACHER_STREAM, SCHEMA_VERSION, TASK_STREAM,
    TRUE_SENSITIVITY_STREAM,
};
use crate::error::{CliError, CliResult};

/// Resolved global options.
pub struct Context {
    pub config: Option<LoadedConfig>,
    pub seed: u64,
    pub out: PathBuf,
    pub exec: Execution,
}

impl Context {
    fn config(&self, command: &'static str) -> CliResult<&LoadedConfig> {
        self.config.as_ref().ok_or(CliError::MissingSection {
            command,
            section: "--config",
        })
    }

    fn output(&self, name: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.out).map_err(|source| CliError::Write {
            path: self.out.clone(),
            source,
        })?;
        Ok(self.out.join(name))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Appends rows to a results table, writing the header only when the file is new.
fn append_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let write_err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(write_err)?;
    let fresh = file.metadata().map_err(write_err)?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |e: csv::Error| CliError::Write {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    if fresh {
        w.write_record(header).map_err(csv_err)?;
    }
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(write_err)
}

struct Data {
    labelled: LabelledSample,
    unlabelled: UnlabelledSample,
    task: Option<SyntheticTask>,
    feature_map: FeatureMap,
}

fn synthetic_task(cfg: &LoadedConfig, seed: u64, command: &'static str) -> CliResult<(SyntheticTask, usize, usize)> {
    let Some(TaskSpec::Synthetic(spec)) = &cfg.config.task else {
        return Err(CliError::MissingSection {
            command,
            section: "task.synthetic",
        });
    };
    let fm = cfg
        .config
        .feature_map
        .clone()
        .unwrap_or(FeatureMap::Identity { dim: spec.teacher.len() });
    let teacher = Hypothesis::new(spec.teacher.clone(), fm)?;
    let task = SyntheticTask::new(teacher, spec.input_law.clone(), spec.label_noise_sd, derive_seed(seed, TASK_STREAM))?;
    Ok((task, spec.m_labelled, spec.m_unlabelled))
}

fn load_data(ctx: &Context, command: &'static str) -> CliResult<Data> {
    let cfg = ctx.config(command)?;
    match &cfg.config.task {
        None => Err(CliError::MissingSection { command, section: "task" }),
        Some(TaskSpec::Synthetic(_)) => {
            let (task, m_l, m_u) = synthetic_task(cfg, ctx.seed, command)?;
            Ok(Data {
                labelled: task.generate_labelled(m_l)?,
                unlabelled: task.generate_unlabelled(m_u)?,
                feature_map: task.teacher.feature_map().clone(),
                task: Some(task),
            })
        }
        Some(TaskSpec::Csv(spec)) => {
            let labelled = read_labelled(&cfg.resolve(&spec.labelled))?;
            let unlabelled = match &spec.unlabelled {
                Some(p) => read_unlabelled(&cfg.resolve(p))?,
                None => labelled.to_unlabelled(),
            };
            let feature_map = cfg
                .config
                .feature_map
                .clone()
                .unwrap_or(FeatureMap::Identity { dim: labelled.dim() });
            Ok(Data {
                labelled,
                unlabelled,
                task: None,
                feature_map,
            })
        }
    }
}

#[derive(Serialize)]
struct GenerateManifest<'a> {
    schema_version: u32,
    seed: u64,
    task_seed: u64,
    labelled: &'a Path,
    m_labelled: usize,
    unlabelled: &'a Path,
    m_unlabelled: usize,
}

pub fn generate(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let cfg = ctx.config("generate")?;
    let (task, m_l, m_u) = synthetic_task(cfg, ctx.seed, "generate")?;
    let (l_path, u_path) = (ctx.output("labelled.csv")?, ctx.output("unlabelled.csv")?);
    write_labelled(&l_path, &task.generate_labelled(m_l)?)?;
    write_unlabelled(&u_path, &task.generate_unlabelled(m_u)?)?;
    let manifest = ctx.output("generate.json")?;
    write_json(
        &manifest,
        &GenerateManifest {
            schema_version: SCHEMA_VERSION,
            seed: ctx.seed,
            task_seed: task.seed,
            labelled: Path::new("labelled.csv"),
            m_labelled: m_l,
            unlabelled: Path::new("unlabelled.csv"),
            m_unlabelled: m_u,
        },
    )?;
    Ok(vec![l_path, u_path, manifest])
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub schema_version: u32,
    pub seed: u64,
    pub config_digest: String,
    pub output: LearnerOutput,
}

pub fn train(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let cfg = ctx.config("train")?;
    let data = load_data(ctx, "train")?;
    let c = &cfg.config;
    let learner = c.learner.as_ref().ok_or(CliError::MissingSection {
        command: "train",
        section: "learner",
    })?;
    let op = c.operator.clone().ok_or(CliError::MissingSection {
        command: "train",
        section: "operator",
    })?;
    let mut domain = c.domain.clone().ok_or(CliError::MissingSection {
        command: "train",
        section: "domain",
    })?;
    domain.seed = derive_seed(ctx.seed, DOMAIN_STREAM);
    let mut setup = LearnerSetup::new(data.feature_map.clone(), op, c.loss, domain);
    setup.exec = ctx.exec;
    let (l, u) = (&data.labelled, &data.unlabelled);
    let output = match learner {
        LearnerSpec::ConstrainedErm { t, p } => constrained_erm(l, u, *t, *p, &setup)?,
        LearnerSpec::Srm {
            thresholds,
            weights,
            epsilon_u,
            p,
            n_sigma,
        } => {
            let schedule = ThresholdSchedule::new(thresholds.clone(), weights.clone())?;
            let complexity =
                GridRestrictedComplexity::new(&setup, l, u, *p, *n_sigma, derive_seed(ctx.seed, COMPLEXITY_STREAM))?;
            srm_learner(l, u, &schedule, *epsilon_u, *p, &complexity, &setup)?
        }
        LearnerSpec::SensitivityRegularized { regularizer } => {
            let labelled_inputs;
            let sens = match regularizer {
                RegularizerSpec::Empirical { p, sample } => {
                    let sample = match sample {
                        SampleChoice::Unlabelled => u,
                        SampleChoice::Labelled => {
                            labelled_inputs = l.to_unlabelled();
                            &labelled_inputs
                        }
                    };
                    SensitivityFn::Empirical { sample, p: *p }
                }
                RegularizerSpec::MonteCarloTrue { p, n_mc } => SensitivityFn::MonteCarloTrue {
                    task: data.task.as_ref().ok_or(CliError::MissingSection {
                        command: "train",
                        section: "task.synthetic",
                    })?,
                    p: *p,
                    n_mc: *n_mc,
                    seed: derive_seed(ctx.seed, TRUE_SENSITIVITY_STREAM),
                },
                RegularizerSpec::Analytic { budget } => SensitivityFn::Analytic { budget: *budget },
            };
            sensitivity_regularized_erm(l, sens, &setup)?
        }
        LearnerSpec::LambdaErm { lambda, p } => lambda_erm(l, u, *lambda, *p, &setup)?,
        LearnerSpec::AnalyticLambdaErm { lambda, budget } => analytic_lambda_erm(l, *lambda, *budget, &setup)?,
        LearnerSpec::LambdaGridSrm { lambdas, weights, p } => {
            let weights = weights
                .clone()
                .unwrap_or_else(|| (1..=lambdas.len()).map(|k| 0.5f64.powi(k as i32)).collect());
            lambda_grid_srm(l, u, lambdas, &weights, *p, &setup)?
        }
    };
    let path = ctx.output("train.json")?;
    let config_value = serde_json::to_value(c).expect("config always serializes");
    write_json(
        &path,
        &TrainReport {
            schema_version: SCHEMA_VERSION,
            seed: ctx.seed,
            config_digest: bounds::digest(&config_value),
            output,
        },
    )?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct SensitivityReport {
    schema_version: u32,
    seed: u64,
    hypothesis: Hypothesis,
    estimates: Vec<SensitivityEstimate>,
}

pub fn sensitivity(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let cfg = ctx.config("sensitivity")?;
    let spec = cfg.config.sensitivity.as_ref().ok_or(CliError::MissingSection {
        command: "sensitivity",
        section: "sensitivity",
    })?;
    let op = cfg.config.operator.clone().ok_or(CliError::MissingSection {
        command: "sensitivity",
        section: "operator",
    })?;
    let data = load_data(ctx, "sensitivity")?;
    let h = match (&spec.weights, &spec.train_output) {
        (Some(w), None) => Hypothesis::new(w.clone(), data.feature_map.clone())?,
        (None, Some(p)) => {
            let path = cfg.resolve(p);
            let text = fs::read_to_string(&path).map_err(|source| approx_sense::Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_json::<TrainReport>(&text, &path)?.output.hypothesis
        }
        _ => {
            return Err(CliError::Usage(
                "the sensitivity section needs exactly one of `weights` or `train_output`".into(),
            ))
        }
    };
    let mut estimates = Vec::new();
    if op.is_deterministic() {
        estimates.push(empirical_sensitivity(&h, &op, &data.unlabelled, spec.p)?);
    } else {
        let seed = derive_seed(ctx.seed, OMEGA_STREAM);
        estimates.push(expected_sensitivity(&h, &op, &data.unlabelled, spec.p, spec.n_omega, seed)?);
    }
    if let Some(n_mc) = spec.n_mc {
        let task = data.task.as_ref().ok_or(CliError::MissingSection {
            command: "sensitivity",
            section: "task.synthetic",
        })?;
        let seed = derive_seed(ctx.seed, TRUE_SENSITIVITY_STREAM);
        estimates.push(true_sensitivity_mc_with(&h, &op, task, spec.p, n_mc, seed, ctx.exec)?);
    }
    if let Some(budget) = spec.budget {
        estimates.push(analytic_sensitivity_upper(&h, &op, budget)?);
    }
    let path = ctx.output("sensitivity.json")?;
    write_json(
        &path,
        &SensitivityReport {
            schema_version: SCHEMA_VERSION,
            seed: ctx.seed,
            hypothesis: h,
            estimates,
        },
    )?;
    Ok(vec![path])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RadMethodArg {
    /// Exact enumeration when m <= 22, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

pub enum RadSource<'a> {
    Geometry(&'a Path),
    Pointset(&'a Path),
}

pub fn rademacher(ctx: &Context, source: RadSource<'_>, method: RadMethodArg, n_sigma: usize) -> CliResult<(Vec<PathBuf>, RadEstimate)> {
    let est = match source {
        RadSource::Geometry(path) => {
            if method != RadMethodArg::Auto {
                return Err(CliError::Usage(
                    "--method applies to point sets; geometry models use their closed form".into(),
                ));
            }
            let text = fs::read_to_string(path).map_err(|source| approx_sense::Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_json::<GeometryModel>(&text, path)?.rademacher()?
        }
        RadSource::Pointset(path) => {
            let ps = SensitivityPointSet::new(read_matrix(path)?)?;
            let exact = match method {
                RadMethodArg::Auto => ps.m() <= EXACT_CAP,
                RadMethodArg::Exact => true,
                RadMethodArg::Mc => false,
            };
            if exact {
                exact_rademacher_pointset(&ps, ctx.exec)?
            } else {
                mc_rademacher_pointset(&ps, n_sigma, derive_seed(ctx.seed, RADEMACHER_STREAM), ctx.exec)?
            }
        }
    };
    let path = ctx.output("rademacher.json")?;
    write_json(&path, &est)?;
    Ok((vec![path], est))
}

/// Reads a constituent artifact. Bound reports are checked for `value = Σ terms`.
fn load_constituent_file(path: &Path) -> CliResult<Quantity> {
    let text = fs::read_to_string(path).map_err(|source| approx_sense::Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let value: Value = parse_json(&text, path)?;
    let has = |k: &str| value.get(k).is_some();
    if has("terms") {
        let report: BoundReport = parse_json(&text, path)?;
        report.verify()?;
        Ok(Quantity {
            value: report.value,
            certified: report.certified,
            standard_error: None,
        })
    } else if has("method") {
        let est: RadEstimate = parse_json(&text, path)?;
        Ok(Quantity::from(&est))
    } else if has("kind") && has("p") {
        let est: SensitivityEstimate = parse_json(&text, path)?;
        let certified = matches!(est.kind, EstimateKind::Empirical | EstimateKind::AnalyticUpper);
        Ok(Quantity {
            value: est.value,
            certified,
            standard_error: est.standard_error,
        })
    } else {
        Err(CliError::Constituent {
            path: path.to_path_buf(),
            message: "not a bound report, Rademacher estimate or sensitivity estimate".into(),
        })
    }
}

struct Resolver<'a> {
    dir: &'a Path,
    bound: &'static str,
}

impl Resolver<'_> {
    fn quantity(&self, c: &Option<Constituent>, name: &'static str) -> CliResult<Quantity> {
        match c {
            None => Err(self.missing(name)),
            Some(c) => self.constituent(c),
        }
    }

    fn constituent(&self, c: &Constituent) -> CliResult<Quantity> {
        match c {
            Constituent::Value(v) => Ok(Quantity::certified(*v)),
            Constituent::Quantity(q) => Ok(*q),
            Constituent::File { file } => load_constituent_file(&resolve_against(self.dir, file)),
        }
    }

    fn scalar<T: Copy>(&self, v: &Option<T>, name: &'static str) -> CliResult<T> {
        v.ok_or_else(|| self.missing(name))
    }

    fn missing(&self, name: &'static str) -> CliError {
        CliError::MissingConstituent {
            bound: self.bound,
            name,
        }
    }
}

fn bound_reports(spec: &BoundSpec, rho: f64, default_delta: f64, dir: &Path) -> CliResult<Vec<BoundReport>> {
    let r = |bound| Resolver { dir, bound };
    let d = |delta: &Option<f64>| delta.unwrap_or(default_delta);
    let reports = match spec {
        BoundSpec::UniformRestricted { emp_err, rad_ht, m, delta } => {
            let r = r("uniform_restricted");
            vec![uniform_restricted_bound(
                r.quantity(emp_err, "emp_err")?.value,
                r.quantity(rad_ht, "rad_ht")?,
                rho,
                r.scalar(m, "m")?,
                d(delta),
            )?]
        }
        BoundSpec::SrmUniform {
            emp_err,
            rad_ht_k,
            w_k,
            m,
            delta,
        } => {
            let r = r("srm_uniform");
            vec![srm_uniform_bound(
                r.quantity(emp_err, "emp_err")?.value,
                r.quantity(rad_ht_k, "rad_ht_k")?,
                r.scalar(w_k, "w_k")?,
                rho,
                r.scalar(m, "m")?,
                d(delta),
            )?]
        }
        BoundSpec::Joint {
            min_approx_err,
            err_f_star,
            rad_ha,
            t,
            m,
            delta,
        } => {
            let r = r("joint");
            let errs = JointErrors {
                min_approx_err: r.quantity(min_approx_err, "min_approx_err")?,
                err_f_star: r.quantity(err_f_star, "err_f_star")?,
            };
            joint_bounds(errs, r.quantity(rad_ha, "rad_ha")?, rho, r.scalar(t, "t")?, r.scalar(m, "m")?, d(delta))?.to_vec()
        }
        BoundSpec::Regularized {
            err_star_t,
            rad_ha,
            epsilon_u,
            m,
            delta,
        } => {
            let r = r("regularized");
            let grid = err_star_t
                .as_ref()
                .ok_or_else(|| r.missing("err_star_t"))?
                .iter()
                .map(|e| {
                    Ok(ThresholdError {
                        t: e.t,
                        err_star: r.constituent(&e.err_star)?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            vec![regularized_bound(&grid, rho, r.quantity(rad_ha, "rad_ha")?, r.scalar(m, "m")?, d(delta), *epsilon_u)?]
        }
        BoundSpec::LambdaEquivalence {
            rad_ha,
            lambda,
            epsilon_u,
            m,
            delta,
        } => {
            let r = r("lambda_equivalence");
            vec![lambda_equivalence_bound(
                rho,
                r.quantity(rad_ha, "rad_ha")?,
                r.scalar(m, "m")?,
                d(delta),
                r.scalar(lambda, "lambda")?,
                *epsilon_u,
            )?]
        }
        BoundSpec::StochasticExpected {
            exp_emp_err,
            exp_sensitivity,
            exp_rad,
            m,
            delta,
        } => {
            let r = r("stochastic_expected");
            vec![stochastic_bound(
                r.quantity(exp_emp_err, "exp_emp_err")?,
                r.quantity(exp_sensitivity, "exp_sensitivity")?,
                r.quantity(exp_rad, "exp_rad")?,
                rho,
                r.scalar(m, "m")?,
                d(delta),
            )?]
        }
        BoundSpec::StochasticFixedOmega {
            emp_err,
            sensitivity,
            rad,
            m,
            delta,
        } => {
            let r = r("stochastic_fixed_omega");
            vec![stochastic_fixed_omega_bound(
                r.quantity(emp_err, "emp_err")?,
                r.quantity(sensitivity, "sensitivity")?,
                r.quantity(rad, "rad")?,
                rho,
                r.scalar(m, "m")?,
                d(delta),
            )?]
        }
        BoundSpec::BalcanGuarantee { levels, m, delta } => {
            let r = r("balcan_guarantee");
            let levels = levels
                .as_ref()
                .ok_or_else(|| r.missing("levels"))?
                .iter()
                .map(|l| {
                    Ok(SrmLevel {
                        err_star: r.constituent(&l.err_star)?,
                        rad: r.constituent(&l.rad)?,
                        w: l.w,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            vec![balcan_guarantee_bound(&levels, rho, r.scalar(m, "m")?, d(delta))?]
        }
    };
    Ok(reports)
}

pub const BOUND_CSV_HEADER: [&str; 6] = ["name", "value", "delta", "certified", "inputs_digest", "terms"];

pub fn bound(ctx: &Context) -> CliResult<(Vec<PathBuf>, Vec<BoundReport>)> {
    let cfg = ctx.config("bound")?;
    let c = &cfg.config;
    if c.bounds.is_empty() {
        return Err(CliError::MissingSection {
            command: "bound",
            section: "bounds",
        });
    }
    let mut reports = Vec::new();
    for spec in &c.bounds {
        reports.extend(bound_reports(spec, c.loss.rho(), c.delta, &cfg.dir)?);
    }
    let json_path = ctx.output("bounds.json")?;
    write_json(&json_path, &reports)?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let terms: Vec<String> = r.terms.iter().map(|t| format!("{}={}", t.label, t.value)).collect();
            vec![
                r.name.clone(),
                r.value.to_string(),
                r.delta.to_string(),
                r.certified.to_string(),
                r.inputs_digest.clone(),
                terms.join(";"),
            ]
        })
        .collect();
    let csv_path = ctx.output("bounds.csv")?;
    append_csv(&csv_path, &BOUND_CSV_HEADER, &rows)?;
    Ok((vec![json_path, csv_path], reports))
}

pub const COVERAGE_CSV_HEADER: [&str; 11] = [
    "suite",
    "bound",
    "trials",
    "violations",
    "coverage",
    "target",
    "required",
    "mean_slack",
    "min_slack",
    "passed",
    "seed",
];

pub fn validate(ctx: &Context, suite: &str, trials: Option<usize>) -> CliResult<(Vec<PathBuf>, CoverageReport)> {
    let suite: Suite = suite.parse()?;
    let trials = trials.or(ctx.config.as_ref().and_then(|c| c.config.trials));
    let report = run_suite(suite, trials, ctx.seed, ctx.exec)?;
    let json_path = ctx.output(&format!("validate_{}.json", suite.name()))?;
    write_json(&json_path, &report)?;
    let csv_path = ctx.output("coverage.csv")?;
    let row = vec![
        report.suite.clone(),
        report.bound.clone(),
        report.trials.to_string(),
        report.violations.to_string(),
        report.coverage.to_string(),
        report.target.to_string(),
        report.required.to_string(),
        report.mean_slack.to_string(),
        report.min_slack.to_string(),
        report.passed.to_string(),
        report.seed.to_string(),
    ];
    append_csv(&csv_path, &COVERAGE_CSV_HEADER, &[row])?;
    Ok((vec![json_path, csv_path], report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_constituent_is_named() {
        let spec: BoundSpec =
            serde_json::from_str(r#"{"kind": "uniform_restricted", "emp_err": 0.1, "m": 100}"#).unwrap();
        let err = bound_reports(&spec, 1.0, 0.05, Path::new(".")).unwrap_err();
        assert_eq!(err.code(), "missing_constituent");
        assert!(err.to_string().contains("`rad_ht`"), "{err}");
    }

    #[test]
    fn zero_constituents_leave_the_confidence_term() {
        let spec: BoundSpec =
            serde_json::from_str(r#"{"kind": "uniform_restricted", "emp_err": 0, "rad_ht": 0, "m": 100, "delta": 0.05}"#)
                .unwrap();
        let r = &bound_reports(&spec, 1.0, 0.5, Path::new(".")).unwrap()[0];
        let expected = 3.0 * ((2.0f64 / 0.05).ln() / 200.0).sqrt();
        assert!((r.value - expected).abs() < 1e-15);
        assert!(r.certified);
    }

    #[test]
    fn estimated_constituent_clears_certified() {
        let spec: BoundSpec = serde_json::from_str(
            r#"{"kind": "uniform_restricted", "emp_err": 0.1,
                "rad_ht": {"value": 0.2, "certified": false, "standard_error": 0.01}, "m": 50}"#,
        )
        .unwrap();
        let r = &bound_reports(&spec, 1.0, 0.05, Path::new(".")).unwrap()[0];
        assert!(!r.certified);
    }

    #[test]
    fn joint_spec_yields_three_reports() {
        let spec: BoundSpec = serde_json::from_str(
            r#"{"kind": "joint", "min_approx_err": 0.1, "err_f_star": 0.1, "rad_ha": 0.05, "t": 0.1, "m": 100}"#,
        )
        .unwrap();
        assert_eq!(bound_reports(&spec, 1.0, 0.05, Path::new(".")).unwrap().len(), 3);
    }
}
