//! `vanish` — exact calculators for cohomology vanishing thresholds of
//! embedded projective varieties: catalog construction, vanishing scans,
//! discrepancy reports, multiplicity-vector optimization, curve bounds, and
//! skew 2-form normalization.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use vanish_core::catalog::{bound_report, build_target, describe, parse_label, standard_entries};
use vanish_core::cohomology::{vanishing_scan, ScanVerdict};
use vanish_core::curves::{
    curve_lc_class, exception_region, large_degree_threshold, low_genus_curve_bound,
    CurveClassVariant,
};
use vanish_core::discrepancy::{discrepancy_report, optimize_multiplicities, MultiplicityVector};
use vanish_core::divisor::degree_sum_bound;
use vanish_core::field::{FieldSpec, Fp, Rat, F3, F32003};
use vanish_core::gb::ResourceLimits;
use vanish_core::skew::{extract_normal_data, omega, smoothing, wedge_power_limit, SkewFamily};

#[derive(Parser)]
#[command(
    name = "vanish",
    version,
    about = "Vanishing-threshold calculators for embedded projective varieties"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigFlags {
    /// Coefficient field: fp:3, fp:5, fp:101, fp:32003, or q
    #[arg(long, global = true)]
    field: Option<String>,
    /// Seed for all randomized constructions
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Degree cap for Gröbner-driven computations
    #[arg(long, global = true)]
    max_degree: Option<i64>,
    /// Wall-time cap per query, in seconds
    #[arg(long, global = true)]
    time_limit: Option<u64>,
    /// JSON config file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV side outputs
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
struct FileConfig {
    field: Option<String>,
    seed: Option<u64>,
    max_degree: Option<i64>,
    time_limit: Option<u64>,
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    field: String,
    seed: u64,
    max_degree: Option<i64>,
    time_limit_secs: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_dir: Option<PathBuf>,
}

impl RunConfig {
    fn resolve(flags: &ConfigFlags) -> Result<Self> {
        let file: FileConfig = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text).context("parsing config file")?
            }
            None => FileConfig::default(),
        };
        let field = flags
            .field
            .clone()
            .or(file.field)
            .unwrap_or_else(|| "fp:32003".to_string());
        field.parse::<FieldSpec>().map_err(|e| anyhow!("{e}"))?;
        Ok(RunConfig {
            field,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            max_degree: flags.max_degree.or(file.max_degree),
            time_limit_secs: flags.time_limit.or(file.time_limit),
            out_dir: flags.out_dir.clone().or(file.out_dir),
        })
    }

    fn limits(&self) -> ResourceLimits {
        ResourceLimits {
            max_degree: self.max_degree,
            deadline: self
                .time_limit_secs
                .map(|s| Instant::now() + Duration::from_secs(s)),
        }
    }

    fn spec(&self) -> FieldSpec {
        self.field.parse().expect("validated at resolve time")
    }
}

#[derive(Subcommand)]
enum Command {
    /// Catalog entries with ambient dimension, codimension, and d_Y
    List,
    /// Degree-sum bound vs strategy bound for a catalog label
    Bound { label: String },
    /// Scan H^i(I^k(p)) for i > 0 around the threshold p = e + (k-1) d_Y
    Verify {
        label: String,
        /// Threshold candidate e
        #[arg(short, allow_hyphen_values = true)]
        e: i64,
        /// Largest power k to scan
        #[arg(short, default_value_t = 2)]
        k: usize,
        /// Window radius around the threshold
        #[arg(long, default_value_t = 4)]
        pad: i64,
        /// Write the table as CSV to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Discrepancies and verdict for one multiplicity vector
    Discrepancy {
        /// Case label: segre:KxM, veronese:K, or pluecker:K
        #[arg(long)]
        case: String,
        /// Comma-separated n_2,n_3,...
        #[arg(long)]
        mults: String,
    },
    /// Optimal multiplicity vector for a case, with the degree-sum comparison
    Optimize {
        #[arg(long)]
        case: String,
    },
    /// Curve calculators: threshold, exception region, divisor classes
    CurveBound {
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        degree: i64,
        /// Write the region as CSV to this file
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Normalize, round-trip, or wedge a skew 2-form family (JSON input)
    Skewform {
        #[command(subcommand)]
        action: SkewAction,
    },
}

#[derive(Subcommand)]
enum SkewAction {
    /// Extract the flag-with-forms limit data and all wedge limits
    Normalize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Check extract -> smoothing -> extract is the identity
    Roundtrip {
        #[arg(long)]
        input: PathBuf,
    },
    /// The wedge form of the extracted data at index r
    Omega {
        #[arg(long)]
        input: PathBuf,
        #[arg(short)]
        r: usize,
    },
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    command: String,
    config: RunConfig,
    result: serde_json::Value,
    notes: Vec<String>,
}

fn emit(report: &Report) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(report)?);
    Ok(())
}

fn write_side_file(config: &RunConfig, path: &PathBuf, contents: &str) -> Result<()> {
    let full = match &config.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            dir.join(path)
        }
        None => path.clone(),
    };
    std::fs::write(&full, contents).with_context(|| format!("writing {}", full.display()))?;
    Ok(())
}

/// Run `body` with the concrete field type selected by the config.
macro_rules! with_field {
    ($spec:expr, $K:ident, $body:block) => {
        match $spec {
            FieldSpec::Prime(3) => {
                type $K = F3;
                $body
            }
            FieldSpec::Prime(5) => {
                type $K = Fp<5>;
                $body
            }
            FieldSpec::Prime(101) => {
                type $K = Fp<101>;
                $body
            }
            FieldSpec::Prime(32003) => {
                type $K = F32003;
                $body
            }
            FieldSpec::Rationals => {
                type $K = Rat;
                $body
            }
            FieldSpec::Prime(p) => {
                bail!("unsupported prime {p}: available fields are fp:3, fp:5, fp:101, fp:32003, q")
            }
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = RunConfig::resolve(&cli.config)?;
    match cli.command {
        Command::List => cmd_list(config),
        Command::Bound { label } => cmd_bound(config, &label),
        Command::Verify {
            label,
            e,
            k,
            pad,
            csv,
        } => cmd_verify(config, &label, e, k, pad, csv),
        Command::Discrepancy { case, mults } => cmd_discrepancy(config, &case, &mults),
        Command::Optimize { case } => cmd_optimize(config, &case),
        Command::CurveBound { genus, degree, csv } => cmd_curve_bound(config, genus, degree, csv),
        Command::Skewform { action } => cmd_skewform(config, action),
    }
}

fn cmd_list(config: RunConfig) -> Result<ExitCode> {
    let spec = config.spec();
    let mut rows = Vec::new();
    with_field!(spec, K, {
        for target in standard_entries() {
            let entry = describe::<K>(&target, config.seed).map_err(|e| anyhow!("{e}"))?;
            rows.push(serde_json::to_value(&entry)?);
        }
    });
    emit(&Report {
        schema: "vanish/1",
        command: "list".into(),
        config,
        result: json!({ "entries": rows }),
        notes: vec!["labels beyond this menu are accepted within parameter ranges".into()],
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bound(config: RunConfig, label: &str) -> Result<ExitCode> {
    let target = parse_label(label).map_err(|e| anyhow!("{e}"))?;
    let spec = config.spec();
    let report;
    with_field!(spec, K, {
        report = bound_report::<K>(&target, config.seed).map_err(|e| anyhow!("{e}"))?;
    });
    let notes = vec![
        "degree-sum bound: sum of the r largest defining degrees minus n".into(),
        format!("strategy bound: {}", report.strategy),
    ];
    emit(&Report {
        schema: "vanish/1",
        command: format!("bound {label}"),
        config,
        result: serde_json::to_value(&report)?,
        notes,
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    config: RunConfig,
    label: &str,
    e: i64,
    k_max: usize,
    pad: i64,
    csv: Option<PathBuf>,
) -> Result<ExitCode> {
    let target = parse_label(label).map_err(|e| anyhow!("{e}"))?;
    let spec = config.spec();
    let limits = config.limits();
    let (result, verdict, table_csv);
    with_field!(spec, K, {
        let variety = build_target::<K>(&target, config.seed).map_err(|e| anyhow!("{e}"))?;
        let out = vanishing_scan(label, &variety.ideal, variety.d_y, e, k_max, pad, &limits)
            .map_err(|e| anyhow!("{e}"))?;
        verdict = out.verdict;
        table_csv = out.table.to_csv();
        result = json!({
            "verdict": match out.verdict {
                ScanVerdict::Pass => "pass",
                ScanVerdict::Fail => "fail",
                ScanVerdict::Incomplete => "incomplete",
            },
            "threshold": out.threshold_formula,
            "violations": out.violations,
            "tightness": out.tightness,
            "incomplete": out.incomplete,
            "table": out.table.to_json(),
        });
    });
    if let Some(path) = csv {
        write_side_file(&config, &path, &table_csv)?;
    }
    emit(&Report {
        schema: "vanish/1",
        command: format!("verify {label} -e {e} -k {k_max} --pad {pad}"),
        config,
        result,
        notes: vec![
            "vanishing of every H^i(I^k(p)) with i > 0 at p >= e + (k-1) d_Y".into(),
            "sub-threshold nonvanishing is tightness evidence, not a failure".into(),
        ],
    })?;
    Ok(match verdict {
        ScanVerdict::Pass => ExitCode::SUCCESS,
        ScanVerdict::Fail => ExitCode::from(1),
        ScanVerdict::Incomplete => ExitCode::from(2),
    })
}

fn parse_case(case: &str) -> Result<vanish_core::varieties::EmbeddingCase> {
    match parse_label(case).map_err(|e| anyhow!("{e}"))? {
        vanish_core::catalog::Target::Case(c) => Ok(c),
        _ => bail!("`{case}` is not a determinantal case label"),
    }
}

fn cmd_discrepancy(config: RunConfig, case: &str, mults: &str) -> Result<ExitCode> {
    let case = parse_case(case)?;
    let values: Vec<u32> = mults
        .split(',')
        .map(|s| s.trim().parse::<u32>().context("parsing multiplicities"))
        .collect::<Result<_>>()?;
    let nv = MultiplicityVector::new(case, values).map_err(|e| anyhow!("{e}"))?;
    let report = discrepancy_report(&case, &nv).map_err(|e| anyhow!("{e}"))?;
    emit(&Report {
        schema: "vanish/1",
        command: format!("discrepancy {} --mults {mults}", case.label()),
        config,
        result: serde_json::to_value(&report)?,
        notes: vec![
            "discrepancy at index j: c_j - 1 - sum_{i>j} (i-j) n_i".into(),
            "e bound valid only when the class multiplicity along Y equals the codimension".into(),
        ],
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimize(config: RunConfig, case: &str) -> Result<ExitCode> {
    let case = parse_case(case)?;
    let (nv, report) = optimize_multiplicities(&case).map_err(|e| anyhow!("{e}"))?;
    let n = case.ambient_dim();
    let r = case.codim();
    let all_twos = degree_sum_bound(&vec![2; r], n, r).map_err(|e| anyhow!("{e}"))?;
    let result = json!({
        "case": case.label(),
        "multiplicities": nv.values(),
        "report": report,
        "degree_sum_bound": all_twos,
        "improvement": all_twos - report.e_bound.unwrap_or(all_twos),
    });
    emit(&Report {
        schema: "vanish/1",
        command: format!("optimize {}", case.label()),
        config,
        result,
        notes: vec![
            "optimum over vectors with lc verdict and class multiplicity r along Y".into(),
            "degree-sum comparison uses r quadrics: 2r - n".into(),
        ],
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_curve_bound(
    config: RunConfig,
    genus: i64,
    degree: i64,
    csv: Option<PathBuf>,
) -> Result<ExitCode> {
    let threshold = large_degree_threshold(genus);
    let region = exception_region(genus, degree).map_err(|e| anyhow!("{e}"))?;
    let mut classes = serde_json::Map::new();
    let variants = [
        ("a", CurveClassVariant::A),
        ("b", CurveClassVariant::B),
        ("c", CurveClassVariant::C),
    ];
    for (name, v) in variants {
        if let Ok(class) = curve_lc_class(genus, degree, v) {
            classes.insert(name.into(), json!(class.to_string()));
        }
    }
    let low_genus = if genus <= 1 {
        low_genus_curve_bound(genus, degree).ok()
    } else {
        None
    };
    let result = json!({
        "genus": genus,
        "degree": degree,
        "ambient_dim": degree + genus - 2,
        "guaranteed_degree_threshold": threshold,
        "threshold_met": degree >= threshold,
        "low_genus_bound": low_genus,
        "classes": classes,
        "exception_region": {
            "pairs": region.pairs,
            "per_offset": region.per_offset,
            "empty": region.is_empty(),
        },
    });
    if let Some(path) = csv {
        write_side_file(&config, &path, &region.to_csv())?;
    }
    emit(&Report {
        schema: "vanish/1",
        command: format!("curve-bound --genus {genus} --degree {degree}"),
        config,
        result,
        notes: vec![
            "threshold: least d with d > (2g+8)/3 and d >= 5".into(),
            "region: (k, p) pairs where the nef-and-big scan is insufficient".into(),
        ],
    })?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_skewform(config: RunConfig, action: SkewAction) -> Result<ExitCode> {
    let spec = config.spec();
    let (input, mode, r_arg) = match &action {
        SkewAction::Normalize { input } => (input.clone(), "normalize", None),
        SkewAction::Roundtrip { input } => (input.clone(), "roundtrip", None),
        SkewAction::Omega { input, r } => (input.clone(), "omega", Some(*r)),
    };
    let text =
        std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let mut exit = ExitCode::SUCCESS;
    let result;
    with_field!(spec, K, {
        let fam = SkewFamily::<K>::from_json(&value).map_err(|e| anyhow!("{e}"))?;
        let data = extract_normal_data(&fam).map_err(|e| anyhow!("{e}"))?;
        result = match mode {
            "normalize" => {
                let l = fam.half_rank();
                let mut wedges = Vec::new();
                for r in 1..=l {
                    let w = wedge_power_limit(&fam, r).map_err(|e| anyhow!("{e}"))?;
                    wedges.push(json!({
                        "r": r,
                        "valuation": w.valuation,
                        "limit": vanish_core::skew::ext_to_json(&w.limit),
                    }));
                }
                json!({ "data": data.to_json(), "wedge_limits": wedges })
            }
            "roundtrip" => {
                let smooth = smoothing(&data, config.seed, None).map_err(|e| anyhow!("{e}"))?;
                let back = extract_normal_data(&smooth).map_err(|e| anyhow!("{e}"))?;
                let identity = back == data;
                if !identity {
                    exit = ExitCode::from(1);
                }
                json!({ "identity": identity, "data": data.to_json() })
            }
            "omega" => {
                let r = r_arg.unwrap_or_else(|| data.half_rank());
                let om = omega(&data, r, Some(config.seed)).map_err(|e| anyhow!("{e}"))?;
                json!({ "r": r, "omega": vanish_core::skew::ext_to_json(&om) })
            }
            _ => unreachable!(),
        };
    });
    emit(&Report {
        schema: "vanish/1",
        command: format!("skewform {mode} --input {}", input.display()),
        config,
        result,
        notes: vec![
            "data: nested kernels with residue forms modulo scalar".into(),
            "wedge limits divide out the maximal power of t".into(),
        ],
    })?;
    Ok(exit)
}
