//! Command-line front end: generate point sets, inspect their distance
//! statistics, run census/family/energy checks, sweep experiment configs,
//! and perform the symbolic exponent balance.
//!
//! Exit code is nonzero iff an exact check fails; UNDECIDED interval
//! verdicts are warnings on stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::{BigInt, One, Zero};

use fewdist::census::{census_euclid, census_rect, cs_bound_report, sum_of_squares_identity};
use fewdist::construct::{grid, line_plus_bulk, random_set, unbalanced_lattice};
use fewdist::energy::{
    dyadic_decomposition_check, holder_chain_check, li_inequality_check, ScalarSet,
};
use fewdist::exact::{parse_scalar, scalar_to_string, CanonicalLine, Metric, Point, PointSet};
use fewdist::experiment::{
    balance_exponents, run_experiment, theorem_euclid_exponent, theorem_rect_exponent,
    ExperimentConfig, PowerTerm,
};
use fewdist::hyperbola::{build_family, coincidence_structure, incidences, FamilyMetric};
use fewdist::interval::Verdict;
use fewdist::stats::{bipartite_distinct, distinct_distances, max_line_richness, DistinctOptions};

#[derive(Parser)]
#[command(name = "fewdist", version, about = "Exact distinct-distance experiments")]
struct Cli {
    /// Seed for any randomized generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Starting interval precision in bits.
    #[arg(long, global = true, default_value_t = 64)]
    precision_bits: u32,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Point set as JSON ([["x_num/x_den","y_num/y_den"], ...]).
    #[arg(long)]
    input: PathBuf,
    /// Metric name: euclidean-squared, rectangular, minkowski-squared.
    #[arg(long, default_value = "euclidean-squared")]
    metric: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and print it as JSON.
    Gen {
        /// grid | unbalanced | random | line-plus-bulk
        #[arg(long)]
        kind: String,
        /// Target size (total points).
        #[arg(long)]
        n: u64,
        /// Grid width (grid only; height derived from n).
        #[arg(long)]
        a: Option<u64>,
        /// Lattice imbalance, e.g. "1/6" (unbalanced only).
        #[arg(long)]
        eps: Option<String>,
        /// Points forced onto the x-axis (line-plus-bulk only).
        #[arg(long)]
        m: Option<u64>,
        /// Coordinate bound for random placement.
        #[arg(long, default_value_t = 50)]
        coord_bound: u64,
    },
    /// Distance statistics of a point set.
    Stats {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Quadruple census over the richest line, with exact identity checks.
    Census {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Hyperbola family summary and coincidence structure.
    Family {
        #[command(flatten)]
        input: InputArgs,
        /// Slope for the rectangular family (required for metric=rectangular
        /// unless derivable from the richest slanted line).
        #[arg(long)]
        kappa: Option<String>,
    },
    /// Energy inequalities on a one-dimensional set.
    Energy {
        /// Comma-separated rationals, e.g. "0,1,3/2,7".
        #[arg(long)]
        set: String,
        /// Precision cap in bits for interval certification.
        #[arg(long, default_value_t = 1024)]
        precision_cap: u32,
    },
    /// Run a full experiment sweep from a JSON or TOML config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Exact symbolic exponent balancing.
    Balance {
        /// Terms as "m_exp:n_exp" rationals, e.g. "1/9:23/9". Empty means
        /// the built-in three-term pipeline.
        #[arg(long = "term")]
        terms: Vec<String>,
        /// Left-hand side as "m_exp:n_exp"; defaults to 2:1.
        #[arg(long, default_value = "2:1")]
        lhs: String,
    },
}

fn load_points(path: &PathBuf) -> fewdist::Result<PointSet> {
    PointSet::from_json(&fs::read_to_string(path)?)
}

fn parse_term(text: &str) -> fewdist::Result<PowerTerm> {
    let (m, n) = text.split_once(':').ok_or_else(|| {
        fewdist::Error::InvalidConfig(format!("term {text:?} is not m_exp:n_exp"))
    })?;
    Ok(PowerTerm::new("cli", parse_scalar(m)?, parse_scalar(n)?))
}

fn x_axis() -> CanonicalLine {
    CanonicalLine::normalize(BigInt::zero(), BigInt::one(), BigInt::zero())
}

/// Richest usable line for the metric: horizontal for Euclid/Minkowski,
/// slanted for rectangular. Returns the translated set, the on-line subset,
/// and the slope (rectangular only).
fn census_frame(
    p: &PointSet,
    metric: Metric,
) -> fewdist::Result<(PointSet, PointSet, Option<fewdist::exact::ExactScalar>)> {
    match metric {
        Metric::Rectangular => {
            let (line, _) = max_line_richness(p, true)?;
            let anchor = p
                .iter()
                .find(|pt| line.contains(pt))
                .ok_or(fewdist::Error::EmptySet)?
                .clone();
            let shifted = p.translate(&-&anchor.x, &-&anchor.y);
            let kappa = line.slope().ok_or(fewdist::Error::ZeroKappa)?;
            let through_origin = CanonicalLine::through(
                &Point::from_ints(0, 0),
                &Point::new(num::BigRational::one(), kappa.clone()),
            )?;
            let a = shifted.on_line(&through_origin);
            Ok((shifted, a, Some(kappa)))
        }
        _ => {
            let mut best: Option<(fewdist::exact::ExactScalar, usize)> = None;
            for pt in p {
                let count = p.iter().filter(|q| q.y == pt.y).count();
                if best.as_ref().map_or(true, |(_, c)| count > *c) {
                    best = Some((pt.y.clone(), count));
                }
            }
            let (y, _) = best.ok_or(fewdist::Error::EmptySet)?;
            let shifted = p.translate(&num::BigRational::zero(), &-&y);
            let a = shifted.on_line(&x_axis());
            Ok((shifted, a, None))
        }
    }
}

fn run(cli: Cli) -> fewdist::Result<bool> {
    // Returns whether any exact check failed.
    match cli.command {
        Command::Gen {
            kind,
            n,
            a,
            eps,
            m,
            coord_bound,
        } => {
            let set = match kind.as_str() {
                "grid" => {
                    let a = a.unwrap_or_else(|| (n as f64).sqrt().floor().max(1.0) as u64);
                    grid(a, (n + a - 1) / a.max(1))?
                }
                "unbalanced" => {
                    let eps = parse_scalar(eps.as_deref().unwrap_or("1/6"))?;
                    unbalanced_lattice(n, &eps)?.0
                }
                "random" => random_set(n, coord_bound, cli.seed)?,
                "line-plus-bulk" => {
                    let m = m.unwrap_or(n / 2);
                    line_plus_bulk(&x_axis(), m, n, cli.seed, coord_bound)?
                }
                other => {
                    return Err(fewdist::Error::InvalidConfig(format!(
                        "unknown generator {other:?}"
                    )))
                }
            };
            println!("{}", set.to_json());
            Ok(false)
        }
        Command::Stats { input } => {
            let p = load_points(&input.input)?;
            let metric: Metric = input.metric.parse()?;
            let profile = distinct_distances(&p, metric, DistinctOptions::default())?;
            println!("{}", serde_json::to_string_pretty(&profile.to_json())?);
            Ok(false)
        }
        Command::Census { input } => {
            let p = load_points(&input.input)?;
            let metric: Metric = input.metric.parse()?;
            let (shifted, a, kappa) = census_frame(&p, metric)?;
            let census = match &kappa {
                Some(k) => census_rect(&a, &shifted, k)?,
                None => census_euclid(&a, &shifted)?,
            };
            let family_metric = match &kappa {
                Some(k) => FamilyMetric::Rect { kappa: k.clone() },
                None => FamilyMetric::Euclid,
            };
            let family = build_family(&shifted, family_metric)?;
            let inc = incidences(&a, &family)?;
            let bip_metric = if kappa.is_some() {
                Metric::Rectangular
            } else {
                Metric::EuclideanSquared
            };
            let (bip, _) = bipartite_distinct(&a, &shifted, bip_metric)?;
            let cs = cs_bound_report(&census, &bip)?;
            let identity_ok = inc == census.q2 && sum_of_squares_identity(&census);
            let mut out = census.to_json();
            out["incidences"] = serde_json::json!(inc.to_string());
            out["incidence_identity"] = serde_json::json!(identity_ok);
            out["cs_report"] = cs.to_json();
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(!(identity_ok && cs.all_required_hold()))
        }
        Command::Family { input, kappa } => {
            let p = load_points(&input.input)?;
            let metric: Metric = input.metric.parse()?;
            let family_metric = match metric {
                Metric::Rectangular => {
                    let k = match kappa {
                        Some(k) => parse_scalar(&k)?,
                        None => census_frame(&p, metric)?.2.ok_or(fewdist::Error::ZeroKappa)?,
                    };
                    FamilyMetric::Rect { kappa: k }
                }
                _ => FamilyMetric::Euclid,
            };
            let family = build_family(&p, family_metric)?;
            let coincidence = coincidence_structure(&family);
            let structure_ok = coincidence.p_lines_ok
                && coincidence.q_lines_ok
                && coincidence.partner_bound_ok();
            let mut out = family.to_json();
            out["coincidence"] = serde_json::json!({
                "k_max": coincidence.k_max,
                "classes_with_multiplicity": coincidence.classes_with_multiplicity,
                "structure_ok": structure_ok,
                "max_partners_per_p": coincidence.max_partners_per_p,
                "max_partners_per_q": coincidence.max_partners_per_q,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(!structure_ok)
        }
        Command::Energy { set, precision_cap } => {
            let u: ScalarSet = set
                .split(',')
                .map(|s| parse_scalar(s.trim()))
                .collect::<fewdist::Result<_>>()?;
            let holder = holder_chain_check(&u, cli.precision_bits, precision_cap)?;
            let li = li_inequality_check(&u, &u, cli.precision_bits, precision_cap)?;
            let dyadic = dyadic_decomposition_check(&u, None, None)?;
            for (name, verdict) in [
                ("holder_chain_interval", holder.interval_verdict),
                ("li_inequality", li.verdict),
            ] {
                if verdict == Verdict::Undecided {
                    eprintln!("warning: {name} UNDECIDED at {precision_cap} bits");
                }
            }
            let out = serde_json::json!({
                "set": u.iter().map(scalar_to_string).collect::<Vec<_>>(),
                "holder_integer_lhs": holder.integer_lhs.to_string(),
                "holder_integer_rhs": holder.integer_rhs.to_string(),
                "holder_integer_holds": holder.integer_holds,
                "holder_interval_verdict": format!("{:?}", holder.interval_verdict),
                "li_verdict": format!("{:?}", li.verdict),
                "li_precision_bits": li.precision_bits,
                "dyadic_e3_identity": dyadic.e3_identity_holds,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            let failed = !holder.integer_holds
                || holder.interval_verdict == Verdict::Violated
                || li.verdict == Verdict::Violated
                || !dyadic.e3_identity_holds;
            Ok(failed)
        }
        Command::Sweep { config } => {
            let text = fs::read_to_string(&config)?;
            let cfg = if config.extension().map_or(false, |e| e == "toml") {
                ExperimentConfig::from_toml(&text)?
            } else {
                ExperimentConfig::from_json(&text)?
            };
            let report = run_experiment(&cfg, &cli.out_dir)?;
            if report.undecided > 0 {
                eprintln!(
                    "warning: {} interval check(s) UNDECIDED at the precision cap",
                    report.undecided
                );
            }
            println!(
                "wrote {} and {} ({} rows, digest {})",
                report.csv_path.display(),
                report.json_path.display(),
                report.rows.len(),
                report.config_digest
            );
            Ok(report.violations > 0)
        }
        Command::Balance { terms, lhs } => {
            let outcome = if terms.is_empty() {
                let euclid = theorem_euclid_exponent()?;
                let rect = theorem_rect_exponent()?;
                assert_eq!(euclid.max_exponent, rect.max_exponent);
                euclid
            } else {
                let lhs = parse_term(&lhs)?;
                let terms = terms
                    .iter()
                    .map(|t| parse_term(t))
                    .collect::<fewdist::Result<Vec<_>>>()?;
                balance_exponents(&lhs, &terms)?
            };
            let out = serde_json::json!({
                "per_term": outcome
                    .per_term
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>(),
                "max_exponent": outcome.max_exponent.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("error: at least one exact check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
