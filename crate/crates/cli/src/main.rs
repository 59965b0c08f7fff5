use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fitbound_core::decomp::{decompose_group_ring, factor_rank};
use fitbound_core::harness::{analyze_with_retries, campaign, composed_check_group, oracle_check};
use fitbound_core::modpres::DEFAULT_MINOR_CAP;
use fitbound_core::{AbelianGroup, CampaignConfig, Precision, Presentation, ValueSet};
use serde_json::json;

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fitbound",
    version,
    about = "Check #M <= #R/Fit_R(M) over R = A[C_p]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random campaign over presentations with t <= T generators and s <= S relations.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "auto" or a fixed exponent N.
        #[arg(long, default_value = "auto")]
        precision: Precision,
        /// Kill exponent e: every generator is killed by p^e.
        #[arg(long, default_value_t = 2)]
        e: u32,
        #[arg(long)]
        threads: Option<usize>,
        /// JSON summary path; the per-case CSV goes next to it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every presentation with exactly t generators and s <= S relations over a value set.
    Exhaust {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// JSON file: {"grid": [..]} or {"elements": [[..], ..]}; defaults to {0, 1, p, T, 1+T, p+T}.
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        precision: Precision,
        #[arg(long, default_value_t = 2)]
        e: u32,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full report for one presentation.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Splits Z_p[G] into factors A_f and A_f[C_p].
    Decompose {
        /// Cyclic orders, e.g. 6,5.
        #[arg(long)]
        group: String,
        #[arg(long)]
        p: u64,
        /// Also put random modules on the factors and check the product.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compares #M and Fit against brute-force enumeration.
    Oracle {
        #[arg(long)]
        input: PathBuf,
    },
}

fn read_presentation(path: &PathBuf) -> anyhow::Result<Presentation> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Presentation::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run_campaign(cfg: CampaignConfig) -> anyhow::Result<u8> {
    let summary = campaign(&cfg)?;
    print_json(&summary)?;
    Ok(summary.exit_code() as u8)
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Verify {
            p,
            d,
            t,
            s,
            samples,
            seed,
            precision,
            e,
            threads,
            out,
        } => {
            let mut cfg = CampaignConfig::random(p, d, t, s, samples, seed);
            cfg.precision = precision;
            cfg.e = e;
            cfg.threads = threads;
            cfg.out = out;
            run_campaign(cfg)
        }
        Command::Exhaust {
            p,
            d,
            t,
            s,
            values,
            precision,
            e,
            threads,
            out,
        } => {
            let values = match values {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<ValueSet>(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => ValueSet::standard(p),
            };
            let mut cfg = CampaignConfig::exhaustive(p, d, t, s, values, e);
            cfg.precision = precision;
            cfg.threads = threads;
            cfg.out = out;
            run_campaign(cfg)
        }
        Command::Analyze { input } => {
            let pres = read_presentation(&input)?;
            let analysis = analyze_with_retries(&pres, DEFAULT_MINOR_CAP, 1)?;
            print_json(&analysis)?;
            let failures = analysis.report.flags.failures();
            if !failures.is_empty() {
                eprintln!("failed checks: {}", failures.join(", "));
                return Ok(EXIT_VIOLATION);
            }
            Ok(0)
        }
        Command::Decompose { group, p, seed } => {
            let g = AbelianGroup::parse(&group)?;
            let factors = decompose_group_ring(&g, p)?;
            let rank = factor_rank(&factors, p);
            let composed = seed
                .map(|seed| composed_check_group(&g, p, seed))
                .transpose()?;
            print_json(&json!({
                "group": g,
                "p": p,
                "factors": factors,
                "rank": rank,
                "rank_matches_order": rank == g.order(),
                "composed": composed,
            }))?;
            let ok = rank == g.order() && composed.as_ref().is_none_or(|c| c.holds());
            Ok(if ok { 0 } else { EXIT_VIOLATION })
        }
        Command::Oracle { input } => {
            let pres = read_presentation(&input)?;
            let outcome = oracle_check(&pres, DEFAULT_MINOR_CAP)?;
            print_json(&outcome)?;
            Ok(if outcome.agrees() { 0 } else { EXIT_VIOLATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let precision = err
                .downcast_ref::<fitbound_core::Error>()
                .is_some_and(|e| e.is_precision());
            ExitCode::from(if precision {
                EXIT_INDETERMINATE
            } else {
                EXIT_CONFIG
            })
        }
    }
}
