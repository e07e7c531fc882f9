use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qetale_core::acceptance::{run_all, SuiteRun};
use qetale_core::candidate::CandidateFile;
use qetale_core::catalog::{bundled_catalog, parse_catalog, CatalogEntry};
use qetale_core::enumerate::{baskets, signatures};
use qetale_core::pi1::{h1_label, pi1, Pi1Config, DEFAULT_MAX_COSETS};
use qetale_core::pipeline::{run_pipeline, PipelineConfig};
use qetale_core::report::{emit, format_names};
use qetale_core::verify::compare;

/// Mixed quasi-etale surfaces with p_g = q = 0: enumeration, search and
/// fundamental groups.
#[derive(Parser)]
#[command(name = "qetale", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: `json` or `csv` for records, `text` or `json` otherwise.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    /// Group catalog; the bundled one when omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
    max_cosets: usize,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Coset enumeration strategy.
    #[arg(long, default_value = qetale_fpgroup::DEFAULT_STRATEGY)]
    strategy: String,
    /// Search every signature even when the abelianization rules it out.
    #[arg(long)]
    no_prune: bool,
    /// Compute H1 only.
    #[arg(long)]
    h1_only: bool,
}

impl SearchArgs {
    fn config(&self) -> PipelineConfig {
        PipelineConfig {
            max_cosets: self.max_cosets,
            strategy: self.strategy.clone(),
            jobs: self.jobs,
            ab_prune: !self.no_prune,
            h1_only: self.h1_only,
        }
    }

    fn catalog(&self) -> Result<Vec<CatalogEntry>> {
        load_catalog(self.catalog.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Possible singularity baskets (s A1 points, t A3 points).
    Baskets {
        #[arg(long)]
        k2: u32,
    },
    /// Admissible signatures for every basket.
    Signatures {
        #[arg(long)]
        k2: u32,
    },
    /// Classify over a catalog, one record per orbit.
    Search {
        #[arg(long)]
        k2: u32,
        #[command(flatten)]
        args: SearchArgs,
        /// Also write one candidate file per record into this directory.
        #[arg(long)]
        candidates: Option<PathBuf>,
    },
    /// Fundamental group of a single candidate file.
    Pi1 {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        #[arg(long, default_value = qetale_fpgroup::DEFAULT_STRATEGY)]
        strategy: String,
    },
    /// Run every K^2 and check the results against the known surfaces.
    VerifyTable {
        #[command(flatten)]
        args: SearchArgs,
    },
}

fn load_catalog(path: Option<&Path>) -> Result<Vec<CatalogEntry>> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_catalog(&text).with_context(|| format!("parsing {}", p.display()))
        }
        None => Ok(bundled_catalog()),
    }
}

fn write_out(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn record_format(out: &Output) -> Result<&str> {
    let f = out.format.as_deref().unwrap_or("json");
    if !format_names().contains(&f) {
        bail!("unknown record format `{f}` (known: {})", format_names().join(", "));
    }
    Ok(f)
}

fn plain_json(out: &Output) -> Result<bool> {
    match out.format.as_deref() {
        None | Some("text") => Ok(false),
        Some("json") => Ok(true),
        Some(f) => bail!("unknown format `{f}` (known: text, json)"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, &cli.output) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command, out: &Output) -> Result<ExitCode> {
    match command {
        Command::Baskets { k2 } => {
            let bs = baskets(k2)?;
            let text = if plain_json(out)? {
                serde_json::to_string_pretty(&bs)? + "\n"
            } else {
                bs.iter()
                    .map(|b| format!("s={} t={}  {}\n", b.s, b.t, b.describe()))
                    .collect()
            };
            write_out(out, &text)?;
        }
        Command::Signatures { k2 } => {
            let mut rows = Vec::new();
            for b in baskets(k2)? {
                for s in signatures(k2, b)? {
                    rows.push((b, s));
                }
            }
            let text = if plain_json(out)? {
                let v: Vec<_> = rows.iter().map(|(b, s)| json!({"basket": b, "signature": s})).collect();
                serde_json::to_string_pretty(&v)? + "\n"
            } else {
                rows.iter()
                    .map(|(b, s)| {
                        format!(
                            "{:<8} {:<10} |G0|={:<4} g={:<3} Theta={}\n",
                            b.describe(),
                            s.describe(),
                            s.data.order_g0,
                            s.data.genus,
                            s.data.theta
                        )
                    })
                    .collect()
            };
            write_out(out, &text)?;
        }
        Command::Search { k2, args, candidates } => {
            let format = record_format(out)?;
            let catalog = args.catalog()?;
            let report = run_pipeline(k2, &catalog, &args.config())?;
            for f in &report.failures {
                eprintln!("warning: {f}");
            }
            if let Some(dir) = candidates {
                fs::create_dir_all(&dir)?;
                for (i, r) in report.records.iter().enumerate() {
                    let entry = catalog
                        .iter()
                        .find(|e| e.name == r.g_label)
                        .expect("records name catalog groups");
                    let path = dir.join(format!("k2-{k2}-{:02}.candidate", i + 1));
                    fs::write(&path, CandidateFile::from_record(r, entry).render())?;
                }
            }
            write_out(out, &emit(&report.records, format)?)?;
        }
        Command::Pi1 {
            candidate,
            max_cosets,
            strategy,
        } => {
            let text = fs::read_to_string(&candidate).with_context(|| format!("reading {}", candidate.display()))?;
            let file = CandidateFile::parse(&text)?;
            let (mx, sys) = file.resolve()?;
            let config = Pi1Config {
                max_cosets,
                strategy,
                h1_only: false,
            };
            let p = pi1(&mx, &sys, &config)?;
            let status = p.status.as_ref().map_or("H1 only".to_string(), |s| s.to_string());
            let text = if plain_json(out)? {
                let v = json!({
                    "group": file.entry.name,
                    "g0_index": file.g0_index,
                    "signature": sys.signature,
                    "h1": p.h1.torsion,
                    "h1_free_rank": p.h1.free_rank,
                    "h1_label": h1_label(&p.h1),
                    "pi1": status,
                    "pi1_status": p.status,
                    "presentation": p.presentation.to_string(),
                });
                serde_json::to_string_pretty(&v)? + "\n"
            } else {
                format!(
                    "G: {} (G0 #{}), signature {:?}\nH1: {}\npi1: {}\npresentation: {}\n",
                    file.entry.name,
                    file.g0_index,
                    sys.signature,
                    h1_label(&p.h1),
                    status,
                    p.presentation
                )
            };
            write_out(out, &text)?;
        }
        Command::VerifyTable { args } => {
            let format = record_format(out)?;
            let run = SuiteRun::new(args.catalog()?, args.config())?;
            let records: Vec<_> = run.reports.iter().flat_map(|r| r.records.iter().cloned()).collect();
            let cmp = compare(&records, &[1, 2, 3, 4, 5, 6, 7, 8]);
            for row in &cmp.rows {
                let got = row.record.map_or("no matching record".to_string(), |i| {
                    let r = &records[i];
                    format!(
                        "{} {} {} H1={} pi1={}",
                        r.g_label, r.sing, r.sig_type, r.h1_label, r.pi1
                    )
                });
                let ok = row.record.is_some() && row.pi1_ok;
                eprintln!("{} {}: {got}", if ok { "ok  " } else { "FAIL" }, row.tag);
            }
            for &i in &cmp.extra {
                eprintln!("FAIL unexpected record: {} {}", records[i].g_label, records[i].sig_type);
            }
            let results = run_all(&run);
            for r in &results {
                eprintln!("{r}");
            }
            write_out(out, &emit(&records, format)?)?;
            if !results.iter().all(|r| r.passed) {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
