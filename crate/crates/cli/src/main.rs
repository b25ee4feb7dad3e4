//! Command line front end of the `cyclex` library.
//!
//! Exit codes: 0 on success, 1 on a domain error (the error's name is printed
//! on stderr), 2 on a usage error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cyclex::blocks::block_decomposition;
use cyclex::catalog::{build_catalog_block, build_gadget, classify_block, CatalogSpec, Classification, GadgetSpec};
use cyclex::census::verify_characterization;
use cyclex::constructions::{
    double_count_ratio, reconstruct, transform, RatioParams, TransformParams, TransformVariant,
};
use cyclex::counting::{class_count_table, entropy_check};
use cyclex::error::Error;
use cyclex::experiments::{degree_scan, rows_to_csv, rows_to_json, scaling_ratios, Normalizer};
use cyclex::graph::{GraphRecord, LabelledGraph};
use cyclex::io::{parse_graphs, to_graph6};
use cyclex::minors::{has_long_cycle, in_class, GraphClass};
use cyclex::sampling::{rng_for, sampler_for, McmcRunner};

/// Environment variable giving the default worker count.
const THREADS_ENV: &str = "CYCLEX_THREADS";

#[derive(Parser)]
#[command(name = "cyclex", version, about = "Random graphs without long cycles: census, counting, sampling, transforms")]
struct Cli {
    /// Worker threads (default: $CYCLEX_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Graph6,
    Json,
    Csv,
}

#[derive(Args)]
struct GraphInput {
    /// File with one graph6 or sparse6 string per line; `-` reads stdin.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "graph")]
    input: Option<String>,
    /// A graph given inline.
    #[arg(long)]
    graph: Option<String>,
}

impl GraphInput {
    fn read(&self) -> Result<Vec<LabelledGraph>, Error> {
        let text = match (&self.graph, self.input.as_deref()) {
            (Some(g), _) => g.clone(),
            (None, Some("-") | None) => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
                s
            }
            (None, Some(path)) => std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?,
        };
        let graphs = parse_graphs(&text)?;
        if graphs.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(graphs)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleMethod {
    Exact,
    Mcmc,
}

#[derive(Subcommand)]
enum Command {
    /// Membership of each input graph in a class.
    Check {
        #[arg(long)]
        class: GraphClass,
        #[command(flatten)]
        input: GraphInput,
    },
    /// Block decomposition, optionally matching the blocks against the catalog for `--k`.
    Blocks {
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        input: GraphInput,
    },
    /// Build a catalog block or a gadget from its JSON spec.
    Build {
        /// e.g. '{"K2m":{"m":3,"plus":true}}'
        #[arg(long, conflicts_with = "gadget", required_unless_present = "gadget")]
        spec: Option<String>,
        /// e.g. '{"Fnm":{"r":3,"m":2}}'
        #[arg(long)]
        gadget: Option<String>,
        #[arg(long, value_enum, default_value = "graph6")]
        format: Format,
    },
    /// Check the block characterization of Ex(C_k) on all 2-connected graphs of order n.
    CensusVerify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Permit n = 8 (minutes of work).
        #[arg(long)]
        allow_n8: bool,
        /// Print the whole report instead of a summary.
        #[arg(long)]
        full: bool,
    },
    /// Number of labelled members on n vertices.
    Count {
        #[arg(long)]
        class: GraphClass,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        /// Print the whole count table as JSON.
        #[arg(long)]
        table: bool,
    },
    /// Random members of a class, one graph6 line each.
    Sample {
        #[arg(long)]
        class: GraphClass,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exact")]
        method: SampleMethod,
        /// Steps per chain for `--method mcmc`.
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
        #[arg(long, value_enum, default_value = "graph6")]
        format: Format,
    },
    /// Apply a lower- or upper-bound transform; prints the record as JSON.
    Transform {
        #[arg(long)]
        variant: TransformVariant,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        input: GraphInput,
        /// Gadget size s (h for the fan).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        /// Group size of F_{r,s/r}.
        #[arg(long)]
        r: Option<usize>,
        /// Also undo the transform and report whether the input comes back.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Log of the double-counting ratio C(n)/R(n).
    Ratio {
        #[arg(long)]
        variant: TransformVariant,
        /// Comma-separated sizes, e.g. 1e4,1e5,1e6.
        #[arg(long, alias = "n", value_delimiter = ',', value_parser = parse_real_count, required = true)]
        ns: Vec<f64>,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Maximum degree and pendant statistics over random samples.
    Scan {
        #[arg(long)]
        class: GraphClass,
        #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
        ns: Vec<usize>,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Print delta_mean / m(n) for a normalizer such as log/log2 instead.
        #[arg(long)]
        normalizer: Option<Normalizer>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check that a partition's entropy sum is at least its equal-parts bound.
    Entropy {
        /// Comma-separated positive parts.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<i64>,
    },
}

/// Counts such as `1000`, `1e5` or `2.5e3`.
fn parse_count(s: &str) -> Result<usize, String> {
    let x = parse_real_count(s)?;
    if x.fract() != 0.0 || x > 1e15 {
        return Err(format!("'{s}' is not a whole number in range"));
    }
    Ok(x as usize)
}

fn parse_real_count(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(format!("'{s}' is not a non-negative number"));
    }
    Ok(x)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

fn graph_out(g: &LabelledGraph, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(&GraphRecord::from(g)).expect("graphs serialize"),
        _ => to_graph6(g),
    }
}

fn run(command: Command) -> Result<String, Error> {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    match command {
        Command::Check { class, input } => {
            for g in input.read()? {
                line(in_class(&g, class).to_string());
            }
        }
        Command::Blocks { k, input } => {
            for g in input.read()? {
                let bt = block_decomposition(&g);
                let blocks: Vec<serde_json::Value> = bt
                    .blocks
                    .iter()
                    .map(|b| {
                        let mut v = serde_json::json!({ "vertices": b.vertices, "edges": b.edges });
                        if let Some(k) = k {
                            let bg = b.graph();
                            let class = if bg.n() < 3 {
                                serde_json::json!("bridge")
                            } else if has_long_cycle(&bg, k) {
                                serde_json::json!("not-in-class")
                            } else {
                                match classify_block(&bg, k)? {
                                    Classification::Match(spec) => serde_json::to_value(spec).expect("specs serialize"),
                                    Classification::Exceptional => serde_json::json!("exceptional"),
                                }
                            };
                            v["catalog"] = class;
                        }
                        Ok(v)
                    })
                    .collect::<Result<_, Error>>()?;
                line(serde_json::json!({ "blocks": blocks, "cut_vertices": bt.cut_vertices }).to_string());
            }
        }
        Command::Build { spec, gadget, format } => {
            let parse_err = |e: serde_json::Error| Error::Parse(e.to_string());
            let g = match (spec, gadget) {
                (Some(s), _) => build_catalog_block(&serde_json::from_str::<CatalogSpec>(&s).map_err(parse_err)?)?,
                (None, Some(s)) => build_gadget(&serde_json::from_str::<GadgetSpec>(&s).map_err(parse_err)?)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            line(graph_out(&g, format));
        }
        Command::CensusVerify { k, n, allow_n8, full } => {
            let report = verify_characterization(k, n, allow_n8)?;
            if full {
                line(json(&report));
            } else {
                let exceptions: Vec<&str> = report.exceptions.iter().map(|e| e.graph6.as_str()).collect();
                line(json(&serde_json::json!({
                    "k": k,
                    "n": n,
                    "matched": report.matched.len(),
                    "families": report.totals,
                    "exceptions": exceptions,
                })));
            }
        }
        Command::Count { class, n, table } => {
            let t = class_count_table(class, n.max(2))?;
            if table {
                line(t.to_json());
            } else {
                line(t.members(n)?.to_string());
            }
        }
        Command::Sample {
            class,
            n,
            count,
            seed,
            method,
            steps,
            format,
        } => {
            let graphs: Vec<LabelledGraph> = match method {
                SampleMethod::Exact => {
                    let sampler = sampler_for(class, n)?;
                    (0..count)
                        .into_par_iter()
                        .map(|i| sampler.sample(n, &mut rng_for(seed, i as u64)))
                        .collect::<Result<_, Error>>()?
                }
                SampleMethod::Mcmc => (0..count)
                    .into_par_iter()
                    .map(|i| McmcRunner::new(class, n).run(steps, &mut rng_for(seed, i as u64)))
                    .collect(),
            };
            for g in &graphs {
                line(graph_out(g, format));
            }
        }
        Command::Transform {
            variant,
            seed,
            input,
            size,
            eps,
            c,
            alpha,
            r,
            verify,
            format,
        } => {
            let params = TransformParams { size, eps, c, alpha, r };
            for g in input.read()? {
                let rec = transform(&g, variant, &params, seed)?;
                match format {
                    Format::Json => {
                        let mut v = serde_json::to_value(&rec).expect("records serialize");
                        if verify {
                            v["reconstructs"] = serde_json::json!(reconstruct(&rec)? == g);
                        }
                        line(json(&v));
                    }
                    _ => line(to_graph6(&rec.result)),
                }
            }
        }
        Command::Ratio {
            variant,
            ns,
            eps,
            c,
            alpha,
            format,
        } => {
            let p = RatioParams { eps, c, alpha };
            let reports = ns
                .iter()
                .map(|&n| double_count_ratio(n, variant, &p))
                .collect::<Result<Vec<_>, Error>>()?;
            match format {
                Format::Json => line(json(&reports)),
                _ => {
                    line("n,size,log_c,log_r,log_ratio".into());
                    for r in &reports {
                        line(format!("{},{},{},{},{}", r.n, r.size, r.log_c, r.log_r, r.log_ratio));
                    }
                }
            }
        }
        Command::Scan {
            class,
            ns,
            samples,
            seed,
            normalizer,
            format,
        } => {
            let rows = degree_scan(class, &ns, samples, seed)?;
            match (normalizer, format) {
                (Some(m), _) => {
                    line(format!("n,ratio_{m}"));
                    for (n, x) in scaling_ratios(&rows, m)? {
                        line(format!("{n},{x}"));
                    }
                }
                (None, Format::Json) => line(rows_to_json(&rows)),
                (None, _) => out.push_str(&rows_to_csv(&rows)),
            }
        }
        Command::Entropy { values } => {
            let report = entropy_check(&values)?;
            line(json(&report));
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|t| t.parse().ok()));
    if let Some(t) = threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("the global pool is configured once");
    }
    let out = cli.out;
    match run(cli.command) {
        Ok(text) => match out {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("Io: {path}: {e}");
                    ExitCode::from(1)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
