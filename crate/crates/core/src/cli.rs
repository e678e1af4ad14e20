//! Command-line front end. [`run`] takes the argument tokens (without the
//! program name) and returns the exit code with everything that would go to
//! stdout and stderr.
//!
//! Exit codes: 0 success, prime or valid; 2 composite or invalid; 3 probably
//! composite; 1 usage or internal error.

use std::fs;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bench::{
    bench_failure_sweep, bench_timing, sweep_csv, timing_csv, SweepConfig, TimedAlgorithm, TimingConfig,
};
use crate::bounds::ProbabilityBound;
use crate::factor::{partial_factor, PartialFactorization, Strategy, DEFAULT_TRIAL_WALL};
use crate::lucas::{
    generate_dh_params, lucas_test, verify_certificate, CertificateCheck, Evidence, LucasConfig,
    PrimalityCertificate, Verdict,
};
use crate::numeric::parse_natural;
use crate::order::order_spectrum;
use crate::primroot::{algorithm3_with, heuristic2_with_budget, Algorithm1, RootCandidate};
use crate::{Error, Natural, Result, TracedRng};

/// Environment variable holding the default rho budget.
pub const RHO_BUDGET_ENV: &str = "PRIMROOT_RHO_BUDGET";
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 20;
pub const DEFAULT_EPSILON: f64 = 9.094947017729282e-13; // 2^-40
/// Bound used by `factor` when none is given.
pub const DEFAULT_FACTOR_BOUND: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Trial,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Human,
    Structured,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum AlgorithmArg {
    #[default]
    Algorithm1,
    Heuristic2,
    Algorithm3,
}

/// Settings shared by every command, after defaults are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub epsilon: f64,
    pub bound_override: Option<Natural>,
    pub rho_budget: u64,
    pub strategy: Strategy,
    pub output: OutputFormat,
}

#[derive(Debug, Parser)]
#[command(name = "primroot", version, about = "Primitive roots with certified success bounds")]
struct Cli {
    /// RNG seed; drawn from system entropy when absent and always echoed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Target error probability.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Factoring bound B, overriding the computed one.
    #[arg(long, global = true)]
    bound: Option<String>,
    /// Rho iteration budget (default from PRIMROOT_RHO_BUDGET, else 2^20).
    #[arg(long, global = true)]
    rho_budget: Option<u64>,
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    output: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a primitive root modulo the prime p.
    Primroot {
        p: String,
        #[arg(long, value_enum, default_value = "algorithm1")]
        algorithm: AlgorithmArg,
    },
    /// Partially factor n below the bound.
    Factor { n: String },
    /// Probabilistic Lucas primality test.
    Lucas {
        n: String,
        /// Write the certificate here when n is proven prime.
        #[arg(long)]
        cert_out: Option<String>,
        /// Skip the BLS square test.
        #[arg(long)]
        lenient: bool,
    },
    /// Check a certificate file.
    VerifyCert {
        path: String,
        /// Also run the BLS square test.
        #[arg(long)]
        strict: bool,
    },
    /// Number of invertibles of each order modulo n.
    Spectrum { n: String },
    /// Diffie-Hellman parameters: a probable prime and a root.
    Genparam { bits: u32 },
    /// Benchmarks.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Debug, Subcommand)]
enum BenchKind {
    /// Exact failure against the bound for constructed cofactors.
    Sweep {
        #[arg(long, default_value_t = 40)]
        floor_bits: u32,
        #[arg(long, default_value_t = 6)]
        max_omega: u32,
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Median and 90th percentile run time.
    Timing {
        #[arg(long, value_delimiter = ',', default_value = "64,256")]
        bits: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "heuristic2,lucas_test")]
        algorithms: Vec<String>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
    },
}

/// Result of one command before formatting.
struct Report {
    code: i32,
    /// Flat record; keys are sorted on output.
    record: Map<String, Value>,
    human: String,
    /// Pre-rendered CSV for bench commands.
    csv: Option<String>,
}

pub fn run<S: AsRef<str>>(argv: &[S]) -> (i32, String, String) {
    let tokens = std::iter::once("primroot").chain(argv.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(tokens) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => (0, text, String::new()),
                _ => (1, String::new(), text),
            };
        }
    };
    let config = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => return (1, String::new(), format!("error: {e}\n")),
    };
    match execute(&cli.command, &config) {
        Ok(report) => (report.code, render(&report, &config), String::new()),
        Err(e) => (1, String::new(), format!("error: {e}\n")),
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let epsilon = cli.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let rho_budget = match cli.rho_budget {
        Some(b) => b,
        None => match std::env::var(RHO_BUDGET_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{RHO_BUDGET_ENV}={v:?} is not an integer")))?,
            Err(_) => DEFAULT_RHO_BUDGET,
        },
    };
    if rho_budget == 0 {
        return Err(Error::InvalidInput("rho budget must be positive".into()));
    }
    let strategy = match cli.strategy.unwrap_or(StrategyArg::Rho) {
        StrategyArg::Trial => Strategy::TrialProven,
        StrategyArg::Rho => Strategy::RhoHeuristic { budget: rho_budget },
    };
    Ok(RunConfig {
        seed: cli.seed.unwrap_or_else(rand::random),
        epsilon,
        bound_override: cli.bound.as_deref().map(parse_natural).transpose()?,
        rho_budget,
        strategy,
        output: cli.output,
    })
}

fn render(report: &Report, config: &RunConfig) -> String {
    match config.output {
        OutputFormat::Human => report.human.clone(),
        OutputFormat::Structured => {
            // serde_json's default map keeps keys sorted.
            let mut line = Value::Object(report.record.clone()).to_string();
            line.push('\n');
            line
        }
        OutputFormat::Csv => match &report.csv {
            Some(csv) => csv.clone(),
            None => {
                let keys: Vec<&String> = report.record.keys().collect();
                let values: Vec<String> = report.record.values().map(csv_cell).collect();
                format!(
                    "{}\n{}\n",
                    keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","),
                    values.join(",")
                )
            }
        },
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn base_record(command: &str, config: &RunConfig, rng: &TracedRng) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(config.seed));
    m.insert("seed_trace_draws".into(), json!(rng.trace().draws));
    m
}

fn bound_fields(m: &mut Map<String, Value>, prefix: &str, b: Option<&ProbabilityBound>) {
    match b {
        Some(b) => {
            m.insert(format!("{prefix}_success"), json!(b.success()));
            m.insert(format!("{prefix}_failure"), json!(b.failure()));
            m.insert(format!("{prefix}_failure_log2"), json!(finite_or_null(b.failure_log2())));
        }
        None => {
            for suffix in ["success", "failure", "failure_log2"] {
                m.insert(format!("{prefix}_{suffix}"), Value::Null);
            }
        }
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn factorization_fields(m: &mut Map<String, Value>, pf: &PartialFactorization) {
    m.insert("factorization".into(), json!(pf.to_string()));
    m.insert(
        "factors".into(),
        json!(pf.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" * ")),
    );
    m.insert("cofactor".into(), json!(pf.cofactor.to_string()));
    m.insert("bound".into(), json!(pf.bound.to_string()));
    m.insert("guarantee".into(), json!(pf.guarantee.to_string()));
    m.insert(
        "effective_bound".into(),
        pf.effective_bound.as_ref().map_or(Value::Null, |e| json!(e.to_string())),
    );
    m.insert("probabilistic_primes".into(), json!(pf.probabilistic_primes));
}

fn describe_bound(b: &ProbabilityBound) -> String {
    if b.is_certain() {
        "1".into()
    } else {
        format!("{:.17} (failure 2^{:.3})", b.success(), b.failure_log2())
    }
}

fn execute(command: &Command, config: &RunConfig) -> Result<Report> {
    let mut rng = TracedRng::seed_from_u64(config.seed);
    match command {
        Command::Primroot { p, algorithm } => {
            let p = parse_natural(p)?;
            let c = match algorithm {
                AlgorithmArg::Algorithm1 => {
                    let alg = match &config.bound_override {
                        Some(b) => Algorithm1::with_bound(&p, b.clone())?,
                        None => Algorithm1::prepare(&p, config.epsilon)?,
                    };
                    alg.run(config.strategy, &mut rng)?
                }
                AlgorithmArg::Heuristic2 => heuristic2_with_budget(&p, Some(config.rho_budget), &mut rng)?,
                AlgorithmArg::Algorithm3 => algorithm3_with(&p, DEFAULT_TRIAL_WALL, config.rho_budget, &mut rng)?,
            };
            Ok(root_report("primroot", algorithm_name(*algorithm), &c, config, &rng))
        }
        Command::Factor { n } => {
            let n = parse_natural(n)?;
            let bound = config
                .bound_override
                .clone()
                .unwrap_or_else(|| Natural::from(DEFAULT_FACTOR_BOUND));
            let pf = partial_factor(&n, &bound, config.strategy, &mut rng)?;
            let mut m = base_record("factor", config, &rng);
            m.insert("n".into(), json!(n.to_string()));
            factorization_fields(&mut m, &pf);
            let human = format!("{pf}\nseed: {}\n", config.seed);
            Ok(Report { code: 0, record: m, human, csv: None })
        }
        Command::Lucas { n, cert_out, lenient } => {
            let n = parse_natural(n)?;
            let lc = LucasConfig {
                strict: !lenient,
                rho_budget: config.rho_budget,
                ..LucasConfig::default()
            };
            let out = lucas_test(&n, config.epsilon, &mut rng, &lc)?;
            let mut m = base_record("lucas", config, &rng);
            m.insert("n".into(), json!(n.to_string()));
            m.insert("bases_drawn".into(), json!(out.bases_drawn));
            m.insert("heuristic_bound".into(), json!(out.heuristic_bound));
            m.insert("epsilon".into(), json!(config.epsilon));
            let (code, verdict, detail) = match &out.verdict {
                Verdict::Prime(cert) => {
                    if let Some(path) = cert_out {
                        fs::write(path, cert.to_string())
                            .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?;
                    }
                    m.insert("certificate".into(), json!(cert.to_string()));
                    m.insert("mode".into(), json!(cert.mode.to_string()));
                    (0, "prime", format!("certificate mode {}", cert.mode))
                }
                Verdict::Composite(ev) => {
                    let (kind, value) = match ev {
                        Evidence::Factor(f) => ("factor", f),
                        Evidence::FermatWitness(a) => ("fermat_witness", a),
                        Evidence::StrongWitness(a) => ("strong_witness", a),
                    };
                    m.insert("evidence_kind".into(), json!(kind));
                    m.insert("evidence".into(), json!(value.to_string()));
                    (2, "composite", ev.to_string())
                }
                Verdict::ProbablyPrime(b) => (0, "probably_prime", format!("error < {:e}", b.failure())),
                Verdict::ProbablyComposite(p) => (3, "probably_composite", format!("error < {p}")),
            };
            m.insert("error_bound".into(), out.error_bound().map_or(Value::Null, |e| json!(e)));
            m.insert("verdict".into(), json!(verdict));
            let human = format!("{n}: {verdict} ({detail})\nseed: {}\n", config.seed);
            Ok(Report { code, record: m, human, csv: None })
        }
        Command::VerifyCert { path, strict } => {
            let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))?;
            let cert: PrimalityCertificate = text.parse()?;
            let mut m = base_record("verify-cert", config, &rng);
            m.insert("n".into(), json!(cert.n.to_string()));
            let (code, human) = match verify_certificate(&cert, *strict) {
                CertificateCheck::Valid(mode) => {
                    m.insert("valid".into(), json!(true));
                    m.insert("mode".into(), json!(mode.to_string()));
                    m.insert("reason".into(), Value::Null);
                    (0, format!("valid ({mode})\n"))
                }
                CertificateCheck::Invalid(reason) => {
                    m.insert("valid".into(), json!(false));
                    m.insert("mode".into(), Value::Null);
                    m.insert("reason".into(), json!(reason.to_string()));
                    (2, format!("invalid: {reason}\n"))
                }
            };
            Ok(Report { code, record: m, human, csv: None })
        }
        Command::Spectrum { n } => {
            let n = parse_natural(n)?;
            let f = crate::factor::factorize(&n)?;
            let s = order_spectrum(&f)?;
            let mut m = base_record("spectrum", config, &rng);
            m.insert("n".into(), json!(n.to_string()));
            m.insert(
                "spectrum".into(),
                Value::Array(
                    s.entries
                        .iter()
                        .map(|(d, c)| json!({"order": d.to_string(), "count": c.to_string()}))
                        .collect(),
                ),
            );
            let mut csv = String::from("order,count\n");
            let mut human = String::new();
            for (d, c) in &s.entries {
                csv.push_str(&format!("{d},{c}\n"));
                human.push_str(&format!("{d} {c}\n"));
            }
            Ok(Report { code: 0, record: m, human, csv: Some(csv) })
        }
        Command::Genparam { bits } => {
            let dh = generate_dh_params(*bits, config.epsilon, Some(config.rho_budget), &mut rng)?;
            let mut report = root_report("genparam", "heuristic2", &dh.root, config, &rng);
            report.record.insert("miller_rabin_rounds".into(), json!(dh.rounds));
            report.record.insert("prime_error".into(), json!(dh.prime_error));
            report.record.insert("candidates".into(), json!(dh.candidates));
            report.human.push_str(&format!(
                "prime accepted after {} Miller-Rabin rounds (error < {:e}), {} candidates\n",
                dh.rounds, dh.prime_error, dh.candidates
            ));
            Ok(report)
        }
        Command::Bench { kind } => match kind {
            BenchKind::Sweep { floor_bits, max_omega, samples } => {
                let cfg = SweepConfig {
                    floor_bits: *floor_bits,
                    omegas: (1..=*max_omega).collect(),
                    samples: *samples,
                    seed: config.seed,
                };
                let csv = sweep_csv(&bench_failure_sweep(&cfg)?);
                let mut m = base_record("bench-sweep", config, &rng);
                m.insert("csv".into(), json!(csv));
                Ok(Report { code: 0, record: m, human: csv.clone(), csv: Some(csv) })
            }
            BenchKind::Timing { bits, algorithms, reps } => {
                let cfg = TimingConfig {
                    bits: bits.clone(),
                    algorithms: algorithms.iter().map(|a| TimedAlgorithm::parse(a)).collect::<Result<_>>()?,
                    reps: *reps,
                    seed: config.seed,
                    epsilon: config.epsilon,
                };
                let csv = timing_csv(&bench_timing(&cfg)?);
                let mut m = base_record("bench-timing", config, &rng);
                m.insert("csv".into(), json!(csv));
                Ok(Report { code: 0, record: m, human: csv.clone(), csv: Some(csv) })
            }
        },
    }
}

fn algorithm_name(a: AlgorithmArg) -> &'static str {
    match a {
        AlgorithmArg::Algorithm1 => "algorithm1",
        AlgorithmArg::Heuristic2 => "heuristic2",
        AlgorithmArg::Algorithm3 => "algorithm3",
    }
}

fn root_report(command: &str, algorithm: &str, c: &RootCandidate, config: &RunConfig, rng: &TracedRng) -> Report {
    let mut m = base_record(command, config, rng);
    m.insert("algorithm".into(), json!(algorithm));
    m.insert("p".into(), json!(c.p.to_string()));
    m.insert("g".into(), json!(c.g.value().to_string()));
    m.insert("complete".into(), json!(c.complete));
    m.insert("order_lower_bound".into(), json!(c.order_lower_bound.to_string()));
    m.insert("bound_used".into(), json!(c.bound_used.to_string()));
    m.insert("q_remaining".into(), json!(c.q_remaining.to_string()));
    m.insert("epsilon".into(), json!(config.epsilon));
    bound_fields(&mut m, "certified", Some(&c.success_bound));
    bound_fields(&mut m, "advisory", c.advisory_bound.as_ref());
    factorization_fields(&mut m, &c.factorization);
    m.insert("seed_trace_draws".into(), json!(c.seed_trace.draws));

    let mut human = format!(
        "p = {}\ng = {}\nprobability g is a primitive root >= {}\n",
        c.p,
        c.g.value(),
        describe_bound(&c.success_bound)
    );
    if let Some(a) = &c.advisory_bound {
        human.push_str(&format!("advisory (rho reach) >= {}\n", describe_bound(a)));
    }
    human.push_str(&format!(
        "order(g) >= {}\np - 1: {}\nseed: {} (draws {})\n",
        c.order_lower_bound, c.factorization, config.seed, c.seed_trace.draws
    ));
    Report { code: 0, record: m, human, csv: None }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primroot_of_seven() {
        let (code, out, err) = run(&["primroot", "7", "--epsilon", "1e-12", "--seed", "42"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("g = 3") || out.contains("g = 5"), "{out}");
        assert!(out.contains(">= 1\n"));
        assert!(out.contains("seed: 42"));
    }

    #[test]
    fn lucas_exit_codes() {
        let (code, _, _) = run(&["lucas", "1729", "--epsilon", "1e-6", "--seed", "1"]);
        assert!(code == 2 || code == 3);
        let (code, out, _) = run(&["lucas", "13", "--seed", "1", "--output", "structured"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\":\"prime\""));
    }

    #[test]
    fn factor_command() {
        let (code, out, _) = run(&["factor", "37690903212", "--bound", "1450", "--strategy", "trial"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("37690903212 = 2^2 * 3 * 19 * 59 * Q [Q=2801881, bound=1450, guarantee=proven]"));
    }

    #[test]
    fn errors_exit_one() {
        assert_eq!(run(&["primroot", "12x"]).0, 1);
        assert_eq!(run(&["primroot", "7", "--epsilon", "2"]).0, 1);
        assert_eq!(run(&["nonsense"]).0, 1);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn structured_replay() {
        let args = ["primroot", "0xffffffffffffffc5", "--seed", "9", "--output", "structured"];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(a.1.trim()).unwrap();
        assert_eq!(v["seed"], json!(9));
        assert!(v.get("certified_success").is_some() && v.get("advisory_success").is_some());
    }
}
