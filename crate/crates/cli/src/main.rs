mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cnbase::chars::{CharTables, CharTables32, CharTables64, Verification};
use cnbase::classify::{
    count_cn, pair_report, regularity, scan_reports, sufficient_criterion_with, CriterionOptions,
    CriterionReport, ScanFilter, DEFAULT_RHO_BUDGET,
};
use cnbase::ff::{build_field_with, FieldCtx, MODULUS_POLICY};
use cnbase::modstruct::{CensusReport, ModuleFrame, DEFAULT_ENUMERATION_BUDGET};
use cnbase::nt::{divisors, prime_power, RhoBudget};
use cnbase::poly::{cyclotomic_poly, factor, Poly};
use cnbase::search::{
    certify_poly, construct_explicit, find_pcn_in, recheck, PcnCertificate, Strategy,
    EXPLICIT_MODULUS,
};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "cnbase", version, about = "Primitive completely normal elements of finite fields")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest number of elements any enumeration may visit.
    #[arg(long, global = true, env = "CNBASE_BUDGET", default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    /// Pollard rho iterations per cofactor; 0 means unlimited.
    #[arg(long, global = true)]
    factor_budget: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Field modulus over F_p, inline or as a path to a file holding it.
    #[arg(long, global = true)]
    modulus: Option<String>,
    /// Allow whole-field enumerations beyond the budget.
    #[arg(long, global = true)]
    expensive: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Regularity, exceptional divisors and the invariants of a pair.
    Classify { q: u64, n: u64 },
    /// The sufficient existence criterion for one pair.
    Criterion {
        q: u64,
        n: u64,
        /// Evaluate outside q = 3 mod 4, n even.
        #[arg(long)]
        relaxed: bool,
    },
    /// The criterion over a range of regular pairs.
    Scan {
        #[arg(long, default_value_t = 2)]
        q_min: u64,
        #[arg(long)]
        q_max: u64,
        #[arg(long, default_value_t = 1)]
        n_min: u64,
        #[arg(long)]
        n_max: u64,
        /// Congruence on q as MODULUS:RESIDUE.
        #[arg(long, value_parser = parse_congruence)]
        q_mod: Option<(u64, u64)>,
        /// Congruence on n as MODULUS:RESIDUE.
        #[arg(long, value_parser = parse_congruence)]
        n_mod: Option<(u64, u64)>,
        #[arg(long)]
        relaxed: bool,
        /// Only report pairs where the criterion fails.
        #[arg(long)]
        failures: bool,
    },
    /// The number of completely normal elements, by formula.
    Count { q: u64, n: u64 },
    /// Exhaustive counts checked against the formula.
    Census {
        q: u64,
        n: u64,
        /// Per-module census instead of the whole field.
        #[arg(long)]
        modules: bool,
        /// Order-pair lattice census of an exceptional module C_k.
        #[arg(long)]
        lattice: Option<u64>,
    },
    /// Whether the roots of a polynomial over F_p are primitive and completely normal.
    Verify {
        #[arg(long, conflicts_with = "certificate")]
        poly: Option<String>,
        #[arg(long)]
        p: Option<u64>,
        /// Base field size; defaults to p.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Find a primitive completely normal element and certify it.
    Search {
        q: u64,
        n: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        /// The explicit constructions for (3, 8) and (3, 16).
        #[arg(long)]
        construction: bool,
    },
    /// Re-verify a stored certificate ("-" reads stdin).
    Recheck { path: PathBuf },
    /// Numerical checks of the character-sum identities.
    CharsVerify {
        q: u64,
        n: u64,
        #[arg(long, value_enum, default_value_t = Precision::F64)]
        precision: Precision,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Exhaustive,
    Random,
    Sieved,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Precision {
    F64,
    F32,
}

fn parse_congruence(s: &str) -> std::result::Result<(u64, u64), String> {
    let (m, r) = s.split_once(':').ok_or("expected MODULUS:RESIDUE")?;
    let m: u64 = m.trim().parse().map_err(|e| format!("{e}"))?;
    let r: u64 = r.trim().parse().map_err(|e| format!("{e}"))?;
    if m == 0 {
        return Err("modulus must be positive".into());
    }
    Ok((m, r))
}

struct Run {
    cli: Cli,
}

impl Run {
    fn rho(&self) -> RhoBudget {
        match self.cli.factor_budget {
            None => DEFAULT_RHO_BUDGET,
            Some(0) => RhoBudget::Unlimited,
            Some(i) => RhoBudget::Iterations(i),
        }
    }

    fn modulus_text(&self) -> Result<Option<String>> {
        let Some(m) = &self.cli.modulus else {
            return Ok(None);
        };
        let path = std::path::Path::new(m);
        if path.is_file() {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {m}"))?;
            return Ok(Some(text.trim().to_string()));
        }
        Ok(Some(m.clone()))
    }

    /// The frame for `F_{q^n}`, honoring `--modulus`.
    fn frame(&self, q: u64, n: u64) -> Result<ModuleFrame> {
        match self.modulus_text()? {
            None => Ok(ModuleFrame::new(q, n)?),
            Some(text) => {
                let (p, a) = prime_power(q)?;
                let g = Poly::parse(&FieldCtx::prime(p)?, &text)?;
                if g.degree() != Some((a as u64 * n) as usize) {
                    bail!("modulus must have degree {} over F_{p}", a as u64 * n);
                }
                Ok(ModuleFrame::with_field(q, build_field_with(&g)?)?)
            }
        }
    }

    fn policy(&self) -> &'static str {
        if self.cli.modulus.is_some() {
            EXPLICIT_MODULUS
        } else {
            MODULUS_POLICY
        }
    }

    fn execute(&self) -> Result<Value> {
        match &self.cli.command {
            Command::Classify { q, n } => self.classify(*q, *n),
            Command::Criterion { q, n, relaxed } => {
                let opts = CriterionOptions {
                    relaxed: *relaxed,
                    budget: self.rho(),
                };
                Ok(serde_json::to_value(sufficient_criterion_with(*q, *n, opts)?)?)
            }
            Command::Scan {
                q_min,
                q_max,
                n_min,
                n_max,
                q_mod,
                n_mod,
                relaxed,
                failures,
            } => {
                let opts = CriterionOptions {
                    relaxed: *relaxed,
                    budget: self.rho(),
                };
                let filter = ScanFilter {
                    q_mod: *q_mod,
                    n_mod: *n_mod,
                };
                let mut rows = scan_reports(*q_min..=*q_max, *n_min..=*n_max, filter, opts)?;
                if *failures {
                    rows.retain(|r| !r.holds);
                }
                Ok(Value::Array(rows.iter().map(scan_row).collect()))
            }
            Command::Count { q, n } => Ok(json!({
                "pair": [q, n],
                "cn_count": count_cn(*q, *n)?.to_string(),
            })),
            Command::Census {
                q,
                n,
                modules,
                lattice,
            } => self.census(*q, *n, *modules, *lattice),
            Command::Verify {
                poly,
                p,
                q,
                certificate,
            } => match (poly, certificate) {
                (Some(text), None) => {
                    let p = p.ok_or_else(|| anyhow!("--poly needs --p"))?;
                    let g = Poly::parse(&FieldCtx::prime(p)?, text)?;
                    let q = q.unwrap_or(p);
                    let cert = certify_poly(&g, q)?;
                    Ok(json!({ "poly": g.to_string(), "q": q, "pcn": cert.is_some(), "certificate": cert }))
                }
                (None, Some(path)) => self.recheck(path),
                _ => bail!("give either --poly or --certificate"),
            },
            Command::Search {
                q,
                n,
                strategy,
                construction,
            } => {
                if *construction {
                    return Ok(serde_json::to_value(construct_explicit(*q, *n)?)?);
                }
                let strategy = match strategy {
                    StrategyArg::Exhaustive => Strategy::Exhaustive,
                    StrategyArg::Random => Strategy::Random { seed: self.cli.seed },
                    StrategyArg::Sieved => Strategy::Sieved,
                };
                let frame = self.frame(*q, *n)?;
                Ok(serde_json::to_value(find_pcn_in(&frame, strategy, self.cli.budget)?)?)
            }
            Command::Recheck { path } => self.recheck(path),
            Command::CharsVerify { q, n, precision } => match precision {
                Precision::F64 => self.chars::<f64>(CharTables64::with_frame(self.frame(*q, *n)?)?),
                Precision::F32 => self.chars::<f32>(CharTables32::with_frame(self.frame(*q, *n)?)?),
            },
        }
    }

    fn classify(&self, q: u64, n: u64) -> Result<Value> {
        let report = pair_report(q, n, self.rho())?;
        let mut v = serde_json::to_value(&report)?;
        if !report.regular {
            v["reason"] = json!(regularity(q, n)?.reason());
        }
        Ok(v)
    }

    fn census(&self, q: u64, n: u64, modules: bool, lattice: Option<u64>) -> Result<Value> {
        if let Some(k) = lattice {
            let frame = ModuleFrame::new(q, n)?;
            let mut out = vec![];
            for f in frame.exceptional_factors(k)? {
                for c in [
                    frame.element_lattice_census(k, &f, self.cli.budget)?,
                    frame.character_lattice_census(k, &f, self.cli.budget)?,
                ] {
                    let mut v = serde_json::to_value(CensusReport::lattice(&c))?;
                    v["side"] = serde_json::to_value(&c.side)?;
                    v["f"] = json!(f.to_string());
                    out.push(v);
                }
            }
            return Ok(Value::Array(out));
        }
        let whole_fits = u32::try_from(n)
            .ok()
            .and_then(|n| q.checked_pow(n))
            .is_some_and(|s| s <= self.cli.budget);
        let report = if modules || !(whole_fits || self.cli.expensive) {
            CensusReport::modules(q, n, self.cli.budget)?
        } else {
            let budget = if self.cli.expensive { u64::MAX } else { self.cli.budget };
            CensusReport::field(q, n, budget)?
        };
        Ok(serde_json::to_value(report)?)
    }

    fn recheck(&self, path: &PathBuf) -> Result<Value> {
        let text = if path.as_os_str() == "-" {
            std::io::read_to_string(std::io::stdin())?
        } else {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        };
        let value: Value = serde_json::from_str(&text).context("certificate is not JSON")?;
        // accept a bare certificate or a full command report wrapping one
        let inner = value
            .get("result")
            .map(|r| r.get("certificate").unwrap_or(r))
            .unwrap_or(&value)
            .clone();
        let cert: PcnCertificate = serde_json::from_value(inner).context("not a certificate")?;
        let verdict = recheck(&cert);
        Ok(json!({
            "pair": cert.pair,
            "element": cert.element,
            "valid": verdict.is_ok(),
            "failure": verdict.err().map(|e| e.to_string()),
        }))
    }

    fn chars<F>(&self, t: CharTables<F>) -> Result<Value>
    where
        F: num_traits::Float + num_traits::FloatConst + Send + Sync,
    {
        let frame = t.frame();
        let mut checks: Vec<Value> = vec![];
        let mut push = |scope: Value, v: Verification| {
            let mut x = serde_json::to_value(v).expect("plain data");
            x["scope"] = scope;
            checks.push(x);
        };
        for &d in frame.divisors() {
            if frame.n_prime() % d != 0 {
                continue;
            }
            let sub = frame.level(d)?.sub().clone();
            let whole = Poly::x_pow_minus_one(&sub, (frame.n_prime() / d) as usize);
            for h in factor(&whole)?.distinct() {
                push(json!({"d": d, "g": h.to_string()}), t.orthogonality_check(d, h)?);
            }
            for k in divisors(frame.n_prime() / d) {
                let g = cyclotomic_poly(k, &sub)?;
                push(json!({"d": d, "g": g.to_string()}), t.verify_a_gd(d, &g)?);
            }
        }
        for k in divisors(frame.n_prime()) {
            if frame.is_exceptional(k) {
                for f in frame.exceptional_factors(k)? {
                    let (v, _) = t.verify_exceptional_product(k, &f)?;
                    push(json!({"k": k, "f": f.to_string()}), v);
                }
            } else {
                push(json!({"k": k}), t.verify_b_k(k)?);
            }
        }
        let (p, alt) = t.verify_p()?;
        push(Value::Null, p);
        push(Value::Null, alt);
        push(Value::Null, t.verify_gauss_sums());
        let passed = checks.iter().all(|c| c["passed"] == json!(true));
        Ok(json!({
            "pair": [frame.q(), frame.n()],
            "passed": passed,
            "checks": checks,
        }))
    }
}

/// One scan row, flat so the CSV schema stays fixed.
fn scan_row(r: &CriterionReport) -> Value {
    json!({
        "q": r.pair.0,
        "n": r.pair.1,
        "omega": r.detail.omega_used,
        "omega_source": r.detail.omega_source,
        "Omega": r.detail.big_omega,
        "Omega_eps": r.detail.big_omega_eps,
        "Omega_c": r.detail.big_omega_c,
        "lhs": r.lhs.to_string(),
        "rhs_squared": r.rhs_squared.to_string(),
        "holds": r.holds,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("{}", json!({ "error": e.to_string() }));
            return ExitCode::from(2);
        }
    }
    let run = Run { cli };
    let command = output::command_name(&run.cli.command);
    match run.execute() {
        Ok(result) => {
            let meta = output::Meta {
                command,
                version: env!("CARGO_PKG_VERSION"),
                seed: run.cli.seed,
                modulus_policy: run.policy(),
            };
            match output::render(run.cli.format, &meta, result) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{}", json!({ "error": format!("{e:#}") }));
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("{}", json!({ "command": command, "error": format!("{e:#}") }));
            ExitCode::from(1)
        }
    }
}
