//! Command-line harness: generate instance files, run algorithms and
//! mechanisms on them, audit truthfulness, and sweep instance families
//! against the known approximation bounds. Exit status is nonzero whenever
//! a requested assertion fails.

use anyhow::{anyhow, bail, Context, Result};
use budgetcut::algorithms::ls_greedy;
use budgetcut::generators::{generate, Family, GenParams};
use budgetcut::greedy::{greedy_enum_sm, greedy_sm, resort_order};
use budgetcut::instance::{normalize_costs, Instance};
use budgetcut::io::{instance_digest, parse_instance, serialize_instance};
use budgetcut::local_search::approx_local_search_with_cap;
use budgetcut::lp::{pipage_round, solve_lp, CutLpModel, PipageStep};
use budgetcut::mechanisms::{FracParams, Mechanism, XosConfig};
use budgetcut::num::{fmt_rat, parse_rat, rat, to_decimal, Rat};
use budgetcut::oracle::{
    audit_mechanism, brute_opt, measure_ratio, ratio, AuditOptions, Auditable, Budget,
    CanaryPayBid, CSV_HEADER,
};
use budgetcut::set::MAX_AGENTS;
use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "budgetcut", version, about = "Budget-feasible mechanisms at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Render an extra decimal column with this many digits.
    #[arg(long)]
    decimals: Option<u32>,
    /// Write the report here instead of stdout only.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write instance files for a seeded family.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_weight: i64,
        /// Budget as a fraction of the total cost, e.g. 1/2.
        #[arg(long, default_value = "1/2")]
        budget_fraction: String,
        /// Output directory.
        #[arg(long, default_value = "instances")]
        out: PathBuf,
    },
    /// Run one algorithm or mechanism on an instance file.
    Run {
        /// ls-greedy | greedy-sm | greedy-enum-sm | a mechanism id.
        target: String,
        #[arg(long)]
        input: PathBuf,
        /// exact (enumerate randomness) or sampled (one seeded draw).
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Accuracy parameter where the target takes one (e.g. 1/10).
        #[arg(long)]
        eps: Option<String>,
        /// Relaxation gap for the frac mechanisms (default 4, the cut bound).
        #[arg(long)]
        rho: Option<String>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Audit one mechanism on one instance (truthfulness / IR / budget).
    Audit {
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Generate a family, audit a mechanism across it, and compare worst
    /// ratios against the known bound.
    Sweep {
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run the full audit grid per instance (slower); otherwise ratios only.
        #[arg(long)]
        audit: bool,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Solve or round the cut LP relaxation of an instance.
    Lp {
        #[command(subcommand)]
        action: LpAction,
    },
    /// Run approximate local search and report the local optimum.
    Localsearch {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "0")]
        eps: String,
        /// Move cap for exact runs.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
        #[command(flatten)]
        common: CommonFlags,
    },
}

#[derive(Subcommand)]
enum LpAction {
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Print the model in equation form before solving.
        #[arg(long)]
        dump: bool,
    },
    Round {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    parse_instance(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn parse_family(name: &str) -> Result<Family> {
    Family::parse(name).ok_or_else(|| {
        anyhow!(
            "unknown family {name:?}; known: {}",
            Family::ALL.map(|f| f.name()).join(", ")
        )
    })
}

fn parse_rat_flag(value: &Option<String>, default: Rat) -> Result<Rat> {
    match value {
        None => Ok(default),
        Some(s) => parse_rat(s).map_err(|e| anyhow!(e)),
    }
}

/// Known worst-case bounds for the sweep summary, as exact rationals
/// (irrational constants are replaced by slightly larger rationals).
fn known_bound(name: &str) -> Option<Rat> {
    Some(match name {
        "rand-mech-sm" => rat(5),
        "mech-sm" => Rat::new(5_449_489_743i64.into(), 1_000_000_000i64.into()),
        "rand-mech-symsm" | "rand-mech-ucut" => rat(10),
        "det-mech-symsm" => Rat::new(10_898_979_486i64.into(), 1_000_000_000i64.into()),
        "det-mech-ucut" | "det-mech-wcut" => Rat::new(109.into(), 4.into()),
        "det-mech-symsm-frac" => Rat::new(1468.into(), 25.into()),
        "main-xos" => rat(244),
        "additive-mechanism" => rat(3),
        _ => return None,
    })
}

fn mechanism_by_name(name: &str, rho: &Rat, eps: &Rat) -> Result<Mechanism> {
    Ok(match name {
        "rand-mech-sm" => Mechanism::RandMechSm,
        "mech-sm" => Mechanism::MechSm,
        "rand-mech-symsm" => Mechanism::RandMechSymSm,
        "det-mech-symsm" => Mechanism::DetMechSymSm,
        "rand-mech-ucut" => Mechanism::RandMechUCut,
        "det-mech-ucut" => Mechanism::DetMechUCut,
        "mech-sm-frac" => Mechanism::MechSmFrac(FracParams::plain(rho.clone())?),
        "mech-sm-frac-var" => Mechanism::MechSmFracVar(FracParams::generic(rho.clone(), eps.clone())?),
        "det-mech-symsm-frac" => {
            Mechanism::DetMechSymSmFrac(FracParams::generic(rho.clone(), eps.clone())?)
        }
        "det-mech-wcut" => Mechanism::DetMechWCut(FracParams::weighted_cut_tuned(eps.clone())?),
        "additive-mechanism" => Mechanism::AdditiveMech,
        "main-xos" => Mechanism::MainXos(XosConfig::default()),
        other => bail!("unknown mechanism {other:?}"),
    })
}

fn write_report(common: &CommonFlags, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(path) = &common.out {
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn maybe_decimal(r: &Rat, decimals: Option<u32>) -> String {
    match decimals {
        None => fmt_rat(r),
        Some(d) => format!("{} ({})", fmt_rat(r), to_decimal(r, d)),
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Generate { family, n, count, seed, max_weight, budget_fraction, out } => {
            let family = parse_family(&family)?;
            if n == 0 || n > MAX_AGENTS {
                bail!("n must be in 1..={MAX_AGENTS}");
            }
            let fraction = parse_rat(&budget_fraction).map_err(|e| anyhow!(e))?;
            fs::create_dir_all(&out)?;
            for index in 0..count {
                let params = GenParams { n, max_weight, budget_fraction: fraction.clone(), ..Default::default() };
                let inst = generate(family, &params, seed, index)?;
                let name = format!("{}-n{}-s{}-{:03}.inst", family.name(), n, seed, index);
                fs::write(out.join(&name), serialize_instance(&inst))?;
                println!("wrote {}", out.join(&name).display());
            }
            Ok(())
        }

        Command::Run { target, input, mode, seed, eps, rho, common } => {
            let inst = load_instance(&input)?;
            run_target(&target, &inst, &mode, seed, &eps, &rho, &common)
        }

        Command::Audit { mechanism, input, common } => {
            let inst = load_instance(&input)?;
            let report = if mechanism == "canary-pay-bid" {
                audit_mechanism(&CanaryPayBid, &inst, &AuditOptions::default())?
            } else {
                let mech = mechanism_by_name(&mechanism, &rat(4), &Rat::new(1.into(), 200.into()))?;
                audit_mechanism(&mech, &inst, &AuditOptions::default())?
            };
            let mut text = format!("{CSV_HEADER}\n{}\n", report.csv_row());
            for check in &report.checks {
                text.push_str(&format!(
                    "# {}: {}{}\n",
                    check.property,
                    if check.passed { "pass" } else { "FAIL" },
                    check.witness.as_deref().map(|w| format!(" ({w})")).unwrap_or_default()
                ));
            }
            write_report(&common, &text)?;
            if !report.all_passed() {
                bail!("audit failed: {:?}", report.failures());
            }
            Ok(())
        }

        Command::Sweep { mechanism, family, count, n_max, seed, audit, common } => {
            let family = parse_family(&family)?;
            let instances: Vec<Instance> =
                budgetcut::generators::generate_batch(family, n_max, count, seed)?
                    .into_iter()
                    .map(|inst| normalize_costs(&inst))
                    .collect();
            let canary = mechanism == "canary-pay-bid";
            let boxed: Box<dyn Auditable> = if canary {
                Box::new(CanaryPayBid)
            } else {
                Box::new(mechanism_by_name(&mechanism, &rat(4), &Rat::new(1.into(), 200.into()))?)
            };

            let mut text = String::new();
            let mut failed = false;
            let mut worst: Option<Rat> = None;
            if audit || canary {
                use rayon::prelude::*;
                let opts = AuditOptions::default();
                let reports: Vec<_> = instances
                    .par_iter()
                    .map(|inst| audit_mechanism(boxed.as_ref(), inst, &opts))
                    .collect::<Result<Vec<_>, _>>()?;
                text.push_str(CSV_HEADER);
                maybe_push_decimal_header(&mut text, &common);
                for r in &reports {
                    text.push_str(&r.csv_row());
                    if let Some(d) = common.decimals {
                        if let Some(rt) = &r.measured_ratio {
                            text.push_str(&format!(",{}", to_decimal(rt, d)));
                        } else {
                            text.push_str(",inf");
                        }
                    }
                    text.push('\n');
                    failed |= !r.all_passed();
                    if let Some(rt) = &r.measured_ratio {
                        if worst.as_ref().map_or(true, |w| rt > w) {
                            worst = Some(rt.clone());
                        }
                    }
                }
            } else {
                let (rows, w) = measure_ratio(boxed.as_ref(), &instances)?;
                worst = w;
                text.push_str(CSV_HEADER);
                maybe_push_decimal_header(&mut text, &common);
                for row in &rows {
                    text.push_str(&row.csv_row());
                    if let Some(d) = common.decimals {
                        if let Some(rt) = &row.ratio {
                            text.push_str(&format!(",{}", to_decimal(rt, d)));
                        } else {
                            text.push_str(",inf");
                        }
                    }
                    text.push('\n');
                }
            }

            let bound = known_bound(&mechanism);
            let summary = if instances.is_empty() {
                "# no instances generated\n".to_string()
            } else {
                match (&worst, &bound) {
                    (Some(w), Some(b)) => {
                        let ok = w <= b;
                        failed |= !ok;
                        format!(
                            "# worst ratio {} vs bound {}: {}\n",
                            fmt_rat(w),
                            fmt_rat(b),
                            if ok { "ok" } else { "VIOLATED" }
                        )
                    }
                    (Some(w), None) => format!("# worst ratio {} (no pinned bound)\n", fmt_rat(w)),
                    (None, _) => {
                        failed = true;
                        "# worst ratio: infinite (zero value against positive optimum)\n".into()
                    }
                }
            };
            text.push_str(&summary);
            write_report(&common, &text)?;
            if failed {
                bail!("sweep found violations");
            }
            Ok(())
        }

        Command::Lp { action } => match action {
            LpAction::Solve { input, dump } => {
                let inst = load_instance(&input)?;
                let free = inst.affordable(inst.ground());
                let model = CutLpModel::from_instance(&inst, free)?;
                if dump {
                    println!("{model}");
                }
                let sol = solve_lp(&model)?;
                println!("objective {}", fmt_rat(&sol.objective));
                for (i, x) in sol.x.iter().enumerate() {
                    if !x.is_zero() {
                        println!("x_{} = {}", i + 1, fmt_rat(x));
                    }
                }
                Ok(())
            }
            LpAction::Round { input } => {
                let inst = load_instance(&input)?;
                let free = inst.affordable(inst.ground());
                let model = CutLpModel::from_instance(&inst, free)?;
                let sol = solve_lp(&model)?;
                let (rounded, steps) = pipage_round(&model, &sol.x);
                println!("lp objective {}", fmt_rat(&sol.objective));
                println!("F(lp point)  {}", fmt_rat(&model.f_value(&sol.x)));
                for step in &steps {
                    match step {
                        PipageStep::ZeroCost { coord, to_one, f_after, .. } => {
                            println!("zero-cost x_{} -> {}, F = {}", coord + 1, u8::from(*to_one), fmt_rat(f_after));
                        }
                        PipageStep::Pair { i, j, eps, f_after, .. } => {
                            println!("pair (x_{}, x_{}) eps = {}, F = {}", i + 1, j + 1, fmt_rat(eps), fmt_rat(f_after));
                        }
                    }
                }
                println!("F(rounded)   {}", fmt_rat(&model.f_value(&rounded)));
                for (i, x) in rounded.iter().enumerate() {
                    if !x.is_zero() {
                        println!("x_{} = {}", i + 1, fmt_rat(x));
                    }
                }
                Ok(())
            }
        },

        Command::Localsearch { input, eps, cap, common } => {
            let inst = load_instance(&input)?;
            let eps = parse_rat(&eps).map_err(|e| anyhow!(e))?;
            let result = approx_local_search_with_cap(&inst, inst.ground(), &eps, cap)?;
            let text = format!(
                "local optimum {} value {} moves {} oracle-queries {} exact {}\n",
                result.set,
                maybe_decimal(&inst.value(result.set), common.decimals),
                result.iterations,
                result.oracle_queries,
                result.exact
            );
            write_report(&common, &text)
        }
    }
}

fn maybe_push_decimal_header(text: &mut String, common: &CommonFlags) {
    if common.decimals.is_some() {
        text.push_str(",ratio_decimal");
    }
    text.push('\n');
}

fn run_target(
    target: &str,
    inst: &Instance,
    mode: &str,
    seed: u64,
    eps: &Option<String>,
    rho: &Option<String>,
    common: &CommonFlags,
) -> Result<()> {
    let mut text = String::new();
    let mut ok = true;
    let opt = if inst.n() <= MAX_AGENTS {
        Some(brute_opt(inst, inst.ground(), &Budget::finite(inst.budget().clone())).0)
    } else {
        None
    };
    text.push_str(&format!(
        "instance {} n={} budget={}\n",
        instance_digest(inst),
        inst.n(),
        fmt_rat(inst.budget())
    ));

    match target {
        "ls-greedy" => {
            let eps = parse_rat_flag(eps, Rat::new(1.into(), 10.into()))?;
            let (set, report) = ls_greedy(inst, &eps)?;
            ok &= inst.is_feasible(set);
            text.push_str(&format!(
                "ls-greedy eps={} local-opt={} sides=({}, {}) winners={} value={}\n",
                fmt_rat(&eps),
                report.local_opt,
                fmt_rat(&report.side_values.0),
                fmt_rat(&report.side_values.1),
                set,
                maybe_decimal(&inst.value(set), common.decimals),
            ));
        }
        "greedy-sm" => {
            let half = inst.budget() / rat(2);
            let order = resort_order(inst, inst.ground());
            let (set, trace) = greedy_sm(inst, inst.ground(), &half);
            text.push_str(&format!(
                "order {:?}\n",
                order.iter().map(|i| i + 1).collect::<Vec<_>>()
            ));
            for step in &trace.accepted {
                text.push_str(&format!(
                    "step {} accept agent {} theta {}\n",
                    step.t,
                    step.agent + 1,
                    step.theta.as_ref().map_or("inf".into(), fmt_rat)
                ));
            }
            text.push_str(&format!(
                "winners {} value {}\n",
                set,
                maybe_decimal(&inst.value(set), common.decimals)
            ));
            ok &= inst.is_feasible(set);
        }
        "greedy-enum-sm" => {
            let set = greedy_enum_sm(inst, inst.ground());
            text.push_str(&format!(
                "winners {} value {}\n",
                set,
                maybe_decimal(&inst.value(set), common.decimals)
            ));
            ok &= inst.is_feasible(set);
        }
        name => {
            let rho = parse_rat_flag(rho, rat(4))?;
            let eps = parse_rat_flag(eps, Rat::new(1.into(), 200.into()))?;
            let mech = mechanism_by_name(name, &rho, &eps)?;
            match mode {
                "exact" => {
                    let outcome = mech.run_exact(inst)?;
                    let expectation = budgetcut::oracle::exact_expectation(&outcome)?;
                    for (p, r) in &outcome.branches {
                        let pays: Vec<String> = r
                            .payments
                            .iter()
                            .map(|(i, pay)| format!("{}:{}", i + 1, fmt_rat(pay)))
                            .collect();
                        text.push_str(&format!(
                            "branch p={} [{}] winners={} value={} payments={{{}}}\n",
                            fmt_rat(p),
                            r.branch,
                            r.winners,
                            fmt_rat(&r.value),
                            pays.join(",")
                        ));
                        ok &= r.total_payment() <= *inst.budget();
                        ok &= r.winners.iter().all(|i| {
                            r.payments.get(&i).map_or(false, |pay| pay >= inst.cost_of(i))
                        });
                    }
                    text.push_str(&format!(
                        "expected value {}\n",
                        maybe_decimal(&expectation, common.decimals)
                    ));
                    if let Some(opt) = &opt {
                        match ratio(opt, &expectation) {
                            Some(r) => text.push_str(&format!(
                                "opt {} ratio {}\n",
                                fmt_rat(opt),
                                maybe_decimal(&r, common.decimals)
                            )),
                            None => {
                                text.push_str(&format!("opt {} ratio inf\n", fmt_rat(opt)));
                                ok = false;
                            }
                        }
                    }
                }
                "sampled" => {
                    let (leaf, r) = mech.run_sampled(inst, seed)?;
                    let pays: Vec<String> = r
                        .payments
                        .iter()
                        .map(|(i, pay)| format!("{}:{}", i + 1, fmt_rat(pay)))
                        .collect();
                    text.push_str(&format!(
                        "sampled leaf {leaf:?} [{}] winners={} value={} payments={{{}}}\n",
                        r.branch,
                        r.winners,
                        maybe_decimal(&r.value, common.decimals),
                        pays.join(",")
                    ));
                    ok &= r.total_payment() <= *inst.budget();
                }
                other => bail!("unknown mode {other:?} (use exact or sampled)"),
            }
        }
    }

    write_report(common, &text)?;
    if !ok {
        bail!("run-level assertions failed (feasibility / IR / budget)");
    }
    Ok(())
}
