//! Command-line front end: analysis of instance files, menu-gap reports,
//! lower-bound generation, example instances, and CSV reporting.
//!
//! Exit codes: 0 means success with every asserted bound holding, 1 means a
//! verified bound failed (the counterexample is printed), 2 means a usage or
//! parse error.

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use buyk::benchmarks::DEFAULT_LP_GUARD;
use buyk::buyer::{verify_adaptive_buyk_ic_capped, DEFAULT_ADAPTIVE_CAP};
use buyk::scalar::Scalar as _;
use buyk::{
    brev, gap, menu_size_revenue_bound, menugap, prune_nonpositive, revenue_under_buyk, srev,
    upper_bound_pipeline, verify_buyk_ic, verify_coverfree, Certificate, EntryMultiset, Error,
    FamilyMethod, IcVerdict, Menu, Rat, SequencePair, ValuationType,
};
use clap::{Parser, Subcommand, ValueEnum};
use format::{approx6, parse_instance, serialize_instance, InstanceData};
use serde_json::{Map, Value};

#[derive(Parser)]
#[command(
    name = "buyk",
    version,
    about = "Exact analysis of buy-k mechanisms: best responses, incentive \
             compatibility, revenue benchmarks, menu gaps, and bound-witness \
             instance generators. All arithmetic is exact; printed decimals \
             are labeled approximations."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print benchmarks and per-menu verdicts for an instance file.
    Analyze {
        instance: PathBuf,
        /// Number of menu entries the buyer may combine.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Skip the optimal buy-one LP above this many variables.
        #[arg(long, default_value_t = DEFAULT_LP_GUARD)]
        lp_guard: usize,
        /// Skip the adaptive verdict above this dimension.
        #[arg(long, default_value_t = DEFAULT_ADAPTIVE_CAP)]
        adaptive_cap: usize,
    },
    /// Per-index gaps, witnesses, and the total for the file's sequences.
    Menugap {
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        /// Also drop non-positive-gap points and report the pruned total.
        #[arg(long)]
        prune: bool,
    },
    /// Run the menu-surgery pipeline (filter, band split, extraction) on
    /// each embedded menu and check the resulting gap bound.
    Pipeline {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Price floor; defaults to buy-k revenue / 100.
        #[arg(long)]
        c: Option<String>,
        /// Representative slack; defaults to 1/100.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Generate a cover-free lower-bound instance and its verification report.
    GenLowerbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        method: MethodArg,
        /// Field size (ks method only; requires a prime).
        #[arg(long)]
        q: Option<usize>,
        /// Polynomial degree bound (ks method only).
        #[arg(long)]
        m: Option<usize>,
        /// Output directory for instance.json and report.json.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write a built-in example instance.
    GenExample {
        which: ExampleArg,
        /// Number of items (srev-gap only).
        #[arg(long)]
        n: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// One CSV row per instance/menu pair across the given files.
    Report {
        instances: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LP_GUARD)]
        lp_guard: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Greedy,
    Ks,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Coffee,
    SrevGap,
}

enum CliError {
    /// Usage or file-content problem; exit 2.
    Input(String),
    /// A verified bound failed; exit 1.
    Bound(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ConstructionFailed(_) => CliError::Bound(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Bound(msg)) => {
            eprintln!("bound failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Analyze { instance, k, lp_guard, adaptive_cap } => {
            analyze(&instance, k, lp_guard, adaptive_cap)
        }
        Command::Menugap { instance, k, prune } => menugap_cmd(&instance, k, prune),
        Command::Pipeline { instance, k, c, delta } => pipeline_cmd(&instance, k, c, delta),
        Command::GenLowerbound { n, k, method, q, m, out } => {
            gen_lowerbound(n, k, method, q, m, &out)
        }
        Command::GenExample { which, n, out } => gen_example(which, n, &out),
        Command::Report { instances, k, csv, lp_guard } => report(&instances, k, &csv, lp_guard),
    }
}

fn load(path: &Path) -> Result<InstanceData, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn require_k(k: usize) -> CliResult {
    if k == 0 {
        return Err(CliError::Input("k must be at least 1".into()));
    }
    Ok(())
}

fn fmt_vec(values: &[Rat]) -> String {
    let inner: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_exact(value: &Rat) -> String {
    format!("{} (~{})", value, approx6(value))
}

fn multiset_payment(menu: &Menu<Rat>, multiset: &EntryMultiset) -> Rat {
    multiset
        .indices()
        .iter()
        .map(|&i| menu.entry(i).expect("witness indices are valid").price)
        .sum()
}

fn print_ic_verdict(label: &str, verdict: &IcVerdict<Rat>, menu: &Menu<Rat>) {
    println!("  {label}: {}", verdict.ic);
    for w in &verdict.witnesses {
        match &w.deviation {
            Some(dev) => println!(
                "    witness: type {}, deviation {}, payment {}, single utility {}, multiset utility {}",
                fmt_vec(&w.valuation.values),
                dev,
                multiset_payment(menu, dev),
                w.single_utility,
                w.multiset_utility
            ),
            None => println!(
                "    witness: type {}, single utility {}, adaptive value {}",
                fmt_vec(&w.valuation.values),
                w.single_utility,
                w.multiset_utility
            ),
        }
    }
}

fn analyze(path: &Path, k: usize, lp_guard: usize, adaptive_cap: usize) -> CliResult {
    require_k(k)?;
    let data = load(path)?;
    let types: Vec<ValuationType<Rat>> =
        data.dist.support.iter().map(|(v, _)| v.clone()).collect();

    println!("instance: {}", path.display());
    println!(
        "n = {}, support types = {}, residual mass = {}",
        data.n,
        types.len(),
        data.dist.residual_mass()
    );

    let brev_result = brev(&data.dist);
    let brev_price = match &brev_result.certificate {
        Certificate::BundlePrice(p) => p.clone(),
        _ => unreachable!(),
    };
    println!("BRev = {} at bundle price {}", fmt_exact(&brev_result.value), brev_price);

    let srev_result = srev(&data.dist);
    let item_prices = match &srev_result.certificate {
        Certificate::ItemPrices(p) => p.clone(),
        _ => unreachable!(),
    };
    println!("SRev = {} at item prices {}", fmt_exact(&srev_result.value), fmt_vec(&item_prices));

    match buyk::benchmarks::optimal_buy_one_guarded(&data.dist, lp_guard) {
        Ok(result) => println!("OptBuy1 = {}", fmt_exact(&result.value)),
        Err(Error::LpTooLarge { vars, guard }) => {
            println!(
                "OptBuy1 skipped: {vars} LP variables exceed the guard {guard} (raise with --lp-guard)"
            )
        }
        Err(e) => return Err(e.into()),
    }

    let mut violations = Vec::new();
    for (mi, menu) in data.menus.iter().enumerate() {
        println!("menu {} ({} entries):", mi + 1, menu.len());
        let revenue = revenue_under_buyk(&data.dist, menu, k)?;
        println!("  buy-{k} revenue = {}", fmt_exact(&revenue));

        let verdict = verify_buyk_ic(menu, &types, k)?;
        print_ic_verdict(&format!("buy-{k} IC"), &verdict, menu);

        if data.n <= adaptive_cap {
            let adaptive = verify_adaptive_buyk_ic_capped(menu, &types, k, adaptive_cap)?;
            print_ic_verdict(&format!("adaptive buy-{k} IC"), &adaptive, menu);
        } else {
            println!(
                "  adaptive buy-{k} IC: skipped (n = {} exceeds the cap {adaptive_cap})",
                data.n
            );
        }

        let record = menu_size_revenue_bound(&data.dist, menu, k)?;
        println!(
            "  menu-size bound: {} x BRev = {} >= revenue {}: {}",
            record.menu_size,
            record.bound,
            record.revenue,
            if record.holds { "holds" } else { "VIOLATED" }
        );
        if !record.holds {
            violations.push(format!(
                "menu {}: revenue {} exceeds {} x BRev = {}",
                mi + 1,
                record.revenue,
                record.menu_size,
                record.bound
            ));
        }
    }

    if let Some(first) = violations.first() {
        return Err(CliError::Bound(first.clone()));
    }
    Ok(())
}

fn menugap_cmd(path: &Path, k: usize, prune: bool) -> CliResult {
    require_k(k)?;
    let data = load(path)?;
    let pair = data
        .sequences
        .ok_or_else(|| CliError::Input(format!("{}: instance has no sequences", path.display())))?;

    print_gap_report(&pair, k)?;
    if prune {
        let pruned = prune_nonpositive(&pair, k)?;
        println!("after pruning: {} of {} points remain", pruned.len(), pair.len());
        print_gap_report(&pruned, k)?;
    }
    Ok(())
}

fn print_gap_report(pair: &SequencePair<Rat>, k: usize) -> CliResult {
    let report = menugap(pair, k)?;
    for i in 1..=pair.len() {
        let (g, witness) = gap(pair, k, i)?;
        let norm = pair.valuations()[i - 1].l1_norm();
        let witness_str: Vec<String> = witness.iter().map(|w| w.to_string()).collect();
        println!(
            "i={i}: gap = {} witness {{{}}} norm {} normalized {}",
            g,
            witness_str.join(", "),
            norm,
            g.clone() / norm.clone()
        );
    }
    println!("MenuGap_{k} = {}", fmt_exact(&report.menugap));
    Ok(())
}

fn parse_rat_flag(text: &str, what: &str) -> Result<Rat, CliError> {
    text.parse::<Rat>()
        .map_err(|_| CliError::Input(format!("{what}: malformed rational `{text}`")))
}

fn pipeline_cmd(path: &Path, k: usize, c: Option<String>, delta: Option<String>) -> CliResult {
    require_k(k)?;
    let data = load(path)?;
    if data.menus.is_empty() {
        return Err(CliError::Input(format!("{}: instance has no menus", path.display())));
    }
    let c_override = c.map(|t| parse_rat_flag(&t, "--c")).transpose()?;
    let delta_override = delta.map(|t| parse_rat_flag(&t, "--delta")).transpose()?;

    let mut violations = Vec::new();
    for (mi, menu) in data.menus.iter().enumerate() {
        println!("menu {} ({} entries):", mi + 1, menu.len());
        let outcome =
            upper_bound_pipeline(&data.dist, menu, k, c_override.clone(), delta_override.clone())?;
        for (label, stage_menu, value) in &outcome.trace.stages {
            println!("  {label}: {} entries, revenue {}", stage_menu.len(), fmt_exact(value));
        }
        for bin in &outcome.trace.bins {
            println!(
                "  bin {}: mass {}, min price {}, representative {}",
                bin.band,
                bin.mass,
                bin.min_price,
                fmt_vec(&bin.representative.values)
            );
        }
        println!("  extracted menugap_{k} = {}", fmt_exact(&outcome.trace.menugap));

        let revenue = revenue_under_buyk(&data.dist, menu, k)?;
        let brev_value = brev(&data.dist).value;
        if revenue > Rat::from_int(0) {
            let denom = Rat::from_int(2)
                * Rat::from_int(((k + 1) * (k + 1)) as i64)
                * brev_value
                * (Rat::from_int(1) + outcome.delta.clone());
            let bound = (revenue - outcome.c.clone()) / denom;
            let holds = outcome.trace.menugap >= bound;
            println!(
                "  chain bound: menugap {} >= (BuyKRev - c)/(2 (k+1)^2 BRev (1+delta)) = {}: {}",
                outcome.trace.menugap,
                bound,
                if holds { "holds" } else { "VIOLATED" }
            );
            if !holds {
                violations.push(format!(
                    "menu {}: extracted menugap {} below the chain bound {}",
                    mi + 1,
                    outcome.trace.menugap,
                    bound
                ));
            }
        } else {
            println!("  chain bound: trivial (zero revenue)");
        }
    }
    if let Some(first) = violations.first() {
        return Err(CliError::Bound(first.clone()));
    }
    Ok(())
}

fn rat_entry(value: &Rat) -> Value {
    let mut obj = Map::new();
    obj.insert("approx".into(), Value::String(approx6(value)));
    obj.insert("exact".into(), Value::String(value.to_string()));
    Value::Object(obj)
}

fn gen_lowerbound(
    n: usize,
    k: usize,
    method: MethodArg,
    q: Option<usize>,
    m: Option<usize>,
    out: &Path,
) -> CliResult {
    require_k(k)?;
    let (family_method, method_name) = match method {
        MethodArg::Greedy => {
            if q.is_some() || m.is_some() {
                return Err(CliError::Input("--q/--m only apply to --method ks".into()));
            }
            (FamilyMethod::Greedy, "greedy")
        }
        MethodArg::Ks => {
            let q = q.ok_or_else(|| CliError::Input("--method ks requires --q".into()))?;
            let m = m.ok_or_else(|| CliError::Input("--method ks requires --m".into()))?;
            (FamilyMethod::KautzSingleton { q, m }, "kautz-singleton")
        }
    };

    let instance = buyk::lowerbound_instance::<Rat>(n, k, family_method)?;
    let family = instance.family.as_ref().expect("constructor attaches the family");

    // Re-run the verification that backs the report, recording each check.
    let types: Vec<ValuationType<Rat>> =
        instance.dist.support.iter().map(|(v, _)| v.clone()).collect();
    let ic = verify_buyk_ic(&instance.menu, &types, k)?.ic;
    let coverfree = verify_coverfree(family, k)?.ok;
    let brev_ok = instance.report.brev <= Rat::from_int(2 * n as i64);
    let size = Rat::from_int(family.len() as i64);
    let n_rat = Rat::from_int(n as i64);
    let menugap_bound = size.clone() / n_rat.clone();
    let ratio_bound = size / (Rat::from_int(2) * n_rat.clone() * n_rat);
    let menugap_ok = instance.report.menugap >= menugap_bound;
    let ratio_ok = instance.report.ratio >= ratio_bound;
    let revenue_ok = instance.report.buyk_revenue == instance.report.menugap;

    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let instance_path = out.join("instance.json");
    let data = InstanceData {
        n,
        dist: instance.dist.clone(),
        menus: vec![instance.menu.clone()],
        sequences: Some(instance.pair.clone()),
    };
    fs::write(&instance_path, serialize_instance(&data))
        .map_err(|e| CliError::Input(format!("{}: {e}", instance_path.display())))?;

    let mut checks = Map::new();
    checks.insert("brev_at_most_2n".into(), Value::Bool(brev_ok));
    checks.insert("buyk_ic".into(), Value::Bool(ic));
    checks.insert("family_coverfree".into(), Value::Bool(coverfree));
    checks.insert("menugap_at_least_family_over_n".into(), Value::Bool(menugap_ok));
    checks.insert("ratio_at_least_family_over_2n2".into(), Value::Bool(ratio_ok));
    checks.insert("revenue_equals_menugap".into(), Value::Bool(revenue_ok));

    let mut family_obj = Map::new();
    family_obj.insert("k".into(), Value::from(family.k as u64));
    family_obj.insert("method".into(), Value::String(method_name.into()));
    family_obj.insert(
        "sets".into(),
        Value::Array(
            family
                .sets
                .iter()
                .map(|s| Value::Array(s.iter().map(|&e| Value::from(e as u64)).collect()))
                .collect(),
        ),
    );
    family_obj.insert("size".into(), Value::from(family.len() as u64));

    let mut report = Map::new();
    report.insert("brev".into(), rat_entry(&instance.report.brev));
    report.insert("buyk_revenue".into(), rat_entry(&instance.report.buyk_revenue));
    report.insert("checks".into(), Value::Object(checks));
    report.insert("family".into(), Value::Object(family_obj));
    report.insert("k".into(), Value::from(k as u64));
    report.insert("menugap".into(), rat_entry(&instance.report.menugap));
    report.insert("n".into(), Value::from(n as u64));
    report.insert("ratio".into(), rat_entry(&instance.report.ratio));
    let report_path = out.join("report.json");
    let mut report_text =
        serde_json::to_string_pretty(&Value::Object(report)).expect("serializable");
    report_text.push('\n');
    fs::write(&report_path, report_text)
        .map_err(|e| CliError::Input(format!("{}: {e}", report_path.display())))?;

    println!("wrote {}", instance_path.display());
    println!("wrote {}", report_path.display());
    println!(
        "family size {} ({}), BuyKRev = {}, BRev = {}, ratio = {} >= bound {}",
        family.len(),
        method_name,
        fmt_exact(&instance.report.buyk_revenue),
        fmt_exact(&instance.report.brev),
        fmt_exact(&instance.report.ratio),
        fmt_exact(&ratio_bound),
    );

    let all_ok = ic && coverfree && brev_ok && menugap_ok && ratio_ok && revenue_ok;
    if !all_ok {
        return Err(CliError::Bound(
            "a lower-bound verification check failed; see report.json".into(),
        ));
    }
    Ok(())
}

fn gen_example(which: ExampleArg, n: Option<usize>, out: &Path) -> CliResult {
    let data = match which {
        ExampleArg::Coffee => {
            let (dist, menu) = buyk::coffee_shop_instance::<Rat>();
            InstanceData { n: 2, dist, menus: vec![menu], sequences: None }
        }
        ExampleArg::SrevGap => {
            let n = n.ok_or_else(|| CliError::Input("srev-gap requires --n".into()))?;
            let dist = buyk::srev_gap_instance::<Rat>(n)?;
            InstanceData { n, dist, menus: Vec::new(), sequences: None }
        }
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| CliError::Input(format!("{}: {e}", parent.display())))?;
    }
    fs::write(out, serialize_instance(&data))
        .map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    println!("wrote {}", out.display());
    Ok(())
}

struct ReportRow {
    cells: Vec<String>,
    violation: Option<String>,
}

const REPORT_HEADER: &[&str] = &[
    "instance",
    "menu",
    "n",
    "k",
    "menu_size",
    "brev",
    "brev_approx",
    "srev",
    "srev_approx",
    "opt_buy1",
    "opt_buy1_approx",
    "revenue",
    "revenue_approx",
    "ic",
    "size_bound_holds",
    "menugap",
    "menugap_approx",
    "revenue_over_brev",
    "revenue_over_brev_approx",
];

fn instance_rows(path: &Path, k: usize, lp_guard: usize) -> Result<Vec<ReportRow>, CliError> {
    let data = load(path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let types: Vec<ValuationType<Rat>> =
        data.dist.support.iter().map(|(v, _)| v.clone()).collect();

    let brev_value = brev(&data.dist).value;
    let srev_value = srev(&data.dist).value;
    let opt = match buyk::benchmarks::optimal_buy_one_guarded(&data.dist, lp_guard) {
        Ok(result) => Some(result.value),
        Err(Error::LpTooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let gap_total = match &data.sequences {
        Some(pair) => Some(menugap(pair, k)?.menugap),
        None => None,
    };

    let shared = |cells: &mut Vec<String>| {
        cells.push(brev_value.to_string());
        cells.push(approx6(&brev_value));
        cells.push(srev_value.to_string());
        cells.push(approx6(&srev_value));
        match &opt {
            Some(v) => {
                cells.push(v.to_string());
                cells.push(approx6(v));
            }
            None => {
                cells.push(String::new());
                cells.push(String::new());
            }
        }
    };

    let gap_cells = |cells: &mut Vec<String>| match &gap_total {
        Some(g) => {
            cells.push(g.to_string());
            cells.push(approx6(g));
        }
        None => {
            cells.push(String::new());
            cells.push(String::new());
        }
    };

    let mut rows = Vec::new();
    if data.menus.is_empty() {
        let mut cells =
            vec![id.clone(), String::new(), data.n.to_string(), k.to_string(), String::new()];
        shared(&mut cells);
        cells.extend([String::new(), String::new(), String::new(), String::new()]);
        gap_cells(&mut cells);
        cells.extend([String::new(), String::new()]);
        rows.push(ReportRow { cells, violation: None });
    }
    for (mi, menu) in data.menus.iter().enumerate() {
        let revenue = revenue_under_buyk(&data.dist, menu, k)?;
        let verdict = verify_buyk_ic(menu, &types, k)?;
        let record = menu_size_revenue_bound(&data.dist, menu, k)?;
        let mut cells = vec![
            id.clone(),
            (mi + 1).to_string(),
            data.n.to_string(),
            k.to_string(),
            menu.len().to_string(),
        ];
        shared(&mut cells);
        cells.push(revenue.to_string());
        cells.push(approx6(&revenue));
        cells.push(verdict.ic.to_string());
        cells.push(record.holds.to_string());
        gap_cells(&mut cells);
        if brev_value > Rat::from_int(0) {
            let ratio = revenue.clone() / brev_value.clone();
            cells.push(ratio.to_string());
            cells.push(approx6(&ratio));
        } else {
            cells.extend([String::new(), String::new()]);
        }
        let violation = (!record.holds).then(|| {
            format!(
                "{id} menu {}: revenue {} exceeds {} x BRev = {}",
                mi + 1,
                record.revenue,
                record.menu_size,
                record.bound
            )
        });
        rows.push(ReportRow { cells, violation });
    }
    Ok(rows)
}

fn report(paths: &[PathBuf], k: usize, csv: &Path, lp_guard: usize) -> CliResult {
    require_k(k)?;
    if paths.is_empty() {
        return Err(CliError::Input("report requires at least one instance".into()));
    }

    // Instances are independent; evaluate them concurrently but emit rows in
    // input order.
    let results: Vec<Result<Vec<ReportRow>, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|path| scope.spawn(move || instance_rows(path, k, lp_guard)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("row worker panicked")).collect()
    });

    let mut out = String::new();
    out.push_str(&REPORT_HEADER.join(","));
    out.push('\n');
    let mut violations = Vec::new();
    for result in results {
        for row in result? {
            out.push_str(&row.cells.join(","));
            out.push('\n');
            if let Some(v) = row.violation {
                violations.push(v);
            }
        }
    }
    fs::write(csv, out).map_err(|e| CliError::Input(format!("{}: {e}", csv.display())))?;
    println!("wrote {}", csv.display());

    if let Some(first) = violations.first() {
        return Err(CliError::Bound(first.clone()));
    }
    Ok(())
}
