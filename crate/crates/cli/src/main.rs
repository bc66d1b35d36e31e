//! Command-line front end for the cluster-secrecy library: single bound
//! evaluations, CSV parameter sweeps, exhaustive oracle validation, and a
//! repetition-code storage demonstration.
//!
//! Exit codes are a stable contract: 0 success, 2 usage or parameter error,
//! 3 verification failure.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cluster_secrecy::bounds::{
    cluster_restricted_asymmetric_upper, cluster_restricted_symmetric_upper,
    node_restricted_upper, storage_capacity,
};
use cluster_secrecy::exact::{decimal6, parse_alpha, parse_rational, rat};
use cluster_secrecy::oracle::{
    exhaustive_min_secure_flow, small_default_grid, validate_bound_grid, OracleReport,
    PointOutcome, SearchLimits, Verdict,
};
use cluster_secrecy::rng::SplitMix64;
use cluster_secrecy::rskr::{
    data_collector_decode, default_coset_code, eavesdrop_node_restricted, exposed_t_count,
    max_exposed_t_count, repair_node, rskr_layout, secure_symbol_count, store_file,
    verify_perfect_secrecy, CodeLayout, SecrecyMode,
};
use cluster_secrecy::topology::{
    asymmetric_bandwidth, make_topology, symmetric_bandwidth, AdversarySpec, BandwidthModel,
};
use cluster_secrecy::{Alpha, ClusterTopology, Error, Rat};

#[derive(Parser)]
#[command(
    name = "cluster-secrecy",
    version,
    about = "Secrecy-capacity bounds for clustered distributed storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one bound; prints the exact rational, then a 6-digit decimal.
    Bound(BoundArgs),
    /// Sweep storage size and observed-cluster budget into a CSV file.
    Sweep(SweepArgs),
    /// Compare a closed-form bound against the exhaustive min-cut search.
    Oracle(OracleArgs),
    /// Store, repair, eavesdrop on, and decode a repetition-coded file.
    Rskr(RskrArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(match cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Rskr(a) => cmd_rskr(a),
    })
}

fn usage_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    2
}

fn verification_error(msg: &str) -> u8 {
    eprintln!("error: {msg}");
    3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Model {
    /// Storage capacity with no eavesdropper.
    Capacity,
    /// Secrecy bound against an adversary owning up to Lc whole clusters.
    NodeRestricted,
    /// Secrecy bound against an adversary on up to l nodes, symmetric repair.
    ClusterRestricted,
    /// Secrecy bound against an adversary on up to l nodes across at most Lc
    /// clusters, with split intra/cross repair bandwidth.
    ClusterRestrictedAsymmetric,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Capacity => "capacity",
            Model::NodeRestricted => "node-restricted",
            Model::ClusterRestricted => "cluster-restricted",
            Model::ClusterRestrictedAsymmetric => "cluster-restricted-asymmetric",
        }
    }
}

#[derive(Args)]
struct SystemArgs {
    /// Total number of storage nodes.
    #[arg(long)]
    n: usize,
    /// Number of equal-size clusters; must divide n.
    #[arg(long = "L")]
    clusters: usize,
    /// Number of nodes a data collector contacts.
    #[arg(long)]
    k: usize,
}

impl SystemArgs {
    fn topology(&self) -> Result<ClusterTopology, String> {
        make_topology(self.n, self.clusters, self.k).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct BandwidthArgs {
    /// Total repair download per newcomer, split evenly over all helpers.
    #[arg(long)]
    gamma: Option<String>,
    /// Per-helper repair download inside the newcomer's own cluster.
    #[arg(long)]
    beta_intra: Option<String>,
    /// Per-helper repair download from the other clusters.
    #[arg(long)]
    beta_cross: Option<String>,
}

impl BandwidthArgs {
    fn symmetric(&self, t: &ClusterTopology) -> Result<BandwidthModel, String> {
        let gamma = self
            .gamma
            .as_deref()
            .ok_or("--gamma is required for this model")?;
        let gamma = parse_rational(gamma).map_err(|e| e.to_string())?;
        symmetric_bandwidth(t, gamma).map_err(|e| e.to_string())
    }

    fn asymmetric(&self, t: &ClusterTopology) -> Result<BandwidthModel, String> {
        let intra = self
            .beta_intra
            .as_deref()
            .ok_or("--beta-intra is required for this model")?;
        let cross = self
            .beta_cross
            .as_deref()
            .ok_or("--beta-cross is required for this model")?;
        let intra = parse_rational(intra).map_err(|e| e.to_string())?;
        let cross = parse_rational(cross).map_err(|e| e.to_string())?;
        asymmetric_bandwidth(t, intra, cross).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct BoundArgs {
    /// Bound to evaluate.
    #[arg(long, value_enum)]
    model: Model,
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    bandwidth: BandwidthArgs,
    /// Per-node storage, a rational or `inf`.
    #[arg(long)]
    alpha: String,
    /// Number of clusters the adversary observes.
    #[arg(long = "Lc")]
    lc: Option<usize>,
    /// Number of nodes the adversary observes.
    #[arg(long)]
    l: Option<usize>,
}

fn cmd_bound(a: BoundArgs) -> u8 {
    match evaluate_bound(&a) {
        Ok(value) => {
            println!("{value}");
            println!("{}", decimal6(&value));
            0
        }
        Err(msg) => usage_error(&msg),
    }
}

fn evaluate_bound(a: &BoundArgs) -> Result<Rat, String> {
    let t = a.system.topology()?;
    let alpha = parse_alpha(&a.alpha).map_err(|e| e.to_string())?;
    let lc = || a.lc.ok_or_else(|| "--Lc is required for this model".to_string());
    let l = || a.l.ok_or_else(|| "--l is required for this model".to_string());
    let result = match a.model {
        Model::Capacity => storage_capacity(&t, &a.bandwidth.symmetric(&t)?, &alpha),
        Model::NodeRestricted => {
            node_restricted_upper(&t, &a.bandwidth.symmetric(&t)?, lc()?, &alpha)
        }
        Model::ClusterRestricted => {
            cluster_restricted_symmetric_upper(&t, &a.bandwidth.symmetric(&t)?, l()?, &alpha)
        }
        Model::ClusterRestrictedAsymmetric => cluster_restricted_asymmetric_upper(
            &t,
            &a.bandwidth.asymmetric(&t)?,
            l()?,
            lc()?,
            &alpha,
        ),
    };
    result.map(|r| r.value).map_err(|e| e.to_string())
}

#[derive(Args)]
struct SweepArgs {
    /// Model to include; repeat the flag to put several curves in one file.
    #[arg(long = "model", value_enum, required = true)]
    models: Vec<Model>,
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    bandwidth: BandwidthArgs,
    /// Observed-node budget for the cluster-restricted models.
    #[arg(long)]
    l: Option<usize>,
    /// Smallest per-node storage in the sweep.
    #[arg(long, default_value = "0")]
    alpha_min: String,
    /// Largest per-node storage, or `inf` for the bandwidth-limited point.
    #[arg(long)]
    alpha_max: String,
    /// Storage increment between grid points.
    #[arg(long)]
    alpha_step: Option<String>,
    /// Smallest observed-cluster budget.
    #[arg(long, default_value_t = 0)]
    lc_min: usize,
    /// Largest observed-cluster budget; defaults to L.
    #[arg(long)]
    lc_max: Option<usize>,
    /// Output CSV path, written via a sibling temp file and a rename.
    #[arg(long)]
    out: PathBuf,
}

fn cmd_sweep(a: SweepArgs) -> u8 {
    match run_sweep(&a) {
        Ok(rows) => {
            println!("wrote {rows} rows to {}", a.out.display());
            0
        }
        Err(msg) => usage_error(&msg),
    }
}

fn run_sweep(a: &SweepArgs) -> Result<usize, String> {
    let t = a.system.topology()?;
    let mut models = a.models.clone();
    models.sort();
    models.dedup();

    // Reject a broken configuration before any file is touched; only
    // per-point budget violations may become skipped rows later.
    for model in &models {
        match model {
            Model::ClusterRestrictedAsymmetric => {
                a.bandwidth.asymmetric(&t)?;
            }
            _ => {
                a.bandwidth.symmetric(&t)?;
            }
        }
        let needs_l = matches!(
            model,
            Model::ClusterRestricted | Model::ClusterRestrictedAsymmetric
        );
        if needs_l && a.l.is_none() {
            return Err("--l is required for the cluster-restricted models".into());
        }
    }
    let alphas = alpha_grid(a)?;
    let lc_max = a.lc_max.unwrap_or(t.clusters);
    if a.lc_min > lc_max {
        return Err("empty Lc range".into());
    }

    let tmp = sibling_tmp_path(&a.out)?;
    let mut writer = csv::Writer::from_path(&tmp).map_err(|e| e.to_string())?;
    writer
        .write_record(["alpha", "Lc", "model", "value_exact", "value_decimal"])
        .map_err(|e| e.to_string())?;
    let mut rows = 0usize;
    for lc in a.lc_min..=lc_max {
        for alpha in &alphas {
            for model in &models {
                let (exact, decimal) = match sweep_value(*model, &t, a, lc, alpha) {
                    Ok(v) => (exact_string(&v), decimal6(&v)),
                    Err(reason) => ("skipped".to_string(), reason),
                };
                let alpha_cell = alpha_string(alpha);
                let lc_cell = lc.to_string();
                writer
                    .write_record([
                        alpha_cell.as_str(),
                        lc_cell.as_str(),
                        model.name(),
                        exact.as_str(),
                        decimal.as_str(),
                    ])
                    .map_err(|e| e.to_string())?;
                rows += 1;
            }
        }
    }
    writer.flush().map_err(|e| e.to_string())?;
    drop(writer);
    fs::rename(&tmp, &a.out).map_err(|e| e.to_string())?;
    Ok(rows)
}

fn sweep_value(
    model: Model,
    t: &ClusterTopology,
    a: &SweepArgs,
    lc: usize,
    alpha: &Alpha,
) -> Result<Rat, String> {
    let result = match model {
        Model::Capacity => storage_capacity(t, &a.bandwidth.symmetric(t)?, alpha),
        Model::NodeRestricted => node_restricted_upper(t, &a.bandwidth.symmetric(t)?, lc, alpha),
        Model::ClusterRestricted => cluster_restricted_symmetric_upper(
            t,
            &a.bandwidth.symmetric(t)?,
            a.l.expect("validated before the sweep starts"),
            alpha,
        ),
        Model::ClusterRestrictedAsymmetric => cluster_restricted_asymmetric_upper(
            t,
            &a.bandwidth.asymmetric(t)?,
            a.l.expect("validated before the sweep starts"),
            lc,
            alpha,
        ),
    };
    result.map(|r| r.value).map_err(|e| e.to_string())
}

fn alpha_grid(a: &SweepArgs) -> Result<Vec<Alpha>, String> {
    if a.alpha_max.trim().eq_ignore_ascii_case("inf") {
        return Ok(vec![Alpha::Unbounded]);
    }
    let min = parse_rational(&a.alpha_min).map_err(|e| e.to_string())?;
    let max = parse_rational(&a.alpha_max).map_err(|e| e.to_string())?;
    let step = a
        .alpha_step
        .as_deref()
        .ok_or("--alpha-step is required for a finite alpha range")?;
    let step = parse_rational(step).map_err(|e| e.to_string())?;
    if step <= rat(0) {
        return Err("--alpha-step must be positive".into());
    }
    let mut grid = Vec::new();
    let mut value = min;
    while value <= max {
        grid.push(Alpha::finite(value.clone()).map_err(|e| e.to_string())?);
        value += &step;
    }
    if grid.is_empty() {
        return Err("empty alpha range".into());
    }
    Ok(grid)
}

fn exact_string(v: &Rat) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

fn alpha_string(a: &Alpha) -> String {
    match a {
        Alpha::Finite(v) => exact_string(v),
        Alpha::Unbounded => "inf".to_string(),
    }
}

fn sibling_tmp_path(out: &Path) -> Result<PathBuf, String> {
    let mut name = out
        .file_name()
        .ok_or("output path needs a file name")?
        .to_os_string();
    name.push(".tmp");
    Ok(out.with_file_name(name))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleModel {
    /// Adversary owning up to Lc whole clusters.
    NodeRestricted,
    /// Adversary on up to l nodes spanning at most Lc clusters.
    ClusterRestricted,
}

#[derive(Args)]
struct OracleArgs {
    /// Named validation grid (`small-default`) instead of a single point.
    #[arg(long)]
    grid: Option<String>,
    /// Adversary model for a single-point run.
    #[arg(long, value_enum)]
    model: Option<OracleModel>,
    /// Total number of storage nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Number of equal-size clusters; must divide n.
    #[arg(long = "L")]
    clusters: Option<usize>,
    /// Number of nodes a data collector contacts.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    bandwidth: BandwidthArgs,
    /// Per-node storage, a rational or `inf`.
    #[arg(long)]
    alpha: Option<String>,
    /// Number of clusters the adversary observes.
    #[arg(long = "Lc")]
    lc: Option<usize>,
    /// Number of nodes the adversary observes.
    #[arg(long)]
    l: Option<usize>,
    /// Cap on enumerated schedules; hitting it marks the report partial.
    #[arg(long)]
    max_schedules: Option<usize>,
}

fn cmd_oracle(a: OracleArgs) -> u8 {
    if let Some(name) = &a.grid {
        return run_oracle_grid(name);
    }
    match oracle_point_report(&a) {
        Ok(report) => {
            let verdict = match report.verdict {
                Verdict::BoundValid => "BoundValid",
                Verdict::BoundTight => "BoundTight",
                Verdict::BoundViolated => "BoundViolated",
            };
            println!("{verdict}({})", report.bound_value);
            println!("{report}");
            if report.verdict == Verdict::BoundViolated {
                verification_error("the search found a cut below the closed form")
            } else {
                0
            }
        }
        Err(msg) => usage_error(&msg),
    }
}

fn oracle_point_report(a: &OracleArgs) -> Result<OracleReport, String> {
    let model = a.model.ok_or("--model or --grid is required")?;
    let n = a.n.ok_or("--n is required")?;
    let clusters = a.clusters.ok_or("--L is required")?;
    let k = a.k.ok_or("--k is required")?;
    let t = make_topology(n, clusters, k).map_err(|e| e.to_string())?;
    let alpha = a.alpha.as_deref().ok_or("--alpha is required")?;
    let alpha = parse_alpha(alpha).map_err(|e| e.to_string())?;
    let bw = if a.bandwidth.gamma.is_some() {
        a.bandwidth.symmetric(&t)?
    } else {
        a.bandwidth.asymmetric(&t)?
    };
    let lc = a.lc.ok_or("--Lc is required")?;
    let adv = match model {
        OracleModel::NodeRestricted => AdversarySpec::NodeRestricted {
            compromised_clusters: lc,
        },
        OracleModel::ClusterRestricted => AdversarySpec::ClusterRestricted {
            compromised_nodes: a.l.ok_or("--l is required for cluster-restricted")?,
            compromised_clusters: lc,
        },
    };
    let mut limits = SearchLimits::from_env();
    if let Some(m) = a.max_schedules {
        limits.max_schedules = Some(m);
    }
    exhaustive_min_secure_flow(&t, &bw, &adv, &alpha, &limits).map_err(|e| e.to_string())
}

fn run_oracle_grid(name: &str) -> u8 {
    if name != "small-default" {
        return usage_error(&format!("unknown grid {name:?}; available: small-default"));
    }
    let limits = SearchLimits::from_env();
    match validate_bound_grid(&small_default_grid(), &limits) {
        Ok(reports) => {
            let mut checked = 0usize;
            let mut skipped = 0usize;
            for report in &reports {
                match &report.outcome {
                    PointOutcome::Checked(r) => {
                        checked += 1;
                        println!("{}: {} bound={}", report.point, r.verdict, r.bound_value);
                    }
                    PointOutcome::Skipped(reason) => {
                        skipped += 1;
                        println!("{}: skipped ({reason})", report.point);
                    }
                }
            }
            println!("all {checked} checked bounds valid ({skipped} skipped)");
            0
        }
        Err(e @ Error::BoundViolated(_)) => verification_error(&e.to_string()),
        Err(e) => usage_error(&e.to_string()),
    }
}

#[derive(Args)]
struct RskrArgs {
    /// Total number of storage nodes; the layout fixes k = n-1.
    #[arg(long)]
    n: usize,
    /// Number of equal-size clusters; must divide n.
    #[arg(long = "L")]
    clusters: usize,
    /// Number of clusters the adversary observes.
    #[arg(long = "Lc")]
    lc: usize,
    /// Seed for the stored message and coset pad (SplitMix64 stream).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_rskr(a: RskrArgs) -> u8 {
    let run = || -> Result<(), (u8, String)> {
        let usage = |e: Error| (2u8, e.to_string());
        let broken = |e: Error| (3u8, e.to_string());

        let t = make_topology(a.n, a.clusters, a.n.saturating_sub(1)).map_err(usage)?;
        let layout = rskr_layout(&t).map_err(usage)?;
        let exposed = max_exposed_t_count(&layout, a.lc).map_err(usage)?;
        let secure = secure_symbol_count(&layout, a.lc).map_err(usage)?;
        let code = default_coset_code(&layout, a.lc).map_err(usage)?;
        let bw = symmetric_bandwidth(&t, rat(t.d as i64)).map_err(usage)?;
        let bound = node_restricted_upper(&t, &bw, a.lc, &Alpha::from_int(t.d as u64))
            .map_err(usage)?
            .value;

        println!(
            "repetition storage demonstration: n={} L={} k={} Lc={} seed={}",
            t.n, t.clusters, t.k, a.lc, a.seed
        );
        println!("same-cluster pairs |S|: {}", layout.intra_count);
        println!("cross-cluster pairs |T|: {}", layout.cross_count());
        println!("worst-case exposed cross pairs: {exposed}");
        println!("secure symbol count: {secure}");
        println!("node-restricted bound (beta=1, alpha=n-1): {bound}");
        println!(
            "coset code: q={} length={} coset rows={}",
            code.field.q, code.length, code.randomness_len
        );

        let mut rng = SplitMix64::new(a.seed);
        let message: Vec<u64> = (0..layout.intra_count + code.message_len())
            .map(|_| rng.next_below(code.field.q))
            .collect();
        let pad: Vec<u64> = (0..code.randomness_len)
            .map(|_| rng.next_below(code.field.q))
            .collect();
        let mut state = store_file(&layout, a.lc, &message, &pad).map_err(broken)?;

        for node in 0..t.n {
            let before = state.stores[node].clone();
            let sent = state.transcript.len();
            repair_node(&mut state, node).map_err(broken)?;
            if state.stores[node] != before {
                return Err((3, format!("repair of node {node} altered its contents")));
            }
            println!(
                "repaired node {node}: {} transmissions, contents restored",
                state.transcript.len() - sent
            );
        }

        for choice in cluster_choices(&layout, a.lc) {
            let observed = eavesdrop_node_restricted(&state, &choice).map_err(broken)?;
            let expected = exposed_t_count(&layout, &choice).map_err(broken)?;
            if observed.len() != expected {
                return Err((
                    3,
                    format!(
                        "clusters {choice:?} observed {} cross pairs, expected {expected}",
                        observed.len()
                    ),
                ));
            }
            println!(
                "eavesdropper on clusters {choice:?}: observed {} cross pairs",
                observed.len()
            );
        }

        match verify_perfect_secrecy(&layout, a.lc, &code, SecrecyMode::Algebraic) {
            Ok(cert) => println!("{cert}"),
            Err(e) => return Err((3, e.to_string())),
        }

        for excluded in 0..t.n {
            let nodes: BTreeSet<usize> = (0..t.n).filter(|&v| v != excluded).collect();
            let decoded = data_collector_decode(&state, &nodes, &code).map_err(broken)?;
            if decoded != message {
                return Err((
                    3,
                    format!("decode without node {excluded} returned the wrong message"),
                ));
            }
        }
        println!("decode round-trip: ok for all {} collector choices", t.n);
        println!("all checks passed");
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            code
        }
    }
}

/// All `lc`-subsets of the layout's clusters, in lexicographic order.
fn cluster_choices(layout: &CodeLayout, lc: usize) -> Vec<BTreeSet<usize>> {
    fn rec(
        out: &mut Vec<BTreeSet<usize>>,
        current: &mut Vec<usize>,
        start: usize,
        n: usize,
        k: usize,
    ) {
        if current.len() == k {
            out.push(current.iter().copied().collect());
            return;
        }
        for v in start..n {
            current.push(v);
            rec(out, current, v + 1, n, k);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut out, &mut Vec::with_capacity(lc), 0, layout.clusters, lc);
    out
}
