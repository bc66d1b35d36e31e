//! Exhaustive certification of the closed-form bounds on small instances.
//!
//! For every repair schedule (up to cluster relabeling) and every
//! eavesdropper placement, the oracle computes the exact min-cut of the
//! zeroed flow graph and compares the minimum against the matching closed
//! form. Enumeration is serial and ordered, so reports and witnesses are
//! reproducible run to run.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use crate::bounds::{
    cluster_restricted_asymmetric_upper, cluster_restricted_symmetric_upper,
    node_restricted_upper, BoundResult,
};
use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::exact::{decimal6, Alpha, Rat};
use crate::flowgraph::{
    apply_eavesdropper, build_flow_graph, dump_edges, min_cut, Placement, RepairSchedule,
};
use crate::topology::{
    asymmetric_bandwidth, make_topology, symmetric_bandwidth, AdversarySpec, BandwidthModel,
    ClusterId, ClusterTopology, NodeId,
};

/// Environment variable overriding the default instance-size limit.
pub const MAX_N_ENV: &str = "CLUSTER_SECRECY_ORACLE_MAX_N";

#[derive(Clone, Debug)]
pub struct SearchLimits {
    /// Largest instance (by node count) the search will accept.
    pub max_n: usize,
    /// Optional cap on enumerated schedules; exceeding it yields a partial report.
    pub max_schedules: Option<usize>,
    /// Optional wall-clock budget; exceeding it yields a partial report.
    pub time_budget: Option<Duration>,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            max_n: 8,
            max_schedules: None,
            time_budget: None,
        }
    }
}

impl SearchLimits {
    /// Default limits, with `max_n` taken from `CLUSTER_SECRECY_ORACLE_MAX_N`
    /// when that parses as an integer.
    pub fn from_env() -> SearchLimits {
        let mut limits = SearchLimits::default();
        if let Some(n) = std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
        {
            limits.max_n = n;
        }
        limits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The enumerated minimum stayed above the closed form.
    BoundValid,
    /// The enumerated minimum equals the closed form exactly.
    BoundTight,
    /// The enumeration found a configuration below the closed form.
    BoundViolated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::BoundValid => write!(f, "valid"),
            Verdict::BoundTight => write!(f, "tight"),
            Verdict::BoundViolated => write!(f, "VIOLATED"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub bound_value: Rat,
    pub min_value: Rat,
    pub verdict: Verdict,
    pub witness_schedule: RepairSchedule,
    pub witness_placement: Placement,
    /// Number of (schedule, placement) configurations whose cut was computed.
    pub enumerated: usize,
    /// True when a schedule or time limit stopped the search early.
    pub partial: bool,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "bound {} ({})",
            self.bound_value,
            decimal6(&self.bound_value)
        )?;
        writeln!(f, "min   {} ({})", self.min_value, decimal6(&self.min_value))?;
        writeln!(f, "verdict {}", self.verdict)?;
        writeln!(
            f,
            "enumerated {} configurations{}",
            self.enumerated,
            if self.partial { " (partial)" } else { "" }
        )?;
        let failed: Vec<NodeId> = self
            .witness_schedule
            .events
            .iter()
            .map(|e| e.failed)
            .collect();
        writeln!(
            f,
            "witness failures {:?} collector {:?}",
            failed, self.witness_schedule.dc_selection
        )?;
        match &self.witness_placement {
            Placement::Clusters(c) => write!(f, "witness placement clusters {c:?}"),
            Placement::Nodes(nd) => write!(f, "witness placement nodes {nd:?}"),
        }
    }
}

/// All failure orders of `k` initial slots, one representative per cluster
/// relabeling: a cluster id may appear only once every lower id has already
/// appeared, and at most `cluster_size` times.
fn canonical_cluster_sequences(
    clusters: usize,
    cluster_size: usize,
    k: usize,
) -> Vec<Vec<ClusterId>> {
    fn rec(
        out: &mut Vec<Vec<ClusterId>>,
        seq: &mut Vec<ClusterId>,
        counts: &mut [usize],
        used: usize,
        cluster_size: usize,
        k: usize,
    ) {
        if seq.len() == k {
            out.push(seq.clone());
            return;
        }
        let limit = (used + 1).min(counts.len());
        for c in 0..limit {
            if counts[c] == cluster_size {
                continue;
            }
            counts[c] += 1;
            seq.push(c);
            rec(out, seq, counts, used.max(c + 1), cluster_size, k);
            seq.pop();
            counts[c] -= 1;
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; clusters];
    rec(&mut out, &mut Vec::with_capacity(k), &mut counts, 0, cluster_size, k);
    out
}

/// Turns a cluster sequence into a concrete schedule by failing each
/// cluster's lowest unfailed slot.
fn schedule_for_sequence(t: &ClusterTopology, seq: &[ClusterId]) -> Result<RepairSchedule> {
    let mut next = vec![0usize; t.clusters];
    let mut slots = Vec::with_capacity(seq.len());
    for &c in seq {
        let slot = t.slots_of(c).nth(next[c]).ok_or_else(|| {
            Error::InvalidSchedule(format!("cluster {c} has no unfailed slot left"))
        })?;
        next[c] += 1;
        slots.push(slot);
    }
    RepairSchedule::consecutive(t, &slots)
}

/// Every placement the adversary could choose against this schedule.
fn placements_for(
    t: &ClusterTopology,
    adv: &AdversarySpec,
    schedule: &RepairSchedule,
) -> Vec<Placement> {
    match adv {
        AdversarySpec::NodeRestricted {
            compromised_clusters,
        } => combinations(t.clusters, *compromised_clusters)
            .into_iter()
            .map(|c| Placement::Clusters(c.into_iter().collect()))
            .collect(),
        AdversarySpec::ClusterRestricted {
            compromised_nodes,
            compromised_clusters,
        } => {
            let total = t.n + schedule.events.len();
            let cluster_of = |id: NodeId| {
                if id < t.n {
                    t.cluster_of(id)
                } else {
                    schedule.events[id - t.n].cluster
                }
            };
            combinations(total, *compromised_nodes)
                .into_iter()
                .filter(|ids| {
                    let spanned: BTreeSet<ClusterId> =
                        ids.iter().map(|&id| cluster_of(id)).collect();
                    spanned.len() <= *compromised_clusters
                })
                .map(|ids| Placement::Nodes(ids.into_iter().collect()))
                .collect()
        }
    }
}

/// The closed form the oracle checks for this bandwidth/adversary pairing.
pub fn closed_form_bound(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    adv: &AdversarySpec,
    alpha: &Alpha,
) -> Result<BoundResult> {
    match (bw, adv) {
        (
            BandwidthModel::Symmetric { .. },
            AdversarySpec::NodeRestricted {
                compromised_clusters,
            },
        ) => node_restricted_upper(t, bw, *compromised_clusters, alpha),
        (
            BandwidthModel::Symmetric { .. },
            AdversarySpec::ClusterRestricted {
                compromised_nodes, ..
            },
        ) => cluster_restricted_symmetric_upper(t, bw, *compromised_nodes, alpha),
        (
            BandwidthModel::Asymmetric { .. },
            AdversarySpec::ClusterRestricted {
                compromised_nodes,
                compromised_clusters,
            },
        ) => cluster_restricted_asymmetric_upper(
            t,
            bw,
            *compromised_nodes,
            *compromised_clusters,
            alpha,
        ),
        (BandwidthModel::Asymmetric { .. }, AdversarySpec::NodeRestricted { .. }) => {
            Err(Error::UnsupportedModel(
                "no closed form for the node-restricted split-bandwidth model".into(),
            ))
        }
    }
}

/// Minimizes the secure flow over every schedule and placement, and compares
/// the result with the closed-form bound. The witness is the first
/// configuration (in enumeration order) attaining the minimum.
pub fn exhaustive_min_secure_flow(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    adv: &AdversarySpec,
    alpha: &Alpha,
    limits: &SearchLimits,
) -> Result<OracleReport> {
    if t.n > limits.max_n {
        return Err(Error::TooLarge(format!(
            "instance has n={} nodes, limit is {}",
            t.n, limits.max_n
        )));
    }
    adv.validate(t)?;
    let bound_value = closed_form_bound(t, bw, adv, alpha)?.value;

    let start = Instant::now();
    let mut best: Option<(Rat, RepairSchedule, Placement)> = None;
    let mut enumerated = 0usize;
    let mut partial = false;
    'outer: for (index, seq) in
        canonical_cluster_sequences(t.clusters, t.cluster_size, t.k)
            .into_iter()
            .enumerate()
    {
        if limits.max_schedules.is_some_and(|m| index >= m) {
            partial = true;
            break;
        }
        let schedule = schedule_for_sequence(t, &seq)?;
        let graph = build_flow_graph(t, bw, alpha, &schedule)?;
        for placement in placements_for(t, adv, &schedule) {
            if limits.time_budget.is_some_and(|b| start.elapsed() > b) {
                partial = true;
                break 'outer;
            }
            let cut = min_cut(&apply_eavesdropper(&graph, adv, &placement)?);
            enumerated += 1;
            if best.as_ref().is_none_or(|(b, _, _)| cut < *b) {
                best = Some((cut, schedule.clone(), placement));
            }
        }
    }

    let Some((min_value, witness_schedule, witness_placement)) = best else {
        return Err(Error::TooLarge(
            "search limits exhausted before the first configuration".into(),
        ));
    };
    let verdict = match min_value.cmp(&bound_value) {
        std::cmp::Ordering::Less => Verdict::BoundViolated,
        std::cmp::Ordering::Equal => Verdict::BoundTight,
        std::cmp::Ordering::Greater => Verdict::BoundValid,
    };
    Ok(OracleReport {
        bound_value,
        min_value,
        verdict,
        witness_schedule,
        witness_placement,
        enumerated,
        partial,
    })
}

/// Bandwidth half of a grid point, in constructor-argument form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BwSpec {
    SymmetricGamma(Rat),
    Asymmetric { beta_intra: Rat, beta_cross: Rat },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub n: usize,
    pub clusters: usize,
    pub k: usize,
    pub bw: BwSpec,
    pub adv: AdversarySpec,
    pub alpha: Alpha,
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} L={} k={} ",
            self.n, self.clusters, self.k
        )?;
        match &self.bw {
            BwSpec::SymmetricGamma(g) => write!(f, "gamma={g} ")?,
            BwSpec::Asymmetric {
                beta_intra,
                beta_cross,
            } => write!(f, "beta_intra={beta_intra} beta_cross={beta_cross} ")?,
        }
        write!(f, "alpha={} ", self.alpha)?;
        match &self.adv {
            AdversarySpec::NodeRestricted {
                compromised_clusters,
            } => write!(f, "node-restricted Lc={compromised_clusters}"),
            AdversarySpec::ClusterRestricted {
                compromised_nodes,
                compromised_clusters,
            } => write!(
                f,
                "cluster-restricted l={compromised_nodes} Lc={compromised_clusters}"
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PointOutcome {
    Checked(OracleReport),
    /// The point's adversary budget is not realizable; carries the reason.
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct GridPointReport {
    pub point: GridPoint,
    pub outcome: PointOutcome,
}

/// Runs the oracle over a whole grid. A violated bound aborts the run with
/// the witnessing configuration dumped into the error; unrealizable
/// adversary budgets become skipped rows rather than failures.
pub fn validate_bound_grid(
    points: &[GridPoint],
    limits: &SearchLimits,
) -> Result<Vec<GridPointReport>> {
    let mut reports = Vec::with_capacity(points.len());
    for point in points {
        let t = make_topology(point.n, point.clusters, point.k)?;
        let bw = match &point.bw {
            BwSpec::SymmetricGamma(g) => symmetric_bandwidth(&t, g.clone())?,
            BwSpec::Asymmetric {
                beta_intra,
                beta_cross,
            } => asymmetric_bandwidth(&t, beta_intra.clone(), beta_cross.clone())?,
        };
        if let Err(Error::InvalidAdversary(msg)) = point.adv.validate(&t) {
            reports.push(GridPointReport {
                point: point.clone(),
                outcome: PointOutcome::Skipped(msg),
            });
            continue;
        }
        let report = exhaustive_min_secure_flow(&t, &bw, &point.adv, &point.alpha, limits)?;
        if report.verdict == Verdict::BoundViolated {
            let graph = build_flow_graph(&t, &bw, &point.alpha, &report.witness_schedule)?;
            let zeroed = apply_eavesdropper(&graph, &point.adv, &report.witness_placement)?;
            return Err(Error::BoundViolated(format!(
                "{point}\n{report}\nzeroed witness graph:\n{}",
                dump_edges(&zeroed)
            )));
        }
        reports.push(GridPointReport {
            point: point.clone(),
            outcome: PointOutcome::Checked(report),
        });
    }
    Ok(reports)
}

/// Node-restricted certification grid over n in {4, 6}: every divisor
/// cluster count, every k, beta = 1, alpha in {1, 2, n-1, unbounded}.
///
/// Kept deliberately small so a CLI run finishes in seconds; the test suite
/// sweeps the larger spaces.
pub fn small_default_grid() -> Vec<GridPoint> {
    let mut points = Vec::new();
    for n in [4usize, 6] {
        for clusters in (1..=n).filter(|c| n % c == 0) {
            for k in 1..n {
                for alpha in [
                    Alpha::from_int(1),
                    Alpha::from_int(2),
                    Alpha::from_int(n as u64 - 1),
                    Alpha::Unbounded,
                ] {
                    for lc in 0..=clusters {
                        points.push(GridPoint {
                            n,
                            clusters,
                            k,
                            bw: BwSpec::SymmetricGamma(crate::exact::rat_u(n - 1)),
                            adv: AdversarySpec::NodeRestricted {
                                compromised_clusters: lc,
                            },
                            alpha: alpha.clone(),
                        });
                    }
                }
            }
        }
    }
    points
}
