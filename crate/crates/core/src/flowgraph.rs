//! Information-flow graphs for repair histories, eavesdropper edge zeroing,
//! and an exact rational max-flow/min-cut.
//!
//! Each storage instance (an initial node or a repaired newcomer) becomes an
//! in/out vertex pair joined by a storage edge of capacity alpha. A repair
//! draws one edge from every currently active instance into the newcomer,
//! carrying the per-helper bandwidth of the locality. The data collector
//! taps its chosen instances through unbounded edges.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{Alpha, Rat};
use crate::topology::{AdversarySpec, BandwidthModel, ClusterId, ClusterTopology, NodeId};

/// How a storage instance came to exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generation {
    Initial,
    /// Created by the 1-based repair step carried as payload.
    Newcomer(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub id: NodeId,
    pub cluster: ClusterId,
    pub generation: Generation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Vertex {
    Source,
    In(NodeId),
    Out(NodeId),
    Collector,
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Vertex::Source => write!(f, "source"),
            Vertex::In(id) => write!(f, "in{id}"),
            Vertex::Out(id) => write!(f, "out{id}"),
            Vertex::Collector => write!(f, "collector"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeTag {
    /// Source to an initial instance.
    SourceSeed,
    /// In-to-out edge bounded by alpha.
    Storage,
    /// Repair download from a helper in the newcomer's cluster.
    IntraCluster,
    /// Repair download from a helper outside the newcomer's cluster.
    CrossCluster,
    /// Data-collector tap.
    Collect,
}

impl EdgeTag {
    fn label(self) -> &'static str {
        match self {
            EdgeTag::SourceSeed => "seed",
            EdgeTag::Storage => "storage",
            EdgeTag::IntraCluster => "intra",
            EdgeTag::CrossCluster => "cross",
            EdgeTag::Collect => "collect",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capacity {
    Finite(Rat),
    Infinite,
}

impl std::fmt::Display for Capacity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowEdge {
    pub tail: Vertex,
    pub head: Vertex,
    pub capacity: Capacity,
    pub tag: EdgeTag,
}

#[derive(Clone, Debug)]
pub struct FlowGraph {
    /// Number of clusters in the underlying system.
    pub cluster_count: usize,
    /// Every instance ever created, keyed by id. Ids `0..n` are the initial
    /// nodes; newcomers continue from `n` in repair order.
    pub instances: BTreeMap<NodeId, Instance>,
    pub edges: Vec<FlowEdge>,
}

/// One repair: `failed` leaves, `newcomer` joins in `cluster` (which must be
/// the failed instance's cluster; it is carried explicitly so that a
/// mismatched replacement is a checkable error).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairEvent {
    pub failed: NodeId,
    pub newcomer: NodeId,
    pub cluster: ClusterId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairSchedule {
    pub events: Vec<RepairEvent>,
    /// Instances the data collector contacts once all repairs are done.
    pub dc_selection: Vec<NodeId>,
}

impl RepairSchedule {
    /// Fails the given initial slots in order, replacing slot `failed[s]`
    /// with newcomer id `n + s`; the collector contacts the newcomers (and,
    /// if fewer than `k` failures are given, the lowest surviving ids).
    pub fn consecutive(t: &ClusterTopology, failed: &[NodeId]) -> Result<RepairSchedule> {
        let mut events = Vec::with_capacity(failed.len());
        let mut alive: BTreeSet<NodeId> = (0..t.n).collect();
        for (step, &slot) in failed.iter().enumerate() {
            if slot >= t.n {
                return Err(Error::InvalidSchedule(format!(
                    "slot {slot} is not an initial node id"
                )));
            }
            if !alive.remove(&slot) {
                return Err(Error::InvalidSchedule(format!("slot {slot} failed twice")));
            }
            let newcomer = t.n + step;
            events.push(RepairEvent {
                failed: slot,
                newcomer,
                cluster: t.cluster_of(slot),
            });
            alive.insert(newcomer);
        }
        let mut dc_selection: Vec<NodeId> = (t.n..t.n + failed.len()).collect();
        dc_selection.extend(alive.iter().copied().filter(|id| *id < t.n));
        dc_selection.truncate(t.k);
        if dc_selection.len() < t.k {
            return Err(Error::InvalidSchedule(format!(
                "cannot pick k={} collector contacts from {} instances",
                t.k,
                dc_selection.len()
            )));
        }
        dc_selection.sort_unstable();
        Ok(RepairSchedule {
            events,
            dc_selection,
        })
    }
}

/// Replays a repair schedule into a flow graph.
pub fn build_flow_graph(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    alpha: &Alpha,
    schedule: &RepairSchedule,
) -> Result<FlowGraph> {
    let storage_cap = || match alpha {
        Alpha::Finite(a) => Capacity::Finite(a.clone()),
        Alpha::Unbounded => Capacity::Infinite,
    };
    let mut instances = BTreeMap::new();
    let mut edges = Vec::new();
    let mut active: BTreeSet<NodeId> = BTreeSet::new();
    for id in 0..t.n {
        instances.insert(
            id,
            Instance {
                id,
                cluster: t.cluster_of(id),
                generation: Generation::Initial,
            },
        );
        active.insert(id);
        edges.push(FlowEdge {
            tail: Vertex::Source,
            head: Vertex::In(id),
            capacity: Capacity::Infinite,
            tag: EdgeTag::SourceSeed,
        });
        edges.push(FlowEdge {
            tail: Vertex::In(id),
            head: Vertex::Out(id),
            capacity: storage_cap(),
            tag: EdgeTag::Storage,
        });
    }

    for (step, event) in schedule.events.iter().enumerate() {
        if !active.contains(&event.failed) {
            return Err(Error::InvalidSchedule(format!(
                "step {}: node {} is not active",
                step + 1,
                event.failed
            )));
        }
        if instances.contains_key(&event.newcomer) {
            return Err(Error::InvalidSchedule(format!(
                "step {}: newcomer id {} already exists",
                step + 1,
                event.newcomer
            )));
        }
        let failed_cluster = instances[&event.failed].cluster;
        if event.cluster != failed_cluster {
            return Err(Error::InvalidSchedule(format!(
                "step {}: newcomer declared in cluster {} but node {} lives in cluster {}",
                step + 1,
                event.cluster,
                event.failed,
                failed_cluster
            )));
        }
        active.remove(&event.failed);
        for &helper in &active {
            let same_cluster = instances[&helper].cluster == event.cluster;
            edges.push(FlowEdge {
                tail: Vertex::Out(helper),
                head: Vertex::In(event.newcomer),
                capacity: Capacity::Finite(bw.edge_beta(same_cluster)),
                tag: if same_cluster {
                    EdgeTag::IntraCluster
                } else {
                    EdgeTag::CrossCluster
                },
            });
        }
        edges.push(FlowEdge {
            tail: Vertex::In(event.newcomer),
            head: Vertex::Out(event.newcomer),
            capacity: storage_cap(),
            tag: EdgeTag::Storage,
        });
        instances.insert(
            event.newcomer,
            Instance {
                id: event.newcomer,
                cluster: event.cluster,
                generation: Generation::Newcomer(step + 1),
            },
        );
        active.insert(event.newcomer);
    }

    if schedule.dc_selection.len() != t.k {
        return Err(Error::InvalidSchedule(format!(
            "collector contacts {} instances, expected k={}",
            schedule.dc_selection.len(),
            t.k
        )));
    }
    let distinct: BTreeSet<NodeId> = schedule.dc_selection.iter().copied().collect();
    if distinct.len() != t.k {
        return Err(Error::InvalidSchedule(
            "collector contacts repeat an instance".into(),
        ));
    }
    for &sel in &schedule.dc_selection {
        if !active.contains(&sel) {
            return Err(Error::InvalidSchedule(format!(
                "collector contact {sel} is not active after the last repair"
            )));
        }
        edges.push(FlowEdge {
            tail: Vertex::Out(sel),
            head: Vertex::Collector,
            capacity: Capacity::Infinite,
            tag: EdgeTag::Collect,
        });
    }

    Ok(FlowGraph {
        cluster_count: t.clusters,
        instances,
        edges,
    })
}

/// Storage instances the eavesdropper reads in full (cluster-restricted) or
/// clusters whose cross traffic it records (node-restricted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    Clusters(BTreeSet<ClusterId>),
    Nodes(BTreeSet<NodeId>),
}

/// Zeroes every edge whose contents the adversary observes; the graph keeps
/// its shape so cuts stay comparable before and after.
pub fn apply_eavesdropper(
    g: &FlowGraph,
    adv: &AdversarySpec,
    placement: &Placement,
) -> Result<FlowGraph> {
    let mut out = g.clone();
    match (adv, placement) {
        (
            AdversarySpec::NodeRestricted {
                compromised_clusters,
            },
            Placement::Clusters(clusters),
        ) => {
            if clusters.len() != *compromised_clusters {
                return Err(Error::PlacementViolation(format!(
                    "{} clusters placed, adversary compromises {}",
                    clusters.len(),
                    compromised_clusters
                )));
            }
            for &c in clusters {
                if c >= g.cluster_count {
                    return Err(Error::UnknownCluster(c));
                }
            }
            for edge in &mut out.edges {
                if edge.tag != EdgeTag::CrossCluster {
                    continue;
                }
                let (Vertex::Out(tail), Vertex::In(head)) = (edge.tail, edge.head) else {
                    continue;
                };
                let touches = clusters.contains(&g.instances[&tail].cluster)
                    || clusters.contains(&g.instances[&head].cluster);
                if touches {
                    edge.capacity = Capacity::Finite(Rat::zero());
                }
            }
        }
        (
            AdversarySpec::ClusterRestricted {
                compromised_nodes,
                compromised_clusters,
            },
            Placement::Nodes(nodes),
        ) => {
            if nodes.len() != *compromised_nodes {
                return Err(Error::PlacementViolation(format!(
                    "{} nodes placed, adversary compromises {}",
                    nodes.len(),
                    compromised_nodes
                )));
            }
            let mut spanned = BTreeSet::new();
            for &id in nodes {
                let Some(inst) = g.instances.get(&id) else {
                    return Err(Error::PlacementViolation(format!(
                        "instance {id} does not exist in this graph"
                    )));
                };
                spanned.insert(inst.cluster);
            }
            if spanned.len() > *compromised_clusters {
                return Err(Error::PlacementViolation(format!(
                    "placement spans {} clusters, adversary is confined to {}",
                    spanned.len(),
                    compromised_clusters
                )));
            }
            for edge in &mut out.edges {
                let observed = match (edge.tag, edge.tail, edge.head) {
                    // Everything downloaded by a compromised newcomer.
                    (EdgeTag::IntraCluster | EdgeTag::CrossCluster, _, Vertex::In(head)) => {
                        nodes.contains(&head)
                    }
                    // Everything stored on a compromised instance.
                    (EdgeTag::Storage, Vertex::In(tail), _) => nodes.contains(&tail),
                    _ => false,
                };
                if observed {
                    edge.capacity = Capacity::Finite(Rat::zero());
                }
            }
        }
        _ => {
            return Err(Error::PlacementViolation(
                "placement kind does not match the adversary model".into(),
            ))
        }
    }
    Ok(out)
}

/// Exact min-cut (max-flow) from the source to the collector. A graph with
/// no residual path, including one whose collector edges were all zeroed,
/// reports 0.
pub fn min_cut(g: &FlowGraph) -> Rat {
    let mut vertices: Vec<Vertex> = vec![Vertex::Source, Vertex::Collector];
    for &id in g.instances.keys() {
        vertices.push(Vertex::In(id));
        vertices.push(Vertex::Out(id));
    }
    vertices.sort();
    let index: BTreeMap<Vertex, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i))
        .collect();

    // Any finite value strictly above the sum of finite capacities acts as
    // infinity for cut purposes.
    let finite_sum: Rat = g
        .edges
        .iter()
        .filter_map(|e| match &e.capacity {
            Capacity::Finite(c) => Some(c.clone()),
            Capacity::Infinite => None,
        })
        .fold(Rat::zero(), |a, b| a + b);
    let sentinel = finite_sum + Rat::one();

    let mut net = Dinic::new(vertices.len());
    for edge in &g.edges {
        let cap = match &edge.capacity {
            Capacity::Finite(c) => c.clone(),
            Capacity::Infinite => sentinel.clone(),
        };
        if cap.is_zero() {
            continue;
        }
        net.add_edge(index[&edge.tail], index[&edge.head], cap);
    }
    net.max_flow(index[&Vertex::Source], index[&Vertex::Collector])
}

/// Plain-text edge list, one `tail head capacity tag` line per edge, sorted
/// by (tail, head).
pub fn dump_edges(g: &FlowGraph) -> String {
    let mut lines: Vec<(Vertex, Vertex, String)> = g
        .edges
        .iter()
        .map(|e| {
            (
                e.tail,
                e.head,
                format!("{} {} {} {}", e.tail, e.head, e.capacity, e.tag.label()),
            )
        })
        .collect();
    lines.sort();
    let mut out = String::new();
    for (_, _, line) in lines {
        let _ = writeln!(out, "{line}");
    }
    out
}

/// Dinic max-flow over exact rationals. Graph sizes here are tiny (tens of
/// vertices), so no scaling tricks are needed.
struct Dinic {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<Rat>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: Rat) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(Rat::zero());
    }

    fn max_flow(&mut self, s: usize, t: usize) -> Rat {
        let n = self.adj.len();
        let mut flow = Rat::zero();
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if level[v] == usize::MAX && !self.cap[e].is_zero() {
                        level[v] = level[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                return flow;
            }
            let mut iter = vec![0usize; n];
            loop {
                let pushed = self.push(s, t, None, &level, &mut iter);
                if pushed.is_zero() {
                    break;
                }
                flow += pushed;
            }
        }
    }

    /// DFS one augmenting path; `limit = None` means unlimited (at the source).
    fn push(
        &mut self,
        u: usize,
        t: usize,
        limit: Option<Rat>,
        level: &[usize],
        iter: &mut [usize],
    ) -> Rat {
        if u == t {
            return limit.expect("sink is never the source");
        }
        while iter[u] < self.adj[u].len() {
            let e = self.adj[u][iter[u]];
            let v = self.to[e];
            if !self.cap[e].is_zero() && level[v] == level[u] + 1 {
                let next_limit = match &limit {
                    None => self.cap[e].clone(),
                    Some(l) => l.clone().min(self.cap[e].clone()),
                };
                let pushed = self.push(v, t, Some(next_limit), level, iter);
                if !pushed.is_zero() {
                    self.cap[e] -= &pushed;
                    self.cap[e ^ 1] += &pushed;
                    return pushed;
                }
            }
            iter[u] += 1;
        }
        Rat::zero()
    }
}

/// Builds the adversary-optimal repair history for the split-bandwidth
/// cluster-restricted model, together with the placement that realizes the
/// closed-form bound: `k` failures spread as evenly as possible over
/// clusters, the `compromised_nodes` observed repairs happening first.
pub fn build_worst_case_graph(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    compromised_nodes: usize,
    compromised_clusters: usize,
    alpha: &Alpha,
) -> Result<(FlowGraph, RepairSchedule, Placement)> {
    let (table, _case) = crate::bounds::observed_slot_table(t, compromised_nodes, compromised_clusters)?;
    let n_i = t.cluster_size;

    // Failure budget per cluster: cluster c loses a node in round i exactly
    // when c < (number of clusters failing in round i).
    let round_budget: Vec<usize> = (0..n_i).map(|i| table[i].g).collect();
    let observed_budget: Vec<usize> = (0..n_i).map(|i| table[i].f).collect();

    let mut failures_of = vec![0usize; t.clusters];
    let mut slots = Vec::with_capacity(t.k);

    // Observed repairs first, in round-major order: round i hits the first
    // f(i) affected clusters.
    for &hit in &observed_budget {
        for (c, failed) in failures_of.iter_mut().enumerate().take(hit) {
            slots.push(t.slots_of(c).nth(*failed).expect("cluster exhausted"));
            *failed += 1;
        }
    }
    // Remaining repairs: always hit a cluster with the most surviving nodes
    // among those still owing failures; ties break toward the lowest id.
    let total: usize = round_budget.iter().sum();
    debug_assert_eq!(total, t.k);
    let owed = |c: usize, failures_of: &[usize]| {
        (0..n_i).filter(|&i| round_budget[i] > c).count() > failures_of[c]
    };
    while slots.len() < t.k {
        let c = (0..t.clusters)
            .filter(|&c| owed(c, &failures_of))
            .min_by_key(|&c| (failures_of[c], c))
            .expect("failure budget not exhausted");
        slots.push(t.slots_of(c).nth(failures_of[c]).expect("cluster exhausted"));
        failures_of[c] += 1;
    }

    let schedule = RepairSchedule::consecutive(t, &slots)?;
    let graph = build_flow_graph(t, bw, alpha, &schedule)?;
    let placement = Placement::Nodes((t.n..t.n + compromised_nodes).collect());
    Ok((graph, schedule, placement))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{cluster_restricted_asymmetric_upper, storage_capacity};
    use crate::exact::{rat, ratio};
    use crate::topology::{asymmetric_bandwidth, make_topology, symmetric_bandwidth};

    fn sym(t: &ClusterTopology, gamma: i64) -> BandwidthModel {
        symmetric_bandwidth(t, rat(gamma)).unwrap()
    }

    fn tag_count(g: &FlowGraph, tag: EdgeTag) -> usize {
        g.edges.iter().filter(|e| e.tag == tag).count()
    }

    /// Reference min-cut by enumerating every source-side vertex set. A set
    /// crossed by an infinite edge is not a cut. Only for tiny graphs.
    fn enumerate_min_cut(g: &FlowGraph) -> Rat {
        let free: Vec<Vertex> = g
            .instances
            .keys()
            .flat_map(|&id| [Vertex::In(id), Vertex::Out(id)])
            .collect();
        assert!(free.len() <= 20, "graph too large for cut enumeration");
        let mut best: Option<Rat> = None;
        'mask: for mask in 0u32..1 << free.len() {
            let source_side = |v: Vertex| match v {
                Vertex::Source => true,
                Vertex::Collector => false,
                _ => {
                    let i = free.iter().position(|&u| u == v).unwrap();
                    mask >> i & 1 == 1
                }
            };
            let mut value = Rat::zero();
            for e in &g.edges {
                if source_side(e.tail) && !source_side(e.head) {
                    match &e.capacity {
                        Capacity::Finite(c) => value += c,
                        Capacity::Infinite => continue 'mask,
                    }
                }
            }
            if best.as_ref().is_none_or(|b| value < *b) {
                best = Some(value);
            }
        }
        best.expect("every graph here has some all-finite cut")
    }

    #[test]
    fn single_failure_graph_shape() {
        let t = make_topology(4, 2, 3).unwrap();
        let bw = sym(&t, 3);
        let schedule = RepairSchedule::consecutive(&t, &[0]).unwrap();
        assert_eq!(schedule.dc_selection, vec![1, 2, 4]);
        let g = build_flow_graph(&t, &bw, &Alpha::from_int(10), &schedule).unwrap();

        assert_eq!(g.instances.len(), 5);
        assert_eq!(g.instances[&4].cluster, 0);
        assert_eq!(g.instances[&4].generation, Generation::Newcomer(1));
        assert_eq!(tag_count(&g, EdgeTag::SourceSeed), 4);
        assert_eq!(tag_count(&g, EdgeTag::Storage), 5);
        assert_eq!(tag_count(&g, EdgeTag::Collect), 3);

        let repairs: Vec<&FlowEdge> = g
            .edges
            .iter()
            .filter(|e| matches!(e.tag, EdgeTag::IntraCluster | EdgeTag::CrossCluster))
            .collect();
        assert_eq!(repairs.len(), t.d);
        for e in &repairs {
            assert_eq!(e.head, Vertex::In(4));
            assert_eq!(e.capacity, Capacity::Finite(rat(1)));
        }
        let intra: Vec<Vertex> = repairs
            .iter()
            .filter(|e| e.tag == EdgeTag::IntraCluster)
            .map(|e| e.tail)
            .collect();
        assert_eq!(intra, vec![Vertex::Out(1)]);

        // The tapped survivors saturate their own storage edges, so the
        // newcomer only adds the remaining helper's download.
        let expected = rat(10) + rat(10) + rat(1);
        assert_eq!(min_cut(&g), expected);
        assert_eq!(enumerate_min_cut(&g), expected);
    }

    #[test]
    fn repair_cascade_matches_capacity_formula() {
        let t = make_topology(4, 2, 3).unwrap();
        let bw = sym(&t, 3);
        let schedule = RepairSchedule::consecutive(&t, &[0, 1, 2]).unwrap();
        assert_eq!(schedule.dc_selection, vec![4, 5, 6]);
        for alpha in [Alpha::from_int(10), Alpha::from_int(2), Alpha::finite(ratio(1, 2)).unwrap()] {
            let g = build_flow_graph(&t, &bw, &alpha, &schedule).unwrap();
            let expected = (1..=3)
                .map(|i| alpha.cap(rat(4 - i)))
                .fold(Rat::zero(), |a, b| a + b);
            assert_eq!(min_cut(&g), expected);
            assert_eq!(enumerate_min_cut(&g), expected);
            assert_eq!(storage_capacity(&t, &bw, &alpha).unwrap().value, expected);
        }
    }

    #[test]
    fn empty_schedule_has_no_repair_edges() {
        let t = make_topology(6, 3, 5).unwrap();
        let schedule = RepairSchedule {
            events: Vec::new(),
            dc_selection: vec![0, 1, 2, 3, 4],
        };
        let g = build_flow_graph(&t, &sym(&t, 5), &Alpha::from_int(2), &schedule).unwrap();
        assert_eq!(tag_count(&g, EdgeTag::IntraCluster), 0);
        assert_eq!(tag_count(&g, EdgeTag::CrossCluster), 0);
        assert_eq!(tag_count(&g, EdgeTag::Collect), 5);
        assert_eq!(min_cut(&g), rat(10));
    }

    #[test]
    fn no_failure_full_contact_cuts_all_storage() {
        let t = ClusterTopology {
            n: 4,
            clusters: 2,
            cluster_size: 2,
            k: 4,
            d: 3,
        };
        let schedule = RepairSchedule {
            events: Vec::new(),
            dc_selection: vec![0, 1, 2, 3],
        };
        let g = build_flow_graph(&t, &sym(&t, 3), &Alpha::from_int(2), &schedule).unwrap();
        assert_eq!(min_cut(&g), rat(8));
        assert_eq!(enumerate_min_cut(&g), rat(8));
    }

    #[test]
    fn schedule_validation_names_the_violation() {
        let t = make_topology(6, 3, 5).unwrap();
        let bw = sym(&t, 5);
        let alpha = Alpha::from_int(2);
        let build = |events: Vec<RepairEvent>, dc: Vec<NodeId>| {
            build_flow_graph(
                &t,
                &bw,
                &alpha,
                &RepairSchedule {
                    events,
                    dc_selection: dc,
                },
            )
        };
        let ev = |failed, newcomer, cluster| RepairEvent {
            failed,
            newcomer,
            cluster,
        };

        // Replacement declared in the wrong cluster.
        let err = build(vec![ev(0, 6, 1)], vec![1, 2, 3, 4, 6]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("cluster")));
        // Same node failing twice.
        let err = build(vec![ev(0, 6, 0), ev(0, 7, 0)], vec![2, 3, 4, 6, 7]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("not active")));
        // Newcomer id collides with a live instance.
        let err = build(vec![ev(0, 3, 0)], vec![1, 2, 3, 4, 5]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("exists")));
        // Collector contact counts and liveness.
        let err = build(vec![], vec![0, 1, 2, 3]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("expected k=5")));
        let err = build(vec![], vec![0, 1, 2, 3, 3]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("repeat")));
        let err = build(vec![ev(0, 6, 0)], vec![0, 1, 2, 3, 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(ref m) if m.contains("not active")));

        // The consecutive constructor rejects bad slots up front.
        assert!(RepairSchedule::consecutive(&t, &[6]).is_err());
        assert!(RepairSchedule::consecutive(&t, &[0, 0]).is_err());
    }

    #[test]
    fn node_restricted_zeroing_hits_exactly_the_cross_edges() {
        let t = make_topology(6, 3, 5).unwrap();
        let bw = sym(&t, 5);
        let schedule = RepairSchedule::consecutive(&t, &[2]).unwrap();
        let g = build_flow_graph(&t, &bw, &Alpha::from_int(5), &schedule).unwrap();

        let adv = AdversarySpec::NodeRestricted {
            compromised_clusters: 1,
        };
        let placement = Placement::Clusters([1].into());
        let zeroed = apply_eavesdropper(&g, &adv, &placement).unwrap();

        let mut changed = Vec::new();
        for (before, after) in g.edges.iter().zip(&zeroed.edges) {
            assert_eq!(before.tail, after.tail);
            assert_eq!(before.head, after.head);
            if before.capacity != after.capacity {
                assert_eq!(after.capacity, Capacity::Finite(Rat::zero()));
                changed.push(after);
            }
        }
        // Newcomer 6 lives in cluster 1; its four cross downloads are read,
        // the intra download from its cluster mate is not.
        assert_eq!(changed.len(), 4);
        for e in &changed {
            assert_eq!(e.tag, EdgeTag::CrossCluster);
            assert_eq!(e.head, Vertex::In(6));
        }
        let retained = zeroed
            .edges
            .iter()
            .find(|e| e.tag == EdgeTag::IntraCluster)
            .unwrap();
        assert_eq!(retained.tail, Vertex::Out(3));
        assert_eq!(retained.capacity, Capacity::Finite(rat(1)));

        // An empty compromise leaves the graph untouched.
        let adv0 = AdversarySpec::NodeRestricted {
            compromised_clusters: 0,
        };
        let same = apply_eavesdropper(&g, &adv0, &Placement::Clusters(BTreeSet::new())).unwrap();
        assert_eq!(same.edges, g.edges);
    }

    #[test]
    fn cluster_restricted_zeroing_covers_downloads_and_storage() {
        let t = make_topology(6, 3, 5).unwrap();
        let bw = asymmetric_bandwidth(&t, rat(1), rat(1)).unwrap();
        let schedule = RepairSchedule::consecutive(&t, &[2]).unwrap();
        let g = build_flow_graph(&t, &bw, &Alpha::from_int(5), &schedule).unwrap();

        let adv = AdversarySpec::ClusterRestricted {
            compromised_nodes: 1,
            compromised_clusters: 1,
        };
        let zeroed = apply_eavesdropper(&g, &adv, &Placement::Nodes([6].into())).unwrap();
        let zero_edges: Vec<&FlowEdge> = zeroed
            .edges
            .iter()
            .filter(|e| e.capacity == Capacity::Finite(Rat::zero()))
            .collect();
        assert_eq!(zero_edges.len(), 6);
        assert!(zero_edges
            .iter()
            .all(|e| e.head == Vertex::In(6) || e.tail == Vertex::In(6)));
    }

    #[test]
    fn placement_violations_are_rejected() {
        let t = make_topology(6, 3, 5).unwrap();
        let bw = sym(&t, 5);
        let schedule = RepairSchedule::consecutive(&t, &[0]).unwrap();
        let g = build_flow_graph(&t, &bw, &Alpha::from_int(5), &schedule).unwrap();

        // Three nodes spread over three clusters, adversary confined to two.
        let adv = AdversarySpec::ClusterRestricted {
            compromised_nodes: 3,
            compromised_clusters: 2,
        };
        let err = apply_eavesdropper(&g, &adv, &Placement::Nodes([0, 2, 4].into())).unwrap_err();
        assert!(matches!(err, Error::PlacementViolation(_)));

        // Wrong placement kind for the model.
        let err = apply_eavesdropper(&g, &adv, &Placement::Clusters([0, 1].into())).unwrap_err();
        assert!(matches!(err, Error::PlacementViolation(_)));

        // Cardinality mismatch and unknown ids.
        let nr = AdversarySpec::NodeRestricted {
            compromised_clusters: 2,
        };
        let err = apply_eavesdropper(&g, &nr, &Placement::Clusters([0].into())).unwrap_err();
        assert!(matches!(err, Error::PlacementViolation(_)));
        let nr1 = AdversarySpec::NodeRestricted {
            compromised_clusters: 1,
        };
        let err = apply_eavesdropper(&g, &nr1, &Placement::Clusters([7].into())).unwrap_err();
        assert!(matches!(err, Error::UnknownCluster(7)));
        let cr1 = AdversarySpec::ClusterRestricted {
            compromised_nodes: 1,
            compromised_clusters: 1,
        };
        let err = apply_eavesdropper(&g, &cr1, &Placement::Nodes([9].into())).unwrap_err();
        assert!(matches!(err, Error::PlacementViolation(_)));
    }

    #[test]
    fn zeroed_collector_side_cuts_to_nothing() {
        let t = make_topology(4, 2, 3).unwrap();
        let schedule = RepairSchedule {
            events: Vec::new(),
            dc_selection: vec![0, 1, 2],
        };
        let g = build_flow_graph(&t, &sym(&t, 3), &Alpha::from_int(2), &schedule).unwrap();
        let adv = AdversarySpec::ClusterRestricted {
            compromised_nodes: 3,
            compromised_clusters: 2,
        };
        let zeroed = apply_eavesdropper(&g, &adv, &Placement::Nodes([0, 1, 2].into())).unwrap();
        assert_eq!(min_cut(&zeroed), Rat::zero());
    }

    #[test]
    fn worst_case_graph_reproduces_the_even_spread() {
        let t = make_topology(20, 5, 15).unwrap();
        let bw = asymmetric_bandwidth(&t, rat(1), rat(1)).unwrap();
        let (g, schedule, placement) =
            build_worst_case_graph(&t, &bw, 5, 2, &Alpha::from_int(1)).unwrap();

        let failed: Vec<NodeId> = schedule.events.iter().map(|e| e.failed).collect();
        assert_eq!(failed, vec![0, 4, 1, 5, 2, 8, 12, 9, 13, 6, 10, 14, 3, 7, 11]);

        let mut per_cluster = vec![0usize; t.clusters];
        for &slot in &failed {
            per_cluster[t.cluster_of(slot)] += 1;
        }
        assert_eq!(per_cluster, vec![4, 4, 4, 3, 0]);

        // The five observed repairs come first and stay inside two clusters.
        let observed: BTreeSet<ClusterId> =
            failed[..5].iter().map(|&s| t.cluster_of(s)).collect();
        assert_eq!(observed, [0, 1].into());
        assert_eq!(placement, Placement::Nodes((20..25).collect()));
        assert_eq!(schedule.dc_selection, (20..35).collect::<Vec<_>>());
        assert_eq!(g.instances.len(), 35);
    }

    #[test]
    fn worst_case_graph_with_no_adversary_meets_capacity() {
        let t = make_topology(6, 3, 5).unwrap();
        let bw = asymmetric_bandwidth(&t, rat(1), rat(1)).unwrap();
        let alpha = Alpha::from_int(2);
        let (g, _, placement) = build_worst_case_graph(&t, &bw, 0, 0, &alpha).unwrap();
        let adv = AdversarySpec::ClusterRestricted {
            compromised_nodes: 0,
            compromised_clusters: 0,
        };
        let zeroed = apply_eavesdropper(&g, &adv, &placement).unwrap();
        let bound = cluster_restricted_asymmetric_upper(&t, &bw, 0, 0, &alpha).unwrap();
        assert_eq!(min_cut(&zeroed), bound.value);
        assert_eq!(min_cut(&zeroed), rat(9));
    }

    #[test]
    fn worst_case_graph_small_instance_value() {
        let t = make_topology(4, 2, 2).unwrap();
        let bw = asymmetric_bandwidth(&t, rat(1), rat(1)).unwrap();
        let alpha = Alpha::from_int(5);
        let (g, schedule, placement) = build_worst_case_graph(&t, &bw, 1, 1, &alpha).unwrap();
        assert_eq!(
            schedule.events.iter().map(|e| e.failed).collect::<Vec<_>>(),
            vec![0, 1]
        );
        let adv = AdversarySpec::ClusterRestricted {
            compromised_nodes: 1,
            compromised_clusters: 1,
        };
        let zeroed = apply_eavesdropper(&g, &adv, &placement).unwrap();
        assert_eq!(min_cut(&zeroed), rat(2));
        assert_eq!(enumerate_min_cut(&zeroed), rat(2));
    }

    #[test]
    fn edge_dump_is_sorted_and_complete() {
        let t = make_topology(4, 2, 3).unwrap();
        let schedule = RepairSchedule {
            events: Vec::new(),
            dc_selection: vec![0, 1, 2],
        };
        let g = build_flow_graph(&t, &sym(&t, 3), &Alpha::from_int(2), &schedule).unwrap();
        let dump = dump_edges(&g);
        let expected = "\
source in0 inf seed
source in1 inf seed
source in2 inf seed
source in3 inf seed
in0 out0 2 storage
in1 out1 2 storage
in2 out2 2 storage
in3 out3 2 storage
out0 collector inf collect
out1 collector inf collect
out2 collector inf collect
";
        assert_eq!(dump, expected);
    }
}
