//! Closed-form storage-capacity and secrecy-capacity upper bounds.
//!
//! Every bound is a sum of `min{bandwidth term, alpha}` summands. Results
//! carry the individual summands and a regime diagnostic so callers and
//! tests can compare term-by-term, not just by total.

use crate::error::{Error, Result};
use crate::exact::{rat, rat_u, Alpha, Rat};
use crate::topology::{AdversarySpec, BandwidthModel, ClusterTopology};
use num::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// No summand was cut off by alpha.
    BandwidthLimited,
    /// Every summand was cut off by alpha.
    StorageLimited,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub value: Rat,
    /// Summands `min{term, alpha}` in evaluation order.
    pub per_term: Vec<Rat>,
    pub regime: Regime,
}

fn assemble(terms: Vec<Rat>, alpha: &Alpha) -> BoundResult {
    let truncated = terms.iter().filter(|t| alpha.truncates(t)).count();
    let regime = if truncated == 0 {
        Regime::BandwidthLimited
    } else if truncated == terms.len() {
        Regime::StorageLimited
    } else {
        Regime::Mixed
    };
    let per_term: Vec<Rat> = terms.into_iter().map(|t| alpha.cap(t)).collect();
    let value = per_term.iter().fold(Rat::zero(), |acc, t| acc + t);
    BoundResult {
        value,
        per_term,
        regime,
    }
}

fn symmetric_beta(bw: &BandwidthModel) -> Result<Rat> {
    match bw {
        BandwidthModel::Symmetric { beta, .. } => Ok(beta.clone()),
        BandwidthModel::Asymmetric { .. } => Err(Error::UnsupportedModel(
            "this bound is defined for the uniform bandwidth model".into(),
        )),
    }
}

/// Maximum storable data with no eavesdropper:
/// `sum over i = 1..k of min{(n-i) beta, alpha}`.
pub fn storage_capacity(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    alpha: &Alpha,
) -> Result<BoundResult> {
    let beta = symmetric_beta(bw)?;
    let terms = (1..=t.k).map(|i| rat_u(t.n - i) * &beta).collect();
    Ok(assemble(terms, alpha))
}

/// Secrecy upper bound for `l` observed nodes at repair degree `d`:
/// `sum over i = l+1..k of min{(d-i+1) beta, alpha}`.
///
/// `d` is a free parameter here; with `d = n - 1` it matches
/// [`cluster_restricted_symmetric_upper`] term-by-term.
pub fn unclustered_secrecy_upper(
    n: usize,
    k: usize,
    d: usize,
    l: usize,
    beta: &Rat,
    alpha: &Alpha,
) -> Result<BoundResult> {
    if k == 0 || k >= n {
        return Err(Error::InvalidK { n, k });
    }
    if d < k || d >= n {
        return Err(Error::IndexOutOfRange(format!(
            "repair degree d={d} must satisfy k <= d < n for n={n}, k={k}"
        )));
    }
    if l > k {
        return Err(Error::InvalidL { l, limit: k });
    }
    if beta.is_negative() {
        return Err(Error::NegativeBandwidth);
    }
    let terms = (l + 1..=k).map(|i| rat_u(d - i + 1) * beta).collect();
    Ok(assemble(terms, alpha))
}

/// Secrecy upper bound against an eavesdropper that records the cross-cluster
/// repair traffic of `compromised_clusters` whole clusters.
pub fn node_restricted_upper(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    compromised_clusters: usize,
    alpha: &Alpha,
) -> Result<BoundResult> {
    if compromised_clusters > t.clusters {
        return Err(Error::InvalidLc {
            lc: compromised_clusters,
            clusters: t.clusters,
        });
    }
    let beta = symmetric_beta(bw)?;
    let n_i = t.cluster_size;
    let intra_term = |i: usize| rat_u(n_i - i) * &beta;
    let global_term = |i: usize| rat_u(t.n - i) * &beta;
    let mut terms = Vec::new();
    if n_i * compromised_clusters < t.k {
        for _ in 0..compromised_clusters {
            terms.extend((1..=n_i).map(intra_term));
        }
        terms.extend((n_i * compromised_clusters + 1..=t.k).map(global_term));
    } else {
        for _ in 0..t.k / n_i {
            terms.extend((1..=n_i).map(intra_term));
        }
        terms.extend((1..=t.k % n_i).map(intra_term));
    }
    Ok(assemble(terms, alpha))
}

/// Secrecy upper bound against `compromised_nodes` fully observed nodes under
/// uniform bandwidth. Independent of how many clusters the nodes span.
pub fn cluster_restricted_symmetric_upper(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    compromised_nodes: usize,
    alpha: &Alpha,
) -> Result<BoundResult> {
    if compromised_nodes > t.k {
        return Err(Error::InvalidL {
            l: compromised_nodes,
            limit: t.k,
        });
    }
    let beta = symmetric_beta(bw)?;
    let terms = (compromised_nodes + 1..=t.k)
        .map(|i| rat_u(t.n - i) * &beta)
        .collect();
    Ok(assemble(terms, alpha))
}

/// Which packing rule shaped the observed-slot table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PackingCase {
    /// Few enough compromised clusters that each loses a node in every
    /// round; per-round observations are capped by the cluster budget.
    ClusterLimited,
    /// More compromised clusters than full rounds, with every observed node
    /// fitting inside the wide rounds (the ones repairing `q + 1` clusters).
    WideRounds,
    /// Observed nodes spill past the wide rounds into the narrow ones.
    Overflow,
}

/// Per-failure-round entry of the observed-slot table: round `i` repairs
/// `g(i)` nodes per affected cluster in the worst case, `f(i)` of which are
/// observed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FgEntry {
    pub f: usize,
    pub g: usize,
}

/// Observed-slot table for all rounds `i = 1..=n_I`, plus the case tag.
///
/// `g(i)` counts how many clusters still lose their `i`-th node when `k`
/// failures are spread as evenly as possible; `f(i)` says how many of those
/// round-`i` losses the adversary observes when its `l` nodes are packed
/// densest-first into `compromised_clusters` clusters.
pub fn observed_slot_table(
    t: &ClusterTopology,
    compromised_nodes: usize,
    compromised_clusters: usize,
) -> Result<(Vec<FgEntry>, PackingCase)> {
    AdversarySpec::ClusterRestricted {
        compromised_nodes,
        compromised_clusters,
    }
    .validate(t)?;
    let (l, lc) = (compromised_nodes, compromised_clusters);
    let n_i = t.cluster_size;
    let q = t.k / n_i;
    let r = t.k % n_i;
    let g = |i: usize| if i <= r { q + 1 } else { q };

    // f(i) is a staircase: `full` leading rounds at a cap (lc when cluster
    // limited, g(i) otherwise), one remainder round, zeros after.
    let (case, fill_to_g, full, rem) = if lc <= q {
        let (full, rem) = if l == 0 { (0, 0) } else { (l / lc, l % lc) };
        (PackingCase::ClusterLimited, false, full, rem)
    } else if l <= r * (q + 1) {
        (PackingCase::WideRounds, true, l / (q + 1), l % (q + 1))
    } else {
        let lp = l - r * (q + 1);
        (PackingCase::Overflow, true, r + lp / q, lp % q)
    };

    let mut table = Vec::with_capacity(n_i);
    for i in 1..=n_i {
        let f = if i <= full {
            if fill_to_g {
                g(i)
            } else {
                lc
            }
        } else if i == full + 1 {
            rem
        } else {
            0
        };
        let gi = g(i);
        debug_assert!(f <= gi && f <= lc);
        table.push(FgEntry { f, g: gi });
    }
    debug_assert_eq!(table.iter().map(|e| e.f).sum::<usize>(), l);
    Ok((table, case))
}

/// Point query into the observed-slot table; `i` is 1-based.
pub fn observed_slot_entry(
    i: usize,
    t: &ClusterTopology,
    compromised_nodes: usize,
    compromised_clusters: usize,
) -> Result<(usize, usize, PackingCase)> {
    let (table, case) = observed_slot_table(t, compromised_nodes, compromised_clusters)?;
    if i == 0 || i > table.len() {
        return Err(Error::IndexOutOfRange(format!(
            "round index i={i} outside 1..={}",
            table.len()
        )));
    }
    let e = table[i - 1];
    Ok((e.f, e.g, case))
}

fn x_coeff(t: &ClusterTopology, i: usize) -> Rat {
    if t.cluster_size == 1 {
        // Clusters of one node have no intra traffic at all.
        Rat::zero()
    } else {
        rat_u(t.cluster_size - i) / rat_u(t.cluster_size - 1)
    }
}

fn y_coeff(t: &ClusterTopology, l: usize, fg_table: &[FgEntry], i: usize, j: usize) -> Rat {
    if t.n == t.cluster_size {
        // Single-cluster system: no cross traffic exists, coefficient is inert.
        return Rat::one();
    }
    let prefix: i64 = fg_table[..i - 1]
        .iter()
        .map(|e| e.g as i64 - e.f as i64)
        .sum();
    let numer = (l as i64 - i as i64) + prefix + (j as i64 - fg_table[i - 1].f as i64);
    Rat::one() - rat(numer) / rat_u(t.n - t.cluster_size)
}

/// Bandwidth coefficients for the unobserved repair `(i, j)`: the newcomer
/// downloads `x(i)` of the intra budget and `y*(i, j)` of the cross budget
/// from nodes the adversary has not seen.
pub fn repair_mix_coefficients(
    i: usize,
    j: usize,
    t: &ClusterTopology,
    compromised_nodes: usize,
    fg_table: &[FgEntry],
) -> Result<(Rat, Rat)> {
    let n_i = t.cluster_size;
    if fg_table.len() != n_i {
        return Err(Error::IndexOutOfRange(format!(
            "observed-slot table has {} rounds, topology has {}",
            fg_table.len(),
            n_i
        )));
    }
    if i == 0 || i > n_i {
        return Err(Error::IndexOutOfRange(format!(
            "round index i={i} outside 1..={n_i}"
        )));
    }
    let entry = fg_table[i - 1];
    if j <= entry.f || j > entry.g {
        return Err(Error::IndexOutOfRange(format!(
            "repair index j={j} outside f(i)={}..g(i)={}",
            entry.f, entry.g
        )));
    }
    Ok((
        x_coeff(t, i),
        y_coeff(t, compromised_nodes, fg_table, i, j),
    ))
}

/// Full coefficient bundle for one adversary configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitBoundCoefficients {
    pub f_of_i: Vec<usize>,
    pub g_of_i: Vec<usize>,
    pub x_of_i: Vec<Rat>,
    /// `y_star[i-1][j - f(i) - 1]` for the unobserved repairs of round `i`.
    pub y_star: Vec<Vec<Rat>>,
    /// Observed count beyond the wide rounds; meaningful in the overflow case.
    pub l_prime: i64,
    pub case_tag: PackingCase,
}

pub fn split_bound_coefficients(
    t: &ClusterTopology,
    compromised_nodes: usize,
    compromised_clusters: usize,
) -> Result<SplitBoundCoefficients> {
    let (table, case_tag) = observed_slot_table(t, compromised_nodes, compromised_clusters)?;
    let n_i = t.cluster_size;
    let q = t.k / n_i;
    let r = t.k % n_i;
    let mut x_of_i = Vec::with_capacity(n_i);
    let mut y_star = Vec::with_capacity(n_i);
    for i in 1..=n_i {
        x_of_i.push(x_coeff(t, i));
        y_star.push(
            (table[i - 1].f + 1..=table[i - 1].g)
                .map(|j| y_coeff(t, compromised_nodes, &table, i, j))
                .collect(),
        );
    }
    Ok(SplitBoundCoefficients {
        f_of_i: table.iter().map(|e| e.f).collect(),
        g_of_i: table.iter().map(|e| e.g).collect(),
        x_of_i,
        y_star,
        l_prime: compromised_nodes as i64 - (r * (q + 1)) as i64,
        case_tag,
    })
}

/// Secrecy upper bound against `compromised_nodes` fully observed nodes in
/// at most `compromised_clusters` clusters, under split bandwidth:
/// `sum over i, j of min{x(i) gamma_intra + y*(i,j) gamma_cross, alpha}`.
pub fn cluster_restricted_asymmetric_upper(
    t: &ClusterTopology,
    bw: &BandwidthModel,
    compromised_nodes: usize,
    compromised_clusters: usize,
    alpha: &Alpha,
) -> Result<BoundResult> {
    let (gamma_intra, gamma_cross) = match bw {
        BandwidthModel::Asymmetric {
            gamma_intra,
            gamma_cross,
            ..
        } => (gamma_intra.clone(), gamma_cross.clone()),
        BandwidthModel::Symmetric { .. } => {
            return Err(Error::UnsupportedModel(
                "this bound is defined for the split bandwidth model".into(),
            ))
        }
    };
    let (table, _case) = observed_slot_table(t, compromised_nodes, compromised_clusters)?;
    let mut terms = Vec::new();
    for i in 1..=t.cluster_size {
        for j in table[i - 1].f + 1..=table[i - 1].g {
            let (x, y) = repair_mix_coefficients(i, j, t, compromised_nodes, &table)?;
            terms.push(x * &gamma_intra + y * &gamma_cross);
        }
    }
    Ok(assemble(terms, alpha))
}
