//! System parameters: equally sized clusters, repair degree fixed at n-1,
//! and the two repair-bandwidth models (uniform and intra/cross split).

use crate::error::{Error, Result};
use crate::exact::{rat_u, Rat};
use num::Signed;

/// Node ids are dense integers; initial nodes occupy `0..n` and newcomers
/// introduced by a repair schedule continue from `n`.
pub type NodeId = usize;
pub type ClusterId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterTopology {
    pub n: usize,
    /// Number of clusters, `L`.
    pub clusters: usize,
    /// Nodes per cluster, `n / L`.
    pub cluster_size: usize,
    /// Reconstruction degree of the data collector.
    pub k: usize,
    /// Helpers per repair; always `n - 1` in this model.
    pub d: usize,
}

pub fn make_topology(n: usize, clusters: usize, k: usize) -> Result<ClusterTopology> {
    if n == 0 || clusters == 0 || !n.is_multiple_of(clusters) {
        return Err(Error::NonDivisible { n, clusters });
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidK { n, k });
    }
    Ok(ClusterTopology {
        n,
        clusters,
        cluster_size: n / clusters,
        k,
        d: n - 1,
    })
}

impl ClusterTopology {
    /// Cluster of an initial storage slot (`0..n`).
    pub fn cluster_of(&self, slot: NodeId) -> ClusterId {
        debug_assert!(slot < self.n);
        slot / self.cluster_size
    }

    /// Initial slots of one cluster, in id order.
    pub fn slots_of(&self, cluster: ClusterId) -> std::ops::Range<NodeId> {
        debug_assert!(cluster < self.clusters);
        cluster * self.cluster_size..(cluster + 1) * self.cluster_size
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BandwidthModel {
    /// Every helper ships `beta = gamma / d`.
    Symmetric { beta: Rat, gamma: Rat },
    /// Helpers in the newcomer's cluster ship `beta_intra`, the rest
    /// `beta_cross`; repair cost splits into the two gamma components.
    Asymmetric {
        beta_intra: Rat,
        beta_cross: Rat,
        gamma_intra: Rat,
        gamma_cross: Rat,
    },
}

impl BandwidthModel {
    /// Total per-repair download.
    pub fn gamma(&self) -> Rat {
        match self {
            BandwidthModel::Symmetric { gamma, .. } => gamma.clone(),
            BandwidthModel::Asymmetric {
                gamma_intra,
                gamma_cross,
                ..
            } => gamma_intra + gamma_cross,
        }
    }

    /// Bandwidth on one helper edge, by locality.
    pub fn edge_beta(&self, same_cluster: bool) -> Rat {
        match self {
            BandwidthModel::Symmetric { beta, .. } => beta.clone(),
            BandwidthModel::Asymmetric {
                beta_intra,
                beta_cross,
                ..
            } => {
                if same_cluster {
                    beta_intra.clone()
                } else {
                    beta_cross.clone()
                }
            }
        }
    }
}

/// Uniform model: each of the `d = n - 1` helpers contributes `gamma / d`.
pub fn symmetric_bandwidth(t: &ClusterTopology, gamma: Rat) -> Result<BandwidthModel> {
    if gamma.is_negative() {
        return Err(Error::NegativeBandwidth);
    }
    let beta = &gamma / rat_u(t.d);
    Ok(BandwidthModel::Symmetric { beta, gamma })
}

/// Split model with `beta_intra >= beta_cross >= 0`.
pub fn asymmetric_bandwidth(
    t: &ClusterTopology,
    beta_intra: Rat,
    beta_cross: Rat,
) -> Result<BandwidthModel> {
    if beta_intra.is_negative() || beta_cross.is_negative() {
        return Err(Error::NegativeBandwidth);
    }
    if beta_cross > beta_intra {
        return Err(Error::OrderViolation);
    }
    let gamma_intra = rat_u(t.cluster_size - 1) * &beta_intra;
    let gamma_cross = rat_u(t.n - t.cluster_size) * &beta_cross;
    Ok(BandwidthModel::Asymmetric {
        beta_intra,
        beta_cross,
        gamma_intra,
        gamma_cross,
    })
}

/// Which repair transfers an eavesdropper may record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversarySpec {
    /// Observes cross-cluster traffic touching any of `compromised_clusters`
    /// whole clusters; intra-cluster traffic stays private.
    NodeRestricted { compromised_clusters: usize },
    /// Observes everything stored by and sent to `compromised_nodes` chosen
    /// nodes, confined to at most `compromised_clusters` clusters.
    ClusterRestricted {
        compromised_nodes: usize,
        compromised_clusters: usize,
    },
}

impl AdversarySpec {
    pub fn compromised_clusters(&self) -> usize {
        match self {
            AdversarySpec::NodeRestricted {
                compromised_clusters,
            }
            | AdversarySpec::ClusterRestricted {
                compromised_clusters,
                ..
            } => *compromised_clusters,
        }
    }

    pub fn validate(&self, t: &ClusterTopology) -> Result<()> {
        match self {
            AdversarySpec::NodeRestricted {
                compromised_clusters,
            } => {
                if *compromised_clusters > t.clusters {
                    return Err(Error::InvalidAdversary(format!(
                        "compromised cluster count {} exceeds cluster count {}",
                        compromised_clusters, t.clusters
                    )));
                }
            }
            AdversarySpec::ClusterRestricted {
                compromised_nodes,
                compromised_clusters,
            } => {
                if *compromised_clusters > t.clusters {
                    return Err(Error::InvalidAdversary(format!(
                        "compromised cluster count {} exceeds cluster count {}",
                        compromised_clusters, t.clusters
                    )));
                }
                if *compromised_nodes > t.k {
                    return Err(Error::InvalidAdversary(format!(
                        "compromised node count {} exceeds reconstruction degree {}",
                        compromised_nodes, t.k
                    )));
                }
                if *compromised_nodes > t.cluster_size * compromised_clusters {
                    return Err(Error::InvalidAdversary(format!(
                        "compromised node count {} does not fit in {} clusters of size {}",
                        compromised_nodes, compromised_clusters, t.cluster_size
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    #[test]
    fn builds_divisible_topologies() {
        let t = make_topology(6, 3, 5).unwrap();
        assert_eq!(
            t,
            ClusterTopology {
                n: 6,
                clusters: 3,
                cluster_size: 2,
                k: 5,
                d: 5
            }
        );
        let t = make_topology(100, 10, 85).unwrap();
        assert_eq!(t.cluster_size, 10);
        assert_eq!(t.d, 99);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            make_topology(6, 4, 5),
            Err(Error::NonDivisible { n: 6, clusters: 4 })
        ));
        assert!(matches!(
            make_topology(6, 3, 6),
            Err(Error::InvalidK { n: 6, k: 6 })
        ));
        assert!(matches!(make_topology(6, 3, 0), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn cluster_lookup_matches_slot_blocks() {
        let t = make_topology(6, 3, 5).unwrap();
        assert_eq!(t.cluster_of(0), 0);
        assert_eq!(t.cluster_of(1), 0);
        assert_eq!(t.cluster_of(2), 1);
        assert_eq!(t.cluster_of(5), 2);
        assert_eq!(t.slots_of(1), 2..4);
    }

    #[test]
    fn symmetric_bandwidth_divides_gamma_by_d() {
        let t = make_topology(6, 3, 5).unwrap();
        match symmetric_bandwidth(&t, rat(5)).unwrap() {
            BandwidthModel::Symmetric { beta, gamma } => {
                assert_eq!(beta, rat(1));
                assert_eq!(gamma, rat(5));
            }
            _ => panic!("expected symmetric model"),
        }
        let t = make_topology(100, 10, 85).unwrap();
        match symmetric_bandwidth(&t, rat(1)).unwrap() {
            BandwidthModel::Symmetric { beta, .. } => assert_eq!(beta, ratio(1, 99)),
            _ => panic!("expected symmetric model"),
        }
        assert!(matches!(
            symmetric_bandwidth(&t, rat(-1)),
            Err(Error::NegativeBandwidth)
        ));
    }

    #[test]
    fn asymmetric_bandwidth_splits_gamma() {
        let t = make_topology(6, 3, 5).unwrap();
        match asymmetric_bandwidth(&t, rat(1), rat(1)).unwrap() {
            BandwidthModel::Asymmetric {
                gamma_intra,
                gamma_cross,
                ..
            } => {
                assert_eq!(gamma_intra, rat(1));
                assert_eq!(gamma_cross, rat(4));
            }
            _ => panic!("expected asymmetric model"),
        }
        // Cross bandwidth zero keeps all repair traffic inside the cluster.
        let t10 = make_topology(100, 10, 85).unwrap();
        match asymmetric_bandwidth(&t10, ratio(1, 9), rat(0)).unwrap() {
            BandwidthModel::Asymmetric {
                gamma_intra,
                gamma_cross,
                ..
            } => {
                assert_eq!(gamma_intra, rat(1));
                assert_eq!(gamma_cross, rat(0));
            }
            _ => panic!("expected asymmetric model"),
        }
        assert!(matches!(
            asymmetric_bandwidth(&t, ratio(1, 2), ratio(7, 10)),
            Err(Error::OrderViolation)
        ));
    }

    #[test]
    fn adversary_validation_enforces_budgets() {
        let t = make_topology(6, 3, 5).unwrap();
        assert!(AdversarySpec::NodeRestricted {
            compromised_clusters: 3
        }
        .validate(&t)
        .is_ok());
        assert!(AdversarySpec::NodeRestricted {
            compromised_clusters: 4
        }
        .validate(&t)
        .is_err());
        assert!(AdversarySpec::ClusterRestricted {
            compromised_nodes: 2,
            compromised_clusters: 1
        }
        .validate(&t)
        .is_ok());
        // l = 3 cannot fit inside one cluster of size 2.
        assert!(AdversarySpec::ClusterRestricted {
            compromised_nodes: 3,
            compromised_clusters: 1
        }
        .validate(&t)
        .is_err());
        assert!(AdversarySpec::ClusterRestricted {
            compromised_nodes: 6,
            compromised_clusters: 3
        }
        .validate(&t)
        .is_err());
    }
}
