//! Pairwise-repetition storage layout with a coset precode.
//!
//! Every unordered node pair shares one symbol, so any `n - 1` nodes hold
//! the whole file and a newcomer rebuilds its store by receiving exactly the
//! symbol it shares with each helper. Same-cluster pair symbols never cross
//! a cluster boundary during repair; cross-cluster pair symbols are packed
//! through a coset code so that the traffic readable by a node-restricted
//! eavesdropper is statistically independent of the stored message.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use crate::combinatorics::{combinations, vectors};
use crate::error::{Error, Result};
use crate::gf::{next_prime_at_least, Matrix, PrimeField};
use crate::topology::{ClusterId, ClusterTopology, NodeId};

pub type PairId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    /// Both endpoints in one cluster; repairs move it intra-cluster only.
    SameCluster,
    /// Endpoints in different clusters; repairs move it across.
    CrossCluster,
}

impl SymbolClass {
    fn label(self) -> &'static str {
        match self {
            SymbolClass::SameCluster => "intra",
            SymbolClass::CrossCluster => "cross",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolPair {
    /// Endpoints with `a < b`.
    pub a: NodeId,
    pub b: NodeId,
    pub class: SymbolClass,
}

/// Assignment of one symbol per unordered node pair: all same-cluster pairs
/// first, then all cross-cluster pairs, each block in (a, b) lexicographic
/// order. Pair ids index [`CodeLayout::symbols`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeLayout {
    pub n: usize,
    pub clusters: usize,
    pub cluster_size: usize,
    pub symbols: Vec<SymbolPair>,
    /// Number of same-cluster pairs; cross pairs start at this id.
    pub intra_count: usize,
}

/// Builds the layout; requires `k = n - 1` since that is the reconstruction
/// degree this code provides.
pub fn rskr_layout(t: &ClusterTopology) -> Result<CodeLayout> {
    if t.k != t.n - 1 {
        return Err(Error::InvalidK { n: t.n, k: t.k });
    }
    let mut symbols = Vec::with_capacity(t.n * (t.n - 1) / 2);
    for a in 0..t.n {
        for b in a + 1..t.n {
            if t.cluster_of(a) == t.cluster_of(b) {
                symbols.push(SymbolPair {
                    a,
                    b,
                    class: SymbolClass::SameCluster,
                });
            }
        }
    }
    let intra_count = symbols.len();
    for a in 0..t.n {
        for b in a + 1..t.n {
            if t.cluster_of(a) != t.cluster_of(b) {
                symbols.push(SymbolPair {
                    a,
                    b,
                    class: SymbolClass::CrossCluster,
                });
            }
        }
    }
    Ok(CodeLayout {
        n: t.n,
        clusters: t.clusters,
        cluster_size: t.cluster_size,
        symbols,
        intra_count,
    })
}

impl CodeLayout {
    pub fn cluster_of(&self, node: NodeId) -> ClusterId {
        debug_assert!(node < self.n);
        node / self.cluster_size
    }

    pub fn cross_count(&self) -> usize {
        self.symbols.len() - self.intra_count
    }

    /// Pair ids stored on one node, ascending.
    pub fn pairs_of(&self, node: NodeId) -> Vec<PairId> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, p)| p.a == node || p.b == node)
            .map(|(id, _)| id)
            .collect()
    }

    /// Id of the pair shared by two distinct nodes.
    pub fn pair_id(&self, u: NodeId, v: NodeId) -> PairId {
        debug_assert_ne!(u, v);
        let (a, b) = (u.min(v), u.max(v));
        self.symbols
            .iter()
            .position(|p| p.a == a && p.b == b)
            .expect("every unordered pair has a symbol")
    }
}

/// Number of cross-cluster symbols readable when the given clusters'
/// cross traffic is recorded over a repair sequence covering all nodes.
pub fn exposed_t_count(layout: &CodeLayout, compromised: &BTreeSet<ClusterId>) -> Result<usize> {
    for &c in compromised {
        if c >= layout.clusters {
            return Err(Error::UnknownCluster(c));
        }
    }
    Ok(layout.symbols[layout.intra_count..]
        .iter()
        .filter(|p| {
            compromised.contains(&layout.cluster_of(p.a))
                || compromised.contains(&layout.cluster_of(p.b))
        })
        .count())
}

/// Worst-case exposure over every choice of `compromised_clusters` clusters.
/// (Equal-size clusters make every choice expose the same count; the
/// maximum is still taken by enumeration.)
pub fn max_exposed_t_count(layout: &CodeLayout, compromised_clusters: usize) -> Result<usize> {
    if compromised_clusters > layout.clusters {
        return Err(Error::InvalidLc {
            lc: compromised_clusters,
            clusters: layout.clusters,
        });
    }
    let mut max = 0;
    for choice in combinations(layout.clusters, compromised_clusters) {
        let set: BTreeSet<ClusterId> = choice.into_iter().collect();
        max = max.max(exposed_t_count(layout, &set)?);
    }
    Ok(max)
}

/// Symbols that survive eavesdropping: all same-cluster pairs plus the
/// unexposed cross pairs. This is the secure file size the layout achieves.
pub fn secure_symbol_count(layout: &CodeLayout, compromised_clusters: usize) -> Result<usize> {
    Ok(layout.intra_count + layout.cross_count()
        - max_exposed_t_count(layout, compromised_clusters)?)
}

/// Invertible linear precode whose bottom `randomness_len` rows carry
/// uniformly random pad symbols. A codeword is `(message || randomness)`
/// times the generator.
#[derive(Clone, Debug)]
pub struct CosetCode {
    pub field: PrimeField,
    /// Codeword length `N`.
    pub length: usize,
    /// Pad symbols per codeword.
    pub randomness_len: usize,
    generator: Matrix,
    inverse: Matrix,
}

impl CosetCode {
    pub fn message_len(&self) -> usize {
        self.length - self.randomness_len
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// The rows multiplied by the randomness, as their own matrix.
    pub fn randomness_rows(&self) -> Matrix {
        Matrix::from_rows(
            (self.message_len()..self.length)
                .map(|r| self.generator.row(r).to_vec())
                .collect(),
        )
    }

    /// Wraps an arbitrary generator. Only invertibility (decodability) is
    /// checked here; secrecy of a hand-rolled generator must be established
    /// through [`verify_perfect_secrecy`].
    pub fn from_generator(field: PrimeField, randomness_len: usize, generator: Matrix) -> Result<CosetCode> {
        if generator.rows != generator.cols {
            return Err(Error::SizeMismatch(format!(
                "generator is {}x{}, expected square",
                generator.rows, generator.cols
            )));
        }
        let length = generator.rows;
        if randomness_len > length {
            return Err(Error::LengthMismatch(format!(
                "randomness length {randomness_len} exceeds codeword length {length}"
            )));
        }
        let inverse = generator
            .inverse(&field)
            .ok_or_else(|| Error::SizeMismatch("generator is singular".into()))?;
        Ok(CosetCode {
            field,
            length,
            randomness_len,
            generator,
            inverse,
        })
    }
}

/// Standard construction: message rows are the identity on the last
/// `length - randomness_len` coordinates; randomness rows are the
/// Vandermonde powers 0..randomness_len of `length` distinct field points,
/// so every subset of at most `randomness_len` codeword coordinates is
/// padded by a full-rank slice of the randomness.
pub fn build_coset_code(length: usize, randomness_len: usize, q: u64) -> Result<CosetCode> {
    if randomness_len > length {
        return Err(Error::LengthMismatch(format!(
            "randomness length {randomness_len} exceeds codeword length {length}"
        )));
    }
    let field = PrimeField::new(q)?;
    let degenerate = randomness_len == 0 || randomness_len == length;
    if (q as u128) < (length as u128) && !degenerate {
        return Err(Error::FieldTooSmall { q, n: length });
    }
    let message_len = length - randomness_len;

    let mut generator = Matrix::zeros(length, length);
    for i in 0..message_len {
        generator.set(i, randomness_len + i, 1);
    }
    if randomness_len == length && (q as u128) < (length as u128) {
        // No message part and too few points for a Vandermonde: any
        // invertible map works, use the identity.
        for i in 0..length {
            generator.set(message_len + i, i, 1);
        }
    } else {
        // Points 1..=N when the field is big enough to skip zero, else 0..N-1.
        let offset = if q as u128 > length as u128 { 1 } else { 0 };
        for i in 0..randomness_len {
            for j in 0..length {
                generator.set(message_len + i, j, field.pow(j as u64 + offset, i as u64));
            }
        }
    }
    CosetCode::from_generator(field, randomness_len, generator)
}

pub fn coset_encode(code: &CosetCode, message: &[u64], randomness: &[u64]) -> Result<Vec<u64>> {
    if message.len() != code.message_len() {
        return Err(Error::LengthMismatch(format!(
            "message has {} symbols, code expects {}",
            message.len(),
            code.message_len()
        )));
    }
    if randomness.len() != code.randomness_len {
        return Err(Error::LengthMismatch(format!(
            "randomness has {} symbols, code expects {}",
            randomness.len(),
            code.randomness_len
        )));
    }
    let mut input = Vec::with_capacity(code.length);
    input.extend_from_slice(message);
    input.extend_from_slice(randomness);
    Ok(code.generator.left_mul_vec(&input, &code.field))
}

/// Recovers `(message, randomness)` from a full codeword.
pub fn coset_decode(code: &CosetCode, codeword: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    if codeword.len() != code.length {
        return Err(Error::LengthMismatch(format!(
            "codeword has {} symbols, code expects {}",
            codeword.len(),
            code.length
        )));
    }
    let input = code.inverse.left_mul_vec(codeword, &code.field);
    let (message, randomness) = input.split_at(code.message_len());
    Ok((message.to_vec(), randomness.to_vec()))
}

/// The coset code matched to a layout and an adversary budget: codewords
/// cover the cross-cluster symbols, the pad absorbs the worst-case exposure,
/// and the field is the smallest prime of order at least `cross_count + 1`.
pub fn default_coset_code(layout: &CodeLayout, compromised_clusters: usize) -> Result<CosetCode> {
    let length = layout.cross_count();
    let budget = max_exposed_t_count(layout, compromised_clusters)?;
    build_coset_code(length, budget, next_prime_at_least(length as u64 + 1))
}

/// One repair transfer: `helper` sends the pair symbol it shares with the
/// failed node to the newcomer rebuilding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transmission {
    pub helper: NodeId,
    pub newcomer: NodeId,
    pub pair: PairId,
    pub value: u64,
    pub same_cluster: bool,
}

/// A running system: per-node symbol stores plus the repair transcript.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub layout: CodeLayout,
    pub field: PrimeField,
    /// `stores[node][pair] = value` for every pair touching the node.
    pub stores: Vec<BTreeMap<PairId, u64>>,
    pub active: Vec<bool>,
    pub transcript: Vec<Transmission>,
}

/// Encodes a secure message (same-cluster symbols first, then the coset
/// message part) and distributes all pair symbols onto the nodes.
pub fn store_file(
    layout: &CodeLayout,
    compromised_clusters: usize,
    secure_message: &[u64],
    randomness: &[u64],
) -> Result<SystemState> {
    let code = default_coset_code(layout, compromised_clusters)?;
    let expected = layout.intra_count + code.message_len();
    if secure_message.len() != expected {
        return Err(Error::SizeMismatch(format!(
            "secure message has {} symbols, layout stores {}",
            secure_message.len(),
            expected
        )));
    }
    if randomness.len() != code.randomness_len {
        return Err(Error::SizeMismatch(format!(
            "randomness has {} symbols, code pads {}",
            randomness.len(),
            code.randomness_len
        )));
    }
    let q = code.field.q;
    let intra: Vec<u64> = secure_message[..layout.intra_count]
        .iter()
        .map(|v| v % q)
        .collect();
    let message: Vec<u64> = secure_message[layout.intra_count..]
        .iter()
        .map(|v| v % q)
        .collect();
    let randomness: Vec<u64> = randomness.iter().map(|v| v % q).collect();
    let codeword = coset_encode(&code, &message, &randomness)?;

    let value_of = |pair: PairId| {
        if pair < layout.intra_count {
            intra[pair]
        } else {
            codeword[pair - layout.intra_count]
        }
    };
    let mut stores = vec![BTreeMap::new(); layout.n];
    for (pair, symbol) in layout.symbols.iter().enumerate() {
        stores[symbol.a].insert(pair, value_of(pair));
        stores[symbol.b].insert(pair, value_of(pair));
    }
    Ok(SystemState {
        layout: layout.clone(),
        field: code.field,
        stores,
        active: vec![true; layout.n],
        transcript: vec![],
    })
}

impl SystemState {
    /// Marks a node failed without repairing it (fault-injection hook).
    pub fn mark_failed(&mut self, node: NodeId) -> Result<()> {
        if node >= self.layout.n {
            return Err(Error::IndexOutOfRange(format!("node {node} out of range")));
        }
        if !self.active[node] {
            return Err(Error::AlreadyFailed(node));
        }
        self.active[node] = false;
        Ok(())
    }

    /// Plain-text store dump, one `node_id pair_u pair_v class value` line
    /// per stored symbol, sorted by (node, pair).
    pub fn snapshot(&self) -> String {
        let mut out = String::new();
        for (node, store) in self.stores.iter().enumerate() {
            for (&pair, &value) in store {
                let s = self.layout.symbols[pair];
                let _ = writeln!(out, "{node} {} {} {} {value}", s.a, s.b, s.class.label());
            }
        }
        out
    }
}

/// Exact repair: every other node sends the failed node's shared pair
/// symbol; the newcomer's store is rebuilt from those transfers alone.
pub fn repair_node(state: &mut SystemState, failed: NodeId) -> Result<()> {
    if failed >= state.layout.n {
        return Err(Error::IndexOutOfRange(format!("node {failed} out of range")));
    }
    if !state.active[failed] {
        return Err(Error::AlreadyFailed(failed));
    }
    for helper in 0..state.layout.n {
        if helper == failed {
            continue;
        }
        if !state.active[helper] {
            return Err(Error::AlreadyFailed(helper));
        }
    }
    let failed_cluster = state.layout.cluster_of(failed);
    let mut rebuilt = BTreeMap::new();
    for helper in 0..state.layout.n {
        if helper == failed {
            continue;
        }
        let pair = state.layout.pair_id(helper, failed);
        let value = state.stores[helper][&pair];
        state.transcript.push(Transmission {
            helper,
            newcomer: failed,
            pair,
            value,
            same_cluster: state.layout.cluster_of(helper) == failed_cluster,
        });
        rebuilt.insert(pair, value);
    }
    state.stores[failed] = rebuilt;
    Ok(())
}

/// Pair symbols a node-restricted eavesdropper has read off the transcript:
/// every cross-cluster transfer into or out of a compromised cluster.
pub fn eavesdrop_node_restricted(
    state: &SystemState,
    compromised: &BTreeSet<ClusterId>,
) -> Result<BTreeMap<PairId, u64>> {
    for &c in compromised {
        if c >= state.layout.clusters {
            return Err(Error::UnknownCluster(c));
        }
    }
    let mut observed = BTreeMap::new();
    for tx in &state.transcript {
        if tx.same_cluster {
            continue;
        }
        let touches = compromised.contains(&state.layout.cluster_of(tx.helper))
            || compromised.contains(&state.layout.cluster_of(tx.newcomer));
        if touches {
            observed.insert(tx.pair, tx.value);
        }
    }
    Ok(observed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecrecyMode {
    /// Rank certificate: the randomness rows restricted to the observed
    /// coordinates have full column rank for every cluster choice.
    Algebraic,
    /// Literal distribution check: for every cluster choice, the observed
    /// coordinates have the same distribution for every message.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecrecyCheck {
    pub clusters: Vec<ClusterId>,
    /// Observed cross-symbol coordinates (indices into the codeword).
    pub coordinates: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecrecyCertificate {
    pub mode: SecrecyMode,
    pub field_order: u64,
    pub length: usize,
    pub randomness_len: usize,
    pub checks: Vec<SecrecyCheck>,
}

impl fmt::Display for SecrecyCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "perfect secrecy certificate: mode={} q={} length={} randomness={}",
            match self.mode {
                SecrecyMode::Algebraic => "algebraic",
                SecrecyMode::Exhaustive => "exhaustive",
            },
            self.field_order,
            self.length,
            self.randomness_len
        )?;
        for check in &self.checks {
            writeln!(
                f,
                "clusters {:?} coordinates {:?} ok",
                check.clusters, check.coordinates
            )?;
        }
        Ok(())
    }
}

/// Observation coordinate set for one cluster choice.
fn observed_coordinates(layout: &CodeLayout, choice: &[ClusterId]) -> Vec<usize> {
    let set: BTreeSet<ClusterId> = choice.iter().copied().collect();
    layout.symbols[layout.intra_count..]
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            set.contains(&layout.cluster_of(p.a)) || set.contains(&layout.cluster_of(p.b))
        })
        .map(|(coord, _)| coord)
        .collect()
}

/// Proves that no choice of `compromised_clusters` clusters learns anything
/// about the coset message from its observed coordinates.
pub fn verify_perfect_secrecy(
    layout: &CodeLayout,
    compromised_clusters: usize,
    code: &CosetCode,
    mode: SecrecyMode,
) -> Result<SecrecyCertificate> {
    if compromised_clusters > layout.clusters {
        return Err(Error::InvalidLc {
            lc: compromised_clusters,
            clusters: layout.clusters,
        });
    }
    if code.length != layout.cross_count() {
        return Err(Error::LengthMismatch(format!(
            "code length {} does not cover the {} cross symbols",
            code.length,
            layout.cross_count()
        )));
    }
    let q = code.field.q;
    if mode == SecrecyMode::Exhaustive {
        let states = (q as u128).checked_pow(code.length as u32);
        if states.is_none_or(|s| s > 10_000_000) {
            return Err(Error::TooLarge(format!(
                "exhaustive check needs q^N = {q}^{} states, limit is 10^7",
                code.length
            )));
        }
    }

    let mut checks = Vec::new();
    for choice in combinations(layout.clusters, compromised_clusters) {
        let coordinates = observed_coordinates(layout, &choice);
        let violation = || Error::SecrecyViolation {
            clusters: choice.clone(),
            coordinates: coordinates.clone(),
        };
        if coordinates.len() > code.randomness_len {
            // More coordinates observed than the pad can cover: secrecy is
            // impossible, report it as a violation of this cluster choice.
            return Err(violation());
        }
        match mode {
            SecrecyMode::Algebraic => {
                let slice = code.randomness_rows().select_columns(&coordinates);
                if slice.rank(&code.field) != coordinates.len() {
                    return Err(violation());
                }
            }
            SecrecyMode::Exhaustive => {
                let project = |cw: &[u64]| -> Vec<u64> {
                    coordinates.iter().map(|&c| cw[c]).collect()
                };
                let mut reference: Option<BTreeMap<Vec<u64>, usize>> = None;
                for message in vectors(q, code.message_len()) {
                    let mut dist: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
                    for randomness in vectors(q, code.randomness_len) {
                        let cw = coset_encode(code, &message, &randomness)?;
                        *dist.entry(project(&cw)).or_insert(0) += 1;
                    }
                    match &reference {
                        None => reference = Some(dist),
                        Some(r) => {
                            if *r != dist {
                                return Err(violation());
                            }
                        }
                    }
                }
            }
        }
        checks.push(SecrecyCheck {
            clusters: choice,
            coordinates,
        });
    }
    Ok(SecrecyCertificate {
        mode,
        field_order: q,
        length: code.length,
        randomness_len: code.randomness_len,
        checks,
    })
}

/// Reconstructs the full secure message from any `n - 1` active nodes.
pub fn data_collector_decode(
    state: &SystemState,
    nodes: &BTreeSet<NodeId>,
    code: &CosetCode,
) -> Result<Vec<u64>> {
    if nodes.len() != state.layout.n - 1 {
        return Err(Error::InsufficientNodes(format!(
            "{} nodes contacted, need exactly {}",
            nodes.len(),
            state.layout.n - 1
        )));
    }
    for &node in nodes {
        if node >= state.layout.n {
            return Err(Error::InsufficientNodes(format!(
                "node {node} out of range"
            )));
        }
        if !state.active[node] {
            return Err(Error::InsufficientNodes(format!("node {node} has failed")));
        }
    }
    let mut gathered: BTreeMap<PairId, u64> = BTreeMap::new();
    for &node in nodes {
        for (&pair, &value) in &state.stores[node] {
            gathered.insert(pair, value);
        }
    }
    debug_assert_eq!(gathered.len(), state.layout.symbols.len());
    let codeword: Vec<u64> = (0..state.layout.cross_count())
        .map(|j| gathered[&(state.layout.intra_count + j)])
        .collect();
    let (message, _randomness) = coset_decode(code, &codeword)?;
    let mut out: Vec<u64> = (0..state.layout.intra_count).map(|p| gathered[&p]).collect();
    out.extend(message);
    Ok(out)
}
