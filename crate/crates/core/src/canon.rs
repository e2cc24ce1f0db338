//! Canonical forms for colored graphs by individualization–refinement, and the
//! design/Hadamard certificates built on top.
//!
//! One engine serves every consumer: incidence structures reduce to bipartite
//! graphs with points and blocks in separate color classes; ±1 matrices reduce
//! to the standard 4m-vertex graph with two vertices per row and per column.
//! Two objects are isomorphic (resp. Hadamard-equivalent) iff their
//! certificate bytes agree. Automorphisms discovered as collisions between
//! search-tree leaves are collected and fed to an orbit–stabilizer chain for
//! the exact group order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::bitset::Bitset;
use crate::design::IncidenceStructure;
use crate::error::{Error, Result};
use crate::group::{self, Perm};
use crate::hadamard::SignMatrix;

/// Undirected loop-free graph with vertex colors. Isomorphisms must preserve
/// colors, so the initial partition of the search is the color classes.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    n: usize,
    adj: Vec<Bitset>,
    colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(n: usize, colors: Vec<u32>) -> Self {
        assert_eq!(colors.len(), n);
        ColoredGraph {
            n,
            adj: vec![Bitset::new(n); n],
            colors,
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "loops are not supported");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bipartite reduction of an incidence structure: vertices 0..v are the
    /// points (color 0), vertices v..v+b the blocks (color 1).
    pub fn from_incidence(inc: &IncidenceStructure) -> Self {
        let (v, b) = (inc.v(), inc.b());
        let mut colors = vec![0u32; v];
        colors.extend(std::iter::repeat(1u32).take(b));
        let mut g = ColoredGraph::new(v + b, colors);
        for block in 0..b {
            for p in inc.row(block).ones() {
                g.add_edge(p, v + block);
            }
        }
        g
    }

    /// The 4m-vertex graph of a ±1 matrix: vertices 2i/2i+1 are row i taken
    /// positively/negatively (color 0), vertices 2m+2j/2m+2j+1 the columns
    /// (color 1); entry +1 joins equal signs, −1 opposite signs. Color-
    /// preserving graph isomorphisms are exactly the monomial (signed
    /// row/column permutation) equivalences.
    pub fn from_sign_matrix(h: &SignMatrix) -> Self {
        let m = h.order();
        let row = |i: usize, neg: usize| 2 * i + neg;
        let col = |j: usize, neg: usize| 2 * m + 2 * j + neg;
        let mut colors = vec![0u32; 2 * m];
        colors.extend(std::iter::repeat(1u32).take(2 * m));
        let mut g = ColoredGraph::new(4 * m, colors);
        for i in 0..m {
            for j in 0..m {
                if h.entry(i, j) > 0 {
                    g.add_edge(row(i, 0), col(j, 0));
                    g.add_edge(row(i, 1), col(j, 1));
                } else {
                    g.add_edge(row(i, 0), col(j, 1));
                    g.add_edge(row(i, 1), col(j, 0));
                }
            }
        }
        g
    }
}

/// Result of canonizing a colored graph.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    /// Canonical byte string; equal bytes ⟺ color-preserving isomorphism.
    pub bytes: Vec<u8>,
    /// Canonical labeling: position → original vertex.
    pub labeling: Vec<u32>,
    /// Exact automorphism group order.
    pub group_order: BigUint,
    /// Automorphism generators discovered during the search.
    pub generators: Vec<Perm>,
}

/// Canonical certificate: compared by bytes, reported as digest + group order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    bytes: Vec<u8>,
    group_order: BigUint,
}

impl Certificate {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn group_order(&self) -> &BigUint {
        &self.group_order
    }

    /// Lowercase hex SHA-256 of the canonical bytes.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(&self.bytes);
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Refinement

type Cells = Vec<Vec<u32>>;

#[inline]
fn fnv_mix(h: &mut u64, x: u64) {
    *h ^= x;
    *h = h.wrapping_mul(0x100000001b3);
}

/// Sparse signature of `v` against the current partition: sorted
/// (cell, neighbor count) pairs.
fn signature(g: &ColoredGraph, cell_of: &[u32], v: u32) -> Vec<(u32, u32)> {
    let mut nb: Vec<u32> = g.adj[v as usize].ones().map(|u| cell_of[u]).collect();
    nb.sort_unstable();
    let mut sig: Vec<(u32, u32)> = Vec::new();
    for c in nb {
        match sig.last_mut() {
            Some(last) if last.0 == c => last.1 += 1,
            _ => sig.push((c, 1)),
        }
    }
    sig
}

/// Refinement to the coarsest stable ordered partition, by iterated splitting
/// against one splitter cell at a time (worklist style). Splitting a cell
/// orders its parts by ascending neighbor count in the splitter, so the final
/// cell order depends only on the graph and the initial partition. Returns a
/// 64-bit invariant of the stable partition (cell sizes plus the quotient-
/// degree matrix), which is identical for isomorphic graphs and cheap to
/// compare along search paths.
///
/// Every newly created part is enqueued as a splitter snapshot. Uniformity
/// against a set is inherited by subsets, so once a snapshot of each final
/// cell has been processed the partition is equitable.
#[cfg(test)]
pub(crate) static REFINE_CALLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

fn refine(g: &ColoredGraph, cells: &mut Cells) -> u64 {
    #[cfg(test)]
    REFINE_CALLS.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    // Cells live in a slab with stable ids; `order` lists ids in partition
    // order so splits can insert parts without disturbing other ids.
    // Splitters travel as bitmasks: the count of a vertex against a splitter
    // is one AND+popcount over its adjacency row.
    let mask_of = |part: &[u32]| Bitset::from_indices(g.n, part.iter().map(|&v| v as usize));
    let mut slab: Vec<Vec<u32>> = std::mem::take(cells);
    let mut order: Vec<u32> = (0..slab.len() as u32).collect();
    let mut queue: std::collections::VecDeque<Bitset> =
        slab.iter().map(|cell| mask_of(cell)).collect();
    while let Some(splitter) = queue.pop_front() {
        let ids: Vec<u32> = order.clone();
        for id in ids {
            if slab[id as usize].len() == 1 {
                continue;
            }
            let mut keyed: Vec<(u32, u32)> = slab[id as usize]
                .iter()
                .map(|&v| (g.adj[v as usize].intersection_count(&splitter) as u32, v))
                .collect();
            keyed.sort_unstable();
            if keyed[0].0 == keyed[keyed.len() - 1].0 {
                continue;
            }
            let mut parts: Vec<Vec<u32>> = Vec::new();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    parts.push(keyed[start..i].iter().map(|kv| kv.1).collect());
                    start = i;
                }
            }
            // The first part keeps the id; later parts get fresh ids spliced
            // in right after it. Every part except the largest becomes a
            // future splitter: counts against the parent (already queued or
            // processed) and the other parts determine counts against the
            // largest, so it can be skipped (Hopcroft's trick).
            let largest = parts
                .iter()
                .enumerate()
                .max_by_key(|(i, p)| (p.len(), std::cmp::Reverse(*i)))
                .map(|(i, _)| i)
                .unwrap();
            let pos = order.iter().position(|&x| x == id).unwrap();
            for (extra, part) in parts.iter().enumerate() {
                if extra != largest {
                    queue.push_back(mask_of(part));
                }
                if extra > 0 {
                    order.insert(pos + extra, slab.len() as u32);
                    slab.push(part.clone());
                }
            }
            slab[id as usize] = parts.swap_remove(0);
        }
    }
    *cells = order
        .iter()
        .map(|&id| std::mem::take(&mut slab[id as usize]))
        .collect();

    // The partition is now equitable: any representative sees the same cell
    // counts as its whole cell.
    let mut cell_of = vec![0u32; g.n];
    for (ci, cell) in cells.iter().enumerate() {
        for &v in cell {
            cell_of[v as usize] = ci as u32;
        }
    }
    let mut h = 0xcbf29ce484222325u64;
    fnv_mix(&mut h, cells.len() as u64);
    for cell in cells.iter() {
        fnv_mix(&mut h, cell.len() as u64);
        for (c, cnt) in signature(g, &cell_of, cell[0]) {
            fnv_mix(&mut h, (u64::from(c) << 32) | u64::from(cnt));
        }
        fnv_mix(&mut h, u64::MAX);
    }
    h
}

/// First largest non-singleton cell, or None when the partition is discrete.
/// Large target cells give the refinement the most information per
/// individualization on the very regular graphs seen here; any rule that
/// depends only on the partition shape preserves canonicity.
fn target_cell(cells: &Cells) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (i, cell) in cells.iter().enumerate() {
        if cell.len() > 1 && best.map_or(true, |(_, len)| cell.len() > len) {
            best = Some((i, cell.len()));
        }
    }
    best.map(|(i, _)| i)
}

fn pack_adjacency(g: &ColoredGraph, labeling: &[u32]) -> Vec<u8> {
    let n = g.n;
    let mut bytes = vec![0u8; (n * (n - 1) / 2 + 7) / 8];
    let mut bit = 0usize;
    for p in 0..n {
        let row = &g.adj[labeling[p] as usize];
        for q in (p + 1)..n {
            if row.contains(labeling[q] as usize) {
                bytes[bit / 8] |= 1 << (bit % 8);
            }
            bit += 1;
        }
    }
    bytes
}

// ---------------------------------------------------------------------------
// Search

struct BestLeaf {
    path: Vec<u64>,
    bytes: Vec<u8>,
    labeling: Vec<u32>,
    prefix: Vec<u32>,
}

struct FirstLeaf {
    bytes: Vec<u8>,
    labeling: Vec<u32>,
    prefix: Vec<u32>,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    /// The first leaf ever reached; kept forever as the collision anchor, so
    /// automorphic copies of its subtree are recognized when they reproduce
    /// its labeled graph.
    first: Option<FirstLeaf>,
    best: Option<BestLeaf>,
    generators: Vec<Perm>,
}

enum Flow {
    Continue,
    /// Unwind to the node at this depth and resume its sibling loop.
    Backjump(usize),
}

/// Union-find over vertices, seeded with the generators that fix `prefix`
/// pointwise; used to skip branch vertices equivalent to an explored sibling.
struct Orbits {
    parent: Vec<u32>,
}

impl Orbits {
    fn new(n: usize, generators: &[Perm], prefix: &[u32]) -> Self {
        let mut o = Orbits {
            parent: (0..n as u32).collect(),
        };
        for g in generators {
            if prefix.iter().all(|&v| g[v as usize] == v) {
                for v in 0..n as u32 {
                    o.union(v, g[v as usize]);
                }
            }
        }
        o
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra) as usize] = ra.min(rb);
        }
    }
}

impl<'g> Search<'g> {
    fn dfs(&mut self, mut cells: Cells, path: &mut Vec<u64>, prefix: &mut Vec<u32>) -> Flow {
        let depth = prefix.len();
        let inv = refine(self.g, &mut cells);
        path.push(inv);

        if let Some(best) = &self.best {
            let d = path.len() - 1;
            if d >= best.path.len() {
                // Deeper than the best leaf with an equal prefix can only
                // happen under hash collisions; treat as worse.
                path.pop();
                return Flow::Continue;
            }
            match inv.cmp(&best.path[d]) {
                std::cmp::Ordering::Less => {
                    path.pop();
                    return Flow::Continue;
                }
                std::cmp::Ordering::Greater => self.best = None,
                std::cmp::Ordering::Equal => {}
            }
        }

        let Some(target) = target_cell(&cells) else {
            let flow = self.handle_leaf(&cells, path, prefix);
            path.pop();
            return flow;
        };

        let candidates = cells[target].clone();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbits: Option<(usize, Orbits)> = None;
        for &v in &candidates {
            if !explored.is_empty() {
                // Rebuild stabilizer orbits when new generators appeared.
                let stale = orbits
                    .as_ref()
                    .map_or(true, |(count, _)| *count != self.generators.len());
                if stale {
                    orbits = Some((
                        self.generators.len(),
                        Orbits::new(self.g.n, &self.generators, prefix),
                    ));
                }
                let uf = &mut orbits.as_mut().unwrap().1;
                if explored.iter().any(|&u| uf.find(u) == uf.find(v)) {
                    continue;
                }
            }
            explored.push(v);

            let mut child = Vec::with_capacity(cells.len() + 1);
            for (ci, cell) in cells.iter().enumerate() {
                if ci == target {
                    child.push(vec![v]);
                    child.push(cell.iter().copied().filter(|&u| u != v).collect());
                } else {
                    child.push(cell.clone());
                }
            }

            prefix.push(v);
            let flow = self.dfs(child, path, prefix);
            prefix.pop();
            if let Flow::Backjump(level) = flow {
                if level < depth {
                    path.pop();
                    return Flow::Backjump(level);
                }
            }
        }
        path.pop();
        Flow::Continue
    }

    fn handle_leaf(&mut self, cells: &Cells, path: &[u64], prefix: &[u32]) -> Flow {
        let labeling: Vec<u32> = cells.iter().map(|c| c[0]).collect();
        let bytes = pack_adjacency(self.g, &labeling);

        // Same labeled graph as the first or the best leaf: the position-wise
        // match of the two labelings is an automorphism.
        let anchor = match &self.first {
            Some(first) if first.bytes == bytes => Some((&first.labeling, &first.prefix)),
            _ => match &self.best {
                Some(best) if best.bytes == bytes => Some((&best.labeling, &best.prefix)),
                _ => None,
            },
        };
        if let Some((other_labeling, other_prefix)) = anchor {
            let mut pos = vec![0u32; self.g.n];
            for (p, &v) in labeling.iter().enumerate() {
                pos[v as usize] = p as u32;
            }
            let gamma: Perm = (0..self.g.n)
                .map(|v| other_labeling[pos[v] as usize])
                .collect();
            let lca = prefix
                .iter()
                .zip(other_prefix)
                .take_while(|(a, b)| a == b)
                .count();
            if !group::is_identity(&gamma) {
                self.generators.push(gamma);
                return Flow::Backjump(lca);
            }
            return Flow::Continue;
        }

        if self.first.is_none() {
            self.first = Some(FirstLeaf {
                bytes: bytes.clone(),
                labeling: labeling.clone(),
                prefix: prefix.to_vec(),
            });
        }
        let replace = match &self.best {
            None => true,
            Some(best) => bytes > best.bytes,
        };
        if replace {
            self.best = Some(BestLeaf {
                path: path.to_vec(),
                bytes,
                labeling,
                prefix: prefix.to_vec(),
            });
        }
        Flow::Continue
    }
}

/// Canonize a colored graph. Deterministic; for isomorphic inputs the
/// resulting bytes are identical.
pub fn canonical_form(g: &ColoredGraph) -> CanonicalForm {
    let mut by_color: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for v in 0..g.n as u32 {
        by_color.entry(g.colors[v as usize]).or_default().push(v);
    }
    let cells: Cells = by_color.values().cloned().collect();

    let mut search = Search {
        g,
        first: None,
        best: None,
        generators: Vec::new(),
    };
    if g.n > 0 {
        search.dfs(cells, &mut Vec::new(), &mut Vec::new());
    }

    // Certificate header: size and color layout, then canonical adjacency.
    let mut bytes = Vec::new();
    bytes.extend((g.n as u32).to_be_bytes());
    bytes.extend((by_color.len() as u32).to_be_bytes());
    for class in by_color.values() {
        bytes.extend((class.len() as u32).to_be_bytes());
    }
    let (labeling, leaf_bytes) = match search.best {
        Some(best) => (best.labeling, best.bytes),
        None => (Vec::new(), Vec::new()),
    };
    bytes.extend(&leaf_bytes);

    let group_order = group::permutation_group_order(g.n, &search.generators);
    CanonicalForm {
        bytes,
        labeling,
        group_order,
        generators: search.generators,
    }
}

// ---------------------------------------------------------------------------
// Seed colorings
//
// The refinement above is one-dimensional: it only counts neighbors per cell.
// Designs with constant block size, replication and pair degree look
// completely homogeneous to it (and ±1 matrices of 2-designs even more so),
// which forces the search to branch on every vertex near the root. Seeding
// the initial colors with a cheap higher-order invariant — triple
// intersection numbers for incidence structures, 4-subset profiles for sign
// matrices — splits the classes up front whenever the invariant varies at
// all, at a cost of a few million word operations even at order 100.

/// Rank each key among the distinct sorted keys; equal keys share a rank.
fn rank_colors<K: Ord + Clone>(keys: &[K], offset: u32) -> (Vec<u32>, u32) {
    let mut distinct: Vec<&K> = keys.iter().collect();
    distinct.sort();
    distinct.dedup();
    let colors = keys
        .iter()
        .map(|k| offset + distinct.binary_search(&k).unwrap() as u32)
        .collect();
    (colors, offset + distinct.len() as u32)
}

/// Multiset of triple intersection sizes |rows[x] ∩ rows[y] ∩ rows[z]| seen
/// from each x, as a sorted key per index.
fn triple_keys(rows: &[Bitset]) -> Vec<Vec<u32>> {
    let n = rows.len();
    let mut keys: Vec<Vec<u32>> = vec![Vec::new(); n];
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            let mut xy = rows[x].clone();
            xy.and_with(&rows[y]);
            for z in (y + 1)..n {
                if z == x {
                    continue;
                }
                keys[x].push(xy.intersection_count(&rows[z]) as u32);
            }
        }
        keys[x].sort_unstable();
    }
    keys
}

/// Seed colors for the bipartite design graph: points keyed by their triple
/// intersection multiset, blocks dually, kept in disjoint color ranges.
fn incidence_seed_colors(inc: &IncidenceStructure) -> Vec<u32> {
    let point_rows: Vec<Bitset> = (0..inc.v()).map(|p| inc.point_row(p)).collect();
    let block_rows: Vec<Bitset> = (0..inc.b()).map(|i| inc.row(i).clone()).collect();
    let (mut colors, next) = rank_colors(&triple_keys(&point_rows), 0);
    colors.extend(rank_colors(&triple_keys(&block_rows), next).0);
    colors
}

/// Per-row 4-subset profile of a ±1 matrix: the multiset over quadruples
/// {i,k,l,m} ∋ row of |Σ_j h_ij h_kj h_lj h_mj|. Row/column negations and
/// permutations all preserve it (negating one row flips the sign of the sum,
/// negating one column multiplies each product by (−1)⁴).
fn profile_keys(rows: &[Bitset], m: usize) -> Vec<Vec<u32>> {
    let n = rows.len();
    let mut keys: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for k in (i + 1)..n {
            let mut ik = rows[i].clone();
            ik.xor_with(&rows[k]);
            for l in (k + 1)..n {
                let mut ikl = ik.clone();
                ikl.xor_with(&rows[l]);
                for mm in (l + 1)..n {
                    let mut z = ikl.clone();
                    z.xor_with(&rows[mm]);
                    let value = (m as i64 - 2 * z.count() as i64).unsigned_abs() as u32;
                    keys[i].push(value);
                    keys[k].push(value);
                    keys[l].push(value);
                    keys[mm].push(value);
                }
            }
        }
    }
    for key in &mut keys {
        key.sort_unstable();
    }
    keys
}

/// Seed colors for the 4m-vertex graph: the two signed copies of a row share
/// its profile color, columns likewise in a disjoint range.
fn sign_matrix_seed_colors(h: &SignMatrix) -> Vec<u32> {
    let m = h.order();
    let row_bits: Vec<Bitset> = (0..m).map(|i| h.row_bits(i).clone()).collect();
    let col_bits: Vec<Bitset> = (0..m)
        .map(|j| Bitset::from_indices(m, (0..m).filter(|&i| h.entry(i, j) > 0)))
        .collect();
    let (row_colors, next) = rank_colors(&profile_keys(&row_bits, m), 0);
    let (col_colors, _) = rank_colors(&profile_keys(&col_bits, m), next);
    let mut colors = Vec::with_capacity(4 * m);
    for c in row_colors {
        colors.push(c);
        colors.push(c);
    }
    for c in col_colors {
        colors.push(c);
        colors.push(c);
    }
    colors
}

// ---------------------------------------------------------------------------
// Design- and Hadamard-level wrappers

/// Canonical certificate of an incidence structure (points and blocks
/// colored apart). Equal certificates ⟺ isomorphic structures.
pub fn design_certificate(inc: &IncidenceStructure) -> Certificate {
    let mut g = ColoredGraph::from_incidence(inc);
    g.colors = incidence_seed_colors(inc);
    let form = canonical_form(&g);
    Certificate {
        bytes: form.bytes,
        group_order: form.group_order,
    }
}

/// Isomorphism test via cheap invariants first, certificates second.
pub fn are_isomorphic(a: &IncidenceStructure, b: &IncidenceStructure) -> bool {
    if a.v() != b.v() || a.b() != b.b() {
        return false;
    }
    let sizes = |inc: &IncidenceStructure| {
        let mut s: Vec<usize> = (0..inc.b()).map(|i| inc.block_size(i)).collect();
        s.sort_unstable();
        s
    };
    let degrees = |inc: &IncidenceStructure| {
        let mut d: Vec<usize> = (0..inc.v()).map(|p| inc.point_degree(p)).collect();
        d.sort_unstable();
        d
    };
    if sizes(a) != sizes(b) || degrees(a) != degrees(b) {
        return false;
    }
    design_certificate(a).bytes == design_certificate(b).bytes
}

/// |Aut| of the incidence structure (pairs of point/block permutations).
pub fn aut_group_order(inc: &IncidenceStructure) -> BigUint {
    design_certificate(inc).group_order
}

/// A symmetric design is self-dual iff it is isomorphic to its dual.
pub fn is_self_dual(inc: &IncidenceStructure) -> Result<bool> {
    if inc.v() != inc.b() {
        return Err(Error::NotSymmetric {
            v: inc.v(),
            b: inc.b(),
        });
    }
    Ok(are_isomorphic(inc, &inc.dual()))
}

/// Hadamard-equivalence certificate of a ±1 matrix via the 4m-vertex graph.
/// Equal certificates ⟺ equal up to row/column negations and permutations.
pub fn hadamard_certificate(h: &SignMatrix) -> Result<Certificate> {
    if let Some((row_a, row_b)) = h.orthogonality_violation() {
        return Err(Error::NotHadamard { row_a, row_b });
    }
    let mut g = ColoredGraph::from_sign_matrix(h);
    g.colors = sign_matrix_seed_colors(h);
    let form = canonical_form(&g);
    Ok(Certificate {
        bytes: form.bytes,
        group_order: form.group_order,
    })
}
