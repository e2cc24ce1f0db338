//! Permutation groups given by generators: exact order via a deterministic
//! Schreier–Sims orbit–stabilizer chain. Group orders grow factorially, so
//! they are returned as big integers.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;

/// A permutation on 0..n as an image table.
pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(p: &Perm) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

/// (a ∘ b)(x) = a[b[x]].
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(p: &Perm) -> Perm {
    let mut inv = vec![0u32; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

/// Stabilizer chain: `stored[i]` holds the strong generators whose sift
/// residue fixes bases 0..i (they entered the chain at depth i). The
/// generating set effective at level j is the union of `stored[j..]`, since
/// every deeper generator also fixes the first j bases.
struct Chain {
    n: usize,
    bases: Vec<u32>,
    stored: Vec<Vec<Perm>>,
    transversals: Vec<HashMap<u32, Perm>>,
    seen: HashSet<Perm>,
}

impl Chain {
    fn new(n: usize) -> Self {
        Chain {
            n,
            bases: Vec::new(),
            stored: Vec::new(),
            transversals: Vec::new(),
            seen: HashSet::new(),
        }
    }

    fn effective_gens(&self, level: usize) -> Vec<&Perm> {
        self.stored[level..].iter().flatten().collect()
    }

    /// Reduce g through successive transversals starting at `start`; returns
    /// the residue and the level where reduction stopped (the residue fixes
    /// all bases before that level).
    fn sift_from(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for i in start..self.bases.len() {
            let img = g[self.bases[i] as usize];
            match self.transversals[i].get(&img) {
                Some(rep) => g = compose(&inverse(rep), &g),
                None => return (g, i),
            }
        }
        (g, self.bases.len())
    }

    /// Record a non-identity residue at its sift depth, opening a new level
    /// when it fixes every existing base. Returns false for duplicates.
    fn store(&mut self, g: Perm, level: usize) -> bool {
        debug_assert!(!is_identity(&g));
        debug_assert!((0..level).all(|i| g[self.bases[i] as usize] == self.bases[i]));
        if !self.seen.insert(g.clone()) {
            return false;
        }
        if level == self.bases.len() {
            let base = g
                .iter()
                .enumerate()
                .find(|&(i, &x)| i as u32 != x)
                .map(|(i, _)| i as u32)
                .expect("non-identity perm moves a point");
            self.bases.push(base);
            self.stored.push(Vec::new());
            self.transversals.push(HashMap::new());
        }
        self.stored[level].push(g);
        true
    }

    /// BFS orbit of base j under the level's effective generators;
    /// deterministic because the queue and generator list have fixed order.
    fn rebuild_orbit(&mut self, level: usize) {
        let mut transversal = HashMap::new();
        transversal.insert(self.bases[level], identity(self.n));
        let mut queue = VecDeque::from([self.bases[level]]);
        let gens: Vec<Perm> = self.effective_gens(level).into_iter().cloned().collect();
        while let Some(p) = queue.pop_front() {
            let rep = transversal[&p].clone();
            for g in &gens {
                let q = g[p as usize];
                if !transversal.contains_key(&q) {
                    transversal.insert(q, compose(g, &rep));
                    queue.push_back(q);
                }
            }
        }
        self.transversals[level] = transversal;
    }

    /// Schreier closure, deepest level first: a level is verified once every
    /// Schreier generator sifts to the identity through the (already
    /// verified) deeper levels. Storing a residue at depth d grows the
    /// effective generator sets of levels ≤ d, so verification restarts at d;
    /// deeper levels stay verified.
    fn establish(&mut self) {
        let mut unverified = self.bases.len();
        while unverified > 0 {
            let level = unverified - 1;
            self.rebuild_orbit(level);
            let mut points: Vec<u32> = self.transversals[level].keys().copied().collect();
            points.sort_unstable();
            let gens: Vec<Perm> = self.effective_gens(level).into_iter().cloned().collect();
            let mut added = None;
            'scan: for p in points {
                let u_p = self.transversals[level][&p].clone();
                for s in &gens {
                    let q = s[p as usize];
                    let u_q = self.transversals[level][&q].clone();
                    let schreier = compose(&inverse(&u_q), &compose(s, &u_p));
                    let (h, depth) = self.sift_from(schreier, level + 1);
                    if !is_identity(&h) && self.store(h, depth) {
                        added = Some(depth);
                        break 'scan;
                    }
                }
            }
            unverified = match added {
                Some(depth) => depth + 1,
                None => level,
            };
        }
        for level in 0..self.bases.len() {
            self.rebuild_orbit(level);
        }
    }

    fn order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for t in &self.transversals {
            order *= BigUint::from(t.len() as u64);
        }
        order
    }
}

/// Order of the group generated by `gens` acting on 0..n.
pub fn permutation_group_order(n: usize, gens: &[Perm]) -> BigUint {
    let mut chain = Chain::new(n);
    for g in gens {
        assert_eq!(g.len(), n, "generator degree mismatch");
        let (h, level) = chain.sift_from(g.clone(), 0);
        if !is_identity(&h) && chain.store(h, level) {
            chain.establish();
        }
    }
    chain.order()
}
