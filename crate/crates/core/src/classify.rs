//! Classification of design collections: isomorphism classes by canonical
//! certificate, with automorphism group orders, p-ranks, self-duality and
//! Hadamard equivalence rolled into one deterministic report.

use crate::canon::{design_certificate, hadamard_certificate};
use crate::design::{validate_2design, DesignParams, IncidenceStructure};
use crate::error::Result;
use crate::gf::{check_prime, p_rank};
use crate::hadamard::menon_to_hadamard;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Everything computed for a single input design.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignRecord {
    /// Position in the input stream.
    pub index: usize,
    pub params: DesignParams,
    /// Canonical certificate digest; equal digest = isomorphic.
    pub digest: String,
    /// |Aut| in decimal (may exceed u64).
    pub aut_order: String,
    pub p_ranks: BTreeMap<u64, usize>,
    /// None for non-symmetric designs.
    pub self_dual: Option<bool>,
    /// Digest of the ±1 matrix (incident ↦ −1) under monomial equivalence,
    /// present when that matrix is Hadamard.
    pub hadamard_digest: Option<String>,
}

/// One isomorphism class: its representative record plus the input indices
/// that landed in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignClass {
    pub representative: DesignRecord,
    pub members: Vec<usize>,
}

impl DesignClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Deterministic classification report: classes sorted by digest, histograms
/// taken over class representatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub designs: usize,
    pub classes: Vec<DesignClass>,
    /// Class count per |Aut| (decimal string), over representatives.
    pub aut_histogram: BTreeMap<String, usize>,
    /// prime ↦ (rank ↦ class count), over representatives.
    pub rank_histograms: BTreeMap<u64, BTreeMap<usize, usize>>,
    /// Classes whose representative is self-dual.
    pub self_dual_classes: usize,
    /// Distinct Hadamard certificates among representatives that have one.
    pub hadamard_classes: usize,
}

impl ClassificationReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Classify `designs` up to isomorphism. Every design is validated and every
/// prime checked before any heavy work; records are computed in parallel.
pub fn classify_designs(
    designs: &[IncidenceStructure],
    primes: &[u64],
) -> Result<ClassificationReport> {
    for p in primes {
        check_prime(*p)?;
    }
    for inc in designs {
        validate_2design(inc)?;
    }

    let records: Vec<DesignRecord> = designs
        .par_iter()
        .enumerate()
        .map(|(index, inc)| design_record(index, inc, primes))
        .collect::<Result<_>>()?;

    let mut by_digest: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for rec in &records {
        by_digest.entry(&rec.digest).or_default().push(rec.index);
    }
    let mut classes: Vec<DesignClass> = by_digest
        .into_values()
        .map(|members| DesignClass {
            representative: records[members[0]].clone(),
            members,
        })
        .collect();

    // Hadamard certificates are the most expensive invariant, and isomorphic
    // designs always produce equivalent ±1 matrices, so one per class is
    // enough.
    let hadamard_digests_per_class: Vec<Option<String>> = classes
        .par_iter()
        .map(|class| {
            let rep = &class.representative;
            if !rep.params.is_symmetric() {
                return None;
            }
            menon_to_hadamard(&designs[rep.index]).ok().map(|h| {
                hadamard_certificate(&h)
                    .expect("conversion output is Hadamard")
                    .digest()
            })
        })
        .collect();
    for (class, digest) in classes.iter_mut().zip(hadamard_digests_per_class) {
        class.representative.hadamard_digest = digest;
    }

    let mut aut_histogram = BTreeMap::new();
    let mut rank_histograms: BTreeMap<u64, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut self_dual_classes = 0;
    let mut hadamard_digests = std::collections::BTreeSet::new();
    for class in &classes {
        let rep = &class.representative;
        *aut_histogram.entry(rep.aut_order.clone()).or_insert(0) += 1;
        for (&p, &rank) in &rep.p_ranks {
            *rank_histograms
                .entry(p)
                .or_default()
                .entry(rank)
                .or_insert(0) += 1;
        }
        if rep.self_dual == Some(true) {
            self_dual_classes += 1;
        }
        if let Some(d) = &rep.hadamard_digest {
            hadamard_digests.insert(d.clone());
        }
    }

    Ok(ClassificationReport {
        designs: designs.len(),
        classes,
        aut_histogram,
        rank_histograms,
        self_dual_classes,
        hadamard_classes: hadamard_digests.len(),
    })
}

fn design_record(index: usize, inc: &IncidenceStructure, primes: &[u64]) -> Result<DesignRecord> {
    let params = validate_2design(inc)?;
    let cert = design_certificate(inc);
    let mut p_ranks = BTreeMap::new();
    for &p in primes {
        p_ranks.insert(p, p_rank(inc, p)?);
    }
    // Self-dual ⟺ the dual's certificate matches; comparing bytes directly
    // reuses the certificate already in hand.
    let self_dual = params
        .is_symmetric()
        .then(|| design_certificate(&inc.dual()).bytes() == cert.bytes());
    Ok(DesignRecord {
        index,
        params,
        digest: cert.digest(),
        aut_order: cert.group_order().to_string(),
        p_ranks,
        self_dual,
        // Filled in per class once the classes are known.
        hadamard_digest: None,
    })
}
