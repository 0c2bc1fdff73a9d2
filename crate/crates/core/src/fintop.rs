//! Topologies on small finite sets, stored as sorted families of bit masks,
//! plus a bitset-backed space given by a base for larger ground sets.

use std::collections::{BTreeSet, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set accepted by [`FinTopology`].
pub const MAX_POINTS: usize = 16;
/// Largest ground set accepted by [`enumerate_topologies`].
pub const ENUMERATION_CAP: usize = 4;

/// A topology on `{0, .., n-1}`; bit `i` of a mask is point `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinTopology {
    n: usize,
    opens: Vec<u64>,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_points(n: usize, sets: &[u64]) -> Result<()> {
    if n > MAX_POINTS {
        return Err(Error::Cap {
            cap: MAX_POINTS,
            requested: n,
        });
    }
    let full = full_mask(n);
    for &s in sets {
        if s & !full != 0 {
            let point = (s & !full).trailing_zeros() as usize;
            return Err(Error::OutOfRange { point, size: n });
        }
    }
    Ok(())
}

/// Builds a mask from a list of points.
pub fn mask(points: &[usize]) -> u64 {
    points.iter().fold(0, |m, &p| m | (1 << p))
}

/// Smallest topology containing `subbase`: finite intersections, then unions.
pub fn generate(n: usize, subbase: &[u64]) -> Result<FinTopology> {
    check_points(n, subbase)?;
    let full = full_mask(n);

    let mut base: BTreeSet<u64> = subbase.iter().copied().collect();
    base.insert(full);
    let mut queue: Vec<u64> = base.iter().copied().collect();
    while let Some(a) = queue.pop() {
        let current: Vec<u64> = base.iter().copied().collect();
        for b in current {
            if base.insert(a & b) {
                queue.push(a & b);
            }
        }
    }

    let mut opens: BTreeSet<u64> = base.clone();
    opens.insert(0);
    let mut queue: Vec<u64> = opens.iter().copied().collect();
    while let Some(a) = queue.pop() {
        let current: Vec<u64> = opens.iter().copied().collect();
        for b in current {
            if opens.insert(a | b) {
                queue.push(a | b);
            }
        }
    }
    Ok(FinTopology {
        n,
        opens: opens.into_iter().collect(),
    })
}

impl FinTopology {
    pub fn antidiscrete(n: usize) -> Self {
        let opens = if n == 0 { vec![0] } else { vec![0, full_mask(n)] };
        FinTopology { n, opens }
    }

    pub fn discrete(n: usize) -> Result<Self> {
        let singletons: Vec<u64> = (0..n).map(|i| 1 << i).collect();
        generate(n, &singletons)
    }

    /// Accepts `opens` only if it already is a topology.
    pub fn from_opens(n: usize, opens: &[u64]) -> Result<Self> {
        let t = generate(n, opens)?;
        let given: BTreeSet<u64> = opens.iter().copied().collect();
        if given.len() != t.opens.len() || !t.opens.iter().all(|o| given.contains(o)) {
            return Err(Error::Contract(
                "family is not closed under unions and intersections".into(),
            ));
        }
        Ok(t)
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn opens(&self) -> &[u64] {
        &self.opens
    }

    pub fn full(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn is_open(&self, a: u64) -> bool {
        self.opens.binary_search(&a).is_ok()
    }

    pub fn is_closed(&self, a: u64) -> bool {
        self.is_open(self.full() & !a)
    }

    /// Largest open subset of `a`.
    pub fn interior(&self, a: u64) -> u64 {
        self.opens
            .iter()
            .filter(|&&u| u & !a == 0)
            .fold(0, |acc, &u| acc | u)
    }

    /// Smallest closed superset of `a`.
    pub fn closure(&self, a: u64) -> u64 {
        let full = self.full();
        full & !self.interior(full & !a)
    }

    /// `U = int cl U`.
    pub fn is_canonically_open(&self, u: u64) -> bool {
        self.is_open(u) && self.interior(self.closure(u)) == u
    }

    /// Topology generated by the canonically open sets.
    pub fn regularization(&self) -> FinTopology {
        let canonical: Vec<u64> = self
            .opens
            .iter()
            .copied()
            .filter(|&u| self.is_canonically_open(u))
            .collect();
        generate(self.n, &canonical).expect("canonical opens lie in the ground set")
    }

    /// Every open of `self` is open in `other`.
    pub fn is_coarser_than(&self, other: &FinTopology) -> bool {
        self.n == other.n && self.opens.iter().all(|&u| other.is_open(u))
    }

    pub fn is_wide(&self) -> bool {
        is_cowide(self, self)
    }

    /// Every locally finite family of nonempty opens is finite. Degenerate:
    /// any family of opens is a subfamily of the finite `opens`.
    pub fn is_pseudocompact(&self) -> bool {
        true
    }

    /// For an open cover, some finite subfamily has closures covering the
    /// space. The cover itself is finite, so this reduces to a union check.
    pub fn h_closed_condition(&self, cover: &[u64]) -> bool {
        let covers = cover.iter().fold(0, |acc, &u| acc | u) == self.full();
        let closures = cover.iter().fold(0, |acc, &u| acc | self.closure(u));
        !covers || closures == self.full()
    }
}

/// Supremum: generated by `{U n V : U in tau, V in sigma}`.
pub fn supremum(tau: &FinTopology, sigma: &FinTopology) -> Result<FinTopology> {
    if tau.n != sigma.n {
        return Err(Error::Contract(format!(
            "topologies on {} and {} points",
            tau.n, sigma.n
        )));
    }
    let mut base = Vec::with_capacity(tau.opens.len() * sigma.opens.len());
    for &u in &tau.opens {
        for &v in &sigma.opens {
            base.push(u & v);
        }
    }
    generate(tau.n, &base)
}

/// Every nonempty `U in tau` meets every nonempty `V in sigma`.
pub fn is_cowide(tau: &FinTopology, sigma: &FinTopology) -> bool {
    tau.opens.iter().filter(|&&u| u != 0).all(|&u| {
        sigma
            .opens
            .iter()
            .filter(|&&v| v != 0)
            .all(|&v| u & v != 0)
    })
}

/// All topologies on `n <= 4` labeled points, each exactly once, sorted.
pub fn enumerate_topologies(n: usize) -> Result<Vec<FinTopology>> {
    if n > ENUMERATION_CAP {
        return Err(Error::Cap {
            cap: ENUMERATION_CAP,
            requested: n,
        });
    }
    let start = FinTopology::antidiscrete(n);
    let mut seen: HashSet<FinTopology> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let subsets = 1u64 << n;
    while let Some(t) = queue.pop_front() {
        for a in 0..subsets {
            if t.is_open(a) {
                continue;
            }
            let mut sub = t.opens.clone();
            sub.push(a);
            let next = generate(n, &sub)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut all: Vec<FinTopology> = seen.into_iter().collect();
    all.sort();
    Ok(all)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// `cl_{tau v sigma} W = cl_tau W` for `W in tau`, cowide pair.
    ClosureOfOpen,
    /// The same equality for `W in tau v sigma`, cowide pair with wide `sigma`.
    ClosureOfOpenWide,
    /// `(tau v sigma)_r = tau_r`, cowide pair with wide `sigma`.
    CowideRegularization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCounterexample {
    pub lemma: LemmaKind,
    pub tau: Vec<u64>,
    pub sigma: Vec<u64>,
    pub set: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub points: usize,
    pub topologies: usize,
    pub pairs_checked: usize,
    pub cowide_pairs: usize,
    pub wide_sigma_pairs: usize,
    pub closure_checks: usize,
    pub regularization_checks: usize,
    pub counterexamples: Vec<LemmaCounterexample>,
}

impl LemmaReport {
    fn merge(mut self, other: LemmaReport) -> LemmaReport {
        self.pairs_checked += other.pairs_checked;
        self.cowide_pairs += other.cowide_pairs;
        self.wide_sigma_pairs += other.wide_sigma_pairs;
        self.closure_checks += other.closure_checks;
        self.regularization_checks += other.regularization_checks;
        self.counterexamples.extend(other.counterexamples);
        self
    }
}

fn check_pair(tau: &FinTopology, sigma: &FinTopology, sigma_wide: bool) -> LemmaReport {
    let mut r = LemmaReport {
        pairs_checked: 1,
        ..LemmaReport::default()
    };
    if !is_cowide(tau, sigma) {
        return r;
    }
    r.cowide_pairs = 1;
    let sup = supremum(tau, sigma).expect("same ground set");
    let mut fail = |lemma: LemmaKind, set: Option<u64>| {
        r.counterexamples.push(LemmaCounterexample {
            lemma,
            tau: tau.opens.clone(),
            sigma: sigma.opens.clone(),
            set,
        })
    };
    let mut closure_checks = 0;
    for &w in &tau.opens {
        closure_checks += 1;
        if sup.closure(w) != tau.closure(w) {
            fail(LemmaKind::ClosureOfOpen, Some(w));
        }
    }
    let mut regularization_checks = 0;
    let mut wide = 0;
    if sigma_wide {
        wide = 1;
        for &w in &sup.opens {
            closure_checks += 1;
            if sup.closure(w) != tau.closure(w) {
                fail(LemmaKind::ClosureOfOpenWide, Some(w));
            }
        }
        regularization_checks += 1;
        if sup.regularization() != tau.regularization() {
            fail(LemmaKind::CowideRegularization, None);
        }
    }
    r.closure_checks = closure_checks;
    r.regularization_checks = regularization_checks;
    r.wide_sigma_pairs = wide;
    r
}

/// Checks the closure and regularization lemmas over all ordered pairs of
/// topologies on `n` points.
pub fn verify_lemmas(n: usize) -> Result<LemmaReport> {
    let tops = enumerate_topologies(n)?;
    let wide: Vec<bool> = tops.iter().map(FinTopology::is_wide).collect();
    let report = tops
        .par_iter()
        .map(|tau| {
            tops.iter()
                .zip(&wide)
                .map(|(sigma, &w)| check_pair(tau, sigma, w))
                .fold(LemmaReport::default(), LemmaReport::merge)
        })
        .reduce(LemmaReport::default, LemmaReport::merge);
    Ok(LemmaReport {
        points: n,
        topologies: tops.len(),
        ..report
    })
}

/// A finite space given by a base, for ground sets too large for masks.
#[derive(Clone, Debug)]
pub struct BaseSpace {
    n: usize,
    base: Vec<FixedBitSet>,
}

impl BaseSpace {
    pub fn new(n: usize, base: Vec<FixedBitSet>) -> Result<Self> {
        for b in &base {
            if b.len() != n {
                return Err(Error::Contract(format!(
                    "base set over {} points in a space of {n}",
                    b.len()
                )));
            }
        }
        Ok(BaseSpace { n, base })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    /// `p` is in the closure iff every base set containing `p` meets `a`;
    /// equivalently the closure is the complement of the union of the base
    /// sets disjoint from `a`.
    pub fn closure(&self, a: &FixedBitSet) -> FixedBitSet {
        let mut outside = FixedBitSet::with_capacity(self.n);
        for b in &self.base {
            if b.is_disjoint(a) {
                outside.union_with(b);
            }
        }
        let mut cl = FixedBitSet::with_capacity(self.n);
        cl.insert_range(..);
        cl.difference_with(&outside);
        cl
    }

    /// Union of the base sets inside `a`.
    pub fn interior(&self, a: &FixedBitSet) -> FixedBitSet {
        let mut int = FixedBitSet::with_capacity(self.n);
        for b in &self.base {
            if b.is_subset(a) {
                int.union_with(b);
            }
        }
        int
    }
}
