//! The cone topology `G_S` (basic neighborhoods `x+S`) and the cone* topology
//! `G*_S` (basic neighborhoods `x + ({0} u (s+S))`, `s in S`).

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{GroupElement, GroupSpec};
use crate::error::{Error, Result};
use crate::fintop::BaseSpace;
use crate::lp;
use crate::monoid::{lex_positive, Monoid, MonoidKind, MonoidSpec};

/// Default window radius.
pub const DEFAULT_RADIUS: u32 = 8;
/// Default checked prefix for sequences and certificates.
pub const DEFAULT_PREFIX: usize = 16;
/// Largest window that will be materialized point by point.
pub const WINDOW_CAP: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Cone,
    ConeStar,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Cone => "cone",
            Variant::ConeStar => "cone-star",
        })
    }
}

/// The box `[-R, R]^rank` times the whole torsion part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub radius: u32,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            radius: DEFAULT_RADIUS,
        }
    }
}

impl Window {
    pub fn new(radius: u32) -> Self {
        Window { radius }
    }

    fn radices(&self, group: &GroupSpec) -> Option<Vec<usize>> {
        let side = 2 * self.radius as usize + 1;
        let mut radices = vec![side; group.rank()];
        for d in group.torsion() {
            radices.push(d.to_usize()?);
        }
        Some(radices)
    }

    /// Number of points, or `None` when it exceeds `usize`.
    pub fn size(&self, group: &GroupSpec) -> Option<usize> {
        self.radices(group)?
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
    }

    pub fn contains(&self, group: &GroupSpec, x: &GroupElement) -> bool {
        let r = BigInt::from(self.radius);
        group.free_part(x).iter().all(|c| c.abs() <= r)
    }

    /// All points, in a fixed order (last coordinate varies fastest).
    pub fn points(&self, group: &GroupSpec) -> Result<Vec<GroupElement>> {
        Ok(self
            .coords(group)?
            .into_iter()
            .map(|c| {
                group
                    .element(c.into_iter().map(BigInt::from).collect())
                    .expect("window coordinates have the group's shape")
            })
            .collect())
    }

    fn coords(&self, group: &GroupSpec) -> Result<Vec<Vec<i64>>> {
        let size = self.size(group).filter(|&s| s <= WINDOW_CAP).ok_or(Error::Cap {
            cap: WINDOW_CAP,
            requested: self.size(group).unwrap_or(usize::MAX),
        })?;
        let radices = self.radices(group).expect("size is finite");
        let rank = group.rank();
        let r = self.radius as i64;
        let mut out = Vec::with_capacity(size);
        for mut idx in 0..size {
            let mut c = vec![0i64; radices.len()];
            for k in (0..radices.len()).rev() {
                let digit = (idx % radices[k]) as i64;
                idx /= radices[k];
                c[k] = if k < rank { digit - r } else { digit };
            }
            out.push(c);
        }
        Ok(out)
    }
}

// Dense lookup over a window, for repeated membership of small differences.
struct Table {
    radius: i64,
    rank: usize,
    radices: Vec<i64>,
    member: Vec<bool>,
}

impl Table {
    fn build(monoid: &Monoid, radius: u32) -> Result<Self> {
        let group = monoid.group();
        let w = Window::new(radius);
        let member = w
            .points(group)?
            .iter()
            .map(|x| monoid.member_unchecked(x))
            .collect();
        Ok(Table {
            radius: radius as i64,
            rank: group.rank(),
            radices: w
                .radices(group)
                .expect("points succeeded")
                .into_iter()
                .map(|r| r as i64)
                .collect(),
            member,
        })
    }

    // Membership of a - b (+ c) given as small coordinate vectors.
    fn member_of(&self, coords: impl Iterator<Item = i64>) -> bool {
        let mut idx = 0i64;
        for (k, c) in coords.enumerate() {
            let digit = if k < self.rank {
                if c.abs() > self.radius {
                    unreachable!("difference outside table");
                }
                c + self.radius
            } else {
                c.rem_euclid(self.radices[k])
            };
            idx = idx * self.radices[k] + digit;
        }
        self.member[idx as usize]
    }
}

/// One building block of a [`DescribedSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", content = "at", rename_all = "snake_case")]
pub enum Atom {
    /// `{x}`
    Point(GroupElement),
    /// `x + S`
    PlusS(GroupElement),
    /// `x - S`
    MinusS(GroupElement),
    /// `x + (S - S)`
    PlusClosure(GroupElement),
}

impl Atom {
    pub fn anchor(&self) -> &GroupElement {
        match self {
            Atom::Point(x) | Atom::PlusS(x) | Atom::MinusS(x) | Atom::PlusClosure(x) => x,
        }
    }

    pub fn contains(&self, monoid: &Monoid, y: &GroupElement) -> bool {
        let g = monoid.group();
        match self {
            Atom::Point(x) => x == y,
            Atom::PlusS(x) => monoid.member_unchecked(&g.sub_unchecked(y, x)),
            Atom::MinusS(x) => monoid.member_unchecked(&g.sub_unchecked(x, y)),
            Atom::PlusClosure(x) => monoid
                .span()
                .contains(&g.sub_unchecked(y, x))
                .expect("shapes checked"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Point(x) => write!(f, "{{{x}}}"),
            Atom::PlusS(x) => write!(f, "{x}+S"),
            Atom::MinusS(x) => write!(f, "{x}-S"),
            Atom::PlusClosure(x) => write!(f, "{x}+<S>"),
        }
    }
}

/// A finite union of atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DescribedSet {
    pub atoms: Vec<Atom>,
}

impl DescribedSet {
    pub fn empty() -> Self {
        DescribedSet::default()
    }

    pub fn new(atoms: Vec<Atom>) -> Self {
        DescribedSet { atoms }
    }

    pub fn is_empty_description(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, monoid: &Monoid, y: &GroupElement) -> bool {
        self.atoms.iter().any(|a| a.contains(monoid, y))
    }

    fn check(&self, group: &GroupSpec) -> Result<()> {
        for a in &self.atoms {
            group.conforms(a.anchor())?;
        }
        Ok(())
    }
}

impl fmt::Display for DescribedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub t0: bool,
    pub t1: bool,
    pub hausdorff: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactnessVerdict {
    pub compact: bool,
    /// Finite `F` inside `K` with `K` contained in `F + S`.
    pub finite_cover: Vec<GroupElement>,
}

/// `c_n = start + n * step`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineRule {
    pub start: GroupElement,
    pub step: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sequence {
    /// A finite list; convergence is judged on its second half.
    Explicit { terms: Vec<GroupElement> },
    /// `k` interleaved affine rules: `c_{i + k t} = rules[i].start + t * rules[i].step`.
    Periodic { rules: Vec<AffineRule> },
}

impl Sequence {
    pub fn affine(start: GroupElement, step: GroupElement) -> Self {
        Sequence::Periodic {
            rules: vec![AffineRule { start, step }],
        }
    }

    pub fn term(&self, group: &GroupSpec, n: usize) -> Option<GroupElement> {
        match self {
            Sequence::Explicit { terms } => terms.get(n).cloned(),
            Sequence::Periodic { rules } => {
                let k = rules.len();
                let rule = rules.get(n % k)?;
                let t = BigInt::from(n / k);
                Some(group.add_unchecked(&rule.start, &group.scale(&rule.step, &t)))
            }
        }
    }

    fn check(&self, group: &GroupSpec) -> Result<()> {
        match self {
            Sequence::Explicit { terms } => {
                if terms.is_empty() {
                    return Err(Error::Contract("explicit sequence has no terms".into()));
                }
                terms.iter().try_for_each(|t| group.conforms(t))
            }
            Sequence::Periodic { rules } => {
                if rules.is_empty() {
                    return Err(Error::Contract("periodic sequence has no rules".into()));
                }
                rules.iter().try_for_each(|r| {
                    group.conforms(&r.start)?;
                    group.conforms(&r.step)
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "points", rename_all = "snake_case")]
pub enum LimitSet {
    All,
    Empty,
    Described(DescribedSet),
    /// The limits found among the window points.
    Sampled(Vec<GroupElement>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PointVerdict {
    /// `c_n` lies in every (probed) basic neighborhood of the point for `n >= from_index`.
    Limit { from_index: usize },
    /// `c_{escape_index}` lies outside some (probed) basic neighborhood.
    NotLimit { escape_index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub point: GroupElement,
    #[serde(flatten)]
    pub verdict: PointVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitReport {
    pub sequence: Sequence,
    pub variant: Variant,
    pub limits: LimitSet,
    pub probes: Vec<GroupElement>,
    pub checked_prefix: usize,
    pub window: Window,
    pub points: Vec<PointReport>,
}

/// `G` with the cone or cone* topology of a monoid `S`.
#[derive(Clone, Debug)]
pub struct ConeSpace {
    monoid: Arc<Monoid>,
    variant: Variant,
}

// Convergence analysis of one affine component x0 + t d in the cone topology.
enum Component {
    Zero,
    Escaping,
    Periodic { k: usize, extended: Box<Monoid> },
    Lex,
}

// Smallest t with offset + stride * t >= bound.
fn first_at_least(offset: usize, stride: usize, bound: usize) -> usize {
    if offset >= bound {
        0
    } else {
        (bound - offset).div_ceil(stride)
    }
}

impl ConeSpace {
    pub fn new(monoid: Arc<Monoid>, variant: Variant) -> Self {
        ConeSpace { monoid, variant }
    }

    pub fn build(group: GroupSpec, spec: MonoidSpec, variant: Variant) -> Result<Self> {
        Ok(ConeSpace::new(Arc::new(Monoid::new(group, spec)?), variant))
    }

    pub fn group(&self) -> &GroupSpec {
        self.monoid.group()
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn shared_monoid(&self) -> Arc<Monoid> {
        Arc::clone(&self.monoid)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The same monoid with the other topology.
    pub fn with_variant(&self, variant: Variant) -> ConeSpace {
        ConeSpace::new(self.shared_monoid(), variant)
    }

    /// Is `y` in the basic neighborhood of `x` with parameter `s`
    /// (`x+S` for the cone topology, `x + ({0} u (s+S))` for cone*)?
    pub fn in_basic_neighborhood(&self, x: &GroupElement, s: &GroupElement, y: &GroupElement) -> bool {
        let g = self.group();
        let d = g.sub_unchecked(y, x);
        match self.variant {
            Variant::Cone => self.monoid.member_unchecked(&d),
            Variant::ConeStar => d.is_zero() || self.monoid.member_unchecked(&g.sub_unchecked(&d, s)),
        }
    }

    /// `cl A = A - S`, atom by atom. Only available for the cone topology.
    pub fn closure(&self, a: &DescribedSet) -> Result<DescribedSet> {
        a.check(self.group())?;
        if self.variant == Variant::ConeStar {
            let atom = a
                .atoms
                .first()
                .map_or_else(|| "{}".to_string(), ToString::to_string);
            return Err(Error::SymbolicClosure {
                atom,
                reason: "no closed form for cone* closures; use a window-trace closure".into(),
            });
        }
        let mut out: Vec<Atom> = Vec::new();
        for atom in &a.atoms {
            let c = match atom {
                Atom::Point(x) | Atom::MinusS(x) => Atom::MinusS(x.clone()),
                Atom::PlusS(x) | Atom::PlusClosure(x) => Atom::PlusClosure(x.clone()),
            };
            if !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(DescribedSet::new(out))
    }

    /// Closure of `A n W` in the trace on `W` of the basic open sets (cone*: the
    /// sets with parameters from `probes`), computed by the finite-space engine.
    pub fn window_closure(
        &self,
        a: &DescribedSet,
        window: &Window,
        probes: &[GroupElement],
    ) -> Result<Vec<GroupElement>> {
        a.check(self.group())?;
        let group = self.group();
        let coords = window.coords(group)?;
        let n = coords.len();
        let probe_coords: Vec<Vec<i64>> = match self.variant {
            Variant::Cone => vec![vec![0; group.dim()]],
            Variant::ConeStar => {
                self.check_probes(probes)?;
                probes.iter().map(small_coords).collect::<Result<_>>()?
            }
        };
        let reach = probe_coords
            .iter()
            .flat_map(|c| c[..group.rank()].iter().map(|v| v.unsigned_abs()))
            .max()
            .unwrap_or(0);
        let table = Table::build(&self.monoid, 2 * window.radius + reach as u32)?;

        let mut base = Vec::with_capacity(n * probe_coords.len());
        for w in &coords {
            for s in &probe_coords {
                let mut set = FixedBitSet::with_capacity(n);
                for (j, v) in coords.iter().enumerate() {
                    let hit = match self.variant {
                        Variant::Cone => table.member_of(v.iter().zip(w).map(|(a, b)| a - b)),
                        Variant::ConeStar => {
                            v == w
                                || table.member_of(
                                    v.iter().zip(w).zip(s).map(|((a, b), c)| a - b - c),
                                )
                        }
                    };
                    if hit {
                        set.insert(j);
                    }
                }
                base.push(set);
            }
        }
        let space = BaseSpace::new(n, base)?;
        let points = window.points(group)?;
        let mut inside = FixedBitSet::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if a.contains(&self.monoid, p) {
                inside.insert(i);
            }
        }
        let cl = space.closure(&inside);
        Ok(cl.ones().map(|i| points[i].clone()).collect())
    }

    fn check_probes(&self, probes: &[GroupElement]) -> Result<()> {
        if probes.is_empty() {
            return Err(Error::Contract("cone* needs a nonempty probe list".into()));
        }
        for s in probes {
            self.group().conforms(s)?;
            if !self.monoid.member_unchecked(s) {
                return Err(Error::Contract(format!("probe {s} is not in S")));
            }
        }
        Ok(())
    }

    /// Is `K` compact in the cone topology? `K` is compact iff `K` lies in
    /// `F + S` for a finite `F` inside `K`.
    pub fn is_compact(&self, k: &DescribedSet) -> Result<CompactnessVerdict> {
        k.check(self.group())?;
        if self.variant == Variant::ConeStar {
            return Err(Error::Contract(
                "compactness of subsets is only decided for the cone topology".into(),
            ));
        }
        let group_s = self.monoid.is_group();
        // (anchor, may be dropped when another anchor covers it)
        let mut anchors: Vec<(GroupElement, bool)> = Vec::new();
        for atom in &k.atoms {
            match atom {
                Atom::Point(x) => anchors.push((x.clone(), false)),
                Atom::PlusS(x) => anchors.push((x.clone(), true)),
                // For a group S all three shapes coincide with x + S.
                Atom::MinusS(x) | Atom::PlusClosure(x) if group_s => {
                    anchors.push((x.clone(), true))
                }
                Atom::MinusS(_) | Atom::PlusClosure(_) => {
                    return Err(Error::UndecidableShape {
                        atom: atom.to_string(),
                        reason: "only singletons and x+S are covered by the finite-cover criterion when S is not a group".into(),
                    })
                }
            }
        }
        // Drop the anchor of an x+S atom when another kept anchor covers it.
        let g = self.group();
        let mut alive = vec![true; anchors.len()];
        for i in 0..anchors.len() {
            if !anchors[i].1 {
                continue;
            }
            let covered = (0..anchors.len()).any(|j| {
                j != i
                    && alive[j]
                    && self
                        .monoid
                        .member_unchecked(&g.sub_unchecked(&anchors[i].0, &anchors[j].0))
            });
            if covered {
                alive[i] = false;
            }
        }
        let mut finite_cover: Vec<GroupElement> = Vec::new();
        for ((a, _), keep) in anchors.into_iter().zip(alive) {
            if keep && !finite_cover.contains(&a) {
                finite_cover.push(a);
            }
        }
        Ok(CompactnessVerdict {
            compact: true,
            finite_cover,
        })
    }

    pub fn separation(&self) -> Separation {
        let m = &self.monoid;
        let trivial = m.is_trivial();
        match self.variant {
            Variant::Cone => Separation {
                t0: m.units().is_trivial(),
                t1: trivial,
                hausdorff: trivial,
            },
            Variant::ConeStar => {
                let t1 = trivial || !m.is_group();
                Separation {
                    t0: t1,
                    t1,
                    hausdorff: trivial,
                }
            }
        }
    }

    /// `G = S - S`.
    pub fn is_wide(&self) -> bool {
        self.monoid.span().is_whole_group()
    }

    /// Limit points of a sequence, with a verdict for every window point.
    pub fn limits(
        &self,
        seq: &Sequence,
        probes: &[GroupElement],
        prefix: usize,
        window: &Window,
    ) -> Result<LimitReport> {
        if prefix == 0 {
            return Err(Error::Contract("prefix must be at least 1".into()));
        }
        seq.check(self.group())?;
        if self.variant == Variant::ConeStar {
            self.check_probes(probes)?;
        }
        let points = window.points(self.group())?;
        let mut reports = Vec::with_capacity(points.len());
        let limits = match seq {
            Sequence::Explicit { terms } => {
                for p in &points {
                    reports.push(PointReport {
                        point: p.clone(),
                        verdict: self.explicit_verdict(terms, p, probes),
                    });
                }
                sampled(&reports)
            }
            Sequence::Periodic { rules } => {
                let comps: Vec<Component> = rules.iter().map(|r| self.analyze(&r.step)).collect();
                for p in &points {
                    let verdict = match self.variant {
                        Variant::Cone => self.cone_verdict(rules, &comps, p, prefix),
                        Variant::ConeStar => self.star_verdict(rules, &comps, p, probes, prefix),
                    };
                    reports.push(PointReport {
                        point: p.clone(),
                        verdict,
                    });
                }
                match self.symbolic_limits(rules, &comps) {
                    Some(LimitSet::Empty) => LimitSet::Empty,
                    Some(set) if self.variant == Variant::Cone => set,
                    _ => sampled(&reports),
                }
            }
        };
        Ok(LimitReport {
            sequence: seq.clone(),
            variant: self.variant,
            limits,
            probes: if self.variant == Variant::ConeStar {
                probes.to_vec()
            } else {
                Vec::new()
            },
            checked_prefix: prefix,
            window: *window,
            points: reports,
        })
    }

    fn analyze(&self, d: &GroupElement) -> Component {
        let m = &self.monoid;
        if m.kind() == MonoidKind::Lex {
            return Component::Lex;
        }
        if d.is_zero() {
            return Component::Zero;
        }
        let g = self.group();
        if !m.span().contains(d).expect("shape checked") {
            return Component::Escaping;
        }
        let free: Vec<Vec<BigInt>> = m
            .generators()
            .iter()
            .map(|x| g.free_part(x).to_vec())
            .collect();
        if !lp::in_cone(&free, g.free_part(d)) {
            return Component::Escaping;
        }
        // Some multiple k d lies in S; scan for the least one.
        let mut k = 1usize;
        let mut kd = d.clone();
        while !m.member_unchecked(&kd) {
            k += 1;
            kd = g.add_unchecked(&kd, d);
        }
        let mut gens = m.generators().to_vec();
        gens.push(g.neg(&kd));
        let extended = Monoid::new(g.clone(), MonoidSpec::generated(gens))
            .expect("generators conform to the group");
        Component::Periodic {
            k,
            extended: Box::new(extended),
        }
    }

    // Per component: Ok(t0) when y + t d lies in S for all t >= t0, Err(t) with
    // y + t d outside S and t >= min_escape otherwise.
    fn component_cone(
        &self,
        comp: &Component,
        y: &GroupElement,
        d: &GroupElement,
        min_escape: usize,
    ) -> std::result::Result<usize, usize> {
        let g = self.group();
        let m = &self.monoid;
        let term = |t: usize| g.add_unchecked(y, &g.scale(d, &BigInt::from(t)));
        match comp {
            Component::Zero => {
                if m.member_unchecked(y) {
                    Ok(0)
                } else {
                    Err(min_escape)
                }
            }
            Component::Escaping => {
                let mut t = min_escape;
                while m.member_unchecked(&term(t)) {
                    t += 1;
                }
                Err(t)
            }
            Component::Periodic { k, extended } => {
                let k = *k;
                let mut from = 0usize;
                for j in 0..k {
                    let base = term(j);
                    if !extended.member_unchecked(&base) {
                        let n = first_at_least(j, k, min_escape);
                        return Err(j + n * k);
                    }
                    let mut n = 0usize;
                    while !m.member_unchecked(&term(j + n * k)) {
                        n += 1;
                    }
                    if n > 0 {
                        from = from.max(j + (n - 1) * k + 1);
                    }
                }
                Ok(from)
            }
            Component::Lex => lex_component(y, d, min_escape),
        }
    }

    fn cone_verdict(
        &self,
        rules: &[AffineRule],
        comps: &[Component],
        p: &GroupElement,
        prefix: usize,
    ) -> PointVerdict {
        let g = self.group();
        let stride = rules.len();
        let mut from = 0usize;
        for (i, (rule, comp)) in rules.iter().zip(comps).enumerate() {
            let y = g.sub_unchecked(&rule.start, p);
            let min_escape = first_at_least(i, stride, prefix);
            match self.component_cone(comp, &y, &rule.step, min_escape) {
                Ok(t) if t > 0 => from = from.max(i + (t - 1) * stride + 1),
                Ok(_) => {}
                Err(t) => {
                    return PointVerdict::NotLimit {
                        escape_index: i + t * stride,
                    }
                }
            }
        }
        PointVerdict::Limit { from_index: from }
    }

    fn star_verdict(
        &self,
        rules: &[AffineRule],
        comps: &[Component],
        p: &GroupElement,
        probes: &[GroupElement],
        prefix: usize,
    ) -> PointVerdict {
        let g = self.group();
        let stride = rules.len();
        let mut from = 0usize;
        for s in probes {
            let ps = g.add_unchecked(p, s);
            for (i, (rule, comp)) in rules.iter().zip(comps).enumerate() {
                let min_escape = first_at_least(i, stride, prefix);
                let outcome = match element_order(g, &rule.step) {
                    // Infinite order: at most one term equals p, so only p+s+S matters.
                    None => {
                        let y = g.sub_unchecked(&rule.start, &ps);
                        self.component_cone(comp, &y, &rule.step, min_escape)
                    }
                    Some(order) => {
                        let term = |t: usize| {
                            g.add_unchecked(&rule.start, &g.scale(&rule.step, &BigInt::from(t)))
                        };
                        match (0..order).find(|&j| !self.in_basic_neighborhood(p, s, &term(j))) {
                            None => Ok(0),
                            Some(j) => {
                                let lo = min_escape.max(j);
                                Err(j + (lo - j).div_ceil(order) * order)
                            }
                        }
                    }
                };
                match outcome {
                    Ok(t) if t > 0 => from = from.max(i + (t - 1) * stride + 1),
                    Ok(_) => {}
                    Err(t) => {
                        return PointVerdict::NotLimit {
                            escape_index: i + t * stride,
                        }
                    }
                }
            }
        }
        PointVerdict::Limit { from_index: from }
    }

    fn explicit_verdict(&self, terms: &[GroupElement], p: &GroupElement, probes: &[GroupElement]) -> PointVerdict {
        let zero = self.group().zero();
        let params: &[GroupElement] = match self.variant {
            Variant::Cone => std::slice::from_ref(&zero),
            Variant::ConeStar => probes,
        };
        let inside = |t: &GroupElement| params.iter().all(|s| self.in_basic_neighborhood(p, s, t));
        let tail = terms.len() / 2;
        if let Some(bad) = (tail..terms.len()).rev().find(|&i| !inside(&terms[i])) {
            return PointVerdict::NotLimit { escape_index: bad };
        }
        let mut from = tail;
        while from > 0 && inside(&terms[from - 1]) {
            from -= 1;
        }
        PointVerdict::Limit { from_index: from }
    }

    // ALL / EMPTY / a single atom when the cone-topology limit set has that shape.
    fn symbolic_limits(&self, rules: &[AffineRule], comps: &[Component]) -> Option<LimitSet> {
        let g = self.group();
        let m = &self.monoid;
        if m.kind() == MonoidKind::Lex {
            let top = g.rank() - 1;
            let tops: Vec<&BigInt> = rules.iter().map(|r| &r.step.coords()[top]).collect();
            if tops.iter().any(|t| t.is_negative()) {
                return Some(LimitSet::Empty);
            }
            if tops.iter().all(|t| t.is_positive()) {
                return Some(LimitSet::All);
            }
            if rules.len() == 1 && rules[0].step.is_zero() {
                return Some(LimitSet::Described(DescribedSet::new(vec![Atom::MinusS(
                    rules[0].start.clone(),
                )])));
            }
            return None;
        }
        if comps.iter().any(|c| matches!(c, Component::Escaping)) {
            return Some(LimitSet::Empty);
        }
        let first = &rules[0].start;
        for r in &rules[1..] {
            if !m.span().contains(&g.sub_unchecked(&r.start, first)).expect("shape checked") {
                return Some(LimitSet::Empty);
            }
        }
        let whole = |x: &Monoid| x.is_group() && x.span().is_whole_group();
        if comps.iter().all(|c| match c {
            Component::Zero => whole(m),
            Component::Periodic { extended, .. } => whole(extended),
            _ => false,
        }) {
            return Some(LimitSet::All);
        }
        if rules.len() == 1 {
            let d = &rules[0].step;
            if d.is_zero() || m.units().contains(d).expect("shape checked") {
                return Some(LimitSet::Described(DescribedSet::new(vec![Atom::MinusS(
                    rules[0].start.clone(),
                )])));
            }
        }
        None
    }
}

fn sampled(reports: &[PointReport]) -> LimitSet {
    LimitSet::Sampled(
        reports
            .iter()
            .filter(|r| matches!(r.verdict, PointVerdict::Limit { .. }))
            .map(|r| r.point.clone())
            .collect(),
    )
}

fn small_coords(x: &GroupElement) -> Result<Vec<i64>> {
    x.coords()
        .iter()
        .map(|c| {
            c.to_i64()
                .ok_or_else(|| Error::Contract(format!("coordinate {c} too large for a window")))
        })
        .collect()
}

/// Order of `x`, or `None` when it is infinite.
pub fn element_order(group: &GroupSpec, x: &GroupElement) -> Option<usize> {
    if group.free_part(x).iter().any(|c| !c.is_zero()) {
        return None;
    }
    let mut order = BigInt::one();
    for (c, d) in x.coords()[group.rank()..].iter().zip(group.torsion()) {
        let o = d / c.gcd(d);
        order = order.lcm(&o);
    }
    order.to_usize()
}

// Closed form for the lex family: y + t d is lex-positive for all large t?
fn lex_component(y: &GroupElement, d: &GroupElement, min_escape: usize) -> std::result::Result<usize, usize> {
    let yc = y.coords();
    let dc = d.coords();
    let Some(t) = dc.iter().rposition(|c| !c.is_zero()) else {
        return if lex_positive(yc) { Ok(0) } else { Err(min_escape) };
    };
    if let Some(u) = yc[t + 1..].iter().rposition(|c| !c.is_zero()) {
        return if yc[t + 1 + u].is_positive() {
            Ok(0)
        } else {
            Err(min_escape)
        };
    }
    let (yt, dt) = (&yc[t], &dc[t]);
    let at = |m: usize| -> Vec<BigInt> {
        yc.iter()
            .zip(dc)
            .map(|(a, b)| a + b * BigInt::from(m))
            .collect()
    };
    if dt.is_positive() {
        // First m with yt + m dt > 0, then step back over a possible zero top.
        let mut m = if yt.is_positive() {
            0
        } else {
            (Integer::div_floor(&-yt, dt) + 1u32).to_usize().unwrap_or(usize::MAX)
        };
        while m > 0 && lex_positive(&at(m - 1)) {
            m -= 1;
        }
        Ok(m)
    } else {
        let first_negative = if yt.is_negative() {
            0
        } else {
            (Integer::div_floor(yt, &-dt) + 1u32).to_usize().unwrap_or(usize::MAX)
        };
        Err(first_negative.max(min_escape))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rank: usize, torsion: &[i64], gens: &[&[i64]], variant: Variant) -> ConeSpace {
        let g = GroupSpec::from_i64(rank, torsion).unwrap();
        let gens = gens.iter().map(|v| g.element_i64(v).unwrap()).collect();
        ConeSpace::build(g, MonoidSpec::generated(gens), variant).unwrap()
    }

    fn el(s: &ConeSpace, v: &[i64]) -> GroupElement {
        s.group().element_i64(v).unwrap()
    }

    #[test]
    fn closure_of_a_point_is_a_down_set() {
        let s = space(1, &[], &[&[1]], Variant::Cone);
        let a = DescribedSet::new(vec![Atom::Point(el(&s, &[5]))]);
        let cl = s.closure(&a).unwrap();
        for v in -10..=10 {
            assert_eq!(cl.contains(s.monoid(), &el(&s, &[v])), v <= 5);
        }
        assert_eq!(s.closure(&DescribedSet::empty()).unwrap(), DescribedSet::empty());
        let star = s.with_variant(Variant::ConeStar);
        assert!(matches!(star.closure(&a), Err(Error::SymbolicClosure { .. })));
    }

    #[test]
    fn closure_along_a_diagonal() {
        let s = space(2, &[], &[&[1, 1]], Variant::Cone);
        let a = DescribedSet::new(vec![Atom::Point(el(&s, &[0, 0]))]);
        let cl = s.closure(&a).unwrap();
        assert!(cl.contains(s.monoid(), &el(&s, &[-3, -3])));
        assert!(!cl.contains(s.monoid(), &el(&s, &[1, 1])));
        assert!(!cl.contains(s.monoid(), &el(&s, &[-1, 0])));
    }

    #[test]
    fn window_closure_matches_symbolic_inside() {
        let s = space(1, &[], &[&[1]], Variant::Cone);
        let a = DescribedSet::new(vec![Atom::Point(el(&s, &[2]))]);
        let got = s.window_closure(&a, &Window::new(6), &[]).unwrap();
        let expected: Vec<GroupElement> = (-6..=2).map(|v| el(&s, &[v])).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn compactness_examples() {
        let s = space(1, &[], &[&[1]], Variant::Cone);
        let k = DescribedSet::new(vec![Atom::PlusS(el(&s, &[0]))]);
        assert_eq!(s.is_compact(&k).unwrap().finite_cover, vec![el(&s, &[0])]);
        let k = DescribedSet::new(vec![Atom::Point(el(&s, &[0])), Atom::PlusS(el(&s, &[3]))]);
        assert_eq!(s.is_compact(&k).unwrap().finite_cover, vec![el(&s, &[0])]);
        let k = DescribedSet::new(vec![Atom::Point(el(&s, &[-2])), Atom::Point(el(&s, &[7]))]);
        assert_eq!(
            s.is_compact(&k).unwrap().finite_cover,
            vec![el(&s, &[-2]), el(&s, &[7])]
        );
        let bad = DescribedSet::new(vec![Atom::MinusS(el(&s, &[0]))]);
        assert!(matches!(s.is_compact(&bad), Err(Error::UndecidableShape { .. })));
    }

    #[test]
    fn separation_examples() {
        let nat = space(1, &[], &[&[1]], Variant::Cone);
        assert_eq!(
            nat.separation(),
            Separation {
                t0: true,
                t1: false,
                hausdorff: false
            }
        );
        assert!(nat.with_variant(Variant::ConeStar).separation().t1);
        let trivial = space(1, &[], &[], Variant::Cone);
        for v in [Variant::Cone, Variant::ConeStar] {
            let sep = trivial.with_variant(v).separation();
            assert!(sep.t0 && sep.t1 && sep.hausdorff);
        }
    }

    #[test]
    fn wideness() {
        assert!(space(1, &[], &[&[1]], Variant::Cone).is_wide());
        assert!(!space(1, &[], &[&[2]], Variant::Cone).is_wide());
        let lex = ConeSpace::build(GroupSpec::free(2), MonoidSpec::lex(2), Variant::Cone).unwrap();
        assert!(lex.is_wide());
    }

    #[test]
    fn limits_of_affine_sequences() {
        let s = space(1, &[], &[&[1]], Variant::Cone);
        let w = Window::new(5);
        let up = Sequence::affine(el(&s, &[0]), el(&s, &[1]));
        let r = s.limits(&up, &[], 8, &w).unwrap();
        assert_eq!(r.limits, LimitSet::All);
        assert!(r.points.iter().all(|p| matches!(p.verdict, PointVerdict::Limit { .. })));

        let alternating = Sequence::Periodic {
            rules: vec![
                AffineRule {
                    start: el(&s, &[0]),
                    step: el(&s, &[2]),
                },
                AffineRule {
                    start: el(&s, &[-1]),
                    step: el(&s, &[-2]),
                },
            ],
        };
        let r = s.limits(&alternating, &[], 8, &w).unwrap();
        assert_eq!(r.limits, LimitSet::Empty);
        for p in &r.points {
            match p.verdict {
                PointVerdict::NotLimit { escape_index } => {
                    assert!(escape_index >= 8);
                    let c = alternating.term(s.group(), escape_index).unwrap();
                    assert!(!s.in_basic_neighborhood(&p.point, &el(&s, &[0]), &c));
                }
                PointVerdict::Limit { .. } => panic!("no limits expected"),
            }
        }

        let constant = Sequence::affine(el(&s, &[3]), el(&s, &[0]));
        let r = s.limits(&constant, &[], 4, &w).unwrap();
        assert_eq!(
            r.limits,
            LimitSet::Described(DescribedSet::new(vec![Atom::MinusS(el(&s, &[3]))]))
        );
    }

    #[test]
    fn star_limits_need_probes() {
        let s = space(1, &[], &[&[1]], Variant::ConeStar);
        let seq = Sequence::affine(el(&s, &[0]), el(&s, &[1]));
        assert!(matches!(
            s.limits(&seq, &[], 4, &Window::new(3)),
            Err(Error::Contract(_))
        ));
        let probes = vec![el(&s, &[0]), el(&s, &[2])];
        let r = s.limits(&seq, &probes, 4, &Window::new(3)).unwrap();
        assert!(r.points.iter().all(|p| matches!(p.verdict, PointVerdict::Limit { .. })));
        // Confirmation is only as strong as the probe list.
        let constant = Sequence::affine(el(&s, &[1]), el(&s, &[0]));
        let r = s.limits(&constant, &probes, 4, &Window::new(3)).unwrap();
        let few: Vec<GroupElement> = [-3, -2, -1, 1].iter().map(|&v| el(&s, &[v])).collect();
        assert_eq!(r.limits, LimitSet::Sampled(few));
        let more: Vec<GroupElement> = (0..=5).map(|v| el(&s, &[v])).collect();
        let r = s.limits(&constant, &more, 4, &Window::new(3)).unwrap();
        assert_eq!(r.limits, LimitSet::Sampled(vec![el(&s, &[1])]));
    }

    #[test]
    fn lex_limits() {
        let s = ConeSpace::build(GroupSpec::free(2), MonoidSpec::lex(2), Variant::Cone).unwrap();
        let g = s.group().clone();
        let seq = Sequence::affine(g.element_i64(&[0, -3]).unwrap(), g.element_i64(&[1, 1]).unwrap());
        let r = s.limits(&seq, &[], 6, &Window::new(2)).unwrap();
        assert_eq!(r.limits, LimitSet::All);
        for p in &r.points {
            let PointVerdict::Limit { from_index } = p.verdict else {
                panic!("expected limit")
            };
            for n in from_index..from_index + 20 {
                let c = seq.term(&g, n).unwrap();
                assert!(s.in_basic_neighborhood(&p.point, &g.zero(), &c));
            }
            if from_index > 0 {
                let c = seq.term(&g, from_index - 1).unwrap();
                assert!(!s.in_basic_neighborhood(&p.point, &g.zero(), &c));
            }
        }
    }
}
