//! Explicit witnesses for failing properties, and a verifier that checks any
//! certificate against the raw definitions on a finite window.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{GroupElement, GroupIndex, SubgroupBasis};
pub use crate::conetop::Window;
use crate::conetop::{ConeSpace, Variant};
use crate::error::{Error, Result};
use crate::monoid::{MonoidKind, PositivityFunctional};

/// Termination argument for an [`Certificate::OpenChain`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainBound {
    /// `phi >= 0` on `S`, `phi(step) > 0`: `-w - t step` leaves `S` once `t phi(step) > phi(-w)`.
    Functional { phi: PositivityFunctional },
    /// `step` has infinite order modulo `S - S`: each coset meets the chain at most once.
    Transversal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// `x != 0` with `x` and `-x` in `S`: `x` and `0` are not separated.
    NonT0 { x: GroupElement },
    /// `U_n = union over i >= n of x_i + S` with `x_i = (i+1) step`, `i >= 0`,
    /// whose reflected closures have empty intersection.
    OpenChain { step: GroupElement, bound: ChainBound },
    /// The family `x_i + S` with `x_i = i direction`, `i >= 0`, which every
    /// basic neighborhood meets at most once.
    LocFiniteFamily { direction: GroupElement },
    /// One representative of each coset of `S - S`.
    Transversal { representatives: Vec<GroupElement> },
    /// `terms[indices[k]]` converges to `limit`.
    ConvergentSubseq {
        terms: Vec<GroupElement>,
        indices: Vec<usize>,
        limit: GroupElement,
    },
    /// The chain `{n g}` in `S` has no majorant: `phi >= 0` on `S`, `phi(g) > 0`.
    MajorFail { g: GroupElement, phi: PositivityFunctional },
    /// With `c_n = (n+1) step`, `n >= 0`, the set `{0} u (c_0+S) n (c_1+S) n ...`
    /// contains no basic neighborhood of `0`.
    PSpaceFail { step: GroupElement },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::NonT0 { .. } => "non_t0",
            Certificate::OpenChain { .. } => "open_chain",
            Certificate::LocFiniteFamily { .. } => "loc_finite_family",
            Certificate::Transversal { .. } => "transversal",
            Certificate::ConvergentSubseq { .. } => "convergent_subseq",
            Certificate::MajorFail { .. } => "major_fail",
            Certificate::PSpaceFail { .. } => "p_space_fail",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::NonT0 { x } => write!(f, "NON_T0 x={x}"),
            Certificate::OpenChain { step, bound } => match bound {
                ChainBound::Functional { phi } => {
                    write!(f, "OPEN_CHAIN x_i=(i+1)*{step}, phi={}", weights(phi))
                }
                ChainBound::Transversal => write!(f, "OPEN_CHAIN x_i=(i+1)*{step}, transversal"),
            },
            Certificate::LocFiniteFamily { direction } => {
                write!(f, "LOC_FINITE_FAMILY x_i=i*{direction}")
            }
            Certificate::Transversal { representatives } => {
                write!(f, "TRANSVERSAL {} representatives", representatives.len())
            }
            Certificate::ConvergentSubseq { indices, limit, .. } => {
                write!(f, "CONVERGENT_SUBSEQ {} indices -> {limit}", indices.len())
            }
            Certificate::MajorFail { g, phi } => {
                write!(f, "MAJOR_FAIL g={g}, phi={}", weights(phi))
            }
            Certificate::PSpaceFail { step } => write!(f, "P_SPACE_FAIL c_n=(n+1)*{step}"),
        }
    }
}

fn weights(phi: &PositivityFunctional) -> String {
    let w: Vec<String> = phi.weights.iter().map(ToString::to_string).collect();
    format!("({})", w.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationFailure {
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub certificate: String,
    pub passed: bool,
    pub radius: u32,
    pub prefix: usize,
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<VerificationFailure>,
    /// Largest escape index met over the window, where the check has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_escape: Option<usize>,
}

/// `x` nonzero in `U(S)` (cone), or in `S` when `S` is a nontrivial group (cone*).
pub fn make_non_t0(space: &ConeSpace) -> Option<Certificate> {
    let m = space.monoid();
    if space.variant() == Variant::ConeStar && !m.is_group() {
        return None;
    }
    m.generators()
        .iter()
        .zip(m.unit_flags())
        .find(|(g, &u)| u && !g.is_zero())
        .map(|(g, _)| Certificate::NonT0 { x: g.clone() })
}

/// A locally finite family of translates along a free direction of `G/(S-S)`.
pub fn make_nonpseudocompact_family(space: &ConeSpace) -> Option<Certificate> {
    space
        .monoid()
        .span()
        .free_direction()
        .map(|direction| Certificate::LocFiniteFamily { direction })
}

/// An open chain with empty reflected-closure intersection, when the space is
/// not 2-pseudocompact.
pub fn make_2pc_failing_chain(space: &ConeSpace) -> Option<Certificate> {
    let m = space.monoid();
    if let Some(g) = m.non_unit_generator() {
        return Some(Certificate::OpenChain {
            step: g,
            bound: ChainBound::Functional {
                phi: m.positivity().clone(),
            },
        });
    }
    // S is a group of infinite index: walk along a free direction.
    m.span().free_direction().map(|d| Certificate::OpenChain {
        step: d,
        bound: ChainBound::Transversal,
    })
}

pub fn make_major_fail(space: &ConeSpace) -> Option<Certificate> {
    let m = space.monoid();
    m.non_unit_generator().map(|g| Certificate::MajorFail {
        g,
        phi: m.positivity().clone(),
    })
}

/// Cone* only: the chain `c_n = (n+1) g` when majorization fails.
pub fn make_p_space_refuter(space: &ConeSpace) -> Result<Option<Certificate>> {
    if space.variant() != Variant::ConeStar {
        return Err(Error::Contract(
            "P-space refutation applies to the cone* topology".into(),
        ));
    }
    Ok(space
        .monoid()
        .non_unit_generator()
        .map(|step| Certificate::PSpaceFail { step }))
}

/// Coset representatives of `S - S` when the index is finite and at most `cap`.
pub fn make_transversal(space: &ConeSpace, cap: usize) -> Option<Certificate> {
    space
        .monoid()
        .span()
        .coset_representatives(cap)
        .map(|representatives| Certificate::Transversal { representatives })
}

/// For a group `S` of finite index: the terms in the most populated coset of
/// `S` converge to any one of them.
pub fn make_convergent_subsequence(space: &ConeSpace, terms: &[GroupElement]) -> Result<Option<Certificate>> {
    for t in terms {
        space.group().conforms(t)?;
    }
    let m = space.monoid();
    if !m.is_group() || !m.span().index().is_finite() || terms.is_empty() {
        return Ok(None);
    }
    let q = m.span().quotient();
    let images: Vec<Vec<BigInt>> = terms.iter().map(|t| q.image(t)).collect();
    let best = images
        .iter()
        .max_by_key(|img| images.iter().filter(|o| o == img).count())
        .expect("terms are nonempty");
    let indices: Vec<usize> = (0..terms.len()).filter(|&i| &images[i] == best).collect();
    Ok(Some(Certificate::ConvergentSubseq {
        terms: terms.to_vec(),
        limit: terms[indices[0]].clone(),
        indices,
    }))
}

struct Checker<'a> {
    space: &'a ConeSpace,
    window: Window,
    prefix: usize,
    checks: Vec<String>,
    max_escape: Option<usize>,
}

type Verdict = std::result::Result<(), VerificationFailure>;

fn fail(reason: impl Into<String>, counterexample: Option<GroupElement>) -> Verdict {
    Err(VerificationFailure {
        reason: reason.into(),
        counterexample,
    })
}

impl Checker<'_> {
    fn shape(&self, x: &GroupElement, what: &str) -> Result<()> {
        self.space
            .group()
            .conforms(x)
            .map_err(|e| Error::Structural(format!("{what}: {e}")))
    }

    fn phi_shape(&self, phi: &PositivityFunctional) -> Result<()> {
        let r = self.space.group().rank();
        if phi.weights.len() != r {
            return Err(Error::Structural(format!(
                "functional has {} weights, group has free rank {r}",
                phi.weights.len()
            )));
        }
        Ok(())
    }

    fn member(&self, x: &GroupElement) -> bool {
        self.space.monoid().member_unchecked(x)
    }

    fn note(&mut self, s: impl Into<String>) {
        self.checks.push(s.into());
    }

    fn escape(&mut self, e: usize) {
        self.max_escape = Some(self.max_escape.map_or(e, |m| m.max(e)));
    }

    // phi >= 0 on S and phi(g) > 0.
    fn check_functional(&mut self, phi: &PositivityFunctional, g: &GroupElement) -> Verdict {
        let m = self.space.monoid();
        let group = self.space.group();
        match m.kind() {
            MonoidKind::Lex => {
                let (last, rest) = phi.weights.split_last().expect("lex rank is positive");
                if rest.iter().any(|w| !w.is_zero()) || last.is_negative() {
                    return fail("functional is not a nonnegative multiple of the top coordinate", None);
                }
                self.note("phi = c * e_top with c >= 0, hence phi >= 0 on the lex monoid");
            }
            MonoidKind::Generated => {
                for h in m.generators() {
                    if phi.eval(group, h).is_negative() {
                        return fail(format!("phi({h}) < 0 on a generator"), Some(h.clone()));
                    }
                }
                self.note("phi >= 0 on every generator");
            }
        }
        if !phi.eval(group, g).is_positive() {
            return fail(format!("phi({g}) is not positive"), Some(g.clone()));
        }
        self.note(format!("phi({g}) > 0"));
        Ok(())
    }

    fn window_points(&self) -> Result<Vec<GroupElement>> {
        self.window.points(self.space.group())
    }

    fn non_t0(&mut self, x: &GroupElement) -> Result<Verdict> {
        self.shape(x, "x")?;
        let g = self.space.group();
        if x.is_zero() {
            return Ok(fail("x is zero", Some(x.clone())));
        }
        if !self.member(x) {
            return Ok(fail(format!("{x} is not in S"), Some(x.clone())));
        }
        let nx = g.neg(x);
        if !self.member(&nx) {
            return Ok(fail(format!("{nx} is not in S"), Some(nx)));
        }
        self.note("x != 0, x in S, -x in S");
        if self.space.variant() == Variant::ConeStar {
            // Every basic neighborhood of 0 must contain x and vice versa.
            for s in self.window_points()? {
                if !self.member(&s) {
                    continue;
                }
                if !self.member(&g.sub_unchecked(x, &s)) {
                    return Ok(fail(format!("{{0}} u ({s}+S) misses x"), Some(s)));
                }
                if !self.member(&g.sub_unchecked(&nx, &s)) {
                    return Ok(fail(format!("x + ({{0}} u ({s}+S)) misses 0"), Some(s)));
                }
            }
            self.note("every cone* neighborhood of 0 with parameter in the window contains x, and conversely");
        }
        Ok(Ok(()))
    }

    // Unique t with t*d - target in S - S, when d has infinite order there.
    fn coset_multiple(span: &SubgroupBasis, d: &GroupElement, target: &GroupElement) -> Option<BigInt> {
        let q = span.quotient();
        let fd = q.free_image(d);
        let ft = q.free_image(target);
        let k = fd.iter().position(|v| !v.is_zero())?;
        let (t, rem) = ft[k].div_rem(&fd[k]);
        if !rem.is_zero() {
            return None;
        }
        let g = span.group();
        let diff = g.sub_unchecked(&g.scale(d, &t), target);
        span.contains(&diff).ok()?.then_some(t)
    }

    fn infinite_order_mod_span(&self, d: &GroupElement) -> Verdict {
        let span = self.space.monoid().span();
        if span.quotient().free_image(d).iter().all(Zero::is_zero) {
            return fail(format!("{d} has finite order modulo S - S"), Some(d.clone()));
        }
        Ok(())
    }

    fn open_chain(&mut self, step: &GroupElement, bound: &ChainBound) -> Result<Verdict> {
        self.shape(step, "step")?;
        if let ChainBound::Functional { phi } = bound {
            self.phi_shape(phi)?;
        }
        let g = self.space.group().clone();
        self.note("each U_n is a nonempty union of basic open sets and U_n decreases by construction");
        match bound {
            ChainBound::Functional { phi } => {
                if let Err(e) = self.check_functional(phi, step) {
                    return Ok(Err(e));
                }
            }
            ChainBound::Transversal => {
                if let Err(e) = self.infinite_order_mod_span(step) {
                    return Ok(Err(e));
                }
                self.note("step has infinite order modulo S - S");
            }
        }
        // cl(-U_n) = union over i >= n of -x_i - S. For each window point w find
        // the largest t = i + 1 with -w - t*step in S; w leaves cl(-U_n) at n = t.
        let span = self.space.monoid().span().clone();
        for w in self.window_points()? {
            let nw = g.neg(&w);
            let last = match bound {
                ChainBound::Functional { phi } => {
                    let cap = phi.eval(&g, &nw).div_floor(&phi.eval(&g, step));
                    let cap = cap.to_usize().unwrap_or(0);
                    (1..=cap)
                        .rev()
                        .find(|&t| self.member(&g.sub_unchecked(&nw, &g.scale(step, &BigInt::from(t)))))
                        .unwrap_or(0)
                }
                ChainBound::Transversal => match Self::coset_multiple(&span, step, &nw) {
                    Some(t) if t.is_positive() => {
                        let hit = self.member(&g.sub_unchecked(&nw, &g.scale(step, &t)));
                        if hit {
                            t.to_usize().unwrap_or(usize::MAX)
                        } else {
                            0
                        }
                    }
                    _ => 0,
                },
            };
            self.escape(last);
            if last > self.prefix {
                return Ok(fail(
                    format!("{w} lies in cl(-U_n) for every n <= {}", self.prefix),
                    Some(w),
                ));
            }
        }
        self.note(format!(
            "no window point lies in cl(-U_n) for all n <= {}",
            self.prefix
        ));
        Ok(Ok(()))
    }

    fn loc_finite(&mut self, d: &GroupElement) -> Result<Verdict> {
        self.shape(d, "direction")?;
        if let Err(e) = self.infinite_order_mod_span(d) {
            return Ok(Err(e));
        }
        self.note("direction has infinite order modulo S - S");
        // w + S meets x_i + S iff x_i - w in S - S, which fixes i. The direct
        // scan over the first members must agree with the solved index.
        let span = self.space.monoid().span().clone();
        let g = self.space.group().clone();
        for w in self.window_points()? {
            let solved = match Self::coset_multiple(&span, d, &w) {
                Some(t) if !t.is_negative() => t.to_usize(),
                _ => None,
            };
            let mut met = Vec::new();
            for i in 0..=self.prefix {
                let xi = g.scale(d, &BigInt::from(i));
                if span.contains(&g.sub_unchecked(&xi, &w))? {
                    met.push(i);
                }
            }
            let expected: Vec<usize> = solved.into_iter().filter(|&i| i <= self.prefix).collect();
            if met.len() > 1 || met != expected {
                return Ok(fail(
                    format!("neighborhood of {w} meets members {met:?} up to index {}", self.prefix),
                    Some(w),
                ));
            }
            self.escape(solved.map_or(0, |i| i + 1));
        }
        self.note(format!(
            "each window point's neighborhood meets at most one member; direct scan up to index {} agrees",
            self.prefix
        ));
        Ok(Ok(()))
    }

    fn transversal(&mut self, reps: &[GroupElement]) -> Result<Verdict> {
        for r in reps {
            self.shape(r, "representative")?;
        }
        let span = self.space.monoid().span().clone();
        let g = self.space.group().clone();
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                if span.contains(&g.sub_unchecked(a, b))? {
                    return Ok(fail(format!("{a} and {b} share a coset"), Some(b.clone())));
                }
            }
        }
        self.note("representatives lie in distinct cosets");
        match span.index() {
            GroupIndex::Finite(n) if *n == BigInt::from(reps.len()) => {
                self.note(format!("count equals the index {n}"))
            }
            other => {
                return Ok(fail(
                    format!("{} representatives for index {other}", reps.len()),
                    None,
                ))
            }
        }
        for w in self.window_points()? {
            let mut covered = false;
            for r in reps {
                if span.contains(&g.sub_unchecked(&w, r))? {
                    covered = true;
                    break;
                }
            }
            if !covered {
                return Ok(fail(format!("{w} is in no listed coset"), Some(w)));
            }
        }
        self.note("every window point lies in a listed coset");
        Ok(Ok(()))
    }

    fn convergent(&mut self, terms: &[GroupElement], indices: &[usize], limit: &GroupElement) -> Result<Verdict> {
        for t in terms {
            self.shape(t, "term")?;
        }
        self.shape(limit, "limit")?;
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Structural("indices must be nonempty and increasing".into()));
        }
        if indices.iter().any(|&i| i >= terms.len()) {
            return Err(Error::Structural("index beyond the listed terms".into()));
        }
        let g = self.space.group().clone();
        let params: Vec<GroupElement> = match self.space.variant() {
            Variant::Cone => vec![g.zero()],
            Variant::ConeStar => self
                .window_points()?
                .into_iter()
                .filter(|s| self.member(s))
                .collect(),
        };
        for &i in indices.iter().take(self.prefix.max(1)) {
            let t = &terms[i];
            for s in &params {
                if !self.space.in_basic_neighborhood(limit, s, t) {
                    return Ok(fail(
                        format!("term {i} = {t} leaves the neighborhood of {limit} with parameter {s}"),
                        Some(t.clone()),
                    ));
                }
            }
        }
        self.note("every checked subsequence term lies in every checked basic neighborhood of the limit");
        Ok(Ok(()))
    }

    fn major_fail(&mut self, gen: &GroupElement, phi: &PositivityFunctional) -> Result<Verdict> {
        self.shape(gen, "g")?;
        self.phi_shape(phi)?;
        if !self.member(gen) {
            return Ok(fail(format!("{gen} is not in S"), Some(gen.clone())));
        }
        self.note("g in S, so the chain {n g} lies in S");
        let ng = self.space.group().neg(gen);
        if self.member(&ng) {
            return Ok(fail(format!("{ng} is in S"), Some(ng)));
        }
        self.note("-g not in S");
        if let Err(e) = self.check_functional(phi, gen) {
            return Ok(Err(e));
        }
        Ok(Ok(()))
    }

    fn p_space(&mut self, step: &GroupElement) -> Result<Verdict> {
        self.shape(step, "step")?;
        if self.space.variant() != Variant::ConeStar {
            return Err(Error::Structural("P-space refutation needs the cone* topology".into()));
        }
        let g = self.space.group().clone();
        if step.is_zero() || !self.member(step) {
            return Ok(fail(format!("{step} is not a nonzero element of S"), Some(step.clone())));
        }
        self.note("c_n = (n+1)*step are parameters in S");
        // For each s in S n W, some nonzero x in s+S avoids c_n + S for an n <= prefix.
        // x = s is the best choice: s - c_n in S puts all of s+S inside c_n + S.
        for s in self.window_points()? {
            if !self.member(&s) {
                continue;
            }
            let x = if s.is_zero() { step.clone() } else { s.clone() };
            let escape = (0..=self.prefix)
                .find(|&n| !self.member(&g.sub_unchecked(&x, &g.scale(step, &BigInt::from(n + 1)))));
            match escape {
                Some(n) => self.escape(n),
                None => {
                    return Ok(fail(
                        format!(
                            "{{0}} u ({s}+S) stays inside the intersection up to n = {}",
                            self.prefix
                        ),
                        Some(s),
                    ))
                }
            }
        }
        self.note("no basic neighborhood of 0 with parameter in the window fits in the intersection");
        Ok(Ok(()))
    }
}

/// Checks `cert` against the definitions on `window`, up to `prefix`.
pub fn verify(space: &ConeSpace, cert: &Certificate, window: &Window, prefix: usize) -> Result<VerificationReport> {
    let mut c = Checker {
        space,
        window: *window,
        prefix,
        checks: Vec::new(),
        max_escape: None,
    };
    let verdict = match cert {
        Certificate::NonT0 { x } => c.non_t0(x)?,
        Certificate::OpenChain { step, bound } => c.open_chain(step, bound)?,
        Certificate::LocFiniteFamily { direction } => c.loc_finite(direction)?,
        Certificate::Transversal { representatives } => c.transversal(representatives)?,
        Certificate::ConvergentSubseq {
            terms,
            indices,
            limit,
        } => c.convergent(terms, indices, limit)?,
        Certificate::MajorFail { g, phi } => c.major_fail(g, phi)?,
        Certificate::PSpaceFail { step } => c.p_space(step)?,
    };
    Ok(VerificationReport {
        certificate: cert.kind().to_string(),
        passed: verdict.is_ok(),
        radius: window.radius,
        prefix,
        checks: c.checks,
        failure: verdict.err(),
        max_escape: c.max_escape,
    })
}

/// All certificates the constructors produce for `space`.
pub fn all_certificates(space: &ConeSpace) -> Vec<Certificate> {
    let mut out = Vec::new();
    out.extend(make_non_t0(space));
    out.extend(make_nonpseudocompact_family(space));
    out.extend(make_2pc_failing_chain(space));
    out.extend(make_major_fail(space));
    if space.variant() == Variant::ConeStar {
        out.extend(make_p_space_refuter(space).expect("variant checked"));
    }
    out.extend(make_transversal(space, 4096));
    if space.monoid().is_group() && space.monoid().span().index().is_finite() {
        let g = space.group();
        if g.dim() > 0 {
            let terms: Vec<GroupElement> = (0..8).map(|i| g.scale(&g.basis(0), &BigInt::from(i))).collect();
            if let Ok(Some(c)) = make_convergent_subsequence(space, &terms) {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::GroupSpec;
    use crate::monoid::MonoidSpec;

    fn space(rank: usize, torsion: &[i64], gens: &[&[i64]], variant: Variant) -> ConeSpace {
        let g = GroupSpec::from_i64(rank, torsion).unwrap();
        let gens = gens.iter().map(|v| g.element_i64(v).unwrap()).collect();
        ConeSpace::build(g, MonoidSpec::generated(gens), variant).unwrap()
    }

    fn el(s: &ConeSpace, v: &[i64]) -> GroupElement {
        s.group().element_i64(v).unwrap()
    }

    #[test]
    fn non_t0_examples() {
        let s = space(2, &[], &[&[1, 1], &[-1, -1]], Variant::Cone);
        let c = make_non_t0(&s).unwrap();
        assert_eq!(c, Certificate::NonT0 { x: el(&s, &[1, 1]) });
        assert!(verify(&s, &c, &Window::new(4), 8).unwrap().passed);
        let bad = Certificate::NonT0 { x: el(&s, &[1, 0]) };
        let r = verify(&s, &bad, &Window::new(4), 8).unwrap();
        assert!(!r.passed);
        assert!(r.failure.unwrap().reason.contains("not in S"));
        assert!(make_non_t0(&space(1, &[], &[&[1]], Variant::Cone)).is_none());
        assert!(make_non_t0(&space(1, &[], &[], Variant::Cone)).is_none());
    }

    #[test]
    fn families_and_chains() {
        let s = space(2, &[], &[&[1, 0]], Variant::Cone);
        assert_eq!(
            make_nonpseudocompact_family(&s),
            Some(Certificate::LocFiniteFamily {
                direction: el(&s, &[0, 1])
            })
        );
        assert!(make_nonpseudocompact_family(&space(1, &[], &[&[1]], Variant::Cone)).is_none());
        assert!(make_nonpseudocompact_family(&space(2, &[], &[&[1, 0], &[0, 1]], Variant::Cone)).is_none());

        let nat = space(1, &[], &[&[1]], Variant::Cone);
        let chain = make_2pc_failing_chain(&nat).unwrap();
        let r = verify(&nat, &chain, &Window::new(10), 10).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(make_2pc_failing_chain(&space(1, &[], &[&[1], &[-1]], Variant::Cone)).is_none());
    }

    #[test]
    fn p_space_refuters() {
        let nat = space(1, &[], &[&[1]], Variant::ConeStar);
        let c = make_p_space_refuter(&nat).unwrap().unwrap();
        assert_eq!(c, Certificate::PSpaceFail { step: el(&nat, &[1]) });
        assert!(verify(&nat, &c, &Window::new(8), 16).unwrap().passed);
        assert!(make_p_space_refuter(&nat.with_variant(Variant::Cone)).is_err());
        let z = space(1, &[], &[&[1], &[-1]], Variant::ConeStar);
        assert!(make_p_space_refuter(&z).unwrap().is_none());
        let s = space(2, &[], &[&[1, 0], &[1, 1]], Variant::ConeStar);
        assert_eq!(
            make_p_space_refuter(&s).unwrap(),
            Some(Certificate::PSpaceFail { step: el(&s, &[1, 0]) })
        );
    }

    #[test]
    fn mutated_major_fail_is_rejected() {
        let s = space(2, &[], &[&[1, 0], &[1, 1]], Variant::Cone);
        let c = make_major_fail(&s).unwrap();
        assert!(verify(&s, &c, &Window::new(4), 8).unwrap().passed);
        let Certificate::MajorFail { g, phi } = c else { unreachable!() };
        let flipped = Certificate::MajorFail {
            g: s.group().neg(&g),
            phi: phi.clone(),
        };
        assert!(!verify(&s, &flipped, &Window::new(4), 8).unwrap().passed);
        let short = Certificate::MajorFail {
            g,
            phi: PositivityFunctional {
                weights: phi.weights[..1].to_vec(),
            },
        };
        assert!(matches!(
            verify(&s, &short, &Window::new(4), 8),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn convergent_subsequence_for_a_finite_index_group() {
        let s = space(1, &[], &[&[2], &[-2]], Variant::Cone);
        let terms: Vec<GroupElement> = [1, 4, 7, 2, 9, 6].iter().map(|&v| el(&s, &[v])).collect();
        let c = make_convergent_subsequence(&s, &terms).unwrap().unwrap();
        assert!(verify(&s, &c, &Window::new(4), 8).unwrap().passed);
        assert!(make_convergent_subsequence(&space(1, &[], &[&[1]], Variant::Cone), &terms)
            .unwrap()
            .is_none());
    }
}
