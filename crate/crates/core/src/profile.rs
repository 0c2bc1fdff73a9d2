//! Property profiles of the cone and cone* topologies, read off from the
//! algebraic characterizations, with the implication graph as a consistency net.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::abelian::GroupSpec;
use crate::conetop::{ConeSpace, Variant};
use crate::monoid::MonoidSpec;
use crate::witness::{self, Certificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyName {
    T0,
    T1,
    Hausdorff,
    Compact,
    OmegaBounded,
    TotallyCountablyCompact,
    SequentiallyCompact,
    CountablyCompact,
    TwoPseudocompact,
    CountablyPracompact,
    Pseudocompact,
    Precompact,
    FinallyCompact,
    LeftOmegaPrecompact,
    PSpace,
    TopologicallyPeriodic,
    BaireConditional,
}

impl PropertyName {
    pub const ALL: [PropertyName; 17] = [
        PropertyName::T0,
        PropertyName::T1,
        PropertyName::Hausdorff,
        PropertyName::Compact,
        PropertyName::OmegaBounded,
        PropertyName::TotallyCountablyCompact,
        PropertyName::SequentiallyCompact,
        PropertyName::CountablyCompact,
        PropertyName::TwoPseudocompact,
        PropertyName::CountablyPracompact,
        PropertyName::Pseudocompact,
        PropertyName::Precompact,
        PropertyName::FinallyCompact,
        PropertyName::LeftOmegaPrecompact,
        PropertyName::PSpace,
        PropertyName::TopologicallyPeriodic,
        PropertyName::BaireConditional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PropertyName::T0 => "T0",
            PropertyName::T1 => "T1",
            PropertyName::Hausdorff => "HAUSDORFF",
            PropertyName::Compact => "COMPACT",
            PropertyName::OmegaBounded => "OMEGA_BOUNDED",
            PropertyName::TotallyCountablyCompact => "TOTALLY_COUNTABLY_COMPACT",
            PropertyName::SequentiallyCompact => "SEQUENTIALLY_COMPACT",
            PropertyName::CountablyCompact => "COUNTABLY_COMPACT",
            PropertyName::TwoPseudocompact => "TWO_PSEUDOCOMPACT",
            PropertyName::CountablyPracompact => "COUNTABLY_PRACOMPACT",
            PropertyName::Pseudocompact => "PSEUDOCOMPACT",
            PropertyName::Precompact => "PRECOMPACT",
            PropertyName::FinallyCompact => "FINALLY_COMPACT",
            PropertyName::LeftOmegaPrecompact => "LEFT_OMEGA_PRECOMPACT",
            PropertyName::PSpace => "P_SPACE",
            PropertyName::TopologicallyPeriodic => "TOPOLOGICALLY_PERIODIC",
            PropertyName::BaireConditional => "BAIRE_CONDITIONAL",
        }
    }

    /// Accepts `TWO_PSEUDOCOMPACT`, `two-pseudocompact`, `2pc` style spellings.
    pub fn parse(s: &str) -> Option<PropertyName> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        let alias = match norm.as_str() {
            "2PSEUDOCOMPACT" | "2PC" => Some(PropertyName::TwoPseudocompact),
            "T2" => Some(PropertyName::Hausdorff),
            "LINDELOF" => Some(PropertyName::FinallyCompact),
            "BAIRE" => Some(PropertyName::BaireConditional),
            _ => None,
        };
        alias.or_else(|| {
            PropertyName::ALL
                .into_iter()
                .find(|p| p.as_str().replace('_', "") == norm)
        })
    }
}

impl fmt::Display for PropertyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// The characterization a verdict was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ConeSeparation,
    ConeCompact,
    ConeTwoPseudocompact,
    ConePseudocompact,
    ConePeriodic,
    CountableCarrier,
    StarSeparation,
    StarCompact,
    StarCountablyPracompact,
    StarTwoPseudocompact,
    StarPseudocompact,
    StarPSpace,
    StarBaire,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::ConeSeparation => "cone-separation",
            Rule::ConeCompact => "cone-compact",
            Rule::ConeTwoPseudocompact => "cone-two-pseudocompact",
            Rule::ConePseudocompact => "cone-pseudocompact",
            Rule::ConePeriodic => "cone-periodic",
            Rule::CountableCarrier => "countable-carrier",
            Rule::StarSeparation => "star-separation",
            Rule::StarCompact => "star-compact",
            Rule::StarCountablyPracompact => "star-countably-pracompact",
            Rule::StarTwoPseudocompact => "star-two-pseudocompact",
            Rule::StarPseudocompact => "star-pseudocompact",
            Rule::StarPSpace => "star-p-space",
            Rule::StarBaire => "star-baire",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Rule::ConeSeparation => "cone: T0 iff S has no units but 0; T1 iff Hausdorff iff S = {0}",
            Rule::ConeCompact => {
                "cone: compact, omega-bounded, totally countably compact and precompact iff S is a subgroup of finite index"
            }
            Rule::ConeTwoPseudocompact => {
                "cone: sequentially compact, countably compact and 2-pseudocompact iff |G:(S-S)| is finite and every countable C in S has a majorant a with C in a-S"
            }
            Rule::ConePseudocompact => "cone: countably pracompact and pseudocompact iff |G:(S-S)| is finite",
            Rule::ConePeriodic => "cone: topologically periodic iff S is a subgroup and G/S is periodic",
            Rule::CountableCarrier => {
                "finally compact iff left omega-precompact; both hold since G is countable"
            }
            Rule::StarSeparation => {
                "cone*: T0 iff T1 iff S = {0} or S is not a group; Hausdorff iff S = {0}"
            }
            Rule::StarCompact => {
                "cone*: compact, omega-bounded, totally countably compact, sequentially compact, countably compact and precompact iff S is a subgroup of finite index"
            }
            Rule::StarCountablyPracompact => {
                "cone*: countably pracompact iff |G:(S-S)| is finite and some countable C in S has S in C-S"
            }
            Rule::StarTwoPseudocompact => {
                "cone*: 2-pseudocompact iff |G:(S-S)| is finite and every countable C in S has a majorant in S"
            }
            Rule::StarPseudocompact => "cone*: pseudocompact iff |G:(S-S)| is finite",
            Rule::StarPSpace => "cone*: P-space iff every countable C in S has a majorant in S",
            Rule::StarBaire => "cone*, when countably pracompact: Baire iff S is a group",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub rule: Rule,
    pub basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub note: String,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyProfile {
    pub group: GroupSpec,
    pub monoid: MonoidSpec,
    pub variant: Variant,
    pub verdicts: BTreeMap<PropertyName, Verdict>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

impl PropertyProfile {
    pub fn get(&self, p: PropertyName) -> Option<&Verdict> {
        self.verdicts.get(&p)
    }

    pub fn holds(&self, p: PropertyName) -> Option<bool> {
        self.get(p).map(|v| v.holds)
    }

    pub fn set(&mut self, p: PropertyName, holds: bool) {
        if let Some(v) = self.verdicts.get_mut(&p) {
            v.holds = holds;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub detail: String,
}

struct Facts {
    group: bool,
    finite: bool,
    major: bool,
    cofinal: bool,
    periodic: bool,
}

fn facts(space: &ConeSpace) -> Facts {
    let m = space.monoid();
    let group = m.is_group();
    Facts {
        group,
        finite: m.span().index().is_finite(),
        major: m.majorization().holds,
        cofinal: m.countable_cofinal_exists(),
        periodic: group && m.span().quotient_is_periodic(),
    }
}

fn failing_certificate(space: &ConeSpace, p: PropertyName, f: &Facts) -> Option<Certificate> {
    use PropertyName::*;
    match p {
        T0 => witness::make_non_t0(space),
        Compact | OmegaBounded | TotallyCountablyCompact | SequentiallyCompact | CountablyCompact
        | TwoPseudocompact => witness::make_2pc_failing_chain(space),
        CountablyPracompact | Pseudocompact => witness::make_nonpseudocompact_family(space),
        Precompact | TopologicallyPeriodic => {
            if f.group {
                witness::make_nonpseudocompact_family(space)
            } else {
                witness::make_major_fail(space)
            }
        }
        PSpace => witness::make_p_space_refuter(space).ok().flatten(),
        _ => None,
    }
}

/// Evaluates every characterized property of `space`.
pub fn evaluate(space: &ConeSpace) -> PropertyProfile {
    use PropertyName::*;
    let f = facts(space);
    let sep = space.separation();
    let mut rows: Vec<(PropertyName, bool, Rule)> = Vec::new();
    let mut annotations = Vec::new();
    match space.variant() {
        Variant::Cone => {
            rows.extend([(T0, sep.t0), (T1, sep.t1), (Hausdorff, sep.hausdorff)].map(|(p, h)| (p, h, Rule::ConeSeparation)));
            let compact = f.group && f.finite;
            for p in [Compact, OmegaBounded, TotallyCountablyCompact, Precompact] {
                rows.push((p, compact, Rule::ConeCompact));
            }
            let cc = f.finite && f.major;
            for p in [SequentiallyCompact, CountablyCompact, TwoPseudocompact] {
                rows.push((p, cc, Rule::ConeTwoPseudocompact));
            }
            for p in [CountablyPracompact, Pseudocompact] {
                rows.push((p, f.finite, Rule::ConePseudocompact));
            }
            rows.push((TopologicallyPeriodic, f.periodic, Rule::ConePeriodic));
            if cc {
                annotations.push(Annotation {
                    note: "every power of the cone space is countably compact".into(),
                    rule: Rule::ConeTwoPseudocompact,
                });
            }
            if f.finite {
                annotations.push(Annotation {
                    note: "every power of the cone space is countably pracompact".into(),
                    rule: Rule::ConePseudocompact,
                });
            }
        }
        Variant::ConeStar => {
            rows.extend([(T0, sep.t0), (T1, sep.t1), (Hausdorff, sep.hausdorff)].map(|(p, h)| (p, h, Rule::StarSeparation)));
            let compact = f.group && f.finite;
            for p in [
                Compact,
                OmegaBounded,
                TotallyCountablyCompact,
                SequentiallyCompact,
                CountablyCompact,
                Precompact,
            ] {
                rows.push((p, compact, Rule::StarCompact));
            }
            let cpc = f.finite && f.cofinal;
            rows.push((CountablyPracompact, cpc, Rule::StarCountablyPracompact));
            rows.push((TwoPseudocompact, f.finite && f.major, Rule::StarTwoPseudocompact));
            rows.push((Pseudocompact, f.finite, Rule::StarPseudocompact));
            rows.push((PSpace, f.major, Rule::StarPSpace));
            if cpc {
                rows.push((BaireConditional, f.group, Rule::StarBaire));
                annotations.push(Annotation {
                    note: "every power of the cone* space is countably pracompact".into(),
                    rule: Rule::StarCountablyPracompact,
                });
            }
            if f.finite && f.major {
                annotations.push(Annotation {
                    note: "every finite power of the cone* group and every power of S-S is 2-pseudocompact".into(),
                    rule: Rule::StarTwoPseudocompact,
                });
            }
        }
    }
    rows.push((FinallyCompact, true, Rule::CountableCarrier));
    rows.push((LeftOmegaPrecompact, true, Rule::CountableCarrier));

    let verdicts = rows
        .into_iter()
        .map(|(p, holds, rule)| {
            let certificate = if holds { None } else { failing_certificate(space, p, &f) };
            (
                p,
                Verdict {
                    holds,
                    rule,
                    basis: rule.statement().to_string(),
                    certificate,
                },
            )
        })
        .collect();
    PropertyProfile {
        group: space.group().clone(),
        monoid: space.monoid().spec().clone(),
        variant: space.variant(),
        verdicts,
        annotations,
    }
}

fn implies(out: &mut Vec<Violation>, p: &PropertyProfile, a: PropertyName, b: PropertyName) {
    if let (Some(true), Some(false)) = (p.holds(a), p.holds(b)) {
        out.push(Violation {
            rule: format!("{a} => {b}"),
            detail: format!("{} holds but {b} fails", a),
        });
    }
}

fn iff(out: &mut Vec<Violation>, name: String, lhs: Option<bool>, rhs: Option<bool>) {
    if let (Some(l), Some(r)) = (lhs, rhs) {
        if l != r {
            out.push(Violation {
                detail: format!("left side {l}, right side {r}"),
                rule: name,
            });
        }
    }
}

fn both(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    Some(a? && b?)
}

/// Breaches of the general implications between the compactness-type properties.
pub fn check_implications(p: &PropertyProfile) -> Vec<Violation> {
    use PropertyName::*;
    let mut out = Vec::new();
    let chain = [
        Compact,
        OmegaBounded,
        TotallyCountablyCompact,
        CountablyCompact,
        CountablyPracompact,
        Pseudocompact,
    ];
    for w in chain.windows(2) {
        implies(&mut out, p, w[0], w[1]);
    }
    implies(&mut out, p, SequentiallyCompact, CountablyCompact);
    implies(&mut out, p, CountablyCompact, TwoPseudocompact);
    iff(
        &mut out,
        "COMPACT <=> COUNTABLY_COMPACT & FINALLY_COMPACT".into(),
        p.holds(Compact),
        both(p.holds(CountablyCompact), p.holds(FinallyCompact)),
    );
    out
}

/// Consistency between the two topologies on the same `(G, S)`: the cone*
/// topology is finer, plus the cone*-specific equivalences.
pub fn cross_variant_check(cone: &PropertyProfile, star: &PropertyProfile) -> Vec<Violation> {
    use PropertyName::*;
    let mut out = Vec::new();
    if cone.group != star.group || cone.monoid != star.monoid {
        out.push(Violation {
            rule: "same instance".into(),
            detail: "profiles describe different (G, S)".into(),
        });
        return out;
    }
    if cone.variant != Variant::Cone || star.variant != Variant::ConeStar {
        out.push(Violation {
            rule: "variants".into(),
            detail: format!("expected cone and cone-star, got {} and {}", cone.variant, star.variant),
        });
        return out;
    }
    for p in [
        Compact,
        CountablyCompact,
        SequentiallyCompact,
        TwoPseudocompact,
        Pseudocompact,
        CountablyPracompact,
        Precompact,
    ] {
        if let (Some(true), Some(false)) = (star.holds(p), cone.holds(p)) {
            out.push(Violation {
                rule: format!("cone* {p} => cone {p}"),
                detail: format!("{p} holds for cone* but fails for cone"),
            });
        }
    }
    iff(
        &mut out,
        "cone*: TWO_PSEUDOCOMPACT <=> COMPACT".into(),
        star.holds(TwoPseudocompact),
        star.holds(Compact),
    );
    iff(
        &mut out,
        "cone*: COMPACT <=> COUNTABLY_PRACOMPACT & TWO_PSEUDOCOMPACT".into(),
        star.holds(Compact),
        both(star.holds(CountablyPracompact), star.holds(TwoPseudocompact)),
    );
    iff(
        &mut out,
        "cone*: TWO_PSEUDOCOMPACT <=> PSEUDOCOMPACT & P_SPACE".into(),
        star.holds(TwoPseudocompact),
        both(star.holds(Pseudocompact), star.holds(PSpace)),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::MonoidSpec;
    use PropertyName::*;

    fn prof(rank: usize, torsion: &[i64], gens: &[&[i64]], v: Variant) -> PropertyProfile {
        let g = GroupSpec::from_i64(rank, torsion).unwrap();
        let gens = gens.iter().map(|x| g.element_i64(x).unwrap()).collect();
        evaluate(&ConeSpace::build(g, MonoidSpec::generated(gens), v).unwrap())
    }

    #[test]
    fn naturals_in_the_integers() {
        let p = prof(1, &[], &[&[1]], Variant::Cone);
        assert_eq!(p.holds(T0), Some(true));
        assert_eq!(p.holds(Pseudocompact), Some(true));
        assert_eq!(p.holds(CountablyPracompact), Some(true));
        assert_eq!(p.holds(TwoPseudocompact), Some(false));
        assert_eq!(p.holds(Compact), Some(false));
        assert_eq!(p.get(TwoPseudocompact).unwrap().rule, Rule::ConeTwoPseudocompact);
        assert!(p.get(TwoPseudocompact).unwrap().certificate.is_some());
        assert!(check_implications(&p).is_empty());

        let s = prof(1, &[], &[&[1]], Variant::ConeStar);
        assert!(cross_variant_check(&p, &s).is_empty());
        assert_eq!(s.holds(PSpace), Some(false));
        assert_eq!(s.holds(Pseudocompact), Some(true));
        assert_eq!(s.holds(BaireConditional), Some(false));
    }

    #[test]
    fn even_integers_are_compact() {
        let p = prof(1, &[], &[&[2], &[-2]], Variant::Cone);
        assert_eq!(p.holds(Compact), Some(true));
        assert!(check_implications(&p).is_empty());
        let s = prof(1, &[], &[&[2], &[-2]], Variant::ConeStar);
        assert_eq!(s.holds(Compact), Some(true));
        assert_eq!(s.holds(CountablyPracompact), Some(true));
        assert_eq!(s.holds(TwoPseudocompact), Some(true));
        assert!(cross_variant_check(&p, &s).is_empty());
        assert!(s.verdicts.values().all(|v| v.holds || v.certificate.is_some() || v.rule == Rule::StarSeparation));
    }

    #[test]
    fn lex_plane_star() {
        let g = GroupSpec::free(2);
        let p = evaluate(&ConeSpace::build(g, MonoidSpec::lex(2), Variant::ConeStar).unwrap());
        assert_eq!(p.holds(T1), Some(true));
        assert_eq!(p.holds(Pseudocompact), Some(true));
        assert_eq!(p.holds(TwoPseudocompact), Some(false));
        assert_eq!(p.holds(PSpace), Some(false));
        assert_eq!(p.holds(CountablyPracompact), Some(true));
        assert_eq!(p.holds(Precompact), Some(false));
    }

    #[test]
    fn mutated_profile_breaks_the_chain() {
        let mut p = prof(1, &[], &[&[1]], Variant::Cone);
        p.set(Compact, true);
        p.set(OmegaBounded, true);
        p.set(TotallyCountablyCompact, true);
        p.set(CountablyCompact, true);
        p.set(SequentiallyCompact, true);
        p.set(TwoPseudocompact, true);
        p.set(CountablyPracompact, true);
        p.set(Pseudocompact, false);
        assert_eq!(check_implications(&p).len(), 1);
    }

    #[test]
    fn property_names_parse() {
        assert_eq!(PropertyName::parse("pseudocompact"), Some(Pseudocompact));
        assert_eq!(PropertyName::parse("two-pseudocompact"), Some(TwoPseudocompact));
        assert_eq!(PropertyName::parse("P_SPACE"), Some(PSpace));
        assert_eq!(PropertyName::parse("nonsense"), None);
        for p in PropertyName::ALL {
            assert_eq!(PropertyName::parse(p.as_str()), Some(p));
        }
    }
}
