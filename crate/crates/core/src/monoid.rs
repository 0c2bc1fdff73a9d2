//! Submonoids `S` (with `0 in S`) of a finitely generated abelian group:
//! membership, the units subgroup `S n (-S)`, the group test and the
//! majorization condition with its certificate.

use std::collections::{BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{int_vec, GroupElement, GroupSpec, SubgroupBasis};
use crate::error::{Error, Result};
use crate::lp::{self, q, q_int, LpOutcome, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonoidKind {
    Generated,
    Lex,
}

/// Description of a monoid: either a finite generator list or the
/// lex-positive family of `Z^lex_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub kind: MonoidKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<GroupElement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lex_rank: Option<usize>,
}

impl MonoidSpec {
    pub fn generated(generators: Vec<GroupElement>) -> Self {
        MonoidSpec {
            kind: MonoidKind::Generated,
            generators,
            lex_rank: None,
        }
    }

    pub fn lex(rank: usize) -> Self {
        MonoidSpec {
            kind: MonoidKind::Lex,
            generators: Vec::new(),
            lex_rank: Some(rank),
        }
    }
}

impl fmt::Display for MonoidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MonoidKind::Lex => write!(f, "LEX({})", self.lex_rank.unwrap_or(0)),
            MonoidKind::Generated => {
                write!(f, "<")?;
                for (i, g) in self.generators.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, ">")
            }
        }
    }
}

/// Integer functional `x -> weights . free_part(x)` on `G`, vanishing on the
/// units of `S` and nonnegative on `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PositivityFunctional {
    #[serde(with = "int_vec")]
    pub weights: Vec<BigInt>,
}

impl PositivityFunctional {
    pub fn eval(&self, group: &GroupSpec, x: &GroupElement) -> BigInt {
        self.weights
            .iter()
            .zip(group.free_part(x))
            .map(|(w, c)| w * c)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MajorizationWitness {
    /// `S` is a group, so `a = 0` majorizes every subset.
    Group,
    /// `phi >= 0` on `S` and `phi(g) > 0`: no `a` has `a - n g in S` for all `n`.
    Chain {
        g: GroupElement,
        phi: PositivityFunctional,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub witness: MajorizationWitness,
}

// Elements of the image monoid in G/U(S) with phi <= level, grown lazily.
#[derive(Debug, Default)]
struct Ball {
    seen: HashSet<Vec<BigInt>>,
    frontier: BinaryHeap<Reverse<(BigInt, Vec<BigInt>)>>,
    level: Option<BigInt>,
}

/// A monoid together with its precomputed structure.
#[derive(Debug)]
pub struct Monoid {
    group: GroupSpec,
    spec: MonoidSpec,
    unit_flags: Vec<bool>,
    units: SubgroupBasis,
    span: SubgroupBasis,
    phi: PositivityFunctional,
    ball: Mutex<Ball>,
}

impl Clone for Monoid {
    fn clone(&self) -> Self {
        Monoid {
            group: self.group.clone(),
            spec: self.spec.clone(),
            unit_flags: self.unit_flags.clone(),
            units: self.units.clone(),
            span: self.span.clone(),
            phi: self.phi.clone(),
            ball: Mutex::new(Ball::default()),
        }
    }
}

fn free_vec(group: &GroupSpec, x: &GroupElement) -> Vec<BigInt> {
    group.free_part(x).to_vec()
}

impl Monoid {
    pub fn new(group: GroupSpec, spec: MonoidSpec) -> Result<Self> {
        match spec.kind {
            MonoidKind::Lex => {
                let n = spec
                    .lex_rank
                    .ok_or_else(|| Error::Monoid("lex monoid needs lex_rank".into()))?;
                if n == 0 {
                    return Err(Error::Monoid("lex_rank must be positive".into()));
                }
                if group.rank() != n || !group.torsion().is_empty() {
                    return Err(Error::Monoid(format!(
                        "lex monoid of rank {n} lives in Z^{n}, not in {group}"
                    )));
                }
                if !spec.generators.is_empty() {
                    return Err(Error::Monoid("lex monoid takes no generators".into()));
                }
                let units = group.subgroup(&[])?;
                let span = group.subgroup(&(0..n).map(|i| group.basis(i)).collect::<Vec<_>>())?;
                let mut weights = vec![BigInt::zero(); n];
                weights[n - 1] = BigInt::one();
                Ok(Monoid {
                    group,
                    spec,
                    unit_flags: Vec::new(),
                    units,
                    span,
                    phi: PositivityFunctional { weights },
                    ball: Mutex::new(Ball::default()),
                })
            }
            MonoidKind::Generated => {
                if spec.lex_rank.is_some() {
                    return Err(Error::Monoid("lex_rank given for a generated monoid".into()));
                }
                for g in &spec.generators {
                    group.conforms(g)?;
                }
                let gens = &spec.generators;
                let free: Vec<Vec<BigInt>> = gens.iter().map(|g| free_vec(&group, g)).collect();
                // g is a unit iff -pi(g) lies in the rational cone of the generator
                // images pi = free part: a rational relation clears to an element of S
                // with torsion image, which is then a unit having g as a summand.
                let unit_flags: Vec<bool> = free
                    .iter()
                    .map(|v| {
                        let neg: Vec<BigInt> = v.iter().map(|c| -c).collect();
                        lp::in_cone(&free, &neg)
                    })
                    .collect();
                let unit_gens: Vec<GroupElement> = gens
                    .iter()
                    .zip(&unit_flags)
                    .filter(|(_, &u)| u)
                    .map(|(g, _)| g.clone())
                    .collect();
                let units = group.subgroup(&unit_gens)?;
                let span = group.subgroup(gens)?;
                let phi = synthesize_phi(&group, &free, &unit_flags);
                Ok(Monoid {
                    group,
                    spec,
                    unit_flags,
                    units,
                    span,
                    phi,
                    ball: Mutex::new(Ball::default()),
                })
            }
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn spec(&self) -> &MonoidSpec {
        &self.spec
    }

    pub fn kind(&self) -> MonoidKind {
        self.spec.kind
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.spec.generators
    }

    /// Which generators are invertible in `S`.
    pub fn unit_flags(&self) -> &[bool] {
        &self.unit_flags
    }

    /// The subgroup `U(S) = S n (-S)`.
    pub fn units(&self) -> &SubgroupBasis {
        &self.units
    }

    /// The subgroup `S - S = <S>`.
    pub fn span(&self) -> &SubgroupBasis {
        &self.span
    }

    pub fn positivity(&self) -> &PositivityFunctional {
        &self.phi
    }

    pub fn phi(&self, x: &GroupElement) -> BigInt {
        self.phi.eval(&self.group, x)
    }

    pub fn is_group(&self) -> bool {
        match self.spec.kind {
            MonoidKind::Lex => false,
            MonoidKind::Generated => self.unit_flags.iter().all(|&u| u),
        }
    }

    /// `S = {0}`.
    pub fn is_trivial(&self) -> bool {
        match self.spec.kind {
            MonoidKind::Lex => false,
            MonoidKind::Generated => self.spec.generators.iter().all(GroupElement::is_zero),
        }
    }

    /// First generator that is not a unit (`e_top` for the lex family).
    pub fn non_unit_generator(&self) -> Option<GroupElement> {
        match self.spec.kind {
            MonoidKind::Lex => Some(self.group.basis(self.group.rank() - 1)),
            MonoidKind::Generated => self
                .spec
                .generators
                .iter()
                .zip(&self.unit_flags)
                .find(|(_, &u)| !u)
                .map(|(g, _)| g.clone()),
        }
    }

    pub fn member(&self, x: &GroupElement) -> Result<bool> {
        self.group.conforms(x)?;
        Ok(self.member_unchecked(x))
    }

    pub(crate) fn member_unchecked(&self, x: &GroupElement) -> bool {
        match self.spec.kind {
            MonoidKind::Lex => lex_positive(x.coords()),
            MonoidKind::Generated => {
                let level = self.phi(x);
                if level.is_negative() {
                    return false;
                }
                let target = self.units.quotient().image(x);
                if target.iter().all(Zero::is_zero) {
                    return true;
                }
                let mut ball = self.ball.lock().unwrap_or_else(|e| e.into_inner());
                self.grow(&mut ball, &level);
                ball.seen.contains(&target)
            }
        }
    }

    // Discovers every image with phi <= level; phi >= 1 on non-unit generators
    // makes this finite.
    fn grow(&self, ball: &mut Ball, level: &BigInt) {
        if ball.level.as_ref().is_some_and(|l| l >= level) {
            return;
        }
        let quotient = self.units.quotient();
        let steps: Vec<(BigInt, Vec<BigInt>)> = self
            .spec
            .generators
            .iter()
            .zip(&self.unit_flags)
            .filter(|(_, &u)| !u)
            .map(|(g, _)| (self.phi(g), quotient.image(g)))
            .collect();
        let moduli = quotient.moduli();
        if ball.level.is_none() {
            let zero = vec![BigInt::zero(); moduli.len()];
            ball.seen.insert(zero.clone());
            ball.frontier.push(Reverse((BigInt::zero(), zero)));
        }
        while let Some(Reverse((v, _))) = ball.frontier.peek() {
            if v > level {
                break;
            }
            let Some(Reverse((v, img))) = ball.frontier.pop() else { break };
            for (w, step) in &steps {
                let next: Vec<BigInt> = img
                    .iter()
                    .zip(step)
                    .zip(moduli)
                    .map(|((a, b), m)| match m {
                        Some(m) => (a + b).mod_floor(m),
                        None => a + b,
                    })
                    .collect();
                if ball.seen.insert(next.clone()) {
                    ball.frontier.push(Reverse((&v + w, next)));
                }
            }
        }
        ball.level = Some(level.clone());
    }

    pub fn majorization(&self) -> MajorizationVerdict {
        match self.non_unit_generator() {
            None => MajorizationVerdict {
                holds: true,
                witness: MajorizationWitness::Group,
            },
            Some(g) => MajorizationVerdict {
                holds: false,
                witness: MajorizationWitness::Chain {
                    g,
                    phi: self.phi.clone(),
                },
            },
        }
    }

    /// Existence of a countable `C` in `S` with `S` inside `C - S`: always true
    /// here, with `C = S` (countable) and `s = s - 0`.
    pub fn countable_cofinal_exists(&self) -> bool {
        true
    }
}

/// `x = 0` or the highest-index nonzero coordinate of `x` is positive.
pub fn lex_positive(coords: &[BigInt]) -> bool {
    match coords.iter().rev().find(|c| !c.is_zero()) {
        None => true,
        Some(c) => c.is_positive(),
    }
}

// Integer weights w on the free coordinates with w(u) = 0 on unit generators and
// w(h) >= 1 on the others; minimizes the total excess so the result is small.
fn synthesize_phi(group: &GroupSpec, free: &[Vec<BigInt>], unit_flags: &[bool]) -> PositivityFunctional {
    let r = group.rank();
    let non_units: Vec<&Vec<BigInt>> = free
        .iter()
        .zip(unit_flags)
        .filter(|(_, &u)| !u)
        .map(|(v, _)| v)
        .collect();
    if non_units.is_empty() {
        return PositivityFunctional {
            weights: vec![BigInt::zero(); r],
        };
    }
    // Columns: w+ (r), w- (r), slack per non-unit.
    let k = non_units.len();
    let n = 2 * r + k;
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut b: Vec<Q> = Vec::new();
    for (v, _) in free.iter().zip(unit_flags).filter(|(_, &u)| u) {
        let mut row = vec![q(0); n];
        for i in 0..r {
            row[i] = q_int(&v[i]);
            row[r + i] = -q_int(&v[i]);
        }
        a.push(row);
        b.push(q(0));
    }
    for (j, v) in non_units.iter().enumerate() {
        let mut row = vec![q(0); n];
        for i in 0..r {
            row[i] = q_int(&v[i]);
            row[r + i] = -q_int(&v[i]);
        }
        row[2 * r + j] = q(-1);
        a.push(row);
        b.push(q(1));
    }
    let mut c = vec![q(0); n];
    for v in &mut c[2 * r..] {
        *v = q(1);
    }
    let x = match lp::minimize(&c, &a, &b) {
        LpOutcome::Optimal { x, .. } => x,
        // The cone of non-unit images is pointed modulo the units, so the
        // system is always feasible and bounded below by 0.
        other => unreachable!("positivity system not solvable: {other:?}"),
    };
    let w: Vec<Q> = (0..r).map(|i| &x[i] - &x[r + i]).collect();
    let denom = w.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut weights: Vec<BigInt> = w.iter().map(|v| (v * q_int(&denom)).to_integer()).collect();
    let g = weights.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in &mut weights {
            *v = &*v / &g;
        }
    }
    PositivityFunctional { weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen_monoid(rank: usize, torsion: &[i64], gens: &[&[i64]]) -> Monoid {
        let g = GroupSpec::from_i64(rank, torsion).unwrap();
        let gens = gens.iter().map(|v| g.element_i64(v).unwrap()).collect();
        Monoid::new(g, MonoidSpec::generated(gens)).unwrap()
    }

    fn mem(m: &Monoid, v: &[i64]) -> bool {
        m.member(&m.group().element_i64(v).unwrap()).unwrap()
    }

    #[test]
    fn membership_in_a_simplicial_monoid() {
        let m = gen_monoid(2, &[], &[&[1, 0], &[1, 1]]);
        assert!(mem(&m, &[3, 2]));
        assert!(!mem(&m, &[2, 3]));
        assert!(mem(&m, &[0, 0]));
        assert!(!m.is_group());
        assert_eq!(m.positivity().weights, vec![BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn unit_detection() {
        let m = gen_monoid(2, &[], &[&[1, 1], &[-1, -1], &[1, 0]]);
        assert_eq!(m.unit_flags(), &[true, true, false]);
        let u = m.units();
        assert!(u.contains(&m.group().element_i64(&[-3, -3]).unwrap()).unwrap());
        assert!(!u.contains(&m.group().element_i64(&[1, 0]).unwrap()).unwrap());
        assert!(mem(&m, &[-4, -5]));
        assert!(!mem(&m, &[-1, 0]));

        let z = gen_monoid(1, &[], &[&[1], &[-1]]);
        assert!(z.units().is_whole_group() && z.is_group());

        let t = gen_monoid(1, &[2], &[&[0, 1]]);
        assert_eq!(t.unit_flags(), &[true]);
    }

    #[test]
    fn hidden_units_through_rational_relations() {
        // 2*(1) + (-2) = 0, so 1 and -2 are both units.
        let m = gen_monoid(1, &[], &[&[1], &[-2]]);
        assert!(m.is_group());
        assert!(mem(&m, &[-1]));
    }

    #[test]
    fn group_test() {
        assert!(!gen_monoid(1, &[], &[&[1]]).is_group());
        assert!(gen_monoid(1, &[], &[&[2], &[-2], &[3], &[-3]]).is_group());
        let trivial = gen_monoid(1, &[], &[]);
        assert!(trivial.is_group() && trivial.is_trivial());
        assert!(!mem(&trivial, &[1]));
    }

    #[test]
    fn majorization_verdicts() {
        let nat = gen_monoid(1, &[], &[&[1]]);
        let v = nat.majorization();
        assert!(!v.holds);
        match v.witness {
            MajorizationWitness::Chain { g, phi } => {
                assert_eq!(g, nat.group().element_i64(&[1]).unwrap());
                assert_eq!(phi.weights, vec![BigInt::from(1)]);
            }
            MajorizationWitness::Group => panic!("expected a chain"),
        }
        assert!(gen_monoid(1, &[], &[&[1], &[-1]]).majorization().holds);

        let lex = Monoid::new(GroupSpec::free(2), MonoidSpec::lex(2)).unwrap();
        match lex.majorization().witness {
            MajorizationWitness::Chain { g, .. } => {
                assert_eq!(g, lex.group().element_i64(&[0, 1]).unwrap())
            }
            MajorizationWitness::Group => panic!("expected a chain"),
        }
    }

    #[test]
    fn lex_membership() {
        let lex = Monoid::new(GroupSpec::free(3), MonoidSpec::lex(3)).unwrap();
        assert!(mem(&lex, &[0, 0, 0]));
        assert!(mem(&lex, &[-5, 7, 0]));
        assert!(!mem(&lex, &[9, 9, -1]));
        assert!(lex.span().is_whole_group());
        assert!(Monoid::new(GroupSpec::free(2), MonoidSpec::lex(3)).is_err());
    }

    #[test]
    fn torsion_mixed_membership() {
        // Z + Z/4 with S = <(1,1), (0,2)>
        let m = gen_monoid(1, &[4], &[&[1, 1], &[0, 2]]);
        assert!(mem(&m, &[1, 3]));
        assert!(mem(&m, &[2, 0]));
        assert!(!mem(&m, &[0, 1]));
        assert!(!mem(&m, &[-1, 1]));
    }
}
