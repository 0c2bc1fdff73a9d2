//! Exact arithmetic in finitely generated abelian groups `Z^r + Z/d_1 + ... + Z/d_m`.

mod int_serde;
mod matrix;
mod snf;
mod subgroup;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use int_serde::{scalar as int_scalar, vec as int_vec};
pub use matrix::IntMatrix;
pub use snf::{hermite_normal_form, smith_normal_form, HermiteForm, SmithForm};
pub use subgroup::{GroupIndex, QuotientMap, SubgroupBasis};

/// The group `Z^rank + Z/torsion[0] + ...` with torsion normalized to a
/// divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGroupSpec")]
pub struct GroupSpec {
    rank: usize,
    #[serde(with = "int_serde::vec")]
    torsion: Vec<BigInt>,
}

#[derive(Deserialize)]
struct RawGroupSpec {
    rank: usize,
    #[serde(with = "int_serde::vec", default)]
    torsion: Vec<BigInt>,
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawGroupSpec) -> Result<Self> {
        let spec = GroupSpec::new(raw.rank, raw.torsion.clone())?;
        if spec.torsion != raw.torsion {
            return Err(Error::Contract(format!(
                "serialized torsion {:?} is not a divisibility chain",
                raw.torsion.iter().map(ToString::to_string).collect::<Vec<_>>()
            )));
        }
        Ok(spec)
    }
}

/// An element of a [`GroupSpec`]; torsion coordinates are kept reduced.
///
/// Elements do not carry their group; every operation goes through the
/// owning `GroupSpec`, which checks the shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(#[serde(with = "int_serde::vec")] Vec<BigInt>);

impl GroupElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn is_chain(torsion: &[BigInt]) -> bool {
    torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]))
}

impl GroupSpec {
    /// Builds the group, normalizing the torsion factors to a divisibility chain.
    ///
    /// Use [`GroupSpec::presented`] when elements are given in the coordinates
    /// of the un-normalized factors.
    pub fn new(rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        Ok(Self::presented(rank, torsion)?.0)
    }

    pub fn free(rank: usize) -> Self {
        GroupSpec {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn from_i64(rank: usize, torsion: &[i64]) -> Result<Self> {
        Self::new(rank, torsion.iter().map(|&d| BigInt::from(d)).collect())
    }

    /// Normalizes `Z^rank + Z/factors[0] + ...` and returns the coordinate change
    /// from the given factors to the normalized ones.
    pub fn presented(rank: usize, factors: Vec<BigInt>) -> Result<(Self, Presentation)> {
        let two = BigInt::from(2);
        if let Some(bad) = factors.iter().find(|d| **d < two) {
            return Err(Error::Torsion(bad.to_string()));
        }
        if is_chain(&factors) {
            let spec = GroupSpec {
                rank,
                torsion: factors.clone(),
            };
            return Ok((
                spec.clone(),
                Presentation {
                    group: spec,
                    raw_factors: factors,
                    torsion_map: None,
                },
            ));
        }
        let snf = smith_normal_form(&IntMatrix::diagonal(&factors));
        let kept: Vec<usize> = (0..factors.len())
            .filter(|&i| !snf.diagonal[(i, i)].is_one())
            .collect();
        let torsion: Vec<BigInt> = kept.iter().map(|&i| snf.diagonal[(i, i)].clone()).collect();
        let map = IntMatrix::from_rows(
            factors.len(),
            kept.iter().map(|&i| snf.left.row(i).to_vec()).collect(),
        );
        let spec = GroupSpec { rank, torsion };
        Ok((
            spec.clone(),
            Presentation {
                group: spec,
                raw_factors: factors,
                torsion_map: Some(map),
            },
        ))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Number of coordinates of an element: `rank + torsion.len()`.
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Order of the torsion part (1 when torsion-free).
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Exponent of the torsion subgroup (the last invariant factor, or 1).
    pub fn torsion_exponent(&self) -> BigInt {
        self.torsion.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    fn check(&self, coords: &[BigInt]) -> Result<()> {
        if coords.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        Ok(())
    }

    fn reduce(&self, mut coords: Vec<BigInt>) -> GroupElement {
        for (c, d) in coords[self.rank..].iter_mut().zip(&self.torsion) {
            *c = c.mod_floor(d);
        }
        GroupElement(coords)
    }

    /// Builds an element, reducing torsion coordinates.
    pub fn element(&self, coords: Vec<BigInt>) -> Result<GroupElement> {
        self.check(&coords)?;
        Ok(self.reduce(coords))
    }

    pub fn element_i64(&self, coords: &[i64]) -> Result<GroupElement> {
        self.element(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Checks that `x` has this group's shape and reduced torsion coordinates.
    pub fn conforms(&self, x: &GroupElement) -> Result<()> {
        self.check(&x.0)?;
        for (c, d) in x.0[self.rank..].iter().zip(&self.torsion) {
            if c.is_negative() || c >= d {
                return Err(Error::Contract(format!(
                    "torsion coordinate {c} not reduced modulo {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.dim()])
    }

    /// Unit vector along the `i`-th coordinate (free or torsion).
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut coords = vec![BigInt::zero(); self.dim()];
        coords[i] = BigInt::one();
        self.reduce(coords)
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0)?;
        self.check(&h.0)?;
        Ok(self.add_unchecked(g, h))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.reduce(g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        self.reduce(g.0.iter().map(|a| -a).collect())
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(&g.0)?;
        self.check(&h.0)?;
        Ok(self.sub_unchecked(g, h))
    }

    pub(crate) fn sub_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.reduce(g.0.iter().zip(&h.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, g: &GroupElement, n: &BigInt) -> GroupElement {
        self.reduce(g.0.iter().map(|a| a * n).collect())
    }

    /// Free coordinates of `x` (its image in `Z^rank`).
    pub fn free_part<'a>(&self, x: &'a GroupElement) -> &'a [BigInt] {
        &x.0[..self.rank]
    }

    /// Subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[GroupElement]) -> Result<SubgroupBasis> {
        SubgroupBasis::generated(self, gens)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Coordinate change from a user-supplied presentation
/// `Z^rank + Z/factors[0] + ...` to the normalized [`GroupSpec`].
#[derive(Clone, Debug)]
pub struct Presentation {
    group: GroupSpec,
    raw_factors: Vec<BigInt>,
    torsion_map: Option<IntMatrix>,
}

impl Presentation {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn raw_factors(&self) -> &[BigInt] {
        &self.raw_factors
    }

    /// True when the factors were already a divisibility chain.
    pub fn is_identity(&self) -> bool {
        self.torsion_map.is_none()
    }

    /// Maps raw coordinates (`rank + raw_factors.len()` of them) to a normalized element.
    pub fn element(&self, raw: &[BigInt]) -> Result<GroupElement> {
        let expected = self.group.rank + self.raw_factors.len();
        if raw.len() != expected {
            return Err(Error::Dimension {
                expected,
                found: raw.len(),
            });
        }
        let rank = self.group.rank;
        match &self.torsion_map {
            None => self.group.element(raw.to_vec()),
            Some(map) => {
                let mut coords = raw[..rank].to_vec();
                coords.extend(map.mul_vec(&raw[rank..]));
                self.group.element(coords)
            }
        }
    }
}
