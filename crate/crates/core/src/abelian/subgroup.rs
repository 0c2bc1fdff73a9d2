//! Subgroups `<gens>` of a [`GroupSpec`], their quotient maps and indices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{hermite_normal_form, smith_normal_form, GroupElement, GroupSpec, HermiteForm, IntMatrix};
use crate::error::Result;

/// Index `|G : H|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupIndex {
    Finite(#[serde(with = "super::int_serde::scalar")] BigInt),
    Infinite,
}

impl GroupIndex {
    pub fn is_finite(&self) -> bool {
        matches!(self, GroupIndex::Finite(_))
    }

    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            GroupIndex::Finite(n) => Some(n),
            GroupIndex::Infinite => None,
        }
    }
}

impl fmt::Display for GroupIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupIndex::Finite(n) => write!(f, "{n}"),
            GroupIndex::Infinite => write!(f, "INFINITE"),
        }
    }
}

/// The projection `G -> G/H ~ Z/m_1 + ... + Z^f`, one row per nontrivial
/// quotient coordinate.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    rows: IntMatrix,
    /// `Some(m)` for a cyclic coordinate of order `m >= 2`, `None` for a free one.
    moduli: Vec<Option<BigInt>>,
    /// Preimages of the quotient unit vectors, as raw coordinate vectors.
    sections: Vec<Vec<BigInt>>,
}

impl QuotientMap {
    pub fn moduli(&self) -> &[Option<BigInt>] {
        &self.moduli
    }

    pub fn free_rank(&self) -> usize {
        self.moduli.iter().filter(|m| m.is_none()).count()
    }

    /// Image of `x` in `G/H`; cyclic coordinates reduced into `[0, m)`.
    pub fn image(&self, x: &GroupElement) -> Vec<BigInt> {
        let raw = self.rows.mul_vec(x.coords());
        raw.into_iter()
            .zip(&self.moduli)
            .map(|(v, m)| match m {
                Some(m) => v.mod_floor(m),
                None => v,
            })
            .collect()
    }

    /// Free coordinates of the image of `x` (the map `G -> (G/H)/torsion`).
    pub fn free_image(&self, x: &GroupElement) -> Vec<BigInt> {
        self.rows
            .mul_vec(x.coords())
            .into_iter()
            .zip(&self.moduli)
            .filter(|(_, m)| m.is_none())
            .map(|(v, _)| v)
            .collect()
    }

    /// A raw coordinate vector mapping to the `k`-th quotient unit vector.
    pub fn section(&self, k: usize) -> &[BigInt] {
        &self.sections[k]
    }
}

/// The subgroup generated by a finite list of elements.
#[derive(Clone, Debug)]
pub struct SubgroupBasis {
    group: GroupSpec,
    generators: Vec<GroupElement>,
    hermite: HermiteForm,
    quotient: QuotientMap,
    index: GroupIndex,
}

impl SubgroupBasis {
    pub fn generated(group: &GroupSpec, gens: &[GroupElement]) -> Result<Self> {
        for g in gens {
            group.conforms(g)?;
        }
        let n = group.dim();
        // Lattice in Z^n: the generators plus the torsion relations d_i e_{r+i}.
        let mut rows: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords().to_vec()).collect();
        for (i, d) in group.torsion().iter().enumerate() {
            let mut rel = vec![BigInt::zero(); n];
            rel[group.rank() + i] = d.clone();
            rows.push(rel);
        }
        let lattice = IntMatrix::from_rows(n, rows);
        let hermite = hermite_normal_form(&lattice);

        let snf = smith_normal_form(&lattice.transpose());
        let diag = snf.invariant_factors();
        let mut kept = Vec::new();
        let mut moduli = Vec::new();
        for i in 0..n {
            match diag.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) if !d.is_zero() => {
                    kept.push(i);
                    moduli.push(Some(d.clone()));
                }
                _ => {
                    kept.push(i);
                    moduli.push(None);
                }
            }
        }
        let quotient = QuotientMap {
            rows: IntMatrix::from_rows(n, kept.iter().map(|&i| snf.left.row(i).to_vec()).collect()),
            moduli,
            sections: kept.iter().map(|&i| snf.left_inverse.column(i)).collect(),
        };
        let index = if quotient.free_rank() > 0 {
            GroupIndex::Infinite
        } else {
            GroupIndex::Finite(quotient.moduli.iter().flatten().product())
        };
        Ok(SubgroupBasis {
            group: group.clone(),
            generators: gens.to_vec(),
            hermite,
            quotient,
            index,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// Hermite normal form of the lattice spanned by the generators and the
    /// torsion relations.
    pub fn normal_form(&self) -> &IntMatrix {
        &self.hermite.hermite
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    pub fn index(&self) -> &GroupIndex {
        &self.index
    }

    pub fn is_whole_group(&self) -> bool {
        self.index == GroupIndex::Finite(BigInt::one())
    }

    /// True iff `H = {0}`.
    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(GroupElement::is_zero)
    }

    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        self.group.conforms(x)?;
        Ok(self.quotient.image(x).iter().all(Zero::is_zero))
    }

    /// Integer coefficients `z` with `sum z_i g_i = x`, via the Hermite form.
    pub fn express(&self, x: &GroupElement) -> Result<Option<Vec<BigInt>>> {
        self.group.conforms(x)?;
        let Some(c) = self.hermite.solve(x.coords()) else {
            return Ok(None);
        };
        let k = self.generators.len();
        let mut coeffs = vec![BigInt::zero(); k];
        for (row, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, z) in coeffs.iter_mut().enumerate() {
                *z += ci * &self.hermite.transform[(row, j)];
            }
        }
        Ok(Some(coeffs))
    }

    /// True iff `G/H` is a torsion group.
    pub fn quotient_is_periodic(&self) -> bool {
        self.quotient.free_rank() == 0
    }

    /// One representative per coset when the index is finite and at most `cap`.
    pub fn coset_representatives(&self, cap: usize) -> Option<Vec<GroupElement>> {
        let total = self.index.finite()?;
        if *total > BigInt::from(cap) {
            return None;
        }
        let moduli: Vec<BigInt> = self.quotient.moduli.iter().flatten().cloned().collect();
        let mut reps = Vec::new();
        let mut digits = vec![BigInt::zero(); moduli.len()];
        loop {
            let mut raw = vec![BigInt::zero(); self.group.dim()];
            for (k, dk) in digits.iter().enumerate() {
                for (r, s) in raw.iter_mut().zip(&self.quotient.sections[k]) {
                    *r += dk * s;
                }
            }
            reps.push(self.group.reduce(raw));
            // Odometer over the cyclic coordinates.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return Some(reps);
                }
                digits[pos] += 1;
                if digits[pos] < moduli[pos] {
                    break;
                }
                digits[pos] = BigInt::zero();
                pos += 1;
            }
        }
    }

    /// An element of infinite order modulo `H`, preferring a standard basis vector.
    pub fn free_direction(&self) -> Option<GroupElement> {
        if self.quotient_is_periodic() {
            return None;
        }
        for i in 0..self.group.rank() {
            let e = self.group.basis(i);
            if self.quotient.free_image(&e).iter().any(|v| !v.is_zero()) {
                return Some(e);
            }
        }
        let k = self.quotient.moduli.iter().position(Option::is_none)?;
        Some(self.group.reduce(self.quotient.sections[k].clone()))
    }
}
