//! Smith and Hermite normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `left * input * right == diagonal`, with `left` and `right` unimodular and the
/// diagonal entries non-negative and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub left: IntMatrix,
    /// Inverse of `left`, tracked alongside it so preimages can be formed exactly.
    pub left_inverse: IntMatrix,
    pub diagonal: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_0 | d_1 | ...`, `min(rows, cols)` of them.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.diagonal.num_rows().min(self.diagonal.num_cols());
        (0..k).map(|i| self.diagonal[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors()
            .iter()
            .filter(|d| !d.is_zero())
            .count()
    }
}

struct Reducer {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    // row[target] += k * row[source]
    fn add_row(&mut self, target: usize, source: usize, k: &BigInt) {
        self.d.add_row_multiple(target, source, k);
        self.u.add_row_multiple(target, source, k);
        let neg = -k;
        self.u_inv.add_col_multiple(source, target, &neg);
    }

    fn add_col(&mut self, target: usize, source: usize, k: &BigInt) {
        self.d.add_col_multiple(target, source, k);
        self.v.add_col_multiple(target, source, k);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Computes the Smith normal form of an arbitrary integer matrix.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.num_rows(), m.num_cols());
    let mut r = Reducer {
        d: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    };

    'outer: for t in 0..rows.min(cols) {
        loop {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = &r.d[(i, j)];
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.abs() < r.d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'outer;
            };
            r.swap_rows(t, pi);
            r.swap_cols(t, pj);

            let pivot = r.d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if r.d[(i, t)].is_zero() {
                    continue;
                }
                let q = r.d[(i, t)].div_floor(&pivot);
                r.add_row(i, t, &-q);
                clean &= r.d[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if r.d[(t, j)].is_zero() {
                    continue;
                }
                let q = r.d[(t, j)].div_floor(&pivot);
                r.add_col(j, t, &-q);
                clean &= r.d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // The pivot must divide every entry of the remaining block.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !r.d[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => r.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if r.d[(t, t)].is_negative() {
            r.negate_row(t);
        }
    }

    SmithForm {
        left: r.u,
        left_inverse: r.u_inv,
        diagonal: r.d,
        right: r.v,
    }
}

/// Row-style Hermite normal form: `transform * input` has the nonzero rows
/// `hermite` on top (echelon, positive pivots, entries above each pivot reduced
/// into `[0, pivot)`) followed by zero rows.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub hermite: IntMatrix,
    pub pivots: Vec<usize>,
    pub transform: IntMatrix,
}

pub fn hermite_normal_form(m: &IntMatrix) -> HermiteForm {
    let (rows, cols) = (m.num_rows(), m.num_cols());
    let mut a = m.clone();
    let mut t = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut row = 0;

    for col in 0..cols {
        if row == rows {
            break;
        }
        loop {
            let best = (row..rows)
                .filter(|&i| !a[(i, col)].is_zero())
                .min_by_key(|&i| a[(i, col)].abs());
            let Some(p) = best else { break };
            a.swap_rows(row, p);
            t.swap_rows(row, p);
            let pivot = a[(row, col)].clone();
            let mut done = true;
            for i in row + 1..rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let q = -a[(i, col)].div_floor(&pivot);
                a.add_row_multiple(i, row, &q);
                t.add_row_multiple(i, row, &q);
                done &= a[(i, col)].is_zero();
            }
            if done {
                break;
            }
        }
        if a[(row, col)].is_zero() {
            continue;
        }
        if a[(row, col)].is_negative() {
            a.negate_row(row);
            t.negate_row(row);
        }
        let pivot = a[(row, col)].clone();
        for i in 0..row {
            let q = -a[(i, col)].div_floor(&pivot);
            a.add_row_multiple(i, row, &q);
            t.add_row_multiple(i, row, &q);
        }
        pivots.push(col);
        row += 1;
    }

    let hermite = IntMatrix::from_rows(cols, (0..row).map(|i| a.row(i).to_vec()).collect());
    HermiteForm {
        hermite,
        pivots,
        transform: t,
    }
}

impl HermiteForm {
    /// Solves `c * hermite == target` for an integer row vector `c`.
    pub fn solve(&self, target: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut residual = target.to_vec();
        let mut coeffs = Vec::with_capacity(self.pivots.len());
        for (k, &col) in self.pivots.iter().enumerate() {
            let pivot = &self.hermite[(k, col)];
            let (q, rem) = residual[col].div_rem(pivot);
            if !rem.is_zero() {
                return None;
            }
            for (j, r) in residual.iter_mut().enumerate().skip(col) {
                *r -= &q * &self.hermite[(k, j)];
            }
            coeffs.push(q);
        }
        residual.iter().all(Zero::is_zero).then_some(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(m);
        assert_eq!(s.left.mul(m).mul(&s.right), s.diagonal);
        assert!(s.left.determinant().abs().is_one());
        assert!(s.right.determinant().abs().is_one());
        assert_eq!(s.left.mul(&s.left_inverse), IntMatrix::identity(m.num_rows()));
        let d = s.invariant_factors();
        for w in d.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "{d:?} not a chain");
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn coprime_diagonal_collapses_to_chain() {
        let s = check(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal, IntMatrix::from_i64(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn identity_and_zero_are_fixed() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.diagonal, IntMatrix::identity(3));
        let s = check(&IntMatrix::from_i64(&[&[0]]));
        assert_eq!(s.diagonal, IntMatrix::from_i64(&[&[0]]));
    }

    #[test]
    fn rectangular_and_degenerate_shapes() {
        check(&IntMatrix::from_i64(&[&[4, 6, 8], &[2, 2, 2]]));
        check(&IntMatrix::from_i64(&[&[3], &[9], &[-6]]));
        check(&IntMatrix::zeros(2, 3));
        check(&IntMatrix::zeros(0, 2));
        check(&IntMatrix::zeros(2, 0));
    }

    #[test]
    fn hermite_solves_lattice_membership() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[0, 3], &[2, 3]]);
        let h = hermite_normal_form(&m);
        assert_eq!(h.hermite, IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        let top = IntMatrix::from_rows(
            3,
            (0..h.pivots.len()).map(|i| h.transform.row(i).to_vec()).collect(),
        );
        assert_eq!(top.mul(&m), h.hermite);
        assert!(h.solve(&[BigInt::from(4), BigInt::from(-3)]).is_some());
        assert!(h.solve(&[BigInt::from(1), BigInt::from(0)]).is_none());
    }
}
