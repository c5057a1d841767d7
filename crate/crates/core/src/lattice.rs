//! Integer lattices in the simple-root basis, canonicalized by row Hermite
//! normal form. Lattice equality is structural equality of the HNF.

use crate::affine::AffineRootSystem;
use crate::error::{Error, Result};
use crate::finite::Root;
use crate::linalg::{det_i64, hnf, hnf_solve, snf_diagonal};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Lattice {
    pub ambient_dim: usize,
    /// Rows are generators, in HNF; rank = number of rows.
    pub basis: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Index {
    Finite(u128),
    Infinite,
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{}", n),
            Index::Infinite => write!(f, "inf"),
        }
    }
}

impl Lattice {
    pub fn from_rows(ambient_dim: usize, rows: &[Vec<i64>]) -> Result<Lattice> {
        for r in rows {
            if r.len() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    got: r.len(),
                });
            }
        }
        Ok(Lattice {
            ambient_dim,
            basis: hnf(rows),
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.ambient_dim && hnf_solve(&self.basis, v).is_some()
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|g| other.contains(g))
    }

    /// Determinant of the square generator matrix when full rank (covolume
    /// relative to Z^n).
    pub fn full_rank_det(&self) -> Option<i128> {
        if self.rank() != self.ambient_dim {
            return None;
        }
        Some(det_i64(&self.basis).abs())
    }
}

pub fn lattice_from_roots(ambient_dim: usize, roots: &[Root]) -> Result<Lattice> {
    Lattice::from_rows(ambient_dim, roots)
}

/// Index [L : L1], or Infinite when rank drops. Errors when L1 is not
/// contained in L.
pub fn sublattice_index(l: &Lattice, l1: &Lattice) -> Result<Index> {
    for g in &l1.basis {
        if !l.contains(g) {
            return Err(Error::NotASublattice(g.clone()));
        }
    }
    if l1.rank() < l.rank() {
        return Ok(Index::Infinite);
    }
    // express the generators of l1 in the basis of l; index = |det|
    let coords: Vec<Vec<i64>> = l1
        .basis
        .iter()
        .map(|g| hnf_solve(&l.basis, g).expect("containment checked"))
        .collect();
    let d = det_i64(&coords).unsigned_abs();
    Ok(Index::Finite(d as u128))
}

/// Elementary divisors of the quotient L/L1 (finite case), for the optional
/// quotient-structure report.
pub fn quotient_invariants(l: &Lattice, l1: &Lattice) -> Result<Vec<i64>> {
    for g in &l1.basis {
        if !l.contains(g) {
            return Err(Error::NotASublattice(g.clone()));
        }
    }
    let coords: Vec<Vec<i64>> = l1
        .basis
        .iter()
        .map(|g| hnf_solve(&l.basis, g).expect("containment checked"))
        .collect();
    Ok(snf_diagonal(&coords)
        .into_iter()
        .filter(|&d| d > 1)
        .collect())
}

/// All roots of the ambient affine system with |delta-coefficient| <= m_max
/// lying in the sublattice (real roots plus imaginary multiples of delta).
pub fn intersect_with_roots(
    system: &AffineRootSystem,
    l1: &Lattice,
    m_max: i64,
) -> Result<Vec<Root>> {
    let full = Lattice::from_rows(
        system.nodes(),
        &system.full_lattice_generators(),
    )?;
    for g in &l1.basis {
        if !full.contains(g) {
            return Err(Error::NotASublattice(g.clone()));
        }
    }
    let mut out: Vec<Root> = Vec::new();
    for v in system
        .enumerate_real_roots(m_max)
        .into_iter()
        .chain(system.imaginary_roots(m_max))
    {
        if l1.contains(&v) {
            out.push(v);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::build_affine;
    use crate::labels::parse_label;

    #[test]
    fn full_lattice_has_identity_hnf() {
        let l = Lattice::from_rows(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(l.basis.len(), 3);
        assert_eq!(l.full_rank_det(), Some(1));
    }

    #[test]
    fn index_two_sublattice_in_a1_affine() {
        // span{alpha_1, -alpha_1 + 2 delta} inside A_1^(1)
        let s = build_affine(parse_label("A1^(1)").unwrap()).unwrap();
        let a1 = vec![0i64, 1];
        let other = vec![2i64, 1]; // -alpha_1 + 2*delta = (2,2)-(0,1)
        let l1 = Lattice::from_rows(2, &[a1, other]).unwrap();
        let l = Lattice::from_rows(2, &s.full_lattice_generators()).unwrap();
        assert_eq!(sublattice_index(&l, &l1).unwrap(), Index::Finite(2));
        assert_eq!(quotient_invariants(&l, &l1).unwrap(), vec![2]);
    }

    #[test]
    fn chain_multiplicativity() {
        let l = Lattice::from_rows(2, &[vec![1, 0], vec![0, 1]]).unwrap();
        let l1 = Lattice::from_rows(2, &[vec![1, 1], vec![0, 2]]).unwrap();
        let l2 = Lattice::from_rows(2, &[vec![2, 2], vec![0, 4]]).unwrap();
        let i01 = sublattice_index(&l, &l1).unwrap();
        let i12 = sublattice_index(&l1, &l2).unwrap();
        let i02 = sublattice_index(&l, &l2).unwrap();
        match (i01, i12, i02) {
            (Index::Finite(a), Index::Finite(b), Index::Finite(c)) => assert_eq!(a * b, c),
            _ => panic!("expected finite indices"),
        }
    }

    #[test]
    fn not_a_sublattice_detected() {
        let l = Lattice::from_rows(2, &[vec![2, 0], vec![0, 2]]).unwrap();
        let l1 = Lattice::from_rows(2, &[vec![1, 0]]).unwrap();
        assert!(matches!(
            sublattice_index(&l, &l1),
            Err(Error::NotASublattice(_))
        ));
    }

    #[test]
    fn intersect_full_lattice_returns_everything() {
        let s = build_affine(parse_label("A1^(1)").unwrap()).unwrap();
        let l = Lattice::from_rows(2, &s.full_lattice_generators()).unwrap();
        let got = intersect_with_roots(&s, &l, 2).unwrap();
        let mut expect: Vec<Vec<i64>> = s
            .enumerate_real_roots(2)
            .into_iter()
            .chain(s.imaginary_roots(2))
            .collect();
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn intersect_even_delta_slice() {
        // A_1^(1), L1 = span{alpha_1, 2 delta}: keeps +-alpha_1 + 2m delta and 2m delta
        let s = build_affine(parse_label("A1^(1)").unwrap()).unwrap();
        let l1 = Lattice::from_rows(2, &[vec![0, 1], vec![2, 2]]).unwrap();
        let got = intersect_with_roots(&s, &l1, 3).unwrap();
        for v in &got {
            let c = s.delta_coefficient(v);
            let fp = s.finite_part(v);
            if fp.iter().all(num_traits::Zero::is_zero) {
                assert!((c / crate::linalg::rat(2, 1)).is_integer());
            } else {
                assert!((c / crate::linalg::rat(2, 1)).is_integer());
            }
        }
        assert!(got.contains(&vec![0, 1]));
        assert!(got.contains(&vec![2, 1])); // -alpha_1 + 2 delta
        assert!(!got.contains(&vec![1, 1])); // delta itself excluded
    }
}
