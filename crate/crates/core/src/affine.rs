//! Affine root systems of Kac tables Aff 1-3. Real roots are described by
//! closed-form presentations: each finite-direction class carries an allowed
//! arithmetic progression of delta-levels, which makes membership O(rank)
//! and exact at any level.

use crate::error::{Error, Result};
use crate::finite::{build_finite, FiniteRootSystem, Root};
use crate::labels::{Family, LengthClass, RootSystemLabel};
use crate::linalg::{form_ip_rat, rank_rat, Rat};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// One class of real roots: a finite part (coordinates in the affine
/// simple-root basis, alpha_0 coordinate zero) together with the arithmetic
/// progression of delta-levels at which it occurs.
#[derive(Debug, Clone)]
pub struct RealClass {
    pub finite_part: Vec<Rat>,
    pub sq_length: Rat,
    pub class: LengthClass,
    pub level_offset: Rat,
    pub level_period: Rat,
}

impl RealClass {
    pub fn level_allowed(&self, c: Rat) -> bool {
        ((c - self.level_offset) / self.level_period).is_integer()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    NotARoot,
    Imaginary,
    Real(LengthClass),
}

#[derive(Debug, Clone)]
pub struct AffineRootSystem {
    pub label: RootSystemLabel,
    /// (rank+1) x (rank+1), node 0 is the affine node.
    pub cartan: Vec<Vec<i64>>,
    /// Invariant form on the affine simple roots; the span of nodes 1..n is
    /// the underlying finite system in its (theta|theta)=2 normalization.
    pub form: Vec<Vec<Rat>>,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub delta: Root,
    pub underlying_finite: FiniteRootSystem,
    pub classes: Vec<RealClass>,
    class_index: HashMap<Vec<Rat>, usize>,
}

/// Underlying finite label per Kac-table family.
pub fn underlying_finite_label(label: RootSystemLabel) -> Result<RootSystemLabel> {
    use Family::*;
    let l = label.bare();
    if !l.is_affine() || !l.is_canonical() {
        return Err(Error::UnknownLabel(format!("{}", label)));
    }
    Ok(match (l.family, l.twist) {
        (_, 1) => RootSystemLabel::finite(l.family, l.rank),
        (A, 2) if l.rank % 2 == 0 => {
            // A_{2n}^(2): finite part C_n (A_1 for n = 1)
            let n = l.rank / 2;
            if n == 1 {
                RootSystemLabel::finite(A, 1)
            } else {
                RootSystemLabel::finite(C, n)
            }
        }
        (A, 2) => {
            // A_{2n-1}^(2): finite part C_n
            RootSystemLabel::finite(C, (l.rank + 1) / 2)
        }
        (D, 2) => {
            // D_{n+1}^(2): finite part B_n (C_2 for n = 2 via the alias)
            let n = l.rank - 1;
            if n == 2 {
                RootSystemLabel::finite(C, 2)
            } else {
                RootSystemLabel::finite(B, n)
            }
        }
        (E, 2) => RootSystemLabel::finite(F, 4),
        (D, 3) => RootSystemLabel::finite(G, 2),
        _ => return Err(Error::UnknownLabel(format!("{}", label))),
    })
}

/// Affine rank (number of nodes minus one) of a canonical affine label.
pub fn affine_rank(label: RootSystemLabel) -> Result<usize> {
    Ok(underlying_finite_label(label)?.normalize()[0].rank)
}

fn highest_short_root(fin: &FiniteRootSystem) -> Root {
    let min_sq = fin
        .all_roots
        .iter()
        .map(|r| fin.ip(r, r))
        .min()
        .unwrap();
    fin.all_roots
        .iter()
        .filter(|r| fin.ip(r, r) == min_sq)
        .max_by_key(|r| (r.iter().sum::<i64>(), (*r).clone()))
        .unwrap()
        .clone()
}

/// Cartan matrix of an affine label (node 0 first, finite nodes in the order
/// of the finite registry).
pub fn affine_cartan(label: RootSystemLabel) -> Result<Vec<Vec<i64>>> {
    Ok(build_affine(label)?.cartan)
}

pub fn build_affine(label: RootSystemLabel) -> Result<AffineRootSystem> {
    let mut norm = label.normalize();
    if norm.len() != 1 {
        return Err(Error::UnknownLabel(format!("{}", label)));
    }
    let label = norm.remove(0).bare();
    if !label.is_affine() || !label.is_canonical() {
        return Err(Error::UnknownLabel(format!("{}", label)));
    }
    let fin_label = underlying_finite_label(label)?;
    let fin = build_finite(fin_label)?;
    let n = fin.rank();
    let is_a_even = label.family == Family::A && label.twist == 2 && label.rank % 2 == 0;

    // The vector the affine node projects to in the finite span, and a_0.
    let (neg_part, a0, alpha0_scale): (Root, i64, Rat) = if label.twist == 1 {
        (fin.highest_root.clone(), 1, Rat::one())
    } else if is_a_even {
        (fin.highest_root.clone(), 2, Rat::new(1, 2))
    } else {
        (highest_short_root(&fin), 1, Rat::one())
    };

    // form on the affine basis: alpha_0 pairs like -scale * neg_part, and
    // delta is isotropic and orthogonal to everything.
    let mut form = vec![vec![Rat::zero(); n + 1]; n + 1];
    let neg_rat: Vec<Rat> = neg_part.iter().map(|&x| Rat::from_integer(x)).collect();
    let s = alpha0_scale;
    let theta_sq = form_ip_rat(
        &pad_form(&fin.form),
        &pad_rat(&neg_rat),
        &pad_rat(&neg_rat),
    );
    form[0][0] = s * s * theta_sq;
    for i in 1..=n {
        let mut ip = Rat::zero();
        for (j, &c) in neg_part.iter().enumerate() {
            ip += Rat::from_integer(c) * fin.form[j][i - 1];
        }
        form[0][i] = -s * ip;
        form[i][0] = form[0][i];
        for j in 1..=n {
            form[i][j] = fin.form[i - 1][j - 1];
        }
    }

    // cartan from the form
    let mut cartan = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            let x = Rat::from_integer(2) * form[i][j] / form[i][i];
            assert!(x.is_integer(), "affine Cartan entry not integral");
            cartan[i][j] = x.to_integer();
        }
    }

    // marks: delta = a0*alpha_0 + neg_part
    let mut marks = vec![a0];
    marks.extend(neg_part.iter());
    let delta: Root = marks.clone();
    // invariant: cartan * marks = 0
    for row in &cartan {
        let dot: i64 = row.iter().zip(&marks).map(|(&a, &m)| a * m).sum();
        assert_eq!(dot, 0, "marks must span the radical");
    }

    // comarks: primitive positive kernel vector of the transposed cartan
    let comarks = kernel_marks(&transpose(&cartan));

    // real-root classes
    let mut classes: Vec<RealClass> = Vec::new();
    let push = |classes: &mut Vec<RealClass>, fp: Vec<Rat>, sq: Rat, off: Rat, per: Rat| {
        classes.push(RealClass {
            finite_part: fp,
            sq_length: sq,
            class: LengthClass::Long, // fixed up below
            level_offset: off,
            level_period: per,
        });
    };
    let embed = |r: &Root| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n + 1];
        for (i, &c) in r.iter().enumerate() {
            v[i + 1] = Rat::from_integer(c);
        }
        v
    };
    let long_sq = fin
        .all_roots
        .iter()
        .map(|r| fin.ip(r, r))
        .max()
        .unwrap();
    for r in &fin.all_roots {
        let sq = fin.ip(r, r);
        let fp = embed(r);
        if label.twist == 1 {
            push(&mut classes, fp, sq, Rat::zero(), Rat::one());
        } else if is_a_even {
            if sq == long_sq {
                // long roots at even levels, and their halves at half-odd levels
                push(&mut classes, fp.clone(), sq, Rat::zero(), Rat::from_integer(2));
                let half: Vec<Rat> = fp.iter().map(|&x| x / Rat::from_integer(2)).collect();
                push(
                    &mut classes,
                    half,
                    sq / Rat::from_integer(4),
                    Rat::new(1, 2),
                    Rat::one(),
                );
            } else {
                push(&mut classes, fp, sq, Rat::zero(), Rat::one());
            }
        } else {
            let period = if sq == long_sq {
                Rat::from_integer(label.twist as i64)
            } else {
                Rat::one()
            };
            push(&mut classes, fp, sq, Rat::zero(), period);
        }
    }
    // assign length classes by sorted distinct squared lengths
    let mut sqs: Vec<Rat> = classes.iter().map(|c| c.sq_length).collect();
    sqs.sort();
    sqs.dedup();
    for c in classes.iter_mut() {
        let pos = sqs.iter().position(|&s| s == c.sq_length).unwrap();
        c.class = match (pos, sqs.len()) {
            (0, 1) => LengthClass::Long,
            (0, _) => LengthClass::Short,
            (1, 3) => LengthClass::Middle,
            _ => LengthClass::Long,
        };
    }
    let class_index = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.finite_part.clone(), i))
        .collect();

    Ok(AffineRootSystem {
        label,
        cartan,
        form,
        marks,
        comarks,
        delta,
        underlying_finite: fin,
        classes,
        class_index,
    })
}

fn pad_form(f: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    f.to_vec()
}

fn pad_rat(v: &[Rat]) -> Vec<Rat> {
    v.to_vec()
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

fn kernel_marks(m: &[Vec<i64>]) -> Vec<i64> {
    // one-dimensional kernel of an affine GCM: solve over rationals
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(x)).collect())
        .collect();
    // forward eliminate
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col];
        for i in 0..n {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col] / inv;
                for j in 0..n {
                    let sub = f * a[row][j];
                    a[i][j] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    // the free column is the one not among pivots
    let free = (0..n).find(|c| !pivots.contains(c)).expect("affine kernel");
    let mut x = vec![Rat::zero(); n];
    x[free] = Rat::one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = -a[r][free] / a[r][pc];
    }
    // scale to primitive positive integers
    let lcm = x
        .iter()
        .fold(1i64, |acc, v| num_integer::lcm(acc, *v.denom()));
    let mut ints: Vec<i64> = x
        .iter()
        .map(|v| (*v * Rat::from_integer(lcm)).to_integer())
        .collect();
    let g = ints
        .iter()
        .fold(0i64, |acc, &v| crate::linalg::gcd_i64(acc, v));
    ints.iter_mut().for_each(|v| *v /= g);
    if ints.iter().any(|&v| v < 0) {
        ints.iter_mut().for_each(|v| *v = -*v);
    }
    ints
}

impl AffineRootSystem {
    pub fn rank(&self) -> usize {
        self.cartan.len() - 1
    }

    pub fn nodes(&self) -> usize {
        self.cartan.len()
    }

    pub fn ip_rat(&self, u: &[Rat], v: &[Rat]) -> Rat {
        form_ip_rat(&self.form, u, v)
    }

    pub fn ip(&self, u: &[i64], v: &[i64]) -> Rat {
        crate::linalg::form_ip(&self.form, u, v)
    }

    /// delta-coefficient of a vector (first coordinate over a_0).
    pub fn delta_coefficient(&self, v: &[i64]) -> Rat {
        Rat::new(v[0], self.marks[0])
    }

    pub fn finite_part(&self, v: &[i64]) -> Vec<Rat> {
        let c = self.delta_coefficient(v);
        v.iter()
            .zip(&self.delta)
            .map(|(&x, &d)| Rat::from_integer(x) - c * Rat::from_integer(d))
            .collect()
    }

    pub fn is_root(&self, v: &[i64]) -> Result<RootKind> {
        if v.len() != self.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes(),
                got: v.len(),
            });
        }
        let c = self.delta_coefficient(v);
        let fp = self.finite_part(v);
        if fp.iter().all(|x| x.is_zero()) {
            if c.is_integer() && !c.is_zero() {
                return Ok(RootKind::Imaginary);
            }
            return Ok(RootKind::NotARoot);
        }
        match self.class_index.get(&fp) {
            Some(&i) if self.classes[i].level_allowed(c) => {
                Ok(RootKind::Real(self.classes[i].class))
            }
            _ => Ok(RootKind::NotARoot),
        }
    }

    pub fn is_real_root(&self, v: &[i64]) -> bool {
        matches!(self.is_root(v), Ok(RootKind::Real(_)))
    }

    /// All real roots with |delta-coefficient| <= m_max, sorted.
    pub fn enumerate_real_roots(&self, m_max: i64) -> Vec<Root> {
        let mut out: Vec<Root> = Vec::new();
        let bound = Rat::from_integer(m_max);
        for cl in &self.classes {
            let mut c = cl.level_offset;
            // walk down to the lowest admissible level >= -m_max
            while c - cl.level_period >= -bound {
                c -= cl.level_period;
            }
            while c <= bound {
                let mut v: Vec<i64> = Vec::with_capacity(self.nodes());
                let mut ok = true;
                for (i, f) in cl.finite_part.iter().enumerate() {
                    let x = *f + c * Rat::from_integer(self.delta[i]);
                    if x.is_integer() {
                        v.push(x.to_integer());
                    } else {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    out.push(v);
                }
                c += cl.level_period;
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Imaginary roots m*delta with 0 < |m| <= m_max.
    pub fn imaginary_roots(&self, m_max: i64) -> Vec<Root> {
        let mut out = Vec::new();
        for m in -m_max..=m_max {
            if m != 0 {
                out.push(self.delta.iter().map(|&d| d * m).collect());
            }
        }
        out.sort();
        out
    }

    /// Length-class decoration for an ambient squared length (None when the
    /// ambient is simply laced).
    pub fn decoration_for(&self, sq: Rat) -> Option<LengthClass> {
        let mut sqs: Vec<Rat> = self.classes.iter().map(|c| c.sq_length).collect();
        sqs.sort();
        sqs.dedup();
        if sqs.len() <= 1 {
            return None;
        }
        let pos = sqs.iter().position(|&s| s == sq)?;
        Some(match (pos, sqs.len()) {
            (0, _) => LengthClass::Short,
            (1, 3) => LengthClass::Middle,
            _ => LengthClass::Long,
        })
    }

    /// n_s(g) = sum a_i s_i for a grading tuple s.
    pub fn n_s(&self, s: &[i64]) -> Result<i64> {
        if s.len() != self.nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes(),
                got: s.len(),
            });
        }
        if s.iter().any(|&x| x < 0) || s.iter().all(|&x| x == 0) {
            return Err(Error::InvalidTuple(format!("{:?}", s)));
        }
        Ok(self.marks.iter().zip(s).map(|(&a, &si)| a * si).sum())
    }

    /// Simple roots as coordinate vectors.
    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.nodes())
            .map(|i| {
                let mut e = vec![0i64; self.nodes()];
                e[i] = 1;
                e
            })
            .collect()
    }

    /// Full root lattice (spanned by all roots), as generator rows.
    pub fn full_lattice_generators(&self) -> Vec<Root> {
        self.simple_roots()
    }
}

/// Rank of the span of a set of affine roots.
pub fn span_rank(roots: &[Root]) -> usize {
    let rows: Vec<Vec<Rat>> = roots
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(x)).collect())
        .collect();
    rank_rat(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::parse_label;
    use num_traits::Signed;

    fn aff(s: &str) -> AffineRootSystem {
        build_affine(parse_label(s).unwrap()).unwrap()
    }

    #[test]
    fn a1_affine_cartan_and_delta() {
        let s = aff("A1^(1)");
        assert_eq!(s.cartan, vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(s.delta, vec![1, 1]);
        assert_eq!(s.marks, vec![1, 1]);
    }

    #[test]
    fn d4_triple_twist_registry() {
        let s = aff("D4^(3)");
        assert_eq!(s.nodes(), 3);
        assert_eq!(s.marks, vec![1, 2, 1]);
        // triple bond present
        let has_triple = s
            .cartan
            .iter()
            .flatten()
            .any(|&x| x == -3);
        assert!(has_triple);
    }

    #[test]
    fn marks_annihilate_cartan_everywhere() {
        for l in [
            "A1^(1)", "A2^(1)", "A4^(1)", "B3^(1)", "C2^(1)", "C3^(1)", "D4^(1)", "G2^(1)",
            "F4^(1)", "E6^(1)", "A2^(2)", "A4^(2)", "A6^(2)", "A5^(2)", "A7^(2)", "D3^(2)",
            "D4^(2)", "E6^(2)", "D4^(3)",
        ] {
            let s = aff(l);
            for row in &s.cartan {
                let dot: i64 = row.iter().zip(&s.marks).map(|(&a, &m)| a * m).sum();
                assert_eq!(dot, 0, "cartan*marks != 0 for {}", l);
            }
            // delta orthogonal to every simple root
            for i in 0..s.nodes() {
                let e = &s.simple_roots()[i];
                assert!(s.ip(e, &s.delta).is_zero(), "delta not isotropic for {}", l);
            }
            // comarks annihilate the transposed cartan
            for j in 0..s.nodes() {
                let dot: i64 = (0..s.nodes()).map(|i| s.cartan[i][j] * s.comarks[i]).sum();
                assert_eq!(dot, 0, "comarks fail for {}", l);
            }
        }
    }

    #[test]
    fn a2_2_marks_and_lengths() {
        let s = aff("A2^(2)");
        assert_eq!(s.marks, vec![2, 1]);
        assert_eq!(s.cartan, vec![vec![2, -4], vec![-1, 2]]);
        // two length classes, ratio 4
        let mut sqs: Vec<Rat> = s.classes.iter().map(|c| c.sq_length).collect();
        sqs.sort();
        sqs.dedup();
        assert_eq!(sqs, vec![Rat::new(1, 2), Rat::from_integer(2)]);
    }

    #[test]
    fn a4_2_has_three_lengths_at_level_one() {
        let s = aff("A4^(2)");
        let roots = s.enumerate_real_roots(1);
        let mut seen = std::collections::BTreeSet::new();
        for r in &roots {
            if let RootKind::Real(c) = s.is_root(r).unwrap() {
                seen.insert(c);
            }
        }
        assert_eq!(seen.len(), 3);
    }

    #[test]
    fn a1_affine_enumeration_matches_presentation() {
        let s = aff("A1^(1)");
        let roots = s.enumerate_real_roots(1);
        // +-alpha_1 + m*delta for m in {-1,0,1}
        assert_eq!(roots.len(), 6);
        assert!(s.is_root(&s.delta).unwrap() == RootKind::Imaginary);
        assert!(s.is_root(&[0, 2]).unwrap() == RootKind::NotARoot);
    }

    #[test]
    fn untwisted_translation_invariance() {
        for l in ["A2^(1)", "B3^(1)", "G2^(1)"] {
            let s = aff(l);
            for r in s.enumerate_real_roots(2) {
                let shifted: Vec<i64> = r.iter().zip(&s.delta).map(|(&x, &d)| x + d).collect();
                assert!(s.is_real_root(&shifted), "{} + delta fails in {}", l.to_string(), l);
            }
        }
    }

    #[test]
    fn twisted_long_levels_multiples_of_twist() {
        for l in ["A5^(2)", "D3^(2)", "E6^(2)", "D4^(3)"] {
            let s = aff(l);
            let t = s.label.twist as i64;
            for r in s.enumerate_real_roots(3) {
                if let RootKind::Real(LengthClass::Long) = s.is_root(&r).unwrap() {
                    let c = s.delta_coefficient(&r);
                    assert!(
                        (c / Rat::from_integer(t)).is_integer(),
                        "long root at level {} in {}",
                        c,
                        l
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_agrees_with_membership() {
        // presentation <-> membership consistency at small bounds
        for l in ["A2^(2)", "A4^(2)", "D3^(2)", "D4^(3)", "C2^(1)"] {
            let s = aff(l);
            let listed = s.enumerate_real_roots(2);
            for r in &listed {
                assert!(s.is_real_root(r), "{:?} rejected in {}", r, l);
            }
            // reflection closure of the simple roots stays inside the listed set
            let simples = s.simple_roots();
            let (closure, _) =
                crate::finite::root_closure(&s.form, &simples, Some(12)).unwrap();
            for v in closure {
                let c = s.delta_coefficient(&v);
                if c.abs() <= Rat::from_integer(2) && !v.iter().all(|&x| x == 0) {
                    let kind = s.is_root(&v).unwrap();
                    assert!(
                        matches!(kind, RootKind::Real(_)),
                        "orbit vector {:?} not recognized in {}",
                        v,
                        l
                    );
                    assert!(listed.contains(&v), "orbit vector {:?} missing in {}", v, l);
                }
            }
        }
    }

    #[test]
    fn negation_preserves_class() {
        let s = aff("A4^(2)");
        for r in s.enumerate_real_roots(2) {
            let neg: Vec<i64> = r.iter().map(|&x| -x).collect();
            assert_eq!(s.is_root(&r).unwrap(), s.is_root(&neg).unwrap());
        }
    }

    #[test]
    fn underlying_finite_assignment() {
        assert_eq!(
            aff("A5^(2)").underlying_finite.label,
            parse_label("C3").unwrap()
        );
        assert_eq!(
            aff("D4^(2)").underlying_finite.label,
            parse_label("B3").unwrap()
        );
        assert_eq!(
            aff("E6^(2)").underlying_finite.label,
            parse_label("F4").unwrap()
        );
        assert_eq!(
            aff("D4^(3)").underlying_finite.label,
            parse_label("G2").unwrap()
        );
    }
}
