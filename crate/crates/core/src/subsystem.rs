//! Root-subsystem certificates inside an affine ambient system: the
//! simple-root difference condition, minimal reflection closures with base
//! extraction, component recognition, the truncated lattice criterion, and
//! reflection-subgroup indices via translation lattices.

use crate::affine::{AffineRootSystem, RootKind};
use crate::error::{Error, Result};
use crate::finite::{base_cartan, weyl_order, Root};
use crate::labels::{display_components, LengthClass, RootSystemLabel};
use crate::lattice::{lattice_from_roots, Index, Lattice};
use crate::linalg::{gcd_i64, hnf, Rat};
use crate::recognize;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashSet;

#[derive(Debug, Clone)]
pub struct SubComponent {
    pub label: RootSystemLabel,
    /// indices into the base
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Subsystem {
    pub base: Vec<Root>,
    pub cartan: Vec<Vec<i64>>,
    pub components: Vec<SubComponent>,
    pub lattice: Lattice,
    /// real roots with |delta-coefficient| <= m_max
    pub real_roots: Vec<Root>,
    pub m_max: i64,
    pub truncated: bool,
}

impl Subsystem {
    pub fn component_labels(&self) -> Vec<RootSystemLabel> {
        let mut v: Vec<RootSystemLabel> = self.components.iter().map(|c| c.label).collect();
        v.sort();
        v
    }

    pub fn components_display(&self) -> String {
        display_components(&self.component_labels())
    }

    pub fn rank(&self) -> usize {
        self.base.len()
    }

    pub fn is_all_affine(&self) -> bool {
        self.components.iter().all(|c| c.label.is_affine())
    }

    pub fn contains_root(&self, v: &[i64]) -> bool {
        self.real_roots
            .binary_search_by(|r| r.as_slice().cmp(v))
            .is_ok()
    }
}

/// Sign of a root under the deterministic positivity functional: delta-level
/// first, lexicographic on coordinates as tie-break.
pub fn root_sign(sys: &AffineRootSystem, v: &[i64]) -> Ordering {
    let c = sys.delta_coefficient(v);
    match c.cmp(&Rat::zero()) {
        Ordering::Equal => {
            for &x in v {
                match x.cmp(&0) {
                    Ordering::Equal => continue,
                    other => return other,
                }
            }
            Ordering::Equal
        }
        other => other,
    }
}

/// Condition (1): alpha - beta is never a root, over all unordered pairs of
/// the candidate base. With `full_check = false` pairs of two long roots are
/// skipped (sound by the length argument when middles are absent); the
/// verification mode checks everything.
pub fn check_simple_root_condition(
    sys: &AffineRootSystem,
    base: &[Root],
    full_check: bool,
) -> Result<std::result::Result<(), (Root, Root)>> {
    let mut classes = Vec::with_capacity(base.len());
    for b in base {
        match sys.is_root(b)? {
            RootKind::Real(c) => classes.push(c),
            _ => return Err(Error::NotARealRoot(b.clone())),
        }
    }
    let has_middle = classes.iter().any(|&c| c == LengthClass::Middle);
    for i in 0..base.len() {
        for j in (i + 1)..base.len() {
            if !full_check
                && !has_middle
                && classes[i] == LengthClass::Long
                && classes[j] == LengthClass::Long
            {
                continue;
            }
            let diff: Root = base[i]
                .iter()
                .zip(&base[j])
                .map(|(&a, &b)| a - b)
                .collect();
            if sys.is_root(&diff)? != RootKind::NotARoot {
                return Ok(Err((base[i].clone(), base[j].clone())));
            }
        }
    }
    Ok(Ok(()))
}

/// Reflection closure of a seed set inside the ambient system, truncated at
/// the given delta-level bound. Also closes under doubling (alpha and
/// 2*alpha both roots), which the addition-closure of subsystems demands.
pub fn reflection_closure(
    sys: &AffineRootSystem,
    seeds: &[Root],
    bound: i64,
) -> (Vec<Root>, bool) {
    // integer-scaled copy of the form for the hot inner products
    let n = sys.nodes();
    let mut lcm = 1i64;
    for row in &sys.form {
        for x in row {
            lcm = num_integer::lcm(lcm, *x.denom());
        }
    }
    let iform: Vec<Vec<i64>> = sys
        .form
        .iter()
        .map(|r| r.iter().map(|x| (*x * Rat::from_integer(lcm)).to_integer()).collect())
        .collect();
    let iip = |u: &[i64], v: &[i64]| -> i128 {
        let mut acc: i128 = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            for j in 0..n {
                if v[j] != 0 {
                    acc += u[i] as i128 * v[j] as i128 * iform[i][j] as i128;
                }
            }
        }
        acc
    };
    let a0 = sys.marks[0];
    let level_ok = |v: &[i64]| -> bool { v[0].abs() <= bound.saturating_mul(a0) };
    let mut set: HashSet<Root> = HashSet::new();
    let mut queue: Vec<Root> = Vec::new();
    let mut truncated = false;
    let admit = |v: Root,
                 set: &mut HashSet<Root>,
                 queue: &mut Vec<Root>,
                 truncated: &mut bool| {
        if !level_ok(&v) {
            *truncated = true;
            return;
        }
        if set.insert(v.clone()) {
            queue.push(v);
        }
    };
    for s in seeds {
        admit(s.clone(), &mut set, &mut queue, &mut truncated);
        admit(
            s.iter().map(|&x| -x).collect(),
            &mut set,
            &mut queue,
            &mut truncated,
        );
    }
    let mut idx = 0;
    while idx < queue.len() {
        let alpha = queue[idx].clone();
        idx += 1;
        let asq = iip(&alpha, &alpha);
        // doubling: if 2*alpha is an ambient root it belongs to the subsystem
        let dbl: Root = alpha.iter().map(|&x| 2 * x).collect();
        if sys.is_real_root(&dbl) {
            admit(dbl, &mut set, &mut queue, &mut truncated);
        }
        let snapshot: Vec<Root> = set.iter().cloned().collect();
        for beta in snapshot {
            let num = 2 * iip(&alpha, &beta);
            if num % asq != 0 {
                continue;
            }
            let c = (num / asq) as i64;
            if c == 0 {
                continue;
            }
            let refl: Root = beta
                .iter()
                .zip(&alpha)
                .map(|(&b, &a)| b - c * a)
                .collect();
            admit(refl, &mut set, &mut queue, &mut truncated);
        }
    }
    let mut out: Vec<Root> = set.into_iter().collect();
    out.sort();
    (out, truncated)
}

/// Simple roots of a closed root set: positive roots that are not sums of
/// two positive roots of the set. Sound under truncation because positive
/// levels are nonnegative, so both summands of a visible root are visible.
pub fn extract_base(sys: &AffineRootSystem, roots: &[Root]) -> Vec<Root> {
    let positives: Vec<Root> = roots
        .iter()
        .filter(|v| root_sign(sys, v) == Ordering::Greater)
        .cloned()
        .collect();
    let set: HashSet<&Root> = positives.iter().collect();
    // positive imaginary roots of the subsystem: sums of two members that
    // land on the delta line count as root summands too
    let mut imag: HashSet<Root> = HashSet::new();
    for u in roots {
        for w in roots {
            let s: Root = u.iter().zip(w).map(|(&a, &b)| a + b).collect();
            if s.iter().all(|&x| x == 0) {
                continue;
            }
            let fp = sys.finite_part(&s);
            if fp.iter().all(num_traits::Zero::is_zero)
                && sys.delta_coefficient(&s) > Rat::zero()
            {
                imag.insert(s);
            }
        }
    }
    let mut base: Vec<Root> = Vec::new();
    'outer: for v in &positives {
        for u in &positives {
            if u == v {
                continue;
            }
            let w: Root = v.iter().zip(u).map(|(&a, &b)| a - b).collect();
            if set.contains(&w) {
                continue 'outer;
            }
        }
        for m in &imag {
            let w: Root = v.iter().zip(m).map(|(&a, &b)| a - b).collect();
            if set.contains(&w) {
                continue 'outer;
            }
        }
        base.push(v.clone());
    }
    base.sort();
    base
}

fn component_decoration(
    sys: &AffineRootSystem,
    base: &[Root],
    nodes: &[usize],
) -> Option<LengthClass> {
    let min_sq = nodes
        .iter()
        .map(|&i| sys.ip(&base[i], &base[i]))
        .min()
        .unwrap();
    sys.decoration_for(min_sq)
}

/// Build a subsystem record from an already-closed root set.
pub fn subsystem_from_roots(
    sys: &AffineRootSystem,
    roots: Vec<Root>,
    m_max: i64,
    truncated: bool,
) -> Result<Subsystem> {
    let base = extract_base(sys, &roots);
    if base.is_empty() {
        return Err(Error::BoundExceeded(m_max as usize));
    }
    let cartan =
        base_cartan(&sys.form, &base).ok_or_else(|| Error::InvalidGcm("subsystem base".into()))?;
    let comps = recognize::recognize_type(&cartan)?;
    let components: Vec<SubComponent> = comps
        .into_iter()
        .map(|(nodes, label)| {
            let decor = component_decoration(sys, &base, &nodes);
            SubComponent {
                label: label.decorated(decor),
                nodes,
            }
        })
        .collect();
    let lattice = lattice_from_roots(sys.nodes(), &roots)?;
    Ok(Subsystem {
        base,
        cartan,
        components,
        lattice,
        real_roots: roots,
        m_max,
        truncated,
    })
}

/// Minimal subsystem containing the seeds (reflection closure plus
/// doubling), truncated at m_max.
pub fn minimal_subsystem(
    sys: &AffineRootSystem,
    seeds: &[Root],
    m_max: i64,
) -> Result<Subsystem> {
    for s in seeds {
        if !sys.is_real_root(s) {
            return Err(Error::NotARealRoot(s.clone()));
        }
    }
    if let Err((a, b)) = check_simple_root_condition(sys, seeds, true)? {
        return Err(Error::ConditionViolated(a, b));
    }
    let (roots, truncated) = reflection_closure(sys, seeds, m_max);
    subsystem_from_roots(sys, roots, m_max, truncated)
}

/// Truncated Theorem-style certificate: the subsystem equals the
/// intersection of the ambient real roots with its own lattice, up to m_max.
pub fn verify_lattice_criterion(
    sys: &AffineRootSystem,
    sub: &Subsystem,
    m_max: i64,
) -> bool {
    let Ok(intersection) = crate::lattice::intersect_with_roots(sys, &sub.lattice, m_max) else {
        return false;
    };
    let inter_real: Vec<Root> = intersection
        .into_iter()
        .filter(|v| sys.is_real_root(v))
        .collect();
    let sub_real: Vec<Root> = sub
        .real_roots
        .iter()
        .filter(|v| sys.delta_coefficient(v).abs() <= Rat::from_integer(m_max))
        .cloned()
        .collect();
    inter_real == sub_real
}

// --- translation lattices and reflection-subgroup indices ---

/// Primitive integer direction of a rational finite-part vector, and the
/// (signed) scale with fp = s * d0.
fn primitive_direction(fp: &[Rat]) -> (Vec<i64>, Rat) {
    let lcm = fp
        .iter()
        .fold(1i64, |acc, v| num_integer::lcm(acc, *v.denom()));
    let ints: Vec<i64> = fp
        .iter()
        .map(|v| (*v * Rat::from_integer(lcm)).to_integer())
        .collect();
    let g = ints.iter().fold(0i64, |acc, &v| gcd_i64(acc, v));
    let mut d0: Vec<i64> = ints.iter().map(|&v| v / g).collect();
    let mut sign = 1i64;
    for &x in &d0 {
        if x != 0 {
            if x < 0 {
                sign = -1;
            }
            break;
        }
    }
    if sign < 0 {
        d0.iter_mut().for_each(|x| *x = -*x);
    }
    // fp = s * d0 with s = (fp_i / d0_i) at any nonzero coordinate
    let i = d0.iter().position(|&x| x != 0).unwrap();
    let s = fp[i] / Rat::from_integer(d0[i]);
    (d0, s)
}

fn gcd_rat(a: Rat, b: Rat) -> Rat {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let d = num_integer::lcm(*a.denom(), *b.denom());
    let an = (a * Rat::from_integer(d)).to_integer();
    let bn = (b * Rat::from_integer(d)).to_integer();
    Rat::new(gcd_i64(an, bn), d)
}

/// Translation sublattice of the affine Weyl group of a root collection.
/// Hyperplane positions in each root direction are gathered (an alpha and a
/// 2*alpha give the same reflection family, so positions are measured
/// against the primitive direction); the gcd of position differences scales
/// the primitive coroot.
fn translation_generators_from_positions(
    sys: &AffineRootSystem,
    per_direction: &std::collections::HashMap<Vec<i64>, Vec<Rat>>,
) -> Result<Vec<Vec<Rat>>> {
    let mut gens = Vec::new();
    for (d0, positions) in per_direction {
        let mut ps = positions.clone();
        ps.sort();
        ps.dedup();
        if ps.len() < 2 {
            return Err(Error::BoundExceeded(ps.len()));
        }
        let mut g = Rat::zero();
        for w in &ps[1..] {
            g = gcd_rat(g, *w - ps[0]);
        }
        let d0_rat: Vec<Rat> = d0.iter().map(|&x| Rat::from_integer(x)).collect();
        let dsq = sys.ip(d0, d0);
        // g * d0^vee
        let gen: Vec<Rat> = d0_rat
            .iter()
            .map(|&x| g * Rat::from_integer(2) * x / dsq)
            .collect();
        gens.push(gen);
    }
    Ok(gens)
}

/// Covolume (up to the fixed coordinate volume form) of a full-rank rational
/// lattice in the finite slice, via integer HNF of the scaled generators.
/// Only ratios of these values are ever used.
fn rational_covolume(gens: &[Vec<Rat>], finite_rank: usize) -> Result<Rat> {
    let mut denom = 1i64;
    for g in gens {
        for x in g {
            denom = num_integer::lcm(denom, *x.denom());
        }
    }
    let rows: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| {
            g.iter()
                .skip(1) // coordinate 0 vanishes on finite parts
                .map(|&x| (x * Rat::from_integer(denom)).to_integer())
                .collect()
        })
        .collect();
    let h = hnf(&rows);
    if h.len() != finite_rank {
        return Err(Error::BoundExceeded(h.len()));
    }
    let det = crate::linalg::det_i64(&h).abs();
    let det64 = i64::try_from(det).map_err(|_| Error::Overflow)?;
    let mut scale = Rat::from_integer(1);
    for _ in 0..finite_rank {
        scale /= Rat::from_integer(denom);
    }
    Ok(Rat::from_integer(det64) * scale)
}

/// Ambient translation lattice from the closed-form class presentations.
pub fn ambient_translation_covolume(sys: &AffineRootSystem) -> Result<Rat> {
    let mut per_dir: std::collections::HashMap<Vec<i64>, Vec<Rat>> =
        std::collections::HashMap::new();
    for cl in &sys.classes {
        let (d0, s) = primitive_direction(&cl.finite_part);
        let entry = per_dir.entry(d0).or_default();
        // two positions of the progression suffice for the gcd
        let p0 = -cl.level_offset / s;
        let p1 = -(cl.level_offset + cl.level_period) / s;
        entry.push(p0);
        entry.push(p1);
        entry.push(p0 + (p0 - p1)); // symmetric third point for safety
    }
    let gens = translation_generators_from_positions(sys, &per_dir)?;
    rational_covolume(&gens, sys.rank())
}

/// Translation covolume of a subsystem from its truncated root list.
fn subsystem_translation_covolume(sys: &AffineRootSystem, roots: &[Root]) -> Result<Rat> {
    let mut per_dir: std::collections::HashMap<Vec<i64>, Vec<Rat>> =
        std::collections::HashMap::new();
    for v in roots {
        let c = sys.delta_coefficient(v);
        let fp = sys.finite_part(v);
        if fp.iter().all(|x| x.is_zero()) {
            continue;
        }
        let (d0, s) = primitive_direction(&fp);
        per_dir.entry(d0).or_default().push(-c / s);
    }
    let gens = translation_generators_from_positions(sys, &per_dir)?;
    rational_covolume(&gens, sys.rank())
}

/// Order of the finite Weyl group sitting behind a list of affine component
/// labels (product over components of the underlying finite orders).
fn finite_weyl_order_of_components(labels: &[RootSystemLabel]) -> Result<u128> {
    let mut acc: u128 = 1;
    for l in labels {
        let fin = crate::affine::underlying_finite_label(l.bare())?;
        acc *= weyl_order(fin)?;
    }
    Ok(acc)
}

/// Index of the reflection subgroup generated by the subsystem inside the
/// ambient affine Weyl group: ratio of translation covolumes weighted by the
/// finite Weyl group orders. Infinite when the subsystem has lower rank.
pub fn weyl_index(sys: &AffineRootSystem, sub: &Subsystem) -> Result<Index> {
    for c in &sub.components {
        if !c.label.is_affine() {
            return Err(Error::NotAffine(c.label.to_string()));
        }
    }
    if crate::affine::span_rank(&sub.base) < sys.nodes() {
        return Ok(Index::Infinite);
    }
    // the subsystem's stored window may be too small to see every level
    // pattern; widen adaptively before giving up
    let mut roots = sub.real_roots.clone();
    let mut bound = sub.m_max;
    loop {
        match weyl_index_from_roots(sys, sub, &roots) {
            Ok(ix) => return Ok(ix),
            Err(Error::BoundExceeded(_)) if bound < 64 => {
                bound *= 2;
                let (r, _) = reflection_closure(sys, &sub.base, bound);
                roots = r;
            }
            Err(e) => return Err(e),
        }
    }
}

fn weyl_index_from_roots(
    sys: &AffineRootSystem,
    sub: &Subsystem,
    roots: &[Root],
) -> Result<Index> {
    let cov_ambient = ambient_translation_covolume(sys)?;
    let cov_sub = subsystem_translation_covolume(sys, roots)?;
    let w_ambient = weyl_order(sys.underlying_finite.label)?;
    let w_sub = finite_weyl_order_of_components(&sub.component_labels())?;
    // [W : W1] = (cov1 / |W1|) / (cov / |W|)
    let ratio = cov_sub / cov_ambient;
    let num = ratio * Rat::from_integer(w_ambient as i64);
    let ix = num / Rat::from_integer(w_sub as i64);
    if !ix.is_integer() || ix <= Rat::zero() {
        return Err(Error::BoundExceeded(0));
    }
    Ok(Index::Finite(ix.to_integer() as u128))
}
