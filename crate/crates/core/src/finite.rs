//! Finite root systems of types A-G with exact coordinates in the simple-root
//! basis, the invariant form normalized so the highest root has squared
//! length 2, and the extended-diagram machinery for maximal subsystems.

use crate::error::{Error, Result};
use crate::labels::{Family, RootSystemLabel};
use crate::linalg::{form_ip, rank_rat, Rat};
use num_traits::{One, Zero};
use std::collections::HashSet;

pub type Root = Vec<i64>;

/// Cartan matrix convention: `a[i][j] = 2(a_i|a_j)/(a_i|a_i)`, so the
/// reflection in a_i acts on coordinates by v_i -> v_i - sum_j a[i][j] v_j.
pub fn finite_cartan(family: Family, rank: usize) -> Result<Vec<Vec<i64>>> {
    use Family::*;
    let n = rank;
    let chain = |n: usize| -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            m[i][i] = 2;
            if i + 1 < n {
                m[i][i + 1] = -1;
                m[i + 1][i] = -1;
            }
        }
        m
    };
    let label = RootSystemLabel::finite(family, rank);
    if !label.is_canonical() {
        return Err(Error::UnknownLabel(format!("{}", label)));
    }
    Ok(match family {
        A => chain(n),
        B => {
            // a_n short: the -2 sits in the last row
            let mut m = chain(n);
            m[n - 1][n - 2] = -2;
            m
        }
        C => {
            let mut m = chain(n);
            m[n - 2][n - 1] = -2;
            m
        }
        D => {
            let mut m = chain(n - 1);
            m.iter_mut().for_each(|r| r.push(0));
            m.push(vec![0; n]);
            m[n - 1][n - 1] = 2;
            // last node attaches to the fork point n-3 (0-indexed)
            m[n - 1][n - 3] = -1;
            m[n - 3][n - 1] = -1;
            // break the chain bond (n-2, n-1) added by chain(n-1)? chain(n-1)
            // only covered nodes 0..n-2, so nothing to undo.
            m
        }
        E => {
            // Bourbaki: chain 1-3-4-5-...-n with node 2 attached to node 4.
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                m[i][i] = 2;
            }
            let mut bond = |i: usize, j: usize| {
                m[i][j] = -1;
                m[j][i] = -1;
            };
            bond(0, 2);
            bond(1, 3);
            for i in 2..n - 1 {
                bond(i, i + 1);
            }
            m
        }
        F => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, 0],
            vec![0, -2, 2, -1],
            vec![0, 0, -1, 2],
        ],
        G => vec![vec![2, -3], vec![-1, 2]],
    })
}

/// Symmetrizer d with d_i * a[i][j] = (a_i|a_j); returned unnormalized
/// (connected components each start at 1).
fn symmetrizer(cartan: &[Vec<i64>]) -> Vec<Rat> {
    let n = cartan.len();
    let mut d: Vec<Option<Rat>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(Rat::one());
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && cartan[i][j] != 0 && d[j].is_none() {
                    // d_i a_ij = d_j a_ji
                    let dj = d[i].unwrap() * Rat::new(cartan[i][j], cartan[j][i]);
                    d[j] = Some(dj);
                    stack.push(j);
                }
            }
        }
    }
    d.into_iter().map(|x| x.unwrap()).collect()
}

/// Build the Gram matrix (a_i|a_j) = d_i a[i][j] from a symmetrizable GCM,
/// without normalization.
pub fn gram_from_cartan(cartan: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let d = symmetrizer(cartan);
    let n = cartan.len();
    let mut g = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = d[i] * Rat::from_integer(cartan[i][j]);
        }
    }
    g
}

#[derive(Debug, Clone)]
pub struct FiniteRootSystem {
    pub label: RootSystemLabel,
    pub cartan: Vec<Vec<i64>>,
    /// Invariant form on the simple-root basis, (theta|theta) = 2.
    pub form: Vec<Vec<Rat>>,
    pub simple_roots: Vec<Root>,
    pub positive_roots: Vec<Root>,
    /// All roots in lexicographic order.
    pub all_roots: Vec<Root>,
    pub highest_root: Root,
    pub dim_g: usize,
    pub dual_coxeter: i64,
}

impl FiniteRootSystem {
    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn lowest_root(&self) -> Root {
        self.highest_root.iter().map(|&x| -x).collect()
    }

    pub fn ip(&self, u: &[i64], v: &[i64]) -> Rat {
        form_ip(&self.form, u, v)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.all_roots.binary_search_by(|r| r.as_slice().cmp(v)).is_ok()
    }
}

/// Positive roots of a finite-type GCM by closing the simple roots under
/// root-string addition. Terminates because the type is finite.
pub fn positive_roots_from_cartan(cartan: &[Vec<i64>]) -> Vec<Root> {
    let n = cartan.len();
    let mut known: HashSet<Root> = HashSet::new();
    let mut frontier: Vec<Root> = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        known.insert(e.clone());
        frontier.push(e);
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for beta in frontier {
            for i in 0..n {
                // p = <beta, a_i^vee>
                let p: i64 = (0..n).map(|j| cartan[i][j] * beta[j]).sum();
                // r = how far the string extends downward
                let mut r = 0i64;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    let is_simple_neg = down.iter().all(|&x| x == 0);
                    if !is_simple_neg && down.iter().any(|&x| x < 0) {
                        break;
                    }
                    if is_simple_neg || known.contains(&down) {
                        r += 1;
                    } else {
                        break;
                    }
                }
                if r - p > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Root> = known.into_iter().collect();
    out.sort();
    out
}

pub fn build_finite(label: RootSystemLabel) -> Result<FiniteRootSystem> {
    let parts = label.normalize();
    if parts.len() != 1 {
        return Err(Error::UnknownLabel(format!(
            "{} is decomposable after alias normalization",
            label
        )));
    }
    let label = parts[0].bare();
    if !label.is_finite() || !label.is_canonical() {
        return Err(Error::UnknownLabel(format!("{}", label)));
    }
    let cartan = finite_cartan(label.family, label.rank)?;
    build_finite_from_cartan(label, cartan)
}

fn build_finite_from_cartan(
    label: RootSystemLabel,
    cartan: Vec<Vec<i64>>,
) -> Result<FiniteRootSystem> {
    let n = cartan.len();
    let positive = positive_roots_from_cartan(&cartan);
    let mut all: Vec<Root> = positive
        .iter()
        .cloned()
        .chain(positive.iter().map(|r| r.iter().map(|&x| -x).collect()))
        .collect();
    all.sort();
    // highest root: the positive root of maximal height (unique, irreducible)
    let highest = positive
        .iter()
        .max_by_key(|r| (r.iter().sum::<i64>(), (*r).clone()))
        .unwrap()
        .clone();
    // normalize form so (theta|theta) = 2
    let gram = gram_from_cartan(&cartan);
    let theta_sq = form_ip(&gram, &highest, &highest);
    let scale = Rat::from_integer(2) / theta_sq;
    let form: Vec<Vec<Rat>> = gram
        .iter()
        .map(|row| row.iter().map(|&x| x * scale).collect())
        .collect();
    let simple_roots: Vec<Root> = (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            e
        })
        .collect();
    let dim_g = all.len() + n;
    // dual Coxeter number via the comarks of the untwisted affinization:
    // h-check = 1 + sum_i theta_i (a_i|a_i)/2, cross-checked below.
    let mut h = Rat::one();
    for i in 0..n {
        h += Rat::from_integer(highest[i]) * form[i][i] / Rat::from_integer(2);
    }
    assert!(h.is_integer(), "dual Coxeter must be integral");
    let dual_coxeter = h.to_integer();
    debug_assert_eq!(dual_coxeter, dual_coxeter_table(label.family, n));
    Ok(FiniteRootSystem {
        label,
        cartan,
        form,
        simple_roots,
        positive_roots: positive,
        all_roots: all,
        highest_root: highest,
        dim_g,
        dual_coxeter,
    })
}

/// Hardcoded classical values, used as a cross-check of the computed ones.
pub fn dual_coxeter_table(family: Family, n: usize) -> i64 {
    match family {
        Family::A => n as i64 + 1,
        Family::B => 2 * n as i64 - 1,
        Family::C => n as i64 + 1,
        Family::D => 2 * n as i64 - 2,
        Family::E => match n {
            6 => 12,
            7 => 18,
            _ => 30,
        },
        Family::F => 9,
        Family::G => 4,
    }
}

pub fn dual_coxeter(label: RootSystemLabel) -> Result<i64> {
    Ok(build_finite(label)?.dual_coxeter)
}

/// Order of the finite Weyl group (used by affine Weyl index computations).
pub fn weyl_order(label: RootSystemLabel) -> Result<u128> {
    let parts = label.normalize();
    if parts.len() != 1 {
        let mut acc: u128 = 1;
        for p in parts {
            acc *= weyl_order(p)?;
        }
        return Ok(acc);
    }
    let l = parts[0];
    let n = l.rank as u32;
    let fact = |k: u32| -> u128 { (1..=k as u128).product::<u128>().max(1) };
    Ok(match l.family {
        Family::A => fact(n + 1),
        Family::B | Family::C => 2u128.pow(n) * fact(n),
        Family::D => 2u128.pow(n - 1) * fact(n),
        Family::E => match l.rank {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        Family::F => 1152,
        Family::G => 12,
    })
}

/// Reflection closure of a seed set: smallest set closed under negation and
/// under the reflections it generates. With `bound = None` the closure runs
/// until stable (caller asserts finiteness); in bounded mode vectors whose
/// coordinate height exceeds the bound are not expanded and the flag reports
/// whether anything was cut off.
pub fn root_closure(
    form: &[Vec<Rat>],
    seed: &[Root],
    bound: Option<i64>,
) -> Result<(Vec<Root>, bool)> {
    let mut set: HashSet<Root> = HashSet::new();
    let mut queue: Vec<Root> = Vec::new();
    for s in seed {
        if s.len() != form.len() {
            return Err(Error::DimensionMismatch {
                expected: form.len(),
                got: s.len(),
            });
        }
        for v in [s.clone(), s.iter().map(|&x| -x).collect::<Vec<_>>()] {
            if set.insert(v.clone()) {
                queue.push(v);
            }
        }
    }
    let height = |v: &Root| -> i64 { v.iter().map(|&x| x.abs()).sum() };
    let mut truncated = false;
    let mut idx = 0;
    while idx < queue.len() {
        let alpha = queue[idx].clone();
        idx += 1;
        if let Some(b) = bound {
            if height(&alpha) > b {
                truncated = true;
                continue;
            }
        }
        let asq = form_ip(form, &alpha, &alpha);
        if asq.is_zero() {
            continue;
        }
        let snapshot: Vec<Root> = set.iter().cloned().collect();
        for beta in snapshot {
            let coeff = Rat::from_integer(2) * form_ip(form, &alpha, &beta) / asq;
            if !coeff.is_integer() {
                // not a crystallographic pair; reflection leaves the lattice
                continue;
            }
            let c = coeff.to_integer();
            if c == 0 {
                continue;
            }
            let refl: Root = beta
                .iter()
                .zip(alpha.iter())
                .map(|(&b, &a)| b - c * a)
                .collect();
            if let Some(b) = bound {
                if height(&refl) > b {
                    truncated = true;
                    continue;
                }
            }
            if set.insert(refl.clone()) {
                queue.push(refl);
            }
        }
        if bound.is_none() && set.len() > 100_000 {
            return Err(Error::BoundExceeded(100_000));
        }
    }
    let mut out: Vec<Root> = set.into_iter().collect();
    out.sort();
    Ok((out, truncated))
}

/// One maximal subsystem of a finite system: recognized components and the
/// simple roots realizing them (coordinates of the ambient system).
#[derive(Debug, Clone)]
pub struct FiniteSubsystem {
    pub components: Vec<RootSystemLabel>,
    pub simple_roots: Vec<Root>,
}

/// Maximal (proper) closed subsystems via the extended-diagram procedure:
/// delete a node of prime mark from the extended diagram, or a node of mark 1
/// from the finite diagram (the corank-one case; for type A this is the only
/// source). Results are deduplicated by component multiset.
pub fn finite_maximal_subsystems(label: RootSystemLabel) -> Result<Vec<FiniteSubsystem>> {
    let sys = build_finite(label)?;
    let n = sys.rank();
    let marks = &sys.highest_root;
    let lowest = sys.lowest_root();
    let mut found: Vec<FiniteSubsystem> = Vec::new();
    let mut seen: HashSet<Vec<RootSystemLabel>> = HashSet::new();

    let push = |base: Vec<Root>, found: &mut Vec<FiniteSubsystem>,
                    seen: &mut HashSet<Vec<RootSystemLabel>>| {
        if base.is_empty() {
            return;
        }
        let comps = match recognize_finite_base(&sys, &base) {
            Some(c) => c,
            None => return,
        };
        // proper check: same rank + same type means we rebuilt the ambient
        if comps.len() == 1 && comps[0].bare() == sys.label {
            return;
        }
        let mut key = comps.clone();
        key.sort();
        if seen.insert(key.clone()) {
            found.push(FiniteSubsystem {
                components: key,
                simple_roots: base,
            });
        }
    };

    let is_prime = |m: i64| m == 2 || m == 3 || m == 5 || m == 7;
    // extended-diagram deletions at prime marks
    for v in 0..n {
        if is_prime(marks[v]) {
            let mut base: Vec<Root> = Vec::new();
            base.push(lowest.clone());
            for i in 0..n {
                if i != v {
                    base.push(sys.simple_roots[i].clone());
                }
            }
            push(base, &mut found, &mut seen);
        }
    }
    // corank-one deletions at mark-1 nodes of the finite diagram
    for v in 0..n {
        if marks[v] == 1 {
            let base: Vec<Root> = (0..n)
                .filter(|&i| i != v)
                .map(|i| sys.simple_roots[i].clone())
                .collect();
            push(base, &mut found, &mut seen);
        }
    }
    Ok(found)
}

/// Recognize the component types of an independent obtuse base inside a
/// finite ambient system. Returns None if the Gram data is not a valid
/// finite-type Cartan matrix.
pub fn recognize_finite_base(
    sys: &FiniteRootSystem,
    base: &[Root],
) -> Option<Vec<RootSystemLabel>> {
    let gcm = base_cartan(&sys.form, base)?;
    let comps = crate::recognize::split_components(&gcm);
    let mut out = Vec::new();
    for comp in comps {
        let sub = crate::recognize::submatrix(&gcm, &comp);
        let label = crate::recognize::match_finite(&sub)?;
        // decoration: ambient length class of the component's shortest root
        let decor = component_decoration(sys, base, &comp);
        out.push(label.decorated(decor));
    }
    out.sort();
    Some(out)
}

fn component_decoration(
    sys: &FiniteRootSystem,
    base: &[Root],
    comp: &[usize],
) -> Option<crate::labels::LengthClass> {
    let mut lengths: Vec<Rat> = sys
        .all_roots
        .iter()
        .map(|r| sys.ip(r, r))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    lengths.sort();
    lengths.dedup();
    if lengths.len() <= 1 {
        return None;
    }
    let shortest = comp
        .iter()
        .map(|&i| sys.ip(&base[i], &base[i]))
        .min()
        .unwrap();
    let pos = lengths.iter().position(|&l| l == shortest).unwrap();
    Some(match (pos, lengths.len()) {
        (0, _) => crate::labels::LengthClass::Short,
        (1, 3) => crate::labels::LengthClass::Middle,
        _ => crate::labels::LengthClass::Long,
    })
}

/// Cartan matrix of a base from an ambient form; entries must be nonpositive
/// integers off the diagonal or the base is not a valid simple system.
pub fn base_cartan(form: &[Vec<Rat>], base: &[Root]) -> Option<Vec<Vec<i64>>> {
    let m = base.len();
    let mut gcm = vec![vec![0i64; m]; m];
    for i in 0..m {
        let di = form_ip(form, &base[i], &base[i]);
        if di <= Rat::zero() {
            return None;
        }
        for j in 0..m {
            let x = Rat::from_integer(2) * form_ip(form, &base[i], &base[j]) / di;
            if !x.is_integer() {
                return None;
            }
            let v = x.to_integer();
            if i == j {
                if v != 2 {
                    return None;
                }
            } else if v > 0 {
                return None;
            }
            gcm[i][j] = v;
        }
    }
    Some(gcm)
}

/// Independence check for candidate bases (rational rank of the row span).
pub fn independent(base: &[Root]) -> bool {
    if base.is_empty() {
        return true;
    }
    let rows: Vec<Vec<Rat>> = base
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(x)).collect())
        .collect();
    rank_rat(&rows) == base.len()
}
