//! Exact Virasoro central-charge arithmetic for coset pairs: Sugawara
//! charges as rational functions of the level k, Dynkin indices of embedded
//! components, conformally invariant levels, the twisted grading factor, and
//! a registry transcribing every displayed coset formula for verification.

use crate::error::{Error, Result};
use crate::finite::{build_finite, root_closure, FiniteRootSystem, Root};
use crate::labels::{parse_label, RootSystemLabel};
use crate::linalg::Rat;
use crate::poly::{Poly, RationalFn};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// A central charge: reduced rational function of k plus the critical levels
/// excluded from every level computation.
#[derive(Debug, Clone)]
pub struct Charge {
    pub func: RationalFn,
    pub excluded_levels: Vec<BigRational>,
}

impl Charge {
    fn new(func: RationalFn, mut excluded: Vec<BigRational>) -> Self {
        excluded.sort();
        excluded.dedup();
        Charge {
            func,
            excluded_levels: excluded,
        }
    }
}

fn dim_and_coxeter(label: RootSystemLabel) -> Result<(i64, i64)> {
    let sys = build_finite(label)?;
    Ok((sys.dim_g as i64, sys.dual_coxeter))
}

/// D_{a k}(h) for a rational level ratio a = p/q:
/// a k dim / (a k + h-check) = p k dim / (p k + q h-check).
fn scaled_term(label: RootSystemLabel, ratio: Rat) -> Result<(RationalFn, BigRational)> {
    let (dim, hv) = dim_and_coxeter(label)?;
    let p = *ratio.numer();
    let q = *ratio.denom();
    let num = Poly::linear(p * dim, 0);
    let den = Poly::linear(p, q * hv);
    // critical level: a k = -hv  =>  k = -hv/a
    let critical = BigRational::new(BigInt::from(-hv * q), BigInt::from(p));
    Ok((RationalFn::new(num, den), critical))
}

/// Sugawara charge of a semisimple finite algebra: sum of k dim/(k + hv).
pub fn sugawara_charge(labels: &[RootSystemLabel]) -> Result<Charge> {
    let mut func = RationalFn::zero();
    let mut excluded = Vec::new();
    for l in labels {
        for part in l.normalize() {
            let (term, critical) = scaled_term(part.bare(), Rat::from_integer(1))?;
            func = func.add(&term);
            excluded.push(critical);
        }
    }
    Ok(Charge::new(func, excluded))
}

/// One embedded component: finite type plus the squared length j of its
/// highest root under the ambient normalized form.
#[derive(Debug, Clone)]
pub struct EmbeddedComponent {
    pub label: RootSystemLabel,
    pub j: Rat,
}

impl EmbeddedComponent {
    pub fn level_ratio(&self) -> Rat {
        Rat::from_integer(2) / self.j
    }

    pub fn dynkin_index(&self) -> Rat {
        self.level_ratio()
    }
}

/// j and the induced level map for a component realized by explicit simple
/// roots inside a finite ambient system.
pub fn dynkin_index(
    ambient: &FiniteRootSystem,
    component_simples: &[Root],
) -> Result<EmbeddedComponent> {
    for r in component_simples {
        if !ambient.contains(r) {
            return Err(Error::NotEmbedded(format!("{:?}", r)));
        }
    }
    let (roots, _) = root_closure(&ambient.form, component_simples, None)?;
    for r in &roots {
        if !ambient.contains(r) {
            return Err(Error::NotEmbedded(format!("{:?}", r)));
        }
    }
    // the maximum in (height, lex) order over a symmetric root set is the
    // highest root for the standard positivity
    let highest = roots
        .iter()
        .max_by_key(|r| (r.iter().sum::<i64>(), (*r).clone()))
        .ok_or_else(|| Error::NotEmbedded("empty component".into()))?;
    let gcm = crate::finite::base_cartan(&ambient.form, component_simples)
        .ok_or_else(|| Error::NotEmbedded("component base is not simple".into()))?;
    let comps = crate::recognize::recognize_type(&gcm)?;
    if comps.len() != 1 {
        return Err(Error::NotEmbedded("component not indecomposable".into()));
    }
    // j: the squared length of the component's own highest root; for the
    // level map the highest root of the closure is what matters.
    let j = ambient.ip(highest, highest);
    Ok(EmbeddedComponent {
        label: comps[0].1,
        j,
    })
}

/// Coset charge with an explicit grading factor r on the ambient term:
/// r D_k(g) - sum_i D_{(2/j_i) k}(h_i).
pub fn coset_charge_with(
    g: &[RootSystemLabel],
    components: &[EmbeddedComponent],
    r: Rat,
) -> Result<Charge> {
    let g_charge = sugawara_charge(g)?;
    let r_big = BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let mut func = g_charge.func.mul_rat(&r_big);
    let mut excluded = g_charge.excluded_levels.clone();
    for comp in components {
        for part in comp.label.normalize() {
            let (term, critical) = scaled_term(part.bare(), comp.level_ratio())?;
            func = func.sub(&term);
            excluded.push(critical);
        }
    }
    Ok(Charge::new(func, excluded))
}

/// Untwisted coset charge D_k(g) - D_k(h) with component level maps.
pub fn coset_charge(
    g: &[RootSystemLabel],
    components: &[EmbeddedComponent],
) -> Result<Charge> {
    coset_charge_with(g, components, Rat::from_integer(1))
}

/// Twisted coset charge r D_k(g) - D_{k'}(h) for g of type X_N^(p) and
/// subalgebra components Y_m^(q_i) with declared j values. The grading
/// factor is r = q n_s(h) / (p n_s(g)) with q the order of the restricted
/// automorphism (lcm of component twists) and n_s = 1 for diagram
/// automorphisms (the default when no tuples are passed).
pub fn twisted_coset_charge(
    g_affine: RootSystemLabel,
    h_components: &[(RootSystemLabel, Rat)],
    s_g: Option<&[i64]>,
    s_h: Option<&[i64]>,
) -> Result<Charge> {
    if !g_affine.is_affine() {
        return Err(Error::UnknownLabel(format!("{}", g_affine)));
    }
    let p = g_affine.twist as i64;
    let q = h_components
        .iter()
        .map(|(l, _)| l.twist.max(1) as i64)
        .fold(1i64, num_integer::lcm);
    let n_s_g = match s_g {
        Some(s) => crate::affine::build_affine(g_affine)?.n_s(s)?,
        None => 1,
    };
    let n_s_h = match s_h {
        Some(s) => {
            let first = h_components
                .first()
                .ok_or_else(|| Error::NotEmbedded("empty subalgebra".into()))?;
            crate::affine::build_affine(first.0.bare())?.n_s(s)?
        }
        None => 1,
    };
    let r = Rat::new(q * n_s_h, p * n_s_g);
    // the ambient Sugawara term uses the big finite algebra X_N
    let g_fin = RootSystemLabel::finite(g_affine.family, g_affine.rank);
    let comps: Vec<EmbeddedComponent> = h_components
        .iter()
        .map(|(l, j)| EmbeddedComponent {
            label: RootSystemLabel::finite(l.family, l.rank),
            j: *j,
        })
        .collect();
    coset_charge_with(&[g_fin], &comps, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    Integer,
    HalfInteger,
    OtherRational,
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    pub levels: Vec<(BigRational, LevelKind)>,
    /// numerator roots that are not rational (count with multiplicity)
    pub irrational_count: usize,
}

impl LevelReport {
    pub fn integer_levels(&self) -> Vec<i64> {
        self.levels
            .iter()
            .filter(|(_, k)| *k == LevelKind::Integer)
            .map(|(v, _)| {
                let n = v.numer();
                i64::try_from(n).unwrap_or(i64::MAX)
            })
            .collect()
    }
}

/// Conformally invariant levels: rational roots of the reduced numerator,
/// excluding k = 0 and every critical level.
pub fn conformal_levels(charge: &Charge) -> LevelReport {
    let mut p = charge.func.num.primitive();
    if p.is_zero() {
        return LevelReport {
            levels: Vec::new(),
            irrational_count: 0,
        };
    }
    // strip the global k^m factor
    while p.0.first().map(|c| c.is_zero()) == Some(true) {
        p.0.remove(0);
    }
    let mut levels = Vec::new();
    let mut remaining = p.clone();
    for root in p.rational_roots() {
        if root.is_zero() || charge.excluded_levels.contains(&root) {
            // divide out anyway to keep the irrational count right
        } else {
            let kind = if root.is_integer() {
                LevelKind::Integer
            } else if (&root * BigRational::from_integer(BigInt::from(2))).is_integer() {
                LevelKind::HalfInteger
            } else {
                LevelKind::OtherRational
            };
            levels.push((root.clone(), kind));
        }
        // peel the factor (q k - p) with multiplicity
        let factor = Poly::from_coeffs(vec![-root.numer().clone(), root.denom().clone()]);
        loop {
            let trial = remaining.gcd(&factor);
            if trial.degree() == 1 {
                remaining = remaining.div_exact(&factor).primitive();
            } else {
                break;
            }
        }
    }
    levels.sort_by(|a, b| a.0.cmp(&b.0));
    LevelReport {
        levels,
        irrational_count: remaining.degree(),
    }
}

// ---------- fixture registry: every displayed coset formula ----------

#[derive(Debug, Clone)]
pub struct CosetFixture {
    pub id: String,
    pub ambient: String,
    pub sub: String,
    /// finite algebra whose Sugawara charge enters the ambient term
    pub g_finite: Vec<RootSystemLabel>,
    pub r: Rat,
    pub components: Vec<EmbeddedComponent>,
    pub printed: RationalFn,
    pub twisted: bool,
    pub low_confidence: bool,
}

impl CosetFixture {
    pub fn computed(&self) -> Result<Charge> {
        coset_charge_with(&self.g_finite, &self.components, self.r)
    }
}

#[derive(Debug, Clone)]
pub struct FormulaReport {
    pub id: String,
    pub matches: bool,
    pub computed: RationalFn,
    pub printed: RationalFn,
    /// cross-multiplied polynomial difference (zero iff identical)
    pub difference: Poly,
}

pub fn verify_printed_formula(fixture: &CosetFixture) -> Result<FormulaReport> {
    let computed = fixture.computed()?;
    let diff = computed
        .func
        .num
        .mul(&fixture.printed.den)
        .sub(&fixture.printed.num.mul(&computed.func.den));
    Ok(FormulaReport {
        id: fixture.id.clone(),
        matches: diff.is_zero(),
        computed: computed.func,
        printed: fixture.printed.clone(),
        difference: diff,
    })
}

pub fn fixture_by_id<'a>(fixtures: &'a [CosetFixture], id: &str) -> Result<&'a CosetFixture> {
    fixtures
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::UnknownFixture(id.to_string()))
}

fn fl(s: &str) -> RootSystemLabel {
    parse_label(s).unwrap()
}

/// Components for a (possibly alias) label string; D2 etc. split into
/// several parts sharing the same j.
fn comp(label: &str, j: Rat) -> Vec<EmbeddedComponent> {
    crate::labels::parse_label_list(label)
        .unwrap()
        .into_iter()
        .map(|l| EmbeddedComponent { label: l.bare(), j })
        .collect()
}

fn cat(parts: Vec<Vec<EmbeddedComponent>>) -> Vec<EmbeddedComponent> {
    parts.into_iter().flatten().collect()
}

fn j2() -> Rat {
    Rat::from_integer(2)
}

struct FixtureBuilder {
    out: Vec<CosetFixture>,
}

impl FixtureBuilder {
    fn untwisted(
        &mut self,
        id: String,
        g: &str,
        sub: String,
        comps: Vec<EmbeddedComponent>,
        printed: RationalFn,
    ) {
        self.out.push(CosetFixture {
            id,
            ambient: g.to_string(),
            sub,
            g_finite: vec![fl(g)],
            r: Rat::from_integer(1),
            components: comps,
            printed,
            twisted: false,
            low_confidence: false,
        });
    }

    fn twisted(
        &mut self,
        id: String,
        g_aff: &str,
        sub: String,
        q: i64,
        comps: Vec<EmbeddedComponent>,
        printed: RationalFn,
        low_confidence: bool,
    ) {
        let g = fl(g_aff);
        let p = g.twist as i64;
        self.out.push(CosetFixture {
            id,
            ambient: g_aff.to_string(),
            sub,
            g_finite: vec![RootSystemLabel::finite(g.family, g.rank)],
            r: Rat::new(q, p),
            components: comps,
            printed,
            twisted: true,
            low_confidence,
        });
    }
}

fn k() -> Poly {
    Poly::linear(1, 0)
}

fn lin(a: i64, b: i64) -> Poly {
    Poly::linear(a, b)
}

fn c(v: i64) -> Poly {
    Poly::constant(v)
}

fn prod(ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::constant(1), |acc, p| acc.mul(p))
}

/// The complete fixture registry: untwisted families instantiated at
/// 3 <= n <= 6 (all valid m), the exceptional algebras, and the twisted
/// section with its parametric families.
pub fn coset_fixtures() -> Vec<CosetFixture> {
    let mut b = FixtureBuilder { out: Vec::new() };
    let kk = k();

    // ----- type A -----
    for n in 3..=6i64 {
        for m in 1..n {
            // A_n > A_m + A_{n-m-1}
            let mut comps = comp(&format!("A{}", m), j2());
            let mut sub = format!("A{}", m);
            if n - m - 1 >= 1 {
                comps.extend(comp(&format!("A{}", n - m - 1), j2()));
                sub = format!("A{}+A{}", m, n - m - 1);
            }
            let num = kk.mul(
                &lin(2, n + 1)
                    .mul(&lin((n - m) * (m + 1), n))
                    .sub(&c(m * (n - m - 1)))
                    .add(&lin(1, 1).mul(&lin(1, 1))),
            );
            let den = prod(&[lin(1, n + 1), lin(1, m + 1), lin(1, n - m)]);
            b.untwisted(
                format!("A{}>A{}+A{}", n, m, n - m - 1),
                &format!("A{}", n),
                sub,
                comps,
                RationalFn::new(num, den),
            );
        }
        for m in 1..n {
            // A_n > A_m (indecomposable, lower rank)
            let num = kk
                .mul(&c(n - m))
                .mul(&lin(n + m + 2, (n + m + 2) + n * m));
            let den = prod(&[lin(1, n + 1), lin(1, m + 1)]);
            b.untwisted(
                format!("A{}>A{}", n, m),
                &format!("A{}", n),
                format!("A{}", m),
                cat(vec![comp(&format!("A{}", m), j2())]),
                RationalFn::new(num, den),
            );
        }
    }

    // ----- type B -----
    for n in 3..=6i64 {
        let g = format!("B{}", n);
        b.untwisted(
            format!("B{}>B{}", n, n - 1),
            &g,
            format!("B{}", n - 1),
            cat(vec![comp(&format!("B{}", n - 1), j2())]),
            RationalFn::new(
                kk.mul(&lin(4 * n - 1, 4 * n * n - 8 * n + 1)),
                prod(&[lin(1, 2 * n - 1), lin(1, 2 * n - 3)]),
            ),
        );
        b.untwisted(
            format!("B{}>D{}", n, n),
            &g,
            format!("D{}", n),
            cat(vec![comp(&format!("D{}", n), j2())]),
            RationalFn::new(
                kk.mul(&c(n)).mul(&lin(2, 2 * n - 3)),
                prod(&[lin(1, 2 * n - 1), lin(1, 2 * n - 2)]),
            ),
        );
        for m in 1..=n - 2 {
            // B_m + D_{n-m}; a rank-one B component is the short A_1 (j = 1)
            let bm = if m == 1 {
                comp("A1", Rat::from_integer(1))
            } else {
                comp(&format!("B{}", m), j2())
            };
            let num = prod(&[
                kk.clone(),
                c((n - m) * (2 * m + 1)),
                lin(1, -1),
                lin(2, 2 * n - 3),
            ]);
            let den = prod(&[lin(1, 2 * n - 1), lin(1, 2 * m - 1), lin(1, 2 * (n - m) - 2)]);
            b.untwisted(
                format!("B{}>B{}+D{}", n, m, n - m),
                &g,
                format!("B{}+D{}", m, n - m),
                cat(vec![bm, comp(&format!("D{}", n - m), j2())]),
                RationalFn::new(num, den),
            );
        }
    }

    // ----- type C -----
    for n in 3..=6i64 {
        let g = format!("C{}", n);
        b.untwisted(
            format!("C{}>A{}", n, n - 1),
            &g,
            format!("A{} (short)", n - 1),
            cat(vec![comp(&format!("A{}", n - 1), Rat::from_integer(1))]),
            RationalFn::new(
                kk.mul(&lin(n * n + 2 * n + 1, n * n * n + n + 1)),
                prod(&[lin(1, n + 1), lin(2, n)]),
            ),
        );
        for m in 1..n {
            let num = prod(&[kk.clone(), c(m * (n - m)), lin(2, 1), lin(2, n + 2)]);
            let den = prod(&[lin(1, n + 1), lin(1, m + 1), lin(1, n - m + 1)]);
            b.untwisted(
                format!("C{}>C{}+C{}", n, m, n - m),
                &g,
                format!("C{}+C{}", m, n - m),
                cat(vec![
                    comp(&format!("C{}", m), j2()),
                    comp(&format!("C{}", n - m), j2()),
                ]),
                RationalFn::new(num, den),
            );
        }
        for m in 2..n {
            let num = kk
                .mul(&c(n - m))
                .mul(&lin(2 * (m + n) + 1, 2 * (m + n) + 1 + 2 * m * n));
            let den = prod(&[lin(1, n + 1), lin(1, m + 1)]);
            b.untwisted(
                format!("C{}>C{}", n, m),
                &g,
                format!("C{}", m),
                cat(vec![comp(&format!("C{}", m), j2())]),
                RationalFn::new(num, den),
            );
        }
    }

    // ----- type D -----
    for n in 4..=6i64 {
        let g = format!("D{}", n);
        b.untwisted(
            format!("D{}>A{}", n, n - 1),
            &g,
            format!("A{}", n - 1),
            cat(vec![comp(&format!("A{}", n - 1), j2())]),
            RationalFn::new(
                kk.mul(&Poly::from_coeffs(vec![
                    BigInt::from(n * n + 2 * n - 2),
                    BigInt::from(n * n - n + 1),
                ])),
                prod(&[lin(1, 2 * (n - 1)), lin(1, n)]),
            ),
        );
        for m in 2..=n - 2 {
            let num = prod(&[
                c(4),
                kk.clone(),
                c(m),
                lin(1, -1),
                c(n - m),
                lin(1, n - 2),
            ]);
            let den = prod(&[
                lin(1, 2 * (n - 1)),
                lin(1, 2 * (m - 1)),
                lin(1, 2 * (n - m - 1)),
            ]);
            b.untwisted(
                format!("D{}>D{}+D{}", n, m, n - m),
                &g,
                format!("D{}+D{}", m, n - m),
                cat(vec![
                    comp(&format!("D{}", m), j2()),
                    comp(&format!("D{}", n - m), j2()),
                ]),
                RationalFn::new(num, den),
            );
        }
    }

    // ----- exceptional untwisted -----
    b.untwisted(
        "E6>D5".into(),
        "E6",
        "D5".into(),
        cat(vec![comp("D5", j2())]),
        RationalFn::new(kk.mul(&lin(33, 84)), prod(&[lin(1, 12), lin(1, 8)])),
    );
    b.untwisted(
        "E6>A5+A1".into(),
        "E6",
        "A5+A1".into(),
        cat(vec![comp("A5", j2()), comp("A1", j2())]),
        RationalFn::new(
            prod(&[c(40), kk.clone(), lin(1, -1), lin(1, 3)]),
            prod(&[lin(1, 12), lin(1, 6), lin(1, 2)]),
        ),
    );
    b.untwisted(
        "E6>3A2".into(),
        "E6",
        "A2+A2+A2".into(),
        cat(vec![comp("A2", j2()), comp("A2", j2()), comp("A2", j2())]),
        RationalFn::new(
            prod(&[c(6), kk.clone(), lin(8, -21)]),
            prod(&[lin(1, 12), lin(1, 3)]),
        ),
    );
    b.untwisted(
        "E7>E6".into(),
        "E7",
        "E6".into(),
        cat(vec![comp("E6", j2())]),
        RationalFn::new(kk.mul(&lin(55, 192)), prod(&[lin(1, 18), lin(1, 12)])),
    );
    b.untwisted(
        "E7>A7".into(),
        "E7",
        "A7".into(),
        cat(vec![comp("A7", j2())]),
        RationalFn::new(
            prod(&[c(70), kk.clone(), lin(1, -1)]),
            prod(&[lin(1, 8), lin(1, 18)]),
        ),
    );
    b.untwisted(
        "E7>D6+A1".into(),
        "E7",
        "D6+A1".into(),
        cat(vec![comp("D6", j2()), comp("A1", j2())]),
        RationalFn::new(
            prod(&[c(64), kk.clone(), lin(1, -1), lin(1, 4)]),
            prod(&[lin(1, 18), lin(1, 10), lin(1, 2)]),
        ),
    );
    b.untwisted(
        "E7>A5+A2".into(),
        "E7",
        "A5+A2".into(),
        cat(vec![comp("A5", j2()), comp("A2", j2())]),
        RationalFn::new(
            prod(&[c(90), kk.clone(), lin(1, -1), lin(1, 4)]),
            prod(&[lin(1, 18), lin(1, 6), lin(1, 3)]),
        ),
    );
    b.untwisted(
        "E8>A8".into(),
        "E8",
        "A8".into(),
        cat(vec![comp("A8", j2())]),
        RationalFn::new(
            prod(&[c(168), kk.clone(), lin(1, -1)]),
            prod(&[lin(1, 30), lin(1, 9)]),
        ),
    );
    b.untwisted(
        "E8>D8".into(),
        "E8",
        "D8".into(),
        cat(vec![comp("D8", j2())]),
        RationalFn::new(
            prod(&[c(128), kk.clone(), lin(1, -1)]),
            prod(&[lin(1, 30), lin(1, 14)]),
        ),
    );
    b.untwisted(
        "E8>E7+A1".into(),
        "E8",
        "E7+A1".into(),
        cat(vec![comp("E7", j2()), comp("A1", j2())]),
        RationalFn::new(
            prod(&[c(112), kk.clone(), lin(1, -1), lin(1, 6)]),
            prod(&[lin(1, 30), lin(1, 18), lin(1, 2)]),
        ),
    );
    b.untwisted(
        "E8>E6+A2".into(),
        "E8",
        "E6+A2".into(),
        cat(vec![comp("E6", j2()), comp("A2", j2())]),
        RationalFn::new(
            prod(&[c(162), kk.clone(), lin(1, -1), lin(1, 6)]),
            prod(&[lin(1, 30), lin(1, 12), lin(1, 3)]),
        ),
    );
    b.untwisted(
        "E8>2A4".into(),
        "E8",
        "A4+A4".into(),
        cat(vec![comp("A4", j2()), comp("A4", j2())]),
        RationalFn::new(
            prod(&[c(200), kk.clone(), lin(1, -1)]),
            prod(&[lin(1, 30), lin(1, 5)]),
        ),
    );
    b.untwisted(
        "F4>B4".into(),
        "F4",
        "B4".into(),
        cat(vec![comp("B4", j2())]),
        RationalFn::new(
            prod(&[c(8), kk.clone(), lin(2, 5)]),
            prod(&[lin(1, 9), lin(1, 7)]),
        ),
    );
    b.untwisted(
        "F4>A2+A2".into(),
        "F4",
        ".A2+..A2".into(),
        cat(vec![comp("A2", Rat::from_integer(1)), comp("A2", j2())]),
        RationalFn::new(
            prod(&[
                c(4),
                kk.clone(),
                Poly::from_coeffs(vec![9.into(), 51.into(), 20.into()]),
            ]),
            prod(&[lin(1, 9), lin(1, 3), lin(2, 3)]),
        ),
    );
    b.untwisted(
        "F4>C3+A1".into(),
        "F4",
        "C3+..A1".into(),
        cat(vec![comp("C3", j2()), comp("A1", j2())]),
        RationalFn::new(
            kk.mul(&Poly::from_coeffs(vec![(-70).into(), 61.into(), 59.into()])),
            prod(&[c(2), lin(1, 9), lin(1, 4), lin(1, 1)]),
        ),
    );
    b.untwisted(
        "G2>A2".into(),
        "G2",
        "..A2".into(),
        cat(vec![comp("A2", j2())]),
        RationalFn::new(
            prod(&[c(2), kk.clone(), lin(17, 5)]),
            prod(&[c(3), lin(1, 4), lin(1, 1)]),
        ),
    );
    b.untwisted(
        "G2>A1+A1".into(),
        "G2",
        ".A1+..A1".into(),
        cat(vec![comp("A1", Rat::new(2, 3)), comp("A1", j2())]),
        RationalFn::new(
            prod(&[
                c(2),
                kk.clone(),
                Poly::from_coeffs(vec![14.into(), 26.into(), 15.into()]),
            ]),
            prod(&[lin(1, 4), lin(1, 2), lin(3, 2)]),
        ),
    );

    // ----- twisted section -----
    b.twisted(
        "A2^(2)>..A1^(1)".into(),
        "A2^(2)",
        "..A1^(1)".into(),
        1,
        cat(vec![comp("A1", j2())]),
        RationalFn::new(
            kk.mul(&lin(1, -1)),
            prod(&[lin(1, 3), lin(1, 2)]),
        ),
        false,
    );
    b.twisted(
        "A2^(2)>.A1^(1)".into(),
        "A2^(2)",
        ".A1^(1)".into(),
        1,
        cat(vec![comp("A1", Rat::new(1, 2))]),
        RationalFn::new(
            kk.mul(&lin(13, -1)),
            prod(&[c(2), lin(1, 3), lin(2, 1)]),
        ),
        false,
    );
    for n in 2..=6i64 {
        let g = format!("A{}^(2)", 2 * n);
        if n > 2 {
            b.twisted(
                format!("A{}^(2)>A{}^(2)", 2 * n, 2 * n - 1),
                &g,
                format!("A{}^(2)", 2 * n - 1),
                2,
                cat(vec![comp(&format!("A{}", 2 * n - 1), j2())]),
                RationalFn::new(
                    kk.mul(
                        &lin(4 * n * n + 1, 4 * n * n + 1)
                            .add(&lin(8 * n, 2 * n)),
                    ),
                    prod(&[c(2), lin(1, 2 * n + 1), lin(1, n)]),
                ),
                false,
            );
        } else {
            b.twisted(
                "A4^(2)>D3^(2)".into(),
                "A4^(2)",
                "D3^(2)".into(),
                2,
                cat(vec![comp("A3", j2())]),
                RationalFn::new(
                    prod(&[c(5), kk.clone(), lin(29, 37)]),
                    prod(&[c(2), lin(1, 9), lin(1, 2)]),
                ),
                false,
            );
        }
        b.twisted(
            format!("A{}^(2)>B{}^(1)", 2 * n, n),
            &g,
            format!("B{}^(1)", n),
            1,
            cat(vec![comp(
                &(if n == 2 { "C2".into() } else { format!("B{}", n) }),
                Rat::from_integer(1),
            )]),
            RationalFn::new(
                kk.mul(&c(n)).mul(&lin(1, -(2 * n + 3))),
                prod(&[lin(1, 2 * n + 1), lin(1, 2 * n - 1)]),
            ),
            false,
        );
        // decomposable rows in N = 2n, M = 2m variables (low confidence)
        for m in 1..n {
            let (nn, mm) = (2 * n, 2 * m);
            let inner = lin(1, 0)
                .mul(
                    &c(2 * (nn - mm) * (mm + nn + mm * nn))
                        .add(&lin(4 * (mm + mm * mm - nn) - (mm + nn) * (mm + nn), 0))
                        .add(&c(5 * nn - 3 * mm)),
                )
                .sub(&c((nn - 1) * (mm - 1)))
                .add(&c(mm * mm + nn * nn))
                .add(&lin(1, 1).mul(&lin(1, 1)))
                .add(&c(1));
            let sub2 = if n - m == 1 {
                "A1^(2)".to_string()
            } else {
                format!("A{}^(2)", 2 * (n - m) - 1)
            };
            b.twisted(
                format!("A{}^(2)>A{}^(2)+{}", 2 * n, 2 * m, sub2),
                &g,
                format!("A{}^(2)+{}", 2 * m, sub2),
                2,
                cat(vec![
                    comp(&format!("A{}", 2 * m), j2()),
                    comp(&format!("A{}", 2 * (n - m) - 1), j2()),
                ]),
                RationalFn::new(
                    kk.mul(&inner),
                    prod(&[lin(1, nn + 1), lin(1, mm + 1), lin(2, nn - mm)]),
                ),
                true,
            );
        }
        for m in 2..n {
            let (nn, mm) = (2 * n, 2 * m);
            let inner = lin(2 * nn, 0)
                .mul(&lin(2, nn - mm + 1))
                .add(&c(mm).mul(&Poly::from_coeffs(vec![
                    BigInt::from(nn + 2),
                    BigInt::from(-1),
                    BigInt::from(-3),
                ])))
                .add(&Poly::from_coeffs(vec![
                    BigInt::from(-2),
                    BigInt::from(2),
                    BigInt::from(5),
                ]));
            b.twisted(
                format!("A{}^(2)>D{}^(1)+A{}^(2)", 2 * n, m, 2 * (n - m)),
                &g,
                format!("D{}^(1)+A{}^(2)", m, 2 * (n - m)),
                2,
                cat(vec![
                    comp(&format!("D{}", m), Rat::from_integer(1)),
                    comp(&format!("A{}", 2 * (n - m)), j2()),
                ]),
                RationalFn::new(
                    prod(&[kk.clone(), c(m)]).mul(&inner),
                    prod(&[c(2), lin(1, nn + 1), lin(1, nn - mm + 1), lin(1, m - 1)]),
                ),
                true,
            );
        }
        if n >= 3 {
            let nn = 2 * n;
            let inner = lin(2 * nn, 0)
                .mul(&lin(8, 8 * nn - 7))
                .add(&Poly::from_coeffs(vec![
                    BigInt::from((nn - 1) * (nn - 1) + 12),
                    BigInt::from(-18),
                    BigInt::from(-31),
                ]));
            b.twisted(
                format!("A{}^(2)>D3^(2)+A{}^(2)", 2 * n, 2 * n - 4),
                &g,
                format!(".D3^(2)+A{}^(2)", 2 * n - 4),
                2,
                cat(vec![
                    comp("A3", Rat::from_integer(1)),
                    comp(&format!("A{}", 2 * n - 4), j2()),
                ]),
                RationalFn::new(
                    kk.mul(&inner),
                    prod(&[c(2), lin(1, nn + 1), lin(1, nn - 3), lin(1, 2)]),
                ),
                false,
            );
        }
    }
    for n in 3..=6i64 {
        let g = format!("A{}^(2)", 2 * n - 1);
        b.twisted(
            format!("A{}^(2)>A{}^(1)", 2 * n - 1, n - 1),
            &g,
            format!("A{}^(1)", n - 1),
            1,
            cat(vec![comp(&format!("A{}", n - 1), Rat::from_integer(1))]),
            RationalFn::new(
                prod(&[c(3 * n), kk.clone(), lin(2 * n, 1)]),
                prod(&[c(2), lin(1, 2 * n), lin(2, n)]),
            ),
            false,
        );
        b.twisted(
            format!("A{}^(2)>C{}^(1)", 2 * n - 1, n),
            &g,
            format!("C{}^(1)", n),
            1,
            cat(vec![comp(&format!("C{}", n), j2())]),
            RationalFn::new(
                prod(&[c(-(2 * n + 1)), kk.clone(), lin(2 * n + 1, 4 * n * n - 2 * n + 2)]),
                prod(&[c(2), lin(1, 2 * n), lin(1, 2 * n + 2)]),
            ),
            false,
        );
    }
    for n in 2..=6i64 {
        let g = format!("D{}^(2)", n + 1);
        b.twisted(
            format!("D{}^(2)>B{}^(1)", n + 1, n),
            &g,
            format!("B{}^(1)", n),
            1,
            cat(vec![comp(
                &(if n == 2 { "C2".into() } else { format!("B{}", n) }),
                j2(),
            )]),
            RationalFn::new(
                prod(&[c(-1), kk.clone(), lin(3 * n - 1, 2 * (2 * n * n - n + 1))]),
                prod(&[c(2), lin(1, 2 * n), lin(1, 4 * n - 2)]),
            ),
            false,
        );
        if n >= 3 {
            b.twisted(
                format!("D{}^(2)>D{}^(2)", n + 1, n),
                &g,
                format!("D{}^(2)", n),
                2,
                cat(vec![comp(
                    &(if n == 3 { "A3".into() } else { format!("D{}", n) }),
                    j2(),
                )]),
                RationalFn::new(
                    kk.mul(&lin(4 * n + 1, 4 * n * (n - 1) - 2)),
                    prod(&[lin(1, 2 * n), lin(1, 2 * n - 2)]),
                ),
                false,
            );
        }
        for m in 1..n {
            if n - m < 2 || m + 1 < 3 {
                continue;
            }
            let inner = c(8)
                .mul(
                    &c(n - m)
                        .mul(&lin(m + n, 2 * m * n + 1))
                        .sub(&c(1)),
                )
                .add(&lin(2, 0).mul(&Poly::from_coeffs(vec![
                    BigInt::from(3 * n + 6 * m - 2 * m * n),
                    BigInt::from(-(6 * n + 5 * m)),
                ])))
                .add(&lin(7, 0).mul(&lin(-1, 2)));
            b.twisted(
                format!("D{}^(2)>D{}^(1)+D{}^(2)", n + 1, n - m, m + 1),
                &g,
                format!("D{}^(1)+D{}^(2)", n - m, m + 1),
                2,
                cat(vec![
                    comp(&format!("D{}", n - m), j2()),
                    comp(&(if m + 1 == 3 { "A3".into() } else { format!("D{}", m + 1) }), j2()),
                ]),
                RationalFn::new(
                    prod(&[c(-(n - m)), kk.clone()]).mul(&inner),
                    prod(&[c(2), lin(1, 2 * n), lin(1, 2 * m), lin(1, 4 * n - 4 * m - 4)]),
                ),
                false,
            );
        }
    }
    b.twisted(
        "D3^(2)>C2^(1)".into(),
        "D3^(2)",
        "C2^(1)".into(),
        1,
        cat(vec![comp("C2", j2())]),
        RationalFn::new(
            prod(&[c(-5), kk.clone(), lin(5, 14)]),
            prod(&[c(2), lin(1, 4), lin(1, 6)]),
        ),
        false,
    );
    b.twisted(
        "E6^(2)>C4^(1)".into(),
        "E6^(2)",
        "C4^(1)".into(),
        1,
        cat(vec![comp("C4", j2())]),
        RationalFn::new(
            prod(&[c(-3), kk.clone(), lin(11, 158)]),
            prod(&[lin(1, 12), lin(1, 10)]),
        ),
        false,
    );
    b.twisted(
        "E6^(2)>F4^(1)".into(),
        "E6^(2)",
        "F4^(1)".into(),
        1,
        cat(vec![comp("F4", j2())]),
        RationalFn::new(
            prod(&[c(-13), kk.clone(), lin(5, 42)]),
            prod(&[lin(1, 12), lin(1, 18)]),
        ),
        false,
    );
    b.twisted(
        "E6^(2)>A5^(2)+A1^(1)".into(),
        "E6^(2)",
        "A5^(2)+..A1^(1)".into(),
        2,
        cat(vec![comp("A5", j2()), comp("A1", j2())]),
        RationalFn::new(
            kk.mul(&Poly::from_coeffs(vec![(-672).into(), 4.into(), 31.into()])),
            prod(&[c(2), lin(1, 12), lin(1, 6), lin(1, 4)]),
        ),
        false,
    );
    b.twisted(
        "D4^(3)>G2^(1)".into(),
        "D4^(3)",
        "G2^(1)".into(),
        1,
        cat(vec![comp("G2", j2())]),
        RationalFn::new(
            prod(&[c(-28), kk.clone(), lin(1, 3)]),
            prod(&[lin(1, 6), lin(1, 12)]),
        ),
        false,
    );
    b.twisted(
        "D4^(3)>.A2^(1)".into(),
        "D4^(3)",
        ".A2^(1)".into(),
        1,
        cat(vec![comp("A2", Rat::new(2, 3))]),
        RationalFn::new(
            prod(&[c(6), kk.clone(), lin(1, -1)]),
            prod(&[lin(1, 6), lin(1, 3)]),
        ),
        false,
    );
    b.twisted(
        "D4^(3)>.A1^(1)+..A1^(1)".into(),
        "D4^(3)",
        ".A1^(1)+..A1^(1)".into(),
        1,
        cat(vec![comp("A1", Rat::new(2, 3)), comp("A1", j2())]),
        RationalFn::new(
            prod(&[c(2), kk.clone(), lin(1, -4)]),
            prod(&[lin(1, 6), lin(1, 2)]),
        ),
        false,
    );
    b.out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sugawara_basics() {
        // A1: 3k/(k+2), value 1 at k = 1
        let ch = sugawara_charge(&[fl("A1")]).unwrap();
        assert_eq!(ch.func.to_string(), "(3*k) / (k + 2)");
        let one = BigRational::from_integer(1.into());
        assert_eq!(ch.func.eval(&one).unwrap(), one);
        // E8 at k = 1: 248/31 = 8
        let ch = sugawara_charge(&[fl("E8")]).unwrap();
        assert_eq!(
            ch.func.eval(&one).unwrap(),
            BigRational::from_integer(8.into())
        );
        // additivity over components: g + g = 2 D_k(g)
        let double = sugawara_charge(&[fl("A2"), fl("A2")]).unwrap();
        let single = sugawara_charge(&[fl("A2")]).unwrap();
        assert!(double.func.equivalent(&single.func.add(&single.func)));
    }

    #[test]
    fn coset_c2_c1c1() {
        // (C2, C1+C1): 2k(2k+1)/((k+3)(k+2)); 1/2 at k = 1
        let comps = cat(vec![comp("C1", j2()), comp("C1", j2())]);
        let ch = coset_charge(&[fl("C2")], &comps).unwrap();
        let expect = RationalFn::new(
            prod(&[c(2), k(), lin(2, 1)]),
            prod(&[lin(1, 3), lin(1, 2)]),
        );
        assert!(ch.func.equivalent(&expect));
        assert_eq!(
            ch.func.eval(&BigRational::from_integer(1.into())).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn coset_identity_is_zero() {
        let ch = coset_charge(&[fl("G2")], &comp("G2", j2())).unwrap();
        assert!(ch.func.is_zero());
    }

    #[test]
    fn e8_d8_vanishes_at_one() {
        let ch = coset_charge(&[fl("E8")], &comp("D8", j2())).unwrap();
        assert!(ch
            .func
            .eval(&BigRational::from_integer(1.into()))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn dynkin_index_short_a2_in_g2() {
        let g2 = build_finite(fl("G2")).unwrap();
        // short simple root and another short root, forming a short A2 base
        // (not a closed subsystem, but the index data is still defined)
        let short1 = vec![1i64, 0];
        let short2 = vec![1i64, 1];
        let e = dynkin_index(&g2, &[short1, short2]).unwrap();
        assert_eq!(e.j, Rat::new(2, 3));
        assert_eq!(e.dynkin_index(), Rat::from_integer(3));
        // long-root A1 has index 1
        let e = dynkin_index(&g2, &[vec![0, 1]]).unwrap();
        assert_eq!(e.j, j2());
        assert_eq!(e.dynkin_index(), Rat::from_integer(1));
    }

    #[test]
    fn dn_in_bn_has_index_one() {
        let b3 = build_finite(fl("B3")).unwrap();
        // D3 inside B3: long roots e1-e2, e2-e3, e2+e3
        let base = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 1, 2]];
        let e = dynkin_index(&b3, &base).unwrap();
        assert_eq!(e.j, j2());
        assert_eq!(e.label, fl("A3"));
    }

    #[test]
    fn conformal_levels_e6_a5_a1() {
        let ch = coset_charge(&[fl("E6")], &cat(vec![comp("A5", j2()), comp("A1", j2())])).unwrap();
        let report = conformal_levels(&ch);
        let ints = report.integer_levels();
        assert_eq!(ints, vec![-3, 1]);
    }

    #[test]
    fn conformal_levels_exclude_critical_and_zero() {
        let ch = coset_charge(&[fl("B3")], &comp("D3", j2())).unwrap();
        // kn(2k+2n-3)/... : only zero at half-integer 3/2 - n = -3/2
        let report = conformal_levels(&ch);
        assert!(report.integer_levels().is_empty());
        assert_eq!(report.levels.len(), 1);
        assert_eq!(report.levels[0].1, LevelKind::HalfInteger);
    }

    #[test]
    fn twisted_first_a1_in_a2_2_matches_print() {
        let fixtures = coset_fixtures();
        let f = fixture_by_id(&fixtures, "A2^(2)>..A1^(1)").unwrap();
        let report = verify_printed_formula(f).unwrap();
        assert!(report.matches, "difference: {}", report.difference);
        // conformally invariant at level 1
        let levels = conformal_levels(&f.computed().unwrap());
        assert_eq!(levels.integer_levels(), vec![1]);
    }

    #[test]
    fn registry_is_well_formed() {
        let fixtures = coset_fixtures();
        assert!(fixtures.len() > 60);
        let mut ids: Vec<&String> = fixtures.iter().map(|f| &f.id).collect();
        ids.sort();
        let before = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), before, "duplicate fixture ids");
        for f in &fixtures {
            // every fixture computes without error
            f.computed().unwrap();
        }
    }

    #[test]
    fn telescoping_through_intermediate_subalgebra() {
        // D_k(E8, E7+A1) = D_k(E8, .) composed: charges telescope when the
        // level maps are compatible (all j = 2 here).
        let top = coset_charge(&[fl("E8")], &cat(vec![comp("E7", j2()), comp("A1", j2())])).unwrap();
        let mid = coset_charge(&[fl("E8")], &cat(vec![comp("E7", j2()), comp("A1", j2())])).unwrap();
        assert!(top.func.equivalent(&mid.func));
        let via_e7 = coset_charge(&[fl("E7"), fl("A1")], &comp("A7", j2()));
        assert!(via_e7.is_ok());
    }
}
