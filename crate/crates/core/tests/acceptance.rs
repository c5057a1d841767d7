//! Acceptance suite: one test per stated criterion, each printing a
//! pass/fail line. Tolerances are exact (integer/rational arithmetic
//! throughout); search horizons are m_max = 4 with index bound 36.
//!
//! Where a stored fixture transcribed from the source tables disagrees with
//! the exact computation, the corresponding assertion fails with the
//! discrepancy printed verbatim; see the per-line output.

use kmroots_core::affine::build_affine;
use kmroots_core::classifier::{
    compare_search_with_table, same_type_rule, same_type_subsystem, sweep_labels, SameType,
};
use kmroots_core::coset::{
    conformal_levels, coset_fixtures, verify_printed_formula, Charge, CosetFixture,
};
use kmroots_core::hyperbolic::{
    is_hyperbolic, maximal_non_indefinite_subsystems, regular_non_indefinite_subalgebras,
    GeneralizedCartanMatrix,
};
use kmroots_core::labels::display_components;
use kmroots_core::lattice::{sublattice_index, Index, Lattice};
use kmroots_core::subsystem::weyl_index;
use kmroots_core::{parse_label, Rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn verdict(name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "{}: {}{}",
        name,
        if pass { "PASS" } else { "FAIL" },
        if detail.is_empty() {
            String::new()
        } else {
            format!(" ({})", detail)
        }
    );
    pass
}

/// Criterion 1: the search at m_max = 4 with index bound 36 reproduces the
/// stored table entries (types, decorations, indices) on every rank <= 4
/// ambient of the sweep.
#[test]
fn criterion_1_table_regression() {
    let mut failures = Vec::new();
    for l in sweep_labels() {
        let cmp = compare_search_with_table(l, 4, 36).unwrap();
        if !cmp.clean() {
            let mut msg = format!("{}:", l);
            for m in &cmp.missing {
                msg.push_str(&format!(" missing {}", m.display()));
            }
            for e in &cmp.extra {
                msg.push_str(&format!(" extra {}", e.display()));
            }
            failures.push(msg);
        }
    }
    let pass = verdict(
        "criterion 1 (table regression, m_max=4, bound 36)",
        failures.is_empty(),
        &failures.join("; "),
    );
    assert!(pass, "search/table diffs: {:#?}", failures);
}

/// Criterion 2: scaled-copy validity matches the parity / mod-3 rule for
/// 1 <= k <= 12 on every rank <= 4 ambient, with the reflection-subgroup
/// index k^rank on the valid ones.
#[test]
fn criterion_2_same_type_sweep() {
    let mut failures = Vec::new();
    for l in sweep_labels() {
        let sys = build_affine(l).unwrap();
        let n = sys.rank() as u32;
        for k in 1..=12i64 {
            match same_type_subsystem(&sys, k).unwrap() {
                SameType::Valid(sub) => {
                    if !same_type_rule(l, k) {
                        failures.push(format!("{} k={} unexpectedly valid", l, k));
                        continue;
                    }
                    let ix = weyl_index(&sys, &sub).unwrap();
                    let expect = Index::Finite((k as u128).pow(n));
                    if ix != expect {
                        failures.push(format!("{} k={} index {} != k^n", l, k, ix));
                    }
                }
                SameType::Invalid(_) => {
                    if same_type_rule(l, k) {
                        failures.push(format!("{} k={} unexpectedly invalid", l, k));
                    }
                }
            }
        }
    }
    let pass = verdict(
        "criterion 2 (same-type validity rule and k^n indices, k <= 12)",
        failures.is_empty(),
        &failures.join("; "),
    );
    assert!(pass, "{:#?}", failures);
}

/// Criterion 3: over every candidate the search generates, the simple-root
/// condition verdict coincides with the truncated lattice criterion.
#[test]
fn criterion_3_condition_lattice_equivalence() {
    let mut failures = Vec::new();
    for l in sweep_labels() {
        let sys = build_affine(l).unwrap();
        let outcomes = kmroots_core::classifier::maximal_subsystems_search(
            &sys,
            4,
            kmroots_core::classifier::SearchOptions::default(),
        )
        .unwrap();
        for o in &outcomes {
            // candidates exist because their bases passed the condition;
            // the lattice certificate must agree
            if !o.lattice_ok {
                failures.push(format!(
                    "{}: {} passed the condition but fails the lattice criterion",
                    l,
                    o.subsystem.components_display()
                ));
            }
        }
    }
    // negative direction: a shape whose base breaks the condition also
    // breaks the set equality (extra roots in the intersection)
    let sys = build_affine(parse_label("B3^(1)").unwrap()).unwrap();
    let shorts_at_odd: Vec<Vec<i64>> = sys
        .enumerate_real_roots(4)
        .into_iter()
        .filter(|v| {
            let c = sys.delta_coefficient(v);
            let fp = sys.finite_part(v);
            let sq = {
                let fpv: Vec<Rat> = fp.clone();
                kmroots_core::linalg::form_ip_rat(&sys.form, &fpv, &fpv)
            };
            // short roots at odd levels plus long roots at even levels
            if sq == Rat::from_integer(1) {
                (c.numer() % 2 != 0) && c.is_integer()
            } else {
                (c.numer() % 2 == 0) && c.is_integer()
            }
        })
        .collect();
    let fake = kmroots_core::subsystem::subsystem_from_roots(&sys, shorts_at_odd, 4, true);
    let neg_ok = match fake {
        Ok(sub) => !kmroots_core::subsystem::verify_lattice_criterion(&sys, &sub, 4),
        Err(_) => true, // no base extractable: not a subsystem either way
    };
    if !neg_ok {
        failures.push("non-closed shape passed the lattice criterion".into());
    }
    let pass = verdict(
        "criterion 3 (condition <-> lattice criterion, zero disagreements)",
        failures.is_empty(),
        &failures.join("; "),
    );
    assert!(pass, "{:#?}", failures);
}

/// Criterion 4: equal-rank maximal pairs of different type have root-lattice
/// index 2, except the two triple-bond pairs where it is 3.
#[test]
fn criterion_4_sublattice_indices() {
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in sweep_labels() {
        let sys = build_affine(l).unwrap();
        let full = Lattice::from_rows(sys.nodes(), &sys.full_lattice_generators()).unwrap();
        let outcomes = kmroots_core::classifier::maximal_subsystems_search(
            &sys,
            4,
            kmroots_core::classifier::SearchOptions::default(),
        )
        .unwrap();
        for o in &outcomes {
            if o.index == Index::Infinite {
                continue;
            }
            let comps = o.subsystem.component_labels();
            if comps.len() == 1 && comps[0].bare() == sys.label.bare() {
                continue; // same-type pairs scale the lattice by k instead
            }
            let ix = sublattice_index(&full, &o.subsystem.lattice).unwrap();
            let expected_three = (l == parse_label("G2^(1)").unwrap()
                && o.subsystem.components_display() == "..A2^(1)")
                || (l == parse_label("D4^(3)").unwrap()
                    && o.subsystem.components_display() == ".G2^(1)");
            let want = if expected_three { 3 } else { 2 };
            checked += 1;
            if ix != Index::Finite(want) {
                failures.push(format!(
                    "{} > {}: lattice index {} (expected {})",
                    l,
                    o.subsystem.components_display(),
                    ix,
                    want
                ));
            }
        }
    }
    let pass = verdict(
        "criterion 4 (equal-rank maximal pairs: lattice index 2, or 3 twice)",
        failures.is_empty(),
        &format!("{} pairs checked; {}", checked, failures.join("; ")),
    );
    assert!(pass, "{:#?}", failures);
}

fn positive_integer_levels(charge: &Charge) -> Vec<i64> {
    conformal_levels(charge)
        .integer_levels()
        .into_iter()
        .filter(|&k| k > 0)
        .collect()
}

fn fixture<'a>(fx: &'a [CosetFixture], id: &str) -> &'a CosetFixture {
    kmroots_core::coset::fixture_by_id(fx, id).unwrap()
}

/// Criterion 5: every displayed untwisted coset formula matches the computed
/// charge symbolically, and the printed invariant levels are recovered.
#[test]
fn criterion_5_untwisted_coset_fixtures() {
    let fx = coset_fixtures();
    let mut failures = Vec::new();
    for f in fx.iter().filter(|f| !f.twisted) {
        let report = verify_printed_formula(f).unwrap();
        if !report.matches {
            failures.push(format!(
                "{}: computed {} vs stored {}",
                f.id, report.computed, report.printed
            ));
        }
    }
    // printed invariant levels
    let level_expect: Vec<(&str, Vec<i64>)> = vec![
        ("E6>A5+A1", vec![-3, 1]),
        ("E7>D6+A1", vec![-4, 1]),
        ("E7>A5+A2", vec![-4, 1]),
        ("E8>A8", vec![1]),
        ("E8>D8", vec![1]),
        ("E8>E7+A1", vec![-6, 1]),
        ("E8>E6+A2", vec![-6, 1]),
        ("E8>2A4", vec![1]),
    ];
    for (id, want) in level_expect {
        let got = conformal_levels(&fixture(&fx, id).computed().unwrap()).integer_levels();
        if got != want {
            failures.push(format!("{}: integer levels {:?} != {:?}", id, got, want));
        }
    }
    // B/C/D families
    for n in 3..=6i64 {
        let id = format!("B{}>B{}+D{}", n, 1, n - 1);
        let got = positive_integer_levels(&fixture(&fx, &id).computed().unwrap());
        if got != vec![1] {
            failures.push(format!("{}: positive levels {:?} != [1]", id, got));
        }
        for m in 2..=n - 2 {
            let id = format!("D{}>D{}+D{}", n, m, n - m);
            if n < 4 {
                continue;
            }
            let ch = fixture(&fx, &id).computed().unwrap();
            let ints = conformal_levels(&ch).integer_levels();
            if !ints.contains(&1) || !ints.contains(&(2 - n)) {
                failures.push(format!("{}: levels {:?} missing {{1, {}}}", id, ints, 2 - n));
            }
        }
        let id = format!("C{}>C{}+C{}", n, 1, n - 1);
        let ch = fixture(&fx, &id).computed().unwrap();
        let ints = conformal_levels(&ch).integer_levels();
        let want: Vec<i64> = if n % 2 == 0 { vec![-n / 2 - 1] } else { vec![] };
        if ints != want {
            failures.push(format!("{}: integer levels {:?} != {:?}", id, ints, want));
        }
    }
    // no positive-integer invariant levels for types A, G2, F4
    for f in fx.iter().filter(|f| !f.twisted) {
        let is_agf = f.ambient.starts_with('A') || f.ambient == "G2" || f.ambient == "F4";
        if !is_agf {
            continue;
        }
        let pos = positive_integer_levels(&f.computed().unwrap());
        if !pos.is_empty() {
            failures.push(format!("{}: positive integer levels {:?}", f.id, pos));
        }
    }
    let pass = verdict(
        "criterion 5 (untwisted coset formulas and printed levels)",
        failures.is_empty(),
        &format!("{} deviations", failures.len()),
    );
    assert!(pass, "{:#?}", failures);
}

/// Criterion 6: twisted coset fixtures. Formula matches for the named pairs,
/// stored-level recovery for the triple-twist trio, and k = 0 vanishing plus
/// degree checks for the two low-confidence bracketed families.
#[test]
fn criterion_6_twisted_coset_fixtures() {
    let fx = coset_fixtures();
    let mut failures = Vec::new();
    let mut demand = |id: &str| {
        let f = fixture(&fx, id);
        let report = verify_printed_formula(f).unwrap();
        if !report.matches {
            failures.push(format!(
                "{}: computed {} vs stored {} (difference {})",
                id, report.computed, report.printed, report.difference
            ));
        }
    };
    demand("A2^(2)>..A1^(1)");
    demand("A2^(2)>.A1^(1)");
    demand("D4^(3)>G2^(1)");
    demand("D4^(3)>.A2^(1)");
    demand("D4^(3)>.A1^(1)+..A1^(1)");
    for n in 2..=6 {
        demand(&format!("D{}^(2)>B{}^(1)", n + 1, n));
    }
    demand("E6^(2)>C4^(1)");
    demand("E6^(2)>F4^(1)");
    demand("E6^(2)>A5^(2)+A1^(1)");
    // stored levels of the triple-twist trio are {-3, 1, 4}
    let mut stored_levels: Vec<BigRational> = Vec::new();
    for id in ["D4^(3)>G2^(1)", "D4^(3)>.A2^(1)", "D4^(3)>.A1^(1)+..A1^(1)"] {
        let f = fixture(&fx, id);
        let ch = Charge {
            func: f.printed.clone(),
            excluded_levels: f.computed().unwrap().excluded_levels.clone(),
        };
        stored_levels.extend(conformal_levels(&ch).levels.into_iter().map(|(v, _)| v));
    }
    stored_levels.sort();
    let want: Vec<BigRational> = [-3i64, 1, 4]
        .iter()
        .map(|&v| BigRational::from_integer(BigInt::from(v)))
        .collect();
    if stored_levels != want {
        failures.push(format!("D4^(3) stored levels {:?}", stored_levels));
    }
    // stored D4^(2)>B3^(1) formula has the level -4 zero
    {
        let f = fixture(&fx, "D4^(2)>B3^(1)");
        let at = f
            .printed
            .eval(&BigRational::from_integer(BigInt::from(-4)))
            .unwrap();
        if !at.is_zero() {
            failures.push(format!("D4^(2)>B3^(1) stored value at -4 is {}", at));
        }
    }
    // low-confidence bracketed families: k = 0 vanishing and degree only
    for f in fx.iter().filter(|f| f.low_confidence) {
        let zero = BigRational::zero();
        let at0 = f.printed.eval(&zero);
        if at0 != Some(BigRational::zero()) {
            failures.push(format!("{}: stored formula does not vanish at k=0", f.id));
        }
        if f.printed.num.degree() > f.printed.den.degree() {
            failures.push(format!("{}: stored numerator degree too high", f.id));
        }
    }
    let pass = verdict(
        "criterion 6 (twisted coset fixtures)",
        failures.is_empty(),
        &format!("{} deviations", failures.len()),
    );
    assert!(pass, "{:#?}", failures);
}

/// Criterion 7: for every untwisted fixture pair, a positive integer zero of
/// the computed charge can only sit at level one.
#[test]
fn criterion_7_level_one_theorem() {
    let fx = coset_fixtures();
    let mut failures = Vec::new();
    for f in fx.iter().filter(|f| !f.twisted) {
        let pos = positive_integer_levels(&f.computed().unwrap());
        if pos.iter().any(|&k| k != 1) {
            failures.push(format!("{}: positive zeros {:?}", f.id, pos));
        }
    }
    let pass = verdict(
        "criterion 7 (positive-integer invariant levels only at k = 1)",
        failures.is_empty(),
        &failures.join("; "),
    );
    assert!(pass, "{:#?}", failures);
}

/// Criterion 8: hyperbolic pipeline on the rank-2 and rank-3 example
/// matrices, with the realization verification pass on every emitted entry.
#[test]
fn criterion_8_hyperbolic_pipeline() {
    let mut failures = Vec::new();
    let rank2 = GeneralizedCartanMatrix::new(vec![vec![2, -3], vec![-3, 2]]).unwrap();
    let cert2 = is_hyperbolic(&rank2).unwrap();
    if !cert2.is_hyperbolic {
        failures.push("rank-2 matrix not recognized as hyperbolic".into());
    }
    let subs2 = maximal_non_indefinite_subsystems(&rank2).unwrap();
    if subs2.len() != 2
        || !subs2
            .iter()
            .all(|(_, l)| display_components(l) == "A1")
    {
        failures.push(format!("rank-2 subdiagrams {:?}", subs2));
    }
    let entries2 = regular_non_indefinite_subalgebras(&rank2, 1, 4).unwrap();
    if !entries2
        .iter()
        .all(|e| e.components.iter().all(|c| c.is_finite()) && e.verified)
    {
        failures.push("rank-2 pipeline emitted non-finite or unverified entries".into());
    }

    let rank3 =
        GeneralizedCartanMatrix::new(vec![vec![2, -2, 0], vec![-2, 2, -1], vec![0, -1, 2]])
            .unwrap();
    let cert3 = is_hyperbolic(&rank3).unwrap();
    if !cert3.is_hyperbolic {
        failures.push("rank-3 matrix not recognized as hyperbolic".into());
    }
    let mut types3: Vec<String> = maximal_non_indefinite_subsystems(&rank3)
        .unwrap()
        .iter()
        .map(|(_, l)| display_components(l))
        .collect();
    types3.sort();
    if types3 != vec!["A1+A1", "A1^(1)", "A2"] {
        failures.push(format!("rank-3 subdiagram types {:?}", types3));
    }
    let entries3 = regular_non_indefinite_subalgebras(&rank3, 1, 4).unwrap();
    let displays: Vec<String> = entries3
        .iter()
        .map(|e| display_components(&e.components))
        .collect();
    for want in ["A1^(1)", "A2", "A1+A1"] {
        if !displays.contains(&want.to_string()) {
            failures.push(format!("rank-3 pipeline missing {}", want));
        }
    }
    if !entries3
        .iter()
        .any(|e| displays.contains(&"A1^(1)".to_string()) && e.index == Some(2))
    {
        failures.push("rank-3 pipeline missing index-2 descendant".into());
    }
    if !entries3.iter().all(|e| e.verified) {
        failures.push("rank-3 pipeline emitted unverified entries".into());
    }
    let pass = verdict(
        "criterion 8 (hyperbolic pipeline fixtures and verification pass)",
        failures.is_empty(),
        &failures.join("; "),
    );
    assert!(pass, "{:#?}", failures);
}

mod finite_oracle {
    use super::*;
    use kmroots_core::finite::{
        build_finite, finite_maximal_subsystems, root_closure, FiniteRootSystem,
    };

    /// Independent brute force: closures of all obtuse antichains whose
    /// pairwise differences avoid the root set, filtered to proper maximal
    /// closed subsets by containment.
    fn brute_force_maximal(sys: &FiniteRootSystem) -> Vec<Vec<String>> {
        let roots = &sys.all_roots;
        let n = sys.rank();
        let mut closures: Vec<Vec<Vec<i64>>> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        fn rec(
            sys: &FiniteRootSystem,
            roots: &[Vec<i64>],
            stack: &mut Vec<usize>,
            start: usize,
            max_size: usize,
            closures: &mut Vec<Vec<Vec<i64>>>,
        ) {
            if !stack.is_empty() {
                let seed: Vec<Vec<i64>> = stack.iter().map(|&i| roots[i].clone()).collect();
                let (cl, _) = root_closure(&sys.form, &seed, None).unwrap();
                if cl.len() < sys.all_roots.len() {
                    closures.push(cl);
                }
            }
            if stack.len() == max_size {
                return;
            }
            'next: for j in start..roots.len() {
                for &i in stack.iter() {
                    let ip = sys.ip(&roots[i], &roots[j]);
                    if ip > kmroots_core::Rat::from_integer(0) {
                        continue 'next;
                    }
                    let diff: Vec<i64> = roots[i]
                        .iter()
                        .zip(&roots[j])
                        .map(|(&a, &b)| a - b)
                        .collect();
                    if sys.contains(&diff) {
                        continue 'next;
                    }
                }
                stack.push(j);
                rec(sys, roots, stack, j + 1, max_size, closures);
                stack.pop();
            }
        }
        rec(sys, roots, &mut stack, 0, n, &mut closures);
        closures.sort();
        closures.dedup();
        // maximal by containment
        let mut maximal: Vec<Vec<Vec<i64>>> = Vec::new();
        'outer: for c in &closures {
            for d in &closures {
                if c != d && c.iter().all(|r| d.contains(r)) {
                    continue 'outer;
                }
            }
            maximal.push(c.clone());
        }
        let mut out: Vec<Vec<String>> = maximal
            .iter()
            .filter_map(|c| {
                let base = finite_base(sys, c);
                kmroots_core::finite::recognize_finite_base(sys, &base)
                    .map(|labels| labels.iter().map(|l| l.to_string()).collect())
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn finite_base(sys: &FiniteRootSystem, roots: &[Vec<i64>]) -> Vec<Vec<i64>> {
        // positives by lexicographic sign, simples = not a sum of two
        let positives: Vec<Vec<i64>> = roots
            .iter()
            .filter(|v| {
                v.iter()
                    .find(|&&x| x != 0)
                    .map(|&x| x > 0)
                    .unwrap_or(false)
            })
            .cloned()
            .collect();
        let set: std::collections::HashSet<&Vec<i64>> = positives.iter().collect();
        positives
            .iter()
            .filter(|v| {
                !positives.iter().any(|u| {
                    if u == *v {
                        return false;
                    }
                    let w: Vec<i64> = v.iter().zip(u).map(|(&a, &b)| a - b).collect();
                    set.contains(&w)
                })
            })
            .cloned()
            .collect()
    }

    /// Criterion 9: the extended-diagram procedure agrees with the oracle on
    /// every finite type of rank <= 4.
    #[test]
    fn criterion_9_finite_maximal_oracle() {
        let mut failures = Vec::new();
        for label in [
            "A1", "A2", "A3", "A4", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4",
        ] {
            let l = parse_label(label).unwrap();
            let sys = build_finite(l).unwrap();
            let oracle = brute_force_maximal(&sys);
            let mut procedure: Vec<Vec<String>> = finite_maximal_subsystems(l)
                .unwrap()
                .iter()
                .map(|s| s.components.iter().map(|c| c.to_string()).collect())
                .collect();
            procedure.sort();
            procedure.dedup();
            if oracle != procedure {
                failures.push(format!(
                    "{}: oracle {:?} vs procedure {:?}",
                    label, oracle, procedure
                ));
            }
        }
        let pass = verdict(
            "criterion 9 (finite maximal subsystems match the brute-force oracle)",
            failures.is_empty(),
            &failures.join("; "),
        );
        assert!(pass, "{:#?}", failures);
    }
}
