//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! The sweeps run over every wedge-basis element of the stated grade windows;
//! all comparisons are exact (arbitrary-precision rationals), so there are no
//! tolerances anywhere.

use aromatic::calculus::{
    bracket, contract, d_h, d_total, d_v, delta_v, graft, h_v, interior_euler, lie, lie_cartan,
    vertex_field,
};
use aromatic::elemdiff::{
    elementary_differential, f_symmetry_check, sample_divfree, sample_poly_field, taylor_oracle,
    Differential, Polynomial,
};
use aromatic::envelope::{exact_flow, exp_lie, lie_monomial_peeled, Monomial, Series};
use aromatic::forest::{enumerate_forests, Forest};
use aromatic::form::{concat, rat, wedge_normalize, Form};
use aromatic::linalg::{
    exactness_report, independent_subset, solve_horizontal, GradedMatrix, OperatorTag,
};
use aromatic::noether::{
    bracket_propagation_check, classify_symmetry, first_variational_split, is_solenoidal,
    noether_equivalence_check, solenoidal_basis, symmetry_descent_check,
};
use aromatic::textio::{parse_expr, parse_form, print_form};
use aromatic::{Grade, Rational};

fn pf(text: &str) -> Form {
    parse_form(text).unwrap_or_else(|e| panic!("parsing {text:?}: {e}"))
}

/// All wedge representatives of a grade, as forms with coefficient one.
fn wedge_basis(grade: Grade) -> Vec<Form> {
    enumerate_forests(grade)
        .unwrap()
        .into_iter()
        .filter(|f| matches!(wedge_normalize(f).unwrap(), Some((rep, 1)) if rep == *f))
        .map(|f| Form::from_forest(&f).unwrap())
        .collect()
}

fn int(v: i64) -> Rational {
    rat(v, 1)
}

#[test]
fn criterion_01_differential_identities() {
    // d_h d_h = 0, d_v d_v = 0, d_h d_v = d_v d_h, and the signed total
    // differential squares to zero, over every wedge-basis element with
    // n <= 3, p <= 2, order <= 5.
    let mut checked = 0usize;
    for n in 0..=3 {
        for p in 0..=2 {
            for order in 1..=5 {
                for gamma in wedge_basis(Grade::new(n, p, order)) {
                    let dh = d_h(&gamma).unwrap();
                    if n >= 1 {
                        assert!(d_h(&dh).unwrap().is_zero(), "d_h^2 on {}", print_form(&gamma));
                    }
                    let dv = d_v(&gamma).unwrap();
                    assert!(d_v(&dv).unwrap().is_zero(), "d_v^2 on {}", print_form(&gamma));
                    assert_eq!(
                        d_h(&dv).unwrap(),
                        d_v(&dh).unwrap(),
                        "d_h d_v vs d_v d_h on {}",
                        print_form(&gamma)
                    );
                    // total differential: apply the bigraded pair twice and
                    // check that the three target grades all cancel
                    let (h1, v1) = d_total(&gamma).unwrap();
                    let (hh, hv) = d_total(&h1).unwrap();
                    let (vh, vv) = d_total(&v1).unwrap();
                    assert!(hh.is_zero(), "horizontal square on {}", print_form(&gamma));
                    assert!(vv.is_zero(), "vertical square on {}", print_form(&gamma));
                    assert!(
                        hv.add(&vh).unwrap().is_zero(),
                        "mixed part of d^2 on {}",
                        print_form(&gamma)
                    );
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 500, "sweep looks too small: {checked} elements");
    println!("criterion 01 (differential identities): PASS ({checked} basis elements)");
}

#[test]
fn criterion_02_worked_examples() {
    // the small worked examples for each operator, pinned exactly
    assert_eq!(d_h(&pf("*")).unwrap(), pf("<*>"));
    assert_eq!(d_h(&pf("*[*]")).unwrap(), pf("<*[*]> + <*,*>"));
    assert_eq!(
        d_h(&pf("* *[*]")).unwrap(),
        pf("1/2 <*[*]> * + 1/2 <*,*> * - 1/2 <*> *[*] - 1/2 *[*,*]")
    );
    assert!(d_h(&pf("<*>")).unwrap().is_zero());

    assert_eq!(d_v(&pf("*")).unwrap(), pf("o1"));
    assert_eq!(d_v(&pf("<*>")).unwrap(), pf("<o1>"));
    assert_eq!(d_v(&pf("* *[*]")).unwrap(), pf("o1 *[*] + * o1[*] + * *[o1]"));

    // alternation: a two-root product expands with the 1/2-weighted orbit
    let two = pf("* *[*]");
    let expansion = two.expand();
    assert_eq!(expansion.len(), 2);
    assert!(expansion.values().all(|c| *c == rat(1, 2) || *c == rat(-1, 2)));
    // and a symmetric pair of covertices collapses to zero
    assert!(parse_expr("<o1,o2>").unwrap().is_zero());

    // the signed total differential of the vertex
    let (h, v) = d_total(&pf("*")).unwrap();
    assert_eq!(h, pf("-<*>"));
    assert_eq!(v, pf("o1"));

    // a horizontal differential in the presence of a covertex
    assert_eq!(d_h(&pf("* o1")).unwrap(), pf("1/2 *[o1] + 1/2 <o1> * - 1/2 o1[*] - 1/2 <*> o1"));

    // contraction, including the aroma-closing choices
    assert_eq!(contract(&pf("*[*]"), &pf("<o1>")).unwrap(), pf("<*[*]> + <*,*>"));
    assert_eq!(contract(&vertex_field(), &pf("o1")).unwrap(), pf("*"));

    // vertical homotopy
    assert_eq!(h_v(&pf("<*[o1]>")).unwrap(), pf("1/2 <*[*]>"));

    println!("criterion 02 (worked operator examples): PASS");
}

#[test]
fn criterion_03_interior_euler_battery() {
    // the five pinned examples
    assert!(interior_euler(&pf("<o1>")).unwrap().is_zero());
    assert_eq!(interior_euler(&pf("<*[o1]>")).unwrap(), pf("<*[o1]>"));
    assert_eq!(interior_euler(&pf("<o1[*]>")).unwrap(), pf("<*[o1]>"));
    assert_eq!(interior_euler(&pf("<*,o1>")).unwrap(), pf("-<*[o1]>"));
    assert_eq!(interior_euler(&pf("<*> <o1>")).unwrap(), pf("-<*[o1]>"));

    // idempotence on rootless forms, p in {1, 2}, order <= 5
    let mut checked = 0usize;
    for p in 1..=2 {
        for order in 1..=5 {
            for gamma in wedge_basis(Grade::new(0, p, order)) {
                let once = interior_euler(&gamma).unwrap();
                let twice = interior_euler(&once).unwrap();
                assert_eq!(once, twice, "I^2 = I on {}", print_form(&gamma));
                checked += 1;
            }
        }
    }

    // the interior Euler operator annihilates horizontal boundaries
    for p in 1..=2 {
        for order in 1..=5 {
            for gamma in wedge_basis(Grade::new(1, p, order)) {
                let boundary = d_h(&gamma).unwrap();
                assert!(
                    interior_euler(&boundary).unwrap().is_zero(),
                    "I d_h on {}",
                    print_form(&gamma)
                );
                checked += 1;
            }
        }
    }

    // the variational derivative squares to zero on Lagrangians, order <= 4
    for order in 1..=4 {
        for gamma in wedge_basis(Grade::new(0, 0, order)) {
            let once = delta_v(&gamma).unwrap();
            assert!(delta_v(&once).unwrap().is_zero(), "delta_v^2 on {}", print_form(&gamma));
            checked += 1;
        }
    }

    // the variational derivative of the tall Lagrangian, pinned
    assert_eq!(delta_v(&pf("<*[*]>")).unwrap(), pf("2 <*[o1]>"));

    println!("criterion 03 (interior Euler battery): PASS ({checked} sweep elements)");
}

#[test]
fn criterion_07_lie_calculus_laws() {
    // scaling by the order along the single vertex, exhaustively to order 5
    let mut checked = 0usize;
    let star = vertex_field();
    for n in 0..=3 {
        for p in 0..=2 {
            for order in 1..=5 {
                for gamma in wedge_basis(Grade::new(n, p, order)) {
                    let scaled = gamma.scale(&int(order as i64));
                    assert_eq!(
                        lie(&star, &gamma).unwrap(),
                        scaled,
                        "order scaling on {}",
                        print_form(&gamma)
                    );
                    checked += 1;
                }
            }
        }
    }

    // the two Cartan routes agree on a bigraded window
    let taus: Vec<Form> = (1..=3).flat_map(|order| wedge_basis(Grade::new(1, 0, order))).collect();
    for tau in &taus {
        for n in 0..=2 {
            for p in 0..=1 {
                for order in 1..=3 {
                    for gamma in wedge_basis(Grade::new(n, p, order)) {
                        assert_eq!(
                            lie(tau, &gamma).unwrap(),
                            lie_cartan(tau, &gamma).unwrap(),
                            "Cartan routes on {} along {}",
                            print_form(&gamma),
                            print_form(tau)
                        );
                    }
                }
            }
        }
    }

    // commutators represent the bracket: [L_a, L_b] = L_[[a,b]]
    let gammas: Vec<Form> =
        (1..=2).flat_map(|order| wedge_basis(Grade::new(1, 0, order))).collect();
    for a in &taus {
        for b in &taus {
            let br = bracket(a, b).unwrap();
            for gamma in &gammas {
                let left = lie(a, &lie(b, gamma).unwrap())
                    .unwrap()
                    .sub(&lie(b, &lie(a, gamma).unwrap()).unwrap())
                    .unwrap();
                let right = lie(&br, gamma).unwrap();
                assert_eq!(left, right, "representation law");
            }
        }
    }

    // Jacobi identity for the bracket on order <= 2 fields
    for a in &gammas {
        for b in &gammas {
            for c in &gammas {
                let j = bracket(&bracket(a, b).unwrap(), c)
                    .unwrap()
                    .add(&bracket(&bracket(b, c).unwrap(), a).unwrap())
                    .unwrap()
                    .add(&bracket(&bracket(c, a).unwrap(), b).unwrap())
                    .unwrap();
                assert!(j.is_zero(), "Jacobi identity");
            }
        }
    }

    // product rule on products of Lagrangians
    let lagrangians: Vec<Form> =
        (1..=2).flat_map(|order| wedge_basis(Grade::new(0, 0, order))).collect();
    for tau in taus.iter().take(3) {
        for a in &lagrangians {
            for b in &lagrangians {
                let left = lie(tau, &concat(a, b).unwrap()).unwrap();
                let right = concat(&lie(tau, a).unwrap(), b)
                    .unwrap()
                    .add(&concat(a, &lie(tau, b).unwrap()).unwrap())
                    .unwrap();
                assert_eq!(left, right, "product rule");
            }
        }
    }

    // interaction of contraction with the Lie derivative:
    // i_[[a,b]] = L_a i_b - i_b L_a
    let small_gammas: Vec<Form> = (1..=3)
        .flat_map(|order| {
            [Grade::new(0, 1, order), Grade::new(1, 1, order)]
                .into_iter()
                .flat_map(wedge_basis)
                .collect::<Vec<_>>()
        })
        .collect();
    for a in taus.iter().take(4) {
        for b in taus.iter().take(4) {
            let br = bracket(a, b).unwrap();
            for gamma in &small_gammas {
                let left = contract(&br, gamma).unwrap();
                let right = lie(a, &contract(b, gamma).unwrap())
                    .unwrap()
                    .sub(&contract(b, &lie(a, gamma).unwrap()).unwrap())
                    .unwrap();
                assert_eq!(left, right, "interaction identity");
            }
        }
    }

    println!("criterion 07 (Lie calculus laws): PASS ({checked} scaling checks plus law grids)");
}

#[test]
fn criterion_10_free_generation_regression() {
    // grafting does not commute with the horizontal differential; the defect
    // on the smallest pair is the 2-cycle
    let star = vertex_field();
    let left = d_h(&graft(&star, &star).unwrap()).unwrap();
    let right = graft(&star, &d_h(&star).unwrap()).unwrap();
    assert_eq!(left.sub(&right).unwrap(), pf("<*,*>"));
    println!("criterion 10 (free generation regression): PASS");
}

#[test]
fn criterion_04_bicomplex_exactness() {
    // rank equality at every interior slot of the augmented bicomplex inside
    // the window n <= 3, p <= 2, order <= 5
    let report = exactness_report(5, 3, 2).unwrap();
    for row in &report.rows {
        assert!(row.exact, "{}: kernel {} vs image {}", row.label, row.kernel_dim, row.image_dim);
    }
    // through order 4 the Lagrangian kernel of the variational derivative is
    // the horizontal image, by mutual containment rather than rank counting
    let mut contained = 0usize;
    for order in 1..=4 {
        let variational =
            GradedMatrix::of_operator(OperatorTag::VariationalDerivative, Grade::new(0, 0, order))
                .unwrap();
        for form in variational.kernel_forms().unwrap() {
            assert!(
                solve_horizontal(&form).unwrap().is_some(),
                "kernel element {} is not a boundary",
                print_form(&form)
            );
            contained += 1;
        }
        for tau in wedge_basis(Grade::new(1, 0, order)) {
            let boundary = d_h(&tau).unwrap();
            assert!(
                delta_v(&boundary).unwrap().is_zero(),
                "boundary of {} escapes the kernel",
                print_form(&tau)
            );
        }
    }
    println!(
        "criterion 04 (bicomplex exactness): PASS ({} slots, {} containments)",
        report.rows.len(),
        contained
    );
}

#[test]
fn criterion_05_lagrangian_image_spans() {
    // image dimensions of the horizontal differential into the Lagrangians
    let expected_dims = [(1usize, 1usize), (2, 2), (3, 5)];
    for (order, dim) in expected_dims {
        let matrix =
            GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(1, 0, order)).unwrap();
        assert_eq!(matrix.rank(), dim, "image dimension at order {order}");
    }
    // the eight listed spanning elements, written out exactly
    let listed: Vec<(usize, Form)> = vec![
        (1, pf("<*>")),
        (2, pf("<*[*]> + <*,*>")),
        (2, pf("<*[*]> + <*> <*>")),
        (3, pf("<*[*[*]]> + <*,*[*]> + <*,*,*>")),
        (3, pf("<*[*,*]> + 2 <*,*[*]>")),
        (3, pf("<*[*[*]]> + <*[*]> <*> + <*,*> <*>")),
        (3, pf("<*[*,*]> - <*,*> <*>")),
        (3, pf("<*> <*> <*> + 2 <*[*]> <*>")),
    ];
    for (order, form) in &listed {
        assert!(
            solve_horizontal(form).unwrap().is_some(),
            "order-{order} element {} is not in the image",
            print_form(form)
        );
    }
    for (order, dim) in expected_dims {
        let forms: Vec<Form> =
            listed.iter().filter(|(o, _)| *o == order).map(|(_, f)| f.clone()).collect();
        let independent = independent_subset(&forms).unwrap();
        assert_eq!(independent.len(), dim, "span at order {order}");
    }
    println!("criterion 05 (Lagrangian image spans): PASS (dims 1, 2, 5; 8 listed elements)");
}

#[test]
fn criterion_06_solenoidal_forms() {
    // the order-3 generator, written out exactly, and its boundary origin
    let s3 = pf("<*[*]> * + <*,*> * - <*> *[*] - *[*,*]");
    assert!(d_h(&s3).unwrap().is_zero(), "s3 must be solenoidal");
    assert_eq!(s3, d_h(&pf("* *[*]")).unwrap().scale(&int(2)));
    assert!(solenoidal_basis(1).unwrap().is_empty());
    assert!(solenoidal_basis(2).unwrap().is_empty());
    let basis3 = solenoidal_basis(3).unwrap();
    assert_eq!(basis3.len(), 1, "order-3 kernel is one-dimensional");
    // order 4: kernel dimension equals the image dimension from two roots
    let kernel4 = solenoidal_basis(4).unwrap().len();
    let image4 =
        GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(2, 0, 4)).unwrap().rank();
    assert_eq!(kernel4, image4, "order-4 exactness cross-check");
    // the listed order-4 boundaries, expanded exactly and solenoidal
    let displays = [
        ("* *[*[*]]", "<*[*[*]]> * + <*,*[*]> * + <*,*,*> * - *[*[*,*]] - *[*,*[*]] - <*> *[*[*]]"),
        ("* *[*,*]", "<*[*,*]> * + 2 <*,*[*]> * + *[*[*,*]] - 2 *[*,*[*]] - *[*,*,*] - <*> *[*,*]"),
        (
            "<*> * *[*]",
            "<*[*[*]]> * + <*> <*,*> * + <*> <*[*]> * - <*[*]> *[*] - <*> <*> *[*] - <*> *[*,*]",
        ),
    ];
    for (source, expansion) in displays {
        let boundary = d_h(&pf(source)).unwrap().scale(&int(2));
        assert_eq!(boundary, pf(expansion), "display for {source}");
        assert!(is_solenoidal(&boundary).unwrap());
    }
    println!("criterion 06 (solenoidal forms): PASS");
}

#[test]
fn criterion_08_noether_machinery() {
    // the first variational split succeeds on every Lagrangian of order <= 4
    // and reassembles the vertical differential exactly
    let mut splits = 0usize;
    for order in 1..=4 {
        for gamma in wedge_basis(Grade::new(0, 0, order)) {
            let (source, eta) = first_variational_split(&gamma).unwrap();
            assert_eq!(
                source.add(&d_h(&eta).unwrap()).unwrap(),
                d_v(&gamma).unwrap(),
                "split of {}",
                print_form(&gamma)
            );
            assert_eq!(interior_euler(&source).unwrap(), source, "source part is projected");
            splits += 1;
        }
    }
    // divergence-symmetry and conservation-law verdicts agree on the sweep
    let taus: Vec<Form> = (1..=2).flat_map(|k| wedge_basis(Grade::new(1, 0, k))).collect();
    let gammas: Vec<Form> = (1..=3).flat_map(|k| wedge_basis(Grade::new(0, 0, k))).collect();
    let mut agreements = 0usize;
    for tau in &taus {
        for gamma in &gammas {
            assert!(
                noether_equivalence_check(tau, gamma).unwrap(),
                "verdicts disagree for tau={}, gamma={}",
                print_form(tau),
                print_form(gamma)
            );
            // the Lie derivative differs from the contracted source form by
            // a horizontal boundary
            let defect = lie(tau, gamma)
                .unwrap()
                .sub(&contract(tau, &delta_v(gamma).unwrap()).unwrap())
                .unwrap();
            assert!(solve_horizontal(&defect).unwrap().is_some());
            agreements += 1;
        }
    }
    // bracket propagation wherever the precondition holds
    let mut propagated = 0usize;
    for tau1 in &taus {
        for gamma in &gammas {
            if !classify_symmetry(tau1, gamma).unwrap().is_divergence_symmetry() {
                continue;
            }
            for tau2 in &taus {
                assert!(
                    bracket_propagation_check(tau1, tau2, gamma).unwrap(),
                    "bracket propagation failed for {} and {} on {}",
                    print_form(tau1),
                    print_form(tau2),
                    print_form(gamma)
                );
                propagated += 1;
            }
        }
    }
    assert!(propagated > 0, "the sweep exercised no divergence symmetries");
    // the two-root implication: a horizontally exact Lie derivative of a
    // two-root form forces a symmetry of its boundary
    let mut implications = 0usize;
    for order in 2..=3 {
        for hat in wedge_basis(Grade::new(2, 0, order)) {
            for tau in &taus {
                assert!(symmetry_descent_check(&hat, tau).unwrap());
                implications += 1;
            }
        }
    }
    println!(
        "criterion 08 (Noether machinery): PASS ({splits} splits, {agreements} agreements, \
         {propagated} propagations, {implications} implications)"
    );
}

#[test]
fn criterion_09_enveloping_exponential() {
    // the eps^2 and eps^3 coefficients of the exponential against the
    // nested-derivative expansions, for two distinct exponent/argument pairs
    for (tau_text, gamma_text) in [("*[*]", "*"), ("<*> *", "*[*]")] {
        let tau = pf(tau_text);
        let gamma = pf(gamma_text);
        let shift = tau.grade().order - 1;
        let base = gamma.grade().order;
        let truncation = base + 3 * shift;
        let series = exp_lie(
            &Series::from_form(&tau, truncation),
            &Series::from_form(&gamma, truncation),
            truncation,
        )
        .unwrap();
        let ltt = lie(&tau, &tau).unwrap();
        let eps2 = lie(&tau, &lie(&tau, &gamma).unwrap())
            .unwrap()
            .sub(&lie(&ltt, &gamma).unwrap())
            .unwrap()
            .scale(&rat(1, 2));
        assert_eq!(series.component(base + 2 * shift), eps2, "eps^2 for tau = {tau_text}");
        let l3 = lie(&tau, &lie(&tau, &lie(&tau, &gamma).unwrap()).unwrap()).unwrap();
        let l_then_ltt = lie(&tau, &lie(&ltt, &gamma).unwrap()).unwrap();
        let ltt_then_l = lie(&ltt, &lie(&tau, &gamma).unwrap()).unwrap();
        let nested_bracket = lie(&lie(&ltt, &tau).unwrap(), &gamma).unwrap();
        let double_tau = lie(&lie(&tau, &ltt).unwrap(), &gamma).unwrap();
        let eps3 = l3
            .sub(&l_then_ltt.scale(&int(2)))
            .unwrap()
            .sub(&ltt_then_l)
            .unwrap()
            .add(&nested_bracket)
            .unwrap()
            .add(&double_tau)
            .unwrap()
            .scale(&rat(1, 6));
        assert_eq!(series.component(base + 3 * shift), eps3, "eps^3 for tau = {tau_text}");
    }
    // peel-order independence on monomials with up to three factors of
    // order <= 2
    let factors: Vec<Forest> =
        (1..=2).flat_map(|k| enumerate_forests(Grade::new(1, 0, k)).unwrap()).collect();
    let mut index_sets: Vec<Vec<usize>> = Vec::new();
    for i in 0..factors.len() {
        index_sets.push(vec![i]);
        for j in i..factors.len() {
            index_sets.push(vec![i, j]);
            for k in j..factors.len() {
                index_sets.push(vec![i, j, k]);
            }
        }
    }
    let gammas = [pf("*"), pf("<*>")];
    let mut peeled = 0usize;
    for indices in &index_sets {
        let monomial =
            Monomial::new(indices.iter().map(|&i| factors[i].clone()).collect()).unwrap();
        for gamma in &gammas {
            let reference = lie_monomial_peeled(&monomial, gamma, 0).unwrap();
            for peel in 1..monomial.degree() {
                assert_eq!(
                    lie_monomial_peeled(&monomial, gamma, peel).unwrap(),
                    reference,
                    "peel {peel} of a degree-{} monomial",
                    monomial.degree()
                );
                peeled += 1;
            }
        }
    }
    println!("criterion 09 (enveloping exponential): PASS (2 coefficient checks, {peeled} peels)");
}

#[test]
fn criterion_11_elementary_differentials() {
    // the divergence identity for every one-root form of order <= 3, against
    // random fields in dimensions 2 and 3
    let fields = [sample_poly_field(2, 3, 41).unwrap(), sample_poly_field(3, 3, 42).unwrap()];
    let mut identities = 0usize;
    for f in &fields {
        let d = f.dim();
        for order in 1..=3 {
            for tau in wedge_basis(Grade::new(1, 0, order)) {
                let image = elementary_differential(&d_h(&tau).unwrap(), f).unwrap();
                let Differential::Vector(components) = elementary_differential(&tau, f).unwrap()
                else {
                    panic!("one-root forms evaluate to vectors");
                };
                let mut div = Polynomial::zero(d);
                for (i, c) in components.iter().enumerate() {
                    div = div.add(&c.partial(i));
                }
                assert_eq!(
                    image.as_scalar().unwrap(),
                    &div,
                    "divergence identity for {}",
                    print_form(&tau)
                );
                identities += 1;
            }
        }
    }
    // self-loop vanishing under divergence-free fields, exhaustively
    let divfree = [sample_divfree(2, 3, 7).unwrap(), sample_divfree(3, 2, 8).unwrap()];
    let mut vanished = 0usize;
    for f in &divfree {
        assert!(f.divergence().is_zero());
        for roots in 0..=1 {
            for order in 1..=4 {
                for forest in enumerate_forests(Grade::new(roots, 0, order)).unwrap() {
                    let raw = forest.to_raw();
                    let self_loop = (0..raw.node_count()).any(|v| raw.succ[v] == Some(v));
                    if !self_loop {
                        continue;
                    }
                    let form = Form::from_forest(&forest).unwrap();
                    assert!(
                        elementary_differential(&form, f).unwrap().is_zero(),
                        "{} should vanish",
                        print_form(&form)
                    );
                    vanished += 1;
                }
            }
        }
    }
    // the listed field symmetry, for one-loop Lagrangians
    let tau = pf("<*,*> * - *[*,*]");
    for f in &divfree {
        for gamma in ["<*>", "<*[*]>", "<*[*,*]>"] {
            assert!(
                f_symmetry_check(&tau, &pf(gamma), f).unwrap(),
                "field symmetry fails on {gamma}"
            );
        }
    }
    println!(
        "criterion 11 (elementary differentials): PASS ({identities} divergence identities, \
         {vanished} self-loop vanishings)"
    );
}

#[test]
fn criterion_12_exact_flow_matches_taylor_oracle() {
    let cases = [
        (sample_poly_field(2, 3, 101).unwrap(), vec![rat(1, 2), rat(-1, 3)]),
        (sample_poly_field(3, 2, 205).unwrap(), vec![rat(1, 5), rat(2, 3), rat(-1, 2)]),
    ];
    let flow = exact_flow(4).unwrap();
    for (f, y0) in &cases {
        let coefficients = taylor_oracle(f, y0, 4).unwrap();
        for order in 1..=4 {
            let Differential::Vector(v) =
                elementary_differential(&flow.component(order), f).unwrap()
            else {
                panic!("the flow series is a one-root series");
            };
            let value: Vec<Rational> = v.iter().map(|p| p.eval(y0)).collect();
            assert_eq!(coefficients[order - 1], value, "order {order} in dimension {}", f.dim());
        }
    }
    println!("criterion 12 (exact flow vs Taylor oracle): PASS");
}

#[test]
fn criterion_13_round_trip_and_cli() {
    // printing then parsing is the identity on every wedge-basis form of the
    // full grade window
    let mut checked = 0usize;
    for n in 0..=3 {
        for p in 0..=2 {
            for order in 1..=5 {
                for form in wedge_basis(Grade::new(n, p, order)) {
                    let text = print_form(&form);
                    assert_eq!(parse_form(&text).unwrap(), form, "round trip of {text}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 500, "round-trip sweep looks too small: {checked}");

    // the regression table behind `paper-examples` exits 0
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_aromatic"))
        .arg("paper-examples")
        .output()
        .expect("the CLI binary should run");
    assert!(
        output.status.success(),
        "paper-examples failed:\n{}",
        String::from_utf8_lossy(&output.stdout)
    );
    println!("criterion 13 (round trip and CLI): PASS ({checked} forms)");
}
