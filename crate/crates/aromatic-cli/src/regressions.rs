//! The `paper-examples` regression table: every worked example from the
//! literature that the kernel reproduces, each reduced to a yes/no check.
//!
//! A check that returns an error counts as a failure; the table never
//! panics, so a broken build still prints the full scoreboard.

use aromatic::elemdiff::{
    elementary_differential, f_symmetry_check, sample_divfree, sample_poly_field, taylor_oracle,
    Differential,
};
use aromatic::envelope::exact_flow;
use aromatic::form::rat;
use aromatic::linalg::{independent_subset, solve_horizontal, GradedMatrix, OperatorTag};
use aromatic::noether::{is_solenoidal, solenoidal_basis};
use aromatic::textio::{parse_expr, parse_form};
use aromatic::{
    contract, d_h, d_total, d_v, delta_v, graft, h_v, interior_euler, lie, vertex_field, Error,
    Form, Grade,
};

pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
}

fn pf(text: &str) -> Result<Form, Error> {
    parse_form(text)
}

type Check = fn() -> Result<bool, Error>;

/// Name and checker for every table entry.
const TABLE: &[(&str, Check)] = &[
    ("horizontal differential of the vertex", || Ok(d_h(&pf("*")?)? == pf("<*>")?)),
    (
        "horizontal differential of the tall tree",
        || Ok(d_h(&pf("*[*]")?)? == pf("<*[*]> + <*,*>")?),
    ),
    ("horizontal differential of a two-root product", || {
        Ok(d_h(&pf("* *[*]")?)? == pf("1/2 <*[*]> * + 1/2 <*,*> * - 1/2 <*> *[*] - 1/2 *[*,*]")?)
    }),
    ("aromas are horizontally closed", || Ok(d_h(&pf("<*>")?)?.is_zero())),
    ("vertical differential of the vertex", || Ok(d_v(&pf("*")?)? == pf("o1")?)),
    ("vertical differential of a two-root product", || {
        Ok(d_v(&pf("* *[*]")?)? == pf("o1 *[*] + * o1[*] + * *[o1]")?)
    }),
    ("signed total differential of the vertex", || {
        let (horizontal, vertical) = d_total(&pf("*")?)?;
        Ok(horizontal == pf("-<*>")? && vertical == pf("o1")?)
    }),
    ("antisymmetric covertex pair collapses", || Ok(parse_expr("<o1,o2>")?.is_zero())),
    ("contraction closes the loop in both ways", || {
        Ok(contract(&pf("*[*]")?, &pf("<o1>")?)? == pf("<*[*]> + <*,*>")?)
    }),
    ("contraction undoes the vertical differential of the vertex", || {
        Ok(contract(&vertex_field(), &pf("o1")?)? == pf("*")?)
    }),
    (
        "vertical homotopy reopens the marked loop",
        || Ok(h_v(&pf("<*[o1]>")?)? == pf("1/2 <*[*]>")?),
    ),
    ("interior Euler operator annihilates the marked loop", || {
        Ok(interior_euler(&pf("<o1>")?)?.is_zero())
    }),
    ("interior Euler fixed point", || Ok(interior_euler(&pf("<*[o1]>")?)? == pf("<*[o1]>")?)),
    ("interior Euler reroutes the cycle edge", || {
        Ok(interior_euler(&pf("<o1[*]>")?)? == pf("<*[o1]>")?)
    }),
    ("interior Euler on the marked two-cycle", || {
        Ok(interior_euler(&pf("<*,o1>")?)? == pf("-<*[o1]>")?)
    }),
    (
        "interior Euler on the loop pair",
        || Ok(interior_euler(&pf("<*> <o1>")?)? == pf("-<*[o1]>")?),
    ),
    ("variational derivative of the tall Lagrangian", || {
        Ok(delta_v(&pf("<*[*]>")?)? == pf("2 <*[o1]>")?)
    }),
    ("grafting defect against the horizontal differential", || {
        let star = vertex_field();
        let left = d_h(&graft(&star, &star)?)?;
        let right = graft(&star, &d_h(&star)?)?;
        Ok(left.sub(&right)? == pf("<*,*>")?)
    }),
    ("order scaling along the vertex", || Ok(lie(&vertex_field(), &pf("*[*]")?)? == pf("2 *[*]")?)),
    ("Lagrangian image dimensions 1, 2, 5", || {
        for (order, dim) in [(1usize, 1usize), (2, 2), (3, 5)] {
            let matrix =
                GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(1, 0, order))?;
            if matrix.rank() != dim {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("eight listed Lagrangian boundaries span the image", || {
        let listed = [
            (1usize, "<*>"),
            (2, "<*[*]> + <*,*>"),
            (2, "<*[*]> + <*> <*>"),
            (3, "<*[*[*]]> + <*,*[*]> + <*,*,*>"),
            (3, "<*[*,*]> + 2 <*,*[*]>"),
            (3, "<*[*[*]]> + <*[*]> <*> + <*,*> <*>"),
            (3, "<*[*,*]> - <*,*> <*>"),
            (3, "<*> <*> <*> + 2 <*[*]> <*>"),
        ];
        let mut forms = Vec::new();
        for (_, text) in listed {
            let form = pf(text)?;
            if solve_horizontal(&form)?.is_none() {
                return Ok(false);
            }
            forms.push(form);
        }
        for (order, dim) in [(1usize, 1usize), (2, 2), (3, 5)] {
            let at_order: Vec<Form> =
                forms.iter().filter(|f| f.grade().order == order).cloned().collect();
            if independent_subset(&at_order)?.len() != dim {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("minimal solenoidal field", || {
        let s3 = pf("<*[*]> * + <*,*> * - <*> *[*] - *[*,*]")?;
        if !is_solenoidal(&s3)? || s3 != d_h(&pf("* *[*]")?)?.scale(&rat(2, 1)) {
            return Ok(false);
        }
        let basis = solenoidal_basis(3)?;
        Ok(basis.len() == 1 && independent_subset(&[basis[0].clone(), s3])?.len() == 1)
    }),
    ("displayed order-4 solenoidal boundaries", || {
        let displays = [
            (
                "* *[*[*]]",
                "<*[*[*]]> * + <*,*[*]> * + <*,*,*> * - *[*[*,*]] - *[*,*[*]] - <*> *[*[*]]",
            ),
            (
                "* *[*,*]",
                "<*[*,*]> * + 2 <*,*[*]> * + *[*[*,*]] - 2 *[*,*[*]] - *[*,*,*] - <*> *[*,*]",
            ),
            (
                "<*> * *[*]",
                "<*[*[*]]> * + <*> <*,*> * + <*> <*[*]> * - <*[*]> *[*] - <*> <*> *[*] - <*> *[*,*]",
            ),
        ];
        for (source, expansion) in displays {
            let boundary = d_h(&pf(source)?)?.scale(&rat(2, 1));
            if boundary != pf(expansion)? || !is_solenoidal(&boundary)? {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("elementary differentials intertwine with the divergence", || {
        let field = sample_poly_field(2, 3, 41)?;
        let tau = pf("*[*]")?;
        let lhs = elementary_differential(&d_h(&tau)?, &field)?;
        let rhs = match elementary_differential(&tau, &field)? {
            Differential::Vector(ps) => {
                let mut total = aromatic::elemdiff::Polynomial::zero(field.dim());
                for (i, p) in ps.iter().enumerate() {
                    total = total.add(&p.partial(i));
                }
                total
            }
            Differential::Scalar(_) => return Ok(false),
        };
        match lhs {
            Differential::Scalar(p) => Ok(p == rhs),
            Differential::Vector(_) => Ok(false),
        }
    }),
    ("loop aromas vanish on divergence-free fields", || {
        let field = sample_divfree(2, 3, 7)?;
        for text in ["<*>", "<*[*]>", "<*[*,*]>", "<*> <*>"] {
            if !elementary_differential(&pf(text)?, &field)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }),
    ("f-symmetry of the minimal solenoidal field", || {
        let tau = pf("<*,*> * - *[*,*]")?;
        for seed in [11u64, 12, 13] {
            let field = sample_divfree(2, 3, seed)?;
            for gamma in ["<*>", "<*[*]>"] {
                if !f_symmetry_check(&tau, &pf(gamma)?, &field)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }),
    ("exact flow agrees with the Taylor recursion", || {
        let field = sample_poly_field(2, 3, 101)?;
        let y0 = [rat(1, 2), rat(-1, 3)];
        let coefficients = taylor_oracle(&field, &y0, 3)?;
        let flow = exact_flow(3)?;
        for order in 1..=3usize {
            let component = flow.component(order);
            let values = match elementary_differential(&component, &field)? {
                Differential::Vector(ps) => ps,
                Differential::Scalar(_) => return Ok(false),
            };
            for (i, polynomial) in values.iter().enumerate() {
                if polynomial.eval(&y0) != coefficients[order - 1][i] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }),
];

pub fn run_all() -> Vec<Outcome> {
    TABLE.iter().map(|(name, check)| Outcome { name, pass: check().unwrap_or(false) }).collect()
}
