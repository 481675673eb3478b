//! Exact linear algebra on graded slices of the form spaces.
//!
//! A [`BasisSlice`] fixes the coordinate system (the sorted wedge
//! representatives of one grade); operators materialize as exact rational
//! matrices over such slices.  Everything is solved by deterministic
//! Gauss-Jordan elimination over arbitrary-precision rationals: pivots are
//! chosen as the first nonzero entry in column order, so ranks, kernel bases
//! and solution witnesses are reproducible across runs and platforms.

use std::collections::BTreeMap;

use num::traits::{One, Zero};

use crate::calculus::{d_h, d_v, delta_v, interior_euler};
use crate::error::{Error, Result};
use crate::forest::{enumerate_forests_cached, Forest, Grade};
use crate::form::{wedge_normalize, Form, Rational};

/// The wedge-representative basis of one grade, in canonical order.
#[derive(Clone, Debug)]
pub struct BasisSlice {
    grade: Grade,
    elements: Vec<Forest>,
    index: BTreeMap<Forest, usize>,
}

impl BasisSlice {
    /// Basis of the alternating forms: one representative per non-collapsing
    /// orbit.
    pub fn wedge_basis(grade: Grade) -> Result<Self> {
        let all = enumerate_forests_cached(grade)?;
        let mut elements = Vec::new();
        for forest in all.iter() {
            if let Some((rep, _)) = wedge_normalize(forest)? {
                if rep == *forest {
                    elements.push(forest.clone());
                }
            }
        }
        Ok(Self::from_elements(grade, elements))
    }

    /// Every canonical forest of the grade (the non-alternating basis).
    pub fn all_forests(grade: Grade) -> Result<Self> {
        let all = enumerate_forests_cached(grade)?;
        Ok(Self::from_elements(grade, all.as_ref().clone()))
    }

    fn from_elements(grade: Grade, elements: Vec<Forest>) -> Self {
        let index = elements.iter().cloned().zip(0..).collect();
        BasisSlice { grade, elements, index }
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Forest] {
        &self.elements
    }

    pub fn index_of(&self, forest: &Forest) -> Option<usize> {
        self.index.get(forest).copied()
    }

    /// Coordinates of a form whose representatives all lie in this slice.
    pub fn coordinates(&self, form: &Form) -> Result<Vec<Rational>> {
        if form.grade() != self.grade {
            return Err(Error::Grade(format!(
                "coordinates of a {:?} form in a {:?} slice",
                form.grade(),
                self.grade
            )));
        }
        let mut coords = vec![Rational::zero(); self.dim()];
        for (forest, coeff) in form.terms() {
            match self.index_of(forest) {
                Some(i) => coords[i] = coeff.clone(),
                None => {
                    return Err(Error::Domain(format!(
                        "term {forest:?} is not a representative of the slice"
                    )))
                }
            }
        }
        Ok(coords)
    }

    pub fn form_from_coordinates(&self, coords: &[Rational]) -> Result<Form> {
        if coords.len() != self.dim() {
            return Err(Error::Domain(format!(
                "{} coordinates for a dimension-{} slice",
                coords.len(),
                self.dim()
            )));
        }
        let combination = self
            .elements
            .iter()
            .zip(coords.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|(f, c)| (f.clone(), c.clone()));
        Form::wedge(self.grade, combination)
    }
}

/// The operators that materialize as graded matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorTag {
    Horizontal,
    Vertical,
    InteriorEuler,
    VariationalDerivative,
    WedgeProjection,
}

impl OperatorTag {
    /// Grade of the image slice, or an error when the operator does not act
    /// on the given grade.
    pub fn target_grade(self, g: Grade) -> Result<Grade> {
        match self {
            OperatorTag::Horizontal => {
                if g.roots == 0 {
                    Err(Error::Grade(
                        "the horizontal differential vanishes on rootless forms; no slice".into(),
                    ))
                } else {
                    Ok(Grade::new(g.roots - 1, g.covertices, g.order))
                }
            }
            OperatorTag::Vertical => Ok(Grade::new(g.roots, g.covertices + 1, g.order)),
            OperatorTag::InteriorEuler => {
                if g.roots != 0 || g.covertices == 0 {
                    Err(Error::Grade(format!(
                        "the interior Euler operator does not act on grade {g:?}"
                    )))
                } else {
                    Ok(g)
                }
            }
            OperatorTag::VariationalDerivative => {
                if g.roots != 0 {
                    Err(Error::Grade(format!(
                        "the variational derivative does not act on grade {g:?}"
                    )))
                } else {
                    Ok(Grade::new(0, g.covertices + 1, g.order))
                }
            }
            OperatorTag::WedgeProjection => Ok(g),
        }
    }

    pub fn apply(self, form: &Form) -> Result<Form> {
        match self {
            OperatorTag::Horizontal => d_h(form),
            OperatorTag::Vertical => d_v(form),
            OperatorTag::InteriorEuler => interior_euler(form),
            OperatorTag::VariationalDerivative => delta_v(form),
            OperatorTag::WedgeProjection => Ok(form.clone()),
        }
    }
}

/// An exact matrix of an operator between two basis slices, stored sparsely
/// by column.
#[derive(Clone, Debug)]
pub struct GradedMatrix {
    domain: BasisSlice,
    codomain: BasisSlice,
    columns: Vec<Vec<(usize, Rational)>>,
}

impl GradedMatrix {
    /// Materializes `op` on the wedge basis of `domain_grade`.  For the wedge
    /// projection the domain is the full forest basis instead.
    pub fn of_operator(op: OperatorTag, domain_grade: Grade) -> Result<Self> {
        let codomain = BasisSlice::wedge_basis(op.target_grade(domain_grade)?)?;
        let domain = match op {
            OperatorTag::WedgeProjection => BasisSlice::all_forests(domain_grade)?,
            _ => BasisSlice::wedge_basis(domain_grade)?,
        };
        let mut columns = Vec::with_capacity(domain.dim());
        for forest in domain.elements() {
            let image = op.apply(&Form::from_forest(forest)?)?;
            let coords = codomain.coordinates(&image)?;
            columns.push(sparsify(&coords));
        }
        Ok(GradedMatrix { domain, codomain, columns })
    }

    /// Matrix whose columns are given image forms; the domain is abstract
    /// (kernel and solve then speak in raw coordinate vectors).
    pub fn of_images(codomain: BasisSlice, images: &[Form]) -> Result<Self> {
        let mut columns = Vec::with_capacity(images.len());
        for image in images {
            columns.push(sparsify(&codomain.coordinates(image)?));
        }
        let domain = BasisSlice::from_elements(codomain.grade, Vec::new());
        Ok(GradedMatrix { domain, codomain, columns })
    }

    pub fn domain(&self) -> &BasisSlice {
        &self.domain
    }

    pub fn codomain(&self) -> &BasisSlice {
        &self.codomain
    }

    pub fn rows(&self) -> usize {
        self.codomain.dim()
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Rational {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn column(&self, col: usize) -> &[(usize, Rational)] {
        &self.columns[col]
    }

    fn dense(&self) -> Vec<Vec<Rational>> {
        let mut rows = vec![vec![Rational::zero(); self.cols()]; self.rows()];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                rows[*i][j] = v.clone();
            }
        }
        rows
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.dense();
        row_reduce(&mut rows).len()
    }

    /// Kernel basis vectors in domain coordinates, deterministic order.
    pub fn kernel_vectors(&self) -> Vec<Vec<Rational>> {
        let mut rows = self.dense();
        let pivots = row_reduce(&mut rows);
        kernel_from_rref(&rows, &pivots, self.cols())
    }

    /// Kernel basis as forms over the domain slice.
    pub fn kernel_forms(&self) -> Result<Vec<Form>> {
        self.kernel_vectors().into_iter().map(|v| self.domain.form_from_coordinates(&v)).collect()
    }

    /// Least-index witness `x` with `M x = target`, or `None` when the target
    /// is outside the image.
    pub fn solve(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(target.len(), self.rows(), "target length mismatch");
        let mut rows = self.dense();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(target[i].clone());
        }
        let pivots = row_reduce(&mut rows);
        if pivots.contains(&self.cols()) {
            return None; // pivot in the augmented column
        }
        let mut solution = vec![Rational::zero(); self.cols()];
        for (rank_row, &pc) in pivots.iter().enumerate() {
            solution[pc] = rows[rank_row][self.cols()].clone();
        }
        Some(solution)
    }

    /// Solve with a form target; the witness comes back over the domain slice.
    pub fn solve_form(&self, target: &Form) -> Result<Option<Form>> {
        let coords = self.codomain.coordinates(target)?;
        match self.solve(&coords) {
            None => Ok(None),
            Some(witness) => Ok(Some(self.domain.form_from_coordinates(&witness)?)),
        }
    }
}

fn sparsify(coords: &[Rational]) -> Vec<(usize, Rational)> {
    coords.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect()
}

/// In-place reduced row echelon form; returns the pivot columns in order.
/// Pivot choice: scan columns left to right, take the first unused row with a
/// nonzero entry.
pub fn row_reduce(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(pivot_row) = (next_row..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, pivot_row);
        let inv = Rational::one() / rows[next_row][col].clone();
        for v in rows[next_row].iter_mut() {
            *v *= inv.clone();
        }
        let pivot_values = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next_row && !row[col].is_zero() {
                let factor = row[col].clone();
                for (entry, p) in row.iter_mut().zip(&pivot_values) {
                    *entry -= factor.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == nrows {
            break;
        }
    }
    pivots
}

fn kernel_from_rref(rows: &[Vec<Rational>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &fc in &free {
        let mut v = vec![Rational::zero(); ncols];
        v[fc] = Rational::one();
        for (rank_row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[rank_row][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// Greedy maximal independent subset of `forms` (all of one grade), in input
/// order; used to extract a basis of an operator image.
pub fn independent_subset(forms: &[Form]) -> Result<Vec<Form>> {
    let Some(first) = forms.first() else {
        return Ok(Vec::new());
    };
    let slice = BasisSlice::wedge_basis(first.grade())?;
    let mut reduced: Vec<Vec<Rational>> = Vec::new();
    let mut picked = Vec::new();
    for form in forms {
        if form.is_zero() {
            continue;
        }
        let mut candidate = slice.coordinates(form)?;
        // reduce against the rows collected so far
        for row in &reduced {
            let lead = row.iter().position(|v| !v.is_zero()).expect("rows are nonzero");
            if !candidate[lead].is_zero() {
                let factor = candidate[lead].clone() / row[lead].clone();
                for c in 0..candidate.len() {
                    let delta = factor.clone() * row[c].clone();
                    candidate[c] -= delta;
                }
            }
        }
        if candidate.iter().any(|v| !v.is_zero()) {
            // keep rows in echelon shape: insertion keeps determinism
            reduced.push(candidate);
            reduced.sort_by_key(|r| r.iter().position(|v| !v.is_zero()).unwrap_or(usize::MAX));
            picked.push(form.clone());
        }
    }
    Ok(picked)
}

/// Convenience: find `eta` with `d_h(eta) = target`, searching the wedge
/// basis one root up at the same order.
pub fn solve_horizontal(target: &Form) -> Result<Option<Form>> {
    let g = target.grade();
    if target.is_zero() {
        return Ok(Some(Form::zero(Grade::new(g.roots + 1, g.covertices, g.order))));
    }
    let matrix = GradedMatrix::of_operator(
        OperatorTag::Horizontal,
        Grade::new(g.roots + 1, g.covertices, g.order),
    )?;
    matrix.solve_form(target)
}

/// One checked position of the bicomplex.
#[derive(Clone, Debug)]
pub struct ExactnessRow {
    pub label: String,
    pub grade: Grade,
    pub space_dim: usize,
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub exact: bool,
}

/// Rank bookkeeping for the augmented bicomplex over a grade window.
#[derive(Clone, Debug, Default)]
pub struct ExactnessReport {
    pub rows: Vec<ExactnessRow>,
}

impl ExactnessReport {
    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }
}

/// Checks `dim Ker = dim Img` at every interior position of the augmented
/// bicomplex with `order <= max_order`, `roots <= max_roots`,
/// `covertices <= max_covertices`, plus the variational sequence at the
/// bottom row (Lagrangians and source forms).
pub fn exactness_report(
    max_order: usize,
    max_roots: usize,
    max_covertices: usize,
) -> Result<ExactnessReport> {
    let mut report = ExactnessReport::default();
    for order in 1..=max_order {
        // horizontal rows: ... -> O_{n+1,p} -> O_{n,p} -> ... -> O_{0,p} -> I_p
        for p in 0..=max_covertices {
            for n in 1..max_roots {
                let here = Grade::new(n, p, order);
                let incoming = GradedMatrix::of_operator(
                    OperatorTag::Horizontal,
                    Grade::new(n + 1, p, order),
                )?;
                let outgoing = GradedMatrix::of_operator(OperatorTag::Horizontal, here)?;
                let kernel_dim = outgoing.cols() - outgoing.rank();
                let image_dim = incoming.rank();
                report.rows.push(ExactnessRow {
                    label: format!("horizontal at n={n} p={p} order={order}"),
                    grade: here,
                    space_dim: outgoing.cols(),
                    kernel_dim,
                    image_dim,
                    exact: kernel_dim == image_dim,
                });
            }
            if p >= 1 {
                // augmented end of the row: Ker I = Img d_h inside O_{0,p}
                let here = Grade::new(0, p, order);
                let incoming =
                    GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(1, p, order))?;
                let euler = GradedMatrix::of_operator(OperatorTag::InteriorEuler, here)?;
                let kernel_dim = euler.cols() - euler.rank();
                let image_dim = incoming.rank();
                report.rows.push(ExactnessRow {
                    label: format!("euler end of row p={p} order={order}"),
                    grade: here,
                    space_dim: euler.cols(),
                    kernel_dim,
                    image_dim,
                    exact: kernel_dim == image_dim,
                });
            }
        }
        // vertical columns: O_{n,0} -> O_{n,1} -> ...; the start is injective
        for n in 0..=max_roots {
            let start = Grade::new(n, 0, order);
            let outgoing = GradedMatrix::of_operator(OperatorTag::Vertical, start)?;
            let kernel_dim = outgoing.cols() - outgoing.rank();
            report.rows.push(ExactnessRow {
                label: format!("vertical start n={n} order={order}"),
                grade: start,
                space_dim: outgoing.cols(),
                kernel_dim,
                image_dim: 0,
                exact: kernel_dim == 0,
            });
            for p in 1..max_covertices {
                let here = Grade::new(n, p, order);
                let incoming =
                    GradedMatrix::of_operator(OperatorTag::Vertical, Grade::new(n, p - 1, order))?;
                let outgoing = GradedMatrix::of_operator(OperatorTag::Vertical, here)?;
                let kernel_dim = outgoing.cols() - outgoing.rank();
                let image_dim = incoming.rank();
                report.rows.push(ExactnessRow {
                    label: format!("vertical at n={n} p={p} order={order}"),
                    grade: here,
                    space_dim: outgoing.cols(),
                    kernel_dim,
                    image_dim,
                    exact: kernel_dim == image_dim,
                });
            }
        }
        // variational sequence at the Lagrangians:
        // Ker(delta_v on O_0) = Img(d_h from O_1)
        let lagrangians = Grade::new(0, 0, order);
        let incoming = GradedMatrix::of_operator(OperatorTag::Horizontal, Grade::new(1, 0, order))?;
        let variational =
            GradedMatrix::of_operator(OperatorTag::VariationalDerivative, lagrangians)?;
        let kernel_dim = variational.cols() - variational.rank();
        let image_dim = incoming.rank();
        report.rows.push(ExactnessRow {
            label: format!("variational at lagrangians order={order}"),
            grade: lagrangians,
            space_dim: variational.cols(),
            kernel_dim,
            image_dim,
            exact: kernel_dim == image_dim,
        });
        // variational sequence at the source forms:
        // Ker(delta_v restricted to I_1) = Img(delta_v: O_0 -> I_1)
        if max_covertices >= 2 {
            let euler1 =
                GradedMatrix::of_operator(OperatorTag::InteriorEuler, Grade::new(0, 1, order))?;
            let mut image_forms = Vec::new();
            for forest in euler1.domain().elements() {
                image_forms.push(interior_euler(&Form::from_forest(forest)?)?);
            }
            let source_basis = independent_subset(&image_forms)?;
            let codomain = BasisSlice::wedge_basis(Grade::new(0, 2, order))?;
            let images: Vec<Form> = source_basis.iter().map(delta_v).collect::<Result<_>>()?;
            let restricted = GradedMatrix::of_images(codomain, &images)?;
            let kernel_dim = source_basis.len() - restricted.rank();
            let image_dim = variational.rank();
            report.rows.push(ExactnessRow {
                label: format!("variational at source forms order={order}"),
                grade: Grade::new(0, 1, order),
                space_dim: source_basis.len(),
                kernel_dim,
                image_dim,
                exact: kernel_dim == image_dim,
            });
        }
    }
    Ok(report)
}
