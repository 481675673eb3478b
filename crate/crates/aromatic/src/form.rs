//! Aromatic forms: exact rational linear combinations of forests, alternating
//! in the root numbers and in the covertex labels.
//!
//! A form is stored sparsely on *wedge representatives*: for each orbit of the
//! signed action of (root permutations) x (covertex permutations) we keep the
//! minimal canonical forest `R` and a single coefficient, with the convention
//! that the stored pair `(R, c)` denotes `c * wedge(R)`, where `wedge(R)` is
//! the signature-weighted average of the orbit.  Orbits on which some
//! stabilizing permutation acts with signature -1 collapse to zero and are
//! never stored.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::sync::Mutex;

use num::traits::{One, Signed, Zero};
use num::BigInt;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::forest::{permutation_sign, permutations, permute, Forest, Grade};

/// Exact scalar type used everywhere: arbitrary-precision rationals.
pub type Rational = num::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Minimal representative of the signed permutation orbit of `forest`,
/// together with the sign `s` such that `wedge(forest) = s * wedge(rep)`.
/// Returns `None` when the orbit collapses (some permutation fixes the forest
/// with signature -1), i.e. when `wedge(forest) = 0`.
pub fn wedge_normalize(forest: &Forest) -> Result<Option<(Forest, i8)>> {
    type WedgeCache = HashMap<Forest, Option<(Forest, i8)>>;
    static CACHE: Lazy<Mutex<WedgeCache>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(hit) = CACHE.lock().expect("wedge cache poisoned").get(forest) {
        return Ok(hit.clone());
    }
    let grade = forest.grade();
    let mut orbit: BTreeMap<Forest, i8> = BTreeMap::new();
    let mut collapsed = false;
    'outer: for root_perm in permutations(grade.roots) {
        for cov_perm in permutations(grade.covertices) {
            let (image, sign) = permute(forest, &root_perm, &cov_perm)?;
            match orbit.get(&image) {
                Some(&previous) if previous != sign => {
                    collapsed = true;
                    break 'outer;
                }
                Some(_) => {}
                None => {
                    orbit.insert(image, sign);
                }
            }
        }
    }
    let result = if collapsed {
        None
    } else {
        let (rep, sign) = orbit.into_iter().next().expect("orbit is nonempty");
        Some((rep, sign))
    };
    CACHE.lock().expect("wedge cache poisoned").insert(forest.clone(), result.clone());
    Ok(result)
}

/// A homogeneous aromatic form of a fixed grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    grade: Grade,
    terms: BTreeMap<Forest, Rational>,
}

impl Form {
    pub fn zero(grade: Grade) -> Self {
        Form { grade, terms: BTreeMap::new() }
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored terms: wedge representatives with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of a representative key (zero when absent).
    pub fn coefficient(&self, rep: &Forest) -> Rational {
        self.terms.get(rep).cloned().unwrap_or_else(Rational::zero)
    }

    /// Signed symmetrization of a raw linear combination of forests: the form
    /// `sum a_F wedge(F)`.  All forests must carry `grade`.
    pub fn wedge<I>(grade: Grade, combination: I) -> Result<Form>
    where
        I: IntoIterator<Item = (Forest, Rational)>,
    {
        let mut terms: BTreeMap<Forest, Rational> = BTreeMap::new();
        for (forest, coeff) in combination {
            if forest.grade() != grade {
                return Err(Error::Grade(format!(
                    "term of grade {:?} in a combination declared {:?}",
                    forest.grade(),
                    grade
                )));
            }
            if coeff.is_zero() {
                continue;
            }
            if let Some((rep, sign)) = wedge_normalize(&forest)? {
                let entry = terms.entry(rep).or_insert_with(Rational::zero);
                *entry += coeff * Rational::from_integer(BigInt::from(sign));
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Form { grade, terms })
    }

    /// The form `wedge(forest)` with coefficient 1.
    pub fn from_forest(forest: &Forest) -> Result<Form> {
        Form::wedge(forest.grade(), [(forest.clone(), Rational::one())])
    }

    /// Expansion in the plain forest basis: `wedge(R)` is written out as the
    /// signature-weighted average of the orbit of each representative `R`.
    pub fn expand(&self) -> BTreeMap<Forest, Rational> {
        let mut out: BTreeMap<Forest, Rational> = BTreeMap::new();
        let normalizer = rat(
            (1..=self.grade.roots as i64).product::<i64>()
                * (1..=self.grade.covertices as i64).product::<i64>(),
            1,
        );
        for (rep, coeff) in &self.terms {
            for root_perm in permutations(self.grade.roots) {
                for cov_perm in permutations(self.grade.covertices) {
                    let (image, sign) =
                        permute(rep, &root_perm, &cov_perm).expect("stored keys are valid");
                    let entry = out.entry(image).or_insert_with(Rational::zero);
                    *entry +=
                        coeff * Rational::from_integer(BigInt::from(sign)) / normalizer.clone();
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        if self.grade != other.grade {
            return Err(Error::Grade(format!(
                "adding forms of grades {:?} and {:?}",
                self.grade, other.grade
            )));
        }
        let mut terms = self.terms.clone();
        for (key, coeff) in &other.terms {
            let entry = terms.entry(key.clone()).or_insert_with(Rational::zero);
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Form { grade: self.grade, terms })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, factor: &Rational) -> Form {
        if factor.is_zero() {
            return Form::zero(self.grade);
        }
        Form {
            grade: self.grade,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * factor)).collect(),
        }
    }

    /// Largest absolute numerator/denominator appearing in the coefficients;
    /// handy for diagnostics.
    pub fn coefficient_height(&self) -> BigInt {
        self.terms
            .values()
            .flat_map(|c| [c.numer().abs(), c.denom().abs()])
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Disjoint-union product.  `left` must have no numbered roots; its covertex
/// labels stay put while `right`'s labels are shifted up by `left`'s count.
pub fn concat(left: &Form, right: &Form) -> Result<Form> {
    let lg = left.grade();
    let rg = right.grade();
    if lg.roots != 0 {
        return Err(Error::Domain(format!(
            "the left factor of a product must be rootless, got {} roots",
            lg.roots
        )));
    }
    let grade = Grade::new(rg.roots, lg.covertices + rg.covertices, lg.order + rg.order);
    let mut combination = Vec::new();
    for (lf, lc) in left.expand() {
        for (rf, rc) in right.expand() {
            let right_raw = rf.to_raw();
            let mut raw = lf.to_raw();
            let offset = raw.absorb(&right_raw);
            for &r in &right_raw.roots {
                raw.roots.push(r + offset);
            }
            for kind in raw.kinds.iter_mut().skip(offset) {
                if let crate::forest::NodeKind::Covertex(label) = kind {
                    *label += lg.covertices as u32;
                }
            }
            combination.push((raw.canonicalize()?, lc.clone() * rc.clone()));
        }
    }
    Form::wedge(grade, combination)
}

/// A finite sum of homogeneous forms of distinct grades.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedForm {
    components: BTreeMap<Grade, Form>,
}

impl GradedForm {
    pub fn zero() -> Self {
        GradedForm::default()
    }

    pub fn from_form(form: Form) -> Self {
        let mut out = GradedForm::zero();
        out.add_form(form);
        out
    }

    pub fn add_form(&mut self, form: Form) {
        if form.is_zero() {
            return;
        }
        let grade = form.grade();
        match self.components.remove(&grade) {
            None => {
                self.components.insert(grade, form);
            }
            Some(existing) => {
                let sum = existing.add(&form).expect("grades match by construction");
                if !sum.is_zero() {
                    self.components.insert(grade, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &GradedForm) -> GradedForm {
        let mut out = self.clone();
        for form in other.components.values() {
            out.add_form(form.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> GradedForm {
        let mut out = GradedForm::zero();
        for form in self.components.values() {
            out.add_form(form.scale(factor));
        }
        out
    }

    pub fn neg(&self) -> GradedForm {
        self.scale(&-Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = &Form> {
        self.components.values()
    }

    /// Applies a grade-respecting operator componentwise and re-collects.
    pub fn map<F>(&self, mut op: F) -> Result<GradedForm>
    where
        F: FnMut(&Form) -> Result<Form>,
    {
        let mut out = GradedForm::zero();
        for form in self.components.values() {
            out.add_form(op(form)?);
        }
        Ok(out)
    }
}

/// Signature-weighted sum over all root/covertex permutations of a single
/// forest, as a raw combination (used by tests and by the expansion above).
pub fn orbit_expansion(forest: &Forest) -> Result<Vec<(Forest, Rational)>> {
    let grade = forest.grade();
    let mut out = Vec::new();
    for root_perm in permutations(grade.roots) {
        for cov_perm in permutations(grade.covertices) {
            let (image, _) = permute(forest, &root_perm, &cov_perm)?;
            let sign = permutation_sign(&root_perm)? * permutation_sign(&cov_perm)?;
            out.push((image, Rational::from_integer(BigInt::from(sign))));
        }
    }
    Ok(out)
}
