//! Universal envelope of the vector-field Lie algebra: symmetric-product
//! monomials of rooted aromatic forests, the shuffle coproduct, the extension
//! of the Lie derivative to monomials, the exponential of a Lie derivative,
//! and the exact-flow series.
//!
//! The extension follows the symmetric-algebra recursion
//!
//! ```text
//! L_1 g               = g
//! L_(t . m) g         = L_t (L_m g) - L_(L_t m) g
//! ```
//!
//! where `L_t m` acts on a monomial as a derivation over its factors.  Any
//! factor may be peeled first; the result is independent of the choice (this
//! is checked in the acceptance suite).

use std::collections::BTreeMap;

use num::traits::One;
use num::BigInt;

use crate::calculus::lie;
use crate::error::{Error, Result};
use crate::forest::{enumerate_forests, Forest, Grade, Tree};
use crate::form::{Form, Rational};

fn ensure_tree_factor(factor: &Forest) -> Result<()> {
    let g = factor.grade();
    if g.roots != 1 || g.covertices != 0 {
        return Err(Error::Domain(format!(
            "envelope factors are single-root covertex-free forests, got grade {g:?}"
        )));
    }
    Ok(())
}

/// A symmetric-product monomial: a multiset of single-root covertex-free
/// forests, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<Forest>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn new(mut factors: Vec<Forest>) -> Result<Self> {
        for f in &factors {
            ensure_tree_factor(f)?;
        }
        factors.sort();
        Ok(Monomial { factors })
    }

    pub fn factors(&self) -> &[Forest] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// Total node count over all factors.
    pub fn order(&self) -> usize {
        self.factors.iter().map(Forest::order).sum()
    }

    /// Multiply by one more factor.
    pub fn push(&self, factor: &Forest) -> Result<Self> {
        let mut factors = self.factors.clone();
        factors.push(factor.clone());
        Monomial::new(factors)
    }
}

/// Shuffle coproduct: all splits of the factor multiset into an ordered pair
/// of submonomials, listed with multiplicity (2^degree entries).
pub fn shuffle_coproduct(monomial: &Monomial) -> Vec<(Monomial, Monomial)> {
    let k = monomial.factors.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u64..(1u64 << k) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, f) in monomial.factors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                left.push(f.clone());
            } else {
                right.push(f.clone());
            }
        }
        out.push((
            Monomial::new(left).expect("factors stay valid"),
            Monomial::new(right).expect("factors stay valid"),
        ));
    }
    out
}

/// Lie derivative along a monomial, peeling the factor at `peel` first.
/// Every peel position yields the same form.
pub fn lie_monomial_peeled(monomial: &Monomial, gamma: &Form, peel: usize) -> Result<Form> {
    if monomial.factors.is_empty() {
        return Ok(gamma.clone());
    }
    if peel >= monomial.factors.len() {
        return Err(Error::Domain(format!(
            "peel index {peel} out of range for a degree-{} monomial",
            monomial.factors.len()
        )));
    }
    let tau = Form::from_forest(&monomial.factors[peel])?;
    let mut rest_factors = monomial.factors.clone();
    rest_factors.remove(peel);
    let rest = Monomial { factors: rest_factors };

    let first = lie(&tau, &lie_monomial(&rest, gamma)?)?;
    let mut acc = first;
    // subtract L over the derivation action of tau on the remaining factors
    for i in 0..rest.factors.len() {
        let moved = lie(&tau, &Form::from_forest(&rest.factors[i])?)?;
        // single-root covertex-free forms: stored keys are plain forests
        for (forest, coeff) in moved.terms() {
            let mut replaced = rest.factors.clone();
            replaced[i] = forest.clone();
            let shifted = lie_monomial(&Monomial::new(replaced)?, gamma)?;
            acc = acc.sub(&shifted.scale(coeff))?;
        }
    }
    Ok(acc)
}

/// Lie derivative along a monomial (first factor peeled first).
pub fn lie_monomial(monomial: &Monomial, gamma: &Form) -> Result<Form> {
    lie_monomial_peeled(monomial, gamma, 0)
}

/// A series of homogeneous forms of a fixed (roots, covertices) signature,
/// graded by order and truncated beyond `truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    roots: usize,
    covertices: usize,
    truncation: usize,
    terms: BTreeMap<usize, Form>,
}

impl Series {
    pub fn zero(roots: usize, covertices: usize, truncation: usize) -> Self {
        Series { roots, covertices, truncation, terms: BTreeMap::new() }
    }

    pub fn from_form(form: &Form, truncation: usize) -> Self {
        let g = form.grade();
        let mut s = Series::zero(g.roots, g.covertices, truncation);
        s.add_form(form.clone());
        s
    }

    pub fn roots(&self) -> usize {
        self.roots
    }

    pub fn covertices(&self) -> usize {
        self.covertices
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Orders that carry a nonzero component, ascending.
    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().copied()
    }

    pub fn component(&self, order: usize) -> Form {
        self.terms
            .get(&order)
            .cloned()
            .unwrap_or_else(|| Form::zero(Grade::new(self.roots, self.covertices, order)))
    }

    /// Adds a homogeneous form, dropping it silently when beyond the
    /// truncation order.
    pub fn add_form(&mut self, form: Form) {
        if form.is_zero() {
            return;
        }
        let g = form.grade();
        assert_eq!(
            (g.roots, g.covertices),
            (self.roots, self.covertices),
            "series signature mismatch"
        );
        if g.order > self.truncation {
            return;
        }
        match self.terms.remove(&g.order) {
            None => {
                self.terms.insert(g.order, form);
            }
            Some(existing) => {
                let sum = existing.add(&form).expect("orders match");
                if !sum.is_zero() {
                    self.terms.insert(g.order, sum);
                }
            }
        }
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out =
            Series::zero(self.roots, self.covertices, self.truncation.min(other.truncation));
        for f in self.terms.values() {
            out.add_form(f.clone());
        }
        for f in other.terms.values() {
            out.add_form(f.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Series {
        let mut out = Series::zero(self.roots, self.covertices, self.truncation);
        for f in self.terms.values() {
            out.add_form(f.scale(factor));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k as u64).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

/// Exponential of the Lie derivative along a vector-field series:
/// `sum_k (1/k!) L_(tau^(.k)) gamma`, truncated by the node-count grading.
/// Components of order <= 1 in `tau` are rejected: they do not raise the
/// order, so the series would not terminate.
pub fn exp_lie(tau: &Series, gamma: &Series, truncation: usize) -> Result<Series> {
    if tau.roots != 1 || tau.covertices != 0 {
        return Err(Error::Domain("the exponent must be a vector-field series".into()));
    }
    if tau.terms.keys().any(|&o| o <= 1) {
        return Err(Error::Domain(
            "the exponent has a component of order <= 1; the exponential does not truncate".into(),
        ));
    }
    // flatten tau into (tree factor, coefficient) pairs
    let mut generators: Vec<(Forest, Rational)> = Vec::new();
    for form in tau.terms.values() {
        for (forest, coeff) in form.terms() {
            generators.push((forest.clone(), coeff.clone()));
        }
    }
    let min_gamma = gamma.terms.keys().next().copied();
    let Some(min_gamma) = min_gamma else {
        return Ok(Series::zero(gamma.roots, gamma.covertices, truncation));
    };
    let max_shift = truncation.saturating_sub(min_gamma);

    // multisets over the generators, tracked as (monomial, prod c^m / m!)
    let mut picks: Vec<(Monomial, Rational)> = Vec::new();
    fn gen(
        generators: &[(Forest, Rational)],
        index: usize,
        shift_left: usize,
        current: &Monomial,
        coeff: Rational,
        out: &mut Vec<(Monomial, Rational)>,
    ) -> Result<()> {
        if index == generators.len() {
            out.push((current.clone(), coeff));
            return Ok(());
        }
        let (forest, c) = &generators[index];
        let weight = forest.order() - 1; // each application raises order by this
        let mut m = current.clone();
        let mut running = coeff.clone();
        let mut copies = 0usize;
        loop {
            gen(generators, index + 1, shift_left - copies * weight, &m, running.clone(), out)?;
            copies += 1;
            if copies * weight > shift_left {
                break;
            }
            m = m.push(forest)?;
            running = running * c / Rational::from_integer(BigInt::from(copies as u64));
        }
        Ok(())
    }
    gen(&generators, 0, max_shift, &Monomial::one(), Rational::one(), &mut picks)?;

    let mut out = Series::zero(gamma.roots, gamma.covertices, truncation);
    for (monomial, coeff) in picks {
        let shift = monomial.order() - monomial.degree();
        for (order, component) in &gamma.terms {
            if order + shift > truncation {
                continue;
            }
            out.add_form(lie_monomial(&monomial, component)?.scale(&coeff));
        }
    }
    Ok(out)
}

/// Symmetry factor of a rooted tree: the order of its automorphism group.
pub fn tree_symmetry(tree: &Tree) -> BigInt {
    let mut product = BigInt::one();
    let children = tree.children();
    let mut i = 0;
    while i < children.len() {
        let mut run = 1usize;
        while i + run < children.len() && children[i + run] == children[i] {
            run += 1;
        }
        product *= factorial(run);
        for _ in 0..run {
            product *= tree_symmetry(&children[i]);
        }
        i += run;
    }
    product
}

/// Density of a rooted tree: `|t|` times the densities of the branches.
pub fn tree_density(tree: &Tree) -> BigInt {
    let mut product = BigInt::from(tree.order() as u64);
    for child in tree.children() {
        product *= tree_density(child);
    }
    product
}

/// The exact-flow series: over every rooted tree (no aromas) up to the
/// truncation order, the tree weighted by `1 / (symmetry * density)`.
pub fn exact_flow(truncation: usize) -> Result<Series> {
    let mut out = Series::zero(1, 0, truncation);
    for order in 1..=truncation {
        let mut combination = Vec::new();
        for forest in enumerate_forests(Grade::new(1, 0, order))?.iter() {
            if !forest.aromas().is_empty() {
                continue;
            }
            let tree = &forest.roots()[0];
            let weight = Rational::new(BigInt::one(), tree_symmetry(tree) * tree_density(tree));
            combination.push((forest.clone(), weight));
        }
        out.add_form(Form::wedge(Grade::new(1, 0, order), combination)?);
    }
    Ok(out)
}
