//! Shared helpers for the benchmark targets.

use aromatic::forest::{enumerate_forests, Grade};
use aromatic::form::{wedge_normalize, Form};

/// All wedge-basis forms of a grade, coefficient one.
pub fn wedge_basis(grade: Grade) -> Vec<Form> {
    enumerate_forests(grade)
        .unwrap()
        .into_iter()
        .filter(|f| matches!(wedge_normalize(f).unwrap(), Some((rep, 1)) if rep == *f))
        .map(|f| Form::from_forest(&f).unwrap())
        .collect()
}
