//! Operators on aromatic forms.
//!
//! Every operator follows the same scheme: expand the stored form into the
//! plain forest basis, apply a combinatorial rule to each forest (grafting,
//! relabelling, unplug/replug surgery), and project the resulting raw
//! combination back through the signed symmetrization.  The forest-level
//! rules are memoized on canonical forests, so repeated sweeps over the same
//! graded slices stay cheap.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::traits::One;
use num::BigInt;
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::forest::{Forest, Grade, NodeKind, RawForest};
use crate::form::{rat, Form, GradedForm, Rational};

/// The vector field `*`: a single rooted vertex.
pub fn vertex_field() -> Form {
    Form::from_forest(&Forest::single_vertex()).expect("the one-vertex forest does not collapse")
}

fn ensure_vector_field(tau: &Form) -> Result<()> {
    let g = tau.grade();
    if g.roots != 1 || g.covertices != 0 {
        return Err(Error::Domain(format!(
            "expected a vector field (one root, no covertices), got grade {g:?}"
        )));
    }
    Ok(())
}

/// Removes node `x` from `raw`.  The node must be fully detached: no
/// predecessors, no successor, not listed as a root.
fn compact_remove(mut raw: RawForest, x: usize) -> RawForest {
    debug_assert!(raw.succ[x].is_none());
    debug_assert!(!raw.roots.contains(&x));
    debug_assert!(raw.predecessors(x).is_empty());
    raw.kinds.remove(x);
    raw.succ.remove(x);
    for v in raw.succ.iter_mut().flatten() {
        if *v > x {
            *v -= 1;
        }
    }
    for r in raw.roots.iter_mut() {
        if *r > x {
            *r -= 1;
        }
    }
    raw
}

/// Every way of assigning one value from `targets` to each slot (cartesian
/// power, `targets.len() ^ slots` entries).
fn assignments(slots: usize, targets: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..slots {
        let mut next = Vec::with_capacity(out.len() * targets.len());
        for partial in &out {
            for &t in targets {
                let mut v = partial.clone();
                v.push(t);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// forest-level rules (memoized)
// ---------------------------------------------------------------------------

type ForestList = Arc<Vec<Forest>>;

fn memoized<K, F>(cache: &Lazy<Mutex<HashMap<K, ForestList>>>, key: K, compute: F) -> ForestList
where
    K: std::hash::Hash + Eq + Clone,
    F: FnOnce() -> Vec<Forest>,
{
    if let Some(hit) = cache.lock().expect("operator cache poisoned").get(&key) {
        return hit.clone();
    }
    let value: ForestList = Arc::new(compute());
    cache.lock().expect("operator cache poisoned").insert(key, value.clone());
    value
}

/// Horizontal rule on one forest: detach the last root and graft it onto
/// every node (itself included, which closes a fresh cycle).
fn graft_last_root_everywhere(forest: &Forest) -> ForestList {
    static CACHE: Lazy<Mutex<HashMap<Forest, ForestList>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    memoized(&CACHE, forest.clone(), || {
        let raw = forest.to_raw();
        let root = *raw.roots.last().expect("caller checks for at least one root");
        (0..raw.node_count())
            .map(|target| {
                let mut surgery = raw.clone();
                surgery.succ[root] = Some(target);
                surgery.roots.pop();
                surgery.canonicalize().expect("grafting preserves well-formedness")
            })
            .collect()
    })
}

/// Vertical rule on one forest: promote each vertex in turn to the covertex
/// with the next free label.
fn promote_each_vertex(forest: &Forest) -> ForestList {
    static CACHE: Lazy<Mutex<HashMap<Forest, ForestList>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    memoized(&CACHE, forest.clone(), || {
        let raw = forest.to_raw();
        let next_label = forest.grade().covertices as u32 + 1;
        (0..raw.node_count())
            .filter(|&v| raw.kinds[v] == NodeKind::Vertex)
            .map(|v| {
                let mut surgery = raw.clone();
                surgery.kinds[v] = NodeKind::Covertex(next_label);
                surgery.canonicalize().expect("relabelling preserves well-formedness")
            })
            .collect()
    })
}

/// Interior-Euler rule on one forest (no roots, highest covertex label `p`):
/// detach every edge entering the covertex `p`, then reattach each detached
/// source onto every node other than that covertex, in all combinations.
/// A self-loop on the covertex counts as an entering edge, so its outgoing
/// edge is reassigned along with the rest.  The overall sign is `(-1)^s`
/// where `s` is the number of detached edges; it is folded into the returned
/// coefficient at the call site via the list length bookkeeping below.
fn unplug_replug(forest: &Forest) -> Arc<(usize, Vec<Forest>)> {
    type ReplugCache = HashMap<Forest, Arc<(usize, Vec<Forest>)>>;
    static CACHE: Lazy<Mutex<ReplugCache>> = Lazy::new(|| Mutex::new(HashMap::new()));
    if let Some(hit) = CACHE.lock().expect("operator cache poisoned").get(forest) {
        return hit.clone();
    }
    let raw = forest.to_raw();
    let p = forest.grade().covertices as u32;
    let x = (0..raw.node_count())
        .find(|&v| raw.kinds[v] == NodeKind::Covertex(p))
        .expect("caller checks that the top covertex exists");
    let sources = raw.predecessors(x);
    let targets: Vec<usize> = (0..raw.node_count()).filter(|&v| v != x).collect();
    let mut out = Vec::new();
    for choice in assignments(sources.len(), &targets) {
        let mut surgery = raw.clone();
        for (&w, &t) in sources.iter().zip(choice.iter()) {
            surgery.succ[w] = Some(t);
        }
        out.push(surgery.canonicalize().expect("replugging preserves well-formedness"));
    }
    let value = Arc::new((sources.len(), out));
    CACHE.lock().expect("operator cache poisoned").insert(forest.clone(), value.clone());
    value
}

/// Contraction rule on one forest: replace the covertex with label `p` by the
/// one-root forest `plug`.  The plug's root inherits the covertex's outgoing
/// edge (or its root number), and every former predecessor of the covertex is
/// regrafted onto every node of the plug, independently.
fn substitute_top_covertex(forest: &Forest, plug: &Forest) -> ForestList {
    static CACHE: Lazy<Mutex<HashMap<(Forest, Forest), ForestList>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    memoized(&CACHE, (forest.clone(), plug.clone()), || {
        let p = forest.grade().covertices as u32;
        let base = forest.to_raw();
        let x = (0..base.node_count())
            .find(|&v| base.kinds[v] == NodeKind::Covertex(p))
            .expect("caller checks that the top covertex exists");
        let sources = base.predecessors(x); // may contain x itself (self-loop)
        let plug_raw = plug.to_raw();
        let mut joined = base.clone();
        let offset = joined.absorb(&plug_raw);
        let plug_root = plug_raw.roots[0] + offset;
        let plug_nodes: Vec<usize> = (offset..offset + plug_raw.node_count()).collect();
        // the plug root takes over the covertex's role
        match joined.succ[x] {
            Some(y) if y != x => joined.succ[plug_root] = Some(y),
            Some(_) => {} // self-loop: handled through the regraft choices
            None => {
                let slot = joined
                    .roots
                    .iter()
                    .position(|&r| r == x)
                    .expect("rootless nodes are numbered roots");
                joined.roots[slot] = plug_root;
            }
        }
        joined.succ[x] = None;
        let mut out = Vec::new();
        for choice in assignments(sources.len(), &plug_nodes) {
            let mut surgery = joined.clone();
            for (&w, &t) in sources.iter().zip(choice.iter()) {
                let source = if w == x { plug_root } else { w };
                surgery.succ[source] = Some(t);
            }
            out.push(
                compact_remove(surgery, x)
                    .canonicalize()
                    .expect("substitution preserves well-formedness"),
            );
        }
        out
    })
}

/// Grafting rule on a forest pair: attach the plug's root onto every node of
/// `host` (the plug's other components ride along as extra aromas).
fn graft_onto_each_node(plug: &Forest, host: &Forest) -> ForestList {
    static CACHE: Lazy<Mutex<HashMap<(Forest, Forest), ForestList>>> =
        Lazy::new(|| Mutex::new(HashMap::new()));
    memoized(&CACHE, (plug.clone(), host.clone()), || {
        let base = host.to_raw();
        let plug_raw = plug.to_raw();
        let mut joined = base.clone();
        let offset = joined.absorb(&plug_raw);
        let plug_root = plug_raw.roots[0] + offset;
        (0..base.node_count())
            .map(|v| {
                let mut surgery = joined.clone();
                surgery.succ[plug_root] = Some(v);
                surgery.canonicalize().expect("grafting preserves well-formedness")
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// form-level operators
// ---------------------------------------------------------------------------

/// Horizontal differential: graft the highest-numbered root onto every node
/// and drop its root number.  Zero on forms without roots (returned in the
/// input grade).
pub fn d_h(gamma: &Form) -> Result<Form> {
    let g = gamma.grade();
    if g.roots == 0 {
        return Ok(Form::zero(g));
    }
    let target = Grade::new(g.roots - 1, g.covertices, g.order);
    let mut combination = Vec::new();
    for (forest, coeff) in gamma.expand() {
        for image in graft_last_root_everywhere(&forest).iter() {
            combination.push((image.clone(), coeff.clone()));
        }
    }
    Form::wedge(target, combination)
}

/// Vertical differential: promote each vertex to the next covertex label and
/// re-alternate.
pub fn d_v(gamma: &Form) -> Result<Form> {
    let g = gamma.grade();
    let target = Grade::new(g.roots, g.covertices + 1, g.order);
    let mut combination = Vec::new();
    for (forest, coeff) in gamma.expand() {
        for image in promote_each_vertex(&forest).iter() {
            combination.push((image.clone(), coeff.clone()));
        }
    }
    Form::wedge(target, combination)
}

/// Total differential, returned as its bigraded pair: the horizontal part
/// `(-1)^(n+p) d_h(gamma)` and the vertical part `d_v(gamma)`.
pub fn d_total(gamma: &Form) -> Result<(Form, Form)> {
    let g = gamma.grade();
    let horizontal =
        if (g.roots + g.covertices).is_multiple_of(2) { d_h(gamma)? } else { d_h(gamma)?.neg() };
    Ok((horizontal, d_v(gamma)?))
}

/// Contraction of `gamma` by the vector field `tau`: substitute `tau` for the
/// highest-labelled covertex and scale by the covertex count.  Zero on forms
/// without covertices.
pub fn contract(tau: &Form, gamma: &Form) -> Result<Form> {
    ensure_vector_field(tau)?;
    let g = gamma.grade();
    let m = tau.grade().order;
    let target = Grade::new(g.roots, g.covertices.saturating_sub(1), g.order - 1 + m);
    if g.covertices == 0 {
        return Ok(Form::zero(target));
    }
    let mut combination = Vec::new();
    for (forest, gamma_coeff) in gamma.expand() {
        for (plug, tau_coeff) in tau.expand() {
            let coeff = &gamma_coeff * &tau_coeff;
            for image in substitute_top_covertex(&forest, &plug).iter() {
                combination.push((image.clone(), coeff.clone()));
            }
        }
    }
    Ok(Form::wedge(target, combination)?.scale(&rat(g.covertices as i64, 1)))
}

/// Lie derivative along a vector field, through the vertical Cartan formula
/// `d_v i_tau + i_tau d_v`.
pub fn lie(tau: &Form, gamma: &Form) -> Result<Form> {
    ensure_vector_field(tau)?;
    let vertical_then_contract = contract(tau, &d_v(gamma)?)?;
    if gamma.grade().covertices == 0 {
        return Ok(vertical_then_contract);
    }
    let contract_then_vertical = d_v(&contract(tau, gamma)?)?;
    vertical_then_contract.add(&contract_then_vertical)
}

/// Lie derivative through the full Cartan formula `d i_tau + i_tau d` with
/// the total differential.  The bigraded cross terms must cancel; if they do
/// not, something is inconsistent and an error is returned.  Kept as an
/// independent route for cross-validation against [`lie`].
pub fn lie_cartan(tau: &Form, gamma: &Form) -> Result<Form> {
    ensure_vector_field(tau)?;
    let g = gamma.grade();
    let m = tau.grade().order;
    let expected = Grade::new(g.roots, g.covertices, g.order - 1 + m);
    let mut acc = GradedForm::zero();
    if g.covertices > 0 {
        let contracted = contract(tau, gamma)?;
        let (dh_part, dv_part) = d_total(&contracted)?;
        acc.add_form(dh_part);
        acc.add_form(dv_part);
    }
    let (dh_gamma, dv_gamma) = d_total(gamma)?;
    acc.add_form(contract(tau, &dv_gamma)?);
    if g.roots > 0 {
        acc.add_form(contract(tau, &dh_gamma)?);
    }
    let mut result = Form::zero(expected);
    for component in acc.components() {
        if component.grade() == expected {
            result = result.add(component)?;
        } else if !component.is_zero() {
            return Err(Error::Domain(format!(
                "Cartan routes leave an uncancelled component of grade {:?}",
                component.grade()
            )));
        }
    }
    Ok(result)
}

/// Grafting product: attach `tau`'s root onto every node of `gamma`
/// (covertex-free forms only).
pub fn graft(tau: &Form, gamma: &Form) -> Result<Form> {
    ensure_vector_field(tau)?;
    let g = gamma.grade();
    if g.covertices != 0 {
        return Err(Error::Domain("grafting is defined on covertex-free forms".into()));
    }
    let target = Grade::new(g.roots, 0, g.order + tau.grade().order);
    let mut combination = Vec::new();
    for (host, gamma_coeff) in gamma.expand() {
        for (plug, tau_coeff) in tau.expand() {
            let coeff = &gamma_coeff * &tau_coeff;
            for image in graft_onto_each_node(&plug, &host).iter() {
                combination.push((image.clone(), coeff.clone()));
            }
        }
    }
    Form::wedge(target, combination)
}

/// Lie bracket of vector fields: `lie(a, b) - lie(b, a)`.
pub fn bracket(a: &Form, b: &Form) -> Result<Form> {
    ensure_vector_field(a)?;
    ensure_vector_field(b)?;
    lie(a, b)?.sub(&lie(b, a)?)
}

/// Interior Euler operator on rootless forms with at least one covertex:
/// unplug everything feeding the top covertex and replug onto all other
/// nodes, with sign `(-1)^edges`; then re-alternate.  Projects onto the
/// source forms (it is idempotent and kills horizontal boundaries).
pub fn interior_euler(gamma: &Form) -> Result<Form> {
    let g = gamma.grade();
    if g.roots != 0 {
        return Err(Error::Domain(format!(
            "the interior Euler operator acts on rootless forms, got {} roots",
            g.roots
        )));
    }
    if g.covertices == 0 {
        return Err(Error::Domain(
            "the interior Euler operator needs at least one covertex".into(),
        ));
    }
    let mut combination = Vec::new();
    for (forest, coeff) in gamma.expand() {
        let result = unplug_replug(&forest);
        let (detached, images) = (&result.0, &result.1);
        let signed = if detached % 2 == 0 { coeff } else { -coeff };
        for image in images {
            combination.push((image.clone(), signed.clone()));
        }
    }
    Form::wedge(g, combination)
}

/// Variational derivative: the interior Euler operator after the vertical
/// differential.  Acts on rootless forms.
pub fn delta_v(gamma: &Form) -> Result<Form> {
    let g = gamma.grade();
    if g.roots != 0 {
        return Err(Error::Domain(format!(
            "the variational derivative acts on rootless forms, got {} roots",
            g.roots
        )));
    }
    interior_euler(&d_v(gamma)?)
}

/// Vertical homotopy: contraction by the single vertex, scaled by the
/// reciprocal of the order.
pub fn h_v(gamma: &Form) -> Result<Form> {
    let g = gamma.grade();
    if g.covertices == 0 {
        return Err(Error::Domain("the vertical homotopy needs at least one covertex".into()));
    }
    if g.order == 0 {
        return Err(Error::Domain("the vertical homotopy needs a positive order".into()));
    }
    Ok(contract(&vertex_field(), gamma)?.scale(&rat(1, g.order as i64)))
}

/// Whether `gamma` is a source form (a fixed point of the interior Euler
/// operator).
pub fn is_source_form(gamma: &Form) -> Result<bool> {
    Ok(interior_euler(gamma)? == *gamma)
}

/// Lie derivative followed by the projection back onto source forms.  The
/// input must already be a source form.
pub fn natural_lie(tau: &Form, gamma: &Form) -> Result<Form> {
    if !is_source_form(gamma)? {
        return Err(Error::Domain(
            "the natural Lie derivative is defined on source forms only".into(),
        ));
    }
    interior_euler(&lie(tau, gamma)?)
}

/// `(-1)^k` as a rational, used by callers assembling signed sums.
pub fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Scales by an integer (convenience used across the higher layers).
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}
