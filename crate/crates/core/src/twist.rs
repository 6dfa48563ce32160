//! Spherical twists along (-2)-curves on the level of divisor classes, and
//! the reduction of a torsion exceptional sheaf `O_D` to `O_E` for an
//! irreducible (-1)-curve `E`.
//!
//! Twisting along `O_C(-1)` sends a line bundle `O(D)` to a line bundle
//! exactly when `D.C` is 0 or 1. The reduction peels off an irreducible
//! (-2)-curve `C` with `C.D = -1` at each step; `D - C` is again a slo
//! class of square -1.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{domain, internal, Result};
use crate::lattice::DivisorClass;
use crate::surface::SurfaceModel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum TwistOutcome {
    LineBundle(DivisorClass),
    NotLineBundle,
}

/// Class of `T_{O_C(-1)}(O(D))` when it is a line bundle.
pub fn twist_line_bundle(c: &DivisorClass, d: &DivisorClass) -> Result<TwistOutcome> {
    if c.square() != -2 || c.dot_canonical() != 0 {
        return domain(format!("{c} is not a (-2)-class"));
    }
    Ok(match c.intersect(d)? {
        0 => TwistOutcome::LineBundle(d.clone()),
        1 => TwistOutcome::LineBundle(d + c),
        _ => TwistOutcome::NotLineBundle,
    })
}

/// `O_D` is exceptional: `D` effective, `D^2 = -1` and slo.
pub fn is_torsion_exceptional_divisor(x: &SurfaceModel, d: &DivisorClass) -> Result<bool> {
    x.check_lattice(d)?;
    if d.square() != -1 || !d.is_numerically_lo() || !x.is_effective(d) {
        return Ok(false);
    }
    Ok(x.lo_slo_status(d)?.slo)
}

/// `start - sum(steps) = result`, one irreducible (-2)-curve per step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub start: DivisorClass,
    pub steps: Vec<DivisorClass>,
    pub result: DivisorClass,
}

/// `D = E + sum k_i C_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub curve: DivisorClass,
    /// Distinct (-2)-curves with multiplicities, in canonical order.
    pub roots: Vec<(DivisorClass, usize)>,
}

impl ReductionTrace {
    /// Intermediate classes `D_0 = start, .., D_m = result`.
    pub fn classes(&self) -> Vec<DivisorClass> {
        let mut out = vec![self.start.clone()];
        for c in &self.steps {
            let next = out.last().expect("non-empty") - c;
            out.push(next);
        }
        out
    }

    pub fn decomposition(&self) -> Decomposition {
        let mut counts: BTreeMap<DivisorClass, usize> = BTreeMap::new();
        for c in &self.steps {
            *counts.entry(c.clone()).or_default() += 1;
        }
        Decomposition { curve: self.result.clone(), roots: counts.into_iter().collect() }
    }
}

/// Repeatedly subtracts the least irreducible (-2)-curve `C` (in coordinate
/// order) with `C.D = -1` until `D` meets every such curve non-negatively.
pub fn reduce(x: &SurfaceModel, d: &DivisorClass) -> Result<ReductionTrace> {
    if x.degree() < 2 {
        return domain(format!("reduction needs degree at least 2, surface has degree {}", x.degree()));
    }
    if !is_torsion_exceptional_divisor(x, d)? {
        return domain(format!("{d} is not an effective slo class of square -1"));
    }
    let bound = x.minus1_classes().len();
    let mut visited: HashSet<DivisorClass> = HashSet::from([d.clone()]);
    let mut current = d.clone();
    let mut steps = Vec::new();
    // simple roots are stored sorted, so the first hit is the least
    while let Some(c) = x.simple_roots().iter().find(|c| c.dot(&current) == -1) {
        let next = &current - c;
        if next.square() != -1 {
            return internal(format!("{current} - ({c}) has square {}", next.square()));
        }
        if !x.lo_slo_status(&next)?.slo {
            return internal(format!("{next} is not slo"));
        }
        if !visited.insert(next.clone()) {
            return internal(format!("reduction of {d} revisits {next}"));
        }
        steps.push(c.clone());
        current = next;
        if steps.len() > bound {
            return internal(format!("reduction of {d} exceeds {bound} steps"));
        }
    }
    if !x.irreducible_minus1().contains(&current) {
        return internal(format!("reduction of {d} stopped at {current}, not an irreducible (-1)-curve"));
    }
    Ok(ReductionTrace { start: d.clone(), steps, result: current })
}

/// Replays a trace from scratch: each step is an irreducible (-2)-curve
/// meeting the running class in -1, and the final class is a (-1)-class
/// meeting every irreducible (-2)-curve non-negatively.
pub fn verify_trace(x: &SurfaceModel, trace: &ReductionTrace) -> bool {
    let on_lattice = |c: &DivisorClass| c.lattice().id() == x.lattice().id();
    if !on_lattice(&trace.start) || !on_lattice(&trace.result) || !trace.steps.iter().all(on_lattice) {
        return false;
    }
    let is_minus1 = |c: &DivisorClass| c.square() == -1 && c.dot_canonical() == -1;
    if !is_minus1(&trace.start) {
        return false;
    }
    let mut current = trace.start.clone();
    for c in &trace.steps {
        if !x.simple_roots().contains(c) || c.dot(&current) != -1 {
            return false;
        }
        current = &current - c;
    }
    current == trace.result && is_minus1(&current) && x.simple_roots().iter().all(|c| c.dot(&current) >= 0)
}
