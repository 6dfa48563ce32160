//! The e-invariant of a line bundle, the anticanonical pseudoheight of a
//! toric system, and the fullness test it gives.
//!
//! For the collection `E_i = O(A_1 + .. + A_{i-1})`, the Ext groups between
//! `E_a` and `E_b` are the cohomology of the segment sum `A_a + .. +
//! A_{b-1}`, so every chain term is the e-invariant of a cyclic segment.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::lattice::DivisorClass;
use crate::surface::SurfaceModel;
use crate::toric::{cyclic_segments, ToricSystem};

/// Index of the first non-vanishing cohomology group of `O(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EInvariant {
    Zero,
    One,
    Two,
    Infinity,
}

impl EInvariant {
    pub fn value(self) -> Option<i64> {
        match self {
            EInvariant::Zero => Some(0),
            EInvariant::One => Some(1),
            EInvariant::Two => Some(2),
            EInvariant::Infinity => None,
        }
    }
}

impl fmt::Display for EInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("infinity"),
        }
    }
}

impl Serialize for EInvariant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.value() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str("infinity"),
        }
    }
}

/// An integer or `+infinity`; `Finite` sorts below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Height {
    Finite(i64),
    Infinity,
}

impl Height {
    pub fn finite(self) -> Option<i64> {
        match self {
            Height::Finite(v) => Some(v),
            Height::Infinity => None,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(v) => write!(f, "{v}"),
            Height::Infinity => f.write_str("infinity"),
        }
    }
}

impl Serialize for Height {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Height::Finite(v) => s.serialize_i64(*v),
            Height::Infinity => s.serialize_str("infinity"),
        }
    }
}

/// One chain `a_0 < .. < a_p` (1-based) with its terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainEvaluation {
    pub indices: Vec<usize>,
    pub term_values: Vec<EInvariant>,
    pub total: Height,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PseudoheightResult {
    pub value: Height,
    /// First chain attaining the minimum, in enumeration order.
    pub argmin: ChainEvaluation,
    pub chains_evaluated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Fullness {
    PossiblyFull,
    NotFull,
}

/// 0 if `D` is effective. Otherwise, if `K - D` is not effective then
/// `h^1 = -chi(D)` exactly and the value is 1 or infinity. If `K - D` is
/// effective, `chi(D) < 0` forces `h^1 > 0` and gives 1; otherwise `h^2`
/// is the first group known to be non-zero and the value is 2.
pub fn e_invariant(x: &SurfaceModel, d: &DivisorClass) -> Result<EInvariant> {
    let profile = x.cohomology_profile(d)?;
    if profile.h0_positive {
        return Ok(EInvariant::Zero);
    }
    if let Some(h1) = profile.h1 {
        return Ok(if h1 > 0 { EInvariant::One } else { EInvariant::Infinity });
    }
    Ok(if d.euler_char()? < 0 { EInvariant::One } else { EInvariant::Two })
}

/// e-invariants of cyclic segments, keyed by (0-based start, length).
struct SegmentValues<'a> {
    x: &'a SurfaceModel,
    ts: &'a ToricSystem,
    cache: HashMap<(usize, usize), EInvariant>,
}

impl SegmentValues<'_> {
    fn get(&mut self, start: usize, len: usize) -> Result<EInvariant> {
        if let Some(&v) = self.cache.get(&(start, len)) {
            return Ok(v);
        }
        let n = self.ts.len();
        let mut sum = self.ts.lattice().zero();
        for i in 0..len {
            sum = &sum + self.ts.entry((start + i) % n + 1);
        }
        let v = e_invariant(self.x, &sum)?;
        self.cache.insert((start, len), v);
        Ok(v)
    }

    fn evaluate(&mut self, indices: &[usize]) -> Result<ChainEvaluation> {
        let n = self.ts.len();
        let p = indices.len() - 1;
        let mut term_values = Vec::with_capacity(indices.len());
        for j in 0..indices.len() {
            let a = indices[j];
            // the last term wraps around to a_0 and covers all of -K when p = 0
            let len = if j < p { indices[j + 1] - a } else { n - (a - indices[0]) };
            term_values.push(self.get(a - 1, len)?);
        }
        let total = term_values
            .iter()
            .map(|e| e.value())
            .sum::<Option<i64>>()
            .map_or(Height::Infinity, |s| Height::Finite(s - p as i64));
        Ok(ChainEvaluation { indices: indices.to_vec(), term_values, total })
    }
}

fn check_inputs(x: &SurfaceModel, ts: &ToricSystem) -> Result<()> {
    if ts.lattice().id() != x.lattice().id() {
        return domain(format!("system on {} but surface on {}", ts.lattice().id(), x.lattice().id()));
    }
    let v = ts.validate();
    match v.violations.first() {
        None => Ok(()),
        Some(first) => domain(format!("not a toric system: {first}")),
    }
}

/// Value of a single chain, given as 1-based strictly increasing indices.
pub fn evaluate_chain(x: &SurfaceModel, ts: &ToricSystem, indices: &[usize]) -> Result<ChainEvaluation> {
    check_inputs(x, ts)?;
    let n = ts.len();
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) || indices[0] < 1 || indices[indices.len() - 1] > n {
        return domain(format!("chain {indices:?} is not strictly increasing in 1..{n}"));
    }
    SegmentValues { x, ts, cache: HashMap::new() }.evaluate(indices)
}

/// Minimum over all chains with `p_min <= p <= n - 1`, where `p + 1` is the
/// chain length. Chains are visited by size, then by subset bitmask.
pub fn pseudoheight_with_chain(x: &SurfaceModel, ts: &ToricSystem, p_min: usize) -> Result<PseudoheightResult> {
    check_inputs(x, ts)?;
    if p_min > 1 {
        return domain(format!("p_min must be 0 or 1, got {p_min}"));
    }
    let n = ts.len();
    if n >= usize::BITS as usize - 1 {
        return domain(format!("system of length {n} is too long"));
    }
    let mut values = SegmentValues { x, ts, cache: HashMap::new() };
    let mut best: Option<ChainEvaluation> = None;
    let mut evaluated = 0;
    for size in (p_min + 1)..=n {
        for mask in 1usize..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let indices: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let chain = values.evaluate(&indices)?;
            evaluated += 1;
            if best.as_ref().map_or(true, |b| chain.total < b.total) {
                best = Some(chain);
            }
        }
    }
    let argmin = best.expect("at least one chain since n >= 3");
    Ok(PseudoheightResult { value: argmin.total, argmin, chains_evaluated: evaluated })
}

pub fn pseudoheight(x: &SurfaceModel, ts: &ToricSystem, p_min: usize) -> Result<Height> {
    pseudoheight_with_chain(x, ts, p_min).map(|r| r.value)
}

/// A full exceptional collection has pseudoheight at most -2.
pub fn fullness_obstruction(x: &SurfaceModel, ts: &ToricSystem) -> Result<Fullness> {
    Ok(if pseudoheight(x, ts, 1)? > Height::Finite(-2) { Fullness::NotFull } else { Fullness::PossiblyFull })
}

/// Some cyclic segment of length at most `n - 1` sums to an effective class.
/// Only the lattice is checked, so this also runs on sequences that are not
/// toric systems.
pub fn has_effective_segment(x: &SurfaceModel, ts: &ToricSystem) -> Result<bool> {
    if ts.lattice().id() != x.lattice().id() {
        return domain(format!("system on {} but surface on {}", ts.lattice().id(), x.lattice().id()));
    }
    let n = ts.len();
    for seg in cyclic_segments(n) {
        let sum = ts.segment_sum(seg.start, seg.end)?;
        if x.is_effective(&sum) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_surface;
    use crate::lattice::{HirzebruchKind, PicardLattice};
    use crate::surface::build_surface;

    fn binom2(m: i64) -> i64 {
        if m < 2 {
            0
        } else {
            m * (m - 1) / 2
        }
    }

    // h^i(P^2, O(k)) from the standard formulas.
    fn p2_cohomology(k: i64) -> [i64; 3] {
        [binom2(k + 2), 0, binom2(-k - 1)]
    }

    // h^i(P^1, O(a))
    fn p1(a: i64) -> [i64; 2] {
        [(a + 1).max(0), (-a - 1).max(0)]
    }

    // Kunneth on P^1 x P^1.
    fn f0_cohomology(a: i64, b: i64) -> [i64; 3] {
        let (x, y) = (p1(a), p1(b));
        [x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]]
    }

    fn first_nonzero(h: [i64; 3]) -> EInvariant {
        match h.iter().position(|&v| v != 0) {
            Some(0) => EInvariant::Zero,
            Some(1) => EInvariant::One,
            Some(2) => EInvariant::Two,
            _ => EInvariant::Infinity,
        }
    }

    #[test]
    fn e_invariant_on_p2_matches_formula() {
        let lat = PicardLattice::blowup(0).unwrap();
        let x = build_surface(&lat, vec![]).unwrap();
        for k in -8..=8 {
            let d = lat.class(vec![k]).unwrap();
            assert_eq!(e_invariant(&x, &d).unwrap(), first_nonzero(p2_cohomology(k)), "k = {k}");
        }
        assert_eq!(e_invariant(&x, &lat.class(vec![-3]).unwrap()).unwrap(), EInvariant::Two);
        assert_eq!(e_invariant(&x, &lat.class(vec![-1]).unwrap()).unwrap(), EInvariant::Infinity);
    }

    #[test]
    fn e_invariant_on_quadric_matches_kunneth() {
        let lat = PicardLattice::hirzebruch(HirzebruchKind::F0);
        let x = build_surface(&lat, vec![]).unwrap();
        for a in -5..=5 {
            for b in -5..=5 {
                let d = lat.class(vec![a, b]).unwrap();
                assert_eq!(e_invariant(&x, &d).unwrap(), first_nonzero(f0_cohomology(a, b)), "({a}, {b})");
            }
        }
    }

    #[test]
    fn projective_plane_pseudoheight() {
        let lat = PicardLattice::blowup(0).unwrap();
        let x = build_surface(&lat, vec![]).unwrap();
        let ts = ToricSystem::parse(&lat, &["L", "L", "L"]).unwrap();
        let r = pseudoheight_with_chain(&x, &ts, 1).unwrap();
        assert_eq!(r.value, Height::Finite(-2));
        assert_eq!(r.argmin.indices, vec![1, 2, 3]);
        assert_eq!(r.chains_evaluated, 4);
        assert_eq!(pseudoheight(&x, &ts, 0).unwrap(), Height::Finite(-2));
        assert_eq!(fullness_obstruction(&x, &ts).unwrap(), Fullness::PossiblyFull);
        assert!(has_effective_segment(&x, &ts).unwrap());
        let c = evaluate_chain(&x, &ts, &[1, 3]).unwrap();
        assert_eq!(c.total, Height::Finite(-1));
        assert!(evaluate_chain(&x, &ts, &[2, 1]).is_err());
        assert!(pseudoheight(&x, &ts, 2).is_err());
    }

    #[test]
    fn example_system_has_low_height() {
        let x = catalog_surface("dP6").unwrap();
        let lat = x.lattice().clone();
        let ts = ToricSystem::parse(&lat, &["L - E1 - E2", "E2", "L - E2 - E3", "E3", "L - E1 - E3", "E1"]).unwrap();
        assert!(has_effective_segment(&x, &ts).unwrap());
        let h = pseudoheight(&x, &ts, 1).unwrap();
        assert!(h <= Height::Finite(-2), "{h}");
        for k in 1..6 {
            assert_eq!(pseudoheight(&x, &ts.cyclic_shift(k), 1).unwrap(), h);
        }
    }

    #[test]
    fn invalid_system_is_rejected() {
        let lat = PicardLattice::blowup(0).unwrap();
        let x = build_surface(&lat, vec![]).unwrap();
        let ts = ToricSystem::parse(&lat, &["L", "L", "2L"]).unwrap();
        assert!(pseudoheight(&x, &ts, 1).is_err());
        let negated = ToricSystem::parse(&lat, &["-L", "-L", "-L"]).unwrap();
        assert!(!has_effective_segment(&x, &negated).unwrap());
    }
}
