//! Toric systems: cyclic sequences `(A_1, .., A_n)` of divisor classes with
//! `A_i.A_{i+1} = 1`, all other products between distinct entries zero, and
//! `sum A_i = -K`. Equivalently, numerically exceptional collections of line
//! bundles of maximal length `n = rank + 2`.
//!
//! Indices in the public API are 1-based and cyclic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{DivisorClass, LatticeId, PicardLattice, MAX_BLOWUP_POINTS};
use crate::surface::SurfaceModel;

/// A cyclic segment `[start..end]`, 1-based and inclusive; `start > end`
/// wraps around through `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn new(start: usize, end: usize) -> Self {
        Segment { start, end }
    }

    pub fn len(&self, n: usize) -> usize {
        (self.end + n - self.start) % n + 1
    }

    /// 0-based positions covered, in cyclic order.
    pub fn positions(&self, n: usize) -> impl Iterator<Item = usize> {
        let start = self.start - 1;
        (0..self.len(n)).map(move |i| (start + i) % n)
    }

    /// Within `[1, n-1]` without wrapping: the segments that decide
    /// strong exceptionality.
    pub fn is_linear(&self, n: usize) -> bool {
        self.start <= self.end && self.end < n
    }

    pub fn wraps(&self) -> bool {
        self.start > self.end
    }

    pub fn contains(&self, i: usize, n: usize) -> bool {
        self.positions(n).any(|p| p + 1 == i)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}..{}]", self.start, self.end)
    }
}

/// Every proper cyclic segment (`end != start - 1`), ordered by start then end.
pub fn cyclic_segments(n: usize) -> Vec<Segment> {
    let mut out = Vec::with_capacity(n * (n - 1));
    for k in 1..=n {
        let before = if k == 1 { n } else { k - 1 };
        for l in 1..=n {
            if l != before {
                out.push(Segment::new(k, l));
            }
        }
    }
    out
}

/// Segments `[k..l]` with `1 <= k <= l <= n - 1`.
pub fn linear_segments(n: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    for k in 1..n {
        for l in k..n {
            out.push(Segment::new(k, l));
        }
    }
    out
}

/// A broken toric-system axiom. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToricViolation {
    Length { expected: usize, actual: usize },
    Adjacent { i: usize, j: usize, product: i64 },
    NonAdjacent { i: usize, j: usize, product: i64 },
    Sum { actual: Vec<i64>, expected: Vec<i64> },
}

impl fmt::Display for ToricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ToricViolation::Length { expected, actual } => {
                write!(f, "length {actual}, expected {expected}")
            }
            ToricViolation::Adjacent { i, j, product } => {
                write!(f, "A{i}.A{j} = {product}, expected 1")
            }
            ToricViolation::NonAdjacent { i, j, product } => {
                write!(f, "A{i}.A{j} = {product}, expected 0")
            }
            ToricViolation::Sum { actual, expected } => {
                write!(f, "sum of entries is {actual:?}, expected -K = {expected:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<ToricViolation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violated {
    /// The segment sum is not left-orthogonal.
    Lo,
    /// The segment sum is lo but not strong left-orthogonal.
    Slo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Witness {
    pub segment: Segment,
    pub violated: Violated,
    pub square: i64,
}

/// Which set of segments an exceptionality check looked at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckRoute {
    /// Every cyclic segment.
    AllSegments,
    /// Only segments of square -2, plus the wrap segments through a
    /// negative last entry.
    MinusTwoSegments,
    /// No (-2)-curves and all squares >= -2: nothing to check.
    DelPezzo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalityReport {
    pub exceptional: bool,
    pub strong: bool,
    pub cyclic_strong: bool,
    /// Failing segments in canonical order.
    pub witnesses: Vec<Witness>,
    pub segments_checked: usize,
    pub route: CheckRoute,
}

impl ExceptionalityReport {
    pub fn flags(&self) -> (bool, bool, bool) {
        (self.exceptional, self.strong, self.cyclic_strong)
    }
}

/// A cyclic list of divisor classes on one lattice. Construction only
/// checks the length; the toric axioms are checked by [`ToricSystem::validate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ToricSystemJson", into = "ToricSystemJson")]
pub struct ToricSystem {
    lattice: Arc<PicardLattice>,
    entries: Vec<DivisorClass>,
}

// Entries carry their lattice and the length is rank + 2, so comparing
// entries compares systems.
impl PartialEq for ToricSystem {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.id() == other.lattice.id() && self.entries == other.entries
    }
}

impl Eq for ToricSystem {}

impl std::hash::Hash for ToricSystem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.lattice.id().hash(state);
        self.entries.hash(state);
    }
}

/// Wire format: `{"lattice": "Bl3", "entries": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricSystemJson {
    pub lattice: LatticeId,
    pub entries: Vec<Vec<i64>>,
}

impl TryFrom<ToricSystemJson> for ToricSystem {
    type Error = Error;
    fn try_from(json: ToricSystemJson) -> Result<Self> {
        let lattice = PicardLattice::from_id(json.lattice)?;
        let entries = json
            .entries
            .into_iter()
            .map(|c| lattice.class(c))
            .collect::<Result<Vec<_>>>()?;
        ToricSystem::new(&lattice, entries)
    }
}

impl From<ToricSystem> for ToricSystemJson {
    fn from(ts: ToricSystem) -> Self {
        ToricSystemJson {
            lattice: ts.lattice.id(),
            entries: ts.entries.into_iter().map(DivisorClass::into_coords).collect(),
        }
    }
}

impl ToricSystem {
    pub fn new(lattice: &Arc<PicardLattice>, entries: Vec<DivisorClass>) -> Result<Self> {
        let expected = lattice.rank() + 2;
        if entries.len() != expected {
            return domain(format!(
                "a toric system on {} has {expected} entries, got {}",
                lattice.id(),
                entries.len()
            ));
        }
        if let Some(bad) = entries.iter().find(|d| d.lattice().id() != lattice.id()) {
            return domain(format!("entry {bad:?} is not on lattice {}", lattice.id()));
        }
        Ok(ToricSystem { lattice: lattice.clone(), entries })
    }

    /// Parses entries written as expressions in the basis labels.
    pub fn parse(lattice: &Arc<PicardLattice>, entries: &[&str]) -> Result<Self> {
        let classes = entries.iter().map(|e| lattice.parse_class(e)).collect::<Result<Vec<_>>>()?;
        Self::new(lattice, classes)
    }

    /// `A_i = D_{i+1} - D_i` for `i < n` and `A_n = -K - sum_{i<n} A_i`.
    pub fn from_collection(divisors: &[DivisorClass]) -> Result<Self> {
        let first = match divisors.first() {
            Some(d) => d,
            None => return domain("empty collection"),
        };
        let lattice = first.lattice().clone();
        if divisors.len() != lattice.rank() + 2 {
            return domain(format!(
                "a collection on {} needs {} line bundles, got {}",
                lattice.id(),
                lattice.rank() + 2,
                divisors.len()
            ));
        }
        let mut entries = Vec::with_capacity(divisors.len());
        for pair in divisors.windows(2) {
            entries.push(pair[1].try_sub(&pair[0])?);
        }
        let mut last = -lattice.canonical();
        for a in &entries {
            last = &last - a;
        }
        entries.push(last);
        Self::new(&lattice, entries)
    }

    /// `D_1 = base`, `D_{i+1} = D_i + A_i`, for `i < n`.
    pub fn to_collection(&self, base: &DivisorClass) -> Result<Vec<DivisorClass>> {
        if base.lattice().id() != self.lattice.id() {
            return domain("base class is on a different lattice");
        }
        let mut out = vec![base.clone()];
        for a in &self.entries[..self.len() - 1] {
            let next = out.last().expect("non-empty") + a;
            out.push(next);
        }
        Ok(out)
    }

    pub fn lattice(&self) -> &Arc<PicardLattice> {
        &self.lattice
    }

    pub fn entries(&self) -> &[DivisorClass] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// 1-based access.
    pub fn entry(&self, i: usize) -> &DivisorClass {
        &self.entries[i - 1]
    }

    pub fn self_intersections(&self) -> Vec<i64> {
        self.entries.iter().map(DivisorClass::square).collect()
    }

    pub fn validate(&self) -> Validation {
        let n = self.len();
        let mut violations = Vec::new();
        let expected = self.lattice.rank() + 2;
        if n != expected {
            violations.push(ToricViolation::Length { expected, actual: n });
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let product = self.entries[i].dot(&self.entries[j]);
                if adjacent && product != 1 {
                    violations.push(ToricViolation::Adjacent { i: i + 1, j: j + 1, product });
                } else if !adjacent && product != 0 {
                    violations.push(ToricViolation::NonAdjacent { i: i + 1, j: j + 1, product });
                }
            }
        }
        let mut sum = self.lattice.zero();
        for a in &self.entries {
            sum = &sum + a;
        }
        let minus_k = -self.lattice.canonical();
        if sum != minus_k {
            violations.push(ToricViolation::Sum {
                actual: sum.into_coords(),
                expected: minus_k.into_coords(),
            });
        }
        Validation { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_valid()
    }

    fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        match v.violations.first() {
            None => Ok(()),
            Some(first) => domain(format!("not a toric system: {first}")),
        }
    }

    /// `A_k + .. + A_l` over the cyclic segment; `l = k - 1` gives the full
    /// cycle, which sums to `-K` on a valid system.
    pub fn segment_sum(&self, k: usize, l: usize) -> Result<DivisorClass> {
        let n = self.len();
        if !(1..=n).contains(&k) || !(1..=n).contains(&l) {
            return domain(format!("segment [{k}..{l}] out of range 1..{n}"));
        }
        Ok(self.sum_of(Segment::new(k, l)))
    }

    fn sum_of(&self, seg: Segment) -> DivisorClass {
        let mut sum = self.lattice.zero();
        for p in seg.positions(self.len()) {
            sum = &sum + &self.entries[p];
        }
        sum
    }

    /// Square of a segment sum from the entry squares alone:
    /// `A_{k..l}^2 + 2 = sum (A_i^2 + 2)`.
    pub fn segment_square(&self, seg: Segment) -> i64 {
        let sq = self.self_intersections();
        seg.positions(self.len()).map(|p| sq[p] + 2).sum::<i64>() - 2
    }

    /// `(A_{k+1}, .., A_n, A_1, .., A_k)`.
    pub fn cyclic_shift(&self, k: usize) -> ToricSystem {
        let mut entries = self.entries.clone();
        let n = entries.len();
        entries.rotate_left(k % n);
        ToricSystem { lattice: self.lattice.clone(), entries }
    }

    /// `(A_{n-1}, .., A_1, A_n)`.
    pub fn reverse_symmetry(&self) -> ToricSystem {
        let n = self.len();
        let mut entries: Vec<DivisorClass> = self.entries[..n - 1].iter().rev().cloned().collect();
        entries.push(self.entries[n - 1].clone());
        ToricSystem { lattice: self.lattice.clone(), entries }
    }

    /// Blow up one more point: on the lattice with `E_{n+1}` added, insert
    /// `E_{n+1}` at position `m` and subtract it from both cyclic
    /// neighbours. The squares transform by the `m`-th elementary
    /// augmentation.
    pub fn augment_blowup(&self, m: usize) -> Result<ToricSystem> {
        let points = match self.lattice.blown_up_points() {
            Some(p) if p < MAX_BLOWUP_POINTS => p,
            Some(p) => return domain(format!("cannot blow up beyond {MAX_BLOWUP_POINTS} points (have {p})")),
            None => return domain(format!("lattice {} is not a blow-up of the plane", self.lattice.id())),
        };
        let len = self.len();
        if m < 1 || m > len + 1 {
            return domain(format!("augmentation position {m} out of range 1..{}", len + 1));
        }
        let target = PicardLattice::blowup(points + 1)?;
        let embed = |d: &DivisorClass| {
            let mut c = d.coords().to_vec();
            c.push(0);
            target.class(c).expect("rank matches")
        };
        let e = target.basis(points + 1);
        let mut entries: Vec<DivisorClass> = self.entries.iter().map(embed).collect();
        entries.insert(m - 1, e.clone());
        let n = entries.len();
        let before = (m - 1 + n - 1) % n;
        let after = m % n;
        entries[before] = &entries[before] - &e;
        entries[after] = &entries[after] - &e;
        ToricSystem::new(&target, entries)
    }

    /// Whether the entries span the lattice over the integers: the
    /// invariant factors of the coordinate matrix are all 1.
    pub fn generates_picard(&self) -> bool {
        let rows: Vec<Vec<i64>> = self.entries.iter().map(|d| d.coords().to_vec()).collect();
        let factors = smith_invariants(rows);
        factors.len() == self.lattice.rank() && factors.iter().all(|&f| f == 1)
    }
}

/// Nonzero invariant factors of an integer matrix, by Smith reduction.
pub fn smith_invariants(mut m: Vec<Vec<i64>>) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut pivot = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && pivot.map_or(true, |(_, _, best): (usize, usize, i64)| v.abs() < best) {
                    pivot = Some((i, j, v.abs()));
                }
            }
        }
        let Some((pi, pj, _)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t] / m[t][t];
            if q != 0 {
                for j in t..cols {
                    m[i][j] -= q * m[t][j];
                }
            }
            clean &= m[i][t] == 0;
        }
        for j in t + 1..cols {
            let q = m[t][j] / m[t][t];
            if q != 0 {
                for row in m.iter_mut().skip(t) {
                    row[j] -= q * row[t];
                }
            }
            clean &= m[t][j] == 0;
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest of the block
        let p = m[t][t];
        let bad = (t + 1..rows).find_map(|i| (t + 1..cols).find(|&j| m[i][j] % p != 0).map(|j| (i, j)));
        if let Some((i, _)) = bad {
            for j in t..cols {
                m[t][j] += m[i][j];
            }
            continue;
        }
        out.push(p.abs());
        t += 1;
    }
    out
}

/// Checks every proper cyclic segment through the lo/slo criteria.
pub fn exceptionality_naive(x: &SurfaceModel, ts: &ToricSystem) -> Result<ExceptionalityReport> {
    check_pair(x, ts)?;
    let n = ts.len();
    let mut witnesses = Vec::new();
    let (mut exceptional, mut strong_ok, mut cyclic_ok) = (true, true, true);
    let segments = cyclic_segments(n);
    for seg in &segments {
        let d = ts.sum_of(*seg);
        let status = x.lo_slo_status(&d).map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("segment {seg}: {msg}")),
            other => other,
        })?;
        if !status.lo {
            exceptional = false;
            witnesses.push(Witness { segment: *seg, violated: Violated::Lo, square: d.square() });
        } else if !status.slo {
            cyclic_ok = false;
            if seg.is_linear(n) {
                strong_ok = false;
            }
            witnesses.push(Witness { segment: *seg, violated: Violated::Slo, square: d.square() });
        }
    }
    Ok(ExceptionalityReport {
        exceptional,
        strong: exceptional && strong_ok,
        cyclic_strong: exceptional && cyclic_ok,
        witnesses,
        segments_checked: segments.len(),
        route: CheckRoute::AllSegments,
    })
}

/// Exceptionality from the (-2)-segments only. Requires `A_i^2 >= -2` for
/// `i < n`; otherwise delegates to [`exceptionality_naive`].
///
/// With all squares `>= -2`, a system is exceptional iff no (-2)-segment is
/// anti-effective and cyclic strong iff no (-2)-segment is effective or
/// anti-effective. When only `A_n^2 < -2`, the wrap segments through `n`
/// of square `A_n^2` must also be left-orthogonal, and the system cannot
/// be cyclic strong since `A_n` itself is not slo.
pub fn exceptionality_fast(x: &SurfaceModel, ts: &ToricSystem) -> Result<ExceptionalityReport> {
    check_pair(x, ts)?;
    let n = ts.len();
    let sq = ts.self_intersections();
    if sq[..n - 1].iter().any(|&a| a < -2) {
        return exceptionality_naive(x, ts);
    }
    let tail_ok = sq[n - 1] >= -2;
    if tail_ok && x.simple_roots().is_empty() {
        return Ok(ExceptionalityReport {
            exceptional: true,
            strong: true,
            cyclic_strong: true,
            witnesses: Vec::new(),
            segments_checked: 0,
            route: CheckRoute::DelPezzo,
        });
    }
    let mut witnesses = Vec::new();
    let mut checked = 0;
    let (mut exceptional, mut strong_ok, mut cyclic_ok) = (true, true, tail_ok);
    for seg in cyclic_segments(n) {
        let square = ts.segment_square(seg);
        let linear = seg.is_linear(n);
        if square == -2 && (tail_ok || linear) {
            checked += 1;
            let d = ts.sum_of(seg);
            if x.is_effective_root(&-&d) {
                exceptional = false;
                witnesses.push(Witness { segment: seg, violated: Violated::Lo, square });
            } else if x.is_effective_root(&d) {
                cyclic_ok = false;
                if linear {
                    strong_ok = false;
                }
                witnesses.push(Witness { segment: seg, violated: Violated::Slo, square });
            }
        } else if !tail_ok && seg.wraps() && square == sq[n - 1] {
            checked += 1;
            let d = ts.sum_of(seg);
            if x.is_effective(&-&d) {
                exceptional = false;
                witnesses.push(Witness { segment: seg, violated: Violated::Lo, square });
            }
        }
    }
    if !tail_ok && exceptional {
        witnesses.push(Witness { segment: Segment::new(n, n), violated: Violated::Slo, square: sq[n - 1] });
        witnesses.sort_by_key(|w| w.segment);
    }
    Ok(ExceptionalityReport {
        exceptional,
        strong: exceptional && strong_ok,
        cyclic_strong: exceptional && cyclic_ok,
        witnesses,
        segments_checked: checked,
        route: CheckRoute::MinusTwoSegments,
    })
}

fn check_pair(x: &SurfaceModel, ts: &ToricSystem) -> Result<()> {
    if x.lattice().id() != ts.lattice().id() {
        return domain(format!(
            "system is on lattice {}, surface is on {}",
            ts.lattice().id(),
            x.lattice().id()
        ));
    }
    ts.require_valid()
}

/// Every proper cyclic segment has square in `[-2, d - 2]`.
pub fn check_segment_bounds(ts: &ToricSystem, d: i64) -> bool {
    cyclic_segments(ts.len()).into_iter().all(|seg| {
        let s = ts.sum_of(seg).square();
        (-2..=d - 2).contains(&s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_surface;

    fn bl(n: usize) -> Arc<PicardLattice> {
        PicardLattice::blowup(n).unwrap()
    }

    fn example_system() -> ToricSystem {
        ToricSystem::parse(
            &bl(3),
            &["L - E1 - E2", "E2", "L - E2 - E3", "E3", "L - E1 - E3", "E1"],
        )
        .unwrap()
    }

    #[test]
    fn from_collection_examples() {
        let p2 = bl(0);
        let coll: Vec<DivisorClass> = ["0", "L", "2L"].iter().map(|s| p2.parse_class(s).unwrap()).collect();
        let ts = ToricSystem::from_collection(&coll).unwrap();
        assert_eq!(ts, ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap());
        assert!(ts.is_valid());

        let zeros = vec![bl(2).zero(); 5];
        assert!(!ToricSystem::from_collection(&zeros).unwrap().is_valid());

        let l1 = bl(1);
        let coll: Vec<DivisorClass> =
            ["E1", "L", "L + E1", "2L"].iter().map(|s| l1.parse_class(s).unwrap()).collect();
        let ts = ToricSystem::from_collection(&coll).unwrap();
        assert_eq!(ts, ToricSystem::parse(&l1, &["L - E1", "E1", "L - E1", "L"]).unwrap());

        assert!(matches!(ToricSystem::from_collection(&coll[..3]), Err(Error::Domain(_))));
    }

    #[test]
    fn to_collection_examples() {
        let p2 = bl(0);
        let ts = ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap();
        let coll = ts.to_collection(&p2.zero()).unwrap();
        let text: Vec<String> = coll.iter().map(|d| d.to_string()).collect();
        assert_eq!(text, ["0", "L", "2L"]);
        let shifted = ts.to_collection(&p2.basis(0)).unwrap();
        for (a, b) in coll.iter().zip(&shifted) {
            assert_eq!(&(b - a), &p2.basis(0));
        }
        assert_eq!(ToricSystem::from_collection(&shifted).unwrap(), ts);
    }

    #[test]
    fn validate_examples() {
        let ts = example_system();
        assert!(ts.is_valid());
        assert!(ts.cyclic_shift(1).is_valid());
        let bad = ToricSystem::parse(&bl(0), &["L", "L", "2L"]).unwrap();
        let v = bad.validate();
        assert!(!v.is_valid());
        assert!(v.violations.iter().any(|x| matches!(x, ToricViolation::Sum { .. })));
        assert!(v.violations.iter().any(|x| matches!(x, ToricViolation::Adjacent { .. })));
    }

    #[test]
    fn segment_sums() {
        let p2 = bl(0);
        let ts = ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap();
        assert_eq!(ts.segment_sum(2, 1).unwrap(), -p2.canonical());
        assert_eq!(ts.segment_sum(2, 2).unwrap(), p2.basis(0));
        let two = ts.segment_sum(1, 2).unwrap();
        assert_eq!(two, p2.parse_class("2L").unwrap());
        assert_eq!(two.square() + 2, (1 + 2) + (1 + 2));
        assert!(ts.segment_sum(0, 2).is_err());
        assert!(ts.segment_sum(1, 4).is_err());
    }

    #[test]
    fn segment_enumeration() {
        assert_eq!(cyclic_segments(4).len(), 12);
        assert_eq!(linear_segments(4).len(), 6);
        let s = Segment::new(3, 1);
        assert_eq!(s.len(4), 3);
        assert_eq!(s.positions(4).collect::<Vec<_>>(), vec![2, 3, 0]);
        assert!(s.wraps());
        assert!(!Segment::new(2, 4).is_linear(4));
        assert!(Segment::new(2, 3).is_linear(4));
    }

    #[test]
    fn naive_examples() {
        let p2 = catalog_surface("P2").unwrap();
        let ts = ToricSystem::parse(p2.lattice(), &["L", "L", "L"]).unwrap();
        assert_eq!(exceptionality_naive(&p2, &ts).unwrap().flags(), (true, true, true));

        // three collinear points: L - E1 - E2 - E3 is a (-2)-curve
        let l = bl(3);
        let y = SurfaceModel::build(&l, vec![l.parse_class("L - E1 - E2 - E3").unwrap()]).unwrap();
        let r = exceptionality_naive(&y, &example_system()).unwrap();
        assert!(r.cyclic_strong);
    }

    #[test]
    fn effective_root_segment_breaks_strong() {
        let x = catalog_surface("X5_A1").unwrap();
        let l = x.lattice().clone();
        // the degree-5 table system with E2 and E4 exchanged, so that
        // A_3 = E1 - E2 is the (-2)-curve
        let ts = ToricSystem::parse(
            &l,
            &["L - E1 - E2 - E3", "E2", "E1 - E2", "L - E1 - E4", "E4", "L - E3 - E4", "E3"],
        )
        .unwrap();
        assert!(ts.is_valid());
        let r = exceptionality_naive(&x, &ts).unwrap();
        assert!(r.exceptional);
        assert!(!r.strong);
        assert!(r.witnesses.contains(&Witness {
            segment: Segment::new(3, 3),
            violated: Violated::Slo,
            square: -2
        }));
        assert_eq!(exceptionality_fast(&x, &ts).unwrap().flags(), r.flags());
    }

    #[test]
    fn fast_agrees_and_del_pezzo_shortcut() {
        let dp6 = catalog_surface("dP6").unwrap();
        let ts = example_system();
        let fast = exceptionality_fast(&dp6, &ts).unwrap();
        assert_eq!(fast.flags(), (true, true, true));
        assert_eq!(fast.segments_checked, 0);
        assert_eq!(fast.route, CheckRoute::DelPezzo);
        assert_eq!(exceptionality_naive(&dp6, &ts).unwrap().flags(), fast.flags());
    }

    #[test]
    fn fast_handles_negative_last_entry() {
        // squares (0, 3, 0, -3): A_4^2 = -3 exercises the wrap check
        let f1 = catalog_surface("F1").unwrap();
        let l = f1.lattice().clone();
        let ts = ToricSystem::parse(&l, &["L - E1", "2L - E1", "L - E1", "-L + 2E1"]).unwrap();
        assert!(ts.is_valid());
        assert_eq!(ts.self_intersections(), vec![0, 3, 0, -3]);
        let naive = exceptionality_naive(&f1, &ts).unwrap();
        let fast = exceptionality_fast(&f1, &ts).unwrap();
        assert_eq!(naive.flags(), (true, true, false));
        assert_eq!(naive.flags(), fast.flags());
        assert_eq!(fast.route, CheckRoute::MinusTwoSegments);
    }

    #[test]
    fn segment_bounds() {
        let p2 = bl(0);
        let ts = ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap();
        assert!(check_segment_bounds(&ts, 9));
        let bad = ToricSystem::parse(&p2, &["L", "L", "3L"]).unwrap();
        assert!(!check_segment_bounds(&bad, 9));
    }

    #[test]
    fn generates() {
        let p2 = bl(0);
        assert!(ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap().generates_picard());
        assert!(!ToricSystem::parse(&p2, &["2L", "2L", "-4L"]).unwrap().generates_picard());
        assert!(example_system().generates_picard());
        assert_eq!(smith_invariants(vec![vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(smith_invariants(vec![vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
    }

    #[test]
    fn augment_examples() {
        let p2 = bl(0);
        let ts = ToricSystem::parse(&p2, &["L", "L", "L"]).unwrap();
        let up = ts.augment_blowup(2).unwrap();
        assert_eq!(up, ToricSystem::parse(&bl(1), &["L - E1", "E1", "L - E1", "L"]).unwrap());
        assert_eq!(up.self_intersections(), vec![0, -1, 0, 1]);
        assert!(up.is_valid());
        assert!(ts.augment_blowup(0).is_err());
        assert!(ts.augment_blowup(5).is_err());
        let f0 = PicardLattice::hirzebruch(crate::lattice::HirzebruchKind::F0);
        let t0 = ToricSystem::parse(&f0, &["H1", "H2", "H1", "H2"]).unwrap();
        assert!(t0.augment_blowup(1).is_err());
    }

    #[test]
    fn shifts_and_symmetry() {
        let ts = example_system();
        assert_eq!(ts.cyclic_shift(ts.len()), ts);
        assert_eq!(ts.reverse_symmetry().reverse_symmetry(), ts);
        assert!(ts.reverse_symmetry().is_valid());
    }

    #[test]
    fn json_round_trip() {
        let ts = example_system();
        let text = serde_json::to_string(&ts).unwrap();
        assert!(text.starts_with(r#"{"lattice":"Bl3","entries":[[1,-1,-1,0]"#));
        let back: ToricSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, ts);
        assert!(serde_json::from_str::<ToricSystem>(r#"{"lattice":"P2","entries":[[1],[1]]}"#).is_err());
    }
}
