//! Weak del Pezzo surfaces modelled as a Picard lattice plus the
//! configuration of irreducible (-2)-curves.
//!
//! Effectivity is decided as membership in the monoid generated by a fixed
//! list of curves (see [`SurfaceModel::monoid_generators`]). Membership is
//! found by a depth-first search bounded by the intersection number with
//! an ample class.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, internal, Result};
use crate::lattice::{DivisorClass, LatticeId, PicardLattice};

/// Left-orthogonality status of a numerically lo class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LoSloStatus {
    pub lo: bool,
    pub slo: bool,
}

/// What the effectivity oracle can say about the cohomology of `O(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CohomologyProfile {
    pub h0_positive: bool,
    pub h2_positive: bool,
    /// Exact `h^1` when both `h^0` and `h^2` vanish, otherwise unknown.
    pub h1: Option<i64>,
}

/// Result of checking that every root is effective, anti-effective or slo,
/// and exactly one of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootPartition {
    pub roots: usize,
    pub effective: usize,
    pub anti_effective: usize,
    pub slo: usize,
    pub lo: usize,
    /// Roots that break the partition, in canonical order.
    pub offenders: Vec<Vec<i64>>,
}

impl RootPartition {
    pub fn holds(&self) -> bool {
        self.offenders.is_empty()
            && self.effective + self.anti_effective + self.slo == self.roots
            && self.lo == self.effective + self.slo
    }
}

/// ADE type of a set of simple roots, e.g. `2A1+A3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DynkinType {
    /// Components as (letter, rank), sorted.
    pub components: Vec<(char, usize)>,
}

impl DynkinType {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.1).sum()
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("-");
        }
        let mut counts: BTreeMap<(char, usize), usize> = BTreeMap::new();
        for c in &self.components {
            *counts.entry(*c).or_default() += 1;
        }
        let parts: Vec<String> = counts
            .into_iter()
            .map(|((letter, rank), k)| {
                if k == 1 {
                    format!("{letter}{rank}")
                } else {
                    format!("{k}{letter}{rank}")
                }
            })
            .collect();
        f.write_str(&parts.join("+"))
    }
}

/// Classifies the Dynkin diagram of `roots`, whose pairwise products must
/// lie in `{0, 1}`. Returns `None` when the diagram is not of ADE type.
pub fn dynkin_type(roots: &[DivisorClass]) -> Option<DynkinType> {
    let n = roots.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            match roots[i].dot(&roots[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                _ => return None,
            }
        }
    }
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            for &w in &adj[comp[k]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            k += 1;
        }
        let edges: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
        if edges + 1 != comp.len() {
            return None;
        }
        let branch: Vec<usize> = comp.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
        let size = comp.len();
        match branch.as_slice() {
            [] => components.push(('A', size)),
            [center] if adj[*center].len() == 3 => {
                // arm lengths from the branch vertex
                let mut arms: Vec<usize> = adj[*center]
                    .iter()
                    .map(|&first| {
                        let (mut prev, mut cur, mut len) = (*center, first, 1);
                        loop {
                            let next: Vec<usize> = adj[cur].iter().copied().filter(|&w| w != prev).collect();
                            match next.as_slice() {
                                [] => break len,
                                [w] => {
                                    prev = cur;
                                    cur = *w;
                                    len += 1;
                                }
                                _ => break usize::MAX,
                            }
                        }
                    })
                    .collect();
                arms.sort_unstable();
                match arms.as_slice() {
                    [1, 1, _] => components.push(('D', size)),
                    [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => components.push(('E', size)),
                    _ => return None,
                }
            }
            _ => return None,
        }
    }
    components.sort_unstable();
    Some(DynkinType { components })
}

/// Simple roots of a root system for the chamber of a generic linear
/// functional: the positive roots that are not a sum of two positive roots.
/// `None` when the functional vanishes on some root.
pub fn simple_system(roots: &[DivisorClass]) -> Option<Vec<DivisorClass>> {
    // base-13 weights separate all coordinate vectors with entries in [-6, 6]
    let weight = |d: &DivisorClass| -> i64 {
        d.coords().iter().rev().fold(0i64, |acc, &c| acc * 13 + c)
    };
    if roots.iter().any(|r| weight(r) == 0 || r.coords().iter().any(|c| c.abs() > 6)) {
        return None;
    }
    let positive: Vec<&DivisorClass> = roots.iter().filter(|r| weight(r) > 0).collect();
    let set: HashSet<&[i64]> = positive.iter().map(|r| r.coords()).collect();
    let mut simple: Vec<DivisorClass> = positive
        .iter()
        .filter(|p| !positive.iter().any(|q| set.contains((**p - *q).coords())))
        .map(|p| (*p).clone())
        .collect();
    simple.sort();
    Some(simple)
}

fn isqrt(x: i64) -> i64 {
    if x < 0 {
        return -1;
    }
    let (mut r, mut y) = (x, (x + 1) / 2);
    while y < r {
        r = y;
        y = (r + x / r) / 2;
    }
    r
}

/// All classes `D` with `D^2 = r` and `D.K = -2 - r`, in canonical order.
pub fn enumerate_r_classes(lattice: &Arc<PicardLattice>, r: i64) -> Vec<DivisorClass> {
    let mut out: Vec<Vec<i64>> = match lattice.id() {
        LatticeId::Blowup(n) => blowup_r_classes(n as usize, r),
        LatticeId::F0 => f0_r_classes(r),
        LatticeId::F2 => f2_r_classes(r),
    };
    out.sort();
    out.dedup();
    out.into_iter().map(|c| lattice.class(c).expect("rank matches")).collect()
}

// D = aL - sum b_i E_i with sum b_i = 3a - r - 2 and sum b_i^2 = a^2 - r.
fn blowup_r_classes(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let s_of = |a: i64| 3 * a - r - 2;
    let q_of = |a: i64| a * a - r;
    if n == 0 {
        // 3a = r + 2 and a^2 = r
        if (r + 2) % 3 == 0 {
            let a = (r + 2) / 3;
            if a * a == r {
                out.push(vec![a]);
            }
        }
        return out;
    }
    let n_i = n as i64;
    // Cauchy-Schwarz: s^2 <= n q, a convex quadratic in a with leading
    // coefficient 9 - n > 0; its integer solutions form an interval around
    // the vertex 3(r+2)/(9-n).
    let feasible = |a: i64| {
        let s = s_of(a);
        s * s <= n_i * q_of(a)
    };
    let vertex = (3 * (r + 2)).div_euclid(9 - n_i);
    let mut a_values = Vec::new();
    let mut a = vertex;
    while feasible(a) {
        a_values.push(a);
        a -= 1;
    }
    let mut a = vertex + 1;
    while feasible(a) {
        a_values.push(a);
        a += 1;
    }
    let mut b = vec![0i64; n];
    for a in a_values {
        fill_b(&mut b, 0, s_of(a), q_of(a), &mut |bs| {
            let mut coords = Vec::with_capacity(n + 1);
            coords.push(a);
            coords.extend(bs.iter().map(|&x| -x));
            out.push(coords);
        });
    }
    out
}

fn fill_b(b: &mut [i64], idx: usize, rem_s: i64, rem_q: i64, emit: &mut impl FnMut(&[i64])) {
    let left = (b.len() - idx) as i64;
    if left == 0 {
        if rem_s == 0 && rem_q == 0 {
            emit(b);
        }
        return;
    }
    if rem_q < 0 || rem_s * rem_s > left * rem_q || (rem_s - rem_q) % 2 != 0 {
        return;
    }
    let bound = isqrt(rem_q);
    for x in -bound..=bound {
        b[idx] = x;
        fill_b(b, idx + 1, rem_s - x, rem_q - x * x, emit);
    }
    b[idx] = 0;
}

// D = x H1 + y H2: D^2 = 2xy, D.K = -2(x + y).
fn f0_r_classes(r: i64) -> Vec<Vec<i64>> {
    if r % 2 != 0 {
        return Vec::new();
    }
    let s = (r + 2) / 2;
    let disc = s * s - 2 * r;
    let root = isqrt(disc);
    if root < 0 || root * root != disc || (s + root) % 2 != 0 {
        return Vec::new();
    }
    let x1 = (s + root) / 2;
    let x2 = (s - root) / 2;
    vec![vec![x1, s - x1], vec![x2, s - x2]]
}

// D = x F + y S: D^2 = 2xy + 2y^2, D.K = -2x - 4y.
fn f2_r_classes(r: i64) -> Vec<Vec<i64>> {
    if r % 2 != 0 {
        return Vec::new();
    }
    let s = (r + 2) / 2; // x + 2y
    // 2y^2 - 2sy + r = 0
    let disc = 4 * s * s - 8 * r;
    let root = isqrt(disc);
    if root < 0 || root * root != disc {
        return Vec::new();
    }
    let mut out = Vec::new();
    for num in [2 * s + root, 2 * s - root] {
        if num % 4 == 0 {
            let y = num / 4;
            out.push(vec![s - 2 * y, y]);
        }
    }
    out
}

/// A weak del Pezzo surface: lattice, irreducible (-2)-curves, and caches
/// derived from them at construction.
#[derive(Debug, Clone)]
pub struct SurfaceModel {
    name: Option<String>,
    lattice: Arc<PicardLattice>,
    simple_roots: Vec<DivisorClass>,
    dynkin: DynkinType,
    roots: Vec<DivisorClass>,
    effective_roots: Vec<DivisorClass>,
    effective_root_set: HashSet<Vec<i64>>,
    minus1_classes: Vec<DivisorClass>,
    irreducible_minus1: Vec<DivisorClass>,
    generators: Vec<DivisorClass>,
    ample_probe: DivisorClass,
}

impl SurfaceModel {
    /// Builds the model and all caches. Fails with a domain error when the
    /// simple roots are not (-2)-classes forming an ADE configuration.
    pub fn build(lattice: &Arc<PicardLattice>, simple_roots: Vec<DivisorClass>) -> Result<Self> {
        let mut simple_roots = simple_roots;
        simple_roots.sort();
        for (i, c) in simple_roots.iter().enumerate() {
            if !c.same_lattice(&lattice.zero()) {
                return domain(format!("simple root {c:?} is not on lattice {}", lattice.id()));
            }
            if c.square() != -2 || c.dot_canonical() != 0 {
                return domain(format!("simple root {c} is not a (-2)-class"));
            }
            if i > 0 && simple_roots[i - 1] == *c {
                return domain(format!("simple root {c} listed twice"));
            }
        }
        for (i, a) in simple_roots.iter().enumerate() {
            for b in &simple_roots[i + 1..] {
                let p = a.dot(b);
                if p != 0 && p != 1 {
                    return domain(format!("simple roots {a} and {b} meet in {p}, expected 0 or 1"));
                }
            }
        }
        let dynkin = match dynkin_type(&simple_roots) {
            Some(t) => t,
            None => return domain("simple roots do not form an ADE configuration"),
        };
        match lattice.id() {
            LatticeId::F2 => {
                let neg = lattice.parse_class("S - 2F")?;
                if simple_roots != [neg] {
                    return domain("F2 carries exactly one (-2)-curve, S - 2F");
                }
            }
            LatticeId::F0 | LatticeId::Blowup(0) | LatticeId::Blowup(1) if !simple_roots.is_empty() => {
                return domain(format!("lattice {} carries no (-2)-curves", lattice.id()));
            }
            _ => {}
        }

        let roots = enumerate_r_classes(lattice, -2);
        let effective_roots = effective_root_closure(&roots, &simple_roots);
        let effective_root_set: HashSet<Vec<i64>> =
            effective_roots.iter().map(|c| c.coords().to_vec()).collect();
        if effective_roots.iter().any(|c| effective_root_set.contains((-c).coords())) {
            return domain("simple roots generate a root and its negative");
        }
        let minus1_classes = enumerate_r_classes(lattice, -1);
        let irreducible_minus1: Vec<DivisorClass> = minus1_classes
            .iter()
            .filter(|d| simple_roots.iter().all(|c| d.dot(c) >= 0))
            .cloned()
            .collect();

        let generators = match lattice.id() {
            LatticeId::Blowup(0) => vec![lattice.parse_class("L")?],
            LatticeId::F0 => vec![lattice.parse_class("H1")?, lattice.parse_class("H2")?],
            LatticeId::F2 => vec![lattice.parse_class("F")?, lattice.parse_class("S - 2F")?],
            LatticeId::Blowup(1) => vec![lattice.parse_class("E1")?, lattice.parse_class("L - E1")?],
            LatticeId::Blowup(_) => {
                let mut g: BTreeSet<DivisorClass> = irreducible_minus1.iter().cloned().collect();
                g.extend(simple_roots.iter().cloned());
                if lattice.degree() == 1 {
                    // -K is effective on degree 1 but meets every (-1)-curve
                    // in 1 with (-K)^2 = 1, so it is not a sum of them.
                    g.insert(-lattice.canonical());
                }
                g.into_iter().collect()
            }
        };

        let ample_probe = find_ample_probe(lattice, &effective_roots, &generators)?;

        Ok(SurfaceModel {
            name: None,
            lattice: lattice.clone(),
            simple_roots,
            dynkin,
            roots,
            effective_roots,
            effective_root_set,
            minus1_classes,
            irreducible_minus1,
            generators,
            ample_probe,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn lattice(&self) -> &Arc<PicardLattice> {
        &self.lattice
    }

    pub fn degree(&self) -> i64 {
        self.lattice.degree()
    }

    pub fn simple_roots(&self) -> &[DivisorClass] {
        &self.simple_roots
    }

    pub fn dynkin_type(&self) -> &DynkinType {
        &self.dynkin
    }

    /// `R(X)`: all (-2)-classes.
    pub fn root_system(&self) -> &[DivisorClass] {
        &self.roots
    }

    /// `R^eff(X)`: effective roots, in canonical order.
    pub fn effective_roots(&self) -> &[DivisorClass] {
        &self.effective_roots
    }

    pub fn is_effective_root(&self, d: &DivisorClass) -> bool {
        d.same_lattice(&self.ample_probe) && self.effective_root_set.contains(d.coords())
    }

    /// All (-1)-classes.
    pub fn minus1_classes(&self) -> &[DivisorClass] {
        &self.minus1_classes
    }

    /// (-1)-classes meeting every irreducible (-2)-curve non-negatively.
    pub fn irreducible_minus1(&self) -> &[DivisorClass] {
        &self.irreducible_minus1
    }

    /// Generators of the effective monoid:
    /// P2: `L`; F0: `H1, H2`; F2: `F, S - 2F`; one blown-up point:
    /// `E1, L - E1`; otherwise the irreducible (-1)-curves and the simple
    /// roots, plus `-K` in degree 1.
    pub fn monoid_generators(&self) -> &[DivisorClass] {
        &self.generators
    }

    pub fn ample_probe(&self) -> &DivisorClass {
        &self.ample_probe
    }

    /// Domain error unless `d` lives on this surface's lattice.
    pub fn check_lattice(&self, d: &DivisorClass) -> Result<()> {
        if d.same_lattice(&self.ample_probe) {
            Ok(())
        } else {
            domain(format!(
                "class is on lattice {}, surface is on {}",
                d.lattice().id(),
                self.lattice.id()
            ))
        }
    }

    /// Monoid membership of `d`.
    ///
    /// # Panics
    /// If `d` is on a different lattice.
    pub fn is_effective(&self, d: &DivisorClass) -> bool {
        assert!(d.same_lattice(&self.ample_probe), "class and surface are on different lattices");
        let memo = RefCell::new(HashMap::new());
        self.effective_search(d.coords().to_vec(), &memo)
    }

    fn effective_search(&self, d: Vec<i64>, memo: &RefCell<HashMap<Vec<i64>, bool>>) -> bool {
        if d.iter().all(|&x| x == 0) {
            return true;
        }
        let form = |a: &[i64], b: &[i64]| self.lattice.form(a, b);
        let budget = form(&d, self.ample_probe.coords());
        if budget <= 0 {
            return false;
        }
        if let Some(&known) = memo.borrow().get(&d) {
            return known;
        }
        let mut answer = None;
        for g in &self.generators {
            let dg = form(&d, g.coords());
            if dg < 0 {
                if g.square() >= 0 {
                    // every generator meets g non-negatively
                    answer = Some(false);
                } else {
                    // distinct generators meet g non-negatively, so a
                    // representation of d must use g
                    let next: Vec<i64> = d.iter().zip(g.coords()).map(|(a, b)| a - b).collect();
                    answer = Some(self.effective_search(next, memo));
                }
                break;
            }
        }
        let answer = answer.unwrap_or_else(|| {
            self.generators.iter().any(|g| {
                let next: Vec<i64> = d.iter().zip(g.coords()).map(|(a, b)| a - b).collect();
                self.effective_search(next, memo)
            })
        });
        memo.borrow_mut().insert(d, answer);
        answer
    }

    /// lo/slo status of a numerically lo class, dispatched on `r = D^2`.
    pub fn lo_slo_status(&self, d: &DivisorClass) -> Result<LoSloStatus> {
        self.check_lattice(d)?;
        if !d.is_numerically_lo() {
            return domain(format!("{d} is not numerically left-orthogonal"));
        }
        let r = d.square();
        let deg = self.degree();
        let status = if r <= -3 {
            LoSloStatus { lo: !self.is_effective(&-d), slo: false }
        } else if r == -2 {
            let lo = !self.is_effective(&-d);
            LoSloStatus { lo, slo: lo && !self.is_effective(d) }
        } else if r >= deg - 2 {
            let ok = !self.is_effective(&(&self.lattice.canonical() + d));
            LoSloStatus { lo: ok, slo: ok }
        } else {
            LoSloStatus { lo: true, slo: true }
        };
        Ok(status)
    }

    pub fn cohomology_profile(&self, d: &DivisorClass) -> Result<CohomologyProfile> {
        self.check_lattice(d)?;
        let h0_positive = self.is_effective(d);
        let h2_positive = self.is_effective(&(&self.lattice.canonical() - d));
        let h1 = if !h0_positive && !h2_positive {
            let h1 = -d.euler_char()?;
            if h1 < 0 {
                return internal(format!(
                    "h^1({d}) would be {h1}: neither D nor K - D effective but chi(D) > 0"
                ));
            }
            Some(h1)
        } else {
            None
        };
        Ok(CohomologyProfile { h0_positive, h2_positive, h1 })
    }

    /// Checks `R = R^eff + (-R^eff) + R^slo` (disjoint) and
    /// `R^lo = R^eff + R^slo`, and that the effectivity oracle agrees with
    /// the effective-root closure on every root.
    pub fn verify_root_partition(&self) -> Result<RootPartition> {
        let mut report = RootPartition {
            roots: self.roots.len(),
            effective: 0,
            anti_effective: 0,
            slo: 0,
            lo: 0,
            offenders: Vec::new(),
        };
        for r in &self.roots {
            let eff = self.is_effective_root(r);
            let anti = self.is_effective_root(&-r);
            let status = self.lo_slo_status(r)?;
            report.effective += eff as usize;
            report.anti_effective += anti as usize;
            report.slo += status.slo as usize;
            report.lo += status.lo as usize;
            let exactly_one = (eff as u8 + anti as u8 + status.slo as u8) == 1;
            let lo_split = status.lo == (eff || status.slo);
            let oracle = self.is_effective(r) == eff && self.is_effective(&-r) == anti;
            if !(exactly_one && lo_split && oracle) {
                report.offenders.push(r.coords().to_vec());
            }
        }
        Ok(report)
    }
}

/// Positive roots of the subsystem spanned by `simple`: close under
/// addition inside `roots` until nothing new appears.
fn effective_root_closure(roots: &[DivisorClass], simple: &[DivisorClass]) -> Vec<DivisorClass> {
    let root_set: HashSet<&[i64]> = roots.iter().map(|r| r.coords()).collect();
    let mut eff: BTreeSet<DivisorClass> = simple.iter().cloned().collect();
    loop {
        let current: Vec<DivisorClass> = eff.iter().cloned().collect();
        let mut grew = false;
        for (i, a) in current.iter().enumerate() {
            for b in &current[i..] {
                let s = a + b;
                if root_set.contains(s.coords()) && eff.insert(s) {
                    grew = true;
                }
            }
        }
        if !grew {
            return eff.into_iter().collect();
        }
    }
}

/// `N(-K) + h` with `h = -(sum of effective roots)` and the least `N`
/// making the class positive on every generator and of positive square.
/// `h` meets every simple root in 2, which repairs the zero intersection
/// of `-K` with (-2)-curves.
fn find_ample_probe(
    lattice: &Arc<PicardLattice>,
    effective_roots: &[DivisorClass],
    generators: &[DivisorClass],
) -> Result<DivisorClass> {
    let mut h = lattice.zero();
    for c in effective_roots {
        h = &h - c;
    }
    let anti = -lattice.canonical();
    for n in 1..=64 {
        let probe = &(&anti * n) + &h;
        if probe.square() > 0 && generators.iter().all(|g| probe.dot(g) >= 1) {
            return Ok(probe);
        }
    }
    internal(format!("no ample probe found on lattice {}", lattice.id()))
}

/// Free-function form of [`SurfaceModel::build`].
pub fn build_surface(lattice: &Arc<PicardLattice>, simple_roots: Vec<DivisorClass>) -> Result<SurfaceModel> {
    SurfaceModel::build(lattice, simple_roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lattice::{HirzebruchKind, PicardLattice};

    fn bl(n: usize) -> Arc<PicardLattice> {
        PicardLattice::blowup(n).unwrap()
    }

    fn cls(l: &Arc<PicardLattice>, s: &str) -> DivisorClass {
        l.parse_class(s).unwrap()
    }

    fn surface(n: usize, roots: &[&str]) -> SurfaceModel {
        let l = bl(n);
        SurfaceModel::build(&l, roots.iter().map(|r| cls(&l, r)).collect()).unwrap()
    }

    // Brute-force r-class oracle: scan a coordinate box.
    fn brute_r_classes(l: &Arc<PicardLattice>, r: i64, bound: i64) -> Vec<Vec<i64>> {
        let rank = l.rank();
        let mut out = Vec::new();
        let mut v = vec![-bound; rank];
        loop {
            let d = l.class(v.clone()).unwrap();
            if d.square() == r && d.dot_canonical() == -2 - r {
                out.push(v.clone());
            }
            let mut i = 0;
            loop {
                if i == rank {
                    out.sort();
                    return out;
                }
                v[i] += 1;
                if v[i] > bound {
                    v[i] = -bound;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn r_class_enumeration_matches_brute_force() {
        let mut lattices: Vec<Arc<PicardLattice>> = (0..=4).map(bl).collect();
        lattices.push(PicardLattice::hirzebruch(HirzebruchKind::F0));
        lattices.push(PicardLattice::hirzebruch(HirzebruchKind::F2));
        for l in &lattices {
            for r in -4..=4 {
                let fast: Vec<Vec<i64>> =
                    enumerate_r_classes(l, r).into_iter().map(|d| d.into_coords()).collect();
                assert_eq!(fast, brute_r_classes(l, r, 7), "lattice {} r {r}", l.id());
            }
        }
    }

    #[test]
    fn r_class_counts() {
        assert_eq!(enumerate_r_classes(&bl(6), -2).len(), 72);
        assert_eq!(enumerate_r_classes(&bl(8), -1).len(), 240);
        assert!(enumerate_r_classes(&bl(0), -2).is_empty());
    }

    #[test]
    fn dynkin_types() {
        let l = bl(6);
        let roots: Vec<DivisorClass> = ["E1 - E2", "E2 - E3", "E4 - E5", "E5 - E6", "L - E1 - E2 - E3", "L - E4 - E5 - E6"]
            .iter()
            .map(|s| cls(&l, s))
            .collect();
        assert_eq!(dynkin_type(&roots).unwrap().to_string(), "3A2");
        let d4: Vec<DivisorClass> = ["E1 - E2", "E2 - E3", "E3 - E4", "L - E1 - E2 - E3"]
            .iter()
            .map(|s| cls(&l, s))
            .collect();
        // L-E123 extends the chain at E3-E4
        assert_eq!(dynkin_type(&d4).unwrap().to_string(), "A4");
        let d4: Vec<DivisorClass> = ["E1 - E2", "E2 - E3", "E3 - E4", "L - E1 - E2 - E5"]
            .iter()
            .map(|s| cls(&l, s))
            .collect();
        assert_eq!(dynkin_type(&d4).unwrap().to_string(), "D4");
        let e6: Vec<DivisorClass> = ["E1 - E2", "E2 - E3", "E3 - E4", "E4 - E5", "E5 - E6", "L - E1 - E2 - E3"]
            .iter()
            .map(|s| cls(&l, s))
            .collect();
        assert_eq!(dynkin_type(&e6).unwrap().to_string(), "E6");
        assert_eq!(dynkin_type(&[]).unwrap().to_string(), "-");
    }

    #[test]
    fn build_examples() {
        let dp6 = surface(3, &[]);
        assert!(dp6.effective_roots().is_empty());
        assert_eq!(dp6.irreducible_minus1().len(), 6);

        let x7 = surface(2, &["E1 - E2"]);
        assert_eq!(x7.effective_roots(), &[cls(&bl(2), "E1 - E2")]);
        let mut irr: Vec<String> = x7.irreducible_minus1().iter().map(|d| d.to_string()).collect();
        irr.sort();
        assert_eq!(irr, vec!["E2", "L - E1 - E2"]);
        for s in x7.simple_roots() {
            assert!(x7.effective_roots().contains(s));
        }
    }

    #[test]
    fn build_rejects_bad_roots() {
        let l = bl(3);
        let bad = SurfaceModel::build(&l, vec![cls(&l, "E1")]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        // E1 - E2 and E2 - E1 meet in -2 (not a simple system)
        let bad = SurfaceModel::build(&l, vec![cls(&l, "E1 - E2"), cls(&l, "E2 - E1")]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        // E1-E2, E2-E3, E1-E3 meet pairwise in -1/1 mix, not simple
        let bad = SurfaceModel::build(&l, vec![cls(&l, "E1 - E2"), cls(&l, "E2 - E3"), cls(&l, "E1 - E3")]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        let f0 = PicardLattice::hirzebruch(HirzebruchKind::F0);
        assert!(SurfaceModel::build(&f0, vec![cls(&f0, "H1 - H2")]).is_err());
        let f2 = PicardLattice::hirzebruch(HirzebruchKind::F2);
        assert!(SurfaceModel::build(&f2, vec![]).is_err());
        assert!(SurfaceModel::build(&f2, vec![cls(&f2, "S - 2F")]).is_ok());
    }

    #[test]
    fn ample_probe_invariants() {
        let cases = [
            surface(0, &[]),
            surface(1, &[]),
            surface(6, &["E1 - E2", "E2 - E3", "E3 - E4", "E4 - E5"]),
            surface(8, &[]),
        ];
        for x in &cases {
            let p = x.ample_probe();
            assert!(p.square() > 0);
            assert!(x.monoid_generators().iter().all(|g| p.dot(g) >= 1));
        }
    }

    #[test]
    fn effectivity_examples() {
        let x7 = surface(2, &["E1 - E2"]);
        assert!(x7.is_effective(&cls(&bl(2), "E1 - E2")));
        assert!(x7.is_effective(&cls(&bl(2), "E1")));
        assert!(x7.is_effective(&cls(&bl(2), "L")));
        let dp7 = surface(2, &[]);
        assert!(!dp7.is_effective(&cls(&bl(2), "E1 - E2")));
        for n in 1..=8 {
            let x = surface(n, &[]);
            assert!(!x.is_effective(&-x.lattice().basis(1)));
        }
        let dp1 = surface(8, &[]);
        assert!(dp1.is_effective(&-dp1.lattice().canonical()));
        assert!(!dp1.is_effective(&dp1.lattice().canonical()));
    }

    #[test]
    fn lo_slo_examples() {
        let dp6 = surface(3, &[]);
        let e1 = dp6.lattice().basis(1);
        assert_eq!(dp6.lo_slo_status(&e1).unwrap(), LoSloStatus { lo: true, slo: true });

        let x7 = surface(2, &["E1 - E2"]);
        let root = cls(&bl(2), "E1 - E2");
        assert_eq!(x7.lo_slo_status(&root).unwrap(), LoSloStatus { lo: true, slo: false });
        assert_eq!(x7.lo_slo_status(&-&root).unwrap(), LoSloStatus { lo: false, slo: false });

        let x = surface(3, &[]);
        let d = cls(&bl(3), "E1 - E2 - E3");
        assert_eq!(d.square(), -3);
        assert!(d.is_numerically_lo());
        assert!(!x.lo_slo_status(&d).unwrap().slo);

        assert!(matches!(x.lo_slo_status(&x.lattice().zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn cohomology_examples() {
        let p2 = surface(0, &[]);
        let zero = p2.lattice().zero();
        assert_eq!(
            p2.cohomology_profile(&zero).unwrap(),
            CohomologyProfile { h0_positive: true, h2_positive: false, h1: None }
        );
        let minus_l = cls(&bl(0), "-L");
        assert_eq!(
            p2.cohomology_profile(&minus_l).unwrap(),
            CohomologyProfile { h0_positive: false, h2_positive: false, h1: Some(0) }
        );
        let f1 = surface(1, &[]);
        assert_eq!(
            f1.cohomology_profile(&cls(&bl(1), "-E1")).unwrap(),
            CohomologyProfile { h0_positive: false, h2_positive: false, h1: Some(0) }
        );
    }

    #[test]
    fn root_partition_examples() {
        let dp6 = surface(3, &[]);
        let p = dp6.verify_root_partition().unwrap();
        assert!(p.holds());
        assert_eq!((p.roots, p.effective, p.slo), (8, 0, 8));
        let x7 = surface(2, &["E1 - E2"]);
        let p = x7.verify_root_partition().unwrap();
        assert!(p.holds());
        assert_eq!((p.roots, p.effective, p.slo), (2, 1, 0));
    }
}
