//! Admissible sequences: integer sequences reachable from `(0,k,0,-k)` by
//! elementary augmentations. They are exactly the self-intersection
//! sequences of toric systems.
//!
//! Positions are 1-based in the public API.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, internal, Result};

/// Switches for the admissibility search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleConfig {
    /// Accept `(1,1,1)` (the projective plane) as a base of length 3.
    pub length3_base: bool,
}

impl Default for AdmissibleConfig {
    fn default() -> Self {
        AdmissibleConfig { length3_base: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AugmentationStep {
    pub position: usize,
}

/// A base sequence and the augmentations that turn it into a target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPath {
    pub base: Vec<i64>,
    pub steps: Vec<AugmentationStep>,
}

impl ReductionPath {
    pub fn replay(&self) -> Result<Vec<i64>> {
        let mut seq = self.base.clone();
        for step in &self.steps {
            seq = augment(&seq, step.position)?;
        }
        Ok(seq)
    }
}

/// An admissible sequence together with a witness path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleSequence {
    pub entries: Vec<i64>,
    pub provenance: Option<ReductionPath>,
}

impl AdmissibleSequence {
    pub fn certify(seq: &[i64], config: AdmissibleConfig) -> Option<Self> {
        reduction_path_with(seq, config).map(|p| AdmissibleSequence {
            entries: seq.to_vec(),
            provenance: Some(p),
        })
    }

    /// Sum invariant holds and the provenance, if any, replays to the entries.
    pub fn verify(&self) -> bool {
        let n = self.entries.len() as i64;
        let sum_ok = self.entries.iter().sum::<i64>() == 12 - 3 * n;
        let path_ok = match &self.provenance {
            Some(p) => p.replay().ok().as_deref() == Some(&self.entries[..]),
            None => true,
        };
        sum_ok && path_ok
    }
}

/// The `m`-th elementary augmentation, `1 <= m <= n + 1`: insert `-1` at
/// position `m` and lower both cyclic neighbours by one.
pub fn augment(seq: &[i64], m: usize) -> Result<Vec<i64>> {
    let n = seq.len();
    if n < 2 {
        return domain(format!("cannot augment a sequence of length {n}"));
    }
    if m < 1 || m > n + 1 {
        return domain(format!("augmentation position {m} out of range 1..{}", n + 1));
    }
    let mut out = seq.to_vec();
    out.insert(m - 1, -1);
    let len = n + 1;
    out[(m + len - 2) % len] -= 1;
    out[m % len] -= 1;
    Ok(out)
}

/// Removes the `-1` at 1-based position `i` and raises both cyclic
/// neighbours; the inverse of `augment(_, i)`.
pub fn blow_down(seq: &[i64], i: usize) -> Option<Vec<i64>> {
    let n = seq.len();
    if n < 4 || i < 1 || i > n || seq[i - 1] != -1 {
        return None;
    }
    let mut out = seq.to_vec();
    out[(i + n - 2) % n] += 1;
    out[i % n] += 1;
    out.remove(i - 1);
    Some(out)
}

/// `(a_2, .., a_n, a_1)`.
pub fn shift(seq: &[i64]) -> Vec<i64> {
    let mut out = seq.to_vec();
    if !out.is_empty() {
        out.rotate_left(1);
    }
    out
}

/// `(a_{n-1}, .., a_1, a_n)`.
pub fn sym(seq: &[i64]) -> Vec<i64> {
    match seq.split_last() {
        Some((last, body)) => {
            let mut out: Vec<i64> = body.iter().rev().copied().collect();
            out.push(*last);
            out
        }
        None => Vec::new(),
    }
}

/// Lexicographically least element of the dihedral orbit.
pub fn canonical_form(seq: &[i64]) -> Vec<i64> {
    let n = seq.len();
    let mut best = seq.to_vec();
    let reversed: Vec<i64> = seq.iter().rev().copied().collect();
    for base in [seq.to_vec(), reversed] {
        let mut cur = base;
        for _ in 0..n {
            if cur < best {
                best = cur.clone();
            }
            cur.rotate_left(1);
        }
    }
    best
}

/// Dihedrally equivalent to `(0, k, 0, -k)` for some `k`.
pub fn is_length4_base(seq: &[i64]) -> bool {
    matches!(seq, [a, b, c, d] if (*a == 0 && *c == 0 && *b == -*d) || (*b == 0 && *d == 0 && *a == -*c))
}

fn is_base(seq: &[i64], config: AdmissibleConfig) -> bool {
    match seq.len() {
        3 => config.length3_base && seq == [1, 1, 1],
        4 => is_length4_base(seq),
        _ => false,
    }
}

pub fn is_admissible(seq: &[i64]) -> bool {
    is_admissible_with(seq, AdmissibleConfig::default())
}

pub fn is_admissible_with(seq: &[i64], config: AdmissibleConfig) -> bool {
    reduction_path_with(seq, config).is_some()
}

/// A witness augmentation path, or `None` if the sequence is not admissible.
pub fn reduction_path(seq: &[i64]) -> Option<ReductionPath> {
    reduction_path_with(seq, AdmissibleConfig::default())
}

pub fn reduction_path_with(seq: &[i64], config: AdmissibleConfig) -> Option<ReductionPath> {
    let mut failed = HashSet::new();
    let (base, positions) = blow_down_search(seq, config, &mut failed)?;
    Some(ReductionPath {
        base,
        steps: positions.into_iter().map(|position| AugmentationStep { position }).collect(),
    })
}

// Depth-first over every -1 position. Failures are memoised by canonical
// form, which is sound because admissibility is invariant under shifts and
// symmetries.
fn blow_down_search(
    seq: &[i64],
    config: AdmissibleConfig,
    failed: &mut HashSet<Vec<i64>>,
) -> Option<(Vec<i64>, Vec<usize>)> {
    let n = seq.len();
    if n < 3 || seq.iter().sum::<i64>() != 12 - 3 * n as i64 {
        return None;
    }
    if is_base(seq, config) {
        return Some((seq.to_vec(), Vec::new()));
    }
    if n == 3 {
        return None;
    }
    let key = canonical_form(seq);
    if failed.contains(&key) {
        return None;
    }
    for i in 1..=n {
        if let Some(smaller) = blow_down(seq, i) {
            if let Some((base, mut steps)) = blow_down_search(&smaller, config, failed) {
                steps.push(i);
                return Some((base, steps));
            }
        }
    }
    failed.insert(key);
    None
}

/// Canonical representatives of all admissible sequences of length `n`
/// with entries in `[floor, ceiling]` (no upper limit when `ceiling` is
/// `None`).
///
/// Breadth-first augmentation from the bases. An augmentation lowers any
/// existing entry by at most one, and entries never go up, so a partial
/// sequence is dropped as soon as an entry is below `floor` or more than
/// the remaining number of steps above `ceiling`. The same argument bounds
/// the base parameter: `(0,k,0,-k)` has an entry `-|k|`, so `|k| <= -floor`,
/// and an entry `|k|`, so `|k| <= ceiling + (n - 4)`.
pub fn generate_admissible(n: usize, floor: i64, ceiling: Option<i64>, config: AdmissibleConfig) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    if n < 3 || ceiling.is_some_and(|c| c < floor) {
        return out;
    }
    let within = |seq: &[i64], remaining: usize| {
        seq.iter().all(|&a| a >= floor && ceiling.map_or(true, |c| a - remaining as i64 <= c))
    };
    let mut level: BTreeSet<Vec<i64>> = BTreeSet::new();
    if config.length3_base && within(&[1, 1, 1], n - 3) {
        if n == 3 {
            out.insert(vec![1, 1, 1]);
            return out;
        }
        // (1,1,1) only reaches length 4 through bases, which are seeded
        // directly below
    }
    if n == 3 {
        return out;
    }
    let k_max = match ceiling {
        Some(c) => (-floor).min(c + (n as i64 - 4)),
        None => -floor,
    };
    // (0,k,0,-k) and (0,-k,0,k) are rotations of each other
    for k in 0..=k_max {
        let base = vec![0, k, 0, -k];
        if within(&base, n - 4) {
            level.insert(canonical_form(&base));
        }
    }
    for len in 4..n {
        let remaining = n - len - 1;
        let mut next = BTreeSet::new();
        for seq in &level {
            for m in 1..=len + 1 {
                let aug = augment(seq, m).expect("position in range");
                if within(&aug, remaining) {
                    next.insert(canonical_form(&aug));
                }
            }
        }
        level = next;
    }
    level
}

/// Canonical representatives of the admissible sequences of length `n`
/// with entries `>= floor` and at most one entry below -2. Since
/// augmentations never raise an entry, both conditions prune partial
/// sequences.
pub fn generate_strong_admissible(n: usize, floor: i64, config: AdmissibleConfig) -> BTreeSet<Vec<i64>> {
    let ok = |seq: &[i64]| seq.iter().all(|&a| a >= floor) && seq.iter().filter(|&&a| a < -2).count() <= 1;
    let mut out = BTreeSet::new();
    if n == 3 {
        if config.length3_base && ok(&[1, 1, 1]) {
            out.insert(vec![1, 1, 1]);
        }
        return out;
    }
    if n < 3 || floor > 0 {
        return out;
    }
    let mut level: BTreeSet<Vec<i64>> =
        (0..=-floor).map(|k| vec![0, k, 0, -k]).filter(|b| ok(b)).map(|b| canonical_form(&b)).collect();
    for len in 4..n {
        let mut next = BTreeSet::new();
        for seq in &level {
            for m in 1..=len + 1 {
                let aug = augment(seq, m).expect("position in range");
                if ok(&aug) {
                    next.insert(canonical_form(&aug));
                }
            }
        }
        level = next;
    }
    level
}

/// Strong admissible sequences that are not cyclic strong, of length `n`
/// and last entry `>= floor`, each written with the entry below -2 last.
/// Only one of each pair `s`, `sym(s)` is returned.
pub fn strong_not_cyclic(n: usize, floor: i64, config: AdmissibleConfig) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    for seq in generate_strong_admissible(n, floor, config) {
        if let Some(i) = seq.iter().position(|&a| a < -2) {
            let mut s = seq.clone();
            s.rotate_left((i + 1) % n);
            let mirrored = sym(&s);
            out.insert(s.min(mirrored));
        }
    }
    out.into_iter().collect()
}

/// Cyclic strong admissible sequences (all entries `>= -2`) by length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicStrongTable {
    pub by_length: BTreeMap<usize, Vec<Vec<i64>>>,
    /// `(1,1,1)` when the length-3 base is admitted.
    pub length3: Vec<Vec<i64>>,
}

impl CyclicStrongTable {
    pub fn count_without_length3(&self) -> usize {
        self.by_length.values().map(Vec::len).sum()
    }

    pub fn count_with_length3(&self) -> usize {
        self.count_without_length3() + self.length3.len()
    }

    pub fn all(&self) -> Vec<Vec<i64>> {
        self.length3.iter().chain(self.by_length.values().flatten()).cloned().collect()
    }
}

/// Runs the generator for lengths 4 through 9 with entry floor -2 (no
/// cyclic strong sequence is longer), plus the length-3 base.
pub fn classify_cyclic_strong(config: AdmissibleConfig) -> CyclicStrongTable {
    let by_length = (4..=9)
        .map(|n| (n, generate_admissible(n, -2, None, config).into_iter().collect()))
        .collect();
    let length3 = generate_admissible(3, -2, None, config).into_iter().collect();
    CyclicStrongTable { by_length, length3 }
}

/// Families of strong admissible sequences that are not cyclic strong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrongFamily {
    IIa,
    IIb,
    IIc,
    IIIa,
    IIIb,
    IIIc,
    IV,
    V,
    VI,
}

impl StrongFamily {
    pub const ALL: [StrongFamily; 9] = [
        StrongFamily::IIa,
        StrongFamily::IIb,
        StrongFamily::IIc,
        StrongFamily::IIIa,
        StrongFamily::IIIb,
        StrongFamily::IIIc,
        StrongFamily::IV,
        StrongFamily::V,
        StrongFamily::VI,
    ];

    /// The family's shape, with `-2*` for a run of `-2`s.
    pub fn pattern(self) -> &'static str {
        match self {
            StrongFamily::IIa => "(b, c, d, e), c + e = 4 - n",
            StrongFamily::IIb => "(-2, -1, -2, c, d, e), c + e = 5 - n",
            StrongFamily::IIc => "(-2, -1, -2, c, -2, -1, -2, e), c + e = 6 - n",
            StrongFamily::IIIa => "(1, 0, -2*, -1, 4 - n)",
            StrongFamily::IIIb => "(-1, 0, 0, -2*, -1, 4 - n)",
            StrongFamily::IIIc => "(-1, -2*, 0, 0, -2*, -1, 4 - n), first run non-empty",
            StrongFamily::IV => "(-2, 0, 1, -2*, -1, 4 - n)",
            StrongFamily::V => "(-2, -1, -1, 0, -2*, -1, 5 - n)",
            StrongFamily::VI => "(-2, -2, -1, -2, 0, -2*, -1, 6 - n)",
        }
    }

    fn matches(self, seq: &[i64]) -> bool {
        let n = seq.len();
        let ni = n as i64;
        let (e, body) = match seq.split_last() {
            Some((e, body)) => (*e, body),
            None => return false,
        };
        let twos = |s: &[i64]| s.iter().all(|&x| x == -2);
        // prefix, then a run of -2, then (-1, e) with e fixed
        let tail = |prefix: &[i64], e_value: i64| {
            body.len() > prefix.len()
                && body.starts_with(prefix)
                && body[body.len() - 1] == -1
                && twos(&body[prefix.len()..body.len() - 1])
                && e == e_value
        };
        match self {
            StrongFamily::IIa => (0..body.len()).any(|i| {
                let c = body[i];
                is_bd(&body[..i]) && is_bd(&body[i + 1..]) && c >= -2 && e <= -3 && c + e == 4 - ni
            }),
            StrongFamily::IIb => {
                body.len() >= 5
                    && body.starts_with(&[-2, -1, -2])
                    && body[3] >= -2
                    && is_bd(&body[4..])
                    && e <= -3
                    && body[3] + e == 5 - ni
            }
            StrongFamily::IIc => {
                n == 8
                    && body[..3] == [-2, -1, -2]
                    && body[4..] == [-2, -1, -2]
                    && body[3] >= -2
                    && e <= -3
                    && body[3] + e == 6 - ni
            }
            StrongFamily::IIIa => tail(&[1, 0], 4 - ni),
            StrongFamily::IIIb => tail(&[-1, 0, 0], 4 - ni),
            StrongFamily::IIIc => {
                // (-1, -2^p, 0, 0, -2^q, -1, e) with p >= 1
                if e != 4 - ni || body.len() < 5 || body[0] != -1 || body[body.len() - 1] != -1 {
                    return false;
                }
                let inner = &body[1..body.len() - 1];
                match inner.windows(2).position(|w| w == [0, 0]) {
                    Some(p) => p >= 1 && twos(&inner[..p]) && twos(&inner[p + 2..]),
                    None => false,
                }
            }
            StrongFamily::IV => tail(&[-2, 0, 1], 4 - ni),
            StrongFamily::V => tail(&[-2, -1, -1, 0], 5 - ni),
            StrongFamily::VI => tail(&[-2, -2, -1, -2, 0], 6 - ni),
        }
    }
}

impl fmt::Display for StrongFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `(0)`, `(-1, -1)` or `(-1, -2, .., -2, -1)`.
fn is_bd(s: &[i64]) -> bool {
    s == [0] || (s.len() >= 2 && s[0] == -1 && s[s.len() - 1] == -1 && s[1..s.len() - 1].iter().all(|&x| x == -2))
}

pub fn is_strong_admissible(seq: &[i64]) -> bool {
    match seq.split_last() {
        Some((_, body)) => body.iter().all(|&a| a >= -2) && is_admissible(seq),
        None => false,
    }
}

pub fn is_cyclic_strong_admissible(seq: &[i64]) -> bool {
    seq.iter().all(|&a| a >= -2) && is_admissible(seq)
}

/// Which family a strong, not cyclic strong, admissible sequence belongs
/// to, trying the sequence and its symmetric image. Families are tried in
/// the order of [`StrongFamily::ALL`].
pub fn matches_strong_family(seq: &[i64]) -> Result<Option<StrongFamily>> {
    if !is_strong_admissible(seq) {
        return domain(format!("{seq:?} is not strong admissible"));
    }
    if seq.iter().all(|&a| a >= -2) {
        return domain(format!("{seq:?} is cyclic strong admissible"));
    }
    let mirrored = sym(seq);
    Ok(StrongFamily::ALL.into_iter().find(|f| f.matches(seq) || f.matches(&mirrored)))
}

/// Every family matching `seq` or `sym(seq)`, with no precondition.
pub fn matching_strong_families(seq: &[i64]) -> Vec<StrongFamily> {
    let mirrored = sym(seq);
    StrongFamily::ALL.into_iter().filter(|f| f.matches(seq) || f.matches(&mirrored)).collect()
}

/// Admissible sequences of length 3 to 5 against the three known families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthLe5Table {
    pub bound: i64,
    /// Canonical forms found by the generator, by length.
    pub generated: BTreeMap<usize, Vec<Vec<i64>>>,
    /// Canonical forms predicted by the families, by length.
    pub predicted: BTreeMap<usize, Vec<Vec<i64>>>,
}

impl LengthLe5Table {
    pub fn matches(&self) -> bool {
        self.generated == self.predicted
    }

    /// Generated but not predicted.
    pub fn extra(&self) -> Vec<Vec<i64>> {
        diff(&self.generated, &self.predicted)
    }

    /// Predicted but not generated.
    pub fn missing(&self) -> Vec<Vec<i64>> {
        diff(&self.predicted, &self.generated)
    }
}

fn diff(a: &BTreeMap<usize, Vec<Vec<i64>>>, b: &BTreeMap<usize, Vec<Vec<i64>>>) -> Vec<Vec<i64>> {
    let other: BTreeSet<&Vec<i64>> = b.values().flatten().collect();
    a.values().flatten().filter(|s| !other.contains(s)).cloned().collect()
}

/// The family members `(1,1,1)`, `(m,0,-m,0)` and `(-1,s,0,-s-1,-1)` whose
/// entries lie in `[-bound-2, bound+2]`, as canonical forms. Parameters
/// are scanned over a range wide enough that every member inside the
/// window is reached.
pub fn length_le5_family_members(bound: i64) -> BTreeMap<usize, Vec<Vec<i64>>> {
    let lo = -bound - 2;
    let hi = bound + 2;
    let inside = |s: &[i64]| s.iter().all(|&a| (lo..=hi).contains(&a));
    let mut out: BTreeMap<usize, BTreeSet<Vec<i64>>> = BTreeMap::new();
    let mut add = |s: Vec<i64>| {
        if inside(&s) {
            out.entry(s.len()).or_default().insert(canonical_form(&s));
        }
    };
    add(vec![1, 1, 1]);
    for t in (lo - 2)..=(hi + 2) {
        add(vec![t, 0, -t, 0]);
        add(vec![-1, t, 0, -t - 1, -1]);
    }
    for len in 3..=5 {
        out.entry(len).or_default();
    }
    out.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
}

/// All admissible sequences of length 3, 4 and 5 with entries in
/// `[-bound-2, bound+2]`, next to the family prediction for that window.
pub fn classify_length_le5(bound: i64) -> Result<LengthLe5Table> {
    if bound < 1 {
        return domain(format!("bound must be at least 1, got {bound}"));
    }
    let config = AdmissibleConfig { length3_base: true };
    let generated = (3..=5)
        .map(|n| (n, generate_admissible(n, -bound - 2, Some(bound + 2), config).into_iter().collect()))
        .collect();
    Ok(LengthLe5Table { bound, generated, predicted: length_le5_family_members(bound) })
}

/// Sanity check used by callers that build sequences from toric systems.
pub fn check_sum_invariant(seq: &[i64]) -> Result<()> {
    let n = seq.len() as i64;
    let sum: i64 = seq.iter().sum();
    if sum == 12 - 3 * n {
        Ok(())
    } else {
        internal(format!("{seq:?} sums to {sum}, expected {}", 12 - 3 * n))
    }
}
