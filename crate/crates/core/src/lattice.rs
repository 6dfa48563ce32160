//! Picard lattices of rational surfaces and exact divisor-class arithmetic.
//!
//! Three families are built in: the blow-up of the projective plane in
//! `n <= 8` points (basis `L, E1, .., En`), and the two Hirzebruch surfaces
//! `F0 = P1 x P1` (basis `H1, H2`) and `F2` (basis `F, S` with `F^2 = 0`,
//! `S^2 = 2`, `F.S = 1`). Lattices are interned: every call to a
//! constructor hands out the same shared instance.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, internal, Error, Result};

/// Largest number of blown-up points supported.
pub const MAX_BLOWUP_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HirzebruchKind {
    F0,
    F2,
}

/// Identifier of a built-in lattice. `Blowup(0)` is the projective plane
/// and prints as `P2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LatticeId {
    Blowup(u8),
    F0,
    F2,
}

impl fmt::Display for LatticeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeId::Blowup(0) => f.write_str("P2"),
            LatticeId::Blowup(n) => write!(f, "Bl{n}"),
            LatticeId::F0 => f.write_str("F0"),
            LatticeId::F2 => f.write_str("F2"),
        }
    }
}

impl FromStr for LatticeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P2" => Ok(LatticeId::Blowup(0)),
            "F0" => Ok(LatticeId::F0),
            "F2" => Ok(LatticeId::F2),
            _ => {
                let n = s
                    .strip_prefix("Bl")
                    .and_then(|rest| rest.parse::<u8>().ok())
                    .filter(|&n| (n as usize) <= MAX_BLOWUP_POINTS);
                match n {
                    Some(n) => Ok(LatticeId::Blowup(n)),
                    None => domain(format!(
                        "unknown lattice id {s:?} (expected P2, Bl0..Bl8, F0 or F2)"
                    )),
                }
            }
        }
    }
}

impl TryFrom<String> for LatticeId {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LatticeId> for String {
    fn from(id: LatticeId) -> String {
        id.to_string()
    }
}

/// A based integer lattice with intersection form and canonical class.
#[derive(Debug)]
pub struct PicardLattice {
    id: LatticeId,
    labels: Vec<String>,
    gram: Vec<Vec<i64>>,
    canonical: Vec<i64>,
    degree: i64,
}

fn registry() -> &'static [Arc<PicardLattice>] {
    static LATTICES: OnceLock<Vec<Arc<PicardLattice>>> = OnceLock::new();
    LATTICES.get_or_init(|| {
        let mut all: Vec<Arc<PicardLattice>> = (0..=MAX_BLOWUP_POINTS)
            .map(|n| Arc::new(PicardLattice::blowup_raw(n)))
            .collect();
        all.push(Arc::new(PicardLattice::hirzebruch_raw(HirzebruchKind::F0)));
        all.push(Arc::new(PicardLattice::hirzebruch_raw(HirzebruchKind::F2)));
        all
    })
}

impl PicardLattice {
    fn blowup_raw(n: usize) -> Self {
        let rank = n + 1;
        let mut labels = vec!["L".to_string()];
        labels.extend((1..=n).map(|i| format!("E{i}")));
        let mut gram = vec![vec![0; rank]; rank];
        gram[0][0] = 1;
        for (i, row) in gram.iter_mut().enumerate().skip(1) {
            row[i] = -1;
        }
        let mut canonical = vec![1; rank];
        canonical[0] = -3;
        Self::finish(LatticeId::Blowup(n as u8), labels, gram, canonical)
    }

    fn hirzebruch_raw(kind: HirzebruchKind) -> Self {
        match kind {
            HirzebruchKind::F0 => Self::finish(
                LatticeId::F0,
                vec!["H1".into(), "H2".into()],
                vec![vec![0, 1], vec![1, 0]],
                vec![-2, -2],
            ),
            HirzebruchKind::F2 => Self::finish(
                LatticeId::F2,
                vec!["F".into(), "S".into()],
                vec![vec![0, 1], vec![1, 2]],
                vec![0, -2],
            ),
        }
    }

    fn finish(id: LatticeId, labels: Vec<String>, gram: Vec<Vec<i64>>, canonical: Vec<i64>) -> Self {
        let mut lattice = PicardLattice { id, labels, gram, canonical, degree: 0 };
        lattice.degree = lattice.form(&lattice.canonical, &lattice.canonical);
        lattice
    }

    /// Lattice of the plane blown up in `n` points, `0 <= n <= 8`.
    pub fn blowup(n: usize) -> Result<Arc<Self>> {
        if n > MAX_BLOWUP_POINTS {
            return domain(format!("blow-up lattice needs 0 <= n <= 8, got {n}"));
        }
        Ok(registry()[n].clone())
    }

    pub fn hirzebruch(kind: HirzebruchKind) -> Arc<Self> {
        let offset = match kind {
            HirzebruchKind::F0 => 0,
            HirzebruchKind::F2 => 1,
        };
        registry()[MAX_BLOWUP_POINTS + 1 + offset].clone()
    }

    pub fn from_id(id: LatticeId) -> Result<Arc<Self>> {
        match id {
            LatticeId::Blowup(n) => Self::blowup(n as usize),
            LatticeId::F0 => Ok(Self::hirzebruch(HirzebruchKind::F0)),
            LatticeId::F2 => Ok(Self::hirzebruch(HirzebruchKind::F2)),
        }
    }

    pub fn by_name(name: &str) -> Result<Arc<Self>> {
        Self::from_id(name.parse()?)
    }

    pub fn id(&self) -> LatticeId {
        self.id
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Coordinates of the canonical class.
    pub fn canonical_coords(&self) -> &[i64] {
        &self.canonical
    }

    /// `K^2`.
    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// Number of blown-up points, or `None` for the Hirzebruch lattices.
    pub fn blown_up_points(&self) -> Option<usize> {
        match self.id {
            LatticeId::Blowup(n) => Some(n as usize),
            _ => None,
        }
    }

    /// Intersection form on raw coordinate vectors.
    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        debug_assert_eq!(a.len(), self.rank());
        debug_assert_eq!(b.len(), self.rank());
        if let LatticeId::Blowup(_) = self.id {
            let tail: i64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum();
            return a[0] * b[0] - tail;
        }
        let mut total = 0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                total += a[i] * g * b[j];
            }
        }
        total
    }

    pub fn class(self: &Arc<Self>, coords: Vec<i64>) -> Result<DivisorClass> {
        if coords.len() != self.rank() {
            return domain(format!(
                "lattice {} has rank {}, got {} coordinates",
                self.id,
                self.rank(),
                coords.len()
            ));
        }
        Ok(DivisorClass { lattice: self.clone(), coords })
    }

    pub fn zero(self: &Arc<Self>) -> DivisorClass {
        DivisorClass { lattice: self.clone(), coords: vec![0; self.rank()] }
    }

    pub fn canonical(self: &Arc<Self>) -> DivisorClass {
        DivisorClass { lattice: self.clone(), coords: self.canonical.clone() }
    }

    /// The `i`-th basis vector (0-based).
    pub fn basis(self: &Arc<Self>, i: usize) -> DivisorClass {
        let mut coords = vec![0; self.rank()];
        coords[i] = 1;
        DivisorClass { lattice: self.clone(), coords }
    }

    /// Basis vector by label, e.g. `"E3"`.
    pub fn basis_by_label(self: &Arc<Self>, label: &str) -> Result<DivisorClass> {
        match self.labels.iter().position(|l| l == label) {
            Some(i) => Ok(self.basis(i)),
            None => domain(format!("lattice {} has no basis element {label:?}", self.id)),
        }
    }

    /// Parses a linear expression in the basis labels, such as
    /// `"L - E1 - E2"`, `"2L-E1-E2-E3-E4-E5-E6"` or `"S - F"`.
    pub fn parse_class(self: &Arc<Self>, text: &str) -> Result<DivisorClass> {
        let mut coords = vec![0i64; self.rank()];
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return domain("empty divisor expression");
        }
        let mut i = 0;
        let mut first = true;
        while i < chars.len() {
            let mut sign = 1;
            if chars[i] == '+' || chars[i] == '-' {
                if chars[i] == '-' {
                    sign = -1;
                }
                i += 1;
            } else if !first {
                return domain(format!("expected '+' or '-' in {text:?}"));
            }
            first = false;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let coef: Option<i64> = if i > start {
                let digits: String = chars[start..i].iter().collect();
                Some(digits.parse().map_err(|_| Error::Domain(format!("bad coefficient in {text:?}")))?)
            } else {
                None
            };
            let lstart = i;
            if i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if lstart == i {
                // a bare integer is only meaningful as the zero class
                if coef == Some(0) {
                    continue;
                }
                return domain(format!("missing basis label in {text:?}"));
            }
            let label: String = chars[lstart..i].iter().collect();
            let idx = match self.labels.iter().position(|l| *l == label) {
                Some(idx) => idx,
                None => return domain(format!("lattice {} has no basis element {label:?}", self.id)),
            };
            coords[idx] += sign * coef.unwrap_or(1);
        }
        Ok(DivisorClass { lattice: self.clone(), coords })
    }
}

/// An integer coordinate vector in the basis of a [`PicardLattice`].
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "DivisorClassJson", into = "DivisorClassJson")]
pub struct DivisorClass {
    lattice: Arc<PicardLattice>,
    coords: Vec<i64>,
}

/// Wire format of a divisor class: `{"lattice": "Bl6", "coords": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorClassJson {
    pub lattice: LatticeId,
    pub coords: Vec<i64>,
}

impl TryFrom<DivisorClassJson> for DivisorClass {
    type Error = Error;
    fn try_from(json: DivisorClassJson) -> Result<Self> {
        PicardLattice::from_id(json.lattice)?.class(json.coords)
    }
}

impl From<DivisorClass> for DivisorClassJson {
    fn from(d: DivisorClass) -> Self {
        DivisorClassJson { lattice: d.lattice.id, coords: d.coords }
    }
}

impl DivisorClass {
    pub fn lattice(&self) -> &Arc<PicardLattice> {
        &self.lattice
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn same_lattice(&self, other: &DivisorClass) -> bool {
        self.lattice.id == other.lattice.id
    }

    fn check_same(&self, other: &DivisorClass) -> Result<()> {
        if self.same_lattice(other) {
            Ok(())
        } else {
            domain(format!(
                "lattice mismatch: {} vs {}",
                self.lattice.id, other.lattice.id
            ))
        }
    }

    /// Intersection number; fails on a lattice mismatch.
    pub fn intersect(&self, other: &DivisorClass) -> Result<i64> {
        self.check_same(other)?;
        Ok(self.lattice.form(&self.coords, &other.coords))
    }

    /// Intersection number for classes known to share a lattice.
    ///
    /// # Panics
    /// On a lattice mismatch.
    pub fn dot(&self, other: &DivisorClass) -> i64 {
        assert!(self.same_lattice(other), "lattice mismatch in intersection");
        self.lattice.form(&self.coords, &other.coords)
    }

    pub fn square(&self) -> i64 {
        self.lattice.form(&self.coords, &self.coords)
    }

    /// `D.K`.
    pub fn dot_canonical(&self) -> i64 {
        self.lattice.form(&self.coords, &self.lattice.canonical)
    }

    /// Riemann-Roch: `chi(D) = 1 + D.(D - K)/2`.
    pub fn euler_char(&self) -> Result<i64> {
        let twice = self.square() - self.dot_canonical();
        if twice % 2 != 0 {
            return internal(format!(
                "D.(D-K) = {twice} is odd for {self} on {}",
                self.lattice.id
            ));
        }
        Ok(1 + twice / 2)
    }

    /// Numerically left-orthogonal: `chi(-D) = 0`, equivalently `D^2 + D.K = -2`.
    pub fn is_numerically_lo(&self) -> bool {
        let by_form = self.square() + self.dot_canonical() == -2;
        debug_assert_eq!(by_form, (-self).euler_char().ok() == Some(0));
        by_form
    }

    pub fn try_add(&self, other: &DivisorClass) -> Result<DivisorClass> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &DivisorClass) -> Result<DivisorClass> {
        self.check_same(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, c: i64) -> DivisorClass {
        self.map(|a| a * c)
    }

    fn map(&self, f: impl Fn(i64) -> i64) -> DivisorClass {
        DivisorClass {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip_with(&self, other: &DivisorClass, f: impl Fn(i64, i64) -> i64) -> DivisorClass {
        DivisorClass {
            lattice: self.lattice.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// `chi(D2 - D1)`, the Euler pairing of the line bundles `O(D1)`, `O(D2)`.
pub fn euler_char_pair(d1: &DivisorClass, d2: &DivisorClass) -> Result<i64> {
    d2.try_sub(d1)?.euler_char()
}

pub fn make_blowup_lattice(n: usize) -> Result<Arc<PicardLattice>> {
    PicardLattice::blowup(n)
}

pub fn make_hirzebruch_lattice(kind: HirzebruchKind) -> Arc<PicardLattice> {
    PicardLattice::hirzebruch(kind)
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.lattice.id == other.lattice.id && self.coords == other.coords
    }
}

impl Eq for DivisorClass {}

impl Hash for DivisorClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.lattice.id.hash(state);
        self.coords.hash(state);
    }
}

impl PartialOrd for DivisorClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by lattice, then lexicographically by coordinates.
impl Ord for DivisorClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.lattice.id, &self.coords).cmp(&(other.lattice.id, &other.coords))
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (c, label) in self.coords.iter().zip(&self.lattice.labels) {
            if *c == 0 {
                continue;
            }
            let sign = if *c < 0 { "-" } else { "+" };
            match (wrote, *c < 0) {
                (false, false) => {}
                (false, true) => f.write_str("-")?,
                (true, _) => write!(f, " {sign} ")?,
            }
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            f.write_str(label)?;
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.lattice.id, self)
    }
}

// Operator forms panic on a lattice mismatch; use `try_add`/`try_sub` for
// classes of unknown origin.

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert!(self.same_lattice(rhs), "lattice mismatch in addition");
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        assert!(self.same_lattice(rhs), "lattice mismatch in subtraction");
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        &self + &rhs
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        &self - &rhs
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self.map(|a| -a)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        -&self
    }
}

impl Mul<i64> for &DivisorClass {
    type Output = DivisorClass;
    fn mul(self, c: i64) -> DivisorClass {
        self.scale(c)
    }
}
