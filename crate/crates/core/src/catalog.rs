//! Built-in catalog of weak del Pezzo surfaces, one representative
//! simple-root configuration per type.
//!
//! Names follow `X<degree>_<type>[_<lines>]` for surfaces with (-2)-curves,
//! where the suffix is the number of irreducible (-1)-curves when degree and
//! type alone do not pin the surface down. Del Pezzo surfaces are `dP<d>`;
//! `P2`, `F0`, `F1`, `F2` are the surfaces of degree 9 and 8.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{LatticeId, PicardLattice};
use crate::surface::SurfaceModel;

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

/// One catalog row. `lattice` is needed to tell the three degree-8
/// surfaces apart; `type` and `lines` are cross-checked at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeId>,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub dynkin_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lines: Option<usize>,
    pub simple_roots: Vec<Vec<i64>>,
}

impl CatalogEntry {
    pub fn lattice_id(&self) -> Result<LatticeId> {
        if let Some(id) = self.lattice {
            return Ok(id);
        }
        match self.degree {
            1..=9 => Ok(LatticeId::Blowup((9 - self.degree) as u8)),
            d => domain(format!("catalog row {:?}: degree {d} out of range", self.name)),
        }
    }

    /// Builds the surface and checks the row's degree, type and line count.
    pub fn build(&self) -> Result<SurfaceModel> {
        let lattice = PicardLattice::from_id(self.lattice_id()?)?;
        if lattice.degree() != self.degree {
            return domain(format!(
                "catalog row {:?}: lattice {} has degree {}, row says {}",
                self.name,
                lattice.id(),
                lattice.degree(),
                self.degree
            ));
        }
        let roots = self
            .simple_roots
            .iter()
            .map(|c| lattice.class(c.clone()))
            .collect::<Result<Vec<_>>>()?;
        let surface = SurfaceModel::build(&lattice, roots)?.with_name(self.name.clone());
        if let Some(t) = &self.dynkin_type {
            let actual = surface.dynkin_type().to_string();
            if *t != actual {
                return domain(format!("catalog row {:?}: type {t}, roots give {actual}", self.name));
            }
        }
        if let Some(lines) = self.lines {
            let actual = surface.irreducible_minus1().len();
            if lines != actual {
                return domain(format!(
                    "catalog row {:?}: {lines} lines listed, roots give {actual}",
                    self.name
                ));
            }
        }
        Ok(surface)
    }
}

pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>> {
    serde_json::from_str(text).map_err(|e| Error::Domain(format!("malformed catalog: {e}")))
}

/// Rows of the built-in catalog, in file order.
pub fn catalog_entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| parse_catalog(CATALOG_JSON).expect("built-in catalog parses"))
}

pub fn catalog_names() -> Vec<&'static str> {
    catalog_entries().iter().map(|e| e.name.as_str()).collect()
}

/// Every catalog surface, built once and shared.
pub fn catalog() -> Result<&'static [SurfaceModel]> {
    static SURFACES: OnceLock<std::result::Result<Vec<SurfaceModel>, Error>> = OnceLock::new();
    let built = SURFACES.get_or_init(|| catalog_entries().iter().map(CatalogEntry::build).collect());
    match built {
        Ok(v) => Ok(v),
        Err(e) => Err(Error::Internal(format!("built-in catalog is invalid: {e}"))),
    }
}

pub fn catalog_surface(name: &str) -> Result<SurfaceModel> {
    match catalog()?.iter().find(|s| s.name() == Some(name)) {
        Some(s) => Ok(s.clone()),
        None => domain(format!("unknown catalog surface {name:?}")),
    }
}
