//! ℙ¹ and the five toric del Pezzo surfaces.

use crate::error::Error;
use crate::invariants::Face;
use crate::polytope::Polytope;
use crate::rational::{qi, qvec, RationalVec};
use crate::test_config::{normal_cone, PLConcave};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub vertices: &'static [&'static [i64]],
    pub kahler_einstein: bool,
    pub mabuchi_soliton: bool,
    pub note: &'static str,
}

pub const NAMES: [&str; 6] = ["P1", "P2", "P1xP1", "BL1P2", "BL2P2", "BL3P2"];

pub const ENTRIES: [CatalogEntry; 6] = [
    CatalogEntry {
        name: "P1",
        vertices: &[&[-1], &[1]],
        kahler_einstein: true,
        mabuchi_soliton: true,
        note: "Fubini-Study; barycenter zero",
    },
    CatalogEntry {
        name: "P2",
        vertices: &[&[-1, -1], &[2, -1], &[-1, 2]],
        kahler_einstein: true,
        mabuchi_soliton: true,
        note: "Fubini-Study; barycenter zero",
    },
    CatalogEntry {
        name: "P1xP1",
        vertices: &[&[-1, -1], &[1, -1], &[1, 1], &[-1, 1]],
        kahler_einstein: true,
        mabuchi_soliton: true,
        note: "product metric; barycenter zero",
    },
    CatalogEntry {
        name: "BL1P2",
        vertices: &[&[-1, 0], &[0, -1], &[2, -1], &[-1, 2]],
        kahler_einstein: false,
        mabuchi_soliton: true,
        note: "nonzero barycenter obstructs Kähler-Einstein; m_X = 6/11 > 0 gives a Mabuchi soliton",
    },
    CatalogEntry {
        name: "BL2P2",
        vertices: &[&[-1, 0], &[0, -1], &[1, -1], &[1, 0], &[-1, 2]],
        kahler_einstein: false,
        mabuchi_soliton: true,
        note: "nonzero barycenter; m_X = 105/409 > 0 gives a Mabuchi soliton",
    },
    CatalogEntry {
        name: "BL3P2",
        vertices: &[&[1, 0], &[0, 1], &[-1, 1], &[-1, 0], &[0, -1], &[1, -1]],
        kahler_einstein: true,
        mabuchi_soliton: true,
        note: "centrally symmetric hexagon; barycenter zero",
    },
];

impl CatalogEntry {
    pub fn polytope(&self) -> Polytope {
        let pts: Vec<RationalVec> = self.vertices.iter().map(|v| qvec(v)).collect();
        Polytope::from_vertices(&pts).expect("catalog entries are valid polytopes")
    }
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry, Error> {
    ENTRIES
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

pub fn polytope(name: &str) -> Result<Polytope, Error> {
    entry(name).map(CatalogEntry::polytope)
}

/// The exceptional divisor of `Bl₁ℙ²`: the facet with outward normal `(−1, −1)`.
pub fn exceptional_face(p: &Polytope) -> Option<Face> {
    let target = qvec(&[-1, -1]);
    p.facets()
        .iter()
        .position(|f| f.normal == target)
        .map(|i| Face { facets: vec![i] })
}

/// Full-width deformation to the normal cone of the exceptional divisor of `Bl₁ℙ²`.
pub fn bl1_exceptional_cone(p: &Polytope) -> Option<PLConcave> {
    exceptional_face(p).map(|f| normal_cone(p, &f, &qi(1)))
}
