//! Golden values for the catalog: invariants plus NA energies of the named configurations.

use serde::{Deserialize, Serialize};
use torus_soliton_core::affine::AffineJson;
use torus_soliton_core::catalog::{self, CatalogEntry};
use torus_soliton_core::invariants::{self, Direction, EtaChoice};
use torus_soliton_core::json::{qs, DirectionJson, EnergiesJson};
use torus_soliton_core::rational::fmt_q;
use torus_soliton_core::test_config::{jt_min, na_energies, JtMode, PLConcave};
use torus_soliton_core::Error;

pub const DEFAULT_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/golden/catalog_golden.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenConfig {
    pub label: String,
    pub eta_mode: String,
    pub pieces: Vec<AffineJson>,
    pub energies: EnergiesJson,
    pub jt_min: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub name: String,
    pub vertices: Vec<Vec<String>>,
    pub kahler_einstein: bool,
    pub mabuchi_soliton: bool,
    pub volume: String,
    pub barycenter: Vec<String>,
    pub eta: DirectionJson,
    pub m_x: String,
    pub reductive: bool,
    pub configurations: Vec<GoldenConfig>,
}

/// Products `±e_i` under the extremal vector; for `BL1P2` also the exceptional cone under both
/// the extremal vector and `eta = 0`.
fn named_configurations(e: &CatalogEntry) -> Vec<(String, EtaChoice, PLConcave)> {
    let p = e.polytope();
    let n = p.dim();
    let mut out = Vec::new();
    for i in 0..n {
        let d = Direction::basis(n, i);
        out.push((format!("product+e{}", i + 1), EtaChoice::Auto, PLConcave::product(&d)));
        out.push((
            format!("product-e{}", i + 1),
            EtaChoice::Auto,
            PLConcave::product(&d.negated()),
        ));
    }
    if let Some(g) = catalog::bl1_exceptional_cone(&p) {
        out.push(("exceptional_cone".into(), EtaChoice::Auto, g.clone()));
        out.push(("exceptional_cone".into(), EtaChoice::Zero, g));
    }
    out
}

pub fn compute_entry(e: &CatalogEntry) -> Result<GoldenEntry, Error> {
    let p = e.polytope();
    p.require_reflexive()?;
    let inv = invariants::compute(&p, &EtaChoice::Auto)?;
    let mut configurations = Vec::new();
    for (label, choice, g) in named_configurations(e) {
        let eta = choice.resolve(&p)?;
        let energies = na_energies(&p, &g, &eta)?;
        let jt = jt_min(&p, &g, &eta, JtMode::Plain)?;
        configurations.push(GoldenConfig {
            label,
            eta_mode: torus_soliton_core::json::eta_mode_string(&choice),
            pieces: g.pieces().iter().map(AffineJson::from).collect(),
            energies: EnergiesJson::from_energies(&energies),
            jt_min: fmt_q(&jt.value),
        });
    }
    Ok(GoldenEntry {
        name: e.name.to_string(),
        vertices: p.vertices().iter().map(|v| qs(v)).collect(),
        kahler_einstein: e.kahler_einstein,
        mabuchi_soliton: e.mabuchi_soliton,
        volume: fmt_q(&inv.volume),
        barycenter: qs(&inv.barycenter),
        eta: DirectionJson::from_direction(&inv.eta),
        m_x: fmt_q(&inv.m_x),
        reductive: inv.reductive,
        configurations,
    })
}

pub fn compute_all() -> Result<Vec<GoldenEntry>, Error> {
    catalog::ENTRIES.iter().map(compute_entry).collect()
}

pub fn render(entries: &[GoldenEntry]) -> String {
    let mut s = serde_json::to_string_pretty(entries).expect("golden entries serialize");
    s.push('\n');
    s
}

/// Names of entries whose recomputed values differ from `stored`, plus names missing on
/// either side.
pub fn mismatches(stored: &[GoldenEntry], fresh: &[GoldenEntry]) -> Vec<String> {
    let mut out = Vec::new();
    for f in fresh {
        match stored.iter().find(|s| s.name == f.name) {
            Some(s) if s == f => {}
            _ => out.push(f.name.clone()),
        }
    }
    for s in stored {
        if !fresh.iter().any(|f| f.name == s.name) {
            out.push(s.name.clone());
        }
    }
    out
}
