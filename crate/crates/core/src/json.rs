//! JSON schemas. Exact rationals travel as `"p/q"` strings with `*_approx` decimals alongside.

use serde::{Deserialize, Serialize};

use crate::affine::{Affine, AffineJson};
use crate::error::Error;
use crate::invariants::{Direction, EtaChoice, Face};
use crate::polytope::Polytope;
use crate::rational::{fmt_q, parse_q, to_f64, RationalVec, Q};
use crate::stability::{Evaluation, FamilyMember, FamilySpec, StabilityReport, Verdict};
use crate::test_config::{ConfigKind, JtMin, NAEnergies, PLConcave};

pub fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

pub fn qa(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn parse_vec(v: &[String]) -> Result<RationalVec, Error> {
    v.iter().map(|s| parse_q(s).map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<Vec<String>>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope, name: Option<&str>) -> Self {
        Self {
            name: name.map(str::to_string),
            vertices: p.vertices().iter().map(|v| qs(v)).collect(),
        }
    }

    pub fn build(&self) -> Result<Polytope, Error> {
        let pts = self
            .vertices
            .iter()
            .map(|v| parse_vec(v))
            .collect::<Result<Vec<_>, _>>()?;
        Polytope::from_vertices(&pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionJson {
    pub mu: Vec<String>,
    pub c: String,
}

impl DirectionJson {
    pub fn from_direction(d: &Direction) -> Self {
        Self {
            mu: qs(&d.mu),
            c: fmt_q(&d.c),
        }
    }

    pub fn build(&self) -> Result<Direction, Error> {
        Ok(Direction::new(parse_vec(&self.mu)?, parse_q(&self.c)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionApprox {
    pub mu: Vec<f64>,
    pub c: f64,
}

impl DirectionApprox {
    pub fn from_direction(d: &Direction) -> Self {
        Self {
            mu: qa(&d.mu),
            c: to_f64(&d.c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct EnergiesJson {
    pub E_na: String,
    pub E_na_approx: f64,
    pub L0_na: String,
    pub L0_na_approx: f64,
    pub L_na: String,
    pub L_na_approx: f64,
    pub E_eta_na: String,
    pub E_eta_na_approx: f64,
    pub D_eta_na: String,
    pub D_eta_na_approx: f64,
    pub J_na: String,
    pub J_na_approx: f64,
    pub J_eta_na: String,
    pub J_eta_na_approx: f64,
}

impl EnergiesJson {
    pub fn from_energies(e: &NAEnergies) -> Self {
        Self {
            E_na: fmt_q(&e.e_na),
            E_na_approx: to_f64(&e.e_na),
            L0_na: fmt_q(&e.l0_na),
            L0_na_approx: to_f64(&e.l0_na),
            L_na: fmt_q(&e.l_na),
            L_na_approx: to_f64(&e.l_na),
            E_eta_na: fmt_q(&e.e_eta_na),
            E_eta_na_approx: to_f64(&e.e_eta_na),
            D_eta_na: fmt_q(&e.d_eta_na),
            D_eta_na_approx: to_f64(&e.d_eta_na),
            J_na: fmt_q(&e.j_na),
            J_na_approx: to_f64(&e.j_na),
            J_eta_na: fmt_q(&e.j_eta_na),
            J_eta_na_approx: to_f64(&e.j_eta_na),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub vertex: Vec<String>,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JtMinJson {
    pub mu_star: DirectionJson,
    pub value: String,
    pub value_approx: f64,
    pub weight_moment: Vec<String>,
    pub certificate: Vec<CertificateJson>,
}

impl JtMinJson {
    pub fn from_jt(j: &JtMin) -> Self {
        Self {
            mu_star: DirectionJson::from_direction(&j.mu_star),
            value: fmt_q(&j.value),
            value_approx: to_f64(&j.value),
            weight_moment: qs(&j.weight_moment),
            certificate: j
                .certificate
                .iter()
                .map(|(v, l)| CertificateJson {
                    vertex: qs(v),
                    weight: fmt_q(l),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KindJson {
    Product,
    NormalCone { center: Vec<usize>, fraction: String },
    Custom,
}

impl KindJson {
    pub fn from_kind(k: &ConfigKind) -> Self {
        match k {
            ConfigKind::Product => KindJson::Product,
            ConfigKind::NormalCone { center, fraction } => KindJson::NormalCone {
                center: center.facets.clone(),
                fraction: fmt_q(fraction),
            },
            ConfigKind::Custom => KindJson::Custom,
        }
    }

    pub fn build(&self) -> Result<ConfigKind, Error> {
        Ok(match self {
            KindJson::Product => ConfigKind::Product,
            KindJson::NormalCone { center, fraction } => ConfigKind::NormalCone {
                center: Face { facets: center.clone() },
                fraction: parse_q(fraction)?,
            },
            KindJson::Custom => ConfigKind::Custom,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationJson {
    pub label: String,
    pub kind: KindJson,
    pub pieces: Vec<AffineJson>,
    pub energies: EnergiesJson,
    pub jt_min: JtMinJson,
    pub ratio: String,
}

impl EvaluationJson {
    pub fn from_eval(e: &Evaluation) -> Self {
        Self {
            label: e.label.clone(),
            kind: KindJson::from_kind(&e.kind),
            pieces: e.config.pieces().iter().map(AffineJson::from).collect(),
            energies: EnergiesJson::from_energies(&e.energies),
            jt_min: JtMinJson::from_jt(&e.jt),
            ratio: e.ratio.label(),
        }
    }

    pub fn member(&self) -> Result<FamilyMember, Error> {
        let pieces = self
            .pieces
            .iter()
            .map(Affine::try_from)
            .collect::<Result<Vec<_>, _>>()?;
        if pieces.is_empty() {
            return Err(Error::Invalid(format!("configuration {:?} has no pieces", self.label)));
        }
        Ok(FamilyMember {
            label: self.label.clone(),
            kind: self.kind.build()?,
            config: PLConcave::from_pieces(pieces),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub alpha: Vec<String>,
    pub facet: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub polytope: PolytopeJson,
    pub eta_mode: String,
    pub family: String,
    pub volume: String,
    pub volume_approx: f64,
    pub barycenter: Vec<String>,
    pub barycenter_approx: Vec<f64>,
    pub futaki: Vec<String>,
    pub futaki_approx: Vec<f64>,
    pub eta: DirectionJson,
    pub eta_approx: DirectionApprox,
    pub m_x: String,
    pub m_x_approx: f64,
    pub reductive: bool,
    pub roots: Vec<Vec<String>>,
    pub configurations: Vec<EvaluationJson>,
    pub uniform_epsilon: Option<String>,
    pub uniform_epsilon_approx: Option<f64>,
    pub verdict: String,
    pub exit_code: i32,
}

pub fn eta_mode_string(choice: &EtaChoice) -> String {
    match choice {
        EtaChoice::Auto => "auto".into(),
        EtaChoice::Zero => "zero".into(),
        EtaChoice::Given(d) => {
            let mut v = qs(&d.mu);
            v.push(fmt_q(&d.c));
            v.join(",")
        }
    }
}

/// `auto`, `zero`, or comma-separated rationals `μ_1,…,μ_n[,c]` (missing `c` is centred).
pub fn parse_eta_mode(s: &str, p: &Polytope) -> Result<EtaChoice, Error> {
    match s.trim() {
        "auto" => Ok(EtaChoice::Auto),
        "zero" => Ok(EtaChoice::Zero),
        other => {
            let parts: Vec<String> = other.split(',').map(|x| x.trim().to_string()).collect();
            let v = parse_vec(&parts)?;
            let n = p.dim();
            if v.len() == n {
                Ok(EtaChoice::Given(crate::invariants::centred(p, v)))
            } else if v.len() == n + 1 {
                Ok(EtaChoice::Given(Direction::from_coords(&v)))
            } else {
                Err(Error::Invalid(format!("eta vector needs {n} or {} entries", n + 1)))
            }
        }
    }
}

impl ReportJson {
    pub fn from_report(r: &StabilityReport, p: &Polytope, name: Option<&str>, choice: &EtaChoice) -> Self {
        let inv = &r.invariants;
        Self {
            polytope: PolytopeJson::from_polytope(p, name),
            eta_mode: eta_mode_string(choice),
            family: r.family.clone(),
            volume: fmt_q(&inv.volume),
            volume_approx: to_f64(&inv.volume),
            barycenter: qs(&inv.barycenter),
            barycenter_approx: qa(&inv.barycenter),
            futaki: qs(&inv.futaki),
            futaki_approx: qa(&inv.futaki),
            eta: DirectionJson::from_direction(&inv.eta),
            eta_approx: DirectionApprox::from_direction(&inv.eta),
            m_x: fmt_q(&inv.m_x),
            m_x_approx: to_f64(&inv.m_x),
            reductive: inv.reductive,
            roots: inv
                .roots
                .iter()
                .map(|r| r.alpha.iter().map(|x| x.to_string()).collect())
                .collect(),
            configurations: r.evaluations.iter().map(EvaluationJson::from_eval).collect(),
            uniform_epsilon: r.uniform_epsilon.as_ref().map(fmt_q),
            uniform_epsilon_approx: r.uniform_epsilon.as_ref().map(to_f64),
            verdict: r.verdict.as_str().to_string(),
            exit_code: r.verdict.exit_code(),
        }
    }

    /// Inputs needed to recompute this report: polytope, η choice and the tested family.
    pub fn inputs(&self) -> Result<(Polytope, EtaChoice, FamilySpec), Error> {
        let p = self.polytope.build()?;
        let choice = parse_eta_mode(&self.eta_mode, &p)?;
        let members = self
            .configurations
            .iter()
            .map(EvaluationJson::member)
            .collect::<Result<Vec<_>, _>>()?;
        let spec = match self.family.as_str() {
            "standard" => FamilySpec::Standard,
            "products" => FamilySpec::Products,
            "normal-cones" => FamilySpec::NormalCones,
            _ => FamilySpec::Custom(members.clone()),
        };
        // the stored members are authoritative
        let spec = match spec {
            FamilySpec::Custom(_) => spec,
            named => {
                let rebuilt = crate::stability::build_family(&p, &named, &choice.resolve(&p)?);
                if rebuilt == members {
                    named
                } else {
                    FamilySpec::Custom(members)
                }
            }
        };
        Ok((p, choice, spec))
    }

    pub fn verdict(&self) -> Option<Verdict> {
        Verdict::parse(&self.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsJson {
    pub barycenter: Vec<String>,
    pub futaki: Vec<String>,
    pub eta: DirectionJson,
    pub m_x: String,
    pub reductive: bool,
    pub roots: Vec<Vec<String>>,
}
