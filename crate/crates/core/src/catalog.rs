//! Registry of integrable classes with replayable derivations.
//!
//! Entries are read from `data/catalog.json` (embedded at build time), or from the
//! file named by `ABELKIT_CATALOG`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::{construct_family, shape_classify, substitute_params, Family, FamilyParams, RationalODE, Shape};
use crate::parse::parse_value;
use crate::ratfun::RationalFunction as RF;
use crate::solve::{check_first_integral, solve_ail, solve_normal_form};
use crate::symbol::{t, Symbol};
use crate::tower;
use crate::transform::Transform;

pub const EMBEDDED: &str = include_str!("../data/catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Column {
    #[serde(rename = "AIL")]
    Ail,
    #[serde(rename = "AIR")]
    Air,
    #[serde(rename = "AIA")]
    Aia,
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::Ail => "AIL",
            Column::Air => "AIR",
            Column::Aia => "AIA",
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Source {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub after: usize,
    pub equation: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    pub class: Column,
    pub equation: String,
    pub source: Source,
    #[serde(default)]
    pub chain: Vec<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkpoints: Vec<Checkpoint>,
    /// Parameters of the representative rewritten as `name^2` of a chain parameter.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reparam: BTreeMap<String, String>,
}

pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
}

fn parse_params(p: &BTreeMap<String, String>) -> Result<FamilyParams> {
    p.iter().map(|(k, v)| Ok((k.clone(), parse_value(v)?))).collect()
}

impl Catalog {
    /// The catalog from `ABELKIT_CATALOG` if set, the embedded one otherwise.
    pub fn load() -> Result<Catalog> {
        match std::env::var_os("ABELKIT_CATALOG") {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.to_string_lossy())))?;
                Catalog::from_str(&text)
            }
            None => Catalog::embedded(),
        }
    }

    pub fn embedded() -> Result<Catalog> {
        Catalog::from_str(EMBEDDED)
    }

    pub fn from_str(text: &str) -> Result<Catalog> {
        let entries: Vec<CatalogEntry> = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("catalog: {e}")))?;
        Ok(Catalog { entries })
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id).ok_or_else(|| Error::Invalid(format!("no catalog entry `{id}`")))
    }

    /// The printed representative, with the reparameterization applied.
    pub fn representative(&self, id: &str) -> Result<RationalODE> {
        let e = self.get(id)?;
        let rep = RationalODE::parse(&e.equation)?;
        Ok(RationalODE::new(substitute_params(&rep.rhs, &parse_params(&e.reparam)?)?))
    }

    fn chain(&self, e: &CatalogEntry) -> Result<Vec<Transform>> {
        e.chain.iter().map(Transform::from_json).collect()
    }

    /// Source equation of an entry before its chain.
    pub fn source_equation(&self, id: &str) -> Result<RationalODE> {
        let e = self.get(id)?;
        let params = parse_params(&e.source.params)?;
        match (&e.source.family, &e.source.entry) {
            (Some(f), None) => construct_family(Family::from_name(f)?, &params),
            (None, Some(src)) => {
                let rep = RationalODE::parse(&self.get(src)?.equation)?;
                Ok(RationalODE::new(substitute_params(&rep.rhs, &params)?))
            }
            _ => Err(Error::Invalid(format!("entry `{id}` needs exactly one of `family` and `entry`"))),
        }
    }

    /// Replays the derivation of an entry.
    pub fn verify_fit(&self, id: &str) -> Result<FitReport> {
        let e = self.get(id)?;
        let mut eq = self.source_equation(id)?;
        let mut steps = Vec::new();
        let mut checkpoints_ok = true;
        for (i, tr) in self.chain(e)?.into_iter().enumerate() {
            eq = tr.apply(&eq)?;
            steps.push((tr, eq.clone()));
            for c in e.checkpoints.iter().filter(|c| c.after == i + 1) {
                checkpoints_ok &= RationalODE::parse(&c.equation)? == eq;
            }
        }
        let rep = self.representative(id)?;
        let residual = &eq.rhs - &rep.rhs;
        Ok(FitReport { id: id.to_string(), identity: residual.is_zero() && checkpoints_ok, residual, steps, result: eq })
    }

    /// Table column implied by the derivation: an inversion leaves the AIL/AIR subclasses.
    pub fn derived_column(&self, id: &str) -> Result<Column> {
        let e = self.get(id)?;
        let chain = self.chain(e)?;
        if chain.iter().any(|t| matches!(t, Transform::Inversion)) {
            return Ok(Column::Aia);
        }
        match (&e.source.family, &e.source.entry) {
            (Some(f), _) => Ok(match Family::from_name(f)? {
                Family::Ail8 | Family::Gtib | Family::Ail4 | Family::AilFirstKind | Family::Ail2 | Family::Ail1 => Column::Ail,
                Family::Air10 => Column::Air,
                Family::Aia16 | Family::InvAia => Column::Aia,
            }),
            (None, Some(src)) => self.derived_column(src),
            _ => Err(Error::Invalid(format!("entry `{id}` has no source"))),
        }
    }

    /// First integral of an entry's chain-parameter form, when its derivation starts
    /// from a family solvable by quadrature.
    pub fn first_integral(&self, id: &str) -> Result<Option<RF>> {
        let e = self.get(id)?;
        let params = parse_params(&e.source.params)?;
        let base = match (&e.source.family, &e.source.entry) {
            (Some(f), None) => match Family::from_name(f)? {
                Family::Ail8 => Some(solve_ail(&params)?.psi),
                fam @ (Family::Ail4 | Family::Ail2 | Family::Ail1) => Some(solve_normal_form(fam, &params)?.psi),
                Family::AilFirstKind => {
                    // AIL4 → first kind through x = t, y = 1/u − t
                    let psi = solve_normal_form(Family::Ail4, &params)?.psi;
                    let tr = Transform::KindShift { g1: RF::one(), g0: RF::var(t()) }.inverse()?;
                    Some(tr.pull_back(&psi)?)
                }
                _ => None,
            },
            (None, Some(src)) => match self.first_integral(src)? {
                Some(psi) => {
                    // parameters of the source representative, mapped through its reparameterization
                    let src_entry = self.get(src)?;
                    let mut map = std::collections::HashMap::new();
                    for (k, v) in &params {
                        match src_entry.reparam.get(k) {
                            Some(expr) => {
                                let root = expr.strip_suffix("^2").ok_or_else(|| {
                                    Error::Unsupported(format!("reparameterization `{expr}` is not a square"))
                                })?;
                                map.insert(Symbol::named(root), tower::root(v, 2)?);
                            }
                            None => {
                                map.insert(Symbol::named(k), v.clone());
                            }
                        }
                    }
                    Some(tower::subst(&psi, &map)?)
                }
                None => None,
            },
            _ => None,
        };
        let Some(mut psi) = base else { return Ok(None) };
        for tr in self.chain(e)? {
            psi = tr.pull_back(&psi)?;
        }
        Ok(Some(psi))
    }
}

/// Outcome of replaying a derivation.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub id: String,
    pub identity: bool,
    pub residual: RF,
    pub steps: Vec<(Transform, RationalODE)>,
    pub result: RationalODE,
}

impl FitReport {
    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> =
            self.steps.iter().map(|(t, e)| json!({"transform": t.to_json(), "equation": e.to_string()})).collect();
        json!({"id": self.id, "identity": self.identity, "residual": self.residual.to_string(), "steps": steps})
    }
}

pub fn list_catalog() -> Result<Vec<CatalogEntry>> {
    Ok(Catalog::load()?.entries)
}

pub fn verify_fit(id: &str) -> Result<FitReport> {
    Catalog::load()?.verify_fit(id)
}

/// A new class obtained by exchanging the variables of a solvable AIA member.
#[derive(Clone, Debug)]
pub struct InverseClass {
    pub equation: RationalODE,
    pub first_integral: Option<RF>,
    /// How the transported first integral was verified.
    pub check: Option<&'static str>,
    pub abel: bool,
    pub known: Option<String>,
}

impl InverseClass {
    pub fn to_json(&self) -> Value {
        json!({
            "equation": self.equation.to_string(),
            "first_integral": self.first_integral.as_ref().map(|p| p.to_string()),
            "verified": self.check.is_some(),
            "abel": self.abel,
            "known": self.known,
        })
    }
}

/// x ↔ y on an AIA-form equation, transporting Ψ(x, y) to Ψ(y, x).
pub fn generate_inverse_class(e: &RationalODE, psi: Option<&RF>) -> Result<InverseClass> {
    if !shape_classify(e).has(Shape::AiaForm) {
        return Err(Error::Shape(format!("{e} is not of AIA form")));
    }
    let out = Transform::Inversion.apply(e)?;
    let (first_integral, check) = match psi {
        Some(psi) => {
            check_first_integral(e, psi)?;
            let moved = Transform::Inversion.pull_back(psi)?;
            let check = check_first_integral(&out, &moved)?;
            (Some(moved), Some(check))
        }
        None => (None, None),
    };
    let report = shape_classify(&out);
    let abel = report.has(Shape::AbelFirstKind) || report.has(Shape::AbelSecondKind);
    let catalog = Catalog::load()?;
    let mut known = None;
    for entry in &catalog.entries {
        if catalog.representative(&entry.id)? == out {
            known = Some(entry.id.clone());
            break;
        }
    }
    Ok(InverseClass { equation: out, first_integral, check, abel, known })
}

/// Same as [`generate_inverse_class`] for a catalog entry and its transported first integral.
pub fn generate_inverse_of_entry(id: &str) -> Result<InverseClass> {
    let catalog = Catalog::load()?;
    let rep = catalog.representative(id)?;
    let psi = catalog.first_integral(id)?;
    generate_inverse_class(&rep, psi.as_ref())
}
