//! Reading and writing descriptors in the `msd-1` structured-text format.
//!
//! The format is JSON with five sections: `orbits`, `ends`, `rotation`,
//! `f_action` and `smale_order`. Slot indices, the end permutation and the
//! per-node return flags are all derivable from the rest; they are stored
//! anyway so files are self-describing, and re-checked on read.

use super::*;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "msd-1";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("unsupported version `{0}` (expected `msd-1`)")]
    Version(String),
    #[error("{0}")]
    Field(String),
    #[error("descriptor is not well formed: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type EndRef = (String, usize, String);

#[derive(Serialize, Deserialize)]
struct RawDescriptor {
    version: Option<String>,
    orbits: Option<Vec<RawOrbit>>,
    ends: Option<Vec<RawEnd>>,
    rotation: Option<Vec<RawRotation>>,
    f_action: Option<RawFAction>,
    smale_order: Option<Vec<(String, String)>>,
}

#[derive(Serialize, Deserialize)]
struct RawOrbit {
    name: String,
    kind: OrbitKind,
    period: usize,
    #[serde(rename = "type")]
    otype: RawType,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawType {
    Node(i8),
    Saddle([i8; 2]),
}

#[derive(Serialize, Deserialize)]
struct RawEnd {
    saddle: String,
    point: usize,
    branch: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    node: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    twist: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    het: Option<RawHet>,
}

#[derive(Serialize, Deserialize)]
struct RawHet {
    target: String,
    crossed: String,
}

#[derive(Serialize, Deserialize)]
struct RawRotation {
    node: String,
    point: usize,
    order: Vec<EndRef>,
}

#[derive(Serialize, Deserialize)]
struct RawFAction {
    ends: Vec<(EndRef, EndRef)>,
    node_return: Vec<RawNodeReturn>,
}

#[derive(Serialize, Deserialize)]
struct RawNodeReturn {
    node: String,
    preserves_cyclic_order: bool,
}

fn branch_str(b: Branch) -> &'static str {
    match b {
        Branch::UPlus => "u+",
        Branch::UMinus => "u-",
        Branch::SPlus => "s+",
        Branch::SMinus => "s-",
    }
}

fn parse_branch(s: &str) -> Result<Branch, SchemaError> {
    match s {
        "u+" => Ok(Branch::UPlus),
        "u-" => Ok(Branch::UMinus),
        "s+" => Ok(Branch::SPlus),
        "s-" => Ok(Branch::SMinus),
        other => Err(SchemaError::Field(format!("unknown branch tag `{other}`"))),
    }
}

fn end_ref(d: &Descriptor, s: SepRef) -> EndRef {
    (
        d.orbits[s.saddle].name.clone(),
        s.point,
        branch_str(s.branch).to_string(),
    )
}

pub fn to_json(d: &Descriptor) -> serde_json::Value {
    let orbits: Vec<RawOrbit> = d
        .orbits
        .iter()
        .map(|o| RawOrbit {
            name: o.name.clone(),
            kind: o.kind,
            period: o.period,
            otype: match o.otype {
                OrientationType::Node { sigma } => RawType::Node(sigma),
                OrientationType::Saddle { nu, lambda } => RawType::Saddle([nu, lambda]),
            },
        })
        .collect();
    let ends: Vec<RawEnd> = d
        .ends
        .iter()
        .map(|(s, a)| {
            let mut raw = RawEnd {
                saddle: d.orbits[s.saddle].name.clone(),
                point: s.point,
                branch: branch_str(s.branch).to_string(),
                node: None,
                node_point: None,
                slot: None,
                twist: None,
                het: None,
            };
            match a {
                Attachment::Node { node, point, twist } => {
                    raw.node = Some(d.orbits[*node].name.clone());
                    raw.node_point = Some(*point);
                    raw.slot = d
                        .rotations
                        .get(&(*node, *point))
                        .and_then(|r| r.iter().position(|e| e == s));
                    raw.twist = Some(*twist);
                }
                Attachment::Het { target, crossed } => {
                    raw.het = Some(RawHet {
                        target: d.orbits[*target].name.clone(),
                        crossed: branch_str(*crossed).to_string(),
                    });
                }
            }
            raw
        })
        .collect();
    let rotation: Vec<RawRotation> = d
        .rotations
        .iter()
        .map(|((node, point), order)| RawRotation {
            node: d.orbits[*node].name.clone(),
            point: *point,
            order: order.iter().map(|s| end_ref(d, *s)).collect(),
        })
        .collect();
    let f_action = RawFAction {
        ends: d
            .ends
            .keys()
            .map(|s| (end_ref(d, *s), end_ref(d, d.f_sep(*s))))
            .collect(),
        node_return: d
            .orbits
            .iter()
            .filter(|o| o.kind != OrbitKind::Saddle)
            .map(|o| RawNodeReturn {
                node: o.name.clone(),
                preserves_cyclic_order: o.otype.return_sign() == 1,
            })
            .collect(),
    };
    let smale_order: Vec<(String, String)> = d
        .smale
        .iter()
        .map(|(a, b)| (d.orbits[*a].name.clone(), d.orbits[*b].name.clone()))
        .collect();
    serde_json::to_value(RawDescriptor {
        version: Some(SCHEMA_VERSION.to_string()),
        orbits: Some(orbits),
        ends: Some(ends),
        rotation: Some(rotation),
        f_action: Some(f_action),
        smale_order: Some(smale_order),
    })
    .expect("descriptor serialization cannot fail")
}

pub fn write_str(d: &Descriptor) -> String {
    serde_json::to_string_pretty(&to_json(d)).expect("descriptor serialization cannot fail")
}

pub fn read_str(text: &str) -> Result<Descriptor, SchemaError> {
    let raw: RawDescriptor = serde_json::from_str(text)?;
    let version = raw.version.ok_or(SchemaError::MissingSection("version"))?;
    if version != SCHEMA_VERSION {
        return Err(SchemaError::Version(version));
    }
    let orbits = raw.orbits.ok_or(SchemaError::MissingSection("orbits"))?;
    let ends = raw.ends.ok_or(SchemaError::MissingSection("ends"))?;
    let rotation = raw.rotation.ok_or(SchemaError::MissingSection("rotation"))?;
    let f_action = raw.f_action.ok_or(SchemaError::MissingSection("f_action"))?;
    let smale_order = raw
        .smale_order
        .ok_or(SchemaError::MissingSection("smale_order"))?;

    let mut d = Descriptor::default();
    for o in &orbits {
        if d.orbit_by_name(&o.name).is_some() {
            return Err(SchemaError::Field(format!("duplicate orbit `{}`", o.name)));
        }
        d.orbits.push(Orbit {
            name: o.name.clone(),
            kind: o.kind,
            period: o.period,
            otype: match o.otype {
                RawType::Node(sigma) => OrientationType::Node { sigma },
                RawType::Saddle([nu, lambda]) => OrientationType::Saddle { nu, lambda },
            },
        });
    }
    let names: Vec<String> = d.orbits.iter().map(|o| o.name.clone()).collect();
    let lookup = move |name: &str| -> Result<OrbitId, SchemaError> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SchemaError::Field(format!("unknown orbit `{name}`")))
    };
    let mut parsed_ends = BTreeMap::new();
    for e in &ends {
        let s = SepRef {
            saddle: lookup(&e.saddle)?,
            point: e.point,
            branch: parse_branch(&e.branch)?,
        };
        let attach = match (&e.node, &e.het) {
            (Some(node), None) => Attachment::Node {
                node: lookup(node)?,
                point: e.node_point.ok_or_else(|| {
                    SchemaError::Field(format!("end {}.{}.{}: missing node_point", e.saddle, e.point, e.branch))
                })?,
                twist: e.twist.unwrap_or(1),
            },
            (None, Some(h)) => Attachment::Het {
                target: lookup(&h.target)?,
                crossed: parse_branch(&h.crossed)?,
            },
            _ => {
                return Err(SchemaError::Field(format!(
                    "end {}.{}.{}: exactly one of `node` or `het` is required",
                    e.saddle, e.point, e.branch
                )))
            }
        };
        if parsed_ends.insert(s, attach).is_some() {
            return Err(SchemaError::Field(format!(
                "duplicate end {}.{}.{}",
                e.saddle, e.point, e.branch
            )));
        }
    }
    d.ends = parsed_ends;
    for r in &rotation {
        let node = lookup(&r.node)?;
        let mut order = Vec::new();
        for (name, point, branch) in &r.order {
            order.push(SepRef {
                saddle: lookup(name)?,
                point: *point,
                branch: parse_branch(branch)?,
            });
        }
        d.rotations.insert((node, r.point), order);
    }
    for (a, b) in &smale_order {
        d.smale.insert((lookup(a)?, lookup(b)?));
    }
    // verify slot indices against the rotation section
    for e in &ends {
        if let (Some(node), Some(point), Some(slot)) = (&e.node, e.node_point, e.slot) {
            let nid = lookup(node)?;
            let s = SepRef {
                saddle: lookup(&e.saddle)?,
                point: e.point,
                branch: parse_branch(&e.branch)?,
            };
            let ok = d
                .rotations
                .get(&(nid, point))
                .and_then(|r| r.iter().position(|x| *x == s))
                == Some(slot);
            if !ok {
                return Err(SchemaError::Field(format!(
                    "end {}.{}.{}: slot {} disagrees with the rotation section",
                    e.saddle, e.point, e.branch, slot
                )));
            }
        }
    }
    // verify the stored end permutation against the derived f-action
    for (from, to) in &f_action.ends {
        let s = SepRef {
            saddle: lookup(&from.0)?,
            point: from.1,
            branch: parse_branch(&from.2)?,
        };
        let t = SepRef {
            saddle: lookup(&to.0)?,
            point: to.1,
            branch: parse_branch(&to.2)?,
        };
        if d.f_sep(s) != t {
            return Err(SchemaError::Field(format!(
                "f_action maps {s} to {t}, which contradicts the orbit data"
            )));
        }
    }
    for nr in &f_action.node_return {
        let id = lookup(&nr.node)?;
        let expect = d.orbits[id].otype.return_sign() == 1;
        if nr.preserves_cyclic_order != expect {
            return Err(SchemaError::Field(format!(
                "node_return for `{}` disagrees with its orientation type",
                nr.node
            )));
        }
    }
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(SchemaError::Invalid(violations));
    }
    Ok(d)
}

pub fn write_file(d: &Descriptor, path: &std::path::Path) -> Result<(), SchemaError> {
    std::fs::write(path, write_str(d))?;
    Ok(())
}

pub fn read_file(path: &std::path::Path) -> Result<Descriptor, SchemaError> {
    read_str(&std::fs::read_to_string(path)?)
}
