//! Run configurations: TOML documents with named object sections and a
//! `[run]` section selecting the system, windows and suites.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;
use zslab_core::action::BetaSource;
use zslab_core::generators::{Edge, KGraph, SelfSimilarKGraphAction};
use zslab_core::scalar::{c, ComplexMatrix};
use zslab_core::zs::LetterData;
use zslab_core::{Convention, Group, GroupElement, Semigroup, Tolerance, ZsData};

pub const SUITES: [&str; 10] = [
    "zs-axioms",
    "action-axioms",
    "bowtie",
    "bowtie-tilde",
    "toeplitz",
    "covariance",
    "round-trip",
    "cp",
    "nica",
    "generators",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("[{section}]: {message}")]
    Invalid { section: String, message: String },
}

fn invalid(section: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        section: section.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub run: RunSection,
    #[serde(default)]
    pub semigroup: BTreeMap<String, SemigroupDef>,
    #[serde(default)]
    pub group: BTreeMap<String, GroupDef>,
    #[serde(default)]
    pub zs: BTreeMap<String, ZsDef>,
    #[serde(default)]
    pub graph: BTreeMap<String, GraphDef>,
    #[serde(default)]
    pub action: BTreeMap<String, ActionDef>,
    #[serde(default)]
    pub system: BTreeMap<String, SystemDef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationKind {
    #[default]
    Fock,
    Scalar,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub name: Option<String>,
    pub system: String,
    #[serde(default = "default_suites")]
    pub suites: Vec<String>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub radius_p: i64,
    pub radius_g: i64,
    pub fock_ball: i64,
    #[serde(default)]
    pub representation: RepresentationKind,
    #[serde(default = "default_cap")]
    pub witness_cap: usize,
}

fn default_suites() -> Vec<String> {
    vec!["all".into()]
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_cap() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SemigroupDef {
    Nk { k: usize },
    FreeMonoid { alphabet: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupDef {
    Trivial,
    Cyclic { order: usize },
    FreeAbelian { rank: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Override {
    pub g: String,
    pub p: String,
    pub value: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZsDef {
    pub semigroup: String,
    pub group: String,
    /// trivial | odometer | letters | coordinate-permutation | degree-restriction
    pub rule: String,
    /// Per group generator, per letter: [image letter, restriction].
    pub letters: Option<Vec<Vec<[String; 2]>>>,
    pub perms: Option<Vec<Vec<usize>>>,
    pub maps: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub restriction_override: Vec<Override>,
    #[serde(default)]
    pub action_override: Vec<Override>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDef {
    pub name: String,
    #[serde(default)]
    pub color: usize,
    pub range: String,
    pub source: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDef {
    #[serde(default = "one")]
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDef>,
    /// [e, f, f', e'] for ef = f'e' with color(e) > color(f).
    #[serde(default)]
    pub squares: Vec<[String; 4]>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementMaps {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub restrictions: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDef {
    pub graph: String,
    pub group: String,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementMaps>,
}

/// A matrix entry: a real number or [re, im].
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

pub type MatrixDef = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaDef {
    /// Per group element: β on the degree-one fiber of each coordinate.
    pub atoms: BTreeMap<String, Vec<MatrixDef>>,
    /// Per group element: β on the coefficient algebra, in its basis.
    pub algebra: BTreeMap<String, MatrixDef>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaOverride {
    pub g: String,
    pub p: String,
    pub matrix: MatrixDef,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDef {
    /// trivial | kgraph
    pub kind: String,
    pub zs: Option<String>,
    pub graph: Option<String>,
    pub action: Option<String>,
    #[serde(default)]
    pub convention: Convention,
    pub beta: Option<BetaDef>,
    #[serde(default)]
    pub beta_override: Vec<BetaOverride>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Windows {
    pub radius_p: usize,
    pub radius_g: usize,
    pub fock_ball: usize,
}

#[derive(Debug, Clone, Default)]
pub struct WindowOverrides {
    pub radius_p: Option<i64>,
    pub radius_g: Option<i64>,
    pub fock_ball: Option<i64>,
    pub tolerance: Option<f64>,
}

/// How the selected system is produced.
#[derive(Debug, Clone)]
pub enum SystemSpec {
    Trivial {
        zs: ZsData,
    },
    SelfSimilar {
        graph: KGraph,
        action: SelfSimilarKGraphAction,
        convention: Convention,
    },
    KGraphBeta {
        graph: KGraph,
        zs: ZsData,
        convention: Convention,
        atoms: BTreeMap<GroupElement, Vec<ComplexMatrix>>,
        algebra: BTreeMap<GroupElement, ComplexMatrix>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub text_hash: String,
    pub windows: Windows,
    pub tolerance: Tolerance,
    pub suites: Vec<String>,
    pub representation: RepresentationKind,
    pub witness_cap: usize,
    pub system: SystemSpec,
    pub beta_overrides: Vec<(GroupElement, zslab_core::SemigroupElement, ComplexMatrix)>,
}

pub fn hash_text(text: &str) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &WindowOverrides::default())
}

pub fn parse_config_with(text: &str, over: &WindowOverrides) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    resolve(&raw, hash_text(text), over)
}

fn window(name: &str, v: i64) -> Result<usize, ConfigError> {
    if v <= 0 {
        return Err(invalid("run", format!("{name} must be positive, got {v}")));
    }
    Ok(v as usize)
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &str, name: &str, from: &str) -> Result<&'a T, ConfigError> {
    map.get(name)
        .ok_or_else(|| invalid(from, format!("unresolved reference to {kind} '{name}'")))
}

fn resolve(raw: &RawConfig, text_hash: String, over: &WindowOverrides) -> Result<RunConfig, ConfigError> {
    let run = &raw.run;
    let windows = Windows {
        radius_p: window("radius_p", over.radius_p.unwrap_or(run.radius_p))?,
        radius_g: window("radius_g", over.radius_g.unwrap_or(run.radius_g))?,
        fock_ball: window("fock_ball", over.fock_ball.unwrap_or(run.fock_ball))?,
    };
    if windows.fock_ball > windows.radius_p {
        return Err(invalid(
            "run",
            format!("fock_ball {} exceeds radius_p {}", windows.fock_ball, windows.radius_p),
        ));
    }
    let tolerance = Tolerance::new(over.tolerance.unwrap_or(run.tolerance)).map_err(|e| invalid("run", e.to_string()))?;
    let mut suites = Vec::new();
    for s in &run.suites {
        if s == "all" {
            suites.extend(SUITES.iter().map(|s| s.to_string()));
        } else if SUITES.contains(&s.as_str()) {
            suites.push(s.clone());
        } else {
            return Err(invalid("run", format!("unknown suite '{s}'")));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    suites.retain(|s| seen.insert(s.clone()));

    let sys_name = &run.system;
    let def = lookup(&raw.system, "system", sys_name, "run")?;
    let section = format!("system.{sys_name}");
    let mut resolver = Resolver { raw };
    let system = match def.kind.as_str() {
        "trivial" => {
            let zs_name = def.zs.as_ref().ok_or_else(|| invalid(&section, "a trivial system needs 'zs'"))?;
            SystemSpec::Trivial {
                zs: resolver.zs(zs_name, &section)?,
            }
        }
        "kgraph" => {
            let g_name = def.graph.as_ref().ok_or_else(|| invalid(&section, "a kgraph system needs 'graph'"))?;
            let graph = resolver.graph(g_name, &section)?;
            match (&def.action, &def.zs, &def.beta) {
                (Some(a), None, None) => SystemSpec::SelfSimilar {
                    action: resolver.action(a, &graph, &section)?,
                    graph,
                    convention: def.convention,
                },
                (None, Some(z), Some(beta)) => {
                    let zs = resolver.zs(z, &section)?;
                    let mut atoms = BTreeMap::new();
                    for (g, ms) in &beta.atoms {
                        let el = parse_group_el(&zs.g, g, &section)?;
                        atoms.insert(el, ms.iter().map(|m| matrix(m, &section)).collect::<Result<Vec<_>, _>>()?);
                    }
                    let mut algebra = BTreeMap::new();
                    for (g, m) in &beta.algebra {
                        algebra.insert(parse_group_el(&zs.g, g, &section)?, matrix(m, &section)?);
                    }
                    SystemSpec::KGraphBeta {
                        graph,
                        zs,
                        convention: def.convention,
                        atoms,
                        algebra,
                    }
                }
                (None, None, None) => {
                    let action = SelfSimilarKGraphAction::trivial(&graph, Group::trivial()).map_err(|e| invalid(&section, e.to_string()))?;
                    SystemSpec::SelfSimilar {
                        graph,
                        action,
                        convention: def.convention,
                    }
                }
                _ => return Err(invalid(&section, "give either 'action', or 'zs' together with [beta], or neither")),
            }
        }
        other => return Err(invalid(&section, format!("unknown system kind '{other}'"))),
    };

    let group = match &system {
        SystemSpec::Trivial { zs } | SystemSpec::KGraphBeta { zs, .. } => zs.g.clone(),
        SystemSpec::SelfSimilar { action, .. } => action.group.clone(),
    };
    let semigroup = match &system {
        SystemSpec::Trivial { zs } | SystemSpec::KGraphBeta { zs, .. } => zs.p.clone(),
        SystemSpec::SelfSimilar { graph, .. } => Semigroup::nk(graph.k),
    };
    let mut beta_overrides = Vec::new();
    for o in &def.beta_override {
        let g = parse_group_el(&group, &o.g, &section)?;
        let p = semigroup.parse(&o.p).map_err(|e| invalid(&section, format!("beta_override p: {e}")))?;
        beta_overrides.push((g, p, matrix(&o.matrix, &section)?));
    }

    Ok(RunConfig {
        name: run.name.clone().unwrap_or_else(|| sys_name.clone()),
        text_hash,
        windows,
        tolerance,
        suites,
        representation: run.representation,
        witness_cap: run.witness_cap,
        system,
        beta_overrides,
    })
}

fn parse_group_el(g: &Group, s: &str, section: &str) -> Result<GroupElement, ConfigError> {
    g.parse(s).map_err(|e| invalid(section, e.to_string()))
}

fn matrix(m: &MatrixDef, section: &str) -> Result<ComplexMatrix, ConfigError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(invalid(section, "matrix rows have different lengths"));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| match m[i][j] {
        Entry::Real(x) => c(x, 0.0),
        Entry::Complex([re, im]) => c(re, im),
    }))
}

struct Resolver<'a> {
    raw: &'a RawConfig,
}

impl Resolver<'_> {
    fn semigroup(&self, name: &str, from: &str) -> Result<Semigroup, ConfigError> {
        Ok(match lookup(&self.raw.semigroup, "semigroup", name, from)? {
            SemigroupDef::Nk { k } => Semigroup::nk(*k),
            SemigroupDef::FreeMonoid { alphabet } => {
                let letters: Vec<char> = alphabet.chars().collect();
                if letters.is_empty() {
                    return Err(invalid(format!("semigroup.{name}"), "empty alphabet"));
                }
                Semigroup::free_monoid(&letters)
            }
        })
    }

    fn group(&self, name: &str, from: &str) -> Result<Group, ConfigError> {
        Ok(match lookup(&self.raw.group, "group", name, from)? {
            GroupDef::Trivial => Group::trivial(),
            GroupDef::Cyclic { order } if *order > 0 => Group::cyclic(*order),
            GroupDef::Cyclic { .. } => return Err(invalid(format!("group.{name}"), "order must be positive")),
            GroupDef::FreeAbelian { rank } => Group::free_abelian(*rank),
        })
    }

    fn zs(&mut self, name: &str, from: &str) -> Result<ZsData, ConfigError> {
        let def = lookup(&self.raw.zs, "zs", name, from)?;
        let section = format!("zs.{name}");
        let p = self.semigroup(&def.semigroup, &section)?;
        let g = self.group(&def.group, &section)?;
        let err = |e: zslab_core::AlgebraError| invalid(&section, e.to_string());
        let mut d = match def.rule.as_str() {
            "trivial" => ZsData::trivial(p, g),
            "odometer" => {
                let d = zslab_core::odometer_zs();
                if d.p != p || d.g != g {
                    return Err(invalid(
                        &section,
                        "the odometer needs a free monoid on \"01\" and the free abelian group of rank 1",
                    ));
                }
                d
            }
            "letters" => {
                let table = def.letters.as_ref().ok_or_else(|| invalid(&section, "rule 'letters' needs 'letters'"))?;
                let mut letters = Vec::new();
                for row in table {
                    let mut images = Vec::new();
                    for [img, res] in row {
                        let w = p.parse(img).map_err(err)?;
                        if w.0.len() != 1 {
                            return Err(invalid(&section, format!("'{img}' is not a letter")));
                        }
                        images.push((w.0[0], g.parse(res).map_err(err)?));
                    }
                    letters.push(LetterData { images });
                }
                ZsData::from_letters(p, g, letters).map_err(err)?
            }
            "coordinate-permutation" => {
                let perms = def
                    .perms
                    .clone()
                    .ok_or_else(|| invalid(&section, "rule 'coordinate-permutation' needs 'perms'"))?;
                let zslab_core::semigroup::SemigroupKind::Nk(k) = p.kind else {
                    return Err(invalid(&section, "coordinate permutations need ℕᵏ"));
                };
                ZsData::coordinate_permutation(k, g, perms).map_err(err)?
            }
            "degree-restriction" => {
                let maps = def
                    .maps
                    .as_ref()
                    .ok_or_else(|| invalid(&section, "rule 'degree-restriction' needs 'maps'"))?;
                let zslab_core::semigroup::SemigroupKind::Nk(k) = p.kind else {
                    return Err(invalid(&section, "degree restrictions need ℕᵏ"));
                };
                let maps = maps
                    .iter()
                    .map(|row| row.iter().map(|s| g.parse(s).map(|x| x.0[0] as usize)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(err)?;
                ZsData::degree_restriction(k, g, maps).map_err(err)?
            }
            other => return Err(invalid(&section, format!("unknown rule '{other}'"))),
        };
        if !def.restriction_override.is_empty() || !def.action_override.is_empty() {
            let pr = self.raw.run.radius_p.max(0) as usize;
            let gr = self.raw.run.radius_g.max(0) as usize;
            d = d.tabulate(&d.p.enumerate_ball(pr), &d.g.enumerate_ball(gr));
            for o in &def.restriction_override {
                let (gg, pp) = (d.g.parse(&o.g).map_err(err)?, d.p.parse(&o.p).map_err(err)?);
                let v = d.g.parse(&o.value).map_err(err)?;
                d.set_restriction(&gg, &pp, v).map_err(err)?;
            }
            for o in &def.action_override {
                let (gg, pp) = (d.g.parse(&o.g).map_err(err)?, d.p.parse(&o.p).map_err(err)?);
                let v = d.p.parse(&o.value).map_err(err)?;
                d.set_action(&gg, &pp, v).map_err(err)?;
            }
        }
        Ok(d)
    }

    fn graph(&self, name: &str, from: &str) -> Result<KGraph, ConfigError> {
        let def = lookup(&self.raw.graph, "graph", name, from)?;
        let section = format!("graph.{name}");
        let vertex = |v: &str| {
            def.vertices
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| invalid(&section, format!("unresolved reference to vertex '{v}'")))
        };
        let edges = def
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    name: e.name.clone(),
                    color: e.color,
                    range: vertex(&e.range)?,
                    source: vertex(&e.source)?,
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        let edge = |n: &str| {
            edges
                .iter()
                .position(|x| x.name == n)
                .ok_or_else(|| invalid(&section, format!("unresolved reference to edge '{n}'")))
        };
        let squares = def
            .squares
            .iter()
            .map(|[a, b, c, d]| Ok(((edge(a)?, edge(b)?), (edge(c)?, edge(d)?))))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        KGraph::new(def.k, def.vertices.clone(), edges, squares).map_err(|e| invalid(&section, e.to_string()))
    }

    fn action(&self, name: &str, graph: &KGraph, from: &str) -> Result<SelfSimilarKGraphAction, ConfigError> {
        let def = lookup(&self.raw.action, "action", name, from)?;
        let section = format!("action.{name}");
        let group = self.group(&def.group, &section)?;
        let elements = zslab_core::bowtie::group_elements(&group).map_err(|e| invalid(&section, e.to_string()))?;
        let mut a = SelfSimilarKGraphAction::trivial(graph, group.clone()).map_err(|e| invalid(&section, e.to_string()))?;
        for label in def.elements.keys() {
            group.parse(label).map_err(|e| invalid(&section, e.to_string()))?;
        }
        for (gi, g) in elements.iter().enumerate() {
            let label = group.show(g);
            let Some(maps) = def.elements.get(&label) else {
                if *g != group.identity() {
                    return Err(invalid(&section, format!("no maps given for group element '{label}'")));
                }
                continue;
            };
            let find = |names: &[String], pool: &dyn Fn(&str) -> Option<usize>, what: &str| {
                names
                    .iter()
                    .map(|n| pool(n).ok_or_else(|| invalid(&section, format!("unresolved reference to {what} '{n}'"))))
                    .collect::<Result<Vec<_>, _>>()
            };
            let v = find(&maps.vertices, &|n| graph.vertices.iter().position(|x| x == n), "vertex")?;
            let e = find(&maps.edges, &|n| graph.edges.iter().position(|x| x.name == n), "edge")?;
            let r = find(&maps.restrictions, &|n| elements.iter().position(|x| group.show(x) == n), "group element")?;
            if v.len() != graph.vertices.len() || e.len() != graph.edges.len() || r.len() != graph.edges.len() {
                return Err(invalid(&section, format!("maps for '{label}' must list every vertex and edge")));
            }
            a.vertex[gi] = v;
            a.edge[gi] = e;
            a.restriction[gi] = r;
        }
        Ok(a)
    }
}

/// β given on degree-one atoms and on the coefficient algebra.
pub fn atoms_source(atoms: BTreeMap<GroupElement, Vec<ComplexMatrix>>, algebra: BTreeMap<GroupElement, ComplexMatrix>) -> BetaSource {
    let atoms = Arc::new(atoms);
    let algebra = Arc::new(algebra);
    BetaSource::Atoms {
        atom: Arc::new(move |g: &GroupElement, i: usize| {
            atoms
                .get(g)
                .and_then(|ms| ms.get(i))
                .cloned()
                .ok_or_else(|| zslab_core::AlgebraError::Domain(format!("no atom matrix for coordinate {i} at {g:?}")))
        }),
        algebra: Arc::new(move |g: &GroupElement| {
            algebra
                .get(g)
                .cloned()
                .ok_or_else(|| zslab_core::AlgebraError::Domain(format!("no algebra matrix at {g:?}")))
        }),
    }
}
