//! Builders for standard examples: one-dimensional product systems over a
//! ZS datum, k-graph product systems, self-similar k-graph actions and the
//! ℰ construction over C(Λ⁰)⋊G.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{BetaSource, ZsSystem};
use crate::bowtie::{build_crossed_product, group_elements, CrossedProduct};
use crate::error::{AlgebraError, Result};
use crate::module::Correspondence;
use crate::product_system::{IndexWindow, ProductSystem};
use crate::report::ViolationReport;
use crate::scalar::{c, identity, real_diag, zeros, ComplexMatrix, FiniteCStarAlgebra, Tolerance};
use crate::semigroup::{Group, GroupElement, Semigroup, SemigroupElement};
use crate::zs::ZsData;

/// X_p = ℂv_p with v_p v_q = v_{pq} and β_g(λv_p) = λv_{g·p}.
pub fn trivial_system(zs: ZsData, p_radius: usize, g_radius: usize) -> Result<ZsSystem> {
    let ball = zs.p.enumerate_ball(p_radius);
    let window = IndexWindow::new(zs.p.clone(), ball.elements)?;
    let system = ProductSystem::from_fn(
        window,
        Arc::new(FiniteCStarAlgebra::complex()),
        |_| Ok(Correspondence::hilbert_space(1)),
        |_, _, _| Ok(identity(1)),
    )?;
    let gball = zs.g.enumerate_ball(g_radius);
    ZsSystem::new(system, zs, gball, BetaSource::Direct(Arc::new(|_, _| Ok(identity(1)))))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub color: usize,
    pub range: usize,
    pub source: usize,
}

/// Module convention for k-graph correspondences: `Source` evaluates inner
/// products and the right action at s(μ); `Range` uses the opposite graph,
/// so both are evaluated at r(μ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Source,
    Range,
}

/// A morphism in normal form: edges with non-decreasing colors, composable
/// left to right (s(e_i) = r(e_{i+1})). Vertices have no edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub edges: Vec<usize>,
    pub vertex: usize,
}

/// A finite k-graph given by its coloured edges and the commuting squares
/// ef = f'e' for colors c(e) > c(f).
#[derive(Debug, Clone)]
pub struct KGraph {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    squares: HashMap<(usize, usize), (usize, usize)>,
    inverse_squares: HashMap<(usize, usize), (usize, usize)>,
}

impl KGraph {
    pub fn new(k: usize, vertices: Vec<String>, edges: Vec<Edge>, squares: Vec<((usize, usize), (usize, usize))>) -> Result<Self> {
        let nv = vertices.len();
        for e in &edges {
            if e.color >= k || e.range >= nv || e.source >= nv {
                return Err(AlgebraError::Domain(format!("edge {} has color or endpoint out of range", e.name)));
            }
        }
        let mut g = KGraph {
            k,
            vertices,
            edges,
            squares: HashMap::new(),
            inverse_squares: HashMap::new(),
        };
        for ((a, b), (x, y)) in squares {
            let ok = [a, b, x, y].iter().all(|&i| i < g.edges.len())
                && g.edges[a].color > g.edges[b].color
                && g.edges[x].color == g.edges[b].color
                && g.edges[y].color == g.edges[a].color
                && g.composable(a, b)
                && g.composable(x, y)
                && g.edges[a].range == g.edges[x].range
                && g.edges[b].source == g.edges[y].source;
            if !ok {
                return Err(AlgebraError::Domain(format!(
                    "square ({a}, {b}) -> ({x}, {y}) is not a valid factorisation"
                )));
            }
            if g.squares.insert((a, b), (x, y)).is_some() || g.inverse_squares.insert((x, y), (a, b)).is_some() {
                return Err(AlgebraError::Domain(format!("square ({a}, {b}) -> ({x}, {y}) repeats a path")));
            }
        }
        for a in 0..g.edges.len() {
            for b in 0..g.edges.len() {
                if !g.composable(a, b) || g.edges[a].color == g.edges[b].color {
                    continue;
                }
                let table = if g.edges[a].color > g.edges[b].color {
                    &g.squares
                } else {
                    &g.inverse_squares
                };
                if !table.contains_key(&(a, b)) {
                    return Err(AlgebraError::Domain(format!(
                        "path {}{} has no factorisation in the other order",
                        g.edges[a].name, g.edges[b].name
                    )));
                }
            }
        }
        Ok(g)
    }

    /// A 1-graph from (name, range, source) triples.
    pub fn directed_graph(vertices: usize, edges: &[(&str, usize, usize)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(name, range, source)| Edge {
                name: name.into(),
                color: 0,
                range,
                source,
            })
            .collect();
        Self::new(1, (0..vertices).map(|v| format!("v{v}")).collect(), edges, vec![])
    }

    fn composable(&self, a: usize, b: usize) -> bool {
        self.edges[a].source == self.edges[b].range
    }

    /// The graph with ranges and sources exchanged and paths reversed.
    pub fn opposite(&self) -> KGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.range,
                range: e.source,
                ..e.clone()
            })
            .collect();
        // ef = f'e' reversed reads e'f' = fe.
        let squares = self.inverse_squares.iter().map(|(&(x, y), &(a, b))| ((y, x), (b, a))).collect();
        let inverse_squares = self.squares.iter().map(|(&(a, b), &(x, y))| ((y, x), (b, a))).collect();
        KGraph {
            k: self.k,
            vertices: self.vertices.clone(),
            edges,
            squares,
            inverse_squares,
        }
    }

    pub fn range(&self, mu: &Path) -> usize {
        mu.edges.first().map_or(mu.vertex, |&e| self.edges[e].range)
    }

    pub fn source(&self, mu: &Path) -> usize {
        mu.edges.last().map_or(mu.vertex, |&e| self.edges[e].source)
    }

    pub fn degree(&self, mu: &Path) -> SemigroupElement {
        let mut d = vec![0; self.k];
        for &e in &mu.edges {
            d[self.edges[e].color] += 1;
        }
        SemigroupElement(d)
    }

    fn path(&self, edges: Vec<usize>) -> Path {
        let vertex = edges.first().map_or(0, |&e| self.edges[e].range);
        Path { edges, vertex }
    }

    pub fn vertex_path(&self, v: usize) -> Path {
        Path { edges: vec![], vertex: v }
    }

    fn normalize(&self, mut edges: Vec<usize>) -> Path {
        loop {
            let mut changed = false;
            for i in 0..edges.len().saturating_sub(1) {
                if self.edges[edges[i]].color > self.edges[edges[i + 1]].color {
                    let (x, y) = self.squares[&(edges[i], edges[i + 1])];
                    edges[i] = x;
                    edges[i + 1] = y;
                    changed = true;
                }
            }
            if !changed {
                return self.path(edges);
            }
        }
    }

    /// μν, or `None` when s(μ) ≠ r(ν).
    pub fn compose(&self, mu: &Path, nu: &Path) -> Option<Path> {
        if self.source(mu) != self.range(nu) {
            return None;
        }
        if mu.edges.is_empty() {
            return Some(nu.clone());
        }
        if nu.edges.is_empty() {
            return Some(mu.clone());
        }
        let mut e = mu.edges.clone();
        e.extend(&nu.edges);
        Some(self.normalize(e))
    }

    /// The unique μ = αβ with d(α) = d1.
    pub fn factor(&self, mu: &Path, d1: &SemigroupElement) -> Result<(Path, Path)> {
        let d = self.degree(mu);
        if d1.0.iter().zip(&d.0).any(|(a, b)| a > b) {
            return Err(AlgebraError::Domain(format!("degree {:?} does not divide {:?}", d1.0, d.0)));
        }
        let mut target = Vec::new();
        for (col, &n) in d1.0.iter().enumerate() {
            target.extend(std::iter::repeat_n(col, n as usize));
        }
        let split = target.len();
        for (col, (&n, &m)) in d.0.iter().zip(&d1.0).enumerate() {
            target.extend(std::iter::repeat_n(col, (n - m) as usize));
        }
        let mut edges = mu.edges.clone();
        for (t, &want) in target.iter().enumerate().take(edges.len()) {
            let j = (t..edges.len())
                .find(|&j| self.edges[edges[j]].color == want)
                .expect("target colors are a rearrangement");
            for i in (t..j).rev() {
                let pair = (edges[i], edges[i + 1]);
                let (x, y) = if self.edges[pair.0].color > self.edges[pair.1].color {
                    self.squares[&pair]
                } else {
                    self.inverse_squares[&pair]
                };
                edges[i] = x;
                edges[i + 1] = y;
            }
        }
        let alpha = if split == 0 {
            self.vertex_path(self.range(mu))
        } else {
            self.path(edges[..split].to_vec())
        };
        let beta = if split == edges.len() {
            self.vertex_path(self.source(mu))
        } else {
            self.path(edges[split..].to_vec())
        };
        Ok((alpha, beta))
    }

    /// Λ^p in normal form, sorted.
    pub fn morphisms(&self, p: &SemigroupElement) -> Vec<Path> {
        if p.0.iter().all(|&x| x == 0) {
            return (0..self.vertices.len()).map(|v| self.vertex_path(v)).collect();
        }
        let mut colors = Vec::new();
        for (col, &n) in p.0.iter().enumerate() {
            colors.extend(std::iter::repeat_n(col, n as usize));
        }
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == colors.len() {
                out.push(self.path(prefix));
                continue;
            }
            let col = colors[prefix.len()];
            for (e, edge) in self.edges.iter().enumerate() {
                if edge.color == col && prefix.last().is_none_or(|&l| self.composable(l, e)) {
                    let mut next = prefix.clone();
                    next.push(e);
                    stack.push(next);
                }
            }
        }
        out.sort();
        out
    }

    pub fn show(&self, mu: &Path) -> String {
        if mu.edges.is_empty() {
            return self.vertices[mu.vertex].clone();
        }
        mu.edges.iter().map(|&e| self.edges[e].name.as_str()).collect()
    }
}

/// Checks unique factorisation on every degree pair of the ball: the map
/// (α, β) ↦ αβ from composable pairs is a bijection onto Λ^{d1+d2}.
pub fn validate_kgraph(l: &KGraph, radius: usize) -> ViolationReport {
    let mut rep = ViolationReport::new();
    rep.touch("factorisation");
    let ball = Semigroup::nk(l.k).enumerate_ball(radius);
    for d in ball.iter() {
        let all = l.morphisms(d);
        for d1 in ball.iter() {
            if d1.0.iter().zip(&d.0).any(|(a, b)| a > b) {
                continue;
            }
            let d2 = SemigroupElement(d.0.iter().zip(&d1.0).map(|(a, b)| a - b).collect());
            let mut count = 0;
            for a in l.morphisms(d1) {
                for b in l.morphisms(&d2) {
                    if let Some(ab) = l.compose(&a, &b) {
                        count += 1;
                        let back = l.factor(&ab, d1);
                        rep.expect("factorisation", back.as_ref().is_ok_and(|(x, y)| *x == a && *y == b), || {
                            format!("{}·{} does not factor back", l.show(&a), l.show(&b))
                        });
                    }
                }
            }
            rep.expect("factorisation", count == all.len(), || {
                format!("{count} composable pairs for {} morphisms of degree {:?}", all.len(), d.0)
            });
        }
    }
    rep
}

fn morphism_table(l: &KGraph, window: &IndexWindow<Semigroup>) -> Vec<Vec<Path>> {
    window.elements.iter().map(|p| l.morphisms(p)).collect()
}

fn vertex_indicator(n: usize, v: usize) -> ComplexMatrix {
    let mut d = vec![0.0; n];
    d[v] = 1.0;
    real_diag(&d)
}

/// X(Λ) over the ℓ∞ ball of ℕᵏ: X_p has basis χ_μ for μ ∈ Λ^p and
/// coefficients C(Λ⁰).
pub fn kgraph_system(l: &KGraph, radius: usize, convention: Convention) -> Result<ProductSystem<Semigroup>> {
    if convention == Convention::Range {
        return kgraph_system(&l.opposite(), radius, Convention::Source);
    }
    let s = Semigroup::nk(l.k);
    let window = IndexWindow::new(s.clone(), s.enumerate_ball(radius).elements)?;
    let nv = l.vertices.len();
    let coeff = Arc::new(FiniteCStarAlgebra::diagonal(nv));
    let table = morphism_table(l, &window);
    let lookup: Vec<HashMap<&Path, usize>> = table.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (m, i)).collect()).collect();
    let fiber = |pi: usize| {
        let ms = &table[pi];
        let m = ms.len();
        let at = |f: &dyn Fn(&Path) -> usize, v: usize| real_diag(&ms.iter().map(|mu| f64::from(u8::from(f(mu) == v))).collect::<Vec<_>>());
        let right = (0..nv).map(|v| at(&|mu| l.source(mu), v)).collect();
        let left = (0..nv).map(|v| at(&|mu| l.range(mu), v)).collect();
        let inner = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { vertex_indicator(nv, l.source(&ms[i])) } else { zeros(nv, nv) })
                    .collect()
            })
            .collect();
        Correspondence::new(coeff.clone(), m, right, left, inner)
    };
    let mult = |pi: usize, qi: usize, ri: usize| {
        let (mp, mq) = (&table[pi], &table[qi]);
        let mut out = zeros(table[ri].len(), mp.len() * mq.len());
        for (i, mu) in mp.iter().enumerate() {
            for (j, nu) in mq.iter().enumerate() {
                if let Some(w) = l.compose(mu, nu) {
                    let r = *lookup[ri]
                        .get(&w)
                        .ok_or_else(|| AlgebraError::Domain(format!("{} missing from its degree", l.show(&w))))?;
                    out[(r, i * mq.len() + j)] = c(1.0, 0.0);
                }
            }
        }
        Ok(out)
    };
    ProductSystem::from_fn(window, coeff.clone(), fiber, mult)
}

/// A self-similar action of a finite group on a k-graph, given on vertices
/// and edges: `vertex[g][v]`, `edge[g][e]` and `restriction[g][e]`.
#[derive(Debug, Clone)]
pub struct SelfSimilarKGraphAction {
    pub group: Group,
    pub vertex: Vec<Vec<usize>>,
    pub edge: Vec<Vec<usize>>,
    pub restriction: Vec<Vec<usize>>,
}

impl SelfSimilarKGraphAction {
    pub fn trivial(l: &KGraph, group: Group) -> Result<Self> {
        let n = group_elements(&group)?.len();
        Ok(SelfSimilarKGraphAction {
            vertex: vec![(0..l.vertices.len()).collect(); n],
            edge: vec![(0..l.edges.len()).collect(); n],
            restriction: (0..n).map(|g| vec![g; l.edges.len()]).collect(),
            group,
        })
    }

    /// g·μ and g|_μ, computed edge by edge along the normal form.
    pub fn apply(&self, l: &KGraph, g: usize, mu: &Path) -> (Path, usize) {
        if mu.edges.is_empty() {
            return (l.vertex_path(self.vertex[g][mu.vertex]), g);
        }
        let mut cur = g;
        let mut out = Vec::with_capacity(mu.edges.len());
        for &e in &mu.edges {
            out.push(self.edge[cur][e]);
            cur = self.restriction[cur][e];
        }
        (l.path(out), cur)
    }

    fn mul(&self, g: usize, h: usize) -> usize {
        self.group
            .multiply(&GroupElement(vec![g as i64]), &GroupElement(vec![h as i64]))
            .expect("indices are valid")
            .0[0] as usize
    }
}

/// Checks the self-similar compatibility conditions on the ball: degree
/// preservation, r(g·μ) = g·r(μ), s(g·μ) = g|_μ·s(μ), bijectivity on each
/// Λ^p, (gh)·μ = g·(h·μ), (gh)|_μ = g|_{h·μ}h|_μ, and
/// g·(μν) = (g·μ)(g|_μ·ν) with g|_{μν} = (g|_μ)|_ν.
pub fn validate_selfsimilar(l: &KGraph, a: &SelfSimilarKGraphAction, radius: usize) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["degree", "range", "source", "bijection", "group-action", "factorisation"] {
        rep.touch(tag);
    }
    let n = a.vertex.len();
    let shape_ok = a.edge.len() == n
        && a.restriction.len() == n
        && a.vertex
            .iter()
            .all(|v| v.len() == l.vertices.len() && v.iter().all(|&x| x < l.vertices.len()))
        && a.edge.iter().all(|v| v.len() == l.edges.len() && v.iter().all(|&x| x < l.edges.len()))
        && a.restriction.iter().all(|v| v.len() == l.edges.len() && v.iter().all(|&x| x < n));
    if !shape_ok {
        rep.fail("degree", "action tables have the wrong shape", f64::INFINITY);
        return rep;
    }
    let name = |g: usize| a.group.show(&GroupElement(vec![g as i64]));
    let ball = Semigroup::nk(l.k).enumerate_ball(radius);
    for d in ball.iter() {
        let ms = l.morphisms(d);
        for g in 0..n {
            let mut images = Vec::new();
            for mu in &ms {
                let (gm, gr) = a.apply(l, g, mu);
                rep.expect("degree", l.degree(&gm) == *d, || format!("g={}, μ={}", name(g), l.show(mu)));
                let valid = gm.edges.windows(2).all(|w| l.composable(w[0], w[1]));
                rep.expect("range", valid && l.range(&gm) == a.vertex[g][l.range(mu)], || {
                    format!("g={}, μ={}", name(g), l.show(mu))
                });
                rep.expect("source", valid && l.source(&gm) == a.vertex[gr][l.source(mu)], || {
                    format!("g={}, μ={}", name(g), l.show(mu))
                });
                images.push(l.normalize(gm.edges.clone()));
                for h in 0..n {
                    let (hm, hr) = a.apply(l, h, mu);
                    let (ghm, ghr) = a.apply(l, a.mul(g, h), mu);
                    let (g_hm, g_hr) = a.apply(l, g, &hm);
                    rep.expect("group-action", ghm == g_hm && ghr == a.mul(g_hr, hr), || {
                        format!("g={}, h={}, μ={}", name(g), name(h), l.show(mu))
                    });
                }
            }
            images.sort();
            images.dedup();
            rep.expect("bijection", images.len() == ms.len(), || format!("g={} on degree {:?}", name(g), d.0));
        }
        for d1 in ball.iter() {
            if d1.0.iter().zip(&d.0).any(|(x, y)| x > y) {
                continue;
            }
            for w in &ms {
                let Ok((mu, nu)) = l.factor(w, d1) else { continue };
                for g in 0..n {
                    let (gw, gwr) = a.apply(l, g, w);
                    let (gm, gmr) = a.apply(l, g, &mu);
                    let (gn, gnr) = a.apply(l, gmr, &nu);
                    let ok = l
                        .compose(&gm, &gn)
                        .is_some_and(|x| x == l.normalize(gw.edges.clone()) || gw.edges.is_empty() && x == gw)
                        && gwr == gnr;
                    rep.expect("factorisation", ok, || format!("g={}, μ={}, ν={}", name(g), l.show(&mu), l.show(&nu)));
                }
            }
        }
    }
    rep
}

/// Checks d(μ) = d(ν) ⟹ g|_μ = g|_ν on the ball and returns the restriction
/// maps on the unit degrees, or the first witnessing pair.
pub fn degree_restriction_maps(l: &KGraph, a: &SelfSimilarKGraphAction, radius: usize) -> Result<Vec<Vec<usize>>> {
    let n = a.vertex.len();
    let ball = Semigroup::nk(l.k).enumerate_ball(radius);
    for d in ball.iter() {
        let ms = l.morphisms(d);
        for g in 0..n {
            let mut first: Option<(&Path, usize)> = None;
            for mu in ms.iter().filter(|m| !m.edges.is_empty()) {
                let r = a.apply(l, g, mu).1;
                match first {
                    None => first = Some((mu, r)),
                    Some((nu, rn)) if rn != r => {
                        let name = |x: usize| a.group.show(&GroupElement(vec![x as i64]));
                        return Err(AlgebraError::refused(format!(
                            "restrictions differ on equal degrees: g={}, μ={}, ν={}, g|_μ={}, g|_ν={}",
                            name(g),
                            l.show(nu),
                            l.show(mu),
                            name(rn),
                            name(r)
                        )));
                    }
                    _ => {}
                }
            }
        }
    }
    let mut maps = vec![(0..n).collect::<Vec<_>>(); l.k];
    for (col, map) in maps.iter_mut().enumerate() {
        if let Some(e) = l.edges.iter().position(|e| e.color == col) {
            *map = (0..n).map(|g| a.restriction[g][e]).collect();
        }
    }
    Ok(maps)
}

fn permutation_beta(
    l: &KGraph,
    a: &SelfSimilarKGraphAction,
    window: &IndexWindow<Semigroup>,
) -> HashMap<(GroupElement, SemigroupElement), ComplexMatrix> {
    let mut out = HashMap::new();
    for p in &window.elements {
        let ms = l.morphisms(p);
        let idx: BTreeMap<&Path, usize> = ms.iter().enumerate().map(|(i, m)| (m, i)).collect();
        for g in 0..a.vertex.len() {
            let mut m = zeros(ms.len(), ms.len());
            for (i, mu) in ms.iter().enumerate() {
                let gm = a.apply(l, g, mu).0;
                let gm = if gm.edges.is_empty() { gm } else { l.normalize(gm.edges) };
                if let Some(&j) = idx.get(&gm) {
                    m[(j, i)] = c(1.0, 0.0);
                }
            }
            out.insert((GroupElement(vec![g as i64]), p.clone()), m);
        }
    }
    out
}

/// The homogeneous ZS system β_g(χ_μ) = χ_{g·μ} over ℕᵏ with g·p = p and
/// g|_p = g|_μ for any μ of degree p.
pub fn selfsimilar_beta(l: &KGraph, a: &SelfSimilarKGraphAction, radius: usize, convention: Convention) -> Result<ZsSystem> {
    let maps = degree_restriction_maps(l, a, radius)?;
    let zs = ZsData::degree_restriction(l.k, a.group.clone(), maps)?;
    let system = kgraph_system(l, radius, convention)?;
    let graph = if convention == Convention::Range { l.opposite() } else { l.clone() };
    let table = Arc::new(permutation_beta(&graph, a, &system.window));
    let gball = a.group.enumerate_ball(a.vertex.len());
    let beta = BetaSource::Direct(Arc::new(move |g: &GroupElement, p: &SemigroupElement| {
        table
            .get(&(g.clone(), p.clone()))
            .cloned()
            .ok_or_else(|| AlgebraError::WindowOverflow(format!("β at degree {:?}", p.0)))
    }));
    ZsSystem::new(system, zs, gball, beta)
}

/// The crossed product C(Λ⁰)⋊G for the vertex action.
pub fn vertex_crossed_product(l: &KGraph, a: &SelfSimilarKGraphAction, tol: Tolerance) -> Result<CrossedProduct> {
    let nv = l.vertices.len();
    build_crossed_product(
        Arc::new(FiniteCStarAlgebra::diagonal(nv)),
        a.group.clone(),
        |g| {
            let gi = g.0[0] as usize;
            let mut m = zeros(nv, nv);
            for v in 0..nv {
                m[(a.vertex[gi][v], v)] = c(1.0, 0.0);
            }
            Ok(m)
        },
        tol,
    )
}

/// ℰ_p spanned by χ_μ u_g (index i*|G| + g) with
/// (δ_v u_h)(χ_μ u_g) = δ_{v, h·r(μ)} χ_{h·μ} u_{h|_μ g},
/// (χ_μ u_g)(δ_v u_h) = δ_{s(μ), g·v} χ_μ u_{gh},
/// ⟨χ_μ u_g, χ_ν u_h⟩ = δ_{μ,ν} δ_{g⁻¹·s(μ)} u_{g⁻¹h} and
/// (χ_μ u_g)(χ_ν u_h) = δ_{s(μ), g·r(ν)} χ_{μ(g·ν)} u_{g|_ν h}.
pub fn cal_e_system(l: &KGraph, a: &SelfSimilarKGraphAction, radius: usize, tol: Tolerance) -> Result<ProductSystem<Semigroup>> {
    let cp = vertex_crossed_product(l, a, tol)?;
    let n = cp.order();
    let nv = l.vertices.len();
    let s = Semigroup::nk(l.k);
    let window = IndexWindow::new(s.clone(), s.enumerate_ball(radius).elements)?;
    let table = morphism_table(l, &window);
    let lookup: Vec<HashMap<&Path, usize>> = table.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (m, i)).collect()).collect();
    let inv: Vec<usize> = (0..n)
        .map(|g| cp.group.inverse(&GroupElement(vec![g as i64])).map(|x| x.0[0] as usize))
        .collect::<Result<_>>()?;
    let norm = |p: Path| if p.edges.is_empty() { p } else { l.normalize(p.edges) };
    let big = cp.algebra.clone();
    let fiber = |pi: usize| {
        let ms = &table[pi];
        let dim = ms.len() * n;
        let mut right = vec![zeros(dim, dim); nv * n];
        let mut left = vec![zeros(dim, dim); nv * n];
        for v in 0..nv {
            for h in 0..n {
                for (i, mu) in ms.iter().enumerate() {
                    for g in 0..n {
                        if l.source(mu) == a.vertex[g][v] {
                            right[v * n + h][(i * n + a.mul(g, h), i * n + g)] = c(1.0, 0.0);
                        }
                        if v == a.vertex[h][l.range(mu)] {
                            let (hm, hr) = a.apply(l, h, mu);
                            let j = lookup[pi][&norm(hm)];
                            left[v * n + h][(j * n + a.mul(hr, g), i * n + g)] = c(1.0, 0.0);
                        }
                    }
                }
            }
        }
        let mut inner = vec![vec![zeros(big.ambient_dim(), big.ambient_dim()); dim]; dim];
        for (i, mu) in ms.iter().enumerate() {
            for g in 0..n {
                let v = a.vertex[inv[g]][l.source(mu)];
                for h in 0..n {
                    inner[i * n + g][i * n + h] = cp.element(&vertex_indicator(nv, v), &GroupElement(vec![a.mul(inv[g], h) as i64]))?;
                }
            }
        }
        Correspondence::new(big.clone(), dim, right, left, inner)
    };
    let mult = |pi: usize, qi: usize, ri: usize| {
        let (mp, mq) = (&table[pi], &table[qi]);
        let mut out = zeros(table[ri].len() * n, mp.len() * n * mq.len() * n);
        for (i, mu) in mp.iter().enumerate() {
            for g in 0..n {
                for (j, nu) in mq.iter().enumerate() {
                    let (gn, gr) = a.apply(l, g, nu);
                    let Some(w) = l.compose(mu, &norm(gn)) else { continue };
                    let r = lookup[ri][&w];
                    for h in 0..n {
                        out[(r * n + a.mul(gr, h), (i * n + g) * (mq.len() * n) + j * n + h)] = c(1.0, 0.0);
                    }
                }
            }
        }
        Ok(out)
    };
    ProductSystem::from_fn(window, big.clone(), fiber, mult)
}

/// Standard test systems.
pub mod examples {
    use super::*;
    use crate::zs::odometer_zs;

    /// The odometer acting on the one-dimensional system over {0,1}*.
    pub fn odometer_system(p_radius: usize, g_radius: usize) -> Result<ZsSystem> {
        trivial_system(odometer_zs(), p_radius, g_radius)
    }

    /// One vertex with loops a, b.
    pub fn two_loop_graph() -> KGraph {
        KGraph::directed_graph(1, &[("a", 0, 0), ("b", 0, 0)]).expect("valid graph")
    }

    /// ℤ/2 exchanging the two loops with trivial restriction.
    pub fn swap_loops_action() -> SelfSimilarKGraphAction {
        SelfSimilarKGraphAction {
            group: Group::cyclic(2),
            vertex: vec![vec![0], vec![0]],
            edge: vec![vec![0, 1], vec![1, 0]],
            restriction: vec![vec![0, 0], vec![0, 0]],
        }
    }

    pub fn swap_loops_system(radius: usize) -> Result<ZsSystem> {
        selfsimilar_beta(&two_loop_graph(), &swap_loops_action(), radius, Convention::Source)
    }

    /// Vertices v0, v1 with edges f1, f2: v0 → v1 and h1, h2: v1 → v0.
    pub fn two_vertex_graph() -> KGraph {
        KGraph::directed_graph(2, &[("f1", 1, 0), ("f2", 1, 0), ("h1", 0, 1), ("h2", 0, 1)]).expect("valid graph")
    }

    /// The non-permutation twist on X_1: f ↦ Vf ∈ span{h}, h ↦ V⁻¹h ∈ span{f}
    /// with V = [[1, i], [i, 1]]/√2.
    pub fn twisted_swap() -> ComplexMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = crate::scalar::from_rows(&[vec![c(r, 0.0), c(0.0, r)], vec![c(0.0, r), c(r, 0.0)]]);
        let mut m = zeros(4, 4);
        m.view_mut((2, 0), (2, 2)).copy_from(&v);
        m.view_mut((0, 2), (2, 2)).copy_from(&v.adjoint());
        m
    }

    /// X(Λ) for [`two_vertex_graph`] over ℕ with ℤ/2 swapping the vertices,
    /// g|_n = g, and β given on degree one by [`twisted_swap`] and extended
    /// multiplicatively.
    pub fn twisted_two_vertex_system(radius: usize) -> Result<ZsSystem> {
        let g = Group::cyclic(2);
        let system = kgraph_system(&two_vertex_graph(), radius, Convention::Source)?;
        let zs = ZsData::degree_restriction(1, g.clone(), vec![vec![0, 1]])?;
        let gball = g.enumerate_ball(2);
        let swap = crate::scalar::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let source = BetaSource::Atoms {
            atom: Arc::new(|g: &GroupElement, _| Ok(if g.0[0] == 0 { identity(4) } else { twisted_swap() })),
            algebra: Arc::new(move |g: &GroupElement| Ok(if g.0[0] == 0 { identity(2) } else { swap.clone() })),
        };
        ZsSystem::new(system, zs, gball, source)
    }

    /// The one-dimensional system over ℕ² with ℤ/2 exchanging coordinates.
    pub fn coordinate_swap_system(radius: usize) -> Result<ZsSystem> {
        let zs = ZsData::coordinate_permutation(2, Group::cyclic(2), vec![vec![0, 1], vec![1, 0]])?;
        trivial_system(zs, radius, 2)
    }
}
