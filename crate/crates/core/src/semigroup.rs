//! Discrete semigroups with identity, groups, finite balls and right LCM
//! oracles.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::report::ViolationReport;

/// Normal form of a semigroup element: the exponent vector in ℕᵏ, the
/// letter indices of a word, or a one-entry table index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SemigroupElement(pub Vec<u32>);

/// Normal form of a group element: the vector in ℤᵏ or a one-entry table
/// index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<i64>);

/// A monoid that can index a product system: P itself or P⋈G.
pub trait IndexMonoid {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn identity(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    /// A canonical r with aP ∩ bP = rP, or `None` for an empty intersection.
    fn lcm(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Option<Self::Elem>>;
    /// The c with ac = b, if any.
    fn left_quotient(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Option<Self::Elem>>;
    fn show(&self, a: &Self::Elem) -> String;
}

/// A finite window of elements, identity first.
#[derive(Debug, Clone)]
pub struct Ball<T> {
    pub elements: Vec<T>,
    pub radius: usize,
    pub notes: Vec<String>,
    index: HashMap<T, usize>,
}

impl<T: Clone + Eq + Hash> Ball<T> {
    pub fn new(elements: Vec<T>, radius: usize) -> Self {
        let mut seen = HashMap::new();
        let mut uniq = Vec::with_capacity(elements.len());
        for e in elements {
            if !seen.contains_key(&e) {
                seen.insert(e.clone(), uniq.len());
                uniq.push(e);
            }
        }
        Ball {
            elements: uniq,
            radius,
            notes: Vec::new(),
            index: seen,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }

    pub fn position(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.elements.iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SemigroupKind {
    Nk(usize),
    FreeMonoid(Vec<char>),
    FiniteTable {
        table: Vec<Vec<usize>>,
        identity: usize,
        labels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Semigroup {
    pub kind: SemigroupKind,
}

impl Semigroup {
    pub fn nk(k: usize) -> Self {
        Semigroup { kind: SemigroupKind::Nk(k) }
    }

    pub fn free_monoid(alphabet: &[char]) -> Self {
        Semigroup {
            kind: SemigroupKind::FreeMonoid(alphabet.to_vec()),
        }
    }

    /// A semigroup given by its full multiplication table. The table is
    /// checked for shape, associativity and the identity law.
    pub fn finite_table(table: Vec<Vec<usize>>, identity: usize, labels: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if identity >= n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(AlgebraError::Dimension(format!("malformed {n}-element table")));
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("#{i}")).collect());
        if labels.len() != n {
            return Err(AlgebraError::Dimension("label count differs from table size".into()));
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(AlgebraError::Unsupported(format!("{} is not a two-sided identity", labels[identity])));
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(AlgebraError::Unsupported(format!(
                            "table is not associative at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(Semigroup {
            kind: SemigroupKind::FiniteTable { table, identity, labels },
        })
    }

    /// Word from a string over the alphabet (ε or the empty string for the
    /// identity).
    pub fn word(&self, s: &str) -> Result<SemigroupElement> {
        self.parse(s)
    }

    pub fn nk_elem(v: &[u32]) -> SemigroupElement {
        SemigroupElement(v.to_vec())
    }

    pub fn is_valid(&self, p: &SemigroupElement) -> bool {
        match &self.kind {
            SemigroupKind::Nk(k) => p.0.len() == *k,
            SemigroupKind::FreeMonoid(a) => p.0.iter().all(|&x| (x as usize) < a.len()),
            SemigroupKind::FiniteTable { table, .. } => p.0.len() == 1 && (p.0[0] as usize) < table.len(),
        }
    }

    fn require(&self, p: &SemigroupElement) -> Result<()> {
        if self.is_valid(p) {
            Ok(())
        } else {
            Err(AlgebraError::Domain(format!("{:?}", p.0)))
        }
    }

    /// Length measure used for balls: total degree, word length, or 0/1
    /// for table elements.
    pub fn length(&self, p: &SemigroupElement) -> usize {
        match &self.kind {
            SemigroupKind::Nk(_) => p.0.iter().map(|&x| x as usize).max().unwrap_or(0),
            SemigroupKind::FreeMonoid(_) => p.0.len(),
            SemigroupKind::FiniteTable { identity, .. } => usize::from(p.0[0] as usize != *identity),
        }
    }

    pub fn parse(&self, s: &str) -> Result<SemigroupElement> {
        let s = s.trim();
        let bad = || AlgebraError::Domain(format!("'{s}'"));
        let el = match &self.kind {
            SemigroupKind::Nk(_) => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let v: std::result::Result<Vec<u32>, _> = inner.split(',').map(|t| t.trim().parse::<u32>()).collect();
                SemigroupElement(v.map_err(|_| bad())?)
            }
            SemigroupKind::FreeMonoid(alpha) => {
                if s == "ε" || s == "e" && !alpha.contains(&'e') {
                    SemigroupElement(vec![])
                } else {
                    let v: Option<Vec<u32>> = s.chars().map(|ch| alpha.iter().position(|&a| a == ch).map(|i| i as u32)).collect();
                    SemigroupElement(v.ok_or_else(bad)?)
                }
            }
            SemigroupKind::FiniteTable { labels, .. } => {
                let i = labels.iter().position(|l| l == s).ok_or_else(bad)?;
                SemigroupElement(vec![i as u32])
            }
        };
        self.require(&el)?;
        Ok(el)
    }

    /// The ball of the given radius, identity first, in a fixed order:
    /// the ℓ∞ box {0..r}ᵏ sorted by (degree sum, vector) for ℕᵏ, shortlex
    /// for words, and the whole table for table semigroups.
    pub fn enumerate_ball(&self, radius: usize) -> Ball<SemigroupElement> {
        match &self.kind {
            SemigroupKind::Nk(k) => {
                let mut out = vec![vec![]];
                for _ in 0..*k {
                    let mut next = Vec::new();
                    for v in &out {
                        for x in 0..=radius as u32 {
                            let mut w: Vec<u32> = v.clone();
                            w.push(x);
                            next.push(w);
                        }
                    }
                    out = next;
                }
                out.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
                Ball::new(out.into_iter().map(SemigroupElement).collect(), radius)
            }
            SemigroupKind::FreeMonoid(alpha) => {
                let n = alpha.len() as u32;
                let mut out = vec![vec![]];
                let mut level: Vec<Vec<u32>> = vec![vec![]];
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &level {
                        for x in 0..n {
                            let mut w2 = w.clone();
                            w2.push(x);
                            next.push(w2);
                        }
                    }
                    out.extend(next.iter().cloned());
                    level = next;
                }
                Ball::new(out.into_iter().map(SemigroupElement).collect(), radius)
            }
            SemigroupKind::FiniteTable { table, identity, .. } => {
                let mut els = vec![*identity];
                els.extend((0..table.len()).filter(|i| i != identity));
                let mut ball = Ball::new(els.into_iter().map(|i| SemigroupElement(vec![i as u32])).collect(), radius);
                if radius >= table.len() {
                    ball.notes.push(format!(
                        "radius {radius} exceeds the {}-element table; ball truncated to the whole table",
                        table.len()
                    ));
                }
                ball
            }
        }
    }

    fn table_left_cancellation_failures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        if let SemigroupKind::FiniteTable { table, .. } = &self.kind {
            let n = table.len();
            for (x, row) in table.iter().enumerate() {
                for a in 0..n {
                    for b in (a + 1)..n {
                        if row[a] == row[b] {
                            out.push((x, a, b));
                        }
                    }
                }
            }
        }
        out
    }

    fn table_label(&self, i: usize) -> String {
        match &self.kind {
            SemigroupKind::FiniteTable { labels, .. } => labels[i].clone(),
            _ => i.to_string(),
        }
    }
}

impl IndexMonoid for Semigroup {
    type Elem = SemigroupElement;

    fn identity(&self) -> SemigroupElement {
        match &self.kind {
            SemigroupKind::Nk(k) => SemigroupElement(vec![0; *k]),
            SemigroupKind::FreeMonoid(_) => SemigroupElement(vec![]),
            SemigroupKind::FiniteTable { identity, .. } => SemigroupElement(vec![*identity as u32]),
        }
    }

    fn multiply(&self, p: &SemigroupElement, q: &SemigroupElement) -> Result<SemigroupElement> {
        self.require(p)?;
        self.require(q)?;
        Ok(match &self.kind {
            SemigroupKind::Nk(_) => SemigroupElement(p.0.iter().zip(&q.0).map(|(a, b)| a + b).collect()),
            SemigroupKind::FreeMonoid(_) => {
                let mut w = p.0.clone();
                w.extend_from_slice(&q.0);
                SemigroupElement(w)
            }
            SemigroupKind::FiniteTable { table, .. } => SemigroupElement(vec![table[p.0[0] as usize][q.0[0] as usize] as u32]),
        })
    }

    fn lcm(&self, p: &SemigroupElement, q: &SemigroupElement) -> Result<Option<SemigroupElement>> {
        self.require(p)?;
        self.require(q)?;
        match &self.kind {
            SemigroupKind::Nk(_) => Ok(Some(SemigroupElement(p.0.iter().zip(&q.0).map(|(a, b)| *a.max(b)).collect()))),
            SemigroupKind::FreeMonoid(_) => {
                let (short, long) = if p.0.len() <= q.0.len() { (p, q) } else { (q, p) };
                Ok(long.0.starts_with(&short.0).then(|| long.clone()))
            }
            SemigroupKind::FiniteTable { table, .. } => {
                if let Some((x, a, b)) = self.table_left_cancellation_failures().first() {
                    return Err(AlgebraError::Unsupported(format!(
                        "table is not left cancellative: {0}{1} = {0}{2}",
                        self.table_label(*x),
                        self.table_label(*a),
                        self.table_label(*b)
                    )));
                }
                let ideal = |x: usize| -> BTreeSet<usize> { table[x].iter().copied().collect() };
                let (pi, qi) = (p.0[0] as usize, q.0[0] as usize);
                let common: BTreeSet<usize> = ideal(pi).intersection(&ideal(qi)).copied().collect();
                if common.is_empty() {
                    return Ok(None);
                }
                common
                    .iter()
                    .find(|&&r| ideal(r) == common)
                    .map(|&r| Some(SemigroupElement(vec![r as u32])))
                    .ok_or_else(|| AlgebraError::Unsupported(format!("{}P ∩ {}P is not principal", self.table_label(pi), self.table_label(qi))))
            }
        }
    }

    fn left_quotient(&self, p: &SemigroupElement, r: &SemigroupElement) -> Result<Option<SemigroupElement>> {
        self.require(p)?;
        self.require(r)?;
        Ok(match &self.kind {
            SemigroupKind::Nk(_) => {
                p.0.iter()
                    .zip(&r.0)
                    .map(|(a, b)| b.checked_sub(*a))
                    .collect::<Option<Vec<u32>>>()
                    .map(SemigroupElement)
            }
            SemigroupKind::FreeMonoid(_) => r.0.starts_with(&p.0).then(|| SemigroupElement(r.0[p.0.len()..].to_vec())),
            SemigroupKind::FiniteTable { table, .. } => table[p.0[0] as usize]
                .iter()
                .position(|&x| x == r.0[0] as usize)
                .map(|i| SemigroupElement(vec![i as u32])),
        })
    }

    fn show(&self, p: &SemigroupElement) -> String {
        match &self.kind {
            SemigroupKind::Nk(1) => p.0[0].to_string(),
            SemigroupKind::Nk(_) => format!("({})", p.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
            SemigroupKind::FreeMonoid(alpha) => {
                if p.0.is_empty() {
                    "ε".into()
                } else {
                    p.0.iter().map(|&x| alpha.get(x as usize).copied().unwrap_or('?')).collect()
                }
            }
            SemigroupKind::FiniteTable { .. } => self.table_label(p.0[0] as usize),
        }
    }
}

/// Brute-force right LCM check: for every pair of the ball, common right
/// multiples are searched in the ball of twice the radius and compared with
/// `lcm`. Left cancellation is scanned on the same window.
pub fn check_right_lcm(s: &Semigroup, ball: &Ball<SemigroupElement>) -> ViolationReport {
    let mut rep = ViolationReport::new();
    rep.touch("left-cancellation");
    rep.touch("lcm");
    let window = s.enumerate_ball(2 * ball.radius);
    rep.notes.extend(ball.notes.iter().cloned());

    if let SemigroupKind::FiniteTable { .. } = s.kind {
        for (x, a, b) in s.table_left_cancellation_failures() {
            rep.fail(
                "left-cancellation",
                format!("{0}{1} = {0}{2} with {1} ≠ {2}", s.table_label(x), s.table_label(a), s.table_label(b)),
                1.0,
            );
        }
    } else {
        for p in ball.iter() {
            let mut seen: HashMap<SemigroupElement, &SemigroupElement> = HashMap::new();
            let mut ok = true;
            for q in window.iter() {
                let Ok(pq) = s.multiply(p, q) else { continue };
                if let Some(prev) = seen.insert(pq, q) {
                    ok = false;
                    rep.fail("left-cancellation", format!("{0}{1} = {0}{2}", s.show(p), s.show(prev), s.show(q)), 1.0);
                }
            }
            if ok {
                rep.pass("left-cancellation", 0.0);
            }
        }
    }

    // divides[i][w]: whether ball element i left-divides window element w.
    let divides = |p: &SemigroupElement, w: &SemigroupElement| matches!(s.left_quotient(p, w), Ok(Some(_)));
    for p in ball.iter() {
        for q in ball.iter() {
            let witness = || format!("({}, {})", s.show(p), s.show(q));
            let common: Vec<&SemigroupElement> = window.iter().filter(|w| divides(p, w) && divides(q, w)).collect();
            match s.lcm(p, q) {
                Err(e) => {
                    rep.fail("lcm", format!("{}: {e}", witness()), 1.0);
                }
                Ok(None) => {
                    rep.expect("lcm", common.is_empty(), || {
                        format!("{}: common multiple {} but lcm reported absent", witness(), s.show(common[0]))
                    });
                }
                Ok(Some(r)) => {
                    if !window.contains(&r) {
                        rep.skip("lcm");
                        continue;
                    }
                    let generated: Vec<&SemigroupElement> = window.iter().filter(|w| divides(&r, w)).collect();
                    let ok = common.contains(&&r) && common == generated;
                    rep.expect("lcm", ok, || format!("{}: pP ∩ qP ≠ {}P inside the window", witness(), s.show(&r)));
                }
            }
        }
    }
    rep
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupKind {
    FreeAbelian(usize),
    FiniteTable {
        table: Vec<Vec<usize>>,
        identity: usize,
        inverse: Vec<usize>,
        labels: Vec<String>,
        generators: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub kind: GroupKind,
}

impl Group {
    pub fn free_abelian(k: usize) -> Self {
        Group {
            kind: GroupKind::FreeAbelian(k),
        }
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// ℤ/n with elements 0..n and labels "e", "g", "g^2", ...
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n)
            .map(|i| match i {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g^{i}"),
            })
            .collect();
        Self::finite_table(table, 0, Some(labels), if n > 1 { Some(vec![1]) } else { Some(vec![]) }).expect("cyclic tables are groups")
    }

    /// A finite group from its table. Generators default to every
    /// non-identity element.
    pub fn finite_table(table: Vec<Vec<usize>>, identity: usize, labels: Option<Vec<String>>, generators: Option<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if identity >= n || table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(AlgebraError::Dimension(format!("malformed {n}-element group table")));
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("#{i}")).collect());
        if labels.len() != n {
            return Err(AlgebraError::Dimension("label count differs from table size".into()));
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(AlgebraError::Unsupported("identity law fails in group table".into()));
            }
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverse[a] = b,
                None => {
                    return Err(AlgebraError::Unsupported(format!("{} has no inverse", labels[a])));
                }
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(AlgebraError::Unsupported("group table is not associative".into()));
                    }
                }
            }
        }
        let generators = generators.unwrap_or_else(|| (0..n).filter(|&i| i != identity).collect());
        if generators.iter().any(|&g| g >= n) {
            return Err(AlgebraError::Dimension("generator index out of range".into()));
        }
        Ok(Group {
            kind: GroupKind::FiniteTable {
                table,
                identity,
                inverse,
                labels,
                generators,
            },
        })
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            GroupKind::FreeAbelian(k) => GroupElement(vec![0; *k]),
            GroupKind::FiniteTable { identity, .. } => GroupElement(vec![*identity as i64]),
        }
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::FreeAbelian(0) => Some(1),
            GroupKind::FreeAbelian(_) => None,
            GroupKind::FiniteTable { table, .. } => Some(table.len()),
        }
    }

    pub fn is_valid(&self, g: &GroupElement) -> bool {
        match &self.kind {
            GroupKind::FreeAbelian(k) => g.0.len() == *k,
            GroupKind::FiniteTable { table, .. } => g.0.len() == 1 && g.0[0] >= 0 && (g.0[0] as usize) < table.len(),
        }
    }

    fn require(&self, g: &GroupElement) -> Result<()> {
        if self.is_valid(g) {
            Ok(())
        } else {
            Err(AlgebraError::Domain(format!("group element {:?}", g.0)))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.require(g)?;
        self.require(h)?;
        Ok(match &self.kind {
            GroupKind::FreeAbelian(_) => GroupElement(g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect()),
            GroupKind::FiniteTable { table, .. } => GroupElement(vec![table[g.0[0] as usize][h.0[0] as usize] as i64]),
        })
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.require(g)?;
        Ok(match &self.kind {
            GroupKind::FreeAbelian(_) => GroupElement(g.0.iter().map(|a| -a).collect()),
            GroupKind::FiniteTable { inverse, .. } => GroupElement(vec![inverse[g.0[0] as usize] as i64]),
        })
    }

    /// Group generators: unit vectors for ℤᵏ, the configured generators for
    /// finite tables.
    pub fn generators(&self) -> Vec<GroupElement> {
        match &self.kind {
            GroupKind::FreeAbelian(k) => (0..*k)
                .map(|i| {
                    let mut v = vec![0; *k];
                    v[i] = 1;
                    GroupElement(v)
                })
                .collect(),
            GroupKind::FiniteTable { generators, .. } => generators.iter().map(|&g| GroupElement(vec![g as i64])).collect(),
        }
    }

    /// Writes g as a word of (generator index, sign) letters: coordinatewise
    /// for ℤᵏ and by breadth-first search over the Cayley graph for finite
    /// tables (positive letters only).
    pub fn decompose(&self, g: &GroupElement) -> Result<Vec<(usize, bool)>> {
        self.require(g)?;
        match &self.kind {
            GroupKind::FreeAbelian(_) => {
                let mut w = Vec::new();
                for (i, &x) in g.0.iter().enumerate() {
                    for _ in 0..x.unsigned_abs() {
                        w.push((i, x > 0));
                    }
                }
                Ok(w)
            }
            GroupKind::FiniteTable {
                table,
                identity,
                generators,
                labels,
                ..
            } => {
                let target = g.0[0] as usize;
                let mut prev: Vec<Option<(usize, usize)>> = vec![None; table.len()];
                let mut seen = vec![false; table.len()];
                seen[*identity] = true;
                let mut queue = std::collections::VecDeque::from([*identity]);
                while let Some(x) = queue.pop_front() {
                    for (gi, &gen) in generators.iter().enumerate() {
                        let y = table[x][gen];
                        if !seen[y] {
                            seen[y] = true;
                            prev[y] = Some((x, gi));
                            queue.push_back(y);
                        }
                    }
                }
                if !seen[target] {
                    return Err(AlgebraError::Unsupported(format!(
                        "{} is not generated by the configured generators",
                        labels[target]
                    )));
                }
                let mut word = Vec::new();
                let mut cur = target;
                while let Some((x, gi)) = prev[cur] {
                    word.push((gi, true));
                    cur = x;
                }
                word.reverse();
                Ok(word)
            }
        }
    }

    /// The ℓ1 ball for ℤᵏ ordered by norm and then coordinatewise by
    /// 0, 1, -1, 2, -2, ...; the whole group for finite tables.
    pub fn enumerate_ball(&self, radius: usize) -> Ball<GroupElement> {
        match &self.kind {
            GroupKind::FreeAbelian(k) => {
                let r = radius as i64;
                let mut out: Vec<Vec<i64>> = vec![vec![]];
                for _ in 0..*k {
                    let mut next = Vec::new();
                    for v in &out {
                        let used: i64 = v.iter().map(|x: &i64| x.abs()).sum();
                        for x in -(r - used)..=(r - used) {
                            let mut w = v.clone();
                            w.push(x);
                            next.push(w);
                        }
                    }
                    out = next;
                }
                let key = |x: i64| 2 * x.abs() - i64::from(x > 0);
                out.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.iter().map(|&x| key(x)).collect::<Vec<_>>()));
                Ball::new(out.into_iter().map(GroupElement).collect(), radius)
            }
            GroupKind::FiniteTable { table, identity, .. } => {
                let mut els = vec![*identity];
                els.extend((0..table.len()).filter(|i| i != identity));
                let mut ball = Ball::new(els.into_iter().map(|i| GroupElement(vec![i as i64])).collect(), radius);
                if radius >= table.len() {
                    ball.notes.push(format!(
                        "radius {radius} exceeds the {}-element group; ball is the whole group",
                        table.len()
                    ));
                }
                ball
            }
        }
    }

    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let bad = || AlgebraError::Domain(format!("group element '{s}'"));
        let g = match &self.kind {
            GroupKind::FreeAbelian(1) if s == "e" || s.starts_with('a') => match s {
                "e" => GroupElement(vec![0]),
                "a" => GroupElement(vec![1]),
                _ => GroupElement(vec![s.strip_prefix("a^").and_then(|n| n.parse().ok()).ok_or_else(bad)?]),
            },
            GroupKind::FreeAbelian(_) => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let v: std::result::Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
                GroupElement(v.map_err(|_| bad())?)
            }
            GroupKind::FiniteTable { labels, .. } => GroupElement(vec![labels.iter().position(|l| l == s).ok_or_else(bad)? as i64]),
        };
        self.require(&g)?;
        Ok(g)
    }

    pub fn show(&self, g: &GroupElement) -> String {
        match &self.kind {
            GroupKind::FreeAbelian(1) => match g.0[0] {
                0 => "e".into(),
                1 => "a".into(),
                n => format!("a^{n}"),
            },
            GroupKind::FreeAbelian(_) => format!("({})", g.0.iter().map(i64::to_string).collect::<Vec<_>>().join(",")),
            GroupKind::FiniteTable { labels, .. } => labels[g.0[0] as usize].clone(),
        }
    }
}
