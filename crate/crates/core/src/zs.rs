//! Zappa-Szép data (g·p, g|_p), its axiom suite and the product P⋈G.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::report::ViolationReport;
use crate::semigroup::{Ball, Group, GroupElement, GroupKind, IndexMonoid, Semigroup, SemigroupElement, SemigroupKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Table,
    Builtin(String),
    GeneratorExtended,
}

/// Letter data for one group generator: `images[x] = (g·x, g|_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterData {
    pub images: Vec<(u32, GroupElement)>,
}

type Memo = Arc<Mutex<HashMap<(GroupElement, SemigroupElement), (SemigroupElement, GroupElement)>>>;

#[derive(Debug, Clone)]
pub enum ZsRule {
    /// g·p = p and g|_p = g.
    Trivial,
    /// A finite group permuting the coordinates of ℕᵏ with g|_p = g;
    /// `perms[g][i]` is the coordinate that coordinate i is sent to.
    CoordinatePermutation { perms: Vec<Vec<usize>> },
    /// Letter data for the group generators of a free monoid, extended by
    /// the recursions for words and for products of generators.
    FreeMonoidGenerated { letters: Vec<LetterData>, memo: Memo },
    /// g·p = p on ℕᵏ with `maps[i][g] = g|_{e_i}` for a finite group.
    DegreeRestriction { maps: Vec<Vec<usize>> },
    /// Explicit values over finite balls.
    Table {
        action: HashMap<(GroupElement, SemigroupElement), SemigroupElement>,
        restriction: HashMap<(GroupElement, SemigroupElement), GroupElement>,
    },
}

#[derive(Debug, Clone)]
pub struct ZsData {
    pub p: Semigroup,
    pub g: Group,
    pub rule: ZsRule,
    pub provenance: Provenance,
}

/// An element (p, g) of P⋈G.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZsElement {
    pub p: SemigroupElement,
    pub g: GroupElement,
}

impl ZsElement {
    pub fn new(p: SemigroupElement, g: GroupElement) -> Self {
        ZsElement { p, g }
    }
}

impl ZsData {
    pub fn trivial(p: Semigroup, g: Group) -> Self {
        ZsData {
            p,
            g,
            rule: ZsRule::Trivial,
            provenance: Provenance::Builtin("trivial".into()),
        }
    }

    pub fn coordinate_permutation(k: usize, g: Group, perms: Vec<Vec<usize>>) -> Result<Self> {
        let n = g
            .order()
            .ok_or_else(|| AlgebraError::Unsupported("coordinate permutations need a finite group".into()))?;
        if perms.len() != n {
            return Err(AlgebraError::Dimension(format!("{} permutations for a group of order {n}", perms.len())));
        }
        for perm in &perms {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != (0..k).collect::<Vec<_>>() {
                return Err(AlgebraError::Dimension(format!("{perm:?} is not a permutation of {k} coordinates")));
            }
        }
        Ok(ZsData {
            p: Semigroup::nk(k),
            g,
            rule: ZsRule::CoordinatePermutation { perms },
            provenance: Provenance::Builtin("coordinate-permutation".into()),
        })
    }

    pub fn degree_restriction(k: usize, g: Group, maps: Vec<Vec<usize>>) -> Result<Self> {
        let n = g
            .order()
            .ok_or_else(|| AlgebraError::Unsupported("degree restrictions need a finite group".into()))?;
        if maps.len() != k || maps.iter().any(|m| m.len() != n || m.iter().any(|&x| x >= n)) {
            return Err(AlgebraError::Dimension("restriction maps must be k maps G → G".into()));
        }
        Ok(ZsData {
            p: Semigroup::nk(k),
            g,
            rule: ZsRule::DegreeRestriction { maps },
            provenance: Provenance::GeneratorExtended,
        })
    }

    /// Letter data extended to words and to all of G without checking the
    /// axioms; see [`extend_action_from_generators`] for the checked form.
    pub fn from_letters(p: Semigroup, g: Group, letters: Vec<LetterData>) -> Result<Self> {
        let SemigroupKind::FreeMonoid(alpha) = &p.kind else {
            return Err(AlgebraError::Unsupported("letter data needs a free monoid".into()));
        };
        let gens = g.generators();
        if letters.len() != gens.len() {
            return Err(AlgebraError::Dimension(format!(
                "letter data for {} generators, group has {}",
                letters.len(),
                gens.len()
            )));
        }
        for (i, ld) in letters.iter().enumerate() {
            if ld.images.len() != alpha.len() {
                return Err(AlgebraError::Dimension(format!("generator {i} has data for {} letters", ld.images.len())));
            }
            let mut hit = vec![false; alpha.len()];
            for (y, h) in &ld.images {
                let y = *y as usize;
                if y >= alpha.len() || !g.is_valid(h) {
                    return Err(AlgebraError::Domain(format!("letter image ({y}, {:?})", h.0)));
                }
                if std::mem::replace(&mut hit[y], true) {
                    return Err(AlgebraError::ExtensionInconsistency {
                        tag: "letter-bijection".into(),
                        witness: format!("{} maps two letters to {}", g.show(&gens[i]), alpha[y]),
                    });
                }
            }
        }
        Ok(ZsData {
            p,
            g,
            rule: ZsRule::FreeMonoidGenerated {
                letters,
                memo: Arc::default(),
            },
            provenance: Provenance::GeneratorExtended,
        })
    }

    /// The pair (g·p, g|_p).
    pub fn evaluate(&self, g: &GroupElement, p: &SemigroupElement) -> Result<(SemigroupElement, GroupElement)> {
        if !self.g.is_valid(g) {
            return Err(AlgebraError::Domain(format!("group element {:?}", g.0)));
        }
        if !self.p.is_valid(p) {
            return Err(AlgebraError::Domain(format!("semigroup element {:?}", p.0)));
        }
        match &self.rule {
            ZsRule::Trivial => Ok((p.clone(), g.clone())),
            ZsRule::CoordinatePermutation { perms } => {
                let perm = &perms[g.0[0] as usize];
                let mut out = vec![0; p.0.len()];
                for (i, &x) in p.0.iter().enumerate() {
                    out[perm[i]] = x;
                }
                Ok((SemigroupElement(out), g.clone()))
            }
            ZsRule::DegreeRestriction { maps } => {
                let mut cur = g.0[0] as usize;
                for (i, &n) in p.0.iter().enumerate() {
                    for _ in 0..n {
                        cur = maps[i][cur];
                    }
                }
                Ok((p.clone(), GroupElement(vec![cur as i64])))
            }
            ZsRule::FreeMonoidGenerated { letters, memo } => self.eval_generated(letters, memo, g, p),
            ZsRule::Table { action, restriction } => {
                let key = (g.clone(), p.clone());
                match (action.get(&key), restriction.get(&key)) {
                    (Some(a), Some(r)) => Ok((a.clone(), r.clone())),
                    _ => Err(AlgebraError::Domain(format!("({}, {})", self.g.show(g), self.p.show(p)))),
                }
            }
        }
    }

    pub fn act(&self, g: &GroupElement, p: &SemigroupElement) -> Result<SemigroupElement> {
        Ok(self.evaluate(g, p)?.0)
    }

    pub fn restrict(&self, g: &GroupElement, p: &SemigroupElement) -> Result<GroupElement> {
        Ok(self.evaluate(g, p)?.1)
    }

    fn eval_letter(&self, letters: &[LetterData], gen: usize, positive: bool, x: u32) -> Result<(u32, GroupElement)> {
        let images = &letters[gen].images;
        if positive {
            Ok(images[x as usize].clone())
        } else {
            // g⁻¹·y = x where g·x = y, and g⁻¹|_y = (g|_x)⁻¹.
            let pre = images.iter().position(|(y, _)| *y == x).expect("letter maps are bijective");
            Ok((pre as u32, self.g.inverse(&images[pre].1)?))
        }
    }

    fn eval_generated(
        &self,
        letters: &[LetterData],
        memo: &Memo,
        g: &GroupElement,
        p: &SemigroupElement,
    ) -> Result<(SemigroupElement, GroupElement)> {
        let key = (g.clone(), p.clone());
        if let Some(v) = memo.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let value = if p.0.is_empty() {
            (p.clone(), g.clone())
        } else {
            let mut word = p.clone();
            let mut restr = self.g.identity();
            // (s h)|_p = s|_{h·p} h|_p, applied from the rightmost letter of g.
            for (gen, positive) in self.g.decompose(g)?.into_iter().rev() {
                let (w, r) = self.eval_generator_on_word(letters, memo, gen, positive, &word)?;
                word = w;
                restr = self.g.multiply(&r, &restr)?;
            }
            (word, restr)
        };
        memo.lock().expect("memo lock").insert(key, value.clone());
        Ok(value)
    }

    fn eval_generator_on_word(
        &self,
        letters: &[LetterData],
        memo: &Memo,
        gen: usize,
        positive: bool,
        w: &SemigroupElement,
    ) -> Result<(SemigroupElement, GroupElement)> {
        // s·(xw) = (s·x)(s|_x·w) and s|_{xw} = (s|_x)|_w.
        let (y, r) = self.eval_letter(letters, gen, positive, w.0[0])?;
        let tail = SemigroupElement(w.0[1..].to_vec());
        let (tail_img, tail_restr) = self.eval_generated(letters, memo, &r, &tail)?;
        let mut out = vec![y];
        out.extend_from_slice(&tail_img.0);
        Ok((SemigroupElement(out), tail_restr))
    }

    /// Freezes the data into explicit tables over the balls. Entries whose
    /// evaluation fails are left out.
    pub fn tabulate(&self, pball: &Ball<SemigroupElement>, gball: &Ball<GroupElement>) -> ZsData {
        let mut action = HashMap::new();
        let mut restriction = HashMap::new();
        for g in gball.iter() {
            for p in pball.iter() {
                if let Ok((a, r)) = self.evaluate(g, p) {
                    action.insert((g.clone(), p.clone()), a);
                    restriction.insert((g.clone(), p.clone()), r);
                }
            }
        }
        ZsData {
            p: self.p.clone(),
            g: self.g.clone(),
            rule: ZsRule::Table { action, restriction },
            provenance: Provenance::Table,
        }
    }

    /// Overwrites one restriction entry of a tabulated datum.
    pub fn set_restriction(&mut self, g: &GroupElement, p: &SemigroupElement, value: GroupElement) -> Result<()> {
        match &mut self.rule {
            ZsRule::Table { restriction, .. } => {
                restriction.insert((g.clone(), p.clone()), value);
                Ok(())
            }
            _ => Err(AlgebraError::Unsupported("only tabulated data can be edited".into())),
        }
    }

    pub fn set_action(&mut self, g: &GroupElement, p: &SemigroupElement, value: SemigroupElement) -> Result<()> {
        match &mut self.rule {
            ZsRule::Table { action, .. } => {
                action.insert((g.clone(), p.clone()), value);
                Ok(())
            }
            _ => Err(AlgebraError::Unsupported("only tabulated data can be edited".into())),
        }
    }

    /// Whether g·p = p for every pair of the balls.
    pub fn is_homogeneous_on(&self, pball: &Ball<SemigroupElement>, gball: &Ball<GroupElement>) -> bool {
        gball
            .iter()
            .all(|g| pball.iter().all(|p| self.act(g, p).map(|q| &q == p).unwrap_or(false)))
    }

    pub fn show_pair(&self, g: &GroupElement, p: &SemigroupElement) -> String {
        format!("g={}, p={}", self.g.show(g), self.p.show(p))
    }

    pub fn multiply(&self, x: &ZsElement, y: &ZsElement) -> Result<ZsElement> {
        let (gq, gres) = self.evaluate(&x.g, &y.p)?;
        Ok(ZsElement {
            p: self.p.multiply(&x.p, &gq)?,
            g: self.g.multiply(&gres, &y.g)?,
        })
    }
}

/// Checks ZS1-ZS8 exhaustively on the balls. Values are compared wherever
/// they land; tuples that would evaluate the data at an argument outside the
/// balls, or where the data cannot be evaluated, are counted as skipped.
pub fn zs_axiom_check(d: &ZsData, pball: &Ball<SemigroupElement>, gball: &Ball<GroupElement>) -> ViolationReport {
    let mut rep = ViolationReport::new();
    for tag in ["ZS1", "ZS2", "ZS3", "ZS4", "ZS5", "ZS6", "ZS7", "ZS8"] {
        rep.touch(tag);
    }
    let (sp, sg) = (&d.p, &d.g);
    let e_p = sp.identity();
    let e_g = sg.identity();
    let in_p = |x: &Result<SemigroupElement>| x.as_ref().ok().filter(|v| pball.contains(v)).cloned();
    let in_g = |x: &Result<GroupElement>| x.as_ref().ok().filter(|v| gball.contains(v)).cloned();
    let val = |x: Result<SemigroupElement>| x.ok();
    let gval = |x: Result<GroupElement>| x.ok();

    for p in pball.iter() {
        match val(d.act(&e_g, p)) {
            Some(v) => {
                rep.expect("ZS1", &v == p, || format!("p={}: e·p = {}", sp.show(p), sp.show(&v)));
            }
            None => rep.skip("ZS1"),
        }
        match gval(d.restrict(&e_g, p)) {
            Some(v) => {
                rep.expect("ZS7", v == e_g, || format!("p={}: e|_p = {}", sp.show(p), sg.show(&v)));
            }
            None => rep.skip("ZS7"),
        }
    }
    for g in gball.iter() {
        match val(d.act(g, &e_p)) {
            Some(v) => {
                rep.expect("ZS3", v == e_p, || format!("g={}: g·e = {}", sg.show(g), sp.show(&v)));
            }
            None => rep.skip("ZS3"),
        }
        match gval(d.restrict(g, &e_p)) {
            Some(v) => {
                rep.expect("ZS4", &v == g, || format!("g={}: g|_e = {}", sg.show(g), sg.show(&v)));
            }
            None => rep.skip("ZS4"),
        }
    }

    for g in gball.iter() {
        for h in gball.iter() {
            let gh = in_g(&sg.multiply(g, h));
            for p in pball.iter() {
                let w = || format!("g={}, h={}, p={}", sg.show(g), sg.show(h), sp.show(p));
                // ZS2: (gh)·p = g·(h·p)
                let hp = in_p(&d.act(h, p));
                let lhs = gh.as_ref().and_then(|gh| val(d.act(gh, p)));
                let rhs = hp.as_ref().and_then(|hp| val(d.act(g, hp)));
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        rep.expect("ZS2", l == r, || format!("{}: {} vs {}", w(), sp.show(&l), sp.show(&r)));
                    }
                    _ => rep.skip("ZS2"),
                }
                // ZS8: (gh)|_p = g|_{h·p} h|_p
                let lhs = gh.as_ref().and_then(|gh| gval(d.restrict(gh, p)));
                let rhs = match (&hp, gval(d.restrict(h, p))) {
                    (Some(hp), Some(hr)) => gval(d.restrict(g, hp)).and_then(|gr| gval(sg.multiply(&gr, &hr))),
                    _ => None,
                };
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        rep.expect("ZS8", l == r, || format!("{}: {} vs {}", w(), sg.show(&l), sg.show(&r)));
                    }
                    _ => rep.skip("ZS8"),
                }
            }
        }
    }

    for g in gball.iter() {
        for p in pball.iter() {
            let gp = val(d.act(g, p));
            let gr = in_g(&d.restrict(g, p));
            for q in pball.iter() {
                let w = || format!("g={}, p={}, q={}", sg.show(g), sp.show(p), sp.show(q));
                let pq = in_p(&sp.multiply(p, q));
                // ZS5: g·(pq) = (g·p)(g|_p·q)
                let lhs = pq.as_ref().and_then(|pq| val(d.act(g, pq)));
                let rhs = match (&gp, &gr) {
                    (Some(gp), Some(gr)) => val(d.act(gr, q)).and_then(|x| val(sp.multiply(gp, &x))),
                    _ => None,
                };
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        rep.expect("ZS5", l == r, || format!("{}: {} vs {}", w(), sp.show(&l), sp.show(&r)));
                    }
                    _ => rep.skip("ZS5"),
                }
                // ZS6: g|_{pq} = (g|_p)|_q
                let lhs = pq.as_ref().and_then(|pq| gval(d.restrict(g, pq)));
                let rhs = gr.as_ref().and_then(|gr| gval(d.restrict(gr, q)));
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        rep.expect("ZS6", l == r, || format!("{}: {} vs {}", w(), sg.show(&l), sg.show(&r)));
                    }
                    _ => rep.skip("ZS6"),
                }
            }
        }
    }
    rep
}

/// Extends generator letter data and checks the result on the balls,
/// failing with the first violating tuple.
pub fn extend_action_from_generators(p: Semigroup, g: Group, letters: Vec<LetterData>, pball_radius: usize, gball_radius: usize) -> Result<ZsData> {
    let d = ZsData::from_letters(p, g, letters)?;
    let pball = d.p.enumerate_ball(pball_radius);
    let gball = d.g.enumerate_ball(gball_radius);
    let rep = zs_axiom_check(&d, &pball, &gball);
    if let Some(v) = rep.violations.first() {
        return Err(AlgebraError::ExtensionInconsistency {
            tag: v.tag.clone(),
            witness: v.witness.clone(),
        });
    }
    Ok(d)
}

/// The binary adding machine: FreeMonoid{0,1}, G = ℤ = ⟨a⟩ with
/// a·0 = 1, a|_0 = e and a·1 = 0, a|_1 = a.
pub fn odometer_zs() -> ZsData {
    let p = Semigroup::free_monoid(&['0', '1']);
    let g = Group::free_abelian(1);
    let letters = vec![LetterData {
        images: vec![(1, GroupElement(vec![0])), (0, GroupElement(vec![1]))],
    }];
    let mut d = ZsData::from_letters(p, g, letters).expect("odometer letter data is well formed");
    d.provenance = Provenance::Builtin("odometer".into());
    d
}

/// P⋈G restricted to a window of P and G balls.
#[derive(Debug, Clone)]
pub struct ZsProduct {
    pub data: ZsData,
    pub pball: Ball<SemigroupElement>,
    pub gball: Ball<GroupElement>,
}

impl ZsProduct {
    pub fn new(data: ZsData, pball: Ball<SemigroupElement>, gball: Ball<GroupElement>) -> Self {
        ZsProduct { data, pball, gball }
    }

    pub fn in_window(&self, x: &ZsElement) -> bool {
        self.pball.contains(&x.p) && self.gball.contains(&x.g)
    }

    /// All (p, g) of the window, P-major.
    pub fn window(&self) -> Ball<ZsElement> {
        let mut els = Vec::with_capacity(self.pball.len() * self.gball.len());
        for p in self.pball.iter() {
            for g in self.gball.iter() {
                els.push(ZsElement::new(p.clone(), g.clone()));
            }
        }
        Ball::new(els, self.pball.radius)
    }
}

/// (p(g·q), g|_q h), failing when the result leaves the window.
pub fn zs_multiply(prod: &ZsProduct, x: &ZsElement, y: &ZsElement) -> Result<ZsElement> {
    let z = prod.data.multiply(x, y).map_err(|e| match e {
        AlgebraError::Domain(s) => AlgebraError::WindowOverflow(s),
        other => other,
    })?;
    if !prod.in_window(&z) {
        return Err(AlgebraError::WindowOverflow(prod.show(&z)));
    }
    Ok(z)
}

/// (lcm(p, q), e), or `None` when pP ∩ qP is empty.
pub fn zs_lcm(d: &ZsData, x: &ZsElement, y: &ZsElement) -> Result<Option<ZsElement>> {
    Ok(d.p.lcm(&x.p, &y.p)?.map(|r| ZsElement::new(r, d.g.identity())))
}

impl IndexMonoid for ZsProduct {
    type Elem = ZsElement;

    fn identity(&self) -> ZsElement {
        ZsElement::new(self.data.p.identity(), self.data.g.identity())
    }

    fn multiply(&self, a: &ZsElement, b: &ZsElement) -> Result<ZsElement> {
        zs_multiply(self, a, b)
    }

    fn lcm(&self, a: &ZsElement, b: &ZsElement) -> Result<Option<ZsElement>> {
        zs_lcm(&self.data, a, b)
    }

    fn left_quotient(&self, a: &ZsElement, b: &ZsElement) -> Result<Option<ZsElement>> {
        // (p,g)(q,h) = (r,k) iff r = ps with q = g⁻¹·s and h = (g|_q)⁻¹ k.
        let Some(s) = self.data.p.left_quotient(&a.p, &b.p)? else {
            return Ok(None);
        };
        let ginv = self.data.g.inverse(&a.g)?;
        let q = self.data.act(&ginv, &s)?;
        let gr = self.data.restrict(&a.g, &q)?;
        let h = self.data.g.multiply(&self.data.g.inverse(&gr)?, &b.g)?;
        Ok(Some(ZsElement::new(q, h)))
    }

    fn show(&self, a: &ZsElement) -> String {
        format!("({}, {})", self.data.p.show(&a.p), self.data.g.show(&a.g))
    }
}

/// Whether the group is the trivial group.
pub fn is_trivial_group(g: &Group) -> bool {
    match &g.kind {
        GroupKind::FreeAbelian(k) => *k == 0,
        GroupKind::FiniteTable { table, .. } => table.len() == 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(n: i64) -> GroupElement {
        GroupElement(vec![n])
    }

    fn w(s: &str) -> SemigroupElement {
        Semigroup::free_monoid(&['0', '1']).word(s).unwrap()
    }

    fn word_str(p: &SemigroupElement) -> String {
        p.0.iter().map(|x| x.to_string()).collect()
    }

    /// Little-endian binary increment by n: value and carry count.
    fn increment_oracle(word: &str, n: i64) -> (String, i64) {
        let len = word.len() as u32;
        let val: i64 = word.chars().enumerate().map(|(i, c)| if c == '1' { 1 << i } else { 0 }).sum();
        let modulus = 1i64 << len;
        let total = val + n;
        let out = total.rem_euclid(modulus);
        let carry = total.div_euclid(modulus);
        let s = (0..len).map(|i| if (out >> i) & 1 == 1 { '1' } else { '0' }).collect();
        (s, carry)
    }

    #[test]
    fn odometer_matches_increment_oracle() {
        let d = odometer_zs();
        let pb = d.p.enumerate_ball(4);
        for n in -5..=5 {
            for p in pb.iter() {
                let (img, r) = d.evaluate(&a(n), p).unwrap();
                let (exp, carry) = increment_oracle(&word_str(p), n);
                assert_eq!(word_str(&img), exp, "a^{n}·{}", word_str(p));
                let expected_restr = if p.0.is_empty() { n } else { carry };
                assert_eq!(r, a(expected_restr), "a^{n}|_{}", word_str(p));
            }
        }
    }

    #[test]
    fn odometer_examples() {
        let d = odometer_zs();
        assert_eq!(d.evaluate(&a(1), &w("01")).unwrap(), (w("11"), a(0)));
        assert_eq!(d.evaluate(&a(1), &w("11")).unwrap(), (w("00"), a(1)));
        assert_eq!(d.evaluate(&a(2), &w("1")).unwrap(), (w("1"), a(1)));
    }

    #[test]
    fn odometer_axioms_on_acceptance_window() {
        let d = odometer_zs();
        let pb = d.p.enumerate_ball(4);
        let gb = d.g.enumerate_ball(3);
        assert_eq!((pb.len(), gb.len()), (31, 7));
        let start = std::time::Instant::now();
        let rep = zs_axiom_check(&d, &pb, &gb);
        assert!(rep.is_clean(), "{:?}", rep.violations);
        assert!(start.elapsed().as_secs_f64() < 1.0);
        assert_eq!(rep.tallies["ZS1"].checked, 31);
    }

    #[test]
    fn tampered_restriction_is_caught() {
        let d = odometer_zs();
        let pb = d.p.enumerate_ball(4);
        let gb = d.g.enumerate_ball(3);
        let mut t = d.tabulate(&pb, &gb);
        assert!(zs_axiom_check(&t, &pb, &gb).is_clean());
        t.set_restriction(&a(1), &w("1"), a(0)).unwrap();
        let rep = zs_axiom_check(&t, &pb, &gb);
        assert!(rep.has_violation("ZS6"), "{:?}", rep.violated_tags());
        assert!(rep.has_violation("ZS8"));
        // a|_11 = a but (a|_1)|_1 now reads e|_1 = e.
        assert!(rep.violations.iter().any(|v| v.tag == "ZS6" && v.witness.starts_with("g=a, p=1, q=1")));
    }

    #[test]
    fn trivial_data_passes() {
        for (p, g) in [
            (Semigroup::nk(2), Group::free_abelian(1)),
            (Semigroup::free_monoid(&['x', 'y']), Group::cyclic(3)),
        ] {
            let d = ZsData::trivial(p, g);
            let rep = zs_axiom_check(&d, &d.p.enumerate_ball(2), &d.g.enumerate_ball(2));
            assert!(rep.is_clean());
        }
    }

    #[test]
    fn zs_multiply_examples() {
        let d = odometer_zs();
        let prod = ZsProduct::new(d.clone(), d.p.enumerate_ball(3), d.g.enumerate_ball(2));
        let x = ZsElement::new(w(""), a(1));
        assert_eq!(
            zs_multiply(&prod, &x, &ZsElement::new(w("0"), a(0))).unwrap(),
            ZsElement::new(w("1"), a(0))
        );
        assert_eq!(
            zs_multiply(&prod, &x, &ZsElement::new(w("11"), a(0))).unwrap(),
            ZsElement::new(w("00"), a(1))
        );
        let e = prod.identity();
        let y = ZsElement::new(w("01"), a(0));
        assert_eq!(
            zs_multiply(&prod, &y, &ZsElement::new(w("1"), a(0))).unwrap(),
            ZsElement::new(w("011"), a(0))
        );
        assert_eq!(zs_multiply(&prod, &e, &y).unwrap(), y);
        let big = ZsElement::new(w("111"), a(0));
        assert!(matches!(zs_multiply(&prod, &big, &big), Err(AlgebraError::WindowOverflow(_))));
    }

    #[test]
    fn zs_lcm_examples() {
        let z2 = Group::cyclic(2);
        let d = ZsData::trivial(Semigroup::nk(2), z2.clone());
        let g = z2.parse("g").unwrap();
        let x = ZsElement::new(Semigroup::nk_elem(&[1, 0]), g.clone());
        let y = ZsElement::new(Semigroup::nk_elem(&[0, 1]), z2.identity());
        assert_eq!(
            zs_lcm(&d, &x, &y).unwrap(),
            Some(ZsElement::new(Semigroup::nk_elem(&[1, 1]), z2.identity()))
        );
        assert_eq!(zs_lcm(&d, &x, &x).unwrap(), Some(ZsElement::new(x.p.clone(), z2.identity())));
        let o = odometer_zs();
        let x = ZsElement::new(w("0"), a(1));
        let y = ZsElement::new(w("1"), a(0));
        assert_eq!(zs_lcm(&o, &x, &y).unwrap(), None);
    }

    #[test]
    fn lcm_divisibility_in_product() {
        let d = odometer_zs();
        let prod = ZsProduct::new(d.clone(), d.p.enumerate_ball(4), d.g.enumerate_ball(2));
        let small = ZsProduct::new(d.clone(), d.p.enumerate_ball(2), d.g.enumerate_ball(1));
        let win = small.window();
        for x in win.iter() {
            for y in win.iter() {
                let Some(r) = zs_lcm(&d, x, y).unwrap() else {
                    // No common right multiple exists anywhere in the big window.
                    let big = prod.window();
                    assert!(!big
                        .iter()
                        .any(|z| prod.left_quotient(x, z).unwrap().is_some() && prod.left_quotient(y, z).unwrap().is_some()));
                    continue;
                };
                for z in [x, y] {
                    let q = prod.left_quotient(z, &r).unwrap().expect("divides lcm");
                    assert_eq!(d.multiply(z, &q).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn extension_examples() {
        let d = extend_action_from_generators(
            Semigroup::free_monoid(&['0', '1']),
            Group::free_abelian(1),
            vec![LetterData {
                images: vec![(1, a(0)), (0, a(1))],
            }],
            4,
            3,
        )
        .unwrap();
        assert_eq!(d.act(&a(1), &w("0")).unwrap(), w("1"));

        let triv = extend_action_from_generators(
            Semigroup::free_monoid(&['0', '1']),
            Group::free_abelian(1),
            vec![LetterData {
                images: vec![(0, a(1)), (1, a(1))],
            }],
            3,
            2,
        )
        .unwrap();
        for p in triv.p.enumerate_ball(3).iter() {
            assert_eq!(triv.evaluate(&a(2), p).unwrap(), (p.clone(), a(2)));
        }

        let ident = extend_action_from_generators(Semigroup::free_monoid(&['0', '1']), Group::trivial(), vec![], 3, 1).unwrap();
        assert!(ident.is_homogeneous_on(&ident.p.enumerate_ball(3), &ident.g.enumerate_ball(1)));
    }

    #[test]
    fn inconsistent_letter_data_rejected() {
        // ℤ/2 generator that cycles letters with trivial restriction would
        // need g² = e, but a three-letter cycle has order 3.
        let z2 = Group::cyclic(2);
        let e = z2.identity();
        let letters = vec![LetterData {
            images: vec![(1, e.clone()), (2, e.clone()), (0, e)],
        }];
        let err = extend_action_from_generators(Semigroup::free_monoid(&['x', 'y', 'z']), z2, letters, 2, 1).unwrap_err();
        match err {
            AlgebraError::ExtensionInconsistency { tag, witness } => {
                assert_eq!(tag, "ZS2");
                assert!(!witness.is_empty());
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn coordinate_swap_is_zs() {
        let d = ZsData::coordinate_permutation(2, Group::cyclic(2), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let rep = zs_axiom_check(&d, &d.p.enumerate_ball(2), &d.g.enumerate_ball(1));
        assert!(rep.is_clean());
        assert!(!d.is_homogeneous_on(&d.p.enumerate_ball(1), &d.g.enumerate_ball(1)));
    }

    #[test]
    fn odometer_orbits_are_transitive() {
        let d = odometer_zs();
        for word in d.p.enumerate_ball(5).iter() {
            let n = word.0.len();
            let mut orbit = std::collections::BTreeSet::new();
            let mut cur = word.clone();
            loop {
                if !orbit.insert(cur.clone()) {
                    break;
                }
                cur = d.act(&a(1), &cur).unwrap();
            }
            assert_eq!(orbit.len(), 1 << n);
        }
    }

    fn elem_strategy() -> impl Strategy<Value = ZsElement> {
        (proptest::collection::vec(0u32..2, 0..3), -2i64..=2).prop_map(|(p, g)| ZsElement::new(SemigroupElement(p), a(g)))
    }

    proptest! {
        #[test]
        fn zs_product_associative(x in elem_strategy(), y in elem_strategy(), z in elem_strategy()) {
            let d = odometer_zs();
            let l = d.multiply(&d.multiply(&x, &y).unwrap(), &z).unwrap();
            let r = d.multiply(&x, &d.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            let e = ZsElement::new(w(""), a(0));
            prop_assert_eq!(d.multiply(&e, &x).unwrap(), x.clone());
            prop_assert_eq!(d.multiply(&x, &e).unwrap(), x);
        }
    }
}
