//! Yetter-Drinfeld modules H ∙_β g over the Borel part and their dimension distributions.
//!
//! The action is x ∙_β a = Σ β(x₍₂₎) x₍₃₎ a S⁻¹(x₍₁₎). On generators it reads
//! ω_i ∙ a = β(ω_i) ω_i a ω_i⁻¹ and e_i ∙ a = −a e_i ω_i⁻¹ + β(ω_i) e_i a ω_i⁻¹.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::Store;
use crate::cyclotomic::Scalar;
use crate::error::{Error, Result};
use crate::hopf::Hopf;
use crate::linalg::{Echelon, SparseVec};
use crate::pbw::{AlgebraHandle, Element, GeneratorKind, PbwMonomial, Scope};

fn require_borel(handle: &AlgebraHandle) -> Result<()> {
    if handle.spec().scope != Scope::Borel {
        return Err(Error::Unsupported("the Yetter-Drinfeld action needs a Borel handle".into()));
    }
    Ok(())
}

/// Character of the Borel part: β(ω_i) = ζ_L^{b_i}, β(e_i) = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    pub exps: Vec<u64>,
}

impl Character {
    pub fn new(exps: &[i64], order: u64) -> Self {
        Character {
            exps: exps.iter().map(|&b| b.rem_euclid(order as i64) as u64).collect(),
        }
    }

    /// The counit ε.
    pub fn trivial(rank: usize) -> Self {
        Character { exps: vec![0; rank] }
    }

    /// β(ω_i) for the 1-based index i.
    pub fn on_omega(&self, handle: &AlgebraHandle, i: usize) -> Scalar {
        Scalar::root_of_unity(handle.context(), self.exps[i - 1] as i64)
    }

    /// β on a monomial: zero unless the monomial is group-like.
    pub fn on_monomial(&self, handle: &AlgebraHandle, m: &PbwMonomial) -> Scalar {
        if !handle.is_grouplike_monomial(m) {
            return Scalar::zero(handle.context());
        }
        let mut k = 0i64;
        for (g, gen) in handle.generators().iter().enumerate() {
            if let GeneratorKind::Omega(i) = gen.kind {
                k += self.exps[i - 1] as i64 * m.0[g] as i64;
            }
        }
        Scalar::root_of_unity(handle.context(), k)
    }
}

/// g = ω₁^{c₁}···ω_k^{c_k}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrouplikeSeed {
    pub exps: Vec<u64>,
}

impl GrouplikeSeed {
    pub fn new(exps: &[i64], order: u64) -> Self {
        GrouplikeSeed {
            exps: exps.iter().map(|&c| c.rem_euclid(order as i64) as u64).collect(),
        }
    }

    pub fn monomial(&self, handle: &AlgebraHandle) -> Result<PbwMonomial> {
        let e: Vec<i64> = self.exps.iter().map(|&c| c as i64).collect();
        handle.grouplike(&e, None)
    }
}

/// Sorted multiset of dimensions, stored as (dimension, multiplicity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    entries: Vec<(u64, u64)>,
}

impl Distribution {
    pub fn from_dims(dims: impl IntoIterator<Item = u64>) -> Self {
        let mut map = BTreeMap::new();
        for d in dims {
            *map.entry(d).or_insert(0u64) += 1;
        }
        Distribution {
            entries: map.into_iter().collect(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (d, m) in entries {
            *map.entry(d).or_insert(0u64) += m;
        }
        Distribution {
            entries: map.into_iter().filter(|&(_, m)| m > 0).collect(),
        }
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    pub fn multiplicity(&self, dim: u64) -> u64 {
        self.entries
            .iter()
            .find(|&&(d, _)| d == dim)
            .map_or(0, |&(_, m)| m)
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(d, m)| format!("{d}^{m}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Parses `{1^36, 3^72}`; braces around exponents (`3^{72}`) are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut entries = Vec::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (d, m) = part
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("expected d^m, got {part:?}")))?;
            let clean = |t: &str| t.trim().trim_matches(|c| c == '{' || c == '}').to_string();
            let d: u64 = clean(d).parse().map_err(|_| Error::Parse(format!("bad dimension in {part:?}")))?;
            let m: u64 = clean(m).parse().map_err(|_| Error::Parse(format!("bad multiplicity in {part:?}")))?;
            entries.push((d, m));
        }
        Ok(Distribution::from_entries(entries))
    }
}

/// Per-dimension multiplicities that differ between two distributions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionDiff {
    /// (dimension, multiplicity on the left, multiplicity on the right).
    pub rows: Vec<(u64, u64, u64)>,
}

impl DistributionDiff {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

impl fmt::Display for DistributionDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "identical");
        }
        for (i, (d, a, b)) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "dim {d}: {a} vs {b} ({:+})", *b as i64 - *a as i64)?;
        }
        Ok(())
    }
}

pub fn distribution_compare(a: &Distribution, b: &Distribution) -> DistributionDiff {
    let mut dims: Vec<u64> = a.entries.iter().chain(&b.entries).map(|&(d, _)| d).collect();
    dims.sort_unstable();
    dims.dedup();
    let rows = dims
        .into_iter()
        .filter_map(|d| {
            let (x, y) = (a.multiplicity(d), b.multiplicity(d));
            (x != y).then_some((d, x, y))
        })
        .collect();
    DistributionDiff { rows }
}

/// x ∙_β a evaluated through Δ² and S⁻¹.
pub fn radford_action_generic(handle: &AlgebraHandle, beta: &Character, x: &Element, a: &Element) -> Result<Element> {
    radford_action_with(&Hopf::new(handle), beta, x, a)
}

/// As [`radford_action_generic`], reusing the memo of an existing Hopf view.
pub fn radford_action_with(hopf: &Hopf<'_>, beta: &Character, x: &Element, a: &Element) -> Result<Element> {
    let handle = hopf.handle();
    require_borel(handle)?;
    let mut out = handle.zero();
    for ((x1, x2, x3), c) in hopf.coproduct_sq(x).terms() {
        let b = beta.on_monomial(handle, x2);
        if b.is_zero() {
            continue;
        }
        let left = handle.multiply(&handle.monomial(x3.clone()), a)?;
        let right = hopf.antipode_inv(&handle.monomial(x1.clone()));
        out = &out + &handle.multiply(&left, &right)?.scale(&(c * &b));
    }
    Ok(out)
}

/// Columns indexed by [`AlgebraHandle::basis_index`].
pub type SparseMatrix = Vec<SparseVec<PbwMonomial>>;

/// β-independent multiplication matrices on the Borel basis.
pub struct MultiplicationTables {
    /// a ↦ e_i a ω_i⁻¹.
    left_e: Vec<SparseMatrix>,
    /// a ↦ a e_i ω_i⁻¹.
    right_e: Vec<SparseMatrix>,
    /// a ↦ ω_i a ω_i⁻¹.
    conj_w: Vec<SparseMatrix>,
}

impl MultiplicationTables {
    pub fn new(handle: &AlgebraHandle) -> Result<Self> {
        require_borel(handle)?;
        let k = handle.spec().simple_count();
        let basis: Vec<PbwMonomial> = handle.basis().collect();
        let mut left_e = Vec::with_capacity(k);
        let mut right_e = Vec::with_capacity(k);
        let mut conj_w = Vec::with_capacity(k);
        for i in 1..=k {
            let e = handle.normal_form(&[(&format!("e{i}"), 1)])?;
            let w = handle.normal_form(&[(&format!("w{i}"), 1)])?;
            let winv = handle.normal_form(&[(&format!("w{i}"), -1)])?;
            let ew = handle.multiply(&e, &winv)?;
            let cols = |f: &(dyn Fn(&Element) -> Result<Element> + Sync)| -> Result<SparseMatrix> {
                basis
                    .par_iter()
                    .map(|m| {
                        let v = f(&handle.monomial(m.clone()))?;
                        Ok(v.terms().map(|(a, c)| (a.clone(), c.clone())).collect())
                    })
                    .collect()
            };
            left_e.push(cols(&|a| handle.multiply(&handle.multiply(&e, a)?, &winv))?);
            right_e.push(cols(&|a| handle.multiply(a, &ew))?);
            conj_w.push(cols(&|a| handle.multiply(&handle.multiply(&w, a)?, &winv))?);
        }
        Ok(MultiplicationTables { left_e, right_e, conj_w })
    }
}

/// The generator operators of H ∙_β for a fixed β.
pub struct ActionOperators {
    /// ω_i ∙ −, for i = 1..k.
    pub omega: Vec<SparseMatrix>,
    /// e_i ∙ −, for i = 1..k.
    pub e: Vec<SparseMatrix>,
}

pub fn generator_action_operators(
    handle: &AlgebraHandle,
    tables: &MultiplicationTables,
    beta: &Character,
) -> ActionOperators {
    let k = handle.spec().simple_count();
    let mut omega = Vec::with_capacity(k);
    let mut e = Vec::with_capacity(k);
    let minus = -Scalar::one(handle.context());
    for i in 1..=k {
        let b = beta.on_omega(handle, i);
        let scale = |col: &SparseVec<PbwMonomial>, c: &Scalar| -> SparseVec<PbwMonomial> {
            col.iter().map(|(m, a)| (m.clone(), a * c)).collect()
        };
        omega.push(tables.conj_w[i - 1].iter().map(|col| scale(col, &b)).collect());
        let ops = tables.left_e[i - 1]
            .iter()
            .zip(&tables.right_e[i - 1])
            .map(|(l, r)| {
                let mut out = scale(l, &b);
                for (m, a) in r {
                    let t = a * &minus;
                    let entry = out.entry(m.clone()).or_insert_with(|| Scalar::zero(handle.context()));
                    *entry += &t;
                }
                out.retain(|_, c| !c.is_zero());
                out
            })
            .collect();
        e.push(ops);
    }
    ActionOperators { omega, e }
}

/// Apply a column-indexed operator to an element.
pub fn apply_operator(handle: &AlgebraHandle, op: &SparseMatrix, a: &Element) -> Element {
    let mut out = handle.zero();
    for (m, c) in a.terms() {
        for (n, d) in &op[handle.basis_index(m)] {
            out.add_term(n.clone(), c * d);
        }
    }
    out
}

/// Closure engine in E-monomial coordinates.
///
/// Starting from g, every vector reached is a sum of P·g·ω^{−deg P} with P a
/// monomial in the root vectors, so only P is stored.
pub struct YdEngine<'a> {
    handle: &'a AlgebraHandle,
    rank: usize,
    /// chi[j][i]: ω_j e_i = chi[j][i] e_i ω_j.
    chi: Vec<Vec<Scalar>>,
    /// Simple-root degree of each E-monomial, indexed by basis position.
    degree: BTreeMap<PbwMonomial, Vec<i64>>,
    /// e_i · P and P · e_i.
    left: Vec<BTreeMap<PbwMonomial, Vec<(PbwMonomial, Scalar)>>>,
    right: Vec<BTreeMap<PbwMonomial, Vec<(PbwMonomial, Scalar)>>>,
}

impl<'a> YdEngine<'a> {
    pub fn new(handle: &'a AlgebraHandle) -> Result<Self> {
        require_borel(handle)?;
        let k = handle.spec().simple_count();
        let l = handle.order();
        let mut chi = vec![Vec::with_capacity(k); k];
        for j in 1..=k {
            let w = handle.normal_form(&[(&format!("w{j}"), 1)])?;
            for i in 1..=k {
                let e = handle.normal_form(&[(&format!("e{i}"), 1)])?;
                let we = handle.multiply(&w, &e)?;
                let ew = handle.multiply(&e, &w)?;
                let (m, _) = ew.terms().next().expect("e ω is a monomial");
                chi[j - 1].push(we.coeff(m));
            }
        }
        let e_gens: Vec<usize> = (0..handle.num_generators())
            .filter(|&g| matches!(handle.generators()[g].kind, GeneratorKind::E(..)))
            .collect();
        let mut monos = Vec::new();
        for mut idx in 0..l.pow(e_gens.len() as u32) {
            let mut m = handle.unit_monomial();
            for &g in e_gens.iter().rev() {
                m.0[g] = (idx % l) as u8;
                idx /= l;
            }
            monos.push(m);
        }
        let mut degree = BTreeMap::new();
        for m in &monos {
            let mut d = vec![0i64; k];
            for &g in &e_gens {
                if let GeneratorKind::E(i, j) = handle.generators()[g].kind {
                    (i..=j).for_each(|t| d[t - 1] += m.0[g] as i64);
                }
            }
            degree.insert(m.clone(), d);
        }
        let mut left = Vec::with_capacity(k);
        let mut right = Vec::with_capacity(k);
        for i in 1..=k {
            let e = handle.index_of(GeneratorKind::E(i, i)).unwrap();
            let mut em = handle.unit_monomial();
            em.0[e] = 1;
            let rows: Vec<_> = monos
                .par_iter()
                .map(|m| {
                    let lv: Vec<_> = handle.mul_monomials(&em, m).into_iter().collect();
                    let rv: Vec<_> = handle.mul_monomials(m, &em).into_iter().collect();
                    (m.clone(), lv, rv)
                })
                .collect();
            let mut lm = BTreeMap::new();
            let mut rm = BTreeMap::new();
            for (m, lv, rv) in rows {
                lm.insert(m.clone(), lv);
                rm.insert(m, rv);
            }
            left.push(lm);
            right.push(rm);
        }
        Ok(YdEngine {
            handle,
            rank: k,
            chi,
            degree,
            left,
            right,
        })
    }

    pub fn handle(&self) -> &AlgebraHandle {
        self.handle
    }

    /// Scalar c with γ e_i = c e_i γ for γ = ∏ ω_j^{γ_j}.
    fn chi_group(&self, gamma: &[i64], i: usize) -> Scalar {
        let mut c = Scalar::one(self.handle.context());
        for (j, &g) in gamma.iter().enumerate() {
            c *= &self.chi[j][i].powi(g).expect("root of unity");
        }
        c
    }

    fn gamma(&self, g: &GrouplikeSeed, p: &PbwMonomial) -> Vec<i64> {
        let d = &self.degree[p];
        (0..self.rank).map(|j| g.exps[j] as i64 - d[j]).collect()
    }

    fn apply_e(&self, beta: &Character, g: &GrouplikeSeed, i: usize, v: &SparseVec<PbwMonomial>) -> SparseVec<PbwMonomial> {
        let b = beta.on_omega(self.handle, i + 1);
        let mut out = SparseVec::new();
        let mut add = |m: &PbwMonomial, c: Scalar| {
            if c.is_zero() {
                return;
            }
            let entry = out.entry(m.clone()).or_insert_with(|| Scalar::zero(self.handle.context()));
            *entry += &c;
        };
        for (p, c) in v {
            let chi = self.chi_group(&self.gamma(g, p), i);
            let cr = -&(c * &chi);
            for (m, a) in &self.right[i][p] {
                add(m, a * &cr);
            }
            let cl = c * &b;
            for (m, a) in &self.left[i][p] {
                add(m, a * &cl);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn apply_omega(&self, beta: &Character, i: usize, v: &SparseVec<PbwMonomial>) -> SparseVec<PbwMonomial> {
        let b = beta.on_omega(self.handle, i + 1);
        v.iter()
            .map(|(p, c)| {
                let d = &self.degree[p];
                let mut s = c * &b;
                for (j, &dj) in d.iter().enumerate() {
                    s *= &self.chi[i][j].powi(dj).expect("root of unity");
                }
                (p.clone(), s)
            })
            .collect()
    }

    /// Echelon basis of H ∙_β g in E-monomial coordinates.
    pub fn simple_module(&self, beta: &Character, g: &GrouplikeSeed) -> Echelon<PbwMonomial> {
        let mut ech = Echelon::new();
        let mut seed = SparseVec::new();
        seed.insert(self.handle.unit_monomial(), Scalar::one(self.handle.context()));
        let mut work: Vec<SparseVec<PbwMonomial>> = ech.insert(seed).into_iter().collect();
        while let Some(v) = work.pop() {
            for i in 0..self.rank {
                for w in [self.apply_e(beta, g, i, &v), self.apply_omega(beta, i, &v)] {
                    if let Some(row) = ech.insert(w) {
                        work.push(row);
                    }
                }
            }
        }
        ech
    }

    pub fn simple_module_dim(&self, beta: &Character, g: &GrouplikeSeed) -> u64 {
        self.simple_module(beta, g).rank() as u64
    }

    /// True when every generator operator maps the span into itself.
    pub fn is_closed(&self, beta: &Character, g: &GrouplikeSeed, ech: &Echelon<PbwMonomial>) -> bool {
        ech.rows().all(|v| {
            (0..self.rank).all(|i| ech.contains(&self.apply_e(beta, g, i, v)) && ech.contains(&self.apply_omega(beta, i, v)))
        })
    }

    /// Lift an E-coordinate vector to a Borel element for seed g.
    pub fn lift(&self, g: &GrouplikeSeed, v: &SparseVec<PbwMonomial>) -> Element {
        let h = self.handle;
        h.from_terms(v.iter().map(|(p, c)| {
            let gamma = h.grouplike(&self.gamma(g, p), None).expect("valid exponents");
            let mut m = p.clone();
            for (t, &e) in gamma.0.iter().enumerate() {
                if e > 0 {
                    m.0[t] = e;
                }
            }
            (m, c.clone())
        }))
    }

    /// All pairs (β, g) in row-major order on exponent vectors.
    pub fn grid(&self) -> Vec<(Character, GrouplikeSeed)> {
        let l = self.handle.order();
        let k = self.rank;
        let size = l.pow(k as u32);
        let vec_of = |mut idx: u64| -> Vec<i64> {
            let mut v = vec![0i64; k];
            for slot in v.iter_mut().rev() {
                *slot = (idx % l) as i64;
                idx /= l;
            }
            v
        };
        let mut out = Vec::with_capacity((size * size) as usize);
        for b in 0..size {
            for c in 0..size {
                out.push((Character::new(&vec_of(b), l), GrouplikeSeed::new(&vec_of(c), l)));
            }
        }
        out
    }

    pub fn distribution(&self) -> Distribution {
        let dims: Vec<u64> = self
            .grid()
            .par_iter()
            .map(|(b, g)| self.simple_module_dim(b, g))
            .collect();
        Distribution::from_dims(dims)
    }
}

pub fn simple_module_dim(handle: &AlgebraHandle, beta: &Character, g: &GrouplikeSeed) -> Result<u64> {
    Ok(YdEngine::new(handle)?.simple_module_dim(beta, g))
}

/// Dimension multiset over all L^{2k} pairs (β, g).
pub fn dimension_distribution(handle: &AlgebraHandle) -> Result<Distribution> {
    let d = YdEngine::new(handle)?.distribution();
    let k = handle.spec().simple_count() as u32;
    let expected = handle.order().pow(2 * k);
    if d.total() != expected {
        return Err(Error::Verification(format!(
            "distribution has {} entries, expected {expected}",
            d.total()
        )));
    }
    Ok(d)
}

/// As [`dimension_distribution`], loading and storing results in `store`.
pub fn dimension_distribution_cached(handle: &AlgebraHandle, store: &Store) -> Result<Distribution> {
    let key = handle.spec().cache_key();
    let k = handle.spec().simple_count() as u32;
    let expected = handle.order().pow(2 * k);
    if let Some(d) = store.load::<Distribution>("distribution", &key) {
        if d.total() == expected {
            return Ok(d);
        }
        log::warn!("cached distribution {key} has the wrong total; recomputing");
    }
    let d = dimension_distribution(handle)?;
    if let Err(e) = store.save("distribution", &key, &d) {
        log::warn!("could not cache distribution {key}: {e}");
    }
    Ok(d)
}
