//! u_{r,s}(sl_n) and its Borel part as finite-dimensional algebras.
//!
//! The presentation (group-like commutation, conjugation by ω and ω′, the
//! e/f commutator, quantum Serre relations, iterated-bracket root vectors and
//! nilpotency) is completed into a confluent rewrite system. Letters are weighted by root
//! height (group-likes weigh 0) and words compared by weight, length, then lex.
//! Generators are ordered in blocks F < E < ω < ω′, root vectors inside a block
//! in lexicographic interval order, so normal words read `F… E… ω… ω′…`.
//!
//! After completion the leading words must be exactly the descending pairs
//! `x_a x_b` (a > b) and the powers `x_a^L`; then the irreducible words are the
//! PBW monomials and multiplication runs on exponent vectors with a memoised
//! left action of single generators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use crate::cache::Store;
use crate::cartan::{cartan_datum, positive_roots_a, q_binomial, serre_coefficient, CartanDatum, Family};
use crate::cyclotomic::{CyclotomicContext, Scalar};
use crate::error::{Error, Result};
use crate::rewrite::{complete, Alphabet, CompletionBudget, Letter, Poly, RewriteSystem, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Full,
    Borel,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Full => write!(f, "full"),
            Scope::Borel => write!(f, "borel"),
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Scope::Full),
            "borel" => Ok(Scope::Borel),
            _ => Err(Error::Parse(format!("unknown scope '{s}'"))),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Order of ζ_L^x.
pub fn root_order(l: u64, x: i64) -> u64 {
    let x = x.rem_euclid(l as i64) as u64;
    l / gcd(l, x)
}

/// Parameters of u_{r,s}(sl_n) with r = ζ_L^x, s = ζ_L^y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub family: Family,
    /// n in sl_n.
    pub rank: usize,
    pub order: u64,
    pub x: i64,
    pub y: i64,
    pub scope: Scope,
}

impl AlgebraSpec {
    pub fn new(rank: usize, order: u64, x: i64, y: i64, scope: Scope) -> Result<Self> {
        let l = order as i64;
        if order < 2 {
            return Err(Error::Constraint(format!("order L = {order} must be at least 2")));
        }
        let spec = AlgebraSpec {
            family: Family::A,
            rank,
            order,
            x: x.rem_euclid(l),
            y: y.rem_euclid(l),
            scope,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.family != Family::A {
            return Err(Error::Unsupported(format!(
                "algebra engine supports type A only, got {}",
                self.family
            )));
        }
        if self.rank < 2 {
            return Err(Error::Constraint(format!("sl_n needs n >= 2, got {}", self.rank)));
        }
        let l = self.order as i64;
        if (self.x - self.y).rem_euclid(l) == 0 {
            return Err(Error::Constraint(format!(
                "r = s (x ≡ y mod {}) is excluded",
                self.order
            )));
        }
        let a = root_order(self.order, self.x);
        let b = root_order(self.order, self.y);
        let lcm = a / gcd(a, b) * b;
        if lcm != self.order {
            return Err(Error::Constraint(format!(
                "lcm of parameter orders is {lcm}, not L = {}",
                self.order
            )));
        }
        Ok(())
    }

    /// Number of simple roots, n − 1.
    pub fn simple_count(&self) -> usize {
        self.rank - 1
    }

    pub fn cache_key(&self) -> String {
        format!(
            "A{}-L{}-x{}-y{}-{}",
            self.rank, self.order, self.x, self.y, self.scope
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// F_{i,j}.
    F(usize, usize),
    /// E_{i,j}.
    E(usize, usize),
    Omega(usize),
    OmegaPrime(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn is_grouplike(&self) -> bool {
        matches!(self.kind, GeneratorKind::Omega(_) | GeneratorKind::OmegaPrime(_))
    }

    /// Simple e_i / f_i: the skew-primitive generators.
    pub fn is_simple(&self) -> bool {
        matches!(self.kind, GeneratorKind::E(i, j) | GeneratorKind::F(i, j) if i == j)
    }
}

fn generator_name(kind: GeneratorKind) -> String {
    match kind {
        GeneratorKind::E(i, j) if i == j => format!("e{i}"),
        GeneratorKind::E(i, j) => format!("E{i}_{j}"),
        GeneratorKind::F(i, j) if i == j => format!("f{i}"),
        GeneratorKind::F(i, j) => format!("F{i}_{j}"),
        GeneratorKind::Omega(i) => format!("w{i}"),
        GeneratorKind::OmegaPrime(i) => format!("w'{i}"),
    }
}

/// Exponent vector in generator order; every entry lies in [0, L).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PbwMonomial(pub Vec<u8>);

impl PbwMonomial {
    pub fn unit(num_generators: usize) -> Self {
        PbwMonomial(vec![0; num_generators])
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// The normal word spelled out letter by letter.
    pub fn letters(&self) -> Vec<Letter> {
        let mut w = Vec::new();
        for (g, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                w.push(g as Letter);
            }
        }
        w
    }
}

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(1);

/// Sparse combination of PBW monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    algebra: u64,
    ctx: Arc<CyclotomicContext>,
    terms: BTreeMap<PbwMonomial, Scalar>,
}

impl Element {
    pub fn algebra_id(&self) -> u64 {
        self.algebra
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(&self.ctx))
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Element) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::HandleMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        let mut out = Element {
            algebra: self.algebra,
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
        };
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a * c);
        }
        out
    }
}

impl std::ops::Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("elements of different algebras")
    }
}

impl std::ops::Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("elements of different algebras")
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Scalar::one(&self.ctx))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c})·{:?}", m.0))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

type Terms = Arc<[(PbwMonomial, Scalar)]>;

/// A built algebra: generators, completed rules, and multiplication tables.
pub struct AlgebraHandle {
    id: u64,
    spec: AlgebraSpec,
    ctx: Arc<CyclotomicContext>,
    datum: CartanDatum,
    r: Scalar,
    s: Scalar,
    generators: Vec<Generator>,
    system: RewriteSystem,
    /// pair_rhs[a][b] for a > b: normal form of x_a x_b as (word, coeff).
    pair_rhs: Vec<Vec<WordTerms>>,
    power_rhs: Vec<WordTerms>,
    memo: DashMap<(Letter, PbwMonomial), Terms>,
}

impl fmt::Debug for AlgebraHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraHandle")
            .field("spec", &self.spec)
            .field("generators", &self.generators.len())
            .field("rules", &self.system.len())
            .finish()
    }
}

/// The bracket scalar c_{i,j} used for E_{i,j} = e_i E_{i+1,j} − c E_{i+1,j} e_i and
/// F_{i,j} = F_{i+1,j} f_i − c f_i F_{i+1,j}: c = r^{⟨β,α_i⟩} s^{−⟨α_i,β⟩} with β = α_{i+1}+…+α_j.
pub fn standard_bracket(datum: &CartanDatum, r: &Scalar, s: &Scalar, i: usize, j: usize) -> Scalar {
    let k = datum.rank;
    let mut alpha = vec![0i64; k];
    alpha[i - 1] = 1;
    let mut beta = vec![0i64; k];
    for b in beta.iter_mut().take(j).skip(i) {
        *b = 1;
    }
    let p = datum.euler_on_roots(&beta, &alpha);
    let q = datum.euler_on_roots(&alpha, &beta);
    &r.powi(p).expect("root of unity") * &s.powi(-q).expect("root of unity")
}

type WordTerms = Vec<(Vec<Letter>, Scalar)>;

pub type BracketFn<'a> = dyn Fn(&CartanDatum, &Scalar, &Scalar, usize, usize) -> Scalar + 'a;

#[derive(Serialize, Deserialize)]
struct CachedRules {
    alphabet: usize,
    /// (leading word, [(word, coefficient digits)]).
    rules: Vec<(Vec<Letter>, CachedPoly)>,
}

type CachedPoly = Vec<(Vec<Letter>, Vec<String>)>;

fn generator_list(spec: &AlgebraSpec) -> Vec<Generator> {
    let k = spec.simple_count();
    let roots = positive_roots_a(spec.rank);
    let mut kinds = Vec::new();
    if spec.scope == Scope::Full {
        kinds.extend(roots.iter().map(|&(i, j)| GeneratorKind::F(i, j)));
    }
    kinds.extend(roots.iter().map(|&(i, j)| GeneratorKind::E(i, j)));
    kinds.extend((1..=k).map(GeneratorKind::Omega));
    if spec.scope == Scope::Full {
        kinds.extend((1..=k).map(GeneratorKind::OmegaPrime));
    }
    kinds
        .into_iter()
        .map(|kind| Generator {
            name: generator_name(kind),
            kind,
        })
        .collect()
}

struct Presentation<'a> {
    alpha: &'a Alphabet,
    gens: &'a [Generator],
}

impl Presentation<'_> {
    fn idx(&self, kind: GeneratorKind) -> Option<Letter> {
        self.gens
            .iter()
            .position(|g| g.kind == kind)
            .map(|p| p as Letter)
    }

    fn poly(&self, terms: &[(Scalar, Vec<Letter>)]) -> Poly {
        let mut p = Poly::zero(self.alpha);
        for (c, w) in terms {
            p.add_term(self.alpha.word(w), c.clone());
        }
        p
    }

    fn one(&self) -> Scalar {
        Scalar::one(self.alpha.context())
    }
}

/// Defining relations R1–R7 and the root-vector definitions, each labelled.
fn presentation(
    spec: &AlgebraSpec,
    gens: &[Generator],
    alpha: &Alphabet,
    datum: &CartanDatum,
    r: &Scalar,
    s: &Scalar,
    bracket: &BracketFn<'_>,
) -> Result<Vec<(String, Poly)>> {
    let p = Presentation { alpha, gens };
    let l = spec.order as usize;
    let k = spec.simple_count();
    let one = p.one();
    let m1 = -&one;
    let full = spec.scope == Scope::Full;
    let mut out: Vec<(String, Poly)> = Vec::new();
    let eu = |i: usize, j: usize| datum.euler(i - 1, j - 1);
    let pw = |a: &Scalar, e: i64| a.powi(e).expect("root of unity");

    // R1: group-likes commute, have order dividing L
    let group: Vec<Letter> = (0..gens.len())
        .filter(|&g| gens[g].is_grouplike())
        .map(|g| g as Letter)
        .collect();
    for (ai, &a) in group.iter().enumerate() {
        for &b in &group[ai + 1..] {
            out.push((
                format!("R1 [{} {}]", gens[a as usize].name, gens[b as usize].name),
                p.poly(&[(one.clone(), vec![b, a]), (m1.clone(), vec![a, b])]),
            ));
        }
        out.push((
            format!("R1 {}^L", gens[a as usize].name),
            p.poly(&[(one.clone(), vec![a; l]), (m1.clone(), vec![])]),
        ));
    }

    for i in 1..=k {
        let w = p.idx(GeneratorKind::Omega(i)).unwrap();
        let wp = p.idx(GeneratorKind::OmegaPrime(i));
        for j in 1..=k {
            let e = p.idx(GeneratorKind::E(j, j)).unwrap();
            // R2
            let chi = &pw(r, eu(j, i)) * &pw(s, -eu(i, j));
            out.push((
                format!("R2 w{i} e{j}"),
                p.poly(&[(one.clone(), vec![w, e]), (-&chi, vec![e, w])]),
            ));
            if let Some(wp) = wp {
                let chi = &pw(r, -eu(i, j)) * &pw(s, eu(j, i));
                out.push((
                    format!("R2 w'{i} e{j}"),
                    p.poly(&[(one.clone(), vec![wp, e]), (-&chi, vec![e, wp])]),
                ));
            }
            if full {
                let f = p.idx(GeneratorKind::F(j, j)).unwrap();
                let wp = wp.unwrap();
                // R3
                let psi = &pw(r, -eu(j, i)) * &pw(s, eu(i, j));
                out.push((
                    format!("R3 w{i} f{j}"),
                    p.poly(&[(one.clone(), vec![w, f]), (-&psi, vec![f, w])]),
                ));
                let psi = &pw(r, eu(i, j)) * &pw(s, -eu(j, i));
                out.push((
                    format!("R3 w'{i} f{j}"),
                    p.poly(&[(one.clone(), vec![wp, f]), (-&psi, vec![f, wp])]),
                ));
            }
        }
    }

    // R4
    if full {
        for i in 1..=k {
            for j in 1..=k {
                let e = p.idx(GeneratorKind::E(i, i)).unwrap();
                let f = p.idx(GeneratorKind::F(j, j)).unwrap();
                let mut terms = vec![(one.clone(), vec![e, f]), (m1.clone(), vec![f, e])];
                if i == j {
                    let (ri, si) = crate::cartan::scaled_parameters(datum, r, s, i)?;
                    let inv = (&ri - &si).invert()?;
                    let w = p.idx(GeneratorKind::Omega(i)).unwrap();
                    let wp = p.idx(GeneratorKind::OmegaPrime(i)).unwrap();
                    terms.push((-&inv, vec![w]));
                    terms.push((inv.clone(), vec![wp]));
                }
                out.push((format!("R4 e{i} f{j}"), p.poly(&terms)));
            }
        }
    }

    // R5 / R6
    for i in 1..=k {
        for j in 1..=k {
            if i == j {
                continue;
            }
            let a = datum.matrix[i - 1][j - 1];
            let top = (1 - a) as usize;
            let (ri, si) = crate::cartan::scaled_parameters(datum, r, s, i)?;
            let v = &ri * &si.invert()?;
            let ei = p.idx(GeneratorKind::E(i, i)).unwrap();
            let ej = p.idx(GeneratorKind::E(j, j)).unwrap();
            let mut eterms = Vec::new();
            let mut fterms = Vec::new();
            for kk in 0..=top {
                let sign = if kk % 2 == 0 { one.clone() } else { m1.clone() };
                let c = &(&sign * &q_binomial(top, kk, &v)) * &serre_coefficient(datum, r, s, i, j, kk)?;
                let mut w = vec![ei; top - kk];
                w.push(ej);
                w.extend(std::iter::repeat_n(ei, kk));
                eterms.push((c.clone(), w));
                if full {
                    let fi = p.idx(GeneratorKind::F(i, i)).unwrap();
                    let fj = p.idx(GeneratorKind::F(j, j)).unwrap();
                    let mut w = vec![fi; kk];
                    w.push(fj);
                    w.extend(std::iter::repeat_n(fi, top - kk));
                    fterms.push((c, w));
                }
            }
            out.push((format!("R5 ({i},{j})"), p.poly(&eterms)));
            if full {
                out.push((format!("R6 ({i},{j})"), p.poly(&fterms)));
            }
        }
    }

    // root vectors
    for (i, j) in positive_roots_a(spec.rank) {
        if i == j {
            continue;
        }
        let c = bracket(datum, r, s, i, j);
        let big = p.idx(GeneratorKind::E(i, j)).unwrap();
        let ei = p.idx(GeneratorKind::E(i, i)).unwrap();
        let rest = p.idx(GeneratorKind::E(i + 1, j)).unwrap();
        out.push((
            format!("E{i}_{j} definition"),
            p.poly(&[
                (one.clone(), vec![big]),
                (m1.clone(), vec![ei, rest]),
                (c.clone(), vec![rest, ei]),
            ]),
        ));
        if full {
            let big = p.idx(GeneratorKind::F(i, j)).unwrap();
            let fi = p.idx(GeneratorKind::F(i, i)).unwrap();
            let rest = p.idx(GeneratorKind::F(i + 1, j)).unwrap();
            out.push((
                format!("F{i}_{j} definition"),
                p.poly(&[
                    (one.clone(), vec![big]),
                    (m1.clone(), vec![rest, fi]),
                    (c, vec![fi, rest]),
                ]),
            ));
        }
    }

    // R7
    for (g, gen) in gens.iter().enumerate() {
        if !gen.is_grouplike() {
            out.push((
                format!("R7 {}^L", gen.name),
                p.poly(&[(one.clone(), vec![g as Letter; l])]),
            ));
        }
    }
    Ok(out)
}

fn rules_to_cache(sys: &RewriteSystem) -> CachedRules {
    CachedRules {
        alphabet: sys.alphabet().size(),
        rules: sys
            .rules()
            .map(|r| {
                (
                    r.lhs.letters().to_vec(),
                    r.rhs
                        .terms()
                        .map(|(w, c)| (w.letters().to_vec(), c.to_strings()))
                        .collect(),
                )
            })
            .collect(),
    }
}

fn rules_from_cache(alpha: &Alphabet, cached: &CachedRules) -> Result<RewriteSystem> {
    if cached.alphabet != alpha.size() {
        return Err(Error::Verification("cached alphabet size differs".into()));
    }
    let mut rules = Vec::new();
    for (lhs, rhs) in &cached.rules {
        let mut p = Poly::zero(alpha);
        for (w, c) in rhs {
            p.add_term(alpha.word(w), Scalar::from_strings(alpha.context(), c)?);
        }
        rules.push(Rule {
            lhs: alpha.word(lhs),
            rhs: p,
        });
    }
    Ok(RewriteSystem::from_rules(alpha, rules))
}

fn is_normal_word(w: &[Letter], l: usize) -> bool {
    let mut run = 0usize;
    for (t, &x) in w.iter().enumerate() {
        if t > 0 && w[t - 1] > x {
            return false;
        }
        run = if t > 0 && w[t - 1] == x { run + 1 } else { 1 };
        if run >= l {
            return false;
        }
    }
    true
}

/// Letter weights: root vectors weigh their height, group-likes nothing.
/// Straightening then never raises the weight, so commutators such as
/// [E_{1,2}, f_1] orient with the E·F word leading.
fn alphabet_for(spec: &AlgebraSpec, ctx: &Arc<CyclotomicContext>) -> Alphabet {
    let weights = generator_list(spec)
        .iter()
        .map(|g| match g.kind {
            GeneratorKind::E(i, j) | GeneratorKind::F(i, j) => (j - i + 1) as u32,
            _ => 0,
        })
        .collect();
    Alphabet::new(ctx, weights)
}

/// Build with the standard bracket scalar, no disk cache.
pub fn build(spec: AlgebraSpec) -> Result<AlgebraHandle> {
    build_with_bracket(spec, &standard_bracket, CompletionBudget::default())
}

/// Build, reusing a completed rule set from `store` when present and valid.
pub fn build_cached(spec: AlgebraSpec, store: &Store) -> Result<AlgebraHandle> {
    spec.validate()?;
    let ctx = CyclotomicContext::new(spec.order)?;
    let key = spec.cache_key();
    if let Some(cached) = store.load::<CachedRules>("rules", &key) {
        let alpha = alphabet_for(&spec, &ctx);
        match rules_from_cache(&alpha, &cached).and_then(|sys| {
            if sys.check_confluence().is_err() {
                return Err(Error::Verification("cached rules not confluent".into()));
            }
            AlgebraHandle::assemble(spec, ctx.clone(), sys)
        }) {
            Ok(h) => return Ok(h),
            Err(e) => log::warn!("rebuilding {key}: {e}"),
        }
    }
    let handle = build(spec)?;
    if let Err(e) = store.save("rules", &key, &rules_to_cache(&handle.system)) {
        log::warn!("could not cache rules {key}: {e}");
    }
    Ok(handle)
}

/// Build with a caller-supplied bracket scalar for the root vectors.
pub fn build_with_bracket(
    spec: AlgebraSpec,
    bracket: &BracketFn<'_>,
    budget: CompletionBudget,
) -> Result<AlgebraHandle> {
    spec.validate()?;
    let ctx = CyclotomicContext::new(spec.order)?;
    let datum = cartan_datum(Family::A, spec.simple_count())?;
    let r = Scalar::root_of_unity(&ctx, spec.x);
    let s = Scalar::root_of_unity(&ctx, spec.y);
    let gens = generator_list(&spec);
    let alpha = alphabet_for(&spec, &ctx);
    let rels = presentation(&spec, &gens, &alpha, &datum, &r, &s, bracket)?;
    let polys: Vec<Poly> = rels.into_iter().rev().map(|(_, p)| p).collect();
    let sys = complete(&alpha, polys, budget)?;
    if let Err(w) = sys.check_confluence() {
        return Err(Error::Verification(format!(
            "completed system not confluent at overlap {w:?}"
        )));
    }
    AlgebraHandle::assemble(spec, ctx, sys)
}

impl AlgebraHandle {
    fn assemble(spec: AlgebraSpec, ctx: Arc<CyclotomicContext>, system: RewriteSystem) -> Result<Self> {
        let datum = cartan_datum(Family::A, spec.simple_count())?;
        let r = Scalar::root_of_unity(&ctx, spec.x);
        let s = Scalar::root_of_unity(&ctx, spec.y);
        let generators = generator_list(&spec);
        let g = generators.len();
        let l = spec.order as usize;
        if system.alphabet().size() != g {
            return Err(Error::Verification("rule alphabet does not match generators".into()));
        }
        let expected = g * (g - 1) / 2 + g;
        let mut pair_rhs = vec![vec![Vec::new(); g]; g];
        let mut power_rhs = vec![Vec::new(); g];
        for a in 0..g {
            for b in 0..a {
                let rhs = system.rule_rhs(&[a as Letter, b as Letter]).ok_or_else(|| {
                    Error::Verification(format!(
                        "no straightening rule for {} {}",
                        generators[a].name, generators[b].name
                    ))
                })?;
                pair_rhs[a][b] = poly_terms(rhs, l)?;
            }
            let rhs = system.rule_rhs(&vec![a as Letter; l]).ok_or_else(|| {
                Error::Verification(format!("no power rule for {}", generators[a].name))
            })?;
            power_rhs[a] = poly_terms(rhs, l)?;
        }
        if system.len() != expected {
            let extra: Vec<String> = system
                .leading_words()
                .filter(|w| {
                    let v = w.letters();
                    !(v.len() == 2 && v[0] > v[1]) && !(v.len() == l && v.iter().all(|&x| x == v[0]))
                })
                .take(5)
                .map(|w| format!("{w:?}"))
                .collect();
            return Err(Error::Verification(format!(
                "completed system has {} rules, PBW shape needs {expected}; extra leading words {}",
                system.len(),
                extra.join(", ")
            )));
        }
        Ok(AlgebraHandle {
            id: NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed),
            spec,
            ctx,
            datum,
            r,
            s,
            generators,
            system,
            pair_rhs,
            power_rhs,
            memo: DashMap::new(),
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn r(&self) -> &Scalar {
        &self.r
    }

    pub fn s(&self) -> &Scalar {
        &self.s
    }

    pub fn order(&self) -> u64 {
        self.spec.order
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn rewrite_system(&self) -> &RewriteSystem {
        &self.system
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        let norm = name.replace("wp", "w'");
        self.generators
            .iter()
            .position(|g| g.name == norm)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn index_of(&self, kind: GeneratorKind) -> Option<usize> {
        self.generators.iter().position(|g| g.kind == kind)
    }

    pub fn zero(&self) -> Element {
        Element {
            algebra: self.id,
            ctx: self.ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, c: Scalar) -> Element {
        let mut e = self.zero();
        e.add_term(self.unit_monomial(), c);
        e
    }

    pub fn one(&self) -> Element {
        self.scalar(Scalar::one(&self.ctx))
    }

    pub fn unit_monomial(&self) -> PbwMonomial {
        PbwMonomial::unit(self.generators.len())
    }

    pub fn monomial(&self, m: PbwMonomial) -> Element {
        let mut e = self.zero();
        e.add_term(m, Scalar::one(&self.ctx));
        e
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (PbwMonomial, Scalar)>) -> Element {
        let mut e = self.zero();
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn generator(&self, name: &str) -> Result<Element> {
        let g = self.generator_index(name)?;
        Ok(self.generator_at(g))
    }

    pub fn generator_at(&self, g: usize) -> Element {
        let mut m = self.unit_monomial();
        m.0[g] = 1;
        self.monomial(m)
    }

    /// The group-like ∏ ω_i^{a_i} (· ∏ ω′_i^{b_i} when `prime` is given).
    pub fn grouplike(&self, omega: &[i64], prime: Option<&[i64]>) -> Result<PbwMonomial> {
        let k = self.spec.simple_count();
        let l = self.spec.order as i64;
        if omega.len() != k || prime.is_some_and(|p| p.len() != k) {
            return Err(Error::InvalidArgument(format!("group-like exponent vector must have length {k}")));
        }
        if prime.is_some() && self.spec.scope == Scope::Borel {
            return Err(Error::InvalidArgument("the Borel part has no ω′".into()));
        }
        let mut m = self.unit_monomial();
        for i in 1..=k {
            m.0[self.index_of(GeneratorKind::Omega(i)).unwrap()] = omega[i - 1].rem_euclid(l) as u8;
            if let Some(p) = prime {
                m.0[self.index_of(GeneratorKind::OmegaPrime(i)).unwrap()] = p[i - 1].rem_euclid(l) as u8;
            }
        }
        Ok(m)
    }

    pub fn is_grouplike_monomial(&self, m: &PbwMonomial) -> bool {
        m.0.iter()
            .enumerate()
            .all(|(g, &e)| e == 0 || self.generators[g].is_grouplike())
    }

    /// Split a monomial into its non-group part and its group part.
    pub fn split_group(&self, m: &PbwMonomial) -> (PbwMonomial, PbwMonomial) {
        let mut a = m.clone();
        let mut b = self.unit_monomial();
        for (g, gen) in self.generators.iter().enumerate() {
            if gen.is_grouplike() {
                b.0[g] = a.0[g];
                a.0[g] = 0;
            }
        }
        (a, b)
    }

    /// Normal form of a word given by generator names and integer exponents.
    /// Negative exponents are allowed on group-likes only.
    pub fn normal_form(&self, word: &[(&str, i64)]) -> Result<Element> {
        let l = self.spec.order as i64;
        let mut letters = Vec::new();
        for &(name, e) in word {
            let g = self.generator_index(name)?;
            let e = if self.generators[g].is_grouplike() {
                e.rem_euclid(l)
            } else if e < 0 {
                return Err(Error::InvalidArgument(format!(
                    "negative power of non-invertible generator {name}"
                )));
            } else {
                e
            };
            letters.extend(std::iter::repeat_n(g as Letter, e as usize));
        }
        Ok(self.normal_form_letters(&letters))
    }

    /// Normal form of a word over generator indices, by the fast multiplier.
    pub fn normal_form_letters(&self, letters: &[Letter]) -> Element {
        let mut cur: BTreeMap<PbwMonomial, Scalar> = BTreeMap::new();
        cur.insert(self.unit_monomial(), Scalar::one(&self.ctx));
        for &x in letters.iter().rev() {
            cur = self.left_mul_gen_map(x, &cur);
        }
        Element {
            algebra: self.id,
            ctx: self.ctx.clone(),
            terms: cur,
        }
    }

    /// Normal form of a word by the generic rewriting reducer (slow reference path).
    pub fn normal_form_rewriting(&self, letters: &[Letter]) -> Element {
        let p = self.system.reduce_word(letters);
        self.poly_to_element(&p)
    }

    /// Interpret a polynomial in the generators as an element.
    pub fn eval_poly(&self, p: &Poly) -> Element {
        let mut out = self.zero();
        for (w, c) in p.terms() {
            for (m, a) in self.normal_form_letters(w.letters()).terms {
                out.add_term(m, &a * c);
            }
        }
        out
    }

    fn poly_to_element(&self, p: &Poly) -> Element {
        let mut out = self.zero();
        for (w, c) in p.terms() {
            out.add_term(self.word_to_monomial(w.letters()), c.clone());
        }
        out
    }

    fn word_to_monomial(&self, w: &[Letter]) -> PbwMonomial {
        let mut m = self.unit_monomial();
        for &x in w {
            m.0[x as usize] += 1;
        }
        m
    }

    fn left_mul_gen_map(
        &self,
        x: Letter,
        cur: &BTreeMap<PbwMonomial, Scalar>,
    ) -> BTreeMap<PbwMonomial, Scalar> {
        let mut next: BTreeMap<PbwMonomial, Scalar> = BTreeMap::new();
        for (m, c) in cur {
            for (m2, a) in self.left_mul_gen(x, m).iter() {
                add_into(&mut next, m2.clone(), a * c);
            }
        }
        next
    }

    /// x_g · m in normal form, memoised.
    pub fn left_mul_gen(&self, x: Letter, m: &PbwMonomial) -> Terms {
        let key = (x, m.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let l = self.spec.order as u8;
        let xi = x as usize;
        let first = m.0.iter().position(|&e| e > 0);
        let out: Terms = match first {
            Some(f) if f < xi => {
                let mut rest = m.clone();
                rest.0[f] -= 1;
                self.apply_words(&self.pair_rhs[xi][f], &rest)
            }
            Some(f) if f == xi && m.0[f] + 1 >= l => {
                let mut rest = m.clone();
                rest.0[f] = 0;
                self.apply_words(&self.power_rhs[xi], &rest)
            }
            _ => {
                let mut n = m.clone();
                n.0[xi] += 1;
                Arc::from(vec![(n, Scalar::one(&self.ctx))])
            }
        };
        self.memo.insert(key, out.clone());
        out
    }

    fn apply_words(&self, words: &[(Vec<Letter>, Scalar)], rest: &PbwMonomial) -> Terms {
        let mut acc: BTreeMap<PbwMonomial, Scalar> = BTreeMap::new();
        for (w, c) in words {
            let mut cur: BTreeMap<PbwMonomial, Scalar> = BTreeMap::new();
            cur.insert(rest.clone(), c.clone());
            for &y in w.iter().rev() {
                cur = self.left_mul_gen_map(y, &cur);
            }
            for (m, a) in cur {
                add_into(&mut acc, m, a);
            }
        }
        Arc::from(acc.into_iter().collect::<Vec<_>>())
    }

    /// Product of two monomials in normal form.
    pub fn mul_monomials(&self, a: &PbwMonomial, b: &PbwMonomial) -> BTreeMap<PbwMonomial, Scalar> {
        let mut cur: BTreeMap<PbwMonomial, Scalar> = BTreeMap::new();
        cur.insert(b.clone(), Scalar::one(&self.ctx));
        for g in (0..a.0.len()).rev() {
            for _ in 0..a.0[g] {
                cur = self.left_mul_gen_map(g as Letter, &cur);
            }
        }
        cur
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        if a.algebra != self.id || b.algebra != self.id {
            return Err(Error::HandleMismatch);
        }
        Ok(self.mul_unchecked(a, b))
    }

    pub(crate) fn mul_unchecked(&self, a: &Element, b: &Element) -> Element {
        let mut out = self.zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let cab = ca * cb;
                for (m, c) in self.mul_monomials(ma, mb) {
                    out.add_term(m, &c * &cab);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &Element, e: u32) -> Result<Element> {
        let mut out = self.one();
        for _ in 0..e {
            out = self.multiply(&out, a)?;
        }
        Ok(out)
    }

    /// Count of irreducible monomials; the PBW-shape check at build makes this L^{#generators}.
    pub fn dimension(&self) -> u64 {
        self.spec.order.pow(self.generators.len() as u32)
    }

    /// Irreducible words of the rewrite system, counted directly from its leading words.
    pub fn counted_dimension(&self) -> Result<u64> {
        let max_len = self.generators.len() * (self.spec.order as usize - 1);
        self.system
            .count_irreducible_automaton(max_len)
            .and_then(|c| u64::try_from(c).ok())
            .ok_or_else(|| Error::Verification("rewrite system has irreducible words beyond the PBW bound".into()))
    }

    /// Irreducible monomials in increasing exponent-vector order, starting from the unit.
    pub fn basis(&self) -> impl Iterator<Item = PbwMonomial> + '_ {
        let g = self.generators.len();
        let l = self.spec.order as u8;
        let total = self.dimension();
        (0..total).map(move |mut idx| {
            let mut v = vec![0u8; g];
            for slot in v.iter_mut().rev() {
                *slot = (idx % l as u64) as u8;
                idx /= l as u64;
            }
            PbwMonomial(v)
        })
    }

    /// Position of a monomial in [`basis`](Self::basis).
    pub fn basis_index(&self, m: &PbwMonomial) -> usize {
        let l = self.spec.order as usize;
        m.0.iter().fold(0usize, |acc, &e| acc * l + e as usize)
    }

    /// E_{i,j} in normal form.
    pub fn root_vector(&self, i: usize, j: usize) -> Result<Element> {
        self.root_generator(GeneratorKind::E(i, j))
    }

    /// F_{i,j} in normal form (full scope).
    pub fn root_vector_f(&self, i: usize, j: usize) -> Result<Element> {
        self.root_generator(GeneratorKind::F(i, j))
    }

    fn root_generator(&self, kind: GeneratorKind) -> Result<Element> {
        let k = self.spec.simple_count();
        let (i, j) = match kind {
            GeneratorKind::E(i, j) | GeneratorKind::F(i, j) => (i, j),
            _ => unreachable!(),
        };
        if !(1 <= i && i <= j && j <= k) {
            return Err(Error::IndexOutOfRange(format!("root interval ({i},{j}) for sl_{}", self.spec.rank)));
        }
        let g = self
            .index_of(kind)
            .ok_or_else(|| Error::Unsupported("F root vectors need the full scope".into()))?;
        Ok(self.generator_at(g))
    }

    /// Defining relations with labels, as polynomials in the generators.
    pub fn defining_relations(&self) -> Result<Vec<(String, Poly)>> {
        presentation(
            &self.spec,
            &self.generators,
            self.system.alphabet(),
            &self.datum,
            &self.r,
            &self.s,
            &standard_bracket,
        )
    }

    pub fn format_monomial(&self, m: &PbwMonomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(g, &e)| {
                if e == 1 {
                    self.generators[g].name.clone()
                } else {
                    format!("{}^{e}", self.generators[g].name)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }

    pub fn format_element(&self, a: &Element) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.terms
            .iter()
            .map(|(m, c)| format!("({c})*{}", self.format_monomial(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn add_into(map: &mut BTreeMap<PbwMonomial, Scalar>, m: PbwMonomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn poly_terms(p: &Poly, l: usize) -> Result<Vec<(Vec<Letter>, Scalar)>> {
    let mut out = Vec::new();
    for (w, c) in p.terms() {
        if !is_normal_word(w.letters(), l) {
            return Err(Error::Verification(format!("rule right-hand side has non-normal word {w:?}")));
        }
        out.push((w.letters().to_vec(), c.clone()));
    }
    Ok(out)
}
