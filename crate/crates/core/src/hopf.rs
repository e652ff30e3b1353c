//! Coproduct, counit, antipode and skew-primitive spaces on a built algebra.
//!
//! Tensor legs are kept in PBW normal form. Δ, S and S⁻¹ are extended from
//! generator values (root vectors through their bracket definitions) and
//! memoised per monomial inside a [`Hopf`] view of the handle.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;

use crate::cartan::{rs_quantum_binomial, scaled_parameters};
use crate::cyclotomic::{CyclotomicContext, Scalar};
use crate::error::{Error, Result};
use crate::linalg::nullspace;
use crate::pbw::{standard_bracket, AlgebraHandle, Element, GeneratorKind, PbwMonomial, Scope};

macro_rules! sparse_tensor {
    ($name:ident, $key:ty) => {
        #[derive(Clone, PartialEq, Eq, Debug)]
        pub struct $name {
            algebra: u64,
            ctx: Arc<CyclotomicContext>,
            terms: BTreeMap<$key, Scalar>,
        }

        impl $name {
            pub fn zero(handle: &AlgebraHandle) -> Self {
                $name {
                    algebra: handle.id(),
                    ctx: handle.context().clone(),
                    terms: BTreeMap::new(),
                }
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

            pub fn terms(&self) -> impl Iterator<Item = (&$key, &Scalar)> {
                self.terms.iter()
            }

            pub fn coeff(&self, k: &$key) -> Scalar {
                self.terms
                    .get(k)
                    .cloned()
                    .unwrap_or_else(|| Scalar::zero(&self.ctx))
            }

            pub fn add_term(&mut self, k: $key, c: Scalar) {
                if c.is_zero() {
                    return;
                }
                match self.terms.entry(k) {
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

            pub fn add_scaled(&mut self, other: &$name, c: &Scalar) {
                for (k, a) in &other.terms {
                    self.add_term(k.clone(), a * c);
                }
            }

            pub fn try_sub(&self, other: &$name) -> Result<$name> {
                if self.algebra != other.algebra {
                    return Err(Error::HandleMismatch);
                }
                let mut out = self.clone();
                out.add_scaled(other, &-Scalar::one(&self.ctx));
                Ok(out)
            }

            pub fn scale(&self, c: &Scalar) -> $name {
                let mut out = $name {
                    algebra: self.algebra,
                    ctx: self.ctx.clone(),
                    terms: BTreeMap::new(),
                };
                out.add_scaled(self, c);
                out
            }
        }
    };
}

sparse_tensor!(TensorElement, (PbwMonomial, PbwMonomial));
sparse_tensor!(Tensor3Element, (PbwMonomial, PbwMonomial, PbwMonomial));

impl TensorElement {
    pub fn pure(handle: &AlgebraHandle, a: &Element, b: &Element) -> Self {
        let mut t = TensorElement::zero(handle);
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                t.add_term((ma.clone(), mb.clone()), ca * cb);
            }
        }
        t
    }
}

/// Memoising view of the Hopf structure of a handle.
pub struct Hopf<'a> {
    h: &'a AlgebraHandle,
    delta: DashMap<PbwMonomial, Arc<TensorElement>>,
    anti: DashMap<PbwMonomial, Arc<Element>>,
    anti_inv: DashMap<PbwMonomial, Arc<Element>>,
    buckets: OnceLock<Vec<Bucket>>,
}

type Bucket = ((Vec<i64>, Vec<i64>), Vec<PbwMonomial>);

impl<'a> Hopf<'a> {
    pub fn new(h: &'a AlgebraHandle) -> Self {
        Hopf {
            h,
            delta: DashMap::new(),
            anti: DashMap::new(),
            anti_inv: DashMap::new(),
            buckets: OnceLock::new(),
        }
    }

    pub fn handle(&self) -> &AlgebraHandle {
        self.h
    }

    /// Non-unit monomials in the non-group generators, grouped by (F-degree, E-degree).
    fn buckets(&self) -> &[Bucket] {
        self.buckets.get_or_init(|| {
            let h = self.h;
            let l = h.order();
            let ng: Vec<usize> = (0..h.num_generators())
                .filter(|&i| !h.generators()[i].is_grouplike())
                .collect();
            let mut map: BTreeMap<(Vec<i64>, Vec<i64>), Vec<PbwMonomial>> = BTreeMap::new();
            for mut idx in 1..l.pow(ng.len() as u32) {
                let mut m = h.unit_monomial();
                for &gi in ng.iter().rev() {
                    m.0[gi] = (idx % l) as u8;
                    idx /= l;
                }
                map.entry(bidegree(h, &m)).or_default().push(m);
            }
            map.into_iter().collect()
        })
    }

    fn gen_mono(&self, kind: GeneratorKind) -> PbwMonomial {
        let mut m = self.h.unit_monomial();
        m.0[self.h.index_of(kind).expect("generator present")] = 1;
        m
    }

    fn neg_power(&self, kind: GeneratorKind) -> Element {
        let mut m = self.h.unit_monomial();
        m.0[self.h.index_of(kind).expect("generator present")] = (self.h.order() - 1) as u8;
        self.h.monomial(m)
    }

    fn mul(&self, a: &Element, b: &Element) -> Element {
        self.h.multiply(a, b).expect("same handle")
    }

    /// Product in H ⊗ H, legs normalised independently.
    pub fn tensor_mul(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(self.h);
        for ((p, q), c) in &a.terms {
            for ((u, v), d) in &b.terms {
                let left = self.h.mul_monomials(p, u);
                if left.is_empty() {
                    continue;
                }
                let right = self.h.mul_monomials(q, v);
                let cd = c * d;
                for (x, a1) in &left {
                    let ca = a1 * &cd;
                    for (y, b1) in &right {
                        out.add_term((x.clone(), y.clone()), &ca * b1);
                    }
                }
            }
        }
        out
    }

    fn generator_coproduct(&self, g: usize) -> TensorElement {
        let h = self.h;
        let one = Scalar::one(h.context());
        let unit = h.unit_monomial();
        let mut t = TensorElement::zero(h);
        let kind = h.generators()[g].kind;
        let gm = {
            let mut m = unit.clone();
            m.0[g] = 1;
            m
        };
        match kind {
            GeneratorKind::Omega(_) | GeneratorKind::OmegaPrime(_) => {
                t.add_term((gm.clone(), gm), one);
            }
            GeneratorKind::E(i, j) if i == j => {
                t.add_term((gm.clone(), unit), one.clone());
                t.add_term((self.gen_mono(GeneratorKind::Omega(i)), gm), one);
            }
            GeneratorKind::F(i, j) if i == j => {
                t.add_term((unit, gm.clone()), one.clone());
                t.add_term((gm, self.gen_mono(GeneratorKind::OmegaPrime(i))), one);
            }
            GeneratorKind::E(i, j) => {
                let c = standard_bracket(h.datum(), h.r(), h.s(), i, j);
                let a = self.coproduct_monomial(&self.gen_mono(GeneratorKind::E(i, i)));
                let b = self.coproduct_monomial(&self.gen_mono(GeneratorKind::E(i + 1, j)));
                t = self.tensor_mul(&a, &b);
                t.add_scaled(&self.tensor_mul(&b, &a), &-&c);
            }
            GeneratorKind::F(i, j) => {
                let c = standard_bracket(h.datum(), h.r(), h.s(), i, j);
                let a = self.coproduct_monomial(&self.gen_mono(GeneratorKind::F(i, i)));
                let b = self.coproduct_monomial(&self.gen_mono(GeneratorKind::F(i + 1, j)));
                t = self.tensor_mul(&b, &a);
                t.add_scaled(&self.tensor_mul(&a, &b), &-&c);
            }
        }
        t
    }

    /// Δ of a single PBW monomial, memoised.
    pub fn coproduct_monomial(&self, m: &PbwMonomial) -> Arc<TensorElement> {
        if let Some(t) = self.delta.get(m) {
            return t.clone();
        }
        let out = match m.0.iter().position(|&e| e > 0) {
            None => {
                let mut t = TensorElement::zero(self.h);
                t.add_term((m.clone(), m.clone()), Scalar::one(self.h.context()));
                t
            }
            Some(f) => {
                let mut rest = m.clone();
                rest.0[f] -= 1;
                if rest.is_unit() {
                    self.generator_coproduct(f)
                } else {
                    let mut first = self.h.unit_monomial();
                    first.0[f] = 1;
                    let a = self.coproduct_monomial(&first);
                    let b = self.coproduct_monomial(&rest);
                    self.tensor_mul(&a, &b)
                }
            }
        };
        let out = Arc::new(out);
        self.delta.insert(m.clone(), out.clone());
        out
    }

    pub fn coproduct(&self, a: &Element) -> TensorElement {
        let mut out = TensorElement::zero(self.h);
        for (m, c) in a.terms() {
            out.add_scaled(&self.coproduct_monomial(m), c);
        }
        out
    }

    /// (Δ ⊗ id) ∘ Δ.
    pub fn coproduct_sq(&self, a: &Element) -> Tensor3Element {
        let mut out = Tensor3Element::zero(self.h);
        for ((p, q), c) in self.coproduct(a).terms() {
            for ((x, y), d) in self.coproduct_monomial(p).terms() {
                out.add_term((x.clone(), y.clone(), q.clone()), c * d);
            }
        }
        out
    }

    /// (id ⊗ Δ) ∘ Δ.
    pub fn coproduct_sq_right(&self, a: &Element) -> Tensor3Element {
        let mut out = Tensor3Element::zero(self.h);
        for ((p, q), c) in self.coproduct(a).terms() {
            for ((x, y), d) in self.coproduct_monomial(q).terms() {
                out.add_term((p.clone(), x.clone(), y.clone()), c * d);
            }
        }
        out
    }

    pub fn counit(&self, a: &Element) -> Scalar {
        let mut out = Scalar::zero(self.h.context());
        for (m, c) in a.terms() {
            if self.h.is_grouplike_monomial(m) {
                out += c;
            }
        }
        out
    }

    fn generator_antipode(&self, g: usize, inverse: bool) -> Element {
        let h = self.h;
        let kind = h.generators()[g].kind;
        let minus = -Scalar::one(h.context());
        let x = h.generator_at(g);
        match kind {
            GeneratorKind::Omega(_) | GeneratorKind::OmegaPrime(_) => self.neg_power(kind),
            GeneratorKind::E(i, j) if i == j => {
                let w = self.neg_power(GeneratorKind::Omega(i));
                let p = if inverse { self.mul(&x, &w) } else { self.mul(&w, &x) };
                p.scale(&minus)
            }
            GeneratorKind::F(i, j) if i == j => {
                let w = self.neg_power(GeneratorKind::OmegaPrime(i));
                let p = if inverse { self.mul(&w, &x) } else { self.mul(&x, &w) };
                p.scale(&minus)
            }
            GeneratorKind::E(i, j) | GeneratorKind::F(i, j) => {
                let c = standard_bracket(h.datum(), h.r(), h.s(), i, j);
                let (simple, rest) = match kind {
                    GeneratorKind::E(..) => (GeneratorKind::E(i, i), GeneratorKind::E(i + 1, j)),
                    _ => (GeneratorKind::F(i, i), GeneratorKind::F(i + 1, j)),
                };
                let sa = self.antipode_monomial(&self.gen_mono(simple), inverse);
                let sb = self.antipode_monomial(&self.gen_mono(rest), inverse);
                // E = a b − c b a and F = b a − c a b; S reverses products
                let (first, second) = match kind {
                    GeneratorKind::E(..) => (self.mul(&sb, &sa), self.mul(&sa, &sb)),
                    _ => (self.mul(&sa, &sb), self.mul(&sb, &sa)),
                };
                &first - &second.scale(&c)
            }
        }
    }

    fn antipode_monomial(&self, m: &PbwMonomial, inverse: bool) -> Arc<Element> {
        let memo = if inverse { &self.anti_inv } else { &self.anti };
        if let Some(v) = memo.get(m) {
            return v.clone();
        }
        let out = match m.0.iter().position(|&e| e > 0) {
            None => self.h.one(),
            Some(f) => {
                let mut rest = m.clone();
                rest.0[f] -= 1;
                if rest.is_unit() {
                    self.generator_antipode(f, inverse)
                } else {
                    let mut first = self.h.unit_monomial();
                    first.0[f] = 1;
                    let a = self.antipode_monomial(&first, inverse);
                    let b = self.antipode_monomial(&rest, inverse);
                    self.mul(&b, &a)
                }
            }
        };
        let out = Arc::new(out);
        memo.insert(m.clone(), out.clone());
        out
    }

    pub fn antipode(&self, a: &Element) -> Element {
        let mut out = self.h.zero();
        for (m, c) in a.terms() {
            for (n, d) in self.antipode_monomial(m, false).terms() {
                out.add_term(n.clone(), d * c);
            }
        }
        out
    }

    pub fn antipode_inv(&self, a: &Element) -> Element {
        let mut out = self.h.zero();
        for (m, c) in a.terms() {
            for (n, d) in self.antipode_monomial(m, true).terms() {
                out.add_term(n.clone(), d * c);
            }
        }
        out
    }

    /// m ∘ (f ⊗ id) applied to a tensor, with f applied to the left leg.
    pub fn contract_left(&self, t: &TensorElement, f: impl Fn(&PbwMonomial) -> Element) -> Element {
        let mut out = self.h.zero();
        for ((p, q), c) in t.terms() {
            let fp = f(p);
            let prod = self.mul(&fp, &self.h.monomial(q.clone()));
            out = &out + &prod.scale(c);
        }
        out
    }
}

pub fn coproduct(handle: &AlgebraHandle, a: &Element) -> TensorElement {
    Hopf::new(handle).coproduct(a)
}

pub fn coproduct_sq(handle: &AlgebraHandle, a: &Element) -> Tensor3Element {
    Hopf::new(handle).coproduct_sq(a)
}

pub fn counit(handle: &AlgebraHandle, a: &Element) -> Scalar {
    Hopf::new(handle).counit(a)
}

pub fn antipode(handle: &AlgebraHandle, a: &Element) -> Element {
    Hopf::new(handle).antipode(a)
}

pub fn antipode_inv(handle: &AlgebraHandle, a: &Element) -> Element {
    Hopf::new(handle).antipode_inv(a)
}

fn check_power(handle: &AlgebraHandle, j: usize, a: u32) -> Result<()> {
    let k = handle.spec().simple_count();
    if j == 0 || j > k {
        return Err(Error::IndexOutOfRange(format!("simple root {j}")));
    }
    if a as u64 > handle.order() {
        return Err(Error::InvalidArgument(format!("power {a} exceeds L")));
    }
    Ok(())
}

/// Σ_i s_j^{i(i−a)} [a choose i]_j e_j^i ω_j^{a−i} ⊗ e_j^{a−i}.
pub fn power_coproduct_closed_form(handle: &AlgebraHandle, j: usize, a: u32) -> Result<TensorElement> {
    check_power(handle, j, a)?;
    let (rj, sj) = scaled_parameters(handle.datum(), handle.r(), handle.s(), j)?;
    let e = handle.index_of(GeneratorKind::E(j, j)).unwrap() as u16;
    let w = handle.index_of(GeneratorKind::Omega(j)).unwrap() as u16;
    let mut out = TensorElement::zero(handle);
    for i in 0..=a {
        let coeff = &sj.powi(i as i64 * (i as i64 - a as i64))?
            * &rs_quantum_binomial(a as usize, i as usize, &rj, &sj)?;
        let mut lw = vec![e; i as usize];
        lw.extend(std::iter::repeat_n(w, (a - i) as usize));
        let left = handle.normal_form_letters(&lw);
        let right = handle.normal_form_letters(&vec![e; (a - i) as usize]);
        out.add_scaled(&TensorElement::pure(handle, &left, &right), &coeff);
    }
    Ok(out)
}

/// Σ_i r_j^{i(i−a)} [a choose i]_j f_j^{a−i} ⊗ ω′_j^{a−i} f_j^i.
pub fn power_coproduct_closed_form_f(handle: &AlgebraHandle, j: usize, a: u32) -> Result<TensorElement> {
    check_power(handle, j, a)?;
    if handle.spec().scope != Scope::Full {
        return Err(Error::Unsupported("f generators need the full scope".into()));
    }
    let (rj, sj) = scaled_parameters(handle.datum(), handle.r(), handle.s(), j)?;
    let f = handle.index_of(GeneratorKind::F(j, j)).unwrap() as u16;
    let wp = handle.index_of(GeneratorKind::OmegaPrime(j)).unwrap() as u16;
    let mut out = TensorElement::zero(handle);
    for i in 0..=a {
        let coeff = &rj.powi(i as i64 * (i as i64 - a as i64))?
            * &rs_quantum_binomial(a as usize, i as usize, &rj, &sj)?;
        let left = handle.normal_form_letters(&vec![f; (a - i) as usize]);
        let mut rw = vec![wp; (a - i) as usize];
        rw.extend(std::iter::repeat_n(f, i as usize));
        let right = handle.normal_form_letters(&rw);
        out.add_scaled(&TensorElement::pure(handle, &left, &right), &coeff);
    }
    Ok(out)
}

/// Solution space of Δ(x) = x ⊗ g + h ⊗ x.
#[derive(Clone, Debug)]
pub struct SkewPrimitives {
    pub dimension: usize,
    pub basis: Vec<Element>,
}

/// Root-lattice degree of the E part and of the F part of a monomial.
fn bidegree(handle: &AlgebraHandle, m: &PbwMonomial) -> (Vec<i64>, Vec<i64>) {
    let k = handle.spec().simple_count();
    let mut nu = vec![0i64; k];
    let mut mu = vec![0i64; k];
    for (g, gen) in handle.generators().iter().enumerate() {
        let e = m.0[g] as i64;
        if e == 0 {
            continue;
        }
        match gen.kind {
            GeneratorKind::E(i, j) => (i..=j).for_each(|t| mu[t - 1] += e),
            GeneratorKind::F(i, j) => (i..=j).for_each(|t| nu[t - 1] += e),
            _ => {}
        }
    }
    (nu, mu)
}

fn group_exponents(handle: &AlgebraHandle, m: &PbwMonomial) -> (Vec<i64>, Vec<i64>) {
    let k = handle.spec().simple_count();
    let mut w = vec![0i64; k];
    let mut wp = vec![0i64; k];
    for (g, gen) in handle.generators().iter().enumerate() {
        match gen.kind {
            GeneratorKind::Omega(i) => w[i - 1] = m.0[g] as i64,
            GeneratorKind::OmegaPrime(i) => wp[i - 1] = m.0[g] as i64,
            _ => {}
        }
    }
    (w, wp)
}

fn solve_block(
    hopf: &Hopf<'_>,
    unknowns: &[PbwMonomial],
    g: &PbwMonomial,
    h: &PbwMonomial,
) -> Vec<Element> {
    let handle = hopf.handle();
    let minus = -Scalar::one(handle.context());
    let cols: Vec<BTreeMap<(PbwMonomial, PbwMonomial), Scalar>> = unknowns
        .iter()
        .map(|m| {
            let mut t = (*hopf.coproduct_monomial(m)).clone();
            t.add_term((m.clone(), g.clone()), minus.clone());
            t.add_term((h.clone(), m.clone()), minus.clone());
            t.terms().map(|(k, c)| (k.clone(), c.clone())).collect()
        })
        .collect();
    nullspace(&cols, &Scalar::zero(handle.context()))
        .into_iter()
        .map(|v| handle.from_terms(unknowns.iter().cloned().zip(v)))
        .collect()
}

/// Skew-primitive space P_{g,h}, split by (F-degree, E-degree).
///
/// In PBW coordinates Δ preserves the pair (F-degree, E-degree), and on a
/// component of degree (ν, μ) ≠ 0 the equation pins the group part to
/// γ = h·ω^{−μ} = g·ω′^{−ν}; the degree-0 component lives in the group algebra.
/// Components with both ν and μ nonzero never contribute.
pub fn skew_primitive_space(handle: &AlgebraHandle, g: &PbwMonomial, h: &PbwMonomial) -> Result<SkewPrimitives> {
    Hopf::new(handle).skew_primitives(g, h)
}

impl Hopf<'_> {
    /// See [`skew_primitive_space`]; reuses this view's coproduct memo.
    pub fn skew_primitives(&self, g: &PbwMonomial, h: &PbwMonomial) -> Result<SkewPrimitives> {
        skew_primitives_in(self, g, h)
    }
}

fn skew_primitives_in(hopf: &Hopf<'_>, g: &PbwMonomial, h: &PbwMonomial) -> Result<SkewPrimitives> {
    let handle = hopf.handle();
    if !handle.is_grouplike_monomial(g) || !handle.is_grouplike_monomial(h) {
        return Err(Error::InvalidArgument("g and h must be group-like monomials".into()));
    }
    let l = handle.order() as i64;
    let k = handle.spec().simple_count();
    let (gw, gwp) = group_exponents(handle, g);
    let (hw, hwp) = group_exponents(handle, h);
    let prime = if handle.spec().scope == Scope::Full { Some(hwp.as_slice()) } else { None };
    let mut blocks = Vec::new();
    for ((nu, mu), monos) in hopf.buckets() {
        // the (ν,0)⊗(0,μ) component F^aω^μγ ⊗ ω′^νE^bγ of Δ is injective and has no counterpart
        if nu.iter().any(|&d| d != 0) && mu.iter().any(|&d| d != 0) {
            continue;
        }
        // γ = h ω^{−μ} must equal g ω′^{−ν}
        let ok = (0..k).all(|t| {
            (hw[t] - mu[t] - gw[t]).rem_euclid(l) == 0 && (hwp[t] - gwp[t] + nu[t]).rem_euclid(l) == 0
        });
        if !ok {
            continue;
        }
        let w: Vec<i64> = (0..k).map(|t| (hw[t] - mu[t]).rem_euclid(l)).collect();
        let gamma = handle.grouplike(&w, prime)?;
        let block: Vec<PbwMonomial> = monos
            .iter()
            .map(|m| {
                let mut m = m.clone();
                for (t, &e) in gamma.0.iter().enumerate() {
                    if e > 0 {
                        m.0[t] = e;
                    }
                }
                m
            })
            .collect();
        blocks.push(block);
    }

    let mut basis = Vec::new();
    if g != h {
        basis.extend(solve_block(hopf, &[g.clone(), h.clone()], g, h));
    }
    for block in &blocks {
        basis.extend(solve_block(hopf, block, g, h));
    }
    Ok(SkewPrimitives {
        dimension: basis.len(),
        basis,
    })
}

/// Brute-force P_{g,h} over every basis coordinate; only for small algebras.
pub fn skew_primitive_space_brute_force(
    handle: &AlgebraHandle,
    g: &PbwMonomial,
    h: &PbwMonomial,
) -> SkewPrimitives {
    let hopf = Hopf::new(handle);
    let all: Vec<PbwMonomial> = handle.basis().collect();
    let basis = solve_block(&hopf, &all, g, h);
    SkewPrimitives {
        dimension: basis.len(),
        basis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbw::{build, AlgebraSpec};

    fn sl2(l: u64, x: i64, y: i64) -> AlgebraHandle {
        build(AlgebraSpec::new(2, l, x, y, Scope::Full).unwrap()).unwrap()
    }

    fn el(h: &AlgebraHandle, w: &[(&str, i64)]) -> Element {
        h.normal_form(w).unwrap()
    }

    #[test]
    fn generator_values() {
        let h = sl2(5, 1, 3);
        let hopf = Hopf::new(&h);
        let e = el(&h, &[("e1", 1)]);
        let d = hopf.coproduct(&e);
        let expected = {
            let mut t = TensorElement::pure(&h, &e, &h.one());
            t.add_scaled(&TensorElement::pure(&h, &el(&h, &[("w1", 1)]), &e), &Scalar::one(h.context()));
            t
        };
        assert_eq!(d, expected);
        let s = hopf.antipode(&e);
        assert_eq!(s, el(&h, &[("w1", -1), ("e1", 1)]).scale(&Scalar::from_integer(h.context(), -1)));
        assert_eq!(hopf.antipode(&el(&h, &[("w1", 1)])), el(&h, &[("w1", -1)]));
        assert!(hopf.counit(&el(&h, &[("e1", 1), ("w1", 1)])).is_zero());
        assert!(hopf.counit(&el(&h, &[("w1", 3)])).is_one());
    }

    #[test]
    fn antipode_squared_on_e() {
        let h = sl2(7, 1, 4);
        let hopf = Hopf::new(&h);
        let e = el(&h, &[("e1", 1)]);
        let s2 = hopf.antipode(&hopf.antipode(&e));
        let c = &h.r().invert().unwrap() * h.s();
        assert_eq!(s2, e.scale(&c));
    }

    fn iterated(hopf: &Hopf<'_>, x: &Element, a: u32) -> TensorElement {
        let h = hopf.handle();
        let dx = hopf.coproduct(x);
        let mut acc = TensorElement::pure(h, &h.one(), &h.one());
        for _ in 0..a {
            acc = hopf.tensor_mul(&acc, &dx);
        }
        acc
    }

    #[test]
    fn closed_forms_match_iterated_coproducts() {
        // (L, x, y): m = L for the first and last, m < L for the middle two
        for (l, x, y) in [(4, 0, 1), (6, 1, 4), (6, 1, 3), (5, 1, 2)] {
            let h = sl2(l, x, y);
            let hopf = Hopf::new(&h);
            let e = el(&h, &[("e1", 1)]);
            let f = el(&h, &[("f1", 1)]);
            for a in 0..=l as u32 {
                assert_eq!(iterated(&hopf, &e, a), power_coproduct_closed_form(&h, 1, a).unwrap(), "e L={l} a={a}");
                assert_eq!(iterated(&hopf, &f, a), power_coproduct_closed_form_f(&h, 1, a).unwrap(), "f L={l} a={a}");
                if a < l as u32 {
                    let ea = h.pow(&e, a).unwrap();
                    assert_eq!(hopf.coproduct(&ea), iterated(&hopf, &e, a));
                }
            }
        }
    }

    #[test]
    fn nilpotency_ideal_is_not_a_coideal_when_m_below_l() {
        // rs⁻¹ = −1 at L = 6: e^2 is skew-primitive and Δ(e)^6 survives although e^6 = 0
        let h = sl2(6, 1, 4);
        let hopf = Hopf::new(&h);
        let e = el(&h, &[("e1", 1)]);
        assert!(h.pow(&e, 6).unwrap().is_zero());
        assert!(!iterated(&hopf, &e, 6).is_zero());
        let h = sl2(5, 1, 2);
        let hopf = Hopf::new(&h);
        assert!(iterated(&hopf, &el(&h, &[("e1", 1)]), 5).is_zero());
    }

    #[test]
    fn skew_primitive_solver_matches_brute_force_on_sl2() {
        let h = sl2(3, 1, 2);
        let l = 3;
        for gw in 0..l {
            for hw in 0..l {
                for hwp in 0..l {
                    let g = h.grouplike(&[gw], Some(&[0])).unwrap();
                    let hh = h.grouplike(&[hw], Some(&[hwp])).unwrap();
                    let fast = skew_primitive_space(&h, &g, &hh).unwrap();
                    let slow = skew_primitive_space_brute_force(&h, &g, &hh);
                    assert_eq!(fast.dimension, slow.dimension, "g={gw} h=({hw},{hwp})");
                }
            }
        }
    }

    fn sl3(l: u64, x: i64, y: i64) -> AlgebraHandle {
        build(AlgebraSpec::new(3, l, x, y, Scope::Full).unwrap()).unwrap()
    }

    fn contract_right(hopf: &Hopf<'_>, t: &TensorElement, inverse: bool) -> Element {
        let h = hopf.handle();
        let mut out = h.zero();
        for ((p, q), c) in t.terms() {
            let q = h.monomial(q.clone());
            let sq = if inverse { hopf.antipode_inv(&q) } else { hopf.antipode(&q) };
            out = &out + &h.multiply(&h.monomial(p.clone()), &sq).unwrap().scale(c);
        }
        out
    }

    fn check_axioms(h: &AlgebraHandle) {
        let hopf = Hopf::new(h);
        for m in h.basis() {
            let x = h.monomial(m.clone());
            assert_eq!(hopf.coproduct_sq(&x), hopf.coproduct_sq_right(&x), "coassociativity at {}", h.format_monomial(&m));
            let d = hopf.coproduct(&x);
            let mut left = h.zero();
            let mut right = h.zero();
            for ((p, q), c) in d.terms() {
                left = &left + &h.monomial(q.clone()).scale(&(c * &hopf.counit(&h.monomial(p.clone()))));
                right = &right + &h.monomial(p.clone()).scale(&(c * &hopf.counit(&h.monomial(q.clone()))));
            }
            assert_eq!(left, x);
            assert_eq!(right, x);
            let eps = h.scalar(hopf.counit(&x));
            let conv = hopf.contract_left(&d, |p| hopf.antipode(&h.monomial(p.clone())));
            assert_eq!(conv, eps, "m(S⊗id)Δ at {}", h.format_monomial(&m));
            assert_eq!(contract_right(&hopf, &d, false), eps, "m(id⊗S)Δ at {}", h.format_monomial(&m));
            assert_eq!(hopf.antipode(&hopf.antipode_inv(&x)), x);
            assert_eq!(hopf.antipode_inv(&hopf.antipode(&x)), x);
        }
    }

    #[test]
    fn hopf_axioms_on_sl2_bases() {
        for (l, x, y) in [(3, 1, 2), (4, 0, 1), (6, 1, 4), (6, 1, 3)] {
            check_axioms(&sl2(l, x, y));
        }
    }

    #[test]
    fn hopf_axioms_on_sl3_borel() {
        let h = build(AlgebraSpec::new(3, 4, 0, 1, Scope::Borel).unwrap()).unwrap();
        check_axioms(&h);
    }

    #[test]
    fn coproduct_is_multiplicative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for h in [sl2(5, 1, 2), sl3(3, 1, 2), sl3(4, 0, 1)] {
            let hopf = Hopf::new(&h);
            let basis: Vec<_> = h
                .basis()
                .filter(|m| h.split_group(m).0.degree() <= 3)
                .collect();
            for _ in 0..30 {
                let a = h.monomial(basis[rng.gen_range(0..basis.len())].clone());
                let b = h.monomial(basis[rng.gen_range(0..basis.len())].clone());
                let ab = h.multiply(&a, &b).unwrap();
                assert_eq!(hopf.coproduct(&ab), hopf.tensor_mul(&hopf.coproduct(&a), &hopf.coproduct(&b)));
                let sab = hopf.antipode(&ab);
                assert_eq!(sab, h.multiply(&hopf.antipode(&b), &hopf.antipode(&a)).unwrap());
            }
        }
    }

    /// Expected dim P_{1,σ} and P_{σ,1} from the list of exceptional group-likes.
    fn lemma_dims(h: &AlgebraHandle, sigma: &PbwMonomial) -> (usize, usize) {
        let l = h.order() as i64;
        let k = h.spec().simple_count();
        let v = h.r() * &h.s().invert().unwrap();
        let m = v.multiplicative_order().unwrap() as i64;
        let (w, wp) = group_exponents(h, sigma);
        let unit_at = |i: usize, a: i64, b: i64| {
            (0..k).all(|t| {
                let (ea, eb) = if t == i { (a, b) } else { (0, 0) };
                w[t] == ea.rem_euclid(l) && wp[t] == eb.rem_euclid(l)
            })
        };
        let trivial = sigma.is_unit();
        let base = usize::from(!trivial);
        let mut left = base;
        let mut right = base;
        for i in 0..k {
            for (a, b) in [(1, 0), (0, -1), (m, 0), (0, -m)] {
                if (a, b) != (0, 0) && unit_at(i, a, b) && !(m == l && (a == m || b == -m)) {
                    left += 1;
                }
            }
            for (a, b) in [(0, 1), (-1, 0), (0, m), (-m, 0)] {
                if unit_at(i, a, b) && !(m == l && (b == m || a == -m)) {
                    right += 1;
                }
            }
        }
        (left, right)
    }

    fn check_lemma(h: &AlgebraHandle, sigmas: impl Iterator<Item = PbwMonomial>) {
        let hopf = Hopf::new(h);
        let one = h.unit_monomial();
        for sigma in sigmas {
            let (el, er) = lemma_dims(h, &sigma);
            let p1 = hopf.skew_primitives(&one, &sigma).unwrap().dimension;
            let p2 = hopf.skew_primitives(&sigma, &one).unwrap().dimension;
            assert_eq!((p1, p2), (el, er), "σ = {}", h.format_monomial(&sigma));
        }
    }

    fn group(h: &AlgebraHandle) -> Vec<PbwMonomial> {
        h.basis().filter(|m| h.is_grouplike_monomial(m)).collect()
    }

    #[test]
    fn skew_primitives_of_sl2() {
        for (l, x, y) in [(4, 0, 1), (4, 1, 3), (6, 1, 4), (6, 1, 3), (6, 2, 3), (5, 1, 3)] {
            let h = sl2(l, x, y);
            check_lemma(&h, group(&h).into_iter());
        }
    }

    #[test]
    fn skew_primitives_of_sl3() {
        for (l, x, y) in [(4, 1, 3), (6, 1, 4), (6, 1, 3), (5, 1, 2)] {
            let h = sl3(l, x, y);
            check_lemma(&h, group(&h).into_iter());
        }
    }
}
