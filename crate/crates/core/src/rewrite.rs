//! Noncommutative polynomials and rewriting over a finite weighted alphabet.
//!
//! Words are compared by total letter weight, then length, then
//! lexicographically. With nonnegative weights this is a monoid well-order.
//! A [`RewriteSystem`] holds rules `lhs -> rhs` where every word of `rhs` is
//! smaller than `lhs`; reducing a polynomial repeatedly replaces its largest
//! reducible term, which always terminates.
//!
//! [`complete`] runs a Buchberger/Knuth-Bendix style completion: overlaps of
//! leading words are resolved and any non-joinable difference becomes a new
//! rule. Finite-dimensional quotients complete within a word-length bound.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::cyclotomic::{CyclotomicContext, Scalar};
use crate::error::{Error, Result};

pub type Letter = u16;

/// Coefficient field together with the letter weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    ctx: Arc<CyclotomicContext>,
    weights: Arc<[u32]>,
}

impl Alphabet {
    pub fn new(ctx: &Arc<CyclotomicContext>, weights: Vec<u32>) -> Self {
        Alphabet {
            ctx: ctx.clone(),
            weights: weights.into(),
        }
    }

    /// Every letter of weight 1 (plain deglex).
    pub fn uniform(ctx: &Arc<CyclotomicContext>, size: usize) -> Self {
        Alphabet::new(ctx, vec![1; size])
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.ctx
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn word(&self, letters: &[Letter]) -> Word {
        Word {
            weight: letters.iter().map(|&x| self.weights[x as usize]).sum(),
            letters: letters.to_vec(),
        }
    }
}

/// A word with its cached weight.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    weight: u32,
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `left · self · right`.
    pub fn sandwich(&self, left: &Word, right: &Word) -> Word {
        let mut v = Vec::with_capacity(left.len() + self.len() + right.len());
        v.extend_from_slice(&left.letters);
        v.extend_from_slice(&self.letters);
        v.extend_from_slice(&right.letters);
        Word {
            weight: left.weight + self.weight + right.weight,
            letters: v,
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .cmp(&other.weight)
            .then_with(|| self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.letters)
    }
}

/// Sparse linear combination of words; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    alpha: Alphabet,
    terms: BTreeMap<Word, Scalar>,
}

impl Poly {
    pub fn zero(alpha: &Alphabet) -> Self {
        Poly {
            alpha: alpha.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn term(alpha: &Alphabet, letters: &[Letter], coeff: Scalar) -> Self {
        let mut p = Poly::zero(alpha);
        p.add_term(alpha.word(letters), coeff);
        p
    }

    pub fn word(alpha: &Alphabet, letters: &[Letter]) -> Self {
        Poly::term(alpha, letters, Scalar::one(&alpha.ctx))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alpha
    }

    pub fn context(&self) -> &Arc<CyclotomicContext> {
        &self.alpha.ctx
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

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Word, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, word: Word, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Scalar) {
        for (w, a) in &other.terms {
            self.add_term(w.clone(), a * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero(&self.alpha);
        out.add_scaled(self, c);
        out
    }

    /// `left · self · right` for fixed words.
    pub fn sandwich(&self, left: &Word, right: &Word) -> Poly {
        let mut out = Poly::zero(&self.alpha);
        for (w, c) in &self.terms {
            out.terms.insert(w.sandwich(left, right), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(&self.alpha);
        let e = Word::empty();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.sandwich(&e, v), a * b);
            }
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one(self.context()));
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one(self.context()));
        out
    }

    fn pop_largest(&mut self) -> Option<(Word, Scalar)> {
        self.terms.pop_last()
    }
}

/// A rule `lhs -> rhs`; every word of `rhs` is smaller than `lhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Poly,
}

impl Rule {
    /// The relation `lhs − rhs` as a polynomial.
    pub fn relation(&self) -> Poly {
        let mut p = self.rhs.scale(&-Scalar::one(self.rhs.context()));
        p.add_term(self.lhs.clone(), Scalar::one(self.rhs.context()));
        p
    }
}

/// A set of rules indexed by left-hand side.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    alpha: Alphabet,
    rules: BTreeMap<Word, Poly>,
    lookup: HashSet<Vec<Letter>>,
    lengths: Vec<usize>,
}

impl RewriteSystem {
    pub fn new(alpha: &Alphabet) -> Self {
        RewriteSystem {
            alpha: alpha.clone(),
            rules: BTreeMap::new(),
            lookup: HashSet::new(),
            lengths: Vec::new(),
        }
    }

    pub fn from_rules(alpha: &Alphabet, rules: impl IntoIterator<Item = Rule>) -> Self {
        let mut sys = RewriteSystem::new(alpha);
        for r in rules {
            sys.lookup.insert(r.lhs.letters.clone());
            sys.rules.insert(r.lhs, r.rhs);
        }
        sys.refresh_lengths();
        sys
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = Rule> + '_ {
        self.rules.iter().map(|(l, r)| Rule {
            lhs: l.clone(),
            rhs: r.clone(),
        })
    }

    pub fn rule_rhs(&self, lhs: &[Letter]) -> Option<&Poly> {
        self.rules.get(&self.alpha.word(lhs))
    }

    pub fn leading_words(&self) -> impl Iterator<Item = &Word> {
        self.rules.keys()
    }

    fn refresh_lengths(&mut self) {
        let set: HashSet<usize> = self.rules.keys().map(Word::len).collect();
        let mut v: Vec<usize> = set.into_iter().collect();
        v.sort_unstable();
        self.lengths = v;
    }

    /// First occurrence (position, length) of some leading word inside `w`.
    fn find_redex(&self, w: &[Letter]) -> Option<(usize, usize)> {
        for start in 0..w.len() {
            for &len in &self.lengths {
                if start + len > w.len() {
                    break;
                }
                if self.lookup.contains(&w[start..start + len]) {
                    return Some((start, len));
                }
            }
        }
        None
    }

    pub fn is_irreducible(&self, w: &[Letter]) -> bool {
        self.find_redex(w).is_none()
    }

    /// Full reduction to normal form.
    pub fn reduce(&self, p: &Poly) -> Poly {
        let mut work = p.clone();
        let mut done = Poly::zero(&self.alpha);
        while let Some((w, c)) = work.pop_largest() {
            match self.find_redex(&w.letters) {
                None => {
                    done.terms.insert(w, c);
                }
                Some((pos, len)) => {
                    let lhs = self.alpha.word(&w.letters[pos..pos + len]);
                    let rhs = &self.rules[&lhs];
                    let left = self.alpha.word(&w.letters[..pos]);
                    let right = self.alpha.word(&w.letters[pos + len..]);
                    for (u, a) in rhs.terms() {
                        work.add_term(u.sandwich(&left, &right), a * &c);
                    }
                }
            }
        }
        done
    }

    pub fn reduce_word(&self, w: &[Letter]) -> Poly {
        self.reduce(&Poly::word(&self.alpha, w))
    }

    /// Proper overlaps of two rules: (overlap word, difference of the two one-step rewrites).
    fn overlaps(&self, a: &Word, b: &Word) -> Vec<(Word, Poly)> {
        let mut out = Vec::new();
        let ra = &self.rules[a];
        let rb = &self.rules[b];
        let max = a.len().min(b.len());
        for k in 1..max {
            if a.letters[a.len() - k..] != b.letters[..k] {
                continue;
            }
            let tail = self.alpha.word(&b.letters[k..]);
            let head = self.alpha.word(&a.letters[..a.len() - k]);
            let overlap = a.sandwich(&Word::empty(), &tail);
            let s = ra
                .sandwich(&Word::empty(), &tail)
                .sub(&rb.sandwich(&head, &Word::empty()));
            out.push((overlap, s));
        }
        out
    }

    /// Check local confluence on every overlap; returns the first failing overlap.
    pub fn check_confluence(&self) -> std::result::Result<(), Word> {
        let keys: Vec<&Word> = self.rules.keys().collect();
        for a in &keys {
            for b in &keys {
                for (w, s) in self.overlaps(a, b) {
                    if !self.reduce(&s).is_zero() {
                        return Err(w);
                    }
                }
            }
        }
        // an interreduced system has no leading word inside another
        for a in &keys {
            for b in &keys {
                if a != b
                    && a.len() >= b.len()
                    && a.letters.windows(b.len()).any(|w| w == &b.letters[..])
                {
                    return Err((*a).clone());
                }
            }
        }
        Ok(())
    }

    /// Number of irreducible words, by depth-first enumeration.
    ///
    /// Returns `None` when more than `limit` words are found or a word longer than
    /// `max_len` is irreducible (the quotient looks infinite).
    pub fn count_irreducible(&self, limit: u64, max_len: usize) -> Option<u64> {
        let mut count = 0u64;
        let mut stack: Vec<Vec<Letter>> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            count += 1;
            if count > limit {
                return None;
            }
            for x in 0..self.alpha.size() as Letter {
                let mut v = w.clone();
                v.push(x);
                if self.suffix_irreducible(&v) {
                    if v.len() > max_len {
                        return None;
                    }
                    stack.push(v);
                }
            }
        }
        Some(count)
    }

    /// Number of irreducible words, counted on the automaton of leading-word prefixes.
    ///
    /// Returns `None` when an irreducible word longer than `max_len` exists.
    pub fn count_irreducible_automaton(&self, max_len: usize) -> Option<u128> {
        let prefixes: HashSet<Vec<Letter>> = self
            .lookup
            .iter()
            .flat_map(|w| (0..w.len()).map(move |k| w[..k].to_vec()))
            .collect();
        // state: longest suffix that is a proper prefix of some leading word
        let mut layer: HashMap<Vec<Letter>, u128> = HashMap::from([(Vec::new(), 1)]);
        let mut total = 0u128;
        for len in 0..=max_len + 1 {
            if layer.is_empty() {
                return Some(total);
            }
            if len > max_len {
                return None;
            }
            total += layer.values().sum::<u128>();
            let mut next: HashMap<Vec<Letter>, u128> = HashMap::new();
            for (state, &c) in &layer {
                for x in 0..self.alpha.size() as Letter {
                    let mut t = state.clone();
                    t.push(x);
                    if !self.suffix_irreducible(&t) {
                        continue;
                    }
                    let k = (0..=t.len()).find(|&k| prefixes.contains(&t[k..])).unwrap_or(t.len());
                    *next.entry(t[k..].to_vec()).or_insert(0) += c;
                }
            }
            layer = next;
        }
        None
    }

    /// Whether no leading word ends at the last letter of `w`.
    fn suffix_irreducible(&self, w: &[Letter]) -> bool {
        for &len in &self.lengths {
            if len > w.len() {
                break;
            }
            if self.lookup.contains(&w[w.len() - len..]) {
                return false;
            }
        }
        true
    }

    /// Insert a rule, removing rules whose leading word contains the new one.
    /// Returns their relations, which must be re-processed.
    fn insert_rule(&mut self, lhs: Word, rhs: Poly) -> Vec<Poly> {
        let mut requeue = Vec::new();
        let doomed: Vec<Word> = self
            .rules
            .keys()
            .filter(|k| {
                k.len() >= lhs.len() && k.letters.windows(lhs.len()).any(|w| w == &lhs.letters[..])
            })
            .cloned()
            .collect();
        for k in doomed {
            let r = self.rules.remove(&k).unwrap();
            self.lookup.remove(&k.letters);
            requeue.push(Rule { lhs: k, rhs: r }.relation());
        }
        self.lookup.insert(lhs.letters.clone());
        self.rules.insert(lhs, rhs);
        self.refresh_lengths();
        requeue
    }

    /// Reduce every right-hand side against the current rules.
    pub fn interreduce(&mut self) {
        let keys: Vec<Word> = self.rules.keys().cloned().collect();
        for k in keys {
            let rhs = self.rules[&k].clone();
            let red = self.reduce(&rhs);
            self.rules.insert(k, red);
        }
    }
}

/// Limits for [`complete`].
#[derive(Clone, Copy, Debug)]
pub struct CompletionBudget {
    /// Overlap words longer than this abort the completion.
    pub max_overlap_len: usize,
    pub max_rules: usize,
    pub max_pairs: usize,
}

impl Default for CompletionBudget {
    fn default() -> Self {
        CompletionBudget {
            max_overlap_len: 64,
            max_rules: 4096,
            max_pairs: 200_000,
        }
    }
}

/// Split a nonzero polynomial into (leading word, rhs) with leading coefficient 1.
fn orient(p: &Poly) -> Result<(Word, Poly)> {
    let (lw, lc) = p
        .leading()
        .map(|(w, c)| (w.clone(), c.clone()))
        .expect("orient on zero polynomial");
    let minus_inv = -&lc.invert()?;
    let mut rhs = Poly::zero(p.alphabet());
    for (w, c) in p.terms() {
        if *w != lw {
            rhs.add_term(w.clone(), c * &minus_inv);
        }
    }
    Ok((lw, rhs))
}

#[derive(PartialEq, Eq)]
struct PendingPair {
    len: usize,
    seq: u64,
    a: Word,
    b: Word,
}

impl Ord for PendingPair {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (len, seq)
        other
            .len
            .cmp(&self.len)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for PendingPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Complete a set of relations into a confluent, interreduced rewrite system.
pub fn complete(alpha: &Alphabet, relations: Vec<Poly>, budget: CompletionBudget) -> Result<RewriteSystem> {
    let mut sys = RewriteSystem::new(alpha);
    let mut pending: Vec<Poly> = relations;
    let mut pairs: BinaryHeap<PendingPair> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut processed = 0usize;

    loop {
        while let Some(p) = pending.pop() {
            let red = sys.reduce(&p);
            if red.is_zero() {
                continue;
            }
            let (lhs, rhs) = orient(&red)?;
            if sys.len() >= budget.max_rules {
                return Err(Error::Completion(format!(
                    "rule budget {} exhausted",
                    budget.max_rules
                )));
            }
            log::trace!("new rule {lhs:?}");
            let requeue = sys.insert_rule(lhs.clone(), rhs);
            pending.extend(requeue);
            let keys: Vec<Word> = sys.rules.keys().cloned().collect();
            for k in keys {
                for (a, b) in [(lhs.clone(), k.clone()), (k.clone(), lhs.clone())] {
                    let len = a.len() + b.len();
                    seq += 1;
                    pairs.push(PendingPair { len, seq, a, b });
                }
            }
        }
        let Some(pair) = pairs.pop() else { break };
        if !sys.rules.contains_key(&pair.a) || !sys.rules.contains_key(&pair.b) {
            continue;
        }
        processed += 1;
        if processed > budget.max_pairs {
            return Err(Error::Completion(format!(
                "critical pair budget {} exhausted with {} rules",
                budget.max_pairs,
                sys.len()
            )));
        }
        for (w, s) in sys.overlaps(&pair.a, &pair.b) {
            if w.len() > budget.max_overlap_len {
                return Err(Error::Completion(format!(
                    "overlap of length {} exceeds bound {}",
                    w.len(),
                    budget.max_overlap_len
                )));
            }
            let red = sys.reduce(&s);
            if !red.is_zero() {
                pending.push(red);
            }
        }
    }
    sys.interreduce();
    log::debug!("completion: {} rules after {processed} critical pairs", sys.len());
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(n: usize) -> Alphabet {
        Alphabet::uniform(&CyclotomicContext::new(4).unwrap(), n)
    }

    #[test]
    fn word_order() {
        let a = alpha(2);
        assert!(a.word(&[1]) < a.word(&[0, 0]));
        assert!(a.word(&[0, 1]) < a.word(&[1, 0]));
        assert!(Word::empty() < a.word(&[0]));
        let w = Alphabet::new(a.context(), vec![0, 2]);
        // weight dominates length
        assert!(w.word(&[0, 0, 0]) < w.word(&[1]));
        assert!(w.word(&[1]) < w.word(&[0, 1]));
    }

    #[test]
    fn commutative_polynomial_ring_truncated() {
        // K[a, b]/(a^3, b^2): dimension 6
        let a = alpha(2);
        let rels = vec![
            Poly::word(&a, &[1, 0]).sub(&Poly::word(&a, &[0, 1])),
            Poly::word(&a, &[0, 0, 0]),
            Poly::word(&a, &[1, 1]),
        ];
        let sys = complete(&a, rels, CompletionBudget::default()).unwrap();
        assert!(sys.check_confluence().is_ok());
        assert_eq!(sys.count_irreducible(1000, 20), Some(6));
    }

    #[test]
    fn quantum_plane_at_root_of_unity() {
        // y x = i x y, x^4 = y^4 = 0: dimension 16
        let a = alpha(2);
        let i = Scalar::root_of_unity(a.context(), 1);
        let rels = vec![
            Poly::word(&a, &[1, 0]).sub(&Poly::word(&a, &[0, 1]).scale(&i)),
            Poly::word(&a, &[0, 0, 0, 0]),
            Poly::word(&a, &[1, 1, 1, 1]),
        ];
        let sys = complete(&a, rels, CompletionBudget::default()).unwrap();
        assert_eq!(sys.count_irreducible(1000, 20), Some(16));
        assert_eq!(sys.count_irreducible_automaton(20), Some(16));
        // y x^2 = i^2 x^2 y = -x^2 y
        let nf = sys.reduce_word(&[1, 0, 0]);
        let expected = Poly::term(&a, &[0, 0, 1], Scalar::from_integer(a.context(), -1));
        assert_eq!(nf, expected);
    }

    #[test]
    fn completion_discovers_collapse() {
        // y x = x y and y x = -x y force x y = 0
        let a = alpha(2);
        let rels = vec![
            Poly::word(&a, &[1, 0]).sub(&Poly::word(&a, &[0, 1])),
            Poly::word(&a, &[1, 0]).add(&Poly::word(&a, &[0, 1])),
            Poly::word(&a, &[0, 0]),
            Poly::word(&a, &[1, 1]),
        ];
        let sys = complete(&a, rels, CompletionBudget::default()).unwrap();
        // basis 1, x, y
        assert_eq!(sys.count_irreducible(1000, 20), Some(3));
        assert_eq!(sys.count_irreducible_automaton(20), Some(3));
        assert!(sys.check_confluence().is_ok());
    }

    #[test]
    fn overlap_resolution() {
        // b a = a, a a = a, b b = b
        let a = alpha(2);
        let rels = vec![
            Poly::word(&a, &[1, 0]).sub(&Poly::word(&a, &[0])),
            Poly::word(&a, &[0, 0]).sub(&Poly::word(&a, &[0])),
            Poly::word(&a, &[1, 1]).sub(&Poly::word(&a, &[1])),
        ];
        let sys = complete(&a, rels, CompletionBudget::default()).unwrap();
        assert!(sys.check_confluence().is_ok());
    }

    #[test]
    fn weighted_orientation() {
        // weights (0, 1, 2): z y outranks the weight-0 word x^4
        let ctx = CyclotomicContext::new(3).unwrap();
        let a = Alphabet::new(&ctx, vec![0, 1, 2]);
        let p = Poly::word(&a, &[2, 1])
            .sub(&Poly::word(&a, &[1, 2]))
            .sub(&Poly::word(&a, &[0, 0, 0, 0]));
        let (lhs, _) = orient(&p).unwrap();
        assert_eq!(lhs.letters(), &[2, 1]);
    }

    #[test]
    fn infinite_quotient_is_detected() {
        let a = alpha(1);
        let sys = complete(&a, vec![], CompletionBudget::default()).unwrap();
        assert_eq!(sys.count_irreducible(100, 1000), None);
        assert_eq!(sys.count_irreducible_automaton(50), None);
    }
}
