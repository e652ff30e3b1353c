//! Isomorphism classes of parameter pairs (r, s) = (ζ_L^x, ζ_L^y).
//!
//! Pairs are merged along the reduction moves of each family (only moves that
//! stay inside the powers of ζ_L are used) and every class is annotated with
//! m = ord(ζ^{x−y}), ℓ′ = lcm(ord ζ^x, ord ζ^y) and, for type A, the
//! Drinfeld-double flag.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cartan::Family;
use crate::error::{Error, Result};
use crate::pbw::root_order;
use crate::reference::{self, Pair};

fn reduce(v: i64, l: u64) -> u64 {
    v.rem_euclid(l as i64) as u64
}

/// Why no pair at all is admissible for this family at order L, if that is the case.
pub fn order_incompatibility(family: Family, order: u64) -> Option<String> {
    if order < 2 {
        return Some(format!("order {order} is below 2"));
    }
    match family {
        Family::A => None,
        Family::B | Family::C | Family::D | Family::F4 if order.is_multiple_of(2) => {
            Some(format!("type {family} needs an odd order, got {order}"))
        }
        Family::G2 if order.is_multiple_of(3) => Some(format!("type G2 needs an order coprime to 3, got {order}")),
        _ => None,
    }
}

/// Multiples k with k(x − y) ≢ 0 (mod L) required by the family.
fn forbidden_multiples(family: Family) -> &'static [i64] {
    match family {
        Family::A => &[1],
        Family::B | Family::C | Family::F4 => &[1, 3, 4],
        Family::D => &[1, 2],
        Family::G2 => &[1, 4, 6],
    }
}

pub fn admissible(family: Family, order: u64, pair: Pair) -> bool {
    if order_incompatibility(family, order).is_some() {
        return false;
    }
    let d = pair.0 as i64 - pair.1 as i64;
    forbidden_multiples(family)
        .iter()
        .all(|&k| (k * d).rem_euclid(order as i64) != 0)
}

/// Images of a pair under the family's reduction moves, the pair included.
///
/// Twist scalars ζ with ζ² = 1 (B, F4), ζ = −1 (C) or ζ³ = 1 (G2) are used only
/// when ζ is a power of ζ_L.
pub fn moves(family: Family, order: u64, pair: Pair) -> Result<Vec<Pair>> {
    if !admissible(family, order, pair) {
        return Err(Error::Constraint(format!(
            "({}, {}) is not admissible for type {family} at L = {order}",
            pair.0, pair.1
        )));
    }
    let l = order as i64;
    let (x, y) = (pair.0 as i64, pair.1 as i64);
    let mut out: Vec<Pair> = vec![pair];
    let mut push = |a: i64, b: i64| out.push((reduce(a, order), reduce(b, order)));
    // exponents t with ζ_L^t a root of unity of order dividing k
    let twists = |k: i64| -> Vec<i64> { (0..l).filter(|t| (k * t) % l == 0).collect() };
    match family {
        Family::A => {
            push(y, x);
            push(-y, -x);
            push(-x, -y);
        }
        Family::B | Family::F4 => {
            for t in twists(2) {
                push(x + t, y + t);
                push(y + t, x + t);
            }
        }
        Family::C => {
            for t in twists(2) {
                push(x + t, y + t);
            }
        }
        Family::D => push(-y, -x),
        Family::G2 => {
            for t in twists(3) {
                push(x + t, y + t);
                push(y + t, x + t);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// gcd(Σ_k (−1)^k y^{n−1−k} z^k, L) = 1 with y, z taken in [0, L).
pub fn drinfeld_double_predicate(n: usize, order: u64, pair: Pair) -> bool {
    let (y, z) = (BigInt::from(pair.0 % order), BigInt::from(pair.1 % order));
    let mut sum = BigInt::zero();
    for k in 0..n {
        let term = num_traits::pow(y.clone(), n - 1 - k) * num_traits::pow(z.clone(), k);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.gcd(&BigInt::from(order)).is_one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoClass {
    /// Sorted members; the first is the representative.
    pub members: Vec<Pair>,
    /// Order of rs⁻¹.
    pub m: u64,
    /// lcm of the orders of r and s.
    pub ell_prime: u64,
    /// Dimension for type A, as a power of ℓ′.
    pub dimension: Option<String>,
    /// Drinfeld-double predicate at the table's rank (type A only).
    pub double: Option<bool>,
    pub standard: bool,
}

impl IsoClass {
    pub fn representative(&self) -> Pair {
        self.members[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoTable {
    pub family: Family,
    pub order: u64,
    /// n of sl_n used for the double flag.
    pub sl_rank: usize,
    pub classes: Vec<IsoClass>,
    /// Set when the order is incompatible with the family.
    pub reason: Option<String>,
}

impl IsoTable {
    pub fn pair_count(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }

    pub fn class_of(&self, pair: Pair) -> Option<&IsoClass> {
        self.classes.iter().find(|c| c.members.contains(&pair))
    }

    /// The partition as sorted classes, for comparisons.
    pub fn partition(&self) -> Vec<Vec<Pair>> {
        let mut p: Vec<Vec<Pair>> = self.classes.iter().map(|c| c.members.clone()).collect();
        p.sort();
        p
    }

    /// Every class is constant in m, ℓ′ and the double flag, and closed under moves.
    pub fn check_invariants(&self) -> Result<()> {
        for c in &self.classes {
            for &p in &c.members {
                let (m, lp) = pair_invariants(self.order, p);
                if m != c.m || lp != c.ell_prime {
                    return Err(Error::Verification(format!(
                        "class of ({}, {}) mixes invariants",
                        c.members[0].0, c.members[0].1
                    )));
                }
                if c.double.is_some_and(|d| d != drinfeld_double_predicate(self.sl_rank, self.order, p)) {
                    return Err(Error::Verification(format!("double flag varies inside the class of {p:?}")));
                }
                for q in moves(self.family, self.order, p)? {
                    if !c.members.contains(&q) {
                        return Err(Error::Verification(format!("class not closed under moves at {q:?}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// (m, ℓ′) for a pair.
pub fn pair_invariants(order: u64, pair: Pair) -> (u64, u64) {
    let m = root_order(order, pair.0 as i64 - pair.1 as i64);
    let lp = root_order(order, pair.0 as i64).lcm(&root_order(order, pair.1 as i64));
    (m, lp)
}

/// The standard pair (1, −1) when it is admissible.
pub fn standard_pair(family: Family, order: u64) -> Option<Pair> {
    let p = (1 % order, reduce(-1, order));
    admissible(family, order, p).then_some(p)
}

/// Union-find over `pairs` along the moves, visiting pairs in the given order.
///
/// Returns sorted classes in sorted order. Every pair must be admissible and the
/// set must be closed under moves.
pub fn partition_pairs(family: Family, order: u64, pairs: &[Pair]) -> Result<Vec<Vec<Pair>>> {
    let index: BTreeMap<Pair, usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..pairs.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (i, &p) in pairs.iter().enumerate() {
        for q in moves(family, order, p)? {
            let j = *index
                .get(&q)
                .ok_or_else(|| Error::InvalidArgument(format!("pair set is not closed under moves at {q:?}")))?;
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Pair>> = BTreeMap::new();
    for (i, &p) in pairs.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(p);
    }
    let mut out: Vec<Vec<Pair>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    Ok(out)
}

/// All admissible pairs in lexicographic order.
pub fn admissible_pairs(family: Family, order: u64) -> Vec<Pair> {
    (0..order)
        .flat_map(|x| (0..order).map(move |y| (x, y)))
        .filter(|&p| admissible(family, order, p))
        .collect()
}

pub fn classify(family: Family, order: u64) -> IsoTable {
    classify_with_rank(family, order, 3)
}

/// As [`classify`], with the double flag evaluated for sl_n.
pub fn classify_with_rank(family: Family, order: u64, sl_rank: usize) -> IsoTable {
    let mut table = IsoTable {
        family,
        order,
        sl_rank,
        classes: Vec::new(),
        reason: order_incompatibility(family, order),
    };
    if table.reason.is_some() {
        return table;
    }
    let pairs = admissible_pairs(family, order);
    let groups = partition_pairs(family, order, &pairs).expect("admissible pairs are closed under moves");
    let mut standard: Vec<Pair> = standard_pair(family, order).into_iter().collect();
    standard.extend(
        reference::EXTRA_STANDARD
            .iter()
            .filter(|(f, l, _)| *f == family && *l == order)
            .map(|&(_, _, p)| p),
    );
    let mut classes: Vec<IsoClass> = groups
        .into_iter()
        .map(|members| {
            let (m, ell_prime) = pair_invariants(order, members[0]);
            let is_a = family == Family::A;
            IsoClass {
                m,
                ell_prime,
                dimension: is_a.then(|| format!("{ell_prime}^{{(n+2)(n-1)}}")),
                double: is_a.then(|| drinfeld_double_predicate(sl_rank, order, members[0])),
                standard: standard.iter().any(|s| members.contains(s)),
                members,
            }
        })
        .collect();
    classes.sort_by_key(|c| c.representative());
    table.classes = classes;
    table
}

/// Closed-form class count at an odd prime p.
pub fn isoclass_count_formula(family: Family, p: u64) -> Result<u64> {
    let prime = p >= 3 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
    if !prime {
        return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
    }
    if family != Family::A && p < 5 {
        return Err(Error::InvalidArgument(format!("type {family} needs p ≥ 5")));
    }
    Ok(match family {
        Family::A => (p * p - 1) / 4,
        Family::B | Family::F4 | Family::G2 => (p * p - p) / 2,
        Family::C => p * p - p,
        Family::D => (p * p - 1) / 2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRow {
    pub family: Family,
    pub order: u64,
    pub classes: usize,
    pub standard: usize,
    pub exotic: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub conventions: Vec<String>,
    pub rows: Vec<CensusRow>,
    /// (family, computed class total, quoted figure).
    pub per_family: Vec<(Family, usize, u64)>,
    pub total_classes: usize,
    pub total_standard: usize,
    pub total_exotic: usize,
    pub quoted_exotic: u64,
    pub quoted_standard: u64,
}

pub fn exotic_census(grid: &[(Family, &[u64])]) -> CensusReport {
    let mut rows = Vec::new();
    for &(family, orders) in grid {
        for &l in orders {
            let t = classify(family, l);
            let standard = t.classes.iter().filter(|c| c.standard).count();
            rows.push(CensusRow {
                family,
                order: l,
                classes: t.classes.len(),
                standard,
                exotic: t.classes.len() - standard,
            });
        }
    }
    let per_family = grid
        .iter()
        .map(|&(f, _)| {
            let computed = rows.iter().filter(|r| r.family == f).map(|r| r.classes).sum();
            let quoted = reference::CENSUS_PER_FAMILY
                .iter()
                .find(|(g, _)| *g == f)
                .map_or(0, |&(_, c)| c);
            (f, computed, quoted)
        })
        .collect();
    CensusReport {
        conventions: vec![
            "pairs range over (Z/L)^2 subject to the family's admissibility constraints".into(),
            "a class is standard when it contains (1, L-1), or (0, 4) for type A at L = 8".into(),
            "per-family figures are compared with total class counts, not exotic counts".into(),
        ],
        total_classes: rows.iter().map(|r| r.classes).sum(),
        total_standard: rows.iter().map(|r| r.standard).sum(),
        total_exotic: rows.iter().map(|r| r.exotic).sum(),
        rows,
        per_family,
        quoted_exotic: reference::CENSUS_EXOTIC_TOTAL,
        quoted_standard: reference::CENSUS_STANDARD_TOTAL,
    }
}

impl fmt::Display for IsoTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.reason {
            return write!(f, "type {} at L = {}: {r}", self.family, self.order);
        }
        for (i, c) in self.classes.iter().enumerate() {
            let members: Vec<String> = c.members.iter().map(|(x, y)| format!("({x},{y})")).collect();
            writeln!(f, "{:>3}  {}  m={} l'={}", i + 1, members.join(" "), c.m, c.ell_prime)?;
        }
        Ok(())
    }
}
