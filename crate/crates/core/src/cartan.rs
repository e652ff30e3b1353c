//! Cartan data, the Euler form and q-combinatorics.
//!
//! Numbering follows Bourbaki: in B_n the last simple root is short, in C_n
//! it is long, in F_4 the roots α₁, α₂ are long, and in G_2 α₁ is short.
//! Matrix entries are a_ij = 2(α_i, α_j)/(α_i, α_i) and d_i = (α_i, α_i)/2
//! normalised to coprime integers, so d_i a_ij = d_j a_ji.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    F4,
    G2,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::F4,
        Family::G2,
    ];

    /// Smallest rank accepted by [`cartan_datum`].
    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 4,
            Family::F4 => 4,
            Family::G2 => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::F4 => "F4",
            Family::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "F4" | "F" => Ok(Family::F4),
            "G2" | "G" => Ok(Family::G2),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}

/// A symmetrizable Cartan matrix of finite type with its minimal symmetrizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanDatum {
    pub family: Family,
    pub rank: usize,
    pub matrix: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
}

pub fn cartan_datum(family: Family, rank: usize) -> Result<CartanDatum> {
    let valid = match family {
        Family::F4 => rank == 4,
        Family::G2 => rank == 2,
        _ => rank >= family.min_rank(),
    };
    if !valid {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} is not valid for type {family}"
        )));
    }
    let n = rank;
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
        a[i][j] = aij;
        a[j][i] = aji;
    };
    let d: Vec<i64> = match family {
        Family::A => {
            for i in 0..n.saturating_sub(1) {
                link(i, i + 1, -1, -1);
            }
            vec![1; n]
        }
        Family::B => {
            for i in 0..n - 2 {
                link(i, i + 1, -1, -1);
            }
            link(n - 2, n - 1, -1, -2);
            let mut d = vec![2; n];
            d[n - 1] = 1;
            d
        }
        Family::C => {
            for i in 0..n - 2 {
                link(i, i + 1, -1, -1);
            }
            link(n - 2, n - 1, -2, -1);
            let mut d = vec![1; n];
            d[n - 1] = 2;
            d
        }
        Family::D => {
            for i in 0..n - 2 {
                link(i, i + 1, -1, -1);
            }
            link(n - 3, n - 1, -1, -1);
            vec![1; n]
        }
        Family::F4 => {
            link(0, 1, -1, -1);
            link(1, 2, -1, -2);
            link(2, 3, -1, -1);
            vec![2, 2, 1, 1]
        }
        Family::G2 => {
            link(0, 1, -3, -1);
            vec![1, 3]
        }
    };
    let datum = CartanDatum {
        family,
        rank,
        matrix: a,
        symmetrizer: d,
    };
    debug_assert!(datum.is_symmetrizable());
    Ok(datum)
}

impl CartanDatum {
    pub fn is_symmetrizable(&self) -> bool {
        let n = self.rank;
        (0..n).all(|i| {
            self.matrix[i][i] == 2
                && (0..n).all(|j| {
                    (i == j || self.matrix[i][j] <= 0)
                        && self.symmetrizer[i] * self.matrix[i][j]
                            == self.symmetrizer[j] * self.matrix[j][i]
                })
        })
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank {
            return Err(Error::IndexOutOfRange(format!(
                "simple root {i} outside 1..={}",
                self.rank
            )));
        }
        Ok(())
    }

    /// The Euler form ⟨i, j⟩ on simple roots (1-based indices).
    pub fn euler_form(&self, i: usize, j: usize) -> Result<i64> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.euler(i - 1, j - 1))
    }

    /// 0-based Euler form without range checks.
    pub(crate) fn euler(&self, i: usize, j: usize) -> i64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.symmetrizer[i] * self.matrix[i][j],
            Equal => self.symmetrizer[i],
            Greater => 0,
        }
    }

    /// Euler form extended bilinearly to root-lattice vectors (coordinates on simple roots).
    pub fn euler_on_roots(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * bj * self.euler(i, j);
            }
        }
        acc
    }

    /// The full table ⟨i, j⟩.
    pub fn euler_table(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.euler(i, j)).collect())
            .collect()
    }
}

/// Gaussian binomial [n choose k] evaluated at `v`, through the Pascal recurrence
/// [n, k] = [n−1, k−1] + v^k [n−1, k].
pub fn q_binomial(n: usize, k: usize, v: &Scalar) -> Scalar {
    let ctx = v.context();
    if k > n {
        return Scalar::zero(ctx);
    }
    // row[j] = [m choose j]
    let mut row = vec![Scalar::one(ctx)];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m + 1);
        next.push(Scalar::one(ctx));
        for j in 1..m {
            let term = &v.pow(j as u64) * &row[j];
            next.push(&row[j - 1] + &term);
        }
        next.push(Scalar::one(ctx));
        row = next;
    }
    row.swap_remove(k)
}

/// The (r,s)-integer [c] = (r^c − s^c)/(r − s), written as Σ r^k s^{c−1−k}.
pub fn rs_quantum_integer(c: usize, r: &Scalar, s: &Scalar) -> Scalar {
    let mut acc = Scalar::zero(r.context());
    for k in 0..c {
        acc += &(&r.pow(k as u64) * &s.pow((c - 1 - k) as u64));
    }
    acc
}

/// The (r,s)-binomial [a choose i] = [a]!/([i]! [a−i]!) with [c] = (r^c − s^c)/(r − s),
/// evaluated through [a, i] = r^{a−i} [a−1, i−1] + s^i [a−1, i].
///
/// The recurrence never divides, so it stays valid when some [c] vanish.
pub fn rs_quantum_binomial(a: usize, i: usize, r: &Scalar, s: &Scalar) -> Result<Scalar> {
    if r == s {
        return Err(Error::Constraint("r_j = s_j makes [c]_j undefined".into()));
    }
    let ctx = r.context();
    if i > a {
        return Ok(Scalar::zero(ctx));
    }
    let mut row = vec![Scalar::one(ctx)];
    for m in 1..=a {
        let mut next = Vec::with_capacity(m + 1);
        next.push(Scalar::one(ctx));
        for j in 1..m {
            let left = &r.pow((m - j) as u64) * &row[j - 1];
            let right = &s.pow(j as u64) * &row[j];
            next.push(&left + &right);
        }
        next.push(Scalar::one(ctx));
        row = next;
    }
    Ok(row.swap_remove(i))
}

/// (r_j, s_j) = (r^{d_j}, s^{d_j}) for the 1-based simple root j.
pub fn scaled_parameters(
    datum: &CartanDatum,
    r: &Scalar,
    s: &Scalar,
    j: usize,
) -> Result<(Scalar, Scalar)> {
    datum.check_index(j)?;
    let d = datum.symmetrizer[j - 1] as u64;
    Ok((r.pow(d), s.pow(d)))
}

/// Serre coefficient c_ij^(k) = (r_i s_i^{-1})^{k(k−1)/2} r^{k⟨j,i⟩} s^{−k⟨i,j⟩} (1-based i ≠ j).
pub fn serre_coefficient(
    datum: &CartanDatum,
    r: &Scalar,
    s: &Scalar,
    i: usize,
    j: usize,
    k: usize,
) -> Result<Scalar> {
    if i == j {
        return Err(Error::InvalidArgument(
            "Serre coefficient needs i != j".into(),
        ));
    }
    let (ri, si) = scaled_parameters(datum, r, s, i)?;
    datum.check_index(j)?;
    let k = k as i64;
    let v = &ri * &si.invert()?;
    let tri = k * (k - 1) / 2;
    let out = &(&v.powi(tri)? * &r.powi(k * datum.euler(j - 1, i - 1))?)
        * &s.powi(-k * datum.euler(i - 1, j - 1))?;
    Ok(out)
}

/// Positive roots of sl_n as intervals (i, j), 1 ≤ i ≤ j ≤ n−1, in lexicographic order.
///
/// The interval (i, j) stands for α_i + … + α_j.
pub fn positive_roots_a(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 1..n {
        for j in i..n {
            out.push((i, j));
        }
    }
    out
}
