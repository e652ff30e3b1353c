//! Reference data: isoclass tables as exponent pairs (x, y) for (r, s) = (ζ^x, ζ^y),
//! and simple Yetter-Drinfeld dimension distributions for sl_3 Borel parts.

use crate::cartan::Family;
use crate::radford::Distribution;

pub type Pair = (u64, u64);

/// A reference isoclass table: one inner slice per class, in printed row order.
pub struct ReferenceTable {
    pub family: Family,
    pub order: u64,
    pub classes: &'static [&'static [Pair]],
    pub note: Option<&'static str>,
}

pub const TABLES: &[ReferenceTable] = &[
    ReferenceTable {
        family: Family::A,
        order: 4,
        classes: &[
            &[(0, 1), (1, 0), (3, 0), (0, 3)],
            &[(1, 2), (2, 1), (3, 2), (2, 3)],
            &[(0, 2), (2, 0)],
            &[(1, 3), (3, 1)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::A,
        order: 5,
        classes: &[
            &[(0, 1), (1, 0), (4, 0), (0, 4)],
            &[(1, 2), (2, 1), (3, 4), (4, 3)],
            &[(2, 3), (3, 2)],
            &[(0, 2), (2, 0), (0, 3), (3, 0)],
            &[(1, 3), (3, 1), (2, 4), (4, 2)],
            &[(4, 1), (1, 4)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::A,
        order: 6,
        classes: &[
            &[(0, 1), (1, 0), (5, 0), (0, 5)],
            &[(1, 2), (2, 1), (4, 5), (5, 4)],
            &[(2, 3), (3, 2), (4, 3), (3, 4)],
            &[(0, 2), (2, 0), (0, 4), (4, 0)],
            &[(1, 3), (3, 1), (5, 3), (3, 5)],
            &[(1, 5), (5, 1)],
            &[(2, 4), (4, 2)],
            &[(0, 3), (3, 0)],
            &[(2, 5), (5, 2), (1, 4), (4, 1)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::A,
        order: 8,
        classes: &[
            &[(0, 1), (1, 0), (7, 0), (0, 7)],
            &[(1, 2), (2, 1), (6, 7), (7, 6)],
            &[(2, 3), (3, 2), (6, 5), (5, 6)],
            &[(3, 4), (4, 3), (4, 5), (5, 4)],
            &[(0, 3), (3, 0), (5, 0), (0, 5)],
            &[(1, 4), (4, 1), (7, 4), (4, 7)],
            &[(2, 5), (5, 2), (3, 6), (6, 3)],
            &[(1, 6), (6, 1), (2, 7), (7, 2)],
            &[(0, 2), (2, 0), (6, 0), (0, 6)],
            &[(1, 3), (3, 1), (5, 7), (7, 5)],
            &[(2, 4), (4, 2), (6, 4), (4, 6)],
            &[(3, 5), (5, 3)],
            &[(1, 7), (7, 1)],
            &[(1, 5), (5, 1), (7, 3), (3, 7)],
            &[(2, 6), (6, 2)],
            &[(0, 4), (4, 0)],
        ],
        note: Some("the last row is printed as (1,7) = (0,4) ≅ (4,0) = (7,1); (1,7) already forms its own row, so the row is read as {(0,4), (4,0)}"),
    },
    ReferenceTable {
        family: Family::B,
        order: 5,
        classes: &[
            &[(0, 1), (1, 0)],
            &[(0, 2), (2, 0)],
            &[(0, 3), (3, 0)],
            &[(0, 4), (4, 0)],
            &[(1, 2), (2, 1)],
            &[(1, 3), (3, 1)],
            &[(1, 4), (4, 1)],
            &[(2, 3), (3, 2)],
            &[(2, 4), (4, 2)],
            &[(3, 4), (4, 3)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::C,
        order: 5,
        classes: &[
            &[(0, 1)],
            &[(0, 2)],
            &[(0, 3)],
            &[(0, 4)],
            &[(1, 0)],
            &[(1, 2)],
            &[(1, 3)],
            &[(1, 4)],
            &[(2, 0)],
            &[(2, 1)],
            &[(2, 3)],
            &[(2, 4)],
            &[(3, 0)],
            &[(3, 1)],
            &[(3, 2)],
            &[(3, 4)],
            &[(4, 0)],
            &[(4, 1)],
            &[(4, 2)],
            &[(4, 3)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::D,
        order: 5,
        classes: &[
            &[(0, 1), (4, 0)],
            &[(1, 2), (3, 4)],
            &[(2, 3)],
            &[(0, 2), (3, 0)],
            &[(1, 3), (2, 4)],
            &[(4, 1)],
            &[(0, 3), (2, 0)],
            &[(1, 4)],
            &[(3, 1), (4, 2)],
            &[(0, 4), (1, 0)],
            &[(2, 1), (4, 3)],
            &[(3, 2)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::F4,
        order: 5,
        classes: &[
            &[(0, 1), (1, 0)],
            &[(1, 2), (2, 1)],
            &[(3, 2), (2, 3)],
            &[(4, 3), (3, 4)],
            &[(0, 2), (2, 0)],
            &[(1, 3), (3, 1)],
            &[(2, 4), (4, 2)],
            &[(3, 0), (0, 3)],
            &[(4, 1), (1, 4)],
            &[(4, 0), (0, 4)],
        ],
        note: None,
    },
    ReferenceTable {
        family: Family::G2,
        order: 8,
        classes: &[
            &[(0, 1), (1, 0)],
            &[(1, 2), (2, 1)],
            &[(2, 3), (3, 2)],
            &[(3, 4), (4, 3)],
            &[(4, 5), (5, 4)],
            &[(5, 6), (6, 5)],
            &[(6, 7), (7, 6)],
            &[(7, 0), (0, 7)],
            &[(0, 3), (3, 0)],
            &[(1, 4), (4, 1)],
            &[(2, 5), (5, 2)],
            &[(3, 6), (6, 3)],
            &[(4, 7), (7, 4)],
            &[(5, 0), (0, 5)],
            &[(6, 1), (1, 6)],
            &[(7, 2), (2, 7)],
        ],
        note: Some("row 10 is printed as (1,4) ≅ (4,0); (4,0) has even x − y and is not admissible, so (4,1) is used"),
    },
];

pub fn table(family: Family, order: u64) -> Option<&'static ReferenceTable> {
    TABLES.iter().find(|t| t.family == family && t.order == order)
}

/// The general odd-prime pattern for type A:
/// {(k, k+t), (k+t, k), (p−k, p−k−t), (p−k−t, p−k)} for 1 ≤ t ≤ (p−1)/2, 0 ≤ k < p.
pub fn type_a_prime_pattern(p: u64) -> Vec<Vec<Pair>> {
    let mut out: Vec<Vec<Pair>> = Vec::new();
    for t in 1..=(p - 1) / 2 {
        for k in 0..p {
            let m = |v: i64| v.rem_euclid(p as i64) as u64;
            let (k, t) = (k as i64, t as i64);
            let p = p as i64;
            let mut class = vec![
                (m(k), m(k + t)),
                (m(k + t), m(k)),
                (m(p - k), m(p - k - t)),
                (m(p - k - t), m(p - k)),
            ];
            class.sort_unstable();
            class.dedup();
            if !out.contains(&class) {
                out.push(class);
            }
        }
    }
    out
}

/// A reference sl_3 distribution for the Borel part at (L, x, y).
pub struct ReferenceDistribution {
    pub order: u64,
    pub pair: Pair,
    pub text: &'static str,
}

impl ReferenceDistribution {
    pub fn distribution(&self) -> Distribution {
        self.text.parse().expect("reference distribution parses")
    }
}

pub const DISTRIBUTIONS: &[ReferenceDistribution] = &[
    ReferenceDistribution {
        order: 6,
        pair: (0, 1),
        text: "{1^36, 3^72, 6^72, 8^36, 10^72, 15^144, 24^72, 25^72, 27^108, 48^72, 54^72, 56^36, 87^72, 120^72, 124^36, 165^72, 216^36}",
    },
    ReferenceDistribution {
        order: 6,
        pair: (2, 5),
        text: "{1^36, 3^72, 8^36, 36^432, 72^432, 216^288}",
    },
    ReferenceDistribution {
        order: 6,
        pair: (1, 3),
        text: "{1^36, 3^72, 6^72, 7^36, 15^72, 27^36, 36^324, 72^324, 108^324}",
    },
    ReferenceDistribution {
        order: 6,
        pair: (1, 5),
        text: "{1^36, 3^72, 6^72, 7^36, 15^72, 27^36, 36^324, 72^324, 108^324}",
    },
    ReferenceDistribution {
        order: 8,
        pair: (0, 1),
        text: "{1^64, 3^128, 6^128, 8^64, 10^128, 15^256, 24^128, 27^64, 28^128, 35^128, 36^128, 42^256, 46^128, 48^256, 60^128, 64^64, 80^128, 90^128, 96^128, 98^64, 132^128, 144^128, 150^128, 192^128, 204^128, 260^128, 270^128, 336^128, 342^64, 420^128, 512^64}",
    },
    ReferenceDistribution {
        order: 8,
        pair: (1, 6),
        text: "{1^64, 3^128, 6^128, 8^64, 10^128, 15^256, 24^128, 27^64, 28^128, 35^128, 36^128, 42^256, 46^128, 48^256, 60^128, 64^64, 80^128, 90^128, 96^128, 98^64, 132^128, 144^128, 150^128, 192^128, 204^128, 260^128, 270^128, 336^128, 342^64, 420^128, 512^64}",
    },
    ReferenceDistribution {
        order: 8,
        pair: (1, 3),
        text: "{1^64, 3^128, 6^128, 8^64, 10^128, 12^128, 24^128, 26^64, 42^128, 64^128, 128^768, 192^768, 256^768}",
    },
    ReferenceDistribution {
        order: 8,
        pair: (1, 7),
        text: "{1^64, 3^128, 6^128, 8^64, 10^128, 12^128, 24^128, 26^64, 42^128, 64^128, 128^768, 192^768, 256^768}",
    },
    ReferenceDistribution {
        order: 8,
        pair: (1, 5),
        text: "{1^64, 3^128, 8^64, 27^36, 64^1152, 128^1152, 512^1536}",
    },
];

pub fn distribution(order: u64, pair: Pair) -> Option<&'static ReferenceDistribution> {
    DISTRIBUTIONS.iter().find(|d| d.order == order && d.pair == pair)
}

/// Class counts per type and the exotic/standard totals quoted alongside the census.
pub const CENSUS_PER_FAMILY: &[(Family, u64)] = &[
    (Family::A, 47),
    (Family::B, 31),
    (Family::C, 62),
    (Family::D, 36),
    (Family::F4, 31),
    (Family::G2, 47),
];
pub const CENSUS_EXOTIC_TOTAL: u64 = 209;
pub const CENSUS_STANDARD_TOTAL: u64 = 45;

/// Classes labelled standard besides the orbit of (1, L−1).
pub const EXTRA_STANDARD: &[(Family, u64, Pair)] = &[(Family::A, 8, (0, 4))];

/// The (family, orders) grid of the census.
pub const CENSUS_GRID: &[(Family, &[u64])] = &[
    (Family::A, &[4, 5, 6, 7, 8]),
    (Family::B, &[5, 7]),
    (Family::C, &[5, 7]),
    (Family::D, &[5, 7]),
    (Family::F4, &[5, 7]),
    (Family::G2, &[5, 7, 8]),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_distributions_parse() {
        let sums: Vec<(u64, Pair, u64)> = DISTRIBUTIONS
            .iter()
            .map(|d| (d.order, d.pair, d.distribution().total()))
            .collect();
        // printed lists that do not add up to L^4
        let off: Vec<_> = sums
            .iter()
            .filter(|&&(l, _, t)| t != l.pow(4))
            .map(|&(l, p, t)| (l, p, t))
            .collect();
        assert_eq!(
            off,
            vec![
                (6, (0, 1), 1152),
                (8, (0, 1), 3904),
                (8, (1, 6), 3904),
                (8, (1, 3), 3392),
                (8, (1, 7), 3392),
                (8, (1, 5), 4132),
            ]
        );
    }

    #[test]
    fn prime_pattern_sizes() {
        for p in [5u64, 7, 11, 13] {
            let classes = type_a_prime_pattern(p);
            assert_eq!(classes.len() as u64, (p * p - 1) / 4);
            let total: usize = classes.iter().map(Vec::len).sum();
            assert_eq!(total as u64, p * p - p);
        }
    }
}
