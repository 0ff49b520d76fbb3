//! Multiplication tables: the structure constants of the real basis and the
//! split-basis product rules.

use std::sync::OnceLock;

use serde::Serialize;

/// The seven positively oriented triples `ABC` with `a_ABC = +1`.
pub const STRUCTURE_TRIPLES: [[usize; 3]; 7] = [
    [1, 2, 3],
    [5, 1, 6],
    [6, 2, 4],
    [4, 3, 5],
    [4, 7, 1],
    [6, 7, 3],
    [5, 7, 2],
];

/// Totally antisymmetric tensor `a_ABC` over the imaginary units `e_1..e_7`.
///
/// Indices run over `1..=7`; row/column 0 is unused and stays zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureTable {
    a: [[[i8; 8]; 8]; 8],
}

impl StructureTable {
    pub fn new() -> Self {
        let mut a = [[[0i8; 8]; 8]; 8];
        for &[p, q, r] in &STRUCTURE_TRIPLES {
            for (x, y, z) in [(p, q, r), (q, r, p), (r, p, q)] {
                a[x][y][z] = 1;
                a[y][x][z] = -1;
            }
        }
        Self { a }
    }

    /// Shared instance.
    pub fn get() -> &'static StructureTable {
        static TABLE: OnceLock<StructureTable> = OnceLock::new();
        TABLE.get_or_init(StructureTable::new)
    }

    pub fn entry(&self, a: usize, b: usize, c: usize) -> i8 {
        self.a[a][b][c]
    }

    /// Product of two real basis units, indices `0..8` with 0 the identity.
    ///
    /// Returns `(sign, index)` with `e_a e_b = sign * e_index`.
    pub fn unit_product(&self, a: usize, b: usize) -> (i8, usize) {
        match (a, b) {
            (0, _) => (1, b),
            (_, 0) => (1, a),
            _ if a == b => (-1, 0),
            _ => {
                let c = (1..8)
                    .find(|&c| self.a[a][b][c] != 0)
                    .expect("every pair of distinct units lies on a triple");
                (self.a[a][b][c], c)
            }
        }
    }
}

impl Default for StructureTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Elements of the split basis, in coefficient order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SplitUnit {
    U0,
    U0c,
    U1,
    U2,
    U3,
    U1c,
    U2c,
    U3c,
}

impl SplitUnit {
    pub const ALL: [SplitUnit; 8] = [
        SplitUnit::U0,
        SplitUnit::U0c,
        SplitUnit::U1,
        SplitUnit::U2,
        SplitUnit::U3,
        SplitUnit::U1c,
        SplitUnit::U2c,
        SplitUnit::U3c,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> SplitUnit {
        Self::ALL[i]
    }

    /// `u_i` for `i` in `1..=3`.
    pub fn u(i: usize) -> SplitUnit {
        Self::ALL[1 + i]
    }

    /// `u_i*` for `i` in `1..=3`.
    pub fn u_star(i: usize) -> SplitUnit {
        Self::ALL[4 + i]
    }

    pub fn name(self) -> &'static str {
        ["u0", "u0c", "u1", "u2", "u3", "u1c", "u2c", "u3c"][self.index()]
    }

    pub fn from_name(name: &str) -> Option<SplitUnit> {
        Self::ALL.into_iter().find(|u| u.name() == name)
    }

    fn kind(self) -> UnitKind {
        match self {
            SplitUnit::U0 => UnitKind::Idem,
            SplitUnit::U0c => UnitKind::IdemStar,
            SplitUnit::U1 | SplitUnit::U2 | SplitUnit::U3 => UnitKind::Vec(self.index() - 1),
            _ => UnitKind::VecStar(self.index() - 4),
        }
    }
}

impl std::fmt::Display for SplitUnit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

enum UnitKind {
    Idem,
    IdemStar,
    Vec(usize),
    VecStar(usize),
}

/// Levi-Civita symbol with `levi_civita(1, 2, 3) = 1`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i8 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

fn cross_index(i: usize, j: usize) -> Option<(i8, usize)> {
    (1..=3).find_map(|k| match levi_civita(i, j, k) {
        0 => None,
        s => Some((s, k)),
    })
}

/// Split-basis product rules, written out case by case:
///
/// ```text
/// u_i u_j   = e_ijk u_k*     u_i* u_j* = e_ijk u_k
/// u_i u_j*  = -d_ij u_0      u_i* u_j  = -d_ij u_0*
/// u_i u_0   = 0              u_i u_0*  = u_i
/// u_i* u_0  = u_i*           u_i* u_0* = 0
/// u_0 u_i   = u_i            u_0* u_i  = 0
/// u_0 u_i*  = 0              u_0* u_i* = u_i*
/// u_0 u_0   = u_0            u_0* u_0* = u_0*
/// u_0 u_0*  = 0              u_0* u_0  = 0
/// ```
///
/// Returns `None` for a vanishing product.
pub fn split_unit_product(a: SplitUnit, b: SplitUnit) -> Option<(i8, SplitUnit)> {
    use UnitKind::*;
    match (a.kind(), b.kind()) {
        (Vec(i), Vec(j)) => cross_index(i, j).map(|(s, k)| (s, SplitUnit::u_star(k))),
        (VecStar(i), VecStar(j)) => cross_index(i, j).map(|(s, k)| (s, SplitUnit::u(k))),
        (Vec(i), VecStar(j)) => (i == j).then_some((-1, SplitUnit::U0)),
        (VecStar(i), Vec(j)) => (i == j).then_some((-1, SplitUnit::U0c)),
        (Vec(_), Idem) => None,
        (Vec(_), IdemStar) => Some((1, a)),
        (VecStar(_), Idem) => Some((1, a)),
        (VecStar(_), IdemStar) => None,
        (Idem, Vec(_)) => Some((1, b)),
        (IdemStar, Vec(_)) => None,
        (Idem, VecStar(_)) => None,
        (IdemStar, VecStar(_)) => Some((1, b)),
        (Idem, Idem) => Some((1, SplitUnit::U0)),
        (IdemStar, IdemStar) => Some((1, SplitUnit::U0c)),
        (Idem, IdemStar) | (IdemStar, Idem) => None,
    }
}

/// `table[a][b] = Some((sign, c))` when `a b = sign * c`, by coefficient index.
pub(crate) type SplitTable = [[Option<(i8, usize)>; 8]; 8];

/// The 64 split-basis products as a lookup table indexed by coefficient order.
pub(crate) fn split_table() -> &'static SplitTable {
    static TABLE: OnceLock<SplitTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[None; 8]; 8];
        for a in SplitUnit::ALL {
            for b in SplitUnit::ALL {
                t[a.index()][b.index()] = split_unit_product(a, b).map(|(s, u)| (s, u.index()));
            }
        }
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_tensor_is_totally_antisymmetric() {
        let t = StructureTable::new();
        for a in 1..8 {
            for b in 1..8 {
                for c in 1..8 {
                    let v = t.entry(a, b, c);
                    assert_eq!(v, -t.entry(b, a, c));
                    assert_eq!(v, -t.entry(a, c, b));
                    assert_eq!(v, t.entry(b, c, a));
                }
            }
        }
    }

    #[test]
    fn every_pair_of_units_lies_on_exactly_one_triple() {
        let t = StructureTable::new();
        for a in 1..8 {
            for b in 1..8 {
                let hits = (1..8).filter(|&c| t.entry(a, b, c) != 0).count();
                assert_eq!(hits, usize::from(a != b), "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn listed_triples_are_positive() {
        let t = StructureTable::new();
        for [a, b, c] in STRUCTURE_TRIPLES {
            assert_eq!(t.entry(a, b, c), 1);
            assert_eq!(t.unit_product(a, b), (1, c));
        }
        assert_eq!(t.unit_product(2, 1), (-1, 3));
        assert_eq!(t.unit_product(4, 4), (-1, 0));
    }

    #[test]
    fn split_rules_spot_checks() {
        use SplitUnit::*;
        assert_eq!(split_unit_product(U1, U2), Some((1, U3c)));
        assert_eq!(split_unit_product(U2, U1), Some((-1, U3c)));
        assert_eq!(split_unit_product(U1c, U2c), Some((1, U3)));
        assert_eq!(split_unit_product(U1, U0), None);
        assert_eq!(split_unit_product(U2, U2c), Some((-1, U0)));
        assert_eq!(split_unit_product(U3c, U3), Some((-1, U0c)));
        assert_eq!(split_unit_product(U0c, U0), None);
        assert_eq!(split_unit_product(U0, U0), Some((1, U0)));
    }

    #[test]
    fn unit_names_round_trip() {
        for u in SplitUnit::ALL {
            assert_eq!(SplitUnit::from_name(u.name()), Some(u));
        }
    }
}
