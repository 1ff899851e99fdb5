//! Dense GF(2) linear algebra on packed bit rows.

use crate::pauli::{PauliString, Phase};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::zeros(len);
        for i in idx {
            r.flip(i);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, o: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, o: &BitRow) -> bool {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Symplectic vector `[x | z]` of a Pauli string over `n` sites.
pub fn symplectic(p: &PauliString, n: usize) -> BitRow {
    let mut r = BitRow::zeros(2 * n);
    for (s, l) in p.support() {
        let (x, z) = l.bits();
        r.set(s, x);
        r.set(n + s, z);
    }
    r
}

/// The swapped vector `[z | x]`, so that `dot` with it gives the symplectic product.
pub fn symplectic_dual(p: &PauliString, n: usize) -> BitRow {
    let mut r = BitRow::zeros(2 * n);
    for (s, l) in p.support() {
        let (x, z) = l.bits();
        r.set(s, z);
        r.set(n + s, x);
    }
    r
}

pub fn pauli_from_symplectic(v: &BitRow, n: usize) -> PauliString {
    let mut x = BitRow::zeros(n);
    let mut z = BitRow::zeros(n);
    for i in v.ones() {
        if i < n {
            x.set(i, true);
        } else {
            z.set(i - n, true);
        }
    }
    PauliString::from_bits(&x.words, &z.words, Phase::ONE)
}

/// Reduced row echelon form of a generator list, remembering which generators
/// combine into each reduced row.
#[derive(Clone, Debug)]
pub struct Rref {
    width: usize,
    n_gens: usize,
    rows: Vec<(usize, BitRow, BitRow)>,
}

impl Rref {
    pub fn new(width: usize, gens: &[BitRow]) -> Self {
        let n_gens = gens.len();
        let mut rows: Vec<(usize, BitRow, BitRow)> = Vec::new();
        for (g, v) in gens.iter().enumerate() {
            assert_eq!(v.len(), width);
            let mut r = v.clone();
            let mut c = BitRow::from_indices(n_gens, [g]);
            for (p, row, combo) in &rows {
                if r.get(*p) {
                    r.xor_assign(row);
                    c.xor_assign(combo);
                }
            }
            if let Some(p) = r.first_one() {
                for (_, row, combo) in rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                        combo.xor_assign(&c);
                    }
                }
                rows.push((p, r, c));
            }
        }
        Rref { width, n_gens, rows }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Generator combination producing `v`, if `v` lies in the row space.
    pub fn express(&self, v: &BitRow) -> Option<BitRow> {
        let mut r = v.clone();
        let mut c = BitRow::zeros(self.n_gens);
        for (p, row, combo) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
                c.xor_assign(combo);
            }
        }
        r.is_zero().then_some(c)
    }

    pub fn contains(&self, v: &BitRow) -> bool {
        self.express(v).is_some()
    }

    /// A vector `x` with `gen_i · x = b_i` for all generators. Requires
    /// independent generators.
    pub fn solve_dot(&self, b: &BitRow) -> BitRow {
        assert_eq!(self.rank(), self.n_gens, "generators are dependent");
        let mut x = BitRow::zeros(self.width);
        for (p, _, combo) in &self.rows {
            if combo.dot(b) {
                x.set(*p, true);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_express() {
        let g = vec![
            BitRow::from_indices(4, [0, 1]),
            BitRow::from_indices(4, [1, 2]),
            BitRow::from_indices(4, [0, 2]),
        ];
        let r = Rref::new(4, &g);
        assert_eq!(r.rank(), 2);
        let c = r.express(&BitRow::from_indices(4, [0, 2])).unwrap();
        let mut acc = BitRow::zeros(4);
        for i in c.ones() {
            acc.xor_assign(&g[i]);
        }
        assert_eq!(acc, BitRow::from_indices(4, [0, 2]));
        assert!(r.express(&BitRow::from_indices(4, [3])).is_none());
    }

    #[test]
    fn solve_dot_hits_targets() {
        let g = vec![
            BitRow::from_indices(5, [0, 1, 4]),
            BitRow::from_indices(5, [1, 2]),
            BitRow::from_indices(5, [2, 3, 4]),
        ];
        let r = Rref::new(5, &g);
        for t in 0..8usize {
            let b = BitRow::from_indices(3, (0..3).filter(|i| t >> i & 1 == 1));
            let x = r.solve_dot(&b);
            for (i, gi) in g.iter().enumerate() {
                assert_eq!(gi.dot(&x), b.get(i));
            }
        }
    }
}
