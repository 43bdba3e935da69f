//! Points, hyperplanes and higher-codimension subspaces of `PG(k-1, p)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{for_each_rref_form, kernel_basis, FieldMatrix, PrimeField};

/// Guard for projective-space construction: `q^k` vectors at most.
pub const DEFAULT_MAX_VECTORS: u128 = 1 << 20;

/// Compressed lists: `items[offsets[i]..offsets[i+1]]` belong to entry `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csr {
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Csr {
    pub fn from_lists(lists: &[Vec<u32>]) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut items = Vec::new();
        offsets.push(0);
        for l in lists {
            items.extend_from_slice(l);
            offsets.push(items.len() as u32);
        }
        Self { offsets, items }
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[u32] {
        &self.items[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total(&self) -> usize {
        self.items.len()
    }
}

/// `PG(k-1, p)` with normalized point representatives (first nonzero
/// coordinate 1) in lexicographic order. Hyperplane `i` is the kernel of the
/// dual vector `points[i]`.
#[derive(Debug, Clone)]
pub struct ProjectiveSpace {
    k: usize,
    field: PrimeField,
    points: Vec<Vec<u32>>,
    index: Vec<u32>,
    hyperplanes_through: Csr,
    hyperplane_points: Csr,
}

fn encode(v: &[u32], q: u32) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * q as usize + x as usize)
}

fn check_size(k: usize, field: PrimeField, max_vectors: u128) -> Result<()> {
    if k == 0 {
        return Err(Error::Parameter("projective space needs k >= 1".into()));
    }
    let needed = (field.order() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > max_vectors {
        return Err(Error::Guard { what: "projective space vectors", needed, limit: max_vectors });
    }
    Ok(())
}

impl ProjectiveSpace {
    /// Points only, without incidence tables.
    pub fn points_only(k: usize, field: PrimeField) -> Self {
        let q = field.order();
        let total = (q as usize).pow(k as u32);
        let mut points = Vec::new();
        let mut index = vec![u32::MAX; total];
        let mut v = vec![0u32; k];
        for code in 0..total {
            let mut t = code;
            for i in (0..k).rev() {
                v[i] = (t % q as usize) as u32;
                t /= q as usize;
            }
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                index[code] = points.len() as u32;
                points.push(v.clone());
            }
        }
        Self { k, field, points, index, hyperplanes_through: Csr::default(), hyperplane_points: Csr::default() }
    }

    /// Points, hyperplanes and point-hyperplane incidence.
    pub fn new(k: usize, field: PrimeField, max_vectors: u128) -> Result<Self> {
        check_size(k, field, max_vectors)?;
        let mut space = Self::points_only(k, field);
        let mut on_hyperplane = Vec::with_capacity(space.points.len());
        for h in 0..space.points.len() {
            let dual = FieldMatrix::from_residues(field, 1, k, space.points[h].clone())?;
            on_hyperplane.push(space.subspace_points(&kernel_basis(&dual)));
        }
        let mut through = vec![Vec::new(); space.points.len()];
        for (h, pts) in on_hyperplane.iter().enumerate() {
            for &p in pts {
                through[p as usize].push(h as u32);
            }
        }
        space.hyperplane_points = Csr::from_lists(&on_hyperplane);
        space.hyperplanes_through = Csr::from_lists(&through);
        Ok(space)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// Index of the point spanned by a nonzero vector.
    pub fn point_index(&self, v: &[u32]) -> Option<usize> {
        if v.len() != self.k {
            return None;
        }
        let lead = *v.iter().find(|&&x| x != 0)?;
        let inv = self.field.inv(lead);
        let normalized: Vec<u32> = v.iter().map(|&x| self.field.mul(x, inv)).collect();
        match self.index[encode(&normalized, self.field.order())] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    /// Indices of the hyperplanes containing point `p`.
    pub fn hyperplanes_through(&self, p: usize) -> &[u32] {
        self.hyperplanes_through.get(p)
    }

    /// Indices of the points on hyperplane `h`.
    pub fn hyperplane_points(&self, h: usize) -> &[u32] {
        self.hyperplane_points.get(h)
    }

    /// Projective points of the row space of `basis` (rows independent),
    /// sorted by index.
    pub fn subspace_points(&self, basis: &FieldMatrix) -> Vec<u32> {
        let f = self.field;
        let dim = basis.rows();
        let mut out = Vec::new();
        if dim == 0 {
            return out;
        }
        let mut coeffs = vec![0u32; dim];
        let mut v = vec![0u32; self.k];
        // coefficient vectors with leading nonzero entry 1
        for lead in 0..dim {
            coeffs.iter_mut().for_each(|c| *c = 0);
            coeffs[lead] = 1;
            loop {
                v.iter_mut().for_each(|x| *x = 0);
                for (r, &c) in coeffs.iter().enumerate() {
                    if c != 0 {
                        for (x, &b) in v.iter_mut().zip(basis.row(r)) {
                            *x = f.add(*x, f.mul(c, b));
                        }
                    }
                }
                out.push(self.point_index(&v).expect("independent basis") as u32);
                let mut i = dim;
                loop {
                    if i == lead + 1 {
                        break;
                    }
                    i -= 1;
                    coeffs[i] += 1;
                    if coeffs[i] == f.order() {
                        coeffs[i] = 0;
                    } else {
                        break;
                    }
                }
                if coeffs[lead + 1..].iter().all(|&c| c == 0) {
                    break;
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Points of every subspace of codimension `codim` (`1 <= codim < k`).
    /// Codimension 1 follows the hyperplane order; higher codimensions follow
    /// the order of their defining reduced echelon forms.
    pub fn subspaces_of_codim(&self, codim: usize) -> Vec<Vec<u32>> {
        if codim == 1 && !self.hyperplane_points.is_empty() {
            return (0..self.points.len()).map(|h| self.hyperplane_points(h).to_vec()).collect();
        }
        let mut out = Vec::new();
        for_each_rref_form(self.field, codim, self.k, |m| {
            out.push(self.subspace_points(&kernel_basis(m)));
        });
        out
    }

    /// `n - |multiset ∩ H_h|`: the weight of the codeword whose coordinates
    /// vanish exactly on the columns lying on hyperplane `h`.
    pub fn weight_via_spectrum(&self, multiset: &[u32], h: usize) -> usize {
        let dual = &self.points[h];
        let f = self.field;
        multiset
            .iter()
            .filter(|&&p| {
                let pt = &self.points[p as usize];
                pt.iter().zip(dual).fold(0u32, |acc, (&a, &b)| f.add(acc, f.mul(a, b))) != 0
            })
            .count()
    }

    /// Nonzero weights of the code whose columns are the multiset.
    pub fn spectrum_weights(&self, multiset: &[u32]) -> BTreeSet<usize> {
        (0..self.points.len()).map(|h| self.weight_via_spectrum(multiset, h)).collect()
    }

    /// Generator matrix with the given points as columns.
    pub fn generator(&self, multiset: &[u32]) -> FieldMatrix {
        let mut m = FieldMatrix::zeros(self.field, self.k, multiset.len());
        for (j, &p) in multiset.iter().enumerate() {
            for (i, &x) in self.points[p as usize].iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(k: usize, p: u32) -> ProjectiveSpace {
        ProjectiveSpace::new(k, PrimeField::new(p).unwrap(), DEFAULT_MAX_VECTORS).unwrap()
    }

    #[test]
    fn fano_plane() {
        let s = space(3, 2);
        assert_eq!(s.point_count(), 7);
        assert_eq!(s.points()[0], vec![0, 0, 1]);
        assert_eq!(s.points()[6], vec![1, 1, 1]);
        for p in 0..7 {
            assert_eq!(s.hyperplanes_through(p).len(), 3);
            assert_eq!(s.hyperplane_points(p).len(), 3);
        }
        let all: Vec<u32> = (0..7).collect();
        assert_eq!(s.spectrum_weights(&all), [4].into_iter().collect());
    }

    #[test]
    fn counts_for_search_instances() {
        let s = space(4, 5);
        assert_eq!(s.point_count(), 156);
        assert!((0..156).all(|p| s.hyperplanes_through(p).len() == 31));
        assert_eq!(space(6, 3).point_count(), 364);
        assert_eq!(s.subspaces_of_codim(2).len(), 806);
        assert!(s.subspaces_of_codim(2).iter().all(|l| l.len() == 6));
        assert!(s.subspaces_of_codim(3).iter().all(|l| l.len() == 1));
    }

    #[test]
    fn repeated_point_gives_weight_zero() {
        let s = space(3, 3);
        let p = 4;
        let h = s.hyperplanes_through(p)[0] as usize;
        assert_eq!(s.weight_via_spectrum(&[p as u32; 5], h), 0);
    }

    #[test]
    fn guard_and_lookup() {
        let f = PrimeField::new(3).unwrap();
        assert!(matches!(ProjectiveSpace::new(13, f, DEFAULT_MAX_VECTORS), Err(Error::Guard { .. })));
        let s = space(3, 3);
        assert_eq!(s.point_index(&[0, 2, 1]), s.point_index(&[0, 1, 2]));
        assert_eq!(s.point_index(&[0, 0, 0]), None);
    }
}
