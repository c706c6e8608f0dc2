use super::{to_f64, NumericsError};
use crate::Scalar;

/// Uniform `ny × nz` node grid over `[y0, y1] × [z0, z1]`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<F> {
    pub y: (F, F),
    pub z: (F, F),
    pub ny: usize,
    pub nz: usize,
}

impl<F: Scalar> Grid<F> {
    pub fn new(y: (F, F), z: (F, F), ny: usize, nz: usize) -> Result<Self, NumericsError> {
        for n in [ny, nz] {
            if n < 5 {
                return Err(NumericsError::GridTooSmall(n));
            }
        }
        for (lo, hi) in [y, z] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(NumericsError::BadRange(to_f64(lo), to_f64(hi)));
            }
        }
        Ok(Grid { y, z, ny, nz })
    }

    pub fn square(lo: F, hi: F, n: usize) -> Result<Self, NumericsError> {
        Self::new((lo, hi), (lo, hi), n, n)
    }

    pub fn dy(&self) -> F {
        (self.y.1 - self.y.0) / F::from_usize(self.ny - 1).unwrap_or_else(F::one)
    }

    pub fn dz(&self) -> F {
        (self.z.1 - self.z.0) / F::from_usize(self.nz - 1).unwrap_or_else(F::one)
    }

    pub fn y_at(&self, i: usize) -> F {
        if i + 1 == self.ny {
            self.y.1
        } else {
            self.y.0 + self.dy() * F::from_usize(i).unwrap_or_else(F::zero)
        }
    }

    pub fn z_at(&self, j: usize) -> F {
        if j + 1 == self.nz {
            self.z.1
        } else {
            self.z.0 + self.dz() * F::from_usize(j).unwrap_or_else(F::zero)
        }
    }

    pub fn len(&self) -> usize {
        self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node indices in row-major order (`y` outer).
    pub fn indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.ny).flat_map(move |i| (0..self.nz).map(move |j| (i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = Grid::new((0.1, 0.7), (1.0, 2.0), 7, 5).unwrap();
        assert_eq!(g.y_at(0), 0.1);
        assert_eq!(g.y_at(6), 0.7);
        assert_eq!(g.z_at(2), 1.5);
        assert_eq!(g.indices().count(), 35);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert_eq!(Grid::square(0.0, 1.0, 4), Err(NumericsError::GridTooSmall(4)));
        assert!(Grid::square(1.0, 1.0, 10).is_err());
        assert!(Grid::square(0.0, f64::INFINITY, 10).is_err());
    }
}
