//! Primal and dual points. The two types carry the same data but are kept
//! apart so that gradients (dual vectors) cannot be mixed up with iterates
//! (primal vectors): `grad` maps primal to dual, `grad_conj` maps back, and
//! the pairing ⟨x*, x⟩ is only defined across the two.

use crate::linalg;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint<T: Real> {
    coords: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint<T: Real> {
    coords: Vec<T>,
}

macro_rules! point_impl {
    ($name:ident) => {
        impl<T: Real> $name<T> {
            pub fn new(coords: Vec<T>) -> Self {
                Self { coords }
            }

            pub fn zeros(dim: usize) -> Self {
                Self { coords: vec![T::zero(); dim] }
            }

            #[inline]
            pub fn dim(&self) -> usize {
                self.coords.len()
            }

            #[inline]
            pub fn coords(&self) -> &[T] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<T> {
                self.coords
            }

            pub fn is_finite(&self) -> bool {
                self.coords.iter().all(|v| v.is_finite())
            }

            pub fn inf_norm(&self) -> T {
                linalg::inf_norm(&self.coords)
            }

            pub fn l2_norm(&self) -> T {
                linalg::l2_norm(&self.coords)
            }

            /// Componentwise difference, self - other.
            pub fn minus(&self, other: &Self) -> Self {
                debug_assert_eq!(self.dim(), other.dim());
                Self {
                    coords: self
                        .coords
                        .iter()
                        .zip(&other.coords)
                        .map(|(&a, &b)| a - b)
                        .collect(),
                }
            }

            pub fn dist_inf(&self, other: &Self) -> T {
                self.minus(other).inf_norm()
            }

            /// self + t * dir, where dir is a raw coordinate vector.
            pub fn add_scaled(&self, t: T, dir: &[T]) -> Self {
                debug_assert_eq!(self.dim(), dir.len());
                Self {
                    coords: self
                        .coords
                        .iter()
                        .zip(dir)
                        .map(|(&a, &d)| a + t * d)
                        .collect(),
                }
            }
        }

        impl<T: Real> From<Vec<T>> for $name<T> {
            fn from(coords: Vec<T>) -> Self {
                Self::new(coords)
            }
        }
    };
}

point_impl!(PrimalPoint);
point_impl!(DualPoint);

/// Duality pairing ⟨x*, x⟩.
#[inline]
pub fn pairing<T: Real>(xstar: &DualPoint<T>, x: &PrimalPoint<T>) -> T {
    debug_assert_eq!(xstar.dim(), x.dim());
    linalg::dot(xstar.coords(), x.coords())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_and_norms() {
        let x = PrimalPoint::new(vec![3.0, -4.0]);
        let s = DualPoint::new(vec![1.0, 2.0]);
        assert_eq!(pairing(&s, &x), -5.0);
        assert_eq!(x.inf_norm(), 4.0);
        assert_eq!(x.l2_norm(), 5.0);
    }

    #[test]
    fn minus_and_add_scaled() {
        let x = PrimalPoint::new(vec![1.0, 1.0]);
        let y = PrimalPoint::new(vec![0.5, 2.0]);
        assert_eq!(x.minus(&y).coords(), &[0.5, -1.0]);
        assert_eq!(x.add_scaled(2.0, &[1.0, -0.5]).coords(), &[3.0, 0.0]);
    }
}
