//! Scalar abstractions shared by the dense linear algebra and the quadrature code.
//!
//! [`Scalar`] covers real and complex fields; [`Real`] is the subset that is
//! ordered and carries the usual float functions. Everything downstream of the
//! linear algebra runs in `Complex<f64>`, but the substrate itself is generic.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// A field element usable in dense matrix computations.
pub trait Scalar:
    Copy + Debug + Default + PartialEq + Send + Sync + 'static + NumAssign + Sum + std::ops::Neg<Output = Self>
{
    /// The underlying real type.
    type Real: Real;

    fn conj(self) -> Self;
    /// Modulus `|x|`.
    fn modulus(self) -> Self::Real;
    /// Squared modulus `|x|^2`.
    fn modulus_sqr(self) -> Self::Real;
    fn from_real(r: Self::Real) -> Self;
    fn real_part(self) -> Self::Real;
    fn is_finite(self) -> bool;

    /// Multiply by a real number.
    #[inline]
    fn scale(self, r: Self::Real) -> Self {
        self * Self::from_real(r)
    }
}

/// Ordered real scalars.
pub trait Real: Scalar<Real = Self> + Float + FloatConst + FromPrimitive + Display {
    /// Convert a literal; panics only for types that cannot hold an `f64` approximation.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Scalar for $t {
            type Real = $t;
            #[inline]
            fn conj(self) -> Self {
                self
            }
            #[inline]
            fn modulus(self) -> Self {
                self.abs()
            }
            #[inline]
            fn modulus_sqr(self) -> Self {
                self * self
            }
            #[inline]
            fn from_real(r: Self) -> Self {
                r
            }
            #[inline]
            fn real_part(self) -> Self {
                self
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }
        }
        impl Real for $t {}
    };
}

impl_real!(f32);
impl_real!(f64);

impl<T: Real> Scalar for Complex<T> {
    type Real = T;
    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    #[inline]
    fn modulus(self) -> T {
        self.norm()
    }
    #[inline]
    fn modulus_sqr(self) -> T {
        self.norm_sqr()
    }
    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    #[inline]
    fn real_part(self) -> T {
        self.re
    }
    #[inline]
    fn is_finite(self) -> bool {
        Float::is_finite(self.re) && Float::is_finite(self.im)
    }
    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}
