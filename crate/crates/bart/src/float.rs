use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Open01, StandardNormal};

/// Floating-point scalar the whole crate is generic over: `f32` or `f64`.
///
/// Bundles the numeric traits the samplers need together with hooks into
/// `rand_distr`, so generic code can draw standard variates without carrying
/// distribution bounds on every function.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FromStr
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// One draw from N(0, 1).
    fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the open interval (0, 1).
    fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Exp(1).
    fn std_exp<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from a chi-square distribution with `dof > 0` degrees of freedom.
    fn chi_square<R: Rng + ?Sized>(rng: &mut R, dof: Self) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn unit_open<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            #[inline]
            fn std_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            #[inline]
            fn chi_square<R: Rng + ?Sized>(rng: &mut R, dof: Self) -> Self {
                ChiSquared::new(dof)
                    .expect("chi-square degrees of freedom must be positive")
                    .sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Lift an `f64` constant into the working scalar type.
#[inline]
pub(crate) fn cst<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("constant fits in scalar type")
}

/// Lift a `usize` count into the working scalar type.
#[inline]
pub(crate) fn cnt<F: Real>(v: usize) -> F {
    F::from_usize(v).expect("count fits in scalar type")
}
