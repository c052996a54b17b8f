//! Scalar abstraction shared by the generic geometry and root-finding code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the core is generic over (`f32` or `f64`).
///
/// The associated constants are the precision-dependent tolerances; every
/// other tolerance in the crate is derived from them.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative distance under which two roots are merged.
    const MERGE: Self;
    /// Relative size of a polynomial value indistinguishable from rounding noise.
    const NOISE: Self;
    /// Absolute on-surface residual, scaled by `1 + |z|`.
    const SURFACE: Self;
    /// Normalised Sturm remainders below this are zero.
    const STURM_CUT: Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }
}

impl Real for f64 {
    const MERGE: Self = 1e-7;
    const NOISE: Self = 1e-14;
    const SURFACE: Self = 1e-9;
    const STURM_CUT: Self = 1e-11;
}

impl Real for f32 {
    const MERGE: Self = 2e-3;
    const NOISE: Self = 1e-5;
    const SURFACE: Self = 1e-4;
    const STURM_CUT: Self = 1e-6;
}

/// Shorthand for [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Sign selector for the four symmetric copies of every closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn of<T: Real>(x: T) -> Sign {
        if x.is_sign_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn apply<T: Real>(self, x: T) -> T {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// `sqrt` of a radicand that may be slightly negative from rounding.
pub(crate) fn clamped_sqrt<T: Real>(r: T, tol: T) -> Option<T> {
    if r >= T::zero() {
        Some(r.sqrt())
    } else if r >= -tol {
        Some(T::zero())
    } else {
        None
    }
}
