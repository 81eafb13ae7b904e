//! Store values: fixed-width integers with wraparound arithmetic.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{AsPrimitive, PrimInt, WrappingAdd, WrappingMul, WrappingSub};

/// A store value. Arithmetic wraps, so evaluation is total.
pub trait Value:
    PrimInt
    + WrappingAdd
    + WrappingSub
    + WrappingMul
    + Debug
    + Display
    + Default
    + Hash
    + Send
    + Sync
    + 'static
{
    /// Converts a program literal, wrapping to the width of `Self`.
    fn from_literal(n: i64) -> Self;

    fn to_i64(self) -> i64;
}

impl<T> Value for T
where
    T: PrimInt
        + WrappingAdd
        + WrappingSub
        + WrappingMul
        + Debug
        + Display
        + Default
        + Hash
        + Send
        + Sync
        + AsPrimitive<i64>
        + 'static,
    i64: AsPrimitive<T>,
{
    fn from_literal(n: i64) -> Self {
        n.as_()
    }

    fn to_i64(self) -> i64 {
        self.as_()
    }
}
