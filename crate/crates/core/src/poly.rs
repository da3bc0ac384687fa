//! Dense polynomial helpers in a local variable `t`, coefficients low → high.

use crate::scalar::Real;

pub(crate) fn eval<T: Real>(c: &[T], t: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &k| acc * t + k)
}

pub(crate) fn mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Antiderivative vanishing at `t = 0`.
pub(crate) fn antiderivative<T: Real>(c: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(T::zero());
    for (k, &x) in c.iter().enumerate() {
        out.push(x / T::of_usize(k + 1));
    }
    out
}
