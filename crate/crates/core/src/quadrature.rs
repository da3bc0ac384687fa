//! Adaptive Gauss–Kronrod (G7/K15) quadrature over real and complex integrands.

use std::ops::{Add, Mul, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values an integrand may return.
pub trait Integrand<T: Real>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn magnitude(self) -> T;
}

impl<T: Real> Integrand<T> for T {
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Integrand<T> for C<T> {
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::tol(1e-14),
            rel_tol: T::tol(1e-13),
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T, V> {
    lo: T,
    hi: T,
    value: V,
    error: T,
}

fn kronrod<T, V, F>(f: &mut F, lo: T, hi: T) -> Result<(V, T)>
where
    T: Real,
    V: Integrand<T>,
    F: FnMut(T) -> Result<V>,
{
    let half = (hi - lo) * T::lit(0.5);
    let mid = lo + half;
    let center = f(mid)?;
    let mut kron = center * T::lit(WGK[7]);
    let mut gauss = center * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx)? + f(mid + dx)?;
        kron = kron + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    Ok((value, error))
}

/// Integrate `f` over `[lo, hi]` by globally adaptive bisection of the worst panel.
///
/// Returns the integral and the summed error estimate.
pub fn integrate<T, V, F>(f: F, lo: T, hi: T, opts: &QuadOptions<T>) -> Result<(V, T)>
where
    T: Real,
    V: Integrand<T>,
    F: FnMut(T) -> Result<V>,
{
    match integrate_best(f, lo, hi, opts)? {
        (v, e, true) => Ok((v, e)),
        (_, e, false) => Err(Error::QuadratureNotConverged(e.to_f64().unwrap_or(f64::NAN))),
    }
}

/// Like [`integrate`], but on hitting the panel cap returns the current
/// estimate with `false` instead of failing.
pub fn integrate_best<T, V, F>(mut f: F, lo: T, hi: T, opts: &QuadOptions<T>) -> Result<(V, T, bool)>
where
    T: Real,
    V: Integrand<T>,
    F: FnMut(T) -> Result<V>,
{
    if lo == hi {
        return Ok((V::zero(), T::zero(), true));
    }
    let (value, error) = kronrod(&mut f, lo, hi)?;
    let mut panels = vec![Panel { lo, hi, value, error }];
    loop {
        let total = panels.iter().fold(V::zero(), |acc, p| acc + p.value);
        let err = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
        if err <= opts.abs_tol.max(opts.rel_tol * total.magnitude()) {
            return Ok((total, err, true));
        }
        if panels.len() >= opts.max_intervals {
            return Ok((total, err, false));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let p = panels.swap_remove(worst);
        let mid = p.lo + (p.hi - p.lo) * T::lit(0.5);
        if mid <= p.lo || mid >= p.hi {
            panels.push(p);
            return Ok((total, err, false));
        }
        let (lv, le) = kronrod(&mut f, p.lo, mid)?;
        let (rv, re) = kronrod(&mut f, mid, p.hi)?;
        panels.push(Panel { lo: p.lo, hi: mid, value: lv, error: le });
        panels.push(Panel { lo: mid, hi: p.hi, value: rv, error: re });
    }
}

/// Convenience wrapper for infallible real integrands.
pub fn integrate_real<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, opts: &QuadOptions<T>) -> Result<T> {
    integrate(|x| Ok(f(x)), lo, hi, opts).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate_real(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-14);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let v = integrate_real(|x: f64| x.sqrt(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn complex_contour_segment() {
        // ∫_0^1 e^{i 2π t} dt = 0
        let (v, _) = integrate(
            |t: f64| Ok(C::new(0.0, 2.0 * std::f64::consts::PI * t).exp()),
            0.0,
            1.0,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn interval_cap_reports_failure() {
        let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 0.0, max_intervals: 3 };
        let r = integrate_real(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &opts);
        assert!(matches!(r, Err(Error::QuadratureNotConverged(_))));
    }
}
