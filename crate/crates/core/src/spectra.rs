//! Zeros of dispersion functions: argument-principle counting on rectangles,
//! recursive bisection, polishing, and the auxiliary Dirichlet and
//! Dirichlet–Neumann spectra.

use serde::{Deserialize, Serialize};

use crate::dispersion::{check_not_identically_zero, Dispersion};
use crate::error::{Error, Result};
use crate::profiles::{classify, travel_time, Profile, ProfileKind, Regime};
use crate::quadrature::{integrate_best, QuadOptions};
use crate::scalar::{cre, Real, C};
use crate::shooting::{schrodinger_states, wave_states, Equation, OdeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxStatus {
    Unresolved,
    Resolved,
    OnBoundaryRetry,
}

/// Axis-aligned rectangle in the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourBox<T> {
    pub re_lo: T,
    pub re_hi: T,
    pub im_lo: T,
    pub im_hi: T,
    pub winding: u32,
    pub status: BoxStatus,
}

impl<T: Real> ContourBox<T> {
    pub fn new(re_lo: T, re_hi: T, im_lo: T, im_hi: T) -> Self {
        Self { re_lo, re_hi, im_lo, im_hi, winding: 0, status: BoxStatus::Unresolved }
    }

    pub fn is_valid(&self) -> bool {
        [self.re_lo, self.re_hi, self.im_lo, self.im_hi].iter().all(|v| v.is_finite())
            && self.re_hi > self.re_lo
            && self.im_hi > self.im_lo
    }

    pub fn diameter(&self) -> T {
        (self.re_hi - self.re_lo).hypot(self.im_hi - self.im_lo)
    }

    pub fn center(&self) -> C<T> {
        let h = T::lit(0.5);
        C::new((self.re_lo + self.re_hi) * h, (self.im_lo + self.im_hi) * h)
    }

    pub fn contains(&self, z: C<T>) -> bool {
        z.re >= self.re_lo && z.re <= self.re_hi && z.im >= self.im_lo && z.im <= self.im_hi
    }

    /// Expand about the center by the fraction `f` of each side.
    pub fn dilate(&self, f: T) -> Self {
        let dx = (self.re_hi - self.re_lo) * f * T::lit(0.5);
        let dy = (self.im_hi - self.im_lo) * f * T::lit(0.5);
        Self::new(self.re_lo - dx, self.re_hi + dx, self.im_lo - dy, self.im_hi + dy)
    }

    /// Corners counter-clockwise from the lower left.
    fn corners(&self) -> [C<T>; 4] {
        [
            C::new(self.re_lo, self.im_lo),
            C::new(self.re_hi, self.im_lo),
            C::new(self.re_hi, self.im_hi),
            C::new(self.re_lo, self.im_hi),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Origin,
    RealPositive,
    RealNegative,
    ComplexPair,
}

/// A located zero with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvalueRecord<T> {
    pub lambda: C<T>,
    pub multiplicity: u32,
    pub kind: ZeroKind,
    /// `n` in the lattice `n²π²/(a−b)²`, when the zero sits near it.
    pub index_hint: Option<u32>,
    /// `|D|` at the reported point.
    pub residual: T,
}

/// Tunables for counting and locating zeros.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions<T> {
    /// Terminal box diameter.
    pub resolution: T,
    /// `|D| < boundary_ratio · scale` at a quadrature node means a zero on the contour.
    pub boundary_ratio: T,
    pub max_retries: usize,
    pub max_depth: usize,
    /// Largest allowed distance of the unrounded winding from an integer.
    pub integer_slack: T,
    pub quad: QuadOptions<T>,
    /// Largest accepted error estimate of one edge integral when `quad` is not met.
    pub edge_error_cap: T,
    /// Points on the polishing circle.
    pub circle_points: usize,
}

impl<T: Real> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            resolution: T::lit(0.05),
            boundary_ratio: T::lit(1e-12),
            max_retries: 5,
            max_depth: 80,
            integer_slack: T::lit(0.1),
            quad: QuadOptions { abs_tol: T::tol(1e-4), rel_tol: T::tol(1e-10), max_intervals: 2000 },
            edge_error_cap: T::lit(0.05),
            circle_points: 128,
        }
    }
}

/// Off-centre split fractions; consecutive entries are used on retry so split
/// lines avoid the real axis and each other.
const SPLITS: [f64; 6] = [0.5371, 0.4613, 0.5829, 0.4197, 0.6143, 0.3889];

/// `∫ D'/D dz` along the segment `z0 → z1`.
fn segment<T: Real, F: Dispersion<T> + ?Sized>(f: &F, z0: C<T>, z1: C<T>, opts: &SearchOptions<T>) -> Result<C<T>> {
    let dz = z1 - z0;
    let (v, err, _) = integrate_best(
        |t: T| {
            let v = f.eval(z0 + dz * t)?;
            if v.value.norm() <= opts.boundary_ratio * v.scale {
                return Err(Error::ZeroOnContour(0));
            }
            Ok(v.dvalue / v.value * dz)
        },
        T::zero(),
        T::one(),
        &opts.quad,
    )?;
    // D'/D is noise-limited next to high-multiplicity zeros; the winding only
    // needs the edge integral to a small fraction of 2π.
    if err > opts.edge_error_cap {
        return Err(Error::QuadratureNotConverged(err.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(v)
}

fn round_winding<T: Real>(total: C<T>, opts: &SearchOptions<T>) -> Result<u32> {
    let w = total / C::new(T::zero(), T::TAU());
    let n = w.re.round();
    if (w.re - n).abs() > opts.integer_slack || w.im.abs() > opts.integer_slack || n < -opts.integer_slack {
        return Err(Error::QuadratureNotConverged((w - cre(n)).norm().to_f64().unwrap_or(f64::NAN)));
    }
    Ok(n.to_u32().unwrap_or(0))
}

/// Rectangle with its four edge integrals (bottom, right, top, left; CCW).
#[derive(Debug, Clone, Copy)]
struct Cell<T> {
    b: ContourBox<T>,
    edges: [C<T>; 4],
}

fn edges_of<T: Real, F: Dispersion<T> + ?Sized>(f: &F, b: &ContourBox<T>, opts: &SearchOptions<T>) -> Result<[C<T>; 4]> {
    let c = b.corners();
    Ok([
        segment(f, c[0], c[1], opts)?,
        segment(f, c[1], c[2], opts)?,
        segment(f, c[2], c[3], opts)?,
        segment(f, c[3], c[0], opts)?,
    ])
}

fn cell_winding<T: Real>(cell: &Cell<T>, opts: &SearchOptions<T>) -> Result<u32> {
    round_winding(cell.edges.iter().fold(cre(T::zero()), |a, &e| a + e), opts)
}

/// Root cell, dilating the box by 1% whenever a zero sits on its boundary.
fn root_cell<T: Real, F: Dispersion<T> + ?Sized>(f: &F, region: &ContourBox<T>, opts: &SearchOptions<T>) -> Result<Cell<T>> {
    let mut b = *region;
    for _ in 0..=opts.max_retries {
        match edges_of(f, &b, opts) {
            Ok(edges) => {
                let mut cell = Cell { b, edges };
                cell.b.winding = cell_winding(&cell, opts)?;
                return Ok(cell);
            }
            Err(Error::ZeroOnContour(_)) => b = b.dilate(T::lit(0.01)),
            Err(e) => return Err(e),
        }
    }
    Err(Error::ZeroOnContour(opts.max_retries))
}

/// `(1/2πi) ∮ D'/D` over the rectangle.
pub fn count_zeros<T: Real, F: Dispersion<T> + ?Sized>(f: &F, region: &ContourBox<T>) -> Result<u32> {
    count_zeros_with(f, region, &SearchOptions::default())
}

pub fn count_zeros_with<T: Real, F: Dispersion<T> + ?Sized>(f: &F, region: &ContourBox<T>, opts: &SearchOptions<T>) -> Result<u32> {
    if !region.is_valid() {
        return Err(Error::InvalidProfile("search box must be finite with positive extent".into()));
    }
    check_not_identically_zero(f)?;
    Ok(root_cell(f, region, opts)?.b.winding)
}

/// Bisect across the longer side at fraction `frac`, reusing the parent's edge integrals.
fn bisect<T: Real, F: Dispersion<T> + ?Sized>(f: &F, cell: &Cell<T>, frac: T, opts: &SearchOptions<T>) -> Result<[Cell<T>; 2]> {
    let b = cell.b;
    let [e_bot, e_right, e_top, e_left] = cell.edges;
    let wide = b.re_hi - b.re_lo >= b.im_hi - b.im_lo;
    let (lo_box, hi_box, edges_lo, edges_hi);
    if wide {
        let xm = b.re_lo + (b.re_hi - b.re_lo) * frac;
        let bot1 = segment(f, C::new(b.re_lo, b.im_lo), C::new(xm, b.im_lo), opts)?;
        let top1 = segment(f, C::new(b.re_hi, b.im_hi), C::new(xm, b.im_hi), opts)?;
        let mid = segment(f, C::new(xm, b.im_lo), C::new(xm, b.im_hi), opts)?;
        lo_box = ContourBox::new(b.re_lo, xm, b.im_lo, b.im_hi);
        hi_box = ContourBox::new(xm, b.re_hi, b.im_lo, b.im_hi);
        edges_lo = [bot1, mid, e_top - top1, e_left];
        edges_hi = [e_bot - bot1, e_right, top1, -mid];
    } else {
        let ym = b.im_lo + (b.im_hi - b.im_lo) * frac;
        let right1 = segment(f, C::new(b.re_hi, b.im_lo), C::new(b.re_hi, ym), opts)?;
        let left1 = segment(f, C::new(b.re_lo, b.im_hi), C::new(b.re_lo, ym), opts)?;
        let mid = segment(f, C::new(b.re_hi, ym), C::new(b.re_lo, ym), opts)?;
        lo_box = ContourBox::new(b.re_lo, b.re_hi, b.im_lo, ym);
        hi_box = ContourBox::new(b.re_lo, b.re_hi, ym, b.im_hi);
        edges_lo = [e_bot, right1, mid, e_left - left1];
        edges_hi = [-mid, e_right - right1, e_top, left1];
    }
    let mut lo = Cell { b: lo_box, edges: edges_lo };
    let mut hi = Cell { b: hi_box, edges: edges_hi };
    lo.b.winding = cell_winding(&lo, opts)?;
    hi.b.winding = cell_winding(&hi, opts)?;
    if lo.b.winding + hi.b.winding != b.winding {
        return Err(Error::QuadratureNotConverged(f64::NAN));
    }
    Ok([lo, hi])
}

/// Newton iteration that must stay inside `bounds`.
fn newton_in<T: Real, F: Dispersion<T> + ?Sized>(f: &F, start: C<T>, bounds: &ContourBox<T>) -> Option<C<T>> {
    let mut z = start;
    for _ in 0..60 {
        let v = f.eval(z).ok()?;
        if v.value == cre(T::zero()) {
            return Some(z);
        }
        if v.dvalue == cre(T::zero()) {
            return None;
        }
        let step = v.value / v.dvalue;
        z -= step;
        if !bounds.contains(z) {
            return None;
        }
        if step.norm() <= T::epsilon() * T::lit(8.0) * (T::one() + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Winding number and mean position of the zeros inside `|λ − center| = radius`,
/// by the trapezoid rule on the circle.
pub fn circle_moments<T: Real, F: Dispersion<T> + ?Sized>(f: &F, center: C<T>, radius: T, points: usize) -> Result<(T, C<T>)> {
    let n = T::of_usize(points);
    let mut m0 = cre(T::zero());
    let mut m1 = cre(T::zero());
    for j in 0..points {
        let theta = T::TAU() * (T::of_usize(j) + T::lit(0.5)) / n;
        let w = C::new(theta.cos(), theta.sin()) * radius;
        let v = f.eval(center + w)?;
        let g = v.dvalue / v.value * w;
        m0 += g;
        m1 += g * w;
    }
    let count = m0.re / n;
    let offset = if m0.norm() > T::zero() { m1 / m0 } else { cre(T::zero()) };
    Ok((count, center + offset))
}

fn index_hint<T: Real>(lambda: T, lattice: Option<(T, T)>) -> Option<u32> {
    let (a, b) = lattice?;
    if lambda <= T::zero() || a == b {
        return None;
    }
    let x = lambda.sqrt() * (b - a).abs() / T::PI();
    let n = x.round();
    if n >= T::one() && (x - n).abs() <= T::lit(0.25) {
        n.to_u32()
    } else {
        None
    }
}

fn classify_zero<T: Real, F: Dispersion<T> + ?Sized>(f: &F, z: C<T>) -> (C<T>, ZeroKind) {
    let b2 = f.radius() * f.radius();
    if f.equation() == Equation::Wave && z.norm() * b2 <= T::lit(1e-9) {
        return (cre(T::zero()), ZeroKind::Origin);
    }
    if z.im.abs() <= T::lit(1e-9) * (T::one() + z.norm()) {
        let kind = if z.re > T::zero() { ZeroKind::RealPositive } else { ZeroKind::RealNegative };
        return (cre(z.re), kind);
    }
    (z, ZeroKind::ComplexPair)
}

/// Real Newton polish for a simple zero on the real axis.
fn polish_real<T: Real, F: Dispersion<T> + ?Sized>(f: &F, x: T) -> T {
    let mut x = x;
    for _ in 0..30 {
        let Ok(v) = f.eval(cre(x)) else { return x };
        if v.dvalue.re == T::zero() {
            return x;
        }
        let step = v.value.re / v.dvalue.re;
        if !step.is_finite() {
            return x;
        }
        x -= step;
        if step.abs() <= T::epsilon() * T::lit(4.0) * (T::one() + x.abs()) {
            break;
        }
    }
    x
}

fn make_record<T: Real, F: Dispersion<T> + ?Sized>(f: &F, z: C<T>, m: u32) -> Result<EigenvalueRecord<T>> {
    let (mut z, kind) = classify_zero(f, z);
    if m == 1 && matches!(kind, ZeroKind::RealPositive | ZeroKind::RealNegative) {
        z = cre(polish_real(f, z.re));
    }
    let residual = f.eval(z)?.value.norm();
    let lattice = f.lattice_time().map(|a| (a, f.radius()));
    let index_hint = if kind == ZeroKind::RealPositive { index_hint(z.re, lattice) } else { None };
    Ok(EigenvalueRecord { lambda: z, multiplicity: m, kind, index_hint, residual })
}

/// Locate a cluster of total multiplicity `m` known to lie inside `b`.
fn polish_cluster<T: Real, F: Dispersion<T> + ?Sized>(f: &F, b: &ContourBox<T>, m: u32, opts: &SearchOptions<T>) -> Result<EigenvalueRecord<T>> {
    let center = b.center();
    let d = b.diameter();
    if m == 1 {
        let guard = b.dilate(T::lit(0.5));
        if let Some(z) = newton_in(f, center, &guard) {
            return make_record(f, z, 1);
        }
    }
    for scale in [1.0, 0.75, 1.5, 2.0] {
        let r = d * T::lit(scale);
        if let Ok((count, mean)) = circle_moments(f, center, r, opts.circle_points) {
            if (count - T::of_usize(m as usize)).abs() < T::lit(0.05) {
                let z = if m == 1 { newton_in(f, mean, &b.dilate(T::lit(1.0))).unwrap_or(mean) } else { mean };
                return make_record(f, z, m);
            }
        }
    }
    make_record(f, center, m)
}

/// Mean location and multiplicity of the zero cluster inside `|λ − center| = radius`.
pub fn refine_cluster<T: Real, F: Dispersion<T> + ?Sized>(f: &F, center: C<T>, radius: T) -> Result<EigenvalueRecord<T>> {
    let (count, mean) = circle_moments(f, center, radius, 128)?;
    let m = count.round();
    if (count - m).abs() > T::lit(0.05) || m < T::one() {
        return Err(Error::QuadratureNotConverged((count - m).abs().to_f64().unwrap_or(f64::NAN)));
    }
    let m = m.to_u32().unwrap_or(1);
    let z = if m == 1 {
        let guard = ContourBox::new(center.re - radius, center.re + radius, center.im - radius, center.im + radius);
        newton_in(f, mean, &guard).unwrap_or(mean)
    } else {
        mean
    };
    make_record(f, z, m)
}

fn resolve<T: Real, F: Dispersion<T> + ?Sized>(f: &F, cell: Cell<T>, depth: usize, opts: &SearchOptions<T>) -> Result<Vec<EigenvalueRecord<T>>> {
    let m = cell.b.winding;
    if m == 0 {
        return Ok(Vec::new());
    }
    if cell.b.diameter() <= opts.resolution {
        let mut b = cell.b;
        b.status = BoxStatus::Resolved;
        return Ok(vec![polish_cluster(f, &b, m, opts)?]);
    }
    if m == 1 {
        if let Some(z) = newton_in(f, cell.b.center(), &cell.b) {
            return Ok(vec![make_record(f, z, 1)?]);
        }
    }
    if depth >= opts.max_depth {
        return Err(Error::MaxDepthExceeded(depth));
    }
    let mut last = Error::ZeroOnContour(0);
    for (attempt, &frac) in SPLITS.iter().enumerate().take(opts.max_retries + 1) {
        let _ = attempt;
        match bisect(f, &cell, T::lit(frac), opts) {
            Ok([lo, hi]) => {
                let (a, b) = rayon::join(|| resolve(f, lo, depth + 1, opts), || resolve(f, hi, depth + 1, opts));
                let mut out = a?;
                out.extend(b?);
                return Ok(out);
            }
            Err(e @ (Error::ZeroOnContour(_) | Error::QuadratureNotConverged(_))) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(match last {
        Error::ZeroOnContour(_) => Error::ZeroOnContour(opts.max_retries),
        e => e,
    })
}

/// Enforce conjugate closure and sort by `(Re λ, Im λ)`.
fn close_and_sort<T: Real>(mut records: Vec<EigenvalueRecord<T>>) -> Vec<EigenvalueRecord<T>> {
    let upper: Vec<usize> = (0..records.len()).filter(|&i| records[i].kind == ZeroKind::ComplexPair && records[i].lambda.im > T::zero()).collect();
    let mut used = vec![false; records.len()];
    let mut extra = Vec::new();
    for &i in &upper {
        let z = records[i].lambda;
        let tol = T::lit(1e-6) * (T::one() + z.norm());
        let partner = (0..records.len()).find(|&j| {
            !used[j] && records[j].kind == ZeroKind::ComplexPair && records[j].lambda.im < T::zero() && (records[j].lambda - z.conj()).norm() <= tol
        });
        match partner {
            Some(j) => {
                used[j] = true;
                let avg = (z + records[j].lambda.conj()) * T::lit(0.5);
                records[i].lambda = avg;
                records[j].lambda = avg.conj();
                records[j].multiplicity = records[i].multiplicity;
            }
            None => extra.push(EigenvalueRecord { lambda: z.conj(), ..records[i] }),
        }
    }
    for j in 0..records.len() {
        let r = records[j];
        if r.kind == ZeroKind::ComplexPair && r.lambda.im < T::zero() && !used[j] {
            extra.push(EigenvalueRecord { lambda: r.lambda.conj(), ..r });
        }
    }
    records.extend(extra);
    records.sort_by(|a, b| {
        a.lambda.re.partial_cmp(&b.lambda.re).unwrap_or(std::cmp::Ordering::Equal).then(a.lambda.im.partial_cmp(&b.lambda.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    records
}

/// All zeros inside `region` with multiplicities.
pub fn find_eigenvalues<T: Real, F: Dispersion<T> + ?Sized>(f: &F, region: &ContourBox<T>, resolution: T) -> Result<Vec<EigenvalueRecord<T>>> {
    find_eigenvalues_with(f, region, &SearchOptions { resolution, ..SearchOptions::default() })
}

pub fn find_eigenvalues_with<T: Real, F: Dispersion<T> + ?Sized>(f: &F, region: &ContourBox<T>, opts: &SearchOptions<T>) -> Result<Vec<EigenvalueRecord<T>>> {
    if !region.is_valid() || !(opts.resolution > T::zero()) {
        return Err(Error::InvalidProfile("search region must be finite and resolution positive".into()));
    }
    check_not_identically_zero(f)?;
    let root = root_cell(f, region, opts)?;
    Ok(close_and_sort(resolve(f, root, 0, opts)?))
}

/// `n²π²/(a−b)²`.
pub fn lattice_value<T: Real>(a: T, b: T, n: u32) -> Result<T> {
    if classify(a, b) == Regime::AEqualsB {
        return Err(Error::RegimeAEqualsB);
    }
    let k = T::lit(n as f64) * T::PI() / (a - b);
    Ok(k * k)
}

pub fn asymptotic_lattice<T: Real>(p: &Profile<T>, n: u32) -> Result<T> {
    lattice_value(travel_time(p)?, p.b(), n)
}

/// First `count` real positive zeros (odd-multiplicity clusters), found by
/// sign changes of `D(s²)` in `s`, each refined as a cluster on a small circle.
pub fn real_positive_zeros<T: Real, F: Dispersion<T> + ?Sized>(f: &F, count: usize) -> Result<Vec<EigenvalueRecord<T>>> {
    let b = f.radius();
    let a = f.lattice_time().unwrap_or(b);
    let ds = T::PI() / (T::lit(8.0) * (a + b));
    let period = T::PI() / (b - a).abs().max(T::lit(0.05) * b);
    let s_max = period * T::of_usize(count + 20) * T::lit(2.0);
    let mut out: Vec<EigenvalueRecord<T>> = Vec::with_capacity(count);
    let g = |s: T| f.eval(cre(s * s)).map(|v| v.value.re);
    let mut s0 = ds * T::lit(0.5);
    let mut g0 = g(s0)?;
    while out.len() < count {
        let s1 = s0 + ds;
        if s1 > s_max {
            return Err(Error::BracketingFailed(out.len()));
        }
        let g1 = g(s1)?;
        if g1 == T::zero() || (g0 < T::zero()) != (g1 < T::zero()) {
            let s = if g1 == T::zero() { s1 } else { bisect_root(&g, s0, s1, g0)? };
            let lam = s * s;
            let radius = T::lit(0.5) * s * ds;
            let rec = refine_cluster(f, cre(lam), radius)?;
            let dup = out.last().is_some_and(|r| (r.lambda - rec.lambda).norm() <= radius);
            if !dup && rec.kind == ZeroKind::RealPositive {
                out.push(rec);
            }
        }
        s0 = s1;
        g0 = g1;
    }
    Ok(out)
}

/// One lattice point with the real zero nearest to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeMatch<T> {
    pub n: u32,
    pub lattice: T,
    pub zero: EigenvalueRecord<T>,
}

impl<T: Real> LatticeMatch<T> {
    pub fn deviation(&self) -> T {
        self.zero.lambda.re - self.lattice
    }
}

/// Pair `n²π²/(a−b)²`, `n = 1..=count`, with the nearest real positive zero.
/// The real scan is extended until it passes the last lattice point.
pub fn lattice_deviations<T: Real, F: Dispersion<T> + ?Sized>(f: &F, count: u32) -> Result<Vec<LatticeMatch<T>>> {
    let b = f.radius();
    let a = f.lattice_time().ok_or(Error::RegimeAEqualsB)?;
    let lattice: Vec<T> = (1..=count).map(|n| lattice_value(a, b, n)).collect::<Result<_>>()?;
    let last = *lattice.last().ok_or(Error::InsufficientZeros { available: 0, requested: 0 })?;
    let mut want = count as usize + 4;
    let zeros = loop {
        let z = real_positive_zeros(f, want)?;
        if z.last().is_some_and(|r| r.lambda.re > last * T::lit(1.05)) {
            break z;
        }
        want *= 2;
    };
    Ok(lattice
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let zero = *zeros.iter().min_by(|x, y| (x.lambda.re - l).abs().partial_cmp(&(y.lambda.re - l).abs()).unwrap_or(std::cmp::Ordering::Equal)).unwrap_or(&zeros[0]);
            LatticeMatch { n: i as u32 + 1, lattice: l, zero }
        })
        .collect())
}

fn bisect_root<T: Real, G: Fn(T) -> Result<T>>(g: &G, mut lo: T, mut hi: T, mut glo: T) -> Result<T> {
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == T::zero() {
            return Ok(mid);
        }
        if (gm < T::zero()) == (glo < T::zero()) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

/// Which boundary value to take zeros of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Boundary {
    Dirichlet,
    Neumann,
}

fn boundary_spectrum<T: Real>(p: &Profile<T>, count: usize, which: Boundary) -> Result<Vec<T>> {
    let opts = OdeOptions::default();
    let b = p.b();
    let (shift, time) = match p.kind() {
        ProfileKind::WaveSpeedRho => (T::zero(), travel_time(p)?),
        ProfileKind::SchrodingerPotential => (p.min_value(), b),
    };
    // λ = shift + t², zeros near nπ/time (Dirichlet) or (n−½)π/time.
    let eval = |t: T| -> Result<(T, T)> {
        let lam = cre(shift + t * t);
        let s = match p.kind() {
            ProfileKind::WaveSpeedRho => wave_states(p, lam, &[b], &opts)?,
            ProfileKind::SchrodingerPotential => schrodinger_states(p, lam, &[b], &opts)?,
        }[0];
        Ok(match which {
            Boundary::Dirichlet => (s[0].re, s[2].re),
            Boundary::Neumann => (s[1].re, s[3].re),
        })
    };
    let dt = T::PI() / (T::lit(16.0) * time);
    let t_max = T::PI() / time * T::of_usize(count + 8) * T::lit(2.0);
    let mut out = Vec::with_capacity(count);
    let mut t0 = T::zero();
    let mut g0 = eval(t0)?.0;
    while out.len() < count {
        let t1 = t0 + dt;
        if t1 > t_max {
            return Err(Error::BracketingFailed(out.len() + 1));
        }
        let g1 = eval(t1)?.0;
        if g1 == T::zero() || (g0 < T::zero()) != (g1 < T::zero()) {
            let t = if g1 == T::zero() { t1 } else { bisect_root(&|t| eval(t).map(|v| v.0), t0, t1, g0)? };
            let mut lam = shift + t * t;
            for _ in 0..8 {
                let (v, dv) = eval((lam - shift).max(T::zero()).sqrt())?;
                if dv == T::zero() {
                    break;
                }
                let step = v / dv;
                lam -= step;
                if step.abs() <= T::epsilon() * T::lit(4.0) * (T::one() + lam.abs()) {
                    break;
                }
            }
            out.push(lam);
        }
        t0 = t1;
        g0 = g1;
    }
    Ok(out)
}

/// First `count` zeros of `λ ↦ φ(b; λ)`.
pub fn dirichlet_spectrum<T: Real>(p: &Profile<T>, count: usize) -> Result<Vec<T>> {
    boundary_spectrum(p, count, Boundary::Dirichlet)
}

/// First `count` zeros of `λ ↦ φ'(b; λ)`.
pub fn dirichlet_neumann_spectrum<T: Real>(p: &Profile<T>, count: usize) -> Result<Vec<T>> {
    boundary_spectrum(p, count, Boundary::Neumann)
}
