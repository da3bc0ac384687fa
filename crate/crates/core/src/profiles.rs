//! Wave-speed profiles ρ and potentials V on `[0, b]`, stored as piecewise cubics.
//!
//! Coefficients of each piece are expressed in the local variable `x - x0`.
//! Derived quantities live here as well: the travel time `a = ∫√ρ`, the
//! regime trichotomy `a <> b`, the moments `M1`, `M2` and the Liouville map
//! to Schrödinger form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::quadrature::{integrate_real, QuadOptions};
use crate::scalar::Real;

/// Number of uniform points in the positivity audit (breakpoints are added).
pub const AUDIT_POINTS: usize = 4096;
/// Relative band around `a = b` treated as equality.
pub const REGIME_BAND: f64 = 1e-9;
/// Minimum number of uniform nodes in the Liouville potential grid.
pub const LIOUVILLE_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    #[serde(rename = "rho")]
    WaveSpeedRho,
    #[serde(rename = "potential")]
    SchrodingerPotential,
}

/// Whether jumps are permitted at interior breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    /// Value and first derivative continuous (required for the Liouville map).
    #[default]
    C1,
    /// Polynomial pieces may jump at breakpoints (piecewise-constant fits).
    Piecewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ALessB,
    AEqualsB,
    AGreaterB,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub x0: T,
    pub x1: T,
    pub coeffs: [T; 4],
}

impl<T: Real> Piece<T> {
    #[inline]
    pub fn value(&self, x: T) -> T {
        poly::eval(&self.coeffs, x - self.x0)
    }

    /// `(f, f', f'', f''')` at `x`.
    pub fn jet(&self, x: T) -> [T; 4] {
        let t = x - self.x0;
        let [c0, c1, c2, c3] = self.coeffs;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        [
            ((c3 * t + c2) * t + c1) * t + c0,
            (three * c3 * t + two * c2) * t + c1,
            six * c3 * t + two * c2,
            six * c3,
        ]
    }

    fn width(&self) -> T {
        self.x1 - self.x0
    }
}

/// A validated profile on `[0, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T> {
    b: T,
    kind: ProfileKind,
    regularity: Regularity,
    pieces: Vec<Piece<T>>,
    name: String,
}

impl<T: Real> Profile<T> {
    /// Build and validate a profile. Wave-speed profiles with [`Regularity::C1`]
    /// must be continuous with continuous slope; all wave-speed profiles must be positive.
    pub fn new(kind: ProfileKind, regularity: Regularity, pieces: Vec<Piece<T>>, name: impl Into<String>) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| Error::InvalidProfile("no pieces".into()))?;
        if first.x0 != T::zero() {
            return Err(Error::InvalidProfile("first breakpoint must be 0".into()));
        }
        let b = pieces.last().map(|p| p.x1).unwrap_or_else(T::zero);
        if !(b > T::zero()) || !b.is_finite() {
            return Err(Error::InvalidProfile("radius b must be positive and finite".into()));
        }
        for (i, p) in pieces.iter().enumerate() {
            if !(p.x1 > p.x0) {
                return Err(Error::InvalidProfile(format!("piece {i}: breakpoints not strictly increasing")));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProfile(format!("piece {i}: non-finite coefficient")));
            }
            if i > 0 && pieces[i - 1].x1 != p.x0 {
                return Err(Error::InvalidProfile(format!("piece {i}: not contiguous with previous piece")));
            }
        }
        let profile = Self { b, kind, regularity, pieces, name: name.into() };
        if kind == ProfileKind::WaveSpeedRho {
            profile.audit_positive()?;
            if regularity == Regularity::C1 {
                profile.audit_c1()?;
            }
        }
        Ok(profile)
    }

    pub fn constant(kind: ProfileKind, value: T, b: T) -> Result<Self> {
        let z = T::zero();
        Self::new(kind, Regularity::C1, vec![Piece { x0: z, x1: b, coeffs: [value, z, z, z] }], "constant")
    }

    /// Piecewise-constant profile on `breaks[0] = 0 < … < breaks[n] = b`.
    pub fn piecewise_constant(kind: ProfileKind, breaks: &[T], values: &[T]) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::InvalidProfile("need one more breakpoint than values".into()));
        }
        let z = T::zero();
        let pieces = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Piece { x0: breaks[i], x1: breaks[i + 1], coeffs: [v, z, z, z] })
            .collect();
        Self::new(kind, Regularity::Piecewise, pieces, "piecewise-constant")
    }

    /// C1 cubic Hermite interpolant through `(nodes[i], values[i])` with the given slopes.
    pub fn hermite(kind: ProfileKind, nodes: &[T], values: &[T], slopes: &[T]) -> Result<Self> {
        if nodes.len() < 2 || values.len() != nodes.len() || slopes.len() != nodes.len() {
            return Err(Error::InvalidProfile("hermite data length mismatch".into()));
        }
        let pieces = nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| Piece { x0: w[0], x1: w[1], coeffs: hermite_coeffs(w[1] - w[0], values[i], values[i + 1], slopes[i], slopes[i + 1]) })
            .collect();
        Self::new(kind, Regularity::C1, pieces, "hermite")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn b(&self) -> T {
        self.b
    }
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
    pub fn regularity(&self) -> Regularity {
        self.regularity
    }
    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> Vec<T> {
        std::iter::once(T::zero()).chain(self.pieces.iter().map(|p| p.x1)).collect()
    }

    /// True when every piece is the same constant.
    pub fn constant_value(&self) -> Option<T> {
        let v = self.pieces[0].coeffs[0];
        self.pieces
            .iter()
            .all(|p| p.coeffs[0] == v && p.coeffs[1..].iter().all(|c| *c == T::zero()))
            .then_some(v)
    }

    /// Index of the piece containing `x` (right-continuous, last piece owns `b`).
    pub fn piece_index(&self, x: T) -> usize {
        let i = self.pieces.partition_point(|p| p.x1 <= x);
        i.min(self.pieces.len() - 1)
    }

    pub fn eval(&self, x: T) -> T {
        self.pieces[self.piece_index(x)].value(x)
    }

    /// `(f, f', f'', f''')` at `x`.
    pub fn jet(&self, x: T) -> [T; 4] {
        self.pieces[self.piece_index(x)].jet(x)
    }

    pub fn check_domain(&self, x: T) -> Result<()> {
        if x < T::zero() || x > self.b || !x.is_finite() {
            return Err(Error::OutOfDomain { x: x.to_f64().unwrap_or(f64::NAN), b: self.b.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    }

    pub fn min_value(&self) -> T {
        self.audit_grid().into_iter().fold(T::infinity(), |m, (_, v)| m.min(v))
    }

    pub fn max_value(&self) -> T {
        self.audit_grid().into_iter().fold(T::neg_infinity(), |m, (_, v)| m.max(v))
    }

    fn audit_grid(&self) -> Vec<(T, T)> {
        let mut out = Vec::with_capacity(AUDIT_POINTS + 2 * self.pieces.len() + 1);
        for k in 0..=AUDIT_POINTS {
            let x = self.b * T::of_usize(k) / T::of_usize(AUDIT_POINTS);
            out.push((x, self.eval(x)));
        }
        for p in &self.pieces {
            out.push((p.x0, p.value(p.x0)));
            out.push((p.x1, p.value(p.x1)));
        }
        out
    }

    fn audit_positive(&self) -> Result<()> {
        for (x, v) in self.audit_grid() {
            if !(v > T::zero()) {
                return Err(Error::NonPositiveProfile { x: x.to_f64().unwrap_or(f64::NAN), value: v.to_f64().unwrap_or(f64::NAN) });
            }
        }
        Ok(())
    }

    fn audit_c1(&self) -> Result<()> {
        let tol = T::tol(1e-9);
        for w in self.pieces.windows(2) {
            let (l, r) = (w[0].jet(w[0].x1), w[1].jet(w[1].x0));
            for k in 0..2 {
                if (l[k] - r[k]).abs() > tol * (T::one() + l[k].abs().max(r[k].abs())) {
                    return Err(Error::InvalidProfile(format!(
                        "derivative {k} jumps at x = {} ({} vs {})",
                        w[0].x1, l[k], r[k]
                    )));
                }
            }
        }
        Ok(())
    }
}

fn hermite_coeffs<T: Real>(h: T, f0: T, f1: T, m0: T, m1: T) -> [T; 4] {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let slope = (f1 - f0) / h;
    [f0, m0, (three * slope - two * m0 - m1) / h, (m0 + m1 - two * slope) / (h * h)]
}

fn require_rho<T: Real>(p: &Profile<T>) -> Result<()> {
    if p.kind != ProfileKind::WaveSpeedRho {
        return Err(Error::InvalidProfile("operation needs a wave-speed profile".into()));
    }
    Ok(())
}

fn quad_opts<T: Real>() -> QuadOptions<T> {
    QuadOptions { abs_tol: T::tol(1e-15), rel_tol: T::tol(1e-14), max_intervals: 2000 }
}

/// `∫_{x0}^{x} √ρ` inside piece `i`.
fn piece_travel<T: Real>(p: &Profile<T>, i: usize, x: T) -> Result<T> {
    let piece = &p.pieces[i];
    let [c, z1, z2, z3] = piece.coeffs;
    if z1 == T::zero() && z2 == T::zero() && z3 == T::zero() {
        return Ok(c.sqrt() * (x - piece.x0));
    }
    integrate_real(|s| piece.value(s).max(T::zero()).sqrt(), piece.x0, x, &quad_opts())
}

/// Travel time `a = ∫_0^b √ρ(x) dx`.
pub fn travel_time<T: Real>(p: &Profile<T>) -> Result<T> {
    require_rho(p)?;
    travel_time_to(p, p.b)
}

/// Partial travel time `y(x) = ∫_0^x √ρ`.
pub fn travel_time_to<T: Real>(p: &Profile<T>, x: T) -> Result<T> {
    require_rho(p)?;
    p.check_domain(x)?;
    let mut acc = T::zero();
    for (i, piece) in p.pieces.iter().enumerate() {
        if x <= piece.x0 {
            break;
        }
        acc += piece_travel(p, i, x.min(piece.x1))?;
    }
    Ok(acc)
}

pub fn classify_regime<T: Real>(p: &Profile<T>) -> Result<Regime> {
    let a = travel_time(p)?;
    Ok(classify(a, p.b))
}

pub(crate) fn classify<T: Real>(a: T, b: T) -> Regime {
    if (a - b).abs() <= T::lit(REGIME_BAND) * b {
        Regime::AEqualsB
    } else if a < b {
        Regime::ALessB
    } else {
        Regime::AGreaterB
    }
}

/// Exact piecewise-polynomial moments `M1(x) = ∫_0^x zρ`, `M2(x) = ∫_0^x z²ρ`
/// together with `∫_0^x M1(z)² dz`.
#[derive(Debug, Clone)]
pub struct MomentTable<T> {
    pieces: Vec<MomentPiece<T>>,
}

#[derive(Debug, Clone)]
struct MomentPiece<T> {
    x0: T,
    x1: T,
    m1: Vec<T>,
    m2: Vec<T>,
    m1_sq: Vec<T>,
}

impl<T: Real> MomentTable<T> {
    pub fn new(p: &Profile<T>) -> Self {
        let (mut m1_acc, mut m2_acc, mut sq_acc) = (T::zero(), T::zero(), T::zero());
        let mut pieces = Vec::with_capacity(p.pieces.len());
        for piece in &p.pieces {
            let shift = [piece.x0, T::one()];
            let z_rho = poly::mul(&shift, &piece.coeffs);
            let z2_rho = poly::mul(&shift, &z_rho);
            let mut m1 = poly::antiderivative(&z_rho);
            m1[0] = m1_acc;
            let mut m2 = poly::antiderivative(&z2_rho);
            m2[0] = m2_acc;
            let mut m1_sq = poly::antiderivative(&poly::mul(&m1, &m1));
            m1_sq[0] = sq_acc;
            let h = piece.width();
            m1_acc = poly::eval(&m1, h);
            m2_acc = poly::eval(&m2, h);
            sq_acc = poly::eval(&m1_sq, h);
            pieces.push(MomentPiece { x0: piece.x0, x1: piece.x1, m1, m2, m1_sq });
        }
        Self { pieces }
    }

    fn locate(&self, x: T) -> &MomentPiece<T> {
        let i = self.pieces.partition_point(|p| p.x1 <= x).min(self.pieces.len() - 1);
        &self.pieces[i]
    }

    pub fn m1(&self, x: T) -> T {
        let p = self.locate(x);
        poly::eval(&p.m1, x - p.x0)
    }

    pub fn m2(&self, x: T) -> T {
        let p = self.locate(x);
        poly::eval(&p.m2, x - p.x0)
    }

    pub fn m1_squared_integral(&self, x: T) -> T {
        let p = self.locate(x);
        poly::eval(&p.m1_sq, x - p.x0)
    }
}

/// `(M1(x), M2(x))`.
pub fn moments<T: Real>(p: &Profile<T>, x: T) -> Result<(T, T)> {
    require_rho(p)?;
    p.check_domain(x)?;
    let table = MomentTable::new(p);
    Ok((table.m1(x), table.m2(x)))
}

/// Result of the Liouville change of variables `y = ∫√ρ`, `ϕ(y) = ρ^{1/4} φ(x)`.
#[derive(Debug, Clone)]
pub struct LiouvilleImage<T> {
    pub a: T,
    /// `(x, y(x))` pairs at the potential grid nodes.
    pub y_of_x: Vec<(T, T)>,
    /// `(y, x(y))` pairs, the same nodes viewed from the `y` side.
    pub x_of_y: Vec<(T, T)>,
    /// Potential `q(y)` on `[0, a]`.
    pub q: Profile<T>,
    /// `ρ(0)^{-1/4}`, the initial slope of the transformed solution.
    pub phi0_scale: T,
    rho: Profile<T>,
    y_breaks: Vec<T>,
}

impl<T: Real> LiouvilleImage<T> {
    /// `y(x)`, evaluated from the underlying profile.
    pub fn y_at(&self, x: T) -> Result<T> {
        travel_time_to(&self.rho, x)
    }

    /// Inverse map `x(y)` by safeguarded Newton inside the owning piece.
    pub fn x_at(&self, y: T) -> Result<T> {
        if y < T::zero() || y > self.a {
            return Err(Error::OutOfDomain { x: y.to_f64().unwrap_or(f64::NAN), b: self.a.to_f64().unwrap_or(f64::NAN) });
        }
        let i = self.y_breaks.partition_point(|&yb| yb <= y).saturating_sub(1).min(self.rho.pieces.len() - 1);
        invert_in_piece(&self.rho, i, self.y_breaks[i], y)
    }

    pub fn rho(&self) -> &Profile<T> {
        &self.rho
    }
}

fn invert_in_piece<T: Real>(p: &Profile<T>, i: usize, y0: T, y: T) -> Result<T> {
    let piece = &p.pieces[i];
    let (mut lo, mut hi) = (piece.x0, piece.x1);
    let mut x = piece.x0 + (y - y0) / piece.value(piece.x0).sqrt();
    x = x.max(lo).min(hi);
    for _ in 0..100 {
        let f = y0 + piece_travel(p, i, x)? - y;
        if f > T::zero() {
            hi = x;
        } else {
            lo = x;
        }
        let step = f / piece.value(x).sqrt();
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = (lo + hi) * T::lit(0.5);
        }
        if (next - x).abs() <= T::epsilon() * T::lit(4.0) * (T::one() + x.abs()) || hi - lo <= T::epsilon() * p.b {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// `q = ρ''/(4ρ²) − 5ρ'²/(16ρ³)` and its `y`-derivative, from the jet of ρ.
pub fn liouville_potential<T: Real>(jet: [T; 4]) -> (T, T) {
    let [r, r1, r2, r3] = jet;
    let quarter = T::lit(0.25);
    let five16 = T::lit(5.0 / 16.0);
    let q = quarter * r2 / (r * r) - five16 * r1 * r1 / (r * r * r);
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let dq_dx = quarter * (r3 / (r * r) - two * r2 * r1 / (r * r * r))
        - five16 * (two * r1 * r2 / (r * r * r) - three * r1 * r1 * r1 / (r * r * r * r));
    (q, dq_dx / r.sqrt())
}

/// Tabulate the Liouville map and the transformed potential on at least
/// [`LIOUVILLE_NODES`] uniform `y` nodes plus the images of the breakpoints.
pub fn liouville_transform<T: Real>(p: &Profile<T>) -> Result<LiouvilleImage<T>> {
    liouville_transform_with(p, LIOUVILLE_NODES)
}

pub fn liouville_transform_with<T: Real>(p: &Profile<T>, nodes: usize) -> Result<LiouvilleImage<T>> {
    require_rho(p)?;
    if p.regularity != Regularity::C1 {
        return Err(Error::NotSmooth);
    }
    let nodes = nodes.max(LIOUVILLE_NODES);
    let mut y_breaks = Vec::with_capacity(p.pieces.len() + 1);
    y_breaks.push(T::zero());
    for i in 0..p.pieces.len() {
        let prev = *y_breaks.last().expect("non-empty");
        y_breaks.push(prev + piece_travel(p, i, p.pieces[i].x1)?);
    }
    let a = *y_breaks.last().expect("non-empty");

    // (y, x, owning piece) for every node; breakpoints appear once per adjacent piece side.
    let mut grid: Vec<(T, T, usize)> = Vec::with_capacity(nodes + 2 * p.pieces.len());
    for i in 0..p.pieces.len() {
        let (y0, y1) = (y_breaks[i], y_breaks[i + 1]);
        grid.push((y0, p.pieces[i].x0, i));
        let k0 = (y0 / a * T::of_usize(nodes)).floor().to_usize().unwrap_or(0) + 1;
        let mut k = k0;
        loop {
            let y = a * T::of_usize(k) / T::of_usize(nodes);
            if y >= y1 - T::epsilon() * a * T::lit(16.0) {
                break;
            }
            if y > y0 + T::epsilon() * a * T::lit(16.0) {
                grid.push((y, invert_in_piece(p, i, y0, y)?, i));
            }
            k += 1;
        }
        grid.push((y1, p.pieces[i].x1, i));
    }

    let mut q_pieces = Vec::with_capacity(grid.len());
    for w in grid.windows(2) {
        let ((ya, xa, ia), (yb, xb, ib)) = (w[0], w[1]);
        if ia != ib {
            continue;
        }
        let piece = &p.pieces[ia];
        let (qa, da) = liouville_potential(piece.jet(xa));
        let (qb, db) = liouville_potential(piece.jet(xb));
        q_pieces.push(Piece { x0: ya, x1: yb, coeffs: hermite_coeffs(yb - ya, qa, qb, da, db) });
    }
    let q = Profile::new(ProfileKind::SchrodingerPotential, Regularity::Piecewise, q_pieces, format!("liouville({})", p.name))?;

    let mut y_of_x: Vec<(T, T)> = grid.iter().map(|&(y, x, _)| (x, y)).collect();
    y_of_x.dedup_by(|n, m| n.0 == m.0);
    let x_of_y = y_of_x.iter().map(|&(x, y)| (y, x)).collect();
    Ok(LiouvilleImage {
        a,
        y_of_x,
        x_of_y,
        q,
        phi0_scale: p.eval(T::zero()).powf(T::lit(-0.25)),
        rho: p.clone(),
        y_breaks,
    })
}

/// JSON form of a profile; coefficients are in the local variable `x − x0`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileJson {
    pub b: f64,
    pub kind: ProfileKind,
    pub pieces: Vec<PieceJson>,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "is_c1")]
    pub regularity: Regularity,
}

fn is_c1(r: &Regularity) -> bool {
    *r == Regularity::C1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PieceJson {
    pub x0: f64,
    pub x1: f64,
    pub coeffs: Vec<f64>,
}

impl<T: Real> Profile<T> {
    pub fn from_json(json: &ProfileJson) -> Result<Self> {
        let mut pieces = Vec::with_capacity(json.pieces.len());
        for (i, pj) in json.pieces.iter().enumerate() {
            if pj.coeffs.is_empty() || pj.coeffs.len() > 4 {
                return Err(Error::Schema(format!("piece {i}: expected 1 to 4 coefficients")));
            }
            let mut coeffs = [T::zero(); 4];
            for (k, &c) in pj.coeffs.iter().enumerate() {
                coeffs[k] = T::lit(c);
            }
            pieces.push(Piece { x0: T::lit(pj.x0), x1: T::lit(pj.x1), coeffs });
        }
        let profile = Self::new(json.kind, json.regularity, pieces, json.name.clone())?;
        if (profile.b.to_f64().unwrap_or(f64::NAN) - json.b).abs() > 1e-12 * json.b.abs().max(1.0) {
            return Err(Error::Schema(format!("b = {} disagrees with last breakpoint {}", json.b, profile.b)));
        }
        Ok(profile)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: ProfileJson = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> ProfileJson {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        ProfileJson {
            b: f(self.b),
            kind: self.kind,
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceJson { x0: f(p.x0), x1: f(p.x1), coeffs: p.coeffs.iter().map(|&c| f(c)).collect() })
                .collect(),
            name: self.name.clone(),
            regularity: self.regularity,
        }
    }
}
