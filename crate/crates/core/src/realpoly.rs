//! Real-coefficient polynomials: arithmetic, root finding and multiplicity
//! detection.
//!
//! Slice preserving polynomials are exactly the polynomials with real
//! coefficients, so the divisor and rational-function code works on this
//! type. Roots come from companion-matrix eigenvalues (after balancing);
//! multiplicities from grouping eigenvalues under a backward error test.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Relative backward error `|p(w)| / Σ|a_k||w|^k` accepted when deflating a
/// factor.
pub const DEFLATION_TOLERANCE: f64 = 1e-10;
/// Spheres closer than this in `(x, y)` are the same sphere.
pub const MERGE_TOLERANCE: f64 = 1e-8;

/// A polynomial `a_0 + a_1 q + ... + a_n q^n` with real coefficients.
/// Trailing zero coefficients are stripped, so the zero polynomial has no
/// coefficients at all.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealPoly {
    coeffs: Vec<f64>,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The identity function `q`.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::new(c)
    }

    /// `q - b`.
    pub fn linear(b: f64) -> Self {
        Self::new(vec![-b, 1.0])
    }

    /// `(q - x)^2 + y^2`, the characteristic polynomial of the sphere `[x + yS]`.
    pub fn sphere_factor(x: f64, y: f64) -> Self {
        Self::new(vec![x * x + y * y, -2.0 * x, 1.0])
    }

    /// The monic factor vanishing exactly on `[x + yS]` (linear when `y = 0`).
    pub fn factor_for(x: f64, y: f64) -> Self {
        if y == 0.0 {
            Self::linear(x)
        } else {
            Self::sphere_factor(x, y)
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Evaluation at a quaternion; real coefficients commute with `q`.
    pub fn eval_quaternion(&self, q: Quaternion) -> Quaternion {
        self.coeffs.iter().rev().fold(Quaternion::ZERO, |acc, &c| acc * q + Quaternion::real(c))
    }

    /// `Σ |a_k| r^k`, the natural scale of `p(z)` for `|z| = r`.
    pub fn abs_scale(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(n, c)| n as f64 * c).collect())
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Number of exactly-zero low coefficients, i.e. the multiplicity of the
    /// root at the origin before any rounding enters.
    pub fn low_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| **c == 0.0).count()
    }

    /// Drops `n` low coefficients (division by `q^n`, assumed exact).
    pub fn shift_down(&self, n: usize) -> Self {
        Self::new(self.coeffs.iter().skip(n).copied().collect())
    }

    /// Coefficients of `t ↦ p(t + s)`.
    pub fn taylor_shift(&self, s: f64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                c[k] += s * c[k + 1];
            }
        }
        Self::new(c)
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn div_rem(&self, d: &RealPoly) -> Result<(RealPoly, RealPoly)> {
        let dd = d.degree().ok_or(Error::ZeroDivision)?;
        let Some(n) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if n < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![0.0; n - dd + 1];
        let lead = d.leading();
        for k in (0..=n - dd).rev() {
            let t = r[k + dd] / lead;
            q[k] = t;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= t * dc;
            }
            r[k + dd] = 0.0;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Quotient of a division expected to be exact, such as removing a known
    /// factor. Top-down division loses accuracy in the low coefficients
    /// when `d` has large roots, bottom-up division in the high ones; the
    /// result splices the two at the index with the smallest coefficientwise
    /// relative residual.
    pub fn exact_quotient(&self, d: &RealPoly) -> Result<RealPoly> {
        let dd = d.degree().ok_or(Error::ZeroDivision)?;
        let forward = self.div_rem(d)?.0;
        let (Some(n), true) = (self.degree(), d.coeffs[0] != 0.0) else {
            return Ok(forward);
        };
        if n < dd {
            return Ok(forward);
        }
        let len = n - dd + 1;
        let mut backward = vec![0.0; len];
        for k in 0..len {
            let mut acc = self.coeffs[k];
            for i in 1..=dd.min(k) {
                acc -= d.coeffs[i] * backward[k - i];
            }
            backward[k] = acc / d.coeffs[0];
        }
        let floor = 1e-16 * self.max_abs_coeff();
        let score = |q: &[f64]| {
            let prod = &Self::new(q.to_vec()) * d;
            (0..=n)
                .map(|k| (prod.coeff(k) - self.coeffs[k]).abs() / self.coeffs[k].abs().max(floor))
                .fold(0.0, f64::max)
        };
        let mut best = (f64::INFINITY, Vec::new());
        for split in 0..=len {
            let q: Vec<f64> = (0..len).map(|k| if k < split { backward[k] } else { forward.coeff(k) }).collect();
            let sc = score(&q);
            if sc < best.0 {
                best = (sc, q);
            }
        }
        Ok(Self::new(best.1))
    }

    /// Divides by `q - x`, returning the quotient and the remainder `p(x)`.
    pub fn deflate_linear(&self, x: f64) -> (RealPoly, f64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (Self::zero(), 0.0);
        }
        let mut q = vec![0.0; n - 1];
        let mut acc = self.coeffs[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = acc;
            acc = acc * x + self.coeffs[k];
        }
        (Self::new(q), acc)
    }

    /// Divides by `(q - x)^2 + y^2`.
    pub fn deflate_sphere(&self, x: f64, y: f64) -> RealPoly {
        // the divisor is nonzero so div_rem cannot fail
        self.div_rem(&Self::sphere_factor(x, y)).map(|(q, _)| q).unwrap_or_default()
    }

    /// `|p(w)| / Σ|a_k||w|^k` at `w = x + iy`.
    pub fn relative_residual(&self, x: f64, y: f64) -> f64 {
        let w = Complex64::new(x, y);
        let scale = self.abs_scale(w.norm());
        if scale == 0.0 {
            return 0.0;
        }
        self.eval_complex(w).norm() / scale
    }

    /// Order of vanishing on `[x + yS]` detected by repeated deflation: the
    /// factor is removed while the relative residual stays within `tol`.
    pub fn multiplicity_at(&self, x: f64, y: f64, tol: f64) -> u32 {
        let mut cur = self.clone();
        let mut count = 0;
        if x == 0.0 && y == 0.0 {
            let z = cur.low_zeros();
            count += z as u32;
            cur = cur.shift_down(z);
        }
        let step = if y == 0.0 { 1 } else { 2 };
        while cur.degree().is_some_and(|d| d >= step) {
            if cur.relative_residual(x, y) > tol {
                break;
            }
            cur = cur.exact_quotient(&Self::factor_for(x, y)).unwrap_or_default();
            count += 1;
        }
        count
    }

    /// Complex roots of `p` (with multiplicity), from the eigenvalues of the
    /// balanced companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree().ok_or(Error::ZeroFunction)?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let lead = self.leading();
        let mut m = Hessenberg::zeros(n);
        for i in 1..n {
            m.set(i, i - 1, 1.0);
        }
        for i in 0..n {
            m.set(i, n - 1, -self.coeffs[i] / lead);
        }
        m.balance();
        m.eigenvalues().ok_or_else(|| Error::InvalidParameter("companion eigenvalue iteration did not converge".into()))
    }

    /// Groups the roots into real points and conjugate-symmetric spheres
    /// with multiplicities.
    ///
    /// A root of multiplicity `k` shows up as a small cloud of `k`
    /// eigenvalues. Nearby eigenvalues are merged agglomeratively, and a
    /// merge is kept only if replacing the group by a single multiple factor
    /// leaves the backward error of the factorization at roundoff level.
    /// The resulting multiplicity structure is then refined by Gauss–Newton
    /// on the coefficients, where multiple roots are well conditioned.
    pub fn root_spheres(&self) -> Result<Vec<RootSphere>> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let zeros = self.low_zeros();
        let base = self.shift_down(zeros);
        let mut found = Vec::new();
        if let Some(n) = base.degree().filter(|&n| n > 0) {
            // rescale q = s·u so that the roots have unit geometric mean
            let s = (base.coeffs[0] / base.coeffs[n]).abs().powf(1.0 / n as f64);
            let mut scaled: Vec<f64> = base.coeffs.iter().enumerate().map(|(k, c)| c * s.powi(k as i32)).collect();
            let top = scaled.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            scaled.iter_mut().for_each(|c| *c /= top);
            let ps = RealPoly::new(scaled);
            let mut groups = group_roots(&ps, &ps.roots()?);
            structured_refine(&ps, &RealPoly::one(), &mut groups);
            found.extend(groups.into_iter().map(|(x, y, mult)| RootSphere { x: x * s, y: y * s, mult }));
        }
        if zeros > 0 {
            found.push(RootSphere { x: 0.0, y: 0.0, mult: zeros as u32 });
        }
        found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        Ok(found)
    }
}

/// A real root (`y = 0`) or a sphere `[x + yS]` of non-real roots, with the
/// multiplicity of the corresponding factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSphere {
    pub x: f64,
    pub y: f64,
    pub mult: u32,
}

impl RootSphere {
    pub fn matches(&self, x: f64, y: f64, tol: f64) -> bool {
        (self.x - x).abs() <= tol * self.x.abs().max(1.0) && (self.y - y).abs() <= tol * self.y.abs().max(1.0)
    }

    /// Degree contributed by this factor.
    pub fn degree(&self) -> usize {
        let d = if self.y == 0.0 { 1 } else { 2 };
        d * self.mult as usize
    }
}

/// Backward error (max coefficient deviation, `p` normalized to unit max
/// coefficient) tolerated when a group of eigenvalues is replaced by one
/// multiple factor.
const GROUPING_TOLERANCE: f64 = 1e-10;
/// Groups farther apart than this (in rescaled coordinates) are never merged.
const GROUPING_GAP: f64 = 0.5;
/// Eigenvalue clouds within this distance of the real axis may be a real root.
const NEAR_AXIS: f64 = 1e-3;

/// One eigenvalue folded into the closed upper half plane.
#[derive(Clone, Copy)]
struct Folded {
    z: Complex64,
    real: bool,
}

impl Folded {
    fn degree(&self) -> usize {
        if self.real {
            1
        } else {
            2
        }
    }
}

/// A candidate multiple factor for a group of eigenvalues.
fn candidate(members: &[Folded], as_real: bool) -> (f64, f64, u32) {
    let degree: usize = members.iter().map(Folded::degree).sum();
    if as_real {
        let x = members.iter().map(|m| m.z.re * m.degree() as f64).sum::<f64>() / degree as f64;
        (x, 0.0, degree as u32)
    } else {
        let c = members.iter().map(|m| m.z).sum::<Complex64>() / members.len() as f64;
        (c.re, c.im.abs(), (degree / 2) as u32)
    }
}

fn structure_residual(p: &RealPoly, structure: &[(f64, f64, u32)]) -> f64 {
    let f = structure
        .iter()
        .fold(RealPoly::constant(p.leading()), |acc, &(x, y, m)| &acc * &RealPoly::factor_for(x, y).pow(m));
    (0..=p.degree().unwrap_or(0)).map(|k| (f.coeff(k) - p.coeff(k)).abs()).fold(0.0, f64::max)
}

/// Eigenvalue indices of a cluster and the `(x, y, mult)` factor fitted to it.
type Group = (Vec<usize>, (f64, f64, u32));

/// Chooses the multiplicity structure of the eigenvalues `roots` of `p`.
fn group_roots(p: &RealPoly, roots: &[Complex64]) -> Vec<(f64, f64, u32)> {
    let folded: Vec<Folded> = roots.iter().filter(|z| z.im >= 0.0).map(|&z| Folded { z, real: z.im == 0.0 }).collect();
    let mut groups: Vec<Group> =
        folded.iter().enumerate().map(|(i, f)| (vec![i], (f.z.re, if f.real { 0.0 } else { f.z.im }, 1))).collect();
    // Refits the structure with `members` fused into one factor and returns
    // it when the backward error stays within tolerance, trying a real root
    // before a sphere.
    let settle = |groups: &[Group], comp: &[usize], members: &[usize]| {
        let pts: Vec<Folded> = members.iter().map(|&i| folded[i]).collect();
        let others: Vec<(f64, f64, u32)> =
            (0..groups.len()).filter(|g| !comp.contains(g)).map(|g| groups[g].1).collect();
        let others_before = others.clone();
        let fit = |as_real: bool| {
            let start = candidate(&pts, as_real);
            let c0 = Complex64::new(start.0, start.1);
            let radius = pts.iter().map(|f| (f.z - c0).norm()).fold(0.0, f64::max);
            let mut structure = others.clone();
            structure.push(start);
            structured_refine(p, &RealPoly::one(), &mut structure);
            let (x, y, _) = structure[structure.len() - 1];
            let stayed = (Complex64::new(x, y) - c0).norm() <= 2.0 * radius + 1e-6
                && structure
                    .iter()
                    .zip(&others_before)
                    .all(|(a, b)| (a.0 - b.0).hypot(a.1 - b.1) <= GROUPING_GAP / 4.0);
            (stayed && structure_residual(p, &structure) <= GROUPING_TOLERANCE).then_some(structure)
        };
        let spread = pts.iter().map(|f| f.z.re).fold(f64::NEG_INFINITY, f64::max)
            - pts.iter().map(|f| f.z.re).fold(f64::INFINITY, f64::min);
        let reaches_axis = pts.iter().all(|f| f.z.im <= spread.max(NEAR_AXIS));
        let real = if reaches_axis { fit(true) } else { None };
        real.or_else(|| if pts.iter().any(|f| f.real) { None } else { fit(false) })
    };
    let mut rejected: Vec<Vec<usize>> = Vec::new();
    'merging: loop {
        let k = groups.len();
        let mut gaps: Vec<(f64, usize, usize)> = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                let gap = groups[a]
                    .0
                    .iter()
                    .flat_map(|&i| groups[b].0.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| (folded[i].z - folded[j].z).norm())
                    .fold(f64::INFINITY, f64::min);
                if gap <= GROUPING_GAP {
                    gaps.push((gap, a, b));
                }
            }
        }
        gaps.sort_by(|l, r| l.0.total_cmp(&r.0));
        // single-linkage components at each successive threshold
        let mut parent: Vec<usize> = (0..k).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(_, a, b) in &gaps {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                continue;
            }
            parent[rb] = ra;
            let comp: Vec<usize> = (0..k).filter(|&g| root(&mut parent, g) == ra).collect();
            let mut members: Vec<usize> = comp.iter().flat_map(|&g| groups[g].0.iter().copied()).collect();
            members.sort_unstable();
            if rejected.contains(&members) {
                continue;
            }
            match settle(&groups, &comp, &members) {
                Some(structure) => {
                    let mut next: Vec<Group> = Vec::new();
                    let mut fitted = structure.into_iter();
                    for (g, group) in groups.iter().enumerate() {
                        if !comp.contains(&g) {
                            next.push((group.0.clone(), fitted.next().unwrap_or(group.1)));
                        }
                    }
                    next.push((members, fitted.next().unwrap_or((0.0, 0.0, 0))));
                    groups = next;
                    rejected.clear();
                    continue 'merging;
                }
                None => rejected.push(members),
            }
        }
        // isolated conjugate pairs that are really double real roots
        for g in 0..groups.len() {
            let (members, (_, y, _)) = &groups[g];
            if members.len() == 1 && *y > 0.0 && !rejected.contains(members) {
                let members = members.clone();
                match settle(&groups, &[g], &members) {
                    Some(structure) if structure.last().is_some_and(|f| f.1 == 0.0) => {
                        let mut next: Vec<Group> = Vec::new();
                        let mut fitted = structure.into_iter();
                        for (h, group) in groups.iter().enumerate() {
                            if h != g {
                                next.push((group.0.clone(), fitted.next().unwrap_or(group.1)));
                            }
                        }
                        next.push((members, fitted.next().unwrap_or((0.0, 0.0, 0))));
                        groups = next;
                        rejected.clear();
                        continue 'merging;
                    }
                    _ => rejected.push(members),
                }
            }
        }
        break;
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Gauss–Newton refinement of root positions with the multiplicity
/// structure held fixed: minimizes the weighted coefficient residual of
/// `lead · cofactor · Π f_i^{m_i} - p`, where each `f_i` is `q - x` or `q^2 + b q + c`.
/// Multiple roots are well conditioned on this structured manifold even
/// though they are not as plain eigenvalues.
fn structured_refine(p: &RealPoly, cofactor: &RealPoly, roots: &mut [(f64, f64, u32)]) {
    let Some(n) = p.degree() else { return };
    if roots.is_empty() || n == 0 {
        return;
    }
    let lead = cofactor.scale(p.leading() / cofactor.leading());
    let weights: Vec<f64> = p.coeffs[..n].iter().map(|c| 1.0 / c.abs().max(1.0)).collect();
    // parameters: x for real roots, (b, c) for spheres
    let mut params: Vec<Vec<f64>> =
        roots.iter().map(|&(x, y, _)| if y == 0.0 { vec![x] } else { vec![-2.0 * x, x * x + y * y] }).collect();
    let mults: Vec<u32> = roots.iter().map(|r| r.2).collect();
    let factor = |th: &[f64]| -> RealPoly {
        if th.len() == 1 {
            RealPoly::new(vec![-th[0], 1.0])
        } else {
            RealPoly::new(vec![th[1], th[0], 1.0])
        }
    };
    let residual = |params: &[Vec<f64>]| -> (Vec<f64>, f64) {
        let f = params.iter().zip(&mults).fold(lead.clone(), |acc, (th, &m)| &acc * &factor(th).pow(m));
        let r: Vec<f64> = (0..n).map(|k| (f.coeff(k) - p.coeff(k)) * weights[k]).collect();
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        (r, norm)
    };
    let (mut r, mut rnorm) = residual(&params);
    for _ in 0..40 {
        if rnorm == 0.0 {
            break;
        }
        let factors: Vec<RealPoly> = params.iter().map(|th| factor(th)).collect();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for i in 0..params.len() {
            // lead · m_i · f_i^{m_i - 1} · Π_{j≠i} f_j^{m_j}
            let mut h = lead.scale(mults[i] as f64);
            for (j, fj) in factors.iter().enumerate() {
                let e = if j == i { mults[j] - 1 } else { mults[j] };
                h = &h * &fj.pow(e);
            }
            if params[i].len() == 1 {
                let col = h.scale(-1.0);
                cols.push((0..n).map(|k| col.coeff(k) * weights[k]).collect());
            } else {
                let col_b = &h * &RealPoly::identity();
                cols.push((0..n).map(|k| col_b.coeff(k) * weights[k]).collect());
                cols.push((0..n).map(|k| h.coeff(k) * weights[k]).collect());
            }
        }
        let col_norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        // Levenberg–Marquardt: plain Gauss–Newton first, then damped steps
        let mut improved = None;
        let mut damping = 0.0f64;
        while damping <= 1e6 {
            let k = cols.len();
            let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
            let mut aug = cols.clone();
            if damping > 0.0 {
                rhs.extend(std::iter::repeat_n(0.0, k));
                for (j, col) in aug.iter_mut().enumerate() {
                    col.extend((0..k).map(|i| if i == j { damping.sqrt() * col_norms[j] } else { 0.0 }));
                }
            }
            damping = if damping == 0.0 { 1e-10 } else { damping * 100.0 };
            let Some(step) = least_squares(&aug, &rhs) else { continue };
            let mut cand = params.clone();
            let mut idx = 0;
            for th in cand.iter_mut() {
                for t in th.iter_mut() {
                    *t += step[idx];
                    idx += 1;
                }
            }
            if cand.iter().any(|th| th.len() == 2 && th[1] - th[0] * th[0] / 4.0 <= 0.0) {
                continue;
            }
            let (rc, rcn) = residual(&cand);
            if rcn < rnorm {
                let small = step.iter().map(|v| v.abs()).fold(0.0, f64::max) <= 1e-15;
                improved = Some((cand, rc, rcn, small));
                break;
            }
        }
        let Some((cand, rc, rcn, small)) = improved else { break };
        params = cand;
        r = rc;
        rnorm = rcn;
        if small {
            break;
        }
    }
    for (root, th) in roots.iter_mut().zip(&params) {
        if th.len() == 1 {
            root.0 = th[0];
        } else {
            root.0 = -th[0] / 2.0;
            root.1 = (th[1] - th[0] * th[0] / 4.0).sqrt();
        }
    }
}

/// Least-squares solution of `A x = b` by Householder QR; `A` is given by
/// columns. `None` when `A` is rank deficient.
fn least_squares(cols: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let k = cols.len();
    if k == 0 || m < k {
        return None;
    }
    let mut a: Vec<Vec<f64>> = cols.to_vec();
    let mut rhs = b.to_vec();
    for j in 0..k {
        let norm = (j..m).map(|i| a[j][i] * a[j][i]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..m).map(|i| a[j][i]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j) {
            let d: f64 = v.iter().zip(&col[j..]).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
            for (t, vi) in col[j..].iter_mut().zip(&v) {
                *t -= d * vi;
            }
        }
        let d: f64 = v.iter().zip(&rhs[j..]).map(|(a, b)| a * b).sum::<f64>() * 2.0 / vnorm2;
        for (t, vi) in rhs[j..].iter_mut().zip(&v) {
            *t -= d * vi;
        }
    }
    let mut x = vec![0.0; k];
    for j in (0..k).rev() {
        let diag = a[j][j];
        if diag.abs() <= 1e-300 {
            return None;
        }
        let s: f64 = (j + 1..k).map(|c| a[c][j] * x[c]).sum();
        x[j] = (rhs[j] - s) / diag;
    }
    Some(x)
}

/// Dense square matrix in upper Hessenberg form, stored 1-based to keep the
/// QR sweep indices readable.
struct Hessenberg {
    n: usize,
    a: Vec<f64>,
}

impl Hessenberg {
    fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; (n + 1) * (n + 1)] }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.n + 1) + j]
    }

    /// 0-based setter.
    fn set(&mut self, i: usize, j: usize, v: f64) {
        *self.at_mut(i + 1, j + 1) = v;
    }

    /// Parlett–Reinsch balancing, radix 2.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        const SQRDX: f64 = RADIX * RADIX;
        let n = self.n;
        loop {
            let mut done = true;
            for i in 1..=n {
                let mut r = 0.0;
                let mut c = 0.0;
                for j in 1..=n {
                    if j != i {
                        c += self.at(j, i).abs();
                        r += self.at(i, j).abs();
                    }
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= SQRDX;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= SQRDX;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 1..=n {
                        *self.at_mut(i, j) *= ginv;
                        *self.at_mut(j, i) *= f;
                    }
                }
            }
            if done {
                break;
            }
        }
    }

    /// All eigenvalues by the shifted double-step QR iteration; `None` if an
    /// eigenvalue fails to converge within the iteration cap.
    fn eigenvalues(mut self) -> Option<Vec<Complex64>> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut anorm = 0.0;
        for i in 1..=n {
            for j in i.saturating_sub(1).max(1)..=n {
                anorm += self.at(i, j).abs();
            }
        }
        let mut nn = n;
        let mut t = 0.0;
        let (mut p, mut q, mut r): (f64, f64, f64);
        let (mut x, mut y, mut z, mut w);
        while nn >= 1 {
            let mut its = 0;
            loop {
                let mut l = nn;
                while l >= 2 {
                    let mut s = self.at(l - 1, l - 1).abs() + self.at(l, l).abs();
                    if s == 0.0 {
                        s = anorm;
                    }
                    if self.at(l, l - 1).abs() + s == s {
                        *self.at_mut(l, l - 1) = 0.0;
                        break;
                    }
                    l -= 1;
                }
                x = self.at(nn, nn);
                if l == nn {
                    out[nn] = Complex64::new(x + t, 0.0);
                    nn -= 1;
                    break;
                }
                y = self.at(nn - 1, nn - 1);
                w = self.at(nn, nn - 1) * self.at(nn - 1, nn);
                if l == nn - 1 {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        let hi = x + z;
                        let lo = if z != 0.0 { x - w / z } else { hi };
                        out[nn - 1] = Complex64::new(hi, 0.0);
                        out[nn] = Complex64::new(lo, 0.0);
                    } else {
                        out[nn - 1] = Complex64::new(x + p, -z);
                        out[nn] = Complex64::new(x + p, z);
                    }
                    nn -= 2;
                    break;
                }
                if its == 300 {
                    return None;
                }
                if its % 10 == 0 && its > 0 {
                    // exceptional shift
                    t += x;
                    for i in 1..=nn {
                        *self.at_mut(i, i) -= x;
                    }
                    let s = self.at(nn, nn - 1).abs() + self.at(nn - 1, nn - 2).abs();
                    x = 0.75 * s;
                    y = x;
                    w = -0.4375 * s * s;
                }
                its += 1;
                let mut m = nn - 2;
                loop {
                    z = self.at(m, m);
                    let rr = x - z;
                    let ss = y - z;
                    p = (rr * ss - w) / self.at(m + 1, m) + self.at(m, m + 1);
                    q = self.at(m + 1, m + 1) - z - rr - ss;
                    r = self.at(m + 2, m + 1);
                    let s = p.abs() + q.abs() + r.abs();
                    p /= s;
                    q /= s;
                    r /= s;
                    if m == l {
                        break;
                    }
                    let u = self.at(m, m - 1).abs() * (q.abs() + r.abs());
                    let v = p.abs() * (self.at(m - 1, m - 1).abs() + z.abs() + self.at(m + 1, m + 1).abs());
                    if u + v == v {
                        break;
                    }
                    m -= 1;
                }
                for i in m + 2..=nn {
                    *self.at_mut(i, i - 2) = 0.0;
                    if i != m + 2 {
                        *self.at_mut(i, i - 3) = 0.0;
                    }
                }
                let mut k = m;
                while k < nn {
                    if k != m {
                        p = self.at(k, k - 1);
                        q = self.at(k + 1, k - 1);
                        r = if k != nn - 1 { self.at(k + 2, k - 1) } else { 0.0 };
                        x = p.abs() + q.abs() + r.abs();
                        if x != 0.0 {
                            p /= x;
                            q /= x;
                            r /= x;
                        }
                    }
                    let s = (p * p + q * q + r * r).sqrt().copysign(p);
                    if s != 0.0 {
                        if k == m {
                            if l != m {
                                *self.at_mut(k, k - 1) = -self.at(k, k - 1);
                            }
                        } else {
                            *self.at_mut(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for j in k..=nn {
                            p = self.at(k, j) + q * self.at(k + 1, j);
                            if k != nn - 1 {
                                p += r * self.at(k + 2, j);
                                *self.at_mut(k + 2, j) -= p * z;
                            }
                            *self.at_mut(k + 1, j) -= p * y;
                            *self.at_mut(k, j) -= p * x;
                        }
                        let mmin = nn.min(k + 3);
                        for i in l..=mmin {
                            p = x * self.at(i, k) + y * self.at(i, k + 1);
                            if k != nn - 1 {
                                p += z * self.at(i, k + 2);
                                *self.at_mut(i, k + 2) -= p * r;
                            }
                            *self.at_mut(i, k + 1) -= p * q;
                            *self.at_mut(i, k) -= p;
                        }
                    }
                    k += 1;
                }
                if l >= nn - 1 {
                    break;
                }
            }
        }
        out.remove(0);
        Some(out)
    }
}

impl fmt::Display for RealPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}q")?,
                _ => write!(f, "{c}q^{n}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, o: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, o: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RealPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, o: &RealPoly) -> RealPoly {
        if self.is_zero() || o.is_zero() {
            return RealPoly::zero();
        }
        let mut c = vec![0.0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RealPoly::new(c)
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RealPoly {
            type Output = RealPoly;
            fn $m(self, o: RealPoly) -> RealPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn from_spheres(spheres: &[(f64, f64, u32)]) -> RealPoly {
        spheres.iter().fold(RealPoly::one(), |acc, &(x, y, m)| &acc * &RealPoly::factor_for(x, y).pow(m))
    }

    #[test]
    fn arithmetic_basics() {
        let p = RealPoly::new(vec![1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(RealPoly::zero().degree(), None);
        let a = RealPoly::linear(2.0);
        let b = RealPoly::linear(-2.0);
        assert_eq!((&a * &b).coeffs(), &[-4.0, 0.0, 1.0]);
        let (q, r) = (&a * &b).div_rem(&a).unwrap();
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(a.div_rem(&RealPoly::zero()), Err(Error::ZeroDivision));
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = RealPoly::new(vec![1.0, -3.0, 0.5, 2.0]);
        let s = p.taylor_shift(1.5);
        for t in [-1.0, 0.0, 0.3, 2.0] {
            assert!((s.eval(t) - p.eval(t + 1.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_quotient_keeps_small_coefficients() {
        // (q - 40)(q - 0.01)(q - 0.02): forward division by (q - 40) smears
        // rounding from the leading terms into the tiny constant term.
        let small = from_spheres(&[(0.01, 0.0, 1), (0.02, 0.0, 1)]);
        let big = RealPoly::factor_for(40.0, 0.0);
        let p = &small * &big;
        let q = p.exact_quotient(&big).unwrap();
        for (a, b) in q.coeffs().iter().zip(small.coeffs()) {
            assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300), "{q:?} vs {small:?}");
        }
        let d = RealPoly::factor_for(0.5, 1.5);
        let p = &from_spheres(&[(2.0, 0.0, 2), (-1.0, 0.5, 1)]) * &d;
        let exact = p.div_rem(&d).unwrap().0;
        let q = p.exact_quotient(&d).unwrap();
        for (a, b) in q.coeffs().iter().zip(exact.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(p.exact_quotient(&RealPoly::zero()).is_err());
    }

    #[test]
    fn deflation_counts_multiplicity() {
        let p = from_spheres(&[(3.0, 0.0, 8), (1.0, 0.0, 2), (0.0, 1.0, 3)]);
        assert_eq!(p.multiplicity_at(3.0, 0.0, DEFLATION_TOLERANCE), 8);
        assert_eq!(p.multiplicity_at(1.0, 0.0, DEFLATION_TOLERANCE), 2);
        assert_eq!(p.multiplicity_at(0.0, 1.0, DEFLATION_TOLERANCE), 3);
        assert_eq!(p.multiplicity_at(2.0, 0.0, DEFLATION_TOLERANCE), 0);
        assert_eq!(p.multiplicity_at(0.0, 0.0, DEFLATION_TOLERANCE), 0);
    }

    #[test]
    fn roots_of_cubic() {
        // q^3 - q = q(q - 1)(q + 1)
        let p = RealPoly::new(vec![0.0, -1.0, 0.0, 1.0]);
        let s = p.root_spheres().unwrap();
        let got: Vec<(f64, f64, u32)> = s.iter().map(|r| (r.x, r.y, r.mult)).collect();
        assert_eq!(got.len(), 3);
        for (want, have) in [(-1.0, 0.0, 1), (0.0, 0.0, 1), (1.0, 0.0, 1)].iter().zip(&got) {
            assert!((want.0 - have.0).abs() < 1e-12 && have.1 == 0.0 && want.2 == have.2);
        }
    }

    #[test]
    fn multiple_roots_are_clustered() {
        let spec = [(-2.0, 0.0, 3), (0.5, 1.25, 3), (1.5, 0.0, 2), (-0.75, 2.0, 1), (2.5, 0.5, 2)];
        let p = from_spheres(&spec);
        let s = p.root_spheres().unwrap();
        assert_eq!(s.len(), spec.len(), "{s:?}");
        for &(x, y, m) in &spec {
            let hit = s.iter().find(|r| (r.x - x).abs() < 1e-8 && (r.y - y).abs() < 1e-8);
            assert_eq!(hit.map(|r| r.mult), Some(m), "{x} {y} in {s:?}");
        }
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert_eq!(RealPoly::zero().root_spheres(), Err(Error::ZeroFunction));
        assert!(RealPoly::constant(5.0).root_spheres().unwrap().is_empty());
    }
}
