//! Changes of variables between moving and fixed domains.
//!
//! * Straightening: `y = (x - ξ1(t)) / (R(t) - ξ1(t))` where the right end
//!   `R` is either a fixed split point `X` or `ξ2(t)`. The new unknown
//!   `w(y, t) = u(φ(y, t), t)` solves `w_t = ã w_yy + b̃ w_y + c̃ w` with
//!   `ã = a / L²`, `b̃ = (ξ1'(1 - y) + R' y + b) / L`, `c̃ = c`, `L = R - ξ1`.
//! * Diffusion normalization on a fixed interval: `α(t) = ∫ a^{-1/2} dz`,
//!   `y = α^{-1} ∫_{ξ1}^x a^{-1/2} dz`, `s = ∫_0^t α^{-2}`, after which the
//!   equation has unit diffusion in `(y, s)`.
//! * Regularization of the radial drift `(N-1)/r` at the origin.

use crate::error::{invalid, LabError, Result};
use crate::model::{CoefficientField, MovingDomain, Profile, Side, TimeFunction};

/// Right end of a straightened frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RightEnd {
    /// Fixed split point `X`; only the left side moves.
    Split(f64),
    /// The domain's own right endpoint `ξ2(t)`.
    Moving,
}

/// A problem pulled back to the reference interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct TransformedProblem {
    field: CoefficientField,
    domain: MovingDomain,
    right: RightEnd,
    deriv_step: f64,
}

/// Default step for centered differences of endpoint curves.
pub const ENDPOINT_STEP: f64 = 1e-6;

impl TransformedProblem {
    /// Identity-like frame for a fixed interval `[x0, x1]`.
    pub fn fixed(field: &CoefficientField, x0: f64, x1: f64) -> Self {
        TransformedProblem {
            field: field.clone(),
            domain: MovingDomain::fixed(x0, x1),
            right: RightEnd::Moving,
            deriv_step: ENDPOINT_STEP,
        }
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn domain(&self) -> &MovingDomain {
        &self.domain
    }

    pub fn right_end(&self) -> RightEnd {
        self.right
    }

    /// `(ξ1(t), R(t))`
    pub fn ends(&self, t: f64) -> (f64, f64) {
        let l = self.domain.left.eval(t);
        let r = match self.right {
            RightEnd::Split(x) => x,
            RightEnd::Moving => self.domain.right.eval(t),
        };
        (l, r)
    }

    /// `∂x/∂y = R(t) - ξ1(t)`
    pub fn jacobian(&self, t: f64) -> f64 {
        let (l, r) = self.ends(t);
        r - l
    }

    /// `φ(y, t)`
    #[inline]
    pub fn forward(&self, y: f64, t: f64) -> f64 {
        let (l, r) = self.ends(t);
        l + (r - l) * y
    }

    #[inline]
    pub fn inverse(&self, x: f64, t: f64) -> f64 {
        let (l, r) = self.ends(t);
        (x - l) / (r - l)
    }

    /// Endpoint velocities `(ξ1'(t), R'(t))`.
    pub fn frame_velocities(&self, t: f64) -> Result<(f64, f64)> {
        let v = |side: Side, f: &TimeFunction| -> Result<f64> {
            if f.is_constant() {
                Ok(0.0)
            } else {
                self.domain.velocity(side, t, self.deriv_step)
            }
        };
        let vl = v(Side::Left, &self.domain.left)?;
        let vr = match self.right {
            RightEnd::Split(_) => 0.0,
            RightEnd::Moving => v(Side::Right, &self.domain.right)?,
        };
        Ok((vl, vr))
    }

    /// `(ã, b̃, c̃)` at `(y, t)`.
    pub fn coefficients(&self, y: f64, t: f64) -> Result<(f64, f64, f64)> {
        let (vl, vr) = self.frame_velocities(t)?;
        Ok(self.coefficients_with(y, t, vl, vr))
    }

    #[inline]
    pub(crate) fn coefficients_with(&self, y: f64, t: f64, vl: f64, vr: f64) -> (f64, f64, f64) {
        let (l, r) = self.ends(t);
        let len = r - l;
        let x = l + len * y;
        let mut a = self.field.a(x, t);
        if x == 0.0 && self.field.origin_regularized() {
            // symmetry limit of (N-1)/r u_r is (N-1) u_rr
            a += self.field.radial_dim().unwrap_or(1) as f64 - 1.0;
        }
        let at = a / (len * len);
        let bt = (vl * (1.0 - y) + vr * y + self.field.b(x, t)) / len;
        (at, bt, self.field.c(x, t))
    }
}

fn check_c1(domain: &MovingDomain, side: Side, f: &TimeFunction, window: (f64, f64), step: f64) -> Result<()> {
    if f.is_constant() {
        return Ok(());
    }
    let n = 64;
    for k in 0..=n {
        let t = window.0 + (window.1 - window.0) * k as f64 / n as f64;
        domain.velocity(side, t, step)?;
    }
    Ok(())
}

/// Straightens the left side of `[ξ1(t), X]` onto `[0, 1]` over `window`.
/// Refuses when `ξ1` lacks a C¹ annotation somewhere in the window or when
/// `X` does not stay to the right of `ξ1`.
pub fn straighten_domain(
    field: &CoefficientField,
    domain: &MovingDomain,
    split: f64,
    window: (f64, f64),
) -> Result<TransformedProblem> {
    check_c1(domain, Side::Left, &domain.left, window, ENDPOINT_STEP)?;
    let n = 256;
    for k in 0..=n {
        let t = window.0 + (window.1 - window.0) * k as f64 / n as f64;
        if !(split > domain.left.eval(t)) {
            return invalid(format!("split point X={split} not right of ξ1 at t={t}"));
        }
    }
    Ok(TransformedProblem {
        field: field.clone(),
        domain: domain.clone(),
        right: RightEnd::Split(split),
        deriv_step: ENDPOINT_STEP,
    })
}

/// Straightens both sides of `[ξ1(t), ξ2(t)]` onto `[0, 1]`.
pub fn straighten_both(field: &CoefficientField, domain: &MovingDomain, window: (f64, f64)) -> Result<TransformedProblem> {
    check_c1(domain, Side::Left, &domain.left, window, ENDPOINT_STEP)?;
    check_c1(domain, Side::Right, &domain.right, window, ENDPOINT_STEP)?;
    Ok(TransformedProblem {
        field: field.clone(),
        domain: domain.clone(),
        right: RightEnd::Moving,
        deriv_step: ENDPOINT_STEP,
    })
}

/// Maps of the diffusion normalization on a fixed interval.
#[derive(Debug, Clone)]
pub struct NormalizationMap {
    field: CoefficientField,
    x0: f64,
    x1: f64,
    panels: usize,
    times: Vec<f64>,
    s_values: Vec<f64>,
}

impl NormalizationMap {
    fn inv_sqrt_a(&self, x: f64, t: f64) -> f64 {
        self.field.a(x, t).powf(-0.5)
    }

    /// Composite trapezoid of `a^{-1/2}` from `x0` to `x`, on the same panel
    /// boundaries used for `α`.
    fn partial(&self, x: f64, t: f64) -> f64 {
        let h = (self.x1 - self.x0) / self.panels as f64;
        let x = x.clamp(self.x0, self.x1);
        let full = (((x - self.x0) / h).floor() as usize).min(self.panels);
        let mut acc = 0.0;
        let mut prev = self.inv_sqrt_a(self.x0, t);
        for k in 1..=full {
            let cur = self.inv_sqrt_a(self.x0 + h * k as f64, t);
            acc += 0.5 * h * (prev + cur);
            prev = cur;
        }
        let xs = self.x0 + h * full as f64;
        if x > xs {
            acc += 0.5 * (x - xs) * (prev + self.inv_sqrt_a(x, t));
        }
        acc
    }

    /// `α(t) = ∫ a(z, t)^{-1/2} dz` over the interval.
    pub fn alpha(&self, t: f64) -> f64 {
        self.partial(self.x1, t)
    }

    /// `y(x, t)`
    pub fn y(&self, x: f64, t: f64) -> f64 {
        self.partial(x, t) / self.alpha(t)
    }

    /// Inverse of `y(·, t)` by bisection (y is strictly increasing).
    pub fn x_of(&self, y: f64, t: f64) -> f64 {
        let (mut lo, mut hi) = (self.x0, self.x1);
        if y <= 0.0 {
            return lo;
        }
        if y >= 1.0 {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.y(mid, t) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `s(t) = ∫_{t0}^t α^{-2}`, piecewise linear between time nodes.
    pub fn s(&self, t: f64) -> f64 {
        interp(&self.times, &self.s_values, t)
    }

    pub fn t_of(&self, s: f64) -> f64 {
        interp(&self.s_values, &self.times, s)
    }

    pub fn s_end(&self) -> f64 {
        *self.s_values.last().unwrap()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }
}

fn interp(xs: &[f64], ys: &[f64], v: f64) -> f64 {
    let n = xs.len();
    if v <= xs[0] {
        return ys[0] + (v - xs[0]) * (ys[1] - ys[0]) / (xs[1] - xs[0]);
    }
    if v >= xs[n - 1] {
        return ys[n - 1] + (v - xs[n - 1]) * (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    }
    let j = xs.partition_point(|&g| g <= v) - 1;
    let w = (v - xs[j]) / (xs[j + 1] - xs[j]);
    ys[j] * (1.0 - w) + ys[j + 1] * w
}

/// The unit-diffusion problem `w_s = w_yy + b̃ w_y + c̃ w` on `(0, 1)`.
#[derive(Debug, Clone)]
pub struct NormalizedProblem {
    map: NormalizationMap,
}

impl NormalizedProblem {
    pub fn map(&self) -> &NormalizationMap {
        &self.map
    }

    /// `(ã, b̃, c̃)` at `(y, s)`; `ã` is recomputed from the numerical map
    /// and equals 1 up to quadrature error.
    pub fn coefficients(&self, y: f64, s: f64) -> (f64, f64, f64) {
        let m = &self.map;
        let t = m.t_of(s);
        let x = m.x_of(y, t);
        let alpha = m.alpha(t);
        let a = m.field.a(x, t);
        let b = m.field.b(x, t);
        let c = m.field.c(x, t);
        let span = m.x1 - m.x0;
        let hx = 1e-5 * span;
        let (xl, xr) = ((x - hx).max(m.x0), (x + hx).min(m.x1));
        let y_x = (m.y(xr, t) - m.y(xl, t)) / (xr - xl);
        let ha = 1e-4 * span;
        let (al, ar) = ((x - ha).max(m.x0), (x + ha).min(m.x1));
        let a_x = (m.field.a(ar, t) - m.field.a(al, t)) / (ar - al);
        let y_xx = -0.5 * a.powf(-1.5) * a_x / alpha;
        let ht = 1e-6 * (1.0 + t.abs());
        let y_t = (m.y(x, t + ht) - m.y(x, t - ht)) / (2.0 * ht);
        let a2 = alpha * alpha;
        (a2 * a * y_x * y_x, a2 * (a * y_xx + b * a.powf(-0.5) / alpha - y_t), a2 * c)
    }
}

/// Normalizes the diffusion of a fixed-domain problem over `[t0, t1]`.
/// `panels` is the trapezoid resolution in x, `time_nodes` the number of
/// nodes of the `s(t)` table.
pub fn normalize_diffusion(
    field: &CoefficientField,
    domain: &MovingDomain,
    window: (f64, f64),
    panels: usize,
    time_nodes: usize,
) -> Result<(NormalizedProblem, NormalizationMap)> {
    if !domain.is_fixed() {
        return invalid("diffusion normalization needs a fixed interval");
    }
    if panels < 2 || time_nodes < 2 {
        return invalid("normalization needs at least 2 panels and 2 time nodes");
    }
    let (x0, x1) = domain.interval(window.0);
    let floor = field.bounds.a_min.unwrap_or(0.0);
    let h = (x1 - x0) / panels as f64;
    let times: Vec<f64> = (0..time_nodes)
        .map(|k| window.0 + (window.1 - window.0) * k as f64 / (time_nodes - 1) as f64)
        .collect();
    for &t in &times {
        for k in 0..=panels {
            let x = x0 + h * k as f64;
            let a = field.a(x, t);
            if !(a > 0.0) || a < floor {
                return Err(LabError::Transform {
                    message: format!("quadrature failure: a={a} below a_min at x={x}"),
                    from: t,
                    to: t,
                });
            }
        }
    }
    let mut map = NormalizationMap { field: field.clone(), x0, x1, panels, times: times.clone(), s_values: vec![0.0; time_nodes] };
    let inv2: Vec<f64> = times.iter().map(|&t| map.alpha(t).powi(-2)).collect();
    for k in 1..time_nodes {
        map.s_values[k] = map.s_values[k - 1] + 0.5 * (times[k] - times[k - 1]) * (inv2[k] + inv2[k - 1]);
    }
    Ok((NormalizedProblem { map: map.clone() }, map))
}

/// Prepares a radial field `(N-1)/r` for solving. When the domain contains
/// the origin the drift at `r = 0` is replaced by the symmetry limit (the
/// equation there becomes `u_t = (a + N - 1) u_rr + c u` with `u_r(0) = 0`), after
/// checking that the initial data is even at the origin to within `tol`
/// (relative to its sup-norm). Away from the origin, or for `N = 1`, the
/// field is returned unchanged.
pub fn regularize_radial(
    field: &CoefficientField,
    domain: &MovingDomain,
    initial: &Profile,
    t0: f64,
    r_min: f64,
    tol: f64,
) -> Result<CoefficientField> {
    let Some(dim) = field.radial_dim() else {
        return invalid("regularize_radial: field has no radial singularity marker");
    };
    if r_min < 0.0 {
        return invalid("regularize_radial: r_min must be ≥ 0");
    }
    let mut out = field.clone();
    if dim == 1 {
        return Ok(out);
    }
    let (l, r) = domain.interval(t0);
    let contains_origin = domain.left.is_constant() && l <= r_min.max(0.0) && l == 0.0;
    if !contains_origin {
        return Ok(out);
    }
    let h = 1e-4 * (r - l);
    let u = |x: f64| initial.eval(x, t0);
    let slope = (-3.0 * u(0.0) + 4.0 * u(h) - u(2.0 * h)) / (2.0 * h);
    let sup = (0..=64).map(|k| u(l + (r - l) * k as f64 / 64.0).abs()).fold(0.0, f64::max);
    if slope.abs() > tol * sup.max(f64::MIN_POSITIVE) {
        return invalid(format!("radial initial data not even at r=0: u_r(0) ≈ {slope:e}"));
    }
    out.origin_regularized = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::Coefficient;

    fn ex(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn identity_when_left_fixed_and_split_is_right_end() {
        let field = CoefficientField {
            a: Coefficient::Expr(ex("1 + 0.3*x*t")),
            b: Coefficient::Expr(ex("sin(x)")),
            c: Coefficient::Expr(ex("x - t")),
            ..CoefficientField::heat()
        };
        let tp = straighten_domain(&field, &MovingDomain::fixed(0.0, 1.0), 1.0, (0.0, 1.0)).unwrap();
        for &(y, t) in &[(0.0, 0.0), (0.3, 0.2), (1.0, 0.9)] {
            let (a, b, c) = tp.coefficients(y, t).unwrap();
            assert_eq!(a, field.a(y, t));
            assert_eq!(b, field.b(y, t));
            assert_eq!(c, field.c(y, t));
            assert_eq!(tp.forward(y, t), y);
        }
    }

    #[test]
    fn moving_left_end_coefficients() {
        let dom = MovingDomain::new(TimeFunction::Linear { value: 0.0, rate: 1.0 }, TimeFunction::Constant(3.0));
        let tp = straighten_domain(&CoefficientField::heat(), &dom, 2.0, (0.0, 1.0)).unwrap();
        let (a, b, c) = tp.coefficients(0.0, 0.0).unwrap();
        assert!((a - 0.25).abs() < 1e-12);
        assert!((b - 0.5).abs() < 1e-9);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn missing_c1_annotation_is_refused() {
        let mut dom = MovingDomain::new(TimeFunction::Linear { value: 0.0, rate: 0.2 }, TimeFunction::Constant(1.0));
        dom.left_c1 = Some(vec![[0.0, 0.4], [0.6, 1.0]]);
        match straighten_domain(&CoefficientField::heat(), &dom, 1.0, (0.0, 1.0)) {
            Err(LabError::Transform { from, to, .. }) => assert_eq!((from, to), (0.4, 0.6)),
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(straighten_domain(&CoefficientField::heat(), &dom, 1.0, (0.0, 0.4)).is_ok());
    }

    #[test]
    fn split_left_of_boundary_is_refused() {
        let dom = MovingDomain::new(TimeFunction::Linear { value: 0.0, rate: 1.0 }, TimeFunction::Constant(3.0));
        assert!(straighten_domain(&CoefficientField::heat(), &dom, 0.5, (0.0, 1.0)).is_err());
    }

    #[test]
    fn normalization_identity_and_scaling() {
        let (np, map) = normalize_diffusion(&CoefficientField::heat(), &MovingDomain::fixed(0.0, 1.0), (0.0, 1.0), 64, 11).unwrap();
        assert!((map.alpha(0.3) - 1.0).abs() < 1e-14);
        assert!((map.y(0.37, 0.5) - 0.37).abs() < 1e-14);
        assert!((map.s(0.6) - 0.6).abs() < 1e-14);
        let (a, b, c) = np.coefficients(0.4, 0.2);
        assert!((a - 1.0).abs() < 1e-8 && b.abs() < 1e-8 && c == 0.0);

        let four = CoefficientField::constant(4.0, 0.0, 0.0);
        let (_, map) = normalize_diffusion(&four, &MovingDomain::fixed(0.0, 2.0), (0.0, 1.0), 64, 11).unwrap();
        assert!((map.alpha(0.0) - 1.0).abs() < 1e-14);
        assert!((map.y(1.0, 0.0) - 0.5).abs() < 1e-14);
        assert!((map.s(0.7) - 0.7).abs() < 1e-14);
    }

    #[test]
    fn normalization_rejects_small_diffusion() {
        let mut f = CoefficientField { a: Coefficient::Expr(ex("1 + 0.9*sin(pi*x)")), ..CoefficientField::heat() };
        f.bounds.a_min = Some(1.2);
        assert!(matches!(
            normalize_diffusion(&f, &MovingDomain::fixed(0.0, 1.0), (0.0, 1.0), 32, 5),
            Err(LabError::Transform { .. })
        ));
    }

    #[test]
    fn radial_regularization() {
        let f3 = CoefficientField { b: Coefficient::Radial { dim: 3 }, ..CoefficientField::heat() };
        let even = Profile::Expr(ex("exp(-4*x^2)"));
        let odd = Profile::Expr(ex("exp(-4*x^2) + x"));
        let dom = MovingDomain::fixed(0.0, 1.0);
        let g = regularize_radial(&f3, &dom, &even, 0.0, 0.0, 1e-4).unwrap();
        assert!(g.origin_regularized());
        assert_eq!(g.b(0.0, 0.0), 0.0);
        assert!(regularize_radial(&f3, &dom, &odd, 0.0, 0.0, 1e-4).is_err());
        // away from the origin nothing changes
        let away = regularize_radial(&f3, &MovingDomain::fixed(0.5, 1.0), &odd, 0.0, 0.5, 1e-4).unwrap();
        assert_eq!(away, f3);
        let f1 = CoefficientField { b: Coefficient::Radial { dim: 1 }, ..CoefficientField::heat() };
        let same = regularize_radial(&f1, &dom, &odd, 0.0, 0.0, 1e-4).unwrap();
        assert_eq!(same.b(0.3, 0.0), 0.0);
        assert!(regularize_radial(&CoefficientField::heat(), &dom, &even, 0.0, 0.0, 1e-4).is_err());
    }
}
