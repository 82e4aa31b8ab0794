//! Energy terms used to score predicted candidate states.
//!
//! Lower energy means a more probable candidate. The attraction-repulsion
//! and alignment terms are pairwise; input cost and leader-velocity cost
//! are unary.

use crate::error::{invalid, FlockError, Result};
use crate::vec2::Vec2;

/// Norm below which a velocity is treated as zero when measuring angles.
pub const EPS_VELOCITY: f64 = 1e-9;
/// Norm below which an input is treated as zero when measuring angles.
pub const EPS_INPUT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    pub a: f64,
    pub b: f64,
    pub k_a: f64,
    pub k_r: f64,
    pub k_l: f64,
    pub k_c: f64,
    pub k_d: f64,
    pub k_v: f64,
    pub t_p: f64,
}

impl PotentialParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("a", self.a),
            ("b", self.b),
            ("k_a", self.k_a),
            ("k_r", self.k_r),
            ("k_l", self.k_l),
            ("k_c", self.k_c),
            ("k_d", self.k_d),
            ("k_v", self.k_v),
            ("t_p", self.t_p),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.a * self.k_r >= self.b * self.k_a {
            return Err(FlockError::NoMinimum(format!(
                "a*k_r = {} must be below b*k_a = {}",
                self.a * self.k_r,
                self.b * self.k_a
            )));
        }
        Ok(())
    }
}

/// `−a·exp(−d/k_a) + b·exp(−d/k_r)`.
pub fn psi_attract_repulse(d: f64, params: &PotentialParams) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(invalid(format!("distance must be non-negative, got {d}")));
    }
    Ok(attract_repulse_unchecked(d, params))
}

#[inline]
pub(crate) fn attract_repulse_unchecked(d: f64, p: &PotentialParams) -> f64 {
    -p.a * (-d / p.k_a).exp() + p.b * (-d / p.k_r).exp()
}

/// Closed-form minimizer of [`psi_attract_repulse`]:
/// `ln(b·k_a / (a·k_r)) / (1/k_r − 1/k_a)`.
pub fn desired_distance(params: &PotentialParams) -> Result<f64> {
    let PotentialParams { a, b, k_a, k_r, .. } = *params;
    if !(a > 0.0 && b > 0.0 && k_a > 0.0 && k_r > 0.0) {
        return Err(invalid("a, b, k_a, k_r must be positive"));
    }
    if a * k_r >= b * k_a || k_r >= k_a {
        return Err(FlockError::NoMinimum(format!(
            "need a*k_r < b*k_a and k_r < k_a (a={a}, b={b}, k_a={k_a}, k_r={k_r})"
        )));
    }
    Ok((b * k_a / (a * k_r)).ln() / (1.0 / k_r - 1.0 / k_a))
}

/// `exp(‖v_i‖·t_p·Δθ / k_l)` where Δθ is the angle between the two velocities.
pub fn psi_align(v_i: Vec2, v_j: Vec2, params: &PotentialParams) -> f64 {
    let d_i = v_i.norm() * params.t_p;
    let dtheta = v_i.angle_to(v_j, EPS_VELOCITY);
    (d_i * dtheta / params.k_l).exp()
}

/// `exp(‖u‖/k_c) + exp(Δθ/k_d)` where Δθ is the turn from the previous input.
pub fn psi_acc(u: Vec2, u_last: Vec2, params: &PotentialParams) -> f64 {
    let dtheta = u.angle_to(u_last, EPS_INPUT);
    (u.norm() / params.k_c).exp() + (dtheta / params.k_d).exp()
}

/// `exp(‖v − v_leader‖/k_v)`.
pub fn psi_vel(v: Vec2, v_leader: Vec2, params: &PotentialParams) -> f64 {
    ((v - v_leader).norm() / params.k_v).exp()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    pub(crate) fn sim_params() -> PotentialParams {
        PotentialParams { a: 8.0, b: 10.0, k_a: 1.5, k_r: 0.2, k_l: 4.0, k_c: 7.0, k_d: 15.0, k_v: 2.0, t_p: 0.15 }
    }

    /// Golden-section search; independent of the closed form.
    fn golden_argmin(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = hi - g * (hi - lo);
            let d = lo + g * (hi - lo);
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
        }
        0.5 * (lo + hi)
    }

    /// Coarse grid over (0, 5], then golden refinement around the best cell.
    fn grid_argmin(p: &PotentialParams) -> f64 {
        let f = |d: f64| attract_repulse_unchecked(d, p);
        let n = 5000;
        let best = (1..=n)
            .map(|i| 5.0 * i as f64 / n as f64)
            .min_by(|x, y| f(*x).total_cmp(&f(*y)))
            .unwrap();
        golden_argmin(f, (best - 0.002).max(1e-9), best + 0.002)
    }

    #[test]
    fn attract_repulse_values() {
        let p = sim_params();
        assert_eq!(psi_attract_repulse(0.0, &p).unwrap(), 2.0);
        assert!(psi_attract_repulse(200.0, &p).unwrap().abs() < 1e-40);
        assert!(psi_attract_repulse(-0.1, &p).is_err());
        assert!(psi_attract_repulse(f64::NAN, &p).is_err());
        let global_min = attract_repulse_unchecked(grid_argmin(&p), &p);
        let at = psi_attract_repulse(0.5163, &p).unwrap();
        assert!((at - global_min).abs() < 1e-3);
    }

    #[test]
    fn desired_distance_reported_values() {
        let mut p = sim_params();
        assert!((desired_distance(&p).unwrap() - 0.5163).abs() < 1e-3);
        p.k_r = 0.27;
        assert!((desired_distance(&p).unwrap() - 0.6381).abs() < 1e-3);
    }

    #[test]
    fn desired_distance_is_stationary() {
        let p = sim_params();
        let d = desired_distance(&p).unwrap();
        let h = 1e-6;
        let slope = (attract_repulse_unchecked(d + h, &p) - attract_repulse_unchecked(d - h, &p)) / (2.0 * h);
        assert!(slope.abs() < 1e-6, "slope {slope}");
    }

    #[test]
    fn desired_distance_requires_minimum() {
        let mut p = sim_params();
        p.a = 100.0;
        assert!(matches!(desired_distance(&p), Err(FlockError::NoMinimum(_))));
        assert!(matches!(p.validate(), Err(FlockError::NoMinimum(_))));
        let mut p = sim_params();
        p.k_r = 2.0;
        assert!(matches!(desired_distance(&p), Err(FlockError::NoMinimum(_))));
    }

    #[test]
    fn align_values() {
        let p = sim_params();
        let v = Vec2::new(0.2, -0.1);
        assert_eq!(psi_align(v, v, &p), 1.0);
        let e = psi_align(Vec2::new(0.35, 0.0), Vec2::new(-0.35, 0.0), &p);
        assert!((e - (0.0525 * PI / 4.0).exp()).abs() < 1e-12);
        assert!((e - 1.0421).abs() < 1e-4);
        assert_eq!(psi_align(Vec2::ZERO, Vec2::new(0.3, 0.1), &p), 1.0);
    }

    #[test]
    fn acc_values() {
        let p = sim_params();
        assert_eq!(psi_acc(Vec2::ZERO, Vec2::ZERO, &p), 2.0);
        let u = Vec2::new(0.0, 0.7);
        assert!((psi_acc(u, u, &p) - (0.1f64.exp() + 1.0)).abs() < 1e-12);
        assert!((psi_acc(u, u, &p) - 2.1052).abs() < 1e-4);
        let e = psi_acc(Vec2::new(0.14, 0.0), Vec2::new(0.0, 0.3), &p);
        assert!((e - (0.02f64.exp() + (PI / 30.0).exp())).abs() < 1e-12);
        assert!((e - 2.1305).abs() < 2e-4);
    }

    #[test]
    fn vel_values() {
        let p = sim_params();
        let vl = Vec2::new(0.2, 0.0);
        assert_eq!(psi_vel(vl, vl, &p), 1.0);
        assert!((psi_vel(Vec2::new(0.2, 0.2), vl, &p) - 0.1f64.exp()).abs() < 1e-12);
        assert!(psi_vel(Vec2::new(0.2, 0.3), vl, &p) > psi_vel(Vec2::new(0.2, 0.2), vl, &p));
    }

    fn valid_params() -> impl Strategy<Value = PotentialParams> {
        (0.5..20.0f64, 0.5..20.0f64, 0.5..3.0f64, 0.05..0.45f64).prop_filter_map(
            "needs a minimum",
            |(a, b, k_a, k_r)| {
                let p = PotentialParams { a, b, k_a, k_r, ..sim_params() };
                let d = desired_distance(&p).ok()?;
                // keep the minimizer well inside the numeric search window
                (d > 0.01 && d < 4.0).then_some(p)
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn closed_form_matches_numeric(p in valid_params()) {
            let closed = desired_distance(&p).unwrap();
            let numeric = grid_argmin(&p);
            prop_assert!((closed - numeric).abs() < 1e-6, "closed {} numeric {}", closed, numeric);
        }

        #[test]
        fn unimodal_around_desired_distance(p in valid_params(), frac in 0.02..0.98f64, far in 1.02..6.0f64) {
            let d_t = desired_distance(&p).unwrap();
            let h = 1e-7;
            let slope = |d: f64| (attract_repulse_unchecked(d + h, &p) - attract_repulse_unchecked(d - h, &p)) / (2.0 * h);
            prop_assert!(slope(d_t * frac) < 0.0);
            prop_assert!(slope(d_t * far) > 0.0);
        }

        #[test]
        fn potential_lower_bounds(vx in -1.0..1.0f64, vy in -1.0..1.0f64, wx in -1.0..1.0f64, wy in -1.0..1.0f64) {
            let p = sim_params();
            let (v, w) = (Vec2::new(vx, vy), Vec2::new(wx, wy));
            prop_assert!(psi_align(v, w, &p) >= 1.0);
            prop_assert!(psi_acc(v, w, &p) >= 2.0);
            prop_assert!(psi_vel(v, w, &p) >= 1.0);
            prop_assert_eq!(v.angle_to(w, EPS_VELOCITY), w.angle_to(v, EPS_VELOCITY));
        }
    }
}
