/// State-motion window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// `1 - (2x - 1)^(2p)`; pins the state at both boundaries.
    Joglekar,
    /// Unit window (linear dopant drift). Only meaningful while `x` stays
    /// inside `[0, 1]`.
    None,
}

/// Joglekar resistance-switch memristor parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorParams {
    /// Fully doped memristance (Ω).
    pub r_on: f64,
    /// Undoped memristance (Ω).
    pub r_off: f64,
    /// Film thickness (m).
    pub d: f64,
    /// Dopant mobility (m²/(V·s)).
    pub mu_v: f64,
    /// Window exponent.
    pub p: u32,
    /// Initial normalized state.
    pub x_init: f64,
    pub window: Window,
}

impl Default for MemristorParams {
    fn default() -> Self {
        Self {
            r_on: 100.0,
            r_off: 16e3,
            d: 10e-9,
            mu_v: 1e-14,
            p: 1,
            x_init: 0.5,
            window: Window::Joglekar,
        }
    }
}

impl MemristorParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_on > 0.0 && self.r_on < self.r_off && self.r_off.is_finite()) {
            return Err("memristor needs 0 < RON < ROFF".into());
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err("memristor D must be positive".into());
        }
        if !(self.mu_v > 0.0 && self.mu_v.is_finite()) {
            return Err("memristor UV must be positive".into());
        }
        if self.p < 1 {
            return Err("memristor P must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.x_init) {
            return Err("memristor XINIT must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Memristance at state `x` (Ω).
    pub fn memristance(&self, x: f64) -> f64 {
        self.r_on * x + self.r_off * (1.0 - x)
    }

    /// State rate per ampere at the window's centre, `mu_v * r_on / d^2`.
    pub fn drift_coefficient(&self) -> f64 {
        self.mu_v * self.r_on / (self.d * self.d)
    }

    /// Window value and its derivative.
    pub fn window_at(&self, x: f64) -> (f64, f64) {
        match self.window {
            Window::None => (1.0, 0.0),
            Window::Joglekar => {
                let p = self.p as i32;
                let s = 2.0 * x - 1.0;
                (window_joglekar(x, self.p), -4.0 * p as f64 * s.powi(2 * p - 1))
            }
        }
    }
}

/// Joglekar window `1 - (2x - 1)^(2p)`.
pub fn window_joglekar(x: f64, p: u32) -> f64 {
    1.0 - (2.0 * x - 1.0).powi(2 * p as i32)
}

/// Current, state rate and their partials at voltage `v` (pos minus neg)
/// and state `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemristorEval {
    /// Current from the positive to the negative terminal (A).
    pub i: f64,
    /// ∂i/∂v (S)
    pub di_dv: f64,
    /// ∂i/∂x (A)
    pub di_dx: f64,
    /// dx/dt (1/s)
    pub dx_dt: f64,
    /// ∂(dx/dt)/∂i at fixed x (1/(A·s))
    pub ddx_di: f64,
    /// ∂(dx/dt)/∂v at fixed x
    pub ddx_dv: f64,
    /// ∂(dx/dt)/∂x at fixed v
    pub ddx_dx: f64,
}

impl MemristorEval {
    /// Terminal currents into `[pos, neg]`.
    pub fn terminal_currents(&self) -> [f64; 2] {
        [self.i, -self.i]
    }
}

pub fn eval_memristor(v: f64, x: f64, p: &MemristorParams) -> MemristorEval {
    let m = p.memristance(x);
    let i = v / m;
    let di_dv = 1.0 / m;
    let di_dx = -v * (p.r_on - p.r_off) / (m * m);
    let k = p.drift_coefficient();
    let (w, dw) = p.window_at(x);
    MemristorEval {
        i,
        di_dv,
        di_dx,
        dx_dt: k * i * w,
        ddx_di: k * w,
        ddx_dv: k * w * di_dv,
        ddx_dx: k * (di_dx * w + i * dw),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn window_values() {
        for p in 1..6 {
            assert_eq!(window_joglekar(0.5, p), 1.0);
            assert_eq!(window_joglekar(0.0, p), 0.0);
            assert_eq!(window_joglekar(1.0, p), 0.0);
        }
        assert_eq!(window_joglekar(0.75, 1), 0.75);
    }

    #[test]
    fn pinched_at_origin_and_endpoints() {
        let p = MemristorParams::default();
        for x in [0.0, 0.3, 1.0] {
            let e = eval_memristor(0.0, x, &p);
            assert_eq!(e.i, 0.0);
            assert_eq!(e.dx_dt, 0.0);
        }
        assert_eq!(p.memristance(1.0), p.r_on);
        assert_eq!(p.memristance(0.0), p.r_off);
    }

    #[test]
    fn half_state_one_volt() {
        let e = eval_memristor(1.0, 0.5, &MemristorParams::default());
        assert_eq!(MemristorParams::default().memristance(0.5), 8050.0);
        assert!((e.i - 1.0 / 8050.0).abs() < 1e-18);
        // k = 1e-14 * 100 / 1e-16 = 1e4 at the window centre.
        assert!((e.dx_dt - 1e4 / 8050.0).abs() < 1e-12);
    }

    #[test]
    fn disabled_window_is_unity() {
        let p = MemristorParams {
            window: Window::None,
            ..MemristorParams::default()
        };
        assert_eq!(p.window_at(0.0), (1.0, 0.0));
        let e = eval_memristor(1.0, 0.0, &p);
        assert!(e.dx_dt > 0.0);
    }

    proptest! {
        #[test]
        fn passive(v in -5.0f64..5.0, x in 0.0f64..=1.0) {
            let e = eval_memristor(v, x, &MemristorParams::default());
            prop_assert!(e.i * v >= 0.0);
            if v != 0.0 {
                prop_assert!(e.i != 0.0 && e.i.signum() == v.signum());
            }
            prop_assert!(e.i.abs() <= v.abs() / 100.0 + 1e-18);
        }

        #[test]
        fn boundaries_lock_state(i_scale in -10.0f64..10.0, p in 1u32..5) {
            let params = MemristorParams { p, ..MemristorParams::default() };
            for x in [0.0, 1.0] {
                prop_assert_eq!(eval_memristor(i_scale, x, &params).dx_dt, 0.0);
            }
        }
    }
}
