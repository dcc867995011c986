//! Dormand–Prince 5(4) with Hairer's 4th-order dense output.

use crate::scalar::Real;

pub const DIM: usize = 8;
pub type State<T> = [T; DIM];

pub trait System<T: Real> {
    fn rhs(&self, y: &State<T>) -> State<T>;

    /// Largest admissible step from state `y` (chart-specific geometry limits).
    fn max_step(&self, _y: &State<T>) -> T {
        T::infinity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rtol: T,
    pub atol: T,
    pub h_max: T,
    pub h_min: T,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-11),
            h_max: T::lit(0.1),
            h_min: T::lit(1e-14),
        }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn with_rtol(rtol: T) -> Self {
        Self {
            rtol,
            atol: rtol * T::lit(0.1),
            ..Self::default()
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct Dense<T> {
    pub t0: T,
    pub h: T,
    rcont: [State<T>; 5],
}

impl<T: Real> Dense<T> {
    pub fn t1(&self) -> T {
        self.t0 + self.h
    }

    pub fn start(&self) -> State<T> {
        self.rcont[0]
    }

    pub fn end(&self) -> State<T> {
        let mut y = self.rcont[0];
        for (i, v) in y.iter_mut().enumerate() {
            *v = *v + self.rcont[1][i];
        }
        y
    }

    pub fn eval(&self, t: T) -> State<T> {
        let s = if self.h == T::zero() {
            T::zero()
        } else {
            (t - self.t0) / self.h
        };
        let s1 = T::one() - s;
        let mut y = [T::zero(); DIM];
        for i in 0..DIM {
            let r = &self.rcont;
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }
}

struct Tableau<T> {
    a: [[T; 6]; 7],
    e: [T; 7],
    d: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let f = |p: f64, q: f64| T::lit(p / q);
        let z = T::zero();
        Self {
            a: [
                [f(1.0, 5.0), z, z, z, z, z],
                [f(3.0, 40.0), f(9.0, 40.0), z, z, z, z],
                [f(44.0, 45.0), f(-56.0, 15.0), f(32.0, 9.0), z, z, z],
                [
                    f(19372.0, 6561.0),
                    f(-25360.0, 2187.0),
                    f(64448.0, 6561.0),
                    f(-212.0, 729.0),
                    z,
                    z,
                ],
                [
                    f(9017.0, 3168.0),
                    f(-355.0, 33.0),
                    f(46732.0, 5247.0),
                    f(49.0, 176.0),
                    f(-5103.0, 18656.0),
                    z,
                ],
                [
                    f(35.0, 384.0),
                    z,
                    f(500.0, 1113.0),
                    f(125.0, 192.0),
                    f(-2187.0, 6784.0),
                    f(11.0, 84.0),
                ],
                [z; 6],
            ],
            e: [
                f(71.0, 57600.0),
                z,
                f(-71.0, 16695.0),
                f(71.0, 1920.0),
                f(-17253.0, 339200.0),
                f(22.0, 525.0),
                f(-1.0, 40.0),
            ],
            d: [
                f(-12715105075.0, 11282082432.0),
                z,
                f(87487479700.0, 32700410799.0),
                f(-10690763975.0, 1880347072.0),
                f(701980252875.0, 199316789632.0),
                f(-1453857185.0, 822651844.0),
                f(69997945.0, 29380423.0),
            ],
        }
    }
}

/// Outcome of one attempted step.
pub struct Attempt<T> {
    pub y1: State<T>,
    pub k7: State<T>,
    pub err: T,
    pub dense: Dense<T>,
}

pub struct Stepper<T> {
    tab: Tableau<T>,
    pub tol: Tolerance<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(tol: Tolerance<T>) -> Self {
        Self {
            tab: Tableau::new(),
            tol,
        }
    }

    /// One DOPRI5 step of size `h` from `(t, y)` with first stage `k1 = f(y)`.
    pub fn attempt<S: System<T>>(&self, sys: &S, t: T, y: &State<T>, k1: &State<T>, h: T) -> Attempt<T> {
        let tab = &self.tab;
        let mut k = [[T::zero(); DIM]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = tab.a[s - 1][j];
                if a != T::zero() {
                    for i in 0..DIM {
                        ys[i] = ys[i] + h * a * kj[i];
                    }
                }
            }
            k[s] = sys.rhs(&ys);
        }
        // stage 7 was evaluated at the 5th-order solution (FSAL)
        let mut y1 = *y;
        for i in 0..DIM {
            let mut acc = T::zero();
            for j in 0..6 {
                acc = acc + tab.a[5][j] * k[j][i];
            }
            y1[i] = y[i] + h * acc;
        }
        let mut err_sq = T::zero();
        for i in 0..DIM {
            let mut e = T::zero();
            for j in 0..7 {
                e = e + tab.e[j] * k[j][i];
            }
            let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y1[i].abs());
            let q = h * e / sc;
            err_sq = err_sq + q * q;
        }
        let err = (err_sq / T::lit(DIM as f64)).sqrt();
        let mut rc = [[T::zero(); DIM]; 5];
        for i in 0..DIM {
            let dy = y1[i] - y[i];
            let bsp = h * k[0][i] - dy;
            rc[0][i] = y[i];
            rc[1][i] = dy;
            rc[2][i] = bsp;
            rc[3][i] = dy - h * k[6][i] - bsp;
            let mut acc = T::zero();
            for j in 0..7 {
                acc = acc + tab.d[j] * k[j][i];
            }
            rc[4][i] = h * acc;
        }
        Attempt {
            y1,
            k7: k[6],
            err,
            dense: Dense { t0: t, h, rcont: rc },
        }
    }

    /// Proposed next step size after an error estimate `err`.
    pub fn next_h(&self, h: T, err: T, accepted: bool) -> T {
        let safety = T::lit(0.9);
        let fac = if err == T::zero() {
            T::lit(5.0)
        } else {
            (safety * err.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
        };
        let fac = if accepted { fac } else { fac.min(T::one()) };
        (h * fac).min(self.tol.h_max)
    }
}
