//! Closed-form solution of `u'' + f u = 0` with `f = 1` on `[0, t1]` and `f = -1` after.

use super::geodesic::OdeError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSample<T> {
    pub t: T,
    pub u: T,
    pub up: T,
}

#[derive(Debug, Clone)]
pub struct ComparisonSolution<T> {
    pub t1: T,
    pub t_max: T,
    pub samples: Vec<ComparisonSample<T>>,
    /// `u > 0` at every grid point of `(0, t_max]`.
    pub positive: bool,
    /// `u' > 0` at every grid point of `[2, t_max]`.
    pub increasing_after_two: bool,
}

/// `(u, u')` at `t` for switch time `t1`.
pub fn comparison_value<T: Real>(t1: T, t: T) -> (T, T) {
    if t <= t1 {
        let (s, c) = t.sin_cos();
        (s, c)
    } else {
        let (s1, c1) = t1.sin_cos();
        let tau = t - t1;
        let (sh, ch) = (tau.sinh(), tau.cosh());
        (s1 * ch + c1 * sh, s1 * sh + c1 * ch)
    }
}

/// Sample the comparison solution on a uniform grid of spacing at most `step`, with
/// `t1` itself always on the grid.
pub fn comparison_solution<T: Real>(t1: T, t_max: T, step: T) -> Result<ComparisonSolution<T>, OdeError> {
    if !(t1 > T::zero() && t1 <= T::lit(1.7)) {
        return Err(OdeError::Precondition(format!("switch time t1 = {t1} not in (0, 1.7]")));
    }
    if !(t_max > T::zero()) || !(step > T::zero()) {
        return Err(OdeError::Precondition(format!(
            "need t_max > 0 and step > 0 (got {t_max}, {step})"
        )));
    }
    let mut ts = Vec::new();
    let mut push_range = |a: T, b: T| {
        let n = ((b - a) / step).ceil().to_f64_lossy().max(1.0) as usize;
        for i in 1..=n {
            ts.push(a + (b - a) * T::lit(i as f64 / n as f64));
        }
    };
    if t_max <= t1 {
        push_range(T::zero(), t_max);
    } else {
        push_range(T::zero(), t1);
        push_range(t1, t_max);
    }
    let mut samples = vec![ComparisonSample {
        t: T::zero(),
        u: T::zero(),
        up: T::one(),
    }];
    samples.extend(ts.into_iter().map(|t| {
        let (u, up) = comparison_value(t1, t);
        ComparisonSample { t, u, up }
    }));
    let two = T::lit(2.0);
    let positive = samples.iter().skip(1).all(|s| s.u > T::zero());
    let increasing_after_two = samples.iter().filter(|s| s.t >= two).all(|s| s.up > T::zero());
    Ok(ComparisonSolution {
        t1,
        t_max,
        samples,
        positive,
        increasing_after_two,
    })
}
