//! Box-constrained quasi-Newton ascent over three parameters with
//! finite-difference gradients.
//!
//! Each iteration takes a BFGS direction restricted to the free coordinates,
//! projects trial points onto the box and backtracks until a
//! sufficient-increase condition holds.

use crate::error::{HawkesError, Result};

pub type Point = [f64; 3];

fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Componentwise box `lower <= x <= upper`. Infinite entries are unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: Point,
    pub upper: Point,
}

impl Bounds {
    pub fn unbounded() -> Self {
        Self {
            lower: [f64::NEG_INFINITY; 3],
            upper: [f64::INFINITY; 3],
        }
    }

    pub fn lower(lower: Point) -> Self {
        Self {
            lower,
            upper: [f64::INFINITY; 3],
        }
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..3).all(|i| x[i] >= self.lower[i] && x[i] <= self.upper[i])
    }

    fn project(&self, x: &Point) -> Point {
        std::array::from_fn(|i| x[i].max(self.lower[i]).min(self.upper[i]))
    }
}

/// Central-difference gradient with step `rel_step * max(1, |x_i|)` per
/// coordinate. A coordinate whose probe would leave the box uses a one-sided
/// difference; one pinned by equal bounds gets a zero derivative.
pub fn finite_difference_gradient<F>(
    objective: F,
    point: Point,
    rel_step: f64,
    bounds: &Bounds,
) -> Result<Point>
where
    F: Fn(&Point) -> f64,
{
    let f0 = objective(&point);
    let mut grad = [0.0; 3];
    for i in 0..3 {
        let h = rel_step * point[i].abs().max(1.0);
        let can_up = point[i] + h <= bounds.upper[i];
        let can_down = point[i] - h >= bounds.lower[i];
        let probe = |delta: f64| {
            let mut p = point;
            p[i] += delta;
            objective(&p)
        };
        let (value, finite) = match (can_up, can_down) {
            (true, true) => {
                let (up, down) = (probe(h), probe(-h));
                ((up - down) / (2.0 * h), up.is_finite() && down.is_finite())
            }
            (true, false) => {
                let up = probe(h);
                ((up - f0) / h, up.is_finite() && f0.is_finite())
            }
            (false, true) => {
                let down = probe(-h);
                ((f0 - down) / h, down.is_finite() && f0.is_finite())
            }
            (false, false) => (0.0, true),
        };
        if !finite {
            return Err(HawkesError::NonFiniteObjective);
        }
        grad[i] = value;
    }
    Ok(grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub max_iterations: usize,
    /// Stop when `|f_new - f_old| <= tolerance * max(1, |f_old|, |f_new|)`.
    pub tolerance: f64,
    /// Stop when the projected gradient's largest component is below this.
    pub gradient_tolerance: f64,
    pub gradient_step: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-9,
            gradient_tolerance: 1e-5,
            gradient_step: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentOutcome {
    pub point: Point,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Objective at the start and after every accepted step.
    pub history: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

type Matrix = [[f64; 3]; 3];

fn identity() -> Matrix {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_vec(m: &Matrix, v: &Point) -> Point {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// BFGS update of the inverse curvature approximation with step `s` and
/// gradient change `y` (both oriented for minimization of `-f`).
fn bfgs_update(h: &mut Matrix, s: &Point, y: &Point) {
    let sy = dot(s, y);
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let mut next = *h;
    for i in 0..3 {
        for j in 0..3 {
            next[i][j] +=
                -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
    *h = next;
}

/// Maximizes `objective` over `bounds`, starting from `start` (projected
/// onto the box first).
pub fn maximize<F>(
    objective: F,
    start: Point,
    bounds: &Bounds,
    options: &AscentOptions,
) -> Result<AscentOutcome>
where
    F: Fn(&Point) -> f64,
{
    let mut x = bounds.project(&start);
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(HawkesError::OptimizerFailure(format!(
            "objective is not finite at the start point {x:?}"
        )));
    }
    let mut grad = finite_difference_gradient(&objective, x, options.gradient_step, bounds)?;
    let mut inv_curvature = identity();
    let mut fresh = true;
    let mut history = vec![fx];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < options.max_iterations {
        let active: [bool; 3] = std::array::from_fn(|i| {
            (x[i] <= bounds.lower[i] && grad[i] <= 0.0)
                || (x[i] >= bounds.upper[i] && grad[i] >= 0.0)
        });
        let projected_norm = (0..3)
            .filter(|&i| !active[i])
            .map(|i| grad[i].abs())
            .fold(0.0, f64::max);
        if projected_norm <= options.gradient_tolerance {
            converged = true;
            break;
        }

        let mut direction = mat_vec(&inv_curvature, &grad);
        for i in 0..3 {
            if active[i] {
                direction[i] = 0.0;
            }
        }
        if dot(&direction, &grad) <= 0.0 {
            inv_curvature = identity();
            fresh = true;
            direction = std::array::from_fn(|i| if active[i] { 0.0 } else { grad[i] });
        }
        if fresh {
            // unit-length first step until curvature information is available
            let norm = dot(&direction, &direction).sqrt();
            if norm > 1.0 {
                direction.iter_mut().for_each(|d| *d /= norm);
            }
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = bounds.project(&std::array::from_fn(|i| x[i] + step * direction[i]));
            if trial == x {
                break;
            }
            let f_trial = objective(&trial);
            let s: Point = std::array::from_fn(|i| trial[i] - x[i]);
            let predicted = dot(&grad, &s).max(0.0);
            if f_trial.is_finite() && f_trial >= fx + ARMIJO * predicted {
                accepted = Some((trial, f_trial, s));
                break;
            }
            step *= 0.5;
        }

        let Some((x_new, f_new, s)) = accepted else {
            if fresh {
                break;
            }
            inv_curvature = identity();
            fresh = true;
            continue;
        };

        let grad_new =
            match finite_difference_gradient(&objective, x_new, options.gradient_step, bounds) {
                Ok(g) => g,
                Err(_) => break,
            };
        iterations += 1;
        history.push(f_new);

        // curvature pair for minimizing -f
        let y: Point = std::array::from_fn(|i| grad[i] - grad_new[i]);
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                // scale the initial inverse curvature as s'y / y'y
                let scale = sy / dot(&y, &y);
                inv_curvature = identity();
                inv_curvature
                    .iter_mut()
                    .enumerate()
                    .for_each(|(i, row)| row[i] = scale);
            }
            bfgs_update(&mut inv_curvature, &s, &y);
            fresh = false;
        }

        let change = (f_new - fx).abs();
        let scale = 1f64.max(fx.abs()).max(f_new.abs());
        x = x_new;
        fx = f_new;
        grad = grad_new;
        if change <= options.tolerance * scale {
            converged = true;
            break;
        }
    }

    Ok(AscentOutcome {
        point: x,
        value: fx,
        converged,
        iterations,
        history,
    })
}
