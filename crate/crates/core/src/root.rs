//! Bracket scanning and Brent's method for scalar roots.

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrentRoot {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's method on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
///
/// Stops as soon as `|f(x)| <= ftol`, or when the bracket cannot shrink
/// any further in floating point.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    ftol: f64,
    max_iter: usize,
) -> BrentRoot {
    debug_assert!(fa * fb <= 0.0);
    if fa.abs() <= ftol {
        return BrentRoot {
            x: a,
            fx: fa,
            iterations: 0,
            converged: true,
        };
    }
    if fb.abs() <= ftol {
        return BrentRoot {
            x: b,
            fx: fb,
            iterations: 0,
            converged: true,
        };
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs();
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 {
            // Bracket collapsed to adjacent floats.
            return BrentRoot {
                x: b,
                fx: fb,
                iterations: iter,
                converged: fb.abs() <= ftol,
            };
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
        if fb.abs() <= ftol {
            return BrentRoot {
                x: b,
                fx: fb,
                iterations: iter,
                converged: true,
            };
        }
    }
    BrentRoot {
        x: b,
        fx: fb,
        iterations: max_iter,
        converged: false,
    }
}

/// `n` points spaced geometrically from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|j| lo * (ratio * j as f64).exp()).collect();
    grid[n - 1] = hi;
    grid
}

/// Sign-change brackets `(x_j, x_{j+1})` of consecutive grid values.
///
/// A grid value that is exactly zero yields the bracket formed by its two
/// neighbours so that the root lies strictly inside it.
pub fn sign_change_brackets(values: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let m = values.len();
    let mut j = 0;
    while j + 1 < m {
        let (fa, fb) = (values[j].1, values[j + 1].1);
        if fb == 0.0 {
            if j + 2 < m && fa * values[j + 2].1 < 0.0 {
                out.push((j, j + 2));
            }
            j += 2;
            continue;
        }
        if fa * fb < 0.0 {
            out.push((j, j + 1));
        }
        j += 1;
    }
    out
}
