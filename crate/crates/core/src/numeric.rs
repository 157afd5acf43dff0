//! Scalar root finding and minimization used by the geometric modules.

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Newton iteration kept inside a sign-change bracket `[a, b]`; falls back
/// to bisection whenever the Newton step leaves the bracket or does not
/// shrink it fast enough.
///
/// `f` returns `(value, derivative)`.
pub fn safeguarded_newton<F>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Root
where
    F: Fn(f64) -> (f64, f64),
{
    let (fa, _) = f(a);
    let (fb, _) = f(b);
    if fa == 0.0 {
        return Root { x: a, iterations: 0, converged: true };
    }
    if fb == 0.0 {
        return Root { x: b, iterations: 0, converged: true };
    }
    if fa.signum() == fb.signum() {
        let x = if fa.abs() <= fb.abs() { a } else { b };
        return Root { x, iterations: 0, converged: false };
    }
    // orient so that f(lo) < 0
    let (mut lo, mut hi) = if fa < 0.0 { (a, b) } else { (b, a) };
    let mut x = 0.5 * (a + b);
    let mut dx_old = (b - a).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for it in 1..=max_iter {
        let newton_out = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        let slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_out || slow || dfx == 0.0 {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() < xtol {
            return Root { x, iterations: it, converged: true };
        }
        let (v, d) = f(x);
        fx = v;
        dfx = d;
        if fx == 0.0 {
            return Root { x, iterations: it, converged: true };
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo).abs() < xtol {
            return Root { x, iterations: it, converged: true };
        }
    }
    Root { x, iterations: max_iter, converged: false }
}

/// Plain bisection on a sign-change bracket.
pub fn bisect<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> Root {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    if flo == 0.0 {
        return Root { x: lo, iterations: 0, converged: true };
    }
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 || (hi - lo).abs() < xtol {
            return Root { x: mid, iterations: it, converged: true };
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Root { x: 0.5 * (lo + hi), iterations: max_iter, converged: false }
}

/// Brent's minimizer on `[a, b]` (parabolic interpolation with golden
/// section fallback). Returns `(argmin, min)`.
pub fn brent_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = if a < b { (a, b) } else { (b, a) };
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = xtol + 1e-12 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if !(p.abs() >= (0.5 * q * etemp).abs() || p <= q * (a - x) || p >= q * (b - x)) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}
