//! Error-free transformations for the few sums that must land within an ulp.

/// `a + b = s + e` exactly.
pub(crate) fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a · b = p + e` exactly (barring overflow).
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Double-double accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    hi: f64,
    lo: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, self.lo + e);
        self.hi = hi;
        self.lo = lo;
    }

    /// Adds `a · b` without rounding the product first.
    pub(crate) fn add_product(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }

    pub(crate) fn parts(&self) -> (f64, f64) {
        (self.hi, self.lo)
    }

    pub(crate) fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// `(n_hi + n_lo) / (d_hi + d_lo)` with one correction step.
pub(crate) fn div_dd(n: (f64, f64), d: (f64, f64)) -> f64 {
    let q = n.0 / d.0;
    let (p, pe) = two_prod(q, d.0);
    let r = ((n.0 - p) - pe + n.1) - q * d.1;
    q + r / d.0
}

/// Square of a double-double value.
pub(crate) fn square_dd(x: (f64, f64)) -> (f64, f64) {
    let (p, e) = two_prod(x.0, x.0);
    two_sum(p, e + 2.0 * x.0 * x.1)
}
