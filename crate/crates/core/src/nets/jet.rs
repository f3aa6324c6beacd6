//! Truncated Taylor series in one variable.
//!
//! A [`Jet`] of order `n` at `x0` stores `c[k] = f^(k)(x0) / k!` for
//! `k = 0..=n`. Arithmetic on jets is exact to the truncation order, which
//! gives analytic derivatives of compositions without symbolic algebra.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least the constant term");
        Jet { c }
    }

    pub fn zero(order: usize) -> Self {
        Jet { c: vec![0.0; order + 1] }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        if k > self.order() {
            return 0.0;
        }
        self.c[k] * factorial(k)
    }

    /// All derivatives `0..=order`.
    pub fn derivatives(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.derivative(k)).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, other: &Jet) -> Self {
        let n = self.order().min(other.order());
        let b0 = other.c[0];
        let mut c = vec![0.0; n + 1];
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= other.c[j] * c[k - j];
            }
            c[k] = acc / b0;
        }
        Jet { c }
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut c = vec![0.0; n + 1];
        c[0] = self.c[0].exp();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = acc / k as f64;
        }
        Jet { c }
    }

    pub fn ln(&self) -> Self {
        let n = self.order();
        let a0 = self.c[0];
        let mut c = vec![0.0; n + 1];
        c[0] = a0.ln();
        for k in 1..=n {
            let mut acc = self.c[k];
            for (j, cj) in c.iter().enumerate().take(k).skip(1) {
                acc -= (j as f64 / k as f64) * cj * self.c[k - j];
            }
            c[k] = acc / a0;
        }
        Jet { c }
    }

    /// Real power; requires a nonzero constant term unless `p` is a
    /// nonnegative integer (use [`Jet::powi`] for those).
    pub fn powf(&self, p: f64) -> Self {
        let n = self.order();
        let a0 = self.c[0];
        let mut c = vec![0.0; n + 1];
        c[0] = a0.powf(p);
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((p + 1.0) * j as f64 - k as f64) * self.c[j] * c[k - j];
            }
            c[k] = acc / (k as f64 * a0);
        }
        Jet { c }
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn powi(&self, p: u32) -> Self {
        let mut result = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut co = vec![0.0; n + 1];
        s[0] = self.c[0].sin();
        co[0] = self.c[0].cos();
        for k in 1..=n {
            let (mut as_, mut ac) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * self.c[j];
                as_ += w * co[k - j];
                ac -= w * s[k - j];
            }
            s[k] = as_ / k as f64;
            co[k] = ac / k as f64;
        }
        (Jet { c: s }, Jet { c: co })
    }
}

impl<'a> Add for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            c: (0..=n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl<'a> Sub for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        let n = self.order().min(rhs.order());
        Jet {
            c: (0..=n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl<'a> Mul for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut c = vec![0.0; n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate().take(n + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
