//! Neumaier-compensated accumulation.

use super::ComplexValue;

/// Running compensated sum of `f64` values (Neumaier's variant of Kahan).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Componentwise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexCompensatedSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexCompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: ComplexValue) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn value(&self) -> ComplexValue {
        ComplexValue::new(self.re.value(), self.im.value())
    }
}

/// Sums complex terms with compensation. The empty sum is zero.
pub fn compensated_sum<I: IntoIterator<Item = ComplexValue>>(terms: I) -> ComplexValue {
    let mut acc = ComplexCompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Real counterpart of [`compensated_sum`].
pub fn compensated_sum_real<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(terms);
    acc.value()
}
