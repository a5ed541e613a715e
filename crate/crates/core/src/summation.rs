//! Floating-point summation helpers for the numerical oracle.

/// Neumaier-compensated sum of nonnegative or mixed-sign values.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `ln(sum exp(x_i))`, shifted by the maximum and accumulated with
/// compensation. Returns `-inf` for an empty or all-zero input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add((v - top).exp());
    }
    top + acc.value().ln()
}

/// `sum_{m >= m0} m^rho` for `rho < -1`: direct summation of the first
/// `brute` terms, then an Euler-Maclaurin remainder.
pub fn power_tail_sum(m0: u64, rho: f64) -> f64 {
    assert!(rho < -1.0 && m0 >= 1);
    const BRUTE: u64 = 2000;
    // B_{2j} / (2j)! for j = 1..=5.
    const BERNOULLI: [f64; 5] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
    ];
    let mut acc = CompensatedSum::default();
    for m in m0..m0 + BRUTE {
        acc.add((m as f64).powf(rho));
    }
    let x0 = (m0 + BRUTE) as f64;
    let f0 = x0.powf(rho);
    acc.add(x0.powf(1.0 + rho) / (-1.0 - rho));
    acc.add(f0 / 2.0);
    // f^{(2j-1)}(x0) = rho (rho - 1) ... (rho - 2j + 2) x0^{rho - 2j + 1};
    // the remainder subtracts sum B_{2j}/(2j)! f^{(2j-1)}(x0).
    let mut falling = rho;
    let mut power = f0 / x0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        acc.add(-b * falling * power);
        let k = (2 * j + 1) as f64;
        falling *= (rho - k) * (rho - k - 1.0);
        power /= x0 * x0;
    }
    acc.value()
}
