//! Brute-force oracles shared by the integration tests.

/// `ln n!` by direct summation.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Two-sided Fisher exact p by listing every table with the observed
/// margins and summing those no more probable than the observed one.
pub fn fisher_enumeration(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let (r1, r2, c1) = (a + b, c + d, a + c);
    let n = r1 + r2;
    let ln_p = |x: u64| {
        ln_factorial(r1) + ln_factorial(r2) + ln_factorial(c1) + ln_factorial(n - c1)
            - ln_factorial(n)
            - ln_factorial(x)
            - ln_factorial(r1 - x)
            - ln_factorial(c1 - x)
            - ln_factorial(r2 + x - c1)
    };
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let observed = ln_p(a);
    (lo..=hi)
        .map(ln_p)
        .filter(|l| *l <= observed + 1e-7)
        .map(f64::exp)
        .sum::<f64>()
        .min(1.0)
}

/// `Q = (1/2m) sum_ij [w_ij - k_i k_j / 2m] [c_i == c_j]` on a dense
/// symmetric matrix with zero diagonal.
pub fn modularity_oracle(n: usize, w: &[f64], labels: &[usize]) -> f64 {
    let k: Vec<f64> = (0..n).map(|i| (0..n).map(|j| w[i * n + j]).sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += w[i * n + j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition of `n` nodes, visited as
/// restricted growth strings.
pub fn exhaustive_best_q(n: usize, w: &[f64]) -> f64 {
    let mut labels = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        best = best.max(modularity_oracle(n, w, &labels));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            if labels[i] <= maxes[i - 1] {
                labels[i] += 1;
                let m = maxes[i - 1].max(labels[i]);
                maxes[i] = m;
                for j in i + 1..n {
                    labels[j] = 0;
                    maxes[j] = m;
                }
                break;
            }
            i -= 1;
        }
    }
}
