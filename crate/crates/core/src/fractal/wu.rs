//! Wu's line: the real line with tiny intervals `I_n = [1/n - s_n, 1/n]`
//! re-metrized by the concave profiles `φ_{α_n, c_n}`.

use super::FractalError;

/// `L(α, c) = (1/c)·(cα / (1 - c(1-α)))^α`, evaluated in log space so that
/// very small `c` does not underflow.
pub fn wu_l(alpha: f64, c: f64) -> f64 {
    let ln = -c.ln() + alpha * (c.ln() + alpha.ln() - (-c * (1.0 - alpha)).ln_1p());
    ln.exp()
}

/// The profile `φ_{α,c}` on `[0, 1]`: linear with slope `L(α,c)` up to `c`,
/// then `((x - c(1-α)) / (1 - c(1-α)))^α`.
pub fn wu_phi(alpha: f64, c: f64, x: f64) -> f64 {
    if x <= c {
        wu_l(alpha, c) * x
    } else {
        let k = c * (1.0 - alpha);
        ((x - k) / (1.0 - k)).powf(alpha)
    }
}

/// Parameters `(α_n, c_n, s_n)` for `n = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct WuSchedule {
    alpha: Vec<f64>,
    c: Vec<f64>,
    s: Vec<f64>,
}

impl WuSchedule {
    /// Validates the schedule on its whole length.
    pub fn new(alpha: Vec<f64>, c: Vec<f64>, s: Vec<f64>) -> Result<Self, FractalError> {
        if alpha.len() != c.len() || c.len() != s.len() {
            return Err(FractalError::Schedule(format!(
                "sequence lengths differ: {} alphas, {} cs, {} ss",
                alpha.len(),
                c.len(),
                s.len()
            )));
        }
        let mut prev_weight = f64::INFINITY;
        for i in 0..alpha.len() {
            let n = (i + 1) as f64;
            let (a, ci, si) = (alpha[i], c[i], s[i]);
            if !(a > 0.0 && a < 1.0) {
                return Err(bad(i, format!("alpha = {a} is not in (0,1)")));
            }
            if i > 0 && !(a > alpha[i - 1]) {
                return Err(bad(i, "alpha is not increasing".into()));
            }
            if !(ci > 0.0 && ci < 1.0) {
                return Err(bad(i, format!("c = {ci} is not in (0,1)")));
            }
            if !(si > 0.0) || !si.is_finite() {
                return Err(bad(i, format!("s = {si} is not positive")));
            }
            if !(si < 2.0 * (1.0 / n - 1.0 / (n + 1.0))) {
                return Err(bad(i, format!("s = {si} is not below 2(1/n - 1/(n+1))")));
            }
            // Overlapping intervals would make the branch table ambiguous.
            if !(1.0 / n - si > 1.0 / (n + 1.0)) {
                return Err(bad(i, format!("s = {si} makes I_n meet I_(n+1)")));
            }
            let w = si * wu_l(a, ci);
            if !(w < prev_weight) {
                return Err(bad(i, "s_n·L(α_n, c_n) is not decreasing".into()));
            }
            prev_weight = w;
        }
        Ok(Self { alpha, c, s })
    }

    /// `α_n = 1 - 1/(n+1)`, `c_n = 2^(-n²)`, `s_n = 2^(-n) / (4·L(α_n, c_n))`.
    pub fn preset(levels: usize) -> Result<Self, FractalError> {
        let mut alpha = Vec::with_capacity(levels);
        let mut c = Vec::with_capacity(levels);
        let mut s = Vec::with_capacity(levels);
        for n in 1..=levels {
            let nf = n as f64;
            let a = 1.0 - 1.0 / (nf + 1.0);
            let cn = (-(nf * nf) * std::f64::consts::LN_2).exp();
            alpha.push(a);
            c.push(cn);
            s.push(0.5f64.powi(n as i32) / (4.0 * wu_l(a, cn)));
        }
        Self::new(alpha, c, s)
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// The interval `I_n` for `n = 1..=len()`.
    pub fn interval(&self, n: usize) -> [f64; 2] {
        let b = 1.0 / n as f64;
        [b - self.s[n - 1], b]
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.s[n - 1] * wu_l(self.alpha[n - 1], self.c[n - 1])
    }

    /// `δ_n(x, y) = s_n·φ_n(|x - y| / s_n)`.
    fn delta_n(&self, n: usize, x: f64, y: f64) -> f64 {
        let s = self.s[n - 1];
        let t = ((x - y).abs() / s).min(1.0);
        s * wu_phi(self.alpha[n - 1], self.c[n - 1], t)
    }

    /// Index of the interval containing `x`, if any.
    fn which(&self, x: f64) -> Option<usize> {
        if !(x > 0.0 && x <= 1.0) {
            return None;
        }
        // I_n lies in (1/(n+1), 1/n], so only n = floor(1/x) can hold x.
        let guess = (1.0 / x).floor() as usize;
        (guess.saturating_sub(1)..=guess + 1)
            .filter(|&n| n >= 1 && n <= self.len())
            .find(|&n| {
                let [a, b] = self.interval(n);
                a <= x && x <= b
            })
    }
}

fn bad(i: usize, msg: String) -> FractalError {
    FractalError::Schedule(format!("n = {}: {msg}", i + 1))
}

/// Wu's metric `δ(x, y)` using the intervals `I_1, ..., I_N`.
pub fn wu_line_metric(x: f64, y: f64, sched: &WuSchedule, truncation: usize) -> Result<f64, FractalError> {
    if truncation > sched.len() {
        return Err(FractalError::Schedule(format!(
            "truncation {truncation} exceeds the {} schedule entries",
            sched.len()
        )));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(FractalError::Domain(format!("points must be finite, got {x}, {y}")));
    }
    Ok(delta(x, y, sched, truncation))
}

pub(crate) fn delta(x: f64, y: f64, sched: &WuSchedule, truncation: usize) -> f64 {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    if x == y {
        return 0.0;
    }
    let loc = |p: f64| sched.which(p).filter(|&n| n <= truncation);
    match (loc(x), loc(y)) {
        (Some(n), Some(m)) if n == m => sched.delta_n(n, x, y),
        (None, None) => y - x,
        (None, Some(n)) => {
            let a = sched.interval(n)[0];
            (a - x) + sched.delta_n(n, a, y)
        }
        (Some(n), None) => {
            let b = sched.interval(n)[1];
            sched.delta_n(n, x, b) + (y - b)
        }
        (Some(n), Some(m)) => {
            let b = sched.interval(n)[1];
            let a = sched.interval(m)[0];
            sched.delta_n(n, x, b) + (a - b).abs() + sched.delta_n(m, a, y)
        }
    }
}

/// Sample of `[lo, hi]` with spacing `h`, refined inside each `I_n` to
/// spacing `h / L_n` so the sample is an `h`-net for `δ`; interval
/// endpoints are always included.
pub(crate) fn wu_sample(sched: &WuSchedule, truncation: usize, lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let mut xs = Vec::new();
    let k = ((hi - lo) / h).round() as usize;
    for i in 0..=k {
        xs.push((lo + i as f64 * h).min(hi));
    }
    for n in 1..=truncation.min(sched.len()) {
        let [a, b] = sched.interval(n);
        if b < lo || a > hi {
            continue;
        }
        let l = wu_l(sched.alpha[n - 1], sched.c[n - 1]);
        let step = h / l;
        let cnt = (((b - a) / step).ceil() as usize).clamp(1, 4096);
        for i in 0..=cnt {
            let x = a + (b - a) * i as f64 / cnt as f64;
            if x >= lo && x <= hi {
                xs.push(x);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_at_one_half() {
        // (1/c)(cα/(1-c(1-α)))^α at α = c = 1/2 is 2·(1/3)^(1/2).
        assert!((wu_l(0.5, 0.5) - 1.1547005383792515).abs() < 1e-14);
    }

    #[test]
    fn phi_is_continuous_and_normalized() {
        for &(a, c) in &[(0.5, 0.5), (0.9, 0.01), (0.3, 0.7)] {
            let left = wu_phi(a, c, c);
            let right = {
                let k = c * (1.0 - a);
                ((c - k) / (1.0 - k)).powf(a)
            };
            assert!((left - right).abs() < 1e-12);
            assert!((wu_phi(a, c, 1.0) - 1.0).abs() < 1e-15);
            assert_eq!(wu_phi(a, c, 0.0), 0.0);
        }
    }

    #[test]
    fn preset_is_valid_and_small() {
        let s = WuSchedule::preset(6).unwrap();
        for n in 1..=6 {
            let [a, b] = s.interval(n);
            assert!(a < b && a > 1.0 / (n as f64 + 1.0));
        }
        assert!(s.weight(2) < s.weight(1));
    }

    #[test]
    fn schedule_errors_name_the_level() {
        let e = WuSchedule::new(vec![0.5, 0.4], vec![0.5, 0.5], vec![0.01, 0.001]).unwrap_err();
        assert!(e.to_string().contains("n = 2"), "{e}");
        assert!(WuSchedule::new(vec![0.5], vec![1.0], vec![0.01]).is_err());
        assert!(WuSchedule::new(vec![0.5], vec![0.5], vec![0.9]).is_err());
        let e = WuSchedule::preset(3).unwrap();
        assert!(wu_line_metric(0.0, 1.0, &e, 4).is_err());
    }

    #[test]
    fn euclidean_outside_the_intervals() {
        let s = WuSchedule::preset(5).unwrap();
        for &(x, y) in &[(-1.0, 2.0), (0.0, 0.1), (0.3, 0.45), (1.5, 1.25), (-0.2, 0.05)] {
            assert_eq!(wu_line_metric(x, y, &s, 5).unwrap(), (x - y).abs());
        }
    }

    #[test]
    fn inside_an_interval_it_stretches() {
        let s = WuSchedule::preset(3).unwrap();
        let [a, b] = s.interval(2);
        let d = wu_line_metric(a, a + (b - a) * 0.01, &s, 3).unwrap();
        assert!(d > (b - a) * 0.01);
        assert!((wu_line_metric(a, b, &s, 3).unwrap() - (b - a)).abs() < 1e-15);
    }

    #[test]
    fn sample_is_a_metric() {
        let s = WuSchedule::preset(4).unwrap();
        let xs = wu_sample(&s, 4, 0.0, 1.0, 1.0 / 16.0);
        let n = xs.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| delta(xs[i], xs[j], &s, 4)).collect())
            .collect();
        let r = crate::metric::validate_metric(&rows).unwrap();
        assert!(r.is_metric(), "{r}");
    }
}
