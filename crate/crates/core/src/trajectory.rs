//! Deterministic trajectories of the removal process: densities, the
//! exclusion rate `rho`, the predicted counts `f_edge`, `A`, `f_{j,c}`, `F`,
//! the error functions and the conjectured leading-order count.
//!
//! The step index `i` is a real number here; integer steps only index
//! snapshots.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::configs::{count_J, ErdosCatalog};
use crate::error::{invalid, Error, Result};
use crate::triple::binom_f64;

/// The constants `C`, `eps0` and `gamma` that are left free asymptotically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Growth rate of the error function.
    pub c_err: f64,
    pub eps0: f64,
    /// The process is followed up to `(1 - gamma) n^2 / 6` steps.
    pub gamma: f64,
}

impl Default for Constants {
    /// Calibrated at `n = 500, k = 4`. They pass the startup check
    /// `f_edge(tau_cut) > eps(tau_cut) n` for every `n >= 100` when `k <= 4`;
    /// larger `k` makes `rho` bigger and needs a smaller `eps0` or larger
    /// `gamma`.
    fn default() -> Self {
        Constants {
            c_err: 1.0,
            eps0: 0.1,
            gamma: 0.4,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    pub n: usize,
    pub k: usize,
    pub jmax: usize,
    /// `J[j]` for `0 <= j <= jmax`: labeled Erdős configurations on `j`
    /// points through a fixed triple.
    pub J: Vec<f64>,
    pub constants: Constants,
    /// `2 * jmax`, the vertex cap for extension types.
    pub m: usize,
}

/// Outcome of [`TrajectoryParams::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub tau_cut: u64,
    pub f_edge_at_cut: f64,
    pub eps_n_at_cut: f64,
}

/// Residuals of the derivative identities at one point. Each residual is
/// `|finite difference - closed form|` divided by the sum of the absolute
/// values of the closed form's terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeResiduals {
    pub i: f64,
    pub edge: f64,
    /// `(j, c, residual)` for `c >= 1`.
    pub triple: Vec<(usize, usize, f64)>,
    /// `(j, residual)` for `c = 0`.
    pub triple_zero: Vec<(usize, f64)>,
}

impl DerivativeResiduals {
    pub fn max(&self) -> f64 {
        self.triple
            .iter()
            .map(|t| t.2)
            .chain(self.triple_zero.iter().map(|t| t.1))
            .fold(self.edge, f64::max)
    }
}

impl TrajectoryParams {
    /// `J_j` taken from the catalog's `erd_j`. Requires `k >= 2` and a
    /// catalog covering `k + 2` points.
    pub fn new(n: usize, k: usize, catalog: &ErdosCatalog, constants: Constants) -> Result<TrajectoryParams> {
        let jmax = k + 2;
        if catalog.jmax() < jmax {
            return Err(invalid(format!("catalog covers j <= {}, need {jmax}", catalog.jmax())));
        }
        let table = (0..=jmax).map(|j| count_J(n, j, catalog)).collect();
        Self::with_table(n, k, table, constants)
    }

    /// Direct construction from a `J` table indexed by `j`.
    pub fn with_table(n: usize, k: usize, table: Vec<f64>, constants: Constants) -> Result<TrajectoryParams> {
        if k < 2 {
            return Err(invalid(format!("k must be at least 2, got {k}")));
        }
        let jmax = k + 2;
        if n < 6 {
            return Err(invalid(format!("n must be at least 6, got {n}")));
        }
        if table.len() != jmax + 1 {
            return Err(invalid(format!("J table needs {} entries, got {}", jmax + 1, table.len())));
        }
        if table.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(invalid("J table entries must be finite and non-negative"));
        }
        let Constants { c_err, eps0, gamma } = constants;
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(invalid(format!("eps0 must lie in (0, 1], got {eps0}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        if !(c_err > 0.0 && c_err.is_finite()) {
            return Err(invalid(format!("C must be positive, got {c_err}")));
        }
        Ok(TrajectoryParams {
            n,
            k,
            jmax,
            J: table,
            constants,
            m: 2 * jmax,
        })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    fn pairs(&self) -> f64 {
        binom_f64(self.nf(), 2)
    }

    fn triples(&self) -> f64 {
        binom_f64(self.nf(), 3)
    }

    /// Largest meaningful step: `C(n,2) / 3`.
    pub fn i_max(&self) -> f64 {
        self.pairs() / 3.0
    }

    fn check_i(&self, i: f64) -> Result<()> {
        if i.is_nan() || i < 0.0 || i > self.i_max() {
            return Err(invalid(format!("step {i} outside [0, {}]", self.i_max())));
        }
        Ok(())
    }

    /// Density of uncovered pairs, `1 - 3i / C(n,2)`.
    pub fn p(&self, i: f64) -> Result<f64> {
        self.check_i(i)?;
        Ok(self.p_raw(i))
    }

    /// Density of chosen triples, `i / C(n,3)`.
    pub fn p_c(&self, i: f64) -> Result<f64> {
        self.check_i(i)?;
        Ok(self.p_c_raw(i))
    }

    fn p_raw(&self, i: f64) -> f64 {
        1.0 - 3.0 * i / self.pairs()
    }

    fn p_c_raw(&self, i: f64) -> f64 {
        i / self.triples()
    }

    /// `-p'(i) / p(i)`.
    fn log_p_slope(&self, i: f64) -> f64 {
        3.0 / (self.pairs() * self.p_raw(i))
    }

    /// `rho(i) = sum_{j=6}^{jmax} J_j (i / C(n,3))^(j-3)`. A polynomial, so
    /// defined for every real `i`.
    pub fn rho(&self, i: f64) -> f64 {
        let x = self.p_c_raw(i);
        (6..=self.jmax).map(|j| self.J[j] * x.powi(j as i32 - 3)).sum()
    }

    pub fn rho_prime(&self, i: f64) -> f64 {
        let x = self.p_c_raw(i);
        (6..=self.jmax)
            .map(|j| (j - 3) as f64 * self.J[j] * x.powi(j as i32 - 4))
            .sum::<f64>()
            / self.triples()
    }

    /// Predicted number of available triples on an uncovered pair.
    pub fn f_edge(&self, i: f64) -> f64 {
        (-self.rho(i)).exp() * self.p_raw(i).powi(2) * (self.nf() - 2.0)
    }

    /// Predicted number of available triples.
    pub fn a_traj(&self, i: f64) -> f64 {
        (-self.rho(i)).exp() * self.p_raw(i).powi(3) * self.triples()
    }

    /// The same quantity through `p(i) C(n,2) f_edge(i) / 3`.
    pub fn a_traj_via_edge(&self, i: f64) -> f64 {
        self.p_raw(i) * self.pairs() * self.f_edge(i) / 3.0
    }

    /// Predicted number of Erdős configurations on `j` points through an
    /// available triple with `c` other blocks chosen and the rest available.
    pub fn f_jc(&self, i: f64, j: usize, c: usize) -> Result<f64> {
        if !(6..=self.jmax).contains(&j) || c + 4 > j {
            return Err(invalid(format!("need 6 <= j <= {} and c <= j - 4, got j={j} c={c}", self.jmax)));
        }
        Ok(self.f_jc_raw(i, j, c))
    }

    fn f_jc_raw(&self, i: f64, j: usize, c: usize) -> f64 {
        let free = (j - 3 - c) as i32;
        binom_f64((j - 3) as f64, c as u32)
            * (-(free as f64) * self.rho(i)).exp()
            * self.p_raw(i).powi(3 * free)
            * self.p_c_raw(i).powi(c as i32)
            * self.J[j]
    }

    /// `F(i) = sum_j f_{j,j-4}(i)`: the predicted number of dangerous
    /// configurations through an available triple.
    pub fn big_f(&self, i: f64) -> f64 {
        (6..=self.jmax).map(|j| self.f_jc_raw(i, j, j - 4)).sum()
    }

    /// `eps(i) = (1 + C/n^2)^i eps0`.
    pub fn eps(&self, i: f64) -> f64 {
        let n2 = self.nf() * self.nf();
        (i * (self.constants.c_err / n2).ln_1p()).exp() * self.constants.eps0
    }

    /// Error allowance for `(kappa, ell)` extension counts,
    /// `n^(kappa + ell/(m + kappa)) (1 + i/n^2)`.
    pub fn eps_kl(&self, i: f64, kappa: usize, ell: usize) -> Result<f64> {
        if ell < 1 || ell > self.m || kappa > ell {
            return Err(invalid(format!("need 1 <= ell <= {} and kappa <= ell, got kappa={kappa} ell={ell}", self.m)));
        }
        let n = self.nf();
        let expo = kappa as f64 + ell as f64 / (self.m + kappa) as f64;
        Ok(n.powf(expo) * (1.0 + i / (n * n)))
    }

    /// `floor((1 - gamma) n^2 / 6)`.
    pub fn tau_cut(&self) -> u64 {
        ((1.0 - self.constants.gamma) * self.nf() * self.nf() / 6.0).floor() as u64
    }

    /// Startup check replacing the asymptotic constant hierarchy: the `J`
    /// table has the expected shape, every trajectory is positive up to
    /// `tau_cut`, and `f_edge(tau_cut) - eps(tau_cut) n > 0`.
    pub fn validate(&self) -> Result<Validation> {
        if self.J.get(5).copied().unwrap_or(0.0) != 0.0 {
            return Err(invalid("J_5 must vanish"));
        }
        for j in 6..=self.jmax.min(self.n) {
            if self.J[j] <= 0.0 {
                return Err(invalid(format!("J_{j} must be positive")));
            }
        }
        let tau = self.tau_cut();
        let t = tau as f64;
        if t > self.i_max() {
            return Err(invalid("tau_cut exceeds the step range"));
        }
        for s in 0..=64 {
            let i = t * s as f64 / 64.0;
            let mut vals = vec![self.f_edge(i), self.a_traj(i)];
            // Terms with chosen blocks start at zero.
            let c_max = |j: usize| if s == 0 { 0 } else { j - 4 };
            for j in 6..=self.jmax {
                vals.extend((0..=c_max(j)).map(|c| self.f_jc_raw(i, j, c)));
            }
            if s > 0 && self.jmax >= 6 {
                vals.push(self.big_f(i));
            }
            if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(invalid(format!("a trajectory is not positive at i={i}")));
            }
        }
        let report = Validation {
            tau_cut: tau,
            f_edge_at_cut: self.f_edge(t),
            eps_n_at_cut: self.eps(t) * self.nf(),
        };
        if report.f_edge_at_cut <= report.eps_n_at_cut {
            return Err(invalid(format!(
                "constants too loose for n={}: f_edge(tau_cut) = {:.4} <= eps(tau_cut) n = {:.4}; lower eps0 or C, or raise gamma",
                self.n, report.f_edge_at_cut, report.eps_n_at_cut
            )));
        }
        Ok(report)
    }

    /// Central difference with one Richardson extrapolation step.
    fn derivative(f: impl Fn(f64) -> f64, i: f64, h: f64) -> f64 {
        let d = |h: f64| (f(i + h) - f(i - h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    /// Compares finite-difference derivatives of `f_edge` and every
    /// `f_{j,c}` against their closed forms in terms of `f_edge`, `F`, `A`.
    /// The step is chosen so that every function changes by about 2% over
    /// it, judged by the closed-form logarithmic derivatives.
    pub fn derivative_checks(&self, i: f64) -> Result<DerivativeResiduals> {
        if !(i > 0.0 && i < self.i_max()) {
            return Err(invalid(format!("step {i} is not an interior point")));
        }
        let fe = self.f_edge(i);
        let ff = self.big_f(i);
        let a = self.a_traj(i);
        // (j, c, value, closed-form derivative, sum of its absolute terms);
        // j = 0 stands for f_edge.
        let mut parts = vec![(0, 0, fe, -(2.0 * fe + ff) * fe / a, (2.0 * fe + ff).abs() * fe / a)];
        for j in 6..=self.jmax {
            for c in 0..=j - 4 {
                let f = self.f_jc_raw(i, j, c);
                let loss = (j - 3 - c) as f64 * (3.0 * fe + ff) * f / a;
                let gain = if c == 0 {
                    0.0
                } else {
                    (j - 2 - c) as f64 * self.f_jc_raw(i, j, c - 1) / a
                };
                parts.push((j, c, f, gain - loss, loss.abs() + gain.abs()));
            }
        }
        let rate = parts
            .iter()
            .filter(|p| p.2 != 0.0)
            .map(|p| p.4 / p.2.abs())
            .fold(0.0, f64::max);
        let mut h = i.min(self.i_max() - i) / 64.0;
        if rate > 0.0 {
            h = h.min(0.02 / rate);
        }
        let rel = |num: f64, terms: f64, lhs: f64| {
            let scale = terms.max(lhs.abs());
            if scale == 0.0 {
                0.0
            } else {
                (lhs - num).abs() / scale
            }
        };
        let mut edge = 0.0;
        let mut triple = Vec::new();
        let mut triple_zero = Vec::new();
        for (j, c, _, closed, terms) in parts {
            let lhs = if j == 0 {
                Self::derivative(|x| self.f_edge(x), i, h)
            } else {
                Self::derivative(|x| self.f_jc_raw(x, j, c), i, h)
            };
            let r = rel(closed, terms, lhs);
            match (j, c) {
                (0, _) => edge = r,
                (_, 0) => triple_zero.push((j, r)),
                _ => triple.push((j, c, r)),
            }
        }
        Ok(DerivativeResiduals {
            i,
            edge,
            triple,
            triple_zero,
        })
    }

    /// `F(i)/A(i)` and `rho'(i)`; equal by construction of `rho`.
    pub fn big_f_over_a(&self, i: f64) -> (f64, f64) {
        (self.big_f(i) / self.a_traj(i), self.rho_prime(i))
    }

    /// `f_edge(i)/A(i)` and `6 / (p(i) n (n-1))`.
    pub fn f_edge_over_a(&self, i: f64) -> (f64, f64) {
        let n = self.nf();
        (self.f_edge(i) / self.a_traj(i), 6.0 / (self.p_raw(i) * n * (n - 1.0)))
    }

    /// `-p'(i)/p(i)`.
    pub fn neg_log_p_slope(&self, i: f64) -> f64 {
        self.log_p_slope(i)
    }

    /// Column names of [`TrajectoryParams::grid_csv`].
    pub fn grid_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["i", "p", "rho", "f_edge", "A", "F"].iter().map(|s| s.to_string()).collect();
        for j in 6..=self.jmax {
            for c in 0..=j - 4 {
                cols.push(format!("f_j{j}_c{c}"));
            }
        }
        cols.push("eps".into());
        cols
    }

    /// `points` evenly spaced steps from 0 to `tau_cut` inclusive, one CSV row
    /// each, preceded by the header.
    pub fn grid_csv(&self, points: usize) -> Result<String> {
        if points < 2 {
            return Err(invalid("grid needs at least 2 points"));
        }
        let tau = self.tau_cut() as f64;
        let mut out = self.grid_columns().join(",");
        out.push('\n');
        for s in 0..points {
            let i = (tau * s as f64 / (points - 1) as f64).round();
            let mut row = vec![i, self.p_raw(i), self.rho(i), self.f_edge(i), self.a_traj(i), self.big_f(i)];
            for j in 6..=self.jmax {
                row.extend((0..=j - 4).map(|c| self.f_jc_raw(i, j, c)));
            }
            row.push(self.eps(i));
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        Ok(out)
    }
}

/// `2 + sum_{j=6}^{k+2} erd_j / (j-2)!`, the conjectured constant in
/// `(n e^{-const} + o(n))^{n^2/6}` for the number of k-sparse Steiner
/// triple systems. A conjecture, not a theorem.
pub fn count_exponent_constant(k: usize, catalog: &ErdosCatalog) -> Result<f64> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    if catalog.jmax() < k + 2 {
        return Err(Error::InvalidParameter(format!(
            "catalog covers j <= {}, need {}",
            catalog.jmax(),
            k + 2
        )));
    }
    let mut total = 2.0;
    for j in 6..=k + 2 {
        let fact: f64 = (1..=j - 2).map(|x| x as f64).product();
        total += catalog.erd(j) as f64 / fact;
    }
    Ok(total)
}

/// Conjectured leading-order natural log of the number of k-sparse Steiner
/// triple systems on `n` points: `(n^2/6)(ln n - const)`.
pub fn conjectured_log_count(n: usize, k: usize, catalog: &ErdosCatalog) -> Result<f64> {
    if n < 3 {
        return Err(invalid(format!("n must be at least 3, got {n}")));
    }
    let c = count_exponent_constant(k, catalog)?;
    let n = n as f64;
    Ok(n * n / 6.0 * (n.ln() - c))
}

/// Composite Simpson rule with `intervals` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) & !1;
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for s in 1..m {
        let w = if s % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * s as f64);
    }
    acc * h / 3.0
}

/// `int_0^{n^2/6} rho(i) di` by Simpson quadrature.
pub fn rho_integral(params: &TrajectoryParams, intervals: usize) -> f64 {
    let n = params.n as f64;
    simpson(|i| params.rho(i), 0.0, n * n / 6.0, intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::enumerate_erdos;
    use std::sync::OnceLock;

    fn catalog() -> &'static ErdosCatalog {
        static CAT: OnceLock<ErdosCatalog> = OnceLock::new();
        CAT.get_or_init(|| enumerate_erdos(8).unwrap())
    }

    fn params(n: usize, k: usize) -> TrajectoryParams {
        TrajectoryParams::new(n, k, catalog(), Constants::default()).unwrap()
    }

    #[test]
    fn initial_values() {
        let t = params(500, 4);
        let n = 500.0;
        assert_eq!(t.p(0.0).unwrap(), 1.0);
        assert!(t.p(t.i_max()).unwrap().abs() < 1e-12);
        assert_eq!(t.p_c(0.0).unwrap(), 0.0);
        assert!(t.p(-1.0).is_err() && t.p(t.i_max() + 1.0).is_err());
        assert_eq!(t.rho(0.0), 0.0);
        assert_eq!(t.f_edge(0.0), n - 2.0);
        assert!((t.a_traj(0.0) - binom_f64(n, 3)).abs() < 1e-6);
        assert_eq!(t.f_jc(0.0, 6, 0).unwrap(), t.J[6]);
        assert_eq!(t.f_jc(0.0, 6, 1).unwrap(), 0.0);
        assert_eq!(t.f_jc(0.0, 6, 2).unwrap(), 0.0);
        assert!(t.f_jc(0.0, 6, 3).is_err() && t.f_jc(0.0, 7, 0).is_err());
        assert_eq!(t.eps(0.0), 0.1);
        let m = t.m as f64;
        assert!((t.eps_kl(0.0, 1, 3).unwrap() - n.powf(1.0 + 3.0 / (m + 1.0))).abs() < 1e-9);
        assert!(t.eps_kl(0.0, 4, 3).is_err());
    }

    #[test]
    fn single_term_rho_for_pasch_free() {
        let t = params(300, 4);
        let j6 = 6.0 * binom_f64(297.0, 3);
        assert!((t.J[6] - j6).abs() < 1e-6);
        for i in [0.0, 100.0, 5000.0, t.i_max()] {
            let direct = j6 * i.powi(3) / binom_f64(300.0, 3).powi(3);
            assert!((t.rho(i) - direct).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn identities_on_a_grid() {
        for k in [4, 5, 6] {
            let t = params(1000, k);
            let tau = t.tau_cut() as f64;
            for s in 1..=50 {
                let i = tau * s as f64 / 51.0;
                let a = t.a_traj(i);
                assert!((a - t.a_traj_via_edge(i)).abs() <= 1e-12 * a);
                let (lhs, rhs) = t.big_f_over_a(i);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
                let (lhs, rhs) = t.f_edge_over_a(i);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
                assert!((rhs - t.neg_log_p_slope(i)).abs() <= 1e-12 * rhs);
                for j in 6..=t.jmax {
                    for c in 1..=j - 4 {
                        let ratio = t.f_jc(i, j, c - 1).unwrap() / t.f_jc(i, j, c).unwrap();
                        let expect = c as f64 * a / ((j - 2 - c) as f64 * i);
                        assert!((ratio - expect).abs() <= 1e-10 * expect, "j={j} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn error_function_bounds() {
        let t = params(200, 4);
        let n = 200.0;
        let cap = t.constants.c_err.exp() * t.constants.eps0;
        for s in 0..=100 {
            let i = t.i_max() * s as f64 / 100.0;
            assert!(t.eps(i) <= cap);
            let step = t.eps(i + 1.0) - t.eps(i);
            let expect = t.constants.c_err * t.eps(i) / (n * n);
            assert!((step - expect).abs() <= 1e-9 * expect);
        }
    }

    #[test]
    fn monotonicity_and_magnitudes() {
        let t = params(2000, 6);
        let n = 2000.0f64;
        // p_c(i_max) = 1/(n-2), so rho(i_max) <= sum erd_j / (j-3)!.
        let rho_cap = 6.0 / 6.0 + 60.0 / 24.0 + 2520.0 / 120.0;
        let mut prev = (-1.0, 2.0);
        for s in 0..=200 {
            let i = t.i_max() * s as f64 / 200.0;
            let (rho, p) = (t.rho(i), t.p(i).unwrap());
            assert!(rho >= prev.0 && p < prev.1);
            prev = (rho, p);
            assert!(rho <= rho_cap);
            for j in 6..=8 {
                for c in 0..=j - 4 {
                    let f = t.f_jc(i, j, c).unwrap();
                    assert!(f <= 100.0 * n.powi((j - 3 - c) as i32));
                }
            }
        }
    }

    #[test]
    fn default_constants_validate() {
        for n in [100, 150, 500, 2000, 10_000] {
            for k in 2..=4 {
                params(n, k).validate().unwrap();
            }
        }
        let loose = Constants {
            c_err: 40.0,
            eps0: 1e-3,
            gamma: 0.15,
        };
        let t = TrajectoryParams::new(500, 4, catalog(), loose).unwrap();
        assert!(t.validate().is_err());
        assert!(params(500, 6).validate().is_err());
        let tight = Constants {
            c_err: 1.0,
            eps0: 0.01,
            gamma: 0.4,
        };
        TrajectoryParams::new(500, 6, catalog(), tight).unwrap().validate().unwrap();
    }

    #[test]
    fn derivative_residuals_are_small() {
        let t = params(10_000, 4);
        let r = t.derivative_checks(t.tau_cut() as f64 / 2.0).unwrap();
        assert!(r.max() <= 1e-6, "{r:?}");
        assert!(t.derivative_checks(0.0).is_err());
    }

    #[test]
    fn conjectured_constants() {
        assert_eq!(count_exponent_constant(4, catalog()).unwrap(), 2.25);
        assert_eq!(count_exponent_constant(3, catalog()).unwrap(), 2.0);
        let expect = 1e6 / 6.0 * (1000f64.ln() - 2.25);
        assert!((conjectured_log_count(1000, 4, catalog()).unwrap() - expect).abs() < 1e-6);
        assert!(count_exponent_constant(7, catalog()).is_err());
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 3.0, 4);
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_columns_follow_k() {
        let t = params(100, 5);
        let csv = t.grid_csv(5).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(
            lines[0],
            "i,p,rho,f_edge,A,F,f_j6_c0,f_j6_c1,f_j6_c2,f_j7_c0,f_j7_c1,f_j7_c2,f_j7_c3,eps"
        );
        assert!(lines.iter().all(|l| l.split(',').count() == 14));
    }
}
