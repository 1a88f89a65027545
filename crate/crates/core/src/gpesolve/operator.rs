//! Radial finite-difference operator and the matching quadratures.
//!
//! Nodes sit at `r_i = i·h`, `i = 0..n`, with `ψ_{n−1} = 0`. The kinetic
//! stencil is the central-difference form of `−½(ψ'' + (d−1)/r·ψ')`, with
//! the even-extension limit `−½·d·ψ''(0)` at the origin. Quadratures use
//! trapezoid weights times `S_d r^{d−1}`, except that in d = 2 the origin
//! carries the area of the disc of radius h/2. The kinetic energy is the edge
//! form `Σ ½ c_{i+½} ((ψ_{i+1} − ψ_i)/h)²·h·S_d`, whose gradient under that
//! inner product is exactly the stencil, so fixed points of the flow are
//! critical points of the discrete energy.

use crate::energy::EnergyBreakdown;
use crate::units::Dimension;

#[derive(Debug, Clone)]
pub(crate) struct RadialOperator {
    pub(crate) dimension: Dimension,
    pub(crate) spacing: f64,
    pub(crate) radii: Vec<f64>,
    /// Coefficient of ψ_{i−1} in row i (zero for i = 0).
    lower: Vec<f64>,
    /// Kinetic diagonal plus `½r²`.
    diag: Vec<f64>,
    /// Coefficient of ψ_{i+1} in row i.
    upper: Vec<f64>,
    /// `S_d · w_i · h · r_i^{d−1}` (`π h²/4` at the 2D origin).
    pub(crate) quad: Vec<f64>,
    /// `S_d · h · ½ c_{i+½} / h²` for the edge between i and i + 1.
    edge: Vec<f64>,
}

impl RadialOperator {
    pub(crate) fn new(dimension: Dimension, r_max: f64, n: usize) -> Self {
        let h = r_max / (n - 1) as f64;
        let h2 = h * h;
        let d = dimension.as_f64();
        let measure = dimension.sphere_measure();
        let radii: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();

        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        diag[0] = d / h2;
        upper[0] = -d / h2;
        for i in 1..n {
            let drift = (d - 1.0) / (2.0 * i as f64);
            lower[i] = -0.5 * (1.0 - drift) / h2;
            upper[i] = -0.5 * (1.0 + drift) / h2;
            diag[i] = 1.0 / h2 + 0.5 * radii[i] * radii[i];
        }

        let quad = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                if i == 0 && dimension == Dimension::Two {
                    return measure * h2 / 8.0;
                }
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                measure * w * h * r.powi(i32::from(dimension.get()) - 1)
            })
            .collect();
        let edge = (0..n - 1)
            .map(|i| {
                let c = match dimension {
                    Dimension::One => 1.0,
                    Dimension::Two => 0.5 * (radii[i] + radii[i + 1]),
                    Dimension::Three => radii[i] * radii[i + 1],
                };
                measure * h * 0.5 * c / h2
            })
            .collect();

        Self {
            dimension,
            spacing: h,
            radii,
            lower,
            diag,
            upper,
            quad,
            edge,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.radii.len()
    }

    pub(crate) fn norm_squared(&self, psi: &[f64]) -> f64 {
        self.quad.iter().zip(psi).map(|(w, p)| w * p * p).sum()
    }

    pub(crate) fn normalize(&self, psi: &mut [f64]) {
        let scale = self.norm_squared(psi).sqrt().recip();
        psi.iter_mut().for_each(|p| *p *= scale);
    }

    /// Energy terms and rms radius of a normalized profile.
    pub(crate) fn measure(&self, psi: &[f64], coupling: f64) -> (EnergyBreakdown, f64) {
        let kinetic: f64 = self
            .edge
            .iter()
            .zip(psi.windows(2))
            .map(|(e, w)| e * (w[1] - w[0]).powi(2))
            .sum();
        let mut potential = 0.0;
        let mut interaction = 0.0;
        let mut second_moment = 0.0;
        for ((w, r), p) in self.quad.iter().zip(&self.radii).zip(psi) {
            let density = p * p;
            let r2 = r * r;
            second_moment += w * r2 * density;
            potential += w * 0.5 * r2 * density;
            interaction += w * 0.5 * coupling * density * density;
        }
        (
            EnergyBreakdown::new(kinetic, potential, interaction),
            second_moment.sqrt(),
        )
    }

    /// Upper bound on the spectrum of the linear part (Gershgorin).
    pub(crate) fn linear_spectral_bound(&self) -> f64 {
        (0..self.len() - 1)
            .map(|i| self.diag[i].abs() + self.lower[i].abs() + self.upper[i].abs())
            .fold(0.0, f64::max)
    }

    /// `ψ ← ψ − τ H[ψ]ψ`.
    pub(crate) fn explicit_step(&self, psi: &mut [f64], scratch: &mut Vec<f64>, coupling: f64, tau: f64) {
        let n = self.len();
        scratch.clear();
        scratch.extend_from_slice(psi);
        let old = &scratch[..];
        for i in 0..n - 1 {
            let left = if i > 0 { self.lower[i] * old[i - 1] } else { 0.0 };
            let centre = (self.diag[i] + coupling * old[i] * old[i]) * old[i];
            let h_psi = left + centre + self.upper[i] * old[i + 1];
            psi[i] = old[i] - tau * h_psi;
        }
        psi[n - 1] = 0.0;
    }

    /// Backward-Euler step with the density frozen at the current iterate:
    /// `(1 + τ(H[ψ_k] + s)) ψ* = (1 + τs) ψ_k`.
    ///
    /// The shift `s ≥ 0` is only nonzero when `g·ψ² < −1/(2τ)` somewhere and
    /// keeps the system strictly diagonally dominant, so ψ* stays nonnegative.
    /// Fixed points satisfy `Hψ = μψ` for any shift.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn implicit_step(&self, psi: &mut [f64], work: &mut TridiagonalWork, coupling: f64, tau: f64) {
        let n = self.len();
        let m = n - 1;
        let deepest = psi[..m].iter().map(|p| coupling * p * p).fold(0.0, f64::min);
        let shift = (-deepest - 0.5 / tau).max(0.0);

        work.resize(m);
        for i in 0..m {
            work.sub[i] = tau * self.lower[i];
            work.main[i] = 1.0 + tau * (self.diag[i] + coupling * psi[i] * psi[i] + shift);
            work.sup[i] = if i + 1 < m { tau * self.upper[i] } else { 0.0 };
            work.rhs[i] = (1.0 + tau * shift) * psi[i];
        }
        work.solve_into(&mut psi[..m]);
        psi[m] = 0.0;
    }
}

/// Scratch buffers for the Thomas algorithm.
#[derive(Debug, Default, Clone)]
pub(crate) struct TridiagonalWork {
    sub: Vec<f64>,
    main: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    c_prime: Vec<f64>,
}

impl TridiagonalWork {
    fn resize(&mut self, m: usize) {
        for v in [&mut self.sub, &mut self.main, &mut self.sup, &mut self.rhs, &mut self.c_prime] {
            v.resize(m, 0.0);
        }
    }

    fn solve_into(&mut self, out: &mut [f64]) {
        let m = out.len();
        self.c_prime[0] = self.sup[0] / self.main[0];
        self.rhs[0] /= self.main[0];
        for i in 1..m {
            let denom = self.main[i] - self.sub[i] * self.c_prime[i - 1];
            self.c_prime[i] = self.sup[i] / denom;
            self.rhs[i] = (self.rhs[i] - self.sub[i] * self.rhs[i - 1]) / denom;
        }
        out[m - 1] = self.rhs[m - 1];
        for i in (0..m - 1).rev() {
            out[i] = self.rhs[i] - self.c_prime[i] * out[i + 1];
        }
    }
}
