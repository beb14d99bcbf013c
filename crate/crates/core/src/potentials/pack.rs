use serde::Serialize;

use super::confinement::ConfinementSpec;
use super::params::Params;
use super::profile::{concave, SingularProfile, Taylor2};
use crate::error::{Error, Result};
use crate::level::Level;

/// Value and first derivative.
pub type Pair = (f64, f64);

/// Every thermodynamic function of the model, evaluated from one parameter set.
#[derive(Debug, Clone)]
pub struct PotentialPack {
    params: Params,
    profile: SingularProfile,
    confinement: ConfinementSpec,
    rho_star: f64,
    c_star: f64,
}

/// Empirical constants of the three domination inequalities on a sample.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub samples: usize,
    pub p: f64,
    /// max |χ|^p / (|F̃| + 1)
    pub chi_vs_free_energy: f64,
    /// max |χ′|^β / (|F̃| + 1)
    pub dchi_vs_free_energy: f64,
    /// max |χ′|^(β+1) / (|P̃| + 1)
    pub dchi_vs_pressure: f64,
}

/// `C* = max(0, −inf_ℝ F_{σ₀})`, a lower bound for `F_σ` valid for every `σ ≤ σ₀`.
pub fn c_star(profile: &SingularProfile, omega: f64, sigma0: f64) -> Result<f64> {
    let a = 1.0 - sigma0;
    let edge = profile.fc(a)?;
    if edge.d2 <= omega {
        return Err(Error::InvalidParameter {
            name: "sigma0",
            reason: format!(
                "F_c''(1 - sigma0) = {} must exceed omega = {omega} for the truncated potential to be bounded below",
                edge.d2
            ),
        });
    }
    let f = |r: f64| profile.f_sigma(r, sigma0, omega);
    // quadratic tails
    let right = f(a);
    let mut inf = right.value;
    let vertex = a - right.d1 / right.d2;
    if vertex > a {
        inf = inf.min(right.extend(vertex - a).value);
    }
    let left = f(-a);
    let vertex = -a - left.d1 / left.d2;
    if vertex < -a {
        inf = inf.min(left.extend(vertex + a).value);
    }
    // interior: dense scan, then golden-section refinement
    let m = 4000;
    let mut best = (0.0, f(0.0).value);
    for j in 0..=m {
        let r = -a + 2.0 * a * j as f64 / m as f64;
        let v = f(r).value;
        if v < best.1 {
            best = (r, v);
        }
    }
    let h = 2.0 * a / m as f64;
    let (mut lo, mut hi) = ((best.0 - h).max(-a), (best.0 + h).min(a));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1).value < f(x2).value {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    inf = inf.min(best.1).min(f(0.5 * (lo + hi)).value);
    Ok((-inf).max(0.0))
}

/// Bisection for the zero of an increasing function on `(lo, hi)` with
/// `g(lo) < 0 < g(hi)`, run until the bracket cannot shrink.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

impl PotentialPack {
    /// Pack with a nominal confinement built from `E₀ = 1`, `T = 1`.
    pub fn new(params: Params) -> Result<Self> {
        let profile = SingularProfile::new(params.beta());
        let c_star = c_star(&profile, params.omega(), params.sigma0())?;
        let confinement = ConfinementSpec::from_energy(&params, 1.0, 1.0, c_star)?;
        let mut pack = Self {
            params,
            profile,
            confinement,
            rho_star: f64::NAN,
            c_star,
        };
        pack.rho_star = pack.find_rho_star(None)?;
        Ok(pack)
    }

    pub fn with_confinement(mut self, confinement: ConfinementSpec) -> Self {
        self.confinement = confinement;
        self
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn profile(&self) -> &SingularProfile {
        &self.profile
    }

    pub fn confinement(&self) -> &ConfinementSpec {
        &self.confinement
    }

    /// The unique zero of `P̃_c` in `(ρ̲, 1)`.
    pub fn rho_star(&self) -> f64 {
        self.rho_star
    }

    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    /// Zero of `P̃_c` (or of `P̃_{c,σ}` when `sigma` is given) by bisection.
    pub fn find_rho_star(&self, sigma: Option<f64>) -> Result<f64> {
        let g = |r: f64| match sigma {
            Some(s) => self.p_tilde_c_sigma(r, s).0,
            None => self.p_tilde_c(r).map(|p| p.0).unwrap_or(f64::NAN),
        };
        let lo = self.params.rho_mid();
        let mut hi = None;
        for j in 2..52 {
            let r = 1.0 - 2f64.powi(-j);
            if g(r) > 0.0 {
                hi = Some(r);
                break;
            }
        }
        let hi = hi.ok_or_else(|| {
            Error::Consistency("P_c does not change sign on (rho_mid, 1)".into())
        })?;
        Ok(bisect(g, lo, hi))
    }

    pub fn phi_of_rho(&self, rho: f64) -> f64 {
        self.params.phi_of_rho(rho)
    }

    pub fn rho_of_phi(&self, phi: f64) -> f64 {
        self.params.rho_of_phi(phi)
    }

    pub fn fc(&self, r: f64) -> Result<Taylor2> {
        self.profile.fc(r)
    }

    pub fn fc_sigma(&self, r: f64) -> Taylor2 {
        self.profile.fc_sigma(r, self.params.sigma())
    }

    pub fn f(&self, r: f64) -> Result<Taylor2> {
        self.profile.f(r, self.params.omega())
    }

    pub fn f_sigma(&self, r: f64) -> Taylor2 {
        self.profile.f_sigma(r, self.params.sigma(), self.params.omega())
    }

    fn check_band(&self, rho: f64) -> Result<()> {
        if !(rho > self.params.rho_lower() && rho < 1.0) {
            return Err(Error::SingularDomain {
                value: rho,
                domain: format!("({}, 1)", self.params.rho_lower()),
            });
        }
        Ok(())
    }

    fn to_rho(&self, t: Taylor2) -> Taylor2 {
        let l = self.params.ell();
        Taylor2::new(t.value, -l * t.d1, l * l * t.d2)
    }

    /// `F̃(ρ) = F(φ(ρ))` and its ρ-derivatives.
    pub fn tilde_f(&self, rho: f64) -> Result<Taylor2> {
        self.check_band(rho)?;
        Ok(self.to_rho(self.f(self.phi_of_rho(rho))?))
    }

    pub fn tilde_f_sigma(&self, rho: f64) -> Taylor2 {
        self.to_rho(self.f_sigma(self.phi_of_rho(rho)))
    }

    pub fn tilde_fc(&self, rho: f64) -> Result<Taylor2> {
        self.check_band(rho)?;
        Ok(self.to_rho(self.fc(self.phi_of_rho(rho))?))
    }

    pub fn tilde_fc_sigma_at(&self, rho: f64, sigma: f64) -> Taylor2 {
        self.to_rho(self.profile.fc_sigma(self.phi_of_rho(rho), sigma))
    }

    fn legendre(rho: f64, t: Taylor2) -> Pair {
        (rho * t.d1 - t.value, rho * t.d2)
    }

    /// `P̃ = ρF̃′ − F̃` and `P̃′ = ρF̃″`.
    pub fn p_tilde(&self, rho: f64) -> Result<Pair> {
        Ok(Self::legendre(rho, self.tilde_f(rho)?))
    }

    pub fn p_tilde_sigma(&self, rho: f64) -> Pair {
        Self::legendre(rho, self.tilde_f_sigma(rho))
    }

    /// Convex part `P̃_c` built from `F_c` alone.
    pub fn p_tilde_c(&self, rho: f64) -> Result<Pair> {
        Ok(Self::legendre(rho, self.tilde_fc(rho)?))
    }

    pub fn p_tilde_c_sigma(&self, rho: f64, sigma: f64) -> Pair {
        Self::legendre(rho, self.tilde_fc_sigma_at(rho, sigma))
    }

    /// Concave correction `P̃ − P̃_c`, coming from `−ωφ²/2`.
    pub fn p_tilde_concave(&self, rho: f64) -> Pair {
        let t = self.to_rho(concave(self.phi_of_rho(rho), self.params.omega()));
        Self::legendre(rho, t)
    }

    /// `χ(r) = ln((r − ρ̲)/(1 − r))` and `χ′`.
    pub fn chi(&self, r: f64) -> Result<Pair> {
        self.check_band(r)?;
        let lo = self.params.rho_lower();
        Ok((((r - lo) / (1.0 - r)).ln(), 1.0 / (r - lo) + 1.0 / (1.0 - r)))
    }

    /// `χ` clamped to its values at `ρ̲ + σ` and `1 − σ`.
    pub fn chi_sigma(&self, r: f64) -> Pair {
        let s = self.params.sigma();
        let lo = self.params.rho_lower() + s;
        let hi = 1.0 - s;
        let c = r.clamp(lo, hi);
        let (v, d) = self.chi(c).expect("clamped argument lies inside the band");
        if r < lo || r > hi {
            (v, 0.0)
        } else {
            (v, d)
        }
    }

    /// Interval the density must stay in at `level`.
    pub fn band(&self, level: Level) -> (f64, f64) {
        let lo = self.params.rho_lower();
        match level {
            Level::SigmaDelta => (lo - self.params.theta(), 1.0 + self.params.theta()),
            _ => (lo, 1.0),
        }
    }

    /// `F̃` as used by `level`.
    pub fn free_energy(&self, level: Level, rho: f64) -> Result<Taylor2> {
        if level.truncated() {
            Ok(self.tilde_f_sigma(rho))
        } else {
            self.tilde_f(rho)
        }
    }

    /// `P̃` and `P̃′` as used by `level`.
    pub fn pressure(&self, level: Level, rho: f64) -> Result<Pair> {
        if level.truncated() {
            Ok(self.p_tilde_sigma(rho))
        } else {
            self.p_tilde(rho)
        }
    }

    /// Confinement potential at `level`: `W_δ`, `W`, or nothing.
    pub fn confinement_potential(&self, level: Level, rho: f64) -> Result<Taylor2> {
        match level {
            Level::SigmaDelta => Ok(self.confinement.w_delta(rho)),
            Level::DeltaOnly => self.confinement.w(rho),
            Level::Target => Ok(Taylor2::ZERO),
        }
    }

    /// `H` or `H_δ` at `level`, with derivative.
    pub fn confinement_pressure(&self, level: Level, rho: f64) -> Result<Pair> {
        match level {
            Level::SigmaDelta => Ok(self.confinement.h_delta(rho)),
            Level::DeltaOnly => self.confinement.h(rho),
            Level::Target => Ok((0.0, 0.0)),
        }
    }

    /// `χ_σ` at the truncated level, `χ` otherwise.
    pub fn chi_level(&self, level: Level, rho: f64) -> Result<Pair> {
        if level.truncated() {
            Ok(self.chi_sigma(rho))
        } else {
            self.chi(rho)
        }
    }

    /// Smallest constants for which the domination inequalities hold on `samples`.
    pub fn growth_bounds_check(&self, samples: &[f64], p: f64) -> Result<GrowthReport> {
        let beta = self.params.beta();
        let mut report = GrowthReport {
            samples: samples.len(),
            p,
            chi_vs_free_energy: 0.0,
            dchi_vs_free_energy: 0.0,
            dchi_vs_pressure: 0.0,
        };
        for &r in samples {
            let (chi, dchi) = self.chi(r)?;
            let f = self.tilde_f(r)?.value.abs() + 1.0;
            let pr = self.p_tilde(r)?.0.abs() + 1.0;
            report.chi_vs_free_energy = report.chi_vs_free_energy.max(chi.abs().powf(p) / f);
            report.dchi_vs_free_energy = report.dchi_vs_free_energy.max(dchi.abs().powf(beta) / f);
            report.dchi_vs_pressure = report.dchi_vs_pressure.max(dchi.abs().powf(beta + 1.0) / pr);
        }
        let all = [
            report.chi_vs_free_energy,
            report.dchi_vs_free_energy,
            report.dchi_vs_pressure,
        ];
        if all.iter().any(|c| !c.is_finite()) {
            return Err(Error::Consistency(format!("growth constants not finite: {all:?}")));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::ParamsSpec;

    fn pack(spec: ParamsSpec) -> PotentialPack {
        PotentialPack::new(Params::new(spec).unwrap()).unwrap()
    }

    #[test]
    fn mid_density_values() {
        let pk = pack(ParamsSpec::default());
        let mid = pk.params().rho_mid();
        let f = pk.tilde_f(mid).unwrap();
        assert!((f.value - 1.0).abs() < 1e-14);
        assert!(f.d1.abs() < 1e-14);
        assert!(pk.chi(mid).unwrap().0.abs() < 1e-15);
        assert!((pk.chi(0.5).unwrap().0 - (1.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn pure_convex_pressure_at_mid() {
        let pk = pack(ParamsSpec {
            omega: 0.0,
            ..Default::default()
        });
        let (p, _) = pk.p_tilde(pk.params().rho_mid()).unwrap();
        assert!((p + 1.0).abs() < 1e-14);
    }

    #[test]
    fn rho_star_is_a_root() {
        let pk = pack(ParamsSpec::default());
        let r = pk.rho_star();
        assert!(r > pk.params().rho_mid() && r < 1.0);
        assert!(pk.p_tilde_c(r).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn singular_branches_reject_the_band_edges() {
        let pk = pack(ParamsSpec::default());
        assert!(pk.tilde_f(1.0).is_err());
        assert!(pk.chi(pk.params().rho_lower()).is_err());
        assert!(pk.p_tilde(1.2).is_err());
        assert!(pk.p_tilde_sigma(1.2).0.is_finite());
    }

    #[test]
    fn chi_sigma_is_clamped() {
        let pk = pack(ParamsSpec::default());
        let s = pk.params().sigma();
        let top = pk.chi(1.0 - s).unwrap().0;
        assert_eq!(pk.chi_sigma(0.999).0, top);
        assert_eq!(pk.chi_sigma(5.0), (top, 0.0));
        assert_eq!(pk.chi_sigma(0.7), pk.chi(0.7).unwrap());
    }

    #[test]
    fn c_star_vanishes_for_convex_potential() {
        let pk = pack(ParamsSpec::default());
        assert_eq!(pk.c_star(), 0.0);
        let pk = pack(ParamsSpec {
            omega: 40.0,
            ..Default::default()
        });
        assert!(pk.c_star() > 0.0);
    }

    #[test]
    fn c_star_requires_steep_truncation() {
        let prof = SingularProfile::new(1.5);
        assert!(c_star(&prof, 1e6, 0.1).is_err());
    }
}
