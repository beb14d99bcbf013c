use serde::Serialize;
use crate::error::{Error, Result};
use crate::level::Level;
use crate::potentials::PotentialPack;
use crate::spectral::Field;

/// Default threshold ladder of the tail table.
pub const TAIL_LADDER: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

/// Spatial pressure integrals at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureSample {
    pub time: f64,
    /// `∫|P̃|`
    pub p_l1: f64,
    /// `∫|P̃_c|`
    pub p_c_l1: f64,
    /// `∫|P̃ − P̃_c|`
    pub concave_l1: f64,
    /// `∫|P̃·χ|`
    pub p_chi_l1: f64,
    /// `∫P̃·(ρ − ⟨ρ⟩)`
    pub pairing: f64,
    pub pairing_c: f64,
    pub pairing_concave: f64,
    /// `(M, |{|P̃| ≥ M}|, ∫_{|P̃|≥M}|P̃|)` for each threshold
    pub tails: Vec<(f64, f64, f64)>,
    /// Worst ratio of `|P̃|1_{|P̃|≥M}` to `|P̃χ|/min_{|P̃|≥M}|χ|` over the ladder
    pub domination_ratio: f64,
}

/// Evaluates the pressure integrals of `rho` with the potentials of `level`.
pub fn pressure_sample(
    pack: &PotentialPack,
    rho: &Field,
    level: Level,
    time: f64,
    ladder: &[f64],
) -> Result<PressureSample> {
    let n = rho.values().len();
    let nf = n as f64;
    let mean = rho.mean();
    let sigma = pack.params().sigma();
    let mut p = Vec::with_capacity(n);
    let mut chi = Vec::with_capacity(n);
    let mut s = PressureSample {
        time,
        p_l1: 0.0,
        p_c_l1: 0.0,
        concave_l1: 0.0,
        p_chi_l1: 0.0,
        pairing: 0.0,
        pairing_c: 0.0,
        pairing_concave: 0.0,
        tails: Vec::with_capacity(ladder.len()),
        domination_ratio: 0.0,
    };
    for &r in rho.values() {
        let total = pack.pressure(level, r)?.0;
        let pc = if level.truncated() {
            pack.p_tilde_c_sigma(r, sigma).0
        } else {
            pack.p_tilde_c(r)?.0
        };
        let x = pack.chi_level(level, r)?.0;
        let fluct = r - mean;
        s.p_l1 += total.abs();
        s.p_c_l1 += pc.abs();
        s.concave_l1 += (total - pc).abs();
        s.p_chi_l1 += (total * x).abs();
        s.pairing += total * fluct;
        s.pairing_c += pc * fluct;
        s.pairing_concave += (total - pc) * fluct;
        p.push(total);
        chi.push(x);
    }
    for v in [
        &mut s.p_l1,
        &mut s.p_c_l1,
        &mut s.concave_l1,
        &mut s.p_chi_l1,
        &mut s.pairing,
        &mut s.pairing_c,
        &mut s.pairing_concave,
    ] {
        *v /= nf;
    }
    for &m in ladder {
        let mut count = 0usize;
        let mut tail = 0.0;
        let mut chi_min = f64::INFINITY;
        for (&pv, &xv) in p.iter().zip(&chi) {
            if pv.abs() >= m {
                count += 1;
                tail += pv.abs();
                chi_min = chi_min.min(xv.abs());
            }
        }
        if count > 0 && chi_min > 0.0 {
            for (&pv, &xv) in p.iter().zip(&chi) {
                if pv.abs() >= m {
                    let bound = (pv * xv).abs() / chi_min;
                    s.domination_ratio = s.domination_ratio.max(pv.abs() / bound);
                }
            }
        }
        s.tails.push((m, count as f64 / nf, tail / nf));
    }
    Ok(s)
}

/// Trapezoidal time window: zero at both ends, one in the middle, ramps of length `T/m`.
pub fn psi_window(t: f64, t0: f64, t1: f64, m: u32) -> f64 {
    let len = t1 - t0;
    if len <= 0.0 {
        return 0.0;
    }
    let ramp = len / m as f64;
    let a = (t - t0) / ramp;
    let b = (t1 - t) / ramp;
    a.min(b).clamp(0.0, 1.0)
}

fn trapezoid(samples: &[PressureSample], f: impl Fn(&PressureSample) -> f64) -> f64 {
    samples
        .windows(2)
        .map(|w| 0.5 * (w[1].time - w[0].time) * (f(&w[0]) + f(&w[1])))
        .sum()
}

fn require(samples: &[PressureSample]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::InsufficientHistory {
            need: 2,
            have: samples.len(),
        });
    }
    Ok(())
}

/// Space-time pressure integrals over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PressureIntegrability {
    /// `∫∫|P̃|`
    pub p_l1: f64,
    pub p_c_l1: f64,
    pub concave_l1: f64,
    /// `∫ψ∫P̃·ρ⁽⁰⁾`
    pub pairing: f64,
    pub pairing_c: f64,
    pub pairing_concave: f64,
    pub window_m: u32,
}

/// Trapezoidal time quadrature of the samples; the pairings carry the window `ψ`.
pub fn pressure_integrability(samples: &[PressureSample], window_m: u32) -> Result<PressureIntegrability> {
    require(samples)?;
    let (t0, t1) = (samples[0].time, samples[samples.len() - 1].time);
    let psi = |s: &PressureSample| psi_window(s.time, t0, t1, window_m);
    Ok(PressureIntegrability {
        p_l1: trapezoid(samples, |s| s.p_l1),
        p_c_l1: trapezoid(samples, |s| s.p_c_l1),
        concave_l1: trapezoid(samples, |s| s.concave_l1),
        pairing: trapezoid(samples, |s| psi(s) * s.pairing),
        pairing_c: trapezoid(samples, |s| psi(s) * s.pairing_c),
        pairing_concave: trapezoid(samples, |s| psi(s) * s.pairing_concave),
        window_m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub threshold: f64,
    /// Space-time measure of `{|P̃| ≥ M}`
    pub measure: f64,
    /// `∫∫_{|P̃|≥M}|P̃|`
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailTable {
    pub rows: Vec<TailRow>,
    /// `∫∫|P̃·χ|`
    pub p_chi_l1: f64,
    /// Both columns are non-increasing in `M`.
    pub monotone: bool,
    /// Largest pointwise domination ratio seen; at most one up to round-off.
    pub domination_ratio: f64,
}

impl TailTable {
    /// `integral(M_first) / integral(M_last)`, infinite when the last tail vanishes.
    pub fn decay(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if b.integral > 0.0 => a.integral / b.integral,
            (Some(a), Some(_)) if a.integral > 0.0 => f64::INFINITY,
            _ => 1.0,
        }
    }
}

/// Space-time tail table over a run. All samples must share one ladder.
pub fn equi_integrability_tail(samples: &[PressureSample]) -> Result<TailTable> {
    require(samples)?;
    let ladder: Vec<f64> = samples[0].tails.iter().map(|t| t.0).collect();
    if samples.iter().any(|s| s.tails.len() != ladder.len()) {
        return Err(Error::Consistency("samples use different threshold ladders".into()));
    }
    let rows: Vec<TailRow> = ladder
        .iter()
        .enumerate()
        .map(|(k, &m)| TailRow {
            threshold: m,
            measure: trapezoid(samples, |s| s.tails[k].1),
            integral: trapezoid(samples, |s| s.tails[k].2),
        })
        .collect();
    let monotone = rows
        .windows(2)
        .all(|w| w[1].measure <= w[0].measure && w[1].integral <= w[0].integral);
    Ok(TailTable {
        rows,
        p_chi_l1: trapezoid(samples, |s| s.p_chi_l1),
        monotone,
        domination_ratio: samples.iter().map(|s| s.domination_ratio).fold(0.0, f64::max),
    })
}
