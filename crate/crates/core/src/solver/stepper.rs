use log::{debug, warn};
use num_complex::Complex64;

use super::config::{SchemeConfig, SchemeKind};
use super::implicit::FrozenOperator;
use super::rhs::eval_momentum_rhs;
use crate::error::{Error, Result};
use crate::model::State;
use crate::potentials::PotentialPack;
use crate::spectral::{Field, Spectrum, Torus, VectorField};

/// External source terms `(f_ρ, f_m)` added to the continuity and momentum equations.
pub trait Forcing: Sync {
    fn evaluate(&self, t: f64) -> Result<(Field, VectorField)>;
}

/// Spectral image of `X = (ρ, m)`.
#[derive(Debug, Clone)]
struct Prognostic {
    rho: Spectrum,
    m: Vec<Spectrum>,
}

#[derive(Debug, Clone)]
struct History {
    state: State,
    x: Prognostic,
    tendency: Vec<Spectrum>,
}

/// Advances states with the stabilized IMEX scheme.
///
/// The prognostic pair is `(ρ, m = ρu)`; after each step `u = m/ρ` pointwise.
/// The two-step variant keeps the previous state and its explicit tendency.
pub struct Stepper<'a> {
    torus: &'a Torus,
    pack: &'a PotentialPack,
    config: SchemeConfig,
    forcing: Option<&'a dyn Forcing>,
    history: Option<History>,
}

const MAX_HALVINGS: u32 = 3;

impl<'a> Stepper<'a> {
    pub fn new(torus: &'a Torus, pack: &'a PotentialPack, config: SchemeConfig) -> Result<Self> {
        config.validate(pack.params())?;
        Ok(Self {
            torus,
            pack,
            config,
            forcing: None,
            history: None,
        })
    }

    pub fn with_forcing(mut self, forcing: &'a dyn Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    /// Previous state kept for the two-step scheme.
    pub fn previous_state(&self) -> Option<&State> {
        self.history.as_ref().map(|h| &h.state)
    }

    /// Restores the two-step history, e.g. after loading a checkpoint.
    pub fn set_previous_state(&mut self, prev: Option<State>) -> Result<()> {
        self.history = match prev {
            Some(s) => Some(self.history_for(s)?),
            None => None,
        };
        Ok(())
    }

    fn history_for(&self, state: State) -> Result<History> {
        let x = self.prognostic(&state)?;
        let tendency = self.tendency(&state)?;
        Ok(History { state, x, tendency })
    }

    fn prognostic(&self, state: &State) -> Result<Prognostic> {
        let m = state.momentum();
        Ok(Prognostic {
            rho: self.torus.forward(&state.rho)?,
            m: m.components()
                .iter()
                .map(|c| self.torus.forward(c))
                .collect::<Result<_>>()?,
        })
    }

    fn tendency(&self, state: &State) -> Result<Vec<Spectrum>> {
        let terms = eval_momentum_rhs(self.torus, self.pack, state, self.config.level)?;
        terms
            .momentum_total()
            .components()
            .iter()
            .map(|c| self.torus.forward(c))
            .collect()
    }

    /// One step of length `config.dt`.
    pub fn step(&mut self, state: &State) -> Result<State> {
        match self.try_step(state) {
            Ok(next) => Ok(next),
            Err(e @ (Error::Confinement { .. } | Error::Divergence { .. })) if self.config.retry_halving => {
                warn!("step {} failed ({e}); retrying with halved substeps", state.step + 1);
                let next = self.substeps(state, self.config.dt, 1)?;
                self.history = None;
                Ok(next)
            }
            Err(e) => Err(e),
        }
    }

    fn substeps(&self, state: &State, dt: f64, level: u32) -> Result<State> {
        let half = 0.5 * dt;
        let attempt = (|| {
            let mid = self.advance(state, half, None)?.0;
            let mut end = self.advance(&mid, half, None)?.0;
            end.step = state.step + 1;
            Ok(end)
        })();
        match attempt {
            Ok(s) => Ok(s),
            Err(e @ (Error::Confinement { .. } | Error::Divergence { .. })) => {
                if level >= MAX_HALVINGS {
                    return Err(e);
                }
                warn!("substep at level {level} failed ({e}); halving again");
                let mid = self.substeps(state, half, level + 1)?;
                let mut end = self.substeps(&mid, half, level + 1)?;
                end.step = state.step + 1;
                Ok(end)
            }
            Err(e) => Err(e),
        }
    }

    fn try_step(&mut self, state: &State) -> Result<State> {
        let use_history = self.config.scheme == SchemeKind::ImexBdf2 && !self.config.freeze_velocity;
        let prev = if use_history { self.history.as_ref() } else { None };
        let (next, cur) = self.advance(state, self.config.dt, prev)?;
        if use_history {
            self.history = Some(cur);
        }
        Ok(next)
    }

    /// Advances `state` by `dt`. With `prev` the two-step formula is used.
    fn advance(
        &self,
        state: &State,
        dt: f64,
        prev: Option<&History>,
    ) -> Result<(State, History)> {
        let torus = self.torus;
        let grid = torus.grid();
        let dim = grid.dim();
        let level = self.config.level;
        let op = FrozenOperator::from_state(self.pack, state, level, self.config.splitting_rho_bar)?;
        let x = self.prognostic(state)?;
        let t_next = state.time + dt;

        let forcing = match self.forcing {
            Some(f) => {
                let (fr, fm) = f.evaluate(t_next)?;
                Some((
                    torus.forward(&fr)?,
                    fm.components()
                        .iter()
                        .map(|c| torus.forward(c))
                        .collect::<Result<Vec<_>>>()?,
                ))
            }
            None => None,
        };

        if self.config.freeze_velocity {
            let mut rho = x.rho.clone();
            for (i, c) in rho.coeffs_mut().iter_mut().enumerate() {
                let mut flux = Complex64::default();
                for a in 0..dim {
                    flux -= x.m[a].coeffs()[i] * Complex64::new(0.0, torus.odd_wavevector(i)[a]);
                }
                if let Some((fr, _)) = &forcing {
                    flux += fr.coeffs()[i];
                }
                *c = (*c + flux * dt) * op.density_factor(torus, i, dt);
                if !torus.is_retained(i) {
                    *c = Complex64::default();
                }
            }
            let mut next = state.clone();
            next.rho = torus.backward(&rho)?;
            next.time = t_next;
            next.step = state.step + 1;
            self.check(&next)?;
            let hist = History {
                state: state.clone(),
                x,
                tendency: Vec::new(),
            };
            return Ok((next, hist));
        }

        let tendency = self.tendency(state)?;
        let (gamma, w_cur, w_prev_x, w_cur_t, w_prev_t) = match prev {
            Some(_) => (1.5, 2.0, -0.5, 2.0, -1.0),
            None => (1.0, 1.0, 0.0, 1.0, 0.0),
        };

        let len = grid.len();
        let mut out_rho = Spectrum::zeros(grid);
        let mut out_m: Vec<Spectrum> = (0..dim).map(|_| Spectrum::zeros(grid)).collect();
        let mut mvec = [Complex64::default(); 3];
        let mut rm = [Complex64::default(); 3];
        for i in 0..len {
            if !torus.is_retained(i) {
                continue;
            }
            for a in 0..dim {
                mvec[a] = x.m[a].coeffs()[i];
            }
            let rho_i = x.rho.coeffs()[i];
            let (_, am) = op.apply(torus, i, rho_i, &mvec[..dim]);
            let mut r_rho = rho_i * w_cur;
            for a in 0..dim {
                let tprime = tendency[a].coeffs()[i] - am[a];
                rm[a] = mvec[a] * w_cur + tprime * (dt * w_cur_t);
            }
            if let Some(h) = prev {
                let mut pm = [Complex64::default(); 3];
                for a in 0..dim {
                    pm[a] = h.x.m[a].coeffs()[i];
                }
                let prho = h.x.rho.coeffs()[i];
                let (_, pam) = op.apply(torus, i, prho, &pm[..dim]);
                r_rho += prho * w_prev_x;
                for a in 0..dim {
                    let tprime = h.tendency[a].coeffs()[i] - pam[a];
                    rm[a] += pm[a] * w_prev_x + tprime * (dt * w_prev_t);
                }
            }
            if let Some((fr, fm)) = &forcing {
                r_rho += fr.coeffs()[i] * dt;
                for a in 0..dim {
                    rm[a] += fm[a].coeffs()[i] * dt;
                }
            }
            let (sr, sm) = op.solve(torus, i, gamma, dt, r_rho, &rm[..dim]);
            out_rho.coeffs_mut()[i] = sr;
            for a in 0..dim {
                out_m[a].coeffs_mut()[i] = sm[a];
            }
        }

        let rho = torus.backward(&out_rho)?;
        let m = out_m
            .iter()
            .map(|s| torus.backward(s))
            .collect::<Result<Vec<_>>>()?;
        let u = VectorField::from_components(
            m.iter()
                .map(|c| c.zip_map(&rho, |mv, r| mv / r))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let next = State {
            time: t_next,
            step: state.step + 1,
            u,
            rho,
        };
        debug!(
            "step {} t={:.6e} rho in [{:.6}, {:.6}] c_s^2={:.3e}",
            next.step,
            next.time,
            next.rho.min(),
            next.rho.max(),
            op.sound_sq
        );
        self.check(&next)?;
        Ok((
            next,
            History {
                state: state.clone(),
                x,
                tendency,
            },
        ))
    }

    fn check(&self, next: &State) -> Result<()> {
        if !next.is_finite() {
            return Err(Error::Divergence { step: next.step });
        }
        if let Err(e) = next.check_band(self.pack, self.config.level) {
            if self.config.abort_on_confinement || self.config.retry_halving || !self.config.level.truncated() {
                return Err(e);
            }
            warn!("step {}: {e}", next.step);
        }
        Ok(())
    }
}
