use std::path::Path;

use crate::error::{Error, Result};
use crate::level::Level;
use crate::model::State;
use crate::potentials::{ConfinementSpec, Params, ParamsSpec};
use crate::solver::SchemeKind;
use crate::spectral::{Field, Grid, VectorField};

pub const MAGIC: &[u8; 6] = b"QNSCH1";
pub const FORMAT_VERSION: u32 = 1;

/// Parameter block stored in the header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBlock {
    pub rho1: f64,
    pub beta: f64,
    pub omega: f64,
    pub sigma: f64,
    pub delta: f64,
    pub sigma0: f64,
    pub theta: f64,
    pub kappa: f64,
    pub big_r: f64,
    pub steep_level: f64,
}

impl ParamBlock {
    pub fn new(params: &Params, confinement: &ConfinementSpec) -> Self {
        Self {
            rho1: params.rho1(),
            beta: params.beta(),
            omega: params.omega(),
            sigma: params.sigma(),
            delta: params.delta(),
            sigma0: params.sigma0(),
            theta: params.theta(),
            kappa: confinement.kappa,
            big_r: confinement.big_r,
            steep_level: confinement.steep_level,
        }
    }

    fn values(&self) -> [f64; 10] {
        [
            self.rho1,
            self.beta,
            self.omega,
            self.sigma,
            self.delta,
            self.sigma0,
            self.theta,
            self.kappa,
            self.big_r,
            self.steep_level,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        Self {
            rho1: v[0],
            beta: v[1],
            omega: v[2],
            sigma: v[3],
            delta: v[4],
            sigma0: v[5],
            theta: v[6],
            kappa: v[7],
            big_r: v[8],
            steep_level: v[9],
        }
    }

    pub fn params(&self, dim: usize) -> Result<Params> {
        Params::new(ParamsSpec {
            dim,
            rho1: self.rho1,
            beta: self.beta,
            omega: self.omega,
            sigma: self.sigma,
            delta: self.delta,
            sigma0: self.sigma0,
            theta: Some(self.theta),
        })
    }

    /// Bitwise comparison of the physical constants (the confinement recipe excluded).
    pub fn same_physics(&self, other: &ParamBlock) -> bool {
        self.values()[..7]
            .iter()
            .zip(&other.values()[..7])
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// A saved run state, including the previous state of two-step schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub grid: Grid,
    pub level: Level,
    pub scheme: SchemeKind,
    pub dt: f64,
    pub params: ParamBlock,
    pub state: State,
    pub previous: Option<State>,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn entry(&mut self, name: &str, values: &[f64]) {
        self.u16(name.len() as u16);
        self.0.extend_from_slice(name.as_bytes());
        self.u64(values.len() as u64);
        for &v in values {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(what: &str) -> Error {
    Error::Checkpoint(format!("truncated or corrupt {what}"))
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or_else(|| corrupt(what))?;
        let s = self.buf.get(self.pos..end).ok_or_else(|| corrupt(what))?;
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }
    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }
    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

fn push_state(w: &mut Writer, prefix: &str, s: &State) {
    w.entry(&format!("{prefix}time"), &[s.time]);
    w.entry(&format!("{prefix}step"), &[s.step as f64]);
    for (a, c) in s.u.components().iter().enumerate() {
        w.entry(&format!("{prefix}u{a}"), c.values());
    }
    w.entry(&format!("{prefix}rho"), s.rho.values());
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(FORMAT_VERSION);
        w.u32(self.grid.dim() as u32);
        w.u32(self.grid.n() as u32);
        w.u8(self.level.code());
        w.u8(self.scheme.code());
        w.u64(self.state.step);
        w.f64(self.state.time);
        w.f64(self.dt);
        let block = self.params.values();
        w.u32(block.len() as u32);
        for v in block {
            w.f64(v);
        }
        let crc = crc32fast::hash(&w.0);
        w.u32(crc);

        let start = w.0.len();
        let count = if self.previous.is_some() { 2 } else { 1 } * (self.grid.dim() + 3);
        w.u32(count as u32);
        push_state(&mut w, "", &self.state);
        if let Some(p) = &self.previous {
            push_state(&mut w, "prev.", p);
        }
        let crc = crc32fast::hash(&w.0[start..]);
        w.u32(crc);
        w.0
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(6, "magic")? != MAGIC {
            return Err(Error::Checkpoint("bad magic tag".into()));
        }
        let version = r.u32("header")?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!(
                "format version {version} is not supported (expected {FORMAT_VERSION})"
            )));
        }
        let dim = r.u32("header")? as usize;
        let n = r.u32("header")? as usize;
        let level_code = r.u8("header")?;
        let scheme_code = r.u8("header")?;
        let step = r.u64("header")?;
        let time = r.f64("header")?;
        let dt = r.f64("header")?;
        let count = r.u32("header")? as usize;
        if count != 10 {
            return Err(corrupt("parameter block"));
        }
        let mut block = Vec::with_capacity(count);
        for _ in 0..count {
            block.push(r.f64("parameter block")?);
        }
        let header_end = r.pos;
        let crc = r.u32("header checksum")?;
        if crc != crc32fast::hash(&buf[..header_end]) {
            return Err(Error::Checkpoint("header checksum mismatch".into()));
        }
        let grid = Grid::new(dim, n).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let level = Level::from_code(level_code).ok_or_else(|| corrupt("level code"))?;
        let scheme = match scheme_code {
            0 => SchemeKind::ImexEuler,
            1 => SchemeKind::ImexBdf2,
            _ => return Err(corrupt("scheme code")),
        };

        let payload_start = r.pos;
        let entries = r.u32("payload")? as usize;
        let mut named: Vec<(String, Vec<f64>)> = Vec::with_capacity(entries);
        for _ in 0..entries {
            let len = r.u16("payload")? as usize;
            let name = String::from_utf8(r.take(len, "payload")?.to_vec()).map_err(|_| corrupt("field name"))?;
            let count = r.u64("payload")? as usize;
            if count > buf.len() / 8 {
                return Err(corrupt("payload"));
            }
            let mut v = Vec::with_capacity(count);
            for _ in 0..count {
                v.push(r.f64("payload")?);
            }
            named.push((name, v));
        }
        let payload_end = r.pos;
        let crc = r.u32("payload checksum")?;
        if crc != crc32fast::hash(&buf[payload_start..payload_end]) {
            return Err(Error::Checkpoint("payload checksum mismatch".into()));
        }
        if r.pos != buf.len() {
            return Err(Error::Checkpoint("trailing bytes after payload".into()));
        }

        let get = |name: &str| -> Option<&Vec<f64>> { named.iter().find(|(n, _)| n == name).map(|(_, v)| v) };
        let field = |name: &str| -> Result<Field> {
            let v = get(name).ok_or_else(|| Error::Checkpoint(format!("missing field `{name}`")))?;
            Field::from_values(grid, v.clone()).map_err(|e| Error::Checkpoint(format!("field `{name}`: {e}")))
        };
        let scalar = |name: &str| -> Result<f64> {
            match get(name).map(|v| v.as_slice()) {
                Some([x]) => Ok(*x),
                _ => Err(Error::Checkpoint(format!("missing scalar `{name}`"))),
            }
        };
        let load_state = |prefix: &str| -> Result<State> {
            let comps = (0..dim)
                .map(|a| field(&format!("{prefix}u{a}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(State {
                time: scalar(&format!("{prefix}time"))?,
                step: scalar(&format!("{prefix}step"))? as u64,
                u: VectorField::from_components(comps)?,
                rho: field(&format!("{prefix}rho"))?,
            })
        };
        let state = load_state("")?;
        if state.step != step || state.time.to_bits() != time.to_bits() {
            return Err(Error::Checkpoint("header and payload disagree on step or time".into()));
        }
        let previous = if get("prev.rho").is_some() {
            Some(load_state("prev.")?)
        } else {
            None
        };
        Ok(Self {
            grid,
            level,
            scheme,
            dt,
            params: ParamBlock::from_values(&block),
            state,
            previous,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let buf = std::fs::read(path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&buf)
    }
}
