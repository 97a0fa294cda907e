//! Binary model files.
//!
//! All integers and floats are little-endian.
//!
//! | field | type |
//! |---|---|
//! | magic `MSURFMOD` | 8 bytes |
//! | format version (1) | u32 |
//! | method: 0 frobenius, 1 schmeisser, 2 colleague, 3 direct | u8 |
//! | projection: 0 real, 1 magnitude, 2 reject | u8 |
//! | clamp negative Schmeisser off-diagonals | u8 (0 or 1) |
//! | truncation kind: 0 tensor, 1 total degree | u8 |
//! | Schmeisser negative tolerance | f64 |
//! | Schmeisser zero-remainder tolerance | f64 |
//! | complex rejection tolerance | f64 |
//! | surface count `m` | u32 |
//! | input dimension `d` | u32 |
//! | domain `lo_1, hi_1, …, lo_d, hi_d` | f64 × 2d |
//! | degrees: `d` per-axis maxima (tensor) or one total degree | u32 × d or u32 |
//! | value transform `scale, shift` | f64 × 2 |
//! | term count `T` | u32 |
//! | multi-indices, one row of `d` per term | u32 × T·d |
//! | coefficients, surrogate-major, in multi-index row order | f64 × m·T |
//!
//! Multi-index rows may come in any order but must cover the truncation
//! exactly. Trailing bytes are an error, as is a dense coefficient tensor
//! (`∏ (max degree + 1)`) above 2^26 entries.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use multisurf_core::{ChebSeries, DomainBox, FittedModel, Method, MethodConfig, Projection, SchmeisserOptions, Truncation, ValueTransform};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"MSURFMOD";
pub const VERSION: u32 = 1;
/// Largest dense coefficient tensor a file may describe.
const MAX_DENSE_TERMS: usize = 1 << 26;

fn method_code(m: Method) -> u8 {
    match m {
        Method::Frobenius => 0,
        Method::Schmeisser => 1,
        Method::Colleague => 2,
        Method::Direct => 3,
    }
}

fn projection_code(p: Projection) -> u8 {
    match p {
        Projection::RealPart => 0,
        Projection::SignedMagnitude => 1,
        Projection::Reject => 2,
    }
}

fn u32_of(v: usize) -> Result<[u8; 4]> {
    u32::try_from(v).map(u32::to_le_bytes).map_err(|_| Error::Model(format!("{v} does not fit in u32")))
}

pub fn encode(model: &FittedModel) -> Result<Vec<u8>> {
    let cfg = model.config();
    let d = model.dims();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let kind = match model.truncation() {
        Truncation::Tensor(_) => 0,
        Truncation::TotalDegree(_) => 1,
    };
    out.extend_from_slice(&[
        method_code(cfg.method),
        projection_code(cfg.projection),
        cfg.schmeisser.clamp_negative_offdiag as u8,
        kind,
    ]);
    for v in [cfg.schmeisser.negative_tolerance, cfg.schmeisser.zero_remainder_tolerance, cfg.reject_tolerance] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&u32_of(model.surfaces())?);
    out.extend_from_slice(&u32_of(d)?);
    let dom = model.domain();
    for i in 0..d {
        out.extend_from_slice(&dom.lo()[i].to_le_bytes());
        out.extend_from_slice(&dom.hi()[i].to_le_bytes());
    }
    match model.truncation() {
        Truncation::Tensor(n) => {
            for &k in n {
                out.extend_from_slice(&u32_of(k)?);
            }
        }
        Truncation::TotalDegree(n) => out.extend_from_slice(&u32_of(*n)?),
    }
    let t = model.transform();
    out.extend_from_slice(&t.scale.to_le_bytes());
    out.extend_from_slice(&t.shift.to_le_bytes());
    let indices = model.truncation().multi_indices(d);
    out.extend_from_slice(&u32_of(indices.len())?);
    for k in &indices {
        for &j in k {
            out.extend_from_slice(&u32_of(j)?);
        }
    }
    for s in model.surrogates() {
        for c in s.terms() {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Model(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    /// Checks a count against the bytes left before allocating for it.
    fn count(&mut self, item_bytes: usize) -> Result<usize> {
        let n = self.u32()?;
        if n.saturating_mul(item_bytes) > self.buf.len() - self.pos {
            return Err(Error::Model(format!("count {n} exceeds file size")));
        }
        Ok(n)
    }
}

pub fn decode(buf: &[u8]) -> Result<FittedModel> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(8).ok() != Some(&MAGIC[..]) {
        return Err(Error::Model("bad magic".into()));
    }
    let version = c.u32()?;
    if version != VERSION as usize {
        return Err(Error::Model(format!("unsupported version {version}")));
    }
    let method = match c.u8()? {
        0 => Method::Frobenius,
        1 => Method::Schmeisser,
        2 => Method::Colleague,
        3 => Method::Direct,
        v => return Err(Error::Model(format!("unknown method code {v}"))),
    };
    let projection = match c.u8()? {
        0 => Projection::RealPart,
        1 => Projection::SignedMagnitude,
        2 => Projection::Reject,
        v => return Err(Error::Model(format!("unknown projection code {v}"))),
    };
    let clamp = match c.u8()? {
        0 => false,
        1 => true,
        v => return Err(Error::Model(format!("bad clamp flag {v}"))),
    };
    let kind = c.u8()?;
    let schmeisser = SchmeisserOptions {
        clamp_negative_offdiag: clamp,
        negative_tolerance: c.f64()?,
        zero_remainder_tolerance: c.f64()?,
    };
    let config = MethodConfig { method, projection, schmeisser, reject_tolerance: c.f64()? };
    let m = c.count(8)?;
    let d = c.count(16)?;
    if m == 0 || d == 0 {
        return Err(Error::Model("zero surfaces or dimensions".into()));
    }
    let mut bounds = Vec::with_capacity(d);
    for _ in 0..d {
        bounds.push((c.f64()?, c.f64()?));
    }
    let domain = DomainBox::new(&bounds).map_err(Error::Data)?;
    let truncation = match kind {
        0 => Truncation::Tensor((0..d).map(|_| c.u32()).collect::<Result<_>>()?),
        1 => Truncation::TotalDegree(c.u32()?),
        v => return Err(Error::Model(format!("unknown truncation kind {v}"))),
    };
    truncation.validate(d).map_err(Error::Data)?;
    let dense = truncation.max_degrees(d).iter().try_fold(1usize, |acc, &k| acc.checked_mul(k.checked_add(1)?));
    if dense.map_or(true, |n| n > MAX_DENSE_TERMS) {
        return Err(Error::Model("coefficient tensor too large".into()));
    }
    let transform = ValueTransform { scale: c.f64()?, shift: c.f64()? };
    let terms = c.count(4 * d)?;
    let canonical = truncation.multi_indices(d);
    if terms != canonical.len() {
        return Err(Error::Model(format!("{terms} terms, truncation has {}", canonical.len())));
    }
    let position: HashMap<&[usize], usize> = canonical.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let mut order = Vec::with_capacity(terms);
    let mut seen = vec![false; terms];
    for _ in 0..terms {
        let k: Vec<usize> = (0..d).map(|_| c.u32()).collect::<Result<_>>()?;
        match position.get(k.as_slice()) {
            Some(&i) if !seen[i] => {
                seen[i] = true;
                order.push(i);
            }
            _ => return Err(Error::Model(format!("unexpected or repeated multi-index {k:?}"))),
        }
    }
    let mut surrogates = Vec::with_capacity(m);
    let mut coeffs = vec![0.0; terms];
    for _ in 0..m {
        for &i in &order {
            coeffs[i] = c.f64()?;
        }
        surrogates.push(ChebSeries::from_terms(domain.clone(), truncation.clone(), &coeffs).map_err(Error::Data)?);
    }
    if c.pos != buf.len() {
        return Err(Error::Model(format!("{} trailing bytes", buf.len() - c.pos)));
    }
    FittedModel::from_parts(config, transform, surrogates).map_err(Error::Data)
}

pub fn save_model(path: &Path, model: &FittedModel) -> Result<()> {
    fs::write(path, encode(model)?).map_err(Error::io(path))
}

pub fn load_model(path: &Path) -> Result<FittedModel> {
    decode(&fs::read(path).map_err(Error::io(path))?)
}
