//! Binary filter cache.
//!
//! Layout (little-endian): magic `BSHF`, u32 version, u32 n, u32 levels,
//! u32 ladder length and u32 entries, u32 generator id length and UTF-8 bytes,
//! f64 ε_supp, u32 base stride, u8 stride rule, u32 channel count, then per
//! channel i32 j, i32 k, i8 ι and `n²` complex64 samples (f32 re, f32 im).

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Generator, ShearletParams, ShearletSystem, StrideRule};
use crate::error::{Error, Result};
use crate::geometry::DigitalDomain;
use crate::wavelet::EPS_SUPP;

const MAGIC: &[u8; 4] = b"BSHF";
const VERSION: u32 = 1;

/// Header of a cache file.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterCache {
    pub n: usize,
    pub params: ShearletParams,
    pub eps_supp: f64,
    pub channels: usize,
}

impl FilterCache {
    /// Does this cache hold the system for `(n, params)`?
    pub fn matches(&self, n: usize, params: &ShearletParams) -> bool {
        self.n == n && &self.params == params && self.eps_supp == EPS_SUPP
    }
}

pub fn write_filter_cache(path: &Path, sys: &ShearletSystem) -> Result<()> {
    let n = sys.n();
    let p = sys.params();
    let mut buf = Vec::with_capacity(64 + sys.channels().len() * (9 + 8 * n * n));
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    buf.extend_from_slice(&p.levels.to_le_bytes());
    buf.extend_from_slice(&(p.ladder.len() as u32).to_le_bytes());
    for k in &p.ladder {
        buf.extend_from_slice(&k.to_le_bytes());
    }
    let id = p.generator.to_string();
    buf.extend_from_slice(&(id.len() as u32).to_le_bytes());
    buf.extend_from_slice(id.as_bytes());
    buf.extend_from_slice(&EPS_SUPP.to_le_bytes());
    buf.extend_from_slice(&(p.base_stride as u32).to_le_bytes());
    buf.push(match p.stride_rule {
        StrideRule::Parabolic => 0,
        StrideRule::Isotropic => 1,
    });
    buf.extend_from_slice(&(sys.channels().len() as u32).to_le_bytes());
    for ch in sys.channels() {
        buf.extend_from_slice(&(ch.j as i32).to_le_bytes());
        buf.extend_from_slice(&ch.k.to_le_bytes());
        buf.push(ch.iota as u8);
        for &h in ch.filter() {
            buf.extend_from_slice(&(h as f32).to_le_bytes());
            buf.extend_from_slice(&0f32.to_le_bytes());
        }
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&buf)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + len > self.data.len() {
            return Err(Error::Format {
                offset: self.pos as u64,
                message: format!("truncated while reading {what}"),
            });
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn i32(&mut self, what: &str) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn bad(&self, at: usize, message: impl Into<String>) -> Error {
        Error::Format { offset: at as u64, message: message.into() }
    }
}

fn read_header(r: &mut Reader<'_>) -> Result<FilterCache> {
    if r.take(4, "magic")? != MAGIC {
        return Err(r.bad(0, "not a shearlet filter cache"));
    }
    let at = r.pos;
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(r.bad(at, format!("unsupported cache version {version}")));
    }
    let n = r.u32("grid size")? as usize;
    let levels = r.u32("levels")?;
    let at = r.pos;
    let len = r.u32("ladder length")? as usize;
    if len != levels as usize {
        return Err(r.bad(at, "ladder length differs from levels"));
    }
    let ladder = (0..len).map(|_| r.u32("ladder")).collect::<Result<Vec<_>>>()?;
    let at = r.pos;
    let id_len = r.u32("generator id length")? as usize;
    if id_len > 64 {
        return Err(r.bad(at, "generator id too long"));
    }
    let at = r.pos;
    let id = std::str::from_utf8(r.take(id_len, "generator id")?)
        .map_err(|_| r.bad(at, "generator id is not UTF-8"))?;
    let generator: Generator = id.parse().map_err(|_| r.bad(at, format!("unknown generator '{id}'")))?;
    let eps_supp = f64::from_le_bytes(r.take(8, "eps")?.try_into().unwrap());
    let base_stride = r.u32("base stride")? as usize;
    let at = r.pos;
    let stride_rule = match r.take(1, "stride rule")?[0] {
        0 => StrideRule::Parabolic,
        1 => StrideRule::Isotropic,
        b => return Err(r.bad(at, format!("unknown stride rule {b}"))),
    };
    let channels = r.u32("channel count")? as usize;
    let params = ShearletParams { levels, ladder, generator, base_stride, stride_rule };
    Ok(FilterCache { n, params, eps_supp, channels })
}

/// Read only the header of a cache file.
pub fn read_cache_header(path: &Path) -> Result<FilterCache> {
    let data = fs::read(path)?;
    read_header(&mut Reader { data: &data, pos: 0 })
}

/// Load a cached system; filters are renormalized to unit atom norm.
pub fn read_filter_cache(path: &Path, domain: &DigitalDomain) -> Result<ShearletSystem> {
    let data = fs::read(path)?;
    let mut r = Reader { data: &data, pos: 0 };
    let head = read_header(&mut r)?;
    if head.n != domain.n() {
        return Err(r.bad(8, format!("cache is for n = {}, not {}", head.n, domain.n())));
    }
    let n = head.n;
    if head.channels != head.params.channel_count() {
        return Err(r.bad(r.pos - 4, "channel count inconsistent with ladder"));
    }
    let mut specs = Vec::with_capacity(head.channels);
    for _ in 0..head.channels {
        let at = r.pos;
        let j = r.i32("channel scale")?;
        let k = r.i32("channel shear")?;
        let iota = r.take(1, "channel cone")?[0] as i8;
        if j < 0 || !(-1..=1).contains(&iota) {
            return Err(r.bad(at, "invalid channel label"));
        }
        let mut filter = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let re = r.f32("filter sample")?;
            let _im = r.f32("filter sample")?;
            filter.push(re as f64);
        }
        specs.push((j as u32, k, iota, filter));
    }
    if r.pos != data.len() {
        return Err(r.bad(r.pos, "trailing bytes after last channel"));
    }
    ShearletSystem::from_filters(domain, head.params, specs)
}
