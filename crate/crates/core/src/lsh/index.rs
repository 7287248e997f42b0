//! Multi-table p-stable LSH index with exact re-ranking.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::params::LshParams;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::{check_dim, l2};

const MAGIC: &[u8; 8] = b"KNNSVLSH";
const VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
struct Table {
    /// `m x d` row-major Gaussian projections.
    proj: Vec<f64>,
    offsets: Vec<f64>,
    buckets: HashMap<Box<[i64]>, Vec<usize>>,
}

impl Table {
    fn code(&self, x: &[f64], width: f64, out: &mut Vec<i64>) {
        let d = x.len();
        out.clear();
        out.extend(self.offsets.iter().enumerate().map(|(h, b)| {
            let w = &self.proj[h * d..(h + 1) * d];
            let dot: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            ((dot + b) / width).floor() as i64
        }));
    }
}

/// `l` hash tables over a dataset. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LshIndex {
    n: usize,
    d: usize,
    params: LshParams,
    tables: Vec<Table>,
}

/// Approximate neighbors of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieval {
    /// `(point, distance)` nearest first, at most `K*` entries.
    pub neighbors: Vec<(usize, f64)>,
    /// Distinct points found across all tables.
    pub candidates: usize,
    /// Fewer than `K*` candidates were found.
    pub short: bool,
}

impl LshIndex {
    /// Draws projections from a ChaCha stream per table, so a fixed seed
    /// reproduces the index regardless of thread count.
    pub fn build(ds: &Dataset, params: LshParams) -> Result<Self> {
        params.validate()?;
        let d = ds.dim();
        let tables = (0..params.l)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(t as u64);
                let proj: Vec<f64> = (0..params.m * d).map(|_| rng.sample(StandardNormal)).collect();
                let offsets: Vec<f64> = (0..params.m).map(|_| rng.random_range(0.0..params.width)).collect();
                let mut table = Table { proj, offsets, buckets: HashMap::new() };
                let mut code = Vec::with_capacity(params.m);
                for i in 0..ds.len() {
                    table.code(ds.row(i), params.width, &mut code);
                    table.buckets.entry(code.clone().into_boxed_slice()).or_default().push(i);
                }
                table
            })
            .collect();
        Ok(Self { n: ds.len(), d, params, tables })
    }

    pub fn params(&self) -> &LshParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Union of the query's buckets over all tables, re-ranked by true
    /// distance (ties by index); the first `k_star` are returned.
    pub fn retrieve(&self, ds: &Dataset, query: &[f64], k_star: usize) -> Result<Retrieval> {
        check_dim(ds, query)?;
        if ds.len() != self.n || ds.dim() != self.d {
            return Err(Error::InvalidArgument("dataset does not match the index".into()));
        }
        let mut visited = vec![false; self.n];
        let mut found = Vec::new();
        let mut code = Vec::with_capacity(self.params.m);
        for table in &self.tables {
            table.code(query, self.params.width, &mut code);
            if let Some(ids) = table.buckets.get(code.as_slice()) {
                for &i in ids {
                    if !std::mem::replace(&mut visited[i], true) {
                        found.push(i);
                    }
                }
            }
        }
        let candidates = found.len();
        let mut ranked: Vec<(usize, f64)> = found.into_iter().map(|i| (i, l2(ds.row(i), query))).collect();
        ranked.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        ranked.truncate(k_star);
        Ok(Retrieval { short: ranked.len() < k_star.min(self.n), neighbors: ranked, candidates })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(&mut BufReader::new(File::open(path)?))
    }

    /// Little-endian layout: magic, version, N, d, m, l, width, seed; then
    /// per table the projections, offsets, bucket count and each bucket
    /// (code, posting count, point ids) in ascending code order.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        let p = &self.params;
        for v in [VERSION, self.n as u64, self.d as u64, p.m as u64, p.l as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&p.width.to_le_bytes())?;
        w.write_all(&p.seed.to_le_bytes())?;
        for t in &self.tables {
            for v in t.proj.iter().chain(&t.offsets) {
                w.write_all(&v.to_le_bytes())?;
            }
            let mut codes: Vec<&Box<[i64]>> = t.buckets.keys().collect();
            codes.sort_unstable();
            w.write_all(&(codes.len() as u64).to_le_bytes())?;
            for code in codes {
                for c in code.iter() {
                    w.write_all(&c.to_le_bytes())?;
                }
                let ids = &t.buckets[code];
                w.write_all(&(ids.len() as u64).to_le_bytes())?;
                for &i in ids {
                    w.write_all(&(i as u64).to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not an LSH index file".into()));
        }
        let version = read_u64(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported index version {version}")));
        }
        let n = read_len(r)?;
        let d = read_len(r)?;
        let m = read_len(r)?;
        let l = read_len(r)?;
        let width = f64::from_le_bytes(read_bytes(r)?);
        let seed = read_u64(r)?;
        let params = LshParams { m, l, width, seed };
        params.validate().map_err(|e| Error::Format(e.to_string()))?;
        let mut tables = Vec::with_capacity(l);
        for _ in 0..l {
            let proj = (0..m * d).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
            let offsets = (0..m).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
            let count = read_len(r)?;
            let mut buckets = HashMap::with_capacity(count);
            for _ in 0..count {
                let code = (0..m).map(|_| Ok(read_u64(r)? as i64)).collect::<Result<Vec<_>>>()?;
                let len = read_len(r)?;
                let ids = (0..len)
                    .map(|_| {
                        let i = read_len(r)?;
                        if i >= n {
                            return Err(Error::Format(format!("point id {i} out of range")));
                        }
                        Ok(i)
                    })
                    .collect::<Result<Vec<_>>>()?;
                buckets.insert(code.into_boxed_slice(), ids);
            }
            tables.push(Table { proj, offsets, buckets });
        }
        Ok(Self { n, d, params, tables })
    }
}

fn read_bytes<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::Format(format!("truncated index: {e}")))?;
    Ok(b)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    Ok(u64::from_le_bytes(read_bytes(r)?))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(read_bytes(r)?))
}

fn read_len(r: &mut impl Read) -> Result<usize> {
    usize::try_from(read_u64(r)?).map_err(|_| Error::Format("length does not fit in memory".into()))
}
