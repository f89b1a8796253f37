//! Bernoulli bond configurations and couplings.
//!
//! Bond i of a region is open iff `unit_f64(seed, i) < p`, a strict
//! comparison. The per-bond uniform is a pure function of (seed, i), so a
//! configuration is fully determined by (region, p, seed) and can be
//! sampled in any order or in parallel.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::geometry::{Region, RegionDescriptor, SlabSpec};
use crate::rng::unit_f64;

/// One bond configuration on a region, open = 1.
#[derive(Clone)]
pub struct Config {
    region: Arc<Region>,
    p: f64,
    seed: u64,
    bits: Vec<u64>,
}

impl Config {
    #[inline]
    pub fn is_open(&self, bond: u32) -> bool {
        self.bits[(bond >> 6) as usize] & (1u64 << (bond & 63)) != 0
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn region_arc(&self) -> &Arc<Region> {
        &self.region
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn open_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Build a configuration from explicit bond states (tests, replay).
    pub fn from_open_bonds(region: Arc<Region>, open: &[u32], p: f64, seed: u64) -> Config {
        let mut bits = vec![0u64; region.bond_count().div_ceil(64)];
        for &b in open {
            assert!((b as usize) < region.bond_count());
            bits[(b >> 6) as usize] |= 1u64 << (b & 63);
        }
        Config {
            region,
            p,
            seed,
            bits,
        }
    }

    pub(crate) fn from_words(region: Arc<Region>, bits: Vec<u64>, p: f64, seed: u64) -> Config {
        debug_assert_eq!(bits.len(), region.bond_count().div_ceil(64));
        Config {
            region,
            p,
            seed,
            bits,
        }
    }

    /// Run-length-encoded export with enough header to replay the sample.
    pub fn export(&self) -> ConfigExport {
        let n = self.region.bond_count();
        let mut runs: Vec<(u64, u8)> = Vec::new();
        let mut i = 0u32;
        while (i as usize) < n {
            let v = self.is_open(i);
            let mut len = 1u64;
            while ((i + 1) as usize) < n && self.is_open(i + 1) == v {
                i += 1;
                len += 1;
            }
            runs.push((len, v as u8));
            i += 1;
        }
        ConfigExport {
            region: self.region.descriptor(),
            p: self.p,
            seed: self.seed,
            bonds: n as u64,
            runs,
        }
    }
}

/// Serialized form of a configuration: header plus RLE bond bitmap.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigExport {
    pub region: RegionDescriptor,
    pub p: f64,
    pub seed: u64,
    pub bonds: u64,
    pub runs: Vec<(u64, u8)>,
}

impl ConfigExport {
    pub fn restore(&self) -> Result<Config> {
        let spec = SlabSpec::new(self.region.k, self.region.d)?;
        let [x0, x1, y0, y1] = self.region.base;
        let region = Region::new(spec, x0, x1, y0, y1)?;
        if self.bonds as usize != region.bond_count() {
            return Err(Error::BadConfigData(format!(
                "bond count {} does not match region ({})",
                self.bonds,
                region.bond_count()
            )));
        }
        let total: u64 = self.runs.iter().map(|r| r.0).sum();
        if total != self.bonds {
            return Err(Error::BadConfigData("run lengths do not sum to bond count".into()));
        }
        let mut open = Vec::new();
        let mut at = 0u32;
        for &(len, v) in &self.runs {
            if v != 0 {
                open.extend(at..at + len as u32);
            }
            at += len as u32;
        }
        Ok(Config::from_open_bonds(region, &open, self.p, self.seed))
    }
}

/// Per-bond uniforms shared across p values (monotone coupling device).
#[derive(Clone)]
pub struct UniformSheet {
    region: Arc<Region>,
    seed: u64,
    u: Vec<f64>,
}

impl UniformSheet {
    pub fn new(region: &Arc<Region>, seed: u64) -> UniformSheet {
        let u = (0..region.bond_count() as u64)
            .map(|i| unit_f64(seed, i))
            .collect();
        UniformSheet {
            region: Arc::clone(region),
            seed,
            u,
        }
    }

    /// Sheet with explicit uniforms, for boundary-convention tests.
    pub fn from_values(region: &Arc<Region>, u: Vec<f64>, seed: u64) -> UniformSheet {
        assert_eq!(u.len(), region.bond_count());
        UniformSheet {
            region: Arc::clone(region),
            seed,
            u,
        }
    }

    pub fn u(&self, bond: u32) -> f64 {
        self.u[bond as usize]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn region_arc(&self) -> &Arc<Region> {
        &self.region
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    Ok(())
}

/// i.i.d. Bernoulli(p) bond states from the counter stream of `seed`.
pub fn sample(region: &Arc<Region>, p: f64, seed: u64) -> Result<Config> {
    check_p(p)?;
    let n = region.bond_count();
    let mut bits = vec![0u64; n.div_ceil(64)];
    for w in 0..bits.len() {
        let mut word = 0u64;
        let lo = (w * 64) as u64;
        let hi = ((w * 64 + 64).min(n)) as u64;
        for i in lo..hi {
            if unit_f64(seed, i) < p {
                word |= 1u64 << (i - lo);
            }
        }
        bits[w] = word;
    }
    Ok(Config::from_words(Arc::clone(region), bits, p, seed))
}

/// Threshold a sheet: bond open iff u_i < p. For p1 <= p2 the open set at
/// p1 is contained in the open set at p2.
pub fn threshold(sheet: &UniformSheet, p: f64) -> Result<Config> {
    check_p(p)?;
    let n = sheet.region.bond_count();
    let mut bits = vec![0u64; n.div_ceil(64)];
    for (i, &u) in sheet.u.iter().enumerate() {
        if u < p {
            bits[i >> 6] |= 1u64 << (i & 63);
        }
    }
    Ok(Config::from_words(
        Arc::clone(&sheet.region),
        bits,
        p,
        sheet.seed,
    ))
}

/// Redraw every bond outside `frozen` as fresh Bernoulli(p) from `seed2`;
/// frozen bonds keep the state they have in `config`.
pub fn resample_conditional(config: &Config, frozen: &BitSet, seed2: u64) -> Config {
    let region = Arc::clone(config.region_arc());
    let n = region.bond_count();
    debug_assert_eq!(frozen.len(), n);
    let p = config.p();
    let mut bits = vec![0u64; n.div_ceil(64)];
    for i in 0..n as u32 {
        let open = if frozen.contains(i) {
            config.is_open(i)
        } else {
            unit_f64(seed2, i as u64) < p
        };
        if open {
            bits[(i >> 6) as usize] |= 1u64 << (i & 63);
        }
    }
    Config::from_words(region, bits, p, seed2)
}
