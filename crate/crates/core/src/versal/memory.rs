//! PL buffer geometry and BRAM/URAM cost model.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use super::{AieSolution, VersalError};

/// Largest buffer depth (in 128-bit entries) the model accepts.
pub const MAX_DEPTH: u64 = 4096;
/// Width of every PL buffer entry, matching the 128-bit PLIO.
pub const ENTRY_BITS: u64 = 128;
pub const BRAM36_BITS: u64 = 36 * 1024;
pub const URAM_BITS: u64 = 288 * 1024;

/// A BRAM count kept in half-block units so that 7.5-block buffers sum
/// exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BramUnits {
    halves: u64,
}

impl BramUnits {
    pub const fn from_halves(halves: u64) -> Self {
        Self { halves }
    }

    pub const fn halves(self) -> u64 {
        self.halves
    }

    pub fn as_f64(self) -> f64 {
        self.halves as f64 / 2.0
    }

    /// Whole 36K blocks needed to hold this many units.
    pub const fn blocks(self) -> u64 {
        self.halves.div_ceil(2)
    }
}

impl Add for BramUnits {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_halves(self.halves + rhs.halves)
    }
}

impl Mul<u64> for BramUnits {
    type Output = Self;
    fn mul(self, rhs: u64) -> Self {
        Self::from_halves(self.halves * rhs)
    }
}

impl fmt::Display for BramUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.halves.is_multiple_of(2) {
            write!(f, "{}", self.halves / 2)
        } else {
            write!(f, "{}.5", self.halves / 2)
        }
    }
}

fn check_depth(depth: u64) -> Result<(), VersalError> {
    if depth == 0 {
        return Err(VersalError::ZeroDepth);
    }
    if depth > MAX_DEPTH {
        return Err(VersalError::DepthCap { depth });
    }
    Ok(())
}

/// 36K BRAMs needed for one 128-bit wide buffer of `depth` entries.
///
/// The four bands correspond to the 512x72, 1Kx36, 2Kx18 (with the last two
/// bits packed into half a block) and 4Kx9 configurations.
pub fn bram_cost(depth: u64) -> Result<BramUnits, VersalError> {
    check_depth(depth)?;
    let halves = match depth {
        0..=512 => 4,
        513..=1024 => 8,
        1025..=2048 => 15,
        _ => 30,
    };
    Ok(BramUnits::from_halves(halves))
}

/// URAMs needed for one 128-bit wide buffer; URAM only offers 4Kx72.
pub fn uram_cost(depth: u64) -> Result<u64, VersalError> {
    check_depth(depth)?;
    Ok(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Resource {
    #[serde(rename = "BRAM")]
    Bram,
    #[serde(rename = "URAM")]
    Uram,
}

impl Resource {
    pub fn short(self) -> char {
        match self {
            Resource::Bram => 'B',
            Resource::Uram => 'U',
        }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Bram => "BRAM",
            Resource::Uram => "URAM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Buffer {
    A,
    B,
    C,
}

impl Buffer {
    pub const ALL: [Buffer; 3] = [Buffer::A, Buffer::B, Buffer::C];

    pub fn name(self) -> &'static str {
        match self {
            Buffer::A => "A",
            Buffer::B => "B",
            Buffer::C => "C",
        }
    }
}

/// Physical resource chosen for each of the A, B and C buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mapping {
    pub a: Resource,
    pub b: Resource,
    pub c: Resource,
}

impl Mapping {
    pub const fn new(a: Resource, b: Resource, c: Resource) -> Self {
        Self { a, b, c }
    }

    /// Every assignment, ordered lexicographically over (A, B, C) with
    /// BRAM before URAM.
    pub fn all() -> [Mapping; 8] {
        use Resource::{Bram as B, Uram as U};
        [
            Mapping::new(B, B, B),
            Mapping::new(B, B, U),
            Mapping::new(B, U, B),
            Mapping::new(B, U, U),
            Mapping::new(U, B, B),
            Mapping::new(U, B, U),
            Mapping::new(U, U, B),
            Mapping::new(U, U, U),
        ]
    }

    pub fn get(&self, buffer: Buffer) -> Resource {
        match buffer {
            Buffer::A => self.a,
            Buffer::B => self.b,
            Buffer::C => self.c,
        }
    }

    /// `BUU` form.
    pub fn compact(&self) -> String {
        [self.a, self.b, self.c].iter().map(|r| r.short()).collect()
    }

    /// Parses the compact `BUU` form used on the command line.
    pub fn parse_compact(s: &str) -> Option<Self> {
        let mut it = s.trim().chars().filter(|c| c.is_alphabetic()).map(|c| {
            match c.to_ascii_uppercase() {
                'B' => Some(Resource::Bram),
                'U' => Some(Resource::Uram),
                _ => None,
            }
        });
        let m = Mapping::new(it.next()??, it.next()??, it.next()??);
        it.next().is_none().then_some(m)
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.a.short(), self.b.short(), self.c.short())
    }
}

/// Partition factors and per-partition depths of the double-buffered A, B
/// and C buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BufferGeometry {
    pub a_part: u64,
    pub b_part: u64,
    pub c_part: u64,
    pub a_depth: u64,
    pub b_depth: u64,
    pub c_depth: u64,
}

impl BufferGeometry {
    pub fn part(&self, buffer: Buffer) -> u64 {
        match buffer {
            Buffer::A => self.a_part,
            Buffer::B => self.b_part,
            Buffer::C => self.c_part,
        }
    }

    pub fn depth(&self, buffer: Buffer) -> u64 {
        match buffer {
            Buffer::A => self.a_depth,
            Buffer::B => self.b_depth,
            Buffer::C => self.c_depth,
        }
    }

    pub fn max_depth(&self) -> u64 {
        self.a_depth.max(self.b_depth).max(self.c_depth)
    }

    /// Logical bits held across all partitions.
    pub fn logical_bits(&self) -> u128 {
        Buffer::ALL
            .iter()
            .map(|&b| self.part(b) as u128 * self.depth(b) as u128 * ENTRY_BITS as u128)
            .sum()
    }
}

fn exact_div(num: u64, den: u64, what: &'static str) -> Result<u64, VersalError> {
    if !num.is_multiple_of(den) {
        return Err(VersalError::FractionalDepth { buffer: what, numerator: num, divisor: den });
    }
    Ok(num / den)
}

/// Partition factors follow the PLIO port counts (doubled for
/// double-buffering); depths pack 16 int8 or 4 int32 values per entry.
pub fn buffer_geometry(aie: &AieSolution, u: u64, v: u64, w: u64) -> Result<BufferGeometry, VersalError> {
    if u == 0 || v == 0 || w == 0 {
        return Err(VersalError::ZeroTiling);
    }
    Ok(BufferGeometry {
        a_part: 2 * aie.x * aie.y,
        b_part: 2 * aie.y * aie.z,
        c_part: 2 * aie.x * aie.z,
        a_depth: exact_div(u * v * aie.m * aie.k, 16, "A")?,
        b_depth: exact_div(v * w * aie.k * aie.n, 16, "B")?,
        c_depth: exact_div(u * w * aie.m * aie.n, 4, "C")?,
    })
}

/// Resources taken by a geometry under a mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResourceUse {
    /// Exact BRAM total, possibly with a half block.
    pub bram_units: BramUnits,
    /// BRAM total rounded up to whole blocks.
    pub brams: u64,
    pub urams: u64,
}

/// Sums `part·cost(depth)` per resource kind; the BRAM sum is rounded up
/// once, at the end.
pub fn mapping_resources(geometry: &BufferGeometry, mapping: Mapping) -> Result<ResourceUse, VersalError> {
    let mut bram_units = BramUnits::default();
    let mut urams = 0;
    for buffer in Buffer::ALL {
        let (part, depth) = (geometry.part(buffer), geometry.depth(buffer));
        match mapping.get(buffer) {
            Resource::Bram => bram_units = bram_units + bram_cost(depth)? * part,
            Resource::Uram => urams += uram_cost(depth)? * part,
        }
    }
    Ok(ResourceUse { bram_units, brams: bram_units.blocks(), urams })
}

/// Logical buffer bits over the physical bits of the blocks used.
pub fn ram_efficiency_of(geometry: &BufferGeometry, brams: u64, urams: u64) -> f64 {
    let physical = brams as u128 * BRAM36_BITS as u128 + urams as u128 * URAM_BITS as u128;
    geometry.logical_bits() as f64 / physical as f64
}
