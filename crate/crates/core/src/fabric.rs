//! Tile-grid model of a heterogeneous FPGA.
//!
//! The device is a matrix of tiles: rows are clock regions (indexed bottom to
//! top), columns are resource columns (indexed left to right). Every column
//! carries a single [`ResourceKind`] for the full device height. Some tiles
//! can be reserved (hard blocks, static logic) and are never handed out.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// The three resource kinds a tile column can provide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResourceKind {
    Clb,
    Bram,
    Dsp,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 3] = [ResourceKind::Clb, ResourceKind::Bram, ResourceKind::Dsp];

    /// Single-character code used by the fabric description format.
    pub fn code(self) -> char {
        match self {
            ResourceKind::Clb => 'C',
            ResourceKind::Bram => 'B',
            ResourceKind::Dsp => 'D',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'C' => Some(ResourceKind::Clb),
            'B' => Some(ResourceKind::Bram),
            'D' => Some(ResourceKind::Dsp),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            ResourceKind::Clb => 0,
            ResourceKind::Bram => 1,
            ResourceKind::Dsp => 2,
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceKind::Clb => "CLB",
            ResourceKind::Bram => "BRAM",
            ResourceKind::Dsp => "DSP",
        })
    }
}

/// Tile counts per resource kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct ResourceVector {
    pub clb: u32,
    pub bram: u32,
    pub dsp: u32,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector { clb: 0, bram: 0, dsp: 0 };

    pub const fn new(clb: u32, bram: u32, dsp: u32) -> Self {
        ResourceVector { clb, bram, dsp }
    }

    pub fn get(&self, kind: ResourceKind) -> u32 {
        match kind {
            ResourceKind::Clb => self.clb,
            ResourceKind::Bram => self.bram,
            ResourceKind::Dsp => self.dsp,
        }
    }

    pub fn get_mut(&mut self, kind: ResourceKind) -> &mut u32 {
        match kind {
            ResourceKind::Clb => &mut self.clb,
            ResourceKind::Bram => &mut self.bram,
            ResourceKind::Dsp => &mut self.dsp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.clb == 0 && self.bram == 0 && self.dsp == 0
    }

    pub fn total(&self) -> u32 {
        self.clb + self.bram + self.dsp
    }

    /// `true` iff every component of `self` is at least that of `other`.
    pub fn covers(&self, other: &ResourceVector) -> bool {
        self.clb >= other.clb && self.bram >= other.bram && self.dsp >= other.dsp
    }

    /// Componentwise difference, `None` when any component would go negative.
    pub fn checked_sub(&self, other: &ResourceVector) -> Option<ResourceVector> {
        Some(ResourceVector {
            clb: self.clb.checked_sub(other.clb)?,
            bram: self.bram.checked_sub(other.bram)?,
            dsp: self.dsp.checked_sub(other.dsp)?,
        })
    }

    pub fn saturating_sub(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector {
            clb: self.clb.saturating_sub(other.clb),
            bram: self.bram.saturating_sub(other.bram),
            dsp: self.dsp.saturating_sub(other.dsp),
        }
    }

    pub fn component_min(&self, other: &ResourceVector) -> ResourceVector {
        ResourceVector { clb: self.clb.min(other.clb), bram: self.bram.min(other.bram), dsp: self.dsp.min(other.dsp) }
    }
}

impl Add for ResourceVector {
    type Output = ResourceVector;

    fn add(self, rhs: ResourceVector) -> ResourceVector {
        ResourceVector { clb: self.clb + rhs.clb, bram: self.bram + rhs.bram, dsp: self.dsp + rhs.dsp }
    }
}

impl AddAssign for ResourceVector {
    fn add_assign(&mut self, rhs: ResourceVector) {
        *self = *self + rhs;
    }
}

impl fmt::Display for ResourceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{CLB:{}, BRAM:{}, DSP:{}}}", self.clb, self.bram, self.dsp)
    }
}

/// Configuration frames per tile of each kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameWeights {
    pub clb: u32,
    pub bram: u32,
    pub dsp: u32,
}

impl Default for FrameWeights {
    fn default() -> Self {
        FrameWeights { clb: 36, bram: 30, dsp: 28 }
    }
}

impl FrameWeights {
    pub fn frames_of(&self, v: &ResourceVector) -> u64 {
        v.clb as u64 * self.clb as u64 + v.bram as u64 * self.bram as u64 + v.dsp as u64 * self.dsp as u64
    }
}

/// Primitive resources held by one tile of each kind, used to turn raw
/// utilization numbers (CLBs, BRAM blocks, DSP slices) into tile counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileCapacity {
    pub clb: u32,
    pub bram: u32,
    pub dsp: u32,
}

impl TileCapacity {
    /// Virtex-5 clock-region column heights.
    pub const VIRTEX5: TileCapacity = TileCapacity { clb: 20, bram: 4, dsp: 8 };

    /// Tiles needed to hold `raw` primitives, rounding up per kind.
    pub fn tiles_for(&self, raw: &ResourceVector) -> ResourceVector {
        ResourceVector {
            clb: raw.clb.div_ceil(self.clb),
            bram: raw.bram.div_ceil(self.bram),
            dsp: raw.dsp.div_ceil(self.dsp),
        }
    }
}

/// Inclusive rectangle of complete tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub row0: u32,
    pub col0: u32,
    pub row1: u32,
    pub col1: u32,
}

impl Rect {
    pub fn new(row0: u32, col0: u32, row1: u32, col1: u32) -> Self {
        debug_assert!(row0 <= row1 && col0 <= col1, "malformed rect");
        Rect { row0, col0, row1, col1 }
    }

    pub fn height(&self) -> u32 {
        self.row1 - self.row0 + 1
    }

    pub fn width(&self) -> u32 {
        self.col1 - self.col0 + 1
    }

    pub fn area(&self) -> u32 {
        self.width() * self.height()
    }

    /// Width over height, both in tiles.
    pub fn aspect_ratio(&self) -> f64 {
        self.width() as f64 / self.height() as f64
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let row0 = self.row0.max(other.row0);
        let row1 = self.row1.min(other.row1);
        let col0 = self.col0.max(other.col0);
        let col1 = self.col1.min(other.col1);
        (row0 <= row1 && col0 <= col1).then_some(Rect { row0, col0, row1, col1 })
    }

    /// Sharing a single tile counts as overlap.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.intersection(other).is_some()
    }

    pub fn overlap_area(&self, other: &Rect) -> u32 {
        self.intersection(other).map_or(0, |r| r.area())
    }

    pub fn contains(&self, other: &Rect) -> bool {
        self.row0 <= other.row0 && other.row1 <= self.row1 && self.col0 <= other.col0 && other.col1 <= self.col1
    }

    pub fn center(&self) -> Point {
        Point { x2: self.col0 + self.col1 + 1, y2: self.row0 + self.row1 + 1 }
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})-({},{})", self.row0, self.col0, self.row1, self.col1)
    }
}

/// A point on the tile grid stored in half-tile units so that every rect
/// center is exact. `x2 = 2·x`, `y2 = 2·y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x2: u32,
    pub y2: u32,
}

impl Point {
    pub fn x(&self) -> f64 {
        self.x2 as f64 / 2.0
    }

    pub fn y(&self) -> f64 {
        self.y2 as f64 / 2.0
    }

    /// Manhattan distance in half-tile units.
    pub fn manhattan2(&self, other: &Point) -> u64 {
        (self.x2.abs_diff(other.x2) + self.y2.abs_diff(other.y2)) as u64
    }
}

/// Center of the covered cell span of `rect`.
pub fn rect_center(rect: &Rect) -> Point {
    rect.center()
}

/// FPGA tile grid. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Fabric {
    rows: u32,
    columns: Vec<ResourceKind>,
    reserved: Vec<bool>,
    reserved_rects: Vec<Rect>,
    frames: FrameWeights,
    // kind_prefix[k][c] = number of columns of kind k among columns 0..c
    kind_prefix: [Vec<u32>; 3],
    // 2D prefix over reserved cells, (rows+1) x (cols+1)
    reserved_prefix: Vec<u32>,
    // per-kind 2D prefix over reserved cells
    reserved_kind_prefix: [Vec<u32>; 3],
}

impl Fabric {
    pub fn new(rows: u32, columns: Vec<ResourceKind>, reserved: &[Rect], frames: FrameWeights) -> Result<Self> {
        if rows == 0 {
            return Err(Error::InvalidFabric("fabric needs at least one row"));
        }
        if columns.is_empty() {
            return Err(Error::InvalidFabric("fabric needs at least one column"));
        }
        let cols = columns.len() as u32;
        let mut mask = vec![false; (rows * cols) as usize];
        for r in reserved {
            if r.row0 > r.row1 || r.col0 > r.col1 || r.row1 >= rows || r.col1 >= cols {
                return Err(Error::RectOutOfBounds(*r));
            }
            for row in r.row0..=r.row1 {
                for col in r.col0..=r.col1 {
                    mask[(row * cols + col) as usize] = true;
                }
            }
        }

        let mut kind_prefix =
            [vec![0u32; cols as usize + 1], vec![0u32; cols as usize + 1], vec![0u32; cols as usize + 1]];
        for (c, kind) in columns.iter().enumerate() {
            for k in ResourceKind::ALL {
                let add = (k == *kind) as u32;
                kind_prefix[k.index()][c + 1] = kind_prefix[k.index()][c] + add;
            }
        }

        let stride = cols as usize + 1;
        let size = (rows as usize + 1) * stride;
        let mut reserved_prefix = vec![0u32; size];
        let mut reserved_kind_prefix = [vec![0u32; size], vec![0u32; size], vec![0u32; size]];
        for row in 0..rows as usize {
            for col in 0..cols as usize {
                let cell = mask[row * cols as usize + col] as u32;
                let at = (row + 1) * stride + col + 1;
                reserved_prefix[at] =
                    cell + reserved_prefix[at - 1] + reserved_prefix[at - stride] - reserved_prefix[at - stride - 1];
                for k in ResourceKind::ALL {
                    let p = &mut reserved_kind_prefix[k.index()];
                    let hit = cell * (columns[col] == k) as u32;
                    p[at] = hit + p[at - 1] + p[at - stride] - p[at - stride - 1];
                }
            }
        }

        Ok(Fabric {
            rows,
            columns,
            reserved: mask,
            reserved_rects: reserved.to_vec(),
            frames,
            kind_prefix,
            reserved_prefix,
            reserved_kind_prefix,
        })
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.columns.len() as u32
    }

    pub fn columns(&self) -> &[ResourceKind] {
        &self.columns
    }

    pub fn frames(&self) -> FrameWeights {
        self.frames
    }

    /// Reserved rectangles as declared; overlapping declarations are kept.
    pub fn reserved_rects(&self) -> &[Rect] {
        &self.reserved_rects
    }

    /// Column-uniform: the row does not matter.
    pub fn kind_at(&self, _row: u32, col: u32) -> ResourceKind {
        self.columns[col as usize]
    }

    pub fn column_kind(&self, col: u32) -> ResourceKind {
        self.columns[col as usize]
    }

    pub fn is_reserved(&self, row: u32, col: u32) -> bool {
        self.reserved[(row * self.cols() + col) as usize]
    }

    /// Number of columns of `kind` (the device's B and D counts).
    pub fn column_count(&self, kind: ResourceKind) -> u32 {
        self.kind_prefix[kind.index()][self.columns.len()]
    }

    pub fn full_rect(&self) -> Rect {
        Rect::new(0, 0, self.rows - 1, self.cols() - 1)
    }

    pub fn in_bounds(&self, rect: &Rect) -> bool {
        rect.row0 <= rect.row1 && rect.col0 <= rect.col1 && rect.row1 < self.rows && rect.col1 < self.cols()
    }

    fn columns_of_kind(&self, kind: ResourceKind, col0: u32, col1: u32) -> u32 {
        let p = &self.kind_prefix[kind.index()];
        p[col1 as usize + 1] - p[col0 as usize]
    }

    fn prefix_query(&self, prefix: &[u32], rect: &Rect) -> u32 {
        let stride = self.cols() as usize + 1;
        let (r0, r1) = (rect.row0 as usize, rect.row1 as usize + 1);
        let (c0, c1) = (rect.col0 as usize, rect.col1 as usize + 1);
        prefix[r1 * stride + c1] + prefix[r0 * stride + c0] - prefix[r0 * stride + c1] - prefix[r1 * stride + c0]
    }

    /// Tile counts by kind inside `rect`, reserved tiles included.
    pub fn resources_in_rect(&self, rect: &Rect) -> Result<ResourceVector> {
        if !self.in_bounds(rect) {
            return Err(Error::RectOutOfBounds(*rect));
        }
        Ok(self.resources_unchecked(rect))
    }

    pub(crate) fn resources_unchecked(&self, rect: &Rect) -> ResourceVector {
        let h = rect.height();
        ResourceVector {
            clb: self.columns_of_kind(ResourceKind::Clb, rect.col0, rect.col1) * h,
            bram: self.columns_of_kind(ResourceKind::Bram, rect.col0, rect.col1) * h,
            dsp: self.columns_of_kind(ResourceKind::Dsp, rect.col0, rect.col1) * h,
        }
    }

    /// Tile counts by kind inside `rect`, reserved tiles excluded.
    pub fn free_resources_in_rect(&self, rect: &Rect) -> Result<ResourceVector> {
        let all = self.resources_in_rect(rect)?;
        let taken = ResourceVector {
            clb: self.prefix_query(&self.reserved_kind_prefix[0], rect),
            bram: self.prefix_query(&self.reserved_kind_prefix[1], rect),
            dsp: self.prefix_query(&self.reserved_kind_prefix[2], rect),
        };
        Ok(all.saturating_sub(&taken))
    }

    pub fn reserved_count(&self, rect: &Rect) -> u32 {
        self.prefix_query(&self.reserved_prefix, rect)
    }

    /// `true` iff `rect` is in bounds and touches no reserved tile.
    pub fn avoids_reserved(&self, rect: &Rect) -> bool {
        self.in_bounds(rect) && self.reserved_count(rect) == 0
    }

    /// `rect` avoids reserved tiles and every rect in `occupied`.
    pub fn is_free_rect(&self, rect: &Rect, occupied: &[Rect]) -> bool {
        self.avoids_reserved(rect) && occupied.iter().all(|o| !o.intersects(rect))
    }

    pub fn frames_of(&self, v: &ResourceVector) -> u64 {
        self.frames.frames_of(v)
    }
}
