//! Reconfigurable design: modules, their tile requirements and interconnect.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fabric::{Fabric, ResourceKind, ResourceVector};

/// One reconfigurable region. `req` is the folded maximum over every partial
/// module that may be loaded into the region, in tiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpec {
    pub id: String,
    pub name: String,
    pub req: ResourceVector,
}

impl ModuleSpec {
    pub fn new(id: impl Into<String>, req: ResourceVector) -> Self {
        let id = id.into();
        ModuleSpec { name: id.clone(), id, req }
    }
}

/// Undirected link between two modules (indices into [`Design::modules`]),
/// stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Connection {
    pub a: usize,
    pub b: usize,
    pub signals: u32,
}

impl Connection {
    /// The endpoint opposite to `module`, if `module` is an endpoint.
    pub fn other(&self, module: usize) -> Option<usize> {
        if self.a == module {
            Some(self.b)
        } else if self.b == module {
            Some(self.a)
        } else {
            None
        }
    }
}

/// Connection as written in a design document, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSpec {
    pub a: String,
    pub b: String,
    pub signals: i64,
}

impl ConnectionSpec {
    pub fn new(a: impl Into<String>, b: impl Into<String>, signals: i64) -> Self {
        ConnectionSpec { a: a.into(), b: b.into(), signals }
    }
}

/// Objective weights: `alpha` on wastage, `beta` on wirelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { alpha: 0.5, beta: 0.5 }
    }
}

impl Weights {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0;
        if ok {
            Ok(Weights { alpha, beta })
        } else {
            Err(Error::InvalidWeights)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    modules: Vec<ModuleSpec>,
    connections: Vec<Connection>,
    weights: Weights,
}

impl Design {
    /// Validates the module list and merges duplicate connections (in either
    /// direction) by summing their signal counts.
    pub fn new(modules: Vec<ModuleSpec>, connections: &[ConnectionSpec], weights: Weights) -> Result<Self> {
        let weights = Weights::new(weights.alpha, weights.beta)?;
        let mut index = BTreeMap::new();
        for (i, m) in modules.iter().enumerate() {
            if m.req.is_zero() {
                return Err(Error::ZeroRequirement(m.id.clone()));
            }
            if index.insert(m.id.as_str(), i).is_some() {
                return Err(Error::DuplicateModule(m.id.clone()));
            }
        }

        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for c in connections {
            let a = *index.get(c.a.as_str()).ok_or_else(|| Error::UnknownModule(c.a.clone()))?;
            let b = *index.get(c.b.as_str()).ok_or_else(|| Error::UnknownModule(c.b.clone()))?;
            if c.signals <= 0 || c.signals > u32::MAX as i64 {
                return Err(Error::NonPositiveSignals(format!("{}-{}", c.a, c.b)));
            }
            if a == b {
                return Err(Error::SelfConnection(c.a.clone()));
            }
            *merged.entry((a.min(b), a.max(b))).or_default() += c.signals as u32;
        }
        let connections = merged.into_iter().map(|((a, b), signals)| Connection { a, b, signals }).collect();

        Ok(Design { modules, connections, weights })
    }

    pub fn modules(&self) -> &[ModuleSpec] {
        &self.modules
    }

    pub fn module(&self, index: usize) -> &ModuleSpec {
        &self.modules[index]
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn weights(&self) -> Weights {
        self.weights
    }

    pub fn with_weights(mut self, weights: Weights) -> Result<Self> {
        self.weights = Weights::new(weights.alpha, weights.beta)?;
        Ok(self)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.modules.iter().position(|m| m.id == id)
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    /// Connections touching `module`.
    pub fn connections_of(&self, module: usize) -> impl Iterator<Item = &Connection> {
        self.connections.iter().filter(move |c| c.a == module || c.b == module)
    }

    pub fn total_frames(&self, fabric: &Fabric) -> u64 {
        self.modules.iter().map(|m| fabric.frames_of(&m.req)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ListTag {
    S1,
    S2,
    S3,
    S4,
}

impl ListTag {
    pub const ALL: [ListTag; 4] = [ListTag::S1, ListTag::S2, ListTag::S3, ListTag::S4];

    pub fn of(req: &ResourceVector) -> ListTag {
        match (req.dsp > 0, req.bram > 0) {
            (true, true) => ListTag::S1,
            (true, false) => ListTag::S2,
            (false, true) => ListTag::S3,
            (false, false) => ListTag::S4,
        }
    }

    pub fn class(self) -> PriorityClass {
        use ResourceKind::*;
        let (primary, secondary, tertiary) = match self {
            ListTag::S1 => (Dsp, Some(Bram), Some(Clb)),
            ListTag::S2 => (Dsp, Some(Clb), None),
            ListTag::S3 => (Bram, Some(Clb), None),
            ListTag::S4 => (Clb, None, None),
        };
        PriorityClass { tag: self, primary, secondary, tertiary }
    }
}

/// Resource priority order for one module list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorityClass {
    pub tag: ListTag,
    pub primary: ResourceKind,
    pub secondary: Option<ResourceKind>,
    pub tertiary: Option<ResourceKind>,
}

impl PriorityClass {
    pub fn of(req: &ResourceVector) -> PriorityClass {
        ListTag::of(req).class()
    }

    fn sort_key(&self, req: &ResourceVector) -> (u32, u32, u32) {
        let at = |k: Option<ResourceKind>| k.map_or(0, |k| req.get(k));
        (req.get(self.primary), at(self.secondary), at(self.tertiary))
    }
}

/// The four priority lists, each holding module indices in ascending
/// requirement order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Classified {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub s3: Vec<usize>,
    pub s4: Vec<usize>,
}

impl Classified {
    pub fn list(&self, tag: ListTag) -> &[usize] {
        match tag {
            ListTag::S1 => &self.s1,
            ListTag::S2 => &self.s2,
            ListTag::S3 => &self.s3,
            ListTag::S4 => &self.s4,
        }
    }

    /// All modules, list by list.
    pub fn iter(&self) -> impl Iterator<Item = (ListTag, usize)> + '_ {
        ListTag::ALL.into_iter().flat_map(move |tag| self.list(tag).iter().map(move |&m| (tag, m)))
    }
}

pub fn classify_modules(design: &Design) -> Classified {
    let mut out = Classified::default();
    for (i, m) in design.modules().iter().enumerate() {
        let list = match ListTag::of(&m.req) {
            ListTag::S1 => &mut out.s1,
            ListTag::S2 => &mut out.s2,
            ListTag::S3 => &mut out.s3,
            ListTag::S4 => &mut out.s4,
        };
        list.push(i);
    }
    for tag in ListTag::ALL {
        let class = tag.class();
        let list = match tag {
            ListTag::S1 => &mut out.s1,
            ListTag::S2 => &mut out.s2,
            ListTag::S3 => &mut out.s3,
            ListTag::S4 => &mut out.s4,
        };
        list.sort_by(|&a, &b| {
            let (ma, mb) = (design.module(a), design.module(b));
            class.sort_key(&ma.req).cmp(&class.sort_key(&mb.req)).then_with(|| ma.id.cmp(&mb.id))
        });
    }
    out
}

/// Target occupancy per resource kind, as fractions of the fabric's free tiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    pub clb: f64,
    pub bram: f64,
    pub dsp: f64,
}

impl Occupancy {
    pub fn new(clb: f64, bram: f64, dsp: f64) -> Self {
        Occupancy { clb, bram, dsp }
    }

    fn get(&self, kind: ResourceKind) -> f64 {
        match kind {
            ResourceKind::Clb => self.clb,
            ResourceKind::Bram => self.bram,
            ResourceKind::Dsp => self.dsp,
        }
    }
}

/// Signal count of every generated connection (a 64-bit bus).
pub const RANDOM_BUS_WIDTH: u32 = 64;

/// Seeded pseudo-random design (ChaCha8, `seed_from_u64`).
///
/// Per-kind tile totals equal `floor(occupancy · free tiles)`. Every module
/// takes CLB tiles; each module is flagged for BRAM and for DSP with
/// probability 1/2. The total of a kind is split over its flagged modules by
/// uniform weights in [1, 2] on top of a one-tile floor, with the rounding
/// remainder handed to the lowest-index modules. Each unordered pair is
/// connected with probability 1/n.
pub fn generate_random_design(n: usize, fabric: &Fabric, occupancy: Occupancy, seed: u64) -> Result<Design> {
    if n < 2 {
        return Err(Error::TooFewModules);
    }
    for kind in ResourceKind::ALL {
        let f = occupancy.get(kind);
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::InvalidOccupancy(kind));
        }
    }

    let free = fabric.free_resources_in_rect(&fabric.full_rect())?;
    // The epsilon absorbs representation error, e.g. 0.29 * 100 = 28.999...
    let target = |kind: ResourceKind| (occupancy.get(kind) * free.get(kind) as f64 + 1e-9) as u32;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reqs = alloc::vec![ResourceVector::ZERO; n];

    let clb_target = target(ResourceKind::Clb);
    if (clb_target as usize) < n {
        return Err(Error::InfeasibleOccupancy { kind: ResourceKind::Clb, target: clb_target, modules: n });
    }
    let everyone: Vec<usize> = (0..n).collect();
    split_target(&mut rng, &mut reqs, &everyone, ResourceKind::Clb, clb_target);

    let bram_flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let dsp_flags: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    for (kind, flags) in [(ResourceKind::Bram, bram_flags), (ResourceKind::Dsp, dsp_flags)] {
        let total = target(kind);
        let mut holders: Vec<usize> = (0..n).filter(|&i| flags[i]).collect();
        if holders.is_empty() && total > 0 {
            holders.push(rng.random_range(0..n));
        }
        holders.truncate(total as usize);
        split_target(&mut rng, &mut reqs, &holders, kind, total);
    }

    let width = digits(n - 1);
    let modules =
        reqs.into_iter().enumerate().map(|(i, req)| ModuleSpec::new(format!("m{i:0width$}"), req)).collect::<Vec<_>>();

    let p = 1.0 / n as f64;
    let mut connections = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                connections.push(ConnectionSpec::new(
                    modules[a].id.clone(),
                    modules[b].id.clone(),
                    RANDOM_BUS_WIDTH as i64,
                ));
            }
        }
    }

    Design::new(modules, &connections, Weights::default())
}

fn digits(mut v: usize) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

fn split_target(rng: &mut ChaCha8Rng, reqs: &mut [ResourceVector], holders: &[usize], kind: ResourceKind, total: u32) {
    if holders.is_empty() || total == 0 {
        return;
    }
    debug_assert!(total as usize >= holders.len());
    let weights: Vec<f64> = holders.iter().map(|_| rng.random_range(1.0..=2.0)).collect();
    let sum: f64 = weights.iter().sum();
    let spread = total - holders.len() as u32;
    let mut shares: Vec<u32> = weights.iter().map(|w| 1 + (spread as f64 * w / sum) as u32).collect();
    let assigned: u32 = shares.iter().sum();
    // floor() can only lose less than one tile per holder
    let mut remainder = total.saturating_sub(assigned) as usize;
    for share in shares.iter_mut() {
        if remainder == 0 {
            break;
        }
        *share += 1;
        remainder -= 1;
    }
    for (&m, share) in holders.iter().zip(shares) {
        *reqs[m].get_mut(kind) += share;
    }
}
