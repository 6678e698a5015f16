//! Combinatorial descriptors of Morse-Smale surface diffeomorphisms.
//!
//! A descriptor records periodic orbits with orientation types, the
//! separatrix incidence of every saddle point together with a ribbon
//! embedding (cyclic slot orders at nodes plus twist signs), the induced
//! f-action, and the Smale order. This is enough data to compute
//! characteristic orbit spaces exactly.
//!
//! Gauge convention: each point carries a local orientation; the orientation
//! at point k+1 of an orbit is the pushforward of the one at point k. With
//! this normalization the f-action twists only at the orbit-closing step,
//! where its orientation behavior equals the orbit's type sign. Rotations,
//! twists and branch labels stored in a descriptor are all relative to this
//! gauge, and `validate` enforces the coherence conditions.

pub mod fixtures;
pub mod io;
pub mod sums;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type OrbitId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitKind {
    Sink,
    Saddle,
    Source,
}

/// Orientation data: a sign for nodes, the pair (nu, lambda) for saddles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrientationType {
    Node { sigma: i8 },
    Saddle { nu: i8, lambda: i8 },
}

impl OrientationType {
    /// Orientation behavior of the return map: sigma for nodes, nu*lambda
    /// for saddles.
    pub fn return_sign(&self) -> i8 {
        match self {
            OrientationType::Node { sigma } => *sigma,
            OrientationType::Saddle { nu, lambda } => nu * lambda,
        }
    }

    pub fn is_positive_saddle(&self) -> bool {
        matches!(self, OrientationType::Saddle { nu: 1, lambda: 1 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub name: String,
    pub kind: OrbitKind,
    pub period: usize,
    pub otype: OrientationType,
}

/// Branch tags of the four separatrices at a saddle point. The gauge-CCW
/// cyclic order at every saddle point is [U+, S+, U-, S-].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "u+")]
    UPlus,
    #[serde(rename = "u-")]
    UMinus,
    #[serde(rename = "s+")]
    SPlus,
    #[serde(rename = "s-")]
    SMinus,
}

impl Branch {
    pub fn is_unstable(self) -> bool {
        matches!(self, Branch::UPlus | Branch::UMinus)
    }

    pub fn flipped(self) -> Branch {
        match self {
            Branch::UPlus => Branch::UMinus,
            Branch::UMinus => Branch::UPlus,
            Branch::SPlus => Branch::SMinus,
            Branch::SMinus => Branch::SPlus,
        }
    }

    pub const UNSTABLE: [Branch; 2] = [Branch::UPlus, Branch::UMinus];
    pub const STABLE: [Branch; 2] = [Branch::SPlus, Branch::SMinus];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::UPlus => "u+",
            Branch::UMinus => "u-",
            Branch::SPlus => "s+",
            Branch::SMinus => "s-",
        };
        f.write_str(s)
    }
}

/// Identifies one separatrix: a branch of a saddle point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SepRef {
    pub saddle: OrbitId,
    pub point: usize,
    pub branch: Branch,
}

impl fmt::Display for SepRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, pt {}, {})", self.saddle, self.point, self.branch)
    }
}

/// Where a separatrix ends up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    /// Accumulates on a node point; `twist` is the ribbon twist of this edge
    /// relative to the gauge orientations at its two endpoints.
    Node {
        node: OrbitId,
        point: usize,
        twist: i8,
    },
    /// Accumulates on another saddle's invariant manifold (heteroclinic).
    /// `crossed` names the branch of the target saddle (representative
    /// point) carrying the transversal intersections.
    Het { target: OrbitId, crossed: Branch },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointRef {
    pub orbit: OrbitId,
    pub index: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Descriptor {
    pub orbits: Vec<Orbit>,
    /// Attachment of every separatrix; exactly four per saddle point.
    pub ends: BTreeMap<SepRef, Attachment>,
    /// Gauge-CCW cyclic order of attached separatrix ends at each node point.
    pub rotations: BTreeMap<(OrbitId, usize), Vec<SepRef>>,
    /// Direct Smale-order edges (a, b) meaning a > b.
    pub smale: BTreeSet<(OrbitId, OrbitId)>,
}

impl Descriptor {
    pub fn orbit_by_name(&self, name: &str) -> Option<OrbitId> {
        self.orbits.iter().position(|o| o.name == name)
    }

    pub fn point_count(&self, kind: OrbitKind) -> usize {
        self.orbits
            .iter()
            .filter(|o| o.kind == kind)
            .map(|o| o.period)
            .sum()
    }

    pub fn saddle_orbits(&self) -> Vec<OrbitId> {
        (0..self.orbits.len())
            .filter(|&i| self.orbits[i].kind == OrbitKind::Saddle)
            .collect()
    }

    pub fn node_points(&self, kind: OrbitKind) -> Vec<PointRef> {
        let mut out = Vec::new();
        for (i, o) in self.orbits.iter().enumerate() {
            if o.kind == kind {
                for k in 0..o.period {
                    out.push(PointRef { orbit: i, index: k });
                }
            }
        }
        out
    }

    /// Euler characteristic from the point counts of the nonwandering set.
    pub fn euler_characteristic(&self) -> i64 {
        self.point_count(OrbitKind::Sink) as i64 + self.point_count(OrbitKind::Source) as i64
            - self.point_count(OrbitKind::Saddle) as i64
    }

    /// The f-image of a point.
    pub fn f_point(&self, p: PointRef) -> PointRef {
        PointRef {
            orbit: p.orbit,
            index: (p.index + 1) % self.orbits[p.orbit].period,
        }
    }

    /// Orientation sign of df at the given point relative to the normalized
    /// gauge: +1 inside an orbit, the orbit's return sign at the closing step.
    pub fn eps(&self, p: PointRef) -> i8 {
        let o = &self.orbits[p.orbit];
        if p.index + 1 < o.period {
            1
        } else {
            o.otype.return_sign()
        }
    }

    /// Branch-label action of f at a saddle point: labels propagate inside
    /// the orbit and swap at the closing step according to (nu, lambda).
    pub fn f_sep(&self, s: SepRef) -> SepRef {
        let o = &self.orbits[s.saddle];
        if s.point + 1 < o.period {
            SepRef {
                saddle: s.saddle,
                point: s.point + 1,
                branch: s.branch,
            }
        } else {
            let (nu, lambda) = match o.otype {
                OrientationType::Saddle { nu, lambda } => (nu, lambda),
                _ => (1, 1),
            };
            let swap = if s.branch.is_unstable() {
                lambda == -1
            } else {
                nu == -1
            };
            SepRef {
                saddle: s.saddle,
                point: 0,
                branch: if swap { s.branch.flipped() } else { s.branch },
            }
        }
    }

    /// The f-image of an attachment (for equivariance checks).
    fn f_attach(&self, a: &Attachment, eps_saddle: i8) -> Option<Attachment> {
        match a {
            Attachment::Node { node, point, twist } => {
                let np = self.f_point(PointRef {
                    orbit: *node,
                    index: *point,
                });
                let eps_node = self.eps(PointRef {
                    orbit: *node,
                    index: *point,
                });
                Some(Attachment::Node {
                    node: *node,
                    point: np.index,
                    twist: twist * eps_saddle * eps_node,
                })
            }
            Attachment::Het { .. } => None,
        }
    }

    /// Transitive closure of the Smale order as a set of (above, below) pairs.
    pub fn smale_closure(&self) -> BTreeSet<(OrbitId, OrbitId)> {
        let mut rel = self.smale.clone();
        loop {
            let mut grew = false;
            let pairs: Vec<_> = rel.iter().copied().collect();
            for &(a, b) in &pairs {
                for &(c, d) in &pairs {
                    if b == c && rel.insert((a, d)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        rel
    }

    pub fn is_gradient_like(&self) -> bool {
        self.smale.is_empty()
            && self
                .ends
                .values()
                .all(|a| matches!(a, Attachment::Node { .. }))
    }

    /// All structural violations; empty means the descriptor is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (i, o) in self.orbits.iter().enumerate() {
            if o.period == 0 {
                bad.push(format!("orbit {} ({}): period must be >= 1", i, o.name));
            }
            let shape_ok = match (o.kind, &o.otype) {
                (OrbitKind::Saddle, OrientationType::Saddle { .. }) => true,
                (OrbitKind::Saddle, _) => false,
                (_, OrientationType::Node { .. }) => true,
                _ => false,
            };
            if !shape_ok {
                bad.push(format!(
                    "orbit {} ({}): orientation type shape does not match kind",
                    i, o.name
                ));
            }
        }
        // every saddle point carries exactly its four branches
        for (i, o) in self.orbits.iter().enumerate() {
            if o.kind != OrbitKind::Saddle {
                continue;
            }
            for k in 0..o.period {
                for b in [Branch::UPlus, Branch::UMinus, Branch::SPlus, Branch::SMinus] {
                    let s = SepRef {
                        saddle: i,
                        point: k,
                        branch: b,
                    };
                    if !self.ends.contains_key(&s) {
                        bad.push(format!("missing separatrix record {s}"));
                    }
                }
            }
        }
        for (s, a) in &self.ends {
            if self.orbits.get(s.saddle).map(|o| o.kind) != Some(OrbitKind::Saddle) {
                bad.push(format!("{s}: owner is not a saddle orbit"));
                continue;
            }
            if s.point >= self.orbits[s.saddle].period {
                bad.push(format!("{s}: point index out of range"));
                continue;
            }
            match a {
                Attachment::Node { node, point, twist } => {
                    let Some(o) = self.orbits.get(*node) else {
                        bad.push(format!("{s}: dangling node reference"));
                        continue;
                    };
                    if *point >= o.period {
                        bad.push(format!("{s}: node point index out of range"));
                        continue;
                    }
                    if twist.abs() != 1 {
                        bad.push(format!("{s}: twist must be +1 or -1"));
                    }
                    let want = if s.branch.is_unstable() {
                        OrbitKind::Sink
                    } else {
                        OrbitKind::Source
                    };
                    if o.kind != want {
                        bad.push(format!(
                            "{s}: {} branch must end at a {:?}, found {:?}",
                            if s.branch.is_unstable() {
                                "unstable"
                            } else {
                                "stable"
                            },
                            want,
                            o.kind
                        ));
                    }
                    let rot = self.rotations.get(&(*node, *point));
                    let in_rot = rot.map(|r| r.iter().filter(|e| **e == *s).count());
                    if in_rot != Some(1) {
                        bad.push(format!(
                            "{s}: must occupy exactly one slot at node ({}, {})",
                            node, point
                        ));
                    }
                }
                Attachment::Het { target, crossed } => {
                    if self.orbits.get(*target).map(|o| o.kind) != Some(OrbitKind::Saddle) {
                        bad.push(format!("{s}: heteroclinic target is not a saddle"));
                        continue;
                    }
                    if s.branch.is_unstable() {
                        if crossed.is_unstable() {
                            bad.push(format!(
                                "{s}: unstable branch must cross a stable branch of the target"
                            ));
                        }
                        if !self.smale.contains(&(s.saddle, *target)) {
                            bad.push(format!("{s}: missing Smale edge {} > {}", s.saddle, target));
                        }
                    } else {
                        if !crossed.is_unstable() {
                            bad.push(format!(
                                "{s}: stable branch must cross an unstable branch of the target"
                            ));
                        }
                        if !self.smale.contains(&(*target, s.saddle)) {
                            bad.push(format!("{s}: missing Smale edge {} > {}", target, s.saddle));
                        }
                    }
                }
            }
        }
        // rotations list exactly the ends attached at the node point
        for ((node, point), rot) in &self.rotations {
            let mut seen = BTreeSet::new();
            for e in rot {
                if !seen.insert(*e) {
                    bad.push(format!(
                        "rotation at ({node}, {point}): duplicate slot for {e}"
                    ));
                }
                match self.ends.get(e) {
                    Some(Attachment::Node { node: n, point: p, .. }) if n == node && p == point => {}
                    _ => bad.push(format!(
                        "rotation at ({node}, {point}): {e} is not attached here"
                    )),
                }
            }
        }
        for (s, a) in &self.ends {
            if let Attachment::Node { node, point, .. } = a {
                if !self
                    .rotations
                    .get(&(*node, *point))
                    .map(|r| r.contains(s))
                    .unwrap_or(false)
                {
                    bad.push(format!("{s}: absent from the rotation at ({node}, {point})"));
                }
            }
        }
        // f-equivariance: attachments, twists and rotations commute with f
        for (s, a) in &self.ends {
            let fs = self.f_sep(*s);
            let eps_saddle = self.eps(PointRef {
                orbit: s.saddle,
                index: s.point,
            });
            match (self.f_attach(a, eps_saddle), self.ends.get(&fs)) {
                (Some(expect), Some(actual)) => {
                    if expect != *actual {
                        bad.push(format!(
                            "f-action mismatch: {s} attaches as {a:?}, so {fs} must attach as {expect:?}, found {actual:?}"
                        ));
                    }
                }
                (None, Some(Attachment::Het { .. })) => {}
                (None, Some(other)) => {
                    bad.push(format!(
                        "f-action mismatch: {s} is heteroclinic but {fs} attaches as {other:?}"
                    ));
                }
                (_, None) => {}
            }
        }
        for ((node, point), rot) in &self.rotations {
            let p = PointRef {
                orbit: *node,
                index: *point,
            };
            let fp = self.f_point(p);
            let image: Vec<SepRef> = rot.iter().map(|e| self.f_sep(*e)).collect();
            let Some(target) = self.rotations.get(&(fp.orbit, fp.index)) else {
                if !rot.is_empty() {
                    bad.push(format!("missing rotation at ({}, {})", fp.orbit, fp.index));
                }
                continue;
            };
            if !cyclic_eq(&image, target, self.eps(p) == 1) {
                bad.push(format!(
                    "rotation at ({}, {}) is not the f-image of the rotation at ({node}, {point}) with direction {}",
                    fp.orbit, fp.index, self.eps(p)
                ));
            }
        }
        // Smale order: irreflexive after closure, i.e. the direct edges
        // generate a strict partial order
        let closure = self.smale_closure();
        for &(a, b) in &closure {
            if a == b {
                bad.push(format!("Smale order has a cycle through orbit {a}"));
            }
        }
        for &(a, b) in &self.smale {
            let has_witness = self.ends.iter().any(|(s, at)| {
                s.saddle == a
                    && s.branch.is_unstable()
                    && matches!(at, Attachment::Het { target, .. } if *target == b)
            });
            if !has_witness {
                bad.push(format!(
                    "Smale edge {a} > {b} has no heteroclinic separatrix record"
                ));
            }
        }
        bad
    }

    /// Degree of a node point: number of separatrix ends attached there.
    pub fn node_degree(&self, node: OrbitId, point: usize) -> usize {
        self.rotations
            .get(&(node, point))
            .map(|r| r.len())
            .unwrap_or(0)
    }
}

/// Cyclic-sequence equality, in the given direction (`forward = false`
/// compares against the reversal).
pub fn cyclic_eq<T: PartialEq + Clone>(a: &[T], b: &[T], forward: bool) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let bb: Vec<T> = if forward {
        b.to_vec()
    } else {
        let mut r = b.to_vec();
        r.reverse();
        r
    };
    let n = a.len();
    (0..n).any(|shift| (0..n).all(|i| a[i] == bb[(i + shift) % n]))
}

// ---- the carrier surface -------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceInfo {
    pub orientable: bool,
    /// Genus: handles when orientable, cross-caps otherwise.
    pub genus: i64,
    pub euler: i64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SurfaceError {
    #[error("face tracing contradicts the Euler characteristic: {0}")]
    InconsistentEmbedding(String),
}

/// Surface carrying the dynamics: Euler characteristic from the point
/// counts, orientability from the twist signs of the full unstable spine
/// (heteroclinic references are ignored; only node attachments enter), and
/// the genus from both. For gradient-like descriptors the spine is a
/// deformation retract of the surface minus its sources, so the boundary
/// walks must match the source points one to one; this is the face-tracing
/// consistency check.
pub fn surface_of(d: &Descriptor) -> Result<SurfaceInfo, SurfaceError> {
    use crate::charspace::walks::{trace, RibbonGraph, Side};
    let euler = d.euler_characteristic();
    let graph = RibbonGraph::build(d, &d.saddle_orbits(), Side::Attractor, true)
        .expect("skip_het build cannot fail");
    // orientability: can vertex flips make every twist positive?
    let nv = graph.verts.len();
    let mut sign: Vec<i8> = vec![0; nv];
    let mut orientable = true;
    for start in 0..nv {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for e in &graph.edges {
                let (a, b) = (graph.dart_vertex[e.darts[0]], graph.dart_vertex[e.darts[1]]);
                let (u, w) = if a == v {
                    (a, b)
                } else if b == v {
                    (b, a)
                } else {
                    continue;
                };
                let want = sign[u] * e.twist;
                if sign[w] == 0 {
                    sign[w] = want;
                    stack.push(w);
                } else if sign[w] != want {
                    orientable = false;
                }
            }
        }
    }
    if d.is_gradient_like() {
        let walks = trace(graph);
        let sources = d.point_count(OrbitKind::Source);
        if walks.n_circles != sources {
            return Err(SurfaceError::InconsistentEmbedding(format!(
                "{} boundary walks for {} source points",
                walks.n_circles, sources
            )));
        }
    }
    let genus = if orientable {
        if euler % 2 != 0 {
            return Err(SurfaceError::InconsistentEmbedding(format!(
                "orientable embedding with odd Euler characteristic {euler}"
            )));
        }
        (2 - euler) / 2
    } else {
        2 - euler
    };
    if genus < 0 {
        return Err(SurfaceError::InconsistentEmbedding(format!(
            "negative genus from Euler characteristic {euler}"
        )));
    }
    Ok(SurfaceInfo {
        orientable,
        genus,
        euler,
    })
}

// ---- descriptor isomorphism ---------------------------------------------------

/// Incidence-preserving isomorphism test: a bijection of orbits preserving
/// kind, period and orientation type, together with per-orbit point shifts
/// and per-saddle branch relabelings, carrying attachments to attachments
/// and heteroclinic references to heteroclinic references. Rotations and
/// twists (the embedding data) are deliberately not compared.
pub fn isomorphic(a: &Descriptor, b: &Descriptor) -> bool {
    if a.orbits.len() != b.orbits.len() {
        return false;
    }
    let n = a.orbits.len();
    // candidate images per orbit, filtered by invariants
    let mut candidates: Vec<Vec<OrbitId>> = Vec::with_capacity(n);
    for oa in &a.orbits {
        let c: Vec<OrbitId> = (0..n)
            .filter(|&j| {
                let ob = &b.orbits[j];
                ob.kind == oa.kind && ob.period == oa.period && ob.otype == oa.otype
            })
            .collect();
        if c.is_empty() {
            return false;
        }
        candidates.push(c);
    }
    let mut used = vec![false; n];
    let mut map = vec![usize::MAX; n];
    fn assign(
        i: usize,
        a: &Descriptor,
        b: &Descriptor,
        candidates: &[Vec<OrbitId>],
        used: &mut [bool],
        map: &mut [usize],
    ) -> bool {
        if i == a.orbits.len() {
            return incidence_matches(a, b, map);
        }
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            used[j] = true;
            map[i] = j;
            if assign(i + 1, a, b, candidates, used, map) {
                return true;
            }
            used[j] = false;
            map[i] = usize::MAX;
        }
        false
    }
    assign(0, a, b, &candidates, &mut used, &mut map)
}

/// With the orbit bijection fixed, search point shifts and branch flips.
fn incidence_matches(a: &Descriptor, b: &Descriptor, map: &[usize]) -> bool {
    // per saddle orbit of `a`: shift in 0..m, u-flip, s-flip;
    // per node orbit: shift in 0..m. Search via DFS over orbits.
    #[derive(Clone, Copy)]
    struct Gauge {
        shift: usize,
        u_flip: bool,
        s_flip: bool,
    }
    let n = a.orbits.len();
    let mut gauges: Vec<Option<Gauge>> = vec![None; n];

    fn branch_image(br: Branch, g: Gauge) -> Branch {
        match br {
            Branch::UPlus | Branch::UMinus => {
                if g.u_flip {
                    br.flipped()
                } else {
                    br
                }
            }
            _ => {
                if g.s_flip {
                    br.flipped()
                } else {
                    br
                }
            }
        }
    }

    // check all ends whose gauges are decided
    fn consistent(a: &Descriptor, b: &Descriptor, map: &[usize], gauges: &[Option<Gauge>]) -> bool {
        for (s, at) in &a.ends {
            let Some(gs) = gauges[s.saddle] else { continue };
            let mb = map[s.saddle];
            let period = b.orbits[mb].period;
            // a-point 0 maps to b-point `shift` carrying the relabeled
            // branch; later points follow by applying b's f-action.
            let mut cur = SepRef {
                saddle: mb,
                point: gs.shift % period,
                branch: branch_image(s.branch, gs),
            };
            for _ in 0..s.point {
                cur = b.f_sep(cur);
            }
            let Some(bt) = b.ends.get(&cur) else {
                return false;
            };
            match (at, bt) {
                (
                    Attachment::Node { node, point, .. },
                    Attachment::Node {
                        node: bn,
                        point: bp,
                        ..
                    },
                ) => {
                    if map[*node] != *bn {
                        return false;
                    }
                    if let Some(gn) = gauges[*node] {
                        let period_n = b.orbits[*bn].period;
                        if (point + gn.shift) % period_n != *bp {
                            return false;
                        }
                    }
                }
                (Attachment::Het { target, crossed }, Attachment::Het { target: bt2, crossed: bc }) => {
                    if map[*target] != *bt2 {
                        return false;
                    }
                    if let Some(gt) = gauges[*target] {
                        if branch_image(*crossed, gt) != *bc {
                            return false;
                        }
                    }
                }
                _ => return false,
            }
        }
        true
    }

    fn dfs(
        i: usize,
        a: &Descriptor,
        b: &Descriptor,
        map: &[usize],
        gauges: &mut Vec<Option<Gauge>>,
    ) -> bool {
        if i == a.orbits.len() {
            return consistent(a, b, map, gauges);
        }
        let period = a.orbits[i].period;
        let is_saddle = a.orbits[i].kind == OrbitKind::Saddle;
        let flips: &[(bool, bool)] = if is_saddle {
            &[(false, false), (true, false), (false, true), (true, true)]
        } else {
            &[(false, false)]
        };
        for shift in 0..period {
            for &(u_flip, s_flip) in flips {
                gauges[i] = Some(Gauge {
                    shift,
                    u_flip,
                    s_flip,
                });
                if consistent(a, b, map, gauges) && dfs(i + 1, a, b, map, gauges) {
                    return true;
                }
            }
        }
        gauges[i] = None;
        false
    }

    dfs(0, a, b, map, &mut gauges)
}

#[cfg(test)]
mod tests;
