//! Connected sums and powers of descriptors.
//!
//! A connected sum removes a sink orbit of one descriptor and a source orbit
//! of the other and splices the dynamics through the resulting glue annuli.
//! Separatrices that used to end at the removed sink continue into the other
//! surface and reach the sink of whichever sector they enter; dually for the
//! stable separatrices of the removed source. Sector-to-sink corners are read
//! off the boundary-walk structure, which also fixes slot positions and
//! ribbon twists of the rerouted edges.
//!
//! The interleaving of the two end families around a glue circle is
//! constrained: the induced permutation of the marks must be cyclic-order
//! preserving (or reversing, when the glued nodes have negative type) under
//! the return map. Not every pattern qualifies; `Interleaving::Auto`
//! searches a canonical enumeration for the first admissible one.

use super::*;
use crate::charspace::walks::{trace, RibbonGraph, Side, State, WalkSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SumError {
    #[error("glued orbits have different periods")]
    PeriodMismatch,
    #[error("glued orbits have different orientation types")]
    OrientationTypeMismatch,
    #[error("the interleaving does not commute with the f-actions")]
    NonEquivariantInterleaving,
    #[error("`{0}` is not a sink orbit of the first descriptor")]
    NotASink(String),
    #[error("`{0}` is not a source orbit of the second descriptor")]
    NotASource(String),
    #[error("unsupported gluing: {0}")]
    Unsupported(String),
    #[error("sum construction produced an incoherent descriptor: {0}")]
    Inconsistent(String),
}

/// Cyclic matching of the removed sink's unstable ends into the sectors of
/// the removed source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interleaving {
    /// Search the canonical enumeration for the first equivariant pattern
    /// that builds a coherent descriptor, optionally requiring the carrier
    /// surface's orientability.
    Auto { prefer_orientable: Option<bool> },
    /// Explicit pattern: `counts[i]` source ends follow the i-th sink end
    /// around the glue circle, the source sequence (in mirrored rotation
    /// order, optionally re-reversed) starting at `start`.
    Explicit {
        reversed: bool,
        start: usize,
        counts: Vec<usize>,
    },
}

impl Default for Interleaving {
    fn default() -> Self {
        Interleaving::Auto {
            prefer_orientable: None,
        }
    }
}

/// Mirror a descriptor: flip the local orientation at every point. Node
/// rotations reverse, stable branch labels swap to restore the canonical
/// saddle order, twists and orientation types are untouched.
pub fn mirror(d: &Descriptor) -> Descriptor {
    let swap_s = |b: Branch| match b {
        Branch::SPlus => Branch::SMinus,
        Branch::SMinus => Branch::SPlus,
        other => other,
    };
    let map_sep = |s: &SepRef| SepRef {
        saddle: s.saddle,
        point: s.point,
        branch: swap_s(s.branch),
    };
    let mut out = Descriptor {
        orbits: d.orbits.clone(),
        ..Default::default()
    };
    for (s, a) in &d.ends {
        let na = match a {
            Attachment::Node { node, point, twist } => Attachment::Node {
                node: *node,
                point: *point,
                twist: *twist,
            },
            Attachment::Het { target, crossed } => Attachment::Het {
                target: *target,
                crossed: swap_s(*crossed),
            },
        };
        out.ends.insert(map_sep(s), na);
    }
    for ((node, point), rot) in &d.rotations {
        let mut new_rot: Vec<SepRef> = rot.iter().map(map_sep).collect();
        new_rot.reverse();
        out.rotations.insert((*node, *point), new_rot);
    }
    out.smale = d.smale.clone();
    out
}

/// Items on a glue circle: unstable ends of the removed sink interleaved
/// with stable ends of the removed source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GlueItem {
    SinkEnd(SepRef),
    SourceEnd(SepRef),
}

/// One sector of the disk around a removed node: the corner where rerouted
/// ends land, located by following the boundary walk between consecutive
/// separatrix germs.
#[derive(Debug, Clone, Copy)]
struct SectorCorner {
    /// Corner node vertex (in the scan graph) and gap index.
    vertex: usize,
    gap: usize,
    /// Whether the sweeping walk passes the corner arc counterclockwise in
    /// the corner node's gauge.
    ccw: bool,
    /// Ribbon transport through the sector cell, from the removed-node
    /// region to the corner node's gauge.
    transport: i8,
}

/// Boundary-walk scanner around a removed node on one side's full graph.
struct CornerScanner {
    walks: WalkSet,
    side: Side,
}

impl CornerScanner {
    fn new(d: &Descriptor, side: Side) -> CornerScanner {
        let graph = RibbonGraph::build(d, &d.saddle_orbits(), side, true)
            .expect("skip_het build cannot fail");
        CornerScanner {
            walks: trace(graph),
            side,
        }
    }

    /// Vertex-arc of the germ of a separatrix at its own saddle vertex.
    /// On the attractor graph the rotation is [U+, U-] and stable germs sit
    /// in its gaps; mirrored on the repeller graph. Unsupported when the
    /// saddle lost an edge to a heteroclinic reference.
    fn germ_arc(&self, sep: SepRef) -> Result<(usize, usize), SumError> {
        let v = self
            .walks
            .vert_of_point(PointRef {
                orbit: sep.saddle,
                index: sep.point,
            })
            .ok_or_else(|| SumError::Unsupported("germ saddle missing from scan graph".into()))?;
        if self.walks.graph.verts[v].rotation.len() != 2 {
            return Err(SumError::Unsupported(
                "germ saddle has heteroclinic separatrices on the scanned side".into(),
            ));
        }
        let gap = match (self.side, sep.branch) {
            (Side::Attractor, Branch::SPlus) => 0,
            (Side::Attractor, Branch::SMinus) => 1,
            (Side::Repeller, Branch::UMinus) => 0,
            (Side::Repeller, Branch::UPlus) => 1,
            _ => unreachable!("germ lookup is for the opposite side's branches"),
        };
        Ok((v, gap))
    }

    /// Sector corners around a removed node whose germs, in rotation order,
    /// are `ends`; `germ_twist[i]` is the ribbon twist of the i-th germ's
    /// separatrix toward the removed node. Returns one corner per gap
    /// (between ends[i] and ends[i+1]).
    fn sectors(
        &self,
        host: &Descriptor,
        ends: &[SepRef],
    ) -> Result<Vec<SectorCorner>, SumError> {
        let g = &self.walks.graph;
        let mut arcs = Vec::new();
        for e in ends {
            arcs.push(self.germ_arc(*e)?);
        }
        let arc_index: BTreeMap<(usize, usize), usize> =
            arcs.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        if arc_index.len() != ends.len() {
            return Err(SumError::Unsupported(
                "coincident germ arcs around the removed node".into(),
            ));
        }
        let germ_twist = |sep: &SepRef| -> Result<i8, SumError> {
            match host.ends.get(sep) {
                Some(Attachment::Node { twist, .. }) => Ok(*twist),
                _ => Err(SumError::Unsupported("germ separatrix is heteroclinic".into())),
            }
        };
        // Start just after the germ arc of ends[0], in the direction that
        // circles the removed node counterclockwise in its own gauge: for a
        // positively twisted germ edge this crosses the germ arc clockwise
        // at the saddle; a negative twist flips it.
        let (v0, gap0) = arcs[0];
        let rot = &g.verts[v0].rotation;
        let start = if germ_twist(&ends[0])? == 1 {
            State {
                dart: rot[gap0],
                side: 1,
            }
        } else {
            State {
                dart: rot[(gap0 + 1) % rot.len()],
                side: -1,
            }
        };
        // walk the full circle, recording corners between germ arcs
        let mut corners: Vec<Option<SectorCorner>> = vec![None; ends.len()];
        let mut visited_order = vec![0usize];
        let mut cur = start;
        let mut sector_from = 0usize;
        let mut pending: Option<(usize, usize, bool, i8)> = None;
        let budget = g.dart_vertex.len() * 2 + 2;
        for _ in 0..budget {
            let edge = &g.edges[g.dart_edge[cur.dart]];
            let arrive_vertex = g.dart_vertex[g.other_dart(cur.dart)];
            let arrive_kind = g.verts[arrive_vertex].kind;
            let arrive_side = -edge.twist * cur.side;
            let (next, arc) = crate::charspace::walks::step(g, cur);
            if arrive_kind != OrbitKind::Saddle {
                if pending.is_some() {
                    return Err(SumError::Unsupported(
                        "sector passes more than one node corner".into(),
                    ));
                }
                pending = Some((arc.0, arc.1, arrive_side > 0, edge.twist));
            } else if let Some(&idx) = arc_index.get(&arc) {
                // close the current sector
                let Some((vertex, gap, ccw, edge_in)) = pending.take() else {
                    return Err(SumError::Unsupported(
                        "sector reached the next germ without passing a node corner".into(),
                    ));
                };
                let near = germ_twist(&ends[sector_from])? * edge_in;
                corners[sector_from] = Some(SectorCorner {
                    vertex,
                    gap,
                    ccw,
                    transport: near,
                });
                // far-wall consistency: the cell is a disk
                let far = germ_twist(&ends[idx])? * edge.twist;
                if near != far {
                    return Err(SumError::Inconsistent(format!(
                        "sector cell after {} has mismatched wall transport",
                        ends[sector_from]
                    )));
                }
                sector_from = idx;
                if idx == 0 {
                    break;
                }
                visited_order.push(idx);
            } else {
                return Err(SumError::Unsupported(
                    "sector scan crossed a saddle arc that carries no germ of the removed node"
                        .into(),
                ));
            }
            cur = next;
        }
        // the sweep must visit germs in rotation order
        let expect: Vec<usize> = (0..ends.len()).collect();
        if visited_order != expect {
            return Err(SumError::Unsupported(format!(
                "sector sweep visited germs out of rotation order: {visited_order:?}"
            )));
        }
        corners
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| SumError::Unsupported("unclosed sector sweep".into()))
    }
}

/// Weak compositions of `total` into `parts` bins, lexicographic.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(total);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=total {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        return out;
    }
    let mut cur = Vec::new();
    rec(total, parts, &mut cur, &mut out);
    out
}

/// Connected sum of `d1` and `d2` along a sink orbit of `d1` and a source
/// orbit of `d2`.
pub fn connected_sum(
    d1: &Descriptor,
    sink: OrbitId,
    d2: &Descriptor,
    source: OrbitId,
    inter: Interleaving,
) -> Result<Descriptor, SumError> {
    if d1.orbits[sink].kind != OrbitKind::Sink {
        return Err(SumError::NotASink(d1.orbits[sink].name.clone()));
    }
    if d2.orbits[source].kind != OrbitKind::Source {
        return Err(SumError::NotASource(d2.orbits[source].name.clone()));
    }
    let m = d1.orbits[sink].period;
    if d2.orbits[source].period != m {
        return Err(SumError::PeriodMismatch);
    }
    if d1.orbits[sink].otype != d2.orbits[source].otype {
        return Err(SumError::OrientationTypeMismatch);
    }
    let e2 = mirror(d2);
    let empty = Vec::new();
    let r_sink: Vec<SepRef> = d1.rotations.get(&(sink, 0)).unwrap_or(&empty).clone();
    let r_source: Vec<SepRef> = e2.rotations.get(&(source, 0)).unwrap_or(&empty).clone();

    match inter {
        Interleaving::Explicit {
            reversed,
            start,
            counts,
        } => build_sum(
            d1, sink, &e2, source, m, &r_sink, &r_source, reversed, start, &counts,
        ),
        Interleaving::Auto { prefer_orientable } => {
            if r_sink.is_empty() || r_source.is_empty() {
                return build_sum(d1, sink, &e2, source, m, &r_sink, &r_source, false, 0, &[]);
            }
            let k1 = r_sink.len();
            let k2 = r_source.len();
            let mut fallback: Option<Descriptor> = None;
            for reversed in [false, true] {
                for start in 0..k2 {
                    for counts in compositions(k2, k1) {
                        let attempt = build_sum(
                            d1, sink, &e2, source, m, &r_sink, &r_source, reversed, start,
                            &counts,
                        );
                        let Ok(sum) = attempt else { continue };
                        match prefer_orientable {
                            None => return Ok(sum),
                            Some(want) => {
                                let surf = crate::descriptor::surface_of(&sum);
                                if surf.map(|s| s.orientable) == Ok(want) {
                                    return Ok(sum);
                                }
                                fallback.get_or_insert(sum);
                            }
                        }
                    }
                }
            }
            match (prefer_orientable, fallback) {
                (Some(want), Some(_)) => Err(SumError::Unsupported(format!(
                    "no equivariant interleaving yields an {} carrier surface",
                    if want { "orientable" } else { "unorientable" }
                ))),
                _ => Err(SumError::NonEquivariantInterleaving),
            }
        }
    }
}

/// Insertion conventions relating glue order to corner-gap order: runs land
/// against the corner arc's passage direction on both sides. Pinned by the
/// realizability check across all of the paper's sums.
const U_INSERT_FOLLOWS_SWEEP: bool = false;
const S_INSERT_FOLLOWS_SWEEP: bool = false;

/// Assemble the sum for one explicit interleaving pattern.
#[allow(clippy::too_many_arguments)]
fn build_sum(
    d1: &Descriptor,
    sink: OrbitId,
    e2: &Descriptor,
    source: OrbitId,
    m: usize,
    r_sink: &[SepRef],
    r_source_mirrored: &[SepRef],
    reversed: bool,
    start: usize,
    counts: &[usize],
) -> Result<Descriptor, SumError> {
    let sigma = d1.orbits[sink].otype.return_sign();
    // result orbit table
    let mut out = Descriptor::default();
    let mut map1 = vec![usize::MAX; d1.orbits.len()];
    let mut map2 = vec![usize::MAX; e2.orbits.len()];
    for (i, o) in d1.orbits.iter().enumerate() {
        if i == sink {
            continue;
        }
        map1[i] = out.orbits.len();
        out.orbits.push(o.clone());
    }
    for (j, o) in e2.orbits.iter().enumerate() {
        if j == source {
            continue;
        }
        map2[j] = out.orbits.len();
        let mut o = o.clone();
        while out.orbits.iter().any(|x| x.name == o.name) {
            o.name.push('\'');
        }
        out.orbits.push(o);
    }
    let remap1 = |s: &SepRef| SepRef {
        saddle: map1[s.saddle],
        point: s.point,
        branch: s.branch,
    };
    let remap2 = |s: &SepRef| SepRef {
        saddle: map2[s.saddle],
        point: s.point,
        branch: s.branch,
    };
    for (s, a) in &d1.ends {
        match a {
            Attachment::Node { node, point, twist } if *node != sink => {
                out.ends.insert(
                    remap1(s),
                    Attachment::Node {
                        node: map1[*node],
                        point: *point,
                        twist: *twist,
                    },
                );
            }
            Attachment::Node { .. } => {}
            Attachment::Het { target, crossed } => {
                out.ends.insert(
                    remap1(s),
                    Attachment::Het {
                        target: map1[*target],
                        crossed: *crossed,
                    },
                );
            }
        }
    }
    for (s, a) in &e2.ends {
        match a {
            Attachment::Node { node, point, twist } if *node != source => {
                out.ends.insert(
                    remap2(s),
                    Attachment::Node {
                        node: map2[*node],
                        point: *point,
                        twist: *twist,
                    },
                );
            }
            Attachment::Node { .. } => {}
            Attachment::Het { target, crossed } => {
                out.ends.insert(
                    remap2(s),
                    Attachment::Het {
                        target: map2[*target],
                        crossed: *crossed,
                    },
                );
            }
        }
    }
    for ((node, point), rot) in &d1.rotations {
        if *node == sink {
            continue;
        }
        out.rotations
            .insert((map1[*node], *point), rot.iter().map(remap1).collect());
    }
    for ((node, point), rot) in &e2.rotations {
        if *node == source {
            continue;
        }
        out.rotations
            .insert((map2[*node], *point), rot.iter().map(remap2).collect());
    }
    for &(a, b) in &d1.smale {
        out.smale.insert((map1[a], map1[b]));
    }
    for &(a, b) in &e2.smale {
        out.smale.insert((map2[a], map2[b]));
    }

    if r_sink.is_empty() || r_source_mirrored.is_empty() {
        return glue_degenerate(d1, sink, e2, source, out, map1, map2, m);
    }

    // the representative glue circle
    if counts.len() != r_sink.len() || counts.iter().sum::<usize>() != r_source_mirrored.len() {
        return Err(SumError::Unsupported(
            "interleaving counts do not match the end degrees".into(),
        ));
    }
    let mut b_seq: Vec<SepRef> = r_source_mirrored.to_vec();
    if reversed {
        b_seq.reverse();
    }
    let shift = start % b_seq.len();
    b_seq.rotate_left(shift);
    let mut z0: Vec<GlueItem> = Vec::new();
    let mut bpos = 0usize;
    for (i, a) in r_sink.iter().enumerate() {
        z0.push(GlueItem::SinkEnd(*a));
        for _ in 0..counts[i] {
            z0.push(GlueItem::SourceEnd(b_seq[bpos]));
            bpos += 1;
        }
    }
    // equivariance of the glue circle under the return map
    let f_item = |it: &GlueItem| match it {
        GlueItem::SinkEnd(s) => GlueItem::SinkEnd(d1.f_sep(*s)),
        GlueItem::SourceEnd(s) => GlueItem::SourceEnd(e2.f_sep(*s)),
    };
    let mut closed = z0.clone();
    for _ in 0..m {
        closed = closed.iter().map(f_item).collect();
    }
    if !crate::descriptor::cyclic_eq(&closed, &z0, sigma == 1) {
        return Err(SumError::NonEquivariantInterleaving);
    }
    // per-point circles by pushforward
    let mut z_at_point: Vec<Vec<GlueItem>> = vec![z0];
    for j in 1..m {
        let prev = &z_at_point[j - 1];
        z_at_point.push(prev.iter().map(f_item).collect());
    }

    let scan2 = CornerScanner::new(e2, Side::Attractor);
    let scan1 = CornerScanner::new(d1, Side::Repeller);
    for z in &z_at_point {
        reroute_runs(z, true, d1, e2, &scan2, &mut out, &map1, &map2, U_INSERT_FOLLOWS_SWEEP)?;
        reroute_runs(z, false, d1, e2, &scan1, &mut out, &map1, &map2, S_INSERT_FOLLOWS_SWEEP)?;
    }

    let bad = out.validate();
    if !bad.is_empty() {
        return Err(SumError::Inconsistent(bad.join("; ")));
    }
    let unreal = realizability_check(&out);
    if !unreal.is_empty() {
        return Err(SumError::Inconsistent(format!(
            "sum is not realizable: {}",
            unreal.join("; ")
        )));
    }
    Ok(out)
}

/// A descriptor is realizable only when the stored cyclic order at every
/// node point agrees with the boundary-walk sweep around that point in the
/// opposite side's full ribbon graph. Points whose sweep would cross
/// heteroclinic material are skipped.
pub fn realizability_check(d: &Descriptor) -> Vec<String> {
    let mut bad = Vec::new();
    for (side, node_kind) in [
        (Side::Attractor, OrbitKind::Source),
        (Side::Repeller, OrbitKind::Sink),
    ] {
        let scanner = CornerScanner::new(d, side);
        for p in d.node_points(node_kind) {
            let Some(rot) = d.rotations.get(&(p.orbit, p.index)) else {
                continue;
            };
            if rot.is_empty() {
                continue;
            }
            if rot.iter().any(|s| !matches!(d.ends.get(s), Some(Attachment::Node { .. }))) {
                continue;
            }
            match scanner.sectors(d, rot) {
                Ok(_) => {}
                Err(SumError::Unsupported(msg))
                    if msg.contains("heteroclinic") || msg.contains("missing from scan graph") => {}
                Err(e) => bad.push(format!(
                    "node {} point {}: {e}",
                    d.orbits[p.orbit].name, p.index
                )),
            }
        }
    }
    bad
}

/// Process one glue circle in one direction: group the rerouted ends into
/// runs between consecutive host ends, resolve the sector corners, splice
/// rotations and write attachments.
#[allow(clippy::too_many_arguments)]
fn reroute_runs(
    z: &[GlueItem],
    reroute_sink_ends: bool,
    d1: &Descriptor,
    e2: &Descriptor,
    scanner: &CornerScanner,
    out: &mut Descriptor,
    map1: &[usize],
    map2: &[usize],
    insert_follows_sweep: bool,
) -> Result<(), SumError> {
    let host_is = |it: &GlueItem| match it {
        GlueItem::SourceEnd(_) => reroute_sink_ends,
        GlueItem::SinkEnd(_) => !reroute_sink_ends,
    };
    let sep_of = |it: &GlueItem| match it {
        GlueItem::SourceEnd(s) | GlueItem::SinkEnd(s) => *s,
    };
    let n = z.len();
    let host_positions: Vec<usize> = (0..n).filter(|&i| host_is(&z[i])).collect();
    if host_positions.is_empty() {
        return Err(SumError::Unsupported("glue circle lost its host ends".into()));
    }
    let host_descriptor: &Descriptor = if reroute_sink_ends { e2 } else { d1 };
    // host germs in their stored rotation order around the removed node:
    // that is exactly their order along z restricted to hosts
    let host_ends: Vec<SepRef> = host_positions.iter().map(|&i| sep_of(&z[i])).collect();
    let corners = scanner.sectors(host_descriptor, &host_ends)?;
    for (hidx, &hpos) in host_positions.iter().enumerate() {
        let next_hpos = host_positions[(hidx + 1) % host_positions.len()];
        let mut run: Vec<SepRef> = Vec::new();
        let mut i = (hpos + 1) % n;
        while i != next_hpos {
            if !host_is(&z[i]) {
                run.push(sep_of(&z[i]));
            }
            i = (i + 1) % n;
        }
        if run.is_empty() {
            continue;
        }
        let corner = corners[hidx];
        let corner_point = scanner.walks.graph.verts[corner.vertex].point;
        let (node_out, rot_key) = if reroute_sink_ends {
            (
                map2[corner_point.orbit],
                (map2[corner_point.orbit], corner_point.index),
            )
        } else {
            (
                map1[corner_point.orbit],
                (map1[corner_point.orbit], corner_point.index),
            )
        };
        let anchor_sep = {
            let g = &scanner.walks.graph;
            let dart = g.verts[corner.vertex].rotation[corner.gap];
            g.edges[g.dart_edge[dart]].sep
        };
        let anchor_out = if reroute_sink_ends {
            SepRef {
                saddle: map2[anchor_sep.saddle],
                ..anchor_sep
            }
        } else {
            SepRef {
                saddle: map1[anchor_sep.saddle],
                ..anchor_sep
            }
        };
        let mut insert: Vec<SepRef> = run
            .iter()
            .map(|s| {
                if reroute_sink_ends {
                    SepRef {
                        saddle: map1[s.saddle],
                        ..*s
                    }
                } else {
                    SepRef {
                        saddle: map2[s.saddle],
                        ..*s
                    }
                }
            })
            .collect();
        if corner.ccw != insert_follows_sweep {
            insert.reverse();
        }
        let rot = out.rotations.entry(rot_key).or_default();
        let pos = rot
            .iter()
            .position(|s| *s == anchor_out)
            .ok_or_else(|| SumError::Inconsistent("corner anchor missing from rotation".into()))?;
        for (off, s) in insert.iter().enumerate() {
            rot.insert(pos + 1 + off, *s);
        }
        for old in &run {
            let (new_sep, old_twist) = if reroute_sink_ends {
                let t = match d1.ends.get(old) {
                    Some(Attachment::Node { twist, .. }) => *twist,
                    _ => unreachable!("rerouted end was node-attached"),
                };
                (
                    SepRef {
                        saddle: map1[old.saddle],
                        ..*old
                    },
                    t,
                )
            } else {
                let t = match e2.ends.get(old) {
                    Some(Attachment::Node { twist, .. }) => *twist,
                    _ => unreachable!("rerouted end was node-attached"),
                };
                (
                    SepRef {
                        saddle: map2[old.saddle],
                        ..*old
                    },
                    t,
                )
            };
            out.ends.insert(
                new_sep,
                Attachment::Node {
                    node: node_out,
                    point: rot_key.1,
                    twist: old_twist * corner.transport,
                },
            );
        }
    }
    Ok(())
}

/// Degenerate gluings: one of the removed nodes has no separatrix ends.
/// Supported when its descriptor is a plain source-sink pair, in which case
/// the other side's ends transfer wholesale to the surviving node (their
/// cyclic order reverses: the glue circle is seen from the other side).
fn glue_degenerate(
    d1: &Descriptor,
    sink: OrbitId,
    e2: &Descriptor,
    source: OrbitId,
    mut out: Descriptor,
    map1: Vec<usize>,
    map2: Vec<usize>,
    m: usize,
) -> Result<Descriptor, SumError> {
    let empty = Vec::new();
    let r_sink = d1.rotations.get(&(sink, 0)).unwrap_or(&empty).clone();
    let r_source = e2.rotations.get(&(source, 0)).unwrap_or(&empty).clone();
    if !r_sink.is_empty() {
        // d2 is north-south-like: reroute every sink end to its sink
        let sinks: Vec<OrbitId> = (0..e2.orbits.len())
            .filter(|&i| e2.orbits[i].kind == OrbitKind::Sink)
            .collect();
        if sinks.len() != 1 || !e2.saddle_orbits().is_empty() {
            return Err(SumError::Unsupported(
                "degree-zero source requires a bare source-sink second summand".into(),
            ));
        }
        let target = sinks[0];
        if e2.orbits[target].period != m {
            return Err(SumError::PeriodMismatch);
        }
        for j in 0..m {
            let rot = d1.rotations.get(&(sink, j)).cloned().unwrap_or_default();
            let mut new_rot = Vec::new();
            for s in &rot {
                let ns = SepRef {
                    saddle: map1[s.saddle],
                    ..*s
                };
                let twist = match d1.ends[s] {
                    Attachment::Node { twist, .. } => twist,
                    _ => unreachable!(),
                };
                out.ends.insert(
                    ns,
                    Attachment::Node {
                        node: map2[target],
                        point: j,
                        twist,
                    },
                );
                new_rot.push(ns);
            }
            new_rot.reverse();
            out.rotations.insert((map2[target], j), new_rot);
        }
    } else if !r_source.is_empty() {
        // d1 is north-south-like: mirror case
        let sources: Vec<OrbitId> = (0..d1.orbits.len())
            .filter(|&i| d1.orbits[i].kind == OrbitKind::Source)
            .collect();
        if sources.len() != 1 || !d1.saddle_orbits().is_empty() {
            return Err(SumError::Unsupported(
                "degree-zero sink requires a bare source-sink first summand".into(),
            ));
        }
        let target = sources[0];
        if d1.orbits[target].period != m {
            return Err(SumError::PeriodMismatch);
        }
        for j in 0..m {
            let rot = e2.rotations.get(&(source, j)).cloned().unwrap_or_default();
            let mut new_rot = Vec::new();
            for s in &rot {
                let ns = SepRef {
                    saddle: map2[s.saddle],
                    ..*s
                };
                let twist = match e2.ends[s] {
                    Attachment::Node { twist, .. } => twist,
                    _ => unreachable!(),
                };
                out.ends.insert(
                    ns,
                    Attachment::Node {
                        node: map1[target],
                        point: j,
                        twist,
                    },
                );
                new_rot.push(ns);
            }
            new_rot.reverse();
            out.rotations.insert((map1[target], j), new_rot);
        }
    }
    let bad = out.validate();
    if !bad.is_empty() {
        return Err(SumError::Inconsistent(bad.join("; ")));
    }
    Ok(out)
}

/// k-th power of a descriptor: the same points under f^k. Orbits split into
/// gcd classes, orientation types compose, the embedding data is re-gauged
/// to the new normal form.
pub fn power(d: &Descriptor, k: usize) -> Result<Descriptor, SumError> {
    assert!(k >= 1, "power requires k >= 1");
    if k == 1 {
        return Ok(d.clone());
    }
    if !d.is_gradient_like() {
        return Err(SumError::Unsupported(
            "power of a descriptor with heteroclinic references is ambiguous at orbit granularity"
                .into(),
        ));
    }
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    struct NewPoint {
        orbit: OrbitId,
        index: usize,
        /// gauge flip relative to the old gauge at this point
        flip: i8,
    }
    let mut out = Descriptor::default();
    let mut point_map: BTreeMap<(OrbitId, usize), NewPoint> = BTreeMap::new();
    let mut label_map: BTreeMap<(OrbitId, usize), BTreeMap<Branch, Branch>> = BTreeMap::new();

    for (oid, o) in d.orbits.iter().enumerate() {
        let m = o.period;
        let g = gcd(m, k);
        let m_new = m / g;
        let power_of_return = k / g;
        let sign_pow = |s: i8| if power_of_return % 2 == 0 { 1 } else { s };
        let otype = match o.otype {
            OrientationType::Node { sigma } => OrientationType::Node {
                sigma: sign_pow(sigma),
            },
            OrientationType::Saddle { nu, lambda } => OrientationType::Saddle {
                nu: sign_pow(nu),
                lambda: sign_pow(lambda),
            },
        };
        for c in 0..g {
            let new_id = out.orbits.len();
            let name = if g == 1 {
                o.name.clone()
            } else {
                format!("{}{}", o.name, (b'a' + c as u8) as char)
            };
            out.orbits.push(Orbit {
                name,
                kind: o.kind,
                period: m_new,
                otype,
            });
            let mut pt = c;
            let mut flip: i8 = 1;
            let mut labels: BTreeMap<Branch, Branch> = [
                (Branch::UPlus, Branch::UPlus),
                (Branch::UMinus, Branch::UMinus),
                (Branch::SPlus, Branch::SPlus),
                (Branch::SMinus, Branch::SMinus),
            ]
            .into_iter()
            .collect();
            for j in 0..m_new {
                point_map.insert(
                    (oid, pt),
                    NewPoint {
                        orbit: new_id,
                        index: j,
                        flip,
                    },
                );
                if o.kind == OrbitKind::Saddle {
                    label_map.insert((oid, pt), labels.clone());
                }
                for _ in 0..k {
                    let eps = d.eps(PointRef {
                        orbit: oid,
                        index: pt,
                    });
                    flip *= eps;
                    if o.kind == OrbitKind::Saddle {
                        let mut next = BTreeMap::new();
                        for (nb, ob) in &labels {
                            let img = d.f_sep(SepRef {
                                saddle: oid,
                                point: pt,
                                branch: *ob,
                            });
                            next.insert(*nb, img.branch);
                        }
                        labels = next;
                    }
                    pt = (pt + 1) % m;
                }
            }
        }
    }
    for (s, a) in &d.ends {
        let np = &point_map[&(s.saddle, s.point)];
        let labels = &label_map[&(s.saddle, s.point)];
        let new_branch = labels
            .iter()
            .find(|(_, ob)| **ob == s.branch)
            .map(|(nb, _)| *nb)
            .expect("branch label translation");
        let new_sep = SepRef {
            saddle: np.orbit,
            point: np.index,
            branch: new_branch,
        };
        match a {
            Attachment::Node { node, point, twist } => {
                let nn = &point_map[&(*node, *point)];
                out.ends.insert(
                    new_sep,
                    Attachment::Node {
                        node: nn.orbit,
                        point: nn.index,
                        twist: twist * np.flip * nn.flip,
                    },
                );
            }
            Attachment::Het { .. } => unreachable!("gradient-like only"),
        }
    }
    for ((node, point), rot) in &d.rotations {
        let nn = &point_map[&(*node, *point)];
        let mut new_rot: Vec<SepRef> = rot
            .iter()
            .map(|s| {
                let np = &point_map[&(s.saddle, s.point)];
                let labels = &label_map[&(s.saddle, s.point)];
                let new_branch = labels
                    .iter()
                    .find(|(_, ob)| **ob == s.branch)
                    .map(|(nb, _)| *nb)
                    .expect("branch label translation");
                SepRef {
                    saddle: np.orbit,
                    point: np.index,
                    branch: new_branch,
                }
            })
            .collect();
        if nn.flip == -1 {
            new_rot.reverse();
        }
        out.rotations.insert((nn.orbit, nn.index), new_rot);
    }
    let bad = out.validate();
    if !bad.is_empty() {
        return Err(SumError::Inconsistent(bad.join("; ")));
    }
    Ok(out)
}

/// Rename orbits via (old name, new name) pairs; unknown names are ignored.
pub fn rename(d: &mut Descriptor, pairs: &[(&str, &str)]) {
    for (old, new) in pairs {
        if let Some(i) = d.orbit_by_name(old) {
            d.orbits[i].name = (*new).to_string();
        }
    }
}
