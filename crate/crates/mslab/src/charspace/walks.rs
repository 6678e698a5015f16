//! Boundary walks of embedded ribbon graphs.
//!
//! A ribbon graph is a graph with a cyclic order of edge ends at every
//! vertex and a twist sign per edge. Boundary walks of its thickening are
//! traced as orbits of directed states; each geometric boundary circle
//! corresponds to a pair of mutually reversed orbits. Components of the
//! characteristic space V_Sigma are in bijection with these circles, and the
//! f-action on circles determines multiplicities and torus/Klein types of
//! the quotient components.

use crate::descriptor::{Branch, Descriptor, OrbitKind, PointRef, SepRef};
use std::collections::BTreeMap;

pub type DartId = usize;
pub type VertId = usize;
pub type StateId = usize;

#[derive(Debug, Clone)]
pub struct RVertex {
    pub point: PointRef,
    pub kind: OrbitKind,
    pub rotation: Vec<DartId>,
}

#[derive(Debug, Clone)]
pub struct REdge {
    /// Identity of the separatrix this edge realizes (saddle-side).
    pub sep: SepRef,
    pub twist: i8,
    /// [saddle-side dart, node-side dart]
    pub darts: [DartId; 2],
}

#[derive(Debug, Clone, Default)]
pub struct RibbonGraph {
    pub verts: Vec<RVertex>,
    pub edges: Vec<REdge>,
    pub dart_vertex: Vec<VertId>,
    pub dart_edge: Vec<usize>,
}

/// Which invariant-manifold side a graph is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Sinks plus unstable separatrices of the selected saddles.
    Attractor,
    /// Sources plus stable separatrices of the selected saddles.
    Repeller,
}

impl Side {
    pub fn node_kind(self) -> OrbitKind {
        match self {
            Side::Attractor => OrbitKind::Sink,
            Side::Repeller => OrbitKind::Source,
        }
    }

    pub fn branches(self) -> [Branch; 2] {
        match self {
            Side::Attractor => Branch::UNSTABLE,
            Side::Repeller => Branch::STABLE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildError {
    /// A selected saddle has a heteroclinic separatrix on this side.
    Heteroclinic { saddle: usize },
}

impl RibbonGraph {
    /// Build the side graph over the given saddle orbits. With
    /// `skip_het = false` a heteroclinic separatrix on the chosen side is an
    /// error; with `skip_het = true` such separatrices are simply omitted
    /// (used for corner scans during connected sums).
    pub fn build(
        d: &Descriptor,
        saddles: &[usize],
        side: Side,
        skip_het: bool,
    ) -> Result<RibbonGraph, BuildError> {
        let mut g = RibbonGraph::default();
        let mut vert_of_point: BTreeMap<(usize, usize), VertId> = BTreeMap::new();
        for p in d.node_points(side.node_kind()) {
            vert_of_point.insert((p.orbit, p.index), g.verts.len());
            g.verts.push(RVertex {
                point: p,
                kind: side.node_kind(),
                rotation: Vec::new(),
            });
        }
        for &s in saddles {
            for k in 0..d.orbits[s].period {
                vert_of_point.insert((s, k), g.verts.len());
                g.verts.push(RVertex {
                    point: PointRef { orbit: s, index: k },
                    kind: OrbitKind::Saddle,
                    rotation: Vec::new(),
                });
            }
        }
        // edges, saddle rotations in canonical branch order
        let mut node_side_dart: BTreeMap<SepRef, DartId> = BTreeMap::new();
        for &s in saddles {
            for k in 0..d.orbits[s].period {
                let sv = vert_of_point[&(s, k)];
                for b in side.branches() {
                    let sep = SepRef {
                        saddle: s,
                        point: k,
                        branch: b,
                    };
                    match d.ends.get(&sep) {
                        Some(crate::descriptor::Attachment::Node { node, point, twist }) => {
                            let nv = vert_of_point[&(*node, *point)];
                            let d0 = g.dart_vertex.len();
                            g.dart_vertex.push(sv);
                            g.dart_edge.push(g.edges.len());
                            let d1 = g.dart_vertex.len();
                            g.dart_vertex.push(nv);
                            g.dart_edge.push(g.edges.len());
                            g.verts[sv].rotation.push(d0);
                            node_side_dart.insert(sep, d1);
                            g.edges.push(REdge {
                                sep,
                                twist: *twist,
                                darts: [d0, d1],
                            });
                        }
                        Some(crate::descriptor::Attachment::Het { .. }) | None => {
                            if !skip_het {
                                return Err(BuildError::Heteroclinic { saddle: s });
                            }
                        }
                    }
                }
            }
        }
        // node rotations: induced subsequence of the stored full rotation
        for v in 0..g.verts.len() {
            if g.verts[v].kind == OrbitKind::Saddle {
                continue;
            }
            let p = g.verts[v].point;
            if let Some(rot) = d.rotations.get(&(p.orbit, p.index)) {
                for sep in rot {
                    if let Some(dart) = node_side_dart.get(sep) {
                        if g.dart_vertex[*dart] == v {
                            g.verts[v].rotation.push(*dart);
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn other_dart(&self, dart: DartId) -> DartId {
        let e = &self.edges[self.dart_edge[dart]];
        if e.darts[0] == dart {
            e.darts[1]
        } else {
            e.darts[0]
        }
    }

    fn rot_pos(&self, dart: DartId) -> usize {
        self.verts[self.dart_vertex[dart]]
            .rotation
            .iter()
            .position(|d| *d == dart)
            .expect("dart must appear in its vertex rotation")
    }

    pub fn rot_next(&self, dart: DartId) -> DartId {
        let v = &self.verts[self.dart_vertex[dart]];
        let i = self.rot_pos(dart);
        v.rotation[(i + 1) % v.rotation.len()]
    }

    pub fn rot_prev(&self, dart: DartId) -> DartId {
        let v = &self.verts[self.dart_vertex[dart]];
        let i = self.rot_pos(dart);
        v.rotation[(i + v.rotation.len() - 1) % v.rotation.len()]
    }
}

/// Directed boundary state: traveling away from `dart`'s vertex along its
/// edge, on side `side` of the dart (+1 is the left side looking outward in
/// the vertex gauge).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct State {
    pub dart: DartId,
    pub side: i8,
}

impl State {
    pub fn id(&self) -> StateId {
        self.dart * 2 + if self.side > 0 { 1 } else { 0 }
    }

    pub fn from_id(id: StateId) -> State {
        State {
            dart: id / 2,
            side: if id % 2 == 1 { 1 } else { -1 },
        }
    }
}

/// One step of a boundary traversal: cross the ribbon, then follow the
/// vertex arc to the next outgoing side. Also reports the vertex arc
/// traversed as (vertex, gap index); gap g at a vertex is the arc between
/// rotation[g] and rotation [g+1].
pub fn step(g: &RibbonGraph, s: State) -> (State, (VertId, usize)) {
    let e = &g.edges[g.dart_edge[s.dart]];
    let arrive = g.other_dart(s.dart);
    let v = g.dart_vertex[arrive];
    let arrive_side = -e.twist * s.side;
    if arrive_side > 0 {
        let next = g.rot_next(arrive);
        let gap = g.rot_pos(arrive);
        (State { dart: next, side: -1 }, (v, gap))
    } else {
        let next = g.rot_prev(arrive);
        let gap = g.rot_pos(next);
        (State { dart: next, side: 1 }, (v, gap))
    }
}

/// The same undirected boundary arc traversed in the opposite direction.
pub fn reverse(g: &RibbonGraph, s: State) -> State {
    let e = &g.edges[g.dart_edge[s.dart]];
    State {
        dart: g.other_dart(s.dart),
        side: -e.twist * s.side,
    }
}

/// A traced boundary circle set for one ribbon graph.
#[derive(Debug)]
pub struct WalkSet {
    pub graph: RibbonGraph,
    /// Directed orbits: each a cyclic state sequence.
    pub orbits: Vec<Vec<State>>,
    pub orbit_of_state: BTreeMap<StateId, usize>,
    /// Circle id per directed orbit (orbit paired with its reversal).
    pub circle_of_orbit: Vec<usize>,
    /// Circle id per isolated vertex.
    pub disk_circle: BTreeMap<VertId, usize>,
    /// Vertex-arc incidence: (vertex, gap) -> directed orbit.
    pub arc_orbit: BTreeMap<(VertId, usize), usize>,
    pub n_circles: usize,
}

pub fn trace(graph: RibbonGraph) -> WalkSet {
    let n_states = graph.dart_vertex.len() * 2;
    let mut orbit_of_state: BTreeMap<StateId, usize> = BTreeMap::new();
    let mut orbits: Vec<Vec<State>> = Vec::new();
    let mut arc_orbit: BTreeMap<(VertId, usize), usize> = BTreeMap::new();
    for start in 0..n_states {
        if orbit_of_state.contains_key(&start) {
            continue;
        }
        let oid = orbits.len();
        let mut cyc = Vec::new();
        let mut s = State::from_id(start);
        loop {
            orbit_of_state.insert(s.id(), oid);
            cyc.push(s);
            let (next, arc) = step(&graph, s);
            arc_orbit.insert(arc, oid);
            s = next;
            if s.id() == start {
                break;
            }
        }
        orbits.push(cyc);
    }
    // pair each directed orbit with its reversal
    let mut circle_of_orbit = vec![usize::MAX; orbits.len()];
    let mut n_circles = 0;
    for oid in 0..orbits.len() {
        if circle_of_orbit[oid] != usize::MAX {
            continue;
        }
        let rev_state = reverse(&graph, orbits[oid][0]);
        let rid = orbit_of_state[&rev_state.id()];
        debug_assert_ne!(rid, oid, "a boundary circle cannot equal its reversal");
        circle_of_orbit[oid] = n_circles;
        circle_of_orbit[rid] = n_circles;
        n_circles += 1;
    }
    // isolated vertices bound their own disk
    let mut disk_circle = BTreeMap::new();
    for v in 0..graph.verts.len() {
        if graph.verts[v].rotation.is_empty() {
            disk_circle.insert(v, n_circles);
            n_circles += 1;
        }
    }
    WalkSet {
        graph,
        orbits,
        orbit_of_state,
        circle_of_orbit,
        disk_circle,
        arc_orbit,
        n_circles,
    }
}

impl WalkSet {
    pub fn vert_of_point(&self, p: PointRef) -> Option<VertId> {
        self.graph
            .verts
            .iter()
            .position(|v| v.point.orbit == p.orbit && v.point.index == p.index)
    }

    /// Circle owning the boundary arc in the given gap of a vertex; for an
    /// isolated vertex the whole disk boundary is one arc.
    pub fn circle_of_gap(&self, v: VertId, gap: usize) -> usize {
        if self.graph.verts[v].rotation.is_empty() {
            self.disk_circle[&v]
        } else {
            self.circle_of_orbit[self.arc_orbit[&(v, gap)]]
        }
    }

    /// Event sequence of a directed orbit: alternating ribbon sides and
    /// vertex arcs, in traversal order starting from the orbit's first state.
    pub fn events(&self, oid: usize) -> Vec<Event> {
        let mut out = Vec::new();
        for s in &self.orbits[oid] {
            out.push(Event::EdgeSide(*s));
            let (_, arc) = step(&self.graph, *s);
            out.push(Event::VertexArc(arc.0, arc.1));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    EdgeSide(State),
    VertexArc(VertId, usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::fixtures;

    fn a_side(d: &Descriptor, saddles: &[usize]) -> WalkSet {
        trace(RibbonGraph::build(d, saddles, Side::Attractor, false).unwrap())
    }

    #[test]
    fn psi0_full_sigma_has_two_circles() {
        let d = fixtures::psi0();
        let s = d.orbit_by_name("s").unwrap();
        let w = a_side(&d, &[s]);
        // the invariant circle r = 1 has an annulus neighborhood
        assert_eq!(w.n_circles, 2);
        assert_eq!(w.orbits.len(), 4);
    }

    #[test]
    fn psi0_empty_sigma_isolated_sinks() {
        let d = fixtures::psi0();
        let w = a_side(&d, &[]);
        assert_eq!(w.n_circles, 2);
        assert!(w.orbits.is_empty());
        assert_eq!(w.disk_circle.len(), 2);
    }

    #[test]
    fn psitilde1_moebius_circle() {
        let d = fixtures::psitilde1();
        let s = d.orbit_by_name("st").unwrap();
        let w = a_side(&d, &[s]);
        // the one-sided circle has a Moebius-band neighborhood: one boundary
        assert_eq!(w.n_circles, 1);
        assert_eq!(w.orbits.len(), 2);
    }

    #[test]
    fn f1_full_wedge_is_cellular() {
        let d = fixtures::f1_torus();
        let s1 = d.orbit_by_name("s1").unwrap();
        let s2 = d.orbit_by_name("s2").unwrap();
        let w = a_side(&d, &[s1, s2]);
        assert_eq!(w.n_circles, 1);
        // single saddle circle: torus minus an annulus around one essential
        // circle stays connected? no: two boundary circles
        let w1 = a_side(&d, &[s1]);
        assert_eq!(w1.n_circles, 2);
    }

    #[test]
    fn psi1_full_wedge_single_circle() {
        let d = fixtures::psi1();
        let s = d.orbit_by_name("s").unwrap();
        let w = a_side(&d, &[s]);
        assert_eq!(w.n_circles, 1);
        assert_eq!(w.orbits.len(), 2);
        assert_eq!(w.orbits[0].len(), 8);
    }

    #[test]
    fn xi0_sigma0_circle_plus_disk() {
        let d = fixtures::xi0();
        let s0 = d.orbit_by_name("s0").unwrap();
        let w = a_side(&d, &[s0]);
        // doubled edge circle through the origin sink (2 walks) plus the
        // isolated sink w0 (1 disk)
        assert_eq!(w.n_circles, 3);
    }

    #[test]
    fn xi0_attractor_build_rejects_het_saddle() {
        let d = fixtures::xi0();
        let s = d.orbit_by_name("s").unwrap();
        let err = RibbonGraph::build(&d, &[s], Side::Attractor, false).unwrap_err();
        assert_eq!(err, BuildError::Heteroclinic { saddle: s });
    }

    #[test]
    fn reversal_is_an_involution_between_orbits() {
        let d = fixtures::psi1();
        let s = d.orbit_by_name("s").unwrap();
        let w = a_side(&d, &[s]);
        for orbit in &w.orbits {
            for st in orbit {
                let r = reverse(&w.graph, *st);
                let rr = reverse(&w.graph, r);
                assert_eq!(rr, *st);
                assert_ne!(
                    w.orbit_of_state[&st.id()],
                    w.orbit_of_state[&r.id()],
                    "state and its reversal share an orbit"
                );
            }
        }
    }
}
