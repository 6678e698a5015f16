//! Characteristic orbit spaces: enumeration of valid saddle sets, exact
//! component computation via boundary walks, the rearrangement-surgery
//! bookkeeping, and the connectivity decision.

pub mod walks;

use crate::descriptor::{
    Attachment, Branch, Descriptor, OrbitId, OrientationType, PointRef, SepRef,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;
use walks::{trace, BuildError, RibbonGraph, Side, State, WalkSet};

#[derive(Debug, Error, PartialEq)]
pub enum CharSpaceError {
    #[error("sigma is not valid (not downward closed under the Smale order)")]
    InvalidSigma,
    #[error("saddle `{saddle}` makes this sigma non-gradient-like on the chosen side")]
    NotGradientLikeSigma { saddle: String },
    #[error("surgery transition matches no corollary case: {detail}")]
    CaseViolation { detail: String },
    #[error("unsupported configuration: {detail}")]
    Unsupported { detail: String },
}

/// An f-invariant saddle-orbit set, stored at orbit granularity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SigmaSet(pub BTreeSet<OrbitId>);

impl SigmaSet {
    pub fn empty() -> Self {
        SigmaSet(BTreeSet::new())
    }

    pub fn of(ids: &[OrbitId]) -> Self {
        SigmaSet(ids.iter().copied().collect())
    }

    pub fn names(&self, d: &Descriptor) -> Vec<String> {
        self.0.iter().map(|&i| d.orbits[i].name.clone()).collect()
    }

    /// Valid means downward closed: sigma containing a saddle contains
    /// every saddle below it in the Smale order.
    pub fn is_valid(&self, d: &Descriptor) -> bool {
        let closure = d.smale_closure();
        for &(above, below) in &closure {
            if self.0.contains(&above) && !self.0.contains(&below) {
                return false;
            }
        }
        true
    }

    /// No two members are Smale-comparable (the attractor side is then an
    /// embedded graph).
    pub fn is_antichain(&self, d: &Descriptor) -> bool {
        let closure = d.smale_closure();
        !closure
            .iter()
            .any(|(a, b)| self.0.contains(a) && self.0.contains(b))
    }
}

/// All downward-closed saddle-orbit sets, in (size, lexicographic) order.
pub fn enumerate_valid_sigma(d: &Descriptor) -> Vec<SigmaSet> {
    let saddles = d.saddle_orbits();
    let n = saddles.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let set = SigmaSet(
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| saddles[i])
                .collect(),
        );
        if set.is_valid(d) {
            out.push(set);
        }
    }
    out.sort_by_key(|s| (s.0.len(), s.0.iter().copied().collect::<Vec<_>>()));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceType {
    Torus,
    KleinBottle,
}

/// One f-orbit of characteristic-space components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ComponentClass {
    pub surface: SurfaceType,
    pub multiplicity: usize,
}

/// Components of the characteristic orbit space for one sigma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharSpaceSummary {
    pub classes: Vec<ComponentClass>,
}

impl CharSpaceSummary {
    pub fn component_count(&self) -> usize {
        self.classes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.classes.len() == 1
    }

    /// Order-independent form for comparisons and display.
    pub fn canonical(&self) -> CharSpaceSummary {
        let mut classes = self.classes.clone();
        classes.sort();
        CharSpaceSummary { classes }
    }
}

/// Exact walk analysis of V_Sigma on one side, with enough retained state to
/// answer incidence queries.
pub struct SigmaAnalysis {
    pub side: Side,
    pub sigma: SigmaSet,
    pub walks: WalkSet,
    /// circle id -> class index
    pub class_of_circle: Vec<usize>,
    /// class index -> (surface type, multiplicity)
    pub classes: Vec<ComponentClass>,
}

impl SigmaAnalysis {
    /// Summary with classes in analysis-id order (index = component-class id).
    pub fn summary(&self) -> CharSpaceSummary {
        CharSpaceSummary {
            classes: self.classes.clone(),
        }
    }

    pub fn class_of(&self, circle: usize) -> ComponentClass {
        self.classes[self.class_of_circle[circle]]
    }

    /// Cycle type of the f-permutation on V_Sigma components: the sorted
    /// multiset of orbit sizes.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.classes.iter().map(|c| c.multiplicity).collect();
        t.sort();
        t
    }
}

/// The f-action on a traced walk set: vertex, dart and state maps.
struct WalkAction<'a> {
    d: &'a Descriptor,
    vert_map: Vec<usize>,
    dart_map: Vec<usize>,
    eps_vert: Vec<i8>,
}

impl<'a> WalkAction<'a> {
    fn new(d: &'a Descriptor, ws: &WalkSet) -> WalkAction<'a> {
        let g = &ws.graph;
        let mut point_vert: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, v) in g.verts.iter().enumerate() {
            point_vert.insert((v.point.orbit, v.point.index), i);
        }
        let vert_map: Vec<usize> = g
            .verts
            .iter()
            .map(|v| {
                let fp = d.f_point(v.point);
                point_vert[&(fp.orbit, fp.index)]
            })
            .collect();
        let mut sep_edge: BTreeMap<SepRef, usize> = BTreeMap::new();
        for (i, e) in g.edges.iter().enumerate() {
            sep_edge.insert(e.sep, i);
        }
        let mut dart_map = vec![usize::MAX; g.dart_vertex.len()];
        for e in &g.edges {
            let img = sep_edge[&d.f_sep(e.sep)];
            let ie = &g.edges[img];
            dart_map[e.darts[0]] = ie.darts[0];
            dart_map[e.darts[1]] = ie.darts[1];
        }
        let eps_vert: Vec<i8> = g.verts.iter().map(|v| d.eps(v.point)).collect();
        WalkAction {
            d,
            vert_map,
            dart_map,
            eps_vert,
        }
    }

    fn state(&self, ws: &WalkSet, s: State) -> State {
        let v = ws.graph.dart_vertex[s.dart];
        State {
            dart: self.dart_map[s.dart],
            side: self.eps_vert[v] * s.side,
        }
    }

    /// circle -> circle under f.
    fn circles(&self, ws: &WalkSet) -> Vec<usize> {
        let mut out = vec![usize::MAX; ws.n_circles];
        for orbit in 0..ws.orbits.len() {
            let s = ws.orbits[orbit][0];
            let img = self.state(ws, s);
            let io = ws.orbit_of_state[&img.id()];
            out[ws.circle_of_orbit[orbit]] = ws.circle_of_orbit[io];
        }
        for (v, c) in &ws.disk_circle {
            let iv = self.vert_map[*v];
            out[*c] = ws.disk_circle[&iv];
        }
        out
    }

    /// Torus/Klein decision for the class of `circle`, whose f-orbit has
    /// length `mult`.
    fn class_type(&self, ws: &WalkSet, circle: usize, mult: usize) -> SurfaceType {
        // disk circle: product of eps around the point orbit
        if let Some((&v, _)) = ws.disk_circle.iter().find(|(_, c)| **c == circle) {
            let mut sign: i8 = 1;
            let mut cur = v;
            for _ in 0..mult {
                sign *= self.eps_vert[cur];
                cur = self.vert_map[cur];
            }
            debug_assert_eq!(cur, v);
            return if sign == 1 {
                SurfaceType::Torus
            } else {
                SurfaceType::KleinBottle
            };
        }
        let orbit = (0..ws.orbits.len())
            .find(|&o| ws.circle_of_orbit[o] == circle)
            .expect("circle has a directed orbit");
        let mut s = ws.orbits[orbit][0];
        for _ in 0..mult {
            s = self.state(ws, s);
        }
        let back = ws.orbit_of_state[&s.id()];
        debug_assert_eq!(ws.circle_of_orbit[back], circle);
        if back == orbit {
            SurfaceType::Torus
        } else {
            SurfaceType::KleinBottle
        }
    }

    fn descriptor(&self) -> &Descriptor {
        self.d
    }
}

/// Run the walk analysis of V_Sigma on the requested side. The side must be
/// graph-like for this sigma: on the attractor side no two sigma saddles may
/// be Smale-comparable, on the repeller side the same for the complement.
pub fn analyze_sigma(
    d: &Descriptor,
    sigma: &SigmaSet,
    side: Side,
) -> Result<SigmaAnalysis, CharSpaceError> {
    if !sigma.is_valid(d) {
        return Err(CharSpaceError::InvalidSigma);
    }
    let selected: Vec<OrbitId> = match side {
        Side::Attractor => sigma.0.iter().copied().collect(),
        Side::Repeller => d
            .saddle_orbits()
            .into_iter()
            .filter(|s| !sigma.0.contains(s))
            .collect(),
    };
    let graph = RibbonGraph::build(d, &selected, side, false).map_err(|e| match e {
        BuildError::Heteroclinic { saddle } => CharSpaceError::NotGradientLikeSigma {
            saddle: d.orbits[saddle].name.clone(),
        },
    })?;
    let ws = trace(graph);
    let action = WalkAction::new(d, &ws);
    let circle_map = action.circles(&ws);
    // group circles into f-orbits
    let mut class_of_circle = vec![usize::MAX; ws.n_circles];
    let mut classes = Vec::new();
    for c in 0..ws.n_circles {
        if class_of_circle[c] != usize::MAX {
            continue;
        }
        let mut orbit = vec![c];
        let mut cur = circle_map[c];
        while cur != c {
            orbit.push(cur);
            cur = circle_map[cur];
        }
        let class_id = classes.len();
        for &x in &orbit {
            class_of_circle[x] = class_id;
        }
        let mult = orbit.len();
        let surface = action.class_type(&ws, c, mult);
        classes.push(ComponentClass {
            surface,
            multiplicity: mult,
        });
    }
    let _ = action.descriptor();
    Ok(SigmaAnalysis {
        side,
        sigma: sigma.clone(),
        walks: ws,
        class_of_circle,
        classes,
    })
}

/// Tier 1: boundary-walk computation on the attractor side. Exact whenever
/// A_Sigma is an embedded graph.
pub fn charspace_of_sigma(
    d: &Descriptor,
    sigma: &SigmaSet,
) -> Result<CharSpaceSummary, CharSpaceError> {
    if !sigma.is_antichain(d) {
        // name one offending saddle for the diagnostic
        let closure = d.smale_closure();
        let bad = closure
            .iter()
            .find(|(a, b)| sigma.0.contains(a) && sigma.0.contains(b))
            .map(|(a, _)| d.orbits[*a].name.clone())
            .unwrap_or_default();
        return Err(CharSpaceError::NotGradientLikeSigma { saddle: bad });
    }
    Ok(analyze_sigma(d, sigma, Side::Attractor)?.summary())
}

/// Best available exact analysis: the attractor side when sigma is an
/// antichain, otherwise the repeller side.
pub fn analyze_sigma_best(d: &Descriptor, sigma: &SigmaSet) -> Result<SigmaAnalysis, CharSpaceError> {
    if sigma.is_antichain(d) {
        analyze_sigma(d, sigma, Side::Attractor)
    } else {
        analyze_sigma(d, sigma, Side::Repeller)
    }
}

// ---- incidence: where a separatrix germ lives among the components ----------

/// Circle of V_Sigma (in `an`) containing the given separatrix, which must
/// not be an edge of the analyzed graph. Unstable separatrices of saddles
/// outside sigma are located through their attachment (sink slot, or the
/// crossed stable branch of their heteroclinic target inside sigma); stable
/// separatrices of saddles inside the analyzed attractor graph are located
/// at their own saddle vertex. Mirrored for the repeller side.
pub fn locate_separatrix(an: &SigmaAnalysis, d: &Descriptor, sep: SepRef) -> usize {
    let ws = &an.walks;
    match an.side {
        Side::Attractor => {
            if sep.branch.is_unstable() {
                debug_assert!(!an.sigma.0.contains(&sep.saddle));
                match d.ends[&sep] {
                    Attachment::Node { node, point, .. } => {
                        locate_at_node_gap(an, d, node, point, sep)
                    }
                    Attachment::Het { target, crossed } => {
                        debug_assert!(an.sigma.0.contains(&target));
                        let v = ws
                            .vert_of_point(PointRef {
                                orbit: target,
                                index: 0,
                            })
                            .expect("heteroclinic target vertex in graph");
                        // A-side saddle rotation [U+, U-]: gap 0 holds S+,
                        // gap 1 holds S-.
                        let gap = if crossed == Branch::SPlus { 0 } else { 1 };
                        ws.circle_of_gap(v, gap)
                    }
                }
            } else {
                // own saddle vertex: S+ sits in gap 0, S- in gap 1
                debug_assert!(an.sigma.0.contains(&sep.saddle));
                let v = ws
                    .vert_of_point(PointRef {
                        orbit: sep.saddle,
                        index: sep.point,
                    })
                    .expect("saddle vertex in graph");
                let gap = if sep.branch == Branch::SPlus { 0 } else { 1 };
                ws.circle_of_gap(v, gap)
            }
        }
        Side::Repeller => {
            if !sep.branch.is_unstable() {
                debug_assert!(an.sigma.0.contains(&sep.saddle));
                match d.ends[&sep] {
                    Attachment::Node { node, point, .. } => {
                        locate_at_node_gap(an, d, node, point, sep)
                    }
                    Attachment::Het { target, crossed } => {
                        debug_assert!(!an.sigma.0.contains(&target));
                        let v = ws
                            .vert_of_point(PointRef {
                                orbit: target,
                                index: 0,
                            })
                            .expect("heteroclinic target vertex in graph");
                        // R-side saddle rotation [S+, S-]: gap 0 holds U-,
                        // gap 1 holds U+.
                        let gap = if crossed == Branch::UMinus { 0 } else { 1 };
                        ws.circle_of_gap(v, gap)
                    }
                }
            } else {
                debug_assert!(!an.sigma.0.contains(&sep.saddle));
                let v = ws
                    .vert_of_point(PointRef {
                        orbit: sep.saddle,
                        index: sep.point,
                    })
                    .expect("saddle vertex in graph");
                // full order [U+, S+, U-, S-] induces [S+, S-];
                // U- sits after S+ (gap 0), U+ after S- (gap 1)
                let gap = if sep.branch == Branch::UMinus { 0 } else { 1 };
                ws.circle_of_gap(v, gap)
            }
        }
    }
}

/// Gap lookup at a node vertex: the germ occupies the slot of `sep` in the
/// node's full stored rotation; the enclosing gap of the analyzed subgraph
/// is the nearest included end clockwise from that slot.
fn locate_at_node_gap(
    an: &SigmaAnalysis,
    d: &Descriptor,
    node: OrbitId,
    point: usize,
    sep: SepRef,
) -> usize {
    let ws = &an.walks;
    let v = ws
        .vert_of_point(PointRef {
            orbit: node,
            index: point,
        })
        .expect("node vertex in graph");
    let rotation = ws.graph.verts[v].rotation.clone();
    if rotation.is_empty() {
        return ws.circle_of_gap(v, 0);
    }
    let full = &d.rotations[&(node, point)];
    let included: BTreeMap<SepRef, usize> = rotation
        .iter()
        .enumerate()
        .map(|(pos, dart)| (ws.graph.edges[ws.graph.dart_edge[*dart]].sep, pos))
        .collect();
    let my_slot = full
        .iter()
        .position(|e| *e == sep)
        .expect("separatrix end present in the full rotation");
    let n = full.len();
    for back in 1..=n {
        let slot = (my_slot + n - back) % n;
        if let Some(pos) = included.get(&full[slot]) {
            return ws.circle_of_gap(v, *pos);
        }
    }
    unreachable!("non-empty subgraph rotation must contain an included end")
}

// ---- Tier 2: rearrangement surgery bookkeeping --------------------------------

/// Bookkeeping data for adding one saddle orbit: the components currently
/// met by the boundary circles of the quotient unstable neighborhood, and
/// the components of the new space met by the stable side. Component
/// identity matters (two new tori may share type and multiplicity), so the
/// unstable side references indices into the current summary and the stable
/// side carries keys grouping circles that land in one new component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaddleSurgeryData {
    pub saddle: String,
    /// (nu, lambda) of the saddle orbit; the corollary's case lists apply
    /// to the positive type (+1,+1) and the negative type (-1,-1).
    pub otype: (i8, i8),
    /// One entry per boundary circle of N^u / f (2 when lambda = +1, else 1):
    /// the index of the met component in the current summary.
    pub u_circles: Vec<usize>,
    /// One entry per boundary circle of N^s / f (2 when nu = +1, else 1):
    /// (new-component key, its class); equal keys mean one component.
    pub s_circles: Vec<(usize, ComponentClass)>,
    /// Whether the ambient surface is orientable (selects corollary cases).
    pub orientable_surface: bool,
}

/// A matched corollary case. `Extended` variants are transitions that the
/// machine checking turned up beyond the printed list; they preserve the
/// count monotonicity arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorollaryCase {
    PosTwoKleinsToTwoKleins,
    PosTorusToTwoTori,
    PosTwoToriToTorus,
    PosTorusKleinToKlein,
    PosKleinToTorusKlein,
    PosTorusToTorusNonorientable,
    NegKleinToKlein,
    NegTorusToTorus,
    ExtPosKleinToKlein,
    ExtPosTorusToTorusOrientable,
}

impl CorollaryCase {
    pub fn is_extended(self) -> bool {
        matches!(
            self,
            CorollaryCase::ExtPosKleinToKlein | CorollaryCase::ExtPosTorusToTorusOrientable
        )
    }
}

fn type_multiset(cs: &[ComponentClass]) -> Vec<SurfaceType> {
    let mut t: Vec<SurfaceType> = cs.iter().map(|c| c.surface).collect();
    t.sort();
    t
}

/// Match one transition (v-hat, v-hat') against the corollary's case list.
pub fn match_corollary_case(
    otype: (i8, i8),
    v_before: &[ComponentClass],
    v_after: &[ComponentClass],
    orientable: bool,
) -> Option<CorollaryCase> {
    use SurfaceType::{KleinBottle as K, Torus as T};
    let b = type_multiset(v_before);
    let a = type_multiset(v_after);
    if otype == (1, 1) {
        match (b.as_slice(), a.as_slice()) {
            ([K, K], [K, K]) => Some(CorollaryCase::PosTwoKleinsToTwoKleins),
            ([T], [T, T]) => Some(CorollaryCase::PosTorusToTwoTori),
            ([T, T], [T]) => Some(CorollaryCase::PosTwoToriToTorus),
            ([T, K], [K]) => Some(CorollaryCase::PosTorusKleinToKlein),
            ([K], [T, K]) => Some(CorollaryCase::PosKleinToTorusKlein),
            ([T], [T]) if !orientable => Some(CorollaryCase::PosTorusToTorusNonorientable),
            ([T], [T]) => Some(CorollaryCase::ExtPosTorusToTorusOrientable),
            ([K], [K]) => Some(CorollaryCase::ExtPosKleinToKlein),
            _ => None,
        }
    } else if otype == (-1, -1) {
        match (b.as_slice(), a.as_slice()) {
            ([K], [K]) => Some(CorollaryCase::NegKleinToKlein),
            ([T], [T]) => Some(CorollaryCase::NegTorusToTorus),
            _ => None,
        }
    } else {
        // mixed types are outside the corollary's case lists
        None
    }
}

/// Tier 2 step: remove the components met by the unstable circles, insert
/// the components named by the stable side. The executed transition must
/// match a corollary case for the saddle's orientation type.
pub fn surgery_step(
    current: &CharSpaceSummary,
    data: &SaddleSurgeryData,
) -> Result<(CharSpaceSummary, CorollaryCase), CharSpaceError> {
    let mut removed: BTreeSet<usize> = BTreeSet::new();
    let mut v_before: Vec<ComponentClass> = Vec::new();
    for &idx in &data.u_circles {
        if idx >= current.classes.len() {
            return Err(CharSpaceError::Unsupported {
                detail: format!("unstable circle references component {idx} absent from the summary"),
            });
        }
        if removed.insert(idx) {
            v_before.push(current.classes[idx]);
        }
    }
    let mut seen_keys: BTreeSet<usize> = BTreeSet::new();
    let mut v_after: Vec<ComponentClass> = Vec::new();
    for (key, class) in &data.s_circles {
        if seen_keys.insert(*key) {
            v_after.push(*class);
        }
    }
    let case = match_corollary_case(data.otype, &v_before, &v_after, data.orientable_surface)
        .ok_or_else(|| CharSpaceError::CaseViolation {
        detail: format!(
            "saddle {} (type {:?}): {:?} -> {:?}",
            data.saddle,
            data.otype,
            type_multiset(&v_before),
            type_multiset(&v_after)
        ),
    })?;
    let mut classes: Vec<ComponentClass> = current
        .classes
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, c)| *c)
        .collect();
    classes.extend(v_after.iter().copied());
    Ok((CharSpaceSummary { classes }, case))
}

/// Build the surgery data for adding `saddle` to the sigma of `before`,
/// where `after` analyzes the extended sigma. Circle counts follow the
/// orientation type: two unstable circles when lambda = +1, one when
/// lambda = -1, symmetrically on the stable side with nu.
pub fn derive_surgery_data(
    d: &Descriptor,
    before: &SigmaAnalysis,
    after: &SigmaAnalysis,
    saddle: OrbitId,
    orientable_surface: bool,
) -> SaddleSurgeryData {
    let (nu, lambda) = match d.orbits[saddle].otype {
        OrientationType::Saddle { nu, lambda } => (nu, lambda),
        _ => unreachable!("surgery data requested for a non-saddle orbit"),
    };
    let u_branches: &[Branch] = if lambda == 1 {
        &[Branch::UPlus, Branch::UMinus]
    } else {
        &[Branch::UPlus]
    };
    let s_branches: &[Branch] = if nu == 1 {
        &[Branch::SPlus, Branch::SMinus]
    } else {
        &[Branch::SPlus]
    };
    let u_circles = u_branches
        .iter()
        .map(|&b| {
            let circle = locate_separatrix(
                before,
                d,
                SepRef {
                    saddle,
                    point: 0,
                    branch: b,
                },
            );
            before.class_of_circle[circle]
        })
        .collect();
    let s_circles = s_branches
        .iter()
        .map(|&b| {
            let circle = locate_separatrix(
                after,
                d,
                SepRef {
                    saddle,
                    point: 0,
                    branch: b,
                },
            );
            let idx = after.class_of_circle[circle];
            (idx, after.classes[idx])
        })
        .collect();
    SaddleSurgeryData {
        saddle: d.orbits[saddle].name.clone(),
        otype: (nu, lambda),
        u_circles,
        s_circles,
        orientable_surface,
    }
}

/// One executed surgery step in a tier-2 chain.
#[derive(Debug, Clone, Serialize)]
pub struct SurgeryTransition {
    pub sigma_before: Vec<String>,
    pub added: String,
    pub case: CorollaryCase,
    pub count_before: usize,
    pub count_after: usize,
}

/// Linear extension of the Smale order restricted to `sigma`, minimal
/// saddles first, ties by orbit id.
fn linear_extension(d: &Descriptor, sigma: &SigmaSet) -> Vec<OrbitId> {
    let closure = d.smale_closure();
    let mut remaining: BTreeSet<OrbitId> = sigma.0.clone();
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let next = *remaining
            .iter()
            .find(|&&s| {
                !closure
                    .iter()
                    .any(|&(a, b)| a == s && remaining.contains(&b))
            })
            .expect("a strict partial order always has a minimal element");
        remaining.remove(&next);
        out.push(next);
    }
    out
}

/// Tier 2: compute the summary of `sigma` by surgery bookkeeping along a
/// linear extension of the Smale order, verifying each step against the
/// exact walk analysis and against the corollary case list.
pub fn charspace_tier2(
    d: &Descriptor,
    sigma: &SigmaSet,
) -> Result<(CharSpaceSummary, Vec<SurgeryTransition>), CharSpaceError> {
    if !sigma.is_valid(d) {
        return Err(CharSpaceError::InvalidSigma);
    }
    let orientable = crate::descriptor::surface_of(d)
        .map(|s| s.orientable)
        .unwrap_or(true);
    let order = linear_extension(d, sigma);
    let mut cur_sigma = SigmaSet::empty();
    let mut cur_an = analyze_sigma_best(d, &cur_sigma)?;
    let mut summary = cur_an.summary();
    let mut transitions = Vec::new();
    for saddle in order {
        let mut next_sigma = cur_sigma.clone();
        next_sigma.0.insert(saddle);
        let next_an = analyze_sigma_best(d, &next_sigma)?;
        let data = derive_surgery_data(d, &cur_an, &next_an, saddle, orientable);
        let before_count = summary.component_count();
        let (stepped, case) = surgery_step(&summary, &data)?;
        let exact = next_an.summary();
        if stepped.canonical() != exact.canonical() {
            return Err(CharSpaceError::Unsupported {
                detail: format!(
                    "surgery bookkeeping for {} disagrees with the walk analysis: {:?} vs {:?}",
                    d.orbits[saddle].name,
                    stepped.canonical(),
                    exact.canonical()
                ),
            });
        }
        transitions.push(SurgeryTransition {
            sigma_before: cur_sigma.names(d),
            added: d.orbits[saddle].name.clone(),
            case,
            count_before: before_count,
            count_after: exact.component_count(),
        });
        cur_sigma = next_sigma;
        cur_an = next_an;
        summary = exact;
    }
    Ok((summary, transitions))
}

/// One row of the connectivity certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaRow {
    pub sigma: Vec<String>,
    pub count: usize,
    pub classes: Vec<ComponentClass>,
    pub route: String,
}

/// The full table of sigma -> components, plus the connectivity witness.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub rows: Vec<SigmaRow>,
    pub witness: Option<Vec<String>>,
}

/// Decide whether any valid sigma yields a connected characteristic orbit
/// space. Returns the witness sigma or the full certificate table.
pub fn has_connected_charspace(
    d: &Descriptor,
) -> Result<(bool, Certificate), CharSpaceError> {
    let mut rows = Vec::new();
    let mut witness = None;
    for sigma in enumerate_valid_sigma(d) {
        let (summary, route) = if sigma.is_antichain(d) {
            (charspace_of_sigma(d, &sigma)?.canonical(), "tier1".to_string())
        } else {
            let (s, transitions) = charspace_tier2(d, &sigma)?;
            (s.canonical(), format!("tier2({} steps)", transitions.len()))
        };
        if summary.is_connected() && witness.is_none() {
            witness = Some(sigma.names(d));
        }
        rows.push(SigmaRow {
            sigma: sigma.names(d),
            count: summary.component_count(),
            classes: summary.classes.clone(),
            route,
        });
    }
    Ok((witness.is_some(), Certificate { rows, witness }))
}

/// One checked transition of the conformance report.
#[derive(Debug, Clone, Serialize)]
pub struct ConformanceEntry {
    pub sigma: Vec<String>,
    pub added: String,
    pub v_before: Vec<SurfaceType>,
    pub v_after: Vec<SurfaceType>,
    pub case: Option<CorollaryCase>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub entries: Vec<ConformanceEntry>,
}

impl ConformanceReport {
    pub fn violations(&self) -> Vec<&ConformanceEntry> {
        self.entries.iter().filter(|e| e.case.is_none()).collect()
    }
}

/// Check every one-orbit extension of every valid sigma against the
/// corollary case list.
pub fn corollary_conformance(d: &Descriptor) -> Result<ConformanceReport, CharSpaceError> {
    let orientable = crate::descriptor::surface_of(d)
        .map(|s| s.orientable)
        .unwrap_or(true);
    let mut entries = Vec::new();
    for sigma in enumerate_valid_sigma(d) {
        let before = analyze_sigma_best(d, &sigma)?;
        for saddle in d.saddle_orbits() {
            if sigma.0.contains(&saddle) {
                continue;
            }
            let mut next = sigma.clone();
            next.0.insert(saddle);
            if !next.is_valid(d) {
                continue;
            }
            let after = analyze_sigma_best(d, &next)?;
            let data = derive_surgery_data(d, &before, &after, saddle, orientable);
            let v_before: Vec<ComponentClass> = {
                let mut seen = BTreeSet::new();
                data.u_circles
                    .iter()
                    .filter(|i| seen.insert(**i))
                    .map(|&i| before.classes[i])
                    .collect()
            };
            let v_after: Vec<ComponentClass> = {
                let mut seen = BTreeSet::new();
                data.s_circles
                    .iter()
                    .filter(|(k, _)| seen.insert(*k))
                    .map(|(_, c)| *c)
                    .collect()
            };
            let case =
                match_corollary_case(data.otype, &v_before, &v_after, orientable);
            if data.otype == (-1, -1) {
                if let Some(c) = case {
                    debug_assert!(
                        v_before.len() == 1
                            && v_after.len() == 1
                            && v_before[0].surface == v_after[0].surface,
                        "negative type must map one component to one of equal type: {c:?}"
                    );
                }
            }
            entries.push(ConformanceEntry {
                sigma: sigma.names(d),
                added: d.orbits[saddle].name.clone(),
                v_before: type_multiset(&v_before),
                v_after: type_multiset(&v_after),
                case,
            });
        }
    }
    Ok(ConformanceReport { entries })
}

/// Compare attractor-side and repeller-side analyses on every valid sigma
/// where both sides are graph-like; returns human-readable mismatches.
pub fn dual_consistency_check(d: &Descriptor) -> Vec<String> {
    let mut bad = Vec::new();
    for sigma in enumerate_valid_sigma(d) {
        let a = analyze_sigma(d, &sigma, Side::Attractor);
        let r = analyze_sigma(d, &sigma, Side::Repeller);
        if let (Ok(a), Ok(r)) = (a, r) {
            if a.summary().canonical() != r.summary().canonical() {
                bad.push(format!(
                    "sigma {:?}: attractor {:?} vs repeller {:?}",
                    sigma.names(d),
                    a.summary().canonical(),
                    r.summary().canonical()
                ));
            } else if a.cycle_type() != r.cycle_type() {
                bad.push(format!("sigma {:?}: cycle types differ", sigma.names(d)));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests;
