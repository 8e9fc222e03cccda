//! Finite covers described by sheet permutations across facets of the base.
//!
//! A tile is a pair (base top cell σ, sheet s), numbered `σ·d + s`. Crossing
//! the facet shared by σ and τ sends sheet `s` to `perm(σ→τ)[s]`. Ordered
//! base adjacencies are labelled `2e` (σ→τ with σ < τ) and `2e + 1` (τ→σ),
//! where `e` indexes the unordered adjacency.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use rand::Rng;
use serde::Serialize;

use crate::complex::{load_complex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::graph::{shortest_path_tree, Graph, SpanningTree};
use crate::homology::integer_kernel_basis;

pub type Perm = Vec<usize>;

pub fn is_permutation(p: &[usize], d: usize) -> bool {
    if p.len() != d {
        return false;
    }
    let mut seen = vec![false; d];
    p.iter().all(|&x| x < d && !std::mem::replace(&mut seen[x], true))
}

pub fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// `(a ∘ b)[s] = a[b[s]]`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn identity_perm(d: usize) -> Perm {
    (0..d).collect()
}

/// True when the group generated by `gens` acts transitively on `0..d`.
pub fn is_transitive(gens: &[Perm], d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let mut seen = vec![false; d];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(s) = stack.pop() {
        for g in gens {
            for t in [g[s], invert(g)[s]] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen.into_iter().all(|x| x)
}

/// Unordered adjacency of two top cells through a shared facet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualEdge {
    pub lo: usize,
    pub hi: usize,
    pub facet: usize,
}

/// Adjacencies of top cells, sorted by `(lo, hi)`.
pub fn base_dual_edges(base: &SimplicialComplex) -> Vec<DualEdge> {
    let dim = base.dim();
    if dim == 0 {
        return Vec::new();
    }
    let mut by_facet: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (t, cell) in base.top_cells().iter().enumerate() {
        for i in 0..cell.len() {
            let mut f = cell.clone();
            f.remove(i);
            by_facet.entry(base.index_of(&f).expect("closed")).or_default().push(t);
        }
    }
    let mut edges = Vec::new();
    for (facet, tops) in by_facet {
        for (i, &a) in tops.iter().enumerate() {
            for &b in &tops[i + 1..] {
                edges.push(DualEdge { lo: a.min(b), hi: a.max(b), facet });
            }
        }
    }
    edges.sort_by_key(|e| (e.lo, e.hi));
    edges
}

#[derive(Clone, Debug)]
pub struct PermutationCoverSpec {
    degree: usize,
    base: SimplicialComplex,
    dual: Vec<DualEdge>,
    /// Permutation for the direction lo → hi of each adjacency.
    perms: Vec<Perm>,
}

impl PermutationCoverSpec {
    /// `entries` maps ordered pairs of top-cell indices to permutations. A pair
    /// and its reverse may both be given, in which case they must be inverse.
    /// Adjacencies without an entry are an error unless `default_identity`.
    pub fn new(
        degree: usize,
        base: SimplicialComplex,
        entries: &[((usize, usize), Perm)],
        default_identity: bool,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidCover("degree must be positive".into()));
        }
        let dual = base_dual_edges(&base);
        let lookup: HashMap<(usize, usize), usize> = dual.iter().enumerate().map(|(i, e)| ((e.lo, e.hi), i)).collect();
        let mut perms: Vec<Option<Perm>> = vec![None; dual.len()];
        for ((a, b), p) in entries {
            if !is_permutation(p, degree) {
                return Err(Error::InvalidCover(format!("{p:?} is not a permutation of 0..{degree}")));
            }
            let key = ((*a).min(*b), (*a).max(*b));
            let Some(&e) = lookup.get(&key) else {
                return Err(Error::InvalidCover(format!("top cells {a} and {b} are not adjacent")));
            };
            let forward = if a < b { p.clone() } else { invert(p) };
            match &perms[e] {
                Some(prev) if *prev != forward => {
                    return Err(Error::InvalidCover(format!(
                        "permutations for {a}->{b} and its reverse are not inverse"
                    )))
                }
                _ => perms[e] = Some(forward),
            }
        }
        let perms = perms
            .into_iter()
            .enumerate()
            .map(|(e, p)| match p {
                Some(p) => Ok(p),
                None if default_identity => Ok(identity_perm(degree)),
                None => Err(Error::InvalidCover(format!(
                    "no permutation for adjacency {}-{}",
                    dual[e].lo, dual[e].hi
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { degree, base, dual, perms })
    }

    /// Spec with permutation `f(lo, hi)` on each adjacency lo → hi.
    pub fn from_fn(degree: usize, base: SimplicialComplex, mut f: impl FnMut(usize, usize) -> Perm) -> Result<Self> {
        let entries: Vec<_> = base_dual_edges(&base).iter().map(|e| ((e.lo, e.hi), f(e.lo, e.hi))).collect();
        Self::new(degree, base, &entries, false)
    }

    pub fn trivial(base: SimplicialComplex, degree: usize) -> Self {
        Self::from_fn(degree, base, |_, _| identity_perm(degree)).expect("identity permutations are valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn dual_edges(&self) -> &[DualEdge] {
        &self.dual
    }

    pub fn num_labels(&self) -> usize {
        2 * self.dual.len()
    }

    /// `(from, to)` top cells of an ordered adjacency label.
    pub fn label_endpoints(&self, label: usize) -> Option<(usize, usize)> {
        let e = self.dual.get(label / 2)?;
        Some(if label % 2 == 0 { (e.lo, e.hi) } else { (e.hi, e.lo) })
    }

    pub fn label_perm(&self, label: usize) -> Perm {
        let p = &self.perms[label / 2];
        if label % 2 == 0 {
            p.clone()
        } else {
            invert(p)
        }
    }

    /// Label of the ordered adjacency `from → to`, if adjacent.
    pub fn label_of(&self, from: usize, to: usize) -> Option<usize> {
        let key = (from.min(to), from.max(to));
        let e = self.dual.binary_search_by_key(&key, |e| (e.lo, e.hi)).ok()?;
        Some(2 * e + usize::from(from > to))
    }

    pub fn tile(&self, cell: usize, sheet: usize) -> usize {
        cell * self.degree + sheet
    }

    pub fn tile_parts(&self, tile: usize) -> (usize, usize) {
        (tile / self.degree, tile % self.degree)
    }

    /// Moves a tile across one labelled adjacency.
    pub fn apply_label(&self, tile: usize, label: usize) -> Result<usize> {
        let (cell, sheet) = self.tile_parts(tile);
        match self.label_endpoints(label) {
            Some((from, to)) if from == cell => Ok(self.tile(to, self.label_perm(label)[sheet])),
            _ => Err(Error::BadLabel { label, tile }),
        }
    }

    /// Tiles visited by a word, starting with `tile`.
    pub fn walk(&self, tile: usize, word: &[usize]) -> Result<Vec<usize>> {
        let mut path = vec![tile];
        let mut cur = tile;
        for &l in word {
            cur = self.apply_label(cur, l)?;
            path.push(cur);
        }
        Ok(path)
    }

    /// Dual graph of the pulled-back tiling; vertex `σ·d + s` is tile (σ, s).
    /// Edge `e·d + s` joins (lo, s) to (hi, perm[s]) of adjacency `e`.
    pub fn schreier_graph(&self) -> Graph {
        let d = self.degree;
        let mut g = Graph::new(self.base.num_cells(self.base.dim()) * d);
        for (e, edge) in self.dual.iter().enumerate() {
            for s in 0..d {
                g.add_edge(edge.lo * d + s, edge.hi * d + self.perms[e][s], 2 * e, 2 * e + 1);
            }
        }
        g
    }

    /// Holonomy permutations of the co-tree adjacencies after gauge-fixing
    /// sheets along a spanning tree of the base dual graph. The cover of a
    /// base with connected dual graph is connected iff these act transitively.
    pub fn monodromy_generators(&self) -> Result<Vec<Perm>> {
        let n = self.base.num_cells(self.base.dim());
        let mut g = Graph::new(n);
        for (e, edge) in self.dual.iter().enumerate() {
            g.add_edge(edge.lo, edge.hi, 2 * e, 2 * e + 1);
        }
        let tree = shortest_path_tree(&g, 0)?;
        let mut gauge: Vec<Perm> = vec![identity_perm(self.degree); n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (tree.depth[v], v));
        for &v in &order {
            if let Some((u, e)) = tree.parent[v] {
                let label = g.label_from(e, u);
                gauge[v] = compose(&self.label_perm(label), &gauge[u]);
            }
        }
        let tree_edges = tree.tree_edges();
        Ok((0..self.dual.len())
            .filter(|e| tree_edges.binary_search(e).is_err())
            .map(|e| {
                let (lo, hi) = (self.dual[e].lo, self.dual[e].hi);
                compose(&invert(&gauge[hi]), &compose(&self.perms[e], &gauge[lo]))
            })
            .collect())
    }

    /// Transitivity of the group generated by the raw adjacency permutations.
    pub fn adjacency_group_transitive(&self) -> bool {
        is_transitive(&self.perms, self.degree)
    }

    pub fn monodromy_transitive(&self) -> Result<bool> {
        Ok(is_transitive(&self.monodromy_generators()?, self.degree))
    }
}

/// Pulled-back complex together with its projection data.
#[derive(Clone, Debug)]
pub struct Cover {
    pub spec: PermutationCoverSpec,
    pub complex: SimplicialComplex,
    /// For each dimension, base index of every cover cell.
    pub projection: Vec<Vec<usize>>,
    /// Cover top-cell index of each tile `σ·d + s`.
    pub tile_to_top: Vec<usize>,
    /// Tile of each cover top cell.
    pub top_to_tile: Vec<usize>,
    /// Number of connected components of the cover.
    pub components: usize,
    /// `(base vertex index, base top cell)` → cover vertex id for each sheet.
    vertex_lift: HashMap<(usize, usize), Vec<usize>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            y = std::mem::replace(&mut self.0[y], r);
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn nonempty_faces(cell: &[usize]) -> Vec<Vec<usize>> {
    let n = cell.len();
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| cell[i]).collect())
        .collect()
}

/// Builds the cover complex. Lower cells are identified by following the
/// permutations around each cell; a sheet of a cell must be reached from
/// every top cell containing it exactly once.
pub fn build_cover(spec: &PermutationCoverSpec) -> Result<Cover> {
    let base = &spec.base;
    let d = spec.degree;
    let dim = base.dim();
    let tops = base.top_cells();
    // slots: (dimension, cell index, top cell)
    let mut slot_of: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut slots: Vec<(usize, usize, usize)> = Vec::new();
    for (t, cell) in tops.iter().enumerate() {
        for face in nonempty_faces(cell) {
            let key = (face.len() - 1, base.index_of(&face).expect("closed"), t);
            slot_of.entry(key).or_insert_with(|| {
                slots.push(key);
                slots.len() - 1
            });
        }
    }
    for q in 0..dim {
        for c in 0..base.num_cells(q) {
            if !tops.iter().enumerate().any(|(t, _)| slot_of.contains_key(&(q, c, t))) {
                return Err(Error::InvalidCover(format!("base cell {:?} lies in no top cell", base.cells(q)[c])));
            }
        }
    }
    let mut uf = UnionFind((0..slots.len() * d).collect());
    for (e, edge) in spec.dual.iter().enumerate() {
        let facet = &base.cells(dim - 1)[edge.facet];
        for face in nonempty_faces(facet) {
            let key = |t| (face.len() - 1, base.index_of(&face).unwrap(), t);
            let a = slot_of[&key(edge.lo)];
            let b = slot_of[&key(edge.hi)];
            for s in 0..d {
                uf.union(a * d + s, b * d + spec.perms[e][s]);
            }
        }
    }
    // consistency: each class meets every slot of its base cell exactly once
    let mut slots_of_cell: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, &(q, c, _)) in slots.iter().enumerate() {
        slots_of_cell.entry((q, c)).or_default().push(i);
    }
    for (&(q, c), ss) in &slots_of_cell {
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &slot in ss {
            for s in 0..d {
                classes.entry(uf.find(slot * d + s)).or_default().push(slot);
            }
        }
        let ok = classes.len() == d && classes.values().all(|v| v.len() == ss.len());
        if !ok {
            return Err(Error::InvalidCover(format!(
                "orbit closure failure at base cell {:?}: {} sheet classes for degree {d}",
                base.cells(q)[c],
                classes.len()
            )));
        }
    }
    // vertex labels: sheet in the lowest-index top cell containing the vertex
    let mut vertex_lift: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for i in 0..base.num_cells(0) {
        let ss = &slots_of_cell[&(0, i)];
        let first = ss[0];
        let label_of_root: HashMap<usize, usize> = (0..d).map(|s| (uf.find(first * d + s), s)).collect();
        for &slot in ss {
            let lifts = (0..d).map(|s| i * d + label_of_root[&uf.find(slot * d + s)]).collect();
            vertex_lift.insert((i, slots[slot].2), lifts);
        }
    }
    let lift = |cell: &[usize], top: usize, sheet: usize| -> Vec<usize> {
        cell.iter()
            .map(|v| {
                let i = base.index_of(&[*v]).expect("vertex");
                vertex_lift[&(i, top)][sheet]
            })
            .collect()
    };
    let mut cells: Vec<Vec<Vec<usize>>> = vec![Vec::new(); dim + 1];
    for (&(q, c), ss) in slots_of_cell.iter().filter(|((q, _), _)| *q < dim) {
        let slot = ss[0];
        let top = slots[slot].2;
        for s in 0..d {
            cells[q].push(lift(&base.cells(q)[c], top, s));
        }
    }
    let mut seen_top = Vec::new();
    for (t, cell) in tops.iter().enumerate() {
        for s in 0..d {
            let l = lift(cell, t, s);
            cells[dim].push(l.clone());
            seen_top.push(l);
        }
    }
    let labels = base
        .labels()
        .iter()
        .filter(|(c, _)| c.len() == 1)
        .flat_map(|(c, name)| {
            let i = base.index_of(c).unwrap();
            (0..d).map(move |s| (vec![i * d + s], format!("{name}#{s}")))
        })
        .collect();
    let complex = load_complex(Some(dim), cells, labels)
        .map_err(|e| Error::InvalidCover(format!("lifted cells do not form a complex: {e}")))?
        .complex;
    let base_vertex = |v: usize| base.cells(0)[v / d][0];
    let projection: Vec<Vec<usize>> = (0..=dim)
        .map(|q| {
            complex
                .cells(q)
                .iter()
                .map(|c| base.index_of(&c.iter().map(|&v| base_vertex(v)).collect::<Vec<_>>()).expect("projects"))
                .collect()
        })
        .collect();
    let tile_to_top: Vec<usize> = seen_top.iter().map(|c| complex.index_of(c).unwrap()).collect();
    let mut top_to_tile = vec![0; tile_to_top.len()];
    for (tile, &top) in tile_to_top.iter().enumerate() {
        top_to_tile[top] = tile;
    }
    let components = skeleton_components(&complex);
    Ok(Cover { spec: spec.clone(), complex, projection, tile_to_top, top_to_tile, components, vertex_lift })
}

fn skeleton_components(k: &SimplicialComplex) -> usize {
    let n = k.num_cells(0);
    let edges: Vec<(usize, usize)> = k
        .cells(1)
        .iter()
        .map(|e| (k.index_of(&e[..1]).unwrap(), k.index_of(&e[1..]).unwrap()))
        .collect();
    Graph::from_edges(n, &edges).components().1
}

impl Cover {
    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    pub fn degree(&self) -> usize {
        self.spec.degree
    }

    /// Vertex tuple of the lift of base cell `cell` lying in tile `tile`.
    pub fn lift_in_tile(&self, cell: &[usize], tile: usize) -> Vec<usize> {
        let (top, sheet) = self.spec.tile_parts(tile);
        cell.iter()
            .map(|v| {
                let i = self.spec.base.index_of(&[*v]).expect("vertex");
                self.vertex_lift[&(i, top)][sheet]
            })
            .collect()
    }

    /// Cover facet shared by the two tiles of an ordered adjacency crossing.
    pub fn crossing_facet(&self, tile: usize, label: usize) -> Result<Vec<usize>> {
        let e = &self.spec.dual[label / 2];
        if self.spec.label_endpoints(label).map(|(f, _)| f) != Some(self.spec.tile_parts(tile).0) {
            return Err(Error::BadLabel { label, tile });
        }
        let facet = self.spec.base.cells(self.spec.base.dim() - 1)[e.facet].clone();
        Ok(self.lift_in_tile(&facet, tile))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TileRecord {
    pub tile: usize,
    pub base_cell: usize,
    pub sheet: usize,
    pub access_word: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FacePairing {
    pub source_tile: usize,
    pub target_tile: usize,
    /// Cover facet glued by the pairing (vertex tuple).
    pub facet: Vec<usize>,
    /// Closed word at the root tile: access(source) · crossing · access(target)⁻¹.
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDomain {
    pub root: usize,
    pub tiles: Vec<TileRecord>,
    pub pairings: Vec<FacePairing>,
    /// Facet incidences of the tile union not glued by a tree edge.
    pub boundary_facets: usize,
    /// Facets of the cover lying in a single top cell (never paired).
    pub free_facets: Vec<Vec<usize>>,
}

pub fn inverse_word(word: &[usize]) -> Vec<usize> {
    word.iter().rev().map(|&l| l ^ 1).collect()
}

/// Tree-type fundamental domain of a cover from a spanning tree of its
/// Schreier graph.
pub fn tree_fundamental_domain(cover: &Cover, tree: &SpanningTree) -> Result<FundamentalDomain> {
    let spec = &cover.spec;
    let g = spec.schreier_graph();
    if tree.parent.len() != g.num_vertices() {
        return Err(Error::ShapeMismatch("tree does not span the Schreier graph".into()));
    }
    let tiles = (0..g.num_vertices())
        .map(|t| {
            let (base_cell, sheet) = spec.tile_parts(t);
            TileRecord { tile: t, base_cell, sheet, access_word: tree.access_words[t].clone() }
        })
        .collect();
    let tree_edges = tree.tree_edges();
    let mut pairings = Vec::new();
    for (idx, edge) in g.edges().iter().enumerate() {
        if tree_edges.binary_search(&idx).is_ok() {
            continue;
        }
        let mut word = tree.access_words[edge.a].clone();
        word.push(edge.label_ab);
        word.extend(inverse_word(&tree.access_words[edge.b]));
        pairings.push(FacePairing {
            source_tile: edge.a,
            target_tile: edge.b,
            facet: cover.crossing_facet(edge.a, edge.label_ab)?,
            word,
        });
    }
    let dim = cover.complex.dim();
    let incidences = g.num_vertices() * (dim + 1);
    let boundary_facets = incidences - 2 * tree_edges.len();
    let free_facets = if dim == 0 {
        Vec::new()
    } else {
        cover.complex.cells(dim - 1).iter().filter(|f| cover.complex.cofaces(f).len() == 1).cloned().collect()
    };
    Ok(FundamentalDomain { root: tree.root, tiles, pairings, boundary_facets, free_facets })
}

impl FundamentalDomain {
    /// Checks that every pairing word carries the root to the source tile,
    /// crosses to the target tile and returns to the root.
    pub fn verify_words(&self, spec: &PermutationCoverSpec) -> Result<()> {
        for p in &self.pairings {
            let path = spec.walk(self.root, &p.word)?;
            let k = self.tiles[p.source_tile].access_word.len();
            if path[k] != p.source_tile || path[k + 1] != p.target_tile || *path.last().unwrap() != self.root {
                return Err(Error::InvalidCover(format!(
                    "pairing word {:?} does not map tile {} to tile {}",
                    p.word, p.source_tile, p.target_tile
                )));
            }
        }
        Ok(())
    }
}

/// Random ℤ/d-cyclic cover from an integral 1-cocycle of the base.
pub fn random_cyclic_cover<R: Rng>(base: &SimplicialComplex, d: usize, rng: &mut R) -> Result<PermutationCoverSpec> {
    let cocycles = integer_kernel_basis(&base.boundary_or_zero(2).transpose());
    let ne = base.num_cells(1);
    let mut phi = vec![0i64; ne];
    for z in &cocycles {
        let c = rng.random_range(0..d as i64);
        for (x, zi) in phi.iter_mut().zip(z) {
            *x += c * zi.to_i64().ok_or_else(|| Error::Numerical("cocycle entry overflow".into()))?;
        }
    }
    cyclic_cover_from_cocycle(base, d, &phi)
}

/// ℤ/d cover defined by a 1-cocycle `phi` (one value per edge).
pub fn cyclic_cover_from_cocycle(base: &SimplicialComplex, d: usize, phi: &[i64]) -> Result<PermutationCoverSpec> {
    if phi.len() != base.num_cells(1) {
        return Err(Error::ShapeMismatch("cocycle length differs from edge count".into()));
    }
    let dm = d as i64;
    let delta = base.boundary_or_zero(2).transpose().mul_vec_i64(phi);
    if delta.iter().any(|x| x.rem_euclid(dm) != 0) {
        return Err(Error::InvalidCover("edge values are not a cocycle mod d".into()));
    }
    let along = |a: usize, b: usize| -> i64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Less => phi[base.index_of(&[a, b]).unwrap()],
            std::cmp::Ordering::Greater => -phi[base.index_of(&[b, a]).unwrap()],
        }
    };
    let dim = base.dim();
    let tops = base.top_cells().to_vec();
    let dual = base_dual_edges(base);
    let entries: Vec<_> = dual
        .iter()
        .map(|e| {
            let a = base.cells(dim - 1)[e.facet][0];
            let shift = (along(tops[e.lo][0], a) - along(tops[e.hi][0], a)).rem_euclid(dm) as usize;
            ((e.lo, e.hi), (0..d).map(|s| (s + shift) % d).collect())
        })
        .collect();
    PermutationCoverSpec::new(d, base.clone(), &entries, false)
}

/// Random permutation on each adjacency of a one-dimensional base, where any
/// choice is consistent.
pub fn random_graph_cover<R: Rng>(base: &SimplicialComplex, d: usize, rng: &mut R) -> Result<PermutationCoverSpec> {
    use rand::seq::SliceRandom;
    if base.dim() != 1 {
        return Err(Error::InvalidParameter("random permutations need a one-dimensional base".into()));
    }
    PermutationCoverSpec::from_fn(d, base.clone(), |_, _| {
        let mut p = identity_perm(d);
        p.shuffle(rng);
        p
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::graph_diameter;
    use crate::homology::betti_numbers;
    use crate::triangulations::{cycle, tetrahedron_boundary, torus7};

    fn three_cycle(d: usize) -> Perm {
        (0..d).map(|s| (s + 1) % d).collect()
    }

    #[test]
    fn trivial_cover_is_a_copy() {
        let base = torus7();
        let cover = build_cover(&PermutationCoverSpec::trivial(base.clone(), 1)).unwrap();
        assert_eq!(cover.complex.cell_counts(), base.cell_counts());
        assert!(cover.is_connected());
        let two = build_cover(&PermutationCoverSpec::trivial(base, 2)).unwrap();
        assert_eq!(two.components, 2);
    }

    #[test]
    fn cyclic_circle_cover() {
        let spec = PermutationCoverSpec::from_fn(3, cycle(3), |_, _| three_cycle(3)).unwrap();
        let cover = build_cover(&spec).unwrap();
        assert_eq!(cover.complex.cell_counts(), vec![9, 9]);
        assert!(cover.is_connected());
        assert!(cover.complex.cells(0).iter().all(|v| cover.complex.cofaces(v).len() == 2));
        let g = spec.schreier_graph();
        assert_eq!(g.num_vertices(), 9);
        assert_eq!(graph_diameter(&g).unwrap(), 4);
        let tree = shortest_path_tree(&g, 0).unwrap();
        let fd = tree_fundamental_domain(&cover, &tree).unwrap();
        assert_eq!(fd.pairings.len(), 1);
        fd.verify_words(&spec).unwrap();
    }

    #[test]
    fn torus_double_cover() {
        let base = torus7();
        // find a cocycle that is not a coboundary mod 2
        let cocycles = integer_kernel_basis(&base.boundary_or_zero(2).transpose());
        let spec = cocycles
            .iter()
            .map(|z| z.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>())
            .map(|phi| cyclic_cover_from_cocycle(&base, 2, &phi).unwrap())
            .find(|s| build_cover(s).unwrap().is_connected())
            .expect("some cocycle is nontrivial");
        let cover = build_cover(&spec).unwrap();
        assert_eq!(cover.complex.euler_characteristic(), 0);
        assert_eq!(betti_numbers(&cover.complex), vec![1, 2, 1]);
        let tree = shortest_path_tree(&spec.schreier_graph(), 0).unwrap();
        let fd = tree_fundamental_domain(&cover, &tree).unwrap();
        let g = spec.schreier_graph();
        assert_eq!(fd.pairings.len(), g.num_edges() - g.num_vertices() + 1);
        assert_eq!(fd.boundary_facets, 2 * fd.pairings.len());
        fd.verify_words(&spec).unwrap();
    }

    #[test]
    fn inconsistent_permutation_is_rejected() {
        let base = tetrahedron_boundary();
        let spec = PermutationCoverSpec::new(2, base, &[((0, 1), vec![1, 0])], true).unwrap();
        assert!(matches!(build_cover(&spec), Err(Error::InvalidCover(_))));
        let g = spec.schreier_graph();
        assert_eq!(g.num_vertices(), 8);
        assert!(g.is_connected());
    }

    #[test]
    fn spec_validation() {
        let base = cycle(3);
        assert!(PermutationCoverSpec::new(2, base.clone(), &[((0, 1), vec![0, 0])], true).is_err());
        assert!(PermutationCoverSpec::new(2, base.clone(), &[], false).is_err());
        let p = vec![1, 2, 0];
        let entries = [((0, 1), p.clone()), ((1, 0), p.clone())];
        assert!(PermutationCoverSpec::new(3, base.clone(), &entries, true).is_err());
        let entries = [((0, 1), p.clone()), ((1, 0), invert(&p))];
        assert!(PermutationCoverSpec::new(3, base, &entries, true).is_ok());
    }

    #[test]
    fn raw_transitivity_is_not_connectivity() {
        // Two top cells, one adjacency carrying a transposition: the raw
        // generators are transitive but the cover falls apart.
        let base = SimplicialComplex::from_simplices(&[vec![0, 1], vec![1, 2]]).unwrap();
        let spec = PermutationCoverSpec::new(2, base, &[((0, 1), vec![1, 0])], false).unwrap();
        let cover = build_cover(&spec).unwrap();
        assert!(spec.adjacency_group_transitive());
        assert!(!cover.is_connected());
        assert!(!spec.monodromy_transitive().unwrap());
    }
}
