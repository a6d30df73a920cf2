//! Undirected graphs with a single optional self-loop slot per vertex, and
//! the arc table that indexes the walk's state space.
//!
//! Lattice vertices are numbered row-major: for dims `[d0, d1, d2]` the
//! vertex at `(x0, x1, x2)` has id `(x0 * d1 + x1) * d2 + x2`.

use std::ops::Range;

use crate::error::{Error, Result};

/// Boundary condition for lattice builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Wrap-around in every axis (torus).
    #[default]
    Periodic,
    Open,
}

/// Shape metadata kept for graphs produced by [`build_lattice`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeShape {
    pub dims: Vec<usize>,
    pub boundary: Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
    has_loop: Vec<bool>,
    lattice: Option<LatticeShape>,
}

impl Graph {
    /// Builds a graph from per-vertex neighbor lists, checking every invariant:
    /// symmetric adjacency, no self entries, no duplicates and no isolated
    /// loop-free vertex. Neighbor lists are sorted on the way in.
    pub fn new(mut neighbors: Vec<Vec<usize>>, has_loop: Vec<bool>) -> Result<Self> {
        let n = neighbors.len();
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if has_loop.len() != n {
            return Err(Error::InvalidGraph(format!(
                "{} loop flags for {} vertices",
                has_loop.len(),
                n
            )));
        }
        for (j, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate neighbor at vertex {j}"
                )));
            }
            if let Some(&k) = list.iter().find(|&&k| k >= n) {
                return Err(Error::InvalidGraph(format!(
                    "vertex {j} lists neighbor {k} outside 0..{n}"
                )));
            }
            if list.binary_search(&j).is_ok() {
                return Err(Error::InvalidGraph(format!(
                    "vertex {j} appears in its own neighbor list"
                )));
            }
            if list.is_empty() && !has_loop[j] {
                return Err(Error::InvalidGraph(format!("vertex {j} is isolated")));
            }
        }
        for (j, list) in neighbors.iter().enumerate() {
            for &k in list {
                if neighbors[k].binary_search(&j).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {j}->{k} has no reverse {k}->{j}"
                    )));
                }
            }
        }
        Ok(Graph {
            neighbors,
            has_loop,
            lattice: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.neighbors[j]
    }

    /// Number of non-loop neighbors.
    pub fn degree(&self, j: usize) -> usize {
        self.neighbors[j].len()
    }

    pub fn has_loop(&self, j: usize) -> bool {
        self.has_loop[j]
    }

    pub fn loop_count(&self) -> usize {
        self.has_loop.iter().filter(|&&l| l).count()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn lattice_shape(&self) -> Option<&LatticeShape> {
        self.lattice.as_ref()
    }

    /// Same topology with the loop slot set (or cleared) on every vertex.
    pub fn with_loops(&self, with_loop: bool) -> Result<Self> {
        let mut g = Graph::new(self.neighbors.clone(), vec![with_loop; self.vertex_count()])?;
        g.lattice = self.lattice.clone();
        Ok(g)
    }

    /// Copy of this graph with every loop slot removed.
    pub fn without_loops(&self) -> Result<Self> {
        self.with_loops(false)
    }
}

/// Complete graph on `n` vertices.
pub fn build_complete(n: usize, with_loop: bool) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!(
            "complete graph needs at least 2 vertices, got {n}"
        )));
    }
    let neighbors = (0..n)
        .map(|j| (0..n).filter(|&k| k != j).collect())
        .collect();
    Graph::new(neighbors, vec![with_loop; n])
}

/// 2D or 3D hypercubic lattice, row-major vertex order.
pub fn build_lattice(dims: &[usize], boundary: Boundary, with_loop: bool) -> Result<Graph> {
    if !(2..=3).contains(&dims.len()) {
        return Err(Error::UnsupportedDimension(dims.len()));
    }
    let min = match boundary {
        Boundary::Periodic => 3,
        Boundary::Open => 2,
    };
    if let Some(&d) = dims.iter().find(|&&d| d < min) {
        return Err(Error::InvalidSize(format!(
            "lattice side {d} is below the minimum of {min} for {boundary:?} boundaries"
        )));
    }

    let n: usize = dims.iter().product();
    let strides: Vec<usize> = (0..dims.len())
        .map(|a| dims[a + 1..].iter().product())
        .collect();

    let mut neighbors = Vec::with_capacity(n);
    let mut coord = vec![0usize; dims.len()];
    for v in 0..n {
        let mut rem = v;
        for (a, &s) in strides.iter().enumerate() {
            coord[a] = rem / s;
            rem %= s;
        }
        let mut list = Vec::with_capacity(2 * dims.len());
        for (a, &side) in dims.iter().enumerate() {
            let x = coord[a];
            let base = v - x * strides[a];
            match boundary {
                Boundary::Periodic => {
                    list.push(base + ((x + side - 1) % side) * strides[a]);
                    list.push(base + ((x + 1) % side) * strides[a]);
                }
                Boundary::Open => {
                    if x > 0 {
                        list.push(base + (x - 1) * strides[a]);
                    }
                    if x + 1 < side {
                        list.push(base + (x + 1) * strides[a]);
                    }
                }
            }
        }
        neighbors.push(list);
    }

    let mut g = Graph::new(neighbors, vec![with_loop; n])?;
    g.lattice = Some(LatticeShape {
        dims: dims.to_vec(),
        boundary,
    });
    Ok(g)
}

/// Parses a whitespace-separated edge list. Each non-empty line holds two
/// 0-based vertex ids; `u u` sets the loop slot of `u`. Lines starting with
/// `#` are comments. Duplicate and reversed lines collapse.
pub fn load_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    let mut max_id = None::<usize>;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two vertex ids, found {} tokens", tokens.len()),
            });
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&tokens) {
            *slot = tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: if tok.starts_with('-') {
                    format!("negative vertex id {tok:?}")
                } else {
                    format!("vertex id {tok:?} is not a non-negative integer")
                },
            })?;
        }
        let [u, v] = ids;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            loops.push(u);
        } else {
            edges.push((u, v));
        }
    }
    let n = max_id.map_or(0, |m| m + 1);
    let mut neighbors = vec![Vec::new(); n];
    for (u, v) in edges {
        neighbors[u].push(v);
        neighbors[v].push(u);
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    let mut has_loop = vec![false; n];
    for u in loops {
        has_loop[u] = true;
    }
    Graph::new(neighbors, has_loop)
}

/// A directed arc `(source, direction)`; `source == direction` is the loop arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub source: usize,
    pub direction: usize,
}

impl Arc {
    pub fn is_loop(&self) -> bool {
        self.source == self.direction
    }
}

/// Canonical arc indexing. Vertices are laid out in ascending order, each
/// vertex's neighbor arcs ascending by direction, then its loop arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcTable {
    arcs: Vec<Arc>,
    offsets: Vec<usize>,
    reverse: Vec<usize>,
    has_loop: Vec<bool>,
}

impl ArcTable {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let total: usize = (0..n).map(|j| g.degree(j) + g.has_loop(j) as usize).sum();
        let mut arcs = Vec::with_capacity(total);
        let mut offsets = Vec::with_capacity(n + 1);
        for j in 0..n {
            offsets.push(arcs.len());
            arcs.extend(g.neighbors(j).iter().map(|&k| Arc {
                source: j,
                direction: k,
            }));
            if g.has_loop(j) {
                arcs.push(Arc {
                    source: j,
                    direction: j,
                });
            }
        }
        offsets.push(arcs.len());

        let mut table = ArcTable {
            arcs,
            offsets,
            reverse: Vec::new(),
            has_loop: (0..n).map(|j| g.has_loop(j)).collect(),
        };
        table.reverse = table
            .arcs
            .iter()
            .enumerate()
            .map(|(id, a)| {
                if a.is_loop() {
                    id
                } else {
                    table
                        .index_of(a.direction, a.source)
                        .expect("graph adjacency is symmetric")
                }
            })
            .collect();
        table
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> Arc {
        self.arcs[id]
    }

    /// Contiguous id range of the arcs leaving `j`.
    pub fn vertex_slice(&self, j: usize) -> Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    pub fn has_loop(&self, j: usize) -> bool {
        self.has_loop[j]
    }

    /// Number of non-loop arcs leaving `j`.
    pub fn degree(&self, j: usize) -> usize {
        self.vertex_slice(j).len() - self.has_loop[j] as usize
    }

    pub fn loop_arc(&self, j: usize) -> Option<usize> {
        self.has_loop[j].then(|| self.offsets[j + 1] - 1)
    }

    pub fn index_of(&self, source: usize, direction: usize) -> Option<usize> {
        if source >= self.vertex_count() {
            return None;
        }
        if source == direction {
            return self.loop_arc(source);
        }
        let range = self.vertex_slice(source);
        let end = range.end - self.has_loop[source] as usize;
        self.arcs[range.start..end]
            .binary_search_by_key(&direction, |a| a.direction)
            .ok()
            .map(|i| range.start + i)
    }

    /// Id of the reversed arc; loop arcs map to themselves.
    pub fn reverse(&self, id: usize) -> usize {
        self.reverse[id]
    }

    /// The reversal permutation as a slice (the flip-flop shift).
    pub fn reverse_permutation(&self) -> &[usize] {
        &self.reverse
    }
}

pub fn build_arc_table(g: &Graph) -> ArcTable {
    ArcTable::new(g)
}
