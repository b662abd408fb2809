use crate::error::{Error, Result};
use crate::lattice::{self, is_on_arc_z2, LatticeVariant, Vertex};

/// Largest ball radius the simulator will index.
pub const MAX_SIM_RADIUS: u64 = 2048;

const ABSENT: u32 = u32::MAX;

/// Fixed indexing of a graph-distance ball, with compressed adjacency.
///
/// Vertices are sorted by `(a1, a2)`; that order is the vertex index used to
/// key the random stream.
#[derive(Debug, Clone)]
pub struct BallGeometry {
    k: u64,
    variant: LatticeVariant,
    vertices: Vec<Vertex>,
    lookup: Vec<u32>,
    adj_offsets: Vec<u32>,
    adj: Vec<u32>,
    /// For each vertex the number of leading entries of its `adj` slice with
    /// a larger index; used to visit every edge once.
    fwd_len: Vec<u8>,
    origin: usize,
    boundary: Vec<u32>,
    arc_plus: Vec<u32>,
    arc_minus: Vec<u32>,
}

impl BallGeometry {
    pub fn new(k: u64, variant: LatticeVariant) -> Result<Self> {
        if k > MAX_SIM_RADIUS {
            return Err(Error::InvalidConfig(format!(
                "radius {k} exceeds the simulator limit {MAX_SIM_RADIUS}"
            )));
        }
        let vertices = lattice::ball(k, variant);
        let side = 2 * k as usize + 1;
        let mut lookup = vec![ABSENT; side * side];
        let kk = k as i64;
        for (i, v) in vertices.iter().enumerate() {
            lookup[(v.a1 + kk) as usize * side + (v.a2 + kk) as usize] = i as u32;
        }
        let mut geom = BallGeometry {
            k,
            variant,
            vertices,
            lookup,
            adj_offsets: Vec::new(),
            adj: Vec::new(),
            fwd_len: Vec::new(),
            origin: 0,
            boundary: Vec::new(),
            arc_plus: Vec::new(),
            arc_minus: Vec::new(),
        };
        geom.origin = geom
            .index_of(Vertex::ORIGIN)
            .expect("origin lies in every ball");

        let n = geom.vertices.len();
        let mut adj_offsets = Vec::with_capacity(n + 1);
        let mut adj = Vec::with_capacity(n * variant.degree());
        let mut fwd_len = Vec::with_capacity(n);
        adj_offsets.push(0u32);
        for (i, &v) in geom.vertices.iter().enumerate() {
            let mut nbrs: Vec<u32> = variant
                .steps()
                .iter()
                .filter_map(|&s| geom.index_of(v + s))
                .map(|j| j as u32)
                .collect();
            // forward neighbors first
            nbrs.sort_by_key(|&j| (j < i as u32, j));
            fwd_len.push(nbrs.iter().filter(|&&j| j > i as u32).count() as u8);
            adj.extend(nbrs);
            adj_offsets.push(adj.len() as u32);
        }
        geom.adj_offsets = adj_offsets;
        geom.adj = adj;
        geom.fwd_len = fwd_len;

        for (i, &v) in geom.vertices.iter().enumerate() {
            if variant.distance(v) == k {
                geom.boundary.push(i as u32);
            }
            if k > 0 && is_on_arc_z2(v, k) {
                geom.arc_plus.push(i as u32);
            }
            if k > 0 && is_on_arc_z2(-v, k) {
                geom.arc_minus.push(i as u32);
            }
        }
        Ok(geom)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn variant(&self) -> LatticeVariant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        self.vertices[index]
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        let kk = self.k as i64;
        if v.a1.abs() > kk || v.a2.abs() > kk {
            return None;
        }
        let side = 2 * self.k as usize + 1;
        match self.lookup[(v.a1 + kk) as usize * side + (v.a2 + kk) as usize] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    pub fn origin_index(&self) -> usize {
        self.origin
    }

    pub fn neighbors(&self, index: usize) -> &[u32] {
        &self.adj[self.adj_offsets[index] as usize..self.adj_offsets[index + 1] as usize]
    }

    /// Neighbors with a larger index.
    pub fn forward_neighbors(&self, index: usize) -> &[u32] {
        let start = self.adj_offsets[index] as usize;
        &self.adj[start..start + self.fwd_len[index] as usize]
    }

    /// Vertices at graph distance exactly `k`.
    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    /// Positive arc `A_k` of the convenient pair.
    pub fn arc_plus(&self) -> &[u32] {
        &self.arc_plus
    }

    /// Negative arc `A_-k`.
    pub fn arc_minus(&self) -> &[u32] {
        &self.arc_minus
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{arc_z2, ball_size, Sign};

    #[test]
    fn indexing_is_consistent() {
        for variant in LatticeVariant::ALL {
            let g = BallGeometry::new(6, variant).unwrap();
            assert_eq!(g.len() as u64, ball_size(6, variant));
            for (i, &v) in g.vertices().iter().enumerate() {
                assert_eq!(g.index_of(v), Some(i));
                let mut expected: Vec<usize> = lattice::neighbors(v, variant)
                    .into_iter()
                    .filter_map(|u| g.index_of(u))
                    .collect();
                let mut got: Vec<usize> = g.neighbors(i).iter().map(|&j| j as usize).collect();
                expected.sort();
                got.sort();
                assert_eq!(got, expected);
                assert!(g.forward_neighbors(i).iter().all(|&j| j as usize > i));
            }
            assert_eq!(g.vertex(g.origin_index()), Vertex::ORIGIN);
            assert_eq!(g.index_of(Vertex::new(7, 0)), None);
        }
    }

    #[test]
    fn arcs_and_boundary() {
        let g = BallGeometry::new(5, LatticeVariant::TriUp).unwrap();
        let plus: Vec<Vertex> = g.arc_plus().iter().map(|&i| g.vertex(i as usize)).collect();
        let mut expected = arc_z2(5, Sign::Plus).unwrap().vertices;
        expected.sort();
        assert_eq!(plus, expected);
        assert_eq!(g.arc_minus().len(), 6);
        assert_eq!(g.boundary().len(), 30);
        let z = BallGeometry::new(5, LatticeVariant::Z2).unwrap();
        assert_eq!(z.boundary().len(), 20);
        assert!(BallGeometry::new(MAX_SIM_RADIUS + 1, LatticeVariant::Z2).is_err());
    }
}
