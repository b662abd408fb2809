//! Crossing events on a sampled configuration.
//!
//! The union-find engine links every open-open edge once, then answers the
//! event query from the origin's root. For the one-arm event the boundary is
//! merged into a single virtual terminal. The two-arm event scans the two
//! arcs against the origin's root instead: a shared terminal per arc would let
//! an unrelated cluster touching both arcs bridge the origin across.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::lattice::Vertex;
use crate::sim::config::{Event, OpenConfiguration};
use crate::sim::dsu::DisjointSets;

/// Reusable per-worker state for the union-find engine.
#[derive(Debug, Default)]
pub struct Scratch {
    sets: DisjointSets,
}

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Link all open-open edges; index `n` is left free as a terminal.
fn link_open_sites(cfg: &OpenConfiguration, sets: &mut DisjointSets) {
    let g = cfg.geometry();
    let open = cfg.flags();
    sets.reset(g.len() + 1);
    for (i, _) in open.iter().enumerate().filter(|(_, &o)| o) {
        for &j in g.forward_neighbors(i) {
            if open[j as usize] {
                sets.union(i, j as usize);
            }
        }
    }
}

pub fn one_arm_with(cfg: &OpenConfiguration, scratch: &mut Scratch) -> bool {
    if !cfg.origin_open() {
        return false;
    }
    let g = cfg.geometry();
    if g.k() == 0 {
        return true;
    }
    let sets = &mut scratch.sets;
    link_open_sites(cfg, sets);
    let terminal = g.len();
    for &b in g.boundary() {
        if cfg.is_open_index(b as usize) {
            sets.union(terminal, b as usize);
        }
    }
    sets.connected(g.origin_index(), terminal)
}

pub fn two_arm_with(cfg: &OpenConfiguration, scratch: &mut Scratch) -> bool {
    if !cfg.origin_open() {
        return false;
    }
    let g = cfg.geometry();
    let sets = &mut scratch.sets;
    link_open_sites(cfg, sets);
    let root = sets.find(g.origin_index());
    let mut touches = |arc: &[u32]| {
        arc.iter()
            .any(|&i| cfg.is_open_index(i as usize) && sets.find(i as usize) == root)
    };
    touches(g.arc_plus()) && touches(g.arc_minus())
}

pub fn event_with(cfg: &OpenConfiguration, event: Event, scratch: &mut Scratch) -> bool {
    match event {
        Event::OneArm => one_arm_with(cfg, scratch),
        Event::TwoArm => two_arm_with(cfg, scratch),
    }
}

/// Origin joined through open sites to a site at graph distance `k`.
pub fn one_arm(cfg: &OpenConfiguration) -> bool {
    one_arm_with(cfg, &mut Scratch::new())
}

/// Origin joined through open sites to both `A_k` and `A_-k`.
pub fn two_arm(cfg: &OpenConfiguration) -> bool {
    two_arm_with(cfg, &mut Scratch::new())
}

/// Union-find verdict for an arbitrary pair of sites.
pub fn union_find_connected(cfg: &OpenConfiguration, a: Vertex, b: Vertex) -> Result<bool> {
    let (ia, ib) = pair_indices(cfg, a, b)?;
    if !cfg.is_open_index(ia) || !cfg.is_open_index(ib) {
        return Ok(false);
    }
    let mut sets = DisjointSets::default();
    link_open_sites(cfg, &mut sets);
    Ok(sets.connected(ia, ib))
}

fn pair_indices(cfg: &OpenConfiguration, a: Vertex, b: Vertex) -> Result<(usize, usize)> {
    let g = cfg.geometry();
    let ia = g.index_of(a).ok_or(Error::OutOfBall(a))?;
    let ib = g.index_of(b).ok_or(Error::OutOfBall(b))?;
    Ok((ia, ib))
}

/// Breadth-first search over open sites; reference for the union-find engine.
pub fn connectivity_oracle(cfg: &OpenConfiguration, a: Vertex, b: Vertex) -> Result<bool> {
    let (ia, ib) = pair_indices(cfg, a, b)?;
    Ok(bfs_reach(cfg, ia)[ib])
}

/// Sites reachable from `start` through open sites (empty if `start` is closed).
pub fn bfs_reach(cfg: &OpenConfiguration, start: usize) -> Vec<bool> {
    let g = cfg.geometry();
    let mut seen = vec![false; g.len()];
    if !cfg.is_open_index(start) {
        return seen;
    }
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &j in g.neighbors(i) {
            let j = j as usize;
            if !seen[j] && cfg.is_open_index(j) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::lattice::LatticeVariant;
    use crate::sim::config::{sample_configuration, SimConfig};
    use crate::sim::geometry::BallGeometry;

    fn geom(k: u64, v: LatticeVariant) -> Arc<BallGeometry> {
        Arc::new(BallGeometry::new(k, v).unwrap())
    }

    fn v(a1: i64, a2: i64) -> Vertex {
        Vertex::new(a1, a2)
    }

    #[test]
    fn full_and_empty() {
        for variant in LatticeVariant::ALL {
            let g = geom(5, variant);
            let full = OpenConfiguration::from_flags(g.clone(), vec![true; g.len()]).unwrap();
            assert!(one_arm(&full));
            assert!(two_arm(&full));
            let lone = OpenConfiguration::from_open_set(g, [Vertex::ORIGIN]).unwrap();
            assert!(!one_arm(&lone));
            assert!(!two_arm(&lone));
        }
    }

    #[test]
    fn diagonal_chain_on_tri_up() {
        let g = geom(2, LatticeVariant::TriUp);
        let chain = [v(0, 0), v(1, 1), v(2, 2)];
        let cfg = OpenConfiguration::from_open_set(g, chain).unwrap();
        assert!(one_arm(&cfg));
        // (2,2) has norm 4, so it is not on A_2
        assert!(!two_arm(&cfg));
        let z = geom(2, LatticeVariant::Z2);
        let cfg = OpenConfiguration::from_open_set(z, [v(0, 0), v(1, 1)]).unwrap();
        assert!(!one_arm(&cfg));
    }

    #[test]
    fn closed_origin_never_connects() {
        let g = geom(3, LatticeVariant::TriUp);
        let mut cfg = OpenConfiguration::from_flags(g.clone(), vec![true; g.len()]).unwrap();
        cfg.set_open(Vertex::ORIGIN, false).unwrap();
        assert!(!one_arm(&cfg));
        assert!(!two_arm(&cfg));
    }

    #[test]
    fn half_ball_misses_negative_arc() {
        let g = geom(6, LatticeVariant::TriUp);
        let half: Vec<Vertex> = g
            .vertices()
            .iter()
            .copied()
            .filter(|u| u.a1 + u.a2 >= 0)
            .collect();
        let cfg = OpenConfiguration::from_open_set(g, half).unwrap();
        assert!(one_arm(&cfg));
        assert!(!two_arm(&cfg));
    }

    #[test]
    fn separate_cluster_cannot_bridge_arcs() {
        // origin reaches A_3 only; another cluster spans A_3 to A_-3
        let g = geom(3, LatticeVariant::Z2);
        let mine = [v(0, 0), v(1, 0), v(2, 0), v(3, 0)];
        let other = [
            v(0, 3),
            v(0, 2),
            v(-1, 2),
            v(-1, 1),
            v(-2, 1),
            v(-2, 0),
            v(-2, -1),
            v(-3, 0),
        ];
        let cfg = OpenConfiguration::from_open_set(g, mine.into_iter().chain(other)).unwrap();
        assert!(one_arm(&cfg));
        assert!(!two_arm(&cfg));
        assert!(!connectivity_oracle(&cfg, v(0, 0), v(-3, 0)).unwrap());
        assert!(connectivity_oracle(&cfg, v(0, 3), v(-3, 0)).unwrap());
    }

    #[test]
    fn oracle_basics() {
        let g = geom(4, LatticeVariant::Z2);
        let full = OpenConfiguration::from_flags(g.clone(), vec![true; g.len()]).unwrap();
        assert!(connectivity_oracle(&full, v(-4, 0), v(0, 4)).unwrap());
        assert!(connectivity_oracle(&full, v(1, 1), v(1, 1)).unwrap());
        assert!(matches!(
            connectivity_oracle(&full, v(5, 0), v(0, 0)),
            Err(Error::OutOfBall(_))
        ));
        let closed = OpenConfiguration::closed(g);
        assert!(!connectivity_oracle(&closed, v(1, 1), v(1, 1)).unwrap());
    }

    #[test]
    fn union_find_agrees_with_search() {
        for variant in LatticeVariant::ALL {
            let g = geom(8, variant);
            let cfg = SimConfig::new(variant, 8, 0.6, 40, 11);
            for t in 0..40 {
                let c = sample_configuration(&cfg, &g, t).unwrap();
                let reach = bfs_reach(&c, g.origin_index());
                for &b in g.boundary() {
                    let bv = g.vertex(b as usize);
                    assert_eq!(
                        union_find_connected(&c, Vertex::ORIGIN, bv).unwrap(),
                        reach[b as usize]
                    );
                }
                let one = g.boundary().iter().any(|&b| reach[b as usize]);
                assert_eq!(one_arm(&c), one);
                let two = g.arc_plus().iter().any(|&b| reach[b as usize])
                    && g.arc_minus().iter().any(|&b| reach[b as usize]);
                assert_eq!(two_arm(&c), two);
                assert!(!two_arm(&c) || one_arm(&c));
                assert_eq!(two_arm(&c.negated()), two_arm(&c));
            }
        }
    }
}
