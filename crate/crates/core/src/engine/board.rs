//! Standard 19-hex board: fixed topology plus the randomized layout.
//!
//! The topology is derived from pointy-top hexagon geometry on integer
//! coordinates: a hex at axial `(q, r)` has its center at `(2q + r, 3r)`
//! and its corners at the six offsets below. Intersections are the
//! distinct corners, paths the distinct corner pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::{HarborKind, HexId, IntersectionId, PathId, Resource};

pub const NUM_HEXES: usize = 19;
pub const NUM_PATHS: usize = 72;
pub const NUM_INTERSECTIONS: usize = 54;
pub const NUM_HARBORS: usize = 9;

/// Corner offsets, clockwise from the top corner.
pub const CORNER_OFFSETS: [(i32, i32); 6] = [(0, -2), (1, -1), (1, 1), (0, 2), (-1, 1), (-1, -1)];

/// Indices into the clockwise coastline at which harbors sit.
const HARBOR_COAST_SLOTS: [usize; NUM_HARBORS] = [0, 3, 7, 10, 13, 17, 20, 23, 27];

/// Adjacency tables of the standard board. Identical for every game.
#[derive(Debug)]
pub struct Topology {
    /// Axial coordinates `(q, r)` of each hex, row-major by `r` then `q`.
    pub hex_axial: [(i32, i32); NUM_HEXES],
    /// Corners of each hex, clockwise from the top (see [`CORNER_OFFSETS`]).
    pub hex_intersections: [[IntersectionId; 6]; NUM_HEXES],
    /// `hex_paths[h][i]` joins corners `i` and `i + 1`.
    pub hex_paths: [[PathId; 6]; NUM_HEXES],
    pub path_intersections: [[IntersectionId; 2]; NUM_PATHS],
    pub path_hexes: Vec<Vec<HexId>>,
    pub intersection_paths: Vec<Vec<PathId>>,
    pub intersection_hexes: Vec<Vec<HexId>>,
    pub intersection_neighbors: Vec<Vec<IntersectionId>>,
    /// Geometric position of each intersection in the integer frame.
    pub intersection_pos: [(i32, i32); NUM_INTERSECTIONS],
    /// Coastal paths in clockwise order.
    pub coast: Vec<PathId>,
    pub harbor_paths: [PathId; NUM_HARBORS],
    /// Harbor slot touching each intersection.
    pub intersection_harbor: [Option<u8>; NUM_INTERSECTIONS],
}

impl Topology {
    pub fn standard() -> &'static Topology {
        static TOPOLOGY: OnceLock<Topology> = OnceLock::new();
        TOPOLOGY.get_or_init(Topology::build)
    }

    fn build() -> Topology {
        let mut axial = Vec::new();
        for r in -2i32..=2 {
            for q in -2i32..=2 {
                if (q + r).abs() <= 2 {
                    axial.push((q, r));
                }
            }
        }
        assert_eq!(axial.len(), NUM_HEXES);

        let corner = |(q, r): (i32, i32), i: usize| {
            let (dx, dy) = CORNER_OFFSETS[i];
            (2 * q + r + dx, 3 * r + dy)
        };

        // Intersections ordered by (y, x).
        let mut positions = BTreeSet::new();
        for &h in &axial {
            for i in 0..6 {
                let (x, y) = corner(h, i);
                positions.insert((y, x));
            }
        }
        let pos_to_id: BTreeMap<(i32, i32), u8> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u8))
            .collect();
        assert_eq!(pos_to_id.len(), NUM_INTERSECTIONS);

        let mut intersection_pos = [(0, 0); NUM_INTERSECTIONS];
        for (&(y, x), &id) in &pos_to_id {
            intersection_pos[id as usize] = (x, y);
        }

        let mut hex_intersections = [[IntersectionId(0); 6]; NUM_HEXES];
        for (h, &ax) in axial.iter().enumerate() {
            for i in 0..6 {
                let (x, y) = corner(ax, i);
                hex_intersections[h][i] = IntersectionId(pos_to_id[&(y, x)]);
            }
        }

        // Paths ordered by midpoint (y, x); doubled midpoints stay integral.
        let mut edges = BTreeMap::new();
        for corners in &hex_intersections {
            for i in 0..6 {
                let a = corners[i].0;
                let b = corners[(i + 1) % 6].0;
                let (a, b) = (a.min(b), a.max(b));
                let (ax, ay) = intersection_pos[a as usize];
                let (bx, by) = intersection_pos[b as usize];
                edges.insert((ay + by, ax + bx), (a, b));
            }
        }
        assert_eq!(edges.len(), NUM_PATHS);
        let mut path_intersections = [[IntersectionId(0); 2]; NUM_PATHS];
        let mut pair_to_path = BTreeMap::new();
        for (i, &(a, b)) in edges.values().enumerate() {
            path_intersections[i] = [IntersectionId(a), IntersectionId(b)];
            pair_to_path.insert((a, b), i as u8);
        }

        let mut hex_paths = [[PathId(0); 6]; NUM_HEXES];
        let mut path_hexes = vec![Vec::new(); NUM_PATHS];
        let mut intersection_hexes = vec![Vec::new(); NUM_INTERSECTIONS];
        for h in 0..NUM_HEXES {
            for i in 0..6 {
                let a = hex_intersections[h][i].0;
                let b = hex_intersections[h][(i + 1) % 6].0;
                let p = pair_to_path[&(a.min(b), a.max(b))];
                hex_paths[h][i] = PathId(p);
                path_hexes[p as usize].push(HexId(h as u8));
                intersection_hexes[a as usize].push(HexId(h as u8));
            }
        }

        let mut intersection_paths = vec![Vec::new(); NUM_INTERSECTIONS];
        let mut intersection_neighbors = vec![Vec::new(); NUM_INTERSECTIONS];
        for (p, &[a, b]) in path_intersections.iter().enumerate() {
            intersection_paths[a.index()].push(PathId(p as u8));
            intersection_paths[b.index()].push(PathId(p as u8));
            intersection_neighbors[a.index()].push(b);
            intersection_neighbors[b.index()].push(a);
        }

        // Clockwise coastline, starting from the path nearest to due west.
        let mut coast: Vec<(f64, PathId)> = (0..NUM_PATHS)
            .filter(|&p| path_hexes[p].len() == 1)
            .map(|p| {
                let [a, b] = path_intersections[p];
                let (ax, ay) = intersection_pos[a.index()];
                let (bx, by) = intersection_pos[b.index()];
                let x = f64::from(ax + bx) * 3f64.sqrt() / 2.0;
                let y = f64::from(ay + by) * 0.5;
                // y grows downwards, so increasing atan2 runs clockwise on screen.
                (y.atan2(x), PathId(p as u8))
            })
            .collect();
        coast.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coast: Vec<PathId> = coast.into_iter().map(|(_, p)| p).collect();
        assert_eq!(coast.len(), 30);

        let harbor_paths = HARBOR_COAST_SLOTS.map(|i| coast[i]);
        let mut intersection_harbor = [None; NUM_INTERSECTIONS];
        for (slot, p) in harbor_paths.iter().enumerate() {
            for i in path_intersections[p.index()] {
                intersection_harbor[i.index()] = Some(slot as u8);
            }
        }

        let mut hex_axial = [(0, 0); NUM_HEXES];
        hex_axial.copy_from_slice(&axial);

        Topology {
            hex_axial,
            hex_intersections,
            hex_paths,
            path_intersections,
            path_hexes,
            intersection_paths,
            intersection_hexes,
            intersection_neighbors,
            intersection_pos,
            coast,
            harbor_paths,
            intersection_harbor,
        }
    }
}

/// Randomized part of a board: terrain, number tokens and harbor kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoardLayout {
    /// `None` is the desert.
    pub hex_kind: [Option<Resource>; NUM_HEXES],
    /// Number token per hex; 0 on the desert.
    pub number_token: [u8; NUM_HEXES],
    /// Harbor kind at each of the standard coastal slots.
    pub harbor_kind: [HarborKind; NUM_HARBORS],
}

pub const TERRAIN_INVENTORY: [(Option<Resource>, usize); 6] = [
    (None, 1),
    (Some(Resource::Lumber), 4),
    (Some(Resource::Wool), 4),
    (Some(Resource::Grain), 4),
    (Some(Resource::Brick), 3),
    (Some(Resource::Ore), 3),
];

pub const TOKEN_INVENTORY: [u8; 18] = [2, 3, 3, 4, 4, 5, 5, 6, 6, 8, 8, 9, 9, 10, 10, 11, 11, 12];

/// Shuffles the standard terrain, token and harbor inventories.
pub fn generate_board<R: Rng + ?Sized>(rng: &mut R) -> BoardLayout {
    let mut kinds: Vec<Option<Resource>> = TERRAIN_INVENTORY
        .iter()
        .flat_map(|&(k, n)| std::iter::repeat_n(k, n))
        .collect();
    kinds.shuffle(rng);
    let mut tokens = TOKEN_INVENTORY;
    tokens.shuffle(rng);
    let mut harbors: Vec<HarborKind> = std::iter::repeat_n(HarborKind::Generic, 4)
        .chain(Resource::ALL.iter().map(|&r| HarborKind::Special(r)))
        .collect();
    harbors.shuffle(rng);

    let mut hex_kind = [None; NUM_HEXES];
    let mut number_token = [0; NUM_HEXES];
    let mut next_token = tokens.iter();
    for (h, kind) in kinds.into_iter().enumerate() {
        hex_kind[h] = kind;
        if kind.is_some() {
            number_token[h] = *next_token.next().expect("18 tokens for 18 producing hexes");
        }
    }
    let mut harbor_kind = [HarborKind::Generic; NUM_HARBORS];
    harbor_kind.copy_from_slice(&harbors);
    BoardLayout {
        hex_kind,
        number_token,
        harbor_kind,
    }
}

impl BoardLayout {
    pub fn topology(&self) -> &'static Topology {
        Topology::standard()
    }

    pub fn desert(&self) -> HexId {
        let h = self
            .hex_kind
            .iter()
            .position(Option::is_none)
            .expect("layout has a desert");
        HexId(h as u8)
    }

    /// Harbor reachable from an intersection, if any.
    pub fn harbor_at(&self, i: IntersectionId) -> Option<HarborKind> {
        self.topology().intersection_harbor[i.index()].map(|slot| self.harbor_kind[slot as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn topology_counts_and_degrees() {
        let t = Topology::standard();
        assert_eq!(t.intersection_paths.len(), NUM_INTERSECTIONS);
        for i in 0..NUM_INTERSECTIONS {
            let d = t.intersection_paths[i].len();
            assert!(d == 2 || d == 3, "intersection {i} has degree {d}");
            assert_eq!(t.intersection_neighbors[i].len(), d);
            assert!((1..=3).contains(&t.intersection_hexes[i].len()));
        }
        for p in 0..NUM_PATHS {
            assert!((1..=2).contains(&t.path_hexes[p].len()));
        }
        // Euler characteristic of a disc: V - E + F = 1.
        assert_eq!(
            NUM_INTERSECTIONS as i64 - NUM_PATHS as i64 + NUM_HEXES as i64,
            1
        );
    }

    #[test]
    fn adjacency_is_symmetric() {
        let t = Topology::standard();
        for h in 0..NUM_HEXES {
            for p in t.hex_paths[h] {
                assert!(t.path_hexes[p.index()].contains(&HexId(h as u8)));
                let [a, b] = t.path_intersections[p.index()];
                assert!(t.hex_intersections[h].contains(&a));
                assert!(t.hex_intersections[h].contains(&b));
            }
            for i in t.hex_intersections[h] {
                assert!(t.intersection_hexes[i.index()].contains(&HexId(h as u8)));
            }
        }
        for i in 0..NUM_INTERSECTIONS {
            for n in &t.intersection_neighbors[i] {
                assert!(t.intersection_neighbors[n.index()].contains(&IntersectionId(i as u8)));
            }
        }
    }

    #[test]
    fn harbors_sit_on_distinct_coastal_intersections() {
        let t = Topology::standard();
        let mut seen = BTreeSet::new();
        for p in t.harbor_paths {
            assert_eq!(t.path_hexes[p.index()].len(), 1);
            for i in t.path_intersections[p.index()] {
                assert!(seen.insert(i), "harbor intersections overlap");
            }
        }
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn generated_inventory_matches_rulebook() {
        for seed in 0..50 {
            let b = generate_board(&mut ChaCha8Rng::seed_from_u64(seed));
            for &(kind, n) in &TERRAIN_INVENTORY {
                assert_eq!(b.hex_kind.iter().filter(|&&k| k == kind).count(), n);
            }
            let mut tokens: Vec<u8> = b.number_token.iter().copied().filter(|&t| t != 0).collect();
            tokens.sort_unstable();
            assert_eq!(tokens, TOKEN_INVENTORY.to_vec());
            assert_eq!(b.number_token[b.desert().index()], 0);
            assert_eq!(
                b.harbor_kind
                    .iter()
                    .filter(|&&k| k == HarborKind::Generic)
                    .count(),
                4
            );
        }
    }

    #[test]
    fn same_seed_same_board() {
        let a = generate_board(&mut ChaCha8Rng::seed_from_u64(7));
        let b = generate_board(&mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }
}
