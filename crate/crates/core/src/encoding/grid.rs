//! Brick-coordinate embedding of the board into an 11 x 21 grid.
//!
//! Hexes are laid out as 2-wide bricks, five rows offset by one unit
//! (row offsets 2, 1, 0, 1, 2). Brick `k` of row `R` spans wall
//! coordinates `x in [off(R) + 2k, off(R) + 2k + 2]`, `y in [R, R + 1]`.
//! Doubling the wall coordinates gives the fine grid: wall vertex `(x, y)`
//! sits at cell `(2y, 2x)`, a path at the midpoint of its two endpoints and
//! a hex at `(2R + 1, 2 off(R) + 4k + 2)`. A 3-row by 5-column window
//! centered on a hex then covers exactly its six corners and six sides.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::engine::board::{Topology, NUM_HEXES, NUM_INTERSECTIONS, NUM_PATHS};
use crate::engine::{HexId, IntersectionId, PathId};

pub const ROWS: usize = 11;
pub const COLS: usize = 21;
pub const CELLS: usize = ROWS * COLS;

/// Row offsets of the five brick rows.
const ROW_OFFSET: [usize; 5] = [2, 1, 0, 1, 2];

/// Kernel height and width.
pub const KERNEL_ROWS: usize = 3;
pub const KERNEL_COLS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellType {
    Empty,
    Hex,
    Path,
    Intersection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn flat(self) -> usize {
        self.row * COLS + self.col
    }

    pub fn from_flat(i: usize) -> Cell {
        Cell {
            row: i / COLS,
            col: i % COLS,
        }
    }
}

/// Cell types plus bijections between board elements and grid cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrickGrid {
    cell_type: [CellType; CELLS],
    /// Element id occupying each cell (meaning depends on `cell_type`).
    cell_element: [u8; CELLS],
    hex_cell: [Cell; NUM_HEXES],
    path_cell: [Cell; NUM_PATHS],
    intersection_cell: [Cell; NUM_INTERSECTIONS],
}

impl BrickGrid {
    /// Shared immutable grid.
    pub fn standard() -> &'static BrickGrid {
        static GRID: OnceLock<BrickGrid> = OnceLock::new();
        GRID.get_or_init(build_brick_grid)
    }

    pub fn cell_type(&self, cell: Cell) -> CellType {
        self.cell_type[cell.flat()]
    }

    pub fn cell_type_flat(&self, i: usize) -> CellType {
        self.cell_type[i]
    }

    pub fn hex_cell(&self, h: HexId) -> Cell {
        self.hex_cell[h.index()]
    }

    pub fn path_cell(&self, p: PathId) -> Cell {
        self.path_cell[p.index()]
    }

    pub fn intersection_cell(&self, i: IntersectionId) -> Cell {
        self.intersection_cell[i.index()]
    }

    pub fn hex_at(&self, cell: Cell) -> Option<HexId> {
        (self.cell_type(cell) == CellType::Hex).then(|| HexId(self.cell_element[cell.flat()]))
    }

    pub fn path_at(&self, cell: Cell) -> Option<PathId> {
        (self.cell_type(cell) == CellType::Path).then(|| PathId(self.cell_element[cell.flat()]))
    }

    pub fn intersection_at(&self, cell: Cell) -> Option<IntersectionId> {
        (self.cell_type(cell) == CellType::Intersection)
            .then(|| IntersectionId(self.cell_element[cell.flat()]))
    }

    pub fn count(&self, t: CellType) -> usize {
        self.cell_type.iter().filter(|&&c| c == t).count()
    }

    /// Cells inside the kernel window centered on `center`, clipped to the grid.
    pub fn window(&self, center: Cell) -> impl Iterator<Item = Cell> {
        let r0 = center.row.saturating_sub(KERNEL_ROWS / 2);
        let r1 = (center.row + KERNEL_ROWS / 2).min(ROWS - 1);
        let c0 = center.col.saturating_sub(KERNEL_COLS / 2);
        let c1 = (center.col + KERNEL_COLS / 2).min(COLS - 1);
        (r0..=r1).flat_map(move |row| (c0..=c1).map(move |col| Cell { row, col }))
    }

    /// Grid drawing with one token per cell: `H07` hex, `P12` path,
    /// `I33` intersection, ` . ` empty.
    pub fn render_ascii(&self) -> String {
        let mut out = String::new();
        out.push_str("    ");
        for c in 0..COLS {
            let _ = write!(out, "{c:>4}");
        }
        out.push('\n');
        for r in 0..ROWS {
            let _ = write!(out, "{r:>3} ");
            for c in 0..COLS {
                let i = r * COLS + c;
                let id = self.cell_element[i];
                let token = match self.cell_type[i] {
                    CellType::Empty => "  . ".to_string(),
                    CellType::Hex => format!(" H{id:02}"),
                    CellType::Path => format!(" P{id:02}"),
                    CellType::Intersection => format!(" I{id:02}"),
                };
                out.push_str(&token);
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the brick-wall embedding of the standard board.
pub fn build_brick_grid() -> BrickGrid {
    let topo = Topology::standard();
    let unset = Cell {
        row: usize::MAX,
        col: usize::MAX,
    };
    let mut hex_cell = [unset; NUM_HEXES];
    let mut intersection_cell = [unset; NUM_INTERSECTIONS];

    for h in 0..NUM_HEXES {
        let (q, r) = topo.hex_axial[h];
        let row = (r + 2) as usize;
        let q_min = (-2).max(-2 - r);
        let k = (q - q_min) as usize;
        let a = ROW_OFFSET[row] + 2 * k;
        hex_cell[h] = Cell {
            row: 2 * row + 1,
            col: 2 * a + 2,
        };
        // Wall vertices of the brick, clockwise from the top corner.
        let wall = [
            (a + 1, row),
            (a + 2, row),
            (a + 2, row + 1),
            (a + 1, row + 1),
            (a, row + 1),
            (a, row),
        ];
        for (corner, &(x, y)) in topo.hex_intersections[h].iter().zip(wall.iter()) {
            let cell = Cell {
                row: 2 * y,
                col: 2 * x,
            };
            let slot = &mut intersection_cell[corner.index()];
            assert!(
                *slot == unset || *slot == cell,
                "inconsistent corner placement"
            );
            *slot = cell;
        }
    }

    let mut path_cell = [unset; NUM_PATHS];
    for (p, ends) in topo.path_intersections.iter().enumerate() {
        let a = intersection_cell[ends[0].index()];
        let b = intersection_cell[ends[1].index()];
        path_cell[p] = Cell {
            row: (a.row + b.row) / 2,
            col: (a.col + b.col) / 2,
        };
    }

    let mut cell_type = [CellType::Empty; CELLS];
    let mut cell_element = [0u8; CELLS];
    let mut place = |cell: Cell, t: CellType, id: usize| {
        assert!(cell.row < ROWS && cell.col < COLS, "cell outside grid");
        assert_eq!(cell_type[cell.flat()], CellType::Empty, "cell collision");
        cell_type[cell.flat()] = t;
        cell_element[cell.flat()] = id as u8;
    };
    for (h, &c) in hex_cell.iter().enumerate() {
        place(c, CellType::Hex, h);
    }
    for (p, &c) in path_cell.iter().enumerate() {
        place(c, CellType::Path, p);
    }
    for (i, &c) in intersection_cell.iter().enumerate() {
        place(c, CellType::Intersection, i);
    }

    BrickGrid {
        cell_type,
        cell_element,
        hex_cell,
        path_cell,
        intersection_cell,
    }
}
