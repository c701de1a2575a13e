//! Grid regions: the arenas every simulation runs on.
//!
//! A region is a rectangular grid of wall/free cells with one or more
//! designated entry cells. All free cells must form a single 4-connected
//! component; anything outside the grid counts as wall, so region documents
//! need no explicit border.
//!
//! Regions can be parsed from a small ASCII format (`#` wall, `.` free,
//! `E` free entry cell; conventional extension `.rgn`) or produced by the
//! built-in generators ([`generate_region`]).

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// One of the four principal compass directions, numbered so that
/// `|d - d.opposite()| == 2` (East=1, North=2, West=3, South=4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    East = 1,
    North = 2,
    West = 3,
    South = 4,
}

/// All four directions in slot order (East, North, West, South).
pub const DIRECTIONS: [Direction; 4] = [
    Direction::East,
    Direction::North,
    Direction::West,
    Direction::South,
];

impl Direction {
    /// Slot number 1..=4 used by the sensing neighborhood.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Direction> {
        match i {
            1 => Some(Direction::East),
            2 => Some(Direction::North),
            3 => Some(Direction::West),
            4 => Some(Direction::South),
            _ => None,
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::East => Direction::West,
            Direction::North => Direction::South,
            Direction::West => Direction::East,
            Direction::South => Direction::North,
        }
    }

    /// Grid offset with row 0 at the top, so North decreases `y`.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::East => (1, 0),
            Direction::North => (0, -1),
            Direction::West => (-1, 0),
            Direction::South => (0, 1),
        }
    }

    /// Accepts `e/n/w/s`, full names, or the slot numbers 1..=4.
    pub fn parse(s: &str) -> Option<Direction> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "east" | "1" => Some(Direction::East),
            "n" | "north" | "2" => Some(Direction::North),
            "w" | "west" | "3" => Some(Direction::West),
            "s" | "south" | "4" => Some(Direction::South),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::East => "E",
            Direction::North => "N",
            Direction::West => "W",
            Direction::South => "S",
        };
        f.write_str(s)
    }
}

/// Grid coordinate, `(col, row)` with the origin at the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub fn new(x: i32, y: i32) -> Cell {
        Cell { x, y }
    }

    pub fn step(self, d: Direction) -> Cell {
        let (dx, dy) = d.offset();
        Cell::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Wall,
    Free,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegionError {
    #[error("empty region document")]
    EmptyDocument,
    #[error("illegal character {ch:?} at line {line}, column {column}")]
    IllegalCharacter { line: usize, column: usize, ch: char },
    #[error("region has no entry point")]
    NoEntryPoint,
    #[error("free cells are not 4-connected: {a} is unreachable from {b}")]
    DisconnectedFreeCells { a: Cell, b: Cell },
    #[error("entry point {0} is not a free cell")]
    EntryOnWall(Cell),
    #[error("duplicate entry point {0}")]
    DuplicateEntryPoint(Cell),
    #[error("cell buffer length {got} does not match {width}x{height}")]
    BadDimensions { width: usize, height: usize, got: usize },
    #[error("{shape} generator requires size >= 1 (got {size})")]
    SizeTooSmall { shape: GeneratedShape, size: usize },
}

/// Shapes understood by [`generate_region`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratedShape {
    /// A 1-cell-wide corridor of `size` cells, entry at the left end.
    Linear,
    /// A `size` x `size` open square, entry at the top-left corner.
    Square,
    /// A horizontal spine with `size` teeth of depth 5 hanging below it,
    /// entry at the spine's left end.
    Comb,
}

impl fmt::Display for GeneratedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GeneratedShape::Linear => "linear",
            GeneratedShape::Square => "square",
            GeneratedShape::Comb => "comb",
        };
        f.write_str(s)
    }
}

impl GeneratedShape {
    pub fn parse(s: &str) -> Option<GeneratedShape> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "lin" => Some(GeneratedShape::Linear),
            "square" | "sq" => Some(GeneratedShape::Square),
            "comb" => Some(GeneratedShape::Comb),
            _ => None,
        }
    }
}

/// A validated grid region.
///
/// Immutable after construction and safe to share read-only across
/// concurrent simulation workers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    width: usize,
    height: usize,
    cells: Vec<CellKind>,
    entry_points: Vec<Cell>,
    free_count: usize,
}

impl Region {
    /// Builds a region from a row-major cell buffer, validating every
    /// invariant (dimensions, entries on distinct free cells, 4-connectivity).
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<CellKind>,
        entry_points: Vec<Cell>,
    ) -> Result<Region, RegionError> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(RegionError::BadDimensions { width, height, got: cells.len() });
        }
        let free_count = cells.iter().filter(|k| **k == CellKind::Free).count();
        let region = Region { width, height, cells, entry_points, free_count };
        if region.entry_points.is_empty() {
            return Err(RegionError::NoEntryPoint);
        }
        for (i, &ep) in region.entry_points.iter().enumerate() {
            if !region.is_free(ep) {
                return Err(RegionError::EntryOnWall(ep));
            }
            if region.entry_points[..i].contains(&ep) {
                return Err(RegionError::DuplicateEntryPoint(ep));
            }
        }
        region.check_connected()?;
        Ok(region)
    }

    /// Parses the ASCII region format: `#` wall, `.` free, `E` free entry.
    ///
    /// Lines may use LF or CRLF endings; shorter lines are right-padded with
    /// wall. Entry points are collected in reading order.
    pub fn parse(text: &str) -> Result<Region, RegionError> {
        let mut lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
        while lines.last().is_some_and(|l| l.is_empty()) {
            lines.pop();
        }
        if lines.is_empty() {
            return Err(RegionError::EmptyDocument);
        }
        let width = lines.iter().map(|l| l.chars().count()).max().unwrap();
        if width == 0 {
            return Err(RegionError::EmptyDocument);
        }
        let height = lines.len();
        let mut cells = vec![CellKind::Wall; width * height];
        let mut entry_points = Vec::new();
        for (y, line) in lines.iter().enumerate() {
            for (x, ch) in line.chars().enumerate() {
                let kind = match ch {
                    '#' => CellKind::Wall,
                    '.' => CellKind::Free,
                    'E' => {
                        entry_points.push(Cell::new(x as i32, y as i32));
                        CellKind::Free
                    }
                    _ => {
                        return Err(RegionError::IllegalCharacter { line: y + 1, column: x + 1, ch })
                    }
                };
                cells[y * width + x] = kind;
            }
        }
        if entry_points.is_empty() {
            return Err(RegionError::NoEntryPoint);
        }
        Region::new(width, height, cells, entry_points)
    }

    /// Renders back to the ASCII format. `parse(render(r)) == r`.
    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let c = Cell::new(x as i32, y as i32);
                let ch = if self.entry_points.contains(&c) {
                    'E'
                } else if self.is_free(c) {
                    '.'
                } else {
                    '#'
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of free cells, `n`.
    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn entry_points(&self) -> &[Cell] {
        &self.entry_points
    }

    /// Coordinates outside the grid are wall.
    pub fn kind(&self, c: Cell) -> CellKind {
        if c.x < 0 || c.y < 0 || c.x as usize >= self.width || c.y as usize >= self.height {
            CellKind::Wall
        } else {
            self.cells[c.y as usize * self.width + c.x as usize]
        }
    }

    pub fn is_free(&self, c: Cell) -> bool {
        self.kind(c) == CellKind::Free
    }

    /// Dense index of a cell for per-cell bookkeeping arrays.
    pub fn index(&self, c: Cell) -> usize {
        debug_assert!(self.is_free(c) || self.kind(c) == CellKind::Wall);
        c.y as usize * self.width + c.x as usize
    }

    /// Free neighbor in direction `d`, if any.
    pub fn neighbor(&self, c: Cell, d: Direction) -> Option<Cell> {
        let v = c.step(d);
        self.is_free(v).then_some(v)
    }

    /// Number of free neighbors of a free cell.
    pub fn degree(&self, c: Cell) -> usize {
        DIRECTIONS.iter().filter(|&&d| self.neighbor(c, d).is_some()).count()
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter_map(move |x| {
                let c = Cell::new(x as i32, y as i32);
                self.is_free(c).then_some(c)
            })
        })
    }

    /// BFS distances from `from` over free cells, indexed by [`Region::index`].
    /// Unreachable or wall cells hold `None`.
    pub fn bfs_distances(&self, from: Cell) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.width * self.height];
        if !self.is_free(from) {
            return dist;
        }
        dist[self.index(from)] = Some(0);
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            let d = dist[self.index(c)].unwrap();
            for dir in DIRECTIONS {
                if let Some(v) = self.neighbor(c, dir) {
                    let slot = &mut dist[self.index(v)];
                    if slot.is_none() {
                        *slot = Some(d + 1);
                        queue.push_back(v);
                    }
                }
            }
        }
        dist
    }

    fn check_connected(&self) -> Result<(), RegionError> {
        let start = match self.free_cells().next() {
            Some(c) => c,
            None => return Err(RegionError::NoEntryPoint),
        };
        let dist = self.bfs_distances(start);
        for c in self.free_cells() {
            if dist[self.index(c)].is_none() {
                return Err(RegionError::DisconnectedFreeCells { a: c, b: start });
            }
        }
        Ok(())
    }
}

/// Builds one of the stock benchmark regions.
pub fn generate_region(shape: GeneratedShape, size: usize) -> Result<Region, RegionError> {
    if size == 0 {
        return Err(RegionError::SizeTooSmall { shape, size });
    }
    match shape {
        GeneratedShape::Linear => {
            Region::new(size, 1, vec![CellKind::Free; size], vec![Cell::new(0, 0)])
        }
        GeneratedShape::Square => {
            Region::new(size, size, vec![CellKind::Free; size * size], vec![Cell::new(0, 0)])
        }
        GeneratedShape::Comb => {
            // A spine along the top row with `size` teeth of depth 5 at even
            // columns; n = 7*size - 1.
            let width = 2 * size - 1;
            let height = 6;
            let mut cells = vec![CellKind::Wall; width * height];
            for x in 0..width {
                cells[x] = CellKind::Free;
            }
            for y in 1..height {
                for x in (0..width).step_by(2) {
                    cells[y * width + x] = CellKind::Free;
                }
            }
            Region::new(width, height, cells, vec![Cell::new(0, 0)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let r = Region::parse("E.").unwrap();
        assert_eq!((r.width(), r.height()), (2, 1));
        assert_eq!(r.free_count(), 2);
        assert_eq!(r.entry_points(), &[Cell::new(0, 0)]);
    }

    #[test]
    fn parse_rejects_diagonal_components() {
        let err = Region::parse("E#\n#.").unwrap_err();
        assert!(matches!(err, RegionError::DisconnectedFreeCells { .. }));
    }

    #[test]
    fn parse_two_by_two() {
        let r = Region::parse("E.\n..").unwrap();
        assert_eq!(r.free_count(), 4);
        assert_eq!(r.degree(Cell::new(0, 0)), 2);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Region::parse("").unwrap_err(), RegionError::EmptyDocument);
        assert_eq!(Region::parse("..\n..").unwrap_err(), RegionError::NoEntryPoint);
        assert_eq!(
            Region::parse("E.\n.x").unwrap_err(),
            RegionError::IllegalCharacter { line: 2, column: 2, ch: 'x' }
        );
    }

    #[test]
    fn short_lines_pad_with_wall() {
        let r = Region::parse("E..\n.").unwrap();
        assert_eq!((r.width(), r.height()), (3, 2));
        assert_eq!(r.free_count(), 4);
        assert!(!r.is_free(Cell::new(1, 1)));
    }

    #[test]
    fn crlf_accepted() {
        assert_eq!(Region::parse("E.\r\n..\r\n").unwrap(), Region::parse("E.\n..").unwrap());
    }

    #[test]
    fn generators() {
        let lin = generate_region(GeneratedShape::Linear, 120).unwrap();
        assert_eq!(lin.free_count(), 120);
        assert_eq!(lin.degree(lin.entry_points()[0]), 1);

        let sq = generate_region(GeneratedShape::Square, 21).unwrap();
        assert_eq!(sq.free_count(), 441);

        let sq2 = generate_region(GeneratedShape::Square, 2).unwrap();
        assert_eq!(sq2.free_count(), 4);

        let comb = generate_region(GeneratedShape::Comb, 4).unwrap();
        assert_eq!(comb.free_count(), 7 * 4 - 1);

        for shape in [GeneratedShape::Linear, GeneratedShape::Square, GeneratedShape::Comb] {
            assert!(matches!(
                generate_region(shape, 0),
                Err(RegionError::SizeTooSmall { .. })
            ));
        }
    }

    #[test]
    fn linear_degree_profile() {
        for n in 2..=12 {
            let r = generate_region(GeneratedShape::Linear, n).unwrap();
            let deg1 = r.free_cells().filter(|&c| r.degree(c) == 1).count();
            assert_eq!(deg1, 2);
            assert!(r.free_cells().all(|c| r.degree(c) <= 2));
        }
    }

    #[test]
    fn direction_opposites() {
        for d in DIRECTIONS {
            assert_eq!((d.index() as i32 - d.opposite().index() as i32).abs(), 2);
        }
    }

    #[test]
    fn bfs_reaches_all_free_cells() {
        for (shape, size) in [
            (GeneratedShape::Linear, 7),
            (GeneratedShape::Square, 5),
            (GeneratedShape::Comb, 3),
        ] {
            let r = generate_region(shape, size).unwrap();
            let dist = r.bfs_distances(r.entry_points()[0]);
            let reached = r.free_cells().filter(|&c| dist[r.index(c)].is_some()).count();
            assert_eq!(reached, r.free_count());
        }
    }
}
