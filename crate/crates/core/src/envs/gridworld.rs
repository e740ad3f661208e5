//! N x N gridworld. Cells are addressed with 1-based (x, y) coordinates and
//! a move that would exit the grid leaves the agent in place.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn from_index(i: usize) -> Option<Move> {
        Move::ALL.get(i).copied()
    }

    pub fn index(self) -> usize {
        match self {
            Move::Up => 0,
            Move::Down => 1,
            Move::Left => 2,
            Move::Right => 3,
        }
    }

    fn delta(self) -> (i64, i64) {
        match self {
            Move::Up => (0, 1),
            Move::Down => (0, -1),
            Move::Left => (-1, 0),
            Move::Right => (1, 0),
        }
    }
}

/// One move on an `side`-sized grid; exits are clamped to the current cell.
pub fn step_cell(side: usize, state: (i64, i64), mv: Move) -> (i64, i64) {
    let (dx, dy) = mv.delta();
    let nx = state.0 + dx;
    let ny = state.1 + dy;
    let n = side as i64;
    if nx < 1 || nx > n || ny < 1 || ny > n {
        state
    } else {
        (nx, ny)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridWorld {
    pub side: usize,
    state: (i64, i64),
}

impl GridWorld {
    pub fn new(side: usize) -> Self {
        assert!(side >= 1, "grid side must be positive");
        let mut g = GridWorld { side, state: (1, 1) };
        g.reset();
        g
    }

    /// Fixed start at the (lower) central cell.
    pub fn start_cell(&self) -> (i64, i64) {
        let c = ((self.side + 1) / 2) as i64;
        (c, c)
    }

    pub fn reset(&mut self) -> (i64, i64) {
        self.state = self.start_cell();
        self.state
    }

    pub fn state(&self) -> (i64, i64) {
        self.state
    }

    pub fn step(&mut self, mv: Move) -> (i64, i64) {
        self.state = step_cell(self.side, self.state, mv);
        self.state
    }

    pub fn num_states(&self) -> usize {
        self.side * self.side
    }

    /// Row-major cell index of a coordinate pair.
    pub fn index_of(&self, cell: (i64, i64)) -> usize {
        debug_assert!(self.in_bounds(cell), "cell {cell:?} out of bounds");
        ((cell.1 - 1) as usize) * self.side + (cell.0 - 1) as usize
    }

    pub fn cell_of(&self, index: usize) -> (i64, i64) {
        let x = (index % self.side) as i64 + 1;
        let y = (index / self.side) as i64 + 1;
        (x, y)
    }

    pub fn in_bounds(&self, cell: (i64, i64)) -> bool {
        let n = self.side as i64;
        (1..=n).contains(&cell.0) && (1..=n).contains(&cell.1)
    }

    pub fn features(&self) -> Vec<f64> {
        vec![self.state.0 as f64, self.state.1 as f64]
    }
}
