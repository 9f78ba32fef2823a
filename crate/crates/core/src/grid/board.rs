//! Province graph and the standard board.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a province on the board.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Province(pub u8);

impl Province {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Player identifier, `0..num_players`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Player(pub u8);

impl Player {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A static board: adjacency over provinces plus supply-center and home
/// designations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Board {
    width: u8,
    height: u8,
    num_players: u8,
    supply_center: Vec<bool>,
    /// Which player a supply center is a home center of, if any.
    home_of: Vec<Option<Player>>,
    adjacency: Vec<Vec<Province>>,
}

impl Board {
    /// A torus grid board: every cell is adjacent to its four orthogonal
    /// neighbors with wraparound.
    pub fn torus(
        width: u8,
        height: u8,
        num_players: u8,
        supply_centers: &[u8],
        homes: &[(u8, Player)],
    ) -> Result<Board> {
        let n = width as usize * height as usize;
        if n == 0 || num_players == 0 {
            return Err(Error::contract("board needs provinces and players"));
        }
        let mut supply_center = vec![false; n];
        for &sc in supply_centers {
            supply_center[sc as usize] = true;
        }
        let mut home_of = vec![None; n];
        for &(p, player) in homes {
            if !supply_center[p as usize] {
                return Err(Error::contract("home centers must be supply centers"));
            }
            home_of[p as usize] = Some(player);
        }
        let (w, h) = (width as i32, height as i32);
        let adjacency = (0..n)
            .map(|i| {
                let (r, c) = (i as i32 / w, i as i32 % w);
                let mut adj: Vec<Province> = [
                    ((r + h - 1) % h, c),
                    ((r + 1) % h, c),
                    (r, (c + w - 1) % w),
                    (r, (c + 1) % w),
                ]
                .iter()
                .map(|&(rr, cc)| Province((rr * w + cc) as u8))
                .filter(|&p| p.index() != i)
                .collect();
                adj.sort_unstable();
                adj.dedup();
                adj
            })
            .collect();
        Ok(Board {
            width,
            height,
            num_players,
            supply_center,
            home_of,
            adjacency,
        })
    }

    /// The standard 4x4 board: 4 players, 8 supply centers (all of them home
    /// centers, two per player), rotationally symmetric starts.
    pub fn standard() -> Board {
        let homes = [
            (0, Player(0)),
            (1, Player(0)),
            (3, Player(1)),
            (7, Player(1)),
            (14, Player(2)),
            (15, Player(2)),
            (8, Player(3)),
            (12, Player(3)),
        ];
        let scs: Vec<u8> = homes.iter().map(|&(p, _)| p).collect();
        Board::torus(4, 4, 4, &scs, &homes).expect("static board")
    }

    pub fn num_provinces(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_players(&self) -> usize {
        self.num_players as usize
    }

    pub fn neighbors(&self, p: Province) -> &[Province] {
        &self.adjacency[p.index()]
    }

    pub fn is_adjacent(&self, a: Province, b: Province) -> bool {
        self.adjacency[a.index()].contains(&b)
    }

    pub fn is_supply_center(&self, p: Province) -> bool {
        self.supply_center[p.index()]
    }

    /// Whether `p` is designated a home center (of any player).
    pub fn is_home(&self, p: Province) -> bool {
        self.home_of[p.index()].is_some()
    }

    pub fn home_of(&self, p: Province) -> Option<Player> {
        self.home_of[p.index()]
    }

    pub fn provinces(&self) -> impl Iterator<Item = Province> + '_ {
        (0..self.num_provinces()).map(|i| Province(i as u8))
    }

    pub fn supply_centers(&self) -> impl Iterator<Item = Province> + '_ {
        self.provinces().filter(|&p| self.is_supply_center(p))
    }

    pub fn num_supply_centers(&self) -> usize {
        self.supply_center.iter().filter(|&&s| s).count()
    }

    pub fn home_centers(&self, player: Player) -> Vec<Province> {
        self.provinces()
            .filter(|&p| self.home_of(p) == Some(player))
            .collect()
    }

    /// Grid coordinates as `a1`..: row letter, column number.
    pub fn province_name(&self, p: Province) -> String {
        let row = p.0 / self.width;
        let col = p.0 % self.width;
        format!("{}{}", (b'a' + row) as char, col + 1)
    }

    /// Multi-source BFS distance from `sources` to every province;
    /// `u32::MAX` when unreachable or `sources` is empty.
    pub fn distances_from(&self, sources: &[Province]) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.num_provinces()];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s.index()] != 0 {
                dist[s.index()] = 0;
                queue.push_back(s);
            }
        }
        while let Some(p) = queue.pop_front() {
            let d = dist[p.index()];
            for &q in self.neighbors(p) {
                if dist[q.index()] == u32::MAX {
                    dist[q.index()] = d + 1;
                    queue.push_back(q);
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_board_shape() {
        let b = Board::standard();
        assert_eq!(b.num_provinces(), 16);
        assert_eq!(b.num_players(), 4);
        assert_eq!(b.num_supply_centers(), 8);
        for player in 0..4 {
            assert_eq!(b.home_centers(Player(player)).len(), 2);
        }
        // Torus: every province has exactly four neighbors.
        for p in b.provinces() {
            assert_eq!(b.neighbors(p).len(), 4, "{:?}", p);
        }
    }

    #[test]
    fn wraparound_adjacency() {
        let b = Board::standard();
        assert!(b.is_adjacent(Province(0), Province(3))); // row wrap
        assert!(b.is_adjacent(Province(0), Province(12))); // column wrap
        assert!(!b.is_adjacent(Province(0), Province(5))); // diagonal
    }

    #[test]
    fn names_follow_grid_coordinates() {
        let b = Board::standard();
        assert_eq!(b.province_name(Province(0)), "a1");
        assert_eq!(b.province_name(Province(5)), "b2");
        assert_eq!(b.province_name(Province(15)), "d4");
    }

    #[test]
    fn bfs_distances_on_torus() {
        let b = Board::standard();
        let d = b.distances_from(&[Province(0)]);
        assert_eq!(d[0], 0);
        assert_eq!(d[1], 1);
        assert_eq!(d[5], 2);
        assert_eq!(d[10], 4); // opposite corner on the torus
        assert_eq!(b.distances_from(&[])[3], u32::MAX);
    }
}
