//! The wrapped L x L square lattice.
//!
//! Sites are indexed `row * L + col`. Every site owns two oriented bonds, one
//! pointing right and one pointing up, so bond `2 * site + dir` runs from
//! `site` to its right (`dir = 0`) or upper (`dir = 1`) neighbor. At `L = 2`
//! the wrap makes two distinct bonds join the same pair of sites; they are kept
//! as separate bonds so the bond count is `2N` for every `L`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub base: usize,
    pub direction: Direction,
    pub head: usize,
}

/// A bond together with its orientation (`+1` or `-1`) relative to some
/// site, face or loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedBond {
    pub bond: usize,
    pub sign: i8,
}

impl SignedBond {
    fn new(bond: usize, sign: i8) -> Self {
        Self { bond, sign }
    }
}

#[derive(Debug, Clone)]
pub struct TorusLattice {
    side: usize,
    bonds: Vec<Bond>,
    site_bonds: Vec<[SignedBond; 4]>,
    faces: Vec<[SignedBond; 4]>,
    /// For every bond, the face it borders positively and the one it borders negatively.
    bond_faces: Vec<(usize, usize)>,
    windings: [Vec<SignedBond>; 2],
}

impl TorusLattice {
    pub fn new(side: usize) -> Result<Self> {
        if side < 2 {
            return Err(Error::LatticeTooSmall(side));
        }
        let l = side;
        let n = l * l;
        let site = |r: usize, c: usize| (r % l) * l + (c % l);
        let right = |r: usize, c: usize| 2 * site(r, c);
        let up = |r: usize, c: usize| 2 * site(r, c) + 1;

        let mut bonds = Vec::with_capacity(2 * n);
        for r in 0..l {
            for c in 0..l {
                bonds.push(Bond { base: site(r, c), direction: Direction::Right, head: site(r, c + 1) });
                bonds.push(Bond { base: site(r, c), direction: Direction::Up, head: site(r + 1, c) });
            }
        }

        let mut site_bonds = Vec::with_capacity(n);
        for r in 0..l {
            for c in 0..l {
                site_bonds.push([
                    SignedBond::new(right(r, c), 1),
                    SignedBond::new(up(r, c), 1),
                    SignedBond::new(right(r, c + l - 1), -1),
                    SignedBond::new(up(r + l - 1, c), -1),
                ]);
            }
        }

        // Counter-clockwise boundary of the plaquette with lower-left corner (r, c).
        let mut faces = Vec::with_capacity(n);
        let mut bond_faces = vec![(usize::MAX, usize::MAX); 2 * n];
        for r in 0..l {
            for c in 0..l {
                let face = [
                    SignedBond::new(right(r, c), 1),
                    SignedBond::new(up(r, c + 1), 1),
                    SignedBond::new(right(r + 1, c), -1),
                    SignedBond::new(up(r, c), -1),
                ];
                let f = site(r, c);
                for sb in face {
                    if sb.sign > 0 {
                        bond_faces[sb.bond].0 = f;
                    } else {
                        bond_faces[sb.bond].1 = f;
                    }
                }
                faces.push(face);
            }
        }

        let horizontal = (0..l).map(|c| SignedBond::new(right(0, c), 1)).collect();
        let vertical = (0..l).map(|r| SignedBond::new(up(r, 0), 1)).collect();

        Ok(Self { side, bonds, site_bonds, faces, bond_faces, windings: [horizontal, vertical] })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn num_sites(&self) -> usize {
        self.side * self.side
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, b: usize) -> Result<&Bond> {
        self.bonds.get(b).ok_or(Error::IndexOutOfRange { index: b, len: self.bonds.len() })
    }

    /// The four bonds touching `site`: `+1` for its own (outgoing) right and
    /// up bonds, `-1` for the incoming ones.
    pub fn site_bonds(&self, site: usize) -> Result<&[SignedBond; 4]> {
        self.site_bonds.get(site).ok_or(Error::IndexOutOfRange { index: site, len: self.site_bonds.len() })
    }

    /// Oriented boundary of a plaquette.
    pub fn face_bonds(&self, face: usize) -> Result<&[SignedBond; 4]> {
        self.faces.get(face).ok_or(Error::IndexOutOfRange { index: face, len: self.faces.len() })
    }

    /// `(positive_face, negative_face)` for a bond.
    pub fn bond_faces(&self, bond: usize) -> (usize, usize) {
        self.bond_faces[bond]
    }

    /// A non-contractible cycle: the right bonds of row 0 (horizontal) or the
    /// up bonds of column 0 (vertical), all with orientation `+1`.
    pub fn winding_bonds(&self, axis: Axis) -> &[SignedBond] {
        match axis {
            Axis::Horizontal => &self.windings[0],
            Axis::Vertical => &self.windings[1],
        }
    }
}
