//! Index sets splitting local type-b and type-c grid vectors into the part
//! handled by the previous level (`star`) and the outermost panels (`circ`).

/// Zero-based index sets of one local grid configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSets {
    /// Type-b indices that receive the previous level's compressed block.
    pub star_l: Vec<usize>,
    /// Type-b indices on the outermost panels.
    pub circ_l: Vec<usize>,
    /// Type-c indices on the panels closest to the singular point.
    pub star_s: Vec<usize>,
    /// Type-c indices on the outer panels.
    pub circ_s: Vec<usize>,
}

impl IndexSets {
    /// Interior singular point: 96 type-b nodes, 64 type-c nodes.
    pub fn two_sided() -> Self {
        Self {
            star_l: (16..80).collect(),
            circ_l: (0..16).chain(80..96).collect(),
            star_s: (16..48).collect(),
            circ_s: (0..16).chain(48..64).collect(),
        }
    }

    /// Open-arc endpoint: 48 type-b nodes, 32 type-c nodes, ordered from the singular point outwards.
    pub fn one_sided() -> Self {
        Self {
            star_l: (0..32).collect(),
            circ_l: (32..48).collect(),
            star_s: (0..16).collect(),
            circ_s: (16..32).collect(),
        }
    }

    pub fn for_sides(two_sided: bool) -> Self {
        if two_sided {
            Self::two_sided()
        } else {
            Self::one_sided()
        }
    }

    /// Size of the type-b grid.
    pub fn n_b(&self) -> usize {
        self.star_l.len() + self.circ_l.len()
    }

    /// Size of the type-c grid.
    pub fn n_c(&self) -> usize {
        self.star_s.len() + self.circ_s.len()
    }
}
