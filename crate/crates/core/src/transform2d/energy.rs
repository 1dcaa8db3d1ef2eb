use super::{Image, SquarePyramid};

/// L2 norms of the square-transform detail bands at one pyramid step.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelEnergy {
    /// Decomposition step, 1 = finest.
    pub level: usize,
    pub lh: f64,
    pub hl: f64,
    /// `sqrt(|lh|^2 + |hl|^2)`: the edge-detection terms.
    pub edge: f64,
    /// `|hh|`: the cross terms.
    pub cross: f64,
}

/// Per-level edge/cross energies of a square pyramid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    pub levels: Vec<LevelEnergy>,
    pub total_edge: f64,
    pub total_cross: f64,
}

impl EnergyTable {
    pub fn csv_header() -> &'static str {
        "level,lh,hl,edge_energy,cross_energy"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::csv_header());
        out.push('\n');
        for l in &self.levels {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6}\n",
                l.level, l.lh, l.hl, l.edge, l.cross
            ));
        }
        out
    }
}

fn norm(b: &Image) -> f64 {
    b.energy().sqrt()
}

pub fn energy_distribution(pyr: &SquarePyramid) -> EnergyTable {
    let mut levels = Vec::with_capacity(pyr.levels.len());
    let (mut e2, mut c2) = (0.0, 0.0);
    for (k, lvl) in pyr.levels.iter().enumerate() {
        let (lh, hl, hh) = (norm(&lvl.lh), norm(&lvl.hl), norm(&lvl.hh));
        let edge = (lh * lh + hl * hl).sqrt();
        e2 += edge * edge;
        c2 += hh * hh;
        levels.push(LevelEnergy {
            level: k + 1,
            lh,
            hl,
            edge,
            cross: hh,
        });
    }
    EnergyTable {
        levels,
        total_edge: e2.sqrt(),
        total_cross: c2.sqrt(),
    }
}
