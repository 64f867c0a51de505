//! Named Lie-algebra-valued radial field components with their first
//! time-derivative arrays Pi = d_t u. Two stock layouts: a single scalar
//! ("Phi") for linear-wave studies, and the gauge/metric quintet
//! (A_t, A_r, h_tt, h_tr, h_rr) for the coupled system.

use crate::algebra::{Algebra, LieValue};
use crate::grid::{Parity, RadialGrid};
use alloc::vec;
use alloc::vec::Vec;

/// Which energy family a component belongs to: gauge potential or metric
/// perturbation. Energies and decay reports are tallied per family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Gauge,
    Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentSpec {
    pub name: &'static str,
    pub family: Family,
    pub parity: Parity,
}

pub const SCALAR_SET: [ComponentSpec; 1] = [ComponentSpec {
    name: "Phi",
    family: Family::Gauge,
    parity: Parity::Even,
}];

/// Radial components of the coupled unknowns. Parity is the reflection
/// symmetry of the profile: components carrying one radial index (A_r,
/// h_tr) vanish at the origin.
pub const COUPLED_SET: [ComponentSpec; 5] = [
    ComponentSpec { name: "A_t", family: Family::Gauge, parity: Parity::Even },
    ComponentSpec { name: "A_r", family: Family::Gauge, parity: Parity::Odd },
    ComponentSpec { name: "h_tt", family: Family::Metric, parity: Parity::Even },
    ComponentSpec { name: "h_tr", family: Family::Metric, parity: Parity::Odd },
    ComponentSpec { name: "h_rr", family: Family::Metric, parity: Parity::Even },
];

#[derive(Clone, Debug)]
pub struct Component {
    pub spec: ComponentSpec,
    pub u: Vec<LieValue>,
    pub pi: Vec<LieValue>,
}

#[derive(Clone, Debug)]
pub struct ComponentField {
    pub t: f64,
    pub alg: Algebra,
    pub comps: Vec<Component>,
}

impl ComponentField {
    pub fn zeros(specs: &[ComponentSpec], alg: Algebra, grid: &RadialGrid) -> ComponentField {
        let comps = specs
            .iter()
            .map(|spec| Component {
                spec: *spec,
                u: vec![LieValue::zero(alg); grid.len()],
                pi: vec![LieValue::zero(alg); grid.len()],
            })
            .collect();
        ComponentField { t: 0.0, alg, comps }
    }

    pub fn find(&self, name: &str) -> Option<&Component> {
        self.comps.iter().find(|c| c.spec.name == name)
    }

    pub fn find_mut(&mut self, name: &str) -> Option<&mut Component> {
        self.comps.iter_mut().find(|c| c.spec.name == name)
    }

    /// Structural invariants: array lengths match the grid, entries are
    /// finite, odd components vanish at the origin.
    pub fn validate(&self, grid: &RadialGrid) -> Result<(), &'static str> {
        for c in &self.comps {
            if c.u.len() != grid.len() || c.pi.len() != grid.len() {
                return Err("component array length does not match grid");
            }
            for arr in [&c.u, &c.pi] {
                if !arr.iter().all(LieValue::is_finite) {
                    return Err("non-finite field entry");
                }
                if c.spec.parity == Parity::Odd && arr[0].norm_sq() != 0.0 {
                    return Err("odd component nonzero at r = 0");
                }
            }
        }
        Ok(())
    }

    /// Largest |coefficient| across all components; cheap blow-up monitor.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0;
        for c in &self.comps {
            for arr in [&c.u, &c.pi] {
                for v in arr.iter() {
                    m = crate::num::max(m, crate::num::sqrt(v.norm_sq()));
                }
            }
        }
        m
    }
}
