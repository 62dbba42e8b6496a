use serde::{Deserialize, Serialize};

use super::schedule::Schedule;
use crate::constants::{EPSILON_0, HBAR};
use crate::error::{Error, Result};

/// Physical description of a switchable transition dipole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipolePhysical {
    /// Carrier angular frequency, rad/s.
    pub omega0: f64,
    /// Quantization volume, m^3.
    pub volume: f64,
    /// Transition dipole moment versus time, C m.
    pub dipole: Schedule,
    /// Number of atoms.
    pub atom_count: f64,
}

/// Single-atom coupling per unit dipole, `sqrt(omega0 / (2 eps0 hbar V))`.
pub fn coupling_per_dipole(omega0: f64, volume: f64) -> f64 {
    (omega0 / (2.0 * EPSILON_0 * HBAR * volume)).sqrt()
}

/// Collective coupling `g(t) = sqrt(N) sqrt(omega0 / (2 eps0 hbar V)) p(t)`.
pub fn coupling_from_dipole(phys: &DipolePhysical) -> Result<Schedule> {
    for (name, v) in [
        ("omega0", phys.omega0),
        ("volume", phys.volume),
        ("atom_count", phys.atom_count),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    let scale = phys.atom_count.sqrt() * coupling_per_dipole(phys.omega0, phys.volume);
    let g = phys.dipole.scaled(scale)?;
    Schedule::coupling(g.segments().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::Segment;

    fn phys(n: f64) -> DipolePhysical {
        DipolePhysical {
            omega0: 2.37e15,
            volume: 1e-12,
            dipole: Schedule::coupling(vec![Segment::tabulated(
                vec![0.0, 1e-7, 2e-7],
                vec![0.0, 1e-32, 0.5e-32],
            )
            .unwrap()])
            .unwrap(),
            atom_count: n,
        }
    }

    #[test]
    fn spot_value() {
        let g = coupling_from_dipole(&phys(1e10)).unwrap();
        // sqrt(2.37e15 / (2 * 8.8541878128e-12 * 1.054571817e-34 * 1e-12)) * 1e-32 * 1e5
        let expected = 1.126_540_293_168e9;
        assert!(
            (g.value(1e-7) / expected - 1.0).abs() < 1e-11,
            "{}",
            g.value(1e-7)
        );
    }

    #[test]
    fn doubling_atoms_scales_by_sqrt2() {
        let a = coupling_from_dipole(&phys(1e10)).unwrap();
        let b = coupling_from_dipole(&phys(2e10)).unwrap();
        for &t in &[0.3e-7, 1e-7, 1.7e-7] {
            assert!((b.value(t) / a.value(t) - 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_dipole_gives_zero_coupling() {
        let mut p = phys(1e10);
        p.dipole = Schedule::zero();
        assert!(coupling_from_dipole(&p).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_positive_physics() {
        let mut p = phys(1e10);
        p.volume = 0.0;
        assert!(coupling_from_dipole(&p).is_err());
        let mut p = phys(0.0);
        p.atom_count = -1.0;
        assert!(coupling_from_dipole(&p).is_err());
    }
}
