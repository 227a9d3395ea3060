//! Internal unit system.
//!
//! All kernels work in units where hbar = c = eps0 = k_B = 1, scaled by a
//! characteristic angular frequency `omega_c`. Lengths are measured in
//! `c / omega_c`, temperatures in `hbar * omega_c / k_B`, energies in
//! `hbar * omega_c`. SI values only appear at I/O boundaries.

use crate::error::{Error, Result};

/// CODATA 2018 values.
pub mod si {
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const C: f64 = 299_792_458.0;
    pub const EPS0: f64 = 8.854_187_812_8e-12;
    pub const K_B: f64 = 1.380_649e-23;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// Characteristic angular frequency in rad/s.
    pub omega_c: f64,
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
    pub k_b: f64,
}

impl UnitSystem {
    pub fn new(omega_c: f64) -> Result<Self> {
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::Domain(format!(
                "omega_c = {omega_c} must be positive"
            )));
        }
        Ok(Self {
            omega_c,
            hbar: 1.0,
            c: 1.0,
            eps0: 1.0,
            k_b: 1.0,
        })
    }

    /// Scale chosen so that `k_B T / hbar` is of order one.
    pub fn thermal(temperature_k: f64) -> Result<Self> {
        Self::new(si::K_B * temperature_k / si::HBAR)
    }

    pub fn frequency_to_internal(&self, omega_rad_s: f64) -> f64 {
        omega_rad_s / self.omega_c
    }
    pub fn frequency_to_si(&self, omega: f64) -> f64 {
        omega * self.omega_c
    }

    pub fn length_unit_m(&self) -> f64 {
        si::C / self.omega_c
    }
    pub fn length_to_internal(&self, metres: f64) -> f64 {
        metres / self.length_unit_m()
    }
    pub fn length_to_si(&self, length: f64) -> f64 {
        length * self.length_unit_m()
    }

    pub fn temperature_unit_k(&self) -> f64 {
        si::HBAR * self.omega_c / si::K_B
    }
    pub fn temperature_to_internal(&self, kelvin: f64) -> f64 {
        kelvin / self.temperature_unit_k()
    }
    pub fn temperature_to_si(&self, t: f64) -> f64 {
        t * self.temperature_unit_k()
    }

    /// dc conductivity in S/m to the internal frequency `sigma / (eps0 omega_c)`.
    pub fn conductivity_to_internal(&self, sigma_s_per_m: f64) -> f64 {
        sigma_s_per_m / (si::EPS0 * self.omega_c)
    }
    pub fn conductivity_to_si(&self, sigma: f64) -> f64 {
        sigma * si::EPS0 * self.omega_c
    }

    /// Power unit `hbar omega_c^2` in watts.
    pub fn power_unit_w(&self) -> f64 {
        si::HBAR * self.omega_c * self.omega_c
    }
    pub fn power_to_si(&self, p: f64) -> f64 {
        p * self.power_unit_w()
    }
    pub fn power_to_internal(&self, watts: f64) -> f64 {
        watts / self.power_unit_w()
    }

    /// Torque (energy) unit `hbar omega_c` in N m.
    pub fn torque_unit_nm(&self) -> f64 {
        si::HBAR * self.omega_c
    }
    pub fn torque_to_si(&self, m: f64) -> f64 {
        m * self.torque_unit_nm()
    }
    pub fn torque_to_internal(&self, nm: f64) -> f64 {
        nm / self.torque_unit_nm()
    }

    /// Power spectral density dP/domega: W / (rad/s) per internal unit.
    pub fn power_density_to_si(&self, dp: f64) -> f64 {
        dp * si::HBAR * self.omega_c
    }
    /// Torque spectral density dM/domega: N m / (rad/s) per internal unit.
    pub fn torque_density_to_si(&self, dm: f64) -> f64 {
        dm * si::HBAR
    }
}
