//! Physical constants and unit conversions.

/// Speed of light in vacuum, m/s (exact SI value).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency (rad/s) of a vacuum wavelength given in micrometers.
pub fn omega_from_lambda_um(lambda_um: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (lambda_um * 1e-6)
}

/// Vacuum wavelength in micrometers of an angular frequency in rad/s.
pub fn lambda_um_from_omega(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega * 1e6
}

/// Vacuum wavelength in nanometers of an angular frequency in rad/s.
pub fn lambda_nm_from_omega(omega: f64) -> f64 {
    lambda_um_from_omega(omega) * 1e3
}

/// Angular frequency (rad/s) of a vacuum wavelength given in nanometers.
pub fn omega_from_lambda_nm(lambda_nm: f64) -> f64 {
    omega_from_lambda_um(lambda_nm * 1e-3)
}
