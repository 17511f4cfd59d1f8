//! Parameter fixtures shared by the integration tests.
#![allow(dead_code)]

use gdaha::params::{qr, RationalParams};
use gdaha::Qi;

/// Replaces the last entry so that all entries sum to zero (`ℏ = 0` when
/// every leg has length `ℓ`).
fn balance(mut g: Vec<Vec<Qi>>) -> Vec<Vec<Qi>> {
    let last = g.len() - 1;
    let j = g[last].len() - 1;
    g[last][j] = qr(0, 1);
    let sum: Qi = g.iter().flatten().cloned().fold(qr(0, 1), |a, b| a + b);
    g[last][j] = -sum;
    g
}

/// Generic D4 parameters with vanishing `ℏ`.
pub fn d4(nu: Qi) -> RationalParams {
    let g = vec![
        vec![qr(1, 5), qr(-1, 7)],
        vec![qr(-1, 5), qr(1, 9)],
        vec![qr(1, 3), qr(1, 7)],
        vec![qr(-1, 3), qr(-1, 9)],
    ];
    RationalParams::new(&[2, 2, 2, 2], g, nu).unwrap()
}

/// Second generic D4 point with vanishing `ℏ`.
pub fn d4_alt(nu: Qi) -> RationalParams {
    let g = vec![
        vec![qr(3, 11), qr(-2, 13)],
        vec![qr(1, 17), qr(-1, 6)],
        vec![qr(-2, 7), qr(1, 10)],
        vec![qr(1, 8), qr(0, 1)],
    ];
    RationalParams::new(&[2, 2, 2, 2], balance(g), nu).unwrap()
}

/// Generic E6 parameters with vanishing `ℏ`.
pub fn e6(nu: Qi) -> RationalParams {
    let g = vec![
        vec![qr(1, 5), qr(-1, 7), qr(2, 9)],
        vec![qr(-1, 4), qr(1, 11), qr(-2, 13)],
        vec![qr(1, 3), qr(-1, 8), qr(0, 1)],
    ];
    RationalParams::new(&[3, 3, 3], balance(g), nu).unwrap()
}
