//! Published reference values, used by the threshold comparison and the
//! acceptance suite. Matrices are lower-triangular over types 1..=7.

use serde::Serialize;

pub const ALPHA: [[f64; 7]; 7] = [
    [64., 0., 0., 0., 0., 0., 0.],
    [624., 630., 0., 0., 0., 0., 0.],
    [160., 468., 96., 0., 0., 0., 0.],
    [160., 468., 0., 96., 0., 0., 0.],
    [192., 546., 0., 288., 168., 0., 0.],
    [192., 546., 288., 0., 0., 168., 0.],
    [2560., 5924., 1888., 1888., 2288., 2288., 13245.],
];

pub const ALPHA_DEPOL: [[f64; 7]; 7] = [
    [7.1, 0., 0., 0., 0., 0., 0.],
    [138.7, 350., 0., 0., 0., 0., 0.],
    [35.6, 208., 42.7, 0., 0., 0., 0.],
    [35.6, 208., 0., 42.7, 0., 0., 0.],
    [42.7, 242.7, 0., 128., 74.7, 0., 0.],
    [42.7, 242.7, 128., 0., 0., 74.7, 0.],
    [287.3, 1462.4, 423.8, 423.8, 512., 512., 1517.2],
];

pub const BETA: [[f64; 7]; 7] = [
    [144., 0., 0., 0., 0., 0., 0.],
    [168., 133., 0., 0., 0., 0., 0.],
    [0., 0., 2., 0., 0., 0., 0.],
    [24., 14., 0., 1., 0., 0., 0.],
    [168., 98., 0., 14., 49., 0., 0.],
    [0., 0., 1., 0., 0., 0., 0.],
    [360., 462., 8., 30., 210., 2., 442.],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constant {
    pub key: &'static str,
    pub value: f64,
    /// Relative tolerance for a match; zero means exact.
    pub rel_tol: f64,
}

const fn exact(key: &'static str, value: f64) -> Constant {
    Constant { key, value, rel_tol: 0.0 }
}

const fn approx(key: &'static str, value: f64) -> Constant {
    Constant { key, value, rel_tol: 5e-4 }
}

/// Reported counts are reproduced within this fraction.
pub const COUNT_TOL: f64 = 0.05;

const fn count(key: &'static str, value: f64) -> Constant {
    Constant { key, value, rel_tol: COUNT_TOL }
}

pub const CONSTANTS: &[Constant] = &[
    exact("census.encoder", 18.0),
    exact("census.ec", 142.0),
    exact("census.cnot", 575.0),
    exact("census.cnot.no-storage", 487.0),
    exact("census.cat", 36.0),
    exact("census.a-state", 521.0),
    exact("b.cnot", 31_519_775.0),
    exact("b.cnot.no-storage", 19_131_795.0),
    exact("b.a-state", 23_434_580.0),
    exact("c.cnot", 50.0),
    exact("c.cnot.no-storage", 46.0),
    count("a.cnot", 35_235.0),
    count("a.cnot.no-storage", 22_701.0),
    count("a.cnot.depol", 7_183.0),
    count("a.cnot.depol.no-storage", 3_880.0),
    count("a.a-state", 2_330.0),
    approx("a-prime.cnot", 36_108.0),
    approx("a-double-prime.cnot", 36_511.0),
    approx("eps0.cnot", 2.739e-5),
    approx("a-prime.cnot.no-storage", 23_515.0),
    approx("a-double-prime.cnot.no-storage", 23_887.0),
    approx("eps0.cnot.no-storage", 4.186e-5),
    approx("a-prime.cnot.depol", 10_256.0),
    approx("a-double-prime.cnot.depol", 10_665.0),
    approx("eps0.cnot.depol", 9.376e-5),
    approx("a-prime.cnot.depol.no-storage", 6_725.0),
    approx("a-double-prime.cnot.depol.no-storage", 7_105.0),
    approx("eps0.cnot.depol.no-storage", 1.407e-4),
    approx("a-prime.a-state", 6_144.0),
    approx("a-double-prime.a-state", 6_713.0),
];

pub fn lookup(key: &str) -> Option<&'static Constant> {
    CONSTANTS.iter().find(|c| c.key == key)
}

impl Constant {
    pub fn matches(&self, v: f64) -> bool {
        if self.rel_tol == 0.0 {
            v == self.value
        } else {
            (v - self.value).abs() <= self.rel_tol * self.value.abs()
        }
    }
}
