//! Phase-free Pauli operators in binary symplectic form, and small stabilizer codes.
//!
//! A Pauli on `n` qubits is a `2n`-bit vector `(x | z)`. The X half lives in the low
//! `n` bits of a `u64`, the Z half in bits `n..2n`, so at most 32 qubits fit.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub const MAX_QUBITS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{0} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("invalid Pauli character {0:?}")]
    BadChar(char),
    #[error("empty Pauli literal")]
    Empty,
    #[error("invalid code: {0}")]
    InvalidCode(String),
}

/// Single-qubit Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli1 {
    I,
    X,
    Y,
    Z,
}

impl Pauli1 {
    pub const NONTRIVIAL: [Pauli1; 3] = [Pauli1::X, Pauli1::Y, Pauli1::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli1::I,
            (true, false) => Pauli1::X,
            (true, true) => Pauli1::Y,
            (false, true) => Pauli1::Z,
        }
    }

    pub fn has_x(self) -> bool {
        matches!(self, Pauli1::X | Pauli1::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli1::Z | Pauli1::Y)
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli1::I => 'I',
            Pauli1::X => 'X',
            Pauli1::Y => 'Y',
            Pauli1::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Self, PauliError> {
        match c {
            'I' | 'i' => Ok(Pauli1::I),
            'X' | 'x' => Ok(Pauli1::X),
            'Y' | 'y' => Ok(Pauli1::Y),
            'Z' | 'z' => Ok(Pauli1::Z),
            other => Err(PauliError::BadChar(other)),
        }
    }
}

/// Phase-free `n`-qubit Pauli.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    bits: u64,
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliOp {
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        Ok(PauliOp { n, bits: 0 })
    }

    /// Builds from X and Z masks; bit `q` of each mask refers to qubit `q`.
    pub fn from_xz(n: usize, x: u64, z: u64) -> Result<Self, PauliError> {
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits(n));
        }
        let m = low_mask(n);
        Ok(PauliOp { n, bits: (x & m) | ((z & m) << n) })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli1) -> Result<Self, PauliError> {
        if qubit >= n {
            return Err(PauliError::DimensionMismatch { left: n, right: qubit + 1 });
        }
        Self::from_xz(n, (p.has_x() as u64) << qubit, (p.has_z() as u64) << qubit)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Raw `(x | z)` vector, X in the low bits.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn x(&self) -> u64 {
        self.bits & low_mask(self.n)
    }

    pub fn z(&self) -> u64 {
        self.bits >> self.n
    }

    pub fn x_part(&self) -> PauliOp {
        PauliOp { n: self.n, bits: self.x() }
    }

    pub fn z_part(&self) -> PauliOp {
        PauliOp { n: self.n, bits: self.z() << self.n }
    }

    pub fn get(&self, qubit: usize) -> Pauli1 {
        Pauli1::from_bits(self.x() >> qubit & 1 == 1, self.z() >> qubit & 1 == 1)
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x() | self.z()).count_ones()
    }

    fn check_dim(&self, other: &PauliOp) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// `a Λ bᵀ == 0`.
    pub fn commutes(&self, other: &PauliOp) -> Result<bool, PauliError> {
        self.check_dim(other)?;
        let s = (self.x() & other.z()).count_ones() + (self.z() & other.x()).count_ones();
        Ok(s.is_multiple_of(2))
    }

    /// Product up to phase.
    pub fn compose(&self, other: &PauliOp) -> Result<PauliOp, PauliError> {
        self.check_dim(other)?;
        Ok(PauliOp { n: self.n, bits: self.bits ^ other.bits })
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(PauliError::Empty);
        }
        let n = s.chars().count();
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in s.chars().enumerate() {
            let p = Pauli1::from_char(c)?;
            x |= (p.has_x() as u64) << q;
            z |= (p.has_z() as u64) << q;
        }
        PauliOp::from_xz(n, x, z)
    }
}

/// Syndrome bits; bit `i` is the commutation parity with generator `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    len: usize,
    bits: u64,
}

impl Syndrome {
    pub fn new(len: usize, bits: u64) -> Self {
        Syndrome { len, bits: bits & low_mask(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Syndrome({self})")
    }
}

/// A block error after decoding: a minimum-weight residual plus logical flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockError {
    pub residual: PauliOp,
    pub logical_x_flip: bool,
    pub logical_z_flip: bool,
}

impl BlockError {
    pub fn x_part(&self) -> PauliOp {
        self.residual.x_part()
    }

    pub fn z_part(&self) -> PauliOp {
        self.residual.z_part()
    }

    pub fn has_logical_flip(&self) -> bool {
        self.logical_x_flip || self.logical_z_flip
    }
}

/// An `[[n, 1]]` stabilizer code with a precomputed minimum-weight decoder.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    n: usize,
    generators: Vec<PauliOp>,
    logical_x: PauliOp,
    logical_z: PauliOp,
    decode_table: Vec<PauliOp>,
}

impl StabilizerCode {
    /// Validates commutation relations and fills the decode table by scanning
    /// all Paulis in order of increasing symplectic weight, then ordinary weight
    /// (fine for `n <= 10`). Counting X and Z separately keeps a CSS decoder
    /// sector by sector: a mixed syndrome maps to one X and one Z, never to a
    /// weight-two X part that happens to tie on ordinary weight.
    pub fn new(
        generators: Vec<PauliOp>,
        logical_x: PauliOp,
        logical_z: PauliOp,
    ) -> Result<Self, PauliError> {
        let n = logical_x.num_qubits();
        if n > 10 {
            return Err(PauliError::InvalidCode(format!("{n} qubits too many for table decoding")));
        }
        for g in generators.iter().chain([&logical_z]) {
            logical_x.check_dim(g)?;
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes(b)? {
                    return Err(PauliError::InvalidCode("generators do not commute".into()));
                }
            }
            if !a.commutes(&logical_x)? || !a.commutes(&logical_z)? {
                return Err(PauliError::InvalidCode("logical does not commute with stabilizer".into()));
            }
        }
        if logical_x.commutes(&logical_z)? {
            return Err(PauliError::InvalidCode("logical X and Z must anticommute".into()));
        }
        let r = generators.len();
        if r != n - 1 {
            return Err(PauliError::InvalidCode(format!("expected {} generators, got {r}", n - 1)));
        }

        let mut code = StabilizerCode { n, generators, logical_x, logical_z, decode_table: Vec::new() };
        let mut table: Vec<Option<PauliOp>> = vec![None; 1 << r];
        let mut all: Vec<u64> = (0..1u64 << (2 * n)).collect();
        all.sort_by_key(|&b| {
            let x = b & low_mask(n);
            let z = b >> n;
            (x.count_ones() + z.count_ones(), (x | z).count_ones(), b)
        });
        let mut filled = 0;
        for b in all {
            let p = PauliOp { n, bits: b };
            let s = code.syndrome(&p)?.bits() as usize;
            if table[s].is_none() {
                table[s] = Some(p);
                filled += 1;
                if filled == table.len() {
                    break;
                }
            }
        }
        if filled != table.len() {
            return Err(PauliError::InvalidCode("generators are not independent".into()));
        }
        code.decode_table = table.into_iter().map(|p| p.unwrap()).collect();
        Ok(code)
    }

    /// The [[7,1,3]] code: X-type checks first, then Z-type checks, both from the
    /// Hamming parity-check rows `0001111`, `0110011`, `1010101`.
    pub fn steane() -> Self {
        let rows = ["0001111", "0110011", "1010101"];
        let mask = |r: &str| r.chars().enumerate().fold(0u64, |m, (i, c)| m | ((c == '1') as u64) << i);
        let mut gens = Vec::new();
        for r in rows {
            gens.push(PauliOp::from_xz(7, mask(r), 0).unwrap());
        }
        for r in rows {
            gens.push(PauliOp::from_xz(7, 0, mask(r)).unwrap());
        }
        let lx = PauliOp::from_xz(7, 0b0000111, 0).unwrap();
        let lz = PauliOp::from_xz(7, 0, 0b0000111).unwrap();
        StabilizerCode::new(gens, lx, lz).expect("steane code is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    pub fn logical_x(&self) -> &PauliOp {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOp {
        &self.logical_z
    }

    pub fn decode_table(&self) -> &[PauliOp] {
        &self.decode_table
    }

    pub fn syndrome(&self, p: &PauliOp) -> Result<Syndrome, PauliError> {
        let mut bits = 0u64;
        for (i, g) in self.generators.iter().enumerate() {
            if !p.commutes(g)? {
                bits |= 1 << i;
            }
        }
        Ok(Syndrome::new(self.generators.len(), bits))
    }

    pub fn decode_syndrome(&self, s: Syndrome) -> PauliOp {
        self.decode_table[s.bits() as usize]
    }

    /// Splits `p` into the decoder's residual for its syndrome and the logical
    /// operator left over once that residual is removed.
    pub fn reduce_block_error(&self, p: &PauliOp) -> Result<BlockError, PauliError> {
        let residual = self.decode_syndrome(self.syndrome(p)?);
        let q = p.compose(&residual)?;
        Ok(BlockError {
            residual,
            logical_x_flip: !q.commutes(&self.logical_z)?,
            logical_z_flip: !q.commutes(&self.logical_x)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn literal_roundtrip() {
        for s in ["IXZYIIX", "Y", "ZZZZZZZ", "IIIIIII"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("IXQ".parse::<PauliOp>().is_err());
        assert!("".parse::<PauliOp>().is_err());
    }

    #[test]
    fn commutation_basics() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        assert!(p("Y").commutes(&p("Y")).unwrap());
        assert_eq!(
            p("XX").commutes(&p("X")),
            Err(PauliError::DimensionMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn steane_single_qubit_syndromes() {
        let code = StabilizerCode::steane();
        let x7 = code.syndrome(&p("IIIIIIX")).unwrap();
        assert_eq!(x7.to_string(), "000111");
        let z1 = code.syndrome(&p("ZIIIIII")).unwrap();
        assert_eq!(z1.to_string(), "001000");
        let y4 = code.syndrome(&p("IIIYIII")).unwrap();
        assert_eq!(y4.to_string(), "100100");
        assert_eq!(code.decode_syndrome(y4), p("IIIYIII"));
    }

    #[test]
    fn steane_decode_table_is_minimum_weight() {
        let code = StabilizerCode::steane();
        assert_eq!(code.decode_table().len(), 64);
        for (s, e) in code.decode_table().iter().enumerate() {
            assert_eq!(code.syndrome(e).unwrap().bits() as usize, s);
            assert!(e.x().count_ones() <= 1 && e.z().count_ones() <= 1);
        }
    }

    #[test]
    fn two_x_errors_flip_logical() {
        let code = StabilizerCode::steane();
        let be = code.reduce_block_error(&p("XXIIIII")).unwrap();
        assert!(be.logical_x_flip);
        assert!(!be.logical_z_flip);
        assert_eq!(be.residual.weight(), 1);
        let be = code.reduce_block_error(&p("ZZZIIII")).unwrap();
        assert!(be.residual.is_identity() && be.logical_z_flip && !be.logical_x_flip);
    }
}
