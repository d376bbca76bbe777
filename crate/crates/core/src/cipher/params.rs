use crate::bitkit::PermTable;

use super::CipherError;

/// A 4×4 substitution box with 2-bit cells, indexed `[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SBox([[u8; 4]; 4]);

impl SBox {
    pub fn new(cells: [[u8; 4]; 4]) -> Result<Self, CipherError> {
        for (row, cells_row) in cells.iter().enumerate() {
            for (col, &value) in cells_row.iter().enumerate() {
                if value > 3 {
                    return Err(CipherError::SBoxCell { row, col, value });
                }
            }
        }
        Ok(SBox(cells))
    }

    pub fn lookup(&self, row: usize, col: usize) -> u8 {
        self.0[row][col]
    }

    pub fn cells(&self) -> [[u8; 4]; 4] {
        self.0
    }
}

/// Permutation tables and S-boxes of the cipher.
///
/// | table    | width  | default                    |
/// |----------|--------|----------------------------|
/// | `p10`    | 10→10  | 3 5 2 7 4 10 1 9 8 6       |
/// | `p8`     | 10→8   | 6 3 7 4 8 5 10 9           |
/// | `ip`     | 8→8    | 2 6 3 1 4 8 5 7            |
/// | `ip_inv` | 8→8    | 4 1 3 5 7 2 8 6            |
/// | `ep`     | 4→8    | 4 1 2 3 2 3 4 1            |
/// | `p4`     | 4→4    | 2 4 3 1                    |
///
/// The default S-boxes are the ones used by Simplified DES; the permutation
/// tables above coincide with that construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherParams {
    p10: PermTable,
    p8: PermTable,
    ip: PermTable,
    ip_inv: PermTable,
    ep: PermTable,
    p4: PermTable,
    s1: SBox,
    s2: SBox,
}

pub const DEFAULT_S1: [[u8; 4]; 4] = [[1, 0, 3, 2], [3, 2, 1, 0], [0, 2, 1, 3], [3, 1, 3, 2]];
pub const DEFAULT_S2: [[u8; 4]; 4] = [[0, 1, 2, 3], [2, 0, 1, 3], [3, 0, 1, 0], [2, 1, 0, 3]];

impl Default for CipherParams {
    fn default() -> Self {
        let t = |e: &[usize], w| PermTable::new(e, w).expect("built-in table");
        CipherParams::new(
            t(&[3, 5, 2, 7, 4, 10, 1, 9, 8, 6], 10),
            t(&[6, 3, 7, 4, 8, 5, 10, 9], 10),
            t(&[2, 6, 3, 1, 4, 8, 5, 7], 8),
            t(&[4, 1, 3, 5, 7, 2, 8, 6], 8),
            t(&[4, 1, 2, 3, 2, 3, 4, 1], 4),
            t(&[2, 4, 3, 1], 4),
            SBox(DEFAULT_S1),
            SBox(DEFAULT_S2),
        )
        .expect("built-in parameters are consistent")
    }
}

impl CipherParams {
    /// Checks every table's shape, and that `ip_inv` undoes `ip`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p10: PermTable,
        p8: PermTable,
        ip: PermTable,
        ip_inv: PermTable,
        ep: PermTable,
        p4: PermTable,
        s1: SBox,
        s2: SBox,
    ) -> Result<Self, CipherError> {
        let shape = |name: &str, t: &PermTable, input: usize, output: usize, bijective: bool| {
            if t.input_width() != input
                || t.output_width() != output
                || (bijective && !t.is_bijective())
            {
                Err(CipherError::Params(format!(
                    "{name} must map {input} bits to {output}{}; got {}→{}",
                    if bijective { " bijectively" } else { "" },
                    t.input_width(),
                    t.output_width()
                )))
            } else {
                Ok(())
            }
        };
        shape("p10", &p10, 10, 10, true)?;
        shape("p8", &p8, 10, 8, false)?;
        shape("ip", &ip, 8, 8, true)?;
        shape("ip_inv", &ip_inv, 8, 8, true)?;
        shape("ep", &ep, 4, 8, false)?;
        shape("p4", &p4, 4, 4, true)?;
        if ip.invert()? != ip_inv {
            return Err(CipherError::Params(
                "ip_inv is not the inverse of ip".into(),
            ));
        }
        Ok(CipherParams {
            p10,
            p8,
            ip,
            ip_inv,
            ep,
            p4,
            s1,
            s2,
        })
    }

    /// Default tables with replacement S-boxes.
    pub fn with_sboxes(mut self, s1: SBox, s2: SBox) -> Self {
        self.s1 = s1;
        self.s2 = s2;
        self
    }

    pub fn p10(&self) -> &PermTable {
        &self.p10
    }
    pub fn p8(&self) -> &PermTable {
        &self.p8
    }
    pub fn ip(&self) -> &PermTable {
        &self.ip
    }
    pub fn ip_inv(&self) -> &PermTable {
        &self.ip_inv
    }
    pub fn ep(&self) -> &PermTable {
        &self.ep
    }
    pub fn p4(&self) -> &PermTable {
        &self.p4
    }
    pub fn s1(&self) -> &SBox {
        &self.s1
    }
    pub fn s2(&self) -> &SBox {
        &self.s2
    }
}
