//! Reference implementation of the key schedule and block network.
//!
//! Every intermediate is a [`BitVec`] named after its step, so a traced run
//! can be audited line by line. Labels `array1`..`array28`, `key1`/`key2`,
//! `bin1`..`bin8` and `var1`..`var4` follow the order in which the network
//! produces them.

use std::fmt;

use crate::bitkit::BitVec;

use super::{Block8, CipherError, CipherParams, RoundKey8, Seed10};

/// P10, split 5/5, rotate each half left by one, merge, P8.
pub fn derive_round_key(seed: Seed10, params: &CipherParams) -> RoundKey8 {
    let permuted = seed
        .bits()
        .permute(params.p10())
        .expect("p10 is 10 bits wide");
    let (left, right) = permuted.split().expect("10 bits split evenly");
    let merged = left.rotate_left(1).concat(&right.rotate_left(1));
    let key = merged.permute(params.p8()).expect("p8 is 10 bits wide");
    RoundKey8::try_from(&key).expect("p8 yields 8 bits")
}

/// The round function: expand, mix in the key, substitute, permute.
///
/// S1 is addressed by bits (1,4) as row and (2,3) as column of the mixed
/// value; S2 by bits (5,8) and (6,7).
pub fn round_function(
    half: &BitVec,
    key: RoundKey8,
    params: &CipherParams,
) -> Result<BitVec, CipherError> {
    if half.len() != 4 {
        return Err(CipherError::Width {
            what: "half block",
            expected: 4,
            found: half.len(),
        });
    }
    Ok(round(half, key, params, &ROUND_ONE, &mut ()))
}

pub fn encrypt_block(plain: Block8, k1: RoundKey8, k2: RoundKey8, params: &CipherParams) -> Block8 {
    run(plain, k1, k2, params, &mut ())
}

/// Same network as [`encrypt_block`] with the round keys applied as (k2, k1).
pub fn decrypt_block(
    cipher: Block8,
    k1: RoundKey8,
    k2: RoundKey8,
    params: &CipherParams,
) -> Block8 {
    run(cipher, k2, k1, params, &mut ())
}

pub fn encrypt_block_traced(
    plain: Block8,
    k1: RoundKey8,
    k2: RoundKey8,
    params: &CipherParams,
) -> (Block8, Trace) {
    let mut trace = Trace::default();
    let out = run(plain, k1, k2, params, &mut trace);
    (out, trace)
}

/// Traced decryption. `key1` in the trace is the first-round key, which
/// for decryption is `k2`.
pub fn decrypt_block_traced(
    cipher: Block8,
    k1: RoundKey8,
    k2: RoundKey8,
    params: &CipherParams,
) -> (Block8, Trace) {
    let mut trace = Trace::default();
    let out = run(cipher, k2, k1, params, &mut trace);
    (out, trace)
}

/// Labels of a trace, in emission order.
pub const TRACE_LABELS: [&str; 42] = [
    "array1", "array2", "array3", "array4", "array5", "key1", "array6", "array7", "array8", "bin1",
    "bin2", "var1", "array9", "array10", "array11", "bin3", "bin4", "var2", "array12", "array13",
    "array14", "array15", "array16", "key2", "array17", "array18", "array19", "bin5", "bin6",
    "var3", "array20", "array21", "array22", "bin7", "bin8", "var4", "array23", "array24",
    "array25", "array26", "array27", "array28",
];

/// Named intermediates of one block operation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    steps: Vec<(&'static str, String)>,
}

impl Trace {
    pub fn steps(&self) -> &[(&'static str, String)] {
        &self.steps
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.steps
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, value) in &self.steps {
            writeln!(f, "{label:<8}{value}")?;
        }
        Ok(())
    }
}

trait Tracer {
    fn record(&mut self, label: &'static str, value: &dyn fmt::Display);
}

impl Tracer for () {
    fn record(&mut self, _: &'static str, _: &dyn fmt::Display) {}
}

impl Tracer for Trace {
    fn record(&mut self, label: &'static str, value: &dyn fmt::Display) {
        self.steps.push((label, value.to_string()));
    }
}

struct RoundLabels {
    expanded: &'static str,
    key: &'static str,
    mixed: &'static str,
    s1_row: &'static str,
    s1_col: &'static str,
    s1_row_n: &'static str,
    s1_col_n: &'static str,
    s1_out_n: &'static str,
    s1_out: &'static str,
    s2_row: &'static str,
    s2_col: &'static str,
    s2_row_n: &'static str,
    s2_col_n: &'static str,
    s2_out_n: &'static str,
    s2_out: &'static str,
    merged: &'static str,
    output: &'static str,
}

const ROUND_ONE: RoundLabels = RoundLabels {
    expanded: "array5",
    key: "key1",
    mixed: "array6",
    s1_row: "array7",
    s1_col: "array8",
    s1_row_n: "bin1",
    s1_col_n: "bin2",
    s1_out_n: "var1",
    s1_out: "array9",
    s2_row: "array10",
    s2_col: "array11",
    s2_row_n: "bin3",
    s2_col_n: "bin4",
    s2_out_n: "var2",
    s2_out: "array12",
    merged: "array13",
    output: "array14",
};

const ROUND_TWO: RoundLabels = RoundLabels {
    expanded: "array16",
    key: "key2",
    mixed: "array17",
    s1_row: "array18",
    s1_col: "array19",
    s1_row_n: "bin5",
    s1_col_n: "bin6",
    s1_out_n: "var3",
    s1_out: "array20",
    s2_row: "array21",
    s2_col: "array22",
    s2_row_n: "bin7",
    s2_col_n: "bin8",
    s2_out_n: "var4",
    s2_out: "array23",
    merged: "array24",
    output: "array25",
};

fn pick(v: &BitVec, a: usize, b: usize) -> BitVec {
    BitVec::from_bools([v.bit(a), v.bit(b)])
}

fn round(
    half: &BitVec,
    key: RoundKey8,
    params: &CipherParams,
    labels: &RoundLabels,
    t: &mut impl Tracer,
) -> BitVec {
    let expanded = half.permute(params.ep()).expect("ep is 4 bits wide");
    t.record(labels.expanded, &expanded);
    let key = key.bits();
    t.record(labels.key, &key);
    let mixed = expanded.xor(&key).expect("both 8 bits");
    t.record(labels.mixed, &mixed);

    let s1_out = substitute(
        &mixed,
        (1, 4),
        (2, 3),
        params.s1(),
        [
            labels.s1_row,
            labels.s1_col,
            labels.s1_row_n,
            labels.s1_col_n,
            labels.s1_out_n,
            labels.s1_out,
        ],
        t,
    );
    let s2_out = substitute(
        &mixed,
        (5, 8),
        (6, 7),
        params.s2(),
        [
            labels.s2_row,
            labels.s2_col,
            labels.s2_row_n,
            labels.s2_col_n,
            labels.s2_out_n,
            labels.s2_out,
        ],
        t,
    );

    let merged = s1_out.concat(&s2_out);
    t.record(labels.merged, &merged);
    let out = merged.permute(params.p4()).expect("p4 is 4 bits wide");
    t.record(labels.output, &out);
    out
}

fn substitute(
    mixed: &BitVec,
    row_bits: (usize, usize),
    col_bits: (usize, usize),
    sbox: &super::SBox,
    labels: [&'static str; 6],
    t: &mut impl Tracer,
) -> BitVec {
    let row = pick(mixed, row_bits.0, row_bits.1);
    t.record(labels[0], &row);
    let col = pick(mixed, col_bits.0, col_bits.1);
    t.record(labels[1], &col);
    let r = row.to_uint().expect("2 bits") as usize;
    t.record(labels[2], &r);
    let c = col.to_uint().expect("2 bits") as usize;
    t.record(labels[3], &c);
    let cell = sbox.lookup(r, c);
    t.record(labels[4], &cell);
    let out = BitVec::from_uint(u64::from(cell), 2).expect("S-box cells are 2 bits");
    t.record(labels[5], &out);
    out
}

fn run(
    input: Block8,
    first: RoundKey8,
    second: RoundKey8,
    params: &CipherParams,
    t: &mut impl Tracer,
) -> Block8 {
    let array1 = input.bits();
    t.record("array1", &array1);
    let array2 = array1.permute(params.ip()).expect("ip is 8 bits wide");
    t.record("array2", &array2);
    let (left, right) = array2.split().expect("8 bits split evenly");
    t.record("array3", &left);
    t.record("array4", &right);

    let f1 = round(&right, first, params, &ROUND_ONE, t);
    let a = f1.xor(&left).expect("both 4 bits");
    t.record("array15", &a);

    let f2 = round(&a, second, params, &ROUND_TWO, t);
    let b = f2.xor(&right).expect("both 4 bits");
    t.record("array26", &b);

    let merged = b.concat(&a);
    t.record("array27", &merged);
    let out = merged
        .permute(params.ip_inv())
        .expect("ip_inv is 8 bits wide");
    t.record("array28", &out);
    Block8::try_from(&out).expect("ip_inv yields 8 bits")
}
