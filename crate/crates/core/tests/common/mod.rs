#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinroute_core::code::{hypergraph_product, surface_code, DataLayout};
use spinroute_core::compiler::{replicate_rounds, schedule_round, CompileOptions, Schedule};
use spinroute_core::gf2::BitMatrix;
use spinroute_core::{build_grid, ChipLayout, CssCode};

pub fn surface(d: u32, tailor: bool, rounds: u32) -> (CssCode, ChipLayout, DataLayout, Schedule) {
    let (code, data) = surface_code(d).unwrap();
    let data = data.normalized(1);
    let layout = build_grid(d + 2, d + 2).unwrap();
    let opts = CompileOptions { tailor, ..CompileOptions::default() };
    let s = schedule_round(&code, &layout, &data, &opts).unwrap();
    (code, layout, data, replicate_rounds(&s, rounds))
}

/// Random classical check matrix with no empty rows or columns.
pub fn classical(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
    loop {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.gen_bool(0.45));
            }
        }
        let rows_ok = (0..rows).all(|r| !m.row(r).is_zero());
        let cols_ok = (0..cols).all(|c| (0..rows).any(|r| m.get(r, c)));
        if rows_ok && cols_ok {
            return m;
        }
    }
}

/// Small random hypergraph-product code; the same seed gives the same code.
pub fn random_code(seed: u64) -> CssCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r1, n1) = (rng.gen_range(1..=2), rng.gen_range(2..=3));
    let (r2, n2) = (rng.gen_range(1..=2), rng.gen_range(2..=3));
    let h1 = classical(&mut rng, r1, n1);
    let h2 = classical(&mut rng, r2, n2);
    hypergraph_product(format!("hp-{seed}"), &h1, &h2).unwrap()
}

fn ceil_sqrt(n: usize) -> u32 {
    let mut s = 0;
    while s * s < n {
        s += 1;
    }
    s as u32
}

/// Row-major data block inside a square grid with room for every ancilla home.
pub fn fit(code: &CssCode, margin: u32) -> (ChipLayout, DataLayout) {
    let side = ceil_sqrt(code.n()).max(ceil_sqrt(code.num_checks()));
    let layout = build_grid(side + 2 * margin, side + 2 * margin).unwrap();
    (layout, DataLayout::row_major(code.n()).normalized(margin))
}

pub fn compile(code: &CssCode, margin: u32, opts: &CompileOptions) -> (ChipLayout, DataLayout, Schedule) {
    let (layout, data) = fit(code, margin);
    let s = schedule_round(code, &layout, &data, opts).unwrap();
    (layout, data, s)
}
