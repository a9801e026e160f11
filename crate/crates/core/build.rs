//! Generates straight-line truncated jet products (see `src/jet.rs`).

use std::fmt::Write as _;
use std::path::PathBuf;

const DEGREE: usize = 3;

fn collect(nvars: usize, left: usize, var: usize, cur: [usize; 4], out: &mut Vec<[usize; 4]>) {
    if var + 1 == nvars {
        let mut e = cur;
        e[var] = left;
        out.push(e);
        return;
    }
    for k in (0..=left).rev() {
        let mut e = cur;
        e[var] = k;
        collect(nvars, left - k, var + 1, e, out);
    }
}

fn exponents(nvars: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for deg in 0..=DEGREE {
        collect(nvars, deg, 0, [0; 4], &mut out);
    }
    out
}

fn main() {
    println!("cargo:rerun-if-changed=build.rs");
    let mut src = String::new();
    for nvars in 3..=4 {
        let ex = exponents(nvars);
        let deg = |e: &[usize; 4]| e.iter().sum::<usize>();
        for cap in 1..=DEGREE {
            let len = ex.iter().filter(|e| deg(e) <= cap).count();
            writeln!(
                src,
                "#[inline]\nfn mul_{nvars}_{cap}(a: &[f64], b: &[f64], o: &mut [f64]) {{\n    let (a, b, o) = (&a[..{len}], &b[..{len}], &mut o[..{len}]);"
            )
            .unwrap();
            let mut terms: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ex.len()];
            for (i, ea) in ex.iter().enumerate() {
                for (j, eb) in ex.iter().enumerate() {
                    if deg(ea) + deg(eb) > cap {
                        continue;
                    }
                    let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                    let k = ex.iter().position(|x| *x == e).unwrap();
                    terms[k].push((i, j));
                }
            }
            for (k, t) in terms.iter().enumerate() {
                if t.is_empty() {
                    continue;
                }
                let sum: Vec<String> = t.iter().map(|(i, j)| format!("a[{i}] * b[{j}]")).collect();
                writeln!(src, "    o[{k}] = {};", sum.join(" + ")).unwrap();
            }
            writeln!(src, "}}\n").unwrap();
        }
    }
    let out = PathBuf::from(std::env::var("OUT_DIR").unwrap()).join("jet_mul.rs");
    std::fs::write(out, src).unwrap();
}
