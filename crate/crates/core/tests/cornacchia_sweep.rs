use lang_trotter::arith::{cornacchia_factored, factorize};
use rayon::prelude::*;

const M_MAX: u64 = 100_000;
const D_MAX: u64 = 200;

#[test]
fn matches_enumeration_for_all_small_inputs() {
    let factors: Vec<Vec<(u64, u32)>> = (0..=M_MAX)
        .map(|m| if m == 0 { Vec::new() } else { factorize(m) })
        .collect();
    (1..=D_MAX).into_par_iter().for_each(|d| {
        let mut expected: Vec<Vec<(u64, u64)>> = vec![Vec::new(); M_MAX as usize + 1];
        let mut x = 0u64;
        while x * x <= M_MAX {
            let mut y = 0u64;
            while x * x + d * y * y <= M_MAX {
                expected[(x * x + d * y * y) as usize].push((x, y));
                y += 1;
            }
            x += 1;
        }
        for m in 1..=M_MAX {
            let got: Vec<(u64, u64)> = cornacchia_factored(d, m, &factors[m as usize])
                .iter()
                .map(|s| (s.x, s.y))
                .collect();
            assert_eq!(got, expected[m as usize], "d={d} m={m}");
        }
    });
}
