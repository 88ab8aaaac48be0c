use super::CurveSpec;

macro_rules! curve {
    ($id:literal, [$a1:expr, $a2:expr, $a3:expr, $a4:expr, $a6:expr], D = $d:literal, disc = $disc:literal,
     f = $f:literal, m = $m:literal, bad = $bad:expr, class = $class:literal, note = $note:expr) => {
        CurveSpec {
            id: $id,
            ainvs: [$a1, $a2, $a3, $a4, $a6],
            d: $d,
            disc_k: $disc,
            order_conductor: $f,
            m_e: $m,
            bad_primes: $bad,
            isogeny_class: $class,
            note: $note,
        }
    };
}

const CURATED_E4: &str = "data-curated: the x coefficient of this model is -887";
const CURATED_E7: &str = "data-curated: a4 = -33083930 makes this the -67 twist of E7";

static REGISTRY: [CurveSpec; 20] = [
    curve!("E1", [0, 0, 0, 4, 0], D = 1, disc = -4, f = 1, m = 4, bad = &[2], class = "E1", note = None),
    curve!("E1a", [0, 0, 0, -1, 0], D = 1, disc = -4, f = 1, m = 4, bad = &[2], class = "E1", note = None),
    curve!("E1b", [0, 0, 0, -11, -14], D = 1, disc = -4, f = 2, m = 4, bad = &[2], class = "E1", note = None),
    curve!("E1s", [0, 0, 0, -11, 14], D = 1, disc = -4, f = 2, m = 4, bad = &[2], class = "E1", note = None),
    curve!("E2", [0, 0, 0, 0, 1], D = 3, disc = -3, f = 1, m = 12, bad = &[2, 3], class = "E2", note = None),
    curve!("E2a", [0, 0, 0, 0, -27], D = 3, disc = -3, f = 1, m = 12, bad = &[2, 3], class = "E2", note = None),
    curve!("E2s", [0, 0, 0, -15, 22], D = 3, disc = -3, f = 2, m = 12, bad = &[2, 3], class = "E2", note = None),
    curve!("E2b", [0, 0, 0, -135, -594], D = 3, disc = -3, f = 2, m = 12, bad = &[2, 3], class = "E2", note = None),
    curve!("E3", [1, -1, 0, -2, -1], D = 7, disc = -7, f = 1, m = 28, bad = &[7], class = "E3", note = None),
    curve!("E3p", [1, -1, 0, -107, 552], D = 7, disc = -7, f = 1, m = 28, bad = &[7], class = "E3", note = None),
    curve!("E4", [0, -1, 1, -7, 10], D = 11, disc = -11, f = 1, m = 44, bad = &[11], class = "E4", note = None),
    curve!("E4p", [0, -1, 1, -887, -10143], D = 11, disc = -11, f = 1, m = 44, bad = &[11], class = "E4",
        note = Some(CURATED_E4)),
    curve!("E5", [0, 0, 1, -38, 90], D = 19, disc = -19, f = 1, m = 76, bad = &[19], class = "E5", note = None),
    curve!("E5p", [0, 0, 1, -13718, -619025], D = 19, disc = -19, f = 1, m = 76, bad = &[19], class = "E5",
        note = None),
    curve!("E6", [0, 0, 1, -860, 9707], D = 43, disc = -43, f = 1, m = 172, bad = &[43], class = "E6", note = None),
    curve!("E6p", [0, 0, 1, -1590140, -771794326], D = 43, disc = -43, f = 1, m = 172, bad = &[43], class = "E6",
        note = None),
    curve!("E7", [0, 0, 1, -7370, 243528], D = 67, disc = -67, f = 1, m = 268, bad = &[67], class = "E7",
        note = None),
    curve!("E7p", [0, 0, 1, -33083930, -73244287055], D = 67, disc = -67, f = 1, m = 268, bad = &[67],
        class = "E7", note = Some(CURATED_E7)),
    curve!("E8", [0, 0, 1, -2174420, 1234136692], D = 163, disc = -163, f = 1, m = 652, bad = &[163],
        class = "E8", note = None),
    curve!("E8p", [0, 0, 1, -57772164980, -5344733777551611], D = 163, disc = -163, f = 1, m = 652,
        bad = &[163], class = "E8", note = None),
];

/// The twenty registered curves, grouped by isogeny class.
pub fn registry() -> &'static [CurveSpec] {
    &REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static CurveSpec> {
    REGISTRY.iter().find(|c| c.id.eq_ignore_ascii_case(id))
}

/// Curves sharing an isogeny class with `curve`, itself included.
pub fn class_members(curve: &CurveSpec) -> impl Iterator<Item = &'static CurveSpec> + '_ {
    REGISTRY.iter().filter(move |c| c.isogeny_class == curve.isogeny_class)
}
