use sisi::ModelParams;

/// Parameters (and, for trajectory figures, a starting point) behind each
/// `--figure N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub number: u32,
    pub params: ModelParams,
    pub init: Option<[f64; 4]>,
    pub kind: PresetKind,
    pub note: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetKind {
    Trajectory,
    Curves,
}

pub fn preset(n: u32) -> Option<Preset> {
    let (params, init, kind, note) = match n {
        1 => (
            ModelParams::new(0.6, 0.2, 0.5, 0.0, 1.0, 0.3),
            Some([0.1, 0.01, 0.2, 0.69]),
            PresetKind::Trajectory,
            "beta2=0 below threshold: converges to lambda1",
        ),
        2 => (
            ModelParams::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.3),
            Some([0.3, 0.2, 0.4, 0.1]),
            PresetKind::Trajectory,
            "beta2=0 above threshold: converges to lambda10",
        ),
        3 => (
            ModelParams::new(0.6, 0.1, 0.5, 0.01, 1.2, 1.1),
            Some([0.2, 0.1, 0.3, 0.4]),
            PresetKind::Trajectory,
            "all rates positive, below threshold: converges to lambda1",
        ),
        4 => (
            ModelParams::new(0.1, 0.01, 0.8, 0.2, 0.5, 1.2),
            Some([0.2, 0.4, 0.1, 0.3]),
            PresetKind::Trajectory,
            "all rates positive, above threshold: converges to lambda11",
        ),
        5 => (
            ModelParams::new(0.2, 0.3, 0.6, 0.4, 1.0, 1.0),
            None,
            PresetKind::Curves,
            "f/g curves above threshold: one positive crossing",
        ),
        6 => (
            ModelParams::new(0.6, 0.1, 0.5, 0.01, 1.2, 1.1),
            None,
            PresetKind::Curves,
            "f/g curves below threshold: no positive crossing",
        ),
        _ => return None,
    };
    Some(Preset {
        number: n,
        params,
        init,
        kind,
        note,
    })
}
