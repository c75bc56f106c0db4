//! Experiment presets shipped with the binary.

const PRESETS: &[(&str, &str)] = &[
    ("conservation", include_str!("../presets/conservation.cfg")),
    ("dispersion", include_str!("../presets/dispersion.cfg")),
    ("peakon_transport", include_str!("../presets/peakon_transport.cfg")),
    ("peakon_convergence", include_str!("../presets/peakon_convergence.cfg")),
    ("breaking", include_str!("../presets/breaking.cfg")),
    ("oleinik_step", include_str!("../presets/oleinik_step.cfg")),
    ("entropy_riemann", include_str!("../presets/entropy_riemann.cfg")),
    ("entropy_up_jump", include_str!("../presets/entropy_up_jump.cfg")),
    ("viscosity", include_str!("../presets/viscosity.cfg")),
    ("peakon_wave", include_str!("../presets/peakon_wave.cfg")),
    ("cusp_wave", include_str!("../presets/cusp_wave.cfg")),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_text;

    #[test]
    fn every_preset_parses_and_names_its_command() {
        for name in names() {
            let m = parse_text(get(name).unwrap(), name).unwrap();
            assert!(m.contains_key("command"), "{name}");
        }
        assert!(get("missing").is_none());
    }
}
