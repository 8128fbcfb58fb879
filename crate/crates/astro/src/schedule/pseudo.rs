//! C-like pseudocode rendering of a schedule, for documentation or for
//! hand-porting the table into an instrumented program.

use crate::model::{HardwarePhase, ProgramPhase, N_HARDWARE_PHASES};
use crate::schedule::Schedule;

fn c_phase_name(phase: ProgramPhase) -> &'static str {
    match phase {
        ProgramPhase::Blocked => "PHASE_BLOCKED",
        ProgramPhase::IOBound => "PHASE_IO_BOUND",
        ProgramPhase::CPUBound => "PHASE_CPU_BOUND",
        ProgramPhase::Other => "PHASE_OTHER",
    }
}

/// Renders the schedule as a self-contained C-like listing. The listing is
/// documentation: it compiles in the reader's head, not necessarily in a
/// compiler (`set_configuration` is the target system's affair).
pub fn emit_pseudo(schedule: &Schedule, benchmark: &str) -> String {
    let topology = schedule.topology();
    let mut out = String::new();
    out.push_str(&format!(
        "/* {benchmark}: checkpoint schedule for a {}L+{}B machine ({} kind) */\n",
        topology.n_little,
        topology.n_big,
        schedule.kind()
    ));
    out.push_str("/* configuration ids:");
    for config in topology.configs() {
        out.push_str(&format!(" {}={}", config.id, config.label()));
    }
    out.push_str(" */\n\n");
    for (index, phase) in ProgramPhase::ALL.iter().enumerate() {
        out.push_str(&format!("#define {} {}\n", c_phase_name(*phase), index));
    }
    out.push('\n');

    match schedule {
        Schedule::Static(s) => {
            out.push_str("int next_configuration(int prog_phase) {\n");
            out.push_str("    switch (prog_phase) {\n");
            for phase in ProgramPhase::ALL {
                let id = s.config_for(phase);
                let label = topology.config(id).expect("table ids are valid").label();
                out.push_str(&format!(
                    "    case {}: return {id}; /* {label} */\n",
                    c_phase_name(phase)
                ));
            }
            out.push_str("    }\n    return 0;\n}\n\n");
            out.push_str("void checkpoint(int prog_phase) {\n");
            out.push_str("    set_configuration(next_configuration(prog_phase));\n}\n");
        }
        Schedule::Hybrid(s) => {
            out.push_str(&format!(
                "static const int SCHEDULE[4][{N_HARDWARE_PHASES}] = {{\n"
            ));
            for phase in ProgramPhase::ALL {
                out.push_str(&format!("    /* {} */\n    {{", phase.name()));
                for hw in 0..N_HARDWARE_PHASES {
                    if hw > 0 {
                        out.push(',');
                        if hw % 27 == 0 {
                            out.push_str("\n     ");
                        } else {
                            out.push(' ');
                        }
                    }
                    let hw_phase =
                        HardwarePhase::from_index(hw).expect("indices 0..81 are valid");
                    out.push_str(&s.config_for(phase, &hw_phase).to_string());
                }
                out.push_str("},\n");
            }
            out.push_str("};\n\n");
            out.push_str("int next_configuration(int prog_phase, int hw_phase) {\n");
            out.push_str("    return SCHEDULE[prog_phase][hw_phase];\n}\n\n");
            out.push_str("void checkpoint(int prog_phase, int hw_phase) {\n");
            out.push_str(
                "    set_configuration(next_configuration(prog_phase, hw_phase));\n}\n",
            );
        }
    }
    out
}
