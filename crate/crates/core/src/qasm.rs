//! OpenQASM 2.0 export.

use std::fmt::Write;

use crate::circuit::{Circuit, CircuitError};
use crate::statevector::Gate;

pub const MAX_EXPORT_QUBITS: usize = 32;

/// Lowers a circuit to OpenQASM 2.0, one statement per line.
///
/// Anti-CX has no qelib1 equivalent and is emitted as `x c; cx c,t; x c;`.
pub fn to_qasm(circuit: &Circuit) -> Result<String, CircuitError> {
    if circuit.num_qubits() > MAX_EXPORT_QUBITS {
        return Err(CircuitError::TooManyQubits {
            found: circuit.num_qubits(),
            max: MAX_EXPORT_QUBITS,
        });
    }
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", circuit.num_qubits()).unwrap();
    if circuit.num_clbits() > 0 {
        writeln!(out, "creg c[{}];", circuit.num_clbits()).unwrap();
    }
    for op in circuit.ops() {
        match *op {
            Gate::H { qubit } => writeln!(out, "h q[{qubit}];"),
            Gate::X { qubit } => writeln!(out, "x q[{qubit}];"),
            Gate::Cx { control, target } => writeln!(out, "cx q[{control}],q[{target}];"),
            Gate::AntiCx { control, target } => writeln!(
                out,
                "x q[{control}];\ncx q[{control}],q[{target}];\nx q[{control}];"
            ),
            Gate::Ccx { control0, control1, target } => {
                writeln!(out, "ccx q[{control0}],q[{control1}],q[{target}];")
            }
            Gate::Reset { qubit } => writeln!(out, "reset q[{qubit}];"),
            Gate::Measure { qubit, clbit } => writeln!(out, "measure q[{qubit}] -> c[{clbit}];"),
        }
        .unwrap();
    }
    Ok(out)
}
