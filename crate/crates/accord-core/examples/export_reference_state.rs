//! Write the reference zero-accord entangled state to stdout in the CLI's
//! JSON state format:
//!
//! ```sh
//! cargo run -p accord-core --example export_reference_state > state.json
//! accord compute --state state.json
//! ```

fn main() {
    let rho = accord_core::qstate::appendix_d_state();
    println!("{}", accord_core::qstate::state_to_json(&rho));
}
