//! The twelve reproduction criteria at their full sweeps and stated tolerances, one test each.
//! Every test writes its PASS/FAIL line straight to stderr so the lines show up even when
//! output capture is on.

use std::io::Write;

use rhokit::verify::{run_criterion, VerifyConfig};

fn criterion(id: usize) {
    let check = run_criterion(id, &VerifyConfig::full());
    let mut err = std::io::stderr().lock();
    writeln!(err, "acceptance {}", check.line()).ok();
    assert!(check.pass, "{}", check.line());
}

macro_rules! criteria {
    ($($name:ident => $id:expr),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                criterion($id);
            }
        )*
    };
}

criteria! {
    c01_rho_two_closed_form => 1,
    c02_critical_point => 2,
    c03_discriminant_sign => 3,
    c04_determinant_oracle => 4,
    c05_null_vector_structure => 5,
    c06_rotation_family => 6,
    c07_trig_system => 7,
    c08_case_two_monotone_decrease => 8,
    c09_harnack_part_in_c2 => 9,
    c10_membership_necessaries => 10,
    c11_nilpotent_bound => 11,
    c12_irreducibility => 12,
}
