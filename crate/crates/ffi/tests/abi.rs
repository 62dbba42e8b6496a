use std::ffi::CStr;
use std::ptr;

use dipole_memory_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { dm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n >= 1);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn read_law_through_the_abi() {
    unsafe {
        // tau_r = g^2 T / kappa = 1 with g = 1, kappa = 1, T = 1.
        let mut g = ptr::null_mut();
        assert_eq!(dm_schedule_square(0.0, 1.0, 1.0, &mut g), DmStatus::Ok);
        let zeros = vec![0.0; 2001];
        let mut input = ptr::null_mut();
        assert_eq!(
            dm_envelope_from_samples(0.0, 1e-3, 2001, zeros.as_ptr(), zeros.as_ptr(), &mut input),
            DmStatus::Ok
        );
        let mut r = ptr::null_mut();
        let status = dm_simulate(
            DmModel::Adiabatic,
            input,
            g,
            ptr::null(),
            1.0,
            0.0,
            1.0,
            0.0,
            &mut r,
        );
        assert_eq!(status, DmStatus::Ok);
        let mut e = DmEfficiencies {
            eta_w: 0.0,
            eta_r: 0.0,
            eta_tot: 0.0,
            leakage: 0.0,
            decay_loss: 0.0,
        };
        assert_eq!(dm_result_efficiencies(r, &mut e), DmStatus::Ok);
        assert!((e.eta_r - (1.0 - (-2.0f64).exp())).abs() < 1e-8);
        assert!(e.eta_w.is_nan(), "no input, so no write efficiency");

        let n = dm_result_len(r);
        assert_eq!(n, 2001);
        let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
        assert_eq!(
            dm_result_output(r, re.as_mut_ptr(), im.as_mut_ptr(), n),
            DmStatus::Ok
        );
        assert!(re.iter().chain(&im).any(|v| *v != 0.0));
        assert_eq!(
            dm_result_output(r, re.as_mut_ptr(), im.as_mut_ptr(), 3),
            DmStatus::Parameter
        );
        assert!(dm_result_continuity_residual(r) < 1e-6);

        dm_result_free(r);
        dm_envelope_free(input);
        dm_schedule_free(g);
    }
}

#[test]
fn optimal_input_is_normalized_and_absorbed() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(dm_schedule_square(-1.0, 0.0, 1.0, &mut g), DmStatus::Ok);
        let mut e = ptr::null_mut();
        assert_eq!(
            dm_optimal_write_input(g, 1.0, 0.0, -1.0, 1e-3, 1001, &mut e),
            DmStatus::Ok
        );
        assert!((dm_envelope_norm(e) - 1.0).abs() < 1e-12);
        let mut r = ptr::null_mut();
        assert_eq!(
            dm_simulate(
                DmModel::Adiabatic,
                e,
                g,
                ptr::null(),
                1.0,
                0.0,
                0.0,
                0.0,
                &mut r
            ),
            DmStatus::Ok
        );
        let mut eff = std::mem::zeroed::<DmEfficiencies>();
        assert_eq!(dm_result_efficiencies(r, &mut eff), DmStatus::Ok);
        assert!((eff.eta_w - (1.0 - (-2.0f64).exp())).abs() < 1e-6);
        dm_result_free(r);
        dm_envelope_free(e);
        dm_schedule_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(
            dm_schedule_square(1.0, 0.0, 1.0, &mut g),
            DmStatus::Parameter
        );
        assert!(g.is_null());
        assert!(last_error().contains("segment"), "{}", last_error());

        assert_eq!(
            dm_schedule_square(0.0, 1.0, 1.0, ptr::null_mut()),
            DmStatus::NullPointer
        );

        let mut out = 0.0;
        assert_eq!(
            dm_total_efficiency(-1.0, 1.0, &mut out),
            DmStatus::Parameter
        );
        assert_eq!(dm_total_efficiency(1.0, 1.0, &mut out), DmStatus::Ok);
        assert!((out - 0.747_645_072_4).abs() < 1e-9);

        // The full model refuses a step that does not resolve 1/kappa.
        assert_eq!(dm_schedule_square(0.0, 1.0, 1.0, &mut g), DmStatus::Ok);
        let mut e = ptr::null_mut();
        assert_eq!(
            dm_envelope_gaussian(0.0, 0.5, 5, 1.0, 0.3, &mut e),
            DmStatus::Ok
        );
        let mut r = ptr::null_mut();
        assert_eq!(
            dm_simulate(DmModel::Full, e, g, ptr::null(), 1.0, 0.0, 0.0, 0.0, &mut r),
            DmStatus::Stability
        );
        assert!(r.is_null());
        dm_envelope_free(e);
        dm_schedule_free(g);

        // Freeing null is a no-op.
        dm_schedule_free(ptr::null_mut());
        dm_result_free(ptr::null_mut());
        assert!(dm_schedule_value(ptr::null(), 0.0).is_nan());
    }
}

#[test]
fn closed_forms() {
    let mut out = 0.0;
    unsafe {
        assert_eq!(
            dm_square_pulse_efficiency(1.0, 1.0, 1.0, 1e3, &mut out),
            DmStatus::Ok
        );
    }
    assert!((out - 0.5).abs() < 1e-12);
    assert!((dm_bessel_kernel(DmBesselOrder::Zero, 1.0) - 2.279_585_302_336_067).abs() < 1e-13);
    assert!((dm_bessel_kernel(DmBesselOrder::One, 0.0) - 1.0).abs() < 1e-15);
    let v = unsafe { CStr::from_ptr(dm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn merged_and_tabulated_schedules() {
    unsafe {
        let (mut a, mut b, mut m) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(dm_schedule_square(0.0, 1.0, 2.0, &mut a), DmStatus::Ok);
        let (t, v) = ([2.0, 3.0, 4.0], [-1.0, 1.0, -1.0]);
        assert_eq!(
            dm_schedule_tabulated(t.as_ptr(), v.as_ptr(), 3, false, &mut b),
            DmStatus::Parameter
        );
        assert_eq!(
            dm_schedule_tabulated(t.as_ptr(), v.as_ptr(), 3, true, &mut b),
            DmStatus::Ok
        );
        assert_eq!(
            dm_schedule_merge(a, ptr::null(), &mut m),
            DmStatus::NullPointer
        );
        let v = [0.0, 1.0, 0.0];
        dm_schedule_free(b);
        assert_eq!(
            dm_schedule_tabulated(t.as_ptr(), v.as_ptr(), 3, false, &mut b),
            DmStatus::Ok
        );
        assert_eq!(dm_schedule_merge(a, b, &mut m), DmStatus::Ok);
        assert_eq!(dm_schedule_value(m, 0.5), 2.0);
        assert!((dm_schedule_value(m, 3.0) - 1.0).abs() < 1e-15);
        for s in [a, b, m] {
            dm_schedule_free(s);
        }
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/dipole_memory.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    assert!(header.contains("typedef struct DmSchedule DmSchedule;"));
}
