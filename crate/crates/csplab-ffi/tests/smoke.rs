//! Exercise the C ABI from Rust: handle lifecycle, error codes, round-trip
//! serialization, solving, and the audit.

use std::ffi::CString;

use csplab_ffi::*;
use libc::c_char;

#[test]
fn parse_sample_solve_roundtrip() {
    unsafe {
        let expr = CString::new("ed3").unwrap();
        let mut dist: *mut CsplabDist = std::ptr::null_mut();
        assert_eq!(csplab_dist_parse(expr.as_ptr(), &mut dist), CSPLAB_OK);
        assert_eq!(csplab_dist_d(dist), 3);
        assert_eq!(csplab_dist_k(dist), 2);

        let mut inst: *mut CsplabInstance = std::ptr::null_mut();
        assert_eq!(
            csplab_sample(dist, 60, 1.5, CSPLAB_FLAVOR_HAT, 42, 0, &mut inst),
            CSPLAB_OK
        );
        let n = csplab_instance_n(inst);
        assert_eq!(n, 60);
        assert!(csplab_instance_edges(inst) > 0);

        let mut status = -1;
        let mut witness = vec![0u8; n as usize];
        assert_eq!(
            csplab_solve(inst, 1_000_000, &mut status, witness.as_mut_ptr()),
            CSPLAB_OK
        );
        assert_eq!(status, CSPLAB_SAT);
        assert!(witness.iter().all(|&v| (1..=3).contains(&v)));

        let mut text: *mut c_char = std::ptr::null_mut();
        assert_eq!(csplab_instance_write(inst, &mut text), CSPLAB_OK);
        let mut inst2: *mut CsplabInstance = std::ptr::null_mut();
        assert_eq!(csplab_instance_read(text, &mut inst2), CSPLAB_OK);
        assert_eq!(csplab_instance_edges(inst2), csplab_instance_edges(inst));

        csplab_string_free(text);
        csplab_instance_free(inst2);
        csplab_instance_free(inst);
        csplab_dist_free(dist);
    }
}

#[test]
fn audit_verdicts_cross_abi() {
    unsafe {
        let expr = CString::new("ed3").unwrap();
        let mut dist: *mut CsplabDist = std::ptr::null_mut();
        assert_eq!(csplab_dist_parse(expr.as_ptr(), &mut dist), CSPLAB_OK);
        let mut verdict = -1;
        assert_eq!(
            csplab_audit_binary(dist, &mut verdict, std::ptr::null_mut()),
            CSPLAB_OK
        );
        assert_eq!(verdict, CSPLAB_AUDIT_ALL_SATISFIABLE);
        csplab_dist_free(dist);

        let expr = CString::new("coloring:2").unwrap();
        let mut dist: *mut CsplabDist = std::ptr::null_mut();
        assert_eq!(csplab_dist_parse(expr.as_ptr(), &mut dist), CSPLAB_OK);
        let mut witness: *mut CsplabInstance = std::ptr::null_mut();
        assert_eq!(
            csplab_audit_binary(dist, &mut verdict, &mut witness),
            CSPLAB_OK
        );
        assert_eq!(verdict, CSPLAB_AUDIT_COUNTEREXAMPLE);
        assert!(!witness.is_null());
        let mut status = -1;
        assert_eq!(
            csplab_solve(witness, 1_000_000, &mut status, std::ptr::null_mut()),
            CSPLAB_OK
        );
        assert_eq!(status, CSPLAB_UNSAT);
        csplab_instance_free(witness);
        csplab_dist_free(dist);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let expr = CString::new("no-such-model").unwrap();
        let mut dist: *mut CsplabDist = std::ptr::null_mut();
        let code = csplab_dist_parse(expr.as_ptr(), &mut dist);
        assert!(code == CSPLAB_ERR_INPUT || code == CSPLAB_ERR_PARSE);
        let mut buf = vec![0i8; 256];
        let len = csplab_last_error(buf.as_mut_ptr() as *mut c_char, buf.len());
        assert!(len > 0);

        assert_eq!(
            csplab_dist_parse(std::ptr::null(), &mut dist),
            CSPLAB_ERR_NULL
        );
        let mut inst: *mut CsplabInstance = std::ptr::null_mut();
        assert_eq!(
            csplab_sample(
                std::ptr::null(),
                10,
                1.0,
                CSPLAB_FLAVOR_HAT,
                0,
                0,
                &mut inst
            ),
            CSPLAB_ERR_NULL
        );
        let bad = CString::new("not an instance").unwrap();
        assert_eq!(
            csplab_instance_read(bad.as_ptr(), &mut inst),
            CSPLAB_ERR_PARSE
        );
    }
}
